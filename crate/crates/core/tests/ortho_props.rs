//! Almost-orthogonality quantities on random small families.

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nilradon::ortho::{
    cotlar_stein_bound, internal_inequalities, quantity_bp, spectral_norm, OperatorFamily, PatternMode,
};

fn random_family(seed: u64, k: usize, n: usize, hermitian: bool) -> OperatorFamily {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ops = (0..k)
        .map(|_| {
            let m = DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            let m = if hermitian { &m + m.adjoint() } else { m };
            let s = rng.random_range(0.1..1.0) / spectral_norm(&m).unwrap();
            m.map(|z| z * s)
        })
        .collect();
    OperatorFamily::new(ops).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn internal_inequalities_hold(seed in any::<u64>(), k in 1usize..=5, hermitian in any::<bool>()) {
        let fam = random_family(seed, k, 5, hermitian);
        prop_assert_eq!(fam.is_selfadjoint(), hermitian);
        for c in internal_inequalities(&fam, &[1, 2], PatternMode::Exact).unwrap() {
            prop_assert!(c.holds, "{:?}", c);
        }
    }

    #[test]
    fn cotlar_stein_is_an_upper_bound(seed in any::<u64>(), k in 1usize..=6) {
        let fam = random_family(seed, k, 6, false);
        prop_assert!(cotlar_stein_bound(&fam).unwrap() >= fam.sum_norm().unwrap() * (1.0 - 1e-12));
    }

    #[test]
    fn heuristic_is_a_lower_bound(seed in any::<u64>(), k in 2usize..=8) {
        let fam = random_family(seed, k, 4, false);
        let e = quantity_bp(&fam, 1, PatternMode::Exact).unwrap();
        let h = quantity_bp(&fam, 1, PatternMode::Heuristic { restarts: 50, seed }).unwrap();
        prop_assert!(h.value <= e.value);
        prop_assert!(!h.exact && e.exact);
    }
}
