//! Structural properties of the sparse Radon transforms.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use nilradon::expsums::Variant;
use nilradon::kernels::{CzKernel, DyadicKernel};
use nilradon::seq::a0_sequence;
use nilradon::transform::{
    apply_chain, exact_composition_kernel, hj_weights, key_identity, OperatorChain, RadonOperator, Registry,
    SparseFunction, DEFAULT_BUDGET,
};

fn kernel(log_osc: bool, jmax: u32) -> DyadicKernel {
    let k = if log_osc { CzKernel::log_osc() } else { CzKernel::hilbert() };
    DyadicKernel::new(k, jmax).unwrap()
}

fn operator(d: usize, log_osc: bool, j: u32) -> RadonOperator<Complex64> {
    RadonOperator::from_real(&a0_sequence(d).unwrap(), &hj_weights(&kernel(log_osc, j), j).unwrap()).unwrap()
}

fn random_fn(seed: u64, d: usize, size: usize) -> SparseFunction<Complex64> {
    SparseFunction::random(&mut ChaCha8Rng::seed_from_u64(seed), d, size, 6).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn adjointness(seed in any::<u64>(), d in 1usize..=2, j in 1u32..=4, log_osc in any::<bool>()) {
        let h = operator(d, log_osc, j);
        let f = random_fn(seed, d, 6);
        let g = random_fn(seed ^ 0x9e37, d, 6);
        let lhs = h.apply(&f, DEFAULT_BUDGET).unwrap().inner(&g);
        let rhs = f.inner(&h.adjoint().apply(&g, DEFAULT_BUDGET).unwrap());
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
    }

    #[test]
    fn linearity(seed in any::<u64>(), d in 1usize..=2, j in 1u32..=3, a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let h = operator(d, false, j);
        let f = random_fn(seed, d, 5);
        let g = random_fn(seed.wrapping_add(1), d, 5);
        let (ca, cb) = (Complex64::new(a, 0.5), Complex64::new(b, -0.25));
        let lhs = h.apply(&f.combine(&ca, &g, &cb).unwrap(), DEFAULT_BUDGET).unwrap();
        let rhs = h.apply(&f, DEFAULT_BUDGET).unwrap().combine(&ca, &h.apply(&g, DEFAULT_BUDGET).unwrap(), &cb).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
    }

    #[test]
    fn commutes_with_right_translations(seed in any::<u64>(), d in 1usize..=2, j in 1u32..=3, t in prop::collection::vec(-4i64..=4, 3)) {
        let h = operator(d, true, j);
        let a = &t[..nilradon::group::index_len(d)];
        let f = random_fn(seed, d, 5);
        let lhs = h.apply(&f.right_translate(a).unwrap(), DEFAULT_BUDGET).unwrap();
        let rhs = h.apply(&f, DEFAULT_BUDGET).unwrap().right_translate(a).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-13);
    }
}

#[test]
fn composition_kernel_matches_chain_on_small_pieces() {
    for d in 1..=2 {
        let mut reg = Registry::new();
        reg.register_kernel("k", CzKernel::log_osc(), 4).unwrap();
        reg.register_sequence("a0", a0_sequence(d).unwrap());
        for j in 1..=3 {
            for k in 1..=3 {
                let chain = OperatorChain::composition(&[(j, k)], Variant::D, "k", "a0");
                let delta = SparseFunction::<Complex64>::delta(d, key_identity(d)).unwrap();
                let via_chain = apply_chain(&reg, &chain, &delta, DEFAULT_BUDGET).unwrap();
                let closed =
                    exact_composition_kernel::<Complex64>(reg.kernel("k").unwrap(), d, &[(j, k)], Variant::D, DEFAULT_BUDGET)
                        .unwrap();
                assert!(via_chain.max_abs_diff(&closed) <= 1e-13, "d={d} j={j} k={k}");
            }
        }
    }
}
