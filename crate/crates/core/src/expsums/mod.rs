//! The maps D, D̃ and the sums and integrals built on them: complete sums
//! S(a/q), Weyl sums S_{P,r}(θ), oscillatory integrals, and zero counts.

mod complete;
mod dpoly;
mod osc;
mod weyl;
mod zeros;

pub use complete::{
    decay_table_csv, irreducible_numerators, s_aq, s_aq_with_offset, saq_decay_table, sum_from_counts, DecayRow,
    MultiFraction, PhaseHistogram, DEFAULT_SUM_BUDGET,
};
pub use dpoly::{d_from_powers, d_map, d_map_oracle, Variant};
pub use osc::{osc_integral, osc_integral_d1_oracle, resolving_order, OscConfig, OscResult, Window};
pub use weyl::{
    minor_arc_scan, next_prime, weyl_sum, weyl_sum_brute, CutoffPair, CutoffShape, MinorArcReport, PhasePoint,
    DEFAULT_WEYL_BUDGET,
};
pub use zeros::{count_zeros_bound, random_poly, random_set, MultiPoly, ZeroCount};
