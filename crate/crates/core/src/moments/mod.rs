//! Moments of the real and complex eigenvalue densities.

pub mod exact;
pub mod hyper;
pub mod quadrature;
pub mod recurrence;

pub use exact::{integer_relation, m0_exact, recognize_sqrt2, trace_moment, verify_candidate, Sqrt2Rational};
pub use hyper::{
    half_integer_order, hyp3f2_contiguous_check, m0_hyp, m2_hyp, m2_recognized, moment_complex_eigs, moment_real,
    moment_real_any, moment_real_halfint, moment_real_int,
};
pub use quadrature::{moment_complex_quadrature, moment_real_quadrature, moment_real_quadrature_multi};
pub use recurrence::{moment_sequence_exact, moment_sequence_recurrence, recurrence_coefficients, recurrence_residual};
