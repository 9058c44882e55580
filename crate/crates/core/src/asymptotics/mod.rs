//! Exact large-N expansions.

pub mod coeffs;
pub mod laurent;
pub mod mgf;
pub mod ops;
pub mod moment;
pub mod stieltjes;

pub use coeffs::{a_coefficients, b_coefficients, gauss_2f1_large_c_expansion, Gauss2F1Expansion};
pub use laurent::Laurent;
pub use mgf::{mgf_expansion_levels, Level, SinhCoshPoly};
pub use moment::{density_correction_polynomials, moment_asymptotic, AsymptoticSeries, DensityCorrection};
pub use stieltjes::{stieltjes_expansion_levels, StieltjesLevel};
