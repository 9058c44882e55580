//! Ball arithmetic and the special-function kernel.

pub mod ball;
pub mod complex;
pub mod context;
pub mod decimal;
pub mod elementary;
pub mod gamma;
pub mod hyp;
pub mod incgamma;
pub mod mag;
pub mod quadrature;
pub mod scalar;

pub use ball::Ball;
pub use complex::CBall;
pub use context::PrecisionContext;
pub use mag::Mag;
pub use scalar::Scalar;
