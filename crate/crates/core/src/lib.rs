pub mod asymptotics;
pub mod density;
pub mod error;
pub mod moments;
pub mod montecarlo;
pub mod numerics;
pub mod output;
pub mod series;
pub mod transforms;
pub mod value;
pub mod verify;

pub use error::{Error, Result};
pub use value::{Method, MomentValue};
