//! Result values carrying an enclosure radius and the method that produced them.

use crate::moments::Sqrt2Rational;
use crate::numerics::{CBall, Mag};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Hypergeometric,
    Recurrence,
    Quadrature,
    ExactSum,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Hypergeometric => "hypergeometric",
            Method::Recurrence => "recurrence",
            Method::Quadrature => "quadrature",
            Method::ExactSum => "exact-sum",
        }
    }
}

/// A computed value. `value` is a ball whose radius is the rigorous error bound.
#[derive(Debug, Clone)]
pub struct MomentValue {
    pub value: CBall,
    pub method: Method,
    pub exact: Option<ExactValue>,
}

/// An exact form attached to a numeric value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactValue {
    pub value: Sqrt2Rational,
    /// False when the form was recognised numerically and only verified.
    pub proven: bool,
}

impl MomentValue {
    pub fn new(value: CBall, method: Method) -> Self {
        MomentValue {
            value,
            method,
            exact: None,
        }
    }

    pub fn with_exact(mut self, value: Sqrt2Rational, proven: bool) -> Self {
        self.exact = Some(ExactValue { value, proven });
        self
    }

    pub fn err(&self) -> Mag {
        self.value.rad()
    }
}
