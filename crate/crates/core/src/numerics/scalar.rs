//! Arithmetic shared by real and complex balls, so series and quadrature
//! code can be written once.

use super::ball::Ball;
use super::complex::CBall;
use super::mag::Mag;
use std::fmt::Debug;

pub trait Scalar: Clone + Debug + Send + Sync {
    fn from_ball(b: Ball) -> Self;
    fn from_i64(v: i64, prec: u32) -> Self;
    fn prec(&self) -> u32;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul_ball(&self, b: &Ball) -> Self;
    fn mul_i64(&self, k: i64) -> Self;
    fn div_i64(&self, k: i64) -> Self;
    fn abs_upper(&self) -> Mag;
    fn abs_lower(&self) -> Mag;
    fn rad(&self) -> Mag;
    fn add_error(self, e: &Mag) -> Self;
    fn is_finite(&self) -> bool;
    /// `Some(n)` if the value is exactly the integer `-n ≤ 0`.
    fn exact_nonpositive_integer(&self) -> Option<u64>;
    /// Whether the ball touches a nonpositive integer.
    fn near_nonpositive_integer(&self) -> bool;
    fn zero_like(&self) -> Self {
        Self::from_i64(0, self.prec())
    }
    fn one_like(&self) -> Self {
        Self::from_i64(1, self.prec())
    }
}

fn ball_nonpos_int(b: &Ball) -> Option<u64> {
    let n = b.exact_integer()?;
    use num_traits::{Signed, ToPrimitive};
    if n.is_positive() {
        None
    } else {
        (-n).to_u64()
    }
}

fn ball_near_nonpos_int(b: &Ball) -> bool {
    let f = b.to_f64();
    if f > 0.5 && !b.contains_zero() {
        return false;
    }
    let k = b.round_mid_to_bigint();
    use num_traits::Signed;
    if k.is_positive() {
        return false;
    }
    b.overlaps(&Ball::from_bigint(k, b.prec()))
}

impl Scalar for Ball {
    fn from_ball(b: Ball) -> Self {
        b
    }
    fn from_i64(v: i64, prec: u32) -> Self {
        Ball::from_i64(v, prec)
    }
    fn prec(&self) -> u32 {
        Ball::prec(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        Ball::neg(self)
    }
    fn mul_ball(&self, b: &Ball) -> Self {
        self * b
    }
    fn mul_i64(&self, k: i64) -> Self {
        Ball::mul_i64(self, k)
    }
    fn div_i64(&self, k: i64) -> Self {
        Ball::div_i64(self, k)
    }
    fn abs_upper(&self) -> Mag {
        Ball::abs_upper(self)
    }
    fn abs_lower(&self) -> Mag {
        Ball::abs_lower(self)
    }
    fn rad(&self) -> Mag {
        Ball::rad(self)
    }
    fn add_error(self, e: &Mag) -> Self {
        Ball::add_error(self, e)
    }
    fn is_finite(&self) -> bool {
        Ball::is_finite(self)
    }
    fn exact_nonpositive_integer(&self) -> Option<u64> {
        ball_nonpos_int(self)
    }
    fn near_nonpositive_integer(&self) -> bool {
        ball_near_nonpos_int(self)
    }
}

impl Scalar for CBall {
    fn from_ball(b: Ball) -> Self {
        CBall::from_real(b)
    }
    fn from_i64(v: i64, prec: u32) -> Self {
        CBall::from_i64(v, prec)
    }
    fn prec(&self) -> u32 {
        CBall::prec(self)
    }
    fn add(&self, o: &Self) -> Self {
        CBall::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        CBall::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        CBall::mul(self, o)
    }
    fn div(&self, o: &Self) -> Self {
        CBall::div(self, o)
    }
    fn neg(&self) -> Self {
        CBall::neg(self)
    }
    fn mul_ball(&self, b: &Ball) -> Self {
        self.mul_real(b)
    }
    fn mul_i64(&self, k: i64) -> Self {
        CBall::mul_i64(self, k)
    }
    fn div_i64(&self, k: i64) -> Self {
        CBall::div_i64(self, k)
    }
    fn abs_upper(&self) -> Mag {
        CBall::abs_upper(self)
    }
    fn abs_lower(&self) -> Mag {
        CBall::abs_lower(self)
    }
    fn rad(&self) -> Mag {
        CBall::rad(self)
    }
    fn add_error(self, e: &Mag) -> Self {
        CBall::add_error(self, e)
    }
    fn is_finite(&self) -> bool {
        CBall::is_finite(self)
    }
    fn exact_nonpositive_integer(&self) -> Option<u64> {
        if self.is_real() {
            ball_nonpos_int(&self.re)
        } else {
            None
        }
    }
    fn near_nonpositive_integer(&self) -> bool {
        self.im.contains_zero() && ball_near_nonpos_int(&self.re)
    }
}
