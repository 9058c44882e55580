//! Complex balls as rectangular pairs of real balls.

use super::ball::Ball;
use super::elementary as el;
use super::mag::Mag;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, PartialEq)]
pub struct CBall {
    pub re: Ball,
    pub im: Ball,
}

impl fmt::Debug for CBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?} + {:?}i)", self.re, self.im)
    }
}

impl CBall {
    pub fn new(re: Ball, im: Ball) -> Self {
        CBall { re, im }
    }

    pub fn from_real(re: Ball) -> Self {
        let p = re.prec();
        CBall {
            re,
            im: Ball::zero(p),
        }
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        Self::from_real(Ball::from_i64(v, prec))
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        CBall::new(Ball::from_f64(re, prec), Ball::from_f64(im, prec))
    }

    pub fn zero(prec: u32) -> Self {
        Self::from_i64(0, prec)
    }

    pub fn one(prec: u32) -> Self {
        Self::from_i64(1, prec)
    }

    pub fn i(prec: u32) -> Self {
        CBall::new(Ball::zero(prec), Ball::one(prec))
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn with_prec(self, prec: u32) -> Self {
        CBall::new(self.re.with_prec(prec), self.im.with_prec(prec))
    }

    /// Whether the imaginary part is exactly zero.
    pub fn is_real(&self) -> bool {
        self.im.mid_is_zero() && self.im.is_exact()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    /// Larger of the two component radii.
    pub fn rad(&self) -> Mag {
        self.re.rad().max(&self.im.rad())
    }

    pub fn add_error(self, e: &Mag) -> Self {
        CBall::new(self.re.add_error(e), self.im.add_error(e))
    }

    pub fn mid(&self) -> CBall {
        CBall::new(self.re.mid(), self.im.mid())
    }

    pub fn conj(&self) -> CBall {
        CBall::new(self.re.clone(), self.im.neg())
    }

    pub fn neg(&self) -> CBall {
        CBall::new(self.re.neg(), self.im.neg())
    }

    pub fn add(&self, o: &CBall) -> CBall {
        CBall::new(&self.re + &o.re, &self.im + &o.im)
    }

    pub fn sub(&self, o: &CBall) -> CBall {
        CBall::new(&self.re - &o.re, &self.im - &o.im)
    }

    pub fn mul(&self, o: &CBall) -> CBall {
        if o.is_real() {
            return self.mul_real(&o.re);
        }
        if self.is_real() {
            return o.mul_real(&self.re);
        }
        CBall::new(
            &(&self.re * &o.re) - &(&self.im * &o.im),
            &(&self.re * &o.im) + &(&self.im * &o.re),
        )
    }

    pub fn sqr(&self) -> CBall {
        self.mul(self)
    }

    pub fn mul_real(&self, b: &Ball) -> CBall {
        if self.is_real() {
            return CBall::new(&self.re * b, Ball::zero(self.prec().max(b.prec())));
        }
        CBall::new(&self.re * b, &self.im * b)
    }

    pub fn div_real(&self, b: &Ball) -> CBall {
        if self.is_real() {
            return CBall::new(&self.re / b, Ball::zero(self.prec().max(b.prec())));
        }
        CBall::new(&self.re / b, &self.im / b)
    }

    pub fn mul_i64(&self, k: i64) -> CBall {
        CBall::new(self.re.mul_i64(k), self.im.mul_i64(k))
    }

    pub fn div_i64(&self, k: i64) -> CBall {
        CBall::new(self.re.div_i64(k), self.im.div_i64(k))
    }

    pub fn mul_2exp(&self, k: i64) -> CBall {
        CBall::new(self.re.mul_2exp(k), self.im.mul_2exp(k))
    }

    pub fn add_real(&self, b: &Ball) -> CBall {
        CBall::new(&self.re + b, self.im.clone())
    }

    pub fn add_i64(&self, k: i64) -> CBall {
        CBall::new(self.re.add_i64(k), self.im.clone())
    }

    /// `|z|²` as a real ball.
    pub fn norm_sqr(&self) -> Ball {
        &self.re.sqr() + &self.im.sqr()
    }

    pub fn div(&self, o: &CBall) -> CBall {
        if o.is_real() {
            return self.div_real(&o.re);
        }
        let d = o.norm_sqr();
        self.mul(&o.conj()).div_real(&d)
    }

    pub fn inv(&self) -> CBall {
        CBall::one(self.prec()).div(self)
    }

    pub fn abs_upper(&self) -> Mag {
        let a = self.re.abs_upper();
        let b = self.im.abs_upper();
        a.mul(&a).add(&b.mul(&b)).sqrt()
    }

    pub fn abs_lower(&self) -> Mag {
        let a = self.re.abs_lower();
        let b = self.im.abs_lower();
        let s = a.mul_lower(&a);
        let t = b.mul_lower(&b);
        // lower bound of sqrt(s + t) via the larger component
        let m = a.max(&b);
        let f = (s.to_f64() + t.to_f64()).sqrt() * (1.0 - 1e-12);
        if f.is_finite() && f > 0.0 {
            Mag::from_f64_lower(f).max(&m)
        } else {
            m
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    pub fn overlaps(&self, o: &CBall) -> bool {
        self.re.overlaps(&o.re) && self.im.overlaps(&o.im)
    }

    pub fn abs(&self) -> Ball {
        if self.is_real() {
            return self.re.abs();
        }
        self.norm_sqr().sqrt()
    }

    pub fn arg(&self) -> Ball {
        el::atan2(&self.im, &self.re)
    }

    pub fn exp(&self) -> CBall {
        let e = el::exp(&self.re);
        if self.is_real() {
            return CBall::from_real(e);
        }
        let (s, c) = el::sin_cos(&self.im);
        CBall::new(&e * &c, &e * &s)
    }

    /// Principal logarithm.
    pub fn ln(&self) -> CBall {
        if self.is_real() && self.re.is_positive() {
            return CBall::from_real(el::ln(&self.re));
        }
        let m = el::ln(&self.norm_sqr()).mul_2exp(-1);
        CBall::new(m, self.arg())
    }

    /// Principal power `self^w`.
    pub fn pow(&self, w: &CBall) -> CBall {
        w.mul(&self.ln()).exp()
    }

    pub fn sqrt(&self) -> CBall {
        if self.is_real() && self.re.is_positive() {
            return CBall::from_real(self.re.sqrt());
        }
        self.ln().mul_2exp(-1).exp()
    }

    pub fn sin(&self) -> CBall {
        let (s, c) = el::sin_cos(&self.re);
        if self.is_real() {
            return CBall::from_real(s);
        }
        let (sh, ch) = el::sinh_cosh(&self.im);
        CBall::new(&s * &ch, &c * &sh)
    }

    /// `sin(πz)`.
    pub fn sin_pi(&self) -> CBall {
        if self.is_real() {
            return CBall::from_real(el::sin_pi(&self.re));
        }
        let prec = self.prec();
        let k = self.re.round_mid_to_bigint();
        let r = &self.re - &Ball::from_bigint(k.clone(), prec + 64);
        let p = el::pi(prec + 16);
        let v = CBall::new(&r * &p, &self.im * &p).sin();
        if k.bit(0) {
            v.neg()
        } else {
            v
        }
    }

    pub fn pow_u(&self, n: u64) -> CBall {
        let mut r = CBall::one(self.prec());
        let mut b = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                r = r.mul(&b);
            }
            n >>= 1;
            if n > 0 {
                b = b.sqr();
            }
        }
        r
    }

    /// `f64` approximation of both components.
    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl From<Ball> for CBall {
    fn from(b: Ball) -> Self {
        CBall::from_real(b)
    }
}

macro_rules! cbinop {
    ($tr:ident, $f:ident) => {
        impl $tr<&CBall> for &CBall {
            type Output = CBall;
            fn $f(self, o: &CBall) -> CBall {
                CBall::$f(self, o)
            }
        }
    };
}

cbinop!(Add, add);
cbinop!(Sub, sub);
cbinop!(Mul, mul);
cbinop!(Div, div);

impl Neg for &CBall {
    type Output = CBall;
    fn neg(self) -> CBall {
        CBall::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euler_identity() {
        let p = el::pi(200);
        let z = CBall::new(Ball::zero(200), p);
        let e = z.exp();
        assert!(e.overlaps(&CBall::from_i64(-1, 200)));
        assert!(e.rad().log2() < -180.0);
    }

    #[test]
    fn log_exp_roundtrip() {
        let z = CBall::from_f64(-0.75, 2.5, 200);
        let w = z.ln().exp();
        assert!(w.overlaps(&z));
        let q = z.div(&z);
        assert!(q.overlaps(&CBall::one(200)));
    }

    #[test]
    fn sin_pi_complex_matches_sin() {
        let z = CBall::from_f64(3.25, 0.5, 200);
        let a = z.sin_pi();
        let b = z.mul_real(&el::pi(200)).sin();
        assert!(a.overlaps(&b));
    }

    #[test]
    fn sqrt_of_negative_real() {
        let z = CBall::from_i64(-4, 128);
        let s = z.sqrt();
        assert!(s.overlaps(&CBall::new(Ball::zero(128), Ball::from_i64(2, 128))));
    }
}
