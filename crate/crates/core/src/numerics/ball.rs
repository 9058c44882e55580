//! Real ball arithmetic: a midpoint `mid · 2^exp` and a radius.
//!
//! Every operation returns a ball that contains the exact result for all
//! points of its input balls. Midpoints are rounded to the ball's precision
//! and the rounding error is added to the radius.

use super::mag::Mag;
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, PartialEq)]
pub struct Ball {
    mid: BigInt,
    exp: i64,
    rad: Mag,
    prec: u32,
}

impl fmt::Debug for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e} +/- {:?}]", self.to_f64(), self.rad)
    }
}

impl Ball {
    pub fn zero(prec: u32) -> Self {
        Ball {
            mid: BigInt::zero(),
            exp: 0,
            rad: Mag::zero(),
            prec,
        }
    }

    pub fn one(prec: u32) -> Self {
        Self::from_i64(1, prec)
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        Self::from_bigint(BigInt::from(v), prec)
    }

    pub fn from_bigint(v: BigInt, prec: u32) -> Self {
        let mut b = Ball {
            mid: v,
            exp: 0,
            rad: Mag::zero(),
            prec,
        };
        b.round();
        b
    }

    pub fn from_biguint(v: &BigUint, prec: u32) -> Self {
        Self::from_bigint(BigInt::from(v.clone()), prec)
    }

    /// `v · 2^e`.
    pub fn from_bigint_2exp(v: BigInt, e: i64, prec: u32) -> Self {
        let mut b = Ball {
            mid: v,
            exp: e,
            rad: Mag::zero(),
            prec,
        };
        b.round();
        b
    }

    /// Exact conversion of a finite `f64` (rounded only if `prec < 53`).
    pub fn from_f64(v: f64, prec: u32) -> Self {
        assert!(v.is_finite(), "non-finite f64 converted to a ball");
        if v == 0.0 {
            return Self::zero(prec);
        }
        let bits = v.to_bits();
        let neg = bits >> 63 == 1;
        let e = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, ex) = if e == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), e - 1075)
        };
        let m = BigInt::from(m);
        Self::from_bigint_2exp(if neg { -m } else { m }, ex, prec)
    }

    pub fn from_rational(q: &BigRational, prec: u32) -> Self {
        let n = Self::from_bigint(q.numer().clone(), prec + 8);
        let d = Self::from_bigint(q.denom().clone(), prec + 8);
        (&n / &d).with_prec(prec)
    }

    /// `n / d` for machine integers.
    pub fn frac(n: i64, d: i64, prec: u32) -> Self {
        Self::from_rational(&BigRational::new(n.into(), d.into()), prec)
    }

    /// A ball centred at `self` with radius widened by `e`.
    pub fn add_error(mut self, e: &Mag) -> Self {
        self.rad = self.rad.add(e);
        self
    }

    pub fn add_error_mut(&mut self, e: &Mag) {
        self.rad = self.rad.add(e);
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn rad(&self) -> Mag {
        self.rad
    }

    pub fn mid(&self) -> Ball {
        Ball {
            mid: self.mid.clone(),
            exp: self.exp,
            rad: Mag::zero(),
            prec: self.prec,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.rad.is_finite()
    }

    pub fn mid_is_zero(&self) -> bool {
        self.mid.is_zero()
    }

    /// Re-round the midpoint to `prec` bits.
    pub fn with_prec(mut self, prec: u32) -> Self {
        self.prec = prec;
        self.round();
        self
    }

    /// Bits in the midpoint mantissa.
    fn bits(&self) -> u64 {
        self.mid.bits()
    }

    fn round(&mut self) {
        if self.mid.is_zero() {
            self.exp = 0;
            return;
        }
        // strip trailing zeros so that exact integers stay compact
        let tz = self.mid.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mid >>= tz;
            self.exp += tz as i64;
        }
        let bl = self.bits();
        if bl <= self.prec as u64 {
            return;
        }
        let s = bl - self.prec as u64;
        let (sign, mag) = (self.mid.sign(), self.mid.magnitude());
        let half = BigUint::one() << (s - 1);
        let q: BigUint = (mag + &half) >> s;
        self.mid = BigInt::from_biguint(sign, q);
        self.rad = self.rad.add(&Mag::pow2(self.exp + s as i64 - 1));
        self.exp += s as i64;
        if !self.mid.is_zero() {
            let tz = self.mid.trailing_zeros().unwrap_or(0);
            if tz > 0 {
                self.mid >>= tz;
                self.exp += tz as i64;
            }
        }
    }

    /// Upper bound of `|mid|`.
    pub fn mid_abs_upper(&self) -> Mag {
        Mag::from_biguint(self.mid.magnitude(), self.exp)
    }

    /// Upper bound of `|x|` over the ball.
    pub fn abs_upper(&self) -> Mag {
        self.mid_abs_upper().add(&self.rad)
    }

    /// Lower bound of `|x|` over the ball (zero if the ball contains zero).
    pub fn abs_lower(&self) -> Mag {
        Mag::from_biguint_lower(self.mid.magnitude(), self.exp).sub_lower(&self.rad)
    }

    pub fn contains_zero(&self) -> bool {
        self.abs_lower().is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.mid.is_positive() && !self.abs_lower().is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mid.is_negative() && !self.abs_lower().is_zero()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.mid.is_positive() || self.mid.is_zero() && self.rad.is_zero() || self.is_positive()
    }

    /// Whether the ball contains `x` (treated as exact).
    pub fn contains(&self, x: &Ball) -> bool {
        let d = self.mid().sub(&x.mid());
        d.abs_upper().add(&x.rad).le(&self.rad)
    }

    /// Whether two balls intersect.
    pub fn overlaps(&self, o: &Ball) -> bool {
        let d = self.mid().sub(&o.mid());
        d.abs_lower().le(&self.rad.add(&o.rad))
    }

    pub fn to_f64(&self) -> f64 {
        if self.mid.is_zero() {
            return 0.0;
        }
        let bl = self.bits() as i64;
        let s = (bl - 60).max(0);
        let top: BigInt = &self.mid >> s;
        let f = top.to_f64().unwrap_or(0.0);
        let e = self.exp + s;
        if e > 2000 {
            return f64::INFINITY.copysign(f);
        }
        if e < -2200 {
            return 0.0;
        }
        let half = e / 2;
        f * 2f64.powi(half as i32) * 2f64.powi((e - half) as i32)
    }

    /// Approximate `log2 |mid|`.
    pub fn log2_abs(&self) -> f64 {
        if self.mid.is_zero() {
            return f64::NEG_INFINITY;
        }
        let bl = self.bits() as i64;
        let s = (bl - 60).max(0);
        let top: BigInt = &self.mid >> s;
        top.to_f64().unwrap_or(1.0).abs().log2() + (self.exp + s) as f64
    }

    /// Relative accuracy in bits, `-log2(rad/|mid|)`.
    pub fn rel_accuracy_bits(&self) -> f64 {
        if self.rad.is_zero() {
            return f64::INFINITY;
        }
        self.log2_abs() - self.rad.log2()
    }

    pub fn neg(&self) -> Ball {
        Ball {
            mid: -self.mid.clone(),
            exp: self.exp,
            rad: self.rad,
            prec: self.prec,
        }
    }

    pub fn abs(&self) -> Ball {
        Ball {
            mid: self.mid.abs(),
            exp: self.exp,
            rad: self.rad,
            prec: self.prec,
        }
    }

    pub fn add(&self, o: &Ball) -> Ball {
        let prec = self.prec.max(o.prec);
        if o.mid.is_zero() {
            let mut r = self.clone();
            r.rad = r.rad.add(&o.rad);
            r.prec = prec;
            r.round();
            return r;
        }
        if self.mid.is_zero() {
            let mut r = o.clone();
            r.rad = r.rad.add(&self.rad);
            r.prec = prec;
            r.round();
            return r;
        }
        let top_a = self.exp + self.bits() as i64;
        let top_b = o.exp + o.bits() as i64;
        // an operand far below the precision window is folded into the radius
        if top_a - top_b > prec as i64 + 8 {
            let mut r = self.clone();
            r.rad = r.rad.add(&o.abs_upper());
            r.prec = prec;
            r.round();
            return r;
        }
        if top_b - top_a > prec as i64 + 8 {
            let mut r = o.clone();
            r.rad = r.rad.add(&self.abs_upper());
            r.prec = prec;
            r.round();
            return r;
        }
        let e = self.exp.min(o.exp);
        let a = &self.mid << (self.exp - e) as usize;
        let b = &o.mid << (o.exp - e) as usize;
        let mut r = Ball {
            mid: a + b,
            exp: e,
            rad: self.rad.add(&o.rad),
            prec,
        };
        r.round();
        r
    }

    pub fn sub(&self, o: &Ball) -> Ball {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Ball) -> Ball {
        let prec = self.prec.max(o.prec);
        let ma = self.mid_abs_upper();
        let mb = o.mid_abs_upper();
        let rad = ma
            .mul(&o.rad)
            .add(&mb.mul(&self.rad))
            .add(&self.rad.mul(&o.rad));
        let mut r = Ball {
            mid: &self.mid * &o.mid,
            exp: self.exp + o.exp,
            rad,
            prec,
        };
        r.round();
        r
    }

    pub fn sqr(&self) -> Ball {
        self.mul(self)
    }

    pub fn mul_i64(&self, k: i64) -> Ball {
        let mut r = Ball {
            mid: &self.mid * k,
            exp: self.exp,
            rad: self.rad.mul(&Mag::from_u64(k.unsigned_abs())),
            prec: self.prec,
        };
        r.round();
        r
    }

    pub fn div_i64(&self, k: i64) -> Ball {
        self.div(&Ball::from_i64(k, self.prec))
    }

    pub fn mul_2exp(&self, k: i64) -> Ball {
        Ball {
            mid: self.mid.clone(),
            exp: if self.mid.is_zero() { 0 } else { self.exp + k },
            rad: self.rad.mul_2exp(k),
            prec: self.prec,
        }
    }

    pub fn add_i64(&self, k: i64) -> Ball {
        self.add(&Ball::from_i64(k, self.prec))
    }

    pub fn div(&self, o: &Ball) -> Ball {
        let prec = self.prec.max(o.prec);
        let den_lower = o.abs_lower();
        if den_lower.is_zero() {
            return Ball {
                mid: BigInt::zero(),
                exp: 0,
                rad: Mag::inf(),
                prec,
            };
        }
        if self.mid.is_zero() {
            let rad = self.rad.div(&den_lower);
            return Ball {
                mid: BigInt::zero(),
                exp: 0,
                rad,
                prec,
            };
        }
        // quotient with prec + 4 significant bits, truncated
        let shift = prec as i64 + 4 + o.bits() as i64 - self.bits() as i64;
        let shift = shift.max(0);
        let num = &self.mid << shift as usize;
        let (q, rem) = num.div_rem(&o.mid);
        let qexp = self.exp - o.exp - shift;
        let mut trunc = Mag::zero();
        if !rem.is_zero() {
            trunc = Mag::pow2(qexp);
        }
        let qabs = Mag::from_biguint(q.magnitude(), qexp).add(&trunc);
        // |a/b - m_a/m_b| <= (r_a + |m_a/m_b| r_b) / (|m_b| - r_b)
        let prop = if self.rad.is_zero() && o.rad.is_zero() {
            Mag::zero()
        } else {
            self.rad.add(&qabs.mul(&o.rad)).div(&den_lower)
        };
        let mut r = Ball {
            mid: q,
            exp: qexp,
            rad: prop.add(&trunc),
            prec,
        };
        r.round();
        r
    }

    pub fn inv(&self) -> Ball {
        Ball::one(self.prec).div(self)
    }

    /// Square root. Balls reaching below zero are clipped at zero.
    pub fn sqrt(&self) -> Ball {
        let prec = self.prec;
        if self.mid.is_negative() && !self.contains_zero() {
            return Ball {
                mid: BigInt::zero(),
                exp: 0,
                rad: Mag::inf(),
                prec,
            };
        }
        let lower = if self.mid.is_negative() {
            Mag::zero()
        } else {
            self.abs_lower()
        };
        if lower.is_zero() {
            // [0, u] -> [0, sqrt(u)]
            let u = self.abs_upper().sqrt();
            let half = u.mul_2exp(-1);
            return Ball::from_mag_mid(&half, prec).add_error(&half);
        }
        // isqrt of mid scaled to 2·prec + 8 bits with even exponent
        let want = 2 * prec as i64 + 8;
        let mut shift = (want - self.bits() as i64).max(0);
        if (self.exp - shift) % 2 != 0 {
            shift += 1;
        }
        let m: BigUint = self.mid.magnitude() << shift as usize;
        let s = m.sqrt();
        let sexp = (self.exp - shift) / 2;
        let exact = &s * &s == m;
        let mut trunc = if exact { Mag::zero() } else { Mag::pow2(sexp) };
        // radius: |sqrt(x) - sqrt(m)| <= r / (sqrt(lower) + sqrt(m)) <= r / sqrt(lower)
        if !self.rad.is_zero() {
            let sl = Mag::from_f64_lower(lower.to_f64().sqrt() * (1.0 - 1e-12));
            let sl = if sl.is_zero() {
                lower.sqrt().mul_2exp(-1)
            } else {
                sl
            };
            trunc = trunc.add(&self.rad.div(&sl));
        }
        let mut r = Ball {
            mid: BigInt::from_biguint(Sign::Plus, s),
            exp: sexp,
            rad: trunc,
            prec,
        };
        r.round();
        r
    }

    fn from_mag_mid(m: &Mag, prec: u32) -> Ball {
        let f = m.to_f64();
        if f.is_finite() && f > 0.0 {
            Ball::from_f64(f, prec).add_error(&Mag::from_f64(f * 1e-15))
        } else {
            Ball {
                mid: BigInt::zero(),
                exp: 0,
                rad: *m,
                prec,
            }
        }
    }

    /// A ball `[0 ± m]`.
    pub fn from_error(m: &Mag, prec: u32) -> Ball {
        Ball {
            mid: BigInt::zero(),
            exp: 0,
            rad: *m,
            prec,
        }
    }

    pub fn pow_u(&self, n: u64) -> Ball {
        let mut r = Ball::one(self.prec);
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

    pub fn pow_i(&self, n: i64) -> Ball {
        if n >= 0 {
            self.pow_u(n as u64)
        } else {
            self.pow_u(n.unsigned_abs()).inv()
        }
    }

    /// Nearest integer to the midpoint.
    pub fn round_mid_to_bigint(&self) -> BigInt {
        if self.exp >= 0 {
            return &self.mid << self.exp as usize;
        }
        let s = (-self.exp) as u64;
        let (sign, mag) = (self.mid.sign(), self.mid.magnitude());
        let half = BigUint::one() << (s - 1);
        BigInt::from_biguint(sign, (mag + half) >> s)
    }

    /// The integer value if the ball is an exact integer.
    pub fn exact_integer(&self) -> Option<BigInt> {
        if !self.rad.is_zero() {
            return None;
        }
        if self.mid.is_zero() {
            return Some(BigInt::zero());
        }
        if self.exp >= 0 {
            Some(&self.mid << self.exp as usize)
        } else {
            None
        }
    }

    /// The rational value of the midpoint.
    pub fn mid_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mid << self.exp as usize)
        } else {
            BigRational::new(self.mid.clone(), BigInt::one() << (-self.exp) as usize)
        }
    }

    /// Three-way comparison when the balls are disjoint.
    pub fn cmp_certain(&self, o: &Ball) -> Option<Ordering> {
        let d = self.sub(o);
        if d.is_positive() {
            Some(Ordering::Greater)
        } else if d.is_negative() {
            Some(Ordering::Less)
        } else {
            None
        }
    }

    /// Union hull of two balls.
    /// Whether the radius is below `2^-bits` relative to the magnitude.
    pub fn rel_ok(&self, bits: u32) -> bool {
        let m = self.abs_upper();
        if m.is_zero() {
            return self.rad.is_zero();
        }
        self.rad.le(&m.mul_2exp(-(bits as i64)))
    }

    pub fn union(&self, o: &Ball) -> Ball {
        let prec = self.prec.max(o.prec);
        let m = self.mid().add(&o.mid()).mul_2exp(-1).mid().with_prec(prec + 4);
        let da = (&m - &self.mid()).abs_upper().add(&self.rad);
        let db = (&m - &o.mid()).abs_upper().add(&o.rad);
        let mut m = m.mid();
        m.rad = da.max(&db);
        m.with_prec(prec)
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident, $m:ident) => {
        impl $tr<&Ball> for &Ball {
            type Output = Ball;
            fn $f(self, o: &Ball) -> Ball {
                Ball::$m(self, o)
            }
        }
    };
}

binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);
binop!(Div, div, div);

impl Neg for &Ball {
    type Output = Ball;
    fn neg(self) -> Ball {
        Ball::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_integers_stay_exact() {
        let a = Ball::from_i64(12345, 64);
        let b = Ball::from_i64(-678, 64);
        let c = &(&a * &b) + &a;
        assert!(c.is_exact());
        assert_eq!(c.exact_integer().unwrap(), BigInt::from(12345 * -678 + 12345));
    }

    #[test]
    fn third_times_three_contains_one() {
        let t = Ball::frac(1, 3, 128);
        let one = t.mul_i64(3);
        assert!(one.contains(&Ball::one(128)));
        assert!(one.rad().log2() < -120.0);
    }

    #[test]
    fn sqrt_two_squared() {
        let s = Ball::from_i64(2, 200).sqrt();
        assert!(s.sqr().contains(&Ball::from_i64(2, 200)));
        assert!((s.to_f64() - std::f64::consts::SQRT_2).abs() < 1e-15);
        assert!(s.rad().log2() < -190.0);
    }

    #[test]
    fn division_by_ball_with_zero_is_unbounded() {
        let z = Ball::zero(64).add_error(&Mag::pow2(-10));
        assert!(!Ball::one(64).div(&z).is_finite());
    }

    #[test]
    fn far_apart_addition_folds_into_radius() {
        let big = Ball::from_i64(1, 64).mul_2exp(1000);
        let tiny = Ball::from_i64(1, 64).mul_2exp(-1000);
        let s = &big + &tiny;
        assert!(s.contains(&big));
        assert!(!s.is_exact());
    }

    proptest! {
        #[test]
        fn field_ops_enclose_rationals(a in -1_000_000i64..1_000_000, b in 1i64..1_000_000, c in -1000i64..1000, d in 1i64..1000) {
            let prec = 96;
            let x = Ball::frac(a, b, prec);
            let y = Ball::frac(c, d, prec);
            let qx = BigRational::new(a.into(), b.into());
            let qy = BigRational::new(c.into(), d.into());
            let check = |ball: &Ball, q: &BigRational| {
                let e = Ball::from_rational(q, 400);
                prop_assert!(ball.overlaps(&e));
                Ok(())
            };
            check(&(&x + &y), &(&qx + &qy))?;
            check(&(&x - &y), &(&qx - &qy))?;
            check(&(&x * &y), &(&qx * &qy))?;
            if c != 0 {
                check(&(&x / &y), &(&qx / &qy))?;
            }
        }

        #[test]
        fn sqrt_squares_back(a in 1u64..u64::MAX) {
            let x = Ball::from_bigint(BigInt::from(a), 128);
            let s = x.sqrt();
            prop_assert!(s.sqr().overlaps(&x));
        }
    }
}
