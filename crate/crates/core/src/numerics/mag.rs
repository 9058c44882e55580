//! Nonnegative magnitudes used as error radii.
//!
//! A [`Mag`] is `man · 2^exp` with a 30-bit mantissa. Every operation rounds
//! its result away from zero, so a `Mag` computed from upper bounds is itself
//! an upper bound. The `*_lower` helpers round toward zero instead and are
//! used where a lower bound is needed (divisors, positivity checks).

use num_bigint::BigUint;
use std::cmp::Ordering;
use std::fmt;

const MAG_BITS: u32 = 30;
const INF_EXP: i64 = i64::MAX;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mag {
    man: u64,
    exp: i64,
}

impl fmt::Debug for Mag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_inf() {
            write!(f, "Mag(inf)")
        } else {
            write!(f, "Mag({:e})", self.to_f64())
        }
    }
}

impl fmt::Display for Mag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_inf() {
            return write!(f, "inf");
        }
        if self.is_zero() {
            return write!(f, "0");
        }
        let l10 = self.log2() * std::f64::consts::LOG10_2;
        let e = l10.floor();
        let m = 10f64.powf(l10 - e);
        write!(f, "{:.3}e{}", m, e as i64)
    }
}

fn bitlen(x: u128) -> u32 {
    128 - x.leading_zeros()
}

impl Mag {
    pub const fn zero() -> Self {
        Mag { man: 0, exp: 0 }
    }

    pub const fn inf() -> Self {
        Mag { man: 1, exp: INF_EXP }
    }

    pub fn is_zero(&self) -> bool {
        self.man == 0
    }

    pub fn is_inf(&self) -> bool {
        self.exp == INF_EXP
    }

    pub fn is_finite(&self) -> bool {
        !self.is_inf()
    }

    /// `2^e`.
    pub fn pow2(e: i64) -> Self {
        Mag { man: 1, exp: e }
    }

    fn norm_up(man: u128, exp: i64) -> Self {
        if man == 0 {
            return Mag::zero();
        }
        let bl = bitlen(man);
        if bl <= MAG_BITS {
            return Mag {
                man: man as u64,
                exp,
            };
        }
        let s = bl - MAG_BITS;
        let mut m = man >> s;
        if m << s != man {
            m += 1;
        }
        let mut e = exp.saturating_add(s as i64);
        if bitlen(m) > MAG_BITS {
            m = (m + 1) >> 1;
            e = e.saturating_add(1);
        }
        Mag { man: m as u64, exp: e }
    }

    fn norm_down(man: u128, exp: i64) -> Self {
        if man == 0 {
            return Mag::zero();
        }
        let bl = bitlen(man);
        if bl <= MAG_BITS {
            return Mag {
                man: man as u64,
                exp,
            };
        }
        let s = bl - MAG_BITS;
        Mag {
            man: (man >> s) as u64,
            exp: exp + s as i64,
        }
    }

    pub fn from_u64(v: u64) -> Self {
        Self::norm_up(v as u128, 0)
    }

    /// Upper bound for a nonnegative finite `f64` (negative input is treated as its absolute value).
    pub fn from_f64(v: f64) -> Self {
        let v = v.abs();
        if v == 0.0 {
            return Mag::zero();
        }
        if !v.is_finite() {
            return Mag::inf();
        }
        let bits = v.to_bits();
        let e = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, ex) = if e == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), e - 1075)
        };
        Self::norm_up(m as u128, ex)
    }

    /// Lower bound for a nonnegative `f64`.
    pub fn from_f64_lower(v: f64) -> Self {
        let v = v.abs();
        if v == 0.0 || !v.is_finite() {
            return Mag::zero();
        }
        let bits = v.to_bits();
        let e = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, ex) = if e == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), e - 1075)
        };
        Self::norm_down(m as u128, ex)
    }

    /// Upper bound for `v · 2^exp`.
    pub fn from_biguint(v: &BigUint, exp: i64) -> Self {
        let bl = v.bits();
        if bl == 0 {
            return Mag::zero();
        }
        if bl <= 64 {
            let x = v.iter_u64_digits().next().unwrap_or(0);
            return Self::norm_up(x as u128, exp);
        }
        let s = bl - 64;
        let top: BigUint = v >> s;
        let x = top.iter_u64_digits().next().unwrap_or(0) as u128;
        // anything shifted out rounds up
        Self::norm_up(x + 1, exp + s as i64)
    }

    /// Lower bound for `v · 2^exp`.
    pub fn from_biguint_lower(v: &BigUint, exp: i64) -> Self {
        let bl = v.bits();
        if bl == 0 {
            return Mag::zero();
        }
        if bl <= 64 {
            let x = v.iter_u64_digits().next().unwrap_or(0);
            return Self::norm_down(x as u128, exp);
        }
        let s = bl - 64;
        let top: BigUint = v >> s;
        let x = top.iter_u64_digits().next().unwrap_or(0) as u128;
        Self::norm_down(x, exp + s as i64)
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_inf() {
            return f64::INFINITY;
        }
        if self.man == 0 {
            return 0.0;
        }
        let e = self.exp.clamp(-2000, 2000) as i32;
        (self.man as f64) * 2f64.powi(e)
    }

    /// Approximate base-2 logarithm (`-inf` for zero).
    pub fn log2(&self) -> f64 {
        if self.is_inf() {
            return f64::INFINITY;
        }
        if self.man == 0 {
            return f64::NEG_INFINITY;
        }
        (self.man as f64).log2() + self.exp as f64
    }

    /// Exponent `e` such that `self < 2^e`.
    pub fn exp_bound(&self) -> i64 {
        if self.is_inf() {
            return INF_EXP;
        }
        if self.man == 0 {
            return i64::MIN / 2;
        }
        self.exp + bitlen(self.man as u128) as i64
    }

    pub fn add(&self, o: &Mag) -> Mag {
        if self.is_inf() || o.is_inf() {
            return Mag::inf();
        }
        if self.man == 0 {
            return *o;
        }
        if o.man == 0 {
            return *self;
        }
        let (hi, lo) = if self.exp >= o.exp { (self, o) } else { (o, self) };
        let d = hi.exp - lo.exp;
        if d > 90 {
            // lo < 2^(lo.exp+30) <= 2^(hi.exp - 60): one unit of hi absorbs it
            return Self::norm_up(hi.man as u128 + 1, hi.exp);
        }
        let m = ((hi.man as u128) << d) + lo.man as u128;
        Self::norm_up(m, lo.exp)
    }

    /// `max(self - o, 0)` rounded toward zero.
    pub fn sub_lower(&self, o: &Mag) -> Mag {
        if o.is_inf() {
            return Mag::zero();
        }
        if self.is_inf() {
            return Mag::inf();
        }
        if o.man == 0 {
            return *self;
        }
        if self.cmp_mag(o) != Ordering::Greater {
            return Mag::zero();
        }
        let d = self.exp - o.exp;
        if d > 90 {
            return Self::norm_down(((self.man as u128) << 2) - 1, self.exp - 2);
        }
        if d >= 0 {
            let m = ((self.man as u128) << d) - o.man as u128;
            Self::norm_down(m, o.exp)
        } else {
            let m = (self.man as u128) - ((o.man as u128) << (-d));
            Self::norm_down(m, self.exp)
        }
    }

    pub fn mul(&self, o: &Mag) -> Mag {
        if self.man == 0 || o.man == 0 {
            if self.is_inf() || o.is_inf() {
                return Mag::inf();
            }
            return Mag::zero();
        }
        if self.is_inf() || o.is_inf() {
            return Mag::inf();
        }
        Self::norm_up(self.man as u128 * o.man as u128, self.exp + o.exp)
    }

    pub fn mul_lower(&self, o: &Mag) -> Mag {
        if self.man == 0 || o.man == 0 {
            return Mag::zero();
        }
        if self.is_inf() || o.is_inf() {
            return Mag::inf();
        }
        Self::norm_down(self.man as u128 * o.man as u128, self.exp + o.exp)
    }

    /// Upper bound of `self / o` (`o` must be a lower bound of the divisor).
    pub fn div(&self, o: &Mag) -> Mag {
        if self.man == 0 {
            return Mag::zero();
        }
        if o.man == 0 || self.is_inf() {
            return Mag::inf();
        }
        if o.is_inf() {
            return Mag::zero();
        }
        let num = (self.man as u128) << 64;
        let q = num / o.man as u128;
        let q = if q * (o.man as u128) != num { q + 1 } else { q };
        Self::norm_up(q, self.exp - o.exp - 64)
    }

    /// Lower bound of `self / o` (`o` must be an upper bound of the divisor).
    pub fn div_lower(&self, o: &Mag) -> Mag {
        if self.man == 0 || o.is_inf() {
            return Mag::zero();
        }
        if o.man == 0 || self.is_inf() {
            return Mag::inf();
        }
        let num = (self.man as u128) << 64;
        Self::norm_down(num / o.man as u128, self.exp - o.exp - 64)
    }

    pub fn mul_2exp(&self, k: i64) -> Mag {
        if self.man == 0 || self.is_inf() {
            return *self;
        }
        Mag {
            man: self.man,
            exp: self.exp + k,
        }
    }

    pub fn mul_u64(&self, k: u64) -> Mag {
        self.mul(&Mag::from_u64(k))
    }

    pub fn pow(&self, n: u32) -> Mag {
        let mut r = Mag::from_u64(1);
        let mut b = *self;
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                r = r.mul(&b);
            }
            b = b.mul(&b);
            n >>= 1;
        }
        r
    }

    pub fn cmp_mag(&self, o: &Mag) -> Ordering {
        match (self.is_inf(), o.is_inf()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Greater,
            (false, true) => return Ordering::Less,
            _ => {}
        }
        match (self.man == 0, o.man == 0) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        let ea = self.exp_bound();
        let eb = o.exp_bound();
        if ea != eb {
            return ea.cmp(&eb);
        }
        // same magnitude window: align mantissas
        let d = self.exp - o.exp;
        if d >= 0 {
            ((self.man as u128) << d).cmp(&(o.man as u128))
        } else {
            (self.man as u128).cmp(&((o.man as u128) << (-d)))
        }
    }

    pub fn max(&self, o: &Mag) -> Mag {
        if self.cmp_mag(o) == Ordering::Less {
            *o
        } else {
            *self
        }
    }

    pub fn min(&self, o: &Mag) -> Mag {
        if self.cmp_mag(o) == Ordering::Greater {
            *o
        } else {
            *self
        }
    }

    pub fn le(&self, o: &Mag) -> bool {
        self.cmp_mag(o) != Ordering::Greater
    }

    pub fn lt(&self, o: &Mag) -> bool {
        self.cmp_mag(o) == Ordering::Less
    }

    /// Upper bound of `sqrt(self)`.
    pub fn sqrt(&self) -> Mag {
        if self.man == 0 || self.is_inf() {
            return *self;
        }
        let (m, e) = if self.exp % 2 != 0 {
            ((self.man as u128) << 61, self.exp - 61)
        } else {
            ((self.man as u128) << 60, self.exp - 60)
        };
        let mut r = (m as f64).sqrt() as u128;
        while r * r > m {
            r -= 1;
        }
        while (r + 1) * (r + 1) <= m {
            r += 1;
        }
        if r * r != m {
            r += 1;
        }
        Self::norm_up(r, e / 2)
    }

    /// Upper bound of `e^self` for a modest argument.
    pub fn exp_up(&self) -> Mag {
        if self.is_inf() {
            return Mag::inf();
        }
        let x = self.to_f64();
        if x < 1e-10 {
            // e^x <= 1 + 2x for tiny x
            return Mag::from_u64(1).add(&self.mul_u64(2));
        }
        let l2 = x * std::f64::consts::LOG2_E;
        if l2 > 1e15 {
            return Mag::inf();
        }
        let ip = l2.floor();
        let frac = 2f64.powf(l2 - ip) * (1.0 + 1e-12);
        Mag::from_f64(frac).mul_2exp(ip as i64).mul(&Mag::from_f64(1.0 + 1e-9))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_and_mul_round_up() {
        let a = Mag::from_f64(1.0 / 3.0);
        let b = Mag::from_f64(2.0 / 3.0);
        assert!(a.add(&b).to_f64() >= 1.0);
        let c = a.mul(&Mag::from_u64(3));
        assert!(c.to_f64() >= 1.0);
        assert!(c.to_f64() < 1.0 + 1e-8);
    }

    #[test]
    fn ordering_and_sub() {
        let a = Mag::from_u64(10);
        let b = Mag::from_u64(3);
        assert!(b.lt(&a));
        assert_eq!(a.sub_lower(&b).to_f64(), 7.0);
        assert!(b.sub_lower(&a).is_zero());
        assert!(Mag::pow2(-2000).lt(&Mag::pow2(-1999)));
    }

    #[test]
    fn division_bounds_bracket() {
        let a = Mag::from_u64(1);
        let b = Mag::from_u64(3);
        assert!(a.div(&b).to_f64() >= 1.0 / 3.0);
        assert!(a.div_lower(&b).to_f64() <= 1.0 / 3.0);
    }

    #[test]
    fn sqrt_is_upper() {
        let s = Mag::from_u64(2).sqrt().to_f64();
        assert!(s >= std::f64::consts::SQRT_2 && s < 1.41422);
        let s = Mag::pow2(-101).sqrt().to_f64();
        assert!(s >= 2f64.powf(-50.5));
    }

    #[test]
    fn big_uint_bounds() {
        let v = BigUint::from(3u32).pow(100);
        let up = Mag::from_biguint(&v, 0).log2();
        let lo = Mag::from_biguint_lower(&v, 0).log2();
        let exact = 100.0 * 3f64.log2();
        assert!(up >= exact - 1e-9 && lo <= exact + 1e-9);
    }
}
