//! Exact values in ℚ(√2) and integer-relation recognition.

use crate::error::{Error, Result};
use crate::numerics::{elementary as el, gamma::double_factorial, Ball};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational as Q;
use num_traits::{One, Zero};
use std::fmt;

/// `a + b·√2` with rational `a`, `b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Sqrt2Rational {
    pub a: Q,
    pub b: Q,
}

impl Sqrt2Rational {
    pub fn new(a: Q, b: Q) -> Self {
        Sqrt2Rational { a, b }
    }

    pub fn rational(a: Q) -> Self {
        Sqrt2Rational { a, b: Q::zero() }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn add(&self, o: &Self) -> Self {
        Sqrt2Rational::new(&self.a + &o.a, &self.b + &o.b)
    }

    pub fn sub(&self, o: &Self) -> Self {
        Sqrt2Rational::new(&self.a - &o.a, &self.b - &o.b)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let two = Q::from_integer(2.into());
        Sqrt2Rational::new(&self.a * &o.a + two * &self.b * &o.b, &self.a * &o.b + &self.b * &o.a)
    }

    pub fn scale(&self, c: &Q) -> Self {
        Sqrt2Rational::new(&self.a * c, &self.b * c)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Enclosure with radius below `2^-prec` relative.
    pub fn to_ball(&self, prec: u32) -> Ball {
        let wp = prec + 16;
        let v = &Ball::from_rational(&self.a, wp) + &(&Ball::from_rational(&self.b, wp) * &el::sqrt2(wp));
        v.with_prec(prec)
    }
}

impl fmt::Display for Sqrt2Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = |v: &Q| {
            if v.denom().is_one() {
                v.numer().to_string()
            } else {
                format!("{}/{}", v.numer(), v.denom())
            }
        };
        match (self.a.is_zero(), self.b.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", q(&self.a)),
            (true, false) => write!(f, "({})*sqrt(2)", q(&self.b)),
            (false, false) => write!(f, "{} + ({})*sqrt(2)", q(&self.a), q(&self.b)),
        }
    }
}

/// `E Tr G^(2p) = N (N+2) ⋯ (N+2p-2)`.
pub fn trace_moment(n: u32, p: u32) -> Result<BigUint> {
    if p < 1 {
        return Err(Error::Domain("trace moment needs p >= 1".into()));
    }
    Ok((0..p).map(|k| BigUint::from(n + 2 * k)).product())
}

/// Expected number of real eigenvalues as an element of ℚ(√2).
pub fn m0_exact(n: u32) -> Result<Sqrt2Rational> {
    if n < 1 {
        return Err(Error::Domain("N must be at least 1".into()));
    }
    let ratio = |num: i64, den: i64| -> Result<Q> { Ok(double_factorial(num)? / double_factorial(den)?) };
    let n = n as i64;
    if n % 2 == 1 {
        let mut b = Q::zero();
        for k in 1..=(n - 1) / 2 {
            b += ratio(4 * k - 3, 4 * k - 2)?;
        }
        Ok(Sqrt2Rational::new(Q::one(), b))
    } else {
        let mut b = Q::zero();
        for k in 0..n / 2 {
            b += ratio(4 * k - 1, 4 * k)?;
        }
        Ok(Sqrt2Rational::new(Q::zero(), b))
    }
}

/// Lenstra–Lenstra–Lovász reduction (δ = 3/4) of integer row vectors.
pub fn lll_reduce(mut b: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let n = b.len();
    let dot = |x: &[Q], y: &[Q]| x.iter().zip(y).map(|(u, v)| u * v).sum::<Q>();
    let to_q = |v: &[BigInt]| v.iter().map(|x| Q::from_integer(x.clone())).collect::<Vec<_>>();
    let gram_schmidt = |b: &[Vec<BigInt>]| {
        let mut bs: Vec<Vec<Q>> = Vec::with_capacity(n);
        let mut mu = vec![vec![Q::zero(); n]; n];
        for i in 0..n {
            let mut v = to_q(&b[i]);
            for j in 0..i {
                let bj: &Vec<Q> = &bs[j];
                mu[i][j] = dot(&to_q(&b[i]), bj) / dot(bj, bj);
                for (vk, bk) in v.iter_mut().zip(bj) {
                    *vk -= &mu[i][j] * bk;
                }
            }
            bs.push(v);
        }
        (bs, mu)
    };
    let delta = Q::new(3.into(), 4.into());
    let mut k = 1;
    let mut guard = 0;
    while k < n && guard < 100_000 {
        guard += 1;
        let (_, mut mu) = gram_schmidt(&b);
        for j in (0..k).rev() {
            let r = mu[k][j].round();
            if !r.is_zero() {
                let bj = b[j].clone();
                let ri = r.to_integer();
                for (x, y) in b[k].iter_mut().zip(&bj) {
                    *x -= &ri * y;
                }
                for i in 0..j {
                    let d = &r * &mu[j][i];
                    mu[k][i] -= d;
                }
                mu[k][j] -= &r;
            }
        }
        let (bs, mu) = gram_schmidt(&b);
        let lhs = dot(&bs[k], &bs[k]);
        let rhs = (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * dot(&bs[k - 1], &bs[k - 1]);
        if lhs >= rhs {
            k += 1;
        } else {
            b.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    b
}

/// Integer relation `Σ c_i x_i ≈ 0` at precision `bits`, with `|c_i| < 2^max_bits`.
pub fn integer_relation(x: &[Ball], bits: u32, max_bits: u64) -> Option<Vec<BigInt>> {
    let n = x.len();
    let scale = bits as i64 - 16;
    let rows: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let mut r = vec![BigInt::zero(); n + 1];
            r[i] = BigInt::one();
            r[n] = x[i].mul_2exp(scale).round_mid_to_bigint();
            r
        })
        .collect();
    let reduced = lll_reduce(rows);
    reduced
        .into_iter()
        .map(|r| r[..n].to_vec())
        .filter(|c| c.iter().any(|v| !v.is_zero()) && c.iter().all(|v| v.bits() < max_bits))
        .find(|c| {
            let prec = x[0].prec();
            let s = c
                .iter()
                .zip(x)
                .fold(Ball::zero(prec), |acc, (ci, xi)| &acc + &(&Ball::from_bigint(ci.clone(), prec) * xi));
            let size = c.iter().map(|v| v.bits()).max().unwrap_or(0) as f64;
            s.abs_upper().log2() < size + 8.0 - scale as f64
        })
}

/// Recognise `v` as `a + b√2` from an enclosure at `bits` bits.
pub fn recognize_sqrt2(v: &Ball, bits: u32) -> Option<Sqrt2Rational> {
    let prec = v.prec();
    let x = [v.clone(), Ball::one(prec), el::sqrt2(prec)];
    let c = integer_relation(&x, bits, (bits / 4) as u64)?;
    if c[0].is_zero() {
        return None;
    }
    let d = Q::from_integer(-c[0].clone());
    Some(Sqrt2Rational::new(Q::from_integer(c[1].clone()) / &d, Q::from_integer(c[2].clone()) / &d))
}

/// Whether `candidate` lies in the enclosure `v` widened by `2^-bits` relative.
pub fn verify_candidate(candidate: &Sqrt2Rational, v: &Ball, bits: u32) -> bool {
    let c = candidate.to_ball(v.prec() + 32);
    let slack = v.abs_upper().mul_2exp(-(bits as i64));
    (&c - v).abs_upper().le(&v.rad().add(&slack))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    #[test]
    fn trace_moments() {
        assert_eq!(trace_moment(3, 1).unwrap(), BigUint::from(3u32));
        assert_eq!(trace_moment(4, 2).unwrap(), BigUint::from(24u32));
        assert_eq!(trace_moment(2, 3).unwrap(), BigUint::from(48u32));
        assert!(trace_moment(2, 0).is_err());
    }

    #[test]
    fn terminating_sums() {
        assert_eq!(m0_exact(1).unwrap(), Sqrt2Rational::rational(Q::one()));
        assert_eq!(m0_exact(2).unwrap(), Sqrt2Rational::new(Q::zero(), Q::one()));
        assert_eq!(m0_exact(3).unwrap(), Sqrt2Rational::new(Q::one(), q(1, 2)));
        assert_eq!(m0_exact(4).unwrap(), Sqrt2Rational::new(Q::zero(), q(11, 8)));
        for n in 1..40 {
            let m = m0_exact(n).unwrap();
            assert_eq!(m.a, if n % 2 == 1 { Q::one() } else { Q::zero() });
            assert!(!m.b.is_zero() || n == 1);
        }
    }

    #[test]
    fn field_arithmetic() {
        let x = Sqrt2Rational::new(q(1, 2), q(3, 1));
        let y = Sqrt2Rational::new(q(-2, 1), q(1, 5));
        let p = x.mul(&y);
        let (xb, yb, pb) = (x.to_ball(200), y.to_ball(200), p.to_ball(200));
        assert!((&(&xb * &yb) - &pb).abs_upper().log2() < -190.0);
        assert_eq!(x.add(&y).sub(&y), x);
        assert_eq!(x.to_string(), "1/2 + (3)*sqrt(2)");
    }

    #[test]
    fn relation_recovers_known_element() {
        let target = Sqrt2Rational::new(q(53, 16), q(-1234567, 98304));
        let v = target.to_ball(512);
        assert_eq!(recognize_sqrt2(&v, 512), Some(target.clone()));
        assert!(verify_candidate(&target, &target.to_ball(1024), 1000));
        let pi = el::pi(512);
        assert!(recognize_sqrt2(&pi, 512).is_none());
    }
}
