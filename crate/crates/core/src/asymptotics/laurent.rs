//! Laurent polynomials with exact rational coefficients.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// `Σ c_j t^(low + j)`; kept trimmed so the zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Laurent {
    low: i32,
    c: Vec<Q>,
}

impl Laurent {
    pub fn zero() -> Self {
        Laurent::default()
    }

    pub fn constant(v: Q) -> Self {
        Laurent::monomial(v, 0)
    }

    pub fn monomial(v: Q, power: i32) -> Self {
        Laurent { low: power, c: vec![v] }.trimmed()
    }

    /// Polynomial from ascending coefficients.
    pub fn from_coeffs(c: Vec<Q>) -> Self {
        Laurent { low: 0, c }.trimmed()
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Laurent::from_coeffs(c.iter().map(|&v| qi(v)).collect())
    }

    fn trimmed(mut self) -> Self {
        while self.c.last().is_some_and(|v| v.is_zero()) {
            self.c.pop();
        }
        let lead = self.c.iter().take_while(|v| v.is_zero()).count();
        if lead == self.c.len() {
            return Laurent::zero();
        }
        self.c.drain(..lead);
        self.low += lead as i32;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Lowest power with a nonzero coefficient.
    pub fn low(&self) -> Option<i32> {
        (!self.is_zero()).then_some(self.low)
    }

    /// Highest power with a nonzero coefficient.
    pub fn high(&self) -> Option<i32> {
        (!self.is_zero()).then(|| self.low + self.c.len() as i32 - 1)
    }

    pub fn is_polynomial(&self) -> bool {
        self.is_zero() || self.low >= 0
    }

    pub fn coeff(&self, power: i32) -> Q {
        let i = power - self.low;
        if i < 0 || i as usize >= self.c.len() {
            Q::zero()
        } else {
            self.c[i as usize].clone()
        }
    }

    /// `(power, coefficient)` pairs with nonzero coefficient, ascending.
    pub fn terms(&self) -> impl Iterator<Item = (i32, &Q)> {
        self.c
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(move |(i, v)| (self.low + i as i32, v))
    }

    /// Ascending coefficients of powers `0..=high`; panics on negative powers.
    pub fn poly_coeffs(&self) -> Vec<Q> {
        assert!(self.is_polynomial());
        match self.high() {
            None => vec![],
            Some(h) => (0..=h).map(|k| self.coeff(k)).collect(),
        }
    }

    pub fn add(&self, o: &Laurent) -> Laurent {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let lo = self.low.min(o.low);
        let hi = self.high().unwrap().max(o.high().unwrap());
        let c = (lo..=hi).map(|k| self.coeff(k) + o.coeff(k)).collect();
        Laurent { low: lo, c }.trimmed()
    }

    pub fn neg(&self) -> Laurent {
        Laurent {
            low: self.low,
            c: self.c.iter().map(|v| -v).collect(),
        }
    }

    pub fn sub(&self, o: &Laurent) -> Laurent {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: &Q) -> Laurent {
        Laurent {
            low: self.low,
            c: self.c.iter().map(|v| v * s).collect(),
        }
        .trimmed()
    }

    /// Multiply by `t^k`.
    pub fn shift(&self, k: i32) -> Laurent {
        if self.is_zero() {
            return Laurent::zero();
        }
        Laurent {
            low: self.low + k,
            c: self.c.clone(),
        }
    }

    pub fn mul(&self, o: &Laurent) -> Laurent {
        if self.is_zero() || o.is_zero() {
            return Laurent::zero();
        }
        let mut c = vec![Q::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Laurent {
            low: self.low + o.low,
            c,
        }
        .trimmed()
    }

    pub fn pow(&self, n: u32) -> Laurent {
        let mut r = Laurent::constant(Q::one());
        for _ in 0..n {
            r = r.mul(self);
        }
        r
    }

    pub fn derivative(&self) -> Laurent {
        let c = self
            .c
            .iter()
            .enumerate()
            .map(|(i, v)| v * qi((self.low + i as i32) as i64))
            .collect();
        Laurent {
            low: self.low - 1,
            c,
        }
        .trimmed()
    }

    /// Evaluate at a rational point (nonzero if there are negative powers).
    pub fn eval(&self, t: &Q) -> Q {
        self.terms().fold(Q::zero(), |acc, (k, v)| {
            let p = if k >= 0 {
                num_traits::pow(t.clone(), k as usize)
            } else {
                num_traits::pow(t.recip(), (-k) as usize)
            };
            acc + v * p
        })
    }

    /// Polynomial long division by a monic-free divisor, returning (quotient, remainder).
    pub fn divrem(&self, d: &Laurent) -> (Laurent, Laurent) {
        assert!(self.is_polynomial() && d.is_polynomial() && !d.is_zero());
        let dh = d.high().unwrap();
        let lead = d.coeff(dh);
        let mut r = self.clone();
        let mut quo = Laurent::zero();
        while let Some(rh) = r.high() {
            if rh < dh {
                break;
            }
            let f = r.coeff(rh) / &lead;
            let m = Laurent::monomial(f, rh - dh);
            r = r.sub(&m.mul(d));
            quo = quo.add(&m);
        }
        (quo, r)
    }

    pub fn is_even(&self) -> bool {
        self.terms().all(|(k, _)| k % 2 == 0)
    }

    pub fn is_odd(&self) -> bool {
        self.terms().all(|(k, _)| k % 2 != 0)
    }
}

fn fmt_q(v: &Q) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

impl fmt::Debug for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, v) in self.terms().collect::<Vec<_>>().into_iter().rev() {
            let neg = v.is_negative();
            let a = v.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let coef = fmt_q(&a);
            match k {
                0 => write!(f, "{coef}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{coef}*")?;
                    }
                    if k == 1 {
                        write!(f, "t")?;
                    } else {
                        write!(f, "t^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Exact Gaussian elimination for `A x = b`. Fails if the system is
/// inconsistent or leaves a free variable.
pub fn solve_exact(mut a: Vec<Vec<Q>>, mut b: Vec<Q>) -> Result<Vec<Q>, String> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            return Err(format!("unknown {c} is not determined"));
        };
        a.swap(r, p);
        b.swap(r, p);
        let inv = a[r][c].recip();
        for j in c..cols {
            a[r][j] = &a[r][j] * &inv;
        }
        b[r] = &b[r] * &inv;
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..cols {
                    let d = &f * &a[r][j];
                    a[i][j] -= d;
                }
                let d = &f * &b[r];
                b[i] -= d;
            }
        }
        pivots.push(c);
        r += 1;
    }
    if b[r..].iter().any(|v| !v.is_zero()) {
        return Err("inconsistent linear system".into());
    }
    Ok(b[..cols].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_display() {
        let p = Laurent::from_ints(&[1, 0, 3]);
        let r = Laurent::monomial(qi(2), -1);
        assert_eq!(p.mul(&r), Laurent::from_ints(&[0, 6]).add(&Laurent::monomial(qi(2), -1)));
        assert_eq!(p.derivative(), Laurent::from_ints(&[0, 6]));
        assert_eq!(r.derivative(), Laurent::monomial(qi(-2), -2));
        assert_eq!(format!("{}", Laurent::from_coeffs(vec![q(-1, 2), qi(0), qi(3)])), "3*t^2 - 1/2");
        assert_eq!(p.eval(&qi(2)), qi(13));
        let (quo, rem) = Laurent::from_ints(&[-1, 0, 1]).divrem(&Laurent::from_ints(&[-1, 1]));
        assert_eq!(quo, Laurent::from_ints(&[1, 1]));
        assert!(rem.is_zero());
    }

    #[test]
    fn linear_solve() {
        let a = vec![vec![qi(2), qi(1)], vec![qi(1), qi(-1)], vec![qi(3), qi(0)]];
        let x = solve_exact(a.clone(), vec![qi(5), qi(1), qi(6)]).unwrap();
        assert_eq!(x, vec![qi(2), qi(1)]);
        assert!(solve_exact(a, vec![qi(5), qi(1), qi(7)]).is_err());
        assert!(solve_exact(vec![vec![qi(1), qi(1)]], vec![qi(1)]).is_err());
    }
}
