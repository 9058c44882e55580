//! Truncated power series.
//!
//! `PowerSeries` has exact rational coefficients and backs every expansion
//! coefficient computation. `NumSeries` runs the same algorithms over real
//! balls.

use crate::error::{Error, Result};
use crate::numerics::Ball;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt::Debug;

/// Coefficient ring for [`Series`].
pub trait Coeff: Clone + Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul_rat(&self, q: &BigRational) -> Self;
    fn from_rat_like(&self, q: &BigRational) -> Self;
    fn is_exact_zero(&self) -> bool;
    fn is_exact_one(&self) -> bool;
    fn may_be_zero(&self) -> bool;
}

impl Coeff for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
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
        -self
    }
    fn mul_rat(&self, q: &BigRational) -> Self {
        self * q
    }
    fn from_rat_like(&self, q: &BigRational) -> Self {
        q.clone()
    }
    fn is_exact_zero(&self) -> bool {
        self.is_zero()
    }
    fn is_exact_one(&self) -> bool {
        self.is_one()
    }
    fn may_be_zero(&self) -> bool {
        self.is_zero()
    }
}

impl Coeff for Ball {
    fn zero_like(&self) -> Self {
        Ball::zero(self.prec())
    }
    fn one_like(&self) -> Self {
        Ball::one(self.prec())
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
    fn mul_rat(&self, q: &BigRational) -> Self {
        self * &Ball::from_rational(q, self.prec())
    }
    fn from_rat_like(&self, q: &BigRational) -> Self {
        Ball::from_rational(q, self.prec())
    }
    fn is_exact_zero(&self) -> bool {
        self.is_exact() && self.mid_is_zero()
    }
    fn is_exact_one(&self) -> bool {
        self.is_exact() && self.add_i64(-1).mid_is_zero()
    }
    fn may_be_zero(&self) -> bool {
        self.contains_zero()
    }
}

/// Power series truncated after the coefficient of `t^order`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series<C> {
    coeffs: Vec<C>,
}

pub type PowerSeries = Series<BigRational>;
pub type NumSeries = Series<Ball>;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl<C: Coeff> Series<C> {
    /// Series from coefficients `c_0..c_M`; the order is `M`.
    pub fn new(coeffs: Vec<C>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one coefficient");
        Series { coeffs }
    }

    pub fn constant(c: C, order: usize) -> Self {
        let z = c.zero_like();
        let mut v = vec![z; order + 1];
        v[0] = c;
        Series { coeffs: v }
    }

    /// `c · t`.
    pub fn monomial(c: C, power: usize, order: usize) -> Self {
        let z = c.zero_like();
        let mut v = vec![z; order + 1];
        if power <= order {
            v[power] = c;
        }
        Series { coeffs: v }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> C {
        match self.coeffs.get(k) {
            Some(c) => c.clone(),
            None => self.coeffs[0].zero_like(),
        }
    }

    pub fn truncate(&self, order: usize) -> Self {
        let m = order.min(self.order());
        Series {
            coeffs: self.coeffs[..=m].to_vec(),
        }
    }

    fn shared(&self, o: &Self) -> usize {
        self.order().min(o.order())
    }

    pub fn add(&self, o: &Self) -> Self {
        let m = self.shared(o);
        Series {
            coeffs: (0..=m).map(|k| self.coeffs[k].add(&o.coeffs[k])).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let m = self.shared(o);
        Series {
            coeffs: (0..=m).map(|k| self.coeffs[k].sub(&o.coeffs[k])).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Series {
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        Series {
            coeffs: self.coeffs.iter().map(|x| x.mul(c)).collect(),
        }
    }

    pub fn scale_rat(&self, q: &BigRational) -> Self {
        Series {
            coeffs: self.coeffs.iter().map(|x| x.mul_rat(q)).collect(),
        }
    }

    /// `f(c·t)`.
    pub fn scale_arg(&self, c: &C) -> Self {
        let mut p = c.one_like();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for x in &self.coeffs {
            out.push(x.mul(&p));
            p = p.mul(c);
        }
        Series { coeffs: out }
    }

    /// `t^k · f`, keeping the order.
    pub fn shift(&self, k: usize) -> Self {
        let z = self.coeffs[0].zero_like();
        let m = self.order();
        let coeffs = (0..=m)
            .map(|j| if j >= k { self.coeffs[j - k].clone() } else { z.clone() })
            .collect();
        Series { coeffs }
    }

    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Series::constant(self.coeffs[0].zero_like(), 0);
        }
        Series {
            coeffs: (1..=self.order())
                .map(|k| self.coeffs[k].mul_rat(&rat(k as i64, 1)))
                .collect(),
        }
    }

    /// Antiderivative with constant term `c0`, one order higher.
    pub fn integral(&self, c0: C) -> Self {
        let mut v = vec![c0];
        for (k, c) in self.coeffs.iter().enumerate() {
            v.push(c.mul_rat(&rat(1, k as i64 + 1)));
        }
        Series { coeffs: v }
    }

    /// Evaluate the truncated polynomial at `x`.
    pub fn eval(&self, x: &C) -> C {
        let mut acc = self.coeffs[self.order()].clone();
        for c in self.coeffs[..self.order()].iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }
}

/// Cauchy product to the shared order.
pub fn ps_mul<C: Coeff>(a: &Series<C>, b: &Series<C>) -> Series<C> {
    let m = a.shared(b);
    let coeffs = (0..=m)
        .map(|n| {
            let mut s = a.coeffs[0].mul(&b.coeffs[n]);
            for k in 1..=n {
                s = s.add(&a.coeffs[k].mul(&b.coeffs[n - k]));
            }
            s
        })
        .collect();
    Series { coeffs }
}

/// Formal quotient `a / b`; `b` needs a nonzero constant term.
pub fn ps_div<C: Coeff>(a: &Series<C>, b: &Series<C>) -> Result<Series<C>> {
    let b0 = &b.coeffs[0];
    if b0.may_be_zero() {
        return Err(Error::Domain("series division by a zero constant term".into()));
    }
    let m = a.shared(b);
    let mut q: Vec<C> = Vec::with_capacity(m + 1);
    for n in 0..=m {
        let mut s = a.coeffs[n].clone();
        for k in 1..=n {
            s = s.sub(&b.coeffs[k].mul(&q[n - k]));
        }
        q.push(s.div(b0));
    }
    Ok(Series { coeffs: q })
}

/// `exp(a)` for `a` with zero constant term.
pub fn ps_exp<C: Coeff>(a: &Series<C>) -> Result<Series<C>> {
    if !a.coeffs[0].is_exact_zero() {
        return Err(Error::Domain("ps_exp needs a zero constant term".into()));
    }
    // n e_n = Σ_{k=1..n} k a_k e_{n-k}
    let m = a.order();
    let mut e = vec![a.coeffs[0].one_like()];
    for n in 1..=m {
        let mut s = a.coeffs[0].zero_like();
        for k in 1..=n {
            s = s.add(&a.coeffs[k].mul(&e[n - k]).mul_rat(&rat(k as i64, 1)));
        }
        e.push(s.mul_rat(&rat(1, n as i64)));
    }
    Ok(Series { coeffs: e })
}

/// `log(a)` for `a` with constant term one.
pub fn ps_log<C: Coeff>(a: &Series<C>) -> Result<Series<C>> {
    if !a.coeffs[0].is_exact_one() {
        return Err(Error::Domain("ps_log needs constant term 1".into()));
    }
    // n l_n = n a_n - Σ_{k=1..n-1} k l_k a_{n-k}
    let m = a.order();
    let mut l = vec![a.coeffs[0].zero_like()];
    for n in 1..=m {
        let mut s = a.coeffs[n].mul_rat(&rat(n as i64, 1));
        for k in 1..n {
            s = s.sub(&l[k].mul(&a.coeffs[n - k]).mul_rat(&rat(k as i64, 1)));
        }
        l.push(s.mul_rat(&rat(1, n as i64)));
    }
    Ok(Series { coeffs: l })
}

/// `a^r` for `a` with constant term one.
pub fn ps_pow<C: Coeff>(a: &Series<C>, r: &BigRational) -> Result<Series<C>> {
    if !a.coeffs[0].is_exact_one() {
        return Err(Error::Domain("ps_pow needs constant term 1".into()));
    }
    // n b_n = Σ_{k=1..n} ((r+1)k - n) a_k b_{n-k}
    let m = a.order();
    let mut b = vec![a.coeffs[0].one_like()];
    let r1 = r + BigRational::one();
    for n in 1..=m {
        let mut s = a.coeffs[0].zero_like();
        for k in 1..=n {
            let f = &r1 * BigRational::from_integer(BigInt::from(k)) - BigRational::from_integer(BigInt::from(n));
            s = s.add(&a.coeffs[k].mul(&b[n - k]).mul_rat(&f));
        }
        b.push(s.mul_rat(&rat(1, n as i64)));
    }
    Ok(Series { coeffs: b })
}

/// `(e^t - 1)/t`, with coefficients `1/(k+1)!`.
pub fn ps_expm1_over_t(order: usize) -> PowerSeries {
    let mut f = BigInt::one();
    let mut v = Vec::with_capacity(order + 1);
    for k in 0..=order {
        f *= BigInt::from(k + 1);
        v.push(BigRational::new(BigInt::one(), f.clone()));
    }
    Series::new(v)
}

/// `e^{ct}` for rational `c`.
pub fn ps_exp_linear(c: &BigRational, order: usize) -> PowerSeries {
    let mut v = Vec::with_capacity(order + 1);
    let mut term = BigRational::one();
    for k in 0..=order {
        v.push(term.clone());
        term = term * c / BigRational::from_integer(BigInt::from(k + 1));
    }
    Series::new(v)
}

impl PowerSeries {
    pub fn from_ints(v: &[i64], order: usize) -> Self {
        let mut c: Vec<BigRational> = v.iter().map(|&x| rat(x, 1)).collect();
        c.resize(order + 1, BigRational::zero());
        c.truncate(order + 1);
        Series::new(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        rat(n, d)
    }

    #[test]
    fn products_and_quotients() {
        let a = PowerSeries::from_ints(&[1, 1], 4);
        let b = PowerSeries::from_ints(&[1, -1], 4);
        assert_eq!(ps_mul(&a, &b), PowerSeries::from_ints(&[1, 0, -1], 4));
        let s = PowerSeries::from_ints(&[2, 3, 5, 7, 11], 4);
        assert_eq!(ps_mul(&s, &PowerSeries::from_ints(&[1], 4)), s);
        assert_eq!(ps_div(&s, &s).unwrap(), PowerSeries::from_ints(&[1], 4));
        assert!(ps_div(&s, &PowerSeries::from_ints(&[0, 1], 4)).is_err());
        // order follows the shorter operand
        assert_eq!(ps_mul(&s, &PowerSeries::from_ints(&[1], 2)).order(), 2);
    }

    #[test]
    fn exp_and_log() {
        assert_eq!(ps_exp(&PowerSeries::from_ints(&[0], 5)).unwrap(), PowerSeries::from_ints(&[1], 5));
        let t = PowerSeries::from_ints(&[0, 1], 6);
        let e = ps_exp(&t).unwrap();
        let mut f = 1i64;
        for k in 0..=6 {
            if k > 0 {
                f *= k;
            }
            assert_eq!(e.coeff(k as usize), q(1, f));
        }
        assert_eq!(ps_log(&e).unwrap(), t);
        assert!(ps_exp(&PowerSeries::from_ints(&[1, 1], 3)).is_err());
        assert!(ps_log(&PowerSeries::from_ints(&[2, 1], 3)).is_err());
    }

    #[test]
    fn powers() {
        let s = ps_expm1_over_t(5);
        assert_eq!(s.coeff(0), q(1, 1));
        assert_eq!(s.coeff(1), q(1, 2));
        assert_eq!(s.coeff(3), q(1, 24));
        assert_eq!(ps_pow(&s, &q(0, 1)).unwrap(), PowerSeries::from_ints(&[1], 5));
        assert_eq!(ps_pow(&s, &q(1, 1)).unwrap(), s);
        let p = ps_pow(&s, &q(-3, 2)).unwrap();
        assert_eq!(&p.coeffs()[..3], &[q(1, 1), q(-3, 4), q(7, 32)]);
        assert!(ps_pow(&PowerSeries::from_ints(&[2, 1], 3), &q(1, 2)).is_err());
    }

    #[test]
    fn higher_order_reproduces_lower_coefficients() {
        let lo = ps_pow(&ps_expm1_over_t(8), &q(-5, 2)).unwrap();
        let hi = ps_pow(&ps_expm1_over_t(20), &q(-5, 2)).unwrap();
        assert_eq!(hi.truncate(8), lo);
    }

    #[test]
    fn numeric_variant_matches_exact() {
        let s = ps_expm1_over_t(10);
        let n = NumSeries::new(s.coeffs().iter().map(|c| Ball::from_rational(c, 200)).collect());
        let pe = ps_pow(&s, &q(-3, 2)).unwrap();
        let pn = ps_pow(&n, &q(-3, 2)).unwrap();
        for k in 0..=10 {
            assert!(pn.coeff(k).contains(&Ball::from_rational(&pe.coeff(k), 400)));
        }
        let t = NumSeries::monomial(Ball::one(200), 1, 6);
        let e = ps_exp(&t).unwrap();
        assert!(e.coeff(6).contains(&Ball::frac(1, 720, 400)));
    }

    #[test]
    fn calculus_helpers() {
        let s = PowerSeries::from_ints(&[1, 2, 3], 2);
        assert_eq!(s.derivative(), PowerSeries::from_ints(&[2, 6], 1));
        assert_eq!(s.integral(q(0, 1)), Series::new(vec![q(0, 1), q(1, 1), q(1, 1), q(1, 1)]));
        assert_eq!(s.eval(&q(2, 1)), q(17, 1));
        assert_eq!(s.shift(1), PowerSeries::from_ints(&[0, 1, 2], 2));
        assert_eq!(s.scale_arg(&q(2, 1)), PowerSeries::from_ints(&[1, 4, 12], 2));
        assert_eq!(ps_exp_linear(&q(2, 1), 3), Series::new(vec![q(1, 1), q(2, 1), q(2, 1), q(4, 3)]));
    }

    fn unit_series() -> impl Strategy<Value = PowerSeries> {
        proptest::collection::vec((-5i64..6, 1i64..5), 6).prop_map(|v| {
            let mut c: Vec<BigRational> = v.into_iter().map(|(n, d)| rat(n, d)).collect();
            c[0] = BigRational::one();
            Series::new(c)
        })
    }

    proptest! {
        #[test]
        fn pow_adds_exponents(a in unit_series(), rn in -6i64..7, rd in 1i64..4, sn in -6i64..7, sd in 1i64..4) {
            let r = rat(rn, rd);
            let s = rat(sn, sd);
            let lhs = ps_pow(&a, &(&r + &s)).unwrap();
            let rhs = ps_mul(&ps_pow(&a, &r).unwrap(), &ps_pow(&a, &s).unwrap());
            prop_assert_eq!(lhs, rhs);
            let inv = ps_mul(&ps_pow(&a, &r).unwrap(), &ps_pow(&a, &(-&r)).unwrap());
            prop_assert_eq!(inv, PowerSeries::from_ints(&[1], 5));
        }

        #[test]
        fn exp_inverts_log(a in unit_series()) {
            prop_assert_eq!(ps_exp(&ps_log(&a).unwrap()).unwrap(), a);
        }
    }
}
