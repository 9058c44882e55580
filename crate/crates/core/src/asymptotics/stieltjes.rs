//! Levels of the large-N expansion of the rescaled Stieltjes transform
//! `W̃(t) = Σ_k W̃_(k) N^-k + W̃_(k+1/2) N^-(k+1/2)`.
//!
//! Each level is `c · log((t+1)/(t-1)) + P(t)/(t²-1)^m`. Levels come from
//! `D̂₀ W̃_(k) = RHS_k - D̂₁ W̃_(k-1) - D̂₂ W̃_(k-2)`: divide by `2(t²-1)²`,
//! split into partial fractions at `t = ±1` and integrate term by term with
//! zero constant.

use super::coeffs::{a_with_leading, b_with_leading};
use super::laurent::{q, qi, Laurent, Q};
use super::mgf::{Level, Prefactor};
use crate::error::{Error, Result};
use num_integer::binomial;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::fmt;

fn t2m1() -> Laurent {
    Laurent::from_ints(&[-1, 0, 1])
}

/// `num / (t² - 1)^m`, kept with `num` not divisible by `t² - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatFn {
    pub num: Laurent,
    pub m: u32,
}

impl RatFn {
    pub fn new(num: Laurent, m: u32) -> Self {
        assert!(num.is_polynomial());
        RatFn { num, m }.reduced()
    }

    pub fn zero() -> Self {
        RatFn::new(Laurent::zero(), 0)
    }

    pub fn poly(p: Laurent) -> Self {
        RatFn::new(p, 0)
    }

    fn reduced(mut self) -> Self {
        if self.num.is_zero() {
            self.m = 0;
            return self;
        }
        let d = t2m1();
        while self.m > 0 {
            let (quo, r) = self.num.divrem(&d);
            if !r.is_zero() {
                break;
            }
            self.num = quo;
            self.m -= 1;
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn raised(&self, m: u32) -> Laurent {
        self.num.mul(&t2m1().pow(m - self.m))
    }

    pub fn add(&self, o: &RatFn) -> RatFn {
        let m = self.m.max(o.m);
        RatFn::new(self.raised(m).add(&o.raised(m)), m)
    }

    pub fn neg(&self) -> RatFn {
        RatFn::new(self.num.neg(), self.m)
    }

    pub fn sub(&self, o: &RatFn) -> RatFn {
        self.add(&o.neg())
    }

    pub fn mul_poly(&self, p: &Laurent) -> RatFn {
        RatFn::new(self.num.mul(p), self.m)
    }

    /// Division by `(t² - 1)^j`.
    pub fn div_t2m1(&self, j: u32) -> RatFn {
        RatFn::new(self.num.clone(), self.m + j)
    }

    pub fn derivative(&self) -> RatFn {
        // (P/(t²-1)^m)' = (P'(t²-1) - 2m t P)/(t²-1)^(m+1)
        let two_mt = Laurent::monomial(qi(2 * self.m as i64), 1);
        let num = self.num.derivative().mul(&t2m1()).sub(&two_mt.mul(&self.num));
        RatFn::new(num, self.m + 1)
    }

    pub fn is_odd(&self) -> bool {
        self.num.is_odd()
    }

    pub fn eval(&self, t: &Q) -> Q {
        self.num.eval(t) / num_traits::pow(t * t - Q::one(), self.m as usize)
    }

    /// Coefficients of `u^0 .. u^order` in the expansion in `u = 1/t`;
    /// `None` when there is a polynomial part of positive degree.
    pub fn expansion_at_infinity(&self, order: usize) -> Option<Vec<Q>> {
        if self.is_zero() {
            return Some(vec![Q::zero(); order + 1]);
        }
        let deg = self.num.high().unwrap();
        let shift = 2 * self.m as i32 - deg;
        if shift < 0 {
            return None;
        }
        // P(t) = t^deg P̃(u), (t²-1)^-m = u^(2m) (1-u²)^-m
        let mut out = vec![Q::zero(); order + 1];
        for (k, c) in self.num.terms() {
            let base = 2 * self.m as i32 - k;
            for j in 0.. {
                let pow = base + 2 * j;
                if pow as usize > order {
                    break;
                }
                let w = binomial(BigInt::from(self.m as i64 + j as i64 - 1), BigInt::from(j as i64));
                let w = if self.m == 0 {
                    if j == 0 { BigInt::one() } else { BigInt::zero() }
                } else {
                    w
                };
                out[pow as usize] += c * Q::from_integer(w);
            }
        }
        Some(out)
    }

    /// Polynomial part and principal parts at `t = 1` and `t = -1`:
    /// `poly + Σ_j plus[j-1] (t-1)^-j + Σ_j minus[j-1] (t+1)^-j`.
    pub fn partial_fractions(&self) -> PartialFractions {
        let m = self.m as usize;
        let (poly, _) = self.num.divrem(&t2m1().pow(self.m));
        let principal = |a: i64| -> Vec<Q> {
            // near t = a, s = t - a: (t²-1)^m = s^m (s + 2a)^m
            let shifted = compose_shift(&self.num, &qi(a));
            let inv = inverse_power_series(&qi(2 * a), self.m, m);
            let prod = shifted.mul(&inv);
            (1..=m).map(|j| prod.coeff((m - j) as i32)).collect()
        };
        PartialFractions {
            polynomial: poly,
            at_plus_one: principal(1),
            at_minus_one: principal(-1),
        }
    }
}

/// `p(t + a)`.
fn compose_shift(p: &Laurent, a: &Q) -> Laurent {
    let lin = Laurent::from_coeffs(vec![a.clone(), Q::one()]);
    p.poly_coeffs()
        .into_iter()
        .rev()
        .fold(Laurent::zero(), |acc, c| acc.mul(&lin).add(&Laurent::constant(c)))
}

/// First `n` coefficients of `(c + s)^-m`.
fn inverse_power_series(c: &Q, m: u32, n: usize) -> Laurent {
    let base = num_traits::pow(c.recip(), m as usize);
    let coeffs = (0..n)
        .map(|j| {
            let b = Q::from_integer(binomial(BigInt::from(m as i64 + j as i64 - 1), BigInt::from(j as i64)));
            let sign = if j % 2 == 0 { Q::one() } else { -Q::one() };
            &base * b * sign * num_traits::pow(c.recip(), j)
        })
        .collect();
    Laurent::from_coeffs(coeffs)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialFractions {
    pub polynomial: Laurent,
    /// Coefficient of `(t - 1)^-j` at index `j - 1`.
    pub at_plus_one: Vec<Q>,
    /// Coefficient of `(t + 1)^-j` at index `j - 1`.
    pub at_minus_one: Vec<Q>,
}

impl PartialFractions {
    pub fn to_ratfn(&self) -> RatFn {
        let mut acc = RatFn::poly(self.polynomial.clone());
        for (sign, cs) in [(1i64, &self.at_plus_one), (-1, &self.at_minus_one)] {
            // (t ∓ 1)^-j = (t ± 1)^j / (t² - 1)^j
            let other = Laurent::from_coeffs(vec![qi(sign), Q::one()]);
            for (i, c) in cs.iter().enumerate() {
                let j = i as u32 + 1;
                acc = acc.add(&RatFn::new(other.pow(j).scale(c), j));
            }
        }
        acc
    }
}

/// One level: `prefactor · [c · log((t+1)/(t-1)) + P(t)/(t²-1)^m]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StieltjesLevel {
    pub level: Level,
    pub prefactor: Prefactor,
    pub log_coeff: Q,
    pub rational: RatFn,
}

impl StieltjesLevel {
    /// `W'`, without prefactor.
    pub fn derivative(&self) -> RatFn {
        // d/dt log((t+1)/(t-1)) = -2/(t²-1)
        let log_part = RatFn::new(Laurent::constant(&self.log_coeff * qi(-2)), 1);
        log_part.add(&self.rational.derivative())
    }

    /// Coefficients of `t^0, t^-1, …, t^-order` at infinity, without prefactor.
    pub fn expansion_at_infinity(&self, order: usize) -> Option<Vec<Q>> {
        let mut out = self.rational.expansion_at_infinity(order)?;
        // log((t+1)/(t-1)) = Σ 2 u^(2j+1)/(2j+1)
        for k in (1..=order).step_by(2) {
            out[k] += &self.log_coeff * q(2, k as i64);
        }
        Some(out)
    }

    /// Exact decay order `d` with `W ≍ t^-d`, looked up to `t^-max`.
    pub fn decay_order(&self, max: usize) -> Option<usize> {
        self.expansion_at_infinity(max)?.iter().position(|c| !c.is_zero())
    }

    pub fn is_odd(&self) -> bool {
        self.rational.is_odd()
    }

    pub fn eval(&self, t: &Q) -> Option<Q> {
        if !self.log_coeff.is_zero() {
            return None;
        }
        Some(self.rational.eval(t))
    }
}

impl fmt::Display for StieltjesLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.log_coeff.is_zero() {
            parts.push(format!("({})*log((t+1)/(t-1))", Laurent::constant(self.log_coeff.clone())));
        }
        if !self.rational.is_zero() {
            let den = match self.rational.m {
                0 => String::new(),
                1 => "/(t^2 - 1)".to_string(),
                m => format!("/(t^2 - 1)^{m}"),
            };
            parts.push(format!("({}){den}", self.rational.num));
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        let body = parts.join(" + ");
        match self.prefactor {
            Prefactor::Sqrt2OverPi => write!(f, "sqrt(2/pi)*[{body}]"),
            Prefactor::One => write!(f, "{body}"),
        }
    }
}

fn op0(g: &RatFn) -> RatFn {
    g.mul_poly(&t2m1().pow(2).scale(&qi(2)))
}

fn op1(g: &RatFn) -> RatFn {
    let three_t = Laurent::monomial(qi(3), 1);
    g.derivative().mul_poly(&three_t).add(&g.mul_poly(&Laurent::constant(qi(5)))).mul_poly(&t2m1())
}

fn op2(g: &RatFn) -> RatFn {
    let g1 = g.derivative();
    let g2 = g1.derivative();
    g2.mul_poly(&Laurent::monomial(qi(1), 2))
        .add(&g1.mul_poly(&Laurent::monomial(qi(4), 1)))
        .add(&g.mul_poly(&Laurent::constant(qi(2))))
}

/// `D̂₀ W_k + D̂₁ W_(k-1) + D̂₂ W_(k-2)`, from the derivatives of the levels.
fn lhs(chain: &[RatFn], k: usize) -> RatFn {
    let mut r = op0(&chain[k]);
    if k >= 1 {
        r = r.add(&op1(&chain[k - 1]));
    }
    if k >= 2 {
        r = r.add(&op2(&chain[k - 2]));
    }
    r
}

/// Antiderivative of `g` vanishing at infinity, as `(log coefficient, rational part)`.
fn integrate(g: &RatFn, level: Level) -> Result<(Q, RatFn)> {
    let pf = g.partial_fractions();
    if !pf.polynomial.is_zero() {
        return Err(Error::Internal(format!("level {level} grows at infinity")));
    }
    let (a1, b1) = (
        pf.at_plus_one.first().cloned().unwrap_or_else(Q::zero),
        pf.at_minus_one.first().cloned().unwrap_or_else(Q::zero),
    );
    if !(&a1 + &b1).is_zero() {
        return Err(Error::Internal(format!(
            "log(t-1) and log(t+1) do not cancel at level {level}: {a1} vs {b1}"
        )));
    }
    let shift_down = |cs: &[Q]| -> Vec<Q> {
        // ∫ (t∓1)^-j = (t∓1)^(1-j)/(1-j), j ≥ 2
        cs.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c / qi(-(i as i64)))
            .collect()
    };
    let anti = PartialFractions {
        polynomial: Laurent::zero(),
        at_plus_one: shift_down(&pf.at_plus_one),
        at_minus_one: shift_down(&pf.at_minus_one),
    };
    Ok((b1, anti.to_ratfn()))
}

fn integer_rhs(a: &[Q], b: &[Q], l: usize) -> Laurent {
    // (4 - 2t²) a_l + a_{l-1} - 6 b_l, prefactor √(2/π) removed
    let prev = if l == 0 { Q::zero() } else { a[l - 1].clone() };
    Laurent::from_coeffs(vec![qi(4) * &a[l] + prev - qi(6) * &b[l], Q::zero(), qi(-2) * &a[l]])
}

fn half_rhs(k: usize) -> Laurent {
    match k {
        0 => Laurent::from_ints(&[-1, 0, -1]),
        1 => Laurent::constant(q(1, 2)),
        _ => Laurent::zero(),
    }
}

fn check_decay(w: &StieltjesLevel) -> Result<()> {
    let k = w.level.k() as usize;
    let bound = if w.level.is_half() { 2 * k + 1 } else { 1 };
    let order = w.decay_order(2 * k + 8);
    let ok = match (w.level.is_half(), order) {
        (false, Some(d)) => d == 1,
        (true, Some(d)) => d >= bound,
        (_, None) => false,
    };
    if !ok || !w.is_odd() {
        return Err(Error::Internal(format!(
            "level {} fails the decay or parity check (order {order:?}, need {bound})",
            w.level
        )));
    }
    Ok(())
}

/// Levels `0, 1/2, 1, 3/2, …, k_max, k_max + 1/2`, in that order.
pub fn stieltjes_expansion_levels(k_max: u32) -> Result<Vec<StieltjesLevel>> {
    let n = k_max as usize;
    let a = a_with_leading(n);
    let b = b_with_leading(n);
    let mut out: Vec<Vec<StieltjesLevel>> = vec![Vec::new(), Vec::new()];
    let mut derivs: Vec<Vec<RatFn>> = vec![Vec::new(), Vec::new()];
    for k in 0..=n {
        for half in [false, true] {
            let (level, prefactor, rhs) = if half {
                (Level::half(k as u32), Prefactor::One, half_rhs(k))
            } else {
                (Level::integer(k as u32), Prefactor::Sqrt2OverPi, integer_rhs(&a, &b, k))
            };
            let chain = &mut derivs[half as usize];
            let mut known = RatFn::poly(rhs.clone());
            chain.push(RatFn::zero());
            known = known.sub(&lhs(chain, k));
            let g = known.div_t2m1(2).mul_poly(&Laurent::constant(q(1, 2)));
            let (log_coeff, rational) = integrate(&g, level)?;
            let w = StieltjesLevel {
                level,
                prefactor,
                log_coeff,
                rational,
            };
            chain[k] = w.derivative();
            if lhs(chain, k) != RatFn::poly(rhs) {
                return Err(Error::Internal(format!("operator identity fails at level {level}")));
            }
            check_decay(&w)?;
            out[half as usize].push(w);
        }
    }
    let mut merged = Vec::new();
    let mut halves = out.pop().unwrap().into_iter();
    for w in out.pop().unwrap() {
        merged.push(w);
        merged.extend(halves.next());
    }
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ratfn(num: &[(i32, i64, i64)], m: u32) -> RatFn {
        RatFn::new(super::super::mgf::qpoly(num), m)
    }

    #[test]
    fn first_levels_match_closed_forms() {
        let w = stieltjes_expansion_levels(2).unwrap();
        assert_eq!(w.len(), 6);
        assert_eq!(w[0].log_coeff, q(1, 2));
        assert!(w[0].rational.is_zero());
        assert_eq!(w[1].rational, ratfn(&[(1, 1, 2)], 1));
        assert!(w[1].log_coeff.is_zero());
        // -(1/2)·3t(t²-3)/(4(t²-1)²) with the √(2/π) prefactor
        assert_eq!(w[2].rational, ratfn(&[(3, -3, 8), (1, 9, 8)], 2));
        assert!(w[2].log_coeff.is_zero());
        assert_eq!(w[3].rational, ratfn(&[(1, 1, 1)], 3));
    }

    #[test]
    fn decay_orders() {
        let w = stieltjes_expansion_levels(3).unwrap();
        assert_eq!(w[2].decay_order(12), Some(1));
        assert_eq!(w[3].decay_order(12), Some(5));
        for lv in &w {
            assert!(lv.is_odd());
        }
    }

    #[test]
    fn expansion_reproduces_moment_tails() {
        // coefficient of t^(-2p-1) in level l+1/2 is c_{l,p}
        let w = stieltjes_expansion_levels(3).unwrap();
        let e = w[3].expansion_at_infinity(11).unwrap();
        assert_eq!([&e[5], &e[7], &e[9], &e[11]], [&qi(1), &qi(3), &qi(6), &qi(10)]);
        let e = w[5].expansion_at_infinity(11).unwrap();
        assert_eq!([&e[7], &e[9], &e[11]], [&qi(4), &qi(22), &qi(70)]);
        // level 0 at t^(-3) is 1/3 = b_0, level 1 at t^(-1) is a_1
        let e = w[0].expansion_at_infinity(3).unwrap();
        assert_eq!(e[3], q(1, 3));
        let e = w[2].expansion_at_infinity(1).unwrap();
        assert_eq!(e[1], q(-3, 8));
    }

    #[test]
    fn partial_fractions_round_trip() {
        let r = ratfn(&[(3, 2, 1), (2, -1, 3), (0, 5, 1)], 3);
        let pf = r.partial_fractions();
        assert_eq!(pf.to_ratfn(), r);
        let t = q(7, 3);
        let direct = r.eval(&t);
        let mut sum = Q::zero();
        for (j, c) in pf.at_plus_one.iter().enumerate() {
            sum += c / num_traits::pow(&t - Q::one(), j + 1);
        }
        for (j, c) in pf.at_minus_one.iter().enumerate() {
            sum += c / num_traits::pow(&t + Q::one(), j + 1);
        }
        assert_eq!(sum, direct);
    }
}
