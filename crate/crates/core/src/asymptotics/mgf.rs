//! Levels of the large-N expansion of the rescaled moment generating function
//! `ũ(t) = Σ_k ũ_(k) N^-k + ũ_(k+1/2) N^-(k+1/2)`.
//!
//! Every level has the form `P(t) sinh t + Q(t) cosh t` with `P` odd and `Q`
//! even (level 0 carries `sinh t / t`). Levels solve
//! `D₀ ũ_(k) = -D₁ ũ_(k-1) - D₂ ũ_(k-2)` by an exact linear solve over that
//! ansatz, whose only kernel element is `cosh t`.

use super::coeffs::{a_with_leading, b_with_leading};
use super::laurent::{q, solve_exact, Laurent, Q};
use super::ops::{mono, DiffOp, Differentiable};
use crate::error::{Error, Result};
use crate::numerics::{elementary as el, gamma::factorial, Ball, Mag};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::fmt;

/// An expansion level `k` or `k + 1/2`, stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Level(u32);

impl Level {
    pub fn integer(k: u32) -> Self {
        Level(2 * k)
    }

    pub fn half(k: u32) -> Self {
        Level(2 * k + 1)
    }

    pub fn twice(self) -> u32 {
        self.0
    }

    pub fn is_half(self) -> bool {
        self.0 % 2 == 1
    }

    /// Integer part.
    pub fn k(self) -> u32 {
        self.0 / 2
    }

    /// Parse `"3"`, `"3/2"` or `"1.5"`.
    pub fn parse(s: &str) -> Option<Level> {
        let s = s.trim();
        if let Some((a, b)) = s.split_once('/') {
            let a: u32 = a.trim().parse().ok()?;
            return (b.trim() == "2" && a % 2 == 1).then_some(Level(a));
        }
        if let Some(a) = s.strip_suffix(".5") {
            return Some(Level::half(a.parse().ok()?));
        }
        Some(Level::integer(s.parse().ok()?))
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_half() {
            write!(f, "{}/2", self.0)
        } else {
            write!(f, "{}", self.0 / 2)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prefactor {
    /// The level is `√(2/π)` times the stored combination.
    Sqrt2OverPi,
    One,
}

/// `P(t) sinh t + Q(t) cosh t`, without prefactor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SinhCosh {
    pub sinh: Laurent,
    pub cosh: Laurent,
}

impl Differentiable for SinhCosh {
    fn zero() -> Self {
        SinhCosh {
            sinh: Laurent::zero(),
            cosh: Laurent::zero(),
        }
    }
    fn derivative(&self) -> Self {
        SinhCosh {
            sinh: self.sinh.derivative().add(&self.cosh),
            cosh: self.cosh.derivative().add(&self.sinh),
        }
    }
    fn mul_laurent(&self, c: &Laurent) -> Self {
        SinhCosh {
            sinh: self.sinh.mul(c),
            cosh: self.cosh.mul(c),
        }
    }
    fn add(&self, o: &Self) -> Self {
        SinhCosh {
            sinh: self.sinh.add(&o.sinh),
            cosh: self.cosh.add(&o.cosh),
        }
    }
}

impl SinhCosh {
    pub fn is_zero(&self) -> bool {
        self.sinh.is_zero() && self.cosh.is_zero()
    }

    pub fn neg(&self) -> Self {
        SinhCosh {
            sinh: self.sinh.neg(),
            cosh: self.cosh.neg(),
        }
    }

    /// Coefficient of `t^n` in the Taylor expansion at 0.
    pub fn taylor_coeff(&self, n: u32) -> Q {
        let inv_fact = |j: i32| Q::new(BigInt::one(), BigInt::from(factorial(j as u64)));
        let mut s = Q::zero();
        for (i, c) in self.sinh.terms() {
            let j = n as i32 - i;
            if j >= 0 && j % 2 == 1 {
                s += c * inv_fact(j);
            }
        }
        for (i, c) in self.cosh.terms() {
            let j = n as i32 - i;
            if j >= 0 && j % 2 == 0 {
                s += c * inv_fact(j);
            }
        }
        s
    }

    /// `f^(n)(0)`.
    pub fn derivative_at_zero(&self, n: u32) -> Q {
        self.taylor_coeff(n) * Q::from_integer(BigInt::from(factorial(n as u64)))
    }
}

/// One level of the expansion: `prefactor · (P sinh t + Q cosh t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SinhCoshPoly {
    pub level: Level,
    pub prefactor: Prefactor,
    pub f: SinhCosh,
}

fn div_t(p: &Laurent) -> Laurent {
    p.shift(-1)
}

impl SinhCoshPoly {
    /// Integer levels: polynomial multiplying `t sinh t`.
    pub fn a_poly(&self) -> Laurent {
        let s = Laurent::monomial(self.s_coeff(), -1);
        div_t(&self.f.sinh.sub(&s))
    }

    /// Integer levels: polynomial multiplying `cosh t`.
    pub fn b_poly(&self) -> Laurent {
        self.f.cosh.clone()
    }

    /// Coefficient of `sinh t / t`.
    pub fn s_coeff(&self) -> Q {
        self.f.sinh.coeff(-1)
    }

    /// Half-integer levels: odd polynomial multiplying `t cosh t`.
    pub fn a_hat(&self) -> Laurent {
        div_t(&self.f.cosh)
    }

    /// Half-integer levels: odd polynomial multiplying `sinh t`.
    pub fn b_hat(&self) -> Laurent {
        self.f.sinh.clone()
    }

    /// `ũ^(n)(0)` without the prefactor.
    pub fn derivative_at_zero(&self, n: u32) -> Q {
        self.f.derivative_at_zero(n)
    }

    /// Numeric value, prefactor included.
    pub fn eval(&self, t: &Ball) -> Ball {
        let (sh, ch) = el::sinh_cosh(t);
        let mut acc = Ball::zero(t.prec());
        let pw = |k: i32| t.pow_u(k as u64);
        for (k, c) in self.f.sinh.terms() {
            let cb = Ball::from_rational(c, t.prec());
            let term = if k == -1 { sinhc(t) } else { &pw(k) * &sh };
            acc = &acc + &(&cb * &term);
        }
        for (k, c) in self.f.cosh.terms() {
            let cb = Ball::from_rational(c, t.prec());
            acc = &acc + &(&cb * &(&pw(k) * &ch));
        }
        match self.prefactor {
            Prefactor::One => acc,
            Prefactor::Sqrt2OverPi => &acc * &el::sqrt_2_over_pi(t.prec()),
        }
    }
}

/// `sinh(t)/t`, by its series near 0.
pub fn sinhc(t: &Ball) -> Ball {
    let prec = t.prec();
    if t.abs_upper().lt(&Mag::from_u64(1)) {
        let t2 = t.sqr();
        let mut term = Ball::one(prec);
        let mut sum = Ball::one(prec);
        let mut j = 0i64;
        loop {
            j += 1;
            term = (&term * &t2).div_i64((2 * j) * (2 * j + 1));
            sum = &sum + &term;
            if term.abs_upper().log2() < -(prec as f64) - 8.0 {
                // ratio of later terms is below 1/6
                return sum.add_error(&term.abs_upper().mul_2exp(1));
            }
        }
    }
    let (sh, _) = el::sinh_cosh(t);
    &sh / t
}

fn fmt_poly(p: &Laurent) -> String {
    format!("({p})")
}

impl fmt::Display for SinhCoshPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body = if self.level.is_half() {
            format!("{}*t*cosh(t) + {}*sinh(t)", fmt_poly(&self.a_hat()), fmt_poly(&self.b_hat()))
        } else {
            let mut s = format!("{}*t*sinh(t) + {}*cosh(t)", fmt_poly(&self.a_poly()), fmt_poly(&self.b_poly()));
            let c = self.s_coeff();
            if !c.is_zero() {
                s.push_str(&format!(" + ({})*sinh(t)/t", Laurent::constant(c)));
            }
            s
        };
        match self.prefactor {
            Prefactor::Sqrt2OverPi => write!(f, "sqrt(2/pi)*[{body}]"),
            Prefactor::One => write!(f, "{body}"),
        }
    }
}

/// `D₀ = 2t∂⁴ + 8∂³ - 4t∂² - 8∂ + 2t`.
pub fn d0() -> DiffOp {
    DiffOp::new(&[(mono(2, 1), 4), (mono(8, 0), 3), (mono(-4, 1), 2), (mono(-8, 0), 1), (mono(2, 1), 0)])
}

/// `D₁ = -3t²∂³ - 13t∂² + (3t² - 8)∂ + t`.
pub fn d1() -> DiffOp {
    DiffOp::new(&[
        (mono(-3, 2), 3),
        (mono(-13, 1), 2),
        (Laurent::from_ints(&[-8, 0, 3]), 1),
        (mono(1, 1), 0),
    ])
}

/// `D₂ = t³∂² + 2t²∂`.
pub fn d2() -> DiffOp {
    DiffOp::new(&[(mono(1, 3), 2), (mono(2, 2), 1)])
}

/// Solve `D₀ f = rhs` over `P` odd, `Q` even polynomials with `Q(0) = pin`.
fn solve_level(rhs: &SinhCosh, pin: &Q, degree: i32) -> Result<SinhCosh> {
    let op = d0();
    let mut basis = Vec::new();
    for k in (1..=degree + 1).step_by(2) {
        basis.push(SinhCosh {
            sinh: mono(1, k),
            cosh: Laurent::zero(),
        });
    }
    let q0_index = basis.len();
    for k in (0..=degree).step_by(2) {
        basis.push(SinhCosh {
            sinh: Laurent::zero(),
            cosh: mono(1, k),
        });
    }
    let images: Vec<SinhCosh> = basis.iter().map(|b| op.apply(b)).collect();
    let mut lo = 0;
    let mut hi = 0;
    for f in images.iter().chain(std::iter::once(rhs)) {
        for p in [&f.sinh, &f.cosh] {
            if let (Some(l), Some(h)) = (p.low(), p.high()) {
                lo = lo.min(l);
                hi = hi.max(h);
            }
        }
    }
    let mut rows = Vec::new();
    let mut b = Vec::new();
    for pow in lo..=hi {
        for which in 0..2 {
            let pick = |f: &SinhCosh| if which == 0 { f.sinh.coeff(pow) } else { f.cosh.coeff(pow) };
            rows.push(images.iter().map(pick).collect::<Vec<_>>());
            b.push(pick(rhs));
        }
    }
    let mut pin_row = vec![Q::zero(); basis.len()];
    pin_row[q0_index] = Q::one();
    rows.push(pin_row);
    b.push(pin.clone());
    let x = solve_exact(rows, b).map_err(|e| Error::Internal(format!("level solve failed: {e}")))?;
    let mut f = SinhCosh::zero();
    for (c, bf) in x.iter().zip(&basis) {
        f = f.add(&bf.mul_laurent(&Laurent::constant(c.clone())));
    }
    Ok(f)
}

fn check_annihilated(f: &SinhCosh, rhs: &SinhCosh, level: Level) -> Result<()> {
    let lhs = d0().apply(f);
    if lhs.add(&rhs.neg()).is_zero() {
        Ok(())
    } else {
        Err(Error::Internal(format!("operator identity fails at level {level}")))
    }
}

/// Levels `0, 1/2, 1, 3/2, …, k_max, k_max + 1/2`, in that order.
pub fn mgf_expansion_levels(k_max: u32) -> Result<Vec<SinhCoshPoly>> {
    let a = a_with_leading(k_max as usize);
    let b = b_with_leading(k_max as usize);
    let mut ints: Vec<SinhCosh> = vec![SinhCosh {
        sinh: mono(1, -1),
        cosh: Laurent::zero(),
    }];
    let mut halves: Vec<SinhCosh> = vec![SinhCosh {
        sinh: Laurent::zero(),
        cosh: Laurent::constant(q(1, 2)),
    }];
    for f in ints.iter().chain(&halves) {
        check_annihilated(f, &SinhCosh::zero(), Level::integer(0))?;
    }
    let (op1, op2) = (d1(), d2());
    let rhs_of = |chain: &[SinhCosh], k: usize| -> Result<SinhCosh> {
        let mut r = op1.apply(&chain[k - 1]);
        if k >= 2 {
            r = r.add(&op2.apply(&chain[k - 2]));
        }
        let r = r.neg();
        if !r.sinh.is_polynomial() || !r.cosh.is_polynomial() {
            return Err(Error::Internal("negative powers survive in a level right-hand side".into()));
        }
        Ok(r)
    };
    for k in 1..=k_max as usize {
        let degree = 2 * k as i32 + 2;
        // integer level k
        let rhs = rhs_of(&ints, k)?;
        let f = solve_level(&rhs, &a[k], degree)?;
        check_annihilated(&f, &rhs, Level::integer(k as u32))?;
        let f2 = f.derivative_at_zero(2);
        if f2 != b[k] {
            return Err(Error::Internal(format!(
                "second derivative at 0 of level {k} is {f2}, expected {}",
                b[k]
            )));
        }
        ints.push(f);
        // half level k + 1/2
        let rhs = rhs_of(&halves, k)?;
        let f = solve_level(&rhs, &Q::zero(), degree)?;
        check_annihilated(&f, &rhs, Level::half(k as u32))?;
        for j in 1..=k as u32 {
            if !f.derivative_at_zero(2 * j).is_zero() {
                return Err(Error::Internal(format!(
                    "derivative {} at 0 of level {k}+1/2 does not vanish",
                    2 * j
                )));
            }
        }
        halves.push(f);
    }
    let mut out = Vec::new();
    for (k, (fi, fh)) in ints.into_iter().zip(halves).enumerate() {
        out.push(SinhCoshPoly {
            level: Level::integer(k as u32),
            prefactor: Prefactor::Sqrt2OverPi,
            f: fi,
        });
        out.push(SinhCoshPoly {
            level: Level::half(k as u32),
            prefactor: Prefactor::One,
            f: fh,
        });
    }
    Ok(out)
}

/// Find a level in the output of [`mgf_expansion_levels`].
pub fn find_level(levels: &[SinhCoshPoly], level: Level) -> Option<&SinhCoshPoly> {
    levels.iter().find(|l| l.level == level)
}

/// Laurent polynomial from `(power, numerator, denominator)` triples.
pub fn qpoly(c: &[(i32, i64, i64)]) -> Laurent {
    c.iter()
        .fold(Laurent::zero(), |acc, &(k, n, d)| acc.add(&Laurent::monomial(q(n, d), k)))
}

#[cfg(test)]
mod tests {
    use super::super::laurent::qi;
    use super::*;

    fn lv(levels: &[SinhCoshPoly], l: Level) -> &SinhCoshPoly {
        find_level(levels, l).unwrap()
    }

    #[test]
    fn low_levels_match_closed_forms() {
        let levels = mgf_expansion_levels(3).unwrap();
        let l1 = lv(&levels, Level::integer(1));
        assert_eq!(l1.a_poly(), qpoly(&[(0, 3, 8)]));
        assert_eq!(l1.b_poly(), qpoly(&[(0, -3, 8)]));
        let l2 = lv(&levels, Level::integer(2));
        assert_eq!(l2.a_poly(), qpoly(&[(2, 23, 384), (0, 9, 384)]));
        assert_eq!(l2.b_poly(), qpoly(&[(2, -26, 384), (0, -9, 384)]));
        let l3 = lv(&levels, Level::integer(3));
        assert_eq!(l3.a_poly(), qpoly(&[(4, 91, 15360), (2, -285, 15360), (0, -405, 15360)]));
        assert_eq!(l3.b_poly(), qpoly(&[(4, -5, 15360), (2, 420, 15360), (0, 405, 15360)]));
        let h1 = lv(&levels, Level::half(1));
        assert_eq!(h1.a_hat(), qpoly(&[(1, 1, 8)]));
        assert_eq!(h1.b_hat(), qpoly(&[(1, -1, 8)]));
        let h2 = lv(&levels, Level::half(2));
        assert_eq!(h2.a_hat(), qpoly(&[(3, 3, 192), (1, -3, 192)]));
        assert_eq!(h2.b_hat(), qpoly(&[(3, -2, 192), (1, 3, 192)]));
    }

    #[test]
    fn half_level_derivatives_at_zero() {
        let levels = mgf_expansion_levels(3).unwrap();
        let h1 = lv(&levels, Level::half(1));
        let d: Vec<Q> = (2..=5).map(|p| h1.derivative_at_zero(2 * p)).collect();
        assert_eq!(d, vec![qi(1), qi(3), qi(6), qi(10)]);
        let h2 = lv(&levels, Level::half(2));
        let d: Vec<Q> = (3..=5).map(|p| h2.derivative_at_zero(2 * p)).collect();
        assert_eq!(d, vec![qi(4), qi(22), qi(70)]);
    }

    #[test]
    fn d0_factorisations() {
        let dd = DiffOp::new(&[(mono(1, 0), 2), (mono(-1, 0), 0)]);
        let left = DiffOp::new(&[(mono(2, 1), 2), (mono(8, 0), 1), (mono(-2, 1), 0)]);
        let right = DiffOp::new(&[(mono(2, 1), 2), (mono(4, 0), 1), (mono(-2, 1), 0)]);
        assert_eq!(left.compose(&dd), d0());
        assert_eq!(dd.compose(&right), d0());
    }

    #[test]
    fn evaluation_matches_closed_form() {
        let levels = mgf_expansion_levels(1).unwrap();
        let t = Ball::frac(7, 10, 200);
        let (sh, ch) = el::sinh_cosh(&t);
        let l1 = lv(&levels, Level::integer(1)).eval(&t);
        let want = &(&(&(&t * &sh) - &ch) * &Ball::frac(3, 8, 200)) * &el::sqrt_2_over_pi(200);
        assert!(l1.overlaps(&want));
        let l0 = lv(&levels, Level::integer(0)).eval(&Ball::zero(200));
        assert!(l0.overlaps(&el::sqrt_2_over_pi(200)));
        assert_eq!(Level::parse("5/2"), Some(Level::half(2)));
        assert_eq!(Level::parse("3"), Some(Level::integer(3)));
        assert_eq!(Level::half(1).to_string(), "3/2");
    }
}
