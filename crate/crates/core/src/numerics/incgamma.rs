//! Incomplete gamma functions and the error function.
//!
//! `γ(a, x)` uses its power series for `x < a + 1` and `Γ(a) - Γ(a, x)`
//! otherwise; `Γ(a, x)` uses the finite sum for integer `a`, the complement
//! of the series below `a + 1`, and Legendre's continued fraction above.

use super::ball::Ball;
use super::context::PrecisionContext;
use super::elementary as el;
use super::gamma::gamma_real;
use super::mag::Mag;
use crate::error::{Error, Result};
use num_traits::ToPrimitive;

const MAX_TERMS: usize = 200_000;

fn check_args(a: &Ball, x: &Ball) -> Result<()> {
    if !a.is_positive() {
        return Err(Error::Domain("incomplete gamma needs a > 0".into()));
    }
    if x.is_negative() {
        return Err(Error::Domain("incomplete gamma needs x >= 0".into()));
    }
    Ok(())
}

/// `x^a e^{-x}` for `x > 0`.
fn prefactor(a: &Ball, x: &Ball) -> Ball {
    let lx = el::ln(x);
    el::exp(&(&(a * &lx) - x))
}

fn is_exact_zero(x: &Ball) -> bool {
    x.mid_is_zero() && x.is_exact()
}

/// `γ(a, x)` by `x^a e^{-x} Σ x^k / (a)_{k+1}`.
fn lower_series(a: &Ball, x: &Ball) -> Result<Ball> {
    let wp = a.prec().max(x.prec());
    if is_exact_zero(x) {
        return Ok(Ball::zero(wp));
    }
    let mut term = a.inv();
    let mut sum = term.clone();
    let xf = x.to_f64().abs();
    let af = a.to_f64();
    let eps_rel = -(wp as i64) - 4;
    for k in 1..MAX_TERMS {
        term = &(&term * x) / &a.add_i64(k as i64);
        sum = &sum + &term;
        let r = xf / (af + k as f64 + 1.0);
        if r < 0.5 && term.abs_upper().lt(&sum.abs_lower().mul_2exp(eps_rel)) {
            // ratios x/(a+j) decrease, so the tail is geometric with ratio r
            let rm = x.abs_upper().div(&Mag::from_f64_lower(af + k as f64 + 1.0));
            let tail = term.abs_upper().mul(&rm).div(&Mag::from_u64(1).sub_lower(&rm));
            sum = sum.add_error(&tail);
            return Ok(&sum * &prefactor(a, x));
        }
    }
    Err(Error::NonConvergence("lower incomplete gamma series".into()))
}

/// `Γ(n, x) = (n-1)! e^{-x} Σ_{k<n} x^k/k!` for a positive integer `n`.
fn upper_integer(n: u64, x: &Ball) -> Ball {
    let wp = x.prec();
    let mut term = Ball::one(wp);
    let mut sum = Ball::one(wp);
    for k in 1..n {
        term = (&term * x).div_i64(k as i64);
        sum = &sum + &term;
    }
    let f = Ball::from_biguint(&super::gamma::factorial(n - 1), wp);
    &(&f * &sum) * &el::exp(&x.neg())
}

/// Legendre's continued fraction for `Γ(a, x)`, modified Lentz evaluation.
fn upper_cf(a: &Ball, x: &Ball) -> Result<Ball> {
    let prec = a.prec().max(x.prec());
    let wp = prec + 24;
    let a = &a.clone().with_prec(wp);
    let xm = x.mid().with_prec(wp);
    let mut b = &xm.add_i64(1) - a;
    let mut c = Ball::one(wp).mul_2exp(2 * wp as i64);
    let mut d = b.inv();
    let mut h = d.clone();
    let tol = Mag::pow2(-(prec as i64) - 6);
    let mut small = 0;
    for i in 1..MAX_TERMS as i64 {
        let an = (&Ball::from_i64(i, wp) - a).mul_i64(-i);
        b = b.add_i64(2);
        d = (&(&an * &d) + &b).inv();
        c = &b + &(&an / &c);
        let del = &d * &c;
        h = &h * &del;
        if !h.is_finite() {
            return Err(Error::PrecisionExhausted("incomplete gamma continued fraction".into()));
        }
        let dev = (&del - &Ball::one(wp)).abs_upper();
        if dev.lt(&tol) {
            small += 1;
            if small >= 3 {
                // convergents settle geometrically; 8 times the last change bounds the rest
                let est = h.abs_upper().mul(&dev).mul_2exp(3);
                let v = &prefactor(a, &xm) * &h.add_error(&est);
                // sensitivity to the radius of x: |dΓ(a,x)/dx| = x^{a-1}e^{-x}
                let v = if x.is_exact() {
                    v
                } else {
                    let slope = &prefactor(a, x) / x;
                    v.add_error(&slope.abs_upper().mul(&x.rad()))
                };
                return Ok(v.with_prec(prec));
            }
        } else {
            small = 0;
        }
    }
    Err(Error::NonConvergence("incomplete gamma continued fraction".into()))
}

fn exact_positive_integer(a: &Ball) -> Option<u64> {
    let n = a.exact_integer()?.to_u64()?;
    (n >= 1 && n <= 100_000).then_some(n)
}

/// `γ(a, x)` at the precision of the arguments.
pub fn lower_gamma(a: &Ball, x: &Ball) -> Result<Ball> {
    check_args(a, x)?;
    if is_exact_zero(x) {
        return Ok(Ball::zero(a.prec().max(x.prec())));
    }
    if x.to_f64() < a.to_f64() + 1.0 || !a.is_exact() {
        return lower_series(a, x);
    }
    let g = gamma_real(a)?;
    Ok(&g - &upper_gamma(a, x)?)
}

/// `Γ(a, x)` at the precision of the arguments.
pub fn upper_gamma(a: &Ball, x: &Ball) -> Result<Ball> {
    check_args(a, x)?;
    if is_exact_zero(x) {
        return gamma_real(a);
    }
    if let Some(n) = exact_positive_integer(a) {
        return Ok(upper_integer(n, x));
    }
    if x.to_f64() < a.to_f64() + 1.0 || !a.is_exact() {
        let g = gamma_real(a)?;
        return Ok(&g - &lower_series(a, x)?);
    }
    upper_cf(a, x)
}

pub fn upper_incomplete_gamma(a: &Ball, x: &Ball, ctx: &PrecisionContext) -> Result<Ball> {
    let wp = ctx.working();
    upper_gamma(&a.clone().with_prec(wp), &x.clone().with_prec(wp))
}

pub fn lower_incomplete_gamma(a: &Ball, x: &Ball, ctx: &PrecisionContext) -> Result<Ball> {
    let wp = ctx.working();
    lower_gamma(&a.clone().with_prec(wp), &x.clone().with_prec(wp))
}

/// Error function at the precision of `x`.
pub fn erf(x: &Ball) -> Ball {
    let prec = x.prec();
    if is_exact_zero(x) {
        return Ball::zero(prec);
    }
    if x.is_negative() {
        return erf(&x.neg()).neg();
    }
    let wp = prec + 16;
    let half = Ball::frac(1, 2, wp);
    let x2 = x.clone().with_prec(wp).sqr();
    let xf = x.to_f64();
    let v = if xf * xf < 1.5 || x.contains_zero() {
        // signed series handles balls straddling zero
        let xs = x.clone().with_prec(wp);
        erf_series(&xs)
    } else {
        match upper_cf(&half, &x2) {
            Ok(u) => &Ball::one(wp) - &(&u / &el::sqrt_pi(wp)),
            Err(_) => erf_series(&x.clone().with_prec(wp)),
        }
    };
    v.with_prec(prec)
}

/// `2/√π Σ (-1)^n x^{2n+1} / (n! (2n+1))`.
fn erf_series(x: &Ball) -> Ball {
    let wp = x.prec() + (x.to_f64().powi(2) * 1.5) as u32;
    let x = x.clone().with_prec(wp);
    let x2 = x.sqr();
    let mut p = x.clone();
    let mut sum = x.clone();
    let tol = Mag::pow2(-(wp as i64) - 8);
    let xf2 = x2.abs_upper().to_f64();
    for n in 1..MAX_TERMS as i64 {
        p = (&p * &x2).div_i64(n).neg();
        let t = p.div_i64(2 * n + 1);
        sum = &sum + &t;
        if (n as f64) > xf2 && t.abs_upper().lt(&tol) {
            // alternating with decreasing magnitude from here on
            sum = sum.add_error(&p.abs_upper().mul(&x2.abs_upper()));
            break;
        }
    }
    (&sum * &el::sqrt_pi(wp).inv()).mul_2exp(1)
}

/// Complementary error function at the precision of `x`.
pub fn erfc(x: &Ball) -> Ball {
    let prec = x.prec();
    let xf = x.to_f64();
    if xf < 0.0 {
        return (&Ball::from_i64(2, prec) - &erfc(&x.neg())).with_prec(prec);
    }
    if xf * xf < 1.5 || x.contains_zero() {
        return (&Ball::one(prec) - &erf(x)).with_prec(prec);
    }
    let wp = prec + 16;
    let half = Ball::frac(1, 2, wp);
    let x2 = x.clone().with_prec(wp).sqr();
    match upper_cf(&half, &x2) {
        Ok(u) => (&u / &el::sqrt_pi(wp)).with_prec(prec),
        Err(_) => (&Ball::one(prec) - &erf(x)).with_prec(prec),
    }
}

pub fn erf_fn(x: &Ball, ctx: &PrecisionContext) -> Ball {
    erf(&x.clone().with_prec(ctx.working()))
}

pub fn erfc_fn(x: &Ball, ctx: &PrecisionContext) -> Ball {
    erfc(&x.clone().with_prec(ctx.working()))
}
