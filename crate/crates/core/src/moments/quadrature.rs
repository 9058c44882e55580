//! Moments by direct integration of the densities.
//!
//! Real moments: `2 ∫₀^∞ x^(2p) ρ(x) dx` split at `x₀ = 1/2` and `X`. On
//! `[0, x₀]` the exact Taylor series of `ρ` is integrated term by term, so
//! fractional powers cause no trouble at the origin; `[x₀, X]` uses adaptive
//! Gauss–Legendre; beyond `X` the Gaussian envelope of `ρ` bounds the tail.

use crate::density::{rho_abs, rho_taylor_coefficients};
use crate::error::{Error, Result};
use crate::numerics::gamma::{double_factorial, factorial, gamma_real};
use crate::numerics::incgamma::erfc;
use crate::numerics::quadrature::{integrate, QuadOptions};
use crate::numerics::{elementary as el, Ball, CBall, Mag, PrecisionContext};
use crate::value::{Method, MomentValue};
use num_bigint::BigInt;
use num_rational::BigRational as Q;
use num_traits::{Signed, ToPrimitive, Zero};

fn ln_fact(k: f64) -> f64 {
    (1..=k as u64).map(|v| (v as f64).ln()).sum()
}

/// `x^(2p)` for `x > 0`.
fn pow_2p(x: &Ball, p: &Ball) -> Ball {
    match p.mul_2exp(1).exact_integer().and_then(|v| v.to_u64()) {
        Some(k) => x.pow_u(k),
        None => el::exp(&(&el::ln(x) * &p.mul_2exp(1))),
    }
}

/// `∫₀^(1/2) x^(2p) √(2π) ρ(x) dx` from the Taylor coefficients.
fn head(n: u32, p: &Ball, coeffs: &[Q], wp: u32) -> Ball {
    let x0 = Ball::frac(1, 2, wp);
    let x0_2p = pow_2p(&x0, p);
    let two_p1 = p.mul_2exp(1).add_i64(1);
    let mut acc = Ball::zero(wp);
    for (k, d) in coeffs.iter().enumerate() {
        let pw = x0_2p.mul_2exp(-(2 * k as i64 + 1));
        let den = two_p1.add_i64(2 * k as i64);
        acc = &acc + &(&(&Ball::from_rational(d, wp) * &pw) / &den);
    }
    // |d_k| ≤ 2^k/k! + 1/(k-N+1)!, and the bounds drop by half per step from here
    let k = coeffs.len() as f64;
    let bound = (k * 2f64.ln() - ln_fact(k)).exp() + (-ln_fact(k - n as f64 + 1.0)).exp();
    let tail = Mag::from_f64(2.0 * bound)
        .mul_2exp(-2 * coeffs.len() as i64)
        .mul(&(&x0_2p.mul_2exp(-1) / &two_p1).abs_upper());
    acc.add_error(&tail)
}

fn head_terms(n: u32, wp: u32) -> usize {
    let mut k = n as usize + 2;
    loop {
        let kf = k as f64;
        let b = ((kf * 2f64.ln() - ln_fact(kf)).exp() + (-ln_fact(kf - n as f64 + 1.0)).exp()).log2() - 2.0 * kf;
        if b < -(wp as f64) - 10.0 {
            return k;
        }
        k += 1;
    }
}

/// Envelope `√(2π) ρ(x) x^(2P) ≤ A x^m₁ e^(-x²) + B x^m₂ e^(-x²/2)` integrated
/// over `[X, ∞)`, valid once `X² ≥ m₁` and `X² ≥ 2m₂` and `X² ≥ N`.
pub(crate) struct TailEnvelope {
    n: u32,
    m1: f64,
    m2: f64,
}

impl TailEnvelope {
    pub(crate) fn new(n: u32, p_max: f64) -> Self {
        let pp = p_max.max(0.0).ceil();
        TailEnvelope {
            n,
            m1: 2.0 * n as f64 - 4.0 + 2.0 * pp,
            m2: n as f64 - 1.0 + 2.0 * pp,
        }
    }

    fn valid_from(&self) -> f64 {
        self.m1.max(2.0 * self.m2).max(self.n as f64).max(1.0).sqrt()
    }

    /// Smallest integer `X` in the valid range with the tail below `2^-bits`.
    pub(crate) fn cutoff(&self, bits: f64) -> f64 {
        let mut x = self.valid_from().max(1.0).ceil();
        while self.log2_estimate(x) > -bits {
            x += 1.0;
        }
        x
    }

    fn log2_estimate(&self, x: f64) -> f64 {
        let n = self.n as f64;
        let lf = ln_fact(n - 2.0);
        let a = (n - 1.0).ln() - lf + (self.m1 - 1.0) * x.ln() - x * x;
        let lgam = statrs_lgamma((n - 1.0) / 2.0);
        let b = (n - 3.0) / 2.0 * 2f64.ln() + lgam - lf + 2f64.ln() + (self.m2 - 1.0) * x.ln() - x * x / 2.0;
        a.max(b) / 2f64.ln() + 1.0
    }

    /// Upper bound on `∫_X^∞ x^(2P) √(2π) ρ(x) dx`.
    pub(crate) fn bound(&self, x: &Ball) -> Result<Mag> {
        let prec = x.prec();
        let n = self.n as i64;
        let fact = Ball::from_biguint(&factorial((n - 2) as u64), prec);
        let xm = |m: f64| x.pow_u(m as u64 - 1);
        let a = &(&Ball::from_i64(n - 1, prec) / &fact) * &(&xm(self.m1.max(1.0)) * &el::exp(&x.sqr().neg()));
        let g = gamma_real(&Ball::frac(n - 1, 2, prec))?;
        let k = el::sqrt2(prec).pow_i(n - 3);
        let b = &(&(&k * &g) / &fact).mul_2exp(1) * &(&xm(self.m2.max(1.0)) * &el::exp(&x.sqr().mul_2exp(-1).neg()));
        Ok((&a + &b).abs_upper())
    }
}

/// `ln Γ(x)` in f64 for cutoff selection only.
fn statrs_lgamma(x: f64) -> f64 {
    // Stirling with two correction terms; only used to pick a cutoff
    if x < 8.0 {
        let mut v = 0.0;
        let mut y = x;
        while y < 8.0 {
            v -= y.ln();
            y += 1.0;
        }
        return v + statrs_lgamma(y);
    }
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x) - 1.0 / (360.0 * x.powi(3))
}

/// Real moments for several orders, sharing density evaluations.
pub fn moment_real_quadrature_multi(n: u32, ps: &[Ball], ctx: &PrecisionContext) -> Result<Vec<MomentValue>> {
    if n < 2 {
        return Err(Error::Domain("density quadrature needs N >= 2".into()));
    }
    for p in ps {
        if !p.add(&Ball::frac(1, 2, p.prec())).is_positive() {
            return Err(Error::Domain("moments need p > -1/2".into()));
        }
    }
    let wp = ctx.working();
    let ps: Vec<Ball> = ps.iter().map(|p| p.clone().with_prec(wp)).collect();
    let coeffs = rho_taylor_coefficients(n, head_terms(n, wp))?;
    let heads: Vec<Ball> = ps.iter().map(|p| head(n, p, &coeffs, wp)).collect();

    let p_max = ps.iter().map(|p| p.to_f64()).fold(f64::MIN, f64::max);
    let env = TailEnvelope::new(n, p_max);
    let x_cut = env.cutoff(ctx.target_bits as f64 + 16.0);
    let x_hi = Ball::from_f64(x_cut, wp);
    let tail = env.bound(&x_hi)?;

    let f = |x: &Ball| -> Result<Vec<Ball>> {
        let r = rho_abs(n, x)?;
        Ok(ps.iter().map(|p| &pow_2p(x, p) * &r).collect())
    };
    let opts = QuadOptions::new(wp, ctx.target_bits + 8);
    let body: Vec<Ball> = integrate(&f, &Ball::frac(1, 2, wp), &x_hi, ps.len(), &opts)?;
    let inv = el::inv_sqrt_2pi(wp);
    let tail = tail.mul(&inv.abs_upper());
    Ok(heads
        .iter()
        .zip(body)
        .map(|(h, b)| {
            let v = (&(h * &inv) + &b).add_error(&tail).mul_2exp(1);
            MomentValue::new(CBall::from_real(v), Method::Quadrature)
        })
        .collect())
}

/// `M^r_{2p,N}` for real `p > -1/2` by quadrature of the density.
pub fn moment_real_quadrature(n: u32, p: &Ball, ctx: &PrecisionContext) -> Result<MomentValue> {
    Ok(moment_real_quadrature_multi(n, std::slice::from_ref(p), ctx)?.pop().unwrap())
}

/// `∫ (x+iy)^(2p) (x²+y²)^j e^(-x²) dx / √π` as a polynomial in `y` (ascending).
fn x_moment_poly(p: u32, j: u32) -> Vec<Q> {
    let binom = |n: u32, k: u32| -> BigInt { num_integer::binomial(BigInt::from(n), BigInt::from(k)) };
    let mut out = vec![Q::zero(); (2 * p + 2 * j + 1) as usize];
    for m in (0..=2 * p).step_by(2) {
        // (iy)^(2p-m) = (-1)^(p-m/2) y^(2p-m)
        let sign: i64 = if (p - m / 2) % 2 == 0 { 1 } else { -1 };
        for l in 0..=j {
            let r = m / 2 + l;
            // ∫ x^(2r) e^(-x²) dx = √π (2r-1)!!/2^r
            let gauss = double_factorial(2 * r as i64 - 1).unwrap() / Q::from_integer(BigInt::from(2).pow(r));
            let c = Q::from_integer(binom(2 * p, m) * binom(j, l) * sign) * gauss;
            out[(2 * p - m + 2 * (j - l)) as usize] += c;
        }
    }
    out
}

/// `M^c_{2p,N}`: the `x`-integral is done exactly, the `y`-integral by quadrature.
pub fn moment_complex_quadrature(n: u32, p: u32, ctx: &PrecisionContext) -> Result<MomentValue> {
    if n < 2 {
        return Err(Error::Domain("density quadrature needs N >= 2".into()));
    }
    let wp = ctx.working();
    // Σ_{j ≤ N-2} (1/j!) ∫ (x+iy)^(2p) (x²+y²)^j e^(-x²) dx / √π
    let mut poly = vec![Q::zero(); (2 * p + 2 * (n - 2) + 1) as usize];
    for j in 0..=(n - 2) {
        let inv_fact = Q::new(1.into(), factorial(j as u64).into());
        for (k, c) in x_moment_poly(p, j).into_iter().enumerate() {
            poly[k] += c * &inv_fact;
        }
    }
    let coeffs: Vec<Ball> = poly.iter().map(|c| Ball::from_rational(c, wp)).collect();
    let eval = |y: &Ball| coeffs.iter().rev().fold(Ball::zero(wp), |acc, c| &(&acc * y) + c);
    // M = 2√2 ∫₀^∞ y erfc(√2 y) e^(y²) Q(y) dy
    let f = |y: &Ball| -> Result<Vec<Ball>> {
        let w = &(&(y * &erfc(&(y * &el::sqrt2(wp)))) * &el::exp(&y.sqr())) * &eval(y);
        Ok(vec![w])
    };
    // y erfc(√2 y) e^(y²) ≤ e^(-y²)/√(2π) and |Q(y)| ≤ A y^(2d) for y ≥ 1
    let d = (poly.len() - 1) as f64;
    let a_sum: f64 = poly.iter().map(|c| c.abs().to_f64().unwrap_or(f64::MAX)).sum();
    let mut y_cut = d.sqrt().max(1.0).ceil();
    while a_sum.log2() + (d - 1.0) * y_cut.log2() - y_cut * y_cut / 2f64.ln() > -(ctx.target_bits as f64) - 16.0 {
        y_cut += 1.0;
    }
    let y_hi = Ball::from_f64(y_cut, wp);
    let a_ball: Ball = poly.iter().fold(Ball::zero(wp), |acc, c| &acc + &Ball::from_rational(&c.abs(), wp));
    let tail = (&(&a_ball * &y_hi.pow_u((d as u64).max(1) - 1)) * &el::exp(&y_hi.sqr().neg())).abs_upper();
    let tail = tail.mul(&el::inv_sqrt_2pi(wp).abs_upper());
    let opts = QuadOptions::new(wp, ctx.target_bits + 8);
    let body = integrate(&f, &Ball::zero(wp), &y_hi, 1, &opts)?.pop().unwrap();
    let v = (&body.add_error(&tail) * &el::sqrt2(wp)).mul_2exp(1);
    Ok(MomentValue::new(CBall::from_real(v), Method::Quadrature))
}

#[cfg(test)]
mod tests {
    use super::super::exact::m0_exact;
    use super::super::hyper::{moment_complex_eigs, moment_real, moment_real_halfint};
    use super::*;

    fn ctx(b: u32) -> PrecisionContext {
        PrecisionContext::new(b).unwrap()
    }

    #[test]
    fn zeroth_moment_matches_exact_sum() {
        let c = ctx(64);
        for n in 2..=8 {
            let v = moment_real_quadrature(n, &Ball::zero(128), &c).unwrap();
            let e = m0_exact(n).unwrap().to_ball(128);
            assert!(v.value.re.overlaps(&e), "N={n}");
            assert!(v.value.re.rel_accuracy_bits() > 60.0);
        }
    }

    #[test]
    fn fractional_and_integer_orders() {
        let c = ctx(96);
        let ps = [Ball::frac(-1, 4, 192), Ball::frac(1, 3, 192), Ball::from_i64(1, 192), Ball::from_i64(2, 192)];
        let q = moment_real_quadrature_multi(4, &ps, &c).unwrap();
        for (p, v) in ps.iter().zip(&q) {
            let h = moment_real(4, &CBall::from_real(p.clone()), &c).unwrap();
            assert!(v.value.overlaps(&h.value), "p={}", p.to_f64());
        }
    }

    #[test]
    fn half_integer_limit_matches_quadrature() {
        let c = ctx(96);
        for (n, q) in [(3u32, 0u32), (5, 1)] {
            let h = moment_real_halfint(n, q, &c).unwrap();
            let v = moment_real_quadrature(n, &Ball::frac(2 * q as i64 + 1, 2, 192), &c).unwrap();
            let d = h.value.re.sub(&v.value.re).abs_upper().log2();
            assert!(d < -50.0, "N={n} q={q}: {d}");
        }
    }

    #[test]
    fn complex_moments_by_quadrature() {
        let c = ctx(64);
        for (n, p) in [(4u32, 1u32), (5, 2), (3, 3)] {
            let q = moment_complex_quadrature(n, p, &c).unwrap();
            let h = moment_complex_eigs(n, p, &c).unwrap();
            assert!(q.value.overlaps(&h.value), "N={n} p={p}");
        }
    }
}
