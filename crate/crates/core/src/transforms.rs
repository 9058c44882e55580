//! The moment generating function `u(t) = ∫ e^(tx) ρ(x) dx` and the Stieltjes
//! transform `W(t) = ∫ ρ(x)/(t - x) dx`, with the linear differential
//! equations they satisfy.
//!
//! `u` is summed from the even moment series; its fourth-order equation is
//!
//! ```text
//! 2t u'''' - (3t² - 8) u''' + t(t² - 4N - 13) u'' + ((3N+2)t² - 8N - 8) u' + (2N² + N) t u = 0.
//! ```
//!
//! `W` is integrated directly. With `A_N[t] = t² ∂³ + t(3t² - 3N + 4) ∂² + (2t² - 2N + 1)(t² - N + 2) ∂`,
//!
//! ```text
//! A_N[t] W = (1 + 4N - 2t²) M₀ - 6 M₂.
//! ```
//!
//! Composing the `u` equation with further operators gives a seventh-order
//! factorisation; it is a corollary and is not checked separately.

use crate::error::{Error, Result};
use crate::moments::quadrature::TailEnvelope;
use crate::moments::{moment_real_int, moment_sequence_recurrence};
use crate::numerics::context::refine;
use crate::numerics::gamma::{factorial, gamma_real};
use crate::numerics::quadrature::{integrate, QuadOptions};
use crate::numerics::{elementary as el, Ball, CBall, Mag, PrecisionContext};
use crate::density::rho_abs;

/// A transform and its first derivatives at `t`.
#[derive(Debug, Clone)]
pub struct TransformValue {
    pub t: CBall,
    pub value: CBall,
    /// `f'(t), f''(t), …` up to the requested order.
    pub derivs: Vec<CBall>,
}

impl TransformValue {
    /// Largest radius over the value and derivatives.
    pub fn err(&self) -> Mag {
        self.derivs.iter().fold(self.value.rad(), |m, d| m.max(&d.rad()))
    }

    /// `f^(k)(t)`, with `k = 0` the value itself.
    pub fn deriv(&self, k: usize) -> Option<&CBall> {
        if k == 0 {
            Some(&self.value)
        } else {
            self.derivs.get(k - 1)
        }
    }
}

fn check_n(n: u32) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain("transforms need N >= 2".into()));
    }
    Ok(())
}

/// Upper bound for `M_2p`: the density is at most
/// `(e^(-x²) Σ_{j≤N-2} x^(2j)/j! + K |x|^(N-1) e^(-x²/2)) / √(2π)`.
fn moment_upper_bound(n: u32, p: u64, prec: u32) -> Result<Ball> {
    let ni = n as i64;
    let pi = p as i64;
    let mut first = Ball::zero(prec);
    for j in 0..=(ni - 2) {
        let g = gamma_real(&Ball::frac(2 * (pi + j) + 1, 2, prec))?;
        first = &first + &(&g / &Ball::from_biguint(&factorial(j as u64), prec));
    }
    let k = &(&el::sqrt2(prec).pow_i(ni - 3) * &gamma_real(&Ball::frac(ni - 1, 2, prec))?)
        / &Ball::from_biguint(&factorial((ni - 2) as u64), prec);
    let second = &(&k * &el::sqrt2(prec).pow_u(2 * p + n as u64)) * &gamma_real(&Ball::frac(2 * pi + ni, 2, prec))?;
    Ok(&(&first + &second) * &el::inv_sqrt_2pi(prec))
}

/// Bound on `Σ_{p>P} M_2p |t|^(2p-j) / (2p-j)!`, if the term ratio has dropped below 1/2.
fn mgf_tail(n: u32, t_abs: &Ball, j: u64, big_p: u64, prec: u32) -> Result<Option<Mag>> {
    let p = big_p + 1;
    let q = 2 * p - j;
    // M_(2p+2)/M_2p ≤ 2(p + N) for the envelope, so the term ratio is at most
    // 2(p+N)t²/((q+2)(q+1)), which decreases in q = 2p - j
    let ratio = (&t_abs.sqr() * &Ball::from_i64(2 * (p + n as u64) as i64, prec)).div_i64(((q + 2) * (q + 1)) as i64);
    if q < 2 || !ratio.mul_2exp(1).add_i64(-1).is_negative() {
        return Ok(None);
    }
    let term = &(&moment_upper_bound(n, p, prec)? * &t_abs.pow_u(q)) / &Ball::from_biguint(&factorial(q), prec);
    Ok(Some(term.abs_upper().mul_2exp(1)))
}

fn mgf_at(n: u32, t: &Ball, k: usize, target: u32, wp: u32) -> Result<Vec<Ball>> {
    let t = t.clone().with_prec(wp);
    let t_abs = t.abs();
    let tf = t_abs.to_f64();
    let tol = -(target as f64) - 8.0;
    // truncation point: first P with a closed tail below tolerance
    let mut big_p = ((2.0 * tf * tf) as u64 + k as u64 + n as u64 + 4).max(8);
    let ctx = PrecisionContext::with_guard(wp, 32)?;
    let m = loop {
        let mut ok = true;
        let mut tails = Vec::with_capacity(k + 1);
        for j in 0..=k as u64 {
            match mgf_tail(n, &t_abs, j, big_p, wp)? {
                Some(tail) if tail.log2() < tol => tails.push(tail),
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            break tails;
        }
        big_p += big_p / 4 + 4;
        if big_p > 1 << 16 {
            return Err(Error::PrecisionExhausted(format!("moment series for |t| = {tf} does not close")));
        }
    };
    let seq = moment_sequence_recurrence(
        n,
        big_p as u32,
        &moment_real_int(n, 0, &ctx)?,
        &moment_real_int(n, 1, &ctx)?,
    )?;
    let mut out = Vec::with_capacity(k + 1);
    for (j, tail) in m.iter().enumerate() {
        // Σ_p M_2p t^(2p-j)/(2p-j)! with 2p ≥ j
        let mut acc = Ball::zero(wp);
        let mut pw = Ball::one(wp);
        let mut fact = Ball::one(wp);
        let start = j.div_ceil(2);
        let first = 2 * start - j;
        for _ in 0..first {
            pw = &pw * &t;
        }
        for p in start..=big_p as usize {
            let q = 2 * p - j;
            if p > start {
                pw = &(&pw * &t) * &t;
                fact = fact.mul_i64(((q - 1) * q) as i64);
            }
            acc = &acc + &(&(&seq[p].value.re * &pw) / &fact);
        }
        out.push(acc.add_error(tail));
    }
    Ok(out)
}

/// `u(t)` and `u'(t), …, u^(k)(t)` for real `t`.
pub fn mgf_value(n: u32, t: &Ball, k_derivs: usize, ctx: &PrecisionContext) -> Result<TransformValue> {
    check_n(n)?;
    let target = ctx.target_bits;
    let v = refine(
        ctx,
        |wp| mgf_at(n, t, k_derivs, target, wp),
        |v| {
            let scale = v[0].abs_upper().mul_2exp(-(target as i64));
            v.iter().all(|d| d.rad().le(&scale))
        },
    )?;
    let mut it = v.into_iter().map(CBall::from_real);
    Ok(TransformValue {
        t: CBall::from_real(t.clone()),
        value: it.next().unwrap(),
        derivs: it.collect(),
    })
}

/// `D_N[t] u` at real `t`; should vanish.
pub fn mgf_ode_residual(n: u32, t: &Ball, ctx: &PrecisionContext) -> Result<Ball> {
    let v = mgf_value(n, t, 4, ctx)?;
    let d: Vec<&Ball> = (0..=4).map(|k| &v.deriv(k).unwrap().re).collect();
    let wp = ctx.working();
    let t = t.clone().with_prec(wp);
    let ni = n as i64;
    let t2 = t.sqr();
    let c4 = t.mul_2exp(1);
    let c3 = t2.mul_i64(3).add_i64(-8).neg();
    let c2 = &t * &t2.add_i64(-4 * ni - 13);
    let c1 = t2.mul_i64(3 * ni + 2).add_i64(-8 * ni - 8);
    let c0 = t.mul_i64(2 * ni * ni + ni);
    let terms = [(&c0, d[0]), (&c1, d[1]), (&c2, d[2]), (&c3, d[3]), (&c4, d[4])];
    Ok(terms.iter().fold(Ball::zero(wp), |acc, (c, v)| &acc + &(*c * *v)))
}

/// `W(t)` and `W'(t), …, W^(k)(t)` for `Im t ≠ 0`.
///
/// The density is positive on all of ℝ, so the integral is singular at every
/// real `t` and real arguments are rejected.
pub fn stieltjes_value(n: u32, t: &CBall, k_derivs: usize, ctx: &PrecisionContext) -> Result<TransformValue> {
    check_n(n)?;
    let wp = ctx.working();
    let t = t.clone().with_prec(wp);
    if t.im.contains_zero() {
        return Err(Error::Domain("Stieltjes transform needs Im t != 0 (the density has full support)".into()));
    }
    let y = t.im.abs();
    let yf = y.to_f64();
    let dim = k_derivs + 1;
    // |kernel^(k)| ≤ k!/|Im t|^(k+1) everywhere on ℝ
    let kernel_log2 = (1..=k_derivs).map(|v| (v as f64).log2()).sum::<f64>() - (dim as f64) * yf.log2();
    let env = TailEnvelope::new(n, 0.0);
    let x_cut = env.cutoff(ctx.target_bits as f64 + 16.0 + kernel_log2.max(0.0));
    let x_hi = Ball::from_f64(x_cut, wp);
    let kernel_max = &Ball::from_biguint(&factorial(k_derivs as u64), wp) / &y.pow_u(dim as u64);
    // both half-lines, mass scaled by 1/√(2π)
    let tail = env
        .bound(&x_hi)?
        .mul(&el::inv_sqrt_2pi(wp).abs_upper())
        .mul(&kernel_max.abs_upper())
        .mul_2exp(1);

    let f = |x: &Ball| -> Result<Vec<CBall>> {
        let r = rho_abs(n, x)?;
        let mut out = Vec::with_capacity(dim);
        // (-1)^k k! [(t-x)^-(k+1) + (t+x)^-(k+1)]
        let a = t.sub(&CBall::from_real(x.clone())).inv();
        let b = t.add(&CBall::from_real(x.clone())).inv();
        let (mut pa, mut pb) = (a.clone(), b.clone());
        let mut c = Ball::one(wp);
        for k in 0..dim {
            if k > 0 {
                pa = pa.mul(&a);
                pb = pb.mul(&b);
                c = c.mul_i64(-(k as i64));
            }
            out.push(pa.add(&pb).mul_real(&(&c * &r)));
        }
        Ok(out)
    };
    let mut opts = QuadOptions::new(wp, ctx.target_bits + 8);
    opts.panel_width = yf.clamp(1.0 / 64.0, 1.0);
    let v = integrate(&f, &Ball::zero(wp), &x_hi, dim, &opts)?;
    let mut it = v.into_iter().map(|c| c.add_error(&tail));
    Ok(TransformValue {
        t,
        value: it.next().unwrap(),
        derivs: it.collect(),
    })
}

/// `A_N[t] W - ((1 + 4N - 2t²) M₀ - 6 M₂)`; should vanish.
pub fn stieltjes_ode_residual(n: u32, t: &CBall, ctx: &PrecisionContext) -> Result<CBall> {
    let v = stieltjes_value(n, t, 3, ctx)?;
    let wp = ctx.working();
    let t = t.clone().with_prec(wp);
    let ni = n as i64;
    let t2 = t.sqr();
    let c3 = t2.clone();
    let c2 = t.mul(&t2.mul_i64(3).add_i64(4 - 3 * ni));
    let c1 = t2.mul_i64(2).add_i64(1 - 2 * ni).mul(&t2.add_i64(2 - ni));
    let lhs = c3.mul(&v.derivs[2]).add(&c2.mul(&v.derivs[1])).add(&c1.mul(&v.derivs[0]));
    let m0 = moment_real_int(n, 0, ctx)?.value;
    let m2 = moment_real_int(n, 1, ctx)?.value;
    let rhs = t2.mul_i64(-2).add_i64(1 + 4 * ni).mul(&m0).sub(&m2.mul_i64(6));
    Ok(lhs.sub(&rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::m0_exact;

    fn ctx(b: u32) -> PrecisionContext {
        PrecisionContext::new(b).unwrap()
    }

    fn dec(s: &str, prec: u32) -> Ball {
        crate::numerics::decimal::parse_decimal(s, prec).unwrap()
    }

    #[test]
    fn mgf_at_zero_gives_moments() {
        let c = ctx(128);
        for n in [2u32, 5, 8] {
            let v = mgf_value(n, &Ball::zero(256), 2, &c).unwrap();
            assert!(v.value.re.overlaps(&m0_exact(n).unwrap().to_ball(256)));
            assert!(v.derivs[0].contains_zero());
            let m2 = moment_real_int(n, 1, &c).unwrap();
            assert!(v.derivs[1].overlaps(&m2.value));
            assert!(v.err().log2() < -120.0);
        }
    }

    #[test]
    fn mgf_even_and_ode() {
        let c = ctx(128);
        let t = dec("0.7", 256);
        let a = mgf_value(5, &t, 1, &c).unwrap();
        let b = mgf_value(5, &t.neg(), 1, &c).unwrap();
        assert!(a.value.overlaps(&b.value));
        assert!(a.derivs[0].overlaps(&b.derivs[0].neg()));
        assert!(mgf_ode_residual(6, &t, &ctx(192)).unwrap().contains_zero());
        let r = mgf_ode_residual(3, &dec("2.5", 256), &c).unwrap();
        assert!(r.contains_zero());
        assert!(r.abs_upper().log2() < -90.0);
        assert!(mgf_ode_residual(4, &Ball::zero(128), &c).unwrap().contains_zero());
    }

    #[test]
    fn mgf_against_quadrature() {
        // u(1) = ∫ cosh(x) ρ(x) dx for N = 3
        let c = ctx(64);
        let u = mgf_value(3, &Ball::one(128), 0, &c).unwrap();
        let opts = QuadOptions::new(128, 80);
        let f = |x: &Ball| -> Result<Vec<Ball>> { Ok(vec![&el::sinh_cosh(x).1 * &rho_abs(3, x)?]) };
        let q = integrate(&f, &Ball::zero(128), &Ball::from_i64(14, 128), 1, &opts).unwrap();
        let d = (&q[0].mul_2exp(1) - &u.value.re).abs_upper().log2();
        assert!(d < -60.0, "{d}");
    }

    #[test]
    fn stieltjes_symmetries() {
        let c = ctx(64);
        let w = stieltjes_value(4, &CBall::from_f64(0.0, 1.5, 128), 0, &c).unwrap();
        assert!(w.value.re.contains_zero());
        let t = CBall::from_f64(2.0, 1.0, 128);
        let a = stieltjes_value(4, &t, 1, &c).unwrap();
        let b = stieltjes_value(4, &t.conj(), 1, &c).unwrap();
        assert!(a.value.overlaps(&b.value.conj()));
        let m = stieltjes_value(4, &t.neg(), 0, &c).unwrap();
        assert!(a.value.overlaps(&m.value.neg()));
        assert!(stieltjes_value(4, &CBall::from_f64(3.0, 0.0, 128), 0, &c).is_err());
    }

    #[test]
    fn stieltjes_large_t() {
        let c = ctx(64);
        let n = 5;
        let t = CBall::from_f64(0.0, 1.0e4, 128);
        let w = stieltjes_value(n, &t, 0, &c).unwrap();
        let m0 = CBall::from_real(m0_exact(n).unwrap().to_ball(128));
        let m2 = moment_real_int(n, 1, &c).unwrap().value;
        let d = t.mul(&w.value).sub(&m0).abs_upper();
        assert!(d.le(&m2.div_real(&Ball::from_i64(10_000, 128)).abs_upper()));
    }

    #[test]
    fn stieltjes_ode() {
        for (n, t) in [(5u32, CBall::from_f64(0.0, 2.0, 192)), (3, CBall::from_f64(1.0, 1.0, 192))] {
            let r = stieltjes_ode_residual(n, &t, &ctx(128)).unwrap();
            assert!(r.contains_zero(), "N={n}");
            assert!(r.abs_upper().log2() < -100.0);
        }
    }
}
