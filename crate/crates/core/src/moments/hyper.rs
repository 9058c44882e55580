//! Closed-form moment evaluations through hypergeometric functions.

use super::exact::{recognize_sqrt2, verify_candidate, Sqrt2Rational};
use crate::error::{Error, Result};
use crate::numerics::context::refine;
use crate::numerics::gamma::gamma_ratio;
use crate::numerics::hyp::{hyp_at, HypParams};
use crate::numerics::{elementary as el, Ball, CBall, PrecisionContext};
use crate::value::{Method, MomentValue};
use num_traits::ToPrimitive;

fn c_frac(n: i64, d: i64, prec: u32) -> CBall {
    CBall::from_real(Ball::frac(n, d, prec))
}

fn c_int(n: i64, prec: u32) -> CBall {
    CBall::from_i64(n, prec)
}

/// `p = q + 1/2` with `q ≥ 0` an integer, exactly.
pub fn half_integer_order(p: &CBall) -> Option<u32> {
    if !p.is_real() {
        return None;
    }
    let twice = p.re.mul_2exp(1).exact_integer()?.to_i64()?;
    (twice >= 1 && twice % 2 == 1).then(|| ((twice - 1) / 2) as u32)
}

fn check_order(p: &CBall) -> Result<()> {
    let shifted = p.re.add(&Ball::frac(1, 2, p.prec()));
    if !shifted.is_positive() {
        return Err(Error::Domain("moments need Re(p) > -1/2".into()));
    }
    if let Some(q) = half_integer_order(p) {
        return Err(Error::IndeterminateParameters(format!(
            "p = {q} + 1/2 makes the 3F2 series 0/0; use the half-integer limit"
        )));
    }
    Ok(())
}

fn pow2(p: &CBall) -> CBall {
    let prec = p.prec();
    match p.re.exact_integer().and_then(|v| v.to_i64()) {
        Some(k) if p.is_real() => CBall::from_real(Ball::one(prec).mul_2exp(k)),
        _ => p.mul_real(&el::ln2(prec)).exp(),
    }
}

/// `(1/√(2π)) (2/(2p+1)) Γ(N+p-1/2)/(N-2)! ₃F₂(1, -1/2-p, 1/2+p; 1/2, 3/2-N-p; 1/2)`.
fn hyp_part(n: u32, p: &CBall, wp: u32) -> Result<CBall> {
    let ni = n as i64;
    let numer = vec![c_int(1, wp), c_frac(-1, 2, wp).sub(p), c_frac(1, 2, wp).add(p)];
    let denom = vec![c_frac(1, 2, wp), c_frac(2 * ni - 3, 2, wp).neg().sub(p)];
    let f = hyp_at(&HypParams::new(numer, denom, c_frac(1, 2, wp)), wp)?;
    let g = gamma_ratio(&p.add(&c_frac(2 * ni - 1, 2, wp)), &c_int(ni - 1, wp))?;
    let pref = c_int(2, wp).div(&p.mul_i64(2).add_i64(1)).mul_real(&el::inv_sqrt_2pi(wp));
    Ok(pref.mul(&g).mul(&f))
}

/// `2^p Γ(p + N/2)/Γ(N/2)`.
fn parity_part(n: u32, p: &CBall, wp: u32) -> Result<CBall> {
    let half_n = c_frac(n as i64, 2, wp);
    Ok(pow2(p).mul(&gamma_ratio(&p.add(&half_n), &half_n)?))
}

/// Drop an imaginary part known to vanish, folding its enclosure into the error.
fn fold_real(v: CBall) -> CBall {
    let im = v.im.abs_upper();
    CBall::from_real(v.re.add_error(&im))
}

fn real_moment_at(n: u32, p: &CBall, wp: u32) -> Result<CBall> {
    let p = p.clone().with_prec(wp);
    if n == 1 {
        // a 1×1 matrix is a standard Gaussian
        return parity_part(1, &p, wp);
    }
    let h = hyp_part(n, &p, wp)?;
    if n % 2 == 1 {
        Ok(h.add(&parity_part(n, &p, wp)?))
    } else {
        Ok(h)
    }
}

/// `M^r_{2p,N}` for complex `p` with `Re p > -1/2`, `p ∉ 1/2 + ℕ`.
pub fn moment_real(n: u32, p: &CBall, ctx: &PrecisionContext) -> Result<MomentValue> {
    if n < 1 {
        return Err(Error::Domain("N must be at least 1".into()));
    }
    check_order(p)?;
    let v = refine(ctx, |wp| real_moment_at(n, p, wp), |v| v.rel_ok(ctx.target_bits))?;
    let v = if p.is_real() { fold_real(v) } else { v };
    Ok(MomentValue::new(v, Method::Hypergeometric))
}

/// `M^r_{2p,N}` for any admissible `p`; half-integer orders go through the limit.
pub fn moment_real_any(n: u32, p: &CBall, ctx: &PrecisionContext) -> Result<MomentValue> {
    match half_integer_order(p) {
        Some(q) => moment_real_halfint(n, q, ctx),
        None => moment_real(n, p, ctx),
    }
}

/// `M^r_{2p,N}` for a nonnegative integer `p`.
pub fn moment_real_int(n: u32, p: u32, ctx: &PrecisionContext) -> Result<MomentValue> {
    moment_real(n, &CBall::from_i64(p as i64, ctx.working()), ctx)
}

/// `M^c_{2p,N}`, the even moment over complex eigenvalues.
pub fn moment_complex_eigs(n: u32, p: u32, ctx: &PrecisionContext) -> Result<MomentValue> {
    if n < 1 || p < 1 {
        return Err(Error::Domain("complex moments need N >= 1 and p >= 1".into()));
    }
    if n == 1 {
        return Ok(MomentValue::new(CBall::zero(ctx.working()), Method::Hypergeometric));
    }
    let v = refine(
        ctx,
        |wp| {
            let pc = CBall::from_i64(p as i64, wp);
            let h = hyp_part(n, &pc, wp)?.neg();
            if n % 2 == 0 {
                Ok(h.add(&parity_part(n, &pc, wp)?))
            } else {
                Ok(h)
            }
        },
        |v| v.rel_ok(ctx.target_bits),
    )?;
    Ok(MomentValue::new(v, Method::Hypergeometric))
}

/// `M^r_{2q+1,N}` as the limit `p → q + 1/2`, by Richardson extrapolation of
/// symmetric averages at `ε, ε/2, ε/4` with `ε = 2^(-target/3)`.
pub fn moment_real_halfint(n: u32, q: u32, ctx: &PrecisionContext) -> Result<MomentValue> {
    if n < 1 {
        return Err(Error::Domain("N must be at least 1".into()));
    }
    let bits = ctx.target_bits;
    let e = (bits / 3) as i64;
    let center = |wp: u32| Ball::frac(2 * q as i64 + 1, 2, wp);
    let averaged = |k: i64, wp: u32| -> Result<CBall> {
        let eps = Ball::one(wp).mul_2exp(-e - k);
        let up = real_moment_at(n, &CBall::from_real(&center(wp) + &eps), wp)?;
        let dn = real_moment_at(n, &CBall::from_real(&center(wp) - &eps), wp)?;
        Ok(up.add(&dn).mul_2exp(-1))
    };
    let (r2, defect) = refine(
        ctx,
        |wp| {
            let wp = wp + e as u32 + 8;
            let f: Vec<CBall> = (0..3).map(|k| averaged(k, wp)).collect::<Result<_>>()?;
            let rich = |a: &CBall, b: &CBall| b.mul_i64(4).sub(a).div_i64(3);
            let r1 = rich(&f[0], &f[1]);
            let r2 = rich(&f[1], &f[2]);
            let defect = r2.mid().sub(&r1.mid()).abs_upper();
            Ok((r2, defect))
        },
        |(v, _)| v.rel_ok(bits),
    )?;
    if !defect.le(&r2.abs_upper().mul_2exp(-((bits / 2) as i64))) {
        return Err(Error::ExtrapolationUnstable(format!(
            "half-integer limit at q = {q}: successive extrapolants differ by 2^{:.1}",
            defect.log2()
        )));
    }
    Ok(MomentValue::new(fold_real(r2.add_error(&defect)), Method::Hypergeometric))
}

fn gauss_half(a: CBall, b: CBall, c: CBall, wp: u32) -> Result<CBall> {
    hyp_at(&HypParams::new(vec![a, b], vec![c], c_frac(1, 2, wp)), wp)
}

/// `M₀ = 1/2 + √(2/π) Γ(N+1/2)/(N-1)! ₂F₁(1, -1/2; N; 1/2)`.
pub fn m0_hyp(n: u32, ctx: &PrecisionContext) -> Result<MomentValue> {
    if n < 1 {
        return Err(Error::Domain("N must be at least 1".into()));
    }
    let ni = n as i64;
    let v = refine(
        ctx,
        |wp| {
            let f = gauss_half(c_int(1, wp), c_frac(-1, 2, wp), c_int(ni, wp), wp)?;
            let g = gamma_ratio(&c_frac(2 * ni + 1, 2, wp), &c_int(ni, wp))?;
            Ok(g.mul(&f).mul_real(&el::sqrt_2_over_pi(wp)).add(&c_frac(1, 2, wp)))
        },
        |v| v.rel_ok(ctx.target_bits),
    )?;
    Ok(MomentValue::new(v, Method::Hypergeometric))
}

/// `M₂ = √(2/π) Γ(N+3/2)/(N-1)! (₂F₁(2,-1/2;N+1;1/2)/(2N) + ₂F₁(1,-3/2;N;1/2)/3) + N/2`.
pub fn m2_hyp(n: u32, ctx: &PrecisionContext) -> Result<MomentValue> {
    if n < 1 {
        return Err(Error::Domain("N must be at least 1".into()));
    }
    let ni = n as i64;
    let v = refine(
        ctx,
        |wp| {
            let f1 = gauss_half(c_int(2, wp), c_frac(-1, 2, wp), c_int(ni + 1, wp), wp)?;
            let f2 = gauss_half(c_int(1, wp), c_frac(-3, 2, wp), c_int(ni, wp), wp)?;
            let g = gamma_ratio(&c_frac(2 * ni + 3, 2, wp), &c_int(ni, wp))?;
            let inner = f1.div_i64(2 * ni).add(&f2.div_i64(3));
            Ok(g.mul(&inner).mul_real(&el::sqrt_2_over_pi(wp)).add(&c_frac(ni, 2, wp)))
        },
        |v| v.rel_ok(ctx.target_bits),
    )?;
    Ok(MomentValue::new(v, Method::Hypergeometric))
}

/// `M₂` as an element of ℚ(√2): an integer relation found at 512 bits and
/// checked against a 1024-bit evaluation. `None` when no relation is found.
pub fn m2_recognized(n: u32) -> Result<Option<Sqrt2Rational>> {
    let lo = m2_hyp(n, &PrecisionContext::new(512)?)?;
    let Some(candidate) = recognize_sqrt2(&lo.value.re, 512) else {
        return Ok(None);
    };
    let hi = m2_hyp(n, &PrecisionContext::new(1024)?)?;
    Ok(verify_candidate(&candidate, &hi.value.re, 1000).then_some(candidate))
}

/// `LHS - RHS` of the contiguous relation between the ₃F₂ functions at
/// shifts `5/2, 3/2, 1/2`.
pub fn hyp3f2_contiguous_check(n: u32, p: &CBall, ctx: &PrecisionContext) -> Result<CBall> {
    let wp = ctx.working();
    let p = p.clone().with_prec(wp);
    let ni = n as i64;
    let f = |a2: i64, d2: i64| -> Result<CBall> {
        let numer = vec![c_int(1, wp), c_frac(-a2, 2, wp).sub(&p), c_frac(a2, 2, wp).add(&p)];
        let denom = vec![c_frac(1, 2, wp), c_frac(d2 - 2 * ni, 2, wp).sub(&p)];
        hyp_at(&HypParams::new(numer, denom, c_frac(1, 2, wp)), wp)
    };
    let two_p = p.mul_i64(2);
    let u = two_p.add_i64(2 * ni - 1);
    let w = two_p.add_i64(2 * ni + 1);
    let lhs = u.mul(&w).mul(&f(5, -1)?);
    let r1 = p.mul_i64(6).add_i64(4 * ni + 7).mul(&u).mul(&f(3, 1)?);
    let r2 = two_p.add_i64(ni).mul(&w).mul_i64(2).mul(&f(1, 3)?);
    Ok(lhs.sub(&r1.sub(&r2)))
}

#[cfg(test)]
mod tests {
    use super::super::exact::{m0_exact, trace_moment};
    use super::*;

    fn ctx(b: u32) -> PrecisionContext {
        PrecisionContext::new(b).unwrap()
    }

    fn close(a: &CBall, b: &Ball, bits: f64) -> bool {
        let d = a.re.sub(b).abs_upper().log2() - b.log2_abs();
        d < -bits && a.im.abs_upper().log2() < -bits
    }

    #[test]
    fn p_zero_matches_terminating_sum() {
        let c = ctx(128);
        for n in 1..=12 {
            let exact = m0_exact(n).unwrap().to_ball(256);
            assert!(close(&moment_real_int(n, 0, &c).unwrap().value, &exact, 120.0), "N={n}");
            assert!(close(&m0_hyp(n, &c).unwrap().value, &exact, 120.0), "N={n}");
        }
    }

    #[test]
    fn sum_rule() {
        let c = ctx(128);
        for n in 2..=12 {
            for p in 1..=6 {
                let r = moment_real_int(n, p, &c).unwrap().value;
                let cc = moment_complex_eigs(n, p, &c).unwrap().value;
                let t = Ball::from_biguint(&trace_moment(n, p).unwrap(), 256);
                assert!(close(&r.add(&cc), &t, 115.0), "N={n} p={p}");
            }
        }
    }

    #[test]
    fn m2_forms_agree() {
        let c = ctx(128);
        for n in 1..=12 {
            let a = m2_hyp(n, &c).unwrap().value;
            let b = moment_real_int(n, 1, &c).unwrap().value;
            assert!(close(&a, &b.re, 120.0), "N={n}");
        }
    }

    #[test]
    fn m2_recognition_matches_contiguous_identity() {
        // 3 M₂(N) = (2N+1) M₀(N) - (N-1) M₀(N+1) + (N-1)
        for n in [2u32, 3, 4, 7, 10] {
            let m = m2_recognized(n).unwrap().expect("relation found");
            let ni = n as i64;
            let q = |v: i64| num_rational::BigRational::from_integer(v.into());
            let rhs = m0_exact(n)
                .unwrap()
                .scale(&q(2 * ni + 1))
                .sub(&m0_exact(n + 1).unwrap().scale(&q(ni - 1)))
                .add(&Sqrt2Rational::rational(q(ni - 1)));
            assert_eq!(m.scale(&q(3)), rhs, "N={n}");
        }
    }

    #[test]
    fn half_integer_orders() {
        let c = ctx(128);
        let half = CBall::from_real(Ball::frac(1, 2, 192));
        assert!(matches!(moment_real(3, &half, &c), Err(Error::IndeterminateParameters(_))));
        assert!(matches!(moment_real(3, &CBall::from_f64(-0.6, 0.0, 64), &c), Err(Error::Domain(_))));
        // N = 1: E|x| = √(2/π)
        let v = moment_real_halfint(1, 0, &c).unwrap();
        assert!(close(&v.value, &el::sqrt_2_over_pi(256), 100.0));
        // N = 2: E Σ|λ| over real eigenvalues, from the integer-moment neighbours' continuity
        let a = moment_real_halfint(3, 0, &c).unwrap();
        let b = moment_real_halfint(3, 0, &ctx(160)).unwrap();
        assert!(a.value.overlaps(&b.value));
    }

    #[test]
    fn contiguous_relation() {
        let c = ctx(256);
        for (n, p) in [
            (5, CBall::from_real(Ball::frac(3, 10, 400))),
            (8, CBall::new(Ball::frac(1, 5, 400), Ball::frac(1, 10, 400))),
            (3, CBall::from_i64(2, 400)),
        ] {
            let r = hyp3f2_contiguous_check(n, &p, &c).unwrap();
            assert!(r.contains_zero(), "N={n}");
            assert!(r.rad().log2() < -180.0);
        }
    }

    #[test]
    fn large_n_uses_log_gamma() {
        let c = ctx(96);
        let v = m0_hyp(400, &c).unwrap();
        let exact = m0_exact(400).unwrap().to_ball(200);
        assert!(close(&v.value, &exact, 90.0));
    }
}
