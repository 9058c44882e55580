//! The three-term recurrence in `p`:
//! `2(2p+1) M_2p = (2p-1)(6p+4N-5) M_(2p-2) - (2p-3)(2p+N-4)(2p+2N-3) M_(2p-4)`.

use super::exact::Sqrt2Rational;
use super::hyper::moment_real;
use crate::error::{Error, Result};
use crate::numerics::{Ball, CBall, PrecisionContext};
use crate::value::{Method, MomentValue};
use num_rational::BigRational as Q;

/// `(d, c₁, c₂)` with `d M_2p = c₁ M_(2p-2) - c₂ M_(2p-4)`.
pub fn recurrence_coefficients(n: u32, p: i64) -> (Q, Q, Q) {
    let n = n as i64;
    let q = |v: i64| Q::from_integer(v.into());
    (
        q(2 * (2 * p + 1)),
        q((2 * p - 1) * (6 * p + 4 * n - 5)),
        q((2 * p - 3) * (2 * p + n - 4) * (2 * p + 2 * n - 3)),
    )
}

fn check(p_max: u32) -> Result<()> {
    if p_max < 2 {
        return Err(Error::Domain("recurrence needs p_max >= 2".into()));
    }
    Ok(())
}

/// `M_0 .. M_(2 p_max)` in ℚ(√2) from exact seeds.
pub fn moment_sequence_exact(n: u32, p_max: u32, m0: &Sqrt2Rational, m2: &Sqrt2Rational) -> Result<Vec<Sqrt2Rational>> {
    check(p_max)?;
    let mut out = vec![m0.clone(), m2.clone()];
    for p in 2..=p_max as i64 {
        let (d, c1, c2) = recurrence_coefficients(n, p);
        let k = p as usize;
        let v = out[k - 1].scale(&c1).sub(&out[k - 2].scale(&c2)).scale(&d.recip());
        out.push(v);
    }
    Ok(out)
}

/// `M_0 .. M_(2 p_max)` from seeds; exact forms propagate when both seeds carry one.
pub fn moment_sequence_recurrence(
    n: u32,
    p_max: u32,
    seed_m0: &MomentValue,
    seed_m2: &MomentValue,
) -> Result<Vec<MomentValue>> {
    check(p_max)?;
    let prec = seed_m0.value.prec().max(seed_m2.value.prec());
    let mut vals = vec![seed_m0.value.clone(), seed_m2.value.clone()];
    for p in 2..=p_max as i64 {
        let (d, c1, c2) = recurrence_coefficients(n, p);
        let r = |x: &Q| CBall::from_real(Ball::from_rational(x, prec));
        let k = p as usize;
        let v = vals[k - 1].mul(&r(&c1)).sub(&vals[k - 2].mul(&r(&c2))).div(&r(&d));
        vals.push(v);
    }
    let exact = match (&seed_m0.exact, &seed_m2.exact) {
        (Some(a), Some(b)) => Some((
            moment_sequence_exact(n, p_max, &a.value, &b.value)?,
            a.proven && b.proven,
        )),
        _ => None,
    };
    Ok(vals
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            let method = match i {
                0 => seed_m0.method,
                1 => seed_m2.method,
                _ => Method::Recurrence,
            };
            let m = MomentValue::new(v, method);
            match &exact {
                Some((e, proven)) => m.with_exact(e[i].clone(), *proven),
                None => m,
            }
        })
        .collect())
}

/// The recurrence evaluated on `M_2p, M_(2p-2), M_(2p-4)` from the ₃F₂ formula
/// at complex `p`; it should vanish. Needs `Re p > 3/2`.
pub fn recurrence_residual(n: u32, p: &CBall, ctx: &PrecisionContext) -> Result<CBall> {
    let wp = ctx.working();
    let p = p.clone().with_prec(wp);
    let m = |k: i64| moment_real(n, &p.add_i64(-k), ctx).map(|v| v.value);
    let ni = n as i64;
    let two_p = p.mul_i64(2);
    let lhs = two_p.add_i64(1).mul_i64(2).mul(&m(0)?);
    let c1 = two_p.add_i64(-1).mul(&p.mul_i64(6).add_i64(4 * ni - 5));
    let c2 = two_p.add_i64(-3).mul(&two_p.add_i64(ni - 4)).mul(&two_p.add_i64(2 * ni - 3));
    Ok(lhs.sub(&c1.mul(&m(1)?)).add(&c2.mul(&m(2)?)))
}

#[cfg(test)]
mod tests {
    use super::super::exact::m0_exact;
    use super::super::hyper::{m2_recognized, moment_real_int};
    use super::*;

    fn ctx(b: u32) -> PrecisionContext {
        PrecisionContext::new(b).unwrap()
    }

    #[test]
    fn numeric_sequence_matches_closed_form() {
        let c = ctx(160);
        for n in [2u32, 4, 7, 12] {
            let s = moment_sequence_recurrence(
                n,
                10,
                &moment_real_int(n, 0, &c).unwrap(),
                &moment_real_int(n, 1, &c).unwrap(),
            )
            .unwrap();
            for (p, v) in s.iter().enumerate().skip(2) {
                let direct = moment_real_int(n, p as u32, &c).unwrap();
                assert!(v.value.overlaps(&direct.value), "N={n} p={p}");
                assert_eq!(v.method, Method::Recurrence);
            }
        }
    }

    #[test]
    fn exact_sequence_stays_in_field() {
        let n = 4;
        let m0 = m0_exact(n).unwrap();
        let m2 = m2_recognized(n).unwrap().unwrap();
        let seq = moment_sequence_exact(n, 8, &m0, &m2).unwrap();
        let c = ctx(128);
        for (p, v) in seq.iter().enumerate() {
            let direct = moment_real_int(n, p as u32, &c).unwrap();
            let d = (&v.to_ball(256) - &direct.value.re).abs_upper().log2();
            assert!(d < -100.0 + p as f64 * 4.0, "p={p}");
            // residual of the recurrence is exactly zero
            if p >= 2 {
                let (dd, c1, c2) = recurrence_coefficients(n, p as i64);
                let r = v.scale(&dd).sub(&seq[p - 1].scale(&c1)).add(&seq[p - 2].scale(&c2));
                assert!(r.is_zero());
            }
        }
        assert!(moment_sequence_exact(n, 1, &m0, &m2).is_err());
    }

    #[test]
    fn complex_order_residual() {
        let c = ctx(128);
        let p = CBall::from_real(Ball::frac(23, 10, 256));
        let r = recurrence_residual(5, &p, &c).unwrap();
        assert!(r.contains_zero());
        let p = CBall::new(Ball::frac(27, 10, 256), Ball::frac(1, 2, 256));
        assert!(recurrence_residual(6, &p, &c).unwrap().contains_zero());
    }
}
