//! Generalized hypergeometric series `pFq(c; d; z)`.
//!
//! Terms are summed in ball arithmetic. Once `k` exceeds every `|d_j|`, the
//! term ratio is bounded by
//! `R_k = |z| Π (k + max(|c_i|, 1)) / ((k + 1) Π (k - |d_j|))`,
//! which decreases in `k`, so the tail after term `k` is at most
//! `|t_k| R_k / (1 - R_k)` as soon as `R_k < 1`.

use super::ball::Ball;
use super::complex::CBall;
use super::context::PrecisionContext;
use super::mag::Mag;
use super::scalar::Scalar;
use crate::error::{Error, Result};
use crate::value::{Method, MomentValue};

const MAX_TERMS: usize = 1_000_000;

/// Parameters of a generalized hypergeometric series.
#[derive(Debug, Clone)]
pub struct HypParams {
    pub numer: Vec<CBall>,
    pub denom: Vec<CBall>,
    pub z: CBall,
}

impl HypParams {
    pub fn new(numer: Vec<CBall>, denom: Vec<CBall>, z: CBall) -> Self {
        HypParams { numer, denom, z }
    }

    fn is_real(&self) -> bool {
        self.z.is_real() && self.numer.iter().chain(&self.denom).all(|c| c.is_real())
    }

    fn with_prec(&self, prec: u32) -> HypParams {
        let f = |v: &Vec<CBall>| v.iter().map(|c| c.clone().with_prec(prec)).collect();
        HypParams {
            numer: f(&self.numer),
            denom: f(&self.denom),
            z: self.z.clone().with_prec(prec),
        }
    }
}

/// A summed series with the number of terms used.
#[derive(Debug, Clone)]
pub struct HypSum<S> {
    pub value: S,
    pub terms: usize,
    pub terminated: bool,
}

/// Sum the series at the precision of the inputs.
pub fn hyp_sum<S: Scalar>(numer: &[S], denom: &[S], z: &S) -> Result<HypSum<S>> {
    let wp = numer
        .iter()
        .chain(denom)
        .map(|c| c.prec())
        .fold(z.prec(), u32::max);
    let limit = numer.iter().filter_map(|c| c.exact_nonpositive_integer()).min();
    for d in denom {
        if let Some(m) = d.exact_nonpositive_integer() {
            match limit {
                Some(n) if n <= m => {}
                _ => {
                    return Err(Error::IndeterminateParameters(format!(
                        "denominator parameter {} is a nonpositive integer",
                        -(m as i128)
                    )))
                }
            }
        }
    }
    let r = numer.len();
    let s = denom.len();
    if limit.is_none() {
        if r > s + 1 && !z.abs_upper().is_zero() {
            return Err(Error::NonConvergence(format!("{r}F{s} diverges for z != 0")));
        }
        if r == s + 1 && !z.abs_upper().lt(&Mag::from_u64(1)) {
            return Err(Error::NonConvergence(format!("{r}F{s} needs |z| < 1")));
        }
    }
    let one = S::from_i64(1, wp);
    let mut term = one.clone();
    let mut sum = one;
    let mut max_term = Mag::from_u64(1);
    let numer_abs: Vec<Mag> = numer
        .iter()
        .map(|c| c.abs_upper().max(&Mag::from_u64(1)))
        .collect();
    let denom_abs: Vec<Mag> = denom.iter().map(|d| d.abs_upper()).collect();
    let d_max = denom_abs.iter().fold(0.0f64, |m, d| m.max(d.to_f64()));
    let zabs = z.abs_upper();
    let three_quarters = Mag::from_u64(3).mul_2exp(-2);
    let tol_shift = -(wp as i64) - 4;
    for k in 0..MAX_TERMS {
        if let Some(n) = limit {
            if k as u64 >= n {
                return Ok(HypSum {
                    value: sum,
                    terms: k + 1,
                    terminated: true,
                });
            }
        }
        // t_{k+1} = t_k · z Π(c_i + k) / (Π(d_j + k) (k + 1))
        let mut num = z.clone();
        for c in numer {
            num = num.mul(&c.add(&S::from_i64(k as i64, wp)));
        }
        let mut den = S::from_i64(k as i64 + 1, wp);
        for d in denom {
            den = den.mul(&d.add(&S::from_i64(k as i64, wp)));
        }
        term = term.mul(&num).div(&den);
        if !term.is_finite() {
            return Err(Error::PrecisionExhausted(
                "hypergeometric term is unbounded near a parameter pole".into(),
            ));
        }
        sum = sum.add(&term);
        let kk = k + 1;
        let ta = term.abs_upper();
        max_term = max_term.max(&ta);
        if limit.is_none() && (kk as f64) > d_max + 1.0 {
            let kf = Mag::from_u64(kk as u64);
            let mut rnum = zabs;
            for c in &numer_abs {
                rnum = rnum.mul(&kf.add(c));
            }
            let mut rden = Mag::from_u64(kk as u64 + 1);
            for d in &denom_abs {
                rden = rden.mul_lower(&kf.sub_lower(d));
            }
            let ratio = rnum.div(&rden);
            if ratio.le(&three_quarters) {
                let tail = ta.mul(&ratio).div(&Mag::from_u64(1).sub_lower(&ratio));
                if tail.le(&max_term.mul_2exp(tol_shift)) {
                    return Ok(HypSum {
                        value: sum.add_error(&tail),
                        terms: kk + 1,
                        terminated: false,
                    });
                }
            }
        }
    }
    Err(Error::NonConvergence("hypergeometric series: term cap reached".into()))
}

/// Real-parameter convenience wrapper.
pub fn hyp_real(numer: &[Ball], denom: &[Ball], z: &Ball) -> Result<Ball> {
    Ok(hyp_sum(numer, denom, z)?.value)
}

/// Complex-parameter convenience wrapper.
pub fn hyp_complex(numer: &[CBall], denom: &[CBall], z: &CBall) -> Result<CBall> {
    Ok(hyp_sum(numer, denom, z)?.value)
}

/// Evaluate at working precision `wp`, on the real path when all inputs are real.
pub fn hyp_at(params: &HypParams, wp: u32) -> Result<CBall> {
    let p = params.with_prec(wp);
    if p.is_real() {
        let n: Vec<Ball> = p.numer.iter().map(|c| c.re.clone()).collect();
        let d: Vec<Ball> = p.denom.iter().map(|c| c.re.clone()).collect();
        Ok(CBall::from_real(hyp_real(&n, &d, &p.z.re)?))
    } else {
        hyp_complex(&p.numer, &p.denom, &p.z)
    }
}

/// `pFq` to the accuracy of `ctx`, retrying with more working precision
/// when cancellation eats into the result.
pub fn hyp_pfq(params: &HypParams, ctx: &PrecisionContext) -> Result<MomentValue> {
    let mut wp = ctx.working();
    for _ in 0..5 {
        let v = hyp_at(params, wp)?;
        if v.rel_ok(ctx.target_bits) || v.abs_upper().is_zero() {
            return Ok(MomentValue::new(v, Method::Hypergeometric));
        }
        wp += wp.max(64);
    }
    let v = hyp_at(params, wp)?;
    Ok(MomentValue::new(v, Method::Hypergeometric))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::elementary as el;
    use proptest::prelude::*;

    fn c(v: f64) -> CBall {
        CBall::from_f64(v, 0.0, 256)
    }

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(192).unwrap()
    }

    #[test]
    fn zero_numerator_truncates_to_one() {
        let p = HypParams::new(vec![c(0.0), c(2.5)], vec![c(0.75)], c(0.5));
        let v = hyp_pfq(&p, &ctx()).unwrap();
        assert!(v.value.overlaps(&CBall::one(256)));
        assert!(v.value.rad().is_zero());
    }

    #[test]
    fn kummer_with_equal_parameters_is_exponential() {
        for z in [-3.0, 0.5, 2.0] {
            let p = HypParams::new(vec![c(1.7)], vec![c(1.7)], c(z));
            let v = hyp_pfq(&p, &ctx()).unwrap();
            assert!(v.value.re.overlaps(&el::exp(&Ball::from_f64(z, 256))), "{z}");
        }
    }

    #[test]
    fn gauss_at_half_matches_doubled_precision_sum() {
        let third = Ball::from_i64(3, 256);
        let v = hyp_real(&[Ball::one(256), Ball::frac(-1, 2, 256)], &[third], &Ball::frac(1, 2, 256)).unwrap();
        let w = hyp_real(&[Ball::one(512), Ball::frac(-1, 2, 512)], &[Ball::from_i64(3, 512)], &Ball::frac(1, 2, 512)).unwrap();
        assert!(v.overlaps(&w));
        assert!(v.rel_accuracy_bits() > 240.0);
        // closed form 2F1(1,-1/2;3;1/2) = (8/15)(2 + ... ) checked through 2F1(1,-1/2;1;z) = sqrt(1-z)
        let s = hyp_real(&[Ball::one(256), Ball::frac(-1, 2, 256)], &[Ball::one(256)], &Ball::frac(1, 2, 256)).unwrap();
        assert!(s.overlaps(&Ball::frac(1, 2, 256).sqrt()));
    }

    #[test]
    fn indeterminate_parameters_are_rejected() {
        let p = HypParams::new(vec![c(1.0), c(0.5)], vec![c(-2.0)], c(0.5));
        assert!(matches!(hyp_pfq(&p, &ctx()), Err(Error::IndeterminateParameters(_))));
        // a numerator that terminates first makes it well defined
        let p = HypParams::new(vec![c(-1.0), c(0.5)], vec![c(-2.0)], c(0.5));
        let v = hyp_pfq(&p, &ctx()).unwrap();
        // 1 + (-1)(0.5)/(-2) · 0.5 = 1.125
        assert!(v.value.re.overlaps(&Ball::frac(9, 8, 256)));
    }

    #[test]
    fn divergent_series_are_rejected() {
        let p = HypParams::new(vec![c(1.0), c(1.0), c(1.0)], vec![c(2.0)], c(0.5));
        assert!(matches!(hyp_pfq(&p, &ctx()), Err(Error::NonConvergence(_))));
        let p = HypParams::new(vec![c(1.0), c(1.0)], vec![c(2.0)], c(1.5));
        assert!(matches!(hyp_pfq(&p, &ctx()), Err(Error::NonConvergence(_))));
    }

    #[test]
    fn large_parameters_need_many_terms_and_stay_sound() {
        // 3F2 of the moment formula at N = 400, p = 1
        let n = 400.0;
        let p = 1.0;
        let num = [c(1.0), c(-0.5 - p), c(0.5 + p)];
        let den = [c(0.5), c(1.5 - n - p)];
        let v = hyp_sum(&num, &den, &c(0.5)).unwrap();
        let w = hyp_sum(
            &num.iter().map(|x| x.clone().with_prec(512)).collect::<Vec<_>>(),
            &den.iter().map(|x| x.clone().with_prec(512)).collect::<Vec<_>>(),
            &CBall::from_f64(0.5, 0.0, 512),
        )
        .unwrap();
        assert!(v.value.overlaps(&w.value));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn error_bound_is_sound(a in -3.0f64..6.0, b in -3.0f64..6.0, d in 0.3f64..9.0, z in -0.5f64..0.5, im in -1.0f64..1.0) {
            let num = [CBall::from_f64(a, im, 128), CBall::from_f64(b, 0.0, 128)];
            let den = [CBall::from_f64(d, -im, 128)];
            let zz = CBall::from_f64(z, 0.0, 128);
            let v = hyp_sum(&num, &den, &zz).unwrap();
            // reference: many more terms at four times the precision
            let num4: Vec<CBall> = num.iter().map(|x| x.clone().with_prec(512)).collect();
            let den4: Vec<CBall> = den.iter().map(|x| x.clone().with_prec(512)).collect();
            let w = hyp_sum(&num4, &den4, &zz.clone().with_prec(512)).unwrap();
            prop_assert!(w.terms >= v.terms);
            prop_assert!(v.value.overlaps(&w.value));
        }
    }
}
