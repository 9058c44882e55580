//! Gamma function, log-gamma and exact factorial helpers.
//!
//! Large arguments use the Stirling series with an explicit remainder bound;
//! smaller ones are shifted upward by the recurrence, and the left half-plane
//! is reached by reflection.

use super::ball::Ball;
use super::complex::CBall;
use super::context::PrecisionContext;
use super::elementary as el;
use super::mag::Mag;
use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::sync::{Mutex, OnceLock};

/// `n!` exactly.
pub fn factorial(n: u64) -> BigUint {
    let mut r = BigUint::one();
    for k in 2..=n {
        r *= k;
    }
    r
}

/// `n!!` with `(-1)!! = 0!! = 1`.
pub fn double_factorial(n: i64) -> Result<BigRational> {
    if n < -1 {
        return Err(Error::Domain(format!("double factorial of {n} is undefined here")));
    }
    let mut r = BigInt::one();
    let mut k = n;
    while k > 1 {
        r *= k;
        k -= 2;
    }
    Ok(BigRational::from_integer(r))
}

/// `Γ(n + 1/2) / √π = (2n)! / (4^n n!)` as an exact rational, for any integer `n`.
pub fn gamma_half_integer_over_sqrt_pi(n: i64) -> BigRational {
    // Γ(1/2 + n)/√π = Π_{k=0}^{n-1} (1/2 + k) for n ≥ 0
    let half = BigRational::new(1.into(), 2.into());
    let mut r = BigRational::one();
    if n >= 0 {
        for k in 0..n {
            r *= &half + BigRational::from_integer(k.into());
        }
    } else {
        for k in 1..=(-n) {
            r /= &half - BigRational::from_integer(k.into());
        }
    }
    r
}

/// Bernoulli numbers `B_{2k}` for `k = 0..=n`, computed from tangent numbers.
pub fn bernoulli_even(n: usize) -> Vec<BigRational> {
    static CACHE: OnceLock<Mutex<Vec<BigRational>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
    {
        let c = cache.lock().unwrap();
        if c.len() > n {
            return c[..=n].to_vec();
        }
    }
    let m = (n + 1).max(32).next_power_of_two();
    let v = compute_bernoulli_even(m);
    let mut c = cache.lock().unwrap();
    if c.len() < v.len() {
        *c = v;
    }
    c[..=n].to_vec()
}

fn compute_bernoulli_even(n: usize) -> Vec<BigRational> {
    // tangent numbers T_1..T_n
    let mut t: Vec<BigInt> = vec![BigInt::zero(); n + 1];
    if n >= 1 {
        t[1] = BigInt::one();
    }
    for k in 2..=n {
        t[k] = &t[k - 1] * (k as i64 - 1);
    }
    for k in 2..=n {
        for j in k..=n {
            t[j] = &t[j - 1] * (j as i64 - k as i64) + &t[j] * (j as i64 - k as i64 + 2);
        }
    }
    let mut out = Vec::with_capacity(n + 1);
    out.push(BigRational::one());
    for k in 1..=n {
        let four_k = BigInt::one() << (2 * k);
        let den = &four_k * (&four_k - 1);
        let mut num = &t[k] * (2 * k as i64);
        if k % 2 == 0 {
            num = -num;
        }
        out.push(BigRational::new(num, den));
    }
    out
}

/// Number of Stirling terms and the shift threshold for working precision `wp`.
fn stirling_plan(wp: u32) -> (usize, f64) {
    let k = ((wp as usize) / 6).clamp(8, 160);
    let kk = 2.0 * k as f64;
    // log2 |B_2K| ≈ 1 + log2((2K)!) - 2K log2(2π)
    let lg = 1.0 + ln_factorial_f64(kk) / std::f64::consts::LN_2 - kk * (2.0 * std::f64::consts::PI).log2();
    let need = wp as f64 + 8.0 + lg - (kk * (kk - 1.0)).log2();
    let r = 2f64.powf(need / (kk - 1.0)).max(8.0);
    (k, r)
}

fn ln_factorial_f64(n: f64) -> f64 {
    let mut s = 0.0;
    let mut k = 2.0;
    while k <= n {
        s += f64::ln(k);
        k += 1.0;
    }
    s
}

/// Remainder of the Stirling sum after `K` terms, for `|w|` and the factor
/// `1/cos²(arg(w)/2)` supplied as upper bounds.
fn stirling_remainder(b2k: &BigRational, k: usize, w_abs_lower: &Mag, sec2: &Mag) -> Mag {
    let num = Mag::from_biguint(b2k.numer().magnitude(), 0);
    let den = Mag::from_biguint_lower(b2k.denom().magnitude(), 0)
        .mul_lower(&Mag::from_u64((2 * k * (2 * k - 1)) as u64));
    let wpow = w_abs_lower_pow(w_abs_lower, 2 * k as u32 - 1);
    num.div(&den.mul_lower(&wpow)).mul(&sec2.pow(k as u32))
}

fn w_abs_lower_pow(w: &Mag, e: u32) -> Mag {
    let mut r = Mag::from_u64(1);
    for _ in 0..e {
        r = r.mul_lower(w);
    }
    r
}

/// `ln Γ(w)` by the Stirling series for real `w ≥` the planned threshold.
fn stirling_real(w: &Ball, k: usize) -> Ball {
    let wp = w.prec();
    let b = bernoulli_even(k);
    let lnw = el::ln(w);
    let mut s = &(&(w - &Ball::frac(1, 2, wp)) * &lnw) - w;
    s = &s + &el::half_ln_2pi(wp);
    let winv = w.inv();
    let winv2 = winv.sqr();
    let mut p = winv.clone();
    for j in 1..k {
        let c = Ball::from_rational(&b[j], wp).div_i64((2 * j * (2 * j - 1)) as i64);
        s = &s + &(&c * &p);
        p = &p * &winv2;
    }
    let rem = stirling_remainder(&b[k], k, &w.abs_lower(), &Mag::from_u64(1));
    s.add_error(&rem)
}

fn stirling_complex(w: &CBall, k: usize) -> CBall {
    let wp = w.prec();
    let b = bernoulli_even(k);
    let lnw = w.ln();
    let mut s = w.add_real(&Ball::frac(-1, 2, wp)).mul(&lnw).sub(w);
    s = s.add_real(&el::half_ln_2pi(wp));
    let winv = w.inv();
    let winv2 = winv.sqr();
    let mut p = winv.clone();
    for j in 1..k {
        let c = Ball::from_rational(&b[j], wp).div_i64((2 * j * (2 * j - 1)) as i64);
        s = s.add(&p.mul_real(&c));
        p = p.mul(&winv2);
    }
    // 1/cos²(θ/2) = 2|w| / (|w| + Re w)
    let wabs_up = w.abs_upper();
    let wabs_lo = w.abs_lower();
    let re_lo = if w.re.is_positive() { w.re.abs_lower() } else { Mag::zero() };
    let sec2 = wabs_up.mul_2exp(1).div(&wabs_lo.add(&re_lo));
    let rem = stirling_remainder(&b[k], k, &wabs_lo, &sec2);
    s.add_error(&rem)
}

/// Small exact cases: positive integers and half-integers.
fn gamma_real_special(x: &Ball) -> Option<Ball> {
    if !x.is_exact() {
        return None;
    }
    let prec = x.prec();
    let q = x.mid_rational();
    if q.is_integer() {
        let n = q.to_integer().to_i64()?;
        if (1..=4000).contains(&n) {
            return Some(Ball::from_biguint(&factorial(n as u64 - 1), prec));
        }
        return None;
    }
    let two_q = &q * BigRational::from_integer(2.into());
    if two_q.is_integer() {
        let n = ((two_q.to_integer() - BigInt::one()) / BigInt::from(2)).to_i64()?;
        if (-2000..=2000).contains(&n) {
            let r = gamma_half_integer_over_sqrt_pi(n);
            return Some(&Ball::from_rational(&r, prec + 8) * &el::sqrt_pi(prec + 8));
        }
    }
    None
}

/// `Γ(x)` for a real ball at the ball's precision.
pub fn gamma_real(x: &Ball) -> Result<Ball> {
    let prec = x.prec();
    if let Some(n) = x.exact_integer() {
        if !n.is_positive() {
            return Err(Error::Pole(n.to_string()));
        }
    }
    if let Some(v) = gamma_real_special(x) {
        return Ok(v.with_prec(prec));
    }
    let xf = x.to_f64();
    if xf < 0.5 {
        let wp = prec + 16;
        let xw = x.clone().with_prec(wp);
        let one_minus = &Ball::one(wp) - &xw;
        let g = gamma_real(&one_minus)?;
        let s = el::sin_pi(&xw);
        let r = &el::pi(wp) / &(&s * &g);
        return Ok(r.with_prec(prec));
    }
    let (lnv, prod) = lgamma_parts_real(x)?;
    Ok((&el::exp(&lnv) / &prod).with_prec(prec))
}

/// Returns `(S, P)` with `Γ(x) = e^S / P` for `x ≥ 1/2`.
fn lgamma_parts_real(x: &Ball) -> Result<(Ball, Ball)> {
    let prec = x.prec();
    let wp = prec + 24 + (x.to_f64().abs().max(2.0).log2() as u32);
    let (k, r) = stirling_plan(wp);
    let xw = x.clone().with_prec(wp);
    let xf = x.to_f64();
    let n = if xf < r { (r - xf).ceil() as i64 } else { 0 };
    let mut prod = Ball::one(wp);
    for j in 0..n {
        prod = &prod * &xw.add_i64(j);
    }
    let w = xw.add_i64(n);
    Ok((stirling_real(&w, k), prod))
}

/// `ln Γ(x)` for a real ball with positive values.
pub fn lgamma_real(x: &Ball) -> Result<Ball> {
    if !x.is_positive() {
        return Err(Error::Domain("log-gamma needs a positive argument".into()));
    }
    let prec = x.prec();
    if x.to_f64() < 0.5 {
        let g = gamma_real(x)?;
        return Ok(el::ln(&g));
    }
    let (s, p) = lgamma_parts_real(x)?;
    Ok((&s - &el::ln(&p)).with_prec(prec))
}

/// `Γ(z)` for a complex ball at the ball's precision.
pub fn gamma_complex(z: &CBall) -> Result<CBall> {
    if z.is_real() {
        return gamma_real(&z.re).map(CBall::from_real);
    }
    let prec = z.prec();
    if z.re.to_f64() < 0.5 {
        let wp = prec + 16;
        let zw = z.clone().with_prec(wp);
        let one_minus = CBall::one(wp).sub(&zw);
        let g = gamma_complex(&one_minus)?;
        let s = zw.sin_pi();
        let r = CBall::from_real(el::pi(wp)).div(&s.mul(&g));
        return Ok(r.with_prec(prec));
    }
    let (s, p) = lgamma_parts_complex(z);
    Ok(s.exp().div(&p).with_prec(prec))
}

fn lgamma_parts_complex(z: &CBall) -> (CBall, CBall) {
    let prec = z.prec();
    let (zr, zi) = z.to_f64_pair();
    let wp = prec + 24 + ((zr * zr + zi * zi).sqrt().max(2.0).log2() as u32);
    let (k, r) = stirling_plan(wp);
    let zw = z.clone().with_prec(wp);
    let n = if zr < r { (r - zr).ceil() as i64 } else { 0 };
    let mut prod = CBall::one(wp);
    for j in 0..n {
        prod = prod.mul(&zw.add_i64(j));
    }
    let w = zw.add_i64(n);
    (stirling_complex(&w, k), prod)
}

/// A logarithm of `Γ(z)` for `Re z ≥ 1/2` (branch unspecified; only its exponential is meaningful).
pub fn lgamma_complex(z: &CBall) -> Result<CBall> {
    if z.re.to_f64() < 0.5 {
        return Ok(gamma_complex(z)?.ln());
    }
    let (s, p) = lgamma_parts_complex(z);
    Ok(s.sub(&p.ln()))
}

/// `Γ(a) / Γ(b)`, using log-gamma differences when both arguments are large.
pub fn gamma_ratio(a: &CBall, b: &CBall) -> Result<CBall> {
    let prec = a.prec().max(b.prec());
    let big = 40.0;
    if a.re.to_f64() > big && b.re.to_f64() > big {
        if a.is_real() && b.is_real() {
            let d = &lgamma_real(&a.re)? - &lgamma_real(&b.re)?;
            return Ok(CBall::from_real(el::exp(&d).with_prec(prec)));
        }
        let d = lgamma_complex(a)?.sub(&lgamma_complex(b)?);
        return Ok(d.exp().with_prec(prec));
    }
    let ga = gamma_complex(a)?;
    let gb = gamma_complex(b)?;
    Ok(ga.div(&gb))
}

/// `Γ(x)` to the accuracy of `ctx`, for a complex argument.
pub fn gamma_fn(x: &CBall, ctx: &PrecisionContext) -> Result<CBall> {
    let wp = ctx.working();
    if let Some(n) = x.re.exact_integer() {
        if x.is_real() && !n.is_positive() {
            return Err(Error::Pole(n.to_string()));
        }
    }
    let mut guard = 0;
    loop {
        let v = gamma_complex(&x.clone().with_prec(wp + guard))?;
        if v.rel_ok(ctx.target_bits) || guard >= 4 * wp {
            return Ok(v);
        }
        guard = (guard * 2).max(64);
    }
}

impl CBall {
    /// Whether the radius is below `2^-bits` relative to the magnitude.
    pub fn rel_ok(&self, bits: u32) -> bool {
        let m = self.abs_upper();
        if m.is_zero() {
            return self.rad().is_zero();
        }
        self.rad().le(&m.mul_2exp(-(bits as i64)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::decimal::parse_decimal;

    fn ctx(b: u32) -> PrecisionContext {
        PrecisionContext::new(b).unwrap()
    }

    #[test]
    fn bernoulli_values() {
        let b = bernoulli_even(6);
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(b[1], q(1, 6));
        assert_eq!(b[2], q(-1, 30));
        assert_eq!(b[3], q(1, 42));
        assert_eq!(b[4], q(-1, 30));
        assert_eq!(b[5], q(5, 66));
        assert_eq!(b[6], q(-691, 2730));
    }

    #[test]
    fn double_factorials() {
        assert_eq!(double_factorial(-1).unwrap(), BigRational::one());
        assert_eq!(double_factorial(5).unwrap(), BigRational::from_integer(15.into()));
        assert_eq!(double_factorial(6).unwrap(), BigRational::from_integer(48.into()));
        assert!(double_factorial(-2).is_err());
    }

    #[test]
    fn gamma_special_values() {
        let c = ctx(128);
        let one = gamma_fn(&CBall::one(200), &c).unwrap();
        assert!(one.overlaps(&CBall::one(200)));
        let h = gamma_fn(&CBall::from_f64(0.5, 0.0, 200), &c).unwrap();
        assert!(h.re.overlaps(&el::sqrt_pi(200)));
        assert!(matches!(gamma_fn(&CBall::from_i64(-3, 200), &c), Err(Error::Pole(_))));
    }

    #[test]
    fn reflection_product_at_minus_half() {
        let c = ctx(128);
        let a = gamma_fn(&CBall::from_f64(-0.5, 0.0, 200), &c).unwrap();
        let b = gamma_fn(&CBall::from_f64(1.5, 0.0, 200), &c).unwrap();
        let p = a.mul(&b);
        assert!(p.re.overlaps(&el::pi(200).neg()));
    }

    #[test]
    fn generic_real_argument_uses_stirling() {
        // references carry 60 significant digits
        let close = |g: &Ball, s: &str| {
            let r = parse_decimal(s, 256).unwrap();
            assert!((g - &r).abs_upper().log2() - r.log2_abs() < -190.0, "{g:?} vs {s}");
            assert!(g.rel_accuracy_bits() > 200.0);
        };
        close(&gamma_real(&Ball::frac(3, 10, 256)).unwrap(), "2.99156898768759062831251651590491779111280602492171511274412");
        close(&gamma_real(&Ball::frac(29, 4, 256)).unwrap(), "1155.38101391998968720270376797055657877430083424543346030598");
        close(&gamma_real(&Ball::frac(-27, 10, 256)).unwrap(), "-0.931082784838963780987400098320858322786432002776755403904177");
    }

    #[test]
    fn complex_gamma_matches_recurrence_and_conjugation() {
        let z = CBall::from_f64(0.3, 1.7, 256);
        let g = gamma_complex(&z).unwrap();
        let g1 = gamma_complex(&z.add_i64(1)).unwrap();
        assert!(g1.overlaps(&g.mul(&z)));
        let gc = gamma_complex(&z.conj()).unwrap();
        assert!(gc.overlaps(&g.conj()));
        assert!(g.rad().log2() < -200.0);
        // |Γ(iy)|² = π / (y sinh πy)
        let y = Ball::from_f64(1.25, 256);
        let gi = gamma_complex(&CBall::new(Ball::zero(256), y.clone())).unwrap();
        let (sh, _) = el::sinh_cosh(&(&y * &el::pi(256)));
        let expect = &el::pi(256) / &(&y * &sh);
        assert!(gi.norm_sqr().overlaps(&expect));
    }

    #[test]
    fn lgamma_and_ratio_for_large_arguments() {
        let a = CBall::from_f64(400.5, 0.0, 256);
        let b = CBall::from_f64(399.0, 0.0, 256);
        let r = gamma_ratio(&a, &b).unwrap();
        // Γ(400.5)/Γ(399) = 399 · Γ(400.5)/Γ(400) and the direct quotient agrees
        let direct = gamma_complex(&a).unwrap().div(&gamma_complex(&b).unwrap());
        assert!(r.overlaps(&direct));
        assert!(r.re.rel_accuracy_bits() > 200.0);
        let l = lgamma_real(&Ball::from_i64(100, 256)).unwrap();
        let e = el::ln(&Ball::from_biguint(&factorial(99), 256));
        assert!(l.overlaps(&e));
    }
}
