//! Constants and elementary functions on balls.
//!
//! Each function evaluates a truncated Taylor series after argument
//! reduction and adds an explicit bound for the discarded tail.

use super::ball::Ball;
use super::mag::Mag;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

type ConstCache = Mutex<HashMap<u32, Ball>>;

fn cached(cell: &'static OnceLock<ConstCache>, prec: u32, f: impl FnOnce(u32) -> Ball) -> Ball {
    let m = cell.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = m.lock().unwrap().get(&prec) {
        return v.clone();
    }
    let v = f(prec);
    m.lock().unwrap().insert(prec, v.clone());
    v
}

/// `atanh(1/n)` for an integer `n ≥ 2`.
fn atanh_inv(n: i64, prec: u32) -> Ball {
    let wp = prec + 16;
    let n2 = n * n;
    let mut p = Ball::frac(1, n, wp);
    let mut sum = p.clone();
    let eps = Mag::pow2(-(wp as i64) - 4);
    let mut k = 1i64;
    loop {
        p = p.div_i64(n2);
        let t = p.div_i64(2 * k + 1);
        sum = &sum + &t;
        k += 1;
        if t.abs_upper().lt(&eps) {
            // remaining terms are below a geometric series of ratio 1/n² <= 1/4
            let tail = p.abs_upper().mul_2exp(1);
            return sum.add_error(&tail).with_prec(prec);
        }
    }
}

/// `atan(1/n)` for an integer `n ≥ 2`.
fn atan_inv(n: i64, prec: u32) -> Ball {
    let wp = prec + 16;
    let n2 = n * n;
    let mut p = Ball::frac(1, n, wp);
    let mut sum = p.clone();
    let eps = Mag::pow2(-(wp as i64) - 4);
    let mut k = 1i64;
    loop {
        p = p.div_i64(n2);
        let t = p.div_i64(2 * k + 1);
        if k % 2 == 1 {
            sum = &sum - &t;
        } else {
            sum = &sum + &t;
        }
        k += 1;
        if t.abs_upper().lt(&eps) {
            // alternating series with decreasing terms
            let tail = p.abs_upper();
            return sum.add_error(&tail).with_prec(prec);
        }
    }
}

pub fn ln2(prec: u32) -> Ball {
    static C: OnceLock<ConstCache> = OnceLock::new();
    cached(&C, prec, |p| atanh_inv(3, p).mul_2exp(1))
}

pub fn pi(prec: u32) -> Ball {
    static C: OnceLock<ConstCache> = OnceLock::new();
    cached(&C, prec, |p| {
        let a = atan_inv(5, p + 8).mul_i64(16);
        let b = atan_inv(239, p + 8).mul_i64(4);
        (&a - &b).with_prec(p)
    })
}

pub fn sqrt2(prec: u32) -> Ball {
    static C: OnceLock<ConstCache> = OnceLock::new();
    cached(&C, prec, |p| Ball::from_i64(2, p).sqrt())
}

pub fn sqrt_pi(prec: u32) -> Ball {
    static C: OnceLock<ConstCache> = OnceLock::new();
    cached(&C, prec, |p| pi(p + 8).sqrt().with_prec(p))
}

/// `1/sqrt(2π)`.
pub fn inv_sqrt_2pi(prec: u32) -> Ball {
    static C: OnceLock<ConstCache> = OnceLock::new();
    cached(&C, prec, |p| pi(p + 8).mul_2exp(1).sqrt().inv().with_prec(p))
}

/// `sqrt(2/π)`.
pub fn sqrt_2_over_pi(prec: u32) -> Ball {
    static C: OnceLock<ConstCache> = OnceLock::new();
    cached(&C, prec, |p| {
        let two = Ball::from_i64(2, p + 8);
        (&two / &pi(p + 8)).sqrt().with_prec(p)
    })
}

/// `ln(2π)/2`.
pub fn half_ln_2pi(prec: u32) -> Ball {
    static C: OnceLock<ConstCache> = OnceLock::new();
    cached(&C, prec, |p| {
        let v = ln(&pi(p + 8).mul_2exp(1));
        v.mul_2exp(-1).with_prec(p)
    })
}

fn unbounded(prec: u32) -> Ball {
    Ball::from_error(&Mag::inf(), prec)
}

fn bits_of(n: i64) -> u32 {
    64 - n.unsigned_abs().leading_zeros()
}

pub fn exp(x: &Ball) -> Ball {
    let prec = x.prec();
    if !x.is_finite() {
        return unbounded(prec);
    }
    if x.mid_is_zero() && x.is_exact() {
        return Ball::one(prec);
    }
    let xf = x.to_f64();
    if xf > 1e15 {
        return unbounded(prec);
    }
    if xf < -1e15 {
        return Ball::from_error(&Mag::pow2(-(1i64 << 50)), prec);
    }
    let n = (xf / std::f64::consts::LN_2).round() as i64;
    let s = ((prec as f64).sqrt() * 0.7).max(4.0) as u32;
    let wp = prec + s + bits_of(n) + 20;
    let xw = x.clone().with_prec(wp);
    let r = if n != 0 {
        &xw - &ln2(wp + bits_of(n)).mul_i64(n)
    } else {
        xw
    };
    let r = r.mul_2exp(-(s as i64));
    let rabs = r.abs_upper();
    if !rabs.lt(&Mag::pow2(-1)) {
        return unbounded(prec);
    }
    let eps = Mag::pow2(-(wp as i64) - 8);
    let mut sum = Ball::one(wp);
    let mut term = Ball::one(wp);
    let mut k = 1i64;
    loop {
        term = (&term * &r).div_i64(k);
        sum = &sum + &term;
        let ta = term.abs_upper();
        if ta.lt(&eps) || k > 10_000 {
            // |r| < 1/2 so the tail is at most twice the next term
            let next = ta.mul(&rabs).div(&Mag::from_u64((k + 1) as u64)).mul_2exp(1);
            sum = sum.add_error(&next);
            break;
        }
        k += 1;
    }
    for _ in 0..s {
        sum = sum.sqr();
    }
    sum.mul_2exp(n).with_prec(prec)
}

/// Natural logarithm of a positive ball.
pub fn ln(x: &Ball) -> Ball {
    let prec = x.prec();
    if !x.is_positive() || !x.is_finite() {
        return unbounded(prec);
    }
    let wp = prec + 32;
    let l2 = x.log2_abs();
    let mut k = l2.floor() as i64 + 1;
    let mut y = x.clone().with_prec(wp).mul_2exp(-k);
    if y.to_f64() < std::f64::consts::FRAC_1_SQRT_2 {
        y = y.mul_2exp(1);
        k -= 1;
    }
    const ROOTS: i64 = 4;
    for _ in 0..ROOTS {
        y = y.sqrt();
    }
    let one = Ball::one(wp);
    let z = &(&y - &one) / &(&y + &one);
    let z2 = z.sqr();
    let eps = Mag::pow2(-(wp as i64) - 8);
    let mut p = z.clone();
    let mut sum = z.clone();
    let mut i = 1i64;
    loop {
        p = &p * &z2;
        let t = p.div_i64(2 * i + 1);
        sum = &sum + &t;
        if t.abs_upper().lt(&eps) || i > 100_000 {
            // |z| < 0.03 so the tail is below twice the next power
            let tail = p.abs_upper().mul(&z2.abs_upper()).mul_2exp(1);
            sum = sum.add_error(&tail);
            break;
        }
        i += 1;
    }
    let lny = sum.mul_2exp(1 + ROOTS);
    let res = if k != 0 {
        &lny + &ln2(wp + bits_of(k)).mul_i64(k)
    } else {
        lny
    };
    res.with_prec(prec)
}

/// `(sin x, cos x)`.
pub fn sin_cos(x: &Ball) -> (Ball, Ball) {
    let prec = x.prec();
    if !x.is_finite() || x.to_f64().abs() > 1e15 {
        let b = Ball::zero(prec).add_error(&Mag::from_u64(1));
        return (b.clone(), b);
    }
    if x.mid_is_zero() && x.is_exact() {
        return (Ball::zero(prec), Ball::one(prec));
    }
    let xf = x.to_f64();
    let n = (xf / std::f64::consts::FRAC_PI_2).round() as i64;
    const HALVINGS: i64 = 8;
    let wp = prec + HALVINGS as u32 + bits_of(n) + 24;
    let xw = x.clone().with_prec(wp);
    let r = if n != 0 {
        &xw - &pi(wp + bits_of(n)).mul_2exp(-1).mul_i64(n)
    } else {
        xw
    };
    let r = r.mul_2exp(-HALVINGS);
    let r2 = r.sqr();
    let eps = Mag::pow2(-(wp as i64) - 8);
    // sin series
    let mut term = r.clone();
    let mut s = r.clone();
    let mut k = 1i64;
    loop {
        term = (&term * &r2).div_i64((2 * k) * (2 * k + 1)).neg();
        s = &s + &term;
        if term.abs_upper().lt(&eps) || k > 10_000 {
            s = s.add_error(&term.abs_upper());
            break;
        }
        k += 1;
    }
    let mut term = Ball::one(wp);
    let mut c = Ball::one(wp);
    let mut k = 1i64;
    loop {
        term = (&term * &r2).div_i64((2 * k - 1) * (2 * k)).neg();
        c = &c + &term;
        if term.abs_upper().lt(&eps) || k > 10_000 {
            c = c.add_error(&term.abs_upper());
            break;
        }
        k += 1;
    }
    let one = Ball::one(wp);
    for _ in 0..HALVINGS {
        let s2 = (&s * &c).mul_2exp(1);
        let c2 = &one - &s.sqr().mul_2exp(1);
        s = s2;
        c = c2;
    }
    let (s, c) = match n.rem_euclid(4) {
        0 => (s, c),
        1 => (c, s.neg()),
        2 => (s.neg(), c.neg()),
        _ => (c.neg(), s),
    };
    (s.with_prec(prec), c.with_prec(prec))
}

pub fn sin(x: &Ball) -> Ball {
    sin_cos(x).0
}

pub fn cos(x: &Ball) -> Ball {
    sin_cos(x).1
}

/// `sin(πx)`, reduced exactly modulo 2 first so large arguments stay accurate.
pub fn sin_pi(x: &Ball) -> Ball {
    let prec = x.prec();
    let k = x.round_mid_to_bigint();
    let r = x - &Ball::from_bigint(k.clone(), prec + 64);
    let odd = k.bit(0);
    let v = sin(&(&r * &pi(prec + 16)));
    if odd {
        v.neg()
    } else {
        v
    }
}

pub fn atan(x: &Ball) -> Ball {
    let prec = x.prec();
    if !x.is_finite() {
        return Ball::zero(prec).add_error(&Mag::from_u64(2));
    }
    let xf = x.to_f64();
    if xf.abs() > 1.0 {
        let half_pi = pi(prec + 8).mul_2exp(-1);
        let inv = x.inv();
        let a = atan(&inv);
        let r = if xf > 0.0 { &half_pi - &a } else { &half_pi.neg() - &a };
        return r.with_prec(prec);
    }
    let wp = prec + 24;
    let one = Ball::one(wp);
    let mut y = x.clone().with_prec(wp);
    const REDUCTIONS: i64 = 3;
    for _ in 0..REDUCTIONS {
        let d = &one + &(&one + &y.sqr()).sqrt();
        y = &y / &d;
    }
    let y2 = y.sqr();
    let eps = Mag::pow2(-(wp as i64) - 8);
    let mut p = y.clone();
    let mut sum = y.clone();
    let mut k = 1i64;
    loop {
        p = (&p * &y2).neg();
        let t = p.div_i64(2 * k + 1);
        sum = &sum + &t;
        if t.abs_upper().lt(&eps) || k > 100_000 {
            sum = sum.add_error(&p.abs_upper());
            break;
        }
        k += 1;
    }
    sum.mul_2exp(REDUCTIONS).with_prec(prec)
}

/// Argument of `x + iy`; the point must be bounded away from the origin.
pub fn atan2(y: &Ball, x: &Ball) -> Ball {
    let prec = x.prec().max(y.prec());
    let p = pi(prec + 8);
    let xl = x.abs_lower();
    let yl = y.abs_lower();
    if xl.is_zero() && yl.is_zero() {
        return Ball::zero(prec).add_error(&Mag::from_u64(4));
    }
    if x.abs_upper().le(&y.abs_lower()) || xl.is_zero() {
        // near the imaginary axis: arg = ±π/2 - atan(x/y)
        let a = atan(&(x / y));
        let h = p.mul_2exp(-1);
        let r = if y.to_f64() > 0.0 { &h - &a } else { &h.neg() - &a };
        return r.with_prec(prec);
    }
    let a = atan(&(y / x));
    if x.is_positive() {
        a
    } else if y.to_f64() >= 0.0 && !y.is_negative() {
        if y.contains_zero() && !y.is_exact() {
            // branch cut crossed: the result is not continuous here
            return (&a + &p).add_error(&Mag::from_u64(7));
        }
        (&a + &p).with_prec(prec)
    } else {
        (&a - &p).with_prec(prec)
    }
}

pub fn sinh_cosh(x: &Ball) -> (Ball, Ball) {
    let e = exp(x);
    let ei = e.inv();
    ((&e - &ei).mul_2exp(-1), (&e + &ei).mul_2exp(-1))
}

/// `x^y` for positive `x`.
pub fn pow(x: &Ball, y: &Ball) -> Ball {
    exp(&(y * &ln(x)))
}

#[cfg(test)]
mod tests {
    use super::*;

    const PI_STR: &str = "3.14159265358979323846264338327950288419716939937510582097494459230781640628620899862803482534211706798214808651328230664709384460955058223172535940812848111745028410270193852110555964462294895493038196";

    fn dec(s: &str, prec: u32) -> Ball {
        crate::numerics::decimal::parse_decimal(s, prec).unwrap()
    }

    #[test]
    fn pi_matches_reference_digits() {
        let p = pi(600);
        let r = dec(PI_STR, 700);
        assert!(p.overlaps(&r));
        assert!(p.rad().log2() < -590.0);
        assert!((&p - &r).abs_upper().log2() < -580.0);
    }

    #[test]
    fn exp_ln_roundtrip() {
        for v in [1e-30, 0.001, 0.5, 1.0, 2.0, 37.25, 1e10] {
            let x = Ball::from_f64(v, 256);
            let y = ln(&exp(&x));
            assert!(y.overlaps(&x), "{v}");
            assert!(y.rad().log2() < v.log2().max(0.0) - 240.0, "{v}: {:?}", y.rad());
        }
    }

    #[test]
    fn exp_of_one_is_e() {
        let e = exp(&Ball::one(300));
        let r = dec("2.71828182845904523536028747135266249775724709369995957496696762772407663035354759457138217852516642742746", 400);
        assert!(e.overlaps(&r));
        assert!(e.rad().log2() < -295.0);
    }

    #[test]
    fn ln2_known() {
        let r = dec("0.693147180559945309417232121458176568075500134360255254120680009493393621969694715605863326996418687542", 400);
        let l = ln2(300);
        assert!(l.overlaps(&r));
        assert!(ln(&Ball::from_i64(2, 300)).overlaps(&r));
    }

    #[test]
    fn sin_cos_identities() {
        for v in [0.1, 1.0, 2.5, -7.3, 100.0, 1e6] {
            let x = Ball::from_f64(v, 200);
            let (s, c) = sin_cos(&x);
            let one = &s.sqr() + &c.sqr();
            assert!(one.overlaps(&Ball::one(200)), "{v}");
            assert!((s.to_f64() - v.sin()).abs() < 1e-9);
            assert!((c.to_f64() - v.cos()).abs() < 1e-9);
            assert!(s.rad().log2() < -150.0);
        }
        let p = pi(200);
        assert!(sin(&p).abs_upper().log2() < -190.0);
        assert!(sin_pi(&Ball::from_f64(0.5, 200)).overlaps(&Ball::one(200)));
        assert!(sin_pi(&Ball::from_f64(-1.5, 200)).overlaps(&Ball::one(200)));
    }

    #[test]
    fn atan_values() {
        let p4 = pi(256).mul_2exp(-2);
        assert!(atan(&Ball::one(256)).overlaps(&p4));
        let a = atan(&Ball::from_f64(-3.0, 256));
        assert!((a.to_f64() - (-3f64).atan()).abs() < 1e-15);
        let q = atan2(&Ball::from_i64(1, 256), &Ball::from_i64(-1, 256));
        assert!(q.overlaps(&p4.mul_i64(3)));
        let q = atan2(&Ball::from_i64(-1, 256), &Ball::from_i64(-1, 256));
        assert!(q.overlaps(&p4.mul_i64(-3)));
        let q = atan2(&Ball::from_i64(1, 256), &Ball::from_i64(0, 256));
        assert!(q.overlaps(&p4.mul_i64(2)));
    }

    #[test]
    fn exp_of_large_negative_is_tiny_and_enclosing() {
        let e = exp(&Ball::from_i64(-2000, 128));
        assert!(e.is_positive());
        assert!((e.log2_abs() + 2000.0 / std::f64::consts::LN_2).abs() < 1e-6);
    }
}
