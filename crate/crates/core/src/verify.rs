//! Self-checks: each one cross-validates two independent routes to the same
//! quantity and reports pass or fail with a one-line summary.

use crate::asymptotics::laurent::{q, qi, Q};
use crate::asymptotics::mgf::{find_level, qpoly};
use crate::asymptotics::{
    a_coefficients, b_coefficients, mgf_expansion_levels, moment_asymptotic, stieltjes_expansion_levels, Level,
};
use crate::density::{ode_residual_density, rho_real, rho_via_generating_function};
use crate::error::{Error, Result};
use crate::moments::{
    hyp3f2_contiguous_check, m0_exact, m2_recognized, moment_complex_eigs, moment_real_halfint,
    moment_real_int, moment_real_quadrature_multi, moment_sequence_exact, recurrence_coefficients,
    recurrence_residual, trace_moment,
};
use crate::montecarlo::{empirical_real_moments, MCConfig};
use crate::numerics::{elementary as el, Ball, CBall, PrecisionContext};
use crate::transforms::{mgf_ode_residual, stieltjes_ode_residual};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::time::Instant;

/// Grid sizes: `Quick` trims the parameter grids, `Full` uses all of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Quick,
    Full,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

pub const CHECKS: [(u32, &str); 13] = [
    (1, "a-coefficients"),
    (2, "b-coefficients"),
    (3, "mgf-levels"),
    (4, "terminating-tails"),
    (5, "stieltjes-levels"),
    (6, "closed-form-vs-quadrature"),
    (7, "recurrence"),
    (8, "contiguous-relation"),
    (9, "sum-rule"),
    (10, "ode-residuals"),
    (11, "asymptotic-order"),
    (12, "monte-carlo"),
    (13, "generating-function"),
];

type Outcome = Result<(bool, String)>;

fn ctx(bits: u32) -> Result<PrecisionContext> {
    PrecisionContext::new(bits)
}

fn rng(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x6769_6e6f_6500 ^ tag)
}

fn fmt_q(v: &[Q]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn exact_list(got: Vec<Q>, want: &[(i64, i64)]) -> Outcome {
    let want: Vec<Q> = want.iter().map(|&(n, d)| q(n, d)).collect();
    let ok = got == want;
    Ok((ok, format!("got ({})", fmt_q(&got))))
}

fn a_coeffs() -> Outcome {
    exact_list(a_coefficients(5)?, &[(-3, 8), (-3, 128), (27, 1024), (499, 32768)])
}

fn b_coeffs() -> Outcome {
    exact_list(b_coefficients(5)?, &[(3, 8), (-43, 384), (29, 1024), (1859, 98304)])
}

fn mgf_levels() -> Outcome {
    // the level solve checks f''(0) against b_l internally and errors on mismatch
    let levels = mgf_expansion_levels(3)?;
    let lv = |l: Level| find_level(&levels, l).ok_or_else(|| Error::Internal(format!("missing level {l}")));
    let checks = [
        lv(Level::integer(1))?.a_poly() == qpoly(&[(0, 3, 8)]),
        lv(Level::integer(1))?.b_poly() == qpoly(&[(0, -3, 8)]),
        lv(Level::integer(2))?.a_poly() == qpoly(&[(2, 23, 384), (0, 9, 384)]),
        lv(Level::integer(2))?.b_poly() == qpoly(&[(2, -26, 384), (0, -9, 384)]),
        lv(Level::integer(3))?.a_poly() == qpoly(&[(4, 91, 15360), (2, -285, 15360), (0, -405, 15360)]),
        lv(Level::integer(3))?.b_poly() == qpoly(&[(4, -5, 15360), (2, 420, 15360), (0, 405, 15360)]),
        lv(Level::half(1))?.a_hat() == qpoly(&[(1, 1, 8)]),
        lv(Level::half(1))?.b_hat() == qpoly(&[(1, -1, 8)]),
        lv(Level::half(2))?.a_hat() == qpoly(&[(3, 3, 192), (1, -3, 192)]),
        lv(Level::half(2))?.b_hat() == qpoly(&[(3, -2, 192), (1, 3, 192)]),
    ];
    let good = checks.iter().filter(|&&c| c).count();
    Ok((good == checks.len(), format!("{good}/{} closed forms, {} levels solved", checks.len(), levels.len())))
}

fn tails() -> Outcome {
    let levels = mgf_expansion_levels(5)?;
    let want: [&[i64]; 4] = [&[1], &[3, 4], &[6, 22, 24], &[10, 70, 200, 192]];
    let mut ok = true;
    for (p, w) in (2..=5).zip(want) {
        let (s, _) = moment_asymptotic(100, p, 3, &levels, 64)?;
        let got = &s.int_power_coeffs[1..];
        ok &= got == w.iter().map(|&v| qi(v)).collect::<Vec<_>>().as_slice();
    }
    let d = |l: Level, ps: std::ops::RangeInclusive<u32>| -> Result<Vec<Q>> {
        let lv = find_level(&levels, l).ok_or_else(|| Error::Internal("missing level".into()))?;
        Ok(ps.map(|p| lv.derivative_at_zero(2 * p)).collect())
    };
    let d32 = d(Level::half(1), 2..=5)?;
    let d52 = d(Level::half(2), 3..=5)?;
    ok &= d32 == [1, 3, 6, 10].map(qi) && d52 == [4, 22, 70].map(qi);
    Ok((ok, format!("tails p=2..5 exact; u(3/2) derivatives ({}), u(5/2) ({})", fmt_q(&d32), fmt_q(&d52))))
}

fn stieltjes_levels() -> Outcome {
    use crate::asymptotics::stieltjes::RatFn;
    let w = stieltjes_expansion_levels(2)?;
    let r = |c: &[(i32, i64, i64)], m| RatFn::new(qpoly(c), m);
    let forms = w.len() == 6
        && w[0].log_coeff == q(1, 2)
        && w[0].rational.is_zero()
        && w[1].rational == r(&[(1, 1, 2)], 1)
        && w[2].rational == r(&[(3, -3, 8), (1, 9, 8)], 2)
        && w[3].rational == r(&[(1, 1, 1)], 3);
    let o1 = w[2].decay_order(16);
    let o32 = w[3].decay_order(16);
    // level 1 decays exactly like t^-1; level 3/2 is O(t^-3)
    let ok = forms && o1 == Some(1) && o32.is_some_and(|o| o >= 3) && w.iter().all(|l| l.is_odd());
    Ok((ok, format!("closed forms {forms}; level 1 ~ t^-{}, level 3/2 = O(t^-3) (exactly t^-{})", o1.unwrap_or(0), o32.unwrap_or(0))))
}

fn orders(scale: Scale) -> (Vec<u32>, u32) {
    match scale {
        Scale::Quick => (vec![2, 5, 8], 128),
        Scale::Full => ((2..=12).collect(), 256),
    }
}

fn quadrature_oracle(scale: Scale) -> Outcome {
    let (ns, bits) = orders(scale);
    let c = ctx(bits)?;
    let wp = c.working();
    let mut worst = f64::NEG_INFINITY;
    let mut ok = true;
    for &n in &ns {
        let mut ps: Vec<Ball> = (0..=6).map(|p| Ball::from_i64(p, wp)).collect();
        ps.push(Ball::frac(1, 2, wp));
        let quad = moment_real_quadrature_multi(n, &ps, &c)?;
        for (i, qv) in quad.iter().enumerate() {
            let closed = if i == 7 {
                moment_real_halfint(n, 0, &c)?
            } else {
                moment_real_int(n, i as u32, &c)?
            };
            let rel = closed.err().add(&qv.err()).log2() - closed.value.re.log2_abs();
            worst = worst.max(rel);
            ok &= closed.value.overlaps(&qv.value) && rel < -25.0 * 10f64.log2();
        }
    }
    Ok((ok, format!("N in {:?}, {bits} bits, worst relative err 2^{worst:.0}", (ns[0], ns[ns.len() - 1]))))
}

fn recurrence(scale: Scale) -> Outcome {
    let (ns, bits) = orders(scale);
    let c = ctx(bits)?;
    let mut ok = true;
    for &n in &ns {
        let m: Vec<CBall> = (0..=6).map(|p| moment_real_int(n, p, &c).map(|v| v.value)).collect::<Result<_>>()?;
        for p in 2..=6usize {
            let (d, c1, c2) = recurrence_coefficients(n, p as i64);
            let b = |x: &Q| CBall::from_real(Ball::from_rational(x, c.working()));
            let r = m[p].mul(&b(&d)).sub(&m[p - 1].mul(&b(&c1))).add(&m[p - 2].mul(&b(&c2)));
            ok &= r.contains_zero();
        }
    }
    let n_max = if scale == Scale::Full { 20 } else { 8 };
    let mut exact_ok = true;
    let hi = ctx(128)?;
    for n in 2..=n_max {
        let m0 = m0_exact(n)?;
        let Some(m2) = m2_recognized(n)? else {
            exact_ok = false;
            continue;
        };
        let seq = moment_sequence_exact(n, 20, &m0, &m2)?;
        for p in 2..=20usize {
            let (d, c1, c2) = recurrence_coefficients(n, p as i64);
            exact_ok &= seq[p].scale(&d).sub(&seq[p - 1].scale(&c1)).add(&seq[p - 2].scale(&c2)).is_zero();
        }
        let direct = moment_real_int(n, 20, &hi)?;
        exact_ok &= direct.value.re.overlaps(&seq[20].to_ball(256));
    }
    let mut r = rng(7);
    let mut complex_ok = true;
    for _ in 0..10 {
        let n = r.gen_range(2..=12u32);
        let p = CBall::from_f64(r.gen_range(1.6..6.0), r.gen_range(-2.0..2.0), 192);
        complex_ok &= recurrence_residual(n, &p, &ctx(128)?)?.contains_zero();
    }
    Ok((
        ok && exact_ok && complex_ok,
        format!("numeric grid {ok}; exact in Q(sqrt2) for N <= {n_max}, p <= 20: {exact_ok}; 10 complex p: {complex_ok}"),
    ))
}

fn contiguous() -> Outcome {
    let mut r = rng(8);
    let c = ctx(128)?;
    let mut worst = f64::NEG_INFINITY;
    let mut ok = true;
    for i in 0..20 {
        let n = r.gen_range(2..=15u32);
        let im = if i % 2 == 0 { 0.0 } else { r.gen_range(-2.0..2.0) };
        let p = CBall::from_f64(r.gen_range(-0.4..5.0), im, 192);
        let res = hyp3f2_contiguous_check(n, &p, &c)?;
        worst = worst.max(res.abs_upper().log2());
        ok &= res.contains_zero();
    }
    Ok((ok, format!("20 random (N, p), 10 complex; largest residual bound 2^{worst:.0}")))
}

fn sum_rule(scale: Scale) -> Outcome {
    let ns: Vec<u32> = if scale == Scale::Full { (2..=12).collect() } else { vec![2, 5, 9] };
    let c = ctx(128)?;
    let mut ok = true;
    for &n in &ns {
        for p in 1..=6 {
            let total = moment_real_int(n, p, &c)?.value.add(&moment_complex_eigs(n, p, &c)?.value);
            let t = CBall::from_real(Ball::from_biguint(&trace_moment(n, p)?, 256));
            ok &= total.overlaps(&t) && total.rad().log2() < -100.0;
        }
    }
    Ok((ok, format!("N in {:?}, p = 1..6", (ns[0], ns[ns.len() - 1]))))
}

/// Residual bound at `bits` and `2·bits`: both must contain zero and the
/// bound must shrink by at least `2^(bits/2)`.
fn shrinks(f: impl Fn(&PrecisionContext) -> Result<(bool, f64)>, bits: u32) -> Result<(bool, f64, f64)> {
    let (z1, e1) = f(&ctx(bits)?)?;
    let (z2, e2) = f(&ctx(2 * bits)?)?;
    Ok((z1 && z2 && e2 <= e1 - bits as f64 / 2.0, e1, e2))
}

fn ode_residuals(scale: Scale) -> Outcome {
    let mut r = rng(10);
    let points = if scale == Scale::Full { 6 } else { 2 };
    let bits = 64;
    let mut ok = true;
    let mut report = Vec::new();
    let mut worst = [f64::NEG_INFINITY; 3];
    for _ in 0..points {
        let n = r.gen_range(2..=10u32);
        let x = Ball::from_f64(r.gen_range(0.1..4.0), 256);
        let (s, e1, _) = shrinks(
            |c| {
                let v = ode_residual_density(n, &x, c)?;
                Ok((v.contains_zero(), v.abs_upper().log2()))
            },
            bits,
        )?;
        ok &= s;
        worst[0] = worst[0].max(e1);
        let t = Ball::from_f64(r.gen_range(-3.0..3.0), 256);
        let (s, e1, _) = shrinks(
            |c| {
                let v = mgf_ode_residual(n, &t, c)?;
                Ok((v.contains_zero(), v.abs_upper().log2()))
            },
            bits,
        )?;
        ok &= s;
        worst[1] = worst[1].max(e1);
        let z = CBall::from_f64(r.gen_range(-3.0..3.0), r.gen_range(0.5..3.0), 256);
        let (s, e1, _) = shrinks(
            |c| {
                let v = stieltjes_ode_residual(n, &z, c)?;
                Ok((v.contains_zero(), v.abs_upper().log2()))
            },
            bits,
        )?;
        ok &= s;
        worst[2] = worst[2].max(e1);
    }
    report.push(format!(
        "{points} random points each; residual bounds at {bits} bits: density 2^{:.0}, mgf 2^{:.0}, stieltjes 2^{:.0}; all shrink on doubling",
        worst[0], worst[1], worst[2]
    ));
    Ok((ok, report.join("; ")))
}

fn asymptotic_order() -> Outcome {
    let levels = mgf_expansion_levels(5)?;
    let a5 = a_coefficients(6)?[4].clone();
    let b5 = b_coefficients(6)?[4].clone();
    let c = ctx(192)?;
    let prec = 256;
    let mut out = Vec::new();
    let mut ok = true;
    for (p, lead) in [(0u32, a5), (1, b5)] {
        let (series, _) = moment_asymptotic(100, p, 5, &levels, prec)?;
        let mut ratios = Vec::new();
        for n in [50u64, 100, 200, 400] {
            let exact = if p == 0 { m0_exact(n as u32)?.to_ball(prec) } else { moment_real_int(n as u32, 1, &c)?.value.re };
            let approx = series.eval(n, prec);
            let nb = Ball::from_i64(n as i64, prec);
            let scale = &(&el::sqrt_2_over_pi(prec) * &nb.sqrt()) * &nb.pow_i(p as i64 - 5);
            ratios.push((&(&exact - &approx) / &scale).to_f64());
        }
        let lf = num_traits::ToPrimitive::to_f64(&lead).unwrap_or(f64::NAN);
        let (lo, hi) = ratios.iter().fold((f64::MAX, f64::MIN), |(l, h), &v| (l.min(v), h.max(v)));
        let steady = lo * hi > 0.0 && hi.abs() / lo.abs() < 1.5 && lo.abs() / hi.abs() < 1.5;
        let limit = ((ratios[3] - lf) / lf).abs() < 0.05;
        ok &= steady && limit;
        out.push(format!(
            "{} scaled remainder {:?} -> {lf:.6}",
            if p == 0 { "M0" } else { "M2" },
            ratios.iter().map(|v| format!("{v:.5}")).collect::<Vec<_>>()
        ));
    }
    Ok((ok, out.join("; ")))
}

fn monte_carlo(scale: Scale) -> Outcome {
    let samples = if scale == Scale::Full { 100_000 } else { 10_000 };
    let c = ctx(64)?;
    let mut ok = true;
    let mut out = Vec::new();
    for n in [2u32, 6, 10] {
        let mut cfg = MCConfig::new(n as usize, samples, 2024 + n as u64);
        let s = empirical_real_moments(&cfg, &[0, 1, 2], None)?;
        cfg.workers = 4;
        let same = empirical_real_moments(&cfg, &[0, 1, 2], None)? == s;
        let parity = s.count_histogram.iter().enumerate().all(|(k, c)| *c == 0 || k % 2 == n as usize % 2);
        let mass = s.count_histogram.iter().sum::<u64>() + s.failures == samples && s.failures == 0;
        let mut zs = Vec::new();
        for (i, p) in [0u32, 1, 2].iter().enumerate() {
            let exact = moment_real_int(n, *p, &c)?.value.re.to_f64();
            zs.push((s.means[i] - exact) / s.std_errors[i]);
        }
        let within = zs.iter().all(|z| z.abs() < 4.0);
        ok &= same && parity && mass && within;
        out.push(format!("N={n} z=({})", zs.iter().map(|z| format!("{z:+.2}")).collect::<Vec<_>>().join(", ")));
    }
    Ok((ok, format!("{samples} samples; {}", out.join("; "))))
}

fn generating_function() -> Outcome {
    let c = ctx(128)?;
    let xs = ["0.1", "0.75", "1.5", "2.25", "3.3"];
    let mut ok = true;
    for n in 2..=10 {
        for s in xs {
            let x = crate::numerics::decimal::parse_decimal(s, 256)?;
            let a = rho_via_generating_function(n, &x, &c)?;
            let b = rho_real(n, &x, &c)?;
            ok &= a.overlaps(&b) && a.rel_ok(100);
        }
    }
    Ok((ok, "N = 2..10 at x in {0.1, 0.75, 1.5, 2.25, 3.3}".into()))
}

/// Run check `id` (1..=13).
pub fn run_check(id: u32, scale: Scale) -> Check {
    let start = Instant::now();
    let out = match id {
        1 => a_coeffs(),
        2 => b_coeffs(),
        3 => mgf_levels(),
        4 => tails(),
        5 => stieltjes_levels(),
        6 => quadrature_oracle(scale),
        7 => recurrence(scale),
        8 => contiguous(),
        9 => sum_rule(scale),
        10 => ode_residuals(scale),
        11 => asymptotic_order(),
        12 => monte_carlo(scale),
        13 => generating_function(),
        _ => Err(Error::Usage(format!("no check {id}"))),
    };
    let name = CHECKS.iter().find(|c| c.0 == id).map_or("unknown", |c| c.1);
    let (passed, detail) = match out {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    Check {
        id,
        name,
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn run_all(scale: Scale) -> Vec<Check> {
    CHECKS.iter().map(|&(id, _)| run_check(id, scale)).collect()
}
