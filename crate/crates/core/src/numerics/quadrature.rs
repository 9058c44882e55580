//! Adaptive Gauss–Legendre quadrature for vector-valued integrands.
//!
//! Each panel is accepted once the rule on the whole panel and the sum of the
//! rules on its two halves agree to the local share of the tolerance; the
//! disagreement is added to the result's radius. Initial panels are evaluated
//! in parallel and summed in a fixed pairwise order.

use super::ball::Ball;
use super::mag::Mag;
use super::scalar::Scalar;
use crate::error::{Error, Result};
use rayon::prelude::*;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Nodes and weights on `[-1, 1]`.
#[derive(Debug)]
pub struct Rule {
    pub nodes: Vec<Ball>,
    pub weights: Vec<Ball>,
}

fn legendre_with_derivative(n: usize, x: &Ball) -> (Ball, Ball) {
    let prec = x.prec();
    let mut p0 = Ball::one(prec);
    let mut p1 = x.clone();
    for k in 2..=n {
        let k = k as i64;
        // k P_k = (2k-1) x P_{k-1} - (k-1) P_{k-2}
        let p2 = (&(&p1 * x).mul_i64(2 * k - 1) - &p0.mul_i64(k - 1)).div_i64(k);
        p0 = p1;
        p1 = p2;
    }
    // (1 - x²) P_n' = n (P_{n-1} - x P_n)
    let one_minus = &Ball::one(prec) - &x.sqr();
    let d = (&p0 - &(x * &p1)).mul_i64(n as i64);
    (p1, &d / &one_minus)
}

fn compute_rule(n: usize, prec: u32) -> Rule {
    let wp = prec + 32;
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let half = n.div_ceil(2);
    let mut pos = Vec::with_capacity(half);
    for i in 0..half {
        let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut x = Ball::from_f64(guess, wp);
        for _ in 0..64 {
            let (p, dp) = legendre_with_derivative(n, &x);
            let step = (&p / &dp).mid();
            x = (&x - &step).mid();
            if step.mid_is_zero() || step.log2_abs() < -(wp as f64) + 2.0 {
                break;
            }
        }
        let (p, dp) = legendre_with_derivative(n, &x);
        x = (&x - &(&p / &dp)).mid();
        let (_, dp) = legendre_with_derivative(n, &x);
        let one_minus = &Ball::one(wp) - &x.sqr();
        let w = Ball::from_i64(2, wp).div(&(&one_minus * &dp.sqr())).mid();
        pos.push((x.with_prec(prec), w.with_prec(prec)));
    }
    for (x, w) in pos.iter().rev() {
        if x.mid_is_zero() {
            continue;
        }
        nodes.push(x.neg());
        weights.push(w.clone());
    }
    for (x, w) in pos.iter() {
        if x.mid_is_zero() && nodes.iter().any(|y| y.mid_is_zero()) {
            continue;
        }
        nodes.push(x.clone());
        weights.push(w.clone());
    }
    let mut pairs: Vec<(Ball, Ball)> = nodes.into_iter().zip(weights).collect();
    pairs.sort_by(|a, b| a.0.to_f64().partial_cmp(&b.0.to_f64()).unwrap());
    let (nodes, weights) = pairs.into_iter().unzip();
    Rule { nodes, weights }
}

type RuleCache = Mutex<HashMap<(usize, u32), Arc<Rule>>>;

/// The `n`-point Gauss–Legendre rule at precision `prec`, cached.
pub fn gauss_legendre(n: usize, prec: u32) -> Arc<Rule> {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().unwrap().get(&(n, prec)) {
        return r.clone();
    }
    let r = Arc::new(compute_rule(n, prec));
    cache.lock().unwrap().insert((n, prec), r.clone());
    r
}

/// Rule size used for a given working precision.
pub fn default_degree(prec: u32) -> usize {
    ((prec / 6) as usize + 8).clamp(16, 96)
}

#[derive(Debug, Clone)]
pub struct QuadOptions {
    pub prec: u32,
    /// Relative tolerance `2^-tol_bits` against the magnitude of each component.
    pub tol_bits: u32,
    pub degree: usize,
    pub max_depth: u32,
    /// Width of the initial uniform panels.
    pub panel_width: f64,
}

impl QuadOptions {
    pub fn new(prec: u32, tol_bits: u32) -> Self {
        QuadOptions {
            prec,
            tol_bits,
            degree: default_degree(prec),
            max_depth: 24,
            panel_width: 1.0,
        }
    }
}

fn panel<S, F>(f: &F, a: &Ball, b: &Ball, rule: &Rule, dim: usize) -> Result<Vec<S>>
where
    S: Scalar,
    F: Fn(&Ball) -> Result<Vec<S>>,
{
    let half = (b - a).mul_2exp(-1);
    let mid = (a + b).mul_2exp(-1);
    let mut acc: Option<Vec<S>> = None;
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        let xx = &mid + &(&half * x);
        let v = f(&xx)?;
        if v.len() != dim {
            return Err(Error::Internal("integrand returned wrong dimension".into()));
        }
        acc = Some(match acc {
            None => v.iter().map(|c| c.mul_ball(w)).collect(),
            Some(s) => s.iter().zip(&v).map(|(s, c)| s.add(&c.mul_ball(w))).collect(),
        });
    }
    Ok(acc.unwrap().iter().map(|c| c.mul_ball(&half)).collect())
}

fn add_vec<S: Scalar>(x: &[S], y: &[S]) -> Vec<S> {
    x.iter().zip(y).map(|(a, b)| a.add(b)).collect()
}

#[allow(clippy::too_many_arguments)]
fn refine<S, F>(
    f: &F,
    a: &Ball,
    b: &Ball,
    coarse: Vec<S>,
    rule: &Rule,
    tol: &[Mag],
    depth: u32,
    max_depth: u32,
) -> Result<Vec<S>>
where
    S: Scalar,
    F: Fn(&Ball) -> Result<Vec<S>>,
{
    let dim = coarse.len();
    let m = (a + b).mul_2exp(-1);
    let left = panel(f, a, &m, rule, dim)?;
    let right = panel(f, &m, b, rule, dim)?;
    let fine = add_vec(&left, &right);
    let diffs: Vec<Mag> = coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| c.sub(f).abs_upper())
        .collect();
    let ok = diffs
        .iter()
        .zip(tol)
        .zip(coarse.iter().zip(&fine))
        .all(|((d, t), (c, f))| d.le(&t.add(&c.rad().add(&f.rad()).mul_2exp(1))));
    if ok || depth >= max_depth {
        return Ok(fine.into_iter().zip(&diffs).map(|(v, d)| v.add_error(d)).collect());
    }
    let half_tol: Vec<Mag> = tol.iter().map(|t| t.mul_2exp(-1)).collect();
    let l = refine(f, a, &m, left, rule, &half_tol, depth + 1, max_depth)?;
    let r = refine(f, &m, b, right, rule, &half_tol, depth + 1, max_depth)?;
    Ok(add_vec(&l, &r))
}

fn pairwise_sum<S: Scalar>(mut parts: Vec<Vec<S>>) -> Vec<S> {
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(x) = it.next() {
            match it.next() {
                Some(y) => next.push(add_vec(&x, &y)),
                None => next.push(x),
            }
        }
        parts = next;
    }
    parts.pop().unwrap_or_default()
}

/// Integrate a vector-valued `f` over `[a, b]`.
pub fn integrate<S, F>(f: &F, a: &Ball, b: &Ball, dim: usize, opts: &QuadOptions) -> Result<Vec<S>>
where
    S: Scalar,
    F: Fn(&Ball) -> Result<Vec<S>> + Sync,
{
    let rule = gauss_legendre(opts.degree, opts.prec);
    let width = (b - a).to_f64();
    if !(width > 0.0) {
        return Ok((0..dim).map(|_| S::from_i64(0, opts.prec)).collect());
    }
    let count = ((width / opts.panel_width).ceil() as i64).max(1);
    let edges: Vec<Ball> = (0..=count)
        .map(|i| {
            if i == count {
                b.clone()
            } else {
                a + &(&(b - a) * &Ball::frac(i, count, opts.prec))
            }
        })
        .collect();
    let coarse: Vec<Vec<S>> = (0..count as usize)
        .into_par_iter()
        .map(|i| panel(f, &edges[i], &edges[i + 1], &rule, dim))
        .collect::<Result<_>>()?;
    // tolerance: share of 2^-tol_bits times the total magnitude, per unit width
    let mut scale = vec![Mag::zero(); dim];
    for p in &coarse {
        for (s, v) in scale.iter_mut().zip(p) {
            *s = s.add(&v.abs_upper());
        }
    }
    let tol_total: Vec<Mag> = scale
        .iter()
        .map(|s| s.mul_2exp(-(opts.tol_bits as i64)))
        .collect();
    let refined: Vec<Vec<S>> = coarse
        .into_par_iter()
        .enumerate()
        .map(|(i, c)| {
            let tol: Vec<Mag> = tol_total
                .iter()
                .map(|t| t.div(&Mag::from_u64(count as u64)))
                .collect();
            refine(f, &edges[i], &edges[i + 1], c, &rule, &tol, 0, opts.max_depth)
        })
        .collect::<Result<_>>()?;
    Ok(pairwise_sum(refined))
}

/// Integrate a scalar `f` over `[a, b]`.
pub fn integrate_scalar<S, F>(f: &F, a: &Ball, b: &Ball, opts: &QuadOptions) -> Result<S>
where
    S: Scalar,
    F: Fn(&Ball) -> Result<S> + Sync,
{
    let g = |x: &Ball| f(x).map(|v| vec![v]);
    Ok(integrate(&g, a, b, 1, opts)?.pop().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::elementary as el;
    use crate::numerics::incgamma;
    use crate::numerics::CBall;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let r = gauss_legendre(10, 200);
        assert_eq!(r.nodes.len(), 10);
        for k in 0..20i64 {
            let mut s = Ball::zero(200);
            for (x, w) in r.nodes.iter().zip(&r.weights) {
                s = &s + &(w * &x.pow_u(k as u64));
            }
            let exact = if k % 2 == 1 {
                Ball::zero(200)
            } else {
                Ball::frac(2, k + 1, 200)
            };
            assert!((&s - &exact).abs_upper().log2() < -180.0, "k={k}");
        }
        assert_eq!(gauss_legendre(11, 200).nodes.len(), 11);
    }

    #[test]
    fn erf_one_by_quadrature() {
        let prec = 256;
        let opts = QuadOptions::new(prec, 240);
        let f = |x: &Ball| Ok(el::exp(&x.sqr().neg()));
        let v: Ball = integrate_scalar(&f, &Ball::zero(prec), &Ball::one(prec), &opts).unwrap();
        let v = &v.mul_2exp(1) / &el::sqrt_pi(prec);
        let e = incgamma::erf(&Ball::one(prec));
        assert!((&v - &e).abs_upper().log2() < -230.0);
        assert!(v.overlaps(&e));
    }

    #[test]
    fn vector_and_complex_components() {
        let prec = 192;
        let opts = QuadOptions::new(prec, 170);
        let f = |x: &Ball| {
            let e = el::exp(&x.neg());
            Ok(vec![
                CBall::from_real(e.clone()),
                CBall::new(Ball::zero(prec), x * &e),
            ])
        };
        let v = integrate(&f, &Ball::zero(prec), &Ball::from_i64(3, prec), 2, &opts).unwrap();
        let e3 = el::exp(&Ball::from_i64(-3, prec));
        let a = &Ball::one(prec) - &e3;
        let b = &Ball::one(prec) - &e3.mul_i64(4);
        assert!(v[0].re.overlaps(&a));
        assert!(v[1].im.overlaps(&b));
        assert!(v[1].re.mid_is_zero());
    }
}
