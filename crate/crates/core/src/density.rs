//! Densities of real and complex eigenvalues of an N×N real Ginibre matrix.
//!
//! For `x > 0` write `a(x) = x^(2N-3) e^(-x²)` and
//! `b(x) = 2^((N-3)/2) e^(-x²/2) x^(N-2) γ((N-1)/2, x²/2)`. Then
//! `ρ = C (Γ(N-1, x²) + x b)` with `C = 1/(√(2π) (N-2)!)`, and every
//! derivative of `ρ` is `C (α a + β b)` with Laurent polynomials `α, β` obtained
//! from `a' = ((2N-3)/x - 2x) a` and `b' = ((N-2)/x - x) b + a/x`.

use crate::asymptotics::laurent::{qi, Laurent};
use crate::error::{Error, Result};
use crate::numerics::context::refine;
use crate::numerics::incgamma::{erf, erfc, lower_gamma, upper_gamma};
use crate::numerics::{elementary as el, gamma::factorial, Ball, PrecisionContext};
use crate::series::{ps_exp, ps_mul, NumSeries, Series};
use num_bigint::BigInt;
use num_rational::BigRational as Q;
use num_traits::One;

/// Largest N accepted by [`rho_via_generating_function`].
pub const GF_MAX_N: u32 = 30;

#[derive(Debug, Clone)]
pub struct DensityPoint {
    pub n: u32,
    pub x: Ball,
    pub rho: Ball,
    /// `ρ', ρ'', ρ'''` when requested.
    pub derivs: Option<[Ball; 3]>,
}

#[derive(Debug, Clone)]
pub struct ComplexDensityPoint {
    pub n: u32,
    pub x: Ball,
    pub y: Ball,
    pub rho: Ball,
}

fn check_n(n: u32) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain(format!("density needs N >= 2, got {n}")));
    }
    Ok(())
}

/// `1/(√(2π) (N-2)!)`.
fn norm(n: u32, prec: u32) -> Ball {
    let f = Ball::from_biguint(&factorial((n - 2) as u64), prec);
    &el::inv_sqrt_2pi(prec) / &f
}

fn a_fn(n: u32, x: &Ball) -> Ball {
    &x.pow_u(2 * n as u64 - 3) * &el::exp(&x.sqr().neg())
}

fn b_fn(n: u32, x: &Ball) -> Result<Ball> {
    let prec = x.prec();
    let k = el::sqrt2(prec).pow_i(n as i64 - 3);
    let half_x2 = x.sqr().mul_2exp(-1);
    let g = lower_gamma(&Ball::frac(n as i64 - 1, 2, prec), &half_x2)?;
    Ok(&(&(&k * &el::exp(&half_x2.neg())) * &x.pow_u(n as u64 - 2)) * &g)
}

/// `ρ(x)` for `x ≥ 0` at the precision of `x`.
pub(crate) fn rho_abs(n: u32, x: &Ball) -> Result<Ball> {
    let prec = x.prec();
    let t1 = upper_gamma(&Ball::from_i64(n as i64 - 1, prec), &x.sqr())?;
    let t2 = x * &b_fn(n, x)?;
    Ok(&norm(n, prec) * &(&t1 + &t2))
}

/// `ρ_N^r(x)`.
pub fn rho_real(n: u32, x: &Ball, ctx: &PrecisionContext) -> Result<Ball> {
    check_n(n)?;
    refine(
        ctx,
        |wp| rho_abs(n, &x.clone().with_prec(wp).abs()),
        |v| v.rel_ok(ctx.target_bits),
    )
}

/// `ρ_N^c(x + iy)`.
pub fn rho_complex(n: u32, x: &Ball, y: &Ball, ctx: &PrecisionContext) -> Result<Ball> {
    check_n(n)?;
    if y.is_exact() && y.mid_is_zero() {
        return Ok(Ball::zero(ctx.working()));
    }
    refine(
        ctx,
        |wp| {
            let x = x.clone().with_prec(wp);
            let y = y.clone().with_prec(wp).abs();
            let y2 = y.sqr();
            let r2 = &x.sqr() + &y2;
            let e = &erfc(&(&y * &el::sqrt2(wp))) * &el::exp(&y2.mul_2exp(1));
            let g = upper_gamma(&Ball::from_i64(n as i64 - 1, wp), &r2)?;
            let gn = Ball::from_biguint(&factorial((n - 2) as u64), wp);
            Ok(&(&(&el::sqrt_2_over_pi(wp) * &y) * &e) * &(&g / &gn))
        },
        |v| v.rel_ok(ctx.target_bits),
    )
}

/// `(α_k, β_k)` for `k = 1..=3`.
fn derivative_coefficients(n: u32) -> Vec<(Laurent, Laurent)> {
    let ni = n as i64;
    let ka = Laurent::monomial(qi(2 * ni - 3), -1).add(&Laurent::monomial(qi(-2), 1));
    let kb = Laurent::monomial(qi(ni - 2), -1).add(&Laurent::monomial(qi(-1), 1));
    let inv_x = Laurent::monomial(qi(1), -1);
    let mut out = vec![(Laurent::constant(qi(-1)), Laurent::from_ints(&[ni - 1, 0, -1]))];
    for _ in 0..2 {
        let (al, be) = out.last().unwrap();
        let na = al.derivative().add(&al.mul(&ka)).add(&be.mul(&inv_x));
        let nb = be.derivative().add(&be.mul(&kb));
        out.push((na, nb));
    }
    out
}

fn eval_laurent(l: &Laurent, x: &Ball) -> Ball {
    let prec = x.prec();
    l.terms().fold(Ball::zero(prec), |acc, (k, c)| {
        &acc + &(&Ball::from_rational(c, prec) * &x.pow_i(k as i64))
    })
}

/// `ρ^(k)(0)` from the leading behaviour `a, b ~ x^(2N-3) (1, 1/(N-1))`.
fn derivative_at_zero(n: u32, al: &Laurent, be: &Laurent, prec: u32) -> Result<Ball> {
    let lead = -(2 * n as i32 - 3);
    for l in [al, be] {
        if l.low().is_some_and(|lo| lo < lead) {
            return Err(Error::Domain(format!(
                "derivative of the N = {n} density is singular at x = 0"
            )));
        }
    }
    let v = al.coeff(lead) + be.coeff(lead) / qi(n as i64 - 1);
    Ok(&norm(n, prec) * &Ball::from_rational(&v, prec))
}

fn derivatives_abs(n: u32, x: &Ball, coeffs: &[(Laurent, Laurent)]) -> Result<[Ball; 4]> {
    let prec = x.prec();
    let rho = rho_abs(n, x)?;
    let mut d = Vec::with_capacity(3);
    if x.is_exact() && x.mid_is_zero() {
        for (al, be) in coeffs {
            d.push(derivative_at_zero(n, al, be, prec)?);
        }
    } else {
        let (a, b) = (a_fn(n, x), b_fn(n, x)?);
        let c = norm(n, prec);
        for (al, be) in coeffs {
            let v = &(&eval_laurent(al, x) * &a) + &(&eval_laurent(be, x) * &b);
            d.push(&c * &v);
        }
    }
    let [d1, d2, d3]: [Ball; 3] = d.try_into().unwrap();
    Ok([rho, d1, d2, d3])
}

/// `(ρ, ρ', ρ'', ρ''')` by exact differentiation; at `x = 0` the limits.
pub fn rho_real_derivatives(n: u32, x: &Ball, ctx: &PrecisionContext) -> Result<[Ball; 4]> {
    check_n(n)?;
    if n == 2 && x.contains_zero() {
        return Err(Error::Domain("the N = 2 density has a corner at x = 0".into()));
    }
    let coeffs = derivative_coefficients(n);
    let neg = x.is_negative();
    let [r, d1, d2, d3] = refine(
        ctx,
        |wp| derivatives_abs(n, &x.clone().with_prec(wp).abs(), &coeffs),
        |v| v.iter().all(|b| b.rel_ok(ctx.target_bits) || b.abs_upper().log2() < -(ctx.target_bits as f64)),
    )?;
    Ok(if neg { [r, d1.neg(), d2, d3.neg()] } else { [r, d1, d2, d3] })
}

/// `x²ρ''' + x(3x² - 3N + 4)ρ'' + (2x² - 2N + 1)(x² - N + 2)ρ'`.
pub fn ode_residual_density(n: u32, x: &Ball, ctx: &PrecisionContext) -> Result<Ball> {
    check_n(n)?;
    if x.is_exact() && x.mid_is_zero() {
        return Ok(Ball::zero(ctx.working()));
    }
    let [_, d1, d2, d3] = rho_real_derivatives(n, x, ctx)?;
    let x = x.clone().with_prec(ctx.working());
    let ni = n as i64;
    let x2 = x.sqr();
    let c2 = &x * &(&x2.mul_i64(3)).add_i64(4 - 3 * ni);
    let c1 = &x2.mul_i64(2).add_i64(1 - 2 * ni) * &x2.add_i64(2 - ni);
    Ok(&(&(&x2 * &d3) + &(&c2 * &d2)) + &(&c1 * &d1))
}

/// Series of `erf(c(1 - z))` in `z`.
fn erf_shifted_series(c: &Ball, order: usize) -> Result<NumSeries> {
    let prec = c.prec();
    let c2 = c.sqr();
    // d/dz erf(c(1-z)) = -(2c/√π) e^(-c²) exp(2c² z - c² z²)
    let mut arg = vec![Ball::zero(prec); order + 1];
    if order >= 1 {
        arg[1] = c2.mul_2exp(1);
    }
    if order >= 2 {
        arg[2] = c2.neg();
    }
    let e = ps_exp(&Series::new(arg))?;
    let scale = (&(&c.mul_2exp(1) / &el::sqrt_pi(prec)) * &el::exp(&c2.neg())).neg();
    let integral = e.truncate(order.saturating_sub(1)).integral(Ball::zero(prec)).scale(&scale);
    Ok(integral.add(&Series::constant(erf(c), order)))
}

/// Series of `erf(c z)` in `z`.
fn erf_linear_series(c: &Ball, order: usize) -> NumSeries {
    let prec = c.prec();
    let two_over_sqrt_pi = el::sqrt_pi(prec).inv().mul_2exp(1);
    let c2 = c.sqr();
    let mut coeffs = vec![Ball::zero(prec); order + 1];
    let mut p = c.clone();
    let mut k = 0i64;
    while (2 * k + 1) as usize <= order {
        coeffs[(2 * k + 1) as usize] = &(&p / &Ball::from_i64(2 * k + 1, prec)) * &two_over_sqrt_pi;
        k += 1;
        p = (&p * &c2).div_i64(k).neg();
    }
    Series::new(coeffs)
}

fn gf_coefficient(n: u32, y: &Ball) -> Result<Ball> {
    let prec = y.prec();
    let order = n as usize;
    let y2 = y.sqr();
    let zero = || Ball::zero(prec);
    // z/√(2π) (e^(-y²/2) + z/(1-z) e^(-y²) exp(y² z))
    let mut lin = vec![zero(); order + 1];
    lin[1] = y2.clone();
    let e1 = ps_exp(&Series::new(lin))?.scale(&el::exp(&y2.neg()));
    let geo = Series::new(vec![Ball::one(prec); order + 1]);
    let part = ps_mul(&geo, &e1).shift(1).add(&Series::constant(el::exp(&y2.mul_2exp(-1).neg()), order));
    let a = part.shift(1).scale(&el::inv_sqrt_2pi(prec));
    // (z² y/2) e^(-y²/2) exp(y² z²/2) (erf(z c) + erf((1-z) c)), c = y/√2
    let c = y / &el::sqrt2(prec);
    let mut quad = vec![zero(); order + 1];
    if order >= 2 {
        quad[2] = y2.mul_2exp(-1);
    }
    let e2 = ps_exp(&Series::new(quad))?;
    let erfs = erf_linear_series(&c, order).add(&erf_shifted_series(&c, order)?);
    let pre = &y.mul_2exp(-1) * &el::exp(&y2.mul_2exp(-1).neg());
    let b = ps_mul(&e2, &erfs).shift(2).scale(&pre);
    Ok(a.add(&b).coeff(order))
}

/// `ρ_N^r(x)` as the coefficient of `z^N` in its generating function.
pub fn rho_via_generating_function(n: u32, x: &Ball, ctx: &PrecisionContext) -> Result<Ball> {
    check_n(n)?;
    if n > GF_MAX_N {
        return Err(Error::Domain(format!(
            "generating-function route limited to N <= {GF_MAX_N}, got {n}"
        )));
    }
    refine(
        ctx,
        |wp| gf_coefficient(n, &x.clone().with_prec(wp + 2 * n).abs()),
        |v| v.rel_ok(ctx.target_bits),
    )
}

/// Exact Taylor coefficients `d_k` of `√(2π) ρ(x) = Σ d_k x^(2k)` near 0.
pub fn rho_taylor_coefficients(n: u32, terms: usize) -> Result<Vec<Q>> {
    check_n(n)?;
    let m = (n - 2) as usize;
    let fact = |k: usize| Q::from_integer(factorial(k as u64).into());
    let signed = |k: usize| if k % 2 == 0 { Q::one() } else { -Q::one() };
    let pow2 = |k: usize| Q::from_integer(BigInt::from(2).pow(k as u32));
    // Γ(N-1, x²)/(N-2)! = e^(-x²) Σ_{j≤N-2} x^(2j)/j!
    let mut out: Vec<Q> = (0..terms)
        .map(|k| (0..=m.min(k)).map(|j| signed(k - j) / (fact(j) * fact(k - j))).sum())
        .collect();
    // x b(x) = x^(2N-2) e^(-x²/2) Σ_i (-1)^i x^(2i) / (2^(i+1) i! (s+i)), s = (N-1)/2
    let s = Q::new((n as i64 - 1).into(), 2.into());
    let inner: Vec<Q> = (0..terms)
        .map(|i| signed(i) / (pow2(i + 1) * fact(i) * (&s + Q::from_integer(i.into()))))
        .collect();
    let shift = (n - 1) as usize;
    for k in shift..terms {
        let kk = k - shift;
        let acc: Q = (0..=kk)
            .map(|i| &inner[i] * signed(kk - i) / (fact(kk - i) * pow2(kk - i)))
            .sum();
        out[k] += acc / fact(m);
    }
    Ok(out)
}
