//! Large-N coefficients of M₀ and M₂, and the large-parameter expansion of
//! the Gauss function.

use super::laurent::{q, qi, Q};
use crate::error::{Error, Result};
use crate::series::{ps_div, ps_exp_linear, ps_mul, ps_pow, ps_expm1_over_t, PowerSeries, Series};
use num_traits::One;

pub use crate::numerics::gamma::gamma_half_integer_over_sqrt_pi as gamma_half_over_sqrt_pi;

/// Rising factorial `(x)_n`.
pub fn pochhammer(x: &Q, n: usize) -> Q {
    (0..n).fold(Q::one(), |acc, k| acc * (x + qi(k as i64)))
}

fn check_m(m: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::Domain(format!("expansion order m must be at least 2, got {m}")));
    }
    Ok(())
}

/// `((e^t - 1)/t)^r`.
fn bracket(r: Q, order: usize) -> PowerSeries {
    ps_pow(&ps_expm1_over_t(order), &r).expect("unit constant term")
}

fn exp_lin(c: i64, order: usize) -> PowerSeries {
    ps_exp_linear(&qi(c), order)
}

fn plus_const(s: &PowerSeries, c: i64) -> PowerSeries {
    s.add(&Series::constant(qi(c), s.order()))
}

/// Generator of the M₀ coefficients, `((e^t-1)/t)^(-3/2) e^(2t) / (e^t + 1)`.
pub fn a_generator(order: usize) -> PowerSeries {
    let num = ps_mul(&bracket(q(-3, 2), order), &exp_lin(2, order));
    ps_div(&num, &plus_const(&exp_lin(1, order), 1)).expect("nonzero constant")
}

/// Generator of the M₂ coefficients, `((e^t-1)/t)^(-5/2) e^(2t) (e^t - 3) / (e^t + 1)²`.
pub fn b_generator(order: usize) -> PowerSeries {
    let e = exp_lin(1, order);
    let num = ps_mul(&ps_mul(&bracket(q(-5, 2), order), &exp_lin(2, order)), &plus_const(&e, -3));
    let den = plus_const(&e, 1);
    ps_div(&num, &ps_mul(&den, &den)).expect("nonzero constant")
}

/// `a_1 .. a_{m-1}` of `M₀ ≈ √(2N/π)(1 + Σ a_l N^-l) + 1/2`.
pub fn a_coefficients(m: usize) -> Result<Vec<Q>> {
    check_m(m)?;
    let g = a_generator(m - 1);
    Ok((1..m)
        .map(|l| -gamma_half_over_sqrt_pi(l as i64 - 1) * g.coeff(l))
        .collect())
}

/// `b_1 .. b_{m-1}` of `M₂/N ≈ √(2N/π)(1/3 + Σ b_l N^-l) + 1/2`.
pub fn b_coefficients(m: usize) -> Result<Vec<Q>> {
    check_m(m)?;
    let g = b_generator(m - 1);
    Ok((1..m)
        .map(|l| -q(1, 2) * gamma_half_over_sqrt_pi(l as i64 - 2) * g.coeff(l))
        .collect())
}

/// `a_0 .. a_k` with `a_0 = 1`.
pub fn a_with_leading(k: usize) -> Vec<Q> {
    let mut v = vec![Q::one()];
    if k >= 1 {
        v.extend(a_coefficients(k + 1).expect("m >= 2"));
    }
    v
}

/// `b_0 .. b_k` with `b_0 = 1/3`.
pub fn b_with_leading(k: usize) -> Vec<Q> {
    let mut v = vec![q(1, 3)];
    if k >= 1 {
        v.extend(b_coefficients(k + 1).expect("m >= 2"));
    }
    v
}

/// Large-λ expansion of `₂F₁(a, b; c + λ; z)`:
/// `Γ(c+λ)/Γ(c-b+λ) · Σ_{s<m} q_s(z) (b)_s λ^(-s-b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gauss2F1Expansion {
    pub a: Q,
    pub b: Q,
    pub c: Q,
    pub z: Q,
    /// `q_0(z) .. q_{m-1}(z)`.
    pub q: Vec<Q>,
    /// `q_s(z) · (b)_s`, the coefficient of `λ^(-s-b)`.
    pub terms: Vec<Q>,
}

/// `q_s(z)` from `((e^t-1)/t)^(b-1) e^(t(1-c)) (1 - z + z e^(-t))^(-a)`.
pub fn gauss_2f1_large_c_expansion(a: &Q, b: &Q, c: &Q, z: &Q, m: usize) -> Result<Gauss2F1Expansion> {
    if m < 1 {
        return Err(Error::Domain("expansion needs at least one term".into()));
    }
    let order = m - 1;
    let br = bracket(b - Q::one(), order);
    let ex = ps_exp_linear(&(Q::one() - c), order);
    // 1 - z + z e^{-t}
    let inner = ps_exp_linear(&qi(-1), order)
        .scale_rat(z)
        .add(&Series::constant(Q::one() - z, order));
    // the constant term of 1 - z + z e^{-t} is exactly 1
    let powered = ps_pow(&inner, &(-a)).expect("unit constant term");
    let s = ps_mul(&ps_mul(&br, &ex), &powered);
    let qv: Vec<Q> = (0..m).map(|k| s.coeff(k)).collect();
    let terms = qv.iter().enumerate().map(|(k, v)| v * pochhammer(b, k)).collect();
    Ok(Gauss2F1Expansion {
        a: a.clone(),
        b: b.clone(),
        c: c.clone(),
        z: z.clone(),
        q: qv,
        terms,
    })
}

/// `a_l` through the Gauss expansion with `a = 1, b = -1/2, c = 0, z = 1/2`.
pub fn a_coefficients_via_gauss(m: usize) -> Result<Vec<Q>> {
    check_m(m)?;
    let e = gauss_2f1_large_c_expansion(&qi(1), &q(-1, 2), &qi(0), &q(1, 2), m)?;
    Ok(e.terms[1..].to_vec())
}

/// `b_l` through the two Gauss expansions of the M₂ evaluation formula:
/// `α` from `(2, -1/2; 1 + N)` and `β` from `(1, -3/2; N)`, both at `z = 1/2`.
pub fn b_coefficients_via_gauss(m: usize) -> Result<Vec<Q>> {
    check_m(m)?;
    let alpha = gauss_2f1_large_c_expansion(&qi(2), &q(-1, 2), &qi(1), &q(1, 2), m)?;
    let beta = gauss_2f1_large_c_expansion(&qi(1), &q(-3, 2), &qi(0), &q(1, 2), m)?;
    // α_s, β_s in the normalisation of the generating functions 4(..)(1+e^-t)^-2 and 2(..)e^t(1+e^-t)^-1
    Ok((1..m)
        .map(|l| (&beta.q[l] - &alpha.q[l - 1]) / qi(3) * pochhammer(&q(-3, 2), l))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leading_coefficients_match_known_values() {
        assert_eq!(a_coefficients(5).unwrap(), vec![q(-3, 8), q(-3, 128), q(27, 1024), q(499, 32768)]);
        assert_eq!(b_coefficients(5).unwrap(), vec![q(3, 8), q(-43, 384), q(29, 1024), q(1859, 98304)]);
        assert!(a_coefficients(1).is_err());
    }

    #[test]
    fn gauss_route_agrees() {
        assert_eq!(a_coefficients_via_gauss(12).unwrap(), a_coefficients(12).unwrap());
        assert_eq!(b_coefficients_via_gauss(12).unwrap(), b_coefficients(12).unwrap());
        let e = gauss_2f1_large_c_expansion(&qi(3), &q(1, 3), &q(2, 5), &q(1, 2), 4).unwrap();
        assert_eq!(e.q[0], Q::one());
    }

    #[test]
    fn half_integer_gamma_ratios() {
        assert_eq!(gamma_half_over_sqrt_pi(0), Q::one());
        assert_eq!(gamma_half_over_sqrt_pi(2), q(3, 4));
        assert_eq!(gamma_half_over_sqrt_pi(-1), qi(-2));
        assert_eq!(gamma_half_over_sqrt_pi(-2), q(4, 3));
    }
}
