//! Large-N expansion of the even moments read off the MGF levels, and the
//! distributional form of the density corrections.

use super::laurent::{q, Laurent, Q};
use super::mgf::{find_level, Level, Prefactor, SinhCoshPoly};
use crate::error::{Error, Result};
use crate::numerics::{elementary as el, Ball};
use num_traits::Zero;

/// `N^-p M_2p ≈ √(2N/π) Σ_l h_l N^-l + Σ_l c_l N^-l`.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticSeries {
    pub p: u32,
    /// `h_0 = 1/(2p+1)`, then `b_{l,p}`.
    pub half_power_coeffs: Vec<Q>,
    /// `c_0 = 1/2`, then the terminating `c_{l,p}`, `l < p`.
    pub int_power_coeffs: Vec<Q>,
}

impl AsymptoticSeries {
    /// Numeric value of the truncated expansion of `M_2p` itself.
    pub fn eval(&self, n: u64, prec: u32) -> Ball {
        let nb = Ball::from_i64(n as i64, prec);
        let inv = Ball::one(prec).div(&nb);
        let horner = |c: &[Q]| {
            c.iter().rev().fold(Ball::zero(prec), |acc, v| {
                &(&acc * &inv) + &Ball::from_rational(v, prec)
            })
        };
        let half = &horner(&self.half_power_coeffs) * &(&el::sqrt_2_over_pi(prec) * &nb.sqrt());
        let scaled = &half + &horner(&self.int_power_coeffs);
        &scaled * &nb.pow_u(self.p as u64)
    }
}

/// Expansion of `M_2p` to `m` half-power terms from precomputed MGF levels.
pub fn moment_asymptotic(
    n: u64,
    p: u32,
    m: usize,
    levels: &[SinhCoshPoly],
    prec: u32,
) -> Result<(AsymptoticSeries, Ball)> {
    if m == 0 {
        return Err(Error::Domain("m must be at least 1".into()));
    }
    let computed = levels.iter().filter(|l| !l.level.is_half()).count();
    let needed = (m - 1).max(p.saturating_sub(1) as usize);
    if needed >= computed {
        return Err(Error::Domain(format!(
            "expansion needs levels through {needed} but only {} are available",
            computed.saturating_sub(1)
        )));
    }
    let d = 2 * p;
    let half: Vec<Q> = (0..m)
        .map(|l| find_level(levels, Level::integer(l as u32)).unwrap().derivative_at_zero(d))
        .collect();
    let mut ints = Vec::new();
    for lv in levels.iter().filter(|l| l.level.is_half()) {
        let l = lv.level.k();
        let v = lv.derivative_at_zero(d);
        if l < p.max(1) {
            ints.push(v);
        } else if !v.is_zero() {
            return Err(Error::Internal(format!(
                "level {} has a nonzero derivative of order {d} at 0",
                lv.level
            )));
        }
    }
    let series = AsymptoticSeries {
        p,
        half_power_coeffs: half,
        int_power_coeffs: ints,
    };
    let value = series.eval(n, prec);
    Ok((series, value))
}

/// A density correction `r_(k)` as a distribution on the rescaled axis:
/// `prefactor · [slab · 1_(-1,1)(x) + S(-∂)(δ(x-1) + δ(x+1)) + A(-∂)(δ(x-1) - δ(x+1))]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityCorrection {
    pub level: Level,
    pub prefactor: Prefactor,
    pub slab: Q,
    pub symmetric: Laurent,
    pub antisymmetric: Laurent,
}

/// The level's MGF data reinterpreted through `∫ e^(tx) (-∂)^j δ(x∓1) dx = t^j e^(±t)`.
pub fn density_correction_polynomials(level: &SinhCoshPoly) -> DensityCorrection {
    let half = q(1, 2);
    let s = level.f.sinh.coeff(-1);
    let odd = level.f.sinh.sub(&Laurent::monomial(s.clone(), -1));
    DensityCorrection {
        level: level.level,
        prefactor: level.prefactor,
        slab: s * &half,
        symmetric: level.f.cosh.scale(&half),
        antisymmetric: odd.scale(&half),
    }
}

impl DensityCorrection {
    /// Total mass, prefactor excluded: the slab has width 2 and each
    /// derivative of a delta integrates to zero.
    pub fn mass(&self) -> Q {
        &self.slab * q(2, 1) + self.symmetric.coeff(0) * q(2, 1)
    }
}
