//! Stiffened-gas equation of state.
//!
//! Each phase follows the affine pressure law
//! `p = (gamma - 1) rho e - gamma pi_inf - (gamma - 1) eta rho`,
//! which covers both gases (`pi_inf = 0`) and liquids/solids under
//! compression. Admissibility (`p + pi_inf > 0`) is *checked*, never
//! repaired: losing it is a diagnostic the callers rely on.

use crate::error::{Error, Field, Result};

/// Material constants of one stiffened-gas phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EosParams {
    /// Ratio of specific heats, > 1.
    pub gamma: f64,
    /// Pressure offset (Pa), >= 0.
    pub pi_inf: f64,
    /// Specific-energy offset (J/kg). Enters energy bookkeeping only.
    pub eta: f64,
}

impl EosParams {
    pub fn new(gamma: f64, pi_inf: f64, eta: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma <= 1.0 {
            return Err(Error::invalid("gamma", gamma));
        }
        if !pi_inf.is_finite() || pi_inf < 0.0 {
            return Err(Error::invalid("pi_inf", pi_inf));
        }
        if !eta.is_finite() {
            return Err(Error::invalid("eta", eta));
        }
        Ok(EosParams { gamma, pi_inf, eta })
    }

    /// Ideal gas with ratio `gamma`.
    pub fn ideal(gamma: f64) -> Result<Self> {
        EosParams::new(gamma, 0.0, 0.0)
    }
}

/// Phasic pressure `p(rho, e)`. No admissibility clamp is applied; the result
/// may be <= -pi_inf and the caller decides what that means.
pub fn pressure(params: EosParams, rho: f64, e: f64) -> Result<f64> {
    if !rho.is_finite() || rho <= 0.0 {
        return Err(Error::invalid("rho", rho));
    }
    if !e.is_finite() {
        return Err(Error::invalid("e", e));
    }
    let g = params.gamma;
    Ok((g - 1.0) * rho * e - g * params.pi_inf - (g - 1.0) * params.eta * rho)
}

/// Specific internal energy `e(rho, p)`, the algebraic inverse of [`pressure`].
pub fn internal_energy(params: EosParams, rho: f64, p: f64) -> Result<f64> {
    if !rho.is_finite() || rho <= 0.0 {
        return Err(Error::invalid("rho", rho));
    }
    if !p.is_finite() {
        return Err(Error::invalid("p", p));
    }
    let g = params.gamma;
    Ok((p + g * params.pi_inf) / ((g - 1.0) * rho) + params.eta)
}

/// Phasic speed of sound `sqrt(gamma (p + pi_inf) / rho)`.
///
/// `p + pi_inf <= 0` signals loss of hyperbolicity and is reported as an
/// inadmissible state rather than silently producing NaN.
pub fn sound_speed(params: EosParams, rho: f64, p: f64) -> Result<f64> {
    if !rho.is_finite() || rho <= 0.0 {
        return Err(Error::invalid("rho", rho));
    }
    let stiffened = p + params.pi_inf;
    if !stiffened.is_finite() || stiffened <= 0.0 {
        return Err(Error::inadmissible(Field::P1, p));
    }
    Ok((params.gamma * stiffened / rho).sqrt())
}

/// Mixture pressure at mechanical equilibrium, closed form for two
/// stiffened-gas phases:
///
/// `p = [rho e - sum_k alpha_k rho_k eta_k - sum_k alpha_k gamma_k pi_k / (gamma_k - 1)]
///      / sum_k alpha_k / (gamma_k - 1)`
///
/// where `rho e = (alpha1 rho1 + alpha2 rho2) e_mix`.
pub fn mixture_pressure(
    eos1: EosParams,
    eos2: EosParams,
    alpha1: f64,
    rho1: f64,
    rho2: f64,
    e_mix: f64,
) -> Result<f64> {
    if !alpha1.is_finite() || alpha1 <= 0.0 || alpha1 >= 1.0 {
        return Err(Error::inadmissible(Field::Alpha1, alpha1));
    }
    if !rho1.is_finite() || rho1 <= 0.0 {
        return Err(Error::invalid("rho1", rho1));
    }
    if !rho2.is_finite() || rho2 <= 0.0 {
        return Err(Error::invalid("rho2", rho2));
    }
    let alpha2 = 1.0 - alpha1;
    let rho = alpha1 * rho1 + alpha2 * rho2;
    let offsets = alpha1 * rho1 * eos1.eta + alpha2 * rho2 * eos2.eta;
    let stiff = alpha1 * eos1.gamma * eos1.pi_inf / (eos1.gamma - 1.0)
        + alpha2 * eos2.gamma * eos2.pi_inf / (eos2.gamma - 1.0);
    let denom = alpha1 / (eos1.gamma - 1.0) + alpha2 / (eos2.gamma - 1.0);
    debug_assert!(denom > 0.0, "gamma_k > 1 makes the denominator positive");
    Ok((rho * e_mix - offsets - stiff) / denom)
}
