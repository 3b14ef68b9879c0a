//! First-order HLLC-type wave-propagation scheme.
//!
//! Instead of a numerical flux plus a separate treatment of the
//! non-conservative terms, the update is written in terms of the fluctuations
//! `A^-DQ` and `A^+DQ`: the signed wave content of the face Riemann fan
//! assigned to the left and right cell. The waves are the three jumps of the
//! HLLC fan, so the non-conservative content (the alpha1 jump and the
//! phasic-energy exchange across the contact) is carried natively.
//!
//! The update reads `q_j -= dt/dx (A^-DQ_{j+1/2} + A^+DQ_{j-1/2})` with
//! `A^-DQ = sum_k min(s_k, 0) W_k` and `A^+DQ = sum_k max(s_k, 0) W_k`, so
//! for the conservative slots `A^-DQ + A^+DQ = F(qR).n - F(qL).n`.

use crate::error::Result;
use crate::fluxes::{hllc_wave_fan, FaceContext, HllcWaveFan};
use crate::state::ConservedState;

/// The two signed fluctuations of one face.
#[derive(Debug, Clone, Copy)]
pub struct Fluctuations<const D: usize> {
    /// `A^-DQ`: left-going wave content, applied to the left cell.
    pub a_minus: ConservedState<D>,
    /// `A^+DQ`: right-going wave content, applied to the right cell.
    pub a_plus: ConservedState<D>,
}

/// Fluctuations from an already-computed HLLC fan. Shares the fan with the
/// flux path so that flux-form HLLC and wave-propagation HLLC differ only in
/// how the non-conservative content is injected.
pub fn hllc_fluctuations_with<const D: usize>(
    ctx: &FaceContext<D>,
    fan: &HllcWaveFan<D>,
) -> Fluctuations<D> {
    let w1 = fan.q_star_left - ctx.left.q;
    let w2 = fan.q_star_right - fan.q_star_left;
    let w3 = ctx.right.q - fan.q_star_right;
    let speeds = [fan.s_left, fan.s_star, fan.s_right];
    let waves = [w1, w2, w3];
    let mut a_minus = ConservedState::ZERO;
    let mut a_plus = ConservedState::ZERO;
    for (s, w) in speeds.iter().zip(waves.iter()) {
        a_minus += *w * s.min(0.0);
        a_plus += *w * s.max(0.0);
    }
    Fluctuations { a_minus, a_plus }
}

pub fn hllc_fluctuations<const D: usize>(ctx: &FaceContext<D>) -> Result<Fluctuations<D>> {
    let fan = hllc_wave_fan(ctx)?;
    Ok(hllc_fluctuations_with(ctx, &fan))
}
