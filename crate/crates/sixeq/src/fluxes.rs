//! Conservative flux of the model and the two approximate Riemann solvers.
//!
//! The conservative part of the system is an Euler-like flux in the mixture
//! variables plus phasic energy transport. The volume-fraction slot of the
//! physical flux is identically zero: its transport is non-conservative and
//! handled either by [`crate::noncons`] or by the wave-propagation
//! fluctuations ([`crate::waveprop`]).

use crate::error::{Error, Result};
use crate::state::{dot, to_primitive, ConservedState, EosPair, PrimitiveState};
use crate::state::frozen_sound_speed;

/// One side of a face with the per-face derived quantities computed once and
/// shared by flux and non-conservative evaluations.
#[derive(Debug, Clone, Copy)]
pub struct FaceSide<const D: usize> {
    pub q: ConservedState<D>,
    pub w: PrimitiveState<D>,
    /// Normal velocity u . n.
    pub un: f64,
    /// Frozen sound speed.
    pub cf: f64,
    /// Mass fraction of phase 1.
    pub y1: f64,
    /// Mixture pressure.
    pub pbar: f64,
    /// Mixture density.
    pub rho: f64,
}

/// A face between a left and a right state, with `normal` the unit vector
/// pointing from left to right.
#[derive(Debug, Clone, Copy)]
pub struct FaceContext<const D: usize> {
    pub left: FaceSide<D>,
    pub right: FaceSide<D>,
    pub normal: [f64; D],
}

impl<const D: usize> FaceContext<D> {
    pub fn new(
        ql: &ConservedState<D>,
        qr: &ConservedState<D>,
        normal: [f64; D],
        eos: EosPair,
    ) -> Result<Self> {
        debug_assert!((dot(normal, normal) - 1.0).abs() < 1e-12);
        let side = |q: &ConservedState<D>| -> Result<FaceSide<D>> {
            let w = to_primitive(q, eos)?;
            Ok(FaceSide {
                q: *q,
                w,
                un: dot(w.vel, normal),
                cf: frozen_sound_speed(&w, eos)?,
                y1: w.y1(),
                pbar: w.pbar(),
                rho: w.rho(),
            })
        };
        Ok(FaceContext {
            left: side(ql)?,
            right: side(qr)?,
            normal,
        })
    }
}

/// Physical flux `F(q) . n` of the conservative part. The alpha1 slot is
/// identically zero.
pub fn physical_flux<const D: usize>(
    q: &ConservedState<D>,
    eos: EosPair,
    normal: [f64; D],
) -> Result<ConservedState<D>> {
    let w = to_primitive(q, eos)?;
    let un = dot(w.vel, normal);
    Ok(physical_flux_prim(q, &w, un, normal))
}

/// Physical flux given already-derived primitives (no EOS calls).
pub(crate) fn physical_flux_prim<const D: usize>(
    q: &ConservedState<D>,
    w: &PrimitiveState<D>,
    un: f64,
    normal: [f64; D],
) -> ConservedState<D> {
    let pbar = w.pbar();
    let mut mom = [0.0; D];
    for i in 0..D {
        mom[i] = q.mom[i] * un + pbar * normal[i];
    }
    ConservedState {
        alpha1: 0.0,
        m1: q.m1 * un,
        m2: q.m2 * un,
        mom,
        en1: (q.en1 + w.alpha1 * w.p1) * un,
        en2: (q.en2 + w.alpha2() * w.p2) * un,
    }
}

fn side_flux<const D: usize>(s: &FaceSide<D>, normal: [f64; D]) -> ConservedState<D> {
    physical_flux_prim(&s.q, &s.w, s.un, normal)
}

/// Rusanov (local Lax-Friedrichs) flux with the frozen sound speed in the
/// dissipation estimate. The dissipation acts on the full state vector
/// including the alpha1 slot; the volume-fraction discretizations of
/// [`crate::noncons`] rely on that term for stability.
pub fn rusanov_flux<const D: usize>(ctx: &FaceContext<D>) -> ConservedState<D> {
    let fl = side_flux(&ctx.left, ctx.normal);
    let fr = side_flux(&ctx.right, ctx.normal);
    let s = (ctx.left.un.abs() + ctx.left.cf).max(ctx.right.un.abs() + ctx.right.cf);
    (fl + fr) * 0.5 + (ctx.left.q - ctx.right.q) * (0.5 * s)
}

/// HLLC three-wave fan: external wave speeds from the Davis estimates with
/// frozen sound speeds, contact speed from the mixture momentum balance, and
/// middle states closed by the phasic-energy jump relations.
#[derive(Debug, Clone, Copy)]
pub struct HllcWaveFan<const D: usize> {
    pub s_left: f64,
    pub s_star: f64,
    pub s_right: f64,
    pub q_star_left: ConservedState<D>,
    pub q_star_right: ConservedState<D>,
}

impl<const D: usize> HllcWaveFan<D> {
    /// Phasic pressures in the star region on one side, from the momentum
    /// jump relation `p_k* = p_k + rho_k (s - un)(s_star - un)`.
    pub fn star_phasic_pressures(&self, side: &FaceSide<D>, s_ext: f64) -> (f64, f64) {
        let d = (s_ext - side.un) * (self.s_star - side.un);
        (side.w.p1 + side.w.rho1 * d, side.w.p2 + side.w.rho2 * d)
    }
}

fn star_state<const D: usize>(
    side: &FaceSide<D>,
    s_ext: f64,
    s_star: f64,
    normal: [f64; D],
    tol: f64,
) -> Result<ConservedState<D>> {
    let dly = s_ext - s_star;
    if dly.abs() <= tol {
        // Collapsed fan. With no mass flux through the external wave the
        // continuous limit of the middle state is the adjacent state itself.
        if (s_ext - side.un).abs() <= tol {
            return Ok(side.q);
        }
        return Err(Error::DegenerateFan {
            s_ext,
            s_star,
        });
    }
    let xi = (s_ext - side.un) / dly;
    // Energy closure: E_k* = E_k + (s* - un)(s* + p_k / (rho_k (s_ext - un))),
    // kept in the factored conserved form xi (en_k + m_k (s* - un)(...)) so a
    // fan that degenerates to the identity (xi = 1, s* = un) reproduces the
    // input energies bitwise.
    let rel = s_star - side.un;
    let en1 = xi
        * (side.q.en1
            + side.q.m1 * rel * (s_star + side.w.p1 / (side.w.rho1 * (s_ext - side.un))));
    let en2 = xi
        * (side.q.en2
            + side.q.m2 * rel * (s_star + side.w.p2 / (side.w.rho2 * (s_ext - side.un))));
    let mut mom = [0.0; D];
    for i in 0..D {
        // Normal momentum component moves at s*, tangential is preserved.
        let tangential = side.w.vel[i] - side.un * normal[i];
        mom[i] = side.rho * xi * (s_star * normal[i] + tangential);
    }
    Ok(ConservedState {
        alpha1: side.q.alpha1,
        m1: side.q.m1 * xi,
        m2: side.q.m2 * xi,
        mom,
        en1,
        en2,
    })
}

pub fn hllc_wave_fan<const D: usize>(ctx: &FaceContext<D>) -> Result<HllcWaveFan<D>> {
    let (l, r) = (&ctx.left, &ctx.right);
    let s_left = (l.un - l.cf).min(r.un - r.cf);
    let s_right = (l.un + l.cf).max(r.un + r.cf);
    let denom = l.rho * (s_left - l.un) - r.rho * (s_right - r.un);
    let s_star = (r.pbar - l.pbar + l.rho * l.un * (s_left - l.un) - r.rho * r.un * (s_right - r.un))
        / denom;
    let tol = 1e-12 * s_left.abs().max(s_right.abs()).max(l.cf).max(r.cf);
    let q_star_left = star_state(l, s_left, s_star, ctx.normal, tol)?;
    let q_star_right = star_state(r, s_right, s_star, ctx.normal, tol)?;
    Ok(HllcWaveFan {
        s_left,
        s_star,
        s_right,
        q_star_left,
        q_star_right,
    })
}

/// HLLC flux from an already-computed wave fan. Carries only the
/// conservative slots; the alpha1 slot is zero in every branch because the
/// volume fraction does not jump across the external waves.
pub fn hllc_flux_with<const D: usize>(
    ctx: &FaceContext<D>,
    fan: &HllcWaveFan<D>,
) -> ConservedState<D> {
    if fan.s_left >= 0.0 {
        side_flux(&ctx.left, ctx.normal)
    } else if fan.s_star >= 0.0 {
        side_flux(&ctx.left, ctx.normal) + (fan.q_star_left - ctx.left.q) * fan.s_left
    } else if fan.s_right >= 0.0 {
        side_flux(&ctx.right, ctx.normal) + (fan.q_star_right - ctx.right.q) * fan.s_right
    } else {
        side_flux(&ctx.right, ctx.normal)
    }
}

pub fn hllc_flux<const D: usize>(ctx: &FaceContext<D>) -> Result<ConservedState<D>> {
    let fan = hllc_wave_fan(ctx)?;
    Ok(hllc_flux_with(ctx, &fan))
}
