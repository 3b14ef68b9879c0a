//! Conserved and primitive state representations of the six-equation
//! single-velocity model, conversions between them, and mixture diagnostics.
//!
//! States are *stored* conserved; primitives are derived views. The state
//! vector is `(alpha1, alpha1 rho1, alpha2 rho2, rho u, alpha1 rho1 E1,
//! alpha2 rho2 E2)` with the momentum a `D`-vector, `D` in {1, 2}.

use crate::eos::{self, EosParams};
use crate::error::{Error, Field, Result};

/// The two phasic equations of state of a run, phase 1 first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EosPair {
    pub phase1: EosParams,
    pub phase2: EosParams,
}

impl EosPair {
    pub fn new(phase1: EosParams, phase2: EosParams) -> Self {
        EosPair { phase1, phase2 }
    }
}

/// Dot product of two small fixed-size vectors.
#[inline]
pub fn dot<const D: usize>(a: [f64; D], b: [f64; D]) -> f64 {
    let mut s = 0.0;
    for i in 0..D {
        s += a[i] * b[i];
    }
    s
}

/// Conserved state (or any state-shaped vector: fluxes and fluctuations share
/// the layout). Invariants are checked by the conversion routines, not by the
/// type, so intermediate Riemann states with relaxed invariants fit too.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservedState<const D: usize> {
    /// Volume fraction of phase 1.
    pub alpha1: f64,
    /// alpha1 * rho1 (kg/m^3).
    pub m1: f64,
    /// alpha2 * rho2 (kg/m^3).
    pub m2: f64,
    /// Mixture momentum rho * u (kg/(m^2 s)).
    pub mom: [f64; D],
    /// alpha1 * rho1 * E1 (J/m^3).
    pub en1: f64,
    /// alpha2 * rho2 * E2 (J/m^3).
    pub en2: f64,
}

impl<const D: usize> ConservedState<D> {
    pub const ZERO: Self = ConservedState {
        alpha1: 0.0,
        m1: 0.0,
        m2: 0.0,
        mom: [0.0; D],
        en1: 0.0,
        en2: 0.0,
    };

    /// Mixture density.
    #[inline]
    pub fn rho(&self) -> f64 {
        self.m1 + self.m2
    }

    /// Velocity vector `mom / rho`.
    #[inline]
    pub fn velocity(&self) -> [f64; D] {
        let rho = self.rho();
        self.mom.map(|m| m / rho)
    }

    pub fn is_finite(&self) -> bool {
        self.alpha1.is_finite()
            && self.m1.is_finite()
            && self.m2.is_finite()
            && self.mom.iter().all(|m| m.is_finite())
            && self.en1.is_finite()
            && self.en2.is_finite()
    }
}

impl<const D: usize> std::ops::Add for ConservedState<D> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut mom = self.mom;
        for i in 0..D {
            mom[i] += o.mom[i];
        }
        ConservedState {
            alpha1: self.alpha1 + o.alpha1,
            m1: self.m1 + o.m1,
            m2: self.m2 + o.m2,
            mom,
            en1: self.en1 + o.en1,
            en2: self.en2 + o.en2,
        }
    }
}

impl<const D: usize> std::ops::Sub for ConservedState<D> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let mut mom = self.mom;
        for i in 0..D {
            mom[i] -= o.mom[i];
        }
        ConservedState {
            alpha1: self.alpha1 - o.alpha1,
            m1: self.m1 - o.m1,
            m2: self.m2 - o.m2,
            mom,
            en1: self.en1 - o.en1,
            en2: self.en2 - o.en2,
        }
    }
}

impl<const D: usize> std::ops::Mul<f64> for ConservedState<D> {
    type Output = Self;
    fn mul(self, a: f64) -> Self {
        ConservedState {
            alpha1: self.alpha1 * a,
            m1: self.m1 * a,
            m2: self.m2 * a,
            mom: self.mom.map(|m| m * a),
            en1: self.en1 * a,
            en2: self.en2 * a,
        }
    }
}

impl<const D: usize> std::ops::AddAssign for ConservedState<D> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

/// Primitive (human- and IC-facing) state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimitiveState<const D: usize> {
    pub alpha1: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub vel: [f64; D],
    pub p1: f64,
    pub p2: f64,
}

impl<const D: usize> PrimitiveState<D> {
    #[inline]
    pub fn alpha2(&self) -> f64 {
        1.0 - self.alpha1
    }

    /// Mixture density.
    #[inline]
    pub fn rho(&self) -> f64 {
        self.alpha1 * self.rho1 + self.alpha2() * self.rho2
    }

    /// Mixture pressure `alpha1 p1 + alpha2 p2`.
    #[inline]
    pub fn pbar(&self) -> f64 {
        self.alpha1 * self.p1 + self.alpha2() * self.p2
    }

    /// Mass fraction of phase 1.
    #[inline]
    pub fn y1(&self) -> f64 {
        self.alpha1 * self.rho1 / self.rho()
    }

    fn validate(&self, eos: EosPair) -> Result<()> {
        if !(self.alpha1 > 0.0 && self.alpha1 < 1.0) {
            return Err(Error::inadmissible(Field::Alpha1, self.alpha1));
        }
        if !(self.rho1 > 0.0 && self.rho1.is_finite()) {
            return Err(Error::inadmissible(Field::Rho1, self.rho1));
        }
        if !(self.rho2 > 0.0 && self.rho2.is_finite()) {
            return Err(Error::inadmissible(Field::Rho2, self.rho2));
        }
        if !(self.p1 + eos.phase1.pi_inf > 0.0) || !self.p1.is_finite() {
            return Err(Error::inadmissible(Field::P1, self.p1));
        }
        if !(self.p2 + eos.phase2.pi_inf > 0.0) || !self.p2.is_finite() {
            return Err(Error::inadmissible(Field::P2, self.p2));
        }
        if self.vel.iter().any(|v| !v.is_finite()) {
            return Err(Error::inadmissible(Field::Momentum, self.vel[0]));
        }
        Ok(())
    }
}

/// Mixture-level diagnostics of an admissible state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureDiagnostics {
    /// Mixture density m1 + m2.
    pub rho: f64,
    /// Mixture pressure alpha1 p1 + alpha2 p2.
    pub pbar: f64,
    /// Mass fraction of phase 1.
    pub y1: f64,
    /// Frozen sound speed of the six-equation model.
    pub c_frozen: f64,
    /// Wood sound speed of the pressure-equilibrium model.
    pub c_wood: f64,
    /// Mixture specific total energy (J/kg): rho E = en1 + en2.
    pub e_mix: f64,
}

/// Conserved -> primitive. Checks invariants and reports the offending field
/// on violation; no clamping.
pub fn to_primitive<const D: usize>(
    q: &ConservedState<D>,
    eos: EosPair,
) -> Result<PrimitiveState<D>> {
    if !q.is_finite() {
        return Err(Error::invalid("state", f64::NAN));
    }
    if !(q.alpha1 > 0.0 && q.alpha1 < 1.0) {
        return Err(Error::inadmissible(Field::Alpha1, q.alpha1));
    }
    if !(q.m1 > 0.0) {
        return Err(Error::inadmissible(Field::Rho1, q.m1));
    }
    if !(q.m2 > 0.0) {
        return Err(Error::inadmissible(Field::Rho2, q.m2));
    }
    let alpha2 = 1.0 - q.alpha1;
    let rho1 = q.m1 / q.alpha1;
    let rho2 = q.m2 / alpha2;
    let vel = q.velocity();
    let ke = 0.5 * dot(vel, vel);
    let e1 = q.en1 / q.m1 - ke;
    let e2 = q.en2 / q.m2 - ke;
    let p1 = eos::pressure(eos.phase1, rho1, e1)?;
    let p2 = eos::pressure(eos.phase2, rho2, e2)?;
    if !(p1 + eos.phase1.pi_inf > 0.0) {
        return Err(Error::inadmissible(Field::P1, p1));
    }
    if !(p2 + eos.phase2.pi_inf > 0.0) {
        return Err(Error::inadmissible(Field::P2, p2));
    }
    Ok(PrimitiveState {
        alpha1: q.alpha1,
        rho1,
        rho2,
        vel,
        p1,
        p2,
    })
}

/// Primitive -> conserved, the inverse of [`to_primitive`].
pub fn to_conserved<const D: usize>(
    w: &PrimitiveState<D>,
    eos: EosPair,
) -> Result<ConservedState<D>> {
    w.validate(eos)?;
    let m1 = w.alpha1 * w.rho1;
    let m2 = w.alpha2() * w.rho2;
    let rho = m1 + m2;
    let ke = 0.5 * dot(w.vel, w.vel);
    let e1 = eos::internal_energy(eos.phase1, w.rho1, w.p1)?;
    let e2 = eos::internal_energy(eos.phase2, w.rho2, w.p2)?;
    Ok(ConservedState {
        alpha1: w.alpha1,
        m1,
        m2,
        mom: w.vel.map(|v| rho * v),
        en1: m1 * (e1 + ke),
        en2: m2 * (e2 + ke),
    })
}

/// Frozen sound speed `sqrt(Y1 c1^2 + Y2 c2^2)` of the six-equation model.
pub fn frozen_sound_speed<const D: usize>(w: &PrimitiveState<D>, eos: EosPair) -> Result<f64> {
    let c1 = eos::sound_speed(eos.phase1, w.rho1, w.p1)?;
    let c2 = eos::sound_speed(eos.phase2, w.rho2, w.p2)?;
    let y1 = w.y1();
    Ok((y1 * c1 * c1 + (1.0 - y1) * c2 * c2).sqrt())
}

/// Wood sound speed: `1/(rho c_w^2) = alpha1/(rho1 c1^2) + alpha2/(rho2 c2^2)`.
pub fn wood_sound_speed<const D: usize>(w: &PrimitiveState<D>, eos: EosPair) -> Result<f64> {
    let c1 = eos::sound_speed(eos.phase1, w.rho1, w.p1)?;
    let c2 = eos::sound_speed(eos.phase2, w.rho2, w.p2)?;
    let inv = w.alpha1 / (w.rho1 * c1 * c1) + w.alpha2() / (w.rho2 * c2 * c2);
    Ok((1.0 / (w.rho() * inv)).sqrt())
}

/// All mixture diagnostics of an admissible primitive state.
pub fn diagnostics<const D: usize>(w: &PrimitiveState<D>, eos: EosPair) -> Result<MixtureDiagnostics> {
    let rho = w.rho();
    let y1 = w.y1();
    let e1 = eos::internal_energy(eos.phase1, w.rho1, w.p1)?;
    let e2 = eos::internal_energy(eos.phase2, w.rho2, w.p2)?;
    let ke = 0.5 * dot(w.vel, w.vel);
    Ok(MixtureDiagnostics {
        rho,
        pbar: w.pbar(),
        y1,
        c_frozen: frozen_sound_speed(w, eos)?,
        c_wood: wood_sound_speed(w, eos)?,
        e_mix: y1 * e1 + (1.0 - y1) * e2 + ke,
    })
}
