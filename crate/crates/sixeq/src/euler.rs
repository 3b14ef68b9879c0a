//! Exact Riemann solver for the single-phase Euler equations under a
//! stiffened-gas EOS, used to score quasi-pure two-phase runs.
//!
//! The wave curves of a stiffened gas depend on the pressure only through
//! `p + pi_inf`, so the classical ideal-gas pressure function applies with
//! every pressure shifted by the material's offset. Each side may carry its
//! own material (the quasi-pure shock tubes have a different fluid in each
//! chamber); the contact separates the two materials. The energy offset
//! `eta` never enters the (rho, u, p) solution and is ignored here.

use crate::eos::EosParams;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerState {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveKind {
    Shock,
    Rarefaction,
}

/// Solved self-similar fan.
#[derive(Debug, Clone, Copy)]
pub struct EulerFan {
    pub left: EulerState,
    pub right: EulerState,
    pub eos_left: EosParams,
    pub eos_right: EosParams,
    pub p_star: f64,
    pub u_star: f64,
    pub left_wave: WaveKind,
    pub right_wave: WaveKind,
    pub rho_star_left: f64,
    pub rho_star_right: f64,
}

fn sound(eos: EosParams, s: &EulerState) -> f64 {
    (eos.gamma * (s.p + eos.pi_inf) / s.rho).sqrt()
}

/// One-sided pressure function f_K(p) and its derivative: velocity change
/// across the wave connecting state K to pressure p.
fn f_side(p: f64, s: &EulerState, eos: EosParams) -> (f64, f64) {
    let g = eos.gamma;
    let pk = s.p + eos.pi_inf;
    let pt = p + eos.pi_inf;
    if pt > pk {
        // Shock branch (Rankine-Hugoniot).
        let a = 2.0 / ((g + 1.0) * s.rho);
        let b = (g - 1.0) / (g + 1.0) * pk;
        let root = (a / (pt + b)).sqrt();
        let f = (pt - pk) * root;
        let df = root * (1.0 - 0.5 * (pt - pk) / (b + pt));
        (f, df)
    } else {
        // Rarefaction branch (isentrope).
        let c = sound(eos, s);
        let z = (g - 1.0) / (2.0 * g);
        let f = 2.0 * c / (g - 1.0) * ((pt / pk).powf(z) - 1.0);
        let df = (pt / pk).powf(-(g + 1.0) / (2.0 * g)) / (s.rho * c);
        (f, df)
    }
}

/// Star density behind the left or right wave of material `eos`.
fn star_density(p_star: f64, s: &EulerState, eos: EosParams, kind: WaveKind) -> f64 {
    let g = eos.gamma;
    let ratio = (p_star + eos.pi_inf) / (s.p + eos.pi_inf);
    match kind {
        WaveKind::Shock => {
            let r = (g - 1.0) / (g + 1.0);
            s.rho * (ratio + r) / (r * ratio + 1.0)
        }
        WaveKind::Rarefaction => s.rho * ratio.powf(1.0 / g),
    }
}

/// Exact solution with a single material on both sides.
pub fn solve_exact(left: &EulerState, right: &EulerState, eos: EosParams) -> Result<EulerFan> {
    solve_exact_two_material(left, right, eos, eos)
}

/// Exact solution with per-side materials; the contact separates them.
pub fn solve_exact_two_material(
    left: &EulerState,
    right: &EulerState,
    eos_left: EosParams,
    eos_right: EosParams,
) -> Result<EulerFan> {
    for (s, eos) in [(left, eos_left), (right, eos_right)] {
        if !(s.rho > 0.0) || !s.rho.is_finite() {
            return Err(Error::invalid("rho", s.rho));
        }
        if !(s.p + eos.pi_inf > 0.0) || !s.p.is_finite() {
            return Err(Error::invalid("p", s.p));
        }
        if !s.u.is_finite() {
            return Err(Error::invalid("u", s.u));
        }
    }
    let cl = sound(eos_left, left);
    let cr = sound(eos_right, right);
    let du = right.u - left.u;
    let vacuum_limit = 2.0 * cl / (eos_left.gamma - 1.0) + 2.0 * cr / (eos_right.gamma - 1.0);
    if du >= vacuum_limit {
        return Err(Error::Vacuum {
            du,
            limit: vacuum_limit,
        });
    }

    let p_floor = (-eos_left.pi_inf).max(-eos_right.pi_inf);
    let eval = |p: f64| -> f64 {
        f_side(p, left, eos_left).0 + f_side(p, right, eos_right).0 + du
    };

    // Bracket: f is monotone increasing, negative at the admissibility floor
    // (no vacuum) and positive for large p.
    let mut lo = p_floor + 1e-12 * (left.p.abs() + right.p.abs() + 1.0).max(-p_floor * 1e-3);
    let mut hi = 2.0 * left.p.max(right.p).max(lo + 1.0);
    let mut guard = 0;
    while eval(hi) < 0.0 {
        hi = (hi - p_floor) * 8.0 + p_floor;
        guard += 1;
        if guard > 200 {
            return Err(Error::NoConvergence {
                iters: guard,
                residual: eval(hi),
            });
        }
    }

    // Two-rarefaction style initial guess in shifted variables (exact when
    // both waves are rarefactions and the materials match); fall back to the
    // bracket midpoint if it lands outside.
    let mut p = {
        let g = 0.5 * (eos_left.gamma + eos_right.gamma);
        let z = (g - 1.0) / (2.0 * g);
        let pl = left.p + eos_left.pi_inf;
        let pr = right.p + eos_right.pi_inf;
        let num = cl + cr - 0.5 * (g - 1.0) * du;
        let den = cl / pl.powf(z) + cr / pr.powf(z);
        let ptr = (num / den).powf(1.0 / z);
        ptr - 0.5 * (eos_left.pi_inf + eos_right.pi_inf)
    };
    if !(p > lo && p < hi) || !p.is_finite() {
        p = 0.5 * (lo + hi);
    }

    // Newton with a bisection safeguard on the maintained bracket.
    let mut converged = false;
    let mut residual = f64::INFINITY;
    for _ in 0..100 {
        let (fl, dfl) = f_side(p, left, eos_left);
        let (fr, dfr) = f_side(p, right, eos_right);
        let f = fl + fr + du;
        residual = f;
        if f > 0.0 {
            hi = p;
        } else {
            lo = p;
        }
        let step = f / (dfl + dfr);
        let mut p_next = p - step;
        if !(p_next > lo && p_next < hi) || !p_next.is_finite() {
            p_next = 0.5 * (lo + hi);
        }
        let change = (p_next - p).abs();
        p = p_next;
        if change <= 1e-15 * p.abs().max(1e-300) || f == 0.0 {
            converged = true;
            break;
        }
    }
    if !converged && (hi - lo) > 1e-12 * hi.abs().max(1.0) {
        return Err(Error::NoConvergence {
            iters: 100,
            residual,
        });
    }

    let (fl, _) = f_side(p, left, eos_left);
    let (fr, _) = f_side(p, right, eos_right);
    let u_star = 0.5 * (left.u + right.u) + 0.5 * (fr - fl);
    let left_wave = if p + eos_left.pi_inf > left.p + eos_left.pi_inf {
        WaveKind::Shock
    } else {
        WaveKind::Rarefaction
    };
    let right_wave = if p + eos_right.pi_inf > right.p + eos_right.pi_inf {
        WaveKind::Shock
    } else {
        WaveKind::Rarefaction
    };
    Ok(EulerFan {
        left: *left,
        right: *right,
        eos_left,
        eos_right,
        p_star: p,
        u_star,
        left_wave,
        right_wave,
        rho_star_left: star_density(p, left, eos_left, left_wave),
        rho_star_right: star_density(p, right, eos_right, right_wave),
    })
}

impl EulerFan {
    /// (outermost, innermost) speeds of the left wave; equal for a shock.
    pub fn left_wave_speeds(&self) -> (f64, f64) {
        let g = self.eos_left.gamma;
        let s = &self.left;
        match self.left_wave {
            WaveKind::Shock => {
                let ratio = (self.p_star + self.eos_left.pi_inf) / (s.p + self.eos_left.pi_inf);
                let c = sound(self.eos_left, s);
                let speed =
                    s.u - c * ((g + 1.0) / (2.0 * g) * ratio + (g - 1.0) / (2.0 * g)).sqrt();
                (speed, speed)
            }
            WaveKind::Rarefaction => {
                let c = sound(self.eos_left, s);
                let c_star = c
                    * ((self.p_star + self.eos_left.pi_inf) / (s.p + self.eos_left.pi_inf))
                        .powf((g - 1.0) / (2.0 * g));
                (s.u - c, self.u_star - c_star)
            }
        }
    }

    /// (outermost, innermost) speeds of the right wave; equal for a shock.
    pub fn right_wave_speeds(&self) -> (f64, f64) {
        let g = self.eos_right.gamma;
        let s = &self.right;
        match self.right_wave {
            WaveKind::Shock => {
                let ratio = (self.p_star + self.eos_right.pi_inf) / (s.p + self.eos_right.pi_inf);
                let c = sound(self.eos_right, s);
                let speed =
                    s.u + c * ((g + 1.0) / (2.0 * g) * ratio + (g - 1.0) / (2.0 * g)).sqrt();
                (speed, speed)
            }
            WaveKind::Rarefaction => {
                let c = sound(self.eos_right, s);
                let c_star = c
                    * ((self.p_star + self.eos_right.pi_inf) / (s.p + self.eos_right.pi_inf))
                        .powf((g - 1.0) / (2.0 * g));
                (s.u + c, self.u_star + c_star)
            }
        }
    }

    /// Sample the self-similar solution at `xi = x / t`.
    pub fn sample(&self, xi: f64) -> EulerState {
        if xi < self.u_star {
            // Left of the contact: left material.
            let (head, tail) = self.left_wave_speeds();
            let s = &self.left;
            let g = self.eos_left.gamma;
            let pi = self.eos_left.pi_inf;
            if xi <= head {
                *s
            } else if xi >= tail {
                EulerState {
                    rho: self.rho_star_left,
                    u: self.u_star,
                    p: self.p_star,
                }
            } else {
                // Inside the left rarefaction.
                let c = sound(self.eos_left, s);
                let factor = 2.0 / (g + 1.0) + (g - 1.0) / ((g + 1.0) * c) * (s.u - xi);
                EulerState {
                    rho: s.rho * factor.powf(2.0 / (g - 1.0)),
                    u: 2.0 / (g + 1.0) * (c + 0.5 * (g - 1.0) * s.u + xi),
                    p: (s.p + pi) * factor.powf(2.0 * g / (g - 1.0)) - pi,
                }
            }
        } else {
            let (head, tail) = self.right_wave_speeds();
            let s = &self.right;
            let g = self.eos_right.gamma;
            let pi = self.eos_right.pi_inf;
            if xi >= head {
                *s
            } else if xi <= tail {
                EulerState {
                    rho: self.rho_star_right,
                    u: self.u_star,
                    p: self.p_star,
                }
            } else {
                let c = sound(self.eos_right, s);
                let factor = 2.0 / (g + 1.0) - (g - 1.0) / ((g + 1.0) * c) * (s.u - xi);
                EulerState {
                    rho: s.rho * factor.powf(2.0 / (g - 1.0)),
                    u: 2.0 / (g + 1.0) * (-c + 0.5 * (g - 1.0) * s.u + xi),
                    p: (s.p + pi) * factor.powf(2.0 * g / (g - 1.0)) - pi,
                }
            }
        }
    }

    /// Residual of the pressure function at the returned star pressure.
    pub fn residual(&self) -> f64 {
        f_side(self.p_star, &self.left, self.eos_left).0
            + f_side(self.p_star, &self.right, self.eos_right).0
            + (self.right.u - self.left.u)
    }
}
