//! Discretizations of the non-conservative products: the volume-fraction
//! advection term `u . grad(alpha1)` and the phasic-energy exchange terms
//! `+/- u . Sigma`.
//!
//! Three face-based variants are provided (two Bassi-Rebay-style quadratures
//! and the one-sided form of Crouzet et al.), plus the sign(s*) upwinding of
//! the volume-fraction jump used together with the HLLC flux. The energy
//! slots of every variant are built from a single per-face value so that the
//! phase-1 and phase-2 contributions are exact bitwise negations of each
//! other: summing the two phasic energy equations then reproduces a
//! conservative update of the mixture energy to rounding.

use crate::fluxes::FaceContext;
use crate::state::ConservedState;

/// Which face quadrature evaluates the non-conservative terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonconsVariant {
    /// Averages of products: `<u alpha1>`, `<u Y2 alpha1 p1>`, ...
    Br2023,
    /// Products of averages: `<u><alpha1>`, `<u Y2><alpha1 p1>`, ...
    Br2015,
    /// One-sided velocities against face averages: `u_side <alpha1>`, ...
    Crouzet,
}

impl NonconsVariant {
    pub fn name(self) -> &'static str {
        match self {
            NonconsVariant::Br2023 => "br2023",
            NonconsVariant::Br2015 => "br2015",
            NonconsVariant::Crouzet => "crouzet",
        }
    }
}

/// The two slots a side contribution can populate: the alpha1 slot and the
/// phasic-energy exchange value `sigma` (entering en1 as `+sigma` and en2 as
/// `-sigma`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SideTerms {
    pub alpha: f64,
    pub sigma: f64,
}

impl SideTerms {
    /// Expand into a state-shaped vector.
    pub fn as_state<const D: usize>(&self) -> ConservedState<D> {
        ConservedState {
            alpha1: self.alpha,
            m1: 0.0,
            m2: 0.0,
            mom: [0.0; D],
            en1: self.sigma,
            en2: -self.sigma,
        }
    }
}

/// T^-(qL, qR) and T^+(qL, qR) of one face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonconsContribution {
    pub minus: SideTerms,
    pub plus: SideTerms,
}

#[inline]
fn avg(a: f64, b: f64) -> f64 {
    0.5 * (a + b)
}

/// Evaluate the chosen variant on a face. All vector quantities are already
/// projected on the face normal inside [`FaceContext`], so the evaluation is
/// one-dimensional per face.
pub fn contribution<const D: usize>(
    variant: NonconsVariant,
    ctx: &FaceContext<D>,
) -> NonconsContribution {
    let (l, r) = (&ctx.left, &ctx.right);
    let (a1l, a1r) = (l.w.alpha1, r.w.alpha1);
    let (a2l, a2r) = (1.0 - a1l, 1.0 - a1r);
    let (ap1l, ap1r) = (a1l * l.w.p1, a1r * r.w.p1);
    let (ap2l, ap2r) = (a2l * l.w.p2, a2r * r.w.p2);
    match variant {
        NonconsVariant::Br2023 => {
            let ua = avg(l.un * a1l, r.un * a1r);
            let u = avg(l.un, r.un);
            let uy2 = avg(l.un * (1.0 - l.y1), r.un * (1.0 - r.y1));
            let uy1 = avg(l.un * l.y1, r.un * r.y1);
            let uy2ap1 = avg(l.un * (1.0 - l.y1) * ap1l, r.un * (1.0 - r.y1) * ap1r);
            let uy1ap2 = avg(l.un * l.y1 * ap2l, r.un * r.y1 * ap2r);
            NonconsContribution {
                minus: SideTerms {
                    alpha: ua - u * a1l,
                    sigma: -(uy2ap1 - uy2 * ap1l) + (uy1ap2 - uy1 * ap2l),
                },
                plus: SideTerms {
                    alpha: ua - u * a1r,
                    sigma: -(uy2ap1 - uy2 * ap1r) + (uy1ap2 - uy1 * ap2r),
                },
            }
        }
        NonconsVariant::Br2015 => {
            let u = avg(l.un, r.un);
            let a = avg(a1l, a1r);
            let uy2 = avg(l.un * (1.0 - l.y1), r.un * (1.0 - r.y1));
            let uy1 = avg(l.un * l.y1, r.un * r.y1);
            let ap1 = avg(ap1l, ap1r);
            let ap2 = avg(ap2l, ap2r);
            NonconsContribution {
                minus: SideTerms {
                    alpha: u * a - u * a1l,
                    sigma: -(uy2 * ap1 - uy2 * ap1l) + (uy1 * ap2 - uy1 * ap2l),
                },
                plus: SideTerms {
                    alpha: u * a - u * a1r,
                    sigma: -(uy2 * ap1 - uy2 * ap1r) + (uy1 * ap2 - uy1 * ap2r),
                },
            }
        }
        NonconsVariant::Crouzet => {
            let a = avg(a1l, a1r);
            let ap1 = avg(ap1l, ap1r);
            let ap2 = avg(ap2l, ap2r);
            NonconsContribution {
                minus: SideTerms {
                    alpha: l.un * a,
                    sigma: -l.un * ((1.0 - l.y1) * ap1 - l.y1 * ap2),
                },
                plus: SideTerms {
                    alpha: r.un * a,
                    sigma: -r.un * ((1.0 - r.y1) * ap1 - r.y1 * ap2),
                },
            }
        }
    }
}

/// Volume-fraction upwinding used with the HLLC flux: the alpha1 jump rides
/// the contact wave, so the advective transfer `s* (alpha1R - alpha1L)` is
/// assigned to the downwind side,
///
/// `T^-_alpha = (1 - sign(s*))/2 s* (a1R - a1L) = min(s*, 0) (a1R - a1L)`,
/// `T^+_alpha = -(1 + sign(s*))/2 s* (a1R - a1L) = -max(s*, 0) (a1R - a1L)`,
///
/// matching the fluctuations of a contact moving at s*. sign(0) = 0 makes
/// both sides vanish at a stationary contact.
pub fn hllc_upwind_alpha(alpha1_left: f64, alpha1_right: f64, s_star: f64) -> (f64, f64) {
    let jump = alpha1_right - alpha1_left;
    (s_star.min(0.0) * jump, -s_star.max(0.0) * jump)
}

/// Outcome of sampling the path-conservative conditions of a variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcConsistencyReport {
    /// max over samples and slots of |D^-(w, w, n)| (must vanish for a
    /// path-conservative scheme).
    pub max_equal_state_residual: f64,
    /// max over samples of |D^-(wL,wR,n) + D^+(wL,wR,n) - <u.n>(a1R - a1L)|
    /// for the volume-fraction advection block, i.e. the deviation from the
    /// segment-path trapezoidal integral.
    pub max_path_integral_defect: f64,
}

/// Sample the path-conservative consistency conditions. `faces` yields
/// admissible face contexts; `D^+` relates to the stored `plus` side by
/// `D^+ = -T^+`.
pub fn pc_consistency_check<const D: usize, I>(
    variant: NonconsVariant,
    faces: I,
) -> PcConsistencyReport
where
    I: IntoIterator<Item = FaceContext<D>>,
{
    let mut max_equal = 0.0f64;
    let mut max_path = 0.0f64;
    for ctx in faces {
        // Equal-state residual: evaluate on (L, L).
        let same = FaceContext {
            left: ctx.left,
            right: ctx.left,
            normal: ctx.normal,
        };
        let t = contribution(variant, &same);
        max_equal = max_equal
            .max(t.minus.alpha.abs())
            .max(t.minus.sigma.abs());
        // Path condition on the alpha block across the actual pair.
        let t = contribution(variant, &ctx);
        let trap = avg(ctx.left.un, ctx.right.un) * (ctx.right.w.alpha1 - ctx.left.w.alpha1);
        max_path = max_path.max((t.minus.alpha - t.plus.alpha - trap).abs());
    }
    PcConsistencyReport {
        max_equal_state_residual: max_equal,
        max_path_integral_defect: max_path,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eos::EosParams;
    use crate::state::{to_conserved, EosPair, PrimitiveState};

    fn water_air() -> EosPair {
        EosPair::new(
            EosParams::new(4.4, 6e8, 0.0).unwrap(),
            EosParams::ideal(1.4).unwrap(),
        )
    }

    fn face(wl: &PrimitiveState<1>, wr: &PrimitiveState<1>, eos: EosPair) -> FaceContext<1> {
        let ql = to_conserved(wl, eos).unwrap();
        let qr = to_conserved(wr, eos).unwrap();
        FaceContext::new(&ql, &qr, [1.0], eos).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
    }

    fn wa_left_moving() -> PrimitiveState<1> {
        PrimitiveState {
            alpha1: 1.0 - 1e-6,
            rho1: 1e3,
            rho2: 1.0,
            vel: [100.0],
            p1: 1e9,
            p2: 1e9,
        }
    }

    fn wa_right_moving() -> PrimitiveState<1> {
        PrimitiveState {
            alpha1: 1e-6,
            rho1: 1e3,
            rho2: 1.0,
            vel: [-50.0],
            p1: 1e5,
            p2: 1e5,
        }
    }

    #[test]
    fn br_variants_vanish_on_equal_states() {
        let eos = water_air();
        let w = PrimitiveState::<1> {
            alpha1: 0.37,
            rho1: 870.0,
            rho2: 1.9,
            vel: [212.0],
            p1: 3.1e7,
            p2: 2.9e7,
        };
        let ctx = face(&w, &w, eos);
        for v in [NonconsVariant::Br2023, NonconsVariant::Br2015] {
            let t = contribution(v, &ctx);
            assert_eq!(t.minus.alpha, 0.0);
            assert_eq!(t.plus.alpha, 0.0);
            assert_eq!(t.minus.sigma, 0.0);
            assert_eq!(t.plus.sigma, 0.0);
        }
    }

    #[test]
    fn br2023_constant_alpha_velocity_jump() {
        let eos = water_air();
        let wl = PrimitiveState::<1> {
            alpha1: 0.5,
            rho1: 1000.0,
            rho2: 1.0,
            vel: [80.0],
            p1: 1e6,
            p2: 1e6,
        };
        let wr = PrimitiveState::<1> { vel: [-30.0], ..wl };
        let t = contribution(NonconsVariant::Br2023, &face(&wl, &wr, eos));
        // <u alpha> - <u> alpha collapses when alpha is constant.
        assert!(t.minus.alpha.abs() < 1e-13);
        assert!(t.plus.alpha.abs() < 1e-13);
    }

    #[test]
    fn crouzet_alpha_slot_does_not_vanish_on_equal_states() {
        let eos = water_air();
        let w = PrimitiveState::<1> {
            alpha1: 0.6,
            rho1: 950.0,
            rho2: 1.3,
            vel: [10.0],
            p1: 2e6,
            p2: 2e6,
        };
        let t = contribution(NonconsVariant::Crouzet, &face(&w, &w, eos));
        assert!(rel(t.minus.alpha, 10.0 * 0.6) < 1e-14);
        assert!(rel(t.plus.alpha, 10.0 * 0.6) < 1e-14);
    }

    #[test]
    fn all_variants_vanish_at_rest() {
        let eos = water_air();
        let wl = PrimitiveState::<1> {
            alpha1: 0.9,
            rho1: 1000.0,
            rho2: 1.0,
            vel: [0.0],
            p1: 1e9,
            p2: 1e5,
        };
        let wr = PrimitiveState::<1> {
            alpha1: 0.1,
            rho1: 900.0,
            rho2: 1.5,
            vel: [0.0],
            ..wl
        };
        let ctx = face(&wl, &wr, eos);
        for v in [
            NonconsVariant::Br2023,
            NonconsVariant::Br2015,
            NonconsVariant::Crouzet,
        ] {
            let t = contribution(v, &ctx);
            assert_eq!(t.minus.alpha, 0.0);
            assert_eq!(t.plus.alpha, 0.0);
            assert_eq!(t.minus.sigma, 0.0);
            assert_eq!(t.plus.sigma, 0.0);
        }
    }

    #[test]
    fn golden_water_air_face() {
        // Water-air shock-tube states given velocities uL = 100, uR = -50;
        // every average verified independently, slot by slot.
        let eos = water_air();
        let ctx = face(&wa_left_moving(), &wa_right_moving(), eos);

        let t = contribution(NonconsVariant::Br2023, &ctx);
        assert!(rel(t.minus.alpha, 24.99995) < 1e-12);
        assert!(rel(t.plus.alpha, 49.9999) < 1e-12);
        assert!(rel(t.minus.sigma, -24975002445.079872) < 1e-12);
        assert!(rel(t.plus.sigma, -4950044.995048508) < 1e-9);

        let t = contribution(NonconsVariant::Br2015, &ctx);
        assert!(rel(t.minus.alpha, -12.499975) < 1e-12);
        assert!(rel(t.plus.alpha, 12.499975) < 1e-12);
        assert!(rel(t.minus.sigma, -12485026200.042412) < 1e-12);
        assert!(rel(t.plus.sigma, 12485026200.04241) < 1e-12);

        let t = contribution(NonconsVariant::Crouzet, &ctx);
        assert!(rel(t.minus.alpha, 50.0) < 1e-12);
        assert!(rel(t.plus.alpha, -25.0) < 1e-12);
        assert!(rel(t.minus.sigma, 5049944.994951481) < 1e-9);
        assert!(rel(t.plus.sigma, 24974997455.06988) < 1e-12);
    }

    #[test]
    fn energy_slots_are_bitwise_antisymmetric() {
        let eos = water_air();
        let ctx = face(&wa_left_moving(), &wa_right_moving(), eos);
        for v in [
            NonconsVariant::Br2023,
            NonconsVariant::Br2015,
            NonconsVariant::Crouzet,
        ] {
            let t = contribution(v, &ctx);
            let m: ConservedState<1> = t.minus.as_state();
            let p: ConservedState<1> = t.plus.as_state();
            assert_eq!(m.en1.to_bits(), (-m.en2).to_bits());
            assert_eq!(p.en1.to_bits(), (-p.en2).to_bits());
        }
    }

    #[test]
    fn upwind_alpha_sign_cases() {
        let (al, ar) = (0.2, 0.7);
        let jump = ar - al;
        // Right-moving contact: the full advective transfer goes to the
        // right cell; left-moving: to the left cell; stationary: nothing
        // moves.
        assert_eq!(hllc_upwind_alpha(al, ar, 3.0), (0.0, -3.0 * jump));
        assert_eq!(hllc_upwind_alpha(al, ar, -3.0), (-3.0 * jump, 0.0));
        assert_eq!(hllc_upwind_alpha(al, ar, 0.0), (0.0, -0.0));
        assert_eq!(hllc_upwind_alpha(0.4, 0.4, 2.0), (0.0, -0.0));
    }

    #[test]
    fn single_phase_degeneracy_energy_slots() {
        // alpha1 = 1 - eps on both sides: the energy slots shrink like eps.
        let eos = water_air();
        let sigma_at = |eps: f64| {
            let wl = PrimitiveState::<1> {
                alpha1: 1.0 - eps,
                rho1: 1000.0,
                rho2: 1.0,
                vel: [120.0],
                p1: 5e8,
                p2: 4e8,
            };
            let wr = PrimitiveState::<1> {
                alpha1: 1.0 - eps,
                rho1: 990.0,
                rho2: 1.2,
                vel: [-40.0],
                p1: 3e8,
                p2: 3.5e8,
            };
            let ctx = face(&wl, &wr, eos);
            [
                contribution(NonconsVariant::Br2023, &ctx).minus.sigma,
                contribution(NonconsVariant::Br2015, &ctx).minus.sigma,
            ]
        };
        let coarse = sigma_at(1e-4);
        let fine = sigma_at(1e-6);
        for (c, f) in coarse.iter().zip(fine.iter()) {
            assert!(f.abs() < c.abs() / 50.0, "sigma not O(eps): {c} -> {f}");
        }
    }

    #[test]
    fn pc_report_br_zero_crouzet_positive() {
        let eos = water_air();
        // Deterministic sample sweep with varied velocities and fractions.
        let faces: Vec<FaceContext<1>> = (0..1000)
            .map(|i| {
                let s = i as f64 / 1000.0;
                let wl = PrimitiveState::<1> {
                    alpha1: 0.05 + 0.9 * s,
                    rho1: 800.0 + 300.0 * s,
                    rho2: 0.5 + 2.0 * s,
                    vel: [-200.0 + 400.0 * s],
                    p1: 1e5 + 1e8 * s,
                    p2: 1e5 + 9e7 * s,
                };
                let wr = PrimitiveState::<1> {
                    alpha1: 0.95 - 0.9 * s,
                    rho1: 1000.0 - 150.0 * s,
                    rho2: 2.5 - 1.5 * s,
                    vel: [150.0 - 300.0 * s],
                    p1: 2e7 + 5e7 * s,
                    p2: 3e7 + 2e7 * s,
                };
                face(&wl, &wr, eos)
            })
            .collect();
        let br = pc_consistency_check(NonconsVariant::Br2023, faces.iter().copied());
        assert_eq!(br.max_equal_state_residual, 0.0);
        assert!(br.max_path_integral_defect < 1e-10);
        let br15 = pc_consistency_check(NonconsVariant::Br2015, faces.iter().copied());
        assert_eq!(br15.max_equal_state_residual, 0.0);
        assert!(br15.max_path_integral_defect < 1e-10);
        let cz = pc_consistency_check(NonconsVariant::Crouzet, faces.iter().copied());
        assert!(cz.max_equal_state_residual > 0.0);
    }
}
