//! Instantaneous mechanical (pressure) relaxation.
//!
//! After each hyperbolic step the phasic pressures are driven to a common
//! equilibrium value `p*` while the phasic masses, the mixture momentum and
//! the mixture total energy stay fixed. With stiffened-gas thermodynamics the
//! equilibrium pressure is the root of a quadratic whose coefficients involve
//! only the pre-relaxation state and the interfacial pressure; the
//! equilibrium volume fraction then follows in closed form. The interfacial
//! pressure along the relaxation path is taken as the mean of its initial
//! and final values, which makes the integrated phasic-energy exchange exact
//! for a linear-in-alpha interfacial pressure.

use rayon::prelude::*;

use crate::eos;
use crate::error::{Error, Result};
use crate::state::{to_primitive, ConservedState, EosPair, PrimitiveState};

/// Outcome of relaxing one state.
#[derive(Debug, Clone, Copy)]
pub struct RelaxationResult<const D: usize> {
    pub p_star: f64,
    pub alpha1_star: f64,
    pub q_star: ConservedState<D>,
}

/// Acoustic-impedance-weighted interfacial pressure
/// `p_I = (Z2 p1 + Z1 p2) / (Z1 + Z2)` with `Z_k = rho_k c_k`.
pub fn interfacial_pressure<const D: usize>(w: &PrimitiveState<D>, eos: EosPair) -> Result<f64> {
    let c1 = eos::sound_speed(eos.phase1, w.rho1, w.p1)?;
    let c2 = eos::sound_speed(eos.phase2, w.rho2, w.p2)?;
    let z1 = w.rho1 * c1;
    let z2 = w.rho2 * c2;
    Ok((z2 * w.p1 + z1 * w.p2) / (z1 + z2))
}

/// Relax one state to mechanical equilibrium.
pub fn relax_pressure<const D: usize>(
    q0: &ConservedState<D>,
    eos: EosPair,
) -> Result<RelaxationResult<D>> {
    let w0 = to_primitive(q0, eos)?;
    let p_i0 = interfacial_pressure(&w0, eos)?;
    let (g1, pi1) = (eos.phase1.gamma, eos.phase1.pi_inf);
    let (g2, pi2) = (eos.phase2.gamma, eos.phase2.pi_inf);
    let (a1, a2) = (w0.alpha1, w0.alpha2());
    let (p1, p2) = (w0.p1, w0.p2);

    let k1 = 2.0 * g1 * pi1 + (g1 - 1.0) * p_i0;
    let k2 = 2.0 * g2 * pi2 + (g2 - 1.0) * p_i0;
    let a = 1.0 + g2 * a1 + g1 * a2;
    let b = k1 * a2 + k2 * a1 - (1.0 + g2) * a1 * p1 - (1.0 + g1) * a2 * p2;
    let c = -k2 * a1 * p1 - k1 * a2 * p2;

    let mut disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        if disc >= -1e-12 * b * b {
            disc = 0.0;
        } else {
            return Err(Error::RelaxationFailure {
                reason: "negative discriminant",
                p1,
                p2,
            });
        }
    }
    // Robust root pair; `a > 0` always, so the larger root is q0/a or c/q0
    // depending on the sign of b.
    let sq = disc.sqrt();
    let qq = -0.5 * (b + if b >= 0.0 { sq } else { -sq });
    let (mut lo, mut hi) = (qq / a, c / qq);
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }

    let alpha1_at = |p_star: f64| -> f64 {
        a1 * ((g1 - 1.0) * p_star + 2.0 * p1 + k1) / ((g1 + 1.0) * p_star + k1)
    };
    let admissible = |p_star: f64, alpha1: f64| -> bool {
        p_star.is_finite()
            && p_star + pi1 > 0.0
            && p_star + pi2 > 0.0
            && alpha1 > 0.0
            && alpha1 < 1.0
    };

    // Prefer the larger root; fall back to the smaller one before giving up.
    let mut chosen = None;
    for p_star in [hi, lo] {
        let alpha1 = alpha1_at(p_star);
        if admissible(p_star, alpha1) {
            chosen = Some((p_star, alpha1));
            break;
        }
    }
    let (p_star, alpha1_star) = chosen.ok_or_else(|| {
        let alpha_hi = alpha1_at(hi);
        if hi.is_finite() && hi + pi1 > 0.0 && hi + pi2 > 0.0 && !(alpha_hi > 0.0 && alpha_hi < 1.0)
        {
            Error::RelaxationFailure {
                reason: "equilibrium volume fraction out of (0,1)",
                p1,
                p2,
            }
        } else {
            Error::RelaxationFailure {
                reason: "no admissible root",
                p1,
                p2,
            }
        }
    })?;

    // Integrated energy exchange with p_I averaged over the path; phase 2
    // receives the exact complement so the mixture energy is conserved
    // bitwise.
    let exchange = 0.5 * (p_i0 + p_star) * (alpha1_star - w0.alpha1);
    let en1 = q0.en1 - exchange;
    let en2 = (q0.en1 + q0.en2) - en1;
    Ok(RelaxationResult {
        p_star,
        alpha1_star,
        q_star: ConservedState {
            alpha1: alpha1_star,
            m1: q0.m1,
            m2: q0.m2,
            mom: q0.mom,
            en1,
            en2,
        },
    })
}

/// Relax every cell of a field in place. Cells are independent, so the result
/// does not depend on traversal order or parallelism; on failure the error
/// names the first failing cell (lowest index).
pub fn relax_field<const D: usize>(cells: &mut [ConservedState<D>], eos: EosPair) -> Result<()> {
    let first_err = cells
        .par_iter_mut()
        .enumerate()
        .filter_map(|(i, q)| match relax_pressure(q, eos) {
            Ok(r) => {
                *q = r.q_star;
                None
            }
            Err(e) => Some((i, e)),
        })
        .min_by_key(|(i, _)| *i);
    match first_err {
        None => Ok(()),
        Some((cell, e)) => Err(Error::RelaxationAtCell {
            cell,
            source: Box::new(e),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eos::EosParams;
    use crate::state::to_conserved;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
    }

    fn water_air() -> EosPair {
        EosPair::new(
            EosParams::new(4.4, 6e8, 0.0).unwrap(),
            EosParams::ideal(1.4).unwrap(),
        )
    }

    #[test]
    fn interfacial_pressure_equilibrium() {
        let eos = water_air();
        let w = PrimitiveState::<1> {
            alpha1: 0.4,
            rho1: 1000.0,
            rho2: 1.0,
            vel: [3.0],
            p1: 2e5,
            p2: 2e5,
        };
        assert!(rel(interfacial_pressure(&w, eos).unwrap(), 2e5) < 1e-14);
    }

    #[test]
    fn interfacial_pressure_equal_impedance() {
        // Identical phases with different pressures: p_I is the arithmetic
        // mean up to the (small) impedance difference; force Z1 = Z2 by
        // matching rho c.
        let eos = EosPair::new(
            EosParams::ideal(1.4).unwrap(),
            EosParams::ideal(1.4).unwrap(),
        );
        // Z = rho c = sqrt(gamma p rho): equal when p1 rho1 = p2 rho2.
        let w = PrimitiveState::<1> {
            alpha1: 0.5,
            rho1: 1.0,
            rho2: 2.0,
            vel: [0.0],
            p1: 2.0,
            p2: 1.0,
        };
        assert!(rel(interfacial_pressure(&w, eos).unwrap(), 1.5) < 1e-14);
    }

    #[test]
    fn interfacial_pressure_between_phasic_pressures() {
        let eos = water_air();
        let w = PrimitiveState::<1> {
            alpha1: 1.0 - 1e-6,
            rho1: 1e3,
            rho2: 1.0,
            vel: [0.0],
            p1: 1e9,
            p2: 1e5,
        };
        let pi = interfacial_pressure(&w, eos).unwrap();
        assert!(pi >= 1e5 && pi <= 1e9);
    }

    #[test]
    fn equilibrium_fixed_point() {
        let eos = water_air();
        let w = PrimitiveState::<1> {
            alpha1: 0.7,
            rho1: 1000.0,
            rho2: 1.3,
            vel: [25.0],
            p1: 3.7e6,
            p2: 3.7e6,
        };
        let q0 = to_conserved(&w, eos).unwrap();
        let r = relax_pressure(&q0, eos).unwrap();
        assert!(rel(r.p_star, 3.7e6) < 1e-12);
        assert!(rel(r.alpha1_star, 0.7) < 1e-12);
        assert_eq!(r.q_star.m1, q0.m1);
        assert_eq!(r.q_star.m2, q0.m2);
        assert_eq!(r.q_star.mom, q0.mom);
        assert!(rel(r.q_star.en1, q0.en1) < 1e-14);
        assert!(rel(r.q_star.en2, q0.en2) < 1e-14);
    }

    #[test]
    fn ideal_gas_two_pressures() {
        // gamma = 1.4 both phases, alpha = 0.5, rho = 1, p = (2, 1):
        // verified against the saturation bisection oracle in the
        // integration suite; here pin the closed form.
        let eos = EosPair::new(
            EosParams::ideal(1.4).unwrap(),
            EosParams::ideal(1.4).unwrap(),
        );
        let w = PrimitiveState::<1> {
            alpha1: 0.5,
            rho1: 1.0,
            rho2: 1.0,
            vel: [0.0],
            p1: 2.0,
            p2: 1.0,
        };
        let q0 = to_conserved(&w, eos).unwrap();
        let r = relax_pressure(&q0, eos).unwrap();
        assert!(r.p_star > 1.0 && r.p_star < 2.0);
        assert!(r.alpha1_star > 0.5, "phase 1 expands while depressurizing");
        // Mixture energy conserved bitwise.
        assert_eq!(r.q_star.en1 + r.q_star.en2, q0.en1 + q0.en2);
        // Both phases must satisfy the EOS at (p*, rho_k*).
        let w_star = to_primitive(&r.q_star, eos).unwrap();
        assert!(rel(w_star.p1, r.p_star) < 1e-9);
        assert!(rel(w_star.p2, r.p_star) < 1e-9);
    }

    #[test]
    fn relax_field_locality() {
        let eos = water_air();
        let base = PrimitiveState::<1> {
            alpha1: 0.6,
            rho1: 1000.0,
            rho2: 1.0,
            vel: [0.0],
            p1: 5e5,
            p2: 5e5,
        };
        let perturbed = PrimitiveState::<1> { p2: 9e5, ..base };
        let mut cells = vec![to_conserved(&base, eos).unwrap(); 16];
        cells[7] = to_conserved(&perturbed, eos).unwrap();
        let before = cells.clone();
        relax_field(&mut cells, eos).unwrap();
        for (i, (b, a)) in before.iter().zip(cells.iter()).enumerate() {
            if i == 7 {
                assert!(rel(a.alpha1, b.alpha1) > 1e-10, "cell 7 must change");
            } else {
                assert!(rel(a.en1, b.en1) < 1e-13);
                assert!(rel(a.alpha1, b.alpha1) < 1e-13);
            }
        }
        // Conservation across the field.
        let sum = |cs: &[ConservedState<1>], f: fn(&ConservedState<1>) -> f64| -> f64 {
            cs.iter().map(f).sum()
        };
        assert_eq!(sum(&before, |q| q.m1), sum(&cells, |q| q.m1));
        assert!(
            rel(
                sum(&before, |q| q.en1 + q.en2),
                sum(&cells, |q| q.en1 + q.en2)
            ) < 1e-15
        );
    }

    #[test]
    fn relax_field_reports_first_failing_cell() {
        let eos = water_air();
        let ok = PrimitiveState::<1> {
            alpha1: 0.5,
            rho1: 1000.0,
            rho2: 1.0,
            vel: [0.0],
            p1: 1e5,
            p2: 1e5,
        };
        let mut cells = vec![to_conserved(&ok, eos).unwrap(); 8];
        // Corrupt two cells with non-finite energy; the report must name the
        // first one.
        cells[3].en1 = f64::NAN;
        cells[6].en1 = f64::NAN;
        match relax_field(&mut cells, eos) {
            Err(Error::RelaxationAtCell { cell, .. }) => assert_eq!(cell, 3),
            other => panic!("expected cell-level failure, got {other:?}"),
        }
    }
}
