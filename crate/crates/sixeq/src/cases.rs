//! Bundled benchmark definitions: five 1D shock tubes and one 2D Riemann
//! problem, stored as exact decimal literals in SI units, plus the
//! epoxy-spinel pressure-ratio sweep generator and a plateau extractor for
//! cross-scheme comparisons.

use crate::eos::EosParams;
use crate::error::{Error, Result};
use crate::solver::{Boundary, Grid};
use crate::state::{EosPair, PrimitiveState};

#[derive(Debug, Clone)]
pub enum CaseGeometry {
    OneD {
        domain: (f64, f64),
        /// Location of the initial discontinuity.
        x0: f64,
        left: PrimitiveState<1>,
        right: PrimitiveState<1>,
    },
    TwoD {
        domain: [(f64, f64); 2],
        /// Quadrant states in the order (x>0, y>0), (x<0, y>0), (x<0, y<0),
        /// (x>0, y<0).
        quadrants: [PrimitiveState<2>; 4],
    },
}

#[derive(Debug, Clone)]
pub struct RiemannCase {
    pub name: String,
    pub eos: EosPair,
    pub geometry: CaseGeometry,
    pub t_final: f64,
    /// Suggested per-axis mesh sizes (coarse first).
    pub default_cells: Vec<usize>,
    pub default_courant: f64,
    pub boundary: Boundary,
    /// Expected-behavior flags carried into reports.
    pub notes: Vec<String>,
}

impl RiemannCase {
    pub fn dim(&self) -> usize {
        match self.geometry {
            CaseGeometry::OneD { .. } => 1,
            CaseGeometry::TwoD { .. } => 2,
        }
    }

    /// Build a 1D grid by cell-center sampling: centers left of `x0` get the
    /// left state, all others the right state.
    pub fn grid_1d(&self, n: usize) -> Result<Grid<1>> {
        match &self.geometry {
            CaseGeometry::OneD {
                domain,
                x0,
                left,
                right,
            } => {
                let (left, right, x0) = (*left, *right, *x0);
                Grid::from_fn(
                    [(domain.0, domain.1)],
                    [n],
                    [[self.boundary; 2]],
                    self.eos,
                    move |x| if x[0] < x0 { left } else { right },
                )
            }
            CaseGeometry::TwoD { .. } => Err(Error::Config(format!(
                "case {} is two-dimensional",
                self.name
            ))),
        }
    }

    /// Build a 2D grid by cell-center sampling with quadrant selection on
    /// the signs of the center coordinates (>= 0 counts as positive).
    pub fn grid_2d(&self, n: [usize; 2]) -> Result<Grid<2>> {
        match &self.geometry {
            CaseGeometry::TwoD { domain, quadrants } => {
                let quadrants = *quadrants;
                Grid::from_fn(
                    *domain,
                    n,
                    [[self.boundary; 2]; 2],
                    self.eos,
                    move |x| match (x[0] >= 0.0, x[1] >= 0.0) {
                        (true, true) => quadrants[0],
                        (false, true) => quadrants[1],
                        (false, false) => quadrants[2],
                        (true, false) => quadrants[3],
                    },
                )
            }
            CaseGeometry::OneD { .. } => Err(Error::Config(format!(
                "case {} is one-dimensional",
                self.name
            ))),
        }
    }
}

pub const BUILTIN_NAMES: [&str; 6] = [
    "sonic-rarefaction",
    "low-density",
    "water-air",
    "epoxy-spinel",
    "cavitation",
    "riemann-2d",
];

fn prim1(alpha1: f64, rho1: f64, p1: f64, u: f64, rho2: f64, p2: f64) -> PrimitiveState<1> {
    PrimitiveState {
        alpha1,
        rho1,
        rho2,
        vel: [u],
        p1,
        p2,
    }
}

/// Look up a bundled benchmark by name.
pub fn builtin(name: &str) -> Result<RiemannCase> {
    let case = match name {
        "sonic-rarefaction" => RiemannCase {
            name: name.into(),
            eos: EosPair::new(
                EosParams::new(1.4, 0.0, 0.0)?,
                EosParams::new(1.4, 0.0, 0.0)?,
            ),
            geometry: CaseGeometry::OneD {
                domain: (0.0, 1.0),
                x0: 0.5,
                left: prim1(0.8, 1.0, 1.0, 0.75, 1.0, 1.0),
                right: prim1(0.3, 0.125, 0.1, 0.0, 0.125, 0.1),
            },
            t_final: 0.15,
            default_cells: vec![1024, 65536],
            default_courant: 0.9,
            boundary: Boundary::Transmissive,
            notes: vec![],
        },
        "low-density" => RiemannCase {
            name: name.into(),
            eos: EosPair::new(
                EosParams::new(1.4, 0.0, 0.0)?,
                EosParams::new(1.4, 0.0, 0.0)?,
            ),
            geometry: CaseGeometry::OneD {
                domain: (0.0, 1.0),
                x0: 0.5,
                left: prim1(0.8, 1.0, 0.4, -2.0, 1.0, 0.4),
                right: prim1(0.5, 1.0, 0.4, 2.0, 1.0, 0.4),
            },
            t_final: 0.15,
            default_cells: vec![1024, 65536],
            default_courant: 0.9,
            boundary: Boundary::Transmissive,
            notes: vec!["hllc+crouzet expected to fail with corrupted densities".into()],
        },
        "water-air" => RiemannCase {
            name: name.into(),
            eos: EosPair::new(
                EosParams::new(4.4, 6e8, 0.0)?,
                EosParams::new(1.4, 0.0, 0.0)?,
            ),
            geometry: CaseGeometry::OneD {
                domain: (0.0, 1.0),
                x0: 0.7,
                left: prim1(1.0 - 1e-6, 1e3, 1e9, 0.0, 1.0, 1e9),
                right: prim1(1e-6, 1e3, 1e5, 0.0, 1.0, 1e5),
            },
            t_final: 2.4e-4,
            default_cells: vec![1024, 65536],
            default_courant: 0.9,
            boundary: Boundary::Transmissive,
            notes: vec!["rusanov without relaxation stable only for courant <= 0.3".into()],
        },
        "epoxy-spinel" => RiemannCase {
            name: name.into(),
            eos: EosPair::new(
                EosParams::new(2.43, 5.3e9, 0.0)?,
                EosParams::new(1.62, 141e9, 0.0)?,
            ),
            geometry: CaseGeometry::OneD {
                domain: (0.0, 1.0),
                x0: 0.6,
                left: prim1(0.5954, 1185.0, 2e11, 0.0, 3622.0, 2e11),
                right: prim1(0.5954, 1185.0, 1e5, 0.0, 3622.0, 1e5),
            },
            t_final: 2.9e-5,
            default_cells: vec![1024, 65536],
            default_courant: 0.9,
            boundary: Boundary::Transmissive,
            notes: vec![],
        },
        "cavitation" => RiemannCase {
            name: name.into(),
            eos: EosPair::new(
                EosParams::new(2.35, 1e9, -1.167e6)?,
                EosParams::new(1.43, 0.0, 2.030e6)?,
            ),
            geometry: CaseGeometry::OneD {
                domain: (0.0, 1.0),
                x0: 0.5,
                left: prim1(0.99, 1150.0, 1e5, -2.0, 0.63, 1e5),
                right: prim1(0.99, 1150.0, 1e5, 2.0, 0.63, 1e5),
            },
            t_final: 3.2e-3,
            default_cells: vec![1024, 65536],
            default_courant: 0.9,
            boundary: Boundary::Transmissive,
            notes: vec!["near-vacuum vapour fractions".into()],
        },
        "riemann-2d" => {
            let q_high = PrimitiveState::<2> {
                alpha1: 0.8,
                rho1: 2.0,
                rho2: 1.5,
                vel: [0.0, 0.0],
                p1: 2.0,
                p2: 2.0,
            };
            let q_low = PrimitiveState::<2> {
                alpha1: 0.4,
                rho1: 1.0,
                rho2: 0.5,
                vel: [0.0, 0.0],
                p1: 1.0,
                p2: 1.0,
            };
            RiemannCase {
                name: name.into(),
                eos: EosPair::new(
                    EosParams::new(1.4, 0.0, 0.0)?,
                    EosParams::new(1.4, 0.0, 0.0)?,
                ),
                geometry: CaseGeometry::TwoD {
                    domain: [(-0.5, 0.5), (-0.5, 0.5)],
                    quadrants: [q_high, q_low, q_high, q_low],
                },
                t_final: 0.15,
                default_cells: vec![256, 2048],
                default_courant: 0.45,
                boundary: Boundary::Reflective,
                notes: vec![],
            }
        }
        _ => {
            return Err(Error::UnknownCase {
                name: name.to_string(),
                valid: BUILTIN_NAMES.join(", "),
            })
        }
    };
    Ok(case)
}

/// The left-pressure sweep of the epoxy-spinel shock: both phasic left
/// pressures are replaced by each entry of `left_pressures`.
pub fn epoxy_sweep(left_pressures: &[f64]) -> Result<Vec<RiemannCase>> {
    let base = builtin("epoxy-spinel")?;
    left_pressures
        .iter()
        .map(|&pl| {
            if !pl.is_finite() {
                return Err(Error::invalid("left pressure", pl));
            }
            let mut case = base.clone();
            match &mut case.geometry {
                CaseGeometry::OneD { left, .. } => {
                    left.p1 = pl;
                    left.p2 = pl;
                    if pl + case.eos.phase1.pi_inf <= 0.0 || pl + case.eos.phase2.pi_inf <= 0.0 {
                        return Err(Error::invalid("left pressure", pl));
                    }
                }
                CaseGeometry::TwoD { .. } => unreachable!(),
            }
            case.name = format!("epoxy-spinel-pl{pl:e}");
            Ok(case)
        })
        .collect()
}

/// The paper-reported sweep pressures.
pub const EPOXY_SWEEP_PRESSURES: [f64; 7] = [1e6, 1e7, 1e8, 1e9, 1e10, 5e10, 1e11];

/// Mean and maximum absolute deviation of `values` over the cells whose `x`
/// lies inside `window` (inclusive).
pub fn plateau_extract(x: &[f64], values: &[f64], window: (f64, f64)) -> Result<(f64, f64)> {
    assert_eq!(x.len(), values.len());
    let mut mean = 0.0;
    let mut count = 0usize;
    for (xi, v) in x.iter().zip(values) {
        if *xi >= window.0 && *xi <= window.1 {
            mean += v;
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::Config(format!(
            "empty plateau window [{}, {}]",
            window.0, window.1
        )));
    }
    mean /= count as f64;
    let mut dev = 0.0f64;
    for (xi, v) in x.iter().zip(values) {
        if *xi >= window.0 && *xi <= window.1 {
            dev = dev.max((v - mean).abs());
        }
    }
    Ok((mean, dev))
}
