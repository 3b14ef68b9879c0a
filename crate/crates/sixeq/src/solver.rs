//! First-order time marching on uniform 1D/2D grids.
//!
//! One step is: fill the ghost layer, evaluate every face of every axis from
//! the frozen time-n field, apply all increments at once (unsplit in 2D),
//! optionally relax the pressures, then audit admissibility of the whole
//! field. Face evaluations and cell updates are data-parallel with indexed
//! outputs and all reductions are order-fixed, so results are bit-identical
//! for any thread count.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Field, Result};
use crate::fluxes::{
    hllc_flux_with, hllc_wave_fan, physical_flux_prim, rusanov_flux, FaceContext, FaceSide,
};
use crate::noncons::{contribution, hllc_upwind_alpha, NonconsVariant, SideTerms};
use crate::relaxation::relax_pressure;
use crate::state::{
    frozen_sound_speed, to_conserved, to_primitive, ConservedState, EosPair, PrimitiveState,
};
use crate::waveprop::hllc_fluctuations_with;

/// Conservative flux choice; `HllcWaveProp` is the self-contained
/// fluctuation form that needs no separate non-conservative treatment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluxKind {
    Rusanov,
    Hllc,
    HllcWaveProp,
}

impl FluxKind {
    pub fn name(self) -> &'static str {
        match self {
            FluxKind::Rusanov => "rusanov",
            FluxKind::Hllc => "hllc",
            FluxKind::HllcWaveProp => "hllc-wp",
        }
    }
}

/// Full scheme selection for a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub flux: FluxKind,
    /// Ignored by `HllcWaveProp`, which carries the non-conservative terms in
    /// its fluctuations.
    pub noncons: NonconsVariant,
    pub courant: f64,
    pub relax: bool,
    /// Optional floor eps: clamp alpha1 into [eps, 1-eps] at the end of each
    /// step (after relaxation), counting every clamp. Off by default.
    pub alpha_floor: Option<f64>,
}

impl SchemeConfig {
    pub fn new(flux: FluxKind, noncons: NonconsVariant, courant: f64, relax: bool) -> Result<Self> {
        if !(courant > 0.0 && courant <= 1.0) {
            return Err(Error::Config(format!(
                "courant must be in (0, 1], got {courant}"
            )));
        }
        Ok(SchemeConfig {
            flux,
            noncons,
            courant,
            relax,
            alpha_floor: None,
        })
    }

    /// HLLC + Crouzet is known to corrupt near-vacuum states.
    pub fn known_fragile(&self) -> bool {
        self.flux == FluxKind::Hllc && self.noncons == NonconsVariant::Crouzet
    }

    pub fn id(&self) -> String {
        match self.flux {
            FluxKind::HllcWaveProp => "hllc-wp".to_string(),
            f => format!("{}+{}", f.name(), self.noncons.name()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Transmissive,
    Reflective,
}

/// Per-cell primitive cache refreshed by the admissibility audit; ghosts get
/// transformed copies when the boundary is applied.
#[derive(Debug, Clone, Copy)]
struct CellPrim<const D: usize> {
    w: PrimitiveState<D>,
    cf: f64,
    y1: f64,
    pbar: f64,
    rho: f64,
}

impl<const D: usize> CellPrim<D> {
    fn from_state(q: &ConservedState<D>, eos: EosPair) -> Result<Self> {
        let w = to_primitive(q, eos)?;
        Ok(CellPrim {
            w,
            cf: frozen_sound_speed(&w, eos)?,
            y1: w.y1(),
            pbar: w.pbar(),
            rho: w.rho(),
        })
    }

    fn reflected(&self, axis: usize) -> Self {
        let mut w = self.w;
        w.vel[axis] = -w.vel[axis];
        CellPrim { w, ..*self }
    }
}

/// Uniform grid with a one-cell ghost layer per side.
#[derive(Clone)]
pub struct Grid<const D: usize> {
    n: [usize; D],
    bounds: [(f64, f64); D],
    boundary: [[Boundary; 2]; D],
    eos: EosPair,
    /// Padded cell array, row-major, axis 0 fastest.
    cells: Vec<ConservedState<D>>,
    prims: Vec<CellPrim<D>>,
}

impl<const D: usize> Grid<D> {
    /// Build a grid by sampling `init` at cell centers.
    pub fn from_fn(
        bounds: [(f64, f64); D],
        n: [usize; D],
        boundary: [[Boundary; 2]; D],
        eos: EosPair,
        init: impl Fn([f64; D]) -> PrimitiveState<D>,
    ) -> Result<Self> {
        for (axis, &count) in n.iter().enumerate() {
            if count == 0 {
                return Err(Error::Config(format!("axis {axis} has zero cells")));
            }
        }
        let padded = Self::padded_len(n);
        let mut grid = Grid {
            n,
            bounds,
            boundary,
            eos,
            cells: vec![ConservedState::ZERO; padded],
            prims: vec![
                CellPrim {
                    w: PrimitiveState {
                        alpha1: 0.5,
                        rho1: 1.0,
                        rho2: 1.0,
                        vel: [0.0; D],
                        p1: 1.0,
                        p2: 1.0,
                    },
                    cf: 0.0,
                    y1: 0.5,
                    pbar: 1.0,
                    rho: 1.0,
                };
                padded
            ],
        };
        for flat in grid.interior_flat_indices() {
            let idx = grid.decode_interior(flat);
            let w = init(grid.cell_center(idx));
            let q = to_conserved(&w, eos)?;
            let p = grid.padded_index(idx);
            grid.cells[p] = q;
            grid.prims[p] = CellPrim::from_state(&q, eos)?;
        }
        grid.apply_boundary();
        Ok(grid)
    }

    fn padded_len(n: [usize; D]) -> usize {
        n.iter().map(|&k| k + 2).product()
    }

    pub fn n(&self) -> [usize; D] {
        self.n
    }

    pub fn bounds(&self) -> [(f64, f64); D] {
        self.bounds
    }

    pub fn eos(&self) -> EosPair {
        self.eos
    }

    pub fn dx(&self, axis: usize) -> f64 {
        (self.bounds[axis].1 - self.bounds[axis].0) / self.n[axis] as f64
    }

    /// Volume (length/area) of one cell.
    pub fn cell_volume(&self) -> f64 {
        (0..D).map(|a| self.dx(a)).product()
    }

    pub fn num_interior(&self) -> usize {
        self.n.iter().product()
    }

    pub fn interior_flat_indices(&self) -> std::ops::Range<usize> {
        0..self.num_interior()
    }

    /// Interior multi-index (0-based) from an interior flat index
    /// (row-major, axis 0 fastest).
    pub fn decode_interior(&self, flat: usize) -> [usize; D] {
        let mut idx = [0usize; D];
        let mut rest = flat;
        for a in 0..D {
            idx[a] = rest % self.n[a];
            rest /= self.n[a];
        }
        idx
    }

    /// Flat index into the padded array from an interior multi-index.
    fn padded_index(&self, idx: [usize; D]) -> usize {
        let mut flat = 0usize;
        let mut stride = 1usize;
        for a in 0..D {
            flat += (idx[a] + 1) * stride;
            stride *= self.n[a] + 2;
        }
        flat
    }

    pub fn cell_center(&self, idx: [usize; D]) -> [f64; D] {
        let mut x = [0.0; D];
        for a in 0..D {
            x[a] = self.bounds[a].0 + (idx[a] as f64 + 0.5) * self.dx(a);
        }
        x
    }

    pub fn cell(&self, idx: [usize; D]) -> &ConservedState<D> {
        &self.cells[self.padded_index(idx)]
    }

    /// Cached primitive view of an interior cell (valid after construction
    /// and after every completed step).
    pub fn primitive(&self, idx: [usize; D]) -> PrimitiveState<D> {
        self.prims[self.padded_index(idx)].w
    }

    /// Fill the ghost layer. Axis 0 is swept first over interior rows, then
    /// each further axis sweeps the full padded extent of the axes before it,
    /// which also defines the corner ghosts in 2D.
    pub fn apply_boundary(&mut self) {
        match D {
            1 => {
                let n = self.n[0];
                self.copy_ghost(0, 1, 0, self.boundary[0][0]);
                self.copy_ghost(n + 1, n, 0, self.boundary[0][1]);
            }
            2 => {
                let (nx, ny) = (self.n[0], self.n[1]);
                let stride = nx + 2;
                // Axis 0: ghost columns for interior rows.
                for j in 1..=ny {
                    self.copy_ghost(j * stride, j * stride + 1, 0, self.boundary[0][0]);
                    self.copy_ghost(j * stride + nx + 1, j * stride + nx, 0, self.boundary[0][1]);
                }
                // Axis 1: ghost rows over every column, corners included.
                for i in 0..stride {
                    self.copy_ghost(i, stride + i, 1, self.boundary[1][0]);
                    self.copy_ghost(
                        (ny + 1) * stride + i,
                        ny * stride + i,
                        1,
                        self.boundary[1][1],
                    );
                }
            }
            _ => unreachable!("only 1D and 2D grids are supported"),
        }
    }

    fn copy_ghost(&mut self, ghost: usize, source: usize, axis: usize, bc: Boundary) {
        match bc {
            Boundary::Transmissive => {
                self.cells[ghost] = self.cells[source];
                self.prims[ghost] = self.prims[source];
            }
            Boundary::Reflective => {
                let mut q = self.cells[source];
                q.mom[axis] = -q.mom[axis];
                self.cells[ghost] = q;
                self.prims[ghost] = self.prims[source].reflected(axis);
            }
        }
    }

    /// Direct ghost access for boundary-condition tests (padded coordinates).
    pub fn padded_cell(&self, padded: [usize; D]) -> &ConservedState<D> {
        let mut flat = 0usize;
        let mut stride = 1usize;
        for a in 0..D {
            flat += padded[a] * stride;
            stride *= self.n[a] + 2;
        }
        &self.cells[flat]
    }

    /// Chunk index of the first interior row when the padded array is viewed
    /// as rows of length n[0] + 2 (the 1D padded array is its own row 0).
    fn row_chunk_offset() -> usize {
        if D == 1 {
            0
        } else {
            1
        }
    }

    fn num_interior_rows(&self) -> usize {
        self.num_interior() / self.n[0]
    }

    /// Recompute the interior primitive cache, reporting the first
    /// inadmissible cell (lowest interior index). This is the per-step
    /// admissibility audit.
    fn audit(&mut self, step: usize, scheme_id: &str) -> Result<()> {
        let eos = self.eos;
        let first_err = if D == 1 {
            // Fixed-size blocks keep the 1D audit parallel and the error
            // selection deterministic.
            const BLOCK: usize = 2048;
            let n = self.n[0];
            let cells = &self.cells[1..n + 1];
            self.prims[1..n + 1]
                .par_chunks_mut(BLOCK)
                .enumerate()
                .map(|(b, pblock)| {
                    let base = b * BLOCK;
                    for (i, p) in pblock.iter_mut().enumerate() {
                        match CellPrim::from_state(&cells[base + i], eos) {
                            Ok(v) => *p = v,
                            Err(e) => return Some((base + i, e)),
                        }
                    }
                    None
                })
                .filter_map(|x| x)
                .min_by_key(|(i, _)| *i)
        } else {
            // Interior rows are contiguous in the padded array, so the cache
            // is rebuilt with disjoint mutable borrows, row-parallel.
            let nx = self.n[0];
            let row_len = nx + 2;
            let off = Self::row_chunk_offset();
            let rows = self.num_interior_rows();
            let cells = &self.cells;
            self.prims
                .par_chunks_mut(row_len)
                .enumerate()
                .filter(|(c, _)| *c >= off && *c < off + rows)
                .map(|(chunk_no, prow)| {
                    let row = chunk_no - off;
                    let base = chunk_no * row_len;
                    for i in 1..=nx {
                        match CellPrim::from_state(&cells[base + i], eos) {
                            Ok(p) => prow[i] = p,
                            Err(e) => return Some((row * nx + (i - 1), e)),
                        }
                    }
                    None
                })
                .filter_map(|x| x)
                .min_by_key(|(i, _)| *i)
        };
        match first_err {
            None => Ok(()),
            Some((cell, e)) => {
                let (field, value) = match e {
                    Error::Inadmissible { field, value } => (field, value),
                    Error::InvalidInput { value, .. } => (Field::NonFinite, value),
                    other => return Err(other),
                };
                Err(Error::Positivity {
                    step,
                    cell,
                    field,
                    value,
                    scheme: scheme_id.to_string(),
                })
            }
        }
    }
}

/// CFL time step: `dt = C/dim * min_axis(dx_a / max_cells(|u_a| + c_f))`.
pub fn compute_dt<const D: usize>(grid: &Grid<D>, courant: f64) -> Result<f64> {
    let mut dt = f64::INFINITY;
    for axis in 0..D {
        let speed = grid
            .interior_flat_indices()
            .into_par_iter()
            .map(|flat| {
                let p = &grid.prims[grid.padded_index(grid.decode_interior(flat))];
                p.w.vel[axis].abs() + p.cf
            })
            .reduce(|| 0.0, f64::max);
        if !speed.is_finite() || speed <= 0.0 {
            return Err(Error::invalid("signal speed", speed));
        }
        dt = dt.min(grid.dx(axis) / speed);
    }
    Ok(courant * dt / D as f64)
}

/// Increments a face donates to its two neighbours (cell += dt/dx * g).
#[derive(Clone, Copy)]
struct FaceIncr<const D: usize> {
    to_left: ConservedState<D>,
    to_right: ConservedState<D>,
}

fn face_increment<const D: usize>(
    scheme: &SchemeConfig,
    ctx: &FaceContext<D>,
) -> Result<FaceIncr<D>> {
    match scheme.flux {
        FluxKind::Rusanov => {
            let f = rusanov_flux(ctx);
            let t = contribution(scheme.noncons, ctx);
            let h_minus = f + t.minus.as_state();
            let h_plus = f + t.plus.as_state();
            Ok(FaceIncr {
                to_left: h_minus * -1.0,
                to_right: h_plus,
            })
        }
        FluxKind::Hllc => {
            let fan = hllc_wave_fan(ctx)?;
            let f = hllc_flux_with(ctx, &fan);
            let t = contribution(scheme.noncons, ctx);
            let (alpha_minus, alpha_plus) =
                hllc_upwind_alpha(ctx.left.w.alpha1, ctx.right.w.alpha1, fan.s_star);
            let t_minus = SideTerms {
                alpha: alpha_minus,
                sigma: t.minus.sigma,
            };
            let t_plus = SideTerms {
                alpha: alpha_plus,
                sigma: t.plus.sigma,
            };
            let h_minus = f + t_minus.as_state();
            let h_plus = f + t_plus.as_state();
            Ok(FaceIncr {
                to_left: h_minus * -1.0,
                to_right: h_plus,
            })
        }
        FluxKind::HllcWaveProp => {
            let fan = hllc_wave_fan(ctx)?;
            let fl = hllc_fluctuations_with(ctx, &fan);
            Ok(FaceIncr {
                to_left: fl.a_minus * -1.0,
                to_right: fl.a_plus * -1.0,
            })
        }
    }
}

/// Tracked conserved quantities: m1, m2, momentum components, mixture energy.
fn tracked<const D: usize>(q: &ConservedState<D>) -> Vec<f64> {
    let mut v = Vec::with_capacity(D + 3);
    v.push(q.m1);
    v.push(q.m2);
    v.extend_from_slice(&q.mom);
    v.push(q.en1 + q.en2);
    v
}

pub fn tracked_names<const D: usize>() -> Vec<String> {
    let mut names = vec!["m1".to_string(), "m2".to_string()];
    for a in 0..D {
        names.push(format!("mom_{}", ["x", "y"][a]));
    }
    names.push("energy".to_string());
    names
}

/// Compensated (Kahan) accumulator.
#[derive(Clone, Copy, Default)]
struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }
}

fn grid_totals<const D: usize>(grid: &Grid<D>) -> Vec<f64> {
    let vol = grid.cell_volume();
    let mut acc = vec![Kahan::default(); D + 3];
    for flat in grid.interior_flat_indices() {
        let q = grid.cell(grid.decode_interior(flat));
        for (a, t) in acc.iter_mut().zip(tracked(q)) {
            a.add(t * vol);
        }
    }
    acc.into_iter().map(|k| k.sum).collect()
}

fn grid_l1<const D: usize>(grid: &Grid<D>) -> Vec<f64> {
    let vol = grid.cell_volume();
    let mut acc = vec![Kahan::default(); D + 3];
    for flat in grid.interior_flat_indices() {
        let q = grid.cell(grid.decode_interior(flat));
        for (a, t) in acc.iter_mut().zip(tracked(q)) {
            a.add(t.abs() * vol);
        }
    }
    acc.into_iter().map(|k| k.sum).collect()
}

/// Running conservation account of a march.
#[derive(Debug, Clone)]
pub struct ConservationLedger {
    pub initial: Vec<f64>,
    boundary: Vec<Kahan>,
    pub clamp_count: u64,
}

impl ConservationLedger {
    pub fn new<const D: usize>(grid: &Grid<D>) -> Self {
        ConservationLedger {
            initial: grid_totals(grid),
            boundary: vec![Kahan::default(); D + 3],
            clamp_count: 0,
        }
    }

    pub fn boundary_integrals(&self) -> Vec<f64> {
        self.boundary.iter().map(|k| k.sum).collect()
    }
}

impl std::fmt::Debug for Kahan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.sum)
    }
}

/// Balance of one conserved quantity over a run.
#[derive(Debug, Clone, Serialize)]
pub struct QuantityBalance {
    pub name: String,
    pub initial: f64,
    pub end: f64,
    pub boundary_integral: f64,
    /// end - initial - boundary_integral.
    pub defect: f64,
    /// Defect over max(|initial|, |end|, field L1 norm).
    pub relative_defect: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FailureRecord {
    pub step: usize,
    pub time: f64,
    pub cell: Option<usize>,
    pub field: Option<String>,
    pub scheme: String,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub scheme: String,
    pub known_fragile: bool,
    pub relax: bool,
    pub courant: f64,
    pub cells: Vec<usize>,
    pub steps: usize,
    pub final_time: f64,
    pub wall_seconds: f64,
    pub clamp_count: u64,
    pub conservation: Vec<QuantityBalance>,
    pub failure: Option<FailureRecord>,
}

impl RunReport {
    pub fn max_relative_defect(&self) -> f64 {
        self.conservation
            .iter()
            .map(|b| b.relative_defect.abs())
            .fold(0.0, f64::max)
    }
}

/// Advance the grid by `dt` with the given scheme. `step_no` is only used
/// for failure provenance.
pub fn step<const D: usize>(
    grid: &mut Grid<D>,
    scheme: &SchemeConfig,
    dt: f64,
    step_no: usize,
    ledger: &mut ConservationLedger,
) -> Result<()> {
    let scheme_id = scheme.id();
    grid.apply_boundary();

    let n = grid.n;
    let vol = grid.cell_volume();
    let mut incr = vec![ConservedState::<D>::ZERO; grid.num_interior()];

    for axis in 0..D {
        let lambda = dt / grid.dx(axis);
        let mut normal = [0.0; D];
        normal[axis] = 1.0;

        // Face count along `axis`: (n_axis + 1) per transverse line.
        let transverse: usize = (0..D).filter(|a| *a != axis).map(|a| n[a]).product();
        let faces_per_line = n[axis] + 1;
        let n_faces = faces_per_line * transverse;

        let cells = &grid.cells;
        let prims = &grid.prims;
        let face_results: Vec<Result<FaceIncr<D>>> = (0..n_faces)
            .into_par_iter()
            .map(|f| {
                let line = f / faces_per_line;
                let pos = f % faces_per_line;
                // Padded indices of the two neighbours of this face.
                let (left, right) = face_neighbours::<D>(n, axis, line, pos);
                let side = |p: usize| FaceSide {
                    q: cells[p],
                    w: prims[p].w,
                    un: prims[p].w.vel[axis],
                    cf: prims[p].cf,
                    y1: prims[p].y1,
                    pbar: prims[p].pbar,
                    rho: prims[p].rho,
                };
                let ctx = FaceContext {
                    left: side(left),
                    right: side(right),
                    normal,
                };
                face_increment(scheme, &ctx)
            })
            .collect();

        // Deterministic first-error scan in face order.
        let mut faces = Vec::with_capacity(n_faces);
        for (f, r) in face_results.into_iter().enumerate() {
            match r {
                Ok(v) => faces.push(v),
                Err(e) => {
                    // Attribute the failure to the interior cell left of the
                    // face (or the right one for the lower boundary face).
                    let line = f / faces_per_line;
                    let pos = f % faces_per_line;
                    let cell = interior_cell_near_face::<D>(n, axis, line, pos);
                    return Err(match e {
                        Error::Inadmissible { field, value } => Error::Positivity {
                            step: step_no,
                            cell,
                            field,
                            value,
                            scheme: scheme_id,
                        },
                        other => other,
                    });
                }
            }
        }

        // Gather: each interior cell reads its two faces on this axis.
        incr.par_iter_mut().enumerate().for_each(|(flat, acc)| {
            let idx = decode_interior_static::<D>(n, flat);
            let line = transverse_line::<D>(n, axis, idx);
            let base = line * faces_per_line;
            let left_face = base + idx[axis];
            let right_face = base + idx[axis] + 1;
            *acc += (faces[left_face].to_right + faces[right_face].to_left) * lambda;
        });

        // Boundary flux accounting (sequential, fixed order). The flux form
        // applies H+ / -H- at the boundary faces directly; the fluctuation
        // form conserves by telescoping of the physical flux, so its
        // effective boundary fluxes are F(q_edge) - A+DQ at the low side and
        // F(q_edge) + A-DQ at the high side.
        let face_area = vol / grid.dx(axis);
        let cells_ref = &grid.cells;
        let prims_ref = &grid.prims;
        let edge_flux = |line: usize, pos: usize, left_side: bool| -> ConservedState<D> {
            let (l, r) = face_neighbours::<D>(n, axis, line, pos);
            let p = if left_side { l } else { r };
            physical_flux_prim(&cells_ref[p], &prims_ref[p].w, prims_ref[p].w.vel[axis], normal)
        };
        for line in 0..transverse {
            let lo = &faces[line * faces_per_line];
            let hi = &faces[line * faces_per_line + n[axis]];
            let (term_lo, term_hi) = match scheme.flux {
                FluxKind::HllcWaveProp => (
                    edge_flux(line, 0, false) + lo.to_right,
                    edge_flux(line, n[axis], true) * -1.0 + hi.to_left,
                ),
                _ => (lo.to_right, hi.to_left),
            };
            for (k, (a, b)) in tracked(&term_lo).iter().zip(tracked(&term_hi)).enumerate() {
                ledger.boundary[k].add(dt * face_area * (a + b));
            }
        }
    }

    // Apply increments; interior rows are contiguous, update row by row.
    {
        let row_len = n[0] + 2;
        let off = Grid::<D>::row_chunk_offset();
        let rows = grid.num_interior_rows();
        grid.cells
            .par_chunks_mut(row_len)
            .enumerate()
            .for_each(|(chunk_no, row)| {
                if chunk_no < off || chunk_no >= off + rows {
                    return;
                }
                let row_index = chunk_no - off;
                for i in 0..n[0] {
                    row[i + 1] += incr[row_index * n[0] + i];
                }
            });
    }

    // Optional instantaneous pressure relaxation, cellwise.
    if scheme.relax {
        relax_interior(grid, step_no, &scheme_id)?;
    }

    // Optional volume-fraction floor, applied after relaxation; every clamp
    // is counted.
    if let Some(eps) = scheme.alpha_floor {
        let mut clamps = 0u64;
        for flat in 0..grid.num_interior() {
            let p = grid.padded_index(grid.decode_interior(flat));
            let a = grid.cells[p].alpha1;
            let clamped = a.clamp(eps, 1.0 - eps);
            if clamped != a {
                grid.cells[p].alpha1 = clamped;
                clamps += 1;
            }
        }
        ledger.clamp_count += clamps;
    }

    // Full-field admissibility audit; also refreshes the primitive cache
    // used by the next step and by compute_dt.
    grid.audit(step_no, &scheme_id)
}

fn relax_interior<const D: usize>(
    grid: &mut Grid<D>,
    step_no: usize,
    scheme_id: &str,
) -> Result<()> {
    let eos = grid.eos;
    let n = grid.n;
    let first_err = if D == 1 {
        const BLOCK: usize = 2048;
        grid.cells[1..n[0] + 1]
            .par_chunks_mut(BLOCK)
            .enumerate()
            .map(|(b, block)| {
                let base = b * BLOCK;
                for (i, q) in block.iter_mut().enumerate() {
                    match relax_pressure(q, eos) {
                        Ok(r) => *q = r.q_star,
                        Err(e) => return Some((base + i, e)),
                    }
                }
                None
            })
            .filter_map(|x| x)
            .min_by_key(|(i, _)| *i)
    } else {
        let row_len = n[0] + 2;
        let off = Grid::<D>::row_chunk_offset();
        let rows = grid.num_interior_rows();
        grid.cells
            .par_chunks_mut(row_len)
            .enumerate()
            .filter(|(chunk_no, _)| *chunk_no >= off && *chunk_no < off + rows)
            .map(|(chunk_no, row)| {
                let row_index = chunk_no - off;
                for i in 0..n[0] {
                    match relax_pressure(&row[i + 1], eos) {
                        Ok(r) => row[i + 1] = r.q_star,
                        Err(e) => return Some((row_index * n[0] + i, e)),
                    }
                }
                None
            })
            .filter_map(|x| x)
            .min_by_key(|(i, _)| *i)
    };
    match first_err {
        None => Ok(()),
        Some((cell, e)) => Err(Error::Positivity {
            step: step_no,
            cell,
            field: Field::P1,
            value: f64::NAN,
            scheme: format!("{scheme_id} (relaxation: {e})"),
        }),
    }
}

fn decode_interior_static<const D: usize>(n: [usize; D], flat: usize) -> [usize; D] {
    let mut idx = [0usize; D];
    let mut rest = flat;
    for a in 0..D {
        idx[a] = rest % n[a];
        rest /= n[a];
    }
    idx
}

/// Flat index of the transverse line (all axes except `axis`) a cell sits on.
fn transverse_line<const D: usize>(n: [usize; D], axis: usize, idx: [usize; D]) -> usize {
    let mut line = 0usize;
    let mut stride = 1usize;
    for a in 0..D {
        if a == axis {
            continue;
        }
        line += idx[a] * stride;
        stride *= n[a];
    }
    line
}

/// Padded indices of the two cells adjacent to face `pos` on transverse line
/// `line` of `axis`.
fn face_neighbours<const D: usize>(
    n: [usize; D],
    axis: usize,
    line: usize,
    pos: usize,
) -> (usize, usize) {
    // Rebuild the padded multi-index. Cells left/right of the face along
    // `axis` have padded coordinates pos and pos + 1.
    let mut idx = [0usize; D];
    let mut rest = line;
    for a in 0..D {
        if a == axis {
            continue;
        }
        idx[a] = rest % n[a] + 1;
        rest /= n[a];
    }
    idx[axis] = pos;
    let mut left = 0usize;
    let mut stride = 1usize;
    for a in 0..D {
        left += idx[a] * stride;
        stride *= n[a] + 2;
    }
    let mut axis_stride = 1usize;
    for a in 0..axis {
        axis_stride *= n[a] + 2;
    }
    (left, left + axis_stride)
}

/// Interior flat index of a cell adjacent to the face, used for failure
/// provenance.
fn interior_cell_near_face<const D: usize>(
    n: [usize; D],
    axis: usize,
    line: usize,
    pos: usize,
) -> usize {
    let mut idx = [0usize; D];
    let mut rest = line;
    for a in 0..D {
        if a == axis {
            continue;
        }
        idx[a] = rest % n[a];
        rest /= n[a];
    }
    idx[axis] = if pos == 0 { 0 } else { pos - 1 };
    let mut flat = 0usize;
    let mut stride = 1usize;
    for a in 0..D {
        flat += idx[a] * stride;
        stride *= n[a];
    }
    flat
}

/// Output of a completed (or failed) march: the snapshots that were reached
/// and the run report. A positivity or relaxation failure is recorded in the
/// report rather than propagated, so partial results stay available.
pub struct RunOutput<const D: usize> {
    pub snapshots: Vec<(f64, Grid<D>)>,
    pub report: RunReport,
}

impl<const D: usize> RunOutput<D> {
    pub fn failed(&self) -> bool {
        self.report.failure.is_some()
    }
}

/// March `grid` from t = 0, snapshotting at each requested time (the last
/// snapshot time is the final time). The time step is clipped to land on
/// snapshot times exactly.
pub fn march<const D: usize>(
    mut grid: Grid<D>,
    scheme: &SchemeConfig,
    snapshot_times: &[f64],
) -> Result<RunOutput<D>> {
    let mut times: Vec<f64> = snapshot_times.to_vec();
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    times.dedup();
    if times.is_empty() || times[0] <= 0.0 || times.iter().any(|t| !t.is_finite()) {
        return Err(Error::Config(
            "snapshot times must be finite, positive and non-empty".into(),
        ));
    }

    let wall = Instant::now();
    let mut ledger = ConservationLedger::new(&grid);
    let mut t = 0.0f64;
    let mut step_no = 0usize;
    let mut snapshots = Vec::new();
    let mut failure: Option<FailureRecord> = None;

    'targets: for &target in &times {
        while t < target {
            let result = compute_dt(&grid, scheme.courant).and_then(|dt_cfl| {
                let (dt, landed) = if target - t <= dt_cfl {
                    (target - t, true)
                } else {
                    (dt_cfl, false)
                };
                step(&mut grid, scheme, dt, step_no, &mut ledger)?;
                Ok((dt, landed))
            });
            match result {
                Ok((dt, landed)) => {
                    step_no += 1;
                    t = if landed { target } else { t + dt };
                }
                Err(e) => {
                    failure = Some(failure_record(&e, step_no, t, &scheme.id()));
                    break 'targets;
                }
            }
        }
        if failure.is_none() {
            snapshots.push((target, grid.clone()));
        }
    }

    let totals_end = grid_totals(&grid);
    let l1 = grid_l1(&grid);
    let boundary = ledger.boundary_integrals();
    let conservation = tracked_names::<D>()
        .into_iter()
        .enumerate()
        .map(|(k, name)| {
            let defect = totals_end[k] - ledger.initial[k] - boundary[k];
            let scale = ledger.initial[k]
                .abs()
                .max(totals_end[k].abs())
                .max(l1[k])
                .max(1e-300);
            QuantityBalance {
                name,
                initial: ledger.initial[k],
                end: totals_end[k],
                boundary_integral: boundary[k],
                defect,
                relative_defect: defect / scale,
            }
        })
        .collect();

    Ok(RunOutput {
        snapshots,
        report: RunReport {
            scheme: scheme.id(),
            known_fragile: scheme.known_fragile(),
            relax: scheme.relax,
            courant: scheme.courant,
            cells: grid.n.to_vec(),
            steps: step_no,
            final_time: t,
            wall_seconds: wall.elapsed().as_secs_f64(),
            clamp_count: ledger.clamp_count,
            conservation,
            failure,
        },
    })
}

fn failure_record(e: &Error, step: usize, time: f64, scheme: &str) -> FailureRecord {
    let (cell, field) = match e {
        Error::Positivity { cell, field, .. } => (Some(*cell), Some(field.to_string())),
        Error::RelaxationAtCell { cell, .. } => (Some(*cell), None),
        _ => (None, None),
    };
    FailureRecord {
        step,
        time,
        cell,
        field,
        scheme: scheme.to_string(),
        message: e.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cases::builtin;
    use crate::eos::EosParams;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
    }

    fn scheme(flux: FluxKind, noncons: NonconsVariant, courant: f64) -> SchemeConfig {
        SchemeConfig::new(flux, noncons, courant, false).unwrap()
    }

    fn all_schemes(courant: f64) -> Vec<SchemeConfig> {
        let mut out = Vec::new();
        for flux in [FluxKind::Rusanov, FluxKind::Hllc] {
            for nc in [
                NonconsVariant::Br2023,
                NonconsVariant::Br2015,
                NonconsVariant::Crouzet,
            ] {
                out.push(scheme(flux, nc, courant));
            }
        }
        out.push(scheme(FluxKind::HllcWaveProp, NonconsVariant::Br2023, courant));
        out
    }

    #[test]
    fn compute_dt_arithmetic() {
        // Uniform field engineered so |u| = 0 and c_f = 1000 everywhere:
        // ideal gas, single effective phase with c1 = c2 = 1000.
        let eos = EosPair::new(
            EosParams::ideal(2.0).unwrap(),
            EosParams::ideal(2.0).unwrap(),
        );
        // c = sqrt(2 p / rho) = 1000 with rho = 1, p = 5e5.
        let w = PrimitiveState::<1> {
            alpha1: 0.5,
            rho1: 1.0,
            rho2: 1.0,
            vel: [0.0],
            p1: 5e5,
            p2: 5e5,
        };
        let grid = Grid::from_fn(
            [(0.0, 1.0)],
            [1024],
            [[Boundary::Transmissive; 2]],
            eos,
            move |_| w,
        )
        .unwrap();
        let dt = compute_dt(&grid, 0.9).unwrap();
        assert!(rel(dt, 0.9 / (1000.0 * 1024.0)) < 1e-12);
        // Linearity in the Courant number.
        let dt2 = compute_dt(&grid, 0.45).unwrap();
        assert!(rel(dt, 2.0 * dt2) < 1e-14);
    }

    #[test]
    fn compute_dt_water_air_pinned() {
        let case = builtin("water-air").unwrap();
        let grid = case.grid_1d(1024).unwrap();
        let dt = compute_dt(&grid, 0.3).unwrap();
        // C dx / c_f of the left chamber (the largest signal speed at t=0).
        assert!(rel(dt, 1.1041674124096902e-7) < 1e-12);
    }

    #[test]
    fn uniform_state_is_preserved_by_all_schemes() {
        let eos = EosPair::new(
            EosParams::new(4.4, 6e8, 0.0).unwrap(),
            EosParams::ideal(1.4).unwrap(),
        );
        let w = PrimitiveState::<1> {
            alpha1: 0.42,
            rho1: 995.0,
            rho2: 1.1,
            vel: [37.0],
            p1: 2.2e6,
            p2: 2.2e6,
        };
        for sch in all_schemes(0.9) {
            let mut grid = Grid::from_fn(
                [(0.0, 1.0)],
                [32],
                [[Boundary::Transmissive; 2]],
                eos,
                move |_| w,
            )
            .unwrap();
            let reference = grid.cell([5]).clone();
            let mut ledger = ConservationLedger::new(&grid);
            for k in 0..50 {
                let dt = compute_dt(&grid, sch.courant).unwrap();
                step(&mut grid, &sch, dt, k, &mut ledger).unwrap();
            }
            for flat in grid.interior_flat_indices() {
                let q = grid.cell(grid.decode_interior(flat));
                assert!(
                    rel(q.en1, reference.en1) < 1e-13,
                    "scheme {} drifted",
                    sch.id()
                );
                assert!(rel(q.alpha1, reference.alpha1) < 1e-13);
                assert!(rel(q.m1, reference.m1) < 1e-13);
            }
        }
    }

    #[test]
    fn stationary_contact_preserved_by_wave_propagation() {
        let eos = EosPair::new(
            EosParams::ideal(1.4).unwrap(),
            EosParams::ideal(1.4).unwrap(),
        );
        let mut grid = Grid::from_fn(
            [(0.0, 1.0)],
            [16],
            [[Boundary::Transmissive; 2]],
            eos,
            |x| {
                if x[0] < 0.5 {
                    PrimitiveState {
                        alpha1: 0.8,
                        rho1: 1.0,
                        rho2: 2.0,
                        vel: [0.0],
                        p1: 1.0,
                        p2: 1.0,
                    }
                } else {
                    PrimitiveState {
                        alpha1: 0.2,
                        rho1: 0.5,
                        rho2: 1.5,
                        vel: [0.0],
                        p1: 1.0,
                        p2: 1.0,
                    }
                }
            },
        )
        .unwrap();
        let before: Vec<_> = (0..16).map(|i| *grid.cell([i])).collect();
        let sch = scheme(FluxKind::HllcWaveProp, NonconsVariant::Br2023, 0.9);
        let mut ledger = ConservationLedger::new(&grid);
        for k in 0..100 {
            let dt = compute_dt(&grid, 0.9).unwrap();
            step(&mut grid, &sch, dt, k, &mut ledger).unwrap();
        }
        for i in 0..16 {
            let q = grid.cell([i]);
            assert!(rel(q.alpha1, before[i].alpha1) < 1e-13, "cell {i} alpha drift");
            assert!(rel(q.m1, before[i].m1) < 1e-13);
            assert!(rel(q.en1, before[i].en1) < 1e-13);
            assert!(q.mom[0].abs() < 1e-13 * before[i].en1.abs());
        }
    }

    #[test]
    fn single_step_golden_rusanov_br2023() {
        // One step of the sonic-rarefaction ICs on 8 cells; the full update
        // was evaluated independently face by face. Away from the middle
        // face all increments cancel exactly.
        let case = builtin("sonic-rarefaction").unwrap();
        let mut grid = case.grid_1d(8).unwrap();
        let before: Vec<_> = (0..8).map(|i| *grid.cell([i])).collect();
        let dt = compute_dt(&grid, 0.9).unwrap();
        assert!(rel(dt, 0.05819318820267626) < 1e-13);
        let sch = scheme(FluxKind::Rusanov, NonconsVariant::Br2023, 0.9);
        let mut ledger = ConservationLedger::new(&grid);
        step(&mut grid, &sch, dt, 0, &mut ledger).unwrap();
        for i in [0usize, 1, 2, 5, 6, 7] {
            assert_eq!(grid.cell([i]), &before[i], "cell {i} should be untouched");
        }
        let c3 = grid.cell([3]);
        assert!(rel(c3.alpha1, 0.5750000000000001) < 1e-12);
        assert!(rel(c3.m1, 0.5965386516864231) < 1e-12);
        assert!(rel(c3.m2, 0.1842909129216057) < 1e-12);
        assert!(rel(c3.mom[0], 0.752930150985656) < 1e-12);
        assert!(rel(c3.en1, 1.7856031829392875) < 1e-12);
        assert!(rel(c3.en2, 0.5167132957348217) < 1e-12);
        let c4 = grid.cell([4]);
        assert!(rel(c4.alpha1, 0.6122897823040144) < 1e-12);
        assert!(rel(c4.m1, 0.5202886516864231) < 1e-12);
        assert!(rel(c4.m2, 0.17304091292160573) < 1e-12);
        assert!(rel(c4.mom[0], 0.6779301509856561) < 1e-12);
        assert!(rel(c4.en1, 1.5618742047088858) < 1e-12);
        assert!(rel(c4.en2, 0.4873172739652232) < 1e-12);
    }

    #[test]
    fn wave_propagation_matches_godunov_on_conservative_subsystem() {
        // Identical phases (same EOS, equal densities and pressures) with a
        // uniform volume fraction: the non-conservative terms vanish and the
        // two HLLC forms must produce the same step.
        let eos = EosPair::new(
            EosParams::ideal(1.4).unwrap(),
            EosParams::ideal(1.4).unwrap(),
        );
        let init = |x: [f64; 1]| {
            let (rho, p, u) = if x[0] < 0.5 {
                (1.0, 1.0, 0.0)
            } else {
                (0.125, 0.1, 0.0)
            };
            PrimitiveState {
                alpha1: 0.37,
                rho1: rho,
                rho2: rho,
                vel: [u],
                p1: p,
                p2: p,
            }
        };
        let mk = || {
            Grid::from_fn([(0.0, 1.0)], [64], [[Boundary::Transmissive; 2]], eos, init).unwrap()
        };
        let mut g_flux = mk();
        let mut g_wp = mk();
        let dt = compute_dt(&g_flux, 0.9).unwrap();
        let mut ledger = ConservationLedger::new(&g_flux);
        step(
            &mut g_flux,
            &scheme(FluxKind::Hllc, NonconsVariant::Br2023, 0.9),
            dt,
            0,
            &mut ledger,
        )
        .unwrap();
        let mut ledger2 = ConservationLedger::new(&g_wp);
        step(
            &mut g_wp,
            &scheme(FluxKind::HllcWaveProp, NonconsVariant::Br2023, 0.9),
            dt,
            0,
            &mut ledger2,
        )
        .unwrap();
        for i in 0..64 {
            let a = g_flux.cell([i]);
            let b = g_wp.cell([i]);
            assert!(rel(a.m1, b.m1) < 1e-12, "cell {i}");
            assert!(rel(a.m2, b.m2) < 1e-12);
            assert!((a.mom[0] - b.mom[0]).abs() < 1e-12 * a.en1.abs());
            assert!(rel(a.en1, b.en1) < 1e-12);
            assert!(rel(a.en2, b.en2) < 1e-12);
            assert!(rel(a.alpha1, b.alpha1) < 1e-12);
        }
    }

    #[test]
    fn boundary_conditions() {
        let eos = EosPair::new(
            EosParams::ideal(1.4).unwrap(),
            EosParams::ideal(1.4).unwrap(),
        );
        let w = PrimitiveState::<1> {
            alpha1: 0.5,
            rho1: 1.0,
            rho2: 1.0,
            vel: [0.6],
            p1: 1.0,
            p2: 1.0,
        };
        // Transmissive: ghost equals interior.
        let grid = Grid::from_fn(
            [(0.0, 1.0)],
            [4],
            [[Boundary::Transmissive; 2]],
            eos,
            move |_| w,
        )
        .unwrap();
        assert_eq!(grid.padded_cell([0]), grid.cell([0]));
        assert_eq!(grid.padded_cell([5]), grid.cell([3]));
        // Reflective: normal momentum flipped, everything else equal.
        let grid = Grid::from_fn(
            [(0.0, 1.0)],
            [4],
            [[Boundary::Reflective; 2]],
            eos,
            move |_| w,
        )
        .unwrap();
        let ghost = grid.padded_cell([0]);
        let interior = grid.cell([0]);
        assert_eq!(ghost.mom[0], -interior.mom[0]);
        assert_eq!(ghost.m1, interior.m1);
        assert_eq!(ghost.en1, interior.en1);
    }

    #[test]
    fn corner_ghosts_follow_axis_sweep_order() {
        let eos = EosPair::new(
            EosParams::ideal(1.4).unwrap(),
            EosParams::ideal(1.4).unwrap(),
        );
        let grid = Grid::from_fn(
            [(0.0, 1.0), (0.0, 1.0)],
            [3, 3],
            [[Boundary::Reflective; 2]; 2],
            eos,
            |x| PrimitiveState {
                alpha1: 0.5,
                rho1: 1.0 + x[0],
                rho2: 1.0,
                vel: [1.0, 2.0],
                p1: 1.0,
                p2: 1.0,
            },
        )
        .unwrap();
        // Corner (0, 0): the axis-1 sweep reflects the axis-0 ghost (0, 1),
        // which is itself the reflection of interior (0, 0) in x. Both
        // velocity components end up flipped.
        let corner = grid.padded_cell([0, 0]);
        let interior = grid.cell([0, 0]);
        assert_eq!(corner.mom[0], -interior.mom[0]);
        assert_eq!(corner.mom[1], -interior.mom[1]);
        assert_eq!(corner.m1, interior.m1);
    }

    #[test]
    fn snapshot_landing_is_exact() {
        let case = builtin("sonic-rarefaction").unwrap();
        let grid = case.grid_1d(64).unwrap();
        let sch = scheme(FluxKind::HllcWaveProp, NonconsVariant::Br2023, 0.9);
        let out = march(grid, &sch, &[0.04, 0.1, 0.15]).unwrap();
        assert!(out.report.failure.is_none());
        assert_eq!(out.snapshots.len(), 3);
        assert_eq!(out.snapshots[0].0, 0.04);
        assert_eq!(out.snapshots[2].0, 0.15);
        assert_eq!(out.report.final_time, 0.15);
    }

    #[test]
    fn conservation_ledger_short_run() {
        let case = builtin("sonic-rarefaction").unwrap();
        for sch in all_schemes(0.9) {
            let grid = case.grid_1d(64).unwrap();
            let out = march(grid, &sch, &[0.05]).unwrap();
            assert!(out.report.failure.is_none(), "{} failed", sch.id());
            assert!(
                out.report.max_relative_defect() < 1e-12,
                "{}: defect {}",
                sch.id(),
                out.report.max_relative_defect()
            );
        }
    }

    #[test]
    fn relaxed_march_reaches_pressure_equilibrium() {
        let case = builtin("water-air").unwrap();
        let grid = case.grid_1d(128).unwrap();
        let mut sch = scheme(FluxKind::HllcWaveProp, NonconsVariant::Br2023, 0.5);
        sch.relax = true;
        let out = march(grid, &sch, &[case.t_final]).unwrap();
        assert!(out.report.failure.is_none());
        let g = &out.snapshots[0].1;
        for flat in g.interior_flat_indices() {
            let w = g.primitive(g.decode_interior(flat));
            assert!(rel(w.p1, w.p2) < 1e-8, "cell {flat} not at equilibrium");
        }
    }
}
