//! Run-level behavior on the bundled 1D benchmarks at desk-scale meshes:
//! documented failure modes, refinement sanity and relaxed-run agreement.

use sixeq::cases::builtin;
use sixeq::noncons::NonconsVariant;
use sixeq::solver::{march, FluxKind, SchemeConfig};

fn scheme(flux: FluxKind, noncons: NonconsVariant, courant: f64, relax: bool) -> SchemeConfig {
    SchemeConfig::new(flux, noncons, courant, relax).unwrap()
}

#[test]
fn low_density_hllc_crouzet_fails_others_complete() {
    let case = builtin("low-density").unwrap();

    let fragile = scheme(FluxKind::Hllc, NonconsVariant::Crouzet, 0.9, false);
    assert!(fragile.known_fragile());
    let out = march(case.grid_1d(1024).unwrap(), &fragile, &[case.t_final]).unwrap();
    let failure = out.report.failure.expect("hllc+crouzet must lose positivity");
    assert!(failure.time < case.t_final);

    for sch in [
        scheme(FluxKind::Hllc, NonconsVariant::Br2023, 0.9, false),
        scheme(FluxKind::Hllc, NonconsVariant::Br2015, 0.9, false),
        scheme(FluxKind::HllcWaveProp, NonconsVariant::Br2023, 0.9, false),
        scheme(FluxKind::Rusanov, NonconsVariant::Br2023, 0.9, false),
        scheme(FluxKind::Rusanov, NonconsVariant::Br2015, 0.9, false),
    ] {
        let out = march(case.grid_1d(1024).unwrap(), &sch, &[case.t_final]).unwrap();
        assert!(
            out.report.failure.is_none(),
            "{} failed: {:?}",
            sch.id(),
            out.report.failure
        );
        let grid = &out.snapshots[0].1;
        for flat in grid.interior_flat_indices() {
            let a = grid.cell(grid.decode_interior(flat)).alpha1;
            assert!(a > 0.0 && a < 1.0, "{}: alpha out of bounds", sch.id());
        }
    }
}

#[test]
fn water_air_rusanov_needs_low_courant_without_relaxation() {
    let case = builtin("water-air").unwrap();
    let sch = scheme(FluxKind::Rusanov, NonconsVariant::Br2023, 0.9, false);
    let out = march(case.grid_1d(1024).unwrap(), &sch, &[case.t_final]).unwrap();
    assert!(
        out.report.failure.is_some(),
        "rusanov+br2023 at C=0.9 should lose positivity"
    );

    let sch = scheme(FluxKind::Rusanov, NonconsVariant::Br2023, 0.3, false);
    let out = march(case.grid_1d(1024).unwrap(), &sch, &[case.t_final]).unwrap();
    assert!(
        out.report.failure.is_none(),
        "rusanov+br2023 at C=0.3 should complete: {:?}",
        out.report.failure
    );
}

#[test]
fn sonic_rarefaction_refinement_contracts() {
    // First-order solutions on successively refined meshes get closer to
    // each other (restriction by cell-pair averaging).
    let case = builtin("sonic-rarefaction").unwrap();
    let sch = scheme(FluxKind::HllcWaveProp, NonconsVariant::Br2023, 0.9, false);
    let mut profiles: Vec<Vec<f64>> = Vec::new();
    for n in [512usize, 1024, 2048] {
        let out = march(case.grid_1d(n).unwrap(), &sch, &[case.t_final]).unwrap();
        assert!(out.report.failure.is_none());
        let g = &out.snapshots[0].1;
        profiles.push(
            g.interior_flat_indices()
                .map(|f| g.cell(g.decode_interior(f)).alpha1)
                .collect(),
        );
    }
    let restrict = |fine: &[f64]| -> Vec<f64> {
        fine.chunks(2).map(|c| 0.5 * (c[0] + c[1])).collect()
    };
    let l1 = |a: &[f64], b: &[f64]| -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / a.len() as f64
    };
    let coarse_gap = l1(&profiles[0], &restrict(&profiles[1]));
    let fine_gap = l1(&profiles[1], &restrict(&profiles[2]));
    assert!(
        fine_gap < coarse_gap,
        "refinement did not contract: {coarse_gap} -> {fine_gap}"
    );
}

#[test]
fn relaxed_water_air_schemes_agree() {
    // With instantaneous relaxation the scheme spread collapses; check two
    // HLLC-type schemes stay close on a coarse mesh.
    let case = builtin("water-air").unwrap();
    let run = |sch: &SchemeConfig| {
        let out = march(case.grid_1d(512).unwrap(), sch, &[case.t_final]).unwrap();
        assert!(out.report.failure.is_none(), "{}", sch.id());
        let g = out.snapshots[0].1.clone();
        g
    };
    let a = run(&scheme(FluxKind::HllcWaveProp, NonconsVariant::Br2023, 0.9, true));
    let b = run(&scheme(FluxKind::Hllc, NonconsVariant::Br2023, 0.9, true));
    let mut max_rel_rho = 0.0f64;
    for flat in a.interior_flat_indices() {
        let idx = a.decode_interior(flat);
        let (qa, qb) = (a.cell(idx), b.cell(idx));
        let rho_a = qa.m1 + qa.m2;
        let rho_b = qb.m1 + qb.m2;
        max_rel_rho = max_rel_rho.max((rho_a - rho_b).abs() / rho_a);
    }
    // First-order smearing differs near waves; the profiles must still be
    // close everywhere at this resolution.
    assert!(max_rel_rho < 0.2, "relaxed schemes diverged: {max_rel_rho}");
}

#[test]
fn epoxy_spinel_relaxed_run_completes() {
    let case = builtin("epoxy-spinel").unwrap();
    let sch = scheme(FluxKind::HllcWaveProp, NonconsVariant::Br2023, 0.9, true);
    let out = march(case.grid_1d(512).unwrap(), &sch, &[case.t_final]).unwrap();
    assert!(out.report.failure.is_none(), "{:?}", out.report.failure);
    assert!(out.report.max_relative_defect() < 1e-11);
}

#[test]
fn cavitation_relaxed_run_stays_admissible() {
    let case = builtin("cavitation").unwrap();
    let sch = scheme(FluxKind::HllcWaveProp, NonconsVariant::Br2023, 0.9, true);
    let out = march(case.grid_1d(512).unwrap(), &sch, &[case.t_final]).unwrap();
    assert!(out.report.failure.is_none(), "{:?}", out.report.failure);
    let g = &out.snapshots[0].1;
    for flat in g.interior_flat_indices() {
        let q = g.cell(g.decode_interior(flat));
        assert!(q.alpha1 > 0.0 && q.alpha1 < 1.0);
        assert!(q.m1 + q.m2 > 0.0);
    }
}
