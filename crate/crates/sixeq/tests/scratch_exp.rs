use sixeq::cases::builtin;
use sixeq::noncons::NonconsVariant;
use sixeq::solver::{march, FluxKind, SchemeConfig};

#[test]
#[ignore]
fn experiment_matrix() {
    let wa = builtin("water-air").unwrap();
    for c in [0.9, 0.5, 0.3, 0.2, 0.1, 0.05] {
        let sch = SchemeConfig::new(FluxKind::Rusanov, NonconsVariant::Br2023, c, false).unwrap();
        let out = march(wa.grid_1d(1024).unwrap(), &sch, &[wa.t_final]).unwrap();
        println!("water-air homog rusanov+br2023 C={c}: {}", match &out.report.failure {
            None => "COMPLETED".to_string(),
            Some(f) => format!("FAILED step {} t={:.3e} ({})", f.step, f.time, f.message),
        });
    }
    for c in [0.9, 0.3] {
        let sch = SchemeConfig::new(FluxKind::Rusanov, NonconsVariant::Br2023, c, true).unwrap();
        let out = march(wa.grid_1d(1024).unwrap(), &sch, &[wa.t_final]).unwrap();
        println!("water-air RELAX rusanov+br2023 C={c}: {}", match &out.report.failure {
            None => "COMPLETED".to_string(),
            Some(f) => format!("FAILED step {} t={:.3e} ({})", f.step, f.time, f.message),
        });
    }
}
