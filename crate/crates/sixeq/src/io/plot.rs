//! Emission of self-contained matplotlib scripts; the core stays free of any
//! plotting dependency.

use std::path::Path;

use crate::error::{Error, Result};

use super::snapshot::read_snapshot;

/// Write a Python script that plots `fields` (one panel each) from the given
/// labeled snapshot CSVs, overlaying the curves per panel. Snapshots with a
/// `y` column get one heatmap panel per field and snapshot instead. Paths are
/// referenced relative to the script's directory.
pub fn emit_plot_script(
    snapshots: &[(String, std::path::PathBuf)],
    fields: &[String],
    script_path: &Path,
) -> Result<()> {
    if snapshots.is_empty() {
        return Err(Error::Config("no snapshots to plot".into()));
    }
    let mut two_d = false;
    for (_, path) in snapshots {
        let table = read_snapshot(path)?;
        two_d = table.is_two_dimensional();
        for f in fields {
            if table.column(f).is_none() {
                return Err(Error::Config(format!(
                    "snapshot {} has no field {f:?}",
                    path.display()
                )));
            }
        }
    }
    let base = script_path.parent().unwrap_or_else(|| Path::new("."));
    let rel_paths: Vec<String> = snapshots
        .iter()
        .map(|(_, p)| {
            pathdiff(p, base)
                .unwrap_or_else(|| p.clone())
                .display()
                .to_string()
        })
        .collect();

    let mut py = String::new();
    py.push_str("#!/usr/bin/env python3\n");
    py.push_str("import os\n");
    py.push_str("import numpy as np\n");
    py.push_str("import matplotlib\n");
    py.push_str("matplotlib.use(\"Agg\")\n");
    py.push_str("import matplotlib.pyplot as plt\n\n");
    py.push_str("here = os.path.dirname(os.path.abspath(__file__))\n");
    py.push_str("runs = [\n");
    for ((label, _), rel) in snapshots.iter().zip(&rel_paths) {
        py.push_str(&format!("    ({label:?}, os.path.join(here, {rel:?})),\n"));
    }
    py.push_str("]\n");
    py.push_str(&format!("fields = {:?}\n\n", fields));
    py.push_str("data = [(label, np.genfromtxt(path, delimiter=\",\", names=True)) for label, path in runs]\n\n");
    if two_d {
        py.push_str(
            r#"fig, axes = plt.subplots(len(data), len(fields), squeeze=False,
                         figsize=(4.2 * len(fields), 3.6 * len(data)))
for i, (label, tab) in enumerate(data):
    x, y = tab["x"], tab["y"]
    nx, ny = len(np.unique(x)), len(np.unique(y))
    for j, field in enumerate(fields):
        ax = axes[i][j]
        grid = tab[field].reshape(ny, nx)
        im = ax.pcolormesh(x.reshape(ny, nx), y.reshape(ny, nx), grid, shading="auto")
        fig.colorbar(im, ax=ax)
        ax.set_title(f"{label}: {field}")
        ax.set_xlabel("x")
        ax.set_ylabel("y")
"#,
        );
    } else {
        py.push_str(
            r#"fig, axes = plt.subplots(1, len(fields), squeeze=False,
                         figsize=(4.2 * len(fields), 3.6))
for j, field in enumerate(fields):
    ax = axes[0][j]
    for label, tab in data:
        ax.plot(tab["x"], tab[field], label=label, linewidth=1.0)
    ax.set_xlabel("x")
    ax.set_ylabel(field)
    ax.legend(fontsize=7)
"#,
        );
    }
    py.push_str("\nfig.tight_layout()\n");
    py.push_str("out = os.path.splitext(os.path.abspath(__file__))[0] + \".png\"\n");
    py.push_str("fig.savefig(out, dpi=160)\n");
    py.push_str("print(out)\n");
    std::fs::write(script_path, py).map_err(|e| Error::Io {
        path: script_path.display().to_string(),
        message: e.to_string(),
    })
}

/// Minimal relative-path computation (both paths need not exist).
fn pathdiff(path: &Path, base: &Path) -> Option<std::path::PathBuf> {
    let path = path.components().collect::<Vec<_>>();
    let base = base.components().collect::<Vec<_>>();
    let common = path
        .iter()
        .zip(base.iter())
        .take_while(|(a, b)| a == b)
        .count();
    let mut out = std::path::PathBuf::new();
    for _ in common..base.len() {
        out.push("..");
    }
    for c in &path[common..] {
        out.push(c);
    }
    Some(out)
}
