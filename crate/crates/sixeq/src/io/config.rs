//! Flat sectioned key-value configuration files.
//!
//! Run configs have three sections, `[case]`, `[scheme]`, `[run]`; case
//! files describe a full Riemann case (`[case]`, `[eos1]`, `[eos2]` and the
//! state sections `[left]`/`[right]` or `[q1]`..`[q4]`). Parsing is strict:
//! unknown sections or keys are errors. Numbers are SI, lists are
//! comma-separated, `#` starts a comment.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::cases::{builtin, CaseGeometry, RiemannCase};
use crate::eos::EosParams;
use crate::error::{Error, Result};
use crate::noncons::NonconsVariant;
use crate::solver::{Boundary, FluxKind, SchemeConfig};
use crate::state::{EosPair, PrimitiveState};

#[derive(Debug, Clone, PartialEq)]
pub enum CaseSource {
    Builtin(String),
    File(PathBuf),
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub case: CaseSource,
    pub scheme: SchemeConfig,
    /// Cells per axis; empty means the case's coarse default.
    pub ncells: Vec<usize>,
    /// Snapshot times; empty means the case's final time only.
    pub snapshots: Vec<f64>,
    pub output_dir: PathBuf,
    pub emit_plots: bool,
}

impl RunConfig {
    pub fn resolve_case(&self) -> Result<RiemannCase> {
        match &self.case {
            CaseSource::Builtin(name) => builtin(name),
            CaseSource::File(path) => parse_case_file(path),
        }
    }
}

/// Parsed file: section -> key -> list of values (keys may repeat).
struct Sections {
    map: BTreeMap<String, BTreeMap<String, Vec<String>>>,
    /// (section, key) pairs that were actually read back.
    context: String,
}

fn parse_sections(text: &str, context: &str) -> Result<Sections> {
    let mut map: BTreeMap<String, BTreeMap<String, Vec<String>>> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (no, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(k) => &raw[..k],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') && line.ends_with(']') {
            let name = line[1..line.len() - 1].trim().to_string();
            map.entry(name.clone()).or_default();
            current = Some(name);
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("{context}: line {}: expected key = value", no + 1))
        })?;
        let section = current
            .clone()
            .ok_or_else(|| Error::Config(format!("{context}: line {}: key outside a section", no + 1)))?;
        map.entry(section)
            .or_default()
            .entry(key.trim().to_string())
            .or_default()
            .push(value.trim().to_string());
    }
    Ok(Sections {
        map,
        context: context.to_string(),
    })
}

impl Sections {
    fn section(&self, name: &str) -> Result<&BTreeMap<String, Vec<String>>> {
        self.map
            .get(name)
            .ok_or_else(|| Error::Config(format!("{}: missing [{name}] section", self.context)))
    }

    fn check_sections(&self, allowed: &[&str]) -> Result<()> {
        for name in self.map.keys() {
            if !allowed.contains(&name.as_str()) {
                return Err(Error::Config(format!(
                    "{}: unknown section [{name}]",
                    self.context
                )));
            }
        }
        Ok(())
    }

    fn check_keys(&self, section: &str, allowed: &[&str]) -> Result<()> {
        if let Some(sec) = self.map.get(section) {
            for key in sec.keys() {
                if !allowed.contains(&key.as_str()) {
                    return Err(Error::Config(format!(
                        "{}: unknown key {key:?} in [{section}]",
                        self.context
                    )));
                }
            }
        }
        Ok(())
    }

    fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.map
            .get(section)
            .and_then(|s| s.get(key))
            .and_then(|v| v.last())
            .map(|s| s.as_str())
    }

    fn get_all(&self, section: &str, key: &str) -> Vec<String> {
        self.map
            .get(section)
            .and_then(|s| s.get(key))
            .cloned()
            .unwrap_or_default()
    }

    fn require(&self, section: &str, key: &str) -> Result<&str> {
        self.get(section, key).ok_or_else(|| {
            Error::Config(format!(
                "{}: missing required key {key:?} in [{section}]",
                self.context
            ))
        })
    }

    fn require_f64(&self, section: &str, key: &str) -> Result<f64> {
        parse_f64(self.require(section, key)?, section, key, &self.context)
    }
}

fn parse_f64(s: &str, section: &str, key: &str, context: &str) -> Result<f64> {
    s.parse().map_err(|_| {
        Error::Config(format!(
            "{context}: [{section}] {key} = {s:?} is not a number"
        ))
    })
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Option<Vec<T>> {
    s.split(',')
        .map(|p| p.trim().parse::<T>().ok())
        .collect::<Option<Vec<T>>>()
}

pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_config_str(&text, &path.display().to_string())
}

pub fn parse_config_str(text: &str, context: &str) -> Result<RunConfig> {
    let s = parse_sections(text, context)?;
    s.check_sections(&["case", "scheme", "run"])?;
    s.check_keys("case", &["name", "file"])?;
    s.check_keys(
        "scheme",
        &["flux", "noncons", "courant", "relax", "alpha_floor"],
    )?;
    s.check_keys(
        "run",
        &["ncells", "snapshots", "output_dir", "emit_plots"],
    )?;

    let case = match (s.get("case", "name"), s.get("case", "file")) {
        (Some(name), None) => CaseSource::Builtin(name.to_string()),
        (None, Some(path)) => CaseSource::File(PathBuf::from(path)),
        (Some(_), Some(_)) => {
            return Err(Error::Config(format!(
                "{context}: [case] takes either name or file, not both"
            )))
        }
        (None, None) => {
            return Err(Error::Config(format!(
                "{context}: [case] needs name or file"
            )))
        }
    };

    let flux = match s.require("scheme", "flux")? {
        "rusanov" => FluxKind::Rusanov,
        "hllc" => FluxKind::Hllc,
        "hllc-wp" => FluxKind::HllcWaveProp,
        other => {
            return Err(Error::Config(format!(
                "{context}: unknown flux {other:?} (rusanov | hllc | hllc-wp)"
            )))
        }
    };
    let noncons = match s.get("scheme", "noncons") {
        None => NonconsVariant::Br2023,
        Some("br2023") => NonconsVariant::Br2023,
        Some("br2015") => NonconsVariant::Br2015,
        Some("crouzet") => NonconsVariant::Crouzet,
        Some(other) => {
            return Err(Error::Config(format!(
                "{context}: unknown noncons {other:?} (br2023 | br2015 | crouzet)"
            )))
        }
    };
    let courant = s.require_f64("scheme", "courant")?;
    let relax = match s.get("scheme", "relax") {
        None => false,
        Some("true") => true,
        Some("false") => false,
        Some(other) => {
            return Err(Error::Config(format!(
                "{context}: relax = {other:?} is not a boolean"
            )))
        }
    };
    let mut scheme = SchemeConfig::new(flux, noncons, courant, relax)?;
    if let Some(eps) = s.get("scheme", "alpha_floor") {
        scheme.alpha_floor = Some(parse_f64(eps, "scheme", "alpha_floor", context)?);
    }

    let ncells = match s.get("run", "ncells") {
        None => Vec::new(),
        Some(v) => parse_list::<usize>(v)
            .filter(|l| !l.is_empty() && l.iter().all(|&n| n > 0))
            .ok_or_else(|| Error::Config(format!("{context}: bad ncells {v:?}")))?,
    };
    let snapshots = match s.get("run", "snapshots") {
        None => Vec::new(),
        Some(v) => parse_list::<f64>(v)
            .ok_or_else(|| Error::Config(format!("{context}: bad snapshots {v:?}")))?,
    };
    let output_dir = PathBuf::from(s.get("run", "output_dir").unwrap_or("out"));
    let emit_plots = match s.get("run", "emit_plots") {
        None => false,
        Some("true") => true,
        Some("false") => false,
        Some(other) => {
            return Err(Error::Config(format!(
                "{context}: emit_plots = {other:?} is not a boolean"
            )))
        }
    };

    Ok(RunConfig {
        case,
        scheme,
        ncells,
        snapshots,
        output_dir,
        emit_plots,
    })
}

const STATE_KEYS_1D: [&str; 6] = ["alpha1", "rho1", "rho2", "u", "p1", "p2"];
const STATE_KEYS_2D: [&str; 7] = ["alpha1", "rho1", "rho2", "u", "v", "p1", "p2"];

fn parse_state_1d(s: &Sections, section: &str) -> Result<PrimitiveState<1>> {
    s.check_keys(section, &STATE_KEYS_1D)?;
    s.section(section)?;
    Ok(PrimitiveState {
        alpha1: s.require_f64(section, "alpha1")?,
        rho1: s.require_f64(section, "rho1")?,
        rho2: s.require_f64(section, "rho2")?,
        vel: [s.require_f64(section, "u")?],
        p1: s.require_f64(section, "p1")?,
        p2: s.require_f64(section, "p2")?,
    })
}

fn parse_state_2d(s: &Sections, section: &str) -> Result<PrimitiveState<2>> {
    s.check_keys(section, &STATE_KEYS_2D)?;
    s.section(section)?;
    Ok(PrimitiveState {
        alpha1: s.require_f64(section, "alpha1")?,
        rho1: s.require_f64(section, "rho1")?,
        rho2: s.require_f64(section, "rho2")?,
        vel: [
            s.require_f64(section, "u")?,
            s.require_f64(section, "v")?,
        ],
        p1: s.require_f64(section, "p1")?,
        p2: s.require_f64(section, "p2")?,
    })
}

fn parse_eos(s: &Sections, section: &str) -> Result<EosParams> {
    s.check_keys(section, &["gamma", "pi_inf", "eta"])?;
    s.section(section)?;
    EosParams::new(
        s.require_f64(section, "gamma")?,
        s.require_f64(section, "pi_inf")?,
        s.require_f64(section, "eta")?,
    )
}

pub fn parse_case_file(path: &Path) -> Result<RiemannCase> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_case_str(&text, &path.display().to_string())
}

pub fn parse_case_str(text: &str, context: &str) -> Result<RiemannCase> {
    let s = parse_sections(text, context)?;
    s.check_keys(
        "case",
        &[
            "name", "dim", "tfinal", "x0", "domain", "courant", "boundary", "cells", "note",
        ],
    )?;
    let dim: usize = s
        .require("case", "dim")?
        .parse()
        .map_err(|_| Error::Config(format!("{context}: bad dim")))?;
    let name = s.require("case", "name")?.to_string();
    let t_final = s.require_f64("case", "tfinal")?;
    let boundary = match s.get("case", "boundary").unwrap_or("transmissive") {
        "transmissive" => Boundary::Transmissive,
        "reflective" => Boundary::Reflective,
        other => {
            return Err(Error::Config(format!(
                "{context}: unknown boundary {other:?}"
            )))
        }
    };
    let default_courant = match s.get("case", "courant") {
        None => 0.9,
        Some(v) => parse_f64(v, "case", "courant", context)?,
    };
    let default_cells = match s.get("case", "cells") {
        None => vec![1024],
        Some(v) => parse_list::<usize>(v)
            .ok_or_else(|| Error::Config(format!("{context}: bad cells {v:?}")))?,
    };
    let notes = s.get_all("case", "note");
    let domain_raw = s.require("case", "domain")?;
    let domain: Vec<f64> = parse_list(domain_raw)
        .ok_or_else(|| Error::Config(format!("{context}: bad domain {domain_raw:?}")))?;

    let geometry = match dim {
        1 => {
            s.check_sections(&["case", "eos1", "eos2", "left", "right"])?;
            if domain.len() != 2 {
                return Err(Error::Config(format!(
                    "{context}: 1D domain needs two numbers"
                )));
            }
            CaseGeometry::OneD {
                domain: (domain[0], domain[1]),
                x0: s.require_f64("case", "x0")?,
                left: parse_state_1d(&s, "left")?,
                right: parse_state_1d(&s, "right")?,
            }
        }
        2 => {
            s.check_sections(&["case", "eos1", "eos2", "q1", "q2", "q3", "q4"])?;
            if domain.len() != 4 {
                return Err(Error::Config(format!(
                    "{context}: 2D domain needs four numbers"
                )));
            }
            CaseGeometry::TwoD {
                domain: [(domain[0], domain[1]), (domain[2], domain[3])],
                quadrants: [
                    parse_state_2d(&s, "q1")?,
                    parse_state_2d(&s, "q2")?,
                    parse_state_2d(&s, "q3")?,
                    parse_state_2d(&s, "q4")?,
                ],
            }
        }
        other => {
            return Err(Error::Config(format!(
                "{context}: dim = {other} not supported (1 or 2)"
            )))
        }
    };

    let case = RiemannCase {
        name,
        eos: EosPair::new(parse_eos(&s, "eos1")?, parse_eos(&s, "eos2")?),
        geometry,
        t_final,
        default_cells,
        default_courant,
        boundary,
        notes,
    };
    // States must be admissible under their EOS.
    match &case.geometry {
        CaseGeometry::OneD { .. } => {
            case.grid_1d(2)?;
        }
        CaseGeometry::TwoD { .. } => {
            case.grid_2d([2, 2])?;
        }
    }
    Ok(case)
}

/// Serialize a case in the case-file format; floats use the shortest
/// round-trip representation, so parse(serialize(c)) == c.
pub fn serialize_case(case: &RiemannCase) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    let kv = |s: &mut String, k: &str, v: String| writeln!(s, "{k} = {v}").unwrap();
    writeln!(out, "[case]").unwrap();
    kv(&mut out, "name", case.name.clone());
    kv(&mut out, "dim", case.dim().to_string());
    kv(&mut out, "tfinal", format!("{}", case.t_final));
    kv(&mut out, "courant", format!("{}", case.default_courant));
    kv(
        &mut out,
        "boundary",
        match case.boundary {
            Boundary::Transmissive => "transmissive".into(),
            Boundary::Reflective => "reflective".into(),
        },
    );
    kv(
        &mut out,
        "cells",
        case.default_cells
            .iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .join(", "),
    );
    for note in &case.notes {
        kv(&mut out, "note", note.clone());
    }
    match &case.geometry {
        CaseGeometry::OneD { domain, x0, .. } => {
            kv(&mut out, "x0", format!("{x0}"));
            kv(&mut out, "domain", format!("{}, {}", domain.0, domain.1));
        }
        CaseGeometry::TwoD { domain, .. } => {
            kv(
                &mut out,
                "domain",
                format!(
                    "{}, {}, {}, {}",
                    domain[0].0, domain[0].1, domain[1].0, domain[1].1
                ),
            );
        }
    }
    for (section, eos) in [("eos1", case.eos.phase1), ("eos2", case.eos.phase2)] {
        writeln!(out, "\n[{section}]").unwrap();
        kv(&mut out, "gamma", format!("{}", eos.gamma));
        kv(&mut out, "pi_inf", format!("{}", eos.pi_inf));
        kv(&mut out, "eta", format!("{}", eos.eta));
    }
    match &case.geometry {
        CaseGeometry::OneD { left, right, .. } => {
            for (section, w) in [("left", left), ("right", right)] {
                writeln!(out, "\n[{section}]").unwrap();
                kv(&mut out, "alpha1", format!("{}", w.alpha1));
                kv(&mut out, "rho1", format!("{}", w.rho1));
                kv(&mut out, "rho2", format!("{}", w.rho2));
                kv(&mut out, "u", format!("{}", w.vel[0]));
                kv(&mut out, "p1", format!("{}", w.p1));
                kv(&mut out, "p2", format!("{}", w.p2));
            }
        }
        CaseGeometry::TwoD { quadrants, .. } => {
            for (k, w) in quadrants.iter().enumerate() {
                writeln!(out, "\n[q{}]", k + 1).unwrap();
                kv(&mut out, "alpha1", format!("{}", w.alpha1));
                kv(&mut out, "rho1", format!("{}", w.rho1));
                kv(&mut out, "rho2", format!("{}", w.rho2));
                kv(&mut out, "u", format!("{}", w.vel[0]));
                kv(&mut out, "v", format!("{}", w.vel[1]));
                kv(&mut out, "p1", format!("{}", w.p1));
                kv(&mut out, "p2", format!("{}", w.p2));
            }
        }
    }
    out
}

pub fn write_case_file(case: &RiemannCase, path: &Path) -> Result<()> {
    std::fs::write(path, serialize_case(case)).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}
