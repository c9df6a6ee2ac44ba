//! Plain-text scenario configuration files.
//!
//! The format is `key = value` lines grouped under `[section]` headers,
//! with `#` comments and SI units throughout. `schema = 1` is required at
//! the top. Example:
//!
//! ```text
//! schema = 1
//! name = tourniquet
//!
//! [grid]
//! cells = 100
//! length = 8.0e-2
//! x_left = -4.0e-2
//!
//! [profile]
//! kind = uniform            # uniform | aneurysm-bump | constriction |
//!                           # linear-taper | table
//! r0 = 4.0e-3
//! k = 1.0e7
//!
//! [physics]
//! rho = 1060.0
//! cf = 0.0
//! cv = 0.0
//! p0 = 0.0
//!
//! [scheme]
//! source = hsr              # hsr | centered
//! n_cfl = 1.0
//!
//! [boundary]
//! left = neumann            # neumann | inflow (inflow takes qc, tc)
//!
//! [initial]
//! kind = tourniquet         # rest | tourniquet | pulse-perturbation
//! a_left = 7.853981633974483e-5
//! a_right = 5.0265482457436686e-5
//!
//! [time]
//! t_end = 5.0e-3
//! snapshots = 2.5e-3, 5.0e-3
//! ```
//!
//! Per profile kind the keys are: `uniform` takes `r0, k`; `aneurysm-bump`
//! takes `r0, delta_r, x1, x2, x3, x4, k`; `constriction` takes
//! `r_r, delta_r, x1, x2, k`; `linear-taper` takes `r_left, slope, x1, x2,
//! elastic_modulus, wall_thickness`; `table` takes `file`, a path to a
//! whitespace table with header `x r0 k`. Friction and the viscoelastic
//! step are enabled whenever `cf` resp. `cv` are positive.

use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

use crate::boundary::{BoundarySpec, InletBoundary};
use crate::geometry::{parse_profile_table, GeometryError, Grid, ProfileSpec};
use crate::scenario::{InitialCondition, ProfileSource, ScenarioConfig};
use crate::state::PhysicalParams;
use crate::timestepper::{SchemeConfig, SourceMode};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("missing key `{key}` in section [{section}]")]
    MissingKey { section: String, key: String },
    #[error("line {line}: unknown key `{key}` in section [{section}]")]
    UnknownKey {
        section: String,
        key: String,
        line: usize,
    },
    #[error("line {line}: cannot parse `{value}` for `{key}`: {msg}")]
    BadValue {
        key: String,
        value: String,
        msg: String,
        line: usize,
    },
    #[error("unsupported schema version {0} (this reader understands 1)")]
    Schema(String),
    #[error("{0}")]
    Invalid(String),
    #[error("cannot read profile table `{path}`: {msg}")]
    TableIo { path: String, msg: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Default)]
struct Section {
    entries: BTreeMap<String, (String, usize)>,
}

struct RawConfig {
    sections: BTreeMap<String, Section>,
}

impl RawConfig {
    fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut sections: BTreeMap<String, Section> = BTreeMap::new();
        sections.insert(String::new(), Section::default());
        let mut current = String::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or(ConfigError::Parse {
                    line: line_no,
                    msg: "unterminated section header".into(),
                })?;
                current = name.trim().to_string();
                sections.entry(current.clone()).or_default();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(ConfigError::Parse {
                line: line_no,
                msg: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() {
                return Err(ConfigError::Parse {
                    line: line_no,
                    msg: "empty key".into(),
                });
            }
            sections
                .get_mut(&current)
                .unwrap()
                .entries
                .insert(key, (value, line_no));
        }
        Ok(Self { sections })
    }

    fn section(&self, name: &str) -> Result<&Section, ConfigError> {
        self.sections.get(name).ok_or(ConfigError::MissingKey {
            section: name.into(),
            key: "(section)".into(),
        })
    }
}

struct Reader<'a> {
    name: &'a str,
    section: &'a Section,
    used: std::cell::RefCell<Vec<String>>,
}

impl<'a> Reader<'a> {
    fn new(name: &'a str, section: &'a Section) -> Self {
        Self {
            name,
            section,
            used: std::cell::RefCell::new(Vec::new()),
        }
    }

    fn raw(&self, key: &str) -> Result<&'a str, ConfigError> {
        self.used.borrow_mut().push(key.to_string());
        self.section
            .entries
            .get(key)
            .map(|(v, _)| v.as_str())
            .ok_or(ConfigError::MissingKey {
                section: self.name.into(),
                key: key.into(),
            })
    }

    fn optional(&self, key: &str) -> Option<&'a str> {
        self.used.borrow_mut().push(key.to_string());
        self.section.entries.get(key).map(|(v, _)| v.as_str())
    }

    fn number(&self, key: &str) -> Result<f64, ConfigError> {
        let value = self.raw(key)?;
        value.parse().map_err(|e: std::num::ParseFloatError| {
            self.bad(key, value, e.to_string())
        })
    }

    fn count(&self, key: &str) -> Result<usize, ConfigError> {
        let value = self.raw(key)?;
        value.parse().map_err(|e: std::num::ParseIntError| {
            self.bad(key, value, e.to_string())
        })
    }

    fn bad(&self, key: &str, value: &str, msg: String) -> ConfigError {
        let line = self
            .section
            .entries
            .get(key)
            .map(|(_, l)| *l)
            .unwrap_or(0);
        ConfigError::BadValue {
            key: key.into(),
            value: value.into(),
            msg,
            line,
        }
    }

    /// Every key must have been consumed; typos fail loudly.
    fn finish(self) -> Result<(), ConfigError> {
        let used = self.used.borrow();
        for (key, (_, line)) in &self.section.entries {
            if !used.contains(key) {
                return Err(ConfigError::UnknownKey {
                    section: self.name.into(),
                    key: key.clone(),
                    line: *line,
                });
            }
        }
        Ok(())
    }
}

/// Parse a configuration file body into a [`ScenarioConfig`]. A `table`
/// profile stays unresolved ([`ProfileSource::TableFile`]) until
/// [`resolve_table_file`] is called with the directory the config came from.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let raw = RawConfig::parse(text)?;

    let top = Reader::new("", raw.section("")?);
    let schema = top.raw("schema")?;
    if schema != "1" {
        return Err(ConfigError::Schema(schema.into()));
    }
    let name = top.optional("name").unwrap_or("custom").to_string();
    top.finish()?;

    let g = Reader::new("grid", raw.section("grid")?);
    let cells = g.count("cells")?;
    let length = g.number("length")?;
    let x_left = g.optional("x_left").map(|v| v.parse()).transpose().map_err(
        |e: std::num::ParseFloatError| g.bad("x_left", g.optional("x_left").unwrap_or(""), e.to_string()),
    )?;
    g.finish()?;
    let grid = Grid::new(cells, length, x_left.unwrap_or(0.0))?;

    let p = Reader::new("profile", raw.section("profile")?);
    let profile = match p.raw("kind")? {
        "uniform" => ProfileSource::Spec(ProfileSpec::Uniform {
            r0: p.number("r0")?,
            k: p.number("k")?,
        }),
        "aneurysm-bump" => ProfileSource::Spec(ProfileSpec::AneurysmBump {
            r0: p.number("r0")?,
            delta_r: p.number("delta_r")?,
            x1: p.number("x1")?,
            x2: p.number("x2")?,
            x3: p.number("x3")?,
            x4: p.number("x4")?,
            k: p.number("k")?,
        }),
        "constriction" => ProfileSource::Spec(ProfileSpec::Constriction {
            r_r: p.number("r_r")?,
            delta_r: p.number("delta_r")?,
            x1: p.number("x1")?,
            x2: p.number("x2")?,
            k: p.number("k")?,
        }),
        "linear-taper" => ProfileSource::Spec(ProfileSpec::LinearTaper {
            r_left: p.number("r_left")?,
            slope: p.number("slope")?,
            x1: p.number("x1")?,
            x2: p.number("x2")?,
            elastic_modulus: p.number("elastic_modulus")?,
            wall_thickness: p.number("wall_thickness")?,
        }),
        "table" => ProfileSource::TableFile(p.raw("file")?.to_string()),
        other => {
            return Err(ConfigError::Invalid(format!(
                "unknown profile kind `{other}`"
            )))
        }
    };
    p.finish()?;

    let ph = Reader::new("physics", raw.section("physics")?);
    let rho = ph.number("rho")?;
    let cf = ph.number("cf")?;
    let cv = ph.number("cv")?;
    let p0 = ph.optional("p0").map(|v| v.parse()).transpose().map_err(
        |e: std::num::ParseFloatError| ph.bad("p0", ph.optional("p0").unwrap_or(""), e.to_string()),
    )?;
    ph.finish()?;
    if !(rho > 0.0) {
        return Err(ConfigError::Invalid("rho must be positive".into()));
    }
    if cf < 0.0 || cv < 0.0 {
        return Err(ConfigError::Invalid("cf and cv must be non-negative".into()));
    }
    let params = PhysicalParams::new(rho, cf, cv, p0.unwrap_or(0.0));

    let s = Reader::new("scheme", raw.section("scheme")?);
    let source_mode = match s.raw("source")? {
        "hsr" => SourceMode::Hsr,
        "centered" => SourceMode::Centered,
        other => {
            return Err(ConfigError::Invalid(format!(
                "unknown source treatment `{other}` (use hsr or centered)"
            )))
        }
    };
    let n_cfl = s
        .optional("n_cfl")
        .map(|v| v.parse())
        .transpose()
        .map_err(|e: std::num::ParseFloatError| {
            s.bad("n_cfl", s.optional("n_cfl").unwrap_or(""), e.to_string())
        })?
        .unwrap_or(1.0);
    s.finish()?;
    if !(n_cfl > 0.0 && n_cfl <= 1.0) {
        return Err(ConfigError::Invalid("n_cfl must lie in (0, 1]".into()));
    }
    let scheme = SchemeConfig {
        source_mode,
        n_cfl,
        enable_friction: cf > 0.0,
        enable_viscoelastic: cv > 0.0,
    };

    let b = Reader::new("boundary", raw.section("boundary")?);
    let boundary = match b.raw("left")? {
        "neumann" => BoundarySpec::neumann(),
        "inflow" => {
            let qc = b.number("qc")?;
            let tc = b.number("tc")?;
            if !(tc > 0.0) {
                return Err(ConfigError::Invalid("inflow period tc must be positive".into()));
            }
            BoundarySpec::inflow(qc, tc)
        }
        other => {
            return Err(ConfigError::Invalid(format!(
                "unknown boundary `{other}` (use neumann or inflow)"
            )))
        }
    };
    b.finish()?;

    let ic = Reader::new("initial", raw.section("initial")?);
    let initial = match ic.raw("kind")? {
        "rest" => InitialCondition::Rest,
        "tourniquet" => InitialCondition::Tourniquet {
            a_left: ic.number("a_left")?,
            a_right: ic.number("a_right")?,
        },
        "pulse-perturbation" => InitialCondition::PulsePerturbation {
            epsilon: ic.number("epsilon")?,
            x3: ic.number("x3")?,
            x4: ic.number("x4")?,
        },
        other => {
            return Err(ConfigError::Invalid(format!(
                "unknown initial condition `{other}`"
            )))
        }
    };
    ic.finish()?;

    let t = Reader::new("time", raw.section("time")?);
    let t_end = t.number("t_end")?;
    let snapshots_raw = t.raw("snapshots")?;
    t.finish()?;
    let mut snapshots = Vec::new();
    for part in snapshots_raw.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        snapshots.push(part.parse().map_err(|e: std::num::ParseFloatError| {
            ConfigError::Invalid(format!("bad snapshot time `{part}`: {e}"))
        })?);
    }

    Ok(ScenarioConfig {
        name,
        grid,
        profile,
        params,
        scheme,
        boundary,
        initial,
        t_end,
        snapshots,
    })
}

/// Read an unresolved `table` profile from disk, relative to `base_dir`.
pub fn resolve_table_file(cfg: &mut ScenarioConfig, base_dir: &Path) -> Result<(), ConfigError> {
    if let ProfileSource::TableFile(file) = &cfg.profile {
        let path = {
            let p = Path::new(file);
            if p.is_absolute() {
                p.to_path_buf()
            } else {
                base_dir.join(p)
            }
        };
        let text = std::fs::read_to_string(&path).map_err(|e| ConfigError::TableIo {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        let rows = parse_profile_table(&text)?;
        cfg.profile = ProfileSource::Table(rows);
    }
    Ok(())
}

fn fmt(v: f64) -> String {
    // shortest representation that round-trips
    format!("{v}")
}

/// Render a configuration in the canonical file format. Not available for
/// table-backed profiles (the table lives in its own file).
pub fn format_config(cfg: &ScenarioConfig) -> Result<String, ConfigError> {
    use std::fmt::Write;
    let mut out = String::new();
    out.push_str("schema = 1\n");
    writeln!(out, "name = {}", cfg.name).unwrap();
    writeln!(out, "\n[grid]").unwrap();
    writeln!(out, "cells = {}", cfg.grid.cells()).unwrap();
    writeln!(out, "length = {}", fmt(cfg.grid.length())).unwrap();
    writeln!(out, "x_left = {}", fmt(cfg.grid.x_left())).unwrap();
    writeln!(out, "\n[profile]").unwrap();
    match &cfg.profile {
        ProfileSource::Spec(ProfileSpec::Uniform { r0, k }) => {
            writeln!(out, "kind = uniform").unwrap();
            writeln!(out, "r0 = {}", fmt(*r0)).unwrap();
            writeln!(out, "k = {}", fmt(*k)).unwrap();
        }
        ProfileSource::Spec(ProfileSpec::AneurysmBump {
            r0,
            delta_r,
            x1,
            x2,
            x3,
            x4,
            k,
        }) => {
            writeln!(out, "kind = aneurysm-bump").unwrap();
            writeln!(out, "r0 = {}", fmt(*r0)).unwrap();
            writeln!(out, "delta_r = {}", fmt(*delta_r)).unwrap();
            writeln!(out, "x1 = {}", fmt(*x1)).unwrap();
            writeln!(out, "x2 = {}", fmt(*x2)).unwrap();
            writeln!(out, "x3 = {}", fmt(*x3)).unwrap();
            writeln!(out, "x4 = {}", fmt(*x4)).unwrap();
            writeln!(out, "k = {}", fmt(*k)).unwrap();
        }
        ProfileSource::Spec(ProfileSpec::Constriction {
            r_r,
            delta_r,
            x1,
            x2,
            k,
        }) => {
            writeln!(out, "kind = constriction").unwrap();
            writeln!(out, "r_r = {}", fmt(*r_r)).unwrap();
            writeln!(out, "delta_r = {}", fmt(*delta_r)).unwrap();
            writeln!(out, "x1 = {}", fmt(*x1)).unwrap();
            writeln!(out, "x2 = {}", fmt(*x2)).unwrap();
            writeln!(out, "k = {}", fmt(*k)).unwrap();
        }
        ProfileSource::Spec(ProfileSpec::LinearTaper {
            r_left,
            slope,
            x1,
            x2,
            elastic_modulus,
            wall_thickness,
        }) => {
            writeln!(out, "kind = linear-taper").unwrap();
            writeln!(out, "r_left = {}", fmt(*r_left)).unwrap();
            writeln!(out, "slope = {}", fmt(*slope)).unwrap();
            writeln!(out, "x1 = {}", fmt(*x1)).unwrap();
            writeln!(out, "x2 = {}", fmt(*x2)).unwrap();
            writeln!(out, "elastic_modulus = {}", fmt(*elastic_modulus)).unwrap();
            writeln!(out, "wall_thickness = {}", fmt(*wall_thickness)).unwrap();
        }
        ProfileSource::TableFile(file) => {
            writeln!(out, "kind = table").unwrap();
            writeln!(out, "file = {file}").unwrap();
        }
        ProfileSource::Table(_) => {
            return Err(ConfigError::Invalid(
                "cannot format an in-memory profile table".into(),
            ))
        }
    }
    writeln!(out, "\n[physics]").unwrap();
    writeln!(out, "rho = {}", fmt(cfg.params.rho)).unwrap();
    writeln!(out, "cf = {}", fmt(cfg.params.cf)).unwrap();
    writeln!(out, "cv = {}", fmt(cfg.params.cv)).unwrap();
    writeln!(out, "p0 = {}", fmt(cfg.params.p0)).unwrap();
    writeln!(out, "\n[scheme]").unwrap();
    writeln!(out, "source = {}", cfg.scheme.source_mode).unwrap();
    writeln!(out, "n_cfl = {}", fmt(cfg.scheme.n_cfl)).unwrap();
    writeln!(out, "\n[boundary]").unwrap();
    match cfg.boundary.left {
        InletBoundary::Neumann => writeln!(out, "left = neumann").unwrap(),
        InletBoundary::Inflow { qc, tc } => {
            writeln!(out, "left = inflow").unwrap();
            writeln!(out, "qc = {}", fmt(qc)).unwrap();
            writeln!(out, "tc = {}", fmt(tc)).unwrap();
        }
    }
    writeln!(out, "\n[initial]").unwrap();
    match cfg.initial {
        InitialCondition::Rest => writeln!(out, "kind = rest").unwrap(),
        InitialCondition::Tourniquet { a_left, a_right } => {
            writeln!(out, "kind = tourniquet").unwrap();
            writeln!(out, "a_left = {}", fmt(a_left)).unwrap();
            writeln!(out, "a_right = {}", fmt(a_right)).unwrap();
        }
        InitialCondition::PulsePerturbation { epsilon, x3, x4 } => {
            writeln!(out, "kind = pulse-perturbation").unwrap();
            writeln!(out, "epsilon = {}", fmt(epsilon)).unwrap();
            writeln!(out, "x3 = {}", fmt(x3)).unwrap();
            writeln!(out, "x4 = {}", fmt(x4)).unwrap();
        }
    }
    writeln!(out, "\n[time]").unwrap();
    writeln!(out, "t_end = {}", fmt(cfg.t_end)).unwrap();
    let snaps: Vec<String> = cfg.snapshots.iter().map(|t| fmt(*t)).collect();
    writeln!(out, "snapshots = {}", snaps.join(", ")).unwrap();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::presets;

    #[test]
    fn presets_round_trip_through_the_text_format() {
        for cfg in presets::all() {
            let text = format_config(&cfg).unwrap();
            let back = parse_config(&text).unwrap();
            assert_eq!(back, cfg, "round trip failed for {}", cfg.name);
        }
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let mut text = format_config(&presets::tourniquet()).unwrap();
        text = text.replace("cells = 100", "cells = 100  # one hundred cells");
        text.push_str("\n# trailing comment\n\n");
        let cfg = parse_config(&text).unwrap();
        assert_eq!(cfg.grid.cells(), 100);
    }

    #[test]
    fn schema_is_checked() {
        let text = format_config(&presets::tourniquet())
            .unwrap()
            .replace("schema = 1", "schema = 2");
        assert!(matches!(parse_config(&text), Err(ConfigError::Schema(_))));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut text = format_config(&presets::tourniquet()).unwrap();
        text.push_str("\n[scheme]\nflux = roe\n");
        assert!(matches!(
            parse_config(&text),
            Err(ConfigError::UnknownKey { .. })
        ));
    }

    #[test]
    fn missing_keys_are_reported_with_section() {
        let text = format_config(&presets::tourniquet())
            .unwrap()
            .replace("rho = 1060\n", "");
        match parse_config(&text) {
            Err(ConfigError::MissingKey { section, key }) => {
                assert_eq!(section, "physics");
                assert_eq!(key, "rho");
            }
            other => panic!("expected MissingKey, got {other:?}"),
        }
    }

    #[test]
    fn bad_numbers_carry_line_context() {
        let text = format_config(&presets::tourniquet())
            .unwrap()
            .replace("t_end = 0.005", "t_end = five-ish");
        assert!(matches!(
            parse_config(&text),
            Err(ConfigError::BadValue { .. })
        ));
    }

    #[test]
    fn unknown_kind_is_a_config_error() {
        let text = format_config(&presets::tourniquet())
            .unwrap()
            .replace("kind = uniform", "kind = helical");
        assert!(matches!(parse_config(&text), Err(ConfigError::Invalid(_))));
    }

    #[test]
    fn flags_follow_the_coefficients() {
        let cfg = parse_config(&format_config(&presets::viscous_damping()).unwrap()).unwrap();
        assert!(cfg.scheme.enable_friction && !cfg.scheme.enable_viscoelastic);
        let cfg = parse_config(&format_config(&presets::viscoelastic()).unwrap()).unwrap();
        assert!(!cfg.scheme.enable_friction && cfg.scheme.enable_viscoelastic);
    }

    #[test]
    fn table_profile_resolves_from_disk() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("vessel.txt"),
            "x r0 k\n-0.1 4.0e-3 1.0e7\n0.1 4.0e-3 1.0e7\n",
        )
        .unwrap();
        let mut cfg = presets::tourniquet();
        cfg.profile = ProfileSource::TableFile("vessel.txt".into());
        resolve_table_file(&mut cfg, dir.path()).unwrap();
        match &cfg.profile {
            ProfileSource::Table(rows) => assert_eq!(rows.len(), 2),
            other => panic!("expected resolved table, got {other:?}"),
        }
        // missing file reports the path
        let mut cfg = presets::tourniquet();
        cfg.profile = ProfileSource::TableFile("missing.txt".into());
        assert!(matches!(
            resolve_table_file(&mut cfg, dir.path()),
            Err(ConfigError::TableIo { .. })
        ));
    }
}
