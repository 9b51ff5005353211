//! Sectioned `key = value` configuration.
//!
//! ```text
//! [grid]
//! n_z = 128
//! n_v = 512
//! L = 4pi
//! ```
//!
//! Lines starting with `#` or `;` are comments. Numbers may carry a trailing
//! `pi` factor (`4pi`, `0.5*pi`, `pi`).

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use couette::diagnostics::{EchoOptions, RecordOptions};
use couette::multipliers::WeightParams;
use couette::solver::{DtController, InitialData, ModeSpec, SimConfig};
use couette::spectral::{Grid, DEFAULT_DEALIAS};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unknown key `{key}` in [{section}]")]
    UnknownKey {
        line: usize,
        section: String,
        key: String,
    },
    #[error("line {line}: invalid value for `{key}`: {msg}")]
    Value { line: usize, key: String, msg: String },
    #[error("{}[{section}] {msg}", line_prefix(*.line))]
    Invariant {
        line: Option<usize>,
        section: String,
        msg: String,
    },
}

fn line_prefix(line: Option<usize>) -> String {
    line.map(|l| format!("line {l}: ")).unwrap_or_default()
}

/// Geometric `ν` grid for `sweep`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSpec {
    pub nu_min: f64,
    pub nu_max: f64,
    pub count: usize,
}

impl SweepSpec {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.nu_max];
        }
        let (a, b) = (self.nu_max.ln(), self.nu_min.ln());
        (0..self.count)
            .map(|i| (a + (b - a) * i as f64 / (self.count - 1) as f64).exp())
            .collect()
    }
}

/// Everything a subcommand needs, after defaults and validation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub sim: SimConfig,
    pub weights: WeightParams,
    pub record: RecordOptions,
    pub echo: EchoOptions,
    pub echo_k_watch: i64,
    pub snapshot_every: Option<usize>,
    /// Power-law fit window; the linear default is used when absent.
    pub fit_window: Option<(f64, f64)>,
    pub bootstrap_factor: f64,
    /// Sample spacing of the `linear` time series.
    pub linear_t_step: f64,
    pub sweep: SweepSpec,
}

impl Default for Settings {
    fn default() -> Self {
        let grid = Grid::new(256, 1024, 4.0 * std::f64::consts::PI, DEFAULT_DEALIAS)
            .expect("default grid is valid");
        let mut sim = SimConfig::new(
            grid,
            InitialData::Bump {
                kx: 1,
                width: 1.0,
                zero_mode: 0.5,
            },
        );
        sim.dt_controller = DtController {
            cfl_safety: 0.4,
            dt_max: 0.25,
        };
        sim.t_max = 100.0;
        Self {
            sim,
            weights: WeightParams::default(),
            record: RecordOptions::default(),
            echo: EchoOptions::default(),
            echo_k_watch: 2,
            snapshot_every: None,
            fit_window: None,
            bootstrap_factor: 8.0,
            linear_t_step: 0.5,
            sweep: SweepSpec {
                nu_min: 3e-5,
                nu_max: 1e-3,
                count: 4,
            },
        }
    }
}

struct Entry {
    line: usize,
    value: String,
}

type Sections = BTreeMap<String, (usize, HashMap<String, Entry>)>;

const KEYS: &[(&str, &[&str])] = &[
    ("grid", &["n_z", "n_v", "L", "dealias"]),
    (
        "physics",
        &[
            "nu", "epsilon", "nonlinear", "initial", "kx", "width", "zero_mode", "envelope",
            "modes", "seed",
        ],
    ),
    (
        "weights",
        &[
            "kappa",
            "c_kappa_exponent",
            "mu",
            "s",
            "lambda0",
            "lambda_prime",
            "delta_lambda",
            "q_tilde",
            "c0",
            "sigma",
            "beta",
            "alpha",
        ],
    ),
    (
        "run",
        &[
            "t_max",
            "dt_max",
            "cfl_safety",
            "remap",
            "linear_t_step",
            "sweep_nu_min",
            "sweep_nu_max",
            "sweep_nu_count",
        ],
    ),
    (
        "diagnostics",
        &[
            "stride",
            "expensive",
            "noise_floor",
            "echo_k_watch",
            "echo_prominence",
            "snapshot_every",
            "fit_start",
            "fit_end",
            "bootstrap_factor",
        ],
    ),
];

fn tokenize(text: &str, strict: bool) -> Result<Sections, ConfigError> {
    let mut out = Sections::new();
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = raw.trim();
        if s.is_empty() || s.starts_with('#') || s.starts_with(';') {
            continue;
        }
        if let Some(rest) = s.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| ConfigError::Syntax {
                line,
                msg: format!("unterminated section header `{s}`"),
            })?;
            let name = name.trim().to_string();
            if !KEYS.iter().any(|(sec, _)| *sec == name) {
                return Err(ConfigError::Syntax {
                    line,
                    msg: format!("unknown section [{name}]"),
                });
            }
            if out.contains_key(&name) {
                return Err(ConfigError::Syntax {
                    line,
                    msg: format!("section [{name}] appears twice"),
                });
            }
            out.insert(name.clone(), (line, HashMap::new()));
            current = Some(name);
            continue;
        }
        let (key, value) = s.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line,
            msg: format!("expected `key = value`, got `{s}`"),
        })?;
        let section = current.clone().ok_or_else(|| ConfigError::Syntax {
            line,
            msg: "key outside of any section".into(),
        })?;
        let key = key.trim().to_string();
        let value = value.split('#').next().unwrap_or("").trim().to_string();
        let known = KEYS
            .iter()
            .find(|(sec, _)| *sec == section)
            .map(|(_, keys)| keys.contains(&key.as_str()))
            .unwrap_or(false);
        if !known {
            if strict {
                return Err(ConfigError::UnknownKey { line, section, key });
            }
            log::warn!("line {line}: ignoring unknown key `{key}` in [{section}]");
            continue;
        }
        let table = &mut out.get_mut(&section).expect("section inserted").1;
        if table.contains_key(&key) {
            return Err(ConfigError::Syntax {
                line,
                msg: format!("key `{key}` set twice"),
            });
        }
        table.insert(key, Entry { line, value });
    }
    Ok(out)
}

/// Parses a float, accepting a trailing `pi` factor.
pub fn parse_number(s: &str) -> Option<f64> {
    let t = s.trim();
    let lower = t.to_ascii_lowercase();
    if let Some(head) = lower.strip_suffix("pi") {
        let head = head.trim().trim_end_matches('*').trim();
        let factor = if head.is_empty() { 1.0 } else { head.parse::<f64>().ok()? };
        return Some(factor * std::f64::consts::PI);
    }
    t.parse::<f64>().ok()
}

struct Reader<'a> {
    sections: &'a Sections,
}

impl Reader<'_> {
    fn entry(&self, section: &str, key: &str) -> Option<&Entry> {
        self.sections.get(section).and_then(|(_, t)| t.get(key))
    }

    fn header_line(&self, section: &str) -> Option<usize> {
        self.sections.get(section).map(|(l, _)| *l)
    }

    fn value<T>(
        &self,
        section: &str,
        key: &str,
        parse: impl Fn(&str) -> Result<T, String>,
    ) -> Result<Option<T>, ConfigError> {
        match self.entry(section, key) {
            None => Ok(None),
            Some(e) => parse(&e.value).map(Some).map_err(|msg| ConfigError::Value {
                line: e.line,
                key: key.to_string(),
                msg,
            }),
        }
    }

    fn f64(&self, section: &str, key: &str, slot: &mut f64) -> Result<(), ConfigError> {
        if let Some(v) = self.value(section, key, |s| {
            parse_number(s)
                .filter(|x| x.is_finite())
                .ok_or_else(|| format!("`{s}` is not a finite number"))
        })? {
            *slot = v;
        }
        Ok(())
    }

    fn int<T: std::str::FromStr>(&self, section: &str, key: &str) -> Result<Option<T>, ConfigError> {
        self.value(section, key, |s| {
            s.parse::<T>().map_err(|_| format!("`{s}` is not an integer in range"))
        })
    }

    fn bool(&self, section: &str, key: &str, slot: &mut bool) -> Result<(), ConfigError> {
        if let Some(v) = self.value(section, key, |s| match s {
            "true" | "yes" | "on" | "1" => Ok(true),
            "false" | "no" | "off" | "0" => Ok(false),
            _ => Err(format!("`{s}` is not a boolean")),
        })? {
            *slot = v;
        }
        Ok(())
    }
}

fn parse_modes(s: &str) -> Result<Vec<ModeSpec>, String> {
    s.split(',')
        .filter(|m| !m.trim().is_empty())
        .map(|m| {
            let parts: Vec<&str> = m.split(':').map(str::trim).collect();
            if parts.len() != 4 {
                return Err(format!("mode `{}` is not k:eta:re:im", m.trim()));
            }
            let k = parts[0]
                .parse::<i64>()
                .map_err(|_| format!("mode wavenumber `{}` is not an integer", parts[0]))?;
            let num = |p: &str| parse_number(p).ok_or_else(|| format!("`{p}` is not a number"));
            Ok(ModeSpec {
                k,
                eta: num(parts[1])?,
                re: num(parts[2])?,
                im: num(parts[3])?,
            })
        })
        .collect()
}

/// Parses configuration text. `strict` turns unknown keys into errors.
pub fn parse_config_str(text: &str, strict: bool) -> Result<Settings, ConfigError> {
    let sections = tokenize(text, strict)?;
    let r = Reader {
        sections: &sections,
    };
    let mut st = Settings::default();
    let invariant = |section: &str, msg: String| ConfigError::Invariant {
        line: r.header_line(section),
        section: section.to_string(),
        msg,
    };

    // [grid]
    let mut n_z = st.sim.grid.n_z;
    let mut n_v = st.sim.grid.n_v;
    let mut half_width = st.sim.grid.half_width;
    let mut dealias = st.sim.grid.dealias_fraction;
    if let Some(v) = r.int::<usize>("grid", "n_z")? {
        n_z = v;
    }
    if let Some(v) = r.int::<usize>("grid", "n_v")? {
        n_v = v;
    }
    r.f64("grid", "L", &mut half_width)?;
    r.f64("grid", "dealias", &mut dealias)?;
    st.sim.grid =
        Grid::new(n_z, n_v, half_width, dealias).map_err(|e| invariant("grid", e.to_string()))?;

    // [physics]
    let sim = &mut st.sim;
    r.f64("physics", "nu", &mut sim.nu)?;
    r.f64("physics", "epsilon", &mut sim.epsilon)?;
    r.bool("physics", "nonlinear", &mut sim.nonlinear)?;
    if let Some(seed) = r.int::<u64>("physics", "seed")? {
        sim.seed = seed;
    }
    let kind = r
        .value("physics", "initial", |s| match s {
            "bump" | "modes" | "random" => Ok(s.to_string()),
            _ => Err(format!("`{s}` is not one of bump, modes, random")),
        })?
        .unwrap_or_else(|| "bump".to_string());
    let mut kx = 1i64;
    let (mut width, mut zero_mode, mut envelope) = (1.0, 0.5, 4.0);
    if let Some(v) = r.int::<i64>("physics", "kx")? {
        kx = v;
    }
    r.f64("physics", "width", &mut width)?;
    r.f64("physics", "zero_mode", &mut zero_mode)?;
    r.f64("physics", "envelope", &mut envelope)?;
    let modes = r.value("physics", "modes", parse_modes)?;
    sim.initial_data = match kind.as_str() {
        "bump" => InitialData::Bump {
            kx,
            width,
            zero_mode,
        },
        "random" => InitialData::Random { envelope },
        _ => InitialData::Modes(modes.ok_or_else(|| {
            invariant("physics", "initial = modes needs a `modes` list".into())
        })?),
    };

    // [run]
    r.f64("run", "t_max", &mut sim.t_max)?;
    r.f64("run", "dt_max", &mut sim.dt_controller.dt_max)?;
    r.f64("run", "cfl_safety", &mut sim.dt_controller.cfl_safety)?;
    r.bool("run", "remap", &mut sim.remap_enabled)?;
    r.f64("run", "linear_t_step", &mut st.linear_t_step)?;
    r.f64("run", "sweep_nu_min", &mut st.sweep.nu_min)?;
    r.f64("run", "sweep_nu_max", &mut st.sweep.nu_max)?;
    if let Some(v) = r.int::<usize>("run", "sweep_nu_count")? {
        st.sweep.count = v;
    }

    // [diagnostics]
    if let Some(v) = r.int::<usize>("diagnostics", "stride")? {
        st.sim.diagnostics_stride = v;
    }
    r.bool("diagnostics", "expensive", &mut st.record.expensive)?;
    r.f64("diagnostics", "noise_floor", &mut st.record.noise_floor)?;
    if let Some(v) = r.int::<i64>("diagnostics", "echo_k_watch")? {
        st.echo_k_watch = v;
    }
    r.f64("diagnostics", "echo_prominence", &mut st.echo.prominence)?;
    st.snapshot_every = r.int::<usize>("diagnostics", "snapshot_every")?;
    r.f64("diagnostics", "bootstrap_factor", &mut st.bootstrap_factor)?;
    let mut fit = (f64::NAN, f64::NAN);
    r.f64("diagnostics", "fit_start", &mut fit.0)?;
    r.f64("diagnostics", "fit_end", &mut fit.1)?;
    st.fit_window = match (fit.0.is_nan(), fit.1.is_nan()) {
        (true, true) => None,
        (false, false) if fit.0 < fit.1 => Some(fit),
        _ => {
            return Err(invariant(
                "diagnostics",
                "fit_start and fit_end must both be set with fit_start < fit_end".into(),
            ))
        }
    };

    // [weights]
    let w = &mut st.weights;
    for (key, slot) in [
        ("kappa", &mut w.kappa),
        ("c_kappa_exponent", &mut w.c_kappa_exponent),
        ("mu", &mut w.mu),
        ("s", &mut w.s),
        ("lambda0", &mut w.lambda0),
        ("lambda_prime", &mut w.lambda_prime),
        ("delta_lambda", &mut w.delta_lambda),
        ("q_tilde", &mut w.q_tilde),
        ("c0", &mut w.c0),
        ("sigma", &mut w.sigma),
        ("beta", &mut w.beta),
        ("alpha", &mut w.alpha),
    ] {
        r.f64("weights", key, slot)?;
    }
    w.nu = st.sim.nu;

    st.sim
        .validate()
        .map_err(|e| invariant("physics", e.to_string()))?;
    st.sim.initial_field().map_err(|e| invariant("physics", e.to_string()))?;
    st.weights
        .validate()
        .map_err(|e| invariant("weights", e.to_string()))?;
    if !(st.linear_t_step > 0.0) {
        return Err(invariant("run", "linear_t_step must be positive".into()));
    }
    let sw = st.sweep;
    if !(sw.nu_min > 0.0 && sw.nu_max >= sw.nu_min && sw.count >= 1) {
        return Err(invariant(
            "run",
            "sweep needs 0 < sweep_nu_min <= sweep_nu_max and sweep_nu_count >= 1".into(),
        ));
    }
    if !(st.bootstrap_factor > 1.0) {
        return Err(invariant("diagnostics", "bootstrap_factor must exceed 1".into()));
    }
    if !(st.record.noise_floor >= 0.0) {
        return Err(invariant("diagnostics", "noise_floor must be >= 0".into()));
    }
    if st.echo_k_watch < 0 {
        return Err(invariant("diagnostics", "echo_k_watch must be >= 0".into()));
    }
    Ok(st)
}

pub fn parse_config(path: &Path, strict: bool) -> Result<Settings, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })?;
    parse_config_str(&text, strict)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        let st = parse_config_str("", true).unwrap();
        assert_eq!(st, Settings::default());
    }

    #[test]
    fn pi_suffix() {
        assert_eq!(parse_number("pi"), Some(std::f64::consts::PI));
        assert_eq!(parse_number("4pi"), Some(4.0 * std::f64::consts::PI));
        assert_eq!(parse_number("0.5*pi"), Some(0.5 * std::f64::consts::PI));
        assert_eq!(parse_number("1e-3"), Some(1e-3));
        assert_eq!(parse_number("pie"), None);
    }

    #[test]
    fn reads_every_section() {
        let text = "\
[grid]
n_z = 16
n_v = 64
L = 2pi
[physics]
nu = 1e-3
initial = modes
modes = 1:2:1:0, 0:1:0.5:0
[run]
t_max = 3
remap = yes
[diagnostics]
stride = 2
fit_start = 1
fit_end = 3
[weights]
sigma = 20
";
        let st = parse_config_str(text, true).unwrap();
        assert_eq!(st.sim.grid.n_z, 16);
        assert_eq!(st.sim.nu, 1e-3);
        assert_eq!(st.weights.nu, 1e-3);
        assert!(st.sim.remap_enabled);
        assert_eq!(st.fit_window, Some((1.0, 3.0)));
        assert_eq!(st.weights.sigma, 20.0);
        match &st.sim.initial_data {
            InitialData::Modes(m) => assert_eq!(m.len(), 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn strictness() {
        let text = "[run]\nt_mx = 3\n";
        let err = parse_config_str(text, true).unwrap_err();
        assert_eq!(
            err,
            ConfigError::UnknownKey {
                line: 2,
                section: "run".into(),
                key: "t_mx".into()
            }
        );
        assert!(parse_config_str(text, false).is_ok());
    }

    #[test]
    fn weight_rule_is_named() {
        let text = "# weights\n[weights]\nsigma = 10\nbeta = 5\nalpha = 1\n";
        let err = parse_config_str(text, true).unwrap_err().to_string();
        assert!(err.contains("β + 3α + 8 < σ"), "{err}");
        assert!(err.starts_with("line 2:"), "{err}");
    }

    #[test]
    fn bad_values_report_their_line() {
        let err = parse_config_str("[grid]\n\nn_z = 12\n", true).unwrap_err();
        assert!(err.to_string().contains("n_z = 12"), "{err}");
        let err = parse_config_str("[physics]\nnu = fast\n", true).unwrap_err();
        assert!(matches!(err, ConfigError::Value { line: 2, .. }), "{err}");
        let err = parse_config_str("nu = 1\n", true).unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { line: 1, .. }));
    }

    #[test]
    fn sweep_grid_is_geometric() {
        let s = SweepSpec {
            nu_min: 1e-4,
            nu_max: 1e-2,
            count: 3,
        };
        let v = s.values();
        assert!((v[0] - 1e-2).abs() < 1e-15 && (v[1] - 1e-3).abs() < 1e-15 && (v[2] - 1e-4).abs() < 1e-16);
    }
}
