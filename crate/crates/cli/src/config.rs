//! Sectioned `key = value` run configuration with a strict per-experiment schema.

use std::collections::BTreeMap;
use std::fmt;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Experiment {
    GroundState,
    EvolveGpe,
    Modes,
    OneBit,
    TwoBit,
    PairField,
    PairFieldSpinor,
    Spinor,
    Sweep,
}

impl Experiment {
    pub const ALL: [Experiment; 9] = [
        Self::GroundState,
        Self::EvolveGpe,
        Self::Modes,
        Self::OneBit,
        Self::TwoBit,
        Self::PairField,
        Self::PairFieldSpinor,
        Self::Spinor,
        Self::Sweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::GroundState => "ground_state",
            Self::EvolveGpe => "evolve_gpe",
            Self::Modes => "modes",
            Self::OneBit => "onebit",
            Self::TwoBit => "twobit",
            Self::PairField => "pairfield",
            Self::PairFieldSpinor => "pairfield_spinor",
            Self::Spinor => "spinor",
            Self::Sweep => "sweep",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == s)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Int(usize),
    Ident(String),
    Bool(bool),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // `{:?}` keeps a decimal point and round-trips exactly.
            Self::Num(x) => write!(f, "{x:?}"),
            Self::Int(n) => write!(f, "{n}"),
            Self::Ident(s) => f.write_str(s),
            Self::Bool(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Kind {
    Num,
    Int,
    Ident(&'static [&'static str]),
    Bool,
}

#[derive(Debug, Clone, Copy)]
struct KeySpec {
    name: &'static str,
    kind: Kind,
    required: bool,
}

const fn req(name: &'static str, kind: Kind) -> KeySpec {
    KeySpec { name, kind, required: true }
}

const fn opt(name: &'static str, kind: Kind) -> KeySpec {
    KeySpec { name, kind, required: false }
}

struct SectionSpec {
    name: &'static str,
    required: bool,
    keys: Vec<KeySpec>,
}

const POTENTIAL_KINDS: &[&str] = &["harmonic", "double_well", "displaced_harmonic"];
const KERNEL_KINDS: &[&str] = &["none", "regularized_dipole", "gaussian"];
const SCHEMES: &[&str] = &["split_step", "rk4"];
const GPE_INITIAL: &[&str] = &["ground_state", "left_mode", "gaussian"];
const COEFFICIENT_MODES: &[&str] = &["as_printed", "derived"];
const SWEEP_PARAMETERS: &[&str] = &["lambda"];

fn section(name: &'static str, required: bool, keys: Vec<KeySpec>) -> SectionSpec {
    SectionSpec { name, required, keys }
}

fn grid() -> SectionSpec {
    section("grid", true, vec![req("n_points", Kind::Int), req("half_width", Kind::Num)])
}

fn potential() -> SectionSpec {
    section(
        "potential",
        true,
        vec![
            req("kind", Kind::Ident(POTENTIAL_KINDS)),
            opt("omega", Kind::Num),
            opt("v0", Kind::Num),
            opt("d", Kind::Num),
            opt("omega_z", Kind::Num),
            opt("z0", Kind::Num),
            opt("z1", Kind::Num),
        ],
    )
}

fn condensate() -> SectionSpec {
    section("condensate", false, vec![opt("g", Kind::Num), opt("n_particles", Kind::Num)])
}

fn kernel() -> SectionSpec {
    section(
        "kernel",
        false,
        vec![
            req("kind", Kind::Ident(KERNEL_KINDS)),
            opt("w0", Kind::Num),
            opt("a", Kind::Num),
            opt("s", Kind::Num),
            opt("offset", Kind::Num),
            opt("self_interaction", Kind::Bool),
        ],
    )
}

fn integrator() -> SectionSpec {
    section(
        "integrator",
        true,
        vec![
            req("dt", Kind::Num),
            req("t_final", Kind::Num),
            opt("record_stride", Kind::Int),
            opt("scheme", Kind::Ident(SCHEMES)),
        ],
    )
}

fn ode_integrator() -> SectionSpec {
    section("integrator", true, vec![req("dt", Kind::Num), req("t_final", Kind::Num), opt("record_stride", Kind::Int)])
}

fn amplitudes(names: &[&'static str]) -> SectionSpec {
    section("initial", false, names.iter().map(|n| opt(n, Kind::Num)).collect())
}

const ONE_QUBIT: [&str; 4] = ["c0_re", "c0_im", "c1_re", "c1_im"];
const TWO_QUBIT: [&str; 8] = ["c00_re", "c00_im", "c01_re", "c01_im", "c10_re", "c10_im", "c11_re", "c11_im"];

fn schema(e: Experiment) -> Vec<SectionSpec> {
    let experiment = section("experiment", true, vec![req("kind", Kind::Ident(&[]))]);
    let mut s = vec![experiment];
    match e {
        Experiment::GroundState => s.extend([grid(), potential(), condensate()]),
        Experiment::EvolveGpe => s.extend([
            grid(),
            potential(),
            condensate(),
            integrator(),
            section(
                "initial",
                false,
                vec![
                    opt("kind", Kind::Ident(GPE_INITIAL)),
                    opt("x0", Kind::Num),
                    opt("sigma", Kind::Num),
                    opt("k", Kind::Num),
                ],
            ),
        ]),
        Experiment::Modes => s.extend([grid(), potential(), condensate(), kernel()]),
        Experiment::OneBit => s.extend([
            section(
                "modes",
                true,
                vec![
                    opt("e_onsite", Kind::Num),
                    req("omega", Kind::Num),
                    opt("kappa_n", Kind::Num),
                    opt("mu1_n", Kind::Num),
                    opt("mu2_n", Kind::Num),
                ],
            ),
            amplitudes(&ONE_QUBIT),
            ode_integrator(),
        ]),
        Experiment::TwoBit => s.extend([
            condensate(),
            section(
                "modes",
                true,
                vec![
                    req("coefficient_mode", Kind::Ident(COEFFICIENT_MODES)),
                    opt("e_onsite", Kind::Num),
                    opt("omega", Kind::Num),
                    opt("chi", Kind::Num),
                    opt("mu1", Kind::Num),
                    opt("mu2", Kind::Num),
                    opt("nu1", Kind::Num),
                    opt("nu2", Kind::Num),
                ],
            ),
            amplitudes(&TWO_QUBIT),
            ode_integrator(),
        ]),
        Experiment::PairField => {
            s.extend([grid(), potential(), condensate(), kernel(), integrator(), amplitudes(&TWO_QUBIT)])
        }
        Experiment::PairFieldSpinor => s.extend([
            grid(),
            potential(),
            condensate(),
            section("spinor", false, vec![opt("g00", Kind::Num), opt("g01", Kind::Num), opt("g11", Kind::Num)]),
            kernel(),
            integrator(),
            amplitudes(&TWO_QUBIT),
        ]),
        Experiment::Spinor => s.extend([
            grid(),
            potential(),
            condensate(),
            section(
                "spinor",
                true,
                vec![
                    req("rabi", Kind::Num),
                    opt("detuning", Kind::Num),
                    opt("g00", Kind::Num),
                    opt("g01", Kind::Num),
                    opt("g11", Kind::Num),
                ],
            ),
            integrator(),
            amplitudes(&ONE_QUBIT),
        ]),
        Experiment::Sweep => s.extend([
            section(
                "sweep",
                true,
                vec![
                    req("parameter", Kind::Ident(SWEEP_PARAMETERS)),
                    req("start", Kind::Num),
                    req("stop", Kind::Num),
                    req("steps", Kind::Int),
                    opt("omega", Kind::Num),
                    opt("t_window", Kind::Num),
                    opt("threshold", Kind::Num),
                    opt("bisect_tol", Kind::Num),
                ],
            ),
            amplitudes(&ONE_QUBIT),
            section("integrator", true, vec![req("dt", Kind::Num)]),
        ]),
    }
    s
}

/// A validated configuration: the experiment plus typed values per section.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: Experiment,
    sections: BTreeMap<String, BTreeMap<String, Value>>,
}

fn parse_value(raw: &str, kind: Kind, key: &str, section: &str, line: usize) -> Result<Value, CliError> {
    let bad = |what: &str| CliError::Config(format!("line {line}: {what} for '{key}' in [{section}]: '{raw}'"));
    match kind {
        Kind::Num => match raw.parse::<f64>() {
            Ok(x) if x.is_finite() && !raw.contains(['i', 'I', 'n', 'N']) => Ok(Value::Num(x)),
            _ => Err(bad("malformed number")),
        },
        Kind::Int => raw.parse::<usize>().map(Value::Int).map_err(|_| bad("malformed integer")),
        Kind::Bool => match raw {
            "true" => Ok(Value::Bool(true)),
            "false" => Ok(Value::Bool(false)),
            _ => Err(bad("expected true or false")),
        },
        Kind::Ident(allowed) => {
            if allowed.is_empty() || allowed.contains(&raw) {
                Ok(Value::Ident(raw.to_string()))
            } else {
                Err(bad(&format!("expected one of {}", allowed.join(", "))))
            }
        }
    }
}

struct RawEntry {
    section: String,
    key: String,
    value: String,
    line: usize,
}

fn tokenize(text: &str) -> Result<Vec<RawEntry>, CliError> {
    let mut out: Vec<RawEntry> = Vec::new();
    let mut current: Option<String> = None;
    let mut seen_sections: Vec<String> = Vec::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .map(str::trim)
                .filter(|n| !n.is_empty())
                .ok_or_else(|| CliError::Config(format!("line {line}: malformed section header '{content}'")))?;
            if seen_sections.iter().any(|s| s == name) {
                return Err(CliError::Config(format!("line {line}: duplicate section [{name}]")));
            }
            seen_sections.push(name.to_string());
            current = Some(name.to_string());
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .filter(|(k, v)| !k.is_empty() && !v.is_empty())
            .ok_or_else(|| CliError::Config(format!("line {line}: expected 'key = value', got '{content}'")))?;
        let section = current
            .clone()
            .ok_or_else(|| CliError::Config(format!("line {line}: key '{key}' appears before any section")))?;
        if out.iter().any(|e| e.section == section && e.key == key) {
            return Err(CliError::Config(format!("line {line}: duplicate key '{key}' in [{section}]")));
        }
        out.push(RawEntry { section, key: key.to_string(), value: value.to_string(), line });
    }
    Ok(out)
}

/// Parses and validates a configuration against the schema of its experiment.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let entries = tokenize(text)?;
    let kind = entries
        .iter()
        .find(|e| e.section == "experiment" && e.key == "kind")
        .ok_or_else(|| CliError::Config("missing required key 'kind' in [experiment]".into()))?;
    let experiment = Experiment::from_name(&kind.value).ok_or_else(|| {
        let names: Vec<&str> = Experiment::ALL.iter().map(|e| e.name()).collect();
        CliError::Config(format!(
            "line {}: unknown experiment '{}' (expected one of {})",
            kind.line,
            kind.value,
            names.join(", ")
        ))
    })?;
    let spec = schema(experiment);
    let mut sections: BTreeMap<String, BTreeMap<String, Value>> = BTreeMap::new();
    for e in &entries {
        let sec = spec.iter().find(|s| s.name == e.section).ok_or_else(|| {
            CliError::Config(format!("line {}: unknown section [{}] for experiment {experiment}", e.line, e.section))
        })?;
        let key =
            sec.keys.iter().find(|k| k.name == e.key).ok_or_else(|| {
                CliError::Config(format!("unknown key '{}' in [{}] (line {})", e.key, e.section, e.line))
            })?;
        let v = parse_value(&e.value, key.kind, &e.key, &e.section, e.line)?;
        sections.entry(e.section.clone()).or_default().insert(e.key.clone(), v);
    }
    for sec in &spec {
        let present = sections.get(sec.name);
        if sec.required && present.is_none() {
            return Err(CliError::Config(format!(
                "missing required section [{}] for experiment {experiment}",
                sec.name
            )));
        }
        if let Some(values) = present {
            for k in sec.keys.iter().filter(|k| k.required) {
                if !values.contains_key(k.name) {
                    return Err(CliError::Config(format!("missing required key '{}' in [{}]", k.name, sec.name)));
                }
            }
        }
    }
    let cfg = RunConfig { experiment, sections };
    cfg.check_conditional_keys()?;
    Ok(cfg)
}

impl RunConfig {
    fn check_conditional_keys(&self) -> Result<(), CliError> {
        let need = |section: &str, keys: &[&str]| -> Result<(), CliError> {
            for k in keys {
                if self.get(section, k).is_none() {
                    return Err(CliError::Config(format!("missing required key '{k}' in [{section}]")));
                }
            }
            Ok(())
        };
        if let Some(kind) = self.ident("potential", "kind") {
            match kind {
                "harmonic" => need("potential", &["omega"])?,
                "double_well" => need("potential", &["v0", "d"])?,
                _ => need("potential", &["omega_z", "z0", "z1"])?,
            }
            let wanted = match self.experiment {
                Experiment::Modes | Experiment::PairField => Some("double_well"),
                Experiment::Spinor | Experiment::PairFieldSpinor => Some("displaced_harmonic"),
                _ => None,
            };
            if let Some(w) = wanted {
                if kind != w {
                    return Err(CliError::Config(format!(
                        "experiment {} needs kind = {w} in [potential], got {kind}",
                        self.experiment
                    )));
                }
            }
        }
        match self.ident("kernel", "kind") {
            Some("regularized_dipole") => need("kernel", &["w0", "a"])?,
            Some("gaussian") => need("kernel", &["w0", "s"])?,
            _ => {}
        }
        if self.experiment == Experiment::EvolveGpe && self.ident("initial", "kind") == Some("gaussian") {
            need("initial", &["x0", "sigma"])?;
        }
        Ok(())
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&Value> {
        self.sections.get(section).and_then(|s| s.get(key))
    }

    pub fn has_section(&self, section: &str) -> bool {
        self.sections.contains_key(section)
    }

    /// Numeric value; integers are accepted where a real is expected.
    pub fn num(&self, section: &str, key: &str) -> Option<f64> {
        match self.get(section, key)? {
            Value::Num(x) => Some(*x),
            Value::Int(n) => Some(*n as f64),
            _ => None,
        }
    }

    pub fn num_or(&self, section: &str, key: &str, default: f64) -> f64 {
        self.num(section, key).unwrap_or(default)
    }

    pub fn int_or(&self, section: &str, key: &str, default: usize) -> usize {
        match self.get(section, key) {
            Some(Value::Int(n)) => *n,
            _ => default,
        }
    }

    pub fn ident(&self, section: &str, key: &str) -> Option<&str> {
        match self.get(section, key)? {
            Value::Ident(s) => Some(s),
            _ => None,
        }
    }

    pub fn bool_or(&self, section: &str, key: &str, default: bool) -> bool {
        match self.get(section, key) {
            Some(Value::Bool(b)) => *b,
            _ => default,
        }
    }

    /// Sections and values in canonical (schema) order.
    pub fn entries(&self) -> Vec<(&'static str, Vec<(&'static str, &Value)>)> {
        schema(self.experiment)
            .into_iter()
            .filter_map(|sec| {
                let values = self.sections.get(sec.name)?;
                let keys = sec.keys.iter().filter_map(|k| values.get(k.name).map(|v| (k.name, v))).collect();
                Some((sec.name, keys))
            })
            .collect()
    }

    /// Canonical text form; parsing it yields an equal configuration.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for (i, (name, keys)) in self.entries().into_iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            out.push_str(&format!("[{name}]\n"));
            for (k, v) in keys {
                out.push_str(&format!("{k} = {v}\n"));
            }
        }
        out
    }

    /// Replaces a value of the right type, for programmatic overrides.
    pub fn with_value(&self, section: &str, key: &str, raw: &str) -> Result<Self, CliError> {
        let mut text = String::new();
        let mut found = false;
        for (name, keys) in self.entries() {
            text.push_str(&format!("[{name}]\n"));
            for (k, v) in keys {
                if name == section && k == key {
                    found = true;
                    text.push_str(&format!("{k} = {raw}\n"));
                } else {
                    text.push_str(&format!("{k} = {v}\n"));
                }
            }
            if name == section && !found {
                found = true;
                text.push_str(&format!("{key} = {raw}\n"));
            }
        }
        if !found {
            text.push_str(&format!("[{section}]\n{key} = {raw}\n"));
        }
        parse_config(&text)
    }
}
