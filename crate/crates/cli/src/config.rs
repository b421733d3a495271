//! Scenario files: an indentation-free sectioned format with typed keys.
//!
//! ```text
//! # comment
//! [scenario]
//! name:str = free_boost_invariance
//! seed:int = 7
//!
//! [representation]
//! kind:str = particle1d
//! levels:int = 32
//!
//! [check]
//! kind:str = law_invariance
//! transformation:str = boost_x
//! parameter:float = 0.2
//! alpha:floats = 0.8, 0.0
//! ```
//!
//! Types are `str`, `int`, `float`, `bool`, `floats` and `strs` (the last two
//! comma-separated). `[check]` may repeat; `[tolerance]` and `[output]` are
//! optional. Unknown keys are errors.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use galilean_core::audit::{RelationLabel, TolerancePolicy};
use galilean_core::dynamics::{GeneratorId, FD_COEFFICIENT};
use galilean_core::linalg::C64;
use galilean_core::representations::{
    Axis, Potential, RepresentationKind, Spin, DEFAULT_BUFFER, DIMENSION_BUDGET,
};
use galilean_core::commutant::COMMUTANT_BUDGET;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown key `{key}` in [{section}]")]
    UnknownKey { line: usize, section: String, key: String },
    #[error("line {line}: duplicate key `{key}` in [{section}]")]
    DuplicateKey { line: usize, section: String, key: String },
    #[error("line {line}: `{key}` is declared `{found}`, expected `{expected}`")]
    WrongType {
        line: usize,
        key: String,
        expected: &'static str,
        found: String,
    },
    #[error("line {line}: [{section}] is missing required key `{key}`")]
    Missing { line: usize, section: String, key: String },
    #[error("line {line}: `{key}`: {reason}")]
    Invalid { line: usize, key: String, reason: String },
    #[error("check `{check}`: {reason}")]
    Capability { check: String, reason: String },
    #[error("{0}")]
    Structure(String),
}

type ConfigResult<T> = std::result::Result<T, ConfigError>;

#[derive(Clone, Debug, PartialEq)]
enum Value {
    Str(String),
    Int(i64),
    Float(f64),
    Bool(bool),
    Floats(Vec<f64>),
    Strs(Vec<String>),
}

impl Value {
    fn type_name(&self) -> &'static str {
        match self {
            Value::Str(_) => "str",
            Value::Int(_) => "int",
            Value::Float(_) => "float",
            Value::Bool(_) => "bool",
            Value::Floats(_) => "floats",
            Value::Strs(_) => "strs",
        }
    }

    fn parse(ty: &str, raw: &str, line: usize) -> ConfigResult<Value> {
        let bad = |what: &str| ConfigError::Syntax {
            line,
            message: format!("cannot read `{raw}` as {what}"),
        };
        let float = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("float"));
        let list = |s: &str| -> Vec<String> {
            if s.trim().is_empty() {
                Vec::new()
            } else {
                s.split(',').map(|x| x.trim().to_string()).collect()
            }
        };
        Ok(match ty {
            "str" => Value::Str(raw.to_string()),
            "int" => Value::Int(raw.parse().map_err(|_| bad("int"))?),
            "float" => Value::Float(float(raw)?),
            "bool" => Value::Bool(match raw {
                "true" => true,
                "false" => false,
                _ => return Err(bad("bool")),
            }),
            "floats" => Value::Floats(list(raw).iter().map(|s| float(s)).collect::<ConfigResult<_>>()?),
            "strs" => Value::Strs(list(raw)),
            other => {
                return Err(ConfigError::Syntax {
                    line,
                    message: format!("unknown type `{other}` (use str, int, float, bool, floats or strs)"),
                })
            }
        })
    }
}

struct Entry {
    key: String,
    value: Value,
    line: usize,
    used: bool,
}

struct Section {
    name: String,
    line: usize,
    entries: Vec<Entry>,
}

impl Section {
    fn take(&mut self, key: &str) -> Option<(Value, usize)> {
        let e = self.entries.iter_mut().find(|e| e.key == key)?;
        e.used = true;
        Some((e.value.clone(), e.line))
    }

    fn wrong(&self, key: &str, line: usize, expected: &'static str, v: &Value) -> ConfigError {
        ConfigError::WrongType {
            line,
            key: key.to_string(),
            expected,
            found: v.type_name().to_string(),
        }
    }

    fn missing(&self, key: &str) -> ConfigError {
        ConfigError::Missing {
            line: self.line,
            section: self.name.clone(),
            key: key.to_string(),
        }
    }

    fn str_opt(&mut self, key: &str) -> ConfigResult<Option<(String, usize)>> {
        match self.take(key) {
            None => Ok(None),
            Some((Value::Str(s), line)) => Ok(Some((s, line))),
            Some((v, line)) => Err(self.wrong(key, line, "str", &v)),
        }
    }

    fn str_req(&mut self, key: &str) -> ConfigResult<(String, usize)> {
        self.str_opt(key)?.ok_or_else(|| self.missing(key))
    }

    fn float_opt(&mut self, key: &str) -> ConfigResult<Option<f64>> {
        match self.take(key) {
            None => Ok(None),
            Some((Value::Float(x), line)) => finite(key, x, line).map(Some),
            Some((Value::Int(i), line)) => Err(ConfigError::WrongType {
                line,
                key: key.to_string(),
                expected: "float",
                found: format!("int ({i})"),
            }),
            Some((v, line)) => Err(self.wrong(key, line, "float", &v)),
        }
    }

    fn float_req(&mut self, key: &str) -> ConfigResult<f64> {
        self.float_opt(key)?.ok_or_else(|| self.missing(key))
    }

    fn float_or(&mut self, key: &str, default: f64) -> ConfigResult<f64> {
        Ok(self.float_opt(key)?.unwrap_or(default))
    }

    fn positive_or(&mut self, key: &str, default: f64) -> ConfigResult<f64> {
        let line = self.line_of(key);
        let x = self.float_or(key, default)?;
        if x > 0.0 {
            Ok(x)
        } else {
            Err(ConfigError::Invalid {
                line,
                key: key.to_string(),
                reason: format!("must be positive, got {x}"),
            })
        }
    }

    fn int_opt(&mut self, key: &str) -> ConfigResult<Option<(i64, usize)>> {
        match self.take(key) {
            None => Ok(None),
            Some((Value::Int(i), line)) => Ok(Some((i, line))),
            Some((v, line)) => Err(self.wrong(key, line, "int", &v)),
        }
    }

    fn usize_opt(&mut self, key: &str) -> ConfigResult<Option<usize>> {
        match self.int_opt(key)? {
            None => Ok(None),
            Some((i, line)) => usize::try_from(i).map(Some).map_err(|_| ConfigError::Invalid {
                line,
                key: key.to_string(),
                reason: format!("must be a non-negative integer, got {i}"),
            }),
        }
    }

    fn bool_or(&mut self, key: &str, default: bool) -> ConfigResult<bool> {
        match self.take(key) {
            None => Ok(default),
            Some((Value::Bool(b), _)) => Ok(b),
            Some((v, line)) => Err(self.wrong(key, line, "bool", &v)),
        }
    }

    fn floats_opt(&mut self, key: &str) -> ConfigResult<Option<Vec<f64>>> {
        match self.take(key) {
            None => Ok(None),
            Some((Value::Floats(xs), line)) => {
                for &x in &xs {
                    finite(key, x, line)?;
                }
                Ok(Some(xs))
            }
            Some((v, line)) => Err(self.wrong(key, line, "floats", &v)),
        }
    }

    fn strs_or_empty(&mut self, key: &str) -> ConfigResult<(Vec<String>, usize)> {
        match self.take(key) {
            None => Ok((Vec::new(), self.line)),
            Some((Value::Strs(xs), line)) => Ok((xs, line)),
            Some((v, line)) => Err(self.wrong(key, line, "strs", &v)),
        }
    }

    fn axis_or(&mut self, key: &str, default: Axis) -> ConfigResult<Axis> {
        match self.str_opt(key)? {
            None => Ok(default),
            Some((s, line)) => Axis::parse(&s).ok_or_else(|| ConfigError::Invalid {
                line,
                key: key.to_string(),
                reason: format!("`{s}` is not one of x, y, z"),
            }),
        }
    }

    fn line_of(&self, key: &str) -> usize {
        self.entries.iter().find(|e| e.key == key).map_or(self.line, |e| e.line)
    }

    fn finish(self) -> ConfigResult<()> {
        match self.entries.into_iter().find(|e| !e.used) {
            Some(e) => Err(ConfigError::UnknownKey {
                line: e.line,
                section: self.name,
                key: e.key,
            }),
            None => Ok(()),
        }
    }
}

fn finite(key: &str, x: f64, line: usize) -> ConfigResult<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(ConfigError::Invalid {
            line,
            key: key.to_string(),
            reason: "must be finite".to_string(),
        })
    }
}

fn tokenize(text: &str) -> ConfigResult<Vec<Section>> {
    const SECTIONS: [&str; 5] = ["scenario", "representation", "tolerance", "check", "output"];
    let mut sections: Vec<Section> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        if let Some(inner) = content.strip_prefix('[') {
            let name = inner.strip_suffix(']').ok_or_else(|| ConfigError::Syntax {
                line,
                message: format!("unterminated section header `{content}`"),
            })?;
            if !SECTIONS.contains(&name) {
                return Err(ConfigError::Syntax {
                    line,
                    message: format!("unknown section [{name}]"),
                });
            }
            if name != "check" && sections.iter().any(|s| s.name == name) {
                return Err(ConfigError::Syntax {
                    line,
                    message: format!("section [{name}] appears twice"),
                });
            }
            sections.push(Section {
                name: name.to_string(),
                line,
                entries: Vec::new(),
            });
            continue;
        }
        let (lhs, rhs) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line,
            message: format!("expected `key:type = value`, got `{content}`"),
        })?;
        let (key, ty) = lhs.trim().split_once(':').ok_or_else(|| ConfigError::Syntax {
            line,
            message: format!("key `{}` has no `:type` suffix", lhs.trim()),
        })?;
        let key = key.trim().to_string();
        let value = Value::parse(ty.trim(), rhs.trim(), line)?;
        let section = sections.last_mut().ok_or_else(|| ConfigError::Syntax {
            line,
            message: "key outside of any section".to_string(),
        })?;
        if section.entries.iter().any(|e| e.key == key) {
            return Err(ConfigError::DuplicateKey {
                line,
                section: section.name.clone(),
                key,
            });
        }
        section.entries.push(Entry {
            key,
            value,
            line,
            used: false,
        });
    }
    Ok(sections)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Human,
    Structured,
    Csv,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Human => "human",
            Format::Structured => "structured",
            Format::Csv => "csv",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Format::Human, Format::Structured, Format::Csv]
            .into_iter()
            .find(|f| f.name() == s)
    }
}

/// Which projector the law-check residual is measured on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectorChoice {
    None,
    Default,
    Unitary,
    Shell,
}

impl ProjectorChoice {
    pub fn name(self) -> &'static str {
        match self {
            ProjectorChoice::None => "none",
            ProjectorChoice::Default => "default",
            ProjectorChoice::Unitary => "unitary",
            ProjectorChoice::Shell => "shell",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [
            ProjectorChoice::None,
            ProjectorChoice::Default,
            ProjectorChoice::Unitary,
            ProjectorChoice::Shell,
        ]
        .into_iter()
        .find(|p| p.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepresentationConfig {
    pub kind: RepresentationKind,
    pub levels: Option<usize>,
    pub mass: f64,
    /// Second mass of a two-particle system.
    pub mass2: Option<f64>,
    /// Spring constant between the two particles.
    pub interaction: Option<f64>,
    pub spin: Option<f64>,
    pub potential: Potential,
    pub buffer: usize,
}

impl RepresentationConfig {
    pub fn dim(&self) -> usize {
        let n = self.levels.unwrap_or(1);
        let spin = self.spin.map_or(1, |s| (2.0 * s) as usize + 1);
        match self.kind {
            RepresentationKind::Spin => spin,
            RepresentationKind::Particle1d => n,
            RepresentationKind::Particle3d => n.pow(3),
            RepresentationKind::ParticleWithSpin => n.pow(3) * spin,
            RepresentationKind::TwoParticle1d => n * n,
        }
    }

    fn has_hamiltonian(&self) -> bool {
        self.kind != RepresentationKind::Spin
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LawParams {
    pub transformation: GeneratorId,
    pub parameter: f64,
    pub t_end: f64,
    pub dt: f64,
    /// Number of grids, each halving `dt`.
    pub refinements: usize,
    /// Wavepacket amplitudes `(re, im)` per ladder mode; drawn from the seed
    /// when absent.
    pub alpha: Option<Vec<(f64, f64)>>,
    pub projector: ProjectorChoice,
    pub fd_coefficient: f64,
    /// When set, every measured order must lie within `2 ± order_window`.
    pub order_window: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CheckSpec {
    AlgebraAudit {
        audit_time: f64,
        expected_failures: BTreeSet<RelationLabel>,
    },
    LawInvariance(LawParams),
    LawCovariance(LawParams),
    BoostSplit {
        axis: Axis,
        velocity: f64,
    },
    Casimir {
        tolerance: f64,
        /// Lowest distinct `W` levels compared against the oscillator ladder.
        levels: usize,
        level_tolerance: f64,
    },
    Dvo {
        tolerance: f64,
        exclusion: f64,
        in_commutant: Vec<String>,
        in_invariant: Vec<String>,
        not_in_invariant: Vec<String>,
    },
    CentralChargePhase {
        axis: Axis,
        rho: f64,
        velocity: f64,
        tolerance: f64,
    },
    ClassicalTimeReversal {
        omega: f64,
        q0: f64,
        p0: f64,
        t_end: f64,
        dt: f64,
        solution_invariant: bool,
        min_distance: f64,
    },
}

impl CheckSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            CheckSpec::AlgebraAudit { .. } => "algebra_audit",
            CheckSpec::LawInvariance(_) => "law_invariance",
            CheckSpec::LawCovariance(_) => "law_covariance",
            CheckSpec::BoostSplit { .. } => "boost_split",
            CheckSpec::Casimir { .. } => "casimir",
            CheckSpec::Dvo { .. } => "dvo",
            CheckSpec::CentralChargePhase { .. } => "central_charge_phase",
            CheckSpec::ClassicalTimeReversal { .. } => "classical_time_reversal",
        }
    }

    /// Residuals of these checks are controlled by the truncation.
    pub fn converges_in_levels(&self) -> bool {
        matches!(
            self,
            CheckSpec::AlgebraAudit { .. }
                | CheckSpec::BoostSplit { .. }
                | CheckSpec::Casimir { .. }
                | CheckSpec::CentralChargePhase { .. }
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    pub id: String,
    pub expect: Expectation,
    pub spec: CheckSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputConfig {
    pub format: Format,
    pub dir: Option<String>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            format: Format::Human,
            dir: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub description: Option<String>,
    pub seed: u64,
    pub representation: Option<RepresentationConfig>,
    pub tolerance: TolerancePolicy,
    pub checks: Vec<CheckConfig>,
    pub output: OutputConfig,
}

pub fn parse_config(text: &str) -> ConfigResult<ScenarioConfig> {
    let sections = tokenize(text)?;
    let mut scenario = None;
    let mut representation = None;
    let mut tolerance = TolerancePolicy::default();
    let mut output = OutputConfig::default();
    let mut checks = Vec::new();
    for mut section in sections {
        match section.name.as_str() {
            "scenario" => {
                let (name, line) = section.str_req("name")?;
                if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
                    return Err(ConfigError::Invalid {
                        line,
                        key: "name".to_string(),
                        reason: "use letters, digits, `_` or `-` (it names output files)".to_string(),
                    });
                }
                let description = section.str_opt("description")?.map(|(s, _)| s);
                let seed = match section.int_opt("seed")? {
                    None => 0,
                    Some((s, line)) => u64::try_from(s).map_err(|_| ConfigError::Invalid {
                        line,
                        key: "seed".to_string(),
                        reason: "must be non-negative".to_string(),
                    })?,
                };
                section.finish()?;
                scenario = Some((name, description, seed));
            }
            "representation" => {
                representation = Some(parse_representation(&mut section)?);
                section.finish()?;
            }
            "tolerance" => {
                let d = TolerancePolicy::default();
                tolerance = TolerancePolicy {
                    exact_per_dim: section.positive_or("exact_per_dim", d.exact_per_dim)?,
                    truncated: section.positive_or("truncated", d.truncated)?,
                    scale: section.positive_or("scale", d.scale)?,
                };
                section.finish()?;
            }
            "output" => {
                if let Some((f, line)) = section.str_opt("format")? {
                    output.format = Format::parse(&f).ok_or_else(|| ConfigError::Invalid {
                        line,
                        key: "format".to_string(),
                        reason: format!("`{f}` is not one of human, structured, csv"),
                    })?;
                }
                output.dir = section.str_opt("dir")?.map(|(s, _)| s);
                section.finish()?;
            }
            "check" => {
                let index = checks.len() + 1;
                let check = parse_check(&mut section, index)?;
                section.finish()?;
                checks.push(check);
            }
            _ => unreachable!("tokenize rejects unknown sections"),
        }
    }
    let (name, description, seed) =
        scenario.ok_or_else(|| ConfigError::Structure("missing [scenario] section".to_string()))?;
    if checks.is_empty() {
        return Err(ConfigError::Structure("no [check] sections".to_string()));
    }
    let mut ids = BTreeSet::new();
    for c in &checks {
        if !ids.insert(c.id.clone()) {
            return Err(ConfigError::Structure(format!("duplicate check id `{}`", c.id)));
        }
    }
    let cfg = ScenarioConfig {
        name,
        description,
        seed,
        representation,
        tolerance,
        checks,
        output,
    };
    validate(&cfg)?;
    Ok(cfg)
}

fn parse_representation(s: &mut Section) -> ConfigResult<RepresentationConfig> {
    let (kind_name, line) = s.str_req("kind")?;
    let kind = RepresentationKind::parse(&kind_name).ok_or_else(|| ConfigError::Invalid {
        line,
        key: "kind".to_string(),
        reason: format!(
            "`{kind_name}` is not one of spin, particle1d, particle3d, particle_with_spin, two_particle_1d"
        ),
    })?;
    let needs_spin = matches!(kind, RepresentationKind::Spin | RepresentationKind::ParticleWithSpin);
    let needs_levels = kind != RepresentationKind::Spin;
    let spin = if needs_spin {
        let line = s.line_of("spin");
        let v = s.float_req("spin")?;
        Spin::new(v).map_err(|e| ConfigError::Invalid {
            line,
            key: "spin".to_string(),
            reason: e.to_string(),
        })?;
        Some(v)
    } else {
        None
    };
    let levels = if needs_levels {
        let line = s.line_of("levels");
        let n = s.usize_opt("levels")?.ok_or_else(|| s.missing("levels"))?;
        if n < 2 {
            return Err(ConfigError::Invalid {
                line,
                key: "levels".to_string(),
                reason: format!("need at least 2 levels, got {n}"),
            });
        }
        Some(n)
    } else {
        None
    };
    let mass = if needs_levels { s.positive_or("mass", 1.0)? } else { 1.0 };
    let (mass2, interaction) = if kind == RepresentationKind::TwoParticle1d {
        let line = s.line_of("interaction");
        let k = s.float_or("interaction", 0.0)?;
        if k < 0.0 {
            return Err(ConfigError::Invalid {
                line,
                key: "interaction".to_string(),
                reason: "spring constant must be ≥ 0".to_string(),
            });
        }
        (Some(s.positive_or("mass2", 1.0)?), Some(k))
    } else {
        (None, None)
    };
    let potential = match s.str_opt("potential")? {
        None => Potential::None,
        Some((p, line)) => {
            let pot = match p.as_str() {
                "none" => Potential::None,
                "linear" => Potential::Linear {
                    force: s.float_req("force")?,
                },
                "harmonic" => Potential::Harmonic {
                    omega: s.float_req("omega")?,
                },
                "anisotropic" => Potential::Anisotropic {
                    omega_x: s.float_req("omega_x")?,
                    omega_y: s.float_req("omega_y")?,
                },
                other => {
                    return Err(ConfigError::Invalid {
                        line,
                        key: "potential".to_string(),
                        reason: format!("`{other}` is not one of none, linear, harmonic, anisotropic"),
                    })
                }
            };
            pot.validate().map_err(|e| ConfigError::Invalid {
                line,
                key: "potential".to_string(),
                reason: e.to_string(),
            })?;
            let allowed = match kind {
                RepresentationKind::Particle1d => !matches!(pot, Potential::Anisotropic { .. }),
                RepresentationKind::Particle3d | RepresentationKind::ParticleWithSpin => true,
                RepresentationKind::Spin | RepresentationKind::TwoParticle1d => pot == Potential::None,
            };
            if !allowed {
                return Err(ConfigError::Invalid {
                    line,
                    key: "potential".to_string(),
                    reason: format!("`{p}` is not available for {kind_name}"),
                });
            }
            pot
        }
    };
    let buffer_line = s.line_of("buffer");
    let buffer = s.usize_opt("buffer")?.unwrap_or(if needs_levels { DEFAULT_BUFFER } else { 0 });
    if let Some(n) = levels {
        if buffer >= n {
            return Err(ConfigError::Invalid {
                line: buffer_line,
                key: "buffer".to_string(),
                reason: format!("buffer {buffer} leaves no interior with {n} levels"),
            });
        }
    }
    let rep = RepresentationConfig {
        kind,
        levels,
        mass,
        mass2,
        interaction,
        spin,
        potential,
        buffer,
    };
    if rep.dim() > DIMENSION_BUDGET {
        return Err(ConfigError::Invalid {
            line: s.line,
            key: "levels".to_string(),
            reason: format!("dimension {} exceeds the budget {DIMENSION_BUDGET}", rep.dim()),
        });
    }
    Ok(rep)
}

fn parse_law(s: &mut Section) -> ConfigResult<LawParams> {
    let (name, line) = s.str_req("transformation")?;
    let transformation = GeneratorId::parse(&name).ok_or_else(|| ConfigError::Invalid {
        line,
        key: "transformation".to_string(),
        reason: format!("`{name}` is not time_translation, space_translation_<axis>, rotation_<axis> or boost_<axis>"),
    })?;
    let parameter = s.float_req("parameter")?;
    let t_end = s.positive_or("t_end", 0.5)?;
    let dt = s.positive_or("dt", 0.05)?;
    let refinements = s.usize_opt("refinements")?.unwrap_or(3);
    if refinements == 0 {
        return Err(ConfigError::Invalid {
            line: s.line_of("refinements"),
            key: "refinements".to_string(),
            reason: "need at least one grid".to_string(),
        });
    }
    let alpha_line = s.line_of("alpha");
    let alpha = match s.floats_opt("alpha")? {
        None => None,
        Some(xs) if xs.len() % 2 == 0 => Some(xs.chunks(2).map(|c| (c[0], c[1])).collect()),
        Some(_) => {
            return Err(ConfigError::Invalid {
                line: alpha_line,
                key: "alpha".to_string(),
                reason: "list (re, im) pairs, one per ladder mode".to_string(),
            })
        }
    };
    let projector = match s.str_opt("projector")? {
        None => ProjectorChoice::None,
        Some((p, line)) => ProjectorChoice::parse(&p).ok_or_else(|| ConfigError::Invalid {
            line,
            key: "projector".to_string(),
            reason: format!("`{p}` is not one of none, default, unitary, shell"),
        })?,
    };
    let fd_coefficient = s.positive_or("fd_coefficient", FD_COEFFICIENT)?;
    let order_window = s.float_opt("order_window")?;
    Ok(LawParams {
        transformation,
        parameter,
        t_end,
        dt,
        refinements,
        alpha,
        projector,
        fd_coefficient,
        order_window,
    })
}

fn parse_check(s: &mut Section, index: usize) -> ConfigResult<CheckConfig> {
    let (kind, kind_line) = s.str_req("kind")?;
    let spec = match kind.as_str() {
        "algebra_audit" => {
            let audit_time = s.float_or("audit_time", 0.0)?;
            let (codes, line) = s.strs_or_empty("expected_failures")?;
            let expected_failures = codes
                .iter()
                .map(|c| {
                    RelationLabel::parse(c).ok_or_else(|| ConfigError::Invalid {
                        line,
                        key: "expected_failures".to_string(),
                        reason: format!("`{c}` is not a relation label (5a … 5i)"),
                    })
                })
                .collect::<ConfigResult<_>>()?;
            CheckSpec::AlgebraAudit {
                audit_time,
                expected_failures,
            }
        }
        "law_invariance" => CheckSpec::LawInvariance(parse_law(s)?),
        "law_covariance" => CheckSpec::LawCovariance(parse_law(s)?),
        "boost_split" => CheckSpec::BoostSplit {
            axis: s.axis_or("axis", Axis::X)?,
            velocity: s.float_req("velocity")?,
        },
        "casimir" => CheckSpec::Casimir {
            tolerance: s.positive_or("tolerance", 1e-8)?,
            levels: s.usize_opt("levels")?.unwrap_or(0),
            level_tolerance: s.positive_or("level_tolerance", 1e-6)?,
        },
        "dvo" => CheckSpec::Dvo {
            tolerance: s.positive_or("tolerance", 1e-8)?,
            exclusion: s.positive_or("exclusion", 0.1)?,
            in_commutant: s.strs_or_empty("in_commutant")?.0,
            in_invariant: s.strs_or_empty("in_invariant")?.0,
            not_in_invariant: s.strs_or_empty("not_in_invariant")?.0,
        },
        "central_charge_phase" => CheckSpec::CentralChargePhase {
            axis: s.axis_or("axis", Axis::X)?,
            rho: s.float_req("rho")?,
            velocity: s.float_req("velocity")?,
            tolerance: s.positive_or("tolerance", 1e-6)?,
        },
        "classical_time_reversal" => CheckSpec::ClassicalTimeReversal {
            omega: s.positive_or("omega", 1.0)?,
            q0: s.float_req("q0")?,
            p0: s.float_req("p0")?,
            t_end: s.positive_or("t_end", 10.0)?,
            dt: s.positive_or("dt", 0.01)?,
            solution_invariant: s.bool_or("solution_invariant", false)?,
            min_distance: s.positive_or("min_distance", 0.5)?,
        },
        other => {
            return Err(ConfigError::Invalid {
                line: kind_line,
                key: "kind".to_string(),
                reason: format!(
                    "`{other}` is not one of algebra_audit, law_invariance, law_covariance, boost_split, casimir, dvo, central_charge_phase, classical_time_reversal"
                ),
            })
        }
    };
    let id = s.str_opt("id")?.map_or_else(|| format!("{index}-{kind}"), |(s, _)| s);
    let expect = match s.str_opt("expect")? {
        None => Expectation::Pass,
        Some((e, line)) => match e.as_str() {
            "pass" => Expectation::Pass,
            "fail" => Expectation::Fail,
            _ => {
                return Err(ConfigError::Invalid {
                    line,
                    key: "expect".to_string(),
                    reason: format!("`{e}` is not pass or fail"),
                })
            }
        },
    };
    if let CheckSpec::AlgebraAudit {
        expected_failures, ..
    } = &spec
    {
        if expect == Expectation::Fail && expected_failures.is_empty() {
            return Err(ConfigError::Invalid {
                line: kind_line,
                key: "expect".to_string(),
                reason: "an audit expected to fail must list expected_failures".to_string(),
            });
        }
    }
    Ok(CheckConfig { id, expect, spec })
}

fn capability(check: &CheckConfig, reason: impl Into<String>) -> ConfigError {
    ConfigError::Capability {
        check: check.id.clone(),
        reason: reason.into(),
    }
}

/// Every check must be something its representation can do.
pub fn validate(cfg: &ScenarioConfig) -> ConfigResult<()> {
    for check in &cfg.checks {
        if let CheckSpec::ClassicalTimeReversal { .. } = check.spec {
            continue;
        }
        let rep = cfg
            .representation
            .as_ref()
            .ok_or_else(|| capability(check, "needs a [representation] section"))?;
        let kind = rep.kind;
        let axes = kind.spatial_axes();
        let axis_ok = |a: Axis| a.index() < axes;
        let need_h = |what: &str| -> ConfigResult<()> {
            if rep.has_hamiltonian() {
                Ok(())
            } else {
                Err(capability(check, format!("{what} needs a Hamiltonian; {kind} has none")))
            }
        };
        let need_free = |what: &str| -> ConfigResult<()> {
            if rep.potential.is_external() {
                Err(capability(check, format!("{what} needs a free representation")))
            } else {
                Ok(())
            }
        };
        match &check.spec {
            CheckSpec::AlgebraAudit { .. } => {}
            CheckSpec::LawInvariance(p) | CheckSpec::LawCovariance(p) => {
                need_h(check.spec.kind())?;
                let g = p.transformation;
                if matches!(g, GeneratorId::Rotation(_)) && !kind.has_rotations() {
                    return Err(capability(check, format!("{} needs rotations; {kind} has none", g.name())));
                }
                if let Some(a) = g.axis() {
                    if !axis_ok(a) {
                        return Err(capability(check, format!("{} uses axis {a}; {kind} has {axes}", g.name())));
                    }
                }
                if let Some(alpha) = &p.alpha {
                    let modes = expected_modes(rep);
                    if alpha.len() > modes {
                        return Err(capability(
                            check,
                            format!("{} wavepacket amplitudes given for {modes} ladder modes", alpha.len()),
                        ));
                    }
                }
                if p.projector == ProjectorChoice::Shell && rep.levels.is_some_and(|n| n < 3) {
                    return Err(capability(check, "the shell interior needs at least 3 levels"));
                }
            }
            CheckSpec::BoostSplit { axis, .. } | CheckSpec::CentralChargePhase { axis, .. } => {
                need_h(check.spec.kind())?;
                if matches!(check.spec, CheckSpec::BoostSplit { .. }) {
                    need_free("boost_split")?;
                }
                if !axis_ok(*axis) {
                    return Err(capability(check, format!("axis {axis} does not exist for {kind}")));
                }
            }
            CheckSpec::Casimir { levels, .. } => {
                need_h("casimir")?;
                if *levels > 0 && !(kind == RepresentationKind::TwoParticle1d && rep.interaction.unwrap_or(0.0) > 0.0) {
                    return Err(capability(
                        check,
                        "comparing W levels needs a two_particle_1d representation with interaction > 0",
                    ));
                }
            }
            CheckSpec::Dvo {
                in_commutant,
                in_invariant,
                not_in_invariant,
                ..
            } => {
                need_h("dvo")?;
                need_free("dvo")?;
                let d = rep.dim();
                if d * d > COMMUTANT_BUDGET {
                    return Err(capability(
                        check,
                        format!("dimension {d} gives {} commutant unknowns, over the budget {COMMUTANT_BUDGET}", d * d),
                    ));
                }
                for name in in_commutant.iter().chain(in_invariant).chain(not_in_invariant) {
                    let known = match name.as_str() {
                        "H" | "P_x" | "W" => true,
                        "S_z" => kind == RepresentationKind::ParticleWithSpin,
                        _ => false,
                    };
                    if !known {
                        return Err(capability(check, format!("no observable `{name}` (H, P_x, S_z with spin, W)")));
                    }
                }
            }
            CheckSpec::ClassicalTimeReversal { .. } => {}
        }
    }
    Ok(())
}

fn expected_modes(rep: &RepresentationConfig) -> usize {
    match rep.kind {
        RepresentationKind::Spin => 0,
        RepresentationKind::Particle1d => 1,
        RepresentationKind::Particle3d | RepresentationKind::ParticleWithSpin => 3,
        RepresentationKind::TwoParticle1d => 2,
    }
}

/// Wavepacket amplitudes as complex numbers.
pub fn alphas(pairs: &[(f64, f64)]) -> Vec<C64> {
    pairs.iter().map(|&(re, im)| C64::new(re, im)).collect()
}

struct Writer {
    out: String,
}

impl Writer {
    fn section(&mut self, name: &str) {
        if !self.out.is_empty() {
            self.out.push('\n');
        }
        let _ = writeln!(self.out, "[{name}]");
    }

    fn kv(&mut self, key: &str, ty: &str, value: impl fmt::Display) {
        let _ = writeln!(self.out, "{key}:{ty} = {value}");
    }

    fn floats(&mut self, key: &str, xs: &[f64]) {
        let joined: Vec<String> = xs.iter().map(f64::to_string).collect();
        self.kv(key, "floats", joined.join(", "));
    }

    fn strs<S: AsRef<str>>(&mut self, key: &str, xs: &[S]) {
        let joined: Vec<&str> = xs.iter().map(AsRef::as_ref).collect();
        self.kv(key, "strs", joined.join(", "));
    }
}

/// Writes every field explicitly, defaults included, so that
/// `parse_config(&to_text(c)) == c`.
pub fn to_text(cfg: &ScenarioConfig) -> String {
    let mut w = Writer { out: String::new() };
    w.section("scenario");
    w.kv("name", "str", &cfg.name);
    if let Some(d) = &cfg.description {
        w.kv("description", "str", d);
    }
    w.kv("seed", "int", cfg.seed);

    if let Some(r) = &cfg.representation {
        w.section("representation");
        w.kv("kind", "str", r.kind.name());
        if let Some(n) = r.levels {
            w.kv("levels", "int", n);
            w.kv("mass", "float", r.mass);
        }
        if let Some(m2) = r.mass2 {
            w.kv("mass2", "float", m2);
        }
        if let Some(k) = r.interaction {
            w.kv("interaction", "float", k);
        }
        if let Some(s) = r.spin {
            w.kv("spin", "float", s);
        }
        match r.potential {
            Potential::None => {}
            Potential::Linear { force } => {
                w.kv("potential", "str", "linear");
                w.kv("force", "float", force);
            }
            Potential::Harmonic { omega } => {
                w.kv("potential", "str", "harmonic");
                w.kv("omega", "float", omega);
            }
            Potential::Anisotropic { omega_x, omega_y } => {
                w.kv("potential", "str", "anisotropic");
                w.kv("omega_x", "float", omega_x);
                w.kv("omega_y", "float", omega_y);
            }
        }
        w.kv("buffer", "int", r.buffer);
    }

    w.section("tolerance");
    w.kv("exact_per_dim", "float", cfg.tolerance.exact_per_dim);
    w.kv("truncated", "float", cfg.tolerance.truncated);
    w.kv("scale", "float", cfg.tolerance.scale);

    for c in &cfg.checks {
        w.section("check");
        w.kv("kind", "str", c.spec.kind());
        w.kv("id", "str", &c.id);
        w.kv(
            "expect",
            "str",
            match c.expect {
                Expectation::Pass => "pass",
                Expectation::Fail => "fail",
            },
        );
        match &c.spec {
            CheckSpec::AlgebraAudit {
                audit_time,
                expected_failures,
            } => {
                w.kv("audit_time", "float", audit_time);
                let codes: Vec<&str> = expected_failures.iter().map(|l| l.code()).collect();
                w.strs("expected_failures", &codes);
            }
            CheckSpec::LawInvariance(p) | CheckSpec::LawCovariance(p) => {
                w.kv("transformation", "str", p.transformation.name());
                w.kv("parameter", "float", p.parameter);
                w.kv("t_end", "float", p.t_end);
                w.kv("dt", "float", p.dt);
                w.kv("refinements", "int", p.refinements);
                if let Some(a) = &p.alpha {
                    let flat: Vec<f64> = a.iter().flat_map(|&(re, im)| [re, im]).collect();
                    w.floats("alpha", &flat);
                }
                w.kv("projector", "str", p.projector.name());
                w.kv("fd_coefficient", "float", p.fd_coefficient);
                if let Some(o) = p.order_window {
                    w.kv("order_window", "float", o);
                }
            }
            CheckSpec::BoostSplit { axis, velocity } => {
                w.kv("axis", "str", axis);
                w.kv("velocity", "float", velocity);
            }
            CheckSpec::Casimir {
                tolerance,
                levels,
                level_tolerance,
            } => {
                w.kv("tolerance", "float", tolerance);
                w.kv("levels", "int", levels);
                w.kv("level_tolerance", "float", level_tolerance);
            }
            CheckSpec::Dvo {
                tolerance,
                exclusion,
                in_commutant,
                in_invariant,
                not_in_invariant,
            } => {
                w.kv("tolerance", "float", tolerance);
                w.kv("exclusion", "float", exclusion);
                w.strs("in_commutant", in_commutant);
                w.strs("in_invariant", in_invariant);
                w.strs("not_in_invariant", not_in_invariant);
            }
            CheckSpec::CentralChargePhase {
                axis,
                rho,
                velocity,
                tolerance,
            } => {
                w.kv("axis", "str", axis);
                w.kv("rho", "float", rho);
                w.kv("velocity", "float", velocity);
                w.kv("tolerance", "float", tolerance);
            }
            CheckSpec::ClassicalTimeReversal {
                omega,
                q0,
                p0,
                t_end,
                dt,
                solution_invariant,
                min_distance,
            } => {
                w.kv("omega", "float", omega);
                w.kv("q0", "float", q0);
                w.kv("p0", "float", p0);
                w.kv("t_end", "float", t_end);
                w.kv("dt", "float", dt);
                w.kv("solution_invariant", "bool", solution_invariant);
                w.kv("min_distance", "float", min_distance);
            }
        }
    }

    w.section("output");
    w.kv("format", "str", cfg.output.format.name());
    if let Some(d) = &cfg.output.dir {
        w.kv("dir", "str", d);
    }
    w.out
}
