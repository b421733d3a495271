//! Residual audit of the Galilean commutation relations.
//!
//! Every relation is checked as `‖Π([A, B] − RHS)Π‖_F` and compared against a
//! tolerance that depends on whether the relation holds exactly in the chosen
//! basis or only on the interior of a truncation.

use std::collections::BTreeSet;
use std::fmt;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{commutator, Operator, Projector, C64, I};
use crate::representations::{levi_civita, Axis, Exactness, GeneratorSet, RepresentationKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RelationLabel {
    #[serde(rename = "5a")]
    A,
    #[serde(rename = "5b")]
    B,
    #[serde(rename = "5c")]
    C,
    #[serde(rename = "5d")]
    D,
    #[serde(rename = "5e")]
    E,
    #[serde(rename = "5f")]
    F,
    #[serde(rename = "5g")]
    G,
    #[serde(rename = "5h")]
    H,
    #[serde(rename = "5i")]
    I,
}

impl RelationLabel {
    pub const ALL: [RelationLabel; 9] = [
        RelationLabel::A,
        RelationLabel::B,
        RelationLabel::C,
        RelationLabel::D,
        RelationLabel::E,
        RelationLabel::F,
        RelationLabel::G,
        RelationLabel::H,
        RelationLabel::I,
    ];

    pub fn code(self) -> &'static str {
        match self {
            RelationLabel::A => "5a",
            RelationLabel::B => "5b",
            RelationLabel::C => "5c",
            RelationLabel::D => "5d",
            RelationLabel::E => "5e",
            RelationLabel::F => "5f",
            RelationLabel::G => "5g",
            RelationLabel::H => "5h",
            RelationLabel::I => "5i",
        }
    }

    /// Accepts `5a` as well as the bare letter.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        let letter = s.strip_prefix('5').unwrap_or(s);
        RelationLabel::ALL
            .into_iter()
            .find(|l| &l.code()[1..] == letter)
    }

    /// The relation in operator form (ħ = 1, `M = m·I`).
    pub fn statement(self) -> &'static str {
        match self {
            RelationLabel::A => "[P_i, P_j] = 0",
            RelationLabel::B => "[G_i, G_j] = 0",
            RelationLabel::C => "[J_i, J_j] = i ε_ijk J_k",
            RelationLabel::D => "[J_i, P_j] = i ε_ijk P_k",
            RelationLabel::E => "[J_i, G_j] = i ε_ijk G_k",
            RelationLabel::F => "[G_i, P_j] = i δ_ij M",
            RelationLabel::G => "[P_i, H] = 0",
            RelationLabel::H => "[J_i, H] = 0",
            RelationLabel::I => "[G_i, H] = i P_i",
        }
    }

    /// What the relation says physically.
    pub fn meaning(self) -> &'static str {
        match self {
            RelationLabel::A => "space translations commute",
            RelationLabel::B => "boosts commute",
            RelationLabel::C => "rotations close on themselves with the structure constants of so(3)",
            RelationLabel::D => "momentum transforms as a vector under rotations",
            RelationLabel::E => "boost generators transform as a vector under rotations",
            RelationLabel::F => "boosts and translations commute only up to the mass, the central charge",
            RelationLabel::G => "momentum is conserved (homogeneity of space)",
            RelationLabel::H => "angular momentum is conserved (isotropy of space)",
            RelationLabel::I => "the boost generator evolves with the momentum (free motion of the centre of mass)",
        }
    }

    /// Relations indexed by a pair (i, j); the rest carry a single index.
    pub fn is_pairwise(self) -> bool {
        !matches!(self, RelationLabel::G | RelationLabel::H | RelationLabel::I)
    }
}

impl fmt::Display for RelationLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// A relation label with its indices. For ε-type relations the third index
/// is determined by the pair, so (i, j) enumerates every term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RelationId {
    pub label: RelationLabel,
    pub i: Axis,
    pub j: Option<Axis>,
}

impl RelationId {
    pub fn single(label: RelationLabel, i: Axis) -> Self {
        Self { label, i, j: None }
    }

    pub fn pair(label: RelationLabel, i: Axis, j: Axis) -> Self {
        Self { label, i, j: Some(j) }
    }

    /// Every index combination of a label over the first `axes` axes.
    pub fn enumerate(label: RelationLabel, axes: usize) -> Vec<RelationId> {
        let axes = &Axis::ALL[..axes.min(3)];
        if label.is_pairwise() {
            axes.iter()
                .flat_map(|&i| axes.iter().map(move |&j| RelationId::pair(label, i, j)))
                .collect()
        } else {
            axes.iter().map(|&i| RelationId::single(label, i)).collect()
        }
    }
}

impl fmt::Display for RelationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.j {
            Some(j) => write!(f, "{}({},{})", self.label, self.i, j),
            None => write!(f, "{}({})", self.label, self.i),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

impl Verdict {
    pub fn from_residual(residual: f64, tolerance: f64) -> Self {
        if residual <= tolerance {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::NotApplicable => "not_applicable",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub relation: RelationId,
    pub residual: Option<f64>,
    pub tolerance: Option<f64>,
    pub verdict: Verdict,
}

/// How tolerances are assigned to relations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TolerancePolicy {
    /// Per-dimension tolerance for relations exact in the basis.
    pub exact_per_dim: f64,
    /// Absolute tolerance for relations that hold on the truncation interior.
    pub truncated: f64,
    /// Multiplier applied to both.
    pub scale: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self {
            exact_per_dim: 1e-12,
            truncated: 1e-8,
            scale: 1.0,
        }
    }
}

impl TolerancePolicy {
    pub fn scaled(self, scale: f64) -> Self {
        Self {
            scale: self.scale * scale,
            ..self
        }
    }

    pub fn tolerance(&self, exactness: Exactness, dim: usize) -> f64 {
        let base = match exactness {
            Exactness::Exact => self.exact_per_dim * dim as f64,
            Exactness::Truncated => self.truncated,
        };
        base * self.scale
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditSummary {
    pub passed: usize,
    pub failed: usize,
    pub not_applicable: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub kind: RepresentationKind,
    pub dim: usize,
    pub projector_rank: usize,
    pub entries: Vec<AuditEntry>,
    pub summary: AuditSummary,
}

impl AuditReport {
    pub fn entry(&self, relation: RelationId) -> Option<&AuditEntry> {
        self.entries.iter().find(|e| e.relation == relation)
    }

    pub fn entries_for(&self, label: RelationLabel) -> impl Iterator<Item = &AuditEntry> {
        self.entries.iter().filter(move |e| e.relation.label == label)
    }

    /// Labels with at least one failing entry.
    pub fn failing_labels(&self) -> BTreeSet<RelationLabel> {
        self.entries
            .iter()
            .filter(|e| e.verdict == Verdict::Fail)
            .map(|e| e.relation.label)
            .collect()
    }

    /// Labels with at least one applicable entry, all of them passing.
    pub fn passing_labels(&self) -> BTreeSet<RelationLabel> {
        let failing = self.failing_labels();
        self.entries
            .iter()
            .filter(|e| e.verdict == Verdict::Pass && !failing.contains(&e.relation.label))
            .map(|e| e.relation.label)
            .collect()
    }

    pub fn max_residual(&self, label: RelationLabel) -> Option<f64> {
        self.entries_for(label)
            .filter_map(|e| e.residual)
            .fold(None, |acc, r| Some(acc.map_or(r, |a: f64| a.max(r))))
    }

    fn summarize(entries: &[AuditEntry]) -> AuditSummary {
        let mut s = AuditSummary::default();
        for e in entries {
            match e.verdict {
                Verdict::Pass => s.passed += 1,
                Verdict::Fail => s.failed += 1,
                Verdict::NotApplicable => s.not_applicable += 1,
            }
        }
        s
    }
}

/// Operands of a relation: `[A, B]` and the right-hand side as a list of
/// coefficient-operator terms (the factor `i` included in the coefficient).
struct Sides<'a> {
    left: &'a Operator,
    right: &'a Operator,
    rhs: Vec<(C64, &'a Operator)>,
}

fn sides<'a>(gens: &'a GeneratorSet, rel: RelationId) -> Option<Sides<'a>> {
    use RelationLabel as L;
    let i = rel.i;
    let third = |j: Axis| {
        Axis::ALL
            .into_iter()
            .find(|&k| k != i && k != j)
            .filter(|_| i != j)
    };
    let epsilon_rhs = |j: Axis, ops: &'a [Operator]| -> Option<Vec<(C64, &'a Operator)>> {
        match third(j) {
            Some(k) => Some(vec![(I * levi_civita(i, j, k), ops.get(k.index())?)]),
            None => Some(Vec::new()),
        }
    };
    match rel.label {
        L::A => Some(Sides {
            left: gens.momentum(i)?,
            right: gens.momentum(rel.j?)?,
            rhs: Vec::new(),
        }),
        L::B => Some(Sides {
            left: gens.boost(i)?,
            right: gens.boost(rel.j?)?,
            rhs: Vec::new(),
        }),
        L::C => Some(Sides {
            left: gens.angular_momentum(i)?,
            right: gens.angular_momentum(rel.j?)?,
            rhs: epsilon_rhs(rel.j?, &gens.angular_momentum)?,
        }),
        L::D => Some(Sides {
            left: gens.angular_momentum(i)?,
            right: gens.momentum(rel.j?)?,
            rhs: epsilon_rhs(rel.j?, &gens.momentum)?,
        }),
        L::E => Some(Sides {
            left: gens.angular_momentum(i)?,
            right: gens.boost(rel.j?)?,
            rhs: epsilon_rhs(rel.j?, &gens.boost)?,
        }),
        L::F => {
            let m = gens.mass_charge.as_ref()?;
            let j = rel.j?;
            Some(Sides {
                left: gens.boost(i)?,
                right: gens.momentum(j)?,
                rhs: if i == j { vec![(I, m)] } else { Vec::new() },
            })
        }
        L::G => Some(Sides {
            left: gens.momentum(i)?,
            right: gens.hamiltonian.as_ref()?,
            rhs: Vec::new(),
        }),
        L::H => Some(Sides {
            left: gens.angular_momentum(i)?,
            right: gens.hamiltonian.as_ref()?,
            rhs: Vec::new(),
        }),
        L::I => Some(Sides {
            left: gens.boost(i)?,
            right: gens.hamiltonian.as_ref()?,
            rhs: vec![(I, gens.momentum(i)?)],
        }),
    }
}

/// Residual `‖Π([A, B] − RHS)Π‖_F` of one relation, or `None` when an operand
/// is missing from the generator set.
pub fn relation_residual(gens: &GeneratorSet, rel: RelationId, proj: &Projector) -> Result<Option<f64>> {
    let Some(s) = sides(gens, rel) else {
        return Ok(None);
    };
    if proj.dim() != gens.dim() {
        return Err(Error::DimensionMismatch {
            left: gens.dim(),
            right: proj.dim(),
        });
    }
    let c = commutator(s.left, s.right)?;
    let mut diff: Array2<C64> = c.into_matrix();
    for (coeff, op) in s.rhs {
        diff.scaled_add(-coeff, op.matrix());
    }
    Ok(Some(proj.sandwich_norm(&diff)))
}

pub fn check_relation(gens: &GeneratorSet, rel: RelationId, tol: f64, proj: &Projector) -> Result<AuditEntry> {
    let residual = relation_residual(gens, rel, proj)?;
    Ok(match residual {
        Some(r) => AuditEntry {
            relation: rel,
            residual: Some(r),
            tolerance: Some(tol),
            verdict: Verdict::from_residual(r, tol),
        },
        None => AuditEntry {
            relation: rel,
            residual: None,
            tolerance: None,
            verdict: Verdict::NotApplicable,
        },
    })
}

/// Checks every relation over all three axes. Relations whose operands are
/// missing (no rotations in 1D, no Hamiltonian for a bare spin) are reported
/// as not applicable.
pub fn audit_algebra(
    gens: &GeneratorSet,
    kind: RepresentationKind,
    policy: &TolerancePolicy,
    proj: &Projector,
) -> Result<AuditReport> {
    let mut entries = Vec::new();
    for label in RelationLabel::ALL {
        let tol = policy.tolerance(gens.exactness(label), gens.dim());
        for rel in RelationId::enumerate(label, 3) {
            entries.push(check_relation(gens, rel, tol, proj)?);
        }
    }
    let summary = AuditReport::summarize(&entries);
    Ok(AuditReport {
        kind,
        dim: gens.dim(),
        projector_rank: proj.rank(),
        entries,
        summary,
    })
}

/// A relation that passes without the field and fails with it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Breaking {
    pub relation: RelationId,
    pub free_residual: f64,
    pub field_residual: f64,
}

pub fn classify_breaking(free: &AuditReport, field: &AuditReport) -> Result<Vec<Breaking>> {
    if free.kind != field.kind {
        return Err(Error::MismatchedReports(
            free.kind.to_string(),
            field.kind.to_string(),
        ));
    }
    Ok(field
        .entries
        .iter()
        .filter(|e| e.verdict == Verdict::Fail)
        .filter_map(|e| {
            let before = free.entry(e.relation)?;
            (before.verdict == Verdict::Pass).then(|| Breaking {
                relation: e.relation,
                free_residual: before.residual.unwrap_or(0.0),
                field_residual: e.residual.unwrap_or(f64::NAN),
            })
        })
        .collect())
}

pub fn breaking_labels(breaking: &[Breaking]) -> BTreeSet<RelationLabel> {
    breaking.iter().map(|b| b.relation.label).collect()
}
