//! Concrete finite-dimensional generator sets for the centrally extended
//! Galilean algebra.
//!
//! Particle sectors live on truncated ladder (Fock) bases. With `N` levels the
//! canonical pair satisfies `[Q, P] = i(I − N·E_{N−1,N−1})`. The only defect is
//! a diagonal entry on the top level, so projecting onto low levels removes it
//! exactly. A product of `d` ladder operators on one axis only reaches `⌈d/2⌉`
//! levels above the projected block, which is why a buffer of 2 contains every
//! polynomial relation of the algebra.
//!
//! Units have `ħ = 1`. The ladder quadratures use an internal oscillator scale
//! `ω₀ = 1`. It is a basis choice and is recorded in every descriptor.

use std::fmt;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::audit::RelationLabel;
use crate::error::{Error, Result};
use crate::linalg::{kron, Operator, Projector, C64, I, ZERO};

/// Largest Hilbert-space dimension the builders accept.
pub const DIMENSION_BUDGET: usize = 4096;

/// Internal oscillator scale of the ladder quadratures.
pub const OSCILLATOR_SCALE: f64 = 1.0;

/// Default interior buffer for polynomial relations.
pub const DEFAULT_BUFFER: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Axis> {
        Axis::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }

    pub fn parse(s: &str) -> Option<Axis> {
        match s {
            "x" => Some(Axis::X),
            "y" => Some(Axis::Y),
            "z" => Some(Axis::Z),
            _ => None,
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Levi-Civita symbol with `ε_xyz = 1`.
pub fn levi_civita(i: Axis, j: Axis, k: Axis) -> f64 {
    let (i, j, k) = (i.index() as i32, j.index() as i32, k.index() as i32);
    ((j - i) * (k - i) * (k - j)) as f64 / 2.0
}

/// A spin quantum number, stored as `2s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Spin {
    twice: u32,
}

impl Spin {
    pub fn new(s: f64) -> Result<Self> {
        let twice = 2.0 * s;
        if !s.is_finite() || twice.fract() != 0.0 || twice < 1.0 || twice + 1.0 > 64.0 {
            return Err(Error::InvalidSpin(s));
        }
        Ok(Self {
            twice: twice as u32,
        })
    }

    pub fn value(self) -> f64 {
        f64::from(self.twice) / 2.0
    }

    pub fn multiplicity(self) -> usize {
        self.twice as usize + 1
    }

    /// `s(s+1)`.
    pub fn casimir(self) -> f64 {
        let s = self.value();
        s * (s + 1.0)
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice % 2 == 0 {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// External potential added to the free Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Potential {
    None,
    /// `V = −f·Q_x`, a uniform force along x.
    Linear { force: f64 },
    /// `V = ½mω²|Q|²`.
    Harmonic { omega: f64 },
    /// `V = ½m(ω_x²Q_x² + ω_y²Q_y²)`; 3D only.
    Anisotropic { omega_x: f64, omega_y: f64 },
}

impl Potential {
    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason: &str| {
            Err(Error::InvalidParameter {
                name,
                reason: reason.to_string(),
            })
        };
        match *self {
            Potential::None => Ok(()),
            Potential::Linear { force } if !force.is_finite() => bad("force", "must be finite"),
            Potential::Harmonic { omega } if !(omega.is_finite() && omega >= 0.0) => {
                bad("omega", "must be finite and ≥ 0")
            }
            Potential::Anisotropic { omega_x, omega_y }
                if !(omega_x.is_finite() && omega_y.is_finite() && omega_x >= 0.0 && omega_y >= 0.0) =>
            {
                bad("omega_x/omega_y", "must be finite and ≥ 0")
            }
            _ => Ok(()),
        }
    }

    pub fn is_external(&self) -> bool {
        !matches!(self, Potential::None)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepresentationKind {
    Spin,
    Particle1d,
    Particle3d,
    ParticleWithSpin,
    TwoParticle1d,
}

impl RepresentationKind {
    pub fn name(self) -> &'static str {
        match self {
            RepresentationKind::Spin => "spin",
            RepresentationKind::Particle1d => "particle1d",
            RepresentationKind::Particle3d => "particle3d",
            RepresentationKind::ParticleWithSpin => "particle_with_spin",
            RepresentationKind::TwoParticle1d => "two_particle_1d",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            RepresentationKind::Spin,
            RepresentationKind::Particle1d,
            RepresentationKind::Particle3d,
            RepresentationKind::ParticleWithSpin,
            RepresentationKind::TwoParticle1d,
        ]
        .into_iter()
        .find(|k| k.name() == s)
    }

    /// Whether rotation generators exist.
    pub fn has_rotations(self) -> bool {
        matches!(
            self,
            RepresentationKind::Spin | RepresentationKind::Particle3d | RepresentationKind::ParticleWithSpin
        )
    }

    pub fn spatial_axes(self) -> usize {
        match self {
            RepresentationKind::Spin => 0,
            RepresentationKind::Particle1d | RepresentationKind::TwoParticle1d => 1,
            RepresentationKind::Particle3d | RepresentationKind::ParticleWithSpin => 3,
        }
    }
}

impl fmt::Display for RepresentationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Exactness {
    Exact,
    Truncated,
}

/// The Galilean generators (ħ = 1) plus the mass charge for one representation.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    pub hamiltonian: Option<Operator>,
    pub momentum: Vec<Operator>,
    pub angular_momentum: Vec<Operator>,
    pub boost: Vec<Operator>,
    pub mass_charge: Option<Operator>,
    pub mass: Option<f64>,
    exact_relations: Vec<RelationLabel>,
    dim: usize,
}

impl GeneratorSet {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn exactness(&self, label: RelationLabel) -> Exactness {
        if self.exact_relations.contains(&label) {
            Exactness::Exact
        } else {
            Exactness::Truncated
        }
    }

    pub fn momentum(&self, axis: Axis) -> Option<&Operator> {
        self.momentum.get(axis.index())
    }

    pub fn angular_momentum(&self, axis: Axis) -> Option<&Operator> {
        self.angular_momentum.get(axis.index())
    }

    pub fn boost(&self, axis: Axis) -> Option<&Operator> {
        self.boost.get(axis.index())
    }

    /// Every generator present, with a short name, in the fixed order
    /// H, P_i, J_i, G_i, M.
    pub fn named(&self) -> Vec<(String, &Operator)> {
        let mut out = Vec::new();
        if let Some(h) = &self.hamiltonian {
            out.push(("H".to_string(), h));
        }
        for (prefix, ops) in [("P", &self.momentum), ("J", &self.angular_momentum), ("G", &self.boost)] {
            for (i, op) in ops.iter().enumerate() {
                out.push((format!("{prefix}_{}", Axis::ALL[i]), op));
            }
        }
        if let Some(m) = &self.mass_charge {
            out.push(("M".to_string(), m));
        }
        out
    }

    /// The generator set at time `t`, where boosts carry their explicit time
    /// dependence `G_i(t) = m·Q_i − P_i·t` (Schrödinger picture). At `t = 0`
    /// this is the set itself.
    pub fn at_time(&self, t: f64) -> Result<GeneratorSet> {
        let mut out = self.clone();
        if t == 0.0 {
            return Ok(out);
        }
        for (g, p) in out.boost.iter_mut().zip(self.momentum.iter()) {
            *g = (&*g - &p.scale_real(t)).into_hermitian()?;
        }
        Ok(out)
    }
}

/// One tensor factor of the Hilbert space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Factor {
    Ladder(usize),
    Spin(usize),
}

/// Serializable summary of how a representation was built.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepresentationDescriptor {
    pub kind: RepresentationKind,
    pub dim: usize,
    pub levels: Option<usize>,
    pub masses: Vec<f64>,
    pub spin: Option<f64>,
    pub potential: Potential,
    pub interaction: Option<f64>,
    pub oscillator_scale: f64,
}

/// A generator set together with the data it was built from and the derived
/// magnitudes `Q_i = G_i/m`, `L_i = ε_ijk Q_j P_k`, `S_i = J_i − L_i`.
#[derive(Clone, Debug)]
pub struct Representation {
    kind: RepresentationKind,
    levels: Option<usize>,
    masses: Vec<f64>,
    spin: Option<Spin>,
    potential: Potential,
    interaction: Option<f64>,
    factors: Vec<Factor>,
    generators: GeneratorSet,
    positions: Vec<Operator>,
    orbital: Vec<Operator>,
    spin_components: Vec<Operator>,
}

impl Representation {
    pub fn kind(&self) -> RepresentationKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.generators.dim
    }

    pub fn levels(&self) -> Option<usize> {
        self.levels
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn total_mass(&self) -> Option<f64> {
        self.generators.mass
    }

    pub fn spin(&self) -> Option<Spin> {
        self.spin
    }

    pub fn potential(&self) -> Potential {
        self.potential
    }

    pub fn is_free(&self) -> bool {
        !self.potential.is_external()
    }

    pub fn generators(&self) -> &GeneratorSet {
        &self.generators
    }

    /// Position operators `Q_i` (centre of mass for the two-particle system).
    pub fn positions(&self) -> &[Operator] {
        &self.positions
    }

    pub fn orbital(&self) -> &[Operator] {
        &self.orbital
    }

    pub fn spin_components(&self) -> &[Operator] {
        &self.spin_components
    }

    /// Number of ladder factors, i.e. independent oscillator modes.
    pub fn ladder_modes(&self) -> usize {
        self.factors.iter().filter(|f| matches!(f, Factor::Ladder(_))).count()
    }

    pub fn descriptor(&self) -> RepresentationDescriptor {
        RepresentationDescriptor {
            kind: self.kind,
            dim: self.dim(),
            levels: self.levels,
            masses: self.masses.clone(),
            spin: self.spin.map(Spin::value),
            potential: self.potential,
            interaction: self.interaction,
            oscillator_scale: OSCILLATOR_SCALE,
        }
    }

    /// Projector onto ladder levels `0..N−1−b` on every ladder factor; spin
    /// factors are kept whole. `b = 0` gives the identity.
    pub fn interior_projector(&self, buffer: usize) -> Result<Projector> {
        let masks: Result<Vec<Vec<bool>>> = self
            .factors
            .iter()
            .map(|&f| match f {
                Factor::Ladder(n) => {
                    if buffer >= n {
                        Err(Error::InvalidBuffer { buffer, levels: n })
                    } else {
                        Ok((0..n).map(|level| level + buffer < n).collect())
                    }
                }
                Factor::Spin(d) => Ok(vec![true; d]),
            })
            .collect();
        Ok(Projector::tensor(&masks?))
    }

    /// Interior with the default polynomial buffer, clamped for tiny truncations.
    pub fn default_interior(&self) -> Result<Projector> {
        let buffer = self.levels.map_or(0, |n| DEFAULT_BUFFER.min(n - 1));
        self.interior_projector(buffer)
    }

    /// Interior for checks that involve finite unitaries (boosts, Weyl
    /// operators): the lower half of the levels on every ladder factor.
    pub fn unitary_interior(&self) -> Result<Projector> {
        self.interior_projector(self.levels.map_or(0, |n| n / 2))
    }

    /// Levels `0..=⌊(N−3)/2⌋` per axis, so any two ladder quanta add up to at
    /// most `N − 3`. Truncated `H` and `J_i` act exactly on those shells,
    /// which makes the free rotation residual pure discretization error here.
    pub fn shell_interior(&self) -> Result<Projector> {
        match self.levels {
            Some(n) if n >= 3 => self.interior_projector(n - 1 - (n - 3) / 2),
            Some(n) => Err(Error::InvalidBuffer { buffer: n, levels: n }),
            None => self.interior_projector(0),
        }
    }
}

fn annihilation(levels: usize) -> Array2<C64> {
    let mut a = Array2::zeros((levels, levels));
    for k in 1..levels {
        a[[k - 1, k]] = C64::new((k as f64).sqrt(), 0.0);
    }
    a
}

/// Truncated quadratures `Q = (a + a†)/√(2mω₀)`, `P = i√(mω₀/2)(a† − a)`.
pub fn ladder_quadratures(levels: usize, mass: f64) -> Result<(Operator, Operator)> {
    let a = annihilation(levels);
    let ad = a.t().to_owned();
    let q = (&a + &ad) * C64::new(1.0 / (2.0 * mass * OSCILLATOR_SCALE).sqrt(), 0.0);
    let p = (&ad - &a) * (I * (mass * OSCILLATOR_SCALE / 2.0).sqrt());
    Ok((Operator::hermitian(q)?, Operator::hermitian(p)?))
}

/// Embeds `op` as the `index`-th tensor factor among factors of the given dims.
fn embed(op: &Operator, index: usize, dims: &[usize]) -> Operator {
    let mut out: Option<Operator> = None;
    for (pos, &d) in dims.iter().enumerate() {
        let factor = if pos == index { op.clone() } else { Operator::identity(d) };
        out = Some(match out {
            None => factor,
            Some(acc) => kron(&acc, &factor),
        });
    }
    out.expect("at least one factor")
}

fn check_budget(dim: usize) -> Result<()> {
    if dim > DIMENSION_BUDGET {
        return Err(Error::DimensionBudget {
            required: dim,
            budget: DIMENSION_BUDGET,
        });
    }
    Ok(())
}

fn check_levels(levels: usize) -> Result<()> {
    if levels < 2 {
        return Err(Error::InvalidParameter {
            name: "levels",
            reason: format!("need at least 2 ladder levels, got {levels}"),
        });
    }
    Ok(())
}

fn check_mass(name: &'static str, m: f64) -> Result<()> {
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::InvalidParameter {
            name,
            reason: format!("mass must be finite and positive, got {m}"),
        });
    }
    Ok(())
}

fn square(op: &Operator) -> Operator {
    op * op
}

fn sum(ops: impl IntoIterator<Item = Operator>, dim: usize) -> Operator {
    ops.into_iter().fold(Operator::zeros(dim), |acc, op| &acc + &op)
}

/// Standard angular-momentum matrices for spin `s`: `J_z` diagonal with
/// eigenvalues `s, s−1, …, −s`.
pub fn build_spin_rep(spin: Spin) -> Result<Representation> {
    let d = spin.multiplicity();
    let s = spin.value();
    let m_of = |k: usize| s - k as f64;
    let mut raise = Array2::<C64>::zeros((d, d));
    for k in 1..d {
        let m = m_of(k);
        raise[[k - 1, k]] = C64::new((s * (s + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
    }
    let lower = raise.t().to_owned();
    let jx = (&raise + &lower) * C64::new(0.5, 0.0);
    let jy = (&raise - &lower) * C64::new(0.0, -0.5);
    let jz_values: Vec<f64> = (0..d).map(m_of).collect();
    let angular = vec![
        Operator::hermitian(jx)?,
        Operator::hermitian(jy)?,
        Operator::diagonal(&jz_values),
    ];
    let generators = GeneratorSet {
        hamiltonian: None,
        momentum: Vec::new(),
        angular_momentum: angular.clone(),
        boost: Vec::new(),
        mass_charge: None,
        mass: None,
        exact_relations: RelationLabel::ALL.to_vec(),
        dim: d,
    };
    Ok(Representation {
        kind: RepresentationKind::Spin,
        levels: None,
        masses: Vec::new(),
        spin: Some(spin),
        potential: Potential::None,
        interaction: None,
        factors: vec![Factor::Spin(d)],
        generators,
        positions: Vec::new(),
        orbital: Vec::new(),
        spin_components: angular,
    })
}

/// Spinless particle in 1 or 3 dimensions on a truncated ladder basis with
/// `levels` levels per axis.
pub fn build_particle_rep(levels: usize, mass: f64, potential: Potential, dims: usize) -> Result<Representation> {
    check_levels(levels)?;
    check_mass("mass", mass)?;
    potential.validate()?;
    let kind = match dims {
        1 => RepresentationKind::Particle1d,
        3 => RepresentationKind::Particle3d,
        _ => {
            return Err(Error::InvalidParameter {
                name: "dims",
                reason: format!("spatial dimension must be 1 or 3, got {dims}"),
            })
        }
    };
    if dims == 1 && matches!(potential, Potential::Anisotropic { .. }) {
        return Err(Error::Unsupported(
            "anisotropic potentials need a 3D particle".to_string(),
        ));
    }
    let dim = levels.checked_pow(dims as u32).unwrap_or(usize::MAX);
    check_budget(dim)?;

    let (q1, p1) = ladder_quadratures(levels, mass)?;
    let factor_dims = vec![levels; dims];
    let q: Vec<Operator> = (0..dims).map(|i| embed(&q1, i, &factor_dims)).collect();
    let p: Vec<Operator> = (0..dims).map(|i| embed(&p1, i, &factor_dims)).collect();

    let kinetic = sum(p.iter().map(square), dim).scale_real(1.0 / (2.0 * mass));
    let external = match potential {
        Potential::None => Operator::zeros(dim),
        Potential::Linear { force } => q[0].scale_real(-force),
        Potential::Harmonic { omega } => {
            sum(q.iter().map(square), dim).scale_real(0.5 * mass * omega * omega)
        }
        Potential::Anisotropic { omega_x, omega_y } => {
            let x = square(&q[0]).scale_real(omega_x * omega_x);
            let y = square(&q[1]).scale_real(omega_y * omega_y);
            (&x + &y).scale_real(0.5 * mass)
        }
    };
    let hamiltonian = (&kinetic + &external).into_hermitian()?;
    let boost = q.iter().map(|qi| qi.scale_real(mass)).collect();

    let orbital = if dims == 3 {
        orbital_angular_momentum(&q, &p)?
    } else {
        Vec::new()
    };
    let spin_components = orbital.iter().map(|_| Operator::zeros(dim)).collect();

    let generators = GeneratorSet {
        hamiltonian: Some(hamiltonian),
        momentum: p,
        angular_momentum: orbital.clone(),
        boost,
        mass_charge: Some(Operator::identity(dim).scale_real(mass)),
        mass: Some(mass),
        exact_relations: vec![RelationLabel::A, RelationLabel::B],
        dim,
    };
    Ok(Representation {
        kind,
        levels: Some(levels),
        masses: vec![mass],
        spin: None,
        potential,
        interaction: None,
        factors: vec![Factor::Ladder(levels); dims],
        generators,
        positions: q,
        orbital,
        spin_components,
    })
}

/// `L_i = ε_ijk Q_j P_k`.
fn orbital_angular_momentum(q: &[Operator], p: &[Operator]) -> Result<Vec<Operator>> {
    Axis::ALL
        .iter()
        .map(|&i| {
            let j = Axis::from_index((i.index() + 1) % 3).expect("axis");
            let k = Axis::from_index((i.index() + 2) % 3).expect("axis");
            let l = &(&q[j.index()] * &p[k.index()]) - &(&q[k.index()] * &p[j.index()]);
            l.into_hermitian()
        })
        .collect()
}

/// Tensor product of a 3D particle with a spin: `J_i = L_i ⊗ I + I ⊗ S_i`,
/// every other generator extended by the identity on the spin factor.
pub fn compose_with_spin(particle: &Representation, spin: &Representation) -> Result<Representation> {
    if particle.kind != RepresentationKind::Particle3d {
        return Err(Error::Unsupported(format!(
            "compose_with_spin needs a 3D particle, got {}",
            particle.kind
        )));
    }
    if spin.kind != RepresentationKind::Spin {
        return Err(Error::Unsupported(format!(
            "compose_with_spin needs a spin representation, got {}",
            spin.kind
        )));
    }
    let d = spin.dim();
    let n = particle.dim();
    let dim = n * d;
    check_budget(dim)?;
    let ident = Operator::identity(d);
    let extend = |op: &Operator| kron(op, &ident);
    let g = &particle.generators;

    let orbital: Vec<Operator> = particle.orbital.iter().map(extend).collect();
    let spin_ops: Vec<Operator> = spin
        .generators
        .angular_momentum
        .iter()
        .map(|s| kron(&Operator::identity(n), s))
        .collect();
    let angular: Vec<Operator> = orbital
        .iter()
        .zip(&spin_ops)
        .map(|(l, s)| (l + s).into_hermitian())
        .collect::<Result<_>>()?;
    let recovered: Vec<Operator> = angular
        .iter()
        .zip(&orbital)
        .map(|(j, l)| (j - l).into_hermitian())
        .collect::<Result<_>>()?;

    let mass = g.mass.expect("particle has a mass");
    let generators = GeneratorSet {
        hamiltonian: g.hamiltonian.as_ref().map(extend),
        momentum: g.momentum.iter().map(extend).collect(),
        angular_momentum: angular,
        boost: g.boost.iter().map(extend).collect(),
        mass_charge: Some(Operator::identity(dim).scale_real(mass)),
        mass: Some(mass),
        exact_relations: vec![RelationLabel::A, RelationLabel::B],
        dim,
    };
    let mut factors = particle.factors.clone();
    factors.push(Factor::Spin(d));
    Ok(Representation {
        kind: RepresentationKind::ParticleWithSpin,
        levels: particle.levels,
        masses: particle.masses.clone(),
        spin: spin.spin,
        potential: particle.potential,
        interaction: None,
        factors,
        generators,
        positions: particle.positions.iter().map(extend).collect(),
        orbital,
        spin_components: recovered,
    })
}

/// Two particles on a line with a harmonic interaction `½k(Q₁ − Q₂)²`.
///
/// The truncated basis is the product of a centre-of-mass ladder (mass
/// `m₁ + m₂`) and a relative-coordinate ladder (reduced mass), each with
/// `levels` levels. The particle coordinates are
/// `Q₁ = Q_cm + (m₂/M)q`, `Q₂ = Q_cm − (m₁/M)q`, `P₁ = (m₁/M)P_cm + p`,
/// `P₂ = (m₂/M)P_cm − p`, and H, P, G, M are assembled from them.
pub fn build_two_particle_rep(levels: usize, m1: f64, m2: f64, interaction: f64) -> Result<Representation> {
    check_levels(levels)?;
    check_mass("m1", m1)?;
    check_mass("m2", m2)?;
    if !(interaction.is_finite() && interaction >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "interaction",
            reason: format!("spring constant must be finite and ≥ 0, got {interaction}"),
        });
    }
    let dim = levels * levels;
    check_budget(dim)?;
    let total = m1 + m2;
    let reduced = m1 * m2 / total;

    let (qc, pc) = ladder_quadratures(levels, total)?;
    let (qr, pr) = ladder_quadratures(levels, reduced)?;
    let dims = [levels, levels];
    let (qc, pc) = (embed(&qc, 0, &dims), embed(&pc, 0, &dims));
    let (qr, pr) = (embed(&qr, 1, &dims), embed(&pr, 1, &dims));

    let q1 = &qc + &qr.scale_real(m2 / total);
    let q2 = &qc - &qr.scale_real(m1 / total);
    let p1 = &pc.scale_real(m1 / total) + &pr;
    let p2 = &pc.scale_real(m2 / total) - &pr;

    let separation = &q1 - &q2;
    let hamiltonian = &(&square(&p1).scale_real(0.5 / m1) + &square(&p2).scale_real(0.5 / m2))
        + &square(&separation).scale_real(0.5 * interaction);
    let hamiltonian = hamiltonian.into_hermitian()?;
    let momentum = (&p1 + &p2).into_hermitian()?;
    let boost = (&q1.scale_real(m1) + &q2.scale_real(m2)).into_hermitian()?;
    let position = boost.scale_real(1.0 / total);

    let generators = GeneratorSet {
        hamiltonian: Some(hamiltonian),
        momentum: vec![momentum],
        angular_momentum: Vec::new(),
        boost: vec![boost],
        mass_charge: Some(Operator::identity(dim).scale_real(total)),
        mass: Some(total),
        exact_relations: vec![RelationLabel::A, RelationLabel::B],
        dim,
    };
    Ok(Representation {
        kind: RepresentationKind::TwoParticle1d,
        levels: Some(levels),
        masses: vec![m1, m2],
        spin: None,
        potential: Potential::None,
        interaction: Some(interaction),
        factors: vec![Factor::Ladder(levels), Factor::Ladder(levels)],
        generators,
        positions: vec![position],
        orbital: Vec::new(),
        spin_components: Vec::new(),
    })
}

/// Builds a truncated coherent-like wavepacket: on every ladder factor the
/// normalized truncated exponential `e^{α a†}|0⟩` (amplitudes `αⁿ/√n!`), and
/// the top `J_z` state on a spin factor. Missing amplitudes default to 0.
pub fn wavepacket(rep: &Representation, alphas: &[C64]) -> Result<crate::linalg::StateVector> {
    let mut modes = alphas.iter().copied();
    let mut amplitudes = ndarray::Array1::from_elem(1, C64::new(1.0, 0.0));
    for factor in &rep.factors {
        let local: Vec<C64> = match *factor {
            Factor::Ladder(n) => {
                let alpha = modes.next().unwrap_or(ZERO);
                let mut coeffs = Vec::with_capacity(n);
                let mut c = C64::new(1.0, 0.0);
                for k in 0..n {
                    if k > 0 {
                        c = c * alpha / (k as f64).sqrt();
                    }
                    coeffs.push(c);
                }
                coeffs
            }
            Factor::Spin(d) => (0..d).map(|k| if k == 0 { C64::new(1.0, 0.0) } else { ZERO }).collect(),
        };
        let mut next = ndarray::Array1::zeros(amplitudes.len() * local.len());
        for (i, a) in amplitudes.iter().enumerate() {
            for (k, b) in local.iter().enumerate() {
                next[i * local.len() + k] = a * b;
            }
        }
        amplitudes = next;
    }
    debug_assert_eq!(amplitudes.len(), rep.dim());
    crate::linalg::StateVector::new(amplitudes)
}
