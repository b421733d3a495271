//! Galilean transformations acting on states, observables and the
//! Schrödinger law `dψ/dt = −iHψ` (ħ = 1).
//!
//! Conventions, fixed by expectation values:
//! - `U = e^{iKs}` acts actively, `ψ' = Uψ` and `O' = UOU†`.
//! - A space translation `e^{iPρ}` moves `⟨Q⟩` by `−ρ`.
//! - A boost `e^{iGu}` moves `⟨P⟩` by `+mu`.
//! - In the Schrödinger picture the boost generator is `G(t) = mQ − Pt`,
//!   the form that makes `U(t)ψ(t)` solve the free equation again.
//! - The group commutator `e^{iPρ}e^{iGu}e^{−iPρ}e^{−iGu}` equals `e^{imuρ}`.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::audit::Verdict;
use crate::error::{Error, Result};
use crate::linalg::{commutator, phase_distance, HermitianEigen, Operator, Projector, StateVector, C64, I, ZERO};
use crate::representations::{Axis, GeneratorSet};

/// Parameter used by the conjugation cross-check in
/// [`invariance_of_observable`].
pub const CONJUGATION_PROBE: f64 = 0.37;

/// Default coefficient `c` in the finite-difference tolerance `c·dt²`.
pub const FD_COEFFICIENT: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "generator", content = "axis", rename_all = "snake_case")]
pub enum GeneratorId {
    TimeTranslation,
    SpaceTranslation(Axis),
    Rotation(Axis),
    Boost(Axis),
}

impl GeneratorId {
    pub fn name(self) -> String {
        match self {
            GeneratorId::TimeTranslation => "time_translation".to_string(),
            GeneratorId::SpaceTranslation(a) => format!("space_translation_{a}"),
            GeneratorId::Rotation(a) => format!("rotation_{a}"),
            GeneratorId::Boost(a) => format!("boost_{a}"),
        }
    }

    /// Inverse of [`GeneratorId::name`].
    pub fn parse(s: &str) -> Option<Self> {
        if s == "time_translation" {
            return Some(GeneratorId::TimeTranslation);
        }
        let (head, axis) = s.rsplit_once('_')?;
        let axis = Axis::parse(axis)?;
        match head {
            "space_translation" => Some(GeneratorId::SpaceTranslation(axis)),
            "rotation" => Some(GeneratorId::Rotation(axis)),
            "boost" => Some(GeneratorId::Boost(axis)),
            _ => None,
        }
    }

    pub fn axis(self) -> Option<Axis> {
        match self {
            GeneratorId::TimeTranslation => None,
            GeneratorId::SpaceTranslation(a) | GeneratorId::Rotation(a) | GeneratorId::Boost(a) => Some(a),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeDependence {
    Static,
    BoostRule,
}

/// A one-parameter Galilean transformation `e^{iK s}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transformation {
    pub generator: GeneratorId,
    pub parameter: f64,
    pub time_dependence: TimeDependence,
}

impl Transformation {
    /// A transformation with a time-independent generator.
    pub fn fixed(generator: GeneratorId, parameter: f64) -> Result<Self> {
        check_parameter(parameter)?;
        Ok(Self {
            generator,
            parameter,
            time_dependence: TimeDependence::Static,
        })
    }

    /// A boost with the time-dependent generator `G(t) = mQ − Pt`.
    pub fn boost(axis: Axis, velocity: f64) -> Result<Self> {
        check_parameter(velocity)?;
        Ok(Self {
            generator: GeneratorId::Boost(axis),
            parameter: velocity,
            time_dependence: TimeDependence::BoostRule,
        })
    }

    pub fn new(generator: GeneratorId, parameter: f64, time_dependence: TimeDependence) -> Result<Self> {
        check_parameter(parameter)?;
        if time_dependence == TimeDependence::BoostRule && !matches!(generator, GeneratorId::Boost(_)) {
            return Err(Error::InvalidParameter {
                name: "time_dependence",
                reason: format!("the boost rule applies only to boosts, not {}", generator.name()),
            });
        }
        Ok(Self {
            generator,
            parameter,
            time_dependence,
        })
    }

    pub fn is_time_dependent(&self) -> bool {
        self.time_dependence == TimeDependence::BoostRule
    }

    /// The Hermitian generator `K(t)`.
    pub fn generator_at(&self, gens: &GeneratorSet, t: f64) -> Result<Operator> {
        let missing = || Error::MissingGenerator(self.generator.name());
        Ok(match self.generator {
            GeneratorId::TimeTranslation => gens.hamiltonian.clone().ok_or_else(missing)?,
            GeneratorId::SpaceTranslation(a) => gens.momentum(a).cloned().ok_or_else(missing)?,
            GeneratorId::Rotation(a) => gens.angular_momentum(a).cloned().ok_or_else(missing)?,
            GeneratorId::Boost(a) => {
                let g = gens.boost(a).ok_or_else(missing)?;
                if self.is_time_dependent() && t != 0.0 {
                    let p = gens.momentum(a).ok_or_else(|| Error::MissingGenerator(format!("P_{a}")))?;
                    (g - &p.scale_real(t)).into_hermitian()?
                } else {
                    g.clone()
                }
            }
        })
    }

    /// `U(t) = e^{iK(t)s}`.
    pub fn unitary_at(&self, gens: &GeneratorSet, t: f64) -> Result<Operator> {
        HermitianEigen::new(&self.generator_at(gens, t)?)?.exp_i(self.parameter)
    }
}

fn check_parameter(p: f64) -> Result<()> {
    if !p.is_finite() {
        return Err(Error::InvalidParameter {
            name: "parameter",
            reason: format!("transformation parameter must be finite, got {p}"),
        });
    }
    Ok(())
}

fn state_from(amplitudes: Array1<C64>) -> Result<StateVector> {
    let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized { norm });
    }
    StateVector::new(amplitudes)
}

/// `ψ' = U(t)ψ`.
pub fn transform_state(psi: &StateVector, t: &Transformation, gens: &GeneratorSet, time: f64) -> Result<StateVector> {
    let k = t.generator_at(gens, time)?;
    if k.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            left: k.dim(),
            right: psi.dim(),
        });
    }
    let eig = HermitianEigen::new(&k)?;
    state_from(eig.apply_exp_i(t.parameter, psi.amplitudes()))
}

/// `O' = U O U†` at `t = 0`; Hermitian inputs give Hermitian outputs.
pub fn transform_observable(o: &Operator, t: &Transformation, gens: &GeneratorSet) -> Result<Operator> {
    let u = t.unitary_at(gens, 0.0)?;
    let transformed = u.checked_mul(o)?.checked_mul(&u.adjoint())?;
    if o.is_hermitian() {
        Operator::hermitian(transformed.into_matrix())
    } else {
        Ok(transformed)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObservableInvariance {
    /// `‖Π[O, K]Π‖_F`.
    pub commutator_residual: f64,
    /// `‖Π(e^{iKs}Oe^{−iKs} − O)Π‖_F` at the probe parameter.
    pub conjugation_residual: f64,
    pub probe: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    /// Whether the conjugation form reaches the same verdict.
    pub consistent: bool,
}

/// Decides `[O, K] = 0` on the interior and cross-checks it against the
/// finite conjugation `e^{iKs}Oe^{−iKs} = O`.
pub fn invariance_of_observable(o: &Operator, k: &Operator, tol: f64, proj: &Projector) -> Result<ObservableInvariance> {
    let commutator_residual = proj.sandwich_norm(commutator(o, k)?.matrix());
    let eig = HermitianEigen::new(k)?;
    let u = eig.exp_i_matrix(CONJUGATION_PROBE);
    let u_dag = u.t().mapv(|z| z.conj());
    let conjugated = u.dot(o.matrix()).dot(&u_dag);
    let conjugation_residual = proj.sandwich_norm(&(&conjugated - o.matrix()));
    let verdict = Verdict::from_residual(commutator_residual, tol);
    Ok(ObservableInvariance {
        commutator_residual,
        conjugation_residual,
        probe: CONJUGATION_PROBE,
        tolerance: tol,
        verdict,
        consistent: Verdict::from_residual(conjugation_residual, tol) == verdict,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CentralPhase {
    pub lambda: C64,
    /// `arg λ`.
    pub phase: f64,
    /// `‖ΠWΠ − λΠ‖_F`.
    pub fit_residual: f64,
    /// The same fit without the projector.
    pub unprojected_residual: f64,
}

/// Fits `Π e^{iPρ}e^{iGu}e^{−iPρ}e^{−iGu} Π ≈ λΠ` along one axis.
pub fn central_charge_phase(
    gens: &GeneratorSet,
    axis: Axis,
    rho: f64,
    u: f64,
    proj: &Projector,
) -> Result<CentralPhase> {
    let p = gens.momentum(axis).ok_or_else(|| Error::MissingGenerator(format!("P_{axis}")))?;
    let g = gens.boost(axis).ok_or_else(|| Error::MissingGenerator(format!("G_{axis}")))?;
    if proj.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            left: p.dim(),
            right: proj.dim(),
        });
    }
    let ep = HermitianEigen::new(p)?;
    let eg = HermitianEigen::new(g)?;
    let w = ep
        .exp_i_matrix(rho)
        .dot(&eg.exp_i_matrix(u))
        .dot(&ep.exp_i_matrix(-rho))
        .dot(&eg.exp_i_matrix(-u));

    let fit = |mask: &[bool]| -> (C64, f64) {
        let rank = mask.iter().filter(|&&b| b).count();
        let trace: C64 = (0..w.nrows()).filter(|&i| mask[i]).map(|i| w[[i, i]]).sum();
        let lambda = trace / rank as f64;
        let mut acc = 0.0;
        for (i, &mi) in mask.iter().enumerate() {
            if !mi {
                continue;
            }
            for (j, &mj) in mask.iter().enumerate() {
                if mj {
                    let target = if i == j { lambda } else { ZERO };
                    acc += (w[[i, j]] - target).norm_sqr();
                }
            }
        }
        (lambda, acc.sqrt())
    };
    let (lambda, fit_residual) = fit(proj.mask());
    let (_, unprojected_residual) = fit(&vec![true; w.nrows()]);
    Ok(CentralPhase {
        lambda,
        phase: lambda.arg(),
        fit_residual,
        unprojected_residual,
    })
}

/// Uniform grid `start, start + step, …` with `points` entries.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub start: f64,
    pub step: f64,
    pub points: usize,
}

impl TimeGrid {
    pub fn new(start: f64, step: f64, points: usize) -> Result<Self> {
        if !(start.is_finite() && step.is_finite() && step > 0.0) {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: format!("time step must be finite and positive, got {step}"),
            });
        }
        Ok(Self { start, step, points })
    }

    /// A grid covering `[0, t_end]` with step `dt`, rounded to whole steps.
    pub fn span(t_end: f64, dt: f64) -> Result<Self> {
        let steps = (t_end / dt).round();
        if !(steps.is_finite() && steps >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "t_end",
                reason: format!("cannot cover [0, {t_end}] with step {dt}"),
            });
        }
        Self::new(0.0, dt, steps as usize + 1)
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.points).map(|k| self.start + self.step * k as f64).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub grid: TimeGrid,
    pub states: Vec<StateVector>,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.grid.times()
    }
}

/// Exact evolution `ψ(t) = e^{−iHt}ψ₀` from a single eigendecomposition.
pub fn evolve(h: &Operator, psi0: &StateVector, grid: TimeGrid) -> Result<Trajectory> {
    if h.dim() != psi0.dim() {
        return Err(Error::DimensionMismatch {
            left: h.dim(),
            right: psi0.dim(),
        });
    }
    let eig = HermitianEigen::new(h)?;
    let states = grid
        .times()
        .into_iter()
        .map(|t| state_from(eig.apply_exp_i(-t, psi0.amplitudes())))
        .collect::<Result<_>>()?;
    Ok(Trajectory { grid, states })
}

/// `c·dt²`, the tolerance for second-order central differences.
pub fn fd_tolerance(coefficient: f64, dt: f64) -> f64 {
    coefficient * dt * dt
}

/// Order estimated from residuals at `dt` and `dt/2`.
pub fn measured_order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LawCheck {
    /// Interior grid times where the residual was evaluated.
    pub times: Vec<f64>,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    /// `max_k phase_distance(ψ'(t_k), ψ(t_k))`: how far the transformed
    /// solution is from the original one.
    pub max_phase_distance: f64,
}

/// `U(t_k)` for every grid point; a static transformation is exponentiated once.
enum Unitaries {
    Fixed(Array2<C64>),
    Sequence(Vec<Array2<C64>>),
}

impl Unitaries {
    fn build(t: &Transformation, gens: &GeneratorSet, times: &[f64]) -> Result<Self> {
        if t.is_time_dependent() {
            times
                .iter()
                .map(|&time| Ok(HermitianEigen::new(&t.generator_at(gens, time)?)?.exp_i_matrix(t.parameter)))
                .collect::<Result<_>>()
                .map(Unitaries::Sequence)
        } else {
            Ok(Unitaries::Fixed(
                HermitianEigen::new(&t.generator_at(gens, 0.0)?)?.exp_i_matrix(t.parameter),
            ))
        }
    }

    fn at(&self, k: usize) -> &Array2<C64> {
        match self {
            Unitaries::Fixed(u) => u,
            Unitaries::Sequence(us) => &us[k],
        }
    }
}

struct Transformed {
    times: Vec<f64>,
    dt: f64,
    unitaries: Unitaries,
    states: Vec<Array1<C64>>,
    max_phase_distance: f64,
}

fn transform_trajectory(gens: &GeneratorSet, t: &Transformation, traj: &Trajectory) -> Result<Transformed> {
    let points = traj.states.len();
    if points < 3 || traj.grid.points != points {
        return Err(Error::GridTooShort(points));
    }
    let times = traj.times();
    let unitaries = Unitaries::build(t, gens, &times)?;
    let mut states = Vec::with_capacity(points);
    let mut max_phase_distance: f64 = 0.0;
    for (k, psi) in traj.states.iter().enumerate() {
        let moved = unitaries.at(k).dot(psi.amplitudes());
        let moved_state = state_from(moved.clone())?;
        max_phase_distance = max_phase_distance.max(phase_distance(&moved_state, psi));
        states.push(moved);
    }
    Ok(Transformed {
        times,
        dt: traj.grid.step,
        unitaries,
        states,
        max_phase_distance,
    })
}

fn norm(v: &Array1<C64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn projected(r: &Array1<C64>, proj: Option<&Projector>) -> f64 {
    match proj {
        Some(p) => norm(&p.apply(r)),
        None => norm(r),
    }
}

fn finish(times: Vec<f64>, residuals: Vec<f64>, tol: f64, max_phase_distance: f64) -> LawCheck {
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    LawCheck {
        times,
        residuals,
        max_residual,
        tolerance: tol,
        verdict: Verdict::from_residual(max_residual, tol),
        max_phase_distance,
    }
}

/// Does `ψ'(t) = U(t)ψ(t)` solve the same law, `dψ'/dt + iHψ' = 0`?
/// Evaluated with central differences on the interior grid points. With
/// `proj` the residual vector is projected before its norm is taken.
pub fn check_law_invariance(
    gens: &GeneratorSet,
    t: &Transformation,
    traj: &Trajectory,
    tol: f64,
    proj: Option<&Projector>,
) -> Result<LawCheck> {
    let h = gens
        .hamiltonian
        .as_ref()
        .ok_or_else(|| Error::MissingGenerator("H".to_string()))?;
    let tr = transform_trajectory(gens, t, traj)?;
    let n = tr.states.len();
    let mut residuals = Vec::with_capacity(n - 2);
    for k in 1..n - 1 {
        let derivative = (&tr.states[k + 1] - &tr.states[k - 1]) / C64::new(2.0 * tr.dt, 0.0);
        let r = derivative + h.matrix().dot(&tr.states[k]) * I;
        residuals.push(projected(&r, proj));
    }
    Ok(finish(tr.times[1..n - 1].to_vec(), residuals, tol, tr.max_phase_distance))
}

/// Does `ψ'` solve the transformed law with the covariant derivative,
/// `dψ'/dt − U̇U†ψ' + iH'ψ' = 0` with `H' = UHU†`? `U̇` is a central
/// difference of the exponentiated `U(t_k)`.
pub fn check_law_covariance(
    gens: &GeneratorSet,
    t: &Transformation,
    traj: &Trajectory,
    tol: f64,
    proj: Option<&Projector>,
) -> Result<LawCheck> {
    let h = gens
        .hamiltonian
        .as_ref()
        .ok_or_else(|| Error::MissingGenerator("H".to_string()))?;
    let tr = transform_trajectory(gens, t, traj)?;
    let n = tr.states.len();
    let two_dt = C64::new(2.0 * tr.dt, 0.0);
    let mut residuals = Vec::with_capacity(n - 2);
    for k in 1..n - 1 {
        let u = tr.unitaries.at(k);
        let pulled_back = u.t().mapv(|z| z.conj()).dot(&tr.states[k]);
        let u_dot = (tr.unitaries.at(k + 1) - tr.unitaries.at(k - 1)) / two_dt;
        let connection = u_dot.dot(&pulled_back);
        let h_prime = u.dot(&h.matrix().dot(&pulled_back));
        let derivative = (&tr.states[k + 1] - &tr.states[k - 1]) / two_dt;
        let r = derivative - connection + h_prime * I;
        residuals.push(projected(&r, proj));
    }
    Ok(finish(tr.times[1..n - 1].to_vec(), residuals, tol, tr.max_phase_distance))
}
