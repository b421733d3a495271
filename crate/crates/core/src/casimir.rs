//! Casimir operators `M`, `S²`, `W = H − P²/2m` and the boost energy split.

use serde::{Deserialize, Serialize};

use crate::audit::Verdict;
use crate::error::{Error, Result};
use crate::linalg::{commutator, eigenvalues, projected_distance, HermitianEigen, Operator, Projector};
use crate::representations::{Axis, GeneratorSet, Representation};

/// Relative tolerance for reading a Casimir as a scalar multiple of `I`.
pub const SCALAR_LABEL_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CasimirLabels {
    pub mass: Option<f64>,
    pub spin_squared: Option<f64>,
    pub internal_energy: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct CasimirSet {
    pub mass: Operator,
    pub spin_squared: Option<Operator>,
    pub internal_energy: Operator,
    pub labels: CasimirLabels,
    /// False when an external potential makes `W` depend on absolute position.
    pub internal_energy_is_casimir: bool,
}

impl CasimirSet {
    pub fn named(&self) -> Vec<(&'static str, &Operator)> {
        let mut out = vec![("M", &self.mass)];
        if let Some(s2) = &self.spin_squared {
            out.push(("S2", s2));
        }
        out.push(("W", &self.internal_energy));
        out
    }
}

/// `c` when `‖C − cI‖_F ≤ 1e−8·‖C‖_F` with `c = tr C / n`.
pub fn scalar_label(c: &Operator) -> Option<f64> {
    let n = c.dim();
    let value = c.trace().re / n as f64;
    let norm = c.frobenius_norm();
    if norm == 0.0 {
        return Some(0.0);
    }
    let deviation = (c - &Operator::identity(n).scale_real(value)).frobenius_norm();
    (deviation <= SCALAR_LABEL_TOLERANCE * norm).then_some(value)
}

fn momentum_squared(gens: &GeneratorSet) -> Operator {
    gens.momentum
        .iter()
        .fold(Operator::zeros(gens.dim()), |acc, p| &acc + &(p * p))
}

/// `W = H − P²/2m` with the total mass.
pub fn internal_energy(gens: &GeneratorSet) -> Result<Operator> {
    let h = gens
        .hamiltonian
        .as_ref()
        .ok_or_else(|| Error::MissingGenerator("H".to_string()))?;
    let m = gens.mass.ok_or_else(|| Error::MissingGenerator("M".to_string()))?;
    (h - &momentum_squared(gens).scale_real(0.5 / m)).into_hermitian()
}

pub fn casimirs(rep: &Representation) -> Result<CasimirSet> {
    let gens = rep.generators();
    let mass = gens
        .mass_charge
        .clone()
        .ok_or_else(|| Error::MissingGenerator("M".to_string()))?;
    let internal = internal_energy(gens)?;
    let spin_squared = if rep.kind().has_rotations() {
        let s2 = rep
            .spin_components()
            .iter()
            .fold(Operator::zeros(rep.dim()), |acc, s| &acc + &(s * s));
        Some(s2.into_hermitian()?)
    } else {
        None
    };
    let labels = CasimirLabels {
        mass: scalar_label(&mass),
        spin_squared: spin_squared.as_ref().and_then(scalar_label),
        internal_energy: scalar_label(&internal),
    };
    Ok(CasimirSet {
        mass,
        spin_squared,
        internal_energy: internal,
        labels,
        internal_energy_is_casimir: rep.is_free(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommutatorEntry {
    pub left: String,
    pub right: String,
    pub residual: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
}

/// `‖Π[C, K]Π‖_F` for every Casimir `C` and every generator `K`.
pub fn check_casimir_invariance(
    cs: &CasimirSet,
    gens: &GeneratorSet,
    tol: f64,
    proj: &Projector,
) -> Result<Vec<CommutatorEntry>> {
    let mut out = Vec::new();
    for (cname, c) in cs.named() {
        for (gname, g) in gens.named() {
            let residual = proj.sandwich_norm(commutator(c, g)?.matrix());
            out.push(CommutatorEntry {
                left: cname.to_string(),
                right: gname,
                residual,
                tolerance: tol,
                verdict: Verdict::from_residual(residual, tol),
            });
        }
    }
    Ok(out)
}

/// Distinct values of an ascending list, merging neighbours closer than
/// `tol·max(1, |value|)`.
pub fn distinct_levels(sorted: &[f64], tol: f64) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for &v in sorted {
        match out.last() {
            Some(&last) if (v - last).abs() <= tol * last.abs().max(1.0) => {}
            _ => out.push(v),
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitIdentity {
    pub name: String,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KineticLabel {
    pub momentum: f64,
    pub before: f64,
    pub after: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoostSplit {
    pub velocity: f64,
    pub axis: Axis,
    /// Residuals of, in order: `H' = H + T_B`, `H' = K' + W`, `[K', W] = 0`,
    /// `UWU† = W`, all on the interior.
    pub identities: Vec<SplitIdentity>,
    /// Lowest eigenvalues of `H` and of `H'`; equal by similarity.
    pub spectrum_before: Vec<f64>,
    pub spectrum_after: Vec<f64>,
    /// Kinetic energy attached to a few momentum values, `p²/2m` before and
    /// `(p − mu)²/2m` after the boost.
    pub kinetic_labels: Vec<KineticLabel>,
}

impl BoostSplit {
    pub fn max_residual(&self) -> f64 {
        self.identities.iter().map(|i| i.residual).fold(0.0, f64::max)
    }
}

/// Largest dimension for which the side-by-side spectra are computed.
const SPECTRUM_DIM_LIMIT: usize = 512;
const SPECTRUM_COUNT: usize = 5;

/// Boost by `u` along `axis` and split the transformed Hamiltonian.
///
/// With `U = e^{iGu}` one has `UPU† = P − mu`, so `H' = H − uP + ½mu²`
/// and the boosted kinetic term is `K' = (P − mu)²/2m`.
pub fn boost_energy_split(rep: &Representation, axis: Axis, u: f64, proj: &Projector) -> Result<BoostSplit> {
    if !rep.is_free() {
        return Err(Error::NotFree);
    }
    let gens = rep.generators();
    let h = gens
        .hamiltonian
        .as_ref()
        .ok_or_else(|| Error::MissingGenerator("H".to_string()))?;
    let m = gens.mass.ok_or_else(|| Error::MissingGenerator("M".to_string()))?;
    let p = gens.momentum(axis).ok_or_else(|| Error::MissingGenerator(format!("P_{axis}")))?;
    let g = gens.boost(axis).ok_or_else(|| Error::MissingGenerator(format!("G_{axis}")))?;
    let dim = rep.dim();
    let ident = Operator::identity(dim);

    let unitary = HermitianEigen::new(g)?.exp_i(u)?;
    let conjugate = |o: &Operator| (&(&unitary * o) * &unitary.adjoint()).into_hermitian();
    let h_prime = conjugate(h)?;
    let w = internal_energy(gens)?;
    let w_prime = conjugate(&w)?;

    let t_b = &p.scale_real(-u) + &ident.scale_real(0.5 * m * u * u);
    let shifted = p - &ident.scale_real(m * u);
    let mut k_prime = &shifted * &shifted;
    for other in Axis::ALL.into_iter().filter(|&a| a != axis) {
        if let Some(q) = gens.momentum(other) {
            k_prime = &k_prime + &(q * q);
        }
    }
    let k_prime = k_prime.scale_real(0.5 / m);

    let identities = vec![
        SplitIdentity {
            name: "H' = H + T_B".to_string(),
            residual: projected_distance(&h_prime, &(h + &t_b), proj)?,
        },
        SplitIdentity {
            name: "H' = K' + W".to_string(),
            residual: projected_distance(&h_prime, &(&k_prime + &w), proj)?,
        },
        SplitIdentity {
            name: "[K', W] = 0".to_string(),
            residual: proj.sandwich_norm(commutator(&k_prime, &w)?.matrix()),
        },
        SplitIdentity {
            name: "W' = W".to_string(),
            residual: projected_distance(&w_prime, &w, proj)?,
        },
    ];

    let (spectrum_before, spectrum_after) = if dim <= SPECTRUM_DIM_LIMIT {
        let lowest = |o: &Operator| -> Result<Vec<f64>> {
            Ok(eigenvalues(o)?.into_iter().take(SPECTRUM_COUNT).collect())
        };
        (lowest(h)?, lowest(&h_prime)?)
    } else {
        (Vec::new(), Vec::new())
    };
    let kinetic_labels = [-1.0, -0.5, 0.0, 0.5, 1.0]
        .into_iter()
        .map(|momentum: f64| KineticLabel {
            momentum,
            before: momentum * momentum / (2.0 * m),
            after: (momentum - m * u).powi(2) / (2.0 * m),
        })
        .collect();

    Ok(BoostSplit {
        velocity: u,
        axis,
        identities,
        spectrum_before,
        spectrum_after,
        kinetic_labels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::representations::{build_particle_rep, build_spin_rep, compose_with_spin, Potential, Spin};

    #[test]
    fn free_particle_internal_energy_vanishes() {
        let rep = build_particle_rep(12, 1.5, Potential::None, 1).unwrap();
        let cs = casimirs(&rep).unwrap();
        assert_eq!(cs.internal_energy.frobenius_norm(), 0.0);
        assert_eq!(cs.labels.internal_energy, Some(0.0));
        assert_eq!(cs.labels.mass, Some(1.5));
        assert!(cs.spin_squared.is_none());
    }

    #[test]
    fn spin_half_composite_label() {
        let particle = build_particle_rep(2, 1.0, Potential::None, 3).unwrap();
        let spin = build_spin_rep(Spin::new(0.5).unwrap()).unwrap();
        let rep = compose_with_spin(&particle, &spin).unwrap();
        let cs = casimirs(&rep).unwrap();
        assert!((cs.labels.spin_squared.unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn potential_flags_internal_energy() {
        let rep = build_particle_rep(8, 1.0, Potential::Harmonic { omega: 1.0 }, 1).unwrap();
        let cs = casimirs(&rep).unwrap();
        assert!(!cs.internal_energy_is_casimir);
        assert!(cs.labels.internal_energy.is_none());
    }

    #[test]
    fn mass_commutes_exactly() {
        let rep = build_particle_rep(8, 1.0, Potential::None, 1).unwrap();
        let cs = casimirs(&rep).unwrap();
        let entries = check_casimir_invariance(&cs, rep.generators(), 1e-12, &Projector::identity(8)).unwrap();
        for e in entries.iter().filter(|e| e.left == "M") {
            assert_eq!(e.residual, 0.0);
        }
    }

    #[test]
    fn zero_velocity_split_is_exact() {
        let rep = build_particle_rep(16, 1.0, Potential::None, 1).unwrap();
        let split = boost_energy_split(&rep, Axis::X, 0.0, &rep.default_interior().unwrap()).unwrap();
        assert!(split.max_residual() < 1e-12, "{:?}", split.identities);
    }

    #[test]
    fn split_rejects_fields() {
        let rep = build_particle_rep(8, 1.0, Potential::Linear { force: 1.0 }, 1).unwrap();
        let proj = rep.default_interior().unwrap();
        assert_eq!(boost_energy_split(&rep, Axis::X, 0.1, &proj).unwrap_err(), Error::NotFree);
    }

    #[test]
    fn distinct_levels_merges_degeneracies() {
        let v = [0.5, 0.5 + 1e-12, 1.5, 1.5, 2.5];
        assert_eq!(distinct_levels(&v, 1e-9), vec![0.5, 1.5, 2.5]);
    }
}
