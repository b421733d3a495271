//! Commutants over the real vector space of Hermitian matrices and the
//! definite-valued-observable sets built from them.

use nalgebra::DMatrix;
use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::casimir::casimirs;
use crate::error::{Error, Result};
use crate::linalg::{Operator, C64};
use crate::representations::{Axis, Representation};

/// Largest `dim²` accepted by the vectorized nullspace solve.
pub const COMMUTANT_BUDGET: usize = 16384;

/// Singular values below this fraction of `max(σ_max, 1)` count as zero.
pub const NULLSPACE_THRESHOLD: f64 = 1e-9;

/// Element `α` of the trace-orthonormal basis of `n×n` Hermitian matrices,
/// as a list of (row, column, value) entries: `E_aa`, then
/// `(E_ab + E_ba)/√2` and `i(E_ab − E_ba)/√2` for `a < b`.
fn hermitian_basis_element(n: usize, alpha: usize) -> Vec<(usize, usize, C64)> {
    if alpha < n {
        return vec![(alpha, alpha, C64::new(1.0, 0.0))];
    }
    let off = alpha - n;
    let pair = off / 2;
    let (mut a, mut rest) = (0, pair);
    while rest >= n - 1 - a {
        rest -= n - 1 - a;
        a += 1;
    }
    let b = a + 1 + rest;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    if off % 2 == 0 {
        vec![(a, b, C64::new(h, 0.0)), (b, a, C64::new(h, 0.0))]
    } else {
        vec![(a, b, C64::new(0.0, h)), (b, a, C64::new(0.0, -h))]
    }
}

/// Operator from real coordinates in the Hermitian basis.
fn from_coordinates(n: usize, coords: &[f64]) -> Array2<C64> {
    let mut m = Array2::zeros((n, n));
    for (alpha, &c) in coords.iter().enumerate() {
        if c != 0.0 {
            for (r, col, v) in hermitian_basis_element(n, alpha) {
                m[[r, col]] += v * c;
            }
        }
    }
    m
}

/// Real matrix of `X ↦ [X, C]` with `X` in the Hermitian basis: column `α`
/// holds the real and imaginary parts of `[B_α, C]`.
fn commutator_map(c: &Array2<C64>) -> DMatrix<f64> {
    let n = c.nrows();
    let mut map = DMatrix::zeros(2 * n * n, n * n);
    let mut buf = Array2::<C64>::zeros((n, n));
    for alpha in 0..n * n {
        buf.fill(C64::new(0.0, 0.0));
        for (r, col, v) in hermitian_basis_element(n, alpha) {
            // E_{r,col} C puts row `col` of C into row `r`; C E_{r,col}
            // puts column `r` of C into column `col`.
            for j in 0..n {
                buf[[r, j]] += v * c[[col, j]];
                buf[[j, col]] -= v * c[[j, r]];
            }
        }
        for (k, z) in buf.iter().enumerate() {
            map[(2 * k, alpha)] = z.re;
            map[(2 * k + 1, alpha)] = z.im;
        }
    }
    map
}

/// A trace-orthonormal basis of Hermitian operators spanning a real subspace.
#[derive(Clone, Debug)]
pub struct ObservableBasis {
    dim: usize,
    members: Vec<Operator>,
}

impl ObservableBasis {
    /// Hilbert-space dimension of the members.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Real dimension of the span.
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Operator] {
        &self.members
    }

    /// `‖O − proj(O)‖_F / ‖O‖_F` for the orthogonal projection onto the span.
    pub fn projection_residual(&self, o: &Operator) -> Result<f64> {
        if o.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: o.dim(),
            });
        }
        let norm = o.frobenius_norm();
        if norm == 0.0 {
            return Ok(0.0);
        }
        let mut rest = o.matrix().clone();
        for b in &self.members {
            let c = b.trace_inner(o);
            rest.scaled_add(-c, b.matrix());
        }
        Ok(rest.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() / norm)
    }
}

/// Hermitian `X` with `[X, C] = 0` for every `C` in `ops`.
///
/// Each `C` is scaled to unit Frobenius norm. The stacked real maps are
/// compressed with QR as they are added, and the nullspace is read from the
/// singular values below `1e−9·max(σ_max, 1)`. The floor keeps an operator
/// that is a multiple of `I` up to rounding from splitting the space.
pub fn commutant_basis(ops: &[Operator]) -> Result<ObservableBasis> {
    let first = ops.first().ok_or(Error::InvalidParameter {
        name: "ops",
        reason: "need at least one operator".to_string(),
    })?;
    let n = first.dim();
    for op in ops {
        if op.dim() != n {
            return Err(Error::DimensionMismatch {
                left: n,
                right: op.dim(),
            });
        }
    }
    let params = n * n;
    if params > COMMUTANT_BUDGET {
        return Err(Error::DimensionBudget {
            required: params,
            budget: COMMUTANT_BUDGET,
        });
    }

    let mut stacked: Option<DMatrix<f64>> = None;
    for op in ops {
        let norm = op.frobenius_norm();
        if norm == 0.0 {
            continue;
        }
        let block = commutator_map(&(op.matrix() / C64::new(norm, 0.0)));
        let combined = match stacked.take() {
            None => block,
            Some(prev) => {
                let mut both = DMatrix::zeros(prev.nrows() + block.nrows(), params);
                both.rows_mut(0, prev.nrows()).copy_from(&prev);
                both.rows_mut(prev.nrows(), block.nrows()).copy_from(&block);
                both
            }
        };
        stacked = Some(if combined.nrows() > params {
            combined.qr().r()
        } else {
            combined
        });
    }

    let null: Vec<Vec<f64>> = match stacked {
        None => (0..params)
            .map(|alpha| {
                let mut v = vec![0.0; params];
                v[alpha] = 1.0;
                v
            })
            .collect(),
        Some(a) => {
            let svd = a
                .try_svd(false, true, f64::EPSILON, 0)
                .ok_or_else(|| Error::Decomposition("SVD did not converge".to_string()))?;
            let vt = svd.v_t.expect("right singular vectors requested");
            let sigma = svd.singular_values;
            let sigma_max = sigma.iter().copied().fold(0.0, f64::max);
            let cutoff = NULLSPACE_THRESHOLD * sigma_max.max(1.0);
            (0..vt.nrows())
                .filter(|&k| sigma[k] <= cutoff)
                .map(|k| vt.row(k).iter().copied().collect())
                .collect()
        }
    };

    let members = null
        .into_iter()
        .map(|v| {
            let m = from_coordinates(n, &v);
            let norm = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            Operator::hermitian(m / C64::new(norm, 0.0))
        })
        .collect::<Result<_>>()?;
    Ok(ObservableBasis { dim: n, members })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub observable: String,
    pub commutant_residual: f64,
    pub invariant_residual: f64,
    pub in_commutant: bool,
    pub in_invariant_subset: bool,
}

#[derive(Clone, Debug)]
pub struct DvoSet {
    /// Everything commuting with the Casimirs.
    pub commutant: ObservableBasis,
    /// Everything commuting with all generators and the mass.
    pub invariant_subset: ObservableBasis,
    pub memberships: Vec<Membership>,
}

/// Both readings of "commutes with the Casimirs and shares their symmetry":
/// the commutant of `{M, S², W}` and the commutant of every generator.
/// Membership of `H`, `P_x`, `S_z` and `W` is decided at `tol`.
pub fn dvo_set(rep: &Representation, tol: f64) -> Result<DvoSet> {
    if !rep.is_free() {
        return Err(Error::NotFree);
    }
    let cs = casimirs(rep)?;
    let casimir_ops: Vec<Operator> = cs.named().into_iter().map(|(_, c)| c.clone()).collect();
    let commutant = commutant_basis(&casimir_ops)?;
    let gens = rep.generators();
    let generator_ops: Vec<Operator> = gens.named().into_iter().map(|(_, g)| g.clone()).collect();
    let invariant_subset = commutant_basis(&generator_ops)?;

    let mut candidates: Vec<(String, Operator)> = Vec::new();
    if let Some(h) = &gens.hamiltonian {
        candidates.push(("H".to_string(), h.clone()));
    }
    if let Some(p) = gens.momentum(Axis::X) {
        candidates.push(("P_x".to_string(), p.clone()));
    }
    if let Some(sz) = rep.spin_components().get(Axis::Z.index()) {
        if sz.frobenius_norm() > 0.0 {
            candidates.push(("S_z".to_string(), sz.clone()));
        }
    }
    candidates.push(("W".to_string(), cs.internal_energy.clone()));

    let memberships = candidates
        .into_iter()
        .map(|(name, op)| {
            let commutant_residual = commutant.projection_residual(&op)?;
            let invariant_residual = invariant_subset.projection_residual(&op)?;
            Ok(Membership {
                observable: name,
                commutant_residual,
                invariant_residual,
                in_commutant: commutant_residual <= tol,
                in_invariant_subset: invariant_residual <= tol,
            })
        })
        .collect::<Result<_>>()?;
    Ok(DvoSet {
        commutant,
        invariant_subset,
        memberships,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ONE, ZERO};

    #[test]
    fn basis_is_trace_orthonormal() {
        let n = 4;
        let ops: Vec<Array2<C64>> = (0..n * n)
            .map(|a| {
                let mut e = vec![0.0; n * n];
                e[a] = 1.0;
                from_coordinates(n, &e)
            })
            .collect();
        for (a, x) in ops.iter().enumerate() {
            for (b, y) in ops.iter().enumerate() {
                let ip: C64 = x.iter().zip(y.iter()).map(|(p, q)| p.conj() * q).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((ip - C64::new(want, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn diagonal_commutant_beyond_small_sizes() {
        let values: Vec<f64> = (0..16).map(f64::from).collect();
        let b = commutant_basis(&[Operator::diagonal(&values)]).unwrap();
        assert_eq!(b.len(), 16);
    }

    #[test]
    fn identity_commutant_is_everything() {
        let b = commutant_basis(&[Operator::identity(3)]).unwrap();
        assert_eq!(b.len(), 9);
    }

    #[test]
    fn diagonal_commutant() {
        let b = commutant_basis(&[Operator::diagonal(&[1.0, 2.0, 3.0])]).unwrap();
        assert_eq!(b.len(), 3);
    }

    #[test]
    fn pauli_pair_commutant_is_scalars() {
        let sz = Operator::diagonal(&[1.0, -1.0]);
        let sx = Operator::hermitian(ndarray::array![[ZERO, ONE], [ONE, ZERO]]).unwrap();
        let b = commutant_basis(&[sz.clone(), sx]).unwrap();
        assert_eq!(b.len(), 1);
        assert!(b.projection_residual(&Operator::identity(2)).unwrap() < 1e-12);
        assert!((b.projection_residual(&sz).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn budget_is_enforced() {
        let big = Operator::identity(129);
        assert!(matches!(commutant_basis(&[big]), Err(Error::DimensionBudget { .. })));
    }
}
