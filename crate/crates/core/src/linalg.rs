//! Dense complex matrix kernel.
//!
//! Everything in this crate is built from square complex matrices of modest
//! size (a few thousand rows at most), so storage is dense throughout.
//! Residuals are measured in the Frobenius norm, which also bounds the
//! spectral norm from above.
//!
//! Hermitian and unitary flags are never trusted: they are only set by
//! constructors that measure the defect against `1e-12 · dim`.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::{Array1, Array2, Axis as NdAxis};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Absolute tolerance used when validating Hermitian/unitary flags.
pub fn structural_tolerance(dim: usize) -> f64 {
    1e-12 * dim as f64
}

fn frobenius(m: &Array2<C64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn hermitian_defect(m: &Array2<C64>) -> f64 {
    let n = m.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += (m[[i, j]] - m[[j, i]].conj()).norm_sqr();
        }
    }
    acc.sqrt()
}

fn adjoint(m: &Array2<C64>) -> Array2<C64> {
    m.t().mapv(|z| z.conj())
}

/// A dense square complex matrix with validated structure flags.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    matrix: Array2<C64>,
    hermitian: bool,
    unitary: bool,
}

impl Operator {
    /// Wraps a square matrix without asserting any structure.
    pub fn new(matrix: Array2<C64>) -> Result<Self> {
        let (rows, cols) = matrix.dim();
        if rows != cols || rows == 0 {
            return Err(Error::NotSquare { rows, cols });
        }
        Ok(Self {
            matrix,
            hermitian: false,
            unitary: false,
        })
    }

    /// Wraps a matrix and validates `‖A − A†‖_F ≤ 1e-12 · dim`.
    pub fn hermitian(matrix: Array2<C64>) -> Result<Self> {
        let mut op = Self::new(matrix)?;
        let defect = hermitian_defect(&op.matrix);
        let tolerance = structural_tolerance(op.dim());
        if defect > tolerance {
            return Err(Error::NotHermitian { defect, tolerance });
        }
        op.hermitian = true;
        Ok(op)
    }

    /// Wraps a matrix and validates `‖U†U − I‖_F ≤ 1e-12 · dim`.
    pub fn unitary(matrix: Array2<C64>) -> Result<Self> {
        let mut op = Self::new(matrix)?;
        let defect = op.unitarity_defect();
        let tolerance = structural_tolerance(op.dim());
        if defect > tolerance {
            return Err(Error::NotUnitary { defect, tolerance });
        }
        op.unitary = true;
        Ok(op)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: Array2::eye(dim),
            hermitian: true,
            unitary: true,
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: Array2::zeros((dim, dim)),
            hermitian: true,
            unitary: false,
        }
    }

    /// Real diagonal matrix.
    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        let mut matrix = Array2::zeros((n, n));
        for (i, &v) in values.iter().enumerate() {
            matrix[[i, i]] = C64::new(v, 0.0);
        }
        Self {
            matrix,
            hermitian: true,
            unitary: values.iter().all(|v| (v.abs() - 1.0).abs() == 0.0),
        }
    }

    /// Re-validates the Hermitian flag, e.g. after arithmetic.
    pub fn into_hermitian(self) -> Result<Self> {
        if self.hermitian {
            return Ok(self);
        }
        Self::hermitian(self.matrix)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.matrix
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius(&self.matrix)
    }

    pub fn trace(&self) -> C64 {
        self.matrix.diag().sum()
    }

    pub fn hermitian_defect(&self) -> f64 {
        hermitian_defect(&self.matrix)
    }

    pub fn unitarity_defect(&self) -> f64 {
        let mut prod = adjoint(&self.matrix).dot(&self.matrix);
        for i in 0..prod.nrows() {
            prod[[i, i]] -= ONE;
        }
        frobenius(&prod)
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: adjoint(&self.matrix),
            hermitian: self.hermitian,
            unitary: self.unitary,
        }
    }

    /// True when every imaginary part is exactly zero.
    pub fn is_real(&self) -> bool {
        self.matrix.iter().all(|z| z.im == 0.0)
    }

    pub fn scale(&self, factor: C64) -> Self {
        let real = factor.im == 0.0;
        Self {
            matrix: &self.matrix * factor,
            hermitian: self.hermitian && real,
            unitary: false,
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    pub fn apply(&self, psi: &StateVector) -> Array1<C64> {
        self.matrix.dot(psi.amplitudes())
    }

    /// `⟨ψ|A|ψ⟩`.
    pub fn expectation(&self, psi: &StateVector) -> C64 {
        psi.amplitudes()
            .iter()
            .zip(self.apply(psi).iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    fn check_dims(&self, other: &Operator) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    pub fn checked_mul(&self, other: &Operator) -> Result<Operator> {
        self.check_dims(other)?;
        Ok(self * other)
    }

    pub fn checked_sub(&self, other: &Operator) -> Result<Operator> {
        self.check_dims(other)?;
        Ok(self - other)
    }

    pub fn checked_add(&self, other: &Operator) -> Result<Operator> {
        self.check_dims(other)?;
        Ok(self + other)
    }

    /// Hilbert–Schmidt inner product `tr(A†B)`.
    pub fn trace_inner(&self, other: &Operator) -> C64 {
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

// Operator arithmetic panics on dimension mismatch, like ndarray does; the
// `checked_*` methods and the free functions below return errors instead.

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        Operator {
            matrix: &self.matrix + &rhs.matrix,
            hermitian: false,
            unitary: false,
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        Operator {
            matrix: &self.matrix - &rhs.matrix,
            hermitian: false,
            unitary: false,
        }
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        Operator {
            matrix: matmul(&self.matrix, &rhs.matrix),
            hermitian: false,
            unitary: false,
        }
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        Operator {
            matrix: self.matrix.mapv(|z| -z),
            hermitian: self.hermitian,
            unitary: self.unitary,
        }
    }
}

/// A normalized state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Array1<C64>,
}

impl StateVector {
    /// Normalizes the given amplitudes.
    pub fn new(amplitudes: Array1<C64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::ZeroState);
        }
        Ok(Self {
            amplitudes: amplitudes.mapv(|z| z / norm),
        })
    }

    /// Accepts amplitudes that are already normalized to 1e-12.
    pub fn from_normalized(amplitudes: Array1<C64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amplitudes })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = Array1::zeros(dim);
        amplitudes[index] = ONE;
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &Array1<C64> {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn kron(&self, other: &StateVector) -> StateVector {
        let mut amplitudes = Array1::zeros(self.dim() * other.dim());
        for (i, a) in self.amplitudes.iter().enumerate() {
            for (k, b) in other.amplitudes.iter().enumerate() {
                amplitudes[i * other.dim() + k] = a * b;
            }
        }
        StateVector { amplitudes }
    }

    pub fn scale_phase(&self, theta: f64) -> StateVector {
        let phase = C64::from_polar(1.0, theta);
        StateVector {
            amplitudes: self.amplitudes.mapv(|z| z * phase),
        }
    }
}

/// Orthogonal projector onto a coordinate subspace, stored as a 0/1 mask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projector {
    mask: Vec<bool>,
}

impl Projector {
    pub fn identity(dim: usize) -> Self {
        Self {
            mask: vec![true; dim],
        }
    }

    pub fn from_mask(mask: Vec<bool>) -> Self {
        Self { mask }
    }

    /// Tensor product of per-factor masks, first factor slowest.
    pub fn tensor(factors: &[Vec<bool>]) -> Self {
        let mut mask = vec![true];
        for factor in factors {
            let mut next = Vec::with_capacity(mask.len() * factor.len());
            for &a in &mask {
                for &b in factor {
                    next.push(a && b);
                }
            }
            mask = next;
        }
        Self { mask }
    }

    pub fn dim(&self) -> usize {
        self.mask.len()
    }

    pub fn rank(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn as_operator(&self) -> Operator {
        let values: Vec<f64> = self.mask.iter().map(|&b| f64::from(u8::from(b))).collect();
        Operator::diagonal(&values)
    }

    /// `Π M Π` as a matrix.
    pub fn sandwich(&self, m: &Array2<C64>) -> Array2<C64> {
        let mut out = m.clone();
        for (i, mut row) in out.axis_iter_mut(NdAxis(0)).enumerate() {
            for (j, z) in row.iter_mut().enumerate() {
                if !(self.mask[i] && self.mask[j]) {
                    *z = ZERO;
                }
            }
        }
        out
    }

    /// `‖Π M Π‖_F` without forming the product.
    pub fn sandwich_norm(&self, m: &Array2<C64>) -> f64 {
        let mut acc = 0.0;
        for (i, row) in m.axis_iter(NdAxis(0)).enumerate() {
            if !self.mask[i] {
                continue;
            }
            for (j, z) in row.iter().enumerate() {
                if self.mask[j] {
                    acc += z.norm_sqr();
                }
            }
        }
        acc.sqrt()
    }

    pub fn apply(&self, v: &Array1<C64>) -> Array1<C64> {
        let mut out = v.clone();
        for (z, &keep) in out.iter_mut().zip(&self.mask) {
            if !keep {
                *z = ZERO;
            }
        }
        out
    }

    /// `‖Πψ‖²`, the weight of a state inside the projected subspace.
    pub fn weight(&self, psi: &StateVector) -> f64 {
        psi.amplitudes()
            .iter()
            .zip(&self.mask)
            .filter(|(_, &keep)| keep)
            .map(|(z, _)| z.norm_sqr())
            .sum()
    }
}

/// Kronecker product; row index of the result is `i·dim(B) + k`.
pub fn kron(a: &Operator, b: &Operator) -> Operator {
    let (na, nb) = (a.dim(), b.dim());
    let mut matrix = Array2::zeros((na * nb, na * nb));
    for i in 0..na {
        for j in 0..na {
            let aij = a.matrix[[i, j]];
            if aij == ZERO {
                continue;
            }
            for k in 0..nb {
                for l in 0..nb {
                    matrix[[i * nb + k, j * nb + l]] = aij * b.matrix[[k, l]];
                }
            }
        }
    }
    let mut out = Operator {
        matrix,
        hermitian: false,
        unitary: false,
    };
    if a.hermitian && b.hermitian {
        out.hermitian = out.hermitian_defect() <= structural_tolerance(out.dim());
    }
    out
}

/// A factor with fewer nonzero entries than this fraction is applied entry
/// by entry instead of through the dense kernel.
const SPARSE_FRACTION: f64 = 0.05;

fn is_sparse(m: &Array2<C64>) -> bool {
    let nonzero = m.iter().filter(|z| **z != ZERO).count();
    (nonzero as f64) < SPARSE_FRACTION * m.len() as f64
}

/// `AB`. Ladder-built generators are mostly zeros, so a sparse factor is
/// scattered row by row (left) or column by column (right).
pub fn matmul(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    if is_sparse(a) {
        let mut out = Array2::zeros((a.nrows(), b.ncols()));
        for ((i, k), &x) in a.indexed_iter() {
            if x != ZERO {
                out.row_mut(i).scaled_add(x, &b.row(k));
            }
        }
        out
    } else if is_sparse(b) {
        let mut out = Array2::zeros((a.nrows(), b.ncols()));
        for ((k, j), &x) in b.indexed_iter() {
            if x != ZERO {
                out.column_mut(j).scaled_add(x, &a.column(k));
            }
        }
        out
    } else {
        a.dot(b)
    }
}

/// `AB − BA`.
pub fn commutator(a: &Operator, b: &Operator) -> Result<Operator> {
    a.check_dims(b)?;
    let mut matrix = matmul(&a.matrix, &b.matrix);
    matrix -= &matmul(&b.matrix, &a.matrix);
    Ok(Operator {
        matrix,
        hermitian: false,
        unitary: false,
    })
}

/// Eigendecomposition `K = V diag(λ) V†` of a Hermitian operator, kept around
/// so that `e^{iKs}` can be evaluated for many parameters.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    values: Array1<f64>,
    vectors: Array2<C64>,
}

impl HermitianEigen {
    pub fn new(k: &Operator) -> Result<Self> {
        if !k.is_hermitian() {
            return Err(Error::NotHermitian {
                defect: k.hermitian_defect(),
                tolerance: structural_tolerance(k.dim()),
            });
        }
        let n = k.dim();
        let not_converged = || Error::Decomposition("Hermitian eigensolver did not converge".to_string());
        let (values, vectors) = if k.is_real() {
            let real = DMatrix::from_fn(n, n, |i, j| k.matrix[[i, j]].re);
            let eig = SymmetricEigen::try_new(real, f64::EPSILON, 0).ok_or_else(not_converged)?;
            let order = ascending_order(eig.eigenvalues.as_slice());
            (
                Array1::from_iter(order.iter().map(|&i| eig.eigenvalues[i])),
                Array2::from_shape_fn((n, n), |(r, c)| C64::new(eig.eigenvectors[(r, order[c])], 0.0)),
            )
        } else {
            let eig = SymmetricEigen::try_new(to_dense(&k.matrix), f64::EPSILON, 0).ok_or_else(not_converged)?;
            let order = ascending_order(eig.eigenvalues.as_slice());
            (
                Array1::from_iter(order.iter().map(|&i| eig.eigenvalues[i])),
                Array2::from_shape_fn((n, n), |(r, c)| eig.eigenvectors[(r, order[c])]),
            )
        };
        Ok(Self { values, vectors })
    }

    /// Ascending eigenvalues.
    pub fn values(&self) -> &Array1<f64> {
        &self.values
    }

    pub fn vectors(&self) -> &Array2<C64> {
        &self.vectors
    }

    /// `e^{iKs}` as a matrix.
    pub fn exp_i_matrix(&self, s: f64) -> Array2<C64> {
        let mut scaled = self.vectors.clone();
        for (j, mut col) in scaled.axis_iter_mut(NdAxis(1)).enumerate() {
            let phase = C64::from_polar(1.0, self.values[j] * s);
            col.mapv_inplace(|z| z * phase);
        }
        scaled.dot(&adjoint(&self.vectors))
    }

    /// `e^{iKs}` with its unitary flag validated.
    pub fn exp_i(&self, s: f64) -> Result<Operator> {
        Operator::unitary(self.exp_i_matrix(s))
    }

    /// `e^{iKs} v` without forming the matrix.
    pub fn apply_exp_i(&self, s: f64, v: &Array1<C64>) -> Array1<C64> {
        let mut coeffs = adjoint(&self.vectors).dot(v);
        for (c, &lambda) in coeffs.iter_mut().zip(self.values.iter()) {
            *c *= C64::from_polar(1.0, lambda * s);
        }
        self.vectors.dot(&coeffs)
    }
}

/// `e^{iKs}` for Hermitian `K`, computed by eigendecomposition.
pub fn unitary_exp(k: &Operator, s: f64) -> Result<Operator> {
    HermitianEigen::new(k)?.exp_i(s)
}

/// Ascending eigenvalues of a Hermitian operator; uses the real symmetric
/// solver when every entry is real.
pub fn eigenvalues(op: &Operator) -> Result<Vec<f64>> {
    if !op.is_hermitian() {
        return Err(Error::NotHermitian {
            defect: op.hermitian_defect(),
            tolerance: structural_tolerance(op.dim()),
        });
    }
    let n = op.dim();
    let mut values: Vec<f64> = if op.is_real() {
        DMatrix::from_fn(n, n, |i, j| op.matrix[[i, j]].re)
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect()
    } else {
        to_dense(&op.matrix).symmetric_eigenvalues().iter().copied().collect()
    };
    values.sort_by(f64::total_cmp);
    Ok(values)
}

fn to_dense(m: &Array2<C64>) -> DMatrix<C64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[[i, j]])
}

fn ascending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    order
}

/// `min_θ ‖ψ − e^{iθ}φ‖₂`, i.e. `sqrt(2 − 2|⟨ψ|φ⟩|)` for normalized states.
///
/// Evaluated as an explicit vector difference at the optimal phase, which
/// stays accurate near zero where the closed form loses half its digits.
///
/// Panics if the dimensions differ.
pub fn phase_distance(psi: &StateVector, phi: &StateVector) -> f64 {
    assert_eq!(psi.dim(), phi.dim(), "phase_distance: dimension mismatch");
    let overlap = phi.inner(psi);
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        ONE
    };
    psi.amplitudes()
        .iter()
        .zip(phi.amplitudes().iter())
        .map(|(a, b)| (a - phase * b).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// `‖Π(A − B)Π‖_F`.
pub fn projected_distance(a: &Operator, b: &Operator, proj: &Projector) -> Result<f64> {
    a.check_dims(b)?;
    if proj.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: proj.dim(),
        });
    }
    Ok(proj.sandwich_norm(&(&a.matrix - &b.matrix)))
}

/// `‖Π M Π‖_F` for an operator.
pub fn projected_norm(m: &Operator, proj: &Projector) -> f64 {
    proj.sandwich_norm(&m.matrix)
}
