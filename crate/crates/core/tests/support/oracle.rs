//! Exhaustive commutant dimension: solves `X = X†`, `[X, C] = 0` directly
//! over the `2n²` real and imaginary entries of `X` by Gaussian elimination
//! with full pivoting. Shares no code with the vectorized nullspace path.

#![allow(dead_code)]

use galilean_core::linalg::{unitary_exp, Operator, C64};
use ndarray::{array, Array2};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const PIVOT_THRESHOLD: f64 = 1e-9;

fn re(n: usize, i: usize, j: usize) -> usize {
    i * n + j
}

fn im(n: usize, i: usize, j: usize) -> usize {
    n * n + i * n + j
}

/// Real linear constraints on the entries of `X`, one row each.
fn constraints(n: usize, ops: &[Operator]) -> Vec<Vec<f64>> {
    let unknowns = 2 * n * n;
    let mut rows = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let mut a = vec![0.0; unknowns];
            a[re(n, i, j)] += 1.0;
            a[re(n, j, i)] -= 1.0;
            rows.push(a);
            let mut b = vec![0.0; unknowns];
            b[im(n, i, j)] += 1.0;
            b[im(n, j, i)] += 1.0;
            rows.push(b);
        }
    }
    for op in ops {
        let c = op.matrix();
        for i in 0..n {
            for j in 0..n {
                // ([X, C])_ij = Σ_k X_ik C_kj − C_ik X_kj, split into parts.
                let mut real = vec![0.0; unknowns];
                let mut imag = vec![0.0; unknowns];
                for k in 0..n {
                    let ckj = c[[k, j]];
                    real[re(n, i, k)] += ckj.re;
                    real[im(n, i, k)] -= ckj.im;
                    imag[re(n, i, k)] += ckj.im;
                    imag[im(n, i, k)] += ckj.re;
                    let cik = c[[i, k]];
                    real[re(n, k, j)] -= cik.re;
                    real[im(n, k, j)] += cik.im;
                    imag[re(n, k, j)] -= cik.im;
                    imag[im(n, k, j)] -= cik.re;
                }
                rows.push(real);
                rows.push(imag);
            }
        }
    }
    rows
}

fn rank(mut rows: Vec<Vec<f64>>) -> usize {
    let scale = rows
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0_f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return 0;
    }
    let cols = rows[0].len();
    let mut col_used = vec![false; cols];
    let mut r = 0;
    while r < rows.len() {
        let mut best = (0.0, 0, 0);
        for (ri, row) in rows.iter().enumerate().skip(r) {
            for (ci, &x) in row.iter().enumerate() {
                if !col_used[ci] && x.abs() > best.0 {
                    best = (x.abs(), ri, ci);
                }
            }
        }
        if best.0 <= PIVOT_THRESHOLD * scale {
            break;
        }
        let (_, pr, pc) = best;
        rows.swap(r, pr);
        col_used[pc] = true;
        let pivot = rows[r].clone();
        for row in rows.iter_mut().skip(r + 1) {
            let f = row[pc] / pivot[pc];
            if f != 0.0 {
                for (x, p) in row.iter_mut().zip(&pivot) {
                    *x -= f * p;
                }
            }
        }
        r += 1;
    }
    r
}

/// Real dimension of the Hermitian commutant of `ops`.
pub fn exhaustive_commutant_dim(ops: &[Operator]) -> usize {
    let n = ops[0].dim();
    2 * n * n - rank(constraints(n, ops))
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `{I₃}`, `{diag(1,2,3)}` and `{σ_z, σ_x}`.
pub fn bundled_sets() -> Vec<(&'static str, Vec<Operator>)> {
    let sz = Operator::diagonal(&[1.0, -1.0]);
    let sx = Operator::hermitian(array![[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]).unwrap();
    vec![
        ("identity", vec![Operator::identity(3)]),
        ("diag(1,2,3)", vec![Operator::diagonal(&[1.0, 2.0, 3.0])]),
        ("pauli z,x", vec![sz, sx]),
    ]
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> Operator {
    let m = Array2::from_shape_fn((n, n), |_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    symmetrized(m)
}

/// `U diag(levels) U†` for a random unitary, so degeneracies survive.
pub fn rotated_spectrum(rng: &mut ChaCha8Rng, levels: &[f64]) -> Operator {
    let u = unitary_exp(&random_hermitian(rng, levels.len()), 1.0).unwrap();
    let d = Operator::diagonal(levels);
    symmetrized(u.matrix().dot(d.matrix()).dot(&u.adjoint().into_matrix()))
}

fn symmetrized(m: Array2<C64>) -> Operator {
    let adj = m.t().mapv(|z| z.conj());
    Operator::hermitian((&m + &adj) / C64::new(2.0, 0.0)).unwrap()
}

/// The small-dimension sweep shared by the oracle tests: for each `n ≤ max_dim`
/// one and two random operators plus rotated degenerate spectra.
pub fn random_sets(rng: &mut ChaCha8Rng, max_dim: usize) -> Vec<(String, Vec<Operator>)> {
    let mut sets = Vec::new();
    for n in 1..=max_dim {
        for trial in 0..6 {
            let ops = match trial {
                0 => vec![random_hermitian(rng, n)],
                1 => vec![random_hermitian(rng, n), random_hermitian(rng, n)],
                _ => {
                    let levels: Vec<f64> = (0..n).map(|_| f64::from(rng.gen_range(0..3))).collect();
                    let mut ops = vec![rotated_spectrum(rng, &levels)];
                    if trial == 5 {
                        ops.push(Operator::identity(n));
                    }
                    ops
                }
            };
            sets.push((format!("n = {n}, trial = {trial}"), ops));
        }
    }
    sets
}
