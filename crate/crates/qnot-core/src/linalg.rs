//! Small dense complex linear algebra: square matrices, Haar-random
//! unitaries, and a Jacobi eigensolver for Hermitian matrices.
//!
//! Everything in this crate works on matrices no larger than a few thousand
//! rows, so the implementations favour transparency over blocking tricks.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Square complex matrix in row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Shape(format!("expected a {dim}x{dim} matrix")));
        }
        Ok(CMatrix {
            dim,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim, "matrix-vector dimension mismatch");
        let mut out = vec![ZERO; self.dim];
        for (i, out_i) in out.iter_mut().enumerate() {
            let row = &self.data[i * self.dim..(i + 1) * self.dim];
            let mut acc = ZERO;
            for (a, b) in row.iter().zip(v) {
                acc += a * b;
            }
            *out_i = acc;
        }
        out
    }

    pub fn mul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix-matrix dimension mismatch");
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                if aik == ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += aik * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> CMatrix {
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// max |(U†U − I)_{ij}|; zero for a perfect unitary.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut acc = ZERO;
                for k in 0..n {
                    acc += self[(k, i)].conj() * self[(k, j)];
                }
                if i == j {
                    acc -= ONE;
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    /// max |(A − A†)_{ij}|.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..=i {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn kron(&self, rhs: &CMatrix) -> CMatrix {
        let (n, m) = (self.dim, rhs.dim);
        let mut out = CMatrix::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let aij = self[(i, j)];
                if aij == ZERO {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        out[(i * m + k, j * m + l)] = aij * rhs[(k, l)];
                    }
                }
            }
        }
        out
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Haar-distributed unitary from QR of a complex Gaussian matrix.
///
/// Modified Gram-Schmidt with a second orthogonalization pass; the implicit
/// R factor then has a positive real diagonal, which is exactly the phase
/// normalization the Haar measure requires.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    assert!(dim >= 1);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    for _ in 0..dim {
        cols.push(
            (0..dim)
                .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect(),
        );
    }
    let mut q: Vec<Vec<C64>> = Vec::with_capacity(dim);
    for col in cols.iter() {
        let mut v = col.clone();
        for _ in 0..2 {
            for basis in &q {
                let proj = inner(basis, &v);
                for (vi, bi) in v.iter_mut().zip(basis) {
                    *vi -= proj * bi;
                }
            }
        }
        let n = norm_sqr(&v).sqrt();
        assert!(n > 1e-300, "degenerate Gaussian draw");
        for vi in v.iter_mut() {
            *vi /= n;
        }
        q.push(v);
    }
    let mut m = CMatrix::zeros(dim);
    for (j, col) in q.iter().enumerate() {
        for (i, z) in col.iter().enumerate() {
            m[(i, j)] = *z;
        }
    }
    m
}

const JACOBI_MAX_SWEEPS: usize = 120;

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order and the matching eigenvectors as
/// matrix columns. `hermiticity_tol` guards the input; the iteration itself
/// runs to rounding level.
pub fn hermitian_eigen(m: &CMatrix, hermiticity_tol: f64) -> Result<(Vec<f64>, CMatrix)> {
    let dim = m.dim();
    if m.hermiticity_defect() > hermiticity_tol {
        return Err(Error::Validation(format!(
            "matrix is not Hermitian within {hermiticity_tol:e}"
        )));
    }
    let mut a = m.clone();
    // fold in the adjoint so tiny asymmetries cannot bias the iteration
    for i in 0..dim {
        for j in 0..dim {
            let avg = 0.5 * (a[(i, j)] + a[(j, i)].conj());
            a[(i, j)] = avg;
        }
    }
    let mut v = CMatrix::identity(dim);
    let scale = a.max_abs().max(1.0);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0f64;
        for i in 0..dim {
            for j in (i + 1)..dim {
                off = off.max(a[(i, j)].norm());
            }
        }
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..dim {
            for q in (p + 1)..dim {
                jacobi_rotate(&mut a, &mut v, p, q, scale);
            }
        }
    }

    let mut order: Vec<usize> = (0..dim).collect();
    let eigs: Vec<f64> = (0..dim).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| eigs[j].partial_cmp(&eigs[i]).unwrap());
    let sorted: Vec<f64> = order.iter().map(|&i| eigs[i]).collect();
    let mut vectors = CMatrix::zeros(dim);
    for (new_col, &old_col) in order.iter().enumerate() {
        for i in 0..dim {
            vectors[(i, new_col)] = v[(i, old_col)];
        }
    }
    Ok((sorted, vectors))
}

fn jacobi_rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize, scale: f64) {
    let dim = a.dim();
    let apq = a[(p, q)];
    let r = apq.norm();
    if r <= 1e-18 * scale {
        a[(p, q)] = ZERO;
        a[(q, p)] = ZERO;
        return;
    }
    let phase = apq / r;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // A <- A G with G = [[c, s e^{i phi}], [-s e^{-i phi}, c]] on (p, q)
    for i in 0..dim {
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = c * aip - s * phase.conj() * aiq;
        a[(i, q)] = s * phase * aip + c * aiq;
    }
    // A <- G† A
    for j in 0..dim {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = c * apj - s * phase * aqj;
        a[(q, j)] = s * phase.conj() * apj + c * aqj;
    }
    // V <- V G
    for i in 0..dim {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = c * vip - s * phase.conj() * viq;
        v[(i, q)] = s * phase * vip + c * viq;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
}
