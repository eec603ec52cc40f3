//! Dense complex linear algebra for small operators.
//!
//! Everything in the library is a square complex matrix of dimension ≤ 16
//! (36 for the largest two-particle product space), so this module stays
//! deliberately minimal: products, Kronecker products, traces, and a cyclic
//! Jacobi eigensolver for Hermitian matrices. No sparse storage, no
//! non-Hermitian eigenproblems.

use crate::error::{Error, Result};
use crate::tol::{Tolerances, MAX_JACOBI_SWEEPS, MAX_KRON_DIM};

pub type Complex64 = num_complex::Complex<f64>;

pub const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const C_ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense square complex matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Build from row-major entries. Rejects non-square data and
    /// non-finite components.
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("matrix dimension must be ≥ 1".into()));
        }
        if data.len() != dim * dim {
            return Err(Error::DimMismatch(format!(
                "expected {} entries for a {dim}×{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        if data.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite("matrix entry"));
        }
        Ok(ComplexMatrix { dim, data })
    }

    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix {
            dim,
            data: vec![C_ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = C_ONE;
        }
        m
    }

    /// Diagonal matrix from real entries.
    pub fn from_diag(diag: &[f64]) -> Self {
        let dim = diag.len();
        let mut m = Self::zeros(dim);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * dim + i] = Complex64::new(d, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn add(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_same_dim(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(ComplexMatrix { dim: self.dim, data })
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_same_dim(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(ComplexMatrix { dim: self.dim, data })
    }

    pub fn scale(&self, factor: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn scale_re(&self, factor: f64) -> ComplexMatrix {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// Conjugate transpose A†.
    pub fn dagger(&self) -> ComplexMatrix {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    /// Standard matrix product.
    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_same_dim(other)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.data[i * n + k];
                if aik == C_ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += aik * other.data[k * n + j];
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product A·v.
    pub fn matvec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.dim {
            return Err(Error::DimMismatch(format!(
                "matrix dim {} vs vector length {}",
                self.dim,
                v.len()
            )));
        }
        let n = self.dim;
        let out = (0..n)
            .map(|i| {
                v.iter()
                    .zip(&self.data[i * n..(i + 1) * n])
                    .map(|(x, a)| a * x)
                    .sum()
            })
            .collect();
        Ok(out)
    }

    /// Kronecker product A ⊗ B with result index (i·dim_b + k, j·dim_b + l).
    pub fn kron(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = self.dim * other.dim;
        if n > MAX_KRON_DIM {
            return Err(Error::InvalidArgument(format!(
                "Kronecker product dimension {n} exceeds cap {MAX_KRON_DIM}"
            )));
        }
        let (na, nb) = (self.dim, other.dim);
        let mut out = Self::zeros(n);
        for i in 0..na {
            for j in 0..na {
                let aij = self.data[i * na + j];
                if aij == C_ZERO {
                    continue;
                }
                for k in 0..nb {
                    for l in 0..nb {
                        out.data[(i * nb + k) * n + (j * nb + l)] = aij * other.data[k * nb + l];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Sum of the diagonal.
    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    /// Tr[A·B] evaluated without forming the product.
    pub fn trace_product(&self, other: &ComplexMatrix) -> Result<Complex64> {
        self.check_same_dim(other)?;
        let n = self.dim;
        let mut acc = C_ZERO;
        for i in 0..n {
            for j in 0..n {
                acc += self.data[i * n + j] * other.data[j * n + i];
            }
        }
        Ok(acc)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise |A − A†|.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..=i {
                let d = (self.data[i * n + j] - self.data[j * n + i].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Largest entrywise |A − B|.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn check_same_dim(&self, other: &ComplexMatrix) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch(format!(
                "{}×{0} vs {}×{1}",
                self.dim, other.dim
            )));
        }
        Ok(())
    }

    /// Hermitian eigendecomposition with default tolerances.
    pub fn eigh(&self) -> Result<EigenSystem> {
        self.eigh_with(&Tolerances::default())
    }

    /// Hermitian eigendecomposition by cyclic Jacobi rotations.
    ///
    /// Eigenvalues are returned ascending; eigenvectors are the columns of a
    /// unitary matrix, each with its largest-magnitude component made real
    /// and positive (ties broken by lowest index) so that identical inputs
    /// give bitwise-identical output.
    pub fn eigh_with(&self, tol: &Tolerances) -> Result<EigenSystem> {
        let dev = self.hermiticity_deviation();
        if dev > tol.hermiticity {
            return Err(Error::NotHermitian {
                deviation: dev,
                tol: tol.hermiticity,
            });
        }

        let n = self.dim;
        let mut a = self.clone();
        // Force exact Hermitian symmetry so rotations see consistent data.
        for i in 0..n {
            a.data[i * n + i] = Complex64::new(a.data[i * n + i].re, 0.0);
            for j in 0..i {
                let avg = (a.data[i * n + j] + a.data[j * n + i].conj()) * 0.5;
                a.data[i * n + j] = avg;
                a.data[j * n + i] = avg.conj();
            }
        }
        let mut v = ComplexMatrix::identity(n);

        let scale = self.frobenius_norm().max(f64::MIN_POSITIVE);
        let stop = 1e-14 * scale;

        let mut converged = false;
        for _ in 0..MAX_JACOBI_SWEEPS {
            let mut off = 0.0f64;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a.data[p * n + q].norm_sqr();
                }
            }
            if off.sqrt() <= stop {
                converged = true;
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    jacobi_rotate(&mut a, &mut v, p, q);
                }
            }
        }
        if !converged {
            // One last check: the final sweep may have finished the job.
            let mut off = 0.0f64;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a.data[p * n + q].norm_sqr();
                }
            }
            if off.sqrt() > stop {
                return Err(Error::NoConvergence(MAX_JACOBI_SWEEPS));
            }
        }

        // Sort eigenpairs ascending by eigenvalue; stable order keeps the
        // result deterministic for degenerate spectra.
        let mut order: Vec<usize> = (0..n).collect();
        let diag: Vec<f64> = (0..n).map(|i| a.data[i * n + i].re).collect();
        order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).expect("finite eigenvalues"));

        let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
        let mut vecs = ComplexMatrix::zeros(n);
        for (new_col, &old_col) in order.iter().enumerate() {
            // Phase convention: largest-magnitude component real-positive.
            let mut best = 0usize;
            let mut best_mag = 0.0f64;
            for row in 0..n {
                let mag = v.data[row * n + old_col].norm();
                if mag > best_mag {
                    best_mag = mag;
                    best = row;
                }
            }
            let pivot = v.data[best * n + old_col];
            let phase = if best_mag > 0.0 {
                pivot.conj() / best_mag
            } else {
                C_ONE
            };
            for row in 0..n {
                vecs.data[row * n + new_col] = v.data[row * n + old_col] * phase;
            }
        }

        Ok(EigenSystem {
            eigenvalues,
            eigenvectors: vecs,
        })
    }
}

/// Annihilate the (p, q) off-diagonal entry of Hermitian `a` by a complex
/// Jacobi rotation, accumulating the rotation into `v`.
fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let n = a.dim;
    let apq = a.data[p * n + q];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r; // e^{iα}
    let app = a.data[p * n + p].re;
    let aqq = a.data[q * n + q].re;

    // Annihilation condition r·(c² − s²) + (aqq − app)·c·s = 0, i.e.
    // t² − 2τ·t − 1 = 0 with t = s/c; take the smaller root for stability.
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        -1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let sp = phase * s; // s·e^{iα}
    // Column update: A ← A·W with W[p,p]=c, W[q,p]=s·e^{-iα}, W[p,q]=-s·e^{iα}, W[q,q]=c.
    for k in 0..n {
        let akp = a.data[k * n + p];
        let akq = a.data[k * n + q];
        a.data[k * n + p] = akp * c + akq * sp.conj();
        a.data[k * n + q] = akq * c - akp * sp;
    }
    // Row update: A ← W†·A.
    for k in 0..n {
        let apk = a.data[p * n + k];
        let aqk = a.data[q * n + k];
        a.data[p * n + k] = apk * c + aqk * sp;
        a.data[q * n + k] = aqk * c - apk * sp.conj();
    }
    // Clean the annihilated pair and keep the diagonal exactly real.
    a.data[p * n + q] = C_ZERO;
    a.data[q * n + p] = C_ZERO;
    a.data[p * n + p] = Complex64::new(a.data[p * n + p].re, 0.0);
    a.data[q * n + q] = Complex64::new(a.data[q * n + q].re, 0.0);

    for k in 0..n {
        let vkp = v.data[k * n + p];
        let vkq = v.data[k * n + q];
        v.data[k * n + p] = vkp * c + vkq * sp.conj();
        v.data[k * n + q] = vkq * c - vkp * sp;
    }
}

/// Result of a Hermitian eigendecomposition.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
}

impl EigenSystem {
    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Unitary matrix whose k-th column is the k-th eigenvector.
    pub fn eigenvector_matrix(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// k-th eigenvector as an owned column.
    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        let n = self.dim();
        (0..n).map(|row| self.eigenvectors.get(row, k)).collect()
    }

    /// Rank-one projector v_k v_k†.
    pub fn projector(&self, k: usize) -> ComplexMatrix {
        let n = self.dim();
        let v = self.eigenvector(k);
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, v[i] * v[j].conj());
            }
        }
        out
    }

    /// Σ λ_k v_k v_k†, for residual checks.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut out = ComplexMatrix::zeros(n);
        for k in 0..n {
            let p = self.projector(k).scale_re(self.eigenvalues[k]);
            out = out.add(&p).expect("same dim");
        }
        out
    }

    /// Group eigenvalues within `degeneracy_tol` of each other and return
    /// one (mean eigenvalue, eigenspace projector) pair per group.
    pub fn eigenspace_projectors(&self, degeneracy_tol: f64) -> Vec<(f64, ComplexMatrix)> {
        let n = self.dim();
        let mut out = Vec::new();
        let mut k = 0;
        while k < n {
            let mut end = k + 1;
            while end < n && (self.eigenvalues[end] - self.eigenvalues[end - 1]).abs() <= degeneracy_tol {
                end += 1;
            }
            let mut proj = ComplexMatrix::zeros(n);
            let mut mean = 0.0;
            for idx in k..end {
                proj = proj.add(&self.projector(idx)).expect("same dim");
                mean += self.eigenvalues[idx];
            }
            mean /= (end - k) as f64;
            out.push((mean, proj));
            k = end;
        }
        out
    }
}
