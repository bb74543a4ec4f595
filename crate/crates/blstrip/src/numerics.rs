//! Dense linear-algebra kernels shared by the whole crate.
//!
//! Everything here is a thin, contract-checked layer over LAPACK: Hermitian
//! eigendecomposition, thin QR with a fixed sign gauge, and small-matrix
//! unitary exponentials. The QR gauge (real, nonnegative diagonal of R) makes
//! the block-Lanczos coupling blocks reproducible across platforms.

use ndarray::prelude::*;
use ndarray_linalg::{Eigh, QR, UPLO};
use num_complex::Complex64 as C64;
use thiserror::Error;

pub type CMat = Array2<C64>;
pub type RMat = Array2<f64>;

/// Largest matrix `unitary_exp` accepts. Two-site gates on capped bosonic
/// modes stay well under this.
pub const MAX_GATE_DIM: usize = 64;

/// Relative threshold below which an R-diagonal entry counts as rank
/// deficient.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("matrix is not Hermitian: max asymmetry {asymmetry:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { asymmetry: f64, tol: f64 },
    #[error("LAPACK call failed: {0}")]
    LapackFailed(String),
    #[error("thin QR requires rows >= cols, got {rows}x{cols}")]
    NotThin { rows: usize, cols: usize },
    #[error("gate dimension {dim} exceeds cap {max}")]
    GateTooLarge { dim: usize, max: usize },
}

/// Eigendecomposition of a Hermitian matrix; eigenvalues ascending,
/// eigenvectors as orthonormal columns.
pub struct EighResult {
    pub eigenvalues: Array1<f64>,
    pub eigenvectors: CMat,
}

/// Same as [`EighResult`] for real symmetric input.
pub struct SymEigResult {
    pub eigenvalues: Array1<f64>,
    pub eigenvectors: RMat,
}

/// Outcome of a thin QR factorization A = Q R.
///
/// `deficient_cols` lists columns whose R diagonal fell below
/// `RANK_TOL * ||A||_F`; the caller decides whether to deflate or abort.
pub struct QrResult<M> {
    pub q: M,
    pub r: M,
    pub deficient_cols: Vec<usize>,
}

pub fn frob_norm(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn frob_norm_real(a: &RMat) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Hermitian eigendecomposition with an explicit Hermiticity check.
///
/// Rejects inputs whose asymmetry max |A_ij - conj(A_ji)| exceeds
/// `1e-12 * max(||A||_F, 1)`.
pub fn hermitian_eig(a: &CMat) -> Result<EighResult, NumericsError> {
    let tol = 1e-12 * frob_norm(a).max(1.0);
    let mut asym: f64 = 0.0;
    for i in 0..a.nrows() {
        for j in i..a.ncols() {
            asym = asym.max((a[[i, j]] - a[[j, i]].conj()).norm());
        }
    }
    if asym > tol {
        return Err(NumericsError::NotHermitian { asymmetry: asym, tol });
    }
    let (vals, vecs) = a
        .eigh(UPLO::Lower)
        .map_err(|e| NumericsError::LapackFailed(e.to_string()))?;
    Ok(EighResult { eigenvalues: vals, eigenvectors: vecs })
}

/// Real symmetric eigendecomposition (used on the bath, whose Hamiltonian and
/// symmetry-adapted blocks are real).
pub fn sym_eig(a: &RMat) -> Result<SymEigResult, NumericsError> {
    let tol = 1e-12 * frob_norm_real(a).max(1.0);
    let mut asym: f64 = 0.0;
    for i in 0..a.nrows() {
        for j in i..a.ncols() {
            asym = asym.max((a[[i, j]] - a[[j, i]]).abs());
        }
    }
    if asym > tol {
        return Err(NumericsError::NotHermitian { asymmetry: asym, tol });
    }
    let (vals, vecs) = a
        .eigh(UPLO::Lower)
        .map_err(|e| NumericsError::LapackFailed(e.to_string()))?;
    Ok(SymEigResult { eigenvalues: vals, eigenvectors: vecs })
}

/// Thin QR of an n x k matrix (n >= k) with the R diagonal rephased to be
/// real and nonnegative.
pub fn thin_qr(a: &CMat) -> Result<QrResult<CMat>, NumericsError> {
    let (n, k) = a.dim();
    if n < k {
        return Err(NumericsError::NotThin { rows: n, cols: k });
    }
    let (mut q, mut r) = a
        .qr()
        .map_err(|e| NumericsError::LapackFailed(e.to_string()))?;
    // Fix the gauge: multiply column j of Q by the phase of R_jj and row j of
    // R by its conjugate, leaving Q R unchanged.
    let scale = frob_norm(a);
    let mut deficient = Vec::new();
    for j in 0..k {
        let d = r[[j, j]];
        if d.norm() <= RANK_TOL * scale {
            deficient.push(j);
            continue;
        }
        let phase = d / d.norm();
        for x in q.column_mut(j) {
            *x *= phase;
        }
        let ph_conj = phase.conj();
        for x in r.row_mut(j) {
            *x *= ph_conj;
        }
        r[[j, j]] = C64::new(r[[j, j]].re, 0.0);
    }
    Ok(QrResult { q, r, deficient_cols: deficient })
}

/// Real thin QR with nonnegative R diagonal.
pub fn thin_qr_real(a: &RMat) -> Result<QrResult<RMat>, NumericsError> {
    let (n, k) = a.dim();
    if n < k {
        return Err(NumericsError::NotThin { rows: n, cols: k });
    }
    let (mut q, mut r) = a
        .qr()
        .map_err(|e| NumericsError::LapackFailed(e.to_string()))?;
    let scale = frob_norm_real(a);
    let mut deficient = Vec::new();
    for j in 0..k {
        let d = r[[j, j]];
        if d.abs() <= RANK_TOL * scale {
            deficient.push(j);
            continue;
        }
        if d < 0.0 {
            for x in q.column_mut(j) {
                *x = -*x;
            }
            for x in r.row_mut(j) {
                *x = -*x;
            }
        }
    }
    Ok(QrResult { q, r, deficient_cols: deficient })
}

/// exp(-i H t) for a small Hermitian H, computed through its
/// eigendecomposition. The result is unitary to machine precision.
pub fn unitary_exp(h: &CMat, t: f64) -> Result<CMat, NumericsError> {
    let dim = h.nrows();
    if dim > MAX_GATE_DIM {
        return Err(NumericsError::GateTooLarge { dim, max: MAX_GATE_DIM });
    }
    let eig = hermitian_eig(h)?;
    let phases: Array1<C64> = eig
        .eigenvalues
        .iter()
        .map(|&e| (C64::new(0.0, -e * t)).exp())
        .collect();
    // V diag(e^{-i e t}) V^dagger
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, mut col) in scaled.columns_mut().into_iter().enumerate() {
        let p = phases[j];
        for x in col.iter_mut() {
            *x *= p;
        }
    }
    Ok(scaled.dot(&dagger(v)))
}

pub fn dagger(a: &CMat) -> CMat {
    a.t().mapv(|z| z.conj())
}

pub fn to_complex(a: &RMat) -> CMat {
    a.mapv(|x| C64::new(x, 0.0))
}

/// max |A - I| over all entries, for unitarity checks.
pub fn max_dev_from_identity(a: &CMat) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            let target = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            dev = dev.max((a[[i, j]] - target).norm());
        }
    }
    dev
}
