//! Complex-matrix numerical kernel: Hermitian eigendecomposition, SVD, and
//! log-det capacity evaluation for small matrices (dimension up to ~32).
//!
//! The eigensolver is a cyclic Jacobi iteration with complex rotations; the
//! SVD is derived from the Hermitian eigendecomposition of the smaller Gram
//! matrix. Both converge to machine precision on the matrix sizes used here.

use ndarray::{Array1, Array2};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::real::Real;

/// Complex matrix with `Real` scalar components.
pub type CMatrix<F> = Array2<Complex<F>>;

/// Maximum Jacobi sweeps; quadratic convergence makes this generous.
const MAX_SWEEPS: usize = 64;

/// Conjugate transpose.
pub fn adjoint<F: Real>(a: &CMatrix<F>) -> CMatrix<F> {
    a.t().mapv(|z| z.conj())
}

/// True when every entry is finite.
pub fn all_finite<F: Real>(a: &CMatrix<F>) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Frobenius norm.
pub fn fro_norm<F: Real>(a: &CMatrix<F>) -> F {
    a.iter()
        .fold(F::zero(), |acc, z| acc + z.norm_sqr())
        .sqrt()
}

/// Hermitian eigendecomposition `A = V diag(values) V^H`.
///
/// Eigenvalues are real and sorted in non-increasing order; the columns of
/// `vectors` are the matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct HermitianEigen<F: Real> {
    pub values: Array1<F>,
    pub vectors: CMatrix<F>,
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// The input is treated as `(A + A^H)/2`, so tiny rounding asymmetry in a
/// numerically-built Gram matrix is harmless. Non-square or non-finite
/// input is rejected.
pub fn hermitian_eigen<F: Real>(a: &CMatrix<F>) -> Result<HermitianEigen<F>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::ShapeMismatch(format!(
            "hermitian_eigen needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if !all_finite(a) {
        return Err(Error::NonFinite);
    }

    // Symmetrized working copy.
    let mut m = CMatrix::<F>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            let z = (a[[i, j]] + a[[j, i]].conj()).unscale(F::of(2.0));
            m[[i, j]] = z;
        }
    }
    let mut v = CMatrix::<F>::eye(n);

    let scale = fro_norm(&m);
    if scale == F::zero() {
        return Ok(sorted_eigen(m, v));
    }
    let stop_tol = scale * F::epsilon() * F::of(4.0);
    let rot_tol = scale * F::epsilon() * F::of(0.1);

    for _ in 0..MAX_SWEEPS {
        let mut off_sq = F::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off_sq += m[[p, q]].norm_sqr();
            }
        }
        if (off_sq + off_sq).sqrt() <= stop_tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut m, &mut v, p, q, rot_tol);
            }
        }
    }

    Ok(sorted_eigen(m, v))
}

/// One complex Jacobi rotation annihilating the (p, q) entry.
fn jacobi_rotate<F: Real>(m: &mut CMatrix<F>, v: &mut CMatrix<F>, p: usize, q: usize, tol: F) {
    let apq = m[[p, q]];
    let r = apq.norm();
    if r <= tol {
        return;
    }
    let phase = apq.unscale(r);
    let app = m[[p, p]].re;
    let aqq = m[[q, q]].re;

    // Small-magnitude root of t^2 - 2*theta*t - 1 = 0 with
    // theta = (aqq - app) / (2r); gives the rotation closest to identity.
    let theta = (aqq - app) / (r + r);
    let root = (theta * theta + F::one()).sqrt();
    let t = if theta >= F::zero() {
        -(F::one() / (theta + root))
    } else {
        F::one() / (root - theta)
    };
    let c = F::one() / (t * t + F::one()).sqrt();
    let s = t * c;

    let n = m.nrows();
    // Columns: M <- M R with R[p,p]=c, R[p,q]=-phase*s, R[q,p]=conj(phase)*s, R[q,q]=c.
    for k in 0..n {
        let mp = m[[k, p]];
        let mq = m[[k, q]];
        m[[k, p]] = mp * c + mq * phase.conj() * s;
        m[[k, q]] = mq * c - mp * phase * s;
    }
    // Rows: M <- R^H M.
    for k in 0..n {
        let rp = m[[p, k]];
        let rq = m[[q, k]];
        m[[p, k]] = rp * c + rq * phase * s;
        m[[q, k]] = rq * c - rp * phase.conj() * s;
    }
    m[[p, q]] = Complex::new(F::zero(), F::zero());
    m[[q, p]] = Complex::new(F::zero(), F::zero());
    m[[p, p]] = Complex::new(m[[p, p]].re, F::zero());
    m[[q, q]] = Complex::new(m[[q, q]].re, F::zero());

    // Accumulate the eigenvector basis.
    for k in 0..v.nrows() {
        let vp = v[[k, p]];
        let vq = v[[k, q]];
        v[[k, p]] = vp * c + vq * phase.conj() * s;
        v[[k, q]] = vq * c - vp * phase * s;
    }
}

fn sorted_eigen<F: Real>(m: CMatrix<F>, v: CMatrix<F>) -> HermitianEigen<F> {
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[[j, j]].re.partial_cmp(&m[[i, i]].re).unwrap());

    let mut values = Array1::zeros(n);
    let mut vectors = CMatrix::<F>::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        values[dst] = m[[src, src]].re;
        for k in 0..n {
            vectors[[k, dst]] = v[[k, src]];
        }
    }
    HermitianEigen { values, vectors }
}

/// Singular value decomposition `H = left diag(values) right^H` (thin form).
///
/// `values` are non-negative and non-increasing; `left` is `m x k` and
/// `right` is `n x k` with `k = min(m, n)`, both with orthonormal columns.
#[derive(Debug, Clone)]
pub struct Svd<F: Real> {
    pub left: CMatrix<F>,
    pub values: Array1<F>,
    pub right: CMatrix<F>,
}

/// Thin SVD computed from the eigendecomposition of the smaller Gram matrix.
///
/// Singular values whose square falls at the eigensolver's noise floor are
/// flushed to exact zero and their paired vectors replaced by an orthonormal
/// completion, so rank-deficient matrices reconstruct cleanly.
pub fn svd<F: Real>(h: &CMatrix<F>) -> Result<Svd<F>> {
    let (m, n) = (h.nrows(), h.ncols());
    if m == 0 || n == 0 {
        return Err(Error::InvalidInput("svd of an empty matrix".into()));
    }
    if !all_finite(h) {
        return Err(Error::NonFinite);
    }
    let k = m.min(n);
    let hh = adjoint(h);

    if m <= n {
        // Eigenbasis of H H^H gives the left vectors.
        let eig = hermitian_eigen(&h.dot(&hh))?;
        let (values, cutoff) = singular_values(&eig.values, k);
        let left = eig.vectors;
        let mut right = CMatrix::<F>::zeros((n, k));
        for j in 0..k {
            if values[j] > cutoff {
                let col = hh.dot(&left.column(j).to_owned()).mapv(|z| z.unscale(values[j]));
                right.column_mut(j).assign(&col);
            } else {
                complete_column(&mut right, j);
            }
        }
        Ok(Svd { left: left.slice(ndarray::s![.., ..k]).to_owned(), values, right })
    } else {
        let eig = hermitian_eigen(&hh.dot(h))?;
        let (values, cutoff) = singular_values(&eig.values, k);
        let right = eig.vectors;
        let mut left = CMatrix::<F>::zeros((m, k));
        for j in 0..k {
            if values[j] > cutoff {
                let col = h.dot(&right.column(j).to_owned()).mapv(|z| z.unscale(values[j]));
                left.column_mut(j).assign(&col);
            } else {
                complete_column(&mut left, j);
            }
        }
        Ok(Svd { left, values, right: right.slice(ndarray::s![.., ..k]).to_owned() })
    }
}

/// Square roots of the leading `k` Gram eigenvalues plus the zero cutoff.
///
/// The Gram route squares the condition number, so singular values below
/// sqrt(eps) of the largest carry no reliable direction information.
fn singular_values<F: Real>(gram_eigs: &Array1<F>, k: usize) -> (Array1<F>, F) {
    let mut values = Array1::zeros(k);
    for j in 0..k {
        values[j] = gram_eigs[j].max(F::zero()).sqrt();
    }
    let cutoff = values[0] * F::epsilon().sqrt() * F::of(8.0);
    for j in 0..k {
        if values[j] <= cutoff {
            values[j] = F::zero();
        }
    }
    (values, cutoff)
}

/// Fill column `j` with a unit vector orthonormal to columns `0..j`.
fn complete_column<F: Real>(mat: &mut CMatrix<F>, j: usize) {
    let rows = mat.nrows();
    for cand in 0..rows {
        let mut col: Vec<Complex<F>> = vec![Complex::new(F::zero(), F::zero()); rows];
        col[cand] = Complex::new(F::one(), F::zero());
        // Project out the existing columns.
        for prev in 0..j {
            let mut dot = Complex::new(F::zero(), F::zero());
            for r in 0..rows {
                dot = dot + mat[[r, prev]].conj() * col[r];
            }
            for r in 0..rows {
                col[r] = col[r] - mat[[r, prev]] * dot;
            }
        }
        let norm = col
            .iter()
            .fold(F::zero(), |acc, z| acc + z.norm_sqr())
            .sqrt();
        if norm > F::of(0.5) {
            for r in 0..rows {
                mat[[r, j]] = col[r].unscale(norm);
            }
            return;
        }
    }
    // Unreachable for j < rows: some canonical vector always survives.
}

/// Non-negative eigenvalues of `M^H M` (equivalently the nonzero spectrum of
/// `M M^H`), computed on the smaller Gram side and sorted non-increasing.
pub fn gram_eigenvalues<F: Real>(m: &CMatrix<F>) -> Result<Array1<F>> {
    if !all_finite(m) {
        return Err(Error::NonFinite);
    }
    let mh = adjoint(m);
    let gram = if m.nrows() <= m.ncols() {
        m.dot(&mh)
    } else {
        mh.dot(m)
    };
    let eig = hermitian_eigen(&gram)?;
    Ok(eig.values.mapv(|x| x.max(F::zero())))
}

/// MIMO log-det capacity `log2 |I + snr_scale * M M^H|` in bits/s/Hz.
///
/// Evaluated as the sum of `log2(1 + snr_scale * lambda_i)` over the Gram
/// eigenvalues, which keeps the computation Hermitian-symmetric.
pub fn logdet_capacity<F: Real>(m: &CMatrix<F>, snr_scale: F) -> Result<F> {
    if !(snr_scale >= F::zero()) {
        return Err(Error::InvalidInput(format!(
            "snr_scale must be non-negative, got {snr_scale}"
        )));
    }
    let eigs = gram_eigenvalues(m)?;
    Ok(eigs
        .iter()
        .fold(F::zero(), |acc, &l| acc + (F::one() + snr_scale * l).log2()))
}
