use super::matrix::{ComplexMatrix, C64};
use crate::error::{contract, Error, Result};

/// Default relative cutoff separating numerically-zero singular values.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Relative Frobenius residual above which a factorization is reported as a
/// numeric failure instead of being returned.
const RECONSTRUCTION_TOL: f64 = 1e-10;

/// Moduli within this relative distance of the maximum count as ties when
/// choosing the phase-reference entry of a singular vector.
const PHASE_TIE_TOL: f64 = 1e-9;

/// Thin singular value decomposition `m = u · diag(s) · v_dagger`.
#[derive(Clone, Debug)]
pub struct SvdResult {
    pub u: ComplexMatrix,
    pub s: Vec<f64>,
    pub v_dagger: ComplexMatrix,
    pub numerical_rank: usize,
}

impl SvdResult {
    /// Keeps the leading `k` singular triplets.
    pub fn truncated(&self, k: usize) -> SvdResult {
        let k = k.min(self.s.len());
        SvdResult {
            u: self.u.submatrix(0, 0, self.u.rows(), k),
            s: self.s[..k].to_vec(),
            v_dagger: self.v_dagger.submatrix(0, 0, k, self.v_dagger.cols()),
            numerical_rank: self.numerical_rank.min(k),
        }
    }

    /// `diag(s) · v_dagger`, the factor pushed to the neighbouring site
    /// during a sweep.
    pub fn s_vdagger(&self) -> ComplexMatrix {
        let mut out = self.v_dagger.clone();
        for (r, &s) in self.s.iter().enumerate() {
            for c in 0..out.cols() {
                out[(r, c)] *= s;
            }
        }
        out
    }

    /// `u · diag(s)`.
    pub fn u_s(&self) -> ComplexMatrix {
        let mut out = self.u.clone();
        for r in 0..out.rows() {
            for (c, &s) in self.s.iter().enumerate() {
                out[(r, c)] *= s;
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.u_s().matmul(&self.v_dagger)
    }
}

/// Thin SVD with singular values sorted descending. `numerical_rank` counts
/// values above `rank_tol · s[0]`.
///
/// Each left singular vector is rotated so that its first entry of largest
/// modulus is real and positive, with the matching right vector rotated the
/// opposite way. This fixes the phase freedom of the factorization.
pub fn svd(m: &ComplexMatrix, rank_tol: f64) -> Result<SvdResult> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return contract("svd of an empty matrix");
    }
    if !m.is_finite() {
        return contract("svd input has non-finite entries");
    }
    if !(rank_tol >= 0.0) {
        return contract(format!("rank tolerance must be nonnegative, got {rank_tol}"));
    }

    let fm = faer::Mat::<C64>::from_fn(rows, cols, |r, c| m[(r, c)]);
    let dec = fm.thin_svd().map_err(|e| {
        Error::Numeric(format!("SVD of a {rows}x{cols} matrix did not converge: {e:?}"))
    })?;
    let k = rows.min(cols);
    let s: Vec<f64> = (0..k).map(|i| dec.S()[i].re).collect();
    let mut u = ComplexMatrix::from_fn(rows, k, |r, c| dec.U()[(r, c)]);
    let mut v_dagger = ComplexMatrix::from_fn(k, cols, |r, c| dec.V()[(c, r)].conj());
    if !u.is_finite() || !v_dagger.is_finite() || s.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numeric("SVD produced non-finite factors".into()));
    }

    for c in 0..k {
        let phase = phase_reference(&u.column(c));
        for r in 0..rows {
            u[(r, c)] *= phase;
        }
        let back = phase.conj();
        for cc in 0..cols {
            v_dagger[(c, cc)] *= back;
        }
    }

    let numerical_rank = numerical_rank(&s, rank_tol);
    let out = SvdResult {
        u,
        s,
        v_dagger,
        numerical_rank,
    };
    let scale = m.frobenius_norm();
    let residual = out.reconstruct().sub(m).frobenius_norm();
    if residual > RECONSTRUCTION_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Numeric(format!(
            "SVD of a {rows}x{cols} matrix reconstructs with residual {residual:e}"
        )));
    }
    Ok(out)
}

/// Number of entries of a descending list above `rank_tol` times the first.
pub fn numerical_rank(s: &[f64], rank_tol: f64) -> usize {
    match s.first() {
        Some(&top) if top > 0.0 => s.iter().take_while(|&&x| x > rank_tol * top).count(),
        _ => 0,
    }
}

/// Unit-modulus factor that makes the first entry of (near-)maximal modulus
/// real positive.
fn phase_reference(v: &[C64]) -> C64 {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return C64::new(1.0, 0.0);
    }
    let pivot = v
        .iter()
        .find(|z| z.norm() >= max * (1.0 - PHASE_TIE_TOL))
        .copied()
        .unwrap_or(C64::new(1.0, 0.0));
    pivot.conj() / pivot.norm()
}

/// Largest singular value.
pub fn spectral_norm(m: &ComplexMatrix) -> Result<f64> {
    if m.rows() == 0 || m.cols() == 0 {
        return Ok(0.0);
    }
    Ok(svd(m, 0.0)?.s[0])
}
