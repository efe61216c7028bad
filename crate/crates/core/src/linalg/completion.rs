use super::matrix::{inner, vec_norm, ComplexMatrix, C64, ONE, ZERO};
use super::svd::svd;
use crate::error::{contract, Result};

/// Columns whose Gram matrix deviates from the identity by more than this
/// (Frobenius norm) are rejected by [`complete_to_unitary`].
pub const ORTHONORMAL_TOL: f64 = 1e-10;

/// Candidate basis vectors shorter than this after projection are skipped.
const SKIP_NORM: f64 = 1e-8;

/// Extends `cols` (d×k, orthonormal columns) to a d×d unitary whose first `k`
/// columns are `cols` verbatim.
///
/// The remaining columns come from projecting the standard basis vectors,
/// in index order, onto the orthogonal complement of what has been
/// collected so far and normalizing the ones that survive.
pub fn complete_to_unitary(cols: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (d, k) = cols.shape();
    if k > d {
        return contract(format!("cannot complete {k} columns in dimension {d}"));
    }
    let residual = cols.gram_residual();
    if !(residual < ORTHONORMAL_TOL) {
        return contract(format!(
            "columns are not orthonormal: Gram residual {residual:.3e} exceeds {ORTHONORMAL_TOL:.0e}"
        ));
    }

    let mut basis: Vec<Vec<C64>> = (0..k).map(|c| cols.column(c)).collect();
    for b in 0..d {
        if basis.len() == d {
            break;
        }
        let mut v = vec![ZERO; d];
        v[b] = ONE;
        // two passes of classical Gram-Schmidt keep the result orthogonal
        // to working precision
        for _ in 0..2 {
            for q in &basis {
                let overlap = inner(q, &v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= overlap * qi;
                }
            }
        }
        let norm = vec_norm(&v);
        if norm < SKIP_NORM {
            continue;
        }
        v.iter_mut().for_each(|z| *z /= norm);
        basis.push(v);
    }
    debug_assert_eq!(basis.len(), d);

    let mut out = ComplexMatrix::zeros(d, d);
    for (c, v) in basis.iter().enumerate() {
        out.set_column(c, v);
    }
    // keep the given prefix bit-identical
    for c in 0..k {
        for r in 0..d {
            out[(r, c)] = cols[(r, c)];
        }
    }
    Ok(out)
}

/// Nearest matrix with orthonormal columns (polar factor `U V†` of the thin
/// SVD). Used to clean up columns that are orthonormal only to within a
/// looser tolerance before completion.
pub fn nearest_orthonormal(cols: &ComplexMatrix) -> Result<ComplexMatrix> {
    if cols.cols() == 0 {
        return Ok(cols.clone());
    }
    let d = svd(cols, 0.0)?;
    Ok(d.u.matmul(&d.v_dagger))
}
