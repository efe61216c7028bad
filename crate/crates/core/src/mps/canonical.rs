use super::{operator_leg_order, CanonicalWeights, Mps, OperatorMps};
use crate::error::{contract, Result};
use crate::linalg::{permute_legs, svd, vec_norm, ComplexMatrix, C64};
use crate::oplib::Isometry;

/// Tolerance on `‖ψ‖ − 1` accepted by [`state_to_mps`].
pub const STATE_NORM_TOL: f64 = 1e-10;

/// Canonical MPS of a normalized state by successive Schmidt decompositions
/// from the last site backwards.
pub fn state_to_mps(
    psi: &[C64],
    dims: &[usize],
    rank_tol: f64,
) -> Result<(Mps, CanonicalWeights)> {
    let expected: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) {
        return contract(format!("invalid physical dimensions {dims:?}"));
    }
    if psi.len() != expected {
        return contract(format!(
            "state has {} amplitudes but dimensions {dims:?} need {expected}",
            psi.len()
        ));
    }
    let norm = vec_norm(psi);
    if !((norm - 1.0).abs() < STATE_NORM_TOL) {
        return contract(format!("state is not normalized (norm {norm:.12})"));
    }
    decompose_vector(psi, dims, rank_tol)
}

/// Canonical operator MPS of an isometry. The fused vector has Frobenius
/// norm `2^{M/2}`, which is carried by the MPS scale.
pub fn operator_to_mps(u: &Isometry, rank_tol: f64) -> Result<(OperatorMps, CanonicalWeights)> {
    let (m, n) = (u.m_in(), u.n_out());
    let fused = permute_legs(u.matrix().as_slice(), &vec![2; n + m], &operator_leg_order(m, n))?;
    let dims: Vec<usize> = (0..n).map(|k| if k < m { 4 } else { 2 }).collect();
    let (mps, weights) = decompose_vector(&fused, &dims, rank_tol)?;
    Ok((OperatorMps::new(mps, m)?, weights))
}

/// Successive SVDs over a full amplitude vector, from the last site to the
/// first. Each factorization separates an orthonormal right part, so the
/// singular values at every step are exact Schmidt coefficients.
fn decompose_vector(
    psi: &[C64],
    dims: &[usize],
    rank_tol: f64,
) -> Result<(Mps, CanonicalWeights)> {
    let n = dims.len();
    let mut sites: Vec<Vec<ComplexMatrix>> = vec![Vec::new(); n];
    let mut lambdas: Vec<Vec<f64>> = vec![Vec::new(); n.saturating_sub(1)];

    // rows: configurations of sites 0..=m, columns: bond to the right of m
    let mut rest = ComplexMatrix::from_row_major(psi.len(), 1, psi.to_vec())?;
    let mut right_bond = 1usize;
    let mut scale = 1.0;
    for m in (0..n).rev() {
        let d = dims[m];
        let prefix = rest.rows() / d;
        let reshaped = ComplexMatrix::from_row_major(prefix, d * right_bond, rest.into_vec())?;
        let dec = svd(&reshaped, rank_tol)?;
        let k = dec.numerical_rank;
        if k == 0 {
            return contract("cannot decompose a numerically zero tensor");
        }
        let dec = dec.truncated(k);
        sites[m] = (0..d)
            .map(|p| ComplexMatrix::from_fn(right_bond, k, |r, t| dec.v_dagger[(t, p * right_bond + r)]))
            .collect();
        if m > 0 {
            lambdas[m - 1] = normalized_squares(&dec.s);
            rest = dec.u_s();
            right_bond = k;
        } else {
            // 1x1 left factor: phase convention makes u = 1, so s is the norm
            let phase = dec.u[(0, 0)];
            for a in sites[0].iter_mut() {
                *a = a.scaled(phase);
            }
            scale = dec.s[0];
            rest = ComplexMatrix::zeros(0, 0);
        }
    }
    Ok((Mps::from_parts(sites, scale), CanonicalWeights { lambdas }))
}

/// Brings any shape-consistent MPS to canonical form.
///
/// A first sweep from site 1 to N orthonormalizes the left parts (truncating
/// exact zeros); a second sweep from N to 1 makes every site an isometry from
/// its earlier bond and reads the Schmidt weights off the singular values.
pub fn canonicalize(mps: &Mps, rank_tol: f64) -> Result<(Mps, CanonicalWeights)> {
    let n = mps.num_sites();
    let (mut sites, mut scale) = mps.clone().into_parts();

    for m in 0..n {
        let d = sites[m].len();
        let left = sites[m][0].cols();
        let h = ComplexMatrix::hstack(&sites[m]);
        let dec = svd(&h, rank_tol)?;
        let k = dec.numerical_rank;
        if k == 0 {
            return contract(format!("MPS is numerically zero (site {} collapses)", m + 1));
        }
        let dec = dec.truncated(k);
        sites[m] = (0..d)
            .map(|p| dec.v_dagger.submatrix(0, p * left, k, left))
            .collect();
        let carry = dec.u_s();
        if m + 1 < n {
            for a in sites[m + 1].iter_mut() {
                *a = a.matmul(&carry);
            }
        } else {
            // carry is 1x1 and, by the phase convention, real positive
            scale *= carry[(0, 0)].re;
        }
    }

    let mut lambdas: Vec<Vec<f64>> = vec![Vec::new(); n.saturating_sub(1)];
    for m in (0..n).rev() {
        let d = sites[m].len();
        let right = sites[m][0].rows();
        let stacked = ComplexMatrix::vstack(&sites[m]);
        let dec = svd(&stacked, rank_tol)?;
        let k = dec.numerical_rank;
        if k == 0 {
            return contract(format!("MPS is numerically zero (site {} collapses)", m + 1));
        }
        let dec = dec.truncated(k);
        sites[m] = (0..d)
            .map(|p| dec.u.submatrix(p * right, 0, right, k))
            .collect();
        let carry = dec.s_vdagger();
        if m > 0 {
            lambdas[m - 1] = normalized_squares(&dec.s);
            for a in sites[m - 1].iter_mut() {
                *a = carry.matmul(a);
            }
        } else {
            let phase = dec.v_dagger[(0, 0)];
            for a in sites[0].iter_mut() {
                *a = a.scaled(phase);
            }
            scale *= dec.s[0];
        }
    }
    Ok((Mps::from_parts(sites, scale), CanonicalWeights { lambdas }))
}

/// [`canonicalize`] for operator MPS; the fused physical legs are untouched.
pub fn canonicalize_operator(
    op: &OperatorMps,
    rank_tol: f64,
) -> Result<(OperatorMps, CanonicalWeights)> {
    let (mps, weights) = canonicalize(op.mps(), rank_tol)?;
    Ok((OperatorMps::new(mps, op.m_in())?, weights))
}

fn normalized_squares(s: &[f64]) -> Vec<f64> {
    let total: f64 = s.iter().map(|x| x * x).sum();
    s.iter().map(|x| x * x / total).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{vec_dist, ONE, ZERO};
    use crate::mps::check_canonical;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn ghz3() -> Vec<C64> {
        let mut v = vec![ZERO; 8];
        v[0] = C64::new(FRAC_1_SQRT_2, 0.0);
        v[7] = C64::new(FRAC_1_SQRT_2, 0.0);
        v
    }

    #[test]
    fn product_state_has_unit_bonds() {
        let mut psi = vec![ZERO; 16];
        psi[0] = ONE;
        let (mps, w) = state_to_mps(&psi, &[2; 4], 1e-10).unwrap();
        assert_eq!(mps.bond_dims(), vec![1; 5]);
        assert!(w.lambdas.iter().all(|l| l == &vec![1.0]));
    }

    #[test]
    fn ghz_bonds_and_weights() {
        let (mps, w) = state_to_mps(&ghz3(), &[2; 3], 1e-10).unwrap();
        assert_eq!(mps.bond_dims(), vec![1, 2, 2, 1]);
        for l in &w.lambdas {
            assert!((l[0] - 0.5).abs() < 1e-15 && (l[1] - 0.5).abs() < 1e-15);
        }
        assert!(vec_dist(&mps.contract(), &ghz3()) < 1e-14);
        assert!(check_canonical(&mps, &w, 1e-12).passes);
    }

    #[test]
    fn state_contract_checks() {
        assert!(state_to_mps(&ghz3(), &[2; 2], 1e-10).is_err());
        let scaled: Vec<C64> = ghz3().iter().map(|z| z * 2.0).collect();
        assert!(state_to_mps(&scaled, &[2; 3], 1e-10).is_err());
    }

    #[test]
    fn identity_operator_is_single_site() {
        let u = Isometry::new(1, 1, ComplexMatrix::identity(2)).unwrap();
        let (op, w) = operator_to_mps(&u, 1e-10).unwrap();
        assert_eq!(op.bond_dims(), vec![1, 1]);
        assert!(w.lambdas.is_empty());
        assert!((op.mps().scale() - 2f64.sqrt()).abs() < 1e-15);
        assert!(op.to_matrix().sub(u.matrix()).max_abs() < 1e-15);
    }

    #[test]
    fn zero_site_is_rejected() {
        let a = vec![ComplexMatrix::zeros(1, 1), ComplexMatrix::zeros(1, 1)];
        let b = vec![ComplexMatrix::identity(1), ComplexMatrix::zeros(1, 1)];
        let mps = Mps::new(vec![b, a]).unwrap();
        let err = canonicalize(&mps, 1e-10).unwrap_err();
        assert!(matches!(err, crate::Error::Contract(_)), "{err}");
    }

    #[test]
    fn canonicalize_matches_direct_route_on_ghz() {
        // redundant representation: GHZ written with a doubled bond
        let (direct, w_direct) = state_to_mps(&ghz3(), &[2; 3], 1e-10).unwrap();
        let (sites, scale) = direct.clone().into_parts();
        let pad = |a: &ComplexMatrix, rows: usize, cols: usize| {
            let mut out = ComplexMatrix::zeros(rows, cols);
            out.set_block(0, 0, a);
            out
        };
        let inflated: Vec<Vec<ComplexMatrix>> = sites
            .iter()
            .enumerate()
            .map(|(m, site)| {
                site.iter()
                    .map(|a| {
                        let rows = if m == 2 { 1 } else { 2 * a.rows() };
                        let cols = if m == 0 { 1 } else { 2 * a.cols() };
                        pad(a, rows, cols)
                    })
                    .collect()
            })
            .collect();
        let redundant = Mps::from_parts(inflated, scale);
        assert_eq!(redundant.bond_dims(), vec![1, 4, 4, 1]);
        let (canon, w) = canonicalize(&redundant, 1e-10).unwrap();
        assert_eq!(canon.bond_dims(), vec![1, 2, 2, 1]);
        assert!(vec_dist(&canon.contract(), &ghz3()) < 1e-13);
        for (a, b) in w.lambdas.iter().zip(&w_direct.lambdas) {
            for (x, y) in a.iter().zip(b) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }
}
