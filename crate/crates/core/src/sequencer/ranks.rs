use crate::error::{contract, Result};
use crate::linalg::{regroup, svd, ComplexMatrix};
use crate::mps::{Mps, OperatorMps};
use crate::oplib::Isometry;

/// Operator Schmidt coefficients of a unitary across every contiguous cut
/// `c = 1..N−1`: singular values of `U` reshuffled so that rows carry the
/// (output, input) legs of sites `≤ c` and columns those of sites `> c`.
pub fn operator_schmidt_values(u: &Isometry) -> Result<Vec<Vec<f64>>> {
    if !u.is_square() {
        return contract(format!(
            "operator Schmidt ranks need a unitary, got a {}->{} isometry",
            u.m_in(),
            u.n_out()
        ));
    }
    let n = u.n_out();
    let legs = vec![2; 2 * n];
    (1..n)
        .map(|c| {
            // legs are (i_1..i_N, j_1..j_N)
            let perm: Vec<usize> = (0..c)
                .chain(n..n + c)
                .chain(c..n)
                .chain(n + c..2 * n)
                .collect();
            let shape = [1usize << (2 * c), 1usize << (2 * (n - c))];
            let reshuffled = regroup(u.matrix(), &legs, &shape, &perm)?;
            Ok(svd(&reshuffled, 0.0)?.s)
        })
        .collect()
}

/// Numerical ranks of [`operator_schmidt_values`]. All ones exactly when `U`
/// is a product of single-site unitaries.
pub fn operator_schmidt_ranks(u: &Isometry, rank_tol: f64) -> Result<Vec<usize>> {
    Ok(operator_schmidt_values(u)?
        .iter()
        .map(|s| crate::linalg::numerical_rank(s, rank_tol))
        .collect())
}

/// Direct-sum operator MPS of a 1→N isometry from MPS of `U|0⟩` and `U|1⟩`:
/// block-diagonal inner sites, row-concatenated last site, and a first site
/// that routes input `j` into the `j`-th block.
///
/// Bond dimensions are the sums of the two inputs' bond dimensions; the
/// result is generally not canonical.
pub fn corollary_construct(u0: &Mps, u1: &Mps) -> Result<OperatorMps> {
    let n = u0.num_sites();
    if u1.num_sites() != n {
        return contract(format!(
            "component MPS have {} and {} sites",
            n,
            u1.num_sites()
        ));
    }
    if u0.physical_dims().iter().chain(u1.physical_dims()).any(|&d| d != 2) {
        return contract("component MPS must be qubit chains");
    }

    let mut sites: Vec<Vec<ComplexMatrix>> = Vec::with_capacity(n);
    for m in 0..n {
        let (a_site, b_site) = (u0.site(m), u1.site(m));
        let (ra, ca) = a_site[0].shape();
        let (rb, cb) = b_site[0].shape();
        let last = m + 1 == n;
        if m == 0 {
            let (sa, sb) = (u0.scale(), u1.scale());
            let rows = if last { 1 } else { ra + rb };
            let mut site = Vec::with_capacity(4);
            for i in 0..2 {
                for j in 0..2 {
                    let mut c = ComplexMatrix::zeros(rows, 1);
                    let (block, offset) = match (j, last) {
                        (0, _) => (a_site[i].scaled_real(sa), 0),
                        (_, true) => (b_site[i].scaled_real(sb), 0),
                        (_, false) => (b_site[i].scaled_real(sb), ra),
                    };
                    c.set_block(offset, 0, &block);
                    site.push(c);
                }
            }
            sites.push(site);
        } else if last {
            sites.push(
                (0..2)
                    .map(|i| ComplexMatrix::hstack(&[a_site[i].clone(), b_site[i].clone()]))
                    .collect(),
            );
        } else {
            sites.push(
                (0..2)
                    .map(|i| {
                        let mut c = ComplexMatrix::zeros(ra + rb, ca + cb);
                        c.set_block(0, 0, &a_site[i]);
                        c.set_block(ra, ca, &b_site[i]);
                        c
                    })
                    .collect(),
            );
        }
    }
    OperatorMps::new(Mps::new(sites)?, 1)
}
