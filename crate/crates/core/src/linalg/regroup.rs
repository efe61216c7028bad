use super::matrix::{ComplexMatrix, C64};
use crate::error::{contract, Result};

/// Reorders the legs of a row-major tensor. Leg `k` of the result is leg
/// `permutation[k]` of the input.
pub fn permute_legs(data: &[C64], in_shape: &[usize], permutation: &[usize]) -> Result<Vec<C64>> {
    let total: usize = in_shape.iter().product();
    if total != data.len() {
        return contract(format!(
            "tensor shape {in_shape:?} holds {total} entries but {} were supplied",
            data.len()
        ));
    }
    check_permutation(permutation, in_shape.len())?;

    let legs = in_shape.len();
    let mut old_stride = vec![1usize; legs];
    for k in (0..legs.saturating_sub(1)).rev() {
        old_stride[k] = old_stride[k + 1] * in_shape[k + 1];
    }
    let new_dims: Vec<usize> = permutation.iter().map(|&p| in_shape[p]).collect();
    let strides: Vec<usize> = permutation.iter().map(|&p| old_stride[p]).collect();

    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0usize; legs];
    let mut offset = 0usize;
    for _ in 0..total {
        out.push(data[offset]);
        // odometer increment over the new leg order
        for k in (0..legs).rev() {
            idx[k] += 1;
            offset += strides[k];
            if idx[k] < new_dims[k] {
                break;
            }
            offset -= strides[k] * new_dims[k];
            idx[k] = 0;
        }
    }
    Ok(out)
}

/// Views the entries of `m` as a tensor of shape `in_shape`, permutes its legs
/// and reads the result back as a matrix of shape `out_shape = [rows, cols]`.
pub fn regroup(
    m: &ComplexMatrix,
    in_shape: &[usize],
    out_shape: &[usize],
    permutation: &[usize],
) -> Result<ComplexMatrix> {
    let [rows, cols] = out_shape else {
        return contract(format!(
            "output shape must list exactly two dimensions, got {out_shape:?}"
        ));
    };
    if rows * cols != m.rows() * m.cols() {
        return contract(format!(
            "output shape {rows}x{cols} does not hold the {} entries of a {}x{} matrix",
            m.rows() * m.cols(),
            m.rows(),
            m.cols()
        ));
    }
    let data = permute_legs(m.as_slice(), in_shape, permutation)?;
    ComplexMatrix::from_row_major(*rows, *cols, data)
}

pub fn inverse_permutation(permutation: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; permutation.len()];
    for (k, &p) in permutation.iter().enumerate() {
        inv[p] = k;
    }
    inv
}

fn check_permutation(permutation: &[usize], legs: usize) -> Result<()> {
    if permutation.len() != legs {
        return contract(format!(
            "permutation has {} entries for a tensor with {legs} legs",
            permutation.len()
        ));
    }
    let mut seen = vec![false; legs];
    for &p in permutation {
        if p >= legs || seen[p] {
            return contract(format!("{permutation:?} is not a permutation of 0..{legs}"));
        }
        seen[p] = true;
    }
    Ok(())
}
