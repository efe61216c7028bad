//! Matrix-product representations of states and of M→N isometries.
//!
//! Site `m` (0-based here, 1-based in the docs) holds one `D_{m+1} × D_m`
//! matrix per physical index value, and the amplitudes are
//!
//! ```text
//! ψ(p_1, …, p_N) = scale · A^[N]_{p_N} ⋯ A^[2]_{p_2} A^[1]_{p_1}
//! ```
//!
//! with `D_1 = D_{N+1} = 1`. The right-hand factor acts first, so reading a
//! site's matrix as a map from its column (earlier) bond to its row (later)
//! bond gives the order in which a sequential ancilla visits the sites.

mod canonical;
mod checks;

pub use canonical::{canonicalize, canonicalize_operator, operator_to_mps, state_to_mps};
pub use checks::{check_canonical, gauge_check, CanonicalResiduals, GaugeVerdict};

use crate::error::{contract, Result};
use crate::linalg::{inverse_permutation, permute_legs, ComplexMatrix, C64, ONE};

/// Chain of site tensors with open boundaries.
#[derive(Clone, Debug, PartialEq)]
pub struct Mps {
    physical_dims: Vec<usize>,
    sites: Vec<Vec<ComplexMatrix>>,
    scale: f64,
}

impl Mps {
    /// Validates the shape chain: every matrix at a site has the same shape,
    /// neighbouring bonds agree and both boundary bonds are 1.
    pub fn new(sites: Vec<Vec<ComplexMatrix>>) -> Result<Self> {
        if sites.is_empty() {
            return contract("an MPS needs at least one site");
        }
        let mut physical_dims = Vec::with_capacity(sites.len());
        let mut left_bond = 1usize;
        for (m, site) in sites.iter().enumerate() {
            let Some(first) = site.first() else {
                return contract(format!("site {} has no matrices", m + 1));
            };
            let shape = first.shape();
            if site.iter().any(|a| a.shape() != shape) {
                return contract(format!("site {} mixes matrix shapes", m + 1));
            }
            if shape.1 != left_bond {
                return contract(format!(
                    "site {} expects left bond {} but its matrices have {} columns",
                    m + 1,
                    left_bond,
                    shape.1
                ));
            }
            if shape.0 == 0 {
                return contract(format!("site {} has a zero-dimensional bond", m + 1));
            }
            if site.iter().any(|a| !a.is_finite()) {
                return contract(format!("site {} has non-finite entries", m + 1));
            }
            left_bond = shape.0;
            physical_dims.push(site.len());
        }
        if left_bond != 1 {
            return contract(format!("final bond dimension is {left_bond}, expected 1"));
        }
        Ok(Self {
            physical_dims,
            sites,
            scale: 1.0,
        })
    }

    /// Product state from one amplitude vector per site.
    pub fn product(factors: &[Vec<C64>]) -> Result<Self> {
        let sites = factors
            .iter()
            .map(|f| f.iter().map(|&z| ComplexMatrix::from_fn(1, 1, |_, _| z)).collect())
            .collect();
        Self::new(sites)
    }

    /// Multiplies the overall prefactor.
    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale *= scale;
        self
    }

    pub fn num_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn physical_dims(&self) -> &[usize] {
        &self.physical_dims
    }

    pub fn site(&self, m: usize) -> &[ComplexMatrix] {
        &self.sites[m]
    }

    pub fn sites(&self) -> &[Vec<ComplexMatrix>] {
        &self.sites
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `D_1, …, D_{N+1}`.
    pub fn bond_dims(&self) -> Vec<usize> {
        let mut dims = Vec::with_capacity(self.sites.len() + 1);
        dims.push(1);
        dims.extend(self.sites.iter().map(|s| s[0].rows()));
        dims
    }

    pub fn max_bond_dim(&self) -> usize {
        self.bond_dims().into_iter().max().unwrap_or(1)
    }

    /// Full amplitude vector, big-endian over sites, including `scale`.
    pub fn contract(&self) -> Vec<C64> {
        // rows: prefix configurations, columns: current bond
        let mut acc = ComplexMatrix::from_fn(1, 1, |_, _| ONE);
        for site in &self.sites {
            let d = site.len();
            let bond = site[0].rows();
            let mut next = ComplexMatrix::zeros(acc.rows() * d, bond);
            for (p, a) in site.iter().enumerate() {
                // acc · Aᵀ gives, for each prefix, the new bond vector
                let block = acc.matmul(&a.transpose());
                for r in 0..acc.rows() {
                    for c in 0..bond {
                        next[(r * d + p, c)] = block[(r, c)];
                    }
                }
            }
            acc = next;
        }
        let k = C64::new(self.scale, 0.0);
        acc.into_vec().into_iter().map(|z| z * k).collect()
    }

    pub(crate) fn from_parts(sites: Vec<Vec<ComplexMatrix>>, scale: f64) -> Self {
        let physical_dims = sites.iter().map(Vec::len).collect();
        Self {
            physical_dims,
            sites,
            scale,
        }
    }

    pub(crate) fn into_parts(self) -> (Vec<Vec<ComplexMatrix>>, f64) {
        (self.sites, self.scale)
    }
}

/// Squared Schmidt coefficients across each inner cut.
///
/// `lambdas[c]` is the diagonal of `Λ^[c+1]`, the weights on the bond
/// between sites `c+1` and `c+2`; each is descending, positive and sums to 1.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalWeights {
    pub lambdas: Vec<Vec<f64>>,
}

impl CanonicalWeights {
    /// Weights on bond `b` (0-based, `0..=N`), with the trivial `[1]` at both
    /// boundaries.
    pub fn on_bond(&self, b: usize) -> Vec<f64> {
        if b == 0 || b > self.lambdas.len() {
            vec![1.0]
        } else {
            self.lambdas[b - 1].clone()
        }
    }
}

/// MPS of an M→N operator. Sites `1..=m_in` fuse output and input legs into
/// one physical index `p = 2·i + j`; the remaining sites carry outputs only.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMps {
    mps: Mps,
    m_in: usize,
}

impl OperatorMps {
    pub fn new(mps: Mps, m_in: usize) -> Result<Self> {
        if m_in == 0 || m_in > mps.num_sites() {
            return contract(format!(
                "input site count {m_in} outside 1..={}",
                mps.num_sites()
            ));
        }
        for (k, &d) in mps.physical_dims().iter().enumerate() {
            let expected = if k < m_in { 4 } else { 2 };
            if d != expected {
                return contract(format!(
                    "site {} has physical dimension {d}, expected {expected}",
                    k + 1
                ));
            }
        }
        Ok(Self { mps, m_in })
    }

    pub fn mps(&self) -> &Mps {
        &self.mps
    }

    pub fn m_in(&self) -> usize {
        self.m_in
    }

    pub fn n_out(&self) -> usize {
        self.mps.num_sites()
    }

    pub fn bond_dims(&self) -> Vec<usize> {
        self.mps.bond_dims()
    }

    pub fn max_bond_dim(&self) -> usize {
        self.mps.max_bond_dim()
    }

    /// Matrix `A^[k]_{i,j}` of input site `k` (0-based).
    pub fn input_matrix(&self, k: usize, i: usize, j: usize) -> &ComplexMatrix {
        debug_assert!(k < self.m_in);
        &self.mps.site(k)[2 * i + j]
    }

    /// Contracts back to the `2^N × 2^M` operator.
    pub fn to_matrix(&self) -> ComplexMatrix {
        let (m, n) = (self.m_in, self.n_out());
        let fused = self.mps.contract();
        let perm = operator_leg_order(m, n);
        let inv = inverse_permutation(&perm);
        let fused_shape: Vec<usize> = vec![2; n + m];
        let data = permute_legs(&fused, &fused_shape, &inv).expect("consistent leg order");
        ComplexMatrix::from_row_major(1 << n, 1 << m, data).expect("shape is 2^N x 2^M")
    }
}

/// Leg order taking `U[i_1..i_N, j_1..j_M]` to the fused site order
/// `(i_1, j_1, …, i_M, j_M, i_{M+1}, …, i_N)`.
pub(crate) fn operator_leg_order(m_in: usize, n_out: usize) -> Vec<usize> {
    let mut perm = Vec::with_capacity(m_in + n_out);
    for k in 0..m_in {
        perm.push(k);
        perm.push(n_out + k);
    }
    perm.extend(m_in..n_out);
    perm
}
