//! Sequential qubit–ancilla decompositions.
//!
//! An M→N isometry is sequential when an ancilla starting in `|0⟩` can visit
//! the sites once each, in order, with one unitary per visit, and end in
//! `|0⟩` again. This holds exactly when, in a canonical operator MPS, every
//! input site satisfies
//!
//! ```text
//! Σ_i A^[k]†_{i,j} A^[k]_{i,j'} = δ_{jj'} · 1        (k ≤ M)
//! ```
//!
//! after the operator's `2^{M/2}` norm is spread as `√2` over the input sites.
//! The step unitaries are then read off the site tensors and the minimal
//! ancilla dimension is the largest canonical bond dimension.

mod plan;
mod ranks;
mod simulate;

pub use plan::{build_plan, plan_to_operator_mps, SequentialPlan, FINAL_ANCILLA, INITIAL_ANCILLA};
pub use ranks::{corollary_construct, operator_schmidt_ranks, operator_schmidt_values};
pub use simulate::{simulate, verify_plan, SimulationOutcome, Verification};

use crate::error::Result;
use crate::linalg::{spectral_norm, ComplexMatrix, DEFAULT_RANK_TOL};
use crate::mps::{operator_to_mps, OperatorMps};
use crate::oplib::Isometry;

/// Default threshold on the sequentiality criterion residuals.
pub const DEFAULT_CRIT_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Relative cutoff for numerically-zero singular values.
    pub rank_tol: f64,
    /// Threshold on the per-site criterion residuals.
    pub crit_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank_tol: DEFAULT_RANK_TOL,
            crit_tol: DEFAULT_CRIT_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SequentialityReport {
    pub implementable: bool,
    /// One entry per input site: `max_{j,j'} ‖Σ_i A†_{i,j} A_{i,j'} − δ_{jj'} 1‖`.
    pub per_site_residuals: Vec<f64>,
    /// Canonical `D_1, …, D_{N+1}`.
    pub bond_dims: Vec<usize>,
    pub ancilla_dim_if_yes: Option<usize>,
    pub tolerances: Tolerances,
}

impl SequentialityReport {
    pub fn max_residual(&self) -> f64 {
        self.per_site_residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Decides whether `u` admits a sequential decomposition.
pub fn sequentiality_test(u: &Isometry, tol: &Tolerances) -> Result<SequentialityReport> {
    let (op, _) = operator_to_mps(u, tol.rank_tol)?;
    report_for(&op, tol)
}

pub(crate) fn report_for(op: &OperatorMps, tol: &Tolerances) -> Result<SequentialityReport> {
    let per_site_residuals = criterion_residuals(op)?;
    let implementable = per_site_residuals.iter().all(|&r| r < tol.crit_tol);
    Ok(SequentialityReport {
        implementable,
        per_site_residuals,
        bond_dims: op.bond_dims(),
        ancilla_dim_if_yes: implementable.then(|| op.max_bond_dim()),
        tolerances: *tol,
    })
}

/// Per-input-site criterion residuals (spectral norm).
///
/// The overall scale `s` of the MPS is spread evenly over the input sites,
/// each site's tensors being multiplied by `s^{1/M}`. For a canonical form
/// of an isometry that factor is `√2`; for an MPS read off step unitaries the
/// scale is 1.
pub fn criterion_residuals(op: &OperatorMps) -> Result<Vec<f64>> {
    let m = op.m_in();
    let weight = op.mps().scale().powf(2.0 / m as f64);
    let mut out = Vec::with_capacity(m);
    for k in 0..m {
        let dim = op.mps().site(k)[0].cols();
        let mut worst: f64 = 0.0;
        for j in 0..2 {
            for jp in 0..2 {
                let mut acc = ComplexMatrix::zeros(dim, dim);
                for i in 0..2 {
                    acc.add_assign(&op.input_matrix(k, i, j).adjoint_matmul(op.input_matrix(k, i, jp)));
                }
                let mut dev = acc.scaled_real(weight);
                if j == jp {
                    dev = dev.sub(&ComplexMatrix::identity(dim));
                }
                worst = worst.max(spectral_norm(&dev)?);
            }
        }
        out.push(worst);
    }
    Ok(out)
}
