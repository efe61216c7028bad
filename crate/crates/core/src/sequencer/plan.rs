use super::{report_for, Tolerances};
use crate::error::{contract, Error, Result};
use crate::linalg::{complete_to_unitary, nearest_orthonormal, ComplexMatrix, C64, ZERO};
use crate::mps::{operator_to_mps, Mps, OperatorMps};
use crate::oplib::Isometry;

/// Ancilla basis state before the first step.
pub const INITIAL_ANCILLA: usize = 0;
/// Ancilla basis state after the last step.
pub const FINAL_ANCILLA: usize = 0;

/// Unitarity tolerance for plan steps, `‖V†V − I‖_F`.
pub const STEP_UNITARITY_TOL: f64 = 1e-10;

/// Ancilla dimension plus one `2D × 2D` unitary per site. Step matrices act
/// on `ancilla ⊗ site` with the ancilla index most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct SequentialPlan {
    ancilla_dim: usize,
    m_in: usize,
    steps: Vec<ComplexMatrix>,
    bond_dims: Vec<usize>,
}

impl SequentialPlan {
    /// Validates step shapes and unitarity. `bond_dims` is informational
    /// (`D_1 … D_{N+1}`); it must have one more entry than there are steps
    /// and never exceed the ancilla dimension.
    pub fn new(
        ancilla_dim: usize,
        m_in: usize,
        steps: Vec<ComplexMatrix>,
        bond_dims: Vec<usize>,
    ) -> Result<Self> {
        if ancilla_dim == 0 {
            return contract("ancilla dimension must be positive");
        }
        if steps.is_empty() {
            return contract("a plan needs at least one step");
        }
        if m_in == 0 || m_in > steps.len() {
            return contract(format!(
                "input qubit count {m_in} outside 1..={}",
                steps.len()
            ));
        }
        let side = 2 * ancilla_dim;
        for (k, v) in steps.iter().enumerate() {
            if v.shape() != (side, side) {
                return contract(format!(
                    "step {} is {}x{}, expected {side}x{side}",
                    k + 1,
                    v.rows(),
                    v.cols()
                ));
            }
            if !v.is_finite() {
                return contract(format!("step {} has non-finite entries", k + 1));
            }
            let residual = v.gram_residual();
            if !(residual <= STEP_UNITARITY_TOL) {
                return contract(format!(
                    "step {} is not unitary (residual {residual:.3e})",
                    k + 1
                ));
            }
        }
        if bond_dims.len() != steps.len() + 1 || bond_dims.iter().any(|&d| d == 0 || d > ancilla_dim) {
            return contract(format!(
                "bond dimensions {bond_dims:?} do not fit {} steps with ancilla dimension {ancilla_dim}",
                steps.len()
            ));
        }
        Ok(Self {
            ancilla_dim,
            m_in,
            steps,
            bond_dims,
        })
    }

    pub fn ancilla_dim(&self) -> usize {
        self.ancilla_dim
    }

    pub fn m_in(&self) -> usize {
        self.m_in
    }

    pub fn n_out(&self) -> usize {
        self.steps.len()
    }

    pub fn steps(&self) -> &[ComplexMatrix] {
        &self.steps
    }

    pub fn bond_dims(&self) -> &[usize] {
        &self.bond_dims
    }

    /// Same plan with step `k` (0-based) replaced.
    pub fn with_step(&self, k: usize, step: ComplexMatrix) -> Result<Self> {
        let mut steps = self.steps.clone();
        steps[k] = step;
        Self::new(self.ancilla_dim, self.m_in, steps, self.bond_dims.clone())
    }
}

/// Synthesizes the minimal-ancilla plan for `u`.
///
/// With `A^[k]` the canonical site tensors (input sites scaled by `√2`), the
/// defined columns of each step are
///
/// ```text
/// V^[k] |r⟩_a |j⟩ = Σ_{s,i} ⟨s|A^[k]_{i,j}|r⟩ |s⟩_a |i⟩    k ≤ M
/// V^[k] |r⟩_a |0⟩ = Σ_{s,i} ⟨s|A^[k]_i|r⟩     |s⟩_a |i⟩    k > M
/// ```
///
/// for `r < D_k`, with bonds zero-padded into the `D = max D_m` ancilla. The
/// other columns come from [`complete_to_unitary`].
pub fn build_plan(u: &Isometry, tol: &Tolerances) -> Result<SequentialPlan> {
    let (op, _) = operator_to_mps(u, tol.rank_tol)?;
    let report = report_for(&op, tol)?;
    if !report.implementable {
        return Err(Error::NotImplementable(Box::new(report)));
    }
    let d = op.max_bond_dim();
    let m = op.m_in();
    let input_factor = op.mps().scale().powf(1.0 / m as f64);
    let bonds = op.bond_dims();

    let mut steps = Vec::with_capacity(op.n_out());
    for (k, site) in op.mps().sites().iter().enumerate() {
        let (bond_in, bond_out) = (bonds[k], bonds[k + 1]);
        let is_input = k < m;
        let factor = if is_input { input_factor } else { 1.0 };
        let site_inputs: &[usize] = if is_input { &[0, 1] } else { &[0] };

        let mut positions = Vec::new();
        let mut columns = Vec::new();
        for r in 0..bond_in {
            for &j in site_inputs {
                let mut col = vec![ZERO; 2 * d];
                for s in 0..bond_out {
                    for i in 0..2 {
                        let p = if is_input { 2 * i + j } else { i };
                        col[2 * s + i] = site[p][(s, r)] * factor;
                    }
                }
                positions.push(2 * r + j);
                columns.push(col);
            }
        }
        steps.push(assemble_step(k, 2 * d, &positions, &columns, tol.crit_tol)?);
    }
    SequentialPlan::new(d, m, steps, bonds)
}

/// Places the defined columns at `positions` and fills the rest with the
/// deterministic unitary completion, in increasing column order.
fn assemble_step(
    k: usize,
    side: usize,
    positions: &[usize],
    columns: &[Vec<C64>],
    crit_tol: f64,
) -> Result<ComplexMatrix> {
    let mut defined = ComplexMatrix::zeros(side, columns.len());
    for (c, col) in columns.iter().enumerate() {
        defined.set_column(c, col);
    }
    let residual = defined.gram_residual();
    if !(residual < crit_tol) {
        return Err(Error::InternalConsistency(format!(
            "defined columns of step {} are not orthonormal (residual {residual:.3e})",
            k + 1
        )));
    }
    let completed = complete_to_unitary(&nearest_orthonormal(&defined)?)?;

    let mut step = ComplexMatrix::zeros(side, side);
    let mut next_free = positions.len();
    for c in 0..side {
        let source = match positions.iter().position(|&p| p == c) {
            Some(idx) => idx,
            None => {
                next_free += 1;
                next_free - 1
            }
        };
        step.set_column(c, &completed.column(source));
    }
    Ok(step)
}

/// Operator MPS read off a plan's step unitaries (bonds of size `D`, input
/// ancilla `|0⟩`, output projected on `|0⟩`). It reproduces the isometry
/// whenever the plan decouples the ancilla.
pub fn plan_to_operator_mps(plan: &SequentialPlan) -> Result<OperatorMps> {
    let d = plan.ancilla_dim();
    let n = plan.n_out();
    let m = plan.m_in();
    let mut sites = Vec::with_capacity(n);
    for (k, v) in plan.steps().iter().enumerate() {
        let bond_in = if k == 0 { 1 } else { d };
        let bond_out = if k + 1 == n { 1 } else { d };
        let inputs: &[usize] = if k < m { &[0, 1] } else { &[0] };
        let mut site = Vec::new();
        for i in 0..2 {
            for &j in inputs {
                site.push(ComplexMatrix::from_fn(bond_out, bond_in, |s, r| v[(2 * s + i, 2 * r + j)]));
            }
        }
        // for input sites the loop order above yields p = 2i + j
        sites.push(site);
    }
    OperatorMps::new(Mps::new(sites)?, m)
}
