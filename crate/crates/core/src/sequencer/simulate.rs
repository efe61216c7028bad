use super::plan::{SequentialPlan, FINAL_ANCILLA, INITIAL_ANCILLA};
use crate::error::{contract, Result};
use crate::linalg::{vec_dist, vec_norm, C64, ONE, ZERO};
use crate::oplib::Isometry;

/// Accepted deviation of the input state norm from 1.
pub const INPUT_NORM_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationOutcome {
    /// Chain amplitudes conditioned on the ancilla ending in `|0⟩`.
    pub chain_state: Vec<C64>,
    /// Norm of the ancilla components orthogonal to `|0⟩`.
    pub decoupling_residual: f64,
}

/// Runs the sequential factory on an M-qubit input: prepares
/// `|0⟩_a ⊗ input ⊗ |0…0⟩`, applies each step to (ancilla, site k) in order
/// and splits the result by the final ancilla state.
pub fn simulate(plan: &SequentialPlan, input: &[C64]) -> Result<SimulationOutcome> {
    let m = plan.m_in();
    if input.len() != 1 << m {
        return contract(format!(
            "plan takes {m} input qubits ({} amplitudes), got {}",
            1usize << m,
            input.len()
        ));
    }
    let norm = vec_norm(input);
    if !((norm - 1.0).abs() < INPUT_NORM_TOL) {
        return contract(format!("input state is not normalized (norm {norm:.12})"));
    }
    Ok(run(plan, input))
}

fn run(plan: &SequentialPlan, input: &[C64]) -> SimulationOutcome {
    let d = plan.ancilla_dim();
    let n = plan.n_out();
    let chain_dim = 1usize << n;
    let pad = n - plan.m_in();

    // index = a · 2^N + q, site 1 the most significant bit of q
    let mut state = vec![ZERO; d * chain_dim];
    for (j, &amp) in input.iter().enumerate() {
        state[INITIAL_ANCILLA * chain_dim + (j << pad)] = amp;
    }

    let mut local = vec![ZERO; 2 * d];
    for (k, v) in plan.steps().iter().enumerate() {
        let low = 1usize << (n - 1 - k); // stride of site k within q
        let high_count = 1usize << k;
        for hi in 0..high_count {
            for lo in 0..low {
                let base = hi * 2 * low + lo;
                for a in 0..d {
                    for b in 0..2 {
                        local[2 * a + b] = state[a * chain_dim + base + b * low];
                    }
                }
                let out = v.apply(&local);
                for a in 0..d {
                    for b in 0..2 {
                        state[a * chain_dim + base + b * low] = out[2 * a + b];
                    }
                }
            }
        }
    }

    let start = FINAL_ANCILLA * chain_dim;
    let chain_state = state[start..start + chain_dim].to_vec();
    let leaked: f64 = state
        .iter()
        .enumerate()
        .filter(|(idx, _)| idx / chain_dim != FINAL_ANCILLA)
        .map(|(_, z)| z.norm_sqr())
        .sum();
    SimulationOutcome {
        chain_state,
        decoupling_residual: leaked.sqrt(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verification {
    /// `max_j ‖output(|j⟩) − |0⟩_a ⊗ U|j⟩‖₂` over computational basis inputs,
    /// counting both the chain error and the leaked ancilla weight.
    pub max_error: f64,
    /// `2^{M/2} · max_error`, an upper bound on the operator-norm error.
    pub operator_norm_bound: f64,
    pub max_decoupling_residual: f64,
}

/// Compares the plan with `u` on every computational basis input.
pub fn verify_plan(plan: &SequentialPlan, u: &Isometry) -> Result<Verification> {
    if plan.m_in() != u.m_in() || plan.n_out() != u.n_out() {
        return contract(format!(
            "plan is {}->{} but the isometry is {}->{}",
            plan.m_in(),
            plan.n_out(),
            u.m_in(),
            u.n_out()
        ));
    }
    let dim = u.input_dim();
    let (max_error, max_decoupling_residual) = (0..dim)
        .map(|j| {
            let mut e = vec![ZERO; dim];
            e[j] = ONE;
            let out = run(plan, &e);
            let chain_err = vec_dist(&out.chain_state, &u.column(j));
            let total = chain_err.hypot(out.decoupling_residual);
            (total, out.decoupling_residual)
        })
        .fold((0.0f64, 0.0f64), |(e, r), (e2, r2)| (e.max(e2), r.max(r2)));
    Ok(Verification {
        max_error,
        operator_norm_bound: max_error * (dim as f64).sqrt(),
        max_decoupling_residual,
    })
}
