//! Named operators and seeded random instances, each validated as an
//! [`Isometry`].

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{contract, Result};
use crate::linalg::{inner, ComplexMatrix, C64, ONE, ZERO};

/// Maximum Frobenius deviation of `U†U` from the identity accepted by
/// [`Isometry::new`].
pub const ISOMETRY_TOL: f64 = 1e-10;

/// Largest qubit count accepted by the random constructors.
pub const MAX_RANDOM_QUBITS: usize = 10;

/// An M→N qubit isometry stored as a 2^N × 2^M matrix. Rows index the output
/// basis and columns the input basis, both big-endian (site 1 most
/// significant).
#[derive(Clone, Debug, PartialEq)]
pub struct Isometry {
    m_in: usize,
    n_out: usize,
    matrix: ComplexMatrix,
}

impl Isometry {
    pub fn new(m_in: usize, n_out: usize, matrix: ComplexMatrix) -> Result<Self> {
        if m_in == 0 {
            return contract("an isometry needs at least one input qubit");
        }
        if m_in > n_out {
            return contract(format!("input qubits ({m_in}) exceed output qubits ({n_out})"));
        }
        if n_out >= usize::BITS as usize / 2 {
            return contract(format!("{n_out} output qubits is too many"));
        }
        let expected = (1usize << n_out, 1usize << m_in);
        if matrix.shape() != expected {
            return contract(format!(
                "a {m_in}->{n_out} isometry needs a {}x{} matrix, got {}x{}",
                expected.0,
                expected.1,
                matrix.rows(),
                matrix.cols()
            ));
        }
        if !matrix.is_finite() {
            return contract("isometry matrix has non-finite entries");
        }
        let residual = matrix.gram_residual();
        if !(residual < ISOMETRY_TOL) {
            return contract(format!(
                "matrix is not an isometry: ||U^dag U - I||_F = {residual:.3e}"
            ));
        }
        Ok(Self {
            m_in,
            n_out,
            matrix,
        })
    }

    pub fn m_in(&self) -> usize {
        self.m_in
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn input_dim(&self) -> usize {
        1 << self.m_in
    }

    pub fn output_dim(&self) -> usize {
        1 << self.n_out
    }

    pub fn is_square(&self) -> bool {
        self.m_in == self.n_out
    }

    /// `‖U†U − I‖_F`.
    pub fn residual(&self) -> f64 {
        self.matrix.gram_residual()
    }

    /// Image of the computational basis state `|j⟩`.
    pub fn column(&self, j: usize) -> Vec<C64> {
        self.matrix.column(j)
    }

    pub fn apply(&self, input: &[C64]) -> Vec<C64> {
        self.matrix.apply(input)
    }
}

pub fn cnot() -> Isometry {
    let mut m = ComplexMatrix::zeros(4, 4);
    m[(0, 0)] = ONE;
    m[(1, 1)] = ONE;
    m[(3, 2)] = ONE;
    m[(2, 3)] = ONE;
    Isometry::new(2, 2, m).expect("CNOT is unitary")
}

pub fn swap() -> Isometry {
    let mut m = ComplexMatrix::zeros(4, 4);
    m[(0, 0)] = ONE;
    m[(2, 1)] = ONE;
    m[(1, 2)] = ONE;
    m[(3, 3)] = ONE;
    Isometry::new(2, 2, m).expect("SWAP is unitary")
}

/// `diag(1, 1, 1, e^{iφ})`.
pub fn controlled_phase(phi: f64) -> Isometry {
    let mut m = ComplexMatrix::identity(4);
    m[(3, 3)] = C64::from_polar(1.0, phi);
    Isometry::new(2, 2, m).expect("controlled phase is unitary")
}

/// Shor's nine-qubit encoder: `|0⟩ ↦ GHZ₊^⊗3`, `|1⟩ ↦ GHZ₋^⊗3` with
/// `GHZ± = (|000⟩ ± |111⟩)/√2`.
pub fn shor_encoder() -> Isometry {
    let block = |sign: f64| {
        let mut v = vec![ZERO; 8];
        v[0] = C64::new(FRAC_1_SQRT_2, 0.0);
        v[7] = C64::new(sign * FRAC_1_SQRT_2, 0.0);
        v
    };
    let mut m = ComplexMatrix::zeros(512, 2);
    for (col, sign) in [(0, 1.0), (1, -1.0)] {
        let b = block(sign);
        let v = kron_vecs(&[&b, &b, &b]);
        m.set_column(col, &v);
    }
    Isometry::new(1, 9, m).expect("Shor encoder is an isometry")
}

/// Optimal symmetric 1→n cloner on `2n − 1` qubits: clones on sites `1..=n`,
/// anticlones on sites `n+1..=2n−1`.
///
/// `U|ψ⟩ = Σ_j α_j |(n−j)ψ, jψ⊥⟩ ⊗ |(n−1−j)ψ⊥, jψ⟩` with
/// `α_j = √(2(n−j)/(n(n+1)))`, each factor a normalized symmetric state.
/// The map is built for the basis inputs with `|0⟩⊥ = |1⟩`, `|1⟩⊥ = |0⟩`
/// and extended linearly. Every term carries `n − 1` complements, so the
/// sign choice only fixes the relative phase of the two columns; this one
/// makes the extension clone every input with the same fidelity.
pub fn gisin_massar_cloner(n_clones: usize) -> Result<Isometry> {
    if n_clones == 0 {
        return contract("cloner needs at least one clone");
    }
    let n_out = 2 * n_clones - 1;
    if n_out > 15 {
        return contract(format!("{n_clones} clones need {n_out} qubits, too many to build densely"));
    }
    let zero = [ONE, ZERO];
    let one = [ZERO, ONE];

    let mut m = ComplexMatrix::zeros(1 << n_out, 2);
    for (col, psi, perp) in [(0, zero, one), (1, one, zero)] {
        let mut out = vec![ZERO; 1 << n_out];
        for j in 0..n_clones {
            let alpha = cloner_amplitude(n_clones, j);
            let clones = symmetric_state(psi, n_clones - j, perp, j);
            let anti = symmetric_state(perp, n_clones - 1 - j, psi, j);
            let term = kron_vecs(&[&clones, &anti]);
            for (o, t) in out.iter_mut().zip(&term) {
                *o += t * alpha;
            }
        }
        m.set_column(col, &out);
    }
    Isometry::new(1, n_out, m)
}

/// `α_j = √(2(n−j)/(n(n+1)))`.
pub fn cloner_amplitude(n_clones: usize, j: usize) -> f64 {
    let n = n_clones as f64;
    (2.0 * (n - j as f64) / (n * (n + 1.0))).sqrt()
}

/// `|0⟩ ↦ (|0…0⟩ + |1…1⟩)/√2`, `|1⟩ ↦ (|0…0⟩ − |1…1⟩)/√2`.
pub fn ghz_isometry(n: usize) -> Result<Isometry> {
    if n == 0 || n > 20 {
        return contract(format!("GHZ isometry needs 1..=20 qubits, got {n}"));
    }
    let dim = 1usize << n;
    let mut m = ComplexMatrix::zeros(dim, 2);
    m[(0, 0)] = C64::new(FRAC_1_SQRT_2, 0.0);
    m[(0, 1)] = C64::new(FRAC_1_SQRT_2, 0.0);
    m[(dim - 1, 0)] += C64::new(FRAC_1_SQRT_2, 0.0);
    m[(dim - 1, 1)] += C64::new(-FRAC_1_SQRT_2, 0.0);
    Isometry::new(1, n, m)
}

/// First `2^m` columns of a Haar-random `2^n` unitary.
///
/// Entries of a `2^n × 2^m` complex Gaussian matrix are drawn in row-major
/// order from ChaCha8 seeded with `seed` (see [`GaussianStream`]); the
/// columns are then orthonormalized left to right with two passes of
/// Gram-Schmidt.
pub fn random_isometry(m: usize, n: usize, seed: u64) -> Result<Isometry> {
    if m == 0 || m > n || n > MAX_RANDOM_QUBITS {
        return contract(format!(
            "random isometry needs 1 <= m <= n <= {MAX_RANDOM_QUBITS}, got m={m}, n={n}"
        ));
    }
    let rows = 1usize << n;
    let cols = 1usize << m;
    let mut stream = GaussianStream::new(seed);
    let g = ComplexMatrix::from_fn(rows, cols, |_, _| stream.next_complex());
    let q = gram_schmidt(&g)?;
    Isometry::new(m, n, q)
}

/// Haar-random `2^n × 2^n` unitary.
pub fn random_unitary(n: usize, seed: u64) -> Result<Isometry> {
    random_isometry(n, n, seed)
}

/// Kronecker product of single-qubit unitaries in site order.
pub fn product_unitary(factors: &[ComplexMatrix]) -> Result<Isometry> {
    if factors.is_empty() {
        return contract("product needs at least one factor");
    }
    let mut acc = ComplexMatrix::identity(1);
    for (k, f) in factors.iter().enumerate() {
        if f.shape() != (2, 2) {
            return contract(format!("factor {} is {}x{}, expected 2x2", k + 1, f.rows(), f.cols()));
        }
        let residual = f.gram_residual();
        if !(residual < ISOMETRY_TOL) {
            return contract(format!("factor {} is not unitary (residual {residual:.3e})", k + 1));
        }
        acc = acc.kron(f);
    }
    Isometry::new(factors.len(), factors.len(), acc)
}

/// Seeded complex Gaussian samples.
///
/// Uniform doubles come from `ChaCha8Rng::seed_from_u64(seed)` via
/// `Rng::gen::<f64>()` (53 random bits). Each complex sample uses one
/// Box–Muller pair: with `u1 = 1 − x1`, `u2 = x2`, the sample is
/// `√(−2 ln u1) · (cos 2πu2 + i sin 2πu2)`.
pub struct GaussianStream {
    rng: ChaCha8Rng,
}

impl GaussianStream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn next_complex(&mut self) -> C64 {
        let u1 = 1.0 - self.rng.gen::<f64>();
        let u2 = self.rng.gen::<f64>();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * PI * u2;
        C64::new(r * theta.cos(), r * theta.sin())
    }
}

fn gram_schmidt(g: &ComplexMatrix) -> Result<ComplexMatrix> {
    let mut q = ComplexMatrix::zeros(g.rows(), g.cols());
    let mut done: Vec<Vec<C64>> = Vec::with_capacity(g.cols());
    for c in 0..g.cols() {
        let mut v = g.column(c);
        for _ in 0..2 {
            for u in &done {
                let overlap = inner(u, &v);
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= overlap * ui;
                }
            }
        }
        let norm = crate::linalg::vec_norm(&v);
        if norm < 1e-8 {
            return Err(crate::Error::Numeric(
                "Gaussian sample is numerically rank deficient".into(),
            ));
        }
        v.iter_mut().for_each(|z| *z /= norm);
        q.set_column(c, &v);
        done.push(v);
    }
    Ok(q)
}

/// Normalized symmetrization of `a` copies of `phi` and `b` copies of `chi`
/// over `a + b` qubits; `phi` and `chi` must be orthonormal.
fn symmetric_state(phi: [C64; 2], a: usize, chi: [C64; 2], b: usize) -> Vec<C64> {
    let n = a + b;
    let mut out = vec![ZERO; 1 << n];
    let mut placements = 0usize;
    // each subset of positions holding chi contributes one product state
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize != b {
            continue;
        }
        placements += 1;
        let factors: Vec<&[C64]> = (0..n)
            .map(|site| {
                if mask >> (n - 1 - site) & 1 == 1 {
                    &chi[..]
                } else {
                    &phi[..]
                }
            })
            .collect();
        for (o, t) in out.iter_mut().zip(kron_vecs(&factors)) {
            *o += t;
        }
    }
    let norm = 1.0 / (placements as f64).sqrt();
    out.iter_mut().for_each(|z| *z *= norm);
    out
}

/// Kronecker product of vectors; the first factor is most significant.
pub(crate) fn kron_vecs(factors: &[&[C64]]) -> Vec<C64> {
    let mut acc = vec![ONE];
    for f in factors {
        let mut next = Vec::with_capacity(acc.len() * f.len());
        for a in &acc {
            for b in f.iter() {
                next.push(a * b);
            }
        }
        acc = next;
    }
    acc
}
