//! Test-only oracles and constructors, independent of the MPS pipeline.
#![allow(dead_code)]

use seqfactory::linalg::{nearest_orthonormal, numerical_rank, svd, ComplexMatrix, C64, ONE, ZERO};
use seqfactory::mps::{Mps, OperatorMps};
use seqfactory::oplib::{GaussianStream, Isometry};
use seqfactory::sequencer::{simulate, SequentialPlan};

/// Schmidt ranks of `U` at every contiguous cut of the fused chain, from an
/// explicit index loop: row = (i_1, j_1, …, i_c, j_c) restricted to the
/// sites that exist, column = the remaining fused legs.
pub fn bipartition_ranks(u: &Isometry, rank_tol: f64) -> Vec<usize> {
    bipartition_values(u)
        .iter()
        .map(|s| numerical_rank(s, rank_tol))
        .collect()
}

pub fn bipartition_values(u: &Isometry) -> Vec<Vec<f64>> {
    let (m, n) = (u.m_in(), u.n_out());
    let site_dim = |k: usize| if k < m { 4 } else { 2 };
    (1..n)
        .map(|c| {
            let rows: usize = (0..c).map(site_dim).product();
            let cols: usize = (c..n).map(site_dim).product();
            let mut mat = ComplexMatrix::zeros(rows, cols);
            for out in 0..(1usize << n) {
                for inp in 0..(1usize << m) {
                    let (mut r, mut col) = (0usize, 0usize);
                    for k in 0..n {
                        let i = (out >> (n - 1 - k)) & 1;
                        let p = if k < m { 2 * i + ((inp >> (m - 1 - k)) & 1) } else { i };
                        if k < c {
                            r = r * site_dim(k) + p;
                        } else {
                            col = col * site_dim(k) + p;
                        }
                    }
                    mat[(r, col)] = u.matrix()[(out, inp)];
                }
            }
            svd(&mat, 0.0).unwrap().s
        })
        .collect()
}

/// Max Schmidt rank over all cuts of a state, by direct reshaping.
pub fn state_bipartition_ranks(psi: &[C64], n: usize, rank_tol: f64) -> Vec<usize> {
    (1..n)
        .map(|c| {
            let rows = 1usize << c;
            let cols = 1usize << (n - c);
            let mat = ComplexMatrix::from_row_major(rows, cols, psi.to_vec()).unwrap();
            svd(&mat, rank_tol).unwrap().numerical_rank
        })
        .collect()
}

/// Redundant operator MPS of a 1→N isometry following the swap-network
/// protocol: the whole isometry is applied to site 1 and an (N−1)-qubit
/// ancilla, then ancilla qubit k−1 is swapped into blank site k. Every inner
/// bond has dimension 2^{N−1}.
pub fn swap_network_mps(u: &Isometry) -> OperatorMps {
    assert_eq!(u.m_in(), 1);
    let n = u.n_out();
    assert!((2..=4).contains(&n), "baseline only for small chains");
    let anc = 1usize << (n - 1);
    let mut sites = Vec::with_capacity(n);

    let mut first = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            first.push(ComplexMatrix::from_fn(anc, 1, |a, _| u.matrix()[(i * anc + a, j)]));
        }
    }
    sites.push(first);

    for k in 2..=n {
        let mask = 1usize << (n - k); // ancilla qubit k−1 holds output i_k
        let bond_out = if k == n { 1 } else { anc };
        sites.push(
            (0..2)
                .map(|i| {
                    ComplexMatrix::from_fn(bond_out, anc, |s, r| {
                        let bit = usize::from(r & mask != 0);
                        if bit == i && s == r & !mask {
                            ONE
                        } else {
                            ZERO
                        }
                    })
                })
                .collect(),
        );
    }
    OperatorMps::new(Mps::new(sites).unwrap(), 1).unwrap()
}

/// Haar-ish random d×d unitary from the seeded Gaussian stream.
pub fn random_unitary_dim(d: usize, seed: u64) -> ComplexMatrix {
    let mut g = GaussianStream::new(seed);
    let m = ComplexMatrix::from_fn(d, d, |_, _| g.next_complex());
    nearest_orthonormal(&m).unwrap()
}

/// Sequential M→N isometry with a qubit ancilla: random two-body steps on
/// sites 1..N−1, then a swap that parks the ancilla state on the blank last
/// site, leaving the ancilla in |0⟩.
pub fn random_sequential_isometry(m: usize, n: usize, seed: u64) -> Isometry {
    assert!(m < n);
    let mut steps: Vec<ComplexMatrix> = (0..n - 1)
        .map(|k| random_unitary_dim(4, seed.wrapping_mul(31).wrapping_add(k as u64)))
        .collect();
    steps.push(swap4());
    let mut bonds = vec![2; n + 1];
    bonds[0] = 1;
    bonds[n] = 1;
    let plan = SequentialPlan::new(2, m, steps, bonds).unwrap();
    let mut mat = ComplexMatrix::zeros(1 << n, 1 << m);
    for j in 0..(1 << m) {
        let mut e = vec![ZERO; 1 << m];
        e[j] = ONE;
        let out = simulate(&plan, &e).unwrap();
        assert!(out.decoupling_residual < 1e-12);
        mat.set_column(j, &out.chain_state);
    }
    Isometry::new(m, n, mat).unwrap()
}

pub fn swap4() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 1.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
    ])
}

/// Reduced density matrix of one qubit (0-based `site`) of an n-qubit pure
/// state, by explicit summation.
pub fn single_site_density(psi: &[C64], n: usize, site: usize) -> [[C64; 2]; 2] {
    let shift = n - 1 - site;
    let mut rho = [[ZERO; 2]; 2];
    for (x, &ax) in psi.iter().enumerate() {
        for b in 0..2 {
            let y = (x & !(1 << shift)) | (b << shift);
            let a = (x >> shift) & 1;
            rho[a][b] += ax * psi[y].conj();
        }
    }
    rho
}

pub fn density_dist(a: &[[C64; 2]; 2], b: &[[C64; 2]; 2]) -> f64 {
    let mut worst: f64 = 0.0;
    for r in 0..2 {
        for c in 0..2 {
            worst = worst.max((a[r][c] - b[r][c]).norm());
        }
    }
    worst
}

pub fn basis_state(dim: usize, k: usize) -> Vec<C64> {
    let mut v = vec![ZERO; dim];
    v[k] = ONE;
    v
}

/// Random normalized state on `n` qubits.
pub fn random_state(n: usize, seed: u64) -> Vec<C64> {
    let mut g = GaussianStream::new(seed);
    let v: Vec<C64> = (0..1usize << n).map(|_| g.next_complex()).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Inserts random bond unitaries `W_m` (and zero padding of `extra` on
/// every inner bond), producing a non-canonical MPS of the same vector.
pub fn scramble_gauge(mps: &Mps, extra: usize, seed: u64) -> Mps {
    let n = mps.num_sites();
    let bonds = mps.bond_dims();
    let padded: Vec<usize> = bonds
        .iter()
        .enumerate()
        .map(|(b, &d)| if b == 0 || b == n { d } else { d + extra })
        .collect();
    let gauges: Vec<ComplexMatrix> = padded
        .iter()
        .enumerate()
        .map(|(b, &d)| {
            if b == 0 || b == n {
                ComplexMatrix::identity(1)
            } else {
                random_unitary_dim(d, seed.wrapping_add(b as u64 * 7919))
            }
        })
        .collect();
    let sites = (0..n)
        .map(|m| {
            mps.site(m)
                .iter()
                .map(|a| {
                    let mut big = ComplexMatrix::zeros(padded[m + 1], padded[m]);
                    big.set_block(0, 0, a);
                    let scaled = if m == 0 { big.scaled_real(mps.scale()) } else { big };
                    gauges[m + 1].matmul(&scaled).matmul(&gauges[m].adjoint())
                })
                .collect()
        })
        .collect();
    Mps::new(sites).unwrap()
}
