//! Acceptance suite. Prints one `[PASS]`/`[FAIL]` line per criterion and
//! exits nonzero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use seqfactory::linalg::{C64, ZERO};
use seqfactory::mps::{canonicalize, check_canonical, gauge_check, operator_to_mps, state_to_mps};
use seqfactory::oplib::{self, Isometry};
use seqfactory::sequencer::{
    build_plan, corollary_construct, operator_schmidt_ranks, sequentiality_test, simulate,
    verify_plan, Tolerances,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("runtime {elapsed:?} exceeds {limit:?}"))
}

fn tol() -> Tolerances {
    Tolerances::default()
}

fn random_product(n: usize, seed: u64) -> Isometry {
    let f: Vec<_> = (0..n)
        .map(|k| oplib::random_unitary(1, seed * 97 + k as u64).unwrap().matrix().clone())
        .collect();
    oplib::product_unitary(&f).unwrap()
}

fn ac1() -> Outcome {
    let start = Instant::now();
    let report = sequentiality_test(&oplib::cnot(), &tol()).map_err(err)?;
    ensure(!report.implementable, || "CNOT accepted".into())?;
    let cnot_res = report.max_residual();
    ensure(cnot_res > 0.1, || format!("CNOT residual {cnot_res:e} not above 0.1"))?;
    let mut worst: f64 = 0.0;
    for seed in 0..10 {
        let u = random_product(2 + (seed % 2) as usize, seed);
        let r = sequentiality_test(&u, &tol()).map_err(err)?;
        ensure(r.implementable, || format!("product seed {seed} rejected"))?;
        worst = worst.max(r.max_residual());
    }
    ensure(worst < 1e-10, || format!("product residual {worst:e}"))?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!(
        "CNOT residual {cnot_res:.3}, product residual {worst:.1e}, {:?}",
        start.elapsed()
    ))
}

fn ac2() -> Outcome {
    let start = Instant::now();
    let shor = oplib::shor_encoder();
    let plan = build_plan(&shor, &tol()).map_err(err)?;
    ensure(plan.ancilla_dim() == 4, || format!("ancilla_dim {}", plan.ancilla_dim()))?;
    let v = verify_plan(&plan, &shor).map_err(err)?;
    ensure(v.max_error < 1e-9, || format!("verification error {:e}", v.max_error))?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut decoupling = v.max_decoupling_residual;
    for input in [[C64::new(h, 0.0), C64::new(h, 0.0)], [C64::new(0.6, 0.0), C64::new(0.0, 0.8)]] {
        decoupling = decoupling.max(simulate(&plan, &input).map_err(err)?.decoupling_residual);
    }
    ensure(decoupling < 1e-10, || format!("decoupling residual {decoupling:e}"))?;
    within(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!(
        "D = 4, verification {:.1e}, decoupling {decoupling:.1e}, {:?}",
        v.max_error,
        start.elapsed()
    ))
}

fn ac3() -> Outcome {
    let mut parts = Vec::new();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for n in [2usize, 3] {
        let u = oplib::gisin_massar_cloner(n).map_err(err)?;
        let sites = 2 * n - 1;
        let plan = build_plan(&u, &tol()).map_err(err)?;
        ensure(plan.ancilla_dim() <= 2 * n, || {
            format!("n={n}: ancilla_dim {} > {}", plan.ancilla_dim(), 2 * n)
        })?;
        let v = verify_plan(&plan, &u).map_err(err)?;
        ensure(v.max_error < 1e-9, || format!("n={n}: verification {:e}", v.max_error))?;

        let inputs: Vec<[C64; 2]> = vec![
            [C64::new(1.0, 0.0), ZERO],
            [ZERO, C64::new(1.0, 0.0)],
            [C64::new(h, 0.0), C64::new(h, 0.0)],
            [C64::new(0.6, 0.0), C64::new(0.0, -0.8)],
        ];
        let mut spread: f64 = 0.0;
        let mut fidelities = Vec::new();
        for psi in &inputs {
            let out = simulate(&plan, psi).map_err(err)?.chain_state;
            let direct = u.apply(psi);
            let rhos: Vec<_> = (0..n).map(|c| single_site_density(&direct, sites, c)).collect();
            for (c, rho) in rhos.iter().enumerate() {
                spread = spread.max(density_dist(rho, &rhos[0]));
                let from_plan = single_site_density(&out, sites, c);
                spread = spread.max(density_dist(rho, &from_plan));
            }
            let r = &rhos[0];
            let f = (psi[0].conj() * r[0][0] * psi[0]
                + psi[0].conj() * r[0][1] * psi[1]
                + psi[1].conj() * r[1][0] * psi[0]
                + psi[1].conj() * r[1][1] * psi[1])
                .re;
            fidelities.push(f);
        }
        ensure(spread < 1e-10, || format!("n={n}: clone states differ by {spread:e}"))?;
        if n == 2 {
            for f in &fidelities {
                ensure((f - 5.0 / 6.0).abs() < 1e-10, || format!("n=2 fidelity {f}"))?;
            }
        }
        parts.push(format!("n={n} D={} F={:.12}", plan.ancilla_dim(), fidelities[0]));
    }
    Ok(parts.join(", "))
}

fn ac4() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for seed in 0..100u64 {
        let n = 2 + (seed % 4) as usize;
        let u = oplib::random_isometry(1, n, seed).map_err(err)?;
        let report = sequentiality_test(&u, &tol()).map_err(err)?;
        ensure(report.implementable, || format!("seed {seed} (N={n}) rejected"))?;
        let plan = build_plan(&u, &tol()).map_err(err)?;
        let v = verify_plan(&plan, &u).map_err(err)?;
        ensure(v.max_error < 1e-9, || format!("seed {seed}: verification {:e}", v.max_error))?;
        worst = worst.max(v.max_error);
    }
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!("100/100 accepted, worst verification {worst:.1e}, {:?}", start.elapsed()))
}

fn test_operators() -> Vec<(String, Isometry)> {
    let mut ops = vec![
        ("cnot".to_string(), oplib::cnot()),
        ("swap".into(), oplib::swap()),
        ("cphase".into(), oplib::controlled_phase(1.1)),
        ("shor".into(), oplib::shor_encoder()),
        ("cloner:2".into(), oplib::gisin_massar_cloner(2).unwrap()),
        ("cloner:3".into(), oplib::gisin_massar_cloner(3).unwrap()),
    ];
    for n in 2..=5 {
        ops.push((format!("ghz:{n}"), oplib::ghz_isometry(n).unwrap()));
    }
    for seed in 0..8u64 {
        let n = 2 + (seed % 4) as usize;
        ops.push((format!("random:1,{n},{seed}"), oplib::random_isometry(1, n, seed).unwrap()));
    }
    for (m, n) in [(2, 3), (2, 4), (3, 3), (3, 5)] {
        ops.push((format!("random:{m},{n},7"), oplib::random_isometry(m, n, 7).unwrap()));
    }
    for (m, n) in [(2, 3), (2, 5), (3, 5)] {
        ops.push((format!("sequential:{m},{n}"), random_sequential_isometry(m, n, 11)));
    }
    for n in 2..=3 {
        ops.push((format!("product:{n}"), random_product(n, 40 + n as u64)));
    }
    ops
}

fn ac5() -> Outcome {
    let ops = test_operators();
    let mut planned = 0;
    for (name, u) in &ops {
        let report = sequentiality_test(u, &tol()).map_err(err)?;
        let oracle = bipartition_ranks(u, 1e-10);
        let n = u.n_out();
        ensure(report.bond_dims[1..n] == oracle[..], || {
            format!("{name}: canonical {:?} vs oracle {oracle:?}", report.bond_dims)
        })?;
        let max_bond = report.bond_dims.iter().copied().max().unwrap();
        if report.implementable {
            let plan = build_plan(u, &tol()).map_err(err)?;
            ensure(plan.ancilla_dim() == max_bond, || {
                format!("{name}: ancilla {} vs max bond {max_bond}", plan.ancilla_dim())
            })?;
            ensure(report.ancilla_dim_if_yes == Some(max_bond), || format!("{name}: report"))?;
            planned += 1;
        }
    }
    Ok(format!("{} operators match the oracle, {planned} plans at optimal D", ops.len()))
}

fn ac6() -> Outcome {
    let mut cases: Vec<(String, Isometry)> = vec![
        ("shor".into(), oplib::shor_encoder()),
        ("ghz:3".into(), oplib::ghz_isometry(3).unwrap()),
        ("cloner:2".into(), oplib::gisin_massar_cloner(2).unwrap()),
        ("cloner:3".into(), oplib::gisin_massar_cloner(3).unwrap()),
    ];
    for seed in 0..20u64 {
        let n = 2 + (seed % 4) as usize;
        cases.push((format!("random:1,{n},{}", 200 + seed), oplib::random_isometry(1, n, 200 + seed).unwrap()));
    }
    let mut ghz_gap = None;
    for (name, u) in &cases {
        let n = u.n_out();
        let (a, _) = state_to_mps(&u.column(0), &vec![2; n], 1e-10).map_err(err)?;
        let (b, _) = state_to_mps(&u.column(1), &vec![2; n], 1e-10).map_err(err)?;
        let bound = a.max_bond_dim() + b.max_bond_dim();
        let cor = corollary_construct(&a, &b).map_err(err)?;
        let err_cor = cor.to_matrix().sub(u.matrix()).max_abs();
        ensure(err_cor < 1e-10, || format!("{name}: construction error {err_cor:e}"))?;
        let canonical = sequentiality_test(u, &tol()).map_err(err)?.bond_dims;
        let d = canonical.iter().copied().max().unwrap();
        ensure(d <= bound, || format!("{name}: D = {d} > D0 + D1 = {bound}"))?;
        if name == "ghz:3" {
            ensure(d < bound, || format!("GHZ not strictly below the bound: {d} vs {bound}"))?;
            ghz_gap = Some((d, bound));
        }
    }
    let (d, bound) = ghz_gap.unwrap();
    Ok(format!("{} cases within D0 + D1; GHZ D = {d} < {bound}", cases.len()))
}

fn ac7() -> Outcome {
    let mut ops: Vec<Isometry> = vec![
        oplib::cnot(),
        oplib::swap(),
        oplib::controlled_phase(std::f64::consts::PI),
        oplib::controlled_phase(0.3),
        oplib::controlled_phase(0.0),
    ];
    let mut seed = 0u64;
    while ops.len() < 50 {
        let n = 2 + (seed % 2) as usize;
        if seed.is_multiple_of(2) {
            ops.push(oplib::random_unitary(n, 900 + seed).unwrap());
        } else {
            ops.push(random_product(n, 900 + seed));
        }
        seed += 1;
    }
    let (mut accepted, mut rejected) = (0, 0);
    for (idx, u) in ops.iter().enumerate() {
        let verdict = sequentiality_test(u, &tol()).map_err(err)?.implementable;
        let ranks = operator_schmidt_ranks(u, 1e-10).map_err(err)?;
        let local = ranks.iter().all(|&r| r == 1);
        ensure(verdict == local, || format!("case {idx}: verdict {verdict}, ranks {ranks:?}"))?;
        if verdict {
            accepted += 1;
        } else {
            rejected += 1;
        }
    }
    Ok(format!("{} unitaries agree ({accepted} local, {rejected} entangling)", ops.len()))
}

fn ac8() -> Outcome {
    let mut worst_canon: f64 = 0.0;
    let mut worst_spec: f64 = 0.0;
    let mut count = 0;
    let mut objects: Vec<(String, seqfactory::mps::Mps, seqfactory::mps::CanonicalWeights)> =
        Vec::new();
    for (name, u) in test_operators() {
        let (op, w) = operator_to_mps(&u, 1e-10).map_err(err)?;
        objects.push((name, op.mps().clone(), w));
    }
    for seed in 0..5u64 {
        let psi = random_state(6, seed);
        let (mps, w) = state_to_mps(&psi, &[2; 6], 1e-10).map_err(err)?;
        objects.push((format!("state:{seed}"), mps, w));
    }
    for (idx, (name, mps, w)) in objects.iter().enumerate() {
        let first = check_canonical(mps, w, 1e-10);
        let scrambled = scramble_gauge(mps, 1, 3000 + idx as u64);
        let (again, w2) = canonicalize(&scrambled, 1e-10).map_err(err)?;
        let second = check_canonical(&again, &w2, 1e-10);
        worst_canon = worst_canon.max(first.max()).max(second.max());
        ensure(first.passes && second.passes, || {
            format!("{name}: residuals {first:?} / {second:?}")
        })?;
        ensure(w.lambdas.len() == w2.lambdas.len(), || format!("{name}: cut count"))?;
        for (x, y) in w.lambdas.iter().zip(&w2.lambdas) {
            ensure(x.len() == y.len(), || format!("{name}: spectrum length"))?;
            let mut x = x.clone();
            let mut y = y.clone();
            x.sort_by(|a, b| b.total_cmp(a));
            y.sort_by(|a, b| b.total_cmp(a));
            for (p, q) in x.iter().zip(&y) {
                worst_spec = worst_spec.max((p - q).abs());
            }
        }
        ensure(worst_spec < 1e-10, || format!("{name}: spectra differ by {worst_spec:e}"))?;
        let verdict = gauge_check((mps, w), (&again, &w2), 1e-8);
        ensure(verdict.related, || format!("{name}: gauge check {verdict:?}"))?;
        count += 1;
    }
    Ok(format!(
        "{count} objects, canonical residual {worst_canon:.1e}, spectra {worst_spec:.1e}"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("AC1", "CNOT rejection, products accepted", ac1),
        ("AC2", "Shor encoder with a 4-dimensional ancilla", ac2),
        ("AC3", "Cloners within 2n and equal clones", ac3),
        ("AC4", "1->N universality", ac4),
        ("AC5", "Canonical bonds equal bipartition ranks", ac5),
        ("AC6", "D0 + D1 bound", ac6),
        ("AC7", "Verdict equals local-unitary test at M = N", ac7),
        ("AC8", "Canonical-form suite", ac8),
    ];
    let mut failed = 0;
    for (id, title, run) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|p| Err(format!("panicked: {p:?}")));
        match outcome {
            Ok(detail) => println!("[PASS] {id} {title}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {id} {title}: {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
