use std::path::{Path, PathBuf};

use seqfactory::oplib;
use seqfactory::Isometry;

use crate::formats::{decode_matrix, read_json, JsonMatrix, OperatorFile};
use crate::Failure;

pub const BUILTINS: &str =
    "cnot, swap, cz, shor, cloner:<n>, ghz:<n>, random:<m>,<n>,<seed>, product (with --factors)";

/// Resolves a builtin name, or reads an operator file.
pub fn load(spec: &str, factors: Option<&Path>) -> Result<Isometry, Failure> {
    let built = |r: seqfactory::Result<Isometry>| r.map_err(|e| Failure::input(format!("{spec}: {e}")));
    let (head, arg) = match spec.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (spec, None),
    };
    match (head, arg) {
        ("cnot", None) => Ok(oplib::cnot()),
        ("swap", None) => Ok(oplib::swap()),
        ("cz", None) => Ok(oplib::controlled_phase(std::f64::consts::PI)),
        ("shor", None) => Ok(oplib::shor_encoder()),
        ("cloner", Some(n)) => built(oplib::gisin_massar_cloner(parse_count(spec, n)?)),
        ("ghz", Some(n)) => built(oplib::ghz_isometry(parse_count(spec, n)?)),
        ("random", Some(args)) => {
            let parts: Vec<&str> = args.split(',').collect();
            if parts.len() != 3 {
                return Err(Failure::input(format!("{spec}: expected random:<m>,<n>,<seed>")));
            }
            let seed = parts[2]
                .trim()
                .parse::<u64>()
                .map_err(|e| Failure::input(format!("{spec}: seed: {e}")))?;
            built(oplib::random_isometry(
                parse_count(spec, parts[0])?,
                parse_count(spec, parts[1])?,
                seed,
            ))
        }
        ("product", None) => {
            let path = factors.ok_or_else(|| {
                Failure::input("product needs --factors <file> with a list of 2x2 matrices")
            })?;
            let raw: Vec<JsonMatrix> = read_json(path)?;
            let mats = raw
                .iter()
                .enumerate()
                .map(|(k, m)| decode_matrix(m, &format!("{}: factor {}", path.display(), k + 1)))
                .collect::<Result<Vec<_>, _>>()?;
            if mats.is_empty() {
                return Err(Failure::input(format!("{}: no factors", path.display())));
            }
            built(oplib::product_unitary(&mats))
        }
        _ => {
            let path = PathBuf::from(spec);
            if !path.is_file() {
                return Err(Failure::input(format!(
                    "'{spec}' is neither a builtin ({BUILTINS}) nor an operator file"
                )));
            }
            let file: OperatorFile = read_json(&path)?;
            file.to_isometry(&path.display().to_string())
        }
    }
}

fn parse_count(spec: &str, s: &str) -> Result<usize, Failure> {
    s.trim()
        .parse::<usize>()
        .map_err(|e| Failure::input(format!("{spec}: '{s}': {e}")))
}
