//! JSON file formats. Complex numbers are `[re, im]` pairs, matrices are
//! row-major arrays of rows, floats are written with 17 significant digits.

use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;
use seqfactory::{ComplexMatrix, Isometry, SequentialPlan, C64};

use crate::Failure;

pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Serialize, Deserialize)]
pub struct OperatorFile {
    pub m_qubits: usize,
    pub n_qubits: usize,
    pub matrix: JsonMatrix,
}

#[derive(Serialize, Deserialize)]
pub struct PlanFile {
    pub ancilla_dim: usize,
    pub m_in: usize,
    pub steps: Vec<JsonMatrix>,
    pub bond_dims: Vec<usize>,
    pub report: PlanReport,
}

#[derive(Serialize, Deserialize)]
pub struct PlanReport {
    pub implementable: bool,
    pub residuals: Vec<f64>,
    pub verification_error: f64,
    pub decoupling_residual: f64,
    pub tolerances: TolerancesJson,
}

#[derive(Serialize, Deserialize, Clone, Copy)]
pub struct TolerancesJson {
    pub rank_tol: f64,
    pub crit_tol: f64,
}

pub fn encode_matrix(m: &ComplexMatrix) -> JsonMatrix {
    (0..m.rows())
        .map(|r| m.row(r).iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

pub fn encode_vector(v: &[C64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn decode_matrix(rows: &JsonMatrix, what: &str) -> Result<ComplexMatrix, Failure> {
    let n_rows = rows.len();
    let n_cols = rows.first().map_or(0, Vec::len);
    if n_rows == 0 || n_cols == 0 {
        return Err(Failure::input(format!("{what}: empty matrix")));
    }
    let mut data = Vec::with_capacity(n_rows * n_cols);
    for (r, row) in rows.iter().enumerate() {
        if row.len() != n_cols {
            return Err(Failure::input(format!(
                "{what}: row {r} has {} entries, expected {n_cols}",
                row.len()
            )));
        }
        data.extend(row.iter().map(|&[re, im]| C64::new(re, im)));
    }
    ComplexMatrix::from_row_major(n_rows, n_cols, data)
        .map_err(|e| Failure::input(format!("{what}: {e}")))
}

impl OperatorFile {
    pub fn to_isometry(&self, what: &str) -> Result<Isometry, Failure> {
        let m = decode_matrix(&self.matrix, what)?;
        let (rows, cols) = (pow2(self.n_qubits, what)?, pow2(self.m_qubits, what)?);
        if m.shape() != (rows, cols) {
            return Err(Failure::input(format!(
                "{what}: matrix is {}x{}, expected {rows}x{cols} for {} -> {} qubits",
                m.rows(),
                m.cols(),
                self.m_qubits,
                self.n_qubits
            )));
        }
        Isometry::new(self.m_qubits, self.n_qubits, m)
            .map_err(|e| Failure::input(format!("{what}: {e}")))
    }
}

impl PlanFile {
    pub fn to_plan(&self, what: &str) -> Result<SequentialPlan, Failure> {
        let steps = self
            .steps
            .iter()
            .enumerate()
            .map(|(k, s)| decode_matrix(s, &format!("{what}: step {}", k + 1)))
            .collect::<Result<Vec<_>, _>>()?;
        SequentialPlan::new(self.ancilla_dim, self.m_in, steps, self.bond_dims.clone())
            .map_err(|e| Failure::input(format!("{what}: {e}")))
    }
}

fn pow2(qubits: usize, what: &str) -> Result<usize, Failure> {
    if qubits > 20 {
        return Err(Failure::input(format!("{what}: {qubits} qubits is too many")));
    }
    Ok(1 << qubits)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        Failure::input(format!(
            "{}:{}:{}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

/// Compact JSON with every float as `{:.16e}`, which round-trips exactly.
struct Digits17;

impl Formatter for Digits17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Digits17);
    value.serialize(&mut ser).expect("serializing to memory");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let mut text = to_json(value);
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}
