use super::{CanonicalWeights, Mps};
use crate::linalg::{spectral_norm, ComplexMatrix, C64};

/// Maximum residuals of the three canonical-form conditions.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalResiduals {
    /// `max_m ‖Σ_i A_i† A_i − I‖`.
    pub left_normalization: f64,
    /// `max_m ‖Σ_i A_i Λ^[m−1] A_i† − Λ^[m]‖`.
    pub weight_recursion: f64,
    /// `max_c |tr Λ^[c] − 1|`, or infinity when the weights do not fit the
    /// bonds.
    pub weight_trace: f64,
    /// Every weight strictly positive.
    pub weights_positive: bool,
    pub passes: bool,
}

impl CanonicalResiduals {
    pub fn max(&self) -> f64 {
        self.left_normalization
            .max(self.weight_recursion)
            .max(self.weight_trace)
    }
}

/// Measures how far `mps` with `weights` is from canonical form. Norms are
/// spectral.
pub fn check_canonical(mps: &Mps, weights: &CanonicalWeights, tol: f64) -> CanonicalResiduals {
    let n = mps.num_sites();
    let bonds = mps.bond_dims();

    let mut left_normalization: f64 = 0.0;
    for site in mps.sites() {
        let dim = site[0].cols();
        let mut acc = ComplexMatrix::zeros(dim, dim);
        for a in site {
            acc.add_assign(&a.adjoint_matmul(a));
        }
        let dev = acc.sub(&ComplexMatrix::identity(dim));
        left_normalization = left_normalization.max(norm(&dev));
    }

    let shapes_fit = weights.lambdas.len() + 1 == n
        && weights
            .lambdas
            .iter()
            .enumerate()
            .all(|(c, l)| l.len() == bonds[c + 1]);
    if !shapes_fit {
        return CanonicalResiduals {
            left_normalization,
            weight_recursion: f64::INFINITY,
            weight_trace: f64::INFINITY,
            weights_positive: false,
            passes: false,
        };
    }

    let mut weight_recursion: f64 = 0.0;
    for (m, site) in mps.sites().iter().enumerate() {
        let before = ComplexMatrix::diag_real(&weights.on_bond(m));
        let after = ComplexMatrix::diag_real(&weights.on_bond(m + 1));
        let mut acc = ComplexMatrix::zeros(after.rows(), after.cols());
        for a in site {
            acc.add_assign(&a.matmul(&before).matmul(&a.adjoint()));
        }
        weight_recursion = weight_recursion.max(norm(&acc.sub(&after)));
    }

    let mut weight_trace: f64 = 0.0;
    let mut weights_positive = true;
    for l in &weights.lambdas {
        weight_trace = weight_trace.max((l.iter().sum::<f64>() - 1.0).abs());
        weights_positive &= l.iter().all(|&x| x > 0.0);
    }

    let passes = left_normalization < tol
        && weight_recursion < tol
        && weight_trace < tol
        && weights_positive;
    CanonicalResiduals {
        left_normalization,
        weight_recursion,
        weight_trace,
        weights_positive,
        passes,
    }
}

/// Outcome of testing whether two canonical forms differ only by the bond
/// unitaries `Ã^[m]_i = V_m A^[m]_i V_{m−1}†`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeVerdict {
    pub related: bool,
    /// Largest consistency, unitarity or commutation residual found.
    pub residual: f64,
    pub reason: Option<String>,
}

impl GaugeVerdict {
    fn reject(reason: impl Into<String>) -> Self {
        Self {
            related: false,
            residual: f64::INFINITY,
            reason: Some(reason.into()),
        }
    }
}

/// Decides whether `b` is a gauge transform of `a`.
///
/// Starting from `V_0 = 1`, each bond unitary is recovered from
/// `Ã_i V_{m−1} = V_m A_i`: multiplying by `Λ^[m−1] A_i†` and summing over
/// `i` gives `V_m = (Σ_i Ã_i V_{m−1} Λ^[m−1] A_i†) (Λ^[m])^{-1}`. The candidate
/// is then tested for unitarity, for commuting with `Λ^[m]` and for
/// reproducing every `Ã_i`; the last one must be `V_N = 1`. Degenerate
/// weights need no special handling since only existence is tested.
pub fn gauge_check(
    a: (&Mps, &CanonicalWeights),
    b: (&Mps, &CanonicalWeights),
    tol: f64,
) -> GaugeVerdict {
    let ((ma, wa), (mb, wb)) = (a, b);
    if ma.physical_dims() != mb.physical_dims() {
        return GaugeVerdict::reject("physical dimensions differ");
    }
    if ma.bond_dims() != mb.bond_dims() {
        return GaugeVerdict::reject(format!(
            "bond dimensions differ: {:?} vs {:?}",
            ma.bond_dims(),
            mb.bond_dims()
        ));
    }
    if (ma.scale() - mb.scale()).abs() > tol * ma.scale().max(1.0) {
        return GaugeVerdict::reject(format!(
            "overall scales differ: {} vs {}",
            ma.scale(),
            mb.scale()
        ));
    }
    if wa.lambdas.len() + 1 != ma.num_sites() || wb.lambdas.len() != wa.lambdas.len() {
        return GaugeVerdict::reject("weights do not match the site count");
    }
    let mut residual: f64 = 0.0;
    for (c, (la, lb)) in wa.lambdas.iter().zip(&wb.lambdas).enumerate() {
        if la.len() != lb.len() {
            return GaugeVerdict::reject(format!("weight counts differ on cut {}", c + 1));
        }
        for (x, y) in la.iter().zip(lb) {
            residual = residual.max((x - y).abs());
        }
    }
    if residual >= tol {
        return GaugeVerdict {
            related: false,
            residual,
            reason: Some(format!("Schmidt spectra differ by {residual:.3e}")),
        };
    }

    let mut v_prev = ComplexMatrix::identity(1);
    for m in 0..ma.num_sites() {
        let before = ComplexMatrix::diag_real(&wa.on_bond(m));
        let after = wa.on_bond(m + 1);
        let dim = after.len();
        let mut x = ComplexMatrix::zeros(dim, dim);
        for (ai, bi) in ma.site(m).iter().zip(mb.site(m)) {
            x.add_assign(&bi.matmul(&v_prev).matmul(&before).matmul(&ai.adjoint()));
        }
        let mut v = x;
        for r in 0..dim {
            for (c, &w) in after.iter().enumerate() {
                v[(r, c)] /= C64::new(w, 0.0);
            }
        }

        for (ai, bi) in ma.site(m).iter().zip(mb.site(m)) {
            let lhs = bi.matmul(&v_prev);
            let rhs = v.matmul(ai);
            residual = residual.max(lhs.sub(&rhs).frobenius_norm());
        }
        residual = residual.max(v.gram_residual());
        let lam = ComplexMatrix::diag_real(&after);
        residual = residual.max(v.matmul(&lam).sub(&lam.matmul(&v)).frobenius_norm());
        v_prev = v;
    }
    residual = residual.max((v_prev[(0, 0)] - C64::new(1.0, 0.0)).norm());

    let related = residual < tol;
    GaugeVerdict {
        related,
        residual,
        reason: (!related).then(|| format!("no bond unitaries reproduce the tensors (residual {residual:.3e})")),
    }
}

fn norm(m: &ComplexMatrix) -> f64 {
    spectral_norm(m).unwrap_or(f64::INFINITY)
}
