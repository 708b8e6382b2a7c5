//! Quantumness of ensembles and the quantifiers it is compared against.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::coherence::{
    coherence_closed_z1, coherence_limit_alpha1, coherence_optimized, AlphaZ, OptimizerConfig,
};
use crate::ensemble::{gram, Canonical, Ensemble};
use crate::error::{Error, Result};
use crate::matfun::{eigh, max_abs_diff, shannon_entropy, von_neumann_entropy, CMatrix, CVector, LogBase};
use crate::optim::NelderMead;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantifier {
    /// Gram-matrix α-z coherence.
    Qaz,
    /// `Qaz / n`.
    QazNormalized,
    /// l1-norm coherence of the Gram matrix.
    Ql1,
    /// Commutator based, weights `p_i p_j`.
    Qcomm,
    /// Commutator based, weights `√(p_i p_j)`.
    #[serde(rename = "q")]
    Qbig,
    /// Holevo quantity minus accessible information, in bits.
    #[serde(rename = "qhol")]
    QHol,
    /// Information-transmission quantifier; tabulated only.
    #[serde(rename = "qfs_ref")]
    QFsRef,
    /// Symmetric-cloning quantifier; tabulated only.
    #[serde(rename = "qclon_ref")]
    QclonRef,
}

impl Quantifier {
    pub const ALL: [Quantifier; 8] = [
        Quantifier::Qaz,
        Quantifier::QazNormalized,
        Quantifier::Ql1,
        Quantifier::Qcomm,
        Quantifier::Qbig,
        Quantifier::QHol,
        Quantifier::QFsRef,
        Quantifier::QclonRef,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantifier::Qaz => "qaz",
            Quantifier::QazNormalized => "qaz_normalized",
            Quantifier::Ql1 => "ql1",
            Quantifier::Qcomm => "qcomm",
            Quantifier::Qbig => "q",
            Quantifier::QHol => "qhol",
            Quantifier::QFsRef => "qfs_ref",
            Quantifier::QclonRef => "qclon_ref",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            Quantifier::Qaz | Quantifier::QazNormalized => "base-free (nats at alpha=1)",
            Quantifier::QHol => "bits",
            _ => "dimensionless",
        }
    }

    pub fn takes_alpha(self) -> bool {
        matches!(self, Quantifier::Qaz | Quantifier::QazNormalized)
    }
}

impl fmt::Display for Quantifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Quantifier {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Quantifier::ALL
            .into_iter()
            .find(|q| q.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown quantifier `{s}`")))
    }
}

/// How a value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Explicit per-ensemble formula.
    ClosedForm,
    /// Diagonal of `ρ^α` from the eigendecomposition (valid at `z = 1`).
    GenericEq3,
    Optimizer,
    Oracle,
    /// `α → 1` limit.
    Limit,
    /// Direct evaluation of a non-variational definition.
    Direct,
    ReferenceConstant,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::GenericEq3 => "generic_eq3",
            Method::Optimizer => "optimizer",
            Method::Oracle => "oracle",
            Method::Limit => "limit",
            Method::Direct => "direct",
            Method::ReferenceConstant => "reference_constant",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One evaluated point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantumnessRecord {
    pub ensemble: String,
    pub quantifier: Quantifier,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
    pub value: f64,
    pub method: Method,
}

impl QuantumnessRecord {
    /// `params` must be present exactly for the α-z quantifiers.
    pub fn new(
        ensemble: impl Into<String>,
        quantifier: Quantifier,
        params: Option<AlphaZ>,
        value: f64,
        method: Method,
    ) -> Result<Self> {
        if quantifier.takes_alpha() != params.is_some() {
            return Err(Error::InvalidParameter(format!(
                "quantifier {quantifier} {} (alpha, z)",
                if quantifier.takes_alpha() { "requires" } else { "does not take" }
            )));
        }
        Ok(Self {
            ensemble: ensemble.into(),
            quantifier,
            alpha: params.map(|p| p.alpha()),
            z: params.map(|p| p.z()),
            value,
            method,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluated {
    pub value: f64,
    pub method: Method,
    /// False when an optimizer stopped on its iteration cap.
    pub converged: bool,
}

/// `Q_{α,z}(E) = C_{α,z}(G_E)`.
pub fn quantumness(e: &Ensemble, p: AlphaZ, cfg: &OptimizerConfig) -> Result<Evaluated> {
    let g = gram(e);
    if p.near_alpha_one() {
        return Ok(Evaluated {
            value: coherence_limit_alpha1(&g),
            method: Method::Limit,
            converged: true,
        });
    }
    if p.has_closed_form() {
        return Ok(Evaluated {
            value: coherence_closed_z1(&g, p.alpha())?,
            method: Method::GenericEq3,
            converged: true,
        });
    }
    let out = coherence_optimized(&g, p, cfg)?;
    Ok(Evaluated {
        value: out.value,
        method: Method::Optimizer,
        converged: out.converged,
    })
}

/// `Q'_{α,z}(E) = Q_{α,z}(E) / n`.
pub fn quantumness_normalized(e: &Ensemble, p: AlphaZ, cfg: &OptimizerConfig) -> Result<Evaluated> {
    let q = quantumness(e, p, cfg)?;
    Ok(Evaluated {
        value: q.value / e.len() as f64,
        ..q
    })
}

/// Explicit `Q_{α,1}` formulas for the six named ensembles.
pub fn closed_form_reference(which: Canonical, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 2.0 && alpha != 1.0) {
        return Err(Error::ParameterOutOfRange(format!(
            "closed forms hold for alpha in (0,1) ∪ (1,2], got {alpha}"
        )));
    }
    let a = alpha;
    let e = (a - 1.0) / a;
    let v = match which {
        Canonical::B92 { x } => {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::ParameterOutOfRange(format!("b92 overlap {x}")));
            }
            (2f64.powf(-1.0 / a) * ((1.0 - x).powf(a) + (1.0 + x).powf(a)).powf(1.0 / a) - 1.0) / (a - 1.0)
        }
        Canonical::Diag => {
            (2f64.powf(e) * ((1.0 + 2f64.powf(a - 1.0)).powf(1.0 / a) + 1.0) - 3.0) / (3.0 * (a - 1.0))
        }
        Canonical::Trine => ((2.0f64 / 3.0).powf((1.0 - a) / a) - 1.0) / (a - 1.0),
        Canonical::Bb84 | Canonical::Tetrad => (2f64.powf(e) - 1.0) / (a - 1.0),
        Canonical::Six => (3f64.powf(e) - 1.0) / (a - 1.0),
    };
    Ok(v)
}

/// `Σ_{i≠j} √(p_i p_j) |⟨ψ_i|ψ_j⟩|`
pub fn q_l1(e: &Ensemble) -> f64 {
    let g = gram(e);
    let m = g.matrix();
    let n = m.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[(i, j)].norm();
            }
        }
    }
    s
}

fn commutator_sum(e: &Ensemble, weight: impl Fn(f64, f64) -> f64) -> f64 {
    let projectors: Vec<CMatrix> = e.members().iter().map(|m| m.state.projector()).collect();
    let mut s = 0.0;
    for (i, a) in e.members().iter().enumerate() {
        for (j, b) in e.members().iter().enumerate() {
            if i == j {
                continue;
            }
            let c = &projectors[i] * &projectors[j] - &projectors[j] * &projectors[i];
            let tr = (&c * &c).trace().re;
            s -= weight(a.p, b.p) * tr;
        }
    }
    s.max(0.0)
}

/// `Q(E) = -Σ_{ij} √(p_i p_j) Tr[ρ_i, ρ_j]²`
pub fn q_commutator_weighted(e: &Ensemble) -> f64 {
    commutator_sum(e, |p, q| (p * q).sqrt())
}

/// `Q_comm(E) = -Σ_{ij} p_i p_j Tr[ρ_i, ρ_j]²`
pub fn q_commutator(e: &Ensemble) -> f64 {
    commutator_sum(e, |p, q| p * q)
}

/// Holevo quantity in bits. For pure members this is the entropy of the average state.
pub fn holevo_chi(e: &Ensemble) -> f64 {
    von_neumann_entropy(&e.average_state(), LogBase::Two).max(0.0)
}

/// A measurement `{M_k}`: PSD elements summing to the identity.
#[derive(Debug, Clone)]
pub struct PovmCandidate {
    elements: Vec<CMatrix>,
}

impl PovmCandidate {
    pub fn new(elements: Vec<CMatrix>) -> Result<Self> {
        let Some(first) = elements.first() else {
            return Err(Error::InvalidParameter("POVM has no elements".into()));
        };
        let d = first.nrows();
        let mut sum = CMatrix::zeros(d, d);
        for (k, m) in elements.iter().enumerate() {
            if m.shape() != (d, d) {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: m.nrows(),
                });
            }
            let spec = eigh(m)?;
            let min = spec.eigenvalues().last().copied().unwrap_or(0.0);
            if min < -1e-9 {
                return Err(Error::InvariantViolation {
                    member: Some(k),
                    message: format!("POVM element has eigenvalue {min}"),
                });
            }
            sum += m;
        }
        let defect = max_abs_diff(&sum, &CMatrix::identity(d, d));
        if defect > 1e-9 {
            return Err(Error::InvariantViolation {
                member: None,
                message: format!("POVM elements sum to identity only within {defect:e}"),
            });
        }
        Ok(Self { elements })
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn outcomes(&self) -> usize {
        self.elements.len()
    }

    /// Joint distribution `q_ik = p_i ⟨ψ_i|M_k|ψ_i⟩`.
    pub fn joint(&self, e: &Ensemble) -> Vec<Vec<f64>> {
        e.members()
            .iter()
            .map(|m| {
                let psi = m.state.amplitudes();
                self.elements
                    .iter()
                    .map(|el| m.p * psi.dotc(&(el * psi)).re.max(0.0))
                    .collect()
            })
            .collect()
    }

    /// `I(M(E))` in bits.
    pub fn mutual_information(&self, e: &Ensemble) -> f64 {
        mutual_information_bits(&self.joint(e))
    }
}

/// Mutual information of a joint distribution given as rows `i`, columns `k`.
pub fn mutual_information_bits(joint: &[Vec<f64>]) -> f64 {
    let rows: Vec<f64> = joint.iter().map(|r| r.iter().sum()).collect();
    let cols = joint[0].len();
    let col_sums: Vec<f64> = (0..cols).map(|k| joint.iter().map(|r| r[k]).sum()).collect();
    let flat: Vec<f64> = joint.iter().flatten().copied().collect();
    shannon_entropy(&rows, LogBase::Two) + shannon_entropy(&col_sums, LogBase::Two)
        - shannon_entropy(&flat, LogBase::Two)
}

#[derive(Debug, Clone)]
pub struct AccessibleInfo {
    /// Best mutual information found, in bits (a lower bound on the supremum).
    pub bits: f64,
    pub povm: PovmCandidate,
    pub converged: bool,
}

/// Rank-1 POVM `M_k = A^{-1/2} v_k v_k† A^{-1/2}`, `A = Σ v_k v_k†`, from
/// `2·d·m` real parameters. `None` if `A` is singular.
fn povm_vectors(params: &[f64], dim: usize, outcomes: usize) -> Option<Vec<CVector>> {
    let vs: Vec<CVector> = (0..outcomes)
        .map(|k| {
            CVector::from_fn(dim, |r, _| {
                let base = 2 * (k * dim + r);
                Complex64::new(params[base], params[base + 1])
            })
        })
        .collect();
    let mut a = CMatrix::zeros(dim, dim);
    for v in &vs {
        a += v * v.adjoint();
    }
    let spec = eigh(&a).ok()?;
    if spec.rank() < dim {
        return None;
    }
    let inv_sqrt = spec.map_support(|l| l.powf(-0.5));
    Some(vs.iter().map(|v| &inv_sqrt * v).collect())
}

fn info_of_vectors(e: &Ensemble, ws: &[CVector]) -> f64 {
    let joint: Vec<Vec<f64>> = e
        .members()
        .iter()
        .map(|m| {
            ws.iter()
                .map(|w| m.p * m.state.amplitudes().dotc(w).norm_sqr())
                .collect()
        })
        .collect();
    mutual_information_bits(&joint)
}

/// Best `I(M(E))` over rank-1 POVMs with `2..=outcomes_max` outcomes.
///
/// Every outcome count gets `cfg.restarts` random starts (at least one).
/// Starts are independent and seeded from `cfg.seed`, so results are
/// reproducible regardless of thread scheduling.
pub fn accessible_info(e: &Ensemble, outcomes_max: usize, cfg: &OptimizerConfig) -> Result<AccessibleInfo> {
    if outcomes_max < 2 {
        return Err(Error::InvalidParameter(format!(
            "accessible information needs at least 2 outcomes, got {outcomes_max}"
        )));
    }
    let d = e.dim();
    let jobs: Vec<(usize, u64)> = (2..=outcomes_max)
        .flat_map(|m| (0..cfg.restarts.max(1) as u64).map(move |r| (m, r)))
        .collect();

    let results: Vec<(f64, Vec<f64>, usize, bool)> = jobs
        .par_iter()
        .map(|&(m, r)| {
            let mut rng = ChaCha8Rng::seed_from_u64(
                cfg.seed ^ (m as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ r.wrapping_mul(0xD1B5_4A32_D192_ED03),
            );
            let n_params = 2 * d * m;
            let x0: Vec<f64> = (0..n_params).map(|_| StandardNormal.sample(&mut rng)).collect();
            let objective = |x: &[f64]| match povm_vectors(x, d, m) {
                Some(ws) => -info_of_vectors(e, &ws),
                None => f64::INFINITY,
            };
            let nm = NelderMead {
                max_iters: cfg.max_iters.max(400 * n_params),
                f_tol: 1e-12,
                x_tol: 1e-9,
                initial_step: 0.5,
            };
            let mut best = nm.minimize(objective, &x0);
            for _ in 0..6 {
                let again = NelderMead {
                    initial_step: 0.1,
                    ..nm
                }
                .minimize(objective, &best.x);
                let gain = best.value - again.value;
                if again.value < best.value {
                    best = again;
                }
                if gain <= 1e-12 {
                    break;
                }
            }
            (-best.value, best.x, m, best.converged)
        })
        .collect();

    let (bits, params, m, converged) = results
        .into_iter()
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .expect("at least one start");
    let ws = povm_vectors(&params, d, m).ok_or(Error::NoConvergence)?;
    let povm = PovmCandidate::new(ws.iter().map(|w| w * w.adjoint()).collect())?;
    Ok(AccessibleInfo {
        bits: bits.max(0.0),
        povm,
        converged,
    })
}

/// Holevo quantity minus accessible information, bits.
pub fn q_hol(e: &Ensemble, cfg: &OptimizerConfig) -> Result<f64> {
    let d = e.dim();
    let acc = accessible_info(e, d * d, cfg)?;
    Ok(holevo_chi(e) - acc.bits)
}

/// Tabulated comparison values, two decimals, for the six named ensembles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceRow {
    pub ql1: f64,
    pub qfs: f64,
    pub qclon_prime: f64,
    pub qhol: f64,
    pub qcomm: f64,
    pub q: f64,
}

impl ReferenceRow {
    pub fn get(&self, quantifier: Quantifier) -> Option<f64> {
        match quantifier {
            Quantifier::Ql1 => Some(self.ql1),
            Quantifier::QFsRef => Some(self.qfs),
            Quantifier::QclonRef => Some(self.qclon_prime),
            Quantifier::QHol => Some(self.qhol),
            Quantifier::Qcomm => Some(self.qcomm),
            Quantifier::Qbig => Some(self.q),
            Quantifier::Qaz | Quantifier::QazNormalized => None,
        }
    }
}

pub fn reference_constants(which: Canonical) -> Result<ReferenceRow> {
    let row = |ql1, qfs, qclon_prime, qhol, qcomm, q| ReferenceRow {
        ql1,
        qfs,
        qclon_prime,
        qhol,
        qcomm,
        q,
    };
    Ok(match which {
        Canonical::B92 { x } => {
            if (x - Canonical::B92_DEFAULT_OVERLAP).abs() > 1e-12 {
                return Err(Error::ParameterOutOfRange(format!(
                    "reference values exist only for b92 at x = 1/sqrt(2), got {x}"
                )));
            }
            row(0.71, 0.07, 0.02, 0.20, 0.25, 0.50)
        }
        Canonical::Diag => row(0.94, 0.13, 0.10, 0.25, 0.22, 0.67),
        Canonical::Trine => row(1.00, 0.25, 0.32, 0.42, 0.25, 0.75),
        Canonical::Bb84 => row(1.41, 0.25, 0.32, 0.50, 0.25, 1.00),
        Canonical::Tetrad => row(1.73, 0.33, 0.34, 0.59, 0.33, 1.33),
        Canonical::Six => row(2.83, 0.33, 0.35, 0.67, 0.33, 2.00),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{canonical, PureState};
    use crate::testutil::assert_close;

    fn e(c: Canonical) -> Ensemble {
        canonical(c).unwrap()
    }

    fn b92() -> Ensemble {
        e(Canonical::B92 {
            x: std::f64::consts::FRAC_1_SQRT_2,
        })
    }

    fn orthonormal() -> Ensemble {
        Ensemble::new(
            vec![
                (0.2, PureState::basis(3, 0)),
                (0.5, PureState::basis(3, 1)),
                (0.3, PureState::basis(3, 2)),
            ],
            None,
        )
        .unwrap()
    }

    /// `-Tr[P,Q]² = 2c(1-c)` with `c = |⟨ψ|φ⟩|²`.
    fn commutator_by_overlaps(e: &Ensemble, weight: impl Fn(f64, f64) -> f64) -> f64 {
        let mut s = 0.0;
        for a in e.members() {
            for b in e.members() {
                let c = a.state.inner(&b.state).norm_sqr();
                s += weight(a.p, b.p) * 2.0 * c * (1.0 - c);
            }
        }
        s
    }

    #[test]
    fn record_invariant() {
        let p = AlphaZ::z1(0.5).unwrap();
        assert!(QuantumnessRecord::new("x", Quantifier::Qaz, Some(p), 1.0, Method::GenericEq3).is_ok());
        assert!(QuantumnessRecord::new("x", Quantifier::Qaz, None, 1.0, Method::GenericEq3).is_err());
        assert!(QuantumnessRecord::new("x", Quantifier::Ql1, Some(p), 1.0, Method::Direct).is_err());
    }

    #[test]
    fn quantifier_names_round_trip() {
        for q in Quantifier::ALL {
            assert_eq!(q.name().parse::<Quantifier>().unwrap(), q);
        }
    }

    #[test]
    fn orthonormal_ensemble_has_no_quantumness() {
        let cfg = OptimizerConfig::default();
        let o = orthonormal();
        for &(a, z) in &[(0.5, 1.0), (1.5, 1.0), (0.5, 0.75), (2.0, 2.0)] {
            let v = quantumness(&o, AlphaZ::new(a, z).unwrap(), &cfg).unwrap().value;
            assert!(v.abs() < 1e-12);
        }
        assert_eq!(q_l1(&o), 0.0);
        assert_eq!(q_commutator(&o), 0.0);
        assert_eq!(q_commutator_weighted(&o), 0.0);
    }

    #[test]
    fn six_state_limit() {
        let v = quantumness(&e(Canonical::Six), AlphaZ::z1(1.0).unwrap(), &OptimizerConfig::default()).unwrap();
        assert_eq!(v.method, Method::Limit);
        assert_close(v.value, 3f64.ln(), 1e-12);
        assert!((v.value - 1.10).abs() < 0.005);
    }

    #[test]
    fn bb84_equals_tetrad() {
        let cfg = OptimizerConfig::default();
        for i in 1..40 {
            let a = i as f64 * 0.05;
            if (a - 1.0).abs() < 1e-9 {
                continue;
            }
            let p = AlphaZ::z1(a).unwrap();
            let x = quantumness(&e(Canonical::Bb84), p, &cfg).unwrap().value;
            let y = quantumness(&e(Canonical::Tetrad), p, &cfg).unwrap().value;
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn normalized_quantumness() {
        let cfg = OptimizerConfig::default();
        let p = AlphaZ::z1(0.5).unwrap();
        let single = Ensemble::new(vec![(1.0, PureState::basis(2, 0))], None).unwrap();
        assert_eq!(quantumness_normalized(&single, p, &cfg).unwrap().value, 0.0);
        let bb = e(Canonical::Bb84);
        assert_close(
            quantumness_normalized(&bb, p, &cfg).unwrap().value,
            quantumness(&bb, p, &cfg).unwrap().value / 4.0,
            1e-15,
        );
    }

    #[test]
    fn closed_form_examples() {
        assert_close(closed_form_reference(Canonical::Trine, 2.0).unwrap(), 1.5f64.sqrt() - 1.0, 1e-14);
        for &a in &[0.2, 0.7, 1.3, 2.0] {
            assert!(closed_form_reference(Canonical::B92 { x: 0.0 }, a).unwrap().abs() < 1e-14);
        }
        let target = 2.0 / 3.0 * 2f64.ln();
        assert!((closed_form_reference(Canonical::Diag, 1.0 - 1e-5).unwrap() - target).abs() < 1e-4);
        assert!((closed_form_reference(Canonical::Diag, 1.0 + 1e-5).unwrap() - target).abs() < 1e-4);
        assert!((target - 0.46).abs() < 0.005);
        assert!(closed_form_reference(Canonical::Six, 1.0).is_err());
        assert!(closed_form_reference(Canonical::Six, 2.5).is_err());
    }

    #[test]
    fn l1_values() {
        assert_close(q_l1(&b92()), std::f64::consts::FRAC_1_SQRT_2, 1e-14);
        assert_close(q_l1(&e(Canonical::Six)), 2.0 * 2f64.sqrt(), 1e-14);
        assert_close(q_l1(&e(Canonical::Trine)), 1.0, 1e-14);
    }

    #[test]
    fn commutator_values() {
        let bb = e(Canonical::Bb84);
        assert_close(q_commutator_weighted(&bb), 1.0, 1e-14);
        assert_close(q_commutator(&bb), 0.25, 1e-14);
        let t = e(Canonical::Trine);
        assert_close(q_commutator_weighted(&t), 0.75, 1e-14);
        assert_close(q_commutator(&t), 0.25, 1e-14);
        for c in Canonical::all() {
            let ens = e(c);
            assert_close(q_commutator(&ens), commutator_by_overlaps(&ens, |p, q| p * q), 1e-13);
            assert_close(
                q_commutator_weighted(&ens),
                commutator_by_overlaps(&ens, |p, q| (p * q).sqrt()),
                1e-13,
            );
        }
    }

    #[test]
    fn holevo_values() {
        let same = Ensemble::uniform(vec![PureState::basis(2, 0), PureState::basis(2, 0)], None).unwrap();
        assert!(holevo_chi(&same).abs() < 1e-14);
        assert_close(holevo_chi(&e(Canonical::Bb84)), 1.0, 1e-12);
        let h = -(2.0 / 3.0) * (2.0f64 / 3.0).log2() - (1.0 / 3.0) * (1.0f64 / 3.0).log2();
        assert_close(holevo_chi(&e(Canonical::Diag)), h, 1e-12);
    }

    #[test]
    fn accessible_info_orthogonal_pair() {
        let pair = Ensemble::new(vec![(0.3, PureState::basis(2, 0)), (0.7, PureState::basis(2, 1))], None).unwrap();
        let cfg = OptimizerConfig::default().with_restarts(4);
        let acc = accessible_info(&pair, 4, &cfg).unwrap();
        let h = -(0.3f64 * 0.3f64.log2() + 0.7 * 0.7f64.log2());
        assert_close(acc.bits, h, 1e-6);
        assert!(acc.bits <= holevo_chi(&pair) + 1e-9);
        assert!(q_hol(&pair, &cfg).unwrap().abs() < 1e-6);
    }

    #[test]
    fn accessible_info_bb84() {
        let cfg = OptimizerConfig::default().with_restarts(8);
        let bb = e(Canonical::Bb84);
        let acc = accessible_info(&bb, 4, &cfg).unwrap();
        assert_close(holevo_chi(&bb) - acc.bits, 0.5, 0.01);
        assert!(acc.bits <= holevo_chi(&bb) + 1e-9);
        assert!(matches!(accessible_info(&bb, 1, &cfg), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn povm_validation() {
        let i2 = CMatrix::identity(2, 2);
        assert!(PovmCandidate::new(vec![i2.scale(0.5), i2.scale(0.5)]).is_ok());
        assert!(PovmCandidate::new(vec![i2.scale(0.5)]).is_err());
        assert!(PovmCandidate::new(vec![i2.scale(1.5), i2.scale(-0.5)]).is_err());
    }

    #[test]
    fn reference_rows() {
        let r = reference_constants(Canonical::B92 {
            x: Canonical::B92_DEFAULT_OVERLAP,
        })
        .unwrap();
        assert_eq!(r, ReferenceRow { ql1: 0.71, qfs: 0.07, qclon_prime: 0.02, qhol: 0.20, qcomm: 0.25, q: 0.50 });
        let t = reference_constants(Canonical::Trine).unwrap();
        assert_eq!((t.ql1, t.qfs, t.q), (1.0, 0.25, 0.75));
        let s = reference_constants(Canonical::Six).unwrap();
        assert_eq!(s, ReferenceRow { ql1: 2.83, qfs: 0.33, qclon_prime: 0.35, qhol: 0.67, qcomm: 0.33, q: 2.0 });
        assert!(reference_constants(Canonical::B92 { x: 0.3 }).is_err());
    }
}
