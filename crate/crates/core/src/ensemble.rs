//! Pure-state ensembles and their Gram matrices.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::error::{Error, Result};
use crate::matfun::{max_abs_diff, CMatrix, CVector, DensityMatrix};

const NORM_TOL: f64 = 1e-10;
const PROB_SUM_TOL: f64 = 1e-10;
const UNITARY_TOL: f64 = 1e-10;

/// A Gram matrix is stored in the density-matrix role.
pub type GramMatrix = DensityMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
}

impl PureState {
    pub fn new(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if amplitudes.is_empty() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvariantViolation {
                member: None,
                message: format!("state vector has norm {norm}, expected 1"),
            });
        }
        Ok(Self { amplitudes })
    }

    pub fn from_amplitudes(amps: &[Complex64]) -> Result<Self> {
        Self::new(CVector::from_column_slice(amps))
    }

    /// Computational basis state `|index⟩` in dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = CVector::zeros(dim);
        v[index] = Complex64::new(1.0, 0.0);
        Self { amplitudes: v }
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// `|ψ⟩⟨ψ|`
    pub fn projector(&self) -> CMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        PureState {
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub p: f64,
    pub state: PureState,
}

/// Ordered list of `(p_i, |ψ_i⟩)` with strictly positive weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    members: Vec<Member>,
    dim: usize,
    label: Option<String>,
}

impl Ensemble {
    pub fn new(members: Vec<(f64, PureState)>, label: Option<String>) -> Result<Self> {
        let Some((_, first)) = members.first() else {
            return Err(Error::InvariantViolation {
                member: None,
                message: "ensemble has no members".into(),
            });
        };
        let dim = first.dim();
        for (i, (p, state)) in members.iter().enumerate() {
            if !(p.is_finite() && *p > 0.0) {
                return Err(Error::InvariantViolation {
                    member: Some(i),
                    message: format!("probability {p} is not strictly positive"),
                });
            }
            if state.dim() != dim {
                return Err(Error::InvariantViolation {
                    member: Some(i),
                    message: format!("state has dimension {}, expected {dim}", state.dim()),
                });
            }
        }
        let total: f64 = members.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvariantViolation {
                member: None,
                message: format!("probabilities sum to {total}, expected 1"),
            });
        }
        Ok(Self {
            members: members
                .into_iter()
                .map(|(p, state)| Member { p, state })
                .collect(),
            dim,
            label,
        })
    }

    /// Equal weights `1/n`.
    pub fn uniform(states: Vec<PureState>, label: Option<String>) -> Result<Self> {
        let n = states.len() as f64;
        Self::new(states.into_iter().map(|s| (1.0 / n, s)).collect(), label)
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.members.iter().map(|m| m.p).collect()
    }

    /// Average state `Σ p_i |ψ_i⟩⟨ψ_i|` on the underlying Hilbert space.
    pub fn average_state(&self) -> DensityMatrix {
        let mut acc = CMatrix::zeros(self.dim, self.dim);
        for m in &self.members {
            acc += m.state.projector().scale(m.p);
        }
        DensityMatrix::new(acc).expect("convex combination of pure states is a state")
    }

    /// Columns `√p_i |ψ_i⟩`.
    fn weighted_columns(&self) -> CMatrix {
        CMatrix::from_fn(self.dim, self.len(), |r, c| {
            let m = &self.members[c];
            m.state.amplitudes[r] * m.p.sqrt()
        })
    }
}

/// `G_ij = √(p_i p_j) ⟨ψ_i|ψ_j⟩`
pub fn gram(e: &Ensemble) -> GramMatrix {
    let v = e.weighted_columns();
    DensityMatrix::new(v.adjoint() * v).expect("Gram matrix of a valid ensemble is a state")
}

/// `G_{E,F}` with entries `√(p_i q_k) ⟨ψ_i|φ_k⟩`.
pub fn cross_gram(e: &Ensemble, f: &Ensemble) -> Result<CMatrix> {
    if e.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: e.dim(),
            found: f.dim(),
        });
    }
    Ok(e.weighted_columns().adjoint() * f.weighted_columns())
}

pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.ncols();
    max_abs_diff(&(u.adjoint() * u), &CMatrix::identity(n, n))
}

/// `U E = {(p_i, U|ψ_i⟩)}`
pub fn apply_unitary(e: &Ensemble, u: &CMatrix) -> Result<Ensemble> {
    if u.nrows() != u.ncols() || u.nrows() != e.dim() {
        return Err(Error::DimensionMismatch {
            expected: e.dim(),
            found: u.nrows(),
        });
    }
    let deviation = unitarity_defect(u);
    if deviation > UNITARY_TOL {
        return Err(Error::NotUnitary { deviation });
    }
    let members = e
        .members
        .iter()
        .map(|m| Member {
            p: m.p,
            state: PureState {
                amplitudes: u * &m.state.amplitudes,
            },
        })
        .collect();
    Ok(Ensemble {
        members,
        dim: e.dim,
        label: e.label.clone(),
    })
}

/// `E ⊗ F`, members ordered row-major over `(i, k)`.
pub fn tensor(e: &Ensemble, f: &Ensemble) -> Ensemble {
    let mut members = Vec::with_capacity(e.len() * f.len());
    for a in &e.members {
        for b in &f.members {
            members.push(Member {
                p: a.p * b.p,
                state: a.state.tensor(&b.state),
            });
        }
    }
    let label = match (e.label(), f.label()) {
        (Some(a), Some(b)) => Some(format!("{a}⊗{b}")),
        _ => None,
    };
    Ensemble {
        members,
        dim: e.dim * f.dim,
        label,
    }
}

/// Renormalized member-wise product of two ordered ensembles.
#[derive(Debug, Clone)]
pub struct HadamardProduct {
    pub ensemble: Ensemble,
    /// `Σ p_i q_i`; the unnormalized Gram matrix is `normalization * gram(ensemble)`.
    pub normalization: f64,
}

pub fn hadamard_product(e: &Ensemble, f: &Ensemble) -> Result<HadamardProduct> {
    if e.len() != f.len() {
        return Err(Error::LengthMismatch {
            left: e.len(),
            right: f.len(),
        });
    }
    let normalization: f64 = e.members.iter().zip(&f.members).map(|(a, b)| a.p * b.p).sum();
    if normalization <= 0.0 {
        return Err(Error::DegenerateEnsemble);
    }
    let members = e
        .members
        .iter()
        .zip(&f.members)
        .map(|(a, b)| Member {
            p: a.p * b.p / normalization,
            state: a.state.tensor(&b.state),
        })
        .collect();
    Ok(HadamardProduct {
        ensemble: Ensemble {
            members,
            dim: e.dim * f.dim,
            label: None,
        },
        normalization,
    })
}

/// The six named ensembles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Canonical {
    /// Two equiprobable qubit states with real overlap `x = sin θ`.
    B92 { x: f64 },
    Diag,
    Trine,
    Bb84,
    Tetrad,
    Six,
}

impl Canonical {
    pub const B92_DEFAULT_OVERLAP: f64 = FRAC_1_SQRT_2;

    /// The six ensembles in table order, B92 at `x = 1/√2`.
    pub fn all() -> [Canonical; 6] {
        [
            Canonical::B92 {
                x: Self::B92_DEFAULT_OVERLAP,
            },
            Canonical::Diag,
            Canonical::Trine,
            Canonical::Bb84,
            Canonical::Tetrad,
            Canonical::Six,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            Canonical::B92 { .. } => "b92",
            Canonical::Diag => "diag",
            Canonical::Trine => "trine",
            Canonical::Bb84 => "bb84",
            Canonical::Tetrad => "tetrad",
            Canonical::Six => "six",
        }
    }

    /// Parses a name; `x` only applies to `b92` and defaults to `1/√2`.
    pub fn parse(name: &str, x: Option<f64>) -> Result<Self> {
        let c = match name.to_ascii_lowercase().as_str() {
            "b92" => Canonical::B92 {
                x: x.unwrap_or(Self::B92_DEFAULT_OVERLAP),
            },
            "diag" | "diagonal" => Canonical::Diag,
            "trine" => Canonical::Trine,
            "bb84" => Canonical::Bb84,
            "tetrad" | "sic" => Canonical::Tetrad,
            "six" | "six-state" => Canonical::Six,
            other => return Err(Error::UnknownName(other.to_string())),
        };
        Ok(c)
    }

    pub fn ensemble(&self) -> Result<Ensemble> {
        canonical(*self)
    }
}

impl fmt::Display for Canonical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Canonical {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Canonical::parse(s, None)
    }
}

fn qubit(a: Complex64, b: Complex64) -> PureState {
    PureState {
        amplitudes: CVector::from_vec(vec![a, b]),
    }
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn canonical(which: Canonical) -> Result<Ensemble> {
    let s = FRAC_1_SQRT_2;
    let states = match which {
        Canonical::B92 { x } => {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::ParameterOutOfRange(format!(
                    "b92 overlap x must lie in [0, 1], got {x}"
                )));
            }
            let half = x.asin() / 2.0;
            let (sn, cs) = half.sin_cos();
            vec![qubit(re(cs), re(sn)), qubit(re(sn), re(cs))]
        }
        Canonical::Diag => vec![
            qubit(re(1.0), re(0.0)),
            qubit(re(0.0), re(1.0)),
            qubit(re(s), re(s)),
        ],
        Canonical::Trine => {
            let h = 3f64.sqrt() / 2.0;
            vec![
                qubit(re(1.0), re(0.0)),
                qubit(re(0.5), re(h)),
                qubit(re(0.5), re(-h)),
            ]
        }
        Canonical::Bb84 => vec![
            qubit(re(1.0), re(0.0)),
            qubit(re(0.0), re(1.0)),
            qubit(re(s), re(s)),
            qubit(re(s), re(-s)),
        ],
        Canonical::Tetrad => {
            let a = re(1.0 / 3f64.sqrt());
            let b = (2.0f64 / 3.0).sqrt();
            vec![
                qubit(re(1.0), re(0.0)),
                qubit(a, re(b)),
                qubit(a, Complex64::from_polar(b, 2.0 * PI / 3.0)),
                qubit(a, Complex64::from_polar(b, 4.0 * PI / 3.0)),
            ]
        }
        Canonical::Six => {
            let i = Complex64::new(0.0, s);
            vec![
                qubit(re(s), re(s)),
                qubit(re(s), re(-s)),
                qubit(re(s), i),
                qubit(re(s), -i),
                qubit(re(1.0), re(0.0)),
                qubit(re(0.0), re(1.0)),
            ]
        }
    };
    Ensemble::uniform(states, Some(which.name().to_string()))
}

// ---------------------------------------------------------------------------
// File format

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EnsembleDoc {
    dim: usize,
    #[serde(default)]
    label: Option<String>,
    members: Vec<MemberDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MemberDoc {
    p: f64,
    amplitudes: Vec<[f64; 2]>,
}

#[derive(Serialize)]
struct EnsembleOut<'a> {
    dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<&'a str>,
    members: Vec<MemberOut>,
}

#[derive(Serialize)]
struct MemberOut {
    p: Box<RawValue>,
    amplitudes: Vec<[Box<RawValue>; 2]>,
}

/// 17 significant digits; always round-trips an `f64` exactly.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn raw(x: f64) -> Box<RawValue> {
    RawValue::from_string(format_f64(x)).expect("scientific float literal is valid JSON")
}

pub fn serialize_ensemble(e: &Ensemble) -> String {
    let doc = EnsembleOut {
        dim: e.dim,
        label: e.label(),
        members: e
            .members
            .iter()
            .map(|m| MemberOut {
                p: raw(m.p),
                amplitudes: m
                    .state
                    .amplitudes
                    .iter()
                    .map(|c| [raw(c.re), raw(c.im)])
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("ensemble document serializes")
}

pub fn parse_ensemble(text: &[u8]) -> Result<Ensemble> {
    let doc: EnsembleDoc = serde_json::from_slice(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if doc.dim == 0 {
        return Err(Error::InvariantViolation {
            member: None,
            message: "dim must be positive".into(),
        });
    }
    let mut members = Vec::with_capacity(doc.members.len());
    for (i, m) in doc.members.into_iter().enumerate() {
        if m.amplitudes.len() != doc.dim {
            return Err(Error::InvariantViolation {
                member: Some(i),
                message: format!("{} amplitudes given, dim is {}", m.amplitudes.len(), doc.dim),
            });
        }
        let amps: Vec<Complex64> = m.amplitudes.iter().map(|[r, im]| Complex64::new(*r, *im)).collect();
        let state = PureState::from_amplitudes(&amps).map_err(|err| match err {
            Error::InvariantViolation { message, .. } => Error::InvariantViolation {
                member: Some(i),
                message,
            },
            other => other,
        })?;
        members.push((m.p, state));
    }
    Ensemble::new(members, doc.label)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matfun::eigvalsh;
    use crate::random::*;
    use crate::testutil::assert_close;

    fn c(x: f64) -> Complex64 {
        re(x)
    }

    #[test]
    fn orthogonal_pair_has_diagonal_gram() {
        let e = Ensemble::uniform(vec![PureState::basis(2, 0), PureState::basis(2, 1)], None).unwrap();
        let g = gram(&e);
        let expected = CMatrix::from_diagonal(&CVector::from_vec(vec![c(0.5), c(0.5)]));
        assert!(max_abs_diff(g.matrix(), &expected) < 1e-15);
        assert!(g.is_diagonal(1e-12));
    }

    #[test]
    fn b92_gram_matches_closed_matrix() {
        let g = gram(&canonical(Canonical::B92 { x: FRAC_1_SQRT_2 }).unwrap());
        let x = FRAC_1_SQRT_2;
        let expected = CMatrix::from_row_slice(2, 2, &[c(1.0), c(x), c(x), c(1.0)]).scale(0.5);
        assert!(max_abs_diff(g.matrix(), &expected) < 1e-12);
    }

    #[test]
    fn b92_overlap_is_x() {
        for &x in &[0.0, 0.1, 0.5, FRAC_1_SQRT_2, 0.99, 1.0] {
            let e = canonical(Canonical::B92 { x }).unwrap();
            let ov = e.members()[0].state.inner(&e.members()[1].state);
            assert_close(ov.re, x, 1e-14);
            assert_close(ov.im, 0.0, 1e-15);
        }
        assert!(matches!(
            canonical(Canonical::B92 { x: 1.5 }),
            Err(Error::ParameterOutOfRange(_))
        ));
    }

    #[test]
    fn diag_gram_matches_closed_matrix() {
        let s = FRAC_1_SQRT_2;
        let expected = CMatrix::from_row_slice(
            3,
            3,
            &[c(1.0), c(0.0), c(s), c(0.0), c(1.0), c(s), c(s), c(s), c(1.0)],
        )
        .scale(1.0 / 3.0);
        let g = gram(&canonical(Canonical::Diag).unwrap());
        assert!(max_abs_diff(g.matrix(), &expected) < 1e-15);
        let vals = g.spectrum().eigenvalues();
        assert_close(vals[0], 2.0 / 3.0, 1e-14);
        assert_close(vals[1], 1.0 / 3.0, 1e-14);
        assert_eq!(vals[2], 0.0);
    }

    #[test]
    fn trine_gram_matches_closed_matrix() {
        let expected = CMatrix::from_row_slice(
            3,
            3,
            &[c(2.0), c(1.0), c(1.0), c(1.0), c(2.0), c(-1.0), c(1.0), c(-1.0), c(2.0)],
        )
        .scale(1.0 / 6.0);
        let g = gram(&canonical(Canonical::Trine).unwrap());
        assert!(max_abs_diff(g.matrix(), &expected) < 1e-15);
    }

    #[test]
    fn bb84_gram_matches_closed_matrix() {
        let r = 2f64.sqrt();
        let expected = CMatrix::from_row_slice(
            4,
            4,
            &[
                c(r), c(0.0), c(1.0), c(1.0),
                c(0.0), c(r), c(1.0), c(-1.0),
                c(1.0), c(1.0), c(r), c(0.0),
                c(1.0), c(-1.0), c(0.0), c(r),
            ],
        )
        .scale(1.0 / (4.0 * r));
        let g = gram(&canonical(Canonical::Bb84).unwrap());
        assert!(max_abs_diff(g.matrix(), &expected) < 1e-15);
    }

    #[test]
    fn tetrad_gram_and_sic_overlaps() {
        let e = canonical(Canonical::Tetrad).unwrap();
        let r = 3f64.sqrt();
        let i = Complex64::new(0.0, 1.0);
        let expected = CMatrix::from_row_slice(
            4,
            4,
            &[
                c(r), c(1.0), c(1.0), c(1.0),
                c(1.0), c(r), i, -i,
                c(1.0), -i, c(r), i,
                c(1.0), i, -i, c(r),
            ],
        )
        .scale(1.0 / (4.0 * r));
        let g = gram(&e);
        assert!(max_abs_diff(g.matrix(), &expected) < 1e-14);
        let vals = g.spectrum().eigenvalues();
        for (v, want) in vals.iter().zip([0.5, 0.5, 0.0, 0.0]) {
            assert_close(*v, want, 1e-14);
        }
        for j in 0..4 {
            for k in 0..4 {
                if j != k {
                    let ov = e.members()[j].state.inner(&e.members()[k].state).norm_sqr();
                    assert_close(ov, 1.0 / 3.0, 1e-14);
                }
            }
        }
    }

    #[test]
    fn six_state_gram_matches_closed_matrix() {
        let r = 2f64.sqrt();
        let z = c(0.0);
        let i = Complex64::new(0.0, 1.0);
        let one = c(1.0);
        #[rustfmt::skip]
        let entries = [
            c(2.0), z, one + i, one - i, c(r), c(r),
            z, c(2.0), one - i, one + i, c(r), c(-r),
            one - i, one + i, c(2.0), z, c(r), -i * r,
            one + i, one - i, z, c(2.0), c(r), i * r,
            c(r), c(r), c(r), c(r), c(2.0), z,
            c(r), c(-r), i * r, -i * r, z, c(2.0),
        ];
        let expected = CMatrix::from_row_slice(6, 6, &entries).scale(1.0 / 12.0);
        let g = gram(&canonical(Canonical::Six).unwrap());
        assert!(max_abs_diff(g.matrix(), &expected) < 1e-15);
        assert_eq!(g.spectrum().rank(), 2);
    }

    #[test]
    fn cross_gram_cases() {
        let e = canonical(Canonical::Trine).unwrap();
        assert!(max_abs_diff(&cross_gram(&e, &e).unwrap(), gram(&e).matrix()) < 1e-15);

        let a = Ensemble::new(vec![(1.0, PureState::basis(2, 0))], None).unwrap();
        let b = Ensemble::new(vec![(1.0, PureState::basis(2, 1))], None).unwrap();
        assert_eq!(cross_gram(&a, &b).unwrap(), CMatrix::zeros(1, 1));

        let c3 = Ensemble::new(vec![(1.0, PureState::basis(3, 1))], None).unwrap();
        assert!(matches!(cross_gram(&a, &c3), Err(Error::DimensionMismatch { .. })));

        let mut rng = seeded(11);
        let f = canonical(Canonical::Six).unwrap();
        let u = random_unitary(2, &mut rng);
        let lhs = cross_gram(&apply_unitary(&e, &u).unwrap(), &apply_unitary(&f, &u).unwrap()).unwrap();
        assert!(max_abs_diff(&lhs, &cross_gram(&e, &f).unwrap()) < 1e-12);
    }

    #[test]
    fn unitary_action() {
        let e = canonical(Canonical::B92 { x: FRAC_1_SQRT_2 }).unwrap();
        assert_eq!(apply_unitary(&e, &CMatrix::identity(2, 2)).unwrap(), e);

        let s = FRAC_1_SQRT_2;
        let hadamard = CMatrix::from_row_slice(2, 2, &[c(s), c(s), c(s), c(-s)]);
        let moved = apply_unitary(&e, &hadamard).unwrap();
        assert!(max_abs_diff(gram(&moved).matrix(), gram(&e).matrix()) < 1e-10);

        let t = canonical(Canonical::Trine).unwrap();
        let u = random_unitary(2, &mut seeded(5));
        let moved = apply_unitary(&t, &u).unwrap();
        assert!(max_abs_diff(gram(&moved).matrix(), gram(&t).matrix()) < 1e-10);

        let not_unitary = CMatrix::identity(2, 2).scale(2.0);
        assert!(matches!(apply_unitary(&e, &not_unitary), Err(Error::NotUnitary { .. })));
        assert!(matches!(
            apply_unitary(&e, &CMatrix::identity(3, 3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn tensor_products() {
        let e = canonical(Canonical::B92 { x: FRAC_1_SQRT_2 }).unwrap();
        let single = Ensemble::new(vec![(1.0, PureState::basis(2, 0))], None).unwrap();
        assert!(max_abs_diff(gram(&tensor(&e, &single)).matrix(), gram(&e).matrix()) < 1e-15);

        let ee = tensor(&e, &e);
        assert_eq!(ee.len(), 4);
        let kron = gram(&e).matrix().kronecker(gram(&e).matrix());
        assert!(max_abs_diff(gram(&ee).matrix(), &kron) < 1e-12);

        let td = tensor(&canonical(Canonical::Trine).unwrap(), &canonical(Canonical::Diag).unwrap());
        let g = gram(&td);
        assert_eq!(g.dim(), 9);
        assert_close(g.matrix().trace().re, 1.0, 1e-12);
        assert!(*eigvalsh(g.matrix()).unwrap().last().unwrap() > -1e-12);
    }

    #[test]
    fn hadamard_products() {
        let t = canonical(Canonical::Trine).unwrap();
        let h = hadamard_product(&t, &t).unwrap();
        assert_close(h.normalization, 1.0 / 3.0, 1e-15);
        let g = gram(&t);
        let square = g.matrix().component_mul(g.matrix());
        // uniform ensembles: G∘G = gram(E∘E) / n
        assert!(max_abs_diff(&gram(&h.ensemble).matrix().scale(h.normalization), &square) < 1e-12);
        assert!(max_abs_diff(gram(&h.ensemble).matrix(), &square.scale(3.0)) < 1e-12);

        let a = Ensemble::new(vec![(1.0, PureState::basis(2, 0))], None).unwrap();
        let aa = hadamard_product(&a, &a).unwrap();
        assert_eq!(aa.normalization, 1.0);
        assert!(max_abs_diff(gram(&aa.ensemble).matrix(), &CMatrix::identity(1, 1)) < 1e-15);

        let d = canonical(Canonical::Bb84).unwrap();
        assert!(matches!(hadamard_product(&t, &d), Err(Error::LengthMismatch { left: 3, right: 4 })));
    }

    #[test]
    fn canonical_names() {
        assert_eq!("trine".parse::<Canonical>().unwrap(), Canonical::Trine);
        assert!(matches!("pentad".parse::<Canonical>(), Err(Error::UnknownName(_))));
        for c in Canonical::all() {
            assert_eq!(Canonical::parse(c.name(), None).unwrap(), c);
            assert_eq!(canonical(c).unwrap().label(), Some(c.name()));
        }
    }

    #[test]
    fn file_round_trip() {
        for c in Canonical::all() {
            let e = canonical(c).unwrap();
            let text = serialize_ensemble(&e);
            let back = parse_ensemble(text.as_bytes()).unwrap();
            assert_eq!(back, e);
            assert_eq!(gram(&back).matrix(), gram(&e).matrix());
        }
    }

    #[test]
    fn file_probability_sum_violation() {
        let text = r#"{"dim": 1, "label": "bad", "members": [
            {"p": 0.5, "amplitudes": [[1.0, 0.0]]},
            {"p": 0.4, "amplitudes": [[1.0, 0.0]]}]}"#;
        let err = parse_ensemble(text.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::InvariantViolation { member: None, .. }), "{err}");
    }

    #[test]
    fn file_unnormalized_state_names_member() {
        let text = r#"{"dim": 2, "members": [
            {"p": 0.5, "amplitudes": [[1.0, 0.0], [0.0, 0.0]]},
            {"p": 0.5, "amplitudes": [[1.0, 0.0], [1.0, 0.0]]}]}"#;
        let err = parse_ensemble(text.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::InvariantViolation { member: Some(1), .. }), "{err}");
        assert!(err.to_string().contains("member 1"));
    }

    #[test]
    fn file_syntax_error_has_position() {
        let err = parse_ensemble(b"{\"dim\": 2,\n \"members\": [oops]}").unwrap_err();
        match err {
            Error::Parse { line, column, .. } => {
                assert_eq!(line, 2);
                assert!(column > 0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn file_amplitude_count_mismatch() {
        let text = r#"{"dim": 2, "members": [{"p": 1.0, "amplitudes": [[1.0, 0.0]]}]}"#;
        let err = parse_ensemble(text.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::InvariantViolation { member: Some(0), .. }));
    }
}
