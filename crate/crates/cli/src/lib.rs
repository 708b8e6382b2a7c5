//! Library side of the `gramq` command-line tool: ensemble resolution,
//! evaluation records, α sweeps, the comparison table and crossing search.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt;
use std::path::Path;

use gramq::coherence::{AlphaZ, OptimizerConfig, Validity};
use gramq::ensemble::{parse_ensemble, Canonical, Ensemble};
use gramq::quantifiers::{
    accessible_info, holevo_chi, q_commutator, q_commutator_weighted, q_l1, quantumness, quantumness_normalized,
    reference_constants, Method, Quantifier, QuantumnessRecord,
};

pub mod crossings;
pub mod output;
pub mod sweep;
pub mod table1;

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY_FAILED: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Input(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Numeric(m) => write!(f, "numerical error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<gramq::Error> for CliError {
    fn from(e: gramq::Error) -> Self {
        match e {
            gramq::Error::NoConvergence => CliError::Numeric(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// An ensemble named on the command line, either canonical or read from a file.
#[derive(Debug, Clone)]
pub struct ResolvedEnsemble {
    pub name: String,
    pub ensemble: Ensemble,
    pub canonical: Option<Canonical>,
}

/// Canonical names win over paths. `x` is only accepted for `b92`.
pub fn resolve_ensemble(reference: &str, x: Option<f64>) -> CliResult<ResolvedEnsemble> {
    match Canonical::parse(reference, x) {
        Ok(c) => {
            if x.is_some() && !matches!(c, Canonical::B92 { .. }) {
                return Err(CliError::Input(format!("--x only applies to b92, not {}", c.name())));
            }
            return Ok(ResolvedEnsemble {
                name: c.name().to_string(),
                ensemble: c.ensemble()?,
                canonical: Some(c),
            });
        }
        Err(gramq::Error::UnknownName(_)) => {}
        Err(e) => return Err(e.into()),
    }
    let path = Path::new(reference);
    if !path.is_file() {
        return Err(CliError::Input(format!(
            "`{reference}` is neither a canonical ensemble ({}) nor a readable file",
            Canonical::all().map(|c| c.name()).join(", ")
        )));
    }
    if x.is_some() {
        return Err(CliError::Input("--x only applies to b92".into()));
    }
    let bytes = std::fs::read(path).map_err(|e| CliError::Input(format!("{reference}: {e}")))?;
    let ensemble = parse_ensemble(&bytes).map_err(|e| CliError::Input(format!("{reference}: {e}")))?;
    let name = ensemble
        .label()
        .map(str::to_string)
        .or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()))
        .unwrap_or_else(|| reference.to_string());
    Ok(ResolvedEnsemble {
        name,
        ensemble,
        canonical: None,
    })
}

/// Rejects `α ≤ 0` and returns a warning when `(α, z)` lies outside the
/// cases where the divergence is known to be a coherence measure.
pub fn check_params(alpha: f64, z: f64) -> CliResult<(AlphaZ, Option<String>)> {
    if !(alpha > 0.0) {
        return Err(CliError::Input(format!("alpha must be > 0, got {alpha}")));
    }
    let p = AlphaZ::new(alpha, z)?;
    let warning = (p.validity() == Validity::Outside).then(|| {
        format!("warning: (alpha, z) = ({alpha}, {z}) is outside validity; the value is computed but tagged outside")
    });
    Ok((p, warning))
}

/// A record plus what the printer needs beyond it.
#[derive(Debug, Clone)]
pub struct EvalRow {
    pub record: QuantumnessRecord,
    pub validity: Option<Validity>,
}

/// Evaluates the requested quantifiers. With no explicit list, every
/// quantifier that applies is evaluated (the α-z ones only when `params`
/// is given, the tabulated ones only for canonical ensembles).
pub fn evaluate(
    target: &ResolvedEnsemble,
    requested: &[Quantifier],
    params: Option<AlphaZ>,
    cfg: &OptimizerConfig,
) -> CliResult<Vec<EvalRow>> {
    let reference = target.canonical.and_then(|c| reference_constants(c).ok());
    let list: Vec<Quantifier> = if requested.is_empty() {
        Quantifier::ALL
            .into_iter()
            .filter(|q| if q.takes_alpha() { params.is_some() } else { true })
            .filter(|q| !is_tabulated(*q) || reference.is_some())
            .collect()
    } else {
        requested.to_vec()
    };

    let e = &target.ensemble;
    let mut out = Vec::with_capacity(list.len());
    for q in list {
        let (value, method, p) = match q {
            Quantifier::Qaz | Quantifier::QazNormalized => {
                let p = params.ok_or_else(|| CliError::Input(format!("{q} needs --alpha")))?;
                let r = if q == Quantifier::Qaz {
                    quantumness(e, p, cfg)?
                } else {
                    quantumness_normalized(e, p, cfg)?
                };
                if !r.converged {
                    return Err(CliError::Numeric(format!("{q} optimizer did not converge for {}", target.name)));
                }
                (r.value, r.method, Some(p))
            }
            Quantifier::Ql1 => (q_l1(e), Method::Direct, None),
            Quantifier::Qcomm => (q_commutator(e), Method::Direct, None),
            Quantifier::Qbig => (q_commutator_weighted(e), Method::Direct, None),
            Quantifier::QHol => {
                let acc = accessible_info(e, e.dim() * e.dim(), cfg)?;
                if !acc.converged {
                    return Err(CliError::Numeric(format!(
                        "accessible information search did not converge for {}",
                        target.name
                    )));
                }
                (holevo_chi(e) - acc.bits, Method::Optimizer, None)
            }
            Quantifier::QFsRef | Quantifier::QclonRef => {
                let row = reference.ok_or_else(|| {
                    CliError::Input(format!(
                        "{q} is tabulated only for the canonical ensembles (b92 at its default overlap), not {}",
                        target.name
                    ))
                })?;
                (row.get(q).expect("tabulated quantifier"), Method::ReferenceConstant, None)
            }
        };
        out.push(EvalRow {
            record: QuantumnessRecord::new(target.name.clone(), q, p, value, method)?,
            validity: p.map(|p| p.validity()),
        });
    }
    Ok(out)
}

fn is_tabulated(q: Quantifier) -> bool {
    matches!(q, Quantifier::QFsRef | Quantifier::QclonRef)
}
