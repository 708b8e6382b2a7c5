//! Where the `Q_{α,1}` curves cross each other and the comparison constants.

use gramq::coherence::{coherence_closed_z1, coherence_limit_alpha1, OptimizerConfig, ALPHA_ONE_WINDOW};
use gramq::ensemble::{gram, Canonical};
use gramq::matfun::DensityMatrix;
use gramq::quantifiers::{q_commutator, q_commutator_weighted, q_hol, q_l1, reference_constants, Quantifier};
use serde::Serialize;

use crate::CliResult;

pub const SCAN_STEP: f64 = 0.01;
pub const SCAN_END: f64 = 2.0;
pub const ALPHA_TOL: f64 = 1e-10;

/// Where the constant on the right-hand side came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantSource {
    /// Two-decimal tabulated value.
    Table,
    /// Recomputed to full precision.
    Computed,
}

impl ConstantSource {
    pub fn name(self) -> &'static str {
        match self {
            ConstantSource::Table => "table",
            ConstantSource::Computed => "computed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Crossing {
    Root {
        ensemble: String,
        lhs: String,
        rhs: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        rhs_value: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        source: Option<ConstantSource>,
        alpha_root: f64,
        residual: f64,
    },
    NoBracket {
        ensemble: String,
        lhs: String,
        rhs: String,
    },
}

impl Crossing {
    pub fn ensemble(&self) -> &str {
        match self {
            Crossing::Root { ensemble, .. } | Crossing::NoBracket { ensemble, .. } => ensemble,
        }
    }

    pub fn rhs(&self) -> &str {
        match self {
            Crossing::Root { rhs, .. } | Crossing::NoBracket { rhs, .. } => rhs,
        }
    }

    pub fn root(&self) -> Option<f64> {
        match self {
            Crossing::Root { alpha_root, .. } => Some(*alpha_root),
            Crossing::NoBracket { .. } => None,
        }
    }

    pub fn source(&self) -> Option<ConstantSource> {
        match self {
            Crossing::Root { source, .. } => *source,
            Crossing::NoBracket { .. } => None,
        }
    }
}

/// All roots of `f` on `(0, SCAN_END]`: sign changes between consecutive
/// scan points `k·SCAN_STEP` are bisected to `ALPHA_TOL`, exact zeros at a
/// scan point are taken as they are.
pub fn find_roots(f: impl Fn(f64) -> f64) -> Vec<f64> {
    let n = (SCAN_END / SCAN_STEP).round() as usize;
    let grid: Vec<(f64, f64)> = (1..=n)
        .map(|k| {
            let a = k as f64 * SCAN_STEP;
            (a, f(a))
        })
        .collect();
    let mut roots = Vec::new();
    for (i, &(a, fa)) in grid.iter().enumerate() {
        if fa == 0.0 {
            roots.push(a);
            continue;
        }
        let Some(&(b, fb)) = grid.get(i + 1) else { continue };
        if fa * fb < 0.0 {
            roots.push(bisect(&f, a, fa, b));
        }
    }
    roots
}

fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut f_lo: f64, mut hi: f64) -> f64 {
    while hi - lo > ALPHA_TOL {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `α ↦ Q_{α,1}`, continued by the limit at `α = 1`.
fn curve(g: &DensityMatrix) -> impl Fn(f64) -> f64 + '_ {
    move |a| {
        if (a - 1.0).abs() < ALPHA_ONE_WINDOW {
            coherence_limit_alpha1(g)
        } else {
            coherence_closed_z1(g, a).expect("alpha within (0, 2]")
        }
    }
}

fn collect(
    out: &mut Vec<Crossing>,
    ensemble: &str,
    rhs: String,
    rhs_value: Option<f64>,
    source: Option<ConstantSource>,
    diff: impl Fn(f64) -> f64,
) {
    let roots = find_roots(&diff);
    if roots.is_empty() {
        out.push(Crossing::NoBracket {
            ensemble: ensemble.to_string(),
            lhs: "qaz".into(),
            rhs,
        });
        return;
    }
    for r in roots {
        out.push(Crossing::Root {
            ensemble: ensemble.to_string(),
            lhs: "qaz".into(),
            rhs: rhs.clone(),
            rhs_value,
            source,
            alpha_root: r,
            residual: diff(r),
        });
    }
}

/// The constant intersections searched for each ensemble.
pub fn targets() -> Vec<(Canonical, Vec<Quantifier>)> {
    let b92 = Canonical::B92 {
        x: Canonical::B92_DEFAULT_OVERLAP,
    };
    vec![
        (b92, vec![Quantifier::Qcomm]),
        (Canonical::Diag, vec![Quantifier::Ql1, Quantifier::Qbig]),
        (
            Canonical::Trine,
            vec![
                Quantifier::Ql1,
                Quantifier::QFsRef,
                Quantifier::Qcomm,
                Quantifier::QclonRef,
                Quantifier::QHol,
                Quantifier::Qbig,
            ],
        ),
        (Canonical::Bb84, vec![Quantifier::QHol, Quantifier::Qbig]),
        (Canonical::Tetrad, vec![Quantifier::QHol]),
    ]
}

/// The trine-vs-diag curve crossing, then every curve-vs-constant
/// intersection against the tabulated constants. With `exact` set, roots
/// against recomputed constants follow each tabulated one (the tabulated-only
/// quantifiers have none).
pub fn crossings(exact: bool, cfg: &OptimizerConfig) -> CliResult<Vec<Crossing>> {
    let mut out = Vec::new();
    let trine = gram(&Canonical::Trine.ensemble()?);
    let diag = gram(&Canonical::Diag.ensemble()?);
    let (ft, fd) = (curve(&trine), curve(&diag));
    collect(&mut out, "trine", "qaz[diag]".into(), None, None, |a| ft(a) - fd(a));

    for (which, quantifiers) in targets() {
        let e = which.ensemble()?;
        let g = gram(&e);
        let f = curve(&g);
        let table = reference_constants(which)?;
        for q in quantifiers {
            let c = table.get(q).expect("tabulated");
            collect(&mut out, which.name(), q.to_string(), Some(c), Some(ConstantSource::Table), |a| f(a) - c);
            if !exact {
                continue;
            }
            let computed = match q {
                Quantifier::Ql1 => q_l1(&e),
                Quantifier::Qcomm => q_commutator(&e),
                Quantifier::Qbig => q_commutator_weighted(&e),
                Quantifier::QHol => q_hol(&e, cfg)?,
                _ => continue,
            };
            collect(&mut out, which.name(), q.to_string(), Some(computed), Some(ConstantSource::Computed), |a| {
                f(a) - computed
            });
        }
    }
    Ok(out)
}

pub fn to_text(rows: &[Crossing]) -> String {
    let header = ["ensemble", "lhs", "rhs", "rhs value", "source", "alpha root", "residual"].map(String::from);
    let body: Vec<[String; 7]> = rows
        .iter()
        .map(|c| match c {
            Crossing::Root {
                ensemble,
                lhs,
                rhs,
                rhs_value,
                source,
                alpha_root,
                residual,
            } => [
                ensemble.clone(),
                lhs.clone(),
                rhs.clone(),
                rhs_value.map(|v| format!("{v:.6}")).unwrap_or_else(|| "-".into()),
                source.map_or("curve", ConstantSource::name).to_string(),
                format!("{alpha_root:.10}"),
                format!("{residual:.1e}"),
            ],
            Crossing::NoBracket { ensemble, lhs, rhs } => [
                ensemble.clone(),
                lhs.clone(),
                rhs.clone(),
                "-".into(),
                "-".into(),
                "no bracket".into(),
                "-".into(),
            ],
        })
        .collect();
    crate::output::aligned(&header, &body)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_a_line_and_an_exact_grid_zero() {
        let r = find_roots(|a| a - 0.123456);
        assert_eq!(r.len(), 1);
        assert!((r[0] - 0.123456).abs() < 1e-10);
        let r = find_roots(|a| a - 0.5);
        assert_eq!(r, vec![0.5]);
    }

    #[test]
    fn no_sign_change_gives_no_roots() {
        assert!(find_roots(|a| a + 1.0).is_empty());
    }

    #[test]
    fn bb84_meets_q_at_one_half() {
        let rows = crossings(false, &OptimizerConfig::default()).unwrap();
        let bb = rows
            .iter()
            .find(|c| c.ensemble() == "bb84" && c.rhs() == "q")
            .and_then(Crossing::root)
            .unwrap();
        assert!((bb - 0.5).abs() < 1e-9);
        assert!(rows.iter().all(|c| c.source() != Some(ConstantSource::Computed)));
    }
}
