//! α sweeps of the Gram-matrix coherence.

use gramq::coherence::{coherence_limit_alpha1, AlphaZ, OptimizerConfig};
use gramq::ensemble::gram;
use gramq::quantifiers::{quantumness, Method, Quantifier, QuantumnessRecord};
use rayon::prelude::*;

use crate::{check_params, CliError, CliResult, ResolvedEnsemble};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub alpha_start: f64,
    pub alpha_end: f64,
    pub alpha_step: f64,
    pub z: f64,
    /// Grid points in `(1 - w, 1 + w)` are dropped; a single limit row at `α = 1` replaces them.
    pub exclude_window: f64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            alpha_start: 0.05,
            alpha_end: 2.0,
            alpha_step: 0.05,
            z: 1.0,
            exclude_window: 1e-3,
        }
    }
}

/// Grid values are rounded to 12 decimals so `0.05 * 3` prints as `0.15`.
fn snap(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

impl SweepSpec {
    pub fn validate(&self) -> CliResult<()> {
        let finite = [self.alpha_start, self.alpha_end, self.alpha_step, self.z, self.exclude_window]
            .iter()
            .all(|v| v.is_finite());
        if !finite || !(self.alpha_start < self.alpha_end) || !(self.alpha_step > 0.0) {
            return Err(CliError::Input(format!(
                "sweep needs finite start < end and step > 0, got start {}, end {}, step {}",
                self.alpha_start, self.alpha_end, self.alpha_step
            )));
        }
        if !(self.alpha_start > 0.0) {
            return Err(CliError::Input(format!("alpha must be > 0, got start {}", self.alpha_start)));
        }
        if !(self.z > 0.0) || self.exclude_window < 0.0 {
            return Err(CliError::Input("z must be > 0 and the window >= 0".into()));
        }
        Ok(())
    }

    /// α values in ascending order; `1.0` stands for the limit row.
    pub fn alphas(&self) -> Vec<f64> {
        let count = ((self.alpha_end - self.alpha_start) / self.alpha_step + 1e-9).floor() as usize;
        let mut out: Vec<f64> = (0..=count)
            .map(|i| snap(self.alpha_start + i as f64 * self.alpha_step))
            .filter(|a| (a - 1.0).abs() >= self.exclude_window && *a != 1.0)
            .collect();
        if self.alpha_start <= 1.0 && 1.0 <= self.alpha_end {
            out.push(1.0);
            out.sort_by(f64::total_cmp);
        }
        out
    }
}

/// Returns the records in (ensemble, α) order and any validity warnings.
pub fn sweep(
    targets: &[ResolvedEnsemble],
    spec: &SweepSpec,
    normalized: bool,
    cfg: &OptimizerConfig,
) -> CliResult<(Vec<QuantumnessRecord>, Vec<String>)> {
    spec.validate()?;
    let alphas = spec.alphas();
    let mut warnings = Vec::new();
    for &a in &alphas {
        if a != 1.0 {
            if let (_, Some(w)) = check_params(a, spec.z)? {
                warnings.push(w);
            }
        }
    }
    let quantifier = if normalized {
        Quantifier::QazNormalized
    } else {
        Quantifier::Qaz
    };

    let jobs: Vec<(usize, f64)> = (0..targets.len())
        .flat_map(|t| alphas.iter().map(move |&a| (t, a)))
        .collect();
    let rows: Vec<CliResult<QuantumnessRecord>> = jobs
        .par_iter()
        .map(|&(t, a)| {
            let target = &targets[t];
            let p = AlphaZ::new(a, spec.z)?;
            let (value, method) = if a == 1.0 {
                (coherence_limit_alpha1(&gram(&target.ensemble)), Method::Limit)
            } else {
                let r = quantumness(&target.ensemble, p, cfg)?;
                if !r.converged {
                    return Err(CliError::Numeric(format!(
                        "optimizer did not converge for {} at alpha = {a}",
                        target.name
                    )));
                }
                (r.value, r.method)
            };
            let value = if normalized {
                value / target.ensemble.len() as f64
            } else {
                value
            };
            Ok(QuantumnessRecord::new(target.name.clone(), quantifier, Some(p), value, method)?)
        })
        .collect();
    let records = rows.into_iter().collect::<CliResult<Vec<_>>>()?;
    Ok((records, warnings))
}
