//! Coherence as the minimal α-z Rényi divergence to an incoherent state.
//!
//! `C_{α,z}(ρ) = min_{σ ∈ I} D_{α,z}(ρ, σ)` with
//! `D_{α,z}(ρ, σ) = (f_{α,z}(ρ, σ)^{1/α} - 1) / (α - 1)`.
//!
//! At `z = 1` the minimum has the closed form
//! `(Σ_i ⟨i|ρ^α|i⟩^{1/α} - 1) / (α - 1)`; everywhere else it is found
//! numerically over the simplex of diagonal states. All values are base-free
//! except the `α → 1` limit, which is in nats.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matfun::{
    f_alpha_z, shannon_entropy, trace_power, von_neumann_entropy, CMatrix, DensityMatrix, LogBase,
};
use crate::optim::{logits_from_simplex, simplex_from_logits, NelderMead};
use crate::random::{random_simplex_point, seeded};

/// Below this distance from `α = 1` the divergence quotient is replaced by its limit.
pub const ALPHA_ONE_WINDOW: f64 = 1e-6;

const PARAM_EQ_TOL: f64 = 1e-12;

/// Which of the parameter regions with a proven coherence measure `(α, z)` falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Validity {
    /// `α ∈ (0,1)`, `z ≥ max(α, 1-α)`
    CaseI,
    /// `α ∈ (1,2]`, `z = 1`
    CaseIi,
    /// `α ∈ (1,2]`, `z = α/2`
    CaseIii,
    /// `α > 1`, `z = α`
    CaseIv,
    Outside,
}

impl Validity {
    pub fn classify(alpha: f64, z: f64) -> Self {
        let eq = |a: f64, b: f64| (a - b).abs() <= PARAM_EQ_TOL;
        if alpha > 0.0 && alpha < 1.0 && z >= alpha.max(1.0 - alpha) - PARAM_EQ_TOL {
            Validity::CaseI
        } else if alpha > 1.0 && alpha <= 2.0 && eq(z, 1.0) {
            Validity::CaseIi
        } else if alpha > 1.0 && alpha <= 2.0 && eq(z, alpha / 2.0) {
            Validity::CaseIii
        } else if alpha > 1.0 && eq(z, alpha) {
            Validity::CaseIv
        } else {
            Validity::Outside
        }
    }

    pub fn is_valid(self) -> bool {
        self != Validity::Outside
    }
}

impl fmt::Display for Validity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Validity::CaseI => "case (i)",
            Validity::CaseIi => "case (ii)",
            Validity::CaseIii => "case (iii)",
            Validity::CaseIv => "case (iv)",
            Validity::Outside => "outside validity",
        };
        f.write_str(s)
    }
}

/// Divergence parameters with their validity classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaZ {
    alpha: f64,
    z: f64,
    validity: Validity,
}

impl AlphaZ {
    pub fn new(alpha: f64, z: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("alpha must be finite (got {alpha})")));
        }
        if !(z.is_finite() && z > 0.0) {
            return Err(Error::InvalidParameter(format!("z must be > 0 (got {z})")));
        }
        Ok(Self {
            alpha,
            z,
            validity: Validity::classify(alpha, z),
        })
    }

    pub fn z1(alpha: f64) -> Result<Self> {
        Self::new(alpha, 1.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn validity(&self) -> Validity {
        self.validity
    }

    pub fn near_alpha_one(&self) -> bool {
        (self.alpha - 1.0).abs() < ALPHA_ONE_WINDOW
    }

    /// `z = 1` with `α ∈ (0,1) ∪ (1,2]`: the region where the closed form holds.
    pub fn has_closed_form(&self) -> bool {
        self.z == 1.0 && closed_form_alpha_ok(self.alpha)
    }
}

fn closed_form_alpha_ok(alpha: f64) -> bool {
    alpha > 0.0 && alpha <= 2.0 && alpha != 1.0
}

/// Diagonal state `Σ q_i |i⟩⟨i|` in the reference basis.
#[derive(Debug, Clone, PartialEq)]
pub struct IncoherentState {
    diag: Vec<f64>,
}

impl IncoherentState {
    pub fn new(diag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || diag.iter().any(|&q| !(q >= 0.0)) {
            return Err(Error::InvalidParameter(
                "incoherent state needs nonnegative weights".into(),
            ));
        }
        let s: f64 = diag.iter().sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "incoherent state weights sum to {s}"
            )));
        }
        Ok(Self { diag })
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            diag: vec![1.0 / n as f64; n],
        }
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_diagonal(&self.diag).expect("validated weights")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    /// Random Dirichlet starts, on top of the uniform and `diag(ρ)` starts.
    pub restarts: usize,
    pub max_iters: usize,
    pub convergence_tol: f64,
    /// Minimum simplex coordinate during the search.
    pub boundary_floor: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 16,
            max_iters: 2000,
            convergence_tol: 1e-10,
            boundary_floor: 1e-14,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0
            || !(self.convergence_tol > 0.0)
            || !(self.boundary_floor > 0.0 && self.boundary_floor < 1e-3)
        {
            return Err(Error::InvalidParameter("invalid optimizer configuration".into()));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }
}

fn require_alpha_not_one(alpha: f64) -> Result<()> {
    if alpha == 1.0 {
        return Err(Error::InvalidParameter(
            "alpha = 1 has no divergence quotient; use the limit".into(),
        ));
    }
    Ok(())
}

fn quotient(f: f64, alpha: f64) -> f64 {
    (f.powf(1.0 / alpha) - 1.0) / (alpha - 1.0)
}

/// `D_{α,z}(ρ, σ)`
pub fn divergence(rho: &DensityMatrix, sigma: &DensityMatrix, p: AlphaZ) -> Result<f64> {
    require_alpha_not_one(p.alpha)?;
    let f = f_alpha_z(rho, sigma, p.alpha, p.z)?;
    Ok(quotient(f, p.alpha))
}

/// `C_{α,1}(ρ) = (Σ_i ⟨i|ρ^α|i⟩^{1/α} - 1)/(α - 1)` for `α ∈ (0,1) ∪ (1,2]`.
pub fn coherence_closed_z1(rho: &DensityMatrix, alpha: f64) -> Result<f64> {
    if !closed_form_alpha_ok(alpha) {
        return Err(Error::ParameterOutOfRange(format!(
            "closed form needs alpha in (0,1) ∪ (1,2], got {alpha}"
        )));
    }
    if (alpha - 1.0).abs() < ALPHA_ONE_WINDOW {
        return Ok(coherence_limit_alpha1(rho));
    }
    let powered = rho.power(alpha);
    let s: f64 = powered
        .diagonal()
        .iter()
        .map(|d| d.re.max(0.0).powf(1.0 / alpha))
        .sum();
    Ok((s - 1.0) / (alpha - 1.0))
}

/// `S(diag ρ) - S(ρ)` in nats: `ln 2` times the relative entropy of coherence.
pub fn coherence_limit_alpha1(rho: &DensityMatrix) -> f64 {
    let diag: Vec<f64> = rho.diagonal().into_iter().map(|d| d.max(0.0)).collect();
    shannon_entropy(&diag, LogBase::Natural) - von_neumann_entropy(rho, LogBase::Natural)
}

#[derive(Debug, Clone)]
pub struct OptimizedCoherence {
    pub value: f64,
    pub argmin: IncoherentState,
    /// Whether the best local search met its convergence criterion.
    pub converged: bool,
    /// Set when the minimizer sits at the coordinate floor, i.e. the
    /// infimum is probably approached on the simplex boundary.
    pub near_boundary: bool,
    pub evaluations: usize,
}

/// Objective `q ↦ D_{α,z}(ρ, diag(q))` with `ρ^{α/z}` computed once.
struct SimplexObjective {
    rho_pow: CMatrix,
    rho_pow_diag: Vec<f64>,
    alpha: f64,
    z: f64,
    side_exp: f64,
}

impl SimplexObjective {
    fn new(rho: &DensityMatrix, p: AlphaZ) -> Self {
        let rho_pow = rho.power(p.alpha / p.z);
        let rho_pow_diag = rho_pow.diagonal().iter().map(|c| c.re).collect();
        Self {
            rho_pow,
            rho_pow_diag,
            alpha: p.alpha,
            z: p.z,
            side_exp: (1.0 - p.alpha) / (2.0 * p.z),
        }
    }

    fn eval(&self, q: &[f64]) -> f64 {
        let s: Vec<f64> = q
            .iter()
            .map(|&x| if x > 0.0 { x.powf(self.side_exp) } else { 0.0 })
            .collect();
        let f = if self.z == 1.0 {
            s.iter()
                .zip(&self.rho_pow_diag)
                .map(|(si, r)| si * si * r)
                .sum::<f64>()
                .max(0.0)
        } else {
            let n = s.len();
            let inner = DMatrix::<Complex64>::from_fn(n, n, |i, j| self.rho_pow[(i, j)] * (s[i] * s[j]));
            match trace_power(&inner, self.z) {
                Ok(v) => v,
                Err(_) => return f64::INFINITY,
            }
        };
        quotient(f, self.alpha)
    }
}

/// `min_{σ ∈ I} D_{α,z}(ρ, σ)` by multi-start Nelder-Mead in softmax coordinates.
pub fn coherence_optimized(
    rho: &DensityMatrix,
    p: AlphaZ,
    cfg: &OptimizerConfig,
) -> Result<OptimizedCoherence> {
    require_alpha_not_one(p.alpha)?;
    cfg.validate()?;
    let n = rho.dim();
    let diag = rho.diagonal();

    if n == 1 || rho.is_diagonal(1e-15) {
        let total: f64 = diag.iter().map(|d| d.max(0.0)).sum();
        let q: Vec<f64> = diag.iter().map(|d| d.max(0.0) / total).collect();
        return Ok(OptimizedCoherence {
            value: 0.0,
            argmin: IncoherentState::new(q)?,
            converged: true,
            near_boundary: false,
            evaluations: 0,
        });
    }

    let objective = SimplexObjective::new(rho, p);
    let floor = cfg.boundary_floor;

    let mut starts: Vec<Vec<f64>> = vec![vec![1.0 / n as f64; n], diag.clone()];
    let mut rng = seeded(cfg.seed);
    for _ in 0..cfg.restarts {
        starts.push(random_simplex_point(n, &mut rng));
    }

    let nm = NelderMead {
        max_iters: cfg.max_iters,
        f_tol: cfg.convergence_tol,
        x_tol: 1e-9,
        initial_step: 0.5,
    };

    let runs: Vec<(Vec<f64>, f64, bool, usize)> = starts
        .par_iter()
        .map(|start| {
            let mut evals = 0usize;
            let mut f = |theta: &[f64]| {
                evals += 1;
                objective.eval(&simplex_from_logits(theta, floor))
            };
            let mut best = nm.minimize(&mut f, &logits_from_simplex(start, floor));
            // Restart from the incumbent until it stops moving.
            for _ in 0..8 {
                let again = NelderMead {
                    initial_step: 0.05,
                    ..nm
                }
                .minimize(&mut f, &best.x);
                let gain = best.value - again.value;
                if again.value < best.value {
                    best = again;
                }
                if gain <= cfg.convergence_tol {
                    break;
                }
            }
            (best.x, best.value, best.converged, evals)
        })
        .collect();

    let evaluations = runs.iter().map(|r| r.3).sum();
    let (theta, value, converged, _) = runs
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least two starts");
    let q = simplex_from_logits(&theta, floor);
    let near_boundary = q.iter().any(|&x| x <= floor * 1e3);
    let total: f64 = q.iter().sum();
    let q = q.into_iter().map(|x| x / total).collect();
    Ok(OptimizedCoherence {
        value,
        argmin: IncoherentState::new(q)?,
        converged,
        near_boundary,
        evaluations,
    })
}

pub const ORACLE_MAX_DIM: usize = 4;
const ORACLE_REFINE_RADIUS: i64 = 10;

fn compositions(total: usize, parts: usize, out: &mut Vec<Vec<usize>>, prefix: &mut Vec<usize>) {
    if parts == 1 {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for k in 0..=total {
        prefix.push(k);
        compositions(total - k, parts - 1, out, prefix);
        prefix.pop();
    }
}

fn divergence_at(rho: &DensityMatrix, q: &[f64], p: AlphaZ) -> f64 {
    let Ok(sigma) = DensityMatrix::from_diagonal(q) else {
        return f64::INFINITY;
    };
    match divergence(rho, &sigma, p) {
        Ok(v) if v.is_finite() => v,
        _ => f64::INFINITY,
    }
}

/// Brute-force minimum of `D_{α,z}(ρ, σ)` over the regular simplex grid
/// `{k/steps}`, followed by one finer local grid around the best node.
///
/// Evaluates the divergence through the generic [`divergence`] path, so it
/// shares nothing with the optimizer beyond `f_{α,z}` itself. Grid nodes
/// where the divergence is undefined (support violations for `α > 1`) are
/// skipped.
pub fn oracle_grid(rho: &DensityMatrix, p: AlphaZ, steps: usize) -> Result<f64> {
    require_alpha_not_one(p.alpha)?;
    let n = rho.dim();
    if n > ORACLE_MAX_DIM {
        return Err(Error::DimensionTooLarge {
            dim: n,
            max: ORACLE_MAX_DIM,
        });
    }
    if steps < 50 {
        return Err(Error::InvalidParameter(format!("oracle needs steps >= 50, got {steps}")));
    }
    // Force the cached decomposition before going parallel.
    let _ = rho.spectrum();

    let mut nodes = Vec::new();
    compositions(steps, n, &mut nodes, &mut Vec::with_capacity(n));
    let scale = steps as f64;
    let (best_node, best_value) = nodes
        .par_iter()
        .map(|k| {
            let q: Vec<f64> = k.iter().map(|&x| x as f64 / scale).collect();
            (q.clone(), divergence_at(rho, &q, p))
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("grid is non-empty");

    if n == 1 {
        return Ok(best_value);
    }

    let h = 1.0 / (scale * ORACLE_REFINE_RADIUS as f64);
    let width = (2 * ORACLE_REFINE_RADIUS + 1) as usize;
    let free = n - 1;
    let count = width.pow(free as u32);
    let refined = (0..count)
        .into_par_iter()
        .filter_map(|mut idx| {
            let mut q = best_node.clone();
            let mut shift_sum = 0.0;
            for coord in q.iter_mut().take(free) {
                let k = (idx % width) as i64 - ORACLE_REFINE_RADIUS;
                idx /= width;
                let d = k as f64 * h;
                *coord += d;
                shift_sum += d;
            }
            q[free] -= shift_sum;
            if q.iter().any(|&x| x < 0.0) {
                return None;
            }
            let s: f64 = q.iter().sum();
            q.iter_mut().for_each(|x| *x /= s);
            Some(divergence_at(rho, &q, p))
        })
        .min_by(|a, b| a.total_cmp(b))
        .unwrap_or(f64::INFINITY);

    Ok(best_value.min(refined))
}
