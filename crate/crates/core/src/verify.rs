//! Randomized property suites over every module.
//!
//! Each suite draws its cases from a seeded stream and reports how many
//! cases ran and which failed. Failures carry a replayable description of
//! the inputs (ensembles are written in the JSON file format).

use std::time::Instant;

use rand::Rng;

use crate::coherence::{
    coherence_closed_z1, coherence_limit_alpha1, coherence_optimized, divergence, oracle_grid, AlphaZ,
    OptimizerConfig, Validity,
};
use crate::ensemble::{
    apply_unitary, canonical, cross_gram, gram, hadamard_product, serialize_ensemble, tensor, Canonical, Ensemble,
    PureState,
};
use crate::matfun::{
    eigh, eigvalsh, f_alpha_z, max_abs_diff, mat_power_support, von_neumann_entropy, CMatrix, DensityMatrix,
    LogBase,
};
use crate::quantifiers::{holevo_chi, quantumness, quantumness_normalized};
use crate::random::*;

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
    pub seconds: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Case counts. `Full` uses the counts stated for the acceptance runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Budget {
    Quick,
    Full,
}

impl Budget {
    fn pick(self, quick: usize, full: usize) -> usize {
        match self {
            Budget::Quick => quick,
            Budget::Full => full,
        }
    }
}

struct Collector {
    name: &'static str,
    cases: usize,
    failures: Vec<String>,
    start: Instant,
}

impl Collector {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            cases: 0,
            failures: Vec::new(),
            start: Instant::now(),
        }
    }

    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(describe());
        }
    }

    fn finish(self) -> SuiteReport {
        SuiteReport {
            name: self.name,
            cases: self.cases,
            failures: self.failures,
            seconds: self.start.elapsed().as_secs_f64(),
        }
    }
}

fn mat_str(m: &CMatrix) -> String {
    let rows: Vec<String> = m
        .row_iter()
        .map(|r| {
            let cells: Vec<String> = r.iter().map(|c| format!("[{:.17e},{:.17e}]", c.re, c.im)).collect();
            format!("[{}]", cells.join(","))
        })
        .collect();
    format!("[{}]", rows.join(","))
}

fn ens_str(e: &Ensemble) -> String {
    serialize_ensemble(e).split_whitespace().collect::<Vec<_>>().join("")
}

fn random_valid_params<R: Rng + ?Sized>(rng: &mut R) -> AlphaZ {
    let case = rng.random_range(0..4);
    let p = match case {
        0 => {
            let a: f64 = rng.random_range(0.05..0.95);
            AlphaZ::new(a, a.max(1.0 - a) + rng.random_range(0.0..1.0))
        }
        1 => AlphaZ::new(rng.random_range(1.05..2.0), 1.0),
        2 => {
            let a: f64 = rng.random_range(1.05..2.0);
            AlphaZ::new(a, a / 2.0)
        }
        _ => {
            let a: f64 = rng.random_range(1.05..3.0);
            AlphaZ::new(a, a)
        }
    };
    p.expect("sampled parameters are finite")
}

/// Ensemble whose states are mutually orthogonal (a rotated basis).
fn random_orthogonal_ensemble<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Ensemble {
    let u = random_unitary(d, rng);
    let probs = random_simplex_point(n, rng);
    let members = (0..n)
        .map(|i| {
            let state = PureState::new(u.column(i).into_owned()).expect("unitary column");
            (probs[i], state)
        })
        .collect();
    Ensemble::new(members, None).expect("valid")
}

pub fn eigendecomposition(seed: u64, budget: Budget) -> SuiteReport {
    let mut c = Collector::new("eigendecomposition");
    let mut rng = seeded(seed);
    for _ in 0..budget.pick(50, 200) {
        let d = rng.random_range(1..=8);
        let m = random_hermitian(d, &mut rng);
        let s = match eigh(&m) {
            Ok(s) => s,
            Err(e) => {
                c.check(false, || format!("eigh failed ({e}) on {}", mat_str(&m)));
                continue;
            }
        };
        let recon = max_abs_diff(&s.reconstruct(), &m);
        let u = s.eigenvectors();
        let unit = max_abs_diff(&(u.adjoint() * u), &CMatrix::identity(d, d));
        let sorted = s.eigenvalues().windows(2).all(|w| w[0] >= w[1]);
        c.check(recon < 1e-10 && unit < 1e-10 && sorted, || {
            format!("reconstruction {recon:e}, unitarity {unit:e}, sorted {sorted}: {}", mat_str(&m))
        });
    }
    c.finish()
}

pub fn matrix_powers(seed: u64, budget: Budget) -> SuiteReport {
    let mut c = Collector::new("matrix powers");
    let mut rng = seeded(seed);
    for _ in 0..budget.pick(30, 100) {
        let d = rng.random_range(1..=6);
        let rho = random_density(d, &mut rng);
        let (a, b) = (rng.random_range(0.05..2.0), rng.random_range(0.05..2.0));
        let m = rho.matrix();
        let lhs = mat_power_support(m, a + b).unwrap();
        let rhs = mat_power_support(m, a).unwrap() * mat_power_support(m, b).unwrap();
        let err = max_abs_diff(&lhs, &rhs);
        c.check(err < 1e-9, || format!("power composition a={a}, b={b}: {err:e} on {}", mat_str(m)));

        let rank = rng.random_range(1..=d);
        let low = random_density_of_rank(d, rank, &mut rng);
        let spec = eigh(low.matrix()).unwrap();
        let pinv = mat_power_support(low.matrix(), -1.0).unwrap();
        let err = max_abs_diff(&(low.matrix() * pinv), &spec.support_projector());
        c.check(err < 1e-9, || format!("generalized inverse: {err:e} on {}", mat_str(low.matrix())));
    }
    c.finish()
}

pub fn f_bounds(seed: u64, budget: Budget) -> SuiteReport {
    let mut c = Collector::new("f bounds and tensor multiplicativity");
    let mut rng = seeded(seed);
    for _ in 0..budget.pick(50, 200) {
        let d = rng.random_range(1..=5);
        let rho = random_density_of_rank(d, rng.random_range(1..=d), &mut rng);
        let sigma = random_density(d, &mut rng);
        let z = rng.random_range(0.2..3.0);

        let a_low = rng.random_range(0.01..0.99);
        let f = f_alpha_z(&rho, &sigma, a_low, z).unwrap();
        c.check(f <= 1.0 + 1e-9, || {
            format!("f={f} > 1 at alpha={a_low}, z={z}: rho={} sigma={}", mat_str(rho.matrix()), mat_str(sigma.matrix()))
        });

        let a_high = rng.random_range(1.01..3.0);
        let f = f_alpha_z(&rho, &sigma, a_high, z).unwrap();
        c.check(f >= 1.0 - 1e-9, || {
            format!("f={f} < 1 at alpha={a_high}, z={z}: rho={} sigma={}", mat_str(rho.matrix()), mat_str(sigma.matrix()))
        });
    }
    for _ in 0..budget.pick(20, 60) {
        let (d1, d2) = (rng.random_range(1..=3), rng.random_range(1..=3));
        let (r1, r2) = (random_density(d1, &mut rng), random_density(d2, &mut rng));
        let (s1, s2) = (random_density(d1, &mut rng), random_density(d2, &mut rng));
        let a = if rng.random_bool(0.5) {
            rng.random_range(0.05..0.95)
        } else {
            rng.random_range(1.05..2.5)
        };
        let z = rng.random_range(0.3..2.5);
        let root = |x: f64| x.powf(1.0 / a);
        let joint = root(f_alpha_z(&r1.tensor(&r2), &s1.tensor(&s2), a, z).unwrap());
        let split = root(f_alpha_z(&r1, &s1, a, z).unwrap()) * root(f_alpha_z(&r2, &s2, a, z).unwrap());
        let err = (joint - split).abs();
        c.check(err < 1e-8 * split.max(1.0), || {
            format!("tensor multiplicativity off by {err:e} at alpha={a}, z={z}")
        });
    }
    c.finish()
}

pub fn divergence_sign(seed: u64, budget: Budget) -> SuiteReport {
    let mut c = Collector::new("divergence nonnegativity");
    let mut rng = seeded(seed);
    for _ in 0..budget.pick(50, 200) {
        let d = rng.random_range(1..=5);
        let rho = random_density(d, &mut rng);
        let sigma = random_density(d, &mut rng);
        let p = random_valid_params(&mut rng);
        let v = divergence(&rho, &sigma, p).unwrap();
        c.check(v >= -1e-9, || {
            format!("D={v} at {p:?}: rho={} sigma={}", mat_str(rho.matrix()), mat_str(sigma.matrix()))
        });
    }
    c.finish()
}

pub fn gram_invariants(seed: u64, budget: Budget) -> SuiteReport {
    let mut c = Collector::new("gram invariants");
    let mut rng = seeded(seed);
    for _ in 0..budget.pick(100, 500) {
        let (n, d) = (rng.random_range(1..=8), rng.random_range(1..=6));
        let e = random_ensemble(n, d, &mut rng);
        let g = gram(&e);
        let m = g.matrix();
        let trace = m.trace();
        let min_eig = eigvalsh(m).unwrap().last().copied().unwrap();
        let diag_err = e
            .probabilities()
            .iter()
            .enumerate()
            .map(|(i, p)| (m[(i, i)].re - p).abs().max(m[(i, i)].im.abs()))
            .fold(0.0, f64::max);
        let ok = (trace.re - 1.0).abs() < 1e-10 && min_eig > -1e-10 && diag_err < 1e-10;
        c.check(ok, || {
            format!("trace {trace}, min eigenvalue {min_eig:e}, diagonal error {diag_err:e}: {}", ens_str(&e))
        });
    }
    c.finish()
}

pub fn spectral_bridge(seed: u64, budget: Budget) -> SuiteReport {
    let mut c = Collector::new("spectral bridge");
    let mut rng = seeded(seed);
    for _ in 0..budget.pick(30, 100) {
        let (n, d) = (rng.random_range(1..=6), rng.random_range(1..=5));
        let e = random_ensemble(n, d, &mut rng);
        let g = gram(&e);
        let avg = e.average_state();
        let nonzero = |v: Vec<f64>| v.into_iter().filter(|x| x.abs() > 1e-9).collect::<Vec<_>>();
        let a = nonzero(eigvalsh(g.matrix()).unwrap());
        let b = nonzero(eigvalsh(avg.matrix()).unwrap());
        let same = a.len() == b.len() && a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-9);
        c.check(same, || format!("spectra {a:?} vs {b:?}: {}", ens_str(&e)));
        let chi = holevo_chi(&e);
        let s_gram = von_neumann_entropy(&g, LogBase::Two);
        c.check((chi - s_gram).abs() < 1e-9, || format!("chi {chi} vs S(G) {s_gram}: {}", ens_str(&e)));
    }
    c.finish()
}

pub fn unitary_invariance(seed: u64, budget: Budget, cfg: &OptimizerConfig) -> SuiteReport {
    let mut c = Collector::new("unitary invariance");
    let mut rng = seeded(seed);
    for i in 0..budget.pick(20, 100) {
        let (n, d) = (rng.random_range(1..=5), rng.random_range(1..=4));
        let e = random_ensemble(n, d, &mut rng);
        let f = random_ensemble(rng.random_range(1..=5), d, &mut rng);
        let u = random_unitary(d, &mut rng);
        let ue = apply_unitary(&e, &u).unwrap();
        let uf = apply_unitary(&f, &u).unwrap();
        let err = max_abs_diff(gram(&ue).matrix(), gram(&e).matrix());
        c.check(err < 1e-10, || format!("gram changed by {err:e} under {}: {}", mat_str(&u), ens_str(&e)));
        let err = max_abs_diff(&cross_gram(&ue, &uf).unwrap(), &cross_gram(&e, &f).unwrap());
        c.check(err < 1e-10, || format!("cross gram changed by {err:e}"));

        let p = if i % 4 == 3 && n <= 4 {
            random_valid_params(&mut rng)
        } else {
            AlphaZ::z1(rng.random_range(0.1..2.0)).unwrap()
        };
        let a = quantumness(&e, p, cfg).unwrap().value;
        let b = quantumness(&ue, p, cfg).unwrap().value;
        c.check((a - b).abs() < 1e-9, || format!("Q {a} vs {b} at {p:?}: {}", ens_str(&e)));
    }
    c.finish()
}

pub fn products(seed: u64, budget: Budget) -> SuiteReport {
    let mut c = Collector::new("tensor and hadamard products");
    let mut rng = seeded(seed);
    for _ in 0..budget.pick(30, 100) {
        let (n, m) = (rng.random_range(1..=4), rng.random_range(1..=4));
        let (d1, d2) = (rng.random_range(1..=3), rng.random_range(1..=3));
        let e = random_ensemble(n, d1, &mut rng);
        let f = random_ensemble(m, d2, &mut rng);
        let ef = tensor(&e, &f);
        let kron = gram(&e).matrix().kronecker(gram(&f).matrix());
        let err = max_abs_diff(gram(&ef).matrix(), &kron);
        c.check(err < 1e-10, || format!("tensor gram off by {err:e}: {} {}", ens_str(&e), ens_str(&f)));

        let g = random_ensemble(n, d2, &mut rng);
        let h = hadamard_product(&e, &g).unwrap();
        let entrywise = gram(&e).matrix().component_mul(gram(&g).matrix());
        let err = max_abs_diff(&gram(&h.ensemble).matrix().scale(h.normalization), &entrywise);
        c.check(err < 1e-10, || format!("hadamard gram off by {err:e}: {} {}", ens_str(&e), ens_str(&g)));
    }
    c.finish()
}

pub fn faithfulness(seed: u64, budget: Budget, cfg: &OptimizerConfig) -> SuiteReport {
    let mut c = Collector::new("positivity and faithfulness");
    let mut rng = seeded(seed);
    for i in 0..budget.pick(20, 100) {
        let d = rng.random_range(2..=4);
        let n = rng.random_range(2..=4);
        let p = if i % 5 == 0 {
            random_valid_params(&mut rng)
        } else {
            AlphaZ::z1(if rng.random_bool(0.5) {
                rng.random_range(0.05..0.95)
            } else {
                rng.random_range(1.05..2.0)
            })
            .unwrap()
        };
        let e = random_ensemble(n, d, &mut rng);
        let q = quantumness(&e, p, cfg).unwrap().value;
        c.check(q > 1e-9, || format!("Q={q} for a non-orthogonal ensemble at {p:?}: {}", ens_str(&e)));

        let o = random_orthogonal_ensemble(n.min(d), d, &mut rng);
        let diagonal = gram(&o).is_diagonal(1e-12);
        let q = quantumness(&o, p, cfg).unwrap().value;
        c.check(diagonal && q.abs() < 1e-9, || {
            format!("orthogonal ensemble: diagonal gram {diagonal}, Q={q} at {p:?}: {}", ens_str(&o))
        });
    }
    c.finish()
}

/// Normalized subadditivity `Q'(E⊗F) <= Q'(E) + Q'(F)` on random pairs,
/// half of them in case (i) and half in case (ii).
pub fn subadditivity(seed: u64, budget: Budget, cfg: &OptimizerConfig) -> SuiteReport {
    let mut c = Collector::new("normalized subadditivity");
    let mut rng = seeded(seed);
    for i in 0..budget.pick(20, 100) {
        let (n, m) = (rng.random_range(1..=4), rng.random_range(1..=4));
        let (d1, d2) = (rng.random_range(1..=4), rng.random_range(1..=4));
        let e = random_ensemble(n, d1, &mut rng);
        let f = random_ensemble(m, d2, &mut rng);
        let p = if i % 2 == 0 {
            let a: f64 = rng.random_range(0.05..0.95);
            // Off-z=1 points go through the optimizer; keep them to small products.
            let z = if n * m <= 6 && i % 4 == 0 {
                a.max(1.0 - a) + rng.random_range(0.0..0.5)
            } else {
                1.0
            };
            AlphaZ::new(a, z).unwrap()
        } else {
            AlphaZ::z1(rng.random_range(1.05..2.0)).unwrap()
        };
        debug_assert!(matches!(p.validity(), Validity::CaseI | Validity::CaseIi));
        let lhs = quantumness_normalized(&tensor(&e, &f), p, cfg).unwrap().value;
        let rhs = quantumness_normalized(&e, p, cfg).unwrap().value + quantumness_normalized(&f, p, cfg).unwrap().value;
        c.check(lhs <= rhs + 1e-9, || {
            format!("Q'(E⊗F)={lhs} > {rhs} at {p:?}: {} {}", ens_str(&e), ens_str(&f))
        });
    }
    c.finish()
}

pub const CLOSED_FORM_ALPHAS: [f64; 5] = [0.3, 0.5, 0.8, 1.5, 2.0];

/// Optimizer at `z = 1` against the closed form.
pub fn closed_form_consistency(seed: u64, budget: Budget, cfg: &OptimizerConfig) -> SuiteReport {
    let mut c = Collector::new("optimizer vs closed form");
    let mut rng = seeded(seed);
    for _ in 0..budget.pick(20, 200) {
        let n = rng.random_range(2..=5);
        let rho = random_density(n, &mut rng);
        for &a in &CLOSED_FORM_ALPHAS {
            let p = AlphaZ::z1(a).unwrap();
            let opt = coherence_optimized(&rho, p, cfg).unwrap().value;
            let closed = coherence_closed_z1(&rho, a).unwrap();
            c.check((opt - closed).abs() < 1e-6, || {
                format!("alpha={a}: optimizer {opt} vs closed {closed}: {}", mat_str(rho.matrix()))
            });
        }
    }
    c.finish()
}

pub const ORACLE_PARAMS: [(f64, f64); 5] = [(0.5, 0.75), (0.5, 1.0), (1.5, 1.0), (1.5, 0.75), (2.0, 2.0)];

/// Gram matrices with at most three members used by the oracle comparison.
pub fn oracle_cases(seed: u64, random: usize) -> Vec<(String, DensityMatrix)> {
    let mut out: Vec<(String, DensityMatrix)> = [
        Canonical::B92 {
            x: Canonical::B92_DEFAULT_OVERLAP,
        },
        Canonical::Diag,
        Canonical::Trine,
    ]
    .into_iter()
    .map(|c| (c.name().to_string(), gram(&canonical(c).unwrap())))
    .collect();
    let mut rng = seeded(seed);
    for _ in 0..random {
        let n = rng.random_range(2..=3);
        let e = random_ensemble(n, rng.random_range(2..=3), &mut rng);
        out.push((ens_str(&e), gram(&e)));
    }
    out
}

pub fn oracle_consistency(seed: u64, budget: Budget, cfg: &OptimizerConfig) -> SuiteReport {
    let mut c = Collector::new("optimizer vs grid oracle");
    for (label, g) in oracle_cases(seed, budget.pick(0, 2)) {
        let params: &[(f64, f64)] = match budget {
            Budget::Quick => &ORACLE_PARAMS[..2],
            Budget::Full => &ORACLE_PARAMS,
        };
        for &(a, z) in params {
            let p = AlphaZ::new(a, z).unwrap();
            let opt = coherence_optimized(&g, p, cfg).unwrap().value;
            let oracle = oracle_grid(&g, p, 400).unwrap();
            c.check((opt - oracle).abs() < 5e-4, || {
                format!("({a}, {z}): optimizer {opt} vs oracle {oracle}: {label}")
            });
        }
    }
    c.finish()
}

/// `C_{1±h,1} → C_limit` for the six named Gram matrices.
pub fn limit_continuity() -> SuiteReport {
    let mut c = Collector::new("alpha -> 1 continuity");
    for which in Canonical::all() {
        let g = gram(&canonical(which).unwrap());
        let limit = coherence_limit_alpha1(&g);
        let errs: Vec<f64> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|h| {
                let lo = coherence_closed_z1(&g, 1.0 - h).unwrap();
                let hi = coherence_closed_z1(&g, 1.0 + h).unwrap();
                (lo - limit).abs().max((hi - limit).abs())
            })
            .collect();
        let shrinking = errs.windows(2).all(|w| w[1] <= w[0]);
        c.check(shrinking && errs[2] < 1e-3, || format!("{which}: errors {errs:?}"));
    }
    c.finish()
}

/// Checks on one supplied ensemble: Gram invariants, the spectral bridge,
/// unitary invariance and nonnegativity at a few `(α, 1)` points.
pub fn ensemble_checks(label: &str, e: &Ensemble, seed: u64, cfg: &OptimizerConfig) -> SuiteReport {
    let mut c = Collector::new("supplied ensemble");
    let g = gram(e);
    let m = g.matrix();
    let min_eig = eigvalsh(m).unwrap().last().copied().unwrap();
    let trace = m.trace().re;
    c.check((trace - 1.0).abs() < 1e-10 && min_eig > -1e-10, || {
        format!("{label}: gram trace {trace}, min eigenvalue {min_eig:e}")
    });
    let chi = holevo_chi(e);
    let s_gram = von_neumann_entropy(&g, LogBase::Two);
    c.check((chi - s_gram).abs() < 1e-9, || format!("{label}: chi {chi} vs S(G) {s_gram}"));

    let u = random_unitary(e.dim(), &mut seeded(seed));
    let ue = apply_unitary(e, &u).unwrap();
    let diagonal = g.is_diagonal(1e-12);
    for a in [0.5, 1.5, 2.0] {
        let p = AlphaZ::z1(a).unwrap();
        let q = quantumness(e, p, cfg).unwrap().value;
        let uq = quantumness(&ue, p, cfg).unwrap().value;
        c.check((q - uq).abs() < 1e-9, || format!("{label}: Q {q} vs {uq} after a unitary at alpha={a}"));
        let faithful = if diagonal { q.abs() < 1e-9 } else { q > -1e-12 };
        c.check(faithful, || format!("{label}: Q={q} at alpha={a} with diagonal gram {diagonal}"));
    }
    c.finish()
}

/// Every suite except the grid oracle, in a fixed order.
pub fn property_suites(seed: u64, budget: Budget, cfg: &OptimizerConfig) -> Vec<SuiteReport> {
    vec![
        eigendecomposition(seed, budget),
        matrix_powers(seed.wrapping_add(1), budget),
        f_bounds(seed.wrapping_add(2), budget),
        divergence_sign(seed.wrapping_add(3), budget),
        gram_invariants(seed.wrapping_add(4), budget),
        spectral_bridge(seed.wrapping_add(5), budget),
        unitary_invariance(seed.wrapping_add(6), budget, cfg),
        products(seed.wrapping_add(7), budget),
        faithfulness(seed.wrapping_add(8), budget, cfg),
        subadditivity(seed.wrapping_add(9), budget, cfg),
        closed_form_consistency(seed.wrapping_add(10), budget, cfg),
        limit_continuity(),
    ]
}

/// All suites; the oracle comparison only runs on the full budget.
pub fn run_all(seed: u64, budget: Budget, cfg: &OptimizerConfig) -> Vec<SuiteReport> {
    let mut out = property_suites(seed, budget, cfg);
    if budget == Budget::Full {
        out.push(oracle_consistency(seed.wrapping_add(11), budget, cfg));
    }
    out
}
