//! Seeded random generators for states, unitaries and ensembles.
//!
//! Used by the property suites; every generator takes an explicit RNG so
//! runs are reproducible from a seed.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::ensemble::{Ensemble, PureState};
use crate::matfun::{CMatrix, CVector, DensityMatrix};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im)
}

/// Complex Ginibre matrix (i.i.d. standard complex normal entries).
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Haar-distributed unitary via QR of a Ginibre matrix with phase fix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(dim, dim, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        let col = q.column(j) * phase;
        q.set_column(j, &col);
    }
    q
}

pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(dim, dim, rng);
    (&g + g.adjoint()).scale(0.5)
}

pub fn random_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CVector {
    let v = CVector::from_fn(dim, |_, _| complex_normal(rng));
    let n = v.norm();
    v.unscale(n)
}

/// Full-rank density matrix `G G† / Tr(G G†)`.
pub fn random_density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let g = ginibre(dim, dim, rng);
    let m = &g * g.adjoint();
    let t = m.trace().re;
    DensityMatrix::new(m.unscale(t)).expect("Wishart matrix normalizes to a state")
}

/// Density matrix of the given rank (`rank <= dim`).
pub fn random_density_of_rank<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> DensityMatrix {
    let g = ginibre(dim, rank, rng);
    let m = &g * g.adjoint();
    let t = m.trace().re;
    DensityMatrix::new(m.unscale(t)).expect("Wishart matrix normalizes to a state")
}

/// Uniform (flat Dirichlet) point in the interior of the probability simplex.
pub fn random_simplex_point<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..n)
        .map(|_| {
            let e: f64 = Exp1.sample(rng);
            e.max(1e-300)
        })
        .collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / s).collect()
}

pub fn random_ensemble<R: Rng + ?Sized>(members: usize, dim: usize, rng: &mut R) -> Ensemble {
    let probs = random_simplex_point(members, rng);
    let states = (0..members)
        .map(|_| PureState::new(random_pure_state(dim, rng)).expect("normalized"))
        .collect::<Vec<_>>();
    Ensemble::new(probs.into_iter().zip(states).collect(), None).expect("valid random ensemble")
}
