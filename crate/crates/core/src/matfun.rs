//! Spectral calculus for Hermitian complex matrices.
//!
//! Everything here goes through one Hermitian eigendecomposition. Matrix
//! functions act on the support only: eigenvalues at or below the support
//! cutoff map to zero for every exponent, so negative powers are
//! Moore-Penrose (generalized-inverse) powers.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

const EIGEN_EPS: f64 = 1e-15;
const EIGEN_MAX_ITERS: usize = 10_000;

/// Numerical thresholds shared by the spectral routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Eigenvalues with `|λ| <= support_cutoff * λ_max` count as zero.
    pub support_cutoff: f64,
    pub hermiticity_tol: f64,
    pub reconstruction_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            support_cutoff: 1e-12,
            hermiticity_tol: 1e-10,
            reconstruction_tol: 1e-10,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let all_positive = [
            self.support_cutoff,
            self.hermiticity_tol,
            self.reconstruction_tol,
        ]
        .iter()
        .all(|t| t.is_finite() && *t > 0.0);
        if all_positive {
            Ok(())
        } else {
            Err(Error::InvalidParameter(
                "tolerances must be finite and strictly positive".into(),
            ))
        }
    }
}

/// Eigendecomposition `m = U diag(λ) U†` with eigenvalues sorted descending.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
    rank: usize,
    cutoff: f64,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Unitary matrix whose columns are the eigenvectors.
    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    /// Number of eigenvalues strictly above the support cutoff.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Absolute threshold below which an eigenvalue is treated as zero.
    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn in_support(&self, lambda: f64) -> bool {
        lambda > self.cutoff
    }

    /// `U diag(g(λ_i)) U†`, with `g` applied only on the support and zero elsewhere.
    pub fn map_support(&self, g: impl Fn(f64) -> f64) -> CMatrix {
        let weights: Vec<f64> = self
            .eigenvalues
            .iter()
            .map(|&l| if self.in_support(l) { g(l) } else { 0.0 })
            .collect();
        self.synthesize(&weights)
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.synthesize(&self.eigenvalues)
    }

    /// Orthogonal projector onto the span of eigenvectors above the cutoff.
    pub fn support_projector(&self) -> CMatrix {
        self.map_support(|_| 1.0)
    }

    fn synthesize(&self, weights: &[f64]) -> CMatrix {
        let u = &self.eigenvectors;
        let mut scaled = u.clone();
        for (j, w) in weights.iter().enumerate() {
            scaled.column_mut(j).scale_mut(*w);
        }
        scaled * u.adjoint()
    }
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in max_abs_diff");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

/// `(m + m†) / 2`
pub fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn require_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    Ok(m.nrows())
}

pub fn eigh(m: &CMatrix) -> Result<SpectralDecomposition> {
    eigh_with(m, &Tolerances::default())
}

pub fn eigh_with(m: &CMatrix, tol: &Tolerances) -> Result<SpectralDecomposition> {
    require_square(m)?;
    let deviation = hermiticity_defect(m);
    if deviation > tol.hermiticity_tol {
        return Err(Error::NotHermitian { deviation });
    }
    let herm = symmetrize(m);
    let eig = SymmetricEigen::try_new(herm, EIGEN_EPS, EIGEN_MAX_ITERS).ok_or(Error::NoConvergence)?;

    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let scale = eig.eigenvalues.iter().fold(0.0_f64, |acc, l| acc.max(l.abs()));
    let cutoff = tol.support_cutoff * scale;

    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let l = eig.eigenvalues[src];
        eigenvalues.push(if l.abs() <= cutoff { 0.0 } else { l });
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    let rank = eigenvalues.iter().filter(|&&l| l > cutoff).count();

    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        rank,
        cutoff,
    })
}

/// Eigenvalues only, descending, of the Hermitian part of `m`.
pub fn eigvalsh(m: &CMatrix) -> Result<Vec<f64>> {
    require_square(m)?;
    let eig = SymmetricEigen::try_new(symmetrize(m), EIGEN_EPS, EIGEN_MAX_ITERS)
        .ok_or(Error::NoConvergence)?;
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    Ok(vals)
}

/// Power of a PSD matrix on its support. Negative exponents give the
/// generalized-inverse power of the restriction to the support.
pub fn mat_power_support(m: &CMatrix, exponent: f64) -> Result<CMatrix> {
    Ok(power_of(&eigh(m)?, exponent))
}

pub fn power_of(spec: &SpectralDecomposition, exponent: f64) -> CMatrix {
    spec.map_support(|l| l.powf(exponent))
}

/// `Tr(m^z)` for a Hermitian `m` that is PSD up to rounding; negative
/// eigenvalue dust is clamped to zero before the power.
pub fn trace_power(m: &CMatrix, z: f64) -> Result<f64> {
    if z == 1.0 {
        return Ok(m.trace().re.max(0.0));
    }
    let vals = eigvalsh(m)?;
    let scale = vals.iter().fold(0.0_f64, |acc, l| acc.max(l.abs()));
    let cutoff = Tolerances::default().support_cutoff * scale;
    Ok(vals
        .iter()
        .filter(|&&l| l > cutoff)
        .map(|l| l.powf(z))
        .sum())
}

/// Density operator with a lazily cached spectral decomposition.
#[derive(Debug)]
pub struct DensityMatrix {
    matrix: CMatrix,
    spectrum: OnceLock<SpectralDecomposition>,
}

impl Clone for DensityMatrix {
    fn clone(&self) -> Self {
        let spectrum = OnceLock::new();
        if let Some(s) = self.spectrum.get() {
            let _ = spectrum.set(s.clone());
        }
        Self {
            matrix: self.matrix.clone(),
            spectrum,
        }
    }
}

impl DensityMatrix {
    /// Validates Hermiticity, positivity and unit trace (all within 1e-10).
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let tol = Tolerances::default();
        require_square(&matrix)?;
        let spec = eigh_with(&matrix, &tol)?;
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > 1e-10 || trace.im.abs() > 1e-10 {
            return Err(Error::InvalidTrace { trace: trace.re });
        }
        let min_eigenvalue = spec.eigenvalues().last().copied().unwrap_or(0.0);
        if min_eigenvalue < -1e-10 {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        let spectrum = OnceLock::new();
        let _ = spectrum.set(spec);
        Ok(Self {
            matrix: symmetrize(&matrix),
            spectrum,
        })
    }

    /// Incoherent state `Σ q_i |i⟩⟨i|`.
    pub fn from_diagonal(probs: &[f64]) -> Result<Self> {
        if probs.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::InvalidParameter(
                "diagonal entries must be nonnegative".into(),
            ));
        }
        let diag = CVector::from_iterator(probs.len(), probs.iter().map(|&p| Complex64::new(p, 0.0)));
        Self::new(CMatrix::from_diagonal(&diag))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let v = vec![1.0 / dim as f64; dim];
        Self::from_diagonal(&v).expect("uniform distribution is a valid state")
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        self.spectrum.get_or_init(|| {
            eigh(&self.matrix).expect("validated density matrix decomposes")
        })
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|c| c.re).collect()
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.matrix[(i, j)].norm() <= tol))
    }

    pub fn power(&self, exponent: f64) -> CMatrix {
        power_of(self.spectrum(), exponent)
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix::new(self.matrix.kronecker(&other.matrix))
            .expect("tensor product of states is a state")
    }
}

fn check_same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch {
            expected: a,
            found: b,
        });
    }
    Ok(())
}

/// Checks `supp ρ ⊆ supp σ` by measuring how much of `ρ` lives on `ker σ`.
pub fn support_leakage(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    let n = sigma.dim();
    let kernel = CMatrix::identity(n, n) - sigma.spectrum().support_projector();
    let leaked = &kernel * rho.matrix() * &kernel;
    leaked.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// `Tr[(σ^{(1-α)/2z} ρ^{α/z} σ^{(1-α)/2z})^z]`
pub fn f_alpha_z(rho: &DensityMatrix, sigma: &DensityMatrix, alpha: f64, z: f64) -> Result<f64> {
    check_same_dim(rho.dim(), sigma.dim())?;
    if !alpha.is_finite() || alpha == 1.0 {
        return Err(Error::InvalidParameter(format!(
            "alpha must be finite and != 1 (got {alpha})"
        )));
    }
    if !(z.is_finite() && z > 0.0) {
        return Err(Error::InvalidParameter(format!("z must be > 0 (got {z})")));
    }
    if alpha > 1.0 {
        let leakage = support_leakage(rho, sigma);
        if leakage >= Tolerances::default().support_cutoff {
            return Err(Error::SupportViolation { leakage });
        }
    }
    let side = sigma.power((1.0 - alpha) / (2.0 * z));
    let half = rho.power(alpha / (2.0 * z));
    gram_trace_power(&(side * half), z)
}

/// `Tr[(X X†)^z]` from the singular values of `X`, which resolves small
/// eigenvalues of `X X†` far better than diagonalizing the product.
pub fn gram_trace_power(x: &CMatrix, z: f64) -> Result<f64> {
    if z == 1.0 {
        return Ok(x.norm_squared());
    }
    let svd = nalgebra::SVD::try_new(x.clone(), false, false, 1e-15, 10_000).ok_or(Error::NoConvergence)?;
    let values = svd.singular_values;
    let top = values.iter().copied().fold(0.0_f64, f64::max);
    let cutoff = Tolerances::default().support_cutoff * top;
    Ok(values.iter().filter(|&&v| v > cutoff).map(|v| v.powf(2.0 * z)).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogBase {
    Natural,
    Two,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => x.ln(),
            LogBase::Two => x.log2(),
        }
    }
}

/// Shannon entropy of a probability vector, `0 log 0 = 0`.
pub fn shannon_entropy(probs: &[f64], base: LogBase) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * base.log(p))
        .sum()
}

pub fn von_neumann_entropy(rho: &DensityMatrix, base: LogBase) -> f64 {
    let spec = rho.spectrum();
    let support: Vec<f64> = spec
        .eigenvalues()
        .iter()
        .copied()
        .filter(|&l| spec.in_support(l))
        .collect();
    shannon_entropy(&support, base)
}
