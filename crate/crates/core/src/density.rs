//! Discretized density matrices of finite pure-state ensembles and their von
//! Neumann entropy.
//!
//! A mixture `ρ = Σ_j π_j |ψ_j⟩⟨ψ_j|` of `K` states on an `N`-point grid has
//! rank at most `K`. It is stored in factored form `ρ·dx = A A†` with columns
//! `a_j = √(π_j dx) ψ_j`; the nonzero spectrum of `A A†` equals that of the
//! `K×K` Gram matrix `A†A`, so entropies never need an `N×N` eigensolve.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::state::{SpatialGrid, WaveFunction};

/// Eigenvalues in `[-CLAMP_WINDOW, 0)` are treated as round-off and set to 0.
pub const CLAMP_WINDOW: f64 = 1e-8;

const WEIGHT_SUM_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct DensityMatrix {
    grid: SpatialGrid,
    /// Columns `√(π_j) ψ_j` (without the `dx` factor).
    factors: Vec<Vec<C64>>,
}

pub(crate) fn check_weights(weights: &[f64]) -> Result<()> {
    if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
        return Err(Error::invalid("weights must be finite and nonnegative"));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::invalid(format!("weights sum to {sum}, not 1")));
    }
    Ok(())
}

/// `ρ = Σ_j π_j |ψ_j⟩⟨ψ_j|`.
pub fn density_matrix(states: &[WaveFunction], weights: &[f64]) -> Result<DensityMatrix> {
    if states.is_empty() {
        return Err(Error::invalid("ensemble is empty"));
    }
    if states.len() != weights.len() {
        return Err(Error::invalid(format!(
            "{} states but {} weights",
            states.len(),
            weights.len()
        )));
    }
    check_weights(weights)?;
    let grid = *states[0].grid();
    if states.iter().any(|s| !s.grid().approx_eq(&grid)) {
        return Err(Error::invalid("ensemble members live on different grids"));
    }
    let factors = states
        .iter()
        .zip(weights)
        .filter(|(_, &w)| w > 0.0)
        .map(|(s, &w)| s.amplitudes().iter().map(|a| a * w.sqrt()).collect())
        .collect();
    Ok(DensityMatrix { grid, factors })
}

impl DensityMatrix {
    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    /// `entries[a][b] = Σ_j π_j ψ_j(x_a) ψ_j*(x_b)`.
    pub fn entry(&self, a: usize, b: usize) -> C64 {
        self.factors.iter().map(|f| f[a] * f[b].conj()).sum()
    }

    /// Materializes the full `N×N` matrix of entries.
    pub fn to_dense(&self) -> DMatrix<C64> {
        let n = self.grid.len();
        DMatrix::from_fn(n, n, |a, b| self.entry(a, b))
    }

    /// `Σ_a entries[a][a] · dx`.
    pub fn trace(&self) -> f64 {
        self.factors
            .iter()
            .map(|f| f.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            * self.grid.dx()
    }

    /// Gram matrix `G_jk = dx Σ_a conj(f_j[a]) f_k[a]`, which shares its
    /// nonzero spectrum with `entries · dx`.
    pub fn gram(&self) -> DMatrix<C64> {
        let k = self.factors.len();
        let dx = self.grid.dx();
        let mut g = DMatrix::from_element(k, k, C64::new(0.0, 0.0));
        for i in 0..k {
            for j in i..k {
                let s: C64 = self.factors[i]
                    .iter()
                    .zip(&self.factors[j])
                    .map(|(a, b)| a.conj() * b)
                    .sum::<C64>()
                    * dx;
                g[(i, j)] = s;
                g[(j, i)] = s.conj();
            }
        }
        g
    }

    /// Nonzero-block eigenvalues of `entries · dx`, descending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.gram().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }
}

/// `S(ρ) = −Σ λ log λ` in nats, with `0·log 0 = 0`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    entropy_from_eigenvalues(&rho.eigenvalues())
}

pub(crate) fn entropy_from_eigenvalues(eigenvalues: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &lambda in eigenvalues {
        if lambda < -CLAMP_WINDOW {
            return Err(Error::NumericalFailure(format!(
                "density matrix has eigenvalue {lambda:e} < -{CLAMP_WINDOW:e}"
            )));
        }
        if lambda > 0.0 {
            s -= lambda * lambda.ln();
        }
    }
    Ok(s.max(0.0))
}
