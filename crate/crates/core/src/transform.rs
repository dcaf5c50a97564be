//! The two-parameter transform `F_{μ,ν}` and symplectic tomograms.
//!
//! `(F_{μ,ν}ψ)(X) = (2π|ν|)^{-1/2} ∫ exp(−iXy/ν + iμy²/(2ν)) ψ(y) dy`, and the
//! tomogram of a pure state is the density `ω(X, μ, ν) = |(F_{μ,ν}ψ)(X)|²`,
//! the distribution of the quadrature `μx̂ + νp̂`.
//!
//! Numerically the input is chirped by `exp(iμy²/(2ν))` and its discrete
//! Fourier sum is evaluated at wavenumbers `X/ν` with a chirp-z transform.
//! That evaluates the discretized integral exactly on any uniform output grid.
//! On the native grid returned by [`native_output_grid`] the output lattice
//! spans one full period of the discrete spectrum and the map is exactly
//! unitary.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics;
use crate::parallel::{self, Execution};
use crate::state::{SpatialGrid, WaveFunction};

/// Below this `|ν|` the kernel is unresolvable and tomograms use the scaling
/// form `ω(X, μ, 0) = |ψ(X/μ)|² / |μ|`.
pub const NU_FLOOR: f64 = 1e-6;

/// Tolerance on `Σ density·dx = 1` for every [`TomogramSlice`].
pub const SLICE_NORM_TOL: f64 = 1e-6;

/// Amplitudes below this fraction of the peak do not count as support when
/// checking that the chirped input is resolved by the grid.
const SUPPORT_THRESHOLD: f64 = 1e-9;

/// Spectral mass allowed beyond the estimated bandwidth of the input.
const SPECTRAL_TAIL: f64 = 1e-14;

/// Looser tail for states assembled from measured densities, whose square
/// roots carry broadband noise that the chirp does not need to resolve.
pub(crate) const MEASURED_SPECTRAL_TAIL: f64 = 1e-6;

/// Densities of negative size smaller than this are rounding noise.
const NEGATIVE_DENSITY_TOL: f64 = 1e-12;

/// Sampled quadrature density `ω(X, μ, ν)` for one direction.
#[derive(Debug, Clone, PartialEq)]
pub struct TomogramSlice {
    mu: f64,
    nu: f64,
    grid: SpatialGrid,
    density: Vec<f64>,
}

impl TomogramSlice {
    /// Validates nonnegativity and normalization (within [`SLICE_NORM_TOL`]).
    pub fn new(mu: f64, nu: f64, grid: SpatialGrid, density: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(mu, nu, grid, density, SLICE_NORM_TOL)
    }

    pub(crate) fn with_tolerance(
        mu: f64,
        nu: f64,
        grid: SpatialGrid,
        mut density: Vec<f64>,
        norm_tol: f64,
    ) -> Result<Self> {
        if mu == 0.0 && nu == 0.0 {
            return Err(Error::invalid("direction (mu, nu) = (0, 0)"));
        }
        if !(mu.is_finite() && nu.is_finite()) {
            return Err(Error::invalid("non-finite direction"));
        }
        if density.len() != grid.len() {
            return Err(Error::invalid(format!(
                "{} density samples for a grid of {} points",
                density.len(),
                grid.len()
            )));
        }
        for d in density.iter_mut() {
            if !d.is_finite() || *d < -NEGATIVE_DENSITY_TOL {
                return Err(Error::invalid(format!("invalid density sample {d}")));
            }
            *d = d.max(0.0);
        }
        let total = density.iter().sum::<f64>() * grid.dx();
        if (total - 1.0).abs() > norm_tol {
            return Err(Error::Resolution {
                message: format!(
                    "tomogram at (mu, nu) = ({mu}, {nu}) integrates to {total:.9} on [{}, {}]",
                    grid.x_min(),
                    grid.x_max()
                ),
                suggested_points: grid.len() * 2,
            });
        }
        Ok(TomogramSlice { mu, nu, grid, density })
    }

    /// Rescales an arbitrary nonnegative density to unit integral.
    pub fn renormalized(mu: f64, nu: f64, grid: SpatialGrid, density: Vec<f64>) -> Result<Self> {
        let total = density.iter().sum::<f64>() * grid.dx();
        if !(total > 0.0) {
            return Err(Error::invalid("density has zero mass"));
        }
        Self::new(mu, nu, grid, density.into_iter().map(|d| d / total).collect())
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    /// Cubic interpolation of the density; zero outside the grid.
    pub fn value_at(&self, x: f64) -> f64 {
        numerics::cubic_interp(&self.density, self.grid.x_min(), self.grid.dx(), x, 0.0).max(0.0)
    }

    pub fn mean(&self) -> f64 {
        self.grid.points().zip(&self.density).map(|(x, d)| x * d).sum::<f64>() * self.grid.dx()
    }

    /// Central second moment by quadrature.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.grid
            .points()
            .zip(&self.density)
            .map(|(x, d)| (x - m) * (x - m) * d)
            .sum::<f64>()
            * self.grid.dx()
    }

    /// Trapezoid cumulative distribution on the grid.
    pub fn cumulative(&self) -> Vec<f64> {
        numerics::cumulative_trapezoid(&self.density, self.grid.dx())
    }

    /// True for the position direction `(1, 0)` up to `1e-12`.
    pub fn is_position(&self) -> bool {
        (self.mu - 1.0).abs() <= 1e-12 && self.nu.abs() <= 1e-12
    }
}

/// Covariances of a zero-mean Gaussian state (`ħ = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianState {
    sigma_xx: f64,
    sigma_pp: f64,
    sigma_xp: f64,
}

/// Slack on the uncertainty relation `σ_xx σ_pp − σ_xp² ≥ 1/4`.
pub const UNCERTAINTY_TOL: f64 = 1e-10;

impl GaussianState {
    pub fn new(sigma_xx: f64, sigma_pp: f64, sigma_xp: f64) -> Result<Self> {
        if !(sigma_xx > 0.0 && sigma_pp > 0.0 && sigma_xp.is_finite())
            || !(sigma_xx.is_finite() && sigma_pp.is_finite())
        {
            return Err(Error::InvalidCovariance(format!(
                "variances must be positive, got sigma_xx = {sigma_xx}, sigma_pp = {sigma_pp}"
            )));
        }
        let det = sigma_xx * sigma_pp - sigma_xp * sigma_xp;
        if det < 0.25 - UNCERTAINTY_TOL {
            return Err(Error::InvalidCovariance(format!(
                "sigma_xx sigma_pp - sigma_xp^2 = {det} < 1/4"
            )));
        }
        Ok(GaussianState {
            sigma_xx,
            sigma_pp,
            sigma_xp,
        })
    }

    /// The pure state with position variance `sigma_xx` and correlation
    /// `sigma_xp`; `sigma_pp` follows from `det = 1/4`.
    pub fn pure(sigma_xx: f64, sigma_xp: f64) -> Result<Self> {
        if !(sigma_xx > 0.0) {
            return Err(Error::InvalidCovariance(format!("sigma_xx = {sigma_xx}")));
        }
        Self::new(sigma_xx, (0.25 + sigma_xp * sigma_xp) / sigma_xx, sigma_xp)
    }

    pub fn vacuum() -> Self {
        GaussianState {
            sigma_xx: 0.5,
            sigma_pp: 0.5,
            sigma_xp: 0.0,
        }
    }

    pub fn sigma_xx(&self) -> f64 {
        self.sigma_xx
    }

    pub fn sigma_pp(&self) -> f64 {
        self.sigma_pp
    }

    pub fn sigma_xp(&self) -> f64 {
        self.sigma_xp
    }

    pub fn determinant(&self) -> f64 {
        self.sigma_xx * self.sigma_pp - self.sigma_xp * self.sigma_xp
    }

    pub fn is_pure(&self) -> bool {
        (self.determinant() - 0.25).abs() <= UNCERTAINTY_TOL
    }

    /// Variance `σ_xx μ² + 2σ_xp μν + σ_pp ν²` of the quadrature `μx̂ + νp̂`.
    pub fn quadrature_variance(&self, mu: f64, nu: f64) -> f64 {
        self.sigma_xx * mu * mu + 2.0 * self.sigma_xp * mu * nu + self.sigma_pp * nu * nu
    }

    /// Characteristic function `exp(−(σ_xx x² + 2σ_xp xy + σ_pp y²)/2)`.
    pub fn characteristic(&self, x: f64, y: f64) -> f64 {
        (-0.5 * (self.sigma_xx * x * x + 2.0 * self.sigma_xp * x * y + self.sigma_pp * y * y)).exp()
    }

    /// Wavefunction `(2πσ_xx)^{-1/4} exp(−x²/(4σ_xx) + i(σ_xp/σ_xx)x²/2)` of a
    /// pure state, normalized on `grid`.
    pub fn wavefunction(&self, grid: &SpatialGrid) -> Result<WaveFunction> {
        if !self.is_pure() {
            return Err(Error::invalid(format!(
                "covariance determinant {} is not 1/4; mixed states have no wavefunction",
                self.determinant()
            )));
        }
        let amp = (2.0 * PI * self.sigma_xx).powf(-0.25);
        let chirp = self.sigma_xp / self.sigma_xx;
        WaveFunction::from_fn(*grid, |x| {
            C64::from_polar(amp * (-x * x / (4.0 * self.sigma_xx)).exp(), 0.5 * chirp * x * x)
        })
        .normalized()
    }
}

/// Output lattice on which the discrete transform of a state on `input` is
/// exactly unitary: `N` points spaced `2π|ν|/(N·dx)`, centred on zero.
pub fn native_output_grid(input: &SpatialGrid, nu: f64) -> Result<SpatialGrid> {
    if nu.abs() < NU_FLOOR {
        return Err(Error::UseScalingBranch { nu, floor: NU_FLOOR });
    }
    let n = input.len();
    let step = 2.0 * PI * nu.abs() / (n as f64 * input.dx());
    SpatialGrid::from_step(-((n / 2) as f64) * step, step, n)
}

/// Rejects inputs whose chirped version `ψ(y)e^{iμy²/(2ν)}` is not resolved by
/// the sampling step (local wavenumber above Nyquist).
pub(crate) fn check_chirp_resolution(psi: &WaveFunction, mu: f64, nu: f64, spectral_tail: f64) -> Result<()> {
    let grid = psi.grid();
    let amps = psi.amplitudes();
    let peak = amps.iter().map(|a| a.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(());
    }
    let y_extent = grid
        .points()
        .zip(amps)
        .filter(|(_, a)| a.norm() > SUPPORT_THRESHOLD * peak)
        .map(|(y, _)| y.abs())
        .fold(0.0, f64::max);

    let mut spectrum = amps.to_vec();
    numerics::fft_forward(&mut spectrum);
    let ks = numerics::fft_wavenumbers(grid.len(), grid.dx());
    let mut bins: Vec<(f64, f64)> = ks
        .iter()
        .map(|k| k.abs())
        .zip(spectrum.iter().map(|z| z.norm_sqr()))
        .collect();
    bins.sort_by(|a, b| b.0.total_cmp(&a.0));
    let total: f64 = bins.iter().map(|b| b.1).sum();
    let mut tail = 0.0;
    let mut bandwidth = 0.0;
    for (k, p) in &bins {
        tail += p;
        if tail > spectral_tail * total {
            bandwidth = *k;
            break;
        }
    }

    let needed = (mu / nu).abs() * y_extent + bandwidth;
    let nyquist = PI / grid.dx();
    if needed > nyquist {
        let suggested = (grid.len() as f64 * needed / nyquist * 1.25).ceil() as usize;
        return Err(Error::Resolution {
            message: format!(
                "chirped input at (mu, nu) = ({mu}, {nu}) needs wavenumber {needed:.1} above the grid Nyquist {nyquist:.1}"
            ),
            suggested_points: suggested,
        });
    }
    Ok(())
}

/// Discretized `F_{μ,ν}` of arbitrary (not necessarily normalized) amplitudes
/// evaluated on `output`. Linear in `psi`.
pub fn apply_transform(psi: &WaveFunction, mu: f64, nu: f64, output: &SpatialGrid) -> Result<Vec<C64>> {
    if nu.abs() < NU_FLOOR {
        return Err(Error::UseScalingBranch { nu, floor: NU_FLOOR });
    }
    let input = psi.grid();
    let y0 = input.x_min();
    let x0 = output.x_min();
    let chirped: Vec<C64> = input
        .points()
        .zip(psi.amplitudes())
        .map(|(y, a)| a * C64::from_polar(1.0, mu * y * y / (2.0 * nu) - x0 * (y - y0) / nu))
        .collect();
    let alpha = output.dx() * input.dx() / nu;
    let sums = numerics::chirp_z(&chirped, alpha, output.len());
    let scale = input.dx() / (2.0 * PI * nu.abs()).sqrt();
    Ok(output
        .points()
        .zip(sums)
        .map(|(x, s)| s * C64::from_polar(scale, -x * y0 / nu))
        .collect())
}

/// `F_{μ,ν}ψ` on its native output grid (see [`native_output_grid`]).
pub fn fractional_transform(psi: &WaveFunction, mu: f64, nu: f64) -> Result<WaveFunction> {
    let output = native_output_grid(psi.grid(), nu)?;
    fractional_transform_on(psi, mu, nu, &output)
}

/// `F_{μ,ν}ψ` evaluated on a caller-chosen output grid, with the chirp
/// resolution check.
pub fn fractional_transform_on(psi: &WaveFunction, mu: f64, nu: f64, output: &SpatialGrid) -> Result<WaveFunction> {
    if nu.abs() < NU_FLOOR {
        return Err(Error::UseScalingBranch { nu, floor: NU_FLOOR });
    }
    check_chirp_resolution(psi, mu, nu, SPECTRAL_TAIL)?;
    WaveFunction::new(*output, apply_transform(psi, mu, nu, output)?)
}

/// `ω(X, μ, ν)` on the grid of `psi`.
pub fn tomogram(psi: &WaveFunction, mu: f64, nu: f64) -> Result<TomogramSlice> {
    tomogram_on(psi, mu, nu, psi.grid())
}

/// `ω(X, μ, ν)` on an explicit X grid.
pub fn tomogram_on(psi: &WaveFunction, mu: f64, nu: f64, output: &SpatialGrid) -> Result<TomogramSlice> {
    if mu == 0.0 && nu == 0.0 {
        return Err(Error::invalid("direction (mu, nu) = (0, 0)"));
    }
    let norm = psi.norm_sqr();
    let density: Vec<f64> = if nu.abs() < NU_FLOOR {
        // ω(X, μ, 0) = |ψ(X/μ)|² / |μ|
        let base = psi.density();
        let g = psi.grid();
        output
            .points()
            .map(|x| numerics::cubic_interp(&base, g.x_min(), g.dx(), x / mu, 0.0).max(0.0) / mu.abs())
            .collect()
    } else {
        fractional_transform_on(psi, mu, nu, output)?
            .amplitudes()
            .iter()
            .map(|a| a.norm_sqr())
            .collect()
    };
    TomogramSlice::new(mu, nu, *output, density.into_iter().map(|d| d / norm).collect())
}

/// Tomograms for many directions; output order follows `directions`.
pub fn tomograms(psi: &WaveFunction, directions: &[(f64, f64)], exec: Execution) -> Result<Vec<TomogramSlice>> {
    parallel::try_map(exec, directions, |&(mu, nu)| tomogram(psi, mu, nu))
}

/// Closed-form Gaussian tomogram `(2πv)^{-1/2} exp(−X²/(2v))`.
pub fn tomogram_gaussian(state: &GaussianState, mu: f64, nu: f64, grid: &SpatialGrid) -> Result<TomogramSlice> {
    if mu == 0.0 && nu == 0.0 {
        return Err(Error::invalid("direction (mu, nu) = (0, 0)"));
    }
    let v = state.quadrature_variance(mu, nu);
    if !(v > 0.0) {
        return Err(Error::InvalidCovariance(format!(
            "quadrature variance {v} at (mu, nu) = ({mu}, {nu}) is not positive"
        )));
    }
    let c = 1.0 / (2.0 * PI * v).sqrt();
    let density = grid.points().map(|x| c * (-x * x / (2.0 * v)).exp()).collect();
    TomogramSlice::new(mu, nu, *grid, density)
}

/// Fresnel tomogram `|(2πiν)^{-1/2} ∫ exp(i(X−Y)²/(2ν)) ψ(Y) dY|²` by direct
/// quadrature of the kernel (`O(N²)`), labeled with direction `(1, ν)`.
pub fn fresnel_tomogram(psi0: &WaveFunction, nu: f64) -> Result<TomogramSlice> {
    fresnel_tomogram_with(psi0, nu, Execution::default())
}

pub fn fresnel_tomogram_with(psi0: &WaveFunction, nu: f64, exec: Execution) -> Result<TomogramSlice> {
    if nu == 0.0 || !nu.is_finite() {
        return Err(Error::invalid(format!("Fresnel parameter nu = {nu}")));
    }
    let grid = *psi0.grid();
    let dx = grid.dx();
    let source: Vec<(f64, C64)> = grid
        .points()
        .zip(psi0.amplitudes())
        .filter(|(_, a)| a.norm_sqr() > 0.0)
        .map(|(y, a)| (y, *a))
        .collect();
    let norm = psi0.norm_sqr();
    let scale = dx * dx / (2.0 * PI * nu.abs() * norm);
    let density = parallel::map_range(exec, grid.len(), |j| {
        let x = grid.x(j);
        let s: C64 = source
            .iter()
            .map(|(y, a)| a * C64::from_polar(1.0, (x - y) * (x - y) / (2.0 * nu)))
            .sum();
        s.norm_sqr() * scale
    });
    TomogramSlice::new(1.0, nu, grid, density)
}
