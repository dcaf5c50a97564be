//! Spatial grids, sampled wavefunctions and the state presets used to build
//! test and benchmark states.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reconstruct::PiecewiseSpec;

/// Largest Fock number accepted by [`StatePreset::Fock`].
pub const FOCK_MAX: u32 = 20;

/// Boundary amplitude (relative to the peak) above which sampling warns that
/// the grid truncates the state.
pub const BOUNDARY_LEAK: f64 = 1e-8;

/// Uniform grid `x_k = x_min + k·dx`, `0 <= k < n_points`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    x_min: f64,
    dx: f64,
    n_points: usize,
}

impl SpatialGrid {
    /// Grid spanning `[x_min, x_max]` inclusive with `n_points` samples.
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
            return Err(Error::invalid(format!("degenerate interval [{x_min}, {x_max}]")));
        }
        if n_points < 2 {
            return Err(Error::invalid(format!("n_points = {n_points} < 2")));
        }
        Ok(SpatialGrid {
            x_min,
            dx: (x_max - x_min) / (n_points - 1) as f64,
            n_points,
        })
    }

    /// Grid from its origin and step directly.
    pub fn from_step(x_min: f64, dx: f64, n_points: usize) -> Result<Self> {
        if !(x_min.is_finite() && dx.is_finite()) || dx <= 0.0 || n_points < 2 {
            return Err(Error::invalid(format!(
                "invalid grid x_min = {x_min}, dx = {dx}, n_points = {n_points}"
            )));
        }
        Ok(SpatialGrid { x_min, dx, n_points })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn x_max(&self) -> f64 {
        self.x(self.n_points - 1)
    }

    #[inline]
    pub fn x(&self, k: usize) -> f64 {
        self.x_min + k as f64 * self.dx
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n_points).map(move |k| self.x(k))
    }

    /// Same sample count with origin and step equal to within a relative
    /// `1e-12` (grids reread from decimal files differ in the last ulp).
    pub fn approx_eq(&self, other: &SpatialGrid) -> bool {
        let scale = self.dx.abs().max(self.x_min.abs()).max(1.0);
        self.n_points == other.n_points
            && (self.x_min - other.x_min).abs() <= 1e-12 * scale
            && (self.dx - other.dx).abs() <= 1e-12 * self.dx
    }
}

/// `make_grid` in free-function form.
pub fn make_grid(x_min: f64, x_max: f64, n_points: usize) -> Result<SpatialGrid> {
    SpatialGrid::new(x_min, x_max, n_points)
}

/// Complex amplitudes `⟨x_k|ψ⟩` on a [`SpatialGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    grid: SpatialGrid,
    amplitudes: Vec<C64>,
}

impl WaveFunction {
    pub fn new(grid: SpatialGrid, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != grid.len() {
            return Err(Error::invalid(format!(
                "{} amplitudes for a grid of {} points",
                amplitudes.len(),
                grid.len()
            )));
        }
        if amplitudes.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::invalid("non-finite amplitude"));
        }
        Ok(WaveFunction { grid, amplitudes })
    }

    pub fn from_fn(grid: SpatialGrid, f: impl Fn(f64) -> C64) -> Self {
        let amplitudes = grid.points().map(f).collect();
        WaveFunction { grid, amplitudes }
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    /// `Σ |ψ_k|² dx`.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.dx
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0) {
            return Err(Error::invalid("wavefunction has zero norm"));
        }
        Ok(WaveFunction {
            grid: self.grid,
            amplitudes: self.amplitudes.iter().map(|a| a / n).collect(),
        })
    }

    /// `⟨self|other⟩ = Σ conj(self_k) other_k dx`.
    pub fn inner(&self, other: &WaveFunction) -> Result<C64> {
        if !self.grid.approx_eq(&other.grid) {
            return Err(Error::invalid("wavefunctions live on different grids"));
        }
        let s: C64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(s * self.grid.dx)
    }

    /// `|⟨self|other⟩|` for normalized states.
    pub fn fidelity(&self, other: &WaveFunction) -> Result<f64> {
        Ok(self.inner(other)?.norm())
    }

    /// Position probability density `|ψ(x_k)|²`.
    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Relative amplitude at the two grid ends.
    pub fn boundary_leak(&self) -> f64 {
        let peak = self.amplitudes.iter().map(|a| a.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        let first = self.amplitudes[0].norm();
        let last = self.amplitudes[self.amplitudes.len() - 1].norm();
        first.max(last) / peak
    }
}

/// Test-state factory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatePreset {
    /// `|ψ|²` is normal with mean `x0` and standard deviation `sigma`;
    /// `p0` is the mean momentum.
    Gaussian {
        x0: f64,
        p0: f64,
        sigma: f64,
    },
    /// Harmonic oscillator eigenfunction `n` (unit frequency and mass).
    Fock {
        n: u32,
    },
    /// Smooth plateau on `[-half_width, half_width]` with logistic edges of
    /// scale `edge`.
    FlatTop {
        half_width: f64,
        edge: f64,
    },
    Piecewise(PiecewiseSpec),
}

impl StatePreset {
    /// The oscillator ground state, `gaussian(0, 0, 1/√2)`.
    pub fn vacuum() -> Self {
        StatePreset::Gaussian {
            x0: 0.0,
            p0: 0.0,
            sigma: std::f64::consts::FRAC_1_SQRT_2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            StatePreset::Gaussian { x0, p0, sigma } => {
                if !(*sigma > 0.0 && sigma.is_finite() && x0.is_finite() && p0.is_finite()) {
                    return Err(Error::invalid(format!("gaussian preset needs sigma > 0, got {sigma}")));
                }
            }
            StatePreset::Fock { n } => {
                if *n > FOCK_MAX {
                    return Err(Error::Unsupported(format!(
                        "fock({n}) exceeds the supported maximum {FOCK_MAX}"
                    )));
                }
            }
            StatePreset::FlatTop { half_width, edge } => {
                if !(*half_width > 0.0 && *edge > 0.0) {
                    return Err(Error::invalid("flat-top preset needs positive half_width and edge"));
                }
            }
            StatePreset::Piecewise(spec) => spec.validate()?,
        }
        Ok(())
    }

    /// Unnormalized amplitude of the analytic presets at `x`.
    pub(crate) fn amplitude_at(&self, x: f64) -> C64 {
        match *self {
            StatePreset::Gaussian { x0, p0, sigma } => {
                let norm = (2.0 * PI * sigma * sigma).powf(-0.25);
                let u = x - x0;
                C64::from_polar(norm * (-u * u / (4.0 * sigma * sigma)).exp(), p0 * x)
            }
            StatePreset::Fock { n } => C64::from(hermite_functions(n as usize, x)[n as usize]),
            StatePreset::FlatTop { half_width, edge } => {
                let logistic = |u: f64| 1.0 / (1.0 + (-u).exp());
                C64::from(logistic((x + half_width) / edge) * logistic((half_width - x) / edge))
            }
            StatePreset::Piecewise(_) => unreachable!("piecewise presets are assembled per segment"),
        }
    }
}

/// Samples a preset on `grid` and normalizes it.
pub fn sample_state(preset: &StatePreset, grid: &SpatialGrid) -> Result<WaveFunction> {
    preset.validate()?;
    let psi = match preset {
        StatePreset::Piecewise(spec) => {
            let state = spec.realize(grid)?;
            crate::reconstruct::assemble_state(&state, grid)?
        }
        analytic => WaveFunction::from_fn(*grid, |x| analytic.amplitude_at(x)).normalized()?,
    };
    let leak = psi.boundary_leak();
    if leak > BOUNDARY_LEAK {
        log::warn!(
            "state truncated by grid [{}, {}]: boundary amplitude is {leak:.2e} of peak",
            grid.x_min(),
            grid.x_max()
        );
    }
    Ok(psi)
}

/// Normalized Hermite functions `ψ_0(x) ..= ψ_n_max(x)` by the stable
/// three-term recurrence
/// `ψ_{k+1} = √(2/(k+1)) x ψ_k − √(k/(k+1)) ψ_{k−1}`.
pub fn hermite_functions(n_max: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let psi0 = PI.powf(-0.25) * (-0.5 * x * x).exp();
    out.push(psi0);
    if n_max == 0 {
        return out;
    }
    out.push(std::f64::consts::SQRT_2 * x * psi0);
    for k in 1..n_max {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}
