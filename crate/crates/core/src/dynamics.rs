//! Free-particle evolution and the driven parametric oscillator
//! `H = p²/2 + ω²(t)x²/2 − f(t)x`.
//!
//! Position-only histories `ω(t, X, 1, 0)` determine the initial tomogram in
//! other directions. For the free particle `ω(0, X, μ, ν) = |ψ(X/μ, ν/μ)|²/|μ|`.
//! For the oscillator the cumulative distribution
//! `M(t, X, μ, ν) = ∫_{−∞}^X ω(t, X', μ, ν) dX'` obeys
//!
//! `M(t, X, μ, ν) = M(0, X + √2 Re((με + νε̇)δ*), μ Re ε + ν Re ε̇, μ Im ε + ν Im ε̇)`
//!
//! with `ε̈ + ω²ε = 0`, `ε(0) = 1`, `ε̇(0) = i` and `δ̇ = −(i/√2) ε f`, `δ(0) = 0`.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics;
use crate::parallel::{self, Execution};
use crate::state::{hermite_functions, SpatialGrid, WaveFunction};
use crate::transform::TomogramSlice;

/// Tolerance on the normalization of recovered initial tomograms.
pub const RECOVERY_NORM_TOL: f64 = 1e-5;

/// Wronskian drift at which integration is abandoned.
pub const WRONSKIAN_LIMIT: f64 = 1e-6;

/// Default integration step.
pub const DEFAULT_DT: f64 = 1e-3;

/// Amplitude at the grid edge, relative to the peak, above which a freely
/// propagated state is considered to have left the grid.
const EDGE_AMPLITUDE: f64 = 1e-5;

/// Largest Hermite index used by the harmonic propagator.
const HARMONIC_MAX_LEVEL: usize = 200;

/// Norm fraction the harmonic expansion must capture.
const HARMONIC_CAPTURE: f64 = 1e-14;

/// `ψ(X, t) = (2πit)^{-1/2} ∫ exp(i(X−Y)²/(2t)) ψ(Y, 0) dY`, computed in
/// momentum space as multiplication by `exp(−ik²t/2)`.
pub fn free_propagate(psi0: &WaveFunction, t: f64) -> Result<WaveFunction> {
    if !t.is_finite() {
        return Err(Error::invalid(format!("time {t}")));
    }
    if t == 0.0 {
        return Ok(psi0.clone());
    }
    let grid = *psi0.grid();
    let mut data = psi0.amplitudes().to_vec();
    numerics::fft_forward(&mut data);
    for (z, k) in data.iter_mut().zip(numerics::fft_wavenumbers(grid.len(), grid.dx())) {
        *z *= C64::from_polar(1.0, -0.5 * k * k * t);
    }
    numerics::fft_inverse(&mut data);
    let out = WaveFunction::new(grid, data)?;
    let leak = out.boundary_leak();
    if leak > EDGE_AMPLITUDE.max(psi0.boundary_leak()) {
        return Err(Error::Resolution {
            message: format!(
                "state spread to the edges of [{}, {}] by t = {t} (edge amplitude {leak:.2e} of peak); widen the grid",
                grid.x_min(),
                grid.x_max()
            ),
            suggested_points: grid.len() * 2,
        });
    }
    Ok(out)
}

/// Position densities `ω(t_i, X, 1, 0)` on a shared grid.
#[derive(Debug, Clone)]
pub struct PositionHistory {
    times: Vec<f64>,
    slices: Vec<TomogramSlice>,
}

impl PositionHistory {
    pub fn new(times: Vec<f64>, slices: Vec<TomogramSlice>) -> Result<Self> {
        if times.is_empty() || times.len() != slices.len() {
            return Err(Error::invalid(format!(
                "history needs matching nonempty times and slices, got {} and {}",
                times.len(),
                slices.len()
            )));
        }
        if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("history times must be finite and strictly increasing"));
        }
        let grid = *slices[0].grid();
        for (t, s) in times.iter().zip(&slices) {
            if !s.is_position() {
                return Err(Error::invalid(format!(
                    "history slice at t = {t} is not a position slice"
                )));
            }
            if !s.grid().approx_eq(&grid) {
                return Err(Error::invalid(format!(
                    "history slice at t = {t} uses a different grid"
                )));
            }
        }
        Ok(PositionHistory { times, slices })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn slices(&self) -> &[TomogramSlice] {
        &self.slices
    }

    pub fn grid(&self) -> &SpatialGrid {
        self.slices[0].grid()
    }

    fn check_time(&self, t: f64) -> Result<()> {
        let (lo, hi) = (self.times[0], self.times[self.times.len() - 1]);
        if !(t >= lo && t <= hi) {
            return Err(Error::OutOfRange {
                what: "history time",
                value: t,
                min: lo,
                max: hi,
            });
        }
        Ok(())
    }

    /// Position density at time `t`, cubic in `t` between samples.
    pub fn density_at(&self, t: f64) -> Result<Vec<f64>> {
        self.check_time(t)?;
        if let Ok(i) = self.times.binary_search_by(|v| v.total_cmp(&t)) {
            return Ok(self.slices[i].density().to_vec());
        }
        let range = numerics::stencil4(&self.times, t);
        let ts = &self.times[range.clone()];
        let weights: Vec<f64> = (0..ts.len())
            .map(|i| {
                ts.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &tj)| (t - tj) / (ts[i] - tj))
                    .product()
            })
            .collect();
        let slices = &self.slices[range];
        Ok((0..self.grid().len())
            .map(|k| {
                weights
                    .iter()
                    .zip(slices)
                    .map(|(w, s)| w * s.density()[k])
                    .sum::<f64>()
                    .max(0.0)
            })
            .collect())
    }
}

/// Position history of `psi0` under free evolution, one slice per time.
pub fn free_history(psi0: &WaveFunction, times: &[f64], exec: Execution) -> Result<PositionHistory> {
    let slices = parallel::try_map(exec, times, |&t| position_slice(&free_propagate(psi0, t)?))?;
    PositionHistory::new(times.to_vec(), slices)
}

fn position_slice(psi: &WaveFunction) -> Result<TomogramSlice> {
    let norm = psi.norm_sqr();
    TomogramSlice::new(
        1.0,
        0.0,
        *psi.grid(),
        psi.density().into_iter().map(|d| d / norm).collect(),
    )
}

/// `ω(0, X, μ, ν) = |ψ(X/μ, ν/μ)|² / |μ|` from a free-particle history.
pub fn initial_tomogram_from_position_history(history: &PositionHistory, mu: f64, nu: f64) -> Result<TomogramSlice> {
    if mu == 0.0 || !mu.is_finite() || !nu.is_finite() {
        return Err(Error::invalid(format!(
            "direction ({mu}, {nu}) is not reachable from a position history"
        )));
    }
    let tau = nu / mu;
    let base = history.density_at(tau)?;
    let grid = *history.grid();
    if mu == 1.0 {
        return TomogramSlice::with_tolerance(mu, nu, grid, base, RECOVERY_NORM_TOL);
    }
    let density = grid
        .points()
        .map(|x| numerics::cubic_interp(&base, grid.x_min(), grid.dx(), x / mu, 0.0).max(0.0) / mu.abs())
        .collect();
    TomogramSlice::with_tolerance(mu, nu, grid, density, RECOVERY_NORM_TOL)
}

/// Named time profile for `ω(t)` or `f(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum TimeProfile {
    Constant {
        value: f64,
    },
    /// `a + b t`
    LinearRamp {
        a: f64,
        b: f64,
    },
    /// `w0 + amp cos(freq t)`
    CosineModulated {
        w0: f64,
        amp: f64,
        freq: f64,
    },
}

impl TimeProfile {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            TimeProfile::Constant { value } => value,
            TimeProfile::LinearRamp { a, b } => a + b * t,
            TimeProfile::CosineModulated { w0, amp, freq } => w0 + amp * (freq * t).cos(),
        }
    }

    pub fn constant_value(&self) -> Option<f64> {
        match *self {
            TimeProfile::Constant { value } => Some(value),
            _ => None,
        }
    }

    fn is_finite(&self) -> bool {
        match *self {
            TimeProfile::Constant { value } => value.is_finite(),
            TimeProfile::LinearRamp { a, b } => a.is_finite() && b.is_finite(),
            TimeProfile::CosineModulated { w0, amp, freq } => w0.is_finite() && amp.is_finite() && freq.is_finite(),
        }
    }
}

impl fmt::Display for TimeProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeProfile::Constant { value } => write!(f, "constant:{value}"),
            TimeProfile::LinearRamp { a, b } => write!(f, "linear-ramp:{a},{b}"),
            TimeProfile::CosineModulated { w0, amp, freq } => write!(f, "cosine-modulated:{w0},{amp},{freq}"),
        }
    }
}

/// Parses `constant:w`, `linear-ramp:a,b` or `cosine-modulated:w0,amp,freq`.
impl FromStr for TimeProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let values = args
            .split(',')
            .filter(|a| !a.trim().is_empty())
            .map(|a| {
                a.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::invalid(format!("bad number {a:?} in profile {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let profile = match (name.trim(), values.as_slice()) {
            ("constant", &[value]) => TimeProfile::Constant { value },
            ("linear-ramp", &[a, b]) => TimeProfile::LinearRamp { a, b },
            ("cosine-modulated", &[w0, amp, freq]) => TimeProfile::CosineModulated { w0, amp, freq },
            _ => {
                return Err(Error::invalid(format!(
                    "unknown profile {s:?}; expected constant:w, linear-ramp:a,b or cosine-modulated:w0,amp,freq"
                )))
            }
        };
        if !profile.is_finite() {
            return Err(Error::invalid(format!("profile {s:?} has non-finite parameters")));
        }
        Ok(profile)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorSpec {
    pub omega: TimeProfile,
    pub force: TimeProfile,
    pub t_max: f64,
    pub dt: f64,
}

impl OscillatorSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(Error::invalid(format!("t_max = {} must be positive", self.t_max)));
        }
        if !(self.dt > 0.0 && self.dt <= self.t_max) {
            return Err(Error::invalid(format!("dt = {} must lie in (0, t_max]", self.dt)));
        }
        if !(self.omega.is_finite() && self.force.is_finite()) {
            return Err(Error::invalid("non-finite profile parameters"));
        }
        Ok(())
    }
}

/// Samples of `ε`, `ε̇`, `δ` on a uniform time lattice from 0 to `t_max`.
#[derive(Debug, Clone)]
pub struct OscillatorTrajectory {
    spec: OscillatorSpec,
    times: Vec<f64>,
    epsilon: Vec<C64>,
    epsilon_dot: Vec<C64>,
    delta: Vec<C64>,
}

impl OscillatorTrajectory {
    pub fn spec(&self) -> &OscillatorSpec {
        &self.spec
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn epsilon(&self) -> &[C64] {
        &self.epsilon
    }

    pub fn epsilon_dot(&self) -> &[C64] {
        &self.epsilon_dot
    }

    pub fn delta(&self) -> &[C64] {
        &self.delta
    }

    /// `Im(ε* ε̇)` at sample `i`.
    pub fn wronskian(&self, i: usize) -> f64 {
        wronskian(self.epsilon[i], self.epsilon_dot[i])
    }

    pub fn max_wronskian_drift(&self) -> f64 {
        (0..self.times.len())
            .map(|i| (self.wronskian(i) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// `(ε, ε̇, δ)` at time `t` by cubic Hermite interpolation using the
    /// equations of motion for the derivatives.
    pub fn at(&self, t: f64) -> Result<(C64, C64, C64)> {
        let t_max = self.times[self.times.len() - 1];
        if !(t >= 0.0 && t <= t_max) {
            return Err(Error::OutOfRange {
                what: "trajectory time",
                value: t,
                min: 0.0,
                max: t_max,
            });
        }
        let i = self.times.partition_point(|&v| v <= t).clamp(1, self.times.len() - 1) - 1;
        if self.times[i] == t {
            return Ok((self.epsilon[i], self.epsilon_dot[i], self.delta[i]));
        }
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let d0 = self.rates(i);
        let d1 = self.rates(i + 1);
        let y0 = [self.epsilon[i], self.epsilon_dot[i], self.delta[i]];
        let y1 = [self.epsilon[i + 1], self.epsilon_dot[i + 1], self.delta[i + 1]];
        let h00 = 2.0 * s.powi(3) - 3.0 * s * s + 1.0;
        let h10 = s.powi(3) - 2.0 * s * s + s;
        let h01 = -2.0 * s.powi(3) + 3.0 * s * s;
        let h11 = s.powi(3) - s * s;
        let v: Vec<C64> = (0..3)
            .map(|c| y0[c] * h00 + d0[c] * (h10 * h) + y1[c] * h01 + d1[c] * (h11 * h))
            .collect();
        Ok((v[0], v[1], v[2]))
    }

    fn rates(&self, i: usize) -> [C64; 3] {
        rhs(
            &self.spec,
            self.times[i],
            [self.epsilon[i], self.epsilon_dot[i], self.delta[i]],
        )
    }
}

fn wronskian(e: C64, ed: C64) -> f64 {
    (e.conj() * ed).im
}

fn rhs(spec: &OscillatorSpec, t: f64, y: [C64; 3]) -> [C64; 3] {
    let w = spec.omega.eval(t);
    let f = spec.force.eval(t);
    [y[1], -y[0] * (w * w), C64::new(0.0, -FRAC_1_SQRT_2) * y[0] * f]
}

/// Fixed-step classical RK4 for `(ε, ε̇, δ)`. The step is shrunk so that an
/// integer number of steps ends exactly at `t_max`.
pub fn solve_epsilon_delta(spec: &OscillatorSpec) -> Result<OscillatorTrajectory> {
    spec.validate()?;
    let steps = ((spec.t_max / spec.dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let h = spec.t_max / steps as f64;
    let mut times = Vec::with_capacity(steps + 1);
    let mut epsilon = Vec::with_capacity(steps + 1);
    let mut epsilon_dot = Vec::with_capacity(steps + 1);
    let mut delta = Vec::with_capacity(steps + 1);
    let mut y = [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, 0.0)];
    times.push(0.0);
    epsilon.push(y[0]);
    epsilon_dot.push(y[1]);
    delta.push(y[2]);
    let add = |a: [C64; 3], b: [C64; 3], s: f64| [a[0] + b[0] * s, a[1] + b[1] * s, a[2] + b[2] * s];
    for n in 0..steps {
        let t = n as f64 * h;
        let k1 = rhs(spec, t, y);
        let k2 = rhs(spec, t + 0.5 * h, add(y, k1, 0.5 * h));
        let k3 = rhs(spec, t + 0.5 * h, add(y, k2, 0.5 * h));
        let k4 = rhs(spec, t + h, add(y, k3, h));
        for c in 0..3 {
            y[c] += (k1[c] + (k2[c] + k3[c]) * 2.0 + k4[c]) * (h / 6.0);
        }
        let t_next = if n + 1 == steps { spec.t_max } else { (n + 1) as f64 * h };
        let drift = (wronskian(y[0], y[1]) - 1.0).abs();
        if !(drift <= WRONSKIAN_LIMIT) {
            return Err(Error::StepSizeTooLarge {
                time: t_next,
                drift,
                limit: WRONSKIAN_LIMIT,
            });
        }
        times.push(t_next);
        epsilon.push(y[0]);
        epsilon_dot.push(y[1]);
        delta.push(y[2]);
    }
    Ok(OscillatorTrajectory {
        spec: *spec,
        times,
        epsilon,
        epsilon_dot,
        delta,
    })
}

/// `M(t, X, μ, ν)` from the initial cumulative distribution `initial(X, μ, ν)`.
pub fn evolve_distribution<F>(initial: F, traj: &OscillatorTrajectory, t: f64, x: f64, mu: f64, nu: f64) -> Result<f64>
where
    F: Fn(f64, f64, f64) -> f64,
{
    let (x2, mu2, nu2) = evolved_arguments(traj, t, x, mu, nu)?;
    Ok(initial(x2, mu2, nu2))
}

/// The arguments `(X', μ', ν')` at which the initial distribution is read.
pub fn evolved_arguments(traj: &OscillatorTrajectory, t: f64, x: f64, mu: f64, nu: f64) -> Result<(f64, f64, f64)> {
    let (e, ed, d) = traj.at(t)?;
    let mu2 = mu * e.re + nu * ed.re;
    let nu2 = mu * e.im + nu * ed.im;
    if mu2 == 0.0 && nu2 == 0.0 {
        return Err(Error::DegenerateDirection);
    }
    let shift = SQRT_2 * ((e * mu + ed * nu) * d.conj()).re;
    Ok((x + shift, mu2, nu2))
}

/// `ω(X, Re ε(t), Im ε(t)) = ∂_X M(t, X − √2 Re(ε δ*), 1, 0)`.
pub fn initial_tomogram_from_oscillator(
    history: &PositionHistory,
    traj: &OscillatorTrajectory,
    t: f64,
) -> Result<TomogramSlice> {
    let density = history.density_at(t)?;
    let (e, _, d) = traj.at(t)?;
    let grid = *history.grid();
    let shift = SQRT_2 * (e * d.conj()).re;
    if shift == 0.0 {
        return TomogramSlice::with_tolerance(e.re, e.im, grid, density, RECOVERY_NORM_TOL);
    }
    let cumulative = numerics::cumulative_trapezoid(&density, grid.dx());
    let total = cumulative[cumulative.len() - 1];
    let shifted: Vec<f64> = grid
        .points()
        .map(|x| {
            let y = x - shift;
            if y <= grid.x_min() {
                0.0
            } else if y >= grid.x_max() {
                total
            } else {
                numerics::cubic_interp(&cumulative, grid.x_min(), grid.dx(), y, 0.0)
            }
        })
        .collect();
    let recovered = numerics::derivative(&shifted, grid.dx())
        .into_iter()
        .map(|v| v.max(0.0))
        .collect();
    TomogramSlice::with_tolerance(e.re, e.im, grid, recovered, RECOVERY_NORM_TOL)
}

/// Initial tomograms for several times; output order follows `times`.
pub fn initial_tomograms_from_oscillator(
    history: &PositionHistory,
    traj: &OscillatorTrajectory,
    times: &[f64],
    exec: Execution,
) -> Result<Vec<TomogramSlice>> {
    parallel::try_map(exec, times, |&t| initial_tomogram_from_oscillator(history, traj, t))
}

/// Exact evolution under `p²/2 + ω²x²/2 − f x` with constant `ω > 0` and `f`,
/// by expansion in the displaced oscillator eigenbasis.
pub fn harmonic_evolve(psi0: &WaveFunction, omega: f64, force: f64, t: f64) -> Result<WaveFunction> {
    Ok(harmonic_evolve_many(psi0, omega, force, &[t], Execution::Sequential)?.remove(0))
}

/// [`harmonic_evolve`] at several times sharing one basis expansion.
pub fn harmonic_evolve_many(
    psi0: &WaveFunction,
    omega: f64,
    force: f64,
    times: &[f64],
    exec: Execution,
) -> Result<Vec<WaveFunction>> {
    if !(omega > 0.0 && omega.is_finite() && force.is_finite()) {
        return Err(Error::invalid(format!(
            "harmonic propagator needs omega > 0, got {omega}"
        )));
    }
    let grid = *psi0.grid();
    let dx = grid.dx();
    let centre = force / (omega * omega);
    let scale = omega.sqrt();
    let amp = omega.powf(0.25);
    let basis: Vec<Vec<f64>> = grid
        .points()
        .map(|x| {
            hermite_functions(HARMONIC_MAX_LEVEL, scale * (x - centre))
                .into_iter()
                .map(|h| amp * h)
                .collect()
        })
        .collect();
    let norm = psi0.norm_sqr();
    let mut coeffs = Vec::new();
    let mut captured = 0.0;
    for n in 0..=HARMONIC_MAX_LEVEL {
        let c: C64 = basis.iter().zip(psi0.amplitudes()).map(|(b, a)| a * b[n]).sum::<C64>() * dx;
        captured += c.norm_sqr();
        coeffs.push(c);
        if captured >= norm * (1.0 - HARMONIC_CAPTURE) {
            break;
        }
    }
    if captured < norm * (1.0 - HARMONIC_CAPTURE) {
        return Err(Error::NumericalFailure(format!(
            "oscillator basis up to level {HARMONIC_MAX_LEVEL} captures only {:.3e} of the norm",
            captured / norm
        )));
    }
    parallel::try_map(exec, times, |&t| {
        let phases: Vec<C64> = coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c * C64::from_polar(1.0, -omega * (n as f64 + 0.5) * t))
            .collect();
        let amps = basis
            .iter()
            .map(|b| phases.iter().zip(b).map(|(c, v)| c * v).sum())
            .collect();
        WaveFunction::new(grid, amps)
    })
}

/// Position history under a constant-frequency, constant-force oscillator.
pub fn harmonic_history(
    psi0: &WaveFunction,
    omega: f64,
    force: f64,
    times: &[f64],
    exec: Execution,
) -> Result<PositionHistory> {
    let states = harmonic_evolve_many(psi0, omega, force, times, exec)?;
    let slices = parallel::try_map(exec, &states, position_slice)?;
    PositionHistory::new(times.to_vec(), slices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{make_grid, sample_state, StatePreset};
    use crate::transform::tomogram;
    use std::f64::consts::PI;

    fn vacuum() -> WaveFunction {
        sample_state(&StatePreset::vacuum(), &make_grid(-12.0, 12.0, 2048).unwrap()).unwrap()
    }

    fn spec(omega: TimeProfile, force: TimeProfile, t_max: f64) -> OscillatorSpec {
        OscillatorSpec {
            omega,
            force,
            t_max,
            dt: DEFAULT_DT,
        }
    }

    #[test]
    fn free_ground_state_spreads() {
        let psi = free_propagate(&vacuum(), 1.0).unwrap();
        let d = psi.density();
        let peak = numerics::cubic_interp(&d, psi.grid().x_min(), psi.grid().dx(), 0.0, 0.0);
        assert!((peak - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-5, "{peak}");
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn free_zero_time_is_identity() {
        let psi = vacuum();
        assert_eq!(free_propagate(&psi, 0.0).unwrap(), psi);
    }

    #[test]
    fn free_semigroup() {
        let psi = sample_state(
            &StatePreset::Gaussian {
                x0: 0.5,
                p0: 1.0,
                sigma: 0.6,
            },
            vacuum().grid(),
        )
        .unwrap();
        let two = free_propagate(&free_propagate(&psi, 0.4).unwrap(), 0.6).unwrap();
        let one = free_propagate(&psi, 1.0).unwrap();
        for (a, b) in two.amplitudes().iter().zip(one.amplitudes()) {
            assert!((a - b).norm() < 1e-7);
        }
    }

    #[test]
    fn free_spread_beyond_grid_is_rejected() {
        let psi = sample_state(&StatePreset::vacuum(), &make_grid(-4.0, 4.0, 256).unwrap()).unwrap();
        assert_eq!(free_propagate(&psi, 5.0).unwrap_err().code(), "resolution-error");
    }

    #[test]
    fn unit_frequency_gives_exponential() {
        let traj = solve_epsilon_delta(&spec(
            TimeProfile::Constant { value: 1.0 },
            TimeProfile::Constant { value: 0.0 },
            2.0 * PI,
        ))
        .unwrap();
        let (e, _, _) = traj.at(PI / 2.0).unwrap();
        assert!((e - C64::new(0.0, 1.0)).norm() < 1e-8);
        assert!(traj.max_wronskian_drift() < 1e-8);
    }

    #[test]
    fn double_frequency_closed_form() {
        let traj = solve_epsilon_delta(&spec(
            TimeProfile::Constant { value: 2.0 },
            TimeProfile::Constant { value: 0.0 },
            2.0 * PI,
        ))
        .unwrap();
        for &t in &[0.3, 1.7, 4.0] {
            let (e, ed, _) = traj.at(t).unwrap();
            let expect = C64::new((2.0 * t).cos(), 0.5 * (2.0 * t).sin());
            let expect_dot = C64::new(-2.0 * (2.0 * t).sin(), (2.0 * t).cos());
            assert!((e - expect).norm() < 1e-8 && (ed - expect_dot).norm() < 1e-8);
        }
        assert!(traj.max_wronskian_drift() < 1e-8);
    }

    #[test]
    fn constant_force_delta_quadrature() {
        let traj = solve_epsilon_delta(&spec(
            TimeProfile::Constant { value: 1.0 },
            TimeProfile::Constant { value: 1.0 },
            PI,
        ))
        .unwrap();
        let (_, _, d) = traj.at(PI).unwrap();
        let expect = -(C64::from_polar(1.0, PI) - 1.0) * FRAC_1_SQRT_2;
        assert!((d - expect).norm() < 1e-7);
    }

    #[test]
    fn oversized_step_is_rejected() {
        let mut s = spec(
            TimeProfile::Constant { value: 1.0 },
            TimeProfile::Constant { value: 0.0 },
            2.0 * PI,
        );
        s.dt = s.t_max;
        match solve_epsilon_delta(&s).unwrap_err() {
            Error::StepSizeTooLarge { time, .. } => assert!(time > 0.0),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn evolution_arguments() {
        let traj = solve_epsilon_delta(&spec(
            TimeProfile::Constant { value: 1.0 },
            TimeProfile::Constant { value: 0.0 },
            PI,
        ))
        .unwrap();
        let (x, m, n) = evolved_arguments(&traj, 0.0, 0.3, 0.7, -0.2).unwrap();
        assert_eq!((x, m, n), (0.3, 0.7, -0.2));
        let (x, m, n) = evolved_arguments(&traj, PI / 2.0, 0.3, 0.7, -0.2).unwrap();
        assert!((x - 0.3).abs() < 1e-12 && (m - 0.2).abs() < 1e-8 && (n - 0.7).abs() < 1e-8);
    }

    #[test]
    fn profile_parsing() {
        assert_eq!(
            "constant:2".parse::<TimeProfile>().unwrap(),
            TimeProfile::Constant { value: 2.0 }
        );
        assert_eq!(
            "cosine-modulated:1,0.2,3".parse::<TimeProfile>().unwrap(),
            TimeProfile::CosineModulated {
                w0: 1.0,
                amp: 0.2,
                freq: 3.0
            }
        );
        let p: TimeProfile = "linear-ramp:1,0.5".parse().unwrap();
        assert_eq!(p.eval(2.0), 2.0);
        assert_eq!(p.to_string().parse::<TimeProfile>().unwrap(), p);
        assert!("cubic:1".parse::<TimeProfile>().is_err());
        assert!("constant:1,2".parse::<TimeProfile>().is_err());
    }

    #[test]
    fn harmonic_ground_state_is_stationary() {
        let psi = vacuum();
        let out = harmonic_evolve(&psi, 1.0, 0.0, 1.3).unwrap();
        assert!((out.fidelity(&psi).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn harmonic_quarter_period_is_fourier() {
        let psi = sample_state(
            &StatePreset::Gaussian {
                x0: 1.0,
                p0: 0.5,
                sigma: 0.6,
            },
            vacuum().grid(),
        )
        .unwrap();
        let out = harmonic_evolve(&psi, 1.0, 0.0, PI / 2.0).unwrap();
        let direct = tomogram(&psi, 0.0, 1.0).unwrap();
        for (a, b) in out.density().iter().zip(direct.density()) {
            assert!((a - b).abs() < 1e-6, "{a} {b}");
        }
    }

    #[test]
    fn history_interpolation_is_exact_at_samples() {
        let psi = vacuum();
        let h = free_history(&psi, &[0.0, 0.5, 1.0, 1.5, 2.0], Execution::Sequential).unwrap();
        assert_eq!(h.density_at(1.0).unwrap(), h.slices()[2].density());
        assert_eq!(h.density_at(2.5).unwrap_err().code(), "out-of-range");
        let s = initial_tomogram_from_position_history(&h, 1.0, 0.0).unwrap();
        assert_eq!(s.density(), h.slices()[0].density());
        assert_eq!(
            initial_tomogram_from_position_history(&h, 0.0, 1.0).unwrap_err().code(),
            "invalid-argument"
        );
    }
}
