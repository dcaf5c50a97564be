//! Phase recovery from an incomplete set of tomograms.
//!
//! The state is assumed piecewise: `⟨X|ψ⟩ = Σ_j e^{iφ_j} χ_j(X) ψ_j(X)` with
//! known breakpoints, nonnegative magnitudes `ψ_j = χ_j √ω(X, 1, 0)` read off
//! the position tomogram, and unknown per-segment phases. Every extra slice
//! contributes, at every X sample,
//!
//! `ω(X, μ, ν) − Σ_j |ψ_{j,μ,ν}|² = 2 Σ_{j<k} [a_jk cos(φ_j − φ_k) − b_jk sin(φ_j − φ_k)]`
//!
//! with `ψ_{j,μ,ν} = F_{μ,ν}(χ_j ψ)` and `a_jk + i b_jk = ψ_{j,μ,ν} ψ*_{k,μ,ν}`.
//! The stacked system is solved for the pairwise products by least squares
//! and a global phase assignment is read from the dominant eigenvector of the
//! Hermitian matrix `U_jk = e^{i(φ_j − φ_k)}`.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::parallel::{self, Execution};
use crate::state::{sample_state, SpatialGrid, StatePreset, WaveFunction};
use crate::transform::{self, TomogramSlice, NU_FLOOR};

/// Exponent of the breakpoint taper of [`PiecewiseSpec`].
pub const TAPER_POWER: i32 = 6;

/// Position densities below this are treated as exact zeros when taking
/// square roots.
pub const DENSITY_FLOOR: f64 = 1e-14;

/// Condition estimates above this flag the result as ill-conditioned.
pub const CONDITION_LIMIT: f64 = 1e8;

/// RMS residual above which the tomograms are declared inconsistent.
pub const RESIDUAL_LIMIT: f64 = 1e-2;

/// Largest admissible move of a pairwise `(cos, sin)` estimate onto the unit
/// circle.
pub const PROJECTION_LIMIT: f64 = 0.1;

/// Segment index of `x`: the number of breakpoints `<= x`, so segment `j`
/// covers `[x_{j-1}, x_j)`.
pub fn segment_of(x: f64, breakpoints: &[f64]) -> usize {
    breakpoints.partition_point(|&b| b <= x)
}

/// Wraps a phase into `[0, 2π)`, snapping values within `1e-12` of `2π` to 0.
pub fn wrap_phase(p: f64) -> f64 {
    let r = p.rem_euclid(TAU);
    if TAU - r <= 1e-12 {
        0.0
    } else {
        r
    }
}

/// Distance between two phases on the circle.
pub fn phase_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

fn check_breakpoints(breakpoints: &[f64]) -> Result<()> {
    if breakpoints.iter().any(|b| !b.is_finite()) {
        return Err(Error::invalid("non-finite breakpoint"));
    }
    if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("breakpoints must be strictly increasing"));
    }
    Ok(())
}

/// Segment magnitudes, phases and breakpoints sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseState {
    breakpoints: Vec<f64>,
    magnitudes: Vec<Vec<f64>>,
    phases: Vec<f64>,
}

impl PiecewiseState {
    pub fn new(breakpoints: Vec<f64>, magnitudes: Vec<Vec<f64>>, phases: Vec<f64>, grid: &SpatialGrid) -> Result<Self> {
        check_breakpoints(&breakpoints)?;
        let k = breakpoints.len() + 1;
        if magnitudes.len() != k || phases.len() != k {
            return Err(Error::invalid(format!(
                "{} breakpoints need {k} magnitudes and phases, got {} and {}",
                breakpoints.len(),
                magnitudes.len(),
                phases.len()
            )));
        }
        if phases.iter().any(|p| !p.is_finite()) {
            return Err(Error::invalid("non-finite phase"));
        }
        for (j, m) in magnitudes.iter().enumerate() {
            if m.len() != grid.len() {
                return Err(Error::invalid(format!("magnitude {j} has {} samples", m.len())));
            }
            for (i, (&v, x)) in m.iter().zip(grid.points()).enumerate() {
                if !(v >= 0.0) || !v.is_finite() {
                    return Err(Error::invalid(format!("magnitude {j} sample {i} = {v} is negative")));
                }
                if v != 0.0 && segment_of(x, &breakpoints) != j {
                    return Err(Error::invalid(format!(
                        "magnitude {j} is nonzero at X = {x}, outside its segment"
                    )));
                }
            }
        }
        let phases = phases.into_iter().map(wrap_phase).collect();
        Ok(PiecewiseState {
            breakpoints,
            magnitudes,
            phases,
        })
    }

    /// Splits `magnitude` (nonnegative, full grid) at the breakpoints.
    pub fn from_magnitude(
        magnitude: &[f64],
        breakpoints: Vec<f64>,
        phases: Vec<f64>,
        grid: &SpatialGrid,
    ) -> Result<Self> {
        check_breakpoints(&breakpoints)?;
        let k = breakpoints.len() + 1;
        let mut magnitudes = vec![vec![0.0; grid.len()]; k];
        for (i, (x, &m)) in grid.points().zip(magnitude).enumerate() {
            magnitudes[segment_of(x, &breakpoints)][i] = m;
        }
        Self::new(breakpoints, magnitudes, phases, grid)
    }

    /// Magnitudes `χ_j √ω(X, 1, 0)` from a position tomogram.
    pub fn from_position(position: &TomogramSlice, breakpoints: Vec<f64>, phases: Vec<f64>) -> Result<Self> {
        let magnitude: Vec<f64> = position
            .density()
            .iter()
            .map(|&d| if d < DENSITY_FLOOR { 0.0 } else { d.sqrt() })
            .collect();
        Self::from_magnitude(&magnitude, breakpoints, phases, position.grid())
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn magnitudes(&self) -> &[Vec<f64>] {
        &self.magnitudes
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn segment_count(&self) -> usize {
        self.magnitudes.len()
    }

    pub fn with_phases(&self, phases: Vec<f64>) -> Result<Self> {
        if phases.len() != self.segment_count() {
            return Err(Error::invalid("phase count does not match segment count"));
        }
        Ok(PiecewiseState {
            breakpoints: self.breakpoints.clone(),
            magnitudes: self.magnitudes.clone(),
            phases: phases.into_iter().map(wrap_phase).collect(),
        })
    }

    fn segment_wave(&self, j: usize, grid: &SpatialGrid) -> WaveFunction {
        let amps = self.magnitudes[j].iter().map(|&m| C64::from(m)).collect();
        WaveFunction::new(*grid, amps).expect("magnitude length checked at construction")
    }
}

/// Serializable description of a piecewise state: an analytic envelope whose
/// modulus is split at the breakpoints. With `taper_width = Some(w)` the
/// modulus is also multiplied by `|tanh((x − b)/w)|⁶` at every breakpoint so
/// the state stays smooth across the phase jumps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseSpec {
    pub envelope: Box<StatePreset>,
    pub breakpoints: Vec<f64>,
    pub phases: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub taper_width: Option<f64>,
}

impl PiecewiseSpec {
    pub fn validate(&self) -> Result<()> {
        if matches!(*self.envelope, StatePreset::Piecewise(_)) {
            return Err(Error::invalid("piecewise envelope cannot itself be piecewise"));
        }
        self.envelope.validate()?;
        check_breakpoints(&self.breakpoints)?;
        if self.phases.len() != self.breakpoints.len() + 1 {
            return Err(Error::invalid(format!(
                "{} breakpoints need {} phases, got {}",
                self.breakpoints.len(),
                self.breakpoints.len() + 1,
                self.phases.len()
            )));
        }
        if let Some(w) = self.taper_width {
            if !(w > 0.0) {
                return Err(Error::invalid(format!("taper width {w} must be positive")));
            }
        }
        Ok(())
    }

    pub fn realize(&self, grid: &SpatialGrid) -> Result<PiecewiseState> {
        self.validate()?;
        let envelope = sample_state(&self.envelope, grid)?;
        let magnitude: Vec<f64> = grid
            .points()
            .zip(envelope.amplitudes())
            .map(|(x, a)| {
                let taper = self.taper_width.map_or(1.0, |w| {
                    self.breakpoints
                        .iter()
                        .map(|b| ((x - b) / w).tanh().abs().powi(TAPER_POWER))
                        .product()
                });
                a.norm() * taper
            })
            .collect();
        PiecewiseState::from_magnitude(&magnitude, self.breakpoints.clone(), self.phases.clone(), grid)
    }
}

/// `⟨X|ψ⟩ = Σ_j e^{iφ_j} χ_j ψ_j(X)`, normalized.
pub fn assemble_state(state: &PiecewiseState, grid: &SpatialGrid) -> Result<WaveFunction> {
    if state.magnitudes.iter().any(|m| m.len() != grid.len()) {
        return Err(Error::invalid("piecewise state was sampled on a different grid"));
    }
    let mut amps = vec![C64::new(0.0, 0.0); grid.len()];
    for (m, &phi) in state.magnitudes.iter().zip(&state.phases) {
        let rot = C64::from_polar(1.0, phi);
        for (a, &v) in amps.iter_mut().zip(m) {
            *a += rot * v;
        }
    }
    WaveFunction::new(*grid, amps)?.normalized()
}

/// Locations of zeros of a position density: for every interior run of
/// samples below `rel_threshold · max`, the sample with the smallest density.
pub fn detect_nodes(slice: &TomogramSlice, rel_threshold: f64) -> Result<Vec<f64>> {
    if !slice.is_position() {
        return Err(Error::invalid(format!(
            "node detection needs the position slice (1, 0), got ({}, {})",
            slice.mu(),
            slice.nu()
        )));
    }
    if !(rel_threshold > 0.0) {
        return Err(Error::invalid("threshold must be positive"));
    }
    let d = slice.density();
    let cut = rel_threshold * d.iter().copied().fold(0.0, f64::max);
    let mut nodes = Vec::new();
    let mut seen_above = false;
    let mut run: Option<usize> = None;
    for (i, &v) in d.iter().enumerate() {
        if v < cut {
            if seen_above && run.is_none() {
                run = Some(i);
            }
        } else {
            if let Some(start) = run.take() {
                let best = (start..i).min_by(|&a, &b| d[a].total_cmp(&d[b])).unwrap();
                nodes.push(slice.grid().x(best));
            }
            seen_above = true;
        }
    }
    Ok(nodes)
}

/// Per-segment transforms `ψ_{j,μ,ν}` for one direction, sampled on `grid`.
#[derive(Debug, Clone)]
pub struct SegmentTransformSet {
    mu: f64,
    nu: f64,
    grid: SpatialGrid,
    segment_waves: Vec<Vec<C64>>,
}

impl SegmentTransformSet {
    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn segment_waves(&self) -> &[Vec<C64>] {
        &self.segment_waves
    }

    /// `⟨ψ_{j,μ,ν}|ψ_{k,μ,ν}⟩` on the sampling grid.
    pub fn inner(&self, j: usize, k: usize) -> C64 {
        self.segment_waves[j]
            .iter()
            .zip(&self.segment_waves[k])
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            * self.grid.dx()
    }

    /// `Σ_j ψ_{j,μ,ν}`.
    pub fn total(&self) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.grid.len()];
        for w in &self.segment_waves {
            out.iter_mut().zip(w).for_each(|(o, v)| *o += v);
        }
        out
    }

    /// `a_jk(X) + i b_jk(X) = ψ_{j,μ,ν}(X) ψ*_{k,μ,ν}(X)` at sample `i`.
    pub fn cross(&self, j: usize, k: usize, i: usize) -> C64 {
        self.segment_waves[j][i] * self.segment_waves[k][i].conj()
    }
}

/// `ψ_{j,μ,ν} = F_{μ,ν}(χ_j ψ)` for every segment (phases not applied),
/// evaluated on the grid the magnitudes were sampled on.
pub fn segment_transforms(state: &PiecewiseState, grid: &SpatialGrid, mu: f64, nu: f64) -> Result<SegmentTransformSet> {
    segment_transforms_on(state, grid, mu, nu, grid)
}

/// As [`segment_transforms`] with an explicit output grid.
pub fn segment_transforms_on(
    state: &PiecewiseState,
    grid: &SpatialGrid,
    mu: f64,
    nu: f64,
    output: &SpatialGrid,
) -> Result<SegmentTransformSet> {
    if nu.abs() < NU_FLOOR {
        return Err(Error::UseScalingBranch { nu, floor: NU_FLOOR });
    }
    // Resolution is a property of the assembled state; individual segments
    // may have hard edges.
    transform::check_chirp_resolution(&assemble_state(state, grid)?, mu, nu, transform::MEASURED_SPECTRAL_TAIL)?;
    let segment_waves = (0..state.segment_count())
        .map(|j| transform::apply_transform(&state.segment_wave(j, grid), mu, nu, output))
        .collect::<Result<Vec<_>>>()?;
    Ok(SegmentTransformSet {
        mu,
        nu,
        grid: *output,
        segment_waves,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecoveryStatus {
    Ok,
    IllConditioned,
}

impl RecoveryStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RecoveryStatus::Ok => "ok",
            RecoveryStatus::IllConditioned => "ill-conditioned",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseRecoveryResult {
    /// Gauge-fixed phases, `phases[0] = 0`, each in `[0, 2π)`.
    pub phases: Vec<f64>,
    /// RMS residual of the stacked linear system.
    pub residual: f64,
    /// Ratio of extreme singular values of the column-equilibrated system.
    pub condition_estimate: f64,
    pub status: RecoveryStatus,
}

/// Least-squares estimate of `(cos(φ_j − φ_k), sin(φ_j − φ_k))` for every
/// unordered pair `j < k`, in lexicographic pair order.
struct PairwiseSolution {
    segments: usize,
    pairs: Vec<(f64, f64)>,
    residual: f64,
    condition: f64,
}

fn pair_list(k: usize) -> Vec<(usize, usize)> {
    (0..k).flat_map(|j| (j + 1..k).map(move |l| (j, l))).collect()
}

fn solve_pairwise(
    position: &TomogramSlice,
    slices: &[TomogramSlice],
    breakpoints: &[f64],
    exec: Execution,
) -> Result<PairwiseSolution> {
    if !position.is_position() {
        return Err(Error::invalid(format!(
            "first slice must be the position tomogram (1, 0), got ({}, {})",
            position.mu(),
            position.nu()
        )));
    }
    let grid = *position.grid();
    for s in slices {
        if !s.grid().approx_eq(&grid) {
            return Err(Error::invalid(format!(
                "slice ({}, {}) is sampled on a different grid than the position slice",
                s.mu(),
                s.nu()
            )));
        }
        if s.nu().abs() < NU_FLOOR {
            return Err(Error::invalid(format!(
                "slice ({}, {}) has |nu| below {NU_FLOOR:e} and carries no phase information",
                s.mu(),
                s.nu()
            )));
        }
    }
    let k = breakpoints.len() + 1;
    let state = PiecewiseState::from_position(position, breakpoints.to_vec(), vec![0.0; k])?;
    let pairs = pair_list(k);
    if pairs.is_empty() {
        let rms = residual_only(&state, &grid, slices, exec)?;
        return Ok(PairwiseSolution {
            segments: 1,
            pairs: vec![],
            residual: rms,
            condition: 1.0,
        });
    }

    let n = grid.len();
    let cols = 2 * pairs.len();
    let blocks = parallel::try_map(exec, slices, |s| {
        let set = segment_transforms(&state, &grid, s.mu(), s.nu())?;
        let mut a = vec![0.0; n * cols];
        let mut b = vec![0.0; n];
        for i in 0..n {
            let diag: f64 = set.segment_waves().iter().map(|w| w[i].norm_sqr()).sum();
            b[i] = s.density()[i] - diag;
            for (p, &(j, l)) in pairs.iter().enumerate() {
                let f = set.cross(j, l, i);
                a[i * cols + 2 * p] = 2.0 * f.re;
                a[i * cols + 2 * p + 1] = -2.0 * f.im;
            }
        }
        Ok::<_, Error>((a, b))
    })?;

    let rows = n * slices.len();
    let mut a = DMatrix::<f64>::zeros(rows, cols);
    let mut b = DVector::<f64>::zeros(rows);
    for (s, (block_a, block_b)) in blocks.iter().enumerate() {
        for i in 0..n {
            let r = s * n + i;
            b[r] = block_b[i];
            for c in 0..cols {
                a[(r, c)] = block_a[i * cols + c];
            }
        }
    }

    let scales: Vec<f64> = (0..cols)
        .map(|c| {
            let norm = a.column(c).norm();
            if norm > 0.0 {
                1.0 / norm
            } else {
                1.0
            }
        })
        .collect();
    let mut scaled = a.clone();
    for (c, &sc) in scales.iter().enumerate() {
        scaled.column_mut(c).scale_mut(sc);
    }
    let svd = scaled.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let y = svd
        .solve(&b, smax * 1e-14)
        .map_err(|e| Error::NumericalFailure(format!("least-squares solve failed: {e}")))?;
    let x = DVector::from_iterator(cols, y.iter().zip(&scales).map(|(v, s)| v * s));
    let resid = &a * &x - &b;
    let residual = (resid.norm_squared() / rows as f64).sqrt();

    Ok(PairwiseSolution {
        segments: k,
        pairs: (0..pairs.len()).map(|p| (x[2 * p], x[2 * p + 1])).collect(),
        residual,
        condition,
    })
}

fn residual_only(state: &PiecewiseState, grid: &SpatialGrid, slices: &[TomogramSlice], exec: Execution) -> Result<f64> {
    let sums = parallel::try_map(exec, slices, |s| {
        let set = segment_transforms(state, grid, s.mu(), s.nu())?;
        Ok::<_, Error>(
            (0..grid.len())
                .map(|i| {
                    let model: f64 = set.segment_waves().iter().map(|w| w[i].norm_sqr()).sum();
                    (s.density()[i] - model).powi(2)
                })
                .sum::<f64>(),
        )
    })?;
    let count = (grid.len() * slices.len()).max(1);
    Ok((sums.iter().sum::<f64>() / count as f64).sqrt())
}

/// Phases from the dominant eigenvector of `U_jk = u_jk` (`U_jj = 1`).
fn phases_from_pairs(k: usize, pairs: &[(f64, f64)]) -> Vec<f64> {
    let mut u = DMatrix::from_element(k, k, C64::new(0.0, 0.0));
    for j in 0..k {
        u[(j, j)] = C64::new(1.0, 0.0);
    }
    for (&(j, l), &(c, s)) in pair_list(k).iter().zip(pairs) {
        u[(j, l)] = C64::new(c, s);
        u[(l, j)] = C64::new(c, -s);
    }
    let eig = u.symmetric_eigen();
    let top = eig.eigenvalues.imax();
    let v = eig.eigenvectors.column(top);
    let reference = v[0].arg();
    (0..k)
        .map(|j| {
            if j == 0 {
                0.0
            } else {
                wrap_phase(v[j].arg() - reference)
            }
        })
        .collect()
}

fn finish(solution: &PairwiseSolution, pairs: &[(f64, f64)]) -> Result<PhaseRecoveryResult> {
    if !solution.residual.is_finite() || solution.residual > RESIDUAL_LIMIT {
        return Err(Error::InconsistentTomograms(format!(
            "residual {:.3e} exceeds {RESIDUAL_LIMIT:e}",
            solution.residual
        )));
    }
    let status = if solution.condition > CONDITION_LIMIT {
        RecoveryStatus::IllConditioned
    } else {
        RecoveryStatus::Ok
    };
    Ok(PhaseRecoveryResult {
        phases: phases_from_pairs(solution.segments, pairs),
        residual: solution.residual,
        condition_estimate: solution.condition,
        status,
    })
}

/// Node method: `breakpoints` are the `M` nodes of the position density and
/// at least `M` extra slices are needed.
pub fn recover_phases_nodes(
    position: &TomogramSlice,
    extras: &[TomogramSlice],
    breakpoints: &[f64],
) -> Result<PhaseRecoveryResult> {
    recover_phases_nodes_with(position, extras, breakpoints, Execution::default())
}

pub fn recover_phases_nodes_with(
    position: &TomogramSlice,
    extras: &[TomogramSlice],
    breakpoints: &[f64],
    exec: Execution,
) -> Result<PhaseRecoveryResult> {
    check_breakpoints(breakpoints)?;
    if extras.len() < breakpoints.len() {
        return Err(Error::InsufficientData {
            required: breakpoints.len(),
            supplied: extras.len(),
        });
    }
    let solution = solve_pairwise(position, extras, breakpoints, exec)?;
    let pairs = solution.pairs.clone();
    finish(&solution, &pairs)
}

/// Piecewise-constant-phase method over a known fragmentation: needs at least
/// one slice per segment; pairwise estimates are projected onto the unit
/// circle before the eigenvector step.
pub fn recover_phases_piecewise(
    fragmentation: &[f64],
    position: &TomogramSlice,
    slices: &[TomogramSlice],
) -> Result<PhaseRecoveryResult> {
    recover_phases_piecewise_with(fragmentation, position, slices, Execution::default())
}

pub fn recover_phases_piecewise_with(
    fragmentation: &[f64],
    position: &TomogramSlice,
    slices: &[TomogramSlice],
    exec: Execution,
) -> Result<PhaseRecoveryResult> {
    check_breakpoints(fragmentation)?;
    let k = fragmentation.len() + 1;
    if slices.len() < k {
        return Err(Error::InsufficientData {
            required: k,
            supplied: slices.len(),
        });
    }
    let solution = solve_pairwise(position, slices, fragmentation, exec)?;
    let mut projected = Vec::with_capacity(solution.pairs.len());
    for &(c, s) in &solution.pairs {
        let r = c.hypot(s);
        if (r - 1.0).abs() > PROJECTION_LIMIT {
            return Err(Error::InconsistentTomograms(format!(
                "pairwise estimate ({c:.4}, {s:.4}) is {:.3} away from the unit circle",
                (r - 1.0).abs()
            )));
        }
        projected.push((c / r, s / r));
    }
    finish(&solution, &projected)
}

/// Wavefunction with the position-tomogram magnitudes and the given phases.
pub fn reconstructed_state(position: &TomogramSlice, breakpoints: &[f64], phases: &[f64]) -> Result<WaveFunction> {
    let state = PiecewiseState::from_position(position, breakpoints.to_vec(), phases.to_vec())?;
    assemble_state(&state, position.grid())
}

/// Two segments split at the node of a vacuum envelope tapered to zero at
/// `x = 0`, with phases `(0, delta)`.
pub fn node_benchmark(delta: f64) -> PiecewiseSpec {
    PiecewiseSpec {
        envelope: Box::new(StatePreset::vacuum()),
        breakpoints: vec![0.0],
        phases: vec![0.0, delta],
        taper_width: Some(1.0),
    }
}

/// Four equal-width segments of a flat-top envelope on `[-4, 4]`, tapered at
/// the breakpoints `-2, 0, 2`.
pub fn four_segment_benchmark(phases: [f64; 4]) -> PiecewiseSpec {
    PiecewiseSpec {
        envelope: Box::new(StatePreset::FlatTop {
            half_width: 4.0,
            edge: 0.5,
        }),
        breakpoints: vec![-2.0, 0.0, 2.0],
        phases: phases.to_vec(),
        taper_width: Some(1.0),
    }
}

/// Directions `(cos θ, sin θ)` for the given angles.
pub fn unit_directions(angles: &[f64]) -> Vec<(f64, f64)> {
    angles.iter().map(|t| (t.cos(), t.sin())).collect()
}

/// Deterministic slice angles on `(0, π)`: golden-ratio multiples of `π`,
/// skipping angles within `0.05` of `0`, `π/2` or `π`.
pub fn quasi_uniform_angles(count: usize) -> Vec<f64> {
    const MARGIN: f64 = 0.05;
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let half_pi = std::f64::consts::FRAC_PI_2;
    (1..)
        .map(|i| std::f64::consts::PI * (i as f64 * golden).fract())
        .filter(|&t| {
            [0.0, half_pi, std::f64::consts::PI]
                .iter()
                .all(|m| (t - m).abs() > MARGIN)
        })
        .take(count)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::make_grid;
    use crate::transform::tomogram;

    fn grid() -> SpatialGrid {
        make_grid(-12.0, 12.0, 2048).unwrap()
    }

    #[test]
    fn segment_assignment_is_half_open() {
        let b = [-1.0, 0.0, 2.0];
        assert_eq!(segment_of(-5.0, &b), 0);
        assert_eq!(segment_of(-1.0, &b), 1);
        assert_eq!(segment_of(0.0, &b), 2);
        assert_eq!(segment_of(1.99, &b), 2);
        assert_eq!(segment_of(7.0, &b), 3);
    }

    #[test]
    fn nodes_of_fock_states() {
        let g = grid();
        let f1 = tomogram(&sample_state(&StatePreset::Fock { n: 1 }, &g).unwrap(), 1.0, 0.0).unwrap();
        let nodes = detect_nodes(&f1, 1e-4).unwrap();
        assert_eq!(nodes.len(), 1);
        assert!(nodes[0].abs() <= g.dx());

        let vac = tomogram(&sample_state(&StatePreset::vacuum(), &g).unwrap(), 1.0, 0.0).unwrap();
        assert!(detect_nodes(&vac, 1e-4).unwrap().is_empty());

        let f2 = tomogram(&sample_state(&StatePreset::Fock { n: 2 }, &g).unwrap(), 1.0, 0.0).unwrap();
        let nodes = detect_nodes(&f2, 1e-4).unwrap();
        let root = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(nodes.len(), 2);
        assert!((nodes[0] + root).abs() <= g.dx() && (nodes[1] - root).abs() <= g.dx());
    }

    #[test]
    fn node_detection_needs_position_slice() {
        let g = grid();
        let psi = sample_state(&StatePreset::Fock { n: 1 }, &g).unwrap();
        let s = tomogram(&psi, 0.0, 1.0).unwrap();
        assert_eq!(detect_nodes(&s, 1e-4).unwrap_err().code(), "invalid-argument");
    }

    #[test]
    fn assembly_with_zero_phases_is_identity() {
        let g = grid();
        let psi = sample_state(&StatePreset::vacuum(), &g).unwrap();
        let mag: Vec<f64> = psi.amplitudes().iter().map(|a| a.norm()).collect();
        let state = PiecewiseState::from_magnitude(&mag, vec![-1.0, 0.5], vec![0.0; 3], &g).unwrap();
        let back = assemble_state(&state, &g).unwrap();
        for (a, b) in back.amplitudes().iter().zip(psi.amplitudes()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn negative_magnitude_rejected() {
        let g = make_grid(-1.0, 1.0, 5).unwrap();
        let err = PiecewiseState::new(vec![], vec![vec![0.1, -0.2, 0.3, 0.1, 0.0]], vec![0.0], &g).unwrap_err();
        assert_eq!(err.code(), "invalid-argument");
    }

    #[test]
    fn magnitude_outside_segment_rejected() {
        let g = make_grid(-1.0, 1.0, 5).unwrap();
        let err = PiecewiseState::new(
            vec![0.0],
            vec![vec![1.0, 1.0, 1.0, 0.0, 0.0], vec![0.0; 5]],
            vec![0.0, 0.0],
            &g,
        )
        .unwrap_err();
        assert_eq!(err.code(), "invalid-argument");
    }

    #[test]
    fn quasi_uniform_angles_avoid_axes() {
        let a = quasi_uniform_angles(12);
        assert_eq!(a.len(), 12);
        for t in &a {
            assert!(*t > 0.05 && *t < std::f64::consts::PI - 0.05);
            assert!((t - std::f64::consts::FRAC_PI_2).abs() > 0.05);
        }
        assert_eq!(a, quasi_uniform_angles(12));
    }

    #[test]
    fn wrap_snaps_near_full_turn() {
        assert_eq!(wrap_phase(-1e-14), 0.0);
        assert!((wrap_phase(-0.5) - (TAU - 0.5)).abs() < 1e-15);
        assert!((phase_distance(0.1, TAU - 0.1) - 0.2).abs() < 1e-12);
    }
}
