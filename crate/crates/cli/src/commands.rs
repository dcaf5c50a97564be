//! The four subcommands. Each writes its artifacts through [`OutputDir`] and
//! finishes with a manifest.

use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use serde_json::json;
use tomokit::dynamics::{harmonic_history, initial_tomograms_from_oscillator};
use tomokit::reconstruct::{reconstructed_state, recover_phases_nodes, recover_phases_piecewise, unit_directions};
use tomokit::transform::tomograms;
use tomokit::{
    detect_nodes, four_segment_benchmark, gaussian_completeness, node_benchmark, quasi_uniform_angles, sample_state,
    solve_epsilon_delta, tomogram_gaussian, Error, Execution, GaussianState, MeasurementSet, OscillatorSpec,
    PositionHistory, RecoveryStatus, Result, SpatialGrid, StatePreset, TomogramSlice, WaveFunction,
};

use crate::args::{EvolveArgs, MeasureArgs, Method, ReconstructArgs, SimulateArgs};
use crate::io::{self, OutputDir};

/// Relative edge amplitude above which `simulate` refuses the grid.
pub const EDGE_LIMIT: f64 = 1e-6;

/// Relative threshold for node detection on the position slice.
pub const NODE_THRESHOLD: f64 = 1e-6;

/// What a `--state` argument resolves to.
#[derive(Debug, Clone)]
pub enum Source {
    Wave(WaveFunction),
    /// Closed-form mixed or pure Gaussian given by its covariances.
    Gaussian(GaussianState),
}

fn preset_from_str(name: &str, values: &[f64]) -> Result<Option<StatePreset>> {
    let bad = || Error::InvalidArgument(format!("wrong number of parameters for state {name:?}"));
    let preset = match name {
        "vacuum" if values.is_empty() => StatePreset::vacuum(),
        "gaussian" => match *values {
            [x0, p0, sigma] => StatePreset::Gaussian { x0, p0, sigma },
            _ => return Err(bad()),
        },
        "fock" => match *values {
            [n] if n >= 0.0 && n.fract() == 0.0 => StatePreset::Fock { n: n as u32 },
            _ => return Err(bad()),
        },
        "flat-top" => match *values {
            [half_width, edge] => StatePreset::FlatTop { half_width, edge },
            _ => return Err(bad()),
        },
        "node-benchmark" => match *values {
            [delta] => StatePreset::Piecewise(node_benchmark(delta)),
            _ => return Err(bad()),
        },
        "four-segment" => match *values {
            [a, b, c, d] => StatePreset::Piecewise(four_segment_benchmark([a, b, c, d])),
            _ => return Err(bad()),
        },
        _ => return Ok(None),
    };
    Ok(Some(preset))
}

/// Resolves a preset string or a `.json` preset / `.csv` wavefunction file.
pub fn parse_state(spec: &str, grid: &SpatialGrid) -> Result<Source> {
    let (name, args) = spec.split_once(':').unwrap_or((spec, ""));
    let values = crate::args::parse_list(args)?.0;
    if name == "gaussian-cov" {
        return match *values {
            [sxx, spp, sxp] => Ok(Source::Gaussian(GaussianState::new(sxx, spp, sxp)?)),
            _ => Err(Error::InvalidArgument("gaussian-cov needs sxx,spp,sxp".into())),
        };
    }
    if let Some(preset) = preset_from_str(name, &values)? {
        return Ok(Source::Wave(sample_state(&preset, grid)?));
    }
    let path = PathBuf::from(spec);
    if !path.is_file() {
        return Err(Error::InvalidArgument(format!(
            "{spec:?} is neither a known preset nor a readable file"
        )));
    }
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => Ok(Source::Wave(io::read_wavefunction(&path)?)),
        Some("json") => {
            let text = std::fs::read_to_string(&path).map_err(|e| Error::Io(format!("{spec}: {e}")))?;
            let preset: StatePreset = serde_json::from_str(&text).map_err(|e| Error::Parse {
                file: spec.to_string(),
                line: e.line(),
                message: e.to_string(),
            })?;
            Ok(Source::Wave(sample_state(&preset, grid)?))
        }
        _ => Err(Error::InvalidArgument(format!(
            "state file {spec:?} must end in .csv or .json"
        ))),
    }
}

fn wave_only(source: Source, what: &str) -> Result<WaveFunction> {
    match source {
        Source::Wave(psi) => Ok(psi),
        Source::Gaussian(_) => Err(Error::Unsupported(format!(
            "{what} needs a wavefunction, not gaussian-cov"
        ))),
    }
}

/// Multiplies every sample by `1 + level·z` with standard normal `z`, clips
/// at zero and renormalizes. One ChaCha stream seeded by `seed` is consumed
/// slice by slice in order.
pub fn add_noise(slices: Vec<TomogramSlice>, level: f64, seed: u64) -> Result<Vec<TomogramSlice>> {
    if !(level >= 0.0 && level.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "noise level {level} must be nonnegative"
        )));
    }
    if level == 0.0 {
        return Ok(slices);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    slices
        .into_iter()
        .map(|s| {
            let noisy = s
                .density()
                .iter()
                .map(|d| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    (d * (1.0 + level * z)).max(0.0)
                })
                .collect();
            TomogramSlice::renormalized(s.mu(), s.nu(), *s.grid(), noisy)
        })
        .collect()
}

fn check_edges(psi: &WaveFunction) -> Result<()> {
    let leak = psi.boundary_leak();
    if leak > EDGE_LIMIT {
        let g = psi.grid();
        return Err(Error::Resolution {
            message: format!(
                "state amplitude at the grid edge is {leak:.2e} of its peak; widen the grid beyond [{}, {}]",
                g.x_min(),
                g.x_max()
            ),
            suggested_points: 2 * g.len(),
        });
    }
    Ok(())
}

fn grid_json(g: &SpatialGrid) -> serde_json::Value {
    json!([g.x_min(), g.x_max(), g.len()])
}

pub fn simulate(args: &SimulateArgs) -> Result<PathBuf> {
    let mut directions = args.directions.clone();
    directions.extend(unit_directions(&quasi_uniform_angles(args.quasi_uniform)));
    if directions.is_empty() {
        return Err(Error::InvalidArgument(
            "no directions; pass --direction mu,nu or --quasi-uniform".into(),
        ));
    }
    let source = parse_state(&args.state, &args.grid)?;
    let (slices, psi) = match source {
        Source::Wave(psi) => {
            check_edges(&psi)?;
            (tomograms(&psi, &directions, Execution::default())?, Some(psi))
        }
        Source::Gaussian(g) => (
            directions
                .iter()
                .map(|&(mu, nu)| tomogram_gaussian(&g, mu, nu, &args.grid))
                .collect::<Result<Vec<_>>>()?,
            None,
        ),
    };
    let slices = add_noise(slices, args.noise, args.seed)?;

    let mut out = OutputDir::create(&args.out)?;
    if let Some(psi) = &psi {
        out.write("state.csv", &io::format_wavefunction(psi))?;
    }
    for (i, s) in slices.iter().enumerate() {
        out.write_slice(&format!("slice_{i:03}.csv"), s, None)?;
    }
    out.finish(
        "simulate",
        json!({
            "state": args.state,
            "grid": grid_json(psi.as_ref().map_or(&args.grid, |p| p.grid())),
            "directions": directions,
            "noise": args.noise,
            "seed": args.seed,
        }),
    )
}

#[derive(Debug, Serialize)]
pub struct ReconstructReport {
    pub method: &'static str,
    pub breakpoints: Vec<f64>,
    pub phases: Vec<f64>,
    pub residual: f64,
    pub condition_estimate: f64,
    pub status: RecoveryStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fidelity: Option<f64>,
}

pub fn reconstruct(args: &ReconstructArgs) -> Result<PathBuf> {
    let files = io::read_slice_dir(&args.input)?;
    let position = files
        .iter()
        .find(|f| f.slice.is_position())
        .map(|f| f.slice.clone())
        .ok_or_else(|| Error::InvalidArgument(format!("no position slice (mu=1, nu=0) in {}", args.input.display())))?;
    let extras: Vec<TomogramSlice> = files
        .iter()
        .filter(|f| !f.slice.is_position())
        .map(|f| f.slice.clone())
        .collect();
    let breakpoints = match (&args.breakpoints, args.method) {
        (Some(b), _) => b.0.clone(),
        (None, Method::Nodes) => detect_nodes(&position, NODE_THRESHOLD)?,
        (None, Method::Piecewise) => {
            return Err(Error::InvalidArgument(
                "the piecewise method needs --breakpoints".into(),
            ))
        }
    };
    let result = match args.method {
        Method::Nodes => recover_phases_nodes(&position, &extras, &breakpoints)?,
        Method::Piecewise => recover_phases_piecewise(&breakpoints, &position, &extras)?,
    };
    if result.status != RecoveryStatus::Ok {
        log::warn!("phase recovery finished with status {}", result.status.as_str());
    }
    let fidelity = match &args.truth {
        Some(spec) => {
            let truth = wave_only(parse_state(spec, position.grid())?, "--truth")?;
            let rec = reconstructed_state(&position, &breakpoints, &result.phases)?;
            Some(truth.fidelity(&rec)?)
        }
        None => None,
    };
    let report = ReconstructReport {
        method: args.method.as_str(),
        breakpoints: breakpoints.clone(),
        phases: result.phases,
        residual: result.residual,
        condition_estimate: result.condition_estimate,
        status: result.status,
        fidelity,
    };
    let mut out = OutputDir::create(&args.out)?;
    out.write("report.json", &io::to_json_line(&report)?)?;
    out.finish(
        "reconstruct",
        json!({
            "input": args.input.display().to_string(),
            "inputs": files.iter().map(|f| f.path.file_name().map(|n| n.to_string_lossy().into_owned())).collect::<Vec<_>>(),
            "method": args.method.as_str(),
            "breakpoints": breakpoints,
            "truth": args.truth,
        }),
    )
}

/// Reads the `history_*.csv` position slices of `dir`, ordered by `t`.
fn history_from_dir(dir: &std::path::Path) -> Result<PositionHistory> {
    let mut files: Vec<_> = io::read_slice_dir(dir)?
        .into_iter()
        .filter(|f| {
            f.path
                .file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("history_"))
        })
        .collect();
    if files.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "no history_*.csv slices in {}",
            dir.display()
        )));
    }
    if let Some(f) = files.iter().find(|f| f.time.is_none()) {
        return Err(Error::InvalidArgument(format!("{} has no t= entry", f.path.display())));
    }
    files.sort_by(|a, b| a.time.unwrap().total_cmp(&b.time.unwrap()));
    let times = files.iter().map(|f| f.time.unwrap()).collect();
    PositionHistory::new(times, files.into_iter().map(|f| f.slice).collect())
}

pub fn evolve(args: &EvolveArgs) -> Result<PathBuf> {
    let spec = OscillatorSpec {
        omega: args.omega,
        force: args.force,
        t_max: args.t_max,
        dt: args.dt,
    };
    let traj = solve_epsilon_delta(&spec)?;
    let mut out = OutputDir::create(&args.out)?;
    out.write("trajectory.csv", &io::format_trajectory(&traj))?;

    let recover_at = args.recover_at.as_ref().map(|l| l.0.clone()).unwrap_or_default();
    if !recover_at.is_empty() {
        let history = match (&args.state, &args.history) {
            (_, Some(dir)) => history_from_dir(dir)?,
            (Some(state), None) => {
                let (Some(omega), Some(force)) = (args.omega.constant_value(), args.force.constant_value()) else {
                    return Err(Error::Unsupported(
                        "--state needs constant omega and force; supply --history for time-dependent profiles".into(),
                    ));
                };
                let psi = wave_only(parse_state(state, &args.grid)?, "evolve --state")?;
                let mut times = recover_at.clone();
                times.sort_by(f64::total_cmp);
                times.dedup();
                let history = harmonic_history(&psi, omega, force, &times, Execution::default())?;
                for (i, (t, s)) in history.times().iter().zip(history.slices()).enumerate() {
                    out.write_slice(&format!("history_{i:03}.csv"), s, Some(*t))?;
                }
                history
            }
            (None, None) => {
                return Err(Error::InvalidArgument("--recover-at needs --state or --history".into()));
            }
        };
        let recovered = initial_tomograms_from_oscillator(&history, &traj, &recover_at, Execution::default())?;
        for (i, (t, s)) in recover_at.iter().zip(&recovered).enumerate() {
            out.write_slice(&format!("recovered_{i:03}.csv"), s, Some(*t))?;
        }
    }
    out.finish(
        "evolve",
        json!({
            "omega": args.omega.to_string(),
            "force": args.force.to_string(),
            "t_max": args.t_max,
            "dt": args.dt,
            "recover_at": recover_at,
            "state": args.state,
            "grid": grid_json(&args.grid),
            "history": args.history.as_ref().map(|p| p.display().to_string()),
            "max_wronskian_drift": traj.max_wronskian_drift(),
        }),
    )
}

pub fn measure(args: &MeasureArgs) -> Result<PathBuf> {
    let files = io::read_slice_dir(&args.input)?;
    if files.is_empty() {
        return Err(Error::InvalidArgument(format!("no slices in {}", args.input.display())));
    }
    let names: Vec<String> = files
        .iter()
        .filter_map(|f| f.path.file_name().map(|n| n.to_string_lossy().into_owned()))
        .collect();
    let set = MeasurementSet::new(files.into_iter().map(|f| f.slice).collect())?;
    let report = gaussian_completeness(&set, args.assume_pure)?;
    let mut out = OutputDir::create(&args.out)?;
    out.write("report.json", &io::to_json_line(&report)?)?;
    out.finish(
        "measure",
        json!({
            "input": args.input.display().to_string(),
            "inputs": names,
            "assume_pure": args.assume_pure,
        }),
    )
}
