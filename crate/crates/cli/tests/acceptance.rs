//! Acceptance criteria 1-8, one line each. Run with
//! `cargo test --release -p tomokit-cli --test acceptance`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6, PI};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tomokit::completeness::CompletenessValue;
use tomokit::dynamics::{free_history, harmonic_history, DEFAULT_DT};
use tomokit::reconstruct::{phase_distance, reconstructed_state, recover_phases_nodes, unit_directions};
use tomokit::transform::tomograms;
use tomokit::{
    density_matrix, four_segment_benchmark, fractional_transform, free_propagate, fresnel_tomogram, g_function,
    gaussian_completeness, gaussian_entropy, holevo_chi, initial_tomogram_from_oscillator,
    initial_tomogram_from_position_history, make_grid, node_benchmark, quasi_uniform_angles, recover_phases_piecewise,
    sample_state, solve_epsilon_delta, tomogram, tomogram_gaussian, von_neumann_entropy, Ensemble, Execution,
    GaussianState, MeasurementSet, OscillatorSpec, SpatialGrid, StatePreset, TimeProfile, WaveFunction,
};
use tomokit_cli::commands::add_noise;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);
type ArgBuilder<'a> = Box<dyn Fn(&str) -> Vec<String> + 'a>;

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn grid() -> SpatialGrid {
    make_grid(-12.0, 12.0, 2048).unwrap()
}

fn random_state(rng: &mut ChaCha8Rng, g: &SpatialGrid) -> WaveFunction {
    let parts: Vec<(C64, WaveFunction)> = (0..rng.random_range(1..4))
        .map(|_| {
            let preset = StatePreset::Gaussian {
                x0: rng.random_range(-2.0..2.0),
                p0: rng.random_range(-2.0..2.0),
                sigma: rng.random_range(0.5..1.2),
            };
            let c = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            (c, sample_state(&preset, g).unwrap())
        })
        .collect();
    let amps = (0..g.len())
        .map(|k| parts.iter().map(|(c, w)| c * w.amplitudes()[k]).sum())
        .collect();
    WaveFunction::new(*g, amps).unwrap().normalized().unwrap()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let g = grid();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let psi = random_state(&mut rng, &g);
        for _ in 0..20 {
            let mu = rng.random_range(-2.0..2.0);
            let nu = rng.random_range(0.1..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let out = fractional_transform(&psi, mu, nu).map_err(|e| format!("({mu}, {nu}): {e}"))?;
            worst = worst.max((out.norm() - 1.0).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst < 1e-8 && secs < 10.0,
        format!("max |norm - 1| = {worst:.2e} over 1000 transforms in {secs:.2} s"),
    )
}

fn criterion_2() -> Outcome {
    let g = grid();
    let triples = [
        (0.5, 0.0),
        (0.7, 0.2),
        (0.9, -0.3),
        (1.0, 0.0),
        (1.2, 0.4),
        (1.5, -0.1),
        (0.6, -0.25),
        (0.8, 0.35),
        (1.1, -0.45),
        (1.3, 0.15),
    ];
    let dirs = [(1.0, 0.0), (0.0, 1.0), (0.6, 0.8), (1.0, 1.0), (-0.5, 1.2)];
    let mut worst: f64 = 0.0;
    for (sxx, sxp) in triples {
        let s = GaussianState::pure(sxx, sxp).unwrap();
        let psi = s.wavefunction(&g).unwrap();
        for (mu, nu) in dirs {
            let numeric = tomogram(&psi, mu, nu).unwrap();
            let exact = tomogram_gaussian(&s, mu, nu, &g).unwrap();
            worst = worst.max(max_diff(numeric.density(), exact.density()));
        }
    }
    check(
        worst < 1e-4,
        format!("max pointwise deviation {worst:.2e} over 10 pure triples x 5 directions"),
    )
}

fn criterion_3() -> Outcome {
    let g = grid();
    let mut worst_exact: f64 = 0.0;
    let mut worst_noisy: f64 = 0.0;
    for (i, delta) in [FRAC_PI_6, FRAC_PI_3, FRAC_PI_2, 2.5].into_iter().enumerate() {
        let psi = sample_state(&StatePreset::Piecewise(node_benchmark(delta)), &g).unwrap();
        let slices = tomograms(&psi, &[(1.0, 0.0), (0.0, 1.0)], Execution::default()).unwrap();
        let r = recover_phases_nodes(&slices[0], &slices[1..], &[0.0]).unwrap();
        worst_exact = worst_exact.max(phase_distance(r.phases[1] - r.phases[0], delta));
        let noisy = add_noise(slices, 1e-4, 100 + i as u64).unwrap();
        let r = recover_phases_nodes(&noisy[0], &noisy[1..], &[0.0]).unwrap();
        worst_noisy = worst_noisy.max(phase_distance(r.phases[1] - r.phases[0], delta));
    }
    check(
        worst_exact <= 1e-3 && worst_noisy <= 1e-2,
        format!("max phase error {worst_exact:.2e} exact, {worst_noisy:.2e} with 1e-4 noise"),
    )
}

fn criterion_4() -> Outcome {
    let g = grid();
    let truth = [0.0, 1.1, 4.0, 2.3];
    let spec = four_segment_benchmark(truth);
    let psi = sample_state(&StatePreset::Piecewise(spec.clone()), &g).unwrap();
    let position = tomogram(&psi, 1.0, 0.0).unwrap();
    let extra = tomograms(&psi, &unit_directions(&quasi_uniform_angles(4)), Execution::default()).unwrap();
    let r = recover_phases_piecewise(&spec.breakpoints, &position, &extra).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for j in 0..4 {
        for k in j + 1..4 {
            worst = worst.max(phase_distance(r.phases[k] - r.phases[j], truth[k] - truth[j]));
        }
    }
    let fidelity = psi
        .fidelity(&reconstructed_state(&position, &spec.breakpoints, &r.phases).unwrap())
        .unwrap();
    check(
        worst <= 5e-3 && fidelity >= 0.999,
        format!("max pairwise error {worst:.2e}, fidelity {fidelity:.6}"),
    )
}

fn criterion_5() -> Outcome {
    let g = make_grid(-30.0, 30.0, 4096).unwrap();
    let psi = sample_state(
        &StatePreset::Gaussian {
            x0: 0.3,
            p0: -0.4,
            sigma: 0.8,
        },
        &g,
    )
    .unwrap();
    let mut fresnel: f64 = 0.0;
    for nu in [0.25, 1.0, 2.0] {
        let a = fresnel_tomogram(&psi, nu).unwrap();
        let b = tomogram(&free_propagate(&psi, nu).unwrap(), 1.0, 0.0).unwrap();
        fresnel = fresnel.max(max_diff(a.density(), b.density()));
    }
    let times: Vec<f64> = (0..=90).map(|i| i as f64 * 0.05).collect();
    let history = free_history(&psi, &times, Execution::default()).unwrap();
    let mut recovered: f64 = 0.0;
    for nu in [0.25, 1.0, 2.0] {
        for mu in [0.5, 1.0, 2.0] {
            let r = initial_tomogram_from_position_history(&history, mu, nu).unwrap();
            recovered = recovered.max(max_diff(r.density(), tomogram(&psi, mu, nu).unwrap().density()));
        }
    }
    check(
        fresnel <= 1e-6 && recovered <= 1e-4,
        format!("Fresnel identity {fresnel:.2e}, history recovery {recovered:.2e}"),
    )
}

fn criterion_6() -> Outcome {
    let mut drift: f64 = 0.0;
    for omega in [
        TimeProfile::Constant { value: 1.0 },
        TimeProfile::Constant { value: 2.0 },
        TimeProfile::CosineModulated {
            w0: 1.0,
            amp: 0.3,
            freq: 2.0,
        },
    ] {
        let spec = OscillatorSpec {
            omega,
            force: TimeProfile::Constant { value: 0.0 },
            t_max: 2.0 * PI,
            dt: DEFAULT_DT,
        };
        drift = drift.max(solve_epsilon_delta(&spec).unwrap().max_wronskian_drift());
    }
    let g = grid();
    let psi = sample_state(
        &StatePreset::Gaussian {
            x0: 1.0,
            p0: 0.5,
            sigma: 0.8,
        },
        &g,
    )
    .unwrap();
    let spec = OscillatorSpec {
        omega: TimeProfile::Constant { value: 1.0 },
        force: TimeProfile::Constant { value: 0.0 },
        t_max: PI,
        dt: DEFAULT_DT,
    };
    let traj = solve_epsilon_delta(&spec).unwrap();
    let times: Vec<f64> = (0..24).map(|i| i as f64 * PI / 24.0).collect();
    let history = harmonic_history(&psi, 1.0, 0.0, &times, Execution::default()).unwrap();
    let mut family: f64 = 0.0;
    for &t in &times {
        let r = initial_tomogram_from_oscillator(&history, &traj, t).unwrap();
        family = family.max(max_diff(
            r.density(),
            tomogram(&psi, t.cos(), t.sin()).unwrap().density(),
        ));
    }
    check(
        drift <= 1e-8 && family <= 1e-3,
        format!("Wronskian drift {drift:.2e}, recovered family {family:.2e}"),
    )
}

fn criterion_7() -> Outcome {
    let g_half = g_function(0.5).unwrap();
    let vacuum_s = gaussian_entropy(&GaussianState::vacuum()).unwrap();
    let grid = grid();
    let set = |s: &GaussianState, dirs: &[(f64, f64)]| {
        MeasurementSet::new(
            dirs.iter()
                .map(|&(m, n)| tomogram_gaussian(s, m, n, &grid).unwrap())
                .collect(),
        )
        .unwrap()
    };
    let vac = GaussianState::vacuum();
    let one = gaussian_completeness(&set(&vac, &[(1.0, 0.0)]), false).unwrap().value;
    let mixed = GaussianState::new(1.3, 0.9, 0.0).unwrap();
    let two = gaussian_completeness(&set(&mixed, &[(1.0, 0.0), (0.0, 1.0)]), false)
        .unwrap()
        .value;
    let two_expect = g_function((1.3f64 * 0.9).sqrt() - 0.5).unwrap();
    let pure = GaussianState::pure(0.8, 0.3).unwrap();
    let three = gaussian_completeness(&set(&pure, &[(1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]), true)
        .unwrap()
        .value;
    let a = sample_state(&StatePreset::Fock { n: 0 }, &grid).unwrap();
    let b = sample_state(&StatePreset::Fock { n: 1 }, &grid).unwrap();
    let chi = holevo_chi(&Ensemble::new(vec![0.5, 0.5], vec![a.clone(), b]).unwrap()).unwrap();
    let projector = von_neumann_entropy(&density_matrix(&[a], &[1.0]).unwrap()).unwrap();
    let regimes = one == CompletenessValue::Unbounded
        && matches!(two, CompletenessValue::Finite(v) if (v - two_expect).abs() < 1e-9)
        && three == CompletenessValue::Finite(0.0);
    check(
        (g_half - 0.954771).abs() <= 1e-6
            && vacuum_s.abs() <= 1e-8
            && projector.abs() <= 1e-8
            && regimes
            && (chi - 2f64.ln()).abs() <= 1e-6,
        format!(
            "g(1/2) = {g_half:.7}, S(vacuum) = {vacuum_s:.1e}, regimes {one:?} / {two:?} / {three:?}, chi = {chi:.7}"
        ),
    )
}

fn tomokit(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_tomokit"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr).trim()))
    }
}

/// File name to contents, with the manifest timestamp blanked.
fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let path = e.unwrap().path();
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            let mut bytes = std::fs::read(&path).unwrap();
            if name == "manifest.json" {
                let mut v: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
                v["timestamp"] = serde_json::Value::Null;
                bytes = serde_json::to_vec(&v).unwrap();
            }
            (name, bytes)
        })
        .collect();
    files.sort();
    files
}

fn criterion_8() -> Outcome {
    let root = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = |name: &str| root.path().join(name).to_string_lossy().into_owned();
    let runs: Vec<(&str, ArgBuilder<'_>)> = vec![
        (
            "simulate",
            Box::new(|out: &str| {
                [
                    "simulate",
                    "--state",
                    "four-segment:0,1.1,4,2.3",
                    "--direction",
                    "1,0",
                    "--quasi-uniform",
                    "4",
                    "--noise",
                    "1e-4",
                    "--seed",
                    "42",
                    "--out",
                    out,
                ]
                .map(String::from)
                .to_vec()
            }),
        ),
        (
            "reconstruct",
            Box::new(move |out: &str| {
                [
                    "reconstruct",
                    "--in",
                    &d("sim_a"),
                    "--method",
                    "piecewise",
                    "--breakpoints",
                    "-2,0,2",
                    "--out",
                    out,
                ]
                .map(String::from)
                .to_vec()
            }),
        ),
        (
            "evolve",
            Box::new(|out: &str| {
                [
                    "evolve",
                    "--omega",
                    "constant:1.3",
                    "--force",
                    "constant:0.7",
                    "--t-max",
                    "2",
                    "--recover-at",
                    "0,0.4,0.9",
                    "--state",
                    "gaussian:1,0.5,0.7",
                    "--out",
                    out,
                ]
                .map(String::from)
                .to_vec()
            }),
        ),
    ];
    let mut checked = 0;
    for (name, args) in &runs {
        let (a, b) = (d(&format!("{}_a", &name[..3])), d(&format!("{}_b", &name[..3])));
        for out in [&a, &b] {
            let argv = args(out);
            tomokit(&argv.iter().map(String::as_str).collect::<Vec<_>>())?;
        }
        let (sa, sb) = (snapshot(Path::new(&a)), snapshot(Path::new(&b)));
        if sa != sb {
            return Err(format!("{name}: artifacts differ between runs"));
        }
        checked += sa.len();
    }
    let gsim = d("gau_a");
    tomokit(&[
        "simulate",
        "--state",
        "gaussian-cov:1,1,0",
        "--direction",
        "1,0",
        "--direction",
        "0,1",
        "--out",
        &gsim,
    ])?;
    let (ma, mb) = (d("mea_a"), d("mea_b"));
    tomokit(&["measure", "--in", &gsim, "--out", &ma])?;
    tomokit(&["measure", "--in", &gsim, "--out", &mb])?;
    if snapshot(Path::new(&ma)) != snapshot(Path::new(&mb)) {
        return Err("measure: artifacts differ between runs".into());
    }
    checked += snapshot(Path::new(&ma)).len();
    Ok(format!(
        "simulate, reconstruct, evolve, measure: {checked} artifacts byte-identical across repeated runs"
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("transform unitarity", criterion_1),
        ("Gaussian closed form", criterion_2),
        ("node method", criterion_3),
        ("piecewise method", criterion_4),
        ("free-particle identities", criterion_5),
        ("oscillator dynamics", criterion_6),
        ("closed forms and regimes", criterion_7),
        ("determinism", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or(e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        match outcome {
            Ok(detail) => println!("criterion {} ({name}): PASS - {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL - {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
