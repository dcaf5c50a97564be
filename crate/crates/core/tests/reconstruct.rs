use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};

use num_complex::Complex64 as C64;
use tomokit::reconstruct::{
    phase_distance, reconstructed_state, segment_transforms_on, unit_directions, RecoveryStatus,
};
use tomokit::transform::native_output_grid;
use tomokit::{
    assemble_state, four_segment_benchmark, fractional_transform, make_grid, node_benchmark, quasi_uniform_angles,
    recover_phases_nodes, recover_phases_piecewise, sample_state, segment_transforms, tomogram, Execution,
    PiecewiseState, SpatialGrid, StatePreset, TomogramSlice, WaveFunction,
};

fn grid() -> SpatialGrid {
    make_grid(-12.0, 12.0, 2048).unwrap()
}

fn slices_of(psi: &WaveFunction, dirs: &[(f64, f64)]) -> (TomogramSlice, Vec<TomogramSlice>) {
    let position = tomogram(psi, 1.0, 0.0).unwrap();
    let extra = tomokit::transform::tomograms(psi, dirs, Execution::default()).unwrap();
    (position, extra)
}

fn relative(phases: &[f64], j: usize, k: usize) -> f64 {
    phases[k] - phases[j]
}

#[test]
fn node_method_recovers_pi_over_three() {
    let psi = sample_state(&StatePreset::Piecewise(node_benchmark(FRAC_PI_3)), &grid()).unwrap();
    let (position, extra) = slices_of(&psi, &[(0.0, 1.0)]);
    let r = recover_phases_nodes(&position, &extra, &[0.0]).unwrap();
    assert_eq!(r.status, RecoveryStatus::Ok);
    assert_eq!(r.phases[0], 0.0);
    assert!(phase_distance(r.phases[1], FRAC_PI_3) < 1e-3, "{:?}", r);
}

#[test]
fn equal_phases_recover_to_gauge() {
    let psi = sample_state(&StatePreset::Piecewise(node_benchmark(0.0)), &grid()).unwrap();
    let (position, extra) = slices_of(&psi, &[(0.0, 1.0)]);
    let r = recover_phases_nodes(&position, &extra, &[0.0]).unwrap();
    assert!(
        r.phases.iter().all(|p| phase_distance(*p, 0.0) < 1e-6),
        "{:?}",
        r.phases
    );
    assert!(r.residual <= 1e-8, "{}", r.residual);
}

#[test]
fn too_few_slices_for_nodes() {
    let psi = sample_state(&StatePreset::Piecewise(node_benchmark(1.0)), &grid()).unwrap();
    let (position, extra) = slices_of(&psi, &[(0.0, 1.0)]);
    let err = recover_phases_nodes(&position, &extra, &[-1.0, 1.0]).unwrap_err();
    assert_eq!(err.code(), "insufficient-data");
}

#[test]
fn piecewise_two_segments_at_diagonal_angles() {
    let psi = sample_state(&StatePreset::Piecewise(node_benchmark(FRAC_PI_2)), &grid()).unwrap();
    let (position, extra) = slices_of(&psi, &unit_directions(&[FRAC_PI_4, 3.0 * FRAC_PI_4]));
    let r = recover_phases_piecewise(&[0.0], &position, &extra).unwrap();
    assert!(phase_distance(r.phases[1], FRAC_PI_2) < 1e-3, "{:?}", r);
}

#[test]
fn four_segment_benchmark_round_trip() {
    let truth = [0.0, 1.1, 4.0, 2.3];
    let spec = four_segment_benchmark(truth);
    let psi = sample_state(&StatePreset::Piecewise(spec.clone()), &grid()).unwrap();
    let (position, extra) = slices_of(&psi, &unit_directions(&quasi_uniform_angles(4)));
    let r = recover_phases_piecewise(&spec.breakpoints, &position, &extra).unwrap();
    for j in 0..4 {
        for k in j + 1..4 {
            let err = phase_distance(relative(&r.phases, j, k), relative(&truth, j, k));
            assert!(err < 5e-3, "pair ({j}, {k}): {err}");
        }
    }
    let rec = reconstructed_state(&position, &spec.breakpoints, &r.phases).unwrap();
    assert!(psi.fidelity(&rec).unwrap() >= 0.999);
}

#[test]
fn single_segment_is_trivial() {
    let psi = sample_state(&StatePreset::vacuum(), &grid()).unwrap();
    let (position, extra) = slices_of(&psi, &[(0.0, 1.0)]);
    let r = recover_phases_piecewise(&[], &position, &extra).unwrap();
    assert_eq!(r.phases, vec![0.0]);
    assert!(r.residual < 1e-8, "{}", r.residual);
}

#[test]
fn gauge_covariance() {
    let base = [0.0, 0.7, 2.9, 5.1];
    let shifted: Vec<f64> = base.iter().map(|p| p + 1.234).collect();
    let dirs = unit_directions(&quasi_uniform_angles(4));
    let recover = |phases: [f64; 4]| {
        let spec = four_segment_benchmark(phases);
        let psi = sample_state(&StatePreset::Piecewise(spec.clone()), &grid()).unwrap();
        let (position, extra) = slices_of(&psi, &dirs);
        recover_phases_piecewise(&spec.breakpoints, &position, &extra)
            .unwrap()
            .phases
    };
    let a = recover(base);
    let b = recover([shifted[0], shifted[1], shifted[2], shifted[3]]);
    for j in 0..4 {
        for k in 0..4 {
            assert!(phase_distance(relative(&a, j, k), relative(&b, j, k)) < 1e-6);
        }
    }
}

#[test]
fn phases_do_not_change_position_tomogram() {
    let a = sample_state(
        &StatePreset::Piecewise(four_segment_benchmark([0.0, 1.0, 2.0, 3.0])),
        &grid(),
    )
    .unwrap();
    let b = sample_state(
        &StatePreset::Piecewise(four_segment_benchmark([0.5, 4.0, 0.1, 6.0])),
        &grid(),
    )
    .unwrap();
    let ta = tomogram(&a, 1.0, 0.0).unwrap();
    let tb = tomogram(&b, 1.0, 0.0).unwrap();
    for (x, y) in ta.density().iter().zip(tb.density()) {
        assert!((x - y).abs() < 1e-10);
    }
}

#[test]
fn recovery_is_bit_identical_across_policies() {
    let spec = four_segment_benchmark([0.0, 2.0, 1.0, 5.0]);
    let psi = sample_state(&StatePreset::Piecewise(spec.clone()), &grid()).unwrap();
    let (position, extra) = slices_of(&psi, &unit_directions(&quasi_uniform_angles(5)));
    let seq = tomokit::reconstruct::recover_phases_piecewise_with(
        &spec.breakpoints,
        &position,
        &extra,
        Execution::Sequential,
    )
    .unwrap();
    let par =
        tomokit::reconstruct::recover_phases_piecewise_with(&spec.breakpoints, &position, &extra, Execution::Parallel)
            .unwrap();
    let again = recover_phases_piecewise(&spec.breakpoints, &position, &extra).unwrap();
    assert_eq!(seq, par);
    assert_eq!(par, again);
}

#[test]
fn inconsistent_slices_are_flagged() {
    let psi = sample_state(&StatePreset::Piecewise(node_benchmark(1.0)), &grid()).unwrap();
    let other = sample_state(
        &StatePreset::Gaussian {
            x0: 2.0,
            p0: 1.0,
            sigma: 0.5,
        },
        &grid(),
    )
    .unwrap();
    let position = tomogram(&psi, 1.0, 0.0).unwrap();
    let extra = vec![tomogram(&other, 0.0, 1.0).unwrap()];
    let err = recover_phases_nodes(&position, &extra, &[0.0]).unwrap_err();
    assert_eq!(err.code(), "inconsistent-tomograms");
}

fn half_line_state(grid: &SpatialGrid) -> PiecewiseState {
    let psi = sample_state(&StatePreset::vacuum(), grid).unwrap();
    let mag: Vec<f64> = psi.amplitudes().iter().map(|a| a.norm()).collect();
    PiecewiseState::from_magnitude(&mag, vec![0.0], vec![0.0, 0.0], grid).unwrap()
}

#[test]
fn half_line_segments_stay_orthogonal() {
    let g = grid();
    let state = half_line_state(&g);
    let out = native_output_grid(&g, 1.0).unwrap();
    let set = segment_transforms_on(&state, &g, 0.0, 1.0, &out).unwrap();
    assert!(set.inner(0, 1).norm() < 1e-6, "{}", set.inner(0, 1));
    assert!((set.inner(0, 0).re - 0.5).abs() < 1e-6);
}

#[test]
fn segments_sum_to_full_transform() {
    let g = grid();
    let state = half_line_state(&g);
    let psi = assemble_state(&state, &g).unwrap();
    let set = segment_transforms(&state, &g, 0.3, 0.9).unwrap();
    let full = tomokit::transform::fractional_transform_on(&psi, 0.3, 0.9, &g).unwrap();
    for (a, b) in set.total().iter().zip(full.amplitudes()) {
        assert!((a - b).norm() < 1e-8);
    }

    let whole = PiecewiseState::from_magnitude(
        &psi.amplitudes().iter().map(|a| a.norm()).collect::<Vec<_>>(),
        vec![],
        vec![0.0],
        &g,
    )
    .unwrap();
    let one = segment_transforms_on(&whole, &g, 0.3, 0.9, &native_output_grid(&g, 0.9).unwrap()).unwrap();
    let direct = fractional_transform(&psi, 0.3, 0.9).unwrap();
    for (a, b) in one.segment_waves()[0].iter().zip(direct.amplitudes()) {
        assert!((a - b).norm() < 1e-12);
    }
}

#[test]
fn phases_rotate_segments() {
    let g = grid();
    let state = half_line_state(&g).with_phases(vec![0.0, PI]).unwrap();
    let psi = assemble_state(&state, &g).unwrap();
    let i = g.len() / 4;
    let left = psi.amplitudes()[i];
    let right = psi.amplitudes()[g.len() - 1 - i];
    assert!(left.re > 0.0 && right.re < 0.0);
    assert!((left + right).norm() < 1e-12);
    assert!(left.im.abs() < 1e-15 && (right / left - C64::new(-1.0, 0.0)).norm() < 1e-12);
}
