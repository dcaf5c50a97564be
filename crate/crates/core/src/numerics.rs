//! Low-level numerical kernels shared by the transform, dynamics and
//! reconstruction modules: FFT wrappers, the chirp-z (Bluestein) evaluation of
//! a DFT on an arbitrary frequency lattice, interpolation and 1-D quadrature.

use std::cell::RefCell;

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// In-place forward FFT, unnormalized (`X_k = Σ x_n e^{-2πi kn/N}`).
pub fn fft_forward(data: &mut [C64]) {
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(data.len()));
    fft.process(data);
}

/// In-place inverse FFT including the `1/N` factor.
pub fn fft_inverse(data: &mut [C64]) {
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(data.len()));
    fft.process(data);
    let scale = 1.0 / data.len() as f64;
    data.iter_mut().for_each(|z| *z *= scale);
}

/// Angular wavenumbers matching the bins of an unshifted length-`n` FFT of
/// samples spaced by `dx`.
pub fn fft_wavenumbers(n: usize, dx: f64) -> Vec<f64> {
    let dk = 2.0 * std::f64::consts::PI / (n as f64 * dx);
    (0..n)
        .map(|i| {
            let m = if i <= n / 2 { i as f64 } else { i as f64 - n as f64 };
            m * dk
        })
        .collect()
}

/// Evaluates `X_j = Σ_n a_n exp(-i α j n)` for `j = 0..m` with the Bluestein
/// factorization `jn = (j² + n² - (j - n)²) / 2`, in `O((n + m) log(n + m))`.
pub fn chirp_z(input: &[C64], alpha: f64, m: usize) -> Vec<C64> {
    let n = input.len();
    if n == 0 || m == 0 {
        return vec![C64::new(0.0, 0.0); m];
    }
    let len = (n + m - 1).next_power_of_two();
    let half_chirp = |k: usize| {
        let kk = (k as u64 * k as u64) as f64;
        C64::from_polar(1.0, -0.5 * alpha * kk)
    };

    let mut a = vec![C64::new(0.0, 0.0); len];
    for (k, (slot, x)) in a.iter_mut().zip(input).enumerate() {
        *slot = x * half_chirp(k);
    }
    let mut b = vec![C64::new(0.0, 0.0); len];
    for k in 0..m.max(n) {
        let w = half_chirp(k).conj();
        if k < m {
            b[k] = w;
        }
        if k > 0 && k < n {
            b[len - k] = w;
        }
    }

    fft_forward(&mut a);
    fft_forward(&mut b);
    a.iter_mut().zip(&b).for_each(|(x, y)| *x *= y);
    fft_inverse(&mut a);

    (0..m).map(|j| a[j] * half_chirp(j)).collect()
}

/// Four-point Lagrange weights for nodes at offsets `-1, 0, 1, 2` evaluated at
/// fractional offset `s ∈ [0, 1)`.
fn cubic_weights(s: f64) -> [f64; 4] {
    [
        -s * (s - 1.0) * (s - 2.0) / 6.0,
        (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
        -(s + 1.0) * s * (s - 2.0) / 2.0,
        (s + 1.0) * s * (s - 1.0) / 6.0,
    ]
}

/// Cubic (four-point Lagrange) interpolation of samples `values[k]` located at
/// `x0 + k·dx`. Points outside the sampled range evaluate to `outside`; the
/// stencil is clamped near the edges.
pub fn cubic_interp(values: &[f64], x0: f64, dx: f64, x: f64, outside: f64) -> f64 {
    let n = values.len();
    let u = (x - x0) / dx;
    let last = (n - 1) as f64;
    if !(u >= -1e-9 && u <= last + 1e-9) {
        return outside;
    }
    if n < 4 {
        let i = (u.floor() as usize).min(n.saturating_sub(2));
        let s = u - i as f64;
        return values[i] * (1.0 - s) + values[(i + 1).min(n - 1)] * s;
    }
    let i = (u.floor().max(0.0) as usize).min(n - 2);
    let base = i.clamp(1, n - 3) - 1;
    let s = u - (base + 1) as f64;
    let w = cubic_weights(s);
    (0..4).map(|k| w[k] * values[base + k]).sum()
}

/// Lagrange interpolation through arbitrary (distinct) abscissae.
pub fn lagrange(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for (i, (&xi, &yi)) in xs.iter().zip(ys).enumerate() {
        let mut w = 1.0;
        for (j, &xj) in xs.iter().enumerate() {
            if i != j {
                w *= (x - xj) / (xi - xj);
            }
        }
        acc += w * yi;
    }
    acc
}

/// Indices of the (up to) four samples of a strictly increasing sequence that
/// bracket `t` most symmetrically.
pub fn stencil4(ts: &[f64], t: f64) -> std::ops::Range<usize> {
    let n = ts.len();
    if n <= 4 {
        return 0..n;
    }
    let upper = ts.partition_point(|&v| v <= t).clamp(1, n - 1);
    let start = upper.saturating_sub(2).min(n - 4);
    start..start + 4
}

/// Running trapezoid integral with `out[0] = 0`.
pub fn cumulative_trapezoid(values: &[f64], dx: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in values.windows(2) {
        acc += 0.5 * dx * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

/// Second-order finite-difference derivative: central in the interior,
/// one-sided three-point stencils at the two ends.
pub fn derivative(values: &[f64], dx: f64) -> Vec<f64> {
    let n = values.len();
    if n < 3 {
        return if n == 2 {
            let d = (values[1] - values[0]) / dx;
            vec![d, d]
        } else {
            vec![0.0; n]
        };
    }
    let mut out = vec![0.0; n];
    out[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * dx);
    out[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * dx);
    for i in 1..n - 1 {
        out[i] = (values[i + 1] - values[i - 1]) / (2.0 * dx);
    }
    out
}
