//! Information completeness of tomogram sets: Holevo χ of finite ensembles
//! and the closed-form Gaussian regimes.
//!
//! For a Gaussian class the residual ignorance after measuring a set of
//! quadratures is the largest entropy compatible with the data:
//! unbounded for a single direction, `g(√(v₁v₂)/|D| − 1/2)` for two directions
//! with `D = μ₁ν₂ − ν₁μ₂` (which is `g(√(σ_xx σ_pp) − 1/2)` for position and
//! momentum), and zero for three or more directions when the class is known to
//! be pure.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

use nalgebra::{DMatrix, DVector};

use crate::density::{density_matrix, von_neumann_entropy};
use crate::error::{Error, Result};
use crate::state::WaveFunction;
use crate::transform::{GaussianState, TomogramSlice};

/// Largest Kolmogorov–Smirnov distance accepted by the Gaussianity test.
pub const KS_LIMIT: f64 = 1e-2;

/// Largest RMS relative residual of an overdetermined variance fit.
pub const FIT_RESIDUAL_LIMIT: f64 = 1e-3;

/// Slack below zero tolerated in χ before it is reported as a failure.
const CHI_SLACK: f64 = 1e-6;

/// Directions closer than this after normalization are the same measurement.
const DIRECTION_TOL: f64 = 1e-9;

/// Slack on `v₁v₂/D² ≥ 1/4` and `σ_xx σ_pp ≥ 1/4`.
const UNCERTAINTY_SLACK: f64 = 1e-6;

/// `g(x) = (x+1) ln(x+1) − x ln x`, with `g(0) = 0`.
pub fn g_function(x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::invalid(format!("g(x) needs finite x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok((x + 1.0) * (x + 1.0).ln() - x * x.ln())
}

/// `S = g(√(σ_xx σ_pp − σ_xp²) − 1/2)`.
pub fn gaussian_entropy(state: &GaussianState) -> Result<f64> {
    let det = state.determinant();
    if det < 0.25 - crate::transform::UNCERTAINTY_TOL {
        return Err(Error::InvalidCovariance(format!("determinant {det} is below 1/4")));
    }
    g_function((det.max(0.25).sqrt() - 0.5).max(0.0))
}

/// Finite ensemble `{π_j, |ψ_j⟩}` on a shared grid.
#[derive(Debug, Clone)]
pub struct Ensemble {
    weights: Vec<f64>,
    members: Vec<WaveFunction>,
}

impl Ensemble {
    pub fn new(weights: Vec<f64>, members: Vec<WaveFunction>) -> Result<Self> {
        if members.is_empty() || weights.len() != members.len() {
            return Err(Error::invalid(format!(
                "ensemble needs matching nonempty weights and members, got {} and {}",
                weights.len(),
                members.len()
            )));
        }
        crate::density::check_weights(&weights)?;
        let grid = *members[0].grid();
        if members.iter().any(|m| !m.grid().approx_eq(&grid)) {
            return Err(Error::invalid("ensemble members live on different grids"));
        }
        Ok(Ensemble { weights, members })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn members(&self) -> &[WaveFunction] {
        &self.members
    }
}

/// `χ = S(Σ π_j ρ_j) − Σ π_j S(ρ_j)`, clamped at zero within `1e-6`.
pub fn holevo_chi(ensemble: &Ensemble) -> Result<f64> {
    let members: Vec<WaveFunction> = ensemble.members.iter().map(|m| m.normalized()).collect::<Result<_>>()?;
    let mixture = von_neumann_entropy(&density_matrix(&members, &ensemble.weights)?)?;
    let mut average = 0.0;
    for (m, &w) in members.iter().zip(&ensemble.weights) {
        if w > 0.0 {
            average += w * von_neumann_entropy(&density_matrix(std::slice::from_ref(m), &[1.0])?)?;
        }
    }
    let chi = mixture - average;
    if chi < -CHI_SLACK {
        return Err(Error::NumericalFailure(format!(
            "Holevo chi came out negative: {chi:e}"
        )));
    }
    Ok(chi.max(0.0))
}

/// Tomogram slices in pairwise distinct directions (up to positive scaling).
#[derive(Debug, Clone)]
pub struct MeasurementSet {
    slices: Vec<TomogramSlice>,
}

fn unit_direction(mu: f64, nu: f64) -> (f64, f64) {
    let r = mu.hypot(nu);
    (mu / r, nu / r)
}

impl MeasurementSet {
    pub fn new(slices: Vec<TomogramSlice>) -> Result<Self> {
        for (i, a) in slices.iter().enumerate() {
            let (ua, va) = unit_direction(a.mu(), a.nu());
            for b in &slices[..i] {
                let (ub, vb) = unit_direction(b.mu(), b.nu());
                if (ua - ub).abs() < DIRECTION_TOL && (va - vb).abs() < DIRECTION_TOL {
                    return Err(Error::invalid(format!(
                        "directions ({}, {}) and ({}, {}) are the same measurement",
                        b.mu(),
                        b.nu(),
                        a.mu(),
                        a.nu()
                    )));
                }
            }
        }
        Ok(MeasurementSet { slices })
    }

    pub fn slices(&self) -> &[TomogramSlice] {
        &self.slices
    }

    pub fn directions(&self) -> Vec<(f64, f64)> {
        self.slices.iter().map(|s| (s.mu(), s.nu())).collect()
    }

    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }
}

/// Kolmogorov–Smirnov distance between a slice and the normal law with the
/// slice's own mean and variance.
pub fn gaussian_ks_distance(slice: &TomogramSlice) -> f64 {
    let mean = slice.mean();
    let sd = slice.variance().sqrt();
    let cdf = slice.cumulative();
    let total = cdf[cdf.len() - 1];
    slice
        .grid()
        .points()
        .zip(&cdf)
        .map(|(x, c)| {
            let model = 0.5 * (1.0 + erf((x - mean) / (sd * std::f64::consts::SQRT_2)));
            (c / total - model).abs()
        })
        .fold(0.0, f64::max)
}

/// Second-moment variance of a slice after the Gaussianity test.
pub fn fitted_variance(slice: &TomogramSlice) -> Result<f64> {
    let distance = gaussian_ks_distance(slice);
    if !(distance <= KS_LIMIT) {
        return Err(Error::ModelMismatch {
            mu: slice.mu(),
            nu: slice.nu(),
            distance,
        });
    }
    Ok(slice.variance())
}

/// Covariance components determined by a set of directions.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RecoveredCovariances {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_xx: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_pp: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_xp: Option<f64>,
}

impl RecoveredCovariances {
    pub fn to_state(&self) -> Option<Result<GaussianState>> {
        match (self.sigma_xx, self.sigma_pp, self.sigma_xp) {
            (Some(xx), Some(pp), Some(xp)) => Some(GaussianState::new(xx, pp, xp)),
            _ => None,
        }
    }
}

struct VarianceFit {
    rows: DMatrix<f64>,
    variances: DVector<f64>,
    recovered: RecoveredCovariances,
}

/// Solves `v_i = σ_xx μ_i² + 2σ_xp μ_i ν_i + σ_pp ν_i²` by minimum-norm least
/// squares; a component is reported only when it lies in the row space.
fn fit_variances(set: &MeasurementSet) -> Result<VarianceFit> {
    if set.is_empty() {
        return Err(Error::invalid("measurement set is empty"));
    }
    let n = set.len();
    let variances = DVector::from_iterator(n, set.slices.iter().map(fitted_variance).collect::<Result<Vec<_>>>()?);
    let rows = DMatrix::from_fn(n, 3, |i, c| {
        let (mu, nu) = (set.slices[i].mu(), set.slices[i].nu());
        match c {
            0 => mu * mu,
            1 => 2.0 * mu * nu,
            _ => nu * nu,
        }
    });
    let svd = rows.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let tol = smax * 1e-10;
    let solution = svd
        .solve(&variances, tol)
        .map_err(|e| Error::NumericalFailure(format!("variance fit failed: {e}")))?;
    let v_t = svd.v_t.as_ref().expect("requested right singular vectors");
    let identifiable = |c: usize| -> bool {
        let weight: f64 = (0..svd.singular_values.len())
            .filter(|&k| svd.singular_values[k] > tol)
            .map(|k| v_t[(k, c)].powi(2))
            .sum();
        weight > 1.0 - 1e-8
    };
    let rank = svd.singular_values.iter().filter(|&&s| s > tol).count();
    if n > rank {
        let resid = &rows * &solution - &variances;
        let rel = (resid
            .iter()
            .zip(variances.iter())
            .map(|(r, v)| (r / v).powi(2))
            .sum::<f64>()
            / n as f64)
            .sqrt();
        if rel > FIT_RESIDUAL_LIMIT {
            return Err(Error::InconsistentTomograms(format!(
                "slice variances disagree with any covariance: relative residual {rel:.3e}"
            )));
        }
    }
    let recovered = RecoveredCovariances {
        sigma_xx: identifiable(0).then_some(solution[0]),
        sigma_xp: identifiable(1).then_some(solution[1]),
        sigma_pp: identifiable(2).then_some(solution[2]),
    };
    Ok(VarianceFit {
        rows,
        variances,
        recovered,
    })
}

/// Covariances recoverable from the slice variances.
pub fn covariance_from_tomograms(set: &MeasurementSet) -> Result<RecoveredCovariances> {
    Ok(fit_variances(set)?.recovered)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CompletenessValue {
    Finite(f64),
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    PositionOnly,
    PositionAndMomentum,
    ThreeOrMore,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletenessReport {
    pub value: CompletenessValue,
    pub regime: Regime,
    #[serde(rename = "covariances")]
    pub recovered_covariances: RecoveredCovariances,
    pub purity_assumed: bool,
}

/// Residual ignorance for the class of Gaussian states compatible with the
/// measured slices.
pub fn gaussian_completeness(set: &MeasurementSet, purity_assumed: bool) -> Result<CompletenessReport> {
    if set.is_empty() {
        return Err(Error::invalid("measurement set is empty"));
    }
    match set.len() {
        1 => {
            let fit = fit_variances(set)?;
            Ok(CompletenessReport {
                value: CompletenessValue::Unbounded,
                regime: Regime::PositionOnly,
                recovered_covariances: fit.recovered,
                purity_assumed,
            })
        }
        2 => {
            let fit = fit_variances(set)?;
            let (a, b) = (&set.slices[0], &set.slices[1]);
            let d = a.mu() * b.nu() - a.nu() * b.mu();
            let product = fit.variances[0] * fit.variances[1] / (d * d);
            if product < 0.25 - UNCERTAINTY_SLACK {
                return Err(Error::InvalidCovariance(format!(
                    "conjugate variances multiply to {product}, below 1/4"
                )));
            }
            let value = g_function((product.max(0.25).sqrt() - 0.5).max(0.0))?;
            Ok(CompletenessReport {
                value: CompletenessValue::Finite(value),
                regime: Regime::PositionAndMomentum,
                recovered_covariances: fit.recovered,
                purity_assumed,
            })
        }
        _ => {
            if !purity_assumed {
                return Err(Error::Unsupported(
                    "three or more directions without the purity assumption; pass --assume-pure".into(),
                ));
            }
            let fit = fit_variances(set)?;
            let (xx, pp) = match (fit.recovered.sigma_xx, fit.recovered.sigma_pp) {
                (Some(xx), Some(pp)) => (xx, pp),
                _ => {
                    return Err(Error::NumericalFailure(
                        "variance fit did not determine sigma_xx and sigma_pp".into(),
                    ))
                }
            };
            let excess = xx * pp - 0.25;
            if excess < -UNCERTAINTY_SLACK {
                return Err(Error::InvalidCovariance(format!(
                    "sigma_xx sigma_pp = {} is below 1/4",
                    xx * pp
                )));
            }
            let magnitude = excess.max(0.0).sqrt();
            let misfit = |xp: f64| {
                let model = DVector::from_vec(vec![xx, xp, pp]);
                (&fit.rows * model - &fit.variances).norm_squared()
            };
            let xp = if magnitude == 0.0 {
                0.0
            } else if misfit(-magnitude) < misfit(magnitude) {
                -magnitude
            } else {
                magnitude
            };
            Ok(CompletenessReport {
                value: CompletenessValue::Finite(0.0),
                regime: Regime::ThreeOrMore,
                recovered_covariances: RecoveredCovariances {
                    sigma_xx: Some(xx),
                    sigma_pp: Some(pp),
                    sigma_xp: Some(xp),
                },
                purity_assumed,
            })
        }
    }
}
