//! Equilibrium density fluctuation fields and their Ornstein-Uhlenbeck
//! covariance, empirical estimators and the martingale variance check.

use serde::{Deserialize, Serialize};

use crate::calculus::energy_quad;
use crate::error::{domain, Error, Result};
use crate::field::Field;
use crate::gasket::GasketGraph;
use crate::scalar::{powi, real, Real};
use crate::sim::boundary::BoundarySpec;
use crate::sim::rates::{drift_functional, LinearFunctional};
use crate::spectral::Spectrum;
use crate::stats::{batch_means, ls_fit, mean_estimate, Estimate};

/// `χ(ρ) = ρ(1 - ρ)`.
pub fn chi<T: Real>(rho: T) -> T {
    rho * (T::one() - rho)
}

fn check_rho<T: Real>(rho: T) -> Result<()> {
    if !(rho > T::zero() && rho < T::one()) {
        return domain(format!("density must lie in (0, 1), got {rho}"));
    }
    Ok(())
}

/// `Y(F) = |V_N|^{-1/2} Σ (η(x) - ρ) F(x)`.
pub fn field_apply<T: Real>(occ: &[u8], f: &Field<T>, rho: T) -> Result<T> {
    Ok(fluctuation_functional(f, rho)?.eval(occ))
}

/// [`field_apply`] as a linear functional of `η`.
pub fn fluctuation_functional<T: Real>(f: &Field<T>, rho: T) -> Result<LinearFunctional<T>> {
    check_rho(rho)?;
    let scale = T::one() / real::<T>(f.len() as f64).sqrt();
    let sum: T = f.values().iter().copied().sum();
    Ok(LinearFunctional {
        constant: -rho * sum * scale,
        weights: f.values().iter().map(|x| *x * scale).collect(),
    })
}

/// Drift of `Y(F)` under `5^N ℒ_N`: `|V_N|^{1/2}` times the drift of `π^N(F)`.
pub fn fluctuation_drift<T: Real>(g: &GasketGraph, bs: &BoundarySpec<T>, f: &Field<T>) -> Result<LinearFunctional<T>> {
    let d = drift_functional(g, bs, f)?;
    Ok(d.scale(&real::<T>(g.num_vertices() as f64).sqrt()))
}

/// `χ(ρ) ⟨T̃_t F, G⟩_{m_N}`, the stationary OU covariance `Cov(Y_t(F), Y_0(G))`.
pub fn ou_covariance_theory<T: Real>(s: &Spectrum<T>, f: &Field<T>, g: &Field<T>, t: T, rho: T) -> Result<T> {
    check_rho(rho)?;
    Ok(chi(rho) * s.semigroup_apply(f, t)?.inner(g)?)
}

/// `Cov(Y_{s+lag}(F), Y_s(G))` from one stationary series sampled on a
/// uniform grid, averaging over `s` with batch-means error bars.
///
/// `Y` is centred by the known `ρ`, so no sample mean is subtracted.
pub fn ou_covariance_empirical(yf: &[f64], yg: &[f64], lag_steps: usize, batches: usize) -> Result<Estimate> {
    if yf.len() != yg.len() {
        return domain("series lengths differ");
    }
    if yf.len() < lag_steps + 10 {
        return Err(Error::InsufficientData(format!(
            "series of length {} is too short for lag {lag_steps}",
            yf.len()
        )));
    }
    let products: Vec<f64> = (0..yf.len() - lag_steps).map(|s| yf[s + lag_steps] * yg[s]).collect();
    batch_means(&products, batches)
}

/// Cross-check mode: one `(Y_t(F), Y_0(G))` pair per independent replica.
pub fn ou_covariance_replicas(pairs: &[(f64, f64)]) -> Result<Estimate> {
    let products: Vec<f64> = pairs.iter().map(|(a, b)| a * b).collect();
    mean_estimate(&products)
}

/// Exponential decay rate fitted to a covariance curve: minus the slope of
/// `log C(t)` against `t` over the points with `C(t) > 0`.
pub fn fit_decay_rate(lags: &[f64], cov: &[f64]) -> Result<f64> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = lags
        .iter()
        .zip(cov)
        .filter(|(_, c)| **c > 0.0)
        .map(|(t, c)| (*t, c.ln()))
        .unzip();
    if xs.len() < 3 {
        return Err(Error::InsufficientData("need at least 3 positive covariance points".into()));
    }
    Ok(-ls_fit(&xs, &ys).0)
}

/// `E[M_t(F)²] = (3^N/|V_N|) 2χ(ρ) t [ℰ_N(F) + Σ_a (5^N/(3^N b^N)) λ_Σ(a) F(a)²]`
/// for the fluctuation martingale at equilibrium.
pub fn martingale_qv_theory<T: Real>(
    g: &GasketGraph,
    bs: &BoundarySpec<T>,
    f: &Field<T>,
    t: T,
    rho: T,
) -> Result<T> {
    check_rho(rho)?;
    let three_n: T = powi(real(3.0), g.level());
    let mut form = energy_quad(g, f)?;
    for k in 0..3 {
        let clock = bs.corner_clock(k, g.level()) / three_n;
        form += clock * bs.lambda_sigma(k) * f[k] * f[k];
    }
    Ok(three_n / real::<T>(g.num_vertices() as f64) * real::<T>(2.0) * chi(rho) * t * form)
}

/// Monte Carlo `E[M_t(F)²]` against its closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QvDiagnostic {
    pub estimate: Estimate,
    pub theory: f64,
}

impl QvDiagnostic {
    pub fn z_score(&self) -> f64 {
        self.estimate.z_score(self.theory)
    }
}

/// `martingale_values[r] = Y_t - Y_0 - ∫_0^t drift` on replica `r`.
pub fn martingale_qv_diagnostic<T: Real>(
    g: &GasketGraph,
    bs: &BoundarySpec<T>,
    f: &Field<T>,
    t: T,
    rho: T,
    martingale_values: &[f64],
) -> Result<QvDiagnostic> {
    let squares: Vec<f64> = martingale_values.iter().map(|m| m * m).collect();
    let estimate = mean_estimate(&squares)?;
    let theory = martingale_qv_theory(g, bs, f, t, rho)?.to_f64().unwrap_or(f64::NAN);
    Ok(QvDiagnostic { estimate, theory })
}

/// Replica values of `Y_t(F)` on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FluctuationSample<T> {
    pub test_function: Field<T>,
    pub times: Vec<T>,
    /// `values[r][k]`: replica `r` at `times[k]`.
    pub values: Vec<Vec<T>>,
}

/// One row of a covariance table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceRow {
    pub lag: f64,
    pub theory: f64,
    pub estimate: f64,
    pub stderr: f64,
}

pub fn covariance_csv(rows: &[CovarianceRow]) -> String {
    let mut out = String::from("lag,theory,estimate,stderr\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{}\n", r.lag, r.theory, r.estimate, r.stderr));
    }
    out
}
