//! Monte Carlo diagnostics for replacing the corner occupation by a local
//! cell average or by the reservoir density.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gasket::{Corner, GasketGraph};
use crate::scalar::Real;
use crate::stats::{mean_estimate, Estimate};

use super::boundary::BoundarySpec;
use super::config::{InitialCondition, RngStream};
use super::engine::Engine;
use super::rates::{boundary_functional, replacement_functional, LinearFunctional};

/// What `η(a)` is compared with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReplacementTarget {
    /// `Av_{K_j(a)} η`; depth `0` is the global average.
    CellAverage(u32),
    /// `ρ̄(a)`.
    ReservoirDensity,
}

impl ReplacementTarget {
    pub fn functional<T: Real>(
        &self,
        g: &GasketGraph,
        bs: &BoundarySpec<T>,
        corner: Corner,
    ) -> Result<LinearFunctional<T>> {
        match *self {
            ReplacementTarget::CellAverage(j) => replacement_functional(g, corner, j),
            ReplacementTarget::ReservoirDensity => Ok(boundary_functional(g, bs, corner)),
        }
    }
}

/// `∫_0^t (η_s(a) - target) ds` along one replica.
pub fn replacement_integral<T: Real>(
    g: &GasketGraph,
    bs: &BoundarySpec<T>,
    init: &InitialCondition<T>,
    corner: Corner,
    target: ReplacementTarget,
    t: T,
    stream: RngStream,
) -> Result<T> {
    let f = target.functional(g, bs, corner)?;
    let mut e = Engine::start(g, bs, init, stream)?;
    let h = e.track(&f)?;
    let t0 = e.time();
    e.advance_to(t0 + t)?;
    Ok(e.integral(h))
}

/// `E|∫_0^t (η_s(a) - target) ds|` with its standard error, from per-replica
/// integrals.
pub fn replacement_diagnostic(integrals: &[f64]) -> Result<Estimate> {
    if integrals.len() < 10 {
        return Err(Error::InsufficientData(format!(
            "replacement diagnostic needs at least 10 replicas, have {}",
            integrals.len()
        )));
    }
    let abs: Vec<f64> = integrals.iter().map(|x| x.abs()).collect();
    mean_estimate(&abs)
}

/// Sequential driver: replicas use streams `0..replicas` of `master_seed`.
#[allow(clippy::too_many_arguments)]
pub fn run_replacement<T: Real>(
    g: &GasketGraph,
    bs: &BoundarySpec<T>,
    init: &InitialCondition<T>,
    corner: Corner,
    target: ReplacementTarget,
    t: T,
    replicas: u64,
    master_seed: u64,
) -> Result<Estimate> {
    let integrals = (0..replicas)
        .map(|r| {
            replacement_integral(g, bs, init, corner, target, t, RngStream::new(master_seed, r))
                .map(|x| x.to_f64().unwrap_or(f64::NAN))
        })
        .collect::<Result<Vec<f64>>>()?;
    replacement_diagnostic(&integrals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::sim::boundary::Exponent;

    #[test]
    fn full_cell_target_is_global_average() {
        let g = GasketGraph::build(2).unwrap();
        let bs = BoundarySpec::equal_rates(1.0, Exponent::new(2, 1).unwrap()).unwrap();
        let f = ReplacementTarget::CellAverage(0).functional(&g, &bs, Corner::A0).unwrap();
        let occ: Vec<u8> = (0..g.num_vertices()).map(|v| (v % 2) as u8).collect();
        let mean = occ.iter().map(|&x| x as f64).sum::<f64>() / occ.len() as f64;
        assert!((f.eval(&occ) - (occ[0] as f64 - mean)).abs() < 1e-12);
    }

    #[test]
    fn needs_ten_replicas() {
        assert!(replacement_diagnostic(&[0.1; 9]).is_err());
        let e = replacement_diagnostic(&[-0.5, 0.5, 0.5, -0.5, 0.5, 0.5, -0.5, 0.5, 0.5, -0.5]).unwrap();
        assert_eq!(e.mean, 0.5);
        let g = GasketGraph::build(1).unwrap();
        let bs = BoundarySpec::equal_rates(1.0, Exponent::new(1, 1).unwrap()).unwrap();
        let init = InitialCondition::Profile(Field::constant(&g, 0.5));
        let est = run_replacement(&g, &bs, &init, Corner::A1, ReplacementTarget::ReservoirDensity, 0.2, 20, 5).unwrap();
        assert!(est.mean >= 0.0 && est.mean <= 0.2 / 2.0 + 1e-12);
    }
}
