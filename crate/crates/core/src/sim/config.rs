//! Occupation states, initial conditions and random streams.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::field::Field;
use crate::gasket::GasketGraph;
use crate::scalar::Real;

/// `η ∈ {0,1}^{V_N}` at time `t` (accelerated clock).
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration<T> {
    pub occupation: Vec<u8>,
    pub time: T,
}

impl<T: Real> Configuration<T> {
    pub fn new(g: &GasketGraph, occupation: Vec<u8>) -> Result<Self> {
        if occupation.len() != g.num_vertices() {
            return domain(format!(
                "configuration has {} sites, level {} has {}",
                occupation.len(),
                g.level(),
                g.num_vertices()
            ));
        }
        if occupation.iter().any(|&b| b > 1) {
            return domain("occupation entries must be 0 or 1");
        }
        Ok(Configuration { occupation, time: T::zero() })
    }

    pub fn empty(g: &GasketGraph) -> Self {
        Configuration { occupation: vec![0; g.num_vertices()], time: T::zero() }
    }

    pub fn full(g: &GasketGraph) -> Self {
        Configuration { occupation: vec![1; g.num_vertices()], time: T::zero() }
    }

    pub fn particles(&self) -> usize {
        self.occupation.iter().map(|&b| b as usize).sum()
    }

    /// One character per vertex in canonical order.
    pub fn to_bits(&self) -> String {
        self.occupation.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()
    }

    pub fn from_bits(g: &GasketGraph, bits: &str) -> Result<Self> {
        let occ = bits
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Parse(format!("unexpected character `{c}` in bit string"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::new(g, occ)
    }

    /// First non-comment line of a snapshot file.
    pub fn from_snapshot(g: &GasketGraph, text: &str) -> Result<Self> {
        let line = text
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty() && !l.starts_with('#'))
            .ok_or_else(|| Error::Parse("snapshot holds no configuration".into()))?;
        Self::from_bits(g, line)
    }
}

/// Bit mask of a configuration with at most 64 sites, site `v` in bit `v`.
pub fn to_mask(occ: &[u8]) -> u64 {
    occ.iter().enumerate().fold(0u64, |m, (v, &b)| m | ((b as u64) << v))
}

pub fn from_mask(mask: u64, n: usize) -> Vec<u8> {
    (0..n).map(|v| ((mask >> v) & 1) as u8).collect()
}

/// Distribution of `η_0`.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition<T> {
    /// Independent `Bernoulli(ϱ(x))` sites.
    Profile(Field<T>),
    Empty,
    Full,
    Exact(Vec<u8>),
}

impl<T: Real> InitialCondition<T> {
    pub fn sample(&self, g: &GasketGraph, rng: &mut impl Rng) -> Result<Configuration<T>> {
        match self {
            InitialCondition::Profile(rho) => {
                rho.check_on(g)?;
                if rho.values().iter().any(|p| *p < T::zero() || *p > T::one()) {
                    return domain("initial density profile must lie in [0, 1]");
                }
                let occ = rho
                    .values()
                    .iter()
                    .map(|p| {
                        let u: f64 = rng.random();
                        (u < p.to_f64().unwrap_or(0.0)) as u8
                    })
                    .collect();
                Configuration::new(g, occ)
            }
            InitialCondition::Empty => Ok(Configuration::empty(g)),
            InitialCondition::Full => Ok(Configuration::full(g)),
            InitialCondition::Exact(occ) => Configuration::new(g, occ.clone()),
        }
    }
}

/// `(master_seed, stream_id)`: a replica's private, reproducible generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        RngStream { master_seed, stream_id }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }
}
