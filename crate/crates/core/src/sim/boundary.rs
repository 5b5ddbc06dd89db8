//! Reservoir data at the three corners and the regime each one selects.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Error, Result};
use crate::scalar::{int, powi, Arith, Real};
use crate::spectral::{BoundaryCondition, CornerCondition};

/// The reservoir slow-down base `b`, kept as an exact rational so that
/// `b = 5/3` is recognised without floating-point equality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exponent(Ratio<i64>);

/// `5/3`, the critical value.
pub const CRITICAL: Exponent = Exponent(Ratio::new_raw(5, 3));

impl Exponent {
    pub fn new(numer: i64, denom: i64) -> Result<Self> {
        if denom == 0 {
            return domain("exponent denominator is zero");
        }
        let r = Ratio::new(numer, denom);
        if r <= Ratio::from_integer(0) {
            return domain(format!("exponent b must be positive, got {r}"));
        }
        Ok(Exponent(r))
    }

    pub fn ratio(&self) -> Ratio<i64> {
        self.0
    }

    /// `b` in any arithmetic type (exact for rationals).
    pub fn value<T: Arith>(&self) -> T {
        int::<T>(*self.0.numer()) / int(*self.0.denom())
    }

    pub fn regime(&self) -> Regime {
        match self.cmp(&CRITICAL) {
            std::cmp::Ordering::Less => Regime::Dirichlet,
            std::cmp::Ordering::Equal => Regime::Robin,
            std::cmp::Ordering::Greater => Regime::Neumann,
        }
    }

    pub fn to_f64(&self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }
}

impl FromStr for Exponent {
    type Err = Error;

    /// Accepts `p/q`, integers and plain decimals (`1.5` is read as `3/2` exactly).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("cannot read exponent `{s}`"));
        if let Some((p, q)) = s.split_once('/') {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            return Exponent::new(p, q);
        }
        let (whole, frac) = s.split_once('.').unwrap_or((s, ""));
        if frac.len() > 12 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let denom = 10i64.pow(frac.len() as u32);
        let digits = format!("{whole}{frac}");
        let numer: i64 = digits.parse().map_err(|_| bad())?;
        Exponent::new(numer, denom)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self.0.denom() == 1 {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Number(f64),
        }
        let text = match Raw::deserialize(d)? {
            Raw::Text(t) => t,
            Raw::Number(x) => x.to_string(),
        };
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Boundary behaviour of the hydrodynamic limit at one corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Dirichlet,
    Robin,
    Neumann,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Dirichlet => "dirichlet",
            Regime::Robin => "robin",
            Regime::Neumann => "neumann",
        })
    }
}

/// Per-corner birth rate `λ₊`, death rate `λ₋` and exponent `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundarySpec<T> {
    pub lambda_plus: [T; 3],
    pub lambda_minus: [T; 3],
    pub b: [Exponent; 3],
}

impl<T: Arith> BoundarySpec<T> {
    pub fn new(lambda_plus: [T; 3], lambda_minus: [T; 3], b: [Exponent; 3]) -> Result<Self> {
        if lambda_plus.iter().chain(&lambda_minus).any(|l| !(*l > T::zero())) {
            return domain("reservoir rates must be positive");
        }
        Ok(BoundarySpec { lambda_plus, lambda_minus, b })
    }

    /// Same `b` at every corner.
    pub fn uniform(lambda_plus: [T; 3], lambda_minus: [T; 3], b: Exponent) -> Result<Self> {
        Self::new(lambda_plus, lambda_minus, [b; 3])
    }

    /// `λ₊ = λ₋ = rate` everywhere, so `ρ̄ ≡ 1/2`.
    pub fn equal_rates(rate: T, b: Exponent) -> Result<Self> {
        Self::uniform([rate.clone(), rate.clone(), rate.clone()], [rate.clone(), rate.clone(), rate], b)
    }

    pub fn lambda_sigma(&self, k: usize) -> T {
        self.lambda_plus[k].clone() + self.lambda_minus[k].clone()
    }

    /// `ρ̄(a) = λ₊/λ_Σ`.
    pub fn rho_bar(&self, k: usize) -> T {
        self.lambda_plus[k].clone() / self.lambda_sigma(k)
    }

    pub fn rho_bars(&self) -> [T; 3] {
        [self.rho_bar(0), self.rho_bar(1), self.rho_bar(2)]
    }

    pub fn regime(&self, k: usize) -> Regime {
        self.b[k].regime()
    }

    pub fn regimes(&self) -> [Regime; 3] {
        [self.regime(0), self.regime(1), self.regime(2)]
    }

    /// All corners share one `ρ̄`, so `ν_ρ` is reversible.
    pub fn is_equilibrium(&self) -> bool {
        let r = self.rho_bar(0);
        (1..3).all(|k| self.rho_bar(k) == r)
    }

    /// `5^N b^{-N}`, the accelerated clock factor of corner flips.
    pub fn corner_clock(&self, k: usize, level: u32) -> T {
        powi(int::<T>(5) / self.b[k].value::<T>(), level)
    }

    /// `(5/(3b))^N λ_Σ(a)`: the Robin coefficient that the expected density
    /// obeys exactly at level `N`.
    pub fn effective_robin(&self, k: usize, level: u32) -> T {
        powi(int::<T>(5) / (int::<T>(3) * self.b[k].value::<T>()), level) * self.lambda_sigma(k)
    }
}

impl<T: Real> BoundarySpec<T> {
    /// Corner conditions of the limiting heat equation (`r = λ_Σ` for Robin).
    pub fn limit_condition(&self) -> BoundaryCondition<T> {
        let corners = [0, 1, 2].map(|k| match self.regime(k) {
            Regime::Dirichlet => CornerCondition::Dirichlet,
            Regime::Robin => CornerCondition::Robin(self.lambda_sigma(k)),
            Regime::Neumann => CornerCondition::Neumann,
        });
        BoundaryCondition { corners }
    }

    /// Robin conditions with [`effective_robin`](Self::effective_robin) at every corner.
    pub fn finite_level_condition(&self, level: u32) -> BoundaryCondition<T> {
        BoundaryCondition { corners: [0, 1, 2].map(|k| CornerCondition::Robin(self.effective_robin(k, level))) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_parsing_and_regimes() {
        let b: Exponent = "5/3".parse().unwrap();
        assert_eq!(b, CRITICAL);
        assert_eq!(b.regime(), Regime::Robin);
        assert_eq!("1".parse::<Exponent>().unwrap().regime(), Regime::Dirichlet);
        assert_eq!("2.0".parse::<Exponent>().unwrap().regime(), Regime::Neumann);
        assert_eq!("1.5".parse::<Exponent>().unwrap(), Exponent::new(3, 2).unwrap());
        assert_eq!("1.6667".parse::<Exponent>().unwrap().regime(), Regime::Neumann);
        assert!("0".parse::<Exponent>().is_err());
        assert!("x".parse::<Exponent>().is_err());
        let json = serde_json::to_string(&b).unwrap();
        assert_eq!(json, "\"5/3\"");
        assert_eq!(serde_json::from_str::<Exponent>("2").unwrap(), Exponent::new(2, 1).unwrap());
    }

    #[test]
    fn derived_quantities() {
        let bs = BoundarySpec::<f64>::uniform([1.0, 0.2, 0.5], [0.5, 0.8, 0.5], CRITICAL).unwrap();
        assert!((bs.rho_bar(0) - 2.0 / 3.0).abs() < 1e-15);
        assert!((bs.effective_robin(1, 7) - 1.0).abs() < 1e-12);
        assert!(!bs.is_equilibrium());
        assert!(BoundarySpec::uniform([1.0, 0.0, 1.0], [1.0; 3], CRITICAL).is_err());
    }
}
