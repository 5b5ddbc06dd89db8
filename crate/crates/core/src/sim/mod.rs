//! The boundary-driven exclusion process: rates, exact simulation,
//! generator algebra and small-system oracles.

pub mod boundary;
pub mod config;
pub mod engine;
pub mod oracle;
pub mod rates;
pub mod replacement;

pub use boundary::{BoundarySpec, Exponent, Regime, CRITICAL};
pub use config::{Configuration, InitialCondition, RngStream};
pub use engine::{Engine, MeasurementSeries, Observable, RateModel};
pub use oracle::{detailed_balance_check, master_equation_oracle, mpl_check, DetailedBalance, Generator, MplReport};
pub use rates::{
    boundary_functional, density_functional, drift_functional, event_rates, generator_apply, local_average,
    measure_density, qv_rate, replacement_functional, Event, LinearFunctional, RateTable,
};
pub use replacement::{replacement_diagnostic, replacement_integral, run_replacement, ReplacementTarget};
