//! Transition rates of the accelerated generator `5^N ℒ_N` and the exact
//! drift and quadratic-variation formulas for `π^N(F)`.
//!
//! Everything here works over [`Arith`], so the closed forms can be compared
//! with brute-force transition sums in exact arithmetic.

use crate::calculus::{laplacian, laplacian_scale, normal_derivative};
use crate::error::{domain, Result};
use crate::field::Field;
use crate::gasket::{Corner, GasketGraph, VertexId};
use crate::scalar::{int, powi, Arith};

use super::boundary::BoundarySpec;

/// A single transition `η -> η^{xy}` (edge index) or `η -> η^a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Event {
    Exchange(usize),
    Flip(Corner),
}

pub fn apply_event(g: &GasketGraph, occ: &mut [u8], e: Event) {
    match e {
        Event::Exchange(k) => {
            let (x, y) = g.edges()[k];
            occ.swap(x, y);
        }
        Event::Flip(c) => {
            let a = c.vertex();
            occ[a] ^= 1;
        }
    }
}

/// Flip rate at corner `k`: `5^N b^{-N} [λ₋ η(a) + λ₊ (1 - η(a))]`.
pub fn flip_rate<T: Arith>(g: &GasketGraph, bs: &BoundarySpec<T>, occ: &[u8], k: usize) -> T {
    let clock = bs.corner_clock(k, g.level());
    let base = if occ[k] == 1 { bs.lambda_minus[k].clone() } else { bs.lambda_plus[k].clone() };
    clock * base
}

/// Rate of one specific event in state `occ` (zero if it cannot fire).
pub fn event_rate<T: Arith>(g: &GasketGraph, bs: &BoundarySpec<T>, occ: &[u8], e: Event) -> T {
    match e {
        Event::Exchange(k) => {
            let (x, y) = g.edges()[k];
            if occ[x] != occ[y] {
                laplacian_scale(g.level())
            } else {
                T::zero()
            }
        }
        Event::Flip(c) => flip_rate(g, bs, occ, c.index()),
    }
}

/// Rate table in state `η`: discordant edges at rate `5^N` each plus the corner flips.
#[derive(Debug, Clone, PartialEq)]
pub struct RateTable<T> {
    pub bulk_rate: T,
    pub discordant: Vec<usize>,
    pub corner: [T; 3],
}

impl<T: Arith> RateTable<T> {
    pub fn bulk_total(&self) -> T {
        self.bulk_rate.clone() * int(self.discordant.len() as i64)
    }

    pub fn total(&self) -> T {
        self.corner.iter().fold(self.bulk_total(), |acc, r| acc + r.clone())
    }

    /// Every event with positive rate.
    pub fn events(&self) -> Vec<(Event, T)> {
        let mut out: Vec<(Event, T)> = self
            .discordant
            .iter()
            .map(|&k| (Event::Exchange(k), self.bulk_rate.clone()))
            .collect();
        for c in Corner::ALL {
            let r = self.corner[c.index()].clone();
            if r > T::zero() {
                out.push((Event::Flip(c), r));
            }
        }
        out
    }
}

pub fn event_rates<T: Arith>(g: &GasketGraph, bs: &BoundarySpec<T>, occ: &[u8]) -> Result<RateTable<T>> {
    if occ.len() != g.num_vertices() {
        return domain("configuration does not live on this graph");
    }
    let discordant = g
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, &(x, y))| occ[x] != occ[y])
        .map(|(k, _)| k)
        .collect();
    Ok(RateTable {
        bulk_rate: laplacian_scale(g.level()),
        discordant,
        corner: [0, 1, 2].map(|k| flip_rate(g, bs, occ, k)),
    })
}

/// `c + Σ_x w(x) η(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFunctional<T> {
    pub constant: T,
    pub weights: Vec<T>,
}

impl<T: Arith> LinearFunctional<T> {
    pub fn eval(&self, occ: &[u8]) -> T {
        self.weights
            .iter()
            .zip(occ)
            .filter(|(_, &b)| b == 1)
            .fold(self.constant.clone(), |acc, (w, _)| acc + w.clone())
    }

    pub fn scale(&self, c: &T) -> Self {
        LinearFunctional {
            constant: self.constant.clone() * c.clone(),
            weights: self.weights.iter().map(|w| w.clone() * c.clone()).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        LinearFunctional {
            constant: self.constant.clone() + other.constant.clone(),
            weights: self.weights.iter().zip(&other.weights).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }
}

/// `π^N(F) = |V_N|^{-1} Σ η(x) F(x)` as a functional.
pub fn density_functional<T: Arith>(f: &Field<T>) -> LinearFunctional<T> {
    let n = int::<T>(f.len() as i64);
    LinearFunctional { constant: T::zero(), weights: f.values().iter().map(|x| x.clone() / n.clone()).collect() }
}

/// `π^N(F)`.
pub fn measure_density<T: Arith>(occ: &[u8], f: &Field<T>) -> T {
    density_functional(f).eval(occ)
}

/// Mean occupation over `V_N ∩ K_j(a)`.
pub fn local_average<T: Arith>(g: &GasketGraph, occ: &[u8], corner: Corner, depth: u32) -> Result<T> {
    let cell = g.cell_vertices(&g.corner_cell(corner, depth))?;
    let count = cell.iter().filter(|&&v| occ[v] == 1).count();
    Ok(int::<T>(count as i64) / int(cell.len() as i64))
}

/// `η(a) - Av_{K_j(a)} η` as a functional.
pub fn replacement_functional<T: Arith>(g: &GasketGraph, corner: Corner, depth: u32) -> Result<LinearFunctional<T>> {
    let cell = g.cell_vertices(&g.corner_cell(corner, depth))?;
    let share = T::one() / int(cell.len() as i64);
    let mut weights = vec![T::zero(); g.num_vertices()];
    for v in cell {
        weights[v] = -share.clone();
    }
    let a = corner.vertex();
    weights[a] = weights[a].clone() + T::one();
    Ok(LinearFunctional { constant: T::zero(), weights })
}

/// `η(a) - ρ̄(a)` as a functional.
pub fn boundary_functional<T: Arith>(g: &GasketGraph, bs: &BoundarySpec<T>, corner: Corner) -> LinearFunctional<T> {
    let mut weights = vec![T::zero(); g.num_vertices()];
    weights[corner.vertex()] = T::one();
    LinearFunctional { constant: -bs.rho_bar(corner.index()), weights }
}

/// The drift `5^N ℒ_N π^N(F)` as a linear functional of `η`:
///
/// `|V|^{-1} Σ_int η ΔF - 3^N |V|^{-1} Σ_a [η(a) ∂⊥F(a) + (5^N/(3^N b^N)) λ_Σ (η(a) - ρ̄(a)) F(a)]`.
pub fn drift_functional<T: Arith>(g: &GasketGraph, bs: &BoundarySpec<T>, f: &Field<T>) -> Result<LinearFunctional<T>> {
    let n = int::<T>(g.num_vertices() as i64);
    let lap = laplacian(g, f)?.into_field();
    let mut weights: Vec<T> = lap.values().iter().map(|x| x.clone() / n.clone()).collect();
    let three_n: T = powi(int(3), g.level());
    let mut constant = T::zero();
    for c in Corner::ALL {
        let k = c.index();
        let a = c.vertex();
        let clock = bs.corner_clock(k, g.level());
        let robin = clock.clone() * bs.lambda_sigma(k) * f[a].clone() / n.clone();
        weights[a] = -(three_n.clone() * normal_derivative(g, f, a)? / n.clone()) - robin.clone();
        constant = constant + robin * bs.rho_bar(k);
    }
    Ok(LinearFunctional { constant, weights })
}

/// Closed-form drift of `π^N(F)` in state `η`.
pub fn generator_apply<T: Arith>(g: &GasketGraph, bs: &BoundarySpec<T>, f: &Field<T>, occ: &[u8]) -> Result<T> {
    Ok(drift_functional(g, bs, f)?.eval(occ))
}

fn pi_change<T: Arith>(g: &GasketGraph, f: &Field<T>, occ: &[u8], e: Event) -> T {
    let n = int::<T>(g.num_vertices() as i64);
    let diff = match e {
        Event::Exchange(k) => {
            let (x, y) = g.edges()[k];
            // Particle moves from the occupied end to the empty one.
            let (from, to): (VertexId, VertexId) = if occ[x] == 1 { (x, y) } else { (y, x) };
            f[to].clone() - f[from].clone()
        }
        Event::Flip(c) => {
            let a = c.vertex();
            if occ[a] == 1 {
                -f[a].clone()
            } else {
                f[a].clone()
            }
        }
    };
    diff / n
}

/// `Σ_{η'} r(η, η') (π(F)(η') - π(F)(η))` by enumeration.
pub fn drift_oracle<T: Arith>(g: &GasketGraph, bs: &BoundarySpec<T>, f: &Field<T>, occ: &[u8]) -> Result<T> {
    Ok(event_rates(g, bs, occ)?
        .events()
        .into_iter()
        .fold(T::zero(), |acc, (e, r)| acc + r * pi_change(g, f, occ, e)))
}

/// Instantaneous quadratic-variation rate of `π^N(F)`, one term per unordered edge:
///
/// `5^N |V|^{-2} Σ_{xy ∈ E} (η(x) - η(y))² (F(x) - F(y))² + Σ_a 5^N b^{-N} |V|^{-2} [λ₋ η(a) + λ₊(1 - η(a))] F(a)²`.
pub fn qv_rate<T: Arith>(g: &GasketGraph, bs: &BoundarySpec<T>, f: &Field<T>, occ: &[u8]) -> Result<T> {
    f.check_on(g)?;
    if occ.len() != g.num_vertices() {
        return domain("configuration does not live on this graph");
    }
    let n = int::<T>(g.num_vertices() as i64);
    let n2 = n.clone() * n;
    let bulk = g
        .edges()
        .iter()
        .filter(|&&(x, y)| occ[x] != occ[y])
        .fold(T::zero(), |acc, &(x, y)| {
            let d = f[x].clone() - f[y].clone();
            acc + d.clone() * d
        });
    let mut total = laplacian_scale::<T>(g.level()) * bulk / n2.clone();
    for k in 0..3 {
        let fa = f[k].clone();
        total = total + flip_rate(g, bs, occ, k) * fa.clone() * fa / n2.clone();
    }
    Ok(total)
}

/// `Σ_{η'} r(η, η') (π(F)(η') - π(F)(η))²` by enumeration.
pub fn qv_oracle<T: Arith>(g: &GasketGraph, bs: &BoundarySpec<T>, f: &Field<T>, occ: &[u8]) -> Result<T> {
    Ok(event_rates(g, bs, occ)?.events().into_iter().fold(T::zero(), |acc, (e, r)| {
        let d = pi_change(g, f, occ, e);
        acc + r * d.clone() * d
    }))
}
