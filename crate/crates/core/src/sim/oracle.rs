//! Brute-force references on small graphs: the full master equation,
//! detailed balance under `ν_ρ` and the moving particle inequality.

use crate::calculus::effective_resistance;
use crate::error::{domain, Error, Result};
use crate::gasket::GasketGraph;
use crate::scalar::{powi, real, Arith, Real};

use super::boundary::BoundarySpec;
use super::config::{from_mask, to_mask};
use super::rates::{apply_event, event_rate, event_rates};

/// Largest `|V_N|` the master equation accepts (4096 states).
pub const MAX_ORACLE_SITES: usize = 12;

/// Largest `|V_N|` the exhaustive reversibility and moving-particle checks accept.
pub const MAX_ENUMERATION_SITES: usize = 15;

/// Sparse generator: for each state, its outgoing `(target, rate)` pairs.
#[derive(Debug, Clone)]
pub struct Generator<T> {
    pub sites: usize,
    pub out: Vec<Vec<(usize, T)>>,
}

impl<T: Real> Generator<T> {
    pub fn build(g: &GasketGraph, bs: &BoundarySpec<T>) -> Result<Self> {
        let n = g.num_vertices();
        if n > MAX_ORACLE_SITES {
            return Err(Error::Capacity(format!(
                "master equation needs |V_N| <= {MAX_ORACLE_SITES}, level {} has {n}",
                g.level()
            )));
        }
        let states = 1usize << n;
        let mut out = Vec::with_capacity(states);
        for s in 0..states {
            let occ = from_mask(s as u64, n);
            let mut row = Vec::new();
            for (e, r) in event_rates(g, bs, &occ)?.events() {
                let mut next = occ.clone();
                apply_event(g, &mut next, e);
                row.push((to_mask(&next) as usize, r));
            }
            out.push(row);
        }
        Ok(Generator { sites: n, out })
    }

    pub fn states(&self) -> usize {
        self.out.len()
    }

    /// Diagonal entries `Q(s, s) = -Σ_out rate`.
    pub fn exit_rates(&self) -> Vec<T> {
        self.out.iter().map(|row| row.iter().map(|(_, r)| *r).sum()).collect()
    }

    /// `p ↦ p P` with `P = I + Q/q`.
    fn uniformized_step(&self, p: &[T], exit: &[T], q: T) -> Vec<T> {
        let mut next: Vec<T> = p.iter().zip(exit).map(|(pi, e)| *pi * (T::one() - *e / q)).collect();
        for (s, row) in self.out.iter().enumerate() {
            if p[s] == T::zero() {
                continue;
            }
            for &(t, r) in row {
                next[t] += p[s] * r / q;
            }
        }
        next
    }

    /// `p_0 exp(tQ)` by uniformization, in chunks with `q Δt ≤ 50`; the
    /// Poisson tail dropped per chunk is below `1e-13`.
    pub fn evolve(&self, p0: &[T], t: T) -> Result<Vec<T>> {
        if p0.len() != self.states() {
            return domain("initial distribution has the wrong length");
        }
        if t < T::zero() {
            return domain("time must be nonnegative");
        }
        let exit = self.exit_rates();
        let q = exit.iter().fold(T::zero(), |m, e| m.max(*e));
        if t == T::zero() || q == T::zero() {
            return Ok(p0.to_vec());
        }
        let total = (q * t).to_f64().unwrap_or(f64::INFINITY);
        let chunks = (total / 50.0).ceil().max(1.0) as usize;
        let dt = t / real::<T>(chunks as f64);
        let lam = (q * dt).to_f64().unwrap();
        let mut p = p0.to_vec();
        for _ in 0..chunks {
            let mut term = p.clone();
            let mut weight = (-lam).exp();
            let mut acc: Vec<T> = term.iter().map(|x| *x * real::<T>(weight)).collect();
            let mut mass = weight;
            let mut k = 0usize;
            while 1.0 - mass > 1e-13 && k < 10_000 {
                k += 1;
                term = self.uniformized_step(&term, &exit, q);
                weight *= lam / k as f64;
                mass += weight;
                let w = real::<T>(weight);
                for (a, x) in acc.iter_mut().zip(&term) {
                    *a += w * *x;
                }
            }
            p = acc;
        }
        Ok(p)
    }

    /// Stationary law by power iteration of a lazy uniformized chain.
    pub fn stationary(&self) -> Result<Vec<T>> {
        let exit = self.exit_rates();
        let q = exit.iter().fold(T::zero(), |m, e| m.max(*e)) * real(1.05);
        let n = self.states();
        let mut p = vec![T::one() / real::<T>(n as f64); n];
        for _ in 0..2_000_000 {
            let next = self.uniformized_step(&p, &exit, q);
            let change: T = next.iter().zip(&p).map(|(a, b)| (*a - *b).abs()).sum();
            p = next;
            if change < real(1e-16) {
                let s: T = p.iter().copied().sum();
                return Ok(p.into_iter().map(|x| x / s).collect());
            }
        }
        Err(Error::Singular("stationary iteration did not converge".into()))
    }
}

/// `p_0 exp(tQ)` over all `2^{|V_N|}` states (state index = occupation bit mask).
pub fn master_equation_oracle<T: Real>(
    g: &GasketGraph,
    bs: &BoundarySpec<T>,
    p0: &[T],
    t: T,
) -> Result<Vec<T>> {
    Generator::build(g, bs)?.evolve(p0, t)
}

/// Point mass at one configuration.
pub fn point_mass<T: Real>(sites: usize, occ: &[u8]) -> Vec<T> {
    let mut p = vec![T::zero(); 1 << sites];
    p[to_mask(occ) as usize] = T::one();
    p
}

/// `ν_ρ(η) = ρ^{|η|} (1 - ρ)^{n - |η|}` for every mask.
pub fn product_bernoulli<T: Arith>(sites: usize, rho: &T) -> Vec<T> {
    (0..1u64 << sites).map(|m| bernoulli_weight(m, sites, rho)).collect()
}

fn bernoulli_weight<T: Arith>(mask: u64, sites: usize, rho: &T) -> T {
    let k = mask.count_ones();
    powi(rho.clone(), k) * powi(T::one() - rho.clone(), sites as u32 - k)
}

pub fn total_variation<T: Real>(p: &[T], q: &[T]) -> T {
    p.iter().zip(q).map(|(a, b)| (*a - *b).abs()).sum::<T>() * real(0.5)
}

/// Outcome of the exhaustive reversibility check.
#[derive(Debug, Clone, PartialEq)]
pub struct DetailedBalance<T> {
    pub holds: bool,
    pub max_violation: T,
    pub transitions: usize,
}

/// Checks `ν_ρ(η) r(η, η') = ν_ρ(η') r(η', η)` over every transition, with
/// `ρ = ρ̄(a0)`. Exact for rational `T`; for floats `tol` absorbs rounding.
pub fn detailed_balance_check<T: Arith>(g: &GasketGraph, bs: &BoundarySpec<T>, tol: &T) -> Result<DetailedBalance<T>> {
    let n = g.num_vertices();
    if n > MAX_ENUMERATION_SITES {
        return Err(Error::Capacity(format!("detailed balance enumeration needs |V_N| <= {MAX_ENUMERATION_SITES}")));
    }
    let rho = bs.rho_bar(0);
    let mut worst = T::zero();
    let mut count = 0usize;
    for m in 0..1u64 << n {
        let occ = from_mask(m, n);
        let nu = bernoulli_weight(m, n, &rho);
        for (e, r) in event_rates(g, bs, &occ)?.events() {
            let mut next = occ.clone();
            apply_event(g, &mut next, e);
            let back = event_rate(g, bs, &next, e);
            let lhs = nu.clone() * r;
            let rhs = bernoulli_weight(to_mask(&next), n, &rho) * back;
            let d = lhs - rhs;
            let d = if d < T::zero() { -d } else { d };
            if d > worst {
                worst = d;
            }
            count += 1;
        }
    }
    Ok(DetailedBalance { holds: worst <= *tol, max_violation: worst, transitions: count })
}

/// Both sides of the moving particle inequality and their difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MplReport<T> {
    pub lhs: T,
    pub rhs: T,
    pub resistance: T,
    /// `rhs - lhs`.
    pub slack: T,
}

/// `(1/2)∫(f(η^{xy}) - f(η))² dν_ρ ≤ R_eff(x,y) (1/2)∫Σ_{zw∈E}(f(η^{zw}) - f(η))² dν_ρ`,
/// with `f` given on all `2^{|V_N|}` masks.
pub fn mpl_check<T: Real>(g: &GasketGraph, f: &[T], x: usize, y: usize, rho: T) -> Result<MplReport<T>> {
    let n = g.num_vertices();
    if n > MAX_ENUMERATION_SITES {
        return Err(Error::Capacity(format!("moving particle check needs |V_N| <= {MAX_ENUMERATION_SITES}")));
    }
    if f.len() != 1 << n {
        return domain(format!("f must have {} entries", 1u64 << n));
    }
    if !(rho > T::zero() && rho < T::one()) {
        return domain("ρ must lie in (0, 1)");
    }
    let resistance = effective_resistance::<T>(g, x, y)?;
    let swap = |m: u64, a: usize, b: usize| -> u64 {
        let (ba, bb) = ((m >> a) & 1, (m >> b) & 1);
        if ba == bb {
            m
        } else {
            m ^ (1 << a) ^ (1 << b)
        }
    };
    let half: T = real(0.5);
    let mut lhs = T::zero();
    let mut dirichlet = T::zero();
    for m in 0..1u64 << n {
        let nu = bernoulli_weight(m, n, &rho);
        let fm = f[m as usize];
        let d = f[swap(m, x, y) as usize] - fm;
        lhs += nu * d * d;
        for &(z, w) in g.edges() {
            let d = f[swap(m, z, w) as usize] - fm;
            dirichlet += nu * d * d;
        }
    }
    let lhs = half * lhs;
    let rhs = resistance * half * dirichlet;
    Ok(MplReport { lhs, rhs, resistance, slack: rhs - lhs })
}

/// Marginal occupation probabilities `P(η(v) = 1)` of a distribution over masks.
pub fn site_marginals<T: Real>(p: &[T], sites: usize) -> Vec<T> {
    let mut out = vec![T::zero(); sites];
    for (m, pm) in p.iter().enumerate() {
        for (v, o) in out.iter_mut().enumerate() {
            if (m >> v) & 1 == 1 {
                *o += *pm;
            }
        }
    }
    out
}

/// Every successor state with its rate.
pub fn enumerate_transitions<T: Arith>(g: &GasketGraph, bs: &BoundarySpec<T>, occ: &[u8]) -> Result<Vec<(Vec<u8>, T)>> {
    Ok(event_rates(g, bs, occ)?
        .events()
        .into_iter()
        .map(|(e, r)| {
            let mut next = occ.to_vec();
            apply_event(g, &mut next, e);
            (next, r)
        })
        .collect())
}
