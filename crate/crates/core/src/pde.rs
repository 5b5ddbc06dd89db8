//! Steady states and spectral solutions of the heat equation with
//! Dirichlet, Robin, Neumann or mixed corner conditions, and the weak
//! formulation residual `Θ` evaluated on a sampled trajectory.

use crate::calculus::{form_weight, harmonic_extension, laplacian, normal_derivatives, solve3, energy_quad};
use crate::error::{domain, Error, Result};
use crate::field::Field;
use crate::gasket::GasketGraph;
use crate::scalar::{real, Real};
use crate::spectral::{BoundaryCondition, CornerCondition, Spectrum};

/// Heat equation data: corner conditions, boundary values `g(a)`, initial
/// profile `ϱ` and horizon `T`.
#[derive(Debug, Clone)]
pub struct HeatProblem<T> {
    pub bc: BoundaryCondition<T>,
    /// `g(a)`; ignored at Neumann corners.
    pub boundary_values: [T; 3],
    pub initial: Field<T>,
    pub horizon: T,
}

impl<T: Real> HeatProblem<T> {
    pub fn new(
        bc: BoundaryCondition<T>,
        boundary_values: [T; 3],
        initial: Field<T>,
        horizon: T,
    ) -> Result<Self> {
        bc.validate()?;
        let unit = |x: &T| *x >= T::zero() && *x <= T::one();
        if !boundary_values.iter().all(unit) {
            return domain("boundary densities must lie in [0, 1]");
        }
        if !initial.values().iter().all(unit) {
            return domain("initial profile must lie in [0, 1]");
        }
        if !(horizon >= T::zero()) {
            return domain("horizon must be nonnegative");
        }
        Ok(HeatProblem { bc, boundary_values, initial, horizon })
    }

    /// Constant-in-space steady states need the initial mass.
    fn initial_mean(&self) -> T {
        self.initial.mean()
    }
}

/// Corner values of the steady state, from the 3×3 system
/// `c_j = g_j` (Dirichlet), `(2 + r_j) c_j - Σ_{i≠j} c_i = r_j g_j` (Robin, `r_j = 0` for Neumann).
///
/// The pure-Neumann system is singular; its steady state is the initial mean.
pub fn steady_corner_values<T: Real>(p: &HeatProblem<T>) -> Result<[T; 3]> {
    if p.bc.is_pure_neumann() {
        let m = p.initial_mean();
        return Ok([m; 3]);
    }
    let mut a = [[T::zero(); 3]; 3];
    let mut rhs = [T::zero(); 3];
    for j in 0..3 {
        match p.bc.corners[j] {
            CornerCondition::Dirichlet => {
                a[j][j] = T::one();
                rhs[j] = p.boundary_values[j];
            }
            cond => {
                let r = match cond {
                    CornerCondition::Robin(r) => r,
                    _ => T::zero(),
                };
                for (i, aji) in a[j].iter_mut().enumerate() {
                    *aji = if i == j { real::<T>(2.0) + r } else { -T::one() };
                }
                rhs[j] = r * p.boundary_values[j];
            }
        }
    }
    solve3(&a, &rhs).map_err(|_| Error::Singular("steady-state corner system is singular".into()))
}

/// `ρ_ss`: the harmonic function meeting the corner conditions.
pub fn steady_state<T: Real>(g: &GasketGraph, p: &HeatProblem<T>) -> Result<Field<T>> {
    p.initial.check_on(g)?;
    Ok(harmonic_extension(g, steady_corner_values(p)?))
}

fn check_spectrum<T: Real>(p: &HeatProblem<T>, s: &Spectrum<T>) -> Result<()> {
    if *s.bc() != p.bc {
        return domain(format!(
            "spectrum was computed for {} but the problem is {}",
            s.bc().label(),
            p.bc.label()
        ));
    }
    if s.level() != p.initial.level() {
        return domain("spectrum and problem levels differ");
    }
    Ok(())
}

/// `ρ(t) = ρ_ss + T̃_t(ϱ - ρ_ss)`; `t = 0` returns `ϱ` itself.
pub fn solve<T: Real>(g: &GasketGraph, p: &HeatProblem<T>, s: &Spectrum<T>, t: T) -> Result<Field<T>> {
    check_spectrum(p, s)?;
    if t < T::zero() || t > p.horizon {
        return domain(format!("time {t} outside [0, {}]", p.horizon));
    }
    if t == T::zero() {
        return Ok(p.initial.clone());
    }
    let ss = steady_state(g, p)?;
    ss.add(&s.semigroup_apply(&p.initial.sub(&ss)?, t)?)
}

/// [`solve`] for per-corner regimes; the same formula covers every mix.
pub fn solve_mixed<T: Real>(
    g: &GasketGraph,
    p: &HeatProblem<T>,
    s: &Spectrum<T>,
    t: T,
) -> Result<Field<T>> {
    solve(g, p, s, t)
}

/// `ρ(t_k)` on a time grid, computed from one steady state and one projection.
pub fn trajectory<T: Real>(
    g: &GasketGraph,
    p: &HeatProblem<T>,
    s: &Spectrum<T>,
    times: &[T],
) -> Result<Vec<Field<T>>> {
    check_spectrum(p, s)?;
    let ss = steady_state(g, p)?;
    let alpha = s.coefficients(&p.initial.sub(&ss)?)?;
    let two_thirds: T = real(2.0 / 3.0);
    times
        .iter()
        .map(|&t| {
            if t < T::zero() || t > p.horizon {
                return domain(format!("time {t} outside [0, {}]", p.horizon));
            }
            if t == T::zero() {
                return Ok(p.initial.clone());
            }
            let mut out = ss.clone();
            for ((a, l), phi) in alpha.iter().zip(s.eigenvalues()).zip(s.eigenvectors()) {
                let c = *a * (-two_thirds * *l * t).exp();
                for (o, x) in out.values_mut().iter_mut().zip(phi.values()) {
                    *o += c * *x;
                }
            }
            Ok(out)
        })
        .collect()
}

/// `k T / steps` for `k = 0..=steps`.
pub fn uniform_grid<T: Real>(horizon: T, steps: usize) -> Vec<T> {
    let n = real::<T>(steps as f64);
    (0..=steps).map(|k| horizon * real::<T>(k as f64) / n).collect()
}

/// Time factor of a separable test function `F(t, x) = α(t) φ(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeProfile<T> {
    Constant,
    /// `α(t) = e^{-rate t}`.
    Exponential { rate: T },
    /// `α(t) = cos(ω t)`.
    Cosine { omega: T },
}

impl<T: Real> TimeProfile<T> {
    pub fn value(&self, t: T) -> T {
        match *self {
            TimeProfile::Constant => T::one(),
            TimeProfile::Exponential { rate } => (-rate * t).exp(),
            TimeProfile::Cosine { omega } => (omega * t).cos(),
        }
    }

    pub fn derivative(&self, t: T) -> T {
        match *self {
            TimeProfile::Constant => T::zero(),
            TimeProfile::Exponential { rate } => -rate * (-rate * t).exp(),
            TimeProfile::Cosine { omega } => -omega * (omega * t).sin(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TestFunction<T> {
    pub profile: TimeProfile<T>,
    pub phi: Field<T>,
}

/// `Θ(t_k)` at every grid time.
///
/// Space integrals use the vertex weight of [`form_weight`], `ΔF` is
/// `(3/2)Δ_N F` at interior vertices and `∂⊥F` is `∂⊥_N F`; time integrals
/// use the trapezoid rule on `times`. Dirichlet corners contribute
/// `g(a) ∂⊥F(a)`, Robin and Neumann corners `ρ(a) ∂⊥F(a) + r(a)(ρ(a) - g(a)) F(a)`.
pub fn weak_residual_path<T: Real>(
    g: &GasketGraph,
    p: &HeatProblem<T>,
    times: &[T],
    traj: &[Field<T>],
    test: &TestFunction<T>,
) -> Result<Vec<T>> {
    if times.len() != traj.len() || times.is_empty() {
        return domain("trajectory and time grid must be nonempty and of equal length");
    }
    if times[0] != T::zero() {
        return domain("time grid must start at 0");
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return domain("time grid must be increasing");
    }
    let phi = &test.phi;
    phi.check_on(g)?;
    let tol: T = real(1e-12);
    for (k, c) in p.bc.corners.iter().enumerate() {
        if matches!(c, CornerCondition::Dirichlet) && phi[k].abs() > tol {
            return domain(format!("test function must vanish at the Dirichlet corner a{k}"));
        }
    }
    for f in traj {
        f.check_on(g)?;
    }
    let mu: T = form_weight(g.level());
    let lap = laplacian(g, phi)?.into_field();
    let dphi = normal_derivatives(g, phi)?;
    let two_thirds: T = real(2.0 / 3.0);
    let alpha = |t: T| test.profile.value(t);
    let dalpha = |t: T| test.profile.derivative(t);

    let bulk = |rho: &Field<T>, t: T| -> T {
        let lap_term: T = g.interior().map(|x| rho[x] * lap[x]).sum();
        let dt_term: T = rho.values().iter().zip(phi.values()).map(|(r, f)| *r * *f).sum();
        mu * (alpha(t) * lap_term + dalpha(t) * dt_term)
    };
    let boundary = |rho: &Field<T>, t: T| -> T {
        let mut s = T::zero();
        for k in 0..3 {
            let gk = p.boundary_values[k];
            s += match p.bc.corners[k] {
                CornerCondition::Dirichlet => gk * dphi[k],
                CornerCondition::Neumann => rho[k] * dphi[k],
                CornerCondition::Robin(r) => rho[k] * dphi[k] + r * (rho[k] - gk) * phi[k],
            };
        }
        two_thirds * alpha(t) * s
    };
    let pair = |rho: &Field<T>, t: T| -> T {
        mu * alpha(t) * rho.values().iter().zip(phi.values()).map(|(r, f)| *r * *f).sum()
    };

    let start = pair(&p.initial, T::zero());
    let half: T = real(0.5);
    let mut integral = T::zero();
    let mut prev = bulk(&traj[0], times[0]) - boundary(&traj[0], times[0]);
    let mut out = Vec::with_capacity(times.len());
    out.push(pair(&traj[0], times[0]) - start);
    for k in 1..times.len() {
        let cur = bulk(&traj[k], times[k]) - boundary(&traj[k], times[k]);
        integral += half * (times[k] - times[k - 1]) * (prev + cur);
        prev = cur;
        out.push(pair(&traj[k], times[k]) - start - integral);
    }
    Ok(out)
}

/// `Θ` at the last grid time.
pub fn weak_residual<T: Real>(
    g: &GasketGraph,
    p: &HeatProblem<T>,
    times: &[T],
    traj: &[Field<T>],
    test: &TestFunction<T>,
) -> Result<T> {
    Ok(*weak_residual_path(g, p, times, traj, test)?.last().expect("nonempty"))
}

/// `ℰ_N(ρ(t_k))` along a trajectory, the discrete stand-in for `ρ ∈ L²(0,T,ℱ)`.
pub fn energy_along<T: Real>(g: &GasketGraph, traj: &[Field<T>]) -> Result<Vec<T>> {
    traj.iter().map(|f| energy_quad(g, f)).collect()
}

/// Smallest and largest value reached, for the monitored maximum principle.
pub fn range_along<T: Real>(traj: &[Field<T>]) -> (T, T) {
    traj.iter().flat_map(|f| f.values().iter().copied()).fold(
        (T::infinity(), T::neg_infinity()),
        |(lo, hi), x| (lo.min(x), hi.max(x)),
    )
}

/// Long CSV `t,vertex_id,value`.
pub fn trajectory_csv<T: Real>(times: &[T], traj: &[Field<T>]) -> String {
    let mut out = String::from("t,vertex_id,value\n");
    for (t, f) in times.iter().zip(traj) {
        for (v, x) in f.values().iter().enumerate() {
            out.push_str(&format!("{t},{v},{x}\n"));
        }
    }
    out
}

/// Wide CSV `t,v0,…`.
pub fn trajectory_csv_wide<T: Real>(times: &[T], traj: &[Field<T>]) -> String {
    let n = traj.first().map_or(0, |f| f.len());
    let mut out = String::from("t");
    for v in 0..n {
        out.push_str(&format!(",v{v}"));
    }
    out.push('\n');
    for (t, f) in times.iter().zip(traj) {
        out.push_str(&t.to_string());
        for x in f.values() {
            out.push_str(&format!(",{x}"));
        }
        out.push('\n');
    }
    out
}
