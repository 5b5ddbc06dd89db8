//! Discrete Laplacian, normal derivative, energy, harmonic extension,
//! effective resistance and the Robin Dirichlet-to-Neumann solve.
//!
//! Everything except the resistance metric is exact algebra over [`Arith`],
//! so the identities can be checked on rationals without rounding.

use crate::error::{domain, Error, Result};
use crate::field::Field;
use crate::gasket::{Corner, GasketGraph, LatticePoint, VertexId};
use crate::linalg::{Cholesky, DenseMatrix, DENSE_CAP};
use crate::scalar::{int, powi, real, Arith, Real};

/// `Δ_N f`, defined on `V_N \ V_0` only.
///
/// Corner slots hold zero and report `None` from [`get`](Self::get).
#[derive(Debug, Clone, PartialEq)]
pub struct InteriorField<T> {
    field: Field<T>,
}

impl<T: Arith> InteriorField<T> {
    pub fn get(&self, v: VertexId) -> Option<&T> {
        if v < 3 {
            None
        } else {
            self.field.values().get(v)
        }
    }

    /// The underlying field with corners set to zero.
    pub fn as_field(&self) -> &Field<T> {
        &self.field
    }

    pub fn into_field(self) -> Field<T> {
        self.field
    }
}

/// `5^N`.
pub fn laplacian_scale<T: Arith>(level: u32) -> T {
    powi(int(5), level)
}

/// `(5/3)^N`.
pub fn energy_scale<T: Arith>(level: u32) -> T {
    powi(int::<T>(5) / int(3), level)
}

/// Weight `2/3^(N+1)` per interior vertex that makes `-(3/2)Δ_N` and `∂⊥_N`
/// integrate exactly to `ℰ_N`. It is `1/|V_N|` up to the factor `1 + 3^-N`.
pub fn form_weight<T: Arith>(level: u32) -> T {
    int::<T>(2) / powi(int(3), level + 1)
}

fn neighbor_sum<T: Arith>(g: &GasketGraph, f: &Field<T>, x: VertexId) -> T {
    let fx = f[x].clone();
    g.neighbors(x)
        .iter()
        .fold(T::zero(), |acc, &y| acc + f[y].clone() - fx.clone())
}

/// `(Δ_N f)(x) = 5^N Σ_{y~x} (f(y) - f(x))` at interior vertices.
pub fn laplacian<T: Arith>(g: &GasketGraph, f: &Field<T>) -> Result<InteriorField<T>> {
    f.check_on(g)?;
    let scale: T = laplacian_scale(g.level());
    let field = Field::from_fn(g, |x| {
        if g.is_corner(x) {
            T::zero()
        } else {
            scale.clone() * neighbor_sum(g, f, x)
        }
    });
    Ok(InteriorField { field })
}

/// `(∂⊥_N f)(a) = (5/3)^N Σ_{y~a} (f(a) - f(y))`.
pub fn normal_derivative<T: Arith>(g: &GasketGraph, f: &Field<T>, a: VertexId) -> Result<T> {
    f.check_on(g)?;
    if !g.is_corner(a) {
        return domain(format!("vertex {a} is not a boundary corner"));
    }
    Ok(-(energy_scale::<T>(g.level()) * neighbor_sum(g, f, a)))
}

/// Normal derivatives at `a0, a1, a2`.
pub fn normal_derivatives<T: Arith>(g: &GasketGraph, f: &Field<T>) -> Result<[T; 3]> {
    Ok([
        normal_derivative(g, f, 0)?,
        normal_derivative(g, f, 1)?,
        normal_derivative(g, f, 2)?,
    ])
}

/// `ℰ_N(f, h) = (5/3)^N Σ_{edges} (f(x) - f(y))(h(x) - h(y))`.
pub fn energy<T: Arith>(g: &GasketGraph, f: &Field<T>, h: &Field<T>) -> Result<T> {
    f.check_on(g)?;
    h.check_on(g)?;
    let sum = g.edges().iter().fold(T::zero(), |acc, &(x, y)| {
        acc + (f[x].clone() - f[y].clone()) * (h[x].clone() - h[y].clone())
    });
    Ok(energy_scale::<T>(g.level()) * sum)
}

/// `ℰ_N(f) = ℰ_N(f, f)`.
pub fn energy_quad<T: Arith>(g: &GasketGraph, f: &Field<T>) -> Result<T> {
    energy(g, f, f)
}

/// `ℰ_N(f, h) - [w Σ_int (-(3/2)Δ_N f) h + Σ_a (∂⊥_N f)(a) h(a)]` with the
/// exact weight `w = `[`form_weight`]. Zero up to rounding.
pub fn summation_by_parts_residual<T: Arith>(
    g: &GasketGraph,
    f: &Field<T>,
    h: &Field<T>,
) -> Result<T> {
    let e = energy(g, f, h)?;
    let lap = laplacian(g, f)?;
    let three_halves = int::<T>(3) / int(2);
    let interior = g.interior().fold(T::zero(), |acc, x| {
        acc + -(three_halves.clone() * lap.field[x].clone()) * h[x].clone()
    });
    let boundary = Corner::ALL.iter().try_fold(T::zero(), |acc, c| {
        let a = c.vertex();
        Ok::<T, Error>(acc + normal_derivative(g, f, a)? * h[a].clone())
    })?;
    Ok(e - (form_weight::<T>(g.level()) * interior + boundary))
}

/// Harmonic function with the given corner values, built cell by cell with
/// the 1/5-2/5 rule.
pub fn harmonic_extension<T: Arith>(g: &GasketGraph, boundary: [T; 3]) -> Field<T> {
    let mut values: Vec<Option<T>> = vec![None; g.num_vertices()];
    let side = 1u32 << g.level();
    extend_cell(g, LatticePoint { i: 0, j: 0 }, side, boundary, &mut values);
    Field::new(
        g,
        values.into_iter().map(|v| v.expect("every vertex lies in a cell")).collect(),
    )
    .expect("length matches")
}

fn extend_cell<T: Arith>(
    g: &GasketGraph,
    o: LatticePoint,
    side: u32,
    u: [T; 3],
    out: &mut [Option<T>],
) {
    let pts = [o, LatticePoint { i: o.i + side, j: o.j }, LatticePoint { i: o.i, j: o.j + side }];
    if side == 1 {
        for (p, val) in pts.iter().zip(u) {
            let v = g.vertex_at(*p).expect("cell corner is a vertex");
            out[v] = Some(val);
        }
        return;
    }
    let five = int::<T>(5);
    let two = int::<T>(2);
    let mid = |a: &T, b: &T, c: &T| (two.clone() * a.clone() + two.clone() * b.clone() + c.clone()) / five.clone();
    let m01 = mid(&u[0], &u[1], &u[2]);
    let m02 = mid(&u[0], &u[2], &u[1]);
    let m12 = mid(&u[1], &u[2], &u[0]);
    let h = side / 2;
    let [u0, u1, u2] = u;
    extend_cell(g, o, h, [u0, m01.clone(), m02.clone()], out);
    extend_cell(g, LatticePoint { i: o.i + h, j: o.j }, h, [m01, u1, m12.clone()], out);
    extend_cell(g, LatticePoint { i: o.i, j: o.j + h }, h, [m02, m12, u2], out);
}

/// Solves a 3×3 linear system by Cramer's rule (exact over rationals).
pub fn solve3<T: Arith>(m: &[[T; 3]; 3], rhs: &[T; 3]) -> Result<[T; 3]> {
    let det3 = |a: &[[T; 3]; 3]| {
        a[0][0].clone() * (a[1][1].clone() * a[2][2].clone() - a[1][2].clone() * a[2][1].clone())
            - a[0][1].clone() * (a[1][0].clone() * a[2][2].clone() - a[1][2].clone() * a[2][0].clone())
            + a[0][2].clone() * (a[1][0].clone() * a[2][1].clone() - a[1][1].clone() * a[2][0].clone())
    };
    let d = det3(m);
    if d == T::zero() {
        return Err(Error::Singular("3x3 corner system has zero determinant".into()));
    }
    let col = |k: usize| {
        let mut a = m.clone();
        for r in 0..3 {
            a[r][k] = rhs[r].clone();
        }
        det3(&a) / d.clone()
    };
    Ok([col(0), col(1), col(2)])
}

/// Robin corner data `∂⊥h(a) + κ(a) h(a) = γ(a)` for a harmonic `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct RobinCoefficients<T> {
    pub kappa: [T; 3],
    pub gamma: [T; 3],
}

impl<T: Arith> RobinCoefficients<T> {
    pub fn new(kappa: [T; 3], gamma: [T; 3]) -> Result<Self> {
        if kappa.iter().any(|k| *k < T::zero()) {
            return domain("Robin coefficients κ must be nonnegative");
        }
        Ok(RobinCoefficients { kappa, gamma })
    }

    /// `𝚫 = 3Σκ + 2Σκκ' + κ0κ1κ2`.
    pub fn determinant(&self) -> T {
        let [k0, k1, k2] = self.kappa.clone();
        int::<T>(3) * (k0.clone() + k1.clone() + k2.clone())
            + int::<T>(2) * (k0.clone() * k1.clone() + k0.clone() * k2.clone() + k1.clone() * k2.clone())
            + k0 * k1 * k2
    }

    pub fn matrix(&self) -> [[T; 3]; 3] {
        let m1 = -T::one();
        let d = |j: usize| int::<T>(2) + self.kappa[j].clone();
        [
            [d(0), m1.clone(), m1.clone()],
            [m1.clone(), d(1), m1.clone()],
            [m1.clone(), m1, d(2)],
        ]
    }
}

/// Corner values `c` with `(2 + κ_j) c_j - Σ_{i≠j} c_i = γ_j`.
pub fn dtn_robin_solve<T: Arith>(rc: &RobinCoefficients<T>) -> Result<[T; 3]> {
    if rc.determinant() == T::zero() {
        return Err(Error::Singular(
            "Robin system is singular (all κ vanish: pure Neumann)".into(),
        ));
    }
    solve3(&rc.matrix(), &rc.gamma)
}

fn unit_laplacian<T: Real>(g: &GasketGraph) -> DenseMatrix<T> {
    let n = g.num_vertices();
    let mut l = DenseMatrix::zeros(n);
    for &(x, y) in g.edges() {
        l[(x, x)] += T::one();
        l[(y, y)] += T::one();
        l[(x, y)] -= T::one();
        l[(y, x)] -= T::one();
    }
    l
}

fn grounded<T: Real>(l: &DenseMatrix<T>, ground: usize) -> DenseMatrix<T> {
    let keep: Vec<usize> = (0..l.dim()).filter(|&v| v != ground).collect();
    let mut m = DenseMatrix::zeros(keep.len());
    for (r, &i) in keep.iter().enumerate() {
        for (c, &j) in keep.iter().enumerate() {
            m[(r, c)] = l[(i, j)];
        }
    }
    m
}

fn check_dense<T>(g: &GasketGraph) -> Result<()> {
    if g.num_vertices() > DENSE_CAP {
        return Err(Error::Capacity(format!(
            "{} vertices exceed the dense cap {DENSE_CAP}",
            g.num_vertices()
        )));
    }
    Ok(())
}

/// `R_eff(x, y)` for unit edge conductances, by one grounded Kirchhoff solve.
pub fn effective_resistance<T: Real>(g: &GasketGraph, x: VertexId, y: VertexId) -> Result<T> {
    if x == y {
        return domain("effective resistance needs two distinct vertices");
    }
    if x >= g.num_vertices() || y >= g.num_vertices() {
        return domain("vertex out of range");
    }
    check_dense::<T>(g)?;
    let l = grounded(&unit_laplacian::<T>(g), y);
    let ch = Cholesky::factor(&l, real(1e-12))?;
    let xi = if x > y { x - 1 } else { x };
    let mut rhs = vec![T::zero(); l.dim()];
    rhs[xi] = T::one();
    Ok(ch.solve(&rhs)[xi])
}

/// All pairwise effective resistances from one Green matrix grounded at `a0`.
#[derive(Debug, Clone)]
pub struct ResistanceMetric<T> {
    green: DenseMatrix<T>,
}

impl<T: Real> ResistanceMetric<T> {
    pub fn new(g: &GasketGraph) -> Result<Self> {
        check_dense::<T>(g)?;
        let n = g.num_vertices();
        let inv = Cholesky::factor(&grounded(&unit_laplacian::<T>(g), 0), real(1e-12))?.inverse();
        let mut green = DenseMatrix::zeros(n);
        for i in 1..n {
            for j in 1..n {
                green[(i, j)] = inv[(i - 1, j - 1)];
            }
        }
        Ok(ResistanceMetric { green })
    }

    pub fn resistance(&self, x: VertexId, y: VertexId) -> T {
        self.green[(x, x)] + self.green[(y, y)] - self.green[(x, y)] - self.green[(y, x)]
    }

    /// `max_{z ∈ K_w(a) ∩ V_N} R(z, a)` for the depth-`j` cell at corner `a`.
    pub fn corner_cell_diameter(&self, g: &GasketGraph, corner: Corner, depth: u32) -> Result<T> {
        let a = corner.vertex();
        let cell = g.cell_vertices(&g.corner_cell(corner, depth))?;
        Ok(cell.iter().fold(T::zero(), |m, &z| m.max(self.resistance(z, a))))
    }
}

/// Ratio `max_{z} R(z, a) / (5/3)^(N-j)` maximized over corners and depths
/// `0..=N`: the smallest `C` for which the cell-diameter bound holds at this level.
pub fn fitted_cell_constant<T: Real>(g: &GasketGraph) -> Result<T> {
    let metric = ResistanceMetric::<T>::new(g)?;
    let n = g.level();
    let mut c = T::zero();
    for corner in Corner::ALL {
        for j in 0..=n {
            let diam = metric.corner_cell_diameter(g, corner, j)?;
            let scale = energy_scale::<T>(n - j);
            c = c.max(diam / scale);
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    type Q = Ratio<i64>;

    fn q(n: i64, d: i64) -> Q {
        Ratio::new(n, d)
    }

    #[test]
    fn laplacian_of_midpoint_indicator() {
        let g = GasketGraph::build(1).unwrap();
        let m01 = g.vertex_at(LatticePoint { i: 1, j: 0 }).unwrap();
        let m02 = g.vertex_at(LatticePoint { i: 0, j: 1 }).unwrap();
        let f = Field::<Q>::indicator(&g, m01);
        let lap = laplacian(&g, &f).unwrap();
        assert_eq!(lap.get(m01), Some(&q(-20, 1)));
        assert_eq!(lap.get(m02), Some(&q(5, 1)));
        assert_eq!(lap.get(0), None);
    }

    #[test]
    fn harmonic_extension_level_one() {
        let g = GasketGraph::build(1).unwrap();
        let h = harmonic_extension(&g, [q(1, 1), q(0, 1), q(0, 1)]);
        let at = |i, j| h[g.vertex_at(LatticePoint { i, j }).unwrap()];
        assert_eq!(at(1, 0), q(2, 5));
        assert_eq!(at(0, 1), q(2, 5));
        assert_eq!(at(1, 1), q(1, 5));
        assert_eq!(normal_derivatives(&g, &h).unwrap(), [q(2, 1), q(-1, 1), q(-1, 1)]);
    }

    #[test]
    fn harmonic_energy_is_level_independent() {
        for n in 0..=5 {
            let g = GasketGraph::build(n).unwrap();
            let h = harmonic_extension(&g, [q(1, 1), q(0, 1), q(0, 1)]);
            assert_eq!(energy_quad(&g, &h).unwrap(), q(2, 1));
            assert!(laplacian(&g, &h).unwrap().as_field().values().iter().all(|v| *v == q(0, 1)));
            assert_eq!(summation_by_parts_residual(&g, &h, &h).unwrap(), q(0, 1));
        }
    }

    #[test]
    fn sbp_exact_on_rationals() {
        let g = GasketGraph::build(2).unwrap();
        let f = Field::from_fn(&g, |v| q((v * v % 7) as i64, 3));
        let h = Field::from_fn(&g, |v| q(v as i64 - 4, 5));
        assert_eq!(summation_by_parts_residual(&g, &f, &h).unwrap(), q(0, 1));
    }

    #[test]
    fn robin_solve_examples() {
        let rc = RobinCoefficients::new([q(1, 1); 3], [q(1, 1), q(0, 1), q(0, 1)]).unwrap();
        assert_eq!(dtn_robin_solve(&rc).unwrap(), [q(1, 2), q(1, 4), q(1, 4)]);
        let zero = RobinCoefficients::new([q(0, 1); 3], [q(1, 1); 3]).unwrap();
        assert!(matches!(dtn_robin_solve(&zero), Err(Error::Singular(_))));
        assert!(RobinCoefficients::new([q(-1, 1), q(0, 1), q(0, 1)], [q(0, 1); 3]).is_err());
    }

    #[test]
    fn corner_resistance_scaling() {
        for n in 0..=4 {
            let g = GasketGraph::build(n).unwrap();
            let r: f64 = effective_resistance(&g, 0, 1).unwrap();
            let want = 2.0 / 3.0 * (5.0f64 / 3.0).powi(n as i32);
            assert!((r - want).abs() < 1e-9, "N={n}: {r} vs {want}");
            let m = ResistanceMetric::<f64>::new(&g).unwrap();
            assert!((m.resistance(1, 0) - want).abs() < 1e-9);
        }
        let g = GasketGraph::build(1).unwrap();
        assert!(effective_resistance::<f64>(&g, 2, 2).is_err());
    }

    #[test]
    fn normal_derivative_rejects_interior() {
        let g = GasketGraph::build(1).unwrap();
        let f = Field::<f64>::zeros(&g);
        assert!(normal_derivative(&g, &f, 4).is_err());
    }
}
