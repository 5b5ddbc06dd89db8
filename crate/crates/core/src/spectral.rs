//! Boundary-conditioned Laplacians, their dense spectra, Weyl counting and
//! the heat semigroup.
//!
//! Convention: `H_N` approximates `-Δ` with the chosen corner conditions and
//! its eigenvalues approximate continuum eigenvalues. The factor `2/3` that
//! turns `H_b` into the generator of the macroscopic heat flow is applied in
//! [`Spectrum::semigroup_apply`] and nowhere else.

use serde::{Deserialize, Serialize};

use crate::calculus::laplacian_scale;
use crate::error::{domain, Error, Result};
use crate::field::Field;
use crate::gasket::{GasketGraph, VertexId};
use crate::linalg::{symmetric_eigen, DenseMatrix, DENSE_CAP};
use crate::scalar::{powi, real, Real};
use crate::stats::ls_slope;

/// Condition imposed at one boundary corner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "coefficient", rename_all = "lowercase")]
pub enum CornerCondition<T> {
    Dirichlet,
    Neumann,
    /// `∂⊥f(a) + r f(a) = 0`, `r > 0`.
    Robin(T),
}

impl<T> CornerCondition<T> {
    pub fn label(&self) -> &'static str {
        match self {
            CornerCondition::Dirichlet => "dirichlet",
            CornerCondition::Neumann => "neumann",
            CornerCondition::Robin(_) => "robin",
        }
    }
}

/// Corner conditions at `a0, a1, a2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCondition<T> {
    pub corners: [CornerCondition<T>; 3],
}

impl<T: Real> BoundaryCondition<T> {
    pub fn dirichlet() -> Self {
        BoundaryCondition { corners: [CornerCondition::Dirichlet; 3] }
    }

    pub fn neumann() -> Self {
        BoundaryCondition { corners: [CornerCondition::Neumann; 3] }
    }

    pub fn robin(r: [T; 3]) -> Result<Self> {
        Self::mixed(r.map(CornerCondition::Robin))
    }

    pub fn mixed(corners: [CornerCondition<T>; 3]) -> Result<Self> {
        let bc = BoundaryCondition { corners };
        bc.validate()?;
        Ok(bc)
    }

    pub fn validate(&self) -> Result<()> {
        for (k, c) in self.corners.iter().enumerate() {
            if let CornerCondition::Robin(r) = c {
                if !(*r > T::zero()) || !r.is_finite() {
                    return domain(format!("Robin coefficient at a{k} must be positive, got {r}"));
                }
            }
        }
        Ok(())
    }

    pub fn is_pure_neumann(&self) -> bool {
        self.corners.iter().all(|c| matches!(c, CornerCondition::Neumann))
    }

    pub fn is_dirichlet_at(&self, k: usize) -> bool {
        matches!(self.corners[k], CornerCondition::Dirichlet)
    }

    /// True when the conditions at `a1` and `a2` agree, so the mirror
    /// `a1 <-> a2` commutes with `H_N`.
    pub fn is_mirror_symmetric(&self) -> bool {
        self.corners[1] == self.corners[2]
    }

    /// Short description such as `dirichlet` or `dirichlet/neumann/neumann`.
    pub fn label(&self) -> String {
        let l: Vec<&str> = self.corners.iter().map(|c| c.label()).collect();
        if l.iter().all(|x| *x == l[0]) {
            l[0].to_string()
        } else {
            l.join("/")
        }
    }
}

/// Assembled `H_N` on the retained degrees of freedom.
#[derive(Debug, Clone)]
pub struct Operator<T> {
    level: u32,
    num_vertices: usize,
    bc: BoundaryCondition<T>,
    dofs: Vec<VertexId>,
    matrix: DenseMatrix<T>,
}

impl<T: Real> Operator<T> {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn bc(&self) -> &BoundaryCondition<T> {
        &self.bc
    }

    /// Vertices kept after Dirichlet elimination, in canonical order.
    pub fn dofs(&self) -> &[VertexId] {
        &self.dofs
    }

    pub fn matrix(&self) -> &DenseMatrix<T> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.dofs.len()
    }

    /// `H_N f`; eliminated corners read as zero and are returned as zero.
    pub fn apply(&self, f: &Field<T>) -> Result<Field<T>> {
        if f.len() != self.num_vertices {
            return domain("field does not live on the operator's graph");
        }
        let x: Vec<T> = self.dofs.iter().map(|&v| f[v]).collect();
        let y = self.matrix.mul_vec(&x);
        let mut out = vec![T::zero(); self.num_vertices];
        for (k, &v) in self.dofs.iter().enumerate() {
            out[v] = y[k];
        }
        Ok(Field::from_values_unchecked(self.level, out))
    }
}

/// Assembles `H_N` with `⟨H_N f, g⟩ = ℰ_N(f, g) + Σ_{Robin} r(a) f(a) g(a)`
/// under the vertex weight `2/3^(N+1)`.
///
/// Interior rows are `-(3/2)Δ_N`; Neumann and Robin corner rows are
/// `(3/2)3^N [∂⊥_N f(a) + r(a) f(a)]`; Dirichlet corners are removed.
pub fn assemble<T: Real>(g: &GasketGraph, bc: &BoundaryCondition<T>) -> Result<Operator<T>> {
    bc.validate()?;
    let n = g.num_vertices();
    let dofs: Vec<VertexId> = (0..n).filter(|&v| !(v < 3 && bc.is_dirichlet_at(v))).collect();
    let mut position = vec![None; n];
    for (k, &v) in dofs.iter().enumerate() {
        position[v] = Some(k);
    }
    let half: T = real(1.5);
    let bulk = half * laplacian_scale::<T>(g.level());
    let boundary = half * powi(real::<T>(3.0), g.level());
    let mut m = DenseMatrix::zeros(dofs.len());
    for &(x, y) in g.edges() {
        let (px, py) = (position[x], position[y]);
        if let Some(i) = px {
            m[(i, i)] += bulk;
        }
        if let Some(j) = py {
            m[(j, j)] += bulk;
        }
        if let (Some(i), Some(j)) = (px, py) {
            m[(i, j)] -= bulk;
            m[(j, i)] -= bulk;
        }
    }
    for (k, c) in bc.corners.iter().enumerate() {
        if let (CornerCondition::Robin(r), Some(i)) = (c, position[k]) {
            m[(i, i)] += boundary * *r;
        }
    }
    Ok(Operator { level: g.level(), num_vertices: n, bc: *bc, dofs, matrix: m })
}

/// Ordered eigenpairs of `H_N`, eigenvectors orthonormal in `m_N`.
#[derive(Debug, Clone)]
pub struct Spectrum<T> {
    level: u32,
    bc: BoundaryCondition<T>,
    eigenvalues: Vec<T>,
    eigenvectors: Vec<Field<T>>,
}

/// Full dense eigendecomposition.
///
/// Within a degenerate cluster the basis is made canonical: when the mirror
/// `a1 <-> a2` is a symmetry it is diagonalized first (even vectors before
/// odd ones), and every vector's largest entry is made positive.
pub fn eigendecompose<T: Real>(g: &GasketGraph, op: &Operator<T>) -> Result<Spectrum<T>> {
    if g.num_vertices() > DENSE_CAP {
        return Err(Error::Capacity(format!(
            "|V_N| = {} exceeds the dense eigensolver cap {DENSE_CAP}",
            g.num_vertices()
        )));
    }
    if g.level() != op.level {
        return domain("operator and graph levels differ");
    }
    let eig = symmetric_eigen(op.matrix())?;
    let n = g.num_vertices();
    let lift = real::<T>(n as f64).sqrt();
    let mut vectors: Vec<Vec<T>> = (0..op.dim())
        .map(|k| {
            let mut full = vec![T::zero(); n];
            for (i, &v) in op.dofs.iter().enumerate() {
                full[v] = eig.vectors.row(k)[i] * lift;
            }
            full
        })
        .collect();
    let mut values = eig.values;
    let top = values.last().copied().unwrap_or(T::zero()).abs().max(T::one());
    let cluster_tol = top * real(1e-8);
    for v in values.iter_mut() {
        if *v < T::zero() && v.abs() <= cluster_tol {
            *v = T::zero();
        }
    }

    let mirror = g.mirror();
    let mut start = 0;
    while start < values.len() {
        let mut end = start + 1;
        while end < values.len() && values[end] - values[end - 1] <= cluster_tol {
            end += 1;
        }
        if end - start > 1 && op.bc.is_mirror_symmetric() {
            canonicalize_cluster(&mut vectors[start..end], &mirror);
        }
        start = end;
    }
    for v in vectors.iter_mut() {
        fix_sign(v);
    }
    Ok(Spectrum {
        level: g.level(),
        bc: op.bc,
        eigenvalues: values,
        eigenvectors: vectors
            .into_iter()
            .map(|v| Field::from_values_unchecked(g.level(), v))
            .collect(),
    })
}

fn canonicalize_cluster<T: Real>(cluster: &mut [Vec<T>], mirror: &[VertexId]) {
    let k = cluster.len();
    let mut m = DenseMatrix::<T>::zeros(k);
    for i in 0..k {
        for j in 0..k {
            m[(i, j)] = cluster[i]
                .iter()
                .enumerate()
                .map(|(x, a)| *a * cluster[j][mirror[x]])
                .sum();
        }
    }
    let Ok(eig) = symmetric_eigen(&m) else { return };
    // Eigenvalues ascend from -1 (odd) to +1 (even); emit even first.
    let rotated: Vec<Vec<T>> = (0..k)
        .rev()
        .map(|r| {
            let c = eig.vectors.row(r);
            let mut out = vec![T::zero(); cluster[0].len()];
            for (j, cj) in c.iter().enumerate() {
                for (o, x) in out.iter_mut().zip(&cluster[j]) {
                    *o += *cj * *x;
                }
            }
            out
        })
        .collect();
    for (dst, src) in cluster.iter_mut().zip(rotated) {
        *dst = src;
    }
}

fn fix_sign<T: Real>(v: &mut [T]) {
    let big = v.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    let tie = big * (T::one() - real(1e-9));
    if let Some(first) = v.iter().find(|x| x.abs() >= tie) {
        if *first < T::zero() {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// `d/(d+1)` with `d = log 3 / log(5/3)`.
pub fn weyl_exponent() -> f64 {
    let d = 3f64.ln() / (5f64 / 3.0).ln();
    d / (d + 1.0)
}

impl<T: Real> Spectrum<T> {
    /// Assemble and decompose in one step.
    pub fn compute(g: &GasketGraph, bc: &BoundaryCondition<T>) -> Result<Self> {
        eigendecompose(g, &assemble(g, bc)?)
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn bc(&self) -> &BoundaryCondition<T> {
        &self.bc
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &[Field<T>] {
        &self.eigenvectors
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `φ_n`, 1-based as in the text.
    pub fn eigenfunction(&self, n: usize) -> Result<&Field<T>> {
        if n == 0 || n > self.len() {
            return domain(format!("eigenfunction index {n} outside 1..={}", self.len()));
        }
        Ok(&self.eigenvectors[n - 1])
    }

    pub fn eigenvalue(&self, n: usize) -> Result<T> {
        self.eigenfunction(n)?;
        Ok(self.eigenvalues[n - 1])
    }

    fn check_field(&self, f: &Field<T>) -> Result<()> {
        if f.level() != self.level {
            return domain(format!(
                "field of level {} used with a level-{} spectrum",
                f.level(),
                self.level
            ));
        }
        Ok(())
    }

    /// `#{n : λ_n ≤ s}`.
    pub fn counting_function(&self, s: T) -> usize {
        self.eigenvalues.partition_point(|l| *l <= s)
    }

    /// Least-squares slope of `log #(s)` against `log s`, sampled at the
    /// distinct eigenvalues lying in the middle half of the log-eigenvalue range.
    pub fn weyl_slope(&self) -> Result<f64> {
        let pos: Vec<f64> = self
            .eigenvalues
            .iter()
            .filter_map(|l| l.to_f64())
            .filter(|l| *l > 0.0)
            .collect();
        if pos.len() < 10 {
            return Err(Error::InsufficientData(format!(
                "Weyl fit needs at least 10 positive eigenvalues, have {}",
                pos.len()
            )));
        }
        let lo = pos[0].ln();
        let hi = pos[pos.len() - 1].ln();
        let (a, b) = (lo + 0.25 * (hi - lo), lo + 0.75 * (hi - lo));
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (k, l) in pos.iter().enumerate() {
            let distinct_top = k + 1 == pos.len() || (pos[k + 1] - l) > 1e-8 * l;
            let x = l.ln();
            if distinct_top && x >= a && x <= b {
                xs.push(x);
                ys.push((self.counting_function(T::from(*l).unwrap()) as f64).ln());
            }
        }
        if xs.len() < 3 {
            return Err(Error::InsufficientData("too few distinct eigenvalues in the fit window".into()));
        }
        Ok(ls_slope(&xs, &ys))
    }

    /// `T̃_t f = Σ ⟨f, φ_n⟩ e^{-(2/3) λ_n t} φ_n`.
    pub fn semigroup_apply(&self, f: &Field<T>, t: T) -> Result<Field<T>> {
        self.check_field(f)?;
        if t < T::zero() {
            return domain(format!("semigroup time must be nonnegative, got {t}"));
        }
        let two_thirds: T = real(2.0 / 3.0);
        let mut out = vec![T::zero(); f.len()];
        for (lam, phi) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let alpha = f.inner(phi)? * (-two_thirds * *lam * t).exp();
            for (o, p) in out.iter_mut().zip(phi.values()) {
                *o += alpha * *p;
            }
        }
        Ok(Field::from_values_unchecked(self.level, out))
    }

    /// Coefficients `⟨f, φ_n⟩_{m_N}`.
    pub fn coefficients(&self, f: &Field<T>) -> Result<Vec<T>> {
        self.check_field(f)?;
        self.eigenvectors.iter().map(|phi| f.inner(phi)).collect()
    }

    /// `p_t(x, y) = Σ e^{-λ_n t} φ_n(x) φ_n(y)`.
    pub fn heat_kernel(&self, t: T, x: VertexId, y: VertexId) -> Result<T> {
        if t <= T::zero() {
            return domain(format!("heat kernel needs t > 0, got {t}"));
        }
        let n = self.eigenvectors.first().map_or(0, |f| f.len());
        if x >= n || y >= n {
            return domain("vertex out of range");
        }
        Ok(self
            .eigenvalues
            .iter()
            .zip(&self.eigenvectors)
            .map(|(l, phi)| (-*l * t).exp() * phi[x] * phi[y])
            .sum())
    }

    /// `max_n ‖H φ_n - λ_n φ_n‖_∞`.
    pub fn max_residual(&self, op: &Operator<T>) -> Result<T> {
        let mut worst = T::zero();
        for (l, phi) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let h = op.apply(phi)?;
            for v in op.dofs() {
                worst = worst.max((h[*v] - *l * phi[*v]).abs());
            }
        }
        Ok(worst)
    }

    /// `n,lambda` lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,lambda\n");
        for (k, l) in self.eigenvalues.iter().enumerate() {
            out.push_str(&format!("{},{}\n", k + 1, l));
        }
        out
    }

    /// `s,count` at each distinct eigenvalue.
    pub fn counting_csv(&self) -> String {
        let mut out = String::from("s,count\n");
        for (k, l) in self.eigenvalues.iter().enumerate() {
            if k + 1 == self.len() || self.eigenvalues[k + 1] > *l {
                out.push_str(&format!("{},{}\n", l, k + 1));
            }
        }
        out
    }

    pub fn to_json(&self, with_vectors: bool) -> Result<String> {
        let export = SpectrumExport {
            level: self.level,
            bc: self.bc.label(),
            eigenvalues: self.eigenvalues.iter().map(|l| l.to_f64().unwrap_or(f64::NAN)).collect(),
            eigenvectors: with_vectors.then(|| {
                self.eigenvectors
                    .iter()
                    .map(|f| f.values().iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect())
                    .collect()
            }),
        };
        Ok(serde_json::to_string(&export)?)
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SpectrumExport {
    pub level: u32,
    pub bc: String,
    pub eigenvalues: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigenvectors: Option<Vec<Vec<f64>>>,
}
