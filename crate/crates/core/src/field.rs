//! Real-valued functions on `V_N`, indexed in canonical vertex order.

use std::fmt::Display;
use std::ops::{Index, IndexMut};
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::gasket::{GasketGraph, VertexId};
use crate::scalar::{int, Arith, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct Field<T> {
    level: u32,
    values: Vec<T>,
}

impl<T: Arith> Field<T> {
    pub fn new(g: &GasketGraph, values: Vec<T>) -> Result<Self> {
        if values.len() != g.num_vertices() {
            return domain(format!(
                "field has {} values but level {} has {} vertices",
                values.len(),
                g.level(),
                g.num_vertices()
            ));
        }
        Ok(Field { level: g.level(), values })
    }

    pub(crate) fn from_values_unchecked(level: u32, values: Vec<T>) -> Self {
        Field { level, values }
    }

    pub fn from_fn(g: &GasketGraph, f: impl FnMut(VertexId) -> T) -> Self {
        Field { level: g.level(), values: (0..g.num_vertices()).map(f).collect() }
    }

    pub fn constant(g: &GasketGraph, c: T) -> Self {
        Field { level: g.level(), values: vec![c; g.num_vertices()] }
    }

    pub fn zeros(g: &GasketGraph) -> Self {
        Self::constant(g, T::zero())
    }

    /// Indicator of a single vertex.
    pub fn indicator(g: &GasketGraph, v: VertexId) -> Self {
        Self::from_fn(g, |x| if x == v { T::one() } else { T::zero() })
    }

    #[inline]
    pub fn level(&self) -> u32 {
        self.level
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    /// Fails unless the field lives on `g`.
    pub fn check_on(&self, g: &GasketGraph) -> Result<()> {
        if self.level != g.level() || self.values.len() != g.num_vertices() {
            return domain(format!(
                "field of level {} does not live on the level-{} graph",
                self.level,
                g.level()
            ));
        }
        Ok(())
    }

    pub(crate) fn check_same(&self, other: &Field<T>) -> Result<()> {
        if self.level != other.level || self.values.len() != other.values.len() {
            return domain(format!("field levels differ: {} vs {}", self.level, other.level));
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(&T) -> T) -> Self {
        Field { level: self.level, values: self.values.iter().map(f).collect() }
    }

    pub fn zip_with(&self, other: &Field<T>, f: impl Fn(&T, &T) -> T) -> Result<Self> {
        self.check_same(other)?;
        Ok(Field {
            level: self.level,
            values: self.values.iter().zip(&other.values).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &Field<T>) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Field<T>) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() - b.clone())
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|a| a.clone() * c.clone())
    }

    /// `Σ_x f(x) g(x)` without measure weight.
    pub fn dot(&self, other: &Field<T>) -> Result<T> {
        self.check_same(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone()))
    }

    /// `⟨f, g⟩_{m_N} = |V_N|^{-1} Σ f g`.
    pub fn inner(&self, other: &Field<T>) -> Result<T> {
        Ok(self.dot(other)? / int(self.values.len() as i64))
    }

    /// `(1/|V_N|) Σ f`.
    pub fn mean(&self) -> T {
        self.values.iter().fold(T::zero(), |acc, a| acc + a.clone()) / int(self.values.len() as i64)
    }
}

impl<T: Real> Field<T> {
    /// `m_N`-norm.
    pub fn norm(&self) -> T {
        self.inner(self).expect("same field").sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Field<T>) -> Result<T> {
        self.check_same(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs())))
    }

    pub fn cast<U: Real>(&self) -> Field<U> {
        Field {
            level: self.level,
            values: self.values.iter().map(|v| U::from(*v).expect("finite value")).collect(),
        }
    }
}

impl<T> Index<VertexId> for Field<T> {
    type Output = T;
    #[inline]
    fn index(&self, v: VertexId) -> &T {
        &self.values[v]
    }
}

impl<T> IndexMut<VertexId> for Field<T> {
    #[inline]
    fn index_mut(&mut self, v: VertexId) -> &mut T {
        &mut self.values[v]
    }
}

impl<T: Arith + Display> Field<T> {
    /// `vertex_id,value` lines with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("vertex_id,value\n");
        for (v, x) in self.values.iter().enumerate() {
            out.push_str(&format!("{v},{x}\n"));
        }
        out
    }
}

impl<T: Arith + FromStr> Field<T> {
    /// Parses the CSV written by [`to_csv`](Self::to_csv); every vertex must appear once.
    pub fn from_csv(g: &GasketGraph, text: &str) -> Result<Self> {
        let mut slots: Vec<Option<T>> = vec![None; g.num_vertices()];
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line.starts_with("vertex_id")) {
                continue;
            }
            let (id, val) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("line {}: expected `id,value`", lineno + 1)))?;
            let id: usize = id
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad vertex id", lineno + 1)))?;
            let val: T = val
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad value", lineno + 1)))?;
            let slot = slots
                .get_mut(id)
                .ok_or_else(|| Error::Parse(format!("line {}: vertex {id} out of range", lineno + 1)))?;
            if slot.replace(val).is_some() {
                return Err(Error::Parse(format!("vertex {id} listed twice")));
            }
        }
        let values = slots
            .into_iter()
            .enumerate()
            .map(|(v, s)| s.ok_or_else(|| Error::Parse(format!("vertex {v} missing"))))
            .collect::<Result<Vec<T>>>()?;
        Field::new(g, values)
    }
}

impl Field<f64> {
    /// JSON array in canonical vertex order.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.values)?)
    }

    pub fn from_json(g: &GasketGraph, text: &str) -> Result<Self> {
        let values: Vec<f64> = serde_json::from_str(text)?;
        Field::new(g, values)
    }
}
