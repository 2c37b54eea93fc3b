//! Multiplet-valued fields on the lattice.

use std::ops::{Index, IndexMut};

/// Values indexed by (time row, spatial site, component), stored row-major
/// with the component fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldConfig {
    nt: usize,
    nx: usize,
    p: usize,
    data: Vec<f64>,
}

impl FieldConfig {
    pub fn zeros(nt: usize, nx: usize, p: usize) -> Self {
        FieldConfig { nt, nx, p, data: vec![0.0; nt * nx * p] }
    }

    pub fn from_fn(nt: usize, nx: usize, p: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(nt * nx * p);
        for n in 0..nt {
            for x in 0..nx {
                for c in 0..p {
                    data.push(f(n, x, c));
                }
            }
        }
        FieldConfig { nt, nx, p, data }
    }

    pub fn from_vec(nt: usize, nx: usize, p: usize, data: Vec<f64>) -> Option<Self> {
        (data.len() == nt * nx * p).then_some(FieldConfig { nt, nx, p, data })
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.nt, self.nx, self.p)
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn components(&self) -> usize {
        self.p
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn idx(&self, n: usize, x: usize, c: usize) -> usize {
        (n * self.nx + x) * self.p + c
    }

    /// Values of one time row, all sites and components.
    pub fn row(&self, n: usize) -> &[f64] {
        let w = self.nx * self.p;
        &self.data[n * w..(n + 1) * w]
    }

    pub fn row_mut(&mut self, n: usize) -> &mut [f64] {
        let w = self.nx * self.p;
        &mut self.data[n * w..(n + 1) * w]
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Self {
        FieldConfig { nt: self.nt, nx: self.nx, p: self.p, data: self.data.iter().map(|v| v * s).collect() }
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &Self) -> Self {
        self.zip(other, |a, b| a + s * b)
    }

    fn zip(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.shape(), other.shape(), "field shapes differ");
        FieldConfig {
            nt: self.nt,
            nx: self.nx,
            p: self.p,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    /// Pointwise product with a per-row weight.
    pub fn scale_rows(&self, w: &[f64]) -> Self {
        let mut out = self.clone();
        let width = self.nx * self.p;
        for (n, chunk) in out.data.chunks_mut(width).enumerate() {
            for v in chunk {
                *v *= w[n];
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| *v == 0.0)
    }

    /// Site mask of values above `rel * max_abs` in any component.
    pub fn support_mask(&self, rel: f64) -> Vec<bool> {
        let cut = rel * self.max_abs();
        let mut mask = vec![false; self.nt * self.nx];
        if self.max_abs() == 0.0 {
            return mask;
        }
        for (s, chunk) in self.data.chunks(self.p).enumerate() {
            mask[s] = chunk.iter().any(|v| v.abs() > cut);
        }
        mask
    }

    /// First and last rows carrying a nonzero value.
    pub fn row_support(&self) -> Option<(usize, usize)> {
        let rows: Vec<usize> = (0..self.nt).filter(|&n| self.row(n).iter().any(|v| *v != 0.0)).collect();
        Some((*rows.first()?, *rows.last()?))
    }

    /// Keep components in `range`, zero the rest.
    pub fn project_components(&self, range: std::ops::Range<usize>) -> Self {
        let mut out = self.clone();
        for (k, v) in out.data.iter_mut().enumerate() {
            if !range.contains(&(k % self.p)) {
                *v = 0.0;
            }
        }
        out
    }
}

impl Index<(usize, usize, usize)> for FieldConfig {
    type Output = f64;
    fn index(&self, (n, x, c): (usize, usize, usize)) -> &f64 {
        &self.data[self.idx(n, x, c)]
    }
}

impl IndexMut<(usize, usize, usize)> for FieldConfig {
    fn index_mut(&mut self, (n, x, c): (usize, usize, usize)) -> &mut f64 {
        let i = self.idx(n, x, c);
        &mut self.data[i]
    }
}
