//! Lattice spacetimes on a spatial circle with an explicit second-order
//! Klein-Gordon discretization and its retarded and advanced inverses.
//!
//! Signature is (+,-): `g_tt > 0`, `g_xx < 0`. The operator at row `n` is
//!
//! ```text
//! KG φ = |g|^{-1/2} [ Δt⁺(A Δt⁻ φ)/dt² + Δx⁺(B Δx⁻ φ)/dx² ] + m² φ
//! ```
//!
//! with `A = √|g| g^tt` averaged onto time links and `B = √|g| g^xx` averaged
//! onto space links. It is defined on rows `1..nt-1`; rows `0` and `nt-1`
//! of its output are zero. `vol · KG` is a symmetric matrix, which makes the
//! discrete Green's operators mutually adjoint.

use std::hash::{Hash, Hasher};

use crate::error::{LatticeError, Result};
use crate::field::FieldConfig;

/// Grid sizes and scalar parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeGeometry {
    pub nt: usize,
    pub nx: usize,
    pub dt: f64,
    pub dx: f64,
    pub mass: f64,
    pub p: usize,
    pub margin: usize,
}

impl LatticeGeometry {
    /// Unit circle in space, `dt = courant * dx`, time extent `nt * dt`.
    pub fn unit_circle(nx: usize, nt: usize, courant: f64, mass: f64, p: usize) -> Self {
        let dx = 1.0 / nx as f64;
        LatticeGeometry { nt, nx, dt: courant * dx, dx, mass, p, margin: 2 }
    }

    pub fn sites(&self) -> usize {
        self.nt * self.nx
    }
}

/// Metric components on lattice sites.
#[derive(Clone, Debug, PartialEq)]
pub struct Metric {
    pub g_tt: Vec<f64>,
    pub g_tx: Vec<f64>,
    pub g_xx: Vec<f64>,
}

impl Metric {
    pub fn flat(geom: &LatticeGeometry) -> Self {
        let n = geom.sites();
        Metric { g_tt: vec![1.0; n], g_tx: vec![0.0; n], g_xx: vec![-1.0; n] }
    }

    pub fn from_fn(geom: &LatticeGeometry, f: impl Fn(f64, f64) -> (f64, f64, f64)) -> Self {
        let n = geom.sites();
        let mut m = Metric { g_tt: vec![0.0; n], g_tx: vec![0.0; n], g_xx: vec![0.0; n] };
        for t in 0..geom.nt {
            for x in 0..geom.nx {
                let (a, b, c) = f(t as f64 * geom.dt, x as f64 * geom.dx);
                let s = t * geom.nx + x;
                m.g_tt[s] = a;
                m.g_tx[s] = b;
                m.g_xx[s] = c;
            }
        }
        m
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GreenKind {
    Retarded,
    Advanced,
}

#[derive(Clone, Debug)]
pub struct LatticeSpacetime {
    geom: LatticeGeometry,
    metric: Metric,
    source: FieldConfig,
    sqrt_g: Vec<f64>,
    vol: Vec<f64>,
    /// `A` on the link between rows `n` and `n+1`, index `n * nx + x`.
    a_link: Vec<f64>,
    /// `B` on the link between sites `x` and `x+1`, index `n * nx + x`.
    b_link: Vec<f64>,
    id: u64,
}

impl LatticeSpacetime {
    pub fn new(geom: LatticeGeometry, metric: Metric, source: FieldConfig) -> Result<Self> {
        let LatticeGeometry { nt, nx, dt, dx, mass, p, margin } = geom;
        if nt < 2 * margin + 2 || nx < 3 || p == 0 {
            return Err(LatticeError::Parameter(format!("grid {nt}x{nx} with p={p}, margin={margin}")));
        }
        if margin < 2 {
            return Err(LatticeError::Parameter(format!("margin {margin} < 2")));
        }
        if !(dt > 0.0 && dx > 0.0 && mass >= 0.0 && dt.is_finite() && dx.is_finite() && mass.is_finite()) {
            return Err(LatticeError::Parameter("dt, dx must be positive and mass non-negative".into()));
        }
        let sites = geom.sites();
        for v in [&metric.g_tt, &metric.g_tx, &metric.g_xx] {
            if v.len() != sites {
                return Err(LatticeError::Shape { expected: (nt, nx, 1), found: (v.len(), 1, 1) });
            }
        }
        if source.shape() != (nt, nx, p) {
            return Err(LatticeError::Shape { expected: (nt, nx, p), found: source.shape() });
        }
        let mut sqrt_g = vec![0.0; sites];
        let mut gtt_up = vec![0.0; sites];
        let mut gxx_up = vec![0.0; sites];
        for s in 0..sites {
            let (a, b, c) = (metric.g_tt[s], metric.g_tx[s], metric.g_xx[s]);
            let det = a * c - b * b;
            if !(a > 0.0 && det < 0.0) || !det.is_finite() {
                return Err(LatticeError::NotLorentzian { t: s / nx, x: s % nx });
            }
            if b != 0.0 {
                return Err(LatticeError::MixedMetric { t: s / nx, x: s % nx });
            }
            let speed2 = -a / c;
            let courant = speed2 * dt * dt / (dx * dx) + mass * mass * dt * dt / 4.0;
            if courant > 1.0 + 1e-12 {
                return Err(LatticeError::Causality { t: s / nx, x: s % nx, value: courant });
            }
            sqrt_g[s] = (-det).sqrt();
            gtt_up[s] = 1.0 / a;
            gxx_up[s] = 1.0 / c;
        }
        let vol: Vec<f64> = sqrt_g.iter().map(|g| g * dt * dx).collect();
        let mut a_link = vec![0.0; sites];
        let mut b_link = vec![0.0; sites];
        for n in 0..nt {
            for x in 0..nx {
                let s = n * nx + x;
                if n + 1 < nt {
                    let u = s + nx;
                    a_link[s] = 0.5 * (sqrt_g[s] * gtt_up[s] + sqrt_g[u] * gtt_up[u]);
                }
                let r = n * nx + (x + 1) % nx;
                b_link[s] = 0.5 * (sqrt_g[s] * gxx_up[s] + sqrt_g[r] * gxx_up[r]);
            }
        }
        let mut h = std::collections::hash_map::DefaultHasher::new();
        (nt, nx, p, margin).hash(&mut h);
        for v in [dt, dx, mass] {
            v.to_bits().hash(&mut h);
        }
        for v in metric.g_tt.iter().chain(&metric.g_tx).chain(&metric.g_xx).chain(source.data()) {
            v.to_bits().hash(&mut h);
        }
        Ok(LatticeSpacetime { geom, metric, source, sqrt_g, vol, a_link, b_link, id: h.finish() })
    }

    /// Flat metric with the given source.
    pub fn flat(geom: LatticeGeometry, source: FieldConfig) -> Result<Self> {
        let m = Metric::flat(&geom);
        Self::new(geom, m, source)
    }

    /// Flat metric, vanishing source.
    pub fn flat_sourceless(geom: LatticeGeometry) -> Result<Self> {
        Self::flat(geom, FieldConfig::zeros(geom.nt, geom.nx, geom.p))
    }

    pub fn geometry(&self) -> &LatticeGeometry {
        &self.geom
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn source(&self) -> &FieldConfig {
        &self.source
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn nt(&self) -> usize {
        self.geom.nt
    }

    pub fn nx(&self) -> usize {
        self.geom.nx
    }

    pub fn p(&self) -> usize {
        self.geom.p
    }

    pub fn margin(&self) -> usize {
        self.geom.margin
    }

    pub fn mass(&self) -> f64 {
        self.geom.mass
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.geom.nt, self.geom.nx, self.geom.p)
    }

    pub fn sqrt_g(&self) -> &[f64] {
        &self.sqrt_g
    }

    /// `√|g| dt dx` per site.
    pub fn vol(&self) -> &[f64] {
        &self.vol
    }

    /// Same geometry and metric, different source.
    pub fn with_source(&self, source: FieldConfig) -> Result<Self> {
        Self::new(self.geom, self.metric.clone(), source)
    }

    pub fn zeros(&self) -> FieldConfig {
        FieldConfig::zeros(self.geom.nt, self.geom.nx, self.geom.p)
    }

    pub fn check_shape(&self, f: &FieldConfig) -> Result<()> {
        if f.shape() != self.shape() {
            return Err(LatticeError::Shape { expected: self.shape(), found: f.shape() });
        }
        Ok(())
    }

    /// Shape check plus vanishing on the temporal margins.
    pub fn check_interior(&self, f: &FieldConfig) -> Result<()> {
        self.check_shape(f)?;
        let (nt, m) = (self.geom.nt, self.geom.margin);
        for n in (0..m).chain(nt - m..nt) {
            if f.row(n).iter().any(|v| *v != 0.0) {
                return Err(LatticeError::Support { row: n });
            }
        }
        Ok(())
    }

    /// `Σ vol ⟨f, g⟩`, summed in storage order.
    pub fn inner(&self, f: &FieldConfig, g: &FieldConfig) -> f64 {
        let p = self.geom.p;
        let mut acc = 0.0;
        for (s, w) in self.vol.iter().enumerate() {
            let mut local = 0.0;
            for c in 0..p {
                local += f.data()[s * p + c] * g.data()[s * p + c];
            }
            acc += w * local;
        }
        acc
    }

    /// `Σ vol ⟨f, μ⟩` for a constant multiplet `μ`.
    pub fn integrate_against(&self, f: &FieldConfig, mu: &[f64]) -> f64 {
        let p = self.geom.p;
        let mut acc = 0.0;
        for (s, w) in self.vol.iter().enumerate() {
            let mut local = 0.0;
            for c in 0..p {
                local += f.data()[s * p + c] * mu[c];
            }
            acc += w * local;
        }
        acc
    }

    #[inline]
    fn spatial_term(&self, u: &FieldConfig, n: usize, x: usize, c: usize) -> f64 {
        let nx = self.geom.nx;
        let xl = (x + nx - 1) % nx;
        let xr = (x + 1) % nx;
        let s = n * nx + x;
        let bl = self.b_link[n * nx + xl];
        let br = self.b_link[s];
        let v = u[(n, x, c)];
        (br * (u[(n, xr, c)] - v) - bl * (v - u[(n, xl, c)])) / (self.geom.dx * self.geom.dx)
    }

    /// Klein-Gordon operator on rows `1..nt-1`.
    pub fn kg_apply(&self, phi: &FieldConfig) -> Result<FieldConfig> {
        self.check_shape(phi)?;
        let LatticeGeometry { nt, nx, dt, mass, p, .. } = self.geom;
        let mut out = self.zeros();
        let m2 = mass * mass;
        for n in 1..nt - 1 {
            for x in 0..nx {
                let s = n * nx + x;
                let (au, ad) = (self.a_link[s], self.a_link[s - nx]);
                for c in 0..p {
                    let v = phi[(n, x, c)];
                    let time = (au * (phi[(n + 1, x, c)] - v) - ad * (v - phi[(n - 1, x, c)])) / (dt * dt);
                    let space = self.spatial_term(phi, n, x, c);
                    out[(n, x, c)] = (time + space) / self.sqrt_g[s] + m2 * v;
                }
            }
        }
        Ok(out)
    }

    /// Forward march of `KG u = f` on rows `1..nt-1` from the data already
    /// stored on rows 0 and 1 of `u`.
    pub fn march_forward(&self, f: &FieldConfig, u: &mut FieldConfig) {
        let LatticeGeometry { nt, nx, dt, mass, p, .. } = self.geom;
        let m2 = mass * mass;
        for n in 1..nt - 1 {
            for x in 0..nx {
                let s = n * nx + x;
                let (au, ad) = (self.a_link[s], self.a_link[s - nx]);
                for c in 0..p {
                    let v = u[(n, x, c)];
                    let r = self.sqrt_g[s] * (f[(n, x, c)] - m2 * v) - self.spatial_term(u, n, x, c);
                    u[(n + 1, x, c)] = v + dt * dt / au * r + ad / au * (v - u[(n - 1, x, c)]);
                }
            }
        }
    }

    /// Backward march of `KG u = f` from the data on rows `nt-1`, `nt-2`.
    pub fn march_backward(&self, f: &FieldConfig, u: &mut FieldConfig) {
        let LatticeGeometry { nt, nx, dt, mass, p, .. } = self.geom;
        let m2 = mass * mass;
        for n in (1..nt - 1).rev() {
            for x in 0..nx {
                let s = n * nx + x;
                let (au, ad) = (self.a_link[s], self.a_link[s - nx]);
                for c in 0..p {
                    let v = u[(n, x, c)];
                    let r = self.sqrt_g[s] * (f[(n, x, c)] - m2 * v) - self.spatial_term(u, n, x, c);
                    u[(n - 1, x, c)] = v - au / ad * (u[(n + 1, x, c)] - v) + dt * dt / ad * r;
                }
            }
        }
    }

    /// Retarded or advanced inverse of the Klein-Gordon operator on data
    /// vanishing on the temporal margins.
    pub fn green(&self, f: &FieldConfig, kind: GreenKind) -> Result<FieldConfig> {
        self.check_interior(f)?;
        let mut u = self.zeros();
        match kind {
            GreenKind::Retarded => self.march_forward(f, &mut u),
            GreenKind::Advanced => self.march_backward(f, &mut u),
        }
        Ok(u)
    }

    /// Advanced minus retarded.
    pub fn e_map(&self, f: &FieldConfig) -> Result<FieldConfig> {
        let adv = self.green(f, GreenKind::Advanced)?;
        let ret = self.green(f, GreenKind::Retarded)?;
        Ok(adv.sub(&ret))
    }

    /// `Σ vol ⟨φ, E ψ⟩`.
    pub fn presymp(&self, phi: &FieldConfig, psi: &FieldConfig) -> Result<f64> {
        self.check_interior(phi)?;
        Ok(self.inner(phi, &self.e_map(psi)?))
    }

    /// Relative residual of `KG φ + J` on rows `1..nt-1`.
    pub fn solution_residual(&self, phi: &FieldConfig) -> Result<f64> {
        let r = self.kg_apply(phi)?.add(&self.source);
        let nt = self.geom.nt;
        let mut res: f64 = 0.0;
        for n in 1..nt - 1 {
            res = r.row(n).iter().fold(res, |m, v| m.max(v.abs()));
        }
        let dt = self.geom.dt;
        let scale = (phi.max_abs() / (dt * dt)).max(self.source.max_abs()).max(f64::MIN_POSITIVE);
        Ok(res / scale)
    }

    /// Solution of `KG φ + J = 0` with the given values on rows 0 and 1.
    pub fn sample_solution(&self, row0: &[f64], row1: &[f64]) -> Result<FieldConfig> {
        let w = self.geom.nx * self.geom.p;
        if row0.len() != w || row1.len() != w {
            return Err(LatticeError::Shape { expected: (2, self.geom.nx, self.geom.p), found: (row0.len(), row1.len(), 0) });
        }
        let mut u = self.zeros();
        u.row_mut(0).copy_from_slice(row0);
        u.row_mut(1).copy_from_slice(row1);
        let f = self.source.scale(-1.0);
        self.march_forward(&f, &mut u);
        Ok(u)
    }

    /// Second row of a solution from a value row and a velocity row, by a
    /// second-order Taylor step using the equation to supply `∂_t² φ`.
    pub fn taylor_start(&self, value: &[f64], velocity: &[f64]) -> Result<Vec<f64>> {
        let LatticeGeometry { nx, dt, mass, p, .. } = self.geom;
        if value.len() != nx * p || velocity.len() != nx * p {
            return Err(LatticeError::Shape { expected: (1, nx, p), found: (value.len(), velocity.len(), 0) });
        }
        let mut u = self.zeros();
        u.row_mut(0).copy_from_slice(value);
        let m2 = mass * mass;
        let mut out = vec![0.0; nx * p];
        for x in 0..nx {
            let (s0, s1) = (x, nx + x);
            let k0 = self.sqrt_g[s0] / self.metric.g_tt[s0];
            let k1 = self.sqrt_g[s1] / self.metric.g_tt[s1];
            for c in 0..p {
                let i = x * p + c;
                let spatial = self.spatial_term(&u, 0, x, c);
                let rhs = -spatial - self.sqrt_g[s0] * (m2 * value[i] + self.source[(0, x, c)]) - (k1 - k0) / dt * velocity[i];
                out[i] = value[i] + dt * velocity[i] + 0.5 * dt * dt * rhs / k0;
            }
        }
        Ok(out)
    }

    /// Lattice with the metric and source perturbed.
    pub fn perturbed(&self, h: &Metric, j: &FieldConfig) -> Result<Self> {
        let add = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x + y).collect::<Vec<_>>();
        let metric = Metric {
            g_tt: add(&self.metric.g_tt, &h.g_tt),
            g_tx: add(&self.metric.g_tx, &h.g_tx),
            g_xx: add(&self.metric.g_xx, &h.g_xx),
        };
        Self::new(self.geom, metric, self.source.add(j))
    }

    /// Inverse metric `(g^tt, g^tx, g^xx)` at a site.
    pub fn inverse_metric(&self, s: usize) -> (f64, f64, f64) {
        let (a, b, c) = (self.metric.g_tt[s], self.metric.g_tx[s], self.metric.g_xx[s]);
        let det = a * c - b * b;
        (c / det, -b / det, a / det)
    }

    /// Field with a single unit value divided by the site volume, so that
    /// its pairing with any field evaluates that field at the site.
    pub fn delta(&self, n: usize, x: usize, c: usize) -> FieldConfig {
        let mut f = self.zeros();
        f[(n, x, c)] = 1.0 / self.vol[n * self.geom.nx + x];
        f
    }
}
