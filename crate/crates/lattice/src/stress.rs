//! Stress-energy tensor of the inhomogeneous multiplet by centered
//! differences, its smearing, divergence law and gauge-invariant variant.

use crate::error::Result;
use crate::field::FieldConfig;
use crate::spacetime::{LatticeSpacetime, Metric};

/// Contravariant components on lattice sites; rows `0` and `nt-1` are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct StressTensor {
    pub tt: FieldConfig,
    pub tx: FieldConfig,
    pub xx: FieldConfig,
}

impl StressTensor {
    fn zeros(nt: usize, nx: usize) -> Self {
        let z = FieldConfig::zeros(nt, nx, 1);
        StressTensor { tt: z.clone(), tx: z.clone(), xx: z }
    }

    pub fn sub(&self, other: &Self) -> Self {
        StressTensor { tt: self.tt.sub(&other.tt), tx: self.tx.sub(&other.tx), xx: self.xx.sub(&other.xx) }
    }

    pub fn max_abs(&self) -> f64 {
        self.tt.max_abs().max(self.tx.max_abs()).max(self.xx.max_abs())
    }
}

/// Centered `(∂_t, ∂_x)` of component `c` at an interior row.
fn gradient(l: &LatticeSpacetime, phi: &FieldConfig, n: usize, x: usize, c: usize) -> (f64, f64) {
    let g = l.geometry();
    let (xl, xr) = ((x + g.nx - 1) % g.nx, (x + 1) % g.nx);
    let dt = (phi[(n + 1, x, c)] - phi[(n - 1, x, c)]) / (2.0 * g.dt);
    let dx = (phi[(n, xr, c)] - phi[(n, xl, c)]) / (2.0 * g.dx);
    (dt, dx)
}

fn tensor(l: &LatticeSpacetime, phi: &FieldConfig, full: bool) -> Result<StressTensor> {
    l.check_shape(phi)?;
    let g = l.geometry();
    let (nt, nx, p) = (g.nt, g.nx, g.p);
    let m2 = g.mass * g.mass;
    let mut out = StressTensor::zeros(nt, nx);
    for n in 1..nt - 1 {
        for x in 0..nx {
            let s = n * nx + x;
            let (utt, utx, uxx) = l.inverse_metric(s);
            let (mut gg_tt, mut gg_tx, mut gg_xx, mut norm, mut sq, mut src) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
            for c in 0..p {
                let (dt, dx) = gradient(l, phi, n, x, c);
                let up_t = utt * dt + utx * dx;
                let up_x = utx * dt + uxx * dx;
                gg_tt += up_t * up_t;
                gg_tx += up_t * up_x;
                gg_xx += up_x * up_x;
                norm += up_t * dt + up_x * dx;
                let v = phi[(n, x, c)];
                sq += v * v;
                src += l.source()[(n, x, c)] * v;
            }
            let scalar = if full { -0.5 * norm + 0.5 * m2 * sq + src } else { -0.5 * norm };
            out.tt[(n, x, 0)] = gg_tt + utt * scalar;
            out.tx[(n, x, 0)] = gg_tx + utx * scalar;
            out.xx[(n, x, 0)] = gg_xx + uxx * scalar;
        }
    }
    Ok(out)
}

/// `T^{ab} = ⟨∇^a φ, ∇^b φ⟩ - ½ g^{ab} ⟨∇_c φ, ∇^c φ⟩ + ½ m² g^{ab} |φ|² + g^{ab} ⟨J, φ⟩`.
pub fn stress_energy(l: &LatticeSpacetime, phi: &FieldConfig) -> Result<StressTensor> {
    tensor(l, phi, true)
}

/// Gradient part only; invariant under constant shifts of the field.
pub fn tilde_stress(l: &LatticeSpacetime, phi: &FieldConfig) -> Result<StressTensor> {
    tensor(l, phi, false)
}

/// `Σ vol h_ab T^{ab}`.
pub fn smear(l: &LatticeSpacetime, t: &StressTensor, h: &Metric) -> f64 {
    let mut acc = 0.0;
    for (s, w) in l.vol().iter().enumerate() {
        let local = h.g_tt[s] * t.tt.data()[s] + 2.0 * h.g_tx[s] * t.tx.data()[s] + h.g_xx[s] * t.xx.data()[s];
        acc += w * local;
    }
    acc
}

/// Centered derivatives `(∂_t, ∂_x)` of a scalar site array at an interior row.
fn site_gradient(l: &LatticeSpacetime, v: &[f64], n: usize, x: usize) -> [f64; 2] {
    let g = l.geometry();
    let nx = g.nx;
    let (xl, xr) = ((x + nx - 1) % nx, (x + 1) % nx);
    [
        (v[(n + 1) * nx + x] - v[(n - 1) * nx + x]) / (2.0 * g.dt),
        (v[n * nx + xr] - v[n * nx + xl]) / (2.0 * g.dx),
    ]
}

/// Per-site residual of `∇_a T^{ab} - ⟨∇^b J, φ⟩` on rows `2..nt-2`;
/// component 0 is `b = t`, component 1 is `b = x`.
pub fn divergence_residual(l: &LatticeSpacetime, phi: &FieldConfig) -> Result<FieldConfig> {
    let t = stress_energy(l, phi)?;
    let g = l.geometry();
    let (nt, nx, p) = (g.nt, g.nx, g.p);
    let m = l.metric();
    let lower = [&m.g_tt, &m.g_tx, &m.g_xx];
    let comp = |a: usize, b: usize| a + b; // (t,t)->0, (t,x)->1, (x,x)->2
    let tcomp = [t.tt.data(), t.tx.data(), t.xx.data()];
    let mut out = FieldConfig::zeros(nt, nx, 2);
    for n in 2..nt - 2 {
        for x in 0..nx {
            let s = n * nx + x;
            let (utt, utx, uxx) = l.inverse_metric(s);
            let up = [[utt, utx], [utx, uxx]];
            // dg[c][k]: ∂_c of lower component k
            let dg: Vec<[f64; 2]> = lower.iter().map(|v| site_gradient(l, v, n, x)).collect();
            let dlow = |c: usize, a: usize, b: usize| dg[comp(a, b)][c];
            let mut gamma = [[[0.0; 2]; 2]; 2];
            for (b, gb) in gamma.iter_mut().enumerate() {
                for (a, ga) in gb.iter_mut().enumerate() {
                    for (c, gc) in ga.iter_mut().enumerate() {
                        *gc = (0..2)
                            .map(|d| 0.5 * up[b][d] * (dlow(a, d, c) + dlow(c, d, a) - dlow(d, a, c)))
                            .sum();
                    }
                }
            }
            let tv = |a: usize, b: usize| tcomp[comp(a, b)][s];
            for b in 0..2 {
                let mut div = 0.0;
                for a in 0..2 {
                    div += site_gradient(l, tcomp[comp(a, b)], n, x)[a];
                    for c in 0..2 {
                        div += gamma[a][a][c] * tv(c, b) + gamma[b][a][c] * tv(a, c);
                    }
                }
                let mut rhs = 0.0;
                for c in 0..p {
                    let jc: Vec<f64> = [(n - 1, x), (n + 1, x), (n, (x + nx - 1) % nx), (n, (x + 1) % nx)]
                        .iter()
                        .map(|&(r, y)| l.source()[(r, y, c)])
                        .collect();
                    let dj = [(jc[1] - jc[0]) / (2.0 * g.dt), (jc[3] - jc[2]) / (2.0 * g.dx)];
                    rhs += (up[b][0] * dj[0] + up[b][1] * dj[1]) * phi[(n, x, c)];
                }
                out[(n, x, b)] = div - rhs;
            }
        }
    }
    Ok(out)
}

/// `(Σ vol |r|²)^{1/2}` over rows whose time lies in `[t0, t1]`.
pub fn windowed_l2(l: &LatticeSpacetime, r: &FieldConfig, t0: f64, t1: f64) -> f64 {
    let g = l.geometry();
    let k = r.components();
    let mut acc = 0.0;
    for n in 0..g.nt {
        let t = n as f64 * g.dt;
        if t < t0 || t > t1 {
            continue;
        }
        for x in 0..g.nx {
            let w = l.vol()[n * g.nx + x];
            for c in 0..k {
                let v = r[(n, x, c)];
                acc += w * v * v;
            }
        }
    }
    acc.sqrt()
}
