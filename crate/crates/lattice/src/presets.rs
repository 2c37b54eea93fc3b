//! Named metrics, sources and smooth bump profiles used by experiments.

use std::f64::consts::PI;

use crate::error::{LatticeError, Result};
use crate::field::FieldConfig;
use crate::spacetime::{LatticeGeometry, Metric};

/// `(1 - u²)^4` for `|u| < 1`, zero outside.
pub fn bump_profile(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        let w = 1.0 - u * u;
        w * w * w * w
    }
}

/// Signed distance on the periodic interval `[0, len)`.
pub fn periodic_offset(x: f64, center: f64, len: f64) -> f64 {
    let mut d = (x - center) % len;
    if d > 0.5 * len {
        d -= len;
    } else if d < -0.5 * len {
        d += len;
    }
    d
}

/// Separable space-time bump in physical coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bump {
    pub t0: f64,
    pub x0: f64,
    pub radius_t: f64,
    pub radius_x: f64,
    pub amplitude: f64,
}

impl Bump {
    pub fn value(&self, t: f64, x: f64, period: f64) -> f64 {
        let ut = (t - self.t0) / self.radius_t;
        let ux = periodic_offset(x, self.x0, period) / self.radius_x;
        self.amplitude * bump_profile(ut) * bump_profile(ux)
    }

    /// Sampled on the lattice in component `comp` only.
    pub fn field(&self, geom: &LatticeGeometry, comp: usize) -> FieldConfig {
        let period = geom.nx as f64 * geom.dx;
        FieldConfig::from_fn(geom.nt, geom.nx, geom.p, |n, x, c| {
            if c == comp {
                self.value(n as f64 * geom.dt, x as f64 * geom.dx, period)
            } else {
                0.0
            }
        })
    }

    /// Sampled as a scalar site array.
    pub fn sites(&self, geom: &LatticeGeometry) -> Vec<f64> {
        self.field(&LatticeGeometry { p: 1, ..*geom }, 0).data().to_vec()
    }
}

pub const METRIC_PRESETS: [&str; 3] = ["flat", "static-wave", "expanding"];
pub const SOURCE_PRESETS: [&str; 4] = ["zero", "constant", "smooth", "bump"];

/// Metric by preset name. `static-wave` has a spatially varying light
/// speed, `expanding` a slowly growing scale factor.
pub fn metric_preset(name: &str, geom: &LatticeGeometry) -> Result<Metric> {
    let len = geom.nx as f64 * geom.dx;
    match name {
        "flat" => Ok(Metric::flat(geom)),
        "static-wave" => Ok(Metric::from_fn(geom, |_, x| {
            let a = 1.0 + 0.2 * (2.0 * PI * x / len).sin();
            (1.0, 0.0, -a * a)
        })),
        "expanding" => Ok(Metric::from_fn(geom, |t, _| {
            let a = 1.0 + 0.2 * t;
            (1.0, 0.0, -a * a)
        })),
        other => Err(LatticeError::Parameter(format!("unknown metric preset `{other}`"))),
    }
}

/// Source by preset name, scaled by `strength`.
pub fn source_preset(name: &str, geom: &LatticeGeometry, strength: f64) -> Result<FieldConfig> {
    let len = geom.nx as f64 * geom.dx;
    let span = geom.nt as f64 * geom.dt;
    let (nt, nx, p) = (geom.nt, geom.nx, geom.p);
    match name {
        "zero" => Ok(FieldConfig::zeros(nt, nx, p)),
        "constant" => Ok(FieldConfig::from_fn(nt, nx, p, |_, _, c| strength * (1.0 + c as f64))),
        "smooth" => Ok(FieldConfig::from_fn(nt, nx, p, |n, x, c| {
            let (t, y) = (n as f64 * geom.dt, x as f64 * geom.dx);
            strength * ((2.0 * PI * y / len + c as f64).sin() * (PI * t / span).cos() + 0.5 * (4.0 * PI * y / len).cos())
        })),
        "bump" => {
            let b = Bump { t0: 0.5 * span, x0: 0.5 * len, radius_t: 0.2 * span, radius_x: 0.2 * len, amplitude: strength };
            let mut f = FieldConfig::zeros(nt, nx, p);
            for c in 0..p {
                f = f.add(&b.field(geom, c));
            }
            Ok(f)
        }
        other => Err(LatticeError::Parameter(format!("unknown source preset `{other}`"))),
    }
}
