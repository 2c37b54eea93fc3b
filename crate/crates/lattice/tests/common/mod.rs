#![allow(dead_code)]

use inhomkg_lattice::presets::source_preset;
use inhomkg_lattice::{FieldConfig, LatticeGeometry, LatticeSpacetime, Metric};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn geom(nt: usize, nx: usize, mass: f64, p: usize) -> LatticeGeometry {
    LatticeGeometry::unit_circle(nx, nt, 0.5, mass, p)
}

/// Mildly curved static-in-places metric with a time-dependent factor.
pub fn curved_metric(g: &LatticeGeometry) -> Metric {
    Metric::from_fn(g, |t, x| {
        let a = 1.0 + 0.15 * (6.0 * x).sin() * (1.0 + 0.5 * t);
        let b = 1.0 + 0.1 * (4.0 * x + 2.0 * t).cos();
        (b, 0.0, -a * a)
    })
}

pub fn curved(nt: usize, nx: usize, mass: f64, p: usize) -> LatticeSpacetime {
    let g = geom(nt, nx, mass, p);
    LatticeSpacetime::new(g, curved_metric(&g), source_preset("smooth", &g, 0.7).unwrap()).unwrap()
}

pub fn flat(nt: usize, nx: usize, mass: f64, p: usize) -> LatticeSpacetime {
    let g = geom(nt, nx, mass, p);
    LatticeSpacetime::flat(g, source_preset("smooth", &g, 0.7).unwrap()).unwrap()
}

/// Random values on rows `lo..=hi`, zero elsewhere.
pub fn random_rows(rng: &mut ChaCha8Rng, l: &LatticeSpacetime, lo: usize, hi: usize) -> FieldConfig {
    FieldConfig::from_fn(l.nt(), l.nx(), l.p(), |n, _, _| if n >= lo && n <= hi { rng.gen_range(-1.0..1.0) } else { 0.0 })
}

/// Random values on a random block of interior rows.
pub fn random_interior(rng: &mut ChaCha8Rng, l: &LatticeSpacetime) -> FieldConfig {
    let m = l.margin();
    let lo = rng.gen_range(m..l.nt() - m - 1);
    let hi = rng.gen_range(lo..l.nt() - m);
    random_rows(rng, l, lo, hi)
}

/// Random compactly supported field that stays one row away from the
/// margins, so that its image under KG is interior.
pub fn random_compact(rng: &mut ChaCha8Rng, l: &LatticeSpacetime) -> FieldConfig {
    let m = l.margin();
    let lo = rng.gen_range(m + 1..l.nt() - m - 2);
    let hi = rng.gen_range(lo..l.nt() - m - 1);
    random_rows(rng, l, lo, hi)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}
