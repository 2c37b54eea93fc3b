//! Reference experiment setups shared by tests and the command-line runner.

use std::f64::consts::PI;

use rand::Rng;

use crate::classes::ObservableClass;
use crate::dynloc::admissible_complement;
use crate::error::{LatticeError, Result};
use crate::field::FieldConfig;
use crate::presets::{metric_preset, source_preset, Bump};
use crate::rce::{rce_derivative_fd, rce_prediction, Perturbation};
use crate::region::{dilate_mask, CompactRegion, Rect};
use crate::spacetime::{LatticeGeometry, LatticeSpacetime, Metric};
use crate::stress::{divergence_residual, windowed_l2};

/// Unit circle, `nt = 2 nx`, `dt = dx / 2`, so the time extent is 1.
pub fn unit_geometry(nx: usize, mass: f64, p: usize) -> LatticeGeometry {
    LatticeGeometry::unit_circle(nx, 2 * nx, 0.5, mass, p)
}

/// Solution from smooth Cauchy data of fixed physical shape.
pub fn smooth_solution(l: &LatticeSpacetime) -> Result<FieldConfig> {
    let g = l.geometry();
    let (nx, p) = (g.nx, g.p);
    let mut value = vec![0.0; nx * p];
    let mut velocity = vec![0.0; nx * p];
    for x in 0..nx {
        let y = x as f64 * g.dx;
        for c in 0..p {
            let phase = 0.7 * c as f64;
            value[x * p + c] = (2.0 * PI * y + phase).sin() + 0.3 * (4.0 * PI * y - phase).cos();
            velocity[x * p + c] = 0.5 * (2.0 * PI * y).cos() - 0.2 * (6.0 * PI * y + phase).sin();
        }
    }
    let second = l.taylor_start(&value, &velocity)?;
    l.sample_solution(&value, &second)
}

/// Background and perturbation of a derivative experiment, in physical
/// coordinates on the unit square so that refinements share one shape.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivativeSetup {
    pub metric: String,
    pub source: String,
    pub source_strength: f64,
    pub mass: f64,
    pub p: usize,
    pub h_tt: Option<Bump>,
    pub h_tx: Option<Bump>,
    pub h_xx: Option<Bump>,
    /// Source perturbation bumps with their component.
    pub j: Vec<(usize, Bump)>,
}

impl Default for DerivativeSetup {
    /// Flat background with a smooth source, small metric bumps at the
    /// centre and a source bump in component 0.
    fn default() -> Self {
        let hb = |amp: f64| Bump { t0: 0.5, x0: 0.5, radius_t: 0.18, radius_x: 0.2, amplitude: amp };
        DerivativeSetup {
            metric: "flat".into(),
            source: "smooth".into(),
            source_strength: 0.5,
            mass: 1.0,
            p: 2,
            h_tt: Some(hb(0.05)),
            h_tx: None,
            h_xx: Some(hb(-0.03)),
            j: vec![(0, Bump { t0: 0.5, x0: 0.3, radius_t: 0.12, radius_x: 0.12, amplitude: 1.0 })],
        }
    }
}

impl DerivativeSetup {
    pub fn without_metric(mut self) -> Self {
        self.h_tt = None;
        self.h_tx = None;
        self.h_xx = None;
        self
    }

    pub fn without_source(mut self) -> Self {
        self.j.clear();
        self
    }

    pub fn perturbation(&self, l: &LatticeSpacetime) -> Result<Perturbation> {
        let geom = *l.geometry();
        let comp = |b: &Option<Bump>| b.map(|b| b.sites(&geom)).unwrap_or_else(|| vec![0.0; geom.sites()]);
        let mut j = l.zeros();
        for (c, b) in &self.j {
            if *c >= geom.p {
                return Err(LatticeError::Parameter(format!("source bump component {c} for p = {}", geom.p)));
            }
            j = j.add(&b.field(&geom, *c));
        }
        Ok(Perturbation { h: Metric { g_tt: comp(&self.h_tt), g_tx: comp(&self.h_tx), g_xx: comp(&self.h_xx) }, j })
    }

    pub fn scenario(&self, nx: usize) -> Result<DerivativeScenario> {
        let geom = unit_geometry(nx, self.mass, self.p);
        let source = source_preset(&self.source, &geom, self.source_strength)?;
        let lattice = LatticeSpacetime::new(geom, metric_preset(&self.metric, &geom)?, source)?;
        let pert = self.perturbation(&lattice)?;
        let mut test = Bump { t0: 0.3, x0: 0.55, radius_t: 0.1, radius_x: 0.15, amplitude: 1.0 }.field(&geom, 0);
        if geom.p > 1 {
            test = test.add(&Bump { t0: 0.35, x0: 0.4, radius_t: 0.08, radius_x: 0.1, amplitude: -0.5 }.field(&geom, 1));
        }
        let class = ObservableClass::new(&lattice, test, 0.25)?;
        let solution = smooth_solution(&lattice)?;
        Ok(DerivativeScenario { lattice, pert, class, solution })
    }
}

/// Lattice, perturbation, a bump class and a solution, all of fixed
/// physical shape.
#[derive(Clone, Debug)]
pub struct DerivativeScenario {
    pub lattice: LatticeSpacetime,
    pub pert: Perturbation,
    pub class: ObservableClass,
    pub solution: FieldConfig,
}

/// The default setup, optionally without its metric or source part.
pub fn derivative_scenario(nx: usize, with_metric: bool, with_source: bool) -> Result<DerivativeScenario> {
    let mut setup = DerivativeSetup::default();
    if !with_metric {
        setup = setup.without_metric();
    }
    if !with_source {
        setup = setup.without_source();
    }
    setup.scenario(nx)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivativeComparison {
    pub nx: usize,
    pub fd: f64,
    pub predicted: f64,
    pub relative_error: f64,
}

pub fn compare_derivative(s: &DerivativeScenario, step: f64) -> Result<DerivativeComparison> {
    let fd = rce_derivative_fd(&s.lattice, &s.pert, &s.class, &s.solution, step)?;
    let predicted = rce_prediction(&s.lattice, &s.pert, &s.class, &s.solution)?;
    Ok(DerivativeComparison {
        nx: s.lattice.nx(),
        fd,
        predicted,
        relative_error: (fd - predicted).abs() / predicted.abs().max(f64::MIN_POSITIVE),
    })
}

/// `log2(e_coarse / e_fine)`.
pub fn observed_order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

/// Windowed L² norm of the divergence residual for a smooth solution on a
/// given metric preset and source preset.
pub fn divergence_error(nx: usize, metric: &str, source: &str, mass: f64) -> Result<f64> {
    let geom = unit_geometry(nx, mass, 2);
    let l = LatticeSpacetime::new(geom, metric_preset(metric, &geom)?, source_preset(source, &geom, 0.5)?)?;
    let phi = smooth_solution(&l)?;
    let r = divergence_residual(&l, &phi)?;
    Ok(windowed_l2(&l, &r, 0.25, 0.75))
}

/// Lattice used by the dynamical locality experiments: a spatially varying
/// static metric with a smooth source, wide enough for a causal complement
/// to exist on several rows.
pub fn dynloc_lattice() -> Result<LatticeSpacetime> {
    let geom = unit_geometry(32, 1.0, 2);
    LatticeSpacetime::new(geom, metric_preset("static-wave", &geom)?, source_preset("smooth", &geom, 0.5)?)
}

/// Small rectangle in the middle of the lattice.
pub fn random_region<R: Rng>(rng: &mut R, l: &LatticeSpacetime) -> CompactRegion {
    let t0 = rng.gen_range(l.nt() / 2 - 4..l.nt() / 2 + 2);
    let x0 = rng.gen_range(l.nx() / 2 - 4..l.nx() / 2 + 1);
    CompactRegion::rect(Rect::new(t0, t0 + rng.gen_range(0..3), x0, x0 + rng.gen_range(0..4)))
}

/// Random values on the sites of `k`.
pub fn random_local_test<R: Rng>(rng: &mut R, l: &LatticeSpacetime, k: &CompactRegion) -> FieldConfig {
    let mask = k.mask(l.nt(), l.nx());
    let nx = l.nx();
    FieldConfig::from_fn(l.nt(), nx, l.p(), |n, x, _| if mask[n * nx + x] { rng.gen_range(-1.0..1.0) } else { 0.0 })
}

/// One to three patches of metric and source perturbation on admissible
/// sites of the causal complement of `k`.
pub fn random_complement_perturbation<R: Rng>(rng: &mut R, l: &LatticeSpacetime, k: &CompactRegion) -> Perturbation {
    let allowed = admissible_complement(l, k);
    let sites: Vec<usize> = (0..allowed.len()).filter(|s| allowed[*s]).collect();
    let (nt, nx, p) = (l.nt(), l.nx(), l.p());
    let mut pert = Perturbation::zero(l);
    if sites.is_empty() {
        return pert;
    }
    let with_metric = rng.gen_bool(0.7);
    for _ in 0..rng.gen_range(1..4) {
        let centre = sites[rng.gen_range(0..sites.len())];
        let patch = dilate_mask(&(0..nt * nx).map(|s| s == centre).collect::<Vec<_>>(), 1, nt, nx);
        let (htt, hxx) = (rng.gen_range(-0.03..0.03), rng.gen_range(-0.03..0.03));
        for s in (0..nt * nx).filter(|s| patch[*s] && allowed[*s]) {
            if with_metric {
                pert.h.g_tt[s] = htt;
                pert.h.g_xx[s] = hxx;
            }
            for c in 0..p {
                pert.j.data_mut()[s * p + c] = rng.gen_range(-1.0..1.0);
            }
        }
    }
    pert
}

#[derive(Clone, Debug)]
pub struct DelocalizedCase {
    pub class: ObservableClass,
    /// Region holding `k` and room for a sharp-step representative.
    pub region: CompactRegion,
    /// The part of the test function supported on `k`.
    pub local: FieldConfig,
    /// Preimage under KG of the rest.
    pub far: FieldConfig,
}

/// A class whose test function is `φ_K + KG f` with `φ_K` on `k` and `f`
/// far in the future of `k`, so that only its propagated test function is
/// localized near `k`.
pub fn delocalized_class<R: Rng>(
    rng: &mut R,
    l: &LatticeSpacetime,
    k: &CompactRegion,
) -> Result<DelocalizedCase> {
    let (_, k_hi) = k.rows();
    let (nt, nx, m) = (l.nt(), l.nx(), l.margin());
    let lo = (k_hi + 8).min(nt - m - 4);
    let far = FieldConfig::from_fn(nt, nx, l.p(), |n, _, _| {
        if (lo..lo + 2).contains(&n) {
            rng.gen_range(-1.0..1.0)
        } else {
            0.0
        }
    });
    let local = random_local_test(rng, l, k);
    let class = ObservableClass::new(l, local.add(&l.kg_apply(&far)?), rng.gen_range(-1.0..1.0))?;
    let r = k.rects[0];
    let (below, above) = (rng.gen_range(2..5), rng.gen_range(2..5));
    let w = below.max(above) + 3;
    let o = CompactRegion::rect(Rect::new(r.t0 - below, r.t1 + above, r.x0.saturating_sub(w), (r.x1 + w).min(nx - 1)));
    Ok(DelocalizedCase { class, region: o, local, far })
}

/// Lattice of the corank experiment: `nx = 16`, `nt = 32`, `p` components.
pub fn corank_lattice(p: usize) -> Result<LatticeSpacetime> {
    let geom = unit_geometry(16, 1.0, p);
    LatticeSpacetime::new(geom, metric_preset("static-wave", &geom)?, source_preset("smooth", &geom, 0.5)?)
}

/// `n` random test functions on interior rows; with `split = Some(q)` the
/// first half lives in components `0..q` and the rest in `q..p`.
pub fn corank_family<R: Rng>(rng: &mut R, l: &LatticeSpacetime, n: usize, split: Option<usize>) -> Vec<FieldConfig> {
    let (nt, nx, p, m) = (l.nt(), l.nx(), l.p(), l.margin());
    (0..n)
        .map(|i| {
            let lo = rng.gen_range(m + 1..nt - m - 4);
            let hi = lo + rng.gen_range(0..3);
            let comps = match split {
                Some(q) if i < n / 2 => 0..q,
                Some(q) => q..p,
                None => 0..p,
            };
            FieldConfig::from_fn(nt, nx, p, |t, _, c| {
                if (lo..=hi).contains(&t) && comps.contains(&c) {
                    rng.gen_range(-1.0..1.0)
                } else {
                    0.0
                }
            })
        })
        .collect()
}

/// Smooth metric and source bumps on rows `lo..=hi` at a random position;
/// the metric part is present only with `with_metric`.
pub fn random_bump_perturbation<R: Rng>(
    rng: &mut R,
    l: &LatticeSpacetime,
    lo: usize,
    hi: usize,
    with_metric: bool,
) -> Perturbation {
    let g = *l.geometry();
    let span = (hi - lo) as f64 * g.dt;
    let t0 = (lo + hi) as f64 * 0.5 * g.dt;
    let x0 = rng.gen_range(0.0..g.nx as f64 * g.dx);
    let bump = |amp: f64| Bump { t0, x0, radius_t: 0.5 * span, radius_x: 0.3 * g.nx as f64 * g.dx, amplitude: amp };
    let h = if with_metric {
        Metric {
            g_tt: bump(rng.gen_range(-0.05..0.05)).sites(&g),
            g_tx: vec![0.0; g.sites()],
            g_xx: bump(rng.gen_range(-0.05..0.05)).sites(&g),
        }
    } else {
        Perturbation::zero(l).h
    };
    let period = g.nx as f64 * g.dx;
    let j = FieldConfig::from_fn(g.nt, g.nx, g.p, |n, x, c| {
        bump(1.0).value(n as f64 * g.dt, x as f64 * g.dx, period) * [1.0, -0.6, 0.3][c % 3]
    });
    Perturbation { h, j }
}

/// Random values on a random block of rows inside `lo..=hi`.
pub fn random_block<R: Rng>(rng: &mut R, l: &LatticeSpacetime, lo: usize, hi: usize) -> FieldConfig {
    let a = rng.gen_range(lo..=hi);
    let b = rng.gen_range(a..=hi);
    FieldConfig::from_fn(l.nt(), l.nx(), l.p(), |n, _, _| if (a..=b).contains(&n) { rng.gen_range(-1.0..1.0) } else { 0.0 })
}
