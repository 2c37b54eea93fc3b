mod common;

use common::*;
use inhomkg_lattice::{FieldConfig, GreenKind, LatticeError, LatticeGeometry, LatticeSpacetime, Metric};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn constant_field_gives_mass_term() {
    let l = LatticeSpacetime::flat_sourceless(geom(12, 10, 1.3, 2)).unwrap();
    let phi = FieldConfig::from_fn(12, 10, 2, |_, _, _| 0.75);
    let k = l.kg_apply(&phi).unwrap();
    for n in 1..11 {
        for x in 0..10 {
            for c in 0..2 {
                assert!((k[(n, x, c)] - 1.3 * 1.3 * 0.75).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn lattice_mode_has_discrete_symbol() {
    let (nx, m) = (16, 0.8);
    let l = LatticeSpacetime::flat_sourceless(geom(10, nx, m, 1)).unwrap();
    let dx = l.geometry().dx;
    for kk in 1..4 {
        let k = 2.0 * std::f64::consts::PI * kk as f64;
        let phi = FieldConfig::from_fn(10, nx, 1, |_, x, _| (k * x as f64 * dx).cos());
        let out = l.kg_apply(&phi).unwrap();
        let symbol = 4.0 * (k * dx / 2.0).sin().powi(2) / (dx * dx);
        for n in 1..9 {
            for x in 0..nx {
                assert!((out[(n, x, 0)] - (m * m + symbol) * phi[(n, x, 0)]).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn invalid_lattices_rejected() {
    let g = geom(12, 8, 1.0, 1);
    let mut bad = Metric::flat(&g);
    bad.g_tt[20] = -1.0;
    assert!(matches!(LatticeSpacetime::new(g, bad, FieldConfig::zeros(12, 8, 1)), Err(LatticeError::NotLorentzian { .. })));
    let mut mixed = Metric::flat(&g);
    mixed.g_tx[20] = 0.1;
    assert!(matches!(LatticeSpacetime::new(g, mixed, FieldConfig::zeros(12, 8, 1)), Err(LatticeError::MixedMetric { .. })));
    let fast = LatticeGeometry { dt: 1.5 * g.dx, ..g };
    assert!(matches!(LatticeSpacetime::flat_sourceless(fast), Err(LatticeError::Causality { .. })));
    let thin = LatticeGeometry { margin: 1, ..g };
    assert!(LatticeSpacetime::flat_sourceless(thin).is_err());
    let l = LatticeSpacetime::flat_sourceless(g).unwrap();
    let mut edge = l.zeros();
    edge[(1, 3, 0)] = 1.0;
    assert_eq!(l.green(&edge, GreenKind::Retarded), Err(LatticeError::Support { row: 1 }));
    assert!(l.kg_apply(&FieldConfig::zeros(12, 8, 2)).is_err());
}

#[test]
fn zero_source_gives_zero() {
    let l = curved(16, 8, 1.0, 2);
    assert!(l.green(&l.zeros(), GreenKind::Retarded).unwrap().is_zero());
    assert!(l.e_map(&l.zeros()).unwrap().is_zero());
}

/// Dense matrix of KG restricted to rows `1..nt-1` acting on fields that
/// vanish on the rows in `fixed`, built column by column from unit fields.
fn dense_kg(l: &LatticeSpacetime, unknown_rows: std::ops::Range<usize>) -> DMatrix<f64> {
    let (nt, nx, p) = l.shape();
    let w = nx * p;
    let rows = 1..nt - 1;
    let mut m = DMatrix::zeros(rows.len() * w, unknown_rows.len() * w);
    for (j, n) in unknown_rows.clone().enumerate() {
        for k in 0..w {
            let mut e = l.zeros();
            e.row_mut(n)[k] = 1.0;
            let out = l.kg_apply(&e).unwrap();
            for (i, r) in rows.clone().enumerate() {
                for q in 0..w {
                    m[(i * w + q, j * w + k)] = out.row(r)[q];
                }
            }
        }
    }
    m
}

fn dense_green(l: &LatticeSpacetime, f: &FieldConfig, kind: GreenKind) -> FieldConfig {
    let (nt, nx, p) = l.shape();
    let w = nx * p;
    let unknown = match kind {
        GreenKind::Retarded => 2..nt,
        GreenKind::Advanced => 0..nt - 2,
    };
    let a = dense_kg(l, unknown.clone());
    let b = DVector::from_iterator((nt - 2) * w, (1..nt - 1).flat_map(|r| f.row(r).to_vec()));
    let x = a.lu().solve(&b).expect("square triangular system");
    let mut u = l.zeros();
    for (j, n) in unknown.enumerate() {
        u.row_mut(n).copy_from_slice(&x.as_slice()[j * w..(j + 1) * w]);
    }
    u
}

#[test]
fn green_operators_match_dense_solve() {
    let l = curved(16, 8, 1.1, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let f = random_interior(&mut rng, &l);
        for kind in [GreenKind::Retarded, GreenKind::Advanced] {
            let u = l.green(&f, kind).unwrap();
            let oracle = dense_green(&l, &f, kind);
            assert!(u.sub(&oracle).max_abs() <= 1e-9 * oracle.max_abs());
            let back = l.kg_apply(&u).unwrap();
            assert!(back.sub(&f).max_abs() <= 1e-9 * f.max_abs());
        }
    }
}

#[test]
fn presymplectic_value_matches_dense_oracle() {
    let g = geom(16, 8, 1.0, 1);
    let l = LatticeSpacetime::flat_sourceless(g).unwrap();
    let bump = |n0: f64, x0: f64| {
        FieldConfig::from_fn(16, 8, 1, |n, x, _| {
            let (dn, dx) = (n as f64 - n0, x as f64 - x0);
            if (2..14).contains(&n) && dn.abs() < 3.0 && dx.abs() < 3.0 {
                (1.0 - (dn / 3.0).powi(2)).powi(2) * (1.0 - (dx / 3.0).powi(2)).powi(2)
            } else {
                0.0
            }
        })
    };
    let (f, h) = (bump(5.0, 3.0), bump(9.0, 4.0));
    let e_oracle = dense_green(&l, &h, GreenKind::Advanced).sub(&dense_green(&l, &h, GreenKind::Retarded));
    let oracle = l.inner(&f, &e_oracle);
    let value = l.presymp(&f, &h).unwrap();
    assert!(oracle.abs() > 1e-6);
    assert!(rel(value, oracle) < 1e-10, "{value} vs {oracle}");
}

#[test]
fn support_laws_of_green_operators() {
    let l = curved(24, 12, 0.5, 1);
    let mut f = l.zeros();
    f[(10, 5, 0)] = 1.0;
    let ret = l.green(&f, GreenKind::Retarded).unwrap();
    let adv = l.green(&f, GreenKind::Advanced).unwrap();
    for n in 0..24 {
        for x in 0..12 {
            let d = inhomkg_lattice::region::circle_dist(x, 5, 12);
            if ret[(n, x, 0)] != 0.0 {
                assert!(n > 10 && d < n - 10);
            }
            if adv[(n, x, 0)] != 0.0 {
                assert!(n < 10 && d < 10 - n);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn kg_is_linear(seed in any::<u64>(), a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let l = curved(20, 10, 0.9, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, g) = (random_rows(&mut rng, &l, 0, 19), random_rows(&mut rng, &l, 0, 19));
        let lhs = l.kg_apply(&f.scale(a).axpy(b, &g)).unwrap();
        let rhs = l.kg_apply(&f).unwrap().scale(a).axpy(b, &l.kg_apply(&g).unwrap());
        prop_assert!(lhs.sub(&rhs).max_abs() <= 1e-10 * rhs.max_abs().max(1.0));
    }

    #[test]
    fn e_map_kills_kg_images(seed in any::<u64>()) {
        let l = curved(24, 10, 1.0, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_compact(&mut rng, &l);
        let kh = l.kg_apply(&h).unwrap();
        let e = l.e_map(&kh).unwrap();
        prop_assert!(e.max_abs() <= 1e-9 * h.max_abs());
        let psi = random_interior(&mut rng, &l);
        let total_vol: f64 = l.vol().iter().sum();
        let scale = kh.max_abs() * l.e_map(&psi).unwrap().max_abs() * total_vol;
        prop_assert!(l.presymp(&kh, &psi).unwrap().abs() <= 1e-9 * scale.max(1.0));
    }

    #[test]
    fn green_operators_are_adjoint_and_form_antisymmetric(seed in any::<u64>()) {
        let l = curved(24, 10, 0.7, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_interior(&mut rng, &l);
        let g = random_interior(&mut rng, &l);
        let lhs = l.inner(&l.green(&f, GreenKind::Retarded).unwrap(), &g);
        let rhs = l.inner(&f, &l.green(&g, GreenKind::Advanced).unwrap());
        prop_assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs().max(rhs.abs()).max(1e-3));
        let s1 = l.presymp(&f, &g).unwrap();
        let s2 = l.presymp(&g, &f).unwrap();
        prop_assert!((s1 + s2).abs() <= 1e-9 * s1.abs().max(1e-3));
        prop_assert!(l.presymp(&f, &f).unwrap().abs() <= 1e-9 * s1.abs().max(1e-3));
    }

    #[test]
    fn e_map_solves_homogeneous_equation(seed in any::<u64>()) {
        let l = curved(24, 10, 0.7, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_interior(&mut rng, &l);
        let e = l.e_map(&f).unwrap();
        prop_assert!(l.kg_apply(&e).unwrap().max_abs() <= 1e-9 * e.max_abs() / (l.geometry().dt * l.geometry().dt));
    }
}
