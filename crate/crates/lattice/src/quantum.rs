//! The evolution derivative as a commutator: `½ T(h) + Σ vol ⟨j, Φ⟩` is
//! built as a quadratic element over point-evaluation generators, and its
//! commutator with the field of a class is compared against the
//! finite-difference derivative of the evolution.

use std::collections::BTreeMap;

use inhomkg_core::ccr::commutator;
use inhomkg_core::poly::Polynomial;
use inhomkg_core::C64;

use crate::chart::pointed_float_space;
use crate::classes::ObservableClass;
use crate::error::{LatticeError, Result};
use crate::field::FieldConfig;
use crate::rce::{rce_derivative_fd, Perturbation};
use crate::region::dilate_mask;
use crate::spacetime::LatticeSpacetime;

#[derive(Clone, Debug, PartialEq)]
pub struct QuantumRceReport {
    /// Real part of `i [X, Φ(A)]` evaluated on the solution.
    pub commutator: f64,
    /// Its imaginary part, zero up to round-off.
    pub imaginary: f64,
    pub fd_derivative: f64,
    pub relative_error: f64,
    pub generators: usize,
}

type Lin = BTreeMap<usize, f64>;

fn lin_add(a: &mut Lin, i: usize, c: f64) {
    *a.entry(i).or_insert(0.0) += c;
}

fn lin_poly(a: &Lin, n: usize) -> Polynomial<C64> {
    let mut p = Polynomial::zero(n);
    for (&i, &c) in a {
        if c != 0.0 {
            p.add_term(inhomkg_core::poly::Monomial::var(i), C64::new(c, 0.0));
        }
    }
    p
}

/// Builds `X = ½ Σ vol h_ab T^{ab} + Σ vol ⟨j, φ⟩` over generators for the
/// sites in `index`, with the field at site `s` standing for generator
/// `index[s]`.
fn generator_stress(
    l: &LatticeSpacetime,
    pert: &Perturbation,
    index: &BTreeMap<(usize, usize, usize), usize>,
    nvars: usize,
) -> Result<Polynomial<C64>> {
    let g = l.geometry();
    let (nt, nx, p) = (g.nt, g.nx, g.p);
    let m2 = g.mass * g.mass;
    let var = |n: usize, x: usize, c: usize| -> Result<usize> {
        index.get(&(n, x, c)).copied().ok_or_else(|| LatticeError::Geometry(format!("missing generator at ({n},{x},{c})")))
    };
    let h = &pert.h;
    let mut x_poly = Polynomial::zero(nvars);
    let mut linear: Lin = BTreeMap::new();
    for n in 1..nt - 1 {
        for x in 0..nx {
            let s = n * nx + x;
            let (htt, htx, hxx) = (h.g_tt[s], h.g_tx[s], h.g_xx[s]);
            let w = l.vol()[s];
            for c in 0..p {
                let jv = pert.j[(n, x, c)];
                if jv != 0.0 {
                    lin_add(&mut linear, var(n, x, c)?, w * jv);
                }
            }
            if htt == 0.0 && htx == 0.0 && hxx == 0.0 {
                continue;
            }
            let (utt, utx, uxx) = l.inverse_metric(s);
            // trace h_ab g^{ab} multiplies the scalar part of T
            let trace = htt * utt + 2.0 * htx * utx + hxx * uxx;
            let (xl, xr) = ((x + nx - 1) % nx, (x + 1) % nx);
            for c in 0..p {
                let mut dt: Lin = BTreeMap::new();
                lin_add(&mut dt, var(n + 1, x, c)?, 0.5 / g.dt);
                lin_add(&mut dt, var(n - 1, x, c)?, -0.5 / g.dt);
                let mut dx: Lin = BTreeMap::new();
                lin_add(&mut dx, var(n, xr, c)?, 0.5 / g.dx);
                lin_add(&mut dx, var(n, xl, c)?, -0.5 / g.dx);
                let pt = lin_poly(&dt, nvars);
                let px = lin_poly(&dx, nvars);
                let up_t = &pt.scale(&C64::new(utt, 0.0)) + &px.scale(&C64::new(utx, 0.0));
                let up_x = &pt.scale(&C64::new(utx, 0.0)) + &px.scale(&C64::new(uxx, 0.0));
                // h_ab ∇^a φ ∇^b φ
                let grad = &(&(&up_t * &up_t).scale(&C64::new(htt, 0.0)) + &(&up_t * &up_x).scale(&C64::new(2.0 * htx, 0.0)))
                    + &(&up_x * &up_x).scale(&C64::new(hxx, 0.0));
                // ∇_c φ ∇^c φ
                let norm = &(&up_t * &pt) + &(&up_x * &px);
                let v = Polynomial::var(nvars, var(n, x, c)?);
                let mass = (&v * &v).scale(&C64::new(0.5 * m2, 0.0));
                let scalar = &(&norm.scale(&C64::new(-0.5, 0.0)) + &mass) + &v.scale(&C64::new(l.source()[(n, x, c)], 0.0));
                let site = &grad + &scalar.scale(&C64::new(trace, 0.0));
                x_poly = &x_poly + &site.scale(&C64::new(0.5 * w, 0.0));
            }
        }
    }
    Ok(&x_poly + &lin_poly(&linear, nvars))
}

/// Compares `i [½ T(h) + Σ vol ⟨j, Φ⟩, Φ(A)]` on `φ` with the
/// finite-difference derivative of the evolution at step `step`.
pub fn quantum_rce_commutator_check(
    l: &LatticeSpacetime,
    pert: &Perturbation,
    a: &ObservableClass,
    phi: &FieldConfig,
    step: f64,
) -> Result<QuantumRceReport> {
    a.check_on(l)?;
    pert.validate(l)?;
    let (nt, nx, p) = (l.nt(), l.nx(), l.p());
    let region = dilate_mask(&pert.site_mask(), 1, nt, nx);
    let mut index = BTreeMap::new();
    let mut sites = Vec::new();
    for (s, inside) in region.iter().enumerate() {
        if *inside {
            for c in 0..p {
                index.insert((s / nx, s % nx, c), 1 + sites.len());
                sites.push((s / nx, s % nx, c));
            }
        }
    }
    let dim = sites.len() + 2;
    let a_var = dim - 1;
    let mut form = vec![vec![0.0; dim]; dim];
    if !sites.is_empty() {
        for (t, &(nt_, xt, ct)) in sites.iter().enumerate() {
            let e = l.e_map(&l.delta(nt_, xt, ct))?;
            for (s, &(ns, xs, cs)) in sites.iter().enumerate() {
                form[1 + s][1 + t] = e[(ns, xs, cs)];
            }
        }
    }
    let ea = l.e_map(&a.test)?;
    for (s, &(n, x, c)) in sites.iter().enumerate() {
        form[1 + s][a_var] = ea[(n, x, c)];
        form[a_var][1 + s] = -ea[(n, x, c)];
    }
    let mut labels = vec!["1".to_string()];
    labels.extend(sites.iter().map(|(n, x, c)| format!("phi[{n},{x},{c}]")));
    labels.push("A".to_string());
    let space = pointed_float_space(labels, form)?;
    let xq = generator_stress(l, pert, &index, dim)?;
    let field = Polynomial::var(dim, a_var);
    let comm = commutator(space.base(), &xq, &field)?.scale(&C64::new(0.0, 1.0));
    let mut values = vec![C64::new(0.0, 0.0); dim];
    values[0] = C64::new(1.0, 0.0);
    for (s, &(n, x, c)) in sites.iter().enumerate() {
        values[1 + s] = C64::new(phi[(n, x, c)], 0.0);
    }
    values[a_var] = C64::new(l.inner(&a.test, phi) + a.alpha, 0.0);
    let v = comm.evaluate(&values);
    let fd = rce_derivative_fd(l, pert, a, phi, step)?;
    let relative_error = (v.re - fd).abs() / fd.abs().max(f64::MIN_POSITIVE);
    Ok(QuantumRceReport { commutator: v.re, imaginary: v.im, fd_derivative: fd, relative_error, generators: dim })
}
