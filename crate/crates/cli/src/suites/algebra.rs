use inhomkg_core::ccr::{kappa_q, kappa_q_inv, quantum_ideal_reduce, star_product, star_word, state_evaluate, QuasiFreeState};
use inhomkg_core::poisson::{
    distinguished, evaluate, ideal_reduce, is_normal_form, kappa_from_lin, kappa_to_lin, poisson_bracket, AffinePoint,
};
use inhomkg_core::poly::Polynomial;
use inhomkg_core::presymplectic::{PointedPreSympSpace, PreSympSpace, ScalarMode};
use inhomkg_core::sample::{random_cpoly, random_pointed_space, random_poly, random_state, small_rational};
use inhomkg_core::{q, Coeff, Real, C64, CQ, Q};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{err, CaseResult, Measured, Runner, Tally};
use crate::config::ScalarSetting;

fn space(rng: &mut ChaCha8Rng, min_dim: usize) -> PointedPreSympSpace<Q> {
    let dim = rng.gen_range(min_dim..=6);
    let general = rng.gen_bool(0.5);
    random_pointed_space(rng, dim, general)
}

/// Random point sending the distinguished element to 1.
fn random_point(rng: &mut ChaCha8Rng, v: &PointedPreSympSpace<Q>) -> AffinePoint<Q> {
    let n = v.dim();
    let k = v.pivot();
    let mut x: Vec<Q> = (0..n).map(|_| small_rational(rng)).collect();
    let rest = (0..n).filter(|&i| i != k).fold(q(0, 1), |acc, i| acc + v.point()[i].clone() * x[i].clone());
    x[k] = (q(1, 1) - rest) / v.point()[k].clone();
    AffinePoint::new(x)
}

/// `d/dt a(p + t e_i)` at 0 from Newton forward differences on the nodes
/// `0..=deg`, exact for degree at most `deg`.
fn partial(a: &Polynomial<Q>, p: &[Q], i: usize, deg: usize) -> Q {
    let g = |t: i64| {
        let mut x = p.to_vec();
        x[i] += q(t, 1);
        a.evaluate(&x)
    };
    let mut diffs: Vec<Q> = (0..=deg as i64).map(g).collect();
    let mut acc = q(0, 1);
    for k in 1..=deg {
        for j in 0..diffs.len() - k {
            diffs[j] = diffs[j + 1].clone() - diffs[j].clone();
        }
        let term = diffs[0].clone() / q(k as i64, 1);
        acc += if k % 2 == 1 { term } else { -term };
    }
    acc
}

fn bracket_oracle(s: &PreSympSpace<Q>, a: &Polynomial<Q>, b: &Polynomial<Q>, p: &[Q]) -> Q {
    let n = s.dim();
    let (da, db) = (a.degree().max(1), b.degree().max(1));
    let ga: Vec<Q> = (0..n).map(|i| partial(a, p, i, da)).collect();
    let gb: Vec<Q> = (0..n).map(|i| partial(b, p, i, db)).collect();
    let mut acc = q(0, 1);
    for (i, gi) in ga.iter().enumerate() {
        for (j, gj) in gb.iter().enumerate() {
            acc += s.sigma(i, j).clone() * gi.clone() * gj.clone();
        }
    }
    acc
}

fn to_float_space(v: &PointedPreSympSpace<Q>) -> Result<PointedPreSympSpace<f64>, String> {
    let b = v.base();
    let form = b.form().iter().map(|r| r.iter().map(Real::to_f64).collect()).collect();
    let base = PreSympSpace::new(b.labels().to_vec(), form, ScalarMode::Floating { tolerance: 1e-9 }).map_err(err)?;
    PointedPreSympSpace::new(base, v.point().iter().map(Real::to_f64).collect()).map_err(err)
}

fn to_float_poly(a: &Polynomial<CQ>) -> Polynomial<C64> {
    a.map_coeffs(|c| C64::new(Real::to_f64(&c.re), Real::to_f64(&c.im)))
}

fn to_float_state(s: &QuasiFreeState<Q>, v: &PointedPreSympSpace<f64>) -> Result<QuasiFreeState<f64>, String> {
    let mean = s.mean.iter().map(Real::to_f64).collect();
    let cov = s.covariance.iter().map(|r| r.iter().map(Real::to_f64).collect()).collect();
    QuasiFreeState::new(v, mean, cov).map_err(err)
}

/// Largest coefficient difference relative to the larger operand.
fn poly_rel(a: &Polynomial<C64>, b: &Polynomial<C64>) -> f64 {
    let size = |p: &Polynomial<C64>| p.terms().values().fold(0.0f64, |m, c| m.max(c.norm()));
    size(&(a - b)) / size(a).max(size(b)).max(1.0)
}

fn state_checks(rng: &mut ChaCha8Rng, samples: usize) -> CaseResult {
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let v = space(rng, 1);
        let s = v.base();
        let n = v.dim();
        let st = random_state(rng, &v);
        let ev = |a: &Polynomial<CQ>| state_evaluate(&v, &st, a).map_err(err);
        let e0 = distinguished::<Q, CQ>(&v);
        let one = CQ::from_re(q(1, 1));
        let g = &e0 - &Polynomial::one(n);
        let b = random_cpoly(rng, n, 2, 3);
        let c = random_cpoly(rng, n, 2, 3);
        for d in [
            ev(&e0)? - one.clone(),
            ev(&star_product(s, &e0, &e0).map_err(err)?)? - one,
            ev(&star_word(s, &[b, g, c]).map_err(err)?)?,
        ] {
            // a nonzero rational never reports as zero
            let m = Real::to_f64(&d.re).abs() + Real::to_f64(&d.im).abs();
            let nonzero = d.re != q(0, 1) || d.im != q(0, 1);
            worst = worst.max(if nonzero { m.max(f64::MIN_POSITIVE) } else { m });
        }
    }
    Ok(worst.into())
}

/// `Σ |c_m| |ω(m)|` over the terms of `a`: the size of the sum before
/// cancellation.
fn evaluation_scale(v: &PointedPreSympSpace<f64>, st: &QuasiFreeState<f64>, a: &Polynomial<C64>) -> Result<f64, String> {
    let mut acc = 0.0;
    for (m, c) in a.terms() {
        let single = Polynomial::monomial(v.dim(), m.clone(), C64::new(1.0, 0.0));
        acc += c.norm() * state_evaluate(v, st, &single).map_err(err)?.norm();
    }
    Ok(acc.max(1.0))
}

fn floating_state_checks(rng: &mut ChaCha8Rng, samples: usize) -> CaseResult {
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let v = space(rng, 1);
        let st = random_state(rng, &v);
        let n = v.dim();
        let vf = to_float_space(&v)?;
        let sf = to_float_state(&st, &vf)?;
        let e0 = distinguished::<f64, C64>(&vf);
        let g = &e0 - &Polynomial::one(n);
        let b = to_float_poly(&random_cpoly(rng, n, 2, 3));
        let c = to_float_poly(&random_cpoly(rng, n, 2, 3));
        let checks = [
            (e0.clone(), 1.0),
            (star_product(vf.base(), &e0, &e0).map_err(err)?, 1.0),
            (star_word(vf.base(), &[b, g, c]).map_err(err)?, 0.0),
        ];
        for (a, expected) in checks {
            let d = (state_evaluate(&vf, &sf, &a).map_err(err)? - expected).norm();
            worst = worst.max(d / evaluation_scale(&vf, &sf, &a)?);
        }
    }
    Ok(worst.into())
}

pub(super) fn run(r: &mut Runner) {
    let n_samples = r.cfg.samples.algebra;
    r.exact("poisson_jacobi_leibniz", |rng| {
        let mut t = Tally::default();
        for k in 0..n_samples {
            let v = space(rng, 1);
            let s = v.base();
            let n = v.dim();
            let (a, b, c) = (random_poly(rng, n, 3, 2), random_poly(rng, n, 3, 2), random_poly(rng, n, 3, 2));
            let br = |x: &Polynomial<Q>, y: &Polynomial<Q>| poisson_bracket(s, x, y).map_err(err);
            let jac = &(&br(&a, &br(&b, &c)?)? + &br(&b, &br(&c, &a)?)?) + &br(&c, &br(&a, &b)?)?;
            t.check(jac.is_zero(), || format!("triple {k}: Jacobi"));
            let leib = &br(&a, &(&b * &c))? - &(&(&br(&a, &b)? * &c) + &(&b * &br(&a, &c)?));
            t.check(leib.is_zero(), || format!("triple {k}: Leibniz"));
            t.check((&br(&a, &b)? + &br(&b, &a)?).is_zero(), || format!("triple {k}: antisymmetry"));
        }
        t.finish()
    });
    r.exact("bracket_derivative_oracle", |rng| {
        let mut t = Tally::default();
        for k in 0..n_samples {
            let v = space(rng, 1);
            let n = v.dim();
            let (a, b) = (random_poly(rng, n, 3, 3), random_poly(rng, n, 3, 3));
            let p: Vec<Q> = (0..n).map(|_| small_rational(rng)).collect();
            let br = poisson_bracket(v.base(), &a, &b).map_err(err)?;
            let lhs = evaluate(&br, &AffinePoint::new(p.clone())).map_err(err)?;
            t.check(lhs == bracket_oracle(v.base(), &a, &b, &p), || format!("pair {k}"));
        }
        t.finish()
    });
    r.exact("state_admissibility", |rng| state_checks(rng, n_samples));
    r.exact("classical_quotient", |rng| {
        let mut t = Tally::default();
        for k in 0..n_samples {
            let v = space(rng, 1);
            let n = v.dim();
            let (x, y) = (random_poly(rng, n, 4, 4), random_poly(rng, n, 3, 3));
            let red = |a: &Polynomial<Q>| ideal_reduce(&v, a).map_err(err);
            let rx = red(&x)?;
            t.check(is_normal_form(&v, &rx) && red(&rx)? == rx, || format!("element {k}: idempotence"));
            t.check(red(&(&x * &y))? == red(&(&rx * &red(&y)?))?, || format!("element {k}: multiplicativity"));
            let p = random_point(rng, &v);
            t.check(evaluate(&rx, &p).map_err(err)? == evaluate(&x, &p).map_err(err)?, || format!("element {k}: evaluation"));
        }
        t.finish()
    });
    r.exact("quantum_quotient", |rng| {
        let mut t = Tally::default();
        for k in 0..n_samples {
            let v = space(rng, 1);
            let s = v.base();
            let n = v.dim();
            let (x, y) = (random_cpoly(rng, n, 3, 3), random_cpoly(rng, n, 3, 3));
            let red = |a: &Polynomial<CQ>| quantum_ideal_reduce(&v, a).map_err(err);
            let rx = red(&x)?;
            t.check(red(&rx)? == rx, || format!("element {k}: idempotence"));
            let lhs = red(&star_product(s, &x, &y).map_err(err)?)?;
            let rhs = red(&star_product(s, &rx, &red(&y)?).map_err(err)?)?;
            t.check(lhs == rhs, || format!("element {k}: multiplicativity"));
            let g = &distinguished::<Q, CQ>(&v) - &Polynomial::one(n);
            t.check(red(&star_word(s, &[x.clone(), g, y.clone()]).map_err(err)?)?.is_zero(), || format!("element {k}: ideal"));
        }
        t.finish()
    });
    r.exact("kappa_round_trips", |rng| {
        let mut t = Tally::default();
        for k in 0..n_samples {
            let v = space(rng, 2);
            let n = v.dim();
            let base = random_point(rng, &v);
            let x = random_poly(rng, n, 4, 5);
            let lin = kappa_to_lin(&v, &x, &base).map_err(err)?;
            let back = kappa_from_lin(&v, &lin, &base).map_err(err)?;
            t.check(back == ideal_reduce(&v, &x).map_err(err)?, || format!("element {k}: classical inverse"));
            t.check(kappa_to_lin(&v, &back, &base).map_err(err)? == lin, || format!("element {k}: classical forward"));
            let st = random_state(rng, &v);
            let xq = random_cpoly(rng, n, 4, 5);
            let lq = kappa_q(&v, &xq, &st).map_err(err)?;
            let bq = kappa_q_inv(&v, &lq, &st).map_err(err)?;
            t.check(bq == quantum_ideal_reduce(&v, &xq).map_err(err)?, || format!("element {k}: quantum inverse"));
            t.check(kappa_q(&v, &bq, &st).map_err(err)? == lq, || format!("element {k}: quantum forward"));
        }
        t.finish()
    });
    if r.cfg.scalar_mode == ScalarSetting::Floating {
        r.defect("state_admissibility_floating", 1e-12, |rng| floating_state_checks(rng, n_samples));
        r.defect("quantum_quotient_floating", 1e-12, |rng| {
            let mut worst = 0.0f64;
            for _ in 0..n_samples {
                let v = space(rng, 1);
                let vf = to_float_space(&v)?;
                let n = v.dim();
                let (x, y) = (random_cpoly(rng, n, 3, 3), random_cpoly(rng, n, 3, 3));
                let exact = quantum_ideal_reduce(&v, &star_product(v.base(), &x, &y).map_err(err)?).map_err(err)?;
                let float = quantum_ideal_reduce(
                    &vf,
                    &star_product(vf.base(), &to_float_poly(&x), &to_float_poly(&y)).map_err(err)?,
                )
                .map_err(err)?;
                worst = worst.max(poly_rel(&to_float_poly(&exact), &float));
            }
            Ok(Measured::from(worst))
        });
    }
}
