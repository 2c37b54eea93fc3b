use inhomkg_core::ccr::star_product;
use inhomkg_core::poisson::{ideal_reduce, poisson_bracket, tensor_factorize, CompositionIso};
use inhomkg_core::poly::Polynomial;
use inhomkg_core::sample::{random_cpoly, random_multiplet_space, random_poly};
use inhomkg_core::Q;
use inhomkg_lattice::corank::{null_corank_estimate, CorankMode};
use inhomkg_lattice::scenarios::{corank_family, corank_lattice};

use super::{err, CaseResult, Kind, Measured, Runner, Tally};
use crate::report::Semantics;

const FAMILY: usize = 40;

fn corank(rng: &mut rand_chacha::ChaCha8Rng, mode: CorankMode) -> CaseResult {
    let l = corank_lattice(2).map_err(err)?;
    let split = match mode {
        CorankMode::Split(q) => Some(q),
        _ => None,
    };
    let family = corank_family(rng, &l, FAMILY, split);
    let r = null_corank_estimate(&l, &family, mode).map_err(err)?;
    let tail: Vec<String> = r.singular_values.iter().rev().take(3).map(|v| format!("{v:.2e}")).collect();
    let mut note = format!("dimension {}, smallest singular values {}", r.dimension, tail.join(" "));
    if let Some(w) = r.warning {
        note.push_str(&format!("; {w}"));
    }
    Ok(Measured { value: r.corank as f64, note: Some(note) })
}

pub(super) fn run(r: &mut Runner) {
    let samples = r.cfg.samples.composition;
    r.exact("split_isomorphism", |rng| {
        let (whole, comp) = random_multiplet_space(rng, 3, 2);
        let iso = CompositionIso::split(&whole, &comp, 1).map_err(err)?;
        let sum = iso.sum_space().map_err(err)?;
        let (lb, rb) = (iso.left.base().clone(), iso.right.base().clone());
        let mut t = Tally::default();
        for k in 0..samples {
            let x = random_poly(rng, sum.dim(), 3, 4);
            let y = random_poly(rng, sum.dim(), 2, 3);
            let (tx, ty) = (tensor_factorize(&sum, &x).map_err(err)?, tensor_factorize(&sum, &y).map_err(err)?);
            let red = |a: &Polynomial<Q>| ideal_reduce(&whole, a).map_err(err);
            let img = red(&iso.eta(&tx))?;
            t.check(iso.reduce_tensor(&iso.eta_inv(&img)) == iso.reduce_tensor(&tx), || format!("element {k}: round trip"));
            t.check(red(&iso.eta(&tx.mul(&ty)))? == red(&(&iso.eta(&tx) * &iso.eta(&ty)))?, || format!("element {k}: product"));
            let br = tx.bracket(&ty, &lb, &rb).map_err(err)?;
            let whole_br = poisson_bracket(whole.base(), &iso.eta(&tx), &iso.eta(&ty)).map_err(err)?;
            t.check(red(&iso.eta(&br))? == red(&whole_br)?, || format!("element {k}: bracket"));
            let (cx, cy) = (random_cpoly(rng, sum.dim(), 3, 3), random_cpoly(rng, sum.dim(), 2, 3));
            let (tcx, tcy) = (tensor_factorize(&sum, &cx).map_err(err)?, tensor_factorize(&sum, &cy).map_err(err)?);
            let star_l = |a: &_, b: &_| star_product(&lb, a, b).expect("left factor");
            let star_r = |a: &_, b: &_| star_product(&rb, a, b).expect("right factor");
            let lhs = ideal_reduce(&whole, &iso.eta(&tcx.product_with(&tcy, star_l, star_r))).map_err(err)?;
            let rhs = star_product(whole.base(), &iso.eta(&tcx), &iso.eta(&tcy)).map_err(err)?;
            t.check(lhs == ideal_reduce(&whole, &rhs).map_err(err)?, || format!("element {k}: star"));
        }
        t.finish()
    });
    r.case("corank_single", Kind::Exact, Semantics::Exact, 1.0, 0.0, |rng| corank(rng, CorankMode::Single));
    r.case("corank_split", Kind::Exact, Semantics::Exact, 2.0, 0.0, |rng| corank(rng, CorankMode::Split(1)));
    r.case("corank_linearized", Kind::Exact, Semantics::Exact, 0.0, 0.0, |rng| corank(rng, CorankMode::Linearized));
}
