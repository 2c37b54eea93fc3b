use inhomkg_core::ccr::star_product;
use inhomkg_core::fedosov::{BundleElement, FedosovContext, TensorField};
use inhomkg_core::poisson::ideal_reduce;
use inhomkg_core::presymplectic::PointedPreSympSpace;
use inhomkg_core::sample::{random_bundle, random_cpoly, random_pointed_space};
use inhomkg_core::{q, Coeff, CQ, Q};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{err, Runner, Tally};

fn space(rng: &mut ChaCha8Rng, min_dim: usize, max_dim: usize) -> PointedPreSympSpace<Q> {
    let dim = rng.gen_range(min_dim..=max_dim);
    let general = rng.gen_bool(0.5);
    random_pointed_space(rng, dim, general)
}

/// Each homogeneous piece scaled by its total degree, which is what
/// `δ δ* + δ* δ` does.
fn degree_weighted(w: &BundleElement<CQ>, max: usize) -> BundleElement<CQ> {
    let mut out = w.scale(&CQ::from_re(q(0, 1)));
    for n in 0..=max {
        for m in 0..=max {
            out = out.add(&w.component(n, m).scale(&CQ::from_re(q((n + m) as i64, 1))));
        }
    }
    out
}

pub(super) fn run(r: &mut Runner) {
    let s = r.cfg.samples.clone();
    r.exact("star_product_triality", |rng| {
        let per = s.fedosov_pairs.div_ceil(s.fedosov_spaces);
        let mut t = Tally::default();
        for k in 0..s.fedosov_spaces {
            let v = space(rng, 1, 6);
            let ctx = FedosovContext::new(&v);
            let n = v.dim();
            for i in 0..per {
                let a = random_cpoly(rng, n, 4, 3);
                let b = random_cpoly(rng, n, 4, 3);
                let direct = ideal_reduce(&v, &star_product(v.base(), &a, &b).map_err(err)?).map_err(err)?;
                let fed = ctx.star_fedosov(&a, &b).map_err(err)?;
                let conn = ctx.star_connection(&a, &b).map_err(err)?;
                t.check(fed == direct && conn == direct, || format!("space {k}, pair {i}"));
            }
        }
        t.finish()
    });
    r.exact("koszul_identities", |rng| {
        let mut t = Tally::default();
        for k in 0..s.fedosov_elements {
            let v = space(rng, 1, 5);
            let ctx = FedosovContext::new(&v);
            let w = random_bundle(rng, &ctx, 3, 5);
            t.check(w.delta().delta().is_zero(), || format!("element {k}: delta squared"));
            t.check(w.delta_star().delta_star().is_zero(), || format!("element {k}: delta* squared"));
            let homotopy = w.delta().delta_inv().add(&w.delta_inv().delta()).add(&w.component(0, 0));
            t.check(homotopy == w, || format!("element {k}: homotopy identity"));
            let weighted = w.delta().delta_star().add(&w.delta_star().delta());
            t.check(weighted == degree_weighted(&w, 8), || format!("element {k}: degree operator"));
        }
        t.finish()
    });
    r.exact("fedosov_differential", |rng| {
        let mut t = Tally::default();
        for k in 0..s.fedosov_elements {
            let v = space(rng, 1, 5);
            let ctx = FedosovContext::new(&v);
            let w = random_bundle(rng, &ctx, 3, 5);
            t.check(ctx.nabla_w(&ctx.nabla_w(&w)).is_zero(), || format!("element {k}: connection squared"));
            t.check(ctx.nabla_w(&w.delta()).add(&ctx.nabla_w(&w).delta()).is_zero(), || format!("element {k}: anticommutation"));
            t.check(ctx.fedosov_d(&ctx.fedosov_d(&w)).is_zero(), || format!("element {k}: D squared"));
            let a = random_cpoly(rng, v.dim(), 3, 4);
            let flat = ctx.flat_section(&a).map_err(err)?;
            t.check(ctx.fedosov_d(&flat).is_zero(), || format!("element {k}: flat section"));
            t.check(flat.sigma_proj() == ideal_reduce(&v, &a).map_err(err)?, || format!("element {k}: symbol"));
        }
        t.finish()
    });
    r.exact("connection_torsion_flatness_compatibility", |rng| {
        let mut t = Tally::default();
        for k in 0..s.fedosov_elements {
            let v = space(rng, 2, 5);
            let ctx = FedosovContext::new(&v);
            let (n, m) = (v.dim(), ctx.lin_dim());
            let a = ideal_reduce(&v, &random_cpoly(rng, n, 4, 4)).map_err(err)?;
            let hess = ctx.nabla_tensor(&ctx.nabla_tensor(&TensorField::function(&a)));
            t.check(hess.transpose(0, 1) == hess, || format!("element {k}: torsion"));
            let f = ideal_reduce(&v, &random_cpoly(rng, n, 3, 3)).map_err(err)?;
            let g = ideal_reduce(&v, &random_cpoly(rng, n, 3, 3)).map_err(err)?;
            let alpha = TensorField::one_form(&f, rng.gen_range(0..m));
            let beta = TensorField::one_form(&g, rng.gen_range(0..m));
            let second = ctx.nabla_tensor(&ctx.nabla_tensor(&alpha));
            t.check(second.transpose(1, 2) == second, || format!("element {k}: curvature"));
            let pair = TensorField::function(&ctx.poisson_power(&alpha, &beta));
            let lhs = ctx.nabla_tensor(&pair);
            let rhs = ctx
                .contract_slot(&ctx.nabla_tensor(&alpha), 0, &beta, false)
                .plus(&ctx.contract_slot(&ctx.nabla_tensor(&beta), 0, &alpha, true), true);
            t.check(lhs.plus(&rhs, false).is_zero(), || format!("element {k}: Poisson compatibility"));
        }
        t.finish()
    });
}
