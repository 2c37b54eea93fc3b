use inhomkg_lattice::classes::CLASS_TOLERANCE;
use inhomkg_lattice::dynloc::{admissible_complement, dynloc_fixed_test, kin_dyn_witness, qualifies, DynLocOutcome};
use inhomkg_lattice::scenarios::{
    delocalized_class, dynloc_lattice, random_complement_perturbation, random_local_test, random_region,
};
use inhomkg_lattice::{class_equal, rce, CompactRegion, ObservableClass, Rect};

use super::{err, Measured, Runner, Tally};

const VIOLATION_CASES: usize = 5;

pub(super) fn run(r: &mut Runner) {
    let cfg = r.cfg;
    let lattice = dynloc_lattice().map_err(err);
    r.defect("dynloc_fixed", 1e-9, |rng| {
        let l = lattice.as_ref().map_err(Clone::clone)?;
        let mut worst = 0.0f64;
        for case in 0..cfg.samples.dynloc_cases {
            let k = random_region(rng, l);
            let a = ObservableClass::new(l, random_local_test(rng, l, &k), 0.3).map_err(err)?;
            if !qualifies(l, &k, &a).map_err(err)? {
                return Err(format!("case {case}: local class does not qualify"));
            }
            let pert = random_complement_perturbation(rng, l, &k);
            if pert.is_zero() {
                return Err(format!("case {case}: empty causal complement"));
            }
            match dynloc_fixed_test(l, &k, &a, &[pert], 1e-9).map_err(err)? {
                DynLocOutcome::Fixed { max_defect } => worst = worst.max(max_defect),
                other => return Err(format!("case {case}: {other:?}")),
            }
        }
        Ok(Measured::from(worst))
    });
    r.exact("kin_dyn_witness", |rng| {
        let l = lattice.as_ref().map_err(Clone::clone)?;
        let mut t = Tally::default();
        for i in 0..cfg.samples.dynloc_regions {
            let k = random_region(rng, l);
            let case = delocalized_class(rng, l, &k).map_err(err)?;
            let (a, o) = (&case.class, &case.region);
            let w = match kin_dyn_witness(l, o, a, CLASS_TOLERANCE) {
                Ok(w) => w,
                Err(e) => {
                    t.check(false, || format!("region {i}: {e}"));
                    continue;
                }
            };
            let mask = o.mask(l.nt(), l.nx());
            let inside = w.class.test.support_mask(0.0).iter().zip(&mask).all(|(s, m)| !s || *m);
            t.check(inside, || format!("region {i}: witness leaves the region"));
            let same = class_equal(l, a, &w.class, CLASS_TOLERANCE).map_err(err)?;
            t.check(same.equal, || format!("region {i}: {}", same.diagnostic));
        }
        t.finish()
    });
    r.exact("dynloc_violation_witness", |rng| {
        let l = lattice.as_ref().map_err(Clone::clone)?;
        let nx = l.nx();
        let mut t = Tally::default();
        for i in 0..VIOLATION_CASES {
            let k = random_region(rng, l);
            let r = k.rects[0];
            // same rows on the opposite side of the circle
            let x0 = (r.x0 + nx / 2) % nx;
            let far = CompactRegion::rect(Rect::new(r.t0, r.t1, x0, x0 + (r.x1 - r.x0)));
            let a = ObservableClass::new(l, random_local_test(rng, l, &far), 0.0).map_err(err)?;
            if qualifies(l, &k, &a).map_err(err)? {
                t.check(false, || format!("case {i}: spacelike class qualifies"));
                continue;
            }
            match dynloc_fixed_test(l, &k, &a, &[], 1e-9).map_err(err)? {
                DynLocOutcome::Violation { witness, shift } => {
                    let allowed = admissible_complement(l, &k);
                    let admissible = witness.site_mask().iter().zip(&allowed).all(|(s, ok)| !s || *ok);
                    t.check(admissible, || format!("case {i}: witness leaves the complement"));
                    let moved = rce(l, &witness, &a).map_err(err)?;
                    let cmp = class_equal(l, &moved, &a, CLASS_TOLERANCE).map_err(err)?;
                    t.check(!cmp.equal && shift != 0.0, || format!("case {i}: witness does not move the class"));
                }
                other => t.check(false, || format!("case {i}: {other:?}")),
            }
        }
        t.finish()
    });
}
