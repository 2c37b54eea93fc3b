//! Numerical corank of the presymplectic Gram matrix of a family of
//! classes, distinguishing one multiplet from a direct sum of two.

use nalgebra::DMatrix;

use crate::error::{LatticeError, Result};
use crate::field::FieldConfig;
use crate::spacetime::LatticeSpacetime;

/// Singular values below this fraction of the largest count as zero.
pub const CORANK_THRESHOLD: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorankMode {
    /// One multiplet: the family plus one constant class.
    Single,
    /// Direct sum of the first `q` components and the rest: each test
    /// function is projected into one summand, and each summand carries its
    /// own constant class.
    Split(usize),
    /// Test functions only, no constants.
    Linearized,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorankReport {
    pub corank: usize,
    pub dimension: usize,
    pub singular_values: Vec<f64>,
    /// Set when the family alone is degenerate.
    pub warning: Option<String>,
}

/// Gram matrix of `presymp` over the family with zero rows and columns for
/// the constant classes, and its corank at the fixed threshold.
pub fn null_corank_estimate(l: &LatticeSpacetime, family: &[FieldConfig], mode: CorankMode) -> Result<CorankReport> {
    let p = l.p();
    let (members, constants): (Vec<FieldConfig>, usize) = match mode {
        CorankMode::Single => (family.to_vec(), 1),
        CorankMode::Linearized => (family.to_vec(), 0),
        CorankMode::Split(q) => {
            if q == 0 || q >= p {
                return Err(LatticeError::Parameter(format!("split index {q} for p = {p}")));
            }
            // a member lives in the first summand iff it vanishes on the rest
            let mut out = Vec::with_capacity(family.len());
            for f in family {
                let first = f.project_components(0..q);
                let second = f.project_components(q..p);
                out.push(if second.is_zero() { first } else if first.is_zero() { second } else {
                    return Err(LatticeError::Parameter("split family member spans both summands".into()));
                });
            }
            (out, 2)
        }
    };
    let n = members.len();
    let dim = n + constants;
    let images = members.iter().map(|f| l.e_map(f)).collect::<Result<Vec<_>>>()?;
    let mut gram = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..n {
        for j in 0..n {
            gram[(i, j)] = l.inner(&members[i], &images[j]);
        }
    }
    let sv = gram.clone().svd(false, false).singular_values;
    let mut values: Vec<f64> = sv.iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    let top = values.first().copied().unwrap_or(0.0);
    let rank = values.iter().filter(|v| **v > CORANK_THRESHOLD * top).count();
    let warning = (rank < n).then(|| format!("family is degenerate: rank {rank} of {n}"));
    Ok(CorankReport { corank: dim - rank, dimension: dim, singular_values: values, warning })
}
