//! Finite-dimensional presymplectic spaces, pointed variants, and the
//! linear maps between them.

use std::collections::BTreeSet;

use crate::error::{AlgebraError, Result};
use crate::scalar::{Real, Q};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScalarMode {
    Exact,
    Floating { tolerance: f64 },
}

impl ScalarMode {
    pub fn tolerance(&self) -> f64 {
        match self {
            ScalarMode::Exact => 0.0,
            ScalarMode::Floating { tolerance } => *tolerance,
        }
    }
}

/// A real vector space with a (possibly degenerate) antisymmetric form,
/// given in coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct PreSympSpace<R> {
    labels: Vec<String>,
    form: Vec<Vec<R>>,
    mode: ScalarMode,
    /// Dimension of the left summand when built by `direct_sum`.
    split: Option<usize>,
}

fn max_abs<R: Real>(m: &[Vec<R>]) -> f64 {
    m.iter()
        .flat_map(|r| r.iter())
        .map(|x| x.to_f64().abs())
        .fold(0.0, f64::max)
}

impl<R: Real> PreSympSpace<R> {
    pub fn new(labels: Vec<String>, form: Vec<Vec<R>>, mode: ScalarMode) -> Result<Self> {
        if R::EXACT != (mode == ScalarMode::Exact) {
            return Err(AlgebraError::ModeTypeMismatch);
        }
        let n = labels.len();
        if form.len() != n {
            return Err(AlgebraError::DimensionMismatch { expected: n, found: form.len() });
        }
        for row in &form {
            if row.len() != n {
                return Err(AlgebraError::DimensionMismatch { expected: n, found: row.len() });
            }
        }
        let mut seen = BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(AlgebraError::DuplicateLabel(l.clone()));
            }
        }
        let scale = max_abs(&form).max(1.0);
        for i in 0..n {
            for j in i..n {
                let s = form[i][j].clone() + form[j][i].clone();
                let bad = if R::EXACT {
                    !s.is_zero()
                } else {
                    s.to_f64().abs() > mode.tolerance() * scale
                };
                if bad {
                    return Err(AlgebraError::NotAntisymmetric(i, j));
                }
            }
        }
        Ok(PreSympSpace { labels, form, mode, split: None })
    }

    /// Exact or floating mode chosen from the scalar type; floating uses the default tolerance.
    pub fn with_default_mode(labels: Vec<String>, form: Vec<Vec<R>>) -> Result<Self> {
        let mode = if R::EXACT {
            ScalarMode::Exact
        } else {
            ScalarMode::Floating { tolerance: DEFAULT_TOLERANCE }
        };
        Self::new(labels, form, mode)
    }

    /// Standard space with `dim` generators `e0, e1, ...` and the listed
    /// nonzero entries `sigma(e_i, e_j) = v` (antisymmetric partner implied).
    pub fn from_entries(dim: usize, entries: &[(usize, usize, R)]) -> Result<Self> {
        let mut form = vec![vec![R::zero(); dim]; dim];
        for (i, j, v) in entries {
            if *i >= dim || *j >= dim {
                return Err(AlgebraError::DimensionMismatch { expected: dim, found: (*i).max(*j) + 1 });
            }
            form[*i][*j] = v.clone();
            form[*j][*i] = -v.clone();
        }
        let labels = (0..dim).map(|i| format!("e{i}")).collect();
        Self::with_default_mode(labels, form)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn form(&self) -> &[Vec<R>] {
        &self.form
    }

    pub fn sigma(&self, i: usize, j: usize) -> &R {
        &self.form[i][j]
    }

    pub fn mode(&self) -> ScalarMode {
        self.mode
    }

    pub fn split(&self) -> Option<usize> {
        self.split
    }

    /// `sigma(u, v)` for coordinate vectors.
    pub fn pair(&self, u: &[R], v: &[R]) -> R {
        let mut acc = R::zero();
        for (i, ui) in u.iter().enumerate() {
            if ui.is_zero() {
                continue;
            }
            for (j, vj) in v.iter().enumerate() {
                if vj.is_zero() {
                    continue;
                }
                acc = acc + ui.clone() * self.form[i][j].clone() * vj.clone();
            }
        }
        acc
    }

    /// Whether `x` counts as zero relative to `scale` in this space's mode.
    pub fn negligible(&self, x: &R, scale: f64) -> bool {
        if R::EXACT {
            x.is_zero()
        } else {
            x.to_f64().abs() <= self.mode.tolerance() * scale.max(1.0)
        }
    }

    /// Basis of the null space in reduced echelon form.
    pub fn null_space(&self) -> Vec<Vec<R>> {
        R::kernel_basis(&self.form, self.dim(), self.mode.tolerance())
    }

    pub fn null_dim(&self) -> usize {
        self.dim() - self.rank()
    }

    pub fn rank(&self) -> usize {
        R::matrix_rank(&self.form, self.dim(), self.mode.tolerance())
    }

    /// `sigma(v, .) = 0` within tolerance.
    pub fn is_null(&self, v: &[R]) -> bool {
        let scale = max_abs(&self.form) * v.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max);
        (0..self.dim()).all(|j| {
            let mut e = vec![R::zero(); self.dim()];
            e[j] = R::one();
            self.negligible(&self.pair(v, &e), scale)
        })
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        let mode = combine_modes(self.mode, other.mode)?;
        let (n, m) = (self.dim(), other.dim());
        let mut form = vec![vec![R::zero(); n + m]; n + m];
        for i in 0..n {
            for j in 0..n {
                form[i][j] = self.form[i][j].clone();
            }
        }
        for i in 0..m {
            for j in 0..m {
                form[n + i][n + j] = other.form[i][j].clone();
            }
        }
        let labels = self
            .labels
            .iter()
            .map(|l| format!("({l},0)"))
            .chain(other.labels.iter().map(|l| format!("(0,{l})")))
            .collect();
        Ok(PreSympSpace { labels, form, mode, split: Some(n) })
    }

    /// Subspace spanned by the listed coordinates, with the restricted form.
    pub fn restrict(&self, keep: &[usize]) -> Self {
        let form = keep
            .iter()
            .map(|&i| keep.iter().map(|&j| self.form[i][j].clone()).collect())
            .collect();
        let labels = keep.iter().map(|&i| self.labels[i].clone()).collect();
        PreSympSpace { labels, form, mode: self.mode, split: None }
    }
}

fn combine_modes(a: ScalarMode, b: ScalarMode) -> Result<ScalarMode> {
    match (a, b) {
        (ScalarMode::Exact, ScalarMode::Exact) => Ok(ScalarMode::Exact),
        (ScalarMode::Floating { tolerance: s }, ScalarMode::Floating { tolerance: t }) => {
            Ok(ScalarMode::Floating { tolerance: s.max(t) })
        }
        _ => Err(AlgebraError::ModeMismatch),
    }
}

/// A presymplectic space with a distinguished nonzero null vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PointedPreSympSpace<R> {
    base: PreSympSpace<R>,
    point: Vec<R>,
}

impl<R: Real> PointedPreSympSpace<R> {
    pub fn new(base: PreSympSpace<R>, point: Vec<R>) -> Result<Self> {
        if point.len() != base.dim() {
            return Err(AlgebraError::DimensionMismatch { expected: base.dim(), found: point.len() });
        }
        if point.iter().all(|x| x.is_zero()) {
            return Err(AlgebraError::ZeroPoint);
        }
        if !base.is_null(&point) {
            return Err(AlgebraError::PointNotNull);
        }
        Ok(PointedPreSympSpace { base, point })
    }

    /// The monoidal unit: one generator, zero form, point 1.
    pub fn unit() -> Self {
        let base = PreSympSpace::with_default_mode(vec!["1".into()], vec![vec![R::zero()]])
            .expect("unit space is well formed");
        PointedPreSympSpace { base, point: vec![R::one()] }
    }

    pub fn base(&self) -> &PreSympSpace<R> {
        &self.base
    }

    pub fn point(&self) -> &[R] {
        &self.point
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// Coordinate eliminated when passing to quotients: the last nonzero
    /// entry of the point.
    pub fn pivot(&self) -> usize {
        self.point
            .iter()
            .rposition(|x| !x.is_zero())
            .expect("point is nonzero")
    }

    /// True when the point is a standard basis vector.
    pub fn point_is_basis_vector(&self) -> bool {
        let k = self.pivot();
        self.point[k] == R::one() && self.point.iter().enumerate().all(|(i, x)| i == k || x.is_zero())
    }

    /// Generators other than the pivot, in order.
    pub fn linear_generators(&self) -> Vec<usize> {
        let k = self.pivot();
        (0..self.dim()).filter(|&i| i != k).collect()
    }

    /// Position of generator `i` among the linear generators.
    pub fn lin_index(&self, i: usize) -> Option<usize> {
        let k = self.pivot();
        match i.cmp(&k) {
            std::cmp::Ordering::Less => Some(i),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some(i - 1),
        }
    }

    /// The quotient by the point, in coordinates of the non-pivot generators.
    pub fn linearized(&self) -> PreSympSpace<R> {
        self.base.restrict(&self.linear_generators())
    }

    /// Coordinates of the class of `v` in the linearized space.
    pub fn project(&self, v: &[R]) -> Vec<R> {
        let k = self.pivot();
        let f = v[k].clone() / self.point[k].clone();
        self.linear_generators()
            .into_iter()
            .map(|i| v[i].clone() - f.clone() * self.point[i].clone())
            .collect()
    }

    /// Direct sum with the two points identified.
    pub fn amalgamated_sum(&self, other: &Self) -> Result<Self> {
        let sum = self.base.direct_sum(&other.base)?;
        let n = self.dim();
        let c = n + other.pivot();
        let keep: Vec<usize> = (0..sum.dim()).filter(|&i| i != c).collect();
        let mut space = sum.restrict(&keep);
        space.split = None;
        let mut point: Vec<R> = self.point.clone();
        point.extend(std::iter::repeat_n(R::zero(), other.dim() - 1));
        PointedPreSympSpace::new(space, point)
    }

    /// Matrix of the quotient map from `V ⊕ W` onto the amalgamated sum.
    pub fn amalgamation_projection(&self, other: &Self) -> Vec<Vec<R>> {
        let n = self.dim();
        let total = n + other.dim();
        let c = n + other.pivot();
        let mut normal = self.point.clone();
        normal.extend(other.point.iter().map(|x| -x.clone()));
        let keep: Vec<usize> = (0..total).filter(|&i| i != c).collect();
        keep.iter()
            .map(|&r| {
                (0..total)
                    .map(|col| {
                        let delta = if r == col { R::one() } else { R::zero() };
                        let corr = if col == c {
                            normal[r].clone() / normal[c].clone()
                        } else {
                            R::zero()
                        };
                        delta - corr
                    })
                    .collect()
            })
            .collect()
    }
}

/// The three-dimensional example with `sigma(e1, e2) = 1` and point `e0`.
pub fn sample_v3() -> PointedPreSympSpace<Q> {
    let base = PreSympSpace::from_entries(3, &[(1, 2, Q::from_int(1))]).expect("valid");
    PointedPreSympSpace::new(base, vec![Q::from_int(1), Q::from_int(0), Q::from_int(0)])
        .expect("e0 is null")
}

/// A linear map between coordinate spaces, as a `target.dim × source.dim` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct PreSympMap<R> {
    pub source: PreSympSpace<R>,
    pub target: PreSympSpace<R>,
    pub matrix: Vec<Vec<R>>,
    pub points: Option<(Vec<R>, Vec<R>)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum MorphismViolation {
    NotInjective { rank: usize, columns: usize },
    FormNotPreserved { i: usize, j: usize },
    PointNotPreserved { coordinate: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MorphismReport {
    pub holds: bool,
    pub violation: Option<MorphismViolation>,
}

impl<R: Real> PreSympMap<R> {
    pub fn new(source: PreSympSpace<R>, target: PreSympSpace<R>, matrix: Vec<Vec<R>>) -> Result<Self> {
        if matrix.len() != target.dim() {
            return Err(AlgebraError::DimensionMismatch { expected: target.dim(), found: matrix.len() });
        }
        for row in &matrix {
            if row.len() != source.dim() {
                return Err(AlgebraError::DimensionMismatch { expected: source.dim(), found: row.len() });
            }
        }
        combine_modes(source.mode(), target.mode())?;
        Ok(PreSympMap { source, target, matrix, points: None })
    }

    pub fn pointed(
        source: &PointedPreSympSpace<R>,
        target: &PointedPreSympSpace<R>,
        matrix: Vec<Vec<R>>,
    ) -> Result<Self> {
        let mut map = Self::new(source.base().clone(), target.base().clone(), matrix)?;
        map.points = Some((source.point().to_vec(), target.point().to_vec()));
        Ok(map)
    }

    pub fn identity(space: &PreSympSpace<R>) -> Self {
        let n = space.dim();
        let matrix = (0..n)
            .map(|i| (0..n).map(|j| if i == j { R::one() } else { R::zero() }).collect())
            .collect();
        PreSympMap { source: space.clone(), target: space.clone(), matrix, points: None }
    }

    pub fn apply(&self, v: &[R]) -> Vec<R> {
        self.matrix
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .fold(R::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    fn column(&self, j: usize) -> Vec<R> {
        self.matrix.iter().map(|row| row[j].clone()).collect()
    }

    /// Checks injectivity, form preservation on basis pairs, and (for pointed
    /// maps) that the point is sent to the point.
    pub fn check_morphism(&self) -> MorphismReport {
        let n = self.source.dim();
        let tol = self.source.mode().tolerance().max(self.target.mode().tolerance());
        let transposed: Vec<Vec<R>> = (0..n).map(|j| self.column(j)).collect();
        let rank = R::matrix_rank(&transposed, self.target.dim(), tol);
        if rank < n {
            return fail(MorphismViolation::NotInjective { rank, columns: n });
        }
        let cols: Vec<Vec<R>> = (0..n).map(|j| self.column(j)).collect();
        let scale = max_abs(&self.matrix).powi(2) * max_abs(self.target.form()).max(1.0);
        for i in 0..n {
            for j in (i + 1)..n {
                let d = self.target.pair(&cols[i], &cols[j]) - self.source.sigma(i, j).clone();
                if !self.target.negligible(&d, scale) {
                    return fail(MorphismViolation::FormNotPreserved { i, j });
                }
            }
        }
        if let Some((sp, tp)) = &self.points {
            let img = self.apply(sp);
            for (k, (a, b)) in img.iter().zip(tp).enumerate() {
                if !self.target.negligible(&(a.clone() - b.clone()), 1.0) {
                    return fail(MorphismViolation::PointNotPreserved { coordinate: k });
                }
            }
        }
        MorphismReport { holds: true, violation: None }
    }

    /// For a square morphism: the image of the source null space is exactly
    /// the target null space.
    pub fn maps_null_space_onto(&self) -> bool {
        let tol = self.target.mode().tolerance();
        let images: Vec<Vec<R>> = self.source.null_space().iter().map(|v| self.apply(v)).collect();
        if !images.iter().all(|v| self.target.is_null(v)) {
            return false;
        }
        R::matrix_rank(&images, self.target.dim(), tol) == self.target.null_dim()
    }
}

fn fail(v: MorphismViolation) -> MorphismReport {
    MorphismReport { holds: false, violation: Some(v) }
}

/// Invariant test for isomorphism: equal dimension and equal null dimension.
pub fn isomorphic_by_invariants<R: Real>(v: &PreSympSpace<R>, w: &PreSympSpace<R>) -> bool {
    v.dim() == w.dim() && v.null_dim() == w.null_dim()
}

/// Backtracking search for an invertible form-preserving matrix whose
/// entries are drawn from `entries`. With `points`, the map must also send
/// the first point to the second.
pub fn find_isomorphism<R: Real>(
    v: &PreSympSpace<R>,
    w: &PreSympSpace<R>,
    entries: &[R],
    points: Option<(&[R], &[R])>,
) -> Option<Vec<Vec<R>>> {
    let n = v.dim();
    if w.dim() != n {
        return None;
    }
    let mut candidates: Vec<Vec<R>> = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for c in &candidates {
            for e in entries {
                let mut c2 = c.clone();
                c2.push(e.clone());
                next.push(c2);
            }
        }
        candidates = next;
    }
    candidates.retain(|c| c.iter().any(|x| !x.is_zero()));
    let mut cols: Vec<Vec<R>> = Vec::new();
    if search(v, w, &candidates, &mut cols, points) {
        Some((0..n).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect())
    } else {
        None
    }
}

fn search<R: Real>(
    v: &PreSympSpace<R>,
    w: &PreSympSpace<R>,
    candidates: &[Vec<R>],
    cols: &mut Vec<Vec<R>>,
    points: Option<(&[R], &[R])>,
) -> bool {
    let n = v.dim();
    let j = cols.len();
    if j == n {
        if let Some((p, t)) = points {
            let img: Vec<R> = (0..n)
                .map(|r| (0..n).fold(R::zero(), |acc, c| acc + cols[c][r].clone() * p[c].clone()))
                .collect();
            return img.iter().zip(t).all(|(a, b)| w.negligible(&(a.clone() - b.clone()), 1.0));
        }
        return true;
    }
    for cand in candidates {
        let ok = (0..j).all(|i| {
            let d = w.pair(&cols[i], cand) - v.sigma(i, j).clone();
            w.negligible(&d, 1.0)
        });
        if !ok {
            continue;
        }
        cols.push(cand.clone());
        let independent = R::matrix_rank(cols, n, w.mode().tolerance()) == cols.len();
        if independent && search(v, w, candidates, cols, points) {
            return true;
        }
        cols.pop();
    }
    false
}

/// A space whose scalar mode is only known at run time (e.g. loaded from JSON).
#[derive(Clone, Debug, PartialEq)]
pub enum AnySpace {
    Exact(PreSympSpace<Q>),
    Floating(PreSympSpace<f64>),
}

impl AnySpace {
    pub fn direct_sum(&self, other: &AnySpace) -> Result<AnySpace> {
        match (self, other) {
            (AnySpace::Exact(a), AnySpace::Exact(b)) => Ok(AnySpace::Exact(a.direct_sum(b)?)),
            (AnySpace::Floating(a), AnySpace::Floating(b)) => Ok(AnySpace::Floating(a.direct_sum(b)?)),
            _ => Err(AlgebraError::ModeMismatch),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            AnySpace::Exact(a) => a.dim(),
            AnySpace::Floating(a) => a.dim(),
        }
    }

    pub fn null_dim(&self) -> usize {
        match self {
            AnySpace::Exact(a) => a.null_dim(),
            AnySpace::Floating(a) => a.null_dim(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    #[test]
    fn v3_null_space_is_e0() {
        let v = sample_v3();
        assert_eq!(v.base().null_space(), vec![vec![q(1, 1), q(0, 1), q(0, 1)]]);
    }

    #[test]
    fn non_null_point_rejected() {
        let base = PreSympSpace::from_entries(3, &[(1, 2, q(1, 1))]).unwrap();
        let r = PointedPreSympSpace::new(base, vec![q(0, 1), q(1, 1), q(0, 1)]);
        assert_eq!(r.unwrap_err(), AlgebraError::PointNotNull);
    }

    #[test]
    fn antisymmetry_enforced() {
        let r = PreSympSpace::with_default_mode(
            vec!["a".into(), "b".into()],
            vec![vec![q(0, 1), q(1, 1)], vec![q(1, 1), q(0, 1)]],
        );
        assert_eq!(r.unwrap_err(), AlgebraError::NotAntisymmetric(0, 1));
    }

    #[test]
    fn general_point_projection() {
        let base = PreSympSpace::from_entries(3, &[]).unwrap();
        let v = PointedPreSympSpace::new(base, vec![q(1, 1), q(2, 1), q(0, 1)]).unwrap();
        assert_eq!(v.pivot(), 1);
        assert_eq!(v.project(&[q(1, 1), q(2, 1), q(5, 1)]), vec![q(0, 1), q(5, 1)]);
    }
}
