//! Dense linear algebra over `Real` scalars.
//!
//! Exact elimination is used for rationals; floating matrices go through an
//! SVD with a relative singular-value threshold.

use nalgebra::DMatrix;

use crate::scalar::Real;

/// Row-reduce `m` in place to reduced echelon form. Entries with magnitude
/// `<= tol` count as zero. Returns the pivot columns.
pub fn rref<R: Real>(m: &mut [Vec<R>], ncols: usize, tol: &R) -> Vec<usize> {
    let nrows = m.len();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row == nrows {
            break;
        }
        let mut best = None;
        let mut best_abs = tol.clone();
        for (r, line) in m.iter().enumerate().skip(row) {
            let a = line[col].abs_val();
            if a > best_abs {
                best_abs = a;
                best = Some(r);
            }
        }
        let Some(p) = best else { continue };
        m.swap(row, p);
        let inv = R::one() / m[row][col].clone();
        for v in m[row].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        for r in 0..nrows {
            if r == row {
                continue;
            }
            let f = m[r][col].clone();
            if f.is_zero() {
                continue;
            }
            for c in 0..ncols {
                let delta = f.clone() * m[row][c].clone();
                m[r][c] = m[r][c].clone() - delta;
            }
        }
        if !R::EXACT {
            for r in 0..nrows {
                for c in 0..ncols {
                    if m[r][c].abs_val() <= *tol {
                        m[r][c] = R::zero();
                    }
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

/// Kernel of `m` by exact elimination, returned in reduced echelon form.
pub fn exact_kernel<R: Real>(m: &[Vec<R>], ncols: usize) -> Vec<Vec<R>> {
    let mut a: Vec<Vec<R>> = m.to_vec();
    let pivots = rref(&mut a, ncols, &R::zero());
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![R::zero(); ncols];
        v[free] = R::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -a[r][free].clone();
        }
        basis.push(v);
    }
    echelon_basis(basis, ncols, &R::zero())
}

pub fn exact_rank<R: Real>(m: &[Vec<R>], ncols: usize) -> usize {
    let mut a: Vec<Vec<R>> = m.to_vec();
    rref(&mut a, ncols, &R::zero()).len()
}

/// Canonical reduced echelon basis of the span of `vectors`.
pub fn echelon_basis<R: Real>(vectors: Vec<Vec<R>>, ncols: usize, tol: &R) -> Vec<Vec<R>> {
    let mut a = vectors;
    let k = rref(&mut a, ncols, tol).len();
    a.truncate(k);
    a
}

fn to_dmatrix(m: &[Vec<f64>], ncols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(m.len(), ncols, |r, c| m[r][c])
}

/// Singular values of a dense floating matrix, largest first.
pub fn singular_values(m: &[Vec<f64>], ncols: usize) -> Vec<f64> {
    if m.is_empty() || ncols == 0 {
        return Vec::new();
    }
    let svd = to_dmatrix(m, ncols).svd(false, false);
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

/// Numerical rank: singular values above `rel_tol * largest`.
pub fn svd_rank(m: &[Vec<f64>], ncols: usize, rel_tol: f64) -> usize {
    let s = singular_values(m, ncols);
    let Some(&top) = s.first() else { return 0 };
    if top == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rel_tol * top).count()
}

/// Numerical kernel through the SVD, post-processed to reduced echelon form.
pub fn svd_kernel(m: &[Vec<f64>], ncols: usize, rel_tol: f64) -> Vec<Vec<f64>> {
    if ncols == 0 {
        return Vec::new();
    }
    let nrows = m.len();
    // pad to square so that the right singular vectors form a full basis
    let n = nrows.max(ncols);
    let padded = DMatrix::from_fn(n, ncols, |r, c| if r < nrows { m[r][c] } else { 0.0 });
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("right singular vectors requested");
    let top = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let mut null = Vec::new();
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if top == 0.0 || s <= rel_tol * top {
            null.push((0..ncols).map(|c| vt[(k, c)]).collect::<Vec<f64>>());
        }
    }
    echelon_basis(null, ncols, &(rel_tol.max(1e-14) * 10.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, Q};

    #[test]
    fn exact_kernel_of_rank_two_form() {
        let m: Vec<Vec<Q>> = vec![
            vec![q(0, 1), q(0, 1), q(0, 1)],
            vec![q(0, 1), q(0, 1), q(1, 1)],
            vec![q(0, 1), q(-1, 1), q(0, 1)],
        ];
        let k = exact_kernel(&m, 3);
        assert_eq!(k, vec![vec![q(1, 1), q(0, 1), q(0, 1)]]);
        assert_eq!(exact_rank(&m, 3), 2);
    }

    #[test]
    fn svd_kernel_matches_exact_on_small_case() {
        let m = vec![vec![0.0, 1.0, 1.0], vec![-1.0, 0.0, 0.0], vec![-1.0, 0.0, 0.0]];
        let k = svd_kernel(&m, 3, 1e-9);
        assert_eq!(k.len(), 1);
        assert!((k[0][0]).abs() < 1e-12);
        assert!((k[0][1] - 1.0).abs() < 1e-12);
        assert!((k[0][2] + 1.0).abs() < 1e-12);
        assert_eq!(svd_rank(&m, 3, 1e-9), 2);
    }
}
