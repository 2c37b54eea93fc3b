//! Compact regions as unions of axis-aligned rectangles, and discrete causal
//! hulls with unit propagation speed (one site per row).

/// Rows `t0..=t1`, sites `x0..=x1` (no wrap).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rect {
    pub t0: usize,
    pub t1: usize,
    pub x0: usize,
    pub x1: usize,
}

impl Rect {
    pub fn new(t0: usize, t1: usize, x0: usize, x1: usize) -> Self {
        assert!(t0 <= t1 && x0 <= x1, "empty rectangle");
        Rect { t0, t1, x0, x1 }
    }

    pub fn contains(&self, n: usize, x: usize) -> bool {
        (self.t0..=self.t1).contains(&n) && (self.x0..=self.x1).contains(&x)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompactRegion {
    pub rects: Vec<Rect>,
}

/// Distance on the spatial circle.
pub fn circle_dist(a: usize, b: usize, nx: usize) -> usize {
    let d = a.abs_diff(b) % nx;
    d.min(nx - d)
}

impl CompactRegion {
    pub fn rect(r: Rect) -> Self {
        CompactRegion { rects: vec![r] }
    }

    pub fn contains(&self, n: usize, x: usize) -> bool {
        self.rects.iter().any(|r| r.contains(n, x))
    }

    /// Row range spanned by the region.
    pub fn rows(&self) -> (usize, usize) {
        let lo = self.rects.iter().map(|r| r.t0).min().unwrap_or(0);
        let hi = self.rects.iter().map(|r| r.t1).max().unwrap_or(0);
        (lo, hi)
    }

    /// Whether every rectangle stays out of the temporal margins and fits
    /// in the lattice.
    pub fn is_interior(&self, nt: usize, nx: usize, margin: usize) -> bool {
        self.rects.iter().all(|r| r.t0 >= margin && r.t1 + margin < nt && r.x1 < nx)
    }

    pub fn mask(&self, nt: usize, nx: usize) -> Vec<bool> {
        let mut m = vec![false; nt * nx];
        for r in &self.rects {
            for n in r.t0..=r.t1.min(nt - 1) {
                for x in r.x0..=r.x1.min(nx - 1) {
                    m[n * nx + x] = true;
                }
            }
        }
        m
    }

    /// Sites within `pad` rows and sites of the region.
    pub fn dilate(&self, pad: usize, nt: usize, nx: usize) -> Vec<bool> {
        dilate_mask(&self.mask(nt, nx), pad, nt, nx)
    }

    /// Discrete causal hull: sites reachable from the region by moving at
    /// most one site per row, forwards or backwards in time.
    pub fn causal_hull(&self, nt: usize, nx: usize) -> Vec<bool> {
        causal_hull_mask(&self.mask(nt, nx), nt, nx)
    }

    /// Causal complement: sites outside the causal hull of the region
    /// dilated by `pad`.
    pub fn causal_complement(&self, pad: usize, nt: usize, nx: usize) -> Vec<bool> {
        causal_hull_mask(&self.dilate(pad, nt, nx), nt, nx).into_iter().map(|b| !b).collect()
    }
}

pub fn dilate_mask(mask: &[bool], pad: usize, nt: usize, nx: usize) -> Vec<bool> {
    let mut out = vec![false; nt * nx];
    let p = pad as isize;
    for n in 0..nt {
        for x in 0..nx {
            if !mask[n * nx + x] {
                continue;
            }
            for dn in -p..=p {
                let m = n as isize + dn;
                if m < 0 || m >= nt as isize {
                    continue;
                }
                for dx in -p..=p {
                    let y = (x as isize + dx).rem_euclid(nx as isize) as usize;
                    out[m as usize * nx + y] = true;
                }
            }
        }
    }
    out
}

/// Forward and backward sweeps spreading the mask by one site per row.
pub fn causal_hull_mask(mask: &[bool], nt: usize, nx: usize) -> Vec<bool> {
    let spread = |rows: &mut dyn Iterator<Item = (usize, usize)>, m: &mut Vec<bool>| {
        for (from, to) in rows {
            for x in 0..nx {
                if m[from * nx + x] {
                    for y in [(x + nx - 1) % nx, x, (x + 1) % nx] {
                        m[to * nx + y] = true;
                    }
                }
            }
        }
    };
    let mut fut = mask.to_vec();
    spread(&mut (0..nt.saturating_sub(1)).map(|n| (n, n + 1)), &mut fut);
    let mut past = mask.to_vec();
    spread(&mut (1..nt).rev().map(|n| (n, n - 1)), &mut past);
    fut.iter().zip(&past).map(|(a, b)| *a || *b).collect()
}
