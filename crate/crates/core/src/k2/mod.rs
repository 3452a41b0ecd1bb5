//! k²-trees over square boolean matrices.
//!
//! The matrix side is padded to a power of `k` and recursively split into
//! `k²` equal submatrices. Each split emits one bit per child (1 when the
//! child holds any 1-cell), children in row-major order, levels
//! concatenated top-down. Recursion stops at single cells, so the last level
//! holds one bit per cell of every non-empty `k×k` leaf block.
//!
//! [`K2Tree`] stores the internal levels in `T` and the last level in `L`;
//! [`DynK2Tree`] keeps one dynamic bitmap per level and supports setting and
//! clearing cells and growing the matrix by a factor of `k`.
//!
//! Coordinates in the public API are 1-based.

mod dynamic;
mod static_tree;

pub use dynamic::DynK2Tree;
pub use static_tree::K2Tree;

use crate::error::{out_of_bounds, Error, Result};

pub const DEFAULT_K: u32 = 2;

/// Shape of a tree: arity, height, and the child-submatrix side per level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Geometry {
    pub k: usize,
    pub height: usize,
    pub n: u64,
    /// `sides[l]` is the side of the submatrices addressed by level `l` bits.
    pub sides: Vec<u64>,
}

impl Geometry {
    /// Smallest `k^h >= n_min` with `h >= 1`; `n_min = 0` yields height 0.
    pub fn covering(k: u32, n_min: u64) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidInput(format!("k must be at least 2, got {k}")));
        }
        if n_min == 0 {
            return Ok(Self::with_height(k as usize, 0));
        }
        let mut height = 1;
        let mut n = k as u64;
        while n < n_min {
            n = n
                .checked_mul(k as u64)
                .ok_or_else(|| Error::InvalidInput(format!("matrix side {n_min} too large")))?;
            height += 1;
        }
        Ok(Self::with_height(k as usize, height))
    }

    pub fn with_height(k: usize, height: usize) -> Self {
        let mut sides = vec![1u64; height];
        for l in (0..height.saturating_sub(1)).rev() {
            sides[l] = sides[l + 1] * k as u64;
        }
        let n = if height == 0 { 0 } else { sides[0] * k as u64 };
        Self {
            k,
            height,
            n,
            sides,
        }
    }

    #[inline]
    pub fn block(&self) -> usize {
        self.k * self.k
    }

    /// Child index at level `l` for 0-based cell `(r, c)`.
    #[inline]
    pub fn child(&self, l: usize, r: u64, c: u64) -> usize {
        let s = self.sides[l];
        let k = self.k as u64;
        (((r / s) % k) * k + (c / s) % k) as usize
    }
}

/// Bit access over the levels of a tree.
pub(crate) trait LevelBits {
    fn bit(&self, level: usize, pos: usize) -> bool;
    /// Start, within `level + 1`, of the child block of the 1 at `(level, pos)`.
    fn children(&self, level: usize, pos: usize) -> usize;
    /// Ones in the last level at indexes `<= pos`.
    fn leaf_rank(&self, pos: usize) -> usize;
}

/// Leaf position of 0-based cell `(r, c)`, if the cell is 1.
pub(crate) fn find_cell<L: LevelBits>(lv: &L, g: &Geometry, r: u64, c: u64) -> Option<usize> {
    let mut start = 0usize;
    for l in 0..g.height {
        let pos = start + g.child(l, r, c);
        if !lv.bit(l, pos) {
            return None;
        }
        if l + 1 == g.height {
            return Some(pos);
        }
        start = lv.children(l, pos);
    }
    None
}

/// Calls `f(row, col, leaf_pos)` (0-based) for every 1-cell inside the
/// inclusive rectangle, in depth-first order. For a single row (column) the
/// calls come in ascending column (row) order.
pub(crate) fn visit_range<L: LevelBits, F: FnMut(u64, u64, usize)>(
    lv: &L,
    g: &Geometry,
    rows: (u64, u64),
    cols: (u64, u64),
    f: &mut F,
) {
    if g.height == 0 {
        return;
    }
    if rows.0 == rows.1 {
        visit_line(lv, g, rows.0, cols, true, f);
    } else if cols.0 == cols.1 {
        visit_line(lv, g, cols.0, rows, false, f);
    } else {
        visit_node(lv, g, 0, 0, 0, 0, rows, cols, f);
    }
}

/// Level-by-level walk of one row (`by_row`) or column. Each level's
/// frontier is visited in position order, which keeps the output ascending.
fn visit_line<L: LevelBits, F: FnMut(u64, u64, usize)>(
    lv: &L,
    g: &Geometry,
    fixed: u64,
    along: (u64, u64),
    by_row: bool,
    f: &mut F,
) {
    let k = g.k;
    let mut frontier: Vec<(usize, u64)> = vec![(0, 0)];
    let mut next = Vec::new();
    for level in 0..g.height {
        let side = g.sides[level];
        let span = side * k as u64;
        let fi = ((fixed / side) % k as u64) as usize;
        let last = level + 1 == g.height;
        for &(start, off) in &frontier {
            // Divide only at the range boundary; inner blocks take all k.
            let t_lo = if along.0 <= off { 0 } else { (along.0 - off) / side };
            let t_hi = if along.1 >= off + span - 1 {
                k as u64 - 1
            } else {
                (along.1 - off) / side
            };
            for t in t_lo..=t_hi {
                let pos = if by_row {
                    start + fi * k + t as usize
                } else {
                    start + (t as usize) * k + fi
                };
                if !lv.bit(level, pos) {
                    continue;
                }
                let o = off + t * side;
                if last {
                    if by_row {
                        f(fixed, o, pos);
                    } else {
                        f(o, fixed, pos);
                    }
                } else {
                    next.push((lv.children(level, pos), o));
                }
            }
        }
        std::mem::swap(&mut frontier, &mut next);
        next.clear();
        if frontier.is_empty() {
            break;
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn visit_node<L: LevelBits, F: FnMut(u64, u64, usize)>(
    lv: &L,
    g: &Geometry,
    level: usize,
    start: usize,
    row_off: u64,
    col_off: u64,
    rows: (u64, u64),
    cols: (u64, u64),
    f: &mut F,
) {
    let side = g.sides[level];
    let span = side * g.k as u64;
    let clip = |lo: u64, hi: u64, off: u64| {
        let a = if lo <= off { 0 } else { (lo - off) / side };
        let b = if hi >= off + span - 1 { g.k as u64 - 1 } else { (hi - off) / side };
        (a, b)
    };
    let (i_lo, i_hi) = clip(rows.0, rows.1, row_off);
    let (j_lo, j_hi) = clip(cols.0, cols.1, col_off);
    let last = level + 1 == g.height;
    for i in i_lo..=i_hi {
        for j in j_lo..=j_hi {
            let pos = start + (i as usize) * g.k + j as usize;
            if !lv.bit(level, pos) {
                continue;
            }
            let r = row_off + i * side;
            let c = col_off + j * side;
            if last {
                f(r, c, pos);
            } else {
                let child = lv.children(level, pos);
                visit_node(lv, g, level + 1, child, r, c, rows, cols, f);
            }
        }
    }
}

/// Validates 1-based coordinates against `limit` and converts to 0-based.
#[inline]
pub(crate) fn check_coord(x: u64, limit: u64) -> Result<u64> {
    if x == 0 || x > limit {
        Err(out_of_bounds(x, limit))
    } else {
        Ok(x - 1)
    }
}

pub(crate) fn check_rect(r1: u64, r2: u64, c1: u64, c2: u64, limit: u64) -> Result<()> {
    if r1 > r2 || c1 > c2 {
        return Err(Error::InvalidInput(format!(
            "malformed rectangle rows {r1}..{r2}, cols {c1}..{c2}"
        )));
    }
    check_coord(r1, limit)?;
    check_coord(r2, limit)?;
    check_coord(c1, limit)?;
    check_coord(c2, limit)?;
    Ok(())
}

/// Query operations shared by the static and dynamic trees.
macro_rules! impl_queries {
    ($ty:ty) => {
        impl $ty {
            /// Whether cell `(r, c)` is 1.
            pub fn cell(&self, r: u64, c: u64) -> $crate::error::Result<bool> {
                let lim = self.logical_side();
                let (r, c) = (
                    $crate::k2::check_coord(r, lim)?,
                    $crate::k2::check_coord(c, lim)?,
                );
                Ok($crate::k2::find_cell(self, &self.geom, r, c).is_some())
            }

            /// 1-based ordinal of the cell's bit among the 1s of the leaf level.
            pub fn leaf_ordinal(&self, r: u64, c: u64) -> $crate::error::Result<usize> {
                let lim = self.logical_side();
                let (r0, c0) = (
                    $crate::k2::check_coord(r, lim)?,
                    $crate::k2::check_coord(c, lim)?,
                );
                $crate::k2::find_cell(self, &self.geom, r0, c0)
                    .map(|pos| $crate::k2::LevelBits::leaf_rank(self, pos))
                    .ok_or_else(|| $crate::error::Error::NotFound(format!("cell ({r}, {c})")))
            }

            /// Columns holding a 1 in row `r`, ascending.
            pub fn row_neighbors(&self, r: u64) -> $crate::error::Result<Vec<u64>> {
                let lim = self.logical_side();
                let r = $crate::k2::check_coord(r, lim)?;
                let mut out = Vec::new();
                if lim > 0 {
                    $crate::k2::visit_range(self, &self.geom, (r, r), (0, lim - 1), &mut |_, c, _| {
                        out.push(c + 1)
                    });
                }
                Ok(out)
            }

            /// Rows holding a 1 in column `c`, ascending.
            pub fn col_neighbors(&self, c: u64) -> $crate::error::Result<Vec<u64>> {
                let lim = self.logical_side();
                let c = $crate::k2::check_coord(c, lim)?;
                let mut out = Vec::new();
                if lim > 0 {
                    $crate::k2::visit_range(self, &self.geom, (0, lim - 1), (c, c), &mut |r, _, _| {
                        out.push(r + 1)
                    });
                }
                Ok(out)
            }

            /// All 1-cells inside the inclusive rectangle, in (row, col) order.
            pub fn range(
                &self,
                r1: u64,
                r2: u64,
                c1: u64,
                c2: u64,
            ) -> $crate::error::Result<Vec<(u64, u64)>> {
                let mut out = Vec::new();
                self.for_each_in_range(r1, r2, c1, c2, |r, c, _| out.push((r, c)))?;
                out.sort_unstable();
                Ok(out)
            }

            /// Calls `f(row, col, leaf_ordinal)` for each 1-cell in the inclusive
            /// rectangle (1-based coordinates, 1-based ordinal). Single-row and
            /// single-column rectangles are visited in ascending order; other
            /// shapes in depth-first order.
            pub fn for_each_in_range<F: FnMut(u64, u64, usize)>(
                &self,
                r1: u64,
                r2: u64,
                c1: u64,
                c2: u64,
                mut f: F,
            ) -> $crate::error::Result<()> {
                $crate::k2::check_rect(r1, r2, c1, c2, self.logical_side())?;
                $crate::k2::visit_range(self, &self.geom, (r1 - 1, r2 - 1), (c1 - 1, c2 - 1), &mut |r, c, pos| {
                    f(r + 1, c + 1, $crate::k2::LevelBits::leaf_rank(self, pos))
                });
                Ok(())
            }

            /// Every 1-cell, ordered by leaf ordinal.
            pub fn leaves(&self) -> Vec<(u64, u64)> {
                let lim = self.logical_side();
                if lim == 0 {
                    return Vec::new();
                }
                let mut out = Vec::new();
                $crate::k2::visit_range(self, &self.geom, (0, lim - 1), (0, lim - 1), &mut |r, c, pos| {
                    out.push((pos, r + 1, c + 1))
                });
                out.sort_unstable();
                out.into_iter().map(|(_, r, c)| (r, c)).collect()
            }

            pub fn k(&self) -> u32 {
                self.geom.k as u32
            }

            /// Padded side, a power of `k`.
            pub fn n(&self) -> u64 {
                self.geom.n
            }

            pub fn height(&self) -> usize {
                self.geom.height
            }
        }
    };
}
pub(crate) use impl_queries;
