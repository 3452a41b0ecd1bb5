use super::{check_coord, impl_queries, Geometry, LevelBits};
use crate::bits::DynBitSequence;
use crate::error::Result;

/// Mutable k²-tree with one dynamic bitmap per level.
///
/// Setting a cell under a 0 bit flips it and splices a fresh block of `k²`
/// zeros into the next level; clearing a cell removes every block that
/// becomes all-zero and clears its parent bit, so a 0 never has children.
#[derive(Clone, Debug)]
pub struct DynK2Tree {
    pub(crate) geom: Geometry,
    levels: Vec<DynBitSequence>,
}

impl LevelBits for DynK2Tree {
    #[inline]
    fn bit(&self, level: usize, pos: usize) -> bool {
        self.levels[level].bit(pos)
    }

    #[inline]
    fn children(&self, level: usize, pos: usize) -> usize {
        self.levels[level].rank1_at(pos) * self.geom.block()
    }

    #[inline]
    fn leaf_rank(&self, pos: usize) -> usize {
        self.levels[self.geom.height - 1].rank1_at(pos + 1)
    }
}

impl_queries!(DynK2Tree);

impl DynK2Tree {
    /// Empty tree whose side is the smallest power of `k` covering `n_min`
    /// (at least `k`).
    pub fn new(k: u32, n_min: u64) -> Result<Self> {
        let geom = Geometry::covering(k, n_min.max(1))?;
        let mut levels = vec![DynBitSequence::new(); geom.height];
        for _ in 0..geom.block() {
            levels[0].push(false);
        }
        Ok(Self { geom, levels })
    }

    #[inline]
    pub(crate) fn logical_side(&self) -> u64 {
        self.geom.n
    }

    pub fn is_empty(&self) -> bool {
        self.levels[0].count_ones() == 0
    }

    pub fn leaf_count(&self) -> usize {
        self.levels[self.geom.height - 1].count_ones()
    }

    /// Sets cell `(r, c)`; returns `true` when it was previously 0.
    pub fn set(&mut self, r: u64, c: u64) -> Result<bool> {
        let (r, c) = (check_coord(r, self.geom.n)?, check_coord(c, self.geom.n)?);
        let block = self.geom.block();
        let mut start = 0usize;
        for level in 0..self.geom.height {
            let pos = start + self.geom.child(level, r, c);
            let last = level + 1 == self.geom.height;
            if last {
                return Ok(!self.levels[level].set_at(pos, true));
            }
            let child = self.levels[level].rank1_at(pos) * block;
            if !self.levels[level].bit(pos) {
                self.levels[level].set_at(pos, true);
                for _ in 0..block {
                    self.levels[level + 1].insert_at(child, false);
                }
            }
            start = child;
        }
        unreachable!("tree height is at least 1")
    }

    /// Clears cell `(r, c)`; returns `true` when it was previously 1.
    pub fn clear(&mut self, r: u64, c: u64) -> Result<bool> {
        let (r, c) = (check_coord(r, self.geom.n)?, check_coord(c, self.geom.n)?);
        let block = self.geom.block();
        let mut path = Vec::with_capacity(self.geom.height);
        let mut start = 0usize;
        for level in 0..self.geom.height {
            let pos = start + self.geom.child(level, r, c);
            if !self.levels[level].bit(pos) {
                return Ok(false);
            }
            path.push(pos);
            if level + 1 < self.geom.height {
                start = self.children(level, pos);
            }
        }
        let h = self.geom.height;
        self.levels[h - 1].set_at(path[h - 1], false);
        for level in (1..h).rev() {
            let from = path[level] - path[level] % block;
            if self.levels[level].count_ones_range(from, from + block) != 0 {
                break;
            }
            for _ in 0..block {
                self.levels[level].remove_at(from);
            }
            self.levels[level - 1].set_at(path[level - 1], false);
        }
        Ok(true)
    }

    /// Multiplies the side by `k`; the old matrix becomes the top-left block.
    pub fn grow(&mut self) {
        let k = self.geom.k;
        let nonempty = !self.is_empty();
        self.geom = Geometry::with_height(k, self.geom.height + 1);
        if nonempty {
            let mut root = DynBitSequence::new();
            root.push(true);
            for _ in 1..self.geom.block() {
                root.push(false);
            }
            self.levels.insert(0, root);
        } else {
            self.levels.push(DynBitSequence::new());
        }
    }

    /// Grows until the side is at least `n_min`.
    pub fn ensure_side(&mut self, n_min: u64) {
        while self.geom.n < n_min {
            self.grow();
        }
    }

    /// Every 1-cell in (row, col) order.
    pub fn cells(&self) -> Vec<(u64, u64)> {
        let mut v = self.leaves();
        v.sort_unstable();
        v
    }

    pub fn heap_bytes(&self) -> usize {
        self.levels.iter().map(|l| l.heap_bytes()).sum()
    }

    /// Total bits across all levels.
    pub fn bit_len(&self) -> usize {
        self.levels.iter().map(|l| l.len()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::k2::K2Tree;

    #[test]
    fn set_single_cell() {
        let mut t = DynK2Tree::new(2, 4).unwrap();
        assert!(t.set(3, 2).unwrap());
        assert!(!t.set(3, 2).unwrap());
        for r in 1..=4 {
            for c in 1..=4 {
                assert_eq!(t.cell(r, c).unwrap(), (r, c) == (3, 2));
            }
        }
        assert!(t.set(5, 1).is_err());
    }

    #[test]
    fn set_then_clear_is_empty() {
        let mut t = DynK2Tree::new(2, 4).unwrap();
        t.set(3, 2).unwrap();
        assert!(t.clear(3, 2).unwrap());
        assert!(!t.clear(3, 2).unwrap());
        assert!(t.is_empty());
        assert_eq!(t.bit_len(), 4);
    }

    #[test]
    fn matches_static_build() {
        let cells = [(3, 1), (5, 1), (5, 2), (4, 5), (3, 2), (4, 2)];
        let mut t = DynK2Tree::new(2, 8).unwrap();
        for &(r, c) in cells.iter().rev() {
            t.set(r, c).unwrap();
        }
        let s = K2Tree::build(8, &cells, 2).unwrap();
        assert_eq!(t.leaves(), s.leaves());
        assert_eq!(t.bit_len(), s.t().len() + s.l().len());
        assert_eq!(t.leaf_ordinal(4, 5).unwrap(), 4);
    }

    #[test]
    fn grow_preserves_cells() {
        let mut t = DynK2Tree::new(2, 2).unwrap();
        t.set(1, 2).unwrap();
        t.set(2, 2).unwrap();
        t.grow();
        t.grow();
        assert_eq!(t.n(), 8);
        assert_eq!(t.cells(), vec![(1, 2), (2, 2)]);
        t.set(8, 8).unwrap();
        assert_eq!(t.row_neighbors(8).unwrap(), vec![8]);

        let mut e = DynK2Tree::new(2, 2).unwrap();
        e.grow();
        assert!(e.is_empty());
        e.set(4, 1).unwrap();
        assert_eq!(e.cells(), vec![(4, 1)]);
    }
}
