use super::{check_coord, impl_queries, Geometry, LevelBits};
use crate::bits::{BitBuilder, BitSequence};
use crate::error::{Error, Result};

/// Immutable k²-tree: internal levels in `T`, the leaf level in `L`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct K2Tree {
    pub(crate) geom: Geometry,
    n_logical: u64,
    t: BitSequence,
    l: BitSequence,
    /// Offset of each level in the concatenation `T ++ L`.
    level_start: Vec<usize>,
}

impl LevelBits for K2Tree {
    #[inline]
    fn bit(&self, level: usize, pos: usize) -> bool {
        let g = self.level_start[level] + pos;
        if g < self.t.len() {
            self.t.bit(g)
        } else {
            self.l.bit(g - self.t.len())
        }
    }

    #[inline]
    fn children(&self, level: usize, pos: usize) -> usize {
        let g = self.level_start[level] + pos;
        self.t.rank1_unchecked(g + 1) * self.geom.block() - self.level_start[level + 1]
    }

    #[inline]
    fn leaf_rank(&self, pos: usize) -> usize {
        self.l.rank1_unchecked(pos + 1)
    }
}

impl_queries!(K2Tree);

impl K2Tree {
    /// Builds the tree of an `n_logical × n_logical` matrix whose 1-cells are
    /// `cells` (1-based, duplicates allowed).
    pub fn build(n_logical: u64, cells: &[(u64, u64)], k: u32) -> Result<Self> {
        let geom = Geometry::covering(k, n_logical)?;
        let mut keyed = Vec::with_capacity(cells.len());
        for &(r, c) in cells {
            let (r, c) = (check_coord(r, n_logical)?, check_coord(c, n_logical)?);
            keyed.push(morton_key(&geom, r, c));
        }
        keyed.sort_unstable();
        keyed.dedup();

        let h = geom.height;
        let block = geom.block();
        let mut t = BitBuilder::new();
        let mut l = BitBuilder::new();
        if h > 0 {
            let digit = |key: u128, level: usize| -> usize {
                let shift = (block as u128).pow((h - 1 - level) as u32);
                ((key / shift) % block as u128) as usize
            };
            let mut current: Vec<_> = std::iter::once(0..keyed.len()).collect();
            for level in 0..h {
                let out = if level + 1 < h { &mut t } else { &mut l };
                let mut next = Vec::new();
                for range in current {
                    let mut idx = range.start;
                    for child in 0..block {
                        let from = idx;
                        while idx < range.end && digit(keyed[idx], level) == child {
                            idx += 1;
                        }
                        out.push(idx > from);
                        if idx > from && level + 1 < h {
                            next.push(from..idx);
                        }
                    }
                }
                current = next;
            }
        }
        Self::assemble(geom, n_logical, t.finish(), l.finish())
    }

    /// Reassembles a tree from its serialized parts, validating their shape.
    pub fn from_parts(k: u32, n: u64, n_logical: u64, t: BitSequence, l: BitSequence) -> Result<Self> {
        let geom = Geometry::covering(k, n_logical)?;
        if geom.n != n {
            return Err(Error::Corrupt(format!(
                "padded side {n} does not match logical side {n_logical} for k={k}"
            )));
        }
        Self::assemble(geom, n_logical, t, l)
    }

    fn assemble(geom: Geometry, n_logical: u64, t: BitSequence, l: BitSequence) -> Result<Self> {
        let h = geom.height;
        let block = geom.block();
        let mut level_start = Vec::with_capacity(h + 1);
        let mut start = 0usize;
        let mut len = if h == 0 { 0 } else { block };
        for level in 0..h {
            level_start.push(start);
            if level + 1 < h {
                let end = start + len;
                if end > t.len() {
                    return Err(Error::Corrupt("tree level runs past T".into()));
                }
                let ones = t.rank1_unchecked(end) - t.rank1_unchecked(start);
                start = end;
                len = ones * block;
            }
        }
        if start != t.len() || (h > 0 && len != l.len()) || (h == 0 && !l.is_empty()) {
            return Err(Error::Corrupt(format!(
                "T/L lengths ({}, {}) inconsistent with tree shape",
                t.len(),
                l.len()
            )));
        }
        level_start.push(t.len() + l.len());
        Ok(Self {
            geom,
            n_logical,
            t,
            l,
            level_start,
        })
    }

    /// Side of the matrix before padding.
    pub fn n_logical(&self) -> u64 {
        self.n_logical
    }

    #[inline]
    pub(crate) fn logical_side(&self) -> u64 {
        self.n_logical
    }

    pub fn t(&self) -> &BitSequence {
        &self.t
    }

    pub fn l(&self) -> &BitSequence {
        &self.l
    }

    /// Number of 1-cells.
    pub fn leaf_count(&self) -> usize {
        self.l.count_ones()
    }

    pub fn heap_bytes(&self) -> usize {
        self.t.heap_bytes() + self.l.heap_bytes() + self.level_start.len() * 8
    }
}

fn morton_key(g: &Geometry, r: u64, c: u64) -> u128 {
    let block = g.block() as u128;
    (0..g.height).fold(0u128, |acc, l| acc * block + g.child(l, r, c) as u128)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &BitSequence) -> String {
        s.iter().map(|b| if b { '1' } else { '0' }).collect()
    }

    #[test]
    fn empty_matrix() {
        let t = K2Tree::build(4, &[], 2).unwrap();
        assert_eq!(bits(t.t()), "0000");
        assert_eq!(bits(t.l()), "");
        assert!(!t.cell(1, 1).unwrap());
        assert_eq!(t.row_neighbors(3).unwrap(), Vec::<u64>::new());
        assert_eq!(t.range(1, 4, 1, 4).unwrap(), vec![]);
    }

    #[test]
    fn identity_2x2() {
        let t = K2Tree::build(2, &[(1, 1), (2, 2)], 2).unwrap();
        assert_eq!(bits(t.t()), "");
        assert_eq!(bits(t.l()), "1001");
        assert!(t.cell(1, 1).unwrap());
        assert!(!t.cell(1, 2).unwrap());
        assert_eq!(t.row_neighbors(1).unwrap(), vec![1]);
        assert_eq!(t.col_neighbors(2).unwrap(), vec![2]);
    }

    #[test]
    fn full_2x2() {
        let t = K2Tree::build(2, &[(1, 1), (1, 2), (2, 1), (2, 2)], 2).unwrap();
        assert_eq!(t.row_neighbors(2).unwrap(), vec![1, 2]);
        assert_eq!(t.col_neighbors(1).unwrap(), vec![1, 2]);
    }

    #[test]
    fn relations_of_running_example() {
        // Origin/target pairs of the seven example edges, one cell per pair.
        let cells = [(3, 1), (5, 1), (5, 2), (4, 5), (4, 5), (3, 2), (4, 2)];
        let t = K2Tree::build(5, &cells, 2).unwrap();
        assert_eq!(t.n(), 8);
        assert_eq!(bits(t.t()), "1110" .to_owned() + "0010" + "0010" + "1000");
        assert_eq!(bits(t.l()), "110100101100");
        assert_eq!(t.leaf_count(), 6);
        // The cell (4,5) is the 7th bit of L and the fourth leaf 1.
        assert_eq!(t.leaf_ordinal(4, 5).unwrap(), 4);
        assert_eq!(t.l().rank1(7).unwrap(), 4);
        assert_eq!(
            t.leaves(),
            vec![(3, 1), (3, 2), (4, 2), (4, 5), (5, 1), (5, 2)]
        );
        assert!(matches!(t.leaf_ordinal(1, 3), Err(Error::NotFound(_))));
    }

    #[test]
    fn eleven_by_eleven_with_empty_top_right() {
        // 11×11 pads to 16; with the top-right quadrant empty the root reads 1011.
        let cells: Vec<(u64, u64)> = vec![(1, 1), (2, 3), (7, 4), (9, 2), (10, 10), (11, 11), (9, 9), (3, 8)];
        let t = K2Tree::build(11, &cells, 2).unwrap();
        assert_eq!(t.n(), 16);
        assert_eq!(bits(t.t())[..4], *"1011");
        for r in 1..=8 {
            for c in 9..=11 {
                assert!(!t.cell(r, c).unwrap());
            }
        }
        let mut expect = cells.clone();
        expect.sort();
        assert_eq!(t.range(1, 11, 1, 11).unwrap(), expect);
        assert!(t.cell(12, 1).is_err());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(K2Tree::build(4, &[(5, 1)], 2).is_err());
        assert!(K2Tree::build(4, &[(0, 1)], 2).is_err());
        assert!(K2Tree::build(4, &[], 1).is_err());
        let t = K2Tree::build(4, &[(1, 1)], 2).unwrap();
        assert!(matches!(t.range(3, 2, 1, 1), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn single_cell_ordinal() {
        let t = K2Tree::build(9, &[(7, 3)], 3).unwrap();
        assert_eq!(t.n(), 9);
        assert_eq!(t.leaf_ordinal(7, 3).unwrap(), 1);
        assert_eq!(t.t().len() + t.l().len(), 18);
    }

    #[test]
    fn from_parts_validates_shape() {
        let t = K2Tree::build(5, &[(3, 1), (4, 5)], 2).unwrap();
        let again = K2Tree::from_parts(2, 8, 5, t.t().clone(), t.l().clone()).unwrap();
        assert_eq!(again, t);
        assert!(K2Tree::from_parts(2, 16, 5, t.t().clone(), t.l().clone()).is_err());
        let short_l = BitSequence::from_str_bits("1101");
        assert!(K2Tree::from_parts(2, 8, 5, t.t().clone(), short_l).is_err());
    }

    #[test]
    fn zero_side_tree() {
        let t = K2Tree::build(0, &[], 2).unwrap();
        assert_eq!(t.height(), 0);
        assert!(t.t().is_empty() && t.l().is_empty());
        assert!(t.cell(1, 1).is_err());
        assert!(t.leaves().is_empty());
    }
}
