//! Relations layer: a k²-tree over (origin, target) node pairs whose leaf 1s
//! map to the multiset of edge identifiers sharing that pair.
//!
//! The static form decodes leaf `i` (its 1-based leaf ordinal) as:
//!
//! - `Multi[i] = 0`: the cell holds exactly one edge, `Last[i]`.
//! - `Multi[i] = 1`: the cell's edges are `More[b..=e]` with `e = Last[i]`
//!   and `b = Last[p] + 1`, where `p` is the previous 1 in `Multi`
//!   (`b = 1` when leaf `i` holds the first multi-edge).
//!
//! The dynamic form keeps one growable id list per leaf, in leaf order.

use std::collections::{BTreeMap, HashSet};

use crate::bits::{BitSequence, DynBitSequence, IntVector};
use crate::error::{Error, Result};
use crate::k2::{DynK2Tree, K2Tree};

/// Edge ids stored at one leaf of the static structure.
#[derive(Clone, Copy, Debug)]
pub enum LeafEdges<'a> {
    Single(u64),
    Multi { more: &'a IntVector, from: usize, to: usize },
}

impl LeafEdges<'_> {
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        let (single, range) = match *self {
            LeafEdges::Single(id) => (Some(id), 0..0),
            LeafEdges::Multi { from, to, .. } => (None, from..to),
        };
        let more = match self {
            LeafEdges::Multi { more, .. } => Some(*more),
            LeafEdges::Single(_) => None,
        };
        single
            .into_iter()
            .chain(range.map(move |i| more.expect("multi leaf").get(i)))
    }

    pub fn to_vec(&self) -> Vec<u64> {
        self.iter().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiEdgeK2Tree {
    base: K2Tree,
    multi: BitSequence,
    last: IntVector,
    more: IntVector,
}

impl MultiEdgeK2Tree {
    /// Builds the structure over `n_nodes` nodes from `(edge_id, origin, target)`.
    pub fn build(n_nodes: u64, triples: &[(u64, u64, u64)], k: u32) -> Result<Self> {
        let mut seen = HashSet::with_capacity(triples.len());
        let mut by_cell: BTreeMap<(u64, u64), Vec<u64>> = BTreeMap::new();
        for &(id, u, v) in triples {
            if !seen.insert(id) {
                return Err(Error::InvalidInput(format!("duplicate edge id {id}")));
            }
            by_cell.entry((u, v)).or_default().push(id);
        }
        let cells: Vec<(u64, u64)> = by_cell.keys().copied().collect();
        let base = K2Tree::build(n_nodes, &cells, k)?;

        let mut multi = Vec::with_capacity(cells.len());
        let mut last = Vec::with_capacity(cells.len());
        let mut more = Vec::new();
        for cell in base.leaves() {
            let ids = by_cell.get_mut(&cell).expect("leaf comes from a triple");
            ids.sort_unstable();
            if ids.len() == 1 {
                multi.push(false);
                last.push(ids[0]);
            } else {
                multi.push(true);
                more.extend_from_slice(ids);
                last.push(more.len() as u64);
            }
        }
        Ok(Self {
            base,
            multi: BitSequence::from_bits(multi),
            last: IntVector::from_slice(&last),
            more: IntVector::from_slice(&more),
        })
    }

    /// Reassembles from serialized parts, checking the encoding invariants.
    pub fn from_parts(base: K2Tree, multi: BitSequence, last: Vec<u64>, more: Vec<u64>) -> Result<Self> {
        let leaves = base.leaf_count();
        if multi.len() != leaves || last.len() != leaves {
            return Err(Error::Corrupt(format!(
                "{leaves} leaves but Multi has {} bits and Last {} entries",
                multi.len(),
                last.len()
            )));
        }
        let mut prev = 0u64;
        for (i, &l) in last.iter().enumerate() {
            if multi.bit(i) {
                if l <= prev || l as usize > more.len() {
                    return Err(Error::Corrupt(format!("Last[{}] = {l} is not a valid More end", i + 1)));
                }
                prev = l;
            }
        }
        if prev as usize != more.len() {
            return Err(Error::Corrupt("More has unreferenced entries".into()));
        }
        Ok(Self {
            base,
            multi,
            last: IntVector::from_slice(&last),
            more: IntVector::from_slice(&more),
        })
    }

    pub fn base(&self) -> &K2Tree {
        &self.base
    }

    pub fn multi(&self) -> &BitSequence {
        &self.multi
    }

    pub fn last(&self) -> Vec<u64> {
        self.last.to_vec()
    }

    pub fn more(&self) -> Vec<u64> {
        self.more.to_vec()
    }

    pub fn n_nodes(&self) -> u64 {
        self.base.n_logical()
    }

    /// Total number of edges stored.
    pub fn edge_count(&self) -> usize {
        self.multi.len() - self.multi.count_ones() + self.more.len()
    }

    /// Edge ids of the leaf with 1-based ordinal `i`.
    pub fn leaf_edges(&self, i: usize) -> LeafEdges<'_> {
        let e = self.last.get(i - 1);
        if !self.multi.bit(i - 1) {
            return LeafEdges::Single(e);
        }
        let r = self.multi.rank1_unchecked(i);
        let b = if r == 1 {
            1
        } else {
            let p = self.multi.select1(r - 1).expect("r - 1 ones precede leaf i");
            self.last.get(p - 1) + 1
        };
        LeafEdges::Multi {
            more: &self.more,
            from: b as usize - 1,
            to: e as usize,
        }
    }

    /// Edge ids from `u` to `v`, ascending; empty when the cell is 0.
    pub fn edges_between(&self, u: u64, v: u64) -> Result<Vec<u64>> {
        match self.base.leaf_ordinal(u, v) {
            Ok(i) => Ok(self.leaf_edges(i).to_vec()),
            Err(Error::NotFound(_)) => Ok(Vec::new()),
            Err(e) => Err(e),
        }
    }

    /// Calls `f(target, edges)` for each target of `u` within `c1..=c2`, ascending.
    pub fn for_each_neighbor<F: FnMut(u64, LeafEdges<'_>)>(&self, u: u64, c1: u64, c2: u64, mut f: F) -> Result<()> {
        self.base
            .for_each_in_range(u, u, c1, c2, |_, c, i| f(c, self.leaf_edges(i)))
    }

    /// Calls `f(origin, edges)` for each origin of `v` within `r1..=r2`, ascending.
    pub fn for_each_reverse<F: FnMut(u64, LeafEdges<'_>)>(&self, v: u64, r1: u64, r2: u64, mut f: F) -> Result<()> {
        self.base
            .for_each_in_range(r1, r2, v, v, |r, _, i| f(r, self.leaf_edges(i)))
    }

    /// `(target, edge ids)` for targets of `u` within `c1..=c2`.
    pub fn neighbors_with_edges(&self, u: u64, c1: u64, c2: u64) -> Result<Vec<(u64, Vec<u64>)>> {
        let mut out = Vec::new();
        self.for_each_neighbor(u, c1, c2, |v, e| out.push((v, e.to_vec())))?;
        Ok(out)
    }

    /// `(origin, edge ids)` for origins of `v` within `r1..=r2`.
    pub fn reverse_with_edges(&self, v: u64, r1: u64, r2: u64) -> Result<Vec<(u64, Vec<u64>)>> {
        let mut out = Vec::new();
        self.for_each_reverse(v, r1, r2, |u, e| out.push((u, e.to_vec())))?;
        Ok(out)
    }

    /// Every stored `(edge_id, origin, target)`, by leaf order then id.
    pub fn triples(&self) -> Vec<(u64, u64, u64)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (i, (u, v)) in self.base.leaves().into_iter().enumerate() {
            for id in self.leaf_edges(i + 1).iter() {
                out.push((id, u, v));
            }
        }
        out
    }

    pub fn heap_bytes(&self) -> usize {
        self.base.heap_bytes() + self.multi.heap_bytes() + self.last.heap_bytes() + self.more.heap_bytes()
    }
}

/// Dynamic relations: a [`DynK2Tree`] plus one id list per leaf, in leaf
/// order. A `Multi`-style bitmap tracks which leaves hold several edges.
#[derive(Clone, Debug)]
pub struct DynMultiEdge {
    base: DynK2Tree,
    multi: DynBitSequence,
    lists: BlockedVec<Vec<u64>>,
}

impl DynMultiEdge {
    pub fn new(k: u32, n_nodes: u64) -> Result<Self> {
        Ok(Self {
            base: DynK2Tree::new(k, n_nodes)?,
            multi: DynBitSequence::new(),
            lists: BlockedVec::new(),
        })
    }

    pub fn base(&self) -> &DynK2Tree {
        &self.base
    }

    /// Grows the node space to at least `n_nodes`.
    pub fn ensure_nodes(&mut self, n_nodes: u64) {
        self.base.ensure_side(n_nodes);
    }

    /// Appends `edge_id` to the `(u, v)` list, setting the cell if new.
    pub fn add_edge(&mut self, edge_id: u64, u: u64, v: u64) -> Result<()> {
        if self.base.set(u, v)? {
            let i = self.base.leaf_ordinal(u, v)?;
            self.lists.insert(i - 1, vec![edge_id]);
            self.multi.insert_at(i - 1, false);
        } else {
            let i = self.base.leaf_ordinal(u, v)?;
            let list = self.lists.get_mut(i - 1);
            list.push(edge_id);
            if list.len() == 2 {
                self.multi.set_at(i - 1, true);
            }
        }
        Ok(())
    }

    /// Removes `edge_id` from the `(u, v)` list, clearing the cell once empty.
    pub fn remove_edge(&mut self, edge_id: u64, u: u64, v: u64) -> Result<()> {
        let missing = || Error::NotFound(format!("edge {edge_id} at ({u}, {v})"));
        let i = match self.base.leaf_ordinal(u, v) {
            Ok(i) => i,
            Err(Error::NotFound(_)) => return Err(missing()),
            Err(e) => return Err(e),
        };
        let list = self.lists.get_mut(i - 1);
        let at = list.iter().position(|&e| e == edge_id).ok_or_else(missing)?;
        list.remove(at);
        match list.len() {
            0 => {
                self.lists.remove(i - 1);
                self.multi.remove_at(i - 1);
                self.base.clear(u, v)?;
            }
            1 => {
                self.multi.set_at(i - 1, false);
            }
            _ => {}
        }
        Ok(())
    }

    fn sorted(list: &[u64]) -> Vec<u64> {
        let mut v = list.to_vec();
        v.sort_unstable();
        v
    }

    /// Edge ids from `u` to `v`, ascending.
    pub fn edges_between(&self, u: u64, v: u64) -> Result<Vec<u64>> {
        match self.base.leaf_ordinal(u, v) {
            Ok(i) => Ok(Self::sorted(self.lists.get(i - 1))),
            Err(Error::NotFound(_)) => Ok(Vec::new()),
            Err(e) => Err(e),
        }
    }

    pub fn for_each_neighbor<F: FnMut(u64, &[u64])>(&self, u: u64, c1: u64, c2: u64, mut f: F) -> Result<()> {
        self.base
            .for_each_in_range(u, u, c1, c2, |_, c, i| f(c, self.lists.get(i - 1)))
    }

    pub fn for_each_reverse<F: FnMut(u64, &[u64])>(&self, v: u64, r1: u64, r2: u64, mut f: F) -> Result<()> {
        self.base
            .for_each_in_range(r1, r2, v, v, |r, _, i| f(r, self.lists.get(i - 1)))
    }

    pub fn neighbors_with_edges(&self, u: u64, c1: u64, c2: u64) -> Result<Vec<(u64, Vec<u64>)>> {
        let mut out = Vec::new();
        self.for_each_neighbor(u, c1, c2, |v, ids| out.push((v, Self::sorted(ids))))?;
        Ok(out)
    }

    pub fn reverse_with_edges(&self, v: u64, r1: u64, r2: u64) -> Result<Vec<(u64, Vec<u64>)>> {
        let mut out = Vec::new();
        self.for_each_reverse(v, r1, r2, |u, ids| out.push((u, Self::sorted(ids))))?;
        Ok(out)
    }

    pub fn is_multi_leaf(&self, i: usize) -> bool {
        self.multi.bit(i - 1)
    }

    pub fn edge_count(&self) -> usize {
        self.lists.iter().map(|l| l.len()).sum()
    }

    pub fn heap_bytes(&self) -> usize {
        self.base.heap_bytes()
            + self.multi.heap_bytes()
            + self.lists.iter().map(|l| l.capacity() * 8 + 24).sum::<usize>()
    }
}

const CHUNK: usize = 512;

/// Vector split into bounded chunks so positional inserts stay cheap.
#[derive(Clone, Debug)]
pub(crate) struct BlockedVec<T> {
    chunks: Vec<Vec<T>>,
    len: usize,
}

impl<T> BlockedVec<T> {
    pub fn new() -> Self {
        Self {
            chunks: Vec::new(),
            len: 0,
        }
    }

    fn locate(&self, mut i: usize) -> (usize, usize) {
        for (c, chunk) in self.chunks.iter().enumerate() {
            if i < chunk.len() {
                return (c, i);
            }
            i -= chunk.len();
        }
        panic!("index out of range");
    }

    pub fn get(&self, i: usize) -> &T {
        let (c, o) = self.locate(i);
        &self.chunks[c][o]
    }

    pub fn get_mut(&mut self, i: usize) -> &mut T {
        let (c, o) = self.locate(i);
        &mut self.chunks[c][o]
    }

    pub fn insert(&mut self, i: usize, value: T) {
        assert!(i <= self.len);
        let (c, o) = if i == self.len {
            if self.chunks.last().is_none_or(|ch| ch.len() >= CHUNK) {
                self.chunks.push(Vec::with_capacity(CHUNK));
            }
            let c = self.chunks.len() - 1;
            (c, self.chunks[c].len())
        } else {
            self.locate(i)
        };
        self.chunks[c].insert(o, value);
        if self.chunks[c].len() > 2 * CHUNK {
            let tail = self.chunks[c].split_off(CHUNK);
            self.chunks.insert(c + 1, tail);
        }
        self.len += 1;
    }

    pub fn remove(&mut self, i: usize) -> T {
        let (c, o) = self.locate(i);
        let v = self.chunks[c].remove(o);
        if self.chunks[c].is_empty() {
            self.chunks.remove(c);
        }
        self.len -= 1;
        v
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.chunks.iter().flatten()
    }
}
