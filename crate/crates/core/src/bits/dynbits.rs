use super::bitseq::select_in_word;
use super::fenwick::Fenwick;
use crate::error::{out_of_bounds, Error, Result};

const MAX_BLOCK_BITS: usize = 4096;

#[derive(Clone, Default)]
struct Block {
    words: Vec<u64>,
    len: usize,
    ones: usize,
}

impl Block {
    #[inline]
    fn bit(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    fn rank1(&self, i: usize) -> usize {
        let w = i / 64;
        let mut r: usize = self.words[..w].iter().map(|x| x.count_ones() as usize).sum();
        if !i.is_multiple_of(64) {
            r += (self.words[w] & ((1u64 << (i % 64)) - 1)).count_ones() as usize;
        }
        r
    }

    fn insert(&mut self, i: usize, b: bool) {
        if self.len.is_multiple_of(64) {
            self.words.push(0);
        }
        let w = i / 64;
        let off = i % 64;
        let word = self.words[w];
        let low_mask = (1u64 << off) - 1;
        let mut carry = word >> 63;
        self.words[w] = (word & low_mask) | ((word & !low_mask) << 1) | ((b as u64) << off);
        for x in &mut self.words[w + 1..] {
            let next = *x >> 63;
            *x = (*x << 1) | carry;
            carry = next;
        }
        self.len += 1;
        self.ones += b as usize;
    }

    fn remove(&mut self, i: usize) -> bool {
        let w = i / 64;
        let off = i % 64;
        let word = self.words[w];
        let b = (word >> off) & 1 == 1;
        let low_mask = (1u64 << off) - 1;
        let high = if off == 63 { 0 } else { (word >> (off + 1)) << off };
        let mut cur = (word & low_mask) | high;
        for j in w + 1..self.words.len() {
            cur |= (self.words[j] & 1) << 63;
            self.words[j - 1] = cur;
            cur = self.words[j] >> 1;
        }
        *self.words.last_mut().unwrap() = cur;
        self.len -= 1;
        if self.len.is_multiple_of(64) {
            self.words.pop();
        }
        self.ones -= b as usize;
        b
    }

    fn set(&mut self, i: usize, b: bool) -> bool {
        let old = self.bit(i);
        if old != b {
            self.words[i / 64] ^= 1 << (i % 64);
            if b {
                self.ones += 1;
            } else {
                self.ones -= 1;
            }
        }
        old
    }

    fn split_off(&mut self) -> Block {
        let keep_words = self.words.len() / 2;
        let tail_words = self.words.split_off(keep_words);
        let tail_len = self.len - keep_words * 64;
        let tail_ones = tail_words.iter().map(|x| x.count_ones() as usize).sum();
        self.len = keep_words * 64;
        self.ones -= tail_ones;
        Block {
            words: tail_words,
            len: tail_len,
            ones: tail_ones,
        }
    }
}

/// Bit array with positional insert and remove, plus rank and select.
///
/// Bits live in blocks of at most 4096 bits; two Fenwick trees over block
/// lengths and block popcounts locate the block for any position or ordinal
/// in logarithmic time. The public API is 1-based like [`BitSequence`];
/// the `*_at` / `*_idx` methods are the 0-based forms used internally.
///
/// [`BitSequence`]: super::BitSequence
#[derive(Clone, Default)]
pub struct DynBitSequence {
    blocks: Vec<Block>,
    lens: Fenwick,
    ones: Fenwick,
    len: usize,
    total_ones: usize,
}

impl std::fmt::Debug for DynBitSequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "DynBitSequence(")?;
        for i in 0..self.len.min(256) {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        write!(f, ")")
    }
}

impl DynBitSequence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut s = Self::new();
        for b in bits {
            s.push(b);
        }
        s
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn count_ones(&self) -> usize {
        self.total_ones
    }

    fn rebuild_index(&mut self) {
        self.lens = Fenwick::from_values(self.blocks.iter().map(|b| b.len));
        self.ones = Fenwick::from_values(self.blocks.iter().map(|b| b.ones));
    }

    /// Block holding 0-based index `i < len`, and the offset inside it.
    #[inline]
    fn locate(&self, i: usize) -> (usize, usize) {
        let (b, before) = self.lens.search(i);
        (b, i - before)
    }

    #[inline]
    pub fn bit(&self, i: usize) -> bool {
        let (b, off) = self.locate(i);
        self.blocks[b].bit(off)
    }

    pub fn get(&self, p: usize) -> Result<bool> {
        if p == 0 || p > self.len {
            return Err(out_of_bounds(p, self.len));
        }
        Ok(self.bit(p - 1))
    }

    /// Ones among the first `i` bits; `i <= len`.
    pub fn rank1_at(&self, i: usize) -> usize {
        if i == self.len {
            return self.total_ones;
        }
        let (b, off) = self.locate(i);
        self.ones.prefix(b) + self.blocks[b].rank1(off)
    }

    pub fn rank1(&self, i: usize) -> Result<usize> {
        if i > self.len {
            return Err(out_of_bounds(i, self.len));
        }
        Ok(self.rank1_at(i))
    }

    pub fn rank0(&self, i: usize) -> Result<usize> {
        Ok(i - self.rank1(i)?)
    }

    /// 0-based index of the `j`-th one (1-based `j`), if it exists.
    pub fn select1_idx(&self, j: usize) -> Option<usize> {
        if j == 0 || j > self.total_ones {
            return None;
        }
        let (b, before_ones) = self.ones.search(j - 1);
        let start = self.lens.prefix(b);
        Some(start + select_in_block(&self.blocks[b], j - before_ones, true))
    }

    /// 0-based index of the `j`-th zero (1-based `j`), if it exists.
    pub fn select0_idx(&self, j: usize) -> Option<usize> {
        if j == 0 || j > self.len - self.total_ones {
            return None;
        }
        let (b, before_zeros) = self
            .lens
            .search_by(j - 1, |i| self.lens.raw(i) - self.ones.raw(i));
        let start = self.lens.prefix(b);
        Some(start + select_in_block(&self.blocks[b], j - before_zeros, false))
    }

    /// 1-based position of the `j`-th one.
    pub fn select1(&self, j: usize) -> Result<usize> {
        self.select1_idx(j)
            .map(|i| i + 1)
            .ok_or_else(|| Error::NotFound(format!("one #{j}")))
    }

    /// 1-based position of the `j`-th zero.
    pub fn select0(&self, j: usize) -> Result<usize> {
        self.select0_idx(j)
            .map(|i| i + 1)
            .ok_or_else(|| Error::NotFound(format!("zero #{j}")))
    }

    /// Inserts `b` at 0-based index `i <= len`.
    pub fn insert_at(&mut self, i: usize, b: bool) {
        assert!(i <= self.len, "insert index {i} past length {}", self.len);
        if self.blocks.is_empty() {
            self.blocks.push(Block::default());
            self.rebuild_index();
        }
        let (blk, off) = if i == self.len {
            let last = self.blocks.len() - 1;
            (last, self.blocks[last].len)
        } else {
            self.locate(i)
        };
        self.blocks[blk].insert(off, b);
        self.len += 1;
        self.total_ones += b as usize;
        if self.blocks[blk].len > MAX_BLOCK_BITS {
            let tail = self.blocks[blk].split_off();
            self.blocks.insert(blk + 1, tail);
            self.rebuild_index();
        } else {
            self.lens.add(blk, 1);
            if b {
                self.ones.add(blk, 1);
            }
        }
    }

    /// Inserts bit `b` so that it ends up at 1-based position `p`.
    pub fn insert(&mut self, p: usize, b: bool) -> Result<()> {
        if p == 0 || p > self.len + 1 {
            return Err(out_of_bounds(p, self.len + 1));
        }
        self.insert_at(p - 1, b);
        Ok(())
    }

    pub fn push(&mut self, b: bool) {
        self.insert_at(self.len, b);
    }

    /// Removes and returns the bit at 0-based index `i < len`.
    pub fn remove_at(&mut self, i: usize) -> bool {
        assert!(i < self.len, "remove index {i} past length {}", self.len);
        let (blk, off) = self.locate(i);
        let b = self.blocks[blk].remove(off);
        self.len -= 1;
        self.total_ones -= b as usize;
        if self.blocks[blk].len == 0 {
            self.blocks.remove(blk);
            self.rebuild_index();
        } else {
            self.lens.add(blk, -1);
            if b {
                self.ones.add(blk, -1);
            }
        }
        b
    }

    pub fn remove(&mut self, p: usize) -> Result<bool> {
        if p == 0 || p > self.len {
            return Err(out_of_bounds(p, self.len));
        }
        Ok(self.remove_at(p - 1))
    }

    /// Overwrites the bit at 0-based index `i`, returning the previous value.
    pub fn set_at(&mut self, i: usize, b: bool) -> bool {
        let (blk, off) = self.locate(i);
        let old = self.blocks[blk].set(off, b);
        if old != b {
            let d = if b { 1 } else { -1 };
            self.ones.add(blk, d);
            self.total_ones = self.total_ones.wrapping_add_signed(d);
        }
        old
    }

    pub fn set(&mut self, p: usize, b: bool) -> Result<bool> {
        if p == 0 || p > self.len {
            return Err(out_of_bounds(p, self.len));
        }
        Ok(self.set_at(p - 1, b))
    }

    /// Ones in the 0-based half-open range `[from, to)`.
    pub fn count_ones_range(&self, from: usize, to: usize) -> usize {
        self.rank1_at(to) - self.rank1_at(from)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.blocks
            .iter()
            .flat_map(|b| (0..b.len).map(move |i| b.bit(i)))
    }

    pub fn heap_bytes(&self) -> usize {
        self.blocks.iter().map(|b| b.words.capacity() * 8).sum::<usize>()
            + self.blocks.capacity() * std::mem::size_of::<Block>()
            + (self.lens.len() + self.ones.len()) * std::mem::size_of::<usize>()
    }
}

fn select_in_block(block: &Block, mut j: usize, one: bool) -> usize {
    for (w, &word) in block.words.iter().enumerate() {
        let mut x = if one { word } else { !word };
        let valid = (block.len - w * 64).min(64);
        if valid < 64 {
            x &= (1u64 << valid) - 1;
        }
        let c = x.count_ones() as usize;
        if j <= c {
            return w * 64 + select_in_word(x, j);
        }
        j -= c;
    }
    unreachable!("select ordinal beyond block contents")
}
