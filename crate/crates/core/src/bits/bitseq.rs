use crate::error::{out_of_bounds, Error, Result};

/// Words per rank sample (512 bits).
const WORDS_PER_BLOCK: usize = 8;

/// Immutable bit array with a sampled rank directory.
///
/// Positions are 1-based in the public API: `rank1(i)` counts the ones in
/// positions `1..=i` (equivalently, among the first `i` bits) and `select1(j)`
/// returns the position of the `j`-th one.
#[derive(Clone, PartialEq, Eq)]
pub struct BitSequence {
    words: Vec<u64>,
    len: usize,
    /// `blocks[b]` holds the number of ones in `words[..b * WORDS_PER_BLOCK]`.
    blocks: Vec<usize>,
    /// Per block, seven 9-bit counts: ones in the block before word 1..=7.
    subs: Vec<u64>,
}

impl Default for BitSequence {
    fn default() -> Self {
        Self::with_directory(Vec::new(), 0)
    }
}

impl std::fmt::Debug for BitSequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BitSequence(")?;
        for i in 0..self.len.min(256) {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        if self.len > 256 {
            write!(f, "…[{} bits]", self.len)?;
        }
        write!(f, ")")
    }
}

impl BitSequence {
    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut builder = BitBuilder::new();
        for b in bits {
            builder.push(b);
        }
        builder.finish()
    }

    /// Parses a string of `0`/`1` characters; anything else is ignored.
    pub fn from_str_bits(s: &str) -> Self {
        Self::from_bits(s.chars().filter_map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        }))
    }

    /// Wraps raw words. Bits past `len` in the last word must be zero.
    pub fn from_words(mut words: Vec<u64>, len: usize) -> Result<Self> {
        let need = len.div_ceil(64);
        if words.len() != need {
            return Err(Error::Corrupt(format!(
                "bit sequence of {len} bits needs {need} words, got {}",
                words.len()
            )));
        }
        if !len.is_multiple_of(64) {
            let last = words.last_mut().expect("non-empty");
            if *last >> (len % 64) != 0 {
                return Err(Error::Corrupt("stray bits past sequence end".into()));
            }
        }
        words.shrink_to_fit();
        Ok(Self::with_directory(words, len))
    }

    fn with_directory(words: Vec<u64>, len: usize) -> Self {
        let nblocks = words.len().div_ceil(WORDS_PER_BLOCK);
        let mut blocks = Vec::with_capacity(nblocks + 1);
        let mut subs = Vec::with_capacity(nblocks);
        let mut acc = 0usize;
        for chunk in words.chunks(WORDS_PER_BLOCK) {
            blocks.push(acc);
            let mut rel = 0u64;
            let mut packed = 0u64;
            for j in 1..WORDS_PER_BLOCK {
                rel += chunk.get(j - 1).map_or(0, |w| w.count_ones() as u64);
                packed |= rel << (9 * (j - 1));
            }
            subs.push(packed);
            acc += chunk.iter().map(|w| w.count_ones() as usize).sum::<usize>();
        }
        blocks.push(acc);
        Self {
            words,
            len,
            blocks,
            subs,
        }
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
        *self.blocks.last().unwrap_or(&0)
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Bit at 0-based index `i`. Caller guarantees `i < len`.
    #[inline]
    pub fn bit(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    /// Bit at 1-based position `p`.
    pub fn get(&self, p: usize) -> Result<bool> {
        if p == 0 || p > self.len {
            return Err(out_of_bounds(p, self.len));
        }
        Ok(self.bit(p - 1))
    }

    /// Number of ones among the first `i` bits.
    pub fn rank1(&self, i: usize) -> Result<usize> {
        if i > self.len {
            return Err(out_of_bounds(i, self.len));
        }
        Ok(self.rank1_unchecked(i))
    }

    #[inline]
    pub fn rank1_unchecked(&self, i: usize) -> usize {
        let word = i / 64;
        let block = word / WORDS_PER_BLOCK;
        let mut r = self.blocks[block];
        let j = word % WORDS_PER_BLOCK;
        if j != 0 {
            r += ((self.subs[block] >> (9 * (j - 1))) & 0x1ff) as usize;
        }
        let rem = i % 64;
        if rem != 0 {
            r += (self.words[word] & ((1u64 << rem) - 1)).count_ones() as usize;
        }
        r
    }

    pub fn rank0(&self, i: usize) -> Result<usize> {
        Ok(i - self.rank1(i)?)
    }

    /// 1-based position of the `j`-th one.
    pub fn select1(&self, j: usize) -> Result<usize> {
        if j == 0 || j > self.count_ones() {
            return Err(Error::NotFound(format!("one #{j}")));
        }
        // Last block whose prefix count is below j.
        let block = self.blocks.partition_point(|&c| c < j) - 1;
        let mut remaining = j - self.blocks[block];
        let mut w = block * WORDS_PER_BLOCK;
        loop {
            let c = self.words[w].count_ones() as usize;
            if remaining <= c {
                return Ok(w * 64 + select_in_word(self.words[w], remaining) + 1);
            }
            remaining -= c;
            w += 1;
        }
    }

    /// Heap bytes used by the payload and the rank directory.
    pub fn heap_bytes(&self) -> usize {
        self.words.len() * 8 + self.blocks.len() * std::mem::size_of::<usize>() + self.subs.len() * 8
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.bit(i))
    }
}

/// 0-based index of the `r`-th (1-based) set bit of `w`.
#[inline]
pub(crate) fn select_in_word(mut w: u64, r: usize) -> usize {
    debug_assert!(r >= 1 && r <= w.count_ones() as usize);
    for _ in 1..r {
        w &= w - 1;
    }
    w.trailing_zeros() as usize
}

/// Append-only builder for [`BitSequence`].
#[derive(Default, Debug, Clone)]
pub struct BitBuilder {
    words: Vec<u64>,
    len: usize,
}

impl BitBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            words: Vec::with_capacity(bits.div_ceil(64)),
            len: 0,
        }
    }

    #[inline]
    pub fn push(&mut self, b: bool) {
        if self.len.is_multiple_of(64) {
            self.words.push(0);
        }
        if b {
            *self.words.last_mut().unwrap() |= 1 << (self.len % 64);
        }
        self.len += 1;
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn finish(self) -> BitSequence {
        BitSequence::with_directory(self.words, self.len)
    }
}
