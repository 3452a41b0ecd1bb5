use super::dynbits::DynBitSequence;
use crate::error::{out_of_bounds, Error, Result};

/// Dynamic sequence of small integer symbols with access, rank and select.
///
/// Stored as a wavelet matrix whose levels are [`DynBitSequence`]s, so every
/// operation costs `O(log σ)` dynamic-bitmap operations. When a symbol wider
/// than the current level count arrives, the matrix is rebuilt one level
/// taller; that happens at most `log σ` times over the sequence's life.
///
/// Positions are 1-based.
#[derive(Clone, Debug)]
pub struct DynSequence {
    levels: Vec<DynBitSequence>,
    /// Zeros per level, cached.
    zeros: Vec<usize>,
    len: usize,
}

impl Default for DynSequence {
    fn default() -> Self {
        Self::new()
    }
}

impl DynSequence {
    pub fn new() -> Self {
        Self {
            levels: vec![DynBitSequence::new()],
            zeros: vec![0],
            len: 0,
        }
    }

    pub fn from_symbols<I: IntoIterator<Item = u32>>(symbols: I) -> Self {
        let mut s = Self::new();
        for c in symbols {
            s.push(c);
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

    fn height(&self) -> usize {
        self.levels.len()
    }

    fn fits(&self, c: u32) -> bool {
        self.height() >= 32 || (c >> self.height()) == 0
    }

    #[inline]
    fn bit_of(&self, c: u32, level: usize) -> bool {
        (c >> (self.height() - 1 - level)) & 1 == 1
    }

    /// Position at `level + 1` reached from index `i` at `level`.
    #[inline]
    fn descend(&self, level: usize, i: usize, bit: bool) -> usize {
        let ones = self.levels[level].rank1_at(i);
        if bit {
            self.zeros[level] + ones
        } else {
            i - ones
        }
    }

    fn grow_to_fit(&mut self, c: u32) {
        if self.fits(c) {
            return;
        }
        let symbols: Vec<u32> = (0..self.len).map(|i| self.access_idx(i)).collect();
        let needed = (32 - c.leading_zeros()) as usize;
        *self = Self {
            levels: vec![DynBitSequence::new(); needed],
            zeros: vec![0; needed],
            len: 0,
        };
        for s in symbols {
            self.push(s);
        }
    }

    fn access_idx(&self, mut i: usize) -> u32 {
        let mut c = 0u32;
        for level in 0..self.height() {
            let bit = self.levels[level].bit(i);
            c = (c << 1) | bit as u32;
            i = self.descend(level, i, bit);
        }
        c
    }

    /// Inserts symbol `c` at 0-based index `i <= len`.
    pub fn insert_at(&mut self, mut i: usize, c: u32) {
        assert!(i <= self.len);
        self.grow_to_fit(c);
        for level in 0..self.height() {
            let bit = self.bit_of(c, level);
            self.levels[level].insert_at(i, bit);
            if !bit {
                self.zeros[level] += 1;
            }
            i = self.descend(level, i, bit);
        }
        self.len += 1;
    }

    /// Inserts `c` so it lands at 1-based position `p`.
    pub fn insert(&mut self, p: usize, c: u32) -> Result<()> {
        if p == 0 || p > self.len + 1 {
            return Err(out_of_bounds(p, self.len + 1));
        }
        self.insert_at(p - 1, c);
        Ok(())
    }

    pub fn push(&mut self, c: u32) {
        self.insert_at(self.len, c);
    }

    /// Removes the symbol at 1-based position `p` and returns it.
    pub fn remove(&mut self, p: usize) -> Result<u32> {
        if p == 0 || p > self.len {
            return Err(out_of_bounds(p, self.len));
        }
        let mut i = p - 1;
        let mut path = Vec::with_capacity(self.height());
        for level in 0..self.height() {
            let bit = self.levels[level].bit(i);
            path.push((i, bit));
            i = self.descend(level, i, bit);
        }
        let mut c = 0u32;
        for (level, &(i, bit)) in path.iter().enumerate() {
            self.levels[level].remove_at(i);
            if !bit {
                self.zeros[level] -= 1;
            }
            c = (c << 1) | bit as u32;
        }
        self.len -= 1;
        Ok(c)
    }

    /// Symbol at 1-based position `p`.
    pub fn access(&self, p: usize) -> Result<u32> {
        if p == 0 || p > self.len {
            return Err(out_of_bounds(p, self.len));
        }
        Ok(self.access_idx(p - 1))
    }

    /// Occurrences of `c` among the first `i` symbols.
    pub fn rank(&self, c: u32, i: usize) -> Result<usize> {
        if i > self.len {
            return Err(out_of_bounds(i, self.len));
        }
        if !self.fits(c) {
            return Ok(0);
        }
        let (mut s, mut e) = (0usize, i);
        for level in 0..self.height() {
            let bit = self.bit_of(c, level);
            s = self.descend(level, s, bit);
            e = self.descend(level, e, bit);
        }
        Ok(e - s)
    }

    /// 1-based position of the `j`-th occurrence of `c`.
    pub fn select(&self, c: u32, j: usize) -> Result<usize> {
        let not_found = || Error::NotFound(format!("occurrence #{j} of symbol {c}"));
        if j == 0 || !self.fits(c) {
            return Err(not_found());
        }
        let mut s = 0usize;
        for level in 0..self.height() {
            s = self.descend(level, s, self.bit_of(c, level));
        }
        let mut p = s + j - 1;
        for level in (0..self.height()).rev() {
            let bv = &self.levels[level];
            let found = if self.bit_of(c, level) {
                p.checked_sub(self.zeros[level])
                    .and_then(|k| bv.select1_idx(k + 1))
            } else {
                bv.select0_idx(p + 1)
            };
            p = found.ok_or_else(not_found)?;
        }
        // The bottom position may land on a different symbol when j exceeds
        // the count; the final check rejects that case.
        if p >= self.len || self.access_idx(p) != c {
            return Err(not_found());
        }
        Ok(p + 1)
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.len).map(|i| self.access_idx(i))
    }

    pub fn heap_bytes(&self) -> usize {
        self.levels.iter().map(|l| l.heap_bytes()).sum::<usize>() + self.zeros.len() * 8
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const A: u32 = 0;
    const B: u32 = 1;
    const C: u32 = 2;

    #[test]
    fn abab_examples() {
        let mut s = DynSequence::from_symbols([A, B, A, B]);
        assert_eq!(s.rank(A, 3).unwrap(), 2);
        assert_eq!(s.select(B, 2).unwrap(), 4);
        s.insert(2, C).unwrap();
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![A, C, B, A, B]);
        assert_eq!(s.access(2).unwrap(), C);
    }

    #[test]
    fn unknown_symbols() {
        let s = DynSequence::from_symbols([A, B, A, B]);
        assert_eq!(s.rank(77, 4).unwrap(), 0);
        assert!(matches!(s.select(77, 1), Err(Error::NotFound(_))));
        assert!(matches!(s.select(C, 1), Err(Error::NotFound(_))));
        assert!(matches!(s.select(A, 3), Err(Error::NotFound(_))));
        assert!(s.access(5).is_err());
    }

    #[test]
    fn grows_alphabet_and_removes() {
        let mut s = DynSequence::new();
        let mut naive = Vec::new();
        for i in 0..300u32 {
            let c = (i * 37) % 50;
            let p = ((i as usize) * 13) % (naive.len() + 1);
            s.insert_at(p, c);
            naive.insert(p, c);
        }
        for _ in 0..100 {
            let p = naive.len() / 3 + 1;
            assert_eq!(s.remove(p).unwrap(), naive.remove(p - 1));
        }
        assert_eq!(s.iter().collect::<Vec<_>>(), naive);
        for c in 0..50u32 {
            let total = naive.iter().filter(|&&x| x == c).count();
            assert_eq!(s.rank(c, naive.len()).unwrap(), total);
            for j in 1..=total {
                let p = s.select(c, j).unwrap();
                assert_eq!(naive[p - 1], c);
                assert_eq!(s.rank(c, p).unwrap(), j);
            }
        }
    }
}
