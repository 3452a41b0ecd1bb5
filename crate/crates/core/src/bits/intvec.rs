/// Fixed-width packed integer array; the width fits the largest value pushed
/// at construction time.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct IntVector {
    words: Vec<u64>,
    width: u32,
    len: usize,
}

impl std::fmt::Debug for IntVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.iter()).finish()
    }
}

impl IntVector {
    pub fn from_slice(values: &[u64]) -> Self {
        let max = values.iter().copied().max().unwrap_or(0);
        let width = (64 - max.leading_zeros()).max(1);
        let mut words = vec![0u64; (values.len() * width as usize).div_ceil(64)];
        for (i, &v) in values.iter().enumerate() {
            let bit = i * width as usize;
            let (w, off) = (bit / 64, bit % 64);
            words[w] |= v << off;
            if off + width as usize > 64 {
                words[w + 1] |= v >> (64 - off);
            }
        }
        Self {
            words,
            width,
            len: values.len(),
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

    /// Value at 0-based index `i`. Panics when out of range.
    #[inline]
    pub fn get(&self, i: usize) -> u64 {
        assert!(i < self.len, "index {i} out of range {}", self.len);
        let width = self.width as usize;
        let bit = i * width;
        let (w, off) = (bit / 64, bit % 64);
        let mask = if width == 64 { u64::MAX } else { (1u64 << width) - 1 };
        let mut v = self.words[w] >> off;
        if off + width > 64 {
            v |= self.words[w + 1] << (64 - off);
        }
        v & mask
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len).map(|i| self.get(i))
    }

    pub fn to_vec(&self) -> Vec<u64> {
        self.iter().collect()
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn heap_bytes(&self) -> usize {
        self.words.len() * 8
    }
}
