/// Binary indexed tree over block sizes, used to locate blocks by prefix sum.
#[derive(Clone, Debug, Default)]
pub(crate) struct Fenwick {
    tree: Vec<usize>,
}

impl Fenwick {
    pub fn from_values(values: impl Iterator<Item = usize>) -> Self {
        let mut tree: Vec<usize> = values.collect();
        let n = tree.len();
        for i in 0..n {
            let parent = i | (i + 1);
            if parent < n {
                tree[parent] += tree[i];
            }
        }
        Self { tree }
    }

    pub fn len(&self) -> usize {
        self.tree.len()
    }

    pub fn add(&mut self, mut i: usize, delta: isize) {
        while i < self.tree.len() {
            self.tree[i] = self.tree[i].wrapping_add_signed(delta);
            i |= i + 1;
        }
    }

    /// Sum of values `[0, i)`.
    pub fn prefix(&self, mut i: usize) -> usize {
        let mut s = 0;
        while i > 0 {
            s += self.tree[i - 1];
            i &= i - 1;
        }
        s
    }

    /// Smallest index `idx` with `prefix(idx + 1) > target`, plus `prefix(idx)`.
    /// The caller guarantees `target < total`.
    pub fn search(&self, target: usize) -> (usize, usize) {
        self.search_by(target, |i| self.tree[i])
    }

    /// Same as [`search`](Self::search) over a derived tree whose node `i`
    /// holds `node(i)`; node sums of linear combinations stay valid.
    pub fn search_by(&self, mut target: usize, node: impl Fn(usize) -> usize) -> (usize, usize) {
        let n = self.tree.len();
        let mut pos = 0usize;
        let mut before = 0usize;
        let mut step = n.next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next <= n && node(next - 1) <= target {
                pos = next;
                target -= node(next - 1);
                before += node(next - 1);
            }
            step >>= 1;
        }
        (pos, before)
    }

    pub fn raw(&self, i: usize) -> usize {
        self.tree[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefix_and_search() {
        let vals = [3usize, 0, 5, 2, 7];
        let mut f = Fenwick::from_values(vals.iter().copied());
        assert_eq!(f.prefix(0), 0);
        assert_eq!(f.prefix(3), 8);
        assert_eq!(f.prefix(5), 17);
        assert_eq!(f.search(0), (0, 0));
        assert_eq!(f.search(3), (2, 3));
        assert_eq!(f.search(8), (3, 8));
        assert_eq!(f.search(16), (4, 10));
        f.add(1, 4);
        assert_eq!(f.search(3), (1, 3));
        f.add(1, -4);
        assert_eq!(f.search(3), (2, 3));
    }
}
