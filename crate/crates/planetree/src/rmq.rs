//! Sparse-table range minimum queries: O(n log n) build, O(1) query.

/// Minimum over closed index ranges of a fixed array.
pub struct MinSparseTable<T> {
    levels: usize,
    n: usize,
    table: Vec<T>,
}

fn flog2(v: usize) -> usize {
    debug_assert!(v > 0);
    v.ilog2() as usize
}

impl<T: Copy + PartialOrd> MinSparseTable<T> {
    pub fn new(values: &[T]) -> Self {
        assert!(!values.is_empty());
        let n = values.len();
        let levels = flog2(n) + 1;
        let mut table = Vec::with_capacity(levels * n);
        table.extend_from_slice(values);
        for level in 1..levels {
            let half = 1usize << (level - 1);
            for j in 0..n {
                let a = table[(level - 1) * n + j];
                let m = if j + half < n {
                    let b = table[(level - 1) * n + j + half];
                    if b < a {
                        b
                    } else {
                        a
                    }
                } else {
                    a
                };
                table.push(m);
            }
        }
        MinSparseTable { levels, n, table }
    }

    /// Minimum of `values[lo..=hi]`.
    pub fn min(&self, lo: usize, hi: usize) -> T {
        assert!(lo <= hi && hi < self.n);
        let k = flog2(hi - lo + 1).min(self.levels - 1);
        let a = self.table[k * self.n + lo];
        let b = self.table[k * self.n + hi + 1 - (1usize << k)];
        if b < a {
            b
        } else {
            a
        }
    }
}
