/// Iterator over all `size`-subsets of a pool, in lexicographic order of positions.
///
/// For a pool sorted by id this is lexicographic order of member ids. A size
/// larger than the pool yields nothing.
#[derive(Debug, Clone)]
pub struct Combinations<'a, T> {
    pool: &'a [T],
    positions: Vec<usize>,
    done: bool,
}

impl<'a, T: Copy> Iterator for Combinations<'a, T> {
    type Item = Vec<T>;

    fn next(&mut self) -> Option<Vec<T>> {
        if self.done {
            return None;
        }
        let item = self.positions.iter().map(|&p| self.pool[p]).collect();
        // advance: rightmost position that can still move
        let n = self.pool.len();
        let k = self.positions.len();
        match (0..k).rev().find(|&i| self.positions[i] < n - k + i) {
            Some(i) => {
                self.positions[i] += 1;
                for j in i + 1..k {
                    self.positions[j] = self.positions[j - 1] + 1;
                }
            }
            None => self.done = true,
        }
        Some(item)
    }
}

pub fn combinations<T: Copy>(pool: &[T], size: usize) -> Combinations<'_, T> {
    Combinations { pool, positions: (0..size).collect(), done: size > pool.len() }
}

/// Binomial coefficient, saturating.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u64) / (i as u64 + 1);
    }
    acc
}
