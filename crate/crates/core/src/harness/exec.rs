//! Block-level map/reduce, parallel with the `parallel` feature.
//!
//! Each block's result depends only on its own RNG stream and tallies merge
//! by integer addition, so both backends produce identical reports.

/// A per-block accumulator with an associative, commutative merge.
pub trait Tally: Default + Send {
    fn merge(&mut self, other: Self);
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Falls back to sequential when built without the `parallel` feature.
    #[default]
    Parallel,
}

/// Folds `record(acc, i)` over blocks `0..n` and merges the partial tallies.
pub fn map_reduce<T, F>(n: u64, exec: Execution, record: F) -> T
where
    T: Tally,
    F: Fn(&mut T, u64) + Sync + Send,
{
    match exec {
        Execution::Sequential => sequential(n, record),
        Execution::Parallel => parallel(n, record),
    }
}

fn sequential<T: Tally, F: Fn(&mut T, u64)>(n: u64, record: F) -> T {
    let mut acc = T::default();
    for i in 0..n {
        record(&mut acc, i);
    }
    acc
}

/// Blocks handed to one rayon task.
#[cfg(feature = "parallel")]
const BLOCKS_PER_TASK: u64 = 4096;

#[cfg(feature = "parallel")]
fn parallel<T, F>(n: u64, record: F) -> T
where
    T: Tally,
    F: Fn(&mut T, u64) + Sync + Send,
{
    use rayon::prelude::*;

    (0..n.div_ceil(BLOCKS_PER_TASK))
        .into_par_iter()
        .fold(T::default, |mut acc, chunk| {
            let start = chunk * BLOCKS_PER_TASK;
            for i in start..n.min(start + BLOCKS_PER_TASK) {
                record(&mut acc, i);
            }
            acc
        })
        .reduce(T::default, |mut a, b| {
            a.merge(b);
            a
        })
}

#[cfg(not(feature = "parallel"))]
fn parallel<T, F>(n: u64, record: F) -> T
where
    T: Tally,
    F: Fn(&mut T, u64) + Sync + Send,
{
    sequential(n, record)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Default, Debug, PartialEq)]
    struct Sum(u64, u64);

    impl Tally for Sum {
        fn merge(&mut self, other: Self) {
            self.0 += other.0;
            self.1 += other.1;
        }
    }

    #[test]
    fn backends_agree() {
        let f = |acc: &mut Sum, i: u64| acc.merge(Sum(i, i * i % 7));
        assert_eq!(map_reduce(10_000, Execution::Sequential, f), map_reduce(10_000, Execution::Parallel, f));
    }
}
