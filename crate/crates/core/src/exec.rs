//! Data-parallel map used by the candidate and class-pair loops.
//!
//! Results always come back in input order, so every reduction downstream
//! sees the same sequence whatever the thread count.

/// How independent evaluations are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Uses the rayon pool when the `parallel` feature is enabled, otherwise
    /// runs sequentially.
    #[default]
    Parallel,
}

impl Execution {
    /// Whether this mode will actually fan out to worker threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

pub(crate) fn par_map<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec == Execution::Parallel && items.len() > 1 {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let items: Vec<u64> = (0..1000).collect();
        let seq = par_map(Execution::Sequential, &items, |x| x * x);
        let par = par_map(Execution::Parallel, &items, |x| x * x);
        assert_eq!(seq, par);
        assert_eq!(seq[999], 999 * 999);
    }
}
