//! Execution strategy for the data-parallel inner loops.
//!
//! Equation assembly, certificate scans and batch validation iterate over
//! independent index tuples; with the `parallel` feature enabled those loops
//! run on rayon. Results are identical either way: parallel collection
//! preserves order and failing witnesses use `find_first`.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How the data-parallel loops run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for Execution {
    #[cfg(feature = "parallel")]
    fn default() -> Self {
        Execution::Parallel
    }
    #[cfg(not(feature = "parallel"))]
    fn default() -> Self {
        Execution::Sequential
    }
}

/// Order-preserving flat map.
pub(crate) fn flat_map<T, U>(
    exec: Execution,
    items: &[T],
    f: impl Fn(&T) -> Vec<U> + Sync + Send,
) -> Vec<U>
where
    T: Sync,
    U: Send,
{
    match exec {
        Execution::Sequential => items.iter().flat_map(|t| f(t)).collect(),
        #[cfg(feature = "parallel")]
        Execution::Parallel => items.par_iter().map(|t| f(t)).flatten().collect(),
    }
}

/// First `Some` in item order.
pub(crate) fn find_first_map<T, U>(
    exec: Execution,
    items: &[T],
    f: impl Fn(&T) -> Option<U> + Sync + Send,
) -> Option<U>
where
    T: Sync,
    U: Send,
{
    match exec {
        Execution::Sequential => items.iter().find_map(|t| f(t)),
        #[cfg(feature = "parallel")]
        Execution::Parallel => items.par_iter().filter_map(|t| f(t)).find_first(|_| true),
    }
}

pub(crate) fn all<T>(
    exec: Execution,
    items: &[T],
    pred: impl Fn(&T) -> bool + Sync + Send,
) -> bool
where
    T: Sync,
{
    match exec {
        Execution::Sequential => items.iter().all(|t| pred(t)),
        #[cfg(feature = "parallel")]
        Execution::Parallel => items.par_iter().all(|t| pred(t)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_map_preserves_order() {
        let items: Vec<usize> = (0..64).collect();
        let seq = flat_map(Execution::Sequential, &items, |&i| vec![i, i + 100]);
        #[cfg(feature = "parallel")]
        {
            let par = flat_map(Execution::Parallel, &items, |&i| vec![i, i + 100]);
            assert_eq!(seq, par);
        }
        assert_eq!(seq.len(), 128);
        assert_eq!(seq[0], 0);
        assert_eq!(seq[1], 100);
    }

    #[test]
    fn find_first_is_deterministic() {
        let items: Vec<usize> = (0..1000).collect();
        let f = |&i: &usize| if i % 7 == 3 { Some(i) } else { None };
        assert_eq!(find_first_map(Execution::Sequential, &items, f), Some(3));
        #[cfg(feature = "parallel")]
        assert_eq!(find_first_map(Execution::Parallel, &items, f), Some(3));
    }
}
