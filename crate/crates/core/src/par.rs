//! Data-parallel helpers. Every batch job in the crate (self-test suites,
//! acceptance runs, batch decisions) maps a pure function over independent
//! items, so results come back in input order whichever executor runs them.

/// Executor choice for batch jobs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Exec {
    /// Worker pool over all cores; falls back to `Sequential` when the
    /// `parallel` feature is off.
    #[default]
    Parallel,
    Sequential,
}

impl Exec {
    /// Whether this build can actually run in parallel.
    pub fn available() -> bool {
        cfg!(feature = "parallel")
    }

    /// Maps `f` over `items`, preserving order.
    pub fn map<T, R, F>(self, items: Vec<T>, f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                items.into_par_iter().map(f).collect()
            }
            _ => items.into_iter().map(f).collect(),
        }
    }

    /// `map` over a range of seeds.
    pub fn map_seeds<R, F>(self, seeds: std::ops::Range<u64>, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(u64) -> R + Sync + Send,
    {
        self.map(seeds.collect(), f)
    }
}

/// Decides a batch of pairs in one system.
pub fn decide_batch(
    exec: Exec,
    pairs: Vec<(crate::Arrow, crate::Arrow)>,
    system: crate::SystemId,
) -> Vec<Result<crate::Verdict, crate::ArrowError>> {
    exec.map(pairs, |(f, g)| crate::decide_eq(&f, &g, system))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn executors_agree_and_keep_order() {
        let f = |s: u64| s.wrapping_mul(0x9e37_79b9_7f4a_7c15) >> 7;
        let a = Exec::Parallel.map_seeds(0..1000, f);
        let b = Exec::Sequential.map_seeds(0..1000, f);
        assert_eq!(a, b);
        assert_eq!(a[3], f(3));
    }
}
