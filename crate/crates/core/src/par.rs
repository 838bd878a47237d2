//! Order-preserving data-parallel map. With the `parallel` feature disabled
//! every call runs sequentially, whatever `Execution` asks for.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// `threads == 0` uses the global pool.
    Parallel {
        threads: usize,
    },
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel { threads: 0 }
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// `jobs <= 1` means sequential.
    pub fn with_jobs(jobs: usize) -> Self {
        if jobs <= 1 {
            Execution::Sequential
        } else {
            Execution::Parallel { threads: jobs }
        }
    }

    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && matches!(self, Execution::Parallel { .. })
    }
}

/// Applies `f` to every item; results keep the input order.
pub fn map_ordered<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel { threads } if items.len() > 1 => {
            use rayon::prelude::*;
            let run = || items.par_iter().map(&f).collect();
            if threads == 0 {
                run()
            } else {
                match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
                    Ok(pool) => pool.install(run),
                    Err(err) => {
                        log::warn!("thread pool unavailable ({err}); running sequentially");
                        items.iter().map(f).collect()
                    }
                }
            }
        }
        _ => items.iter().map(f).collect(),
    }
}

/// Like [`map_ordered`], returning the first error in input order.
pub fn try_map_ordered<T, R, E, F>(exec: Execution, items: &[T], f: F) -> Result<Vec<R>, E>
where
    T: Sync,
    R: Send,
    E: Send,
    F: Fn(&T) -> Result<R, E> + Sync + Send,
{
    map_ordered(exec, items, f).into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let items: Vec<u64> = (0..500).collect();
        for exec in [
            Execution::Sequential,
            Execution::Parallel { threads: 3 },
            Execution::Parallel { threads: 0 },
        ] {
            let out = map_ordered(exec, &items, |x| x * x);
            assert_eq!(out, items.iter().map(|x| x * x).collect::<Vec<_>>());
        }
    }

    #[test]
    fn first_error_in_order_wins() {
        let items: Vec<i32> = (0..100).collect();
        let r: Result<Vec<i32>, i32> = try_map_ordered(Execution::Parallel { threads: 4 }, &items, |&x| {
            if x % 30 == 29 {
                Err(x)
            } else {
                Ok(x)
            }
        });
        assert_eq!(r, Err(29));
    }

    #[test]
    fn jobs_mapping() {
        assert_eq!(Execution::with_jobs(1), Execution::Sequential);
        assert_eq!(Execution::with_jobs(4), Execution::Parallel { threads: 4 });
    }
}
