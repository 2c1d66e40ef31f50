use rayon::prelude::*;
use semimarkov::exec::Runner;

/// Runs replications on a dedicated rayon pool. Results come back in index
/// order, so the pool size never affects the output.
pub struct RayonRunner {
    pool: rayon::ThreadPool,
}

impl RayonRunner {
    pub fn new(workers: usize) -> Result<Self, rayon::ThreadPoolBuildError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()?;
        Ok(Self { pool })
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Runner for RayonRunner {
    fn map<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        self.pool.install(|| (0..count).into_par_iter().map(f).collect())
    }
}

/// `std::thread::available_parallelism`, or 1.
pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[cfg(test)]
mod tests {
    use super::*;
    use semimarkov::exec::Serial;

    #[test]
    fn matches_serial_order() {
        let runner = RayonRunner::new(4).unwrap();
        let f = |i: usize| (i * i) as u64 ^ 0x5555;
        assert_eq!(runner.map(1000, f), Serial.map(1000, f));
    }
}
