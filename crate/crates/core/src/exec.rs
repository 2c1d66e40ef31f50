//! Execution of independent replications.

use alloc::vec::Vec;

/// Maps a replication index to a result for every index in `0..count`,
/// returning results in index order.
///
/// Implementations may run replications concurrently but must return the
/// same vector as [`Serial`]; all merging is done afterwards, in index order.
pub trait Runner: Sync {
    fn map<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Runs replications one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Serial;

impl Runner for Serial {
    fn map<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..count).map(f).collect()
    }
}
