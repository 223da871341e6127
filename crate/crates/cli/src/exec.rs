use mcc_core::exec::Executor;
use rayon::prelude::*;

/// Runs jobs on the global Rayon pool; results keep job order.
#[derive(Clone, Copy, Debug, Default)]
pub struct Rayon;

impl Executor for Rayon {
    fn map<T, F>(&self, jobs: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..jobs).into_par_iter().map(f).collect()
    }
}
