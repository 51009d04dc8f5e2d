//! Scoped rayon pools with an explicit worker count.

use rayon::ThreadPoolBuilder;

/// Runs `f` on a dedicated pool of `threads` workers (0 = rayon default).
pub fn with_threads<R, F>(threads: usize, f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    match ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Worker count of the pool the caller is running on.
pub fn current_threads() -> usize {
    rayon::current_num_threads()
}
