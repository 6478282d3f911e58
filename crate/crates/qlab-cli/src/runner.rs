//! Trial parallelism. Trials are pure functions of their index, so workers
//! pull indices from a shared counter and write into an index-addressed
//! slot table; output order never depends on completion order.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Worker count: `QLAB_THREADS` caps it, 0 or unset means one per
/// available core.
pub fn thread_count() -> usize {
    let auto = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    match std::env::var("QLAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        None | Some(0) => auto,
        Some(n) => n,
    }
}

/// Run `f(0..n)` across workers, returning results ordered by index.
pub fn map_ordered<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let workers = thread_count().min(n.max(1));
    if workers <= 1 {
        return (0..n).map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<T>>> = (0..n).map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let out = f(i);
                *slots[i].lock().unwrap() = Some(out);
            });
        }
    });
    slots
        .into_iter()
        .map(|s| s.into_inner().unwrap().expect("every trial slot filled"))
        .collect()
}
