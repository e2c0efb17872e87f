//! Deterministic worker-pool helpers honoring the `WCI_THREADS` cap.
//!
//! Per-bin tests and simulation replications are independent, so they may run
//! on several threads; results are always reduced in index order, making the
//! output identical at any thread count. The `WCI_THREADS` environment
//! variable caps the pool size; unset, the pool matches the machine's
//! available parallelism.

use std::collections::VecDeque;
use std::sync::Mutex;

/// Number of worker threads to use: `min(WCI_THREADS, available_parallelism)`,
/// at least 1. Unparsable or zero values of `WCI_THREADS` fall back to 1
/// rather than erroring, so a bad environment never aborts a run.
pub fn thread_budget() -> usize {
    let available = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    match std::env::var("WCI_THREADS") {
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(n) if n >= 1 => n.min(available),
            _ => 1,
        },
        Err(_) => available,
    }
}

/// Applies `f` to every item, possibly on several threads, and returns results
/// in input order. Falls back to a plain sequential map when the budget is 1.
pub fn ordered_parallel_map<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync,
{
    let budget = thread_budget().min(items.len().max(1));
    if budget <= 1 {
        return items.into_iter().map(f).collect();
    }

    let queue: Mutex<VecDeque<(usize, T)>> = Mutex::new(items.into_iter().enumerate().collect());
    let done: Mutex<Vec<(usize, R)>> = Mutex::new(Vec::new());

    std::thread::scope(|scope| {
        for _ in 0..budget {
            scope.spawn(|| loop {
                let next = queue.lock().expect("work queue poisoned").pop_front();
                match next {
                    Some((idx, item)) => {
                        let out = f(item);
                        done.lock().expect("result sink poisoned").push((idx, out));
                    }
                    None => break,
                }
            });
        }
    });

    let mut results = done.into_inner().expect("result sink poisoned");
    results.sort_by_key(|(idx, _)| *idx);
    results.into_iter().map(|(_, r)| r).collect()
}
