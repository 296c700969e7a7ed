//! Enumeration sharded over worker threads.
//!
//! Recurrents are split by the grain count on the first non-sink vertex.
//! Shard results are combined in shard order, so the output does not depend
//! on the number of threads.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use avalanche_core::sandpile::{enumerate_recurrents, enumerate_recurrents_shard};
use avalanche_core::{avalanche, Graph, MultiPoly, Result, Sandpile};

pub fn default_threads() -> usize {
    thread::available_parallelism().map_or(1, |n| n.get())
}

/// Shards to process; `None` means the whole enumeration at once.
fn plan(g: &Graph, threads: usize) -> Vec<Option<u64>> {
    if threads <= 1 || g.n_nonsink() == 0 {
        vec![None]
    } else {
        (0..g.nonsink_degree(0)).map(Some).collect()
    }
}

/// Runs `work` on every shard with at most `threads` workers and returns the
/// results in shard order.
fn run_shards<T: Send>(g: &Graph, threads: usize, work: impl Fn(Option<u64>) -> Result<T> + Sync) -> Result<Vec<T>> {
    let shards = plan(g, threads);
    if shards.len() == 1 {
        return Ok(vec![work(shards[0])?]);
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<T>>>> = Mutex::new(shards.iter().map(|_| None).collect());
    thread::scope(|s| {
        for _ in 0..threads.min(shards.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&shard) = shards.get(i) else { break };
                let r = work(shard);
                slots.lock().expect("worker panicked")[i] = Some(r);
            });
        }
    });
    slots
        .into_inner()
        .expect("worker panicked")
        .into_iter()
        .map(|r| r.expect("every shard ran"))
        .collect()
}

pub fn avalanche_polynomial(g: &Graph, limit: u64, threads: usize) -> Result<MultiPoly> {
    let parts = run_shards(g, threads, |shard| match shard {
        None => avalanche::avalanche_polynomial(g, limit),
        Some(first) => avalanche::avalanche_polynomial_shard(g, first, limit),
    })?;
    let mut total = MultiPoly::zero(g.n_nonsink());
    for p in &parts {
        total = total.checked_add(p)?;
    }
    Ok(total)
}

/// All recurrents in lexicographic order.
pub fn recurrents(g: &Graph, limit: u64, threads: usize) -> Result<Vec<Sandpile>> {
    let parts = run_shards(g, threads, |shard| {
        Ok(match shard {
            None => enumerate_recurrents(g, limit)?.collect::<Vec<_>>(),
            Some(first) => enumerate_recurrents_shard(g, first, limit)?.collect(),
        })
    })?;
    Ok(parts.into_iter().flatten().collect())
}

pub fn recurrent_count(g: &Graph, limit: u64, threads: usize) -> Result<u64> {
    let parts = run_shards(g, threads, |shard| {
        Ok(match shard {
            None => enumerate_recurrents(g, limit)?.count(),
            Some(first) => enumerate_recurrents_shard(g, first, limit)?.count(),
        } as u64)
    })?;
    Ok(parts.into_iter().sum())
}
