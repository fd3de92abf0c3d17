//! Folding statistics over consecutive pairs `(n, n + 1)`.
//!
//! The range is cut into chunks that are sieved independently (each chunk
//! sieves one extra integer so the last `n` sees `n + 1`), folded in
//! parallel and merged. Accumulators hold exact integer counts so the merged
//! result does not depend on how the work was split.

use rayon::prelude::*;

use crate::error::Result;
use crate::sieve::{Entry, Sieve};

/// Integers per independently sieved chunk.
pub const CHUNK: u64 = 1 << 18;

/// Folds `visit(acc, n, entry(n), entry(n + 1))` over `n` in `[lo, hi]`.
pub fn fold_pairs<A, I, V, R>(lo: u64, hi: u64, init: I, visit: V, merge: R) -> Result<A>
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    V: Fn(&mut A, u64, Entry, Entry) + Sync + Send,
    R: Fn(A, A) -> A + Sync + Send,
{
    if lo > hi {
        return Ok(init());
    }
    let sieve = Sieve::with_budget(hi + 1, CHUNK + 1);
    let starts: Vec<u64> = (lo..=hi).step_by(CHUNK as usize).collect();
    starts
        .into_par_iter()
        .map(|a| {
            let b = hi.min(a + CHUNK - 1);
            let w = sieve.window(a, b + 1)?;
            let mut acc = init();
            let mut cur = w.entry_at(0);
            for i in 0..(b - a + 1) as usize {
                let next = w.entry_at(i + 1);
                visit(&mut acc, a + i as u64, cur, next);
                cur = next;
            }
            Ok(acc)
        })
        .try_reduce(&init, |x, y| Ok(merge(x, y)))
}

/// Cumulative folds over `[1, g]` for every checkpoint `g` of an increasing
/// grid. Each gap between checkpoints is folded on its own, then prefix
/// merged, so one sieve pass serves the whole grid.
pub fn fold_pairs_at<A, I, V, R>(grid: &[u64], init: I, visit: V, merge: R) -> Result<Vec<A>>
where
    A: Send + Clone,
    I: Fn() -> A + Sync + Send,
    V: Fn(&mut A, u64, Entry, Entry) + Sync + Send,
    R: Fn(A, A) -> A + Sync + Send,
{
    let mut out = Vec::with_capacity(grid.len());
    let mut running = init();
    let mut prev = 0u64;
    for &g in grid {
        assert!(g > prev, "checkpoint grid must be strictly increasing");
        let part = fold_pairs(prev + 1, g, &init, &visit, &merge)?;
        running = merge(running, part);
        out.push(running.clone());
        prev = g;
    }
    Ok(out)
}

/// Folds `visit(acc, n, entry(n))` over `n` in `[lo, hi]`.
pub fn fold_entries<A, I, V, R>(lo: u64, hi: u64, init: I, visit: V, merge: R) -> Result<A>
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    V: Fn(&mut A, u64, Entry) + Sync + Send,
    R: Fn(A, A) -> A + Sync + Send,
{
    if lo > hi {
        return Ok(init());
    }
    let sieve = Sieve::with_budget(hi, CHUNK);
    let starts: Vec<u64> = (lo..=hi).step_by(CHUNK as usize).collect();
    starts
        .into_par_iter()
        .map(|a| {
            let b = hi.min(a + CHUNK - 1);
            let w = sieve.window(a, b)?;
            let mut acc = init();
            for (n, e) in w.iter() {
                visit(&mut acc, n, e);
            }
            Ok(acc)
        })
        .try_reduce(&init, |x, y| Ok(merge(x, y)))
}
