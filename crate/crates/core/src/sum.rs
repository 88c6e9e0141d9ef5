//! Deterministic parallel reductions.
//!
//! The pairwise double sums are embarrassingly parallel, but a naive rayon
//! reduce folds in a nondeterministic order. Here the index space is split
//! into fixed-size batches, batch partials are computed in parallel, and the
//! final fold runs sequentially in batch order — bitwise-identical results
//! regardless of worker count.

use rayon::prelude::*;

use crate::scalar::Real;

/// Default items per batch. Fixed so the reduction tree does not depend on
/// the thread count.
pub const BATCH: usize = 4096;

pub fn batched_sum<R, F>(n: usize, term: F) -> R
where
    R: Real,
    F: Fn(usize) -> R + Sync,
{
    batched_sum_with(n, BATCH, term)
}

/// Batched sum with an explicit batch size, for index spaces whose items are
/// expensive (rows of a pair sum, grid nodes of a convolution).
pub fn batched_sum_with<R, F>(n: usize, batch: usize, term: F) -> R
where
    R: Real,
    F: Fn(usize) -> R + Sync,
{
    batched_sum_pair_with(n, batch, |i| (term(i), R::zero())).0
}

/// Accumulates two sums in one pass (e.g. the two diagonal-exclusion radii).
pub fn batched_sum_pair_with<R, F>(n: usize, batch: usize, term: F) -> (R, R)
where
    R: Real,
    F: Fn(usize) -> (R, R) + Sync,
{
    let batch = batch.max(1);
    let batches = n.div_ceil(batch);
    let partials: Vec<(R, R)> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let lo = b * batch;
            let hi = (lo + batch).min(n);
            let mut s0 = R::zero();
            let mut s1 = R::zero();
            for i in lo..hi {
                let (a, b) = term(i);
                s0 = s0 + a;
                s1 = s1 + b;
            }
            (s0, s1)
        })
        .collect();
    partials
        .into_iter()
        .fold((R::zero(), R::zero()), |(a0, a1), (b0, b1)| {
            (a0 + b0, a1 + b1)
        })
}
