//! Data-parallel helpers. With the `parallel` feature these dispatch to rayon;
//! without it they run the same closures sequentially.
//!
//! Range work is always split into fixed-size chunks whose results come back in
//! chunk order, so floating-point reductions are identical for any thread count.

/// Chunk length used when partitioning index ranges.
pub const CHUNK: u64 = 4096;

pub fn num_threads() -> usize {
    #[cfg(feature = "parallel")]
    return rayon::current_num_threads();

    #[cfg(not(feature = "parallel"))]
    return 1;
}

/// Splits `[start, end)` into chunks of `chunk` indices and maps each chunk
/// `(lo, hi)` through `f`. Results are returned in chunk order.
pub fn map_chunks<T, F>(start: u64, end: u64, chunk: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, u64) -> T + Send + Sync,
{
    if end <= start {
        return Vec::new();
    }
    let chunk = chunk.max(1);
    let count = (end - start).div_ceil(chunk);
    let bounds = move |i: u64| {
        let lo = start + i * chunk;
        (lo, (lo + chunk).min(end))
    };

    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..count)
            .into_par_iter()
            .map(|i| {
                let (lo, hi) = bounds(i);
                f(lo, hi)
            })
            .collect()
    }

    #[cfg(not(feature = "parallel"))]
    (0..count)
        .map(|i| {
            let (lo, hi) = bounds(i);
            f(lo, hi)
        })
        .collect()
}

/// Maps every item, preserving order.
pub fn map_collect<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Send + Sync,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.into_par_iter().map(f).collect()
    }

    #[cfg(not(feature = "parallel"))]
    items.into_iter().map(f).collect()
}

/// Chunked map followed by an in-order fold of the chunk results.
pub fn fold_chunks<T, F, G>(start: u64, end: u64, chunk: u64, init: T, f: F, mut merge: G) -> T
where
    T: Send,
    F: Fn(u64, u64) -> T + Send + Sync,
    G: FnMut(&mut T, T),
{
    let mut acc = init;
    for part in map_chunks(start, end, chunk, f) {
        merge(&mut acc, part);
    }
    acc
}
