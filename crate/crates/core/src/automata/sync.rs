use std::collections::{HashMap, VecDeque};

use super::{truncate, Dfao};
use crate::error::{Error, Result};
use crate::parallel::{map_chunks, CHUNK};

/// Shortest word merging the pair `(a, b)`, by BFS over unordered pairs.
fn merge_pair(d: &Dfao, a: usize, b: usize) -> Option<Vec<u32>> {
    let key = |p: usize, q: usize| if p <= q { (p, q) } else { (q, p) };
    let start = key(a, b);
    let mut prev: HashMap<(usize, usize), ((usize, usize), u32)> = HashMap::new();
    let mut queue = VecDeque::from([start]);
    let mut seen = std::collections::HashSet::from([start]);
    while let Some((p, q)) = queue.pop_front() {
        if p == q {
            let mut word = Vec::new();
            let mut cur = (p, q);
            while cur != start {
                let (from, digit) = prev[&cur];
                word.push(digit);
                cur = from;
            }
            word.reverse();
            return Some(word);
        }
        for digit in 0..d.base() {
            let next = key(d.next(p, digit), d.next(q, digit));
            if seen.insert(next) {
                prev.insert(next, ((p, q), digit));
                queue.push_back(next);
            }
        }
    }
    None
}

/// A word sending every state to one state, or `None` if none exists.
///
/// Greedy pair collapsing: repeatedly merge two states of the current image.
pub fn find_synchronizing_word(d: &Dfao) -> Option<Vec<u32>> {
    let mut image: Vec<usize> = (0..d.num_states()).collect();
    let mut word = Vec::new();
    while image.len() > 1 {
        let w = merge_pair(d, image[0], image[1])?;
        image = image.iter().map(|&q| d.run_word(q, &w)).collect();
        image.sort_unstable();
        image.dedup();
        word.extend(w);
    }
    let target = d.run_word(0, &word);
    debug_assert!((0..d.num_states()).all(|q| d.run_word(q, &word) == target));
    Some(word)
}

fn floor_log(x: u64, k: u32) -> u32 {
    let mut e = 0;
    let mut p = k as u64;
    while p <= x {
        e += 1;
        match p.checked_mul(k as u64) {
            Some(n) => p = n,
            None => break,
        }
    }
    e
}

fn check_lambda(d: &Dfao, x: u64, lambda: u32) -> Result<()> {
    if x == 0 {
        return Err(Error::Range("x must be positive".into()));
    }
    let max = floor_log(x, d.base());
    if lambda > max {
        return Err(Error::Range(format!("lambda = {lambda} exceeds floor(log_k x) = {max}")));
    }
    Ok(())
}

fn fails(d: &Dfao, n: u64, lambda: u32) -> bool {
    let m = truncate(n, d.base(), lambda);
    (0..d.num_states()).any(|q| d.run(q, n) != d.run(q, m))
}

/// `#{y < n <= y + x : delta(q, (n)_k) != delta(q, (n mod k^lambda)_k) for some q}`.
pub fn sync_failure_count(d: &Dfao, y: u64, x: u64, lambda: u32) -> Result<u64> {
    check_lambda(d, x, lambda)?;
    let end = y.checked_add(x).ok_or_else(|| Error::Range("y + x overflows".into()))?;
    let parts = map_chunks(y + 1, end + 1, CHUNK, |lo, hi| (lo..hi).filter(|&n| fails(d, n, lambda)).count() as u64);
    Ok(parts.into_iter().sum())
}

/// The failing `n` themselves, ascending.
pub fn sync_failure_set(d: &Dfao, y: u64, x: u64, lambda: u32) -> Result<Vec<u64>> {
    check_lambda(d, x, lambda)?;
    let end = y.checked_add(x).ok_or_else(|| Error::Range("y + x overflows".into()))?;
    let parts = map_chunks(y + 1, end + 1, CHUNK, |lo, hi| (lo..hi).filter(|&n| fails(d, n, lambda)).collect::<Vec<_>>());
    Ok(parts.into_iter().flatten().collect())
}
