use serde::Serialize;

use super::scc::strongly_connected_components;
use super::{checked_pow, Dfao};
use crate::error::{Error, Result};
use crate::exact::{Scalar, Total};
use crate::parallel::map_collect;

#[derive(Clone, Debug, Serialize)]
pub struct BlockRow {
    pub r: u64,
    /// `delta(q0, (r)_k)`.
    pub state: usize,
    /// Whether that state lies in a final component.
    pub in_r: bool,
    pub component: usize,
    /// Index of the component sequence used for this block, when `in_r`.
    pub sequence: Option<usize>,
    #[serde(skip)]
    pub partial: Total,
}

#[derive(Clone, Debug)]
pub struct BlockDecomposition {
    pub total: Total,
    pub block: u64,
    pub rows: Vec<BlockRow>,
}

/// `sum_{y < n <= y + x} a_n g(n)` regrouped as `n = rK + n'` with `K = k^sigma`.
///
/// Blocks whose prefix lands in a final component are summed through the
/// corresponding component sequence; the others through the full automaton.
pub fn block_decompose_sum<G>(d: &Dfao, g: G, y: u64, x: u64, sigma: u32) -> Result<BlockDecomposition>
where
    G: Fn(u64) -> Scalar + Sync + Send,
{
    let big_k = checked_pow(d.base(), sigma).filter(|&kk| kk <= x);
    let Some(big_k) = big_k else {
        return Err(Error::Precondition(format!("k^sigma must not exceed x = {x}")));
    };
    let end = y.checked_add(x).ok_or_else(|| Error::Range("y + x overflows".into()))?;
    let dec = strongly_connected_components(d);
    let rs: Vec<u64> = ((y + 1) / big_k..=end / big_k).collect();
    let rows = map_collect(rs, |r| {
        let state = d.state_of(r);
        let component = dec.component_of[state];
        let in_r = dec.is_final[component];
        let sequence = if in_r { dec.sequence_index(state) } else { None };
        let base = r * big_k;
        let lo = (y + 1).max(base) - base;
        let hi = end.min(base + big_k - 1) - base;
        let mut partial = Total::zero();
        for m in lo..=hi {
            let a = match sequence {
                Some(i) => dec.sequences[i].evaluate_padded(m, sigma),
                None => d.output(d.run_padded(state, m, sigma)),
            };
            if a.is_zero() {
                continue;
            }
            partial.add_owned(a.mul(&g(base + m)));
        }
        BlockRow { r, state, in_r, component, sequence, partial }
    });
    let mut total = Total::zero();
    for row in &rows {
        total.merge(row.partial.clone());
    }
    Ok(BlockDecomposition { total, block: big_k, rows })
}
