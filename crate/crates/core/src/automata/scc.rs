use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;

use super::Dfao;
use crate::exact::Scalar;

/// Sequence read inside a final component, started from one of its states.
///
/// The entry state need not be fixed by the digit 0, so evaluation takes a
/// fixed-width padded word; [`ComponentSequence::as_dfao`] is available when it is.
#[derive(Clone, Debug)]
pub struct ComponentSequence {
    pub component: usize,
    pub entry: usize,
    base: u32,
    states: Vec<usize>,
    local_entry: usize,
    table: Vec<Vec<usize>>,
    outputs: Vec<Scalar>,
}

impl ComponentSequence {
    fn local_run(&self, n: u64, width: u32) -> usize {
        let k = self.base as u64;
        let mut buf = [0u32; 64];
        let mut m = n;
        for slot in buf[..width as usize].iter_mut() {
            *slot = (m % k) as u32;
            m /= k;
        }
        buf[..width as usize].iter().rev().fold(self.local_entry, |s, &d| self.table[s][d as usize])
    }

    /// Output after reading the `width`-digit padded word of `n mod k^width`.
    pub fn evaluate_padded(&self, n: u64, width: u32) -> &Scalar {
        &self.outputs[self.local_run(n, width)]
    }

    pub fn evaluate_word(&self, word: &[u32]) -> &Scalar {
        let s = word.iter().fold(self.local_entry, |s, &d| self.table[s][d as usize]);
        &self.outputs[s]
    }

    /// Global state ids of the component, in local order.
    pub fn states(&self) -> &[usize] {
        &self.states
    }

    /// The component as a standalone automaton rooted at the entry state.
    pub fn as_dfao(&self) -> Option<Dfao> {
        Dfao::new(self.base, self.table.clone(), self.local_entry, self.outputs.clone()).ok()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentDecomposition {
    /// Components as ascending state lists, ordered by smallest state.
    pub components: Vec<Vec<usize>>,
    pub component_of: Vec<usize>,
    pub is_final: Vec<bool>,
    #[serde(skip)]
    pub sequences: Vec<ComponentSequence>,
}

impl ComponentDecomposition {
    pub fn is_final_state(&self, q: usize) -> bool {
        self.is_final[self.component_of[q]]
    }

    /// Index into `sequences` for an entry state in a final component.
    pub fn sequence_index(&self, entry: usize) -> Option<usize> {
        self.sequences.iter().position(|s| s.entry == entry)
    }

    pub fn final_components(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.components.len()).filter(|&c| self.is_final[c])
    }
}

pub fn strongly_connected_components(dfao: &Dfao) -> ComponentDecomposition {
    let s = dfao.num_states();
    let mut g = DiGraph::<(), ()>::with_capacity(s, s * dfao.base() as usize);
    let nodes: Vec<_> = (0..s).map(|_| g.add_node(())).collect();
    for q in 0..s {
        for d in 0..dfao.base() {
            g.add_edge(nodes[q], nodes[dfao.next(q, d)], ());
        }
    }
    let mut components: Vec<Vec<usize>> = tarjan_scc(&g)
        .into_iter()
        .map(|c| {
            let mut v: Vec<usize> = c.into_iter().map(|n| n.index()).collect();
            v.sort_unstable();
            v
        })
        .collect();
    components.sort_by_key(|c| c[0]);

    let mut component_of = vec![0; s];
    for (i, c) in components.iter().enumerate() {
        for &q in c {
            component_of[q] = i;
        }
    }
    let is_final: Vec<bool> = components
        .iter()
        .enumerate()
        .map(|(i, c)| c.iter().all(|&q| (0..dfao.base()).all(|d| component_of[dfao.next(q, d)] == i)))
        .collect();

    let mut sequences = Vec::new();
    for (ci, c) in components.iter().enumerate().filter(|(i, _)| is_final[*i]) {
        let local = |q: usize| c.binary_search(&q).expect("final component is closed");
        let table: Vec<Vec<usize>> =
            c.iter().map(|&q| (0..dfao.base()).map(|d| local(dfao.next(q, d))).collect()).collect();
        let outputs: Vec<Scalar> = c.iter().map(|&q| dfao.output(q).clone()).collect();
        for (li, &entry) in c.iter().enumerate() {
            sequences.push(ComponentSequence {
                component: ci,
                entry,
                base: dfao.base(),
                states: c.clone(),
                local_entry: li,
                table: table.clone(),
                outputs: outputs.clone(),
            });
        }
    }
    ComponentDecomposition { components, component_of, is_final, sequences }
}
