//! Dense adjacency rows as `u64` words.

use crate::graph::Graph;

#[derive(Clone, Debug)]
pub(crate) struct BitMatrix {
    words: usize,
    rows: Vec<u64>,
}

impl BitMatrix {
    pub fn new(g: &Graph) -> Self {
        let n = g.n();
        let words = n.div_ceil(64).max(1);
        let mut rows = vec![0u64; n * words];
        for (u, v) in g.edges() {
            rows[u * words + v / 64] |= 1 << (v % 64);
            rows[v * words + u / 64] |= 1 << (u % 64);
        }
        BitMatrix { words, rows }
    }

    pub fn words(&self) -> usize {
        self.words
    }

    pub fn row(&self, v: usize) -> &[u64] {
        &self.rows[v * self.words..(v + 1) * self.words]
    }
}

pub(crate) fn set(bits: &mut [u64], v: usize) {
    bits[v / 64] |= 1 << (v % 64);
}

pub(crate) fn intersects(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).any(|(x, y)| x & y != 0)
}

pub(crate) fn or_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d |= s;
    }
}

/// Masks for graphs on at most 64 vertices.
pub(crate) fn small_masks(g: &Graph) -> Vec<u64> {
    assert!(g.n() <= 64);
    (0..g.n()).map(|v| g.neighbors(v).iter().fold(0u64, |m, &u| m | 1 << u)).collect()
}

/// Order of the component of `v` inside `within | {v}`, stopping early once it exceeds `cap`.
pub(crate) fn component_order(adj: &[u64], within: u64, v: usize, cap: usize) -> usize {
    let pool = within | 1 << v;
    let mut comp = 1u64 << v;
    let mut frontier = comp;
    while frontier != 0 {
        let mut next = 0u64;
        let mut f = frontier;
        while f != 0 {
            let u = f.trailing_zeros() as usize;
            f &= f - 1;
            next |= adj[u];
        }
        next &= pool & !comp;
        comp |= next;
        if comp.count_ones() as usize > cap {
            return comp.count_ones() as usize;
        }
        frontier = next;
    }
    comp.count_ones() as usize
}
