//! Maximum t-component sets.

use rand::seq::SliceRandom;
use rand::Rng;

use super::bits::{intersects, or_into, set, small_masks, BitMatrix};
use super::{Budget, SolverLimits, Status};
use crate::error::{param, Error, Result};
use crate::graph::{Graph, RngSeed, VertexSet};

fn check_t(t: usize) -> Result<()> {
    if t < 1 {
        return param("t must be at least 1");
    }
    Ok(())
}

#[derive(Clone, Debug)]
struct Comp {
    bits: Vec<u64>,
    size: usize,
}

/// Order of the component `u` would join, given the current components.
fn merged_order(adj: &BitMatrix, comps: &[Comp], u: usize, cap: usize) -> usize {
    let row = adj.row(u);
    let mut total = 1;
    for c in comps {
        if intersects(row, &c.bits) {
            total += c.size;
            if total > cap {
                break;
            }
        }
    }
    total
}

fn add_vertex(adj: &BitMatrix, comps: &mut Vec<Comp>, u: usize) {
    let row = adj.row(u);
    let mut merged = Comp { bits: vec![0; adj.words()], size: 1 };
    set(&mut merged.bits, u);
    comps.retain(|c| {
        if intersects(row, &c.bits) {
            or_into(&mut merged.bits, &c.bits);
            merged.size += c.size;
            false
        } else {
            true
        }
    });
    comps.push(merged);
}

struct AlphaSearch<'a> {
    adj: &'a BitMatrix,
    t: usize,
    cur: Vec<usize>,
    best: Vec<usize>,
    budget: Budget,
}

impl AlphaSearch<'_> {
    fn expand(&mut self, comps: &[Comp], cands: &[usize]) {
        if !self.budget.tick() {
            return;
        }
        if self.cur.len() > self.best.len() {
            self.best = self.cur.clone();
        }
        if cands.is_empty() {
            return;
        }
        // descending degree within the candidate set, ties by index
        let mut cand_bits = vec![0u64; self.adj.words()];
        for &u in cands {
            set(&mut cand_bits, u);
        }
        let mut order: Vec<(usize, usize)> = cands
            .iter()
            .map(|&u| {
                let d = self.adj.row(u).iter().zip(&cand_bits).map(|(a, b)| (a & b).count_ones() as usize).sum();
                (u, d)
            })
            .collect();
        order.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));

        // greedy clique cover; a clique holds at most t vertices of any t-component set
        let mut cliques: Vec<Vec<u64>> = Vec::new();
        let mut members: Vec<Vec<usize>> = Vec::new();
        for &(u, _) in &order {
            let row = self.adj.row(u);
            let slot = cliques.iter().position(|c| c.iter().zip(row).all(|(m, r)| m & !r == 0));
            match slot {
                Some(i) => {
                    set(&mut cliques[i], u);
                    members[i].push(u);
                }
                None => {
                    let mut c = vec![0u64; self.adj.words()];
                    set(&mut c, u);
                    cliques.push(c);
                    members.push(vec![u]);
                }
            }
        }
        let mut seq = Vec::with_capacity(cands.len());
        let mut bound = Vec::with_capacity(cands.len());
        let mut before = 0;
        for m in &members {
            for (j, &u) in m.iter().enumerate() {
                seq.push(u);
                bound.push(before + (j + 1).min(self.t));
            }
            before += m.len().min(self.t);
        }

        for j in (0..seq.len()).rev() {
            if self.cur.len() + bound[j] <= self.best.len() || self.budget.exhausted() {
                return;
            }
            let v = seq[j];
            let mut next = comps.to_vec();
            add_vertex(self.adj, &mut next, v);
            let rest: Vec<usize> =
                seq[..j].iter().copied().filter(|&u| merged_order(self.adj, &next, u, self.t) <= self.t).collect();
            self.cur.push(v);
            self.expand(&next, &rest);
            self.cur.pop();
        }
    }
}

/// Result of a maximum t-component set search.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct AlphaResult {
    pub size: usize,
    pub witness: VertexSet,
    pub status: Status,
    pub nodes: u64,
}

/// Branch and bound for `alpha_t(G)`.
///
/// Candidates that would merge components beyond order `t` are dropped
/// (they stay infeasible deeper in the branch). The bound is a clique
/// cover of the candidates, each clique contributing at most `t`.
pub fn alpha_t_exact(g: &Graph, t: usize, limits: &SolverLimits) -> Result<AlphaResult> {
    check_t(t)?;
    let adj = BitMatrix::new(g);
    let seed_set = alpha_t_heuristic_in(&adj, g.n(), t, RngSeed(0), 8);
    let mut search = AlphaSearch { adj: &adj, t, cur: Vec::new(), best: seed_set, budget: Budget::new(limits) };
    let all: Vec<usize> = (0..g.n()).collect();
    search.expand(&[], &all);
    let status = if search.budget.exhausted() { Status::Incomplete } else { Status::Optimal };
    let witness = VertexSet::new(search.best);
    Ok(AlphaResult { size: witness.len(), witness, status, nodes: search.budget.nodes })
}

/// Largest brute-force instance.
pub const ALPHA_BRUTE_MAX_N: usize = 20;

/// `alpha_t(G)` by enumerating all `2^n` subsets.
pub fn alpha_t_brute(g: &Graph, t: usize) -> Result<usize> {
    check_t(t)?;
    let n = g.n();
    if n > ALPHA_BRUTE_MAX_N {
        return Err(Error::Refused(format!("brute force is limited to n <= {ALPHA_BRUTE_MAX_N}")));
    }
    let adj = small_masks(g);
    let mut best = 0;
    for mask in 0u64..1 << n {
        let size = mask.count_ones() as usize;
        if size > best && max_component(&adj, mask) <= t {
            best = size;
        }
    }
    Ok(best)
}

/// Largest component order of the subgraph induced by `mask`, by plain DFS.
fn max_component(adj: &[u64], mask: u64) -> usize {
    let mut seen = 0u64;
    let mut best = 0;
    for s in 0..adj.len() {
        if mask >> s & 1 == 0 || seen >> s & 1 == 1 {
            continue;
        }
        let mut stack = vec![s];
        seen |= 1 << s;
        let mut size = 0;
        while let Some(u) = stack.pop() {
            size += 1;
            for w in 0..adj.len() {
                if adj[u] >> w & 1 == 1 && mask >> w & 1 == 1 && seen >> w & 1 == 0 {
                    seen |= 1 << w;
                    stack.push(w);
                }
            }
        }
        best = best.max(size);
    }
    best
}

/// Randomized greedy growth of a t-component set inside `pool`, stopping at
/// `target` vertices.
pub(crate) fn greedy_fill(adj: &BitMatrix, pool: &[usize], t: usize, target: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut cands = pool.to_vec();
    cands.shuffle(rng);
    grow(adj, cands, t, Vec::new(), target, rng)
}

/// Extends `chosen` from `cands` (disjoint from it) until `target` or no
/// feasible candidate is left.
///
/// Each step adds a feasible candidate whose merged component is smallest,
/// ties broken at random. Infeasible candidates are dropped for good.
pub(crate) fn grow(
    adj: &BitMatrix,
    mut cands: Vec<usize>,
    t: usize,
    mut chosen: Vec<usize>,
    target: usize,
    rng: &mut impl Rng,
) -> Vec<usize> {
    let mut comps: Vec<Comp> = Vec::new();
    for &v in &chosen {
        add_vertex(adj, &mut comps, v);
    }
    while chosen.len() < target {
        let mut w = 0;
        let mut best = usize::MAX;
        let mut ties = 0u32;
        let mut pick = usize::MAX;
        for r in 0..cands.len() {
            let u = cands[r];
            let m = merged_order(adj, &comps, u, t);
            if m > t {
                continue;
            }
            cands[w] = u;
            if m < best {
                best = m;
                ties = 1;
                pick = w;
            } else if m == best {
                ties += 1;
                if rng.random_range(0..ties) == 0 {
                    pick = w;
                }
            }
            w += 1;
        }
        cands.truncate(w);
        if pick == usize::MAX {
            break;
        }
        let v = cands.swap_remove(pick);
        add_vertex(adj, &mut comps, v);
        chosen.push(v);
    }
    chosen
}

/// Iterated local search: drop one or two random members, regrow, and keep
/// the result unless it got smaller.
pub(crate) fn improve(
    adj: &BitMatrix,
    pool: &[usize],
    t: usize,
    mut set: Vec<usize>,
    target: usize,
    iters: usize,
    rng: &mut impl Rng,
) -> Vec<usize> {
    let n = pool.iter().copied().max().map_or(0, |m| m + 1);
    let mut inside = vec![false; n];
    for _ in 0..iters {
        if set.len() >= target || set.is_empty() {
            break;
        }
        let drop = if set.len() > 1 && rng.random_bool(0.5) { 2 } else { 1 };
        let mut trial = set.clone();
        let mut removed = Vec::new();
        for _ in 0..drop {
            let i = rng.random_range(0..trial.len());
            removed.push(trial.swap_remove(i));
        }
        for &v in &trial {
            inside[v] = true;
        }
        let mut cands: Vec<usize> = pool.iter().copied().filter(|&u| !inside[u] && !removed.contains(&u)).collect();
        cands.shuffle(rng);
        // removed vertices go last so ties prefer fresh vertices
        cands.extend(removed);
        for &v in &trial {
            inside[v] = false;
        }
        let grown = grow(adj, cands, t, trial, target, rng);
        if grown.len() >= set.len() {
            set = grown;
        }
    }
    set
}

pub(crate) fn alpha_t_heuristic_in(adj: &BitMatrix, n: usize, t: usize, seed: RngSeed, restarts: usize) -> Vec<usize> {
    let pool: Vec<usize> = (0..n).collect();
    let mut rng = seed.rng();
    let mut best = Vec::new();
    for _ in 0..restarts.max(1) {
        let s = greedy_fill(adj, &pool, t, n, &mut rng);
        if s.len() > best.len() {
            best = s;
        }
    }
    best
}

/// Restarts used by [`alpha_t_heuristic`].
pub const HEURISTIC_RESTARTS: usize = 50;

/// Best of [`HEURISTIC_RESTARTS`] randomized greedy fills.
pub fn alpha_t_heuristic(g: &Graph, t: usize, seed: RngSeed) -> Result<(usize, VertexSet)> {
    check_t(t)?;
    let adj = BitMatrix::new(g);
    let best = VertexSet::new(alpha_t_heuristic_in(&adj, g.n(), t, seed, HEURISTIC_RESTARTS));
    Ok((best.len(), best))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{is_t_component_set, sample_gnp};

    fn unlimited() -> SolverLimits {
        SolverLimits::default()
    }

    #[test]
    fn exact_examples() {
        let r = alpha_t_exact(&Graph::complete(5), 2, &unlimited()).unwrap();
        assert_eq!((r.size, r.status), (2, Status::Optimal));
        assert_eq!(alpha_t_exact(&Graph::empty(7), 3, &unlimited()).unwrap().size, 7);
        let r = alpha_t_exact(&Graph::path(4), 2, &unlimited()).unwrap();
        assert_eq!(r.size, 3);
        assert!(is_t_component_set(&Graph::path(4), &r.witness, 2).unwrap());
        assert!(alpha_t_exact(&Graph::path(4), 0, &unlimited()).is_err());
    }

    #[test]
    fn brute_examples() {
        assert_eq!(alpha_t_brute(&Graph::cycle(6), 2).unwrap(), 4);
        assert_eq!(alpha_t_brute(&Graph::complete(4), 1).unwrap(), 1);
        let star = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert_eq!(alpha_t_brute(&star, 1).unwrap(), 4);
        assert!(matches!(alpha_t_brute(&Graph::empty(21), 1), Err(Error::Refused(_))));
    }

    #[test]
    fn exact_matches_brute_on_small_samples() {
        for i in 0..30 {
            let g = sample_gnp(11, 0.5, RngSeed(i)).unwrap();
            for t in 1..=3 {
                let r = alpha_t_exact(&g, t, &unlimited()).unwrap();
                assert_eq!(r.size, alpha_t_brute(&g, t).unwrap(), "seed {i}, t {t}");
                assert!(is_t_component_set(&g, &r.witness, t).unwrap());
            }
        }
    }

    #[test]
    fn budget_yields_incomplete() {
        let g = sample_gnp(60, 0.5, RngSeed(1)).unwrap();
        let limits = SolverLimits { node_budget: Some(5), time_budget: None };
        let r = alpha_t_exact(&g, 2, &limits).unwrap();
        assert_eq!(r.status, Status::Incomplete);
        assert!(is_t_component_set(&g, &r.witness, 2).unwrap());
    }

    #[test]
    fn heuristic_examples() {
        assert_eq!(alpha_t_heuristic(&Graph::empty(100), 1, RngSeed(0)).unwrap().0, 100);
        assert_eq!(alpha_t_heuristic(&Graph::complete(10), 3, RngSeed(0)).unwrap().0, 3);
        let g = sample_gnp(60, 0.5, RngSeed(9)).unwrap();
        let (h, set) = alpha_t_heuristic(&g, 2, RngSeed(9)).unwrap();
        assert!(is_t_component_set(&g, &set, 2).unwrap());
        assert!(h <= alpha_t_exact(&g, 2, &unlimited()).unwrap().size);
    }
}
