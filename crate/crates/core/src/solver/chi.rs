//! t-component colourings.

use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::alpha::{alpha_t_exact, greedy_fill, improve};
use super::bits::{component_order, small_masks, BitMatrix};
use super::{Budget, Coloring, SolverLimits, Status};
use crate::error::{param, Error, Result};
use crate::graph::{Graph, RngSeed};

/// Largest graph accepted by [`chi_t_exact`] (colour classes are `u64` masks).
pub const CHI_EXACT_MAX_N: usize = 64;

/// Largest graph accepted by [`chromatic_number`].
pub const CHROMATIC_MAX_N: usize = 16;

/// Restarts per target size in [`chi_t_greedy_extraction`].
pub const EXTRACTION_RESTARTS: usize = 50;

/// Local-search moves per target size when the restarts fall short.
pub const LOCAL_SEARCH_ITERS: usize = 2000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChiResult {
    pub num_colors: usize,
    pub coloring: Coloring,
    pub status: Status,
    /// Best proven lower bound (equals `num_colors` when optimal).
    pub lower_bound: usize,
}

struct ColorSearch<'a> {
    adj: &'a [u64],
    t: usize,
    order: Vec<usize>,
    classes: Vec<u64>,
    budget: Budget,
}

impl ColorSearch<'_> {
    fn go(&mut self, i: usize, used: usize) -> bool {
        if !self.budget.tick() {
            return false;
        }
        if i == self.order.len() {
            return true;
        }
        let v = self.order[i];
        let open = (used + 1).min(self.classes.len());
        for c in 0..open {
            if component_order(self.adj, self.classes[c], v, self.t) > self.t {
                continue;
            }
            self.classes[c] |= 1 << v;
            if self.go(i + 1, used.max(c + 1)) {
                return true;
            }
            self.classes[c] &= !(1 << v);
            if self.budget.exhausted() {
                return false;
            }
        }
        false
    }
}

fn masks_to_coloring(n: usize, t: usize, classes: &[u64]) -> Result<Coloring> {
    let lists: Vec<Vec<usize>> =
        classes.iter().filter(|&&m| m != 0).map(|&m| (0..n).filter(|&v| m >> v & 1 == 1).collect()).collect();
    Coloring::from_classes(n, t, &lists)
}

/// `chi_t(G)` by iterative deepening on the number of colours.
///
/// Starts from `ceil(n / alpha_t)` and stops below the heuristic colouring's
/// count; each level is a backtracking search with symmetry breaking on new
/// colours.
pub fn chi_t_exact(g: &Graph, t: usize, limits: &SolverLimits) -> Result<ChiResult> {
    if t < 1 {
        return param("t must be at least 1");
    }
    let n = g.n();
    if n > CHI_EXACT_MAX_N {
        return Err(Error::Refused(format!("exact chi_t is limited to n <= {CHI_EXACT_MAX_N}")));
    }
    let upper = chi_t_heuristic(g, t, RngSeed(0))?;
    if n == 0 {
        return Ok(ChiResult { num_colors: 0, coloring: upper, status: Status::Optimal, lower_bound: 0 });
    }
    let alpha = alpha_t_exact(g, t, limits)?;
    let mut lower = if alpha.status == Status::Optimal { n.div_ceil(alpha.size) } else { 1 };

    let adj = small_masks(g);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| g.degree(b).cmp(&g.degree(a)).then(a.cmp(&b)));
    let mut budget = Budget::new(limits);
    while lower < upper.num_colors {
        let mut search = ColorSearch { adj: &adj, t, order: order.clone(), classes: vec![0; lower], budget };
        let found = search.go(0, 0);
        budget = search.budget;
        if found {
            let coloring = masks_to_coloring(n, t, &search.classes)?;
            return Ok(ChiResult {
                num_colors: coloring.num_colors,
                coloring,
                status: Status::Optimal,
                lower_bound: lower,
            });
        }
        if budget.exhausted() {
            return Ok(ChiResult {
                num_colors: upper.num_colors,
                coloring: upper,
                status: Status::Incomplete,
                lower_bound: lower,
            });
        }
        lower += 1;
    }
    Ok(ChiResult { num_colors: upper.num_colors, coloring: upper, status: Status::Optimal, lower_bound: lower })
}

/// Proper chromatic number by backtracking over colour counts.
pub fn chromatic_number(g: &Graph) -> Result<usize> {
    let n = g.n();
    if n > CHROMATIC_MAX_N {
        return Err(Error::Refused(format!("chromatic number is limited to n <= {CHROMATIC_MAX_N}")));
    }
    fn fill(g: &Graph, v: usize, k: usize, colors: &mut [usize]) -> bool {
        if v == colors.len() {
            return true;
        }
        let top = colors[..v].iter().copied().max().map_or(0, |m| m + 1);
        for c in 0..k.min(top + 1) {
            if g.neighbors(v).iter().all(|&u| u >= v || colors[u] != c) {
                colors[v] = c;
                if fill(g, v + 1, k, colors) {
                    return true;
                }
            }
        }
        false
    }
    let mut colors = vec![0; n];
    Ok((0..=n).find(|&k| fill(g, 0, k, &mut colors)).unwrap_or(n))
}

/// Output of the greedy extraction colouring.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GreedyColoring {
    pub coloring: Coloring,
    pub k_start: usize,
    /// Target size in force when extraction stopped.
    pub k_final: usize,
    /// Classes found by extraction, as opposed to leftover singletons.
    pub extracted_classes: usize,
    /// Vertices left below the threshold and coloured one per class.
    pub singleton_fallback: usize,
    pub threshold: f64,
}

/// Extraction keeps going while at least `n / (ln n)^2` vertices remain.
pub fn extraction_threshold(n: usize) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let l = (n as f64).ln();
    n as f64 / (l * l)
}

/// Best t-component set of at most `target` vertices found in `pool` by
/// restarted greedy fills, then local search if they fall short.
fn find_class(adj: &BitMatrix, pool: &[usize], t: usize, target: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut best = Vec::new();
    for _ in 0..EXTRACTION_RESTARTS {
        let s = greedy_fill(adj, pool, t, target, rng);
        if s.len() > best.len() {
            best = s;
            if best.len() == target {
                return best;
            }
        }
    }
    improve(adj, pool, t, best, target, LOCAL_SEARCH_ITERS, rng)
}

fn without(pool: &[usize], taken: &[usize], n: usize) -> Vec<usize> {
    let mut mark = vec![false; n];
    for &v in taken {
        mark[v] = true;
    }
    pool.iter().copied().filter(|&v| !mark[v]).collect()
}

/// Colours `g` by repeatedly removing a t-component `k`-set from the
/// uncoloured vertices, then giving each leftover vertex its own colour.
///
/// Sets are grown by randomized greedy fills, [`EXTRACTION_RESTARTS`] per
/// target size, followed by local search; when no set reaches the target it
/// drops by one. On the last extraction a shorter class is used instead when
/// leaving exactly `ceil(threshold)` vertices for one more class yields fewer
/// colours overall.
pub fn chi_t_greedy_extraction(g: &Graph, t: usize, k: usize, seed: RngSeed) -> Result<GreedyColoring> {
    let n = g.n();
    if t < 1 {
        return param("t must be at least 1");
    }
    if k < 1 || k > n {
        return param("k must lie in [1, n]");
    }
    let adj = BitMatrix::new(g);
    let threshold = extraction_threshold(n);
    let floor_pool = threshold.ceil() as usize;
    let mut rng = seed.rng();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut target = k;
    while !remaining.is_empty() && remaining.len() as f64 >= threshold {
        target = target.min(remaining.len());
        let mut best = find_class(&adj, &remaining, t, target, &mut rng);
        if best.len() < target {
            target -= 1;
            if best.len() < target {
                continue;
            }
        }
        best.truncate(target);
        let r = remaining.len();
        let left = r - best.len();
        if left > 0 && (left as f64) < threshold && r > floor_pool && r - floor_pool < best.len() {
            let mut short = best.clone();
            short.truncate(r - floor_pool);
            let pool = without(&remaining, &short, n);
            let last = find_class(&adj, &pool, t, target.min(pool.len()), &mut rng);
            if 2 + pool.len() - last.len() < 1 + left {
                remaining = without(&pool, &last, n);
                classes.push(short);
                classes.push(last);
                break;
            }
        }
        remaining = without(&remaining, &best, n);
        classes.push(best);
    }
    let extracted_classes = classes.len();
    let singleton_fallback = remaining.len();
    classes.extend(remaining.into_iter().map(|v| vec![v]));
    let coloring = Coloring::from_classes(n, t, &classes)?;
    Ok(GreedyColoring { coloring, k_start: k, k_final: target, extracted_classes, singleton_fallback, threshold })
}

/// Colours by repeatedly removing the largest of a few greedy t-component
/// sets grown in the uncoloured vertices.
pub fn chi_t_heuristic(g: &Graph, t: usize, seed: RngSeed) -> Result<Coloring> {
    if t < 1 {
        return param("t must be at least 1");
    }
    let n = g.n();
    let adj = BitMatrix::new(g);
    let mut rng = seed.rng();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut classes = Vec::new();
    while !remaining.is_empty() {
        let mut best = Vec::new();
        for _ in 0..8 {
            let s = greedy_fill(&adj, &remaining, t, remaining.len(), &mut rng);
            if s.len() > best.len() {
                best = s;
            }
        }
        let mut taken = vec![false; n];
        for &v in &best {
            taken[v] = true;
        }
        remaining.retain(|&v| !taken[v]);
        classes.push(best);
    }
    Coloring::from_classes(n, t, &classes)
}
