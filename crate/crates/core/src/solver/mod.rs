//! Exact and heuristic `alpha_t` / `chi_t` on concrete graphs.

mod alpha;
mod bits;
mod chi;

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::{param, Result};
use crate::graph::{is_t_component_set, Graph, VertexSet};

pub use alpha::{alpha_t_brute, alpha_t_exact, alpha_t_heuristic, AlphaResult, ALPHA_BRUTE_MAX_N, HEURISTIC_RESTARTS};
pub use chi::{
    chi_t_exact, chi_t_greedy_extraction, chi_t_heuristic, chromatic_number, extraction_threshold, ChiResult,
    GreedyColoring, CHI_EXACT_MAX_N, CHROMATIC_MAX_N, EXTRACTION_RESTARTS,
};

/// Whether a search ran to completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Optimal,
    /// A budget ran out; the value is the best found, not a proven optimum.
    Incomplete,
}

/// Optional node and wall-clock budgets for exact searches.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolverLimits {
    pub node_budget: Option<u64>,
    pub time_budget: Option<Duration>,
}

pub(crate) struct Budget {
    pub nodes: u64,
    node_budget: Option<u64>,
    deadline: Option<Instant>,
    hit: bool,
}

impl Budget {
    pub fn new(limits: &SolverLimits) -> Self {
        Budget {
            nodes: 0,
            node_budget: limits.node_budget,
            deadline: limits.time_budget.map(|d| Instant::now() + d),
            hit: false,
        }
    }

    /// Counts a node; false once a budget is exhausted.
    pub fn tick(&mut self) -> bool {
        if self.hit {
            return false;
        }
        self.nodes += 1;
        if self.node_budget.is_some_and(|b| self.nodes > b)
            || (self.nodes.is_multiple_of(1024) && self.deadline.is_some_and(|d| Instant::now() > d))
        {
            self.hit = true;
        }
        !self.hit
    }

    pub fn exhausted(&self) -> bool {
        self.hit
    }
}

/// A vertex colouring whose classes are t-component sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Coloring {
    pub t: usize,
    pub num_colors: usize,
    /// Colour of each vertex, in `0..num_colors`.
    pub assignment: Vec<usize>,
}

impl Coloring {
    /// Builds a colouring from its classes, in order.
    pub fn from_classes(n: usize, t: usize, classes: &[Vec<usize>]) -> Result<Self> {
        let mut assignment = vec![usize::MAX; n];
        for (c, class) in classes.iter().enumerate() {
            for &v in class {
                if v >= n || assignment[v] != usize::MAX {
                    return param(format!("vertex {v} is out of range or coloured twice"));
                }
                assignment[v] = c;
            }
        }
        if assignment.contains(&usize::MAX) {
            return param("some vertex has no colour");
        }
        Ok(Coloring { t, num_colors: classes.len(), assignment })
    }

    pub fn classes(&self) -> Vec<VertexSet> {
        let mut out = vec![Vec::new(); self.num_colors];
        for (v, &c) in self.assignment.iter().enumerate() {
            out[c].push(v);
        }
        out.into_iter().map(VertexSet::new).collect()
    }

    /// Checks that every vertex is coloured, no class is empty, and every
    /// class is a t-component set of `g`.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        if self.assignment.len() != g.n() {
            return param("colouring size does not match the graph");
        }
        if self.assignment.iter().any(|&c| c >= self.num_colors) {
            return param("colour index out of range");
        }
        for (i, class) in self.classes().iter().enumerate() {
            if class.is_empty() {
                return param(format!("colour class {i} is empty"));
            }
            if !is_t_component_set(g, class, self.t)? {
                return param(format!("colour class {i} has a component larger than {}", self.t));
            }
        }
        Ok(())
    }
}
