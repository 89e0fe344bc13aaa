//! Slow but independent spanning-tree counters used to cross-check the
//! determinant pipeline and the closed forms.
//!
//! `brute_force_tau` enumerates every (n−1)-subset of edge instances and
//! counts the ones forming spanning trees; `deletion_contraction_tau` applies
//! the classical recurrence, branching once per parallel class. Neither
//! shares any code with the Laplacian route.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::graph::Multigraph;
use crate::{Error, Result};

/// Maximum number of edge instances the subset enumeration will accept by
/// default; 24 keeps the worst case under 3M subset tests.
pub const DEFAULT_EDGE_BUDGET: usize = 24;

/// Maximum recursive calls for deletion–contraction by default.
pub const DEFAULT_CALL_BUDGET: u64 = 4_000_000;

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the classes of `a` and `b`; false if already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

/// A candidate subset of edge instances on vertices 0..n, for callers that
/// want to test spanning-tree-ness of specific selections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeSelection {
    pub chosen: Vec<(usize, usize)>,
}

impl EdgeSelection {
    /// True iff the chosen edges form a spanning tree of the n vertices.
    pub fn is_spanning_tree(&self, n: usize) -> bool {
        if n == 0 || self.chosen.len() != n - 1 {
            return false;
        }
        let mut dsu = Dsu::new(n);
        for &(u, v) in &self.chosen {
            if u >= n || v >= n || !dsu.union(u, v) {
                return false;
            }
        }
        true
    }
}

/// Spanning-tree count by exhaustive subset enumeration, with the default
/// edge budget.
pub fn brute_force_tau(g: &Multigraph) -> Result<BigInt> {
    brute_force_tau_with_budget(g, DEFAULT_EDGE_BUDGET)
}

/// Spanning-tree count by exhaustive subset enumeration. Parallel edges are
/// distinct instances, so each counts toward `budget`.
pub fn brute_force_tau_with_budget(g: &Multigraph, budget: usize) -> Result<BigInt> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = g.vertex_count();
    if n == 1 {
        return Ok(BigInt::one());
    }
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (u, v, m) in g.edges() {
        for _ in 0..m {
            edges.push((u, v));
        }
    }
    let m = edges.len();
    if m > budget || m > 62 {
        return Err(Error::BudgetExceeded(format!(
            "{m} edge instances exceed the enumeration budget of {}",
            budget.min(62)
        )));
    }
    let k = n - 1;
    let mut count: u64 = 0;
    // Gosper's hack walks all k-subsets of the m edge instances in increasing
    // mask order.
    let mut subset: u64 = (1u64 << k) - 1;
    let limit: u64 = 1u64 << m;
    while subset < limit {
        let mut dsu = Dsu::new(n);
        let mut acyclic = true;
        for (i, &(u, v)) in edges.iter().enumerate() {
            if subset >> i & 1 == 1 && !dsu.union(u, v) {
                acyclic = false;
                break;
            }
        }
        if acyclic {
            count += 1;
        }
        let c = subset & subset.wrapping_neg();
        let r = subset + c;
        subset = (((r ^ subset) >> 2) / c) | r;
    }
    Ok(BigInt::from(count))
}

/// Spanning-tree count by deletion–contraction with the default call budget.
pub fn deletion_contraction_tau(g: &Multigraph) -> Result<BigInt> {
    deletion_contraction_tau_with_budget(g, DEFAULT_CALL_BUDGET)
}

/// Spanning-tree count by deletion–contraction. Each recursion step removes
/// one whole parallel class: τ(G) = τ(G without the class) + mult · τ(G with
/// the pair contracted).
pub fn deletion_contraction_tau_with_budget(g: &Multigraph, budget: u64) -> Result<BigInt> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = g.vertex_count();
    let mut adj = vec![vec![0u64; n]; n];
    for (u, v, m) in g.edges() {
        adj[u][v] = m;
        adj[v][u] = m;
    }
    let mut calls = 0u64;
    recurse(adj, &mut calls, budget)
}

fn recurse(adj: Vec<Vec<u64>>, calls: &mut u64, budget: u64) -> Result<BigInt> {
    *calls += 1;
    if *calls > budget {
        return Err(Error::BudgetExceeded(format!(
            "deletion-contraction exceeded {budget} calls"
        )));
    }
    let n = adj.len();
    if n == 1 {
        return Ok(BigInt::one());
    }
    if n == 2 {
        return Ok(BigInt::from(adj[0][1]));
    }
    let mut pair = None;
    'outer: for u in 0..n {
        for v in u + 1..n {
            if adj[u][v] > 0 {
                pair = Some((u, v));
                break 'outer;
            }
        }
    }
    let (u, v) = match pair {
        Some(p) => p,
        None => return Ok(BigInt::zero()),
    };
    let mult = adj[u][v];

    let mut deleted = adj.clone();
    deleted[u][v] = 0;
    deleted[v][u] = 0;
    let without = recurse(deleted, calls, budget)?;

    // Contract v into u, dropping the loop that the contracted class becomes.
    let mut contracted: Vec<Vec<u64>> = Vec::with_capacity(n - 1);
    for a in 0..n {
        if a == v {
            continue;
        }
        let mut row = Vec::with_capacity(n - 1);
        for b in 0..n {
            if b == v {
                continue;
            }
            let mut m = adj[a][b];
            if a == u {
                m += adj[v][b];
            }
            if b == u {
                m += adj[a][v];
            }
            if a == u && b == u {
                m = 0;
            }
            row.push(m);
        }
        contracted.push(row);
    }
    let with = recurse(contracted, calls, budget)?;

    Ok(without + BigInt::from(mult) * with)
}
