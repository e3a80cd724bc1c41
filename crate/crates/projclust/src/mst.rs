//! Exact Euclidean minimum spanning tree (dense Prim), tree-cost evaluation
//! in arbitrary spaces, a labeled-tree enumeration oracle, and the pullback
//! ratio diagnostic.

use crate::error::{Error, Result};
use crate::geometry::PointSet;

/// A spanning tree on `n` points: `n - 1` unordered index pairs, each stored
/// smaller-first, the list sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningTree {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl SpanningTree {
    /// Validates that `edges` is a spanning tree on `[0, n)` and normalizes
    /// the representation.
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("a tree needs at least one vertex".into()));
        }
        if edges.len() + 1 != n {
            return Err(Error::InvalidInput(format!(
                "a spanning tree on {n} vertices needs {} edges, got {}",
                n - 1,
                edges.len()
            )));
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut norm = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidInput(format!("edge ({a}, {b}) out of range")));
            }
            if a == b {
                return Err(Error::InvalidInput("self-loop".into()));
            }
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                return Err(Error::InvalidInput("edge set contains a cycle".into()));
            }
            parent[ra] = rb;
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        Ok(SpanningTree { n, edges: norm })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
}

/// Exact MST by dense Prim in `O(n^2 m)`. Deterministic: cut candidates are
/// compared by `(length, min index, max index)`. A single point yields the
/// empty tree.
pub fn mst_exact(ps: &PointSet) -> SpanningTree {
    let n = ps.len();
    if n == 1 {
        return SpanningTree { n, edges: Vec::new() };
    }
    let mut in_tree = vec![false; n];
    in_tree[0] = true;
    let mut from = vec![0usize; n];
    let mut best: Vec<f64> = (0..n).map(|u| ps.distance(0, u)).collect();
    best[0] = f64::INFINITY;
    let mut edges = Vec::with_capacity(n - 1);
    for _ in 1..n {
        let mut pick = usize::MAX;
        for v in 0..n {
            if in_tree[v] {
                continue;
            }
            if pick == usize::MAX {
                pick = v;
                continue;
            }
            let kv = (best[v], from[v].min(v), from[v].max(v));
            let kp = (best[pick], from[pick].min(pick), from[pick].max(pick));
            if kv.0 < kp.0 || (kv.0 == kp.0 && (kv.1, kv.2) < (kp.1, kp.2)) {
                pick = v;
            }
        }
        let v = pick;
        in_tree[v] = true;
        edges.push((from[v].min(v), from[v].max(v)));
        for u in 0..n {
            if in_tree[u] {
                continue;
            }
            let d = ps.distance(v, u);
            let better = d < best[u]
                || (d == best[u] && (v.min(u), v.max(u)) < (from[u].min(u), from[u].max(u)));
            if better {
                best[u] = d;
                from[u] = v;
            }
        }
    }
    edges.sort_unstable();
    SpanningTree { n, edges }
}

/// Sum of edge lengths of `tree` measured in `ps`. Edges are accumulated in
/// their stored lexicographic order, so equal trees price identically.
pub fn tree_cost_in(tree: &SpanningTree, ps: &PointSet) -> Result<f64> {
    if tree.n != ps.len() {
        return Err(Error::DimensionMismatch { expected: tree.n, got: ps.len() });
    }
    Ok(tree.edges.iter().map(|&(a, b)| ps.distance(a, b)).sum())
}

/// Exhaustive MST oracle over all `n^(n-2)` labeled trees (Pruefer
/// enumeration); ties go to the lexicographically smallest edge list.
pub fn brute_force_mst(ps: &PointSet, max_n: usize) -> Result<(SpanningTree, f64)> {
    let n = ps.len();
    if n > max_n {
        return Err(Error::SizeGuard { n, max_n });
    }
    if n == 1 {
        return Ok((SpanningTree { n, edges: Vec::new() }, 0.0));
    }
    if n == 2 {
        let tree = SpanningTree { n, edges: vec![(0, 1)] };
        let cost = tree_cost_in(&tree, ps)?;
        return Ok((tree, cost));
    }

    let mut best: Option<(f64, Vec<(usize, usize)>)> = None;
    let mut seq = vec![0usize; n - 2];
    loop {
        let edges = decode_pruefer(n, &seq);
        let cost: f64 = edges.iter().map(|&(a, b)| ps.distance(a, b)).sum();
        let replace = match &best {
            None => true,
            Some((c, e)) => cost < *c || (cost == *c && edges < *e),
        };
        if replace {
            best = Some((cost, edges));
        }
        // Odometer over [0, n)^(n-2).
        let mut pos = 0;
        loop {
            if pos == seq.len() {
                let (_, edges) = best.expect("at least one tree enumerated");
                let tree = SpanningTree { n, edges };
                let cost = tree_cost_in(&tree, ps)?;
                return Ok((tree, cost));
            }
            seq[pos] += 1;
            if seq[pos] < n {
                break;
            }
            seq[pos] = 0;
            pos += 1;
        }
    }
}

/// Standard Pruefer decode; returns the edge list sorted lexicographically
/// with each pair smaller-first.
fn decode_pruefer(n: usize, seq: &[usize]) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &s in seq {
        let leaf = (0..n).find(|&j| degree[j] == 1).expect("a leaf always exists");
        edges.push((leaf.min(s), leaf.max(s)));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let mut rest = (0..n).filter(|&j| degree[j] == 1);
    let a = rest.next().expect("two vertices remain");
    let b = rest.next().expect("two vertices remain");
    edges.push((a.min(b), a.max(b)));
    edges.sort_unstable();
    edges
}

/// Computes the pullback diagnostic for a projected point set: with `M` the
/// MST cost of the original set and `T` the MST of the projected set, returns
/// `(cost_original(T) / M, cost_projected(T) / M)`. The first component is at
/// least 1 up to float error. Degenerate `M = 0` (all points coincident)
/// reports `(1, 1)`.
pub fn pullback_ratio(original: &PointSet, projected: &PointSet) -> Result<(f64, f64)> {
    if original.len() != projected.len() {
        return Err(Error::DimensionMismatch { expected: original.len(), got: projected.len() });
    }
    let t_orig = mst_exact(original);
    let m = tree_cost_in(&t_orig, original)?;
    let t_proj = mst_exact(projected);
    let pullback = tree_cost_in(&t_proj, original)?;
    let proj_cost = tree_cost_in(&t_proj, projected)?;
    if m == 0.0 {
        return Ok((1.0, 1.0));
    }
    Ok((pullback / m, proj_cost / m))
}
