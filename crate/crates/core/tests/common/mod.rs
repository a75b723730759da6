//! Brute-force oracles. None of these use the library's tree parity,
//! union-find labelling or refinement; they recompute everything by BFS over
//! the raw edge lists of an expansion.
#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use endspace::presentation::Expansion;
use endspace::{EdgeId, GraphPresentation, VertexId};

pub struct Graph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub vertex_level: Vec<u32>,
    pub edge_level: Vec<u32>,
    adj: Vec<Vec<(usize, usize)>>,
}

impl Graph {
    /// `G_level` of the presentation.
    pub fn at(p: &GraphPresentation, level: u32) -> Graph {
        let exp = p.expand(level);
        Graph::from_expansion(&exp, level)
    }

    pub fn from_expansion(exp: &Expansion, level: u32) -> Graph {
        let n = exp.vertex_count(level);
        let m = exp.edge_count(level);
        let edges: Vec<(usize, usize)> = exp.edges()[..m]
            .iter()
            .map(|e| (e.ends.0.index(), e.ends.1.index()))
            .collect();
        let mut adj = vec![Vec::new(); n];
        for (i, &(a, b)) in edges.iter().enumerate() {
            adj[a].push((i, b));
            adj[b].push((i, a));
        }
        Graph {
            n,
            vertex_level: exp.vertices()[..n].iter().map(|v| v.level).collect(),
            edge_level: exp.edges()[..m].iter().map(|e| e.level).collect(),
            edges,
            adj,
        }
    }

    /// Two-colouring where edges of `cut` flip colour and all others keep it.
    /// `None` when no such colouring exists, i.e. `cut` is not a cut.
    pub fn two_colour(&self, cut: &[EdgeId]) -> Option<Vec<bool>> {
        let flips: BTreeSet<usize> = cut.iter().map(|e| e.index()).collect();
        if flips.iter().any(|&e| e >= self.edges.len()) {
            return None;
        }
        let mut colour = vec![None; self.n];
        for s in 0..self.n {
            if colour[s].is_some() {
                continue;
            }
            colour[s] = Some(false);
            let mut q = VecDeque::from([s]);
            while let Some(v) = q.pop_front() {
                let cv = colour[v].unwrap();
                for &(e, w) in &self.adj[v] {
                    let want = cv ^ flips.contains(&e);
                    match colour[w] {
                        None => {
                            colour[w] = Some(want);
                            q.push_back(w);
                        }
                        Some(c) if c != want => return None,
                        _ => {}
                    }
                }
            }
        }
        let colour: Vec<bool> = colour.into_iter().map(|c| c.unwrap()).collect();
        // Normalise so the root is on side A.
        let flip_all = colour[0];
        Some(colour.into_iter().map(|c| c ^ flip_all).collect())
    }

    /// Component index of every vertex after deleting `removed`, numbered
    /// by least member.
    pub fn components(&self, removed: &[EdgeId]) -> Vec<usize> {
        let gone: BTreeSet<usize> = removed.iter().map(|e| e.index()).collect();
        let mut comp = vec![usize::MAX; self.n];
        for s in 0..self.n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = s;
            let mut q = VecDeque::from([s]);
            while let Some(v) = q.pop_front() {
                for &(e, w) in &self.adj[v] {
                    if !gone.contains(&e) && comp[w] == usize::MAX {
                        comp[w] = s;
                        q.push_back(w);
                    }
                }
            }
        }
        comp
    }

    pub fn is_connected(&self) -> bool {
        self.components(&[]).iter().all(|&c| c == 0)
    }
}

/// Vertices of `G_n` that gain an edge at level `n + 1`, read off `G_{n+1}`.
pub fn frontier(p: &GraphPresentation, n: u32) -> BTreeSet<usize> {
    let g = Graph::at(p, n + 1);
    let old = g.vertex_level.iter().filter(|&&l| l <= n).count();
    g.edges
        .iter()
        .zip(&g.edge_level)
        .filter(|(_, &l)| l == n + 1)
        .flat_map(|(&(a, b), _)| [a, b])
        .filter(|&v| v < old)
        .collect()
}

/// Component pattern of `G_n - C` restricted to `G_s`: partition plus the
/// growing flag of each part.
fn pattern(p: &GraphPresentation, s: u32, n: u32, cut: &[EdgeId]) -> Vec<(usize, bool)> {
    let g = Graph::at(p, n);
    let comp = g.components(cut);
    let growing: BTreeSet<usize> = frontier(p, n).into_iter().map(|v| comp[v]).collect();
    let keep = g.vertex_level.iter().filter(|&&l| l <= s).count();
    (0..keep).map(|v| (comp[v], growing.contains(&comp[v]))).collect()
}

/// Full certificate: a cut at the exploration level whose pattern is
/// constant over some window ending by `budget`.
pub fn is_stabilized_cut(p: &GraphPresentation, explore: &Graph, cut: &[EdgeId], budget: u32) -> bool {
    if explore.two_colour(cut).is_none() {
        return false;
    }
    let birth = cut.iter().map(|e| explore.edge_level[e.index()]).max().unwrap_or(0);
    let mut s = birth.max(p.connectivity_level());
    while s + 4 <= budget {
        let base = pattern(p, s, s, cut);
        if (s + 1..=s + 4).all(|n| pattern(p, s, n, cut) == base) {
            return true;
        }
        s += 1;
    }
    false
}

/// All edge subsets of size `1..=k` of edges born at or below `region`.
pub fn small_subsets(g: &Graph, region: u32, k: usize) -> Vec<Vec<EdgeId>> {
    let cand: Vec<EdgeId> = (0..g.edges.len())
        .filter(|&e| g.edge_level[e] <= region)
        .map(|e| EdgeId(e as u32))
        .collect();
    let mut out = Vec::new();
    let mut stack: Vec<(Vec<EdgeId>, usize)> = vec![(Vec::new(), 0)];
    while let Some((set, start)) = stack.pop() {
        if !set.is_empty() {
            out.push(set.clone());
        }
        if set.len() == k {
            continue;
        }
        for (i, &e) in cand.iter().enumerate().skip(start) {
            let mut next = set.clone();
            next.push(e);
            stack.push((next, i + 1));
        }
    }
    out.sort();
    out
}

pub fn vid(i: usize) -> VertexId {
    VertexId(i as u32)
}
