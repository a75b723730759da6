//! Towers of spanning trees over growing cut sequences, and the
//! certificates that their union is a topological spanning tree.

use std::collections::BTreeSet;

use petgraph::unionfind::UnionFind;
use serde_json::{json, Value};

use crate::cutspace::FiniteCut;
use crate::error::{Error, Result};
use crate::presentation::{EdgeId, VertexId};
use crate::quotient::{build_gm, LawReport, QuotientGraph};
use crate::universe::Universe;

#[derive(Debug, Clone)]
pub struct TreeTower {
    pub cut_sequence: Vec<FiniteCut>,
    /// `trees[j]` spans the cross-edge skeleton of the quotient over the
    /// first `j + 1` cuts.
    pub trees: Vec<Vec<EdgeId>>,
    pub limit_edges: Vec<EdgeId>,
    quotients: Vec<QuotientGraph>,
}

impl TreeTower {
    pub fn quotients(&self) -> &[QuotientGraph] {
        &self.quotients
    }

    pub fn depth(&self) -> usize {
        self.trees.len()
    }

    /// Cross edges of level `j`, sorted and deduplicated.
    pub fn crossings(&self, j: usize) -> Vec<EdgeId> {
        let mut e: Vec<EdgeId> = self.quotients[j].cross_edges().iter().map(|c| c.edge).collect();
        e.sort();
        e.dedup();
        e
    }

    /// Recomputes `limit_edges` after a hand edit of `trees`.
    pub fn refresh_limit(&mut self) {
        let all: BTreeSet<EdgeId> = self.trees.iter().flatten().copied().collect();
        self.limit_edges = all.into_iter().collect();
    }

    pub fn to_json(&self, u: &Universe) -> Value {
        let names = |es: &[EdgeId]| es.iter().map(|&e| u.edge_name(e).to_string()).collect::<Vec<_>>();
        json!({
            "cut_sequence": self.cut_sequence.iter().map(|c| c.to_json(u)).collect::<Vec<_>>(),
            "trees": self.trees.iter().map(|t| names(t)).collect::<Vec<_>>(),
            "limit_edges": names(&self.limit_edges),
        })
    }
}

pub fn build_tree_tower(u: &Universe, sequence: &[FiniteCut], depth: usize) -> Result<TreeTower> {
    if depth > sequence.len() {
        return Err(Error::InsufficientLevel {
            needed: depth as u32,
            given: sequence.len() as u32,
        });
    }
    let seq = &sequence[..depth];
    for (i, c) in seq.iter().enumerate() {
        if c.is_zero() || seq[..i].contains(c) {
            return Err(Error::DuplicateCut(c.label(u)));
        }
    }
    let level = u.budget().level;
    let mut quotients = Vec::with_capacity(depth);
    let mut trees: Vec<Vec<EdgeId>> = Vec::with_capacity(depth);
    let mut previous_crossings: BTreeSet<EdgeId> = BTreeSet::new();
    for j in 0..depth {
        let q = build_gm(u, &seq[..=j], level)?;
        let mut uf = UnionFind::<usize>::new(q.words().len());
        let mut tree = Vec::new();
        let mut candidates: Vec<(bool, EdgeId, usize, usize)> = q
            .cross_edges()
            .iter()
            .map(|c| (previous_crossings.contains(&c.edge), c.edge, c.from, c.to))
            .collect();
        candidates.sort();
        let prev: BTreeSet<EdgeId> = trees
            .last()
            .map(|t: &Vec<EdgeId>| t.iter().copied().collect())
            .unwrap_or_default();
        for &(_, e, a, b) in candidates.iter().filter(|c| prev.contains(&c.1)) {
            if uf.union(a, b) {
                tree.push(e);
            }
        }
        for &(_, e, a, b) in &candidates {
            if uf.union(a, b) {
                tree.push(e);
            }
        }
        if tree.len() + 1 != q.words().len() {
            return Err(Error::Internal(format!(
                "cross-edge skeleton of level {j} is disconnected"
            )));
        }
        tree.sort();
        previous_crossings = q.cross_edges().iter().map(|c| c.edge).collect();
        trees.push(tree);
        quotients.push(q);
    }
    let mut tower = TreeTower {
        cut_sequence: seq.to_vec(),
        trees,
        limit_edges: Vec::new(),
        quotients,
    };
    tower.refresh_limit();
    Ok(tower)
}

fn intersect(a: &[EdgeId], b: &[EdgeId]) -> Vec<EdgeId> {
    a.iter().copied().filter(|e| b.binary_search(e).is_ok()).collect()
}

fn names(u: &Universe, es: &[EdgeId]) -> String {
    let n: Vec<&str> = es.iter().map(|&e| u.edge_name(e)).collect();
    format!("{{{}}}", n.join(", "))
}

/// Consecutive-intersection identity, agreement with the limit, and the
/// per-level tree laws.
pub fn check_consistency(u: &Universe, tower: &TreeTower) -> LawReport {
    let mut report = LawReport::default();
    for j in 0..tower.depth() {
        let mut tree = tower.trees[j].clone();
        tree.sort();
        let crossings = tower.crossings(j);
        if j > 0 {
            let mut prev = tower.trees[j - 1].clone();
            prev.sort();
            let meet = intersect(&tree, &tower.crossings(j - 1));
            report.check(meet == prev, || {
                format!(
                    "level {j}: tree ∩ crossings of level {} is {} not {}",
                    j - 1,
                    names(u, &meet),
                    names(u, &prev)
                )
            });
        }
        let from_limit = intersect(&tower.limit_edges, &crossings);
        report.check(from_limit == tree, || {
            format!("level {j}: limit ∩ crossings differs from tree")
        });

        let q = &tower.quotients[j];
        let mut uf = UnionFind::<usize>::new(q.words().len());
        let mut acyclic = true;
        for e in &tree {
            match q.cross_edges().iter().find(|c| c.edge == *e) {
                Some(c) => acyclic &= uf.union(c.from, c.to),
                None => acyclic = false,
            }
        }
        report.check(acyclic && tree.len() + 1 == q.words().len(), || {
            format!("level {j}: not a spanning tree of the quotient")
        });
    }
    report
}

/// Every cut of the sequence is crossed by some limit edge.
pub fn check_coverage(u: &Universe, tower: &TreeTower) -> LawReport {
    let mut report = LawReport::default();
    for c in &tower.cut_sequence {
        report.check(tower.limit_edges.iter().any(|&e| c.contains(e)), || {
            format!("cut {} not crossed by the limit", c.label(u))
        });
    }
    report
}

/// Each fundamental cut of each level tree is crossed exactly once.
pub fn verify_no_circle(u: &Universe, tower: &TreeTower) -> LawReport {
    let mut report = LawReport::default();
    for j in 0..tower.depth() {
        let q = &tower.quotients[j];
        let tree_edges: Vec<_> = tower.trees[j]
            .iter()
            .filter_map(|e| q.cross_edges().iter().find(|c| c.edge == *e))
            .collect();
        for removed in &tree_edges {
            let mut uf = UnionFind::<usize>::new(q.words().len());
            for t in tree_edges.iter().filter(|t| t.edge != removed.edge) {
                uf.union(t.from, t.to);
            }
            let root = uf.find(removed.from);
            let crossing = q
                .cross_edges()
                .iter()
                .filter(|c| (uf.find(c.from) == root) != (uf.find(c.to) == root))
                .filter(|c| tower.limit_edges.binary_search(&c.edge).is_ok())
                .count();
            report.check(crossing == 1, || {
                format!(
                    "level {j}: fundamental cut of {} crossed {crossing} times",
                    u.edge_name(removed.edge)
                )
            });
        }
    }
    report
}

pub fn tower_report(u: &Universe, tower: &TreeTower) -> Value {
    let consistency = check_consistency(u, tower);
    let coverage = check_coverage(u, tower);
    let single = verify_no_circle(u, tower);
    let violations: Vec<&String> = consistency
        .violations
        .iter()
        .chain(&coverage.violations)
        .chain(&single.violations)
        .collect();
    json!({
        "consistency": consistency.passed(),
        "coverage": coverage.passed(),
        "single_crossing": single.passed(),
        "violations": violations,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VertexSelection {
    All,
    None,
    /// Vertices instantiated from the named templates.
    Templates(Vec<String>),
    Explicit(Vec<VertexId>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EdgeSelection {
    All,
    None,
    /// Edges instantiated from the named templates, e.g. `a[n]-a[n+1]`.
    Templates(Vec<String>),
    Explicit(Vec<EdgeId>),
}

/// The closure of a subgraph given by template-level selections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StandardSubspace {
    pub vertices: VertexSelection,
    pub edges: EdgeSelection,
    pub description: String,
}

fn vertex_template(name: &str) -> &str {
    name.split('[').next().unwrap_or(name)
}

fn edge_template(name: &str) -> &str {
    let body = name.strip_prefix("E:").unwrap_or(name);
    body.rsplit_once('@').map_or(body, |(t, _)| t)
}

impl StandardSubspace {
    pub fn everything() -> StandardSubspace {
        StandardSubspace {
            vertices: VertexSelection::All,
            edges: EdgeSelection::All,
            description: "G".into(),
        }
    }

    pub fn has_edge(&self, u: &Universe, e: EdgeId) -> bool {
        match &self.edges {
            EdgeSelection::All => true,
            EdgeSelection::None => false,
            EdgeSelection::Templates(t) => t.iter().any(|t| t == edge_template(u.edge_name(e))),
            EdgeSelection::Explicit(es) => es.contains(&e),
        }
    }

    /// Vertex membership; endpoints of selected edges belong to the subgraph.
    pub fn has_vertex(&self, u: &Universe, v: VertexId) -> bool {
        let direct = match &self.vertices {
            VertexSelection::All => true,
            VertexSelection::None => false,
            VertexSelection::Templates(t) => t.iter().any(|t| t == vertex_template(u.vertex_name(v))),
            VertexSelection::Explicit(vs) => vs.contains(&v),
        };
        direct || u.neighbors(v).iter().any(|&(e, _)| self.has_edge(u, e))
    }
}

/// For each cut whose two sides both meet `h`, `h` holds a crossing edge.
/// Ends in the closure of `h` sit where its explored vertices accumulate,
/// so the explored vertices decide which sides are met.
pub fn arc_connected(u: &Universe, h: &StandardSubspace, cuts: &[FiniteCut]) -> bool {
    let level = u.budget().level;
    let members: Vec<VertexId> = (0..u.vertex_count(level))
        .map(|v| VertexId(v as u32))
        .filter(|&v| h.has_vertex(u, v))
        .collect();
    cuts.iter().all(|c| {
        let mut sides = members.iter().map(|&v| u.parity(c.edges(), v));
        let Some(first) = sides.next() else {
            return true;
        };
        if sides.all(|s| s == first) {
            return true;
        }
        c.edges().iter().any(|&e| h.has_edge(u, e))
    })
}
