//! Contraction graphs `G.E`, their bonding maps and the comparison map from
//! the quotient over the cuts inside `E`.

use serde_json::{json, Value};

use crate::cutspace::{edge_set_label, CertifyMemo, FiniteCut};
use crate::error::{Error, Result};
use crate::presentation::{EdgeId, VertexId, WINDOW};
use crate::quotient::{build_gm, coordinates, project, LawReport, QuotientGraph};
use crate::universe::{ComponentId, Components, Universe};

/// Largest edge set whose subsets are searched for cuts.
pub const MAX_CUT_SEARCH: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Vertex(VertexId),
    Edge(EdgeId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractionGraph {
    edge_set: Vec<EdgeId>,
    vertices: Vec<ComponentId>,
    edges: Vec<(EdgeId, usize, usize)>,
    comps: Components,
    level_used: u32,
}

fn normalized(edges: &[EdgeId]) -> Vec<EdgeId> {
    let mut e = edges.to_vec();
    e.sort();
    e.dedup();
    e
}

pub fn build_ge(u: &Universe, edges: &[EdgeId], level: u32) -> Result<ContractionGraph> {
    let edge_set = normalized(edges);
    if level > u.level() {
        return Err(Error::InsufficientLevel {
            needed: level,
            given: u.level(),
        });
    }
    let base = level.saturating_sub(WINDOW);
    if let Some(&e) = edge_set
        .iter()
        .find(|e| e.index() >= u.edge_count(u.level()) || u.edge(**e).level > base)
    {
        return Err(Error::InsufficientLevel {
            needed: u.edge(e).level + WINDOW,
            given: level,
        });
    }
    let nb = u.vertex_count(base);
    let reference = u.components(base, &edge_set);
    for n in base + 1..=level {
        let c = u.components(n, &edge_set);
        if c.label[..nb] != reference.label[..nb] {
            return Err(Error::Unstable(edge_set_label(u, &edge_set)));
        }
    }
    let comps = u.components(level, &edge_set);
    let vertices = comps.ids();
    let index = |v: VertexId| {
        let rep = comps.of(v);
        vertices.binary_search(&rep).expect("component listed")
    };
    let graph_edges = edge_set
        .iter()
        .map(|&e| {
            let (a, b) = u.edge(e).ends;
            (e, index(a), index(b))
        })
        .collect();
    Ok(ContractionGraph {
        edge_set,
        vertices,
        edges: graph_edges,
        comps,
        level_used: level,
    })
}

impl ContractionGraph {
    pub fn edge_set(&self) -> &[EdgeId] {
        &self.edge_set
    }

    pub fn vertices(&self) -> &[ComponentId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(EdgeId, usize, usize)] {
        &self.edges
    }

    pub fn level_used(&self) -> u32 {
        self.level_used
    }

    pub fn component_of(&self, v: VertexId) -> ComponentId {
        self.comps.of(v)
    }

    /// Every vertex and edge of the graph.
    pub fn elements(&self) -> Vec<Element> {
        self.vertices
            .iter()
            .map(|c| Element::Vertex(c.representative))
            .chain(self.edge_set.iter().map(|&e| Element::Edge(e)))
            .collect()
    }

    pub fn render(&self, u: &Universe, x: Element) -> String {
        match x {
            Element::Vertex(v) => format!("[{}]", u.vertex_name(v)),
            Element::Edge(e) => u.edge_name(e).to_string(),
        }
    }

    pub fn to_json(&self, u: &Universe) -> Value {
        let vertices: Vec<Value> = self
            .vertices
            .iter()
            .map(|c| json!({"representative": u.vertex_name(c.representative), "live": c.live}))
            .collect();
        let edges: Vec<Value> = self
            .edges
            .iter()
            .map(|&(e, a, b)| {
                json!({
                    "edge": u.edge_name(e),
                    "from": u.vertex_name(self.vertices[a].representative),
                    "to": u.vertex_name(self.vertices[b].representative),
                })
            })
            .collect();
        json!({
            "edge_set": self.edge_set.iter().map(|&e| u.edge_name(e)).collect::<Vec<_>>(),
            "vertices": vertices,
            "edges": edges,
            "level_used": self.level_used,
        })
    }
}

/// Bonding map `G.E_sup -> G.E_sub`.
pub fn f_bond(u: &Universe, sup: &ContractionGraph, sub: &ContractionGraph, x: Element) -> Result<Element> {
    if let Some(e) = sub.edge_set.iter().find(|e| sup.edge_set.binary_search(e).is_err()) {
        return Err(Error::NotNested(format!(
            "{} is not contracted in the larger set",
            u.edge_name(*e)
        )));
    }
    match x {
        Element::Vertex(v) => {
            if sup.vertices.binary_search(&sup.comps.of(v)).is_err() || sup.comps.of(v).representative != v {
                return Err(Error::UnknownVertex(u.vertex_name(v).to_string()));
            }
            Ok(Element::Vertex(sub.comps.of(v).representative))
        }
        Element::Edge(e) => {
            if sup.edge_set.binary_search(&e).is_err() {
                return Err(Error::UnknownEdge(u.edge_name(e).to_string()));
            }
            if sub.edge_set.binary_search(&e).is_ok() {
                Ok(Element::Edge(e))
            } else {
                Ok(Element::Vertex(sub.comps.of(u.edge(e).ends.0).representative))
            }
        }
    }
}

/// Every nonempty subset of `edges` that certifies as a finite cut.
pub fn cuts_within(u: &Universe, edges: &[EdgeId]) -> Result<Vec<FiniteCut>> {
    cuts_within_memo(u, edges, &CertifyMemo::default())
}

pub fn cuts_within_memo(u: &Universe, edges: &[EdgeId], memo: &CertifyMemo) -> Result<Vec<FiniteCut>> {
    let edges = normalized(edges);
    if edges.len() > MAX_CUT_SEARCH {
        return Err(Error::BudgetTooSmall {
            needed: edges.len() as u32,
            given: MAX_CUT_SEARCH as u32,
        });
    }
    let mut cuts = Vec::new();
    for mask in 1u32..(1 << edges.len()) {
        let subset: Vec<EdgeId> = (0..edges.len())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| edges[i])
            .collect();
        if let Ok(c) = memo.certify(u, &subset) {
            cuts.push(c);
        }
    }
    cuts.sort();
    Ok(cuts)
}

/// The comparison map from the quotient over the cuts inside `E` to `G.E`.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub quotient: QuotientGraph,
    pub contraction: ContractionGraph,
    /// Component vertex of each word.
    pub word_target: Vec<VertexId>,
}

impl Comparison {
    /// Image of an edge of the quotient.
    pub fn edge(&self, u: &Universe, e: EdgeId) -> Element {
        if self.contraction.edge_set.binary_search(&e).is_ok() {
            Element::Edge(e)
        } else {
            Element::Vertex(self.contraction.comps.of(u.edge(e).ends.0).representative)
        }
    }
}

pub fn g_compare(u: &Universe, edges: &[EdgeId], level: u32) -> Result<Comparison> {
    g_compare_memo(u, edges, level, &CertifyMemo::default())
}

pub fn g_compare_memo(u: &Universe, edges: &[EdgeId], level: u32, memo: &CertifyMemo) -> Result<Comparison> {
    let contraction = build_ge(u, edges, level)?;
    let m = cuts_within_memo(u, &contraction.edge_set, memo)?;
    let quotient = build_gm(u, &m, level)?;
    let mut word_target = Vec::with_capacity(quotient.words().len());
    for i in 0..quotient.words().len() {
        let mut targets = quotient.fiber(i).ones().map(|v| contraction.comps.label[v]);
        let first = targets.next().expect("realized word");
        if targets.any(|t| t != first) {
            return Err(Error::Internal(format!(
                "fiber of {} spans several components of G minus {}",
                quotient.words()[i],
                edge_set_label(u, &contraction.edge_set)
            )));
        }
        word_target.push(VertexId(first));
    }
    for (i, e) in u.edges(level).iter().enumerate() {
        let (a, b) = (
            contraction.comps.label[e.ends.0.index()],
            contraction.comps.label[e.ends.1.index()],
        );
        if a != b && contraction.edge_set.binary_search(&EdgeId(i as u32)).is_err() {
            return Err(Error::Internal(format!("edge {} joins two components", e.name)));
        }
    }
    Ok(Comparison {
        quotient,
        contraction,
        word_target,
    })
}

/// Commutation of the comparison square for `small ⊆ big`.
pub fn check_square(u: &Universe, big: &[EdgeId], small: &[EdgeId], level: u32) -> Result<LawReport> {
    let g = g_compare(u, big, level)?;
    let gs = g_compare(u, small, level)?;
    check_square_with(u, &g, &gs)
}

pub fn check_square_with(u: &Universe, g: &Comparison, gs: &Comparison) -> Result<LawReport> {
    let coords = coordinates(g.quotient.cuts(), gs.quotient.cuts())?;
    let mut report = LawReport::default();
    for (i, w) in g.quotient.words().iter().enumerate() {
        let left = f_bond(u, &g.contraction, &gs.contraction, Element::Vertex(g.word_target[i]))?;
        let right = gs
            .quotient
            .word_index(&project(&coords, w))
            .map(|j| Element::Vertex(gs.word_target[j]));
        report.check(right == Some(left), || format!("square fails at word {w}"));
    }
    for i in 0..u.edge_count(g.quotient.level_used()) {
        let e = EdgeId(i as u32);
        let left = f_bond(u, &g.contraction, &gs.contraction, g.edge(u, e))?;
        let right = gs.edge(u, e);
        report.check(left == right, || format!("square fails at edge {}", u.edge_name(e)));
    }
    Ok(report)
}

/// `f_31 = f_21 ∘ f_32` on every element of `G.E3`.
pub fn check_bonding(u: &Universe, g: [&ContractionGraph; 3]) -> Result<LawReport> {
    let mut report = LawReport::default();
    for x in g[2].elements() {
        let direct = f_bond(u, g[2], g[0], x)?;
        let composed = f_bond(u, g[1], g[0], f_bond(u, g[2], g[1], x)?)?;
        report.check(direct == composed, || format!("bonding fails at {}", g[2].render(u, x)));
    }
    Ok(report)
}
