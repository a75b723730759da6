//! The explored finite world shared by every construction.
//!
//! A [`Universe`] expands a presentation up to an exploration level, roots a
//! BFS spanning tree at the designated root and answers side queries for
//! finite cuts by path parity: a vertex lies on side B of a cut iff its tree
//! path from the root crosses the cut an odd number of times.

use fixedbitset::FixedBitSet;
use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::presentation::{EdgeId, EdgeRecord, Expansion, GraphPresentation, VertexId, WINDOW};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Budget {
    /// Level at which cuts are certified; cut edges lie within `level - WINDOW`.
    pub level: u32,
    /// Maximum number of crossing edges of an enumerated cut.
    pub cut_size: usize,
    /// Minimum prefix length, tooth count and leaf count of witnesses.
    pub witness_threshold: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            level: 16,
            cut_size: 2,
            witness_threshold: 8,
        }
    }
}

impl Budget {
    pub fn new(level: u32, cut_size: usize) -> Budget {
        Budget {
            level,
            cut_size,
            ..Budget::default()
        }
    }

    /// Edges of enumerated cuts are born at or below this level.
    pub fn cut_region(&self) -> u32 {
        self.level.saturating_sub(WINDOW)
    }

    /// Witness searches look this far: a part starting at the cut region
    /// still has room for a spine of threshold length.
    pub fn explore_level(&self) -> u32 {
        self.cut_region() + self.witness_threshold as u32
    }
}

/// A component of `G` minus a finite edge set, named by its least vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ComponentId {
    pub representative: VertexId,
    /// The component is infinite: it still grows at the level it was computed.
    pub live: bool,
}

/// Component labels of some `G_n` minus an edge set. `label[v]` is the least
/// vertex index in the component of `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    pub level: u32,
    pub label: Vec<u32>,
    /// Labels whose component contains a frontier vertex of `G_level`.
    pub live: FixedBitSet,
}

impl Components {
    pub fn of(&self, v: VertexId) -> ComponentId {
        let rep = self.label[v.index()];
        ComponentId {
            representative: VertexId(rep),
            live: self.live.contains(rep as usize),
        }
    }

    /// All components, ordered by representative.
    pub fn ids(&self) -> Vec<ComponentId> {
        (0..self.label.len())
            .filter(|&v| self.label[v] as usize == v)
            .map(|v| self.of(VertexId(v as u32)))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct Universe {
    pres: GraphPresentation,
    budget: Budget,
    level: u32,
    exp: Expansion,
    adjacency: Vec<Vec<(EdgeId, VertexId)>>,
    parent: Vec<Option<(EdgeId, VertexId)>>,
    /// Child endpoint of each tree edge.
    tree_child: Vec<Option<VertexId>>,
    tin: Vec<u32>,
    tout: Vec<u32>,
    bfs_order: Vec<VertexId>,
    frontier: Vec<FixedBitSet>,
}

impl Universe {
    pub fn new(pres: &GraphPresentation, budget: Budget) -> Result<Universe> {
        let needed = pres.connectivity_level() + WINDOW;
        if budget.level < needed {
            return Err(Error::BudgetTooSmall {
                needed,
                given: budget.level,
            });
        }
        let level = budget.explore_level();
        let exp = pres.expand(level + 1);
        let nv = exp.vertex_count(level);
        let ne = exp.edge_count(level);

        let mut adjacency = vec![Vec::new(); nv];
        for (i, e) in exp.edges()[..ne].iter().enumerate() {
            let id = EdgeId(i as u32);
            adjacency[e.ends.0.index()].push((id, e.ends.1));
            if e.ends.0 != e.ends.1 {
                adjacency[e.ends.1.index()].push((id, e.ends.0));
            }
        }

        let mut parent = vec![None; nv];
        let mut seen = FixedBitSet::with_capacity(nv);
        let mut bfs_order = Vec::with_capacity(nv);
        seen.insert(0);
        bfs_order.push(VertexId(0));
        let mut head = 0;
        while head < bfs_order.len() {
            let u = bfs_order[head];
            head += 1;
            for &(e, w) in &adjacency[u.index()] {
                if !seen.put(w.index()) {
                    parent[w.index()] = Some((e, u));
                    bfs_order.push(w);
                }
            }
        }
        if bfs_order.len() != nv {
            return Err(Error::Internal(format!(
                "G_{level} of `{}` is disconnected",
                pres.name()
            )));
        }

        let mut tree_child = vec![None; ne];
        let mut children = vec![Vec::new(); nv];
        for &v in &bfs_order[1..] {
            let (e, p) = parent[v.index()].expect("non-root vertex has a parent");
            tree_child[e.index()] = Some(v);
            children[p.index()].push(v);
        }
        let mut tin = vec![0; nv];
        let mut tout = vec![0; nv];
        let mut clock = 0;
        let mut stack = vec![(VertexId(0), 0usize)];
        tin[0] = 0;
        clock += 1;
        while let Some((v, next)) = stack.last_mut() {
            let v = *v;
            if let Some(&c) = children[v.index()].get(*next) {
                *next += 1;
                tin[c.index()] = clock;
                clock += 1;
                stack.push((c, 0));
            } else {
                tout[v.index()] = clock;
                stack.pop();
            }
        }

        let frontier = (0..=level)
            .map(|n| {
                let mut bits = FixedBitSet::with_capacity(exp.vertex_count(n));
                for v in exp.frontier(n) {
                    bits.insert(v.index());
                }
                bits
            })
            .collect();

        Ok(Universe {
            pres: pres.clone(),
            budget,
            level,
            exp,
            adjacency,
            parent,
            tree_child,
            tin,
            tout,
            bfs_order,
            frontier,
        })
    }

    pub fn presentation(&self) -> &GraphPresentation {
        &self.pres
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }

    /// Exploration level: the largest level the universe knows about.
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn root(&self) -> VertexId {
        VertexId(0)
    }

    pub fn vertex_count(&self, n: u32) -> usize {
        self.exp.vertex_count(n.min(self.level))
    }

    pub fn edge_count(&self, n: u32) -> usize {
        self.exp.edge_count(n.min(self.level))
    }

    pub fn edge(&self, e: EdgeId) -> &EdgeRecord {
        self.exp.edge(e)
    }

    /// Edges of `G_n` in birth order.
    pub fn edges(&self, n: u32) -> &[EdgeRecord] {
        &self.exp.edges()[..self.edge_count(n)]
    }

    pub fn vertex_level(&self, v: VertexId) -> u32 {
        self.exp.vertex(v).level
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.exp.vertex(v).name
    }

    pub fn edge_name(&self, e: EdgeId) -> &str {
        &self.exp.edge(e).name
    }

    pub fn lookup_vertex(&self, name: &str) -> Result<VertexId> {
        self.exp
            .vertex_id(name)
            .filter(|v| v.index() < self.vertex_count(self.level))
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn lookup_edge(&self, name: &str) -> Result<EdgeId> {
        self.exp
            .edge_id(name)
            .filter(|e| e.index() < self.edge_count(self.level))
            .ok_or_else(|| Error::UnknownEdge(name.to_string()))
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        v.index() < self.vertex_count(self.level)
    }

    pub fn neighbors(&self, v: VertexId) -> &[(EdgeId, VertexId)] {
        &self.adjacency[v.index()]
    }

    pub fn is_frontier(&self, v: VertexId, n: u32) -> bool {
        self.frontier[n.min(self.level) as usize].contains(v.index())
    }

    /// BFS tree edge to the parent of `v`, `None` at the root.
    pub fn tree_parent(&self, v: VertexId) -> Option<(EdgeId, VertexId)> {
        self.parent[v.index()]
    }

    pub fn bfs_order(&self) -> &[VertexId] {
        &self.bfs_order
    }

    /// Whether `v` lies below the tree edge `e`.
    fn below(&self, e: EdgeId, v: VertexId) -> bool {
        match self.tree_child[e.index()] {
            Some(c) => {
                let (t, c) = (self.tin[v.index()], c.index());
                self.tin[c] <= t && t < self.tout[c]
            }
            None => false,
        }
    }

    /// Parity of the root path of `v` against `edges`; meaningful when
    /// `edges` is a cut of `G_level`.
    pub fn parity(&self, edges: &[EdgeId], v: VertexId) -> bool {
        edges.iter().fold(false, |acc, &e| acc ^ self.below(e, v))
    }

    /// Whether `edges` is exactly the crossing set of a bipartition of the
    /// explored graph.
    pub fn is_cut(&self, edges: &[EdgeId]) -> bool {
        if edges.iter().any(|e| e.index() >= self.edge_count(self.level)) {
            return false;
        }
        let nv = self.vertex_count(self.level);
        let mut side_b = FixedBitSet::with_capacity(nv);
        for v in 0..nv {
            if self.parity(edges, VertexId(v as u32)) {
                side_b.insert(v);
            }
        }
        self.edges(self.level).iter().enumerate().all(|(i, e)| {
            let crosses = side_b.contains(e.ends.0.index()) != side_b.contains(e.ends.1.index());
            crosses == edges.binary_search(&EdgeId(i as u32)).is_ok()
        })
    }

    /// Components of `G_n` minus `removed` (which must be sorted).
    pub fn components(&self, n: u32, removed: &[EdgeId]) -> Components {
        let n = n.min(self.level);
        let nv = self.vertex_count(n);
        let mut uf = UnionFind::<u32>::new(nv);
        for (i, e) in self.edges(n).iter().enumerate() {
            if removed.binary_search(&EdgeId(i as u32)).is_err() {
                uf.union(e.ends.0 .0, e.ends.1 .0);
            }
        }
        let mut least = vec![u32::MAX; nv];
        let mut label = vec![0; nv];
        for (v, slot) in label.iter_mut().enumerate() {
            let r = uf.find(v as u32) as usize;
            if least[r] == u32::MAX {
                least[r] = v as u32;
            }
            *slot = least[r];
        }
        let mut live = FixedBitSet::with_capacity(nv);
        for v in self.frontier[n as usize].ones() {
            live.insert(label[v] as usize);
        }
        Components { level: n, label, live }
    }
}
