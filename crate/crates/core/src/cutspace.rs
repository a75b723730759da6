//! Finite cuts, their stabilization certificate and the GF(2) cut space.

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use serde::Serialize;
use serde_json::{json, Value};

use crate::ends::EndDescriptor;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::presentation::{EdgeId, VertexId, WINDOW};
use crate::universe::Universe;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn from_parity(b: bool) -> Side {
        if b {
            Side::B
        } else {
            Side::A
        }
    }

    pub fn letter(self) -> char {
        match self {
            Side::A => 'A',
            Side::B => 'B',
        }
    }
}

/// A finite cut, stored as its crossing set. Side A holds the root.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteCut {
    edges: Vec<EdgeId>,
    seed: VertexId,
    stabilization_level: u32,
}

impl FiniteCut {
    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn seed(&self) -> VertexId {
        self.seed
    }

    pub fn stabilization_level(&self) -> u32 {
        self.stabilization_level
    }

    pub fn is_zero(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.edges.binary_search(&e).is_ok()
    }

    pub fn label(&self, u: &Universe) -> String {
        edge_set_label(u, &self.edges)
    }

    pub fn to_json(&self, u: &Universe) -> Value {
        json!({
            "edges": self.edges.iter().map(|&e| u.edge_name(e)).collect::<Vec<_>>(),
            "stab_level": self.stabilization_level,
        })
    }
}

pub fn edge_set_label(u: &Universe, edges: &[EdgeId]) -> String {
    let names: Vec<&str> = edges.iter().map(|&e| u.edge_name(e)).collect();
    format!("{{{}}}", names.join(", "))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SideAssignment<'a> {
    pub cut: &'a FiniteCut,
    pub side: Side,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// A vertex or a detected end.
#[derive(Debug, Clone, Copy)]
pub enum Point<'a> {
    Vertex(VertexId),
    End(&'a EndDescriptor),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutEnumeration {
    pub cuts: Vec<FiniteCut>,
    /// Set when the budget admits no candidate edges at all.
    pub budget_warning: bool,
}

/// Component pattern of `G_n - C` seen from `G_s`: labels of the vertices of
/// `G_s` and the growing flags of those labels.
fn pattern(u: &Universe, s: u32, n: u32, edges: &[EdgeId]) -> (Vec<u32>, Vec<bool>) {
    let comps = u.components(n, edges);
    let ns = u.vertex_count(s);
    let labels = comps.label[..ns].to_vec();
    let growing = labels.iter().map(|&l| comps.live.contains(l as usize)).collect();
    (labels, growing)
}

/// Certifies `edges` as a finite cut: the crossing set of a bipartition of
/// the explored graph whose component pattern is constant over a window.
pub fn certify(u: &Universe, edges: &[EdgeId]) -> Result<FiniteCut> {
    let mut edges = edges.to_vec();
    edges.sort();
    edges.dedup();
    let budget = u.budget();
    let conn = u.presentation().connectivity_level();
    if edges.is_empty() {
        return Ok(FiniteCut {
            edges,
            seed: u.root(),
            stabilization_level: conn,
        });
    }
    let region = budget.cut_region();
    if edges
        .iter()
        .any(|&e| e.index() >= u.edge_count(u.level()) || u.edge(e).level > region)
    {
        return Err(Error::Uncertified(edge_set_label(u, &edges)));
    }
    if !u.is_cut(&edges) {
        return Err(Error::Uncertified(edge_set_label(u, &edges)));
    }
    let birth = edges.iter().map(|&e| u.edge(e).level).max().unwrap_or(0);
    let mut s = birth.max(conn);
    while s + WINDOW <= budget.level {
        let base = pattern(u, s, s, &edges);
        if (s + 1..=s + WINDOW).all(|n| pattern(u, s, n, &edges) == base) {
            return Ok(FiniteCut {
                edges,
                seed: u.root(),
                stabilization_level: s,
            });
        }
        s += 1;
    }
    Err(Error::Uncertified(edge_set_label(u, &edges)))
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Cycle-space signatures: a set of edges is a cut iff its signatures XOR to
/// zero (up to hash collisions, which are ruled out by an exact check).
fn signatures(u: &Universe) -> Vec<u128> {
    let ne = u.edge_count(u.level());
    let nv = u.vertex_count(u.level());
    let mut sig = vec![0u128; ne];
    let mut acc = vec![0u128; nv];
    let mut is_tree = vec![false; ne];
    for &v in &u.bfs_order()[1..] {
        is_tree[u.tree_parent(v).unwrap().0.index()] = true;
    }
    for (i, e) in u.edges(u.level()).iter().enumerate() {
        if !is_tree[i] {
            let h = ((splitmix(2 * i as u64) as u128) << 64) | splitmix(2 * i as u64 + 1) as u128;
            sig[i] = h;
            acc[e.ends.0.index()] ^= h;
            acc[e.ends.1.index()] ^= h;
        }
    }
    for &v in u.bfs_order()[1..].iter().rev() {
        let (e, p) = u.tree_parent(v).unwrap();
        sig[e.index()] = acc[v.index()];
        acc[p.index()] ^= acc[v.index()];
    }
    sig
}

/// All certified cuts with at most `size` crossing edges inside the cut region.
pub fn enumerate_cuts(u: &Universe, size: usize) -> CutEnumeration {
    enumerate_cuts_with(u, size, Exec::default())
}

pub fn enumerate_cuts_with(u: &Universe, size: usize, exec: Exec) -> CutEnumeration {
    let region = u.budget().cut_region();
    let candidates: Vec<EdgeId> = (0..u.edge_count(region)).map(|i| EdgeId(i as u32)).collect();
    if candidates.is_empty() || size == 0 {
        return CutEnumeration {
            cuts: Vec::new(),
            budget_warning: true,
        };
    }
    let sig = signatures(u);
    let mut groups: HashMap<u128, Vec<EdgeId>> = HashMap::new();
    for &e in &candidates {
        groups.entry(sig[e.index()]).or_default().push(e);
    }

    let mut found: Vec<Vec<EdgeId>> = Vec::new();
    let mut prefix = Vec::with_capacity(size);
    for k in 1..=size {
        extend(&candidates, &sig, &groups, k, 0, 0, &mut prefix, &mut found);
    }
    found.sort();
    let certified = exec.map(&found, |edges| certify(u, edges).ok());
    let mut cuts: Vec<FiniteCut> = certified.into_iter().flatten().collect();
    cuts.sort();
    CutEnumeration {
        cuts,
        budget_warning: false,
    }
}

#[allow(clippy::too_many_arguments)]
fn extend(
    candidates: &[EdgeId],
    sig: &[u128],
    groups: &HashMap<u128, Vec<EdgeId>>,
    k: usize,
    start: usize,
    acc: u128,
    prefix: &mut Vec<EdgeId>,
    out: &mut Vec<Vec<EdgeId>>,
) {
    if prefix.len() + 1 == k {
        let last = prefix.last().copied();
        if let Some(group) = groups.get(&acc) {
            for &e in group {
                if last.is_none_or(|l| e > l) {
                    let mut set = prefix.clone();
                    set.push(e);
                    out.push(set);
                }
            }
        }
        return;
    }
    for i in start..candidates.len() {
        let e = candidates[i];
        prefix.push(e);
        extend(candidates, sig, groups, k, i + 1, acc ^ sig[e.index()], prefix, out);
        prefix.pop();
    }
}

/// Certification results shared across a sweep, keyed by edge set.
#[derive(Debug, Default)]
pub struct CertifyMemo {
    map: Mutex<HashMap<Vec<EdgeId>, Result<FiniteCut>>>,
}

impl CertifyMemo {
    pub fn certify(&self, u: &Universe, edges: &[EdgeId]) -> Result<FiniteCut> {
        let mut key = edges.to_vec();
        key.sort();
        key.dedup();
        if let Some(hit) = self.map.lock().unwrap().get(&key) {
            return hit.clone();
        }
        let result = certify(u, &key);
        self.map.lock().unwrap().insert(key, result.clone());
        result
    }

    pub fn cut_sum(&self, u: &Universe, c1: &FiniteCut, c2: &FiniteCut) -> Result<FiniteCut> {
        sum_with(u, c1, c2, |edges| self.certify(u, edges))
    }
}

/// Sum in the cut space: symmetric difference of crossing sets.
pub fn cut_sum(u: &Universe, c1: &FiniteCut, c2: &FiniteCut) -> Result<FiniteCut> {
    sum_with(u, c1, c2, |edges| certify(u, edges))
}

fn sum_with(
    u: &Universe,
    c1: &FiniteCut,
    c2: &FiniteCut,
    certify: impl FnOnce(&[EdgeId]) -> Result<FiniteCut>,
) -> Result<FiniteCut> {
    let mut sum = Vec::with_capacity(c1.edges.len() + c2.edges.len());
    let (mut i, mut j) = (0, 0);
    while i < c1.edges.len() || j < c2.edges.len() {
        match (c1.edges.get(i), c2.edges.get(j)) {
            (Some(a), Some(b)) if a == b => {
                i += 1;
                j += 1;
            }
            (Some(&a), Some(&b)) if a < b => {
                sum.push(a);
                i += 1;
            }
            (Some(_), Some(&b)) => {
                sum.push(b);
                j += 1;
            }
            (Some(&a), None) => {
                sum.push(a);
                i += 1;
            }
            (None, Some(&b)) => {
                sum.push(b);
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    certify(&sum).map_err(|_| {
        Error::Internal(format!(
            "sum of {} and {} failed revalidation",
            c1.label(u),
            c2.label(u)
        ))
    })
}

pub fn side_of_vertex<'a>(u: &Universe, c: &'a FiniteCut, v: VertexId) -> Result<SideAssignment<'a>> {
    if !u.contains_vertex(v) {
        return Err(Error::UnknownVertex(format!("#{}", v.0)));
    }
    Ok(SideAssignment {
        cut: c,
        side: Side::from_parity(u.parity(&c.edges, v)),
    })
}

/// Side of an end: stored when the cut is in its resolution, otherwise read
/// off the tail of its ray prefix.
pub fn side_of_end<'a>(u: &Universe, c: &'a FiniteCut, end: &EndDescriptor) -> Result<SideAssignment<'a>> {
    Ok(SideAssignment {
        cut: c,
        side: end.side_for(u, c)?,
    })
}

pub fn side_of_point(u: &Universe, c: &FiniteCut, p: Point<'_>) -> Result<Side> {
    match p {
        Point::Vertex(v) => side_of_vertex(u, c, v).map(|s| s.side),
        Point::End(end) => side_of_end(u, c, end).map(|s| s.side),
    }
}

pub fn separates(u: &Universe, c: &FiniteCut, p: Point<'_>, q: Point<'_>) -> Result<bool> {
    Ok(side_of_point(u, c, p)? != side_of_point(u, c, q)?)
}

/// Whether both sides of the cut induce connected subgraphs.
pub fn is_bond(u: &Universe, c: &FiniteCut) -> bool {
    !c.is_zero() && u.components(u.level(), &c.edges).ids().len() == 2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::preset;
    use crate::universe::Budget;

    fn universe(name: &str, level: u32, size: usize) -> Universe {
        Universe::new(&preset(name).unwrap(), Budget::new(level, size)).unwrap()
    }

    fn e(u: &Universe, name: &str) -> EdgeId {
        u.lookup_edge(name).unwrap()
    }

    #[test]
    fn ray_single_edges() {
        let u = universe("ray", 16, 1);
        let cuts = enumerate_cuts(&u, 1).cuts;
        assert_eq!(cuts.len(), 12);
        for (k, c) in cuts.iter().enumerate() {
            assert_eq!(c.edges(), &[EdgeId(k as u32)]);
        }
    }

    #[test]
    fn ladder_has_no_single_edge_cut() {
        let u = universe("ladder", 16, 1);
        assert!(enumerate_cuts(&u, 1).cuts.is_empty());
    }

    #[test]
    fn star_leaf_cuts() {
        let u = universe("star", 16, 1);
        let cuts = enumerate_cuts(&u, 1).cuts;
        assert_eq!(cuts.len(), 13);
    }

    #[test]
    fn broom_rejects_lone_handle_edge() {
        let u = universe("broom", 16, 2);
        let bad = e(&u, "E:v-t[n]@0");
        assert!(certify(&u, &[bad]).is_err());
        let good = [bad, e(&u, "E:t[n]-t[n+1]@0")];
        assert!(certify(&u, &good).is_ok());
    }

    #[test]
    fn ray_sum_sides() {
        let u = universe("ray", 16, 1);
        let c2 = certify(&u, &[e(&u, "E:v[n]-v[n+1]@2")]).unwrap();
        let c5 = certify(&u, &[e(&u, "E:v[n]-v[n+1]@5")]).unwrap();
        let s = cut_sum(&u, &c2, &c5).unwrap();
        let b: Vec<usize> = (0..10)
            .filter(|&k| {
                let v = u.lookup_vertex(&format!("v[{k}]")).unwrap();
                side_of_vertex(&u, &s, v).unwrap().side == Side::B
            })
            .collect();
        assert_eq!(b, vec![3, 4, 5]);
        assert!(cut_sum(&u, &c2, &c2).unwrap().is_zero());
    }

    #[test]
    fn ladder_rail_pair_separates() {
        let u = universe("ladder", 16, 2);
        let c = certify(&u, &[e(&u, "E:a[n]-a[n+1]@1"), e(&u, "E:b[n]-b[n+1]@1")]).unwrap();
        let a0 = u.lookup_vertex("a[0]").unwrap();
        let a4 = u.lookup_vertex("a[4]").unwrap();
        assert!(separates(&u, &c, Point::Vertex(a0), Point::Vertex(a4)).unwrap());
        assert!(is_bond(&u, &c));
    }
}
