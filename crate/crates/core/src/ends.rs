//! Edge-ends at finite resolution: star/comb witnesses, end detection,
//! identification classes, domination and basic closed sets.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use petgraph::unionfind::UnionFind;
use serde_json::{json, Value};

use crate::cutspace::{FiniteCut, Side};
use crate::error::{Error, Result};
use crate::presentation::VertexId;
use crate::quotient::{build_gm, canonical, phi_vertex};
use crate::universe::{ComponentId, Components, Universe};

/// Consecutive prefix vertices that must agree before a tail side is read off.
pub const TAIL_STEPS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Comb {
        spine: Vec<VertexId>,
        /// Each tooth starts on the spine and ends in the target set.
        teeth: Vec<Vec<VertexId>>,
    },
    Star {
        center: VertexId,
        leaves: Vec<Vec<VertexId>>,
    },
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndDescriptor {
    resolution: Vec<FiniteCut>,
    sides: Vec<Side>,
    ray_prefix: Vec<VertexId>,
    home_components: Vec<ComponentId>,
}

impl EndDescriptor {
    pub fn resolution(&self) -> &[FiniteCut] {
        &self.resolution
    }

    pub fn sides(&self) -> &[Side] {
        &self.sides
    }

    pub fn ray_prefix(&self) -> &[VertexId] {
        &self.ray_prefix
    }

    pub fn home_components(&self) -> &[ComponentId] {
        &self.home_components
    }

    /// Side of the tail for any certified cut.
    pub fn side_for(&self, u: &Universe, c: &FiniteCut) -> Result<Side> {
        if let Ok(i) = self.resolution.binary_search(c) {
            return Ok(self.sides[i]);
        }
        let tail = &self.ray_prefix[self.ray_prefix.len().saturating_sub(TAIL_STEPS)..];
        let mut sides = tail.iter().map(|&v| u.parity(c.edges(), v));
        let first = sides.next().unwrap_or(false);
        if tail.len() < TAIL_STEPS || sides.any(|s| s != first) {
            return Err(Error::Undetermined(c.label(u)));
        }
        Ok(Side::from_parity(first))
    }

    /// Component of `G - C` the end lives in.
    pub fn home_for(&self, u: &Universe, c: &FiniteCut, comps: &Components) -> ComponentId {
        match self.resolution.binary_search(c) {
            Ok(i) => self.home_components[i],
            Err(_) => comps.of(*self.ray_prefix.last().unwrap_or(&u.root())),
        }
    }

    pub fn to_json(&self, u: &Universe) -> Value {
        let sides: BTreeMap<String, String> = self
            .resolution
            .iter()
            .zip(&self.sides)
            .map(|(c, s)| (c.label(u), s.to_string()))
            .collect();
        json!({
            "sides": sides,
            "ray": self.ray_prefix.iter().map(|&v| u.vertex_name(v)).collect::<Vec<_>>(),
        })
    }
}

/// DFS tree of the vertices in `allowed`, neighbors taken in edge birth order.
struct SearchTree {
    order: Vec<VertexId>,
    parent: Vec<Option<VertexId>>,
    children: Vec<Vec<VertexId>>,
    has_u: Vec<bool>,
}

impl SearchTree {
    fn new(u: &Universe, allowed: &FixedBitSet, root: VertexId, in_u: &dyn Fn(VertexId) -> bool) -> SearchTree {
        let nv = allowed.len();
        let mut parent = vec![None; nv];
        let mut children = vec![Vec::new(); nv];
        let mut seen = FixedBitSet::with_capacity(nv);
        let mut order = vec![root];
        seen.insert(root.index());
        let mut stack = vec![(root, 0usize)];
        while let Some((v, next)) = stack.last_mut() {
            let v = *v;
            let nbrs = u.neighbors(v);
            if let Some(&(_, w)) = nbrs.get(*next) {
                *next += 1;
                if allowed.contains(w.index()) && !seen.put(w.index()) {
                    parent[w.index()] = Some(v);
                    children[v.index()].push(w);
                    order.push(w);
                    stack.push((w, 0));
                }
            } else {
                stack.pop();
            }
        }
        let mut has_u = vec![false; nv];
        for &v in order.iter().rev() {
            if in_u(v) {
                has_u[v.index()] = true;
            }
            if let Some(p) = parent[v.index()] {
                if has_u[v.index()] {
                    has_u[p.index()] = true;
                }
            }
        }
        SearchTree {
            order,
            parent,
            children,
            has_u,
        }
    }

    fn path_to_root(&self, mut v: VertexId) -> Vec<VertexId> {
        let mut path = vec![v];
        while let Some(p) = self.parent[v.index()] {
            path.push(p);
            v = p;
        }
        path.reverse();
        path
    }

    /// Descends from `start` (exclusive of `start` itself unless it is in U)
    /// through marked children until a vertex of U is reached.
    fn descend(&self, from: VertexId, first: VertexId, in_u: &dyn Fn(VertexId) -> bool) -> Vec<VertexId> {
        let mut path = vec![from, first];
        let mut v = first;
        while !in_u(v) {
            v = *self.children[v.index()]
                .iter()
                .find(|c| self.has_u[c.index()])
                .expect("marked vertex has a marked child or is in U");
            path.push(v);
        }
        path
    }
}

fn search(
    u: &Universe,
    allowed: &FixedBitSet,
    root: VertexId,
    in_u: &dyn Fn(VertexId) -> bool,
    threshold: usize,
) -> Witness {
    let level = u.level();
    let tree = SearchTree::new(u, allowed, root, in_u);
    let mut frontier: Vec<VertexId> = tree
        .order
        .iter()
        .copied()
        .filter(|&v| u.is_frontier(v, level))
        .collect();
    frontier.sort();

    for &f in &frontier {
        let spine = tree.path_to_root(f);
        if spine.len() < threshold {
            continue;
        }
        let mut teeth = Vec::new();
        for (i, &s) in spine.iter().enumerate() {
            if in_u(s) {
                teeth.push(vec![s]);
                continue;
            }
            let next = spine.get(i + 1).copied();
            if let Some(&c) = tree.children[s.index()]
                .iter()
                .find(|&&c| Some(c) != next && tree.has_u[c.index()])
            {
                teeth.push(tree.descend(s, c, in_u));
            }
        }
        if teeth.len() >= threshold {
            return Witness::Comb { spine, teeth };
        }
    }

    let mut centers: Vec<VertexId> = tree
        .order
        .iter()
        .copied()
        .filter(|&v| u.is_frontier(v, level))
        .collect();
    centers.sort();
    for x in centers {
        let marked: Vec<VertexId> = tree.children[x.index()]
            .iter()
            .copied()
            .filter(|c| tree.has_u[c.index()])
            .collect();
        if marked.len() >= threshold {
            let leaves = marked.into_iter().map(|c| tree.descend(x, c, in_u)).collect();
            return Witness::Star { center: x, leaves };
        }
    }
    Witness::Undetermined
}

/// Comb or star for the vertices of the explored graph satisfying `in_u`.
pub fn find_star_or_comb(u: &Universe, in_u: &dyn Fn(VertexId) -> bool) -> Result<Witness> {
    let nv = u.vertex_count(u.level());
    let threshold = u.budget().witness_threshold;
    let found = (0..nv).filter(|&v| in_u(VertexId(v as u32))).count();
    if found < threshold {
        return Err(Error::FiniteWithinBudget {
            found,
            needed: threshold,
        });
    }
    let mut all = FixedBitSet::with_capacity(nv);
    all.insert_range(..);
    Ok(search(u, &all, u.root(), in_u, threshold))
}

/// Structural validity: teeth and leaves disjoint away from the spine/center.
pub fn witness_is_valid(u: &Universe, w: &Witness, in_u: &dyn Fn(VertexId) -> bool) -> bool {
    let adjacent = |a: VertexId, b: VertexId| u.neighbors(a).iter().any(|&(_, x)| x == b);
    let is_path = |p: &[VertexId]| p.windows(2).all(|w| adjacent(w[0], w[1]));
    let threshold = u.budget().witness_threshold;
    match w {
        Witness::Comb { spine, teeth } => {
            let on_spine: std::collections::HashSet<_> = spine.iter().collect();
            let mut used = std::collections::HashSet::new();
            let spine_ok = is_path(spine)
                && on_spine.len() == spine.len()
                && spine.len() >= threshold
                && u.is_frontier(*spine.last().unwrap(), u.level());
            let teeth_ok = teeth.iter().all(|t| {
                is_path(t)
                    && on_spine.contains(&t[0])
                    && in_u(*t.last().unwrap())
                    && t[1..].iter().all(|v| !on_spine.contains(v) && used.insert(*v))
            });
            let starts: std::collections::HashSet<_> = teeth.iter().map(|t| t[0]).collect();
            spine_ok && teeth_ok && starts.len() == teeth.len() && teeth.len() >= threshold
        }
        Witness::Star { center, leaves } => {
            let mut used = std::collections::HashSet::new();
            leaves.len() >= threshold
                && leaves.iter().all(|l| {
                    is_path(l) && l[0] == *center && in_u(*l.last().unwrap()) && l[1..].iter().all(|v| used.insert(*v))
                })
        }
        Witness::Undetermined => true,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndDetection {
    pub ends: Vec<EndDescriptor>,
    /// Some growing part produced neither a comb nor a star.
    pub incomplete: bool,
}

/// Components of the subgraph induced on `fiber`, ordered by least vertex.
fn induced_components(u: &Universe, fiber: &FixedBitSet) -> Vec<FixedBitSet> {
    let level = u.level();
    let nv = u.vertex_count(level);
    let mut uf = UnionFind::<u32>::new(nv);
    for e in u.edges(level) {
        let (a, b) = (e.ends.0.index(), e.ends.1.index());
        if fiber.contains(a) && fiber.contains(b) {
            uf.union(a as u32, b as u32);
        }
    }
    let mut by_root: BTreeMap<u32, FixedBitSet> = BTreeMap::new();
    let mut first: BTreeMap<u32, u32> = BTreeMap::new();
    for v in fiber.ones() {
        let r = uf.find(v as u32);
        first.entry(r).or_insert(v as u32);
        by_root
            .entry(r)
            .or_insert_with(|| FixedBitSet::with_capacity(nv))
            .insert(v);
    }
    let mut comps: Vec<(u32, FixedBitSet)> = by_root.into_iter().map(|(r, b)| (first[&r], b)).collect();
    comps.sort_by_key(|c| c.0);
    comps.into_iter().map(|c| c.1).collect()
}

/// One end per word of the quotient at the exploration level whose parts
/// contain a ray.
pub fn detect_ends(u: &Universe, cuts: &[FiniteCut]) -> Result<EndDetection> {
    let m = canonical(cuts);
    let level = u.level();
    let threshold = u.budget().witness_threshold;
    let q = build_gm(u, &m, level)?;
    let comps: Vec<Components> = m.iter().map(|c| u.components(level, c.edges())).collect();
    let mut ends = Vec::new();
    let mut incomplete = false;
    for (i, word) in q.words().iter().enumerate() {
        let mut found = None;
        for part in induced_components(u, q.fiber(i)) {
            if !part.ones().any(|v| u.is_frontier(VertexId(v as u32), level)) {
                continue;
            }
            let root = VertexId(part.ones().next().unwrap() as u32);
            let in_part = |v: VertexId| part.contains(v.index());
            match search(u, &part, root, &in_part, threshold) {
                Witness::Comb { spine, .. } => {
                    found = Some(spine);
                    break;
                }
                Witness::Star { .. } => {}
                Witness::Undetermined => incomplete = true,
            }
        }
        if let Some(spine) = found {
            let last = *spine.last().unwrap();
            ends.push(EndDescriptor {
                resolution: m.clone(),
                sides: word.0.clone(),
                ray_prefix: spine,
                home_components: comps.iter().map(|c| c.of(last)).collect(),
            });
        }
    }
    Ok(EndDetection { ends, incomplete })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PointId {
    Vertex(VertexId),
    /// Index into the detected end list.
    End(usize),
}

impl PointId {
    pub fn render(&self, u: &Universe) -> String {
        match self {
            PointId::Vertex(v) => u.vertex_name(*v).to_string(),
            PointId::End(i) => end_name(*i),
        }
    }
}

pub fn end_name(i: usize) -> String {
    format!("ω{i}")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ItopClass {
    pub members: Vec<PointId>,
    pub tentative: bool,
}

/// Groups explored vertices and ends by their side word over `cuts`.
pub fn itop_classes(u: &Universe, cuts: &[FiniteCut], ends: &[EndDescriptor]) -> Result<Vec<ItopClass>> {
    let m = canonical(cuts);
    let mut groups: BTreeMap<Vec<Option<Side>>, (Vec<PointId>, bool)> = BTreeMap::new();
    for v in 0..u.vertex_count(u.budget().level) {
        let v = VertexId(v as u32);
        let word = phi_vertex(u, &m, v)?;
        let key = word.0.into_iter().map(Some).collect();
        groups.entry(key).or_default().0.push(PointId::Vertex(v));
    }
    for (i, end) in ends.iter().enumerate() {
        let mut tentative = false;
        let key: Vec<Option<Side>> = m
            .iter()
            .map(|c| match end.side_for(u, c) {
                Ok(s) => Some(s),
                Err(Error::Undetermined(_)) => {
                    tentative = true;
                    None
                }
                Err(_) => None,
            })
            .collect();
        let slot = groups.entry(key).or_default();
        slot.0.push(PointId::End(i));
        slot.1 |= tentative;
    }
    let mut classes: Vec<ItopClass> = groups
        .into_values()
        .map(|(members, tentative)| ItopClass { members, tentative })
        .collect();
    classes.sort_by(|a, b| a.members[0].cmp(&b.members[0]));
    Ok(classes)
}

/// `v` lies on the end's side of every cut of its resolution.
pub fn dominates(u: &Universe, v: VertexId, end: &EndDescriptor) -> Result<bool> {
    if !u.contains_vertex(v) {
        return Err(Error::UnknownVertex(format!("#{}", v.0)));
    }
    Ok(end
        .resolution
        .iter()
        .zip(&end.sides)
        .all(|(c, &s)| Side::from_parity(u.parity(c.edges(), v)) == s))
}

/// Vertices born before the last level of the cut region that dominate
/// `end`. Later vertices cannot be split off by any cut in budget.
pub fn dominators(u: &Universe, end: &EndDescriptor) -> Vec<VertexId> {
    let reach = u.budget().cut_region().saturating_sub(1);
    (0..u.vertex_count(reach))
        .map(|v| VertexId(v as u32))
        .filter(|&v| dominates(u, v, end).unwrap_or(false))
        .collect()
}

/// A basic closed set: the closure of one component of `G - C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasicClosed {
    pub cut: FiniteCut,
    pub component: VertexId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Intersection {
    Point(PointId),
    /// Indices of a minimal subfamily with empty intersection.
    Empty {
        certificate: Vec<usize>,
    },
}

/// Membership of explored vertices and ends in each basic closed set.
pub fn closed_set_members(
    u: &Universe,
    family: &[BasicClosed],
    ends: &[EndDescriptor],
) -> Result<(Vec<PointId>, Vec<FixedBitSet>)> {
    let nv = u.vertex_count(u.budget().level);
    let mut points: Vec<PointId> = (0..nv).map(|v| PointId::Vertex(VertexId(v as u32))).collect();
    points.extend((0..ends.len()).map(PointId::End));
    let sets = family
        .iter()
        .map(|b| {
            if !u.contains_vertex(b.component) {
                return Err(Error::UnknownVertex(format!("#{}", b.component.0)));
            }
            let comps = u.components(u.level(), b.cut.edges());
            let home = comps.of(b.component);
            let mut bits = FixedBitSet::with_capacity(points.len());
            for v in 0..nv {
                if comps.label[v] == home.representative.0 {
                    bits.insert(v);
                }
            }
            for (i, end) in ends.iter().enumerate() {
                if end.home_for(u, &b.cut, &comps) == home {
                    bits.insert(nv + i);
                }
            }
            Ok(bits)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((points, sets))
}

pub fn intersect_basic_closed(u: &Universe, family: &[BasicClosed], ends: &[EndDescriptor]) -> Result<Intersection> {
    let (points, sets) = closed_set_members(u, family, ends)?;
    let mut common = FixedBitSet::with_capacity(points.len());
    common.insert_range(..);
    for s in &sets {
        common.intersect_with(s);
    }
    let nv = u.vertex_count(u.budget().level);
    if let Some(i) = common.ones().find(|&i| i >= nv).or_else(|| common.ones().next()) {
        return Ok(Intersection::Point(points[i]));
    }
    for k in 1..=sets.len() {
        if let Some(cert) = first_empty_subfamily(&sets, k, points.len()) {
            return Ok(Intersection::Empty { certificate: cert });
        }
    }
    Err(Error::Internal("empty intersection without certificate".into()))
}

fn first_empty_subfamily(sets: &[FixedBitSet], k: usize, n: usize) -> Option<Vec<usize>> {
    fn rec(sets: &[FixedBitSet], k: usize, start: usize, acc: &FixedBitSet, chosen: &mut Vec<usize>) -> bool {
        if chosen.len() == k {
            return acc.is_clear();
        }
        for i in start..sets.len() {
            let mut next = acc.clone();
            next.intersect_with(&sets[i]);
            chosen.push(i);
            if rec(sets, k, i + 1, &next, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    let mut all = FixedBitSet::with_capacity(n);
    all.insert_range(..);
    let mut chosen = Vec::new();
    rec(sets, k, 0, &all, &mut chosen).then_some(chosen)
}
