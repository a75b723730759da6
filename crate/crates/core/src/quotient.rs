//! Quotient multigraphs over finite cut sets and their bonding maps.

use std::fmt;

use fixedbitset::FixedBitSet;
use serde_json::{json, Value};

use crate::cutspace::{side_of_end, FiniteCut, Side};
use crate::ends::EndDescriptor;
use crate::error::{Error, Result};
use crate::presentation::{EdgeId, VertexId, WINDOW};
use crate::universe::Universe;

/// One side per cut, in the canonical order of the cut set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<Side>);

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        for s in &self.0 {
            write!(f, "{}", s.letter())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoopRecord {
    pub count_at_level: usize,
    pub unbounded: bool,
}

impl LoopRecord {
    pub fn annotation(&self) -> String {
        if self.unbounded {
            "ω".to_string()
        } else {
            self.count_at_level.to_string()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrossEdge {
    pub edge: EdgeId,
    pub from: usize,
    pub to: usize,
}

#[derive(Debug, Clone)]
pub struct QuotientGraph {
    cuts: Vec<FiniteCut>,
    words: Vec<Word>,
    fibers: Vec<FixedBitSet>,
    vertex_word: Vec<usize>,
    cross_edges: Vec<CrossEdge>,
    loops: Vec<LoopRecord>,
    level_used: u32,
}

/// Sorted, duplicate-free copy of a cut set; the zero cut is dropped since
/// it induces no split.
pub fn canonical(cuts: &[FiniteCut]) -> Vec<FiniteCut> {
    let mut m: Vec<FiniteCut> = cuts.iter().filter(|c| !c.is_zero()).cloned().collect();
    m.sort();
    m.dedup();
    m
}

/// Side-B membership of every vertex of `G_level`, one bitset per cut.
pub fn side_table(u: &Universe, cuts: &[FiniteCut], level: u32) -> Vec<FixedBitSet> {
    let nv = u.vertex_count(level);
    cuts.iter()
        .map(|c| {
            let mut bits = FixedBitSet::with_capacity(nv);
            for v in 0..nv {
                if u.parity(c.edges(), VertexId(v as u32)) {
                    bits.insert(v);
                }
            }
            bits
        })
        .collect()
}

fn check_level(u: &Universe, cuts: &[FiniteCut], level: u32) -> Result<()> {
    let needed = cuts
        .iter()
        .map(|c| c.stabilization_level() + WINDOW)
        .max()
        .unwrap_or(0)
        .max(u.presentation().connectivity_level());
    if level < needed {
        return Err(Error::InsufficientLevel { needed, given: level });
    }
    if level > u.level() {
        return Err(Error::InsufficientLevel {
            needed: level,
            given: u.level(),
        });
    }
    Ok(())
}

pub fn build_gm(u: &Universe, cuts: &[FiniteCut], level: u32) -> Result<QuotientGraph> {
    let m = canonical(cuts);
    check_level(u, &m, level)?;
    let table = side_table(u, &m, level);
    build_from_table(u, m, &table, level)
}

/// Builds the quotient by successive bitset refinement; `table[i]` is the
/// side-B set of `m[i]` at `level`.
pub fn build_from_table(u: &Universe, m: Vec<FiniteCut>, table: &[FixedBitSet], level: u32) -> Result<QuotientGraph> {
    let nv = u.vertex_count(level);
    let mut all = FixedBitSet::with_capacity(nv);
    all.insert_range(..);
    let mut blocks = vec![(Vec::new(), all)];
    for b_side in table {
        let mut next = Vec::with_capacity(blocks.len() * 2);
        for (word, block) in blocks {
            let mut on_b = block.clone();
            on_b.intersect_with(b_side);
            let mut on_a = block;
            on_a.difference_with(b_side);
            for (side, part) in [(Side::A, on_a), (Side::B, on_b)] {
                if !part.is_clear() {
                    let mut w: Vec<Side> = word.clone();
                    w.push(side);
                    next.push((w, part));
                }
            }
        }
        blocks = next;
    }
    blocks.sort_by(|x, y| x.0.cmp(&y.0));
    let mut vertex_word = vec![usize::MAX; nv];
    for (i, (_, block)) in blocks.iter().enumerate() {
        for v in block.ones() {
            vertex_word[v] = i;
        }
    }

    let mut cross_edges = Vec::new();
    let lo = level.saturating_sub(WINDOW);
    let mut counts = vec![vec![0usize; (level - lo + 1) as usize]; blocks.len()];
    for (i, e) in u.edges(level).iter().enumerate() {
        let (a, b) = (vertex_word[e.ends.0.index()], vertex_word[e.ends.1.index()]);
        if a != b {
            let id = EdgeId(i as u32);
            if !m.iter().any(|c| c.contains(id)) {
                return Err(Error::Internal(format!(
                    "cross edge {} lies in no cut",
                    u.edge_name(id)
                )));
            }
            cross_edges.push(CrossEdge {
                edge: id,
                from: a.min(b),
                to: a.max(b),
            });
        } else {
            for l in e.level.max(lo)..=level {
                counts[a][(l - lo) as usize] += 1;
            }
        }
    }
    let loops = counts
        .iter()
        .map(|c| LoopRecord {
            count_at_level: *c.last().unwrap(),
            unbounded: c.len() > 1 && c.windows(2).all(|w| w[0] < w[1]),
        })
        .collect();

    let (words, fibers) = blocks.into_iter().map(|(w, b)| (Word(w), b)).unzip();
    Ok(QuotientGraph {
        cuts: m,
        words,
        fibers,
        vertex_word,
        cross_edges,
        loops,
        level_used: level,
    })
}

impl QuotientGraph {
    pub fn cuts(&self) -> &[FiniteCut] {
        &self.cuts
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn fiber(&self, w: usize) -> &FixedBitSet {
        &self.fibers[w]
    }

    pub fn cross_edges(&self) -> &[CrossEdge] {
        &self.cross_edges
    }

    pub fn loops(&self, w: usize) -> LoopRecord {
        self.loops[w]
    }

    pub fn level_used(&self) -> u32 {
        self.level_used
    }

    pub fn word_index(&self, w: &Word) -> Option<usize> {
        self.words.binary_search(w).ok()
    }

    /// Word index of the block containing `v`, as found by refinement.
    pub fn block_of(&self, v: VertexId) -> Option<usize> {
        self.vertex_word.get(v.index()).copied()
    }

    pub fn to_json(&self, u: &Universe) -> Value {
        let words: Vec<Value> = self
            .words
            .iter()
            .enumerate()
            .map(|(i, w)| {
                json!({
                    "word": w.to_string(),
                    "fiber_size": self.fibers[i].count_ones(..),
                    "loops": self.loops[i].count_at_level,
                    "unbounded": self.loops[i].unbounded,
                })
            })
            .collect();
        let cross: Vec<Value> = self
            .cross_edges
            .iter()
            .map(|c| {
                json!({
                    "edge": u.edge_name(c.edge),
                    "from": self.words[c.from].to_string(),
                    "to": self.words[c.to].to_string(),
                })
            })
            .collect();
        json!({
            "cuts": self.cuts.iter().map(|c| c.to_json(u)).collect::<Vec<_>>(),
            "words": words,
            "cross_edges": cross,
            "level_used": self.level_used,
        })
    }
}

/// Image of a point under the projection onto a quotient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Image {
    Word(Word),
    Edge(EdgeId),
}

/// Coordinatewise side membership of a vertex, by path parity.
pub fn phi_vertex(u: &Universe, cuts: &[FiniteCut], v: VertexId) -> Result<Word> {
    if !u.contains_vertex(v) {
        return Err(Error::UnknownVertex(format!("#{}", v.0)));
    }
    Ok(Word(
        cuts.iter().map(|c| Side::from_parity(u.parity(c.edges(), v))).collect(),
    ))
}

pub fn phi_end(u: &Universe, cuts: &[FiniteCut], end: &EndDescriptor) -> Result<Word> {
    cuts.iter()
        .map(|c| side_of_end(u, c, end).map(|s| s.side))
        .collect::<Result<Vec<_>>>()
        .map(Word)
}

pub fn phi_edge(u: &Universe, e: EdgeId) -> Result<EdgeId> {
    if e.index() >= u.edge_count(u.level()) {
        return Err(Error::UnknownEdge(format!("#{}", e.0)));
    }
    Ok(e)
}

/// Coordinates of `sub` inside `sup`.
pub fn coordinates(sup: &[FiniteCut], sub: &[FiniteCut]) -> Result<Vec<usize>> {
    sub.iter()
        .map(|c| {
            sup.binary_search(c).map_err(|_| {
                Error::NotNested(format!(
                    "cut with {} edges missing from the larger set",
                    c.edges().len()
                ))
            })
        })
        .collect()
}

/// Bonding map on words: projection onto the coordinates of the smaller set.
pub fn psi(sup: &[FiniteCut], sub: &[FiniteCut], w: &Word) -> Result<Word> {
    let sup = canonical(sup);
    let sub = canonical(sub);
    let coords = coordinates(&sup, &sub)?;
    Ok(project(&coords, w))
}

pub fn project(coords: &[usize], w: &Word) -> Word {
    Word(coords.iter().map(|&i| w.0[i]).collect())
}

/// Bonding map by fiber containment: the word of `sub` whose fiber contains
/// the fiber of word `w` of `sup`.
pub fn psi_by_fiber(sup: &QuotientGraph, sub: &QuotientGraph, w: usize) -> Option<usize> {
    (0..sub.words.len()).find(|&i| sup.fibers[w].is_subset(&sub.fibers[i]))
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LawReport {
    pub checked: usize,
    pub violations: Vec<String>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn merge(&mut self, other: LawReport) {
        self.checked += other.checked;
        self.violations.extend(other.violations);
    }

    pub fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.violations.push(what());
        }
    }
}

/// Surjectivity of the vertex projection and identity on edges.
pub fn check_phi(u: &Universe, q: &QuotientGraph) -> LawReport {
    let mut report = LawReport::default();
    let nv = u.vertex_count(q.level_used);
    let mut hit = vec![false; q.words.len()];
    for v in 0..nv {
        let v = VertexId(v as u32);
        let w = phi_vertex(u, &q.cuts, v).expect("vertex in universe");
        match q.word_index(&w) {
            Some(i) => {
                hit[i] = true;
                report.check(q.block_of(v) == Some(i), || {
                    format!("{} lands in word {w} but its block differs", u.vertex_name(v))
                });
            }
            None => report.check(false, || format!("{} maps to unrealized word {w}", u.vertex_name(v))),
        }
    }
    for (i, h) in hit.iter().enumerate() {
        report.check(*h, || format!("word {} not hit", q.words[i]));
    }
    for i in 0..u.edge_count(q.level_used) {
        let e = EdgeId(i as u32);
        report.check(phi_edge(u, e).ok() == Some(e), || {
            format!("edge {} moved", u.edge_name(e))
        });
    }
    report
}

/// Bonding law checks for one nested pair, both routes against each other.
pub fn check_pair(u: &Universe, sup: &QuotientGraph, sub: &QuotientGraph, ends: &[EndDescriptor]) -> Result<LawReport> {
    let coords = coordinates(&sup.cuts, &sub.cuts)?;
    let mut report = LawReport::default();
    for (i, w) in sup.words.iter().enumerate() {
        let proj = project(&coords, w);
        let by_fiber = psi_by_fiber(sup, sub, i).map(|j| &sub.words[j]);
        report.check(by_fiber == Some(&proj), || {
            format!("word {w}: projection {proj} but fiber lies in {by_fiber:?}")
        });
    }
    for v in 0..u.vertex_count(sup.level_used.min(sub.level_used)) {
        let v = VertexId(v as u32);
        let agrees = sup.block_of(v).is_some_and(|i| {
            let w = &sup.words[i].0;
            coords
                .iter()
                .zip(&sub.cuts)
                .all(|(&k, c)| w[k] == Side::from_parity(u.parity(c.edges(), v)))
        });
        report.check(agrees, || format!("ψ∘φ ≠ φ at {}", u.vertex_name(v)));
    }
    for (k, end) in ends.iter().enumerate() {
        let (Ok(big), Ok(small)) = (phi_end(u, &sup.cuts, end), phi_end(u, &sub.cuts, end)) else {
            continue;
        };
        report.check(project(&coords, &big) == small, || format!("ψ∘φ ≠ φ at end {k}"));
    }
    Ok(report)
}

/// Triangle and projection laws along a chain `m1 ⊆ m2 ⊆ m3`.
pub fn check_inverse_system(u: &Universe, chain: [&[FiniteCut]; 3], ends: &[EndDescriptor]) -> Result<LawReport> {
    let level = u.budget().level;
    let q: Vec<QuotientGraph> = chain.iter().map(|m| build_gm(u, m, level)).collect::<Result<_>>()?;
    check_chain(u, [&q[0], &q[1], &q[2]], ends)
}

pub fn check_chain(u: &Universe, q: [&QuotientGraph; 3], ends: &[EndDescriptor]) -> Result<LawReport> {
    let c31 = coordinates(&q[2].cuts, &q[0].cuts)?;
    let c32 = coordinates(&q[2].cuts, &q[1].cuts)?;
    let c21 = coordinates(&q[1].cuts, &q[0].cuts)?;
    let mut report = LawReport::default();
    for w in &q[2].words {
        let direct = project(&c31, w);
        let mid = project(&c32, w);
        let composed = project(&c21, &mid);
        report.check(direct == composed, || format!("triangle fails at {w}"));
        report.check(q[1].word_index(&mid).is_some(), || format!("{mid} unrealized"));
        report.check(q[0].word_index(&direct).is_some(), || format!("{direct} unrealized"));
    }
    report.merge(check_pair(u, q[2], q[1], ends)?);
    report.merge(check_pair(u, q[1], q[0], ends)?);
    report.merge(check_pair(u, q[2], q[0], ends)?);
    Ok(report)
}
