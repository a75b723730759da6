//! Exhaustive law sweeps over families drawn from enumerated cuts.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use fixedbitset::FixedBitSet;

use crate::contraction::{build_ge, check_bonding, check_square_with, g_compare_memo, Comparison, ContractionGraph};
use crate::cutspace::{certify, CertifyMemo, FiniteCut};
use crate::ends::EndDescriptor;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::presentation::EdgeId;
use crate::quotient::{
    build_from_table, check_pair, check_phi, coordinates, project, side_table, LawReport, QuotientGraph,
};
use crate::universe::Universe;

/// All index subsets of `0..n` with at most `k` elements, in
/// lexicographic order by size then content.
pub fn subsets_up_to(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::new();
        for s in &layer {
            let start = s.last().map_or(0, |&l| l + 1);
            for i in start..n {
                let mut t = s.clone();
                t.push(i);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn merge(reports: Vec<LawReport>) -> LawReport {
    let mut all = LawReport::default();
    for r in reports {
        all.merge(r);
    }
    all
}

/// Self-inverse, identity, commutativity and associativity of the cut sum,
/// with every sum revalidated as a cut.
pub fn sweep_cut_space(u: &Universe, cuts: &[FiniteCut], exec: Exec) -> LawReport {
    let zero = certify(u, &[]).expect("zero cut");
    let memo = CertifyMemo::default();
    let indices: Vec<usize> = (0..cuts.len()).collect();
    let reports = exec.map(&indices, |&i| {
        let mut r = LawReport::default();
        let a = &cuts[i];
        let sum = |x: &FiniteCut, y: &FiniteCut| memo.cut_sum(u, x, y);
        r.check(sum(a, a).is_ok_and(|s| s.is_zero()), || {
            format!("{} ⊕ itself is not zero", a.label(u))
        });
        r.check(sum(a, &zero).is_ok_and(|s| &s == a), || {
            format!("{} ⊕ 0 differs", a.label(u))
        });
        for b in &cuts[i + 1..] {
            let ab = sum(a, b);
            let ba = sum(b, a);
            r.check(ab.is_ok() && ab == ba, || {
                format!("{} ⊕ {} not commutative", a.label(u), b.label(u))
            });
            if let Ok(ab) = &ab {
                r.check(u.is_cut(ab.edges()), || format!("{} fails revalidation", ab.label(u)));
            }
        }
        for j in i + 1..cuts.len() {
            let Ok(ab) = sum(a, &cuts[j]) else { continue };
            for c in &cuts[j + 1..] {
                let left = sum(&ab, c);
                let right = sum(&cuts[j], c).and_then(|bc| sum(a, &bc));
                r.check(left.is_ok() && left == right, || {
                    format!(
                        "associativity fails for {}, {}, {}",
                        a.label(u),
                        cuts[j].label(u),
                        c.label(u)
                    )
                });
            }
        }
        r
    });
    merge(reports)
}

fn quotient_of(
    u: &Universe,
    cuts: &[FiniteCut],
    table: &[FixedBitSet],
    chosen: &[usize],
    level: u32,
) -> Result<QuotientGraph> {
    let m: Vec<FiniteCut> = chosen.iter().map(|&i| cuts[i].clone()).collect();
    let t: Vec<FixedBitSet> = chosen.iter().map(|&i| table[i].clone()).collect();
    build_from_table(u, m, &t, level)
}

fn failure(e: Error) -> LawReport {
    LawReport {
        checked: 1,
        violations: vec![e.to_string()],
    }
}

/// Surjectivity and edge identity of the projection for every `M` with at
/// most `k` cuts.
pub fn sweep_phi(u: &Universe, cuts: &[FiniteCut], k: usize, exec: Exec) -> LawReport {
    let cuts = sorted(cuts);
    let level = u.budget().level;
    let table = side_table(u, &cuts, level);
    let family = subsets_up_to(cuts.len(), k);
    let reports = exec.map(&family, |s| match quotient_of(u, &cuts, &table, s, level) {
        Ok(q) => check_phi(u, &q),
        Err(e) => failure(e),
    });
    merge(reports)
}

fn sorted(cuts: &[FiniteCut]) -> Vec<FiniteCut> {
    let mut c = cuts.to_vec();
    c.sort();
    c.dedup();
    c
}

/// Triangle law and `ψ ∘ φ = φ` for every chain `M1 ⊆ M2 ⊆ M3` with
/// `|M3| ≤ k`. Each chain is checked when its top is visited: triangles for
/// all chains below the top, and the pair laws from the top to each subset.
pub fn sweep_inverse_system(
    u: &Universe,
    cuts: &[FiniteCut],
    k: usize,
    ends: &[EndDescriptor],
    exec: Exec,
) -> LawReport {
    let cuts = sorted(cuts);
    let level = u.budget().level;
    let table = side_table(u, &cuts, level);
    let tops = subsets_up_to(cuts.len(), k);
    let lower: Vec<Vec<usize>> = subsets_up_to(cuts.len(), k.saturating_sub(1));
    let built = exec.map(&lower, |s| quotient_of(u, &cuts, &table, s, level));
    let mut small: HashMap<&[usize], QuotientGraph> = HashMap::new();
    for (s, q) in lower.iter().zip(built) {
        match q {
            Ok(q) => {
                small.insert(s.as_slice(), q);
            }
            Err(e) => return failure(e),
        }
    }
    let reports = exec.map(&tops, |top| {
        let full = (1usize << top.len()) - 1;
        let own;
        let q3 = match small.get(top.as_slice()) {
            Some(q) => q,
            None => match quotient_of(u, &cuts, &table, top, level) {
                Ok(q) => {
                    own = q;
                    &own
                }
                Err(e) => return failure(e),
            },
        };
        let sub = |mask: usize| -> &QuotientGraph {
            if mask == full {
                return q3;
            }
            let chosen: Vec<usize> = (0..top.len())
                .filter(|b| mask & (1 << b) != 0)
                .map(|b| top[b])
                .collect();
            &small[chosen.as_slice()]
        };
        let qs: Vec<&QuotientGraph> = (0..=full).map(sub).collect();
        let mut r = LawReport::default();
        for m2 in 0..=full {
            r.merge(check_pair(u, q3, qs[m2], ends).unwrap_or_else(failure));
            let c32 = coordinates(q3.cuts(), qs[m2].cuts()).expect("nested");
            let mut m1 = m2;
            loop {
                let c31 = coordinates(q3.cuts(), qs[m1].cuts()).expect("nested");
                let c21 = coordinates(qs[m2].cuts(), qs[m1].cuts()).expect("nested");
                for w in q3.words() {
                    let mid = project(&c32, w);
                    let direct = project(&c31, w);
                    r.check(
                        direct == project(&c21, &mid) && qs[m1].word_index(&direct).is_some(),
                        || format!("triangle fails at {w} over bitmasks {full:b} ⊇ {m2:b} ⊇ {m1:b}"),
                    );
                }
                if m1 == 0 {
                    break;
                }
                m1 = (m1 - 1) & m2;
            }
        }
        r
    });
    merge(reports)
}

/// Unions of cuts with at most `max_edges` edges, plus the empty set.
pub fn union_family(cuts: &[FiniteCut], max_edges: usize) -> Vec<Vec<EdgeId>> {
    let base: BTreeSet<Vec<EdgeId>> = cuts
        .iter()
        .filter(|c| c.edges().len() <= max_edges)
        .map(|c| c.edges().to_vec())
        .collect();
    let mut family: BTreeSet<Vec<EdgeId>> = base.clone();
    family.insert(Vec::new());
    let mut fresh: Vec<Vec<EdgeId>> = base.iter().cloned().collect();
    while !fresh.is_empty() {
        let mut next = Vec::new();
        for s in &fresh {
            for c in &base {
                let mut un: Vec<EdgeId> = s.iter().chain(c).copied().collect();
                un.sort();
                un.dedup();
                if un.len() <= max_edges && family.insert(un.clone()) {
                    next.push(un);
                }
            }
        }
        fresh = next;
    }
    let mut out: Vec<Vec<EdgeId>> = family.into_iter().collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Members of `family` contained in `top`, by index.
fn below(index: &BTreeMap<Vec<EdgeId>, usize>, top: &[EdgeId]) -> Vec<usize> {
    let n = top.len();
    (0..1usize << n)
        .filter_map(|mask| {
            let s: Vec<EdgeId> = (0..n).filter(|b| mask & (1 << b) != 0).map(|b| top[b]).collect();
            index.get(&s).copied()
        })
        .collect()
}

/// `f_31 = f_21 ∘ f_32` on every nested triple of the family.
pub fn sweep_bonding(u: &Universe, family: &[Vec<EdgeId>], exec: Exec) -> LawReport {
    let level = u.budget().level;
    let graphs: Vec<Option<ContractionGraph>> = exec.map(family, |e| build_ge(u, e, level).ok());
    let index: BTreeMap<Vec<EdgeId>, usize> = family
        .iter()
        .enumerate()
        .filter(|(i, _)| graphs[*i].is_some())
        .map(|(i, e)| (e.clone(), i))
        .collect();
    let tops: Vec<usize> = index.values().copied().collect();
    let reports = exec.map(&tops, |&t| {
        let mut r = LawReport::default();
        let subs = below(&index, &family[t]);
        let g3 = graphs[t].as_ref().unwrap();
        for &m in &subs {
            let g2 = graphs[m].as_ref().unwrap();
            for &l in below(&index, &family[m]).iter() {
                let g1 = graphs[l].as_ref().unwrap();
                match check_bonding(u, [g1, g2, g3]) {
                    Ok(x) => r.merge(x),
                    Err(e) => r.check(false, || e.to_string()),
                }
            }
        }
        r
    });
    merge(reports)
}

/// The comparison square for every nested pair of the family.
pub fn sweep_square(u: &Universe, family: &[Vec<EdgeId>], exec: Exec) -> LawReport {
    let level = u.budget().level;
    let memo = CertifyMemo::default();
    let maps: Vec<Option<Comparison>> = exec.map(family, |e| g_compare_memo(u, e, level, &memo).ok());
    let index: BTreeMap<Vec<EdgeId>, usize> = family
        .iter()
        .enumerate()
        .filter(|(i, _)| maps[*i].is_some())
        .map(|(i, e)| (e.clone(), i))
        .collect();
    let tops: Vec<usize> = index.values().copied().collect();
    let reports = exec.map(&tops, |&t| {
        let mut r = LawReport::default();
        let g = maps[t].as_ref().unwrap();
        for s in below(&index, &family[t]) {
            match check_square_with(u, g, maps[s].as_ref().unwrap()) {
                Ok(x) => r.merge(x),
                Err(e) => r.check(false, || e.to_string()),
            }
        }
        r
    });
    merge(reports)
}
