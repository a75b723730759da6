//! Acceptance suite: one line per criterion, non-zero exit on any failure.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use common::{vid, Graph};
use endspace::cutspace::{certify, cut_sum, enumerate_cuts};
use endspace::ends::{
    detect_ends, dominates, intersect_basic_closed, itop_classes, BasicClosed, EndDescriptor, Intersection, PointId,
};
use endspace::export::json_string;
use endspace::laws::{sweep_bonding, sweep_cut_space, sweep_inverse_system, sweep_phi, sweep_square, union_family};
use endspace::pipeline::{profile, run_verify, RunConfig};
use endspace::presentation::PRESET_NAMES;
use endspace::quotient::build_gm;
use endspace::tree::{build_tree_tower, check_consistency, check_coverage, verify_no_circle};
use endspace::{Budget, EdgeId, Exec, FiniteCut, Side, Universe};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn universe(name: &str, level: u32, size: usize) -> Universe {
    Universe::new(&endspace::preset(name).unwrap(), Budget::new(level, size)).unwrap()
}

fn profiled(name: &str) -> (Universe, Vec<FiniteCut>) {
    let (level, size) = profile(name).unwrap();
    let u = universe(name, level, size);
    let cuts = enumerate_cuts(&u, size).cuts;
    (u, cuts)
}

fn broom_end_and_domination() -> Outcome {
    let u = universe("broom", 16, 2);
    let cuts = enumerate_cuts(&u, 2).cuts;
    let ends = detect_ends(&u, &cuts).map_err(|e| e.to_string())?.ends;
    ensure(ends.len() == 1, || format!("{} ends", ends.len()))?;
    let v = u.lookup_vertex("v").unwrap();
    ensure(dominates(&u, v, &ends[0]).unwrap(), || "v does not dominate".into())?;
    let classes = itop_classes(&u, &cuts, &ends).unwrap();
    let with_v = classes
        .iter()
        .find(|c| c.members.contains(&PointId::Vertex(v)))
        .unwrap();
    ensure(with_v.members.contains(&PointId::End(0)), || {
        "v and the end apart".into()
    })?;
    Ok(format!(
        "1 end over {} cuts, v dominates, class of v holds the end",
        cuts.len()
    ))
}

fn end_counts() -> Outcome {
    let mut seen = Vec::new();
    for (name, expected) in [("ray", 1), ("double_ray", 2), ("ladder", 1), ("star", 0)] {
        let u = universe(name, 16, 2);
        let cuts = enumerate_cuts(&u, 2).cuts;
        let d = detect_ends(&u, &cuts).unwrap();
        ensure(d.ends.len() == expected && !d.incomplete, || {
            format!("{name}: {} ends (incomplete {})", d.ends.len(), d.incomplete)
        })?;
        seen.push(format!("{name}={}", d.ends.len()));
    }
    let (u, cuts) = profiled("bintree");
    let found = detect_ends(&u, &cuts).unwrap().ends.len();
    let p = endspace::preset("bintree").unwrap();
    let g = Graph::at(&p, 16);
    let all: BTreeSet<EdgeId> = cuts.iter().flat_map(|c| c.edges().iter().copied()).collect();
    let all: Vec<EdgeId> = all.into_iter().collect();
    let comp = g.components(&all);
    let live: BTreeSet<usize> = common::frontier(&p, 16).into_iter().map(|v| comp[v]).collect();
    ensure(found == live.len(), || {
        format!("bintree: {found} ends, oracle {}", live.len())
    })?;
    seen.push(format!("bintree={found}"));
    Ok(seen.join(" "))
}

fn projection_laws() -> Outcome {
    let mut checked = 0;
    for name in PRESET_NAMES {
        let (u, cuts) = profiled(name);
        let r = sweep_phi(&u, &cuts, 3, Exec::default());
        ensure(r.passed(), || {
            format!("{name}: {:?}", &r.violations[..r.violations.len().min(3)])
        })?;
        checked += r.checked;
        // Oracle: realized words of every pair against BFS colourings.
        let g = Graph::at(u.presentation(), u.budget().level);
        let colours: Vec<Vec<bool>> = cuts.iter().map(|c| g.two_colour(c.edges()).unwrap()).collect();
        for i in 0..cuts.len() {
            for j in i..cuts.len() {
                let m = [cuts[i].clone(), cuts[j].clone()];
                let q = build_gm(&u, &m, u.budget().level).unwrap();
                let mut words: Vec<String> = q.words().iter().map(|w| w.to_string()).collect();
                words.sort();
                let pair: BTreeSet<String> = (0..g.n)
                    .map(|v| {
                        let s = |c: &Vec<bool>| if c[v] { 'B' } else { 'A' };
                        if i == j {
                            s(&colours[i]).to_string()
                        } else {
                            format!("{}{}", s(&colours[i]), s(&colours[j]))
                        }
                    })
                    .collect();
                let oracle: Vec<String> = pair.into_iter().collect();
                ensure(words == oracle, || format!("{name}: words {words:?} vs {oracle:?}"))?;
            }
        }
    }
    Ok(format!("{checked} checks over all M with at most 3 cuts"))
}

fn inverse_system_laws() -> Outcome {
    let mut checked = 0;
    for name in PRESET_NAMES {
        let (u, cuts) = profiled(name);
        let ends = detect_ends(&u, &cuts).unwrap().ends;
        let r = sweep_inverse_system(&u, &cuts, 3, &ends, Exec::default());
        ensure(r.passed(), || {
            format!("{name}: {:?}", &r.violations[..r.violations.len().min(3)])
        })?;
        checked += r.checked;
    }
    Ok(format!("{checked} checks over all chains with |M3| at most 3"))
}

fn bonding_laws() -> Outcome {
    let mut checked = 0;
    for name in PRESET_NAMES {
        let (u, cuts) = profiled(name);
        let family = union_family(&cuts, 4);
        let r = sweep_bonding(&u, &family, Exec::default());
        ensure(r.passed() && r.checked > 0, || {
            format!("{name}: {:?}", r.violations.first())
        })?;
        checked += r.checked;
    }
    Ok(format!(
        "{checked} element checks over nested triples with |E3| at most 4"
    ))
}

fn comparison_square() -> Outcome {
    let mut checked = 0;
    for name in ["ray", "ladder", "broom"] {
        let (u, cuts) = profiled(name);
        let family = union_family(&cuts, 4);
        let r = sweep_square(&u, &family, Exec::default());
        ensure(r.passed() && r.checked > 0, || {
            format!("{name}: {:?}", r.violations.first())
        })?;
        checked += r.checked;
    }
    Ok(format!("{checked} square checks"))
}

/// Members of a basic closed set, recomputed by BFS.
fn oracle_members(g: &Graph, shown: usize, b: &BasicClosed, ends: &[EndDescriptor]) -> BTreeSet<PointId> {
    let comp = g.components(b.cut.edges());
    let home = comp[b.component.index()];
    let mut out: BTreeSet<PointId> = (0..shown)
        .filter(|&v| comp[v] == home)
        .map(|v| PointId::Vertex(vid(v)))
        .collect();
    for (i, e) in ends.iter().enumerate() {
        if comp[e.ray_prefix().last().unwrap().index()] == home {
            out.insert(PointId::End(i));
        }
    }
    out
}

fn finite_intersection() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let (mut hits, mut empties) = (0, 0);
    for name in PRESET_NAMES {
        let (u, cuts) = profiled(name);
        let ends = detect_ends(&u, &cuts).unwrap().ends;
        let g = Graph::at(u.presentation(), u.level());
        let shown = u.vertex_count(u.budget().level);
        for _ in 0..50 {
            let size = rng.random_range(1..=5);
            let family: Vec<BasicClosed> = (0..size)
                .map(|_| BasicClosed {
                    cut: cuts[rng.random_range(0..cuts.len())].clone(),
                    component: vid(rng.random_range(0..shown)),
                })
                .collect();
            let sets: Vec<BTreeSet<PointId>> = family.iter().map(|b| oracle_members(&g, shown, b, &ends)).collect();
            let meet = |idx: &[usize]| -> BTreeSet<PointId> {
                let mut acc = sets[idx[0]].clone();
                for &i in &idx[1..] {
                    acc = acc.intersection(&sets[i]).copied().collect();
                }
                acc
            };
            let all: Vec<usize> = (0..size).collect();
            let common = meet(&all);
            match intersect_basic_closed(&u, &family, &ends).unwrap() {
                Intersection::Point(p) => {
                    ensure(common.contains(&p), || format!("{name}: witness {p:?} not common"))?;
                    hits += 1;
                }
                Intersection::Empty { certificate } => {
                    ensure(common.is_empty(), || {
                        format!("{name}: empty verdict but {common:?} common")
                    })?;
                    ensure(!certificate.is_empty() && meet(&certificate).is_empty(), || {
                        format!("{name}: certificate {certificate:?} intersects")
                    })?;
                    let pair_exists = (0..size).any(|i| (i + 1..size).any(|j| meet(&[i, j]).is_empty()));
                    ensure(!pair_exists || certificate.len() <= 2, || {
                        format!("{name}: certificate {certificate:?} larger than a disjoint pair")
                    })?;
                    empties += 1;
                }
            }
        }
    }
    Ok(format!("{hits} witnesses, {empties} empty verdicts with certificates"))
}

fn tree_certificates() -> Outcome {
    let mut towers = 0;
    let by_names = |u: &Universe, sets: &[&[&str]]| -> Vec<FiniteCut> {
        sets.iter()
            .map(|names| {
                let edges: Vec<EdgeId> = names.iter().map(|n| u.lookup_edge(n).unwrap()).collect();
                certify(u, &edges).unwrap()
            })
            .collect()
    };
    let ray = universe("ray", 16, 2);
    let ladder = universe("ladder", 16, 2);
    let broom = universe("broom", 16, 3);
    let cases: Vec<(&str, &Universe, Vec<FiniteCut>)> = vec![
        (
            "ray",
            &ray,
            by_names(
                &ray,
                &[&["E:v[n]-v[n+1]@2"], &["E:v[n]-v[n+1]@5"], &["E:v[n]-v[n+1]@8"]],
            ),
        ),
        (
            "ladder",
            &ladder,
            by_names(
                &ladder,
                &[
                    &["E:a[n]-a[n+1]@1", "E:b[n]-b[n+1]@1"],
                    &["E:a[n]-a[n+1]@4", "E:b[n]-b[n+1]@4"],
                    &["E:a[n]-a[n+1]@7", "E:b[n]-b[n+1]@7"],
                ],
            ),
        ),
        (
            "broom",
            &broom,
            by_names(
                &broom,
                &[
                    &["E:v-t[n]@0", "E:t[n]-t[n+1]@0"],
                    &["E:v-b[n]@0", "E:b[n]-b[n+1]@0"],
                    &["E:t[n]-t[n+1]@0", "E:v-t[n]@1", "E:t[n]-t[n+1]@1"],
                ],
            ),
        ),
    ];
    for (name, u, seq) in cases {
        let orders = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        for order in orders {
            let s: Vec<FiniteCut> = order.iter().map(|&i| seq[i].clone()).collect();
            let t = build_tree_tower(u, &s, 3).map_err(|e| format!("{name}: {e}"))?;
            for (what, r) in [
                ("consistency", check_consistency(u, &t)),
                ("coverage", check_coverage(u, &t)),
                ("single crossing", verify_no_circle(u, &t)),
            ] {
                ensure(r.passed(), || format!("{name} {order:?} {what}: {:?}", r.violations))?;
            }
            towers += 1;
        }
        let t = build_tree_tower(u, &seq, 3).unwrap();
        let mut swapped = t.clone();
        let region = u.edges(u.budget().cut_region());
        let extra = t
            .crossings(1)
            .into_iter()
            .chain((0..region.len()).map(|i| EdgeId(i as u32)))
            .find(|e| !t.trees[1].contains(e))
            .unwrap();
        swapped.trees[1][0] = extra;
        swapped.trees[1].sort();
        ensure(!check_consistency(u, &swapped).passed(), || {
            format!("{name}: swap undetected")
        })?;
        let mut doubled = t.clone();
        let extra = t.crossings(0).into_iter().find(|e| !t.trees[0].contains(e));
        if let Some(extra) = extra {
            doubled.trees[0].push(extra);
            doubled.trees[0].sort();
            doubled.refresh_limit();
            ensure(!verify_no_circle(u, &doubled).passed(), || {
                format!("{name}: double crossing undetected")
            })?;
        }
    }
    Ok(format!("{towers} towers certified, corrupted towers rejected"))
}

fn cut_space_algebra() -> Outcome {
    let mut checked = 0;
    for name in PRESET_NAMES {
        let level = if name == "bintree" { 6 } else { profile(name).unwrap().0 };
        let u = universe(name, level, 2);
        let cuts = enumerate_cuts(&u, 2).cuts;
        let r = sweep_cut_space(&u, &cuts, Exec::default());
        ensure(r.passed(), || format!("{name}: {:?}", r.violations.first()))?;
        checked += r.checked;
        let g = Graph::at(u.presentation(), u.level());
        for i in 0..cuts.len() {
            for j in i + 1..cuts.len() {
                let s = cut_sum(&u, &cuts[i], &cuts[j]).map_err(|e| e.to_string())?;
                let colour = g.two_colour(s.edges());
                ensure(colour.is_some(), || format!("{name}: {} not a cut", s.label(&u)))?;
                let (a, b) = (
                    g.two_colour(cuts[i].edges()).unwrap(),
                    g.two_colour(cuts[j].edges()).unwrap(),
                );
                let xor: Vec<bool> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
                ensure(colour.unwrap() == xor, || {
                    format!("{name}: sides of {} are not the XOR", s.label(&u))
                })?;
                let side = |v: usize| endspace::cutspace::side_of_vertex(&u, &s, vid(v)).unwrap().side;
                ensure((0..g.n).all(|v| (side(v) == Side::B) == xor[v]), || {
                    format!("{name}: side oracle differs")
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} checks"))
}

fn determinism() -> Outcome {
    for name in PRESET_NAMES {
        let p = endspace::preset(name).unwrap();
        let config = RunConfig::for_preset(name);
        let a = run_verify(&p, &config, Exec::default()).map_err(|e| e.to_string())?;
        let b = run_verify(&p, &config, Exec::default()).map_err(|e| e.to_string())?;
        ensure(a.passed, || format!("{name}: verify failed"))?;
        ensure(json_string(&a.report) == json_string(&b.report), || {
            format!("{name}: reports differ")
        })?;
    }
    Ok("byte-identical verify reports for every preset".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("broom has one end dominated by v", broom_end_and_domination),
        ("end counts per preset", end_counts),
        ("projection surjective, identity on edges", projection_laws),
        ("quotient inverse system laws", inverse_system_laws),
        ("contraction bonding functoriality", bonding_laws),
        ("comparison square commutes", comparison_square),
        ("finite intersection property", finite_intersection),
        ("spanning tree tower certificates", tree_certificates),
        ("cut space GF(2) algebra", cut_space_algebra),
        ("verify determinism", determinism),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {title} ({detail}) [{secs:.2}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {title}: {why} [{secs:.2}s]", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
