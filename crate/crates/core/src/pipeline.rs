//! The end-to-end verification run behind the `verify` command.

use std::path::PathBuf;

use serde_json::{json, Map, Value};

use crate::cutspace::{enumerate_cuts_with, is_bond, FiniteCut};
use crate::ends::{detect_ends, dominators, end_name, itop_classes, EndDescriptor};
use crate::error::Result;
use crate::exec::Exec;
use crate::export::Format;
use crate::laws::{sweep_bonding, sweep_cut_space, sweep_inverse_system, sweep_phi, sweep_square, union_family};
use crate::presentation::{GraphPresentation, VertexId};
use crate::quotient::LawReport;
use crate::tree::{build_tree_tower, check_consistency, check_coverage, verify_no_circle};
use crate::universe::{Budget, Universe};

/// Violations kept per check in a report.
const MAX_LISTED: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub level_budget: u32,
    pub cut_size_budget: usize,
    pub witness_threshold: usize,
    /// Law sweeps draw from this many leading enumerated cuts.
    pub chain_cut_limit: usize,
    /// Contraction sweeps take unions of this many leading cuts.
    pub family_cut_limit: usize,
    pub cache_dir: Option<PathBuf>,
    pub output_format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        let b = Budget::default();
        RunConfig {
            level_budget: b.level,
            cut_size_budget: b.cut_size,
            witness_threshold: b.witness_threshold,
            chain_cut_limit: 24,
            family_cut_limit: 12,
            cache_dir: None,
            output_format: Format::Json,
        }
    }
}

/// Level and cut-size budgets under which each preset verifies in seconds.
pub fn profile(preset: &str) -> Option<(u32, usize)> {
    match preset {
        "ray" | "ladder" | "star" => Some((16, 2)),
        "double_ray" => Some((10, 2)),
        "broom" => Some((16, 3)),
        "bintree" => Some((8, 1)),
        _ => None,
    }
}

impl RunConfig {
    pub fn for_preset(name: &str) -> RunConfig {
        let mut c = RunConfig::default();
        if let Some((level, size)) = profile(name) {
            c.level_budget = level;
            c.cut_size_budget = size;
        }
        c
    }

    pub fn budget(&self) -> Budget {
        Budget {
            level: self.level_budget,
            cut_size: self.cut_size_budget,
            witness_threshold: self.witness_threshold,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Verification {
    pub passed: bool,
    pub report: Value,
}

fn summary(r: &LawReport) -> Value {
    json!({
        "passed": r.passed(),
        "checked": r.checked,
        "violation_count": r.violations.len(),
        "violations": r.violations.iter().take(MAX_LISTED).collect::<Vec<_>>(),
    })
}

/// Explored vertices whose next-level incident edges are already final.
fn check_frontier(u: &Universe) -> LawReport {
    let mut r = LawReport::default();
    let top = u.level();
    for n in 0..u.budget().level {
        for v in 0..u.vertex_count(n) {
            let v = VertexId(v as u32);
            if u.is_frontier(v, n) {
                continue;
            }
            let late = u
                .neighbors(v)
                .iter()
                .any(|&(e, _)| u.edge(e).level > n && u.edge(e).level <= top);
            r.check(!late, || format!("{} gains edges after level {n}", u.vertex_name(v)));
        }
    }
    r
}

/// Each end sits on its recorded side of every cut, home component included.
fn check_end_consistency(u: &Universe, ends: &[EndDescriptor]) -> LawReport {
    let mut r = LawReport::default();
    for (k, end) in ends.iter().enumerate() {
        for ((c, &side), home) in end.resolution().iter().zip(end.sides()).zip(end.home_components()) {
            let comps = u.components(u.level(), c.edges());
            let members = (0..u.vertex_count(u.level())).filter(|&v| comps.label[v] == home.representative.0);
            let on_side = members
                .clone()
                .all(|v| crate::Side::from_parity(u.parity(c.edges(), VertexId(v as u32))) == side);
            r.check(on_side && home.live, || {
                format!("{} strays from its side of {}", end_name(k), c.label(u))
            });
        }
    }
    r
}

pub fn run_verify(pres: &GraphPresentation, config: &RunConfig, exec: Exec) -> Result<Verification> {
    let u = Universe::new(pres, config.budget())?;
    let enumeration = enumerate_cuts_with(&u, config.cut_size_budget, exec);
    let cuts = &enumeration.cuts;
    let lead: Vec<FiniteCut> = cuts.iter().take(config.chain_cut_limit).cloned().collect();
    let detection = detect_ends(&u, cuts)?;
    let ends = &detection.ends;

    let mut checks = Map::new();
    checks.insert("frontier".into(), summary(&check_frontier(&u)));
    let mut valid = LawReport::default();
    for c in cuts {
        valid.check(u.is_cut(c.edges()) && !c.is_zero(), || {
            format!("{} is not a cut", c.label(&u))
        });
    }
    checks.insert("cut_validity".into(), summary(&valid));
    checks.insert("cut_space".into(), summary(&sweep_cut_space(&u, &lead, exec)));
    checks.insert("projection".into(), summary(&sweep_phi(&u, &lead, 3, exec)));
    checks.insert(
        "inverse_system".into(),
        summary(&sweep_inverse_system(&u, &lead, 3, ends, exec)),
    );
    let family = union_family(&cuts[..cuts.len().min(config.family_cut_limit)], 4);
    checks.insert("bonding".into(), summary(&sweep_bonding(&u, &family, exec)));
    checks.insert("comparison_square".into(), summary(&sweep_square(&u, &family, exec)));
    checks.insert("end_consistency".into(), summary(&check_end_consistency(&u, ends)));

    let classes = itop_classes(&u, cuts, ends)?;
    let class_json: Vec<Value> = classes
        .iter()
        .map(|c| {
            json!({
                "members": c.members.iter().map(|p| p.render(&u)).collect::<Vec<_>>(),
                "tentative": c.tentative,
            })
        })
        .collect();

    let mut end_json = Vec::new();
    for (k, end) in ends.iter().enumerate() {
        let dominators: Vec<&str> = dominators(&u, end).into_iter().map(|v| u.vertex_name(v)).collect();
        end_json.push(json!({
            "name": end_name(k),
            "ray": end.ray_prefix().iter().map(|&v| u.vertex_name(v)).collect::<Vec<_>>(),
            "dominated_by": dominators,
        }));
    }

    let sequence: Vec<FiniteCut> = cuts.iter().filter(|c| is_bond(&u, c)).take(3).cloned().collect();
    let tower = build_tree_tower(&u, &sequence, sequence.len())?;
    let consistency = check_consistency(&u, &tower);
    let coverage = check_coverage(&u, &tower);
    let single = verify_no_circle(&u, &tower);
    checks.insert("tree_consistency".into(), summary(&consistency));
    checks.insert("tree_coverage".into(), summary(&coverage));
    checks.insert("tree_single_crossing".into(), summary(&single));

    let passed = checks.values().all(|c| c["passed"] == Value::Bool(true)) && !detection.incomplete;
    let report = json!({
        "presentation": pres.name(),
        "config": {
            "level_budget": config.level_budget,
            "cut_size_budget": config.cut_size_budget,
            "witness_threshold": config.witness_threshold,
            "chain_cut_limit": config.chain_cut_limit,
            "family_cut_limit": config.family_cut_limit,
        },
        "cuts": {
            "count": cuts.len(),
            "budget_warning": enumeration.budget_warning,
        },
        "ends": {
            "count": ends.len(),
            "incomplete": detection.incomplete,
            "list": end_json,
        },
        "classes": class_json,
        "tower": tower.to_json(&u),
        "checks": Value::Object(checks),
        "passed": passed,
    });
    Ok(Verification { passed, report })
}
