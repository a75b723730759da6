use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde_json::{json, Value};

use endspace::contraction::build_ge;
use endspace::cutspace::{certify, enumerate_cuts_with, is_bond};
use endspace::ends::{detect_ends, dominators, end_name, itop_classes};
use endspace::export::{contraction_dot, json_string, quotient_dot, tower_dots};
use endspace::pipeline::{run_verify, RunConfig};
use endspace::quotient::build_gm;
use endspace::tree::{build_tree_tower, tower_report};
use endspace::{parse_presentation, preset, EdgeId, Exec, FiniteCut, GraphPresentation, Universe};

use crate::{Command, Global, Object, OutputFormat};

/// Rendered result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub files: BTreeMap<String, String>,
    pub code: u8,
}

impl Output {
    fn new(stdout: String) -> Output {
        Output {
            stdout,
            files: BTreeMap::new(),
            code: 0,
        }
    }
}

pub enum Source {
    Preset(String),
    File { text: String },
}

impl Source {
    pub fn resolve(arg: &str) -> Result<Source, String> {
        if let Some(path) = arg.strip_prefix("file:") {
            let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
            return Ok(Source::File { text });
        }
        if preset(arg).is_ok() {
            return Ok(Source::Preset(arg.to_string()));
        }
        if Path::new(arg).is_file() {
            let text = std::fs::read_to_string(arg).map_err(|e| format!("cannot read {arg}: {e}"))?;
            return Ok(Source::File { text });
        }
        Err(preset(arg).unwrap_err().to_string())
    }

    /// Stable identity for cache keys.
    pub fn identity(&self) -> String {
        match self {
            Source::Preset(name) => format!("preset:{name}"),
            Source::File { text } => format!("file:{text}"),
        }
    }

    fn presentation(&self) -> Result<GraphPresentation, String> {
        match self {
            Source::Preset(name) => preset(name),
            Source::File { text } => parse_presentation(text),
        }
        .map_err(|e| e.to_string())
    }
}

pub fn pres_arg(c: &Command) -> &str {
    match c {
        Command::Parse { pres, .. }
        | Command::Cuts { pres }
        | Command::Quotient { pres, .. }
        | Command::Contract { pres, .. }
        | Command::Ends { pres }
        | Command::Classes { pres }
        | Command::Tree { pres, .. }
        | Command::Verify { pres }
        | Command::Export { pres, .. } => pres,
    }
}

pub fn resolved_config(source: &Source, g: &Global) -> RunConfig {
    let mut c = match source {
        Source::Preset(name) => RunConfig::for_preset(name),
        Source::File { .. } => RunConfig::default(),
    };
    if let Some(l) = g.level {
        c.level_budget = l;
    }
    if let Some(s) = g.size {
        c.cut_size_budget = s;
    }
    if let Some(t) = g.threshold {
        c.witness_threshold = t;
    }
    c
}

struct Ctx {
    pres: GraphPresentation,
    config: RunConfig,
    exec: Exec,
    format: OutputFormat,
}

impl Ctx {
    fn universe(&self) -> Result<Universe, String> {
        Universe::new(&self.pres, self.config.budget()).map_err(|e| e.to_string())
    }

    fn all_cuts(&self, u: &Universe) -> Vec<FiniteCut> {
        enumerate_cuts_with(u, self.config.cut_size_budget, self.exec).cuts
    }
}

fn render(format: OutputFormat, what: &str, json: Value, text: impl FnOnce() -> String) -> Result<String, String> {
    match format {
        OutputFormat::Json => Ok(json_string(&json)),
        OutputFormat::Text => Ok(text()),
        OutputFormat::Dot => Err(format!("{what} has no DOT rendering")),
    }
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty())
}

/// Cuts given as enumeration indices or as `&`-joined edge names.
fn resolve_cuts(ctx: &Ctx, u: &Universe, list: &str) -> Result<Vec<FiniteCut>, String> {
    let mut listed: Option<Vec<FiniteCut>> = None;
    split_list(list)
        .map(|tok| {
            if let Ok(i) = tok.parse::<usize>() {
                let all = listed.get_or_insert_with(|| ctx.all_cuts(u));
                all.get(i)
                    .cloned()
                    .ok_or_else(|| format!("cut index {i} out of range ({} cuts)", all.len()))
            } else {
                let edges = tok
                    .split('&')
                    .map(|n| u.lookup_edge(n.trim()))
                    .collect::<endspace::Result<Vec<EdgeId>>>()
                    .map_err(|e| e.to_string())?;
                certify(u, &edges).map_err(|e| e.to_string())
            }
        })
        .collect()
}

/// Edges given by name, or every edge of an enumerated cut by index.
fn resolve_edges(ctx: &Ctx, u: &Universe, list: &str) -> Result<Vec<EdgeId>, String> {
    let mut out = Vec::new();
    let mut listed: Option<Vec<FiniteCut>> = None;
    for tok in split_list(list) {
        if let Ok(i) = tok.parse::<usize>() {
            let all = listed.get_or_insert_with(|| ctx.all_cuts(u));
            let c = all
                .get(i)
                .ok_or_else(|| format!("cut index {i} out of range ({} cuts)", all.len()))?;
            out.extend_from_slice(c.edges());
        } else {
            out.push(u.lookup_edge(tok).map_err(|e| e.to_string())?);
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn dot_path(pattern: &Path, j: usize) -> String {
    let s = pattern.to_string_lossy();
    if s.contains("{j}") {
        return s.replace("{j}", &j.to_string());
    }
    match s.rsplit_once('.') {
        Some((stem, ext)) if !ext.contains('/') => match stem.strip_suffix("_j") {
            Some(base) => format!("{base}_{j}.{ext}"),
            None => format!("{stem}_{j}.{ext}"),
        },
        _ => format!("{s}_{j}"),
    }
}

pub fn run(source: &Source, global: &Global, command: &Command) -> Result<Output, String> {
    let pres = source.presentation()?;
    let ctx = Ctx {
        pres,
        config: resolved_config(source, global),
        exec: if global.sequential {
            Exec::Sequential
        } else {
            Exec::default()
        },
        format: global.format,
    };
    match command {
        Command::Parse { truncate, .. } => parse(&ctx, *truncate),
        Command::Cuts { .. } => cuts(&ctx),
        Command::Quotient { cuts, dot, .. } => {
            let (json, dotted, text) = quotient(&ctx, cuts)?;
            let mut out = Output::new(match ctx.format {
                OutputFormat::Dot => dotted.clone(),
                OutputFormat::Json => json_string(&json),
                OutputFormat::Text => text,
            });
            if let Some(p) = dot {
                out.files.insert(p.to_string_lossy().into_owned(), dotted);
            }
            Ok(out)
        }
        Command::Contract { edges, dot, .. } => {
            let (json, dotted, text) = contract(&ctx, edges)?;
            let mut out = Output::new(match ctx.format {
                OutputFormat::Dot => dotted.clone(),
                OutputFormat::Json => json_string(&json),
                OutputFormat::Text => text,
            });
            if let Some(p) = dot {
                out.files.insert(p.to_string_lossy().into_owned(), dotted);
            }
            Ok(out)
        }
        Command::Ends { .. } => ends(&ctx),
        Command::Classes { .. } => classes(&ctx),
        Command::Tree { cuts, depth, dot, .. } => tree(&ctx, cuts, *depth, dot.as_deref()),
        Command::Verify { .. } => verify(&ctx),
        Command::Export {
            object,
            cuts,
            edges,
            out,
            ..
        } => export(&ctx, *object, cuts, edges, out.as_deref()),
    }
}

fn parse(ctx: &Ctx, truncate: Option<u32>) -> Result<Output, String> {
    let p = &ctx.pres;
    let mut json = json!({
        "name": p.name(),
        "statics": p.statics(),
        "layered": p.layered(),
        "edge_templates": p.edge_templates().iter().map(|t| t.label.clone()).collect::<Vec<_>>(),
        "connectivity_level": p.connectivity_level(),
        "programmatic": p.is_programmatic(),
    });
    if let Some(n) = truncate {
        let t = p.truncate(n);
        json["truncation"] = json!({
            "level": t.level,
            "vertices": t.vertices,
            "edges": t.edges.iter().map(|(e, a, b)| json!({"edge": e, "from": a, "to": b})).collect::<Vec<_>>(),
            "frontier": t.frontier,
        });
    }
    let mut text = format!("{} (connected from level {})\n", p.name(), p.connectivity_level());
    if let Some(t) = json.get("truncation") {
        let count = |k: &str| t[k].as_array().map_or(0, Vec::len);
        let (v, e, f) = (count("vertices"), count("edges"), count("frontier"));
        writeln!(text, "level {}: {v} vertices, {e} edges, frontier {f}", t["level"]).unwrap();
    }
    Ok(Output::new(render(ctx.format, "parse", json, || text)?))
}

fn cuts(ctx: &Ctx) -> Result<Output, String> {
    let u = ctx.universe()?;
    let e = enumerate_cuts_with(&u, ctx.config.cut_size_budget, ctx.exec);
    let list: Vec<Value> = e
        .cuts
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut v = c.to_json(&u);
            v["id"] = json!(i);
            v
        })
        .collect();
    let json = json!({"cuts": list, "budget_warning": e.budget_warning});
    let text = || {
        let mut s = String::new();
        for (i, c) in e.cuts.iter().enumerate() {
            writeln!(s, "{i}\t{}\tstable from {}", c.label(&u), c.stabilization_level()).unwrap();
        }
        s
    };
    Ok(Output::new(render(ctx.format, "cuts", json.clone(), text)?))
}

fn quotient(ctx: &Ctx, list: &str) -> Result<(Value, String, String), String> {
    let u = ctx.universe()?;
    let m = resolve_cuts(ctx, &u, list)?;
    let q = build_gm(&u, &m, ctx.config.level_budget).map_err(|e| e.to_string())?;
    let mut text = format!("{} words, {} cross edges\n", q.words().len(), q.cross_edges().len());
    for (i, w) in q.words().iter().enumerate() {
        writeln!(text, "{w}\tloops {}", q.loops(i).annotation()).unwrap();
    }
    Ok((q.to_json(&u), quotient_dot(&u, &q), text))
}

fn contract(ctx: &Ctx, list: &str) -> Result<(Value, String, String), String> {
    let u = ctx.universe()?;
    let edges = resolve_edges(ctx, &u, list)?;
    let g = build_ge(&u, &edges, ctx.config.level_budget).map_err(|e| e.to_string())?;
    let mut text = format!("{} vertices, {} edges\n", g.vertices().len(), g.edges().len());
    for c in g.vertices() {
        writeln!(
            text,
            "{}{}",
            u.vertex_name(c.representative),
            if c.live { "\tlive" } else { "" }
        )
        .unwrap();
    }
    Ok((g.to_json(&u), contraction_dot(&u, &g), text))
}

fn ends(ctx: &Ctx) -> Result<Output, String> {
    let u = ctx.universe()?;
    let cuts = ctx.all_cuts(&u);
    let d = detect_ends(&u, &cuts).map_err(|e| e.to_string())?;
    let list: Vec<Value> = d
        .ends
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let mut v = e.to_json(&u);
            v["name"] = json!(end_name(k));
            let dom: Vec<&str> = dominators(&u, e).into_iter().map(|x| u.vertex_name(x)).collect();
            v["dominated_by"] = json!(dom);
            v
        })
        .collect();
    let text = || {
        let mut s = String::new();
        for v in &list {
            let ray: Vec<&str> = v["ray"]
                .as_array()
                .unwrap()
                .iter()
                .take(6)
                .filter_map(Value::as_str)
                .collect();
            writeln!(s, "{}\tray {} ...", v["name"].as_str().unwrap(), ray.join(" ")).unwrap();
        }
        s
    };
    let json = json!({"count": d.ends.len(), "incomplete": d.incomplete, "ends": list.clone()});
    Ok(Output::new(render(ctx.format, "ends", json, text)?))
}

fn classes(ctx: &Ctx) -> Result<Output, String> {
    let u = ctx.universe()?;
    let cuts = ctx.all_cuts(&u);
    let ends = detect_ends(&u, &cuts).map_err(|e| e.to_string())?.ends;
    let cl = itop_classes(&u, &cuts, &ends).map_err(|e| e.to_string())?;
    let list: Vec<Value> = cl
        .iter()
        .map(|c| json!({"members": c.members.iter().map(|p| p.render(&u)).collect::<Vec<_>>(), "tentative": c.tentative}))
        .collect();
    let text = || {
        let mut s = String::new();
        for c in &cl {
            let names: Vec<String> = c.members.iter().map(|p| p.render(&u)).collect();
            writeln!(s, "{{{}}}{}", names.join(", "), if c.tentative { " ?" } else { "" }).unwrap();
        }
        s
    };
    Ok(Output::new(render(
        ctx.format,
        "classes",
        json!({"classes": list}),
        text,
    )?))
}

fn tower_for(ctx: &Ctx, u: &Universe, list: &str, depth: Option<usize>) -> Result<endspace::tree::TreeTower, String> {
    let seq = if list.trim().is_empty() {
        ctx.all_cuts(u).into_iter().filter(|c| is_bond(u, c)).take(3).collect()
    } else {
        resolve_cuts(ctx, u, list)?
    };
    build_tree_tower(u, &seq, depth.unwrap_or(seq.len())).map_err(|e| e.to_string())
}

fn tree(ctx: &Ctx, list: &str, depth: Option<usize>, dot: Option<&Path>) -> Result<Output, String> {
    let u = ctx.universe()?;
    let t = tower_for(ctx, &u, list, depth)?;
    let mut report = tower_report(&u, &t);
    let passed = ["consistency", "coverage", "single_crossing"]
        .iter()
        .all(|k| report[*k] == json!(true));
    report["tower"] = t.to_json(&u);
    let dots = tower_dots(&u, &t);
    let stdout = match ctx.format {
        OutputFormat::Json => json_string(&report),
        OutputFormat::Dot => dots.concat(),
        OutputFormat::Text => {
            let mut s = String::new();
            for (j, tr) in t.trees.iter().enumerate() {
                let names: Vec<&str> = tr.iter().map(|&e| u.edge_name(e)).collect();
                writeln!(s, "T{j}: {}", names.join(" ")).unwrap();
            }
            for k in ["consistency", "coverage", "single_crossing"] {
                writeln!(s, "{k}: {}", if report[k] == json!(true) { "pass" } else { "FAIL" }).unwrap();
            }
            s
        }
    };
    let mut out = Output::new(stdout);
    if let Some(p) = dot {
        for (j, d) in dots.into_iter().enumerate() {
            out.files.insert(dot_path(p, j), d);
        }
    }
    out.code = if passed { 0 } else { 1 };
    Ok(out)
}

fn verify(ctx: &Ctx) -> Result<Output, String> {
    let v = run_verify(&ctx.pres, &ctx.config, ctx.exec).map_err(|e| e.to_string())?;
    let text = || {
        let mut s = String::new();
        for (name, c) in v.report["checks"].as_object().unwrap() {
            let ok = c["passed"] == json!(true);
            writeln!(
                s,
                "{name}: {} ({} checked)",
                if ok { "pass" } else { "FAIL" },
                c["checked"]
            )
            .unwrap();
        }
        writeln!(
            s,
            "{}",
            if v.passed {
                "all checks pass"
            } else {
                "verification failed"
            }
        )
        .unwrap();
        s
    };
    let mut out = Output::new(render(ctx.format, "verify", v.report.clone(), text)?);
    out.code = if v.passed { 0 } else { 1 };
    Ok(out)
}

fn export(ctx: &Ctx, object: Object, cuts: &str, edges: &str, out: Option<&Path>) -> Result<Output, String> {
    let mut files = BTreeMap::new();
    let body = match object {
        Object::Quotient | Object::Contraction => {
            let (json, dotted, text) = if object == Object::Quotient {
                quotient(ctx, cuts)?
            } else {
                contract(ctx, edges)?
            };
            match ctx.format {
                OutputFormat::Json => json_string(&json),
                OutputFormat::Dot => dotted,
                OutputFormat::Text => text,
            }
        }
        Object::Tower => {
            let u = ctx.universe()?;
            let t = tower_for(ctx, &u, cuts, None)?;
            match (ctx.format, out) {
                (OutputFormat::Dot, Some(p)) => {
                    for (j, d) in tower_dots(&u, &t).into_iter().enumerate() {
                        files.insert(dot_path(p, j), d);
                    }
                    return Ok(Output {
                        stdout: String::new(),
                        files,
                        code: 0,
                    });
                }
                (OutputFormat::Dot, None) => tower_dots(&u, &t).concat(),
                (OutputFormat::Json, _) => json_string(&t.to_json(&u)),
                (OutputFormat::Text, _) => t.trees.iter().enumerate().fold(String::new(), |mut s, (j, tr)| {
                    let names: Vec<&str> = tr.iter().map(|&e| u.edge_name(e)).collect();
                    writeln!(s, "T{j}: {}", names.join(" ")).unwrap();
                    s
                }),
            }
        }
    };
    match out {
        Some(p) => {
            files.insert(p.to_string_lossy().into_owned(), body);
            Ok(Output {
                stdout: String::new(),
                files,
                code: 0,
            })
        }
        None => Ok(Output::new(body)),
    }
}
