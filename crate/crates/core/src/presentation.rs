//! Finite descriptions of infinite graphs.
//!
//! A presentation generates an exhaustion `G_0 ⊆ G_1 ⊆ …` of finite
//! truncations. Layered presentations come from the `.igp` DSL: static
//! vertex templates exist once, layered templates are instantiated at every
//! layer `n`, and edge templates join two references at layer offsets `0`
//! or `+1`. Two presets (`bintree`, `double_ray`) are programmatic because
//! their layers are not uniform.
//!
//! Vertex and edge identifiers are assigned in birth order, so the ids of
//! `G_n` are a prefix of the ids of `G_{n+1}`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::error::{Error, Result};

/// Hard limit for the connectivity search at parse time.
pub const CONNECTIVITY_LIMIT: u32 = 64;
/// Number of consecutive levels a property must hold to count as stable.
pub const WINDOW: u32 = 4;

pub const PRESET_NAMES: [&str; 6] = ["ray", "double_ray", "ladder", "star", "broom", "bintree"];

const RAY_SRC: &str = "graph ray { layer n: v; edges: v[n]-v[n+1]; }";
const LADDER_SRC: &str = "graph ladder { layer n: a, b; edges: a[n]-b[n], a[n]-a[n+1], b[n]-b[n+1]; }";
const STAR_SRC: &str = "graph star { static c; layer n: l; edges: c-l[n]; }";
const BROOM_SRC: &str = "graph broom { static v; layer n: t, b; edges: t[n]-t[n+1], b[n]-b[n+1], v-t[n], v-b[n]; }";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct VertexId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EdgeId(pub u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EdgeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TemplateRef {
    Static(usize),
    Layered { template: usize, offset: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeTemplate {
    pub left: TemplateRef,
    pub right: TemplateRef,
    /// Rendered `REF-REF`, with a `#k` suffix for repeated templates.
    pub label: String,
}

impl EdgeTemplate {
    fn touches_layers(&self) -> bool {
        matches!(self.left, TemplateRef::Layered { .. }) || matches!(self.right, TemplateRef::Layered { .. })
    }

    fn has_forward_offset(&self) -> bool {
        [self.left, self.right]
            .iter()
            .any(|r| matches!(r, TemplateRef::Layered { offset: 1, .. }))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Templates {
    statics: Vec<String>,
    layered: Vec<String>,
    edges: Vec<EdgeTemplate>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Program {
    BinaryTree,
    DoubleRay,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Body {
    Templates(Templates),
    Program(Program),
}

/// Vertices and edges born at one level.
#[derive(Debug, Default)]
struct Layer {
    vertices: Vec<String>,
    edges: Vec<(String, String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphPresentation {
    name: String,
    body: Body,
    connectivity_level: u32,
}

impl GraphPresentation {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn connectivity_level(&self) -> u32 {
        self.connectivity_level
    }

    pub fn is_programmatic(&self) -> bool {
        matches!(self.body, Body::Program(_))
    }

    pub fn statics(&self) -> &[String] {
        match &self.body {
            Body::Templates(t) => &t.statics,
            Body::Program(_) => &[],
        }
    }

    pub fn layered(&self) -> &[String] {
        match &self.body {
            Body::Templates(t) => &t.layered,
            Body::Program(_) => &[],
        }
    }

    pub fn edge_templates(&self) -> &[EdgeTemplate] {
        match &self.body {
            Body::Templates(t) => &t.edges,
            Body::Program(_) => &[],
        }
    }

    /// True when no edge template involves a layered vertex.
    pub fn is_finite(&self) -> bool {
        match &self.body {
            Body::Templates(t) => t.layered.is_empty() || !t.edges.iter().any(|e| e.touches_layers()),
            Body::Program(_) => false,
        }
    }

    /// Name of the designated root: the first static vertex, else the first
    /// layered template at layer 0. It always receives id 0.
    pub fn root_name(&self) -> String {
        match &self.body {
            Body::Templates(t) => match t.statics.first() {
                Some(s) => s.clone(),
                None => format!("{}[0]", t.layered[0]),
            },
            Body::Program(Program::BinaryTree) => "t[0,0]".to_string(),
            Body::Program(Program::DoubleRay) => "l[0]".to_string(),
        }
    }

    fn layer(&self, k: u32) -> Layer {
        match &self.body {
            Body::Templates(t) => template_layer(t, k),
            Body::Program(Program::BinaryTree) => {
                let width = 1u64 << k;
                let mut layer = Layer::default();
                for i in 0..width {
                    layer.vertices.push(format!("t[{k},{i}]"));
                    if k > 0 {
                        let parent = format!("t[{},{}]", k - 1, i / 2);
                        let child = format!("t[{k},{i}]");
                        layer
                            .edges
                            .push((format!("E:{parent}-{child}@{}", k - 1), parent, child));
                    }
                }
                layer
            }
            Body::Program(Program::DoubleRay) => {
                let mut layer = Layer::default();
                layer.vertices.push(format!("l[{k}]"));
                layer.vertices.push(format!("r[{k}]"));
                if k == 0 {
                    layer.edges.push(("E:l[0]-r[0]@0".into(), "l[0]".into(), "r[0]".into()));
                } else {
                    for side in ["l", "r"] {
                        layer.edges.push((
                            format!("E:{side}[n]-{side}[n+1]@{}", k - 1),
                            format!("{side}[{}]", k - 1),
                            format!("{side}[{k}]"),
                        ));
                    }
                }
                layer
            }
        }
    }

    /// Expand all layers up to and including `level`.
    pub fn expand(&self, level: u32) -> Expansion {
        Expansion::build(self, level)
    }

    pub fn truncate(&self, n: u32) -> Truncation {
        let exp = self.expand(n + 1);
        let nv = exp.vertex_count(n);
        let ne = exp.edge_count(n);
        let frontier = exp.frontier(n);
        Truncation {
            level: n,
            vertices: (0..nv).map(|i| exp.vertices[i].name.clone()).collect(),
            edges: (0..ne)
                .map(|i| {
                    let e = &exp.edges[i];
                    (
                        e.name.clone(),
                        exp.vertices[e.ends.0.index()].name.clone(),
                        exp.vertices[e.ends.1.index()].name.clone(),
                    )
                })
                .collect(),
            frontier: frontier
                .into_iter()
                .map(|v| exp.vertices[v.index()].name.clone())
                .collect(),
        }
    }
}

fn render_ref(t: &Templates, r: TemplateRef) -> String {
    match r {
        TemplateRef::Static(i) => t.statics[i].clone(),
        TemplateRef::Layered { template, offset: 0 } => format!("{}[n]", t.layered[template]),
        TemplateRef::Layered { template, offset } => {
            format!("{}[n+{offset}]", t.layered[template])
        }
    }
}

fn instantiate(t: &Templates, r: TemplateRef, layer: u32) -> String {
    match r {
        TemplateRef::Static(i) => t.statics[i].clone(),
        TemplateRef::Layered { template, offset } => {
            format!("{}[{}]", t.layered[template], layer + offset)
        }
    }
}

fn template_layer(t: &Templates, k: u32) -> Layer {
    let mut layer = Layer::default();
    if k == 0 {
        layer.vertices.extend(t.statics.iter().cloned());
    }
    layer
        .vertices
        .extend(t.layered.iter().map(|name| format!("{name}[{k}]")));
    for e in &t.edges {
        let instance = if !e.touches_layers() {
            (k == 0).then_some(0)
        } else if e.has_forward_offset() {
            k.checked_sub(1)
        } else {
            Some(k)
        };
        if let Some(j) = instance {
            layer.edges.push((
                format!("E:{}@{j}", e.label),
                instantiate(t, e.left, j),
                instantiate(t, e.right, j),
            ));
        }
    }
    layer
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexRecord {
    pub name: String,
    pub level: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeRecord {
    pub name: String,
    pub ends: (VertexId, VertexId),
    pub level: u32,
}

/// All vertices and edges of a presentation up to a fixed level, indexed in
/// birth order.
#[derive(Debug, Clone)]
pub struct Expansion {
    level: u32,
    vertices: Vec<VertexRecord>,
    edges: Vec<EdgeRecord>,
    vertex_bounds: Vec<usize>,
    edge_bounds: Vec<usize>,
    vertex_index: HashMap<String, VertexId>,
    edge_index: HashMap<String, EdgeId>,
}

impl Expansion {
    fn build(pres: &GraphPresentation, level: u32) -> Expansion {
        let mut exp = Expansion {
            level,
            vertices: Vec::new(),
            edges: Vec::new(),
            vertex_bounds: Vec::new(),
            edge_bounds: Vec::new(),
            vertex_index: HashMap::new(),
            edge_index: HashMap::new(),
        };
        for k in 0..=level {
            let layer = pres.layer(k);
            for name in layer.vertices {
                let id = VertexId(exp.vertices.len() as u32);
                exp.vertex_index.insert(name.clone(), id);
                exp.vertices.push(VertexRecord { name, level: k });
            }
            for (name, u, v) in layer.edges {
                let id = EdgeId(exp.edges.len() as u32);
                let ends = (exp.vertex_index[&u], exp.vertex_index[&v]);
                exp.edge_index.insert(name.clone(), id);
                exp.edges.push(EdgeRecord { name, ends, level: k });
            }
            exp.vertex_bounds.push(exp.vertices.len());
            exp.edge_bounds.push(exp.edges.len());
        }
        exp
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Number of vertices of `G_n`.
    pub fn vertex_count(&self, n: u32) -> usize {
        self.vertex_bounds[n.min(self.level) as usize]
    }

    /// Number of edges of `G_n`.
    pub fn edge_count(&self, n: u32) -> usize {
        self.edge_bounds[n.min(self.level) as usize]
    }

    pub fn vertex(&self, v: VertexId) -> &VertexRecord {
        &self.vertices[v.index()]
    }

    pub fn edge(&self, e: EdgeId) -> &EdgeRecord {
        &self.edges[e.index()]
    }

    pub fn vertices(&self) -> &[VertexRecord] {
        &self.vertices
    }

    pub fn edges(&self) -> &[EdgeRecord] {
        &self.edges
    }

    pub fn vertex_id(&self, name: &str) -> Option<VertexId> {
        self.vertex_index.get(name).copied()
    }

    pub fn edge_id(&self, name: &str) -> Option<EdgeId> {
        self.edge_index.get(name).copied()
    }

    /// Vertices of `G_n` that receive a new incident edge at level `n + 1`.
    ///
    /// Layered rules repeat at every layer and offsets are at most one, so a
    /// vertex that gains nothing at `n + 1` gains nothing later.
    pub fn frontier(&self, n: u32) -> BTreeSet<VertexId> {
        assert!(n < self.level, "frontier of level {n} needs expansion to {}", n + 1);
        let nv = self.vertex_count(n);
        self.edges[self.edge_count(n)..self.edge_count(n + 1)]
            .iter()
            .flat_map(|e| [e.ends.0, e.ends.1])
            .filter(|v| v.index() < nv)
            .collect()
    }

    /// Whether `G_n` is connected.
    pub fn is_connected(&self, n: u32) -> bool {
        let nv = self.vertex_count(n);
        let mut uf = UnionFind::<u32>::new(nv);
        let mut components = nv;
        for e in &self.edges[..self.edge_count(n)] {
            if uf.union(e.ends.0 .0, e.ends.1 .0) {
                components -= 1;
            }
        }
        components == 1
    }
}

/// One finite truncation `G_n`, rendered with stable identifiers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Truncation {
    pub level: u32,
    pub vertices: Vec<String>,
    /// `(edge id, endpoint, endpoint)` in birth order.
    pub edges: Vec<(String, String, String)>,
    pub frontier: BTreeSet<String>,
}

fn connectivity_level(pres: &GraphPresentation) -> Result<u32> {
    let exp = pres.expand(CONNECTIVITY_LIMIT + WINDOW);
    let connected: Vec<bool> = (0..=CONNECTIVITY_LIMIT + WINDOW).map(|n| exp.is_connected(n)).collect();
    (0..=CONNECTIVITY_LIMIT)
        .find(|&n| connected[n as usize..=(n + WINDOW) as usize].iter().all(|&c| c))
        .ok_or(Error::NeverConnected {
            limit: CONNECTIVITY_LIMIT,
        })
}

pub fn preset(name: &str) -> Result<GraphPresentation> {
    match name {
        "ray" => parse_presentation(RAY_SRC),
        "ladder" => parse_presentation(LADDER_SRC),
        "star" => parse_presentation(STAR_SRC),
        "broom" => parse_presentation(BROOM_SRC),
        "bintree" => Ok(GraphPresentation {
            name: "bintree".into(),
            body: Body::Program(Program::BinaryTree),
            connectivity_level: 0,
        }),
        "double_ray" => Ok(GraphPresentation {
            name: "double_ray".into(),
            body: Body::Program(Program::DoubleRay),
            connectivity_level: 0,
        }),
        other => Err(Error::UnknownPreset(other.to_string())),
    }
}

/// DSL source of a preset, when it has one.
pub fn preset_source(name: &str) -> Option<&'static str> {
    match name {
        "ray" => Some(RAY_SRC),
        "ladder" => Some(LADDER_SRC),
        "star" => Some(STAR_SRC),
        "broom" => Some(BROOM_SRC),
        _ => None,
    }
}

// --- DSL ---------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Number(u32),
    Punct(char),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Number(n) => write!(f, "`{n}`"),
            Tok::Punct(c) => write!(f, "`{c}`"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);
    while let Some(&c) = chars.peek() {
        let (l, col) = (line, column);
        if c == '\n' {
            line += 1;
            column = 1;
            chars.next();
        } else if c.is_whitespace() {
            column += 1;
            chars.next();
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    s.push(c);
                    column += 1;
                    chars.next();
                } else {
                    break;
                }
            }
            out.push(Spanned {
                tok: Tok::Ident(s),
                line: l,
                column: col,
            });
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_digit() {
                    s.push(c);
                    column += 1;
                    chars.next();
                } else {
                    break;
                }
            }
            let n = s.parse().map_err(|_| Error::Syntax {
                line: l,
                column: col,
                message: format!("number `{s}` out of range"),
            })?;
            out.push(Spanned {
                tok: Tok::Number(n),
                line: l,
                column: col,
            });
        } else if "{}:;,-[]+".contains(c) {
            out.push(Spanned {
                tok: Tok::Punct(c),
                line: l,
                column: col,
            });
            column += 1;
            chars.next();
        } else {
            return Err(Error::Syntax {
                line: l,
                column: col,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct RawRef {
    name: String,
    offset: Option<u32>,
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map(|s| (s.line, s.column)).unwrap_or(self.end)
    }

    fn fail<T>(&self, message: String) -> Result<T> {
        let (line, column) = self.here();
        Err(Error::Syntax { line, column, message })
    }

    fn expected<T>(&self, what: &str) -> Result<T> {
        match self.peek() {
            Some(t) => self.fail(format!("expected {what}, found {t}")),
            None => self.fail(format!("expected {what}, found end of input")),
        }
    }

    fn punct(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(&Tok::Punct(c)) {
            self.pos += 1;
            Ok(())
        } else {
            self.expected(&format!("`{c}`"))
        }
    }

    fn eat_punct(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Punct(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        if self.is_keyword(kw) {
            self.pos += 1;
            Ok(())
        } else {
            self.expected(&format!("`{kw}`"))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.expected("identifier"),
        }
    }

    fn ident_list(&mut self) -> Result<Vec<String>> {
        let mut names = vec![self.ident()?];
        while self.eat_punct(',') {
            names.push(self.ident()?);
        }
        Ok(names)
    }

    fn reference(&mut self) -> Result<RawRef> {
        let name = self.ident()?;
        let offset = if self.eat_punct('[') {
            self.keyword("n")?;
            let offset = if self.eat_punct('+') {
                match self.peek() {
                    Some(Tok::Number(1)) => {
                        self.pos += 1;
                        1
                    }
                    _ => return self.expected("`1` (layer offsets are 0 or +1)"),
                }
            } else {
                0
            };
            self.punct(']')?;
            Some(offset)
        } else {
            None
        };
        Ok(RawRef { name, offset })
    }
}

/// Parse and validate a presentation in the `.igp` DSL.
pub fn parse_presentation(text: &str) -> Result<GraphPresentation> {
    let toks = tokenize(text)?;
    let end = {
        let lines: Vec<&str> = text.split('\n').collect();
        (lines.len(), lines.last().map_or(0, |l| l.chars().count()) + 1)
    };
    let mut p = Parser { toks, pos: 0, end };
    p.keyword("graph")?;
    let name = p.ident()?;
    p.punct('{')?;
    let statics = if p.is_keyword("static") {
        p.pos += 1;
        let names = p.ident_list()?;
        p.punct(';')?;
        names
    } else {
        Vec::new()
    };
    p.keyword("layer")?;
    p.keyword("n")?;
    p.punct(':')?;
    let layered = p.ident_list()?;
    p.punct(';')?;
    p.keyword("edges")?;
    p.punct(':')?;
    let mut raw_edges = Vec::new();
    loop {
        let left = p.reference()?;
        p.punct('-')?;
        let right = p.reference()?;
        raw_edges.push((left, right));
        if !p.eat_punct(',') {
            break;
        }
    }
    p.punct(';')?;
    p.punct('}')?;
    if p.pos < p.toks.len() {
        return p.expected("end of input");
    }

    let mut seen = BTreeSet::new();
    for n in statics.iter().chain(&layered) {
        if !seen.insert(n.as_str()) {
            return Err(Error::DuplicateTemplate(n.clone()));
        }
    }
    if statics.is_empty() && layered.is_empty() {
        return Err(Error::EmptyPresentation);
    }

    let mut templates = Templates {
        statics,
        layered,
        edges: Vec::new(),
    };
    let resolve = |t: &Templates, r: &RawRef| -> Result<TemplateRef> {
        if let Some(i) = t.statics.iter().position(|s| *s == r.name) {
            return match r.offset {
                None => Ok(TemplateRef::Static(i)),
                Some(_) => Err(Error::BadReference {
                    name: r.name.clone(),
                    problem: "is static and takes no layer index",
                }),
            };
        }
        if let Some(i) = t.layered.iter().position(|s| *s == r.name) {
            return match r.offset {
                Some(offset) => Ok(TemplateRef::Layered { template: i, offset }),
                None => Err(Error::BadReference {
                    name: r.name.clone(),
                    problem: "is layered and needs a layer index",
                }),
            };
        }
        Err(Error::UnknownTemplate(r.name.clone()))
    };
    let mut label_counts: HashMap<String, usize> = HashMap::new();
    for (l, r) in &raw_edges {
        let left = resolve(&templates, l)?;
        let right = resolve(&templates, r)?;
        let base = format!("{}-{}", render_ref(&templates, left), render_ref(&templates, right));
        let count = label_counts.entry(base.clone()).or_insert(0);
        *count += 1;
        let label = if *count == 1 { base } else { format!("{base}#{count}") };
        templates.edges.push(EdgeTemplate { left, right, label });
    }

    let mut pres = GraphPresentation {
        name,
        body: Body::Templates(templates),
        connectivity_level: 0,
    };
    pres.connectivity_level = connectivity_level(&pres)?;
    Ok(pres)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_ray_grammar() {
        let p = parse_presentation("graph ray { layer n: v; edges: v[n]-v[n+1]; }").unwrap();
        assert_eq!(p.name(), "ray");
        assert_eq!(p.layered().len(), 1);
        assert_eq!(p.edge_templates().len(), 1);
        assert!(p.statics().is_empty());
        assert!(!p.is_finite());
    }

    #[test]
    fn static_and_layer() {
        let p = parse_presentation("graph star { static c; layer n: l; edges: c-l[n]; }").unwrap();
        assert_eq!(p.statics(), ["c"]);
        assert_eq!(p.layered(), ["l"]);
    }

    #[test]
    fn unknown_template_is_reported() {
        let err = parse_presentation("graph bad { layer n: v; edges: v[n]-w[n]; }").unwrap_err();
        assert_eq!(err, Error::UnknownTemplate("w".into()));
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_presentation("graph g {\n  layer n: v\n  edges: v[n]-v[n+1]; }").unwrap_err();
        match err {
            Error::Syntax { line, column, .. } => assert_eq!((line, column), (3, 3)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_presentation("graph g { layer n: v; edges: v[n]-v[n+2]; }"),
            Err(Error::Syntax { .. })
        ));
    }

    #[test]
    fn index_misuse() {
        assert!(matches!(
            parse_presentation("graph g { static c; layer n: v; edges: c[n]-v[n]; }"),
            Err(Error::BadReference { .. })
        ));
        assert!(matches!(
            parse_presentation("graph g { layer n: v; edges: v-v[n+1]; }"),
            Err(Error::BadReference { .. })
        ));
        assert!(matches!(
            parse_presentation("graph g { static v; layer n: v; edges: v-v; }"),
            Err(Error::DuplicateTemplate(_))
        ));
    }

    #[test]
    fn never_connected_is_rejected() {
        let err = parse_presentation("graph g { layer n: v, w; edges: v[n]-v[n+1]; }").unwrap_err();
        assert_eq!(
            err,
            Error::NeverConnected {
                limit: CONNECTIVITY_LIMIT
            }
        );
    }

    #[test]
    fn eventually_connected_level() {
        let p = parse_presentation("graph g { layer n: a, b; edges: a[n]-a[n+1], b[n]-b[n+1], a[n]-b[n+1]; }").unwrap();
        assert_eq!(p.connectivity_level(), 1);
        assert_eq!(preset("ray").unwrap().connectivity_level(), 0);
    }

    #[test]
    fn ray_truncation() {
        let t = preset("ray").unwrap().truncate(3);
        assert_eq!(t.vertices.len(), 4);
        assert_eq!(t.edges.len(), 3);
        assert_eq!(t.frontier, BTreeSet::from(["v[3]".to_string()]));
        assert_eq!(t.edges[2].0, "E:v[n]-v[n+1]@2");
    }

    #[test]
    fn ladder_truncation() {
        let t = preset("ladder").unwrap().truncate(2);
        assert_eq!(t.vertices.len(), 6);
        assert_eq!(t.edges.len(), 7);
        let rungs = t.edges.iter().filter(|e| e.0.starts_with("E:a[n]-b[n]")).count();
        assert_eq!(rungs, 3);
    }

    #[test]
    fn broom_truncation() {
        let t = preset("broom").unwrap().truncate(1);
        assert_eq!(t.vertices.len(), 5);
        assert_eq!(t.edges.len(), 6);
        let expected: BTreeSet<String> = ["v", "t[1]", "b[1]"].iter().map(|s| s.to_string()).collect();
        assert_eq!(t.frontier, expected);
    }

    #[test]
    fn bintree_truncation() {
        let t = preset("bintree").unwrap().truncate(3);
        assert_eq!(t.vertices.len(), 15);
        assert_eq!(t.edges.len(), 14);
        assert_eq!(t.frontier.len(), 8);
    }

    #[test]
    fn ray_preset_matches_dsl() {
        let dsl = parse_presentation("graph ray { layer n: v; edges: v[n]-v[n+1]; }").unwrap();
        assert_eq!(preset("ray").unwrap(), dsl);
    }

    #[test]
    fn unknown_preset() {
        assert_eq!(preset("grid").unwrap_err(), Error::UnknownPreset("grid".into()));
    }

    #[test]
    fn repeated_templates_get_distinct_ids() {
        let p = parse_presentation("graph m { layer n: v; edges: v[n]-v[n+1], v[n]-v[n+1], v[n]-v[n]; }").unwrap();
        let t = p.truncate(1);
        let names: BTreeSet<_> = t.edges.iter().map(|e| e.0.clone()).collect();
        assert_eq!(names.len(), t.edges.len());
        assert!(names.contains("E:v[n]-v[n+1]#2@0"));
        assert!(names.contains("E:v[n]-v[n]@1"));
    }

    #[test]
    fn static_only_edges_appear_once() {
        let p = parse_presentation("graph s { static a, b; layer n: v; edges: a-b, a-v[n]; }").unwrap();
        let t = p.truncate(3);
        assert_eq!(t.edges.iter().filter(|e| e.0.starts_with("E:a-b")).count(), 1);
        assert!(t.frontier.contains("a"));
        assert!(!t.frontier.contains("b"));
    }

    #[test]
    fn root_has_id_zero() {
        for name in PRESET_NAMES {
            let p = preset(name).unwrap();
            let exp = p.expand(2);
            assert_eq!(exp.vertex_id(&p.root_name()), Some(VertexId(0)), "{name}");
        }
    }
}
