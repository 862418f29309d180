//! Fat graphs, the skew form they induce, walks and monodromy matrices.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::laurent::QPoly;
use crate::poly::{rat, Poly};
use crate::qtorus::{Algebra, QElement, TorusError};
use crate::ring::{Mat, Ring};

/// Sign relating printed commutators to the skew form used here:
/// `[x, y] = PRINTED_COMMUTATOR_SIGN · ε(x, y) · 2πiħ`.
pub const PRINTED_COMMUTATOR_SIGN: i64 = -1;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("vertex `{vertex}` has {found} edge ends, expected {expected}")]
    Valence { vertex: String, found: usize, expected: usize },
    #[error("edge `{0}` references an unknown vertex or is not attached consistently")]
    Dangling(String),
    #[error("duplicate identifier or label `{0}`")]
    Duplicate(String),
    #[error("edge `{0}`: {1}")]
    BadEdge(String, String),
    #[error("malformed edge end `{0}`")]
    BadEnd(String),
    #[error("unknown edge or label `{0}`")]
    Unknown(String),
    #[error("word not realizable on graph: {0}")]
    NotRealizable(String),
    #[error("malformed token `{0}`")]
    BadToken(String),
    #[error("unsupported flip: {0}")]
    UnsupportedFlip(String),
    #[error(transparent)]
    Torus(#[from] TorusError),
    #[error("invalid fixture json: {0}")]
    Json(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexKind {
    Internal,
    Cusp,
    #[serde(alias = "anchor")]
    Anchor,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Inner,
    Cusp,
    Loop,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub id: String,
    pub kind: VertexKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub label: String,
    pub kind: EdgeKind,
    pub ends: [usize; 2],
}

/// End `end` of edge `edge`, sitting at vertex `edges[edge].ends[end]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfEdge {
    pub edge: usize,
    pub end: usize,
}

impl HalfEdge {
    pub fn other(self) -> HalfEdge {
        HalfEdge { edge: self.edge, end: 1 - self.end }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexSpec {
    pub id: String,
    pub kind: VertexKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub id: String,
    #[serde(default)]
    pub label: Option<String>,
    pub kind: EdgeKind,
    pub ends: [String; 2],
}

/// Serialized graph: cyclic orders list edge ends as `edge#0` / `edge#1`,
/// counterclockwise. Cusp vertices may be omitted from `cyclic`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub vertices: Vec<VertexSpec>,
    pub edges: Vec<EdgeSpec>,
    pub cyclic: BTreeMap<String, Vec<String>>,
}

#[derive(Clone, Debug)]
pub struct FatGraph {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    /// Counterclockwise order of half-edges at each vertex.
    pub cyclic: Vec<Vec<HalfEdge>>,
    algebra: Arc<Algebra>,
}

fn parse_end(s: &str, edges: &[EdgeSpec]) -> Result<HalfEdge, SurfaceError> {
    let (id, end) = s.rsplit_once('#').ok_or_else(|| SurfaceError::BadEnd(s.into()))?;
    let end: usize = end.parse().map_err(|_| SurfaceError::BadEnd(s.into()))?;
    if end > 1 {
        return Err(SurfaceError::BadEnd(s.into()));
    }
    let edge = edges.iter().position(|e| e.id == id).ok_or_else(|| SurfaceError::Unknown(id.into()))?;
    Ok(HalfEdge { edge, end })
}

impl FatGraph {
    pub fn build(spec: &GraphSpec) -> Result<FatGraph, SurfaceError> {
        let mut seen = std::collections::BTreeSet::new();
        for v in &spec.vertices {
            if !seen.insert(format!("v:{}", v.id)) {
                return Err(SurfaceError::Duplicate(v.id.clone()));
            }
        }
        let vindex = |id: &str| spec.vertices.iter().position(|v| v.id == id);
        let mut edges = Vec::new();
        let mut labels = std::collections::BTreeSet::new();
        for e in &spec.edges {
            if !seen.insert(format!("e:{}", e.id)) {
                return Err(SurfaceError::Duplicate(e.id.clone()));
            }
            let label = e.label.clone().unwrap_or_else(|| e.id.clone());
            if !labels.insert(label.clone()) {
                return Err(SurfaceError::Duplicate(label));
            }
            let a = vindex(&e.ends[0]).ok_or_else(|| SurfaceError::Dangling(e.id.clone()))?;
            let b = vindex(&e.ends[1]).ok_or_else(|| SurfaceError::Dangling(e.id.clone()))?;
            edges.push(Edge { id: e.id.clone(), label, kind: e.kind, ends: [a, b] });
        }
        let vertices: Vec<Vertex> =
            spec.vertices.iter().map(|v| Vertex { id: v.id.clone(), kind: v.kind }).collect();
        let mut cyclic = vec![Vec::new(); vertices.len()];
        for (vid, ends) in &spec.cyclic {
            let v = vindex(vid).ok_or_else(|| SurfaceError::Unknown(vid.clone()))?;
            for s in ends {
                let h = parse_end(s, &spec.edges)?;
                if edges[h.edge].ends[h.end] != v {
                    return Err(SurfaceError::Dangling(edges[h.edge].id.clone()));
                }
                cyclic[v].push(h);
            }
        }
        // cusp vertices default to their single end
        for (ei, e) in edges.iter().enumerate() {
            for end in 0..2 {
                let v = e.ends[end];
                if vertices[v].kind == VertexKind::Cusp && cyclic[v].is_empty() {
                    cyclic[v].push(HalfEdge { edge: ei, end });
                }
            }
        }
        let g = FatGraph::assemble(vertices, edges, cyclic)?;
        Ok(g)
    }

    /// Validate and derive the algebra.
    pub fn assemble(vertices: Vec<Vertex>, edges: Vec<Edge>, cyclic: Vec<Vec<HalfEdge>>) -> Result<FatGraph, SurfaceError> {
        for (vi, v) in vertices.iter().enumerate() {
            let expected = if v.kind == VertexKind::Cusp { 1 } else { 3 };
            if cyclic[vi].len() != expected {
                return Err(SurfaceError::Valence { vertex: v.id.clone(), found: cyclic[vi].len(), expected });
            }
        }
        let mut uses = BTreeMap::new();
        for hs in &cyclic {
            for h in hs {
                *uses.entry(*h).or_insert(0) += 1;
            }
        }
        for (ei, e) in edges.iter().enumerate() {
            for end in 0..2 {
                if uses.get(&HalfEdge { edge: ei, end }) != Some(&1) {
                    return Err(SurfaceError::Dangling(e.id.clone()));
                }
            }
            let kinds = [vertices[e.ends[0]].kind, vertices[e.ends[1]].kind];
            match e.kind {
                EdgeKind::Cusp => {
                    let cusps = kinds.iter().filter(|k| **k == VertexKind::Cusp).count();
                    if cusps != 1 {
                        return Err(SurfaceError::BadEdge(e.id.clone(), "cusp edge needs exactly one cusp vertex".into()));
                    }
                }
                EdgeKind::Loop => {
                    if e.ends[0] != e.ends[1] || kinds[0] == VertexKind::Cusp {
                        return Err(SurfaceError::BadEdge(e.id.clone(), "loop edge must return to one internal vertex".into()));
                    }
                }
                EdgeKind::Inner => {
                    if kinds.contains(&VertexKind::Cusp) {
                        return Err(SurfaceError::BadEdge(e.id.clone(), "inner edge touches a cusp vertex".into()));
                    }
                }
            }
        }
        let generators: Vec<String> =
            edges.iter().filter(|e| e.kind != EdgeKind::Loop).map(|e| e.label.clone()).collect();
        let centrals: Vec<String> =
            edges.iter().filter(|e| e.kind == EdgeKind::Loop).map(|e| e.label.clone()).collect();
        let n = generators.len();
        let mut skew = vec![vec![0i64; n]; n];
        let slot = |ei: usize| generators.iter().position(|g| *g == edges[ei].label);
        for (vi, hs) in cyclic.iter().enumerate() {
            if vertices[vi].kind == VertexKind::Cusp {
                continue;
            }
            for t in 0..3 {
                let (a, b) = (hs[t].edge, hs[(t + 1) % 3].edge);
                if let (Some(i), Some(j)) = (slot(a), slot(b)) {
                    // a immediately precedes b counterclockwise
                    skew[i][j] -= 1;
                    skew[j][i] += 1;
                }
            }
        }
        let algebra = Algebra::new(generators, centrals, skew)?;
        Ok(FatGraph { vertices, edges, cyclic, algebra })
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    pub fn vertex_of(&self, h: HalfEdge) -> usize {
        self.edges[h.edge].ends[h.end]
    }

    pub fn edge_by_id(&self, id: &str) -> Result<usize, SurfaceError> {
        self.edges.iter().position(|e| e.id == id).ok_or_else(|| SurfaceError::Unknown(id.into()))
    }

    pub fn edge_by_label(&self, label: &str) -> Result<usize, SurfaceError> {
        self.edges.iter().position(|e| e.label == label).ok_or_else(|| SurfaceError::Unknown(label.into()))
    }

    fn position(&self, h: HalfEdge) -> (usize, usize) {
        let v = self.vertex_of(h);
        let p = self.cyclic[v].iter().position(|x| *x == h).expect("half-edge listed at its vertex");
        (v, p)
    }

    /// Next half-edge counterclockwise at the same vertex.
    pub fn ccw_next(&self, h: HalfEdge) -> HalfEdge {
        let (v, p) = self.position(h);
        let hs = &self.cyclic[v];
        hs[(p + 1) % hs.len()]
    }

    pub fn ccw_prev(&self, h: HalfEdge) -> HalfEdge {
        let (v, p) = self.position(h);
        let hs = &self.cyclic[v];
        hs[(p + hs.len() - 1) % hs.len()]
    }

    /// The half-edge at the cusp vertex of a cusp edge.
    pub fn cusp_half(&self, edge: usize) -> Option<HalfEdge> {
        let e = &self.edges[edge];
        if e.kind != EdgeKind::Cusp {
            return None;
        }
        (0..2).map(|end| HalfEdge { edge, end }).find(|h| self.vertices[self.vertex_of(*h)].kind == VertexKind::Cusp)
    }

    /// Boundary cycles of the ribbon structure.
    pub fn faces(&self) -> Vec<Vec<HalfEdge>> {
        let mut seen = std::collections::BTreeSet::new();
        let mut faces = Vec::new();
        for ei in 0..self.edges.len() {
            for end in 0..2 {
                let start = HalfEdge { edge: ei, end };
                if seen.contains(&start) {
                    continue;
                }
                let mut face = Vec::new();
                let mut h = start;
                loop {
                    seen.insert(h);
                    face.push(h);
                    h = self.ccw_next(h.other());
                    if h == start {
                        break;
                    }
                }
                faces.push(face);
            }
        }
        faces
    }

    pub fn cusp_edges(&self) -> Vec<usize> {
        (0..self.edges.len()).filter(|e| self.edges[*e].kind == EdgeKind::Cusp).collect()
    }

    /// Walk given as edge steps: edge ids, `id~` for a loop taken in the
    /// reverse sense, and `id#0`/`id#1` to pick which end to leave by.
    pub fn walk_steps(&self, steps: &[&str]) -> Result<Walk, SurfaceError> {
        let first = steps.first().ok_or_else(|| SurfaceError::NotRealizable("empty walk".into()))?;
        let e0 = self.edge_by_id(first)?;
        let h0 = self.cusp_half(e0).ok_or_else(|| SurfaceError::NotRealizable(format!("`{first}` is not a cusp edge")))?;
        let mut out = vec![h0];
        let mut arrival = h0.other();
        let mut i = 1;
        while i < steps.len() {
            let s = steps[i];
            let (name, inverse, pick) = split_step(s);
            let e = self.edge_by_id(name)?;
            let v = self.vertex_of(arrival);
            let hs = &self.cyclic[v];
            if self.vertices[v].kind == VertexKind::Cusp {
                return Err(SurfaceError::NotRealizable(format!("walk continues past a cusp at `{s}`")));
            }
            let p = hs.iter().position(|x| *x == arrival).expect("listed");
            if self.edges[e].kind == EdgeKind::Loop {
                let h = if inverse { hs[(p + 1) % 3] } else { hs[(p + 2) % 3] };
                if h.edge != e {
                    return Err(SurfaceError::NotRealizable(format!("loop `{name}` not at this vertex")));
                }
                if steps.get(i + 1) != Some(&self.edges[arrival.edge].id.as_str()) {
                    return Err(SurfaceError::NotRealizable(format!("loop `{name}` must return along the arrival edge")));
                }
                out.push(h);
                out.push(arrival);
                arrival = arrival.other();
                i += 2;
                continue;
            }
            let cands: Vec<HalfEdge> = [hs[(p + 1) % 3], hs[(p + 2) % 3]]
                .into_iter()
                .filter(|h| h.edge == e && pick.is_none_or(|k| h.end == k))
                .collect();
            let h = match cands.as_slice() {
                [h] => *h,
                [] => return Err(SurfaceError::NotRealizable(format!("no edge `{s}` leaves this vertex"))),
                _ => return Err(SurfaceError::NotRealizable(format!("step `{s}` is ambiguous"))),
            };
            out.push(h);
            arrival = h.other();
            i += 1;
        }
        Walk::from_outgoing(self, out)
    }

    /// Walk given as tokens in matrix-product order, e.g.
    /// `["X:pi2", "L", "X:Z1", "R", "X:pi1"]`.
    pub fn walk_tokens(&self, tokens: &[&str]) -> Result<Walk, SurfaceError> {
        let parsed: Vec<Token> = tokens.iter().rev().map(|t| self.parse_token(t)).collect::<Result<_, _>>()?;
        let Some(Token::X(e0)) = parsed.first().copied() else {
            return Err(SurfaceError::NotRealizable("word must begin with a cusp edge".into()));
        };
        let h0 = self.cusp_half(e0).ok_or_else(|| SurfaceError::NotRealizable("word must begin with a cusp edge".into()))?;
        let mut out = vec![h0];
        let mut arrival = h0.other();
        let mut i = 1;
        while i < parsed.len() {
            let v = self.vertex_of(arrival);
            let hs = &self.cyclic[v];
            if self.vertices[v].kind == VertexKind::Cusp {
                return Err(SurfaceError::NotRealizable("word continues past a cusp".into()));
            }
            let p = hs.iter().position(|x| *x == arrival).expect("listed");
            let next = parsed.get(i + 1).copied();
            match parsed[i] {
                Token::L | Token::R => {
                    let h = if parsed[i] == Token::R { hs[(p + 1) % 3] } else { hs[(p + 2) % 3] };
                    if next != Some(Token::X(h.edge)) {
                        return Err(SurfaceError::NotRealizable(format!(
                            "turn at token {} leads to `{}`",
                            i,
                            self.edges[h.edge].label
                        )));
                    }
                    out.push(h);
                    arrival = h.other();
                }
                Token::F { edge, inverse } => {
                    let h = if inverse { hs[(p + 1) % 3] } else { hs[(p + 2) % 3] };
                    if h.edge != edge || next != Some(Token::X(arrival.edge)) {
                        return Err(SurfaceError::NotRealizable(format!("loop token {i} does not fit the graph")));
                    }
                    out.push(h);
                    out.push(arrival);
                    arrival = arrival.other();
                }
                Token::X(_) => return Err(SurfaceError::NotRealizable(format!("two edge tokens in a row at {i}"))),
            }
            i += 2;
        }
        if parsed.len().is_multiple_of(2) {
            return Err(SurfaceError::NotRealizable("word ends with a turn".into()));
        }
        Walk::from_outgoing(self, out)
    }

    fn parse_token(&self, t: &str) -> Result<Token, SurfaceError> {
        match t {
            "L" => return Ok(Token::L),
            "R" => return Ok(Token::R),
            _ => {}
        }
        let (head, label) = t.split_once(':').ok_or_else(|| SurfaceError::BadToken(t.into()))?;
        let e = self.edge_by_label(label)?;
        let kind = self.edges[e].kind;
        match (head, kind) {
            ("X", EdgeKind::Inner | EdgeKind::Cusp) => Ok(Token::X(e)),
            ("F", EdgeKind::Loop) => Ok(Token::F { edge: e, inverse: false }),
            ("F~" | "Finv", EdgeKind::Loop) => Ok(Token::F { edge: e, inverse: true }),
            _ => Err(SurfaceError::BadToken(t.into())),
        }
    }

    pub fn render_token(&self, t: Token) -> String {
        match t {
            Token::X(e) => format!("X:{}", self.edges[e].label),
            Token::L => "L".into(),
            Token::R => "R".into(),
            Token::F { edge, inverse: false } => format!("F:{}", self.edges[edge].label),
            Token::F { edge, inverse: true } => format!("F~:{}", self.edges[edge].label),
        }
    }
}

fn split_step(s: &str) -> (&str, bool, Option<usize>) {
    if let Some(base) = s.strip_suffix('~') {
        return (base, true, None);
    }
    if let Some((base, end)) = s.rsplit_once('#') {
        if let Ok(k) = end.parse() {
            return (base, false, Some(k));
        }
    }
    (s, false, None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Token {
    X(usize),
    L,
    R,
    F { edge: usize, inverse: bool },
}

/// A path from a cusp, stored as the half-edge it leaves by at each vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Walk {
    /// Outgoing half-edges; the first sits at the starting cusp vertex.
    pub outgoing: Vec<HalfEdge>,
    /// Tokens in walk order (the matrix is their left-to-right accumulation
    /// by left multiplication).
    pub tokens: Vec<Token>,
    pub start: usize,
    pub end: Option<usize>,
}

impl Walk {
    pub fn from_outgoing(g: &FatGraph, outgoing: Vec<HalfEdge>) -> Result<Walk, SurfaceError> {
        let h0 = outgoing[0];
        if g.vertices[g.vertex_of(h0)].kind != VertexKind::Cusp {
            return Err(SurfaceError::NotRealizable("walk must start at a cusp".into()));
        }
        let mut tokens = vec![Token::X(h0.edge)];
        let mut t = 1;
        while t < outgoing.len() {
            let arrival = outgoing[t - 1].other();
            let h = outgoing[t];
            let v = g.vertex_of(arrival);
            if g.vertex_of(h) != v || h == arrival {
                return Err(SurfaceError::NotRealizable("discontinuous walk".into()));
            }
            let hs = &g.cyclic[v];
            let p = hs.iter().position(|x| *x == arrival).expect("listed");
            let q = hs.iter().position(|x| *x == h).expect("listed");
            let left = (q + 3 - p) % 3 == 2;
            if g.edges[h.edge].kind == EdgeKind::Loop {
                if outgoing.get(t + 1) != Some(&arrival) {
                    return Err(SurfaceError::NotRealizable("loop must return along the arrival edge".into()));
                }
                tokens.push(Token::F { edge: h.edge, inverse: !left });
                tokens.push(Token::X(arrival.edge));
                t += 2;
            } else {
                tokens.push(if left { Token::L } else { Token::R });
                tokens.push(Token::X(h.edge));
                t += 1;
            }
        }
        let last = outgoing.last().expect("nonempty").other();
        let end = (g.vertices[g.vertex_of(last)].kind == VertexKind::Cusp).then_some(last.edge);
        Ok(Walk { outgoing, tokens, start: h0.edge, end })
    }

    pub fn is_complete(&self) -> bool {
        self.end.is_some()
    }

    pub fn is_closed(&self) -> bool {
        self.end == Some(self.start)
    }

    /// The same path traversed backwards. Only for walks ending at a cusp.
    pub fn reversed(&self, g: &FatGraph) -> Result<Walk, SurfaceError> {
        if self.end.is_none() {
            return Err(SurfaceError::NotRealizable("partial walk cannot be reversed".into()));
        }
        let out = self.outgoing.iter().rev().map(|h| h.other()).collect();
        Walk::from_outgoing(g, out)
    }

    pub fn steps(&self, g: &FatGraph) -> Vec<String> {
        let mut s = Vec::new();
        let mut t = 0;
        while t < self.outgoing.len() {
            let h = self.outgoing[t];
            let e = &g.edges[h.edge];
            if e.kind == EdgeKind::Loop {
                let inv = self.tokens.iter().any(|tk| matches!(tk, Token::F { edge, inverse: true } if *edge == h.edge));
                s.push(if inv { format!("{}~", e.id) } else { e.id.clone() });
            } else if e.ends[0] == e.ends[1] {
                s.push(format!("{}#{}", e.id, h.end));
            } else {
                s.push(e.id.clone());
            }
            t += 1;
        }
        s
    }
}

/// All walks from a cusp to a cusp crossing at most `max_edges` edges
/// (a loop and its return count as two).
pub fn enumerate_arcs(g: &FatGraph, max_edges: usize) -> Vec<Walk> {
    fn go(g: &FatGraph, out: &mut Vec<HalfEdge>, max: usize, acc: &mut Vec<Walk>) {
        let arrival = out.last().expect("nonempty").other();
        let v = g.vertex_of(arrival);
        if g.vertices[v].kind == VertexKind::Cusp {
            acc.push(Walk::from_outgoing(g, out.clone()).expect("enumerated walks are valid"));
            return;
        }
        for h in [g.ccw_next(arrival), g.ccw_prev(arrival)] {
            let loop_edge = g.edges[h.edge].kind == EdgeKind::Loop;
            let cost = if loop_edge { 2 } else { 1 };
            if out.len() + cost > max {
                continue;
            }
            out.push(h);
            if loop_edge {
                out.push(arrival);
            }
            go(g, out, max, acc);
            out.pop();
            if loop_edge {
                out.pop();
            }
        }
    }
    let mut acc = Vec::new();
    for e in g.cusp_edges() {
        let h = g.cusp_half(e).expect("cusp edge");
        go(g, &mut vec![h], max_edges, &mut acc);
    }
    acc
}

/// Whether the path with outgoing sequence `a` leaves the shared cusp to the
/// right of `b`. `None` when the sequences coincide.
pub fn right_of(g: &FatGraph, a: &[HalfEdge], b: &[HalfEdge]) -> Option<bool> {
    for t in 0..a.len().min(b.len()) {
        if a[t] != b[t] {
            let arrival = a[t - 1].other();
            return Some(g.ccw_next(arrival) == a[t]);
        }
    }
    None
}

/// Position of an arc end among all ends at one cusp; 1 is the rightmost.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ArcEnd {
    pub cusp: usize,
    pub thread: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EndpointConfig {
    pub source: ArcEnd,
    pub target: Option<ArcEnd>,
}

impl EndpointConfig {
    pub fn is_closed(&self) -> bool {
        self.target.is_some_and(|t| t.cusp == self.source.cusp)
    }
}

/// Thread positions of the ends of the given walks at every cusp.
pub fn endpoint_configs(g: &FatGraph, walks: &[&Walk]) -> Result<Vec<EndpointConfig>, SurfaceError> {
    // (cusp, walk index, is_target, sequence)
    let mut ends: Vec<(usize, usize, bool, Vec<HalfEdge>)> = Vec::new();
    for (i, w) in walks.iter().enumerate() {
        ends.push((w.start, i, false, w.outgoing.clone()));
        if let Some(c) = w.end {
            ends.push((c, i, true, w.reversed(g)?.outgoing));
        }
    }
    let mut thread = BTreeMap::new();
    let mut cusps: Vec<usize> = ends.iter().map(|e| e.0).collect();
    cusps.sort();
    cusps.dedup();
    for c in cusps {
        let mut here: Vec<&(usize, usize, bool, Vec<HalfEdge>)> = ends.iter().filter(|e| e.0 == c).collect();
        let mut err = None;
        here.sort_by(|x, y| match right_of(g, &x.3, &y.3) {
            Some(true) => std::cmp::Ordering::Less,
            Some(false) => std::cmp::Ordering::Greater,
            None => {
                if (x.1, x.2) != (y.1, y.2) {
                    err = Some(());
                }
                std::cmp::Ordering::Equal
            }
        });
        if err.is_some() {
            return Err(SurfaceError::NotRealizable("two arc ends coincide".into()));
        }
        for (pos, e) in here.iter().enumerate() {
            thread.insert((e.1, e.2), ArcEnd { cusp: c, thread: pos + 1 });
        }
    }
    Ok((0..walks.len())
        .map(|i| EndpointConfig { source: thread[&(i, false)], target: thread.get(&(i, true)).copied() })
        .collect())
}

/// Matrices assigned to tokens; quantum turns carry `q^{±1/4}`.
pub fn token_matrix(g: &FatGraph, t: Token) -> Mat<QElement> {
    let a = g.algebra();
    let c = |n: i64| QElement::constant(a, n);
    match t {
        Token::X(e) => {
            let l = &g.edges[e].label;
            let up = QElement::exp_half(a, l, 1).expect("label in algebra");
            let down = QElement::exp_half(a, l, -1).expect("label in algebra");
            Mat::from_rows(vec![vec![c(0), up.negate()], vec![down, c(0)]])
        }
        Token::L => {
            let s = QElement::q_power(a, 1);
            Mat::from_rows(vec![vec![c(0), s.clone()], vec![s.negate(), s.negate()]])
        }
        Token::R => {
            let s = QElement::q_power(a, -1);
            Mat::from_rows(vec![vec![s.clone(), s.clone()], vec![s.negate(), c(0)]])
        }
        Token::F { edge, inverse } => {
            let w = QElement::exp_half(a, &g.edges[edge].label, 1).expect("label in algebra");
            if inverse {
                Mat::from_rows(vec![vec![w.negate(), c(-1)], vec![c(1), c(0)]])
            } else {
                Mat::from_rows(vec![vec![c(0), c(1)], vec![c(-1), w.negate()]])
            }
        }
    }
}

fn token_inverse(g: &FatGraph, t: Token) -> Mat<QElement> {
    match t {
        Token::X(_) => token_matrix(g, t).neg(),
        Token::L => token_matrix(g, Token::R).neg(),
        Token::R => token_matrix(g, Token::L).neg(),
        Token::F { edge, inverse } => token_matrix(g, Token::F { edge, inverse: !inverse }),
    }
}

/// Classical token matrices over commutative Laurent polynomials in the
/// slot variables (generator exponents in half-units).
pub fn classical_token_matrix(g: &FatGraph, t: Token) -> Mat<Poly<usize>> {
    let a = g.algebra();
    let c = |n: i64| Poly::constant(rat(n));
    let var = |e: usize, k: i32| {
        let idx = a.index(&g.edges[e].label).expect("label in algebra");
        Poly::monomial(vec![(idx, k)], rat(1))
    };
    match t {
        Token::X(e) => Mat::from_rows(vec![vec![c(0), var(e, 1).negate()], vec![var(e, -1), c(0)]]),
        Token::L => Mat::from_rows(vec![vec![c(0), c(1)], vec![c(-1), c(-1)]]),
        Token::R => Mat::from_rows(vec![vec![c(1), c(1)], vec![c(-1), c(0)]]),
        Token::F { edge, inverse } => {
            let w = var(edge, 1);
            if inverse {
                Mat::from_rows(vec![vec![w.negate(), c(-1)], vec![c(1), c(0)]])
            } else {
                Mat::from_rows(vec![vec![c(0), c(1)], vec![c(-1), w.negate()]])
            }
        }
    }
}

/// Quantum monodromy: product of token matrices, each new token multiplied
/// from the left.
pub fn monodromy(g: &FatGraph, w: &Walk) -> Mat<QElement> {
    let mut m = Mat::identity(2, &QElement::zero(g.algebra()));
    for t in &w.tokens {
        m = token_matrix(g, *t).mul(&m);
    }
    m
}

/// Exact two-sided inverse of [`monodromy`], from the inverted tokens.
pub fn monodromy_inverse(g: &FatGraph, w: &Walk) -> Mat<QElement> {
    let mut m = Mat::identity(2, &QElement::zero(g.algebra()));
    for t in &w.tokens {
        m = m.mul(&token_inverse(g, *t));
    }
    m
}

pub fn classical_monodromy(g: &FatGraph, w: &Walk) -> Mat<Poly<usize>> {
    let mut m = Mat::identity(2, &Poly::zero());
    for t in &w.tokens {
        m = classical_token_matrix(g, *t).mul(&m);
    }
    m
}

/// The upper-left entry.
pub fn lambda_length<T: Ring>(m: &Mat<T>) -> T {
    m.get(0, 0).clone()
}

/// `−m_{1k}`.
pub fn tr_k<T: Ring>(m: &Mat<T>) -> T {
    m.get(0, m.cols() - 1).negate()
}

/// Matrix power with negative exponents taken from the exact inverse.
pub fn monodromy_power(g: &FatGraph, w: &Walk, p: i32) -> Mat<QElement> {
    let base = if p >= 0 { monodromy(g, w) } else { monodromy_inverse(g, w) };
    base.pow(p.unsigned_abs())
}

/// Scalar embedding used when R-matrix entries meet quantum-torus entries.
pub fn lift_scalar(alg: &Arc<Algebra>, m: &Mat<QPoly>) -> Mat<QElement> {
    m.map(|p| QElement::scalar(alg, p))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn disc4() -> FatGraph {
        let spec: GraphSpec = serde_json::from_str(
            r#"{"vertices":[{"id":"c1","kind":"cusp"},{"id":"c2","kind":"cusp"},{"id":"ca","kind":"cusp"},
               {"id":"cb","kind":"cusp"},{"id":"v0","kind":"internal"},{"id":"v1","kind":"internal"}],
               "edges":[{"id":"p1","label":"pi1","kind":"cusp","ends":["c1","v0"]},
                        {"id":"p2","label":"pi2","kind":"cusp","ends":["c2","v1"]},
                        {"id":"a","label":"pia","kind":"cusp","ends":["ca","v0"]},
                        {"id":"b","label":"pib","kind":"cusp","ends":["cb","v1"]},
                        {"id":"E","label":"Z1","kind":"inner","ends":["v0","v1"]}],
               "cyclic":{"v0":["p1#1","E#0","a#1"],"v1":["E#1","b#1","p2#1"]}}"#,
        )
        .unwrap();
        FatGraph::build(&spec).unwrap()
    }

    #[test]
    fn fig2_commutators() {
        let g = disc4();
        let a = g.algebra();
        // printed: [pi1, Z1] = [pi2, Z1] = 1 unit, [pi1, pi2] = 0
        assert_eq!(PRINTED_COMMUTATOR_SIGN * a.skew_entry("pi1", "Z1").unwrap(), 1);
        assert_eq!(PRINTED_COMMUTATOR_SIGN * a.skew_entry("pi2", "Z1").unwrap(), 1);
        assert_eq!(a.skew_entry("pi1", "pi2").unwrap(), 0);
    }

    #[test]
    fn steps_and_tokens_agree() {
        let g = disc4();
        let w1 = g.walk_steps(&["p1", "E", "p2"]).unwrap();
        let w2 = g.walk_tokens(&["X:pi2", "L", "X:Z1", "R", "X:pi1"]).unwrap();
        assert_eq!(w1, w2);
        assert!(g.walk_tokens(&["X:pi2", "R", "X:Z1", "R", "X:pi1"]).is_err());
    }

    #[test]
    fn inverse_is_exact() {
        let g = disc4();
        let w = g.walk_steps(&["p1", "E", "p2"]).unwrap();
        let m = monodromy(&g, &w);
        let mi = monodromy_inverse(&g, &w);
        let one = Mat::identity(2, &QElement::zero(g.algebra()));
        assert_eq!(m.mul(&mi), one);
        assert_eq!(mi.mul(&m), one);
    }

    #[test]
    fn valence_violation() {
        let spec: GraphSpec = serde_json::from_str(
            r#"{"vertices":[{"id":"c1","kind":"cusp"},{"id":"c2","kind":"cusp"},{"id":"v0","kind":"internal"}],
               "edges":[{"id":"p1","kind":"cusp","ends":["c1","v0"]},{"id":"p2","kind":"cusp","ends":["c2","v0"]}],
               "cyclic":{"v0":["p1#1","p2#1"]}}"#,
        )
        .unwrap();
        assert!(matches!(FatGraph::build(&spec), Err(SurfaceError::Valence { .. })));
    }
}
