//! Cayley diagrams built by breadth-first search over an oracle, checks for
//! regular and homogeneous labeled digraphs, and DOT/JSON export.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::oracle::{OracleError, WordOracle};
use crate::presentation::Presentation;
use crate::words::{free_reduce, Alphabet, Letter, Word};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CayleyError {
    #[error("oracle failed comparing '{left}' and '{right}': {source}")]
    Oracle { left: String, right: String, source: OracleError },
    #[error("diagram is not regular")]
    NotRegular,
    #[error("diagram is not connected")]
    Disconnected,
    #[error("diagram has no vertices")]
    Empty,
    #[error("invalid diagram: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CayleyVertex {
    pub word: Word,
    pub layer: usize,
}

/// An edge `g -> g·x` for the letter `x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CayleyEdge {
    pub from: usize,
    pub to: usize,
    pub letter: Letter,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CayleyDiagram {
    pub generators: Alphabet,
    /// Vertex 0 is the identity.
    pub vertices: Vec<CayleyVertex>,
    pub edges: Vec<CayleyEdge>,
    pub radius: Option<usize>,
    pub complete: bool,
}

struct Index<'a> {
    oracle: &'a dyn WordOracle,
    by_key: HashMap<String, usize>,
}

impl Index<'_> {
    fn find(&self, w: &Word, vertices: &[CayleyVertex], alphabet: &Alphabet) -> Result<Option<usize>, CayleyError> {
        if let Some(key) = self.oracle.canonical(w) {
            return Ok(self.by_key.get(&key).copied());
        }
        for (i, v) in vertices.iter().enumerate() {
            let same = self.oracle.equal(w, &v.word).map_err(|source| CayleyError::Oracle {
                left: alphabet.render(w),
                right: alphabet.render(&v.word),
                source,
            })?;
            if same {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    fn insert(&mut self, w: &Word, id: usize) {
        if let Some(key) = self.oracle.canonical(w) {
            self.by_key.insert(key, id);
        }
    }
}

/// The ball of the given radius about the identity. Vertices carry the
/// shortlex-least word reaching them; edges are all letter moves (both
/// signs) between vertices of the ball.
pub fn build_ball(p: &Presentation, oracle: &dyn WordOracle, radius: usize) -> Result<CayleyDiagram, CayleyError> {
    let alphabet = p.generators().clone();
    let letters: Vec<Letter> = (0..2 * p.generator_count()).map(Letter::from_column).collect();
    let mut index = Index { oracle, by_key: HashMap::new() };
    let mut vertices = vec![CayleyVertex { word: Word::empty(), layer: 0 }];
    index.insert(&Word::empty(), 0);

    // grow layer by layer; vertices are appended in shortlex order
    let mut start = 0;
    for layer in 0..radius {
        let end = vertices.len();
        for v in start..end {
            for &x in &letters {
                let mut w = vertices[v].word.clone();
                w.push(x);
                let w = free_reduce(&w);
                if index.find(&w, &vertices, &alphabet)?.is_none() {
                    let id = vertices.len();
                    index.insert(&w, id);
                    vertices.push(CayleyVertex { word: w, layer: layer + 1 });
                }
            }
        }
        if vertices.len() == end {
            break;
        }
        start = end;
    }

    let mut edges = Vec::new();
    let mut complete = true;
    for v in 0..vertices.len() {
        for &x in &letters {
            let mut w = vertices[v].word.clone();
            w.push(x);
            match index.find(&free_reduce(&w), &vertices, &alphabet)? {
                Some(to) => edges.push(CayleyEdge { from: v, to, letter: x }),
                None => complete = false,
            }
        }
    }
    Ok(CayleyDiagram { generators: alphabet, vertices, edges, radius: Some(radius), complete })
}

impl CayleyDiagram {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Number of vertices at each distance from the identity.
    pub fn layer_sizes(&self) -> Vec<usize> {
        let mut sizes = Vec::new();
        for v in &self.vertices {
            if sizes.len() <= v.layer {
                sizes.resize(v.layer + 1, 0);
            }
            sizes[v.layer] += 1;
        }
        sizes
    }

    /// Positive-letter edges as a labeled digraph; an involutive label keeps
    /// one edge per pair `{g, g·s}`.
    pub fn to_digraph(&self, involutions: &[String]) -> LabeledDigraph {
        let mut edges = Vec::new();
        for e in &self.edges {
            if e.letter.is_inverse() {
                continue;
            }
            let name = self.generators.name(e.letter.generator()).to_string();
            if involutions.contains(&name) && e.from > e.to {
                continue;
            }
            edges.push(LabeledEdge { from: e.from, to: e.to, label: name });
        }
        LabeledDigraph { vertices: self.vertices.len(), edges }
    }

    /// Label list for the checks, with the given names marked involutive.
    pub fn labels(&self, involutions: &[String]) -> Vec<LabelSpec> {
        self.generators
            .names()
            .iter()
            .map(|n| LabelSpec { name: n.clone(), involutive: involutions.contains(n) })
            .collect()
    }

    pub fn to_json(&self) -> CayleyJson {
        CayleyJson {
            generators: self.generators.names().to_vec(),
            vertices: self
                .vertices
                .iter()
                .enumerate()
                .map(|(id, v)| JsonVertex { id, word: self.generators.render(&v.word), layer: Some(v.layer) })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| JsonEdge {
                    from: e.from,
                    to: e.to,
                    label: self.generators.name(e.letter.generator()).to_string(),
                    sign: e.letter.exponent() as i8,
                })
                .collect(),
            radius: self.radius,
            complete: self.complete,
        }
    }

    pub fn from_json(j: &CayleyJson) -> Result<Self, CayleyError> {
        let generators = Alphabet::new(&j.generators).map_err(|e| CayleyError::Invalid(e.to_string()))?;
        let mut vertices = Vec::new();
        for (i, v) in j.vertices.iter().enumerate() {
            if v.id != i {
                return Err(CayleyError::Invalid(format!("vertex ids must be 0..n in order (found {} at {i})", v.id)));
            }
            let word = generators.parse_word(&v.word).map_err(|e| CayleyError::Invalid(e.to_string()))?;
            vertices.push(CayleyVertex { layer: v.layer.unwrap_or(word.len()), word });
        }
        let mut edges = Vec::new();
        for e in &j.edges {
            let g = generators
                .index(&e.label)
                .ok_or_else(|| CayleyError::Invalid(format!("unknown edge label '{}'", e.label)))?;
            if e.from >= vertices.len() || e.to >= vertices.len() || !(e.sign == 1 || e.sign == -1) {
                return Err(CayleyError::Invalid(format!("bad edge {} -> {}", e.from, e.to)));
            }
            edges.push(CayleyEdge { from: e.from, to: e.to, letter: Letter::new(g, e.sign < 0) });
        }
        Ok(CayleyDiagram { generators, vertices, edges, radius: j.radius, complete: j.complete })
    }

    /// DOT with one edge per inverse pair (the positive one); involutive
    /// labels are drawn once, undirected.
    pub fn to_dot(&self, involutions: &[String]) -> String {
        let names: Vec<String> = self.vertices.iter().map(|v| self.generators.render(&v.word)).collect();
        dot(&self.to_digraph(involutions), Some(&names), involutions)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonVertex {
    pub id: usize,
    pub word: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layer: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonEdge {
    pub from: usize,
    pub to: usize,
    pub label: String,
    pub sign: i8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CayleyJson {
    pub generators: Vec<String>,
    pub vertices: Vec<JsonVertex>,
    pub edges: Vec<JsonEdge>,
    pub radius: Option<usize>,
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledEdge {
    pub from: usize,
    pub to: usize,
    pub label: String,
}

/// A finite edge-labeled digraph. Edges of an involutive label stand for
/// undirected edges and are listed once.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledDigraph {
    pub vertices: usize,
    pub edges: Vec<LabeledEdge>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelSpec {
    pub name: String,
    #[serde(default)]
    pub involutive: bool,
}

impl LabeledDigraph {
    pub fn to_dot(&self, involutions: &[String]) -> String {
        dot(self, None, involutions)
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn dot(d: &LabeledDigraph, names: Option<&[String]>, involutions: &[String]) -> String {
    let mut out = String::from("digraph cayley {\n");
    for v in 0..d.vertices {
        match names {
            Some(n) => writeln!(out, "  v{v} [label=\"{}\"];", dot_escape(&n[v])).unwrap(),
            None => writeln!(out, "  v{v};").unwrap(),
        }
    }
    for e in &d.edges {
        let undirected = if involutions.contains(&e.label) { ", dir=none" } else { "" };
        writeln!(out, "  v{} -> v{} [label=\"{}\"{undirected}];", e.from, e.to, dot_escape(&e.label)).unwrap();
    }
    out.push_str("}\n");
    out
}

/// Per label: successor and predecessor maps, or the neighbour map for an
/// involutive label. `None` if some vertex has the wrong number of edges.
struct Moves {
    maps: Vec<Vec<usize>>,
}

fn moves(d: &LabeledDigraph, labels: &[LabelSpec]) -> Option<Moves> {
    const NONE: usize = usize::MAX;
    let n = d.vertices;
    let slot: HashMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.name.as_str(), i)).collect();
    // out, in per label; involutive labels use out only
    let mut maps = vec![vec![NONE; n]; 2 * labels.len()];
    for e in &d.edges {
        let &i = slot.get(e.label.as_str())?;
        if e.from >= n || e.to >= n {
            return None;
        }
        if labels[i].involutive {
            let nb = &mut maps[2 * i];
            if nb[e.from] != NONE || (e.from != e.to && nb[e.to] != NONE) {
                return None;
            }
            nb[e.from] = e.to;
            nb[e.to] = e.from;
        } else {
            if maps[2 * i][e.from] != NONE || maps[2 * i + 1][e.to] != NONE {
                return None;
            }
            maps[2 * i][e.from] = e.to;
            maps[2 * i + 1][e.to] = e.from;
        }
    }
    let mut kept = Vec::new();
    for (i, l) in labels.iter().enumerate() {
        let directions: &[usize] = if l.involutive { &[0] } else { &[0, 1] };
        for &dir in directions {
            let m = &maps[2 * i + dir];
            if m.contains(&NONE) {
                return None;
            }
            kept.push(m.clone());
        }
    }
    Some(Moves { maps: kept })
}

/// Every vertex has exactly one outgoing and one incoming edge per
/// non-involutive label, and exactly one incident edge per involutive label.
pub fn check_regular(d: &LabeledDigraph, labels: &[LabelSpec]) -> bool {
    moves(d, labels).is_some()
}

/// The label-preserving map sending vertex 0 to `target`, extended along
/// edges; `None` when the extension is ill-defined or not injective.
pub fn extension_map(
    d: &LabeledDigraph,
    labels: &[LabelSpec],
    target: usize,
) -> Result<Option<Vec<usize>>, CayleyError> {
    let m = moves(d, labels).ok_or(CayleyError::NotRegular)?;
    extend(&m, d.vertices, target)
}

fn extend(m: &Moves, n: usize, target: usize) -> Result<Option<Vec<usize>>, CayleyError> {
    const NONE: usize = usize::MAX;
    if n == 0 {
        return Err(CayleyError::Empty);
    }
    let mut phi = vec![NONE; n];
    let mut used = vec![false; n];
    phi[0] = target;
    used[target] = true;
    let mut queue = VecDeque::from([0usize]);
    let mut reached = 1;
    while let Some(x) = queue.pop_front() {
        for map in &m.maps {
            let (a, b) = (map[x], map[phi[x]]);
            if phi[a] == NONE {
                if used[b] {
                    return Ok(None);
                }
                phi[a] = b;
                used[b] = true;
                reached += 1;
                queue.push_back(a);
            } else if phi[a] != b {
                return Ok(None);
            }
        }
    }
    if reached != n {
        return Err(CayleyError::Disconnected);
    }
    Ok(Some(phi))
}

/// For a connected regular diagram: whether every vertex is the image of the
/// base vertex under a label-preserving automorphism.
pub fn check_homogeneous(d: &LabeledDigraph, labels: &[LabelSpec]) -> Result<bool, CayleyError> {
    let m = moves(d, labels).ok_or(CayleyError::NotRegular)?;
    for y in 0..d.vertices {
        if extend(&m, d.vertices, y)?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}
