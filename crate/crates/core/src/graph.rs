//! Undirected simple graphs: the genome that the hardness evolvers mutate.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::RngStream;

/// Undirected simple graph on vertices `0..vertex_count`.
///
/// Edges are stored canonically as `(u, w)` with `u < w`, so two graphs with
/// the same edge set compare equal and serialize identically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    vertex_count: usize,
    edges: BTreeSet<(usize, usize)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MutationKind {
    Insert,
    Delete,
    Move,
}

impl MutationKind {
    pub const ALL: [MutationKind; 3] = [
        MutationKind::Insert,
        MutationKind::Delete,
        MutationKind::Move,
    ];
}

fn canonical(u: usize, w: usize) -> (usize, usize) {
    if u < w {
        (u, w)
    } else {
        (w, u)
    }
}

/// Maps an index in `0..v(v-1)/2` to the pair it denotes in lexicographic order.
fn pair_at(v: usize, mut idx: usize) -> (usize, usize) {
    for u in 0..v {
        let row = v - u - 1;
        if idx < row {
            return (u, u + 1 + idx);
        }
        idx -= row;
    }
    unreachable!("pair index out of range")
}

impl Graph {
    /// Edgeless graph. `vertex_count` must be positive.
    pub fn new(vertex_count: usize) -> Result<Self> {
        if vertex_count == 0 {
            return Err(invalid("a graph needs at least one vertex"));
        }
        Ok(Self {
            vertex_count,
            edges: BTreeSet::new(),
        })
    }

    pub fn from_edges<I>(vertex_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Self::new(vertex_count)?;
        for (u, w) in edges {
            g.add_edge(u, w)?;
        }
        Ok(g)
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(invalid("a cycle needs at least three vertices"));
        }
        Self::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    pub fn path(n: usize) -> Result<Self> {
        Self::from_edges(n, (1..n).map(|i| (i - 1, i)))
    }

    pub fn complete(n: usize) -> Result<Self> {
        Self::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |w| (u, w))))
    }

    /// The star K_{1,leaves} with centre 0.
    pub fn star(leaves: usize) -> Result<Self> {
        Self::from_edges(leaves + 1, (1..=leaves).map(|i| (0, i)))
    }

    /// Adds an edge, rejecting self-loops, duplicates and out-of-range endpoints.
    pub fn add_edge(&mut self, u: usize, w: usize) -> Result<()> {
        if u >= self.vertex_count || w >= self.vertex_count {
            return Err(invalid(format!(
                "edge ({u}, {w}) out of range for {} vertices",
                self.vertex_count
            )));
        }
        if u == w {
            return Err(invalid(format!("self-loop at vertex {u}")));
        }
        if !self.edges.insert(canonical(u, w)) {
            return Err(invalid(format!("duplicate edge ({u}, {w})")));
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn max_edges(&self) -> usize {
        max_edges(self.vertex_count)
    }

    pub fn has_edge(&self, u: usize, w: usize) -> bool {
        u != w && self.edges.contains(&canonical(u, w))
    }

    /// Edges in canonical lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count];
        for &(u, w) in &self.edges {
            deg[u] += 1;
            deg[w] += 1;
        }
        deg
    }

    pub fn degree(&self, u: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == u || b == u)
            .count()
    }

    /// Average degree 2e/v.
    pub fn average_degree(&self) -> f64 {
        2.0 * self.edge_count() as f64 / self.vertex_count as f64
    }

    pub fn neighbors(&self, u: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| match (a == u, b == u) {
                (true, _) => Some(b),
                (_, true) => Some(a),
                _ => None,
            })
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for &(u, w) in &self.edges {
            adj[u].push(w);
            adj[w].push(u);
        }
        let mut seen = vec![false; self.vertex_count];
        let mut stack = vec![0];
        seen[0] = true;
        let mut reached = 1;
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    stack.push(w);
                }
            }
        }
        reached == self.vertex_count
    }

    fn unoccupied_count(&self) -> usize {
        self.max_edges() - self.edge_count()
    }

    /// The `idx`-th absent pair in lexicographic order, skipping `also_skip`.
    fn nth_unoccupied(&self, mut idx: usize, also_skip: Option<(usize, usize)>) -> (usize, usize) {
        for u in 0..self.vertex_count {
            for w in u + 1..self.vertex_count {
                if self.edges.contains(&(u, w)) || also_skip == Some((u, w)) {
                    continue;
                }
                if idx == 0 {
                    return (u, w);
                }
                idx -= 1;
            }
        }
        unreachable!("unoccupied pair index out of range")
    }

    fn nth_edge(&self, idx: usize) -> (usize, usize) {
        *self.edges.iter().nth(idx).expect("edge index out of range")
    }

    pub fn is_applicable(&self, kind: MutationKind) -> bool {
        match kind {
            MutationKind::Insert => self.unoccupied_count() > 0,
            MutationKind::Delete => self.edge_count() > 0,
            MutationKind::Move => self.edge_count() > 0 && self.unoccupied_count() > 0,
        }
    }
}

pub fn max_edges(v: usize) -> usize {
    v * v.saturating_sub(1) / 2
}

/// Uniform random simple graph with exactly `e` edges.
pub fn random_graph(v: usize, e: usize, rng: &mut RngStream) -> Result<Graph> {
    let mut g = Graph::new(v)?;
    let total = max_edges(v);
    if e > total {
        return Err(invalid(format!(
            "{e} edges requested but {v} vertices admit at most {total}"
        )));
    }
    for idx in index::sample(rng, total, e) {
        g.edges.insert(pair_at(v, idx));
    }
    Ok(g)
}

/// Initial edge count for hardness forging.
///
/// For 12, 16 and 20 vertices this returns 15, 23 and 31, the counts used in
/// the published hard-graph experiments. Elsewhere it uses the Hamiltonicity
/// threshold `floor(v (ln v + ln ln v) / 2)`.
pub fn ks_edge_count(v: usize) -> Result<usize> {
    match v {
        0..=2 => Err(invalid(format!(
            "edge count threshold needs v >= 3, got {v}"
        ))),
        12 => Ok(15),
        16 => Ok(23),
        20 => Ok(31),
        _ => {
            let vf = v as f64;
            let e = (vf * (vf.ln() + vf.ln().ln()) / 2.0).floor() as usize;
            Ok(e.min(max_edges(v)))
        }
    }
}

/// Applies one elementary mutation, returning the mutated copy.
///
/// `Move` deletes a uniformly chosen edge and reinserts it at a uniformly
/// chosen pair that was unoccupied before the deletion, so the new edge always
/// differs from the removed one.
pub fn mutate(g: &Graph, kind: MutationKind, rng: &mut RngStream) -> Result<Graph> {
    if !g.is_applicable(kind) {
        return Err(Error::MutationInapplicable(kind));
    }
    let mut out = g.clone();
    match kind {
        MutationKind::Insert => {
            let pair = g.nth_unoccupied(rng.index(g.unoccupied_count()), None);
            out.edges.insert(pair);
        }
        MutationKind::Delete => {
            let edge = g.nth_edge(rng.index(g.edge_count()));
            out.edges.remove(&edge);
        }
        MutationKind::Move => {
            let edge = g.nth_edge(rng.index(g.edge_count()));
            let pair = g.nth_unoccupied(rng.index(g.unoccupied_count()), Some(edge));
            out.edges.remove(&edge);
            out.edges.insert(pair);
        }
    }
    Ok(out)
}

/// Applies one mutation whose kind is drawn uniformly from the kinds that are
/// applicable to `g`. Returns `None` when no kind applies (single vertex).
pub fn mutate_random(g: &Graph, rng: &mut RngStream) -> Option<(Graph, MutationKind)> {
    let kinds: Vec<MutationKind> = MutationKind::ALL
        .into_iter()
        .filter(|&k| g.is_applicable(k))
        .collect();
    if kinds.is_empty() {
        return None;
    }
    let kind = kinds[rng.index(kinds.len())];
    let child = mutate(g, kind, rng).expect("kind was checked applicable");
    Some((child, kind))
}

/// Applies `count` random mutations in sequence; returns the result and the
/// number of mutations that were actually applied.
pub fn mutate_many(g: &Graph, count: usize, rng: &mut RngStream) -> (Graph, usize) {
    let mut cur = g.clone();
    let mut applied = 0;
    for _ in 0..count {
        if let Some((next, _)) = mutate_random(&cur, rng) {
            cur = next;
            applied += 1;
        }
    }
    (cur, applied)
}

fn parse_usize(tok: &str, line: usize, what: &str) -> Result<usize> {
    tok.parse().map_err(|_| Error::Parse {
        line,
        message: format!("expected {what}, found {tok:?}"),
    })
}

fn parse_pair<'a>(
    mut toks: impl Iterator<Item = &'a str>,
    line: usize,
    what: [&str; 2],
) -> Result<(usize, usize)> {
    let mut next = |name: &str| {
        toks.next().ok_or_else(|| Error::Parse {
            line,
            message: format!("missing {name}"),
        })
    };
    let a = parse_usize(next(what[0])?, line, what[0])?;
    let b = parse_usize(next(what[1])?, line, what[1])?;
    if let Some(extra) = toks.next() {
        return Err(Error::Parse {
            line,
            message: format!("unexpected trailing token {extra:?}"),
        });
    }
    Ok((a, b))
}

/// Parses the `v e` header followed by `e` lines of `u w` (0-based).
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing header".into(),
    })?;
    let (v, e) = parse_pair(
        header.split_whitespace(),
        hline,
        ["vertex count", "edge count"],
    )?;
    if v == 0 {
        return Err(Error::Parse {
            line: hline,
            message: "vertex count must be positive".into(),
        });
    }
    let mut g = Graph::new(v)?;
    let mut last_line = hline;
    for (lno, l) in lines {
        last_line = lno;
        if g.edge_count() == e {
            return Err(Error::Parse {
                line: lno,
                message: format!("more edge lines than the {e} declared"),
            });
        }
        let (u, w) = parse_pair(l.split_whitespace(), lno, ["endpoint", "endpoint"])?;
        g.add_edge(u, w).map_err(|err| Error::Parse {
            line: lno,
            message: match err {
                Error::InvalidArgument(m) => m,
                other => other.to_string(),
            },
        })?;
    }
    if g.edge_count() != e {
        return Err(Error::Parse {
            line: last_line,
            message: format!(
                "header declares {e} edges but {} were listed",
                g.edge_count()
            ),
        });
    }
    Ok(g)
}

pub fn serialize_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    writeln!(out, "{} {}", g.vertex_count(), g.edge_count()).unwrap();
    for (u, w) in g.edges() {
        writeln!(out, "{u} {w}").unwrap();
    }
    out
}
