//! Backtracking decision procedure for the undirected Hamiltonian cycle problem.
//!
//! The search grows a single path from a minimum-degree start vertex, trying
//! low-degree neighbours first. Between steps it prunes edges to a fixed point:
//!
//! * neighbour pruning: a vertex of degree two forces both of its edges, and a
//!   vertex with two forced edges loses every other incident edge;
//! * path pruning: the chord joining the two ends of a forced path is removed,
//!   unless the path already spans every vertex.
//!
//! After pruning, the state is rejected if some vertex has degree below two,
//! more than two forced edges, or if the graph is disconnected.
//!
//! The number of calls to the recursive extension step (root included) is
//! reported as the hardness of the instance.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::graph::Graph;

pub const DEFAULT_RECURSION_CAP: u64 = 100_000_000;

/// Largest graph the bitset solver accepts.
pub const MAX_SOLVER_VERTICES: usize = 64;

/// Largest graph the permutation oracle accepts.
pub const MAX_BRUTE_FORCE_VERTICES: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Hamiltonian,
    NonHamiltonian,
    Aborted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub decision: Decision,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Vec<usize>>,
    pub recursions: u64,
    pub cap_hit: bool,
}

/// Which pruning rules are active. Both are on by default; switching either
/// off never changes a decision, only the amount of search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pruning {
    pub neighbor: bool,
    pub path: bool,
}

impl Default for Pruning {
    fn default() -> Self {
        Self {
            neighbor: true,
            path: true,
        }
    }
}

impl Pruning {
    pub const NONE: Pruning = Pruning {
        neighbor: false,
        path: false,
    };
}

pub fn decide(g: &Graph, recursion_cap: u64) -> Result<SolveOutcome> {
    decide_with(g, recursion_cap, Pruning::default())
}

pub fn decide_with(g: &Graph, recursion_cap: u64, pruning: Pruning) -> Result<SolveOutcome> {
    let n = g.vertex_count();
    if n > MAX_SOLVER_VERTICES {
        return Err(invalid(format!(
            "solver supports at most {MAX_SOLVER_VERTICES} vertices, got {n}"
        )));
    }
    if recursion_cap == 0 {
        return Err(invalid("recursion cap must be positive"));
    }
    let mut adj = vec![0u64; n];
    for (u, w) in g.edges() {
        adj[u] |= bit(w);
        adj[w] |= bit(u);
    }
    let mut search = Search {
        n,
        pruning,
        cap: recursion_cap,
        recursions: 0,
    };
    let root = State {
        adj,
        forced: vec![0; n],
    };
    let outcome = match search.extend(root, Vec::with_capacity(n)) {
        Flow::Found(cycle) => SolveOutcome {
            decision: Decision::Hamiltonian,
            witness: Some(cycle),
            recursions: search.recursions,
            cap_hit: false,
        },
        Flow::Exhausted => SolveOutcome {
            decision: Decision::NonHamiltonian,
            witness: None,
            recursions: search.recursions,
            cap_hit: false,
        },
        Flow::Abort => SolveOutcome {
            decision: Decision::Aborted,
            witness: None,
            recursions: recursion_cap,
            cap_hit: true,
        },
    };
    debug_assert!(outcome.witness.as_ref().is_none_or(|w| check_witness(g, w)));
    Ok(outcome)
}

#[inline]
fn bit(u: usize) -> u64 {
    1u64 << u
}

fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            return None;
        }
        let u = mask.trailing_zeros() as usize;
        mask &= mask - 1;
        Some(u)
    })
}

#[derive(Clone)]
struct State {
    adj: Vec<u64>,
    forced: Vec<u64>,
}

impl State {
    fn degree(&self, u: usize) -> u32 {
        self.adj[u].count_ones()
    }

    fn force(&mut self, u: usize, w: usize) {
        self.forced[u] |= bit(w);
        self.forced[w] |= bit(u);
    }

    fn remove(&mut self, u: usize, w: usize) {
        self.adj[u] &= !bit(w);
        self.adj[w] &= !bit(u);
    }

    fn connected(&self) -> bool {
        let n = self.adj.len();
        let all = if n == 64 { u64::MAX } else { bit(n) - 1 };
        let mut seen = 1u64;
        let mut frontier = 1u64;
        while frontier != 0 {
            let mut next = 0;
            for u in bits(frontier) {
                next |= self.adj[u];
            }
            frontier = next & !seen;
            seen |= frontier;
        }
        seen == all
    }
}

enum Flow {
    Found(Vec<usize>),
    Exhausted,
    Abort,
}

struct Search {
    n: usize,
    pruning: Pruning,
    cap: u64,
    recursions: u64,
}

impl Search {
    fn extend(&mut self, mut st: State, mut path: Vec<usize>) -> Flow {
        if self.recursions == self.cap {
            return Flow::Abort;
        }
        self.recursions += 1;

        if !self.prune(&mut st) {
            return Flow::Exhausted;
        }

        if path.is_empty() {
            let start = (0..self.n)
                .min_by_key(|&u| (st.degree(u), u))
                .expect("graph has vertices");
            path.push(start);
        }
        let start = path[0];
        let end = *path.last().unwrap();
        if path.len() == self.n {
            return if st.adj[end] & bit(start) != 0 {
                Flow::Found(path)
            } else {
                Flow::Exhausted
            };
        }

        let on_path = path.iter().fold(0u64, |m, &u| m | bit(u));
        // A forced edge leaving the end is the only admissible extension.
        let ahead = st.forced[end] & !on_path;
        let choices = if ahead != 0 {
            bit(ahead.trailing_zeros() as usize)
        } else {
            st.adj[end] & !on_path
        };
        let mut candidates: Vec<usize> = bits(choices).collect();
        candidates.sort_by_key(|&w| (st.degree(w), w));
        for w in candidates {
            let mut child = st.clone();
            child.force(end, w);
            let mut child_path = path.clone();
            child_path.push(w);
            match self.extend(child, child_path) {
                Flow::Exhausted => {}
                done => return done,
            }
        }
        Flow::Exhausted
    }

    /// Prunes to a fixed point. Returns `false` if the state admits no
    /// Hamiltonian cycle.
    fn prune(&self, st: &mut State) -> bool {
        let n = self.n;
        loop {
            let mut changed = false;

            for u in 0..n {
                if st.degree(u) < 2 || st.forced[u].count_ones() > 2 {
                    return false;
                }
            }

            if self.pruning.neighbor {
                for u in 0..n {
                    if st.degree(u) == 2 && st.forced[u] != st.adj[u] {
                        for w in bits(st.adj[u] & !st.forced[u]) {
                            st.force(u, w);
                        }
                        changed = true;
                    }
                }
                for u in 0..n {
                    let fc = st.forced[u].count_ones();
                    if fc > 2 {
                        return false;
                    }
                    if fc == 2 && st.adj[u] != st.forced[u] {
                        for w in bits(st.adj[u] & !st.forced[u]) {
                            st.remove(u, w);
                        }
                        changed = true;
                    }
                }
            }

            if self.pruning.path {
                let mut visited = 0u64;
                for a in 0..n {
                    if visited & bit(a) != 0 || st.forced[a].count_ones() != 1 {
                        continue;
                    }
                    let (b, len) = segment_end(&st.forced, a);
                    visited |= bit(a) | bit(b);
                    if len > 2 && len < n && st.adj[a] & bit(b) != 0 {
                        st.remove(a, b);
                        changed = true;
                    }
                }
            }

            if !changed {
                break;
            }
        }

        (0..n).all(|u| st.degree(u) >= 2) && st.connected()
    }
}

/// Walks the forced path starting at endpoint `a`; returns the other endpoint
/// and the number of vertices on the path.
fn segment_end(forced: &[u64], a: usize) -> (usize, usize) {
    let mut prev = a;
    let mut cur = (forced[a]).trailing_zeros() as usize;
    let mut len = 2;
    loop {
        let ahead = forced[cur] & !bit(prev);
        if ahead == 0 {
            return (cur, len);
        }
        prev = cur;
        cur = ahead.trailing_zeros() as usize;
        len += 1;
    }
}

/// True iff `cycle` lists every vertex exactly once and consecutive vertices,
/// including last-to-first, are adjacent.
pub fn check_witness(g: &Graph, cycle: &[usize]) -> bool {
    let n = g.vertex_count();
    if n < 3 || cycle.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &u in cycle {
        if u >= n || seen[u] {
            return false;
        }
        seen[u] = true;
    }
    (0..n).all(|i| g.has_edge(cycle[i], cycle[(i + 1) % n]))
}

/// Exhaustive oracle: tries every ordering of the vertices with vertex 0
/// fixed in front.
pub fn brute_force_decide(g: &Graph) -> Result<bool> {
    let n = g.vertex_count();
    if n > MAX_BRUTE_FORCE_VERTICES {
        return Err(invalid(format!(
            "permutation oracle supports at most {MAX_BRUTE_FORCE_VERTICES} vertices, got {n}"
        )));
    }
    if n < 3 {
        return Ok(false);
    }
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        if check_witness(g, &perm) {
            return Ok(true);
        }
        if !next_permutation(&mut perm[1..]) {
            return Ok(false);
        }
    }
}

fn next_permutation(xs: &mut [usize]) -> bool {
    if xs.len() < 2 {
        return false;
    }
    let mut i = xs.len() - 1;
    while i > 0 && xs[i - 1] >= xs[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = xs.len() - 1;
    while xs[j] <= xs[i - 1] {
        j -= 1;
    }
    xs.swap(i - 1, j);
    xs[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn petersen() -> Graph {
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
        Graph::from_edges(10, outer.chain(spokes).chain(inner)).unwrap()
    }

    #[test]
    fn cycle_is_hamiltonian() {
        let c5 = Graph::cycle(5).unwrap();
        let out = decide(&c5, DEFAULT_RECURSION_CAP).unwrap();
        assert_eq!(out.decision, Decision::Hamiltonian);
        assert!(check_witness(&c5, out.witness.as_ref().unwrap()));
        assert!(!out.cap_hit);
    }

    #[test]
    fn path_rejected_at_root() {
        let out = decide(&Graph::path(4).unwrap(), DEFAULT_RECURSION_CAP).unwrap();
        assert_eq!(out.decision, Decision::NonHamiltonian);
        assert_eq!(out.recursions, 1);
        assert!(out.witness.is_none());
    }

    #[test]
    fn disconnected_rejected_at_root() {
        let two_triangles =
            Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        let out = decide(&two_triangles, DEFAULT_RECURSION_CAP).unwrap();
        assert_eq!(out.decision, Decision::NonHamiltonian);
        assert_eq!(out.recursions, 1);
    }

    #[test]
    fn petersen_is_not_hamiltonian() {
        let p = petersen();
        assert!(p.degrees().iter().all(|&d| d == 3));
        assert!(!brute_force_decide(&p).unwrap());
        assert_eq!(
            decide(&p, DEFAULT_RECURSION_CAP).unwrap().decision,
            Decision::NonHamiltonian
        );
    }

    #[test]
    fn complete_graphs() {
        for n in 3..=8 {
            let k = Graph::complete(n).unwrap();
            let out = decide(&k, DEFAULT_RECURSION_CAP).unwrap();
            assert_eq!(out.decision, Decision::Hamiltonian, "K{n}");
        }
    }

    #[test]
    fn cap_aborts_with_cap_recursions() {
        let p = petersen();
        let full = decide(&p, DEFAULT_RECURSION_CAP).unwrap();
        assert!(full.recursions > 1);
        let out = decide(&p, 1).unwrap();
        assert_eq!(out.decision, Decision::Aborted);
        assert!(out.cap_hit);
        assert_eq!(out.recursions, 1);
        let exact = decide(&p, full.recursions).unwrap();
        assert_eq!(exact, full);
        assert!(decide(&p, 0).is_err());
    }

    #[test]
    fn witness_checks() {
        let c5 = Graph::cycle(5).unwrap();
        assert!(check_witness(&c5, &[0, 1, 2, 3, 4]));
        assert!(!check_witness(&c5, &[0, 1, 2, 4, 3]));
        assert!(!check_witness(&c5, &[0, 1, 2, 3, 3]));
        assert!(!check_witness(&c5, &[0, 1, 2, 3, 9]));
        let k4 = Graph::complete(4).unwrap();
        assert!(!check_witness(&k4, &[0, 1, 2]));
        assert!(check_witness(&k4, &[3, 1, 0, 2]));
    }

    #[test]
    fn oracle_small_cases() {
        assert!(brute_force_decide(&Graph::cycle(6).unwrap()).unwrap());
        assert!(!brute_force_decide(&Graph::star(3).unwrap()).unwrap());
        assert!(!brute_force_decide(&Graph::complete(2).unwrap()).unwrap());
        assert!(brute_force_decide(&Graph::new(11).unwrap()).is_err());
    }

    #[test]
    fn too_many_vertices_rejected() {
        assert!(decide(&Graph::new(65).unwrap(), 10).is_err());
    }
}
