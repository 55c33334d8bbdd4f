//! Two-valued measures on finite sets of rays.
//!
//! A two-valued measure assigns 0 or 1 to every ray so that each context
//! (a full orthogonal family of `d` rays) holds exactly one 1 and no two
//! orthogonal rays are both 1. Search is chronological backtracking with
//! unit propagation on the exactly-one constraints.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::{parse, HypergraphJson};
use crate::hilbert::Ray;
use crate::projective::ray_orthogonal;
use crate::tolerance::Tolerance;

const PERES_33: &str = include_str!("../data/ks33_c3.json");
const CABELLO_18: &str = include_str!("../data/ks18_c4.json");

#[derive(Clone, Debug)]
pub struct OrthoHypergraph {
    d: usize,
    rays: Vec<Ray>,
    contexts: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    neighbours: Vec<Vec<usize>>,
    contexts_of: Vec<Vec<usize>>,
}

fn dedupe(rays: Vec<Ray>, tol: &Tolerance) -> (Vec<Ray>, Vec<usize>) {
    let mut kept: Vec<Ray> = Vec::new();
    let mut index = Vec::with_capacity(rays.len());
    for r in rays {
        match kept.iter().position(|k| k.distance(&r) < tol.eps_eq) {
            Some(i) => index.push(i),
            None => {
                index.push(kept.len());
                kept.push(r);
            }
        }
    }
    (kept, index)
}

impl OrthoHypergraph {
    /// Deduplicates `rays`, takes every orthogonal pair as an edge, and every
    /// `d`-clique of the orthogonality graph as a context.
    pub fn build(rays: Vec<Ray>, d: usize, tol: &Tolerance) -> Result<Self> {
        let (rays, _) = Self::prepare(rays, d, tol)?;
        let edges = orthogonal_pairs(&rays, tol)?;
        let neighbours = adjacency(rays.len(), &edges);
        let contexts = cliques(&neighbours, d);
        Ok(Self::assemble(d, rays, contexts, edges, neighbours))
    }

    /// Like [`OrthoHypergraph::build`] but with the contexts given; each is
    /// checked to be a mutually orthogonal `d`-tuple.
    pub fn with_contexts(
        rays: Vec<Ray>,
        d: usize,
        contexts: Vec<Vec<usize>>,
        tol: &Tolerance,
    ) -> Result<Self> {
        let original = rays.len();
        let (rays, index) = Self::prepare(rays, d, tol)?;
        let edges = orthogonal_pairs(&rays, tol)?;
        let neighbours = adjacency(rays.len(), &edges);
        let mut mapped = Vec::with_capacity(contexts.len());
        for (ci, ctx) in contexts.iter().enumerate() {
            if ctx.len() != d {
                return Err(Error::Format(format!(
                    "context {ci} has {} members, expected {d}",
                    ctx.len()
                )));
            }
            let mut m: Vec<usize> = Vec::with_capacity(d);
            for &i in ctx {
                if i >= original {
                    return Err(Error::Format(format!("context {ci} names missing ray {i}")));
                }
                m.push(index[i]);
            }
            for a in 0..d {
                for b in a + 1..d {
                    if !neighbours[m[a]].contains(&m[b]) {
                        return Err(Error::Format(format!(
                            "context {ci}: rays {} and {} are not orthogonal",
                            ctx[a], ctx[b]
                        )));
                    }
                }
            }
            m.sort_unstable();
            mapped.push(m);
        }
        Ok(Self::assemble(d, rays, mapped, edges, neighbours))
    }

    pub fn from_json(file: &HypergraphJson, tol: &Tolerance) -> Result<Self> {
        let rays = file.rays()?;
        match &file.contexts {
            Some(c) => Self::with_contexts(rays, file.d, c.clone(), tol),
            None => Self::build(rays, file.d, tol),
        }
    }

    fn prepare(rays: Vec<Ray>, d: usize, tol: &Tolerance) -> Result<(Vec<Ray>, Vec<usize>)> {
        if d < 3 {
            return Err(Error::Precondition(format!(
                "hypergraphs need d >= 3, got {d}"
            )));
        }
        if let Some(bad) = rays.iter().find(|r| r.ambient() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: bad.ambient(),
            });
        }
        Ok(dedupe(rays, tol))
    }

    fn assemble(
        d: usize,
        rays: Vec<Ray>,
        contexts: Vec<Vec<usize>>,
        edges: Vec<(usize, usize)>,
        neighbours: Vec<Vec<usize>>,
    ) -> Self {
        let mut contexts_of = vec![Vec::new(); rays.len()];
        for (ci, ctx) in contexts.iter().enumerate() {
            for &r in ctx {
                contexts_of[r].push(ci);
            }
        }
        Self {
            d,
            rays,
            contexts,
            edges,
            neighbours,
            contexts_of,
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn rays(&self) -> &[Ray] {
        &self.rays
    }

    pub fn contexts(&self) -> &[Vec<usize>] {
        &self.contexts
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.rays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rays.is_empty()
    }
}

fn orthogonal_pairs(rays: &[Ray], tol: &Tolerance) -> Result<Vec<(usize, usize)>> {
    let mut edges = Vec::new();
    for i in 0..rays.len() {
        for j in i + 1..rays.len() {
            if ray_orthogonal(&rays[i], &rays[j], tol)? {
                edges.push((i, j));
            }
        }
    }
    Ok(edges)
}

fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(i, j) in edges {
        adj[i].push(j);
        adj[j].push(i);
    }
    for a in &mut adj {
        a.sort_unstable();
    }
    adj
}

/// All `size`-cliques, each listed once in increasing index order.
fn cliques(adj: &[Vec<usize>], size: usize) -> Vec<Vec<usize>> {
    fn grow(
        adj: &[Vec<usize>],
        size: usize,
        current: &mut Vec<usize>,
        candidates: &[usize],
        out: &mut Vec<Vec<usize>>,
    ) {
        if current.len() == size {
            out.push(current.clone());
            return;
        }
        for (pos, &v) in candidates.iter().enumerate() {
            let next: Vec<usize> = candidates[pos + 1..]
                .iter()
                .copied()
                .filter(|w| adj[v].binary_search(w).is_ok())
                .collect();
            if current.len() + 1 + next.len() < size {
                continue;
            }
            current.push(v);
            grow(adj, size, current, &next, out);
            current.pop();
        }
    }
    let all: Vec<usize> = (0..adj.len()).collect();
    let mut out = Vec::new();
    grow(adj, size, &mut Vec::new(), &all, &mut out);
    out
}

/// Ray index to value; valid assignments are total with values in `{0, 1}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureAssignment {
    pub values: BTreeMap<usize, u8>,
}

impl MeasureAssignment {
    pub fn get(&self, ray: usize) -> Option<u8> {
        self.values.get(&ray).copied()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchStatus {
    #[serde(rename = "SAT")]
    Sat,
    #[serde(rename = "UNSAT")]
    Unsat,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub status: SearchStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assignment: Option<MeasureAssignment>,
    pub nodes_explored: u64,
}

struct Search<'a> {
    h: &'a OrthoHypergraph,
    value: Vec<Option<bool>>,
    trail: Vec<usize>,
    nodes: u64,
}

impl Search<'_> {
    fn set(&mut self, v: usize, val: bool, pending: &mut Vec<usize>) -> bool {
        match self.value[v] {
            Some(old) => old == val,
            None => {
                self.value[v] = Some(val);
                self.trail.push(v);
                pending.push(v);
                true
            }
        }
    }

    /// Assigns `v` and closes under unit propagation; false on conflict.
    fn assign(&mut self, v: usize, val: bool) -> bool {
        let mut pending = Vec::new();
        if !self.set(v, val, &mut pending) {
            return false;
        }
        while let Some(u) = pending.pop() {
            if self.value[u] == Some(true) {
                for i in 0..self.h.neighbours[u].len() {
                    let w = self.h.neighbours[u][i];
                    if !self.set(w, false, &mut pending) {
                        return false;
                    }
                }
            } else {
                for i in 0..self.h.contexts_of[u].len() {
                    let ctx = &self.h.contexts[self.h.contexts_of[u][i]];
                    if ctx.iter().any(|&w| self.value[w] == Some(true)) {
                        continue;
                    }
                    let mut open = ctx.iter().filter(|&&w| self.value[w].is_none());
                    match (open.next(), open.next()) {
                        (None, _) => return false,
                        (Some(&only), None) if !self.set(only, true, &mut pending) => return false,
                        _ => {}
                    }
                }
            }
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        for v in self.trail.drain(mark..) {
            self.value[v] = None;
        }
    }

    fn solve(&mut self, order: &[usize]) -> bool {
        self.nodes += 1;
        let Some(&v) = order.iter().find(|&&v| self.value[v].is_none()) else {
            return true;
        };
        for val in [true, false] {
            let mark = self.trail.len();
            if self.assign(v, val) && self.solve(order) {
                return true;
            }
            self.undo(mark);
        }
        false
    }
}

/// Backtracking search branching on rays in index order.
pub fn find_two_valued_measure(h: &OrthoHypergraph) -> SearchReport {
    let order: Vec<usize> = (0..h.len()).collect();
    find_two_valued_measure_with_order(h, &order)
}

/// As [`find_two_valued_measure`], branching on rays in `order` (a
/// permutation of the ray indices).
pub fn find_two_valued_measure_with_order(h: &OrthoHypergraph, order: &[usize]) -> SearchReport {
    let mut s = Search {
        h,
        value: vec![None; h.len()],
        trail: Vec::new(),
        nodes: 0,
    };
    if s.solve(order) {
        let values = s
            .value
            .iter()
            .enumerate()
            .map(|(i, v)| (i, u8::from(v.expect("search assigns every ray"))))
            .collect();
        SearchReport {
            status: SearchStatus::Sat,
            assignment: Some(MeasureAssignment { values }),
            nodes_explored: s.nodes,
        }
    } else {
        SearchReport {
            status: SearchStatus::Unsat,
            assignment: None,
            nodes_explored: s.nodes,
        }
    }
}

/// Exactly one 1 per context and no orthogonal pair of 1s.
pub fn verify_assignment(h: &OrthoHypergraph, m: &MeasureAssignment) -> Result<bool> {
    let mut values = Vec::with_capacity(h.len());
    for i in 0..h.len() {
        values.push(m.get(i).ok_or(Error::PartialAssignment(i))?);
    }
    if values.iter().any(|&v| v > 1) {
        return Ok(false);
    }
    let contexts_ok = h
        .contexts
        .iter()
        .all(|c| c.iter().filter(|&&r| values[r] == 1).count() == 1);
    let edges_ok = h.edges.iter().all(|&(a, b)| values[a] + values[b] <= 1);
    Ok(contexts_ok && edges_ok)
}

fn load(text: &str, tol: &Tolerance) -> Result<OrthoHypergraph> {
    OrthoHypergraph::from_json(&parse::<HypergraphJson>(text)?, tol)
}

/// Peres' 33 rays in `C^3` with components in `{0, ±1, ±√2}`; contexts are
/// recomputed from orthogonality.
pub fn peres_33(tol: &Tolerance) -> Result<OrthoHypergraph> {
    load(PERES_33, tol)
}

/// The 18 rays and 9 contexts in `C^4` of Cabello, Estebaranz and
/// García-Alcaine; each ray lies in exactly two contexts.
pub fn cabello_18(tol: &Tolerance) -> Result<OrthoHypergraph> {
    load(CABELLO_18, tol)
}

pub fn peres_33_json() -> &'static str {
    PERES_33
}

pub fn cabello_18_json() -> &'static str {
    CABELLO_18
}
