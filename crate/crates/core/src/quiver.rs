//! Quiver data model and combinatorial operations.
//!
//! Vertices are 1-based; the frozen vertices are exactly the tail
//! `m+1..=n`, where `m` is the principal count. Arrow multiplicity is
//! represented by parallel labeled arrows, because the potential engine
//! references individual arrows by label.

use crate::error::QuiverError;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub type VertexId = usize;
/// Index into [`Quiver::arrows`].
pub type ArrowId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    pub label: String,
    pub source: VertexId,
    pub target: VertexId,
    /// Grading weight; defaults to 1 (path-length grading).
    pub weight: i64,
}

impl Arrow {
    pub fn new(label: impl Into<String>, source: VertexId, target: VertexId) -> Self {
        Arrow { label: label.into(), source, target, weight: 1 }
    }

    pub fn weighted(label: impl Into<String>, source: VertexId, target: VertexId, weight: i64) -> Self {
        Arrow { label: label.into(), source, target, weight }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quiver {
    name: String,
    n: usize,
    m: usize,
    arrows: Vec<Arrow>,
    /// Rank of each arrow's label among all labels, fixing the canonical
    /// order used for cyclic-word keys.
    label_rank: Vec<usize>,
    two_cycle_free: bool,
}

impl Quiver {
    pub fn new(n: usize, m: usize, arrows: Vec<Arrow>) -> Result<Self, QuiverError> {
        Self::named("Q", n, m, arrows)
    }

    pub fn named(
        name: impl Into<String>,
        n: usize,
        m: usize,
        arrows: Vec<Arrow>,
    ) -> Result<Self, QuiverError> {
        if m == 0 || m > n {
            return Err(QuiverError::PrincipalOutOfRange { m, n });
        }
        let mut seen = BTreeSet::new();
        for a in &arrows {
            if a.source == a.target {
                return Err(QuiverError::Loop { label: a.label.clone(), vertex: a.source });
            }
            for v in [a.source, a.target] {
                if v < 1 || v > n {
                    return Err(QuiverError::VertexOutOfRange(v, n));
                }
            }
            if !seen.insert(a.label.clone()) {
                return Err(QuiverError::DuplicateLabel(a.label.clone()));
            }
        }
        let mut sorted: Vec<&str> = arrows.iter().map(|a| a.label.as_str()).collect();
        sorted.sort_unstable();
        let label_rank = arrows
            .iter()
            .map(|a| sorted.binary_search(&a.label.as_str()).unwrap())
            .collect();
        let mut q = Quiver {
            name: name.into(),
            n,
            m,
            arrows,
            label_rank,
            two_cycle_free: true,
        };
        q.two_cycle_free = q.compute_two_cycle_free();
        Ok(q)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    /// The principal count `m`; vertices `m+1..=n` are frozen.
    pub fn principal_count(&self) -> usize {
        self.m
    }

    pub fn is_frozen(&self, v: VertexId) -> bool {
        v > self.m
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow(&self, id: ArrowId) -> &Arrow {
        &self.arrows[id]
    }

    pub fn label_rank(&self, id: ArrowId) -> usize {
        self.label_rank[id]
    }

    pub fn find_arrow(&self, label: &str) -> Option<ArrowId> {
        self.arrows.iter().position(|a| a.label == label)
    }

    /// Number of arrows from `i` to `j`.
    pub fn arrow_count(&self, i: VertexId, j: VertexId) -> usize {
        self.arrows.iter().filter(|a| a.source == i && a.target == j).count()
    }

    /// Validity flag: true when no pair of opposite arrows exists.
    /// Intermediate premutation outputs may carry `false`.
    pub fn two_cycle_free(&self) -> bool {
        self.two_cycle_free
    }

    fn compute_two_cycle_free(&self) -> bool {
        self.two_cycle_witness().is_none()
    }

    /// Some pair of opposite arrows, if any.
    pub fn two_cycle_witness(&self) -> Option<(ArrowId, ArrowId)> {
        for (i, a) in self.arrows.iter().enumerate() {
            for (j, b) in self.arrows.iter().enumerate() {
                if a.source == b.target && a.target == b.source && i < j {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// True when some 2-cycle passes through `v`.
    pub fn has_two_cycle_at(&self, v: VertexId) -> bool {
        self.arrows.iter().any(|a| {
            a.source == v && self.arrows.iter().any(|b| b.source == a.target && b.target == v)
        })
    }

    pub fn arrows_out(&self, v: VertexId) -> Vec<ArrowId> {
        (0..self.arrows.len()).filter(|&id| self.arrows[id].source == v).collect()
    }

    pub fn arrows_in(&self, v: VertexId) -> Vec<ArrowId> {
        (0..self.arrows.len()).filter(|&id| self.arrows[id].target == v).collect()
    }

    pub fn is_acyclic(&self) -> bool {
        // Kahn's algorithm on the underlying digraph.
        let mut indeg = vec![0usize; self.n + 1];
        for a in &self.arrows {
            indeg[a.target] += 1;
        }
        let mut queue: Vec<VertexId> = (1..=self.n).filter(|&v| indeg[v] == 0).collect();
        let mut removed = 0;
        while let Some(v) = queue.pop() {
            removed += 1;
            for a in &self.arrows {
                if a.source == v {
                    indeg[a.target] -= 1;
                    if indeg[a.target] == 0 {
                        queue.push(a.target);
                    }
                }
            }
        }
        removed == self.n
    }

    pub fn exchange_matrix(&self) -> ExchangeMatrix {
        let mut e = ExchangeMatrix::zero(self.n, self.m);
        for i in 1..=self.n {
            for j in 1..=self.m {
                let v = self.arrow_count(j, i) as i64 - self.arrow_count(i, j) as i64;
                e.set(i, j, v);
            }
        }
        e
    }

    /// Fresh label not colliding with any existing one: `base`, then
    /// `base'`, `base''`, ...
    pub fn fresh_label(&self, base: &str, taken: &BTreeSet<String>) -> String {
        let mut label = base.to_string();
        while taken.contains(&label) || self.find_arrow(&label).is_some() {
            label.push('\'');
        }
        label
    }
}

/// The `n x m` exchange matrix, `b_ij = #(j -> i) - #(i -> j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExchangeMatrix {
    n: usize,
    m: usize,
    entries: Vec<i64>,
}

impl ExchangeMatrix {
    pub fn zero(n: usize, m: usize) -> Self {
        ExchangeMatrix { n, m, entries: vec![0; n * m] }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let n = rows.len();
        let m = if n == 0 { 0 } else { rows[0].len() };
        let mut e = Self::zero(n, m);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                e.set(i + 1, j + 1, v);
            }
        }
        e
    }

    pub fn rows(&self) -> usize {
        self.n
    }

    pub fn cols(&self) -> usize {
        self.m
    }

    /// 1-based access.
    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.entries[(i - 1) * self.m + (j - 1)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.entries[(i - 1) * self.m + (j - 1)] = v;
    }

    /// The top `m x m` block must be skew-symmetric.
    pub fn top_block_skew(&self) -> bool {
        (1..=self.m).all(|i| (1..=self.m).all(|j| self.entry(i, j) == -self.entry(j, i)))
    }

    /// Standard matrix mutation at a principal index `s`.
    pub fn mutate(&self, s: usize) -> ExchangeMatrix {
        assert!(s >= 1 && s <= self.m, "mutation index out of principal range");
        let mut out = ExchangeMatrix::zero(self.n, self.m);
        for i in 1..=self.n {
            for j in 1..=self.m {
                let b = self.entry(i, j);
                let v = if i == s || j == s {
                    -b
                } else {
                    let bis = self.entry(i, s);
                    let bsj = self.entry(s, j);
                    b + (bis.abs() * bsj + bis * bsj.abs()) / 2
                };
                out.set(i, j, v);
            }
        }
        out
    }
}

impl fmt::Display for ExchangeMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.n {
            let row: Vec<String> = (1..=self.m).map(|j| self.entry(i, j).to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimensionVector(pub Vec<i64>);

/// Ringel form `sum_i a_i b_i - sum_{arrows} a_{s(arrow)} b_{t(arrow)}`.
pub fn ringel_form(
    q: &Quiver,
    a: &DimensionVector,
    b: &DimensionVector,
) -> Result<i64, QuiverError> {
    let n = q.n_vertices();
    if a.0.len() != n {
        return Err(QuiverError::DimensionMismatch { got: a.0.len(), want: n });
    }
    if b.0.len() != n {
        return Err(QuiverError::DimensionMismatch { got: b.0.len(), want: n });
    }
    let diag: i64 = (0..n).map(|i| a.0[i] * b.0[i]).sum();
    let arr: i64 = q.arrows().iter().map(|ar| a.0[ar.source - 1] * b.0[ar.target - 1]).sum();
    Ok(diag - arr)
}

/// Combinatorial quiver mutation at a principal vertex `s`: add composite
/// arrows `[a.b]` for every length-2 path through `s`, reverse all arrows at
/// `s`, then cancel opposite arrow pairs maximally (smallest labels first).
pub fn mutate_quiver(q: &Quiver, s: VertexId) -> Result<Quiver, crate::MutationError> {
    use crate::MutationError;
    if s < 1 || s > q.n_vertices() {
        return Err(MutationError::VertexOutOfRange(s, q.n_vertices()));
    }
    if q.is_frozen(s) {
        return Err(MutationError::FrozenVertex(s));
    }
    if let Some((i, j)) = q.two_cycle_witness() {
        let v = q.arrow(i).source;
        return Err(MutationError::TwoCycleThroughVertex(
            v,
            q.arrow(i).label.clone(),
            q.arrow(j).label.clone(),
        ));
    }
    let mut arrows: Vec<Arrow> = Vec::new();
    let mut taken: BTreeSet<String> = BTreeSet::new();
    let mut push = |a: Arrow, taken: &mut BTreeSet<String>| {
        taken.insert(a.label.clone());
        arrows.push(a);
    };
    // Unchanged arrows.
    for a in q.arrows() {
        if a.source != s && a.target != s {
            push(a.clone(), &mut taken);
        }
    }
    // Composites [a.b] for b: j -> s, a: s -> k.
    for a in q.arrows().iter().filter(|a| a.source == s) {
        for b in q.arrows().iter().filter(|b| b.target == s) {
            let label = format!("[{}.{}]", a.label, b.label);
            push(
                Arrow::weighted(label, b.source, a.target, a.weight + b.weight),
                &mut taken,
            );
        }
    }
    // Reversals. Weight rules belong to the graded QP engine; the plain
    // combinatorial mutation keeps the original weight.
    for a in q.arrows().iter().filter(|a| a.source == s || a.target == s) {
        let mut label = format!("{}~", a.label);
        while taken.contains(&label) {
            label.push('~');
        }
        push(Arrow::weighted(label, a.target, a.source, a.weight), &mut taken);
    }
    // Deletion step: cancel opposite pairs maximally, removing smallest
    // labels first on both sides.
    let mut keep = vec![true; arrows.len()];
    for i in 1..=q.n_vertices() {
        for j in (i + 1)..=q.n_vertices() {
            let mut fwd: Vec<usize> = (0..arrows.len())
                .filter(|&k| arrows[k].source == i && arrows[k].target == j)
                .collect();
            let mut bwd: Vec<usize> = (0..arrows.len())
                .filter(|&k| arrows[k].source == j && arrows[k].target == i)
                .collect();
            fwd.sort_by(|&a, &b| arrows[a].label.cmp(&arrows[b].label));
            bwd.sort_by(|&a, &b| arrows[a].label.cmp(&arrows[b].label));
            let r = fwd.len().min(bwd.len());
            for &k in fwd.iter().take(r).chain(bwd.iter().take(r)) {
                keep[k] = false;
            }
        }
    }
    let arrows: Vec<Arrow> =
        arrows.into_iter().zip(keep).filter_map(|(a, k)| k.then_some(a)).collect();
    Ok(Quiver::named(q.name(), q.n_vertices(), q.principal_count(), arrows)
        .expect("mutation preserves structural invariants"))
}

/// Extend `q` with one frozen vertex and a single arrow into `marked`,
/// carrying weight 0 so gradings are preserved.
pub fn frame_quiver(q: &Quiver, marked: VertexId) -> Result<Quiver, QuiverError> {
    if marked < 1 || marked > q.n_vertices() {
        return Err(QuiverError::VertexOutOfRange(marked, q.n_vertices()));
    }
    let v = q.n_vertices() + 1;
    let label = q.fresh_label(&format!("fr{marked}"), &BTreeSet::new());
    let mut arrows = q.arrows().to_vec();
    arrows.push(Arrow::weighted(label, v, marked, 0));
    Quiver::named(q.name(), v, q.principal_count(), arrows)
}

/// Glue acyclic quivers onto `q`, identifying for each tree one of its
/// vertices with a vertex of `q`. All freshly added vertices are frozen.
/// The output has exactly the cycles of `q`.
pub fn glue_acyclic(
    q: &Quiver,
    trees: &[(Quiver, VertexId, VertexId)],
) -> Result<Quiver, QuiverError> {
    let mut arrows = q.arrows().to_vec();
    let mut n = q.n_vertices();
    let mut taken: BTreeSet<String> = arrows.iter().map(|a| a.label.clone()).collect();
    for (r, (tree, tv, qv)) in trees.iter().enumerate() {
        if !tree.is_acyclic() {
            return Err(QuiverError::TreeNotAcyclic(r));
        }
        if *tv < 1 || *tv > tree.n_vertices() {
            return Err(QuiverError::VertexOutOfRange(*tv, tree.n_vertices()));
        }
        if *qv < 1 || *qv > q.n_vertices() {
            return Err(QuiverError::VertexOutOfRange(*qv, q.n_vertices()));
        }
        // Map tree vertices into the glued quiver.
        let mut vmap: BTreeMap<VertexId, VertexId> = BTreeMap::new();
        vmap.insert(*tv, *qv);
        for v in 1..=tree.n_vertices() {
            if v != *tv {
                n += 1;
                vmap.insert(v, n);
            }
        }
        for a in tree.arrows() {
            let mut label = format!("g{r}.{}", a.label);
            while taken.contains(&label) {
                label.push('\'');
            }
            taken.insert(label.clone());
            arrows.push(Arrow::weighted(label, vmap[&a.source], vmap[&a.target], a.weight));
        }
    }
    Quiver::named(q.name(), n, q.principal_count(), arrows)
}

/// All directed simple cycles (no vertex visited twice) of length at most
/// `max_len`, as arrow-id words in product order (rightmost arrow traversed
/// first), one canonical rotation per class, in a deterministic order.
pub fn enumerate_simple_cycles(q: &Quiver, max_len: usize) -> Vec<Vec<ArrowId>> {
    let mut out: Vec<Vec<ArrowId>> = Vec::new();
    let n = q.n_vertices();
    // Classic smallest-base enumeration: each simple cycle is discovered
    // exactly once, from its minimal vertex, visiting only larger vertices.
    for base in 1..=n {
        let mut stack: Vec<ArrowId> = Vec::new();
        let mut visited = vec![false; n + 1];
        visited[base] = true;
        dfs_cycles(q, base, base, max_len, &mut stack, &mut visited, &mut out);
    }
    for w in &mut out {
        let canon = crate::path_algebra::canonical_rotation(q, w);
        *w = canon;
    }
    out.sort_by(|a, b| {
        a.len()
            .cmp(&b.len())
            .then_with(|| rank_seq(q, a).cmp(&rank_seq(q, b)))
    });
    out
}

fn rank_seq(q: &Quiver, w: &[ArrowId]) -> Vec<usize> {
    w.iter().map(|&id| q.label_rank(id)).collect()
}

fn dfs_cycles(
    q: &Quiver,
    base: VertexId,
    at: VertexId,
    max_len: usize,
    stack: &mut Vec<ArrowId>,
    visited: &mut Vec<bool>,
    out: &mut Vec<Vec<ArrowId>>,
) {
    for id in 0..q.arrows().len() {
        let a = q.arrow(id);
        if a.source != at {
            continue;
        }
        if a.target == base {
            if stack.len() + 1 >= 2 {
                // Traversal order -> product order by reversing.
                let mut word: Vec<ArrowId> = stack.clone();
                word.push(id);
                word.reverse();
                out.push(word);
            }
            continue;
        }
        if a.target < base || visited[a.target] || stack.len() + 1 >= max_len {
            continue;
        }
        visited[a.target] = true;
        stack.push(id);
        dfs_cycles(q, base, a.target, max_len, stack, visited, out);
        stack.pop();
        visited[a.target] = false;
    }
}
