//! Quivers with potentials: premutation, splitting into trivial and reduced
//! summands, full mutation, truncation-order bookkeeping and nondegeneracy
//! verification along vertex sequences.

use crate::error::{MutationError, ReduceError};
use crate::path_algebra::{
    canonical_rotation, check_homogeneous, Grading, NCPoly, Potential, Trunc, Word,
};
use crate::quiver::{Arrow, ArrowId, Quiver, VertexId};
use crate::subst::Substitution;
use crate::{rat_int, Rat};
use num::{One, Zero};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QP {
    pub quiver: Quiver,
    pub potential: Potential,
    pub grading: Option<Grading>,
}

impl QP {
    pub fn new(
        quiver: Quiver,
        potential: Potential,
        grading: Option<Grading>,
    ) -> Result<Self, MutationError> {
        if let Some(g) = &grading {
            check_homogeneous(&quiver, &potential, g)
                .map_err(|f| MutationError::GradingBroken(format!("{} cycles off degree {}", f.offenders.len(), f.expected)))?;
        }
        Ok(QP { quiver, potential, grading })
    }

    pub fn ungraded(quiver: Quiver, potential: Potential) -> Self {
        QP { quiver, potential, grading: None }
    }
}

/// `ceil((3/2)^t * n)`: the input truncation order that determines a
/// mutated potential to order `n` after `t` mutation steps.
pub fn required_order(t: u32, n: u32) -> u32 {
    assert!(t <= 40, "sequence length out of supported range");
    let num: u128 = 3u128.pow(t) * n as u128;
    let den: u128 = 2u128.pow(t);
    ((num + den - 1) / den) as u32
}

/// Largest `n` whose mutated truncation is determined by input exact to
/// order `v`: integer cycle lengths make `floor(3n/2) <= v` sufficient.
pub(crate) fn prem_valid(v: u32) -> u32 {
    (2 * v + 1) / 3
}

/// Output of [`split_reduce`].
#[derive(Debug, Clone)]
pub struct SplitReduce {
    /// Cancelling arrow pairs `(a, b)` in the input quiver's id space.
    pub trivial: Vec<(ArrowId, ArrowId)>,
    pub reduced: QP,
    /// Right-equivalence realizing the splitting, as a substitution on the
    /// input quiver: applied to the input potential and truncated at
    /// `order`, it equals trivial quadratic part + reduced potential.
    pub substitution: Substitution,
    /// Input arrow id -> reduced arrow id, for surviving arrows.
    pub arrow_map: BTreeMap<ArrowId, ArrowId>,
    /// Working order of the reduction.
    pub order: u32,
}

fn two_cycle_key(q: &Quiver, a: ArrowId, b: ArrowId) -> Word {
    canonical_rotation(q, &[a, b])
}

/// Split a QP into its trivial part and reduced part, working modulo cycles
/// of length greater than `order`.
///
/// The quadratic part is first brought to canonical pairing form by an
/// invertible linear change among parallel arrows, then cross terms are
/// eliminated order by order; each pass strictly raises the lowest unsplit
/// order, so at most `order` passes run.
pub fn split_reduce(qp: &QP, order: u32) -> Result<SplitReduce, ReduceError> {
    let q = &qp.quiver;
    if !qp.potential.valid_to().at_least(order) {
        return Err(ReduceError::InsufficientOrder {
            have: qp.potential.valid_to().finite().unwrap_or(0),
            need: order,
        });
    }
    let order_us = order as usize;
    let input_infinite = qp.potential.valid_to() == Trunc::Infinite;
    let mut dropped = qp.potential.max_len() > order_us;
    let mut w = qp.potential.truncate(order);
    let mut total = Substitution::identity();

    // ---- linear stage: canonical pairing form per opposite-arrow block ----
    let mut trivial: Vec<(ArrowId, ArrowId)> = Vec::new();
    let mut linear = Substitution::identity();
    for i in 1..=q.n_vertices() {
        for j in (i + 1)..=q.n_vertices() {
            let fwd: Vec<ArrowId> = (0..q.arrows().len())
                .filter(|&id| q.arrow(id).source == i && q.arrow(id).target == j)
                .collect();
            let bwd: Vec<ArrowId> = (0..q.arrows().len())
                .filter(|&id| q.arrow(id).source == j && q.arrow(id).target == i)
                .collect();
            if fwd.is_empty() || bwd.is_empty() {
                continue;
            }
            let mut mat: Vec<Vec<Rat>> = fwd
                .iter()
                .map(|&a| bwd.iter().map(|&b| w.coeff(&two_cycle_key(q, a, b))).collect())
                .collect();
            if mat.iter().all(|row| row.iter().all(|c| c.is_zero())) {
                continue;
            }
            let (p, qmat, rank) = canonical_pairing(&mut mat);
            // phi(A[u]) = sum_t P[t][u] A[t], phi(B[v]) = sum_w Q[v][w] B[w].
            for (u, &au) in fwd.iter().enumerate() {
                let mut img = NCPoly::zero();
                for (t, &at) in fwd.iter().enumerate() {
                    img.add_term(vec![at], p[t][u].clone());
                }
                if img != NCPoly::monomial(vec![au], Rat::one()) {
                    linear.set(au, img);
                }
            }
            for (v, &bv) in bwd.iter().enumerate() {
                let mut img = NCPoly::zero();
                for (x, &bx) in bwd.iter().enumerate() {
                    img.add_term(vec![bx], qmat[v][x].clone());
                }
                if img != NCPoly::monomial(vec![bv], Rat::one()) {
                    linear.set(bv, img);
                }
            }
            for k in 0..rank {
                trivial.push((fwd[k], bwd[k]));
            }
        }
    }
    if !linear.is_identity() {
        let (nw, d) = linear.apply_potential(q, &w, Some(order_us));
        w = nw;
        dropped |= d;
        total = linear;
    }

    // ---- elimination stage ----
    let trivial_arrows: BTreeSet<ArrowId> =
        trivial.iter().flat_map(|&(a, b)| [a, b]).collect();
    let side_of: BTreeMap<ArrowId, (usize, bool)> = trivial
        .iter()
        .enumerate()
        .flat_map(|(k, &(a, b))| [(a, (k, true)), (b, (k, false))])
        .collect();
    for level in 3..=order_us {
        let mut f: BTreeMap<usize, NCPoly> = BTreeMap::new(); // b_k -> b_k - f_k
        let mut g: BTreeMap<usize, NCPoly> = BTreeMap::new(); // a_k -> a_k - g_k
        for (word, c) in w.terms() {
            if word.len() != level {
                continue;
            }
            let Some(pos) = word.iter().position(|id| trivial_arrows.contains(id)) else {
                continue;
            };
            let (k, is_a_side) = side_of[&word[pos]];
            if is_a_side {
                // word = cyc([a_k, r...]): correct b_k by c * r.
                let mut r = word[pos + 1..].to_vec();
                r.extend_from_slice(&word[..pos]);
                f.entry(k).or_default().add_term(r, c.clone());
            } else {
                // word = cyc([r..., b_k]): correct a_k by c * r.
                let mut r = word[pos + 1..].to_vec();
                r.extend_from_slice(&word[..pos]);
                g.entry(k).or_default().add_term(r, c.clone());
            }
        }
        if f.is_empty() && g.is_empty() {
            continue;
        }
        let mut step = Substitution::identity();
        for (k, fk) in f {
            let b = trivial[k].1;
            let mut img = NCPoly::monomial(vec![b], Rat::one());
            img.add(&fk.neg());
            step.set(b, img);
        }
        for (k, gk) in g {
            let a = trivial[k].0;
            let mut img = NCPoly::monomial(vec![a], Rat::one());
            img.add(&gk.neg());
            step.set(a, img);
        }
        let (nw, d1) = step.apply_potential(q, &w, Some(order_us));
        w = nw;
        dropped |= d1;
        let (nt, d2) = step.compose_after(&total, Some(order_us));
        total = nt;
        dropped |= d2;
    }

    // The potential now consists of the canonical quadratic part plus terms
    // of length >= 3 avoiding every trivial arrow.
    debug_assert!(w.terms().all(|(word, _)| {
        word.len() == 2 || !word.iter().any(|id| trivial_arrows.contains(id))
    }));
    let mut reduced_pot = Potential::zero();
    for (word, c) in w.terms() {
        if word.len() == 2 {
            continue;
        }
        reduced_pot.add_canonical(word.clone(), c.clone());
    }

    // Build the reduced quiver: drop the trivial arrows.
    let kept: Vec<ArrowId> =
        (0..q.arrows().len()).filter(|id| !trivial_arrows.contains(id)).collect();
    let arrows: Vec<Arrow> = kept.iter().map(|&id| q.arrow(id).clone()).collect();
    let reduced_q = Quiver::named(q.name(), q.n_vertices(), q.principal_count(), arrows)
        .expect("dropping arrows preserves invariants");
    let arrow_map: BTreeMap<ArrowId, ArrowId> =
        kept.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    let mut reduced_pot = reduced_pot.filter_map_ids(&reduced_q, |id| arrow_map.get(&id).copied());
    reduced_pot.set_valid_to(if input_infinite && !dropped {
        Trunc::Infinite
    } else {
        Trunc::Finite(order)
    });
    let grading = qp.grading.as_ref().map(|gr| Grading::from_quiver(&reduced_q, gr.degree));
    if let (Some(gr), false) = (&grading, reduced_pot.is_zero()) {
        debug_assert!(
            check_homogeneous(&reduced_q, &reduced_pot, gr).is_ok(),
            "reduction must preserve gradings"
        );
    }
    Ok(SplitReduce {
        trivial,
        reduced: QP { quiver: reduced_q, potential: reduced_pot, grading },
        substitution: total,
        arrow_map,
        order,
    })
}

/// Exact Gauss reduction of a pairing matrix to `[[I_r, 0], [0, 0]]`,
/// returning `(P, Q, r)` with `P * M * Q` in that form. Pivots are chosen
/// first-nonzero, so rows are only ever combined when they share a column —
/// for homogeneous potentials this mixes equal-weight arrows only.
fn canonical_pairing(mat: &mut [Vec<Rat>]) -> (Vec<Vec<Rat>>, Vec<Vec<Rat>>, usize) {
    let rows = mat.len();
    let cols = mat[0].len();
    let mut p: Vec<Vec<Rat>> =
        (0..rows).map(|i| (0..rows).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect()).collect();
    let mut q: Vec<Vec<Rat>> =
        (0..cols).map(|i| (0..cols).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect()).collect();
    let mut r = 0usize;
    while r < rows && r < cols {
        let mut pivot = None;
        'scan: for u in r..rows {
            for v in r..cols {
                if !mat[u][v].is_zero() {
                    pivot = Some((u, v));
                    break 'scan;
                }
            }
        }
        let Some((u, v)) = pivot else { break };
        mat.swap(r, u);
        p.swap(r, u);
        if v != r {
            for row in mat.iter_mut() {
                row.swap(r, v);
            }
            for row in q.iter_mut() {
                row.swap(r, v);
            }
        }
        let inv = mat[r][r].recip();
        for x in 0..cols {
            mat[r][x] *= &inv;
        }
        for x in 0..rows {
            p[r][x] *= &inv;
        }
        for u in 0..rows {
            if u != r && !mat[u][r].is_zero() {
                let c = mat[u][r].clone();
                for x in 0..cols {
                    let t = &mat[r][x] * &c;
                    mat[u][x] -= t;
                }
                for x in 0..rows {
                    let t = &p[r][x] * &c;
                    p[u][x] -= t;
                }
            }
        }
        for v in 0..cols {
            if v != r && !mat[r][v].is_zero() {
                let c = mat[r][v].clone();
                for row in mat.iter_mut() {
                    let t = &row[r] * &c;
                    row[v] -= t;
                }
                for row in q.iter_mut() {
                    let t = &row[r] * &c;
                    row[v] -= t;
                }
            }
        }
        r += 1;
    }
    (p, q, r)
}

/// Premutation at a principal vertex `s`: add composites `[a.b]`, reverse
/// all arrows at `s`, substitute composite factors into the potential and
/// add the correction term `sum [ab] b~ a~`. No deletion is performed.
///
/// For graded inputs the new weights follow `|[ab]| = |a|+|b|`,
/// `|a~| = |W|-|a|` for arrows leaving `s`, `|a~| = -|a|` for arrows
/// entering `s`; homogeneity of the result is checked.
pub fn premutate(qp: &QP, s: VertexId) -> Result<QP, MutationError> {
    let q = &qp.quiver;
    if s < 1 || s > q.n_vertices() {
        return Err(MutationError::VertexOutOfRange(s, q.n_vertices()));
    }
    if q.is_frozen(s) {
        return Err(MutationError::FrozenVertex(s));
    }
    if q.has_two_cycle_at(s) {
        let a = q
            .arrows()
            .iter()
            .position(|a| a.source == s && q.arrow_count(a.target, s) > 0)
            .unwrap();
        let b = q
            .arrows()
            .iter()
            .position(|b| b.source == q.arrow(a).target && b.target == s)
            .unwrap();
        return Err(MutationError::TwoCycleThroughVertex(
            s,
            q.arrow(a).label.clone(),
            q.arrow(b).label.clone(),
        ));
    }
    let degree = qp.grading.as_ref().map(|g| g.degree);

    let outs = q.arrows_out(s);
    let ins = q.arrows_in(s);
    let mut arrows: Vec<Arrow> = Vec::new();
    let mut taken: BTreeSet<String> = BTreeSet::new();
    let mut keep_map: BTreeMap<ArrowId, ArrowId> = BTreeMap::new();
    let mut comp_map: BTreeMap<(ArrowId, ArrowId), ArrowId> = BTreeMap::new();
    let mut rev_map: BTreeMap<ArrowId, ArrowId> = BTreeMap::new();
    for (id, a) in q.arrows().iter().enumerate() {
        if a.source != s && a.target != s {
            keep_map.insert(id, arrows.len());
            taken.insert(a.label.clone());
            arrows.push(a.clone());
        }
    }
    for &a in &outs {
        for &b in &ins {
            let mut label = format!("[{}.{}]", q.arrow(a).label, q.arrow(b).label);
            while taken.contains(&label) {
                label.push('\'');
            }
            taken.insert(label.clone());
            comp_map.insert((a, b), arrows.len());
            arrows.push(Arrow::weighted(
                label,
                q.arrow(b).source,
                q.arrow(a).target,
                q.arrow(a).weight + q.arrow(b).weight,
            ));
        }
    }
    for &x in outs.iter().chain(ins.iter()) {
        let ar = q.arrow(x);
        let mut label = format!("{}~", ar.label);
        while taken.contains(&label) {
            label.push('~');
        }
        taken.insert(label.clone());
        let weight = match degree {
            Some(d) if ar.source == s => d - ar.weight,
            Some(_) => -ar.weight,
            None => ar.weight,
        };
        rev_map.insert(x, arrows.len());
        arrows.push(Arrow::weighted(label, ar.target, ar.source, weight));
    }
    let new_q = Quiver::named(q.name(), q.n_vertices(), q.principal_count(), arrows)
        .expect("premutation preserves structural invariants");

    // W_s: substitute composite factors along a lift that does not start
    // inside an ab pair through s (base vertex != s), chosen canonically.
    let mut new_w = Potential::zero();
    for (word, c) in qp.potential.terms() {
        let len = word.len();
        let rotations: Vec<Vec<ArrowId>> = (0..len)
            .filter(|&r| q.arrow(word[(r + len - 1) % len]).source != s)
            .map(|r| (0..len).map(|i| word[(r + i) % len]).collect())
            .collect();
        debug_assert!(!rotations.is_empty(), "every cycle has a base vertex other than s");
        let rot = rotations
            .into_iter()
            .min_by_key(|w| w.iter().map(|&id| q.label_rank(id)).collect::<Vec<_>>())
            .unwrap();
        let mut image: Vec<ArrowId> = Vec::with_capacity(len);
        let mut i = 0usize;
        while i < len {
            let id = rot[i];
            if q.arrow(id).source == s {
                image.push(comp_map[&(id, rot[i + 1])]);
                i += 2;
            } else {
                image.push(keep_map[&id]);
                i += 1;
            }
        }
        new_w
            .add_cycle(&new_q, &image, c.clone())
            .expect("substituted cycle stays closed");
    }
    for &a in &outs {
        for &b in &ins {
            new_w
                .add_cycle(&new_q, &[comp_map[&(a, b)], rev_map[&b], rev_map[&a]], rat_int(1))
                .expect("correction term is a closed 3-cycle");
        }
    }
    match qp.potential.valid_to() {
        Trunc::Infinite => new_w.set_valid_to(Trunc::Infinite),
        Trunc::Finite(v) => {
            new_w = new_w.truncate(prem_valid(v));
            new_w.set_valid_to(Trunc::Finite(prem_valid(v)));
        }
    }
    let grading = degree.map(|d| Grading::from_quiver(&new_q, d));
    if let Some(g) = &grading {
        if let Err(f) = check_homogeneous(&new_q, &new_w, g) {
            return Err(MutationError::GradingBroken(format!(
                "{} cycles off degree {} after premutation",
                f.offenders.len(),
                f.expected
            )));
        }
    }
    Ok(QP { quiver: new_q, potential: new_w, grading })
}

/// Premutation followed by splitting; does not flag remaining 2-cycles.
/// `order` is the requested output accuracy.
pub fn mutate_qp_core(qp: &QP, s: VertexId, order: u32) -> Result<QP, MutationError> {
    assert!(order >= 2, "working order must be at least 2");
    if let Trunc::Finite(v) = qp.potential.valid_to() {
        if prem_valid(v) < order {
            return Err(MutationError::InsufficientOrder { have: v, need: 3 * order / 2 });
        }
    }
    let premutated = premutate(qp, s)?;
    let work = match premutated.potential.valid_to() {
        Trunc::Infinite => (premutated.potential.max_len() as u32).max(order),
        Trunc::Finite(v) => v,
    };
    let split = split_reduce(&premutated, work)?;
    Ok(split.reduced)
}

/// Full QP mutation: premutate, reduce, and report a degeneracy witness if
/// the reduced quiver still carries a 2-cycle.
pub fn mutate_qp(qp: &QP, s: VertexId, order: u32) -> Result<QP, MutationError> {
    let out = mutate_qp_core(qp, s, order)?;
    if let Some((a, b)) = out.quiver.two_cycle_witness() {
        let (i, j) = (out.quiver.arrow(a).source, out.quiver.arrow(a).target);
        let _ = b;
        return Err(MutationError::TwoCycleRemains { i, j });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NondegVerdict {
    Nondegenerate,
    /// 1-based step index at which a 2-cycle survived reduction.
    DegenerateAt { step: usize, i: VertexId, j: VertexId },
}

#[derive(Debug, Clone)]
pub struct NondegReport {
    pub verdict: NondegVerdict,
    pub steps_completed: usize,
    pub final_qp: Option<QP>,
}

/// Mutate along `seq` at the minimal sufficient working order, reporting
/// success or the step index and 2-cycle witness of degeneracy.
///
/// Requires the potential exact to `required_order(len(seq), 2)`; no random
/// top-up is performed.
pub fn check_nondegenerate(qp: &QP, seq: &[VertexId]) -> Result<NondegReport, MutationError> {
    let t = seq.len() as u32;
    let need = required_order(t, 2);
    if !qp.potential.valid_to().at_least(need) {
        return Err(MutationError::InsufficientOrder {
            have: qp.potential.valid_to().finite().unwrap_or(0),
            need,
        });
    }
    if let Some((a, b)) = qp.quiver.two_cycle_witness() {
        let v = qp.quiver.arrow(a).source;
        return Err(MutationError::TwoCycleThroughVertex(
            v,
            qp.quiver.arrow(a).label.clone(),
            qp.quiver.arrow(b).label.clone(),
        ));
    }
    let mut current = qp.clone();
    for (k, &s) in seq.iter().enumerate() {
        let remaining = (seq.len() - k - 1) as u32;
        let order = match current.potential.valid_to() {
            Trunc::Infinite => required_order(remaining, 2),
            Trunc::Finite(v) => prem_valid(v),
        };
        match mutate_qp(&current, s, order.max(2)) {
            Ok(next) => current = next,
            Err(MutationError::TwoCycleRemains { i, j }) => {
                return Ok(NondegReport {
                    verdict: NondegVerdict::DegenerateAt { step: k + 1, i, j },
                    steps_completed: k,
                    final_qp: None,
                })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(NondegReport {
        verdict: NondegVerdict::Nondegenerate,
        steps_completed: seq.len(),
        final_qp: Some(current),
    })
}

/// Full subquiver on a vertex subset (sorted ascending), with the arrow map.
/// The subset must contain at least one principal vertex.
pub fn restrict_quiver(
    q: &Quiver,
    vertices: &[VertexId],
) -> Result<(Quiver, BTreeMap<ArrowId, ArrowId>), crate::QuiverError> {
    let mut vs: Vec<VertexId> = vertices.to_vec();
    vs.sort_unstable();
    vs.dedup();
    for &v in &vs {
        if v < 1 || v > q.n_vertices() {
            return Err(crate::QuiverError::VertexOutOfRange(v, q.n_vertices()));
        }
    }
    let m_new = vs.iter().filter(|&&v| v <= q.principal_count()).count();
    let vmap: BTreeMap<VertexId, VertexId> =
        vs.iter().enumerate().map(|(i, &v)| (v, i + 1)).collect();
    let mut arrows = Vec::new();
    let mut amap = BTreeMap::new();
    for (id, a) in q.arrows().iter().enumerate() {
        if let (Some(&ns), Some(&nt)) = (vmap.get(&a.source), vmap.get(&a.target)) {
            amap.insert(id, arrows.len());
            arrows.push(Arrow::weighted(a.label.clone(), ns, nt, a.weight));
        }
    }
    let sub = Quiver::named(q.name(), vs.len(), m_new.max(1).min(vs.len()), arrows)?;
    if m_new == 0 {
        return Err(crate::QuiverError::PrincipalOutOfRange { m: 0, n: vs.len() });
    }
    Ok((sub, amap))
}

/// Restrict a QP to a full subquiver, keeping exactly the cycles inside.
pub fn restrict_qp(qp: &QP, vertices: &[VertexId]) -> Result<QP, crate::QuiverError> {
    let (sub, amap) = restrict_quiver(&qp.quiver, vertices)?;
    let pot = qp.potential.restrict(&sub, &amap);
    let grading = qp.grading.as_ref().map(|g| Grading::from_quiver(&sub, g.degree));
    Ok(QP { quiver: sub, potential: pot, grading })
}

/// Lemma shadow: mutation at `s` commutes with restriction to a full
/// subquiver containing `s`, up to the implemented normal form.
pub fn restrict_and_mutate_commute_check(
    qp: &QP,
    sub_vertices: &[VertexId],
    s: VertexId,
    order: u32,
) -> Result<bool, MutationError> {
    let mut vs: Vec<VertexId> = sub_vertices.to_vec();
    vs.sort_unstable();
    vs.dedup();
    let Some(pos) = vs.iter().position(|&v| v == s) else {
        return Err(MutationError::VertexOutOfRange(s, qp.quiver.n_vertices()));
    };
    let s_new = pos + 1;
    let restricted = restrict_qp(qp, &vs).map_err(|_| {
        MutationError::VertexOutOfRange(s, qp.quiver.n_vertices())
    })?;
    let path_a = mutate_qp_core(&restricted, s_new, order)?;
    let mutated = mutate_qp_core(qp, s, order)?;
    let path_b = restrict_qp(&mutated, &vs)
        .map_err(|_| MutationError::VertexOutOfRange(s, qp.quiver.n_vertices()))?;
    Ok(qp_equiv(&path_a, &path_b))
}

/// Semi-effective right-equivalence test: quivers must agree as multigraphs
/// with fixed vertices; potentials are compared exactly over all arrow
/// relabelings consistent with endpoints, then once more after gauge
/// normalization (scaling arrows so a greedy spanning set of cycles has
/// coefficient one). Gradings are not compared. Comparisons are "up to the
/// implemented normal form".
pub fn qp_equiv(a: &QP, b: &QP) -> bool {
    if a.quiver.n_vertices() != b.quiver.n_vertices()
        || a.quiver.principal_count() != b.quiver.principal_count()
        || a.quiver.arrows().len() != b.quiver.arrows().len()
    {
        return false;
    }
    let mut groups: BTreeMap<(VertexId, VertexId), (Vec<ArrowId>, Vec<ArrowId>)> = BTreeMap::new();
    for (id, ar) in a.quiver.arrows().iter().enumerate() {
        groups.entry((ar.source, ar.target)).or_default().0.push(id);
    }
    for (id, ar) in b.quiver.arrows().iter().enumerate() {
        groups.entry((ar.source, ar.target)).or_default().1.push(id);
    }
    if groups.values().any(|(x, y)| x.len() != y.len()) {
        return false;
    }
    let (pa, pb) = common_truncation(&a.potential, &b.potential);
    // Enumerate bijections group by group (bounded search).
    let group_list: Vec<(&Vec<ArrowId>, &Vec<ArrowId>)> =
        groups.values().map(|(x, y)| (x, y)).collect();
    let mut map: BTreeMap<ArrowId, ArrowId> = BTreeMap::new();
    let mut budget = 20_000usize;
    try_bijections(a, b, &pa, &pb, &group_list, 0, &mut map, &mut budget)
}

fn common_truncation(a: &Potential, b: &Potential) -> (Potential, Potential) {
    match (a.valid_to(), b.valid_to()) {
        (Trunc::Finite(x), Trunc::Finite(y)) => {
            let o = x.min(y);
            (a.truncate(o), b.truncate(o))
        }
        (Trunc::Finite(x), Trunc::Infinite) => (a.truncate(x), b.truncate(x)),
        (Trunc::Infinite, Trunc::Finite(y)) => (a.truncate(y), b.truncate(y)),
        (Trunc::Infinite, Trunc::Infinite) => (a.clone(), b.clone()),
    }
}

fn try_bijections(
    a: &QP,
    b: &QP,
    pa: &Potential,
    pb: &Potential,
    groups: &[(&Vec<ArrowId>, &Vec<ArrowId>)],
    idx: usize,
    map: &mut BTreeMap<ArrowId, ArrowId>,
    budget: &mut usize,
) -> bool {
    if *budget == 0 {
        return false;
    }
    if idx == groups.len() {
        *budget -= 1;
        let remapped = pb.filter_map_ids(&a.quiver, |id| map.get(&id).copied());
        if remapped == *pa {
            return true;
        }
        return gauge_normalize(pa) == gauge_normalize(&remapped);
    }
    let (ga, gb) = groups[idx];
    permute_into(a, b, pa, pb, groups, idx, ga, gb, &mut Vec::new(), map, budget)
}

#[allow(clippy::too_many_arguments)]
fn permute_into(
    a: &QP,
    b: &QP,
    pa: &Potential,
    pb: &Potential,
    groups: &[(&Vec<ArrowId>, &Vec<ArrowId>)],
    idx: usize,
    ga: &[ArrowId],
    gb: &[ArrowId],
    used: &mut Vec<usize>,
    map: &mut BTreeMap<ArrowId, ArrowId>,
    budget: &mut usize,
) -> bool {
    if used.len() == gb.len() {
        return try_bijections(a, b, pa, pb, groups, idx + 1, map, budget);
    }
    let pos = used.len();
    for (i, &target) in ga.iter().enumerate() {
        if used.contains(&i) {
            continue;
        }
        used.push(i);
        map.insert(gb[pos], target);
        if permute_into(a, b, pa, pb, groups, idx, ga, gb, used, map, budget) {
            return true;
        }
        map.remove(&gb[pos]);
        used.pop();
    }
    false
}

/// Gauge normal form of a potential: walking terms in canonical order,
/// rescale one multiplicity-one, not-yet-pinned arrow per term so the term's
/// effective coefficient becomes 1. Returns the resulting coefficient map.
pub fn gauge_normalize(p: &Potential) -> BTreeMap<Word, Rat> {
    let mut scale: BTreeMap<ArrowId, Rat> = BTreeMap::new();
    for (word, c) in p.terms() {
        let mut eff = c.clone();
        for id in word {
            if let Some(s) = scale.get(id) {
                eff *= s;
            }
        }
        if eff.is_one() {
            continue;
        }
        let candidate = word.iter().find(|&&id| {
            !scale.contains_key(&id) && word.iter().filter(|&&x| x == id).count() == 1
        });
        if let Some(&id) = candidate {
            scale.insert(id, eff.recip());
        }
    }
    let mut out = BTreeMap::new();
    for (word, c) in p.terms() {
        let mut eff = c.clone();
        for id in word {
            if let Some(s) = scale.get(id) {
                eff *= s;
            }
        }
        out.insert(word.clone(), eff);
    }
    out
}
