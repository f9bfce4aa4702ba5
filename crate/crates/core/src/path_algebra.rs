//! Noncommutative path-algebra arithmetic over exact rationals.
//!
//! Words are sequences of arrow ids in *product order*: in a word `ab` the
//! arrow `b` is traversed first, and composability means
//! `source(w[i]) == target(w[i+1])`. A closed word additionally satisfies
//! `target(w[0]) == source(w[last])`.
//!
//! Potentials are finite rational linear combinations of cyclic words keyed
//! by their canonical rotation (the rotation whose label sequence is
//! lexicographically least), together with a truncation order: `Finite(n)`
//! means exact on all cycle lengths `<= n` and unknown above, `Infinite`
//! means algebraic, exactly known at all orders.

use crate::error::PotentialError;
use crate::quiver::{ArrowId, Quiver, VertexId};
use crate::Rat;
use num::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use std::collections::{BTreeMap, BTreeSet};

pub type Word = Vec<ArrowId>;

/// Endpoints of a composable word: `(source, target)` of the whole path.
pub fn word_endpoints(q: &Quiver, w: &[ArrowId]) -> Result<(VertexId, VertexId), PotentialError> {
    if w.is_empty() {
        return Err(PotentialError::LoopCycle);
    }
    for &id in w {
        if id >= q.arrows().len() {
            return Err(PotentialError::ArrowOutOfRange(id));
        }
    }
    for i in 0..w.len() - 1 {
        if q.arrow(w[i]).source != q.arrow(w[i + 1]).target {
            return Err(PotentialError::NotComposable(i));
        }
    }
    Ok((q.arrow(*w.last().unwrap()).source, q.arrow(w[0]).target))
}

pub fn word_is_closed(q: &Quiver, w: &[ArrowId]) -> Result<(), PotentialError> {
    let (src, tgt) = word_endpoints(q, w)?;
    if src != tgt {
        return Err(PotentialError::NotClosed { from: src, to: tgt });
    }
    Ok(())
}

/// Canonical rotation: the rotation whose label-rank sequence is least,
/// ties broken by the fixed label order (ranks are distinct per arrow, so
/// equal rank sequences coincide).
pub fn canonical_rotation(q: &Quiver, w: &[ArrowId]) -> Word {
    let k = w.len();
    let rank = |rot: usize| (0..k).map(move |i| q.label_rank(w[(rot + i) % k]));
    let mut best = 0usize;
    for r in 1..k {
        if rank(r).lt(rank(best)) {
            best = r;
        }
    }
    (0..k).map(|i| w[(best + i) % k]).collect()
}

/// Weight of a word under per-arrow weights.
pub fn word_weight(weights: &[i64], w: &[ArrowId]) -> i64 {
    w.iter().map(|&id| weights[id]).sum()
}

/// A finite rational combination of composable (open) paths.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NCPoly {
    terms: BTreeMap<Word, Rat>,
}

impl NCPoly {
    pub fn zero() -> Self {
        NCPoly::default()
    }

    pub fn monomial(w: Word, c: Rat) -> Self {
        let mut p = NCPoly::zero();
        p.add_term(w, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, w: Word, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(w).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            let key = self
                .terms
                .iter()
                .find(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone())
                .unwrap();
            self.terms.remove(&key);
        }
    }

    pub fn add(&mut self, other: &NCPoly) {
        for (w, c) in &other.terms {
            self.add_term(w.clone(), c.clone());
        }
    }

    pub fn scale(&mut self, c: &Rat) {
        if c.is_zero() {
            self.terms.clear();
            return;
        }
        for v in self.terms.values_mut() {
            *v *= c;
        }
    }

    pub fn neg(&self) -> NCPoly {
        let mut out = self.clone();
        out.scale(&-Rat::one());
        out
    }

    /// Product with an optional length cap; the flag reports whether any
    /// term was dropped by the cap.
    pub fn mul(&self, other: &NCPoly, cap: Option<usize>) -> (NCPoly, bool) {
        let mut out = NCPoly::zero();
        let mut dropped = false;
        for (u, cu) in &self.terms {
            for (v, cv) in &other.terms {
                let len = u.len() + v.len();
                if cap.is_some_and(|c| len > c) {
                    dropped = true;
                    continue;
                }
                let mut w = Vec::with_capacity(len);
                w.extend_from_slice(u);
                w.extend_from_slice(v);
                out.add_term(w, cu * cv);
            }
        }
        (out, dropped)
    }

    /// Restrict to terms whose arrows all satisfy `keep`, remapping ids.
    pub fn filter_map_ids(&self, f: impl Fn(ArrowId) -> Option<ArrowId>) -> NCPoly {
        let mut out = NCPoly::zero();
        'term: for (w, c) in &self.terms {
            let mut nw = Vec::with_capacity(w.len());
            for &id in w {
                match f(id) {
                    Some(nid) => nw.push(nid),
                    None => continue 'term,
                }
            }
            out.add_term(nw, c.clone());
        }
        out
    }

    pub fn min_len(&self) -> Option<usize> {
        self.terms.keys().map(|w| w.len()).min()
    }
}

/// Truncation order of a potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Trunc {
    Finite(u32),
    Infinite,
}

impl Trunc {
    pub fn finite(self) -> Option<u32> {
        match self {
            Trunc::Finite(n) => Some(n),
            Trunc::Infinite => None,
        }
    }

    pub fn at_least(self, n: u32) -> bool {
        match self {
            Trunc::Finite(m) => m >= n,
            Trunc::Infinite => true,
        }
    }
}

impl std::fmt::Display for Trunc {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Trunc::Finite(n) => write!(f, "{n}"),
            Trunc::Infinite => write!(f, "inf"),
        }
    }
}

/// A potential: rational combination of cyclic words, canonically rotated,
/// with a truncation marker.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Potential {
    terms: BTreeMap<Word, Rat>,
    valid_to: Trunc,
}

impl Potential {
    pub fn zero() -> Self {
        Potential { terms: BTreeMap::new(), valid_to: Trunc::Infinite }
    }

    pub fn zero_to(order: u32) -> Self {
        Potential { terms: BTreeMap::new(), valid_to: Trunc::Finite(order) }
    }

    pub fn valid_to(&self) -> Trunc {
        self.valid_to
    }

    pub fn set_valid_to(&mut self, t: Trunc) {
        self.valid_to = t;
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, canonical: &[ArrowId]) -> Rat {
        self.terms.get(canonical).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn max_len(&self) -> usize {
        self.terms.keys().map(|w| w.len()).max().unwrap_or(0)
    }

    pub fn min_len(&self) -> Option<usize> {
        self.terms.keys().map(|w| w.len()).min()
    }

    /// Add a cyclic term; the word is validated and canonically rotated.
    pub fn add_cycle(&mut self, q: &Quiver, w: &[ArrowId], c: Rat) -> Result<(), PotentialError> {
        word_is_closed(q, w)?;
        if w.len() == 1 {
            return Err(PotentialError::LoopCycle);
        }
        let canon = canonical_rotation(q, w);
        self.add_canonical(canon, c);
        Ok(())
    }

    pub(crate) fn add_canonical(&mut self, canon: Word, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(canon.clone()).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&canon);
        }
    }

    pub fn add(&mut self, other: &Potential) {
        self.valid_to = self.valid_to.min(other.valid_to);
        for (w, c) in &other.terms {
            self.add_canonical(w.clone(), c.clone());
        }
    }

    pub fn scale(&mut self, c: &Rat) {
        if c.is_zero() {
            self.terms.clear();
            return;
        }
        for v in self.terms.values_mut() {
            *v *= c;
        }
    }

    /// The part of the potential of exactly length `len`.
    pub fn part_of_len(&self, len: usize) -> Potential {
        Potential {
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.len() == len)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
            valid_to: self.valid_to,
        }
    }

    /// Keep cycles of length `<= n`; the result is exact up to order `n`
    /// when the input was at least that accurate.
    pub fn truncate(&self, n: u32) -> Potential {
        Potential {
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.len() <= n as usize)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
            valid_to: self.valid_to.min(Trunc::Finite(n)),
        }
    }

    /// Remap arrow ids; terms with any unmapped arrow are dropped.
    /// Re-canonicalizes under the target quiver.
    pub fn filter_map_ids(
        &self,
        target: &Quiver,
        f: impl Fn(ArrowId) -> Option<ArrowId>,
    ) -> Potential {
        let mut out = Potential { terms: BTreeMap::new(), valid_to: self.valid_to };
        'term: for (w, c) in &self.terms {
            let mut nw = Vec::with_capacity(w.len());
            for &id in w {
                match f(id) {
                    Some(nid) => nw.push(nid),
                    None => continue 'term,
                }
            }
            let canon = canonical_rotation(target, &nw);
            out.add_canonical(canon, c.clone());
        }
        out
    }

    /// Restriction to a full subquiver: keep exactly the cycles lying in it,
    /// with their coefficients.
    pub fn restrict(
        &self,
        target: &Quiver,
        arrow_map: &BTreeMap<ArrowId, ArrowId>,
    ) -> Potential {
        self.filter_map_ids(target, |id| arrow_map.get(&id).copied())
    }
}

/// Integer arrow weights together with a declared total degree `|W| > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grading {
    pub weights: Vec<i64>,
    pub degree: i64,
}

impl Grading {
    pub fn from_quiver(q: &Quiver, degree: i64) -> Self {
        Grading { weights: q.arrows().iter().map(|a| a.weight).collect(), degree }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomogeneityFailure {
    /// Offending cycles with their weight sums.
    pub offenders: Vec<(Word, i64)>,
    pub expected: i64,
}

/// Check that every cycle in the support has weight sum `g.degree` and that
/// the degree is strictly positive. On failure, lists offending cycles.
pub fn check_homogeneous(
    _q: &Quiver,
    w: &Potential,
    g: &Grading,
) -> Result<i64, HomogeneityFailure> {
    let mut offenders = Vec::new();
    for (word, _) in w.terms() {
        let s = word_weight(&g.weights, word);
        if s != g.degree {
            offenders.push((word.clone(), s));
        }
    }
    if g.degree <= 0 {
        // Strictly positive degree required; report all cycles as offenders
        // of the declared degree.
        return Err(HomogeneityFailure {
            offenders: w.terms().map(|(word, _)| (word.clone(), word_weight(&g.weights, word))).collect(),
            expected: g.degree,
        });
    }
    if offenders.is_empty() {
        Ok(g.degree)
    } else {
        Err(HomogeneityFailure { offenders, expected: g.degree })
    }
}

/// True when the grading is a cut: all weights in {0,1} and degree 1.
pub fn is_cut(g: &Grading) -> bool {
    g.degree == 1 && g.weights.iter().all(|&w| w == 0 || w == 1)
}

/// Cyclic derivative of a potential with respect to one arrow: for each
/// occurrence of `a` in each cycle, the complementary path, scaled by the
/// cycle's coefficient. Result paths run from `target(a)` to `source(a)`.
/// Accurate to one order below the potential's own accuracy.
pub fn cyclic_derivative(q: &Quiver, w: &Potential, a: ArrowId) -> Result<NCPoly, PotentialError> {
    if a >= q.arrows().len() {
        return Err(PotentialError::ArrowOutOfRange(a));
    }
    let mut out = NCPoly::zero();
    for (word, c) in w.terms() {
        for p in 0..word.len() {
            if word[p] == a {
                let mut comp = Vec::with_capacity(word.len() - 1);
                comp.extend_from_slice(&word[p + 1..]);
                comp.extend_from_slice(&word[..p]);
                out.add_term(comp, c.clone());
            }
        }
    }
    Ok(out)
}

/// One cyclic derivative per arrow: the Jacobi ideal generators.
pub fn jacobi_generators(q: &Quiver, w: &Potential) -> Vec<NCPoly> {
    (0..q.arrows().len())
        .map(|a| cyclic_derivative(q, w, a).expect("arrow id in range"))
        .collect()
}

/// All composable cyclic words of length `2..=max_len` (vertex repeats
/// allowed), one canonical rotation per class, deterministic order.
pub fn enumerate_cycles(q: &Quiver, max_len: usize) -> Vec<Word> {
    let mut seen: BTreeSet<Word> = BTreeSet::new();
    // Walks anchored at their minimal visited vertex.
    fn go(
        q: &Quiver,
        base: VertexId,
        at: VertexId,
        traversal: &mut Vec<ArrowId>,
        max_len: usize,
        seen: &mut BTreeSet<Word>,
    ) {
        for id in 0..q.arrows().len() {
            let a = q.arrow(id);
            if a.source != at || a.target < base {
                continue;
            }
            if a.target == base && traversal.len() + 1 >= 2 {
                let mut word: Word = traversal.clone();
                word.push(id);
                word.reverse();
                seen.insert(canonical_rotation(q, &word));
            }
            if traversal.len() + 1 < max_len {
                traversal.push(id);
                go(q, base, a.target, traversal, max_len, seen);
                traversal.pop();
            }
        }
    }
    for base in 1..=q.n_vertices() {
        let mut traversal = Vec::new();
        go(q, base, base, &mut traversal, max_len, &mut seen);
    }
    let mut out: Vec<Word> = seen.into_iter().collect();
    out.sort_by_key(|w| (w.len(), w.iter().map(|&id| q.label_rank(id)).collect::<Vec<_>>()));
    out
}

/// Bound on numerators and denominators sampled by [`random_potential`].
pub const RANDOM_COEFF_BOUND: i64 = 9;

/// Assign an independently sampled nonzero rational coefficient (numerator
/// in `-9..=9`, denominator in `1..=9`) to every cycle class of length
/// `<= max_len`. Deterministic in the seed.
pub fn random_potential(q: &Quiver, max_len: usize, rng_seed: u64) -> Potential {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(rng_seed);
    let mut out = Potential::zero();
    for word in enumerate_cycles(q, max_len) {
        let mut num = 0i64;
        while num == 0 {
            num = rng.random_range(-RANDOM_COEFF_BOUND..=RANDOM_COEFF_BOUND);
        }
        let den = rng.random_range(1..=RANDOM_COEFF_BOUND);
        out.add_canonical(word, crate::rat(num, den));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::{rat, rat_int};

    #[test]
    fn canonical_rotation_invariance() {
        let q = catalog::cycle3();
        let w = catalog::cycle3_word(&q);
        let canon = canonical_rotation(&q, &w);
        for r in 0..w.len() {
            let rot: Word = (0..w.len()).map(|i| w[(r + i) % w.len()]).collect();
            assert_eq!(canonical_rotation(&q, &rot), canon);
        }
    }

    #[test]
    fn derivative_of_three_cycle() {
        // W = abc, d/da = bc.
        let (q, w) = catalog::cycle3_qp_parts();
        let a = q.find_arrow("a").unwrap();
        let b = q.find_arrow("b").unwrap();
        let c = q.find_arrow("c").unwrap();
        let d = cyclic_derivative(&q, &w, a).unwrap();
        assert_eq!(d, NCPoly::monomial(vec![b, c], rat_int(1)));
    }

    #[test]
    fn derivative_of_conifold_potential() {
        // W = a01 a10 b01 b10 - a01 b10 b01 a10;
        // d/d a01 = a10 b01 b10 - b10 b01 a10.
        let (q, w) = catalog::conifold_qp_parts();
        let a01 = q.find_arrow("a01").unwrap();
        let a10 = q.find_arrow("a10").unwrap();
        let b01 = q.find_arrow("b01").unwrap();
        let b10 = q.find_arrow("b10").unwrap();
        let d = cyclic_derivative(&q, &w, a01).unwrap();
        let mut want = NCPoly::monomial(vec![a10, b01, b10], rat_int(1));
        want.add_term(vec![b10, b01, a10], rat_int(-1));
        assert_eq!(d, want);
    }

    /// Independent oracle: enumerate factorizations `u = p a r` of the fixed
    /// lift by scanning every index, building the complement from slices.
    fn derivative_oracle(word: &[ArrowId], a: ArrowId) -> NCPoly {
        let mut out = NCPoly::zero();
        for i in 0..word.len() {
            if word[i] == a {
                let mut w = word[i + 1..].to_vec();
                w.extend_from_slice(&word[..i]);
                out.add_term(w, rat_int(1));
            }
        }
        out
    }

    #[test]
    fn derivative_double_occurrence() {
        // W = (ab)^2 on the 2-cycle quiver; d/da = 2 bab.
        let q = catalog::two_cycle();
        let a = q.find_arrow("a").unwrap();
        let b = q.find_arrow("b").unwrap();
        let mut w = Potential::zero();
        w.add_cycle(&q, &[a, b, a, b], rat_int(1)).unwrap();
        let d = cyclic_derivative(&q, &w, a).unwrap();
        assert_eq!(d, NCPoly::monomial(vec![b, a, b], rat_int(2)));
        let lift = w.terms().next().unwrap().0.clone();
        assert_eq!(d, derivative_oracle(&lift, a));
    }

    #[test]
    fn derivative_linear_property() {
        let q = catalog::somos5();
        let cycles = enumerate_cycles(&q, 5);
        let (u, v) = (&cycles[0], &cycles[3]);
        let (alpha, beta) = (rat(3, 2), rat(-5, 7));
        let mut combo = Potential::zero();
        combo.add_canonical(u.clone(), alpha.clone());
        combo.add_canonical(v.clone(), beta.clone());
        for a in 0..q.arrows().len() {
            let mut pu = Potential::zero();
            pu.add_canonical(u.clone(), rat_int(1));
            let mut pv = Potential::zero();
            pv.add_canonical(v.clone(), rat_int(1));
            let mut want = cyclic_derivative(&q, &pu, a).unwrap();
            want.scale(&alpha);
            let mut dv = cyclic_derivative(&q, &pv, a).unwrap();
            dv.scale(&beta);
            want.add(&dv);
            assert_eq!(cyclic_derivative(&q, &combo, a).unwrap(), want);
        }
    }

    #[test]
    fn derivative_grading_compatibility() {
        // If W is homogeneous of degree d then dW/da is homogeneous of
        // degree d - weight(a).
        let q = catalog::somos5();
        let g = Grading::from_quiver(&q, 1);
        let mut w = Potential::zero();
        for cyc in crate::quiver::enumerate_simple_cycles(&q, 5) {
            w.add_cycle(&q, &cyc, rat_int(1)).unwrap();
        }
        assert_eq!(check_homogeneous(&q, &w, &g), Ok(1));
        for a in 0..q.arrows().len() {
            let d = cyclic_derivative(&q, &w, a).unwrap();
            for (word, _) in d.terms() {
                assert_eq!(word_weight(&g.weights, word), 1 - g.weights[a]);
            }
        }
    }

    #[test]
    fn homogeneous_three_cycle() {
        let (q, w) = catalog::cycle3_qp_parts();
        let g = Grading::from_quiver(&q, 3);
        assert_eq!(check_homogeneous(&q, &w, &g), Ok(3));
    }

    #[test]
    fn conifold_cut() {
        let (q, w) = catalog::conifold_qp_parts();
        let g = Grading::from_quiver(&q, 1);
        assert_eq!(check_homogeneous(&q, &w, &g), Ok(1));
        assert!(is_cut(&g));
    }

    #[test]
    fn nine_vertex_never_homogeneous() {
        // Any weighting makes the three 4-cycles force n = 3d and the two
        // 6-cycles force n = 2d; with all five cycles present homogeneity
        // must fail for every declared degree d >= 1.
        let q = catalog::nine_vertex();
        let cycles = crate::quiver::enumerate_simple_cycles(&q, 9);
        let mut w = Potential::zero();
        for c in &cycles {
            w.add_cycle(&q, c, rat_int(1)).unwrap();
        }
        for d in 1..=6 {
            let g = Grading::from_quiver(&q, d);
            assert!(check_homogeneous(&q, &w, &g).is_err(), "degree {d} cannot be homogeneous");
        }
    }

    #[test]
    fn truncate_idempotent() {
        let q = catalog::somos5();
        let w = random_potential(&q, 6, 42);
        let t4 = w.truncate(4);
        assert_eq!(t4.truncate(4), t4);
        assert_eq!(w.truncate(5).truncate(4), t4);
        assert_eq!(t4.valid_to(), Trunc::Finite(4));
        // Drop-nothing case.
        let small = w.truncate(3);
        assert_eq!(small.truncate(7).terms().count(), small.terms().count());
    }

    #[test]
    fn random_potential_deterministic() {
        let q = catalog::somos5();
        assert_eq!(random_potential(&q, 5, 7), random_potential(&q, 5, 7));
        assert_ne!(random_potential(&q, 5, 7), random_potential(&q, 5, 8));
    }

    #[test]
    fn random_potential_acyclic_is_zero() {
        let q = catalog::a3();
        assert!(random_potential(&q, 6, 1).is_zero());
    }

    #[test]
    fn random_potential_three_cycle_single_term() {
        let q = catalog::cycle3();
        let w = random_potential(&q, 3, 5);
        assert_eq!(w.num_terms(), 1);
    }

    #[test]
    fn restriction_preserves_coefficients() {
        let q = catalog::somos5();
        let w = random_potential(&q, 4, 11);
        // Restrict to the full subquiver on vertices {1,2,3,4}.
        let keep: Vec<usize> = vec![1, 2, 3, 4];
        let (sub, amap) = crate::qp::restrict_quiver(&q, &keep).unwrap();
        let restricted = w.restrict(&sub, &amap);
        for (word, c) in restricted.terms() {
            // Find the original cycle: map back through the arrow map.
            let rev: BTreeMap<ArrowId, ArrowId> = amap.iter().map(|(&k, &v)| (v, k)).collect();
            let orig: Vec<ArrowId> = word.iter().map(|id| rev[id]).collect();
            let canon = canonical_rotation(&q, &orig);
            assert_eq!(&w.coeff(&canon), c);
        }
        // Support inclusion: every original cycle inside the subquiver
        // survives with its coefficient.
        let inside = |word: &Word| {
            word.iter().all(|id| amap.contains_key(id))
        };
        assert_eq!(
            w.terms().filter(|(word, _)| inside(word)).count(),
            restricted.num_terms()
        );
    }
}
