//! Formal substitutions of arrows.
//!
//! A substitution sends each arrow to a path polynomial with the same
//! endpoints. The splitting algorithm composes two kinds: invertible linear
//! changes among parallel arrows, and unitriangular corrections
//! `a -> a + (paths of length >= 2)`. Unmapped arrows are fixed.

use crate::path_algebra::{NCPoly, Potential, Word};
use crate::quiver::{ArrowId, Quiver};
use crate::Rat;
use num::One;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Substitution {
    map: BTreeMap<ArrowId, NCPoly>,
}

impl Substitution {
    pub fn identity() -> Self {
        Substitution::default()
    }

    pub fn is_identity(&self) -> bool {
        self.map.is_empty()
    }

    pub fn set(&mut self, a: ArrowId, image: NCPoly) {
        self.map.insert(a, image);
    }

    pub fn get(&self, a: ArrowId) -> NCPoly {
        self.map
            .get(&a)
            .cloned()
            .unwrap_or_else(|| NCPoly::monomial(vec![a], Rat::one()))
    }

    pub fn images(&self) -> impl Iterator<Item = (&ArrowId, &NCPoly)> {
        self.map.iter()
    }

    /// Expand the image of a word, capping term lengths; the flag reports
    /// whether the cap dropped anything.
    pub fn apply_word(&self, w: &Word, cap: Option<usize>) -> (NCPoly, bool) {
        let mut acc = NCPoly::monomial(Vec::new(), Rat::one());
        let mut dropped = false;
        for &id in w {
            let image = self.get(id);
            let (next, d) = acc.mul(&image, cap);
            acc = next;
            dropped |= d;
        }
        (acc, dropped)
    }

    /// Apply to a potential termwise on the canonical lifts, re-canonicalize
    /// and cap the result. The caller owns the accuracy bookkeeping.
    pub fn apply_potential(
        &self,
        q: &Quiver,
        w: &Potential,
        cap: Option<usize>,
    ) -> (Potential, bool) {
        let mut out = Potential::zero();
        out.set_valid_to(w.valid_to());
        let mut dropped = false;
        for (word, c) in w.terms() {
            let (image, d) = self.apply_word(word, cap);
            dropped |= d;
            for (iw, ic) in image.terms() {
                let canon = crate::path_algebra::canonical_rotation(q, iw);
                out.add_canonical(canon, c * ic);
            }
        }
        if let Some(cap) = cap {
            out = out.truncate(cap as u32);
            out.set_valid_to(w.valid_to().min(crate::path_algebra::Trunc::Finite(cap as u32)));
        }
        (out, dropped)
    }

    /// `self` after `inner`: the substitution sending `a` to
    /// `self(inner(a))`.
    pub fn compose_after(&self, inner: &Substitution, cap: Option<usize>) -> (Substitution, bool) {
        let mut out = Substitution::identity();
        let mut dropped = false;
        let mut keys: Vec<ArrowId> = inner.map.keys().copied().collect();
        for k in self.map.keys() {
            if !keys.contains(k) {
                keys.push(*k);
            }
        }
        for a in keys {
            let inner_image = inner.get(a);
            let mut acc = NCPoly::zero();
            for (word, c) in inner_image.terms() {
                let (expanded, d) = self.apply_word(word, cap);
                dropped |= d;
                let mut scaled = expanded;
                scaled.scale(c);
                acc.add(&scaled);
            }
            out.set(a, acc);
        }
        (out, dropped)
    }
}
