//! Independent classical cluster mutation over commutative Laurent
//! polynomials, used as the oracle for `v = 1` specializations of the
//! quantum engine. Deliberately a separate code path: commutative, no
//! twisting, its own division routine.

use crate::quiver::ExchangeMatrix;
use crate::Int;
use num::{Integer, One, Zero};
use std::collections::BTreeMap;

/// Commutative Laurent polynomial in `n` variables over `Z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    n: usize,
    terms: BTreeMap<Vec<i64>, Int>,
}

impl LaurentPoly {
    pub fn zero(n: usize) -> Self {
        LaurentPoly { n, terms: BTreeMap::new() }
    }

    pub fn one(n: usize) -> Self {
        Self::monomial(vec![0; n], Int::one())
    }

    pub fn var(i: usize, n: usize) -> Self {
        let mut e = vec![0; n];
        e[i - 1] = 1;
        Self::monomial(e, Int::one())
    }

    pub fn monomial(e: Vec<i64>, c: Int) -> Self {
        let n = e.len();
        let mut p = LaurentPoly::zero(n);
        p.add_term(e, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &Int)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, e: Vec<i64>, c: Int) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e.clone()).or_insert_with(Int::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add(&mut self, other: &LaurentPoly) {
        for (e, c) in &other.terms {
            self.add_term(e.clone(), c.clone());
        }
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero(self.n);
        for (e, c) in &self.terms {
            for (f, d) in &other.terms {
                let sum: Vec<i64> = e.iter().zip(f).map(|(a, b)| a + b).collect();
                out.add_term(sum, c * d);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> LaurentPoly {
        let mut out = LaurentPoly::one(self.n);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    fn lead(&self) -> Option<&Vec<i64>> {
        self.terms.keys().max_by(|a, b| {
            let sa: i64 = a.iter().sum();
            let sb: i64 = b.iter().sum();
            sa.cmp(&sb).then_with(|| a.cmp(b))
        })
    }

    /// Exact division; `None` when no Laurent quotient exists.
    pub fn div_exact(&self, d: &LaurentPoly) -> Option<LaurentPoly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(LaurentPoly::zero(self.n));
        }
        // Per-coordinate quotient box, as for the quantum torus.
        let bound = |p: &LaurentPoly, pick_max: bool| -> Vec<i64> {
            (0..self.n)
                .map(|i| {
                    let it = p.terms.keys().map(|e| e[i]);
                    if pick_max {
                        it.max().unwrap()
                    } else {
                        it.min().unwrap()
                    }
                })
                .collect()
        };
        let lo: Vec<i64> =
            bound(self, false).iter().zip(bound(d, false)).map(|(a, b)| a - b).collect();
        let hi: Vec<i64> =
            bound(self, true).iter().zip(bound(d, true)).map(|(a, b)| a - b).collect();
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return None;
        }
        let d_lead = d.lead().unwrap().clone();
        let d_lc = d.terms[&d_lead].clone();
        let mut r = self.clone();
        let mut q = LaurentPoly::zero(self.n);
        while !r.is_zero() {
            let r_lead = r.lead().unwrap().clone();
            let t: Vec<i64> = r_lead.iter().zip(&d_lead).map(|(a, b)| a - b).collect();
            if t.iter().zip(lo.iter().zip(&hi)).any(|(x, (l, h))| x < l || x > h) {
                return None;
            }
            let (c, rem) = r.terms[&r_lead].div_rem(&d_lc);
            if !rem.is_zero() {
                return None;
            }
            for (e, dc) in &d.terms {
                let sum: Vec<i64> = e.iter().zip(&t).map(|(a, b)| a + b).collect();
                r.add_term(sum, -(&c * dc));
            }
            q.add_term(t, c);
        }
        Some(q)
    }
}

/// Classical cluster mutation along a vertex sequence, returning the final
/// cluster as Laurent polynomials in the initial variables:
/// `x'_s x_s = prod x_i^{[b_is]_+} + prod x_i^{[-b_is]_+}`.
pub fn classical_oracle(b0: &ExchangeMatrix, seq: &[usize]) -> Result<Vec<LaurentPoly>, String> {
    let n = b0.rows();
    let m = b0.cols();
    let mut b = b0.clone();
    let mut x: Vec<LaurentPoly> = (1..=n).map(|i| LaurentPoly::var(i, n)).collect();
    for &s in seq {
        if s < 1 || s > m {
            return Err(format!("vertex {s} not principal"));
        }
        let mut plus = LaurentPoly::one(n);
        let mut minus = LaurentPoly::one(n);
        for i in 1..=n {
            let e = b.entry(i, s);
            if e > 0 {
                plus = plus.mul(&x[i - 1].pow(e as u32));
            } else if e < 0 {
                minus = minus.mul(&x[i - 1].pow((-e) as u32));
            }
        }
        plus.add(&minus);
        let new = plus
            .div_exact(&x[s - 1])
            .ok_or_else(|| format!("exchange relation not divisible at vertex {s}"))?;
        x[s - 1] = new;
        b = b.mutate(s);
    }
    Ok(x)
}
