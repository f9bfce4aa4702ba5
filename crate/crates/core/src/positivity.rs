//! Positivity and Lefschetz structure of Laurent-expansion coefficients.
//!
//! A coefficient passes the Lefschetz check when it is a nonnegative
//! integer combination of the centered polynomials
//! `P_{N,k} = v^N (v^{-k} + v^{-k+2} + ... + v^k)`; the center `N` is
//! reported in `v`-exponent units (`q^{N/2} = v^N`).

use crate::error::QuantumError;
use crate::par::par_map;
use crate::quantum::{QCoeff, QuantumSeed, SkewForm, TorusElement};
use crate::quiver::Quiver;
use crate::Int;
use num::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// `sum_k m_k P_{N,k}` with all part indices `k` of one parity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LefschetzDecomposition {
    /// Center, in `v`-exponent units.
    pub center: i64,
    /// `k -> m_k` with every `m_k >= 1`.
    pub parts: BTreeMap<i64, Int>,
}

impl LefschetzDecomposition {
    /// `P_{N,k}` in `v`-units.
    pub fn p_nk(center: i64, k: i64) -> QCoeff {
        let mut out = QCoeff::zero();
        let mut e = -k;
        while e <= k {
            out.add_term(center + e, Int::one());
            e += 2;
        }
        out
    }

    /// Re-expand the combination; always reproduces the input exactly.
    pub fn re_expand(&self) -> QCoeff {
        let mut out = QCoeff::zero();
        for (&k, m) in &self.parts {
            for (&e, c) in Self::p_nk(self.center, k).terms() {
                out.add_term(e, c * m);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LefschetzFailure {
    ZeroInput,
    /// Mixed even and odd `v`-exponents.
    ParityMix { coeff: QCoeff },
    /// Not symmetric about the support center.
    Asymmetric { coeff: QCoeff, center: i64 },
    /// A negative coefficient.
    Negative { coeff: QCoeff },
    /// Symmetric and nonnegative but not unimodal toward the center.
    NonUnimodal { coeff: QCoeff, center: i64, at: i64 },
}

impl fmt::Display for LefschetzFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LefschetzFailure::ZeroInput => write!(f, "zero input"),
            LefschetzFailure::ParityMix { coeff } => write!(f, "parity-mix [{coeff}]"),
            LefschetzFailure::Asymmetric { coeff, center } => {
                write!(f, "asymmetric about v^{center} [{coeff}]")
            }
            LefschetzFailure::Negative { coeff } => write!(f, "negative [{coeff}]"),
            LefschetzFailure::NonUnimodal { coeff, center, at } => {
                write!(f, "non-unimodal at v^{at} about v^{center} [{coeff}]")
            }
        }
    }
}

/// Decompose a coefficient as a positive integral combination of `P_{N,k}`.
///
/// The support must have uniform parity, be symmetric about its center,
/// with nonnegative values unimodal toward the center; then
/// `m_k = c_{N+k} - c_{N+k+2}`.
pub fn lefschetz_decompose(a: &QCoeff) -> Result<LefschetzDecomposition, LefschetzFailure> {
    if a.is_zero() {
        return Err(LefschetzFailure::ZeroInput);
    }
    if !a.uniform_parity() {
        return Err(LefschetzFailure::ParityMix { coeff: a.clone() });
    }
    let lo = a.min_exp().unwrap();
    let hi = a.max_exp().unwrap();
    // Uniform parity makes lo + hi even, so the center is an integer.
    let center = (lo + hi) / 2;
    for (&e, c) in a.terms() {
        if &a.coeff_at(2 * center - e) != c {
            return Err(LefschetzFailure::Asymmetric { coeff: a.clone(), center });
        }
    }
    for (_, c) in a.terms() {
        if c.is_negative() {
            return Err(LefschetzFailure::Negative { coeff: a.clone() });
        }
    }
    let mut parts = BTreeMap::new();
    let mut k = hi - center;
    while k >= 0 {
        let m = a.coeff_at(center + k) - a.coeff_at(center + k + 2);
        if m.is_negative() {
            return Err(LefschetzFailure::NonUnimodal {
                coeff: a.clone(),
                center,
                at: center + k,
            });
        }
        if !m.is_zero() {
            parts.insert(k, m);
        }
        k -= 2;
    }
    let out = LefschetzDecomposition { center, parts };
    debug_assert_eq!(&out.re_expand(), a);
    Ok(out)
}

/// Per-coefficient entry of a positivity report.
#[derive(Debug, Clone)]
pub struct CoeffReport {
    pub exponent: Vec<i64>,
    pub coeff: QCoeff,
    pub decomposition: Result<LefschetzDecomposition, LefschetzFailure>,
    /// Uniform `v`-support parity: the coefficient is a Laurent polynomial
    /// in `q` up to one overall factor of `v`.
    pub uniform_parity: bool,
    /// Twist converting the reported torus coefficient into the
    /// ordered-product basis `Z_1^{k_1} ... Z_n^{k_n}` of the root cluster.
    pub conversion_exponent: i64,
}

#[derive(Debug, Clone)]
pub struct PositivityReport {
    pub monomial: Vec<i64>,
    pub sequence: Vec<usize>,
    pub entries: Vec<CoeffReport>,
    pub all_positive: bool,
    pub all_lefschetz: bool,
    /// Every coefficient has uniform `v`-support parity.
    pub intpowers_ok: bool,
}

impl PositivityReport {
    pub fn passed(&self) -> bool {
        self.all_positive && self.all_lefschetz && self.intpowers_ok
    }
}

/// Expand the cluster monomial `n` of the seed reached by `seq` from the
/// initial seed of `(Q, Λ)`, and decompose every coefficient.
pub fn positivity_report(
    q: &Quiver,
    lambda: &SkewForm,
    seq: &[usize],
    nvec: &[i64],
) -> Result<PositivityReport, QuantumError> {
    let seed = QuantumSeed::initial(q.exchange_matrix(), lambda.clone())?;
    let mutated = seed.mutate_sequence(seq)?;
    let expansion = mutated.expand_monomial(nvec)?;
    Ok(report_from_expansion(&mutated, &expansion, seq, nvec))
}

/// Build the report from an existing expansion (per-coefficient work is
/// data-parallel).
pub fn report_from_expansion(
    seed: &QuantumSeed,
    expansion: &TorusElement,
    seq: &[usize],
    nvec: &[i64],
) -> PositivityReport {
    let terms: Vec<(Vec<i64>, QCoeff)> =
        expansion.terms().map(|(e, c)| (e.clone(), c.clone())).collect();
    let entries: Vec<CoeffReport> = par_map(&terms, |(e, c)| CoeffReport {
        exponent: e.clone(),
        coeff: c.clone(),
        decomposition: lefschetz_decompose(c),
        uniform_parity: c.uniform_parity(),
        conversion_exponent: seed.conversion_exponent(e),
    });
    let all_positive = entries.iter().all(|r| r.coeff.all_nonnegative());
    let all_lefschetz = !entries.is_empty() && entries.iter().all(|r| r.decomposition.is_ok());
    let intpowers_ok = entries.iter().all(|r| r.uniform_parity);
    PositivityReport {
        monomial: nvec.to_vec(),
        sequence: seq.to_vec(),
        entries,
        all_positive,
        all_lefschetz,
        intpowers_ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::quantum::quantize;

    fn qc(pairs: &[(i64, i64)]) -> QCoeff {
        let mut c = QCoeff::zero();
        for &(e, v) in pairs {
            c.add_term(e, Int::from(v));
        }
        c
    }

    #[test]
    fn p01_decomposition() {
        // v^{-1} + v = P_{0,1}.
        let a = qc(&[(-1, 1), (1, 1)]);
        let d = lefschetz_decompose(&a).unwrap();
        assert_eq!(d.center, 0);
        assert_eq!(d.parts, BTreeMap::from([(1, Int::one())]));
    }

    #[test]
    fn p22_decomposition() {
        // 1 + q + q^2 at v-exponents 0, 2, 4 = P_{2,2}.
        let a = qc(&[(0, 1), (2, 1), (4, 1)]);
        let d = lefschetz_decompose(&a).unwrap();
        assert_eq!(d.center, 2);
        assert_eq!(d.parts, BTreeMap::from([(2, Int::one())]));
    }

    #[test]
    fn non_unimodal_gap_fails() {
        // 1 + q^2 (v-exponents 0 and 4, hole at the center).
        let a = qc(&[(0, 1), (4, 1)]);
        match lefschetz_decompose(&a) {
            Err(LefschetzFailure::NonUnimodal { center: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn mixed_multiplicity_decomposition() {
        // 2 + 3q + 2q^2 = P_{2,0} + 2 P_{2,2}.
        let a = qc(&[(0, 2), (2, 3), (4, 2)]);
        let d = lefschetz_decompose(&a).unwrap();
        assert_eq!(d.center, 2);
        assert_eq!(d.parts, BTreeMap::from([(0, Int::one()), (2, Int::from(2))]));
        assert_eq!(d.re_expand(), a);
    }

    #[test]
    fn asymmetric_and_parity_failures() {
        assert!(matches!(
            lefschetz_decompose(&qc(&[(0, 1), (2, 2)])),
            Err(LefschetzFailure::Asymmetric { .. })
        ));
        assert!(matches!(
            lefschetz_decompose(&qc(&[(0, 1), (1, 1)])),
            Err(LefschetzFailure::ParityMix { .. })
        ));
        assert!(matches!(
            lefschetz_decompose(&qc(&[(0, -1)])),
            Err(LefschetzFailure::Negative { .. })
        ));
        assert!(matches!(lefschetz_decompose(&QCoeff::zero()), Err(LefschetzFailure::ZeroInput)));
    }

    /// Oracle: solve for the multiplicities by brute force over small m,
    /// then compare against the difference formula.
    #[test]
    fn decomposition_matches_enumeration_oracle() {
        let a = qc(&[(-2, 1), (0, 3), (2, 3), (4, 3), (6, 1)]);
        // Hand: center 2, support k in {0, 2, 4}: m_4 = 1, m_2 = 2, m_0 = 0.
        let d = lefschetz_decompose(&a).unwrap();
        assert_eq!(d.center, 2);
        assert_eq!(d.parts, BTreeMap::from([(2, Int::from(2)), (4, Int::one())]));
        assert_eq!(d.re_expand(), a);
    }

    #[test]
    fn a2_orbit_reports() {
        // All five quantum A2 cluster variables expand with coefficient 1.
        let q = catalog::a2();
        let lambda = SkewForm::from_rows(&[vec![0, -1], vec![1, 0]]).unwrap();
        let sequences: Vec<Vec<usize>> =
            vec![vec![], vec![1], vec![1, 2], vec![1, 2, 1], vec![1, 2, 1, 2]];
        for seq in sequences {
            for i in 0..2 {
                let mut n = vec![0i64; 2];
                n[i] = 1;
                let rep = positivity_report(&q, &lambda, &seq, &n).unwrap();
                assert!(rep.passed(), "seq {seq:?} variable {i}");
                for e in &rep.entries {
                    assert!(e.coeff.is_one(), "A2 coefficients are all 1, got {}", e.coeff);
                }
            }
        }
    }

    #[test]
    fn root_monomial_single_entry() {
        let (qq, lambda) = quantize(&catalog::cycle3()).unwrap();
        let rep = positivity_report(&qq, &lambda, &[], &[1, 2, 0, 0, 0, 0]).unwrap();
        assert_eq!(rep.entries.len(), 1);
        assert!(rep.passed());
    }
}
