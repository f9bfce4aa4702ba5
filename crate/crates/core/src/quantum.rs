//! Quantum torus arithmetic over `Z[q^{±1/2}]`, compatible pairs,
//! quantization, quantum seeds and their mutation.
//!
//! Coefficients are Laurent polynomials in `v = q^{1/2}` (so `v^2 = q`).
//! Torus elements are finite maps from lattice exponents in `Z^n` to
//! coefficients, multiplied with the twist
//! `X^e * X^f = v^{Λ(e,f)} X^{e+f}`.
//!
//! The skew field of fractions is never constructed: exact division inside
//! the torus stands in for it, which suffices on the cluster-monomial
//! fragment by the Laurent phenomenon. A seed is stored as its
//! `(B~, Λ, Z)` triple over the root torus; frame monomials are
//! reconstructed as twist-normalized ordered products.

use crate::error::QuantumError;
use crate::quiver::{Arrow, ExchangeMatrix, Quiver};
use crate::Int;
use num::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// A Laurent polynomial in `v = q^{1/2}` with integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QCoeff {
    terms: BTreeMap<i64, Int>,
}

impl QCoeff {
    pub fn zero() -> Self {
        QCoeff::default()
    }

    pub fn one() -> Self {
        QCoeff::v_pow(0)
    }

    /// The monomial `v^k`.
    pub fn v_pow(k: i64) -> Self {
        let mut t = BTreeMap::new();
        t.insert(k, Int::one());
        QCoeff { terms: t }
    }

    pub fn from_int(n: Int) -> Self {
        let mut c = QCoeff::zero();
        c.add_term(0, n);
        c
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(|c| c.is_one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &Int)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, exp: i64, c: Int) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(exp).or_insert_with(Int::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn add(&mut self, other: &QCoeff) {
        for (&e, c) in &other.terms {
            self.add_term(e, c.clone());
        }
    }

    pub fn sub(&mut self, other: &QCoeff) {
        for (&e, c) in &other.terms {
            self.add_term(e, -c.clone());
        }
    }

    pub fn mul(&self, other: &QCoeff) -> QCoeff {
        let mut out = QCoeff::zero();
        for (&e, c) in &self.terms {
            for (&f, d) in &other.terms {
                out.add_term(e + f, c * d);
            }
        }
        out
    }

    /// Multiply by `v^k`.
    pub fn shift(&self, k: i64) -> QCoeff {
        QCoeff { terms: self.terms.iter().map(|(&e, c)| (e + k, c.clone())).collect() }
    }

    pub fn neg(&self) -> QCoeff {
        QCoeff { terms: self.terms.iter().map(|(&e, c)| (e, -c.clone())).collect() }
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Exact division in `Z[v^{±1}]`.
    pub fn div_exact(&self, d: &QCoeff) -> Option<QCoeff> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(QCoeff::zero());
        }
        let mut r = self.clone();
        let mut qout = QCoeff::zero();
        let d_hi = d.max_exp().unwrap();
        let d_lead = d.terms.get(&d_hi).unwrap().clone();
        while !r.is_zero() {
            let r_hi = r.max_exp().unwrap();
            if r_hi - d_hi + d.min_exp().unwrap() < r.min_exp().unwrap_or(0) - 0 {
                // Purely defensive; the coefficient check below decides.
            }
            let lead = r.terms.get(&r_hi).unwrap();
            let (quot, rem) = num::Integer::div_rem(lead, &d_lead);
            if !rem.is_zero() {
                return None;
            }
            let shift = r_hi - d_hi;
            // r -= quot * v^shift * d
            for (&e, c) in &d.terms {
                r.add_term(e + shift, -(&quot * c));
            }
            qout.add_term(shift, quot);
            if let (Some(rh), Some(_)) = (r.max_exp(), r.min_exp()) {
                if rh >= r_hi {
                    // Leading term must strictly drop; if not, no quotient.
                    return None;
                }
            }
        }
        Some(qout)
    }

    /// Value at `v = 1`.
    pub fn specialize_v1(&self) -> Int {
        self.terms.values().sum()
    }

    /// All exponents even, or all odd.
    pub fn uniform_parity(&self) -> bool {
        let mut parities = self.terms.keys().map(|e| e.rem_euclid(2));
        match parities.next() {
            None => true,
            Some(p) => parities.all(|x| x == p),
        }
    }

    pub fn all_nonnegative(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    /// Bar symmetry: `a(v) = v^{2N} a(1/v)` for `N` the support center,
    /// returned when it holds.
    pub fn bar_symmetry_center(&self) -> Option<i64> {
        let (lo, hi) = (self.min_exp()?, self.max_exp()?);
        if (lo + hi) % 2 != 0 {
            return None;
        }
        let n = (lo + hi) / 2;
        for (&e, c) in &self.terms {
            if self.terms.get(&(2 * n - e)) != Some(c) {
                return None;
            }
        }
        Some(n)
    }

    pub fn coeff_at(&self, exp: i64) -> Int {
        self.terms.get(&exp).cloned().unwrap_or_else(Int::zero)
    }
}

impl fmt::Display for QCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&e, c) in &self.terms {
            let sign = if c.is_negative() { "-" } else { "+" };
            let mag = c.magnitude();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {sign} ")?;
            }
            match (e, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "v")?,
                (1, false) => write!(f, "{mag}*v")?,
                (_, true) => write!(f, "v^{e}")?,
                (_, false) => write!(f, "{mag}*v^{e}")?,
            }
        }
        Ok(())
    }
}

/// Skew-symmetric integer form on `Z^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkewForm {
    n: usize,
    entries: Vec<i64>,
}

impl SkewForm {
    pub fn zero(n: usize) -> Self {
        SkewForm { n, entries: vec![0; n * n] }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self, QuantumError> {
        let n = rows.len();
        let mut s = SkewForm::zero(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(QuantumError::RankMismatch(row.len(), n));
            }
            for (j, &v) in row.iter().enumerate() {
                s.entries[i * n + j] = v;
            }
        }
        for i in 0..n {
            for j in 0..n {
                if s.entries[i * n + j] != -s.entries[j * n + i] {
                    return Err(QuantumError::RankMismatch(i, j));
                }
            }
        }
        Ok(s)
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    /// 1-based entry.
    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.entries[(i - 1) * self.n + (j - 1)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.entries[(i - 1) * self.n + (j - 1)] = v;
        self.entries[(j - 1) * self.n + (i - 1)] = -v;
    }

    /// The bilinear pairing `Λ(e, f)`.
    pub fn pairing(&self, e: &[i64], f: &[i64]) -> i64 {
        let mut s = 0i64;
        for i in 0..self.n {
            if e[i] == 0 {
                continue;
            }
            for j in 0..self.n {
                s += e[i] * f[j] * self.entries[i * self.n + j];
            }
        }
        s
    }

    /// `Λ(1_i, f)` for a 1-based index.
    pub fn pairing_basis(&self, i: usize, f: &[i64]) -> i64 {
        (0..self.n).map(|j| f[j] * self.entries[(i - 1) * self.n + j]).sum()
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        (0..self.n).map(|i| self.entries[i * self.n..(i + 1) * self.n].to_vec()).collect()
    }
}

/// A finite `Z[q^{±1/2}]`-combination of lattice monomials `X^e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusElement {
    n: usize,
    terms: BTreeMap<Vec<i64>, QCoeff>,
}

impl TorusElement {
    pub fn zero(n: usize) -> Self {
        TorusElement { n, terms: BTreeMap::new() }
    }

    pub fn one(n: usize) -> Self {
        Self::monomial(vec![0; n], QCoeff::one())
    }

    pub fn x_power(e: Vec<i64>) -> Self {
        Self::monomial(e, QCoeff::one())
    }

    pub fn monomial(e: Vec<i64>, c: QCoeff) -> Self {
        let n = e.len();
        let mut t = TorusElement::zero(n);
        t.add_term(e, c);
        t
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &QCoeff)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &[i64]) -> QCoeff {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, e: Vec<i64>, c: QCoeff) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(e.len(), self.n);
        let entry = self.terms.entry(e.clone()).or_default();
        entry.add(&c);
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add(&mut self, other: &TorusElement) {
        for (e, c) in &other.terms {
            self.add_term(e.clone(), c.clone());
        }
    }

    pub fn scale(&self, c: &QCoeff) -> TorusElement {
        let mut out = TorusElement::zero(self.n);
        for (e, d) in &self.terms {
            out.add_term(e.clone(), d.mul(c));
        }
        out
    }

    /// Twisted product `X^e X^f = v^{Λ(e,f)} X^{e+f}`, extended bilinearly.
    pub fn mul(&self, other: &TorusElement, lambda: &SkewForm) -> Result<TorusElement, QuantumError> {
        if self.n != other.n {
            return Err(QuantumError::RankMismatch(self.n, other.n));
        }
        if lambda.rank() != self.n {
            return Err(QuantumError::RankMismatch(lambda.rank(), self.n));
        }
        let mut out = TorusElement::zero(self.n);
        for (e, c) in &self.terms {
            for (f, d) in &other.terms {
                let twist = lambda.pairing(e, f);
                let sum: Vec<i64> = e.iter().zip(f).map(|(a, b)| a + b).collect();
                out.add_term(sum, c.mul(d).shift(twist));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32, lambda: &SkewForm) -> Result<TorusElement, QuantumError> {
        let mut out = TorusElement::one(self.n);
        for _ in 0..k {
            out = out.mul(self, lambda)?;
        }
        Ok(out)
    }

    /// Specialization at `v = 1`: a commutative exponent-to-integer map.
    pub fn specialize_v1(&self) -> BTreeMap<Vec<i64>, Int> {
        self.terms
            .iter()
            .map(|(e, c)| (e.clone(), c.specialize_v1()))
            .filter(|(_, c)| !c.is_zero())
            .collect()
    }

    fn grlex_max(&self) -> Option<&Vec<i64>> {
        self.terms.keys().max_by(|a, b| grlex_cmp(a, b))
    }
}

/// Graded lexicographic order on `Z^n`: total degree first, then the
/// exponent vector itself as the fixed tie-break.
pub fn grlex_cmp(a: &[i64], b: &[i64]) -> std::cmp::Ordering {
    let sa: i64 = a.iter().sum();
    let sb: i64 = b.iter().sum();
    sa.cmp(&sb).then_with(|| a.cmp(b))
}

/// Exact right-division in the quantum torus: the quotient `q` with
/// `q * d = x`, if it exists.
///
/// Leading terms are cancelled in graded-lex order; every emitted quotient
/// monomial must lie inside the coordinate box forced by the support of
/// `x` and `d` (for each linear functional, extremes of a product add), so
/// the loop terminates with either the quotient or a divisibility failure.
pub fn exact_divide(
    x: &TorusElement,
    d: &TorusElement,
    lambda: &SkewForm,
) -> Result<TorusElement, QuantumError> {
    if d.is_zero() {
        return Err(QuantumError::DivisionByZero);
    }
    if x.is_zero() {
        return Ok(TorusElement::zero(x.n));
    }
    if x.n != d.n {
        return Err(QuantumError::RankMismatch(x.n, d.n));
    }
    let n = x.n;
    // Coordinate box for quotient exponents.
    let mut lo = vec![i64::MAX; n];
    let mut hi = vec![i64::MIN; n];
    for i in 0..n {
        let (mut xlo, mut xhi) = (i64::MAX, i64::MIN);
        for e in x.terms.keys() {
            xlo = xlo.min(e[i]);
            xhi = xhi.max(e[i]);
        }
        let (mut dlo, mut dhi) = (i64::MAX, i64::MIN);
        for e in d.terms.keys() {
            dlo = dlo.min(e[i]);
            dhi = dhi.max(e[i]);
        }
        lo[i] = xlo - dlo;
        hi[i] = xhi - dhi;
        if lo[i] > hi[i] {
            return Err(QuantumError::NotDivisible);
        }
    }
    let d_lead_exp = d.grlex_max().unwrap().clone();
    let d_lead_coeff = d.coeff(&d_lead_exp);
    let mut r = x.clone();
    let mut q = TorusElement::zero(n);
    while !r.is_zero() {
        let r_lead_exp = r.grlex_max().unwrap().clone();
        let t_exp: Vec<i64> = r_lead_exp.iter().zip(&d_lead_exp).map(|(a, b)| a - b).collect();
        if (0..n).any(|i| t_exp[i] < lo[i] || t_exp[i] > hi[i]) {
            return Err(QuantumError::NotDivisible);
        }
        // t * d must reproduce the leading term:
        // coeff(t) * coeff(d_lead) * v^{Λ(t, d_lead)} = coeff(r_lead).
        let twist = lambda.pairing(&t_exp, &d_lead_exp);
        let target = r.coeff(&r_lead_exp).shift(-twist);
        let Some(t_coeff) = target.div_exact(&d_lead_coeff) else {
            return Err(QuantumError::NotDivisible);
        };
        let t = TorusElement::monomial(t_exp, t_coeff);
        let td = t.mul(d, lambda)?;
        let mut nr = r.clone();
        for (e, c) in td.terms() {
            nr.add_term(e.clone(), c.neg());
        }
        debug_assert!(nr.coeff(&r_lead_exp).is_zero());
        r = nr;
        q.add(&t);
    }
    Ok(q)
}

/// `B~^T Λ = [I_m | 0]`.
pub fn check_compatible(b: &ExchangeMatrix, lambda: &SkewForm) -> bool {
    let n = b.rows();
    let m = b.cols();
    if lambda.rank() != n {
        return false;
    }
    for j in 1..=m {
        for k in 1..=n {
            let want = if j == k { 1 } else { 0 };
            let got: i64 = (1..=n).map(|i| b.entry(i, j) * lambda.entry(i, k)).sum();
            if got != want {
                return false;
            }
        }
    }
    true
}

/// Quantize a 2-cycle-free quiver: append one frozen pendant vertex and one
/// weight-0 arrow per principal vertex, and assemble the skew form in block
/// layout `[[0, 0, -I], [0, 0, 0], [I, 0, C]]` over (principal, old frozen,
/// new frozen), where `C` is the skew block read off the principal part of
/// the exchange matrix so that compatibility holds.
pub fn quantize(q: &Quiver) -> Result<(Quiver, SkewForm), QuantumError> {
    let n = q.n_vertices();
    let m = q.principal_count();
    let mut arrows = q.arrows().to_vec();
    let taken: std::collections::BTreeSet<String> =
        arrows.iter().map(|a| a.label.clone()).collect();
    for k in 1..=m {
        let mut label = format!("q{k}");
        while taken.contains(&label) {
            label.push('\'');
        }
        arrows.push(Arrow::weighted(label, k, n + k, 0));
    }
    let qq = Quiver::named(q.name(), n + m, m, arrows)
        .expect("pendant extension preserves invariants");
    let b_top = q.exchange_matrix();
    let mut lambda = SkewForm::zero(n + m);
    for k in 1..=m {
        lambda.set(k, n + k, -1);
    }
    for i in 1..=m {
        for j in 1..=m {
            if i < j {
                // Transposed principal block: forced by B'^T Λ = [I | 0].
                lambda.set(n + i, n + j, b_top.entry(j, i));
            }
        }
    }
    if !check_compatible(&qq.exchange_matrix(), &lambda) {
        return Err(QuantumError::Incompatible);
    }
    Ok((qq, lambda))
}

/// A quantum seed: exchange matrix, commutation matrix of the current
/// cluster, and the cluster variables expressed in the root torus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantumSeed {
    b: ExchangeMatrix,
    lambda: SkewForm,
    z: Vec<TorusElement>,
    lambda_root: SkewForm,
    history: Vec<usize>,
}

impl QuantumSeed {
    /// The initial seed: `Z_i = X^{1_i}` with `Λ_M = Λ`.
    pub fn initial(b: ExchangeMatrix, lambda: SkewForm) -> Result<Self, QuantumError> {
        if !check_compatible(&b, &lambda) {
            return Err(QuantumError::Incompatible);
        }
        let n = b.rows();
        let z = (0..n)
            .map(|i| {
                let mut e = vec![0i64; n];
                e[i] = 1;
                TorusElement::x_power(e)
            })
            .collect();
        Ok(QuantumSeed { b, lambda: lambda.clone(), z, lambda_root: lambda, history: vec![] })
    }

    pub fn exchange_matrix(&self) -> &ExchangeMatrix {
        &self.b
    }

    pub fn lambda(&self) -> &SkewForm {
        &self.lambda
    }

    pub fn lambda_root(&self) -> &SkewForm {
        &self.lambda_root
    }

    pub fn variables(&self) -> &[TorusElement] {
        &self.z
    }

    pub fn history(&self) -> &[usize] {
        &self.history
    }

    pub fn rank(&self) -> usize {
        self.b.rows()
    }

    pub fn principal(&self) -> usize {
        self.b.cols()
    }

    /// `sum_{i<j} c_i c_j Λ_{ij}` — the twist between the ordered product
    /// `Z_1^{c_1} ... Z_n^{c_n}` and the frame monomial `M(c)`.
    pub fn ordered_product_twist(&self, c: &[i64], lambda: &SkewForm) -> i64 {
        let n = self.rank();
        let mut s = 0i64;
        for i in 0..n {
            if c[i] == 0 {
                continue;
            }
            for j in (i + 1)..n {
                s += c[i] * c[j] * lambda.entry(i + 1, j + 1);
            }
        }
        s
    }

    /// Conversion exponent between the reported torus coefficients and the
    /// ordered-product basis of the root cluster: the coefficient of
    /// `Z_1^{k_1} ... Z_n^{k_n}` equals the torus coefficient at `X^k`
    /// times `v^{-t}` for this `t`.
    pub fn conversion_exponent(&self, k: &[i64]) -> i64 {
        self.ordered_product_twist(k, &self.lambda_root)
    }

    fn ordered_power_product(&self, exps: &[i64]) -> Result<TorusElement, QuantumError> {
        let mut acc = TorusElement::one(self.rank());
        for (i, &e) in exps.iter().enumerate() {
            debug_assert!(e >= 0);
            let p = self.z[i].pow(e as u32, &self.lambda_root)?;
            acc = acc.mul(&p, &self.lambda_root)?;
        }
        Ok(acc)
    }

    /// Frame monomial for a nonnegative direction vector:
    /// `M(d) = v^{-sum_{i<j} d_i d_j Λ_ij} Z_1^{d_1} ... Z_n^{d_n}`.
    fn frame_monomial_nonneg(&self, d: &[i64]) -> Result<TorusElement, QuantumError> {
        let twist = self.ordered_product_twist(d, &self.lambda);
        Ok(self.ordered_power_product(d)?.scale(&QCoeff::v_pow(-twist)))
    }

    /// Frame monomial `M(c)` for arbitrary `c`; entries of negative sign
    /// must correspond to directions whose variable divides exactly, which
    /// the Laurent phenomenon guarantees on cluster-monomial inputs.
    /// For the root seed `M(c) = X^c`.
    pub fn frame_monomial(&self, c: &[i64]) -> Result<TorusElement, QuantumError> {
        if c.len() != self.rank() {
            return Err(QuantumError::RankMismatch(c.len(), self.rank()));
        }
        let pos: Vec<i64> = c.iter().map(|&x| x.max(0)).collect();
        let neg: Vec<i64> = c.iter().map(|&x| (-x).max(0)).collect();
        let md = self.frame_monomial_nonneg(&pos)?;
        if neg.iter().all(|&x| x == 0) {
            return Ok(md);
        }
        let me = self.frame_monomial_nonneg(&neg)?;
        // M(c) = v^{Λ(c, e)} M(d) M(e)^{-1} with d = c_+ and e = c_-.
        let twist = self.lambda.pairing(c, &neg);
        let quotient = exact_divide(&md, &me, &self.lambda_root)?;
        Ok(quotient.scale(&QCoeff::v_pow(twist)))
    }

    /// Quantum seed mutation at a principal direction.
    ///
    /// The new variable is `M(c_+) + M(c_-)` computed via one exact torus
    /// division of the combined numerator by `Z_s` (the summands alone need
    /// not be Laurent). The commutation matrix transforms by
    /// `Λ'_{is} = Λ(1_i, c_+)`, with the compatibility-forced consistency
    /// check `Λ(1_i, c_+) = Λ(1_i, c_-)`; compatibility of the mutated pair
    /// is re-verified.
    pub fn mutate(&self, s: usize) -> Result<QuantumSeed, QuantumError> {
        let n = self.rank();
        let m = self.principal();
        if s < 1 || s > n {
            return Err(QuantumError::VertexOutOfRange(s, n));
        }
        if s > m {
            return Err(QuantumError::FrozenVertex(s));
        }
        let mut c_plus = vec![0i64; n];
        let mut c_minus = vec![0i64; n];
        for i in 1..=n {
            let b = self.b.entry(i, s);
            if b > 0 {
                c_plus[i - 1] = b;
            } else if b < 0 {
                c_minus[i - 1] = -b;
            }
        }
        c_plus[s - 1] -= 1;
        c_minus[s - 1] -= 1;
        // Consistency: Λ(1_i, c_+) = Λ(1_i, c_-) for i != s is forced by
        // compatibility; a violation means corrupted state.
        for i in 1..=n {
            if i != s
                && self.lambda.pairing_basis(i, &c_plus) != self.lambda.pairing_basis(i, &c_minus)
            {
                return Err(QuantumError::ConsistencyFailure(s));
            }
        }
        let one_s: Vec<i64> = (0..n).map(|i| i64::from(i == s - 1)).collect();
        let d_plus: Vec<i64> = c_plus.iter().zip(&one_s).map(|(a, b)| a + b).collect();
        let d_minus: Vec<i64> = c_minus.iter().zip(&one_s).map(|(a, b)| a + b).collect();
        let tw_plus = self.lambda.pairing(&c_plus, &one_s);
        let tw_minus = self.lambda.pairing(&c_minus, &one_s);
        let mut numerator = self.frame_monomial_nonneg(&d_plus)?.scale(&QCoeff::v_pow(tw_plus));
        numerator.add(&self.frame_monomial_nonneg(&d_minus)?.scale(&QCoeff::v_pow(tw_minus)));
        let z_new = exact_divide(&numerator, &self.z[s - 1], &self.lambda_root)?;

        let b_new = self.b.mutate(s);
        let mut lambda_new = self.lambda.clone();
        for i in 1..=n {
            if i != s {
                lambda_new.set(i, s, self.lambda.pairing_basis(i, &c_plus));
            }
        }
        if !check_compatible(&b_new, &lambda_new) {
            return Err(QuantumError::ConsistencyFailure(s));
        }
        let mut z = self.z.clone();
        z[s - 1] = z_new;
        let mut history = self.history.clone();
        history.push(s);
        Ok(QuantumSeed {
            b: b_new,
            lambda: lambda_new,
            z,
            lambda_root: self.lambda_root.clone(),
            history,
        })
    }

    pub fn mutate_sequence(&self, seq: &[usize]) -> Result<QuantumSeed, QuantumError> {
        let mut seed = self.clone();
        for &s in seq {
            seed = seed.mutate(s)?;
        }
        Ok(seed)
    }

    /// Quasi-commutation `Z_i Z_j = q^{Λ_ij} Z_j Z_i` for all pairs.
    pub fn quasi_commutation_holds(&self) -> bool {
        let n = self.rank();
        for i in 0..n {
            for j in (i + 1)..n {
                let ij = match self.z[i].mul(&self.z[j], &self.lambda_root) {
                    Ok(p) => p,
                    Err(_) => return false,
                };
                let ji = match self.z[j].mul(&self.z[i], &self.lambda_root) {
                    Ok(p) => p,
                    Err(_) => return false,
                };
                let twisted = ji.scale(&QCoeff::v_pow(2 * self.lambda.entry(i + 1, j + 1)));
                if ij != twisted {
                    return false;
                }
            }
        }
        true
    }

    /// Laurent expansion of the cluster monomial `M(n)` over the root
    /// torus: the map from lattice exponents `k` to torus coefficients
    /// `a_k(q)`. Principal entries of `n` must be nonnegative.
    ///
    /// The coefficient of the ordered root-cluster product
    /// `Z_1^{k_1} ... Z_n^{k_n}` is `a_k * v^{-t}` with
    /// `t = sum_{i<j} k_i k_j Λroot_ij`; see [`Self::conversion_exponent`].
    pub fn expand_monomial(&self, nvec: &[i64]) -> Result<TorusElement, QuantumError> {
        if nvec.len() != self.rank() {
            return Err(QuantumError::RankMismatch(nvec.len(), self.rank()));
        }
        for (i, &v) in nvec.iter().take(self.principal()).enumerate() {
            if v < 0 {
                return Err(QuantumError::NegativePrincipalExponent { index: i + 1, value: v });
            }
        }
        self.frame_monomial(nvec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn a2_seed() -> QuantumSeed {
        // Λ12 = -1 is compatible with the A2 exchange matrix.
        let b = catalog::a2().exchange_matrix();
        let lambda = SkewForm::from_rows(&[vec![0, -1], vec![1, 0]]).unwrap();
        QuantumSeed::initial(b, lambda).unwrap()
    }

    #[test]
    fn torus_mul_commutative_when_untwisted() {
        let lambda = SkewForm::zero(2);
        let x = TorusElement::x_power(vec![1, 0]);
        let y = TorusElement::x_power(vec![0, 1]);
        let xy = x.mul(&y, &lambda).unwrap();
        let yx = y.mul(&x, &lambda).unwrap();
        assert_eq!(xy, yx);
        assert_eq!(xy.coeff(&[1, 1]), QCoeff::one());
    }

    #[test]
    fn torus_mul_single_twist() {
        let lambda = SkewForm::from_rows(&[vec![0, -1], vec![1, 0]]).unwrap();
        let x = TorusElement::x_power(vec![1, 0]);
        let y = TorusElement::x_power(vec![0, 1]);
        let xy = x.mul(&y, &lambda).unwrap();
        assert_eq!(xy.coeff(&[1, 1]), QCoeff::v_pow(-1));
    }

    #[test]
    fn torus_mul_associative_random() {
        // Brute-force expansion both ways on pseudo-random elements.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let lambda = SkewForm::from_rows(&[vec![0, 2, -1], vec![-2, 0, 3], vec![1, -3, 0]]).unwrap();
        let mut sample = |rng: &mut rand_chacha::ChaCha8Rng| {
            let mut t = TorusElement::zero(3);
            for _ in 0..4 {
                let e: Vec<i64> = (0..3).map(|_| rng.random_range(-3..=3)).collect();
                let c = rng.random_range(-5..=5);
                let k = rng.random_range(-2..=2);
                let mut qc = QCoeff::zero();
                qc.add_term(k, Int::from(c));
                t.add_term(e, qc);
            }
            t
        };
        for _ in 0..10 {
            let x = sample(&mut rng);
            let y = sample(&mut rng);
            let z = sample(&mut rng);
            let left = x.mul(&y, &lambda).unwrap().mul(&z, &lambda).unwrap();
            let right = x.mul(&y.mul(&z, &lambda).unwrap(), &lambda).unwrap();
            assert_eq!(left, right);
        }
    }

    #[test]
    fn qcoeff_division() {
        // (1 + v)(1 - v) = 1 - v^2.
        let mut a = QCoeff::one();
        a.add_term(2, Int::from(-1));
        let mut d = QCoeff::one();
        d.add_term(1, Int::from(1));
        let q = a.div_exact(&d).unwrap();
        let mut want = QCoeff::one();
        want.add_term(1, Int::from(-1));
        assert_eq!(q, want);
        // Non-divisible.
        let mut three = QCoeff::zero();
        three.add_term(0, Int::from(3));
        let mut two = QCoeff::zero();
        two.add_term(0, Int::from(2));
        assert!(three.div_exact(&two).is_none());
    }

    #[test]
    fn exact_divide_monomial_shift() {
        let lambda = SkewForm::from_rows(&[vec![0, -1], vec![1, 0]]).unwrap();
        let x = TorusElement::x_power(vec![2, 3]);
        let d = TorusElement::x_power(vec![1, 1]);
        let q = exact_divide(&x, &d, &lambda).unwrap();
        let back = q.mul(&d, &lambda).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn exact_divide_round_trip() {
        // (Z2 + 1) * Z1, divided by Z1, returns Z2 + 1.
        let lambda = SkewForm::from_rows(&[vec![0, -1], vec![1, 0]]).unwrap();
        let mut f = TorusElement::x_power(vec![0, 1]);
        f.add(&TorusElement::one(2));
        let z1 = TorusElement::x_power(vec![1, 0]);
        let prod = f.mul(&z1, &lambda).unwrap();
        let q = exact_divide(&prod, &z1, &lambda).unwrap();
        assert_eq!(q, f);
    }

    #[test]
    fn exact_divide_degree_obstruction() {
        // X^{(1,0)} is not divisible by X^{(0,1)} + 1.
        let lambda = SkewForm::from_rows(&[vec![0, -1], vec![1, 0]]).unwrap();
        let x = TorusElement::x_power(vec![1, 0]);
        let mut d = TorusElement::x_power(vec![0, 1]);
        d.add(&TorusElement::one(2));
        assert_eq!(exact_divide(&x, &d, &lambda), Err(QuantumError::NotDivisible));
    }

    #[test]
    fn compatible_pairs() {
        let b = catalog::a2().exchange_matrix();
        let lambda = SkewForm::from_rows(&[vec![0, -1], vec![1, 0]]).unwrap();
        assert!(check_compatible(&b, &lambda));
        assert!(!check_compatible(&b, &SkewForm::zero(2)));
    }

    #[test]
    fn quantize_a2_block_layout() {
        let (qq, lambda) = quantize(&catalog::a2()).unwrap();
        assert_eq!(qq.n_vertices(), 4);
        assert_eq!(qq.principal_count(), 2);
        assert!(check_compatible(&qq.exchange_matrix(), &lambda));
        // Block layout: -I in the top-right, I in the bottom-left, and the
        // transposed principal block bottom-right.
        assert_eq!(lambda.entry(1, 3), -1);
        assert_eq!(lambda.entry(2, 4), -1);
        assert_eq!(lambda.entry(3, 1), 1);
        assert_eq!(lambda.entry(1, 2), 0);
        let b_top = catalog::a2().exchange_matrix();
        assert_eq!(lambda.entry(3, 4), b_top.entry(2, 1));
    }

    #[test]
    fn quantize_no_arrows() {
        let q = crate::quiver::Quiver::new(2, 2, vec![]).unwrap();
        let (qq, lambda) = quantize(&q).unwrap();
        assert!(check_compatible(&qq.exchange_matrix(), &lambda));
        assert_eq!(lambda.entry(3, 4), 0);
    }

    #[test]
    fn quantize_somos5() {
        let (qq, lambda) = quantize(&catalog::somos5()).unwrap();
        assert_eq!(qq.n_vertices(), 10);
        assert!(check_compatible(&qq.exchange_matrix(), &lambda));
    }

    #[test]
    fn root_frame_is_lattice_monomial() {
        let seed = a2_seed();
        for c in [vec![1, 0], vec![0, 1], vec![2, 3], vec![-1, 2], vec![-2, -1]] {
            assert_eq!(seed.frame_monomial(&c).unwrap(), TorusElement::x_power(c));
        }
    }

    #[test]
    fn frame_pair_normalization() {
        // M(1_i + 1_j) = v^{-Λ_ij} Z_i Z_j.
        let seed = a2_seed();
        let m = seed.frame_monomial(&[1, 1]).unwrap();
        let prod = seed.z[0].mul(&seed.z[1], seed.lambda_root()).unwrap();
        assert_eq!(m, prod.scale(&QCoeff::v_pow(1)));
    }

    #[test]
    fn a2_first_mutation() {
        // Hand evaluation: Z'_1 = X^{(-1,1)} + X^{(-1,0)}.
        let seed = a2_seed();
        let out = seed.mutate(1).unwrap();
        let mut want = TorusElement::x_power(vec![-1, 1]);
        want.add(&TorusElement::x_power(vec![-1, 0]));
        assert_eq!(out.variables()[0], want);
        assert_eq!(out.variables()[1], TorusElement::x_power(vec![0, 1]));
        // Λ' from quasi-commutation: Λ'_{21} = -1.
        assert_eq!(out.lambda().entry(2, 1), -1);
        assert!(out.quasi_commutation_holds());
        assert!(check_compatible(out.exchange_matrix(), out.lambda()));
    }

    #[test]
    fn mutation_involutive_a2() {
        let seed = a2_seed();
        for s in 1..=2 {
            let back = seed.mutate(s).unwrap().mutate(s).unwrap();
            assert_eq!(back.variables(), seed.variables());
            assert_eq!(back.exchange_matrix(), seed.exchange_matrix());
            assert_eq!(back.lambda(), seed.lambda());
        }
    }

    #[test]
    fn pentagon_periodicity_a2() {
        // mu_1 mu_2 mu_1 mu_2 mu_1 returns the initial seed with the two
        // indices swapped.
        let seed = a2_seed();
        let out = seed.mutate_sequence(&[1, 2, 1, 2, 1]).unwrap();
        assert_eq!(out.variables()[0], TorusElement::x_power(vec![0, 1]));
        assert_eq!(out.variables()[1], TorusElement::x_power(vec![1, 0]));
        assert_eq!(out.lambda().entry(1, 2), 1);
        assert_eq!(out.exchange_matrix().entry(1, 2), 1);
    }

    #[test]
    fn expansion_examples() {
        let seed = a2_seed();
        // Root monomial: single coefficient 1.
        let root = seed.expand_monomial(&[2, 1]).unwrap();
        assert_eq!(root.num_terms(), 1);
        assert_eq!(root.coeff(&[2, 1]), QCoeff::one());
        // Mutated variable in the root cluster: a_{(-1,1)} = a_{(-1,0)} = 1.
        let m1 = seed.mutate(1).unwrap();
        let y = m1.expand_monomial(&[1, 0]).unwrap();
        assert_eq!(y.coeff(&[-1, 1]), QCoeff::one());
        assert_eq!(y.coeff(&[-1, 0]), QCoeff::one());
        assert_eq!(y.num_terms(), 2);
    }

    #[test]
    fn expansion_rejects_negative_principal() {
        let seed = a2_seed();
        assert!(matches!(
            seed.expand_monomial(&[-1, 0]),
            Err(QuantumError::NegativePrincipalExponent { index: 1, .. })
        ));
    }

    #[test]
    fn kronecker_specializes_to_classical() {
        // First mutated variable of the quantized Kronecker quiver at
        // v = 1: (x2^2 x3 + 1)/x1, with x3 the pendant coefficient.
        let (qq, lambda) = quantize(&catalog::kronecker()).unwrap();
        let seed = QuantumSeed::initial(qq.exchange_matrix(), lambda).unwrap();
        let out = seed.mutate(1).unwrap();
        let spec = out.variables()[0].specialize_v1();
        let mut want: BTreeMap<Vec<i64>, Int> = BTreeMap::new();
        want.insert(vec![-1, 2, 1, 0], Int::one());
        want.insert(vec![-1, 0, 0, 0], Int::one());
        assert_eq!(spec, want);
    }
}
