//! Exact rational linear algebra: Gaussian elimination with infeasibility
//! certificates and a small phase-1 simplex for sign-constrained systems.

use crate::Rat;
use num::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinSolve {
    /// A particular solution (free variables set to zero).
    Feasible(Vec<Rat>),
    /// Row combination `y` with `y^T A = 0` but `y^T b != 0`.
    Infeasible(Vec<Rat>),
}

/// Solve `A x = b` over the rationals.
pub fn solve_rational(a: &[Vec<Rat>], b: &[Rat]) -> LinSolve {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    // Augmented [A | b | I] so the eliminating combination can be read off.
    let width = cols + 1 + rows;
    let mut m: Vec<Vec<Rat>> = (0..rows)
        .map(|i| {
            let mut row = Vec::with_capacity(width);
            row.extend(a[i].iter().cloned());
            row.push(b[i].clone());
            for j in 0..rows {
                row.push(if i == j { Rat::one() } else { Rat::zero() });
            }
            row
        })
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0usize;
    for col in 0..cols {
        let Some(pr) = (r..rows).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(r, pr);
        let inv = m[r][col].recip();
        for x in 0..width {
            m[r][x] *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][col].is_zero() {
                let c = m[i][col].clone();
                for x in 0..width {
                    let t = &m[r][x] * &c;
                    m[i][x] -= t;
                }
            }
        }
        pivots.push((r, col));
        r += 1;
        if r == rows {
            break;
        }
    }
    for i in r..rows {
        if !m[i][cols].is_zero() {
            return LinSolve::Infeasible(m[i][cols + 1..].to_vec());
        }
    }
    let mut x = vec![Rat::zero(); cols];
    for &(i, c) in &pivots {
        x[c] = m[i][cols].clone();
    }
    LinSolve::Feasible(x)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Phase1 {
    Feasible(Vec<Rat>),
    /// Farkas certificate `y`: `y^T A <= 0` componentwise on the columns
    /// while `y^T b > 0`.
    Infeasible(Vec<Rat>),
}

/// Exact phase-1 simplex for `A x = b, x >= 0` (Bland's rule).
pub fn simplex_feasible(a: &[Vec<Rat>], b: &[Rat]) -> Phase1 {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    if rows == 0 {
        return Phase1::Feasible(vec![]);
    }
    // Tableau over structural + artificial columns, then RHS.
    let width = cols + rows + 1;
    let mut t: Vec<Vec<Rat>> = Vec::with_capacity(rows + 1);
    let mut sign: Vec<Rat> = Vec::with_capacity(rows);
    for i in 0..rows {
        let s = if b[i].is_negative() { -Rat::one() } else { Rat::one() };
        let mut row = Vec::with_capacity(width);
        for j in 0..cols {
            row.push(&a[i][j] * &s);
        }
        for j in 0..rows {
            row.push(if i == j { Rat::one() } else { Rat::zero() });
        }
        row.push(&b[i] * &s);
        t.push(row);
        sign.push(s);
    }
    // Objective row: minimize sum of artificials; reduced costs start as
    // c_j - sum over rows (artificial basis) of column entries.
    let mut obj: Vec<Rat> = vec![Rat::zero(); width];
    for j in 0..width {
        let mut s = Rat::zero();
        for row in t.iter() {
            s += &row[j];
        }
        let c_j = if (cols..cols + rows).contains(&j) { Rat::one() } else { Rat::zero() };
        obj[j] = if j < width - 1 { c_j - s } else { -s };
    }
    let mut basis: Vec<usize> = (cols..cols + rows).collect();
    loop {
        // Bland: entering column = smallest index with negative reduced cost.
        let Some(enter) = (0..width - 1).find(|&j| obj[j].is_negative()) else { break };
        // Ratio test, Bland tie-break on basis index.
        let mut leave: Option<usize> = None;
        let mut best: Option<Rat> = None;
        for (i, row) in t.iter().enumerate() {
            if row[enter].is_positive() {
                let ratio = &row[width - 1] / &row[enter];
                let better = match &best {
                    None => true,
                    Some(b) => {
                        ratio < *b || (ratio == *b && basis[i] < basis[leave.unwrap()])
                    }
                };
                if better {
                    best = Some(ratio);
                    leave = Some(i);
                }
            }
        }
        let Some(li) = leave else {
            // Unbounded phase-1 cannot happen (objective bounded below by 0).
            unreachable!("phase-1 objective is bounded");
        };
        // Pivot.
        let inv = t[li][enter].recip();
        for x in 0..width {
            t[li][x] *= &inv;
        }
        for i in 0..rows {
            if i != li && !t[i][enter].is_zero() {
                let c = t[i][enter].clone();
                for x in 0..width {
                    let v = &t[li][x] * &c;
                    t[i][x] -= v;
                }
            }
        }
        if !obj[enter].is_zero() {
            let c = obj[enter].clone();
            for x in 0..width {
                let v = &t[li][x] * &c;
                obj[x] -= v;
            }
        }
        basis[li] = enter;
    }
    let objective = -obj[width - 1].clone();
    if objective.is_zero() {
        let mut x = vec![Rat::zero(); cols];
        for (i, &bv) in basis.iter().enumerate() {
            if bv < cols {
                x[bv] = t[i][width - 1].clone();
            }
        }
        Phase1::Feasible(x)
    } else {
        // Dual multipliers from artificial reduced costs: y_i = (1 - r_i),
        // mapped back through the row sign flips.
        let y: Vec<Rat> = (0..rows)
            .map(|i| (Rat::one() - &obj[cols + i]) * &sign[i])
            .collect();
        Phase1::Infeasible(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rat, rat_int};

    fn r(n: i64) -> Rat {
        rat_int(n)
    }

    #[test]
    fn solve_simple_system() {
        // x + y = 3, x - y = 1 -> x = 2, y = 1.
        let a = vec![vec![r(1), r(1)], vec![r(1), r(-1)]];
        let b = vec![r(3), r(1)];
        match solve_rational(&a, &b) {
            LinSolve::Feasible(x) => assert_eq!(x, vec![r(2), r(1)]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_certificate_validates() {
        // x + y = 1, x + y = 2.
        let a = vec![vec![r(1), r(1)], vec![r(1), r(1)]];
        let b = vec![r(1), r(2)];
        match solve_rational(&a, &b) {
            LinSolve::Infeasible(y) => {
                for j in 0..2 {
                    let s: Rat = (0..2).map(|i| &y[i] * &a[i][j]).sum();
                    assert!(s.is_zero());
                }
                let s: Rat = (0..2).map(|i| &y[i] * &b[i]).sum();
                assert!(!s.is_zero());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn simplex_feasible_basic() {
        // x1 + x2 = 2 with x >= 0.
        let a = vec![vec![r(1), r(1)]];
        let b = vec![r(2)];
        match simplex_feasible(&a, &b) {
            Phase1::Feasible(x) => {
                let s: Rat = x.iter().sum();
                assert_eq!(s, r(2));
                assert!(x.iter().all(|v| !v.is_negative()));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn simplex_infeasible_farkas() {
        // x1 - x2 = 1 and -x1 + x2 = 1 cannot both hold with x >= 0.
        let a = vec![vec![r(1), r(-1)], vec![r(-1), r(1)]];
        let b = vec![r(1), r(1)];
        match simplex_feasible(&a, &b) {
            Phase1::Infeasible(y) => {
                for j in 0..2 {
                    let s: Rat = (0..2).map(|i| &y[i] * &a[i][j]).sum();
                    assert!(!s.is_positive(), "y^T A must be <= 0");
                }
                let s: Rat = (0..2).map(|i| &y[i] * &b[i]).sum();
                assert!(s.is_positive(), "y^T b must be > 0");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn simplex_degenerate_rhs() {
        let a = vec![vec![r(1), r(-1)]];
        let b = vec![r(0)];
        assert!(matches!(simplex_feasible(&a, &b), Phase1::Feasible(_)));
    }

    #[test]
    fn fractional_solution() {
        let a = vec![vec![r(2), r(0)], vec![r(0), r(3)]];
        let b = vec![r(1), r(1)];
        match solve_rational(&a, &b) {
            LinSolve::Feasible(x) => assert_eq!(x, vec![rat(1, 2), rat(1, 3)]),
            other => panic!("{other:?}"),
        }
    }
}
