//! Dense two-phase simplex over exact rationals with Bland's rule.
//!
//! Solves `min c·x  s.t.  A x = b, x ≥ 0` and returns primal and dual
//! solutions. Sized for hull-membership problems with a few hundred
//! columns; there is no sparsity or refactorization.

use num_traits::{One, Signed, Zero};

use super::linalg;
use crate::scalar::Rational;

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub x: Vec<Rational>,
    /// Multipliers with `Aᵀy ≤ c` and `b·y = c·x`.
    pub y: Vec<Rational>,
    pub value: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

struct Tableau {
    /// Rows `[coefficients | rhs]`.
    rows: Vec<Vec<Rational>>,
    /// Reduced-cost row, same width; last entry is minus the objective.
    cost: Vec<Rational>,
    basis: Vec<usize>,
}

impl Tableau {
    fn width(&self) -> usize {
        self.cost.len() - 1
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = Rational::one() / &self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = self.rows[r].clone();
        let eliminate = |row: &mut Vec<Rational>| {
            if row[c].is_zero() {
                return;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        };
        for (k, row) in self.rows.iter_mut().enumerate() {
            if k != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.cost);
        self.basis[r] = c;
    }

    /// Runs Bland's rule over columns `< allowed`. Returns false when
    /// unbounded.
    fn optimize(&mut self, allowed: usize) -> bool {
        loop {
            let Some(c) = (0..allowed).find(|&j| self.cost[j].is_negative()) else {
                return true;
            };
            let w = self.width();
            let mut best: Option<(usize, Rational)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                if row[c].is_positive() {
                    let ratio = &row[w] / &row[c];
                    let better = match &best {
                        None => true,
                        Some((br, bv)) => ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br]),
                    };
                    if better {
                        best = Some((r, ratio));
                    }
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }
}

pub fn minimize(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    assert_eq!(b.len(), m);
    assert!(a.iter().all(|row| row.len() == n));

    // Phase one: artificial variables n..n+m, one per row, with b ≥ 0.
    let mut rows = Vec::with_capacity(m);
    for (r, (row, rhs)) in a.iter().zip(b).enumerate() {
        let flip = rhs.is_negative();
        let mut t: Vec<Rational> = row.iter().map(|v| if flip { -v.clone() } else { v.clone() }).collect();
        t.extend((0..m).map(|k| if k == r { Rational::one() } else { Rational::zero() }));
        t.push(if flip { -rhs.clone() } else { rhs.clone() });
        rows.push(t);
    }
    let width = n + m;
    let mut cost = vec![Rational::zero(); width + 1];
    for row in &rows {
        for j in 0..n {
            cost[j] -= &row[j];
        }
        cost[width] -= &row[width];
    }
    let mut tab = Tableau { rows, cost, basis: (n..n + m).collect() };
    tab.optimize(n);
    if !tab.cost[width].is_zero() {
        return LpOutcome::Infeasible;
    }

    // Drive remaining artificials out of the basis; rows where that is
    // impossible are linear combinations of the others and are dropped.
    let mut r = 0;
    while r < tab.rows.len() {
        if tab.basis[r] >= n {
            if let Some(j) = (0..n).find(|&j| !tab.rows[r][j].is_zero()) {
                tab.pivot(r, j);
            } else {
                tab.rows.remove(r);
                tab.basis.remove(r);
                continue;
            }
        }
        r += 1;
    }

    // Phase two.
    let mut cost = vec![Rational::zero(); width + 1];
    cost[..n].clone_from_slice(c);
    for (row, &bv) in tab.rows.iter().zip(&tab.basis) {
        let cb = c[bv].clone();
        if cb.is_zero() {
            continue;
        }
        for (x, y) in cost.iter_mut().zip(row) {
            *x -= &cb * y;
        }
    }
    tab.cost = cost;
    if !tab.optimize(n) {
        return LpOutcome::Unbounded;
    }

    let mut x = vec![Rational::zero(); n];
    for (row, &bv) in tab.rows.iter().zip(&tab.basis) {
        x[bv] = row[width].clone();
    }
    let value = linalg::dot(c, &x);
    let y = duals(a, c, &tab.basis, m);
    LpOutcome::Optimal(LpSolution { x, y, value })
}

/// Solves `B_Sᵀ y_S = c_B` on a row subset `S` of size `|basis|` on which
/// the basis columns are nonsingular; the remaining rows get zero
/// multipliers.
fn duals(a: &[Vec<Rational>], c: &[Rational], basis: &[usize], m: usize) -> Vec<Rational> {
    let k = basis.len();
    let mut y = vec![Rational::zero(); m];
    if k == 0 {
        return y;
    }
    let cols: Vec<Vec<Rational>> = (0..m).map(|r| basis.iter().map(|&j| a[r][j].clone()).collect()).collect();
    let rows = linalg::independent_rows(&cols);
    debug_assert_eq!(rows.len(), k);
    // Transpose of the square submatrix: entry (p, q) = a[rows[q]][basis[p]].
    let bt: Vec<Vec<Rational>> = (0..k).map(|p| rows.iter().map(|&r| cols[r][p].clone()).collect()).collect();
    let cb: Vec<Rational> = basis.iter().map(|&j| c[j].clone()).collect();
    let ys = linalg::solve(&bt, &cb).expect("basis submatrix is nonsingular");
    for (&r, v) in rows.iter().zip(ys) {
        y[r] = v;
    }
    y
}
