//! Parametric families of correlation inequalities.

use std::collections::HashSet;

use num_traits::Zero;

use super::{LinearInequality, Space};
use crate::error::{Error, Result};
use crate::graphs::{BipartiteShape, GraphShape, Node};
use crate::scalar::{rat, Rational};

/// `sign · x_{A_iB_j} ≤ 1`.
pub fn family_trivial(shape: BipartiteShape, i: usize, j: usize, sign: i8) -> Result<LinearInequality> {
    if sign != 1 && sign != -1 {
        return Err(Error::Invalid(format!("sign must be +1 or -1, got {sign}")));
    }
    let k = shape.edge_index(Node::Alice(i), Node::Bob(j))?;
    let mut a = vec![Rational::zero(); shape.edge_count()];
    a[k] = rat(sign.into());
    LinearInequality::new(Space::Correlation { m: shape.m, n: shape.n }, a, rat(1))
}

/// `−Σ_{e∈F} x_e + Σ_{e∈C∖F} x_e ≤ |C| − 2` for the cycle through `cycle`
/// (consecutive nodes adjacent, last back to first) and an odd subset `odd`
/// of its edges.
pub fn family_cycle(shape: BipartiteShape, cycle: &[Node], odd: &[(Node, Node)]) -> Result<LinearInequality> {
    let len = cycle.len();
    if len < 4 || len % 2 != 0 {
        return Err(Error::Invalid(format!("a cycle in a bipartite graph has even length >= 4, got {len}")));
    }
    if cycle.iter().collect::<HashSet<_>>().len() != len {
        return Err(Error::Invalid("cycle repeats a node".into()));
    }
    let edges: Vec<usize> =
        (0..len).map(|k| shape.edge_index(cycle[k], cycle[(k + 1) % len])).collect::<Result<_>>()?;
    let mut flipped = HashSet::new();
    for &(u, v) in odd {
        let e = shape.edge_index(u, v)?;
        if !edges.contains(&e) {
            return Err(Error::Invalid(format!("edge {u}{v} is not on the cycle")));
        }
        if !flipped.insert(e) {
            return Err(Error::Invalid(format!("edge {u}{v} listed twice")));
        }
    }
    if flipped.len() % 2 == 0 {
        return Err(Error::Invalid(format!("|F| must be odd, got {}", flipped.len())));
    }
    let mut a = vec![Rational::zero(); shape.edge_count()];
    for e in edges {
        a[e] = if flipped.contains(&e) { rat(-1) } else { rat(1) };
    }
    LinearInequality::new(Space::Correlation { m: shape.m, n: shape.n }, a, rat(len as i64 - 2))
}

/// Hypermetric correlation inequality for integer weights `b_A` (length
/// `s`) and `b_B` (length `t`) with total 1.
///
/// The result lives on `K_{s+C(t,2), t+C(s,2)}`: rows `A_1..A_s` then one
/// row `A_{jj'}` per pair `j<j'` of B-nodes; columns `B_1..B_t` then one
/// column `B_{ii'}` per pair `i<i'` of A-nodes, pairs in lexicographic
/// order. It is returned in `≤` form.
pub fn family_hypermetric(b_a: &[i64], b_b: &[i64]) -> Result<LinearInequality> {
    let total: i64 = b_a.iter().chain(b_b).sum();
    if total != 1 {
        return Err(Error::Invalid(format!("hypermetric weights must sum to 1, got {total}")));
    }
    let (s, t) = (b_a.len(), b_b.len());
    let a_pairs: Vec<(usize, usize)> = (0..s).flat_map(|i| (i + 1..s).map(move |k| (i, k))).collect();
    let b_pairs: Vec<(usize, usize)> = (0..t).flat_map(|j| (j + 1..t).map(move |k| (j, k))).collect();
    let (m, n) = (s + b_pairs.len(), t + a_pairs.len());
    // Coefficients of the ≥ form; negated at the end.
    let mut c = vec![vec![0i64; n]; m];
    let mut bound = 0i64;
    for i in 0..s {
        for j in 0..t {
            c[i][j] = b_a[i] * b_b[j];
            bound += b_a[i] * b_b[j];
        }
    }
    for (k, &(i, i2)) in a_pairs.iter().enumerate() {
        let prod = b_a[i] * b_a[i2];
        c[i][t + k] = prod;
        c[i2][t + k] = -prod.abs();
        if prod < 0 {
            bound += 2 * prod;
        }
    }
    for (k, &(j, j2)) in b_pairs.iter().enumerate() {
        let prod = b_b[j] * b_b[j2];
        c[s + k][j] = prod;
        c[s + k][j2] = -prod.abs();
        if prod < 0 {
            bound += 2 * prod;
        }
    }
    let a = c.iter().flatten().map(|&v| rat(-v)).collect();
    LinearInequality::new(Space::Correlation { m, n }, a, rat(-bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inequalities::catalog;

    fn k(m: usize, n: usize) -> BipartiteShape {
        BipartiteShape::new(m, n).unwrap()
    }

    #[test]
    fn four_cycle_is_chsh() {
        use Node::*;
        let c = family_cycle(k(2, 2), &[Alice(0), Bob(0), Alice(1), Bob(1)], &[(Alice(1), Bob(1))]).unwrap();
        assert_eq!(c, catalog("chsh").unwrap());
    }

    #[test]
    fn cycle_errors() {
        use Node::*;
        let cyc = [Alice(0), Bob(0), Alice(1), Bob(1)];
        assert!(family_cycle(k(2, 2), &cyc, &[]).is_err());
        assert!(family_cycle(k(2, 2), &cyc, &[(Alice(0), Bob(0)), (Alice(1), Bob(1))]).is_err());
        assert!(family_cycle(k(2, 2), &[Alice(0), Alice(1), Bob(0), Bob(1)], &[(Alice(0), Bob(1))]).is_err());
    }

    #[test]
    fn trivial_inequality() {
        let t = family_trivial(k(1, 1), 0, 0, 1).unwrap();
        assert_eq!(t, LinearInequality::correlation(&[vec![1]], 1).unwrap());
        assert!(family_trivial(k(1, 1), 1, 0, 1).is_err());
    }

    #[test]
    fn hypermetric_reproduces_eliminated_pentagonal() {
        let h = family_hypermetric(&[1, 1, 1], &[-1, -1]).unwrap();
        assert_eq!(h, catalog("pentagonal-trielim").unwrap());
    }

    #[test]
    fn hypermetric_degenerate_and_bad_sum() {
        let h = family_hypermetric(&[1], &[]).unwrap();
        assert_eq!(h.space, Space::Correlation { m: 1, n: 0 });
        assert!(h.a.is_empty() && h.rhs.is_zero());
        assert!(family_hypermetric(&[1, 1], &[]).is_err());
    }
}
