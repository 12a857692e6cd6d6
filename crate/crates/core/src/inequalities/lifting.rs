//! Zero-lifting and triangular elimination.

use num_traits::{Signed, Zero};

use super::{LinearInequality, Space};
use crate::error::{Error, Result};
use crate::graphs::{CompleteShape, GraphShape, Node};
use crate::scalar::Rational;

/// Pads with zero coefficients for settings `m' ≥ m`, `n' ≥ n`. Works in
/// correlation, suspension and COR coordinates.
pub fn zero_lift(ineq: &LinearInequality, m2: usize, n2: usize) -> Result<LinearInequality> {
    let (m, n) = ineq.space.sides();
    if m2 < m || n2 < n {
        return Err(Error::Invalid(format!("cannot lift ({m},{n}) settings down to ({m2},{n2})")));
    }
    let (space, nodes) = match ineq.space {
        Space::Correlation { .. } => (Space::Correlation { m: m2, n: n2 }, false),
        Space::Suspension { .. } => (Space::Suspension { m: m2, n: n2 }, true),
        Space::Cor { .. } => (Space::Cor { m: m2, n: n2 }, true),
        Space::Complete { .. } => {
            return Err(Error::Invalid("zero-lifting applies to bipartite spaces".into()));
        }
    };
    let mut a = vec![Rational::zero(); space.dim()];
    let edge_off = if nodes {
        a[..m].clone_from_slice(&ineq.a[..m]);
        a[m2..m2 + n].clone_from_slice(&ineq.a[m..m + n]);
        (m + n, m2 + n2)
    } else {
        (0, 0)
    };
    for i in 0..m {
        for j in 0..n {
            a[edge_off.1 + i * n2 + j] = ineq.a[edge_off.0 + i * n + j].clone();
        }
    }
    LinearInequality::new(space, a, ineq.rhs.clone())
}

/// A same-side edge removed by triangular elimination.
#[derive(Clone, Debug, PartialEq)]
pub struct EliminatedEdge {
    pub u: Node,
    pub v: Node,
    pub coefficient: Rational,
    /// The node appended on the other side, e.g. `B_{ii'}` for `A_iA_{i'}`.
    pub new_node: Node,
}

impl EliminatedEdge {
    /// Label such as `B12` for the new node.
    pub fn label(&self) -> String {
        let idx = |x: Node| match x {
            Node::Alice(i) | Node::Bob(i) => i + 1,
            Node::Root => 0,
        };
        let side = if matches!(self.new_node, Node::Bob(_)) { "B" } else { "A" };
        format!("{side}{}{}", idx(self.u), idx(self.v))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrielimOutcome {
    pub inequality: LinearInequality,
    /// Set when the input had no same-side terms and was passed through.
    pub already_bipartite: bool,
    pub eliminated: Vec<EliminatedEdge>,
}

impl TrielimOutcome {
    /// Recovers the complete-graph inequality: drops the appended nodes,
    /// reads each eliminated coefficient back from the `(v, new)` entry and
    /// subtracts the added right-hand side.
    pub fn restore(&self) -> Result<LinearInequality> {
        let Space::Correlation { m, n } = self.inequality.space else {
            unreachable!("elimination output is a correlation inequality")
        };
        let b_new = self.eliminated.iter().filter(|e| matches!(e.new_node, Node::Bob(_))).count();
        let a_new = self.eliminated.len() - b_new;
        let (s, t) = (m - a_new, n - b_new);
        let shape = CompleteShape::new(s, t)?;
        let mut a = vec![Rational::zero(); shape.edge_count()];
        for i in 0..s {
            for j in 0..t {
                a[shape.edge_index(Node::Alice(i), Node::Bob(j))?] = self.inequality.cross(i, j).clone();
            }
        }
        let mut rhs = self.inequality.rhs.clone();
        for e in &self.eliminated {
            let c = match (e.v, e.new_node) {
                (Node::Alice(v), Node::Bob(w)) => -self.inequality.cross(v, w).clone(),
                (Node::Bob(v), Node::Alice(w)) => -self.inequality.cross(w, v).clone(),
                _ => unreachable!(),
            };
            rhs -= c.abs();
            a[shape.edge_index(e.u, e.v)?] = c;
        }
        LinearInequality::new(Space::Complete { alice: s, bob: t }, a, rhs)
    }
}

/// Removes the same-side coordinates of a complete-graph inequality.
///
/// For each same-side pair `u < v` with coefficient `c ≠ 0` (pairs in
/// lexicographic order), a node `w` is appended on the other side and
/// `|c|` times the triangle inequality
/// `−sign(c)·x_uv − x_uw − sign(c)·x_vw ≤ 1` is added, which cancels the
/// `x_uv` term. New B-nodes follow `B_1..B_t`, new A-nodes follow
/// `A_1..A_s`. The right-hand side grows by `Σ|c|`.
pub fn triangular_eliminate(ineq: &LinearInequality) -> Result<TrielimOutcome> {
    let (s, t) = match ineq.space {
        Space::Correlation { .. } => {
            return Ok(TrielimOutcome { inequality: ineq.clone(), already_bipartite: true, eliminated: Vec::new() })
        }
        Space::Complete { alice, bob } => (alice, bob),
        other => {
            return Err(Error::Invalid(format!(
                "triangular elimination needs a complete-graph inequality, got {other}"
            )))
        }
    };
    let shape = CompleteShape::new(s, t)?;
    let coeff = |u: Node, v: Node| ineq.a[shape.edge_index(u, v).unwrap()].clone();
    let mut a_side = Vec::new();
    for i in 0..s {
        for i2 in i + 1..s {
            let c = coeff(Node::Alice(i), Node::Alice(i2));
            if !c.is_zero() {
                a_side.push((i, i2, c));
            }
        }
    }
    let mut b_side = Vec::new();
    for j in 0..t {
        for j2 in j + 1..t {
            let c = coeff(Node::Bob(j), Node::Bob(j2));
            if !c.is_zero() {
                b_side.push((j, j2, c));
            }
        }
    }
    let (m, n) = (s + b_side.len(), t + a_side.len());
    if m == 0 || n == 0 {
        return Err(Error::InvalidShape(format!("elimination of {shape} leaves an empty side")));
    }
    let mut a = vec![Rational::zero(); m * n];
    for i in 0..s {
        for j in 0..t {
            a[i * n + j] = coeff(Node::Alice(i), Node::Bob(j));
        }
    }
    let mut rhs = ineq.rhs.clone();
    let mut eliminated = Vec::new();
    for (k, (i, i2, c)) in a_side.into_iter().enumerate() {
        let w = t + k;
        a[i * n + w] -= c.abs();
        a[i2 * n + w] -= &c;
        rhs += c.abs();
        eliminated.push(EliminatedEdge {
            u: Node::Alice(i),
            v: Node::Alice(i2),
            coefficient: c,
            new_node: Node::Bob(w),
        });
    }
    for (k, (j, j2, c)) in b_side.into_iter().enumerate() {
        let w = s + k;
        a[w * n + j] -= c.abs();
        a[w * n + j2] -= &c;
        rhs += c.abs();
        eliminated.push(EliminatedEdge { u: Node::Bob(j), v: Node::Bob(j2), coefficient: c, new_node: Node::Alice(w) });
    }
    let already_bipartite = eliminated.is_empty();
    Ok(TrielimOutcome {
        inequality: LinearInequality::new(Space::Correlation { m, n }, a, rhs)?,
        already_bipartite,
        eliminated,
    })
}
