//! Node and edge indexing for `K_{m,n}`, its suspension `∇K_{m,n}`, and
//! two-coloured complete graphs.
//!
//! Edge order is fixed once here and every other module relies on it:
//!
//! * `K_{m,n}`: `A_iB_j` row-major, `i` outer.
//! * `∇K_{m,n}`: `XA_1..XA_m`, then `XB_1..XB_n`, then the edges of `K_{m,n}`.
//!   Dropping the first `m+n` coordinates is therefore the projection onto
//!   the correlation coordinates.
//! * `K_N` with nodes coloured `A_1..A_s, B_1..B_t`: all pairs in
//!   lexicographic order of node position.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A node label. Indices are zero-based; `Display` prints the one-based
/// names `X`, `A1`, `B3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Root,
    Alice(usize),
    Bob(usize),
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Root => write!(f, "X"),
            Node::Alice(i) => write!(f, "A{}", i + 1),
            Node::Bob(j) => write!(f, "B{}", j + 1),
        }
    }
}

impl FromStr for Node {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "X" {
            return Ok(Node::Root);
        }
        let bad = || Error::Parse(format!("bad node label {s:?} (expected X, A<k> or B<k>)"));
        let (side, rest) = s.split_at(s.chars().next().map_or(0, char::len_utf8));
        let k: usize = rest.parse().map_err(|_| bad())?;
        if k == 0 {
            return Err(bad());
        }
        match side {
            "A" => Ok(Node::Alice(k - 1)),
            "B" => Ok(Node::Bob(k - 1)),
            _ => Err(bad()),
        }
    }
}

pub type Edge = (Node, Node);

/// Operations shared by every supported graph.
pub trait GraphShape {
    fn nodes(&self) -> Vec<Node>;
    fn edge_count(&self) -> usize;
    /// Inverse of [`GraphShape::edge_index`]. Panics when out of range.
    fn edge(&self, index: usize) -> Edge;
    /// Position of the edge `uv` (either orientation) in the edge order.
    fn edge_index(&self, u: Node, v: Node) -> Result<usize>;
    /// Position of a node in [`GraphShape::nodes`].
    fn node_position(&self, v: Node) -> Option<usize>;

    fn node_count(&self) -> usize {
        self.nodes().len()
    }

    fn edges(&self) -> Vec<Edge> {
        (0..self.edge_count()).map(|k| self.edge(k)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BipartiteShape {
    pub m: usize,
    pub n: usize,
}

impl BipartiteShape {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidShape(format!("K{m},{n}: both sides need at least one node")));
        }
        Ok(BipartiteShape { m, n })
    }

    pub fn suspension(self) -> SuspensionShape {
        SuspensionShape { base: self }
    }

    /// Index of `A_iB_j`, skipping the `Result` for callers that already
    /// hold valid indices.
    pub fn cross_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.m && j < self.n);
        i * self.n + j
    }

    fn non_edge(&self, u: Node, v: Node) -> Error {
        Error::NonEdge(u, v, self.to_string())
    }
}

impl fmt::Display for BipartiteShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "K{},{}", self.m, self.n)
    }
}

impl GraphShape for BipartiteShape {
    fn nodes(&self) -> Vec<Node> {
        (0..self.m).map(Node::Alice).chain((0..self.n).map(Node::Bob)).collect()
    }

    fn edge_count(&self) -> usize {
        self.m * self.n
    }

    fn edge(&self, index: usize) -> Edge {
        assert!(index < self.edge_count(), "edge index {index} out of range for {self}");
        (Node::Alice(index / self.n), Node::Bob(index % self.n))
    }

    fn edge_index(&self, u: Node, v: Node) -> Result<usize> {
        match (u, v) {
            (Node::Alice(i), Node::Bob(j)) | (Node::Bob(j), Node::Alice(i)) if i < self.m && j < self.n => {
                Ok(self.cross_index(i, j))
            }
            _ => Err(self.non_edge(u, v)),
        }
    }

    fn node_position(&self, v: Node) -> Option<usize> {
        match v {
            Node::Alice(i) if i < self.m => Some(i),
            Node::Bob(j) if j < self.n => Some(self.m + j),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SuspensionShape {
    pub base: BipartiteShape,
}

impl SuspensionShape {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        Ok(BipartiteShape::new(m, n)?.suspension())
    }

    pub fn m(&self) -> usize {
        self.base.m
    }

    pub fn n(&self) -> usize {
        self.base.n
    }

    /// Number of root edges, i.e. the offset of the first `A_iB_j` edge.
    pub fn root_edge_count(&self) -> usize {
        self.base.m + self.base.n
    }
}

impl fmt::Display for SuspensionShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SK{},{}", self.base.m, self.base.n)
    }
}

impl GraphShape for SuspensionShape {
    fn nodes(&self) -> Vec<Node> {
        std::iter::once(Node::Root).chain(self.base.nodes()).collect()
    }

    fn edge_count(&self) -> usize {
        self.root_edge_count() + self.base.edge_count()
    }

    fn edge(&self, index: usize) -> Edge {
        let (m, n) = (self.base.m, self.base.n);
        assert!(index < self.edge_count(), "edge index {index} out of range for {self}");
        if index < m {
            (Node::Root, Node::Alice(index))
        } else if index < m + n {
            (Node::Root, Node::Bob(index - m))
        } else {
            self.base.edge(index - m - n)
        }
    }

    fn edge_index(&self, u: Node, v: Node) -> Result<usize> {
        let (m, n) = (self.base.m, self.base.n);
        let non_edge = || Error::NonEdge(u, v, self.to_string());
        match (u, v) {
            (Node::Root, Node::Alice(i)) | (Node::Alice(i), Node::Root) if i < m => Ok(i),
            (Node::Root, Node::Bob(j)) | (Node::Bob(j), Node::Root) if j < n => Ok(m + j),
            _ => self.base.edge_index(u, v).map(|k| k + m + n).map_err(|_| non_edge()),
        }
    }

    fn node_position(&self, v: Node) -> Option<usize> {
        match v {
            Node::Root => Some(0),
            _ => self.base.node_position(v).map(|p| p + 1),
        }
    }
}

/// The complete graph on `alice + bob` nodes, coloured into an A side and a
/// B side. Used for inequalities of `Cut(K_N)` that are later converted to
/// bipartite ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CompleteShape {
    pub alice: usize,
    pub bob: usize,
}

impl CompleteShape {
    pub fn new(alice: usize, bob: usize) -> Result<Self> {
        if alice + bob < 2 {
            return Err(Error::InvalidShape(format!("complete graph on {} node(s) has no edges", alice + bob)));
        }
        Ok(CompleteShape { alice, bob })
    }

    pub fn order(&self) -> usize {
        self.alice + self.bob
    }

    /// Node at a position in `A_1..A_s, B_1..B_t` order.
    pub fn node_at(&self, pos: usize) -> Node {
        if pos < self.alice {
            Node::Alice(pos)
        } else {
            Node::Bob(pos - self.alice)
        }
    }

    /// Index of the pair at node positions `p < q`.
    pub fn pair_index(&self, p: usize, q: usize) -> usize {
        let n = self.order();
        debug_assert!(p < q && q < n);
        p * (2 * n - p - 1) / 2 + (q - p - 1)
    }
}

impl fmt::Display for CompleteShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bob == 0 {
            write!(f, "K{}", self.alice)
        } else {
            write!(f, "K{}+{}", self.alice, self.bob)
        }
    }
}

impl GraphShape for CompleteShape {
    fn nodes(&self) -> Vec<Node> {
        (0..self.order()).map(|p| self.node_at(p)).collect()
    }

    fn edge_count(&self) -> usize {
        let n = self.order();
        n * (n - 1) / 2
    }

    fn edge(&self, index: usize) -> Edge {
        assert!(index < self.edge_count(), "edge index {index} out of range for {self}");
        let n = self.order();
        let mut rest = index;
        for p in 0..n {
            let row = n - 1 - p;
            if rest < row {
                return (self.node_at(p), self.node_at(p + 1 + rest));
            }
            rest -= row;
        }
        unreachable!()
    }

    fn edge_index(&self, u: Node, v: Node) -> Result<usize> {
        let non_edge = || Error::NonEdge(u, v, self.to_string());
        let p = self.node_position(u).ok_or_else(non_edge)?;
        let q = self.node_position(v).ok_or_else(non_edge)?;
        match p.cmp(&q) {
            std::cmp::Ordering::Less => Ok(self.pair_index(p, q)),
            std::cmp::Ordering::Greater => Ok(self.pair_index(q, p)),
            std::cmp::Ordering::Equal => Err(non_edge()),
        }
    }

    fn node_position(&self, v: Node) -> Option<usize> {
        match v {
            Node::Alice(i) if i < self.alice => Some(i),
            Node::Bob(j) if j < self.bob => Some(self.alice + j),
            _ => None,
        }
    }
}

/// Any supported graph, for code paths that pick the shape at run time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Shape {
    Bipartite(BipartiteShape),
    Suspension(SuspensionShape),
    Complete(CompleteShape),
}

impl Shape {
    fn inner(&self) -> &dyn GraphShape {
        match self {
            Shape::Bipartite(s) => s,
            Shape::Suspension(s) => s,
            Shape::Complete(s) => s,
        }
    }
}

impl GraphShape for Shape {
    fn nodes(&self) -> Vec<Node> {
        self.inner().nodes()
    }
    fn edge_count(&self) -> usize {
        self.inner().edge_count()
    }
    fn edge(&self, index: usize) -> Edge {
        self.inner().edge(index)
    }
    fn edge_index(&self, u: Node, v: Node) -> Result<usize> {
        self.inner().edge_index(u, v)
    }
    fn node_position(&self, v: Node) -> Option<usize> {
        self.inner().node_position(v)
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Bipartite(s) => s.fmt(f),
            Shape::Suspension(s) => s.fmt(f),
            Shape::Complete(s) => s.fmt(f),
        }
    }
}

impl From<BipartiteShape> for Shape {
    fn from(s: BipartiteShape) -> Self {
        Shape::Bipartite(s)
    }
}

impl From<SuspensionShape> for Shape {
    fn from(s: SuspensionShape) -> Self {
        Shape::Suspension(s)
    }
}

impl From<CompleteShape> for Shape {
    fn from(s: CompleteShape) -> Self {
        Shape::Complete(s)
    }
}

/// Parses `K4,4`, `SK3,3` (also `NK3,3` or `∇K3,3`), `K5`, and `K3+2`.
impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || Error::Parse(format!("bad graph {t:?} (expected K<m>,<n>, SK<m>,<n>, K<N> or K<s>+<t>)"));
        let (suspended, rest) = if let Some(r) = t.strip_prefix("SK").or_else(|| t.strip_prefix("NK")) {
            (true, r)
        } else if let Some(r) = t.strip_prefix("∇K") {
            (true, r)
        } else if let Some(r) = t.strip_prefix('K') {
            (false, r)
        } else {
            return Err(bad());
        };
        let num = |x: &str| x.trim().parse::<usize>().map_err(|_| bad());
        if let Some((a, b)) = rest.split_once(',') {
            let base = BipartiteShape::new(num(a)?, num(b)?)?;
            return Ok(if suspended { base.suspension().into() } else { base.into() });
        }
        if suspended {
            return Err(bad());
        }
        if let Some((a, b)) = rest.split_once('+') {
            return Ok(CompleteShape::new(num(a)?, num(b)?)?.into());
        }
        Ok(CompleteShape::new(num(rest)?, 0)?.into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_indices() {
        let k22 = BipartiteShape::new(2, 2).unwrap();
        assert_eq!(k22.edge_index(Node::Alice(0), Node::Bob(0)).unwrap(), 0);
        let s22 = k22.suspension();
        assert_eq!(s22.edge_index(Node::Root, Node::Bob(0)).unwrap(), 2);
        let err = k22.edge_index(Node::Alice(0), Node::Alice(1)).unwrap_err();
        assert!(err.to_string().contains("non-edge"), "{err}");
    }

    #[test]
    fn round_trips() {
        let shapes: Vec<Shape> = vec![
            BipartiteShape::new(3, 4).unwrap().into(),
            SuspensionShape::new(2, 5).unwrap().into(),
            CompleteShape::new(3, 2).unwrap().into(),
            CompleteShape::new(6, 0).unwrap().into(),
        ];
        for shape in shapes {
            for k in 0..shape.edge_count() {
                let (u, v) = shape.edge(k);
                assert_eq!(shape.edge_index(u, v).unwrap(), k);
                assert_eq!(shape.edge_index(v, u).unwrap(), k);
            }
        }
    }

    #[test]
    fn complete_order_is_lexicographic() {
        let k5 = CompleteShape::new(3, 2).unwrap();
        let e: Vec<String> = k5.edges().iter().map(|(u, v)| format!("{u}{v}")).collect();
        assert_eq!(e, ["A1A2", "A1A3", "A1B1", "A1B2", "A2A3", "A2B1", "A2B2", "A3B1", "A3B2", "B1B2"]);
    }

    #[test]
    fn parses_shapes() {
        assert_eq!("K4,4".parse::<Shape>().unwrap(), Shape::Bipartite(BipartiteShape { m: 4, n: 4 }));
        assert_eq!("∇K3,3".parse::<Shape>().unwrap(), "SK3,3".parse::<Shape>().unwrap());
        assert_eq!("K5".parse::<Shape>().unwrap(), Shape::Complete(CompleteShape { alice: 5, bob: 0 }));
        assert_eq!("K3+2".parse::<Shape>().unwrap().to_string(), "K3+2");
        assert!("K0,2".parse::<Shape>().is_err());
        assert!("Q3".parse::<Shape>().is_err());
        assert_eq!("B12".parse::<Node>().unwrap(), Node::Bob(11));
    }
}
