//! Coordinate systems for two-party experiments and the affine maps between
//! them.
//!
//! * [`BehaviorVector`]: probabilities `q_{ab|ij}`, `4mn` entries.
//! * [`CorVector`]: `p_{A_i}`, `p_{B_j}`, `p_{A_iB_j}` (probabilities of the
//!   outcome −1), `mn+m+n` entries.
//! * [`SuspensionVector`]: expectations `⟨A_i⟩`, `⟨B_j⟩`, `⟨A_iB_j⟩` on the
//!   edges of `∇K_{m,n}`.
//! * [`CorrelationVector`]: the `mn` correlation functions `⟨A_iB_j⟩`.
//!
//! The maps work over any [`Scalar`]; use [`Rational`](crate::Rational) for
//! exact identities and `f64` for Gram-vector work.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graphs::{BipartiteShape, GraphShape, Node, Shape, SuspensionShape};
use crate::scalar::Scalar;

/// Outcome labels in storage order.
pub const OUTCOMES: [i8; 2] = [-1, 1];

/// Offset of `q_{ab|ij}` inside a behavior vector: blocks of four per
/// setting pair `(i, j)` in row-major order, outcomes ordered
/// `−−, −+, +−, ++`.
pub fn behavior_index(shape: BipartiteShape, i: usize, j: usize, a: i8, b: i8) -> usize {
    4 * shape.cross_index(i, j) + 2 * usize::from(a > 0) + usize::from(b > 0)
}

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BehaviorVector<T> {
    pub shape: BipartiteShape,
    pub q: Vec<T>,
}

impl<T: Scalar> BehaviorVector<T> {
    pub fn new(shape: BipartiteShape, q: Vec<T>) -> Result<Self> {
        check_len(4 * shape.edge_count(), q.len())?;
        Ok(BehaviorVector { shape, q })
    }

    pub fn get(&self, i: usize, j: usize, a: i8, b: i8) -> &T {
        &self.q[behavior_index(self.shape, i, j, a, b)]
    }

    /// `q^A_{a|i}` computed from the table for partner setting `j`.
    pub fn alice_marginal(&self, i: usize, j: usize, a: i8) -> T {
        self.get(i, j, a, -1).clone() + self.get(i, j, a, 1).clone()
    }

    /// `q^B_{b|j}` computed from the table for partner setting `i`.
    pub fn bob_marginal(&self, i: usize, j: usize, b: i8) -> T {
        self.get(i, j, -1, b).clone() + self.get(i, j, 1, b).clone()
    }

    /// Checks normalization of every block, then that Alice's marginals do
    /// not depend on Bob's setting and vice versa.
    pub fn check_no_signaling(&self) -> Result<()> {
        let (m, n) = (self.shape.m, self.shape.n);
        for i in 0..m {
            for j in 0..n {
                let total = OUTCOMES
                    .iter()
                    .flat_map(|&a| OUTCOMES.iter().map(move |&b| (a, b)))
                    .fold(T::zero(), |acc, (a, b)| acc + self.get(i, j, a, b).clone());
                if !total.near(&T::one()) {
                    return Err(Error::NoSignaling(format!(
                        "block (A{}, B{}) sums to {:?}, not 1",
                        i + 1,
                        j + 1,
                        total
                    )));
                }
            }
        }
        for i in 0..m {
            let first = self.alice_marginal(i, 0, -1);
            for j in 1..n {
                if !self.alice_marginal(i, j, -1).near(&first) {
                    return Err(Error::NoSignaling(format!(
                        "Alice's marginal for A{} differs between B1 and B{} (i={}, j=1, j'={})",
                        i + 1,
                        j + 1,
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        for j in 0..n {
            let first = self.bob_marginal(0, j, -1);
            for i in 1..m {
                if !self.bob_marginal(i, j, -1).near(&first) {
                    return Err(Error::NoSignaling(format!(
                        "Bob's marginal for B{} differs between A1 and A{} (i=1, i'={}, j={})",
                        j + 1,
                        i + 1,
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// Nonnegativity plus [`BehaviorVector::check_no_signaling`].
    pub fn validate(&self) -> Result<()> {
        if let Some(k) = self.q.iter().position(|v| !v.is_nonneg()) {
            let (i, j) = ((k / 4) / self.shape.n, (k / 4) % self.shape.n);
            let a = OUTCOMES[(k % 4) / 2];
            let b = OUTCOMES[k % 2];
            return Err(Error::Invalid(format!(
                "negative probability q({a:+},{b:+}|A{},B{}) = {:?}",
                i + 1,
                j + 1,
                self.q[k]
            )));
        }
        self.check_no_signaling()
    }

    pub fn is_behavior(&self) -> bool {
        self.validate().is_ok()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorVector<T> {
    pub shape: BipartiteShape,
    /// `p_{A_1..A_m}`, `p_{B_1..B_n}`, then edges row-major.
    pub coords: Vec<T>,
}

impl<T: Scalar> CorVector<T> {
    pub fn new(shape: BipartiteShape, coords: Vec<T>) -> Result<Self> {
        check_len(cor_dim(shape), coords.len())?;
        Ok(CorVector { shape, coords })
    }

    pub fn from_parts(shape: BipartiteShape, alice: Vec<T>, bob: Vec<T>, edges: Vec<T>) -> Result<Self> {
        check_len(shape.m, alice.len())?;
        check_len(shape.n, bob.len())?;
        check_len(shape.edge_count(), edges.len())?;
        Ok(CorVector { shape, coords: alice.into_iter().chain(bob).chain(edges).collect() })
    }

    pub fn alice(&self, i: usize) -> &T {
        &self.coords[i]
    }

    pub fn bob(&self, j: usize) -> &T {
        &self.coords[self.shape.m + j]
    }

    pub fn edge(&self, i: usize, j: usize) -> &T {
        &self.coords[self.shape.m + self.shape.n + self.shape.cross_index(i, j)]
    }
}

pub fn cor_dim(shape: BipartiteShape) -> usize {
    shape.m + shape.n + shape.edge_count()
}

/// Coordinate `k` of a COR vector as a node (`None` for edges) or an edge.
pub fn cor_coordinate_label(shape: BipartiteShape, k: usize) -> String {
    if k < shape.m {
        format!("p{}", Node::Alice(k))
    } else if k < shape.m + shape.n {
        format!("p{}", Node::Bob(k - shape.m))
    } else {
        let (u, v) = shape.edge(k - shape.m - shape.n);
        format!("p{u}{v}")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuspensionVector<T> {
    pub shape: SuspensionShape,
    pub x: Vec<T>,
}

impl<T: Scalar> SuspensionVector<T> {
    pub fn new(shape: SuspensionShape, x: Vec<T>) -> Result<Self> {
        check_len(shape.edge_count(), x.len())?;
        Ok(SuspensionVector { shape, x })
    }

    pub fn root_alice(&self, i: usize) -> &T {
        &self.x[i]
    }

    pub fn root_bob(&self, j: usize) -> &T {
        &self.x[self.shape.m() + j]
    }

    pub fn edge(&self, i: usize, j: usize) -> &T {
        &self.x[self.shape.root_edge_count() + self.shape.base.cross_index(i, j)]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationVector<T> {
    pub shape: BipartiteShape,
    pub x: Vec<T>,
}

impl<T: Scalar> CorrelationVector<T> {
    pub fn new(shape: BipartiteShape, x: Vec<T>) -> Result<Self> {
        check_len(shape.edge_count(), x.len())?;
        Ok(CorrelationVector { shape, x })
    }

    pub fn edge(&self, i: usize, j: usize) -> &T {
        &self.x[self.shape.cross_index(i, j)]
    }
}

pub fn iota<T: Scalar>(p: &CorVector<T>) -> BehaviorVector<T> {
    let shape = p.shape;
    let mut q = vec![T::zero(); 4 * shape.edge_count()];
    for i in 0..shape.m {
        for j in 0..shape.n {
            let (pa, pb, pab) = (p.alice(i).clone(), p.bob(j).clone(), p.edge(i, j).clone());
            q[behavior_index(shape, i, j, -1, -1)] = pab.clone();
            q[behavior_index(shape, i, j, -1, 1)] = pa.clone() - pab.clone();
            q[behavior_index(shape, i, j, 1, -1)] = pb.clone() - pab.clone();
            q[behavior_index(shape, i, j, 1, 1)] = T::one() - pa - pb + pab;
        }
    }
    BehaviorVector { shape, q }
}

/// Inverse of [`iota`] on its image. Fails when `q` is not normalized or
/// signals.
pub fn iota_inv<T: Scalar>(q: &BehaviorVector<T>) -> Result<CorVector<T>> {
    q.check_no_signaling()?;
    let shape = q.shape;
    let alice = (0..shape.m).map(|i| q.alice_marginal(i, 0, -1)).collect();
    let bob = (0..shape.n).map(|j| q.bob_marginal(0, j, -1)).collect();
    let edges = (0..shape.edge_count()).map(|k| q.q[4 * k].clone()).collect();
    CorVector::from_parts(shape, alice, bob, edges)
}

pub fn covariance<T: Scalar>(p: &CorVector<T>) -> SuspensionVector<T> {
    let shape = p.shape;
    let two = T::from_i64(2);
    let four = T::from_i64(4);
    let mut x = Vec::with_capacity(shape.suspension().edge_count());
    x.extend((0..shape.m).map(|i| T::one() - two.clone() * p.alice(i).clone()));
    x.extend((0..shape.n).map(|j| T::one() - two.clone() * p.bob(j).clone()));
    for i in 0..shape.m {
        for j in 0..shape.n {
            x.push(
                T::one() - two.clone() * p.alice(i).clone() - two.clone() * p.bob(j).clone()
                    + four.clone() * p.edge(i, j).clone(),
            );
        }
    }
    SuspensionVector { shape: shape.suspension(), x }
}

pub fn covariance_inv<T: Scalar>(x: &SuspensionVector<T>) -> CorVector<T> {
    let shape = x.shape.base;
    let half = T::half();
    let quarter = T::from_ratio(1, 4);
    let alice: Vec<T> = (0..shape.m).map(|i| half.clone() * (T::one() - x.root_alice(i).clone())).collect();
    let bob: Vec<T> = (0..shape.n).map(|j| half.clone() * (T::one() - x.root_bob(j).clone())).collect();
    let mut edges = Vec::with_capacity(shape.edge_count());
    for i in 0..shape.m {
        for j in 0..shape.n {
            // 4 p_AB = x_AB - 1 + 2 p_A + 2 p_B
            edges.push(
                quarter.clone() * (x.edge(i, j).clone() - T::one())
                    + half.clone() * (alice[i].clone() + bob[j].clone()),
            );
        }
    }
    CorVector { shape, coords: alice.into_iter().chain(bob).chain(edges).collect() }
}

/// Drops the `m+n` root coordinates.
pub fn project_correlations<T: Scalar>(x: &SuspensionVector<T>) -> CorrelationVector<T> {
    CorrelationVector { shape: x.shape.base, x: x.x[x.shape.root_edge_count()..].to_vec() }
}

/// Embeds correlations into suspension coordinates with all root
/// coordinates set to zero.
pub fn zero_root_lift<T: Scalar>(x: &CorrelationVector<T>) -> SuspensionVector<T> {
    let shape = x.shape.suspension();
    let mut v = vec![T::zero(); shape.root_edge_count()];
    v.extend(x.x.iter().cloned());
    SuspensionVector { shape, x: v }
}

/// Moves every marginal to 1/2 while keeping the correlation functions.
pub fn center_marginals<T: Scalar>(p: &CorVector<T>) -> CorVector<T> {
    let shape = p.shape;
    let half = T::half();
    let mut coords = vec![half.clone(); shape.m + shape.n];
    for i in 0..shape.m {
        for j in 0..shape.n {
            coords.push(
                p.edge(i, j).clone() - half.clone() * p.alice(i).clone() - half.clone() * p.bob(j).clone()
                    + half.clone(),
            );
        }
    }
    CorVector { shape, coords }
}

/// Unit-norm tolerance for Gram realizations.
pub const GRAM_TOL: f64 = 1e-9;

/// Unit vectors realizing the edge values of a graph as inner products.
/// `vectors[k]` belongs to node `shape.nodes()[k]`; for a suspension the
/// root vector `w` comes first.
#[derive(Clone, Debug, PartialEq)]
pub struct GramRealization {
    pub shape: Shape,
    pub vectors: Vec<Vec<f64>>,
}

impl GramRealization {
    pub fn new(shape: Shape, vectors: Vec<Vec<f64>>) -> Result<Self> {
        check_len(shape.node_count(), vectors.len())?;
        let dim = vectors.first().map_or(0, Vec::len);
        for (node, v) in shape.nodes().iter().zip(&vectors) {
            check_len(dim, v.len())?;
            let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > GRAM_TOL {
                return Err(Error::Numerical(format!("vector for {node} has norm {norm}, not 1")));
            }
        }
        Ok(GramRealization { shape, vectors })
    }

    pub fn ambient_dim(&self) -> usize {
        self.vectors.first().map_or(0, Vec::len)
    }

    pub fn vector(&self, node: Node) -> Option<&[f64]> {
        self.shape.node_position(node).map(|p| self.vectors[p].as_slice())
    }

    pub fn gram_matrix(&self) -> DMatrix<f64> {
        let k = self.vectors.len();
        DMatrix::from_fn(k, k, |r, c| dot(&self.vectors[r], &self.vectors[c]))
    }

    /// Inner products along the edges, in edge order.
    pub fn edge_values(&self) -> Vec<f64> {
        self.shape.edges().iter().map(|&(u, v)| dot(self.vector(u).unwrap(), self.vector(v).unwrap())).collect()
    }

    /// Unit vectors whose Gram matrix is `h`, obtained from its
    /// eigendecomposition. Eigenvalues below zero are clamped; every vector
    /// is rescaled to unit length afterwards.
    pub fn from_gram(shape: Shape, h: &DMatrix<f64>) -> Result<Self> {
        check_len(shape.node_count(), h.nrows())?;
        let vectors = factor_psd(h)?
            .into_iter()
            .map(|mut v| {
                let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
                if norm > 0.0 {
                    v.iter_mut().for_each(|c| *c /= norm);
                }
                v
            })
            .collect();
        GramRealization::new(shape, vectors)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Rows `r_k` with `r_k · r_l = h_{kl}` (up to clamped negative
/// eigenvalues), in ambient dimension equal to the matrix order.
pub fn factor_psd(h: &DMatrix<f64>) -> Result<Vec<Vec<f64>>> {
    let k = h.nrows();
    if h.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("matrix has non-finite entries".into()));
    }
    let sym = (h + h.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let roots: DVector<f64> = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
    Ok((0..k).map(|r| (0..k).map(|c| eig.eigenvectors[(r, c)] * roots[c]).collect()).collect())
}

/// Suspension edge values realized by a Gram realization of `∇K_{m,n}`.
pub fn realized_suspension(g: &GramRealization) -> Result<SuspensionVector<f64>> {
    match g.shape {
        Shape::Suspension(s) => SuspensionVector::new(s, g.edge_values()),
        other => Err(Error::InvalidShape(format!("expected a suspension graph, got {other}"))),
    }
}

/// Builds unit vectors for `K_{2m,2n}` from a realization of `∇K_{m,n}`:
/// `u'_{a,i} = (w + a u_i)/2`, `v'_{b,j} = (w + b v_j)/2`, each padded to
/// unit length with one private coordinate per side, then refactored into
/// ambient dimension `2m+2n`.
///
/// Lifted node order: `A_{2i}` is `(a=−1, i)`, `A_{2i+1}` is `(a=+1, i)`,
/// likewise for Bob. Use [`lifted_behavior`] to read the result as `q`.
pub fn lift_to_bipartite_gram(g: &GramRealization) -> Result<GramRealization> {
    let s = match g.shape {
        Shape::Suspension(s) => s,
        other => return Err(Error::InvalidShape(format!("expected a suspension graph, got {other}"))),
    };
    let (m, n) = (s.m(), s.n());
    let d = g.ambient_dim();
    let w = g.vector(Node::Root).unwrap();
    let mut padded: Vec<Vec<f64>> = Vec::with_capacity(2 * (m + n));

    let mut push = |node: Node, sign: f64, side: usize| -> Result<()> {
        let u = g.vector(node).unwrap();
        let mut v: Vec<f64> = w.iter().zip(u).map(|(wc, uc)| 0.5 * (wc + sign * uc)).collect();
        let sq: f64 = v.iter().map(|c| c * c).sum();
        if sq > 1.0 + GRAM_TOL {
            return Err(Error::Numerical(format!(
                "lifted vector for {node} (a={sign:+}) has squared norm {sq} > 1; cannot pad"
            )));
        }
        let pad = (1.0 - sq).max(0.0).sqrt();
        v.extend([0.0, 0.0]);
        v[d + side] = pad;
        padded.push(v);
        Ok(())
    };
    for i in 0..m {
        for sign in [-1.0, 1.0] {
            push(Node::Alice(i), sign, 0)?;
        }
    }
    for j in 0..n {
        for sign in [-1.0, 1.0] {
            push(Node::Bob(j), sign, 1)?;
        }
    }
    let k = padded.len();
    let h = DMatrix::from_fn(k, k, |r, c| dot(&padded[r], &padded[c]));
    let shape = BipartiteShape::new(2 * m, 2 * n)?;
    GramRealization::from_gram(shape.into(), &h)
}

/// Reads the cross inner products of a lifted realization back as a
/// behavior vector of the original shape.
pub fn lifted_behavior(lifted: &GramRealization) -> Result<BehaviorVector<f64>> {
    let big = match lifted.shape {
        Shape::Bipartite(b) if b.m % 2 == 0 && b.n % 2 == 0 => b,
        other => return Err(Error::InvalidShape(format!("expected K(2m,2n), got {other}"))),
    };
    let shape = BipartiteShape::new(big.m / 2, big.n / 2)?;
    let mut q = vec![0.0; 4 * shape.edge_count()];
    for i in 0..shape.m {
        for j in 0..shape.n {
            for (ai, &a) in OUTCOMES.iter().enumerate() {
                for (bi, &b) in OUTCOMES.iter().enumerate() {
                    let u = lifted.vector(Node::Alice(2 * i + ai)).unwrap();
                    let v = lifted.vector(Node::Bob(2 * j + bi)).unwrap();
                    q[behavior_index(shape, i, j, a, b)] = dot(u, v);
                }
            }
        }
    }
    BehaviorVector::new(shape, q)
}

/// The behavior `q_{ab|ij} = (1 + a⟨A_i⟩ + b⟨B_j⟩ + ab⟨A_iB_j⟩)/4` of a
/// suspension point, i.e. `ι(φ⁻¹(x))`.
pub fn behavior_of_suspension<T: Scalar>(x: &SuspensionVector<T>) -> BehaviorVector<T> {
    iota(&covariance_inv(x))
}

/// Any of the four vector kinds, for serialization and the command line.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyVector<T> {
    Behavior(BehaviorVector<T>),
    Cor(CorVector<T>),
    Suspension(SuspensionVector<T>),
    Correlation(CorrelationVector<T>),
}

impl<T: Scalar> AnyVector<T> {
    pub fn kind(&self) -> &'static str {
        match self {
            AnyVector::Behavior(_) => "behavior",
            AnyVector::Cor(_) => "cor",
            AnyVector::Suspension(_) => "suspension",
            AnyVector::Correlation(_) => "correlation",
        }
    }

    pub fn base_shape(&self) -> BipartiteShape {
        match self {
            AnyVector::Behavior(v) => v.shape,
            AnyVector::Cor(v) => v.shape,
            AnyVector::Suspension(v) => v.shape.base,
            AnyVector::Correlation(v) => v.shape,
        }
    }

    pub fn coords(&self) -> &[T] {
        match self {
            AnyVector::Behavior(v) => &v.q,
            AnyVector::Cor(v) => &v.coords,
            AnyVector::Suspension(v) => &v.x,
            AnyVector::Correlation(v) => &v.x,
        }
    }

    pub fn to_json(&self) -> Value {
        let shape = self.base_shape();
        json!({
            "shape": {"m": shape.m, "n": shape.n, "suspended": matches!(self, AnyVector::Suspension(_))},
            "kind": self.kind(),
            "coords": self.coords().iter().map(Scalar::to_json).collect::<Vec<_>>(),
        })
    }

    /// Reads `{shape:{m,n,suspended}, kind?, coords}`. Without `kind`, the
    /// kind follows from `suspended` and the number of coordinates.
    pub fn from_json(v: &Value) -> Result<Self> {
        let shape_v = v.get("shape").ok_or_else(|| Error::Parse("vector is missing \"shape\"".into()))?;
        let field = |name: &str| {
            shape_v
                .get(name)
                .and_then(Value::as_u64)
                .map(|x| x as usize)
                .ok_or_else(|| Error::Parse(format!("shape is missing integer \"{name}\"")))
        };
        let shape = BipartiteShape::new(field("m")?, field("n")?)?;
        let suspended = shape_v.get("suspended").and_then(Value::as_bool).unwrap_or(false);
        let coords: Vec<T> = v
            .get("coords")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("vector is missing array \"coords\"".into()))?
            .iter()
            .map(T::from_json)
            .collect::<Result<_>>()?;
        let kind = match v.get("kind").and_then(Value::as_str) {
            Some(k) => k.to_string(),
            None if suspended => "suspension".into(),
            None => {
                let len = coords.len();
                if len == 4 * shape.edge_count() {
                    "behavior".into()
                } else if len == cor_dim(shape) {
                    "cor".into()
                } else {
                    "correlation".into()
                }
            }
        };
        Ok(match kind.as_str() {
            "behavior" => AnyVector::Behavior(BehaviorVector::new(shape, coords)?),
            "cor" => AnyVector::Cor(CorVector::new(shape, coords)?),
            "suspension" => AnyVector::Suspension(SuspensionVector::new(shape.suspension(), coords)?),
            "correlation" => AnyVector::Correlation(CorrelationVector::new(shape, coords)?),
            other => return Err(Error::Parse(format!("unknown vector kind {other:?}"))),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, ratio, Rational};

    fn k(m: usize, n: usize) -> BipartiteShape {
        BipartiteShape::new(m, n).unwrap()
    }

    #[test]
    fn iota_of_zero_is_deterministic_plus() {
        let shape = k(2, 3);
        let p = CorVector::new(shape, vec![rat(0); cor_dim(shape)]).unwrap();
        let q = iota(&p);
        for i in 0..2 {
            for j in 0..3 {
                assert_eq!(*q.get(i, j, 1, 1), rat(1));
                assert_eq!(*q.get(i, j, -1, -1), rat(0));
                assert_eq!(*q.get(i, j, -1, 1), rat(0));
                assert_eq!(*q.get(i, j, 1, -1), rat(0));
            }
        }
    }

    #[test]
    fn uniform_point() {
        let shape = k(2, 2);
        let p = CorVector::from_parts(shape, vec![ratio(1, 2); 2], vec![ratio(1, 2); 2], vec![ratio(1, 4); 4]).unwrap();
        let q = iota(&p);
        assert!(q.q.iter().all(|v| *v == ratio(1, 4)));
        assert_eq!(iota_inv(&q).unwrap(), p);
        let x = covariance(&p);
        assert!(x.x.iter().all(|v| *v == rat(0)));
        assert_eq!(covariance_inv(&x), p);
    }

    #[test]
    fn all_minus_assignment() {
        // Every observable outputs -1: roots see c_X c_u = -1, edges (-1)(-1) = 1.
        let shape = k(2, 2);
        let p = CorVector::new(shape, vec![rat(1); 8]).unwrap();
        let x = covariance(&p);
        assert!(x.x[..4].iter().all(|v| *v == rat(-1)));
        assert!(x.x[4..].iter().all(|v| *v == rat(1)));
    }

    #[test]
    fn signaling_is_reported() {
        let shape = k(1, 2);
        let mut q = vec![ratio(1, 4); 8];
        // A1's marginal with B1: q(-,-)+q(-,+) = 1/2 + 1/4; with B2 it stays 1/2.
        q[behavior_index(shape, 0, 0, -1, -1)] = ratio(1, 2);
        q[behavior_index(shape, 0, 0, 1, 1)] = rat(0);
        let err = iota_inv(&BehaviorVector::new(shape, q).unwrap()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("not in the image of iota") && msg.contains("j'=2"), "{msg}");
    }

    #[test]
    fn centering_is_idempotent_and_fixes_centered_points() {
        let shape = k(2, 2);
        let p = CorVector::new(
            shape,
            vec![ratio(1, 3), ratio(2, 5), rat(1), ratio(1, 7), ratio(1, 9), rat(0), ratio(3, 4), ratio(1, 2)],
        )
        .unwrap();
        let c = center_marginals(&p);
        assert_eq!(center_marginals(&c), c);
        let x = covariance(&p);
        let xc = covariance(&c);
        assert!(xc.x[..4].iter().all(|v| *v == rat(0)));
        assert_eq!(xc.x[4..], x.x[4..]);
    }

    #[test]
    fn lift_of_orthogonal_realization_is_uniform() {
        let shape = SuspensionShape::new(1, 1).unwrap();
        let g = GramRealization::new(shape.into(), vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]])
            .unwrap();
        let lifted = lift_to_bipartite_gram(&g).unwrap();
        assert_eq!(lifted.ambient_dim(), 4);
        let q = lifted_behavior(&lifted).unwrap();
        assert!(q.q.iter().all(|v| (v - 0.25).abs() < 1e-9), "{:?}", q.q);
    }

    #[test]
    fn lift_of_parallel_realization_is_deterministic() {
        let shape = SuspensionShape::new(2, 1).unwrap();
        let e1 = vec![1.0, 0.0, 0.0, 0.0];
        let g = GramRealization::new(shape.into(), vec![e1.clone(); 4]).unwrap();
        let lifted = lift_to_bipartite_gram(&g).unwrap();
        assert_eq!(lifted.ambient_dim(), 6);
        for v in &lifted.vectors {
            let norm: f64 = v.iter().map(|c| c * c).sum();
            assert!((norm - 1.0).abs() < 1e-9);
        }
        let q = lifted_behavior(&lifted).unwrap();
        for i in 0..2 {
            for a in OUTCOMES {
                for b in OUTCOMES {
                    let expect = f64::from((1 + a) * (1 + b)) / 4.0;
                    assert!((q.get(i, 0, a, b) - expect).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn json_round_trip_and_inference() {
        let shape = k(1, 2);
        let v: AnyVector<Rational> =
            AnyVector::Cor(CorVector::new(shape, vec![ratio(1, 2), rat(0), rat(1), ratio(-3, 4), rat(2)]).unwrap());
        let j = v.to_json();
        assert_eq!(AnyVector::from_json(&j).unwrap(), v);
        let bare = json!({"shape": {"m": 1, "n": 2, "suspended": false}, "coords": ["1/2", 0, 1, "-0.75", 2]});
        assert_eq!(AnyVector::from_json(&bare).unwrap(), v);
        let short = json!({"shape": {"m": 1, "n": 2}, "kind": "cor", "coords": [1]});
        assert!(matches!(AnyVector::<Rational>::from_json(&short), Err(Error::DimensionMismatch { .. })));
    }
}
