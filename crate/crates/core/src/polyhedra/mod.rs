//! Exact polyhedral computation: generators for cut and correlation
//! polytopes, their relaxations, facet checks, hull membership and the
//! double description method.

pub mod dd;
pub mod linalg;
pub mod membership;
pub mod simplex;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::graphs::{BipartiteShape, GraphShape, Shape, SuspensionShape};
use crate::scalar::{int_to_rational, parse_rational, primitive_integer_vector, rat, Rational};

pub use dd::{dd_h_to_v, dd_v_to_h, DdOptions};
pub use membership::{hull_membership, MembershipCertificate};

/// Largest node count for which cut vectors are enumerated.
pub const MAX_ENUMERATION_NODES: usize = 24;

/// `a·x ≤ b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Halfspace {
    pub a: Vec<Rational>,
    pub b: Rational,
}

impl Halfspace {
    pub fn new(a: Vec<Rational>, b: Rational) -> Self {
        Halfspace { a, b }
    }

    pub fn from_ints(a: &[i64], b: i64) -> Self {
        Halfspace { a: a.iter().map(|&v| rat(v)).collect(), b: rat(b) }
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn lhs(&self, x: &[Rational]) -> Rational {
        linalg::dot(&self.a, x)
    }

    pub fn slack(&self, x: &[Rational]) -> Rational {
        &self.b - self.lhs(x)
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(Zero::is_zero)
    }

    /// Scales by a positive factor to coprime integer coefficients and
    /// right-hand side. The direction of the inequality is kept.
    pub fn normalized(&self) -> Halfspace {
        let mut all = self.a.clone();
        all.push(self.b.clone());
        let ints = primitive_integer_vector(&all);
        let (b, a) = ints.split_last().unwrap();
        Halfspace { a: a.iter().map(int_to_rational).collect(), b: int_to_rational(b) }
    }
}

impl fmt::Display for Halfspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.a {
            write!(f, "{v} ")?;
        }
        write!(f, "<= {}", self.b)
    }
}

/// `a·x = b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearEquation {
    pub a: Vec<Rational>,
    pub b: Rational,
}

impl LinearEquation {
    /// Coprime integers with positive leading nonzero coefficient.
    pub fn normalized(&self) -> LinearEquation {
        let mut all = self.a.clone();
        all.push(self.b.clone());
        let mut ints = primitive_integer_vector(&all);
        if ints.iter().find(|v| !v.is_zero()).is_some_and(|v| v.is_negative()) {
            ints.iter_mut().for_each(|v| *v = -v.clone());
        }
        let (b, a) = ints.split_last().unwrap();
        LinearEquation { a: a.iter().map(int_to_rational).collect(), b: int_to_rational(b) }
    }
}

impl fmt::Display for LinearEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.a {
            write!(f, "{v} ")?;
        }
        write!(f, "= {}", self.b)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VRep {
    pub dim: usize,
    pub points: Vec<Vec<Rational>>,
}

impl VRep {
    /// Checks dimensions and removes duplicates, keeping first occurrences.
    pub fn new(dim: usize, points: Vec<Vec<Rational>>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::with_capacity(points.len());
        for p in points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, actual: p.len() });
            }
            if seen.insert(p.clone()) {
                out.push(p);
            }
        }
        Ok(VRep { dim, points: out })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn centroid(&self) -> Vec<Rational> {
        let n = rat(self.points.len() as i64);
        (0..self.dim).map(|k| self.points.iter().fold(Rational::zero(), |acc, p| acc + &p[k]) / &n).collect()
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("V {} {}\n", self.dim, self.points.len());
        for p in &self.points {
            let line: Vec<String> = p.iter().map(ToString::to_string).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HRep {
    pub dim: usize,
    pub inequalities: Vec<Halfspace>,
    pub equations: Vec<LinearEquation>,
}

impl HRep {
    pub fn new(dim: usize, inequalities: Vec<Halfspace>, equations: Vec<LinearEquation>) -> Result<Self> {
        for h in &inequalities {
            if h.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, actual: h.dim() });
            }
            if h.is_zero() {
                return Err(Error::Invalid(format!("zero-coefficient inequality 0 <= {}", h.b)));
            }
        }
        for e in &equations {
            if e.a.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, actual: e.a.len() });
            }
        }
        Ok(HRep { dim, inequalities, equations })
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.inequalities.iter().all(|h| !h.slack(x).is_negative())
            && self.equations.iter().all(|e| linalg::dot(&e.a, x) == e.b)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("H {} {}\n", self.dim, self.inequalities.len() + self.equations.len());
        for h in &self.inequalities {
            s.push_str(&h.to_string());
            s.push('\n');
        }
        for e in &self.equations {
            s.push_str(&e.to_string());
            s.push('\n');
        }
        s
    }
}

/// A parsed text file: either representation.
#[derive(Clone, Debug, PartialEq)]
pub enum Representation {
    V(VRep),
    H(HRep),
}

/// Reads the line format `V <dim> <count>` / `H <dim> <count>` followed by
/// one point or one constraint (`a_1 .. a_d <= a0`, `>=` or `=`) per line.
/// Blank lines and lines starting with `#` are ignored.
pub fn parse_representation(text: &str) -> Result<Representation> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| Error::Parse("empty representation".into()))?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!("bad header {header:?}")));
    }
    let num = |s: &str| s.parse::<usize>().map_err(|_| Error::Parse(format!("bad header {header:?}")));
    let (dim, count) = (num(parts[1])?, num(parts[2])?);
    let body: Vec<&str> = lines.collect();
    if body.len() != count {
        return Err(Error::Parse(format!("header announces {count} rows, found {}", body.len())));
    }
    let row = |s: &str| -> Result<Vec<Rational>> {
        let v: Vec<Rational> = s.split_whitespace().map(parse_rational).collect::<Result<_>>()?;
        if v.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, actual: v.len() });
        }
        Ok(v)
    };
    match parts[0] {
        "V" => Ok(Representation::V(VRep::new(dim, body.iter().map(|l| row(l)).collect::<Result<_>>()?)?)),
        "H" => {
            let mut ineqs = Vec::new();
            let mut eqs = Vec::new();
            for l in body {
                let (lhs, op, rhs) = if let Some((a, b)) = l.split_once("<=") {
                    (a, "<=", b)
                } else if let Some((a, b)) = l.split_once(">=") {
                    (a, ">=", b)
                } else if let Some((a, b)) = l.split_once('=') {
                    (a, "=", b)
                } else {
                    return Err(Error::Parse(format!("constraint without <=, >= or =: {l:?}")));
                };
                let a = row(lhs)?;
                let b = parse_rational(rhs)?;
                match op {
                    "<=" => ineqs.push(Halfspace::new(a, b)),
                    ">=" => ineqs.push(Halfspace::new(a.into_iter().map(|v| -v).collect(), -b)),
                    _ => eqs.push(LinearEquation { a, b }),
                }
            }
            Ok(Representation::H(HRep::new(dim, ineqs, eqs)?))
        }
        other => Err(Error::Parse(format!("unknown representation kind {other:?}"))),
    }
}

/// Cut vectors `x_uv = c_u c_v` of a graph. The first node is fixed to +1;
/// the others follow binary counting with the second node as the most
/// significant bit (bit 0 means +1).
pub fn cut_vectors(shape: &Shape) -> Result<VRep> {
    let nodes = shape.node_count();
    if nodes > MAX_ENUMERATION_NODES {
        return Err(Error::TooLarge(format!(
            "{shape} has {nodes} nodes; cut vectors are enumerated for at most {MAX_ENUMERATION_NODES}"
        )));
    }
    let edges: Vec<(usize, usize)> = shape
        .edges()
        .iter()
        .map(|&(u, v)| (shape.node_position(u).unwrap(), shape.node_position(v).unwrap()))
        .collect();
    let free = nodes - 1;
    let points = (0..1usize << free)
        .map(|k| {
            let sign = |pos: usize| -> i64 {
                if pos == 0 || (k >> (free - pos)) & 1 == 0 {
                    1
                } else {
                    -1
                }
            };
            edges.iter().map(|&(p, q)| rat(sign(p) * sign(q))).collect()
        })
        .collect();
    Ok(VRep { dim: edges.len(), points })
}

/// The `2^{m+n}` deterministic points of the correlation polytope in COR
/// coordinates (`p_u = 1` when node `u` outputs −1).
pub fn cor_vertices(shape: BipartiteShape) -> Result<VRep> {
    let nodes = shape.m + shape.n;
    if nodes > MAX_ENUMERATION_NODES {
        return Err(Error::TooLarge(format!("{shape} has {nodes} nodes; limit is {MAX_ENUMERATION_NODES}")));
    }
    let points = (0..1usize << nodes)
        .map(|k| {
            let bit = |pos: usize| ((k >> (nodes - 1 - pos)) & 1) as i64;
            let mut p: Vec<Rational> = (0..nodes).map(|pos| rat(bit(pos))).collect();
            for i in 0..shape.m {
                for j in 0..shape.n {
                    p.push(rat(bit(i) * bit(shape.m + j)));
                }
            }
            p
        })
        .collect();
    Ok(VRep { dim: crate::mappings::cor_dim(shape), points })
}

/// `RCMet(K_{m,n})` in COR coordinates, four inequalities per edge:
/// `−p_uv ≤ 0`, `p_uv − p_u ≤ 0`, `p_uv − p_v ≤ 0`, `p_u + p_v − p_uv ≤ 1`.
pub fn rcmet_hrep(shape: BipartiteShape) -> HRep {
    let dim = crate::mappings::cor_dim(shape);
    let mut out = Vec::with_capacity(4 * shape.edge_count());
    for i in 0..shape.m {
        for j in 0..shape.n {
            let (u, v, e) = (i, shape.m + j, shape.m + shape.n + shape.cross_index(i, j));
            let mk = |terms: &[(usize, i64)], b: i64| {
                let mut a = vec![Rational::zero(); dim];
                for &(k, c) in terms {
                    a[k] = rat(c);
                }
                Halfspace::new(a, rat(b))
            };
            out.push(mk(&[(e, -1)], 0));
            out.push(mk(&[(u, -1), (e, 1)], 0));
            out.push(mk(&[(v, -1), (e, 1)], 0));
            out.push(mk(&[(u, 1), (v, 1), (e, -1)], 1));
        }
    }
    HRep { dim, inequalities: out, equations: Vec::new() }
}

/// Sign patterns `(s_a, s_b)` of the four rooted triangle inequalities
/// `s_a x_XA + s_b x_XB + s_a s_b x_AB ≥ −1`.
pub const RMET_SIGNS: [(i64, i64); 4] = [(1, 1), (-1, -1), (1, -1), (-1, 1)];

/// `RMet(∇K_{m,n})`: for each edge `A_iB_j` and each sign pattern,
/// `−(s_a x_XA_i + s_b x_XB_j + s_a s_b x_A_iB_j) ≤ 1`.
pub fn rmet_hrep(shape: SuspensionShape) -> HRep {
    let dim = shape.edge_count();
    let base = shape.base;
    let mut out = Vec::with_capacity(4 * base.edge_count());
    for i in 0..base.m {
        for j in 0..base.n {
            for (sa, sb) in RMET_SIGNS {
                let mut a = vec![Rational::zero(); dim];
                a[i] = rat(-sa);
                a[base.m + j] = rat(-sb);
                a[shape.root_edge_count() + base.cross_index(i, j)] = rat(-sa * sb);
                out.push(Halfspace::new(a, rat(1)));
            }
        }
    }
    HRep { dim, inequalities: out, equations: Vec::new() }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct FacetReport {
    pub valid: bool,
    /// Maximum of the left-hand side over the vertices.
    #[serde(serialize_with = "ser_rational")]
    pub tight_value: Rational,
    pub root_count: usize,
    /// Dimension of the affine hull of the roots; −1 when there are none.
    pub affine_rank: i64,
    pub is_facet: bool,
}

fn ser_rational<S: serde::Serializer>(v: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Validity and facet test of `h` for the polytope spanned by `vrep`,
/// which is assumed full-dimensional.
pub fn facet_check(h: &Halfspace, vrep: &VRep) -> Result<FacetReport> {
    if h.dim() != vrep.dim {
        return Err(Error::DimensionMismatch { expected: vrep.dim, actual: h.dim() });
    }
    if vrep.is_empty() {
        return Err(Error::Invalid("empty vertex list".into()));
    }
    let values: Vec<Rational> = vrep.points.iter().map(|p| h.lhs(p)).collect();
    let tight_value = values.iter().max().unwrap().clone();
    let valid = tight_value <= h.b;
    let roots: Vec<&Vec<Rational>> =
        vrep.points.iter().zip(&values).filter(|(_, v)| **v == h.b).map(|(p, _)| p).collect();
    let affine_rank = affine_rank(&roots);
    Ok(FacetReport {
        valid,
        tight_value,
        root_count: roots.len(),
        affine_rank,
        is_facet: valid && affine_rank == vrep.dim as i64 - 1,
    })
}

/// Dimension of the affine hull of a point set, −1 for the empty set.
pub fn affine_rank(points: &[&Vec<Rational>]) -> i64 {
    let Some((first, rest)) = points.split_first() else {
        return -1;
    };
    let diffs: Vec<Vec<Rational>> =
        rest.iter().map(|p| p.iter().zip(first.iter()).map(|(a, b)| a - b).collect()).collect();
    linalg::rank(&diffs) as i64
}

/// Maximum of `a·x` over the points, with the maximizing point.
pub fn max_over(a: &[Rational], vrep: &VRep) -> Option<(Rational, Vec<Rational>)> {
    vrep.points.iter().map(|p| (linalg::dot(a, p), p)).max_by(|x, y| x.0.cmp(&y.0)).map(|(v, p)| (v, p.clone()))
}

pub(crate) fn bigints_to_rationals(v: &[BigInt]) -> Vec<Rational> {
    v.iter().map(int_to_rational).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::CompleteShape;

    fn k(m: usize, n: usize) -> Shape {
        BipartiteShape::new(m, n).unwrap().into()
    }

    #[test]
    fn cut_vector_counts() {
        assert_eq!(cut_vectors(&k(1, 1)).unwrap().points, vec![vec![rat(1)], vec![rat(-1)]]);
        assert_eq!(cut_vectors(&k(2, 2)).unwrap().len(), 8);
        let s = cut_vectors(&SuspensionShape::new(2, 2).unwrap().into()).unwrap();
        assert_eq!((s.dim, s.len()), (8, 16));
        assert_eq!(cut_vectors(&SuspensionShape::new(3, 3).unwrap().into()).unwrap().len(), 64);
        let big: Shape = BipartiteShape::new(13, 12).unwrap().into();
        assert!(matches!(cut_vectors(&big), Err(Error::TooLarge(_))));
    }

    #[test]
    fn cor_vertex_counts() {
        assert_eq!(cor_vertices(BipartiteShape::new(1, 1).unwrap()).unwrap().len(), 4);
        let v = cor_vertices(BipartiteShape::new(2, 2).unwrap()).unwrap();
        assert_eq!(v.len(), 16);
        assert!(v.points.iter().flatten().all(|c| *c == rat(0) || *c == rat(1)));
    }

    #[test]
    fn relaxation_sizes() {
        let r = rmet_hrep(SuspensionShape::new(1, 1).unwrap());
        assert_eq!((r.dim, r.inequalities.len()), (3, 4));
        let c = rcmet_hrep(BipartiteShape::new(2, 2).unwrap());
        assert_eq!((c.dim, c.inequalities.len()), (8, 16));
        let zero = vec![rat(0); 8];
        let r22 = rmet_hrep(SuspensionShape::new(2, 2).unwrap());
        assert!(r22.inequalities.iter().all(|h| h.slack(&zero) > rat(0)));
    }

    #[test]
    fn chsh_is_a_facet_and_loose_bound_is_not() {
        let v = cut_vectors(&k(2, 2)).unwrap();
        let chsh = Halfspace::from_ints(&[1, 1, 1, -1], 2);
        let r = facet_check(&chsh, &v).unwrap();
        assert!(r.valid && r.is_facet);
        assert_eq!(r.tight_value, rat(2));
        let loose = Halfspace::from_ints(&[1, 0, 0, 0], 2);
        let r = facet_check(&loose, &v).unwrap();
        assert!(r.valid && !r.is_facet);
        assert_eq!((r.root_count, r.affine_rank), (0, -1));
    }

    #[test]
    fn triangle_is_a_facet_of_k3() {
        let v = cut_vectors(&CompleteShape::new(3, 0).unwrap().into()).unwrap();
        let r = facet_check(&Halfspace::from_ints(&[-1, -1, -1], 1), &v).unwrap();
        assert!(r.is_facet);
    }

    #[test]
    fn normalization_keeps_direction() {
        let h = Halfspace::new(vec![crate::scalar::ratio(-1, 2), rat(0), rat(3)], rat(2));
        assert_eq!(h.normalized(), Halfspace::from_ints(&[-1, 0, 6], 4));
        let e = LinearEquation { a: vec![rat(-2), rat(4)], b: rat(6) };
        assert_eq!(e.normalized(), LinearEquation { a: vec![rat(1), rat(-2)], b: rat(-3) });
    }

    #[test]
    fn text_round_trip() {
        let v = cut_vectors(&k(1, 2)).unwrap();
        assert_eq!(parse_representation(&v.to_text()).unwrap(), Representation::V(v));
        let h = rcmet_hrep(BipartiteShape::new(1, 1).unwrap());
        assert_eq!(parse_representation(&h.to_text()).unwrap(), Representation::H(h));
        assert!(parse_representation("V 2 1\n1 2 3\n").is_err());
        assert!(parse_representation("H 1 1\n1 2\n").is_err());
    }
}
