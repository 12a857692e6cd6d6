//! Exact convex-hull membership with certificates.
//!
//! With `c` the centroid of the vertices, the LP
//!
//! ```text
//! max t   s.t.  Σ λ_j v_j − t (p − c) = c,  Σ λ_j = 1,  t + σ = 1,  λ, t, σ ≥ 0
//! ```
//!
//! finds how far along the segment from `c` to `p` the polytope reaches.
//! At `t* = 1` the multipliers `λ` write `p` as a convex combination. For
//! `t* < 1` the optimal duals give an inequality valid on every vertex and
//! tight where the segment leaves the polytope, so it separates `p`.

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use super::linalg::dot;
use super::simplex::{minimize, LpOutcome};
use super::{Halfspace, VRep};
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// Vertex limit for the membership LP.
pub const MAX_MEMBERSHIP_VERTICES: usize = 5000;

#[derive(Clone, Debug, PartialEq)]
pub enum MembershipCertificate {
    /// Nonzero convex weights as `(vertex index, weight)`.
    Inside { weights: Vec<(usize, Rational)> },
    /// Valid for every vertex, violated by the query point.
    Outside { separator: Halfspace, violation: Rational },
}

impl MembershipCertificate {
    pub fn is_inside(&self) -> bool {
        matches!(self, MembershipCertificate::Inside { .. })
    }

    /// Re-checks the certificate against the data it was issued for.
    pub fn verify(&self, point: &[Rational], vrep: &VRep) -> bool {
        match self {
            MembershipCertificate::Inside { weights } => {
                let mut sum = vec![Rational::zero(); vrep.dim];
                let mut total = Rational::zero();
                for (k, w) in weights {
                    if w.is_negative() || *k >= vrep.len() {
                        return false;
                    }
                    total += w;
                    for (s, x) in sum.iter_mut().zip(&vrep.points[*k]) {
                        *s += w * x;
                    }
                }
                total.is_one() && sum == point
            }
            MembershipCertificate::Outside { separator, violation } => {
                vrep.points.iter().all(|v| separator.lhs(v) <= separator.b)
                    && separator.lhs(point) - &separator.b == *violation
                    && violation.is_positive()
            }
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            MembershipCertificate::Inside { weights } => json!({
                "inside": true,
                "weights": weights.iter().map(|(k, w)| json!({"vertex": k, "weight": w.to_json()})).collect::<Vec<_>>(),
            }),
            MembershipCertificate::Outside { separator, violation } => json!({
                "inside": false,
                "separator": {
                    "a": separator.a.iter().map(Scalar::to_json).collect::<Vec<_>>(),
                    "rhs": separator.b.to_json(),
                },
                "violation": violation.to_json(),
            }),
        }
    }
}

/// Decides whether `point` lies in the convex hull of `vrep`. The returned
/// certificate has been verified exactly.
pub fn hull_membership(point: &[Rational], vrep: &VRep) -> Result<MembershipCertificate> {
    let d = vrep.dim;
    if point.len() != d {
        return Err(Error::DimensionMismatch { expected: d, actual: point.len() });
    }
    let n = vrep.len();
    if n == 0 {
        return Err(Error::Invalid("empty vertex list".into()));
    }
    if n > MAX_MEMBERSHIP_VERTICES {
        return Err(Error::TooLarge(format!("{n} vertices; hull membership is limited to {MAX_MEMBERSHIP_VERTICES}")));
    }
    let c = vrep.centroid();
    if point == c.as_slice() {
        let w = Rational::one() / Rational::from_integer(n.into());
        let cert = MembershipCertificate::Inside { weights: (0..n).map(|k| (k, w.clone())).collect() };
        debug_assert!(cert.verify(point, vrep));
        return Ok(cert);
    }

    // Columns: λ_0..λ_{n-1}, t, σ. Rows: d coordinates, Σλ = 1, t + σ = 1.
    let cols = n + 2;
    let mut a = vec![vec![Rational::zero(); cols]; d + 2];
    for (j, v) in vrep.points.iter().enumerate() {
        for k in 0..d {
            a[k][j] = v[k].clone();
        }
        a[d][j] = Rational::one();
    }
    for k in 0..d {
        a[k][n] = &c[k] - &point[k];
    }
    a[d + 1][n] = Rational::one();
    a[d + 1][n + 1] = Rational::one();
    let mut b = c.clone();
    b.push(Rational::one());
    b.push(Rational::one());
    let mut cost = vec![Rational::zero(); cols];
    cost[n] = -Rational::one();

    let sol = match minimize(&a, &b, &cost) {
        LpOutcome::Optimal(sol) => sol,
        other => return Err(Error::Numerical(format!("membership LP ended as {other:?}"))),
    };
    let t = &sol.x[n];
    let cert = if t.is_one() {
        MembershipCertificate::Inside {
            weights: sol.x[..n].iter().enumerate().filter(|(_, w)| !w.is_zero()).map(|(k, w)| (k, w.clone())).collect(),
        }
    } else {
        // Dual feasibility gives g·v_j + h ≤ 0, i.e. g·x ≤ −h on the hull.
        let g = sol.y[..d].to_vec();
        let h = sol.y[d].clone();
        let separator = Halfspace::new(g, -h).normalized();
        let violation = separator.lhs(point) - &separator.b;
        MembershipCertificate::Outside { separator, violation }
    };
    if !cert.verify(point, vrep) {
        return Err(Error::Numerical("membership certificate failed verification".into()));
    }
    Ok(cert)
}

/// Largest `a·v` over the vertices minus `a·point`; handy for reporting
/// how deep a point sits.
pub fn support_gap(a: &[Rational], point: &[Rational], vrep: &VRep) -> Option<Rational> {
    vrep.points.iter().map(|v| dot(a, v)).max().map(|m| m - dot(a, point))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::BipartiteShape;
    use crate::polyhedra::cut_vectors;
    use crate::scalar::{rat, ratio};

    fn k22() -> VRep {
        cut_vectors(&BipartiteShape::new(2, 2).unwrap().into()).unwrap()
    }

    #[test]
    fn centroid_has_uniform_weights() {
        let v = k22();
        let cert = hull_membership(&v.centroid(), &v).unwrap();
        let MembershipCertificate::Inside { weights } = cert else { panic!() };
        assert_eq!(weights.len(), 8);
        assert!(weights.iter().all(|(_, w)| *w == ratio(1, 8)));
    }

    #[test]
    fn strong_correlation_is_separated_by_chsh() {
        let v = k22();
        let p = vec![ratio(4, 5), ratio(4, 5), ratio(4, 5), ratio(-4, 5)];
        let MembershipCertificate::Outside { separator, violation } = hull_membership(&p, &v).unwrap() else {
            panic!()
        };
        assert_eq!(separator, Halfspace::from_ints(&[1, 1, 1, -1], 2));
        assert_eq!(violation, ratio(6, 5));
    }

    #[test]
    fn boundary_point_is_inside() {
        let v = k22();
        let p = vec![ratio(1, 2), ratio(1, 2), ratio(1, 2), ratio(-1, 2)];
        assert!(hull_membership(&p, &v).unwrap().is_inside());
        let vertex = v.points[3].clone();
        assert!(hull_membership(&vertex, &v).unwrap().is_inside());
        assert!(!hull_membership(&[rat(2), rat(0), rat(0), rat(0)], &v).unwrap().is_inside());
    }
}
