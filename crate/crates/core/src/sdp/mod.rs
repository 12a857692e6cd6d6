//! Semidefinite optimization over elliptopes.
//!
//! `E(G)` is the set of edge values `x_uv = ⟨u, v⟩` of unit vectors, i.e.
//! the projection onto the edges of `{H ⪰ 0, diag(H) = 1}`. Everything here
//! works in `f64`; results are checked against the stated tolerances
//! before they are returned.

pub mod ipm;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graphs::{BipartiteShape, GraphShape, Node, Shape, SuspensionShape};
use crate::inequalities::{LinearInequality, Space};
use crate::mappings::{CorrelationVector, GramRealization, SuspensionVector};
use crate::polyhedra::{cut_vectors, hull_membership, rmet_hrep, MembershipCertificate, RMET_SIGNS};
use crate::scalar::{rational_to_f64, rational_with_denominator, Rational};

use ipm::{Constraint, Problem};
pub use ipm::{ConvergenceReport, SolverOptions};

/// Largest graph (in nodes) accepted by the solvers.
pub const MAX_SDP_NODES: usize = 64;

/// Margin below which a point is reported as lying on the boundary.
pub const BOUNDARY_BAND: f64 = 1e-8;

/// RMet slack below which a constraint counts as active.
pub const ACTIVE_TOL: f64 = 1e-6;

/// Denominator used to turn arcsin images into exact rationals.
pub const CUT_CONDITION_DENOMINATOR: i64 = 1_000_000_000_000;

/// Tolerance of the cut-condition membership test.
pub const CUT_CONDITION_TOL: f64 = 1e-9;

/// Options for membership problems, where the margin itself is the answer
/// and needs more digits than an optimal value does.
pub fn precise_options() -> SolverOptions {
    SolverOptions { gap_tol: 1e-10, ..SolverOptions::default() }
}

/// `Σ w_e x_e + offset` over the edges of a graph.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeWeightedObjective {
    pub shape: Shape,
    pub weights: Vec<f64>,
    pub offset: f64,
}

impl EdgeWeightedObjective {
    pub fn new(shape: Shape, weights: Vec<f64>, offset: f64) -> Result<Self> {
        if weights.len() != shape.edge_count() {
            return Err(Error::DimensionMismatch { expected: shape.edge_count(), actual: weights.len() });
        }
        if weights.iter().chain([&offset]).any(|w| !w.is_finite()) {
            return Err(Error::Invalid("objective weights must be finite".into()));
        }
        Ok(EdgeWeightedObjective { shape, weights, offset })
    }

    /// The left-hand side of an inequality. COR inequalities are moved to
    /// suspension coordinates first; the constant that appears is folded
    /// into the right-hand side there, so the offset stays zero.
    pub fn from_inequality(ineq: &LinearInequality) -> Result<Self> {
        let ineq = match ineq.space {
            Space::Cor { .. } => ineq.cor_to_suspension()?,
            _ => ineq.clone(),
        };
        let shape = ineq.space.graph()?;
        EdgeWeightedObjective::new(shape, ineq.a.iter().map(rational_to_f64).collect(), 0.0)
    }

    pub fn value(&self, edge_values: &[f64]) -> f64 {
        self.weights.iter().zip(edge_values).map(|(w, x)| w * x).sum::<f64>() + self.offset
    }

    /// The same weights on `∇K_{m,n}` with zero root weights.
    pub fn suspended(&self) -> Result<Self> {
        match self.shape {
            Shape::Suspension(_) => Ok(self.clone()),
            Shape::Bipartite(b) => {
                let s = b.suspension();
                let mut w = vec![0.0; s.root_edge_count()];
                w.extend_from_slice(&self.weights);
                EdgeWeightedObjective::new(s.into(), w, self.offset)
            }
            Shape::Complete(_) => {
                Err(Error::InvalidShape("RMet constraints need a bipartite or suspension graph".into()))
            }
        }
    }
}

/// A rooted triangle inequality of `RMet` that holds with (near) equality.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ActiveConstraint {
    pub alice: usize,
    pub bob: usize,
    /// `(s_a, s_b)` in `s_a x_XA + s_b x_XB + s_a s_b x_AB ≥ −1`.
    pub signs: (i64, i64),
    pub slack: f64,
}

impl ActiveConstraint {
    pub fn describe(&self) -> String {
        let sgn = |s: i64| if s > 0 { '+' } else { '-' };
        let (a, b) = self.signs;
        format!(
            "{}xXA{} {}xXB{} {}xA{}B{} >= -1",
            sgn(a),
            self.alice + 1,
            sgn(b),
            self.bob + 1,
            sgn(a * b),
            self.alice + 1,
            self.bob + 1
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualCertificate {
    /// Dual slack matrix `Z ⪰ 0`.
    pub z: DMatrix<f64>,
    /// One multiplier per equality constraint: unit diagonals first, then
    /// the RMet rows when present.
    pub multipliers: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdpSolution {
    /// Objective at the returned Gram matrix.
    pub value: f64,
    /// Upper bound from the dual iterate.
    pub dual_bound: f64,
    pub gram: DMatrix<f64>,
    pub realization: GramRealization,
    pub dual: DualCertificate,
    pub report: ConvergenceReport,
    pub active_constraints: Vec<ActiveConstraint>,
}

fn matrix_json(h: &DMatrix<f64>) -> Value {
    Value::Array((0..h.nrows()).map(|r| json!((0..h.ncols()).map(|c| h[(r, c)]).collect::<Vec<_>>())).collect())
}

impl SdpSolution {
    pub fn to_json(&self) -> Value {
        let nodes = self.realization.shape.nodes();
        json!({
            "value": self.value,
            "dual_bound": self.dual_bound,
            "matrix": matrix_json(&self.gram),
            "nodes": nodes.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            "realization": self.realization.vectors,
            "active_constraints": self.active_constraints.iter().map(|a| json!({
                "edge": format!("A{}B{}", a.alice + 1, a.bob + 1),
                "signs": [a.signs.0, a.signs.1],
                "constraint": a.describe(),
                "slack": a.slack,
            })).collect::<Vec<_>>(),
            "iterations": self.report.iterations,
            "report": self.report,
        })
    }

    /// Checks the stated invariants of an optimizer: symmetric, unit
    /// diagonal within 1e-8, smallest eigenvalue at least −1e-8.
    pub fn check(&self) -> Result<()> {
        check_gram(&self.gram)
    }
}

fn check_gram(h: &DMatrix<f64>) -> Result<()> {
    if h != &h.transpose() {
        return Err(Error::Numerical("Gram matrix is not symmetric".into()));
    }
    if let Some(d) = h.diagonal().iter().find(|d| (*d - 1.0).abs() > 1e-8) {
        return Err(Error::Numerical(format!("Gram diagonal entry {d} is not 1")));
    }
    let lmin = if h.is_empty() { 0.0 } else { SymmetricEigen::new(h.clone()).eigenvalues.min() };
    if lmin < -1e-8 {
        return Err(Error::Numerical(format!("Gram matrix has eigenvalue {lmin}")));
    }
    Ok(())
}

fn guard(shape: &Shape) -> Result<()> {
    let k = shape.node_count();
    if k > MAX_SDP_NODES {
        return Err(Error::TooLarge(format!("{shape} has {k} nodes; the SDP solvers accept at most {MAX_SDP_NODES}")));
    }
    Ok(())
}

fn edge_positions(shape: &Shape) -> Vec<(usize, usize)> {
    shape
        .edges()
        .iter()
        .map(|&(u, v)| {
            let (p, q) = (shape.node_position(u).unwrap(), shape.node_position(v).unwrap());
            (p.min(q), p.max(q))
        })
        .collect()
}

/// Minimization data for `max Σ w_e H_e`: `C = −W/2` symmetrized.
fn objective_matrix(obj: &EdgeWeightedObjective) -> DMatrix<f64> {
    let k = obj.shape.node_count();
    let mut c = DMatrix::zeros(k, k);
    for (&(p, q), w) in edge_positions(&obj.shape).iter().zip(&obj.weights) {
        c[(p, q)] -= w / 2.0;
        c[(q, p)] -= w / 2.0;
    }
    c
}

fn unit_diagonal(k: usize) -> Vec<Constraint> {
    (0..k).map(|i| Constraint { psd: vec![(i, i, 1.0)], lp: vec![], rhs: 1.0 }).collect()
}

fn finish(
    obj: &EdgeWeightedObjective,
    it: ipm::Iterate,
    active_constraints: Vec<ActiveConstraint>,
) -> Result<SdpSolution> {
    let gram = it.x.clone();
    let values: Vec<f64> = edge_positions(&obj.shape).iter().map(|&(p, q)| gram[(p, q)]).collect();
    let sol = SdpSolution {
        value: obj.value(&values),
        dual_bound: -it.report.dual_objective + obj.offset,
        realization: GramRealization::from_gram(obj.shape, &gram)?,
        gram,
        dual: DualCertificate { z: it.z, multipliers: it.y.iter().copied().collect() },
        report: it.report,
        active_constraints,
    };
    sol.check()?;
    Ok(sol)
}

/// Maximizes `Σ w_e H_e` over `{H ⪰ 0, diag(H) = 1}`.
pub fn elliptope_max(obj: &EdgeWeightedObjective, opts: &SolverOptions) -> Result<SdpSolution> {
    guard(&obj.shape)?;
    let k = obj.shape.node_count();
    let problem = Problem {
        psd_dim: k,
        lp_dim: 0,
        c_psd: objective_matrix(obj),
        c_lp: DVector::zeros(0),
        constraints: unit_diagonal(k),
    };
    let it = problem.solve(opts)?;
    finish(obj, it, Vec::new())
}

/// Maximizes over `E(∇K_{m,n}) ∩ RMet(∇K_{m,n})`. Bipartite objectives are
/// first suspended with zero root weights. Each of the `4mn` rooted
/// triangle inequalities gets a nonnegative slack.
pub fn elliptope_rmet_max(obj: &EdgeWeightedObjective, opts: &SolverOptions) -> Result<SdpSolution> {
    let obj = obj.suspended()?;
    guard(&obj.shape)?;
    let Shape::Suspension(s) = obj.shape else { unreachable!() };
    let k = obj.shape.node_count();
    let rows = rmet_rows(s);
    let mut constraints = unit_diagonal(k);
    for (slack, &(i, j, (sa, sb))) in rows.iter().enumerate() {
        let (a, b) = (1 + i, 1 + s.m() + j);
        constraints.push(Constraint {
            psd: vec![(0, a, sa as f64 / 2.0), (0, b, sb as f64 / 2.0), (a, b, (sa * sb) as f64 / 2.0)],
            lp: vec![(slack, -1.0)],
            rhs: -1.0,
        });
    }
    let problem = Problem {
        psd_dim: k,
        lp_dim: rows.len(),
        c_psd: objective_matrix(&obj),
        c_lp: DVector::zeros(rows.len()),
        constraints,
    };
    let it = problem.solve(opts)?;
    let x = &it.x;
    let active = rows
        .iter()
        .map(|&(i, j, (sa, sb))| {
            let (a, b) = (1 + i, 1 + s.m() + j);
            let slack = 1.0 + sa as f64 * x[(0, a)] + sb as f64 * x[(0, b)] + (sa * sb) as f64 * x[(a, b)];
            ActiveConstraint { alice: i, bob: j, signs: (sa, sb), slack }
        })
        .filter(|a| a.slack < ACTIVE_TOL)
        .collect();
    finish(&obj, it, active)
}

fn rmet_rows(s: SuspensionShape) -> Vec<(usize, usize, (i64, i64))> {
    let mut rows = Vec::with_capacity(4 * s.base.edge_count());
    for i in 0..s.m() {
        for j in 0..s.n() {
            for signs in RMET_SIGNS {
                rows.push((i, j, signs));
            }
        }
    }
    rows
}

#[derive(Clone, Debug, PartialEq)]
pub enum MembershipWitness {
    /// A completion `H ⪰ 0` with unit diagonal matching the edge values.
    Completion(DMatrix<f64>),
    /// `Z ⪰ 0` of trace 1 supported on the diagonal and the edges. The
    /// functional `Σ_i Z_ii + 2 Σ_e Z_e ξ_e` is nonnegative on `E(G)` and
    /// equals the margin at the tested point.
    Separator(DMatrix<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ElliptopeMembership {
    pub member: bool,
    /// Set when `|t*| ≤ 1e-8`; the verdict then rests on the tolerance.
    pub boundary: bool,
    /// `t* = max { t : H ⪰ tI }` over completions `H`.
    pub margin: f64,
    pub witness: MembershipWitness,
    pub report: ConvergenceReport,
}

impl ElliptopeMembership {
    pub fn to_json(&self) -> Value {
        let (kind, m) = match &self.witness {
            MembershipWitness::Completion(h) => ("completion", h),
            MembershipWitness::Separator(z) => ("separator", z),
        };
        json!({
            "member": self.member,
            "boundary": self.boundary,
            "margin": self.margin,
            "witness": {"kind": kind, "matrix": matrix_json(m)},
            "iterations": self.report.iterations,
        })
    }
}

/// Decides `x ∈ E(G)` by solving `max t` subject to `H − tI ⪰ 0`,
/// `diag(H) = 1`, `H_e = x_e` on the edges, entries off the edges free.
///
/// With `X = H − tI` the problem becomes `min X_00` subject to equal
/// diagonal entries and the edge values, and `t* = 1 − X_00`.
pub fn elliptope_membership(shape: &Shape, x: &[f64], opts: &SolverOptions) -> Result<ElliptopeMembership> {
    guard(shape)?;
    if x.len() != shape.edge_count() {
        return Err(Error::DimensionMismatch { expected: shape.edge_count(), actual: x.len() });
    }
    if let Some(v) = x.iter().find(|v| !(v.abs() <= 1.0 + 1e-12)) {
        return Err(Error::Invalid(format!("edge value {v} is outside [-1, 1]")));
    }
    let k = shape.node_count();
    let mut constraints: Vec<Constraint> =
        (1..k).map(|i| Constraint { psd: vec![(i, i, 1.0), (0, 0, -1.0)], lp: vec![], rhs: 0.0 }).collect();
    for (&(p, q), &v) in edge_positions(shape).iter().zip(x) {
        constraints.push(Constraint { psd: vec![(p, q, 0.5)], lp: vec![], rhs: v });
    }
    let mut c = DMatrix::zeros(k, k);
    if k > 0 {
        c[(0, 0)] = 1.0;
    }
    let problem = Problem { psd_dim: k, lp_dim: 0, c_psd: c, c_lp: DVector::zeros(0), constraints };
    let (it, converged) = problem.best_iterate(opts)?;
    let r = &it.report;
    // A primal iterate gives a lower bound on t*, a dual one an upper bound.
    let (lower, upper) = (1.0 - r.primal_objective, 1.0 - r.dual_objective);
    let margin = if converged {
        1.0 - it.x.get((0, 0)).copied().unwrap_or(0.0)
    } else {
        let feasible = r.primal_infeasibility.max(r.dual_infeasibility) <= 10.0 * opts.feas_tol;
        match (feasible, lower >= -BOUNDARY_BAND, upper < -BOUNDARY_BAND) {
            (true, true, _) => lower,
            (true, _, true) => upper,
            _ => {
                return Err(Error::NonConvergence {
                    iterations: r.iterations,
                    primal: r.primal_objective,
                    dual: r.dual_objective,
                })
            }
        }
    };
    let member = margin >= -BOUNDARY_BAND;
    let witness = if member {
        let mut h = it.x.clone() + DMatrix::identity(k, k) * margin;
        for i in 0..k {
            h[(i, i)] = 1.0;
        }
        MembershipWitness::Completion(h)
    } else {
        let tr = it.z.trace();
        MembershipWitness::Separator(&it.z / tr)
    };
    Ok(ElliptopeMembership { member, boundary: margin.abs() <= BOUNDARY_BAND, margin, witness, report: it.report })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CutCondition {
    pub passes: bool,
    /// `y_e = (2/π) arcsin x_e`.
    pub y: CorrelationVector<f64>,
    /// `y` rounded to the denominator used for the exact test.
    pub y_exact: Vec<Rational>,
    pub certificate: MembershipCertificate,
}

impl CutCondition {
    pub fn to_json(&self) -> Value {
        json!({
            "passes": self.passes,
            "y": self.y.x,
            "y_exact": self.y_exact.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
            "certificate": self.certificate.to_json(),
        })
    }
}

/// Tests whether `(2/π) arcsin x′` lies in `Cut(K_{m,n})`, a necessary
/// condition for `x′ ∈ E(K_{m,n})` that is also sufficient when
/// `min{m, n} ≤ 2`.
///
/// The image is rounded to rationals with denominator 10¹² and tested
/// exactly. A separator violated by at most 1e-9 (relative to its
/// coefficient norm) still counts as passing, since the rounding itself
/// moves the point by up to 5e-13 per coordinate.
pub fn cut_condition(x: &CorrelationVector<f64>) -> Result<CutCondition> {
    if let Some(v) = x.x.iter().find(|v| !(v.abs() <= 1.0)) {
        return Err(Error::Invalid(format!("correlation {v} is outside [-1, 1]")));
    }
    let y: Vec<f64> = x.x.iter().map(|v| std::f64::consts::FRAC_2_PI * v.asin()).collect();
    let y_exact: Vec<Rational> = y.iter().map(|&v| rational_with_denominator(v, CUT_CONDITION_DENOMINATOR)).collect();
    let cuts = cut_vectors(&x.shape.into())?;
    let certificate = hull_membership(&y_exact, &cuts)?;
    let passes = match &certificate {
        MembershipCertificate::Inside { .. } => true,
        MembershipCertificate::Outside { separator, violation } => {
            let norm = separator.a.iter().map(|c| rational_to_f64(c).powi(2)).sum::<f64>().sqrt();
            rational_to_f64(violation) <= CUT_CONDITION_TOL * norm
        }
    };
    Ok(CutCondition { passes, y: CorrelationVector::new(x.shape, y)?, y_exact, certificate })
}

/// Where a suspension point sits relative to the sets compared in the
/// open question about `RMet(∇K) ∖ E(∇K)`.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct GapProbe {
    pub in_rmet: bool,
    /// Margin of `x` in `E(∇K_{m,n})`.
    pub suspension_margin: f64,
    /// Margin of `π(x)` in `E(K_{m,n})`.
    pub projection_margin: f64,
}

impl GapProbe {
    /// `x ∈ RMet ∖ E(∇K)` while `π(x) ∈ E(K)`.
    pub fn is_candidate(&self) -> bool {
        self.in_rmet && self.suspension_margin < -BOUNDARY_BAND && self.projection_margin >= -BOUNDARY_BAND
    }
}

pub fn gap_probe(x: &SuspensionVector<f64>, opts: &SolverOptions) -> Result<GapProbe> {
    let rmet = rmet_hrep(x.shape);
    let in_rmet = rmet.inequalities.iter().all(|h| {
        let lhs: f64 = h.a.iter().zip(&x.x).map(|(a, v)| rational_to_f64(a) * v).sum();
        lhs <= rational_to_f64(&h.b) + 1e-12
    });
    let full = elliptope_membership(&x.shape.into(), &x.x, opts)?;
    let base: BipartiteShape = x.shape.base;
    let proj = elliptope_membership(&base.into(), &x.x[x.shape.root_edge_count()..], opts)?;
    Ok(GapProbe { in_rmet, suspension_margin: full.margin, projection_margin: proj.margin })
}

/// Evaluates an edge-weighted objective at a realization, for reporting.
pub fn realized_value(obj: &EdgeWeightedObjective, g: &GramRealization) -> Result<f64> {
    if g.shape != obj.shape {
        return Err(Error::InvalidShape(format!("realization of {} for an objective on {}", g.shape, obj.shape)));
    }
    Ok(obj.value(&g.edge_values()))
}

/// Node whose vector occupies row `k` of an SDP matrix.
pub fn node_of_row(shape: &Shape, k: usize) -> Option<Node> {
    shape.nodes().get(k).copied()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inequalities::catalog;

    fn chsh() -> EdgeWeightedObjective {
        EdgeWeightedObjective::from_inequality(&catalog("chsh").unwrap()).unwrap()
    }

    #[test]
    fn chsh_reaches_tsirelson() {
        let sol = elliptope_max(&chsh(), &SolverOptions::default()).unwrap();
        assert!((sol.value - 2.0 * 2f64.sqrt()).abs() < 1e-6, "{}", sol.value);
        assert!(sol.dual_bound >= sol.value - 1e-6);
        let realized = realized_value(&chsh(), &sol.realization).unwrap();
        assert!((realized - sol.value).abs() < 1e-6);
    }

    #[test]
    fn single_edge() {
        let obj = EdgeWeightedObjective::new(BipartiteShape::new(1, 1).unwrap().into(), vec![1.0], 0.0).unwrap();
        let sol = elliptope_max(&obj, &SolverOptions::default()).unwrap();
        assert!((sol.value - 1.0).abs() < 1e-6);
    }

    #[test]
    fn zero_objective_keeps_identity() {
        let obj = EdgeWeightedObjective::new(SuspensionShape::new(2, 2).unwrap().into(), vec![0.0; 8], 0.0).unwrap();
        let sol = elliptope_rmet_max(&obj, &SolverOptions::default()).unwrap();
        assert!(sol.value.abs() < 1e-9);
        assert!((&sol.gram - DMatrix::identity(5, 5)).amax() < 1e-6);
    }

    #[test]
    fn rmet_leaves_chsh_alone() {
        let sol = elliptope_rmet_max(&chsh(), &SolverOptions::default()).unwrap();
        assert!((sol.value - 2.0 * 2f64.sqrt()).abs() < 1e-6, "{}", sol.value);
        assert!(sol.active_constraints.is_empty());
    }

    #[test]
    fn membership_margins() {
        let k33: Shape = BipartiteShape::new(3, 3).unwrap().into();
        let m = elliptope_membership(&k33, &[0.0; 9], &precise_options()).unwrap();
        assert!(m.member && (m.margin - 1.0).abs() < 1e-6);

        let k22: Shape = BipartiteShape::new(2, 2).unwrap().into();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let m = elliptope_membership(&k22, &[r, r, r, -r], &precise_options()).unwrap();
        assert!(m.member && m.boundary, "{}", m.margin);

        let m = elliptope_membership(&k22, &[0.9, 0.9, 0.9, -0.9], &precise_options()).unwrap();
        assert!(!m.member);
        let MembershipWitness::Separator(z) = &m.witness else { panic!() };
        // Evaluate the separating functional at the point.
        let x = [0.9, 0.9, 0.9, -0.9];
        let f: f64 =
            z.trace() + edge_positions(&k22).iter().zip(x).map(|(&(p, q), v)| 2.0 * z[(p, q)] * v).sum::<f64>();
        assert!(f < 0.0 && (f - m.margin).abs() < 1e-6, "{f} vs {}", m.margin);
    }

    #[test]
    fn cut_condition_examples() {
        let k22 = BipartiteShape::new(2, 2).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let c = cut_condition(&CorrelationVector::new(k22, vec![r, r, r, -r]).unwrap()).unwrap();
        assert!(c.passes);
        assert_eq!(
            c.y_exact,
            vec![
                crate::scalar::ratio(1, 2),
                crate::scalar::ratio(1, 2),
                crate::scalar::ratio(1, 2),
                crate::scalar::ratio(-1, 2)
            ]
        );
        let c = cut_condition(&CorrelationVector::new(k22, vec![0.9, 0.9, 0.9, -0.9]).unwrap()).unwrap();
        assert!(!c.passes);
        assert!(cut_condition(&CorrelationVector::new(k22, vec![1.5, 0.0, 0.0, 0.0]).unwrap()).is_err());
    }
}
