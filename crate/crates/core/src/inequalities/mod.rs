//! Linear inequalities over the coordinate spaces of the library, with
//! named instances, symmetry classification, zero-lifting and triangular
//! elimination.

pub mod catalog;
pub mod families;
pub mod lifting;
pub mod symmetry;

use std::fmt;

use num_traits::Zero;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graphs::{BipartiteShape, CompleteShape, GraphShape, Shape, SuspensionShape};
use crate::polyhedra::{cut_vectors, Halfspace, VRep};
use crate::scalar::{rat, ratio, Rational, Scalar};

pub use catalog::{catalog, catalog_names};
pub use families::{family_cycle, family_hypermetric, family_trivial};
pub use lifting::{triangular_eliminate, zero_lift, EliminatedEdge, TrielimOutcome};
pub use symmetry::{canonical_form, classify, Canonicalization, EquivalenceClass, SymmetryElement};

/// The coordinate space an inequality lives in. Counts are stored raw so
/// that degenerate instances with an empty side can still be represented.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Space {
    /// `x_{A_iB_j}` of `K_{m,n}`.
    Correlation { m: usize, n: usize },
    /// Edges of `∇K_{m,n}`: root edges first, then `A_iB_j`.
    Suspension { m: usize, n: usize },
    /// `p_{A_i}`, `p_{B_j}`, then `p_{A_iB_j}`.
    Cor { m: usize, n: usize },
    /// Edges of the complete graph on `A_1..A_s, B_1..B_t`.
    Complete { alice: usize, bob: usize },
}

impl Space {
    pub fn dim(&self) -> usize {
        match *self {
            Space::Correlation { m, n } => m * n,
            Space::Suspension { m, n } | Space::Cor { m, n } => m + n + m * n,
            Space::Complete { alice, bob } => {
                let k = alice + bob;
                k * k.saturating_sub(1) / 2
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Space::Correlation { .. } => "correlation",
            Space::Suspension { .. } => "suspension",
            Space::Cor { .. } => "cor",
            Space::Complete { .. } => "complete",
        }
    }

    /// `(rows, cols)` of the matrix notation.
    pub fn sides(&self) -> (usize, usize) {
        match *self {
            Space::Correlation { m, n } | Space::Suspension { m, n } | Space::Cor { m, n } => (m, n),
            Space::Complete { alice, bob } => (alice, bob),
        }
    }

    pub fn bipartite(&self) -> Result<BipartiteShape> {
        let (m, n) = self.sides();
        BipartiteShape::new(m, n)
    }

    /// The graph whose cut polytope this space describes. COR coordinates
    /// have no cut polytope of their own and are rejected.
    pub fn graph(&self) -> Result<Shape> {
        match *self {
            Space::Correlation { m, n } => Ok(BipartiteShape::new(m, n)?.into()),
            Space::Suspension { m, n } => Ok(SuspensionShape::new(m, n)?.into()),
            Space::Complete { alice, bob } => Ok(CompleteShape::new(alice, bob)?.into()),
            Space::Cor { .. } => {
                Err(Error::Invalid("COR coordinates have no cut polytope; convert to suspension first".into()))
            }
        }
    }

    /// The space whose cut vectors live on `shape`.
    pub fn of_graph(shape: &Shape) -> Space {
        match *shape {
            Shape::Bipartite(b) => Space::Correlation { m: b.m, n: b.n },
            Shape::Suspension(s) => Space::Suspension { m: s.m(), n: s.n() },
            Shape::Complete(c) => Space::Complete { alice: c.alice, bob: c.bob },
        }
    }

    fn from_name(name: &str, rows: usize, cols: usize) -> Result<Space> {
        Ok(match name {
            "correlation" => Space::Correlation { m: rows, n: cols },
            "suspension" => Space::Suspension { m: rows, n: cols },
            "cor" => Space::Cor { m: rows, n: cols },
            "complete" => Space::Complete { alice: rows, bob: cols },
            other => return Err(Error::Parse(format!("unknown space {other:?}"))),
        })
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (r, c) = self.sides();
        write!(f, "{}({r},{c})", self.name())
    }
}

/// `a·x ≤ rhs` over a declared [`Space`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearInequality {
    pub space: Space,
    pub a: Vec<Rational>,
    pub rhs: Rational,
}

impl LinearInequality {
    pub fn new(space: Space, a: Vec<Rational>, rhs: Rational) -> Result<Self> {
        if a.len() != space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), actual: a.len() });
        }
        Ok(LinearInequality { space, a, rhs })
    }

    /// Correlation inequality from an integer matrix `a[i][j]`.
    pub fn correlation(matrix: &[Vec<i64>], rhs: i64) -> Result<Self> {
        let m = matrix.len();
        let n = matrix.first().map_or(0, Vec::len);
        if matrix.iter().any(|r| r.len() != n) {
            return Err(Error::Parse("ragged coefficient matrix".into()));
        }
        let a = matrix.iter().flatten().map(|&v| rat(v)).collect();
        LinearInequality::new(Space::Correlation { m, n }, a, rat(rhs))
    }

    /// Positive rescaling to coprime integers.
    pub fn normalized(&self) -> Self {
        let h = Halfspace::new(self.a.clone(), self.rhs.clone()).normalized();
        LinearInequality { space: self.space, a: h.a, rhs: h.b }
    }

    pub fn halfspace(&self) -> Halfspace {
        Halfspace::new(self.a.clone(), self.rhs.clone())
    }

    pub fn from_halfspace(space: Space, h: Halfspace) -> Result<Self> {
        LinearInequality::new(space, h.a, h.b)
    }

    /// Cut vectors of the graph underlying the space.
    pub fn cut_vectors(&self) -> Result<VRep> {
        cut_vectors(&self.space.graph()?)
    }

    /// `(maximum of a·x over cut vectors, valid)`.
    pub fn classical_max(&self) -> Result<(Rational, bool)> {
        let v = self.cut_vectors()?;
        let max = v.points.iter().map(|p| self.halfspace().lhs(p)).max().unwrap_or_else(Rational::zero);
        let valid = max <= self.rhs;
        Ok((max, valid))
    }

    /// Coefficient of `A_iB_j` in correlation, suspension or COR space.
    pub fn cross(&self, i: usize, j: usize) -> &Rational {
        let (m, n) = self.space.sides();
        let off = match self.space {
            Space::Correlation { .. } => 0,
            Space::Suspension { .. } | Space::Cor { .. } => m + n,
            Space::Complete { .. } => panic!("cross() is not defined for complete space"),
        };
        &self.a[off + i * n + j]
    }

    /// Matrix notation. Correlation: `m×n`. Suspension and COR: an
    /// `(m+1)×(n+1)` matrix whose row 0 holds the `X`/`B_j` node terms,
    /// column 0 the `A_i` terms, and `[0][0] = 0`. Complete: the upper
    /// triangle of the `N×N` adjacency matrix.
    pub fn matrix(&self) -> Vec<Vec<Rational>> {
        let (m, n) = self.space.sides();
        match self.space {
            Space::Correlation { .. } => (0..m).map(|i| self.a[i * n..(i + 1) * n].to_vec()).collect(),
            Space::Suspension { .. } | Space::Cor { .. } => {
                let mut out = vec![vec![Rational::zero(); n + 1]; m + 1];
                for j in 0..n {
                    out[0][j + 1] = self.a[m + j].clone();
                }
                for i in 0..m {
                    out[i + 1][0] = self.a[i].clone();
                    for j in 0..n {
                        out[i + 1][j + 1] = self.cross(i, j).clone();
                    }
                }
                out
            }
            Space::Complete { alice, bob } => {
                let shape = CompleteShape { alice, bob };
                let k = alice + bob;
                let mut out = vec![vec![Rational::zero(); k]; k];
                for p in 0..k {
                    for q in p + 1..k {
                        out[p][q] = self.a[shape.pair_index(p, q)].clone();
                    }
                }
                out
            }
        }
    }

    pub fn from_matrix(space: Space, matrix: &[Vec<Rational>], rhs: Rational) -> Result<Self> {
        let (m, n) = space.sides();
        let expect = |rows: usize, cols: usize| -> Result<()> {
            if matrix.len() != rows || matrix.iter().any(|r| r.len() != cols) {
                return Err(Error::Parse(format!(
                    "{} space with sides ({m},{n}) needs a {rows}x{cols} matrix",
                    space.name()
                )));
            }
            Ok(())
        };
        let a: Vec<Rational> = match space {
            Space::Correlation { .. } => {
                expect(m, n)?;
                matrix.iter().flatten().cloned().collect()
            }
            Space::Suspension { .. } | Space::Cor { .. } => {
                expect(m + 1, n + 1)?;
                if !matrix[0][0].is_zero() {
                    return Err(Error::Parse("matrix entry [0][0] must be 0".into()));
                }
                let mut a: Vec<Rational> = (0..m).map(|i| matrix[i + 1][0].clone()).collect();
                a.extend((0..n).map(|j| matrix[0][j + 1].clone()));
                for row in &matrix[1..] {
                    a.extend(row[1..].iter().cloned());
                }
                a
            }
            Space::Complete { alice, bob } => {
                let k = alice + bob;
                expect(k, k)?;
                let mut a = Vec::with_capacity(space.dim());
                for p in 0..k {
                    for q in 0..k {
                        if q > p {
                            a.push(matrix[p][q].clone());
                        } else if !matrix[p][q].is_zero() {
                            return Err(Error::Parse(format!("complete matrix must be upper triangular ([{p}][{q}])")));
                        }
                    }
                }
                a
            }
        };
        LinearInequality::new(space, a, rhs)
    }

    pub fn to_json(&self) -> Value {
        let (m, n) = self.space.sides();
        let matrix: Vec<Vec<Value>> = self.matrix().iter().map(|r| r.iter().map(Scalar::to_json).collect()).collect();
        json!({
            "rows": m,
            "cols": n,
            "a": matrix,
            "rhs": self.rhs.to_json(),
            "space": self.space.name(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let get_usize = |k: &str| {
            v.get(k)
                .and_then(Value::as_u64)
                .map(|x| x as usize)
                .ok_or_else(|| Error::Parse(format!("inequality is missing integer \"{k}\"")))
        };
        let space_name = v.get("space").and_then(Value::as_str).unwrap_or("correlation");
        let space = Space::from_name(space_name, get_usize("rows")?, get_usize("cols")?)?;
        let rows = v
            .get("a")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("inequality is missing matrix \"a\"".into()))?;
        let matrix: Vec<Vec<Rational>> = rows
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(|| Error::Parse("matrix rows must be arrays".into()))?
                    .iter()
                    .map(Rational::from_json)
                    .collect()
            })
            .collect::<Result<_>>()?;
        let rhs =
            Rational::from_json(v.get("rhs").ok_or_else(|| Error::Parse("inequality is missing \"rhs\"".into()))?)?;
        LinearInequality::from_matrix(space, &matrix, rhs)
    }

    /// The bracket layout used in the literature: row and column labels
    /// around the coefficient matrix, followed by `≤ rhs`.
    pub fn pretty(&self) -> String {
        let (m, n) = self.space.sides();
        let (row_labels, col_labels): (Vec<String>, Vec<String>) = match self.space {
            Space::Correlation { .. } => {
                ((1..=m).map(|i| format!("(A{i})")).collect(), (1..=n).map(|j| format!("(B{j})")).collect())
            }
            Space::Suspension { .. } | Space::Cor { .. } => (
                std::iter::once("(X)".to_string()).chain((1..=m).map(|i| format!("(A{i})"))).collect(),
                std::iter::once("(X)".to_string()).chain((1..=n).map(|j| format!("(B{j})"))).collect(),
            ),
            Space::Complete { alice, bob } => {
                let labels: Vec<String> =
                    CompleteShape { alice, bob }.nodes().iter().map(|v| format!("({v})")).collect();
                (labels.clone(), labels)
            }
        };
        let matrix: Vec<Vec<String>> =
            self.matrix().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect();
        let width =
            matrix.iter().flatten().map(String::len).chain(col_labels.iter().map(String::len)).max().unwrap_or(1);
        let label_w = row_labels.iter().map(String::len).max().unwrap_or(0);
        let mut out = format!("{:label_w$}", "");
        for c in &col_labels {
            out.push_str(&format!(" {c:>width$}"));
        }
        out.push('\n');
        for (k, (label, row)) in row_labels.iter().zip(&matrix).enumerate() {
            out.push_str(&format!("{label:label_w$}"));
            for v in row {
                out.push_str(&format!(" {v:>width$}"));
            }
            if k + 1 == matrix.len() {
                out.push_str(&format!("  <= {}", self.rhs));
            }
            out.push('\n');
        }
        out
    }

    /// Rewrites a COR-space inequality in suspension coordinates through
    /// `p = φ⁻¹(x)`, then normalizes.
    pub fn cor_to_suspension(&self) -> Result<Self> {
        let Space::Cor { m, n } = self.space else {
            return Err(Error::Invalid(format!("expected cor space, got {}", self.space)));
        };
        let half = ratio(1, 2);
        let quarter = ratio(1, 4);
        let mut x = vec![Rational::zero(); self.space.dim()];
        let mut constant = Rational::zero();
        for i in 0..m {
            x[i] -= &half * &self.a[i];
            constant += &half * &self.a[i];
        }
        for j in 0..n {
            x[m + j] -= &half * &self.a[m + j];
            constant += &half * &self.a[m + j];
        }
        for i in 0..m {
            for j in 0..n {
                // p_AB = (x_AB + 1 − x_XA − x_XB) / 4
                let g = &quarter * self.cross(i, j);
                x[m + n + i * n + j] += &g;
                x[i] -= &g;
                x[m + j] -= &g;
                constant += g;
            }
        }
        Ok(LinearInequality { space: Space::Suspension { m, n }, a: x, rhs: &self.rhs - constant }.normalized())
    }

    /// Rewrites a suspension-space inequality in COR coordinates through
    /// `x = φ(p)`, then normalizes.
    pub fn suspension_to_cor(&self) -> Result<Self> {
        let Space::Suspension { m, n } = self.space else {
            return Err(Error::Invalid(format!("expected suspension space, got {}", self.space)));
        };
        let two = rat(2);
        let four = rat(4);
        let mut p = vec![Rational::zero(); self.space.dim()];
        let mut constant = Rational::zero();
        for k in 0..m + n {
            // x_Xu = 1 − 2 p_u
            p[k] -= &two * &self.a[k];
            constant += &self.a[k];
        }
        for i in 0..m {
            for j in 0..n {
                // x_AB = 1 − 2p_A − 2p_B + 4p_AB
                let c = self.cross(i, j).clone();
                p[m + n + i * n + j] += &four * &c;
                p[i] -= &two * &c;
                p[m + j] -= &two * &c;
                constant += c;
            }
        }
        Ok(LinearInequality { space: Space::Cor { m, n }, a: p, rhs: &self.rhs - constant }.normalized())
    }

    /// Suspension inequality with zero root coefficients as a correlation
    /// inequality.
    pub fn suspension_to_correlation(&self) -> Result<Self> {
        let Space::Suspension { m, n } = self.space else {
            return Err(Error::Invalid(format!("expected suspension space, got {}", self.space)));
        };
        if self.a[..m + n].iter().any(|v| !v.is_zero()) {
            return Err(Error::Invalid("inequality has nonzero root coefficients".into()));
        }
        LinearInequality::new(Space::Correlation { m, n }, self.a[m + n..].to_vec(), self.rhs.clone())
    }

    /// Correlation inequality in suspension coordinates (zero root terms).
    pub fn correlation_to_suspension(&self) -> Result<Self> {
        let Space::Correlation { m, n } = self.space else {
            return Err(Error::Invalid(format!("expected correlation space, got {}", self.space)));
        };
        let mut a = vec![Rational::zero(); m + n];
        a.extend(self.a.iter().cloned());
        LinearInequality::new(Space::Suspension { m, n }, a, self.rhs.clone())
    }

    /// Integer coefficients of a normalized copy, if they fit in `i64`.
    pub(crate) fn integer_coefficients(&self) -> Result<(Vec<i64>, i64)> {
        use num_traits::ToPrimitive;
        let norm = self.normalized();
        let conv = |r: &Rational| {
            r.to_integer().to_i64().ok_or_else(|| Error::Invalid("coefficient does not fit in 64 bits".into()))
        };
        Ok((norm.a.iter().map(conv).collect::<Result<_>>()?, conv(&norm.rhs)?))
    }
}

impl fmt::Display for LinearInequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = match self.space {
            Space::Cor { m, n } => {
                let shape = BipartiteShape { m, n };
                (0..self.a.len()).map(|k| crate::mappings::cor_coordinate_label(shape, k)).collect()
            }
            _ => match self.space.graph() {
                Ok(g) => g.edges().iter().map(|(u, v)| format!("x{u}{v}")).collect(),
                Err(_) => Vec::new(),
            },
        };
        let mut first = true;
        for (c, label) in self.a.iter().zip(&labels) {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if *c < Rational::zero() { ("-", -c.clone()) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if mag == rat(1) {
                write!(f, "{label}")?;
            } else {
                write!(f, "{mag} {label}")?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " <= {}", self.rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chsh_cor_form_becomes_correlation_form() {
        let cor = catalog("chsh-cor").unwrap();
        let susp = cor.cor_to_suspension().unwrap();
        let corr = susp.suspension_to_correlation().unwrap();
        assert_eq!(corr, catalog("chsh").unwrap());
        assert_eq!(susp.suspension_to_cor().unwrap(), cor.normalized());
    }

    #[test]
    fn json_round_trip_all_spaces() {
        for name in catalog_names() {
            let ineq = catalog(name).unwrap();
            let back = LinearInequality::from_json(&ineq.to_json()).unwrap();
            assert_eq!(back, ineq, "{name}");
        }
    }

    #[test]
    fn json_accepts_plain_integers() {
        let v = json!({"rows": 2, "cols": 2, "a": [[1, 1], [1, -1]], "rhs": 2});
        assert_eq!(LinearInequality::from_json(&v).unwrap(), catalog("chsh").unwrap());
        let bad = json!({"rows": 2, "cols": 3, "a": [[1, 1], [1, -1]], "rhs": 2});
        assert!(LinearInequality::from_json(&bad).is_err());
    }

    #[test]
    fn pretty_layout() {
        let s = catalog("chsh").unwrap().pretty();
        assert_eq!(s, "     (B1) (B2)\n(A1)    1    1\n(A2)    1   -1  <= 2\n");
        assert_eq!(catalog("chsh").unwrap().to_string(), "xA1B1 + xA1B2 + xA2B1 - xA2B2 <= 2");
    }
}
