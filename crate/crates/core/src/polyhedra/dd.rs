//! Double description method over arbitrary-precision integers.
//!
//! Both conversions reduce to computing the extreme rays of a pointed cone
//! `{y : R y ≥ 0}`:
//!
//! * V to H: rows `(1, −v)` in variables `(a₀, a)`; extreme rays are the
//!   facets `a·x ≤ a₀`.
//! * H to V: rows `(b, −a)` for `a·x ≤ b` plus `t ≥ 0` in variables
//!   `(t, x)`; rays with `t > 0` are the vertices `x/t`.
//!
//! Rows are inserted by ascending number of nonzeros, ties broken
//! lexicographically. New rays come from adjacent pairs, with adjacency
//! decided by the combinatorial test on zero sets. Pair tests run in
//! parallel; results are collected in pair order so output does not
//! depend on scheduling.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use super::{bigints_to_rationals, facet_check, linalg, HRep, Halfspace, LinearEquation, VRep};
use crate::error::{Error, Result};
use crate::scalar::{int_to_rational, primitive_integer_vector, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DdOptions {
    /// Largest ambient dimension accepted without `force`.
    pub max_dim: usize,
    /// Largest number of input rows (points or constraints) accepted
    /// without `force`.
    pub max_rows: usize,
    pub force: bool,
}

impl Default for DdOptions {
    fn default() -> Self {
        DdOptions { max_dim: 16, max_rows: 64, force: false }
    }
}

impl DdOptions {
    pub fn forced() -> Self {
        DdOptions { force: true, ..Default::default() }
    }

    /// The refusal message, or `None` when the input fits.
    pub fn refusal(&self, dim: usize, rows: usize) -> Option<String> {
        if dim > self.max_dim {
            Some(format!("ambient dimension {dim} exceeds the limit {}", self.max_dim))
        } else if rows > self.max_rows {
            Some(format!("{rows} input rows exceed the limit {}", self.max_rows))
        } else {
            None
        }
    }

    fn check(&self, dim: usize, rows: usize) -> Result<()> {
        match self.refusal(dim, rows) {
            Some(reason) if !self.force => Err(Error::TooLarge(format!("{reason}; pass force to override"))),
            _ => Ok(()),
        }
    }
}

type Bits = Vec<u64>;

fn bits_new(len: usize) -> Bits {
    vec![0; len.div_ceil(64)]
}

fn bit_set(b: &mut Bits, k: usize) {
    b[k / 64] |= 1 << (k % 64);
}

fn bits_and(a: &Bits, b: &Bits) -> Bits {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn bits_count(a: &Bits) -> u32 {
    a.iter().map(|w| w.count_ones()).sum()
}

fn bits_subset(a: &Bits, b: &Bits) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

struct Ray {
    v: Vec<BigInt>,
    zeros: Bits,
}

fn idot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).filter(|(x, _)| !x.is_zero()).map(|(x, y)| x * y).sum()
}

fn primitive(v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g == BigInt::from(1) {
        v
    } else {
        v.into_iter().map(|x| x / &g).collect()
    }
}

/// Insertion order: fewer nonzeros first, then lexicographic.
fn insertion_order(rows: &[Vec<BigInt>]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| {
        let nz = |r: &Vec<BigInt>| r.iter().filter(|x| !x.is_zero()).count();
        nz(&rows[a]).cmp(&nz(&rows[b])).then_with(|| rows[a].cmp(&rows[b])).then(a.cmp(&b))
    });
    order
}

/// Extreme rays of `{y : R y ≥ 0}`. `R` must have full column rank; the
/// caller checks this.
fn extreme_rays(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let d = rows[0].len();
    let order = insertion_order(rows);
    let ordered: Vec<&Vec<BigInt>> = order.iter().map(|&k| &rows[k]).collect();
    let as_rat: Vec<Vec<Rational>> = ordered.iter().map(|r| bigints_to_rationals(r)).collect();
    let basis = linalg::independent_rows(&as_rat);
    assert_eq!(basis.len(), d, "cone is not pointed");

    let total = ordered.len();
    let square: Vec<Vec<Rational>> = basis.iter().map(|&k| as_rat[k].clone()).collect();
    let inv = linalg::inverse(&square).expect("basis rows are independent");
    let mut rays: Vec<Ray> = (0..d)
        .map(|col| {
            let column: Vec<Rational> = (0..d).map(|r| inv[r][col].clone()).collect();
            let mut zeros = bits_new(total);
            for (k, &pos) in basis.iter().enumerate() {
                if k != col {
                    bit_set(&mut zeros, pos);
                }
            }
            Ray { v: primitive_integer_vector(&column), zeros }
        })
        .collect();

    let in_basis: Vec<bool> = (0..total).map(|k| basis.contains(&k)).collect();
    for pos in (0..total).filter(|&k| !in_basis[k]) {
        let row = ordered[pos];
        let values: Vec<BigInt> = rays.iter().map(|r| idot(row, &r.v)).collect();
        let plus: Vec<usize> = (0..rays.len()).filter(|&k| values[k].is_positive()).collect();
        let minus: Vec<usize> = (0..rays.len()).filter(|&k| values[k].is_negative()).collect();
        if minus.is_empty() {
            for (ray, val) in rays.iter_mut().zip(&values) {
                if val.is_zero() {
                    bit_set(&mut ray.zeros, pos);
                }
            }
            continue;
        }
        let pairs: Vec<(usize, usize)> = plus.iter().flat_map(|&p| minus.iter().map(move |&n| (p, n))).collect();
        let rays_ref = &rays;
        let created: Vec<Ray> = pairs
            .par_iter()
            .filter_map(|&(p, n)| {
                let common = bits_and(&rays_ref[p].zeros, &rays_ref[n].zeros);
                if (bits_count(&common) as usize) + 2 < d {
                    return None;
                }
                let blocked =
                    rays_ref.iter().enumerate().any(|(k, r)| k != p && k != n && bits_subset(&common, &r.zeros));
                if blocked {
                    return None;
                }
                let (vp, vn) = (&values[p], &values[n]);
                let combo: Vec<BigInt> =
                    rays_ref[n].v.iter().zip(&rays_ref[p].v).map(|(yn, yp)| vp * yn - vn * yp).collect();
                let mut zeros = common;
                bit_set(&mut zeros, pos);
                Some(Ray { v: primitive(combo), zeros })
            })
            .collect();
        let mut next: Vec<Ray> = Vec::with_capacity(plus.len() + created.len());
        for (k, ray) in rays.into_iter().enumerate() {
            if values[k].is_positive() {
                next.push(ray);
            } else if values[k].is_zero() {
                let mut ray = ray;
                bit_set(&mut ray.zeros, pos);
                next.push(ray);
            }
        }
        next.extend(created);
        rays = next;
    }
    rays.into_iter().map(|r| r.v).collect()
}

fn integer_row(r: &[Rational]) -> Vec<BigInt> {
    primitive_integer_vector(r)
}

/// Facets of the convex hull of a full-dimensional point set, sorted
/// lexicographically, each verified by [`facet_check`].
pub fn dd_v_to_h(input: &VRep, opts: DdOptions) -> Result<HRep> {
    let d = input.dim;
    opts.check(d, input.len())?;
    if input.is_empty() {
        return Err(Error::Invalid("empty vertex list".into()));
    }
    let hom: Vec<Vec<Rational>> = input
        .points
        .iter()
        .map(|p| std::iter::once(Rational::from_integer(1.into())).chain(p.iter().map(|x| -x)).collect())
        .collect();
    if linalg::rank(&hom) < d + 1 {
        let equations = linalg::nullspace(&hom, d + 1)
            .into_iter()
            .map(|y| LinearEquation { a: y[1..].to_vec(), b: y[0].clone() }.normalized())
            .collect();
        return Err(Error::Degenerate { equations });
    }
    let rows: Vec<Vec<BigInt>> = hom.iter().map(|r| integer_row(r)).collect();
    let mut facets: Vec<Halfspace> = extreme_rays(&rows)
        .into_iter()
        .map(|y| Halfspace::new(y[1..].iter().map(int_to_rational).collect(), int_to_rational(&y[0])))
        .collect();
    facets.sort();
    facets.dedup();
    for f in &facets {
        let report = facet_check(f, input)?;
        if !report.is_facet {
            return Err(Error::Numerical(format!("double description produced a non-facet: {f}")));
        }
    }
    Ok(HRep { dim: d, inequalities: facets, equations: Vec::new() })
}

/// Vertices of a bounded polyhedron, sorted lexicographically, each
/// checked to satisfy the input with `dim` linearly independent tight
/// constraints.
pub fn dd_h_to_v(input: &HRep, opts: DdOptions) -> Result<VRep> {
    let d = input.dim;
    let rows_in = input.inequalities.len() + input.equations.len();
    opts.check(d, rows_in)?;
    let mut hom: Vec<Vec<Rational>> = Vec::new();
    let mut push = |b: &Rational, a: &[Rational], sign: i32| {
        let row: Vec<Rational> = std::iter::once(b.clone())
            .chain(a.iter().map(|x| -x.clone()))
            .map(|x| if sign < 0 { -x } else { x })
            .collect();
        hom.push(row);
    };
    for h in &input.inequalities {
        push(&h.b, &h.a, 1);
    }
    for e in &input.equations {
        push(&e.b, &e.a, 1);
        push(&e.b, &e.a, -1);
    }
    let mut t_row = vec![Rational::zero(); d + 1];
    t_row[0] = Rational::from_integer(1.into());
    hom.push(t_row);
    if linalg::rank(&hom) < d + 1 {
        return Err(Error::Unbounded("the constraint matrix has a nontrivial lineality space".into()));
    }
    let rows: Vec<Vec<BigInt>> = hom.iter().map(|r| integer_row(r)).collect();
    let rays = extreme_rays(&rows);
    let mut vertices = Vec::new();
    let mut recession = 0;
    for y in rays {
        if y[0].is_zero() {
            recession += 1;
            continue;
        }
        let t = int_to_rational(&y[0]);
        vertices.push(y[1..].iter().map(|x| int_to_rational(x) / &t).collect::<Vec<Rational>>());
    }
    if recession > 0 {
        return Err(if vertices.is_empty() {
            Error::Invalid("the polyhedron is empty".into())
        } else {
            Error::Unbounded(format!("{recession} extreme recession direction(s)"))
        });
    }
    vertices.sort();
    vertices.dedup();
    for v in &vertices {
        if !input.contains(v) {
            return Err(Error::Numerical("double description produced an infeasible vertex".into()));
        }
        let mut tight: Vec<Vec<Rational>> =
            input.inequalities.iter().filter(|h| h.slack(v).is_zero()).map(|h| h.a.clone()).collect();
        tight.extend(input.equations.iter().map(|e| e.a.clone()));
        if linalg::rank(&tight) != d {
            return Err(Error::Numerical("double description produced a non-vertex".into()));
        }
    }
    Ok(VRep { dim: d, points: vertices })
}
