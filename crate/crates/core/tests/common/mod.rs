//! Properties and independent oracles shared by the integration tests.
#![allow(dead_code)]

use bellcut::graphs::{BipartiteShape, GraphShape, SuspensionShape};
use bellcut::inequalities::{
    canonical_form, catalog, family_hypermetric, family_trivial, zero_lift, LinearInequality, Space, SymmetryElement,
};
use bellcut::mappings::{covariance, covariance_inv, iota, iota_inv, zero_root_lift, CorVector, CorrelationVector};
use bellcut::polyhedra::{facet_check, rcmet_hrep, rmet_hrep};
use bellcut::scalar::{ratio, Rational};
use bellcut::sdp::{
    cut_condition, elliptope_max, elliptope_membership, elliptope_rmet_max, precise_options, EdgeWeightedObjective,
    SolverOptions,
};
use nalgebra::DMatrix;
use num_traits::Signed;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

// ---------------------------------------------------------------- oracles

/// All ±1 labelings of `k` nodes.
pub fn labelings(k: usize) -> impl Iterator<Item = Vec<i64>> {
    (0..1u64 << k).map(move |bits| (0..k).map(|i| if bits >> i & 1 == 1 { -1 } else { 1 }).collect())
}

/// Maximum of `Σ a_ij c_i d_j` over all labelings, computed without the
/// library.
pub fn brute_force_bipartite_max(a: &[Vec<i64>]) -> i64 {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    if m == 0 || n == 0 {
        return 0;
    }
    labelings(m + n)
        .map(|c| (0..m).map(|i| (0..n).map(|j| a[i][j] * c[i] * c[m + j]).sum::<i64>()).sum())
        .max()
        .unwrap()
}

/// Floating-point rank by singular values.
pub fn float_rank(rows: &[Vec<f64>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(rows.len(), rows[0].len(), |r, c| rows[r][c]);
    m.svd(false, false).singular_values.iter().filter(|s| **s > 1e-9).count()
}

/// Counts facets with coefficients in {−1, 0, 1} of the convex hull of
/// `points` (full-dimensional) by trying every coefficient vector.
pub fn ternary_facet_count(points: &[Vec<i64>]) -> usize {
    let d = points[0].len();
    let mut count = 0;
    let total = 3u64.pow(d as u32);
    for code in 0..total {
        let mut a = vec![0i64; d];
        let mut c = code;
        for x in a.iter_mut() {
            *x = (c % 3) as i64 - 1;
            c /= 3;
        }
        if a.iter().all(|x| *x == 0) {
            continue;
        }
        let vals: Vec<i64> = points.iter().map(|p| p.iter().zip(&a).map(|(x, y)| x * y).sum()).collect();
        let max = *vals.iter().max().unwrap();
        let tight: Vec<&Vec<i64>> = points.iter().zip(&vals).filter(|(_, v)| **v == max).map(|(p, _)| p).collect();
        if tight.len() < d {
            continue;
        }
        let diffs: Vec<Vec<f64>> =
            tight[1..].iter().map(|p| p.iter().zip(tight[0]).map(|(x, y)| (x - y) as f64).collect()).collect();
        if float_rank(&diffs) == d - 1 {
            count += 1;
        }
    }
    count
}

/// Cut vectors of `K_{m,n}` as integer vectors, first A-node fixed to +1.
pub fn bipartite_cuts(m: usize, n: usize) -> Vec<Vec<i64>> {
    labelings(m + n)
        .filter(|c| c[0] == 1)
        .map(|c| (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| c[i] * c[m + j]).collect())
        .collect()
}

/// Cut vectors of `K_k` in lexicographic pair order.
pub fn complete_cuts(k: usize) -> Vec<Vec<i64>> {
    labelings(k)
        .filter(|c| c[0] == 1)
        .map(|c| (0..k).flat_map(|p| (p + 1..k).map(move |q| (p, q))).map(|(p, q)| c[p] * c[q]).collect())
        .collect()
}

/// Best CHSH value over unit vectors in the plane, by a three-degree grid
/// (which contains the multiples of 45 degrees).
pub fn chsh_grid_max() -> f64 {
    let step = std::f64::consts::PI / 60.0;
    let mut best = f64::MIN;
    for a2 in 0..120 {
        for b1 in 0..120 {
            for b2 in 0..120 {
                let (a1, a2, b1, b2) = (0.0, a2 as f64 * step, b1 as f64 * step, b2 as f64 * step);
                let v = (a1 - b1).cos() + (a1 - b2).cos() + (a2 - b1).cos() - (a2 - b2).cos();
                best = best.max(v);
            }
        }
    }
    best
}

/// Distance-like gap of `y` to the boundary of `Cut(K_{2,2})`: the largest
/// value of `lhs − rhs` over its 16 facets (trivial and CHSH variants).
pub fn cut_k22_gap(y: &[f64]) -> f64 {
    let mut g = y.iter().map(|v| v.abs() - 1.0).fold(f64::MIN, f64::max);
    for neg in 0..4 {
        for sign in [1.0, -1.0] {
            let s: f64 = (0..4).map(|k| if k == neg { -y[k] } else { y[k] }).sum();
            g = g.max(sign * s - 2.0);
        }
    }
    g
}

// ------------------------------------------------------------ strategies

fn small_rational(den: i64, lo: i64, hi: i64) -> impl Strategy<Value = Rational> {
    (lo..=hi).prop_map(move |k| ratio(k, den))
}

fn shape_strategy(max: usize) -> impl Strategy<Value = BipartiteShape> {
    (1..=max, 1..=max).prop_map(|(m, n)| BipartiteShape::new(m, n).unwrap())
}

pub fn cor_point() -> impl Strategy<Value = CorVector<Rational>> {
    shape_strategy(3).prop_flat_map(|shape| {
        let dim = shape.m + shape.n + shape.m * shape.n;
        (1i64..=12)
            .prop_flat_map(move |den| proptest::collection::vec(small_rational(den, -2 * den, 2 * den), dim))
            .prop_map(move |c| CorVector::new(shape, c).unwrap())
    })
}

/// Points on a quarter grid around `[0,1]^d`, so both sides of RCMet occur.
pub fn quarter_cor_point() -> impl Strategy<Value = CorVector<Rational>> {
    shape_strategy(3).prop_flat_map(|shape| {
        let dim = shape.m + shape.n + shape.m * shape.n;
        proptest::collection::vec(small_rational(4, -1, 5), dim).prop_map(move |c| CorVector::new(shape, c).unwrap())
    })
}

pub fn cube_correlations() -> impl Strategy<Value = CorrelationVector<Rational>> {
    shape_strategy(3).prop_flat_map(|shape| {
        proptest::collection::vec(small_rational(16, -16, 16), shape.edge_count())
            .prop_map(move |x| CorrelationVector::new(shape, x).unwrap())
    })
}

/// Per edge: root values `r_a, r_b ∈ [−1,1]` and a position `λ` of the
/// edge value in the interval `[−1+|r_a+r_b|, 1−|r_a−r_b|]` (outside when
/// `λ ∉ [0,1]`).
pub type EdgeSample = (usize, usize, Vec<Rational>, Vec<Rational>, Vec<Rational>);

pub fn rmet_edge_samples() -> impl Strategy<Value = EdgeSample> {
    (1usize..=3, 1usize..=3).prop_flat_map(|(m, n)| {
        (
            Just(m),
            Just(n),
            proptest::collection::vec(small_rational(16, -16, 16), m),
            proptest::collection::vec(small_rational(16, -16, 16), n),
            proptest::collection::vec(small_rational(10, -2, 12), m * n),
        )
    })
}

pub fn hypermetric_weights() -> impl Strategy<Value = (Vec<i64>, Vec<i64>)> {
    (1usize..=3, 0usize..=3)
        .prop_flat_map(|(s, t)| (proptest::collection::vec(-2i64..=2, s), proptest::collection::vec(-2i64..=2, t)))
        .prop_map(|(mut a, b)| {
            let total: i64 = a.iter().chain(&b).sum();
            a[0] += 1 - total;
            (a, b)
        })
}

pub fn symmetry_element(m: usize, n: usize, transpose_ok: bool) -> impl Strategy<Value = SymmetryElement> {
    (
        Just((0..m).collect::<Vec<_>>()).prop_shuffle(),
        Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
        any::<bool>(),
        proptest::collection::vec(prop_oneof![Just(1i8), Just(-1i8)], m),
        proptest::collection::vec(prop_oneof![Just(1i8), Just(-1i8)], n),
    )
        .prop_map(move |(row_perm, col_perm, t, row_signs, col_signs)| SymmetryElement {
            row_perm,
            col_perm,
            transpose: t && transpose_ok,
            row_signs,
            col_signs,
        })
}

/// A facet of `Cut(K_{m,n})` (trivial or CHSH, moved by a random symmetry)
/// and a target size with `m' + n' ≤ 8`.
pub fn lift_case() -> impl Strategy<Value = (LinearInequality, usize, usize)> {
    (any::<bool>(), symmetry_element(2, 2, true), 2usize..=4, 2usize..=4)
        .prop_filter("m'+n' <= 8", |(_, _, m2, n2)| m2 + n2 <= 8)
        .prop_map(|(use_chsh, g, m2, n2)| {
            let base = if use_chsh {
                catalog("chsh").unwrap()
            } else {
                zero_lift(&family_trivial(BipartiteShape::new(1, 1).unwrap(), 0, 0, 1).unwrap(), 2, 2).unwrap()
            };
            (g.apply(&base).unwrap(), m2, n2)
        })
}

pub fn suspension_objective() -> impl Strategy<Value = LinearInequality> {
    shape_strategy(3).prop_flat_map(|shape| {
        let s = shape.suspension();
        proptest::collection::vec(-3i64..=3, s.edge_count()).prop_map(move |w| {
            LinearInequality::new(
                Space::Suspension { m: shape.m, n: shape.n },
                w.into_iter().map(|v| ratio(v, 1)).collect(),
                ratio(0, 1),
            )
            .unwrap()
        })
    })
}

pub fn k22_point() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-1.0f64..=1.0, 4)
}

// ------------------------------------------------------------ properties

type PropResult = Result<(), TestCaseError>;

pub fn prop_round_trips(p: CorVector<Rational>) -> PropResult {
    let q = iota(&p);
    prop_assert_eq!(iota_inv(&q).unwrap(), p.clone());
    let x = covariance(&p);
    prop_assert_eq!(covariance_inv(&x), p);
    prop_assert_eq!(covariance(&covariance_inv(&x)), x);
    Ok(())
}

/// `p ∈ RCMet(K_{m,n})` exactly when `ι(p)` is a behavior.
pub fn prop_rcmet_iota(p: CorVector<Rational>) -> PropResult {
    let in_rcmet = rcmet_hrep(p.shape).contains(&p.coords);
    prop_assert_eq!(in_rcmet, iota(&p).validate().is_ok());
    Ok(())
}

pub fn prop_cube_lifts_into_rmet(x: CorrelationVector<Rational>) -> PropResult {
    let lifted = zero_root_lift(&x);
    prop_assert!(rmet_hrep(lifted.shape).contains(&lifted.x));
    Ok(())
}

/// Builds suspension points edge by edge from the explicit description of
/// `RMet` per edge and checks the library's H-representation and the
/// projection into the cube.
pub fn prop_rmet_edges((m, n, ra, rb, lam): EdgeSample) -> PropResult {
    let shape = SuspensionShape::new(m, n).unwrap();
    let one = ratio(1, 1);
    let mut x: Vec<Rational> = ra.iter().chain(&rb).cloned().collect();
    let mut inside = true;
    for i in 0..m {
        for j in 0..n {
            let lo = -&one + (&ra[i] + &rb[j]).abs();
            let hi = &one - (&ra[i] - &rb[j]).abs();
            let v = &lo + &lam[i * n + j] * (&hi - &lo);
            // A collapsed interval leaves the edge value fixed whatever lambda is.
            inside &= lo <= v && v <= hi;
            x.push(v);
        }
    }
    let contained = rmet_hrep(shape).contains(&x);
    prop_assert_eq!(contained, inside);
    if contained {
        prop_assert!(x[m + n..].iter().all(|v| v.abs() <= one));
    }
    Ok(())
}

pub fn prop_hypermetric_valid((b_a, b_b): (Vec<i64>, Vec<i64>)) -> PropResult {
    let h = family_hypermetric(&b_a, &b_b).unwrap();
    let (m, n) = h.space.sides();
    prop_assume!(m + n <= 20);
    let a: Vec<Vec<i64>> =
        (0..m).map(|i| (0..n).map(|j| h.a[i * n + j].to_integer().try_into().unwrap()).collect()).collect();
    let rhs: i64 = h.rhs.to_integer().try_into().unwrap();
    prop_assert!(h.a.iter().all(|c| c.is_integer()) && h.rhs.is_integer());
    prop_assert!(brute_force_bipartite_max(&a) <= rhs, "{:?} {:?}", b_a, b_b);
    Ok(())
}

pub fn prop_zero_lift_facet((ineq, m2, n2): (LinearInequality, usize, usize)) -> PropResult {
    let before = facet_check(&ineq.halfspace(), &ineq.cut_vectors().unwrap()).unwrap();
    prop_assert!(before.is_facet);
    let lifted = zero_lift(&ineq, m2, n2).unwrap();
    let after = facet_check(&lifted.halfspace(), &lifted.cut_vectors().unwrap()).unwrap();
    prop_assert!(after.is_facet, "{} lifted to ({m2},{n2})", ineq);
    Ok(())
}

/// Classical ≤ RMet ∩ elliptope ≤ elliptope.
pub fn prop_relaxation_chain(obj: LinearInequality) -> PropResult {
    let (classical, _) = obj.classical_max().unwrap();
    let classical = bellcut::scalar::rational_to_f64(&classical);
    let o = EdgeWeightedObjective::from_inequality(&obj).unwrap();
    let opts = SolverOptions::default();
    let rmet = elliptope_rmet_max(&o, &opts).unwrap().value;
    let ell = elliptope_max(&o, &opts).unwrap().value;
    let tol = 1e-6 * (1.0 + ell.abs());
    prop_assert!(classical <= rmet + tol, "{classical} > {rmet}");
    prop_assert!(rmet <= ell + tol, "{rmet} > {ell}");
    Ok(())
}

pub fn prop_orbit_invariance(g: SymmetryElement) -> PropResult {
    let gisin = catalog("gisin-4b").unwrap();
    let moved = g.apply(&gisin).unwrap();
    prop_assert_eq!(canonical_form(&moved).unwrap(), canonical_form(&gisin).unwrap());
    Ok(())
}

/// On `K_{2,2}` the cut condition decides elliptope membership. Points
/// within 1e-6 of either boundary are skipped.
pub fn prop_membership_matches_cut_condition(x: Vec<f64>) -> PropResult {
    let shape = BipartiteShape::new(2, 2).unwrap();
    let y: Vec<f64> = x.iter().map(|v| std::f64::consts::FRAC_2_PI * v.asin()).collect();
    let gap = cut_k22_gap(&y);
    let mem = elliptope_membership(&shape.into(), &x, &precise_options()).unwrap();
    prop_assume!(gap.abs() > 1e-6 && mem.margin.abs() > 1e-6);
    let cc = cut_condition(&CorrelationVector::new(shape, x.clone()).unwrap()).unwrap();
    prop_assert_eq!(mem.member, cc.passes, "x = {:?}, margin {}, gap {}", x, mem.margin, gap);
    Ok(())
}

// ------------------------------------------------------------ runner

/// Runs one property with a fixed seed; returns `(cases, error)`.
pub fn run_property<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> PropResult) -> Result<(), String> {
    let config = Config { cases, failure_persistence: None, max_global_rejects: 100 * cases, ..Config::default() };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

/// The eight suites of the property criterion, by name.
pub fn property_suites() -> Vec<(&'static str, Box<dyn Fn() -> Result<(), String>>)> {
    vec![
        ("iota/phi round trips", Box::new(|| run_property(100, cor_point(), prop_round_trips))),
        ("RCMet membership equivalence", Box::new(|| run_property(100, quarter_cor_point(), prop_rcmet_iota))),
        (
            "hypercube property",
            Box::new(|| {
                run_property(100, cube_correlations(), prop_cube_lifts_into_rmet)?;
                run_property(100, rmet_edge_samples(), prop_rmet_edges)
            }),
        ),
        ("hypermetric validity", Box::new(|| run_property(100, hypermetric_weights(), prop_hypermetric_valid))),
        ("zero-lift facet preservation", Box::new(|| run_property(100, lift_case(), prop_zero_lift_facet))),
        ("relaxation chain", Box::new(|| run_property(100, suspension_objective(), prop_relaxation_chain))),
        ("orbit invariance", Box::new(|| run_property(100, symmetry_element(4, 4, true), prop_orbit_invariance))),
        (
            "membership vs cut condition",
            Box::new(|| run_property(500, k22_point(), prop_membership_matches_cut_condition)),
        ),
    ]
}
