//! Named inequalities, with coefficients exactly as published.

use super::{LinearInequality, Space};
use crate::error::{Error, Result};
use crate::scalar::rat;

const NAMES: [&str; 11] = [
    "chsh",
    "chsh-cor",
    "gisin-4a",
    "gisin-4b",
    "i3322",
    "pentagonal",
    "pentagonal-trielim",
    "appendix-45-1",
    "appendix-45-2",
    "appendix-45-3",
    "appendix-45-4",
];

pub fn catalog_names() -> &'static [&'static str] {
    &NAMES
}

fn corr(rows: &[&[i64]], rhs: i64) -> LinearInequality {
    let m: Vec<Vec<i64>> = rows.iter().map(|r| r.to_vec()).collect();
    LinearInequality::correlation(&m, rhs).expect("catalog matrix is rectangular")
}

fn ints(v: &[i64]) -> Vec<crate::Rational> {
    v.iter().map(|&x| rat(x)).collect()
}

/// Looks up a named inequality.
///
/// * `chsh`: `x11 + x12 + x21 − x22 ≤ 2`.
/// * `chsh-cor`: the same in COR coordinates, `−pA1 − pB1 + pA1B1 + pA1B2 + pA2B1 − pA2B2 ≤ 0`.
/// * `gisin-4a`, `gisin-4b`: the two (4,4) facets with coefficients at most 2.
/// * `i3322`: the (3,3) Bell inequality in suspension coordinates.
/// * `pentagonal`: the pentagonal facet of `Cut(K_5)` with A = {A1,A2,A3}, B = {B1,B2}.
/// * `pentagonal-trielim`: its triangular elimination on `K_{4,5}`.
/// * `appendix-45-1..4`: four facets of `Cut(K_{4,5})`.
pub fn catalog(name: &str) -> Result<LinearInequality> {
    Ok(match name {
        "chsh" => corr(&[&[1, 1], &[1, -1]], 2),
        "chsh-cor" => {
            // pA1 pA2 pB1 pB2 | A1B1 A1B2 A2B1 A2B2
            LinearInequality::new(Space::Cor { m: 2, n: 2 }, ints(&[-1, 0, -1, 0, 1, 1, 1, -1]), rat(0))?
        }
        "gisin-4a" => corr(&[&[-2, 2, 1, 1], &[1, 2, -2, -1], &[1, 1, 2, -2], &[2, 1, 1, 2]], 10),
        "gisin-4b" => corr(&[&[2, 1, 1, 0], &[1, -1, -1, -1], &[1, -1, -1, 1], &[0, -1, 1, 0]], 2),
        "i3322" => {
            // XA1 XA2 XA3 | XB1 XB2 XB3 | A1B1 .. A3B3
            let a = ints(&[-1, -1, 0, 1, 1, 0, 1, 1, 1, 1, 1, -1, 1, -1, 0]);
            LinearInequality::new(Space::Suspension { m: 3, n: 3 }, a, rat(4))?
        }
        "pentagonal" => {
            // Edges of K_5 over A1 A2 A3 B1 B2 in lexicographic order:
            // A1A2 A1A3 A1B1 A1B2 A2A3 A2B1 A2B2 A3B1 A3B2 B1B2
            let a = ints(&[-1, -1, 1, 1, -1, 1, 1, 1, 1, -1]);
            LinearInequality::new(Space::Complete { alice: 3, bob: 2 }, a, rat(2))?
        }
        "pentagonal-trielim" => corr(&[&[1, 1, -1, -1, 0], &[1, 1, 1, 0, -1], &[1, 1, 0, 1, 1], &[-1, 1, 0, 0, 0]], 6),
        "appendix-45-1" => corr(&[&[1, 0, 0, 0, 1], &[1, 1, 1, 0, -1], &[1, 0, -1, 1, -1], &[-1, 1, 0, 1, 1]], 6),
        "appendix-45-2" => corr(&[&[2, 1, 1, 1, 1], &[0, 1, -1, 1, -1], &[0, -1, 1, 1, -1], &[-2, 1, 1, 1, 1]], 8),
        "appendix-45-3" => corr(&[&[2, 1, 1, 1, 1], &[-1, 1, 2, 1, -1], &[-1, 2, 1, -1, 1], &[0, 2, -2, 1, -1]], 10),
        "appendix-45-4" => corr(&[&[1, 2, 1, 1, -1], &[0, 2, -1, -1, 2], &[1, -1, 1, -2, 1], &[0, -1, 1, 2, 2]], 10),
        other => return Err(Error::Invalid(format!("unknown catalog entry {other:?}; known: {}", NAMES.join(", ")))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn right_hand_sides() {
        assert_eq!(catalog("gisin-4a").unwrap().rhs, rat(10));
        assert_eq!(catalog("gisin-4b").unwrap().rhs, rat(2));
        let i = catalog("i3322").unwrap();
        assert_eq!((i.space, i.rhs.clone()), (Space::Suspension { m: 3, n: 3 }, rat(4)));
        assert!(catalog("nope").is_err());
    }
}
