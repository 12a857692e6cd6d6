//! Symmetries of correlation inequalities and canonical forms.
//!
//! The group acting on `m×n` coefficient matrices is generated by row
//! permutations, column permutations, sign changes of rows and columns
//! (switching) and, when `m = n`, transposition. The canonical form of an
//! inequality is the lexicographically least matrix (row-major) in its
//! orbit; the right-hand side is invariant.
//!
//! For complete-graph inequalities the group is node permutations combined
//! with switchings `a_uv ↦ s_u s_v a_uv`.

use std::collections::HashMap;

use rayon::prelude::*;

use super::{LinearInequality, Space};
use crate::error::{Error, Result};
use crate::graphs::CompleteShape;
use crate::scalar::rat;

/// Default bound on the number of group elements enumerated exhaustively.
pub const DEFAULT_MAX_GROUP: u64 = 10_000_000;

/// `a_{ij} ↦ ε_i η_j a_{σ(i)τ(j)}`, applied after an optional transpose.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryElement {
    pub row_perm: Vec<usize>,
    pub col_perm: Vec<usize>,
    pub transpose: bool,
    pub row_signs: Vec<i8>,
    pub col_signs: Vec<i8>,
}

impl SymmetryElement {
    pub fn identity(m: usize, n: usize) -> Self {
        SymmetryElement {
            row_perm: (0..m).collect(),
            col_perm: (0..n).collect(),
            transpose: false,
            row_signs: vec![1; m],
            col_signs: vec![1; n],
        }
    }

    fn check(&self, m: usize, n: usize) -> Result<()> {
        let is_perm = |p: &[usize], k: usize| {
            let mut seen = vec![false; k];
            p.len() == k && p.iter().all(|&x| x < k && !std::mem::replace(&mut seen[x], true))
        };
        let signs_ok = |s: &[i8], k: usize| s.len() == k && s.iter().all(|&x| x == 1 || x == -1);
        if !is_perm(&self.row_perm, m) || !is_perm(&self.col_perm, n) {
            return Err(Error::Invalid(format!("permutations do not match a {m}x{n} matrix")));
        }
        if !signs_ok(&self.row_signs, m) || !signs_ok(&self.col_signs, n) {
            return Err(Error::Invalid("signs must be +1 or -1, one per row and column".into()));
        }
        if self.transpose && m != n {
            return Err(Error::Invalid("party exchange needs m = n".into()));
        }
        Ok(())
    }

    pub fn apply(&self, ineq: &LinearInequality) -> Result<LinearInequality> {
        let Space::Correlation { m, n } = ineq.space else {
            return Err(Error::Invalid(format!("symmetries act on correlation inequalities, got {}", ineq.space)));
        };
        self.check(m, n)?;
        let entry = |i: usize, j: usize| {
            if self.transpose {
                &ineq.a[j * n + i]
            } else {
                &ineq.a[i * n + j]
            }
        };
        let mut a = Vec::with_capacity(m * n);
        for i in 0..m {
            for j in 0..n {
                let s = i64::from(self.row_signs[i] * self.col_signs[j]);
                a.push(entry(self.row_perm[i], self.col_perm[j]) * rat(s));
            }
        }
        LinearInequality::new(ineq.space, a, ineq.rhs.clone())
    }
}

/// How to search the orbit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Canonicalization {
    /// Visit every group element; refuse groups larger than `max_group`.
    Exhaustive { max_group: u64 },
    /// Enumerate rows (order, signs, transpose) only and place the columns
    /// optimally by sorting. Exact, but no orbit size is reported.
    Pruned,
}

impl Default for Canonicalization {
    fn default() -> Self {
        Canonicalization::Exhaustive { max_group: DEFAULT_MAX_GROUP }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Canonical {
    pub form: LinearInequality,
    /// Orbit size, known after exhaustive search.
    pub orbit_size: Option<u64>,
    pub group_size: Option<u64>,
}

fn factorial(k: usize) -> Option<u64> {
    (1..=k as u64).try_fold(1u64, |acc, x| acc.checked_mul(x))
}

/// Order of the symmetry group acting on inequalities of this space.
pub fn group_size(space: Space) -> Option<u64> {
    match space {
        Space::Correlation { m, n } => {
            let base = factorial(m)?.checked_mul(factorial(n)?)?.checked_mul(1u64.checked_shl((m + n) as u32)?)?;
            if m == n {
                base.checked_mul(2)
            } else {
                Some(base)
            }
        }
        Space::Complete { alice, bob } => {
            let k = alice + bob;
            factorial(k)?.checked_mul(1u64.checked_shl(k.saturating_sub(1) as u32)?)
        }
        _ => None,
    }
}

/// Rearranges to the next permutation in lexicographic order.
fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let Some(i) = (0..p.len() - 1).rev().find(|&i| p[i] < p[i + 1]) else {
        return false;
    };
    let j = (i + 1..p.len()).rev().find(|&j| p[j] > p[i]).unwrap();
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

fn transpose(a: &[i64], m: usize, n: usize) -> Vec<i64> {
    let mut t = vec![0; m * n];
    for i in 0..m {
        for j in 0..n {
            t[j * m + i] = a[i * n + j];
        }
    }
    t
}

fn correlation_exhaustive(a: &[i64], m: usize, n: usize) -> (Vec<i64>, u64) {
    let mut best: Option<Vec<i64>> = None;
    let mut stabilizer = 0u64;
    let mut cand = vec![0i64; m * n];
    let mut rows = vec![0i64; m * n];
    let bases: Vec<Vec<i64>> = if m == n { vec![a.to_vec(), transpose(a, m, n)] } else { vec![a.to_vec()] };
    for base in &bases {
        let mut sigma: Vec<usize> = (0..m).collect();
        loop {
            for eps in 0..1u32 << m {
                for i in 0..m {
                    let s = if eps >> i & 1 == 1 { -1 } else { 1 };
                    for j in 0..n {
                        rows[i * n + j] = s * base[sigma[i] * n + j];
                    }
                }
                let mut tau: Vec<usize> = (0..n).collect();
                loop {
                    for eta in 0..1u32 << n {
                        for i in 0..m {
                            for j in 0..n {
                                let s = if eta >> j & 1 == 1 { -1 } else { 1 };
                                cand[i * n + j] = s * rows[i * n + tau[j]];
                            }
                        }
                        if cand == a {
                            stabilizer += 1;
                        }
                        if best.as_ref().is_none_or(|b| cand < *b) {
                            best = Some(cand.clone());
                        }
                    }
                    if !next_permutation(&mut tau) {
                        break;
                    }
                }
            }
            if !next_permutation(&mut sigma) {
                break;
            }
        }
    }
    (best.unwrap_or_default(), stabilizer)
}

/// Lexicographically least arrangement of the columns of `rows` under
/// column permutations and column sign changes: each column gets its first
/// nonzero entry negative, then columns are sorted as vectors.
fn best_columns(rows: &[i64], m: usize, n: usize) -> Vec<i64> {
    let mut cols: Vec<Vec<i64>> = (0..n)
        .map(|j| {
            let mut c: Vec<i64> = (0..m).map(|i| rows[i * n + j]).collect();
            if c.iter().find(|&&v| v != 0).is_some_and(|&v| v > 0) {
                c.iter_mut().for_each(|v| *v = -*v);
            }
            c
        })
        .collect();
    cols.sort();
    let mut out = vec![0; m * n];
    for (j, c) in cols.iter().enumerate() {
        for i in 0..m {
            out[i * n + j] = c[i];
        }
    }
    out
}

fn correlation_pruned(a: &[i64], m: usize, n: usize) -> Vec<i64> {
    let bases: Vec<Vec<i64>> = if m == n { vec![a.to_vec(), transpose(a, m, n)] } else { vec![a.to_vec()] };
    let mut best: Option<Vec<i64>> = None;
    let mut rows = vec![0i64; m * n];
    for base in &bases {
        let mut sigma: Vec<usize> = (0..m).collect();
        loop {
            // Flipping every row is undone by flipping every column.
            for eps in 0..1u32 << m.saturating_sub(1) {
                for i in 0..m {
                    let s = if i > 0 && eps >> (i - 1) & 1 == 1 { -1 } else { 1 };
                    for j in 0..n {
                        rows[i * n + j] = s * base[sigma[i] * n + j];
                    }
                }
                let cand = best_columns(&rows, m, n);
                if best.as_ref().is_none_or(|b| cand < *b) {
                    best = Some(cand);
                }
            }
            if !next_permutation(&mut sigma) {
                break;
            }
        }
    }
    best.unwrap_or_default()
}

fn complete_exhaustive(a: &[i64], shape: CompleteShape) -> (Vec<i64>, u64) {
    let k = shape.order();
    let mut adj = vec![0i64; k * k];
    for p in 0..k {
        for q in p + 1..k {
            let v = a[shape.pair_index(p, q)];
            adj[p * k + q] = v;
            adj[q * k + p] = v;
        }
    }
    let mut best: Option<Vec<i64>> = None;
    let mut stabilizer = 0u64;
    let mut cand = vec![0i64; a.len()];
    let mut pi: Vec<usize> = (0..k).collect();
    loop {
        for sw in 0..1u32 << k.saturating_sub(1) {
            let sign = |p: usize| if p > 0 && sw >> (p - 1) & 1 == 1 { -1 } else { 1 };
            let mut e = 0;
            for p in 0..k {
                for q in p + 1..k {
                    cand[e] = sign(p) * sign(q) * adj[pi[p] * k + pi[q]];
                    e += 1;
                }
            }
            if cand == a {
                stabilizer += 1;
            }
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand.clone());
            }
        }
        if !next_permutation(&mut pi) {
            break;
        }
    }
    (best.unwrap_or_default(), stabilizer)
}

/// Canonical representative of the orbit of `ineq` (after normalization
/// to coprime integers).
pub fn canonicalize(ineq: &LinearInequality, how: Canonicalization) -> Result<Canonical> {
    let (a, rhs) = ineq.integer_coefficients()?;
    let group = group_size(ineq.space);
    let guard = |max_group: u64| -> Result<()> {
        match group {
            Some(g) if g <= max_group => Ok(()),
            _ => Err(Error::TooLarge(format!(
                "symmetry group of {} has {} elements, above the exhaustive limit {max_group}; use the pruned search",
                ineq.space,
                group.map_or("more than 2^64".to_string(), |g| g.to_string())
            ))),
        }
    };
    let (form, orbit_size) = match (ineq.space, how) {
        (Space::Correlation { m, n }, Canonicalization::Exhaustive { max_group }) => {
            guard(max_group)?;
            let (f, stab) = correlation_exhaustive(&a, m, n);
            (f, group.map(|g| g / stab))
        }
        (Space::Correlation { m, n }, Canonicalization::Pruned) => (correlation_pruned(&a, m, n), None),
        (Space::Complete { alice, bob }, how) => {
            let max_group = match how {
                Canonicalization::Exhaustive { max_group } => max_group,
                Canonicalization::Pruned => DEFAULT_MAX_GROUP,
            };
            guard(max_group)?;
            let (f, stab) = complete_exhaustive(&a, CompleteShape { alice, bob });
            (f, group.map(|g| g / stab))
        }
        (space, _) => {
            return Err(Error::Invalid(format!(
                "canonical forms are defined for correlation and complete spaces, got {space}"
            )))
        }
    };
    let form = LinearInequality::new(ineq.space, form.into_iter().map(rat).collect(), rat(rhs))?;
    Ok(Canonical { form, orbit_size, group_size: group })
}

/// Exhaustive canonical form with the default group-size guard.
pub fn canonical_form(ineq: &LinearInequality) -> Result<LinearInequality> {
    canonicalize(ineq, Canonicalization::default()).map(|c| c.form)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceClass {
    pub representative: LinearInequality,
    /// Indices into the input list.
    pub members: Vec<usize>,
    pub orbit_size: Option<u64>,
}

/// Groups inequalities of one space by canonical form. Classes are listed
/// by first occurrence in the input.
pub fn classify(ineqs: &[LinearInequality], how: Canonicalization) -> Result<Vec<EquivalenceClass>> {
    if let Some(first) = ineqs.first() {
        if let Some(other) = ineqs.iter().find(|q| q.space != first.space) {
            return Err(Error::Invalid(format!("mixed shapes: {} and {}", first.space, other.space)));
        }
    }
    let forms: Vec<Canonical> = ineqs.par_iter().map(|q| canonicalize(q, how)).collect::<Result<_>>()?;
    let mut index: HashMap<LinearInequality, usize> = HashMap::new();
    let mut classes: Vec<EquivalenceClass> = Vec::new();
    for (k, c) in forms.into_iter().enumerate() {
        match index.get(&c.form) {
            Some(&slot) => classes[slot].members.push(k),
            None => {
                index.insert(c.form.clone(), classes.len());
                classes.push(EquivalenceClass { representative: c.form, members: vec![k], orbit_size: c.orbit_size });
            }
        }
    }
    Ok(classes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inequalities::catalog;

    #[test]
    fn permutation_enumeration_counts() {
        let mut p: Vec<usize> = (0..4).collect();
        let mut count = 1;
        while next_permutation(&mut p) {
            count += 1;
        }
        assert_eq!(count, 24);
    }

    #[test]
    fn chsh_variants_share_a_form() {
        let chsh = catalog("chsh").unwrap();
        let g = SymmetryElement {
            row_perm: vec![1, 0],
            col_perm: vec![0, 1],
            transpose: false,
            row_signs: vec![1, 1],
            col_signs: vec![-1, 1],
        };
        let other = g.apply(&chsh).unwrap();
        assert_ne!(other, chsh);
        let c = canonicalize(&chsh, Canonicalization::default()).unwrap();
        assert_eq!(canonical_form(&other).unwrap(), c.form);
        assert_eq!(c.orbit_size, Some(8));
        assert_eq!(canonicalize(&chsh, Canonicalization::Pruned).unwrap().form, c.form);
    }

    #[test]
    fn gisin_forms_differ() {
        let a = canonical_form(&catalog("gisin-4a").unwrap()).unwrap();
        let b = canonical_form(&catalog("gisin-4b").unwrap()).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn guard_suggests_pruning() {
        let q = LinearInequality::correlation(&vec![vec![1; 6]; 6], 36).unwrap();
        let err = canonicalize(&q, Canonicalization::default()).unwrap_err();
        assert!(err.to_string().contains("pruned"), "{err}");
        assert!(canonicalize(&q, Canonicalization::Pruned).is_ok());
    }

    #[test]
    fn complete_forms_identify_relabelled_pentagonals() {
        let pent = catalog("pentagonal").unwrap();
        let c = canonicalize(&pent, Canonicalization::default()).unwrap();
        // The pentagonal orbit in Cut(K_5) has 16 members.
        assert_eq!(c.orbit_size, Some(16));
    }

    #[test]
    fn classify_rejects_mixed_shapes() {
        let qs = vec![catalog("chsh").unwrap(), catalog("gisin-4a").unwrap()];
        assert!(classify(&qs, Canonicalization::default()).is_err());
    }
}
