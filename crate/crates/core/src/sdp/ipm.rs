//! Dense primal-dual interior-point method for block SDPs with one PSD
//! block and one nonnegative-orthant block.
//!
//! Primal: minimize `⟨C, X⟩ + c·x` subject to `⟨A_i, X⟩ + a_i·x = b_i`,
//! `X ⪰ 0`, `x ≥ 0`. Dual: maximize `b·y` subject to
//! `C − Σ y_i A_i = Z ⪰ 0`, `c − Σ y_i a_i = z ≥ 0`.
//!
//! Search directions are HKM with a Mehrotra predictor-corrector, started
//! from `X = Z = I`, `y = 0` and allowed to be infeasible along the way.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// One linear constraint: symmetric PSD-block coefficients listed as
/// upper-triangular entries `(r, c, v)` with `r ≤ c` (an off-diagonal entry
/// stands for both `(r, c)` and `(c, r)`), plus LP-block coefficients.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Constraint {
    pub psd: Vec<(usize, usize, f64)>,
    pub lp: Vec<(usize, f64)>,
    pub rhs: f64,
}

impl Constraint {
    /// `⟨A, X⟩` for a symmetric `X`.
    fn apply(&self, x: &DMatrix<f64>, xl: &DVector<f64>) -> f64 {
        let s: f64 =
            self.psd.iter().map(|&(r, c, v)| if r == c { v * x[(r, c)] } else { v * (x[(r, c)] + x[(c, r)]) }).sum();
        s + self.lp.iter().map(|&(k, v)| v * xl[k]).sum::<f64>()
    }

    /// Full list of matrix nonzeros, both triangles.
    fn entries(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(2 * self.psd.len());
        for &(r, c, v) in &self.psd {
            out.push((r, c, v));
            if r != c {
                out.push((c, r, v));
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Problem {
    pub psd_dim: usize,
    pub lp_dim: usize,
    pub c_psd: DMatrix<f64>,
    pub c_lp: DVector<f64>,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    pub max_iter: usize,
    /// Relative duality gap `|p − d| / (1 + |p| + |d|)`.
    pub gap_tol: f64,
    /// Relative primal and dual residual norms.
    pub feas_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { max_iter: 200, gap_tol: 1e-7, feas_tol: 1e-9 }
    }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ConvergenceReport {
    pub iterations: usize,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub relative_gap: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
}

#[derive(Clone, Debug)]
pub struct Iterate {
    pub x: DMatrix<f64>,
    pub xl: DVector<f64>,
    pub y: DVector<f64>,
    pub z: DMatrix<f64>,
    pub zl: DVector<f64>,
    pub report: ConvergenceReport,
}

const STEP_FRACTION: f64 = 0.98;

/// A stalled run still succeeds when its best iterate is within this
/// factor of every tolerance.
const STALL_ACCEPT: f64 = 10.0;

/// Iterations without a 10% gain in the worst tolerance ratio before the
/// run is declared stalled.
const STALL_ITERATIONS: usize = 20;

fn inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.component_mul(b).sum()
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Largest `α` (possibly infinite) keeping `X + α dX ⪰ 0`, given the
/// Cholesky factor of `X`.
fn max_step_psd(chol: &Cholesky<f64, nalgebra::Dyn>, dx: &DMatrix<f64>) -> f64 {
    if dx.is_empty() {
        return f64::INFINITY;
    }
    let l = chol.l();
    let Some(linv) = l.clone().try_inverse() else {
        return 0.0;
    };
    let s = symmetrize(&(&linv * dx * linv.transpose()));
    let lmin = SymmetricEigen::new(s).eigenvalues.min();
    if lmin >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lmin
    }
}

fn max_step_lp(x: &DVector<f64>, dx: &DVector<f64>) -> f64 {
    x.iter().zip(dx.iter()).filter(|(_, d)| **d < 0.0).map(|(v, d)| -v / d).fold(f64::INFINITY, f64::min)
}

impl Problem {
    fn m(&self) -> usize {
        self.constraints.len()
    }

    fn rhs(&self) -> DVector<f64> {
        DVector::from_iterator(self.m(), self.constraints.iter().map(|c| c.rhs))
    }

    fn a_op(&self, x: &DMatrix<f64>, xl: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.m(), self.constraints.iter().map(|c| c.apply(x, xl)))
    }

    fn a_adj(&self, y: &DVector<f64>) -> (DMatrix<f64>, DVector<f64>) {
        let mut s = DMatrix::zeros(self.psd_dim, self.psd_dim);
        let mut sl = DVector::zeros(self.lp_dim);
        for (c, &yi) in self.constraints.iter().zip(y.iter()) {
            for &(r, k, v) in &c.psd {
                s[(r, k)] += yi * v;
                if r != k {
                    s[(k, r)] += yi * v;
                }
            }
            for &(k, v) in &c.lp {
                sl[k] += yi * v;
            }
        }
        (s, sl)
    }

    fn check(&self) -> Result<()> {
        let (k, l) = (self.psd_dim, self.lp_dim);
        if self.c_psd.shape() != (k, k) || self.c_lp.len() != l {
            return Err(Error::Invalid("objective does not match the block sizes".into()));
        }
        for c in &self.constraints {
            if c.psd.iter().any(|&(r, q, _)| r > q || q >= k) || c.lp.iter().any(|&(q, _)| q >= l) {
                return Err(Error::Invalid("constraint entry outside its block".into()));
            }
        }
        Ok(())
    }

    /// Schur complement `M_ij = tr(A_i X A_j Z⁻¹) + Σ a_i a_j x/z`.
    fn schur(&self, x: &DMatrix<f64>, zinv: &DMatrix<f64>, ratio: &DVector<f64>) -> DMatrix<f64> {
        let m = self.m();
        let entries: Vec<Vec<(usize, usize, f64)>> = self.constraints.iter().map(Constraint::entries).collect();
        let mut out = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let mut s = 0.0;
                for &(p, q, v) in &entries[i] {
                    for &(r, t, w) in &entries[j] {
                        s += v * w * x[(q, r)] * zinv[(t, p)];
                    }
                }
                let ci = &self.constraints[i].lp;
                let cj = &self.constraints[j].lp;
                for &(k, v) in ci {
                    for &(k2, w) in cj {
                        if k == k2 {
                            s += v * w * ratio[k];
                        }
                    }
                }
                out[(i, j)] = s;
                out[(j, i)] = s;
            }
        }
        out
    }

    pub fn solve(&self, opts: &SolverOptions) -> Result<Iterate> {
        match self.best_iterate(opts)? {
            (it, true) => Ok(it),
            (it, false) => Err(Error::NonConvergence {
                iterations: it.report.iterations,
                primal: it.report.primal_objective,
                dual: it.report.dual_objective,
            }),
        }
    }

    /// Runs the method and returns the final iterate if it met the
    /// tolerances, else the best one seen, flagged `false`. Callers that
    /// only need a sign can often decide from the bracket of a stalled run.
    pub fn best_iterate(&self, opts: &SolverOptions) -> Result<(Iterate, bool)> {
        self.check()?;
        let (k, l, m) = (self.psd_dim, self.lp_dim, self.m());
        let b = self.rhs();
        let nu = (k + l).max(1) as f64;
        let b_norm = 1.0 + b.norm();
        let c_norm = 1.0 + (self.c_psd.norm().powi(2) + self.c_lp.norm_squared()).sqrt();

        let mut x = DMatrix::identity(k, k);
        let mut xl = DVector::from_element(l, 1.0);
        let mut z = DMatrix::identity(k, k);
        let mut zl = DVector::from_element(l, 1.0);
        let mut y = DVector::zeros(m);
        let mut best: Option<(f64, Iterate)> = None;
        let mut since_progress = 0;
        // `A Aᵀ`, used to pull each step back onto `A(dX) = r_p`.
        let gram = DMatrix::from_fn(m, m, |_, _| 0.0);
        let gram = (0..m).fold(gram, |mut g, i| {
            let (e, el) = self.a_adj(&DVector::from_fn(m, |r, _| if r == i { 1.0 } else { 0.0 }));
            g.set_column(i, &self.a_op(&e, &el));
            g
        });
        let gram_chol = Cholesky::new(gram);

        for iter in 0..=opts.max_iter {
            let (aty, atyl) = self.a_adj(&y);
            let rp = &b - self.a_op(&x, &xl);
            let rd = &self.c_psd - &z - aty;
            let rdl = &self.c_lp - &zl - atyl;
            let pobj = inner(&self.c_psd, &x) + self.c_lp.dot(&xl);
            let dobj = b.dot(&y);
            let report = ConvergenceReport {
                iterations: iter,
                primal_objective: pobj,
                dual_objective: dobj,
                relative_gap: (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs()),
                primal_infeasibility: rp.norm() / b_norm,
                dual_infeasibility: (rd.norm().powi(2) + rdl.norm_squared()).sqrt() / c_norm,
            };
            let merit = (report.relative_gap / opts.gap_tol)
                .max(report.primal_infeasibility / opts.feas_tol)
                .max(report.dual_infeasibility / opts.feas_tol);
            if merit <= 1.0 {
                return Ok((Iterate { x, xl, y, z, zl, report }, true));
            }
            if best.as_ref().is_some_and(|(m, _)| *m <= STALL_ACCEPT && merit > 1e3 * m) {
                break;
            }
            if best.as_ref().is_none_or(|(m, _)| merit < 0.9 * m) {
                since_progress = 0;
            } else {
                since_progress += 1;
                if since_progress >= STALL_ITERATIONS {
                    break;
                }
            }
            if best.as_ref().is_none_or(|(m, _)| merit < *m) {
                let it = Iterate { x: x.clone(), xl: xl.clone(), y: y.clone(), z: z.clone(), zl: zl.clone(), report };
                best = Some((merit, it));
            }
            if iter == opts.max_iter {
                break;
            }

            let mu = (inner(&x, &z) + xl.dot(&zl)) / nu;
            let Some(zchol) = Cholesky::new(z.clone()) else { break };
            let zinv = zchol.inverse();
            let ratio = xl.component_div(&zl);
            let mut schur = self.schur(&x, &zinv, &ratio);
            let scale = schur.diagonal().amax().max(1.0);
            let schur_chol = match Cholesky::new(schur.clone()) {
                Some(c) => c,
                None => {
                    for d in 0..m {
                        schur[(d, d)] += 1e-12 * scale;
                    }
                    match Cholesky::new(schur) {
                        Some(c) => c,
                        None => break,
                    }
                }
            };

            // Direction for complementarity target `rc` (matrix) and `rcl`.
            let direction = |rc: &DMatrix<f64>, rcl: &DVector<f64>| {
                let g = rc * &zinv - &x * &rd * &zinv;
                let gl = DVector::from_fn(l, |q, _| (rcl[q] - xl[q] * rdl[q]) / zl[q]);
                let rhs = &rp - self.a_op(&g, &gl);
                let mut dy = schur_chol.solve(&rhs);
                let assemble = |dy: &DVector<f64>| {
                    let (ady, adyl) = self.a_adj(dy);
                    let dz = &rd - &ady;
                    let dzl = &rdl - adyl;
                    let dx = symmetrize(&(&g + &x * &ady * &zinv));
                    let dxl = DVector::from_fn(l, |q, _| (rcl[q] - xl[q] * dzl[q]) / zl[q]);
                    (dx, dxl, dz, dzl)
                };
                let (mut dx, mut dxl, mut dz, mut dzl) = assemble(&dy);
                // Refine against the residual of the assembled step, which
                // drifts when the Schur matrix is badly conditioned.
                for _ in 0..2 {
                    let res = &rp - self.a_op(&dx, &dxl);
                    if res.norm() <= 1e-14 * b_norm {
                        break;
                    }
                    dy += schur_chol.solve(&res);
                    (dx, dxl, dz, dzl) = assemble(&dy);
                }
                if let Some(gc) = &gram_chol {
                    let (cx, cl) = self.a_adj(&gc.solve(&(&rp - self.a_op(&dx, &dxl))));
                    dx += cx;
                    dxl += cl;
                }
                (dx, dxl, dy, dz, dzl)
            };
            let xchol = Cholesky::new(x.clone());
            let step = |dx: &DMatrix<f64>, dxl: &DVector<f64>, dz: &DMatrix<f64>, dzl: &DVector<f64>| {
                let ap = xchol.as_ref().map_or(0.0, |c| max_step_psd(c, dx)).min(max_step_lp(&xl, dxl));
                let ad = max_step_psd(&zchol, dz).min(max_step_lp(&zl, dzl));
                ((STEP_FRACTION * ap).min(1.0), (STEP_FRACTION * ad).min(1.0))
            };

            let xz = &x * &z;
            let xzl = xl.component_mul(&zl);
            let (dxa, dxla, _, dza, dzla) = direction(&(-&xz), &(-&xzl));
            let (ap, ad) = step(&dxa, &dxla, &dza, &dzla);
            let mu_aff =
                (inner(&(&x + &dxa * ap), &(&z + &dza * ad)) + (&xl + &dxla * ap).dot(&(&zl + &dzla * ad))) / nu;
            let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

            let target = DMatrix::identity(k, k) * (sigma * mu) - &xz - &dxa * &dza;
            let targetl = DVector::from_fn(l, |q, _| sigma * mu - xzl[q] - dxla[q] * dzla[q]);
            let (mut dx, mut dxl, mut dy, mut dz, mut dzl) = direction(&target, &targetl);
            let (mut ap, mut ad) = step(&dx, &dxl, &dz, &dzl);
            if ap.min(ad) < 1e-8 {
                // The second-order term can point out of the cone near the
                // end; fall back to a pure centering step.
                let target = DMatrix::identity(k, k) * mu - &xz;
                let targetl = DVector::from_fn(l, |q, _| mu - xzl[q]);
                (dx, dxl, dy, dz, dzl) = direction(&target, &targetl);
                (ap, ad) = step(&dx, &dxl, &dz, &dzl);
            }
            if ap < 1e-12 && ad < 1e-12 {
                break;
            }
            x = symmetrize(&(&x + dx * ap));
            xl += dxl * ap;
            y += dy * ad;
            z = symmetrize(&(&z + dz * ad));
            zl += dzl * ad;
        }
        // Rounding in the last steps can push the residuals up again once
        // the Schur matrix degenerates; keep the best iterate seen.
        match best {
            Some((merit, it)) => Ok((it, merit <= STALL_ACCEPT)),
            None => Err(Error::NonConvergence { iterations: 0, primal: f64::NAN, dual: f64::NAN }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_maxcut() {
        // minimize -x01 over unit-diagonal 2x2 PSD: optimum -1.
        let c = DMatrix::from_row_slice(2, 2, &[0.0, -0.5, -0.5, 0.0]);
        let p = Problem {
            psd_dim: 2,
            lp_dim: 0,
            c_psd: c,
            c_lp: DVector::zeros(0),
            constraints: (0..2).map(|i| Constraint { psd: vec![(i, i, 1.0)], lp: vec![], rhs: 1.0 }).collect(),
        };
        let it = p.solve(&SolverOptions::default()).unwrap();
        assert!((it.report.primal_objective + 1.0).abs() < 1e-6, "{:?}", it.report);
    }

    #[test]
    fn lp_block_alone() {
        // minimize x0 + 2 x1 with x0 + x1 = 1, x ≥ 0: optimum 1.
        let p = Problem {
            psd_dim: 0,
            lp_dim: 2,
            c_psd: DMatrix::zeros(0, 0),
            c_lp: DVector::from_vec(vec![1.0, 2.0]),
            constraints: vec![Constraint { psd: vec![], lp: vec![(0, 1.0), (1, 1.0)], rhs: 1.0 }],
        };
        let it = p.solve(&SolverOptions::default()).unwrap();
        assert!((it.report.primal_objective - 1.0).abs() < 1e-6);
        assert!(it.xl[1].abs() < 1e-6);
    }

    #[test]
    fn iteration_cap_reports_bounds() {
        let c = DMatrix::from_row_slice(2, 2, &[0.0, -0.5, -0.5, 0.0]);
        let p = Problem {
            psd_dim: 2,
            lp_dim: 0,
            c_psd: c,
            c_lp: DVector::zeros(0),
            constraints: (0..2).map(|i| Constraint { psd: vec![(i, i, 1.0)], lp: vec![], rhs: 1.0 }).collect(),
        };
        let err = p.solve(&SolverOptions { max_iter: 2, ..Default::default() }).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { iterations: 2, .. }), "{err}");
    }
}
