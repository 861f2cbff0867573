//! Two-phase revised simplex for small dense equality-form problems
//! `min/max c.x  s.t.  A x = b, x >= 0`.
//!
//! The basis is kept as a dense LU factorization with product-form eta
//! updates and a full refactorization every 64 pivots. Pricing is Dantzig's
//! rule with ties broken by lowest index; after `3 (m + n)` consecutive
//! degenerate pivots Bland's rule takes over until strict progress is made,
//! which guarantees termination. Dependent rows are harmless: their phase-1
//! artificial simply stays basic at level zero.

use crate::{Error, Result};

/// Equality-constrained LP with columns stored sparse. Rows may be linearly
/// dependent.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    nrows: usize,
    costs: Vec<f64>,
    cols: Vec<Vec<(usize, f64)>>,
    rhs: Vec<f64>,
}

impl LinearProgram {
    pub fn new(nrows: usize, rhs: Vec<f64>) -> Result<Self> {
        if rhs.len() != nrows {
            return Err(Error::BadParams("rhs length != nrows".into()));
        }
        if rhs.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            nrows,
            costs: Vec::new(),
            cols: Vec::new(),
            rhs,
        })
    }

    /// Append a variable; returns its index.
    pub fn add_column(&mut self, cost: f64, entries: &[(usize, f64)]) -> usize {
        debug_assert!(entries.iter().all(|&(i, v)| i < self.nrows && v.is_finite()));
        self.costs.push(cost);
        self.cols
            .push(entries.iter().copied().filter(|&(_, v)| v != 0.0).collect());
        self.cols.len() - 1
    }

    /// Build from dense rows (test-sized problems).
    pub fn from_dense(rows: &[Vec<f64>], rhs: Vec<f64>, costs: Vec<f64>) -> Result<Self> {
        let nrows = rows.len();
        let n = costs.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::BadParams("ragged constraint rows".into()));
        }
        let mut lp = Self::new(nrows, rhs)?;
        for j in 0..n {
            let entries: Vec<(usize, f64)> = (0..nrows)
                .filter(|&i| rows[i][j] != 0.0)
                .map(|i| (i, rows[i][j]))
                .collect();
            lp.add_column(costs[j], &entries);
        }
        Ok(lp)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn nvars(&self) -> usize {
        self.cols.len()
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Min,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective in the caller's sense; for `Infeasible` this is the phase-1
    /// infeasibility measure.
    pub value: f64,
    pub primal: Vec<f64>,
    /// Duals in original row order and caller's sense.
    pub duals: Vec<f64>,
    pub iterations: usize,
    pub max_residual: f64,
}

struct Lu {
    m: usize,
    a: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    fn factor(mut a: Vec<f64>, m: usize) -> Result<(Self, f64)> {
        let mut perm: Vec<usize> = (0..m).collect();
        for k in 0..m {
            let mut p = k;
            let mut best = a[k * m + k].abs();
            for i in k + 1..m {
                let v = a[i * m + k].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(Error::NumericalBreakdown("singular basis".into()));
            }
            if p != k {
                for j in 0..m {
                    a.swap(k * m + j, p * m + j);
                }
                perm.swap(k, p);
            }
            let akk = a[k * m + k];
            for i in k + 1..m {
                let l = a[i * m + k] / akk;
                a[i * m + k] = l;
                if l != 0.0 {
                    for j in k + 1..m {
                        a[i * m + j] -= l * a[k * m + j];
                    }
                }
            }
        }
        let mut dmax = 0.0f64;
        let mut dmin = f64::INFINITY;
        for k in 0..m {
            let d = a[k * m + k].abs();
            dmax = dmax.max(d);
            dmin = dmin.min(d);
        }
        let cond = if dmin > 0.0 { dmax / dmin } else { f64::INFINITY };
        Ok((Self { m, a, perm }, cond))
    }

    /// Solve `B x = b`.
    fn solve(&self, b: &[f64], out: &mut Vec<f64>) {
        let m = self.m;
        out.clear();
        out.extend(self.perm.iter().map(|&p| b[p]));
        for i in 0..m {
            let mut s = out[i];
            for j in 0..i {
                s -= self.a[i * m + j] * out[j];
            }
            out[i] = s;
        }
        for i in (0..m).rev() {
            let mut s = out[i];
            for j in i + 1..m {
                s -= self.a[i * m + j] * out[j];
            }
            out[i] = s / self.a[i * m + i];
        }
    }

    /// Solve `B^T y = c`.
    fn solve_t(&self, c: &[f64], out: &mut Vec<f64>) {
        let m = self.m;
        let mut w = vec![0.0; m];
        for i in 0..m {
            let mut s = c[i];
            for j in 0..i {
                s -= self.a[j * m + i] * w[j];
            }
            w[i] = s / self.a[i * m + i];
        }
        for i in (0..m).rev() {
            let mut s = w[i];
            for j in i + 1..m {
                s -= self.a[j * m + i] * w[j];
            }
            w[i] = s;
        }
        out.clear();
        out.resize(m, 0.0);
        for i in 0..m {
            out[self.perm[i]] = w[i];
        }
    }
}

struct Eta {
    r: usize,
    d: Vec<f64>,
}

const REFACTOR_EVERY: usize = 64;
const COND_LIMIT: f64 = 1e14;

/// Owns the mutable working memory of one solve; independent instances may
/// run concurrently.
pub struct SimplexSolver {
    pub feas_tol: f64,
    pub opt_tol: f64,
}

impl Default for SimplexSolver {
    fn default() -> Self {
        Self {
            feas_tol: 1e-9,
            opt_tol: 1e-9,
        }
    }
}

impl SimplexSolver {
    pub fn new(feas_tol: f64, opt_tol: f64) -> Self {
        Self { feas_tol, opt_tol }
    }

    pub fn solve(&self, lp: &LinearProgram, sense: Sense) -> Result<LpSolution> {
        if lp.costs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mut state = SolveState::new(lp, sense, self.feas_tol, self.opt_tol)?;
        state.run()
    }
}

struct SolveState<'a> {
    lp: &'a LinearProgram,
    sense: Sense,
    feas_tol: f64,
    opt_tol: f64,
    m: usize,
    n: usize,
    /// Row signs flipping the rhs nonnegative.
    sign: Vec<f64>,
    b: Vec<f64>,
    b_norm: f64,
    /// Sign-adjusted real columns; artificial i is implicit (unit vector i).
    cols: Vec<Vec<(usize, f64)>>,
    /// Internal minimization costs for real columns.
    cost2: Vec<f64>,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    xb: Vec<f64>,
    lu: Option<Lu>,
    etas: Vec<Eta>,
    iterations: usize,
    // scratch buffers
    y: Vec<f64>,
    d: Vec<f64>,
    scratch: Vec<f64>,
}

impl<'a> SolveState<'a> {
    fn new(lp: &'a LinearProgram, sense: Sense, feas_tol: f64, opt_tol: f64) -> Result<Self> {
        let m = lp.nrows;
        let n = lp.nvars();
        let sign: Vec<f64> = lp.rhs.iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }).collect();
        let b: Vec<f64> = lp.rhs.iter().map(|v| v.abs()).collect();
        let b_norm = b.iter().fold(0.0f64, |a, &v| a.max(v));
        let cols: Vec<Vec<(usize, f64)>> = lp
            .cols
            .iter()
            .map(|col| col.iter().map(|&(i, v)| (i, v * sign[i])).collect())
            .collect();
        let cost2: Vec<f64> = match sense {
            Sense::Min => lp.costs.clone(),
            Sense::Max => lp.costs.iter().map(|c| -c).collect(),
        };
        Ok(Self {
            lp,
            sense,
            feas_tol,
            opt_tol,
            m,
            n,
            sign,
            b,
            b_norm,
            cols,
            cost2,
            basis: (n..n + m).collect(),
            in_basis: vec![false; n],
            xb: Vec::new(),
            lu: None,
            etas: Vec::new(),
            iterations: 0,
            y: Vec::new(),
            d: Vec::new(),
            scratch: Vec::new(),
        })
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.n
    }

    fn column_entries(&self, j: usize) -> &[(usize, f64)] {
        &self.cols[j]
    }

    fn refactor(&mut self) -> Result<()> {
        let m = self.m;
        let mut dense = vec![0.0f64; m * m];
        for (pos, &j) in self.basis.iter().enumerate() {
            if self.is_artificial(j) {
                dense[(j - self.n) * m + pos] = 1.0;
            } else {
                for &(i, v) in &self.cols[j] {
                    dense[i * m + pos] = v;
                }
            }
        }
        let (lu, cond) = Lu::factor(dense, m)?;
        if cond > COND_LIMIT {
            return Err(Error::NumericalBreakdown(format!(
                "basis condition estimate {cond:.3e} exceeds {COND_LIMIT:.0e}"
            )));
        }
        self.lu = Some(lu);
        self.etas.clear();
        Ok(())
    }

    /// x := B^{-1} v.
    fn ftran(&mut self, v: &[f64], out_is_d: bool) {
        let lu = self.lu.as_ref().unwrap();
        let buf = if out_is_d { &mut self.d } else { &mut self.scratch };
        lu.solve(v, buf);
        for eta in &self.etas {
            let t = buf[eta.r] / eta.d[eta.r];
            for i in 0..self.m {
                if i != eta.r {
                    buf[i] -= eta.d[i] * t;
                }
            }
            buf[eta.r] = t;
        }
    }

    /// y := B^{-T} c.
    fn btran(&mut self, c: &mut Vec<f64>) {
        for eta in self.etas.iter().rev() {
            let mut s = 0.0;
            for i in 0..self.m {
                if i != eta.r {
                    s += eta.d[i] * c[i];
                }
            }
            c[eta.r] = (c[eta.r] - s) / eta.d[eta.r];
        }
        let lu = self.lu.as_ref().unwrap();
        lu.solve_t(c, &mut self.y);
        std::mem::swap(&mut self.y, c);
    }

    fn compute_xb(&mut self) {
        let b = self.b.clone();
        self.ftran(&b, false);
        self.xb = self.scratch.clone();
    }

    /// Basic-solution residual `b - B x_B` in the flipped row system.
    fn basic_residual(&self) -> Vec<f64> {
        let mut r = self.b.clone();
        for (pos, &j) in self.basis.iter().enumerate() {
            let x = self.xb[pos];
            if x == 0.0 {
                continue;
            }
            if self.is_artificial(j) {
                r[j - self.n] -= x;
            } else {
                for &(i, v) in &self.cols[j] {
                    r[i] -= v * x;
                }
            }
        }
        r
    }

    /// A couple of iterative refinement steps on the basic values; cheap and
    /// recovers accuracy lost to ill-conditioned bases.
    fn refine_xb(&mut self) {
        for _ in 0..2 {
            let r = self.basic_residual();
            let rnorm = r.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
            if rnorm <= 1e-14 * (1.0 + self.b_norm) {
                break;
            }
            self.ftran(&r, false);
            let dx = self.scratch.clone();
            for (x, d) in self.xb.iter_mut().zip(&dx) {
                *x += d;
            }
        }
    }

    fn phase_cost(&self, phase1: bool, j: usize) -> f64 {
        if self.is_artificial(j) {
            if phase1 {
                1.0
            } else {
                0.0
            }
        } else if phase1 {
            0.0
        } else {
            self.cost2[j]
        }
    }

    /// Core iteration loop; returns `None` at optimality or `Some(Unbounded)`.
    fn iterate(&mut self, phase1: bool) -> Result<Option<LpStatus>> {
        let cnorm = if phase1 {
            1.0
        } else {
            self.cost2.iter().fold(0.0f64, |a, &c| a.max(c.abs()))
        };
        let enter_tol = self.opt_tol * (1.0 + cnorm);
        let degen_tol = self.feas_tol * (1.0 + self.b_norm);
        let bland_after = 3 * (self.m + self.n);
        let max_iter = 50_000 + 20 * self.m;

        let mut degenerate_run = 0usize;
        let mut bland = false;

        loop {
            if self.iterations > max_iter {
                return Err(Error::IterationLimit("simplex"));
            }
            if self.etas.len() >= REFACTOR_EVERY {
                self.refactor()?;
                self.compute_xb();
            }

            // Duals for the current phase costs.
            let mut y: Vec<f64> = (0..self.m)
                .map(|i| self.phase_cost(phase1, self.basis[i]))
                .collect();
            self.btran(&mut y);

            // Pricing over real nonbasic columns.
            let mut entering: Option<usize> = None;
            let mut best_rc = -enter_tol;
            for j in 0..self.n {
                if self.in_basis[j] {
                    continue;
                }
                let mut rc = self.phase_cost(phase1, j);
                for &(i, v) in &self.cols[j] {
                    rc -= y[i] * v;
                }
                if rc < best_rc {
                    if bland {
                        entering = Some(j);
                        break;
                    }
                    best_rc = rc;
                    entering = Some(j);
                }
            }
            let q = match entering {
                Some(q) => q,
                None => return Ok(None),
            };

            // Direction d = B^{-1} a_q.
            let mut aq = vec![0.0; self.m];
            for &(i, v) in self.column_entries(q) {
                aq[i] = v;
            }
            self.ftran(&aq, true);
            let dnorm = self.d.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
            let piv_tol = 1e-9 * dnorm.max(1.0);

            // Ratio test. Rows holding a basic artificial must stay at zero,
            // so any nonzero pivot there leaves immediately (theta = 0);
            // that also drives leftover artificials out of the basis.
            let mut leave: Option<usize> = None;
            if !phase1 {
                for i in 0..self.m {
                    if self.is_artificial(self.basis[i]) && self.d[i].abs() > piv_tol {
                        leave = Some(i);
                        break;
                    }
                }
            }
            if leave.is_none() {
                // Two-pass (Harris-style) test: pass 1 bounds the step with
                // a small feasibility slack, pass 2 picks the largest pivot
                // within the bound. Under Bland's rule the slack is dropped
                // and ties resolve to the lowest basic variable index.
                let slack = if bland { 0.0 } else { degen_tol / 16.0 };
                let mut theta_max = f64::INFINITY;
                for i in 0..self.m {
                    let di = self.d[i];
                    if di > piv_tol && !(self.is_artificial(self.basis[i]) && !phase1) {
                        theta_max = theta_max.min((self.xb[i].max(0.0) + slack) / di);
                    }
                }
                if theta_max.is_infinite() {
                    return Ok(Some(LpStatus::Unbounded));
                }
                let mut best_piv = 0.0f64;
                for i in 0..self.m {
                    let di = self.d[i];
                    if di <= piv_tol || (self.is_artificial(self.basis[i]) && !phase1) {
                        continue;
                    }
                    let ratio = self.xb[i].max(0.0) / di;
                    if ratio > theta_max {
                        continue;
                    }
                    let better = match leave {
                        None => true,
                        Some(l) => {
                            if bland {
                                self.basis[i] < self.basis[l]
                            } else {
                                di.abs() > best_piv
                            }
                        }
                    };
                    if better {
                        leave = Some(i);
                        best_piv = di.abs();
                    }
                }
            }
            let r = match leave {
                Some(r) => r,
                None => return Ok(Some(LpStatus::Unbounded)),
            };
            let step = (self.xb[r].max(0.0) / self.d[r]).max(0.0);

            // Pivot: update basic values and record the eta.
            for i in 0..self.m {
                self.xb[i] -= step * self.d[i];
            }
            self.xb[r] = step;
            let old = self.basis[r];
            if !self.is_artificial(old) {
                self.in_basis[old] = false;
            }
            self.basis[r] = q;
            self.in_basis[q] = true;
            self.etas.push(Eta {
                r,
                d: std::mem::take(&mut self.d),
            });
            self.iterations += 1;

            if step <= degen_tol {
                degenerate_run += 1;
                if degenerate_run >= bland_after {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
                bland = false;
            }
        }
    }

    fn objective(&self, phase1: bool) -> f64 {
        self.basis
            .iter()
            .zip(&self.xb)
            .map(|(&j, &x)| self.phase_cost(phase1, j) * x)
            .sum()
    }

    fn run(&mut self) -> Result<LpSolution> {
        self.refactor()?;
        self.xb = self.b.clone();

        // Phase 1: minimize the sum of artificials.
        if let Some(LpStatus::Unbounded) = self.iterate(true)? {
            return Err(Error::SolverFailure("phase 1 unbounded".into()));
        }
        let infeas = self.objective(true);
        if infeas > self.feas_tol * (1.0 + self.b_norm) {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                value: infeas,
                primal: vec![0.0; self.n],
                duals: vec![0.0; self.m],
                iterations: self.iterations,
                max_residual: f64::NAN,
            });
        }

        // Pivot basic artificials out where a usable real pivot exists; rows
        // where none exists are dependent and keep their zero artificial.
        for pos in 0..self.m {
            if !self.is_artificial(self.basis[pos]) {
                continue;
            }
            let mut e = vec![0.0; self.m];
            e[pos] = 1.0;
            self.btran(&mut e);
            let mut pick: Option<(usize, f64)> = None;
            for j in 0..self.n {
                if self.in_basis[j] {
                    continue;
                }
                let mut v = 0.0;
                for &(i, a) in &self.cols[j] {
                    v += e[i] * a;
                }
                if v.abs() > 1e-7 && pick.map(|(_, pv)| v.abs() > pv).unwrap_or(true) {
                    pick = Some((j, v.abs()));
                }
            }
            if let Some((j, _)) = pick {
                let mut aq = vec![0.0; self.m];
                for &(i, v) in self.column_entries(j) {
                    aq[i] = v;
                }
                self.ftran(&aq, true);
                if self.d[pos].abs() <= 1e-10 {
                    continue;
                }
                self.basis[pos] = j;
                self.in_basis[j] = true;
                self.etas.push(Eta {
                    r: pos,
                    d: std::mem::take(&mut self.d),
                });
                self.xb[pos] = 0.0;
                self.iterations += 1;
                if self.etas.len() >= REFACTOR_EVERY {
                    self.refactor()?;
                    self.compute_xb();
                }
            }
        }

        // Phase 2.
        let status = match self.iterate(false)? {
            Some(LpStatus::Unbounded) => LpStatus::Unbounded,
            _ => LpStatus::Optimal,
        };
        if status == LpStatus::Unbounded {
            return Ok(LpSolution {
                status,
                value: match self.sense {
                    Sense::Min => f64::NEG_INFINITY,
                    Sense::Max => f64::INFINITY,
                },
                primal: vec![0.0; self.n],
                duals: vec![0.0; self.m],
                iterations: self.iterations,
                max_residual: f64::NAN,
            });
        }

        // Final cleanup: fresh factorization, re-solved and refined basic
        // values.
        self.refactor()?;
        self.compute_xb();
        self.refine_xb();

        let mut primal = vec![0.0; self.n];
        for (pos, &j) in self.basis.iter().enumerate() {
            if !self.is_artificial(j) {
                primal[j] = self.xb[pos].max(if self.xb[pos] > -self.feas_tol {
                    0.0
                } else {
                    self.xb[pos]
                });
            }
        }

        let mut y: Vec<f64> = (0..self.m)
            .map(|i| self.phase_cost(false, self.basis[i]))
            .collect();
        self.btran(&mut y);
        let mut duals: Vec<f64> = (0..self.m).map(|i| y[i] * self.sign[i]).collect();

        let mut value: f64 = (0..self.n).map(|j| self.cost2[j] * primal[j]).sum();
        if self.sense == Sense::Max {
            value = -value;
            for dual in &mut duals {
                *dual = -*dual;
            }
        }

        // Residual against the original system.
        let mut ax = vec![0.0f64; self.m];
        for (j, &xj) in primal.iter().enumerate() {
            if xj != 0.0 {
                for &(i, v) in &self.lp.cols[j] {
                    ax[i] += v * xj;
                }
            }
        }
        let mut max_residual = 0.0f64;
        for i in 0..self.m {
            max_residual = max_residual.max((ax[i] - self.lp.rhs[i]).abs());
        }
        for &xj in &primal {
            max_residual = max_residual.max(-xj);
        }

        Ok(LpSolution {
            status: LpStatus::Optimal,
            value,
            primal,
            duals,
            iterations: self.iterations,
            max_residual,
        })
    }
}
