//! Martingale optimal transport problems between discrete measures: LP
//! builders, solvers for both senses, coupling costs and distances.

use crate::couplings::DirectionalSplit;
use crate::measures::DiscreteMeasure;
use crate::order::convex_order;
use crate::simplex::{LinearProgram, LpStatus, Sense, SimplexSolver};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Entry mass below this is treated as solver noise when reading a coupling
/// off an LP solution.
pub const DEFAULT_DROP_TOL: f64 = 1e-10;

/// Increasing piecewise-linear concave function given by its knots, starting
/// at 0; evaluated with final-slope extrapolation beyond the last knot.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConcaveTable {
    knots: Vec<f64>,
    values: Vec<f64>,
}

impl ConcaveTable {
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.len() != values.len() || knots.len() < 2 {
            return Err(Error::BadParams("concave table needs >= 2 knots".into()));
        }
        if knots[0] != 0.0 {
            return Err(Error::BadParams("concave table must start at 0".into()));
        }
        let mut prev_slope = f64::INFINITY;
        for k in 1..knots.len() {
            if !(knots[k] > knots[k - 1]) || !(values[k] > values[k - 1]) {
                return Err(Error::BadParams(
                    "concave table knots and values must increase".into(),
                ));
            }
            let slope = (values[k] - values[k - 1]) / (knots[k] - knots[k - 1]);
            if slope > prev_slope * (1.0 + 1e-12) {
                return Err(Error::BadParams("concave table slopes must not increase".into()));
            }
            prev_slope = slope;
        }
        Ok(Self { knots, values })
    }

    pub fn evaluate(&self, z: f64) -> f64 {
        let n = self.knots.len();
        if z >= self.knots[n - 1] {
            let slope =
                (self.values[n - 1] - self.values[n - 2]) / (self.knots[n - 1] - self.knots[n - 2]);
            return self.values[n - 1] + slope * (z - self.knots[n - 1]);
        }
        let k = self.knots.partition_point(|&t| t <= z).max(1);
        let t = (z - self.knots[k - 1]) / (self.knots[k] - self.knots[k - 1]);
        self.values[k - 1] + t * (self.values[k] - self.values[k - 1])
    }
}

/// Cost function on displacement: `|x-y|^rho` or an increasing concave
/// piecewise-linear table applied to `|x-y|`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum CostSpec {
    Power(f64),
    ConcaveTable(ConcaveTable),
}

impl CostSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            CostSpec::Power(rho) if *rho > 0.0 && rho.is_finite() => Ok(()),
            CostSpec::Power(rho) => Err(Error::BadParams(format!("rho={rho} must be > 0"))),
            CostSpec::ConcaveTable(_) => Ok(()),
        }
    }

    pub fn evaluate(&self, x: f64, y: f64) -> f64 {
        let z = (x - y).abs();
        match self {
            CostSpec::Power(rho) => z.powf(*rho),
            CostSpec::ConcaveTable(t) => t.evaluate(z),
        }
    }
}

/// Sparse nonnegative mass on the product of the source and target atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    source: DiscreteMeasure,
    target: DiscreteMeasure,
    /// (source index, target index, mass), sorted by (i, j).
    entries: Vec<(usize, usize, f64)>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CouplingResiduals {
    pub row: f64,
    pub col: f64,
    /// max over rows of |sum_j pi_ij (y_j - x_i)| / w_i.
    pub martingale: f64,
}

impl Coupling {
    /// Aggregate duplicate cells and sort by (i, j). A cell is kept when its
    /// mass exceeds `drop_tol` relative to the smaller of its two marginal
    /// weights (with a 1e-15 absolute floor), so solver noise on heavy rows
    /// is removed without discarding genuinely light atoms.
    pub fn from_entries(
        source: DiscreteMeasure,
        target: DiscreteMeasure,
        mut entries: Vec<(usize, usize, f64)>,
        drop_tol: f64,
    ) -> Result<Self> {
        for &(i, j, m) in &entries {
            if i >= source.len() || j >= target.len() {
                return Err(Error::BadParams("coupling entry index out of range".into()));
            }
            if !m.is_finite() || m < -drop_tol.max(1e-12) {
                return Err(Error::BadParams(format!("bad coupling mass {m}")));
            }
        }
        entries.sort_by_key(|&(i, j, _)| (i, j));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(entries.len());
        for (i, j, m) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += m,
                _ => merged.push((i, j, m)),
            }
        }
        merged.retain(|&(i, j, m)| {
            let floor = (drop_tol * source.weights()[i].min(target.weights()[j])).max(1e-15);
            m > floor
        });
        Ok(Self {
            source,
            target,
            entries: merged,
        })
    }

    /// The identity coupling of a measure with itself.
    pub fn identity(m: &DiscreteMeasure) -> Self {
        let entries = (0..m.len()).map(|i| (i, i, m.weights()[i])).collect();
        Self {
            source: m.clone(),
            target: m.clone(),
            entries,
        }
    }

    /// The product coupling `source (x) target / mass(target)`.
    pub fn product(source: &DiscreteMeasure, target: &DiscreteMeasure) -> Self {
        let mut entries = Vec::with_capacity(source.len() * target.len());
        for i in 0..source.len() {
            for j in 0..target.len() {
                entries.push((
                    i,
                    j,
                    source.weights()[i] * target.weights()[j] / target.mass(),
                ));
            }
        }
        Self {
            source: source.clone(),
            target: target.clone(),
            entries,
        }
    }

    pub fn source(&self) -> &DiscreteMeasure {
        &self.source
    }

    pub fn target(&self) -> &DiscreteMeasure {
        &self.target
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn mass(&self) -> f64 {
        self.entries.iter().map(|e| e.2).sum()
    }

    /// Support as (x, y, mass) triples in row-major order.
    pub fn support(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.entries
            .iter()
            .map(|&(i, j, m)| (self.source.atoms()[i], self.target.atoms()[j], m))
    }

    pub fn residuals(&self) -> CouplingResiduals {
        let mut row_sum = vec![0.0f64; self.source.len()];
        let mut col_sum = vec![0.0f64; self.target.len()];
        let mut mart = vec![0.0f64; self.source.len()];
        for &(i, j, m) in &self.entries {
            row_sum[i] += m;
            col_sum[j] += m;
            mart[i] += m * (self.target.atoms()[j] - self.source.atoms()[i]);
        }
        let row = row_sum
            .iter()
            .zip(self.source.weights())
            .fold(0.0f64, |a, (s, w)| a.max((s - w).abs()));
        let col = col_sum
            .iter()
            .zip(self.target.weights())
            .fold(0.0f64, |a, (s, w)| a.max((s - w).abs()));
        // Rows lighter than 1e-2 are judged on absolute residual at that
        // scale: solver noise is absolute, so per-row relative accuracy is
        // unattainable on weights near the feasibility tolerance.
        let martingale = mart
            .iter()
            .zip(self.source.weights())
            .fold(0.0f64, |a, (r, w)| a.max(r.abs() / w.max(1e-2)));
        CouplingResiduals {
            row,
            col,
            martingale,
        }
    }

    /// Check marginal and (per-row, weight-relative) martingale residuals
    /// against `tol * scale`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let scale = self.source.scale().max(self.target.scale());
        let r = self.residuals();
        if r.row > tol * scale || r.col > tol * scale || r.martingale > tol * scale {
            return Err(Error::SolverFailure(format!(
                "coupling residuals row={:.3e} col={:.3e} mart={:.3e} exceed {:.3e}",
                r.row,
                r.col,
                r.martingale,
                tol * scale
            )));
        }
        Ok(())
    }

    pub fn cost(&self, cost: &CostSpec) -> f64 {
        self.support().map(|(x, y, m)| m * cost.evaluate(x, y)).sum()
    }

    /// Distance on the union of the two supports, matching cells by exact
    /// (x, y) coordinates.
    pub fn distance(&self, other: &Coupling, norm: CouplingNorm) -> f64 {
        let mut a: Vec<(f64, f64, f64)> = self.support().collect();
        let mut b: Vec<(f64, f64, f64)> = other.support().collect();
        let key = |p: &(f64, f64, f64), q: &(f64, f64, f64)| {
            p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1))
        };
        a.sort_by(key);
        b.sort_by(key);
        let (mut i, mut j) = (0, 0);
        let mut acc = 0.0f64;
        let mut push = |d: f64| match norm {
            CouplingNorm::Tv => acc += d.abs(),
            CouplingNorm::Frobenius => acc += d * d,
        };
        while i < a.len() || j < b.len() {
            if j >= b.len() {
                push(a[i].2);
                i += 1;
            } else if i >= a.len() {
                push(-b[j].2);
                j += 1;
            } else {
                match key(&a[i], &b[j]) {
                    std::cmp::Ordering::Less => {
                        push(a[i].2);
                        i += 1;
                    }
                    std::cmp::Ordering::Greater => {
                        push(-b[j].2);
                        j += 1;
                    }
                    std::cmp::Ordering::Equal => {
                        push(a[i].2 - b[j].2);
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
        match norm {
            CouplingNorm::Tv => 0.5 * acc,
            CouplingNorm::Frobenius => acc.sqrt(),
        }
    }

    /// CSV with header `x,y,mass`, rows sorted by (x, y).
    pub fn to_csv(&self) -> String {
        let mut rows: Vec<(f64, f64, f64)> = self.support().collect();
        rows.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)));
        let mut out = String::from("x,y,mass\n");
        for (x, y, m) in rows {
            out.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", x, y, m));
        }
        out
    }

    /// Parse the CSV form; the marginals are recovered from row and column
    /// sums of the listed cells.
    pub fn from_csv(s: &str) -> Result<Self> {
        let mut cells: Vec<(f64, f64, f64)> = Vec::new();
        for (ln, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line == "x,y,mass" {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(Error::Parse(format!("line {}: expected x,y,mass", ln + 1)));
            }
            let parse = |t: &str| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", ln + 1)))
            };
            cells.push((parse(fields[0])?, parse(fields[1])?, parse(fields[2])?));
        }
        Self::from_cells(cells)
    }

    fn from_cells(cells: Vec<(f64, f64, f64)>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::Empty("coupling cells"));
        }
        let mut xs: Vec<f64> = cells.iter().map(|c| c.0).collect();
        xs.sort_by(|a, b| a.total_cmp(b));
        xs.dedup();
        let mut ys: Vec<f64> = cells.iter().map(|c| c.1).collect();
        ys.sort_by(|a, b| a.total_cmp(b));
        ys.dedup();
        let idx = |v: &[f64], t: f64| v.binary_search_by(|p| p.total_cmp(&t)).unwrap();
        let mut row_w = vec![0.0f64; xs.len()];
        let mut col_w = vec![0.0f64; ys.len()];
        let mut entries = Vec::with_capacity(cells.len());
        let mut sorted = cells;
        sorted.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)));
        for (x, y, m) in sorted {
            if !(m > 0.0) {
                return Err(Error::NonpositiveWeight);
            }
            let (i, j) = (idx(&xs, x), idx(&ys, y));
            row_w[i] += m;
            col_w[j] += m;
            entries.push((i, j, m));
        }
        let source = DiscreteMeasure::new(xs, row_w)?;
        let target = DiscreteMeasure::new(ys, col_w)?;
        Self::from_entries(source, target, entries, 0.0)
    }

    pub fn to_json(&self) -> String {
        let cells: Vec<CellJson> = self
            .support()
            .map(|(x, y, mass)| CellJson { x, y, mass })
            .collect();
        let j = CouplingJson {
            source: serde_json::from_str(&self.source.to_json()).unwrap(),
            target: serde_json::from_str(&self.target.to_json()).unwrap(),
            entries: cells,
            diagnostics: self.residuals(),
        };
        serde_json::to_string_pretty(&j).expect("coupling serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: CouplingJson = serde_json::from_str(s)?;
        let source = DiscreteMeasure::from_json(&serde_json::to_string(&j.source)?)?;
        let target = DiscreteMeasure::from_json(&serde_json::to_string(&j.target)?)?;
        let find = |m: &DiscreteMeasure, t: f64| {
            m.atoms()
                .binary_search_by(|p| p.total_cmp(&t))
                .map_err(|_| Error::Parse(format!("cell coordinate {t} is not an atom")))
        };
        let mut entries = Vec::with_capacity(j.entries.len());
        for c in &j.entries {
            entries.push((find(&source, c.x)?, find(&target, c.y)?, c.mass));
        }
        Self::from_entries(source, target, entries, 0.0)
    }
}

#[derive(Serialize, Deserialize)]
struct CellJson {
    x: f64,
    y: f64,
    mass: f64,
}

#[derive(Serialize, Deserialize)]
struct CouplingJson {
    source: serde_json::Value,
    target: serde_json::Value,
    entries: Vec<CellJson>,
    diagnostics: CouplingResiduals,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingNorm {
    Tv,
    Frobenius,
}

/// Result of a martingale transport solve.
#[derive(Debug, Clone)]
pub struct SolveReport {
    /// Cost of the reported coupling (consistent with `coupling` by
    /// construction; the raw LP objective is in `lp_value`).
    pub value: f64,
    pub coupling: Coupling,
    pub sense: Sense,
    pub cost: CostSpec,
    pub lp_value: f64,
    pub iterations: usize,
    pub max_residual: f64,
}

/// LP over the full source x target grid: row sums, column sums (last one
/// dropped as redundant), and one martingale equality per source atom.
pub fn build_mot_lp(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    cost: &CostSpec,
    split: Option<&DirectionalSplit>,
) -> LinearProgram {
    build_mot_lp_with(mu, nu, |_, _, x, y| cost.evaluate(x, y), split)
}

/// Same constraint system with an arbitrary per-cell objective
/// `(i, j, x_i, y_j) -> cost`; useful for sampling polytope vertices or
/// targeting a single cell.
pub fn build_mot_lp_with(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    cost_fn: impl Fn(usize, usize, f64, f64) -> f64,
    split: Option<&DirectionalSplit>,
) -> LinearProgram {
    let ni = mu.len();
    let nj = nu.len();
    let mut rhs: Vec<f64> = Vec::new();
    rhs.extend_from_slice(mu.weights());
    rhs.extend_from_slice(&nu.weights()[..nj - 1]);
    rhs.extend(std::iter::repeat(0.0).take(ni));
    if let Some(split) = split {
        for &y in nu.atoms() {
            rhs.push(split.nu_l.mass_at(y));
        }
        for &y in nu.atoms() {
            rhs.push(split.nu_r.mass_at(y));
        }
    }
    let mut lp = LinearProgram::new(rhs.len(), rhs).expect("finite rhs");
    let col_base = ni;
    let mart_base = ni + nj - 1;
    let dir_base = mart_base + ni;
    for i in 0..ni {
        let x = mu.atoms()[i];
        // Scale each martingale row to unit coefficient range.
        let row_scale = nu
            .atoms()
            .iter()
            .fold(0.0f64, |a, &y| a.max((y - x).abs()))
            .max(1e-300);
        for j in 0..nj {
            let y = nu.atoms()[j];
            let mut entries = vec![(i, 1.0)];
            if j + 1 < nj {
                entries.push((col_base + j, 1.0));
            }
            if y != x {
                entries.push((mart_base + i, (y - x) / row_scale));
            }
            if split.is_some() {
                if y < x {
                    entries.push((dir_base + j, 1.0));
                } else if y > x {
                    entries.push((dir_base + nj + j, 1.0));
                }
            }
            lp.add_column(cost_fn(i, j, x, y), &entries);
        }
    }
    lp
}

/// Read a coupling off a primal vector of the grid LP (row-major cells).
pub fn coupling_from_lp_solution(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    primal: &[f64],
    drop_tol: f64,
) -> Result<Coupling> {
    let nj = nu.len();
    let entries: Vec<(usize, usize, f64)> = primal
        .iter()
        .enumerate()
        .filter(|&(_, &m)| m > 1e-15)
        .map(|(k, &m)| (k / nj, k % nj, m))
        .collect();
    Coupling::from_entries(mu.clone(), nu.clone(), entries, drop_tol)
}

fn solve_lp_to_report(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    cost: &CostSpec,
    sense: Sense,
    split: Option<&DirectionalSplit>,
    solver: &SimplexSolver,
) -> Result<SolveReport> {
    cost.validate()?;
    let lp = build_mot_lp(mu, nu, cost, split);
    let sol = solver.solve(&lp, sense)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => {
            return Err(if split.is_some() {
                Error::InfeasibleSplit(format!("phase-1 infeasibility {:.3e}", sol.value))
            } else {
                Error::SolverFailure("martingale polytope empty".into())
            })
        }
        LpStatus::Unbounded => {
            return Err(Error::SolverFailure("unbounded transport problem".into()))
        }
    }
    let coupling = coupling_from_lp_solution(mu, nu, &sol.primal, DEFAULT_DROP_TOL)?;
    coupling.validate(1e-8)?;
    Ok(SolveReport {
        value: coupling.cost(cost),
        coupling,
        sense,
        cost: cost.clone(),
        lp_value: sol.value,
        iterations: sol.iterations,
        max_residual: sol.max_residual,
    })
}

/// Solve `sup` / `inf` of `int cost dpi` over martingale couplings of
/// `(mu, nu)`. Requires `mu <=cx nu`.
pub fn solve_mot(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    cost: &CostSpec,
    sense: Sense,
    solver: &SimplexSolver,
) -> Result<SolveReport> {
    if !convex_order(mu, nu, 1e-9).holds {
        return Err(Error::NotConvexOrdered);
    }
    solve_lp_to_report(mu, nu, cost, sense, None, solver)
}

/// Solve over the couplings whose directional decomposition matches `split`:
/// per target atom, the mass arriving from above equals `nu_l`, from below
/// equals `nu_r`, and straight mass equals `nu_0` (implied by the column
/// sum).
pub fn solve_mot_directional(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    split: &DirectionalSplit,
    cost: &CostSpec,
    sense: Sense,
    solver: &SimplexSolver,
) -> Result<SolveReport> {
    split.validate_against(nu, 1e-9)?;
    solve_lp_to_report(mu, nu, cost, sense, Some(split), solver)
}

/// `int cost dpi` of an explicit coupling.
pub fn coupling_cost(pi: &Coupling, cost: &CostSpec) -> f64 {
    pi.cost(cost)
}

/// TV or Frobenius distance between couplings on the union of supports.
pub fn coupling_distance(a: &Coupling, b: &Coupling, norm: CouplingNorm) -> f64 {
    a.distance(b, norm)
}
