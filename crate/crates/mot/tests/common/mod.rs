//! Shared generators and exact-arithmetic oracles for the integration and
//! acceptance suites.
#![allow(dead_code)]

use mot::measures::DiscreteMeasure;
use mot::motlp::{
    build_mot_lp_with, coupling_from_lp_solution, ConcaveTable, CostSpec, Coupling,
};
use mot::simplex::{LpStatus, Sense, SimplexSolver};
use rand::Rng;

/// Random centered probability measure with `n` atoms in [-4, 4].
pub fn random_centered_measure<R: Rng>(rng: &mut R, n: usize) -> DiscreteMeasure {
    loop {
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.gen_range(-4.0..4.0), rng.gen_range(0.05..1.0)))
            .collect();
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        for p in &mut pairs {
            p.1 /= total;
        }
        let m = match DiscreteMeasure::from_pairs(pairs) {
            Ok(m) => m,
            Err(_) => continue,
        };
        let mean = m.mean().unwrap();
        let recentered: Vec<(f64, f64)> = m
            .atoms()
            .iter()
            .zip(m.weights())
            .map(|(&x, &w)| (x - mean, w))
            .collect();
        if let Ok(m) = DiscreteMeasure::from_pairs(recentered) {
            if m.len() == n {
                return m;
            }
        }
    }
}

/// Random `mu <=cx nu` built by mean-preserving spreads; `keep_some` leaves
/// part of each atom in place so the supports overlap.
pub fn random_convex_pair<R: Rng>(
    rng: &mut R,
    n: usize,
    keep_some: bool,
) -> (DiscreteMeasure, DiscreteMeasure) {
    let mu = random_centered_measure(rng, n);
    let mut pairs: Vec<(f64, f64)> = Vec::new();
    for (&x, &w) in mu.atoms().iter().zip(mu.weights()) {
        let keep = if keep_some { rng.gen_range(0.0..0.6) } else { 0.0 };
        if keep > 0.0 {
            pairs.push((x, w * keep));
        }
        let spread = w * (1.0 - keep);
        let left = x - rng.gen_range(0.3..2.0);
        let right = x + rng.gen_range(0.3..2.0);
        let frac_right = (x - left) / (right - left);
        pairs.push((left, spread * (1.0 - frac_right)));
        pairs.push((right, spread * frac_right));
    }
    let nu = DiscreteMeasure::from_pairs(pairs).unwrap();
    (mu, nu)
}

/// Random nested-supports pair: every atom of `mu` spreads fully to one
/// point at or left of `a` and one at or right of `b`.
pub fn random_nested_pair<R: Rng>(rng: &mut R, n: usize) -> (DiscreteMeasure, DiscreteMeasure) {
    let mu = random_centered_measure(rng, n);
    let a = *mu.atoms().first().unwrap();
    let b = *mu.atoms().last().unwrap();
    let mut pairs: Vec<(f64, f64)> = Vec::new();
    for (&x, &w) in mu.atoms().iter().zip(mu.weights()) {
        let left = a - rng.gen_range(0.0..2.0);
        let right = b + rng.gen_range(0.0..2.0);
        let frac_right = (x - left) / (right - left);
        pairs.push((left, w * (1.0 - frac_right)));
        pairs.push((right, w * frac_right));
    }
    let nu = DiscreteMeasure::from_pairs(pairs).unwrap();
    (mu, nu)
}

/// Random pair whose target keeps mass strictly inside the source hull, so
/// the nested supports condition fails.
pub fn random_non_nested_pair<R: Rng>(
    rng: &mut R,
    n: usize,
) -> (DiscreteMeasure, DiscreteMeasure) {
    loop {
        let (mu, nu) = random_convex_pair(rng, n, true);
        let a = *mu.atoms().first().unwrap();
        let b = *mu.atoms().last().unwrap();
        let interior = nu.cdf_left(b) - nu.cdf(a);
        if interior > 1e-3 {
            return (mu, nu);
        }
    }
}

/// Random increasing concave piecewise-linear cost on [0, span].
pub fn random_concave_cost<R: Rng>(rng: &mut R, span: f64) -> CostSpec {
    let k = rng.gen_range(3..6);
    let mut knots = vec![0.0];
    for i in 1..=k {
        knots.push(span * i as f64 / k as f64);
    }
    let mut slope = rng.gen_range(0.5..2.0);
    let mut values = vec![0.0];
    for i in 1..=k {
        values.push(values[i - 1] + slope * (knots[i] - knots[i - 1]));
        slope *= rng.gen_range(0.3..0.95);
    }
    CostSpec::ConcaveTable(ConcaveTable::new(knots, values).unwrap())
}

/// A random vertex of the martingale polytope: the optimal basic solution
/// for a random cell-wise objective.
pub fn random_vertex<R: Rng>(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    rng: &mut R,
    solver: &SimplexSolver,
) -> Coupling {
    let costs: Vec<f64> = (0..mu.len() * nu.len())
        .map(|_| rng.gen_range(-1.0..1.0))
        .collect();
    let nj = nu.len();
    let lp = build_mot_lp_with(mu, nu, |i, j, _, _| costs[i * nj + j], None);
    let sense = if rng.gen_bool(0.5) { Sense::Max } else { Sense::Min };
    let sol = solver.solve(&lp, sense).expect("vertex solve");
    assert_eq!(sol.status, LpStatus::Optimal);
    coupling_from_lp_solution(mu, nu, &sol.primal, 1e-10).expect("vertex coupling")
}

/// Exact rational LP utilities used as the independent simplex oracle.
pub mod rational {
    use num_bigint::BigInt;
    use num_rational::Ratio;
    use num_traits::{Signed, Zero};

    pub type Rat = Ratio<BigInt>;

    pub fn rat(x: f64) -> Rat {
        Rat::from_float(x).expect("finite float")
    }

    pub fn to_f64(r: &Rat) -> f64 {
        let num = r.numer();
        let den = r.denom();
        // Good enough for comparisons at 1e-9: go through strings only when
        // the parts are large.
        let nf = num.to_string().parse::<f64>().unwrap();
        let df = den.to_string().parse::<f64>().unwrap();
        nf / df
    }

    /// Reduce (rows, rhs) to an independent subsystem by Gaussian
    /// elimination. Returns `None` when the system is inconsistent.
    pub fn independent_rows(rows: &[Vec<Rat>], rhs: &[Rat]) -> Option<(Vec<Vec<Rat>>, Vec<Rat>)> {
        let m = rows.len();
        let n = rows[0].len();
        let mut aug: Vec<Vec<Rat>> = rows
            .iter()
            .zip(rhs)
            .map(|(r, b)| {
                let mut v = r.clone();
                v.push(b.clone());
                v
            })
            .collect();
        let mut kept: Vec<Vec<Rat>> = Vec::new();
        let mut pivot_cols: Vec<usize> = Vec::new();
        let mut row = 0usize;
        for col in 0..n {
            let Some(p) = (row..m).find(|&i| !aug[i][col].is_zero()) else {
                continue;
            };
            aug.swap(row, p);
            for i in 0..m {
                if i != row && !aug[i][col].is_zero() {
                    let f = &aug[i][col] / &aug[row][col];
                    for j in col..=n {
                        let t = &f * &aug[row][j];
                        aug[i][j] = &aug[i][j] - t;
                    }
                }
            }
            pivot_cols.push(col);
            row += 1;
            if row == m {
                break;
            }
        }
        for i in row..m {
            if aug[i][..n].iter().all(|v| v.is_zero()) && !aug[i][n].is_zero() {
                return None;
            }
        }
        for r in aug.iter().take(row) {
            kept.push(r[..n].to_vec());
        }
        let rhs_out: Vec<Rat> = aug.iter().take(row).map(|r| r[n].clone()).collect();
        Some((kept, rhs_out))
    }

    fn solve_square(mut a: Vec<Vec<Rat>>, mut b: Vec<Rat>) -> Option<Vec<Rat>> {
        let n = b.len();
        for k in 0..n {
            let p = (k..n).find(|&i| !a[i][k].is_zero())?;
            a.swap(k, p);
            b.swap(k, p);
            for i in k + 1..n {
                if a[i][k].is_zero() {
                    continue;
                }
                let f = &a[i][k] / &a[k][k];
                for j in k..n {
                    let t = &f * &a[k][j];
                    a[i][j] = &a[i][j] - t;
                }
                let t = &f * &b[k];
                b[i] = &b[i] - t;
            }
        }
        let mut x = vec![Rat::zero(); n];
        for i in (0..n).rev() {
            let mut s = b[i].clone();
            for j in i + 1..n {
                let t = &a[i][j] * &x[j];
                s = s - t;
            }
            x[i] = s / &a[i][i];
        }
        Some(x)
    }

    /// Exhaustive vertex enumeration over all basis subsets; returns the
    /// exact (min, max) objective over feasible vertices, or `None` when the
    /// system is inconsistent or no feasible vertex exists.
    pub fn vertex_optima(
        rows: &[Vec<Rat>],
        rhs: &[Rat],
        costs: &[Rat],
    ) -> Option<(Rat, Rat)> {
        let (rows, rhs) = independent_rows(rows, rhs)?;
        let r = rows.len();
        let n = costs.len();
        if r == 0 {
            return Some((Rat::zero(), Rat::zero()));
        }
        let mut subset: Vec<usize> = (0..r).collect();
        let mut best: Option<(Rat, Rat)> = None;
        loop {
            let b_cols: Vec<Vec<Rat>> = (0..r)
                .map(|i| subset.iter().map(|&j| rows[i][j].clone()).collect())
                .collect();
            if let Some(x) = solve_square(b_cols, rhs.clone()) {
                if x.iter().all(|v| !v.is_negative()) {
                    let mut val = Rat::zero();
                    for (pos, &j) in subset.iter().enumerate() {
                        val = val + &costs[j] * &x[pos];
                    }
                    best = Some(match best {
                        None => (val.clone(), val),
                        Some((lo, hi)) => {
                            (if val < lo { val.clone() } else { lo }, if val > hi { val } else { hi })
                        }
                    });
                }
            }
            // next r-combination of 0..n
            let mut i = r;
            loop {
                if i == 0 {
                    return best;
                }
                i -= 1;
                if subset[i] != i + n - r {
                    subset[i] += 1;
                    for k in i + 1..r {
                        subset[k] = subset[k - 1] + 1;
                    }
                    break;
                }
            }
        }
    }
}
