//! Convex order, stochastic order, and the convex order join of two centered
//! probability measures.

use crate::measures::DiscreteMeasure;
use crate::util::merge_sorted_atoms;
use crate::{Error, Result};

/// Outcome of an order check: `holds` iff `worst_gap >= -tol * scale`, with
/// `witness` the test point attaining the worst (signed) gap.
#[derive(Debug, Clone, Copy)]
pub struct OrderReport {
    pub holds: bool,
    pub worst_gap: f64,
    pub witness: f64,
}

fn union_atoms(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Vec<f64> {
    let mut xs: Vec<f64> = mu.atoms().iter().chain(nu.atoms()).copied().collect();
    xs.sort_by(|a, b| a.total_cmp(b));
    xs.dedup();
    xs
}

/// Check `mu <=cx nu` by comparing potential functions at the union of the
/// atoms. Both potentials are piecewise linear with knots only at atoms, so
/// dominance there is dominance everywhere; two sentinel points beyond the
/// hull turn a mean mismatch into a negative gap as well.
pub fn convex_order(mu: &DiscreteMeasure, nu: &DiscreteMeasure, tol: f64) -> OrderReport {
    let scale = mu.scale().max(nu.scale());
    let mut points = union_atoms(mu, nu);
    if let (Some(&first), Some(&last)) = (points.first(), points.last()) {
        points.push(first - 1.0);
        points.push(last + 1.0);
    }
    let mut worst = f64::INFINITY;
    let mut witness = f64::NAN;
    for &x in &points {
        let gap = nu.potential(x) - mu.potential(x);
        if gap < worst {
            worst = gap;
            witness = x;
        }
    }
    OrderReport {
        holds: worst >= -tol * scale,
        worst_gap: worst,
        witness,
    }
}

/// Check `mu <=st nu`, i.e. `F_mu >= F_nu` everywhere; CDFs only change at
/// atoms, so the union of atoms is a sufficient test set.
pub fn stochastic_order(mu: &DiscreteMeasure, nu: &DiscreteMeasure, tol: f64) -> OrderReport {
    let points = union_atoms(mu, nu);
    let mut worst = f64::INFINITY;
    let mut witness = f64::NAN;
    for &x in &points {
        let gap = mu.cdf(x) - nu.cdf(x);
        if gap < worst {
            worst = gap;
            witness = x;
        }
    }
    OrderReport {
        holds: worst >= -tol,
        worst_gap: worst,
        witness,
    }
}

/// Convex order join `mu \/cx nu` of two centered probability measures: the
/// measure whose potential is the pointwise maximum of the two potentials.
///
/// Knots are the union of the atoms plus crossing points of the piecewise
/// linear potentials; the atom mass at each knot is half the slope jump of
/// the max-potential there. Crossings within `1e-12 * span` of a knot snap
/// to it, and reconstructed atoms below `1e-14` mass are dropped with their
/// mass pushed into the neighbors preserving the mean.
pub fn convex_join(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<DiscreteMeasure> {
    if !mu.is_probability(1e-12) || !nu.is_probability(1e-12) {
        return Err(Error::NotProbability);
    }
    let scale = mu.scale().max(nu.scale());
    let (m_mu, m_nu) = (mu.mean().unwrap(), nu.mean().unwrap());
    if (m_mu - m_nu).abs() > 1e-9 * scale {
        return Err(Error::MeanMismatch(m_mu, m_nu));
    }

    let base = union_atoms(mu, nu);
    let span = base.last().unwrap() - base.first().unwrap();
    let snap = 1e-12 * span.max(1.0);

    let gap = |x: f64| nu.potential(x) - mu.potential(x);
    let mut knots: Vec<f64> = Vec::with_capacity(2 * base.len());
    for w in base.windows(2) {
        let (a, b) = (w[0], w[1]);
        knots.push(a);
        let (ga, gb) = (gap(a), gap(b));
        if ga * gb < 0.0 {
            let t = (a * gb - b * ga) / (gb - ga);
            if t - a > snap && b - t > snap {
                knots.push(t);
            }
        }
    }
    knots.push(*base.last().unwrap());

    let maxpot: Vec<f64> = knots
        .iter()
        .map(|&x| mu.potential(x).max(nu.potential(x)))
        .collect();

    // Slopes of the max-potential, with asymptotic slopes -1/+1 outside.
    let n = knots.len();
    let mut masses = vec![0.0f64; n];
    for k in 0..n {
        let slope_left = if k == 0 {
            -1.0
        } else {
            (maxpot[k] - maxpot[k - 1]) / (knots[k] - knots[k - 1])
        };
        let slope_right = if k == n - 1 {
            1.0
        } else {
            (maxpot[k + 1] - maxpot[k]) / (knots[k + 1] - knots[k])
        };
        let m = 0.5 * (slope_right - slope_left);
        if m < -1e-9 {
            return Err(Error::NumericalBreakdown(format!(
                "negative mass {m} reconstructing join potential"
            )));
        }
        masses[k] = m.max(0.0);
    }

    // Drop negligible atoms, moving their mass into the neighbors so the
    // mean is preserved.
    let kept: Vec<usize> = (0..n).filter(|&k| masses[k] >= 1e-14).collect();
    if kept.is_empty() {
        return Err(Error::NumericalBreakdown("join produced no atoms".into()));
    }
    for k in 0..n {
        if masses[k] >= 1e-14 || masses[k] == 0.0 {
            continue;
        }
        let left = kept.iter().rev().find(|&&i| i < k).copied();
        let right = kept.iter().find(|&&i| i > k).copied();
        match (left, right) {
            (Some(l), Some(r)) => {
                let f = (knots[r] - knots[k]) / (knots[r] - knots[l]);
                masses[l] += masses[k] * f;
                masses[r] += masses[k] * (1.0 - f);
            }
            (Some(l), None) => masses[l] += masses[k],
            (None, Some(r)) => masses[r] += masses[k],
            (None, None) => {}
        }
        masses[k] = 0.0;
    }

    let pairs: Vec<(f64, f64)> = kept.iter().map(|&k| (knots[k], masses[k])).collect();
    let (atoms, weights) = merge_sorted_atoms(&pairs, snap);
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::NumericalBreakdown(format!(
            "join mass {total} drifted from 1"
        )));
    }
    DiscreteMeasure::new(atoms, weights.iter().map(|w| w / total).collect())
}
