//! Threshold analytics for power costs: the root `alpha_rho` of `psi_rho`,
//! monotonicity windows of the three-point comparison function `f_rho`, and
//! generators with verdicts for the counterexample families.

use crate::couplings::{build_nested_pi_down, build_nested_pi_up};
use crate::measures::DiscreteMeasure;
use crate::motlp::{solve_mot, CostSpec, Coupling, CouplingNorm};
use crate::order::convex_order;
use crate::simplex::{Sense, SimplexSolver};
use crate::util::bisect;
use crate::{Error, Result};

/// `psi_rho(alpha) = alpha + alpha^(2-rho) (1-alpha)^(rho-1) + 1 - rho` for
/// `rho > 1`, `alpha` in (0, 1].
pub fn psi_rho(rho: f64, alpha: f64) -> Result<f64> {
    if !(rho > 1.0) || !rho.is_finite() {
        return Err(Error::DomainError(format!("psi_rho needs rho > 1, got {rho}")));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::DomainError(format!(
            "psi_rho needs alpha in (0,1], got {alpha}"
        )));
    }
    Ok(alpha + alpha.powf(2.0 - rho) * (1.0 - alpha).powf(rho - 1.0) + 1.0 - rho)
}

/// Auxiliary function whose root in (0, 1/2) is the `rho = 2` limit of
/// `alpha_rho`: `h(alpha) = 1 + (1 - alpha) ln(alpha / (1 - alpha))`.
pub fn h_two(alpha: f64) -> f64 {
    1.0 + (1.0 - alpha) * (alpha / (1.0 - alpha)).ln()
}

/// Root of `psi_rho` in (0, 1/2) with its residual. At `rho = 2` the
/// function degenerates (`psi_2` vanishes identically) and the root of
/// `h_two` is returned instead.
#[derive(Debug, Clone, Copy)]
pub struct AlphaRho {
    pub rho: f64,
    pub alpha: f64,
    pub residual: f64,
}

pub fn alpha_rho(rho: f64) -> Result<AlphaRho> {
    if !(rho > 1.0) || !rho.is_finite() {
        return Err(Error::DomainError(format!("alpha_rho needs rho > 1, got {rho}")));
    }
    let (lo, hi) = (1e-9, 0.5 - 1e-9);
    if rho == 2.0 {
        let alpha = bisect(h_two, lo, hi, 200);
        return Ok(AlphaRho {
            rho,
            alpha,
            residual: h_two(alpha).abs(),
        });
    }
    let f = |a: f64| psi_rho(rho, a).unwrap();
    let alpha = bisect(f, lo, hi, 200);
    Ok(AlphaRho {
        rho,
        alpha,
        residual: f(alpha).abs(),
    })
}

/// `(rho - 1)^(1 / (2 - rho))`, evaluated in log form with the limit value
/// `1/e` substituted near `rho = 2`.
pub fn power_gap_ratio(rho: f64) -> f64 {
    if (rho - 2.0).abs() < 1e-8 {
        (-1.0f64).exp()
    } else {
        ((rho - 1.0).ln() / (2.0 - rho)).exp()
    }
}

/// Three-point comparison function on `[y, z]`:
/// `f(x) = (z-m)/(z-y) |x-y|^rho + (m-y)/(z-y) |z-x|^rho - |x-m|^rho`.
pub fn f_rho(y: f64, m: f64, z: f64, rho: f64, x: f64) -> f64 {
    let a = (z - m) / (z - y);
    let b = (m - y) / (z - y);
    a * (x - y).abs().powf(rho) + b * (z - x).abs().powf(rho) - (x - m).abs().powf(rho)
}

#[derive(Debug, Clone, Copy)]
pub struct WindowReport {
    pub lo: f64,
    pub hi: f64,
    pub expect_increasing: bool,
    pub strictly_monotone: bool,
}

/// Scan the two monotonicity windows of `f_rho` on 1000-point grids.
///
/// For `rho <= 1` the windows are `[y, m]` (increasing) and `[m, z]`
/// (decreasing); for `rho` in (1,2) they shrink to `[y, (1-a) m + a y]` and
/// `[(1-a) m + a z, z]` with `a = alpha_rho`, and for `rho > 2` the
/// directions flip.
pub fn f_rho_window(y: f64, m: f64, z: f64, rho: f64) -> Result<[WindowReport; 2]> {
    if !(y < m && m < z) {
        return Err(Error::DomainError(format!("need y < m < z, got {y}, {m}, {z}")));
    }
    if !(rho > 0.0) || rho == 2.0 {
        return Err(Error::DomainError(format!(
            "f_rho windows defined for rho > 0, rho != 2; got {rho}"
        )));
    }
    let (w1, w2, inc1) = if rho <= 1.0 {
        ((y, m), (m, z), true)
    } else {
        let a = alpha_rho(rho)?.alpha;
        let windows = (
            (y, (1.0 - a) * m + a * y),
            ((1.0 - a) * m + a * z, z),
        );
        (windows.0, windows.1, rho < 2.0)
    };
    let scan = |lo: f64, hi: f64, increasing: bool| {
        let n = 1000;
        let mut prev = f_rho(y, m, z, rho, lo);
        let mut strict = true;
        for k in 1..n {
            let x = lo + (hi - lo) * k as f64 / (n - 1) as f64;
            let v = f_rho(y, m, z, rho, x);
            let ok = if increasing { v > prev } else { v < prev };
            if !ok {
                strict = false;
                break;
            }
            prev = v;
        }
        WindowReport {
            lo,
            hi,
            expect_increasing: increasing,
            strictly_monotone: strict,
        }
    };
    Ok([scan(w1.0, w1.1, inc1), scan(w2.0, w2.1, !inc1)])
}

fn require(name: &'static str, ok: bool) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::ConstraintViolated(name))
    }
}

/// Two-atom source against a fixed three-point target: for small `eps` the
/// maximizers at two powers `rho' < rho <= 1` are distinct non-decreasing
/// couplings.
pub fn gen_diffcouplcr(
    rho: f64,
    rho_prime: f64,
    y: f64,
    m: f64,
    z: f64,
    beta: f64,
    eps: f64,
) -> Result<(DiscreteMeasure, DiscreteMeasure)> {
    require("rho_in_(0,1]", rho > 0.0 && rho <= 1.0)?;
    require("rho_prime_in_(0,rho)", rho_prime > 0.0 && rho_prime < rho)?;
    require("m_above_midpoint", y < 0.5 * (y + z) && 0.5 * (y + z) < m && m < z)?;
    let beta_cap_slope = 2.0 * rho
        * ((m - y) / (z - y) * (z - m).powf(rho - 1.0)
            - (z - m) / (z - y) * (m - y).powf(rho - 1.0));
    let beta_cap = beta_cap_slope.min((2.0 * m - y - z) / (z - m));
    require("beta_range", beta > 0.0 && beta < beta_cap)?;
    let eps_cap = (z - m)
        .min((m - y) / (1.0 + beta).powf(1.0 / rho))
        .min(2.0 * (z - m) * (m - y) / (3.0 * (z - y)))
        .min(1.0);
    require("eps_range", eps > 0.0 && eps < eps_cap)?;

    let kappa = (1.0 + beta * eps.powf(1.0 - rho)).powf(1.0 / rho);
    let mu = DiscreteMeasure::new(
        vec![m - kappa * eps, m + eps],
        vec![1.0 / (1.0 + kappa), kappa / (1.0 + kappa)],
    )?;
    let nu = DiscreteMeasure::new(
        vec![y, m, z],
        vec![
            2.0 * (z - m) / (3.0 * (z - y)),
            1.0 / 3.0,
            2.0 * (m - y) / (3.0 * (z - y)),
        ],
    )?;
    Ok((mu, nu))
}

/// Closed-form two-source four-target instance where the squared
/// displacement law of the non-decreasing (resp. non-increasing) coupling
/// is the convex order infimum (resp. supremum).
#[derive(Debug, Clone)]
pub struct MhkInstance {
    pub mu: DiscreteMeasure,
    pub nu_lower: DiscreteMeasure,
    pub pi_up: Coupling,
    pub nu_upper: DiscreteMeasure,
    pub pi_down: Coupling,
}

pub fn gen_mhk(p: f64, pts: [f64; 6]) -> Result<MhkInstance> {
    let [ym, yp, xm, xp, zm, zp] = pts;
    require("p_in_(0,1)", p > 0.0 && p < 1.0)?;
    require("ordering", ym < yp && yp < xm && xm < xp && xp < zm && zm < zp)?;
    require("x_plus_reaches_left", xp - ym >= zm - xm)?;
    require("z_plus_reaches_right", zp - xm >= xp - yp)?;
    let lhs = (xm - ym).min(xp - yp).min(zm - xm).min(zp - xp);
    let rhs = (xm - yp).max(zm - xp);
    require("four_vee", lhs >= rhs)?;

    let mu = DiscreteMeasure::new(vec![xm, xp], vec![p, 1.0 - p])?;
    let w_up = [
        p * (zm - xm) / (zm - ym),
        p * (xm - ym) / (zm - ym),
        (1.0 - p) * (zp - xp) / (zp - yp),
        (1.0 - p) * (xp - yp) / (zp - yp),
    ];
    let nu_lower = DiscreteMeasure::from_pairs(vec![
        (ym, w_up[0]),
        (zm, w_up[1]),
        (yp, w_up[2]),
        (zp, w_up[3]),
    ])?;
    let j = |t: f64| nu_lower.atoms().binary_search_by(|q| q.total_cmp(&t)).unwrap();
    let pi_up = Coupling::from_entries(
        mu.clone(),
        nu_lower.clone(),
        vec![
            (0, j(ym), w_up[0]),
            (0, j(zm), w_up[1]),
            (1, j(yp), w_up[2]),
            (1, j(zp), w_up[3]),
        ],
        0.0,
    )?;
    let w_down = [
        p * (zp - xm) / (zp - yp),
        p * (xm - yp) / (zp - yp),
        (1.0 - p) * (zm - xp) / (zm - ym),
        (1.0 - p) * (xp - ym) / (zm - ym),
    ];
    let nu_upper = DiscreteMeasure::from_pairs(vec![
        (yp, w_down[0]),
        (zp, w_down[1]),
        (ym, w_down[2]),
        (zm, w_down[3]),
    ])?;
    let k = |t: f64| nu_upper.atoms().binary_search_by(|q| q.total_cmp(&t)).unwrap();
    let pi_down = Coupling::from_entries(
        mu.clone(),
        nu_upper.clone(),
        vec![
            (0, k(yp), w_down[0]),
            (0, k(zp), w_down[1]),
            (1, k(ym), w_down[2]),
            (1, k(zm), w_down[3]),
        ],
        0.0,
    )?;
    pi_up.validate(1e-12)?;
    pi_down.validate(1e-12)?;
    Ok(MhkInstance {
        mu,
        nu_lower,
        pi_up,
        nu_upper,
        pi_down,
    })
}

/// Crossed-pairs instance: for source atoms close enough to `z_-`, the
/// crossed couplings (which are neither non-decreasing nor non-increasing)
/// become the unique optimizers.
#[derive(Debug, Clone)]
pub struct MstarInstance {
    pub mu: DiscreteMeasure,
    pub nu_upper: DiscreteMeasure,
    pub nu_lower: DiscreteMeasure,
    pub pi_bar: Coupling,
    pub pi_under: Coupling,
    /// True when the LP optimizer of the matching sense equals `pi_bar`.
    pub verdict_bar: bool,
    pub verdict_under: bool,
}

#[allow(clippy::too_many_arguments)]
pub fn gen_mstar(
    p: f64,
    ym: f64,
    yp: f64,
    zm: f64,
    zp: f64,
    xm: f64,
    xp: f64,
    rho: f64,
    solver: &SimplexSolver,
) -> Result<MstarInstance> {
    require("p_in_(0,1)", p > 0.0 && p < 1.0)?;
    require("rho_domain", rho > 1.0 && rho != 2.0)?;
    require("ordering", ym < yp && yp < xm && xm < xp && xp < zm && zm < zp)?;
    require("left_span_dominates", zm - ym > zp - zm)?;
    require("gap_condition", zm - yp >= power_gap_ratio(rho) * (zp - zm))?;

    let mu = DiscreteMeasure::new(vec![xm, xp], vec![p, 1.0 - p])?;
    let wb = [
        p * (zp - xm) / (zp - ym),
        p * (xm - ym) / (zp - ym),
        (1.0 - p) * (zm - xp) / (zm - yp),
        (1.0 - p) * (xp - yp) / (zm - yp),
    ];
    let nu_upper = DiscreteMeasure::from_pairs(vec![
        (ym, wb[0]),
        (zp, wb[1]),
        (yp, wb[2]),
        (zm, wb[3]),
    ])?;
    let jb = |t: f64| nu_upper.atoms().binary_search_by(|q| q.total_cmp(&t)).unwrap();
    let pi_bar = Coupling::from_entries(
        mu.clone(),
        nu_upper.clone(),
        vec![
            (0, jb(ym), wb[0]),
            (0, jb(zp), wb[1]),
            (1, jb(yp), wb[2]),
            (1, jb(zm), wb[3]),
        ],
        0.0,
    )?;
    let wu = [
        p * (zm - xm) / (zm - yp),
        p * (xm - yp) / (zm - yp),
        (1.0 - p) * (zp - xp) / (zp - ym),
        (1.0 - p) * (xp - ym) / (zp - ym),
    ];
    let nu_lower = DiscreteMeasure::from_pairs(vec![
        (yp, wu[0]),
        (zm, wu[1]),
        (ym, wu[2]),
        (zp, wu[3]),
    ])?;
    let ju = |t: f64| nu_lower.atoms().binary_search_by(|q| q.total_cmp(&t)).unwrap();
    let pi_under = Coupling::from_entries(
        mu.clone(),
        nu_lower.clone(),
        vec![
            (0, ju(yp), wu[0]),
            (0, ju(zm), wu[1]),
            (1, ju(ym), wu[2]),
            (1, ju(zp), wu[3]),
        ],
        0.0,
    )?;
    pi_bar.validate(1e-12)?;
    pi_under.validate(1e-12)?;

    let cost = CostSpec::Power(rho);
    let (sense_bar, sense_under) = if rho < 2.0 {
        (Sense::Max, Sense::Min)
    } else {
        (Sense::Min, Sense::Max)
    };
    let opt_bar = solve_mot(&mu, &nu_upper, &cost, sense_bar, solver)?;
    let opt_under = solve_mot(&mu, &nu_lower, &cost, sense_under, solver)?;
    Ok(MstarInstance {
        verdict_bar: opt_bar.coupling.distance(&pi_bar, CouplingNorm::Tv) <= 1e-7,
        verdict_under: opt_under.coupling.distance(&pi_under, CouplingNorm::Tv) <= 1e-7,
        mu,
        nu_upper,
        nu_lower,
        pi_bar,
        pi_under,
    })
}

/// Gap check on a two-cluster target: when both support gaps dominate the
/// `alpha_rho` fraction of the cluster spans, the monotone couplings stay
/// optimal for `|x-y|^rho` and the LP optimizers are verified against them.
#[derive(Debug, Clone)]
pub struct MhnCheck {
    pub sufficient: bool,
    pub alpha: f64,
    pub left_gap: f64,
    pub left_need: f64,
    pub right_gap: f64,
    pub right_need: f64,
    /// TV distances (maximizing-sense optimizer vs pi_up, minimizing vs
    /// pi_down) when the check is sufficient; senses swap for `rho > 2`.
    pub optimizer_match: Option<(f64, f64)>,
}

pub fn check_mhn_alpha(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    rho: f64,
    solver: &SimplexSolver,
) -> Result<MhnCheck> {
    if !(rho > 1.0) || rho == 2.0 {
        return Err(Error::DomainError(format!(
            "check needs rho > 1, rho != 2; got {rho}"
        )));
    }
    if !convex_order(mu, nu, 1e-9).holds {
        return Err(Error::NotConvexOrdered);
    }
    let x_lo = *mu.atoms().first().ok_or(Error::Empty("mu"))?;
    let x_hi = *mu.atoms().last().unwrap();
    if nu.cdf(x_hi) - nu.cdf_left(x_lo) > 0.0 {
        return Err(Error::SupportShapeMismatch(format!(
            "target carries mass on the source hull [{x_lo}, {x_hi}]"
        )));
    }
    let below = nu.restrict_below(x_lo, false);
    let above = nu.restrict_above(x_hi, false);
    if below.is_empty() || above.is_empty() {
        return Err(Error::SupportShapeMismatch(
            "target needs mass on both sides of the source hull".into(),
        ));
    }
    let (y_lo, y_hi) = (below.atoms()[0], *below.atoms().last().unwrap());
    let (z_lo, z_hi) = (above.atoms()[0], *above.atoms().last().unwrap());

    let alpha = alpha_rho(rho)?.alpha;
    let left_gap = x_lo - y_hi;
    let left_need = alpha * (z_hi - y_hi);
    let right_gap = z_lo - x_hi;
    let right_need = alpha * (z_lo - y_lo);
    let sufficient = left_gap >= left_need && right_gap >= right_need;

    let optimizer_match = if sufficient {
        let pi_up = build_nested_pi_up(mu, nu, solver)?;
        let pi_down = build_nested_pi_down(mu, nu)?;
        let cost = CostSpec::Power(rho);
        let max = solve_mot(mu, nu, &cost, Sense::Max, solver)?;
        let min = solve_mot(mu, nu, &cost, Sense::Min, solver)?;
        let (up_tv, down_tv) = if rho < 2.0 {
            (
                max.coupling.distance(&pi_up, CouplingNorm::Tv),
                min.coupling.distance(&pi_down, CouplingNorm::Tv),
            )
        } else {
            (
                min.coupling.distance(&pi_up, CouplingNorm::Tv),
                max.coupling.distance(&pi_down, CouplingNorm::Tv),
            )
        };
        if up_tv > 1e-7 || down_tv > 1e-7 {
            return Err(Error::CrossCheckFailure(format!(
                "gap condition holds but optimizers differ: up {up_tv:.3e}, down {down_tv:.3e}"
            )));
        }
        Some((up_tv, down_tv))
    } else {
        None
    };

    Ok(MhnCheck {
        sufficient,
        alpha,
        left_gap,
        left_need,
        right_gap,
        right_need,
        optimizer_match,
    })
}
