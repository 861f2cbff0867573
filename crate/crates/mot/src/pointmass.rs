//! Per-point diagonal analysis: the boundary masses `p_-(x)`, `p_+(x)`, the
//! split level `q(x)`, the extremal kernel `eta_x`, the smallest possible
//! diagonal mass at `x`, and the set of points where positive diagonal mass
//! is forced.

use crate::measures::DiscreteMeasure;
use crate::util::bisect;
use crate::{Error, Result};

/// Diagnostics at a single point `x` with `u_nu(x) > u_mu(x)`.
///
/// `p_plus` is the largest mass any martingale coupling can send from `x`
/// strictly upward, read off the quantile slice of `nu` just above `F_nu(x)`
/// balancing the call-payoff gap; `p_minus` is symmetric. When the atom
/// mass exceeds `p_- + p_+` the kernel `eta_x` keeps the surplus straight;
/// otherwise `q` splits the atom mass between the two sides and `eta_x` has
/// no diagonal part.
#[derive(Debug, Clone)]
pub struct PointMassProfile {
    pub x: f64,
    pub u_mu: f64,
    pub u_nu: f64,
    pub p_minus: f64,
    pub p_plus: f64,
    pub q: Option<f64>,
    pub eta_x: DiscreteMeasure,
    pub inf_diag: f64,
}

fn profile_tol(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
    1e-10 * mu.scale().max(nu.scale())
}

/// Compute the profile at `x`. Errors with `PotentialsTouch` when
/// `u_nu(x) <= u_mu(x) + tol` (there the point is an irreducible-component
/// boundary and the diagonal mass is forced to `mu({x})` instead).
pub fn point_mass_profile(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    x: f64,
) -> Result<PointMassProfile> {
    let u_mu = mu.potential(x);
    let u_nu = nu.potential(x);
    let tol = profile_tol(mu, nu);
    if u_nu - u_mu <= tol {
        return Err(Error::PotentialsTouch(x));
    }
    // Half the potential gap equals both one-sided payoff gaps.
    let gap = 0.5 * (u_nu - u_mu);
    let f_right = nu.cdf(x);
    let f_left = nu.cdf_left(x);

    // p_+ solves int_{F(x)}^{F(x)+p} (F^{-1} - x) = gap, increasing in p.
    let cap_plus = nu.mass() - f_right;
    let g_plus =
        |p: f64| nu.quantile_integral(f_right, f_right + p.min(cap_plus)).unwrap() - x * p - gap;
    let p_plus = bisect(g_plus, 0.0, cap_plus, 200);
    // p_- solves int_{F(x-)-p}^{F(x-)} (x - F^{-1}) = gap.
    let cap_minus = f_left;
    let g_minus = |p: f64| {
        x * p - nu.quantile_integral((f_left - p).max(0.0), f_left).unwrap() - gap
    };
    let p_minus = bisect(g_minus, 0.0, cap_minus, 200);
    if g_plus(p_plus).abs() > tol || g_minus(p_minus).abs() > tol {
        return Err(Error::NumericalBreakdown(format!(
            "side mass residuals {:.3e}/{:.3e} at x={x}",
            g_minus(p_minus).abs(),
            g_plus(p_plus).abs()
        )));
    }

    let m = mu.mass_at(x);
    let slice_pairs = |lo: f64, hi: f64, out: &mut Vec<(f64, f64)>, weight: f64| {
        for (k, mass) in nu.slice(lo, hi) {
            out.push((nu.atoms()[k], mass * weight));
        }
    };

    // Ties resolve to the q-branch, where both kernels coincide.
    let (q, eta_x, inf_diag) = if m > p_minus + p_plus + 1e-12 {
        let mut pairs = vec![(x, m - p_minus - p_plus)];
        slice_pairs(f_left - p_minus, f_left, &mut pairs, 1.0);
        slice_pairs(f_right, f_right + p_plus, &mut pairs, 1.0);
        for p in &mut pairs {
            p.1 /= m;
        }
        (None, DiscreteMeasure::from_pairs(pairs)?, m - p_minus - p_plus)
    } else if m > 0.0 {
        // q splits the atom mass between the two sides so the barycenter
        // stays at x; increasing in q. Near the branch boundary the bracket
        // can invert by roundoff, in which case it is a single point.
        let hi = p_minus.min(m);
        let lo = (m - p_plus).max(0.0).min(hi);
        let g = |q: f64| {
            let down = x * q - nu.quantile_integral((f_left - q).max(0.0), f_left).unwrap();
            let up = x * (m - q)
                - nu.quantile_integral(f_right, f_right + (m - q).min(cap_plus)).unwrap();
            down + up
        };
        let q = bisect(g, lo, hi, 200);
        if g(q).abs() > tol {
            return Err(Error::NumericalBreakdown(format!(
                "diagonal split residual {:.3e} at x={x}",
                g(q).abs()
            )));
        }
        let mut pairs = Vec::new();
        slice_pairs(f_left - q, f_left, &mut pairs, 1.0);
        slice_pairs(f_right, f_right + (m - q), &mut pairs, 1.0);
        for p in &mut pairs {
            p.1 /= m;
        }
        (Some(q), DiscreteMeasure::from_pairs(pairs)?, 0.0)
    } else {
        (None, DiscreteMeasure::empty(), 0.0)
    };

    if !eta_x.is_empty() {
        let mean = eta_x.mean().unwrap();
        if (mean - x).abs() > tol {
            return Err(Error::NumericalBreakdown(format!(
                "kernel mean {mean} drifted from {x}"
            )));
        }
    }

    Ok(PointMassProfile {
        x,
        u_mu,
        u_nu,
        p_minus,
        p_plus,
        q,
        eta_x,
        inf_diag,
    })
}

/// Smallest diagonal mass `pi({(x, x)})` over all martingale couplings:
/// `(mu({x}) - p_-(x) - p_+(x))^+`, and the full `mu({x})` when the
/// potentials touch at `x` (irreducible-component boundary).
pub fn min_diag_mass(mu: &DiscreteMeasure, nu: &DiscreteMeasure, x: f64) -> Result<f64> {
    let tol = profile_tol(mu, nu);
    if nu.potential(x) - mu.potential(x) <= tol {
        return Ok(mu.mass_at(x));
    }
    Ok(point_mass_profile(mu, nu, x)?.inf_diag)
}

/// A source atom whose diagonal mass is bounded away from zero in every
/// coupling.
#[derive(Debug, Clone, Copy)]
pub struct ForcedAtom {
    pub x: f64,
    pub forced_mass: f64,
    /// True when forcing comes from `u_mu(x) = u_nu(x)` rather than from the
    /// profile inequality.
    pub boundary: bool,
}

/// Scan the atoms of `mu` and report every point with forced diagonal mass:
/// the set where `mu({x}) > p_-(x) + p_+(x)` (forced `mu - p_- - p_+`) plus
/// the potential-touching atoms (forced `mu({x})`).
pub fn x_zero_set(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<Vec<ForcedAtom>> {
    let tol = profile_tol(mu, nu);
    let mut out = Vec::new();
    for (&x, &w) in mu.atoms().iter().zip(mu.weights()) {
        if nu.potential(x) - mu.potential(x) <= tol {
            out.push(ForcedAtom {
                x,
                forced_mass: w,
                boundary: true,
            });
            continue;
        }
        let profile = point_mass_profile(mu, nu, x)?;
        if profile.inf_diag > 0.0 {
            out.push(ForcedAtom {
                x,
                forced_mass: profile.inf_diag,
                boundary: false,
            });
        }
    }
    Ok(out)
}
