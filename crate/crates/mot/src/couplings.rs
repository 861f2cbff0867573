//! Direct constructions and verifications on martingale couplings:
//! directional decomposition, monotonicity checkers, the quantile-sweep
//! constructor of the non-decreasing coupling with a prescribed split, the
//! nested-supports couplings, dispersion detection, and the squared
//! displacement law with its convex order upper bound.

use crate::measures::DiscreteMeasure;
use crate::motlp::{solve_mot, CostSpec, Coupling, CouplingNorm};
use crate::order::convex_order;
use crate::pointmass;
use crate::simplex::{Sense, SimplexSolver};
use crate::util::bisect;
use crate::{Error, Result};

/// Mass below which a quantile sliver is treated as root-finding noise.
const SLIVER_TOL: f64 = 1e-11;

/// Split of a target measure into the parts reached from above (`nu_l`), on
/// the diagonal (`nu_0`), and from below (`nu_r`).
#[derive(Debug, Clone)]
pub struct DirectionalSplit {
    pub nu_l: DiscreteMeasure,
    pub nu_0: DiscreteMeasure,
    pub nu_r: DiscreteMeasure,
}

impl DirectionalSplit {
    pub fn new(nu_l: DiscreteMeasure, nu_0: DiscreteMeasure, nu_r: DiscreteMeasure) -> Self {
        Self { nu_l, nu_0, nu_r }
    }

    /// Check `nu_l + nu_0 + nu_r = nu` atomwise within `tol * (1 + w)`.
    pub fn validate_against(&self, nu: &DiscreteMeasure, tol: f64) -> Result<()> {
        let mut xs: Vec<f64> = nu
            .atoms()
            .iter()
            .chain(self.nu_l.atoms())
            .chain(self.nu_0.atoms())
            .chain(self.nu_r.atoms())
            .copied()
            .collect();
        xs.sort_by(|a, b| a.total_cmp(b));
        xs.dedup();
        for &x in &xs {
            let w = nu.mass_at(x);
            let s = self.nu_l.mass_at(x) + self.nu_0.mass_at(x) + self.nu_r.mass_at(x);
            if (s - w).abs() > tol * (1.0 + w) {
                return Err(Error::SplitMismatch(format!(
                    "atom {x}: parts sum to {s}, target weight {w}"
                )));
            }
        }
        Ok(())
    }

    /// Rescale the three parts atomwise so they sum to `nu` exactly; used to
    /// clean splits read off LP solutions before reconstruction.
    pub fn renormalize_to(&self, nu: &DiscreteMeasure) -> Result<Self> {
        self.validate_against(nu, 1e-7)?;
        let mut l = Vec::new();
        let mut z = Vec::new();
        let mut r = Vec::new();
        for (&x, &w) in nu.atoms().iter().zip(nu.weights()) {
            let (wl, w0, wr) = (
                self.nu_l.mass_at(x),
                self.nu_0.mass_at(x),
                self.nu_r.mass_at(x),
            );
            let s = wl + w0 + wr;
            if s <= 0.0 {
                return Err(Error::SplitMismatch(format!("atom {x} missing from split")));
            }
            let f = w / s;
            if wl * f > 0.0 {
                l.push((x, wl * f));
            }
            if w0 * f > 0.0 {
                z.push((x, w0 * f));
            }
            if wr * f > 0.0 {
                r.push((x, wr * f));
            }
        }
        let build = |pairs: Vec<(f64, f64)>| {
            let (a, w): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            DiscreteMeasure::new(a, w)
        };
        Ok(Self::new(build(l)?, build(z)?, build(r)?))
    }

    pub fn to_json(&self) -> String {
        format!(
            "{{\n\"nu_l\": {},\n\"nu_0\": {},\n\"nu_r\": {}\n}}",
            self.nu_l.to_json(),
            self.nu_0.to_json(),
            self.nu_r.to_json()
        )
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(s)?;
        let part = |name: &str| -> Result<DiscreteMeasure> {
            let p = v
                .get(name)
                .ok_or_else(|| Error::Parse(format!("missing field {name}")))?;
            DiscreteMeasure::from_json(&serde_json::to_string(p)?)
        };
        Ok(Self::new(part("nu_l")?, part("nu_0")?, part("nu_r")?))
    }
}

/// Split the target mass of a coupling by the sign of `y - x`.
pub fn decompose(pi: &Coupling) -> DirectionalSplit {
    let nj = pi.target().len();
    let mut l = vec![0.0f64; nj];
    let mut z = vec![0.0f64; nj];
    let mut r = vec![0.0f64; nj];
    for &(i, j, m) in pi.entries() {
        let x = pi.source().atoms()[i];
        let y = pi.target().atoms()[j];
        if y < x {
            l[j] += m;
        } else if y > x {
            r[j] += m;
        } else {
            z[j] += m;
        }
    }
    let build = |w: Vec<f64>| {
        let pairs: Vec<(f64, f64)> = pi
            .target()
            .atoms()
            .iter()
            .zip(&w)
            .filter(|(_, &m)| m > 0.0)
            .map(|(&x, &m)| (x, m))
            .collect();
        let (a, w): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        DiscreteMeasure::new(a, w).expect("decomposition parts are valid")
    };
    DirectionalSplit::new(build(l), build(z), build(r))
}

/// Outcome of a monotonicity check; `witness` holds a violating pair of
/// support points when the check fails.
#[derive(Debug, Clone, Copy)]
pub struct MonotoneReport {
    pub holds: bool,
    pub witness: Option<((f64, f64), (f64, f64))>,
}

fn check_monotone(pi: &Coupling, nondecreasing: bool) -> MonotoneReport {
    let pts: Vec<(f64, f64)> = pi.support().map(|(x, y, _)| (x, y)).collect();
    for (a, &p) in pts.iter().enumerate() {
        for &q in &pts[a + 1..] {
            let (lo, hi) = if p.0 < q.0 {
                (p, q)
            } else if q.0 < p.0 {
                (q, p)
            } else {
                continue;
            };
            let both_down = lo.1 <= lo.0 && hi.1 <= hi.0;
            let both_up = lo.1 >= lo.0 && hi.1 >= hi.0;
            if !(both_down || both_up) {
                continue;
            }
            let ok = if nondecreasing {
                lo.1 <= hi.1
            } else {
                hi.1 <= lo.1
            };
            if !ok {
                return MonotoneReport {
                    holds: false,
                    witness: Some((lo, hi)),
                };
            }
        }
    }
    MonotoneReport {
        holds: true,
        witness: None,
    }
}

/// Conditions (a)/(b): downward destinations and upward destinations are
/// both non-decreasing in the source point, over all support pairs.
pub fn is_nondecreasing(pi: &Coupling) -> MonotoneReport {
    check_monotone(pi, true)
}

/// Conditions (c)/(d): downward and upward destinations non-increasing in
/// the source point.
pub fn is_nonincreasing(pi: &Coupling) -> MonotoneReport {
    check_monotone(pi, false)
}

/// The function `u -> phi(u)` produced by the quantile sweep: `phi(u)` is
/// the share of the first `u` quantile mass of the source that moves down.
/// Both `phi` and `u - phi(u)` are non-decreasing.
#[derive(Debug, Clone)]
pub struct PhiPath {
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
}

fn snap_strict_split(
    nu: &DiscreteMeasure,
    nu_l: &DiscreteMeasure,
    nu_r: &DiscreteMeasure,
) -> Result<(DiscreteMeasure, DiscreteMeasure)> {
    let split = DirectionalSplit::new(nu_l.clone(), DiscreteMeasure::empty(), nu_r.clone());
    let snapped = split.renormalize_to(nu)?;
    Ok((snapped.nu_l, snapped.nu_r))
}

/// Build the unique non-decreasing martingale coupling with directional
/// parts exactly `(nu_l, 0, nu_r)`, by sweeping the source quantiles and
/// balancing each atom's mean against quantile slices of the two parts.
///
/// `mu` may be a sub-probability measure as long as its mass matches
/// `nu_l + nu_r`; construct-then-validate is the feasibility test: any
/// residual or side-condition failure reports `InfeasibleSplit`.
pub fn build_nondecreasing(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    nu_l: &DiscreteMeasure,
    nu_r: &DiscreteMeasure,
) -> Result<Coupling> {
    build_nondecreasing_detailed(mu, nu, nu_l, nu_r).map(|(pi, _)| pi)
}

pub fn build_nondecreasing_detailed(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    nu_l: &DiscreteMeasure,
    nu_r: &DiscreteMeasure,
) -> Result<(Coupling, PhiPath)> {
    let (nl, nr) = snap_strict_split(nu, nu_l, nu_r)?;
    let scale = mu.scale().max(nu.scale());
    let total = mu.mass();
    if (nl.mass() + nr.mass() - total).abs() > 1e-9 * (1.0 + total) {
        return Err(Error::SplitMismatch(format!(
            "mass of nu_l + nu_r = {} differs from mass of mu = {}",
            nl.mass() + nr.mass(),
            total
        )));
    }
    if total <= 1e-12 {
        return Err(Error::Empty("mu"));
    }
    if mu.approx_eq(nu, 1e-12 * scale) {
        return Err(Error::InfeasibleSplit(
            "mu = nu forces all mass straight; no strict split exists".into(),
        ));
    }
    let (ml, mr) = (nl.mass(), nr.mass());
    if ml <= 1e-12 || mr <= 1e-12 {
        return Err(Error::Degenerate(
            "nu_l and nu_r must both carry mass when mu != nu".into(),
        ));
    }

    let cum = mu.cumulative();
    let n = mu.len();
    let mut phi = vec![0.0f64; n + 1];
    let mut target = 0.0f64;
    let balance_tol = 1e-10 * scale;
    for i in 1..=n {
        let u = cum[i];
        let du = u - cum[i - 1];
        target += mu.atoms()[i - 1] * du;
        let goal = target;
        let lo = phi[i - 1].max(u - mr).max(0.0);
        let hi = (phi[i - 1] + du).min(ml).min(u);
        if lo > hi + 1e-12 {
            return Err(Error::InfeasibleSplit(format!(
                "empty balance bracket at source atom {}",
                mu.atoms()[i - 1]
            )));
        }
        let hi = hi.max(lo);
        let h = |v: f64| {
            nl.quantile_integral(0.0, v.clamp(0.0, ml)).unwrap()
                + nr.quantile_integral(0.0, (u - v).clamp(0.0, mr)).unwrap()
                - goal
        };
        // The balance is piecewise linear and convex in v but not monotone
        // on the whole bracket, so the sweep value is its FIRST root: walk
        // the quantile breakpoints exactly instead of bisecting.
        let mut bps: Vec<f64> = vec![lo, hi];
        for &c in nl.cumulative() {
            if c > lo && c < hi {
                bps.push(c);
            }
        }
        for &c in nr.cumulative() {
            let v = u - c;
            if v > lo && v < hi {
                bps.push(v);
            }
        }
        bps.sort_by(|a, b| a.total_cmp(b));
        bps.dedup();
        let hvals: Vec<f64> = bps.iter().map(|&v| h(v)).collect();
        let root = if hvals[0] <= 0.0 {
            bps[0]
        } else if let Some(k) = (1..bps.len()).find(|&k| hvals[k] <= 0.0) {
            let (a, b, ha, hb) = (bps[k - 1], bps[k], hvals[k - 1], hvals[k]);
            if ha == hb {
                a
            } else {
                a + ha * (b - a) / (ha - hb)
            }
        } else {
            // No sign change: the split is infeasible unless the balance
            // grazes zero at a breakpoint.
            let (kmin, _) = hvals
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                .unwrap();
            bps[kmin]
        };
        if h(root).abs() > balance_tol {
            return Err(Error::InfeasibleSplit(format!(
                "balance residual {:.3e} at source atom {}",
                h(root).abs(),
                mu.atoms()[i - 1]
            )));
        }
        phi[i] = root;
    }

    // Assemble rows from consumed quantile slices, enforcing the strict side
    // conditions: down-slices sit strictly below the atom, up-slices above.
    let nu_index = |x: f64| -> usize {
        nu.atoms()
            .binary_search_by(|p| p.total_cmp(&x))
            .expect("split atoms are target atoms")
    };
    let mut entries: Vec<(usize, usize, f64)> = Vec::new();
    for i in 1..=n {
        let x = mu.atoms()[i - 1];
        for (k, m) in nl.slice(phi[i - 1], phi[i]) {
            let y = nl.atoms()[k];
            if m > SLIVER_TOL && !(y < x) {
                return Err(Error::InfeasibleSplit(format!(
                    "down slice of atom {x} touches {y} >= {x}"
                )));
            }
            entries.push((i - 1, nu_index(y), m));
        }
        for (k, m) in nr.slice(cum[i - 1] - phi[i - 1], cum[i] - phi[i]) {
            let y = nr.atoms()[k];
            if m > SLIVER_TOL && !(y > x) {
                return Err(Error::InfeasibleSplit(format!(
                    "up slice of atom {x} touches {y} <= {x}"
                )));
            }
            entries.push((i - 1, nu_index(y), m));
        }
    }
    let pi = Coupling::from_entries(mu.clone(), nu.clone(), entries, 1e-12)?;
    if let Err(e) = pi.validate(1e-9) {
        return Err(Error::InfeasibleSplit(format!("validation failed: {e}")));
    }
    let path = PhiPath {
        breakpoints: cum.to_vec(),
        values: phi,
    };
    Ok((pi, path))
}

/// General-split variant: the diagonal part is peeled off (`mu - nu_0` vs
/// `nu_l + nu_r`), built strictly, and re-added as straight mass.
pub fn build_nondecreasing_with_diagonal(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    split: &DirectionalSplit,
) -> Result<Coupling> {
    let split = split.renormalize_to(nu)?;
    for (&x, &w0) in split.nu_0.atoms().iter().zip(split.nu_0.weights()) {
        if mu.mass_at(x) < w0 - 1e-9 {
            return Err(Error::NegativeReducedMeasure(x));
        }
    }
    // Reduced source mu - nu_0 (clamping roundoff-scale negatives to zero).
    let mut reduced: Vec<(f64, f64)> = Vec::new();
    for (&x, &w) in mu.atoms().iter().zip(mu.weights()) {
        let w = w - split.nu_0.mass_at(x);
        if w > 1e-14 {
            reduced.push((x, w));
        }
    }
    let diag_entries: Vec<(f64, f64)> = split
        .nu_0
        .atoms()
        .iter()
        .zip(split.nu_0.weights())
        .map(|(&x, &w)| (x, w))
        .collect();

    if reduced.is_empty() {
        // mu = nu_0 = nu: identity coupling.
        let ident = Coupling::identity(mu);
        return Ok(ident);
    }
    let (ra, rw): (Vec<f64>, Vec<f64>) = reduced.into_iter().unzip();
    let mu_red = DiscreteMeasure::new(ra, rw)?;
    let nu_red = split.nu_l.add(&split.nu_r);
    let inner = build_nondecreasing(&mu_red, &nu_red, &split.nu_l, &split.nu_r)?;

    let mu_index = |x: f64| {
        mu.atoms()
            .binary_search_by(|p| p.total_cmp(&x))
            .expect("reduced atoms are source atoms")
    };
    let nu_index = |x: f64| -> Result<usize> {
        nu.atoms()
            .binary_search_by(|p| p.total_cmp(&x))
            .map_err(|_| Error::SplitMismatch(format!("diagonal atom {x} is not a target atom")))
    };
    let mut entries: Vec<(usize, usize, f64)> = inner
        .entries()
        .iter()
        .map(|&(i, j, m)| {
            (
                mu_index(inner.source().atoms()[i]),
                nu_index(inner.target().atoms()[j]).expect("split atoms are target atoms"),
                m,
            )
        })
        .collect();
    for (x, w) in diag_entries {
        entries.push((mu_index(x), nu_index(x)?, w));
    }
    let pi = Coupling::from_entries(mu.clone(), nu.clone(), entries, 1e-12)?;
    if let Err(e) = pi.validate(1e-9) {
        return Err(Error::InfeasibleSplit(format!("validation failed: {e}")));
    }
    Ok(pi)
}

/// Nested supports: `a = min supp(mu)`, `b = max supp(mu)`, with `nu`
/// putting no mass on the open interval `(a, b)`.
pub fn detect_nested_supports(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Option<(f64, f64)> {
    let a = *mu.atoms().first()?;
    let b = *mu.atoms().last()?;
    let interior = nu.cdf_left(b) - nu.cdf(a);
    if interior > 0.0 {
        None
    } else {
        Some((a, b))
    }
}

/// The unique non-increasing martingale coupling under nested supports.
///
/// For each source cumulative level the left-block share `psi` solves a
/// strictly decreasing balance `G_x(psi) = int_{(-inf,x]} y mu(dy)`; rows
/// then consume the left target block from its top and the right block from
/// its bottom.
pub fn build_nested_pi_down(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<Coupling> {
    let (a, b) = detect_nested_supports(mu, nu).ok_or(Error::NoNestedSupports)?;
    if !convex_order(mu, nu, 1e-9).holds {
        return Err(Error::NotConvexOrdered);
    }
    if a == b {
        return Ok(Coupling::product(mu, nu));
    }
    let fa = nu.cdf(a);
    let scale = mu.scale().max(nu.scale());
    let cum = mu.cumulative();
    let n = mu.len();
    let mut psi = vec![0.0f64; n + 1];
    let mut target = 0.0f64;
    for i in 1..=n {
        let u = cum[i];
        let du = u - cum[i - 1];
        target += mu.atoms()[i - 1] * du;
        let goal = target;
        let lo = psi[i - 1].max(fa + u - 1.0).max(0.0);
        let hi = (psi[i - 1] + du).min(fa).min(u);
        if lo > hi + 1e-12 {
            return Err(Error::NumericalBreakdown(format!(
                "empty bracket in nested sweep at atom {}",
                mu.atoms()[i - 1]
            )));
        }
        let hi = hi.max(lo);
        let g = |p: f64| {
            nu.quantile_integral((fa - p).max(0.0), fa).unwrap()
                + nu.quantile_integral((1.0 + p - u).clamp(0.0, 1.0), 1.0).unwrap()
                - goal
        };
        let root = bisect(g, lo, hi, 200);
        if g(root).abs() > 1e-10 * scale {
            return Err(Error::NumericalBreakdown(format!(
                "nested balance residual {:.3e} at atom {}",
                g(root).abs(),
                mu.atoms()[i - 1]
            )));
        }
        psi[i] = root;
    }

    let mut entries: Vec<(usize, usize, f64)> = Vec::new();
    for i in 1..=n {
        for (k, m) in nu.slice(fa - psi[i], fa - psi[i - 1]) {
            entries.push((i - 1, k, m));
        }
        let (lo, hi) = (1.0 + psi[i] - cum[i], 1.0 + psi[i - 1] - cum[i - 1]);
        for (k, m) in nu.slice(lo, hi) {
            entries.push((i - 1, k, m));
        }
    }
    let pi = Coupling::from_entries(mu.clone(), nu.clone(), entries, 1e-12)?;
    pi.validate(1e-9)?;
    let check = is_nonincreasing(&pi);
    if !check.holds {
        return Err(Error::CrossCheckFailure(format!(
            "nested construction not non-increasing, witness {:?}",
            check.witness
        )));
    }
    Ok(pi)
}

/// The unique non-decreasing martingale coupling under nested supports:
/// computed as the `rho = 1` maximizer and cross-checked against the
/// quantile-sweep constructor fed with the diagonal masses from the
/// point-mass profiles at the support ends.
pub fn build_nested_pi_up(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    solver: &SimplexSolver,
) -> Result<Coupling> {
    let (a, b) = detect_nested_supports(mu, nu).ok_or(Error::NoNestedSupports)?;
    if !convex_order(mu, nu, 1e-9).holds {
        return Err(Error::NotConvexOrdered);
    }
    if a == b {
        return Ok(Coupling::product(mu, nu));
    }
    let report = solve_mot(mu, nu, &CostSpec::Power(1.0), Sense::Max, solver)?;
    let check = is_nondecreasing(&report.coupling);
    if !check.holds {
        return Err(Error::CrossCheckFailure(format!(
            "rho = 1 maximizer not non-decreasing, witness {:?}",
            check.witness
        )));
    }

    // Diagonal mass forced at the support ends.
    let scale = mu.scale().max(nu.scale());
    let mut nu0_pairs: Vec<(f64, f64)> = Vec::new();
    for x in [a, b] {
        let gap = nu.potential(x) - mu.potential(x);
        let forced = if gap <= 1e-10 * scale {
            mu.mass_at(x)
        } else {
            let profile = pointmass::point_mass_profile(mu, nu, x)?;
            (mu.mass_at(x) - profile.p_minus - profile.p_plus).max(0.0)
        };
        let forced = forced.min(nu.mass_at(x));
        if forced > 1e-13 {
            nu0_pairs.push((x, forced));
        }
    }
    let nu_0 = DiscreteMeasure::from_pairs(nu0_pairs)?;
    let sub = |side: &DiscreteMeasure, at: f64| -> Result<DiscreteMeasure> {
        let mut pairs: Vec<(f64, f64)> = side
            .atoms()
            .iter()
            .zip(side.weights())
            .map(|(&x, &w)| (x, w))
            .collect();
        let w0 = nu_0.mass_at(at);
        if w0 > 0.0 {
            for p in &mut pairs {
                if p.0 == at {
                    p.1 -= w0;
                }
            }
        }
        pairs.retain(|&(_, w)| w > 1e-15);
        let (a, w): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        DiscreteMeasure::new(a, w)
    };
    let nu_l = sub(&nu.restrict_below(a, true), a)?;
    let nu_r = sub(&nu.restrict_above(b, true), b)?;
    let split = DirectionalSplit::new(nu_l, nu_0, nu_r);
    let constructed = build_nondecreasing_with_diagonal(mu, nu, &split)?;
    let tv = report.coupling.distance(&constructed, CouplingNorm::Tv);
    if tv > 1e-7 {
        return Err(Error::CrossCheckFailure(format!(
            "LP maximizer and quantile-sweep construction differ by TV {tv:.3e}"
        )));
    }
    Ok(report.coupling)
}

/// Dispersion: the hull `[a, b]` of `supp((mu - nu)^+)` qualifies iff
/// `(nu - mu)^+` has no mass strictly inside it. Returns `None` for
/// `mu = nu` (every interval works, none is canonical).
pub fn detect_dispersion(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Option<(f64, f64)> {
    let excess = mu.positive_part_diff(nu);
    if excess.is_empty() {
        return None;
    }
    let a = *excess.atoms().first().unwrap();
    let b = *excess.atoms().last().unwrap();
    let deficit = nu.positive_part_diff(mu);
    let interior = deficit.cdf_left(b) - deficit.cdf(a);
    if interior > 0.0 {
        None
    } else {
        Some((a, b))
    }
}

/// The canonical split under dispersion: `nu_l = 1_{y<=a} (nu-mu)^+` and
/// `nu_r = 1_{y>=b} (nu-mu)^+`, with the common mass `mu /\ nu` straight.
pub fn dispersion_split(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    a: f64,
    b: f64,
) -> DirectionalSplit {
    let deficit = nu.positive_part_diff(mu);
    DirectionalSplit::new(
        deficit.restrict_below(a, true),
        nu.atom_min(mu),
        deficit.restrict_above(b, true),
    )
}

/// Law of the squared displacement `(y - x)^2` under a coupling.
#[derive(Debug, Clone)]
pub struct SqLaw(pub DiscreteMeasure);

impl SqLaw {
    pub fn measure(&self) -> &DiscreteMeasure {
        &self.0
    }

    pub fn mean(&self) -> f64 {
        self.0.mean().unwrap_or(0.0)
    }
}

pub fn sq_pushforward(pi: &Coupling) -> SqLaw {
    let pairs: Vec<(f64, f64)> = pi
        .support()
        .map(|(x, y, m)| ((y - x) * (y - x), m))
        .collect();
    SqLaw(DiscreteMeasure::from_pairs(pairs).expect("squared displacements are valid atoms"))
}

/// Convex order upper bound for all squared-displacement laws of martingale
/// couplings of `(mu, nu)`: built from the capped tail function
/// `f(z) = (mu{4x^2 > z} + nu{4y^2 > z}) /\ 1`. Returns `delta_0` when the
/// second moments agree (then `mu = nu` and the only law is `delta_0`).
pub fn sq_upper_bound(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<DiscreteMeasure> {
    let m2 = nu.second_moment() - mu.second_moment();
    if m2 <= 1e-14 * nu.second_moment().max(1.0) {
        return Ok(DiscreteMeasure::dirac(0.0));
    }

    let mut z: Vec<f64> = std::iter::once(0.0)
        .chain(mu.atoms().iter().map(|&x| 4.0 * x * x))
        .chain(nu.atoms().iter().map(|&y| 4.0 * y * y))
        .collect();
    z.sort_by(|p, q| p.total_cmp(q));
    z.dedup();
    let k = z.len();
    // f on [z_i, z_{i+1}) and the exact tail integral from z_i.
    let fval: Vec<f64> = z
        .iter()
        .map(|&zi| {
            let tail = |m: &DiscreteMeasure| -> f64 {
                m.atoms()
                    .iter()
                    .zip(m.weights())
                    .filter(|(&x, _)| 4.0 * x * x > zi)
                    .map(|(_, &w)| w)
                    .sum::<f64>()
            };
            (tail(mu) + tail(nu)).min(1.0)
        })
        .collect();
    let mut tail_int = vec![0.0f64; k];
    for i in (0..k - 1).rev() {
        tail_int[i] = tail_int[i + 1] + fval[i] * (z[i + 1] - z[i]);
    }

    // T(z) = z f(z) + int_z^inf f is constant between breakpoints and drops
    // at them; z_bar is the first breakpoint where it falls below the target
    // mean m2.
    let t_at = |i: usize| z[i] * fval[i] + tail_int[i];
    if t_at(0) < m2 {
        return Err(Error::NumericalBreakdown(
            "tail integral below target mean; measures inconsistent".into(),
        ));
    }
    let mut kk = k - 1;
    for i in 0..k {
        if t_at(i) < m2 {
            kk = i;
            break;
        }
    }
    let z_bar = z[kk];
    let p = (m2 - tail_int[kk]) / z_bar;

    let mut pairs: Vec<(f64, f64)> = Vec::new();
    if 1.0 - p > 1e-15 {
        pairs.push((0.0, 1.0 - p));
    }
    if p - fval[kk] > 1e-15 {
        pairs.push((z_bar, p - fval[kk]));
    }
    for i in kk + 1..k {
        let jump = fval[i - 1] - fval[i];
        if jump > 1e-15 {
            pairs.push((z[i], jump));
        }
    }
    let eta = DiscreteMeasure::from_pairs(pairs)?;
    let mean = eta.mean().unwrap_or(0.0);
    if (mean - m2).abs() > 1e-10 * m2.max(1.0) {
        return Err(Error::NumericalBreakdown(format!(
            "upper bound mean {mean} differs from moment gap {m2}"
        )));
    }
    Ok(eta)
}
