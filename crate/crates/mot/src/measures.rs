//! Finitely supported (sub-)probability measures on the real line with exact
//! CDF / quantile / potential calculus.

use crate::util::merge_sorted_atoms;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// A measure `sum_i w_i delta_{x_i}` with strictly increasing atoms and
/// positive weights. Mass 1 for probability measures; smaller masses are
/// first-class (directional parts of a split are sub-measures), and the
/// empty measure is allowed.
///
/// Values are immutable after construction; cumulative weight and first
/// moment tables are precomputed so CDF, quantile and potential queries are
/// `O(log n)` and quantile-slice integrals are exact segment sums.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    atoms: Vec<f64>,
    weights: Vec<f64>,
    /// cum[i] = w_0 + .. + w_{i-1}; length n+1.
    cum: Vec<f64>,
    /// cum_wx[i] = w_0 x_0 + .. + w_{i-1} x_{i-1}; length n+1.
    cum_wx: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(atoms: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(Error::BadParams("atoms/weights length mismatch".into()));
        }
        for pair in atoms.windows(2) {
            if !(pair[0] < pair[1]) {
                return Err(Error::Unsorted);
            }
        }
        for (&x, &w) in atoms.iter().zip(&weights) {
            if !x.is_finite() {
                return Err(Error::NonFinite);
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::NonpositiveWeight);
            }
        }
        let mut cum = Vec::with_capacity(atoms.len() + 1);
        let mut cum_wx = Vec::with_capacity(atoms.len() + 1);
        cum.push(0.0);
        cum_wx.push(0.0);
        for (&x, &w) in atoms.iter().zip(&weights) {
            cum.push(cum.last().unwrap() + w);
            cum_wx.push(cum_wx.last().unwrap() + w * x);
        }
        Ok(Self {
            atoms,
            weights,
            cum,
            cum_wx,
        })
    }

    pub fn empty() -> Self {
        Self::new(vec![], vec![]).unwrap()
    }

    pub fn dirac(x: f64) -> Self {
        Self::new(vec![x], vec![1.0]).unwrap()
    }

    /// Build from unsorted (position, weight) pairs, merging positions closer
    /// than `1e-12 * span` and dropping nonpositive weights.
    pub fn from_pairs(mut pairs: Vec<(f64, f64)>) -> Result<Self> {
        pairs.retain(|&(_, w)| w != 0.0);
        if pairs.iter().any(|&(x, w)| !x.is_finite() || !w.is_finite()) {
            return Err(Error::NonFinite);
        }
        if pairs.iter().any(|&(_, w)| w < 0.0) {
            return Err(Error::NonpositiveWeight);
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let span = match (pairs.first(), pairs.last()) {
            (Some(f), Some(l)) => l.0 - f.0,
            _ => 0.0,
        };
        let (atoms, weights) = merge_sorted_atoms(&pairs, 1e-12 * span.max(1e-300));
        Self::new(atoms, weights)
    }

    /// Empirical measure of `samples`, shifted so that its mean is
    /// `center_to`. Duplicate (post-merge) samples get summed weight `k/n`.
    pub fn empirical(samples: &[f64], center_to: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Empty("samples"));
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let shift = center_to - mean;
        let mut shifted: Vec<(f64, f64)> =
            samples.iter().map(|&x| (x + shift, 1.0 / n)).collect();
        shifted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let span = shifted.last().unwrap().0 - shifted.first().unwrap().0;
        let (atoms, weights) = merge_sorted_atoms(&shifted, 1e-12 * span.max(1e-300));
        Self::new(atoms, weights)
    }

    /// Exact pmf of `Binomial(n, p)` shifted by `shift`. Weights that
    /// underflow to zero are dropped and the rest renormalized.
    pub fn binomial(n: u32, p: f64, shift: f64) -> Result<Self> {
        if n == 0 || !(p > 0.0 && p < 1.0) {
            return Err(Error::BadParams(format!("binomial(n={n}, p={p})")));
        }
        let mut pmf = vec![0.0; n as usize + 1];
        pmf[0] = (1.0 - p).powi(n as i32);
        for k in 0..n as usize {
            pmf[k + 1] = pmf[k] * ((n as usize - k) as f64) / ((k + 1) as f64) * p / (1.0 - p);
        }
        let total: f64 = pmf.iter().sum();
        let pairs: Vec<(f64, f64)> = pmf
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(k, &w)| (k as f64 + shift, w / total))
            .collect();
        Self::from_pairs(pairs)
    }

    /// Exact pmf of `Poisson(lambda)` shifted by `shift`, truncated where the
    /// remaining tail mass drops below `1e-14` and renormalized.
    pub fn poisson(lambda: f64, shift: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::BadParams(format!("poisson(lambda={lambda})")));
        }
        let mut pairs = Vec::new();
        let mut pk = (-lambda).exp();
        let mut cumulative = 0.0;
        let kmax = (lambda + 40.0 * lambda.sqrt() + 60.0).ceil() as usize;
        for k in 0..=kmax {
            if pk > 0.0 {
                pairs.push((k as f64 + shift, pk));
            }
            cumulative += pk;
            if 1.0 - cumulative < 1e-14 {
                break;
            }
            pk *= lambda / (k + 1) as f64;
        }
        for p in &mut pairs {
            p.1 /= cumulative;
        }
        Self::from_pairs(pairs)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mass(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    /// Cumulative weights `0 = c_0 < c_1 < .. < c_n = mass`; atom `i` owns the
    /// quantile segment `(c_i, c_{i+1}]`.
    pub fn cumulative(&self) -> &[f64] {
        &self.cum
    }

    pub fn mean(&self) -> Option<f64> {
        if self.is_empty() {
            None
        } else {
            Some(self.cum_wx.last().unwrap() / self.mass())
        }
    }

    pub fn second_moment(&self) -> f64 {
        self.atoms
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * x * x)
            .sum()
    }

    pub fn is_probability(&self, tol: f64) -> bool {
        (self.mass() - 1.0).abs() <= tol
    }

    /// Number of atoms `<= x`.
    fn rank(&self, x: f64) -> usize {
        self.atoms.partition_point(|&a| a <= x)
    }

    /// Right-continuous CDF `F(x) = eta((-inf, x])`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.cum[self.rank(x)]
    }

    /// Left limit `F(x-) = eta((-inf, x))`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        self.cum[self.atoms.partition_point(|&a| a < x)]
    }

    /// Mass of the single atom at `x` (0 when `x` is not an atom).
    pub fn mass_at(&self, x: f64) -> f64 {
        match self.atoms.binary_search_by(|a| a.total_cmp(&x)) {
            Ok(i) => self.weights[i],
            Err(_) => 0.0,
        }
    }

    /// Left-continuous generalized inverse of the CDF, defined for
    /// `0 < u <= mass`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u <= self.mass()) {
            return Err(Error::OutOfRange {
                name: "u",
                value: u,
                lo: 0.0,
                hi: self.mass(),
            });
        }
        // First atom index i with cum[i+1] >= u.
        let i = self.cum[1..].partition_point(|&c| c < u);
        Ok(self.atoms[i])
    }

    /// Exact `int_a^b F^{-1}(v) dv` for `0 <= a <= b <= mass`, accumulated
    /// over the quantile segments overlapping `(a, b]`.
    pub fn quantile_integral(&self, a: f64, b: f64) -> Result<f64> {
        if !(0.0 <= a && a <= b && b <= self.mass() * (1.0 + 1e-12) + 1e-300) {
            return Err(Error::OutOfRange {
                name: "slice",
                value: b,
                lo: a,
                hi: self.mass(),
            });
        }
        let mut total = 0.0;
        for (i, mass) in self.slice(a, b) {
            total += self.atoms[i] * mass;
        }
        Ok(total)
    }

    /// Overlap of the quantile interval `(a, b]` with each atom's segment:
    /// returns `(atom index, mass)` pairs with positive mass.
    pub fn slice(&self, a: f64, b: f64) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        if b <= a {
            return out;
        }
        let start = self.cum[1..].partition_point(|&c| c <= a);
        for i in start..self.atoms.len() {
            let lo = self.cum[i].max(a);
            let hi = self.cum[i + 1].min(b);
            if hi > lo {
                out.push((i, hi - lo));
            }
            if self.cum[i + 1] >= b {
                break;
            }
        }
        out
    }

    /// Potential function `u_eta(x) = int |y - x| eta(dy)`.
    pub fn potential(&self, x: f64) -> f64 {
        let r = self.rank(x);
        let below = self.cum[r];
        let below_wx = self.cum_wx[r];
        let total_wx = *self.cum_wx.last().unwrap();
        x * (2.0 * below - self.mass()) - 2.0 * below_wx + total_wx
    }

    /// Pointwise scaled copy `factor * eta`; `factor = 0` yields the empty
    /// measure.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if factor == 0.0 {
            return Ok(Self::empty());
        }
        if !(factor > 0.0) {
            return Err(Error::NonpositiveWeight);
        }
        Self::new(
            self.atoms.clone(),
            self.weights.iter().map(|w| w * factor).collect(),
        )
    }

    /// Atomwise sum. Atoms are matched by exact coordinate equality, which is
    /// the right notion for measures sharing a parent grid.
    pub fn add(&self, other: &Self) -> Self {
        let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.len() || j < other.len() {
            if j >= other.len() || (i < self.len() && self.atoms[i] < other.atoms[j]) {
                pairs.push((self.atoms[i], self.weights[i]));
                i += 1;
            } else if i >= self.len() || other.atoms[j] < self.atoms[i] {
                pairs.push((other.atoms[j], other.weights[j]));
                j += 1;
            } else {
                pairs.push((self.atoms[i], self.weights[i] + other.weights[j]));
                i += 1;
                j += 1;
            }
        }
        let (atoms, weights): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        Self::new(atoms, weights).expect("sum of valid measures is valid")
    }

    /// Atomwise positive part `(self - other)^+` over the union grid.
    pub fn positive_part_diff(&self, other: &Self) -> Self {
        let mut pairs: Vec<(f64, f64)> = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.len() {
            if j < other.len() && other.atoms[j] < self.atoms[i] {
                j += 1;
                continue;
            }
            let w = if j < other.len() && other.atoms[j] == self.atoms[i] {
                self.weights[i] - other.weights[j]
            } else {
                self.weights[i]
            };
            if w > 0.0 {
                pairs.push((self.atoms[i], w));
            }
            i += 1;
        }
        let (atoms, weights): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        Self::new(atoms, weights).expect("positive part is valid")
    }

    /// Atomwise minimum `self /\ other` (exact coordinate matching).
    pub fn atom_min(&self, other: &Self) -> Self {
        let mut pairs: Vec<(f64, f64)> = Vec::new();
        for (&x, &w) in self.atoms.iter().zip(&self.weights) {
            let wo = other.mass_at(x);
            if wo > 0.0 {
                pairs.push((x, w.min(wo)));
            }
        }
        let (atoms, weights): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        Self::new(atoms, weights).expect("atomwise min is valid")
    }

    /// Restriction to atoms `x <= bound` (or `x < bound` when `inclusive` is
    /// false).
    pub fn restrict_below(&self, bound: f64, inclusive: bool) -> Self {
        let pairs: Vec<(f64, f64)> = self
            .atoms
            .iter()
            .zip(&self.weights)
            .filter(|(&x, _)| if inclusive { x <= bound } else { x < bound })
            .map(|(&x, &w)| (x, w))
            .collect();
        let (atoms, weights): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        Self::new(atoms, weights).unwrap()
    }

    pub fn restrict_above(&self, bound: f64, inclusive: bool) -> Self {
        let pairs: Vec<(f64, f64)> = self
            .atoms
            .iter()
            .zip(&self.weights)
            .filter(|(&x, _)| if inclusive { x >= bound } else { x > bound })
            .map(|(&x, &w)| (x, w))
            .collect();
        let (atoms, weights): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        Self::new(atoms, weights).unwrap()
    }

    /// Atomwise equality within `tol` on positions and weights.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.len() == other.len()
            && self
                .atoms
                .iter()
                .zip(&other.atoms)
                .all(|(a, b)| (a - b).abs() <= tol)
            && self
                .weights
                .iter()
                .zip(&other.weights)
                .all(|(a, b)| (a - b).abs() <= tol)
    }

    /// Half width of the support hull, at least 1; used to scale tolerances.
    pub fn scale(&self) -> f64 {
        self.atoms
            .iter()
            .fold(1.0f64, |acc, &x| acc.max(x.abs()))
    }
}

#[derive(Serialize, Deserialize)]
struct AtomJson {
    x: f64,
    w: f64,
}

#[derive(Serialize, Deserialize)]
struct MeasureJson {
    atoms: Vec<AtomJson>,
}

impl DiscreteMeasure {
    /// JSON form `{"atoms":[{"x":..,"w":..},..]}` with atoms sorted.
    pub fn to_json(&self) -> String {
        let m = MeasureJson {
            atoms: self
                .atoms
                .iter()
                .zip(&self.weights)
                .map(|(&x, &w)| AtomJson { x, w })
                .collect(),
        };
        serde_json::to_string_pretty(&m).expect("measure serializes")
    }

    /// Parse the JSON form; rejects unsorted atoms and nonpositive weights.
    pub fn from_json(s: &str) -> Result<Self> {
        let m: MeasureJson = serde_json::from_str(s)?;
        let (atoms, weights): (Vec<f64>, Vec<f64>) =
            m.atoms.into_iter().map(|a| (a.x, a.w)).unzip();
        Self::new(atoms, weights)
    }

    /// CSV form: one `x,w` line per atom, sorted.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (&x, &w) in self.atoms.iter().zip(&self.weights) {
            out.push_str(&format!("{:.16e},{:.16e}\n", x, w));
        }
        out
    }

    pub fn from_csv(s: &str) -> Result<Self> {
        let mut atoms = Vec::new();
        let mut weights = Vec::new();
        for (ln, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line == "x,w" {
                continue;
            }
            let mut it = line.split(',');
            let x = it
                .next()
                .and_then(|t| t.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::Parse(format!("line {}: expected x,w", ln + 1)))?;
            let w = it
                .next()
                .and_then(|t| t.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::Parse(format!("line {}: expected x,w", ln + 1)))?;
            if it.next().is_some() {
                return Err(Error::Parse(format!("line {}: too many fields", ln + 1)));
            }
            atoms.push(x);
            weights.push(w);
        }
        Self::new(atoms, weights)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::alpha_example_nu;

    fn two_point() -> DiscreteMeasure {
        DiscreteMeasure::new(vec![-1.0, 1.0], vec![0.5, 0.5]).unwrap()
    }

    #[test]
    fn cdf_atom_boundaries() {
        let eta = two_point();
        assert_eq!(eta.cdf(0.0), 0.5);
        assert_eq!(eta.cdf(-1.0), 0.5);
        assert_eq!(eta.cdf(-1.0 - 1e-9), 0.0);
        assert_eq!(eta.cdf(1.0), 1.0);
    }

    #[test]
    fn cdf_alpha_example_at_zero() {
        // alpha = 1: F_nu(0) = (2 - 1 + 1 + 2)/6 = 4/6.
        let nu = alpha_example_nu(1.0);
        assert!((nu.cdf(0.0) - 4.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn quantile_left_continuous_at_jump() {
        let eta = two_point();
        assert_eq!(eta.quantile(0.5).unwrap(), -1.0);
        assert_eq!(eta.quantile(0.500001).unwrap(), 1.0);
        assert!(eta.quantile(0.0).is_err());
        assert!(eta.quantile(1.0 + 1e-9).is_err());
    }

    #[test]
    fn quantile_integral_basics() {
        let d = DiscreteMeasure::dirac(0.0);
        assert_eq!(d.quantile_integral(0.0, 1.0).unwrap(), 0.0);
        let eta = two_point();
        assert_eq!(eta.quantile_integral(0.0, 1.0).unwrap(), 0.0);
        assert_eq!(eta.quantile_integral(0.5, 1.0).unwrap(), 0.5);
    }

    #[test]
    fn quantile_integral_matches_naive_overlap_oracle() {
        // Independent oracle: per-atom interval overlap computed directly.
        let eta = DiscreteMeasure::new(
            vec![-3.0, -0.5, 0.25, 2.0, 7.5],
            vec![0.1, 0.3, 0.25, 0.15, 0.2],
        )
        .unwrap();
        let naive = |a: f64, b: f64| -> f64 {
            let mut acc = 0.0;
            let cum = eta.cumulative();
            for i in 0..eta.len() {
                let lo = cum[i].max(a);
                let hi = cum[i + 1].min(b);
                if hi > lo {
                    acc += eta.atoms()[i] * (hi - lo);
                }
            }
            acc
        };
        let mut state = 0x12345678u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let tol = 1e-12 * 7.5;
        for _ in 0..10_000 {
            let a = next();
            let b = next();
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            assert!((eta.quantile_integral(a, b).unwrap() - naive(a, b)).abs() <= tol);
        }
    }

    #[test]
    fn quantile_integral_riemann_refinement() {
        let eta = DiscreteMeasure::new(vec![-2.0, 0.0, 3.0], vec![0.25, 0.5, 0.25]).unwrap();
        let (a, b) = (0.1, 0.9);
        let n = 1 << 16;
        let h = (b - a) / n as f64;
        let riemann: f64 = (0..n)
            .map(|k| eta.quantile(a + (k as f64 + 0.5) * h).unwrap() * h)
            .sum();
        // Step-function integrand: midpoint rule converges at O(h).
        assert!((eta.quantile_integral(a, b).unwrap() - riemann).abs() < 5.0 * h * 5.0);
    }

    #[test]
    fn potential_paper_values() {
        let mu = two_point();
        assert_eq!(mu.potential(-1.0), 1.0);
        assert_eq!(mu.potential(1.0), 1.0);
        // alpha = 1: u_nu(0) = (8 - 3a)/3 = 5/3.
        let nu = alpha_example_nu(1.0);
        assert!((nu.potential(0.0) - 5.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn potential_asymptotics() {
        let nu = alpha_example_nu(0.5);
        let span = 8.0;
        let far = 1e6 * span;
        let mean = nu.mean().unwrap();
        for x in [far, -far] {
            let expect = (x - mean).abs() * nu.mass();
            assert!((nu.potential(x) - expect).abs() <= 1e-9 * expect.max(1.0));
        }
    }

    #[test]
    fn empirical_examples() {
        let m = DiscreteMeasure::empirical(&[1.0, 3.0], 0.0).unwrap();
        assert!(m.approx_eq(&two_point(), 1e-15));
        let m = DiscreteMeasure::empirical(&[2.0, 2.0, 5.0], 0.0).unwrap();
        let expect =
            DiscreteMeasure::new(vec![-1.0, 2.0], vec![2.0 / 3.0, 1.0 / 3.0]).unwrap();
        assert!(m.approx_eq(&expect, 1e-12));
        assert!(DiscreteMeasure::empirical(&[], 0.0).is_err());
    }

    #[test]
    fn binomial_examples() {
        let m = DiscreteMeasure::binomial(2, 0.5, -1.0).unwrap();
        let expect =
            DiscreteMeasure::new(vec![-1.0, 0.0, 1.0], vec![0.25, 0.5, 0.25]).unwrap();
        assert!(m.approx_eq(&expect, 1e-15));
        let m = DiscreteMeasure::binomial(10, 0.5, -5.0).unwrap();
        assert!(m.mean().unwrap().abs() < 1e-12);
        assert!(DiscreteMeasure::binomial(0, 0.5, 0.0).is_err());
        assert!(DiscreteMeasure::binomial(4, 1.0, 0.0).is_err());
    }

    #[test]
    fn poisson_truncation_keeps_mean() {
        let m = DiscreteMeasure::poisson(4.0, -4.0).unwrap();
        assert!((m.mass() - 1.0).abs() < 1e-14);
        assert!(m.mean().unwrap().abs() < 1e-12);
    }

    #[test]
    fn potential_convexity_random() {
        let nu = alpha_example_nu(1.0);
        let xs: Vec<f64> = (0..200).map(|k| -6.0 + k as f64 * 0.06).collect();
        for w in xs.windows(3) {
            let (x1, x2, x3) = (w[0], w[1], w[2]);
            let t = (x2 - x1) / (x3 - x1);
            let chord = (1.0 - t) * nu.potential(x1) + t * nu.potential(x3);
            assert!(nu.potential(x2) <= chord + 1e-12 * nu.scale());
        }
    }

    #[test]
    fn inverse_transform_sampling_identity() {
        // int f d(eta) = int_0^mass f(F^{-1}(v)) dv for step functions f.
        let eta = alpha_example_nu(0.7);
        let thresholds = [-2.0, 0.0, 0.5, 3.0];
        for &t in &thresholds {
            let direct: f64 = eta
                .atoms()
                .iter()
                .zip(eta.weights())
                .map(|(&x, &w)| if x <= t { w } else { 0.0 })
                .sum();
            let n = 100_000;
            let h = eta.mass() / n as f64;
            let via_quantile: f64 = (0..n)
                .map(|k| {
                    let v = (k as f64 + 0.5) * h;
                    if eta.quantile(v).unwrap() <= t {
                        h
                    } else {
                        0.0
                    }
                })
                .sum();
            assert!((direct - via_quantile).abs() < 1e-4);
        }
    }

    #[test]
    fn json_and_csv_round_trip() {
        let m = alpha_example_nu(0.3);
        let j = DiscreteMeasure::from_json(&m.to_json()).unwrap();
        assert!(m.approx_eq(&j, 0.0));
        let c = DiscreteMeasure::from_csv(&m.to_csv()).unwrap();
        assert!(m.approx_eq(&c, 0.0));
    }

    #[test]
    fn parser_rejects_bad_input() {
        assert!(matches!(
            DiscreteMeasure::from_json(r#"{"atoms":[{"x":1.0,"w":0.5},{"x":0.0,"w":0.5}]}"#),
            Err(Error::Unsorted)
        ));
        assert!(matches!(
            DiscreteMeasure::from_json(r#"{"atoms":[{"x":0.0,"w":-0.5}]}"#),
            Err(Error::NonpositiveWeight)
        ));
        assert!(DiscreteMeasure::from_csv("0.0,0.5\nnot,a,number\n").is_err());
    }
}
