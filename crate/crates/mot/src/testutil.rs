//! Shared fixtures for unit tests.

use crate::measures::DiscreteMeasure;
use rand::Rng;

/// mu = (1/3)(d_-2 + d_0 + d_2) from the five-point example family.
pub(crate) fn alpha_example_mu() -> DiscreteMeasure {
    DiscreteMeasure::new(vec![-2.0, 0.0, 2.0], vec![1.0 / 3.0; 3]).unwrap()
}

/// nu = (1/6)((2-a)d_-4 + a d_-1 + 2 d_0 + a d_1 + (2-a)d_4).
pub(crate) fn alpha_example_nu(alpha: f64) -> DiscreteMeasure {
    let mut pairs = vec![
        (-4.0, (2.0 - alpha) / 6.0),
        (-1.0, alpha / 6.0),
        (0.0, 2.0 / 6.0),
        (1.0, alpha / 6.0),
        (4.0, (2.0 - alpha) / 6.0),
    ];
    pairs.retain(|&(_, w)| w > 0.0);
    DiscreteMeasure::from_pairs(pairs).unwrap()
}

/// Random centered probability measure with `n` atoms.
pub(crate) fn random_centered_measure<R: Rng>(rng: &mut R, n: usize) -> DiscreteMeasure {
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

/// Random pair `mu <=cx nu` built by mean-preserving spreads of `mu`.
///
/// Each atom of `mu` keeps a fraction `keep` of its mass in place and sends
/// the rest to two points straddling it with matching barycenter, so the
/// result dominates `mu` in the convex order by construction.
pub(crate) fn random_convex_pair<R: Rng>(
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
