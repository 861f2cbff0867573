//! The floating-point simplex against an exact rational vertex-enumeration
//! oracle on small random problems.

mod common;

use common::rational::{rat, to_f64, vertex_optima, Rat};
use mot::simplex::{LinearProgram, LpStatus, Sense, SimplexSolver};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random bounded feasible LP with dyadic data (exactly representable in
/// rationals): b = A x0 for a nonnegative x0, plus a simplex-bounding row.
fn random_instance<R: Rng>(
    rng: &mut R,
) -> Option<(Vec<Vec<f64>>, Vec<f64>, Vec<f64>)> {
    let m = rng.gen_range(2..=4);
    let n = rng.gen_range(m + 2..=10);
    let mut rows: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..n).map(|_| rng.gen_range(-3i32..=3) as f64).collect())
        .collect();
    let choices = [0.0, 0.5, 1.0, 1.5, 2.0];
    let x0: Vec<f64> = (0..n).map(|_| choices[rng.gen_range(0..choices.len())]).collect();
    if x0.iter().filter(|&&v| v > 0.0).count() < 2 {
        return None;
    }
    rows.push(vec![1.0; n]);
    let rhs: Vec<f64> = rows
        .iter()
        .map(|r| r.iter().zip(&x0).map(|(a, x)| a * x).sum())
        .collect();
    let costs: Vec<f64> = (0..n).map(|_| rng.gen_range(-5i32..=5) as f64).collect();
    Some((rows, rhs, costs))
}

#[test]
fn random_lps_match_rational_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let solver = SimplexSolver::default();
    let mut done = 0;
    while done < 20 {
        let Some((rows, rhs, costs)) = random_instance(&mut rng) else {
            continue;
        };
        let rrows: Vec<Vec<Rat>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| rat(v)).collect())
            .collect();
        let rrhs: Vec<Rat> = rhs.iter().map(|&v| rat(v)).collect();
        let rcosts: Vec<Rat> = costs.iter().map(|&v| rat(v)).collect();
        let (lo, hi) = vertex_optima(&rrows, &rrhs, &rcosts).expect("feasible by construction");

        let lp = LinearProgram::from_dense(&rows, rhs.clone(), costs).unwrap();
        let min = solver.solve(&lp, Sense::Min).unwrap();
        let max = solver.solve(&lp, Sense::Max).unwrap();
        assert_eq!(min.status, LpStatus::Optimal);
        assert_eq!(max.status, LpStatus::Optimal);
        let (lo, hi) = (to_f64(&lo), to_f64(&hi));
        assert!(
            (min.value - lo).abs() <= 1e-9 * (1.0 + lo.abs()),
            "min {} vs oracle {lo}",
            min.value
        );
        assert!(
            (max.value - hi).abs() <= 1e-9 * (1.0 + hi.abs()),
            "max {} vs oracle {hi}",
            max.value
        );
        // Weak duality at both optima.
        for sol in [&min, &max] {
            let dual: f64 = sol.duals.iter().zip(&rhs).map(|(y, b)| y * b).sum();
            assert!((sol.value - dual).abs() <= 1e-8 * (1.0 + sol.value.abs()));
            assert!(sol.max_residual <= 1e-9 * (1.0 + rhs.iter().fold(0.0f64, |a, &b| a.max(b.abs()))));
        }
        done += 1;
    }
}

#[test]
fn identical_inputs_identical_pivots() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let solver = SimplexSolver::default();
    for _ in 0..5 {
        let Some((rows, rhs, costs)) = random_instance(&mut rng) else {
            continue;
        };
        let lp = LinearProgram::from_dense(&rows, rhs, costs).unwrap();
        let a = solver.solve(&lp, Sense::Min).unwrap();
        let b = solver.solve(&lp, Sense::Min).unwrap();
        assert_eq!(a.iterations, b.iterations);
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert!(a
            .primal
            .iter()
            .zip(&b.primal)
            .all(|(x, y)| x.to_bits() == y.to_bits()));
    }
}
