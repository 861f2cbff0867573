//! Properties of the direct coupling constructions against the LP route.

mod common;

use common::{random_concave_cost, random_convex_pair, random_nested_pair, random_vertex};
use mot::couplings::{
    build_nested_pi_down, build_nested_pi_up, build_nondecreasing_with_diagonal, decompose,
    detect_dispersion, detect_nested_supports, dispersion_split, is_nonincreasing,
};
use mot::measures::DiscreteMeasure;
use mot::motlp::{
    build_mot_lp_with, coupling_from_lp_solution, solve_mot, solve_mot_directional, CostSpec,
    CouplingNorm,
};
use mot::pointmass::point_mass_profile;
use mot::simplex::{LpStatus, Sense, SimplexSolver};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn nested_constructions_agree_with_lp() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let solver = SimplexSolver::default();
    for _ in 0..10 {
        let n = rng.gen_range(2..6);
        let (mu, nu) = random_nested_pair(&mut rng, n);
        // pi_up cross-checks the LP maximizer against the quantile-sweep
        // construction internally; pi_down must be the rho = 1 minimizer.
        let up = build_nested_pi_up(&mu, &nu, &solver).unwrap();
        assert!(mot::couplings::is_nondecreasing(&up).holds);
        let down = build_nested_pi_down(&mu, &nu).unwrap();
        let min = solve_mot(&mu, &nu, &CostSpec::Power(1.0), Sense::Min, &solver).unwrap();
        assert!(
            down.distance(&min.coupling, CouplingNorm::Tv) < 1e-8,
            "nested minimizer differs from pi_down"
        );
        assert!(is_nonincreasing(&min.coupling).holds);
    }
}

#[test]
fn nested_uniqueness_across_cost_perturbations() {
    // Under nested supports all rho = 1 maximizers coincide: perturbing the
    // cost towards different tie-breaks must return the same coupling.
    let mut rng = ChaCha8Rng::seed_from_u64(97);
    let solver = SimplexSolver::default();
    let (mu, nu) = random_nested_pair(&mut rng, 4);
    let base = solve_mot(&mu, &nu, &CostSpec::Power(1.0), Sense::Max, &solver).unwrap();
    for k in 0..10 {
        let eps = 1e-9;
        let nj = nu.len();
        let tweak: Vec<f64> = (0..mu.len() * nj)
            .map(|t| eps * (((t * 31 + k * 17) % 13) as f64 / 13.0))
            .collect();
        let lp = build_mot_lp_with(
            &mu,
            &nu,
            |i, j, x, y| (x - y).abs() + tweak[i * nj + j],
            None,
        );
        let sol = solver.solve(&lp, Sense::Max).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        let pi = coupling_from_lp_solution(&mu, &nu, &sol.primal, 1e-10).unwrap();
        assert!(
            pi.distance(&base.coupling, CouplingNorm::Tv) <= 1e-8,
            "tie-break {k} produced a different maximizer"
        );
    }
}

#[test]
fn sweep_constructor_attains_directional_optimum_for_concave_costs() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let solver = SimplexSolver::default();
    let mut done = 0;
    while done < 5 {
        let n = rng.gen_range(2..5);
        let (mu, nu) = random_convex_pair(&mut rng, n, true);
        let vertex = random_vertex(&mu, &nu, &mut rng, &solver);
        let split = decompose(&vertex).renormalize_to(&nu).unwrap();
        let Ok(pi) = build_nondecreasing_with_diagonal(&mu, &nu, &split) else {
            continue;
        };
        let span = 2.0
            * (mu.scale() + nu.scale());
        let cost = random_concave_cost(&mut rng, span);
        let max = solve_mot_directional(&mu, &nu, &split, &cost, Sense::Max, &solver).unwrap();
        assert!(
            pi.cost(&cost) >= max.value - 1e-8 * (1.0 + max.value.abs()),
            "sweep construction misses the directional optimum"
        );
        assert!(pi.distance(&max.coupling, CouplingNorm::Tv) < 1e-7);
        done += 1;
    }
}

#[test]
fn straight_diagonal_atoms_carry_common_mass_and_positive_gap() {
    // Non-decreasing couplings can only go straight where the potentials
    // touch or where both measures share an atom under a positive gap.
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    let solver = SimplexSolver::default();
    for _ in 0..10 {
        let n = rng.gen_range(3..6);
        let (mu, nu) = random_convex_pair(&mut rng, n, true);
        let report = solve_mot(&mu, &nu, &CostSpec::Power(0.7), Sense::Max, &solver).unwrap();
        let split = decompose(&report.coupling);
        let scale = mu.scale().max(nu.scale());
        for (&x, &w) in split.nu_0.atoms().iter().zip(split.nu_0.weights()) {
            if w < 1e-9 {
                continue;
            }
            let gap = nu.potential(x) - mu.potential(x);
            if gap > 1e-10 * scale {
                let common = mu.mass_at(x).min(nu.mass_at(x));
                assert!(
                    common > 0.0 && w <= common + 1e-9,
                    "straight atom at {x} without common mass"
                );
            }
        }
    }
}

#[test]
fn dispersion_equivalence_with_straight_plus_nonincreasing_build() {
    let mut rng = ChaCha8Rng::seed_from_u64(87);
    for k in 0..14 {
        let n = rng.gen_range(2..5);
        let (mu, nu) = if k % 2 == 0 {
            random_nested_pair(&mut rng, n)
        } else {
            random_convex_pair(&mut rng, n, true)
        };
        if mu.approx_eq(&nu, 0.0) {
            continue;
        }
        let excess = mu.positive_part_diff(&nu);
        let deficit = nu.positive_part_diff(&mu);
        if excess.is_empty() {
            continue;
        }
        // Independent route: the normalized positive parts admit a
        // non-increasing coupling iff they satisfy nested supports.
        let ex = excess.scaled(1.0 / excess.mass()).unwrap();
        let de = deficit.scaled(1.0 / deficit.mass()).unwrap();
        let buildable = build_nested_pi_down(&ex, &de).is_ok();
        let detected = detect_dispersion(&mu, &nu).is_some();
        assert_eq!(buildable, detected, "dispersion mismatch");
        if let Some((a, b)) = detect_dispersion(&mu, &nu) {
            let split = dispersion_split(&mu, &nu, a, b);
            let total = split.nu_l.mass() + split.nu_0.mass() + split.nu_r.mass();
            assert!((total - 1.0).abs() < 1e-12);
            assert!(split.nu_l.atoms().iter().all(|&y| y <= a));
            assert!(split.nu_r.atoms().iter().all(|&y| y >= b));
        }
    }
}

#[test]
fn forced_diagonal_row_is_the_extremal_kernel() {
    // Where the diagonal mass is forced positive, the diagonal-minimizing
    // coupling's row at that atom equals eta_x.
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let solver = SimplexSolver::default();
    let mut done = 0;
    while done < 6 {
        let n = rng.gen_range(2..5);
        let (mu, nu) = random_convex_pair(&mut rng, n, true);
        let scale = mu.scale().max(nu.scale());
        let mut candidates: Vec<(usize, f64)> = Vec::new();
        for (i, (&x, &w)) in mu.atoms().iter().zip(mu.weights()).enumerate() {
            if nu.potential(x) - mu.potential(x) <= 1e-10 * scale {
                continue;
            }
            let p = point_mass_profile(&mu, &nu, x).unwrap();
            if w - p.p_minus - p.p_plus > 1e-6 {
                candidates.push((i, x));
            }
        }
        let Some(&(i0, x0)) = candidates.first() else {
            continue;
        };
        let profile = point_mass_profile(&mu, &nu, x0).unwrap();
        let j0 = nu.atoms().binary_search_by(|p| p.total_cmp(&x0)).unwrap();
        let lp = build_mot_lp_with(
            &mu,
            &nu,
            |i, j, _, _| if (i, j) == (i0, j0) { 1.0 } else { 0.0 },
            None,
        );
        let sol = solver.solve(&lp, Sense::Min).unwrap();
        assert!((sol.value - profile.inf_diag).abs() < 1e-8);
        let pi = coupling_from_lp_solution(&mu, &nu, &sol.primal, 1e-10).unwrap();
        // Row at x0, normalized, against eta_x in TV.
        let mut tv = 0.0;
        let w0 = mu.weights()[i0];
        for (j, &y) in nu.atoms().iter().enumerate() {
            let got: f64 = pi
                .entries()
                .iter()
                .filter(|&&(i, jj, _)| i == i0 && jj == j)
                .map(|&(_, _, m)| m)
                .sum();
            tv += (got / w0 - profile.eta_x.mass_at(y)).abs();
        }
        assert!(0.5 * tv < 1e-7, "row kernel differs from eta_x: tv {tv}");
        // No crossing mass around x0 in the minimizing coupling.
        for (x, y, m) in pi.support() {
            if m > 1e-9 {
                assert!(
                    !((x < x0 && y > x0) || (x > x0 && y < x0)),
                    "mass crosses the forced atom"
                );
            }
        }
        done += 1;
    }
}
