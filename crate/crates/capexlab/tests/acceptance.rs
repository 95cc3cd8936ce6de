//! Acceptance suite: one test per criterion, each printing a PASS line
//! with the measured quantities once its assertions hold.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use capexlab::simplex::oracle::oracle_solve;
use capexlab::simplex::{
    dual_objective, solve, LPInstance, RowSense, SolveOptions, SolveStatus,
};

fn random_instance(rng: &mut ChaCha8Rng, large: bool) -> LPInstance {
    let (n, m) = if large {
        (rng.gen_range(6..=7), rng.gen_range(6..=7))
    } else {
        (rng.gen_range(2..=6), rng.gen_range(1..=6))
    };
    let mut lp = LPInstance::new(n);
    // Mostly positive costs keep a healthy share of bounded optima while
    // the negative tail still produces unbounded instances.
    for c in lp.objective.iter_mut() {
        *c = rng.gen_range(-2.0..8.0);
    }
    for j in 0..n {
        let p: f64 = rng.gen();
        if p < 0.05 {
            lp.set_bounds(j, f64::NEG_INFINITY, f64::INFINITY);
        } else if p < 0.15 {
            lp.set_bounds(j, -rng.gen_range(0.0..5.0), f64::INFINITY);
        } else if p < 0.40 {
            lp.set_bounds(j, 0.0, rng.gen_range(0.5..10.0));
        } // else default [0, inf)
    }
    for _ in 0..m {
        let mut terms = Vec::new();
        for j in 0..n {
            if rng.gen::<f64>() < 0.7 {
                terms.push((j, rng.gen_range(-5.0..5.0)));
            }
        }
        if terms.is_empty() {
            terms.push((rng.gen_range(0..n), rng.gen_range(0.5..5.0)));
        }
        let (sense, rhs) = match rng.gen_range(0..10) {
            0..=4 => (RowSense::Le, rng.gen_range(-2.0..10.0)),
            5..=7 => (RowSense::Ge, rng.gen_range(-10.0..4.0)),
            _ => (RowSense::Eq, rng.gen_range(-3.0..6.0)),
        };
        lp.add_row(sense, rhs, &terms);
    }
    lp
}

/// Criterion 1: the simplex matches the vertex-enumeration oracle in
/// status and objective on >= 500 seeded random instances.
#[test]
fn criterion_1_solver_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let opts = SolveOptions::default();
    let total = 520;
    let mut optimal = 0;
    let mut infeasible = 0;
    let mut unbounded = 0;
    for case in 0..total {
        let lp = random_instance(&mut rng, case % 25 == 24);
        let reference = oracle_solve(&lp).unwrap();
        let got = solve(&lp, &opts).unwrap();
        assert_eq!(
            got.status, reference.status,
            "case {case}: status mismatch\n{lp:?}"
        );
        match reference.status {
            SolveStatus::Optimal => {
                optimal += 1;
                let diff = (got.objective - reference.objective).abs();
                assert!(
                    diff <= 1e-7 * (1.0 + reference.objective.abs()),
                    "case {case}: objective {} vs oracle {} (diff {diff:.3e})\n{lp:?}",
                    got.objective,
                    reference.objective
                );
                let gap = (got.objective - dual_objective(&lp, &got)).abs();
                assert!(
                    gap <= 1e-6 * (1.0 + got.objective.abs()),
                    "case {case}: duality gap {gap:.3e}\n{lp:?}"
                );
            }
            SolveStatus::Infeasible => infeasible += 1,
            SolveStatus::Unbounded => unbounded += 1,
            SolveStatus::IterationLimit => unreachable!(),
        }
    }
    println!(
        "ACCEPTANCE 1 PASS: {total} random LPs agree with the enumeration oracle \
         ({optimal} optimal, {infeasible} infeasible, {unbounded} unbounded)"
    );
}
