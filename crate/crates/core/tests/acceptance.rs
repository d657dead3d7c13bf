//! Acceptance gate: one test per shipped guarantee, each printing a single
//! PASS or FAIL line (run with `--nocapture` to see the PASS lines too).
//!
//! Every tolerance is pinned here as a named constant next to the criterion
//! that uses it.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use conegrad::cone::ConeOrder;
use conegrad::linalg;
use conegrad::oracle::{
    dual_value, h_value, solve_direction, theta_bruteforce, DirectionOutcome, OracleParams,
};
use conegrad::registry::{builtin_registry, registry_problem};
use conegrad::set::FeasibleSet;
use conegrad::validate::{
    fd_jacobian, quasiconvexity_grid_check, sample_feasible, Grid,
};
use conegrad::{fejer_check, solve, SolveStatus, SolverConfig, VectorFunction};

fn report(number: u32, pass: bool, detail: &str) -> bool {
    println!(
        "{} criterion {number}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    pass
}

/// Exact objective-value witness of the non-convexity of the second
/// objective: the chord midpoint sits above the curve by (1, -9/16).
#[test]
fn criterion_01_midpoint_witness() {
    const TOL: f64 = 1e-15;
    let p = registry_problem("double_well").unwrap();
    let start = Instant::now();
    let f0 = p.function.eval(&[0.0]).unwrap();
    let f1 = p.function.eval(&[1.0]).unwrap();
    let fh = p.function.eval(&[0.5]).unwrap();
    let elapsed = start.elapsed();
    let witness = [
        0.5 * (f0[0] + f1[0]) - fh[0],
        0.5 * (f0[1] + f1[1]) - fh[1],
    ];
    let pass = (witness[0] - 1.0).abs() <= TOL
        && (witness[1] - (-9.0 / 16.0)).abs() <= TOL
        && elapsed.as_micros() < 1000;
    assert!(report(
        1,
        pass,
        &format!(
            "chord midpoint minus curve is ({:.16}, {:.16}) in {elapsed:?}",
            witness[0], witness[1]
        ),
    ));
}

/// The two dual scalarizations of the double-well pair collapse to 4t^2 and
/// t^4 + 2, and both pass the quasiconvexity grid scan.
#[test]
fn criterion_02_scalarizations() {
    const TOL: f64 = 1e-12;
    const GRID_TOL: f64 = 1e-9;
    let p = registry_problem("double_well").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let t: f64 = rng.gen_range(-3.0..3.0);
        let f = p.function.eval(&[t]).unwrap();
        let s1 = f[0];
        let s2 = f[0] + f[1];
        worst = worst.max((s1 - 4.0 * t * t).abs());
        worst = worst.max((s2 - (t.powi(4) + 2.0)).abs());
    }
    let grid = Grid::new(vec![-3.0], vec![3.0], vec![1001]).unwrap();
    let qc1 = quasiconvexity_grid_check(&p.function, &[1.0, 0.0], &grid, GRID_TOL).unwrap();
    let qc2 = quasiconvexity_grid_check(&p.function, &[1.0, 1.0], &grid, GRID_TOL).unwrap();
    let pass = worst <= TOL && qc1 && qc2;
    assert!(report(
        2,
        pass,
        &format!("worst scalarization deviation {worst:.3e}, grid checks ({qc1}, {qc2})"),
    ));
}

/// Full solver runs on the double-well pair from four starts: status,
/// residual, iteration and time budgets, and closeness of the endpoint to
/// the unique stationary point.
#[test]
fn criterion_03_double_well_convergence() {
    const RESIDUAL_TOL: f64 = 1e-8;
    const ENDPOINT_TOL: f64 = 1e-4;
    let p = registry_problem("double_well").unwrap();
    let config = SolverConfig::default();
    let start = Instant::now();
    let mut all_stationary = true;
    let mut worst_residual = 0.0f64;
    let mut worst_endpoint = 0.0f64;
    let mut worst_iters = 0usize;
    for x0 in [-3.0, -1.0, 0.5, 3.0] {
        let r = solve(&p.cone, &p.function, &p.set, &[x0], &config).unwrap();
        all_stationary &= r.status == SolveStatus::Stationary;
        worst_residual = worst_residual.max(r.stationarity_residual);
        worst_endpoint = worst_endpoint.max(r.x_final[0].abs());
        worst_iters = worst_iters.max(r.iterations.len());
    }
    let elapsed = start.elapsed();
    let pass = all_stationary
        && worst_residual <= RESIDUAL_TOL
        && worst_endpoint <= ENDPOINT_TOL
        && worst_iters <= 1000
        && elapsed.as_secs_f64() < 1.0;
    assert!(report(
        3,
        pass,
        &format!(
            "stationary from all four starts: {all_stationary}, worst residual {worst_residual:.3e}, \
             worst |x_final| {worst_endpoint:.3e} (target {ENDPOINT_TOL:.0e}), \
             {worst_iters} iterations max, {elapsed:?} total"
        ),
    ));
}

/// With one objective and no certification slack the method is the classical
/// projected gradient method with Armijo backtracking; iterates must agree
/// with a standalone reimplementation.
#[test]
fn criterion_04_classical_equivalence() {
    const TOL: f64 = 1e-12;

    // Standalone classical loop, written against nothing but f(x) = x^2.
    fn classical(x0: f64, beta: f64, delta: f64, tau: f64, iters: usize) -> Vec<f64> {
        let f = |x: f64| x * x;
        let grad = |x: f64| 2.0 * x;
        let mut xs = vec![x0];
        let mut x = x0;
        for _ in 0..iters {
            let v = -(beta * grad(x));
            let mut j = 0i32;
            let t = loop {
                let t = tau.powi(-j);
                if f(x + t * v) <= f(x) + delta * t * (grad(x) * v) {
                    break t;
                }
                j += 1;
                assert!(j < 60, "classical backtracking runaway");
            };
            x += t * v;
            xs.push(x);
        }
        xs
    }

    let p = registry_problem("scalar_quad").unwrap();
    let mut pass = true;
    let mut worst = 0.0f64;
    for beta in [0.3, 1.0] {
        let config = SolverConfig {
            sigma: 0.0,
            eps_stat: 0.0,
            beta_hat: beta,
            max_iter: 50,
            ..SolverConfig::default()
        };
        let r = solve(&p.cone, &p.function, &p.set, &[3.7], &config).unwrap();
        let reference = classical(3.7, beta, config.delta, config.tau, r.iterations.len());
        for (k, rec) in r.iterations.iter().enumerate() {
            let diff = (rec.x[0] - reference[k]).abs();
            worst = worst.max(diff);
            pass &= diff <= TOL;
        }
        let diff = (r.x_final[0] - reference[r.iterations.len()]).abs();
        worst = worst.max(diff);
        pass &= diff <= TOL;
        if beta == 0.3 {
            pass &= r.iterations.len() == 50;
        }
    }
    assert!(report(
        4,
        pass,
        &format!("iterates match the standalone loop, worst deviation {worst:.3e}"),
    ));
}

/// Direction subproblem closed form on the shifted-parabola pair: at x = 3
/// the optimum is theta = -2 attained by v = -2, and x = 1 is stationary.
#[test]
fn criterion_05_direction_oracle_exactness() {
    const VALUE_TOL: f64 = 1e-6;
    const RESIDUAL_TOL: f64 = 1e-8;
    let p = registry_problem("pareto_quad2").unwrap();
    let params = OracleParams {
        sigma: 0.0,
        ..OracleParams::default()
    };
    let at3 = solve_direction(&p.cone, &p.function, &p.set, &[3.0], &params).unwrap();
    let descent_ok = match &at3 {
        DirectionOutcome::Descent(cert) => {
            (cert.primal - (-2.0)).abs() <= VALUE_TOL && (cert.v[0] - (-2.0)).abs() <= VALUE_TOL
        }
        _ => false,
    };
    let at1 = solve_direction(&p.cone, &p.function, &p.set, &[1.0], &params).unwrap();
    let stationary_ok = match &at1 {
        DirectionOutcome::Stationary { residual } => residual.abs() <= RESIDUAL_TOL,
        _ => false,
    };
    assert!(report(
        5,
        descent_ok && stationary_ok,
        &format!("x=3 outcome {at3:?}; x=1 outcome {at1:?}"),
    ));
}

/// Every direction the solver accepts under a certification slack satisfies
/// both the recorded-certificate inequality and the same inequality against
/// an independent grid minimization.
#[test]
fn criterion_06_certificate_soundness() {
    const GRID_SLACK: f64 = 1e-3;
    let mut pass = true;
    let mut checked = 0usize;
    let mut worst_grid_excess = f64::NEG_INFINITY;
    for sigma in [0.05, 0.3, 0.9] {
        for p in builtin_registry() {
            let config = SolverConfig {
                sigma,
                ..SolverConfig::default()
            };
            let r = solve(&p.cone, &p.function, &p.set, &p.x0, &config).unwrap();
            for rec in &r.iterations {
                pass &= rec.h <= (1.0 - sigma) * rec.q;
                let (lambda_steps, v_steps) = if p.function.n() == 1 { (401, 4001) } else { (101, 201) };
                let theta_grid = theta_bruteforce(
                    &p.cone,
                    &p.function,
                    &p.set,
                    &rec.x,
                    config.beta_hat,
                    lambda_steps,
                    v_steps,
                )
                .unwrap();
                let excess = rec.h - ((1.0 - sigma) * theta_grid + GRID_SLACK);
                worst_grid_excess = worst_grid_excess.max(excess);
                pass &= excess <= 0.0;
                checked += 1;
            }
        }
    }
    assert!(report(
        6,
        pass,
        &format!(
            "{checked} accepted directions over three slack levels, worst grid excess {worst_grid_excess:.3e}"
        ),
    ));
}

/// Feasibility of every iterate and order-decrease of every objective step,
/// with zero violations allowed.
#[test]
fn criterion_07_monotonicity_and_feasibility() {
    const FEAS_TOL: f64 = 1e-9;
    const ORDER_TOL: f64 = 1e-10;
    let mut pass = true;
    let mut steps = 0usize;
    for p in builtin_registry() {
        let r = solve(&p.cone, &p.function, &p.set, &p.x0, &SolverConfig::default()).unwrap();
        let mut xs: Vec<&[f64]> = r.iterations.iter().map(|rec| rec.x.as_slice()).collect();
        xs.push(&r.x_final);
        let mut fs: Vec<&[f64]> = r.iterations.iter().map(|rec| rec.fx.as_slice()).collect();
        fs.push(&r.f_final);
        for x in &xs {
            pass &= p.set.contains(x, FEAS_TOL).unwrap();
        }
        for pair in fs.windows(2) {
            pass &= p.cone.k_leq(pair[1], pair[0], ORDER_TOL).unwrap();
            steps += 1;
        }
    }
    assert!(report(
        7,
        pass,
        &format!("{steps} steps across the registry, all feasible and order-decreasing"),
    ));
}

/// The recorded per-step slack bounds the growth of the squared distance to
/// a point whose objective value precedes the whole run.
#[test]
fn criterion_08_fejer_inequality() {
    const TOL: f64 = 1e-9;
    let p = registry_problem("double_well").unwrap();
    let mut pass = true;
    let mut worst = f64::NEG_INFINITY;
    let mut pairs = 0usize;
    for x0 in [-3.0, -1.0, 0.5, 3.0] {
        let r = solve(&p.cone, &p.function, &p.set, &[x0], &SolverConfig::default()).unwrap();
        let audit = fejer_check(&p.cone, &p.function, &r.iterations, &[0.0]).unwrap();
        worst = worst.max(audit.max_violation);
        pairs += audit.pairs;
        pass &= audit.max_violation <= TOL;
    }
    assert!(report(
        8,
        pass,
        &format!("{pairs} iterate pairs from four starts, max violation {worst:.3e}"),
    ));
}

/// Projection onto every feasible-set variant: idempotent, nonexpansive,
/// and variationally correct against sampled feasible points.
#[test]
fn criterion_09_projection_properties() {
    const IDEM_TOL: f64 = 1e-10;
    const NONEXP_TOL: f64 = 1e-10;
    const VI_TOL: f64 = 1e-9;
    let sets = [
        FeasibleSet::whole_space(2),
        FeasibleSet::bounded_box(vec![-1.0, f64::NEG_INFINITY], vec![2.0, 5.0]).unwrap(),
        FeasibleSet::ball(vec![0.3, -0.7], 2.0).unwrap(),
        FeasibleSet::simplex(3, 1.0).unwrap(),
    ];
    let mut pass = true;
    let mut cases = 0usize;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for set in &sets {
        let dim = set.dim();
        for _ in 0..1000 {
            let z: Vec<f64> = (0..dim)
                .map(|_| 5.0 * rng.sample::<f64, _>(StandardNormal))
                .collect();
            let z2: Vec<f64> = (0..dim)
                .map(|_| 5.0 * rng.sample::<f64, _>(StandardNormal))
                .collect();
            let pz = set.project(&z).unwrap();
            let ppz = set.project(&pz).unwrap();
            pass &= linalg::distance(&ppz, &pz) <= IDEM_TOL;
            let pz2 = set.project(&z2).unwrap();
            pass &= linalg::distance(&pz, &pz2) <= linalg::distance(&z, &z2) + NONEXP_TOL;
            let c = sample_feasible(set, &mut rng);
            let residual = linalg::dot(&linalg::sub(&z, &pz), &linalg::sub(&c, &pz));
            pass &= residual <= VI_TOL;
            cases += 1;
        }
    }
    assert!(report(
        9,
        pass,
        &format!("{cases} random projections over four set variants"),
    ));
}

/// The cone gauge is positively homogeneous, subadditive, and 1-Lipschitz
/// for unit dual generators.
#[test]
fn criterion_10_gauge_properties() {
    const TOL: f64 = 1e-10;
    let cones = [
        ConeOrder::new(2, &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap(),
        ConeOrder::new(
            3,
            &[
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
            ],
        )
        .unwrap(),
        ConeOrder::new(2, &[vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap(),
    ];
    let mut pass = true;
    let mut cases = 0usize;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for cone in &cones {
        let dim = cone.dim();
        for _ in 0..1000 {
            let y: Vec<f64> = (0..dim)
                .map(|_| 3.0 * rng.sample::<f64, _>(StandardNormal))
                .collect();
            let u: Vec<f64> = (0..dim)
                .map(|_| 3.0 * rng.sample::<f64, _>(StandardNormal))
                .collect();
            let alpha: f64 = rng.gen_range(0.0..5.0);
            let scaled: Vec<f64> = y.iter().map(|t| alpha * t).collect();
            pass &= (cone.phi(&scaled).unwrap() - alpha * cone.phi(&y).unwrap()).abs() <= TOL;
            let summed: Vec<f64> = y.iter().zip(&u).map(|(a, b)| a + b).collect();
            pass &= cone.phi(&summed).unwrap()
                <= cone.phi(&y).unwrap() + cone.phi(&u).unwrap() + TOL;
            pass &= (cone.phi(&y).unwrap() - cone.phi(&u).unwrap()).abs()
                <= linalg::distance(&y, &u) + TOL;
            cases += 1;
        }
    }
    assert!(report(
        10,
        pass,
        &format!("{cases} random gauge evaluations over three cones"),
    ));
}

/// Parsed objectives differentiate correctly and survive a print-and-reparse
/// round trip.
#[test]
fn criterion_11_parser_and_differentiation() {
    const FD_REL: f64 = 1e-6;
    const FD_ABS: f64 = 1e-8;
    const ROUND_TRIP_TOL: f64 = 1e-12;
    let mut pass = true;
    let mut points = 0usize;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for p in builtin_registry() {
        let texts = p.function.objective_texts().unwrap();
        let reparsed = VectorFunction::from_expressions(&p.function.variable_names(), &texts).unwrap();
        for _ in 0..50 {
            let x = sample_feasible(&p.set, &mut rng);
            let sym = p.function.jacobian(&x).unwrap();
            let fd = fd_jacobian(&p.function, &x, 1e-6).unwrap();
            for r in 0..p.function.m() {
                for c in 0..p.function.n() {
                    let allowed = FD_ABS + FD_REL * sym.get(r, c).abs();
                    pass &= (sym.get(r, c) - fd.get(r, c)).abs() <= allowed;
                }
            }
            let orig = p.function.eval(&x).unwrap();
            let again = reparsed.eval(&x).unwrap();
            for (a, b) in orig.iter().zip(&again) {
                pass &= (a - b).abs() <= ROUND_TRIP_TOL;
            }
            points += 1;
        }
    }
    assert!(report(
        11,
        pass,
        &format!("{points} sampled points: Jacobians vs finite differences and reparse agreement"),
    ));
}

/// Weak duality holds between any multiplier's dual value and any feasible
/// direction's primal value (supporting check for the certificate criteria).
#[test]
fn weak_duality_spot_checks() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for p in builtin_registry() {
        for _ in 0..20 {
            let x = sample_feasible(&p.set, &mut rng);
            let raw: Vec<f64> = (0..p.cone.generator_count())
                .map(|_| rng.gen_range(0.0..1.0f64).max(1e-9))
                .collect();
            let total: f64 = raw.iter().sum();
            let lambda: Vec<f64> = raw.iter().map(|l| l / total).collect();
            let (q, _) = dual_value(&p.cone, &p.function, &p.set, &x, &lambda, 1.0).unwrap();
            let c = sample_feasible(&p.set, &mut rng);
            let v = linalg::sub(&c, &x);
            let h = h_value(&p.cone, &p.function, &p.set, &x, &v, 1.0).unwrap();
            assert!(
                q <= h + 1e-9,
                "dual value {q} above primal value {h} on {}",
                p.name
            );
        }
    }
}
