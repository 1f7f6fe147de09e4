//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured margins (visible under --nocapture).

use coxthompson::generalct::{self, residual_general, ResidualForm};
use coxthompson::newton::{NewtonOptions, SolveOptions};
use coxthompson::reconstruct::reconstruct_potential;
use coxthompson::semianalytic::{self, cauchy_solve};
use coxthompson::specfun::{riccati_j, riccati_y, wronskian, Order};
use coxthompson::types::{PhaseShiftSet, RadialGrid};
use coxthompson::{forward, linalg, reconstruct, Complex64};
use coxthompson_cli::commands::{self, GridSpec, InvertArgs, Mode};
use coxthompson_cli::files::PhaseShiftFile;
use std::path::Path;
use std::time::Instant;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// n + 12C at E_lab = 12 MeV: published momenta and reproduction errors of
/// the two methods. Columns: l, Re Lg, Im Lg, Re La, Im La, delta, eta,
/// Dg, Xg, Da, Xa.
const TABLE1: [(u32, f64, f64, f64, f64, f64, f64, f64, f64, f64, f64); 5] = [
    (0, -0.615, -0.068, -0.516, 0.010, 0.522, 0.580, 0.042, 0.043, 0.039, 0.125),
    (1, 1.152, 0.011, 1.480, -0.033, -0.737, 1.000, 0.044, 0.130, 0.303, 0.383),
    (2, 2.613, -0.338, 2.476, -0.209, -0.689, 0.560, 0.130, 0.013, 0.251, 0.005),
    (3, 2.905, 0.037, 3.011, -0.129, 0.172, 0.643, 0.128, 0.054, 0.163, 0.048),
    (4, 4.099, -0.146, 4.095, -0.145, 0.021, 0.831, 0.093, 0.009, 0.018, 0.007),
];

fn fixture_path() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/n12c_12mev.csv")
}

fn xorshift(state: &mut u64) -> f64 {
    *state ^= *state << 13;
    *state ^= *state >> 7;
    *state ^= *state << 17;
    (*state >> 11) as f64 / (1u64 << 53) as f64
}

fn separated_points(state: &mut u64, n: usize) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut pool: Vec<Complex64> = Vec::with_capacity(2 * n);
    while pool.len() < 2 * n {
        let cand = c(7.0 * xorshift(state) - 3.5, 7.0 * xorshift(state) - 3.5);
        if pool.iter().all(|p| (p - cand).norm() > 0.5) {
            pool.push(cand);
        }
    }
    let ys = pool.split_off(n);
    (pool, ys)
}

#[test]
fn criterion_1_cauchy_oracle_equivalence() {
    let start = Instant::now();
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut worst = 0.0f64;
    for trial in 0..100usize {
        let n = 1 + trial % 8;
        let (xs, ys) = separated_points(&mut state, n);
        let product = cauchy_solve(&xs, &ys).unwrap();
        // independent dense route: M[j][i] = 1/(y_j - x_i), rhs = -1
        let m: Vec<Complex64> = ys
            .iter()
            .flat_map(|y| xs.iter().map(move |x| (y - x).finv()))
            .collect();
        let rhs = vec![c(-1.0, 0.0); n];
        let (dense, res) = linalg::solve_with_residual(&m, n, &rhs).unwrap();
        assert!(res < 1e-11);
        for (p, d) in product.iter().zip(&dense) {
            let rel = (p - d).norm() / p.norm().max(1e-30);
            worst = worst.max(rel);
            assert!(rel < 1e-10, "trial {trial} n={n}: rel {rel:.2e}");
        }
    }
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 1.0, "criterion 1 took {dt:?}");
    println!("acceptance criterion 1: PASS (100 systems, worst rel {worst:.2e}, {dt:?})");
}

#[test]
fn criterion_2_single_channel_closed_forms() {
    let even = PhaseShiftSet::from_real(&[(0, 0.3)]).unwrap();
    let rep = semianalytic::solve_parity(&even, &SolveOptions::default()).unwrap();
    assert!(rep.converged);
    let want = c(-2.0 * 0.3 / std::f64::consts::PI, 0.0);
    let gap_e = (rep.solution.values()[0] - want).norm();
    assert!(gap_e < 1e-10, "even gap {gap_e:.2e}");

    let odd = PhaseShiftSet::from_real(&[(1, 0.2)]).unwrap();
    let rep = semianalytic::solve_parity(&odd, &SolveOptions::default()).unwrap();
    assert!(rep.converged);
    let want = c(1.0 - 2.0 * 0.2 / std::f64::consts::PI, 0.0);
    let gap_o = (rep.solution.values()[0] - want).norm();
    assert!(gap_o < 1e-10, "odd gap {gap_o:.2e}");
    println!("acceptance criterion 2: PASS (gaps {gap_e:.2e}, {gap_o:.2e})");
}

/// Synthesize shifts from a Gaussian, invert semi-analytically, re-solve the
/// reconstructed potential, and compare round-trip shifts.
///
/// The reconstructed potential carries the oscillating ~sin(2x)/x^2 tail
/// characteristic of separable-kernel inversions; truncating it at x_max
/// biases the re-extracted shifts by roughly 0.4/x_max, so the verification
/// grid runs far beyond the plotting default to push the truncation bias
/// safely below the 1e-3 budget.
fn parity_round_trip(ls: &[u32]) -> f64 {
    let model = |x: f64| c(-1.0, 0.0) * (-(x / 2.0) * (x / 2.0)).exp();
    let synth = forward::phase_shifts_fn(model, ls, 22.0, 0.005).unwrap();
    let input: Vec<(u32, f64)> = synth.channels.iter().map(|&(l, d, _)| (l, d.re)).collect();
    let set = PhaseShiftSet::from_real(&input).unwrap();
    let rep = semianalytic::solve_parity(&set, &SolveOptions::default()).unwrap();
    assert!(rep.converged, "inversion failed: {:?}", rep.diagnostics);
    let grid = RadialGrid::uniform(0.05, 800.0, 32_000).unwrap();
    let q = reconstruct_potential(rep.solution.values(), ls, &grid).unwrap();
    let back = forward::phase_shifts(&q, ls).unwrap();
    input
        .iter()
        .zip(&back.channels)
        .map(|(&(_, d_in), &(_, d_out, _))| (d_out.re - d_in).abs())
        .fold(0.0, f64::max)
}

#[test]
fn criterion_3_parity_round_trips() {
    let start = Instant::now();
    let even_err = parity_round_trip(&[0, 2, 4]);
    let even_t = start.elapsed();
    assert!(even_err < 1e-3, "even round-trip error {even_err:.2e}");
    assert!(even_t.as_secs_f64() < 30.0);

    let start = Instant::now();
    let odd_err = parity_round_trip(&[1, 3]);
    let odd_t = start.elapsed();
    assert!(odd_err < 1e-3, "odd round-trip error {odd_err:.2e}");
    assert!(odd_t.as_secs_f64() < 30.0);
    println!(
        "acceptance criterion 3: PASS (even {even_err:.2e} in {even_t:?}, odd {odd_err:.2e} in {odd_t:?})"
    );
}

#[test]
fn criterion_4_cross_method_agreement() {
    let model = |x: f64| c(-1.0, 0.0) * (-(x / 2.0) * (x / 2.0)).exp();
    let mut worst = 0.0f64;
    for ls in [&[0u32, 2, 4][..], &[1u32, 3][..]] {
        let synth = forward::phase_shifts_fn(model, ls, 22.0, 0.005).unwrap();
        let input: Vec<(u32, f64)> = synth.channels.iter().map(|&(l, d, _)| (l, d.re)).collect();
        let set = PhaseShiftSet::from_real(&input).unwrap();
        let sa = semianalytic::solve_parity(&set, &SolveOptions::default()).unwrap();
        let ge = generalct::solve_general(&set, &SolveOptions::default(), ResidualForm::Tangent)
            .unwrap();
        assert!(sa.converged && ge.converged);
        for (a, b) in sa.solution.values().iter().zip(ge.solution.values()) {
            worst = worst.max((a - b).norm());
            assert!((a - b).norm() < 1e-6, "cross-method gap {}", (a - b).norm());
        }
    }
    println!("acceptance criterion 4: PASS (worst |dL| {worst:.2e})");
}

#[test]
fn criterion_5_published_dataset_regression() {
    let file = PhaseShiftFile::read(&fixture_path(), false).unwrap();
    let set = file.to_set().unwrap();
    for ((l, d), row) in set.entries().iter().zip(TABLE1.iter()) {
        assert_eq!(*l, row.0);
        assert!((d.re - row.5).abs() < 1e-12);
        assert!(((-2.0 * d.im).exp() - row.6).abs() < 1e-12);
    }

    // The printed general-method momenta are internally inconsistent: the
    // real parts of the l = 2 and l = 3 rows are transposed relative to the
    // root of the system (the equations are symmetric in the set T, so row
    // labels are nominal). Initialized at the values as printed, the solver
    // lands on the transposition-corrected set; the as-printed set leaves a
    // residual three orders of magnitude above it.
    let printed: Vec<Complex64> = TABLE1.iter().map(|r| c(r.1, r.2)).collect();
    let corrected: Vec<Complex64> = vec![
        c(TABLE1[0].1, TABLE1[0].2),
        c(TABLE1[1].1, TABLE1[1].2),
        c(TABLE1[3].1, TABLE1[2].2),
        c(TABLE1[2].1, TABLE1[3].2),
        c(TABLE1[4].1, TABLE1[4].2),
    ];
    let ls = set.ls();
    let deltas = set.deltas();
    let res_printed = residual_general(&ls, &printed, &deltas, ResidualForm::Tangent)
        .unwrap()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let res_corrected = residual_general(&ls, &corrected, &deltas, ResidualForm::Tangent)
        .unwrap()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    assert!(res_corrected < 1e-2, "corrected-set residual {res_corrected:.2e}");
    assert!(res_printed > 20.0 * res_corrected);

    let opts = SolveOptions {
        newton: NewtonOptions::default(),
        initial: Some(printed.clone()),
        ..SolveOptions::default()
    };
    let rep = generalct::solve_general(&set, &opts, ResidualForm::Tangent).unwrap();
    assert!(rep.converged, "{:?}", rep.diagnostics);
    let mut worst_l = 0.0f64;
    for (got, want) in rep.solution.values().iter().zip(&corrected) {
        worst_l = worst_l.max((got - want).norm());
        assert!((got - want).norm() < 0.05, "momentum gap {}", (got - want).norm());
    }

    // reconstruct through the command pipeline and verify the error columns
    let args = InvertArgs {
        mode: Mode::General,
        init: Some(printed),
        grid: GridSpec { min: 0.05, max: 25.0, n: 500 },
        ..InvertArgs::default()
    };
    let inv = commands::invert(&file, &args).unwrap();
    assert!(inv.converged);
    let chk = commands::check(&inv.potential, &file, 1.0).unwrap();
    let mut worst_slack_d = f64::NEG_INFINITY;
    let mut worst_slack_x = f64::NEG_INFINITY;
    for (row, t) in chk.rows.iter().zip(TABLE1.iter()) {
        assert!(
            row.delta_err <= t.7 + 0.05,
            "l={}: Delta {:.3} vs published {:.3} + 0.05",
            row.l,
            row.delta_err,
            t.7
        );
        assert!(
            row.eta_err <= t.8 + 0.05,
            "l={}: Xi {:.3} vs published {:.3} + 0.05",
            row.l,
            row.eta_err,
            t.8
        );
        worst_slack_d = worst_slack_d.max(row.delta_err - t.7);
        worst_slack_x = worst_slack_x.max(row.eta_err - t.8);
    }

    // approximate method against its published columns
    let init_a: Vec<Complex64> = TABLE1.iter().map(|r| c(r.3, r.4)).collect();
    let opts_a = SolveOptions {
        initial: Some(init_a.clone()),
        ..SolveOptions::default()
    };
    let (even, odd) = generalct::solve_approximate(&set, &opts_a).unwrap();
    assert!(even.converged && odd.converged);
    let mut worst_la = 0.0f64;
    let published_even: Vec<Complex64> = TABLE1
        .iter()
        .filter(|r| r.0 % 2 == 0)
        .map(|r| c(r.3, r.4))
        .collect();
    for (got, want) in even.solution.values().iter().zip(&published_even) {
        worst_la = worst_la.max((got - want).norm());
        assert!((got - want).norm() < 0.1);
    }
    let published_odd: Vec<Complex64> = TABLE1
        .iter()
        .filter(|r| r.0 % 2 == 1)
        .map(|r| c(r.3, r.4))
        .collect();
    for (got, want) in odd.solution.values().iter().zip(&published_odd) {
        worst_la = worst_la.max((got - want).norm());
        assert!((got - want).norm() < 0.1);
    }

    let args_a = InvertArgs {
        mode: Mode::Approximate,
        init: Some(init_a),
        grid: GridSpec { min: 0.05, max: 25.0, n: 500 },
        ..InvertArgs::default()
    };
    let inv_a = commands::invert(&file, &args_a).unwrap();
    assert!(inv_a.converged);
    let chk_a = commands::check(&inv_a.potential, &file, 1.0).unwrap();
    let mut worst_slack_a = f64::NEG_INFINITY;
    for (row, t) in chk_a.rows.iter().zip(TABLE1.iter()) {
        assert!(
            row.delta_err <= t.9 + 0.1,
            "approximate l={}: Delta {:.3} vs published {:.3} + 0.1",
            row.l,
            row.delta_err,
            t.9
        );
        worst_slack_a = worst_slack_a.max(row.delta_err - t.9);
    }
    println!(
        "acceptance criterion 5: PASS (general |dL| {worst_l:.1e}, Delta slack {worst_slack_d:+.3}, \
         Xi slack {worst_slack_x:+.3}; approximate |dL| {worst_la:.2}, Delta slack {worst_slack_a:+.3})"
    );
}

#[test]
fn criterion_6_qualitative_potential_shape() {
    // No digitized reference curves exist; the quantitative statement is
    // criterion 5's error columns. Here: both reconstructed potentials are
    // finite, attractive through the interior, and of the tens-of-MeV scale.
    let file = PhaseShiftFile::read(&fixture_path(), false).unwrap();
    let printed: Vec<Complex64> = TABLE1.iter().map(|r| c(r.1, r.2)).collect();
    let init_a: Vec<Complex64> = TABLE1.iter().map(|r| c(r.3, r.4)).collect();
    for (mode, init) in [(Mode::General, printed), (Mode::Approximate, init_a)] {
        let args = InvertArgs {
            mode,
            init: Some(init),
            grid: GridSpec { min: 0.05, max: 25.0, n: 500 },
            ..InvertArgs::default()
        };
        let inv = commands::invert(&file, &args).unwrap();
        let curve = inv.potential.to_curve().unwrap();
        let e = 11.08;
        for (ip, &x) in curve.grid.points().iter().enumerate() {
            let v = curve.q[ip] * e;
            assert!(v.re.is_finite() && v.im.is_finite());
            if (0.25..=1.2).contains(&x) {
                assert!(v.re < 0.0, "interior must be attractive at x={x}: V={v}");
                assert!(v.norm() < 100.0, "|V({x})| = {} MeV", v.norm());
            }
        }
    }
    println!(
        "acceptance criterion 6: PASS (qualitative shape; quantitative agreement is criterion 5)"
    );
}

#[test]
fn criterion_7_property_suites() {
    let start = Instant::now();

    // Wronskian identity across orders and evaluation paths
    let lams = [
        c(0.0, 0.0), c(2.0, 0.0), c(5.0, 0.0), c(-0.615, -0.068),
        c(2.613, -0.338), c(0.5, 0.3), c(3.3, 1.0),
    ];
    for &lam in &lams {
        for &x in &[0.1, 0.9, 3.7, 8.9, 10.5, 13.0, 16.0, 25.0, 41.0, 60.0] {
            let w = wronskian(Order(lam), Order(lam), x).unwrap();
            assert!((w - 1.0).norm() < 1e-10, "W(lam={lam}, x={x})");
        }
    }

    // zero-potential law and unitarity of the forward solver
    let grid = RadialGrid::uniform(0.05, 18.0, 360).unwrap();
    let zeros = vec![c(0.0, 0.0); grid.len()];
    let flags = vec![coxthompson::types::PointFlag::Ok; grid.len()];
    let zero_q = coxthompson::types::PotentialCurve::new(grid, zeros, flags).unwrap();
    let free = forward::phase_shifts(&zero_q, &[0, 1, 2, 3]).unwrap();
    for (l, d, eta) in &free.channels {
        assert!(d.norm() < 1e-8, "free delta_{l} = {d}");
        assert!((eta - 1.0).abs() < 1e-8);
    }

    // zero-input reconstruction law
    let ls = [0u32, 2, 4];
    let t: Vec<Complex64> = ls.iter().map(|&l| c(l as f64 - 1e-6, 0.0)).collect();
    let grid = RadialGrid::uniform(0.05, 25.0, 500).unwrap();
    let q = reconstruct_potential(&t, &ls, &grid).unwrap();
    assert!(q.max_abs() < 1e-5, "zero-input law: {:.2e}", q.max_abs());

    // asymptotic A_L consistency in the weak regime
    {
        let ls = [0u32, 2];
        let tv = [c(-0.004, 0.0), c(1.998, 0.0)];
        let tset = coxthompson::types::ShiftedMomentumSet::new(tv.to_vec(), &ls).unwrap();
        let co = semianalytic::coefficients_even(&tset, &ls).unwrap();
        let grid = RadialGrid::uniform(50.0, 60.0, 64).unwrap();
        let table = reconstruct::expansion_functions(&tv, &ls, &grid).unwrap();
        for (ip, &x) in grid.points().iter().enumerate() {
            for k in 0..2 {
                let asym = co.a[k] * x.cos() + co.b[k] * x.sin();
                assert!((table.values[ip][k] - asym).norm() < 1e-3);
            }
        }
    }

    // unitarity of the S-matrix on the real branch
    let s = PhaseShiftSet::from_real(&[(0, 0.3), (1, -0.2), (2, 0.1)]).unwrap();
    let rep = generalct::solve_general(&s, &SolveOptions::default(), ResidualForm::Tangent)
        .unwrap();
    assert!(rep.converged);
    let re = generalct::reactance(&s.ls(), rep.solution.values()).unwrap();
    for idx in 0..s.len() {
        let i = c(0.0, 1.0);
        let smat = (1.0 + i * re.k_plus[idx]) / (1.0 - i * re.k_minus[idx]);
        assert!((smat.norm() - 1.0).abs() < 1e-10);
    }

    // matching-point independence
    let model = |x: f64| c(-0.8, 0.0) * (-(x / 1.5) * (x / 1.5)).exp();
    let lattice = forward::NumerovLattice::to_x_max(24.0, 0.004).unwrap();
    let wave = forward::integrate_radial_fn(model, 0, lattice);
    let (d1, _) = forward::extract_phase_shift(&wave, 0, (18.0, 20.0)).unwrap();
    let (d2, _) = forward::extract_phase_shift(&wave, 0, (14.7, 22.9)).unwrap();
    assert!((d1 - d2).norm() < 1e-7);

    // integrator convergence order on a smooth potential
    let gauss = |x: f64| c(-0.6, 0.0) * (-(x / 2.0) * (x / 2.0)).exp();
    let run = |h: f64| forward::phase_shifts_fn(gauss, &[0], 18.0, h).unwrap().channels[0].1.re;
    let (d1, d2, d3) = (run(0.02), run(0.01), run(0.005));
    let order = ((d1 - d2).abs() / (d2 - d3).abs()).log2();
    assert!(order > 3.5, "observed order {order:.2}");

    // potential grid-refinement convergence
    {
        let ls = [0u32, 2];
        let tv = [c(-0.27, 0.0), c(1.62, 0.0)];
        let run = |n: usize| {
            let grid = RadialGrid::uniform(0.5, 20.0, n).unwrap();
            reconstruct_potential(&tv, &ls, &grid).unwrap()
        };
        let (coarse, mid, fine) = (run(251), run(501), run(1001));
        let mut d1 = 0.0f64;
        let mut d2 = 0.0f64;
        for i in 1..250 {
            d1 = d1.max((coarse.q[i] - mid.q[2 * i]).norm());
            d2 = d2.max((mid.q[2 * i] - fine.q[4 * i]).norm());
        }
        assert!(d2 < d1 && d1 / d2 > 2.5);
    }

    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 120.0, "criterion 7 took {dt:?}");
    println!("acceptance criterion 7: PASS (property suite in {dt:?})");
}
