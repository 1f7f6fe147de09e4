//! Damped Newton iteration on complex residual maps.
//!
//! The residuals of both nonlinear systems are analytic in each unknown away
//! from poles, so the Jacobian is the complex derivative approximated by a
//! one-sided difference with a small real step. Residual evaluation is
//! allowed to fail with a pole-proximity error; the line search treats that
//! exactly like a non-decreasing step and retreats.

use crate::error::CtError;
use crate::linalg;
use crate::types::{check_admissible, ShiftedMomentumSet, SolveReport};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct NewtonOptions {
    /// Convergence threshold on the residual infinity norm.
    pub tol: f64,
    pub max_iter: usize,
    /// Forward-difference step for the complex Jacobian.
    pub fd_step: f64,
    /// Step halvings allowed per iteration before giving up on descent.
    pub max_halvings: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            tol: 1e-10,
            max_iter: 200,
            fd_step: 1e-7,
            max_halvings: 30,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NewtonOutcome {
    pub x: Vec<Complex64>,
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub diagnostics: Vec<String>,
}

fn inf_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Minimize ||f(x)||_inf to below tol by damped Newton steps.
/// Returns the best iterate seen when convergence fails.
pub fn solve_complex_system<F>(f: F, x0: &[Complex64], opts: &NewtonOptions) -> NewtonOutcome
where
    F: Fn(&[Complex64]) -> Result<Vec<Complex64>, CtError>,
{
    let n = x0.len();
    let mut diagnostics = Vec::new();
    let mut x = x0.to_vec();

    // a pole-trapped starting point gets nudged once
    let mut fx = match f(&x) {
        Ok(v) => v,
        Err(e) if e.is_pole() => {
            diagnostics.push(format!("initial point rejected ({e}); restarting from offset"));
            for xi in x.iter_mut() {
                *xi += Complex64::new(1.1e-3, 7.0e-4);
            }
            match f(&x) {
                Ok(v) => v,
                Err(e) => {
                    return NewtonOutcome {
                        x,
                        residual_norm: f64::INFINITY,
                        iterations: 0,
                        converged: false,
                        diagnostics: vec![format!("residual evaluation failed: {e}")],
                    }
                }
            }
        }
        Err(e) => {
            return NewtonOutcome {
                x,
                residual_norm: f64::INFINITY,
                iterations: 0,
                converged: false,
                diagnostics: vec![format!("residual evaluation failed: {e}")],
            }
        }
    };
    let mut fnorm = inf_norm(&fx);
    let mut best = (x.clone(), fnorm);
    let mut pole_hits = 0usize;

    for iter in 0..opts.max_iter {
        if fnorm < opts.tol {
            return NewtonOutcome {
                x,
                residual_norm: fnorm,
                iterations: iter,
                converged: true,
                diagnostics,
            };
        }

        // forward-difference complex Jacobian, column by column
        let mut jac = vec![Complex64::new(0.0, 0.0); n * n];
        let mut jac_ok = true;
        'cols: for col in 0..n {
            let mut xp = x.clone();
            xp[col] += opts.fd_step;
            let fp = match f(&xp) {
                Ok(v) => v,
                Err(_) => {
                    // probe from the other side of the pole
                    xp[col] -= 2.0 * opts.fd_step;
                    match f(&xp) {
                        Ok(v) => {
                            for r in 0..n {
                                jac[r * n + col] = (fx[r] - v[r]) / opts.fd_step;
                            }
                            continue 'cols;
                        }
                        Err(e) => {
                            diagnostics.push(format!("jacobian column {col} failed: {e}"));
                            jac_ok = false;
                            break 'cols;
                        }
                    }
                }
            };
            for r in 0..n {
                jac[r * n + col] = (fp[r] - fx[r]) / opts.fd_step;
            }
        }
        if !jac_ok {
            break;
        }

        let neg_fx: Vec<Complex64> = fx.iter().map(|c| -c).collect();
        let step = match linalg::solve_with_residual(&jac, n, &neg_fx) {
            Ok((s, _)) => s,
            Err(e) => {
                diagnostics.push(format!("newton step solve failed at iteration {iter}: {e}"));
                break;
            }
        };

        // damped line search with pole retreat
        let mut scale = 1.0f64;
        let mut accepted = false;
        for _ in 0..=opts.max_halvings {
            let trial: Vec<Complex64> =
                x.iter().zip(&step).map(|(xi, si)| xi + scale * si).collect();
            match f(&trial) {
                Ok(ft) => {
                    let fn_t = inf_norm(&ft);
                    if fn_t < fnorm {
                        x = trial;
                        fx = ft;
                        fnorm = fn_t;
                        accepted = true;
                        break;
                    }
                }
                Err(e) if e.is_pole() => {
                    if pole_hits == 0 {
                        diagnostics.push(format!("pole-guarded step at iteration {iter}: {e}"));
                    }
                    pole_hits += 1;
                }
                Err(_) => {}
            }
            scale *= 0.5;
        }
        if fnorm < best.1 {
            best = (x.clone(), fnorm);
        }
        if !accepted {
            diagnostics.push(format!(
                "line search stalled at iteration {iter} (residual {fnorm:.3e})"
            ));
            break;
        }
    }

    if pole_hits > 1 {
        diagnostics.push(format!("{pole_hits} pole-guarded step rejections in total"));
    }
    let converged = best.1 < opts.tol;
    NewtonOutcome {
        x: best.0,
        residual_norm: best.1,
        iterations: opts.max_iter,
        converged,
        diagnostics,
    }
}

/// Options shared by the momentum-set solvers.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub newton: NewtonOptions,
    /// Number of perturbed multi-start runs (0 disables multi-start).
    pub multistart: usize,
    /// Perturbation radius for multi-start initializations.
    pub multistart_radius: f64,
    pub seed: u64,
    /// Override for the canonical per-channel initialization, index-aligned
    /// with the channel set.
    pub initial: Option<Vec<Complex64>>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            newton: NewtonOptions::default(),
            multistart: 0,
            multistart_radius: 0.1,
            seed: 7,
            initial: None,
        }
    }
}

/// Canonical solve plus optional perturbed restarts. Distinct extra roots
/// are reported ranked by proximity to the initialization; the accepted
/// root is validated against the momentum-set invariants.
pub fn solve_with_multistart<F>(
    residual: &F,
    x0: &[Complex64],
    ls: &[u32],
    opts: &SolveOptions,
) -> Result<SolveReport, CtError>
where
    F: Fn(&[Complex64]) -> Result<Vec<Complex64>, CtError>,
{
    let mut outcome = solve_complex_system(residual, x0, &opts.newton);
    let mut diagnostics = std::mem::take(&mut outcome.diagnostics);

    let mut roots: Vec<Vec<Complex64>> = Vec::new();
    if opts.multistart > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        for _ in 0..opts.multistart {
            let perturbed: Vec<Complex64> = x0
                .iter()
                .map(|c| {
                    c + Complex64::new(
                        opts.multistart_radius * (rng.gen::<f64>() * 2.0 - 1.0),
                        opts.multistart_radius * (rng.gen::<f64>() * 2.0 - 1.0),
                    )
                })
                .collect();
            let alt = solve_complex_system(residual, &perturbed, &opts.newton);
            if alt.converged {
                roots.push(alt.x);
            }
        }
        let dist = |a: &[Complex64], b: &[Complex64]| {
            a.iter().zip(b).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max)
        };
        let mut distinct: Vec<Vec<Complex64>> = Vec::new();
        for r in roots {
            if distinct.iter().all(|d| dist(d, &r) > 1e-6) {
                distinct.push(r);
            }
        }
        distinct.sort_by(|a, b| dist(a, x0).total_cmp(&dist(b, x0)));
        if !outcome.converged {
            if let Some(best) = distinct.first() {
                diagnostics
                    .push("canonical start failed; adopting nearest multi-start root".to_string());
                outcome.x = best.clone();
                outcome.converged = true;
                if let Ok(r) = residual(&outcome.x) {
                    outcome.residual_norm = inf_norm(&r);
                }
            }
        }
        roots = distinct
            .into_iter()
            .filter(|r| dist(r, &outcome.x) > 1e-6)
            .collect();
        if !roots.is_empty() {
            diagnostics.push(format!("multi-start found {} alternative root(s)", roots.len()));
        }
    }

    let mut converged = outcome.converged;
    if let Err(e) = check_admissible(&outcome.x, ls) {
        if converged {
            diagnostics.push(format!("converged root violates admissibility: {e}"));
            converged = false;
        }
    }
    Ok(SolveReport {
        solution: ShiftedMomentumSet::new_unchecked(outcome.x),
        residual_norm: outcome.residual_norm,
        iterations: outcome.iterations,
        converged,
        diagnostics,
        condition_max: None,
        alternates: roots,
    })
}
