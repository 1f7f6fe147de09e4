//! The general nonlinear system for arbitrary-parity channel sets, and the
//! parity-split approximation built on top of the semi-analytic solver.
//!
//! With M_sin, M_cos the structured matrices over (l in S) x (L in T), the
//! shifted reactance elements
//!
//!   K_l^+- = sum_{L, l'} [M_sin]_{lL} [M_cos^-1]_{Ll'} exp(+-i (l - l') pi/2)
//!
//! tie T to the S-matrix through either of two equivalent conditions,
//!
//!   S_l = (1 + i K_l^+) / (1 - i K_l^-)   or
//!   tan(delta_l) = (K_l^+ + K_l^-) / (2 + i (K_l^+ - K_l^-)),
//!
//! which behave very differently numerically; both are exposed and the
//! tangent form is the default.

use crate::error::CtError;
use crate::linalg;
use crate::newton::{solve_with_multistart, SolveOptions};
use crate::semianalytic::{self, tan_delta};
use crate::types::{lam, lam_int, PhaseShiftSet, SolveReport};
use num_complex::Complex64;
use std::cell::Cell;

/// Coincidence threshold for the structured-matrix denominators.
const DEGENERACY_GUARD: f64 = 1e-12;
/// Condition-number ceiling for M_cos.
pub const CONDITION_LIMIT: f64 = 1e12;
/// Documented solver envelope.
pub const MAX_CHANNELS: usize = 12;

/// Which of the two equivalent momentum conditions to drive to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResidualForm {
    SMatrix,
    #[default]
    Tangent,
}

/// Structured matrices of the general method; row index l in S, column
/// index L in T, entry trig((l - L) pi/2) / (L(L+1) - l(l+1)).
#[derive(Debug, Clone)]
pub struct MMatrixPair {
    pub m_sin: Vec<Complex64>,
    pub m_cos: Vec<Complex64>,
    pub n: usize,
}

/// i^l for integer l, exact.
fn i_pow(l: i64) -> Complex64 {
    match l.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

pub fn build_m_matrices(ls: &[u32], t_vals: &[Complex64]) -> Result<MMatrixPair, CtError> {
    let n = ls.len();
    if t_vals.len() != n || n == 0 {
        return Err(CtError::Invalid("channel and momentum counts differ".into()));
    }
    let mut m_sin = vec![Complex64::new(0.0, 0.0); n * n];
    let mut m_cos = vec![Complex64::new(0.0, 0.0); n * n];
    for (r, &l) in ls.iter().enumerate() {
        for (cidx, &lv) in t_vals.iter().enumerate() {
            let den = lam(lv) - lam_int(l);
            if den.norm() <= DEGENERACY_GUARD {
                return Err(CtError::Degenerate(format!(
                    "L(L+1) collision between L = {lv} and l = {l}"
                )));
            }
            let ang = (Complex64::new(l as f64, 0.0) - lv) * std::f64::consts::FRAC_PI_2;
            m_sin[r * n + cidx] = ang.sin() / den;
            m_cos[r * n + cidx] = ang.cos() / den;
        }
    }
    Ok(MMatrixPair { m_sin, m_cos, n })
}

/// Shifted reactance elements K^+ and K^-.
#[derive(Debug, Clone)]
pub struct ReactancePair {
    pub k_plus: Vec<Complex64>,
    pub k_minus: Vec<Complex64>,
    /// Exact 1-norm condition number of M_cos.
    pub condition: f64,
    /// Worst scaled residual of the two M_cos solves.
    pub solve_residual: f64,
}

/// K^+- through linear solves against M_cos (never an explicit inverse).
/// The phase factors separate: K_l^+- = i^(+-l) (M_sin w^+-)_l with
/// M_cos w^+- = phi^+- and phi^+-_{l'} = i^(-+l').
pub fn reactance(ls: &[u32], t_vals: &[Complex64]) -> Result<ReactancePair, CtError> {
    let m = build_m_matrices(ls, t_vals)?;
    let n = m.n;
    let condition = linalg::condition_1norm(&m.m_cos, n);
    if !condition.is_finite() || condition > CONDITION_LIMIT {
        return Err(CtError::IllConditioned {
            cond: condition,
            context: "M_cos in reactance evaluation".into(),
        });
    }
    let phi_plus: Vec<Complex64> = ls.iter().map(|&l| i_pow(-(l as i64))).collect();
    let phi_minus: Vec<Complex64> = ls.iter().map(|&l| i_pow(l as i64)).collect();
    let (w_plus, r1) = linalg::solve_with_residual(&m.m_cos, n, &phi_plus)?;
    let (w_minus, r2) = linalg::solve_with_residual(&m.m_cos, n, &phi_minus)?;
    let apply = |w: &[Complex64], sign: i64| -> Vec<Complex64> {
        ls.iter()
            .enumerate()
            .map(|(r, &l)| {
                let s: Complex64 = (0..n).map(|cidx| m.m_sin[r * n + cidx] * w[cidx]).sum();
                i_pow(sign * l as i64) * s
            })
            .collect()
    };
    Ok(ReactancePair {
        k_plus: apply(&w_plus, 1),
        k_minus: apply(&w_minus, -1),
        condition,
        solve_residual: r1.max(r2),
    })
}

fn residual_from_reactance(
    re: &ReactancePair,
    deltas: &[Complex64],
    form: ResidualForm,
) -> Result<Vec<Complex64>, CtError> {
    let i = Complex64::new(0.0, 1.0);
    let mut out = Vec::with_capacity(deltas.len());
    for idx in 0..deltas.len() {
        let kp = re.k_plus[idx];
        let km = re.k_minus[idx];
        let r = match form {
            ResidualForm::SMatrix => {
                let den = 1.0 - i * km;
                if den.norm() < 1e-12 {
                    return Err(CtError::Pole(format!(
                        "1 - i K^- vanishes at channel index {idx}"
                    )));
                }
                (1.0 + i * kp) / den - (2.0 * i * deltas[idx]).exp()
            }
            ResidualForm::Tangent => {
                let den = 2.0 + i * (kp - km);
                if den.norm() < 1e-12 {
                    return Err(CtError::Pole(format!(
                        "tangent-form denominator vanishes at channel index {idx}"
                    )));
                }
                (kp + km) / den - tan_delta(deltas[idx])?
            }
        };
        out.push(r);
    }
    Ok(out)
}

/// Residual of the selected form, component per channel.
pub fn residual_general(
    ls: &[u32],
    t_vals: &[Complex64],
    deltas: &[Complex64],
    form: ResidualForm,
) -> Result<Vec<Complex64>, CtError> {
    let re = reactance(ls, t_vals)?;
    residual_from_reactance(&re, deltas, form)
}

/// Solve the general system for the momentum set T.
pub fn solve_general(
    s: &PhaseShiftSet,
    opts: &SolveOptions,
    form: ResidualForm,
) -> Result<SolveReport, CtError> {
    if s.len() > MAX_CHANNELS {
        return Err(CtError::Invalid(format!(
            "{} channels exceed the supported envelope of {MAX_CHANNELS}",
            s.len()
        )));
    }
    let ls = s.ls();
    let deltas = s.deltas();
    let cond_max = Cell::new(0.0f64);
    let residual = |t: &[Complex64]| {
        let re = reactance(&ls, t)?;
        cond_max.set(cond_max.get().max(re.condition));
        residual_from_reactance(&re, &deltas, form)
    };
    let x0 = match &opts.initial {
        Some(v) => {
            if v.len() != s.len() {
                return Err(CtError::Invalid("initialization length != channel count".into()));
            }
            v.clone()
        }
        None => semianalytic::canonical_initialization(s),
    };
    let mut report = solve_with_multistart(&residual, &x0, &ls, opts)?;
    report.condition_max = Some(cond_max.get());
    Ok(report)
}

/// Parity-split approximation: independent semi-analytic solves of the even
/// and odd halves. The downstream potential is the sum q_e + q_o of the two
/// reconstructions.
pub fn solve_approximate(
    s: &PhaseShiftSet,
    opts: &SolveOptions,
) -> Result<(SolveReport, SolveReport), CtError> {
    let (even, odd) = s.split_by_parity();
    let split_initial = |members: &[(u32, Complex64)]| -> Option<Vec<Complex64>> {
        opts.initial.as_ref().map(|init| {
            s.entries()
                .iter()
                .zip(init)
                .filter(|((l, _), _)| members.iter().any(|(ml, _)| ml == l))
                .map(|(_, &v)| v)
                .collect()
        })
    };
    let solve_half = |members: Vec<(u32, Complex64)>| -> Result<SolveReport, CtError> {
        if members.is_empty() {
            return Ok(SolveReport {
                solution: crate::types::ShiftedMomentumSet::new_unchecked(Vec::new()),
                residual_norm: 0.0,
                iterations: 0,
                converged: true,
                diagnostics: vec!["empty parity class".into()],
                condition_max: None,
                alternates: Vec::new(),
            });
        }
        let init = split_initial(&members);
        let half = PhaseShiftSet::new(members)?;
        let half_opts = SolveOptions {
            initial: init,
            ..opts.clone()
        };
        semianalytic::solve_parity(&half, &half_opts)
    };
    Ok((solve_half(even)?, solve_half(odd)?))
}

/// Weak spin-orbit combination delta_l = [(l+1) delta+ + l delta-] / (2l+1).
pub fn combine_spin_orbit(delta_plus: Complex64, delta_minus: Complex64, l: u32) -> Complex64 {
    let lf = l as f64;
    ((lf + 1.0) * delta_plus + lf * delta_minus) / (2.0 * lf + 1.0)
}
