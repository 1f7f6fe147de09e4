//! Matrix-inversion-free equations for parity-pure channel sets.
//!
//! For purely even (or purely odd) channels the asymptotic linear system for
//! the expansion functions has a Cauchy structure with the closed-form
//! solution of a rational interpolation problem, which collapses the
//! momentum conditions to
//!
//!   tan(delta_l) = -+ sum_{L in T} R_l(L) tan/cot(L pi/2)
//!
//! where R_l(L) is a ratio of products of L(L+1) differences. The solver
//! below finds T by damped Newton iteration on that residual.

use crate::error::CtError;
use crate::newton::{solve_with_multistart, SolveOptions};
use crate::types::{
    lam, lam_int, CauchyCoefficients, Parity, PhaseShiftSet, ShiftedMomentumSet, SolveReport,
};
use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

/// Distance to the nearest real pole of tan(L pi/2) (odd integers) below
/// which residual evaluation refuses the iterate.
pub const POLE_GUARD: f64 = 1e-4;
/// |cos delta| (or sin) below which tangents and normalizations are poles.
pub const COS_GUARD: f64 = 1e-12;
/// Coincidence threshold for the closed-form denominators.
const DEGENERACY_GUARD: f64 = 1e-12;
/// Documented solver envelope.
pub const MAX_CHANNELS: usize = 12;

/// Unique solution of sum_i a_i / (y_j - x_i) = -1 for all j:
/// a_k = prod_i (x_k - y_i) / prod_{i != k} (x_k - x_i).
pub fn cauchy_solve(xs: &[Complex64], ys: &[Complex64]) -> Result<Vec<Complex64>, CtError> {
    if xs.len() != ys.len() || xs.is_empty() {
        return Err(CtError::Invalid(format!(
            "cauchy system needs equal nonempty point sets, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    for (i, x) in xs.iter().enumerate() {
        for y in ys {
            if (x - y).norm() <= DEGENERACY_GUARD {
                return Err(CtError::Pole(format!("x = {x} coincides with y = {y}")));
            }
        }
        for x2 in &xs[i + 1..] {
            if (x - x2).norm() <= DEGENERACY_GUARD {
                return Err(CtError::Degenerate(format!("coincident nodes x = {x}")));
            }
        }
    }
    let mut out = Vec::with_capacity(xs.len());
    for (k, xk) in xs.iter().enumerate() {
        let mut num = Complex64::new(1.0, 0.0);
        for y in ys {
            num *= xk - y;
        }
        let mut den = Complex64::new(1.0, 0.0);
        for (i, xi) in xs.iter().enumerate() {
            if i != k {
                den *= xk - xi;
            }
        }
        out.push(num / den);
    }
    Ok(out)
}

fn nearest_odd(re: f64) -> f64 {
    2.0 * ((re - 1.0) / 2.0).round() + 1.0
}

fn nearest_even(re: f64) -> f64 {
    2.0 * (re / 2.0).round()
}

fn check_tan_pole(l_val: Complex64) -> Result<(), CtError> {
    let d = (l_val - nearest_odd(l_val.re)).norm();
    if d < POLE_GUARD {
        return Err(CtError::Pole(format!(
            "L = {l_val} within {d:.2e} of a tan(L pi/2) pole"
        )));
    }
    Ok(())
}

fn check_cot_pole(l_val: Complex64) -> Result<(), CtError> {
    let d = (l_val - nearest_even(l_val.re)).norm();
    if d < POLE_GUARD {
        return Err(CtError::Pole(format!(
            "L = {l_val} within {d:.2e} of a cot(L pi/2) pole"
        )));
    }
    Ok(())
}

/// tan(delta) through the sin/cos ratio with an explicit small-cos guard.
pub fn tan_delta(delta: Complex64) -> Result<Complex64, CtError> {
    let c = delta.cos();
    if c.norm() < COS_GUARD {
        return Err(CtError::Pole(format!("cos(delta) vanishes at delta = {delta}")));
    }
    Ok(delta.sin() / c)
}

/// Normalization constant B = 1 / cos(delta) of the matched wave function.
pub fn normalization(delta: Complex64) -> Result<Complex64, CtError> {
    let c = delta.cos();
    if c.norm() < COS_GUARD {
        return Err(CtError::Pole(format!("cos(delta) vanishes at delta = {delta}")));
    }
    Ok(c.finv())
}

/// Closed-form asymptotic coefficients for even channels: b = 0 and
/// a_L = prod_l (L(L+1) - l(l+1)) / prod_{L' != L} (L(L+1) - L'(L'+1))
///       / cos(L pi/2).
pub fn coefficients_even(
    t: &ShiftedMomentumSet,
    s_even: &[u32],
) -> Result<CauchyCoefficients, CtError> {
    if s_even.iter().any(|l| l % 2 != 0) {
        return Err(CtError::Parity("even coefficients need even channels".into()));
    }
    let xs: Vec<Complex64> = t.values().iter().map(|&v| lam(v)).collect();
    let ys: Vec<Complex64> = s_even.iter().map(|&l| Complex64::new(lam_int(l), 0.0)).collect();
    let tilde = cauchy_solve(&xs, &ys)?;
    let mut a = Vec::with_capacity(tilde.len());
    for (l_val, t_a) in t.values().iter().zip(tilde) {
        check_tan_pole(*l_val)?;
        a.push(t_a / (l_val * FRAC_PI_2).cos());
    }
    let b = vec![Complex64::new(0.0, 0.0); a.len()];
    Ok(CauchyCoefficients { a, b })
}

/// Odd-channel mirror: a = 0 and b_L carries 1/sin(L pi/2).
pub fn coefficients_odd(
    t: &ShiftedMomentumSet,
    s_odd: &[u32],
) -> Result<CauchyCoefficients, CtError> {
    if s_odd.iter().any(|l| l % 2 != 1) {
        return Err(CtError::Parity("odd coefficients need odd channels".into()));
    }
    let xs: Vec<Complex64> = t.values().iter().map(|&v| lam(v)).collect();
    let ys: Vec<Complex64> = s_odd.iter().map(|&l| Complex64::new(lam_int(l), 0.0)).collect();
    let tilde = cauchy_solve(&xs, &ys)?;
    let mut b = Vec::with_capacity(tilde.len());
    for (l_val, t_b) in t.values().iter().zip(tilde) {
        check_cot_pole(*l_val)?;
        b.push(t_b / (l_val * FRAC_PI_2).sin());
    }
    let a = vec![Complex64::new(0.0, 0.0); b.len()];
    Ok(CauchyCoefficients { a, b })
}

/// Product ratio R_l(L) = prod_{l' != l}(Lam - lam_l') / prod_{L' != L}(Lam - Lam').
fn product_ratio(
    k: usize,
    t_vals: &[Complex64],
    ls: &[u32],
    skip_l: usize,
) -> Result<Complex64, CtError> {
    let big = lam(t_vals[k]);
    let mut num = Complex64::new(1.0, 0.0);
    for (j, &l) in ls.iter().enumerate() {
        if j != skip_l {
            num *= big - lam_int(l);
        }
    }
    let mut den = Complex64::new(1.0, 0.0);
    for (j, &tv) in t_vals.iter().enumerate() {
        if j != k {
            let d = big - lam(tv);
            if d.norm() <= DEGENERACY_GUARD {
                return Err(CtError::Degenerate(format!(
                    "coincident L(L+1) between {} and {tv}",
                    t_vals[k]
                )));
            }
            den *= d;
        }
    }
    Ok(num / den)
}

/// Per-channel residual of the even semi-analytic system:
/// component l is  -sum_L R_l(L) tan(L pi/2)  -  tan(delta_l).
pub fn residual_even(
    t_vals: &[Complex64],
    ls: &[u32],
    deltas: &[Complex64],
) -> Result<Vec<Complex64>, CtError> {
    debug_assert_eq!(t_vals.len(), ls.len());
    for &tv in t_vals {
        check_tan_pole(tv)?;
    }
    let mut out = Vec::with_capacity(ls.len());
    for (il, &_l) in ls.iter().enumerate() {
        let mut rhs = Complex64::new(0.0, 0.0);
        for k in 0..t_vals.len() {
            let ratio = product_ratio(k, t_vals, ls, il)?;
            rhs -= ratio * (t_vals[k] * FRAC_PI_2).tan();
        }
        out.push(rhs - tan_delta(deltas[il])?);
    }
    Ok(out)
}

/// Odd mirror with cot(L pi/2) and the opposite overall sign.
pub fn residual_odd(
    t_vals: &[Complex64],
    ls: &[u32],
    deltas: &[Complex64],
) -> Result<Vec<Complex64>, CtError> {
    debug_assert_eq!(t_vals.len(), ls.len());
    for &tv in t_vals {
        check_cot_pole(tv)?;
    }
    let mut out = Vec::with_capacity(ls.len());
    for (il, &_l) in ls.iter().enumerate() {
        let mut rhs = Complex64::new(0.0, 0.0);
        for k in 0..t_vals.len() {
            let ratio = product_ratio(k, t_vals, ls, il)?;
            let ang = t_vals[k] * FRAC_PI_2;
            rhs += ratio * ang.cos() / ang.sin();
        }
        out.push(rhs - tan_delta(deltas[il])?);
    }
    Ok(out)
}

/// Canonical per-channel initialization: the exact N = 1 inversion
/// L = l - 2 delta_l / pi applied channel-wise.
pub fn canonical_initialization(s: &PhaseShiftSet) -> Vec<Complex64> {
    s.entries()
        .iter()
        .map(|&(l, d)| Complex64::new(l as f64, 0.0) - d * (2.0 / std::f64::consts::PI))
        .collect()
}

/// Solve the parity-pure semi-analytic system for the momentum set T.
pub fn solve_parity(s: &PhaseShiftSet, opts: &SolveOptions) -> Result<SolveReport, CtError> {
    let parity = s.parity();
    if parity == Parity::Mixed {
        return Err(CtError::Parity(
            "semi-analytic equations need a parity-pure channel set".into(),
        ));
    }
    if s.len() > MAX_CHANNELS {
        return Err(CtError::Invalid(format!(
            "{} channels exceed the supported envelope of {MAX_CHANNELS}",
            s.len()
        )));
    }
    let ls = s.ls();
    let deltas = s.deltas();
    for &d in &deltas {
        tan_delta(d)?;
    }
    let residual = |t: &[Complex64]| match parity {
        Parity::Even => residual_even(t, &ls, &deltas),
        _ => residual_odd(t, &ls, &deltas),
    };
    let x0 = match &opts.initial {
        Some(v) => {
            if v.len() != s.len() {
                return Err(CtError::Invalid("initialization length != channel count".into()));
            }
            v.clone()
        }
        None => canonical_initialization(s),
    };
    solve_with_multistart(&residual, &x0, &ls, opts)
}
