//! Potential reconstruction from a solved momentum set: expansion functions
//! through the Wronskian linear system, the kernel diagonal, and the radial
//! derivative that produces q(x), plus the conversion to physical units.
//!
//! At each grid point the N x N system
//!
//!   sum_L A_L(x) W[u_L, v_l](x) / (l(l+1) - L(L+1)) = v_l(x),  l in S
//!
//! is solved directly; the potential follows from the kernel diagonal
//! K(x,x) = sum_L A_L(x) u_L(x) as q = -(2/x) d/dx [K(x,x)/x].

use crate::error::CtError;
use crate::linalg;
use crate::specfun::{riccati_j, riccati_y, Order};
use crate::types::{
    lam, lam_int, ExpansionTable, PhysicalPotential, PointFlag, PotentialCurve, RadialGrid,
};
use num_complex::Complex64;

/// Relative back-substitution residual accepted per grid point.
const SOLVE_RESIDUAL_LIMIT: f64 = 1e-9;
/// Evaluation window floor; q below it is extrapolated, never evaluated.
pub const X_MIN_EVAL: f64 = 0.05;

/// Solve the expansion-function system at every grid point. Points where
/// the system is numerically singular (isolated nodal degeneracies) are
/// flagged and filled by linear interpolation from clean neighbours.
pub fn expansion_functions(
    t_vals: &[Complex64],
    ls: &[u32],
    grid: &RadialGrid,
) -> Result<ExpansionTable, CtError> {
    let n = ls.len();
    if t_vals.len() != n || n == 0 {
        return Err(CtError::Invalid("channel and momentum counts differ".into()));
    }
    crate::types::check_admissible(t_vals, ls)?;
    let mut values: Vec<Vec<Complex64>> = Vec::with_capacity(grid.len());
    let mut flags = vec![PointFlag::Ok; grid.len()];
    for (ip, &x) in grid.points().iter().enumerate() {
        match solve_point(t_vals, ls, x) {
            Ok(a) => values.push(a),
            Err(_) => {
                flags[ip] = PointFlag::Interpolated;
                values.push(vec![Complex64::new(0.0, 0.0); n]);
            }
        }
    }
    // fill flagged points from the nearest clean neighbours
    let bad: Vec<usize> = (0..grid.len())
        .filter(|&i| flags[i] == PointFlag::Interpolated)
        .collect();
    if bad.len() > grid.len() / 4 {
        return Err(CtError::Singular(format!(
            "{} of {} grid points singular; momenta are not usable on this grid",
            bad.len(),
            grid.len()
        )));
    }
    for &i in &bad {
        let left = (0..i).rev().find(|&j| flags[j] == PointFlag::Ok);
        let right = ((i + 1)..grid.len()).find(|&j| flags[j] == PointFlag::Ok);
        let xs = grid.points();
        values[i] = match (left, right) {
            (Some(a), Some(b)) => {
                let w = (xs[i] - xs[a]) / (xs[b] - xs[a]);
                (0..n)
                    .map(|k| values[a][k] * (1.0 - w) + values[b][k] * w)
                    .collect()
            }
            (Some(a), None) => values[a].clone(),
            (None, Some(b)) => values[b].clone(),
            (None, None) => {
                return Err(CtError::Singular("no clean grid points to interpolate from".into()))
            }
        };
    }
    Ok(ExpansionTable { values, flags })
}

fn solve_point(t_vals: &[Complex64], ls: &[u32], x: f64) -> Result<Vec<Complex64>, CtError> {
    let n = ls.len();
    let u: Vec<_> = t_vals
        .iter()
        .map(|&lv| riccati_j(Order(lv), x))
        .collect::<Result<_, _>>()?;
    let v: Vec<_> = ls
        .iter()
        .map(|&l| riccati_y(Order::from(l), x))
        .collect::<Result<_, _>>()?;
    let mut mat = vec![Complex64::new(0.0, 0.0); n * n];
    let mut rhs = vec![Complex64::new(0.0, 0.0); n];
    for (r, &l) in ls.iter().enumerate() {
        for (cidx, &lv) in t_vals.iter().enumerate() {
            let w = u[cidx].f * v[r].df - u[cidx].df * v[r].f;
            mat[r * n + cidx] = w / (lam_int(l) - lam(lv));
        }
        rhs[r] = v[r].f;
    }
    let (a, res) = linalg::solve_with_residual(&mat, n, &rhs)?;
    if res > SOLVE_RESIDUAL_LIMIT {
        return Err(CtError::Singular(format!(
            "expansion solve residual {res:.2e} at x = {x}"
        )));
    }
    Ok(a)
}

/// Kernel diagonal K(x,x) = sum_L A_L(x) u_L(x) over the grid.
pub fn kernel_diagonal(
    t_vals: &[Complex64],
    table: &ExpansionTable,
    grid: &RadialGrid,
) -> Result<Vec<Complex64>, CtError> {
    if table.values.len() != grid.len() {
        return Err(CtError::Invalid("expansion table does not match grid".into()));
    }
    let mut out = Vec::with_capacity(grid.len());
    for (ip, &x) in grid.points().iter().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, &lv) in t_vals.iter().enumerate() {
            acc += table.values[ip][k] * riccati_j(Order(lv), x)?.f;
        }
        out.push(acc);
    }
    Ok(out)
}

/// First derivative of complex samples on a (possibly nonuniform) grid:
/// second-order three-point stencils, one-sided at the ends.
fn derivative(xs: &[f64], f: &[Complex64]) -> Vec<Complex64> {
    let n = xs.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        if i == 0 {
            let (h1, h2) = (xs[1] - xs[0], xs[2] - xs[1]);
            out[i] = -f[0] * ((2.0 * h1 + h2) / (h1 * (h1 + h2)))
                + f[1] * ((h1 + h2) / (h1 * h2))
                - f[2] * (h1 / (h2 * (h1 + h2)));
        } else if i == n - 1 {
            let (h1, h2) = (xs[n - 2] - xs[n - 3], xs[n - 1] - xs[n - 2]);
            out[i] = f[n - 3] * (h2 / (h1 * (h1 + h2)))
                - f[n - 2] * ((h1 + h2) / (h1 * h2))
                + f[n - 1] * ((h1 + 2.0 * h2) / (h2 * (h1 + h2)));
        } else {
            let (h1, h2) = (xs[i] - xs[i - 1], xs[i + 1] - xs[i]);
            out[i] = -f[i - 1] * (h2 / (h1 * (h1 + h2)))
                + f[i] * ((h2 - h1) / (h1 * h2))
                + f[i + 1] * (h1 / (h2 * (h1 + h2)));
        }
    }
    out
}

/// q(x) = -(2/x) d/dx [K(x,x)/x] by finite differences.
pub fn potential_from_kernel(
    grid: &RadialGrid,
    kdiag: &[Complex64],
    flags: &[PointFlag],
) -> Result<PotentialCurve, CtError> {
    if grid.len() < 5 {
        return Err(CtError::Invalid("need at least 5 grid points to differentiate".into()));
    }
    if kdiag.len() != grid.len() || flags.len() != grid.len() {
        return Err(CtError::Invalid("kernel diagonal does not match grid".into()));
    }
    let xs = grid.points();
    let g: Vec<Complex64> = kdiag.iter().zip(xs).map(|(k, &x)| k / x).collect();
    let dg = derivative(xs, &g);
    let q: Vec<Complex64> = dg.iter().zip(xs).map(|(d, &x)| -2.0 / x * d).collect();
    // a point whose stencil touched an interpolated neighbour inherits the flag
    let mut out_flags = vec![PointFlag::Ok; xs.len()];
    for i in 0..xs.len() {
        let lo = i.saturating_sub(1);
        let hi = (i + 1).min(xs.len() - 1);
        let window = if i == 0 {
            0..3
        } else if i == xs.len() - 1 {
            (xs.len() - 3)..xs.len()
        } else {
            lo..(hi + 1)
        };
        if window.clone().any(|j| flags[j] != PointFlag::Ok) {
            out_flags[i] = PointFlag::Interpolated;
        }
    }
    PotentialCurve::new(grid.clone(), q, out_flags)
}

/// Full pipeline from a momentum set to q(x) on the requested grid.
///
/// Points below the evaluation floor x = 0.05 are not computed (the kernel
/// formula divides by x); they are filled by quadratic extrapolation of the
/// first computed values and flagged accordingly.
pub fn reconstruct_potential(
    t_vals: &[Complex64],
    ls: &[u32],
    grid: &RadialGrid,
) -> Result<PotentialCurve, CtError> {
    let xs = grid.points();
    let n_low = xs.iter().take_while(|&&x| x < X_MIN_EVAL).count();
    let eval_points: Vec<f64> = xs[n_low..].to_vec();
    if eval_points.len() < 5 {
        return Err(CtError::Invalid(format!(
            "only {} grid points at or above the evaluation floor {X_MIN_EVAL}",
            eval_points.len()
        )));
    }
    let eval_grid = RadialGrid::new(eval_points)?;
    let table = expansion_functions(t_vals, ls, &eval_grid)?;
    let kdiag = kernel_diagonal(t_vals, &table, &eval_grid)?;
    let curve = potential_from_kernel(&eval_grid, &kdiag, &table.flags)?;
    if n_low == 0 {
        return Ok(curve);
    }
    // quadratic extrapolation below the floor through the first three values
    let (x0, x1, x2) = (
        eval_grid.points()[0],
        eval_grid.points()[1],
        eval_grid.points()[2],
    );
    let (q0, q1, q2) = (curve.q[0], curve.q[1], curve.q[2]);
    let quad = |x: f64| {
        q0 * ((x - x1) * (x - x2) / ((x0 - x1) * (x0 - x2)))
            + q1 * ((x - x0) * (x - x2) / ((x1 - x0) * (x1 - x2)))
            + q2 * ((x - x0) * (x - x1) / ((x2 - x0) * (x2 - x1)))
    };
    let mut q = Vec::with_capacity(xs.len());
    let mut flags = Vec::with_capacity(xs.len());
    for &x in &xs[..n_low] {
        q.push(quad(x));
        flags.push(PointFlag::Extrapolated);
    }
    q.extend_from_slice(&curve.q);
    flags.extend_from_slice(&curve.flags);
    PotentialCurve::new(grid.clone(), q, flags)
}

/// Convert to physical units: r = x / k (fm), V = E q (MeV).
pub fn to_physical(curve: &PotentialCurve, k: f64, e: f64) -> Result<PhysicalPotential, CtError> {
    if !(k > 0.0) || !(e > 0.0) {
        return Err(CtError::Invalid(format!("need positive k and E, got k={k}, E={e}")));
    }
    Ok(PhysicalPotential {
        r: curve.grid.points().iter().map(|&x| x / k).collect(),
        v: curve.q.iter().map(|&q| q * e).collect(),
    })
}
