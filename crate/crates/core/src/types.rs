//! Shared domain types: channel sets, shifted momenta, grids, potentials.

use crate::error::CtError;
use num_complex::Complex64;
use std::f64::consts::FRAC_PI_4;

/// Minimum separation enforced between physical and shifted momenta and
/// between the lambda = L(L+1) values of distinct shifted momenta.
pub const MOMENTUM_SEPARATION: f64 = 1e-8;

/// lam(c) = c (c + 1), the eigenvalue-like combination that indexes both
/// physical and shifted angular momenta throughout.
pub fn lam(c: Complex64) -> Complex64 {
    c * (c + 1.0)
}

pub fn lam_int(l: u32) -> f64 {
    (l * (l + 1)) as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

/// Ordered set of physical channels with complex phase shifts (radians).
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseShiftSet {
    entries: Vec<(u32, Complex64)>,
}

impl PhaseShiftSet {
    /// Entries must be sorted with strictly increasing l. Physically
    /// admissible shifts have Im delta >= 0 (elasticity <= 1); that is not
    /// enforced here because intermediate synthetic data may violate it.
    pub fn new(entries: Vec<(u32, Complex64)>) -> Result<Self, CtError> {
        if entries.is_empty() {
            return Err(CtError::Invalid("empty channel set".into()));
        }
        for w in entries.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(CtError::Invalid(format!(
                    "channel l values must be strictly increasing: {} then {}",
                    w[0].0, w[1].0
                )));
            }
        }
        for (_, d) in &entries {
            if !d.re.is_finite() || !d.im.is_finite() {
                return Err(CtError::Invalid("non-finite phase shift".into()));
            }
        }
        Ok(PhaseShiftSet { entries })
    }

    pub fn from_real(pairs: &[(u32, f64)]) -> Result<Self, CtError> {
        Self::new(pairs.iter().map(|&(l, d)| (l, Complex64::new(d, 0.0))).collect())
    }

    /// delta = re - (i/2) ln(eta) inverts eta = |exp(2 i delta)| exactly.
    pub fn from_real_and_eta(rows: &[(u32, f64, f64)]) -> Result<Self, CtError> {
        let mut entries = Vec::with_capacity(rows.len());
        for &(l, re, eta) in rows {
            if !(eta > 0.0 && eta <= 1.0) {
                return Err(CtError::Invalid(format!("elasticity {eta} outside (0, 1] at l={l}")));
            }
            entries.push((l, Complex64::new(re, -0.5 * eta.ln())));
        }
        Self::new(entries)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(u32, Complex64)] {
        &self.entries
    }

    pub fn ls(&self) -> Vec<u32> {
        self.entries.iter().map(|e| e.0).collect()
    }

    pub fn deltas(&self) -> Vec<Complex64> {
        self.entries.iter().map(|e| e.1).collect()
    }

    pub fn elasticities(&self) -> Vec<f64> {
        self.entries.iter().map(|e| (-2.0 * e.1.im).exp()).collect()
    }

    pub fn parity(&self) -> Parity {
        let even = self.entries.iter().any(|e| e.0 % 2 == 0);
        let odd = self.entries.iter().any(|e| e.0 % 2 == 1);
        match (even, odd) {
            (true, false) => Parity::Even,
            (false, true) => Parity::Odd,
            _ => Parity::Mixed,
        }
    }

    /// (even subset, odd subset), either possibly empty.
    pub fn split_by_parity(&self) -> (Vec<(u32, Complex64)>, Vec<(u32, Complex64)>) {
        self.entries.iter().partition(|e| e.0 % 2 == 0)
    }
}

/// The solved set T of shifted (generally complex) angular momenta, paired
/// index-wise with the source channels.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedMomentumSet {
    values: Vec<Complex64>,
}

impl ShiftedMomentumSet {
    /// Enforces |T| = |S|, S and T disjoint, and pairwise-distinct
    /// L(L+1) values (which also excludes L' = -L-1 collisions).
    pub fn new(values: Vec<Complex64>, ls: &[u32]) -> Result<Self, CtError> {
        check_admissible(&values, ls)?;
        Ok(ShiftedMomentumSet { values })
    }

    /// Wrap values without admissibility checks. Failure reports carry the
    /// best iterate seen, which may legitimately violate the invariants.
    pub fn new_unchecked(values: Vec<Complex64>) -> Self {
        ShiftedMomentumSet { values }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn check_admissible(values: &[Complex64], ls: &[u32]) -> Result<(), CtError> {
    if values.len() != ls.len() {
        return Err(CtError::Invalid(format!(
            "|T| = {} does not match |S| = {}",
            values.len(),
            ls.len()
        )));
    }
    for v in values {
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(CtError::Invalid("non-finite shifted momentum".into()));
        }
        for &l in ls {
            if (v - l as f64).norm() <= MOMENTUM_SEPARATION {
                return Err(CtError::Degenerate(format!(
                    "shifted momentum {v} coincides with physical channel l={l}"
                )));
            }
        }
    }
    for i in 0..values.len() {
        for j in (i + 1)..values.len() {
            if (lam(values[i]) - lam(values[j])).norm() <= MOMENTUM_SEPARATION {
                return Err(CtError::Degenerate(format!(
                    "shifted momenta {} and {} have coincident L(L+1)",
                    values[i], values[j]
                )));
            }
        }
    }
    Ok(())
}

/// Asymptotic expansion coefficients a_L, b_L of the expansion functions,
/// index-aligned with the momentum set they were derived from. Parity-pure
/// data always leaves one family identically zero.
#[derive(Debug, Clone, PartialEq)]
pub struct CauchyCoefficients {
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
}

/// Outcome of one nonlinear solve.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub solution: ShiftedMomentumSet,
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Pole-proximity and restart notes accumulated during the solve.
    pub diagnostics: Vec<String>,
    /// Largest 1-norm condition estimate of M_cos seen across iterates
    /// (general method only).
    pub condition_max: Option<f64>,
    /// Distinct alternative roots found by multi-start, ranked by proximity
    /// to the canonical initialization.
    pub alternates: Vec<Vec<Complex64>>,
}

/// Strictly increasing positive abscissas x = k r.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    points: Vec<f64>,
}

impl RadialGrid {
    /// Spacing must resolve the fastest Riccati-Bessel oscillation:
    /// at least 8 points per period, i.e. steps no wider than pi/4.
    pub fn new(points: Vec<f64>) -> Result<Self, CtError> {
        if points.len() < 2 {
            return Err(CtError::Invalid("grid needs at least two points".into()));
        }
        if points[0] <= 0.0 {
            return Err(CtError::Invalid(format!("grid must start above 0, got {}", points[0])));
        }
        for w in points.windows(2) {
            if w[1] <= w[0] {
                return Err(CtError::Invalid("grid not strictly increasing".into()));
            }
            if w[1] - w[0] > FRAC_PI_4 + 1e-12 {
                return Err(CtError::Invalid(format!(
                    "grid spacing {} exceeds pi/4 between {} and {}",
                    w[1] - w[0],
                    w[0],
                    w[1]
                )));
            }
        }
        Ok(RadialGrid { points })
    }

    pub fn uniform(min: f64, max: f64, n: usize) -> Result<Self, CtError> {
        if n < 2 || !(max > min) {
            return Err(CtError::Invalid(format!("bad uniform grid [{min}, {max}] n={n}")));
        }
        let h = (max - min) / (n - 1) as f64;
        Self::new((0..n).map(|i| min + h * i as f64).collect())
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Quality flag attached to each tabulated point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointFlag {
    Ok,
    /// Filled by quadratic extrapolation below the evaluation window.
    Extrapolated,
    /// Replaced by interpolation across an isolated singular grid point.
    Interpolated,
}

/// Expansion functions A_L(x) tabulated over a grid; one complex vector per
/// grid point, index-aligned with the momentum set.
#[derive(Debug, Clone)]
pub struct ExpansionTable {
    pub values: Vec<Vec<Complex64>>,
    pub flags: Vec<PointFlag>,
}

/// Sampled dimensionless potential q(x).
#[derive(Debug, Clone)]
pub struct PotentialCurve {
    pub grid: RadialGrid,
    pub q: Vec<Complex64>,
    pub flags: Vec<PointFlag>,
}

impl PotentialCurve {
    pub fn new(grid: RadialGrid, q: Vec<Complex64>, flags: Vec<PointFlag>) -> Result<Self, CtError> {
        if q.len() != grid.len() || flags.len() != grid.len() {
            return Err(CtError::Invalid("potential/flag length does not match grid".into()));
        }
        Ok(PotentialCurve { grid, q, flags })
    }

    pub fn max_abs(&self) -> f64 {
        self.q.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Physical companion table: r in fm, V in MeV.
#[derive(Debug, Clone)]
pub struct PhysicalPotential {
    pub r: Vec<f64>,
    pub v: Vec<Complex64>,
}

/// Regular radial solution sampled on the integration lattice.
#[derive(Debug, Clone)]
pub struct WaveSample {
    pub x0: f64,
    pub h: f64,
    pub psi: Vec<Complex64>,
    pub l: u32,
}

impl WaveSample {
    pub fn x_at(&self, i: usize) -> f64 {
        self.x0 + self.h * i as f64
    }

    pub fn x_max(&self) -> f64 {
        self.x_at(self.psi.len() - 1)
    }
}

/// Per-channel forward-problem output.
#[derive(Debug, Clone)]
pub struct ForwardResult {
    /// (l, delta, eta) per channel.
    pub channels: Vec<(u32, Complex64, f64)>,
    pub diagnostics: Vec<String>,
}

impl ForwardResult {
    pub fn delta(&self, l: u32) -> Option<Complex64> {
        self.channels.iter().find(|c| c.0 == l).map(|c| c.1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_shift_set_rejects_disorder() {
        assert!(PhaseShiftSet::from_real(&[(2, 0.1), (1, 0.2)]).is_err());
        assert!(PhaseShiftSet::from_real(&[(1, 0.1), (1, 0.2)]).is_err());
        assert!(PhaseShiftSet::from_real(&[]).is_err());
    }

    #[test]
    fn eta_conversion_round_trips() {
        let s = PhaseShiftSet::from_real_and_eta(&[(0, 0.522, 0.580)]).unwrap();
        let d = s.deltas()[0];
        assert!((d.im - 0.272_363_587_720_836_02).abs() < 1e-14);
        assert!(((-2.0 * d.im).exp() - 0.580).abs() < 1e-14);
        assert!(PhaseShiftSet::from_real_and_eta(&[(0, 0.1, 1.2)]).is_err());
        assert!(PhaseShiftSet::from_real_and_eta(&[(0, 0.1, 0.0)]).is_err());
    }

    #[test]
    fn parity_classification() {
        let even = PhaseShiftSet::from_real(&[(0, 0.1), (2, 0.2)]).unwrap();
        let odd = PhaseShiftSet::from_real(&[(1, 0.1), (3, 0.2)]).unwrap();
        let mixed = PhaseShiftSet::from_real(&[(0, 0.1), (1, 0.2)]).unwrap();
        assert_eq!(even.parity(), Parity::Even);
        assert_eq!(odd.parity(), Parity::Odd);
        assert_eq!(mixed.parity(), Parity::Mixed);
    }

    #[test]
    fn momentum_set_invariants() {
        // S cap T must be empty
        let r = ShiftedMomentumSet::new(vec![Complex64::new(2.0, 0.0)], &[2]);
        assert!(matches!(r, Err(CtError::Degenerate(_))));
        // L' = -L-1 gives the same L(L+1)
        let r = ShiftedMomentumSet::new(
            vec![Complex64::new(0.3, 0.0), Complex64::new(-1.3, 0.0)],
            &[0, 2],
        );
        assert!(matches!(r, Err(CtError::Degenerate(_))));
        let r = ShiftedMomentumSet::new(vec![Complex64::new(-0.2, 0.0)], &[0, 2]);
        assert!(matches!(r, Err(CtError::Invalid(_))));
        assert!(ShiftedMomentumSet::new(
            vec![Complex64::new(-0.2, 0.0), Complex64::new(1.7, -0.3)],
            &[0, 2]
        )
        .is_ok());
    }

    #[test]
    fn grid_spacing_guard() {
        assert!(RadialGrid::uniform(0.05, 25.0, 500).is_ok());
        // 10 points over [0.05, 25] is far coarser than pi/4
        assert!(RadialGrid::uniform(0.05, 25.0, 10).is_err());
        assert!(RadialGrid::new(vec![-1.0, 0.5]).is_err());
        assert!(RadialGrid::new(vec![0.5, 0.5]).is_err());
    }
}
