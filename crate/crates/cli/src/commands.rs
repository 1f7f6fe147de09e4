//! The four command pipelines behind the `ctinv` subcommands.

use crate::files::{FileMeta, PhaseShiftFile, PotentialFile, SpinSplitFile};
use crate::CliError;
use coxthompson::generalct::{self, ResidualForm};
use coxthompson::newton::{NewtonOptions, SolveOptions};
use coxthompson::semianalytic;
use coxthompson::types::{Parity, PointFlag, PotentialCurve, RadialGrid, SolveReport};
use coxthompson::{forward, reconstruct, Complex64};
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Semianalytic,
    General,
    Approximate,
}

#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { min: 0.05, max: 25.0, n: 500 }
    }
}

#[derive(Debug, Clone)]
pub struct InvertArgs {
    pub mode: Mode,
    pub form: ResidualForm,
    pub grid: GridSpec,
    pub tol: f64,
    pub max_iter: usize,
    pub multistart: usize,
    pub seed: u64,
    /// Optional explicit initialization, index-aligned with the channels.
    pub init: Option<Vec<Complex64>>,
}

impl Default for InvertArgs {
    fn default() -> Self {
        InvertArgs {
            mode: Mode::General,
            form: ResidualForm::Tangent,
            grid: GridSpec::default(),
            tol: 1e-10,
            max_iter: 200,
            multistart: 0,
            seed: 7,
            init: None,
        }
    }
}

pub struct InvertOutcome {
    pub potential: PotentialFile,
    pub report: Value,
    pub converged: bool,
}

fn solve_options(args: &InvertArgs) -> SolveOptions {
    SolveOptions {
        newton: NewtonOptions {
            tol: args.tol,
            max_iter: args.max_iter,
            ..NewtonOptions::default()
        },
        multistart: args.multistart,
        multistart_radius: 0.1,
        seed: args.seed,
        initial: args.init.clone(),
    }
}

fn report_json(rep: &SolveReport) -> Value {
    json!({
        "converged": rep.converged,
        "iterations": rep.iterations,
        "residual_norm": rep.residual_norm,
        "momenta": rep.solution.values().iter()
            .map(|v| json!({"re": v.re, "im": v.im})).collect::<Vec<_>>(),
        "condition_max": rep.condition_max,
        "diagnostics": rep.diagnostics,
        "alternates": rep.alternates.iter()
            .map(|root| root.iter().map(|v| json!({"re": v.re, "im": v.im})).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    })
}

/// Invert a phase-shift file into a potential table plus a solve report.
pub fn invert(input: &PhaseShiftFile, args: &InvertArgs) -> Result<InvertOutcome, CliError> {
    let set = input.to_set()?;
    if set.len() > semianalytic::MAX_CHANNELS {
        return Err(CliError::Usage(format!(
            "{} channels exceed the supported envelope of {}",
            set.len(),
            semianalytic::MAX_CHANNELS
        )));
    }
    let grid = RadialGrid::uniform(args.grid.min, args.grid.max, args.grid.n)?;
    let opts = solve_options(args);

    let (curve, report, converged) = match args.mode {
        Mode::Semianalytic => {
            if set.parity() == Parity::Mixed {
                return Err(CliError::Usage(
                    "semianalytic mode needs a parity-pure channel set; \
                     use --mode approximate or --mode general"
                        .into(),
                ));
            }
            let rep = semianalytic::solve_parity(&set, &opts)?;
            let curve = if rep.converged {
                reconstruct::reconstruct_potential(rep.solution.values(), &set.ls(), &grid)?
            } else {
                zero_curve(&grid)
            };
            let conv = rep.converged;
            (curve, json!({"mode": "semianalytic", "solve": report_json(&rep)}), conv)
        }
        Mode::General => {
            let rep = generalct::solve_general(&set, &opts, args.form)?;
            let curve = if rep.converged {
                reconstruct::reconstruct_potential(rep.solution.values(), &set.ls(), &grid)?
            } else {
                zero_curve(&grid)
            };
            let conv = rep.converged;
            let form = match args.form {
                ResidualForm::Tangent => "tangent",
                ResidualForm::SMatrix => "smatrix",
            };
            (curve, json!({"mode": "general", "form": form, "solve": report_json(&rep)}), conv)
        }
        Mode::Approximate => {
            if set.parity() != Parity::Mixed {
                return Err(CliError::Usage(
                    "approximate mode expects mixed-parity input; \
                     parity-pure sets are handled exactly by --mode semianalytic"
                        .into(),
                ));
            }
            let (even, odd) = generalct::solve_approximate(&set, &opts)?;
            let conv = even.converged && odd.converged;
            let (even_ls, odd_ls): (Vec<u32>, Vec<u32>) = {
                let (e, o) = set.split_by_parity();
                (
                    e.iter().map(|c| c.0).collect(),
                    o.iter().map(|c| c.0).collect(),
                )
            };
            let curve = if conv {
                let qe = reconstruct::reconstruct_potential(even.solution.values(), &even_ls, &grid)?;
                let qo = reconstruct::reconstruct_potential(odd.solution.values(), &odd_ls, &grid)?;
                sum_curves(&qe, &qo)?
            } else {
                zero_curve(&grid)
            };
            (
                curve,
                json!({
                    "mode": "approximate",
                    "even": report_json(&even),
                    "odd": report_json(&odd),
                }),
                conv,
            )
        }
    };

    let meta = FileMeta {
        generator: Some(format!(
            "ctinv invert mode={}",
            match args.mode {
                Mode::Semianalytic => "semianalytic",
                Mode::General => "general",
                Mode::Approximate => "approximate",
            }
        )),
        ..input.meta.clone()
    };
    Ok(InvertOutcome {
        potential: PotentialFile::from_curve(&curve, meta),
        report,
        converged,
    })
}

fn zero_curve(grid: &RadialGrid) -> PotentialCurve {
    let n = grid.len();
    PotentialCurve::new(
        grid.clone(),
        vec![Complex64::new(0.0, 0.0); n],
        vec![PointFlag::Ok; n],
    )
    .expect("zero curve construction")
}

fn sum_curves(a: &PotentialCurve, b: &PotentialCurve) -> Result<PotentialCurve, CliError> {
    let q = a.q.iter().zip(&b.q).map(|(x, y)| x + y).collect();
    let flags = a
        .flags
        .iter()
        .zip(&b.flags)
        .map(|(&f, &g)| if f == PointFlag::Ok { g } else { f })
        .collect();
    PotentialCurve::new(a.grid.clone(), q, flags).map_err(CliError::from)
}

/// Synthetic potential models for forward-generated test data.
#[derive(Debug, Clone, Copy)]
pub enum Model {
    /// q(x) = amp exp(-(x/width)^2)
    Gaussian { amp: f64, width: f64 },
    /// q(x) = amp / (1 + exp((x - radius)/diffuseness))
    WoodsSaxon { amp: f64, radius: f64, diffuseness: f64 },
    /// q(x) = amp for x < radius, else 0
    SquareWell { amp: f64, radius: f64 },
}

impl Model {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Model::Gaussian { amp, width } => amp * (-(x / width) * (x / width)).exp(),
            Model::WoodsSaxon { amp, radius, diffuseness } => {
                amp / (1.0 + ((x - radius) / diffuseness).exp())
            }
            Model::SquareWell { amp, radius } => {
                if x < radius {
                    amp
                } else {
                    0.0
                }
            }
        }
    }

    /// Radius beyond which |q| < 1e-10 (capped to a workable window).
    fn support(&self) -> f64 {
        let r = match *self {
            Model::Gaussian { amp, width } => width * (amp.abs().max(1e-10) * 1e10).ln().sqrt(),
            Model::WoodsSaxon { amp, radius, diffuseness } => {
                radius + diffuseness * (amp.abs().max(1e-10) * 1e10).ln()
            }
            Model::SquareWell { radius, .. } => radius,
        };
        r.clamp(10.0, 55.0)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let ok = match *self {
            Model::Gaussian { width, .. } => width > 0.0,
            Model::WoodsSaxon { radius, diffuseness, .. } => radius > 0.0 && diffuseness > 0.0,
            Model::SquareWell { radius, .. } => radius > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(CliError::Usage(format!("non-positive model geometry in {self:?}")))
        }
    }

    fn describe(&self) -> String {
        match *self {
            Model::Gaussian { amp, width } => format!("gaussian amp={amp} width={width}"),
            Model::WoodsSaxon { amp, radius, diffuseness } => {
                format!("woods-saxon amp={amp} radius={radius} diffuseness={diffuseness}")
            }
            Model::SquareWell { amp, radius } => format!("square-well amp={amp} radius={radius}"),
        }
    }
}

/// Forward-solve a model potential and package the phase shifts.
pub fn synth(
    model: Model,
    channels: &[u32],
    k: f64,
    energy: f64,
    step: f64,
) -> Result<PhaseShiftFile, CliError> {
    model.validate()?;
    if channels.is_empty() {
        return Err(CliError::Usage("no channels requested".into()));
    }
    let mut ls = channels.to_vec();
    ls.sort_unstable();
    ls.dedup();
    let x_max = model.support() + 5.0;
    let result = forward::phase_shifts_fn(|x| Complex64::new(model.eval(x), 0.0), &ls, x_max, step)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(PhaseShiftFile::from_channels(
        &result.channels,
        FileMeta {
            energy_mev: Some(energy),
            k_invfm: Some(k),
            label: None,
            generator: Some(format!("ctinv synth {}", model.describe())),
        },
    ))
}

/// One row of the verification report.
#[derive(Debug, Clone)]
pub struct CheckRow {
    pub l: u32,
    pub delta: Complex64,
    pub eta: f64,
    /// |Re delta_recomputed - Re delta_reference|
    pub delta_err: f64,
    /// |eta_recomputed - eta_reference|
    pub eta_err: f64,
}

pub struct CheckOutcome {
    pub rows: Vec<CheckRow>,
    pub max_delta_err: f64,
    pub max_eta_err: f64,
    pub pass: bool,
    pub diagnostics: Vec<String>,
}

impl CheckOutcome {
    pub fn render(&self) -> String {
        let mut out = String::from("l,re_delta,eta,delta_err,eta_err\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{:+.6},{:.6},{:.6},{:.6}\n",
                r.l, r.delta.re, r.eta, r.delta_err, r.eta_err
            ));
        }
        out.push_str(&format!(
            "max_delta_err = {:.6}\nmax_eta_err = {:.6}\n",
            self.max_delta_err, self.max_eta_err
        ));
        out
    }
}

/// Forward-solve a stored potential and compare against reference shifts.
pub fn check(
    potential: &PotentialFile,
    reference: &PhaseShiftFile,
    threshold: f64,
) -> Result<CheckOutcome, CliError> {
    let curve = potential.to_curve()?;
    let ref_set = reference.to_set()?;
    let ls = ref_set.ls();
    let fr = forward::phase_shifts(&curve, &ls).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut rows = Vec::with_capacity(ls.len());
    for ((l, d, eta), (_, d_ref)) in fr.channels.iter().zip(ref_set.entries()) {
        let eta_ref = (-2.0 * d_ref.im).exp();
        rows.push(CheckRow {
            l: *l,
            delta: *d,
            eta: *eta,
            delta_err: (d.re - d_ref.re).abs(),
            eta_err: (eta - eta_ref).abs(),
        });
    }
    let max_delta_err = rows.iter().map(|r| r.delta_err).fold(0.0, f64::max);
    let max_eta_err = rows.iter().map(|r| r.eta_err).fold(0.0, f64::max);
    Ok(CheckOutcome {
        pass: max_delta_err <= threshold && max_eta_err <= threshold,
        rows,
        max_delta_err,
        max_eta_err,
        diagnostics: fr.diagnostics,
    })
}

/// Combine spin-orbit split shifts into central ones.
pub fn combine(input: &SpinSplitFile) -> Result<PhaseShiftFile, CliError> {
    let channels: Vec<(u32, Complex64, f64)> = input
        .rows
        .iter()
        .map(|&(l, dp, dm)| {
            let d = generalct::combine_spin_orbit(dp, dm, l);
            (l, d, (-2.0 * d.im).exp())
        })
        .collect();
    let mut f = PhaseShiftFile::from_channels(&channels, input.meta.clone());
    f.meta.generator = Some("ctinv combine".into());
    Ok(f)
}
