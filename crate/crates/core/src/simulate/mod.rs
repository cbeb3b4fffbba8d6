//! Numerical integration of mass-action dynamics, time-varying rates, and
//! empirical persistence probes.
//!
//! Everything here is floating point and gives evidence, not proofs.

mod identity;
mod integrator;
mod probe;
mod profile;

use alloc::vec::Vec;
use core::cell::RefCell;

use crate::dynamics::{DynamicsError, MassActionSystem, RateSpec};
use crate::linalg::Q;
use crate::poly::q_to_f64;

pub use identity::{check_projectivization_identity, check_variable_projectivization, IdentityCheck, VariableIdentityCheck};
pub use probe::{
    permanence_probe, simplex_initial_points, PermanenceReport, PermanenceVerdict, ProbeOptions, RateChoice,
    RunSummary, PERMANENCE_CAVEAT,
};
pub use profile::{VariableRateProfile, Waveform};

use integrator::{dopri, Rhs, Settings};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimulateError {
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error("initial state has {found} entries, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("initial state must be positive; x{} = {value}", index + 1)]
    NonPositiveInitial { index: usize, value: f64 },
    #[error("step size underflow at t = {t} (h = {h})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("gave up after {steps} steps at t = {t}")]
    TooManySteps { t: f64, steps: usize },
    #[error("bad option: {0}")]
    BadOption(&'static str),
    #[error("total concentration is not positive at t = {t}")]
    NonPositiveTotal { t: f64 },
    #[error("trajectory has {steps} accepted steps, need at least 10")]
    TooShort { steps: usize },
    #[error("trajectory blew up at t = {t}")]
    BlewUp { t: f64 },
    #[error("system does not conserve the simplex (residual {residual:e})")]
    SimplexNotConserved { residual: f64 },
    #[error("source complexes do not all have molecularity {0}")]
    Inhomogeneous(u32),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    Completed,
    /// Sum of concentrations crossed the threshold, or steps collapsed while
    /// it was growing; `t` is the last accepted time.
    BlowUp { t: f64 },
    /// Reached the end time with `species` below the boundary threshold
    /// continuously since `t`.
    BoundaryApproach { species: usize, t: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub outcome: Outcome,
    pub rejected: usize,
}

impl Trajectory {
    pub fn steps(&self) -> usize {
        self.times.len().saturating_sub(1)
    }

    pub fn last(&self) -> (f64, &[f64]) {
        let i = self.times.len() - 1;
        (self.times[i], &self.states[i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrateOptions {
    pub t_max: f64,
    pub rtol: f64,
    pub atol: f64,
    pub blowup_threshold: f64,
    pub boundary_eps: f64,
    pub max_steps: usize,
    pub max_step: Option<f64>,
    /// Shape used for reactions with variable rates.
    pub waveform: Waveform,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            t_max: 10.0,
            rtol: 1e-8,
            atol: 1e-10,
            blowup_threshold: 1e9,
            boundary_eps: 1e-12,
            max_steps: 1_000_000,
            max_step: None,
            waveform: Waveform::default(),
        }
    }
}

impl IntegrateOptions {
    fn settings(&self, t0: f64) -> Result<Settings, SimulateError> {
        if !(self.t_max > t0 && self.t_max.is_finite()) {
            return Err(SimulateError::BadOption("t_max must be finite and after the start time"));
        }
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return Err(SimulateError::BadOption("tolerances must be positive"));
        }
        if matches!(self.max_step, Some(h) if h.is_nan() || h <= 0.0) {
            return Err(SimulateError::BadOption("max_step must be positive"));
        }
        Ok(Settings {
            rtol: self.rtol,
            atol: self.atol,
            t_end: self.t_max,
            blowup: self.blowup_threshold,
            boundary_eps: self.boundary_eps,
            max_steps: self.max_steps,
            max_step: self.max_step,
        })
    }
}

#[derive(Debug, Clone, Copy)]
enum Rate {
    Constant(f64),
    Varying(VariableRateProfile, u64),
}

impl Rate {
    fn at(&self, t: f64) -> f64 {
        match self {
            Rate::Constant(k) => *k,
            Rate::Varying(p, stream) => p.rate(*stream, t),
        }
    }
}

/// A mass-action system compiled to floating point.
#[derive(Debug, Clone)]
pub(crate) struct Kinetics {
    n: usize,
    sources: Vec<Vec<(usize, i32)>>,
    deltas: Vec<Vec<(usize, f64)>>,
    rates: Vec<Rate>,
    molecularity: Vec<u32>,
    /// Rates of the current piece when every variable rate is piecewise
    /// constant on a shared grid; drawing them is the expensive part.
    grid: Option<f64>,
    cache: RefCell<Option<(i64, Vec<f64>)>>,
}

impl Kinetics {
    /// Variable rates read stream `r` of their profile for reaction `r`.
    pub(crate) fn new(sys: &MassActionSystem, waveform: Waveform) -> Result<Self, SimulateError> {
        let rates = sys
            .rates()
            .iter()
            .enumerate()
            .map(|(r, spec)| match spec {
                RateSpec::Constant(k) => Ok(Rate::Constant(q_to_f64(k))),
                RateSpec::Variable { profile, epsilon } => Ok(Rate::Varying(
                    VariableRateProfile::new(q_to_f64(epsilon), waveform, *profile)?,
                    r as u64,
                )),
            })
            .collect::<Result<Vec<_>, SimulateError>>()?;
        Ok(Self::with_rates(sys, rates))
    }

    /// Every reaction follows `profile`, ignoring the system's own rates.
    pub(crate) fn with_profile(sys: &MassActionSystem, profile: VariableRateProfile) -> Self {
        let rates = (0..sys.len()).map(|r| Rate::Varying(profile, r as u64)).collect();
        Self::with_rates(sys, rates)
    }

    fn with_rates(sys: &MassActionSystem, rates: Vec<Rate>) -> Self {
        let net = sys.network();
        let sources = net
            .reactions()
            .iter()
            .map(|r| {
                r.source
                    .coeffs()
                    .iter()
                    .enumerate()
                    .filter(|(_, &a)| a > 0)
                    .map(|(i, &a)| (i, a as i32))
                    .collect()
            })
            .collect();
        let deltas = net
            .reactions()
            .iter()
            .map(|r| {
                r.vector()
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0)
                    .map(|(i, &v)| (i, v as f64))
                    .collect()
            })
            .collect();
        let molecularity = net.reactions().iter().map(|r| r.source.molecularity()).collect();
        let mut intervals = rates.iter().filter_map(|r| match r {
            Rate::Varying(p, _) => Some(p.waveform),
            Rate::Constant(_) => None,
        });
        let grid = match intervals.next() {
            Some(Waveform::PiecewiseConstant { interval })
                if intervals.all(|w| w == Waveform::PiecewiseConstant { interval }) =>
            {
                Some(interval)
            }
            _ => None,
        };
        Kinetics {
            n: net.species_count(),
            sources,
            deltas,
            rates,
            molecularity,
            grid,
            cache: RefCell::new(None),
        }
    }

    /// Common source molecularity, when the field is homogeneous.
    pub(crate) fn degree(&self) -> Option<u32> {
        let d = *self.molecularity.first()?;
        self.molecularity.iter().all(|&m| m == d).then_some(d)
    }

    pub(crate) fn is_constant(&self) -> bool {
        self.rates.iter().all(|r| matches!(r, Rate::Constant(_)))
    }
}

impl Rhs for Kinetics {
    fn dim(&self) -> usize {
        self.n
    }

    fn eval(&self, t: f64, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        let mut cache = self.cache.borrow_mut();
        let rates: &[f64] = match self.grid {
            Some(interval) => {
                let piece = profile::interval_index(t, interval);
                if cache.as_ref().is_none_or(|(p, _)| *p != piece) {
                    *cache = Some((piece, self.rates.iter().map(|r| r.at(t)).collect()));
                }
                &cache.as_ref().expect("filled above").1
            }
            None => &[],
        };
        for (r, (src, delta)) in self.sources.iter().zip(&self.deltas).enumerate() {
            let mut flux = match rates.get(r) {
                Some(&k) => k,
                None => self.rates[r].at(t),
            };
            for &(i, a) in src {
                for _ in 0..a {
                    flux *= x[i];
                }
            }
            for &(i, v) in delta {
                out[i] += flux * v;
            }
        }
    }

    fn next_break(&self, t: f64) -> Option<f64> {
        self.rates
            .iter()
            .filter_map(|r| match r {
                Rate::Varying(p, _) => p.next_break(t),
                Rate::Constant(_) => None,
            })
            .min_by(f64::total_cmp)
    }
}

fn check_x0(n: usize, x0: &[f64]) -> Result<(), SimulateError> {
    if x0.len() != n {
        return Err(SimulateError::DimensionMismatch {
            expected: n,
            found: x0.len(),
        });
    }
    if let Some((index, &value)) = x0.iter().enumerate().find(|(_, v)| !(**v > 0.0 && v.is_finite())) {
        return Err(SimulateError::NonPositiveInitial { index, value });
    }
    Ok(())
}

/// Integrates `sys` from `x0` at time 0 up to `opts.t_max`.
pub fn integrate(sys: &MassActionSystem, x0: &[f64], opts: &IntegrateOptions) -> Result<Trajectory, SimulateError> {
    check_x0(sys.species_count(), x0)?;
    let kin = Kinetics::new(sys, opts.waveform)?;
    dopri(&kin, 0.0, x0, &opts.settings(0.0)?)
}

/// As [`integrate`], with every reaction following `profile`.
pub fn integrate_with_profile(
    sys: &MassActionSystem,
    x0: &[f64],
    profile: VariableRateProfile,
    opts: &IntegrateOptions,
) -> Result<Trajectory, SimulateError> {
    check_x0(sys.species_count(), x0)?;
    let kin = Kinetics::with_profile(sys, profile);
    dopri(&kin, 0.0, x0, &opts.settings(0.0)?)
}

/// Same network with every rate replaced by a variable rate bounded by
/// `epsilon`; reaction `r` reads stream `r` of the seeded profile.
pub fn with_variable_rates(sys: &MassActionSystem, epsilon: Q, seed: u64) -> Result<MassActionSystem, SimulateError> {
    let rates = (0..sys.len())
        .map(|_| RateSpec::Variable {
            profile: seed,
            epsilon: epsilon.clone(),
        })
        .collect();
    Ok(MassActionSystem::new(sys.network().clone(), rates)?)
}

/// Minimum of each species over the last `window_fraction` of the time span.
pub fn estimate_liminf(traj: &Trajectory, window_fraction: f64) -> Result<Vec<f64>, SimulateError> {
    if !(window_fraction > 0.0 && window_fraction < 1.0) {
        return Err(SimulateError::BadOption("window fraction must lie in (0, 1)"));
    }
    if let Outcome::BlowUp { t } = traj.outcome {
        return Err(SimulateError::BlewUp { t });
    }
    if traj.steps() < 10 {
        return Err(SimulateError::TooShort { steps: traj.steps() });
    }
    let (t0, t1) = (traj.times[0], traj.last().0);
    let start = t1 - window_fraction * (t1 - t0);
    let n = traj.states[0].len();
    let mut mins = alloc::vec![f64::INFINITY; n];
    for (t, x) in traj.times.iter().zip(&traj.states) {
        if *t >= start {
            for (m, v) in mins.iter_mut().zip(x) {
                *m = m.min(*v);
            }
        }
    }
    Ok(mins)
}
