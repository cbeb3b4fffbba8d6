//! Pointwise checks that relative populations follow the projectivized field.

use alloc::vec::Vec;

use super::integrator::{dopri, rk4_step, Rhs};
use super::{IntegrateOptions, Kinetics, SimulateError, Trajectory};
use crate::dynamics::{homogeneous_degree, mass_action_field, Homogeneity, MassActionSystem};
use crate::poly::{CompiledField, PolynomialField};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    /// Largest scaled gap between the quotient-rule derivative of `x / x_T`
    /// and `f~(x / x_T) x_T^(d-1)`.
    pub algebraic: f64,
    /// Largest scaled gap between a central difference of `x / x_T` and the
    /// same right-hand side.
    pub finite_difference: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariableIdentityCheck {
    pub pointwise: IdentityCheck,
    /// Endpoint gap after integrating the augmented system in `(x~, x_T, y)`
    /// with `dy/dt = 1`.
    pub augmented: f64,
    /// Endpoint gap after integrating the time-rescaled system, whose rates
    /// are read at the carried clock `y`.
    pub rescaled: f64,
}

const FD_STEP: f64 = 1e-4;

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn total(x: &[f64], t: f64) -> Result<f64, SimulateError> {
    let xt: f64 = x.iter().sum();
    if xt > 0.0 {
        Ok(xt)
    } else {
        Err(SimulateError::NonPositiveTotal { t })
    }
}

/// Core loop shared by the constant and variable checks. `f_tilde(t, y, out)`
/// evaluates the projectivized field at the relative point `y`.
fn pointwise(
    kin: &Kinetics,
    traj: &Trajectory,
    d: u32,
    f_tilde: impl Fn(f64, &[f64], &mut [f64]),
) -> Result<IdentityCheck, SimulateError> {
    let n = kin.dim();
    let mut f = alloc::vec![0.0; n];
    let mut g = alloc::vec![0.0; n];
    let mut algebraic: f64 = 0.0;
    let mut fd: f64 = 0.0;
    let mut fd_samples = 0;
    for (&t, x) in traj.times.iter().zip(&traj.states) {
        let xt = total(x, t)?;
        let rel: Vec<f64> = x.iter().map(|v| v / xt).collect();
        let scale = libm::pow(xt, f64::from(d) - 1.0);
        f_tilde(t, &rel, &mut g);
        let rhs: Vec<f64> = g.iter().map(|v| v * scale).collect();
        let norm = 1.0 + sup(&rhs);

        kin.eval(t, x, &mut f);
        let sum_f: f64 = f.iter().sum();
        let lhs: Vec<f64> = (0..n).map(|i| (f[i] * xt - x[i] * sum_f) / (xt * xt)).collect();
        let gap: Vec<f64> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
        algebraic = algebraic.max(sup(&gap) / norm);

        // Skip points whose difference stencil would straddle a rate jump.
        let straddles = kin
            .next_break(t - 2.0 * FD_STEP)
            .is_some_and(|b| b < t + 2.0 * FD_STEP);
        if straddles {
            continue;
        }
        let rel_at = |h: f64| -> Result<Vec<f64>, SimulateError> {
            let y = rk4_step(kin, t, x, h);
            let yt = total(&y, t + h)?;
            Ok(y.iter().map(|v| v / yt).collect())
        };
        let (p1, m1) = (rel_at(FD_STEP)?, rel_at(-FD_STEP)?);
        let (p2, m2) = (rel_at(2.0 * FD_STEP)?, rel_at(-2.0 * FD_STEP)?);
        // Fourth-order central difference.
        let deriv: Vec<f64> = (0..n)
            .map(|i| (8.0 * (p1[i] - m1[i]) - (p2[i] - m2[i])) / (12.0 * FD_STEP))
            .collect();
        let gap: Vec<f64> = deriv.iter().zip(&rhs).map(|(a, b)| a - b).collect();
        fd = fd.max(sup(&gap) / norm);
        fd_samples += 1;
    }
    if fd_samples == 0 {
        fd = f64::NAN;
    }
    Ok(IdentityCheck {
        algebraic,
        finite_difference: fd,
        samples: traj.times.len(),
    })
}

/// Checks, at every sample of a trajectory of `sys`, that
/// `d(x/x_T)/dt = f~(x/x_T) x_T^(d-1)`, where `f_tilde` should be
/// `projectivize_field(f, d, false)` for the field `f` of `sys`.
pub fn check_projectivization_identity(
    sys: &MassActionSystem,
    traj: &Trajectory,
    f_tilde: &PolynomialField,
    d: u32,
) -> Result<IdentityCheck, SimulateError> {
    let f = mass_action_field(sys)?;
    match homogeneous_degree(&f) {
        Homogeneity::Degree(found) if found != d => return Err(SimulateError::Inhomogeneous(d)),
        Homogeneity::Inhomogeneous => return Err(SimulateError::Inhomogeneous(d)),
        _ => {}
    }
    let kin = Kinetics::new(sys, Default::default())?;
    let compiled: CompiledField = f_tilde.compile();
    pointwise(&kin, traj, d, |_, y, out| compiled.eval_into(y, out))
}

/// `f(y, t) - y sum f(y, t)` with rates frozen at time `t`.
fn projectivized(kin: &Kinetics, t: f64, y: &[f64], out: &mut [f64]) {
    kin.eval(t, y, out);
    let s: f64 = out.iter().sum();
    for (o, v) in out.iter_mut().zip(y) {
        *o -= v * s;
    }
}

struct Augmented<'a> {
    kin: &'a Kinetics,
    d: u32,
    rescaled: bool,
}

// State layout: relative point, then x_T, then the clock y.
impl Rhs for Augmented<'_> {
    fn dim(&self) -> usize {
        self.kin.dim() + 2
    }

    fn eval(&self, t: f64, z: &[f64], out: &mut [f64]) {
        let n = self.kin.dim();
        let (xt, y) = (z[n], z[n + 1]);
        // Unrescaled, y equals t exactly; reading t lets the integrator hold
        // rates fixed across a step that ends on a jump.
        let clock = if self.rescaled { y } else { t };
        let mut f = alloc::vec![0.0; n];
        self.kin.eval(clock, &z[..n], &mut f);
        let s: f64 = f.iter().sum();
        let dm1 = f64::from(self.d) - 1.0;
        let speed = if self.rescaled { 1.0 } else { libm::pow(xt, dm1) };
        for i in 0..n {
            out[i] = (f[i] - z[i] * s) * speed;
        }
        out[n] = xt * s * speed;
        out[n + 1] = if self.rescaled { libm::pow(xt, -dm1) } else { 1.0 };
    }

    fn next_break(&self, t: f64) -> Option<f64> {
        // Only in the unrescaled form does the clock run with time.
        if self.rescaled {
            None
        } else {
            self.kin.next_break(t)
        }
    }
}

/// Variable-rate version: the pointwise identity with rates frozen at each
/// sample time, plus two integrations of the autonomous augmented system
/// (one in original time, one time-rescaled) compared with `traj`.
pub fn check_variable_projectivization(
    sys: &MassActionSystem,
    traj: &Trajectory,
    d: u32,
    opts: &IntegrateOptions,
) -> Result<VariableIdentityCheck, SimulateError> {
    let kin = Kinetics::new(sys, opts.waveform)?;
    if kin.degree().is_some_and(|m| m != d) || (kin.degree().is_none() && !sys.is_empty()) {
        return Err(SimulateError::Inhomogeneous(d));
    }
    let pointwise = pointwise(&kin, traj, d, |t, y, out| projectivized(&kin, t, y, out))?;

    let n = kin.dim();
    let (t0, x0) = (traj.times[0], &traj.states[0]);
    let (t1, x1) = traj.last();
    let xt0 = total(x0, t0)?;
    let mut z0: Vec<f64> = x0.iter().map(|v| v / xt0).collect();
    z0.push(xt0);
    z0.push(t0);
    let tight = IntegrateOptions {
        t_max: t1,
        rtol: 1e-11,
        atol: 1e-13,
        max_step: None,
        ..*opts
    };
    let mut settings = tight.settings(t0)?;

    let aug = Augmented { kin: &kin, d, rescaled: false };
    let run = dopri(&aug, t0, &z0, &settings)?;
    let (_, z1) = run.last();
    let xt1 = total(x1, t1)?;
    let augmented = (0..n).fold(0.0f64, |m, i| m.max((z1[i] - x1[i] / xt1).abs()));

    // Rescaled time s runs slower than t by x_T^(d-1); choose the horizon so
    // the clock stays within the trajectory.
    let min_total = traj
        .states
        .iter()
        .map(|x| x.iter().sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    settings.t_end = t0 + (t1 - t0) * libm::pow(min_total, f64::from(d) - 1.0);
    let resc = Augmented { kin: &kin, d, rescaled: true };
    let run = dopri(&resc, t0, &z0, &settings)?;
    let (_, zr) = run.last();
    let clock = zr[n + 1];
    let reference = if clock > t0 {
        let abs = dopri(&kin, t0, x0, &IntegrateOptions { t_max: clock, ..tight }.settings(t0)?)?;
        abs.last().1.to_vec()
    } else {
        x0.clone()
    };
    let xtr = total(&reference, clock)?;
    let rescaled = (0..n).fold(0.0f64, |m, i| m.max((zr[i] - reference[i] / xtr).abs()));

    Ok(VariableIdentityCheck {
        pointwise,
        augmented,
        rescaled,
    })
}
