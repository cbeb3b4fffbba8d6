//! Dormand–Prince 5(4) with step-size control, stepping exactly onto rate
//! discontinuities.

use alloc::vec::Vec;

use super::{Outcome, SimulateError, Trajectory};

pub(crate) trait Rhs {
    fn dim(&self) -> usize;
    fn eval(&self, t: f64, x: &[f64], out: &mut [f64]);
    /// Next time after `t` where the right-hand side may jump.
    fn next_break(&self, _t: f64) -> Option<f64> {
        None
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Settings {
    pub rtol: f64,
    pub atol: f64,
    pub t_end: f64,
    pub blowup: f64,
    pub boundary_eps: f64,
    pub max_steps: usize,
    pub max_step: Option<f64>,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// Fifth-order weights minus the embedded fourth-order ones.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Undershoot this small is rounding and is clipped to zero; anything larger
/// rejects the step.
pub(crate) const CLIP: f64 = 1e-14;

pub(crate) fn dopri<R: Rhs>(rhs: &R, t0: f64, x0: &[f64], s: &Settings) -> Result<Trajectory, SimulateError> {
    let n = rhs.dim();
    let mut t = t0;
    let mut x = x0.to_vec();
    let mut times = alloc::vec![t];
    let mut states = alloc::vec![x.clone()];
    let mut k: Vec<Vec<f64>> = alloc::vec![alloc::vec![0.0; n]; 7];
    let mut y = alloc::vec![0.0; n];
    let mut stage = alloc::vec![0.0; n];
    rhs.eval(t, &x, &mut k[0]);

    let mut below_since: Vec<Option<f64>> = x.iter().map(|&v| (v < s.boundary_eps).then_some(t)).collect();
    let mass0: f64 = x0.iter().sum();
    let mut h = initial_step(&x, &k[0], s).min(s.t_end - t0);
    if let Some(m) = s.max_step {
        h = h.min(m);
    }
    let mut steps = 0;
    let mut rejected = 0;

    let outcome = loop {
        let remaining = s.t_end - t;
        if remaining <= 1e-15 * t.abs().max(1.0) {
            break Outcome::Completed;
        }
        if steps >= s.max_steps {
            return Err(SimulateError::TooManySteps { t, steps });
        }
        // Land exactly on the end time or the next rate jump when close.
        let mut stop = s.t_end;
        let mut at_break = false;
        if let Some(b) = rhs.next_break(t) {
            if b < stop && b > t {
                stop = b;
                at_break = true;
            }
        }
        let mut h_try = h;
        let mut lands = false;
        if t + 1.01 * h_try >= stop {
            h_try = stop - t;
            lands = true;
        }
        if h_try <= 1e-14 * t.abs().max(1.0) {
            let mass: f64 = x.iter().sum();
            if mass > 1e3 * mass0.max(1.0) {
                break Outcome::BlowUp { t };
            }
            return Err(SimulateError::StepUnderflow { t, h: h_try });
        }
        // Rates are constant on a piece, so a step ending at a jump reads
        // them at its midpoint rather than at the jump itself.
        let freeze = lands && at_break;
        let stage_t = |c: f64| if freeze { t + 0.5 * h_try } else { t + c * h_try };

        for i in 1..7 {
            for m in 0..n {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(i) {
                    acc += A[i][j] * kj[m];
                }
                stage[m] = x[m] + h_try * acc;
            }
            rhs.eval(stage_t(C[i]), &stage, &mut k[i]);
        }
        // The last stage point is the fifth-order solution.
        y.copy_from_slice(&stage);

        let mut err = 0.0;
        let mut finite = true;
        for m in 0..n {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                e += E[j] * kj[m];
            }
            e *= h_try;
            let sc = s.atol + s.rtol * x[m].abs().max(y[m].abs());
            err += (e / sc) * (e / sc);
            finite &= y[m].is_finite();
        }
        let err = if finite { libm::sqrt(err / n.max(1) as f64) } else { f64::INFINITY };
        let undershoot = y.iter().any(|&v| v < -CLIP);

        if err <= 1.0 && !undershoot {
            t = if lands { stop } else { t + h_try };
            for v in y.iter_mut() {
                if *v < 0.0 {
                    *v = 0.0;
                }
            }
            x.copy_from_slice(&y);
            if freeze {
                rhs.eval(t, &x, &mut k[0]);
            } else {
                k.swap(0, 6);
            }
            times.push(t);
            states.push(x.clone());
            steps += 1;

            for (i, &v) in x.iter().enumerate() {
                if v < s.boundary_eps {
                    below_since[i].get_or_insert(t);
                } else {
                    below_since[i] = None;
                }
            }
            if x.iter().sum::<f64>() > s.blowup {
                break Outcome::BlowUp { t };
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * libm::pow(err, -0.2)).clamp(0.2, 5.0) };
            let grown = h_try * factor;
            h = if lands { grown.max(h) } else { grown };
        } else {
            rejected += 1;
            let factor = if err.is_finite() && err > 0.0 {
                (0.9 * libm::pow(err, -0.2)).clamp(0.2, 0.9)
            } else {
                0.2
            };
            h = h_try * if undershoot && err <= 1.0 { 0.5 } else { factor };
        }
        if let Some(m) = s.max_step {
            h = h.min(m);
        }
    };

    let outcome = match outcome {
        Outcome::Completed => below_since
            .iter()
            .enumerate()
            .filter_map(|(i, b)| b.map(|t| (i, t)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map_or(Outcome::Completed, |(species, t)| Outcome::BoundaryApproach { species, t }),
        other => other,
    };
    Ok(Trajectory {
        times,
        states,
        outcome,
        rejected,
    })
}

fn initial_step(x: &[f64], f: &[f64], s: &Settings) -> f64 {
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for (&xi, &fi) in x.iter().zip(f) {
        let sc = s.atol + s.rtol * xi.abs();
        d0 += (xi / sc) * (xi / sc);
        d1 += (fi / sc) * (fi / sc);
    }
    let (d0, d1) = (libm::sqrt(d0), libm::sqrt(d1));
    if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    }
}

/// One classical Runge–Kutta step, used for local finite differences.
pub(crate) fn rk4_step<R: Rhs>(rhs: &R, t: f64, x: &[f64], h: f64) -> Vec<f64> {
    let n = x.len();
    let mut k1 = alloc::vec![0.0; n];
    let mut k2 = alloc::vec![0.0; n];
    let mut k3 = alloc::vec![0.0; n];
    let mut k4 = alloc::vec![0.0; n];
    let mut tmp = alloc::vec![0.0; n];
    rhs.eval(t, x, &mut k1);
    for i in 0..n {
        tmp[i] = x[i] + 0.5 * h * k1[i];
    }
    rhs.eval(t + 0.5 * h, &tmp, &mut k2);
    for i in 0..n {
        tmp[i] = x[i] + 0.5 * h * k2[i];
    }
    rhs.eval(t + 0.5 * h, &tmp, &mut k3);
    for i in 0..n {
        tmp[i] = x[i] + h * k3[i];
    }
    rhs.eval(t + h, &tmp, &mut k4);
    (0..n)
        .map(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}
