use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::integrator::{dopri, Rhs};
use super::{estimate_liminf, IntegrateOptions, Kinetics, Outcome, SimulateError, VariableRateProfile};
use crate::dynamics::MassActionSystem;

pub const PERMANENCE_CAVEAT: &str =
    "empirical only: finitely many initial points and rate profiles cannot certify permanence";

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateChoice {
    /// The system's own rates.
    Constant,
    /// Every reaction follows the profile.
    Variable(VariableRateProfile),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeOptions {
    pub t_max: f64,
    pub window_fraction: f64,
    pub delta_floor: f64,
    pub seed: u64,
    /// Smallest coordinate of the near-vertex starting points.
    pub near_vertex: f64,
    pub integrate: IntegrateOptions,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions {
            t_max: 50.0,
            window_fraction: 0.25,
            delta_floor: 1e-3,
            seed: 0,
            near_vertex: 1e-4,
            integrate: IntegrateOptions {
                max_step: Some(0.1),
                ..Default::default()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    /// Index into the rate choices.
    pub profile: usize,
    pub initial: Vec<f64>,
    pub outcome: Outcome,
    pub trailing_min: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PermanenceVerdict {
    ConsistentWithPermanence,
    PersistenceFailureObserved { run: usize, species: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PermanenceReport {
    pub runs: Vec<RunSummary>,
    /// Minimum over runs and species of the trailing minima.
    pub delta_hat: f64,
    pub verdict: PermanenceVerdict,
    pub caveat: &'static str,
}

/// `count` points of the open simplex: first the vertices and edge midpoints
/// pushed inward to minimum coordinate `near_vertex`, then seeded
/// Dirichlet(1, ..., 1) samples.
pub fn simplex_initial_points(n: usize, count: usize, near_vertex: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(count);
    let lift = |support: &[usize]| {
        let rest = (1.0 - (n - support.len()) as f64 * near_vertex) / support.len() as f64;
        (0..n)
            .map(|i| if support.contains(&i) { rest } else { near_vertex })
            .collect::<Vec<f64>>()
    };
    for i in 0..n {
        out.push(lift(&[i]));
    }
    for i in 0..n {
        for j in i + 1..n {
            out.push(lift(&[i, j]));
        }
    }
    out.truncate(count);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < count {
        let e: Vec<f64> = (0..n)
            .map(|_| {
                let u = ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
                -libm::log(u)
            })
            .collect();
        let s: f64 = e.iter().sum();
        if s > 0.0 && e.iter().all(|&v| v > 0.0) {
            out.push(e.iter().map(|v| v / s).collect());
        }
    }
    out
}

/// Sum of the field must vanish on the simplex, or trajectories leave it.
fn check_conservation(sys: &MassActionSystem, kin: &Kinetics, seed: u64) -> Result<(), SimulateError> {
    let net = sys.network();
    if net
        .reactions()
        .iter()
        .all(|r| r.source.molecularity() == r.target.molecularity())
    {
        return Ok(());
    }
    if !kin.is_constant() {
        return Err(SimulateError::SimplexNotConserved { residual: f64::NAN });
    }
    let n = sys.species_count();
    let mut f = alloc::vec![0.0; n];
    let mut worst: f64 = 0.0;
    for x in simplex_initial_points(n, 16 + 2 * n, 0.05, seed) {
        kin.eval(0.0, &x, &mut f);
        let scale = 1.0 + f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        worst = worst.max(f.iter().sum::<f64>().abs() / scale);
    }
    if worst > 1e-9 {
        return Err(SimulateError::SimplexNotConserved { residual: worst });
    }
    Ok(())
}

/// Integrates from `n_inits` simplex points under each rate choice and
/// compares the smallest trailing-window minimum with `opts.delta_floor`.
pub fn permanence_probe(
    sys: &MassActionSystem,
    n_inits: usize,
    profiles: &[RateChoice],
    opts: &ProbeOptions,
) -> Result<PermanenceReport, SimulateError> {
    if n_inits == 0 || profiles.is_empty() {
        return Err(SimulateError::BadOption("need at least one initial point and one rate choice"));
    }
    let n = sys.species_count();
    let base = Kinetics::new(sys, opts.integrate.waveform)?;
    check_conservation(sys, &base, opts.seed)?;
    let settings = IntegrateOptions {
        t_max: opts.t_max,
        ..opts.integrate
    }
    .settings(0.0)?;

    let inits = simplex_initial_points(n, n_inits, opts.near_vertex, opts.seed);
    let mut runs = Vec::with_capacity(inits.len() * profiles.len());
    for (p, choice) in profiles.iter().enumerate() {
        let kin = match choice {
            RateChoice::Constant => base.clone(),
            RateChoice::Variable(profile) => Kinetics::with_profile(sys, *profile),
        };
        for x0 in &inits {
            let traj = dopri(&kin, 0.0, x0, &settings)?;
            if let Outcome::BlowUp { t } = traj.outcome {
                return Err(SimulateError::BlewUp { t });
            }
            let trailing_min = estimate_liminf(&traj, opts.window_fraction)?;
            runs.push(RunSummary {
                profile: p,
                initial: x0.clone(),
                outcome: traj.outcome,
                trailing_min,
            });
        }
    }

    let mut delta_hat = f64::INFINITY;
    let mut argmin = (0, 0);
    for (r, run) in runs.iter().enumerate() {
        for (i, &m) in run.trailing_min.iter().enumerate() {
            if m < delta_hat {
                delta_hat = m;
                argmin = (r, i);
            }
        }
    }
    let verdict = if delta_hat >= opts.delta_floor {
        PermanenceVerdict::ConsistentWithPermanence
    } else {
        PermanenceVerdict::PersistenceFailureObserved {
            run: argmin.0,
            species: argmin.1,
        }
    };
    Ok(PermanenceReport {
        runs,
        delta_hat,
        verdict,
        caveat: PERMANENCE_CAVEAT,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_points_lie_in_the_open_simplex() {
        let pts = simplex_initial_points(3, 20, 1e-4, 7);
        assert_eq!(pts.len(), 20);
        assert!((pts[0][0] - (1.0 - 2e-4)).abs() < 1e-15);
        assert!((pts[3][0] - 0.49995).abs() < 1e-15 && pts[3][2] == 1e-4);
        for p in &pts {
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(p.iter().all(|&v| v > 0.0));
        }
        assert_eq!(pts, simplex_initial_points(3, 20, 1e-4, 7));
    }

    #[test]
    fn open_systems_are_rejected() {
        let sys = MassActionSystem::parse("A -> 2A").unwrap();
        let r = permanence_probe(&sys, 3, &[RateChoice::Constant], &ProbeOptions::default());
        assert!(matches!(r, Err(SimulateError::SimplexNotConserved { .. })));
    }
}
