use core::f64::consts::PI;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::SimulateError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Waveform {
    /// A fresh log-uniform value every `interval` time units.
    PiecewiseConstant { interval: f64 },
    /// `epsilon^sin(2 pi t / period + phase)` with a seeded phase.
    Sinusoidal { period: f64 },
}

impl Default for Waveform {
    fn default() -> Self {
        Waveform::PiecewiseConstant { interval: 0.1 }
    }
}

/// Seeded time-varying rate with `epsilon <= k(t) <= 1/epsilon`. Each
/// reaction reads its own stream, so one profile drives a whole network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariableRateProfile {
    pub epsilon: f64,
    pub waveform: Waveform,
    pub seed: u64,
}

impl VariableRateProfile {
    pub fn new(epsilon: f64, waveform: Waveform, seed: u64) -> Result<Self, SimulateError> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(SimulateError::BadOption("epsilon must lie in (0, 1]"));
        }
        let ok = match waveform {
            Waveform::PiecewiseConstant { interval } => interval > 0.0 && interval.is_finite(),
            Waveform::Sinusoidal { period } => period > 0.0 && period.is_finite(),
        };
        if !ok {
            return Err(SimulateError::BadOption("waveform interval or period must be positive"));
        }
        Ok(VariableRateProfile { epsilon, waveform, seed })
    }

    pub fn piecewise(epsilon: f64, seed: u64) -> Result<Self, SimulateError> {
        Self::new(epsilon, Waveform::default(), seed)
    }

    pub fn rate(&self, stream: u64, t: f64) -> f64 {
        let log_eps = libm::log(self.epsilon);
        match self.waveform {
            Waveform::PiecewiseConstant { interval } => {
                let u = uniform(self.seed, stream, 1 + interval_index(t, interval) as u64);
                // epsilon^(1 - 2u) is log-uniform on [epsilon, 1/epsilon).
                libm::exp((1.0 - 2.0 * u) * log_eps)
            }
            Waveform::Sinusoidal { period } => {
                let phase = 2.0 * PI * uniform(self.seed, stream, 0);
                libm::exp(libm::sin(2.0 * PI * t / period + phase) * log_eps)
            }
        }
    }

    /// First time after `t` where the rate jumps.
    pub fn next_break(&self, t: f64) -> Option<f64> {
        match self.waveform {
            Waveform::PiecewiseConstant { interval } => Some((interval_index(t, interval) + 1) as f64 * interval),
            Waveform::Sinusoidal { .. } => None,
        }
    }
}

// The small offset keeps a time computed as `k * interval` in interval k.
pub(crate) fn interval_index(t: f64, interval: f64) -> i64 {
    libm::floor(t / interval + 1e-9) as i64
}

fn uniform(seed: u64, stream: u64, word: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.set_word_pos(u128::from(word) << 1);
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
