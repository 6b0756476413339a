//! Gyroscope measurement path: band-limited white rate noise, a second-order
//! low-pass filter, and rectangular rate-to-angle integration. The measured
//! pitch angle is what the control loop sees, and its random-walk departure
//! from the true angle is the structural limit on true tracking accuracy.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, PartialEq)]
pub enum SensingError {
    #[error("filter requires cutoff > 0 and 0 < zeta <= 1 (got cutoff {cutoff} Hz, zeta {zeta})")]
    InvalidFilter { cutoff: f64, zeta: f64 },
    #[error("time step must be positive (got {0} s)")]
    NonPositiveStep(f64),
}

// ---------------------------------------------------------------------------
// Gyro noise
// ---------------------------------------------------------------------------

/// Gyro rate-noise model constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GyroConfig<T> {
    /// Angle random walk figure (deg per root hour).
    pub arw: T,
    /// Sample rate (Hz); also the control loop rate.
    pub sample_rate: T,
    /// Seed for the deterministic noise stream.
    pub seed: u64,
}

impl<T: Real> Default for GyroConfig<T> {
    fn default() -> Self {
        Self {
            arw: T::lit(0.015),
            sample_rate: T::lit(200.0),
            seed: 7,
        }
    }
}

/// Band-limited white-noise power (rad^2/s) for an angle-random-walk figure
/// in deg per root hour: `(arw * 60 * pi / 180)^2`.
pub fn noise_power<T: Real>(arw: T) -> T {
    let w = arw * T::lit(60.0) * T::PI() / T::lit(180.0);
    w * w
}

/// Seeded rate-noise source. Each sample adds zero-mean white noise with
/// variance `noise_power * sample_rate` to the true rate.
#[derive(Debug, Clone)]
pub struct Gyro<T> {
    sigma: T,
    rng: ChaCha8Rng,
}

impl<T: Real> Gyro<T> {
    pub fn new(cfg: &GyroConfig<T>) -> Self {
        Self::with_seed(cfg, cfg.seed)
    }

    /// Same constants, caller-chosen stream seed (used for derived per-run
    /// streams).
    pub fn with_seed(cfg: &GyroConfig<T>, seed: u64) -> Self {
        Self {
            sigma: (noise_power(cfg.arw) * cfg.sample_rate).sqrt(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// One measurement at the sample cadence.
    pub fn sample(&mut self, true_rate: T) -> T {
        true_rate + self.sigma * T::std_normal(&mut self.rng)
    }
}

// ---------------------------------------------------------------------------
// Rate filter
// ---------------------------------------------------------------------------

/// Second-order low-pass constants for the rate path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterConfig<T> {
    /// Cutoff frequency (Hz); the natural frequency is `2 pi * cutoff`.
    pub cutoff_hz: T,
    /// Damping ratio, in (0, 1].
    pub zeta: T,
}

impl<T: Real> Default for FilterConfig<T> {
    fn default() -> Self {
        Self {
            cutoff_hz: T::lit(25.0),
            zeta: T::lit(0.7),
        }
    }
}

/// Discrete second-order low-pass `wn^2 / (s^2 + 2 zeta wn s + wn^2)`,
/// bilinear at a fixed step with the cutoff pre-warped so the discrete gain
/// at the natural frequency matches the continuous value. Unity DC gain.
#[derive(Debug, Clone, Copy)]
pub struct RateFilter<T> {
    b0: T,
    b1: T,
    b2: T,
    a1: T,
    a2: T,
    z1: T,
    z2: T,
}

impl<T: Real> RateFilter<T> {
    pub fn new(cfg: &FilterConfig<T>, dt: T) -> Result<Self, SensingError> {
        if cfg.cutoff_hz <= T::zero() || cfg.zeta <= T::zero() || cfg.zeta > T::one() {
            return Err(SensingError::InvalidFilter {
                cutoff: cfg.cutoff_hz.as_f64(),
                zeta: cfg.zeta.as_f64(),
            });
        }
        if dt <= T::zero() {
            return Err(SensingError::NonPositiveStep(dt.as_f64()));
        }
        let two = T::lit(2.0);
        let k = two / dt;
        // pre-warp the cutoff so the bilinear map lands it exactly
        let wn = k * (T::PI() * cfg.cutoff_hz * dt).tan();
        let wn2 = wn * wn;
        let a0 = k * k + two * cfg.zeta * wn * k + wn2;
        Ok(Self {
            b0: wn2 / a0,
            b1: two * wn2 / a0,
            b2: wn2 / a0,
            a1: (two * wn2 - two * k * k) / a0,
            a2: (k * k - two * cfg.zeta * wn * k + wn2) / a0,
            z1: T::zero(),
            z2: T::zero(),
        })
    }

    /// One filter step on the noisy rate.
    pub fn step(&mut self, noisy_rate: T) -> T {
        let y = self.b0 * noisy_rate + self.z1;
        self.z1 = self.b1 * noisy_rate - self.a1 * y + self.z2;
        self.z2 = self.b2 * noisy_rate - self.a2 * y;
        y
    }
}

/// One rectangular step of rate-to-angle integration at the sensor rate.
/// The measured pitch accumulates whatever noise survives the filter, so it
/// drifts away from the true pitch as a random walk.
pub fn integrate_rate<T: Real>(theta_meas: T, filtered_rate: T, dt: T) -> T {
    theta_meas + filtered_rate * dt
}
