//! Actuator dynamics and lag compensation.
//!
//! Each control channel drives a second-order unity-DC-gain servo with hard
//! deflection and slew limits. Because the servo bandwidth costs phase, a
//! first-order phase-lead stage `(T s + 1)/(n T s + 1)` with `n < 1` sits
//! between the controller output and the servo input; it is discretized with
//! the bilinear transform so its DC gain stays exactly one.

use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, PartialEq)]
pub enum ActuationError {
    #[error("damping ratio {0} outside (0, 1/sqrt(2)); bandwidth relation undefined")]
    DampingOutOfRange(f64),
    #[error("natural frequency and time constant require positive inputs (got zeta {zeta}, omega {omega})")]
    NonPositive { zeta: f64, omega: f64 },
    #[error("lead parameter n = {0} must lie in (0, 1); n >= 1 would lag instead of lead")]
    InvalidLeadParameter(f64),
    #[error("time step must be positive (got {0} s)")]
    NonPositiveStep(f64),
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// Servo limits and second-order model constants for one channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActuatorConfig<T> {
    /// Hard deflection limit (rad).
    pub max_deflection: T,
    /// Servo bandwidth (Hz).
    pub bandwidth_hz: T,
    /// Hard slew-rate limit (rad/s).
    pub slew_rate: T,
    /// Servo damping ratio, in (0, 1/sqrt(2)).
    pub damping_ratio: T,
    /// Natural frequency (rad/s), derived from the bandwidth.
    pub natural_frequency: T,
    /// Lead parameter `n` in (0, 1) for this channel's compensator.
    pub compensator_n: T,
}

impl<T: Real> ActuatorConfig<T> {
    pub fn new(
        max_deflection: T,
        bandwidth_hz: T,
        slew_rate: T,
        damping_ratio: T,
        compensator_n: T,
    ) -> Result<Self, ActuationError> {
        if compensator_n <= T::zero() || compensator_n >= T::one() {
            return Err(ActuationError::InvalidLeadParameter(compensator_n.as_f64()));
        }
        Ok(Self {
            max_deflection,
            bandwidth_hz,
            slew_rate,
            damping_ratio,
            natural_frequency: natural_frequency(bandwidth_hz, damping_ratio)?,
            compensator_n,
        })
    }

    /// Nozzle servo: 15 deg travel, 40 Hz, 400 deg/s.
    pub fn nozzle_default() -> Self {
        Self::new(
            T::lit(15.0_f64.to_radians()),
            T::lit(40.0),
            T::lit(400.0_f64.to_radians()),
            T::lit(0.3),
            T::lit(0.1),
        )
        .expect("default nozzle actuator constants are valid")
    }

    /// Tail servo: 30 deg travel, 45 Hz, 600 deg/s.
    pub fn elevator_default() -> Self {
        Self::new(
            T::lit(30.0_f64.to_radians()),
            T::lit(45.0),
            T::lit(600.0_f64.to_radians()),
            T::lit(0.3),
            T::lit(0.1),
        )
        .expect("default elevator actuator constants are valid")
    }

    /// Lead time constant for this servo, `1 / (zeta * omega_n)`.
    pub fn lead_time_constant(&self) -> Result<T, ActuationError> {
        compensator_time_constant(self.damping_ratio, self.natural_frequency)
    }
}

/// Natural frequency (rad/s) that places the -3 dB point of an underdamped
/// second-order servo at `bandwidth_hz`:
/// `omega_n = 2 pi f_bw / sqrt(1 - 2 zeta^2 + sqrt(2 - 4 zeta^2 + 4 zeta^4))`.
pub fn natural_frequency<T: Real>(bandwidth_hz: T, zeta: T) -> Result<T, ActuationError> {
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    if zeta <= T::zero() || zeta >= T::FRAC_1_SQRT_2() {
        return Err(ActuationError::DampingOutOfRange(zeta.as_f64()));
    }
    let z2 = zeta * zeta;
    let inner = (two - four * z2 + four * z2 * z2).sqrt();
    let denom = (T::one() - two * z2 + inner).sqrt();
    Ok(two * T::PI() * bandwidth_hz / denom)
}

/// Servo time constant `1 / (zeta * omega_n)` (s), the basis for the lead
/// stage.
pub fn compensator_time_constant<T: Real>(zeta: T, omega_n: T) -> Result<T, ActuationError> {
    if zeta <= T::zero() || omega_n <= T::zero() {
        return Err(ActuationError::NonPositive {
            zeta: zeta.as_f64(),
            omega: omega_n.as_f64(),
        });
    }
    Ok((zeta * omega_n).recip())
}

// ---------------------------------------------------------------------------
// Phase-lead compensator
// ---------------------------------------------------------------------------

/// Discrete realization of `(T s + 1)/(n T s + 1)` at a fixed step, bilinear.
/// DC gain is exactly one; the high-frequency gain approaches `1/n`.
#[derive(Debug, Clone, Copy)]
pub struct LeadCompensator<T> {
    b0: T,
    b1: T,
    a1: T,
    state: T,
}

impl<T: Real> LeadCompensator<T> {
    pub fn new(time_constant: T, n: T, dt: T) -> Result<Self, ActuationError> {
        if n <= T::zero() || n >= T::one() {
            return Err(ActuationError::InvalidLeadParameter(n.as_f64()));
        }
        if dt <= T::zero() {
            return Err(ActuationError::NonPositiveStep(dt.as_f64()));
        }
        let k = T::lit(2.0) / dt;
        let tk = time_constant * k;
        let ntk = n * time_constant * k;
        let a0 = ntk + T::one();
        Ok(Self {
            b0: (tk + T::one()) / a0,
            b1: (T::one() - tk) / a0,
            a1: (T::one() - ntk) / a0,
            state: T::zero(),
        })
    }

    /// Build the compensator matched to a servo at the controller step.
    pub fn for_actuator(cfg: &ActuatorConfig<T>, dt: T) -> Result<Self, ActuationError> {
        Self::new(cfg.lead_time_constant()?, cfg.compensator_n, dt)
    }

    /// Advance one step: input is the required deflection, output the
    /// compensated command.
    pub fn step(&mut self, delta_required: T) -> T {
        let y = self.b0 * delta_required + self.state;
        self.state = self.b1 * delta_required - self.a1 * y;
        y
    }

    /// Frequency response (magnitude, phase in rad) at `omega` rad/s for a
    /// given step; used by tests to confirm the lead peak.
    pub fn response(&self, omega: T, dt: T) -> (T, T) {
        let w = omega * dt;
        let (cos_w, sin_w) = (w.cos(), w.sin());
        // H(e^{-jw}) = (b0 + b1 e^{-jw}) / (1 + a1 e^{-jw})
        let num_re = self.b0 + self.b1 * cos_w;
        let num_im = -self.b1 * sin_w;
        let den_re = T::one() + self.a1 * cos_w;
        let den_im = -self.a1 * sin_w;
        let den_sq = den_re * den_re + den_im * den_im;
        let re = (num_re * den_re + num_im * den_im) / den_sq;
        let im = (num_im * den_re - num_re * den_im) / den_sq;
        ((re * re + im * im).sqrt(), im.atan2(re))
    }
}

// ---------------------------------------------------------------------------
// Servo with limits
// ---------------------------------------------------------------------------

/// Realized deflection and rate of one servo.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActuatorState<T> {
    /// Deflection (rad), always within the configured limit.
    pub deflection: T,
    /// Deflection rate (rad/s), always within the slew limit.
    pub deflection_rate: T,
}

impl<T: Real> ActuatorState<T> {
    pub fn at_rest() -> Self {
        Self {
            deflection: T::zero(),
            deflection_rate: T::zero(),
        }
    }
}

/// Advance the servo one step toward `delta_cmd`.
///
/// The smooth dynamics `dd'' = omega_n^2 (cmd - d) - 2 zeta omega_n d'` are
/// integrated with one explicit trapezoidal (Heun) step, then the rate is
/// clamped to the slew limit, the deflection advanced with the clamped rate,
/// and finally the deflection clamped to its travel limit with the rate
/// zeroed whenever the position clamp engages.
pub fn actuator_step<T: Real>(
    cfg: &ActuatorConfig<T>,
    state: &ActuatorState<T>,
    delta_cmd: T,
    dt: T,
) -> ActuatorState<T> {
    let wn = cfg.natural_frequency;
    let two_zeta_wn = T::lit(2.0) * cfg.damping_ratio * wn;
    let accel = |d: T, r: T| wn * wn * (delta_cmd - d) - two_zeta_wn * r;

    let a1 = accel(state.deflection, state.deflection_rate);
    let d_mid = state.deflection + dt * state.deflection_rate;
    let r_mid = state.deflection_rate + dt * a1;
    let a2 = accel(d_mid, r_mid);

    let half = T::lit(0.5);
    let rate_raw = state.deflection_rate + half * dt * (a1 + a2);
    let rate = rate_raw.max(-cfg.slew_rate).min(cfg.slew_rate);
    let deflection_raw = state.deflection + half * dt * (state.deflection_rate + rate);

    if deflection_raw.abs() >= cfg.max_deflection {
        ActuatorState {
            deflection: if deflection_raw > T::zero() {
                cfg.max_deflection
            } else {
                -cfg.max_deflection
            },
            deflection_rate: T::zero(),
        }
    } else {
        ActuatorState {
            deflection: deflection_raw,
            deflection_rate: rate,
        }
    }
}
