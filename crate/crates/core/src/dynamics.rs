//! Longitudinal plant model.
//!
//! The airframe is a rigid body with one rotational degree of freedom
//! (pitch). Angle of attack and pitch rate evolve under aerodynamic and
//! thrust-vector moments; thrust, mass, and centre of gravity follow
//! boost-sustain schedules the controller is never told about.

use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, PartialEq)]
pub enum DynamicsError {
    #[error("mass must be positive (got {0} kg)")]
    NonPositiveMass(f64),
    #[error("centre of gravity {cg} m must lie inside the body (length {length} m)")]
    CgOutOfBody { cg: f64, length: f64 },
}

// ---------------------------------------------------------------------------
// Parameters and state
// ---------------------------------------------------------------------------

/// Static airframe and aerodynamic constants.
///
/// Defaults describe an agile air-to-air airframe at a fixed supersonic
/// flight condition; the aero coefficients are held constant, so angle of
/// attack effects enter only through the uncertainty channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MissileParams<T> {
    /// Airspeed (m/s), assumed constant.
    pub v_m: T,
    /// Initial mass (kg).
    pub m0: T,
    /// Pitch moment of inertia (kg m^2).
    pub i_yy: T,
    /// Pitch moment coefficient per rad of angle of attack.
    pub c_m_alpha0: T,
    /// Pitch moment coefficient per rad of tail deflection.
    pub c_m_delta_t0: T,
    /// Normal force coefficient per rad of angle of attack.
    pub c_z_alpha0: T,
    /// Normal force coefficient per rad of tail deflection.
    pub c_z_delta_t0: T,
    /// Dynamic pressure (Pa) at the flight condition.
    pub qbar: T,
    /// Aerodynamic reference area (m^2).
    pub s_ref: T,
    /// Body diameter (m).
    pub d: T,
    /// Body length (m).
    pub l: T,
}

impl<T: Real> Default for MissileParams<T> {
    fn default() -> Self {
        Self {
            v_m: T::lit(1021.0),
            m0: T::lit(162.0),
            i_yy: T::lit(187.0),
            c_m_alpha0: T::lit(-5.5313),
            c_m_delta_t0: T::lit(-6.6013),
            c_z_alpha0: T::lit(-1.2713),
            c_z_delta_t0: T::lit(-7.5368),
            qbar: T::lit(638_500.0),
            s_ref: T::lit(0.0507),
            d: T::lit(0.2540),
            l: T::lit(3.72),
        }
    }
}

/// Boost-sustain thrust schedule and the exponential mass / CG burn profiles.
///
/// Mass decays as `m0 * (m_f/m0)^((t - t_I)/t_b)` during the burn and holds
/// at the final value afterwards; the centre of gravity follows the same
/// form toward its final (forward) position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlightProfiles<T> {
    /// Ignition time (s).
    pub t_ignition: T,
    /// Burn duration (s).
    pub t_burn: T,
    /// Final-to-initial mass ratio, in (0, 1).
    pub mass_fraction_final: T,
    /// Initial centre of gravity from the nose (m).
    pub cg_initial: T,
    /// Final-to-initial CG ratio, in (0, 1); the CG moves forward.
    pub cg_fraction_final: T,
    /// Boost-phase thrust (N). The exact boost magnitude is an assumption;
    /// robustness is checked across a range of values.
    pub thrust_boost: T,
    /// Sustain (cruise) thrust (N).
    pub thrust_sustain: T,
}

impl<T: Real> Default for FlightProfiles<T> {
    fn default() -> Self {
        Self {
            t_ignition: T::zero(),
            t_burn: T::lit(3.0),
            mass_fraction_final: T::lit(0.6),
            // half the default body length
            cg_initial: T::lit(1.86),
            cg_fraction_final: T::lit(0.8),
            thrust_boost: T::lit(30_000.0),
            thrust_sustain: T::lit(5_000.0),
        }
    }
}

impl<T: Real> FlightProfiles<T> {
    /// Mass (kg) at time `t`, given the initial mass.
    pub fn mass_at(&self, m0: T, t: T) -> T {
        if t < self.t_ignition {
            m0
        } else if t <= self.t_ignition + self.t_burn {
            m0 * self
                .mass_fraction_final
                .powf((t - self.t_ignition) / self.t_burn)
        } else {
            m0 * self.mass_fraction_final
        }
    }

    /// Centre of gravity from the nose (m) at time `t`. Monotone
    /// non-increasing: the CG moves forward as propellant burns.
    pub fn cg_at(&self, t: T) -> T {
        if t < self.t_ignition {
            self.cg_initial
        } else if t <= self.t_ignition + self.t_burn {
            self.cg_initial
                * self
                    .cg_fraction_final
                    .powf((t - self.t_ignition) / self.t_burn)
        } else {
            self.cg_initial * self.cg_fraction_final
        }
    }

    /// Thrust (N) at time `t`: zero before ignition, boost during the burn,
    /// sustain afterwards.
    pub fn thrust_at(&self, t: T) -> T {
        if t < self.t_ignition {
            T::zero()
        } else if t < self.t_ignition + self.t_burn {
            self.thrust_boost
        } else {
            self.thrust_sustain
        }
    }

    /// Forward CG shift `x_cg(0) - x_cg(t)` (m); zero at launch, grows to
    /// `cg_initial * (1 - cg_fraction_final)` by burnout.
    pub fn cg_shift_at(&self, t: T) -> T {
        self.cg_initial - self.cg_at(t)
    }
}

/// Worst-case magnitudes for the uncertainty channels. These bound what the
/// simulator is allowed to realize, and they feed the switching-gain rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyBounds<T> {
    /// Bound on the pitch-moment-slope error (dimensionless).
    pub delta_cm_alpha_max: T,
    /// Bound on the thrust deviation from its launch value (N).
    pub delta_thrust_max: T,
    /// Bound on the forward CG shift (m).
    pub delta_cg_max: T,
    /// Bound on the nozzle misalignment (rad).
    pub delta_nozzle_max: T,
    /// Bound on the lumped mass-effect disturbance on pitch acceleration
    /// (rad/s^2). The mass term is never given a closed form, so it is
    /// modelled as a bounded additive disturbance.
    pub lumped_mass_term_max: T,
}

impl<T: Real> Default for UncertaintyBounds<T> {
    fn default() -> Self {
        Self {
            // 30% of the nominal pitch moment slope
            delta_cm_alpha_max: T::lit(1.65939),
            delta_thrust_max: T::lit(25_000.0),
            delta_cg_max: T::lit(0.372),
            delta_nozzle_max: T::lit(0.0873),
            lumped_mass_term_max: T::one(),
        }
    }
}

impl<T: Real> UncertaintyBounds<T> {
    /// All channels off; the plant collapses to the nominal model.
    pub fn none() -> Self {
        Self {
            delta_cm_alpha_max: T::zero(),
            delta_thrust_max: T::zero(),
            delta_cg_max: T::zero(),
            delta_nozzle_max: T::zero(),
            lumped_mass_term_max: T::zero(),
        }
    }
}

/// Concrete uncertainty values the simulator uses for one run. The thrust
/// and CG deviations come from the flight profiles; these are the static
/// draws plus the per-tick lumped disturbance. The controller never sees
/// any of them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyRealization<T> {
    /// Realized pitch-moment-slope error (dimensionless).
    pub delta_cm_alpha: T,
    /// Realized nozzle misalignment (rad).
    pub delta_nozzle: T,
    /// Current lumped mass-effect disturbance (rad/s^2).
    pub lumped_mass_term: T,
}

impl<T: Real> UncertaintyRealization<T> {
    pub fn zero() -> Self {
        Self {
            delta_cm_alpha: T::zero(),
            delta_nozzle: T::zero(),
            lumped_mass_term: T::zero(),
        }
    }
}

/// Plant state: angle of attack, pitch rate, pitch angle, time. Pitch is
/// the integral of the rate from launch (single rotational axis).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantState<T> {
    /// Angle of attack (rad).
    pub alpha: T,
    /// Pitch rate (rad/s).
    pub q: T,
    /// Pitch angle (rad).
    pub theta: T,
    /// Time since launch (s).
    pub t: T,
}

impl<T: Real> PlantState<T> {
    pub fn zeroed() -> Self {
        Self {
            alpha: T::zero(),
            q: T::zero(),
            theta: T::zero(),
            t: T::zero(),
        }
    }
}

// ---------------------------------------------------------------------------
// Equations of motion
// ---------------------------------------------------------------------------

/// Dynamic pressure `0.5 * rho * v^2` (Pa).
pub fn dynamic_pressure<T: Real>(rho: T, v: T) -> T {
    T::lit(0.5) * rho * v * v
}

/// Angle-of-attack rate (rad/s) from the normal-force balance:
/// aero force, pitch-rate coupling, nozzle and tail force terms.
pub fn alpha_dot<T: Real>(
    p: &MissileParams<T>,
    m: T,
    alpha: T,
    q: T,
    delta_n: T,
    delta_t: T,
    thrust: T,
) -> Result<T, DynamicsError> {
    if m <= T::zero() {
        return Err(DynamicsError::NonPositiveMass(m.as_f64()));
    }
    let mv = m * p.v_m;
    Ok(p.qbar * p.s_ref * p.c_z_alpha0 / mv * alpha
        + q
        + thrust / mv * delta_n
        + p.qbar * p.s_ref * p.c_z_delta_t0 / mv * delta_t)
}

/// Nominal pitch acceleration (rad/s^2): aero restoring moment, nozzle
/// moment through the arm `(l - x_cg)`, and tail moment.
pub fn q_dot_nominal<T: Real>(
    p: &MissileParams<T>,
    cg: T,
    alpha: T,
    delta_n: T,
    delta_t: T,
    thrust: T,
) -> Result<T, DynamicsError> {
    if cg <= T::zero() || cg >= p.l {
        return Err(DynamicsError::CgOutOfBody {
            cg: cg.as_f64(),
            length: p.l.as_f64(),
        });
    }
    Ok(p.qbar * p.s_ref * p.d * p.c_m_alpha0 / p.i_yy * alpha
        + thrust * (p.l - cg) / p.i_yy * delta_n
        + p.qbar * p.s_ref * p.d * p.c_m_delta_t0 / p.i_yy * delta_t)
}

/// Disturbance torque per unit inertia (rad/s^2) produced by the uncertainty
/// channels at time `t`: moment-slope error, CG-shift loss of nozzle arm,
/// misalignment torque through the shrunken arm, and the lumped mass term.
/// This is exactly the gap between the true and the nominal pitch
/// acceleration.
pub fn pitch_disturbance<T: Real>(
    p: &MissileParams<T>,
    profiles: &FlightProfiles<T>,
    real: &UncertaintyRealization<T>,
    alpha: T,
    delta_n: T,
    t: T,
) -> T {
    let thrust_true = profiles.thrust_at(t);
    let cg_shift = profiles.cg_shift_at(t);
    p.qbar * p.s_ref * p.d * real.delta_cm_alpha / p.i_yy * alpha
        - thrust_true * cg_shift / p.i_yy * delta_n
        + thrust_true / p.i_yy
            * (p.l - profiles.cg_initial - cg_shift)
            * real.delta_nozzle
        + real.lumped_mass_term
}

/// True pitch acceleration (rad/s^2): the nominal model frozen at its launch
/// parameters plus the live disturbance. Collapses to `q_dot_nominal` when
/// every uncertainty channel is zero and the profiles are constant.
pub fn q_dot_true<T: Real>(
    p: &MissileParams<T>,
    profiles: &FlightProfiles<T>,
    real: &UncertaintyRealization<T>,
    state: &PlantState<T>,
    delta_n: T,
    delta_t: T,
) -> Result<T, DynamicsError> {
    let nominal = q_dot_nominal(
        p,
        profiles.cg_initial,
        state.alpha,
        delta_n,
        delta_t,
        profiles.thrust_boost,
    )?;
    Ok(nominal + pitch_disturbance(p, profiles, real, state.alpha, delta_n, state.t))
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn params() -> MissileParams<f64> {
        MissileParams::default()
    }

    fn profiles() -> FlightProfiles<f64> {
        FlightProfiles::default()
    }

    /// Profiles with no time variation at all: boost equals sustain and the
    /// burn leaves mass and CG untouched.
    fn constant_profiles(thrust: f64) -> FlightProfiles<f64> {
        FlightProfiles {
            mass_fraction_final: 1.0,
            cg_fraction_final: 1.0,
            thrust_boost: thrust,
            thrust_sustain: thrust,
            ..FlightProfiles::default()
        }
    }

    #[test]
    fn dynamic_pressure_matches_flight_condition() {
        // density backed out of the default flight condition
        let q = dynamic_pressure(1.22501, 1021.0);
        assert_relative_eq!(q, 638_500.0, max_relative = 1e-3);
        assert_eq!(dynamic_pressure(1.2, 0.0), 0.0);
        assert_eq!(dynamic_pressure(0.0, 1021.0), 0.0);
    }

    #[test]
    fn dynamic_pressure_round_trip() {
        let p = params();
        let rho = 2.0 * p.qbar / (p.v_m * p.v_m);
        assert_relative_eq!(dynamic_pressure(rho, p.v_m), p.qbar, max_relative = 1e-12);
    }

    #[test]
    fn mass_profile_hits_documented_points() {
        let pr = profiles();
        assert_eq!(pr.mass_at(162.0, 0.0), 162.0);
        assert_abs_diff_eq!(pr.mass_at(162.0, 3.0), 97.2, epsilon = 1e-12);
        // hand evaluation of 162 * 0.6^0.5
        assert_relative_eq!(pr.mass_at(162.0, 1.5), 125.48466, max_relative = 1e-6);
        // held constant after burnout
        assert_abs_diff_eq!(pr.mass_at(162.0, 30.0), 97.2, epsilon = 1e-12);
    }

    #[test]
    fn mass_profile_geometric_midpoint() {
        let pr = profiles();
        let m0 = 162.0;
        let mf = m0 * pr.mass_fraction_final;
        let mid = pr.mass_at(m0, pr.t_ignition + pr.t_burn / 2.0);
        assert_relative_eq!(mid, (m0 * mf).sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn cg_profile_hits_documented_points() {
        let pr = profiles();
        assert_eq!(pr.cg_at(0.0), 1.86);
        assert_abs_diff_eq!(pr.cg_at(3.0), 1.488, epsilon = 1e-12);
        // hand evaluation of 1.86 * 0.8^0.5
        assert_relative_eq!(pr.cg_at(1.5), 1.6636346, max_relative = 1e-6);
        assert_abs_diff_eq!(pr.cg_at(10.0), 1.488, epsilon = 1e-12);
    }

    #[test]
    fn thrust_profile_phases() {
        let pr = profiles();
        assert_eq!(pr.thrust_at(10.0), 5_000.0);
        let delayed = FlightProfiles {
            t_ignition: 0.5,
            ..profiles()
        };
        assert_eq!(delayed.thrust_at(0.1), 0.0);
        let pr30 = FlightProfiles {
            thrust_boost: 30_000.0,
            ..profiles()
        };
        assert_eq!(pr30.thrust_at(1.0), 30_000.0);
        // half-open boost window: burnout instant is already sustain
        assert_eq!(pr.thrust_at(3.0), 5_000.0);
    }

    #[test]
    fn alpha_dot_documented_points() {
        let p = params();
        assert_eq!(alpha_dot(&p, 162.0, 0.0, 0.0, 0.0, 0.0, 5000.0), Ok(0.0));
        // pitch rate enters with unit coefficient
        assert_eq!(alpha_dot(&p, 162.0, 0.0, 1.0, 0.0, 0.0, 5000.0), Ok(1.0));
        // hand-evaluated aero coefficient -0.24881 1/s at alpha = 0.1
        let d = alpha_dot(&p, 162.0, 0.1, 0.0, 0.0, 0.0, 5000.0).unwrap();
        assert_relative_eq!(d, -0.024882, max_relative = 1e-4);
    }

    #[test]
    fn alpha_dot_rejects_bad_mass() {
        let p = params();
        assert!(alpha_dot(&p, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0).is_err());
        assert!(alpha_dot(&p, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn q_dot_nominal_documented_points() {
        let p = params();
        // hand-evaluated moment slope -243.21 1/s^2 at alpha = 0.1
        let a = q_dot_nominal(&p, 1.86, 0.1, 0.0, 0.0, 5000.0).unwrap();
        assert_relative_eq!(a, -24.321, max_relative = 1e-4);
        // nozzle effectiveness 49.733 1/s^2 at 5 kN and mid-body CG
        let b = q_dot_nominal(&p, 1.86, 0.0, 0.01, 0.0, 5000.0).unwrap();
        assert_relative_eq!(b, 0.49733, max_relative = 1e-4);
        assert_eq!(q_dot_nominal(&p, 1.86, 0.0, 0.0, 0.0, 5000.0), Ok(0.0));
    }

    #[test]
    fn q_dot_nominal_rejects_cg_outside_body() {
        let p = params();
        assert!(q_dot_nominal(&p, 0.0, 0.0, 0.0, 0.0, 5000.0).is_err());
        assert!(q_dot_nominal(&p, 3.72, 0.0, 0.0, 0.0, 5000.0).is_err());
        assert!(q_dot_nominal(&p, -1.0, 0.0, 0.0, 0.0, 5000.0).is_err());
    }

    #[test]
    fn q_dot_true_collapses_without_uncertainty() {
        let p = params();
        let pr = constant_profiles(5000.0);
        let zero = UncertaintyRealization::zero();
        let state = PlantState {
            alpha: 0.3,
            q: -1.0,
            theta: 0.2,
            t: 7.0,
        };
        let truth = q_dot_true(&p, &pr, &zero, &state, 0.02, -0.05).unwrap();
        let nominal = q_dot_nominal(&p, 1.86, 0.3, 0.02, -0.05, 5000.0).unwrap();
        assert_relative_eq!(truth, nominal, max_relative = 1e-14);
    }

    #[test]
    fn q_dot_true_feels_cg_shift_after_burnout() {
        let p = params();
        // constant 5 kN thrust so the CG shift is the only live channel
        let pr = FlightProfiles {
            thrust_boost: 5000.0,
            thrust_sustain: 5000.0,
            ..profiles()
        };
        let zero = UncertaintyRealization::zero();
        let state = PlantState {
            alpha: 0.0,
            q: 0.0,
            theta: 0.0,
            t: 3.0,
        };
        let truth = q_dot_true(&p, &pr, &zero, &state, 0.01, 0.0).unwrap();
        let nominal = q_dot_nominal(&p, 1.86, 0.0, 0.01, 0.0, 5000.0).unwrap();
        // full 0.372 m shift at burnout, hand-evaluated torque loss
        assert_relative_eq!(truth - nominal, -0.09947, max_relative = 1e-4);
    }

    #[test]
    fn q_dot_true_equals_nominal_at_launch() {
        let p = params();
        let pr = profiles();
        let zero = UncertaintyRealization::zero();
        let state = PlantState {
            alpha: 0.1,
            q: 0.5,
            theta: 0.0,
            t: 0.0,
        };
        let truth = q_dot_true(&p, &pr, &zero, &state, 0.01, 0.02).unwrap();
        let nominal = q_dot_nominal(&p, 1.86, 0.1, 0.01, 0.02, 30_000.0).unwrap();
        assert_relative_eq!(truth, nominal, max_relative = 1e-14);
    }

    #[test]
    fn zeroed_realization_matches_nominal_for_many_states() {
        let p = params();
        let pr = constant_profiles(12_000.0);
        let zero = UncertaintyRealization::zero();
        let mut x = 0.123_f64;
        for _ in 0..1000 {
            // cheap deterministic scatter over the state space
            x = (x * 9301.0 + 49_297.0) % 233_280.0;
            let alpha = x / 233_280.0 - 0.5;
            let dn = alpha * 0.3;
            let dt = -alpha * 0.7;
            let t = x / 23_328.0;
            let state = PlantState {
                alpha,
                q: 0.0,
                theta: 0.0,
                t,
            };
            let truth = q_dot_true(&p, &pr, &zero, &state, dn, dt).unwrap();
            let nominal = q_dot_nominal(&p, 1.86, alpha, dn, dt, 12_000.0).unwrap();
            assert_relative_eq!(truth, nominal, max_relative = 1e-13);
        }
    }

    #[test]
    fn works_in_single_precision() {
        let pr: FlightProfiles<f32> = FlightProfiles::default();
        assert_abs_diff_eq!(pr.mass_at(162.0, 3.0), 97.2, epsilon = 1e-3);
        let p: MissileParams<f32> = MissileParams::default();
        assert!(alpha_dot(&p, 162.0, 0.0, 1.0, 0.0, 0.0, 5000.0).unwrap() == 1.0);
    }

    proptest! {
        #[test]
        fn mass_and_cg_profiles_never_increase(t1 in 0.0..20.0f64, dt in 0.0..20.0f64) {
            let pr = profiles();
            let t2 = t1 + dt;
            prop_assert!(pr.mass_at(162.0, t2) <= pr.mass_at(162.0, t1) + 1e-12);
            prop_assert!(pr.cg_at(t2) <= pr.cg_at(t1) + 1e-12);
        }

        #[test]
        fn profiles_stay_within_endpoints(t in 0.0..50.0f64) {
            let pr = profiles();
            let m = pr.mass_at(162.0, t);
            prop_assert!((97.2 - 1e-9..=162.0 + 1e-9).contains(&m));
            let cg = pr.cg_at(t);
            prop_assert!((1.488 - 1e-9..=1.86 + 1e-9).contains(&cg));
        }

        #[test]
        fn pitch_accel_is_linear_in_inputs(
            a1 in -0.5..0.5f64, a2 in -0.5..0.5f64,
            n1 in -0.3..0.3f64, n2 in -0.3..0.3f64,
            e1 in -0.5..0.5f64, e2 in -0.5..0.5f64,
        ) {
            let p = params();
            let f = |a: f64, n: f64, e: f64| q_dot_nominal(&p, 1.86, a, n, e, 5000.0).unwrap();
            let sum = f(a1 + a2, n1 + n2, e1 + e2);
            prop_assert!((sum - (f(a1, n1, e1) + f(a2, n2, e2))).abs() < 1e-9);

            let g = |a: f64, n: f64, e: f64| alpha_dot(&p, 162.0, a, 0.0, n, e, 5000.0).unwrap();
            let sum = g(a1 + a2, n1 + n2, e1 + e2);
            prop_assert!((sum - (g(a1, n1, e1) + g(a2, n2, e2))).abs() < 1e-9);
        }
    }
}
