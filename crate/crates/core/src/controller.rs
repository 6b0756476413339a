//! Saturated sliding-mode pitch controller.
//!
//! One scalar control law produces a desired pitch-acceleration correction.
//! The surface and switching terms split across the nozzle and tail through
//! their own control effectiveness, scaled by the tunable channel gains; the
//! model-cancellation term is carried by the nozzle alone, keeping the
//! angle-of-attack dynamics stable under tail force feedback. The switching
//! function is saturated inside a boundary layer, which removes chattering
//! at the cost of a small steady error band.

use thiserror::Error;

use crate::dynamics::{FlightProfiles, MissileParams, UncertaintyBounds};
use crate::scalar::Real;

#[derive(Debug, Error, PartialEq)]
pub enum ControlError {
    #[error("boundary layer must be positive (got {0})")]
    NonPositiveBoundaryLayer(f64),
    #[error("{channel} control effectiveness is zero; the airframe cannot be commanded")]
    ZeroEffectiveness { channel: &'static str },
}

/// Design angle-of-attack magnitude used when sizing the switching gain
/// from the uncertainty bounds.
pub const ETA_DESIGN_ALPHA_MAX: f64 = 0.35;

/// Controller constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmcConfig<T> {
    /// Sliding-surface slope (1/s); sets the error decay rate on the surface.
    pub c: T,
    /// Switching gain (rad/s^2); must dominate the disturbance magnitude.
    pub eta: T,
    /// Boundary-layer half width (surface units).
    pub boundary_layer: T,
    /// Nozzle channel gain in [0, 1].
    pub k_tvc: T,
    /// Tail channel gain in [0, 1].
    pub k_elev: T,
}

impl<T: Real> SmcConfig<T> {
    /// Tuned configuration for a given airframe: tuned channel gains, the
    /// default surface slope and boundary layer, and the switching gain
    /// sized from the uncertainty bounds at launch conditions.
    pub fn tuned(
        p: &MissileParams<T>,
        profiles: &FlightProfiles<T>,
        bounds: &UncertaintyBounds<T>,
        nozzle_max_deflection: T,
    ) -> Self {
        Self {
            c: T::lit(10.0),
            eta: eta_bound(
                p,
                profiles,
                bounds,
                T::lit(ETA_DESIGN_ALPHA_MAX),
                nozzle_max_deflection,
            ),
            boundary_layer: T::lit(0.05),
            k_tvc: T::lit(0.32),
            k_elev: T::lit(0.66),
        }
    }
}

impl<T: Real> Default for SmcConfig<T> {
    fn default() -> Self {
        Self::tuned(
            &MissileParams::default(),
            &FlightProfiles::default(),
            &UncertaintyBounds::default(),
            T::lit(15.0_f64.to_radians()),
        )
    }
}

/// Output of one controller evaluation. Deflection commands are
/// pre-saturation; the actuators enforce their own limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlCommand<T> {
    /// Commanded nozzle deflection (rad).
    pub delta_n_cmd: T,
    /// Commanded tail deflection (rad).
    pub delta_t_cmd: T,
    /// Sliding-surface value, logged for analysis.
    pub s_value: T,
    /// Desired pitch-acceleration correction before allocation (rad/s^2).
    pub u_raw: T,
}

/// Sliding surface `s = e_dot + c * e` with `e = theta_d - theta`.
pub fn sliding_surface<T: Real>(cfg: &SmcConfig<T>, e: T, e_dot: T) -> T {
    e_dot + cfg.c * e
}

/// Saturated switching function: `s / delta` clamped to [-1, 1]. Continuous
/// and odd, with slope `1/delta` inside the boundary layer.
pub fn sat<T: Real>(s: T, delta: T) -> Result<T, ControlError> {
    if delta <= T::zero() {
        return Err(ControlError::NonPositiveBoundaryLayer(delta.as_f64()));
    }
    Ok((s / delta).max(-T::one()).min(T::one()))
}

/// Conservative upper bound on the disturbance magnitude, built by taking
/// every uncertainty channel at its bound simultaneously:
///
/// * moment-slope error at the design angle of attack,
/// * CG-shift torque at the worst thrust and nozzle deflection,
/// * misalignment torque through the longest arm the shift allows,
/// * the lumped mass-effect disturbance.
///
/// A switching gain at or above this value keeps the reaching condition
/// satisfied for every disturbance the bounds admit.
pub fn eta_bound<T: Real>(
    p: &MissileParams<T>,
    profiles: &FlightProfiles<T>,
    bounds: &UncertaintyBounds<T>,
    alpha_max: T,
    delta_n_max: T,
) -> T {
    let moment_coeff = p.qbar * p.s_ref * p.d / p.i_yy;
    let thrust_wc = profiles.thrust_boost + bounds.delta_thrust_max;
    let arm_wc = p.l - profiles.cg_initial + bounds.delta_cg_max;
    moment_coeff * bounds.delta_cm_alpha_max * alpha_max
        + thrust_wc * bounds.delta_cg_max / p.i_yy * delta_n_max
        + thrust_wc * arm_wc / p.i_yy * bounds.delta_nozzle_max
        + bounds.lumped_mass_term_max
}

/// One controller evaluation.
///
/// `f` is the modelled pitch acceleration from the current angle of attack,
/// `g_n` and `g_t` are the launch-time control effectiveness of the nozzle
/// and tail channels, and `theta_dd_d` is the desired-acceleration
/// feedforward (zero for step commands).
///
/// The law is `u_raw = -f + theta_dd_d + c*e_dot + eta*sat(s)`. Its two
/// parts are allocated differently: the surface and switching terms split
/// across both channels through their own effectiveness, scaled by the
/// channel gains, while the model-cancellation part `-f + theta_dd_d` rides
/// the nozzle channel alone. A tail deflection proportional to the angle of
/// attack feeds its force straight back into the angle-of-attack rate
/// faster than the flight path sheds it, so the cancellation must not be
/// carried by the tail.
pub fn smc_command<T: Real>(
    cfg: &SmcConfig<T>,
    f: T,
    g_n: T,
    g_t: T,
    theta_dd_d: T,
    e: T,
    e_dot: T,
) -> Result<ControlCommand<T>, ControlError> {
    if g_n == T::zero() {
        return Err(ControlError::ZeroEffectiveness { channel: "nozzle" });
    }
    if g_t == T::zero() {
        return Err(ControlError::ZeroEffectiveness { channel: "tail" });
    }
    let s = sliding_surface(cfg, e, e_dot);
    let u_model = -f + theta_dd_d;
    let u_switch = cfg.c * e_dot + cfg.eta * sat(s, cfg.boundary_layer)?;
    Ok(ControlCommand {
        delta_n_cmd: (cfg.k_tvc * u_switch + u_model) / g_n,
        delta_t_cmd: cfg.k_elev * u_switch / g_t,
        s_value: s,
        u_raw: u_model + u_switch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::FlightProfiles;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn cfg(c: f64, eta: f64, delta: f64) -> SmcConfig<f64> {
        SmcConfig {
            c,
            eta,
            boundary_layer: delta,
            k_tvc: 0.32,
            k_elev: 0.66,
        }
    }

    #[test]
    fn surface_documented_points() {
        let k = cfg(5.0, 1.0, 0.05);
        assert_eq!(sliding_surface(&k, 0.0, 0.0), 0.0);
        // e_dot = -c * e lies on the surface by construction
        assert_abs_diff_eq!(sliding_surface(&k, 0.1, -0.5), 0.0, epsilon = 1e-15);
        assert_relative_eq!(sliding_surface(&k, 0.2, 0.1), 1.1);
    }

    #[test]
    fn sat_documented_points() {
        assert_eq!(sat(0.0, 0.3).unwrap(), 0.0);
        assert_eq!(sat(0.2, 0.1).unwrap(), 1.0);
        assert_relative_eq!(sat(0.05, 0.1).unwrap(), 0.5);
        assert!(sat(1.0, 0.0).is_err());
        assert!(sat(1.0, -0.1).is_err());
    }

    #[test]
    fn eta_bound_vanishes_without_uncertainty() {
        let p = MissileParams::default();
        let pr = FlightProfiles::default();
        let eta = eta_bound(&p, &pr, &UncertaintyBounds::none(), 0.35, 0.26);
        assert_eq!(eta, 0.0);
    }

    #[test]
    fn eta_bound_cg_term_hand_value() {
        let p = MissileParams::default();
        let pr = FlightProfiles {
            thrust_boost: 5000.0,
            thrust_sustain: 5000.0,
            ..FlightProfiles::default()
        };
        let bounds = UncertaintyBounds {
            delta_cg_max: 0.372,
            ..UncertaintyBounds::none()
        };
        let eta = eta_bound(&p, &pr, &bounds, 0.35, 0.26);
        assert_relative_eq!(eta, 2.586, max_relative = 1e-3);
    }

    #[test]
    fn eta_bound_is_the_sum_of_worst_case_terms() {
        // triangle-inequality decomposition: evaluate each disturbance term
        // separately at its worst case and sum
        let p = MissileParams::<f64>::default();
        let pr = FlightProfiles::default();
        let full = UncertaintyBounds::<f64>::default();
        let alpha_max = 0.35;
        let dn_max = 0.26;

        let thrust_wc = pr.thrust_boost + full.delta_thrust_max;
        let moment_slope = p.qbar * p.s_ref * p.d / p.i_yy * full.delta_cm_alpha_max * alpha_max;
        let cg_shift = thrust_wc * full.delta_cg_max * dn_max / p.i_yy;
        let misalignment =
            thrust_wc * (p.l - pr.cg_initial + full.delta_cg_max) * full.delta_nozzle_max / p.i_yy;
        let lumped = full.lumped_mass_term_max;
        assert_relative_eq!(
            eta_bound(&p, &pr, &full, alpha_max, dn_max),
            moment_slope + cg_shift + misalignment + lumped,
            max_relative = 1e-12
        );

        // the combined bound dominates every isolated channel
        let only = |f: &dyn Fn(&mut UncertaintyBounds<f64>)| {
            let mut b = UncertaintyBounds::none();
            f(&mut b);
            eta_bound(&p, &pr, &b, alpha_max, dn_max)
        };
        let isolated = [
            only(&|b| b.delta_cm_alpha_max = full.delta_cm_alpha_max),
            only(&|b| b.delta_thrust_max = full.delta_thrust_max),
            only(&|b| b.delta_cg_max = full.delta_cg_max),
            only(&|b| b.delta_nozzle_max = full.delta_nozzle_max),
            only(&|b| b.lumped_mass_term_max = full.lumped_mass_term_max),
        ];
        let combined = eta_bound(&p, &pr, &full, alpha_max, dn_max);
        for (i, v) in isolated.iter().enumerate() {
            assert!(combined >= *v, "channel {i} exceeds the combined bound");
        }
    }

    #[test]
    fn command_documented_points() {
        let k = cfg(10.0, 2.0, 0.05);
        // at the target, on the surface: no action
        let c0 = smc_command(&k, 0.0, 49.733, -290.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(c0.u_raw, 0.0);
        assert_eq!(c0.delta_n_cmd, 0.0);
        assert_eq!(c0.delta_t_cmd, 0.0);

        // deep in the saturated region the switching term alone drives the
        // nozzle: eta / g_n with full nozzle allocation
        let k1 = SmcConfig {
            k_tvc: 1.0,
            k_elev: 0.0,
            ..cfg(10.0, 2.0, 0.05)
        };
        let c1 = smc_command(&k1, 0.0, 49.733, -290.0, 0.0, 1.0, 0.0).unwrap();
        assert_relative_eq!(c1.delta_n_cmd, 0.040215, max_relative = 1e-4);

        // the equivalent control cancels the modelled dynamics
        let c2 = smc_command(&k, -24.321, 49.733, -290.0, 0.0, 0.0, 0.0).unwrap();
        assert_relative_eq!(c2.u_raw, 24.321);
    }

    #[test]
    fn command_rejects_dead_channels() {
        let k = cfg(10.0, 2.0, 0.05);
        assert_eq!(
            smc_command(&k, 0.0, 0.0, -290.0, 0.0, 0.1, 0.0),
            Err(ControlError::ZeroEffectiveness { channel: "nozzle" })
        );
        assert_eq!(
            smc_command(&k, 0.0, 49.7, 0.0, 0.0, 0.1, 0.0),
            Err(ControlError::ZeroEffectiveness { channel: "tail" })
        );
    }

    #[test]
    fn positive_error_pitches_toward_target() {
        // theta below the command must produce a positive nozzle deflection
        // (positive pitch moment) for a positive-effectiveness channel
        let k = cfg(10.0, 5.0, 0.05);
        let c = smc_command(&k, 0.0, 49.733, -290.0, 0.0, 0.3, 0.0).unwrap();
        assert!(c.u_raw > 0.0);
        assert!(c.delta_n_cmd > 0.0);
        // tail effectiveness is negative, so its deflection flips sign
        assert!(c.delta_t_cmd < 0.0);
    }

    #[test]
    fn switching_allocation_is_a_pure_product() {
        // halving the channel gain while halving the effectiveness leaves
        // the commanded deflection unchanged on the switching path
        let a = cfg(10.0, 2.0, 0.05);
        let mut b = a;
        b.k_tvc /= 2.0;
        let ca = smc_command(&a, 0.0, 50.0, -290.0, 0.0, 0.2, 0.1).unwrap();
        let cb = smc_command(&b, 0.0, 25.0, -290.0, 0.0, 0.2, 0.1).unwrap();
        assert_relative_eq!(ca.delta_n_cmd, cb.delta_n_cmd, max_relative = 1e-12);
    }

    #[test]
    fn model_cancellation_rides_the_nozzle() {
        let k = cfg(10.0, 2.0, 0.05);
        let c = smc_command(&k, -24.0, 48.0, -290.0, 0.0, 0.0, 0.0).unwrap();
        assert_relative_eq!(c.delta_n_cmd, 0.5);
        assert_eq!(c.delta_t_cmd, 0.0);
    }

    #[test]
    fn default_config_is_tuned() {
        let k: SmcConfig<f64> = SmcConfig::default();
        assert_eq!(k.k_tvc, 0.32);
        assert_eq!(k.k_elev, 0.66);
        assert!(k.eta > 0.0);
        // switching gain sized by the default bounds lands near 112 rad/s^2
        assert_relative_eq!(k.eta, 112.49, max_relative = 1e-2);
    }

    proptest! {
        #[test]
        fn sat_is_odd_bounded_lipschitz(s1 in -5.0..5.0f64, s2 in -5.0..5.0f64, delta in 0.01..1.0f64) {
            let y1 = sat(s1, delta).unwrap();
            let y2 = sat(s2, delta).unwrap();
            prop_assert!(y1.abs() <= 1.0);
            prop_assert!((sat(-s1, delta).unwrap() + y1).abs() < 1e-12);
            prop_assert!((y1 - y2).abs() <= (s1 - s2).abs() / delta + 1e-12);
        }

        #[test]
        fn command_is_continuous_in_error(
            e in -1.0..1.0f64, edot in -5.0..5.0f64, de in -1e-4..1e-4f64,
        ) {
            let k = cfg(10.0, 112.0, 0.05);
            let a = smc_command(&k, 0.0, 298.0, -290.0, 0.0, e, edot).unwrap();
            let b = smc_command(&k, 0.0, 298.0, -290.0, 0.0, e + de, edot).unwrap();
            // Lipschitz bound: c from the surface plus eta/delta through sat
            let lip = k.eta / k.boundary_layer * k.c + k.c;
            prop_assert!((a.u_raw - b.u_raw).abs() <= lip * de.abs() * (1.0 + 1e-9) + 1e-12);
        }

        #[test]
        fn eta_bound_is_monotone_in_each_bound(
            scale in 0.0..1.0f64,
        ) {
            let p = MissileParams::default();
            let pr = FlightProfiles::default();
            let full = UncertaintyBounds::<f64>::default();
            let shrunk = UncertaintyBounds {
                delta_cm_alpha_max: full.delta_cm_alpha_max * scale,
                delta_thrust_max: full.delta_thrust_max * scale,
                delta_cg_max: full.delta_cg_max * scale,
                delta_nozzle_max: full.delta_nozzle_max * scale,
                lumped_mass_term_max: full.lumped_mass_term_max * scale,
            };
            prop_assert!(
                eta_bound(&p, &pr, &shrunk, 0.35, 0.26)
                    <= eta_bound(&p, &pr, &full, 0.35, 0.26) + 1e-12
            );
        }
    }
}
