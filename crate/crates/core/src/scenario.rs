//! Scenario bundle: every configuration section in one place, plus the
//! sectioned key-value file format for it.
//!
//! File conventions: angles and angular rates are written in degrees and
//! converted at this boundary; everything internal is radians. Unknown keys
//! are hard errors. Omitted keys and omitted sections take the built-in
//! defaults. When the switching gain `eta` is omitted it is derived from the
//! uncertainty bounds at launch conditions.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::actuation::ActuatorConfig;
use crate::controller::{eta_bound, SmcConfig, ETA_DESIGN_ALPHA_MAX};
use crate::dynamics::{FlightProfiles, MissileParams, PlantState, UncertaintyBounds};
use crate::scalar::Real;
use crate::sensing::{FilterConfig, GyroConfig};
use crate::simulation::SimConfig;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read scenario file {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("scenario parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid scenario: {field}: {reason}")]
    Invalid { field: String, reason: String },
}

fn invalid(field: &str, reason: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid {
        field: field.to_string(),
        reason: reason.into(),
    }
}

// ---------------------------------------------------------------------------
// Resolved scenario
// ---------------------------------------------------------------------------

/// Fully resolved, validated configuration for one simulation setup.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<T> {
    pub missile: MissileParams<T>,
    pub profiles: FlightProfiles<T>,
    pub uncertainty: UncertaintyBounds<T>,
    pub smc: SmcConfig<T>,
    pub nozzle: ActuatorConfig<T>,
    pub elevator: ActuatorConfig<T>,
    pub gyro: GyroConfig<T>,
    pub filter: FilterConfig<T>,
    pub sim: SimConfig<T>,
}

impl<T: Real> Default for Scenario<T> {
    fn default() -> Self {
        let missile = MissileParams::default();
        let profiles = FlightProfiles::default();
        let uncertainty = UncertaintyBounds::default();
        let nozzle = ActuatorConfig::nozzle_default();
        let smc = SmcConfig::tuned(&missile, &profiles, &uncertainty, nozzle.max_deflection);
        Self {
            missile,
            profiles,
            uncertainty,
            smc,
            nozzle,
            elevator: ActuatorConfig::elevator_default(),
            gyro: GyroConfig::default(),
            filter: FilterConfig::default(),
            sim: SimConfig::default(),
        }
    }
}

impl<T: Real> Scenario<T> {
    /// Parse a scenario from the sectioned key-value text format.
    pub fn from_toml_str(text: &str) -> Result<Self, ScenarioError> {
        let file: ScenarioFile = toml::from_str(text)?;
        file.resolve()
    }

    /// Load and validate a scenario file; an empty file yields the defaults.
    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let sc = Self::from_toml_str(&text)?;
        sc.validate()?;
        Ok(sc)
    }

    /// Serialize the resolved scenario back to the file format (normalized:
    /// every key explicit, boundary units restored to degrees).
    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(&ScenarioFile::from_scenario(self))
            .expect("scenario serialization cannot fail")
    }

    /// New scenario with a different boost thrust. The switching gain is
    /// re-derived from the uncertainty bounds because launch thrust is part
    /// of the launch-time knowledge the gain rule uses.
    pub fn with_thrust_boost(&self, boost: T) -> Self {
        let mut sc = self.clone();
        sc.profiles.thrust_boost = boost;
        sc.smc.eta = eta_bound(
            &sc.missile,
            &sc.profiles,
            &sc.uncertainty,
            T::lit(ETA_DESIGN_ALPHA_MAX),
            sc.nozzle.max_deflection,
        );
        sc
    }

    /// Check every invariant, naming the violated field.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let pos = |field: &str, v: T| {
            if v > T::zero() {
                Ok(())
            } else {
                Err(invalid(field, format!("must be positive (got {})", v.as_f64())))
            }
        };
        let non_neg = |field: &str, v: T| {
            if v >= T::zero() {
                Ok(())
            } else {
                Err(invalid(field, format!("must be non-negative (got {})", v.as_f64())))
            }
        };
        let unit_open = |field: &str, v: T| {
            if v > T::zero() && v < T::one() {
                Ok(())
            } else {
                Err(invalid(field, format!("must lie in (0, 1) (got {})", v.as_f64())))
            }
        };

        let m = &self.missile;
        pos("missile.v_m", m.v_m)?;
        pos("missile.m0", m.m0)?;
        pos("missile.i_yy", m.i_yy)?;
        pos("missile.qbar", m.qbar)?;
        pos("missile.s_ref", m.s_ref)?;
        pos("missile.d", m.d)?;
        pos("missile.l", m.l)?;

        let pr = &self.profiles;
        non_neg("profiles.t_ignition", pr.t_ignition)?;
        pos("profiles.t_burn", pr.t_burn)?;
        unit_open("profiles.mass_fraction_final", pr.mass_fraction_final)?;
        unit_open("profiles.cg_fraction_final", pr.cg_fraction_final)?;
        if pr.cg_initial <= T::zero() || pr.cg_initial >= m.l {
            return Err(invalid(
                "profiles.cg_initial",
                format!(
                    "must lie inside the body, 0 < cg < {} (got {})",
                    m.l.as_f64(),
                    pr.cg_initial.as_f64()
                ),
            ));
        }
        pos("profiles.thrust_boost", pr.thrust_boost)?;
        non_neg("profiles.thrust_sustain", pr.thrust_sustain)?;

        let u = &self.uncertainty;
        non_neg("uncertainty.delta_cm_alpha_max", u.delta_cm_alpha_max)?;
        non_neg("uncertainty.delta_thrust_max", u.delta_thrust_max)?;
        non_neg("uncertainty.delta_cg_max", u.delta_cg_max)?;
        non_neg("uncertainty.delta_nozzle_max", u.delta_nozzle_max)?;
        non_neg("uncertainty.lumped_mass_term_max", u.lumped_mass_term_max)?;

        let k = &self.smc;
        pos("smc.c", k.c)?;
        non_neg("smc.eta", k.eta)?;
        pos("smc.boundary_layer", k.boundary_layer)?;
        for (field, gain) in [("smc.k_tvc", k.k_tvc), ("smc.k_elev", k.k_elev)] {
            if gain < T::zero() || gain > T::one() {
                return Err(invalid(
                    field,
                    format!("must lie in [0, 1] (got {})", gain.as_f64()),
                ));
            }
        }

        for (name, act) in [("nozzle", &self.nozzle), ("elevator", &self.elevator)] {
            pos(&format!("{name}.max_deflection"), act.max_deflection)?;
            pos(&format!("{name}.bandwidth_hz"), act.bandwidth_hz)?;
            pos(&format!("{name}.slew_rate"), act.slew_rate)?;
            if act.damping_ratio <= T::zero() || act.damping_ratio >= T::FRAC_1_SQRT_2() {
                return Err(invalid(
                    &format!("{name}.damping_ratio"),
                    format!(
                        "must lie in (0, 1/sqrt(2)) (got {})",
                        act.damping_ratio.as_f64()
                    ),
                ));
            }
            unit_open(&format!("{name}.compensator_n"), act.compensator_n)?;
            pos(&format!("{name}.natural_frequency"), act.natural_frequency)?;
        }

        non_neg("gyro.arw", self.gyro.arw)?;
        pos("gyro.sample_rate", self.gyro.sample_rate)?;
        pos("filter.cutoff_hz", self.filter.cutoff_hz)?;
        if self.filter.zeta <= T::zero() || self.filter.zeta > T::one() {
            return Err(invalid(
                "filter.zeta",
                format!("must lie in (0, 1] (got {})", self.filter.zeta.as_f64()),
            ));
        }

        let s = &self.sim;
        pos("sim.dt_plant", s.dt_plant)?;
        pos("sim.controller_rate", s.controller_rate)?;
        pos("sim.duration", s.duration)?;
        let steps = (s.dt_plant * s.controller_rate).recip();
        if (steps - steps.round()).abs() > T::lit(1e-6) || steps < T::lit(0.5) {
            return Err(invalid(
                "sim.controller_rate",
                format!(
                    "controller rate must divide the plant rate evenly (got {} plant steps per tick)",
                    steps.as_f64()
                ),
            ));
        }
        let rate_mismatch =
            ((self.gyro.sample_rate - s.controller_rate) / s.controller_rate).abs();
        if rate_mismatch > T::lit(1e-9) {
            return Err(invalid(
                "gyro.sample_rate",
                "must equal sim.controller_rate; the loop samples the gyro every tick",
            ));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// File schema
// ---------------------------------------------------------------------------

macro_rules! take {
    ($section:expr, $field:ident, $default:expr) => {
        match $section.as_ref().and_then(|s| s.$field) {
            Some(v) => T::lit(v),
            None => $default,
        }
    };
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    missile: Option<MissileSection>,
    profiles: Option<ProfilesSection>,
    uncertainty: Option<UncertaintySection>,
    smc: Option<SmcSection>,
    nozzle: Option<ActuatorSection>,
    elevator: Option<ActuatorSection>,
    gyro: Option<GyroSection>,
    filter: Option<FilterSection>,
    sim: Option<SimSection>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MissileSection {
    v_m: Option<f64>,
    m0: Option<f64>,
    i_yy: Option<f64>,
    c_m_alpha0: Option<f64>,
    c_m_delta_t0: Option<f64>,
    c_z_alpha0: Option<f64>,
    c_z_delta_t0: Option<f64>,
    qbar: Option<f64>,
    s_ref: Option<f64>,
    d: Option<f64>,
    l: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfilesSection {
    t_ignition: Option<f64>,
    t_burn: Option<f64>,
    mass_fraction_final: Option<f64>,
    cg_initial: Option<f64>,
    cg_fraction_final: Option<f64>,
    thrust_boost: Option<f64>,
    thrust_sustain: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UncertaintySection {
    delta_cm_alpha_max: Option<f64>,
    delta_thrust_max: Option<f64>,
    delta_cg_max: Option<f64>,
    delta_nozzle_max_deg: Option<f64>,
    lumped_mass_term_max: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SmcSection {
    c: Option<f64>,
    eta: Option<f64>,
    boundary_layer: Option<f64>,
    k_tvc: Option<f64>,
    k_elev: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ActuatorSection {
    max_deflection_deg: Option<f64>,
    bandwidth_hz: Option<f64>,
    slew_rate_deg_s: Option<f64>,
    damping_ratio: Option<f64>,
    compensator_n: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GyroSection {
    arw: Option<f64>,
    sample_rate_hz: Option<f64>,
    seed: Option<u64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FilterSection {
    cutoff_hz: Option<f64>,
    zeta: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimSection {
    dt_plant: Option<f64>,
    controller_rate_hz: Option<f64>,
    duration: Option<f64>,
    theta_command_deg: Option<f64>,
    seed: Option<u64>,
    initial_alpha_deg: Option<f64>,
    initial_q_deg_s: Option<f64>,
    initial_theta_deg: Option<f64>,
}

impl ScenarioFile {
    fn resolve<T: Real>(&self) -> Result<Scenario<T>, ScenarioError> {
        let dm = MissileParams::<T>::default();
        let missile = MissileParams {
            v_m: take!(self.missile, v_m, dm.v_m),
            m0: take!(self.missile, m0, dm.m0),
            i_yy: take!(self.missile, i_yy, dm.i_yy),
            c_m_alpha0: take!(self.missile, c_m_alpha0, dm.c_m_alpha0),
            c_m_delta_t0: take!(self.missile, c_m_delta_t0, dm.c_m_delta_t0),
            c_z_alpha0: take!(self.missile, c_z_alpha0, dm.c_z_alpha0),
            c_z_delta_t0: take!(self.missile, c_z_delta_t0, dm.c_z_delta_t0),
            qbar: take!(self.missile, qbar, dm.qbar),
            s_ref: take!(self.missile, s_ref, dm.s_ref),
            d: take!(self.missile, d, dm.d),
            l: take!(self.missile, l, dm.l),
        };

        let dp = FlightProfiles::<T>::default();
        let profiles = FlightProfiles {
            t_ignition: take!(self.profiles, t_ignition, dp.t_ignition),
            t_burn: take!(self.profiles, t_burn, dp.t_burn),
            mass_fraction_final: take!(self.profiles, mass_fraction_final, dp.mass_fraction_final),
            cg_initial: take!(self.profiles, cg_initial, dp.cg_initial),
            cg_fraction_final: take!(self.profiles, cg_fraction_final, dp.cg_fraction_final),
            thrust_boost: take!(self.profiles, thrust_boost, dp.thrust_boost),
            thrust_sustain: take!(self.profiles, thrust_sustain, dp.thrust_sustain),
        };

        let du = UncertaintyBounds::<T>::default();
        let uncertainty = UncertaintyBounds {
            delta_cm_alpha_max: take!(self.uncertainty, delta_cm_alpha_max, du.delta_cm_alpha_max),
            delta_thrust_max: take!(self.uncertainty, delta_thrust_max, du.delta_thrust_max),
            delta_cg_max: take!(self.uncertainty, delta_cg_max, du.delta_cg_max),
            delta_nozzle_max: match self.uncertainty.as_ref().and_then(|s| s.delta_nozzle_max_deg)
            {
                Some(deg) => T::lit(deg.to_radians()),
                None => du.delta_nozzle_max,
            },
            lumped_mass_term_max: take!(
                self.uncertainty,
                lumped_mass_term_max,
                du.lumped_mass_term_max
            ),
        };

        let build_actuator = |section: &Option<ActuatorSection>,
                              name: &str,
                              default: ActuatorConfig<T>|
         -> Result<ActuatorConfig<T>, ScenarioError> {
            let max_deflection = match section.as_ref().and_then(|s| s.max_deflection_deg) {
                Some(deg) => T::lit(deg.to_radians()),
                None => default.max_deflection,
            };
            let slew_rate = match section.as_ref().and_then(|s| s.slew_rate_deg_s) {
                Some(deg) => T::lit(deg.to_radians()),
                None => default.slew_rate,
            };
            ActuatorConfig::new(
                max_deflection,
                take!(section, bandwidth_hz, default.bandwidth_hz),
                slew_rate,
                take!(section, damping_ratio, default.damping_ratio),
                take!(section, compensator_n, default.compensator_n),
            )
            .map_err(|e| invalid(name, e.to_string()))
        };
        let nozzle = build_actuator(&self.nozzle, "nozzle", ActuatorConfig::nozzle_default())?;
        let elevator =
            build_actuator(&self.elevator, "elevator", ActuatorConfig::elevator_default())?;

        let smc = {
            let derived = SmcConfig::tuned(&missile, &profiles, &uncertainty, nozzle.max_deflection);
            SmcConfig {
                c: take!(self.smc, c, derived.c),
                eta: take!(self.smc, eta, derived.eta),
                boundary_layer: take!(self.smc, boundary_layer, derived.boundary_layer),
                k_tvc: take!(self.smc, k_tvc, derived.k_tvc),
                k_elev: take!(self.smc, k_elev, derived.k_elev),
            }
        };

        let dg = GyroConfig::<T>::default();
        let gyro = GyroConfig {
            arw: take!(self.gyro, arw, dg.arw),
            sample_rate: take!(self.gyro, sample_rate_hz, dg.sample_rate),
            seed: self
                .gyro
                .as_ref()
                .and_then(|s| s.seed)
                .unwrap_or(dg.seed),
        };

        let df = FilterConfig::<T>::default();
        let filter = FilterConfig {
            cutoff_hz: take!(self.filter, cutoff_hz, df.cutoff_hz),
            zeta: take!(self.filter, zeta, df.zeta),
        };

        let ds = SimConfig::<T>::default();
        let deg_field = |v: Option<f64>, default: T| match v {
            Some(deg) => T::lit(deg.to_radians()),
            None => default,
        };
        let sim_section = self.sim.as_ref();
        let sim = SimConfig {
            dt_plant: take!(self.sim, dt_plant, ds.dt_plant),
            controller_rate: take!(self.sim, controller_rate_hz, ds.controller_rate),
            duration: take!(self.sim, duration, ds.duration),
            theta_command: deg_field(
                sim_section.and_then(|s| s.theta_command_deg),
                ds.theta_command,
            ),
            initial_state: PlantState {
                alpha: deg_field(sim_section.and_then(|s| s.initial_alpha_deg), T::zero()),
                q: deg_field(sim_section.and_then(|s| s.initial_q_deg_s), T::zero()),
                theta: deg_field(sim_section.and_then(|s| s.initial_theta_deg), T::zero()),
                t: T::zero(),
            },
            seed: sim_section.and_then(|s| s.seed).unwrap_or(ds.seed),
        };

        Ok(Scenario {
            missile,
            profiles,
            uncertainty,
            smc,
            nozzle,
            elevator,
            gyro,
            filter,
            sim,
        })
    }

    fn from_scenario<T: Real>(sc: &Scenario<T>) -> Self {
        let deg = |v: T| v.as_f64().to_degrees();
        Self {
            missile: Some(MissileSection {
                v_m: Some(sc.missile.v_m.as_f64()),
                m0: Some(sc.missile.m0.as_f64()),
                i_yy: Some(sc.missile.i_yy.as_f64()),
                c_m_alpha0: Some(sc.missile.c_m_alpha0.as_f64()),
                c_m_delta_t0: Some(sc.missile.c_m_delta_t0.as_f64()),
                c_z_alpha0: Some(sc.missile.c_z_alpha0.as_f64()),
                c_z_delta_t0: Some(sc.missile.c_z_delta_t0.as_f64()),
                qbar: Some(sc.missile.qbar.as_f64()),
                s_ref: Some(sc.missile.s_ref.as_f64()),
                d: Some(sc.missile.d.as_f64()),
                l: Some(sc.missile.l.as_f64()),
            }),
            profiles: Some(ProfilesSection {
                t_ignition: Some(sc.profiles.t_ignition.as_f64()),
                t_burn: Some(sc.profiles.t_burn.as_f64()),
                mass_fraction_final: Some(sc.profiles.mass_fraction_final.as_f64()),
                cg_initial: Some(sc.profiles.cg_initial.as_f64()),
                cg_fraction_final: Some(sc.profiles.cg_fraction_final.as_f64()),
                thrust_boost: Some(sc.profiles.thrust_boost.as_f64()),
                thrust_sustain: Some(sc.profiles.thrust_sustain.as_f64()),
            }),
            uncertainty: Some(UncertaintySection {
                delta_cm_alpha_max: Some(sc.uncertainty.delta_cm_alpha_max.as_f64()),
                delta_thrust_max: Some(sc.uncertainty.delta_thrust_max.as_f64()),
                delta_cg_max: Some(sc.uncertainty.delta_cg_max.as_f64()),
                delta_nozzle_max_deg: Some(deg(sc.uncertainty.delta_nozzle_max)),
                lumped_mass_term_max: Some(sc.uncertainty.lumped_mass_term_max.as_f64()),
            }),
            smc: Some(SmcSection {
                c: Some(sc.smc.c.as_f64()),
                eta: Some(sc.smc.eta.as_f64()),
                boundary_layer: Some(sc.smc.boundary_layer.as_f64()),
                k_tvc: Some(sc.smc.k_tvc.as_f64()),
                k_elev: Some(sc.smc.k_elev.as_f64()),
            }),
            nozzle: Some(ActuatorSection {
                max_deflection_deg: Some(deg(sc.nozzle.max_deflection)),
                bandwidth_hz: Some(sc.nozzle.bandwidth_hz.as_f64()),
                slew_rate_deg_s: Some(deg(sc.nozzle.slew_rate)),
                damping_ratio: Some(sc.nozzle.damping_ratio.as_f64()),
                compensator_n: Some(sc.nozzle.compensator_n.as_f64()),
            }),
            elevator: Some(ActuatorSection {
                max_deflection_deg: Some(deg(sc.elevator.max_deflection)),
                bandwidth_hz: Some(sc.elevator.bandwidth_hz.as_f64()),
                slew_rate_deg_s: Some(deg(sc.elevator.slew_rate)),
                damping_ratio: Some(sc.elevator.damping_ratio.as_f64()),
                compensator_n: Some(sc.elevator.compensator_n.as_f64()),
            }),
            gyro: Some(GyroSection {
                arw: Some(sc.gyro.arw.as_f64()),
                sample_rate_hz: Some(sc.gyro.sample_rate.as_f64()),
                seed: Some(sc.gyro.seed),
            }),
            filter: Some(FilterSection {
                cutoff_hz: Some(sc.filter.cutoff_hz.as_f64()),
                zeta: Some(sc.filter.zeta.as_f64()),
            }),
            sim: Some(SimSection {
                dt_plant: Some(sc.sim.dt_plant.as_f64()),
                controller_rate_hz: Some(sc.sim.controller_rate.as_f64()),
                duration: Some(sc.sim.duration.as_f64()),
                theta_command_deg: Some(deg(sc.sim.theta_command)),
                seed: Some(sc.sim.seed),
                initial_alpha_deg: Some(deg(sc.sim.initial_state.alpha)),
                initial_q_deg_s: Some(deg(sc.sim.initial_state.q)),
                initial_theta_deg: Some(deg(sc.sim.initial_state.theta)),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn empty_file_is_the_default_scenario() {
        let sc: Scenario<f64> = Scenario::from_toml_str("").unwrap();
        sc.validate().unwrap();
        assert_eq!(sc.missile.m0, 162.0);
        assert_eq!(sc.smc.k_tvc, 0.32);
        assert_eq!(sc.smc.k_elev, 0.66);
        assert_relative_eq!(sc.nozzle.natural_frequency, 172.895, max_relative = 1e-4);
        assert!(sc.smc.eta > 0.0);
        assert_eq!(sc, Scenario::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = Scenario::<f64>::from_toml_str("[missile]\nmas0 = 162.0\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("mas0"), "message should name the key: {msg}");

        assert!(Scenario::<f64>::from_toml_str("[unknown_section]\nx = 1\n").is_err());
    }

    #[test]
    fn validation_names_the_broken_field() {
        let sc: Scenario<f64> = Scenario::from_toml_str("[missile]\nm0 = -1.0\n").unwrap();
        let err = sc.validate().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("missile.m0"), "got: {msg}");
        assert!(msg.contains("positive"), "got: {msg}");
    }

    #[test]
    fn angles_convert_at_the_boundary() {
        let sc: Scenario<f64> =
            Scenario::from_toml_str("[sim]\ntheta_command_deg = 35.0\n").unwrap();
        assert_relative_eq!(sc.sim.theta_command, 0.6108652, max_relative = 1e-6);
        let sc: Scenario<f64> =
            Scenario::from_toml_str("[nozzle]\nmax_deflection_deg = 20.0\n").unwrap();
        assert_relative_eq!(sc.nozzle.max_deflection, 0.3490659, max_relative = 1e-6);
    }

    #[test]
    fn explicit_eta_overrides_the_derived_gain() {
        let sc: Scenario<f64> = Scenario::from_toml_str("[smc]\neta = 0.0\n").unwrap();
        assert_eq!(sc.smc.eta, 0.0);
        sc.validate().unwrap();
    }

    #[test]
    fn derived_eta_tracks_boost_thrust() {
        let base: Scenario<f64> = Scenario::default();
        let hot = base.with_thrust_boost(45_000.0);
        assert!(hot.smc.eta > base.smc.eta);
        let mild = base.with_thrust_boost(15_000.0);
        assert!(mild.smc.eta < base.smc.eta);
    }

    #[test]
    fn dump_then_load_is_idempotent() {
        let sc: Scenario<f64> = Scenario::default();
        let once = sc.to_toml_string();
        let reloaded: Scenario<f64> = Scenario::from_toml_str(&once).unwrap();
        let twice = reloaded.to_toml_string();
        assert_eq!(once, twice);
        reloaded.validate().unwrap();
    }

    #[test]
    fn mismatched_rates_are_rejected() {
        let sc: Scenario<f64> = Scenario::from_toml_str("[gyro]\nsample_rate_hz = 100.0\n").unwrap();
        assert!(sc.validate().is_err());
        let sc: Scenario<f64> =
            Scenario::from_toml_str("[sim]\ncontroller_rate_hz = 333.0\n").unwrap();
        assert!(sc.validate().is_err());
    }

    #[test]
    fn load_reports_missing_file_with_path() {
        let err = Scenario::<f64>::load(Path::new("/nonexistent/scenario.toml")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/scenario.toml"));
    }
}
