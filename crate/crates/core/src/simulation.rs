//! Fixed-step closed-loop engine.
//!
//! The true plant integrates at the plant step with a classical 4th-order
//! scheme. At each controller tick the gyro is sampled, filtered, and
//! integrated into the measured pitch; the controller forms its command from
//! the measured path and its launch-time plant model only; the command is
//! lead-compensated and held (zero-order) while the servos and plant advance
//! through the intermediate plant steps. Divergence truncates the run and
//! flags it rather than failing, so sweeps can record gaps.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::actuation::{actuator_step, ActuationError, ActuatorState, LeadCompensator};
use crate::controller::{smc_command, ControlError};
use crate::dynamics::{
    alpha_dot, pitch_disturbance, q_dot_true, DynamicsError, FlightProfiles, MissileParams,
    PlantState, UncertaintyRealization,
};
use crate::metrics::{extract_metrics, StepMetrics};
use crate::scalar::Real;
use crate::scenario::{Scenario, ScenarioError};
use crate::seeds::{derive_seed, ANGLE_DOMAIN};
use crate::sensing::{integrate_rate, Gyro, RateFilter, SensingError};

/// Pitch magnitude beyond which a run is declared divergent and truncated.
pub const DIVERGENCE_THETA_LIMIT: f64 = 10.0;

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Control(#[from] ControlError),
    #[error(transparent)]
    Actuation(#[from] ActuationError),
    #[error(transparent)]
    Sensing(#[from] SensingError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// Loop timing, step command, initial state, and the master seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig<T> {
    /// Plant integration step (s).
    pub dt_plant: T,
    /// Controller and sensor tick rate (Hz); must divide the plant rate.
    pub controller_rate: T,
    /// Simulated horizon (s).
    pub duration: T,
    /// Commanded pitch step (rad).
    pub theta_command: T,
    /// Plant state at launch.
    pub initial_state: PlantState<T>,
    /// Master seed for the uncertainty realization stream.
    pub seed: u64,
}

impl<T: Real> Default for SimConfig<T> {
    fn default() -> Self {
        Self {
            dt_plant: T::lit(1e-3),
            controller_rate: T::lit(200.0),
            duration: T::lit(10.0),
            theta_command: T::lit(35.0_f64.to_radians()),
            initial_state: PlantState::zeroed(),
            seed: 42,
        }
    }
}

/// Per-run switches that are not part of the scenario: the lead compensator
/// can be bypassed (for the lag-contrast study), servos can be replaced by
/// ideal pass-through (for controller-law verification), and a salt keys the
/// run's RNG streams for sweeps and repeated-seed studies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopOptions {
    /// Route commands through the phase-lead stage (normal configuration).
    pub use_compensator: bool,
    /// Replace both servos with instantaneous, unlimited pass-through; also
    /// skips the lead stage since there is no lag to offset.
    pub ideal_actuators: bool,
    /// Two-part salt mixed into the gyro and realization seeds.
    pub salt: (u64, u64),
}

impl Default for LoopOptions {
    fn default() -> Self {
        Self {
            use_compensator: true,
            ideal_actuators: false,
            salt: (0, 0),
        }
    }
}

impl LoopOptions {
    pub fn salted(a: u64, b: u64) -> Self {
        Self {
            salt: (a, b),
            ..Self::default()
        }
    }

    pub fn without_compensator() -> Self {
        Self {
            use_compensator: false,
            ..Self::default()
        }
    }
}

/// The only plant knowledge the controller carries: aero moment slope and
/// channel effectiveness evaluated at launch values. Built once per run and
/// never updated, so profile variation after launch cannot leak in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerModel<T> {
    /// Modelled pitch acceleration per rad of angle of attack (1/s^2).
    pub f_alpha_coeff: T,
    /// Nozzle effectiveness at launch thrust and CG (1/s^2 per rad).
    pub g_nozzle: T,
    /// Tail effectiveness (1/s^2 per rad).
    pub g_elevator: T,
}

impl<T: Real> ControllerModel<T> {
    pub fn from_launch(p: &MissileParams<T>, profiles: &FlightProfiles<T>) -> Self {
        let aero = p.qbar * p.s_ref * p.d / p.i_yy;
        Self {
            f_alpha_coeff: aero * p.c_m_alpha0,
            g_nozzle: profiles.thrust_boost * (p.l - profiles.cg_initial) / p.i_yy,
            g_elevator: aero * p.c_m_delta_t0,
        }
    }
}

// ---------------------------------------------------------------------------
// Trajectory
// ---------------------------------------------------------------------------

/// One controller-tick sample of the closed loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRecord<T> {
    pub t: T,
    pub theta_true: T,
    pub theta_meas: T,
    pub alpha: T,
    pub q: T,
    /// Realized nozzle deflection (rad).
    pub delta_n: T,
    /// Realized tail deflection (rad).
    pub delta_t: T,
    pub s: T,
    pub u_raw: T,
    pub mass: T,
    pub cg: T,
    pub thrust: T,
}

/// Uniformly sampled run log. `diverged` marks a truncated run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub records: Vec<TrajectoryRecord<T>>,
    pub diverged: bool,
    /// Largest disturbance magnitude the plant realized (rad/s^2);
    /// diagnostic for the switching-gain margin.
    pub max_disturbance: T,
}

impl<T: Real> Trajectory<T> {
    /// Latest record at or before `t`.
    pub fn at_or_before(&self, t: T) -> Option<&TrajectoryRecord<T>> {
        self.records.iter().rev().find(|r| r.t <= t)
    }

    pub fn last(&self) -> Option<&TrajectoryRecord<T>> {
        self.records.last()
    }

    /// Fixed-column CSV: header plus one row per tick, nine significant
    /// digits throughout.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(
            w,
            "t,theta_true,theta_meas,alpha,q,delta_n,delta_t,s,u_raw,mass,cg,thrust"
        )?;
        for r in &self.records {
            writeln!(
                w,
                "{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e}",
                r.t,
                r.theta_true,
                r.theta_meas,
                r.alpha,
                r.q,
                r.delta_n,
                r.delta_t,
                r.s,
                r.u_raw,
                r.mass,
                r.cg,
                r.thrust
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("write to Vec cannot fail");
        String::from_utf8(buf).expect("CSV is ASCII")
    }
}

// ---------------------------------------------------------------------------
// Integrator
// ---------------------------------------------------------------------------

/// One classical 4th-order fixed step of `y' = f(t, y)`.
pub fn rk4_step<T: Real, const N: usize>(
    f: &mut impl FnMut(T, &[T; N]) -> [T; N],
    t: T,
    y: &[T; N],
    dt: T,
) -> [T; N] {
    let half = T::lit(0.5);
    let sixth = T::lit(6.0).recip();
    let two = T::lit(2.0);

    let k1 = f(t, y);
    let mut y2 = *y;
    for i in 0..N {
        y2[i] = y[i] + half * dt * k1[i];
    }
    let k2 = f(t + half * dt, &y2);
    let mut y3 = *y;
    for i in 0..N {
        y3[i] = y[i] + half * dt * k2[i];
    }
    let k3 = f(t + half * dt, &y3);
    let mut y4 = *y;
    for i in 0..N {
        y4[i] = y[i] + dt * k3[i];
    }
    let k4 = f(t + dt, &y4);

    let mut out = *y;
    for i in 0..N {
        out[i] = y[i] + dt * sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]);
    }
    out
}

// ---------------------------------------------------------------------------
// Closed loop
// ---------------------------------------------------------------------------

/// Run the configured step response with default loop options.
pub fn run_step_response<T: Real>(scenario: &Scenario<T>) -> Result<Trajectory<T>, SimError> {
    run_with(scenario, &LoopOptions::default())
}

/// Run the closed loop. The controller sees only the measured pitch path,
/// the clean angle-of-attack measurement, and its frozen launch-time model.
pub fn run_with<T: Real>(
    scenario: &Scenario<T>,
    opts: &LoopOptions,
) -> Result<Trajectory<T>, SimError> {
    scenario.validate()?;

    let p = &scenario.missile;
    let profiles = &scenario.profiles;
    let sim = &scenario.sim;
    let smc = &scenario.smc;

    let model = ControllerModel::from_launch(p, profiles);
    let dt_ctrl = sim.controller_rate.recip();
    let substeps = (sim.dt_plant * sim.controller_rate)
        .recip()
        .round()
        .as_f64() as usize;
    let n_ticks = (sim.duration * sim.controller_rate).round().as_f64() as usize;

    let mut gyro = Gyro::with_seed(
        &scenario.gyro,
        derive_seed(scenario.gyro.seed, opts.salt.0, opts.salt.1),
    );
    let mut filter = RateFilter::new(&scenario.filter, dt_ctrl)?;
    let mut realization_rng = ChaCha8Rng::seed_from_u64(derive_seed(
        sim.seed.wrapping_add(0x7265_616C_697A_6564),
        opts.salt.0,
        opts.salt.1,
    ));
    let bounds = &scenario.uncertainty;
    let mut draw = |max: T| T::lit(realization_rng.gen_range(-1.0..=1.0)) * max;
    let mut realization = UncertaintyRealization {
        delta_cm_alpha: draw(bounds.delta_cm_alpha_max),
        delta_nozzle: draw(bounds.delta_nozzle_max),
        lumped_mass_term: T::zero(),
    };

    let mut nozzle_lead = LeadCompensator::for_actuator(&scenario.nozzle, dt_ctrl)?;
    let mut elev_lead = LeadCompensator::for_actuator(&scenario.elevator, dt_ctrl)?;
    let mut nozzle = ActuatorState::at_rest();
    let mut elevator = ActuatorState::at_rest();

    let mut state = sim.initial_state;
    let mut theta_meas = sim.initial_state.theta;
    let divergence_limit = T::lit(DIVERGENCE_THETA_LIMIT);

    let mut records = Vec::with_capacity(n_ticks);
    let mut diverged = false;
    let mut max_disturbance = T::zero();

    'ticks: for tick in 0..n_ticks {
        let t = T::from_usize(tick).expect("tick count fits scalar") * dt_ctrl;
        state.t = t;
        realization.lumped_mass_term = draw(bounds.lumped_mass_term_max);

        // measurement path: sample, filter, integrate
        let q_filtered = filter.step(gyro.sample(state.q));
        theta_meas = integrate_rate(theta_meas, q_filtered, dt_ctrl);
        let e = sim.theta_command - theta_meas;
        let e_dot = -q_filtered;

        // control law with the frozen launch model; angle of attack is
        // measured directly
        let f_model = model.f_alpha_coeff * state.alpha;
        let cmd = smc_command(
            smc,
            f_model,
            model.g_nozzle,
            model.g_elevator,
            T::zero(),
            e,
            e_dot,
        )?;
        let (delta_n_in, delta_t_in) = if opts.use_compensator && !opts.ideal_actuators {
            (
                nozzle_lead.step(cmd.delta_n_cmd),
                elev_lead.step(cmd.delta_t_cmd),
            )
        } else {
            (cmd.delta_n_cmd, cmd.delta_t_cmd)
        };
        if opts.ideal_actuators {
            nozzle.deflection = delta_n_in;
            elevator.deflection = delta_t_in;
        }

        records.push(TrajectoryRecord {
            t,
            theta_true: state.theta,
            theta_meas,
            alpha: state.alpha,
            q: state.q,
            delta_n: nozzle.deflection,
            delta_t: elevator.deflection,
            s: cmd.s_value,
            u_raw: cmd.u_raw,
            mass: profiles.mass_at(p.m0, t),
            cg: profiles.cg_at(t),
            thrust: profiles.thrust_at(t),
        });

        max_disturbance = max_disturbance.max(
            pitch_disturbance(p, profiles, &realization, state.alpha, nozzle.deflection, t)
                .abs(),
        );

        // hold the compensated command and advance servos + plant
        for sub in 0..substeps {
            let t_sub = t + T::from_usize(sub).expect("substep fits scalar") * sim.dt_plant;
            if !opts.ideal_actuators {
                nozzle = actuator_step(&scenario.nozzle, &nozzle, delta_n_in, sim.dt_plant);
                elevator = actuator_step(&scenario.elevator, &elevator, delta_t_in, sim.dt_plant);
            }
            let dn = nozzle.deflection;
            let dt_fin = elevator.deflection;
            let mut deriv = |tau: T, y: &[T; 3]| -> [T; 3] {
                let stage = PlantState {
                    alpha: y[0],
                    q: y[1],
                    theta: y[2],
                    t: tau,
                };
                let m = profiles.mass_at(p.m0, tau);
                let a_dot = alpha_dot(p, m, y[0], y[1], dn, dt_fin, profiles.thrust_at(tau));
                let q_dot = q_dot_true(p, profiles, &realization, &stage, dn, dt_fin);
                match (a_dot, q_dot) {
                    (Ok(a), Ok(q)) => [a, q, y[1]],
                    // validation keeps this unreachable; poison the state so
                    // the divergence guard truncates instead of panicking
                    _ => [T::nan(), T::nan(), T::nan()],
                }
            };
            let y = rk4_step(&mut deriv, t_sub, &[state.alpha, state.q, state.theta], sim.dt_plant);
            state.alpha = y[0];
            state.q = y[1];
            state.theta = y[2];

            let finite = state.alpha.is_finite() && state.q.is_finite() && state.theta.is_finite();
            if !finite || state.theta.abs() > divergence_limit {
                diverged = true;
                break 'ticks;
            }
        }
    }

    Ok(Trajectory {
        records,
        diverged,
        max_disturbance,
    })
}

/// One run per commanded angle with per-angle deterministic seeds; divergent
/// angles are recorded and the sweep continues.
pub fn angle_sweep<T: Real>(
    scenario: &Scenario<T>,
    angles: &[T],
) -> Result<Vec<(T, StepMetrics<T>)>, SimError> {
    angles
        .iter()
        .enumerate()
        .map(|(idx, &angle)| {
            let mut sc = scenario.clone();
            sc.sim.theta_command = angle;
            let traj = run_with(&sc, &LoopOptions::salted(ANGLE_DOMAIN, idx as u64))?;
            Ok((angle, extract_metrics(&traj, angle)))
        })
        .collect()
}
