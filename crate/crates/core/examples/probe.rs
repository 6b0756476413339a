//! Scratch probe for loop tuning: prints step metrics across boundary-layer
//! widths, angles, and seeds.

use pitchlab::metrics::extract_metrics;
use pitchlab::simulation::{run_with, LoopOptions};
use pitchlab::Scenario64;

fn main() {
    let base = Scenario64::default();
    println!("eta = {:.2}", base.smc.eta);
    for delta in [0.05, 0.3, 0.6, 1.0, 1.5, 2.5] {
        println!("== boundary_layer = {delta}");
        for angle_deg in [10.0, 35.0, 90.0] {
            let mut sc = base.clone();
            sc.smc.boundary_layer = delta;
            sc.sim.theta_command = (angle_deg as f64).to_radians();
            let traj = run_with(&sc, &LoopOptions::default()).unwrap();
            let m = extract_metrics(&traj, sc.sim.theta_command);
            let last = traj.last().unwrap();
            let e_meas_final = (sc.sim.theta_command - last.theta_meas).to_degrees();
            let drift = (last.theta_meas - last.theta_true).to_degrees();
            let max_err_after_2s = traj
                .records
                .iter()
                .filter(|r| r.t >= 2.0)
                .map(|r| (r.theta_true - sc.sim.theta_command).abs())
                .fold(0.0_f64, f64::max)
                .to_degrees();
            println!(
                "  {angle_deg:>4} deg: tc={:?} settle={:?} overshoot={:.2}% emeas_end={:+.3} deg drift={:+.3} deg max_err_2s={:.3} deg maxD={:.1} div={}",
                m.time_constant.map(|v| (v * 1000.0).round() / 1000.0),
                m.settling_time_5pct.map(|v| (v * 1000.0).round() / 1000.0),
                100.0 * m.max_overshoot / sc.sim.theta_command,
                e_meas_final,
                drift,
                max_err_after_2s,
                traj.max_disturbance,
                traj.diverged,
            );
        }
    }
}
