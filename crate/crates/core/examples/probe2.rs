//! Scratch probe: inspect the 50 deg rise under noise.

use pitchlab::simulation::{run_with, LoopOptions};
use pitchlab::Scenario64;

fn main() {
    let mut sc = Scenario64::default();
    sc.smc.c = 10.0;
    sc.smc.boundary_layer = 1.2;
    sc.sim.theta_command = 50.0_f64.to_radians();
    sc.sim.duration = 4.0;
    let traj = run_with(&sc, &LoopOptions::salted(77, 3)).unwrap();
    println!("t      theta    meas   alpha      q      dn      dt      s        u");
    for r in traj.records.iter().step_by(10) {
        println!(
            "{:5.2} {:8.2} {:8.2} {:8.2} {:7.1} {:7.2} {:7.2} {:8.3} {:8.1}",
            r.t,
            r.theta_true.to_degrees(),
            r.theta_meas.to_degrees(),
            r.alpha.to_degrees(),
            r.q.to_degrees(),
            r.delta_n.to_degrees(),
            r.delta_t.to_degrees(),
            r.s,
            r.u_raw
        );
    }
}
