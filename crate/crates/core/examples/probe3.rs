//! Scratch probe: (c, boundary layer) grid with noise, several seeds.

use pitchlab::metrics::extract_metrics;
use pitchlab::simulation::{run_with, LoopOptions};
use pitchlab::Scenario64;

fn main() {
    for &c in &[4.0, 5.0, 6.0, 7.0] {
        for &delta in &[0.6, 1.2, 2.0] {
            println!("c={c} delta={delta}");
            for &angle in &[10.0, 35.0, 40.0, 50.0] {
                let mut ok = 0;
                let mut settles = Vec::new();
                let mut tcs = Vec::new();
                let mut os = Vec::new();
                for seed in 0..8u64 {
                    let mut sc = Scenario64::default();
                    sc.smc.c = c;
                    sc.smc.boundary_layer = delta;
                    sc.sim.theta_command = (angle as f64).to_radians();
                    let traj = run_with(&sc, &LoopOptions::salted(77, seed)).unwrap();
                    let m = extract_metrics(&traj, sc.sim.theta_command);
                    let max_err_2s = traj
                        .records
                        .iter()
                        .filter(|r| r.t >= 2.0)
                        .map(|r| (r.theta_true - sc.sim.theta_command).abs())
                        .fold(0.0_f64, f64::max)
                        .to_degrees();
                    if max_err_2s < 5.0 && !traj.diverged {
                        ok += 1;
                    }
                    if let Some(s) = m.settling_time_5pct {
                        settles.push(s);
                    }
                    if let Some(t) = m.time_constant {
                        tcs.push(t);
                    }
                    os.push(100.0 * m.max_overshoot / sc.sim.theta_command);
                }
                let mean = |v: &[f64]| {
                    if v.is_empty() {
                        f64::NAN
                    } else {
                        v.iter().sum::<f64>() / v.len() as f64
                    }
                };
                println!(
                    "  {angle:>3} deg: hold5deg {ok}/8 | tc {}/8 mean {:.3} | settle {}/8 mean {:.2} | os mean {:.1}%",
                    tcs.len(),
                    mean(&tcs),
                    settles.len(),
                    mean(&settles),
                    mean(&os)
                );
            }
        }
    }
}
