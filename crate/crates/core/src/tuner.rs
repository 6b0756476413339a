//! Grid-search gain tuning over the two channel gains.
//!
//! Every cell runs one deterministic closed-loop simulation (noise on, seed
//! derived from the cell coordinates), cells that diverge are recorded as
//! gaps, and the optimum is the viable cell with the shortest settling time.
//! Cells are independent, so the sweep parallelizes without changing any
//! result.

use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

use crate::fsio::write_atomic;
use crate::metrics::{extract_metrics, StepMetrics};
use crate::scalar::Real;
use crate::scenario::Scenario;
use crate::seeds::{REPEAT_DOMAIN, SWEEP_DOMAIN};
use crate::simulation::{run_with, LoopOptions, SimError};

/// Time-constant requirement (s) that defines the viable region.
pub const TIME_CONSTANT_GOAL_S: f64 = 0.35;

#[derive(Debug, Error)]
pub enum TunerError {
    #[error("no viable cell: no gain pair met the {TIME_CONSTANT_GOAL_S} s time-constant goal")]
    NoViableCell,
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("worker pool: {0}")]
    Pool(String),
}

// ---------------------------------------------------------------------------
// Grid
// ---------------------------------------------------------------------------

/// Gain grid: both channel gains sweep the same axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepGrid<T> {
    pub gain_min: T,
    pub gain_max: T,
    pub step: T,
    /// Commanded pitch step used for every cell (rad).
    pub step_command: T,
}

impl<T: Real> Default for SweepGrid<T> {
    fn default() -> Self {
        Self {
            gain_min: T::zero(),
            gain_max: T::one(),
            step: T::lit(0.02),
            step_command: T::lit(35.0_f64.to_radians()),
        }
    }
}

impl<T: Real> SweepGrid<T> {
    /// Coarse 11 x 11 grid for quick runs.
    pub fn coarse() -> Self {
        Self {
            step: T::lit(0.1),
            ..Self::default()
        }
    }

    pub fn with_step(step: T) -> Self {
        Self {
            step,
            ..Self::default()
        }
    }

    /// Gain values along one axis, inclusive of both ends.
    pub fn axis(&self) -> Vec<T> {
        let span = (self.gain_max - self.gain_min) / self.step;
        let n = span.round().as_f64() as usize + 1;
        (0..n)
            .map(|i| self.gain_min + T::from_usize(i).expect("axis index fits scalar") * self.step)
            .collect()
    }

    pub fn cell_count(&self) -> usize {
        let n = self.axis().len();
        n * n
    }
}

/// One simulated gain pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepCell<T> {
    pub k_tvc: T,
    pub k_elev: T,
    pub metrics: StepMetrics<T>,
    /// Meets the time-constant goal without diverging.
    pub viable: bool,
    /// Run diverged (or could not be evaluated); plotted as a gap.
    pub failed: bool,
}

/// Completed sweep, row-major over (tvc index, elevator index).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult<T> {
    pub axis: Vec<T>,
    pub cells: Vec<SweepCell<T>>,
}

impl<T: Real> SweepResult<T> {
    pub fn cell(&self, i_tvc: usize, j_elev: usize) -> &SweepCell<T> {
        &self.cells[i_tvc * self.axis.len() + j_elev]
    }

    pub fn viable_cells(&self) -> impl Iterator<Item = &SweepCell<T>> {
        self.cells.iter().filter(|c| c.viable)
    }
}

// ---------------------------------------------------------------------------
// Sweep execution
// ---------------------------------------------------------------------------

/// Salt for one cell; exposed so a standalone rerun of a cell reproduces its
/// sweep value exactly.
pub fn cell_salt(i_tvc: usize, j_elev: usize) -> (u64, u64) {
    (SWEEP_DOMAIN ^ i_tvc as u64, j_elev as u64)
}

/// Simulate one cell of the grid against the base scenario.
pub fn run_cell<T: Real>(
    grid: &SweepGrid<T>,
    base: &Scenario<T>,
    i_tvc: usize,
    j_elev: usize,
    seeds_per_cell: u64,
) -> SweepCell<T> {
    let axis = grid.axis();
    let k_tvc = axis[i_tvc];
    let k_elev = axis[j_elev];
    let mut sc = base.clone();
    sc.smc.k_tvc = k_tvc;
    sc.smc.k_elev = k_elev;
    sc.sim.theta_command = grid.step_command;

    let (salt_a, salt_b) = cell_salt(i_tvc, j_elev);
    let mut runs = Vec::with_capacity(seeds_per_cell as usize);
    for rep in 0..seeds_per_cell {
        let opts = LoopOptions::salted(salt_a, salt_b ^ (REPEAT_DOMAIN * rep));
        match run_with(&sc, &opts) {
            Ok(traj) => runs.push(extract_metrics(&traj, grid.step_command)),
            Err(_) => {
                return SweepCell {
                    k_tvc,
                    k_elev,
                    metrics: StepMetrics::undefined(true),
                    viable: false,
                    failed: true,
                }
            }
        }
    }
    let metrics = mean_metrics(&runs);
    let failed = metrics.diverged;
    let viable = !failed
        && metrics
            .time_constant
            .map_or(false, |tc| tc <= T::lit(TIME_CONSTANT_GOAL_S))
        && metrics.settling_time_5pct.is_some();
    SweepCell {
        k_tvc,
        k_elev,
        metrics,
        viable,
        failed,
    }
}

/// Average metrics across repeated seeds. A single run passes through
/// unchanged; any divergent or threshold-missing run poisons the mean, and
/// the cell reads as failed or unviable accordingly.
fn mean_metrics<T: Real>(runs: &[StepMetrics<T>]) -> StepMetrics<T> {
    if runs.len() == 1 {
        return runs[0];
    }
    let n = T::from_usize(runs.len()).expect("run count fits scalar");
    let mean_opt = |get: &dyn Fn(&StepMetrics<T>) -> Option<T>| {
        runs.iter()
            .map(get)
            .try_fold(T::zero(), |acc, v| v.map(|v| acc + v))
            .map(|total| total / n)
    };
    StepMetrics {
        time_constant: mean_opt(&|m| m.time_constant),
        settling_time_5pct: mean_opt(&|m| m.settling_time_5pct),
        max_overshoot: runs.iter().map(|m| m.max_overshoot).sum::<T>() / n,
        rise_time: mean_opt(&|m| m.rise_time),
        diverged: runs.iter().any(|m| m.diverged),
    }
}

/// Run the full grid. `workers` limits the worker pool; any worker count
/// produces identical results. `seeds_per_cell` > 1 averages each cell over
/// that many seeded runs.
pub fn run_sweep<T: Real>(
    grid: &SweepGrid<T>,
    base: &Scenario<T>,
    workers: Option<usize>,
    seeds_per_cell: u64,
) -> Result<SweepResult<T>, TunerError> {
    base.validate().map_err(SimError::from)?;
    let axis = grid.axis();
    let n = axis.len();
    let reps = seeds_per_cell.max(1);

    let compute = || {
        (0..n * n)
            .into_par_iter()
            .map(|idx| run_cell(grid, base, idx / n, idx % n, reps))
            .collect::<Vec<_>>()
    };
    let cells = match workers {
        Some(count) => rayon::ThreadPoolBuilder::new()
            .num_threads(count)
            .build()
            .map_err(|e| TunerError::Pool(e.to_string()))?
            .install(compute),
        None => compute(),
    };
    Ok(SweepResult { axis, cells })
}

// ---------------------------------------------------------------------------
// Optimum selection
// ---------------------------------------------------------------------------

/// Pick the best viable cell: shortest settling time, ties broken by smaller
/// overshoot, then smaller nozzle gain, then smaller elevator gain. The
/// ordering is total, so the choice is independent of cell order.
pub fn select_optimum<T: Real>(cells: &[SweepCell<T>]) -> Result<&SweepCell<T>, TunerError> {
    cells
        .iter()
        .filter(|c| c.viable)
        .min_by(|a, b| {
            let key = |c: &SweepCell<T>| {
                (
                    c.metrics
                        .settling_time_5pct
                        .expect("viable cells have settling times"),
                    c.metrics.max_overshoot,
                    c.k_tvc,
                    c.k_elev,
                )
            };
            let (sa, oa, ka, ea) = key(a);
            let (sb, ob, kb, eb) = key(b);
            sa.partial_cmp(&sb)
                .expect("settling times are finite")
                .then(oa.partial_cmp(&ob).expect("overshoots are finite"))
                .then(ka.partial_cmp(&kb).expect("gains are finite"))
                .then(ea.partial_cmp(&eb).expect("gains are finite"))
        })
        .ok_or(TunerError::NoViableCell)
}

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

fn surface_csv<T: Real>(
    result: &SweepResult<T>,
    value: impl Fn(&SweepCell<T>) -> Option<T>,
) -> String {
    let mut out = String::new();
    out.push_str("k_tvc");
    for k in &result.axis {
        out.push_str(&format!(",{:.8e}", k));
    }
    out.push('\n');
    for (i, k_tvc) in result.axis.iter().enumerate() {
        out.push_str(&format!("{:.8e}", k_tvc));
        for j in 0..result.axis.len() {
            let cell = result.cell(i, j);
            match value(cell) {
                // failed and threshold-missing cells stay empty: a gap, not a zero
                Some(v) if !cell.failed => out.push_str(&format!(",{:.8e}", v)),
                _ => out.push(','),
            }
        }
        out.push('\n');
    }
    out
}

/// Write the three metric surfaces (time constant s, settling time s,
/// overshoot deg) as CSV matrices with the gain axes as first row and
/// column.
pub fn export_surfaces<T: Real>(result: &SweepResult<T>, dir: &Path) -> Result<(), TunerError> {
    let rad_to_deg = T::lit(180.0) / T::PI();
    let files = [
        (
            "time_constant.csv",
            surface_csv(result, |c| c.metrics.time_constant),
        ),
        (
            "settling_time.csv",
            surface_csv(result, |c| c.metrics.settling_time_5pct),
        ),
        (
            "max_overshoot_deg.csv",
            surface_csv(result, |c| Some(c.metrics.max_overshoot * rad_to_deg)),
        ),
    ];
    for (name, contents) in files {
        let path = dir.join(name);
        write_atomic(&path, &contents).map_err(|source| TunerError::Io {
            path: path.display().to_string(),
            source,
        })?;
    }
    Ok(())
}

/// Plain-text summary of the selected optimum.
pub fn optimum_summary<T: Real>(result: &SweepResult<T>) -> Result<String, TunerError> {
    let best = select_optimum(&result.cells)?;
    let deg = T::lit(180.0) / T::PI();
    let fmt_opt = |v: Option<T>| match v {
        Some(v) => format!("{:.4}", v.as_f64()),
        None => "undefined".to_string(),
    };
    Ok(format!(
        "tvc gain: {:.4}\nelevator gain: {:.4}\ntime constant (s): {}\nsettling time (s): {}\nmax overshoot (deg): {:.4}\nviable cells: {} of {}\n",
        best.k_tvc.as_f64(),
        best.k_elev.as_f64(),
        fmt_opt(best.metrics.time_constant),
        fmt_opt(best.metrics.settling_time_5pct),
        (best.metrics.max_overshoot * deg).as_f64(),
        result.viable_cells().count(),
        result.cells.len(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(settle: f64, overshoot: f64, k_tvc: f64, k_elev: f64) -> SweepCell<f64> {
        SweepCell {
            k_tvc,
            k_elev,
            metrics: StepMetrics {
                time_constant: Some(0.2),
                settling_time_5pct: Some(settle),
                max_overshoot: overshoot,
                rise_time: Some(0.2),
                diverged: false,
            },
            viable: true,
            failed: false,
        }
    }

    #[test]
    fn default_grid_has_full_resolution() {
        let grid: SweepGrid<f64> = SweepGrid::default();
        assert_eq!(grid.axis().len(), 51);
        assert_eq!(grid.cell_count(), 2601);
        assert_eq!(grid.axis()[0], 0.0);
        assert!((grid.axis()[50] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coarse_grid_is_eleven_by_eleven() {
        let grid: SweepGrid<f64> = SweepGrid::coarse();
        assert_eq!(grid.cell_count(), 121);
    }

    #[test]
    fn degenerate_grid_is_single_cell() {
        let grid = SweepGrid::<f64> {
            gain_min: 0.32,
            gain_max: 0.32,
            step: 0.02,
            step_command: 0.1,
        };
        assert_eq!(grid.cell_count(), 1);
    }

    #[test]
    fn optimum_prefers_shortest_settling() {
        let cells = vec![cell(0.6, 0.01, 0.4, 0.6), cell(0.5, 0.09, 0.5, 0.5)];
        let best = select_optimum(&cells).unwrap();
        assert_eq!(best.k_tvc, 0.5);
    }

    #[test]
    fn optimum_breaks_ties_by_overshoot_then_gain() {
        let cells = vec![
            cell(0.5, 0.05, 0.6, 0.2),
            cell(0.5, 0.01, 0.7, 0.2),
            cell(0.5, 0.01, 0.3, 0.2),
        ];
        let best = select_optimum(&cells).unwrap();
        assert_eq!((best.k_tvc, best.metrics.max_overshoot), (0.3, 0.01));
    }

    #[test]
    fn single_viable_cell_wins() {
        let mut cells = vec![cell(0.5, 0.01, 0.2, 0.2), cell(0.4, 0.0, 0.9, 0.9)];
        cells[1].viable = false;
        assert_eq!(select_optimum(&cells).unwrap().k_tvc, 0.2);
    }

    #[test]
    fn no_viable_cell_is_an_error() {
        let mut cells = vec![cell(0.5, 0.01, 0.2, 0.2)];
        cells[0].viable = false;
        assert!(matches!(
            select_optimum(&cells),
            Err(TunerError::NoViableCell)
        ));
    }

    #[test]
    fn optimum_is_permutation_invariant() {
        let mut cells = vec![
            cell(0.7, 0.02, 0.1, 0.9),
            cell(0.5, 0.01, 0.3, 0.2),
            cell(0.5, 0.01, 0.7, 0.1),
            cell(0.9, 0.00, 0.2, 0.2),
        ];
        let a = *select_optimum(&cells).unwrap();
        cells.reverse();
        let b = *select_optimum(&cells).unwrap();
        assert_eq!(a, b);
        cells.swap(0, 2);
        let c = *select_optimum(&cells).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn surfaces_have_axis_labels_and_gaps() {
        let grid = SweepGrid::<f64> {
            gain_min: 0.0,
            gain_max: 0.02,
            step: 0.02,
            step_command: 0.1,
        };
        let mut cells: Vec<SweepCell<f64>> = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                let mut c = cell(0.5, 0.01, grid.axis()[i], grid.axis()[j]);
                if i == 1 && j == 0 {
                    c.failed = true;
                    c.viable = false;
                    c.metrics = StepMetrics::undefined(true);
                }
                cells.push(c);
            }
        }
        let result = SweepResult {
            axis: grid.axis(),
            cells,
        };
        let csv = surface_csv(&result, |c| c.metrics.settling_time_5pct);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("k_tvc,"));
        assert_eq!(lines[0].split(',').count(), 3);
        // failed cell is an empty field, not a zero
        let row = lines[2].split(',').collect::<Vec<_>>();
        assert_eq!(row[1], "");
        assert_ne!(row[2], "");
    }
}
