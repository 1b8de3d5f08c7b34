//! Running single experiments and refinement studies.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use sldg_core::field::{DgField1D, Norms};

use crate::config::{ExperimentConfig, Setup};
use crate::error::{config, Result};

/// One line of a convergence table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "M2", skip_serializing_if = "Option::is_none", default)]
    pub m2: Option<usize>,
    #[serde(rename = "N")]
    pub n: usize,
    pub k: usize,
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    /// `log₂` of the previous row's L² error over this one.
    pub order_l2: Option<f64>,
    pub seconds: f64,
    pub cfl: Option<f64>,
    /// Worker threads available while timing; timings with more than one are
    /// not comparable with serial ones.
    pub threads: usize,
}

/// Result of one time integration.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub errors: Norms,
    /// Seconds spent in the time loop.
    pub seconds: f64,
    /// Final field, for 1D experiments.
    pub field: Option<DgField1D>,
}

/// Runs `steps` of `step` from `u0`, timing the loop only.
pub(crate) fn march<U>(u0: U, steps: usize, mut step: impl FnMut(&U, usize) -> sldg_core::Result<U>) -> Result<(U, f64)> {
    let start = Instant::now();
    let mut u = u0;
    for s in 0..steps {
        u = step(&u, s)?;
    }
    Ok((u, start.elapsed().as_secs_f64()))
}

pub fn run_setup(setup: &Setup) -> Result<(ConvergenceRow, Outcome)> {
    let out = (setup.example.run)(setup)?;
    let e = out.errors;
    if !(e.l1.is_finite() && e.l2.is_finite() && e.linf.is_finite()) {
        return Err(crate::HarnessError::Numerical(sldg_core::Error::NonFinite { cell: 0 }));
    }
    let row = ConvergenceRow {
        m: setup.m,
        m2: setup.m2,
        n: setup.n,
        k: setup.k,
        l1: e.l1,
        l2: e.l2,
        linf: e.linf,
        order_l2: None,
        seconds: out.seconds,
        cfl: setup.cfl(),
        threads: rayon::current_num_threads(),
    };
    Ok((row, out))
}

pub fn run(cfg: &ExperimentConfig) -> Result<ConvergenceRow> {
    Ok(run_setup(&cfg.resolve()?)?.0)
}

/// Runs `levels` refinements of `cfg`, doubling M (and M2) and N each time.
pub fn convergence(cfg: &ExperimentConfig, levels: u32) -> Result<Vec<ConvergenceRow>> {
    if levels < 2 {
        return config("convergence needs at least two levels");
    }
    let base = cfg.resolve()?;
    let mut rows = Vec::with_capacity(levels as usize);
    for l in 0..levels {
        rows.push(run_setup(&base.refined(l))?.0);
    }
    fill_orders(&mut rows);
    Ok(rows)
}

/// Sets `order_l2` from the second row onward.
pub fn fill_orders(rows: &mut [ConvergenceRow]) {
    for j in 0..rows.len() {
        rows[j].order_l2 = (j > 0).then(|| (rows[j - 1].l2 / rows[j].l2).log2());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(l2: f64) -> ConvergenceRow {
        ConvergenceRow {
            m: 1,
            m2: None,
            n: 1,
            k: 1,
            l1: l2,
            l2,
            linf: l2,
            order_l2: None,
            seconds: 0.0,
            cfl: None,
            threads: 1,
        }
    }

    #[test]
    fn identical_levels_give_order_zero() {
        let mut rows = vec![row(0.5), row(0.5)];
        fill_orders(&mut rows);
        assert_eq!(rows[0].order_l2, None);
        assert_eq!(rows[1].order_l2, Some(0.0));
    }

    #[test]
    fn halving_gives_order_one() {
        let mut rows = vec![row(1.0), row(0.5), row(0.0625)];
        fill_orders(&mut rows);
        assert_eq!(rows[1].order_l2, Some(1.0));
        assert_eq!(rows[2].order_l2, Some(3.0));
    }

    #[test]
    fn one_level_is_a_config_error() {
        let e = convergence(&ExperimentConfig::new("shift"), 1).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }
}
