//! 2D transport by directional splitting: rigid rotation and a deformation
//! field reversed halfway.

use std::f64::consts::PI;
use std::sync::Arc;

use sldg_core::field::Mesh1D;
use sldg_core::flow::BackwardMap;
use sldg_core::split2d::{project_2d_with, schedule, Axis, LineFlows, Mesh2D, ShearField2D, SplitKind, SplitPlans};

use super::basis;
use crate::config::Setup;
use crate::driver::{march, Outcome};
use crate::error::{config, Result};

pub const SCHEMES: &[&str] = &["trotter", "strang", "ruth3", "forest4", "yoshida6"];

pub fn split_kind(name: &str) -> Result<SplitKind> {
    Ok(match name {
        "trotter" => SplitKind::Trotter,
        "strang" => SplitKind::Strang,
        "ruth3" => SplitKind::Ruth3,
        "forest4" => SplitKind::Forest4,
        "yoshida6" => SplitKind::Yoshida6,
        other => return config(format!("unknown splitting `{other}`")),
    })
}

fn square(s: &Setup) -> Result<Mesh2D> {
    Ok(Mesh2D::new(
        Mesh1D::periodic(-2.0, 2.0, s.m)?,
        Mesh1D::periodic(-2.0, 2.0, s.m2.unwrap_or(s.m))?,
    ))
}

/// `1 − exp(−20((x − 1)² + y² − r0²))` with `r0 = 1/4`.
pub fn bump(x: f64, y: f64) -> f64 {
    let r0 = 0.25;
    1.0 - (-20.0 * ((x - 1.0).powi(2) + y * y - r0 * r0)).exp()
}

/// Data of `u_t + 2π(−y, x)·∇u = 0` carried back to time 0.
pub fn rotation_exact(t: f64, x: f64, y: f64) -> f64 {
    let (s, c) = (2.0 * PI * t).sin_cos();
    bump(c * x + s * y, -s * x + c * y)
}

pub(crate) fn ex4(s: &Setup) -> Result<Outcome> {
    let sched = schedule(split_kind(&s.scheme)?);
    let mesh = square(s)?;
    let basis = basis(s)?;
    let u0 = project_2d_with(bump, mesh, basis.clone())?;
    let flows = ShearField2D {
        b1: Arc::new(|y| -2.0 * PI * y),
        b2: Arc::new(|x| 2.0 * PI * x),
    };
    let plans = SplitPlans::new(&mesh, &basis, &flows, s.dt(), &sched)?;
    let (u, seconds) = march(u0, s.n, |u, _| plans.apply(u))?;
    Ok(Outcome {
        errors: u.error_vs(rotation_exact, s.t_final),
        seconds,
        field: None,
    })
}

/// Taylor-series flow of `ẋ = c cos(x²/2)`.
pub mod taylor {
    const ORDER: usize = 18;
    const MAX_STEP: f64 = 0.05;

    /// One step of length `h` by the series of order `ORDER`.
    ///
    /// With `w = x²/2`, `s = sin w`, `q = cos w` the coefficients obey
    /// `x_{k+1} = c q_k/(k+1)`, `w_k = ½ Σ x_j x_{k−j}`,
    /// `k s_k = Σ j w_j q_{k−j}` and `k q_k = −Σ j w_j s_{k−j}`.
    pub fn step(c: f64, x0: f64, h: f64) -> f64 {
        let mut x = [0.0; ORDER + 1];
        let mut w = [0.0; ORDER + 1];
        let mut s = [0.0; ORDER + 1];
        let mut q = [0.0; ORDER + 1];
        x[0] = x0;
        w[0] = 0.5 * x0 * x0;
        (s[0], q[0]) = w[0].sin_cos();
        for k in 0..ORDER {
            x[k + 1] = c * q[k] / (k + 1) as f64;
            let m = k + 1;
            w[m] = 0.5 * (0..=m).map(|j| x[j] * x[m - j]).sum::<f64>();
            let (mut ss, mut qq) = (0.0, 0.0);
            for j in 1..=m {
                ss += j as f64 * w[j] * q[m - j];
                qq -= j as f64 * w[j] * s[m - j];
            }
            s[m] = ss / m as f64;
            q[m] = qq / m as f64;
        }
        x.iter().rev().fold(0.0, |acc, &a| acc * h + a)
    }

    /// Position after `time` (either sign).
    pub fn advance(c: f64, x: f64, time: f64) -> f64 {
        if c == 0.0 || time == 0.0 {
            return x;
        }
        let steps = (time.abs() / MAX_STEP).ceil().max(1.0) as usize;
        let h = time / steps as f64;
        (0..steps).fold(x, |y, _| step(c, y, h))
    }
}

/// Lines of `b = g(−cos(x²/2) sin y, cos(y²/2) sin x)`.
#[derive(Debug, Clone, Copy)]
pub struct Deformation {
    pub g: f64,
}

impl Deformation {
    pub fn velocity(&self, x: f64, y: f64) -> (f64, f64) {
        (
            -self.g * (0.5 * x * x).cos() * y.sin(),
            self.g * (0.5 * y * y).cos() * x.sin(),
        )
    }
}

impl LineFlows for Deformation {
    fn line_map(&self, axis: Axis, z: f64, tau: f64) -> sldg_core::Result<BackwardMap> {
        let c = match axis {
            Axis::X => -self.g * z.sin(),
            Axis::Y => self.g * z.sin(),
        };
        Ok(BackwardMap::new(
            Arc::new(move |x| taylor::advance(c, x, -tau)),
            tau,
            c.abs() * tau.abs(),
            true,
        )
        .with_forward(Arc::new(move |x| taylor::advance(c, x, tau))))
    }
}

pub(crate) fn ex5(s: &Setup) -> Result<Outcome> {
    if s.n % 2 == 1 {
        return config("ex5 needs an even N");
    }
    let sched = schedule(split_kind(&s.scheme)?);
    let mesh = square(s)?;
    let basis = basis(s)?;
    let u0 = project_2d_with(bump, mesh, basis.clone())?;
    let dt = s.dt();
    let forth = SplitPlans::new(&mesh, &basis, &Deformation { g: 1.0 }, dt, &sched)?;
    let back = SplitPlans::new(&mesh, &basis, &Deformation { g: -1.0 }, dt, &sched)?;
    let half = s.n / 2;
    let (u, seconds) = march(u0, s.n, |u, step| if step < half { forth.apply(u) } else { back.apply(u) })?;
    Ok(Outcome {
        errors: u.error_vs(|_, x, y| bump(x, y), s.t_final),
        seconds,
        field: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use sldg_core::flow::rk4_advance;

    #[test]
    fn taylor_flow_matches_rk4() {
        for &(c, x, t) in &[(0.8, 1.9, 0.3), (-1.0, -2.3, 0.05), (0.5, 0.1, -0.7), (1.0, 2.6, 0.2)] {
            let oracle = rk4_advance(&|y: f64| c * (0.5 * y * y).cos(), x, t, 20_000);
            let got = taylor::advance(c, x, t);
            assert!((got - oracle).abs() < 1e-13, "{c} {x} {t}: {got} vs {oracle}");
        }
    }

    #[test]
    fn taylor_flow_inverts() {
        for &x in &[-2.1, -0.4, 1.3, 2.0] {
            let y = taylor::advance(0.9, x, 0.125);
            assert!((taylor::advance(0.9, y, -0.125) - x).abs() < 1e-14);
        }
    }

    #[test]
    fn rotation_exact_turns_counterclockwise() {
        // The bump centre (1, 0) sits at (0, 1) after a quarter turn.
        assert!((rotation_exact(0.25, 0.0, 1.0) - bump(1.0, 0.0)).abs() < 1e-14);
        assert!((rotation_exact(1.0, 0.3, -0.7) - bump(0.3, -0.7)).abs() < 1e-14);
    }

    #[test]
    fn deformation_lines_follow_the_field() {
        let d = Deformation { g: 1.0 };
        let (x, y) = (0.7, -1.1);
        let map = d.line_map(Axis::X, y, 1e-6).unwrap();
        let v = (x - map.foot(x)) / 1e-6;
        assert!((v - d.velocity(x, y).0).abs() < 1e-6);
        let map = d.line_map(Axis::Y, x, 1e-6).unwrap();
        let v = (y - map.foot(y)) / 1e-6;
        assert!((v - d.velocity(x, y).1).abs() < 1e-6);
    }
}
