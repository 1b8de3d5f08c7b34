//! 1D transport: variable-speed advection, the direct-scheme contrast and the
//! whole-cell shift check.

use std::f64::consts::PI;
use std::sync::Arc;

use sldg_core::field::{project_with, Mesh1D};
use sldg_core::flow::{constant_map, ode_map, Flow, VelocityBounds};
use sldg_core::transport::{direct_step, TransportPlan};

use super::basis;
use crate::config::Setup;
use crate::driver::{march, Outcome};
use crate::error::Result;

/// Exact flow of `ẋ = c0 (1 + r sin 2πx)`, `0 ≤ r < 1`.
///
/// With `a = √(1 − r²)` the phase `atan((tan πx + r)/a)` moves at the
/// constant rate `π c0 a`.
#[derive(Debug, Clone, Copy)]
pub struct AtanFlow {
    pub c0: f64,
    pub r: f64,
}

impl AtanFlow {
    pub fn velocity(&self, x: f64) -> f64 {
        self.c0 * (1.0 + self.r * (2.0 * PI * x).sin())
    }
}

impl Flow for AtanFlow {
    fn advance(&self, x: f64, t: f64) -> f64 {
        let r = self.r;
        let a = (1.0 - r * r).sqrt();
        let phase = (((PI * x).tan() + r) / a).atan() + PI * self.c0 * a * t;
        let y = (-r + a * phase.tan()).atan() / PI;
        // y is only known modulo 1; pick the copy nearest an Euler guess.
        let guess = x + t * self.velocity(x);
        y + (guess - y).round()
    }
}

pub const EX2_FLOW: AtanFlow = AtanFlow { c0: 1.0, r: 0.8 };

pub(crate) fn ex2(s: &Setup) -> Result<Outcome> {
    let mesh = Mesh1D::periodic(0.0, 1.0, s.m)?;
    let basis = basis(s)?;
    let u0 = project_with(|x| (2.0 * PI * x).sin(), mesh, basis.clone())?;
    let dt = s.dt();
    let flow = EX2_FLOW;
    let map = ode_map(
        Arc::new(move |x| flow.velocity(x)),
        dt,
        VelocityBounds {
            sup: flow.c0 * (1.0 + flow.r),
            lipschitz: 2.0 * PI * flow.c0 * flow.r,
        },
        Some(Arc::new(flow)),
    );
    let plan = TransportPlan::new(&map, &mesh, &basis, None, 0.0)?;
    let (u, seconds) = march(u0, s.n, |u, _| plan.apply(u))?;
    let errors = u.error_vs(|t, x| (2.0 * PI * flow.advance(x, -t)).sin(), s.t_final);
    Ok(Outcome {
        errors,
        seconds,
        field: Some(u),
    })
}

/// Constant advection `b = 1` of `sin 2πx`, either with the SLDG step or with
/// the direct nodal scheme `u'(x_α) = u(x_α − bΔt)`.
pub(crate) fn app_a(s: &Setup) -> Result<Outcome> {
    let mesh = Mesh1D::periodic(0.0, 1.0, s.m)?;
    let basis = basis(s)?;
    let u0 = project_with(|x| (2.0 * PI * x).sin(), mesh, basis.clone())?;
    let map = constant_map(1.0, s.dt());
    let (u, seconds) = if s.scheme == "direct" {
        march(u0, s.n, |u, _| direct_step(u, &map))?
    } else {
        let plan = TransportPlan::new(&map, &mesh, &basis, None, 0.0)?;
        march(u0, s.n, |u, _| plan.apply(u))?
    };
    let errors = u.error_vs(|t, x| (2.0 * PI * (x - t)).sin(), s.t_final);
    Ok(Outcome {
        errors,
        seconds,
        field: Some(u),
    })
}

fn tent(x: f64) -> f64 {
    (x - x.floor() - 0.5).abs()
}

/// `|x − ½|` transported at unit speed. With even M and N = M·T the data
/// lies in V₁ and each step moves it by a whole cell, so the error is
/// round-off only.
pub(crate) fn shift(s: &Setup) -> Result<Outcome> {
    let mesh = Mesh1D::periodic(0.0, 1.0, s.m)?;
    let basis = basis(s)?;
    let u0 = project_with(tent, mesh, basis.clone())?;
    let plan = TransportPlan::new(&constant_map(1.0, s.dt()), &mesh, &basis, None, 0.0)?;
    let (u, seconds) = march(u0, s.n, |u, _| plan.apply(u))?;
    let errors = u.error_vs(|t, x| tent(x - t), s.t_final);
    Ok(Outcome {
        errors,
        seconds,
        field: Some(u),
    })
}
