//! The registered experiments.

use crate::config::Setup;
use crate::driver::Outcome;
use crate::error::Result;
use crate::problems::{advection1d, diffusion1d, diffusion2d, rotation};

/// An experiment with its defaults and time integration.
#[derive(Debug)]
pub struct Example {
    pub id: &'static str,
    pub title: &'static str,
    pub dim: usize,
    /// Length of the first axis, for Δx and CFL.
    pub length: f64,
    /// `‖b‖∞` where the problem has a transport speed.
    pub speed: Option<f64>,
    pub t_final: f64,
    pub schemes: &'static [&'static str],
    pub default_scheme: &'static str,
    pub default_k: usize,
    pub default_m: usize,
    pub even_n: bool,
    pub run: fn(&Setup) -> Result<Outcome>,
}

static REGISTRY: &[Example] = &[
    Example {
        id: "ex2",
        title: "1D advection, b = 1 + 0.8 sin 2πx, exact atan flow",
        dim: 1,
        length: 1.0,
        speed: Some(1.8),
        t_final: 1.3,
        schemes: &["sldg"],
        default_scheme: "sldg",
        default_k: 2,
        default_m: 40,
        even_n: false,
        run: advection1d::ex2,
    },
    Example {
        id: "ex4",
        title: "2D rotation on (-2,2)², splitting",
        dim: 2,
        length: 4.0,
        speed: Some(4.0 * std::f64::consts::PI),
        t_final: 0.9,
        schemes: rotation::SCHEMES,
        default_scheme: "strang",
        default_k: 2,
        default_m: 40,
        even_n: false,
        run: rotation::ex4,
    },
    Example {
        id: "ex5",
        title: "2D deformation reversed at T/2 on (-2,2)², splitting",
        dim: 2,
        length: 4.0,
        speed: Some(1.0),
        t_final: 1.0,
        schemes: rotation::SCHEMES,
        default_scheme: "strang",
        default_k: 2,
        default_m: 40,
        even_n: true,
        run: rotation::ex5,
    },
    Example {
        id: "ex6",
        title: "1D convection-diffusion, σ = 0.1, b = 0.3",
        dim: 1,
        length: 1.0,
        speed: Some(0.3),
        t_final: 0.2,
        schemes: diffusion1d::RK_SCHEMES,
        default_scheme: "rk2",
        default_k: 2,
        default_m: 40,
        even_n: false,
        run: diffusion1d::ex6,
    },
    Example {
        id: "ex7bs",
        title: "Black-Scholes European put in log variable",
        dim: 1,
        length: 4.0,
        speed: Some(0.08),
        t_final: 0.25,
        schemes: diffusion1d::RK_SCHEMES,
        default_scheme: "rk2",
        default_k: 2,
        default_m: 40,
        even_n: false,
        run: diffusion1d::ex7bs,
    },
    Example {
        id: "exsev",
        title: "1D diffusion with σ = sin 2πx, manufactured solution",
        dim: 1,
        length: 1.0,
        speed: None,
        t_final: 0.5,
        schemes: &["sldg1", "sldg2"],
        default_scheme: "sldg2",
        default_k: 2,
        default_m: 40,
        even_n: false,
        run: diffusion1d::exsev,
    },
    Example {
        id: "ex9",
        title: "2D constant diffusion, A = [[5,-2],[-2,1]]",
        dim: 2,
        length: 1.0,
        speed: None,
        t_final: 0.2,
        schemes: &["rk1", "rk2", "rk3"],
        default_scheme: "rk2",
        default_k: 2,
        default_m: 20,
        even_n: false,
        run: diffusion2d::ex9,
    },
    Example {
        id: "ex10",
        title: "2D variable diffusion, manufactured solution",
        dim: 2,
        length: 2.0 * std::f64::consts::PI,
        speed: None,
        t_final: 1.0,
        schemes: &["euler-trotter", "platen-strang"],
        default_scheme: "platen-strang",
        default_k: 2,
        default_m: 20,
        even_n: false,
        run: diffusion2d::ex10,
    },
    Example {
        id: "appA",
        title: "Direct nodal scheme against SLDG, constant advection",
        dim: 1,
        length: 1.0,
        speed: Some(1.0),
        t_final: 1.0,
        schemes: &["direct", "sldg"],
        default_scheme: "direct",
        default_k: 1,
        default_m: 46,
        even_n: false,
        run: advection1d::app_a,
    },
    Example {
        id: "shift",
        title: "Piecewise-linear data shifted by whole cells",
        dim: 1,
        length: 1.0,
        speed: Some(1.0),
        t_final: 1.0,
        schemes: &["sldg"],
        default_scheme: "sldg",
        default_k: 1,
        default_m: 10,
        even_n: false,
        run: advection1d::shift,
    },
];

pub fn registry() -> &'static [Example] {
    REGISTRY
}

pub fn find(id: &str) -> Option<&'static Example> {
    REGISTRY.iter().find(|e| e.id == id)
}
