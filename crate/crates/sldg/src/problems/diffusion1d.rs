//! 1D convection-diffusion: constant coefficients, Black-Scholes and a
//! variable-σ manufactured solution.

use std::f64::consts::PI;
use std::sync::Arc;

use sldg_core::diffusion::{branches, discount, sldg_const, source_correct, CoeffSet1D, Projection, SourceSpec};
use sldg_core::field::{project_with, Boundary, BoundaryExtension, Mesh1D};
use sldg_core::flow::{constant_map, Window};
use sldg_core::transport::{advect_step, TransportPlan};

use super::basis;
use crate::config::Setup;
use crate::driver::{march, Outcome};
use crate::error::{config, Result};

/// `rkP` uses the example's default projection; the suffixed names force one.
pub const RK_SCHEMES: &[&str] = &[
    "rk1",
    "rk2",
    "rk3",
    "rk1-composed",
    "rk2-composed",
    "rk3-composed",
    "rk1-single",
    "rk2-single",
    "rk3-single",
];

fn rk_scheme(name: &str, default: Projection) -> Result<(usize, Projection)> {
    let (head, proj) = match name.split_once('-') {
        None => (name, default),
        Some((h, "composed")) => (h, Projection::Composed),
        Some((h, "single")) => (h, Projection::Single),
        _ => return config(format!("unknown scheme `{name}`")),
    };
    match head {
        "rk1" => Ok((1, proj)),
        "rk2" => Ok((2, proj)),
        "rk3" => Ok((3, proj)),
        _ => config(format!("unknown scheme `{name}`")),
    }
}

pub const EX6_SIGMA: f64 = 0.1;
pub const EX6_B: f64 = 0.3;

/// Heat-kernel decay of `cos 2πx + ½ cos 4πx` transported at speed b.
pub fn ex6_exact(t: f64, x: f64) -> f64 {
    [(1.0, 1.0), (2.0, 0.5)]
        .iter()
        .map(|&(k, c): &(f64, f64)| {
            c * (-2.0 * EX6_SIGMA * EX6_SIGMA * k * k * PI * PI * t).exp() * (2.0 * k * PI * (x - EX6_B * t)).cos()
        })
        .sum()
}

/// `u ← S^σ T^b u` with the SLDG-p average for `S^σ`.
pub(crate) fn ex6(s: &Setup) -> Result<Outcome> {
    let (p, proj) = rk_scheme(&s.scheme, Projection::Composed)?;
    let mesh = Mesh1D::periodic(0.0, 1.0, s.m)?;
    let basis = basis(s)?;
    let u0 = project_with(|x| ex6_exact(0.0, x), mesh, basis.clone())?;
    let dt = s.dt();
    let transport = TransportPlan::new(&constant_map(EX6_B, dt), &mesh, &basis, None, 0.0)?;
    let (u, seconds) = march(u0, s.n, |u, _| {
        let v = transport.apply(u)?;
        sldg_const(&v, EX6_SIGMA, dt, p, proj, None, 0.0)
    })?;
    let errors = u.error_vs(ex6_exact, s.t_final);
    Ok(Outcome {
        errors,
        seconds,
        field: Some(u),
    })
}

/// European put parameters in the log variable `x = ln(S/K)`.
#[derive(Debug, Clone, Copy)]
pub struct PutParams {
    pub strike: f64,
    pub rate: f64,
    pub vol: f64,
}

pub const EX7_PUT: PutParams = PutParams {
    strike: 100.0,
    rate: 0.10,
    vol: 0.2,
};

impl PutParams {
    /// Drift of `u_t − ½σ²u_xx + b u_x + r u = 0`.
    pub fn drift(&self) -> f64 {
        -(self.rate - 0.5 * self.vol * self.vol)
    }

    pub fn payoff(&self, x: f64) -> f64 {
        self.strike * (1.0 - x.exp()).max(0.0)
    }

    /// Closed-form put value with time `tau` to maturity at `S = K e^x`.
    pub fn price(&self, tau: f64, x: f64) -> f64 {
        if tau <= 0.0 {
            return self.payoff(x);
        }
        let sd = self.vol * tau.sqrt();
        let d1 = (x + (self.rate + 0.5 * self.vol * self.vol) * tau) / sd;
        let d2 = d1 - sd;
        let n_minus = |d: f64| 0.5 * libm::erfc(d / std::f64::consts::SQRT_2);
        self.strike * (-self.rate * tau).exp() * n_minus(d2) - self.strike * x.exp() * n_minus(d1)
    }

    /// Far-field values: the discounted forward on the left, zero on the right.
    pub fn extension(&self) -> BoundaryExtension {
        let PutParams { strike, rate, .. } = *self;
        BoundaryExtension::new(
            Arc::new(move |t, x| strike * (-rate * t).exp() - strike * x.exp()),
            Arc::new(|_, _| 0.0),
        )
    }
}

/// `u ← e^{−rΔt} S^σ T^b u` on (−2, 2) with far-field values outside.
pub(crate) fn ex7bs(s: &Setup) -> Result<Outcome> {
    let (p, proj) = rk_scheme(&s.scheme, Projection::Single)?;
    let put = EX7_PUT;
    let mesh = Mesh1D::new(-2.0, 2.0, s.m, Boundary::Extended)?;
    let basis = basis(s)?;
    let u0 = project_with(|x| put.payoff(x), mesh, basis.clone())?;
    let dt = s.dt();
    let b = put.drift();
    let ext = put.extension();
    let moved = ext.shifted(-b * dt);
    let map = constant_map(b, dt);
    let (u, seconds) = march(u0, s.n, |u, step| {
        let t_n = step as f64 * dt;
        let v = advect_step(u, &map, Some(&ext), t_n)?;
        let w = sldg_const(&v, put.vol, dt, p, proj, Some(&moved), t_n)?;
        Ok(discount(&w, put.rate, dt))
    })?;
    let errors = u.error_vs(|t, x| put.price(t, x), s.t_final);
    Ok(Outcome {
        errors,
        seconds,
        field: Some(u),
    })
}

/// Manufactured solution `sin(2πt) cos(2π(x − t))` of
/// `u_t − ½ sin²(2πx) u_xx = f`.
pub mod sev {
    use std::f64::consts::PI;

    fn parts(t: f64, x: f64) -> (f64, f64, f64, f64, f64) {
        let (tau, phi) = (2.0 * PI * t, 2.0 * PI * (x - t));
        let s = (2.0 * PI * x).sin();
        (tau.sin(), tau.cos(), phi.sin(), phi.cos(), s * s)
    }

    pub fn exact(t: f64, x: f64) -> f64 {
        (2.0 * PI * t).sin() * (2.0 * PI * (x - t)).cos()
    }

    pub fn f(t: f64, x: f64) -> f64 {
        let (st, ct, sp, cp, s2) = parts(t, x);
        2.0 * PI * (ct * cp + st * sp) + 2.0 * PI * PI * s2 * st * cp
    }

    pub fn f_t(t: f64, x: f64) -> f64 {
        let (st, ct, sp, cp, s2) = parts(t, x);
        8.0 * PI * PI * (ct * sp - st * cp) + 4.0 * PI.powi(3) * s2 * (ct * cp + st * sp)
    }

    pub fn f_x(t: f64, x: f64) -> f64 {
        let (st, ct, sp, cp, s2) = parts(t, x);
        let s4 = (4.0 * PI * x).sin();
        4.0 * PI * PI * (st * cp - ct * sp) + 4.0 * PI.powi(3) * st * (s4 * cp - s2 * sp)
    }

    pub fn f_xx(t: f64, x: f64) -> f64 {
        let (st, ct, sp, cp, s2) = parts(t, x);
        let (s4, c4) = ((4.0 * PI * x).sin(), (4.0 * PI * x).cos());
        -8.0 * PI.powi(3) * (st * sp + ct * cp) + 16.0 * PI.powi(4) * st * (c4 * cp - s4 * sp)
            - 8.0 * PI.powi(4) * s2 * st * cp
    }
}

/// Weak Euler (`sldg1`) or Platen (`sldg2`) branches with the matching source
/// correction.
pub(crate) fn exsev(s: &Setup) -> Result<Outcome> {
    let order = match s.scheme.as_str() {
        "sldg1" => 1,
        "sldg2" => 2,
        other => return config(format!("unknown scheme `{other}`")),
    };
    let mesh = Mesh1D::periodic(0.0, 1.0, s.m)?;
    let basis = basis(s)?;
    let u0 = project_with(|x| sev::exact(0.0, x), mesh, basis.clone())?;
    let dt = s.dt();
    let coeffs = CoeffSet1D::new(Arc::new(|_| 0.0), Arc::new(|x| (2.0 * PI * x).sin()), 0.0);
    let family = branches(&coeffs, dt, order, Window::new(0.0, 1.0))?;
    let plans = family
        .iter()
        .map(|br| Ok((br.weight, TransportPlan::new(&br.map, &mesh, &basis, None, 0.0)?)))
        .collect::<Result<Vec<_>>>()?;
    let src = SourceSpec::second_order(Arc::new(sev::f), Arc::new(sev::f_t), Arc::new(sev::f_x), Arc::new(sev::f_xx));
    let (u, seconds) = march(u0, s.n, |u, step| {
        let mut acc = plans[0].1.apply(u)?.scale(plans[0].0);
        for (w, plan) in &plans[1..] {
            acc.axpy(*w, &plan.apply(u)?)?;
        }
        source_correct(&acc, &src, &coeffs, step as f64 * dt, dt, order)
    })?;
    let errors = u.error_vs(sev::exact, s.t_final);
    Ok(Outcome {
        errors,
        seconds,
        field: Some(u),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(f: impl Fn(f64) -> f64, x: f64) -> f64 {
        let h = 1e-5;
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    #[test]
    fn sev_source_matches_finite_differences() {
        for &(t, x) in &[(0.3, 0.17), (0.77, 0.61), (0.05, 0.93)] {
            let u_t = d(|t| sev::exact(t, x), t);
            let u_xx = d(|x| d(|y| sev::exact(t, y), x), x);
            let s2 = (2.0 * PI * x).sin().powi(2);
            assert!((sev::f(t, x) - (u_t - 0.5 * s2 * u_xx)).abs() < 1e-4);
            assert!((sev::f_t(t, x) - d(|t| sev::f(t, x), t)).abs() < 1e-5 * 1e3);
            assert!((sev::f_x(t, x) - d(|x| sev::f(t, x), x)).abs() < 1e-5 * 1e3);
            assert!((sev::f_xx(t, x) - d(|x| sev::f_x(t, x), x)).abs() < 1e-5 * 1e4);
        }
    }

    #[test]
    fn put_price_matches_its_pde() {
        let put = EX7_PUT;
        let b = put.drift();
        for &(tau, x) in &[(0.1, -0.2), (0.25, 0.05), (0.2, 0.4)] {
            let u_t = d(|t| put.price(t, x), tau);
            let u_x = d(|y| put.price(tau, y), x);
            let h = 1e-4;
            let u_xx = (put.price(tau, x + h) - 2.0 * put.price(tau, x) + put.price(tau, x - h)) / (h * h);
            let res = u_t - 0.5 * put.vol * put.vol * u_xx + b * u_x + put.rate * put.price(tau, x);
            assert!(res.abs() < 1e-4, "{res}");
        }
    }

    #[test]
    fn put_parity_at_the_boundaries() {
        let put = EX7_PUT;
        let ext = put.extension();
        // Deep in the money the put tends to the discounted forward.
        assert!((put.price(0.25, -2.0) - (ext.left)(0.25, -2.0)).abs() < 1e-6);
        assert!(put.price(0.25, 2.0).abs() < 1e-9);
        assert!((put.price(0.0, -0.5) - put.payoff(-0.5)).abs() < 1e-15);
    }

    #[test]
    fn ex6_exact_solves_the_pde() {
        for &(t, x) in &[(0.1, 0.3), (0.2, 0.85)] {
            let u_t = d(|t| ex6_exact(t, x), t);
            let u_x = d(|y| ex6_exact(t, y), x);
            let u_xx = d(|y| d(|z| ex6_exact(t, z), y), x);
            let res = u_t + EX6_B * u_x - 0.5 * EX6_SIGMA * EX6_SIGMA * u_xx;
            assert!(res.abs() < 1e-5, "{res}");
        }
    }

    #[test]
    fn scheme_names_parse() {
        assert_eq!(rk_scheme("rk2", Projection::Single).unwrap(), (2, Projection::Single));
        assert_eq!(rk_scheme("rk3-composed", Projection::Single).unwrap(), (3, Projection::Composed));
        assert!(rk_scheme("rk4", Projection::Single).is_err());
    }
}
