//! 2D diffusion split along the columns of σ.

use std::f64::consts::PI;
use std::sync::Arc;

use sldg_core::field::Mesh1D;
use sldg_core::quadbasis::NodalBasis;
use sldg_core::split2d::{
    decompose_diffusion, project_2d_with, sldg_const_2d, Component, DgField2D, Mesh2D, SourceSpec2D, WeakPlans2D,
};

use super::basis;
use crate::config::Setup;
use crate::driver::{march, Outcome};
use crate::error::{config, Result};

/// `Σ_{q=1,2} cos(2πqξ)/(i + q)` diffused for time t at unit rate in ξ.
fn ex9_profile(i: f64, t: f64, xi: f64) -> f64 {
    (1..=2)
        .map(|q| {
            let k = 2.0 * PI * q as f64;
            (-0.5 * k * k * t).exp() * (k * xi).cos() / (i + q as f64)
        })
        .sum()
}

/// Solution of `u_t = ½Tr(A D²u)` with `A = [[5, −2], [−2, 1]]`: in
/// `ξ₁ = x + 2y`, `ξ₂ = −y` the operator is `½(∂²_ξ₁ + ∂²_ξ₂)`.
pub fn ex9_exact(t: f64, x: f64, y: f64) -> f64 {
    ex9_profile(1.0, t, x + 2.0 * y) + ex9_profile(2.0, t, -y)
}

/// Columns of σ with `σσᵀ = A`.
pub const EX9_DIRECTIONS: [[f64; 2]; 2] = [[1.0, 0.0], [2.0, -1.0]];

pub(crate) fn ex9(s: &Setup) -> Result<Outcome> {
    let p = match s.scheme.as_str() {
        "rk1" => 1,
        "rk2" => 2,
        "rk3" => 3,
        other => return config(format!("unknown scheme `{other}`")),
    };
    let mesh = Mesh2D::new(
        Mesh1D::periodic(0.0, 1.0, s.m)?,
        Mesh1D::periodic(0.0, 1.0, s.m2.unwrap_or(s.m))?,
    );
    let basis = basis(s)?;
    let u0 = project_2d_with(|x, y| ex9_exact(0.0, x, y), mesh, basis)?;
    let dt = s.dt();
    // Constant directions commute, so the two SLDG-p steps compose exactly.
    let (u, seconds) = march(u0, s.n, |u, _| {
        let v = sldg_const_2d(u, EX9_DIRECTIONS[0], dt, p)?;
        sldg_const_2d(&v, EX9_DIRECTIONS[1], dt, p)
    })?;
    Ok(Outcome {
        errors: u.error_vs(ex9_exact, s.t_final),
        seconds,
        field: None,
    })
}

/// Manufactured solution `cos t · sin 2x · sin(x + y)` of
/// `u_t − ½Tr(σσᵀD²u) = f` with `σ = [[cos x, cos 2x], [0, sin y]]`.
pub mod manufactured {
    use std::f64::consts::FRAC_PI_2;

    /// `∂ₓⁱ∂ᵧʲ cos(αx + βy)`.
    fn wave(alpha: f64, beta: f64, i: usize, j: usize, x: f64, y: f64) -> f64 {
        alpha.powi(i as i32) * beta.powi(j as i32) * (alpha * x + beta * y + (i + j) as f64 * FRAC_PI_2).cos()
    }

    fn unit(i: usize, j: usize) -> f64 {
        if i == 0 && j == 0 {
            1.0
        } else {
            0.0
        }
    }

    /// Derivatives of `sin 2x sin(x + y) = ½cos(x − y) − ½cos(3x + y)`.
    fn g(i: usize, j: usize, x: f64, y: f64) -> f64 {
        0.5 * wave(1.0, -1.0, i, j, x, y) - 0.5 * wave(3.0, 1.0, i, j, x, y)
    }

    /// `a₁₁ = cos²x + cos²2x = 1 + ½cos 2x + ½cos 4x`.
    fn a11(i: usize, j: usize, x: f64, y: f64) -> f64 {
        unit(i, j) + 0.5 * wave(2.0, 0.0, i, j, x, y) + 0.5 * wave(4.0, 0.0, i, j, x, y)
    }

    /// `a₁₂ = cos 2x sin y`.
    fn a12(i: usize, j: usize, x: f64, y: f64) -> f64 {
        2f64.powi(i as i32) * (2.0 * x + i as f64 * FRAC_PI_2).cos() * (y + j as f64 * FRAC_PI_2).sin()
    }

    /// `a₂₂ = sin²y = ½ − ½cos 2y`.
    fn a22(i: usize, j: usize, x: f64, y: f64) -> f64 {
        0.5 * unit(i, j) - 0.5 * wave(0.0, 2.0, i, j, x, y)
    }

    fn binom(n: usize, k: usize) -> f64 {
        match (n, k) {
            (2, 1) => 2.0,
            _ => 1.0,
        }
    }

    /// `∂ₓᵖ∂ᵧ^q (a₁₁g_xx + 2a₁₂g_xy + a₂₂g_yy)` for `p + q ≤ 2`.
    pub fn lg(p: usize, q: usize, x: f64, y: f64) -> f64 {
        let mut acc = 0.0;
        for i in 0..=p {
            for j in 0..=q {
                let c = binom(p, i) * binom(q, j);
                let (dp, dq) = (p - i, q - j);
                acc += c
                    * (a11(i, j, x, y) * g(2 + dp, dq, x, y)
                        + 2.0 * a12(i, j, x, y) * g(1 + dp, 1 + dq, x, y)
                        + a22(i, j, x, y) * g(dp, 2 + dq, x, y));
            }
        }
        acc
    }

    pub fn exact(t: f64, x: f64, y: f64) -> f64 {
        t.cos() * g(0, 0, x, y)
    }

    /// Spatial profile `sin 2x sin(x + y)`.
    pub fn profile(x: f64, y: f64) -> f64 {
        g(0, 0, x, y)
    }

    /// `Tr(σσᵀ D²L)` with `L = Tr(σσᵀ D²g)`.
    pub fn trace_lg(x: f64, y: f64) -> f64 {
        let [a11, a12, a22] = diffusion_matrix(x, y);
        a11 * lg(2, 0, x, y) + 2.0 * a12 * lg(1, 1, x, y) + a22 * lg(0, 2, x, y)
    }

    /// `∂ₓᵖ∂ᵧ^q f`.
    pub fn f_d(p: usize, q: usize, t: f64, x: f64, y: f64) -> f64 {
        -t.sin() * g(p, q, x, y) - 0.5 * t.cos() * lg(p, q, x, y)
    }

    pub fn f_t(t: f64, x: f64, y: f64) -> f64 {
        -t.cos() * g(0, 0, x, y) + 0.5 * t.sin() * lg(0, 0, x, y)
    }

    /// `σσᵀ` entries, for checks.
    pub fn diffusion_matrix(x: f64, y: f64) -> [f64; 3] {
        [a11(0, 0, x, y), a12(0, 0, x, y), a22(0, 0, x, y)]
    }
}

pub fn ex10_sigma() -> [[Component; 2]; 2] {
    [
        [Component::OfX(Arc::new(f64::cos)), Component::OfX(Arc::new(|x: f64| (2.0 * x).cos()))],
        [Component::Zero, Component::OfY(Arc::new(f64::sin))],
    ]
}

pub fn ex10_source() -> SourceSpec2D {
    use manufactured::{f_d, f_t};
    SourceSpec2D {
        f: Arc::new(|t, x, y| f_d(0, 0, t, x, y)),
        f_t: Some(Arc::new(f_t)),
        f_xx: Some(Arc::new(|t, x, y| f_d(2, 0, t, x, y))),
        f_xy: Some(Arc::new(|t, x, y| f_d(1, 1, t, x, y))),
        f_yy: Some(Arc::new(|t, x, y| f_d(0, 2, t, x, y))),
    }
}

/// The correction `h f + (h²/2)(½Tr(σσᵀD²f) + f_t)` of the manufactured
/// source, separated in time: with `L = Tr(σσᵀD²g)` it equals
/// `−(h sin t + (h²/2) cos t) g − (h/2) cos t L − (h²/8) cos t Tr(σσᵀD²L)`.
/// The three spatial fields are sampled once.
pub struct Ex10Source {
    g: DgField2D,
    l: DgField2D,
    tl: DgField2D,
}

impl Ex10Source {
    pub fn new(mesh: &Mesh2D, basis: &Arc<NodalBasis>) -> Self {
        let at = |f: fn(f64, f64) -> f64| DgField2D::interpolate(*mesh, basis.clone(), f);
        Self {
            g: at(manufactured::profile),
            l: at(|x, y| manufactured::lg(0, 0, x, y)),
            tl: at(manufactured::trace_lg),
        }
    }

    pub fn add(&self, u: &mut DgField2D, t: f64, h: f64, order: usize) -> sldg_core::Result<()> {
        let h2 = if order == 2 { 0.5 * h * h } else { 0.0 };
        let (s, c) = t.sin_cos();
        u.axpy(-(h * s + h2 * c), &self.g)?;
        u.axpy(-0.5 * h * c, &self.l)?;
        if h2 != 0.0 {
            u.axpy(-0.25 * h2 * c, &self.tl)?;
        }
        Ok(())
    }
}

/// Weak Euler with Trotter splitting, or Platen with Strang splitting, over
/// the two columns of σ, followed by the source correction of matching order.
pub(crate) fn ex10(s: &Setup) -> Result<Outcome> {
    let order = match s.scheme.as_str() {
        "euler-trotter" => 1,
        "platen-strang" => 2,
        other => return config(format!("unknown scheme `{other}`")),
    };
    let mesh = Mesh2D::new(
        Mesh1D::periodic(-PI, PI, s.m)?,
        Mesh1D::periodic(-PI, PI, s.m2.unwrap_or(s.m))?,
    );
    let basis = basis(s)?;
    let u0 = project_2d_with(|x, y| manufactured::exact(0.0, x, y), mesh, basis.clone())?;
    let dt = s.dt();
    let dirs = decompose_diffusion(ex10_sigma())?;
    // Trotter moves along the second column first; Strang takes its half
    // steps along the first.
    let stages = if order == 1 {
        vec![
            WeakPlans2D::new(&mesh, &basis, &dirs[1], dt, 1)?,
            WeakPlans2D::new(&mesh, &basis, &dirs[0], dt, 1)?,
        ]
    } else {
        let half = WeakPlans2D::new(&mesh, &basis, &dirs[0], 0.5 * dt, 2)?;
        vec![half.clone(), WeakPlans2D::new(&mesh, &basis, &dirs[1], dt, 2)?, half]
    };
    let parts = Ex10Source::new(&mesh, &basis);
    let (u, seconds) = march(u0, s.n, |u, step| {
        let mut v = u.clone();
        for st in &stages {
            v = st.apply(&v)?;
        }
        parts.add(&mut v, step as f64 * dt, dt, order)?;
        Ok(v)
    })?;
    Ok(Outcome {
        errors: u.error_vs(manufactured::exact, s.t_final),
        seconds,
        field: None,
    })
}

#[cfg(test)]
mod tests {
    use super::manufactured::*;
    use super::*;

    const H: f64 = 1e-4;

    fn dx(f: impl Fn(f64, f64) -> f64, x: f64, y: f64) -> f64 {
        (f(x + H, y) - f(x - H, y)) / (2.0 * H)
    }

    fn dy(f: impl Fn(f64, f64) -> f64, x: f64, y: f64) -> f64 {
        (f(x, y + H) - f(x, y - H)) / (2.0 * H)
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-6 * (1.0 + b.abs())
    }

    #[test]
    fn ex10_source_matches_finite_differences() {
        for &(t, x, y) in &[(0.3, 0.4, -1.2), (0.9, -2.5, 2.0), (0.0, 1.1, 0.3)] {
            let u = |x: f64, y: f64| exact(t, x, y);
            let u_t = (exact(t + H, x, y) - exact(t - H, x, y)) / (2.0 * H);
            let u_xx = dx(|x, y| dx(u, x, y), x, y);
            let u_xy = dx(|x, y| dy(u, x, y), x, y);
            let u_yy = dy(|x, y| dy(u, x, y), x, y);
            let [a11, a12, a22] = diffusion_matrix(x, y);
            let f = u_t - 0.5 * (a11 * u_xx + 2.0 * a12 * u_xy + a22 * u_yy);
            assert!(close(f_d(0, 0, t, x, y), f), "f");
            let ft = (f_d(0, 0, t + H, x, y) - f_d(0, 0, t - H, x, y)) / (2.0 * H);
            assert!(close(f_t(t, x, y), ft), "f_t");
            let f0 = |x: f64, y: f64| f_d(0, 0, t, x, y);
            let fx = |x: f64, y: f64| f_d(1, 0, t, x, y);
            assert!(close(fx(x, y), dx(f0, x, y)), "f_x");
            assert!(close(f_d(2, 0, t, x, y), dx(fx, x, y)), "f_xx");
            assert!(close(f_d(1, 1, t, x, y), dy(fx, x, y)), "f_xy");
            let fy = |x: f64, y: f64| f_d(0, 1, t, x, y);
            assert!(close(fy(x, y), dy(f0, x, y)), "f_y");
            assert!(close(f_d(0, 2, t, x, y), dy(fy, x, y)), "f_yy");
        }
    }

    #[test]
    fn separated_source_matches_generic_correction() {
        use sldg_core::split2d::source_correct_2d;
        let mesh = Mesh2D::new(
            Mesh1D::periodic(-PI, PI, 5).unwrap(),
            Mesh1D::periodic(-PI, PI, 4).unwrap(),
        );
        let basis = Arc::new(NodalBasis::new(2).unwrap());
        let u = project_2d_with(|x, y| (x + 2.0 * y).sin(), mesh, basis.clone()).unwrap();
        let dirs = decompose_diffusion(ex10_sigma()).unwrap();
        let parts = Ex10Source::new(&mesh, &basis);
        for order in [1, 2] {
            let want = source_correct_2d(&u, &ex10_source(), &dirs, 0.37, 0.05, order).unwrap();
            let mut got = u.clone();
            parts.add(&mut got, 0.37, 0.05, order).unwrap();
            let err = got.coeffs().iter().zip(want.coeffs()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err < 1e-13, "order {order}: {err}");
        }
    }

    #[test]
    fn ex10_matrix_is_sigma_sigma_t() {
        let sig = ex10_sigma();
        for &(x, y) in &[(0.2, 0.7), (-3.0, 1.9)] {
            let s = |r: usize, c: usize| sig[r][c].eval(x, y);
            let a = diffusion_matrix(x, y);
            assert!((a[0] - (s(0, 0).powi(2) + s(0, 1).powi(2))).abs() < 1e-14);
            assert!((a[1] - (s(0, 0) * s(1, 0) + s(0, 1) * s(1, 1))).abs() < 1e-14);
            assert!((a[2] - (s(1, 0).powi(2) + s(1, 1).powi(2))).abs() < 1e-14);
        }
    }

    #[test]
    fn ex9_exact_solves_the_pde() {
        let (t, x, y) = (0.05, 0.3, 0.8);
        let u = |x: f64, y: f64| ex9_exact(t, x, y);
        let u_t = (ex9_exact(t + H, x, y) - ex9_exact(t - H, x, y)) / (2.0 * H);
        let u_xx = dx(|x, y| dx(u, x, y), x, y);
        let u_xy = dx(|x, y| dy(u, x, y), x, y);
        let u_yy = dy(|x, y| dy(u, x, y), x, y);
        let res = u_t - 0.5 * (5.0 * u_xx - 4.0 * u_xy + u_yy);
        assert!(res.abs() < 1e-4, "{res}");
        let [s1, s2] = EX9_DIRECTIONS;
        assert_eq!(s1[0] * s1[0] + s2[0] * s2[0], 5.0);
        assert_eq!(s1[0] * s1[1] + s2[0] * s2[1], -2.0);
        assert_eq!(s1[1] * s1[1] + s2[1] * s2[1], 1.0);
    }
}
