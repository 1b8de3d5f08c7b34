//! Second-order steps for `u_t − σ²/2 u_xx − b u_x + r u = f`.
//!
//! Constant coefficients use averages of exact shifts `x ± σ√Δt`; variable
//! coefficients use weak Euler or Platen branch maps, each transported with
//! its own breakpoints.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::field::{lincomb, BoundaryExtension, DgField1D};
use crate::flow::{euler_branches, platen_branches, BackwardMap, Branch, Window};
use crate::transport::advect_step;
use crate::{Error, Fn1, Fn2, Result};

/// Coefficients `b(x)`, `σ(x)` and the discount rate `r`.
#[derive(Clone)]
pub struct CoeffSet1D {
    pub b: Fn1,
    pub sigma: Fn1,
    pub r: f64,
}

impl CoeffSet1D {
    pub fn new(b: Fn1, sigma: Fn1, r: f64) -> Self {
        Self { b, sigma, r }
    }

    pub fn constant(b: f64, sigma: f64, r: f64) -> Self {
        Self::new(Arc::new(move |_| b), Arc::new(move |_| sigma), r)
    }
}

/// Source `f(t, x)` with the derivatives needed by the second-order correction.
#[derive(Clone)]
pub struct SourceSpec {
    pub f: Fn2,
    pub f_t: Option<Fn2>,
    pub f_x: Option<Fn2>,
    pub f_xx: Option<Fn2>,
}

impl SourceSpec {
    pub fn first_order(f: Fn2) -> Self {
        Self {
            f,
            f_t: None,
            f_x: None,
            f_xx: None,
        }
    }

    pub fn second_order(f: Fn2, f_t: Fn2, f_x: Fn2, f_xx: Fn2) -> Self {
        Self {
            f,
            f_t: Some(f_t),
            f_x: Some(f_x),
            f_xx: Some(f_xx),
        }
    }
}

/// How the powers of the shift operator are projected in [`sldg_const`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Projection {
    /// `S = Π S⁰` applied repeatedly.
    #[default]
    Composed,
    /// One projection of the combined shifts, `Π(Σ c_j (S⁰)^j u)`.
    Single,
}

/// `Π S⁰ u` with `S⁰u = ½(u(x − σ√Δt) + u(x + σ√Δt))`.
pub fn shift_average(
    u: &DgField1D,
    sigma: f64,
    dt: f64,
    ext: Option<&BoundaryExtension>,
    t: f64,
) -> Result<DgField1D> {
    let s = sigma * libm::sqrt(dt);
    let lo = advect_step(u, &BackwardMap::shift(-s), ext, t)?;
    let hi = advect_step(u, &BackwardMap::shift(s), ext, t)?;
    lincomb(&[(0.5, &lo), (0.5, &hi)])
}

pub(crate) fn convex_weights(p: usize) -> Result<&'static [f64]> {
    match p {
        1 => Ok(&[0.0, 1.0]),
        2 => Ok(&[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]),
        3 => Ok(&[13.0 / 45.0, 21.0 / 45.0, 9.0 / 45.0, 2.0 / 45.0]),
        _ => Err(Error::InvalidArgument("scheme order must be 1, 2 or 3")),
    }
}

/// SLDG-p for constant σ: `S`, `(u + Su + S²u)/3` or
/// `(13u + 21Su + 9S²u + 2S³u)/45`.
pub fn sldg_const(
    u: &DgField1D,
    sigma: f64,
    dt: f64,
    p: usize,
    variant: Projection,
    ext: Option<&BoundaryExtension>,
    t: f64,
) -> Result<DgField1D> {
    let c = convex_weights(p)?;
    match variant {
        Projection::Composed => {
            let mut powers: Vec<DgField1D> = Vec::with_capacity(c.len());
            powers.push(u.clone());
            for j in 1..c.len() {
                let next = shift_average(&powers[j - 1], sigma, dt, ext, t)?;
                powers.push(next);
            }
            let terms: Vec<(f64, &DgField1D)> = c
                .iter()
                .zip(&powers)
                .filter(|(w, _)| **w != 0.0)
                .map(|(w, f)| (*w, f))
                .collect();
            lincomb(&terms)
        }
        Projection::Single => {
            // (S⁰)^j u = 2^{-j} Σ_m C(j, m) u(x + (2m − j)s)
            let s = sigma * libm::sqrt(dt);
            let deg = c.len() - 1;
            let mut shift_w = alloc::vec![0.0; 2 * deg + 1];
            for (j, &cj) in c.iter().enumerate() {
                let mut binom = 1.0;
                for m in 0..=j {
                    let off = (2 * m + deg) - j;
                    shift_w[off] += cj * binom / libm::pow(2.0, j as f64);
                    binom = binom * (j - m) as f64 / (m + 1) as f64;
                }
            }
            let mut acc: Option<DgField1D> = None;
            for (off, &w) in shift_w.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let shift = (off as f64 - deg as f64) * s;
                let v = if shift == 0.0 {
                    u.clone()
                } else {
                    advect_step(u, &BackwardMap::shift(shift), ext, t)?
                };
                match acc.as_mut() {
                    Some(a) => a.axpy(w, &v)?,
                    None => acc = Some(v.scale(w)),
                }
            }
            acc.ok_or(Error::EmptyCombination)
        }
    }
}

/// Branch family of the given weak order for `coeffs` on `window`.
pub fn branches(coeffs: &CoeffSet1D, dt: f64, order: usize, window: Window) -> Result<Vec<Branch>> {
    match order {
        1 => Ok(euler_branches(coeffs.b.clone(), coeffs.sigma.clone(), dt, window)?.to_vec()),
        2 => Ok(platen_branches(coeffs.b.clone(), coeffs.sigma.clone(), dt, window)?.to_vec()),
        _ => Err(Error::InvalidArgument("weak order must be 1 or 2")),
    }
}

/// `Σ_η α_η T̃_η u` over a branch family.
pub fn branch_step(
    u: &DgField1D,
    family: &[Branch],
    ext: Option<&BoundaryExtension>,
    t: f64,
) -> Result<DgField1D> {
    let mut acc: Option<DgField1D> = None;
    for br in family {
        let v = advect_step(u, &br.map, ext, t)?;
        match acc.as_mut() {
            Some(a) => a.axpy(br.weight, &v)?,
            None => acc = Some(v.scale(br.weight)),
        }
    }
    acc.ok_or(Error::EmptyCombination)
}

/// Weak Euler (`order = 1`) or Platen (`order = 2`) step. Discounting and
/// sources are separate operators.
pub fn weak_step(
    u: &DgField1D,
    coeffs: &CoeffSet1D,
    dt: f64,
    order: usize,
    ext: Option<&BoundaryExtension>,
    t: f64,
) -> Result<DgField1D> {
    let m = u.mesh();
    let family = branches(coeffs, dt, order, Window::new(m.x_min(), m.x_max()))?;
    branch_step(u, &family, ext, t)
}

/// Adds `h f + (h²/2)(σ²/2 f_xx + b f_x − r f + f_t)` at every Gauss node,
/// the second term only when `order = 2`.
pub fn source_correct(
    u: &DgField1D,
    src: &SourceSpec,
    coeffs: &CoeffSet1D,
    t_n: f64,
    dt: f64,
    order: usize,
) -> Result<DgField1D> {
    let second = match order {
        1 => None,
        2 => match (&src.f_t, &src.f_x, &src.f_xx) {
            (Some(ft), Some(fx), Some(fxx)) => Some((ft, fx, fxx)),
            _ => return Err(Error::MissingDerivatives),
        },
        _ => return Err(Error::InvalidArgument("correction order must be 1 or 2")),
    };
    let mut out = u.clone();
    let n = u.basis().len();
    for i in 0..u.mesh().cells() {
        for a in 0..n {
            let x = u.node(i, a);
            let f = (src.f)(t_n, x);
            let mut add = dt * f;
            if let Some((ft, fx, fxx)) = second {
                let s = (coeffs.sigma)(x);
                let af = 0.5 * s * s * fxx(t_n, x) + (coeffs.b)(x) * fx(t_n, x) - coeffs.r * f;
                add += 0.5 * dt * dt * (af + ft(t_n, x));
            }
            out.coeffs_mut()[i * n + a] += add;
        }
    }
    Ok(out)
}

/// Multiplies by `e^{−r·dt}`.
pub fn discount(u: &DgField1D, r: f64, dt: f64) -> DgField1D {
    u.clone().scale(libm::exp(-r * dt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{project, Mesh1D};
    use core::f64::consts::PI;

    fn mesh() -> Mesh1D {
        Mesh1D::periodic(0.0, 1.0, 20).unwrap()
    }

    fn close(a: &DgField1D, b: &DgField1D, tol: f64) -> bool {
        a.coeffs().iter().zip(b.coeffs()).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn shift_average_trivial_cases() {
        let u = project(|x| (2.0 * PI * x).cos(), mesh(), 2).unwrap();
        assert!(close(&shift_average(&u, 0.0, 0.1, None, 0.0).unwrap(), &u, 1e-14));
        assert!(close(&shift_average(&u, 0.3, 0.0, None, 0.0).unwrap(), &u, 1e-14));
    }

    #[test]
    fn shift_average_fourier_symbol() {
        let (k, mode) = (3, 1.0);
        let (s, dt): (f64, f64) = (0.3, 0.01);
        let factor = (2.0 * PI * mode * s * dt.sqrt()).cos();
        let mut prev = f64::NAN;
        for m in [40usize, 80] {
            let msh = Mesh1D::periodic(0.0, 1.0, m).unwrap();
            let u = project(|x| (2.0 * PI * mode * x).cos(), msh, k).unwrap();
            let v = shift_average(&u, s, dt, None, 0.0).unwrap();
            let d = lincomb(&[(1.0, &v), (-factor, &u)]).unwrap().norms().linf;
            assert!(d <= msh.dx().powi(k as i32 + 1), "{d}");
            if prev.is_finite() {
                assert!((prev / d).log2() > k as f64 + 0.5);
            }
            prev = d;
        }
    }

    #[test]
    fn sldg_const_identity_and_contraction() {
        let u = project(|x| (x - 0.5).abs(), mesh(), 2).unwrap();
        for p in 1..=3 {
            for variant in [Projection::Composed, Projection::Single] {
                let id = sldg_const(&u, 0.0, 0.1, p, variant, None, 0.0).unwrap();
                assert!(close(&id, &u, 1e-14));
                let v = sldg_const(&u, 0.2, 0.013, p, variant, None, 0.0).unwrap();
                assert!(v.norms().l2 <= u.norms().l2 + 1e-13);
            }
        }
        assert!(sldg_const(&u, 0.1, 0.1, 4, Projection::Composed, None, 0.0).is_err());
    }

    #[test]
    fn single_projection_is_close_to_composed() {
        let msh = Mesh1D::periodic(0.0, 1.0, 64).unwrap();
        let u = project(|x| (2.0 * PI * x).sin(), msh, 2).unwrap();
        for p in 1..=3 {
            let a = sldg_const(&u, 0.1, 0.01, p, Projection::Composed, None, 0.0).unwrap();
            let b = sldg_const(&u, 0.1, 0.01, p, Projection::Single, None, 0.0).unwrap();
            let d = lincomb(&[(1.0, &a), (-1.0, &b)]).unwrap().norms().l2;
            assert!(d < 10.0 * msh.dx().powi(3), "p={p} d={d}");
        }
    }

    #[test]
    fn weak_steps_reduce_to_shifts() {
        let u = project(|x| (2.0 * PI * x).sin() + 0.3 * (6.0 * PI * x).cos(), mesh(), 3).unwrap();
        let (s, dt) = (0.2, 0.004);
        let c = CoeffSet1D::constant(0.0, s, 0.0);
        let e = weak_step(&u, &c, dt, 1, None, 0.0).unwrap();
        assert!(close(&e, &shift_average(&u, s, dt, None, 0.0).unwrap(), 1e-13));
        let p = weak_step(&u, &c, dt, 2, None, 0.0).unwrap();
        let d = s * (3.0 * dt).sqrt();
        let lo = advect_step(&u, &BackwardMap::shift(-d), None, 0.0).unwrap();
        let hi = advect_step(&u, &BackwardMap::shift(d), None, 0.0).unwrap();
        let want = lincomb(&[(1.0 / 6.0, &lo), (2.0 / 3.0, &u), (1.0 / 6.0, &hi)]).unwrap();
        assert!(close(&p, &want, 1e-13));
    }

    #[test]
    fn weak_step_is_branch_combination() {
        let u = project(|x| (2.0 * PI * x).sin(), mesh(), 2).unwrap();
        let c = CoeffSet1D::new(
            Arc::new(|x| 0.2 * (2.0 * PI * x).cos()),
            Arc::new(|x| (2.0 * PI * x).sin()),
            0.0,
        );
        let dt = 0.005;
        let fam = branches(&c, dt, 2, Window::new(0.0, 1.0)).unwrap();
        let whole = weak_step(&u, &c, dt, 2, None, 0.0).unwrap();
        let parts: Vec<DgField1D> =
            fam.iter().map(|b| advect_step(&u, &b.map, None, 0.0).unwrap()).collect();
        let terms: Vec<(f64, &DgField1D)> = fam.iter().map(|b| b.weight).zip(&parts).collect();
        assert!(close(&whole, &lincomb(&terms).unwrap(), 1e-14));
    }

    #[test]
    fn source_correction_examples() {
        let u = project(|_| 0.0, mesh(), 1).unwrap();
        let zero = SourceSpec::first_order(Arc::new(|_, _| 0.0));
        let c0 = CoeffSet1D::constant(0.0, 0.0, 0.0);
        assert_eq!(source_correct(&u, &zero, &c0, 0.0, 0.1, 1).unwrap(), u);
        assert_eq!(source_correct(&u, &zero, &c0, 0.0, 0.1, 2), Err(Error::MissingDerivatives));
        let one: Fn2 = Arc::new(|_, _| 1.0);
        let nil: Fn2 = Arc::new(|_, _| 0.0);
        let src = SourceSpec::second_order(one, nil.clone(), nil.clone(), nil);
        let dt = 0.1;
        let v = source_correct(&u, &src, &c0, 0.0, dt, 2).unwrap();
        assert!(v.coeffs().iter().all(|&c| (c - dt).abs() < 1e-16));
        let c2 = CoeffSet1D::constant(0.0, 0.0, 2.0);
        let w = source_correct(&u, &src, &c2, 0.0, dt, 2).unwrap();
        assert!(w.coeffs().iter().all(|&c| (c - (dt - dt * dt)).abs() < 1e-16));
    }

    #[test]
    fn discount_examples() {
        let u = project(|x| x, mesh(), 1).unwrap();
        assert_eq!(discount(&u, 0.0, 0.3), u);
        let h = discount(&u, 2f64.ln(), 1.0);
        assert!(close(&h, &u.clone().scale(0.5), 1e-15));
    }
}
