//! One-step characteristic maps `x ↦ y_x(−Δt)`, their inverses and the
//! breakpoints they induce on a mesh.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::field::{Boundary, Mesh1D};
use crate::{Error, Fn1, Result};

/// Safety factor applied to the invertibility bounds.
pub const SAFETY: f64 = 0.95;
/// Number of samples used for derivative and monotonicity checks.
pub const CHECK_SAMPLES: usize = 10_000;

/// Exact flow of an autonomous 1D ODE.
pub trait Flow: Send + Sync {
    /// Position after `time` (possibly negative) of the solution starting at `x`.
    fn advance(&self, x: f64, time: f64) -> f64;
}

/// Backward characteristic map of one step (or one weak-Taylor branch).
#[derive(Clone)]
pub struct BackwardMap {
    foot: Fn1,
    forward: Option<Fn1>,
    dt: f64,
    displacement_bound: f64,
    monotone: bool,
    shift: Option<f64>,
}

impl core::fmt::Debug for BackwardMap {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("BackwardMap")
            .field("dt", &self.dt)
            .field("displacement_bound", &self.displacement_bound)
            .field("monotone", &self.monotone)
            .field("has_forward", &self.forward.is_some())
            .finish()
    }
}

impl BackwardMap {
    pub fn new(foot: Fn1, dt: f64, displacement_bound: f64, monotone: bool) -> Self {
        Self {
            foot,
            forward: None,
            dt,
            displacement_bound: libm::fabs(displacement_bound),
            monotone,
            shift: None,
        }
    }

    /// Attaches an (approximate or exact) inverse used to seed [`forward_solve`].
    pub fn with_forward(mut self, forward: Fn1) -> Self {
        self.forward = Some(forward);
        self
    }

    pub fn identity() -> Self {
        Self::shift(0.0)
    }

    /// `foot(x) = x + s`.
    pub fn shift(s: f64) -> Self {
        let mut m = Self::new(Arc::new(move |x| x + s), 0.0, s, true)
            .with_forward(Arc::new(move |z| z - s));
        m.shift = Some(s);
        m
    }

    /// `Some(s)` when `foot(x) = x + s` exactly.
    pub fn as_shift(&self) -> Option<f64> {
        self.shift
    }

    #[inline]
    pub fn foot(&self, x: f64) -> f64 {
        (self.foot)(x)
    }

    pub fn forward(&self) -> Option<&Fn1> {
        self.forward.as_ref()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn displacement_bound(&self) -> f64 {
        self.displacement_bound
    }

    pub fn is_monotone(&self) -> bool {
        self.monotone
    }

    /// `foot'(x) = foot(x) + ε·η(x)` with `|η| ≤ eta_sup`, for studying errors
    /// in the characteristics.
    pub fn perturbed(&self, eps: f64, eta: Fn1, eta_sup: f64) -> Self {
        let foot = self.foot.clone();
        let mut m = Self::new(
            Arc::new(move |x| foot(x) + eps * eta(x)),
            self.dt,
            self.displacement_bound + libm::fabs(eps * eta_sup),
            self.monotone,
        );
        m.forward = self.forward.clone();
        m
    }
}

/// Map with its quadrature weight in a weak-Taylor branch family.
#[derive(Debug, Clone)]
pub struct Branch {
    pub weight: f64,
    pub map: BackwardMap,
}

/// `foot(x) = x − b·dt`.
pub fn constant_map(b: f64, dt: f64) -> BackwardMap {
    let mut m = BackwardMap::shift(-b * dt);
    m.dt = dt;
    m
}

/// A priori bounds on a velocity field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityBounds {
    /// `sup |b|`.
    pub sup: f64,
    /// Lipschitz constant of `b`.
    pub lipschitz: f64,
}

/// Classical RK4 integration of `ẋ = v(x)` over `time` in `steps` substeps.
pub fn rk4_advance(v: &dyn Fn(f64) -> f64, x: f64, time: f64, steps: usize) -> f64 {
    let h = time / steps as f64;
    let mut y = x;
    for _ in 0..steps {
        let k1 = v(y);
        let k2 = v(y + 0.5 * h * k1);
        let k3 = v(y + 0.5 * h * k2);
        let k4 = v(y + h * k3);
        y += h / 6.0 * (k1 + 2.0 * (k2 + k3) + k4);
    }
    y
}

/// Backward map of `ẏ = b(y)` over one step.
///
/// With `analytic`, feet come from the exact flow and the forward flow seeds
/// the inverse. Otherwise RK4 with `max(4, ⌈20·L·|dt|⌉)` substeps is used.
/// Non-finite velocities surface as non-finite feet, which the transport
/// step rejects.
pub fn ode_map(
    b: Fn1,
    dt: f64,
    bounds: VelocityBounds,
    analytic: Option<Arc<dyn Flow>>,
) -> BackwardMap {
    let bound = bounds.sup * libm::fabs(dt);
    match analytic {
        Some(flow) => {
            let back = flow.clone();
            BackwardMap::new(Arc::new(move |x| back.advance(x, -dt)), dt, bound, true)
                .with_forward(Arc::new(move |z| flow.advance(z, dt)))
        }
        None => {
            let steps = (libm::ceil(20.0 * bounds.lipschitz * libm::fabs(dt)) as usize).max(4);
            BackwardMap::new(
                Arc::new(move |x| rk4_advance(&*b, x, -dt, steps)),
                dt,
                bound,
                true,
            )
        }
    }
}

/// Sampling window for derivative and monotonicity checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    fn points(&self) -> impl Iterator<Item = f64> + '_ {
        let n = CHECK_SAMPLES;
        (0..n).map(move |j| self.lo + (self.hi - self.lo) * (j as f64 + 0.5) / n as f64)
    }

    fn sup(&self, f: &dyn Fn(f64) -> f64) -> f64 {
        self.points().map(|x| libm::fabs(f(x))).fold(0.0, f64::max)
    }

    fn deriv(&self, f: &dyn Fn(f64) -> f64, x: f64) -> f64 {
        let h = 1e-6 * (self.hi - self.lo);
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    /// Smallest sampled difference quotient of `f` on a grid one sample apart.
    fn min_slope(&self, f: &dyn Fn(f64) -> f64) -> f64 {
        let n = CHECK_SAMPLES;
        let h = (self.hi - self.lo) / n as f64;
        let mut prev = f(self.lo);
        let mut m = f64::INFINITY;
        for j in 1..=n {
            let x = self.lo + h * j as f64;
            let v = f(x);
            m = m.min((v - prev) / h);
            prev = v;
        }
        m
    }
}

/// Falls back to a sampled monotonicity check of every branch when the
/// sufficient derivative bound fails; the bound is loose for the Platen
/// family, whose maps stay increasing well beyond it.
fn check_branches(
    maps: &[BackwardMap],
    window: Window,
    bound: &'static str,
    value: f64,
) -> Result<()> {
    if value < SAFETY {
        return Ok(());
    }
    for m in maps {
        let slope = window.min_slope(&|x| m.foot(x));
        if !(slope > 1.0 - SAFETY) {
            return Err(Error::NotInvertible {
                bound,
                value,
                limit: SAFETY,
            });
        }
    }
    Ok(())
}

/// Weak Euler branches `γ^q(x) = x + b(x)dt + qσ(x)√dt`, `q = ±1`, weights ½.
pub fn euler_branches(b: Fn1, sigma: Fn1, dt: f64, window: Window) -> Result<[Branch; 2]> {
    if dt < 0.0 {
        return Err(Error::InvalidArgument("weak branches need dt >= 0"));
    }
    let sq = libm::sqrt(dt);
    let value = window
        .points()
        .map(|x| {
            let db = window.deriv(&*b, x);
            let ds = window.deriv(&*sigma, x);
            libm::fabs(dt * db) + libm::fabs(sq * ds)
        })
        .fold(0.0, f64::max);
    let bound = window.sup(&*b) * dt + window.sup(&*sigma) * sq;
    let mk = |q: f64| {
        let (b, s) = (b.clone(), sigma.clone());
        BackwardMap::new(
            Arc::new(move |x| x + b(x) * dt + q * s(x) * sq),
            dt,
            bound * 1.05 + 1e-14,
            true,
        )
    };
    let maps = [mk(-1.0), mk(1.0)];
    check_branches(&maps, window, "dt*|b'| + sqrt(dt)*|sigma'|", value)?;
    let [m0, m1] = maps;
    Ok([
        Branch {
            weight: 0.5,
            map: m0,
        },
        Branch {
            weight: 0.5,
            map: m1,
        },
    ])
}

/// Second-order Platen map for branch `q ∈ {−1, 0, 1}`.
pub fn platen_foot(b: &dyn Fn(f64) -> f64, s: &dyn Fn(f64) -> f64, h: f64, q: f64, x: f64) -> f64 {
    let sq = libm::sqrt(h);
    let bx = b(x);
    let sx = s(x);
    let drift = x + bx * h;
    let gq = drift + libm::sqrt(3.0) * q * sx * sq;
    let sp = s(drift + sx * sq);
    let sm = s(drift - sx * sq);
    x + 0.5 * (b(gq) + bx) * h
        + 0.25 * ((sp + sm + 2.0 * sx) * libm::sqrt(3.0) * q + (sp - sm) * (3.0 * q * q - 1.0)) * sq
}

/// Platen branches `q = −1, 0, 1` with weights 1/6, 2/3, 1/6.
pub fn platen_branches(b: Fn1, sigma: Fn1, dt: f64, window: Window) -> Result<[Branch; 3]> {
    if dt < 0.0 {
        return Err(Error::InvalidArgument("weak branches need dt >= 0"));
    }
    let sq = libm::sqrt(dt);
    let db = window
        .points()
        .map(|x| libm::fabs(window.deriv(&*b, x)))
        .fold(0.0, f64::max);
    let ds = window
        .points()
        .map(|x| libm::fabs(window.deriv(&*sigma, x)))
        .fold(0.0, f64::max);
    let value = dt * db + 3.0 * sq * ds;
    let bound = window.sup(&*b) * dt + (libm::sqrt(3.0) + 1.0) * window.sup(&*sigma) * sq;
    let mk = |q: f64| {
        let (b, s) = (b.clone(), sigma.clone());
        BackwardMap::new(
            Arc::new(move |x| platen_foot(&*b, &*s, dt, q, x)),
            dt,
            bound * 1.05 + 1e-14,
            true,
        )
    };
    let maps = [mk(-1.0), mk(0.0), mk(1.0)];
    check_branches(&maps, window, "dt*|b'| + 3*sqrt(dt)*|sigma'|", value)?;
    let [m0, m1, m2] = maps;
    Ok([
        Branch {
            weight: 1.0 / 6.0,
            map: m0,
        },
        Branch {
            weight: 2.0 / 3.0,
            map: m1,
        },
        Branch {
            weight: 1.0 / 6.0,
            map: m2,
        },
    ])
}

/// Solves `foot(x) = z` by safeguarded Newton iteration.
pub fn forward_solve(map: &BackwardMap, z: f64) -> Result<f64> {
    let tol = 1e-13 * libm::fabs(z).max(1.0);
    let mut x = match map.forward() {
        Some(f) => f(z),
        None => z,
    };
    let g = |x: f64| map.foot(x) - z;
    let mut gx = g(x);
    if !gx.is_finite() {
        x = z;
        gx = g(x);
    }
    if libm::fabs(gx) <= tol {
        return Ok(x);
    }
    let span = map.displacement_bound() * (1.0 + 1e-9) + 1e-12 * libm::fabs(z).max(1.0);
    let mut lo = (z - span).min(x);
    let mut hi = (z + span).max(x);
    let mut glo = g(lo);
    let mut ghi = g(hi);
    let mut widen = 0;
    while !(glo <= 0.0 && ghi >= 0.0) {
        if widen == 8 || !(glo.is_finite() && ghi.is_finite()) {
            return Err(Error::NotMonotone { z });
        }
        let w = hi - lo;
        lo -= w;
        hi += w;
        glo = g(lo);
        ghi = g(hi);
        widen += 1;
    }
    let mut best = (libm::fabs(gx), x);
    for _ in 0..60 {
        if gx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let h = 1e-7 * libm::fabs(x).max(1.0);
        let d = (map.foot(x + h) - map.foot(x - h)) / (2.0 * h);
        let newton = x - gx / d;
        x = if d > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        gx = g(x);
        if libm::fabs(gx) < best.0 {
            best = (libm::fabs(gx), x);
        }
        if libm::fabs(gx) <= tol || hi - lo <= 4.0 * f64::EPSILON * libm::fabs(x).max(1.0) {
            break;
        }
    }
    Ok(best.1)
}

/// Breakpoints of every cell of a row, in compressed layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Breakpoints {
    offsets: Vec<usize>,
    points: Vec<f64>,
    sources: Vec<i64>,
}

impl Breakpoints {
    /// Sorted points `x_{i,0} = x_{i−1/2} < … < x_{i,p+1} = x_{i+1/2}`.
    pub fn cell(&self, i: usize) -> &[f64] {
        &self.points[self.offsets[i] + i..self.offsets[i + 1] + i + 1]
    }

    /// Unwrapped index of the cell containing the feet of each subinterval
    /// of cell `i` (negative or `≥ M` outside the domain).
    pub fn sources(&self, i: usize) -> &[i64] {
        &self.sources[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn cells(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of interior points of cell `i`.
    pub fn interior_count(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i] - 1
    }
}

fn floor_index(mesh: &Mesh1D, y: f64) -> i64 {
    libm::floor((y - mesh.x_min()) / mesh.dx()) as i64
}

/// Breakpoints of all cells, sharing foot evaluations at the interfaces.
pub fn breakpoint_row(map: &BackwardMap, mesh: &Mesh1D) -> Result<Breakpoints> {
    let m = mesh.cells();
    let dx = mesh.dx();
    let merge = 1e-13 * dx;
    let check = 1e-9 * dx;
    let feet: Vec<f64> = (0..=m).map(|i| map.foot(mesh.interface(i as i64))).collect();
    if let Some(p) = feet.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            cell: p.min(m - 1),
        });
    }
    let mut offsets = Vec::with_capacity(m + 1);
    let mut points = Vec::with_capacity(3 * m);
    let mut sources = Vec::with_capacity(2 * m);
    offsets.push(0);
    let mut scratch: Vec<f64> = Vec::new();
    for i in 0..m {
        let (left, right) = (mesh.interface(i as i64), mesh.interface(i as i64 + 1));
        let (fa, fb) = (feet[i], feet[i + 1]);
        if !(fb >= fa) {
            return Err(Error::NotMonotone { z: fa });
        }
        scratch.clear();
        scratch.push(left);
        let mut l = floor_index(mesh, fa) + 1;
        let l_end = libm::ceil((fb - mesh.x_min()) / dx) as i64;
        let (lmin, lmax) = match mesh.boundary() {
            Boundary::Periodic => (i64::MIN, i64::MAX),
            Boundary::Extended => (0, m as i64),
        };
        while l < l_end {
            let z = mesh.interface(l);
            if l >= lmin && l <= lmax && z > fa && z < fb {
                let x = forward_solve(map, z)?.clamp(left, right);
                scratch.push(x);
            }
            l += 1;
        }
        scratch.push(right);
        scratch.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
        // Drop points too close to the previous kept one, never the right end.
        let start = points.len();
        points.push(scratch[0]);
        for &x in &scratch[1..scratch.len() - 1] {
            if x - points[points.len() - 1] > merge && right - x > merge {
                points.push(x);
            }
        }
        points.push(right);
        let pts = &points[start..];
        for w in pts.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let mut c = floor_index(mesh, map.foot(mid));
            let (mut lo, mut hi) = (mesh.interface(c) - check, mesh.interface(c + 1) + check);
            if mesh.boundary() == Boundary::Extended {
                // The extension is smooth: only the side of the domain matters.
                if c < 0 {
                    c = -1;
                    lo = f64::NEG_INFINITY;
                    hi = mesh.interface(0) + check;
                } else if c >= m as i64 {
                    c = m as i64;
                    lo = mesh.interface(m as i64) - check;
                    hi = f64::INFINITY;
                }
            }
            let (ya, yb) = (map.foot(w[0]), map.foot(w[1]));
            if !(ya >= lo && ya <= hi && yb >= lo && yb <= hi) {
                return Err(Error::Breakpoint { cell: i });
            }
            sources.push(c);
        }
        offsets.push(sources.len());
    }
    Ok(Breakpoints {
        offsets,
        points,
        sources,
    })
}

/// Breakpoints of cell `i` alone.
pub fn breakpoints(map: &BackwardMap, mesh: &Mesh1D, i: usize) -> Result<Vec<f64>> {
    if i >= mesh.cells() {
        return Err(Error::InvalidArgument("cell index out of range"));
    }
    let row = breakpoint_row(map, mesh)?;
    Ok(row.cell(i).to_vec())
}

/// Sampled check that `foot` is increasing with displacement within bound.
pub fn spot_check(map: &BackwardMap, window: Window, samples: usize) -> bool {
    let mut prev = f64::NEG_INFINITY;
    for j in 0..samples {
        let x = window.lo + (window.hi - window.lo) * j as f64 / (samples - 1).max(1) as f64;
        let y = map.foot(x);
        if libm::fabs(y - x) > map.displacement_bound() * (1.0 + 1e-12) + 1e-14 {
            return false;
        }
        if map.is_monotone() && y <= prev {
            return false;
        }
        prev = y;
    }
    true
}

/// Feet of a map at the given points, in order.
pub fn feet(map: &BackwardMap, xs: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; xs.len()];
    for (o, &x) in out.iter_mut().zip(xs) {
        *o = map.foot(x);
    }
    out
}
