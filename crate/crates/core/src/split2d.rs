//! Tensor-product `Q_k` fields on rectangles and dimensional splitting.
//!
//! A 2D step is a sequence of 1D sweeps: along axis 1 every line at a fixed
//! transverse Gauss ordinate `y = y_β^j` is an element of the 1D space and is
//! advanced by a 1D operator, and likewise along axis 2.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::diffusion::{branches, convex_weights, CoeffSet1D};
use crate::field::{Mesh1D, Norms};
use crate::flow::{constant_map, ode_map, BackwardMap, VelocityBounds, Window};
use crate::quadbasis::NodalBasis;
use crate::transport::TransportPlan;
use crate::{Error, Fn1, Fn2, Fn3, Result};

/// Direction of a 1D sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    /// Axis 1, the `x` direction.
    X,
    /// Axis 2, the `y` direction.
    Y,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mesh2D {
    pub x: Mesh1D,
    pub y: Mesh1D,
}

impl Mesh2D {
    pub fn new(x: Mesh1D, y: Mesh1D) -> Self {
        Self { x, y }
    }

    pub fn axis(&self, a: Axis) -> &Mesh1D {
        match a {
            Axis::X => &self.x,
            Axis::Y => &self.y,
        }
    }
}

/// Nodal `Q_k` field. The value at `(x_α^i, y_β^j)` is stored at
/// `((i·M₂ + j)·(k+1) + α)·(k+1) + β`.
#[derive(Debug, Clone)]
pub struct DgField2D {
    mesh: Mesh2D,
    basis: Arc<NodalBasis>,
    coeffs: Vec<f64>,
}

impl DgField2D {
    pub fn zeros(mesh: Mesh2D, basis: Arc<NodalBasis>) -> Self {
        let n = basis.len();
        let len = mesh.x.cells() * mesh.y.cells() * n * n;
        Self {
            mesh,
            basis,
            coeffs: vec![0.0; len],
        }
    }

    pub fn from_coeffs(mesh: Mesh2D, basis: Arc<NodalBasis>, coeffs: Vec<f64>) -> Result<Self> {
        let n = basis.len();
        if coeffs.len() != mesh.x.cells() * mesh.y.cells() * n * n {
            return Err(Error::LayoutMismatch);
        }
        Ok(Self {
            mesh,
            basis,
            coeffs,
        })
    }

    /// Nodal interpolant of `f`.
    pub fn interpolate(mesh: Mesh2D, basis: Arc<NodalBasis>, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut u = Self::zeros(mesh, basis);
        let n = u.basis.len();
        let (m1, m2) = (mesh.x.cells(), mesh.y.cells());
        for i in 0..m1 {
            for j in 0..m2 {
                for a in 0..n {
                    for b in 0..n {
                        let (x, y) = u.node(i, j, a, b);
                        let p = u.index(i, j, a, b);
                        u.coeffs[p] = f(x, y);
                    }
                }
            }
        }
        u
    }

    pub fn mesh(&self) -> &Mesh2D {
        &self.mesh
    }

    pub fn basis(&self) -> &Arc<NodalBasis> {
        &self.basis
    }

    pub fn degree(&self) -> usize {
        self.basis.degree()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, a: usize, b: usize) -> usize {
        let n = self.basis.len();
        ((i * self.mesh.y.cells() + j) * n + a) * n + b
    }

    pub fn node(&self, i: usize, j: usize, a: usize, b: usize) -> (f64, f64) {
        let t = self.basis.nodes();
        (
            self.mesh.x.map_from_reference(i, t[a]),
            self.mesh.y.map_from_reference(j, t[b]),
        )
    }

    pub fn same_layout(&self, other: &Self) -> bool {
        self.mesh == other.mesh && self.basis.len() == other.basis.len()
    }

    pub fn check_finite(&self) -> Result<()> {
        let nn = self.basis.len() * self.basis.len();
        match self.coeffs.iter().position(|v| !v.is_finite()) {
            Some(p) => Err(Error::NonFinite { cell: p / nn }),
            None => Ok(()),
        }
    }

    pub fn scale(mut self, c: f64) -> Self {
        self.coeffs.iter_mut().for_each(|v| *v *= c);
        self
    }

    pub fn axpy(&mut self, c: f64, other: &Self) -> Result<()> {
        if !self.same_layout(other) {
            return Err(Error::LayoutMismatch);
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += c * b;
        }
        Ok(())
    }

    /// Adds `g(x, y)` at every node.
    pub fn add_nodal(&mut self, g: impl Fn(f64, f64) -> f64) {
        let n = self.basis.len();
        for i in 0..self.mesh.x.cells() {
            for j in 0..self.mesh.y.cells() {
                for a in 0..n {
                    for b in 0..n {
                        let (x, y) = self.node(i, j, a, b);
                        let p = self.index(i, j, a, b);
                        self.coeffs[p] += g(x, y);
                    }
                }
            }
        }
    }

    /// Discrete integral with tensor weights.
    pub fn integral(&self) -> f64 {
        let n = self.basis.len();
        let w = self.basis.weights();
        let q = 0.25 * self.mesh.x.dx() * self.mesh.y.dx();
        self.coeffs
            .chunks(n * n)
            .map(|c| {
                let mut s = 0.0;
                for a in 0..n {
                    for b in 0..n {
                        s += w[a] * w[b] * c[a * n + b];
                    }
                }
                q * s
            })
            .sum()
    }

    pub fn norms(&self) -> Norms {
        self.norms_against(|_, _| 0.0)
    }

    /// Norms of `u − exact(t, ·, ·)`; `L²` by the nodal identity, `L¹` by the
    /// oversampled tensor rule and `L∞` on equispaced tensor samples.
    pub fn error_vs(&self, exact: impl Fn(f64, f64, f64) -> f64, t: f64) -> Norms {
        self.norms_against(|x, y| exact(t, x, y))
    }

    fn norms_against(&self, g: impl Fn(f64, f64) -> f64) -> Norms {
        let n = self.basis.len();
        let w = self.basis.weights();
        let fine = self.basis.fine_rule();
        let g_len = fine.len();
        let s_len = self.basis.samples().len();
        let q = 0.25 * self.mesh.x.dx() * self.mesh.y.dx();
        let (mx, my) = (self.mesh.x, self.mesh.y);
        let mut l1 = 0.0;
        let mut l2 = 0.0;
        let mut linf: f64 = 0.0;
        // values along x at fixed y-node, reused across reference points
        let mut partial = vec![0.0; n];
        for i in 0..mx.cells() {
            for j in 0..my.cells() {
                let c = &self.coeffs[self.index(i, j, 0, 0)..self.index(i, j, 0, 0) + n * n];
                for a in 0..n {
                    for b in 0..n {
                        let (x, y) = self.node(i, j, a, b);
                        let d = c[a * n + b] - g(x, y);
                        l2 += q * w[a] * w[b] * d * d;
                    }
                }
                for gx in 0..g_len {
                    let px = self.basis.fine_phi(gx);
                    for (b, p) in partial.iter_mut().enumerate() {
                        *p = (0..n).map(|a| px[a] * c[a * n + b]).sum();
                    }
                    let x = mx.map_from_reference(i, fine.nodes()[gx]);
                    for gy in 0..g_len {
                        let py = self.basis.fine_phi(gy);
                        let v: f64 = partial.iter().zip(py).map(|(u, p)| u * p).sum();
                        let y = my.map_from_reference(j, fine.nodes()[gy]);
                        l1 += q * fine.weights()[gx] * fine.weights()[gy] * libm::fabs(v - g(x, y));
                    }
                }
                for sx in 0..s_len {
                    let px = self.basis.sample_phi(sx);
                    for (b, p) in partial.iter_mut().enumerate() {
                        *p = (0..n).map(|a| px[a] * c[a * n + b]).sum();
                    }
                    let x = mx.map_from_reference(i, self.basis.samples()[sx]);
                    for sy in 0..s_len {
                        let py = self.basis.sample_phi(sy);
                        let v: f64 = partial.iter().zip(py).map(|(u, p)| u * p).sum();
                        let y = my.map_from_reference(j, self.basis.samples()[sy]);
                        linf = linf.max(libm::fabs(v - g(x, y)));
                    }
                }
            }
        }
        Norms {
            l1,
            l2: libm::sqrt(l2),
            linf,
        }
    }
}

/// `L²` projection onto `Q_k` with the tensor `2(k+1)`-point rule.
pub fn project_2d(f: impl Fn(f64, f64) -> f64, mesh: Mesh2D, k: usize) -> Result<DgField2D> {
    project_2d_with(f, mesh, Arc::new(NodalBasis::new(k)?))
}

pub fn project_2d_with(
    f: impl Fn(f64, f64) -> f64,
    mesh: Mesh2D,
    basis: Arc<NodalBasis>,
) -> Result<DgField2D> {
    let mut u = DgField2D::zeros(mesh, basis.clone());
    let n = basis.len();
    let fine = basis.fine_rule();
    let g_len = fine.len();
    let w = basis.weights();
    let mut vals = vec![0.0; g_len * g_len];
    let mut half = vec![0.0; g_len * n];
    for i in 0..mesh.x.cells() {
        for j in 0..mesh.y.cells() {
            for gx in 0..g_len {
                let x = mesh.x.map_from_reference(i, fine.nodes()[gx]);
                for gy in 0..g_len {
                    let y = mesh.y.map_from_reference(j, fine.nodes()[gy]);
                    let v = f(x, y);
                    if !v.is_finite() {
                        return Err(Error::NonFinite {
                            cell: i * mesh.y.cells() + j,
                        });
                    }
                    vals[gx * g_len + gy] = v;
                }
            }
            // contract y first, then x
            for gx in 0..g_len {
                for b in 0..n {
                    half[gx * n + b] = (0..g_len)
                        .map(|gy| fine.weights()[gy] * basis.fine_phi(gy)[b] * vals[gx * g_len + gy])
                        .sum::<f64>();
                }
            }
            for a in 0..n {
                for b in 0..n {
                    let s: f64 = (0..g_len)
                        .map(|gx| fine.weights()[gx] * basis.fine_phi(gx)[a] * half[gx * n + b])
                        .sum();
                    let p = u.index(i, j, a, b);
                    u.coeffs[p] = s / (w[a] * w[b]);
                }
            }
        }
    }
    Ok(u)
}

/// `Σ c_j u_j` over fields with a common layout.
pub fn lincomb_2d(terms: &[(f64, &DgField2D)]) -> Result<DgField2D> {
    let (c0, u0) = terms.first().ok_or(Error::EmptyCombination)?;
    let mut out = (*u0).clone().scale(*c0);
    for (c, u) in &terms[1..] {
        out.axpy(*c, u)?;
    }
    Ok(out)
}

/// Offset of the `(k+1)²` block of cell `cell` along `axis` in transverse
/// cell `c`.
fn block_offset(u: &DgField2D, axis: Axis, c: usize, cell: usize) -> usize {
    let nn = u.basis.len() * u.basis.len();
    match axis {
        Axis::X => (cell * u.mesh.y.cells() + c) * nn,
        Axis::Y => (c * u.mesh.y.cells() + cell) * nn,
    }
}

/// Copies the `k+1` lines of transverse cell `c` into `lines` (line `g` at
/// `g·len`), one contiguous block per cell.
fn gather(u: &DgField2D, axis: Axis, c: usize, lines: &mut [f64]) {
    let n = u.basis.len();
    let along = u.mesh.axis(axis).cells();
    let len = along * n;
    for cell in 0..along {
        let blk = &u.coeffs[block_offset(u, axis, c, cell)..][..n * n];
        for a in 0..n {
            for b in 0..n {
                // Block entry (a, b) is node a along x and node b along y.
                let (g, node) = match axis {
                    Axis::X => (b, a),
                    Axis::Y => (a, b),
                };
                lines[g * len + cell * n + node] = blk[a * n + b];
            }
        }
    }
}

fn scatter(res: &mut DgField2D, axis: Axis, c: usize, lines: &[f64]) {
    let n = res.basis.len();
    let along = res.mesh.axis(axis).cells();
    let len = along * n;
    for cell in 0..along {
        let off = block_offset(res, axis, c, cell);
        let blk = &mut res.coeffs[off..off + n * n];
        for a in 0..n {
            for b in 0..n {
                let (g, node) = match axis {
                    Axis::X => (b, a),
                    Axis::Y => (a, b),
                };
                blk[a * n + b] = lines[g * len + cell * n + node];
            }
        }
    }
}

/// Applies a 1D operator to every line along `axis`.
///
/// `step(line, z, input, out)` receives the line number `c·(k+1) + g` of the
/// transverse cell `c` and node `g`, the transverse ordinate `z`, and the
/// nodal values of the line in 1D layout.
pub fn apply_dir<F>(u: &DgField2D, axis: Axis, step: F) -> Result<DgField2D>
where
    F: Fn(usize, f64, &[f64], &mut [f64]) -> Result<()> + Sync,
{
    let n = u.basis.len();
    let along = *u.mesh.axis(axis);
    let across = *u.mesh.axis(other(axis));
    let len = along.cells() * n;
    let nodes = u.basis.nodes();
    // All k+1 lines of one transverse cell at a time.
    let run = |c: usize, input: &mut [f64], out: &mut [f64]| -> Result<()> {
        gather(u, axis, c, input);
        for g in 0..n {
            let z = across.map_from_reference(c, nodes[g]);
            step(c * n + g, z, &input[g * len..(g + 1) * len], &mut out[g * len..(g + 1) * len])?;
        }
        Ok(())
    };
    let mut res = DgField2D::zeros(u.mesh, u.basis.clone());
    #[cfg(feature = "parallel")]
    let serial = rayon::current_num_threads() == 1;
    #[cfg(not(feature = "parallel"))]
    let serial = true;
    if serial {
        let mut input = vec![0.0; n * len];
        let mut out = vec![0.0; n * len];
        for c in 0..across.cells() {
            run(c, &mut input, &mut out)?;
            scatter(&mut res, axis, c, &out);
        }
    }
    #[cfg(feature = "parallel")]
    if !serial {
        use rayon::prelude::*;
        let outs: Vec<Vec<f64>> = (0..across.cells())
            .into_par_iter()
            .map_init(
                || vec![0.0; n * len],
                |input, c| {
                    let mut out = vec![0.0; n * len];
                    run(c, input, &mut out).map(|_| out)
                },
            )
            .collect::<Result<_>>()?;
        for (c, out) in outs.iter().enumerate() {
            scatter(&mut res, axis, c, out);
        }
    }
    res.check_finite()?;
    Ok(res)
}

/// Applies one plan to every line along `axis`.
pub fn apply_plan(u: &DgField2D, axis: Axis, plan: &TransportPlan) -> Result<DgField2D> {
    if plan.mesh() != u.mesh.axis(axis) {
        return Err(Error::LayoutMismatch);
    }
    apply_dir(u, axis, |_, _, input, out| {
        plan.apply_slice(input, out);
        Ok(())
    })
}

/// Which composition of the two directional operators to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SplitKind {
    Trotter,
    Strang,
    Ruth3,
    Forest4,
    Yoshida6,
}

/// Stages `(axis, θ)` in application order; a stage advances its axis by `θ·dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitSchedule {
    pub stages: Vec<(Axis, f64)>,
}

impl SplitSchedule {
    /// Sums of coefficients per axis.
    pub fn axis_sums(&self) -> [f64; 2] {
        let mut s = [0.0; 2];
        for &(a, c) in &self.stages {
            s[a.index()] += c;
        }
        s
    }

    /// Concatenates `parts` scaled by their weights, merging adjacent stages
    /// on the same axis.
    fn compose(parts: &[(f64, &SplitSchedule)]) -> Self {
        let mut stages: Vec<(Axis, f64)> = Vec::new();
        for (w, s) in parts {
            for &(a, c) in &s.stages {
                match stages.last_mut() {
                    Some(last) if last.0 == a => last.1 += w * c,
                    _ => stages.push((a, w * c)),
                }
            }
        }
        Self { stages }
    }
}

/// `γ₁ = 1/(2 − 2^{1/3})`, `γ₂ = 1 − 2γ₁`.
pub fn forest_gammas() -> (f64, f64) {
    let g1 = 1.0 / (2.0 - libm::cbrt(2.0));
    (g1, 1.0 - 2.0 * g1)
}

/// `y₁ = 1/(2 − 2^{1/5})`, `y₂ = 1 − 2y₁`.
pub fn yoshida_weights() -> (f64, f64) {
    let y1 = 1.0 / (2.0 - libm::pow(2.0, 0.2));
    (y1, 1.0 - 2.0 * y1)
}

pub fn schedule(kind: SplitKind) -> SplitSchedule {
    use Axis::{X, Y};
    let stages = match kind {
        SplitKind::Trotter => vec![(X, 1.0), (Y, 1.0)],
        SplitKind::Strang => vec![(X, 0.5), (Y, 1.0), (X, 0.5)],
        SplitKind::Ruth3 => {
            // T¹_{c1} T²_{d1} T¹_{c2} T²_{d2} T¹_{c3} T²_{d3}, rightmost first
            let c = [7.0 / 24.0, 0.75, -1.0 / 24.0];
            let d = [2.0 / 3.0, -2.0 / 3.0, 1.0];
            vec![(Y, d[2]), (X, c[2]), (Y, d[1]), (X, c[1]), (Y, d[0]), (X, c[0])]
        }
        SplitKind::Forest4 => {
            let (g1, g2) = forest_gammas();
            let strang = schedule(SplitKind::Strang);
            return SplitSchedule::compose(&[(g1, &strang), (g2, &strang), (g1, &strang)]);
        }
        SplitKind::Yoshida6 => {
            let (y1, y2) = yoshida_weights();
            let f = schedule(SplitKind::Forest4);
            return SplitSchedule::compose(&[(y1, &f), (y2, &f), (y1, &f)]);
        }
    };
    SplitSchedule { stages }
}

/// Backward maps of the 1D flows of a 2D transport problem, one per line.
pub trait LineFlows: Sync {
    /// Map of axis `axis` over time `tau` (possibly negative) on the line at
    /// transverse ordinate `z`.
    fn line_map(&self, axis: Axis, z: f64, tau: f64) -> Result<BackwardMap>;
}

/// Velocity field `(b₁(x, y), b₂(x, y))` traced with RK4 along each line.
#[derive(Clone)]
pub struct VelocityField2D {
    pub b1: Fn2,
    pub b2: Fn2,
    pub bounds: [VelocityBounds; 2],
}

impl LineFlows for VelocityField2D {
    fn line_map(&self, axis: Axis, z: f64, tau: f64) -> Result<BackwardMap> {
        let v: Fn1 = match axis {
            Axis::X => {
                let b = self.b1.clone();
                Arc::new(move |x| b(x, z))
            }
            Axis::Y => {
                let b = self.b2.clone();
                Arc::new(move |y| b(z, y))
            }
        };
        Ok(ode_map(v, tau, self.bounds[axis.index()], None))
    }
}

/// Velocity constant along every line: `b₁ = b₁(y)`, `b₂ = b₂(x)`.
#[derive(Clone)]
pub struct ShearField2D {
    pub b1: Fn1,
    pub b2: Fn1,
}

impl LineFlows for ShearField2D {
    fn line_map(&self, axis: Axis, z: f64, tau: f64) -> Result<BackwardMap> {
        let b = match axis {
            Axis::X => (self.b1)(z),
            Axis::Y => (self.b2)(z),
        };
        Ok(constant_map(b, tau))
    }
}

/// One split transport step of length `dt`.
pub fn split_advect(
    u: &DgField2D,
    flows: &dyn LineFlows,
    dt: f64,
    sched: &SplitSchedule,
) -> Result<DgField2D> {
    let mut cur = u.clone();
    for &(axis, theta) in &sched.stages {
        let mesh = *u.mesh.axis(axis);
        let basis = u.basis.clone();
        cur = apply_dir(&cur, axis, |_, z, input, out| {
            let map = flows.line_map(axis, z, theta * dt)?;
            TransportPlan::new(&map, &mesh, &basis, None, 0.0)?.apply_slice(input, out);
            Ok(())
        })?;
    }
    Ok(cur)
}

/// Line plans of every stage of a split step, for autonomous flows applied
/// over many steps. Stages with equal axis and coefficient share plans.
#[derive(Debug, Clone)]
pub struct SplitPlans {
    stages: Vec<(Axis, usize)>,
    plans: Vec<Vec<TransportPlan>>,
}

impl SplitPlans {
    pub fn new(
        mesh: &Mesh2D,
        basis: &Arc<NodalBasis>,
        flows: &dyn LineFlows,
        dt: f64,
        sched: &SplitSchedule,
    ) -> Result<Self> {
        let n = basis.len();
        let mut keys: Vec<(Axis, f64)> = Vec::new();
        let mut stages = Vec::with_capacity(sched.stages.len());
        for &(a, c) in &sched.stages {
            let id = match keys.iter().position(|&(b, d)| b == a && d == c) {
                Some(id) => id,
                None => {
                    keys.push((a, c));
                    keys.len() - 1
                }
            };
            stages.push((a, id));
        }
        let mut plans = Vec::with_capacity(keys.len());
        for &(a, c) in &keys {
            let along = *mesh.axis(a);
            let across = match a {
                Axis::X => mesh.y,
                Axis::Y => mesh.x,
            };
            let build = |line: usize| -> Result<TransportPlan> {
                let z = across.map_from_reference(line / n, basis.nodes()[line % n]);
                let map = flows.line_map(a, z, c * dt)?;
                TransportPlan::new(&map, &along, basis, None, 0.0)
            };
            let lines = across.cells() * n;
            #[cfg(feature = "parallel")]
            let row: Vec<TransportPlan> = {
                use rayon::prelude::*;
                (0..lines).into_par_iter().map(build).collect::<Result<_>>()?
            };
            #[cfg(not(feature = "parallel"))]
            let row: Vec<TransportPlan> = (0..lines).map(build).collect::<Result<_>>()?;
            plans.push(row);
        }
        Ok(Self { stages, plans })
    }

    pub fn apply(&self, u: &DgField2D) -> Result<DgField2D> {
        let mut cur = u.clone();
        for &(axis, id) in &self.stages {
            let row = &self.plans[id];
            if row.len() != u.basis.len() * u.mesh.axis(other(axis)).cells()
                || row.first().map(|p| p.mesh()) != Some(u.mesh.axis(axis))
            {
                return Err(Error::LayoutMismatch);
            }
            cur = apply_dir(&cur, axis, |line, _, input, out| {
                row[line].apply_slice(input, out);
                Ok(())
            })?;
        }
        Ok(cur)
    }
}

fn other(a: Axis) -> Axis {
    match a {
        Axis::X => Axis::Y,
        Axis::Y => Axis::X,
    }
}

/// One entry of a diffusion or drift vector.
#[derive(Clone)]
pub enum Component {
    Zero,
    Const(f64),
    /// Depends on `x` only.
    OfX(Fn1),
    /// Depends on `y` only.
    OfY(Fn1),
}

impl Component {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            Component::Zero => 0.0,
            Component::Const(c) => *c,
            Component::OfX(f) => f(x),
            Component::OfY(f) => f(y),
        }
    }

    fn is_zero(&self) -> bool {
        matches!(self, Component::Zero) || matches!(self, Component::Const(c) if *c == 0.0)
    }

    /// The entry as a function of the coordinate of `axis`, if it depends on
    /// nothing else.
    fn along(&self, axis: Axis) -> Option<Fn1> {
        match (self, axis) {
            (Component::Zero, _) => Some(Arc::new(|_| 0.0)),
            (Component::Const(c), _) => {
                let c = *c;
                Some(Arc::new(move |_| c))
            }
            (Component::OfX(f), Axis::X) | (Component::OfY(f), Axis::Y) => Some(f.clone()),
            _ => None,
        }
    }
}

impl core::fmt::Debug for Component {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Component::Zero => f.write_str("Zero"),
            Component::Const(c) => write!(f, "Const({c})"),
            Component::OfX(_) => f.write_str("OfX"),
            Component::OfY(_) => f.write_str("OfY"),
        }
    }
}

/// A column `σ_q` of the diffusion matrix with its drift `B_q`.
///
/// Component `a` of both vectors may depend on coordinate `a` only, so each
/// branch map of the weak scheme splits into one map per axis.
#[derive(Clone, Debug)]
pub struct DiffusionDirection {
    pub sigma: [Component; 2],
    pub drift: [Component; 2],
}

impl DiffusionDirection {
    pub fn new(sigma: [Component; 2]) -> Self {
        Self {
            sigma,
            drift: [Component::Zero, Component::Zero],
        }
    }

    pub fn with_drift(mut self, drift: [Component; 2]) -> Self {
        self.drift = drift;
        self
    }

    fn check(&self) -> Result<()> {
        for a in [Axis::X, Axis::Y] {
            let i = a.index();
            if self.sigma[i].along(a).is_none() || self.drift[i].along(a).is_none() {
                return Err(Error::Unsupported("direction does not factorize per axis"));
            }
        }
        Ok(())
    }
}

/// Columns of `σ = [[σ₁₁, σ₁₂], [σ₂₁, σ₂₂]]` (rows indexed first), so that
/// `σσᵀ = Σ_q σ_q σ_qᵀ`.
pub fn decompose_diffusion(sigma: [[Component; 2]; 2]) -> Result<[DiffusionDirection; 2]> {
    let [[s11, s12], [s21, s22]] = sigma;
    let dirs = [
        DiffusionDirection::new([s11, s21]),
        DiffusionDirection::new([s12, s22]),
    ];
    for d in &dirs {
        d.check()?;
    }
    Ok(dirs)
}

/// Precomputed branch plans of one weak step along a [`DiffusionDirection`].
///
/// Branch `q` moves axis 1 by the first component of its characteristic and
/// then axis 2 by the second, with the same `q`; the results are averaged with
/// the branch weights. One plan per axis and branch serves every line.
#[derive(Debug, Clone)]
pub struct WeakPlans2D {
    weights: Vec<f64>,
    plans: [Option<Vec<TransportPlan>>; 2],
}

impl WeakPlans2D {
    pub fn new(
        mesh: &Mesh2D,
        basis: &Arc<NodalBasis>,
        dir: &DiffusionDirection,
        dt: f64,
        order: usize,
    ) -> Result<Self> {
        dir.check()?;
        let mut weights = Vec::new();
        let mut plans: [Option<Vec<TransportPlan>>; 2] = [None, None];
        for a in [Axis::X, Axis::Y] {
            let i = a.index();
            if dir.sigma[i].is_zero() && dir.drift[i].is_zero() {
                continue;
            }
            let (b, s) = match (dir.drift[i].along(a), dir.sigma[i].along(a)) {
                (Some(b), Some(s)) => (b, s),
                _ => return Err(Error::Unsupported("direction does not factorize per axis")),
            };
            let m = *mesh.axis(a);
            let family = branches(
                &CoeffSet1D::new(b, s, 0.0),
                dt,
                order,
                Window::new(m.x_min(), m.x_max()),
            )?;
            weights = family.iter().map(|br| br.weight).collect();
            let mut ps = Vec::with_capacity(family.len());
            for br in &family {
                ps.push(TransportPlan::new(&br.map, &m, basis, None, 0.0)?);
            }
            plans[i] = Some(ps);
        }
        Ok(Self { weights, plans })
    }

    pub fn apply(&self, u: &DgField2D) -> Result<DgField2D> {
        if self.weights.is_empty() {
            return Ok(u.clone());
        }
        let mut acc: Option<DgField2D> = None;
        for (q, &w) in self.weights.iter().enumerate() {
            let mut v = u.clone();
            for a in [Axis::X, Axis::Y] {
                if let Some(ps) = &self.plans[a.index()] {
                    v = apply_plan(&v, a, &ps[q])?;
                }
            }
            match acc.as_mut() {
                Some(s) => s.axpy(w, &v)?,
                None => acc = Some(v.scale(w)),
            }
        }
        acc.ok_or(Error::EmptyCombination)
    }
}

/// Weak Euler (`order = 1`) or Platen (`order = 2`) step of
/// `u_t − ½Tr(σ_q σ_qᵀ D²u) + B_q·∇u = 0`; see [`WeakPlans2D`].
pub fn weak_step_2d(
    u: &DgField2D,
    dir: &DiffusionDirection,
    dt: f64,
    order: usize,
) -> Result<DgField2D> {
    WeakPlans2D::new(&u.mesh, &u.basis, dir, dt, order)?.apply(u)
}

/// `Π S⁰ u` for a constant direction `s`, where
/// `S⁰u(x) = ½(u(x − s√Δt) + u(x + s√Δt))` and each shift is an axis-1 sweep
/// followed by an axis-2 sweep.
pub fn shift_average_2d(u: &DgField2D, s: [f64; 2], dt: f64) -> Result<DgField2D> {
    let h = libm::sqrt(dt);
    let mut parts = Vec::with_capacity(2);
    for sign in [-1.0, 1.0] {
        let mut v = u.clone();
        for a in [Axis::X, Axis::Y] {
            let d = sign * s[a.index()] * h;
            if d != 0.0 {
                let plan = TransportPlan::new(&BackwardMap::shift(d), u.mesh.axis(a), &u.basis, None, 0.0)?;
                v = apply_plan(&v, a, &plan)?;
            }
        }
        parts.push(v);
    }
    lincomb_2d(&[(0.5, &parts[0]), (0.5, &parts[1])])
}

/// SLDG-p (`p = 1, 2, 3`) for the constant direction `s`, the 2D analogue of
/// [`crate::diffusion::sldg_const`].
pub fn sldg_const_2d(u: &DgField2D, s: [f64; 2], dt: f64, p: usize) -> Result<DgField2D> {
    let c = convex_weights(p)?;
    let mut powers = Vec::with_capacity(c.len());
    powers.push(u.clone());
    for j in 1..c.len() {
        let next = shift_average_2d(&powers[j - 1], s, dt)?;
        powers.push(next);
    }
    let terms: Vec<(f64, &DgField2D)> = c
        .iter()
        .zip(&powers)
        .filter(|(w, _)| **w != 0.0)
        .map(|(w, f)| (*w, f))
        .collect();
    lincomb_2d(&terms)
}

/// Source `f(t, x, y)` of a 2D diffusion problem, with the derivatives the
/// second-order correction needs.
#[derive(Clone)]
pub struct SourceSpec2D {
    pub f: Fn3,
    pub f_t: Option<Fn3>,
    pub f_xx: Option<Fn3>,
    pub f_xy: Option<Fn3>,
    pub f_yy: Option<Fn3>,
}

/// Adds `h f` and, for `order = 2`, `(h²/2)(½Tr(σσᵀD²f) + f_t)` at every node,
/// all evaluated at `t_n`. `dirs` are the columns of `σ`.
pub fn source_correct_2d(
    u: &DgField2D,
    src: &SourceSpec2D,
    dirs: &[DiffusionDirection],
    t_n: f64,
    dt: f64,
    order: usize,
) -> Result<DgField2D> {
    let second = match order {
        1 => None,
        2 => match (&src.f_t, &src.f_xx, &src.f_xy, &src.f_yy) {
            (Some(a), Some(b), Some(c), Some(d)) => Some((a, b, c, d)),
            _ => return Err(Error::MissingDerivatives),
        },
        _ => return Err(Error::InvalidArgument("correction order must be 1 or 2")),
    };
    let mut out = u.clone();
    out.add_nodal(|x, y| {
        let mut add = dt * (src.f)(t_n, x, y);
        if let Some((ft, fxx, fxy, fyy)) = second {
            let (mut a11, mut a12, mut a22) = (0.0, 0.0, 0.0);
            for d in dirs {
                let (s1, s2) = (d.sigma[0].eval(x, y), d.sigma[1].eval(x, y));
                a11 += s1 * s1;
                a12 += s1 * s2;
                a22 += s2 * s2;
            }
            let tr = a11 * fxx(t_n, x, y) + 2.0 * a12 * fxy(t_n, x, y) + a22 * fyy(t_n, x, y);
            add += 0.5 * dt * dt * (0.5 * tr + ft(t_n, x, y));
        }
        add
    });
    Ok(out)
}
