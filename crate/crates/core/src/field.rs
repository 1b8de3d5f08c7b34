//! Uniform 1D meshes and nodal DG fields.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::quadbasis::NodalBasis;
use crate::{Error, Fn2, Result};

/// Treatment of points outside `[x_min, x_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Points are wrapped by the period `x_max − x_min`.
    Periodic,
    /// Points outside the domain take values from a [`BoundaryExtension`].
    Extended,
}

/// Uniform mesh of `cells` intervals on `[x_min, x_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mesh1D {
    x_min: f64,
    x_max: f64,
    cells: usize,
    boundary: Boundary,
}

impl Mesh1D {
    pub fn new(x_min: f64, x_max: f64, cells: usize, boundary: Boundary) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_min >= x_max {
            return Err(Error::InvalidMesh("need finite x_min < x_max"));
        }
        if cells == 0 {
            return Err(Error::InvalidMesh("need at least one cell"));
        }
        Ok(Self {
            x_min,
            x_max,
            cells,
            boundary,
        })
    }

    pub fn periodic(x_min: f64, x_max: f64, cells: usize) -> Result<Self> {
        Self::new(x_min, x_max, cells, Boundary::Periodic)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.length() / self.cells as f64
    }

    /// Interface `x_{i−1/2} = x_min + i·Δx`; `i` may lie outside `0..=M`.
    pub fn interface(&self, i: i64) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    /// Maps `x` into `[x_min, x_max)` by one periodic wrap.
    pub fn wrap(&self, x: f64) -> f64 {
        let p = self.length();
        x - p * libm::floor((x - self.x_min) / p)
    }

    /// Cell owning `x ∈ [x_min, x_max]` and the reference coordinate of `x`
    /// in it. A point on an interior interface belongs to the cell on its left.
    pub fn locate(&self, x: f64) -> Option<(usize, f64)> {
        if !(x >= self.x_min && x <= self.x_max) {
            return None;
        }
        let dx = self.dx();
        let s = (x - self.x_min) / dx;
        let mut i = libm::ceil(s) as i64 - 1;
        if i < 0 {
            i = 0;
        }
        let i = (i as usize).min(self.cells - 1);
        let t = 2.0 * (x - self.interface(i as i64)) / dx - 1.0;
        Some((i, t))
    }

    /// Global position of reference point `t` in cell `i`.
    pub fn map_from_reference(&self, i: usize, t: f64) -> f64 {
        self.interface(i as i64) + (1.0 + t) * 0.5 * self.dx()
    }
}

/// Values used by an [`Boundary::Extended`] mesh outside its domain.
#[derive(Clone)]
pub struct BoundaryExtension {
    /// `(t, x) ↦ u_ℓ` for `x ≤ x_min`.
    pub left: Fn2,
    /// `(t, x) ↦ u_r` for `x ≥ x_max`.
    pub right: Fn2,
}

impl BoundaryExtension {
    pub fn new(left: Fn2, right: Fn2) -> Self {
        Self { left, right }
    }

    /// Extension with `u(t, x)` replaced by `u(t, x + s)`; used when the data
    /// about to be sampled is itself a transported copy.
    pub fn shifted(&self, s: f64) -> Self {
        let (l, r) = (self.left.clone(), self.right.clone());
        Self {
            left: Arc::new(move |t, x| l(t, x + s)),
            right: Arc::new(move |t, x| r(t, x + s)),
        }
    }
}

impl core::fmt::Debug for BoundaryExtension {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("BoundaryExtension")
    }
}

/// `(L¹, L², L∞)` triple.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Norms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

/// Element of `V_k` on a [`Mesh1D`], stored as nodal values
/// `coeffs[i·(k+1) + α] = u(x_α^i)`.
#[derive(Debug, Clone)]
pub struct DgField1D {
    mesh: Mesh1D,
    basis: Arc<NodalBasis>,
    coeffs: Vec<f64>,
}

impl PartialEq for DgField1D {
    fn eq(&self, other: &Self) -> bool {
        self.same_layout(other) && self.coeffs == other.coeffs
    }
}

impl DgField1D {
    pub fn zeros(mesh: Mesh1D, basis: Arc<NodalBasis>) -> Self {
        let coeffs = vec![0.0; mesh.cells() * basis.len()];
        Self {
            mesh,
            basis,
            coeffs,
        }
    }

    pub fn from_coeffs(mesh: Mesh1D, basis: Arc<NodalBasis>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != mesh.cells() * basis.len() {
            return Err(Error::LayoutMismatch);
        }
        Ok(Self {
            mesh,
            basis,
            coeffs,
        })
    }

    /// Nodal interpolant of `f` (no projection).
    pub fn interpolate(mesh: Mesh1D, basis: Arc<NodalBasis>, f: impl Fn(f64) -> f64) -> Self {
        let mut u = Self::zeros(mesh, basis);
        let n = u.basis.len();
        for i in 0..mesh.cells() {
            for a in 0..n {
                u.coeffs[i * n + a] = f(u.node(i, a));
            }
        }
        u
    }

    pub fn mesh(&self) -> &Mesh1D {
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

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn cell(&self, i: usize) -> &[f64] {
        let n = self.basis.len();
        &self.coeffs[i * n..(i + 1) * n]
    }

    /// Mapped Gauss node `x_α^i`.
    pub fn node(&self, i: usize, alpha: usize) -> f64 {
        self.mesh.map_from_reference(i, self.basis.nodes()[alpha])
    }

    /// Nodal weight `w_α^i = (Δx/2) w_α`.
    pub fn weight(&self, alpha: usize) -> f64 {
        0.5 * self.mesh.dx() * self.basis.weights()[alpha]
    }

    pub fn same_layout(&self, other: &Self) -> bool {
        self.mesh == other.mesh
            && (Arc::ptr_eq(&self.basis, &other.basis) || self.basis == other.basis)
    }

    /// Index of the first cell holding a non-finite coefficient.
    pub fn first_non_finite(&self) -> Option<usize> {
        self.coeffs
            .iter()
            .position(|v| !v.is_finite())
            .map(|p| p / self.basis.len())
    }

    pub fn check_finite(&self) -> Result<()> {
        match self.first_non_finite() {
            Some(cell) => Err(Error::NonFinite { cell }),
            None => Ok(()),
        }
    }

    /// Value of the cell polynomial at `x`.
    pub fn eval(&self, x: f64, t: f64, ext: Option<&BoundaryExtension>) -> Result<f64> {
        let m = &self.mesh;
        let x = match m.boundary() {
            Boundary::Periodic => m.wrap(x),
            Boundary::Extended => {
                if x < m.x_min() || x > m.x_max() {
                    let e = ext.ok_or(Error::OutOfDomain { x })?;
                    let v = if x < m.x_min() {
                        (e.left)(t, x)
                    } else {
                        (e.right)(t, x)
                    };
                    return Ok(v);
                }
                x
            }
        };
        let (i, s) = m.locate(x).ok_or(Error::OutOfDomain { x })?;
        Ok(self.basis.eval(self.cell(i), s))
    }

    /// Value of the polynomial of cell `i` extended to reference coordinate `t`.
    pub fn eval_in_cell(&self, i: usize, t: f64) -> f64 {
        self.basis.eval(self.cell(i), t)
    }

    /// `(L¹, L², L∞)` of the field.
    pub fn norms(&self) -> Norms {
        self.norms_against(|_| 0.0)
    }

    /// Norms of `u − exact(t, ·)`.
    pub fn error_vs(&self, exact: impl Fn(f64, f64) -> f64, t: f64) -> Norms {
        self.norms_against(|x| exact(t, x))
    }

    /// `L²` norm of `u − exact(t, ·)` by the `2(k+1)` point rule rather than
    /// the nodal identity; the two differ only through the error of `exact`.
    pub fn l2_error_oversampled(&self, exact: impl Fn(f64, f64) -> f64, t: f64) -> f64 {
        let half = 0.5 * self.mesh.dx();
        let fine = self.basis.fine_rule();
        let mut s = 0.0;
        for i in 0..self.mesh.cells() {
            let c = self.cell(i);
            for (q, (&r, &w)) in fine.nodes().iter().zip(fine.weights()).enumerate() {
                let v: f64 = self.basis.fine_phi(q).iter().zip(c).map(|(p, u)| p * u).sum();
                let d = v - exact(t, self.mesh.map_from_reference(i, r));
                s += half * w * d * d;
            }
        }
        libm::sqrt(s)
    }

    fn norms_against(&self, g: impl Fn(f64) -> f64) -> Norms {
        let n = self.basis.len();
        let half = 0.5 * self.mesh.dx();
        let fine = self.basis.fine_rule();
        let mut l1 = 0.0;
        let mut l2 = 0.0;
        let mut linf: f64 = 0.0;
        for i in 0..self.mesh.cells() {
            let c = self.cell(i);
            for a in 0..n {
                let d = c[a] - g(self.node(i, a));
                l2 += half * self.basis.weights()[a] * d * d;
            }
            for (q, (&t, &w)) in fine.nodes().iter().zip(fine.weights()).enumerate() {
                let v: f64 = self.basis.fine_phi(q).iter().zip(c).map(|(p, u)| p * u).sum();
                l1 += half * w * libm::fabs(v - g(self.mesh.map_from_reference(i, t)));
            }
            for (j, &t) in self.basis.samples().iter().enumerate() {
                let v: f64 = self.basis.sample_phi(j).iter().zip(c).map(|(p, u)| p * u).sum();
                linf = linf.max(libm::fabs(v - g(self.mesh.map_from_reference(i, t))));
            }
        }
        Norms {
            l1,
            l2: libm::sqrt(l2),
            linf,
        }
    }

    /// Discrete integral `Σ w_α^i u_{α,i}`.
    pub fn integral(&self) -> f64 {
        let n = self.basis.len();
        let mut s = 0.0;
        for i in 0..self.mesh.cells() {
            for a in 0..n {
                s += self.weight(a) * self.coeffs[i * n + a];
            }
        }
        s
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale(mut self, c: f64) -> Self {
        self.coeffs.iter_mut().for_each(|v| *v *= c);
        self
    }

    /// `self += c·other`.
    pub fn axpy(&mut self, c: f64, other: &Self) -> Result<()> {
        if !self.same_layout(other) {
            return Err(Error::LayoutMismatch);
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += c * b;
        }
        Ok(())
    }
}

/// `L²` projection of `f` onto `V_k`, computed cell by cell with the
/// `2(k+1)` point rule.
pub fn project(f: impl Fn(f64) -> f64, mesh: Mesh1D, k: usize) -> Result<DgField1D> {
    project_with(f, mesh, Arc::new(NodalBasis::new(k)?))
}

/// As [`project`] with a shared basis.
pub fn project_with(
    f: impl Fn(f64) -> f64,
    mesh: Mesh1D,
    basis: Arc<NodalBasis>,
) -> Result<DgField1D> {
    let mut u = DgField1D::zeros(mesh, basis);
    let n = u.basis.len();
    let fine = u.basis.fine_rule().clone();
    for i in 0..mesh.cells() {
        let mut acc = vec![0.0; n];
        for (q, (&t, &w)) in fine.nodes().iter().zip(fine.weights()).enumerate() {
            let v = f(mesh.map_from_reference(i, t));
            if !v.is_finite() {
                return Err(Error::NonFinite { cell: i });
            }
            for (a, p) in u.basis.fine_phi(q).iter().enumerate() {
                acc[a] += w * v * p;
            }
        }
        for a in 0..n {
            u.coeffs[i * n + a] = acc[a] / u.basis.weights()[a];
        }
    }
    Ok(u)
}

/// `Σ c_j u_j` over fields sharing mesh and degree.
pub fn lincomb(terms: &[(f64, &DgField1D)]) -> Result<DgField1D> {
    let (c0, u0) = terms.first().ok_or(Error::EmptyCombination)?;
    let mut out = (*u0).clone().scale(*c0);
    for (c, u) in &terms[1..] {
        out.axpy(*c, u)?;
    }
    Ok(out)
}
