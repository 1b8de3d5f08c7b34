//! The SLDG advection step and the (unstable) direct nodal scheme.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::field::{Boundary, BoundaryExtension, DgField1D, Mesh1D};
use crate::flow::{breakpoint_row, BackwardMap};
use crate::quadbasis::NodalBasis;
use crate::{Error, Result};

/// The affine operator of one SLDG step on a fixed mesh.
///
/// Cell `i` of the output is `Σ_p B_p u_{src(p)} + a_i`, one `(k+1)×(k+1)`
/// block per piece between breakpoints; `a_i` collects boundary-extension
/// values. Building a plan once lets it act on many lines sharing a map.
#[derive(Debug, Clone)]
pub struct TransportPlan {
    mesh: Mesh1D,
    basis: Arc<NodalBasis>,
    offsets: Vec<usize>,
    /// Source cell of each piece; `None` when its feet leave the domain.
    sources: Vec<Option<usize>>,
    /// Block storage; a translation-invariant plan keeps one cell's blocks.
    blocks: Vec<f64>,
    shared: bool,
    affine: Option<Vec<f64>>,
}

struct CellBuilder<'a> {
    basis: &'a NodalBasis,
    phi_src: Vec<f64>,
    phi_dst: Vec<f64>,
}

impl<'a> CellBuilder<'a> {
    fn new(basis: &'a NodalBasis) -> Self {
        let n = basis.len();
        Self {
            basis,
            phi_src: vec![0.0; n],
            phi_dst: vec![0.0; n],
        }
    }

    /// Adds the pieces of cell `i` to `blocks`/`sources`/`affine`.
    #[allow(clippy::too_many_arguments)]
    fn cell(
        &mut self,
        mesh: &Mesh1D,
        map: &BackwardMap,
        i: usize,
        pts: &[f64],
        srcs: &[i64],
        ext: Option<&BoundaryExtension>,
        t: f64,
        blocks: &mut Vec<f64>,
        sources: &mut Vec<Option<usize>>,
        affine: &mut [f64],
    ) -> Result<()> {
        let n = self.basis.len();
        let m = mesh.cells() as i64;
        let dx = mesh.dx();
        let left = mesh.interface(i as i64);
        let nodes = self.basis.nodes();
        let weights = self.basis.weights();
        for (w, &src) in pts.windows(2).zip(srcs) {
            let len = w[1] - w[0];
            if len <= 0.0 {
                continue;
            }
            let mid = 0.5 * (w[0] + w[1]);
            let inside = match mesh.boundary() {
                Boundary::Periodic => true,
                Boundary::Extended => src >= 0 && src < m,
            };
            let src_left = mesh.interface(src);
            let start = blocks.len();
            if inside {
                blocks.resize(start + n * n, 0.0);
                sources.push(Some(src.rem_euclid(m) as usize));
            }
            for a in 0..n {
                let x = mid + 0.5 * len * nodes[a];
                let y = map.foot(x);
                if !y.is_finite() {
                    return Err(Error::NonFinite { cell: i });
                }
                self.basis.basis_values(2.0 * (x - left) / dx - 1.0, &mut self.phi_dst);
                let wt = 0.5 * len * weights[a];
                if inside {
                    self.basis.basis_values(2.0 * (y - src_left) / dx - 1.0, &mut self.phi_src);
                    let blk = &mut blocks[start..start + n * n];
                    for b in 0..n {
                        let c = wt * self.phi_dst[b];
                        for (e, p) in blk[b * n..(b + 1) * n].iter_mut().zip(&self.phi_src) {
                            *e += c * p;
                        }
                    }
                } else {
                    let e = ext.ok_or(Error::OutOfDomain { x: y })?;
                    let v = if src < 0 { (e.left)(t, y) } else { (e.right)(t, y) };
                    for b in 0..n {
                        affine[b] += wt * v * self.phi_dst[b];
                    }
                }
            }
            if inside {
                for b in 0..n {
                    let inv = 1.0 / (0.5 * dx * weights[b]);
                    blocks[start + b * n..start + (b + 1) * n]
                        .iter_mut()
                        .for_each(|e| *e *= inv);
                }
            }
        }
        for b in 0..n {
            affine[b] /= 0.5 * dx * weights[b];
        }
        Ok(())
    }
}

impl TransportPlan {
    /// Plan of `T̃` for `map`. Pure shifts on periodic meshes store one cell.
    pub fn new(
        map: &BackwardMap,
        mesh: &Mesh1D,
        basis: &Arc<NodalBasis>,
        ext: Option<&BoundaryExtension>,
        t: f64,
    ) -> Result<Self> {
        let n = basis.len();
        let m = mesh.cells();
        let mut builder = CellBuilder::new(basis);
        let mut offsets = vec![0];
        let mut sources = Vec::new();
        let mut blocks = Vec::new();
        if let (Some(s), Boundary::Periodic) = (map.as_shift(), mesh.boundary()) {
            let (pts, srcs) = shift_pieces(mesh, s);
            let mut aff = vec![0.0; n];
            builder.cell(mesh, map, 0, &pts, &srcs, None, t, &mut blocks, &mut sources, &mut aff)?;
            let rel: Vec<Option<usize>> = sources.iter().map(|s| s.map(|c| c % m)).collect();
            let per = rel.len();
            sources.clear();
            for i in 0..m {
                sources.extend(rel.iter().map(|c| c.map(|c| (c + i) % m)));
                offsets.push((i + 1) * per);
            }
            return Ok(Self {
                mesh: *mesh,
                basis: basis.clone(),
                offsets,
                sources,
                blocks,
                shared: true,
                affine: None,
            });
        }
        let bp = breakpoint_row(map, mesh)?;
        let mut affine = vec![0.0; m * n];
        for i in 0..m {
            builder.cell(
                mesh,
                map,
                i,
                bp.cell(i),
                bp.sources(i),
                ext,
                t,
                &mut blocks,
                &mut sources,
                &mut affine[i * n..(i + 1) * n],
            )?;
            offsets.push(sources.len());
        }
        let any = affine.iter().any(|&a| a != 0.0);
        Ok(Self {
            mesh: *mesh,
            basis: basis.clone(),
            offsets,
            sources,
            blocks,
            shared: false,
            affine: any.then_some(affine),
        })
    }

    pub fn mesh(&self) -> &Mesh1D {
        &self.mesh
    }

    /// Applies the plan to raw nodal values laid out as in [`DgField1D`].
    pub fn apply_slice(&self, input: &[f64], out: &mut [f64]) {
        let n = self.basis.len();
        let nn = n * n;
        for i in 0..self.mesh.cells() {
            let o = &mut out[i * n..(i + 1) * n];
            match &self.affine {
                Some(a) => o.copy_from_slice(&a[i * n..(i + 1) * n]),
                None => o.iter_mut().for_each(|v| *v = 0.0),
            }
            for p in self.offsets[i]..self.offsets[i + 1] {
                let Some(src) = self.sources[p] else { continue };
                let bi = if self.shared { p - self.offsets[i] } else { p };
                let blk = &self.blocks[bi * nn..(bi + 1) * nn];
                let u = &input[src * n..(src + 1) * n];
                for b in 0..n {
                    let row = &blk[b * n..(b + 1) * n];
                    o[b] += row.iter().zip(u).map(|(r, v)| r * v).sum::<f64>();
                }
            }
        }
    }

    pub fn apply(&self, u: &DgField1D) -> Result<DgField1D> {
        if *u.mesh() != self.mesh || u.basis().len() != self.basis.len() {
            return Err(Error::LayoutMismatch);
        }
        let mut out = DgField1D::zeros(self.mesh, u.basis().clone());
        self.apply_slice(u.coeffs(), out.coeffs_mut());
        out.check_finite()?;
        Ok(out)
    }
}

/// Breakpoints and unwrapped sources of cell 0 under `foot(x) = x + s`.
fn shift_pieces(mesh: &Mesh1D, s: f64) -> (Vec<f64>, Vec<i64>) {
    let dx = mesh.dx();
    let r = s / dx;
    let c = libm::floor(r);
    let theta = r - c;
    let (a, b) = (mesh.interface(0), mesh.interface(1));
    if theta * dx <= 1e-13 * dx || (1.0 - theta) * dx <= 1e-13 * dx {
        let c = libm::round(r) as i64;
        (vec![a, b], vec![c])
    } else {
        let x = a + (1.0 - theta) * dx;
        (vec![a, x, b], vec![c as i64, c as i64 + 1])
    }
}

/// One SLDG step: the element of `V_k` whose nodal values are
///
/// `u'_{β,i} = (1/w_β^i) Σ_q Σ_α w̃_{q,α} u(foot(x̃_{q,α})) φ_β^i(x̃_{q,α})`
///
/// where `x̃, w̃` are Gauss points and weights of the pieces between the
/// breakpoints of cell `i`. Feet outside an extended mesh read `ext` at time `t`.
pub fn advect_step(
    u: &DgField1D,
    map: &BackwardMap,
    ext: Option<&BoundaryExtension>,
    t: f64,
) -> Result<DgField1D> {
    TransportPlan::new(map, u.mesh(), u.basis(), ext, t)?.apply(u)
}

/// Direct nodal scheme `u'_{α,i} = u(foot(x_α^i))`, with no projection.
pub fn direct_step(u: &DgField1D, map: &BackwardMap) -> Result<DgField1D> {
    let mut out = u.clone();
    let n = u.basis().len();
    for i in 0..u.mesh().cells() {
        for a in 0..n {
            out.coeffs_mut()[i * n + a] = u.eval(map.foot(u.node(i, a)), 0.0, None)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{project, Mesh1D};
    use crate::flow::constant_map;
    use core::f64::consts::PI;

    fn sine(m: usize, k: usize) -> DgField1D {
        project(|x| (2.0 * PI * x).sin(), Mesh1D::periodic(0.0, 1.0, m).unwrap(), k).unwrap()
    }

    #[test]
    fn one_cell_shift_is_cyclic() {
        let u = sine(12, 3);
        let dx = u.mesh().dx();
        let v = advect_step(&u, &constant_map(1.0, dx), None, 0.0).unwrap();
        for i in 0..12 {
            let j = (i + 11) % 12;
            for a in 0..4 {
                assert!((v.cell(i)[a] - u.cell(j)[a]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn identity_step() {
        let u = sine(9, 2);
        let v = advect_step(&u, &constant_map(0.8, 0.0), None, 0.0).unwrap();
        for (a, b) in u.coeffs().iter().zip(v.coeffs()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn conservation_and_contraction() {
        let u = sine(17, 2);
        let s = 0.37 / 17.0;
        let v = advect_step(&u, &constant_map(1.0, s), None, 0.0).unwrap();
        assert!((u.integral() - v.integral()).abs() < 1e-12);
        assert!(v.norms().l2 <= u.norms().l2 + 1e-13);
    }

    #[test]
    fn extension_values_enter_from_the_left() {
        let mesh = Mesh1D::new(0.0, 1.0, 4, Boundary::Extended).unwrap();
        let u = project(|_| 1.0, mesh, 1).unwrap();
        let ext = BoundaryExtension::new(Arc::new(|_, _| 3.0), Arc::new(|_, _| -1.0));
        assert!(advect_step(&u, &constant_map(0.5, 1.0), None, 0.0).is_err());
        let v = advect_step(&u, &constant_map(0.5, 1.0), Some(&ext), 0.0).unwrap();
        assert!(v.cell(0).iter().all(|&c| (c - 3.0).abs() < 1e-13));
        assert!(v.cell(3).iter().all(|&c| (c - 1.0).abs() < 1e-13));
    }

    #[test]
    fn direct_scheme_basic() {
        let u = sine(10, 1);
        let v = direct_step(&u, &constant_map(1.0, 0.0)).unwrap();
        assert!(u.coeffs().iter().zip(v.coeffs()).all(|(a, b)| (a - b).abs() < 1e-14));
        let w = direct_step(&u, &constant_map(1.0, 0.1)).unwrap();
        for i in 0..10 {
            assert!((w.cell(i)[0] - u.cell((i + 9) % 10)[0]).abs() < 1e-14);
        }
    }

    #[test]
    fn shared_shift_plan_matches_generic() {
        let u = sine(13, 4);
        for &s in &[0.013, -0.21, 0.5 / 13.0, 2.0 / 13.0, -1.37] {
            let fast = advect_step(&u, &BackwardMap::shift(s), None, 0.0).unwrap();
            let generic = BackwardMap::new(Arc::new(move |x| x + s), 0.0, s, true);
            let slow = advect_step(&u, &generic, None, 0.0).unwrap();
            for (a, b) in fast.coeffs().iter().zip(slow.coeffs()) {
                assert!((a - b).abs() < 1e-13, "s={s}");
            }
        }
    }

    #[test]
    fn non_finite_feet_rejected() {
        let u = sine(5, 1);
        let bad = BackwardMap::new(Arc::new(|_| f64::NAN), 0.1, 0.1, true);
        assert!(matches!(advect_step(&u, &bad, None, 0.0), Err(Error::NonFinite { .. })));
    }
}
