//! NURBS patches, rational basis evaluation with second derivatives,
//! quadrature precomputation, and the shell model container shared by
//! assembly and the solvers.

pub mod bspline;
mod mesh;

pub use mesh::{make_cnt, make_disk, make_square_plate, cnt_radius, chiral_angle};

use crate::geometry::{self, Pt3, RefPointData, Vec3};
use crate::linalg::GaussRule;
use crate::material::MaterialParams;
use crate::{CoreError, Result};
use std::collections::BTreeMap;

/// Tensor-product NURBS patch. Both knot vectors are open; closed
/// directions (the CNT circumference) are realized by sharing control
/// points through the model's global map plus continuity penalties.
#[derive(Debug, Clone)]
pub struct NurbsPatch {
    pub degree_u: usize,
    pub degree_v: usize,
    pub knots_u: Vec<f64>,
    pub knots_v: Vec<f64>,
    /// control net dimensions; control point (i, j) lives at `j * n_u + i`
    pub n_u: usize,
    pub n_v: usize,
    /// patch-local reference control points
    pub ctrl: Vec<Pt3>,
    pub weights: Vec<f64>,
    /// nonzero knot spans as (span_u, span_v, u0, u1, v0, v1)
    pub elements: Vec<PatchElement>,
}

#[derive(Debug, Clone, Copy)]
pub struct PatchElement {
    pub span_u: usize,
    pub span_v: usize,
    pub u0: f64,
    pub u1: f64,
    pub v0: f64,
    pub v1: f64,
}

/// Rational basis values and parametric derivatives over the support of one
/// element at one evaluation point.
#[derive(Debug, Clone)]
pub struct PatchBasis {
    /// patch-local control point indices, (p+1)(q+1) entries
    pub cps: Vec<usize>,
    pub n: Vec<f64>,
    pub du: Vec<f64>,
    pub dv: Vec<f64>,
    pub duu: Vec<f64>,
    pub duv: Vec<f64>,
    pub dvv: Vec<f64>,
}

impl PatchBasis {
    pub fn slice(&self) -> geometry::BasisSlice<'_> {
        geometry::BasisSlice {
            n: &self.n,
            d1: [&self.du, &self.dv],
            d2: [&self.duu, &self.duv, &self.dvv],
        }
    }
}

impl NurbsPatch {
    pub fn new(
        degree_u: usize,
        degree_v: usize,
        knots_u: Vec<f64>,
        knots_v: Vec<f64>,
        ctrl: Vec<Pt3>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        let n_u = knots_u.len() - degree_u - 1;
        let n_v = knots_v.len() - degree_v - 1;
        if ctrl.len() != n_u * n_v || weights.len() != ctrl.len() {
            return Err(CoreError::InvalidMesh(format!(
                "control net {}x{} does not match {} points",
                n_u,
                n_v,
                ctrl.len()
            )));
        }
        if degree_u < 2 || degree_v < 2 {
            return Err(CoreError::InvalidMesh(
                "rotation-free shells need degree >= 2 in both directions".into(),
            ));
        }
        if weights.iter().any(|&w| w <= 0.0) {
            return Err(CoreError::InvalidMesh("weights must be positive".into()));
        }
        let spans_of = |knots: &[f64]| -> Vec<(usize, f64, f64)> {
            (0..knots.len() - 1)
                .filter(|&s| knots[s + 1] > knots[s])
                .map(|s| (s, knots[s], knots[s + 1]))
                .collect()
        };
        let mut elements = Vec::new();
        for &(sv, v0, v1) in &spans_of(&knots_v) {
            for &(su, u0, u1) in &spans_of(&knots_u) {
                elements.push(PatchElement { span_u: su, span_v: sv, u0, u1, v0, v1 });
            }
        }
        Ok(NurbsPatch { degree_u, degree_v, knots_u, knots_v, n_u, n_v, ctrl, weights, elements })
    }

    /// Rational basis with first and second parametric derivatives at a
    /// point inside `elem`.
    pub fn basis_eval(&self, elem: usize, u: f64, v: f64) -> Result<PatchBasis> {
        let e = &self.elements[elem];
        if !(e.u0 - 1e-12..=e.u1 + 1e-12).contains(&u) || !(e.v0 - 1e-12..=e.v1 + 1e-12).contains(&v)
        {
            return Err(CoreError::InvalidMesh(format!(
                "evaluation point ({u}, {v}) outside element box"
            )));
        }
        Ok(self.basis_at_spans(e.span_u, e.span_v, u, v))
    }

    /// Rational basis at arbitrary (u, v), choosing spans by lookup. For
    /// points at repeated interior knots, `side` picks the left (-1) or
    /// right (+1) limit span.
    pub fn basis_at(&self, u: f64, v: f64, side_u: i8, side_v: i8) -> PatchBasis {
        let su = self.pick_span(&self.knots_u, self.degree_u, u, side_u);
        let sv = self.pick_span(&self.knots_v, self.degree_v, v, side_v);
        self.basis_at_spans(su, sv, u, v)
    }

    fn pick_span(&self, knots: &[f64], degree: usize, t: f64, side: i8) -> usize {
        let mut s = bspline::find_span(knots, degree, t);
        if side < 0 {
            // step to the span ending at t when t is an interior knot
            while s > degree && (knots[s] - t).abs() < 1e-14 {
                s -= 1;
                while s > degree && knots[s + 1] <= knots[s] {
                    s -= 1;
                }
            }
        }
        // skip zero-length spans upward
        while knots[s + 1] <= knots[s] {
            s += 1;
        }
        s
    }

    fn basis_at_spans(&self, span_u: usize, span_v: usize, u: f64, v: f64) -> PatchBasis {
        let p = self.degree_u;
        let q = self.degree_v;
        let bu = bspline::basis_ders(&self.knots_u, p, span_u, u, 2);
        let bv = bspline::basis_ders(&self.knots_v, q, span_v, v, 2);
        let n_sup = (p + 1) * (q + 1);
        let mut cps = Vec::with_capacity(n_sup);
        let mut bw = [vec![0.0; n_sup], vec![0.0; n_sup], vec![0.0; n_sup],
                      vec![0.0; n_sup], vec![0.0; n_sup], vec![0.0; n_sup]];
        // weighted bivariate numerators: value, d_u, d_v, d_uu, d_uv, d_vv
        let mut wsum = [0.0; 6];
        for b in 0..=q {
            for a in 0..=p {
                let l = b * (p + 1) + a;
                let i = span_u - p + a;
                let j = span_v - q + b;
                let cp = j * self.n_u + i;
                cps.push(cp);
                let w = self.weights[cp];
                let vals = [
                    bu[0][a] * bv[0][b],
                    bu[1][a] * bv[0][b],
                    bu[0][a] * bv[1][b],
                    bu[2][a] * bv[0][b],
                    bu[1][a] * bv[1][b],
                    bu[0][a] * bv[2][b],
                ];
                for (k, &val) in vals.iter().enumerate() {
                    bw[k][l] = val * w;
                    wsum[k] += val * w;
                }
            }
        }
        let wv = wsum[0];
        let mut out = PatchBasis {
            cps,
            n: vec![0.0; n_sup],
            du: vec![0.0; n_sup],
            dv: vec![0.0; n_sup],
            duu: vec![0.0; n_sup],
            duv: vec![0.0; n_sup],
            dvv: vec![0.0; n_sup],
        };
        for l in 0..n_sup {
            let r = bw[0][l] / wv;
            let ru = (bw[1][l] - r * wsum[1]) / wv;
            let rv = (bw[2][l] - r * wsum[2]) / wv;
            out.n[l] = r;
            out.du[l] = ru;
            out.dv[l] = rv;
            out.duu[l] = (bw[3][l] - 2.0 * ru * wsum[1] - r * wsum[3]) / wv;
            out.duv[l] = (bw[4][l] - ru * wsum[2] - rv * wsum[1] - r * wsum[4]) / wv;
            out.dvv[l] = (bw[5][l] - 2.0 * rv * wsum[2] - r * wsum[5]) / wv;
        }
        out
    }

    /// Surface point of the reference geometry at (u, v).
    pub fn point_at(&self, u: f64, v: f64) -> Pt3 {
        let b = self.basis_at(u, v, 1, 1);
        let mut x = Vec3::zeros();
        for (l, &cp) in b.cps.iter().enumerate() {
            x += b.n[l] * self.ctrl[cp].coords;
        }
        Pt3::from(x)
    }

    /// Patch-local indices of a control net side.
    pub fn side_indices(&self, side: PatchSide) -> Vec<usize> {
        match side {
            PatchSide::UMin => (0..self.n_v).map(|j| j * self.n_u).collect(),
            PatchSide::UMax => (0..self.n_v).map(|j| j * self.n_u + self.n_u - 1).collect(),
            PatchSide::VMin => (0..self.n_u).collect(),
            PatchSide::VMax => (0..self.n_u).map(|i| (self.n_v - 1) * self.n_u + i).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatchSide {
    UMin,
    UMax,
    VMin,
    VMax,
}

/// Armchair lattice direction field.
#[derive(Debug, Clone)]
pub enum LatticeFrame {
    /// flat sheets: constant in-plane direction
    Constant(Vec3),
    /// rolled sheets (CNTs): fixed angle from the circumferential direction
    /// in the local tangent plane of the cylinder about `axis`
    Rolled { axis: Vec3, origin: Pt3, angle_from_circumference: f64 },
}

impl LatticeFrame {
    pub fn armchair_at(&self, x: &Pt3) -> Vec3 {
        match self {
            LatticeFrame::Constant(v) => *v,
            LatticeFrame::Rolled { axis, origin, angle_from_circumference } => {
                let rel = x - origin;
                let radial = rel - rel.dot(axis) * axis;
                let e_r = radial.normalize();
                let e_phi = axis.cross(&e_r);
                angle_from_circumference.cos() * e_phi + angle_from_circumference.sin() * axis
            }
        }
    }
}

/// Penalty constraint row: a linear functional g(x) = Σ c_i x_i − g_ref of
/// the control points, penalized as ½ k_eff |P g|² with projector P.
/// Covers both inter-patch G¹ continuity and clamped-edge rotations.
#[derive(Debug, Clone)]
pub struct PenaltyConstraint {
    /// (global control point, coefficient)
    pub rows: Vec<(usize, f64)>,
    /// quadrature weight carrying the arc-length measure (nm)
    pub weight: f64,
    /// directional projector: None penalizes the full vector jump, Some(d)
    /// only the component along d
    pub direction: Option<Vec3>,
    /// reference value of the functional (subtracted so the reference state
    /// is exactly penalty-free)
    pub offset: Vec3,
}

/// Precomputed quadrature-point data for one element.
#[derive(Debug, Clone)]
pub struct QuadPoint {
    pub basis: PatchBasis,
    /// global control point ids aligned with `basis.cps`
    pub cps: Vec<usize>,
    /// Gauss weight in parametric measure
    pub weight: f64,
    pub reference: RefPointData,
}

#[derive(Debug, Clone)]
pub struct ElementQuad {
    pub patch: usize,
    pub element: usize,
    pub points: Vec<QuadPoint>,
}

/// What the model geometrically is; drives mode-shape classification and
/// scenario defaults.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelKind {
    Plate { edge_u: f64, edge_v: f64 },
    Disk { radius: f64, clamped: bool },
    Cnt { chirality: (u32, u32), radius: f64, length: f64 },
}

/// Discretized shell: patches, the shared control net, lattice orientation,
/// material, named boundary sets, and precomputed quadrature and penalty
/// data.
#[derive(Debug, Clone)]
pub struct ShellModel {
    pub kind: ModelKind,
    pub patches: Vec<NurbsPatch>,
    /// per patch: local control point -> global id
    pub cp_map: Vec<Vec<usize>>,
    pub n_cp: usize,
    /// global reference control points
    pub ref_cp: Vec<Pt3>,
    pub lattice: LatticeFrame,
    pub material: MaterialParams,
    /// named sets of global control points (boundary edges, end rings, ...)
    pub boundary_sets: BTreeMap<String, Vec<usize>>,
    /// G¹ continuity rows across patch interfaces and closure seams
    pub continuity: Vec<PenaltyConstraint>,
    /// clamped-edge rotation rows (empty unless a clamped boundary exists)
    pub clamped: Vec<PenaltyConstraint>,
    /// penalty parameter (nN·nm); applied per unit boundary length with the
    /// 1 nm reference length folded in during assembly
    pub penalty_kp: f64,
    pub quadrature: Vec<ElementQuad>,
}

impl ShellModel {
    pub fn n_dof(&self) -> usize {
        3 * self.n_cp
    }

    /// Build the per-element quadrature cache. Called by the mesh
    /// generators after the control map is final.
    pub fn build_quadrature(&mut self) -> Result<()> {
        let mut quads = Vec::new();
        for (pi, patch) in self.patches.iter().enumerate() {
            let rule_u = GaussRule::new(patch.degree_u + 1);
            let rule_v = GaussRule::new(patch.degree_v + 1);
            // patch-local reference control points resolved through the
            // global net so merged points stay consistent
            let local_ref: Vec<Pt3> =
                self.cp_map[pi].iter().map(|&g| self.ref_cp[g]).collect();
            for (ei, e) in patch.elements.iter().enumerate() {
                let mut points = Vec::new();
                for (v, wv) in rule_v.mapped(e.v0, e.v1) {
                    for (u, wu) in rule_u.mapped(e.u0, e.u1) {
                        let basis = patch.basis_eval(ei, u, v)?;
                        let sup_ref: Vec<Pt3> =
                            basis.cps.iter().map(|&l| local_ref[l]).collect();
                        let xs = {
                            let mut x = Vec3::zeros();
                            for (l, &n) in basis.n.iter().enumerate() {
                                x += n * sup_ref[l].coords;
                            }
                            Pt3::from(x)
                        };
                        let armchair = self.lattice.armchair_at(&xs);
                        let reference =
                            geometry::reference_point(&sup_ref, &basis.slice(), armchair, ei)?;
                        let cps: Vec<usize> =
                            basis.cps.iter().map(|&l| self.cp_map[pi][l]).collect();
                        points.push(QuadPoint { basis, cps, weight: wu * wv, reference });
                    }
                }
                quads.push(ElementQuad { patch: pi, element: ei, points });
            }
        }
        self.quadrature = quads;
        Ok(())
    }

    /// Total reference area from the quadrature cache.
    pub fn reference_area(&self) -> f64 {
        self.quadrature
            .iter()
            .flat_map(|e| &e.points)
            .map(|q| q.weight * q.reference.jac)
            .sum()
    }

    /// Current positions of the support control points of a quadrature
    /// element, given the global displacement vector.
    pub fn support_positions(&self, quad: &ElementQuad, u: &[f64]) -> (Vec<Pt3>, Vec<Pt3>) {
        let q0 = &quad.points[0];
        let refs: Vec<Pt3> = q0.cps.iter().map(|&g| self.ref_cp[g]).collect();
        let curs: Vec<Pt3> = q0
            .cps
            .iter()
            .map(|&g| {
                let base = self.ref_cp[g];
                Pt3::new(base.x + u[3 * g], base.y + u[3 * g + 1], base.z + u[3 * g + 2])
            })
            .collect();
        (refs, curs)
    }
}
