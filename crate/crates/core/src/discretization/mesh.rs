//! Mesh generators for the three geometries: square plate, circular disk
//! (five-patch layout with exact rational boundary arcs), and CNT cylinder
//! (four exact 90° arcs closed into a tube). Curved geometries carry
//! C⁰ junction lines whose G¹ continuity is enforced by penalty rows
//! precomputed here.

use super::bspline::{greville, insert_knot, open_uniform_knots};
use super::{LatticeFrame, ModelKind, NurbsPatch, PatchBasis, PenaltyConstraint, ShellModel};
use crate::geometry::{Pt3, Vec3};
use crate::linalg::GaussRule;
use crate::material::MaterialParams;
use crate::{CoreError, Result};
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// CNT radius from chirality: R = (√3 a_CC / 2π) √(n² + nm + m²),
/// a_CC = 0.142 nm.
pub fn cnt_radius(n: u32, m: u32) -> f64 {
    const A_CC: f64 = 0.142;
    let (nf, mf) = (n as f64, m as f64);
    3.0_f64.sqrt() * A_CC / (2.0 * PI) * (nf * nf + nf * mf + mf * mf).sqrt()
}

/// Chiral angle χ ∈ [0°, 30°] measured from the zigzag lattice axis;
/// χ = 0 for (n, 0), χ = 30° for (n, n).
pub fn chiral_angle(n: u32, m: u32) -> f64 {
    let (nf, mf) = (n as f64, m as f64);
    (3.0_f64.sqrt() * mf).atan2(2.0 * nf + mf)
}

// -------------------------------------------------------------------------
// curve helpers (homogeneous control polygons)
// -------------------------------------------------------------------------

/// Quadratic rational Bézier arc of a circle of radius `r` about the origin
/// in the xy-plane, from angle `phi0` to `phi1` (span < π), as homogeneous
/// control points plus Bézier knots.
fn circle_arc(r: f64, phi0: f64, phi1: f64) -> (Vec<f64>, Vec<[f64; 4]>) {
    let dphi = phi1 - phi0;
    let w_mid = (0.5 * dphi).cos();
    let mid_r = r / w_mid;
    let p0 = [r * phi0.cos(), r * phi0.sin(), 0.0, 1.0];
    let pm_angle = 0.5 * (phi0 + phi1);
    let p1 = [
        w_mid * mid_r * pm_angle.cos(),
        w_mid * mid_r * pm_angle.sin(),
        0.0,
        w_mid,
    ];
    let p2 = [r * phi1.cos(), r * phi1.sin(), 0.0, 1.0];
    (vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0], vec![p0, p1, p2])
}

/// Straight quadratic Bézier segment between two points (weights 1).
fn line_segment(a: Pt3, b: Pt3) -> (Vec<f64>, Vec<[f64; 4]>) {
    let mid = Pt3::from((a.coords + b.coords) * 0.5);
    (
        vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0],
        vec![
            [a.x, a.y, a.z, 1.0],
            [mid.x, mid.y, mid.z, 1.0],
            [b.x, b.y, b.z, 1.0],
        ],
    )
}

/// Insert uniform interior knots so the single-segment curve has `n_elem`
/// elements.
fn refine_curve(knots: &mut Vec<f64>, ctrl: &mut Vec<[f64; 4]>, degree: usize, n_elem: usize) {
    for i in 1..n_elem {
        insert_knot(knots, degree, ctrl, i as f64 / n_elem as f64);
    }
}

fn dehomogenize(h: &[f64; 4]) -> (Pt3, f64) {
    (Pt3::new(h[0] / h[3], h[1] / h[3], h[2] / h[3]), h[3])
}

// -------------------------------------------------------------------------
// global control-point merging
// -------------------------------------------------------------------------

struct PointMerger {
    tol: f64,
    map: BTreeMap<(i64, i64, i64), usize>,
    points: Vec<Pt3>,
}

impl PointMerger {
    fn new(scale: f64) -> Self {
        PointMerger { tol: 1e-8 * scale.max(1.0), map: BTreeMap::new(), points: Vec::new() }
    }

    fn key(&self, p: &Pt3) -> (i64, i64, i64) {
        (
            (p.x / self.tol).round() as i64,
            (p.y / self.tol).round() as i64,
            (p.z / self.tol).round() as i64,
        )
    }

    fn insert(&mut self, p: Pt3) -> usize {
        let k = self.key(&p);
        if let Some(&id) = self.map.get(&k) {
            return id;
        }
        let id = self.points.len();
        self.points.push(p);
        self.map.insert(k, id);
        id
    }
}

// -------------------------------------------------------------------------
// interface continuity rows
// -------------------------------------------------------------------------

/// One side of an interface line: a patch with one parametric coordinate
/// held fixed and the other sweeping a range.
#[derive(Debug, Clone, Copy)]
struct LineSide {
    patch: usize,
    /// true: u is fixed and v varies; false: v fixed, u varies
    fixed_is_u: bool,
    fixed_value: f64,
    /// varying-coordinate range, oriented so both sides traverse the same
    /// physical direction
    range: (f64, f64),
    /// span side hints at repeated knots (-1 left, +1 right)
    side_u: i8,
    side_v: i8,
}

impl LineSide {
    fn coords(&self, t: f64) -> (f64, f64) {
        let s = self.range.0 + (self.range.1 - self.range.0) * t;
        if self.fixed_is_u {
            (self.fixed_value, s)
        } else {
            (s, self.fixed_value)
        }
    }
}

struct SideEval {
    basis: PatchBasis,
    /// D_T coefficients per supported control point
    coefs: Vec<f64>,
    /// surface tangent along the line (dx/dt), for the measure
    line_tangent: Vec3,
    normal: Vec3,
    point: Pt3,
}

fn eval_side(
    patches: &[NurbsPatch],
    cp_map: &[Vec<usize>],
    ref_cp: &[Pt3],
    side: &LineSide,
    t: f64,
    transversal: Option<Vec3>,
) -> SideEval {
    let patch = &patches[side.patch];
    let (u, v) = side.coords(t);
    let basis = patch.basis_at(u, v, side.side_u, side.side_v);
    let pts: Vec<Pt3> = basis.cps.iter().map(|&l| ref_cp[cp_map[side.patch][l]]).collect();
    let mut x = Vec3::zeros();
    let mut a1 = Vec3::zeros();
    let mut a2 = Vec3::zeros();
    for (l, p) in pts.iter().enumerate() {
        x += basis.n[l] * p.coords;
        a1 += basis.du[l] * p.coords;
        a2 += basis.dv[l] * p.coords;
    }
    let normal = a1.cross(&a2).normalize();
    // contravariant tangents
    let g = [[a1.dot(&a1), a1.dot(&a2)], [a2.dot(&a1), a2.dot(&a2)]];
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    let gi = [[g[1][1] / det, -g[0][1] / det], [-g[0][1] / det, g[0][0] / det]];
    let a_up = [gi[0][0] * a1 + gi[0][1] * a2, gi[1][0] * a1 + gi[1][1] * a2];
    let line_tangent = if side.fixed_is_u { a2 } else { a1 } * (side.range.1 - side.range.0);
    let coefs = if let Some(tv) = transversal {
        let cu = tv.dot(&a_up[0]);
        let cv = tv.dot(&a_up[1]);
        (0..basis.n.len()).map(|l| cu * basis.du[l] + cv * basis.dv[l]).collect()
    } else {
        Vec::new()
    };
    SideEval { basis, coefs, line_tangent, normal, point: Pt3::from(x) }
}

/// Penalty rows enforcing continuity of the transversal derivative across
/// an interface: g(x) = D_T x |side_a − D_T x |side_b, integrated along the
/// line. `n_sub` subdivides the line (use the boundary element count).
fn continuity_rows(
    patches: &[NurbsPatch],
    cp_map: &[Vec<usize>],
    ref_cp: &[Pt3],
    side_a: &LineSide,
    side_b: &LineSide,
    n_sub: usize,
) -> Vec<PenaltyConstraint> {
    let rule = GaussRule::new(4);
    let mut out = Vec::new();
    for sub in 0..n_sub {
        let (t0, t1) = (sub as f64 / n_sub as f64, (sub + 1) as f64 / n_sub as f64);
        for (t, w) in rule.mapped(t0, t1) {
            // transversal from side A reference geometry
            let probe = eval_side(patches, cp_map, ref_cp, side_a, t, None);
            let tau = probe.line_tangent.normalize();
            let trans = probe.normal.cross(&tau);
            let ea = eval_side(patches, cp_map, ref_cp, side_a, t, Some(trans));
            let eb = eval_side(patches, cp_map, ref_cp, side_b, t, Some(trans));
            let mut rows: BTreeMap<usize, f64> = BTreeMap::new();
            for (l, &c) in ea.coefs.iter().enumerate() {
                *rows.entry(cp_map[side_a.patch][ea.basis.cps[l]]).or_insert(0.0) += c;
            }
            for (l, &c) in eb.coefs.iter().enumerate() {
                *rows.entry(cp_map[side_b.patch][eb.basis.cps[l]]).or_insert(0.0) -= c;
            }
            rows.retain(|_, c| c.abs() > 1e-14);
            let mut offset = Vec3::zeros();
            for (&cp, &c) in &rows {
                offset += c * ref_cp[cp].coords;
            }
            out.push(PenaltyConstraint {
                rows: rows.into_iter().collect(),
                weight: w * ea.line_tangent.norm(),
                direction: None,
                offset,
            });
        }
    }
    out
}

/// Penalty rows clamping the boundary rotation: the out-of-plane component
/// of the transversal derivative must keep its reference value.
fn clamped_rows(
    patches: &[NurbsPatch],
    cp_map: &[Vec<usize>],
    ref_cp: &[Pt3],
    side: &LineSide,
    n_sub: usize,
) -> Vec<PenaltyConstraint> {
    let rule = GaussRule::new(4);
    let mut out = Vec::new();
    for sub in 0..n_sub {
        let (t0, t1) = (sub as f64 / n_sub as f64, (sub + 1) as f64 / n_sub as f64);
        for (t, w) in rule.mapped(t0, t1) {
            let probe = eval_side(patches, cp_map, ref_cp, side, t, None);
            let tau = probe.line_tangent.normalize();
            let trans = probe.normal.cross(&tau);
            let e = eval_side(patches, cp_map, ref_cp, side, t, Some(trans));
            let mut rows: BTreeMap<usize, f64> = BTreeMap::new();
            for (l, &c) in e.coefs.iter().enumerate() {
                *rows.entry(cp_map[side.patch][e.basis.cps[l]]).or_insert(0.0) += c;
            }
            rows.retain(|_, c| c.abs() > 1e-14);
            let mut offset = Vec3::zeros();
            for (&cp, &c) in &rows {
                offset += c * ref_cp[cp].coords;
            }
            out.push(PenaltyConstraint {
                rows: rows.into_iter().collect(),
                weight: w * e.line_tangent.norm(),
                direction: Some(e.normal),
                offset,
            });
        }
    }
    out
}

// -------------------------------------------------------------------------
// generators
// -------------------------------------------------------------------------

/// Flat square plate of edge length `edge` (nm) centered at the origin in
/// the xy-plane, `m_u` × `m_v` elements. The armchair direction lies in the
/// plane at `armchair_angle` from +x.
pub fn make_square_plate(
    edge: f64,
    m_u: usize,
    m_v: usize,
    degree: usize,
    armchair_angle: f64,
    material: MaterialParams,
) -> Result<ShellModel> {
    if edge <= 0.0 {
        return Err(CoreError::InvalidMesh("edge length must be positive".into()));
    }
    if m_u < 2 || m_v < 2 || degree < 2 {
        return Err(CoreError::InvalidMesh(
            "square plate needs >= 2x2 elements and degree >= 2".into(),
        ));
    }
    let half = 0.5 * edge;
    let knots_u = open_uniform_knots(degree, m_u, 0.0, 1.0);
    let knots_v = open_uniform_knots(degree, m_v, 0.0, 1.0);
    let gx: Vec<f64> = greville(&knots_u, degree).iter().map(|t| -half + edge * t).collect();
    let gy: Vec<f64> = greville(&knots_v, degree).iter().map(|t| -half + edge * t).collect();
    let mut ctrl = Vec::with_capacity(gx.len() * gy.len());
    for &y in &gy {
        for &x in &gx {
            ctrl.push(Pt3::new(x, y, 0.0));
        }
    }
    let weights = vec![1.0; ctrl.len()];
    let patch = NurbsPatch::new(degree, degree, knots_u, knots_v, ctrl.clone(), weights)?;
    let n_u = patch.n_u;
    let n_v = patch.n_v;
    let cp_map = vec![(0..ctrl.len()).collect::<Vec<_>>()];

    let mut boundary_sets = BTreeMap::new();
    let idx = |i: usize, j: usize| j * n_u + i;
    boundary_sets.insert("edge_xmin".into(), (0..n_v).map(|j| idx(0, j)).collect::<Vec<_>>());
    boundary_sets.insert("edge_xmax".into(), (0..n_v).map(|j| idx(n_u - 1, j)).collect::<Vec<_>>());
    boundary_sets.insert("edge_ymin".into(), (0..n_u).map(|i| idx(i, 0)).collect::<Vec<_>>());
    boundary_sets.insert("edge_ymax".into(), (0..n_u).map(|i| idx(i, n_v - 1)).collect::<Vec<_>>());
    let mut boundary: Vec<usize> = boundary_sets.values().flatten().copied().collect();
    boundary.sort_unstable();
    boundary.dedup();
    boundary_sets.insert("boundary".into(), boundary);

    let penalty_kp = 1000.0 * material.c_bend;
    let mut model = ShellModel {
        kind: ModelKind::Plate { edge_u: edge, edge_v: edge },
        patches: vec![patch],
        cp_map,
        n_cp: ctrl.len(),
        ref_cp: ctrl,
        lattice: LatticeFrame::Constant(Vec3::new(
            armchair_angle.cos(),
            armchair_angle.sin(),
            0.0,
        )),
        material,
        boundary_sets,
        continuity: Vec::new(),
        clamped: Vec::new(),
        penalty_kp,
        quadrature: Vec::new(),
    };
    model.build_quadrature()?;
    Ok(model)
}

/// CNT cylinder of chirality (n, m) and aspect ratio AR (length over
/// diameter), axis along +z. The circumference is four exact 90° rational
/// arcs; their junction lines (including the closure seam) carry G¹
/// penalty rows. `n_ax` axial elements, about `n_circ` circumferential.
pub fn make_cnt(
    chirality: (u32, u32),
    aspect_ratio: f64,
    n_ax: usize,
    n_circ: usize,
    degree: usize,
    material: MaterialParams,
) -> Result<ShellModel> {
    let (cn, cm) = chirality;
    if cn == 0 && cm == 0 {
        return Err(CoreError::InvalidMesh("chirality (0,0) is not a tube".into()));
    }
    if degree != 2 {
        return Err(CoreError::InvalidMesh(
            "curved geometries are built with quadratic rational arcs (degree 2)".into(),
        ));
    }
    if aspect_ratio <= 0.0 || n_ax < 2 || n_circ < 8 {
        return Err(CoreError::InvalidMesh(
            "CNT needs AR > 0, >= 2 axial and >= 8 circumferential elements".into(),
        ));
    }
    let radius = cnt_radius(cn, cm);
    let length = aspect_ratio * 2.0 * radius;
    let e_arc = n_circ.div_ceil(4).max(1);

    // closed circumferential curve: 4 refined arcs with double junction knots
    let mut circ_knots: Vec<f64> = vec![0.0, 0.0, 0.0];
    let mut circ_ctrl: Vec<[f64; 4]> = Vec::new();
    for k in 0..4 {
        let (mut aknots, mut actrl) = circle_arc(radius, k as f64 * PI / 2.0, (k + 1) as f64 * PI / 2.0);
        refine_curve(&mut aknots, &mut actrl, 2, e_arc);
        // interior knots of this arc mapped to [k/4, (k+1)/4]
        let interior: Vec<f64> = aknots[3..aknots.len() - 3]
            .iter()
            .map(|t| (k as f64 + t) / 4.0)
            .collect();
        circ_knots.extend(interior);
        if k < 3 {
            circ_knots.push((k as f64 + 1.0) / 4.0);
            circ_knots.push((k as f64 + 1.0) / 4.0);
        }
        let skip = if k == 0 { 0 } else { 1 };
        circ_ctrl.extend_from_slice(&actrl[skip..]);
    }
    circ_knots.extend_from_slice(&[1.0, 1.0, 1.0]);
    // last control point coincides with the first (seam)
    let n_circ_cp = circ_ctrl.len();

    let ax_knots = open_uniform_knots(2, n_ax, 0.0, 1.0);
    let gz: Vec<f64> = greville(&ax_knots, 2).iter().map(|t| t * length).collect();
    let n_ax_cp = gz.len();

    // tensor net: u = axial, v = circumferential
    let mut ctrl = Vec::with_capacity(n_ax_cp * n_circ_cp);
    let mut weights = Vec::with_capacity(n_ax_cp * n_circ_cp);
    for h in &circ_ctrl {
        let (p, w) = dehomogenize(h);
        for &z in &gz {
            ctrl.push(Pt3::new(p.x, p.y, z));
            weights.push(w);
        }
    }
    let patch = NurbsPatch::new(2, 2, ax_knots, circ_knots, ctrl.clone(), weights)?;

    // global map with seam wrap: column j = n_circ_cp-1 maps onto column 0
    let n_cp = n_ax_cp * (n_circ_cp - 1);
    let mut cp_map = vec![0usize; n_ax_cp * n_circ_cp];
    for j in 0..n_circ_cp {
        for i in 0..n_ax_cp {
            let jj = if j == n_circ_cp - 1 { 0 } else { j };
            cp_map[j * n_ax_cp + i] = jj * n_ax_cp + i;
        }
    }
    let mut ref_cp = vec![Pt3::origin(); n_cp];
    for (local, &g) in cp_map.iter().enumerate() {
        ref_cp[g] = ctrl[local];
    }

    let mut boundary_sets = BTreeMap::new();
    let ring = |i: usize| -> Vec<usize> {
        let mut v: Vec<usize> = (0..n_circ_cp - 1).map(|j| j * n_ax_cp + i).collect();
        v.sort_unstable();
        v
    };
    boundary_sets.insert("end_a".into(), ring(0));
    boundary_sets.insert("end_b".into(), ring(n_ax_cp - 1));
    let mut boundary: Vec<usize> = Vec::new();
    boundary.extend(ring(0));
    boundary.extend(ring(n_ax_cp - 1));
    boundary.sort_unstable();
    boundary_sets.insert("boundary".into(), boundary);

    let chi = chiral_angle(cn, cm);
    let lattice = LatticeFrame::Rolled {
        axis: Vec3::z(),
        origin: Pt3::origin(),
        angle_from_circumference: PI / 6.0 - chi,
    };

    let penalty_kp = 1000.0 * material.c_bend;
    let cp_maps = vec![cp_map];
    // G¹ rows along the four junction lines (v = 0 seam and v = 1/4, 1/2, 3/4)
    let mut continuity = Vec::new();
    let patches = vec![patch];
    for k in 0..4 {
        let vj = k as f64 / 4.0;
        let (side_a, side_b) = if k == 0 {
            (
                LineSide { patch: 0, fixed_is_u: false, fixed_value: 1.0, range: (0.0, 1.0), side_u: 1, side_v: -1 },
                LineSide { patch: 0, fixed_is_u: false, fixed_value: 0.0, range: (0.0, 1.0), side_u: 1, side_v: 1 },
            )
        } else {
            (
                LineSide { patch: 0, fixed_is_u: false, fixed_value: vj, range: (0.0, 1.0), side_u: 1, side_v: -1 },
                LineSide { patch: 0, fixed_is_u: false, fixed_value: vj, range: (0.0, 1.0), side_u: 1, side_v: 1 },
            )
        };
        continuity.extend(continuity_rows(&patches, &cp_maps, &ref_cp, &side_a, &side_b, n_ax));
    }

    let mut model = ShellModel {
        kind: ModelKind::Cnt { chirality, radius, length },
        patches,
        cp_map: cp_maps,
        n_cp,
        ref_cp,
        lattice,
        material,
        boundary_sets,
        continuity,
        clamped: Vec::new(),
        penalty_kp,
        quadrature: Vec::new(),
    };
    model.build_quadrature()?;
    Ok(model)
}

/// Circular disk of radius `a` in the xy-plane: five-patch layout (central
/// square plus four edge patches with exact rational boundary arcs),
/// `m` × `m` elements per patch. `clamped` adds boundary rotation rows.
pub fn make_disk(
    a: f64,
    m: usize,
    degree: usize,
    clamped: bool,
    material: MaterialParams,
) -> Result<ShellModel> {
    if a <= 0.0 {
        return Err(CoreError::InvalidMesh("disk radius must be positive".into()));
    }
    if degree != 2 {
        return Err(CoreError::InvalidMesh(
            "curved geometries are built with quadratic rational arcs (degree 2)".into(),
        ));
    }
    if m < 2 {
        return Err(CoreError::InvalidMesh("disk needs >= 2 elements per patch side".into()));
    }
    // central square corners (±d, ±d) at half the radius from the center
    let d = 0.5 * a / 2.0_f64.sqrt();
    let corners = [
        Pt3::new(d, -d, 0.0),
        Pt3::new(d, d, 0.0),
        Pt3::new(-d, d, 0.0),
        Pt3::new(-d, -d, 0.0),
    ];

    // central patch: plain biquadratic square
    let knots = open_uniform_knots(2, m, 0.0, 1.0);
    let g: Vec<f64> = greville(&knots, 2).iter().map(|t| -d + 2.0 * d * t).collect();
    let mut central_ctrl = Vec::new();
    for &y in &g {
        for &x in &g {
            central_ctrl.push(Pt3::new(x, y, 0.0));
        }
    }
    let central = NurbsPatch::new(
        2,
        2,
        knots.clone(),
        knots.clone(),
        central_ctrl,
        vec![1.0; g.len() * g.len()],
    )?;

    // edge patches: ruled between inner square edge and outer 90° arc
    let mut patches = vec![central];
    for k in 0..4 {
        let c0 = corners[k];
        let c1 = corners[(k + 1) % 4];
        let phi0 = -PI / 4.0 + k as f64 * PI / 2.0;
        let phi1 = phi0 + PI / 2.0;
        let (mut lk, mut lc) = line_segment(c0, c1);
        refine_curve(&mut lk, &mut lc, 2, m);
        let (mut ak, mut ac) = circle_arc(a, phi0, phi1);
        refine_curve(&mut ak, &mut ac, 2, m);
        debug_assert_eq!(lk, ak);
        let n_col = lc.len();
        // three homogeneous rows (inner, blend, outer), then refine radial
        let mut columns: Vec<Vec<[f64; 4]>> = (0..n_col)
            .map(|i| {
                let h0 = lc[i];
                let h2 = ac[i];
                let h1 = [
                    0.5 * (h0[0] + h2[0]),
                    0.5 * (h0[1] + h2[1]),
                    0.5 * (h0[2] + h2[2]),
                    0.5 * (h0[3] + h2[3]),
                ];
                vec![h0, h1, h2]
            })
            .collect();
        let mut vknots = vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0];
        for col in &mut columns {
            let mut kv = vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0];
            for i in 1..m {
                insert_knot(&mut kv, 2, col, i as f64 / m as f64);
            }
            vknots = kv;
        }
        let n_row = columns[0].len();
        let mut ctrl = Vec::with_capacity(n_col * n_row);
        let mut weights = Vec::with_capacity(n_col * n_row);
        for j in 0..n_row {
            for col in columns.iter().take(n_col) {
                let (p, w) = dehomogenize(&col[j]);
                ctrl.push(p);
                weights.push(w);
            }
        }
        patches.push(NurbsPatch::new(2, 2, lk.clone(), vknots, ctrl, weights)?);
    }

    // merge the control nets into the global set
    let mut merger = PointMerger::new(a);
    let mut cp_map = Vec::new();
    for patch in &patches {
        cp_map.push(patch.ctrl.iter().map(|p| merger.insert(*p)).collect::<Vec<_>>());
    }
    let ref_cp = merger.points;
    let n_cp = ref_cp.len();

    // boundary: outer rows (v = 1) of the four edge patches
    let mut boundary = Vec::new();
    for (pi, patch) in patches.iter().enumerate().skip(1) {
        for l in patch.side_indices(super::PatchSide::VMax) {
            boundary.push(cp_map[pi][l]);
        }
    }
    boundary.sort_unstable();
    boundary.dedup();
    let mut boundary_sets = BTreeMap::new();
    boundary_sets.insert("boundary".into(), boundary);

    // interface rows: central edge <-> edge patch inner rows, and radial
    // lines between adjacent edge patches
    let mut continuity = Vec::new();
    // central patch sides ordered to match edge patch k's inner direction
    let central_sides = [
        // k = 0 right edge: (d,-d) -> (d,d): u = 1, v: 0..1
        LineSide { patch: 0, fixed_is_u: true, fixed_value: 1.0, range: (0.0, 1.0), side_u: -1, side_v: 1 },
        // k = 1 top edge: (d,d) -> (-d,d): v = 1, u: 1..0
        LineSide { patch: 0, fixed_is_u: false, fixed_value: 1.0, range: (1.0, 0.0), side_u: 1, side_v: -1 },
        // k = 2 left edge: (-d,d) -> (-d,-d): u = 0, v: 1..0
        LineSide { patch: 0, fixed_is_u: true, fixed_value: 0.0, range: (1.0, 0.0), side_u: 1, side_v: 1 },
        // k = 3 bottom edge: (-d,-d) -> (d,-d): v = 0, u: 0..1
        LineSide { patch: 0, fixed_is_u: false, fixed_value: 0.0, range: (0.0, 1.0), side_u: 1, side_v: 1 },
    ];
    for k in 0..4 {
        let inner = LineSide {
            patch: k + 1,
            fixed_is_u: false,
            fixed_value: 0.0,
            range: (0.0, 1.0),
            side_u: 1,
            side_v: 1,
        };
        continuity.extend(continuity_rows(&patches, &cp_map, &ref_cp, &central_sides[k], &inner, m));
        // radial interface between edge patch k and k+1: u = 1 of patch k+1
        // matches u = 0 of patch (k+1)%4 + 1, both v: 0..1
        let side_a = LineSide {
            patch: k + 1,
            fixed_is_u: true,
            fixed_value: 1.0,
            range: (0.0, 1.0),
            side_u: -1,
            side_v: 1,
        };
        let side_b = LineSide {
            patch: (k + 1) % 4 + 1,
            fixed_is_u: true,
            fixed_value: 0.0,
            range: (0.0, 1.0),
            side_u: 1,
            side_v: 1,
        };
        continuity.extend(continuity_rows(&patches, &cp_map, &ref_cp, &side_a, &side_b, m));
    }

    // clamped boundary rotation rows along the outer arcs
    let mut clamped_pen = Vec::new();
    if clamped {
        for k in 0..4 {
            let side = LineSide {
                patch: k + 1,
                fixed_is_u: false,
                fixed_value: 1.0,
                range: (0.0, 1.0),
                side_u: 1,
                side_v: -1,
            };
            clamped_pen.extend(clamped_rows(&patches, &cp_map, &ref_cp, &side, m));
        }
    }

    let penalty_kp = 1000.0 * material.c_bend;
    let mut model = ShellModel {
        kind: ModelKind::Disk { radius: a, clamped },
        patches,
        cp_map,
        n_cp,
        ref_cp,
        lattice: LatticeFrame::Constant(Vec3::x()),
        material,
        boundary_sets,
        continuity,
        clamped: clamped_pen,
        penalty_kp,
        quadrature: Vec::new(),
    };
    model.build_quadrature()?;
    Ok(model)
}
