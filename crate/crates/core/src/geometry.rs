//! Curvilinear surface kinematics at quadrature points: metrics, curvature,
//! Christoffel symbols, principal stretches with their material directions,
//! logarithmic strain invariants, and the lattice angle against the armchair
//! direction.

use crate::{CoreError, Result};
use nalgebra::{Point3, Vector3};

pub type Vec3 = Vector3<f64>;
pub type Pt3 = Point3<f64>;
/// 2x2 symmetric tensor in covariant/contravariant surface components.
pub type Sym2 = [[f64; 2]; 2];

/// Shape values and parametric derivatives of the supported basis functions
/// at one quadrature point.
#[derive(Debug, Clone, Copy)]
pub struct BasisSlice<'a> {
    pub n: &'a [f64],
    /// d/du, d/dv
    pub d1: [&'a [f64]; 2],
    /// d²/du², d²/dudv, d²/dv²
    pub d2: [&'a [f64]; 3],
}

impl<'a> BasisSlice<'a> {
    fn point(&self, pts: &[Pt3]) -> Vec3 {
        let mut x = Vec3::zeros();
        for (i, &ni) in self.n.iter().enumerate() {
            x += ni * pts[i].coords;
        }
        x
    }
    fn d1_vec(&self, pts: &[Pt3], dir: usize) -> Vec3 {
        let mut x = Vec3::zeros();
        for (i, &ni) in self.d1[dir].iter().enumerate() {
            x += ni * pts[i].coords;
        }
        x
    }
    fn d2_vec(&self, pts: &[Pt3], which: usize) -> Vec3 {
        let mut x = Vec3::zeros();
        for (i, &ni) in self.d2[which].iter().enumerate() {
            x += ni * pts[i].coords;
        }
        x
    }
}

/// Reference-configuration data at a quadrature point, fixed for the whole
/// analysis and precomputed at model build time.
#[derive(Debug, Clone)]
pub struct RefPointData {
    /// covariant metric A_αβ
    pub a_cov: Sym2,
    /// contravariant metric A^αβ
    pub a_con: Sym2,
    /// covariant curvature B_αβ
    pub b_cov: Sym2,
    /// area measure |A₁ × A₂| per unit parametric area
    pub jac: f64,
    /// orthonormal tangent frame ê₁, ê₂
    pub frame: [Vec3; 2],
    /// reference normal
    pub normal: Vec3,
    /// T^α_k = A^α · ê_k (contravariant basis in frame coordinates)
    pub t_con: [[f64; 2]; 2],
    /// armchair angle in the ê frame
    pub lattice_angle: f64,
    /// armchair direction projected into the tangent plane (unit)
    pub armchair: Vec3,
}

/// Per-quadrature-point kinematic state of the deformed surface.
#[derive(Debug, Clone)]
pub struct SurfacePointState {
    pub reference: RefPointData,
    /// current covariant metric a_αβ
    pub a_cov: Sym2,
    /// current contravariant metric a^αβ
    pub a_con: Sym2,
    /// current covariant curvature b_αβ
    pub b_cov: Sym2,
    /// current unit normal
    pub normal: Vec3,
    /// current Christoffel symbols Γ^γ_αβ, indexed [γ][α][β]
    pub christoffel: [[[f64; 2]; 2]; 2],
    /// principal surface stretches, λ1 ≥ λ2 > 0
    pub lambda1: f64,
    pub lambda2: f64,
    /// material direction of maximum stretch (3-vector in the reference
    /// tangent plane)
    pub y1: Vec3,
    /// area stretch J = λ1 λ2
    pub area_stretch: f64,
    /// current principal curvatures, κ1 ≥ κ2
    pub kappa1: f64,
    pub kappa2: f64,
    /// maximum-stretch angle against the armchair direction
    pub theta: f64,
    /// right Cauchy-Green tensor in the reference frame coordinates
    pub c_frame: Sym2,
    /// current covariant tangents a_α
    pub tangents: [Vec3; 2],
}

fn det2(m: &Sym2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

fn inv2(m: &Sym2, det: f64) -> Sym2 {
    [[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]]
}

/// Eigen-decomposition of a symmetric 2x2 matrix: ((e1, v1), (e2, v2)) with
/// e1 >= e2 and orthonormal vectors.
pub fn eig_sym2(m: &Sym2) -> ((f64, [f64; 2]), (f64, [f64; 2])) {
    let (a, b, c) = (m[0][0], m[0][1], m[1][1]);
    let mid = 0.5 * (a + c);
    let half = 0.5 * (a - c);
    let disc = (half * half + b * b).sqrt();
    let e1 = mid + disc;
    let e2 = mid - disc;
    let v1 = if b.abs() > 1e-300 {
        let v = [b, e1 - a];
        let v2 = [e1 - c, b];
        if v[0] * v[0] + v[1] * v[1] >= v2[0] * v2[0] + v2[1] * v2[1] {
            v
        } else {
            v2
        }
    } else if a >= c {
        [1.0, 0.0]
    } else {
        [0.0, 1.0]
    };
    let norm = (v1[0] * v1[0] + v1[1] * v1[1]).sqrt();
    let v1 = [v1[0] / norm, v1[1] / norm];
    let v2 = [-v1[1], v1[0]];
    ((e1, v1), (e2, v2))
}

/// Build the reference-point data from reference control points and basis
/// values; `armchair` is the (possibly position-dependent) lattice direction
/// evaluated at this surface point.
pub fn reference_point(
    ref_points: &[Pt3],
    basis: &BasisSlice,
    armchair: Vec3,
    element: usize,
) -> Result<RefPointData> {
    let a1 = basis.d1_vec(ref_points, 0);
    let a2 = basis.d1_vec(ref_points, 1);
    let a_cov = [[a1.dot(&a1), a1.dot(&a2)], [a2.dot(&a1), a2.dot(&a2)]];
    let det = det2(&a_cov);
    if det <= 0.0 {
        return Err(CoreError::DegenerateMetric { element, det });
    }
    let a_con = inv2(&a_cov, det);
    let cross = a1.cross(&a2);
    let jac = cross.norm();
    let normal = cross / jac;
    // orthonormal frame by Gram-Schmidt on the tangents
    let e1 = a1.normalize();
    let e2 = (a2 - a2.dot(&e1) * e1).normalize();
    // contravariant tangents
    let a_up = [
        a_con[0][0] * a1 + a_con[0][1] * a2,
        a_con[1][0] * a1 + a_con[1][1] * a2,
    ];
    let t_con = [
        [a_up[0].dot(&e1), a_up[0].dot(&e2)],
        [a_up[1].dot(&e1), a_up[1].dot(&e2)],
    ];
    let mut b_cov = [[0.0; 2]; 2];
    let idx = [[0, 1], [1, 2]];
    for al in 0..2 {
        for be in 0..2 {
            b_cov[al][be] = normal.dot(&basis.d2_vec(ref_points, idx[al][be]));
        }
    }
    // armchair projected into the tangent plane
    let proj = armchair - armchair.dot(&normal) * normal;
    let proj_norm = proj.norm();
    if proj_norm < 1e-8 {
        return Err(CoreError::InvalidMesh(
            "armchair direction is normal to the surface".into(),
        ));
    }
    let ac = proj / proj_norm;
    let lattice_angle = ac.dot(&e2).atan2(ac.dot(&e1));
    Ok(RefPointData {
        a_cov,
        a_con,
        b_cov,
        jac,
        frame: [e1, e2],
        normal,
        t_con,
        lattice_angle,
        armchair: ac,
    })
}

/// Evaluate the full kinematic state at one quadrature point.
pub fn evaluate_kinematics(
    ref_points: &[Pt3],
    cur_points: &[Pt3],
    basis: &BasisSlice,
    armchair: Vec3,
    element: usize,
) -> Result<SurfacePointState> {
    let reference = reference_point(ref_points, basis, armchair, element)?;
    current_state(reference, cur_points, basis, element)
}

/// Evaluate the current-configuration part of the state against an already
/// prepared reference point (the hot path during assembly).
pub fn current_state(
    reference: RefPointData,
    cur_points: &[Pt3],
    basis: &BasisSlice,
    element: usize,
) -> Result<SurfacePointState> {
    let a1 = basis.d1_vec(cur_points, 0);
    let a2 = basis.d1_vec(cur_points, 1);
    let a_cov = [[a1.dot(&a1), a1.dot(&a2)], [a2.dot(&a1), a2.dot(&a2)]];
    let det_a = det2(&a_cov);
    if det_a <= 0.0 {
        return Err(CoreError::DegenerateMetric { element, det: det_a });
    }
    let a_con = inv2(&a_cov, det_a);
    let cross = a1.cross(&a2);
    let normal = cross / cross.norm();
    let idx = [[0, 1], [1, 2]];
    let mut x_dd = [Vec3::zeros(); 3];
    for (which, slot) in x_dd.iter_mut().enumerate() {
        *slot = basis.d2_vec(cur_points, which);
    }
    let mut b_cov = [[0.0; 2]; 2];
    for al in 0..2 {
        for be in 0..2 {
            b_cov[al][be] = normal.dot(&x_dd[idx[al][be]]);
        }
    }
    // current contravariant tangents and Christoffel symbols
    let a_up = [
        a_con[0][0] * a1 + a_con[0][1] * a2,
        a_con[1][0] * a1 + a_con[1][1] * a2,
    ];
    let mut christoffel = [[[0.0; 2]; 2]; 2];
    for ga in 0..2 {
        for al in 0..2 {
            for be in 0..2 {
                christoffel[ga][al][be] = a_up[ga].dot(&x_dd[idx[al][be]]);
            }
        }
    }
    // right Cauchy-Green in reference frame coordinates: C_kl = T^α_k T^β_l a_αβ
    let t = &reference.t_con;
    let mut c_frame = [[0.0; 2]; 2];
    for k in 0..2 {
        for l in 0..2 {
            let mut s = 0.0;
            for al in 0..2 {
                for be in 0..2 {
                    s += t[al][k] * t[be][l] * a_cov[al][be];
                }
            }
            c_frame[k][l] = s;
        }
    }
    c_frame[0][1] = 0.5 * (c_frame[0][1] + c_frame[1][0]);
    c_frame[1][0] = c_frame[0][1];
    let ((c1, v1), (c2, _)) = eig_sym2(&c_frame);
    if c2 <= 0.0 {
        return Err(CoreError::DegenerateMetric { element, det: c2 });
    }
    let lambda1 = c1.sqrt();
    let lambda2 = c2.sqrt();
    let area_stretch = (det_a / (reference.jac * reference.jac)).sqrt();
    let degenerate = (lambda1 - lambda2) <= 1e-12 * lambda1;
    let y1 = if degenerate {
        reference.armchair
    } else {
        (v1[0] * reference.frame[0] + v1[1] * reference.frame[1]).normalize()
    };
    let theta = if degenerate {
        0.0
    } else {
        y1.dot(&reference.armchair).clamp(-1.0, 1.0).acos()
    };
    // principal curvatures: eigenvalues of b against the current metric,
    // computed in an orthonormal frame of the current tangent plane
    let f1 = a1.normalize();
    let f2 = (a2 - a2.dot(&f1) * f1).normalize();
    let t_cur = [
        [a_up[0].dot(&f1), a_up[0].dot(&f2)],
        [a_up[1].dot(&f1), a_up[1].dot(&f2)],
    ];
    let mut b_frame = [[0.0; 2]; 2];
    for k in 0..2 {
        for l in 0..2 {
            let mut s = 0.0;
            for al in 0..2 {
                for be in 0..2 {
                    s += t_cur[al][k] * t_cur[be][l] * b_cov[al][be];
                }
            }
            b_frame[k][l] = s;
        }
    }
    b_frame[0][1] = 0.5 * (b_frame[0][1] + b_frame[1][0]);
    b_frame[1][0] = b_frame[0][1];
    let ((kappa1, _), (kappa2, _)) = eig_sym2(&b_frame);

    Ok(SurfacePointState {
        reference,
        a_cov,
        a_con,
        b_cov,
        normal,
        christoffel,
        lambda1,
        lambda2,
        y1,
        area_stretch,
        kappa1,
        kappa2,
        theta,
        c_frame,
        tangents: [a1, a2],
    })
}

/// Build a kinematic state directly from metric and curvature components
/// against a prepared reference point. Position-dependent fields (normal,
/// Christoffel symbols, tangents) are not recoverable from metrics alone
/// and are filled with reference values; everything the constitutive law
/// reads is exact. Used by the finite-difference oracles and single-point
/// constitutive studies.
pub fn state_from_metrics(
    reference: RefPointData,
    a_cov: Sym2,
    b_cov: Sym2,
    element: usize,
) -> SurfacePointState {
    let det_a = det2(&a_cov);
    assert!(det_a > 0.0, "degenerate metric in state_from_metrics (element {element})");
    let a_con = inv2(&a_cov, det_a);
    let t = &reference.t_con;
    let mut c_frame = [[0.0; 2]; 2];
    for k in 0..2 {
        for l in 0..2 {
            let mut s = 0.0;
            for al in 0..2 {
                for be in 0..2 {
                    s += t[al][k] * t[be][l] * a_cov[al][be];
                }
            }
            c_frame[k][l] = s;
        }
    }
    c_frame[0][1] = 0.5 * (c_frame[0][1] + c_frame[1][0]);
    c_frame[1][0] = c_frame[0][1];
    let ((c1, v1), (c2, _)) = eig_sym2(&c_frame);
    let lambda1 = c1.sqrt();
    let lambda2 = c2.max(1e-300).sqrt();
    let area_stretch = (det_a / (reference.jac * reference.jac)).sqrt();
    let degenerate = (lambda1 - lambda2) <= 1e-12 * lambda1;
    let y1 = if degenerate {
        reference.armchair
    } else {
        (v1[0] * reference.frame[0] + v1[1] * reference.frame[1]).normalize()
    };
    let theta = if degenerate {
        0.0
    } else {
        y1.dot(&reference.armchair).clamp(-1.0, 1.0).acos()
    };
    // principal curvatures from the mixed tensor a^{-1} b: κ = H ± √(H² − K)
    let bm = [
        [
            a_con[0][0] * b_cov[0][0] + a_con[0][1] * b_cov[1][0],
            a_con[0][0] * b_cov[0][1] + a_con[0][1] * b_cov[1][1],
        ],
        [
            a_con[1][0] * b_cov[0][0] + a_con[1][1] * b_cov[1][0],
            a_con[1][0] * b_cov[0][1] + a_con[1][1] * b_cov[1][1],
        ],
    ];
    let mean = 0.5 * (bm[0][0] + bm[1][1]);
    let gauss = bm[0][0] * bm[1][1] - bm[0][1] * bm[1][0];
    let disc = (mean * mean - gauss).max(0.0).sqrt();
    let normal = reference.normal;
    SurfacePointState {
        a_cov,
        a_con,
        b_cov,
        normal,
        christoffel: [[[0.0; 2]; 2]; 2],
        lambda1,
        lambda2,
        y1,
        area_stretch,
        kappa1: mean + disc,
        kappa2: mean - disc,
        theta,
        c_frame,
        tangents: [reference.frame[0], reference.frame[1]],
        reference,
    }
}

/// Logarithmic strain invariants (J1, J2, J3) of the state:
/// J1 = ln J, J2 = (ln λ)² with λ = √(λ1/λ2), J3 = (ln λ)³ cos 6θ.
pub fn log_invariants(state: &SurfacePointState) -> (f64, f64, f64) {
    let j1 = state.area_stretch.ln();
    let ln_lambda = 0.5 * (state.lambda1 / state.lambda2).ln();
    let j2 = ln_lambda * ln_lambda;
    let j3 = ln_lambda.powi(3) * (6.0 * state.theta).cos();
    (j1, j2, j3)
}

/// Maximum-stretch angle θ = arccos(Y₁ · x̂) ∈ [0, π]. Both vectors must be
/// unit length (tolerance 1e-9).
pub fn max_stretch_angle(y1: &Vec3, armchair: &Vec3) -> Result<f64> {
    if (y1.norm() - 1.0).abs() > 1e-9 || (armchair.norm() - 1.0).abs() > 1e-9 {
        return Err(CoreError::InvalidMesh(
            "max_stretch_angle expects unit-length inputs".into(),
        ));
    }
    Ok(y1.dot(armchair).clamp(-1.0, 1.0).acos())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::bspline::{basis_ders, find_span, open_uniform_knots};
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    /// Biquadratic single-element patch basis on [0,1]² at (u, v), flattened
    /// arrays over 9 control points (i fast).
    struct TestBasis {
        n: Vec<f64>,
        du: Vec<f64>,
        dv: Vec<f64>,
        duu: Vec<f64>,
        duv: Vec<f64>,
        dvv: Vec<f64>,
    }

    impl TestBasis {
        fn slice(&self) -> BasisSlice<'_> {
            BasisSlice {
                n: &self.n,
                d1: [&self.du, &self.dv],
                d2: [&self.duu, &self.duv, &self.dvv],
            }
        }
    }

    fn biquadratic_basis(u: f64, v: f64) -> TestBasis {
        let knots = open_uniform_knots(2, 1, 0.0, 1.0);
        let su = find_span(&knots, 2, u);
        let sv = find_span(&knots, 2, v);
        let bu = basis_ders(&knots, 2, su, u, 2);
        let bv = basis_ders(&knots, 2, sv, v, 2);
        let mut out = TestBasis {
            n: vec![0.0; 9],
            du: vec![0.0; 9],
            dv: vec![0.0; 9],
            duu: vec![0.0; 9],
            duv: vec![0.0; 9],
            dvv: vec![0.0; 9],
        };
        for j in 0..3 {
            for i in 0..3 {
                let l = j * 3 + i;
                out.n[l] = bu[0][i] * bv[0][j];
                out.du[l] = bu[1][i] * bv[0][j];
                out.dv[l] = bu[0][i] * bv[1][j];
                out.duu[l] = bu[2][i] * bv[0][j];
                out.duv[l] = bu[1][i] * bv[1][j];
                out.dvv[l] = bu[0][i] * bv[2][j];
            }
        }
        out
    }

    fn flat_grid(scale: f64) -> Vec<Pt3> {
        let mut pts = Vec::new();
        for j in 0..3 {
            for i in 0..3 {
                pts.push(Pt3::new(scale * i as f64 / 2.0, scale * j as f64 / 2.0, 0.0));
            }
        }
        pts
    }

    #[test]
    fn identity_configuration() {
        let basis = biquadratic_basis(0.37, 0.61);
        let pts = flat_grid(1.0);
        let s = evaluate_kinematics(&pts, &pts, &basis.slice(), Vec3::x(), 0).unwrap();
        assert_relative_eq!(s.lambda1, 1.0, epsilon = 1e-12);
        assert_relative_eq!(s.lambda2, 1.0, epsilon = 1e-12);
        assert_relative_eq!(s.area_stretch, 1.0, epsilon = 1e-12);
        assert_relative_eq!(s.kappa1, 0.0, epsilon = 1e-12);
        assert_relative_eq!(s.kappa2, 0.0, epsilon = 1e-12);
        assert_relative_eq!(s.normal.norm(), 1.0, epsilon = 1e-13);
        for al in 0..2 {
            for be in 0..2 {
                assert_relative_eq!(s.b_cov[al][be], s.reference.b_cov[al][be], epsilon = 1e-12);
            }
        }
        let (j1, j2, j3) = log_invariants(&s);
        assert_relative_eq!(j1, 0.0, epsilon = 1e-12);
        assert_relative_eq!(j2, 0.0, epsilon = 1e-12);
        assert_relative_eq!(j3, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn homogeneous_dilatation() {
        let basis = biquadratic_basis(0.2, 0.8);
        let refs = flat_grid(1.0);
        let curs = flat_grid(1.1);
        let s = evaluate_kinematics(&refs, &curs, &basis.slice(), Vec3::x(), 0).unwrap();
        assert_relative_eq!(s.lambda1, 1.1, epsilon = 1e-12);
        assert_relative_eq!(s.lambda2, 1.1, epsilon = 1e-12);
        assert_relative_eq!(s.area_stretch, 1.21, epsilon = 1e-12);
        let (j1, j2, j3) = log_invariants(&s);
        assert_relative_eq!(j1, 1.21_f64.ln(), epsilon = 1e-12);
        assert_relative_eq!(j1, 0.19062035960864972, epsilon = 1e-12);
        assert_relative_eq!(j2, 0.0, epsilon = 1e-12);
        assert_relative_eq!(j3, 0.0, epsilon = 1e-12);
        // pure dilatation keeps theta at its guarded value
        assert_eq!(s.theta, 0.0);
    }

    #[test]
    fn uniaxial_stretch_invariants() {
        // λ1 = 1.2 along x, λ2 = 1.0: J2 = (½ ln 1.2)², J3 = (½ ln 1.2)³ at θ=0
        let basis = biquadratic_basis(0.5, 0.5);
        let refs = flat_grid(1.0);
        let curs: Vec<Pt3> = refs.iter().map(|p| Pt3::new(1.2 * p.x, p.y, 0.0)).collect();
        let s = evaluate_kinematics(&refs, &curs, &basis.slice(), Vec3::x(), 0).unwrap();
        let (j1, j2, j3) = log_invariants(&s);
        let lnl = 0.5 * 1.2_f64.ln();
        assert_relative_eq!(j1, 1.2_f64.ln(), epsilon = 1e-12);
        assert_relative_eq!(j2, lnl * lnl, epsilon = 1e-12);
        assert_relative_eq!(j3, lnl.powi(3), epsilon = 1e-12);
        assert_relative_eq!(s.theta, 0.0, epsilon = 1e-9);
        // same stretch against a lattice rotated 30° flips the J3 sign
        let ac = Vec3::new((std::f64::consts::PI / 6.0).cos(), (std::f64::consts::PI / 6.0).sin(), 0.0);
        let s30 = evaluate_kinematics(&refs, &curs, &basis.slice(), ac, 0).unwrap();
        let (_, _, j3_30) = log_invariants(&s30);
        assert_relative_eq!(j3_30, -lnl.powi(3), epsilon = 1e-12);
    }

    #[test]
    fn cylinder_curvature_matches_analytic() {
        // wrap the flat grid onto a cylinder of radius R about the y axis;
        // use a small element so the quadratic interpolation error is tiny
        let r = 2.0;
        let basis = biquadratic_basis(0.5, 0.5);
        let h = 0.02;
        let phi_h = h / r;
        let mut refs = Vec::new();
        let mut curs = Vec::new();
        for j in 0..3 {
            for i in 0..3 {
                let s = h * i as f64 / 2.0;
                let y = h * j as f64 / 2.0;
                refs.push(Pt3::new(s, y, 0.0));
                // control polygon of the arc: ends on the circle, middle at
                // the tangent intersection; the quadratic then osculates the
                // circle with O((h/R)²) curvature error
                curs.push(match i {
                    0 => Pt3::new(0.0, y, 0.0),
                    1 => Pt3::new(r * (0.5 * phi_h).tan(), y, 0.0),
                    _ => Pt3::new(r * phi_h.sin(), y, r * (1.0 - phi_h.cos())),
                });
            }
        }
        let s = evaluate_kinematics(&refs, &curs, &basis.slice(), Vec3::x(), 0).unwrap();
        let kmax = s.kappa1.abs().max(s.kappa2.abs());
        let kmin = s.kappa1.abs().min(s.kappa2.abs());
        assert_relative_eq!(kmax, 1.0 / r, max_relative = 1e-4);
        assert!(kmin < 1e-6 / r);
    }

    #[test]
    fn frame_invariance_under_rigid_motion() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let basis = biquadratic_basis(0.31, 0.44);
        let refs = flat_grid(1.0);
        // a generic deformed configuration with bending
        let curs: Vec<Pt3> = refs
            .iter()
            .map(|p| {
                Pt3::new(
                    1.08 * p.x + 0.03 * p.y,
                    0.97 * p.y,
                    0.05 * (p.x * 2.1).sin() + 0.02 * p.x * p.y,
                )
            })
            .collect();
        let s0 = evaluate_kinematics(&refs, &curs, &basis.slice(), Vec3::x(), 0).unwrap();
        let axis = Vec3::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            .normalize();
        let rot = nalgebra::Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), 0.83);
        let shift = Vec3::new(0.4, -1.2, 2.2);
        let moved: Vec<Pt3> = curs.iter().map(|p| rot * p + shift).collect();
        let s1 = evaluate_kinematics(&refs, &moved, &basis.slice(), Vec3::x(), 0).unwrap();
        assert_relative_eq!(s0.lambda1, s1.lambda1, epsilon = 1e-10);
        assert_relative_eq!(s0.lambda2, s1.lambda2, epsilon = 1e-10);
        assert_relative_eq!(s0.area_stretch, s1.area_stretch, epsilon = 1e-10);
        assert_relative_eq!(s0.kappa1, s1.kappa1, epsilon = 1e-10);
        assert_relative_eq!(s0.kappa2, s1.kappa2, epsilon = 1e-10);
        let (a1, a2, a3) = log_invariants(&s0);
        let (b1, b2, b3) = log_invariants(&s1);
        assert_relative_eq!(a1, b1, epsilon = 1e-10);
        assert_relative_eq!(a2, b2, epsilon = 1e-10);
        assert_relative_eq!(a3, b3, epsilon = 1e-10);
    }

    #[test]
    fn generalized_eigen_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let basis = biquadratic_basis(0.5, 0.25);
        let refs = flat_grid(1.0);
        for _ in 0..25 {
            let curs: Vec<Pt3> = refs
                .iter()
                .map(|p| {
                    Pt3::new(
                        p.x * (1.0 + 0.2 * rng.gen::<f64>()) + 0.1 * rng.gen::<f64>() * p.y,
                        p.y * (1.0 + 0.2 * rng.gen::<f64>()),
                        0.1 * rng.gen::<f64>() * p.x,
                    )
                })
                .collect();
            let s = evaluate_kinematics(&refs, &curs, &basis.slice(), Vec3::x(), 0).unwrap();
            // the stretch eigenpairs satisfy (a - λ² A) v = 0 in frame
            // coordinates; reconstruct v from Y1
            let vy = [s.y1.dot(&s.reference.frame[0]), s.y1.dot(&s.reference.frame[1])];
            for (lam, v) in [(s.lambda1, vy), (s.lambda2, [-vy[1], vy[0]])] {
                let c = s.c_frame;
                let r0 = (c[0][0] - lam * lam) * v[0] + c[0][1] * v[1];
                let r1 = c[1][0] * v[0] + (c[1][1] - lam * lam) * v[1];
                let res = (r0 * r0 + r1 * r1).sqrt();
                assert!(res < 1e-10, "eigen residual {res}");
            }
        }
    }

    #[test]
    fn stretch_angle_rejects_non_unit_input() {
        assert!(max_stretch_angle(&(2.0 * Vec3::x()), &Vec3::x()).is_err());
        let th = max_stretch_angle(&Vec3::y(), &Vec3::x()).unwrap();
        assert_relative_eq!(th, std::f64::consts::FRAC_PI_2, epsilon = 1e-12);
        assert_relative_eq!((6.0 * th).cos(), -1.0, epsilon = 1e-12);
        // 30° from armchair is six-fold equivalent to zigzag
        let a30 = Vec3::new((std::f64::consts::PI / 6.0).cos(), (std::f64::consts::PI / 6.0).sin(), 0.0);
        let th30 = max_stretch_angle(&a30, &Vec3::x()).unwrap();
        assert_relative_eq!((6.0 * th30).cos(), -1.0, epsilon = 1e-12);
    }
}
