//! Graphene constitutive law: anisotropic hyperelastic membrane energy in
//! logarithmic strain invariants plus Canham bending, with analytic
//! Kirchhoff stress, bending moment, and all four tangent (elasticity)
//! tensors contracted by the stiffness blocks.
//!
//! The membrane energy is evaluated through the smooth representation
//! W(tr E, M̂:E, N̂:E) of the invariants, which removes the 0/0 ambiguity of
//! the stretch angle at equal principal stretches; the matrix-logarithm
//! derivatives use divided differences with series limits near coincident
//! eigenvalues.

use crate::analytical::GRAPHENE_RHO0;
use crate::geometry::{eig_sym2, RefPointData, SurfacePointState, Sym2};
use crate::{CoreError, Result};

/// Fourth-order surface tensor in contravariant components.
pub type Tensor4 = [[[[f64; 2]; 2]; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MembraneSet {
    Gga,
    Lda,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BendingSet {
    Fgbp,
    Sgbp,
    Qm,
}

/// Membrane and bending constants. Moduli are in N/m (= nN/nm), the
/// bending modulus in nN·nm, the density in mass-units/nm².
#[derive(Debug, Clone, Copy)]
pub struct MaterialParams {
    pub alpha_hat: f64,
    pub epsilon: f64,
    pub mu0: f64,
    pub mu1: f64,
    pub beta_hat: f64,
    pub eta0: f64,
    pub eta1: f64,
    pub c_bend: f64,
    pub rho0: f64,
    pub membrane_set: MembraneSet,
    pub bending_set: BendingSet,
}

impl MaterialParams {
    /// Graphene presets: ab-initio membrane constants (GGA or LDA) combined
    /// with a bending stiffness from the first/second-generation Brenner
    /// potential or quantum mechanics.
    pub fn graphene(membrane: MembraneSet, bending: BendingSet) -> Self {
        let (alpha_hat, epsilon, mu0, mu1, beta_hat, eta0, eta1) = match membrane {
            MembraneSet::Gga => (1.53, 93.84, 172.18, 27.03, 5.16, 94.65, 4393.26),
            MembraneSet::Lda => (1.38, 116.43, 164.17, 17.31, 6.22, 86.9, 3611.5),
        };
        let c_bend = match bending {
            BendingSet::Fgbp => 0.133,
            BendingSet::Sgbp => 0.225,
            BendingSet::Qm => 0.238,
        };
        MaterialParams {
            alpha_hat,
            epsilon,
            mu0,
            mu1,
            beta_hat,
            eta0,
            eta1,
            c_bend,
            rho0: GRAPHENE_RHO0,
            membrane_set: membrane,
            bending_set: bending,
        }
    }

    pub fn mu(&self, eps_a: f64) -> f64 {
        self.mu0 - self.mu1 * (self.beta_hat * eps_a).exp()
    }

    pub fn eta(&self, eps_a: f64) -> f64 {
        self.eta0 - self.eta1 * eps_a * eps_a
    }
}

impl Default for MaterialParams {
    fn default() -> Self {
        MaterialParams::graphene(MembraneSet::Gga, BendingSet::Qm)
    }
}

/// Reference surface density of graphene (mass-units/nm²).
pub fn graphene_density() -> f64 {
    GRAPHENE_RHO0
}

/// Area strain ε_a* at which the shear modulus μ(ε_a) vanishes, and the
/// corresponding area stretch J* = exp(ε_a*).
pub fn vanishing_shear_strain(params: &MaterialParams) -> Result<(f64, f64)> {
    if params.mu1 <= 0.0 {
        return Err(CoreError::InvalidMaterial(
            "vanishing-shear strain needs mu1 > 0".into(),
        ));
    }
    let eps = (params.mu0 / params.mu1).ln() / params.beta_hat;
    Ok((eps, eps.exp()))
}

/// Membrane strain energy density W_m(J1, J2, J3) per reference area.
pub fn membrane_energy(j1: f64, j2: f64, j3: f64, params: &MaterialParams) -> f64 {
    let t = j1;
    let w_dil = params.epsilon * (1.0 - (1.0 + params.alpha_hat * t) * (-params.alpha_hat * t).exp());
    w_dil + 2.0 * params.mu(t) * j2 + params.eta(t) * j3
}

/// Canham bending energy density W_b = J (c/2)(κ1² + κ2²) per reference
/// area.
pub fn bending_energy(kappa1: f64, kappa2: f64, j: f64, params: &MaterialParams) -> f64 {
    j * 0.5 * params.c_bend * (kappa1 * kappa1 + kappa2 * kappa2)
}

/// Referential Kirchhoff stress and bending moment in contravariant
/// components: τ^αβ = 2 ∂W/∂a_αβ, M₀^αβ = ∂W/∂b_αβ.
#[derive(Debug, Clone, Copy)]
pub struct StressState {
    pub tau: Sym2,
    pub m0: Sym2,
}

/// The four tangent tensors contracted by the material stiffness blocks:
/// Δτ = ½ c Δa + d Δb, ΔM₀ = ½ e Δa + f Δb.
#[derive(Debug, Clone)]
pub struct TangentTensors {
    pub c: Tensor4,
    pub d: Tensor4,
    pub e: Tensor4,
    pub f: Tensor4,
}

/// Energy, stress, and (optionally) tangents at one quadrature point.
#[derive(Debug, Clone)]
pub struct PointResponse {
    pub energy: f64,
    pub stress: StressState,
    pub tangents: Option<TangentTensors>,
}

/// Total energy density (membrane + bending) of a kinematic state.
pub fn energy_density(state: &SurfacePointState, params: &MaterialParams) -> f64 {
    point_response(state, params, false).energy
}

/// Stress and moment of a kinematic state.
pub fn stress_and_moment(state: &SurfacePointState, params: &MaterialParams) -> StressState {
    point_response(state, params, false).stress
}

/// Analytic tangent tensors of a kinematic state.
pub fn tangent_tensors(state: &SurfacePointState, params: &MaterialParams) -> TangentTensors {
    point_response(state, params, true).tangents.unwrap()
}

/// Full constitutive evaluation.
pub fn point_response(
    state: &SurfacePointState,
    params: &MaterialParams,
    with_tangents: bool,
) -> PointResponse {
    let reference = &state.reference;
    let membrane = membrane_response(reference, &state.c_frame, params, with_tangents);
    let bending = bending_response(
        &state.a_con,
        &state.b_cov,
        state.area_stretch,
        params,
        with_tangents,
    );

    // membrane stress/tangent transformed from frame to contravariant
    // components: τ^αβ = T^α_k T^β_l S_kl
    let t = &reference.t_con;
    let mut tau = bending.tau;
    for al in 0..2 {
        for be in 0..2 {
            let mut s = 0.0;
            for k in 0..2 {
                for l in 0..2 {
                    s += t[al][k] * t[be][l] * membrane.stress[k][l];
                }
            }
            tau[al][be] += s;
        }
    }
    let tangents = if with_tangents {
        let mut c = bending.c;
        let mc = membrane.tangent.as_ref().unwrap();
        for a in 0..2 {
            for b in 0..2 {
                for g in 0..2 {
                    for d2 in 0..2 {
                        let mut s = 0.0;
                        for k in 0..2 {
                            for l in 0..2 {
                                for m in 0..2 {
                                    for n in 0..2 {
                                        s += t[a][k] * t[b][l] * t[g][m] * t[d2][n]
                                            * mc[k][l][m][n];
                                    }
                                }
                            }
                        }
                        c[a][b][g][d2] += s;
                    }
                }
            }
        }
        Some(TangentTensors { c, d: bending.d, e: bending.e, f: bending.f })
    } else {
        None
    };

    PointResponse {
        energy: membrane.energy + bending.energy,
        stress: StressState { tau, m0: bending.m0 },
        tangents,
    }
}

// -------------------------------------------------------------------------
// membrane branch: W(tr E, M̂:E, N̂:E) through E = ½ ln C
// -------------------------------------------------------------------------

struct MembraneResponse {
    energy: f64,
    /// 2nd Piola-Kirchhoff stress in frame coordinates, S = 2 ∂W/∂C
    stress: Sym2,
    /// frame elasticity: ΔS = ½ ℂ ΔC
    tangent: Option<Tensor4>,
}

/// Scalar energy derivatives with respect to (t, e_M, e_N).
struct Scalars {
    w: f64,
    wt: f64,
    wm: f64,
    wn: f64,
    wtt: f64,
    wtm: f64,
    wtn: f64,
    wmm: f64,
    wmn: f64,
    wnn: f64,
}

fn scalars(t: f64, em: f64, en: f64, p: &MaterialParams) -> Scalars {
    let ea = (-p.alpha_hat * t).exp();
    let w_dil = p.epsilon * (1.0 - (1.0 + p.alpha_hat * t) * ea);
    let w_dil_t = p.epsilon * p.alpha_hat * p.alpha_hat * t * ea;
    let w_dil_tt = p.epsilon * p.alpha_hat * p.alpha_hat * (1.0 - p.alpha_hat * t) * ea;
    let eb = (p.beta_hat * t).exp();
    let mu = p.mu0 - p.mu1 * eb;
    let mu_t = -p.mu1 * p.beta_hat * eb;
    let mu_tt = -p.mu1 * p.beta_hat * p.beta_hat * eb;
    let eta = p.eta0 - p.eta1 * t * t;
    let eta_t = -2.0 * p.eta1 * t;
    let eta_tt = -2.0 * p.eta1;
    // J2 = (e_M² + e_N²)/4, J3 = (e_M³ − 3 e_M e_N²)/8
    let j2 = 0.25 * (em * em + en * en);
    let j3 = 0.125 * (em * em * em - 3.0 * em * en * en);
    let j2_m = 0.5 * em;
    let j2_n = 0.5 * en;
    let j3_m = 0.375 * (em * em - en * en);
    let j3_n = -0.75 * em * en;
    Scalars {
        w: w_dil + 2.0 * mu * j2 + eta * j3,
        wt: w_dil_t + 2.0 * mu_t * j2 + eta_t * j3,
        wm: 2.0 * mu * j2_m + eta * j3_m,
        wn: 2.0 * mu * j2_n + eta * j3_n,
        wtt: w_dil_tt + 2.0 * mu_tt * j2 + eta_tt * j3,
        wtm: 2.0 * mu_t * j2_m + eta_t * j3_m,
        wtn: 2.0 * mu_t * j2_n + eta_t * j3_n,
        wmm: 0.5 * 2.0 * mu + eta * 0.75 * em,
        wmn: -eta * 0.75 * en,
        wnn: 0.5 * 2.0 * mu - eta * 0.75 * em,
    }
}

// matrix helpers on 2x2
fn mat_mul(a: &Sym2, b: &Sym2) -> Sym2 {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn mat3(a: &Sym2, b: &Sym2, c: &Sym2) -> Sym2 {
    mat_mul(&mat_mul(a, b), c)
}

fn ddot(a: &Sym2, b: &Sym2) -> f64 {
    a[0][0] * b[0][0] + a[0][1] * b[0][1] + a[1][0] * b[1][0] + a[1][1] * b[1][1]
}

/// Divided differences of f(c) = ½ ln c, with series limits when the two
/// eigenvalues nearly coincide.
struct LogDiffs {
    /// f[c_i, c_j] indexed by the number of 2-indices (0, 1, 2)
    d1: [f64; 3],
    /// f[c_i, c_j, c_k] indexed by the number of 2-indices (0..=3)
    d2: [f64; 4],
}

fn log_diffs(c1: f64, c2: f64) -> LogDiffs {
    let f = |c: f64| 0.5 * c.ln();
    let fp = |c: f64| 0.5 / c;
    let fpp = |c: f64| -0.5 / (c * c);
    let h = c1 - c2;
    let near = h.abs() < 1e-4 * (c1 + c2);
    let d11 = if near {
        let m = 0.5 * (c1 + c2);
        let hh = 0.5 * h;
        // symmetric expansion: f'(m) + f'''(m) h²/6 + f⁽⁵⁾(m) h⁴/120
        0.5 / m + (1.0 / (m * m * m)) * hh * hh / 6.0
            + (12.0 / m.powi(5)) * hh.powi(4) / 120.0
    } else {
        (f(c1) - f(c2)) / h
    };
    // second divided differences [x,x,y]
    let dxxy = |x: f64, y: f64, dxy: f64| -> f64 {
        if near {
            let e = y - x;
            // f''/2 + f''' e/6 + f⁗ e²/24 + f⁽⁵⁾ e³/120
            -0.25 / (x * x) + e / (6.0 * x.powi(3)) - 3.0 * e * e / (24.0 * x.powi(4))
                + 12.0 * e.powi(3) / (120.0 * x.powi(5))
        } else {
            (fp(x) - dxy) / (x - y)
        }
    };
    LogDiffs {
        d1: [fp(c1), d11, fp(c2)],
        d2: [
            0.5 * fpp(c1),
            dxxy(c1, c2, d11),
            dxxy(c2, c1, d11),
            0.5 * fpp(c2),
        ],
    }
}

fn membrane_response(
    reference: &RefPointData,
    c_frame: &Sym2,
    params: &MaterialParams,
    with_tangents: bool,
) -> MembraneResponse {
    let ((c1, v1), (c2, v2)) = eig_sym2(c_frame);
    let proj = |v: [f64; 2]| -> Sym2 {
        [[v[0] * v[0], v[0] * v[1]], [v[0] * v[1], v[1] * v[1]]]
    };
    let m = [proj(v1), proj(v2)];
    let diffs = log_diffs(c1, c2);
    let f1 = 0.5 * c1.ln();
    let f2 = 0.5 * c2.ln();
    let e_log = [
        [f1 * m[0][0][0] + f2 * m[1][0][0], f1 * m[0][0][1] + f2 * m[1][0][1]],
        [f1 * m[0][1][0] + f2 * m[1][1][0], f1 * m[0][1][1] + f2 * m[1][1][1]],
    ];
    // lattice structural tensors in the frame
    let phi = reference.lattice_angle;
    let (s2, co2) = (2.0 * phi).sin_cos();
    let m_hat = [[co2, s2], [s2, -co2]];
    let n_hat = [[-s2, co2], [co2, s2]];
    let ident = [[1.0, 0.0], [0.0, 1.0]];

    let t = e_log[0][0] + e_log[1][1];
    let em = ddot(&m_hat, &e_log);
    let en = ddot(&n_hat, &e_log);
    let sc = scalars(t, em, en, params);

    // G = ∂W/∂E
    let mut g = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            g[i][j] = sc.wt * ident[i][j] + sc.wm * m_hat[i][j] + sc.wn * n_hat[i][j];
        }
    }
    // S = 2 Σ_ij f[c_i,c_j] m_i G m_j
    let mut stress = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let mgm = mat3(&m[i], &g, &m[j]);
            let w = 2.0 * diffs.d1[i + j];
            for r in 0..2 {
                for cidx in 0..2 {
                    stress[r][cidx] += w * mgm[r][cidx];
                }
            }
        }
    }

    let tangent = if with_tangents {
        // dE[V] = Σ f[ij] m_i V m_j
        let de = |v: &Sym2| -> Sym2 {
            let mut out = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    let t3 = mat3(&m[i], v, &m[j]);
                    let w = diffs.d1[i + j];
                    for r in 0..2 {
                        for c in 0..2 {
                            out[r][c] += w * t3[r][c];
                        }
                    }
                }
            }
            out
        };
        // dG[V] = H : dE[V] with H = Σ w_pq P_p ⊗ P_q
        let dg = |v: &Sym2| -> Sym2 {
            let dev = de(v);
            let (pt, pm, pn) = (
                dev[0][0] + dev[1][1],
                ddot(&m_hat, &dev),
                ddot(&n_hat, &dev),
            );
            let ct = sc.wtt * pt + sc.wtm * pm + sc.wtn * pn;
            let cm = sc.wtm * pt + sc.wmm * pm + sc.wmn * pn;
            let cn = sc.wtn * pt + sc.wmn * pm + sc.wnn * pn;
            let mut out = [[0.0; 2]; 2];
            for r in 0..2 {
                for c in 0..2 {
                    out[r][c] = ct * ident[r][c] + cm * m_hat[r][c] + cn * n_hat[r][c];
                }
            }
            out
        };
        // G-contracted curvature of the log map:
        // M2[V] = Σ_ijk f[c_i,c_j,c_k] (m_i G m_k V m_j + m_j V m_i G m_k)
        let m2 = |v: &Sym2| -> Sym2 {
            let mut out = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    for k in 0..2 {
                        let w = diffs.d2[i + j + k];
                        let p1 = mat3(&mat_mul(&m[i], &g), &m[k], &mat_mul(v, &m[j]));
                        let p2 = mat3(&mat_mul(&m[j], v), &m[i], &mat_mul(&g, &m[k]));
                        for r in 0..2 {
                            for c in 0..2 {
                                out[r][c] += w * (p1[r][c] + p2[r][c]);
                            }
                        }
                    }
                }
            }
            out
        };
        let mut cc = [[[[0.0; 2]; 2]; 2]; 2];
        for mm in 0..2 {
            for nn in 0..2 {
                let mut v = [[0.0; 2]; 2];
                if mm == nn {
                    v[mm][nn] = 1.0;
                } else {
                    v[mm][nn] = 0.5;
                    v[nn][mm] = 0.5;
                }
                let dgv = dg(&v);
                // term1 = Σ f[ij] m_i dG[V] m_j
                let mut ds = [[0.0; 2]; 2];
                for i in 0..2 {
                    for j in 0..2 {
                        let t3 = mat3(&m[i], &dgv, &m[j]);
                        let w = diffs.d1[i + j];
                        for r in 0..2 {
                            for c in 0..2 {
                                ds[r][c] += w * t3[r][c];
                            }
                        }
                    }
                }
                let curv = m2(&v);
                for r in 0..2 {
                    for c in 0..2 {
                        // dS[V] = 2 (term1 + M2[V]); ℂ_{rcmn} = 2 dS_{rc}
                        cc[r][c][mm][nn] = 4.0 * (ds[r][c] + curv[r][c]);
                    }
                }
            }
        }
        Some(cc)
    } else {
        None
    };

    MembraneResponse { energy: sc.w, stress, tangent }
}

// -------------------------------------------------------------------------
// bending branch: W_b = J (c/2) b^αβ b_αβ in curvilinear components
// -------------------------------------------------------------------------

struct BendingResponse {
    energy: f64,
    tau: Sym2,
    m0: Sym2,
    c: Tensor4,
    d: Tensor4,
    e: Tensor4,
    f: Tensor4,
}

/// Symmetrize minor pairs (αβ) and (γδ).
fn sym_minor(t: &Tensor4) -> Tensor4 {
    let mut out = [[[[0.0; 2]; 2]; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            for g in 0..2 {
                for d in 0..2 {
                    out[a][b][g][d] = 0.25
                        * (t[a][b][g][d] + t[b][a][g][d] + t[a][b][d][g] + t[b][a][d][g]);
                }
            }
        }
    }
    out
}

fn bending_response(
    a_con: &Sym2,
    b_cov: &Sym2,
    j: f64,
    params: &MaterialParams,
    with_tangents: bool,
) -> BendingResponse {
    let cb = params.c_bend;
    // raised curvature b^αβ and the contraction chain
    let bm = mat_mul(a_con, b_cov); // mixed b^α_β
    let b_up = mat_mul(&bm, a_con); // b^αβ
    let q = bm[0][0] * bm[0][0] + 2.0 * bm[0][1] * bm[1][0] + bm[1][1] * bm[1][1]; // κ1² + κ2²
    let b2_up = mat3(&bm, &bm, a_con); // (b a⁻¹ b) raised: a^{αγ}b_γδ a^{δε}b_εζ a^{ζβ}

    let energy = 0.5 * cb * j * q;
    let mut tau = [[0.0; 2]; 2];
    let mut m0 = [[0.0; 2]; 2];
    for al in 0..2 {
        for be in 0..2 {
            tau[al][be] = 0.5 * cb * j * q * a_con[al][be] - 2.0 * cb * j * b2_up[al][be];
            m0[al][be] = cb * j * b_up[al][be];
        }
    }

    let (mut c, mut d, mut e, mut f) = (
        [[[[0.0; 2]; 2]; 2]; 2],
        [[[[0.0; 2]; 2]; 2]; 2],
        [[[[0.0; 2]; 2]; 2]; 2],
        [[[[0.0; 2]; 2]; 2]; 2],
    );
    if with_tangents {
        let mut c_raw = [[[[0.0; 2]; 2]; 2]; 2];
        let mut d_raw = [[[[0.0; 2]; 2]; 2]; 2];
        let mut f_raw = [[[[0.0; 2]; 2]; 2]; 2];
        for al in 0..2 {
            for be in 0..2 {
                for ga in 0..2 {
                    for de in 0..2 {
                        let a_ab = a_con[al][be];
                        let a_gd = a_con[ga][de];
                        // Δτ coefficient against Δa_γδ (before minor sym, ×2)
                        c_raw[al][be][ga][de] = 2.0
                            * (0.5 * cb
                                * (0.5 * j * q * a_gd * a_ab
                                    - 2.0 * j * b2_up[ga][de] * a_ab
                                    - j * q * a_con[al][ga] * a_con[be][de])
                                - 2.0 * cb
                                    * (0.5 * j * a_gd * b2_up[al][be]
                                        - j * (a_con[al][ga] * b2_up[de][be]
                                            + b_up[al][ga] * b_up[de][be]
                                            + b2_up[al][ga] * a_con[de][be])));
                        // Δτ coefficient against Δb_γδ
                        d_raw[al][be][ga][de] = cb * j * a_ab * b_up[ga][de]
                            - 2.0 * cb * j
                                * (a_con[al][ga] * b_up[de][be] + b_up[al][ga] * a_con[de][be]);
                        // ΔM₀ coefficient against Δb_γδ
                        f_raw[al][be][ga][de] = cb * j * a_con[al][ga] * a_con[be][de];
                    }
                }
            }
        }
        c = sym_minor(&c_raw);
        d = sym_minor(&d_raw);
        f = sym_minor(&f_raw);
        // e^{αβγδ} = d^{γδαβ}
        for al in 0..2 {
            for be in 0..2 {
                for ga in 0..2 {
                    for de in 0..2 {
                        e[al][be][ga][de] = d[ga][de][al][be];
                    }
                }
            }
        }
    }
    BendingResponse { energy, tau, m0, c, d, e, f }
}
