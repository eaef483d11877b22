//! Global assembly: mass matrix, internal force vector with the consistent
//! tangent stiffness (material + geometric blocks), penalty contributions,
//! and Dirichlet reduction. Element loops run in parallel; scattering is
//! sequential in element order so results are bitwise reproducible.

use crate::discretization::{ElementQuad, ShellModel};
use crate::geometry::{self, Vec3};
use crate::linalg::{PatternBuilder, SymCsr};
use crate::material;
use crate::{CoreError, Result};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Assembled operators of the discretized weak form.
#[derive(Debug, Clone)]
pub struct SystemMatrices {
    pub mass: SymCsr,
    pub stiffness: SymCsr,
    pub f_int: Vec<f64>,
}

/// Mapping between the full dof set and the free (reduced) dofs.
#[derive(Debug, Clone)]
pub struct DofMap {
    /// full dof -> reduced index
    pub map: Vec<Option<usize>>,
    /// reduced index -> full dof
    pub free: Vec<usize>,
}

impl DofMap {
    pub fn new(n_dof: usize, fixed: &[usize]) -> Result<Self> {
        let mut is_fixed = vec![false; n_dof];
        for &d in fixed {
            is_fixed[d] = true;
        }
        let mut map = vec![None; n_dof];
        let mut free = Vec::with_capacity(n_dof - fixed.len());
        for (d, fx) in is_fixed.iter().enumerate() {
            if !fx {
                map[d] = Some(free.len());
                free.push(d);
            }
        }
        if free.is_empty() {
            return Err(CoreError::OverConstrained);
        }
        Ok(DofMap { map, free })
    }

    pub fn n_free(&self) -> usize {
        self.free.len()
    }

    pub fn gather(&self, full: &[f64]) -> Vec<f64> {
        self.free.iter().map(|&d| full[d]).collect()
    }

    pub fn scatter_add(&self, reduced: &[f64], full: &mut [f64]) {
        for (r, &d) in self.free.iter().enumerate() {
            full[d] += reduced[r];
        }
    }
}

/// Reduce a full-dof matrix to the free dofs (rows and columns of fixed
/// dofs eliminated, not penalized).
pub fn apply_dirichlet(matrix: &SymCsr, dofs: &DofMap) -> SymCsr {
    matrix.reduce(&dofs.map, dofs.n_free())
}

/// Sparsity template of the stiffness matrix: element cliques plus the
/// penalty-row cliques.
pub fn stiffness_pattern(model: &ShellModel) -> SymCsr {
    let mut builder = PatternBuilder::new(model.n_dof());
    for quad in &model.quadrature {
        let dofs = element_dofs(quad);
        builder.add_clique(&dofs);
    }
    for pc in model.continuity.iter().chain(&model.clamped) {
        let dofs: Vec<usize> = pc
            .rows
            .iter()
            .flat_map(|&(cp, _)| [3 * cp, 3 * cp + 1, 3 * cp + 2])
            .collect();
        builder.add_clique(&dofs);
    }
    builder.build()
}

/// Sparsity template of the mass matrix (element cliques only).
pub fn mass_pattern(model: &ShellModel) -> SymCsr {
    let mut builder = PatternBuilder::new(model.n_dof());
    for quad in &model.quadrature {
        builder.add_clique(&element_dofs(quad));
    }
    builder.build()
}

fn element_dofs(quad: &ElementQuad) -> Vec<usize> {
    quad.points[0]
        .cps
        .iter()
        .flat_map(|&g| [3 * g, 3 * g + 1, 3 * g + 2])
        .collect()
}

/// Consistent mass matrix M = ∫ ρ₀ NᵀN dA over the reference configuration.
/// Deformation-independent; build once and cache.
pub fn assemble_mass(model: &ShellModel) -> SymCsr {
    let mut m = mass_pattern(model);
    let rho = model.material.rho0;
    for quad in &model.quadrature {
        let cps = &quad.points[0].cps;
        let n_sup = cps.len();
        let mut local = vec![0.0; n_sup * n_sup];
        for qp in &quad.points {
            let w = rho * qp.weight * qp.reference.jac;
            for i in 0..n_sup {
                for j in 0..n_sup {
                    local[i * n_sup + j] += w * qp.basis.n[i] * qp.basis.n[j];
                }
            }
        }
        for (i, &gi) in cps.iter().enumerate() {
            for (j, &gj) in cps.iter().enumerate() {
                if gj < gi {
                    continue;
                }
                let v = local[i * n_sup + j];
                for c in 0..3 {
                    if 3 * gi + c <= 3 * gj + c {
                        m.add(3 * gi + c, 3 * gj + c, v);
                    }
                }
            }
        }
    }
    m
}

struct ElementContribution {
    dofs: Vec<usize>,
    f: Vec<f64>,
    k: Vec<f64>,
    energy: f64,
}

/// Internal force and consistent tangent of one element at the current
/// displacement. Returns the element energy as well.
fn element_internal(model: &ShellModel, quad: &ElementQuad, u: &[f64]) -> Result<ElementContribution> {
    let (refs, curs) = model.support_positions(quad, u);
    let n_sup = refs.len();
    let n_loc = 3 * n_sup;
    let mut f = vec![0.0; n_loc];
    let mut k = vec![0.0; n_loc * n_loc];
    let mut energy = 0.0;
    for qp in &quad.points {
        let state = geometry::current_state(qp.reference.clone(), &curs, &qp.basis.slice(), quad.element)?;
        let resp = material::point_response(&state, &model.material, true);
        let tg = resp.tangents.as_ref().unwrap();
        let tau = &resp.stress.tau;
        let m0 = &resp.stress.m0;
        let w = qp.weight * qp.reference.jac;
        energy += w * resp.energy;

        let basis = &qp.basis;
        let d1 = [&basis.du, &basis.dv];
        let a = &state.tangents;
        let n = &state.normal;
        let a_up = [
            state.a_con[0][0] * a[0] + state.a_con[0][1] * a[1],
            state.a_con[1][0] * a[0] + state.a_con[1][1] * a[1],
        ];
        // covariant second derivatives Ñ_{I;αβ} = N_{I,αβ} − Γ^γ_{αβ} N_{I,γ}
        let idx = [[0usize, 1], [1, 2]];
        let d2 = [&basis.duu, &basis.duv, &basis.dvv];
        let mut ncov = vec![[[0.0; 2]; 2]; n_sup];
        for i in 0..n_sup {
            for al in 0..2 {
                for be in 0..2 {
                    let mut v = d2[idx[al][be]][i];
                    for ga in 0..2 {
                        v -= state.christoffel[ga][al][be] * d1[ga][i];
                    }
                    ncov[i][al][be] = v;
                }
            }
        }

        // internal force: τ^{αβ} N_{I,α} a_β + M₀^{αβ} Ñ_{I;αβ} n
        for i in 0..n_sup {
            let mut fv = Vec3::zeros();
            for al in 0..2 {
                for be in 0..2 {
                    fv += tau[al][be] * d1[al][i] * a[be];
                    fv += m0[al][be] * ncov[i][al][be] * n;
                }
            }
            for c in 0..3 {
                f[3 * i + c] += w * fv[c];
            }
        }

        // pair-independent 3x3 kernels of the material blocks
        let outer = |x: &Vec3, y: &Vec3| -> [[f64; 3]; 3] {
            let mut o = [[0.0; 3]; 3];
            for r in 0..3 {
                for s in 0..3 {
                    o[r][s] = x[r] * y[s];
                }
            }
            o
        };
        let mut k_tt = [[[[0.0; 3]; 3]; 2]; 2]; // [α][δ] -> 3x3
        for al in 0..2 {
            for de in 0..2 {
                for be in 0..2 {
                    for ga in 0..2 {
                        let c = tg.c[al][be][ga][de];
                        if c == 0.0 {
                            continue;
                        }
                        let o = outer(&a[be], &a[ga]);
                        for r in 0..3 {
                            for s in 0..3 {
                                k_tt[al][de][r][s] += c * o[r][s];
                            }
                        }
                    }
                }
            }
        }
        // k_τM: [α][γδ] -> (a_β ⊗ n) weighted by d
        let mut k_tm = [[[[[0.0; 3]; 3]; 2]; 2]; 2]; // [α][γ][δ]
        // k_Mτ: [αβ][γ]... build as [γ... use same layout transposed later
        let mut k_mt = [[[[[0.0; 3]; 3]; 2]; 2]; 2]; // [α][β][δ] -> (n ⊗ a_γ) summed over γ
        for al in 0..2 {
            for be in 0..2 {
                for ga in 0..2 {
                    for de in 0..2 {
                        let dv = tg.d[al][be][ga][de];
                        if dv != 0.0 {
                            let o = outer(&a[be], n);
                            for r in 0..3 {
                                for s in 0..3 {
                                    k_tm[al][ga][de][r][s] += dv * o[r][s];
                                }
                            }
                        }
                        let ev = tg.e[al][be][ga][de];
                        if ev != 0.0 {
                            let o = outer(n, &a[ga]);
                            for r in 0..3 {
                                for s in 0..3 {
                                    k_mt[al][be][de][r][s] += ev * o[r][s];
                                }
                            }
                        }
                    }
                }
            }
        }
        let n_outer = outer(n, n);
        // geometric moment kernels
        let q_m1 = -(state.b_cov[0][0] * m0[0][0]
            + state.b_cov[0][1] * m0[0][1]
            + state.b_cov[1][0] * m0[1][0]
            + state.b_cov[1][1] * m0[1][1]);
        // w_I = Σ_γ N_{I,γ} a^γ and m_J = Σ_{αβ} M₀^{αβ} Ñ_{J;αβ}
        let mut wvec = vec![Vec3::zeros(); n_sup];
        let mut mcontr = vec![0.0; n_sup];
        for i in 0..n_sup {
            wvec[i] = d1[0][i] * a_up[0] + d1[1][i] * a_up[1];
            let mut s = 0.0;
            for al in 0..2 {
                for be in 0..2 {
                    s += m0[al][be] * ncov[i][al][be];
                }
            }
            mcontr[i] = s;
        }

        for i in 0..n_sup {
            for j in 0..n_sup {
                let mut blk = [[0.0; 3]; 3];
                // material: k_ττ
                for al in 0..2 {
                    for de in 0..2 {
                        let nn = d1[al][i] * d1[de][j];
                        if nn != 0.0 {
                            for r in 0..3 {
                                for s in 0..3 {
                                    blk[r][s] += nn * k_tt[al][de][r][s];
                                }
                            }
                        }
                    }
                }
                // material: k_τM and k_Mτ
                for al in 0..2 {
                    for ga in 0..2 {
                        for de in 0..2 {
                            let c_tm = d1[al][i] * ncov[j][ga][de];
                            let c_mt = ncov[i][al][ga] * d1[de][j];
                            for r in 0..3 {
                                for s in 0..3 {
                                    blk[r][s] += c_tm * k_tm[al][ga][de][r][s]
                                        + c_mt * k_mt[al][ga][de][r][s];
                                }
                            }
                        }
                    }
                }
                // material: k_MM (scalar contraction times n ⊗ n)
                let mut s_mm = 0.0;
                for al in 0..2 {
                    for be in 0..2 {
                        for ga in 0..2 {
                            for de in 0..2 {
                                s_mm += tg.f[al][be][ga][de] * ncov[i][al][be] * ncov[j][ga][de];
                            }
                        }
                    }
                }
                // geometric: k_τ (identity block) and k_M1 (n ⊗ n)
                let mut s_tau = 0.0;
                let mut s_m1 = 0.0;
                for al in 0..2 {
                    for be in 0..2 {
                        s_tau += tau[al][be] * d1[al][i] * d1[be][j];
                        s_m1 += q_m1 * state.a_con[al][be] * d1[al][i] * d1[be][j];
                    }
                }
                for r in 0..3 {
                    blk[r][r] += s_tau;
                    for s in 0..3 {
                        blk[r][s] += (s_mm + s_m1) * n_outer[r][s];
                    }
                }
                // geometric: k_M2 + k_M2ᵀ
                // k_M2[i][j] = −(n ⊗ w_I) m_J
                for r in 0..3 {
                    for s in 0..3 {
                        blk[r][s] += -(n[r] * wvec[i][s]) * mcontr[j]
                            - (wvec[j][r] * n[s]) * mcontr[i];
                    }
                }
                for r in 0..3 {
                    for s in 0..3 {
                        k[(3 * i + r) * n_loc + (3 * j + s)] += w * blk[r][s];
                    }
                }
            }
        }
    }
    Ok(ElementContribution { dofs: element_dofs(quad), f, k, energy })
}

/// Assemble internal force and tangent stiffness of the shell (material +
/// geometric), adding into `k` and `f`. Returns the strain energy.
pub fn assemble_internal_into(
    model: &ShellModel,
    u: &[f64],
    k: &mut SymCsr,
    f: &mut [f64],
) -> Result<f64> {
    #[cfg(feature = "parallel")]
    let contributions: Result<Vec<ElementContribution>> = model
        .quadrature
        .par_iter()
        .map(|quad| element_internal(model, quad, u))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let contributions: Result<Vec<ElementContribution>> = model
        .quadrature
        .iter()
        .map(|quad| element_internal(model, quad, u))
        .collect();
    let mut energy = 0.0;
    for contrib in contributions? {
        energy += contrib.energy;
        let n_loc = contrib.dofs.len();
        for (i, &gi) in contrib.dofs.iter().enumerate() {
            f[gi] += contrib.f[i];
            for (j, &gj) in contrib.dofs.iter().enumerate() {
                if gj >= gi {
                    k.add(gi, gj, contrib.k[i * n_loc + j]);
                }
            }
        }
    }
    Ok(energy)
}

/// Assemble the quadratic penalty contributions (interface continuity and
/// clamped-edge rotation) into `k` and `f`. Returns the penalty energy.
///
/// The rows are linear functionals of the control points, so the stiffness
/// is constant and the force is exactly K_p (x − x_ref).
pub fn assemble_penalty_into(
    model: &ShellModel,
    u: &[f64],
    k: &mut SymCsr,
    f: &mut [f64],
) -> f64 {
    let k_eff = model.penalty_kp; // per unit length, 1 nm reference folded in
    let mut energy = 0.0;
    for pc in model.continuity.iter().chain(&model.clamped) {
        let w = k_eff * pc.weight;
        // g = Σ c_i x_i − offset
        let mut g = -pc.offset;
        for &(cp, c) in &pc.rows {
            let base = model.ref_cp[cp];
            g += c * Vec3::new(
                base.x + u[3 * cp],
                base.y + u[3 * cp + 1],
                base.z + u[3 * cp + 2],
            );
        }
        let pg = match pc.direction {
            None => g,
            Some(dir) => dir.dot(&g) * dir,
        };
        energy += 0.5 * w * pg.dot(&pg);
        for &(cp, c) in &pc.rows {
            for r in 0..3 {
                f[3 * cp + r] += w * c * pg[r];
            }
        }
        let proj: [[f64; 3]; 3] = match pc.direction {
            None => [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            Some(d) => {
                let mut p = [[0.0; 3]; 3];
                for r in 0..3 {
                    for s in 0..3 {
                        p[r][s] = d[r] * d[s];
                    }
                }
                p
            }
        };
        for &(ci, coef_i) in &pc.rows {
            for &(cj, coef_j) in &pc.rows {
                for r in 0..3 {
                    for s in 0..3 {
                        let (gi, gj) = (3 * ci + r, 3 * cj + s);
                        if gj >= gi {
                            k.add(gi, gj, w * coef_i * coef_j * proj[r][s]);
                        }
                    }
                }
            }
        }
    }
    energy
}

/// Standalone rotation-penalty stiffness (constant operator; the force at
/// a bent state is K_p · u).
pub fn assemble_rotation_penalty(model: &ShellModel) -> (SymCsr, Vec<f64>) {
    let mut k = stiffness_pattern(model);
    let mut f = vec![0.0; model.n_dof()];
    let u = vec![0.0; model.n_dof()];
    assemble_penalty_into(model, &u, &mut k, &mut f);
    (k, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::make_square_plate;
    use crate::material::MaterialParams;
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn small_plate() -> ShellModel {
        make_square_plate(2.0, 2, 2, 2, 0.0, MaterialParams::default()).unwrap()
    }

    #[test]
    fn mass_matrix_reproduces_total_mass() {
        let model = small_plate();
        let m = assemble_mass(&model);
        // partition of unity: summing each Cartesian block gives ρ₀ A
        let area = 4.0;
        let expect = model.material.rho0 * area;
        for c in 0..3 {
            let mut e = vec![0.0; model.n_dof()];
            for cp in 0..model.n_cp {
                e[3 * cp + c] = 1.0;
            }
            let me = m.matvec_alloc(&e);
            let total: f64 = e.iter().zip(&me).map(|(a, b)| a * b).sum();
            assert_relative_eq!(total, expect, max_relative = 1e-12);
        }
    }

    #[test]
    fn mass_is_positive_definite() {
        let model = small_plate();
        let m = assemble_mass(&model);
        let dense = m.to_dense();
        assert!(dense.cholesky().is_some(), "mass matrix not SPD");
    }

    #[test]
    fn undeformed_state_is_stress_free() {
        let model = small_plate();
        let u = vec![0.0; model.n_dof()];
        let mut k = stiffness_pattern(&model);
        let mut f = vec![0.0; model.n_dof()];
        let e = assemble_internal_into(&model, &u, &mut k, &mut f).unwrap();
        assert_relative_eq!(e, 0.0, epsilon = 1e-14);
        for &fi in &f {
            assert!(fi.abs() < 1e-12, "nonzero internal force {fi} at rest");
        }
    }

    fn random_displacement(model: &ShellModel, rng: &mut ChaCha8Rng, scale: f64) -> Vec<f64> {
        (0..model.n_dof()).map(|_| scale * (rng.gen::<f64>() - 0.5)).collect()
    }

    #[test]
    fn force_matches_finite_difference_of_energy() {
        let model = small_plate();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u0 = random_displacement(&model, &mut rng, 0.05);
        let energy_at = |u: &[f64]| -> f64 {
            let mut k = stiffness_pattern(&model);
            let mut f = vec![0.0; model.n_dof()];
            assemble_internal_into(&model, u, &mut k, &mut f).unwrap()
        };
        let mut k = stiffness_pattern(&model);
        let mut f = vec![0.0; model.n_dof()];
        assemble_internal_into(&model, &u0, &mut k, &mut f).unwrap();
        let h = 1e-6;
        // probe a subset of dofs
        for dof in (0..model.n_dof()).step_by(7) {
            let mut up = u0.clone();
            let mut um = u0.clone();
            up[dof] += h;
            um[dof] -= h;
            let fd = (energy_at(&up) - energy_at(&um)) / (2.0 * h);
            assert_relative_eq!(fd, f[dof], max_relative = 1e-5, epsilon = 1e-9);
        }
    }

    #[test]
    fn stiffness_matches_finite_difference_of_force() {
        let model = small_plate();
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let u0 = random_displacement(&model, &mut rng, 0.05);
        let force_at = |u: &[f64]| -> Vec<f64> {
            let mut k = stiffness_pattern(&model);
            let mut f = vec![0.0; model.n_dof()];
            assemble_internal_into(&model, u, &mut k, &mut f).unwrap();
            f
        };
        let mut k = stiffness_pattern(&model);
        let mut f = vec![0.0; model.n_dof()];
        assemble_internal_into(&model, &u0, &mut k, &mut f).unwrap();
        let kd = k.to_dense();
        let kscale = k.max_abs();
        let h = 1e-6;
        for dof in (0..model.n_dof()).step_by(5) {
            let mut up = u0.clone();
            let mut um = u0.clone();
            up[dof] += h;
            um[dof] -= h;
            let fp = force_at(&up);
            let fm = force_at(&um);
            for r in 0..model.n_dof() {
                let fd = (fp[r] - fm[r]) / (2.0 * h);
                let kv = kd[(r, dof)];
                if fd.abs().max(kv.abs()) > 1e-4 * kscale {
                    assert_relative_eq!(fd, kv, max_relative = 1e-4, epsilon = 1e-7 * kscale);
                }
            }
        }
    }

    #[test]
    fn stiffness_is_symmetric_within_tolerance() {
        let model = small_plate();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let u0 = random_displacement(&model, &mut rng, 0.08);
        let mut k = stiffness_pattern(&model);
        let mut f = vec![0.0; model.n_dof()];
        assemble_internal_into(&model, &u0, &mut k, &mut f).unwrap();
        // the CSR stores the upper triangle: symmetry is structural there,
        // so check the scatter itself produced consistent off-diagonal adds
        // by comparing against a dense rebuild from element loops
        let kd = k.to_dense();
        let asym = (&kd - kd.transpose()).abs().max();
        assert!(asym <= 1e-9 * kd.abs().max());
    }

    #[test]
    fn dirichlet_reduction_counts() {
        let model = small_plate();
        let boundary = model.boundary_sets.get("boundary").unwrap();
        let fixed: Vec<usize> =
            boundary.iter().flat_map(|&cp| [3 * cp, 3 * cp + 1, 3 * cp + 2]).collect();
        let dofs = DofMap::new(model.n_dof(), &fixed).unwrap();
        // 4x4 control net, boundary leaves a 2x2 interior
        assert_eq!(dofs.n_free(), 3 * 4);
        let m = assemble_mass(&model);
        let mr = apply_dirichlet(&m, &dofs);
        assert_eq!(mr.n, 12);
        assert!(mr.to_dense().cholesky().is_some(), "reduced mass lost SPD");
        // no constraints: unchanged
        let all = DofMap::new(model.n_dof(), &[]).unwrap();
        assert_eq!(apply_dirichlet(&m, &all).n, model.n_dof());
        // fixing one dof removes exactly one row/column
        let one = DofMap::new(model.n_dof(), &[5]).unwrap();
        assert_eq!(apply_dirichlet(&m, &one).n, model.n_dof() - 1);
        // fully fixed is an error
        let everything: Vec<usize> = (0..model.n_dof()).collect();
        assert!(DofMap::new(model.n_dof(), &everything).is_err());
    }

    #[test]
    fn penalty_scales_linearly_and_vanishes_at_reference() {
        // clamped disk: rotation rows exist; at reference both force and
        // energy vanish, and the block scales exactly with k_p
        let model = crate::discretization::make_disk(
            3.0,
            2,
            2,
            true,
            MaterialParams::default(),
        )
        .unwrap();
        let u = vec![0.0; model.n_dof()];
        let mut k1 = stiffness_pattern(&model);
        let mut f1 = vec![0.0; model.n_dof()];
        let e1 = assemble_penalty_into(&model, &u, &mut k1, &mut f1);
        assert!(e1.abs() < 1e-18);
        assert!(f1.iter().all(|v| v.abs() < 1e-12));
        let mut doubled = model.clone();
        doubled.penalty_kp *= 2.0;
        let mut k2 = stiffness_pattern(&doubled);
        let mut f2 = vec![0.0; doubled.n_dof()];
        assemble_penalty_into(&doubled, &u, &mut k2, &mut f2);
        for (a, b) in k1.vals.iter().zip(&k2.vals) {
            assert_relative_eq!(2.0 * a, *b, max_relative = 1e-14, epsilon = 1e-30);
        }
    }
}
