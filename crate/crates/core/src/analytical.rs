//! Closed-form plate-frequency oracles for the Canham bending model:
//! simply supported rectangles (with optional membrane prestress) and
//! clamped / simply supported circular plates through the roots of their
//! Bessel characteristic equations. These are the references the shell
//! discretization is verified against.

use crate::{CoreError, Result};
use std::f64::consts::PI;

/// Reference surface density of graphene in mass-units/nm²
/// (1 mass-unit = nN·ps²/nm = 1e-24 kg), from two carbon atoms per
/// hexagonal representative area element with bond length 0.142 nm.
pub const GRAPHENE_RHO0: f64 = 0.76106;

/// Plate description for the analytical oracles.
#[derive(Debug, Clone, Copy)]
pub struct PlateSpec {
    pub shape: PlateShape,
    pub boundary: PlateBoundary,
    /// bending modulus in nN·nm
    pub c_bend: f64,
    /// surface density in mass-units/nm²
    pub rho: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlateShape {
    /// full edge lengths a × b in nm
    Rectangle { a: f64, b: f64 },
    /// radius a in nm
    Circle { a: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlateBoundary {
    SimplySupported,
    Clamped,
}

impl PlateSpec {
    fn wave_speed(&self) -> f64 {
        (self.c_bend / self.rho).sqrt()
    }
}

/// Natural frequency ω̂ (rad/ps) of mode (m, n) of a simply supported
/// rectangular plate: ω̂ = π²(m²/a² + n²/b²)√(c/ρ), with a, b the full
/// edge lengths.
pub fn rect_ss_frequency(m: usize, n: usize, spec: &PlateSpec) -> f64 {
    let PlateShape::Rectangle { a, b } = spec.shape else {
        panic!("rect_ss_frequency needs a rectangular spec");
    };
    assert!(m >= 1 && n >= 1);
    let mf = m as f64;
    let nf = n as f64;
    PI * PI * (mf * mf / (a * a) + nf * nf / (b * b)) * spec.wave_speed()
}

/// Prestressed frequency ω (rad/ps): ω² = ω̂² + (1/ρ)[Nx(πm/a)² + Ny(πn/b)²]
/// with Nx, Ny the membrane (Cauchy) stresses in N/m. A negative radicand
/// is returned as a negative value of sign(ω²)·√|ω²| to signal instability.
pub fn rect_prestressed_frequency(m: usize, n: usize, spec: &PlateSpec, nx: f64, ny: f64) -> f64 {
    let PlateShape::Rectangle { a, b } = spec.shape else {
        panic!("rect_prestressed_frequency needs a rectangular spec");
    };
    let w0 = rect_ss_frequency(m, n, spec);
    let mf = m as f64;
    let nf = n as f64;
    let omega2 = w0 * w0
        + (nx * (PI * mf / a).powi(2) + ny * (PI * nf / b).powi(2)) / spec.rho;
    omega2.signum() * omega2.abs().sqrt()
}

/// Membrane stress Nx = Ny (N/m) of the graphene model under pure
/// dilatation with area stretch J: N = ε α̂² ln(J) exp(−(1+α̂) ln J).
pub fn dilatation_membrane_stress(j: f64, epsilon: f64, alpha_hat: f64) -> f64 {
    let lnj = j.ln();
    epsilon * alpha_hat * alpha_hat * lnj * (-(1.0 + alpha_hat) * lnj).exp()
}

/// Frequency ω̂ = (γ²/a²)√(c/ρ) of a circular plate given a characteristic
/// root γ.
pub fn circular_frequency(gamma: f64, spec: &PlateSpec) -> f64 {
    let PlateShape::Circle { a } = spec.shape else {
        panic!("circular_frequency needs a circular spec");
    };
    gamma * gamma / (a * a) * spec.wave_speed()
}

/// First `n_max` positive roots γ(m, n), n = 0..n_max-1, of the circular
/// plate characteristic equation for nodal-diameter count `m`:
///
/// clamped:          J_{m+1}(γ)/J_m(γ) + I_{m+1}(γ)/I_m(γ) = 0
/// simply supported: J_{m+1}(γ)/J_m(γ) + I_{m+1}(γ)/I_m(γ) = 2γ
///
/// Roots are bracketed by the interlacing zeros of J_m and polished with
/// bisection to ~1e-14 relative.
pub fn circular_char_roots(m: usize, n_max: usize, boundary: PlateBoundary) -> Result<Vec<f64>> {
    assert!(n_max >= 1);
    let g = |gamma: f64| -> f64 {
        let jm = bessel_j(m, gamma);
        let jm1 = bessel_j(m + 1, gamma);
        let im = bessel_i(m, gamma);
        let im1 = bessel_i(m + 1, gamma);
        let lhs = jm1 / jm + im1 / im;
        match boundary {
            PlateBoundary::Clamped => lhs,
            PlateBoundary::SimplySupported => lhs - 2.0 * gamma,
        }
    };
    // interval endpoints: 0 and the zeros of J_m; one characteristic root
    // lives in each interval where g changes sign
    let need_zeros = n_max + 3;
    let jm_zeros = bessel_j_zeros(m, need_zeros)?;
    let mut intervals = Vec::with_capacity(need_zeros + 1);
    intervals.push((1e-9_f64.max(1e-6 * jm_zeros[0]), jm_zeros[0]));
    for w in jm_zeros.windows(2) {
        intervals.push((w[0], w[1]));
    }
    let mut roots = Vec::new();
    for (lo, hi) in intervals {
        if roots.len() == n_max {
            break;
        }
        let eps = 1e-9 * (hi - lo);
        let (a, b) = (lo + eps, hi - eps);
        let (ga, gb) = (g(a), g(b));
        if ga == 0.0 {
            roots.push(a);
            continue;
        }
        if ga * gb > 0.0 {
            continue;
        }
        let root = bisect(&g, a, b, ga);
        roots.push(root);
    }
    if roots.len() < n_max {
        return Err(CoreError::Analytical(format!(
            "only bracketed {} of {} characteristic roots for m = {m}",
            roots.len(),
            n_max
        )));
    }
    Ok(roots)
}

fn bisect(g: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, ga: f64) -> f64 {
    let mut sa = ga.signum();
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        let gm = g(mid);
        if gm == 0.0 || (b - a) < 1e-15 * mid {
            return mid;
        }
        if gm.signum() == sa {
            a = mid;
            sa = gm.signum();
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Radial mode profile R(m,n)(r) = I_m(γ)J_m(γ r/a) − J_m(γ)I_m(γ r/a)
/// of the circular plate (both boundary types share the form).
pub fn circular_radial_profile(m: usize, gamma: f64, r_over_a: f64) -> f64 {
    bessel_i(m, gamma) * bessel_j(m, gamma * r_over_a)
        - bessel_j(m, gamma) * bessel_i(m, gamma * r_over_a)
}

/// Sampled analytical mode shapes for MAC comparison against FE vectors.
pub enum ModeShape {
    /// W(x, y) = sin(mπx/a) sin(nπy/b), x ∈ [0, a], y ∈ [0, b]
    RectangleSS { m: usize, n: usize },
    /// W(r, φ) = R(m,n)(r) cos(mφ)
    Circular { m: usize, gamma: f64 },
}

impl ModeShape {
    pub fn evaluate(&self, u: f64, v: f64) -> f64 {
        match *self {
            ModeShape::RectangleSS { m, n } => {
                (m as f64 * PI * u).sin() * (n as f64 * PI * v).sin()
            }
            ModeShape::Circular { m, gamma } => {
                circular_radial_profile(m, gamma, u) * (m as f64 * v).cos()
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Bessel functions J_m and I_m of the first kind.
//
// J_m uses Miller's downward recurrence with the J_0 + 2ΣJ_2k = 1
// normalization, which stays accurate through the x ≲ 60 range the root
// finder needs. I_m uses the (all-positive) power series directly.
// ---------------------------------------------------------------------------

/// Bessel function of the first kind J_m(x) for x >= 0.
pub fn bessel_j(m: usize, x: f64) -> f64 {
    if x == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    if x < 1e-6 {
        // leading series term is enough at this size
        let mut t = 1.0;
        for k in 1..=m {
            t *= 0.5 * x / k as f64;
        }
        return t * (1.0 - 0.25 * x * x / (m as f64 + 1.0));
    }
    // Miller's downward recurrence, normalized with J_0 + 2 Σ J_2k = 1
    let start = ((m + 22).max(x as usize + 22) + 2 * (x.sqrt() as usize)) | 1;
    let mut j_hi = 0.0_f64; // J_{start+1}
    let mut j_cur = 1e-300_f64; // J_{start}, arbitrary seed
    let mut target = 0.0;
    let mut norm = 0.0;
    let mut k = start;
    loop {
        if k == m {
            target = j_cur;
        }
        if k % 2 == 0 {
            norm += if k == 0 { j_cur } else { 2.0 * j_cur };
        }
        if k == 0 {
            break;
        }
        let j_lo = 2.0 * k as f64 / x * j_cur - j_hi;
        j_hi = j_cur;
        j_cur = j_lo;
        if j_cur.abs() > 1e250 {
            j_cur *= 1e-250;
            j_hi *= 1e-250;
            norm *= 1e-250;
            target *= 1e-250;
        }
        k -= 1;
    }
    target / norm
}

/// Modified Bessel function of the first kind I_m(x) for x >= 0.
pub fn bessel_i(m: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for k in 1..=m {
        term *= half / k as f64;
    }
    let mut sum = term;
    let x2 = half * half;
    for k in 1..400 {
        term *= x2 / (k as f64 * (k + m) as f64);
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}

/// First `count` positive zeros of J_m, by scanning for sign changes from
/// McMahon-spaced starting points and bisecting.
pub fn bessel_j_zeros(m: usize, count: usize) -> Result<Vec<f64>> {
    let f = |x: f64| bessel_j(m, x);
    let mut zeros = Vec::with_capacity(count);
    let mut x = 0.5_f64.max(m as f64 * 0.5);
    let step = 0.05;
    let mut fx = f(x);
    let limit = (count as f64 + m as f64) * PI + 20.0;
    while zeros.len() < count && x < limit {
        let xn = x + step;
        let fn_ = f(xn);
        if fx == 0.0 {
            zeros.push(x);
        } else if fx * fn_ < 0.0 {
            zeros.push(bisect(&|t| f(t), x, xn, fx));
        }
        x = xn;
        fx = fn_;
    }
    if zeros.len() < count {
        return Err(CoreError::Analytical(format!(
            "found only {} of {count} zeros of J_{m}",
            zeros.len()
        )));
    }
    Ok(zeros)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const GRAPHENE_QM: PlateSpec = PlateSpec {
        shape: PlateShape::Rectangle { a: 5.0, b: 5.0 },
        boundary: PlateBoundary::SimplySupported,
        c_bend: 0.238,
        rho: GRAPHENE_RHO0,
    };

    fn disk(boundary: PlateBoundary) -> PlateSpec {
        PlateSpec { shape: PlateShape::Circle { a: 5.0 }, boundary, c_bend: 0.238, rho: GRAPHENE_RHO0 }
    }

    #[test]
    fn bessel_j_reference_values() {
        // 15+ digit references from an independent multiprecision evaluation
        assert_relative_eq!(bessel_j(0, 1.0), 0.765197686557966551, epsilon = 1e-14);
        assert_relative_eq!(bessel_j(1, 1.0), 0.440050585744933516, epsilon = 1e-14);
        assert_relative_eq!(bessel_j(0, 5.0), -0.177596771314338304, epsilon = 1e-14);
        assert_relative_eq!(bessel_j(2, 5.0), 0.046565116277752216, epsilon = 1e-13);
        assert_relative_eq!(bessel_j(3, 10.0), 0.058379379305186812, epsilon = 1e-13);
        assert_relative_eq!(bessel_j(0, 40.0), 0.007366890584237290, epsilon = 1e-12);
        assert_relative_eq!(bessel_j(5, 30.0), -0.143240295512077077, epsilon = 1e-12);
    }

    #[test]
    fn bessel_i_reference_values() {
        assert_relative_eq!(bessel_i(0, 1.0), 1.266065877752008336, max_relative = 1e-14);
        assert_relative_eq!(bessel_i(1, 1.0), 0.565159103992485027, max_relative = 1e-14);
        assert_relative_eq!(bessel_i(0, 5.0), 27.239871823604446894, max_relative = 1e-14);
        assert_relative_eq!(bessel_i(4, 12.0), 9508.920698040949504, max_relative = 1e-13);
    }

    #[test]
    fn bessel_zero_reference_values() {
        let z0 = bessel_j_zeros(0, 2).unwrap();
        assert_relative_eq!(z0[0], 2.404825557695772769, epsilon = 1e-12);
        assert_relative_eq!(z0[1], 5.520078110286310650, epsilon = 1e-12);
        let z1 = bessel_j_zeros(1, 1).unwrap();
        assert_relative_eq!(z1[0], 3.831705970207512316, epsilon = 1e-12);
    }

    #[test]
    fn rect_frequencies_match_published_grid() {
        // first nine natural frequencies of the 5 nm simply supported plate
        let f = |m, n| rect_ss_frequency(m, n, &GRAPHENE_QM) / (2.0 * PI);
        assert_relative_eq!(f(1, 1), 0.07027306471050880, max_relative = 1e-12);
        assert_relative_eq!(f(1, 2), 0.17568266177627201, max_relative = 1e-12);
        assert_relative_eq!(f(2, 2), 0.28109225884203522, max_relative = 1e-12);
        assert_relative_eq!(f(1, 3), 0.35136532355254402, max_relative = 1e-12);
        assert_relative_eq!(f(2, 3), 0.45677492061830723, max_relative = 1e-12);
        assert_relative_eq!(f(1, 4), 0.59732105003932484, max_relative = 1e-12);
        // symmetry for the square plate
        assert_relative_eq!(
            rect_ss_frequency(2, 3, &GRAPHENE_QM),
            rect_ss_frequency(3, 2, &GRAPHENE_QM),
            max_relative = 1e-15
        );
    }

    #[test]
    fn prestress_reduces_to_natural_frequency_at_zero_stress() {
        let w = rect_prestressed_frequency(2, 1, &GRAPHENE_QM, 0.0, 0.0);
        assert_relative_eq!(w, rect_ss_frequency(2, 1, &GRAPHENE_QM), max_relative = 1e-15);
    }

    #[test]
    fn dilatation_stress_value() {
        // frozen from direct evaluation of the formula with GGA constants
        let n = dilatation_membrane_stress(1.1, 93.84, 1.53);
        assert_relative_eq!(n, 16.450786123557886, max_relative = 1e-12);
        assert_relative_eq!(dilatation_membrane_stress(1.0, 93.84, 1.53), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn clamped_roots_and_frequencies() {
        // residual at the returned roots
        let residual = |m: usize, g: f64| {
            bessel_j(m + 1, g) / bessel_j(m, g) + bessel_i(m + 1, g) / bessel_i(m, g)
        };
        let spec = disk(PlateBoundary::Clamped);
        let g0 = circular_char_roots(0, 2, PlateBoundary::Clamped).unwrap();
        assert_relative_eq!(g0[0], 3.19622061658254109, epsilon = 1e-11);
        assert_relative_eq!(g0[1], 6.30643704768842372, epsilon = 1e-11);
        assert!(residual(0, g0[0]).abs() < 1e-12);
        let g1 = circular_char_roots(1, 2, PlateBoundary::Clamped).unwrap();
        assert_relative_eq!(g1[0], 4.61089987904905583, epsilon = 1e-11);
        assert_relative_eq!(g1[1], 7.79927380081123190, epsilon = 1e-11);
        // THz values of the published clamped disk grid (a = 5 nm)
        let f = |g: f64| circular_frequency(g, &spec) / (2.0 * PI);
        assert_relative_eq!(f(g0[0]), 0.03636911, max_relative = 1e-6);
        assert_relative_eq!(f(g1[0]), 0.07568861, max_relative = 1e-6);
    }

    #[test]
    fn simply_supported_roots_and_frequencies() {
        let spec = disk(PlateBoundary::SimplySupported);
        let g0 = circular_char_roots(0, 2, PlateBoundary::SimplySupported).unwrap();
        assert_relative_eq!(g0[0], 2.10798812496721647, epsilon = 1e-11);
        assert_relative_eq!(g0[1], 5.41883470798830573, epsilon = 1e-11);
        let g3 = circular_char_roots(3, 2, PlateBoundary::SimplySupported).unwrap();
        assert_relative_eq!(g3[0], 6.29310065677207638, epsilon = 1e-11);
        let f = |g: f64| circular_frequency(g, &spec) / (2.0 * PI);
        assert_relative_eq!(f(g0[0]), 0.01581960, max_relative = 1e-6);
        // clamped roots strictly exceed simply supported roots mode by mode
        for m in 0..4 {
            let gc = circular_char_roots(m, 4, PlateBoundary::Clamped).unwrap();
            let gs = circular_char_roots(m, 4, PlateBoundary::SimplySupported).unwrap();
            for (c, s) in gc.iter().zip(&gs) {
                assert!(c > s, "clamped root {c} should exceed SS root {s} (m = {m})");
            }
        }
    }

    #[test]
    fn mode_shapes_satisfy_boundary_conditions() {
        // rectangle (1,1): zero on the boundary, maximal at the center
        let rect = ModeShape::RectangleSS { m: 1, n: 1 };
        assert_relative_eq!(rect.evaluate(0.0, 0.37), 0.0, epsilon = 1e-15);
        assert_relative_eq!(rect.evaluate(0.5, 0.5), 1.0, epsilon = 1e-15);
        // circular R(a) = 0 by construction
        let g = circular_char_roots(2, 1, PlateBoundary::Clamped).unwrap()[0];
        assert_relative_eq!(circular_radial_profile(2, g, 1.0), 0.0, epsilon = 1e-12);
        // clamped (0,0): dR/dr = 0 at the boundary
        let g = circular_char_roots(0, 1, PlateBoundary::Clamped).unwrap()[0];
        let h = 1e-6;
        let d = (circular_radial_profile(0, g, 1.0) - circular_radial_profile(0, g, 1.0 - h)) / h;
        let scale = circular_radial_profile(0, g, 0.0).abs();
        assert!(d.abs() < 1e-4 * scale, "clamped slope {d} not ~0");
    }

    #[test]
    fn frequency_scales_quadratically_with_root() {
        let spec = disk(PlateBoundary::Clamped);
        let f1 = circular_frequency(2.0, &spec);
        let f2 = circular_frequency(4.0, &spec);
        assert_relative_eq!(f2, 4.0 * f1, max_relative = 1e-15);
    }
}
