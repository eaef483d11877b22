//! B-spline primitives: span lookup, basis functions with first and second
//! derivatives (the standard knot-difference recursion), Greville points,
//! and knot insertion on homogeneous control polygons.

/// Index of the knot span containing `u` (clamped to the last nonzero span).
pub fn find_span(knots: &[f64], degree: usize, u: f64) -> usize {
    let n = knots.len() - degree - 2; // highest control index
    let u_min = knots[degree];
    let u_max = knots[n + 1];
    if u >= u_max {
        // step back over repeated end knots
        let mut s = n;
        while s > degree && knots[s] >= u_max {
            s -= 1;
        }
        return s.max(degree);
    }
    let _ = u_min;
    let mut lo = degree;
    let mut hi = n + 1;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if u < knots[mid] {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

/// Non-vanishing basis functions and derivatives at `u` in `span`.
///
/// Returns `ders[k][j]` = d^k N_{span-degree+j} / du^k for k = 0..=n_ders,
/// j = 0..=degree.
pub fn basis_ders(knots: &[f64], degree: usize, span: usize, u: f64, n_ders: usize) -> Vec<Vec<f64>> {
    let p = degree;
    let mut ndu = vec![vec![0.0; p + 1]; p + 1];
    let mut left = vec![0.0; p + 1];
    let mut right = vec![0.0; p + 1];
    ndu[0][0] = 1.0;
    for j in 1..=p {
        left[j] = u - knots[span + 1 - j];
        right[j] = knots[span + j] - u;
        let mut saved = 0.0;
        for r in 0..j {
            ndu[j][r] = right[r + 1] + left[j - r];
            let temp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }
    let mut ders = vec![vec![0.0; p + 1]; n_ders + 1];
    for j in 0..=p {
        ders[0][j] = ndu[j][p];
    }
    let mut a = vec![vec![0.0; p + 1]; 2];
    for r in 0..=p {
        let mut s1 = 0;
        let mut s2 = 1;
        a[0][0] = 1.0;
        for k in 1..=n_ders.min(p) {
            let mut d = 0.0;
            let rk = r as isize - k as isize;
            let pk = (p - k) as isize;
            if r >= k {
                a[s2][0] = a[s1][0] / ndu[(pk + 1) as usize][rk as usize];
                d = a[s2][0] * ndu[rk as usize][pk as usize];
            }
            let j1 = if rk >= -1 { 1 } else { (-rk) as usize };
            let j2 = if (r as isize - 1) <= pk { k - 1 } else { p - r };
            for j in j1..=j2 {
                a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[(pk + 1) as usize][(rk + j as isize) as usize];
                d += a[s2][j] * ndu[(rk + j as isize) as usize][pk as usize];
            }
            if r <= pk as usize {
                a[s2][k] = -a[s1][k - 1] / ndu[(pk + 1) as usize][r];
                d += a[s2][k] * ndu[r][pk as usize];
            }
            ders[k][r] = d;
            std::mem::swap(&mut s1, &mut s2);
        }
    }
    let mut factor = p as f64;
    for k in 1..=n_ders.min(p) {
        for j in 0..=p {
            ders[k][j] *= factor;
        }
        factor *= (p - k) as f64;
    }
    ders
}

/// Greville abscissae of an open knot vector.
pub fn greville(knots: &[f64], degree: usize) -> Vec<f64> {
    let n_cp = knots.len() - degree - 1;
    (0..n_cp)
        .map(|i| knots[i + 1..i + 1 + degree].iter().sum::<f64>() / degree as f64)
        .collect()
}

/// Open uniform knot vector for `n_elem` elements on [a, b].
pub fn open_uniform_knots(degree: usize, n_elem: usize, a: f64, b: f64) -> Vec<f64> {
    let mut knots = Vec::with_capacity(n_elem + 2 * degree + 1);
    for _ in 0..=degree {
        knots.push(a);
    }
    for i in 1..n_elem {
        knots.push(a + (b - a) * i as f64 / n_elem as f64);
    }
    for _ in 0..=degree {
        knots.push(b);
    }
    knots
}

/// Insert a knot into a curve given by homogeneous control points
/// (x w, y w, z w, w). Boehm's algorithm, single insertion.
pub fn insert_knot(knots: &mut Vec<f64>, degree: usize, ctrl: &mut Vec<[f64; 4]>, u: f64) {
    let span = find_span(knots, degree, u);
    let p = degree;
    let mut new_ctrl = Vec::with_capacity(ctrl.len() + 1);
    new_ctrl.extend_from_slice(&ctrl[..=span - p]);
    for i in (span - p + 1)..=span {
        let alpha = (u - knots[i]) / (knots[i + p] - knots[i]);
        let mut q = [0.0; 4];
        for c in 0..4 {
            q[c] = (1.0 - alpha) * ctrl[i - 1][c] + alpha * ctrl[i][c];
        }
        new_ctrl.push(q);
    }
    new_ctrl.extend_from_slice(&ctrl[span..]);
    *ctrl = new_ctrl;
    knots.insert(span + 1, u);
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn partition_of_unity_and_derivative_sums() {
        let knots = open_uniform_knots(2, 5, 0.0, 1.0);
        for &u in &[0.0, 0.13, 0.2, 0.5, 0.77, 1.0] {
            let span = find_span(&knots, 2, u);
            let d = basis_ders(&knots, 2, span, u, 2);
            let s0: f64 = d[0].iter().sum();
            let s1: f64 = d[1].iter().sum();
            let s2: f64 = d[2].iter().sum();
            assert_relative_eq!(s0, 1.0, epsilon = 1e-13);
            assert!(s1.abs() < 1e-10, "first-derivative sum {s1}");
            assert!(s2.abs() < 1e-9, "second-derivative sum {s2}");
        }
    }

    #[test]
    fn quadratic_derivatives_match_finite_differences() {
        let knots = open_uniform_knots(3, 4, 0.0, 2.0);
        let u = 0.63;
        let h = 1e-6;
        let span = find_span(&knots, 3, u);
        let d0 = basis_ders(&knots, 3, span, u, 2);
        let dp = basis_ders(&knots, 3, find_span(&knots, 3, u + h), u + h, 2);
        let dm = basis_ders(&knots, 3, find_span(&knots, 3, u - h), u - h, 2);
        for j in 0..4 {
            assert_relative_eq!(d0[1][j], (dp[0][j] - dm[0][j]) / (2.0 * h), epsilon = 1e-7);
            assert_relative_eq!(d0[2][j], (dp[1][j] - dm[1][j]) / (2.0 * h), epsilon = 1e-6);
        }
    }

    #[test]
    fn knot_insertion_preserves_curve() {
        // quarter circle: P = (1,0), (1,1), (0,1), w = (1, √2/2, 1)
        let w1 = 0.5_f64.sqrt();
        let mut knots = vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0];
        let mut ctrl = vec![
            [1.0, 0.0, 0.0, 1.0],
            [w1, w1, 0.0, w1],
            [0.0, 1.0, 0.0, 1.0],
        ];
        let eval = |knots: &[f64], ctrl: &[[f64; 4]], u: f64| -> [f64; 2] {
            let span = find_span(knots, 2, u);
            let d = basis_ders(knots, 2, span, u, 0);
            let mut h = [0.0; 4];
            for (j, &n) in d[0].iter().enumerate() {
                for c in 0..4 {
                    h[c] += n * ctrl[span - 2 + j][c];
                }
            }
            [h[0] / h[3], h[1] / h[3]]
        };
        let before: Vec<[f64; 2]> = (0..=10).map(|i| eval(&knots, &ctrl, i as f64 / 10.0)).collect();
        insert_knot(&mut knots, 2, &mut ctrl, 0.3);
        insert_knot(&mut knots, 2, &mut ctrl, 0.7);
        insert_knot(&mut knots, 2, &mut ctrl, 0.7); // repeated insertion is fine too
        let after: Vec<[f64; 2]> = (0..=10).map(|i| eval(&knots, &ctrl, i as f64 / 10.0)).collect();
        for (b, a) in before.iter().zip(&after) {
            assert_relative_eq!(b[0], a[0], epsilon = 1e-13);
            assert_relative_eq!(b[1], a[1], epsilon = 1e-13);
            // points stay on the unit circle
            assert_relative_eq!(a[0] * a[0] + a[1] * a[1], 1.0, epsilon = 1e-13);
        }
    }
}
