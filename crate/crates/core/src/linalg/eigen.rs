use super::{reverse_cuthill_mckee, SkylineFactor, SymCsr};
use crate::{CoreError, Result};
use nalgebra::{DMatrix, DVector};

/// One eigenpair of K v = ω² M v with the vector M-normalized.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub omega2: f64,
    pub vector: Vec<f64>,
}

/// Dense generalized symmetric eigensolver (Cholesky reduction to a
/// standard problem). Intended for small systems and as a cross-check for
/// the Lanczos path.
pub fn dense_generalized_eig(k: &SymCsr, m: &SymCsr, count: usize) -> Result<Vec<EigenPair>> {
    let n = k.n;
    let kd = k.to_dense();
    let md = m.to_dense();
    let chol = md
        .clone()
        .cholesky()
        .ok_or_else(|| CoreError::EigenFailure("mass matrix not positive definite".into()))?;
    let l = chol.l();
    // A = L⁻¹ K L⁻ᵀ
    let t1 = l
        .solve_lower_triangular(&kd)
        .ok_or_else(|| CoreError::EigenFailure("singular mass Cholesky factor".into()))?;
    let a = l
        .solve_lower_triangular(&t1.transpose())
        .ok_or_else(|| CoreError::EigenFailure("singular mass Cholesky factor".into()))?;
    let a = (&a + a.transpose()) * 0.5;
    let eig = a.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let lt = l.transpose();
    let mut pairs = Vec::new();
    for &idx in order.iter().take(count.min(n)) {
        let y = eig.eigenvectors.column(idx).into_owned();
        let x = lt
            .solve_upper_triangular(&y)
            .ok_or_else(|| CoreError::EigenFailure("back substitution failed".into()))?;
        pairs.push(EigenPair {
            omega2: eig.eigenvalues[idx],
            vector: m_normalized(m, x.as_slice()),
        });
    }
    Ok(pairs)
}

fn m_normalized(m: &SymCsr, x: &[f64]) -> Vec<f64> {
    let mx = m.matvec_alloc(x);
    let norm = dot(x, &mx).sqrt();
    x.iter().map(|v| v / norm).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Shift-invert Lanczos for the `count` algebraically smallest eigenvalues
/// of K v = ω² M v (M positive definite, K symmetric and possibly
/// indefinite).
///
/// The shift is lowered until K - σM factors positive definite, which
/// guarantees σ sits below the whole spectrum; Lanczos on
/// (K - σM)⁻¹ M in the M-inner product then converges from the bottom.
/// Full reorthogonalization keeps the small basis numerically clean.
pub fn lanczos_smallest(
    k: &SymCsr,
    m: &SymCsr,
    count: usize,
    shift_hint: Option<f64>,
) -> Result<Vec<EigenPair>> {
    let n = k.n;
    if n == 0 {
        return Ok(Vec::new());
    }
    if n <= 600 || count * 3 + 30 >= n {
        return dense_generalized_eig(k, m, count);
    }
    let perm = reverse_cuthill_mckee(k);
    // scale estimate for the shift ladder
    let scale = {
        let mut kd = 0.0;
        let mut md = 0.0;
        for i in 0..n {
            kd += k.get(i, i).abs();
            md += m.get(i, i);
        }
        (kd / md).max(1e-30)
    };
    let knorm = k.max_abs();
    let mut sigma = shift_hint.unwrap_or(-1e-8 * scale).min(-1e-12 * scale);
    let mut m_dim = (3 * count + 30).clamp(40, n);

    let mut best: Option<Vec<EigenPair>> = None;
    for attempt in 0..4 {
        // lower the shift until K - σM is positive definite (σ below the
        // whole spectrum)
        let mut factor = None;
        for _ in 0..30 {
            match SkylineFactor::new(k, Some(m), -sigma, &perm) {
                Ok(f) if f.nonpositive_pivots == 0 => {
                    factor = Some(f);
                    break;
                }
                Ok(_) | Err(CoreError::SingularTangent { .. }) => {
                    sigma = sigma * 8.0 - 1e-4 * scale;
                }
                Err(e) => return Err(e),
            }
        }
        let factor = factor.ok_or_else(|| {
            CoreError::EigenFailure("no positive-definite shift found for K - σM".into())
        })?;

        let pairs = lanczos_sweep(k, m, &factor, sigma, count, m_dim)?;
        let converged = pairs.len() >= count.min(n)
            && pairs.iter().take(count).all(|p| {
                let kv = k.matvec_alloc(&p.vector);
                let mv = m.matvec_alloc(&p.vector);
                let vnorm = p.vector.iter().map(|x| x * x).sum::<f64>().sqrt();
                let res: f64 = kv
                    .iter()
                    .zip(&mv)
                    .map(|(a, b)| (a - p.omega2 * b).powi(2))
                    .sum::<f64>()
                    .sqrt();
                res <= 1e-9 * knorm * vnorm
            });
        if converged {
            return Ok(pairs);
        }
        // sharpen: move the shift just below the current lowest estimate and
        // widen the basis
        if let Some(lo) = pairs.first().map(|p| p.omega2) {
            let hi = pairs.last().map(|p| p.omega2).unwrap_or(lo);
            sigma = lo - 0.25 * (hi - lo).abs() - 1e-8 * scale;
        }
        m_dim = (m_dim * 2).min(n);
        if attempt == 3 {
            best = Some(pairs);
        }
    }
    best.ok_or_else(|| CoreError::EigenFailure("Lanczos did not converge".into()))
}

fn lanczos_sweep(
    k: &SymCsr,
    m: &SymCsr,
    factor: &SkylineFactor,
    sigma: f64,
    count: usize,
    m_dim: usize,
) -> Result<Vec<EigenPair>> {
    let n = k.n;
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m_dim);
    let mut m_basis: Vec<Vec<f64>> = Vec::with_capacity(m_dim); // M v_j cached
    let mut alphas = Vec::new();
    let mut betas = Vec::new();

    // deterministic start vector
    let mut v: Vec<f64> =
        (0..n).map(|i| 1.0 + ((i.wrapping_mul(2654435761)) % 1000) as f64 / 1000.0).collect();
    let mv = m.matvec_alloc(&v);
    let nrm = dot(&v, &mv).sqrt();
    v.iter_mut().for_each(|x| *x /= nrm);
    basis.push(v);
    m_basis.push(m.matvec_alloc(&basis[0]));

    for j in 0..m_dim {
        let w0 = factor.solve(&m_basis[j]);
        let alpha = dot(&w0, &m_basis[j]);
        alphas.push(alpha);
        let mut w = w0;
        for (i, x) in w.iter_mut().enumerate() {
            *x -= alpha * basis[j][i];
            if j > 0 {
                *x -= betas[j - 1] * basis[j - 1][i];
            }
        }
        // full reorthogonalization (two passes)
        for _ in 0..2 {
            for (b, mb) in basis.iter().zip(&m_basis) {
                let c = dot(&w, mb);
                for (x, bi) in w.iter_mut().zip(b) {
                    *x -= c * bi;
                }
            }
        }
        let mw = m.matvec_alloc(&w);
        let beta = dot(&w, &mw).sqrt();
        if j + 1 == m_dim {
            break;
        }
        if !beta.is_finite() {
            return Err(CoreError::EigenFailure("Lanczos breakdown (non-finite)".into()));
        }
        if beta < 1e-13 {
            // invariant subspace found; enough vectors to answer
            break;
        }
        betas.push(beta);
        let vnext: Vec<f64> = w.iter().map(|x| x / beta).collect();
        m_basis.push(mw.iter().map(|x| x / beta).collect());
        basis.push(vnext);
    }

    let dim = alphas.len();
    let mut t = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        t[(i, i)] = alphas[i];
        if i + 1 < dim && i < betas.len() {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = t.symmetric_eigen();
    // largest θ of the inverted operator ↔ smallest ω²
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());

    let mut pairs = Vec::new();
    for &idx in order.iter().take(count.min(dim)) {
        let theta = eig.eigenvalues[idx];
        if theta <= 0.0 {
            // beyond the resolvable window of this shift
            continue;
        }
        let lambda = sigma + 1.0 / theta;
        let y: DVector<f64> = eig.eigenvectors.column(idx).into_owned();
        let mut x = vec![0.0; n];
        for (jb, b) in basis.iter().enumerate().take(dim) {
            let c = y[jb];
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += c * bi;
            }
        }
        pairs.push(EigenPair { omega2: lambda, vector: m_normalized(m, &x) });
    }
    pairs.sort_by(|a, b| a.omega2.partial_cmp(&b.omega2).unwrap());
    Ok(pairs)
}
