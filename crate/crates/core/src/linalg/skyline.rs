use super::SymCsr;
use crate::{CoreError, Result};

/// Reverse Cuthill-McKee ordering of the pattern graph of `a`.
///
/// Returns `perm` with `perm[new] = old`. Used to shrink the skyline
/// profile before factorization; the sparse matrices themselves stay in
/// model ordering.
pub fn reverse_cuthill_mckee(a: &SymCsr) -> Vec<usize> {
    let n = a.n;
    let mut adj = vec![Vec::new(); n];
    for (i, j, _) in a.entries() {
        if i != j {
            adj[i].push(j);
            adj[j].push(i);
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    let degree: Vec<usize> = adj.iter().map(|l| l.len()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        // lowest-degree unvisited node starts the next component
        let start = (0..n)
            .filter(|&v| !visited[v])
            .min_by_key(|&v| degree[v])
            .unwrap();
        visited[start] = true;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut nbrs: Vec<usize> = adj[v].iter().copied().filter(|&u| !visited[u]).collect();
            nbrs.sort_by_key(|&u| degree[u]);
            for u in nbrs {
                visited[u] = true;
                queue.push_back(u);
            }
        }
    }
    order.reverse();
    order
}

/// Skyline (variable-band) LDLᵀ factorization of K + shift·M on a permuted
/// index set. `K` and `M` share the dof numbering; rows outside either
/// pattern are treated as zero.
pub struct SkylineFactor {
    n: usize,
    /// perm[new] = old
    perm: Vec<usize>,
    /// inverse permutation: iperm[old] = new
    iperm: Vec<usize>,
    /// first stored row of each column (in permuted numbering)
    first: Vec<usize>,
    colptr: Vec<usize>,
    /// strict upper-triangle columns of Lᵀ, rows first[j]..j
    u: Vec<f64>,
    d: Vec<f64>,
    /// number of non-positive pivots encountered
    pub nonpositive_pivots: usize,
    pub min_pivot: f64,
}

impl SkylineFactor {
    /// Factor `K + shift * M`. Fails only on an exactly zero pivot; an
    /// indefinite matrix factors fine and is reported via
    /// `nonpositive_pivots` so callers can adjust their shift.
    pub fn new(k: &SymCsr, m: Option<&SymCsr>, shift: f64, perm: &[usize]) -> Result<Self> {
        let n = k.n;
        assert_eq!(perm.len(), n);
        let mut iperm = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            iperm[old] = new;
        }
        // column heights from the union pattern
        let mut first: Vec<usize> = (0..n).collect();
        let mut note = |i: usize, j: usize| {
            let (pi, pj) = (iperm[i], iperm[j]);
            let (lo, hi) = if pi <= pj { (pi, pj) } else { (pj, pi) };
            if lo < first[hi] {
                first[hi] = lo;
            }
        };
        for (i, j, _) in k.entries() {
            note(i, j);
        }
        if let Some(m) = m {
            for (i, j, _) in m.entries() {
                note(i, j);
            }
        }
        let mut colptr = Vec::with_capacity(n + 1);
        colptr.push(0);
        for j in 0..n {
            colptr.push(colptr[j] + (j - first[j]));
        }
        let mut u = vec![0.0; colptr[n]];
        let mut d = vec![0.0; n];
        // scatter values (permuted)
        let mut scatter = |i: usize, j: usize, v: f64, u: &mut [f64], d: &mut [f64]| {
            let (pi, pj) = (iperm[i], iperm[j]);
            let (lo, hi) = if pi <= pj { (pi, pj) } else { (pj, pi) };
            if lo == hi {
                d[lo] += v;
            } else {
                u[colptr[hi] + (lo - first[hi])] += v;
            }
        };
        for (i, j, v) in k.entries() {
            scatter(i, j, v, &mut u, &mut d);
        }
        if let Some(m) = m {
            for (i, j, v) in m.entries() {
                scatter(i, j, shift * v, &mut u, &mut d);
            }
        }

        // in-place LDLT, column by column
        let mut nonpositive = 0usize;
        let mut min_pivot = f64::INFINITY;
        let mut w = vec![0.0; n];
        for j in 0..n {
            let lo_j = first[j];
            for i in lo_j..j {
                w[i] = u[colptr[j] + (i - lo_j)];
            }
            for i in lo_j..j {
                let lo = first[i].max(lo_j);
                let mut s = w[i];
                let base = colptr[i];
                for kk in lo..i {
                    s -= u[base + (kk - first[i])] * w[kk];
                }
                w[i] = s;
            }
            let mut piv = d[j];
            for kk in lo_j..j {
                let dk = d[kk];
                if dk == 0.0 {
                    return Err(CoreError::SingularTangent { index: kk, pivot: 0.0 });
                }
                let l = w[kk] / dk;
                piv -= l * w[kk];
                u[colptr[j] + (kk - lo_j)] = l;
            }
            if piv <= 0.0 {
                nonpositive += 1;
            }
            if piv.abs() < min_pivot {
                min_pivot = piv.abs();
            }
            if piv == 0.0 {
                return Err(CoreError::SingularTangent { index: j, pivot: piv });
            }
            d[j] = piv;
        }
        Ok(SkylineFactor {
            n,
            perm: perm.to_vec(),
            iperm,
            first,
            colptr,
            u,
            d,
            nonpositive_pivots: nonpositive,
            min_pivot,
        })
    }

    /// Solve (K + shift M) x = b in the original (model) numbering.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let mut z: Vec<f64> = (0..self.n).map(|new| b[self.perm[new]]).collect();
        // forward: L z' = z  (column sweep)
        for j in 0..self.n {
            let lo = self.first[j];
            let base = self.colptr[j];
            let mut s = z[j];
            for k in lo..j {
                s -= self.u[base + (k - lo)] * z[k];
            }
            z[j] = s;
        }
        for j in 0..self.n {
            z[j] /= self.d[j];
        }
        // backward: Lᵀ x = z
        for j in (0..self.n).rev() {
            let xj = z[j];
            let lo = self.first[j];
            let base = self.colptr[j];
            for k in lo..j {
                z[k] -= self.u[base + (k - lo)] * xj;
            }
        }
        let mut x = vec![0.0; self.n];
        for new in 0..self.n {
            x[self.perm[new]] = z[new];
        }
        let _ = &self.iperm;
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::PatternBuilder;

    fn laplacian(n: usize) -> SymCsr {
        let mut b = PatternBuilder::new(n);
        for i in 0..n - 1 {
            b.add_clique(&[i, i + 1]);
        }
        let mut a = b.build();
        for i in 0..n {
            a.add(i, i, 2.0);
        }
        for i in 0..n - 1 {
            a.add(i, i + 1, -1.0);
        }
        a
    }

    #[test]
    fn solves_spd_system() {
        let a = laplacian(12);
        let perm = reverse_cuthill_mckee(&a);
        let f = SkylineFactor::new(&a, None, 0.0, &perm).unwrap();
        assert_eq!(f.nonpositive_pivots, 0);
        let x_true: Vec<f64> = (0..12).map(|i| (i as f64 * 0.7).sin()).collect();
        let b = a.matvec_alloc(&x_true);
        let x = f.solve(&b);
        for i in 0..12 {
            approx::assert_relative_eq!(x[i], x_true[i], epsilon = 1e-11);
        }
    }

    #[test]
    fn counts_negative_pivots_for_indefinite_shift() {
        let a = laplacian(8);
        let perm: Vec<usize> = (0..8).collect();
        // shift far beyond the largest eigenvalue (< 4): A - 10 I is negative definite
        let mut ident = {
            let mut b = PatternBuilder::new(8);
            for i in 0..8 {
                b.add_clique(&[i]);
            }
            b.build()
        };
        for i in 0..8 {
            ident.add(i, i, 1.0);
        }
        let f = SkylineFactor::new(&a, Some(&ident), -10.0, &perm).unwrap();
        assert_eq!(f.nonpositive_pivots, 8);
    }
}
