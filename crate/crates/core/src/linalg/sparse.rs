use nalgebra::DMatrix;

/// Sparsity-pattern builder for a symmetric matrix.
///
/// Collects coupled index pairs (typically element dof cliques), then
/// freezes them into the upper-triangle CSR layout of [`SymCsr`].
#[derive(Debug, Default)]
pub struct PatternBuilder {
    n: usize,
    pairs: Vec<(usize, usize)>,
}

impl PatternBuilder {
    pub fn new(n: usize) -> Self {
        PatternBuilder { n, pairs: Vec::new() }
    }

    /// Every dof in `dofs` couples with every other (and itself).
    pub fn add_clique(&mut self, dofs: &[usize]) {
        for (a, &i) in dofs.iter().enumerate() {
            for &j in &dofs[a..] {
                let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
                self.pairs.push((lo, hi));
            }
        }
    }

    pub fn build(mut self) -> SymCsr {
        self.pairs.sort_unstable();
        self.pairs.dedup();
        // make sure every diagonal entry exists
        let mut rows = vec![Vec::new(); self.n];
        for (i, j) in self.pairs {
            rows[i].push(j);
        }
        for (i, r) in rows.iter_mut().enumerate() {
            if r.first() != Some(&i) {
                r.insert(0, i);
            }
        }
        let mut rowptr = Vec::with_capacity(self.n + 1);
        let mut colidx = Vec::new();
        rowptr.push(0);
        for r in &rows {
            colidx.extend_from_slice(r);
            rowptr.push(colidx.len());
        }
        let nnz = colidx.len();
        SymCsr { n: self.n, rowptr, colidx, vals: vec![0.0; nnz] }
    }
}

/// Symmetric sparse matrix, upper triangle (j >= i) in CSR form.
///
/// The pattern is fixed at construction; `add` asserts that the entry
/// exists so assembly bugs surface immediately.
#[derive(Debug, Clone)]
pub struct SymCsr {
    pub n: usize,
    pub rowptr: Vec<usize>,
    pub colidx: Vec<usize>,
    pub vals: Vec<f64>,
}

impl SymCsr {
    pub fn zeroed(&mut self) {
        self.vals.iter_mut().for_each(|v| *v = 0.0);
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        let lo_range = self.rowptr[lo]..self.rowptr[lo + 1];
        let cols = &self.colidx[lo_range.clone()];
        match cols.binary_search(&hi) {
            Ok(k) => lo_range.start + k,
            Err(_) => panic!("entry ({lo},{hi}) not in sparsity pattern"),
        }
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let s = self.slot(i, j);
        self.vals[s] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        let lo_range = self.rowptr[lo]..self.rowptr[lo + 1];
        match self.colidx[lo_range.clone()].binary_search(&hi) {
            Ok(k) => self.vals[lo_range.start + k],
            Err(_) => 0.0,
        }
    }

    /// y = A x with the full (symmetrically expanded) matrix.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        y.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..self.n {
            for k in self.rowptr[i]..self.rowptr[i + 1] {
                let j = self.colidx[k];
                let v = self.vals[k];
                y[i] += v * x[j];
                if j != i {
                    y[j] += v * x[i];
                }
            }
        }
    }

    pub fn matvec_alloc(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec(x, &mut y);
        y
    }

    /// Largest absolute entry; cheap scale estimate for residual bounds.
    pub fn max_abs(&self) -> f64 {
        self.vals.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Extract the submatrix of dofs with `map[dof] = Some(reduced index)`.
    pub fn reduce(&self, map: &[Option<usize>], n_reduced: usize) -> SymCsr {
        let mut builder = PatternBuilder::new(n_reduced);
        for i in 0..self.n {
            let Some(ri) = map[i] else { continue };
            for k in self.rowptr[i]..self.rowptr[i + 1] {
                if let Some(rj) = map[self.colidx[k]] {
                    builder.add_clique_pair(ri, rj);
                }
            }
        }
        let mut out = builder.build();
        for i in 0..self.n {
            let Some(ri) = map[i] else { continue };
            for k in self.rowptr[i]..self.rowptr[i + 1] {
                if let Some(rj) = map[self.colidx[k]] {
                    out.add(ri, rj, self.vals[k]);
                }
            }
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for k in self.rowptr[i]..self.rowptr[i + 1] {
                let j = self.colidx[k];
                m[(i, j)] = self.vals[k];
                m[(j, i)] = self.vals[k];
            }
        }
        m
    }

    /// Upper-triangle entries (i, j, v) with j >= i.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            (self.rowptr[i]..self.rowptr[i + 1]).map(move |k| (i, self.colidx[k], self.vals[k]))
        })
    }
}

impl PatternBuilder {
    fn add_clique_pair(&mut self, i: usize, j: usize) {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        self.pairs.push((lo, hi));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SymCsr {
        let mut b = PatternBuilder::new(4);
        b.add_clique(&[0, 1, 2]);
        b.add_clique(&[2, 3]);
        let mut a = b.build();
        a.add(0, 0, 2.0);
        a.add(1, 1, 2.0);
        a.add(2, 2, 2.0);
        a.add(3, 3, 2.0);
        a.add(0, 1, -1.0);
        a.add(1, 2, -1.0);
        a.add(3, 2, -1.0); // lower-triangle add lands in the upper slot
        a
    }

    #[test]
    fn matvec_matches_dense() {
        let a = sample();
        let d = a.to_dense();
        let x = vec![1.0, -2.0, 0.5, 3.0];
        let y = a.matvec_alloc(&x);
        let yd = d * nalgebra::DVector::from_column_slice(&x);
        for i in 0..4 {
            approx::assert_relative_eq!(y[i], yd[i], epsilon = 1e-14);
        }
    }

    #[test]
    fn reduction_removes_rows_and_columns() {
        let a = sample();
        // keep dofs 1,2,3
        let map = vec![None, Some(0), Some(1), Some(2)];
        let r = a.reduce(&map, 3);
        assert_eq!(r.n, 3);
        assert_eq!(r.get(0, 0), 2.0);
        assert_eq!(r.get(0, 1), -1.0);
        assert_eq!(r.get(1, 2), -1.0);
        assert_eq!(r.get(0, 2), 0.0);
    }
}
