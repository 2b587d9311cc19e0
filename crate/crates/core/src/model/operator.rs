use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Largest dimension for which [`SparseHermitianOperator::to_dense`] is allowed.
pub const DENSE_LIMIT: usize = 5000;

#[derive(Clone, Debug)]
enum Values {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

/// Hermitian operator in compressed-row form.
///
/// Built from upper-triangle entries only; the lower triangle is the
/// conjugate mirror, so Hermiticity holds exactly. Real-valued operators
/// (every Hamiltonian in this crate) keep real storage for a faster product.
#[derive(Clone, Debug)]
pub struct SparseHermitianOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    values: Values,
}

impl SparseHermitianOperator {
    /// Assembles the operator from `(row, col, value)` with `row <= col`.
    /// Repeated entries are summed; diagonal entries must be real.
    pub fn from_upper_entries(dim: usize, entries: Vec<(usize, usize, Complex64)>) -> Result<Self> {
        if dim > u32::MAX as usize {
            return Err(invalid("dim", "exceeds u32 index range"));
        }
        let mut all = Vec::with_capacity(2 * entries.len());
        for (r, c, v) in entries {
            if r > c || c >= dim {
                return Err(invalid(
                    "entries",
                    format!("entry ({r}, {c}) is not in the upper triangle of a {dim}-dim operator"),
                ));
            }
            if r == c {
                if v.im != 0.0 {
                    return Err(invalid("entries", format!("diagonal entry {r} is not real")));
                }
                all.push((r, c, v));
            } else {
                all.push((r, c, v));
                all.push((c, r, v.conj()));
            }
        }
        all.sort_by_key(|&(r, c, _)| (r, c));
        let mut merged: Vec<(usize, usize, Complex64)> = Vec::with_capacity(all.len());
        for (r, c, v) in all {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        let mut row_ptr = vec![0usize; dim + 1];
        for &(r, _, _) in &merged {
            row_ptr[r + 1] += 1;
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        let cols = merged.iter().map(|&(_, c, _)| c as u32).collect();
        let values = if merged.iter().all(|e| e.2.im == 0.0) {
            Values::Real(merged.iter().map(|e| e.2.re).collect())
        } else {
            Values::Complex(merged.iter().map(|e| e.2).collect())
        };
        Ok(Self {
            dim,
            row_ptr,
            cols,
            values,
        })
    }

    /// Real symmetric convenience constructor.
    pub fn from_real_upper(dim: usize, entries: Vec<(usize, usize, f64)>) -> Result<Self> {
        Self::from_upper_entries(
            dim,
            entries
                .into_iter()
                .map(|(r, c, v)| (r, c, Complex64::new(v, 0.0)))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Stored nonzeros of the full (both-triangle) matrix.
    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    pub fn is_real(&self) -> bool {
        matches!(self.values, Values::Real(_))
    }

    fn value(&self, k: usize) -> Complex64 {
        match &self.values {
            Values::Real(v) => Complex64::new(v[k], 0.0),
            Values::Complex(v) => v[k],
        }
    }

    /// Entries with `row <= col`, each exactly once.
    pub fn upper_entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1])
                .filter(move |&k| self.cols[k] as usize >= r)
                .map(move |k| (r, self.cols[k] as usize, self.value(k)))
        })
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        let range = self.row_ptr[row]..self.row_ptr[row + 1];
        match self.cols[range.clone()].binary_search(&(col as u32)) {
            Ok(k) => self.value(range.start + k),
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i).re).collect()
    }

    /// `y = (H x - shift x) * scale`; rows are summed in a fixed order.
    pub fn apply_shifted(&self, x: &[Complex64], y: &mut [Complex64], shift: f64, scale: f64) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        match &self.values {
            Values::Real(vals) => {
                for (r, out) in y.iter_mut().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                        acc += x[self.cols[k] as usize] * vals[k];
                    }
                    *out = (acc - x[r] * shift) * scale;
                }
            }
            Values::Complex(vals) => {
                for (r, out) in y.iter_mut().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                        acc += x[self.cols[k] as usize] * vals[k];
                    }
                    *out = (acc - x[r] * shift) * scale;
                }
            }
        }
    }

    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        self.apply_shifted(x, y, 0.0, 1.0);
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.dim];
        self.apply(x, &mut y);
        y
    }

    /// `<x|H|x>` (real for Hermitian `H`).
    pub fn expectation(&self, x: &[Complex64]) -> f64 {
        let hx = self.mul_vec(x);
        x.iter().zip(&hx).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// Rigorous spectral enclosure from Gershgorin discs.
    pub fn gershgorin_bounds(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for r in 0..self.dim {
            let mut diag = 0.0;
            let mut radius = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.cols[k] as usize == r {
                    diag = self.value(k).re;
                } else {
                    radius += self.value(k).norm();
                }
            }
            lo = lo.min(diag - radius);
            hi = hi.max(diag + radius);
        }
        if self.dim == 0 {
            (0.0, 0.0)
        } else {
            (lo, hi)
        }
    }

    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        if self.dim > DENSE_LIMIT {
            return Err(Error::DimensionTooLarge {
                dim: self.dim,
                limit: DENSE_LIMIT,
            });
        }
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.cols[k] as usize)] = self.value(k);
            }
        }
        Ok(m)
    }

    /// Dense real part; exact for the real operators built in this crate.
    pub fn to_dense_real(&self) -> Result<DMatrix<f64>> {
        Ok(self.to_dense()?.map(|z| z.re))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn mirrored_entries_are_conjugate() {
        let op = SparseHermitianOperator::from_upper_entries(
            3,
            vec![(0, 0, c(1.0, 0.0)), (0, 2, c(0.5, -2.0)), (1, 2, c(3.0, 0.0)), (1, 2, c(1.0, 0.0))],
        )
        .unwrap();
        let d = op.to_dense().unwrap();
        assert_eq!(d[(2, 0)], c(0.5, 2.0));
        assert_eq!(d[(2, 1)], c(4.0, 0.0));
        assert!((&d - d.adjoint()).iter().all(|z| z.norm() == 0.0));
        assert!(!op.is_real());
        assert_eq!(op.upper_entries().count(), 3);
    }

    #[test]
    fn rejects_lower_and_complex_diagonal() {
        assert!(SparseHermitianOperator::from_upper_entries(2, vec![(1, 0, c(1.0, 0.0))]).is_err());
        assert!(SparseHermitianOperator::from_upper_entries(2, vec![(1, 1, c(1.0, 1.0))]).is_err());
        assert!(SparseHermitianOperator::from_upper_entries(2, vec![(0, 2, c(1.0, 0.0))]).is_err());
    }

    #[test]
    fn product_matches_dense() {
        let op = SparseHermitianOperator::from_upper_entries(
            3,
            vec![(0, 1, c(1.0, 1.0)), (1, 1, c(-2.0, 0.0)), (0, 2, c(0.0, 3.0))],
        )
        .unwrap();
        let x = vec![c(1.0, 0.5), c(-1.0, 2.0), c(0.25, 0.0)];
        let y = op.mul_vec(&x);
        let d = op.to_dense().unwrap();
        for i in 0..3 {
            let mut acc = c(0.0, 0.0);
            for j in 0..3 {
                acc += d[(i, j)] * x[j];
            }
            assert!((acc - y[i]).norm() < 1e-15);
        }
        let (lo, hi) = op.gershgorin_bounds();
        let ev = nalgebra::DMatrix::from_fn(3, 3, |i, j| d[(i, j)]).symmetric_eigenvalues();
        for e in ev.iter() {
            assert!(*e >= lo - 1e-12 && *e <= hi + 1e-12);
        }
    }
}
