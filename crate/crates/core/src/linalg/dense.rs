//! Dense real symmetric matrices stored as a packed lower triangle, reduced to
//! tridiagonal form by Householder reflections.

use super::tridiag::SymTridiagonal;
use crate::error::{Error, Result};

/// Real symmetric matrix, packed lower triangle in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

#[inline]
fn row_start(i: usize) -> usize {
    i * (i + 1) / 2
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * (n + 1) / 2],
        }
    }

    /// Builds from a full square matrix, checking symmetry to `1e-12` componentwise.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::invalid("matrix must be at least 1x1"));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("matrix is not square"));
        }
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let (a, b) = (rows[i][j], rows[j][i]);
                if !a.is_finite() || !b.is_finite() {
                    return Err(Error::invalid(format!("non-finite entry at ({i}, {j})")));
                }
                if (a - b).abs() > 1e-12 {
                    return Err(Error::invalid(format!(
                        "matrix is not symmetric at ({i}, {j}): {a} vs {b}"
                    )));
                }
                m.set(i, j, 0.5 * (a + b));
            }
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if j > i { (j, i) } else { (i, j) };
        self.data[row_start(i) + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let (i, j) = if j > i { (j, i) } else { (i, j) };
        self.data[row_start(i) + j] = value;
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Householder reduction to a similar symmetric tridiagonal matrix.
    ///
    /// Rows are eliminated from the bottom up so that every access touches a
    /// contiguous row of the packed lower triangle.
    pub fn tridiagonalize(mut self) -> SymTridiagonal {
        let n = self.n;
        let mut diag = vec![0.0; n];
        let mut sub = vec![0.0; n];
        let mut u = vec![0.0; n];
        let mut p = vec![0.0; n];
        for i in (1..n).rev() {
            let l = i - 1;
            let rs = row_start(i);
            if l == 0 {
                sub[i] = self.data[rs];
                continue;
            }
            let scale: f64 = self.data[rs..=rs + l].iter().map(|x| x.abs()).sum();
            if scale == 0.0 {
                sub[i] = 0.0;
                continue;
            }
            let mut h = 0.0;
            for k in 0..=l {
                let x = self.data[rs + k] / scale;
                u[k] = x;
                h += x * x;
            }
            let f = u[l];
            let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
            sub[i] = scale * g;
            h -= f * g;
            u[l] = f - g;

            // p = A u / h over the leading (l+1)x(l+1) block.
            p[..=l].iter_mut().for_each(|x| *x = 0.0);
            for j in 0..=l {
                let row = &self.data[row_start(j)..=row_start(j) + j];
                let uj = u[j];
                let mut acc = row[j] * uj;
                for k in 0..j {
                    acc += row[k] * u[k];
                    p[k] += row[k] * uj;
                }
                p[j] += acc;
            }
            let mut f_acc = 0.0;
            for j in 0..=l {
                p[j] /= h;
                f_acc += p[j] * u[j];
            }
            let hh = f_acc / (h + h);
            for j in 0..=l {
                p[j] -= hh * u[j];
            }
            // A <- A - u pᵀ - p uᵀ
            for j in 0..=l {
                let (uj, pj) = (u[j], p[j]);
                let start = row_start(j);
                let row = &mut self.data[start..=start + j];
                for k in 0..=j {
                    row[k] -= uj * p[k] + pj * u[k];
                }
            }
        }
        for (i, d) in diag.iter_mut().enumerate() {
            *d = self.data[row_start(i) + i];
        }
        let off = sub[1..].to_vec();
        SymTridiagonal { diag, off }
    }

    /// All eigenvalues sorted non-increasing.
    pub fn eigenvalues(self) -> Result<Vec<f64>> {
        self.tridiagonalize().eigenvalues()
    }
}

/// Eigenvalues (non-increasing) of a dense real symmetric matrix given by rows.
pub fn eigen_sym(rows: &[Vec<f64>]) -> Result<Vec<f64>> {
    SymMatrix::from_rows(rows)?.eigenvalues()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Characteristic polynomial det(A - x I) by Gaussian elimination with
    /// partial pivoting. Independent of the Householder path.
    fn char_poly(a: &[Vec<f64>], x: f64) -> f64 {
        let n = a.len();
        let mut m: Vec<Vec<f64>> = a.to_vec();
        for (i, row) in m.iter_mut().enumerate() {
            row[i] -= x;
        }
        let mut det = 1.0;
        for c in 0..n {
            let piv = (c..n)
                .max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))
                .unwrap();
            if m[piv][c] == 0.0 {
                return 0.0;
            }
            if piv != c {
                m.swap(piv, c);
                det = -det;
            }
            det *= m[c][c];
            for r in c + 1..n {
                let f = m[r][c] / m[c][c];
                for k in c..n {
                    m[r][k] -= f * m[c][k];
                }
            }
        }
        det
    }

    /// Roots of the characteristic polynomial by scanning for sign changes
    /// and bisecting each bracket.
    fn char_poly_roots(a: &[Vec<f64>]) -> Vec<f64> {
        let bound: f64 = a
            .iter()
            .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
            + 1.0;
        let steps = 200_000;
        let mut roots = Vec::new();
        let mut x0 = -bound;
        let mut f0 = char_poly(a, x0);
        for s in 1..=steps {
            let x1 = -bound + 2.0 * bound * s as f64 / steps as f64;
            let f1 = char_poly(a, x1);
            if f0 == 0.0 || f0.signum() != f1.signum() {
                let (mut lo, mut hi, flo) = (x0, x1, f0);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    let fm = char_poly(a, mid);
                    if fm.signum() == flo.signum() && fm != 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
            x0 = x1;
            f0 = f1;
        }
        roots.sort_by(|a, b| b.total_cmp(a));
        roots
    }

    #[test]
    fn diagonal_matrix() {
        let a = vec![
            vec![3.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 2.0],
        ];
        assert_eq!(eigen_sym(&a).unwrap(), vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn swap_matrix() {
        let ev = eigen_sym(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-15 && (ev[1] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_4x4_matches_characteristic_polynomial() {
        let a = vec![
            vec![0.8147, 0.6324, 0.9575, 0.9572],
            vec![0.6324, 0.0975, 0.9649, 0.4854],
            vec![0.9575, 0.9649, 0.1576, 0.8003],
            vec![0.9572, 0.4854, 0.8003, 0.1419],
        ];
        let ev = eigen_sym(&a).unwrap();
        let oracle = char_poly_roots(&a);
        assert_eq!(oracle.len(), 4);
        for (x, y) in ev.iter().zip(&oracle) {
            assert!((x - y).abs() <= 1e-10, "{x} vs {y}");
        }
        let trace: f64 = (0..4).map(|i| a[i][i]).sum();
        assert!((ev.iter().sum::<f64>() - trace).abs() < 1e-8 * 4.0);
    }

    #[test]
    fn rejects_asymmetric() {
        let err = eigen_sym(&[vec![0.0, 1.0], vec![1.1, 0.0]]).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }

    #[test]
    fn rejects_empty_and_ragged() {
        assert!(eigen_sym(&[]).is_err());
        assert!(eigen_sym(&[vec![1.0, 2.0]]).is_err());
    }
}
