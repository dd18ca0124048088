use num_complex::Complex64;

use super::tridiag::SymTridiagonal;
use crate::error::{Error, Result};

/// Dense complex Hermitian matrix, full row-major storage.
#[derive(Debug, Clone)]
pub struct HermitianMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl HermitianMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    /// Sets `(i, j)` and the mirrored `(j, i)` entry to the conjugate.
    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        let n = self.n;
        if i == j {
            self.data[i * n + i] = Complex64::new(value.re, 0.0);
        } else {
            self.data[i * n + j] = value;
            self.data[j * n + i] = value.conj();
        }
    }

    /// Unitary Householder reduction to a real symmetric tridiagonal matrix
    /// with the same spectrum (off-diagonal phases are removed by a diagonal
    /// unitary similarity).
    pub fn tridiagonalize(mut self) -> SymTridiagonal {
        let n = self.n;
        let mut off = Vec::with_capacity(n.saturating_sub(1));
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        let mut w = vec![Complex64::new(0.0, 0.0); n];
        for k in 0..n.saturating_sub(1) {
            let norm: f64 = (k + 1..n)
                .map(|i| self.data[i * n + k].norm_sqr())
                .sum::<f64>()
                .sqrt();
            let x0 = self.data[(k + 1) * n + k];
            if norm == 0.0 {
                off.push(0.0);
                continue;
            }
            let phase = if x0.norm() > 0.0 {
                x0 / x0.norm()
            } else {
                Complex64::new(1.0, 0.0)
            };
            let alpha = -phase * norm;
            for i in k + 1..n {
                v[i] = self.data[i * n + k];
            }
            v[k + 1] -= alpha;
            let vnorm: f64 = (k + 1..n).map(|i| v[i].norm_sqr()).sum::<f64>().sqrt();
            if vnorm == 0.0 {
                off.push(norm);
                continue;
            }
            for x in &mut v[k + 1..n] {
                *x /= vnorm;
            }
            // p = A v on the trailing block (rows/cols k+1..n), plus column k.
            for i in k + 1..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in k + 1..n {
                    acc += self.data[i * n + j] * v[j];
                }
                w[i] = acc;
            }
            let vp: f64 = (k + 1..n).map(|i| (v[i].conj() * w[i]).re).sum();
            for i in k + 1..n {
                w[i] = 2.0 * w[i] - 2.0 * vp * v[i];
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let upd = v[i] * w[j].conj() + w[i] * v[j].conj();
                    self.data[i * n + j] -= upd;
                }
            }
            // Column k becomes alpha e_{k+1}.
            for i in k + 2..n {
                self.data[i * n + k] = Complex64::new(0.0, 0.0);
                self.data[k * n + i] = Complex64::new(0.0, 0.0);
            }
            self.data[(k + 1) * n + k] = alpha;
            self.data[k * n + k + 1] = alpha.conj();
            off.push(alpha.norm());
        }
        let diag = (0..n).map(|i| self.data[i * n + i].re).collect();
        SymTridiagonal { diag, off }
    }

    pub fn eigenvalues(self) -> Result<Vec<f64>> {
        if self.n == 0 {
            return Err(Error::invalid("matrix must be at least 1x1"));
        }
        self.tridiagonalize().eigenvalues()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_closed_form() {
        // [[a, c], [conj c, b]] has eigenvalues (a+b)/2 ± sqrt(((a-b)/2)^2 + |c|^2).
        let mut h = HermitianMatrix::zeros(2);
        h.set(0, 0, Complex64::new(0.4, 0.0));
        h.set(1, 1, Complex64::new(-1.0, 0.0));
        h.set(0, 1, Complex64::new(0.3, -0.7));
        let ev = h.eigenvalues().unwrap();
        let mid = -0.3;
        let rad = (0.7f64.powi(2) + 0.3f64.powi(2) + 0.7f64.powi(2)).sqrt();
        assert!((ev[0] - (mid + rad)).abs() < 1e-14);
        assert!((ev[1] - (mid - rad)).abs() < 1e-14);
    }

    #[test]
    fn real_symmetric_input_matches_real_path() {
        let rows = vec![
            vec![1.0, 0.5, -0.2, 0.0],
            vec![0.5, -0.3, 0.8, 0.1],
            vec![-0.2, 0.8, 0.6, -0.9],
            vec![0.0, 0.1, -0.9, 0.2],
        ];
        let mut h = HermitianMatrix::zeros(4);
        for i in 0..4 {
            for j in 0..=i {
                h.set(i, j, Complex64::new(rows[i][j], 0.0));
            }
        }
        let a = h.eigenvalues().unwrap();
        let b = crate::linalg::eigen_sym(&rows).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn trace_and_frobenius_preserved() {
        let n = 6;
        let mut h = HermitianMatrix::zeros(n);
        let mut frob = 0.0;
        let mut trace = 0.0;
        for i in 0..n {
            for j in 0..=i {
                let z = if i == j {
                    Complex64::new((i as f64 * 0.37).sin(), 0.0)
                } else {
                    Complex64::new((i as f64 + 2.0 * j as f64).cos(), (i * j) as f64 * 0.1)
                };
                h.set(i, j, z);
                frob += if i == j { z.norm_sqr() } else { 2.0 * z.norm_sqr() };
                if i == j {
                    trace += z.re;
                }
            }
        }
        let ev = h.eigenvalues().unwrap();
        assert!((ev.iter().sum::<f64>() - trace).abs() < 1e-12);
        assert!((ev.iter().map(|x| x * x).sum::<f64>() - frob).abs() < 1e-11);
    }
}
