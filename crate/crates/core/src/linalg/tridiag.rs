//! Symmetric tridiagonal eigenvalue kernels: implicit-shift QL for the full
//! spectrum and Sturm-sequence bisection for counts and extremal eigenvalues.

use crate::error::{Error, Result};

/// Real symmetric tridiagonal matrix. `off[i]` couples rows `i` and `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

const MAX_QL_SWEEPS: usize = 60;

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::invalid("tridiagonal matrix must have n >= 1"));
        }
        if off.len() + 1 != diag.len() {
            return Err(Error::invalid(format!(
                "off-diagonal length {} does not match n - 1 = {}",
                off.len(),
                diag.len() - 1
            )));
        }
        Ok(Self { diag, off })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence / LDLᵀ inertia).
    pub fn count_below(&self, x: f64) -> usize {
        let n = self.len();
        let tiny = f64::MIN_POSITIVE.sqrt();
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..n {
            let denom = if q == 0.0 { tiny } else { q };
            q = self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / denom;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// `Σ_j 1/(x - λ_j)` from the pivots of `x - T` and their derivatives,
    /// in `O(n)`. Accurate when `x` lies above the spectrum.
    pub fn resolvent_trace(&self, x: f64) -> f64 {
        let mut u = x - self.diag[0];
        let mut du = 1.0;
        let mut sum = du / u;
        for i in 1..self.len() {
            let ratio = self.off[i - 1] * self.off[i - 1] / u;
            du = 1.0 + ratio * du / u;
            u = x - self.diag[i] - ratio;
            sum += du / u;
        }
        sum
    }

    /// Number of eigenvalues at or above `x`.
    pub fn count_at_or_above(&self, x: f64) -> usize {
        self.len() - self.count_below(x)
    }

    /// The `k` largest eigenvalues in non-increasing order, by bisection.
    pub fn top_eigenvalues(&self, k: usize) -> Vec<f64> {
        let n = self.len();
        let k = k.min(n);
        let (lo0, hi0) = self.gershgorin();
        let scale = lo0.abs().max(hi0.abs()).max(1.0);
        let tol = 4.0 * f64::EPSILON * scale;
        let mut out = Vec::with_capacity(k);
        // Upper bracket of the j-th largest eigenvalue is the (j-1)-th one.
        let mut upper = hi0;
        for j in 1..=k {
            let mut lo = lo0;
            let mut hi = upper;
            while hi - lo > tol {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if self.count_at_or_above(mid) >= j {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let value = 0.5 * (lo + hi);
            out.push(value);
            upper = hi;
        }
        out
    }

    /// All eigenvalues, sorted non-increasing, by implicit-shift QL.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let mut d = self.diag.clone();
        let mut e = self.off.clone();
        e.push(0.0);
        ql_implicit(&mut d, &mut e)?;
        d.sort_by(|a, b| b.total_cmp(a));
        Ok(d)
    }
}

/// Eigenvalues of a symmetric tridiagonal matrix in place (`d` diagonal,
/// `e[i]` coupling `i` and `i + 1`, `e[n-1]` ignored). Unsorted on return.
pub(crate) fn ql_implicit(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_SWEEPS {
                return Err(Error::numeric(
                    format!("QL iteration did not converge for eigenvalue {l}"),
                    e[l].abs(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
