//! Small dense complex linear algebra for the decode systems.

use num_complex::Complex64;

pub type CMatrix = Vec<Vec<Complex64>>;

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
}

impl Lu {
    /// Returns `None` when a pivot is exactly zero or non-finite.
    pub fn factor(a: &CMatrix) -> Option<Self> {
        let n = a.len();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n).max_by(|&x, &y| lu[x][k].norm().total_cmp(&lu[y][k].norm()))?;
            let pivot = lu[p][k];
            if pivot.norm() == 0.0 || !pivot.is_finite() {
                return None;
            }
            lu.swap(k, p);
            perm.swap(k, p);
            for i in k + 1..n {
                let f = lu[i][k] / pivot;
                lu[i][k] = f;
                for j in k + 1..n {
                    let u = lu[k][j];
                    lu[i][j] -= f * u;
                }
            }
        }
        Some(Self { lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.lu.len()
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.lu[i][j];
                x[i] = x[i] - l * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = self.lu[i][j];
                x[i] = x[i] - u * x[j];
            }
            x[i] /= self.lu[i][i];
        }
        x
    }

    pub fn inverse(&self) -> CMatrix {
        let n = self.dim();
        let mut inv = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        for j in 0..n {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[j] = Complex64::new(1.0, 0.0);
            for (i, v) in self.solve(&e).into_iter().enumerate() {
                inv[i][j] = v;
            }
        }
        inv
    }
}

/// Maximum absolute column sum.
pub fn norm1(a: &CMatrix) -> f64 {
    let n = a.first().map_or(0, Vec::len);
    (0..n)
        .map(|j| a.iter().map(|row| row[j].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// One-norm condition number; infinite for a singular matrix.
pub fn condition1(a: &CMatrix) -> f64 {
    match Lu::factor(a) {
        Some(lu) => {
            let k = norm1(a) * norm1(&lu.inverse());
            if k.is_finite() {
                k
            } else {
                f64::INFINITY
            }
        }
        None => f64::INFINITY,
    }
}

pub fn mat_vec(a: &CMatrix, x: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(r, v)| r * v).sum())
        .collect()
}
