//! Dense LU with partial pivoting, sized for the stationary-vector solves
//! of small truncated generators (a few thousand unknowns at most).

use crate::{Error, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone)]
pub struct DenseMatrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }

    /// Solve `A x = b` in place (destroys `self`).
    pub fn solve(mut self, mut b: Vec<f64>) -> Result<Vec<f64>> {
        let n = self.n;
        assert_eq!(b.len(), n);
        for col in 0..n {
            let mut piv = col;
            let mut best = self.at(col, col).abs();
            for r in col + 1..n {
                let v = self.at(r, col).abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::SingularSystem(col));
            }
            if piv != col {
                for j in 0..n {
                    self.data.swap(col * n + j, piv * n + j);
                }
                b.swap(col, piv);
            }
            let d = self.at(col, col);
            for r in col + 1..n {
                let factor = self.at(r, col) / d;
                if factor == 0.0 {
                    continue;
                }
                for j in col..n {
                    *self.at_mut(r, j) -= factor * self.at(col, j);
                }
                b[r] -= factor * b[col];
            }
        }
        for col in (0..n).rev() {
            let mut acc = b[col];
            for j in col + 1..n {
                acc -= self.at(col, j) * b[j];
            }
            b[col] = acc / self.at(col, col);
        }
        Ok(b)
    }
}
