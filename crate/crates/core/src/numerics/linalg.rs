use num_complex::Complex64;

use crate::error::{Error, Result};

const PIVOT_FLOOR: f64 = 1e-300;

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![Complex64::ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("matrix rows must all have length n".into()));
        }
        Ok(Matrix {
            n,
            data: rows.concat(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| {
                self.data[i * self.n..(i + 1) * self.n]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// LU factorization with partial pivoting.
#[derive(Debug, Clone)]
pub struct LuFactor {
    lu: Matrix,
    perm: Vec<usize>,
}

impl LuFactor {
    pub fn new(mut m: Matrix) -> Result<Self> {
        let n = m.n;
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, m[(i, k)].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(pmax >= PIVOT_FLOOR) {
                return Err(Error::SingularMatrix {
                    column: k,
                    pivot: pmax.max(0.0),
                });
            }
            if p != k {
                for j in 0..n {
                    m.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = m[(k, k)];
            for i in k + 1..n {
                let f = m[(i, k)] / pivot;
                if f == Complex64::ZERO {
                    continue;
                }
                m[(i, k)] = f;
                for j in k + 1..n {
                    let u = m[(k, j)];
                    m[(i, j)] -= f * u;
                }
            }
        }
        Ok(LuFactor { lu: m, perm })
    }

    pub fn solve(&self, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.lu.n;
        if rhs.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "rhs has length {}, matrix is {n}x{n}",
                rhs.len()
            )));
        }
        let mut x: Vec<Complex64> = self.perm.iter().map(|&i| rhs[i]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        Ok(x)
    }
}

/// Solves `m · x = rhs` by LU with partial pivoting.
pub fn lu_solve(m: &Matrix, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
    if rhs.len() != m.n {
        return Err(Error::DimensionMismatch(format!(
            "rhs has length {}, matrix is {}x{}",
            rhs.len(),
            m.n,
            m.n
        )));
    }
    LuFactor::new(m.clone())?.solve(rhs)
}
