use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::SMatrix;
use num_complex::Complex64;

use super::exact::ExactComplex;

/// Dense `N x N` matrix over [`ExactComplex`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Matrix<const N: usize> {
    entries: [[ExactComplex; N]; N],
}

pub type Matrix2 = Matrix<2>;
pub type Matrix4 = Matrix<4>;

impl<const N: usize> Matrix<N> {
    pub fn zero() -> Self {
        Self {
            entries: [[ExactComplex::ZERO; N]; N],
        }
    }

    pub fn identity() -> Self {
        Self::scalar(ExactComplex::ONE)
    }

    /// `s` times the identity.
    pub fn scalar(s: ExactComplex) -> Self {
        let mut m = Self::zero();
        for i in 0..N {
            m.entries[i][i] = s;
        }
        m
    }

    pub fn from_rows(entries: [[ExactComplex; N]; N]) -> Self {
        Self { entries }
    }

    /// Rows of integer-valued Gaussian integers `(re, im)`.
    pub fn from_int_pairs(rows: [[(i64, i64); N]; N]) -> Self {
        let mut m = Self::zero();
        for (i, row) in rows.iter().enumerate() {
            for (j, &(re, im)) in row.iter().enumerate() {
                m.entries[i][j] = ExactComplex::from_ints(re, im);
            }
        }
        m
    }

    pub fn get(&self, row: usize, col: usize) -> ExactComplex {
        self.entries[row][col]
    }

    pub fn rows(&self) -> &[[ExactComplex; N]; N] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(ExactComplex::is_zero)
    }

    pub fn scale(&self, s: ExactComplex) -> Self {
        let mut m = *self;
        m.entries.iter_mut().flatten().for_each(|e| *e = *e * s);
        m
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zero();
        for i in 0..N {
            for j in 0..N {
                m.entries[i][j] = self.entries[j][i].conj();
            }
        }
        m
    }

    /// Determinant by fraction-free cofactor expansion; N is at most 4 here.
    pub fn determinant(&self) -> ExactComplex {
        fn det(rows: &[Vec<ExactComplex>]) -> ExactComplex {
            match rows.len() {
                0 => ExactComplex::ONE,
                1 => rows[0][0],
                n => {
                    let mut acc = ExactComplex::ZERO;
                    for col in 0..n {
                        if rows[0][col].is_zero() {
                            continue;
                        }
                        let minor: Vec<Vec<ExactComplex>> = rows[1..]
                            .iter()
                            .map(|r| {
                                r.iter()
                                    .enumerate()
                                    .filter(|&(c, _)| c != col)
                                    .map(|(_, v)| *v)
                                    .collect()
                            })
                            .collect();
                        let term = rows[0][col] * det(&minor);
                        acc = if col % 2 == 0 { acc + term } else { acc - term };
                    }
                    acc
                }
            }
        }
        let rows: Vec<Vec<ExactComplex>> = self.entries.iter().map(|r| r.to_vec()).collect();
        det(&rows)
    }

    pub fn to_complex64(&self) -> SMatrix<Complex64, N, N> {
        SMatrix::from_fn(|i, j| self.entries[i][j].to_complex64())
    }
}

impl<const N: usize> Default for Matrix<N> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<const N: usize> Add for Matrix<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut m = self;
        for i in 0..N {
            for j in 0..N {
                m.entries[i][j] += rhs.entries[i][j];
            }
        }
        m
    }
}

impl<const N: usize> Sub for Matrix<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<const N: usize> Neg for Matrix<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-ExactComplex::ONE)
    }
}

impl<const N: usize> Mul for Matrix<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zero();
        for i in 0..N {
            for j in 0..N {
                let mut acc = ExactComplex::ZERO;
                for k in 0..N {
                    acc += self.entries[i][k] * rhs.entries[k][j];
                }
                m.entries[i][j] = acc;
            }
        }
        m
    }
}

impl<const N: usize> Mul<ExactComplex> for Matrix<N> {
    type Output = Self;
    fn mul(self, rhs: ExactComplex) -> Self {
        self.scale(rhs)
    }
}

impl<const N: usize> fmt::Display for Matrix<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<Vec<String>> = self
            .entries
            .iter()
            .map(|r| r.iter().map(ToString::to_string).collect())
            .collect();
        let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
        for (i, row) in cells.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "[")?;
            for (j, c) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{c:>width$}")?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

/// `mn + nm`.
///
/// Both operands share the dimension `N` at the type level, so a dimension
/// mismatch cannot be expressed.
pub fn anticommutator<const N: usize>(m: &Matrix<N>, n: &Matrix<N>) -> Matrix<N> {
    *m * *n + *n * *m
}

/// `mn - nm`.
pub fn commutator<const N: usize>(m: &Matrix<N>, n: &Matrix<N>) -> Matrix<N> {
    *m * *n - *n * *m
}

/// Kronecker product `m ⊗ n`: block `(i, j)` of the result is `m[i][j] n`.
pub fn kron(m: &Matrix2, n: &Matrix2) -> Matrix4 {
    let mut out = Matrix4::zero();
    for bi in 0..2 {
        for bj in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    out.entries[2 * bi + i][2 * bj + j] = m.entries[bi][bj] * n.entries[i][j];
                }
            }
        }
    }
    out
}

/// Assembles a 4x4 matrix from its four 2x2 blocks.
pub fn block(ul: &Matrix2, ur: &Matrix2, ll: &Matrix2, lr: &Matrix2) -> Matrix4 {
    let mut out = Matrix4::zero();
    for i in 0..2 {
        for j in 0..2 {
            out.entries[i][j] = ul.entries[i][j];
            out.entries[i][j + 2] = ur.entries[i][j];
            out.entries[i + 2][j] = ll.entries[i][j];
            out.entries[i + 2][j + 2] = lr.entries[i][j];
        }
    }
    out
}
