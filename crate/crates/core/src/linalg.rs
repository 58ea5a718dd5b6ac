//! Exact integer matrices.

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::radical::Polynomial;

/// Square integer matrix, row major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    n: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidArgument("matrix must be nonempty".into()));
        }
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "matrix must be square: row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            data.extend(row.iter().cloned().map(Into::into));
        }
        Ok(IntMatrix { n, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix {
            n,
            data: vec![BigInt::zero(); n * n],
        };
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|x| !x.is_negative())
    }

    pub fn trace(&self) -> BigInt {
        (0..self.n).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn pow(&self, mut k: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity(self.n);
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `self − c·I`
    pub fn minus_scalar(&self, c: i64) -> Self {
        let mut m = self.clone();
        for i in 0..self.n {
            m.data[i * self.n + i] -= c;
        }
        m
    }

    /// `c·I − self`
    pub fn scalar_minus(&self, c: i64) -> Self {
        let mut m = self.clone();
        for x in m.data.iter_mut() {
            *x = -&*x;
        }
        for i in 0..self.n {
            m.data[i * self.n + i] += c;
        }
        m
    }

    /// Determinant by fraction-free (Bareiss) elimination with row pivoting.
    pub fn det(&self) -> BigInt {
        let n = self.n;
        let mut a = self.rows();
        let mut prev = BigInt::one();
        let mut sign = 1;
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        if sign < 0 {
            -a[n - 1][n - 1].clone()
        } else {
            a[n - 1][n - 1].clone()
        }
    }

    /// `det(I − z·A)` as an integer polynomial in `z`.
    ///
    /// Bareiss elimination over `Z[z]`. The pivots are leading principal
    /// minors of `I − zA`, which all have constant term 1, so no pivoting is
    /// needed and every division is exact.
    pub fn det_one_minus_z(&self) -> Polynomial {
        let n = self.n;
        let mut a: Vec<Vec<Polynomial>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let c0 = if i == j { BigInt::one() } else { BigInt::zero() };
                        Polynomial::new(vec![c0, -self.get(i, j).clone()])
                    })
                    .collect()
            })
            .collect();
        let mut prev = Polynomial::one();
        for k in 0..n {
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                    a[i][j] = v
                        .div_exact(&prev)
                        .expect("Bareiss division over Z[z] is exact");
                }
            }
            prev = a[k][k].clone();
        }
        a[n - 1][n - 1].clone()
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;

    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, rhs.n, "matrix size mismatch");
        let n = self.n;
        let mut data = vec![BigInt::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * rhs.get(k, j);
                }
            }
        }
        IntMatrix { n, data }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.data.chunks(self.n).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, x) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}
