//! Block-tridiagonal complex systems with 6×6 blocks.

use nalgebra::{DMatrix, SMatrix};

use crate::error::{Error, Result};
use crate::scalar::{Complex, Real};

/// Size of one block: the six fluctuation operators of the three modes.
pub const BLOCK: usize = 6;

pub type Block<T> = SMatrix<Complex<T>, BLOCK, BLOCK>;

/// Square matrix made of `n` diagonal blocks, `n − 1` blocks right above
/// and `n − 1` blocks right below the diagonal. `upper[i]` sits at block
/// position (i, i+1) and `lower[i]` at (i+1, i).
#[derive(Debug, Clone, PartialEq)]
pub struct BlockTridiagonal<T: Real> {
    pub diag: Vec<Block<T>>,
    pub upper: Vec<Block<T>>,
    pub lower: Vec<Block<T>>,
}

impl<T: Real> BlockTridiagonal<T> {
    pub fn new(diag: Vec<Block<T>>, upper: Vec<Block<T>>, lower: Vec<Block<T>>) -> Result<Self> {
        let n = diag.len();
        if n == 0 || upper.len() + 1 != n || lower.len() + 1 != n {
            return Err(Error::Domain(format!(
                "block counts do not form a tridiagonal layout: {n} diagonal, {} upper, {} lower",
                upper.len(),
                lower.len()
            )));
        }
        Ok(Self { diag, upper, lower })
    }

    pub fn n_blocks(&self) -> usize {
        self.diag.len()
    }

    pub fn dim(&self) -> usize {
        BLOCK * self.n_blocks()
    }

    pub fn transpose(&self) -> Self {
        Self {
            diag: self.diag.iter().map(|b| b.transpose()).collect(),
            upper: self.lower.iter().map(|b| b.transpose()).collect(),
            lower: self.upper.iter().map(|b| b.transpose()).collect(),
        }
    }

    /// Entry-wise map over every stored block, keeping the layout.
    pub fn map_blocks(&self, f: impl Fn(usize, usize, &Block<T>) -> Block<T>) -> Self {
        Self {
            diag: self
                .diag
                .iter()
                .enumerate()
                .map(|(i, b)| f(i, i, b))
                .collect(),
            upper: self
                .upper
                .iter()
                .enumerate()
                .map(|(i, b)| f(i, i + 1, b))
                .collect(),
            lower: self
                .lower
                .iter()
                .enumerate()
                .map(|(i, b)| f(i + 1, i, b))
                .collect(),
        }
    }

    pub fn to_dense(&self) -> DMatrix<Complex<T>> {
        let n = self.n_blocks();
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        for i in 0..n {
            m.fixed_view_mut::<BLOCK, BLOCK>(BLOCK * i, BLOCK * i)
                .copy_from(&self.diag[i]);
            if i + 1 < n {
                m.fixed_view_mut::<BLOCK, BLOCK>(BLOCK * i, BLOCK * (i + 1))
                    .copy_from(&self.upper[i]);
                m.fixed_view_mut::<BLOCK, BLOCK>(BLOCK * (i + 1), BLOCK * i)
                    .copy_from(&self.lower[i]);
            }
        }
        m
    }

    /// Solves `self · X = rhs` by block forward elimination and back
    /// substitution. `rhs` holds one `BLOCK × R` slab per block row.
    pub fn solve<const R: usize>(
        &self,
        rhs: &[SMatrix<Complex<T>, BLOCK, R>],
    ) -> Result<Vec<SMatrix<Complex<T>, BLOCK, R>>> {
        let n = self.n_blocks();
        if rhs.len() != n {
            return Err(Error::Domain(format!(
                "right-hand side has {} block rows, matrix has {n}",
                rhs.len()
            )));
        }

        let mut pivots = Vec::with_capacity(n);
        let mut b = rhs.to_vec();
        pivots.push(self.diag[0].lu());
        for i in 1..n {
            let prev = &pivots[i - 1];
            // W = L_i · D'_{i−1}⁻¹
            let w = prev
                .solve(&Block::<T>::identity())
                .map(|inv| self.lower[i - 1] * inv)
                .ok_or_else(|| singular(i - 1))?;
            let d = self.diag[i] - w * self.upper[i - 1];
            let carried = w * b[i - 1];
            b[i] -= carried;
            pivots.push(d.lu());
        }

        let mut x = b;
        x[n - 1] = pivots[n - 1]
            .solve(&x[n - 1])
            .ok_or_else(|| singular(n - 1))?;
        for i in (0..n - 1).rev() {
            let r = x[i] - self.upper[i] * x[i + 1];
            x[i] = pivots[i].solve(&r).ok_or_else(|| singular(i))?;
        }
        Ok(x)
    }
}

fn singular(block: usize) -> Error {
    Error::Singular(format!("pivot block {block} is not invertible"))
}

/// Dense LU solve used to cross-check the block elimination.
pub fn solve_dense<T: Real>(
    matrix: DMatrix<Complex<T>>,
    rhs: DMatrix<Complex<T>>,
) -> Result<DMatrix<Complex<T>>> {
    matrix
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Singular("dense system is not invertible".into()))
}
