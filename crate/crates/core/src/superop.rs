//! Dense superoperators on vectorized density matrices.
//!
//! Rows flatten `(p, p')` and columns flatten `(q, q')`, both as `p * d + p'`,
//! so `(M rho)_{pp'} = sum_{qq'} M_{pp',qq'} rho_{qq'}`.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::density::{devectorize, vectorize, DensityMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    data: DMatrix<C64>,
}

impl Superoperator {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: DMatrix::zeros(dim * dim, dim * dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            data: DMatrix::identity(dim * dim, dim * dim),
        }
    }

    pub fn from_matrix(dim: usize, data: DMatrix<C64>) -> Result<Self> {
        let n = dim * dim;
        if data.nrows() != n || data.ncols() != n {
            return Err(Error::Dimension {
                expected: n,
                actual: data.nrows().max(data.ncols()),
            });
        }
        Ok(Self { dim, data })
    }

    /// Superoperator of `rho -> A rho B`.
    pub fn sandwich(a: &DMatrix<C64>, b: &DMatrix<C64>) -> Self {
        let d = a.nrows();
        let data = DMatrix::from_fn(d * d, d * d, |r, c| {
            let (p, pp) = (r / d, r % d);
            let (q, qq) = (c / d, c % d);
            a[(p, q)] * b[(qq, pp)]
        });
        Self { dim: d, data }
    }

    #[inline]
    pub fn index(&self, p: usize, pp: usize) -> usize {
        p * self.dim + pp
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn matrix_mut(&mut self) -> &mut DMatrix<C64> {
        &mut self.data
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.data
    }

    #[inline]
    pub fn get(&self, p: usize, pp: usize, q: usize, qq: usize) -> C64 {
        self.data[(self.index(p, pp), self.index(q, qq))]
    }

    #[inline]
    pub fn add_to(&mut self, p: usize, pp: usize, q: usize, qq: usize, v: C64) {
        let (r, c) = (self.index(p, pp), self.index(q, qq));
        self.data[(r, c)] += v;
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                actual: rho.dim(),
            });
        }
        devectorize(&(&self.data * vectorize(rho)), self.dim)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max_{qq'} |sum_p M_{pp,qq'}|`, relative to `max |M|`.
    pub fn trace_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for c in 0..d * d {
            let s: C64 = (0..d).map(|p| self.data[(p * d + p, c)]).sum();
            worst = worst.max(s.norm());
        }
        relative(worst, self.max_abs())
    }

    /// `max |M_{pp',qq'}^* - M_{p'p,q'q}|`, relative to `max |M|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for p in 0..d {
            for pp in 0..d {
                for q in 0..d {
                    for qq in 0..d {
                        let a = self.get(p, pp, q, qq).conj();
                        let b = self.get(pp, p, qq, q);
                        worst = worst.max((a - b).norm());
                    }
                }
            }
        }
        relative(worst, self.max_abs())
    }

    /// Max-norm distance relative to `max |self|`.
    pub fn relative_distance(&self, other: &Superoperator) -> f64 {
        let diff = (&self.data - &other.data)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        relative(diff, self.max_abs())
    }
}

fn relative(value: f64, scale: f64) -> f64 {
    if scale == 0.0 {
        value
    } else {
        value / scale
    }
}

impl std::ops::Add for &Superoperator {
    type Output = Superoperator;
    fn add(self, rhs: &Superoperator) -> Superoperator {
        assert_eq!(self.dim, rhs.dim);
        Superoperator {
            dim: self.dim,
            data: &self.data + &rhs.data,
        }
    }
}

impl std::ops::Sub for &Superoperator {
    type Output = Superoperator;
    fn sub(self, rhs: &Superoperator) -> Superoperator {
        assert_eq!(self.dim, rhs.dim);
        Superoperator {
            dim: self.dim,
            data: &self.data - &rhs.data,
        }
    }
}

impl std::ops::Mul<C64> for &Superoperator {
    type Output = Superoperator;
    fn mul(self, rhs: C64) -> Superoperator {
        Superoperator {
            dim: self.dim,
            data: &self.data * rhs,
        }
    }
}

impl std::ops::Mul for &Superoperator {
    type Output = Superoperator;
    fn mul(self, rhs: &Superoperator) -> Superoperator {
        assert_eq!(self.dim, rhs.dim);
        Superoperator {
            dim: self.dim,
            data: &self.data * &rhs.data,
        }
    }
}
