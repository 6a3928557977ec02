//! Small numerical kernels: Hermitian eigensolvers, banded shift-invert
//! subspace iteration, symmetric tridiagonal bisection, and least squares.

mod band;
mod fit;
mod tridiag;

pub use band::{BandLu, HermitianBand, SubspaceOptions, SubspaceResult};
pub use fit::{levenberg_marquardt, linear_fit, LinearFit, LmOptions, LmResult};
pub use tridiag::{SymTridiagonal, TridiagEigen};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: CMatrix,
}

pub fn hermitian_eigen(m: &CMatrix) -> HermitianEigen {
    let n = m.nrows();
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    HermitianEigen { values, vectors }
}

/// exp(-i H t / ħ) for a fixed Hermitian H, evaluated through its
/// eigendecomposition so arbitrary durations are exact.
#[derive(Debug, Clone)]
pub struct SpectralPropagator {
    eig: HermitianEigen,
    vectors_adj: CMatrix,
    hbar: f64,
}

impl SpectralPropagator {
    pub fn new(h: &CMatrix, hbar: f64) -> Self {
        let eig = hermitian_eigen(h);
        let vectors_adj = eig.vectors.adjoint();
        SpectralPropagator {
            eig,
            vectors_adj,
            hbar,
        }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eig.values
    }

    /// Full propagator for duration `t`.
    pub fn unitary(&self, t: f64) -> CMatrix {
        let mut v = self.eig.vectors.clone();
        for (c, &e) in self.eig.values.iter().enumerate() {
            let ph = C64::from_polar(1.0, -e * t / self.hbar);
            v.column_mut(c).iter_mut().for_each(|x| *x *= ph);
        }
        v * &self.vectors_adj
    }

    /// Projects `x` onto the eigenbasis; pair with [`SpectralPropagator::evolve_projected`].
    pub fn project(&self, x: &CMatrix) -> CMatrix {
        &self.vectors_adj * x
    }

    /// Evolves columns previously passed through [`SpectralPropagator::project`] by `t`.
    pub fn evolve_projected(&self, projected: &CMatrix, t: f64) -> CMatrix {
        let mut w = projected.clone();
        for (r, &e) in self.eig.values.iter().enumerate() {
            let ph = C64::from_polar(1.0, -e * t / self.hbar);
            w.row_mut(r).iter_mut().for_each(|x| *x *= ph);
        }
        &self.eig.vectors * w
    }
}

/// Modified Gram-Schmidt (two passes) on the columns of `m`, in place.
/// Returns the smallest column norm seen before normalization, relative
/// to the original column norm.
pub fn orthonormalize_columns(m: &mut CMatrix) -> f64 {
    let mut worst = f64::INFINITY;
    for j in 0..m.ncols() {
        let norm0 = m.column(j).norm();
        for _ in 0..2 {
            for k in 0..j {
                let (qk, mut vj) = column_pair(m, k, j);
                let proj = qk.dotc(&vj);
                vj.axpy(-proj, &qk, C64::new(1.0, 0.0));
                m.set_column(j, &vj);
            }
        }
        let norm = m.column(j).norm();
        worst = worst.min(if norm0 > 0.0 { norm / norm0 } else { 0.0 });
        if norm > 0.0 {
            m.column_mut(j).unscale_mut(norm);
        }
    }
    worst
}

fn column_pair(m: &CMatrix, k: usize, j: usize) -> (CVector, CVector) {
    (m.column(k).into_owned(), m.column(j).into_owned())
}
