use super::{hermitian_eigen, orthonormalize_columns, CMatrix, CVector, C64};
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};

/// Hermitian matrix with half-bandwidth `bw`, stored row-major over the full
/// band so rows can be read without conjugation tricks.
#[derive(Debug, Clone)]
pub struct HermitianBand {
    n: usize,
    bw: usize,
    data: Vec<C64>,
}

impl HermitianBand {
    pub fn zeros(n: usize, bw: usize) -> Self {
        HermitianBand {
            n,
            bw,
            data: vec![C64::new(0.0, 0.0); n * (2 * bw + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        i * (2 * self.bw + 1) + (j + self.bw - i)
    }

    fn in_band(&self, i: usize, j: usize) -> bool {
        i.abs_diff(j) <= self.bw && i < self.n && j < self.n
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        if self.in_band(i, j) {
            self.data[self.idx(i, j)]
        } else {
            C64::new(0.0, 0.0)
        }
    }

    /// Adds `v` to (i, j) and conj(v) to (j, i). On the diagonal only the
    /// real part is kept.
    pub fn add(&mut self, i: usize, j: usize, v: C64) {
        assert!(self.in_band(i, j), "({i}, {j}) outside band {}", self.bw);
        if i == j {
            let k = self.idx(i, i);
            self.data[k] += C64::new(v.re, 0.0);
        } else {
            let k = self.idx(i, j);
            self.data[k] += v;
            let k = self.idx(j, i);
            self.data[k] += v.conj();
        }
    }

    pub fn matvec(&self, x: &[C64], y: &mut [C64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            let lo = i.saturating_sub(self.bw);
            let hi = (i + self.bw).min(self.n - 1);
            let row = &self.data[i * (2 * self.bw + 1)..];
            let mut acc = C64::new(0.0, 0.0);
            for j in lo..=hi {
                acc += row[j + self.bw - i] * x[j];
            }
            *yi = acc;
        }
    }

    pub fn mul_matrix(&self, x: &CMatrix) -> CMatrix {
        let mut y = CMatrix::zeros(self.n, x.ncols());
        let mut buf = vec![C64::new(0.0, 0.0); self.n];
        for c in 0..x.ncols() {
            let col: Vec<C64> = x.column(c).iter().copied().collect();
            self.matvec(&col, &mut buf);
            y.column_mut(c).copy_from_slice(&buf);
        }
        y
    }

    pub fn to_dense(&self) -> CMatrix {
        CMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    /// Largest |H_ij − conj(H_ji)|.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in i..(i + self.bw + 1).min(self.n) {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Upper bound on the spectrum from Gershgorin discs.
    pub fn gershgorin_max(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.bw);
                let hi = (i + self.bw).min(self.n - 1);
                let off: f64 = (lo..=hi).filter(|&j| j != i).map(|j| self.get(i, j).norm()).sum();
                self.get(i, i).re + off
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// LU factorization of `shift·I − H`.
    pub fn factor_shifted(&self, shift: f64) -> Result<BandLu> {
        let mut lu = BandLu::new(self.n, self.bw, self.bw);
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bw);
            let hi = (i + self.bw).min(self.n - 1);
            for j in lo..=hi {
                let mut v = -self.get(i, j);
                if i == j {
                    v += shift;
                }
                lu.set(i, j, v);
            }
        }
        lu.factor()?;
        Ok(lu)
    }

    /// Largest `n_states` eigenpairs by shift-invert block subspace
    /// iteration with Rayleigh-Ritz, values descending.
    pub fn top_eigenpairs(&self, n_states: usize, opts: &SubspaceOptions) -> Result<SubspaceResult> {
        let n = self.n;
        if n_states == 0 || n_states > n {
            return Err(Error::invalid(format!(
                "requested {n_states} eigenpairs of a {n}x{n} matrix"
            )));
        }
        let p = (n_states + opts.guard).min(n);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
        let mut x = CMatrix::from_fn(n, p, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        orthonormalize_columns(&mut x);

        let scale = self.gershgorin_max().abs().max(1.0);
        let mut shift = self.gershgorin_max() + 1e-3 * scale;
        let mut lu = self.factor_shifted(shift)?;
        let mut refined = false;
        let mut residual = f64::INFINITY;

        for iter in 1..=opts.max_iter {
            let mut y = CMatrix::zeros(n, p);
            for c in 0..p {
                let mut b: Vec<C64> = x.column(c).iter().copied().collect();
                lu.solve_in_place(&mut b);
                y.column_mut(c).copy_from_slice(&b);
            }
            orthonormalize_columns(&mut y);
            let hy = self.mul_matrix(&y);
            let t = y.adjoint() * &hy;
            let t = (&t + t.adjoint()) * C64::new(0.5, 0.0);
            let eig = hermitian_eigen(&t);
            // descending order
            let w = CMatrix::from_fn(p, p, |r, c| eig.vectors[(r, p - 1 - c)]);
            let values: Vec<f64> = (0..p).map(|c| eig.values[p - 1 - c]).collect();
            x = &y * &w;
            let hx = &hy * &w;

            residual = 0.0;
            for (c, &lambda) in values.iter().enumerate().take(n_states) {
                let r = hx.column(c) - x.column(c) * C64::new(lambda, 0.0);
                residual = f64::max(residual, r.norm());
            }
            if residual < opts.tol * scale {
                let vectors = x.columns(0, n_states).into_owned();
                return Ok(SubspaceResult {
                    values: values[..n_states].to_vec(),
                    vectors,
                    iterations: iter,
                    residual,
                });
            }
            // Once the top pair has settled, move the shift just above it.
            if !refined && iter >= 3 {
                let r0 = (hx.column(0) - x.column(0) * C64::new(values[0], 0.0)).norm();
                if r0 < 1e-2 * scale {
                    let gap = opts.shift_offset.max(10.0 * r0);
                    if let Ok(f) = self.factor_shifted(values[0] + gap) {
                        shift = values[0] + gap;
                        lu = f;
                        refined = true;
                    }
                }
            }
        }
        let _ = shift;
        Err(Error::NoConvergence {
            iterations: opts.max_iter,
            residual,
        })
    }
}

#[derive(Debug, Clone)]
pub struct SubspaceOptions {
    /// Residual tolerance relative to the spectral scale.
    pub tol: f64,
    pub max_iter: usize,
    /// Extra block vectors beyond the requested count.
    pub guard: usize,
    /// Distance of the refined shift above the top eigenvalue.
    pub shift_offset: f64,
}

impl Default for SubspaceOptions {
    fn default() -> Self {
        SubspaceOptions {
            tol: 1e-11,
            max_iter: 600,
            guard: 6,
            shift_offset: 0.02,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SubspaceResult {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
    pub iterations: usize,
    pub residual: f64,
}

/// Banded LU with partial pivoting (row interchanges), general complex.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    kl: usize,
    /// Upper width including fill-in, kl + ku.
    ku: usize,
    ab: Vec<C64>,
    piv: Vec<usize>,
}

impl BandLu {
    fn new(n: usize, kl: usize, ku: usize) -> Self {
        let ku = kl + ku;
        BandLu {
            n,
            kl,
            ku,
            ab: vec![C64::new(0.0, 0.0); n * (kl + ku + 1)],
            piv: vec![0; n],
        }
    }

    fn width(&self) -> usize {
        self.kl + self.ku + 1
    }

    fn at(&self, i: usize, j: usize) -> usize {
        i * self.width() + (j + self.kl - i)
    }

    fn set(&mut self, i: usize, j: usize, v: C64) {
        let k = self.at(i, j);
        self.ab[k] = v;
    }

    fn factor(&mut self) -> Result<()> {
        let n = self.n;
        let mut amax: f64 = 0.0;
        for v in &self.ab {
            amax = amax.max(v.norm());
        }
        for k in 0..n {
            let last = (k + self.kl).min(n - 1);
            let mut p = k;
            let mut best = self.ab[self.at(k, k)].norm();
            for i in k + 1..=last {
                let v = self.ab[self.at(i, k)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= f64::EPSILON * amax * n as f64 {
                return Err(Error::Singular(k));
            }
            self.piv[k] = p;
            let jmax = (k + self.ku).min(n - 1);
            if p != k {
                for j in k..=jmax {
                    let (a, b) = (self.at(k, j), self.at(p, j));
                    self.ab.swap(a, b);
                }
            }
            let pivot = self.ab[self.at(k, k)];
            for i in k + 1..=last {
                let ik = self.at(i, k);
                let l = self.ab[ik] / pivot;
                self.ab[ik] = l;
                if l == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in k + 1..=jmax {
                    let kj = self.ab[self.at(k, j)];
                    let ij = self.at(i, j);
                    self.ab[ij] -= l * kj;
                }
            }
        }
        Ok(())
    }

    pub fn solve_in_place(&self, b: &mut [C64]) {
        let n = self.n;
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            for i in k + 1..=(k + self.kl).min(n - 1) {
                b[i] -= self.ab[self.at(i, k)] * bk;
            }
        }
        for k in (0..n).rev() {
            let mut acc = b[k];
            for j in k + 1..=(k + self.ku).min(n - 1) {
                acc -= self.ab[self.at(k, j)] * b[j];
            }
            b[k] = acc / self.ab[self.at(k, k)];
        }
    }

    pub fn solve(&self, b: &CVector) -> CVector {
        let mut v: Vec<C64> = b.iter().copied().collect();
        self.solve_in_place(&mut v);
        CVector::from_vec(v)
    }
}
