//! Small dense complex matrices and a cyclic Jacobi Hermitian eigensolver.
//! Dimensions here stay ≤ 16, so a dependency-free dense kernel is plenty.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default linear-algebra tolerance.
pub const TOL: f64 = 1e-10;

/// Off-diagonal norm target for the Jacobi sweeps.
const JACOBI_TARGET: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    n: usize,
    data: Vec<Complex64>, // row-major
}

impl CMat {
    pub fn zeros(n: usize) -> CMat {
        CMat { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> CMat {
        let mut m = CMat::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Complex64) -> CMat {
        let mut m = CMat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    pub fn mul(&self, other: &CMat) -> CMat {
        assert_eq!(self.n, other.n, "matrix dimensions must agree");
        let n = self.n;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn dagger(&self) -> CMat {
        let n = self.n;
        CMat::from_fn(n, |i, j| self.data[j * n + i].conj())
    }

    pub fn add(&self, other: &CMat) -> CMat {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (x, y) in out.data.iter_mut().zip(&other.data) {
            *x += y;
        }
        out
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (x, y) in out.data.iter_mut().zip(&other.data) {
            *x -= y;
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> CMat {
        let mut out = self.clone();
        for x in out.data.iter_mut() {
            *x *= s;
        }
        out
    }

    pub fn add_assign_scaled(&mut self, other: &CMat, s: Complex64) {
        assert_eq!(self.n, other.n);
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x += s * y;
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.data[i * self.n + i]).sum()
    }

    /// Hilbert-Schmidt inner product Tr(A† B).
    pub fn frobenius_inner(&self, other: &CMat) -> Complex64 {
        assert_eq!(self.n, other.n);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Tensor (Kronecker) product, left factor most significant.
    pub fn kron(&self, other: &CMat) -> CMat {
        let (n1, n2) = (self.n, other.n);
        let n = n1 * n2;
        let mut out = CMat::zeros(n);
        for i1 in 0..n1 {
            for j1 in 0..n1 {
                let a = self.data[i1 * n1 + j1];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for i2 in 0..n2 {
                    for j2 in 0..n2 {
                        out.data[(i1 * n2 + i2) * n + (j1 * n2 + j2)] =
                            a * other.data[i2 * n2 + j2];
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| self.data[i * self.n + j] * v[j])
                    .sum()
            })
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.dagger().mul(self).sub(&CMat::identity(self.n)).max_abs() <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.sub(&self.dagger()).max_abs() <= tol
    }

    pub fn max_off_diagonal(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    m = m.max(self.data[i * self.n + j].norm());
                }
            }
        }
        m
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.n).map(|i| self.data[i * self.n + j]).collect()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    /// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations,
    /// driven until the largest off-diagonal entry falls below 1e-12.
    /// Returns eigenvalues in ascending order with matching eigenvector
    /// columns, each phase-fixed (largest component real positive).
    pub fn hermitian_eigen(&self) -> Result<(Vec<f64>, CMat)> {
        if !self.is_hermitian(1e-8) {
            return Err(Error::InvalidArgument("matrix is not Hermitian".into()));
        }
        let n = self.n;
        let mut a = self.clone();
        let mut v = CMat::identity(n);

        for _sweep in 0..60 {
            if a.max_off_diagonal() <= JACOBI_TARGET {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a.data[p * n + q];
                    let r = apq.norm();
                    if r <= JACOBI_TARGET / 10.0 {
                        continue;
                    }
                    let app = a.data[p * n + p].re;
                    let aqq = a.data[q * n + q].re;
                    let phi = apq / r; // unit modulus

                    // 2x2 annihilation: tan(2θ) = 2r / (app - aqq).
                    let delta = app - aqq;
                    let t = if delta.abs() < 1e-300 {
                        1.0
                    } else {
                        let tau = delta / (2.0 * r);
                        tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;

                    // R_pp = c, R_pq = -s·φ, R_qp = s·φ̄, R_qq = c; A ← R† A R.
                    let (cs, sphi) = (Complex64::new(c, 0.0), phi * s);
                    for k in 0..n {
                        let akp = a.data[k * n + p];
                        let akq = a.data[k * n + q];
                        a.data[k * n + p] = akp * cs + akq * sphi.conj();
                        a.data[k * n + q] = -sphi * akp + akq * cs;
                    }
                    for k in 0..n {
                        let apk = a.data[p * n + k];
                        let aqk = a.data[q * n + k];
                        a.data[p * n + k] = cs * apk + sphi * aqk;
                        a.data[q * n + k] = -sphi.conj() * apk + cs * aqk;
                    }
                    for k in 0..n {
                        let vkp = v.data[k * n + p];
                        let vkq = v.data[k * n + q];
                        v.data[k * n + p] = vkp * cs + vkq * sphi.conj();
                        v.data[k * n + q] = -sphi * vkp + vkq * cs;
                    }
                }
            }
        }

        if a.max_off_diagonal() > 1e-9 {
            return Err(Error::Construction(format!(
                "Jacobi failed to converge: off-diagonal {:.3e}",
                a.max_off_diagonal()
            )));
        }

        let mut order: Vec<usize> = (0..n).collect();
        let evals: Vec<f64> = (0..n).map(|i| a.data[i * n + i].re).collect();
        order.sort_by(|&i, &j| evals[i].partial_cmp(&evals[j]).unwrap());

        let mut vectors = CMat::zeros(n);
        for (new_col, &old_col) in order.iter().enumerate() {
            let col = phase_fix(&v.column(old_col));
            for i in 0..n {
                vectors.data[i * n + new_col] = col[i];
            }
        }
        let sorted: Vec<f64> = order.iter().map(|&i| evals[i]).collect();
        Ok((sorted, vectors))
    }
}

/// Multiplies by a global phase so the largest-magnitude component is real
/// positive. Deterministic: the first strictly-largest entry wins.
pub fn phase_fix(v: &[Complex64]) -> Vec<Complex64> {
    let mut best = 0usize;
    for (i, z) in v.iter().enumerate() {
        if z.norm() > v[best].norm() + 1e-14 {
            best = i;
        }
    }
    let z = v[best];
    if z.norm() < 1e-300 {
        return v.to_vec();
    }
    let phase = z.conj() / z.norm();
    v.iter().map(|x| x * phase).collect()
}

pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[Complex64]) -> f64 {
    inner(v, v).re.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;

    fn random_hermitian(n: usize, seed: u64) -> CMat {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut m = CMat::zeros(n);
        for i in 0..n {
            m.set(i, i, Complex64::new(rng.gen::<f64>() * 2.0 - 1.0, 0.0));
            for j in i + 1..n {
                let z = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                m.set(i, j, z);
                m.set(j, i, z.conj());
            }
        }
        m
    }

    #[test]
    fn eigen_reconstructs_matrix() {
        for n in [2, 3, 5, 9, 16] {
            let h = random_hermitian(n, 7 + n as u64);
            let (evals, v) = h.hermitian_eigen().unwrap();
            assert!(v.is_unitary(1e-10), "eigenvectors not unitary for n={n}");
            // V Λ V† = H
            let lambda = CMat::from_fn(n, |i, j| {
                if i == j {
                    Complex64::new(evals[i], 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            let rebuilt = v.mul(&lambda).mul(&v.dagger());
            assert!(rebuilt.sub(&h).max_abs() < 1e-10, "n={n}");
            // Ascending order.
            for w in evals.windows(2) {
                assert!(w[0] <= w[1] + 1e-12);
            }
        }
    }

    #[test]
    fn eigen_of_diagonal_is_trivial() {
        let m = CMat::from_fn(3, |i, j| {
            if i == j {
                Complex64::new([3.0, 1.0, 2.0][i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let (evals, _) = m.hermitian_eigen().unwrap();
        assert_eq!(evals, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut m = CMat::zeros(2);
        m.set(0, 1, Complex64::new(1.0, 0.0));
        assert!(m.hermitian_eigen().is_err());
    }

    #[test]
    fn kron_shapes_and_values() {
        let a = CMat::from_fn(2, |i, j| Complex64::new((2 * i + j) as f64, 0.0));
        let b = CMat::identity(3);
        let k = a.kron(&b);
        assert_eq!(k.dim(), 6);
        assert_eq!(k.get(0, 3), a.get(0, 1));
        assert_eq!(k.get(4, 4), a.get(1, 1));
        assert_eq!(k.get(0, 1), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn phase_fix_makes_leading_entry_real() {
        let v = vec![Complex64::new(0.0, 0.7), Complex64::new(0.1, 0.0)];
        let w = phase_fix(&v);
        assert!(w[0].im.abs() < 1e-15);
        assert!(w[0].re > 0.0);
    }
}
