//! Weyl–Schwinger operators: the cyclic shift X and phase Z in dimension d,
//! their monomials X^m Z^n, and the tensor-product form indexed by
//! coordinate vectors over F_p for prime-power dimensions.

use num_complex::Complex64;

use crate::error::{Error, Result};
use super::cmat::CMat;

/// exp(i 2π k / d), with k reduced mod d.
pub fn root_of_unity(d: usize, k: i64) -> Complex64 {
    let k = k.rem_euclid(d as i64);
    Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / d as f64)
}

/// Z|κ⟩ = η_d^κ |κ⟩.
pub fn weyl_z(d: usize) -> CMat {
    CMat::from_fn(d, |i, j| {
        if i == j {
            root_of_unity(d, i as i64)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// X|κ⟩ = |κ+1 mod d⟩.
pub fn weyl_x(d: usize) -> CMat {
    CMat::from_fn(d, |i, j| {
        if i == (j + 1) % d {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Index of a Weyl operator: digit vectors (m₁..m_r, n₁..n_r) over F_p.
/// For prime d the vectors have length 1 and the operator is X^m Z^n;
/// otherwise it is the tensor product ⊗_i X_p^{m_i} Z_p^{n_i} with the
/// first digit on the most significant factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeylIndex {
    p: usize,
    m: Vec<u8>,
    n: Vec<u8>,
}

impl WeylIndex {
    pub fn new(p: usize, m: Vec<u8>, n: Vec<u8>) -> Result<WeylIndex> {
        if m.len() != n.len() || m.is_empty() {
            return Err(Error::InvalidArgument(
                "digit vectors must be nonempty and of equal length".into(),
            ));
        }
        if m.iter().chain(&n).any(|&x| x as usize >= p) {
            return Err(Error::InvalidArgument(format!("digits must lie in 0..{p}")));
        }
        Ok(WeylIndex { p, m, n })
    }

    /// Prime-dimension index (m, n) with 0 ≤ m, n < d.
    pub fn prime(d: usize, m: usize, n: usize) -> Result<WeylIndex> {
        WeylIndex::new(d, vec![(m % d) as u8], vec![(n % d) as u8])
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn m_digits(&self) -> &[u8] {
        &self.m
    }

    pub fn n_digits(&self) -> &[u8] {
        &self.n
    }

    pub fn dim(&self) -> usize {
        self.p.pow(self.m.len() as u32)
    }
}

/// The operator named by the index.
pub fn weyl_op(idx: &WeylIndex) -> CMat {
    let p = idx.p();
    let x = weyl_x(p);
    let z = weyl_z(p);
    let mut out: Option<CMat> = None;
    for (&mi, &ni) in idx.m_digits().iter().zip(idx.n_digits()) {
        let mut factor = CMat::identity(p);
        for _ in 0..mi {
            factor = x.mul(&factor);
        }
        for _ in 0..ni {
            factor = factor.mul(&z);
        }
        out = Some(match out {
            None => factor,
            Some(acc) => acc.kron(&factor),
        });
    }
    out.expect("nonempty digit vectors")
}

/// Symplectic commutation test: S and S' commute iff
/// m⃗·n⃗' − m⃗'·n⃗ ≡ 0 mod p.
pub fn commute(a: &WeylIndex, b: &WeylIndex) -> bool {
    let p = a.p() as i64;
    let dot = |x: &[u8], y: &[u8]| -> i64 {
        x.iter().zip(y).map(|(&u, &v)| u as i64 * v as i64).sum()
    };
    (dot(a.m_digits(), b.n_digits()) - dot(b.m_digits(), a.n_digits())).rem_euclid(p) == 0
}
