//! Orthonormal bases, mutually-unbiased certification, the Hilbert-Schmidt
//! operator family S_m^ξ, and the Latin operator basis built from tuples.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::nets::NetDesign;
use super::cmat::{inner, CMat};
#[cfg(test)]
use super::cmat::TOL;
use super::weyl::root_of_unity;

/// d orthonormal column vectors.
#[derive(Debug, Clone)]
pub struct Basis {
    d: usize,
    vectors: Vec<Vec<Complex64>>,
}

impl Basis {
    pub fn new(vectors: Vec<Vec<Complex64>>) -> Result<Basis> {
        let d = vectors.len();
        if d == 0 || vectors.iter().any(|v| v.len() != d) {
            return Err(Error::DimensionMismatch(
                "a basis needs d vectors of length d".into(),
            ));
        }
        Ok(Basis { d, vectors })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn vector(&self, j: usize) -> &[Complex64] {
        &self.vectors[j]
    }

    pub fn vectors(&self) -> &[Vec<Complex64>] {
        &self.vectors
    }

    /// Max deviation of the Gram matrix from the identity.
    pub fn gram_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.d {
            for j in 0..self.d {
                let g = inner(&self.vectors[i], &self.vectors[j]);
                let target = Complex64::new(f64::from(i == j), 0.0);
                worst = worst.max((g - target).norm());
            }
        }
        worst
    }

    /// The computational basis |0⟩..|d-1⟩.
    pub fn computational(d: usize) -> Basis {
        let vectors = (0..d)
            .map(|j| {
                (0..d)
                    .map(|i| Complex64::new(f64::from(i == j), 0.0))
                    .collect()
            })
            .collect();
        Basis { d, vectors }
    }

    /// Fourier basis |j̃⟩ with components η^{jκ}/√d; Z shifts the labels up.
    pub fn fourier(d: usize) -> Basis {
        let norm = 1.0 / (d as f64).sqrt();
        let vectors = (0..d)
            .map(|j| {
                (0..d)
                    .map(|k| root_of_unity(d, (j * k) as i64) * norm)
                    .collect()
            })
            .collect();
        Basis { d, vectors }
    }

    /// Projector |j⟩⟨j| onto the j-th vector.
    pub fn projector(&self, j: usize) -> CMat {
        let v = &self.vectors[j];
        CMat::from_fn(self.d, |r, c| v[r] * v[c].conj())
    }
}

/// Certification record for a candidate MUB family.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct MubCertification {
    pub max_overlap_deviation: f64,
    pub max_gram_deviation: f64,
    pub tolerance: f64,
    pub certified: bool,
}

/// Computes max | |⟨i|j⟩|² − 1/d | over inter-basis pairs and the max
/// intra-basis Gram deviation; certifies iff both are within `tol`.
pub fn verify_mub(bases: &[Basis], tol: f64) -> Result<MubCertification> {
    if bases.is_empty() {
        return Err(Error::InvalidArgument("no bases to verify".into()));
    }
    let d = bases[0].d();
    if bases.iter().any(|b| b.d() != d) {
        return Err(Error::DimensionMismatch("bases have different dimensions".into()));
    }

    let mut overlap_dev = 0.0f64;
    let target = 1.0 / d as f64;
    for a in 0..bases.len() {
        for b in a + 1..bases.len() {
            for i in 0..d {
                for j in 0..d {
                    let ov = inner(bases[a].vector(i), bases[b].vector(j)).norm_sqr();
                    overlap_dev = overlap_dev.max((ov - target).abs());
                }
            }
        }
    }
    let gram_dev = bases.iter().map(Basis::gram_deviation).fold(0.0, f64::max);
    Ok(MubCertification {
        max_overlap_deviation: overlap_dev,
        max_gram_deviation: gram_dev,
        tolerance: tol,
        certified: overlap_dev <= tol && gram_dev <= tol,
    })
}

/// A family of pairwise unbiased bases with its certification record.
#[derive(Debug, Clone)]
pub struct MubSet {
    d: usize,
    bases: Vec<Basis>,
    certification: MubCertification,
}

impl MubSet {
    /// Wraps and certifies; the record is stored even when certification
    /// fails, so callers can inspect the deviations.
    pub fn certify(bases: Vec<Basis>, tol: f64) -> Result<MubSet> {
        let certification = verify_mub(&bases, tol)?;
        Ok(MubSet { d: bases[0].d(), bases, certification })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn bases(&self) -> &[Basis] {
        &self.bases
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    pub fn certification(&self) -> MubCertification {
        self.certification
    }

    pub fn is_certified(&self) -> bool {
        self.certification.certified
    }

    /// A complete set has d+1 bases.
    pub fn is_complete(&self) -> bool {
        self.bases.len() == self.d + 1
    }
}

/// Tensor products of two certified families, paired in order:
/// min(|a|,|b|) bases in dimension d₁·d₂, re-certified.
pub fn mub_tensor_product(a: &MubSet, b: &MubSet, tol: f64) -> Result<MubSet> {
    if !a.is_certified() || !b.is_certified() {
        return Err(Error::Uncertified("tensor product factors".into()));
    }
    let n = a.len().min(b.len());
    let d = a.d() * b.d();
    let mut bases = Vec::with_capacity(n);
    for k in 0..n {
        let mut vectors = Vec::with_capacity(d);
        for va in a.bases()[k].vectors() {
            for vb in b.bases()[k].vectors() {
                let mut v = Vec::with_capacity(d);
                for x in va {
                    for y in vb {
                        v.push(x * y);
                    }
                }
                vectors.push(v);
            }
        }
        bases.push(Basis::new(vectors)?);
    }
    MubSet::certify(bases, tol)
}

/// S_m^ξ = Σ_j η_d^{jξ} |j⟩_m⟨j|. ξ = 0 gives the identity.
pub fn s_operator(basis: &Basis, xi: usize) -> CMat {
    let d = basis.d();
    let mut out = CMat::zeros(d);
    for j in 0..d {
        out.add_assign_scaled(&basis.projector(j), root_of_unity(d, (j * xi) as i64));
    }
    out
}

/// B_{n_0..n_d} = 𝟙 + Σ_{m=0}^{d} Σ_{ξ=1}^{d-1} η_d^{n_m ξ} S_m^ξ for a
/// complete certified family. Trace inner products obey
/// Tr(B†B') = d²(k−1) with k the number of index agreements.
pub fn latin_operator(mubs: &MubSet, tuple: &[u8]) -> Result<CMat> {
    let d = mubs.d();
    if !mubs.is_complete() {
        return Err(Error::IncompleteNet { rows: mubs.len(), expected: d + 1 });
    }
    if !mubs.is_certified() {
        return Err(Error::Uncertified("latin operator requires a certified family".into()));
    }
    if tuple.len() != d + 1 || tuple.iter().any(|&t| t as usize >= d) {
        return Err(Error::InvalidArgument(format!(
            "tuple must have {} entries in 0..{d}",
            d + 1
        )));
    }
    let mut out = CMat::identity(d);
    for (m, basis) in mubs.bases().iter().enumerate() {
        for xi in 1..d {
            let phase = root_of_unity(d, (tuple[m] as usize * xi) as i64);
            out.add_assign_scaled(&s_operator(basis, xi), phase);
        }
    }
    Ok(out)
}

/// Expected trace inner product d²(k−1) between the operators of two tuples.
pub fn latin_trace_law(d: usize, a: &[u8], b: &[u8]) -> f64 {
    let k = a.iter().zip(b).filter(|(x, y)| x == y).count();
    (d * d) as f64 * (k as f64 - 1.0)
}

/// One tuple per ontic label: component m is the column of row m holding
/// the label. The net property makes distinct tuples agree in exactly one
/// component, so the resulting operators are pairwise trace-orthogonal.
pub fn tuples_from_net(net: &NetDesign) -> Result<Vec<Vec<u8>>> {
    let d = net.d();
    if !net.is_complete() {
        return Err(Error::IncompleteNet { rows: net.rows().len(), expected: d + 1 });
    }
    let mut tuples = vec![vec![0u8; d + 1]; d * d];
    for (m, row) in net.rows().iter().enumerate() {
        for (col, cell) in row.cells.iter().enumerate() {
            for &label in cell {
                tuples[label][m] = col as u8;
            }
        }
    }
    Ok(tuples)
}
