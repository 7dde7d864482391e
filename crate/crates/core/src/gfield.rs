//! Exact arithmetic in the finite field GF(p^r).
//!
//! Elements are indexed 0..d-1 by base-p positional encoding of their
//! polynomial coordinates (constant term least significant), so GF(4) is
//! {0, 1, ω, ω+1} ↔ {0, 1, 2, 3} with ω a root of the reduction polynomial.
//! The module provides the field trace, basis selection and the unique dual
//! basis, which the prime-power square and basis constructions consume.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::util;

/// Parameters pinning down a concrete finite field GF(p^r).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSpec {
    p: usize,
    r: usize,
    d: usize,
    /// Monic reduction polynomial, constant term first, length r+1.
    /// For r = 1 this is `x` by convention (reduction is plain mod p).
    irreducible: Vec<u8>,
}

impl FieldSpec {
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn irreducible(&self) -> &[u8] {
        &self.irreducible
    }
}

struct FieldInner {
    spec: FieldSpec,
    add: Vec<u16>,
    mul: Vec<u16>,
    trace: Vec<u8>,
}

/// A concrete finite field with precomputed operation tables.
///
/// Cheap to clone; all state is immutable and shared.
#[derive(Clone)]
pub struct Field {
    inner: Arc<FieldInner>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field(GF({}^{}))", self.p(), self.r())
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.inner.spec == other.inner.spec
    }
}

impl Field {
    /// Field with the default reduction polynomial: the lexicographically
    /// smallest monic irreducible, coefficients compared low-degree-first.
    /// This picks x²+x+1 for GF(4) and x²+1 for GF(9).
    pub fn new(p: usize, r: usize) -> Result<Field> {
        if !util::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if r < 1 {
            return Err(Error::InvalidArgument("extension degree must be >= 1".into()));
        }
        let irreducible = if r == 1 {
            vec![0, 1]
        } else {
            smallest_irreducible(p, r).ok_or_else(|| Error::InvalidIrreducible {
                p,
                reason: format!("no irreducible of degree {r} found"),
            })?
        };
        Self::build(p, r, irreducible)
    }

    /// Field for order `d = p^r`, default polynomial.
    pub fn for_order(d: usize) -> Result<Field> {
        let (p, r) = util::prime_power(d).ok_or(Error::NotPrimePower(d))?;
        Field::new(p, r as usize)
    }

    /// Field with an explicit monic reduction polynomial (constant term
    /// first, length r+1). The polynomial is verified irreducible by trial
    /// division by all monic polynomials of degree ≤ r/2.
    pub fn with_irreducible(p: usize, r: usize, poly: &[u8]) -> Result<Field> {
        if !util::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if r < 2 {
            return Err(Error::InvalidArgument(
                "explicit polynomials only apply to extension degree >= 2".into(),
            ));
        }
        if poly.len() != r + 1 {
            return Err(Error::InvalidIrreducible {
                p,
                reason: format!("expected {} coefficients, got {}", r + 1, poly.len()),
            });
        }
        if poly[r] != 1 {
            return Err(Error::InvalidIrreducible {
                p,
                reason: "polynomial must be monic".into(),
            });
        }
        if poly.iter().any(|&c| c as usize >= p) {
            return Err(Error::InvalidIrreducible {
                p,
                reason: "coefficients must lie in 0..p".into(),
            });
        }
        if !is_irreducible(p, poly) {
            return Err(Error::InvalidIrreducible {
                p,
                reason: "polynomial is reducible".into(),
            });
        }
        Self::build(p, r, poly.to_vec())
    }

    fn build(p: usize, r: usize, irreducible: Vec<u8>) -> Result<Field> {
        let d = p
            .checked_pow(r as u32)
            .filter(|&d| d <= u16::MAX as usize)
            .ok_or(Error::Overflow("field order"))?;
        let spec = FieldSpec { p, r, d, irreducible };

        let mut add = vec![0u16; d * d];
        let mut mul = vec![0u16; d * d];
        for a in 0..d {
            let ca = index_to_coeffs(a, p, r);
            for b in 0..d {
                let cb = index_to_coeffs(b, p, r);
                let sum: Vec<u8> = ca
                    .iter()
                    .zip(&cb)
                    .map(|(&x, &y)| ((x as usize + y as usize) % p) as u8)
                    .collect();
                add[a * d + b] = coeffs_to_index(&sum, p) as u16;
                let prod = poly_mul_mod(p, &ca, &cb, &spec.irreducible);
                mul[a * d + b] = coeffs_to_index(&prod, p) as u16;
            }
        }

        let mut inner = FieldInner {
            spec,
            add,
            mul,
            trace: Vec::new(),
        };

        // tr(a) = a + a^p + ... + a^(p^(r-1)), by repeated Frobenius.
        let mut trace = vec![0u8; d];
        for a in 0..d {
            let mut acc = a;
            let mut frob = a;
            for _ in 1..r {
                frob = pow_idx(&inner, frob, p as u64);
                acc = inner.add[acc * d + frob] as usize;
            }
            debug_assert!(acc < p, "trace must land in the prime field");
            trace[a] = acc as u8;
        }
        inner.trace = trace;

        Ok(Field { inner: Arc::new(inner) })
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.inner.spec
    }

    pub fn p(&self) -> usize {
        self.inner.spec.p
    }

    pub fn r(&self) -> usize {
        self.inner.spec.r
    }

    pub fn d(&self) -> usize {
        self.inner.spec.d
    }

    pub fn element(&self, index: usize) -> Result<FieldElement> {
        if index >= self.d() {
            return Err(Error::InvalidArgument(format!(
                "element index {index} out of range for GF({})",
                self.d()
            )));
        }
        Ok(FieldElement { field: self.clone(), index })
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { field: self.clone(), index: 0 }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement { field: self.clone(), index: 1 }
    }

    /// Index-level addition; both operands must be valid element indices.
    #[inline]
    pub fn add_idx(&self, a: usize, b: usize) -> usize {
        self.inner.add[a * self.d() + b] as usize
    }

    /// Index-level multiplication.
    #[inline]
    pub fn mul_idx(&self, a: usize, b: usize) -> usize {
        self.inner.mul[a * self.d() + b] as usize
    }

    /// Field trace as a prime-field value 0..p.
    #[inline]
    pub fn trace_idx(&self, a: usize) -> u8 {
        self.inner.trace[a]
    }

    pub fn neg_idx(&self, a: usize) -> usize {
        // The additive inverse, found through the table row.
        let d = self.d();
        (0..d).find(|&b| self.add_idx(a, b) == 0).expect("additive inverse exists")
    }

    /// Multiplicative inverse of a nonzero element.
    pub fn inv_idx(&self, a: usize) -> Option<usize> {
        if a == 0 {
            return None;
        }
        (1..self.d()).find(|&b| self.mul_idx(a, b) == 1)
    }

    fn pow_idx(&self, base: usize, exp: u64) -> usize {
        pow_idx(&self.inner, base, exp)
    }

    /// Polynomial coordinates of element `index`, constant term first.
    pub fn coeffs(&self, index: usize) -> Vec<u8> {
        index_to_coeffs(index, self.p(), self.r())
    }
}

fn pow_idx(inner: &FieldInner, base: usize, mut exp: u64) -> usize {
    let d = inner.spec.d;
    let mut result = 1usize;
    let mut b = base;
    while exp > 0 {
        if exp & 1 == 1 {
            result = inner.mul[result * d + b] as usize;
        }
        b = inner.mul[b * d + b] as usize;
        exp >>= 1;
    }
    result
}

/// An element of a specific field, indexed 0..d-1.
#[derive(Clone, Debug)]
pub struct FieldElement {
    field: Field,
    index: usize,
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.index == other.index
    }
}

impl Eq for FieldElement {}

impl FieldElement {
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> Vec<u8> {
        self.field.coeffs(self.index)
    }

    fn check_same(&self, other: &FieldElement) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check_same(other)?;
        Ok(FieldElement {
            field: self.field.clone(),
            index: self.field.add_idx(self.index, other.index),
        })
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check_same(other)?;
        Ok(FieldElement {
            field: self.field.clone(),
            index: self.field.mul_idx(self.index, other.index),
        })
    }

    /// tr(a) as an integer 0..p.
    pub fn trace(&self) -> u8 {
        self.field.trace_idx(self.index)
    }

    pub fn pow(&self, exp: u64) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            index: self.field.pow_idx(self.index, exp),
        }
    }
}

fn index_to_coeffs(index: usize, p: usize, r: usize) -> Vec<u8> {
    let mut c = vec![0u8; r];
    let mut k = index;
    for digit in c.iter_mut() {
        *digit = (k % p) as u8;
        k /= p;
    }
    c
}

fn coeffs_to_index(coeffs: &[u8], p: usize) -> usize {
    coeffs.iter().rev().fold(0usize, |acc, &c| acc * p + c as usize)
}

/// Product of two coefficient vectors reduced modulo the monic `irr`.
fn poly_mul_mod(p: usize, a: &[u8], b: &[u8], irr: &[u8]) -> Vec<u8> {
    let r = irr.len() - 1;
    let mut prod = vec![0usize; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] += x as usize * y as usize;
        }
    }
    // Reduce x^k = -(irr minus leading term) * x^(k-r) repeatedly.
    for k in (r..prod.len()).rev() {
        let c = prod[k] % p;
        prod[k] = 0;
        if c == 0 {
            continue;
        }
        for (t, &ic) in irr.iter().take(r).enumerate() {
            // x^k ≡ -Σ irr[t] x^(k-r+t)
            let sub = c * ic as usize % p;
            let pos = k - r + t;
            prod[pos] = (prod[pos] + p - sub) % p;
        }
    }
    prod.iter().take(r).map(|&c| (c % p) as u8).collect()
}

/// Remainder of `a` modulo monic `m` over F_p; coefficient vectors constant-first.
fn poly_rem(p: usize, a: &[u8], m: &[u8]) -> Vec<u8> {
    let dm = m.len() - 1;
    let mut rem: Vec<usize> = a.iter().map(|&c| c as usize).collect();
    while rem.len() > dm {
        let k = rem.len() - 1;
        let c = rem[k] % p;
        if c != 0 {
            for (t, &mc) in m.iter().enumerate().take(dm) {
                let pos = k - dm + t;
                rem[pos] = (rem[pos] + p - c * mc as usize % p) % p;
            }
        }
        rem.pop();
    }
    while rem.len() > 1 && *rem.last().unwrap() % p == 0 {
        rem.pop();
    }
    rem.iter().map(|&c| (c % p) as u8).collect()
}

/// Trial division by every monic polynomial of degree 1..=deg/2.
fn is_irreducible(p: usize, poly: &[u8]) -> bool {
    let deg = poly.len() - 1;
    for div_deg in 1..=deg / 2 {
        let count = p.pow(div_deg as u32);
        for k in 0..count {
            let mut div = index_to_coeffs(k, p, div_deg);
            div.push(1); // monic
            let rem = poly_rem(p, poly, &div);
            if rem.iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Lexicographically smallest monic irreducible of degree r over F_p,
/// coefficients compared low-degree-first.
fn smallest_irreducible(p: usize, r: usize) -> Option<Vec<u8>> {
    let count = p.pow(r as u32);
    for k in 0..count {
        // Low-degree coefficients dominate the comparison, so enumerate with
        // the constant term as the most significant counter digit.
        let mut coeffs = vec![0u8; r];
        let mut v = k;
        for i in (0..r).rev() {
            coeffs[r - 1 - i] = (v / p.pow(i as u32) % p) as u8;
            v %= p.pow(i as u32);
        }
        let _ = v;
        let mut poly = coeffs;
        poly.push(1);
        if is_irreducible(p, &poly) {
            return Some(poly);
        }
    }
    None
}

/// A field basis together with its unique dual: tr(e_i ⊙ ē_j) = δ_ij.
#[derive(Clone, Debug)]
pub struct FieldBasisPair {
    field: Field,
    basis: Vec<FieldElement>,
    dual: Vec<FieldElement>,
}

impl FieldBasisPair {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn basis(&self) -> &[FieldElement] {
        &self.basis
    }

    pub fn dual(&self) -> &[FieldElement] {
        &self.dual
    }

    /// Coordinates of `m` in the basis: m_i = tr(m ⊙ ē_i).
    pub fn decompose_m(&self, m: &FieldElement) -> Result<Vec<u8>> {
        if m.field() != &self.field {
            return Err(Error::FieldMismatch);
        }
        Ok(self
            .dual
            .iter()
            .map(|e| self.field.trace_idx(self.field.mul_idx(m.index(), e.index())))
            .collect())
    }

    /// Coordinates of `n` in the dual basis: n_i = tr(n ⊙ e_i).
    pub fn decompose_n(&self, n: &FieldElement) -> Result<Vec<u8>> {
        if n.field() != &self.field {
            return Err(Error::FieldMismatch);
        }
        Ok(self
            .basis
            .iter()
            .map(|e| self.field.trace_idx(self.field.mul_idx(n.index(), e.index())))
            .collect())
    }

    /// Rebuild m from coordinates: Σ m_i ⊙ e_i.
    pub fn compose_m(&self, digits: &[u8]) -> FieldElement {
        self.compose(digits, &self.basis)
    }

    /// Rebuild n from dual coordinates: Σ n_i ⊙ ē_i.
    pub fn compose_n(&self, digits: &[u8]) -> FieldElement {
        self.compose(digits, &self.dual)
    }

    fn compose(&self, digits: &[u8], family: &[FieldElement]) -> FieldElement {
        let mut acc = 0usize;
        for (&g, e) in digits.iter().zip(family) {
            // Prime-field scalar g acts as the embedded element with index g.
            let term = self.field.mul_idx(g as usize, e.index());
            acc = self.field.add_idx(acc, term);
        }
        FieldElement { field: self.field.clone(), index: acc }
    }
}

/// Computes the unique dual of a linearly independent basis by solving the
/// r×r linear system tr(e_i ⊙ ē_j) = δ_ij over F_p for each dual vector.
pub fn dual_basis(field: &Field, basis: &[FieldElement]) -> Result<FieldBasisPair> {
    let r = field.r();
    let p = field.p();
    if basis.len() != r {
        return Err(Error::InvalidArgument(format!(
            "basis must have {r} elements, got {}",
            basis.len()
        )));
    }
    for e in basis {
        if e.field() != field {
            return Err(Error::FieldMismatch);
        }
    }

    // M[i][k] = tr(e_i ⊙ x^k); dual vector j has polynomial coordinates
    // solving M c = δ_j. M is singular exactly when the basis is dependent.
    let mut m = vec![vec![0u8; r]; r];
    for (i, e) in basis.iter().enumerate() {
        for k in 0..r {
            let xk = field.coeffs_to_element_index(k);
            m[i][k] = field.trace_idx(field.mul_idx(e.index(), xk));
        }
    }
    let inv = invert_mod_p(p, &m).ok_or(Error::DegenerateBasis)?;

    let mut dual = Vec::with_capacity(r);
    for j in 0..r {
        let coeffs: Vec<u8> = (0..r).map(|k| inv[k][j]).collect();
        let index = coeffs_to_index(&coeffs, p);
        dual.push(FieldElement { field: field.clone(), index });
    }

    // Re-verify the defining property directly.
    for (i, e) in basis.iter().enumerate() {
        for (j, f) in dual.iter().enumerate() {
            let t = field.trace_idx(field.mul_idx(e.index(), f.index()));
            let expect = u8::from(i == j);
            if t != expect {
                return Err(Error::Construction(format!(
                    "dual basis failed tr(e_{i} ⊙ ē_{j}) = δ: got {t}"
                )));
            }
        }
    }

    Ok(FieldBasisPair {
        field: field.clone(),
        basis: basis.to_vec(),
        dual,
    })
}

impl Field {
    /// Index of the monomial x^k as a field element.
    fn coeffs_to_element_index(&self, k: usize) -> usize {
        self.p().pow(k as u32)
    }
}

/// Default basis: (ω, 1) for GF(4) — reproducing the worked d=4 tables —
/// and the polynomial basis (1, x, ..., x^(r-1)) elsewhere.
pub fn default_basis_pair(field: &Field) -> Result<FieldBasisPair> {
    let basis: Vec<FieldElement> = if field.d() == 4 {
        vec![field.element(2)?, field.element(1)?]
    } else {
        (0..field.r())
            .map(|k| field.element(field.p().pow(k as u32)))
            .collect::<Result<_>>()?
    };
    dual_basis(field, &basis)
}

/// Gauss-Jordan inversion over F_p. Returns None for singular matrices.
fn invert_mod_p(p: usize, m: &[Vec<u8>]) -> Option<Vec<Vec<u8>>> {
    let n = m.len();
    let mut a: Vec<Vec<usize>> = m.iter().map(|row| row.iter().map(|&c| c as usize).collect()).collect();
    let mut inv: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).map(|j| usize::from(i == j)).collect())
        .collect();

    for col in 0..n {
        let pivot = (col..n).find(|&row| a[row][col] % p != 0)?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let pinv = mod_inverse(a[col][col] % p, p);
        for j in 0..n {
            a[col][j] = a[col][j] * pinv % p;
            inv[col][j] = inv[col][j] * pinv % p;
        }
        for row in 0..n {
            if row == col || a[row][col] % p == 0 {
                continue;
            }
            let f = a[row][col] % p;
            for j in 0..n {
                a[row][j] = (a[row][j] + p * p - f * a[col][j] % p) % p;
                inv[row][j] = (inv[row][j] + p * p - f * inv[col][j] % p) % p;
            }
        }
    }
    Some(inv.into_iter().map(|row| row.into_iter().map(|c| c as u8).collect()).collect())
}

fn mod_inverse(a: usize, p: usize) -> usize {
    // Fermat: a^(p-2) mod p.
    let mut result = 1usize;
    let mut base = a % p;
    let mut exp = p - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(d: usize) -> Field {
        Field::for_order(d).unwrap()
    }

    #[test]
    fn gf4_uses_the_only_quadratic() {
        let f = gf(4);
        assert_eq!(f.spec().irreducible(), &[1, 1, 1]); // x²+x+1
    }

    #[test]
    fn gf9_default_polynomial() {
        let f = gf(9);
        assert_eq!(f.spec().irreducible(), &[1, 0, 1]); // x²+1
    }

    #[test]
    fn gf4_addition_and_multiplication() {
        let f = gf(4);
        // ω ⊕ 1 = ω+1
        assert_eq!(f.add_idx(2, 1), 3);
        // ω ⊙ ω = ω+1 (since ω² = ω+1)
        assert_eq!(f.mul_idx(2, 2), 3);
        // ω ⊙ (ω+1) = 1
        assert_eq!(f.mul_idx(2, 3), 1);
    }

    #[test]
    fn gf9_addition_example() {
        // (x+1) ⊕ (2x+2) = 0 with coefficients mod 3.
        let f = gf(9);
        let a = coeffs_to_index(&[1, 1], 3);
        let b = coeffs_to_index(&[2, 2], 3);
        assert_eq!(f.add_idx(a, b), 0);
    }

    #[test]
    fn additive_and_multiplicative_identities() {
        for d in [4, 8, 9, 25, 27] {
            let f = gf(d);
            for a in 0..d {
                assert_eq!(f.add_idx(a, 0), a);
                assert_eq!(f.mul_idx(a, 1), a);
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive() {
        for d in [4, 8, 9] {
            let f = gf(d);
            for a in 0..d {
                for b in 0..d {
                    assert_eq!(f.add_idx(a, b), f.add_idx(b, a));
                    assert_eq!(f.mul_idx(a, b), f.mul_idx(b, a));
                    for c in 0..d {
                        assert_eq!(f.add_idx(f.add_idx(a, b), c), f.add_idx(a, f.add_idx(b, c)));
                        assert_eq!(f.mul_idx(f.mul_idx(a, b), c), f.mul_idx(a, f.mul_idx(b, c)));
                        assert_eq!(
                            f.mul_idx(a, f.add_idx(b, c)),
                            f.add_idx(f.mul_idx(a, b), f.mul_idx(a, c))
                        );
                    }
                }
                // Inverses exist for nonzero elements.
                if a != 0 {
                    assert!(f.inv_idx(a).is_some(), "no inverse for {a} in GF({d})");
                }
                let neg = f.neg_idx(a);
                assert_eq!(f.add_idx(a, neg), 0);
            }
        }
    }

    #[test]
    fn trace_values() {
        let f = gf(4);
        assert_eq!(f.trace_idx(0), 0);
        // tr(ω) = ω + ω² = ω + ω + 1 = 1
        assert_eq!(f.trace_idx(2), 1);

        // Prime field: trace is the identity.
        let f5 = Field::new(5, 1).unwrap();
        for a in 0..5 {
            assert_eq!(f5.trace_idx(a), a as u8);
        }
    }

    #[test]
    fn trace_is_linear_and_scales() {
        for d in [4, 8, 9] {
            let f = gf(d);
            let p = f.p();
            for x in 0..d {
                for y in 0..d {
                    let lhs = f.trace_idx(f.add_idx(x, y));
                    let rhs = ((f.trace_idx(x) as usize + f.trace_idx(y) as usize) % p) as u8;
                    assert_eq!(lhs, rhs);
                }
                for a in 0..p {
                    let lhs = f.trace_idx(f.mul_idx(a, x));
                    let rhs = ((a * f.trace_idx(x) as usize) % p) as u8;
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn gf4_dual_of_omega_one() {
        let f = gf(4);
        let basis = vec![f.element(2).unwrap(), f.element(1).unwrap()];
        let pair = dual_basis(&f, &basis).unwrap();
        let dual: Vec<usize> = pair.dual().iter().map(|e| e.index()).collect();
        assert_eq!(dual, vec![1, 3]); // (1, ω+1)
    }

    #[test]
    fn prime_field_dual_is_identity() {
        let f = Field::new(7, 1).unwrap();
        let pair = dual_basis(&f, &[f.one()]).unwrap();
        assert_eq!(pair.dual()[0].index(), 1);
    }

    #[test]
    fn gf8_dual_with_explicit_polynomial() {
        // x³+x+1, polynomial basis (1, x, x²); verify tr(e_i ⊙ ē_j) = δ_ij.
        let f = Field::with_irreducible(2, 3, &[1, 1, 0, 1]).unwrap();
        let basis: Vec<FieldElement> =
            [1, 2, 4].iter().map(|&i| f.element(i).unwrap()).collect();
        let pair = dual_basis(&f, &basis).unwrap();
        for (i, e) in pair.basis().iter().enumerate() {
            for (j, g) in pair.dual().iter().enumerate() {
                let t = e.mul(g).unwrap().trace();
                assert_eq!(t, u8::from(i == j));
            }
        }
    }

    #[test]
    fn dependent_basis_rejected() {
        let f = gf(4);
        let basis = vec![f.element(2).unwrap(), f.element(2).unwrap()];
        assert!(matches!(dual_basis(&f, &basis), Err(Error::DegenerateBasis)));
    }

    #[test]
    fn paper_decomposition_tables_for_gf4() {
        let f = gf(4);
        let pair = default_basis_pair(&f).unwrap();
        let m_rows: Vec<Vec<u8>> = (0..4)
            .map(|m| pair.decompose_m(&f.element(m).unwrap()).unwrap())
            .collect();
        assert_eq!(m_rows, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        let n_rows: Vec<Vec<u8>> = (0..4)
            .map(|n| pair.decompose_n(&f.element(n).unwrap()).unwrap())
            .collect();
        assert_eq!(n_rows, vec![vec![0, 0], vec![1, 0], vec![1, 1], vec![0, 1]]);
    }

    #[test]
    fn decompose_compose_round_trip() {
        for d in [4, 8, 9] {
            let f = gf(d);
            let pair = default_basis_pair(&f).unwrap();
            for k in 0..d {
                let e = f.element(k).unwrap();
                let m = pair.decompose_m(&e).unwrap();
                assert_eq!(pair.compose_m(&m).index(), k);
                let n = pair.decompose_n(&e).unwrap();
                assert_eq!(pair.compose_n(&n).index(), k);
            }
        }
    }

    #[test]
    fn trace_bilinear_identity() {
        // tr(m ⊙ n) = m⃗ · n⃗ mod p for all pairs.
        for d in [4, 8, 9] {
            let f = gf(d);
            let p = f.p();
            let pair = default_basis_pair(&f).unwrap();
            for m in 0..d {
                for n in 0..d {
                    let lhs = f.trace_idx(f.mul_idx(m, n)) as usize;
                    let em = pair.decompose_m(&f.element(m).unwrap()).unwrap();
                    let en = pair.decompose_n(&f.element(n).unwrap()).unwrap();
                    let rhs = em
                        .iter()
                        .zip(&en)
                        .map(|(&x, &y)| x as usize * y as usize)
                        .sum::<usize>()
                        % p;
                    assert_eq!(lhs, rhs, "d={d} m={m} n={n}");
                }
            }
        }
    }

    #[test]
    fn mismatched_fields_error() {
        let f4 = gf(4);
        let f9 = gf(9);
        let a = f4.element(1).unwrap();
        let b = f9.element(1).unwrap();
        assert!(matches!(a.add(&b), Err(Error::FieldMismatch)));
        assert!(matches!(a.mul(&b), Err(Error::FieldMismatch)));
    }

    #[test]
    fn rejects_reducible_polynomial() {
        // x²+1 = (x+1)² over F_2.
        assert!(Field::with_irreducible(2, 2, &[1, 0, 1]).is_err());
    }
}
