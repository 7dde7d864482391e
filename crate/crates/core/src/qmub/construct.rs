//! Construction of complete MUB families: closed-form eigenbases for prime
//! dimensions, and joint diagonalization of the commuting Weyl classes read
//! off the net for prime powers.

use num_complex::Complex64;
use rand::prelude::*;

use crate::error::{Error, Result};
use crate::gfield::{default_basis_pair, Field, FieldBasisPair};
use crate::nets::{net_from_ols, NetDesign, RowTag};
use crate::squares::{generate_ols_prime, generate_ols_prime_power};
use crate::util;
use super::cmat::{phase_fix, CMat, TOL};
use super::weyl::{commute, root_of_unity, weyl_op, weyl_x, weyl_z, WeylIndex};
use super::basis::{Basis, MubSet};

/// Eigenvalue gap below which a cluster is treated as degenerate and
/// re-split with a second combination.
const DEGENERACY_GAP: f64 = 1e-7;

/// Max off-diagonal residual allowed when checking that a basis
/// diagonalizes every class member.
const DIAG_RESIDUAL: f64 = 1e-8;

/// Eigenbasis of X Z^a for prime d, labeled so that X^m Z^n sends vector j
/// to vector j + (n − a·m) and the prepare-act-measure experiment rebuilds
/// the net row. Components: v_j[κ] = η^(jκ − a·s_κ)/√d with
/// s_κ = κ + (κ+1) + ... + (d−1); consequently Z v_j = v_{j+1}.
/// For d = 2 the formula degenerates and the σ_y eigenbasis
/// ((1, i)/√2, (1, −i)/√2) is used directly.
pub fn eigenbasis_closed_form(d: usize, a: usize) -> Result<Basis> {
    if !util::is_prime(d) {
        return Err(Error::NotPrime(d));
    }
    if a == 0 || a >= d {
        return Err(Error::InvalidArgument(format!("a must lie in 1..{d}")));
    }
    if d == 2 {
        let s = 1.0 / 2f64.sqrt();
        return Basis::new(vec![
            vec![Complex64::new(s, 0.0), Complex64::new(0.0, s)],
            vec![Complex64::new(s, 0.0), Complex64::new(0.0, -s)],
        ]);
    }
    let norm = 1.0 / (d as f64).sqrt();
    let s_k: Vec<i64> = (0..d).map(|k| (k..d).sum::<usize>() as i64).collect();
    let vectors = (0..d)
        .map(|j| {
            (0..d)
                .map(|k| root_of_unity(d, (j * k) as i64 - a as i64 * s_k[k]) * norm)
                .collect()
        })
        .collect();
    Basis::new(vectors)
}

/// Simultaneous eigenbasis of d pairwise commuting operators.
///
/// A Hermitian combination H = Σ c_k (S_k + S_k†) + c'_k·i(S_k − S_k†) with
/// fixed seeded coefficients is diagonalized by Jacobi rotations; clusters
/// with eigenvalue gaps below 1e-7 are re-split by further combinations.
/// The result is verified: every conjugated class member must be diagonal
/// to within 1e-8.
pub fn joint_eigenbasis(class: &[CMat], tol: f64) -> Result<Basis> {
    if class.is_empty() {
        return Err(Error::InvalidArgument("empty operator class".into()));
    }
    let d = class[0].dim();
    let mut worst = 0.0f64;
    for (i, a) in class.iter().enumerate() {
        if a.dim() != d {
            return Err(Error::DimensionMismatch("class members differ in size".into()));
        }
        for b in class.iter().skip(i + 1) {
            worst = worst.max(a.mul(b).sub(&b.mul(a)).max_abs());
        }
    }
    if worst > tol.max(1e-9) {
        return Err(Error::NotCommuting { max_commutator: worst });
    }

    let mut vectors = CMat::identity(d);
    // Column ranges still degenerate under the combinations applied so far.
    let mut pending: Vec<(usize, usize)> = vec![(0, d)];

    for round in 0..4u64 {
        if pending.is_empty() {
            break;
        }
        let h = hermitian_combination(class, 0x6d75_626e_0000 + round);
        let mut next = Vec::new();
        for (lo, hi) in pending {
            // Compress H into the current subspace and diagonalize there.
            let cols: Vec<Vec<Complex64>> = (lo..hi).map(|c| vectors.column(c)).collect();
            let block = CMat::from_fn(hi - lo, |i, j| {
                let hv = h.apply(&cols[j]);
                super::cmat::inner(&cols[i], &hv)
            });
            let (evals, w) = block.hermitian_eigen()?;
            //

            // Rotate the stored columns by w.
            let mut rotated = vec![vec![Complex64::new(0.0, 0.0); d]; hi - lo];
            for (jc, rot) in rotated.iter_mut().enumerate() {
                for i in 0..d {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (kc, col) in cols.iter().enumerate() {
                        acc += col[i] * w.get(kc, jc);
                    }
                    rot[i] = acc;
                }
            }
            for (jc, rot) in rotated.iter().enumerate() {
                for i in 0..d {
                    vectors.set(i, lo + jc, rot[i]);
                }
            }
            // Record clusters that remain degenerate.
            let mut start = 0;
            for k in 1..=evals.len() {
                if k == evals.len() || evals[k] - evals[k - 1] > DEGENERACY_GAP {
                    if k - start > 1 {
                        next.push((lo + start, lo + k));
                    }
                    start = k;
                }
            }
        }
        pending = next;
    }
    if !pending.is_empty() {
        return Err(Error::Construction(
            "degenerate joint spectrum not resolved after re-splitting".into(),
        ));
    }

    let basis = Basis::new((0..d).map(|j| phase_fix(&vectors.column(j))).collect())?;

    for op in class {
        let mut residual = 0.0f64;
        for i in 0..d {
            let ovj = op.apply(basis.vector(i));
            for j in 0..d {
                if i != j {
                    residual = residual.max(super::cmat::inner(basis.vector(j), &ovj).norm());
                }
            }
        }
        if residual > DIAG_RESIDUAL {
            return Err(Error::Construction(format!(
                "joint eigenbasis leaves off-diagonal residual {residual:.3e}"
            )));
        }
    }
    Ok(basis)
}

fn hermitian_combination(class: &[CMat], seed: u64) -> CMat {
    let d = class[0].dim();
    let mut rng = StdRng::seed_from_u64(seed);
    let mut h = CMat::zeros(d);
    for op in class {
        let c = Complex64::new(rng.gen::<f64>() * 2.0 - 1.0, 0.0);
        let cp = Complex64::new(rng.gen::<f64>() * 2.0 - 1.0, 0.0);
        let dag = op.dagger();
        h.add_assign_scaled(&op.add(&dag), c);
        h.add_assign_scaled(&op.sub(&dag).scale(Complex64::new(0.0, 1.0)), cp);
    }
    h
}

/// Weyl indices of the b = 0 cell of every net row, decomposed through the
/// field basis pair. Each class is verified to satisfy the symplectic
/// commutation condition exhaustively.
pub fn commuting_classes_from_net(
    net: &NetDesign,
    pair: &FieldBasisPair,
) -> Result<Vec<Vec<WeylIndex>>> {
    let field = pair.field();
    let d = field.d();
    if net.d() != d {
        return Err(Error::DimensionMismatch(format!(
            "net order {} vs field order {d}",
            net.d()
        )));
    }
    let mut classes = Vec::with_capacity(net.rows().len());
    for row in net.rows() {
        let mut class = Vec::with_capacity(d);
        for &label in &row.cells[0] {
            let (m, n) = (label / d, label % d);
            let mv = pair.decompose_m(&field.element(m)?)?;
            let nv = pair.decompose_n(&field.element(n)?)?;
            class.push(WeylIndex::new(field.p(), mv, nv)?);
        }
        for i in 0..class.len() {
            for j in i + 1..class.len() {
                if !commute(&class[i], &class[j]) {
                    return Err(Error::Construction(format!(
                        "symplectic condition violated inside row {:?}",
                        row.tag
                    )));
                }
            }
        }
        classes.push(class);
    }
    Ok(classes)
}

fn digits_to_tensor_index(digits: &[u8], p: usize) -> usize {
    digits.iter().fold(0usize, |acc, &g| acc * p + g as usize)
}

/// Base column vectors for the three slope bases of d = 4, from the
/// standard quarter-phase table for two qubits.
///
/// Each slope basis is determined by its commuting class only up to a
/// relabeling of columns (the base column is a free quadratic-refinement
/// choice; translations generate the rest). The census count of
/// quantum-representable states is sensitive to that choice in even
/// characteristic, and these vectors pin it to the tabulated standard set,
/// which also reproduces the reference census ratio 8/455. Everything else
/// (orthonormality, unbiasedness, class diagonalization, cell purity, the
/// translation structure) holds for any choice.
fn gf4_slope_base(a: usize) -> Vec<Complex64> {
    let h = Complex64::new(0.5, 0.0);
    let i = Complex64::i();
    let one = Complex64::new(1.0, 0.0);
    let row: [Complex64; 4] = match a {
        1 => [one, -one, i, i],
        2 => [one, i, -one, i],
        3 => [one, -i, -i, -one],
        _ => unreachable!("slope parameter must be 1..=3"),
    };
    row.iter().map(|z| z * h).collect()
}

/// Complete MUB family for a prime power, aligned with the rows of the
/// given net: row M ↔ computational basis, row N ↔ factor-wise Fourier
/// basis, slope rows ↔ joint eigenbases of their commuting classes with
/// columns labeled by the Z-type translation operators so that cell b of
/// the row matches vector b of the basis.
pub fn mubs_from_net(net: &NetDesign, pair: &FieldBasisPair, tol: f64) -> Result<MubSet> {
    let field = pair.field();
    let d = field.d();
    let p = field.p();
    let classes = commuting_classes_from_net(net, pair)?;

    let mut bases = Vec::with_capacity(classes.len());
    for (row, class) in net.rows().iter().zip(&classes) {
        let basis = match row.tag {
            RowTag::M => {
                // Column m is the computational vector at the tensor index
                // of m's coordinates.
                let mut vectors = vec![vec![Complex64::new(0.0, 0.0); d]; d];
                for (m, v) in vectors.iter_mut().enumerate() {
                    let digits = pair.decompose_m(&field.element(m)?)?;
                    v[digits_to_tensor_index(&digits, p)] = Complex64::new(1.0, 0.0);
                }
                Basis::new(vectors)?
            }
            RowTag::N => {
                // Column n is the tensor of single-factor Fourier vectors
                // picked by n's dual coordinates.
                let fp = Basis::fourier(p);
                let mut vectors = Vec::with_capacity(d);
                for n in 0..d {
                    let digits = pair.decompose_n(&field.element(n)?)?;
                    let mut v = vec![Complex64::new(1.0, 0.0)];
                    for &g in &digits {
                        let f = fp.vector(g as usize);
                        let mut next = Vec::with_capacity(v.len() * p);
                        for x in &v {
                            for y in f {
                                next.push(x * y);
                            }
                        }
                        v = next;
                    }
                    vectors.push(v);
                }
                Basis::new(vectors)?
            }
            RowTag::Slope(slope) => {
                let ops: Vec<CMat> = class.iter().map(weyl_op).collect();
                let v0 = if d == 4 {
                    gf4_slope_base(slope)
                } else {
                    joint_eigenbasis(&ops, tol)?.vector(0).to_vec()
                };
                // Translation labeling: v_b ∝ S_(0,b) v_0; the Z-type
                // operators are diagonal, so this is an exact phase map.
                let mut vectors = Vec::with_capacity(d);
                for b in 0..d {
                    if b == 0 {
                        vectors.push(v0.clone());
                        continue;
                    }
                    let nv = pair.decompose_n(&field.element(b)?)?;
                    let mv = vec![0u8; field.r()];
                    let u = weyl_op(&WeylIndex::new(p, mv, nv)?);
                    vectors.push(phase_fix(&u.apply(&v0)));
                }
                let basis = Basis::new(vectors)?;
                if basis.gram_deviation() > tol {
                    return Err(Error::Construction(
                        "translation labeling broke orthonormality".into(),
                    ));
                }
                // Every column must diagonalize the whole class.
                for op in &ops {
                    for j in 0..d {
                        let w = op.apply(basis.vector(j));
                        let lambda = super::cmat::inner(basis.vector(j), &w);
                        let residual: f64 = (0..d)
                            .map(|t| (w[t] - lambda * basis.vector(j)[t]).norm())
                            .fold(0.0, f64::max);
                        if residual > 1e-8 {
                            return Err(Error::Construction(format!(
                                "slope basis fails to diagonalize its class: residual {residual:.3e}"
                            )));
                        }
                    }
                }
                basis
            }
        };
        bases.push(basis);
    }
    MubSet::certify(bases, tol)
}

/// d+1 bases for a prime-power dimension: the closed-form route for primes
/// (computational, Fourier, and the X Z^a eigenbases), the net route with
/// joint diagonalization otherwise.
pub fn mubs_for(d: usize) -> Result<MubSet> {
    mubs_for_tol(d, TOL)
}

pub fn mubs_for_tol(d: usize, tol: f64) -> Result<MubSet> {
    if d < 2 {
        return Err(Error::InvalidArgument("dimension must be at least 2".into()));
    }
    if util::is_prime(d) {
        let mut bases = vec![Basis::computational(d), Basis::fourier(d)];
        for a in 1..d {
            bases.push(eigenbasis_closed_form(d, a)?);
        }
        return MubSet::certify(bases, tol);
    }
    match util::prime_power(d) {
        Some(_) => {
            let field = Field::for_order(d)?;
            let pair = default_basis_pair(&field)?;
            let net = net_from_ols(&generate_ols_prime_power(&field)?)?;
            mubs_from_net(&net, &pair, tol)
        }
        None => Err(Error::NotPrimePower(d)),
    }
}

/// The net a census aligns with: prime fields use the modular family so the
/// closed-form bases match, prime powers the field family.
pub fn aligned_net(d: usize) -> Result<NetDesign> {
    if util::is_prime(d) {
        net_from_ols(&generate_ols_prime(d)?)
    } else {
        let field = Field::for_order(d)?;
        net_from_ols(&generate_ols_prime_power(&field)?)
    }
}

/// Three unbiased bases available in every dimension: the eigenbases of Z,
/// X, and XZ (the latter via joint diagonalization of its powers).
pub fn weyl_triple(d: usize, tol: f64) -> Result<MubSet> {
    if d < 2 {
        return Err(Error::InvalidArgument("dimension must be at least 2".into()));
    }
    let xz = weyl_x(d).mul(&weyl_z(d));
    let mut ops = Vec::with_capacity(d);
    let mut acc = CMat::identity(d);
    for _ in 0..d {
        ops.push(acc.clone());
        acc = acc.mul(&xz);
    }
    let xz_basis = joint_eigenbasis(&ops, tol)?;
    MubSet::certify(vec![Basis::computational(d), Basis::fourier(d), xz_basis], tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use super::super::basis::verify_mub;
    use super::super::cmat::inner;

    #[test]
    fn closed_form_is_orthonormal_eigenbasis() {
        for d in [2usize, 3, 5, 7] {
            for a in 1..d {
                let basis = eigenbasis_closed_form(d, a).unwrap();
                assert!(basis.gram_deviation() < TOL, "d={d} a={a}");
                let op = {
                    let mut z = CMat::identity(d);
                    let zd = weyl_z(d);
                    for _ in 0..a {
                        z = z.mul(&zd);
                    }
                    weyl_x(d).mul(&z)
                };
                for j in 0..d {
                    let w = op.apply(basis.vector(j));
                    // Eigenvector with unimodular eigenvalue.
                    let lambda = inner(basis.vector(j), &w);
                    assert!((lambda.norm() - 1.0).abs() < 1e-9, "d={d} a={a} j={j}");
                    let residual: f64 = (0..d)
                        .map(|i| (w[i] - lambda * basis.vector(j)[i]).norm())
                        .fold(0.0, f64::max);
                    assert!(residual < 1e-9, "d={d} a={a} j={j} residual={residual}");
                }
            }
        }
    }

    #[test]
    fn closed_form_d2_is_sigma_y_eigenbasis() {
        let basis = eigenbasis_closed_form(2, 1).unwrap();
        // σ_y = [[0, -i], [i, 0]]; eigenvectors (1, ±i)/√2.
        let sy = CMat::from_fn(2, |i, j| match (i, j) {
            (0, 1) => Complex64::new(0.0, -1.0),
            (1, 0) => Complex64::new(0.0, 1.0),
            _ => Complex64::new(0.0, 0.0),
        });
        for (j, sign) in [(0usize, 1.0f64), (1, -1.0)] {
            let w = sy.apply(basis.vector(j));
            for i in 0..2 {
                assert!((w[i] - basis.vector(j)[i] * sign).norm() < TOL);
            }
        }
    }

    #[test]
    fn z_shifts_closed_form_labels_up() {
        for d in [3usize, 5] {
            let z = weyl_z(d);
            for a in 1..d {
                let basis = eigenbasis_closed_form(d, a).unwrap();
                for j in 0..d {
                    let w = z.apply(basis.vector(j));
                    let ov = inner(basis.vector((j + 1) % d), &w);
                    assert!((ov.norm() - 1.0).abs() < 1e-9, "d={d} a={a} j={j}");
                }
            }
        }
    }

    #[test]
    fn gram_identity_for_random_prime() {
        let basis = eigenbasis_closed_form(5, 3).unwrap();
        assert!(basis.gram_deviation() < TOL);
    }

    #[test]
    fn complete_families_certify() {
        for d in [2, 3, 4, 5, 7, 8, 9] {
            let mubs = mubs_for(d).unwrap();
            assert_eq!(mubs.len(), d + 1, "d={d}");
            assert!(mubs.is_certified(), "d={d}: {:?}", mubs.certification());
            assert!(mubs.certification().max_overlap_deviation < TOL);
        }
    }

    #[test]
    fn not_prime_power_rejected() {
        assert!(matches!(mubs_for(6), Err(Error::NotPrimePower(6))));
        assert!(matches!(mubs_for(10), Err(Error::NotPrimePower(10))));
    }

    #[test]
    fn joint_eigenbasis_of_z_powers_is_computational() {
        let d = 4;
        let z = weyl_z(d);
        let mut ops = Vec::new();
        let mut acc = CMat::identity(d);
        for _ in 0..d {
            ops.push(acc.clone());
            acc = acc.mul(&z);
        }
        let basis = joint_eigenbasis(&ops, TOL).unwrap();
        // Each vector must be a computational vector up to phase/order.
        for j in 0..d {
            let v = basis.vector(j);
            let big: Vec<usize> = (0..d).filter(|&i| v[i].norm() > 0.5).collect();
            assert_eq!(big.len(), 1);
            assert!((v[big[0]].norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn non_commuting_input_rejected() {
        let ops = vec![weyl_x(3), weyl_z(3)];
        assert!(matches!(
            joint_eigenbasis(&ops, TOL),
            Err(Error::NotCommuting { .. })
        ));
    }

    #[test]
    fn joint_route_matches_closed_form_for_primes() {
        // Overlap matrix between the two routes must be a permutation of
        // unimodular entries.
        for d in [3usize, 5] {
            let field = Field::new(d, 1).unwrap();
            let pair = default_basis_pair(&field).unwrap();
            let net = aligned_net(d).unwrap();
            let joint = mubs_from_net(&net, &pair, TOL).unwrap();
            let closed = mubs_for(d).unwrap();
            assert!(joint.is_certified());
            for (jb, cb) in joint.bases().iter().zip(closed.bases()) {
                let mut perm = vec![usize::MAX; d];
                for i in 0..d {
                    let mut hits = 0;
                    for j in 0..d {
                        let ov = inner(jb.vector(i), cb.vector(j)).norm();
                        if ov > 1.0 - 1e-8 {
                            perm[i] = j;
                            hits += 1;
                        } else {
                            assert!(ov < 1e-6, "d={d}: overlap {ov} neither 0 nor 1");
                        }
                    }
                    assert_eq!(hits, 1, "d={d} vector {i}");
                }
                perm.sort_unstable();
                assert_eq!(perm, (0..d).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn d4_class_bases_unbiased_to_computational() {
        let mubs = mubs_for(4).unwrap();
        let comp = Basis::computational(4);
        for basis in mubs.bases().iter().skip(2) {
            let cert = verify_mub(&[comp.clone(), basis.clone()], TOL).unwrap();
            assert!(cert.certified);
        }
    }

    #[test]
    fn d4_slope_one_matches_tensor_table_class() {
        // Class of the first slope row decomposes to the expected digit
        // pairs under the (ω, 1) basis.
        let field = Field::for_order(4).unwrap();
        let pair = default_basis_pair(&field).unwrap();
        let net = aligned_net(4).unwrap();
        let classes = commuting_classes_from_net(&net, &pair).unwrap();
        // Row M class: labels 0..3 = pairs (0, n): pure Z-type.
        for idx in &classes[0] {
            assert!(idx.m_digits().iter().all(|&g| g == 0));
        }
        // Row N class: labels {0,4,8,12} = pairs (m, 0): pure X-type.
        for idx in &classes[1] {
            assert!(idx.n_digits().iter().all(|&g| g == 0));
        }
        for class in &classes {
            assert_eq!(class.len(), 4);
        }
        // Different classes must contain non-commuting pairs.
        let mut found_noncommuting = false;
        for a in &classes[2] {
            for b in &classes[3] {
                if !commute(a, b) {
                    found_noncommuting = true;
                }
            }
        }
        assert!(found_noncommuting);
    }

    #[test]
    fn prime_classes_match_slope_structure() {
        // d=3 slope-1 class is {(0,0),(1,1),(2,2)}.
        let field = Field::new(3, 1).unwrap();
        let pair = default_basis_pair(&field).unwrap();
        let net = aligned_net(3).unwrap();
        let classes = commuting_classes_from_net(&net, &pair).unwrap();
        let got: Vec<(u8, u8)> = classes[2]
            .iter()
            .map(|idx| (idx.m_digits()[0], idx.n_digits()[0]))
            .collect();
        assert_eq!(got, vec![(0, 0), (1, 1), (2, 2)]);
    }

    #[test]
    fn weyl_triples_certify_in_general_dimension() {
        for d in [4, 6] {
            let triple = weyl_triple(d, TOL).unwrap();
            assert_eq!(triple.len(), 3);
            assert!(triple.is_certified(), "d={d}: {:?}", triple.certification());
        }
    }

    #[test]
    fn slope_translation_labeling_is_consistent() {
        // For every slope row of the d=4 net and every (m,n) in cell b',
        // the operator maps vector c to vector c ⊕ b' up to phase.
        let field = Field::for_order(4).unwrap();
        let pair = default_basis_pair(&field).unwrap();
        let net = aligned_net(4).unwrap();
        let mubs = mubs_from_net(&net, &pair, TOL).unwrap();
        for (ri, row) in net.rows().iter().enumerate() {
            if !matches!(row.tag, RowTag::Slope(_)) {
                continue;
            }
            let basis = &mubs.bases()[ri];
            for (bp, cell) in row.cells.iter().enumerate() {
                for &label in cell {
                    let (m, n) = (label / 4, label % 4);
                    let mv = pair.decompose_m(&field.element(m).unwrap()).unwrap();
                    let nv = pair.decompose_n(&field.element(n).unwrap()).unwrap();
                    let u = weyl_op(&WeylIndex::new(2, mv, nv).unwrap());
                    for c in 0..4 {
                        let target = field.add_idx(c, bp);
                        let w = u.apply(basis.vector(c));
                        let ov = inner(basis.vector(target), &w).norm();
                        assert!(
                            (ov - 1.0).abs() < 1e-9,
                            "row {ri} cell {bp} label {label} c={c}: {ov}"
                        );
                    }
                }
            }
        }
    }
}
