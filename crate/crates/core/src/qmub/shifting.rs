//! Verification that the Weyl unitaries shift the basis states in
//! accordance with the net: U_mn |j⟩_a ∝ |j + F_a(m,n)⟩_a, plus the
//! prepare-act-measure experiment that rebuilds the table.

use crate::error::{Error, Result};
use crate::nets::{column_function, NetDesign};
use crate::util;
use super::basis::MubSet;
use super::cmat::inner;
use super::weyl::{weyl_op, WeylIndex};

#[derive(Debug, Clone)]
pub struct ShiftReport {
    /// Max over (m, n, a, j) of | |⟨j+F_a(m,n)| U_mn |j⟩_a| − 1 |.
    pub max_deviation: f64,
    /// Whether writing each pair mn into the measured column rebuilt every
    /// net row exactly.
    pub reconstruction_matches: bool,
    /// The rebuilt table, for diagnostics.
    pub reconstructed: Vec<Vec<Vec<usize>>>,
}

/// Runs the magnitude check and the reconstruction experiment for prime d,
/// with U_mn = X^m Z^n and F_a from the net's column functions.
pub fn verify_shifting(net: &NetDesign, mubs: &MubSet, d: usize) -> Result<ShiftReport> {
    if !util::is_prime(d) {
        return Err(Error::NotPrime(d));
    }
    if net.d() != d || mubs.d() != d {
        return Err(Error::DimensionMismatch("net, bases and d must agree".into()));
    }
    if net.rows().len() != mubs.len() {
        return Err(Error::DimensionMismatch(
            "one basis per net row is required".into(),
        ));
    }

    let ops: Vec<Vec<_>> = (0..d)
        .map(|m| {
            (0..d)
                .map(|n| weyl_op(&WeylIndex::prime(d, m, n).expect("valid index")))
                .collect()
        })
        .collect();

    let mut max_dev = 0.0f64;
    let mut reconstructed = Vec::with_capacity(net.rows().len());
    let mut matches = true;

    for (a, row) in net.rows().iter().enumerate() {
        let f = column_function(net, a);
        let basis = &mubs.bases()[a];

        for m in 0..d {
            for n in 0..d {
                let shift = f.eval(m, n);
                for j in 0..d {
                    let w = ops[m][n].apply(basis.vector(j));
                    let ov = inner(basis.vector((j + shift) % d), &w).norm();
                    max_dev = max_dev.max((ov - 1.0).abs());
                }
            }
        }

        // Prepare |0⟩_a, act with U_mn, measure in the same basis, and put
        // the pair mn into the column of the observed outcome.
        let mut cells: Vec<Vec<usize>> = vec![Vec::new(); d];
        for m in 0..d {
            for n in 0..d {
                let w = ops[m][n].apply(basis.vector(0));
                let mut outcome = 0usize;
                let mut best = -1.0f64;
                for j in 0..d {
                    let p = inner(basis.vector(j), &w).norm_sqr();
                    if p > best {
                        best = p;
                        outcome = j;
                    }
                }
                cells[outcome].push(m * d + n);
            }
        }
        for cell in cells.iter_mut() {
            cell.sort_unstable();
        }
        if cells != row.cells {
            matches = false;
        }
        reconstructed.push(cells);
    }

    Ok(ShiftReport {
        max_deviation: max_dev,
        reconstruction_matches: matches,
        reconstructed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use super::super::construct::{aligned_net, mubs_for};

    #[test]
    fn shifting_holds_for_primes() {
        for d in [2, 3, 5, 7] {
            let net = aligned_net(d).unwrap();
            let mubs = mubs_for(d).unwrap();
            let report = verify_shifting(&net, &mubs, d).unwrap();
            assert!(report.max_deviation < 1e-10, "d={d}: {}", report.max_deviation);
            assert!(report.reconstruction_matches, "d={d}");
        }
    }

    #[test]
    fn coordinate_rows_shift_by_m_and_n() {
        let d = 3;
        let net = aligned_net(d).unwrap();
        let f_m = column_function(&net, 0);
        let f_n = column_function(&net, 1);
        for m in 0..d {
            for n in 0..d {
                assert_eq!(f_m.eval(m, n), m);
                assert_eq!(f_n.eval(m, n), n);
            }
        }
    }

    #[test]
    fn non_prime_is_rejected() {
        let net = aligned_net(4).unwrap();
        let mubs = mubs_for(4).unwrap();
        assert!(matches!(
            verify_shifting(&net, &mubs, 4),
            Err(Error::NotPrime(4))
        ));
    }
}
