//! The end-to-end verification matrix: every reference value the library is
//! expected to reproduce, runnable as one report. The reference tables and
//! counts are frozen here and used both by the `reproduce` subcommand and by
//! the acceptance test suite.

use std::time::Instant;

use rand::prelude::*;

use crate::error::Result;
use crate::gfield::{default_basis_pair, dual_basis, Field};
use crate::hvm::{
    census, classify_quantum, reconstruct_operator, CensusConfig, EpistemicState, QuantumClass,
};
use crate::nets::{verify_net, NetDesign, RowTag};
use crate::qmub::{
    aligned_net, latin_operator, latin_trace_law, mub_tensor_product, mubs_for, tuples_from_net,
    verify_shifting, weyl_triple, MubSet, TOL,
};
use crate::squares::{
    are_orthogonal, find_orthogonal_mate, is_latin, LatinSquare, MateBudget, MateOutcome, Square,
};

/// Reference net of order 2 (three rows).
pub const NET_D2: [[[usize; 2]; 2]; 3] = [
    [[0, 1], [2, 3]],
    [[0, 2], [1, 3]],
    [[0, 3], [1, 2]],
];

/// Reference net of order 3 (four rows).
pub const NET_D3: [[[usize; 3]; 3]; 4] = [
    [[0, 1, 2], [3, 4, 5], [6, 7, 8]],
    [[0, 3, 6], [1, 4, 7], [2, 5, 8]],
    [[0, 4, 8], [1, 5, 6], [2, 3, 7]],
    [[0, 5, 7], [1, 3, 8], [2, 4, 6]],
];

/// Reference net of order 4 (five rows).
pub const NET_D4: [[[usize; 4]; 4]; 5] = [
    [[0, 1, 2, 3], [4, 5, 6, 7], [8, 9, 10, 11], [12, 13, 14, 15]],
    [[0, 4, 8, 12], [1, 5, 9, 13], [2, 6, 10, 14], [3, 7, 11, 15]],
    [[0, 5, 10, 15], [1, 4, 11, 14], [2, 7, 8, 13], [3, 6, 9, 12]],
    [[0, 6, 11, 13], [1, 7, 10, 12], [2, 4, 9, 15], [3, 5, 8, 14]],
    [[0, 7, 9, 14], [1, 6, 8, 15], [2, 5, 11, 12], [3, 4, 10, 13]],
];

/// The three-row order-4 net that admits no further rows.
pub const NET_D4_INCOMPLETE: [[[usize; 4]; 4]; 3] = [
    [[0, 1, 2, 3], [4, 5, 6, 7], [8, 9, 10, 11], [12, 13, 14, 15]],
    [[0, 4, 8, 12], [1, 5, 9, 13], [2, 6, 10, 14], [3, 7, 11, 15]],
    [[0, 5, 10, 15], [1, 6, 11, 12], [2, 7, 8, 13], [3, 4, 9, 14]],
];

/// Reference census counts: (d, total, quantum).
pub const CENSUS_COUNTS: [(usize, u64, u64); 4] =
    [(2, 6, 6), (3, 84, 12), (4, 1820, 32), (5, 53130, 30)];

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub key: String,
    pub pass: bool,
    pub detail: String,
    pub elapsed_ms: u128,
}

fn run_check(
    out: &mut Vec<CheckOutcome>,
    filter: Option<&str>,
    key: &str,
    f: impl FnOnce() -> Result<(bool, String)>,
) {
    if let Some(pat) = filter {
        if !key.contains(pat) {
            return;
        }
    }
    let start = Instant::now();
    let (pass, detail) = match f() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    out.push(CheckOutcome {
        key: key.to_string(),
        pass,
        detail,
        elapsed_ms: start.elapsed().as_millis(),
    });
}

fn build_net(d: usize) -> Result<NetDesign> {
    aligned_net(d)
}

fn net_equals(net: &NetDesign, reference: &[Vec<Vec<usize>>]) -> bool {
    net.cells() == reference
}

fn ref_to_vec<const D: usize, const R: usize>(t: &[[[usize; D]; D]; R]) -> Vec<Vec<Vec<usize>>> {
    t.iter()
        .map(|row| row.iter().map(|cell| cell.to_vec()).collect())
        .collect()
}

fn incomplete_net() -> Result<NetDesign> {
    NetDesign::from_rows(
        4,
        vec![
            (RowTag::M, NET_D4_INCOMPLETE[0].iter().map(|c| c.to_vec()).collect()),
            (RowTag::N, NET_D4_INCOMPLETE[1].iter().map(|c| c.to_vec()).collect()),
            (RowTag::Slope(1), NET_D4_INCOMPLETE[2].iter().map(|c| c.to_vec()).collect()),
        ],
    )
}

/// Runs every check, optionally restricted to keys containing `filter`.
pub fn run_all(filter: Option<&str>) -> Vec<CheckOutcome> {
    let mut out = Vec::new();

    // 1. Net reproduction against the reference tables.
    run_check(&mut out, filter, "net-d2", || {
        Ok((net_equals(&build_net(2)?, &ref_to_vec(&NET_D2)), "cells equal reference".into()))
    });
    run_check(&mut out, filter, "net-d3", || {
        Ok((net_equals(&build_net(3)?, &ref_to_vec(&NET_D3)), "cells equal reference".into()))
    });
    run_check(&mut out, filter, "net-d4", || {
        Ok((net_equals(&build_net(4)?, &ref_to_vec(&NET_D4)), "cells equal reference".into()))
    });

    // 2. MUB counts and certification quality.
    for d in [2usize, 3, 4, 5, 7, 8, 9] {
        run_check(&mut out, filter, &format!("mubs-d{d}"), || {
            let mubs = mubs_for(d)?;
            let cert = mubs.certification();
            let pass = mubs.len() == d + 1
                && cert.max_overlap_deviation < 1e-10
                && cert.max_gram_deviation < 1e-10;
            Ok((
                pass,
                format!(
                    "{} bases, overlap dev {:.2e}, gram dev {:.2e}",
                    mubs.len(),
                    cert.max_overlap_deviation,
                    cert.max_gram_deviation
                ),
            ))
        });
    }

    // 3. Census exact counts.
    for &(d, total, quantum) in &CENSUS_COUNTS {
        run_check(&mut out, filter, &format!("census-d{d}"), || {
            let mubs = mubs_for(d)?;
            let net = build_net(d)?;
            let res = census(&mubs, &net, &CensusConfig::default())?;
            let pass = res.total == total && res.quantum == quantum;
            Ok((
                pass,
                format!("E={} Q={} ratio={} ({} ms)", res.total, res.quantum, res.ratio_string(), res.elapsed_ms),
            ))
        });
    }

    // 4. Net-cell purity: every cell reconstructs to its projector.
    for d in [2usize, 3, 4, 5] {
        run_check(&mut out, filter, &format!("cell-purity-d{d}"), || {
            let mubs = mubs_for(d)?;
            let net = build_net(d)?;
            let mut worst = 0.0f64;
            for m in 0..=d {
                for j in 0..d {
                    let e = EpistemicState::from_cell(&net, m, j)?;
                    let rec = reconstruct_operator(&e, &mubs, &net)?;
                    let dev = rec.op.sub(&mubs.bases()[m].projector(j)).max_abs();
                    worst = worst.max(dev);
                    if classify_quantum(&rec, 1e-8)?.class != QuantumClass::PureQuantum {
                        return Ok((false, format!("cell ({m},{j}) not pure")));
                    }
                }
            }
            Ok((worst < 1e-9, format!("max projector deviation {worst:.2e}")))
        });
    }

    // 5. Latin operator trace law on random tuples and net tuples.
    for d in [2usize, 3, 4, 5] {
        run_check(&mut out, filter, &format!("latin-operator-d{d}"), || {
            let mubs = mubs_for(d)?;
            let mut rng = StdRng::seed_from_u64(0x1a71);
            let mut worst = 0.0f64;
            for _ in 0..1000 {
                let a: Vec<u8> = (0..=d).map(|_| rng.gen_range(0..d) as u8).collect();
                let b: Vec<u8> = (0..=d).map(|_| rng.gen_range(0..d) as u8).collect();
                let ba = latin_operator(&mubs, &a)?;
                let bb = latin_operator(&mubs, &b)?;
                let got = ba.frobenius_inner(&bb);
                let expect = latin_trace_law(d, &a, &b);
                worst = worst.max((got.re - expect).abs().max(got.im.abs()));
            }
            let tol = 1e-8 * (d * d * d) as f64;
            if worst >= tol {
                return Ok((false, format!("trace law deviation {worst:.2e} ≥ {tol:.2e}")));
            }

            let net = build_net(d)?;
            let tuples = tuples_from_net(&net)?;
            let ops: Vec<_> = tuples
                .iter()
                .map(|t| latin_operator(&mubs, t))
                .collect::<Result<Vec<_>>>()?;
            let mut worst_orth = 0.0f64;
            for i in 0..ops.len() {
                for j in i + 1..ops.len() {
                    worst_orth = worst_orth.max(ops[i].frobenius_inner(&ops[j]).norm());
                }
            }
            let tol_orth = 1e-8 * (d * d) as f64;
            Ok((
                worst_orth < tol_orth,
                format!("law dev {worst:.2e}, net-tuple orthogonality dev {worst_orth:.2e}"),
            ))
        });
    }

    // 6. Shifting property and table reconstruction for primes.
    for d in [2usize, 3, 5, 7] {
        run_check(&mut out, filter, &format!("shifting-d{d}"), || {
            let net = build_net(d)?;
            let mubs = mubs_for(d)?;
            let report = verify_shifting(&net, &mubs, d)?;
            Ok((
                report.max_deviation < 1e-10 && report.reconstruction_matches,
                format!(
                    "max deviation {:.2e}, reconstruction {}",
                    report.max_deviation,
                    if report.reconstruction_matches { "matches" } else { "differs" }
                ),
            ))
        });
    }

    // 7. MacNeish tensor pipeline for d = 6 and d = 12.
    run_check(&mut out, filter, "macneish-d6", || {
        let prod = mub_tensor_product(&mubs_for(2)?, &mubs_for(3)?, TOL)?;
        let cert = prod.certification();
        Ok((
            prod.len() == 3 && cert.certified && cert.max_overlap_deviation < 1e-10,
            format!("{} bases, overlap dev {:.2e}", prod.len(), cert.max_overlap_deviation),
        ))
    });
    run_check(&mut out, filter, "macneish-d12", || {
        let prod = mub_tensor_product(&mubs_for(4)?, &mubs_for(3)?, TOL)?;
        let cert = prod.certification();
        Ok((
            prod.len() == 4 && cert.certified && cert.max_overlap_deviation < 1e-10,
            format!("{} bases, overlap dev {:.2e}", prod.len(), cert.max_overlap_deviation),
        ))
    });

    // 8. Orthogonal-mate search: the Z6 table has no mate, the cyclic
    // order-3 square has one.
    run_check(&mut out, filter, "mate-z6", || {
        let z6 = LatinSquare::new(Square::from_fn(6, |i, j| (i + j) % 6)?)?;
        match find_orthogonal_mate(&z6, &MateBudget::default())? {
            MateOutcome::NoMate { transversals, .. } => {
                Ok((transversals == 0, format!("NoMate with {transversals} transversals")))
            }
            MateOutcome::Mate { .. } => Ok((false, "unexpected mate".into())),
        }
    });
    run_check(&mut out, filter, "mate-cyclic3", || {
        let c3 = LatinSquare::new(Square::from_fn(3, |i, j| (i + j) % 3)?)?;
        match find_orthogonal_mate(&c3, &MateBudget::default())? {
            MateOutcome::Mate { mate, .. } => {
                let ok = is_latin(mate.as_square())
                    && are_orthogonal(c3.as_square(), mate.as_square())?;
                Ok((ok, "mate found and certified".into()))
            }
            MateOutcome::NoMate { .. } => Ok((false, "no mate found".into())),
        }
    });

    // 9. Field layer: axioms, the reference dual basis, and the bilinear
    // trace identity.
    for d in [4usize, 8, 9] {
        run_check(&mut out, filter, &format!("field-gf{d}"), || {
            let f = Field::for_order(d)?;
            let p = f.p();
            for a in 0..d {
                for b in 0..d {
                    if f.add_idx(a, b) != f.add_idx(b, a) || f.mul_idx(a, b) != f.mul_idx(b, a) {
                        return Ok((false, format!("commutativity fails at ({a},{b})")));
                    }
                    for c in 0..d {
                        if f.add_idx(f.add_idx(a, b), c) != f.add_idx(a, f.add_idx(b, c))
                            || f.mul_idx(f.mul_idx(a, b), c) != f.mul_idx(a, f.mul_idx(b, c))
                            || f.mul_idx(a, f.add_idx(b, c))
                                != f.add_idx(f.mul_idx(a, b), f.mul_idx(a, c))
                        {
                            return Ok((false, format!("axiom fails at ({a},{b},{c})")));
                        }
                    }
                }
                if a != 0 && f.inv_idx(a).is_none() {
                    return Ok((false, format!("no inverse for {a}")));
                }
            }
            let pair = default_basis_pair(&f)?;
            for m in 0..d {
                for n in 0..d {
                    let lhs = f.trace_idx(f.mul_idx(m, n)) as usize;
                    let em = pair.decompose_m(&f.element(m)?)?;
                    let en = pair.decompose_n(&f.element(n)?)?;
                    let rhs = em
                        .iter()
                        .zip(&en)
                        .map(|(&x, &y)| x as usize * y as usize)
                        .sum::<usize>()
                        % p;
                    if lhs != rhs {
                        return Ok((false, format!("bilinear identity fails at ({m},{n})")));
                    }
                }
            }
            Ok((true, "axioms, dual basis, bilinear identity".into()))
        });
    }
    run_check(&mut out, filter, "field-gf4-dual", || {
        let f = Field::for_order(4)?;
        let pair = dual_basis(&f, &[f.element(2)?, f.element(1)?])?;
        let dual: Vec<usize> = pair.dual().iter().map(|e| e.index()).collect();
        Ok((dual == vec![1, 3], format!("dual of (ω,1) = {dual:?}")))
    });

    // 10. The incomplete order-4 net and its three bases.
    run_check(&mut out, filter, "incomplete-net", || {
        let net = incomplete_net()?;
        let check = verify_net(&net);
        if !check.ok || !check.forms_agree {
            return Ok((false, format!("net property violated: {:?}", check.violation)));
        }
        let triple = weyl_triple(4, TOL)?;
        let cert = triple.certification();
        Ok((
            triple.len() == 3 && cert.certified,
            format!(
                "3-row net verified; triple overlap dev {:.2e}",
                cert.max_overlap_deviation
            ),
        ))
    });

    out
}

/// True iff every outcome passed.
pub fn all_pass(outcomes: &[CheckOutcome]) -> bool {
    !outcomes.is_empty() && outcomes.iter().all(|c| c.pass)
}

/// Builds the d+1-basis family for prime-power d (re-export used by the
/// census path in the CLI).
pub fn census_inputs(d: usize) -> Result<(MubSet, NetDesign)> {
    Ok((mubs_for(d)?, build_net(d)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filtered_run_selects_subset() {
        let outcomes = run_all(Some("net-d2"));
        assert_eq!(outcomes.len(), 1);
        assert_eq!(outcomes[0].key, "net-d2");
        assert!(outcomes[0].pass);
    }

    #[test]
    fn fault_injection_is_caught() {
        // A corrupted reference table must fail the comparison.
        let net = build_net(3).unwrap();
        let mut broken = ref_to_vec(&NET_D3);
        broken[2][0].swap(0, 1);
        broken[2][0].sort_unstable();
        // Sorting restores it; corrupt across cells instead.
        let tmp = broken[3][0][1];
        broken[3][0][1] = broken[3][1][1];
        broken[3][1][1] = tmp;
        broken[3][0].sort_unstable();
        broken[3][1].sort_unstable();
        assert!(!net_equals(&net, &broken));
    }
}
