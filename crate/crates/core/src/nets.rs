//! Net designs built from augmented OLS families.
//!
//! A net of order d has up to d+1 rows; each row partitions the d² ontic
//! labels into d cells of d labels, and two labels that share a cell never
//! share a cell anywhere else. Labels encode pairs: label = m·d + n.

use crate::error::{Error, Result};
use crate::squares::{is_standard, AugmentedOls};
use crate::util;

/// Provenance of a net row.
///
/// `M` is the row whose cells group labels by their m digit (it answers
/// "m = b?" and comes from the coordinate square A_ij = j); `N` groups by
/// the n digit ("n = b?", from A_ij = i); `Slope(a)` comes from the Latin
/// square with parameter a ("n = a·m + b?").
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowTag {
    M,
    N,
    Slope(usize),
}

#[derive(Debug, Clone)]
pub struct NetRow {
    pub tag: RowTag,
    /// d cells of d sorted labels each.
    pub cells: Vec<Vec<usize>>,
}

/// The combinatorial backbone linking squares to bases.
#[derive(Debug, Clone)]
pub struct NetDesign {
    d: usize,
    rows: Vec<NetRow>,
}

impl NetDesign {
    /// Builds a net from explicit rows, validating that each row partitions
    /// {0, ..., d²-1} into d cells of d labels. Cells are sorted.
    pub fn from_rows(d: usize, rows: Vec<(RowTag, Vec<Vec<usize>>)>) -> Result<NetDesign> {
        if rows.len() > d + 1 {
            return Err(Error::InvalidArgument(format!(
                "a net of order {d} admits at most {} rows",
                d + 1
            )));
        }
        let mut out = Vec::with_capacity(rows.len());
        for (tag, cells) in rows {
            let mut sorted_cells: Vec<Vec<usize>> = cells;
            if sorted_cells.len() != d || sorted_cells.iter().any(|c| c.len() != d) {
                return Err(Error::InvalidArgument(format!(
                    "each row must have {d} cells of {d} labels"
                )));
            }
            let mut seen = vec![false; d * d];
            for cell in &mut sorted_cells {
                cell.sort_unstable();
                for &l in cell.iter() {
                    if l >= d * d || seen[l] {
                        return Err(Error::InvalidArgument(format!(
                            "row is not a partition: label {l}"
                        )));
                    }
                    seen[l] = true;
                }
            }
            out.push(NetRow { tag, cells: sorted_cells });
        }
        Ok(NetDesign { d, rows: out })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn rows(&self) -> &[NetRow] {
        &self.rows
    }

    pub fn is_complete(&self) -> bool {
        self.rows.len() == self.d + 1
    }

    /// Cell labels as plain integer arrays, row-major.
    pub fn cells(&self) -> Vec<Vec<Vec<usize>>> {
        self.rows.iter().map(|r| r.cells.clone()).collect()
    }
}

/// The five-step construction: squares in standard form are augmented with
/// the coordinate squares; each square's rows become the cells of one table
/// row; the coordinate row is relabeled A'_ij = i·d + j and every other row
/// through it, B'_ij = j·d + B_ij.
pub fn net_from_ols(family: &AugmentedOls) -> Result<NetDesign> {
    family.verify()?;
    if !is_standard(family.latin()) {
        return Err(Error::NotStandardForm);
    }
    let d = family.order();

    let mut rows = Vec::with_capacity(family.latin().squares().len() + 2);

    // Coordinate row from A_ij = j: cell i holds {i·d + j}.
    let coord = (0..d)
        .map(|i| (0..d).map(|j| i * d + j).collect())
        .collect();
    rows.push((RowTag::M, coord));

    // A_ij = i relabeled through the coordinate row: cell i holds {j·d + i}.
    let row_sq = family.row_square();
    let second = (0..d)
        .map(|i| (0..d).map(|j| j * d + row_sq.get(i, j) as usize).collect())
        .collect();
    rows.push((RowTag::N, second));

    for (k, sq) in family.latin().squares().iter().enumerate() {
        let cells = (0..d)
            .map(|i| (0..d).map(|j| j * d + sq.get(i, j) as usize).collect())
            .collect();
        rows.push((RowTag::Slope(k + 1), cells));
    }

    let net = NetDesign::from_rows(d, rows)?;
    let check = verify_net(&net);
    if !check.ok {
        return Err(Error::Construction(format!(
            "constructed table violates the net property: {:?}",
            check.violation
        )));
    }
    Ok(net)
}

/// A witness for a violated net property.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetViolation {
    pub row_a: usize,
    pub cell_a: usize,
    pub row_b: usize,
    pub cell_b: usize,
    pub pair: (usize, usize),
}

#[derive(Debug, Clone)]
pub struct NetCheck {
    pub ok: bool,
    pub violation: Option<NetViolation>,
    /// The pair-repetition form and the one-common-label form must agree.
    pub forms_agree: bool,
}

/// Checks the defining property both ways: no label pair occurs in two cells
/// (scanned row-major, first violation reported), and any two cells of
/// different rows share exactly one label.
pub fn verify_net(net: &NetDesign) -> NetCheck {
    let d = net.d();
    let mut first_seen: Vec<Option<(usize, usize)>> = vec![None; d * d * d * d];
    let mut violation = None;

    'scan: for (ri, row) in net.rows().iter().enumerate() {
        for (ci, cell) in row.cells.iter().enumerate() {
            for x in 0..cell.len() {
                for y in x + 1..cell.len() {
                    let (a, b) = (cell[x], cell[y]);
                    let key = a * d * d + b;
                    match first_seen[key] {
                        None => first_seen[key] = Some((ri, ci)),
                        Some((pr, pc)) => {
                            violation = Some(NetViolation {
                                row_a: pr,
                                cell_a: pc,
                                row_b: ri,
                                cell_b: ci,
                                pair: (a, b),
                            });
                            break 'scan;
                        }
                    }
                }
            }
        }
    }
    let pair_form_ok = violation.is_none();

    // Second form: cells of different rows share exactly one label.
    let mut intersect_ok = true;
    'outer: for i in 0..net.rows().len() {
        for j in i + 1..net.rows().len() {
            for a in &net.rows()[i].cells {
                for b in &net.rows()[j].cells {
                    let common = intersection_size(a, b);
                    if common != 1 {
                        intersect_ok = false;
                        break 'outer;
                    }
                }
            }
        }
    }

    NetCheck {
        ok: pair_form_ok,
        violation,
        forms_agree: pair_form_ok == intersect_ok,
    }
}

fn intersection_size(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// F_a(m, n): the column of row `a` holding the label m·d + n.
#[derive(Debug, Clone)]
pub struct ColumnFunction {
    row: usize,
    d: usize,
    table: Vec<usize>, // label -> column
}

impl ColumnFunction {
    pub fn row(&self) -> usize {
        self.row
    }

    #[inline]
    pub fn eval(&self, m: usize, n: usize) -> usize {
        self.table[m * self.d + n]
    }

    #[inline]
    pub fn at_label(&self, label: usize) -> usize {
        self.table[label]
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }
}

pub fn column_function(net: &NetDesign, row: usize) -> ColumnFunction {
    let d = net.d();
    let mut table = vec![0usize; d * d];
    for (ci, cell) in net.rows()[row].cells.iter().enumerate() {
        for &l in cell {
            table[l] = ci;
        }
    }
    ColumnFunction { row, d, table }
}

/// Orthogonality of column functions: wherever F_a is constant, F_b takes
/// every value exactly once.
pub fn functions_orthogonal(fa: &ColumnFunction, fb: &ColumnFunction, d: usize) -> bool {
    for v in 0..d {
        let mut seen = vec![false; d];
        for label in 0..d * d {
            if fa.at_label(label) == v {
                let w = fb.at_label(label);
                if seen[w] {
                    return false;
                }
                seen[w] = true;
            }
        }
        if !seen.iter().all(|&s| s) {
            return false;
        }
    }
    true
}

/// Human-readable complementary question per row.
pub fn render_questions(net: &NetDesign) -> Vec<String> {
    let d = net.d();
    let prime = util::is_prime(d);
    net.rows()
        .iter()
        .map(|row| match row.tag {
            RowTag::M => "m = b?".to_string(),
            RowTag::N => "n = b?".to_string(),
            RowTag::Slope(a) => {
                if d == 2 {
                    "m + n = b?".to_string()
                } else if prime {
                    if a == 1 {
                        "n = m + b?".to_string()
                    } else {
                        format!("n = {a} m + b?")
                    }
                } else if a == 1 {
                    "n = m ⊕ b?".to_string()
                } else {
                    format!("n = {a} ⊙ m ⊕ b?")
                }
            }
        })
        .collect()
}

/// Text rendering with labels as mn digit pairs and cell separators,
/// questions appended per row.
pub fn render_text(net: &NetDesign) -> String {
    let d = net.d();
    let questions = render_questions(net);
    let mut out = String::new();
    let header: Vec<String> = (0..d)
        .map(|b| {
            let w = d * (label_width(d) + 1) - 1;
            format!("{:^w$}", format!("b={b}"), w = w)
        })
        .collect();
    out.push_str(&header.join(" | "));
    out.push('\n');
    let total = header.iter().map(|h| h.len()).sum::<usize>() + 3 * (d - 1);
    out.push_str(&"=".repeat(total));
    out.push('\n');
    for (row, q) in net.rows().iter().zip(&questions) {
        let cells: Vec<String> = row
            .cells
            .iter()
            .map(|cell| {
                cell.iter()
                    .map(|&l| format_label(l, d))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        out.push_str(&cells.join(" | "));
        out.push_str("   ");
        out.push_str(q);
        out.push('\n');
    }
    out
}

fn label_width(d: usize) -> usize {
    if d <= 10 {
        2
    } else {
        format!("{},{}", d - 1, d - 1).len()
    }
}

fn format_label(label: usize, d: usize) -> String {
    let (m, n) = (label / d, label % d);
    if d <= 10 {
        format!("{m}{n}")
    } else {
        format!("{m},{n}")
    }
}

/// Reassembles the Latin squares encoded by the non-coordinate rows,
/// inverting the relabeling steps. Used to confirm the construction is
/// lossless.
pub fn squares_from_net(net: &NetDesign) -> Result<Vec<Vec<Vec<u8>>>> {
    let d = net.d();
    let mut out = Vec::new();
    for row in net.rows() {
        if !matches!(row.tag, RowTag::Slope(_)) {
            continue;
        }
        let mut grid = vec![vec![0u8; d]; d];
        for (i, cell) in row.cells.iter().enumerate() {
            for &label in cell {
                let (j, b) = (label / d, label % d);
                grid[i][j] = b as u8;
            }
        }
        out.push(grid);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::squares::{self, are_orthogonal, generate_ols_prime, generate_ols_prime_power, Square};
    use crate::gfield::Field;

    pub(crate) fn reference_net_d2() -> Vec<Vec<Vec<usize>>> {
        vec![
            vec![vec![0, 1], vec![2, 3]],
            vec![vec![0, 2], vec![1, 3]],
            vec![vec![0, 3], vec![1, 2]],
        ]
    }

    pub(crate) fn reference_net_d3() -> Vec<Vec<Vec<usize>>> {
        vec![
            vec![vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8]],
            vec![vec![0, 3, 6], vec![1, 4, 7], vec![2, 5, 8]],
            vec![vec![0, 4, 8], vec![1, 5, 6], vec![2, 3, 7]],
            vec![vec![0, 5, 7], vec![1, 3, 8], vec![2, 4, 6]],
        ]
    }

    pub(crate) fn reference_net_d4() -> Vec<Vec<Vec<usize>>> {
        vec![
            vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7], vec![8, 9, 10, 11], vec![12, 13, 14, 15]],
            vec![vec![0, 4, 8, 12], vec![1, 5, 9, 13], vec![2, 6, 10, 14], vec![3, 7, 11, 15]],
            vec![vec![0, 5, 10, 15], vec![1, 4, 11, 14], vec![2, 7, 8, 13], vec![3, 6, 9, 12]],
            vec![vec![0, 6, 11, 13], vec![1, 7, 10, 12], vec![2, 4, 9, 15], vec![3, 5, 8, 14]],
            vec![vec![0, 7, 9, 14], vec![1, 6, 8, 15], vec![2, 5, 11, 12], vec![3, 4, 10, 13]],
        ]
    }

    /// The three-row order-4 table that cannot be extended.
    pub(crate) fn incomplete_net_d4() -> NetDesign {
        NetDesign::from_rows(
            4,
            vec![
                (
                    RowTag::M,
                    vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7], vec![8, 9, 10, 11], vec![12, 13, 14, 15]],
                ),
                (
                    RowTag::N,
                    vec![vec![0, 4, 8, 12], vec![1, 5, 9, 13], vec![2, 6, 10, 14], vec![3, 7, 11, 15]],
                ),
                (
                    RowTag::Slope(1),
                    vec![vec![0, 5, 10, 15], vec![1, 6, 11, 12], vec![2, 7, 8, 13], vec![3, 4, 9, 14]],
                ),
            ],
        )
        .unwrap()
    }

    fn build_net(d: usize) -> NetDesign {
        let fam = if crate::util::is_prime(d) {
            generate_ols_prime(d).unwrap()
        } else {
            generate_ols_prime_power(&Field::for_order(d).unwrap()).unwrap()
        };
        net_from_ols(&fam).unwrap()
    }

    #[test]
    fn d2_matches_reference_table() {
        assert_eq!(build_net(2).cells(), reference_net_d2());
    }

    #[test]
    fn d3_matches_reference_table() {
        assert_eq!(build_net(3).cells(), reference_net_d3());
    }

    #[test]
    fn d4_matches_reference_table() {
        assert_eq!(build_net(4).cells(), reference_net_d4());
    }

    #[test]
    fn generated_nets_verify() {
        for d in [2, 3, 4, 5, 7, 8, 9] {
            let net = build_net(d);
            assert_eq!(net.rows().len(), d + 1);
            let check = verify_net(&net);
            assert!(check.ok, "net d={d} failed: {:?}", check.violation);
            assert!(check.forms_agree);
        }
    }

    #[test]
    fn incomplete_table_verifies() {
        let net = incomplete_net_d4();
        let check = verify_net(&net);
        assert!(check.ok);
        assert!(check.forms_agree);
    }

    #[test]
    fn corruption_is_detected_with_witness() {
        let mut cells = reference_net_d3();
        // Swap two labels across cells of the last row.
        let tmp = cells[3][0][1];
        cells[3][0][1] = cells[3][2][1];
        cells[3][2][1] = tmp;
        let net = NetDesign::from_rows(
            3,
            vec![
                (RowTag::M, cells[0].clone()),
                (RowTag::N, cells[1].clone()),
                (RowTag::Slope(1), cells[2].clone()),
                (RowTag::Slope(2), cells[3].clone()),
            ],
        )
        .unwrap();
        let check = verify_net(&net);
        assert!(!check.ok);
        assert!(check.forms_agree);
        assert!(check.violation.is_some());
    }

    #[test]
    fn column_functions_match_slope_formula() {
        let net = build_net(3);
        for (a, row) in [(1usize, 2usize), (2, 3)] {
            let f = column_function(&net, row);
            for m in 0..3 {
                for n in 0..3 {
                    let b = (n + 3 * 3 - a * m % 3) % 3;
                    assert_eq!(f.eval(m, n), b, "a={a} m={m} n={n}");
                }
            }
        }
        // Coordinate rows: F(m,n) = m and F(m,n) = n.
        let fm = column_function(&net, 0);
        let fn_ = column_function(&net, 1);
        for m in 0..3 {
            for n in 0..3 {
                assert_eq!(fm.eval(m, n), m);
                assert_eq!(fn_.eval(m, n), n);
            }
        }
    }

    #[test]
    fn column_functions_are_orthogonal() {
        for d in [2, 3, 4, 5, 7] {
            let net = build_net(d);
            let fs: Vec<ColumnFunction> =
                (0..net.rows().len()).map(|r| column_function(&net, r)).collect();
            for i in 0..fs.len() {
                // Level sets have exactly d members.
                let mut counts = vec![0usize; d];
                for l in 0..d * d {
                    counts[fs[i].at_label(l)] += 1;
                }
                assert!(counts.iter().all(|&c| c == d));
                for j in i + 1..fs.len() {
                    assert!(functions_orthogonal(&fs[i], &fs[j], d), "d={d} rows {i},{j}");
                }
            }
        }
    }

    #[test]
    fn questions_render() {
        assert_eq!(
            render_questions(&build_net(2)),
            vec!["m = b?", "n = b?", "m + n = b?"]
        );
        let q3 = render_questions(&build_net(3));
        assert_eq!(q3, vec!["m = b?", "n = b?", "n = m + b?", "n = 2 m + b?"]);
        let single = NetDesign::from_rows(
            2,
            vec![(RowTag::M, vec![vec![0, 1], vec![2, 3]])],
        )
        .unwrap();
        assert_eq!(render_questions(&single).len(), 1);
    }

    #[test]
    fn non_standard_input_rejected() {
        // A certified but non-standard set: relabel symbols of the d=3 family.
        let fam = generate_ols_prime(3).unwrap();
        let twisted: Vec<squares::LatinSquare> = fam
            .latin()
            .squares()
            .iter()
            .map(|s| {
                squares::LatinSquare::new(
                    Square::from_fn(3, |i, j| (s.get(i, j) as usize + 1) % 3).unwrap(),
                )
                .unwrap()
            })
            .collect();
        let set = squares::OlsSet::new(3, twisted).unwrap().certify().unwrap();
        let aug = AugmentedOls::from_latin(set).unwrap();
        assert!(matches!(net_from_ols(&aug), Err(Error::NotStandardForm)));
    }

    #[test]
    fn round_trip_back_to_squares() {
        for d in [3, 4, 5] {
            let fam = if crate::util::is_prime(d) {
                generate_ols_prime(d).unwrap()
            } else {
                generate_ols_prime_power(&Field::for_order(d).unwrap()).unwrap()
            };
            let net = net_from_ols(&fam).unwrap();
            let grids = squares_from_net(&net).unwrap();
            assert_eq!(grids.len(), d - 1);
            for (grid, original) in grids.iter().zip(fam.latin().squares()) {
                assert_eq!(grid, &original.as_square().rows());
            }
            // And the reassembled squares are pairwise orthogonal.
            for i in 0..grids.len() {
                for j in i + 1..grids.len() {
                    let a = Square::from_rows(grids[i].clone()).unwrap();
                    let b = Square::from_rows(grids[j].clone()).unwrap();
                    assert!(are_orthogonal(&a, &b).unwrap());
                }
            }
        }
    }
}
