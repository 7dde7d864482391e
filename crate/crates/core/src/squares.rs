//! Latin squares, orthogonality, complete OLS families for primes and prime
//! powers, MacNeish direct products, and orthogonal-mate search by
//! transversal enumeration plus exact cover.

use crate::error::{Error, Result};
use crate::gfield::Field;
use crate::util;

/// A d×d array of symbols 0..d-1. Not necessarily Latin: the coordinate
/// squares A_ij = j and A_ij = i are admitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Square {
    order: usize,
    grid: Vec<u8>, // row-major
}

impl Square {
    pub fn from_rows(rows: Vec<Vec<u8>>) -> Result<Square> {
        let d = rows.len();
        if d < 1 || d > 255 {
            return Err(Error::InvalidSquare(format!("unsupported order {d}")));
        }
        let mut grid = Vec::with_capacity(d * d);
        for row in &rows {
            if row.len() != d {
                return Err(Error::InvalidSquare(format!(
                    "row length {} differs from order {d}",
                    row.len()
                )));
            }
            for &v in row {
                if v as usize >= d {
                    return Err(Error::InvalidSquare(format!("entry {v} out of range 0..{d}")));
                }
                grid.push(v);
            }
        }
        Ok(Square { order: d, grid })
    }

    pub fn from_fn(order: usize, f: impl Fn(usize, usize) -> usize) -> Result<Square> {
        let rows = (0..order)
            .map(|i| (0..order).map(|j| f(i, j) as u8).collect())
            .collect();
        Square::from_rows(rows)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.grid[i * self.order + j]
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        (0..self.order)
            .map(|i| self.grid[i * self.order..(i + 1) * self.order].to_vec())
            .collect()
    }

    /// The square with entry j at position (i, j).
    pub fn coordinate_columns(order: usize) -> Square {
        Square::from_fn(order, |_, j| j).expect("valid coordinate square")
    }

    /// The square with entry i at position (i, j).
    pub fn coordinate_rows(order: usize) -> Square {
        Square::from_fn(order, |i, _| i).expect("valid coordinate square")
    }
}

/// True iff each row and each column is a permutation of 0..d-1.
pub fn is_latin(s: &Square) -> bool {
    let d = s.order();
    let mut seen = vec![false; d];
    for i in 0..d {
        seen.fill(false);
        for j in 0..d {
            let v = s.get(i, j) as usize;
            if seen[v] {
                return false;
            }
            seen[v] = true;
        }
    }
    for j in 0..d {
        seen.fill(false);
        for i in 0..d {
            let v = s.get(i, j) as usize;
            if seen[v] {
                return false;
            }
            seen[v] = true;
        }
    }
    true
}

/// A square whose Latin property has been checked on construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatinSquare(Square);

impl LatinSquare {
    pub fn new(square: Square) -> Result<LatinSquare> {
        if is_latin(&square) {
            Ok(LatinSquare(square))
        } else {
            Err(Error::InvalidSquare("square is not Latin".into()))
        }
    }

    pub fn as_square(&self) -> &Square {
        &self.0
    }

    pub fn order(&self) -> usize {
        self.0.order()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.0.get(i, j)
    }
}

impl From<LatinSquare> for Square {
    fn from(l: LatinSquare) -> Square {
        l.0
    }
}

/// True iff the d² ordered pairs (a_ij, b_ij) are pairwise distinct.
pub fn are_orthogonal(a: &Square, b: &Square) -> Result<bool> {
    if a.order() != b.order() {
        return Err(Error::OrderMismatch { left: a.order(), right: b.order() });
    }
    let d = a.order();
    let mut seen = vec![false; d * d];
    for i in 0..d {
        for j in 0..d {
            let key = a.get(i, j) as usize * d + b.get(i, j) as usize;
            if seen[key] {
                return Ok(false);
            }
            seen[key] = true;
        }
    }
    Ok(true)
}

/// A family of pairwise orthogonal Latin squares.
#[derive(Debug, Clone)]
pub struct OlsSet {
    order: usize,
    squares: Vec<LatinSquare>,
    certified: bool,
}

impl OlsSet {
    /// Wraps squares without verifying orthogonality.
    pub fn new(order: usize, squares: Vec<LatinSquare>) -> Result<OlsSet> {
        if squares.iter().any(|s| s.order() != order) {
            return Err(Error::OrderMismatch {
                left: order,
                right: squares.iter().map(|s| s.order()).find(|&o| o != order).unwrap(),
            });
        }
        Ok(OlsSet { order, squares, certified: false })
    }

    /// Verifies every unordered pair and marks the set certified.
    pub fn certify(mut self) -> Result<OlsSet> {
        for i in 0..self.squares.len() {
            for j in i + 1..self.squares.len() {
                if !are_orthogonal(self.squares[i].as_square(), self.squares[j].as_square())? {
                    return Err(Error::VerificationFailed(format!(
                        "squares {i} and {j} are not orthogonal"
                    )));
                }
            }
        }
        if self.squares.len() + 1 > self.order {
            return Err(Error::VerificationFailed(format!(
                "{} squares exceed the d-1 = {} bound",
                self.squares.len(),
                self.order - 1
            )));
        }
        self.certified = true;
        Ok(self)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn squares(&self) -> &[LatinSquare] {
        &self.squares
    }

    pub fn is_certified(&self) -> bool {
        self.certified
    }
}

/// An OLS set augmented with the two orthogonal non-Latin coordinate squares,
/// the input the net construction consumes.
#[derive(Debug, Clone)]
pub struct AugmentedOls {
    order: usize,
    /// A_ij = j; becomes the net's coordinate row.
    column_square: Square,
    /// A_ij = i.
    row_square: Square,
    latin: OlsSet,
}

impl AugmentedOls {
    pub fn from_latin(latin: OlsSet) -> Result<AugmentedOls> {
        let d = latin.order();
        let aug = AugmentedOls {
            order: d,
            column_square: Square::coordinate_columns(d),
            row_square: Square::coordinate_rows(d),
            latin,
        };
        aug.verify()?;
        Ok(aug)
    }

    /// Checks orthogonality across the whole augmented family.
    pub fn verify(&self) -> Result<()> {
        if !self.latin.is_certified() {
            return Err(Error::Uncertified("Latin subset of the augmented family".into()));
        }
        if !are_orthogonal(&self.column_square, &self.row_square)? {
            return Err(Error::VerificationFailed("coordinate squares not orthogonal".into()));
        }
        for (k, s) in self.latin.squares().iter().enumerate() {
            if !are_orthogonal(&self.column_square, s.as_square())?
                || !are_orthogonal(&self.row_square, s.as_square())?
            {
                return Err(Error::VerificationFailed(format!(
                    "square {k} not orthogonal to a coordinate square"
                )));
            }
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn column_square(&self) -> &Square {
        &self.column_square
    }

    pub fn row_square(&self) -> &Square {
        &self.row_square
    }

    pub fn latin(&self) -> &OlsSet {
        &self.latin
    }
}

/// Complete OLS family for prime d: square a (a = 1..d-1) has entry
/// n = a·m + b mod d at row b, column m, so the first column reads 0..d-1
/// and the net construction reproduces the reference tables.
pub fn generate_ols_prime(d: usize) -> Result<AugmentedOls> {
    if !util::is_prime(d) {
        return Err(Error::NotPrime(d));
    }
    let squares = (1..d)
        .map(|a| LatinSquare::new(Square::from_fn(d, |b, m| (a * m + b) % d)?))
        .collect::<Result<Vec<_>>>()?;
    AugmentedOls::from_latin(OlsSet::new(d, squares)?.certify()?)
}

/// Complete OLS family for d = p^r via field arithmetic: n = a ⊙ m ⊕ b.
pub fn generate_ols_prime_power(field: &Field) -> Result<AugmentedOls> {
    let d = field.d();
    let squares = (1..d)
        .map(|a| {
            LatinSquare::new(Square::from_fn(d, |b, m| {
                field.add_idx(field.mul_idx(a, m), b)
            })?)
        })
        .collect::<Result<Vec<_>>>()?;
    AugmentedOls::from_latin(OlsSet::new(d, squares)?.certify()?)
}

/// Relabels each square's symbols so its first column reads 0..d-1.
/// Latin property and pairwise orthogonality are re-verified afterwards.
pub fn standardize(set: &OlsSet) -> Result<OlsSet> {
    if !set.is_certified() {
        return Err(Error::Uncertified("standardize requires a certified set".into()));
    }
    let d = set.order();
    let squares = set
        .squares()
        .iter()
        .map(|s| {
            let mut relabel = vec![0u8; d];
            for i in 0..d {
                relabel[s.get(i, 0) as usize] = i as u8;
            }
            LatinSquare::new(Square::from_fn(d, |i, j| relabel[s.get(i, j) as usize] as usize)?)
        })
        .collect::<Result<Vec<_>>>()?;
    OlsSet::new(d, squares)?.certify()
}

/// True iff every square's first column reads 0..d-1 top to bottom.
pub fn is_standard(set: &OlsSet) -> bool {
    set.squares()
        .iter()
        .all(|s| (0..s.order()).all(|i| s.get(i, 0) as usize == i))
}

/// Direct product: entry at ((i,k),(j,l)) is a_ij·d2 + b_kl under row-major
/// composite indexing. Preserves the Latin property, and products of
/// orthogonal factors are orthogonal.
pub fn macneish_product(a: &Square, b: &Square) -> Result<Square> {
    let d1 = a.order();
    let d2 = b.order();
    let d = d1 * d2;
    if d > 255 {
        return Err(Error::OrderTooLarge { order: d, max: 255 });
    }
    Square::from_fn(d, |row, col| {
        let (i, k) = (row / d2, row % d2);
        let (j, l) = (col / d2, col % d2);
        a.get(i, j) as usize * d2 + b.get(k, l) as usize
    })
}

/// Pairs the squares of two certified sets in order and certifies the
/// products, yielding min(|a|,|b|) OLSs of composite order.
pub fn macneish_ols(a: &OlsSet, b: &OlsSet) -> Result<OlsSet> {
    if !a.is_certified() || !b.is_certified() {
        return Err(Error::Uncertified("MacNeish factors".into()));
    }
    let n = a.squares().len().min(b.squares().len());
    let squares = (0..n)
        .map(|k| {
            LatinSquare::new(macneish_product(
                a.squares()[k].as_square(),
                b.squares()[k].as_square(),
            )?)
        })
        .collect::<Result<Vec<_>>>()?;
    OlsSet::new(a.order() * b.order(), squares)?.certify()
}

/// MacNeish lower bound min_i(p_i^{r_i}) - 1 on the number of OLSs of order d.
pub fn macneish_bound(d: usize) -> Result<usize> {
    if d < 2 {
        return Err(Error::InvalidArgument("order must be at least 2".into()));
    }
    let min = util::factorize(d)
        .into_iter()
        .map(|(p, r)| p.pow(r))
        .min()
        .expect("nonempty factorization");
    Ok(min - 1)
}

/// Prime factorization as (prime, exponent) pairs, ascending primes.
pub fn factorize(d: usize) -> Vec<(usize, u32)> {
    util::factorize(d)
}

/// Node budget for the transversal/exact-cover search.
#[derive(Debug, Clone, Copy)]
pub struct MateBudget {
    pub max_nodes: u64,
}

impl Default for MateBudget {
    fn default() -> Self {
        MateBudget { max_nodes: 10_000_000 }
    }
}

/// Outcome of the orthogonal-mate search. `NoMate` is exact: the search
/// enumerated every transversal and every disjoint decomposition attempt.
#[derive(Debug, Clone)]
pub enum MateOutcome {
    Mate { mate: LatinSquare, transversals: usize, nodes: u64 },
    NoMate { transversals: usize, nodes: u64 },
}

/// Searches for an orthogonal mate of `s`: enumerates all transversals,
/// then looks for d pairwise disjoint ones by exact cover. A decomposition
/// yields the mate with symbol k on the k-th transversal.
pub fn find_orthogonal_mate(s: &LatinSquare, budget: &MateBudget) -> Result<MateOutcome> {
    let d = s.order();
    if d > 10 {
        return Err(Error::OrderTooLarge { order: d, max: 10 });
    }

    let mut nodes: u64 = 0;
    let mut transversals: Vec<(u128, Vec<u8>)> = Vec::new();
    let mut cols = vec![0u8; d];
    enumerate_transversals(
        s,
        0,
        0u128,
        0usize,
        0usize,
        &mut cols,
        &mut transversals,
        &mut nodes,
        budget.max_nodes,
    )?;

    let t = transversals.len();
    if t < d {
        return Ok(MateOutcome::NoMate { transversals: t, nodes });
    }

    // Exact cover: choose d disjoint transversals covering all d² cells.
    let masks: Vec<u128> = transversals.iter().map(|(m, _)| *m).collect();
    let full: u128 = if d * d == 128 { u128::MAX } else { (1u128 << (d * d)) - 1 };
    let mut chosen = Vec::with_capacity(d);
    let found = cover_search(&masks, full, 0u128, d, &mut chosen, &mut nodes, budget.max_nodes)
        .map_err(|_| Error::BudgetExceeded { nodes, transversals_found: t })?;

    if !found {
        return Ok(MateOutcome::NoMate { transversals: t, nodes });
    }

    // Deterministic symbol assignment: order the chosen transversals by the
    // column they use in row 0.
    let mut picked: Vec<&Vec<u8>> = chosen.iter().map(|&i| &transversals[i].1).collect();
    picked.sort_by_key(|cols| cols[0]);
    let mut grid = vec![vec![0u8; d]; d];
    for (k, cols) in picked.iter().enumerate() {
        for (row, &col) in cols.iter().enumerate() {
            grid[row][col as usize] = k as u8;
        }
    }
    let mate = LatinSquare::new(Square::from_rows(grid)?)?;
    if !are_orthogonal(s.as_square(), mate.as_square())? {
        return Err(Error::Construction("decomposition produced a non-orthogonal mate".into()));
    }
    Ok(MateOutcome::Mate { mate, transversals: t, nodes })
}

#[allow(clippy::too_many_arguments)]
fn enumerate_transversals(
    s: &LatinSquare,
    row: usize,
    cells: u128,
    used_cols: usize,
    used_syms: usize,
    cols: &mut [u8],
    out: &mut Vec<(u128, Vec<u8>)>,
    nodes: &mut u64,
    max_nodes: u64,
) -> Result<()> {
    let d = s.order();
    if row == d {
        out.push((cells, cols.to_vec()));
        return Ok(());
    }
    for col in 0..d {
        if used_cols & (1 << col) != 0 {
            continue;
        }
        let sym = s.get(row, col) as usize;
        if used_syms & (1 << sym) != 0 {
            continue;
        }
        *nodes += 1;
        if *nodes > max_nodes {
            return Err(Error::BudgetExceeded { nodes: *nodes, transversals_found: out.len() });
        }
        cols[row] = col as u8;
        enumerate_transversals(
            s,
            row + 1,
            cells | (1u128 << (row * d + col)),
            used_cols | (1 << col),
            used_syms | (1 << sym),
            cols,
            out,
            nodes,
            max_nodes,
        )?;
    }
    Ok(())
}

/// Backtracking exact cover over transversal masks. Branches on the
/// uncovered cell with the fewest compatible transversals, ties broken by
/// lowest cell index; candidates tried in ascending transversal index.
fn cover_search(
    masks: &[u128],
    full: u128,
    covered: u128,
    remaining: usize,
    chosen: &mut Vec<usize>,
    nodes: &mut u64,
    max_nodes: u64,
) -> std::result::Result<bool, ()> {
    if covered == full {
        return Ok(remaining == 0);
    }
    if remaining == 0 {
        return Ok(false);
    }

    let uncovered = full & !covered;
    let mut best_cell = None;
    let mut best_count = usize::MAX;
    let mut cell_bits = uncovered;
    while cell_bits != 0 {
        let cell = cell_bits.trailing_zeros() as usize;
        cell_bits &= cell_bits - 1;
        let bit = 1u128 << cell;
        let count = masks
            .iter()
            .filter(|&&m| m & bit != 0 && m & covered == 0)
            .count();
        if count < best_count {
            best_count = count;
            best_cell = Some(bit);
            if count == 0 {
                break;
            }
        }
    }
    let bit = best_cell.expect("uncovered cell exists");
    if best_count == 0 {
        return Ok(false);
    }

    for (i, &m) in masks.iter().enumerate() {
        if m & bit == 0 || m & covered != 0 {
            continue;
        }
        *nodes += 1;
        if *nodes > max_nodes {
            return Err(());
        }
        chosen.push(i);
        if cover_search(masks, full, covered | m, remaining - 1, chosen, nodes, max_nodes)? {
            return Ok(true);
        }
        chosen.pop();
    }
    Ok(false)
}
