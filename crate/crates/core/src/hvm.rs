//! The hidden-variable layer: epistemic states over a net, measurement
//! simulation, operator reconstruction through the MUB expansion, purity
//! classification, and the exhaustive census of quantum-representable
//! epistemic states.

use std::time::Instant;

use num_complex::Complex64;
use rand::prelude::*;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::nets::NetDesign;
use crate::qmub::{CMat, MubSet};
use crate::util;

/// Classification tolerance for the trace tests; one order looser than the
/// linear-algebra tolerance to absorb accumulated error.
pub const CLASSIFY_EPSILON: f64 = 1e-8;

/// A knowledge state: exactly d of the d² ontic labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpistemicState {
    d: usize,
    labels: Vec<usize>,
}

impl EpistemicState {
    pub fn new(d: usize, mut labels: Vec<usize>) -> Result<EpistemicState> {
        if labels.len() != d {
            return Err(Error::InvalidArgument(format!(
                "an epistemic state needs exactly {d} labels, got {}",
                labels.len()
            )));
        }
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("ontic labels must be distinct".into()));
        }
        if labels.last().copied().unwrap_or(0) >= d * d {
            return Err(Error::InvalidArgument(format!("labels must lie in 0..{}", d * d)));
        }
        Ok(EpistemicState { d, labels })
    }

    /// The epistemic state of a net cell.
    pub fn from_cell(net: &NetDesign, row: usize, col: usize) -> Result<EpistemicState> {
        let cell = net
            .rows()
            .get(row)
            .and_then(|r| r.cells.get(col))
            .ok_or_else(|| Error::InvalidArgument(format!("no cell ({row}, {col})")))?;
        EpistemicState::new(net.d(), cell.clone())
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }
}

/// Per-row, per-column intersection counts; the overlap probability is
/// count / d, kept exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverlapProfile {
    d: usize,
    counts: Vec<Vec<u8>>,
}

impl OverlapProfile {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn counts(&self) -> &[Vec<u8>] {
        &self.counts
    }

    /// Overlap with cell (row, col) as an exact fraction (numerator, d).
    pub fn overlap(&self, row: usize, col: usize) -> (u8, usize) {
        (self.counts[row][col], self.d)
    }

    /// A formal profile (not necessarily realizable by any state); row sums
    /// must equal d.
    pub fn formal(d: usize, counts: Vec<Vec<u8>>) -> Result<OverlapProfile> {
        for row in &counts {
            if row.len() != d || row.iter().map(|&c| c as usize).sum::<usize>() != d {
                return Err(Error::InvalidArgument("profile rows must sum to 1".into()));
            }
        }
        Ok(OverlapProfile { d, counts })
    }
}

/// p_j^(m) = |e ∩ cell(m, j)| / d over all d+1 rows.
pub fn overlap_profile(e: &EpistemicState, net: &NetDesign) -> Result<OverlapProfile> {
    let d = net.d();
    if !net.is_complete() {
        return Err(Error::IncompleteNet { rows: net.rows().len(), expected: d + 1 });
    }
    if e.d() != d {
        return Err(Error::DimensionMismatch("state and net orders differ".into()));
    }
    let mut counts = vec![vec![0u8; d]; net.rows().len()];
    for (m, row) in net.rows().iter().enumerate() {
        for (j, cell) in row.cells.iter().enumerate() {
            counts[m][j] = cell.iter().filter(|l| e.labels().binary_search(l).is_ok()).count() as u8;
        }
    }
    Ok(OverlapProfile { d, counts })
}

/// The operator of a profile: O = −𝟙 + Σ_m Σ_j p_j^(m) |j⟩_m⟨j|.
/// With row sums 1 over d+1 rows this has unit trace by construction.
pub fn operator_from_profile(profile: &OverlapProfile, mubs: &MubSet) -> Result<CMat> {
    let d = profile.d();
    if mubs.d() != d || mubs.len() != profile.counts().len() {
        return Err(Error::DimensionMismatch(
            "profile rows must match the basis family".into(),
        ));
    }
    let mut op = CMat::identity(d).scale(Complex64::new(-1.0, 0.0));
    for (m, row) in profile.counts().iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c > 0 {
                op.add_assign_scaled(
                    &mubs.bases()[m].projector(j),
                    Complex64::new(c as f64 / d as f64, 0.0),
                );
            }
        }
    }
    Ok(op)
}

/// A reconstructed operator with its trace diagnostics.
#[derive(Debug, Clone)]
pub struct ReconstructedOperator {
    pub op: CMat,
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub source: EpistemicState,
}

/// Builds the operator of an epistemic state from its exact overlaps with
/// the net cells, and records Tr(O), Tr(O²), Tr(O³).
pub fn reconstruct_operator(
    e: &EpistemicState,
    mubs: &MubSet,
    net: &NetDesign,
) -> Result<ReconstructedOperator> {
    let profile = overlap_profile(e, net)?;
    let op = operator_from_profile(&profile, mubs)?;
    if !op.is_hermitian(1e-8) {
        return Err(Error::Construction("reconstructed operator not Hermitian".into()));
    }
    let t1 = op.trace().re;
    let o2 = op.mul(&op);
    let t2 = o2.trace().re;
    let t3 = trace_of_product(&o2, &op);
    Ok(ReconstructedOperator { op, t1, t2, t3, source: e.clone() })
}

/// Tr(A·B) without forming the product.
fn trace_of_product(a: &CMat, b: &CMat) -> f64 {
    let n = a.dim();
    let mut t = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            t += a.get(i, j) * b.get(j, i);
        }
    }
    t.re
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantumClass {
    PureQuantum,
    NotQuantum,
}

#[derive(Debug, Clone)]
pub struct Classification {
    pub class: QuantumClass,
    pub t2: f64,
    pub t3: f64,
    /// Smallest eigenvalue, computed for accepted operators to re-verify
    /// positivity.
    pub eigen_floor: Option<f64>,
}

/// The purity test: PureQuantum iff |t2 − 1| ≤ ε and |t3 − 1| ≤ ε. For a
/// Hermitian unit-trace operator this pins the spectrum to (1, 0, ..., 0);
/// accepted operators additionally get an eigenvalue-floor check.
pub fn classify_quantum(op: &ReconstructedOperator, epsilon: f64) -> Result<Classification> {
    if !op.op.is_hermitian(1e-8) {
        return Err(Error::InvalidArgument("operator is not Hermitian".into()));
    }
    let pure = (op.t2 - 1.0).abs() <= epsilon && (op.t3 - 1.0).abs() <= epsilon;
    let mut eigen_floor = None;
    if pure {
        let (evals, _) = op.op.hermitian_eigen()?;
        eigen_floor = evals.first().copied();
        if eigen_floor.unwrap_or(0.0) < -epsilon {
            return Err(Error::Construction(format!(
                "trace-pure operator with negative eigenvalue {:.3e}",
                eigen_floor.unwrap()
            )));
        }
    }
    Ok(Classification {
        class: if pure { QuantumClass::PureQuantum } else { QuantumClass::NotQuantum },
        t2: op.t2,
        t3: op.t3,
        eigen_floor,
    })
}

/// Exact count of epistemic states: C(d², d).
pub fn count_epistemic(d: usize) -> Result<u128> {
    if d < 2 {
        return Err(Error::InvalidArgument("d must be at least 2".into()));
    }
    util::binomial_checked((d * d) as u64, d as u64).ok_or(Error::Overflow("count_epistemic"))
}

/// Census configuration.
#[derive(Debug, Clone)]
pub struct CensusConfig {
    /// 1 = deterministic single pass; 0 = rayon default pool over chunks;
    /// k > 1 = dedicated pool of k threads over chunks.
    pub threads: usize,
    pub epsilon: f64,
    /// Also count states whose operator is positive semidefinite (a valid
    /// density operator, pure or mixed).
    pub report_psd: bool,
    /// Count float-borderline |t2 − 1| values and re-decide them exactly.
    pub audit: bool,
    /// Required for d = 7 (≈ 8.6×10⁷ states).
    pub allow_large: bool,
}

impl Default for CensusConfig {
    fn default() -> Self {
        CensusConfig {
            threads: 1,
            epsilon: CLASSIFY_EPSILON,
            report_psd: false,
            audit: false,
            allow_large: false,
        }
    }
}

/// Census outcome with exact counts.
#[derive(Debug, Clone)]
pub struct CensusResult {
    pub d: usize,
    pub total: u64,
    pub quantum: u64,
    /// Reduced ratio quantum/total.
    pub ratio: (u64, u64),
    pub elapsed_ms: u128,
    pub chunks: usize,
    pub threads: usize,
    pub psd: Option<u64>,
    pub audit_borderline: Option<u64>,
    /// Accepted operators whose eigenvalue floor fell below −ε (expected 0).
    pub positivity_violations: u64,
}

impl CensusResult {
    pub fn ratio_string(&self) -> String {
        if self.ratio.1 == 1 {
            format!("{}", self.ratio.0)
        } else {
            format!("{}/{}", self.ratio.0, self.ratio.1)
        }
    }
}

struct CensusKernel {
    d: usize,
    rows: usize,
    col_of: Vec<Vec<u8>>,
    projectors: Vec<CMat>,
    epsilon: f64,
    report_psd: bool,
    audit: bool,
}

#[derive(Default, Clone, Copy)]
struct ChunkCounts {
    total: u64,
    quantum: u64,
    psd: u64,
    borderline: u64,
    positivity_violations: u64,
}

impl CensusKernel {
    fn new(mubs: &MubSet, net: &NetDesign, cfg: &CensusConfig) -> CensusKernel {
        let d = net.d();
        let rows = net.rows().len();
        let mut col_of = vec![vec![0u8; d * d]; rows];
        for (m, row) in net.rows().iter().enumerate() {
            for (j, cell) in row.cells.iter().enumerate() {
                for &l in cell {
                    col_of[m][l] = j as u8;
                }
            }
        }
        let mut projectors = Vec::with_capacity(rows * d);
        for basis in mubs.bases() {
            for j in 0..d {
                projectors.push(basis.projector(j));
            }
        }
        CensusKernel {
            d,
            rows,
            col_of,
            projectors,
            epsilon: cfg.epsilon,
            report_psd: cfg.report_psd,
            audit: cfg.audit,
        }
    }

    /// Classifies one state. The t2 test runs on exact integers:
    /// Tr(O²) = Σ (c/d)² − 1 for exact overlaps, so Σc² = 2d² is the purity
    /// condition; possible exact values sit 1/d² apart, far beyond ε.
    fn classify(&self, labels: &[usize], counts: &mut [u8], out: &mut ChunkCounts) {
        let d = self.d;
        counts.fill(0);
        for &l in labels {
            for m in 0..self.rows {
                counts[m * d + self.col_of[m][l] as usize] += 1;
            }
        }
        let sum2: usize = counts.iter().map(|&c| (c as usize) * (c as usize)).sum();
        out.total += 1;

        let t2_pure = sum2 == 2 * d * d;
        let needs_matrix = t2_pure || self.report_psd || self.audit;
        if !needs_matrix {
            return;
        }

        let mut op = CMat::identity(d).scale(Complex64::new(-1.0, 0.0));
        for (k, &c) in counts.iter().enumerate() {
            if c > 0 {
                op.add_assign_scaled(&self.projectors[k], Complex64::new(c as f64 / d as f64, 0.0));
            }
        }

        if self.audit {
            let t2f = op.mul(&op).trace().re;
            let dev = (t2f - 1.0).abs();
            if (self.epsilon / 10.0..=self.epsilon * 10.0).contains(&dev) {
                out.borderline += 1;
            }
        }

        if t2_pure {
            let o2 = op.mul(&op);
            let t3 = trace_of_product(&o2, &op);
            if (t3 - 1.0).abs() <= self.epsilon {
                out.quantum += 1;
                match op.hermitian_eigen() {
                    Ok((evals, _)) if evals[0] >= -self.epsilon => {}
                    _ => out.positivity_violations += 1,
                }
            }
        }

        if self.report_psd {
            if let Ok((evals, _)) = op.hermitian_eigen() {
                if evals[0] >= -self.epsilon {
                    out.psd += 1;
                }
            }
        }
    }

    /// All states whose smallest label is `first`, in colexicographic order
    /// of the remaining labels.
    fn run_chunk(&self, first: usize) -> ChunkCounts {
        let d = self.d;
        let n = d * d;
        let mut counts = vec![0u8; self.rows * d];
        let mut out = ChunkCounts::default();
        let mut c: Vec<usize> = (0..d).map(|i| first + i).collect();
        if c[d - 1] >= n {
            return out;
        }
        loop {
            self.classify(&c, &mut counts, &mut out);
            // Colex successor on positions 1..d with c[0] pinned.
            let mut i = 1;
            loop {
                if i == d {
                    return out;
                }
                let next = if i + 1 == d { n } else { c[i + 1] };
                if c[i] + 1 < next {
                    c[i] += 1;
                    for j in 1..i {
                        c[j] = first + j;
                    }
                    break;
                }
                i += 1;
            }
        }
    }

    /// Single global pass over all C(d², d) states in colexicographic order.
    fn run_single(&self) -> ChunkCounts {
        let d = self.d;
        let n = d * d;
        let mut counts = vec![0u8; self.rows * d];
        let mut out = ChunkCounts::default();
        let mut c: Vec<usize> = (0..d).collect();
        loop {
            self.classify(&c, &mut counts, &mut out);
            let mut i = 0;
            loop {
                if i == d {
                    return out;
                }
                let next = if i + 1 == d { n } else { c[i + 1] };
                if c[i] + 1 < next {
                    c[i] += 1;
                    for (j, slot) in c.iter_mut().enumerate().take(i) {
                        *slot = j;
                    }
                    break;
                }
                i += 1;
            }
        }
    }
}

/// Iterates every epistemic state, classifies it, and returns exact counts.
/// The result is identical for the chunked and single-pass strategies.
pub fn census(mubs: &MubSet, net: &NetDesign, cfg: &CensusConfig) -> Result<CensusResult> {
    let d = net.d();
    if !net.is_complete() {
        return Err(Error::IncompleteNet { rows: net.rows().len(), expected: d + 1 });
    }
    if mubs.d() != d || mubs.len() != net.rows().len() {
        return Err(Error::DimensionMismatch(
            "census needs one certified basis per net row".into(),
        ));
    }
    if !mubs.is_certified() {
        return Err(Error::Uncertified("census basis family".into()));
    }
    let supported = matches!(d, 2..=5) || (d == 7 && cfg.allow_large);
    if !supported {
        return Err(Error::InvalidArgument(format!(
            "census supports d in 2..=5 by default and d = 7 behind the large-run flag; got d = {d}"
        )));
    }

    let start = Instant::now();
    let kernel = CensusKernel::new(mubs, net, cfg);
    let chunk_keys: Vec<usize> = (0..=(d * d - d)).collect();

    let (merged, chunks) = if cfg.threads == 1 {
        (kernel.run_single(), 1)
    } else {
        let run = || {
            chunk_keys
                .par_iter()
                .map(|&f| kernel.run_chunk(f))
                .collect::<Vec<_>>()
        };
        let per_chunk = if cfg.threads == 0 {
            run()
        } else {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(cfg.threads)
                .build()
                .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
            pool.install(run)
        };
        // Merge in chunk-key order.
        let mut acc = ChunkCounts::default();
        for c in per_chunk {
            acc.total += c.total;
            acc.quantum += c.quantum;
            acc.psd += c.psd;
            acc.borderline += c.borderline;
            acc.positivity_violations += c.positivity_violations;
        }
        (acc, chunk_keys.len())
    };

    let expected = count_epistemic(d)?;
    if merged.total as u128 != expected {
        return Err(Error::Construction(format!(
            "enumeration covered {} states, expected {expected}",
            merged.total
        )));
    }

    let g = util::gcd(merged.quantum, merged.total);
    Ok(CensusResult {
        d,
        total: merged.total,
        quantum: merged.quantum,
        ratio: (merged.quantum / g, merged.total / g),
        elapsed_ms: start.elapsed().as_millis(),
        chunks,
        threads: cfg.threads,
        psd: cfg.report_psd.then_some(merged.psd),
        audit_borderline: cfg.audit.then_some(merged.borderline),
        positivity_violations: merged.positivity_violations,
    })
}

/// Outcome distribution of measuring one net row on an epistemic state:
/// outcome j with probability |e ∩ cell(row, j)| / d, plus a sampled
/// histogram drawn uniformly from the ontic labels of e.
#[derive(Debug, Clone)]
pub struct MeasurementReport {
    pub d: usize,
    pub row: usize,
    /// Exact outcome numerators; the probability of j is exact_counts[j]/d.
    pub exact_counts: Vec<u8>,
    pub histogram: Vec<u64>,
    pub trials: u64,
    pub seed: u64,
}

pub fn simulate_measurement(
    e: &EpistemicState,
    row: usize,
    net: &NetDesign,
    trials: u64,
    seed: u64,
) -> Result<MeasurementReport> {
    let d = net.d();
    if row >= net.rows().len() {
        return Err(Error::InvalidArgument(format!("row {row} out of range")));
    }
    if e.d() != d {
        return Err(Error::DimensionMismatch("state and net orders differ".into()));
    }
    let mut col_of = vec![0u8; d * d];
    for (j, cell) in net.rows()[row].cells.iter().enumerate() {
        for &l in cell {
            col_of[l] = j as u8;
        }
    }
    let mut exact_counts = vec![0u8; d];
    for &l in e.labels() {
        exact_counts[col_of[l] as usize] += 1;
    }
    let mut histogram = vec![0u64; d];
    let mut rng = StdRng::seed_from_u64(seed);
    for _ in 0..trials {
        let l = e.labels()[rng.gen_range(0..d)];
        histogram[col_of[l] as usize] += 1;
    }
    Ok(MeasurementReport { d, row, exact_counts, histogram, trials, seed })
}
