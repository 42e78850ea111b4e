//! Non-freeness certificates.
//!
//! If `T` were free, some unitary `k` would give `k · S` a free support for
//! the Ness-minimal point `S` of its orbit closure, and `k` would have to
//! stabilize the diagonal `μ(S)`. A certificate therefore consists of the
//! Ness data of `S`, the block structure of the stabilizer of `μ(S)`, and an
//! obstruction showing that no block unitary makes the support free.

use nalgebra::DMatrix;
use rand::Rng;

use crate::construction::{build_family_tensor, verify_family_tensor, FamilyTensor};
use crate::error::{Error, Result};
use crate::family::{family_data, to_f64, Rational};
use crate::flow::{flow, ness_minimality, FlowConfig, NessCertificate};
use crate::moment::{moment_map, HermTriple};
use crate::named;
use crate::sampling::random_unitary;
use crate::tensor::{apply, GroupTriple, Tensor3, C64};

/// Eigenvalues closer than this are treated as equal.
pub const CLUSTER_TOL: f64 = 1e-10;
/// `|det[v | v']| ≤ PARALLEL_TOL · ‖v‖‖v'‖` means parallel.
pub const PARALLEL_TOL: f64 = 1e-10;
/// Relative magnitude below which a block vector counts as zero.
const ZERO_VECTOR_TOL: f64 = 1e-9;

/// Per factor, indices grouped by equal value, groups ordered by first index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerBlocks {
    pub blocks: [Vec<Vec<usize>>; 3],
}

fn group_by<T>(values: &[T], eq: impl Fn(&T, &T) -> bool) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, v) in values.iter().enumerate() {
        match groups.iter_mut().find(|g| eq(&values[g[0]], v)) {
            Some(g) => g.push(i),
            None => groups.push(vec![i]),
        }
    }
    groups
}

impl StabilizerBlocks {
    /// Clusters the diagonal of a diagonal Hermitian triple at `CLUSTER_TOL`.
    pub fn from_diagonal(m: &HermTriple) -> Result<Self> {
        let off = m.max_off_diagonal();
        if off > CLUSTER_TOL {
            return Err(Error::NotDiagonal(off));
        }
        let d = m.diagonals();
        Ok(Self::from_values(&[&d[0], &d[1], &d[2]]))
    }

    pub fn from_values(v: &[&[f64]; 3]) -> Self {
        Self {
            blocks: [0, 1, 2].map(|l| group_by(v[l], |a, b| (a - b).abs() <= CLUSTER_TOL)),
        }
    }

    /// Exact grouping.
    pub fn from_rationals(q: &[Vec<Rational>; 3]) -> Self {
        Self {
            blocks: [0, 1, 2].map(|l| group_by(&q[l], |a, b| a == b)),
        }
    }

    /// Singletons in the first two factors, `{0..n−2}, {n−1}` in the third.
    pub fn family_pattern(n: usize) -> Self {
        let singles: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        Self {
            blocks: [singles.clone(), singles, vec![(0..n - 1).collect(), vec![n - 1]]],
        }
    }
}

impl std::fmt::Display for StabilizerBlocks {
    /// 1-based, e.g. `{1}{2}{3} | {1}{2}{3} | {1,2}{3}`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let factors: Vec<String> = self
            .blocks
            .iter()
            .map(|fac| {
                fac.iter()
                    .map(|g| {
                        let idx: Vec<String> = g.iter().map(|i| (i + 1).to_string()).collect();
                        format!("{{{}}}", idx.join(","))
                    })
                    .collect()
            })
            .collect();
        write!(f, "{}", factors.join(" | "))
    }
}

/// A 2-vector of `S` restricted to a block, with its position in the other
/// two factors (0-based, in factor order).
#[derive(Clone, Debug, PartialEq)]
pub struct BlockVector {
    pub position: [usize; 2],
    pub v: [C64; 2],
}

#[derive(Clone, Debug, PartialEq)]
pub enum ObstructionWitness {
    /// Three block vectors, pairwise non-parallel: any 2×2 unitary leaves one
    /// of them with two non-zero entries.
    PairwiseNonparallelTriple {
        factor: usize,
        block: [usize; 2],
        vectors: [BlockVector; 3],
        /// `|det[v | v']|/(‖v‖‖v'‖)` for the pairs (0,1), (0,2), (1,2).
        normalized_dets: [f64; 3],
    },
    /// Two parallel classes that are not orthogonal.
    NonOrthogonalClasses {
        factor: usize,
        block: [usize; 2],
        vectors: [BlockVector; 2],
        /// `|⟨v, v'⟩|/(‖v‖‖v'‖)`.
        normalized_inner: f64,
    },
    /// Every off-diagonal entry of `WW*` is non-zero, so no `W uᵀ` has rows
    /// with one non-zero entry each: that would force two rows with
    /// disjoint supports, or all rows into one column.
    WwStarOffDiagonal {
        n: usize,
        min_off_diagonal: f64,
        /// `min_j w_j²`, exact; the off-diagonal entries are `−w_i w_j`.
        min_w_sq: Rational,
    },
}

fn det2(a: &[C64; 2], b: &[C64; 2]) -> C64 {
    a[0] * b[1] - a[1] * b[0]
}

fn norm2(a: &[C64; 2]) -> f64 {
    (a[0].norm_sqr() + a[1].norm_sqr()).sqrt()
}

fn normalized_det(a: &[C64; 2], b: &[C64; 2]) -> f64 {
    det2(a, b).norm() / (norm2(a) * norm2(b))
}

impl ObstructionWitness {
    /// Re-checks the defining inequalities from the stored data alone.
    pub fn holds(&self) -> bool {
        match self {
            Self::PairwiseNonparallelTriple { vectors, .. } => {
                let [a, b, c] = vectors;
                [(a, b), (a, c), (b, c)]
                    .iter()
                    .all(|(x, y)| normalized_det(&x.v, &y.v) > PARALLEL_TOL)
            }
            Self::NonOrthogonalClasses { vectors, .. } => {
                let [a, b] = vectors;
                let inner = (a.v[0].conj() * b.v[0] + a.v[1].conj() * b.v[1]).norm();
                normalized_det(&a.v, &b.v) > PARALLEL_TOL && inner / (norm2(&a.v) * norm2(&b.v)) > PARALLEL_TOL
            }
            Self::WwStarOffDiagonal { n, min_off_diagonal, min_w_sq } => {
                *n >= 3 && *min_off_diagonal >= 1e-10 && *min_w_sq > Rational::from_integer(0.into())
            }
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::PairwiseNonparallelTriple { .. } => "pairwise-nonparallel-triple",
            Self::NonOrthogonalClasses { .. } => "non-orthogonal-classes",
            Self::WwStarOffDiagonal { .. } => "ww-star-offdiagonal",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TwoColumnOutcome {
    /// A 2×2 unitary leaving every block vector with at most one non-zero entry.
    Unitary(DMatrix<C64>),
    Obstruction(ObstructionWitness),
}

/// Collects the block vectors of `s` along `factor` and decides whether a
/// 2×2 unitary on the block can leave each with at most one non-zero entry.
/// That is possible iff the non-zero vectors form at most two parallel
/// classes, orthogonal to each other if there are two.
pub fn two_column_obstruction(s: &Tensor3, factor: usize, block: &[usize]) -> Result<TwoColumnOutcome> {
    if block.len() != 2 {
        return Err(Error::BlockSize(block.len()));
    }
    if factor > 2 {
        return Err(Error::Format(format!("factor must be 1, 2 or 3, got {}", factor + 1)));
    }
    let dims = s.dims();
    let block = [block[0], block[1]];
    if block[0] == block[1] || block.iter().any(|&b| b >= dims[factor]) {
        return Err(Error::Format(format!("invalid block {:?} for dimension {}", block, dims[factor])));
    }
    let others: Vec<usize> = (0..3).filter(|&l| l != factor).collect();
    let cutoff = ZERO_VECTOR_TOL * s.max_abs();
    let mut vectors = Vec::new();
    for x in 0..dims[others[0]] {
        for y in 0..dims[others[1]] {
            let at = |b: usize| {
                let mut idx = [0; 3];
                idx[factor] = b;
                idx[others[0]] = x;
                idx[others[1]] = y;
                s[idx]
            };
            let v = [at(block[0]), at(block[1])];
            if norm2(&v) > cutoff {
                vectors.push(BlockVector { position: [x, y], v });
            }
        }
    }
    // one representative per parallel class
    let mut classes: Vec<BlockVector> = Vec::new();
    for bv in vectors {
        if !classes.iter().any(|c| normalized_det(&c.v, &bv.v) <= PARALLEL_TOL) {
            classes.push(bv);
        }
    }
    let row = |v: &[C64; 2]| {
        let n = norm2(v);
        [v[0].conj() / n, v[1].conj() / n]
    };
    let unitary = |r1: [C64; 2], r2: [C64; 2]| DMatrix::from_row_slice(2, 2, &[r1[0], r1[1], r2[0], r2[1]]);
    Ok(match classes.len() {
        0 => TwoColumnOutcome::Unitary(DMatrix::identity(2, 2)),
        1 => {
            let r = &classes[0].v;
            let perp = [-r[1].conj(), r[0].conj()];
            TwoColumnOutcome::Unitary(unitary(row(r), row(&perp)))
        }
        2 => {
            let (a, b) = (&classes[0].v, &classes[1].v);
            let inner = (a[0].conj() * b[0] + a[1].conj() * b[1]).norm() / (norm2(a) * norm2(b));
            if inner <= PARALLEL_TOL {
                TwoColumnOutcome::Unitary(unitary(row(a), row(b)))
            } else {
                TwoColumnOutcome::Obstruction(ObstructionWitness::NonOrthogonalClasses {
                    factor,
                    block,
                    vectors: [classes[0].clone(), classes[1].clone()],
                    normalized_inner: inner,
                })
            }
        }
        _ => {
            let vs = [classes[0].clone(), classes[1].clone(), classes[2].clone()];
            let normalized_dets = [
                normalized_det(&vs[0].v, &vs[1].v),
                normalized_det(&vs[0].v, &vs[2].v),
                normalized_det(&vs[1].v, &vs[2].v),
            ];
            TwoColumnOutcome::Obstruction(ObstructionWitness::PairwiseNonparallelTriple {
                factor,
                block,
                vectors: vs,
                normalized_dets,
            })
        }
    })
}

/// Outcome of one stage of a certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct Stage {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NonFreenessReport {
    pub input: String,
    /// The Ness-minimal representative the certificate is about.
    pub tensor: Tensor3,
    pub ness: NessCertificate,
    pub blocks: StabilizerBlocks,
    pub expected_blocks: StabilizerBlocks,
    pub obstruction: Option<ObstructionWitness>,
    pub stages: Vec<Stage>,
    pub verdict: bool,
}

impl NonFreenessReport {
    pub fn failed_stages(&self) -> Vec<&'static str> {
        self.stages.iter().filter(|s| !s.passed).map(|s| s.name).collect()
    }

    fn finish(mut self) -> Self {
        self.verdict = self.stages.iter().all(|s| s.passed);
        self
    }
}

fn max_diag_deviation(mu: &HermTriple, want: &[Vec<f64>; 3]) -> Result<f64> {
    let off = mu.max_off_diagonal();
    let d = mu.diagonals();
    let diag = (0..3)
        .flat_map(|l| d[l].iter().zip(&want[l]).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max);
    Ok(diag.max(off))
}

/// Certificate for `T^W`: `μ(T^W) = q` with Ness residual within `tol`, the
/// exact block pattern of `q`, and the `WW*` obstruction.
pub fn certify_family(n: usize, tol: f64) -> Result<NonFreenessReport> {
    if n < 3 {
        return Err(Error::InvalidSize { n, min: 3 });
    }
    let data = family_data(n)?;
    let ft = build_family_tensor(n)?;
    certify_family_tensor(&ft, &data, tol)
}

fn certify_family_tensor(ft: &FamilyTensor, data: &crate::family::FamilyData, tol: f64) -> Result<NonFreenessReport> {
    let n = ft.n;
    let verification = verify_family_tensor(ft, data)?;
    let ness = ness_minimality(&ft.tensor, tol)?;
    let norm_q = to_f64(&data.norm_q_sq());
    let mut stages = vec![Stage {
        name: "moment-map",
        passed: verification.mu_residual <= tol,
        detail: format!("|mu(T^W) - diag(q)| = {:e}", verification.mu_residual),
    }];
    stages.push(Stage {
        name: "ness",
        passed: ness.residual <= tol && (ness.lambda - norm_q).abs() <= tol,
        detail: format!("lambda = {}, |q|^2 = {}, residual = {:e}", ness.lambda, norm_q, ness.residual),
    });

    let expected = StabilizerBlocks::family_pattern(n);
    let exact = StabilizerBlocks::from_rationals(&data.q);
    let numeric = StabilizerBlocks::from_diagonal(&ness.mu);
    let numeric_ok = numeric.as_ref().is_ok_and(|b| *b == expected);
    stages.push(Stage {
        name: "blocks",
        passed: exact == expected && numeric_ok,
        detail: format!("exact blocks of q match: {}, clustered blocks of mu match: {}", exact == expected, numeric_ok),
    });

    let ww = &ft.w.entries * ft.w.entries.adjoint();
    let mut min_off = f64::INFINITY;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                min_off = min_off.min(ww[(r, c)].norm());
            }
        }
    }
    let min_w_sq = data.w_sq.iter().min().expect("n >= 3").clone();
    let witness = ObstructionWitness::WwStarOffDiagonal {
        n,
        min_off_diagonal: min_off,
        min_w_sq,
    };
    stages.push(Stage {
        name: "obstruction",
        passed: witness.holds(),
        detail: format!("min off-diagonal |WW*| = {min_off:e}"),
    });

    Ok(NonFreenessReport {
        input: format!("family n={n}"),
        tensor: ft.tensor.clone(),
        ness,
        blocks: numeric.unwrap_or_else(|_| StabilizerBlocks::from_rationals(&data.q)),
        expected_blocks: expected,
        obstruction: Some(witness),
        stages,
        verdict: false,
    }
    .finish())
}

/// The two 3×3×3 examples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Named {
    T2,
    T5,
}

impl std::str::FromStr for Named {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "T2" | "t2" => Ok(Named::T2),
            "T5" | "t5" => Ok(Named::T5),
            other => Err(Error::Format(format!("unknown named tensor {other:?}; expected T2 or T5"))),
        }
    }
}

/// `‖μ(limit)‖` must reach `‖μ(S5)‖` within this along the flow from `T5`.
pub const T5_FLOW_TOL: f64 = 1e-6;

fn mu_rows(m: &[[f64; 3]; 3]) -> [Vec<f64>; 3] {
    m.map(|r| r.to_vec())
}

fn two_by_one_obstruction_stage(s: &Tensor3) -> Result<(Stage, Option<ObstructionWitness>)> {
    let outcome = two_column_obstruction(s, 2, &[0, 1])?;
    Ok(match outcome {
        TwoColumnOutcome::Obstruction(w) => (
            Stage {
                name: "obstruction",
                passed: w.holds() && matches!(w, ObstructionWitness::PairwiseNonparallelTriple { .. }),
                detail: format!("factor 3, block {{1,2}}: {}", w.kind()),
            },
            Some(w),
        ),
        TwoColumnOutcome::Unitary(_) => (
            Stage {
                name: "obstruction",
                passed: false,
                detail: "factor 3, block {1,2}: a unitary witness exists".into(),
            },
            None,
        ),
    })
}

fn certify_minimal_point(
    input: String,
    s: &Tensor3,
    expected_mu: &[Vec<f64>; 3],
    expected_lambda: f64,
    tol: f64,
    mut stages: Vec<Stage>,
) -> Result<NonFreenessReport> {
    let ness = ness_minimality(s, tol)?;
    let mu_dev = max_diag_deviation(&ness.mu, expected_mu)?;
    stages.push(Stage {
        name: "moment-map",
        passed: mu_dev <= tol,
        detail: format!("max entry deviation from the expected diagonal = {mu_dev:e}"),
    });
    stages.push(Stage {
        name: "ness",
        passed: ness.residual <= tol && (ness.lambda - expected_lambda).abs() <= tol,
        detail: format!("lambda = {}, expected {}, residual = {:e}", ness.lambda, expected_lambda, ness.residual),
    });
    let expected_blocks = StabilizerBlocks::from_values(&[&expected_mu[0], &expected_mu[1], &expected_mu[2]]);
    let blocks = StabilizerBlocks::from_diagonal(&ness.mu);
    let blocks_ok = blocks.as_ref().is_ok_and(|b| *b == expected_blocks);
    stages.push(Stage {
        name: "blocks",
        passed: blocks_ok,
        detail: match &blocks {
            Ok(b) => format!("{}", b),
            Err(e) => e.to_string(),
        },
    });
    let (stage, obstruction) = two_by_one_obstruction_stage(s)?;
    stages.push(stage);
    Ok(NonFreenessReport {
        input,
        tensor: s.clone(),
        ness,
        blocks: blocks.unwrap_or_else(|_| expected_blocks.clone()),
        expected_blocks,
        obstruction,
        stages,
        verdict: false,
    }
    .finish())
}

/// `T2` through the stored `g`; see [`certify_t2_with`].
pub fn certify_named(which: Named, tol: f64) -> Result<NonFreenessReport> {
    match which {
        Named::T2 => certify_t2_with(&named::t2_to_s2(), tol),
        Named::T5 => certify_t5(tol, &FlowConfig::default()),
    }
}

/// Certifies `T2` using `g · T2` as the Ness-minimal point.
pub fn certify_t2_with(g: &GroupTriple, tol: f64) -> Result<NonFreenessReport> {
    let s = apply(g, &named::t2())?;
    let dev = s.distance(&named::s2())?;
    let max_dev = s
        .iter()
        .zip(named::s2().iter())
        .map(|((_, a), (_, b))| (a - b).norm())
        .fold(0.0, f64::max);
    let stages = vec![Stage {
        name: "transport",
        passed: max_dev <= tol,
        detail: format!("max |(g.T2 - S2)_ijk| = {max_dev:e}, |g.T2 - S2| = {dev:e}"),
    }];
    certify_minimal_point("T2".into(), &s, &mu_rows(&named::MU_S2), 43.0 / 42.0, tol, stages)
}

/// Certifies `T5`: `S5` is checked directly and the flow from `T5` must
/// reach `‖μ(S5)‖`, which places `S5`'s moment data in the closure of the orbit.
pub fn certify_t5(tol: f64, config: &FlowConfig) -> Result<NonFreenessReport> {
    let s5 = named::s5();
    let target = moment_map(&s5)?.norm();
    let r = flow(&named::t5(), config)?;
    let reached = *r.mu_norm_trajectory.last().expect("trajectory is non-empty");
    let gap = (reached - target).abs();
    let stages = vec![Stage {
        name: "flow",
        passed: gap <= T5_FLOW_TOL,
        detail: format!(
            "|mu| of the flow limit = {reached}, |mu(S5)| = {target}, gap = {gap:e}, steps = {}",
            r.steps
        ),
    }];
    certify_minimal_point("T5".into(), &s5, &mu_rows(&named::MU_S5), 16.0 / 15.0, tol, stages)
}

/// Spot check of the `WW*` obstruction: for `samples` random unitaries `u`,
/// every `W uᵀ` has a row with two entries above `1e-8`. Returns the number
/// of samples for which this holds.
pub fn ww_star_spot_check<R: Rng + ?Sized>(w: &DMatrix<C64>, samples: usize, rng: &mut R) -> usize {
    let m = w.ncols();
    (0..samples)
        .filter(|_| {
            let u = random_unitary(rng, m);
            let wu = w * u.transpose();
            (0..wu.nrows()).any(|r| (0..m).filter(|&c| wu[(r, c)].norm() > 1e-8).count() >= 2)
        })
        .count()
}
