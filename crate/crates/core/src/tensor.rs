//! Dense complex order-3 tensors, the `GL × GL × GL` action, flattenings and
//! supports.

use std::collections::BTreeSet;
use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;
pub use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// A 0-based multi-index `(i, j, k)`.
pub type Index3 = [usize; 3];

/// Relative singular-value cutoff used for numerical ranks.
pub const RANK_CUTOFF: f64 = 1e-8;

/// Default relative tolerance for support extraction.
pub const SUPPORT_TOL: f64 = 1e-9;

const INVERTIBLE_CUTOFF: f64 = 1e-12;
const UNITARY_TOL: f64 = 1e-12;

/// Dense tensor in `C^{n1} ⊗ C^{n2} ⊗ C^{n3}`, stored with `k` fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor3 {
    dims: [usize; 3],
    data: Vec<C64>,
}

impl Tensor3 {
    pub fn zeros(dims: [usize; 3]) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::EmptyDimension(dims));
        }
        Ok(Self {
            dims,
            data: vec![C64::new(0.0, 0.0); dims[0] * dims[1] * dims[2]],
        })
    }

    pub fn from_fn(dims: [usize; 3], mut f: impl FnMut(Index3) -> C64) -> Result<Self> {
        let mut t = Self::zeros(dims)?;
        for i in 0..dims[0] {
            for j in 0..dims[1] {
                for k in 0..dims[2] {
                    t[[i, j, k]] = f([i, j, k]);
                }
            }
        }
        t.check_finite()?;
        Ok(t)
    }

    /// Builds a tensor from sparse 0-based entries; omitted entries are zero.
    pub fn from_entries(
        dims: [usize; 3],
        entries: impl IntoIterator<Item = (Index3, C64)>,
    ) -> Result<Self> {
        let mut t = Self::zeros(dims)?;
        let mut seen = BTreeSet::new();
        for (idx, v) in entries {
            if (0..3).any(|l| idx[l] >= dims[l]) {
                return Err(Error::IndexOutOfRange { index: idx, dims });
            }
            if !seen.insert(idx) {
                return Err(Error::DuplicateEntry(idx));
            }
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFinite(idx));
            }
            t[idx] = v;
        }
        Ok(t)
    }

    /// Same as [`Tensor3::from_entries`] with real coefficients.
    pub fn from_real_entries(
        dims: [usize; 3],
        entries: impl IntoIterator<Item = (Index3, f64)>,
    ) -> Result<Self> {
        Self::from_entries(dims, entries.into_iter().map(|(i, v)| (i, C64::new(v, 0.0))))
    }

    /// The standard basis tensor `e_i ⊗ e_j ⊗ e_k`.
    pub fn basis(dims: [usize; 3], idx: Index3) -> Result<Self> {
        Self::from_real_entries(dims, [(idx, 1.0)])
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    fn offset(&self, idx: Index3) -> usize {
        debug_assert!((0..3).all(|l| idx[l] < self.dims[l]));
        (idx[0] * self.dims[1] + idx[1]) * self.dims[2] + idx[2]
    }

    fn check_finite(&self) -> Result<()> {
        match self.iter().find(|(_, v)| !v.re.is_finite() || !v.im.is_finite()) {
            Some((idx, _)) => Err(Error::NonFinite(idx)),
            None => Ok(()),
        }
    }

    /// All entries in row-major order together with their 0-based indices.
    pub fn iter(&self) -> impl Iterator<Item = (Index3, C64)> + '_ {
        let [_, n2, n3] = self.dims;
        self.data.iter().enumerate().map(move |(off, &v)| {
            let k = off % n3;
            let j = (off / n3) % n2;
            let i = off / (n2 * n3);
            ([i, j, k], v)
        })
    }

    /// Entries that are exactly non-zero.
    pub fn nonzeros(&self) -> impl Iterator<Item = (Index3, C64)> + '_ {
        self.iter().filter(|(_, v)| *v != C64::new(0.0, 0.0))
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| *v == C64::new(0.0, 0.0))
    }

    /// Sesquilinear inner product `⟨self, other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Tensor3) -> Result<C64> {
        self.same_dims(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Frobenius distance `‖self − other‖`.
    pub fn distance(&self, other: &Tensor3) -> Result<f64> {
        self.same_dims(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    pub fn scaled(&self, s: C64) -> Tensor3 {
        Tensor3 {
            dims: self.dims,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    /// `self ← self + a·x`.
    pub fn axpy(&mut self, a: C64, x: &Tensor3) -> Result<()> {
        self.same_dims(x)?;
        for (s, v) in self.data.iter_mut().zip(&x.data) {
            *s += a * v;
        }
        Ok(())
    }

    pub fn normalized(&self) -> Result<Tensor3> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroTensor);
        }
        Ok(self.scaled(C64::new(1.0 / n, 0.0)))
    }

    fn same_dims(&self, other: &Tensor3) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch(format!(
                "{:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        Ok(())
    }
}

impl Index<Index3> for Tensor3 {
    type Output = C64;

    fn index(&self, idx: Index3) -> &C64 {
        &self.data[self.offset(idx)]
    }
}

impl IndexMut<Index3> for Tensor3 {
    fn index_mut(&mut self, idx: Index3) -> &mut C64 {
        let off = self.offset(idx);
        &mut self.data[off]
    }
}

/// Acts with `m` on one tensor factor: `(I ⊗ … ⊗ m ⊗ … ⊗ I) T`.
pub fn mode_product(t: &Tensor3, factor: usize, m: &DMatrix<C64>) -> Result<Tensor3> {
    assert!(factor < 3, "factor index {factor} out of range");
    let dims = t.dims();
    let n = dims[factor];
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "factor {} has dimension {n}, matrix is {}x{}",
            factor + 1,
            m.nrows(),
            m.ncols()
        )));
    }
    let mut out = Tensor3::zeros(dims)?;
    for (idx, v) in t.nonzeros() {
        for r in 0..n {
            let c = m[(r, idx[factor])];
            if c != C64::new(0.0, 0.0) {
                let mut target = idx;
                target[factor] = r;
                out[target] += c * v;
            }
        }
    }
    Ok(out)
}

/// Factor-`factor` flattening: row `r` is the vectorized `r`-th slice along
/// that factor, the remaining two indices in lexicographic order.
pub fn flattening(t: &Tensor3, factor: usize) -> DMatrix<C64> {
    assert!(factor < 3, "factor index {factor} out of range");
    let dims = t.dims();
    let (a, b) = match factor {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    let mut m = DMatrix::from_element(dims[factor], dims[a] * dims[b], C64::new(0.0, 0.0));
    for (idx, v) in t.iter() {
        m[(idx[factor], idx[a] * dims[b] + idx[b])] = v;
    }
    m
}

/// Number of singular values above `rel_cutoff · σ_max`.
pub fn numerical_rank(m: &DMatrix<C64>, rel_cutoff: f64) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_cutoff * max).count()
}

/// Numerical ranks of the three flattenings at [`RANK_CUTOFF`].
pub fn flattening_ranks(t: &Tensor3) -> [usize; 3] {
    [0, 1, 2].map(|l| numerical_rank(&flattening(t, l), RANK_CUTOFF))
}

/// All three flattenings have full numerical rank.
pub fn is_concise(t: &Tensor3) -> bool {
    flattening_ranks(t) == t.dims()
}

/// Index triples with `|T_ijk| > tol · max |T|`.
pub fn support(t: &Tensor3, tol: f64) -> SupportSet {
    let cutoff = tol * t.max_abs();
    SupportSet {
        dims: t.dims(),
        triples: t
            .iter()
            .filter(|(_, v)| v.norm() > cutoff)
            .map(|(idx, _)| idx)
            .collect(),
    }
}

/// A set of 0-based index triples inside `[n1] × [n2] × [n3]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SupportSet {
    dims: [usize; 3],
    triples: BTreeSet<Index3>,
}

impl SupportSet {
    pub fn empty(dims: [usize; 3]) -> Self {
        Self {
            dims,
            triples: BTreeSet::new(),
        }
    }

    pub fn new(dims: [usize; 3], triples: impl IntoIterator<Item = Index3>) -> Result<Self> {
        let mut s = Self::empty(dims);
        for t in triples {
            s.insert(t)?;
        }
        Ok(s)
    }

    pub fn insert(&mut self, idx: Index3) -> Result<bool> {
        if (0..3).any(|l| idx[l] >= self.dims[l]) {
            return Err(Error::IndexOutOfRange {
                index: idx,
                dims: self.dims,
            });
        }
        Ok(self.triples.insert(idx))
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn contains(&self, idx: &Index3) -> bool {
        self.triples.contains(idx)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Index3> + '_ {
        self.triples.iter()
    }

    pub fn triples(&self) -> &BTreeSet<Index3> {
        &self.triples
    }

    pub fn is_subset(&self, other: &SupportSet) -> bool {
        self.triples.is_subset(&other.triples)
    }

    /// Applies independent coordinate permutations `idx ↦ (σ(i), τ(j), ρ(k))`.
    pub fn permuted(&self, perms: &[Vec<usize>; 3]) -> Result<SupportSet> {
        SupportSet::new(
            self.dims,
            self.triples
                .iter()
                .map(|t| [perms[0][t[0]], perms[1][t[1]], perms[2][t[2]]]),
        )
    }
}

fn check_square(m: &DMatrix<C64>, slot: usize) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "matrix {} is {}x{}",
            slot + 1,
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// A triple `(A, B, C)` of invertible matrices acting factor-wise.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupTriple {
    mats: [DMatrix<C64>; 3],
}

impl GroupTriple {
    pub fn new(a: DMatrix<C64>, b: DMatrix<C64>, c: DMatrix<C64>) -> Result<Self> {
        let mats = [a, b, c];
        for (slot, m) in mats.iter().enumerate() {
            check_square(m, slot)?;
            let sv = m.clone().svd(false, false).singular_values;
            let max = sv.iter().cloned().fold(0.0, f64::max);
            let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
            if !(max > 0.0 && min > INVERTIBLE_CUTOFF * max) {
                return Err(Error::NotInvertible(slot + 1));
            }
        }
        Ok(Self { mats })
    }

    pub fn identity(dims: [usize; 3]) -> Self {
        Self {
            mats: dims.map(|n| DMatrix::identity(n, n)),
        }
    }

    /// Diagonal triple built from the three diagonals.
    pub fn diagonal(diags: [&[C64]; 3]) -> Result<Self> {
        let [a, b, c] = diags.map(|d| DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(d)));
        Self::new(a, b, c)
    }

    pub fn dims(&self) -> [usize; 3] {
        [0, 1, 2].map(|l| self.mats[l].nrows())
    }

    pub fn matrix(&self, factor: usize) -> &DMatrix<C64> {
        &self.mats[factor]
    }

    pub fn matrices(&self) -> &[DMatrix<C64>; 3] {
        &self.mats
    }

    /// Factor-wise product `self · other`, i.e. apply `other` first.
    pub fn compose(&self, other: &GroupTriple) -> Result<GroupTriple> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch(format!(
                "{:?} vs {:?}",
                self.dims(),
                other.dims()
            )));
        }
        Ok(GroupTriple {
            mats: [0, 1, 2].map(|l| &self.mats[l] * &other.mats[l]),
        })
    }
}

/// A triple of unitary matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryTriple(GroupTriple);

impl UnitaryTriple {
    pub fn new(a: DMatrix<C64>, b: DMatrix<C64>, c: DMatrix<C64>) -> Result<Self> {
        let mats = [a, b, c];
        for (slot, m) in mats.iter().enumerate() {
            check_square(m, slot)?;
            let dev = (m.adjoint() * m - DMatrix::<C64>::identity(m.nrows(), m.ncols())).norm();
            if dev > UNITARY_TOL {
                return Err(Error::NotUnitary(slot + 1, dev));
            }
        }
        let [a, b, c] = mats;
        Ok(UnitaryTriple(GroupTriple { mats: [a, b, c] }))
    }

    pub fn identity(dims: [usize; 3]) -> Self {
        UnitaryTriple(GroupTriple::identity(dims))
    }

    /// Local permutation triple sending `e_i ↦ e_{σ(i)}` on each factor.
    pub fn permutation(perms: &[Vec<usize>; 3]) -> Result<Self> {
        let [a, b, c] = [0, 1, 2].map(|l| {
            let p = &perms[l];
            DMatrix::from_fn(p.len(), p.len(), |r, col| {
                if p[col] == r {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            })
        });
        Self::new(a, b, c)
    }

    pub fn as_group(&self) -> &GroupTriple {
        &self.0
    }

    pub fn matrix(&self, factor: usize) -> &DMatrix<C64> {
        self.0.matrix(factor)
    }
}

/// `(A, B, C) · T = (A ⊗ B ⊗ C) T`.
pub fn apply(g: &GroupTriple, t: &Tensor3) -> Result<Tensor3> {
    if g.dims() != t.dims() {
        return Err(Error::DimensionMismatch(format!(
            "group triple {:?} vs tensor {:?}",
            g.dims(),
            t.dims()
        )));
    }
    let t = mode_product(t, 0, g.matrix(0))?;
    let t = mode_product(&t, 1, g.matrix(1))?;
    mode_product(&t, 2, g.matrix(2))
}
