//! The tensor moment map, its diagonal projection, the infinitesimal
//! (Lie algebra) action and sorted spectra.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::tensor::{flattening, mode_product, Tensor3, UnitaryTriple, C64};

const HERMITIAN_TOL: f64 = 1e-12;
const WEYL_TOL: f64 = 1e-12;

/// Triple of Hermitian matrices, one per tensor factor.
#[derive(Clone, Debug, PartialEq)]
pub struct HermTriple {
    comps: [DMatrix<C64>; 3],
}

fn hermitian_deviation(m: &DMatrix<C64>) -> f64 {
    (m - m.adjoint()).norm()
}

impl HermTriple {
    pub fn new(h1: DMatrix<C64>, h2: DMatrix<C64>, h3: DMatrix<C64>) -> Result<Self> {
        let comps = [h1, h2, h3];
        for (l, m) in comps.iter().enumerate() {
            if m.nrows() != m.ncols() {
                return Err(Error::DimensionMismatch(format!(
                    "component {} is {}x{}",
                    l + 1,
                    m.nrows(),
                    m.ncols()
                )));
            }
            let dev = hermitian_deviation(m);
            if dev > HERMITIAN_TOL {
                return Err(Error::NotHermitian(l + 1, dev));
            }
        }
        Ok(Self { comps })
    }

    /// Diagonal triple `(diag(d1), diag(d2), diag(d3))`.
    pub fn from_diagonals(diags: [&[f64]; 3]) -> Self {
        Self {
            comps: diags.map(|d| {
                DMatrix::from_fn(d.len(), d.len(), |r, c| {
                    if r == c {
                        C64::new(d[r], 0.0)
                    } else {
                        C64::new(0.0, 0.0)
                    }
                })
            }),
        }
    }

    /// `(I/n1, I/n2, I/n3)` scaled by `s`.
    pub fn scaled_identity(dims: [usize; 3], s: f64) -> Self {
        Self {
            comps: dims.map(|n| DMatrix::identity(n, n) * C64::new(s, 0.0)),
        }
    }

    pub fn dims(&self) -> [usize; 3] {
        [0, 1, 2].map(|l| self.comps[l].nrows())
    }

    pub fn component(&self, l: usize) -> &DMatrix<C64> {
        &self.comps[l]
    }

    pub fn components(&self) -> &[DMatrix<C64>; 3] {
        &self.comps
    }

    pub fn diagonals(&self) -> [Vec<f64>; 3] {
        [0, 1, 2].map(|l| (0..self.comps[l].nrows()).map(|i| self.comps[l][(i, i)].re).collect())
    }

    /// `Σ_l ‖H_l‖_F²`.
    pub fn norm_sq(&self) -> f64 {
        self.comps.iter().map(|m| m.norm_squared()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Frobenius norm of the difference, over all three components.
    pub fn distance(&self, other: &HermTriple) -> Result<f64> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch(format!(
                "{:?} vs {:?}",
                self.dims(),
                other.dims()
            )));
        }
        Ok((0..3)
            .map(|l| (&self.comps[l] - &other.comps[l]).norm_squared())
            .sum::<f64>()
            .sqrt())
    }

    /// Largest modulus of an off-diagonal entry in any component.
    pub fn max_off_diagonal(&self) -> f64 {
        let mut max: f64 = 0.0;
        for m in &self.comps {
            for r in 0..m.nrows() {
                for c in 0..m.ncols() {
                    if r != c {
                        max = max.max(m[(r, c)].norm());
                    }
                }
            }
        }
        max
    }

    /// `(A H1 A*, B H2 B*, C H3 C*)`.
    pub fn conjugated(&self, k: &UnitaryTriple) -> Result<HermTriple> {
        if k.as_group().dims() != self.dims() {
            return Err(Error::DimensionMismatch("unitary triple vs Hermitian triple".into()));
        }
        Ok(HermTriple {
            comps: [0, 1, 2].map(|l| {
                let a = k.matrix(l);
                a * &self.comps[l] * a.adjoint()
            }),
        })
    }
}

/// Eigenvalues of each component, non-increasing.
#[derive(Clone, Debug, PartialEq)]
pub struct WeylPoint {
    parts: [Vec<f64>; 3],
}

impl WeylPoint {
    /// Validates the Weyl chamber and normalization invariants.
    pub fn new(parts: [Vec<f64>; 3]) -> Result<Self> {
        for (l, p) in parts.iter().enumerate() {
            if p.is_empty() {
                return Err(Error::InvalidWeylPoint(format!("component {} is empty", l + 1)));
            }
            if p.windows(2).any(|w| w[0] < w[1]) {
                return Err(Error::InvalidWeylPoint(format!(
                    "component {} is not non-increasing",
                    l + 1
                )));
            }
            let sum: f64 = p.iter().sum();
            if (sum - 1.0).abs() > WEYL_TOL {
                return Err(Error::InvalidWeylPoint(format!(
                    "component {} sums to {sum}",
                    l + 1
                )));
            }
            if p.iter().any(|&x| x < -WEYL_TOL || !x.is_finite()) {
                return Err(Error::InvalidWeylPoint(format!(
                    "component {} has a negative entry",
                    l + 1
                )));
            }
        }
        Ok(Self { parts })
    }

    /// Sorts each component non-increasingly and validates the result.
    pub fn sorted(mut parts: [Vec<f64>; 3]) -> Result<Self> {
        for p in parts.iter_mut() {
            p.sort_by(|a, b| b.total_cmp(a));
        }
        Self::new(parts)
    }

    pub fn parts(&self) -> &[Vec<f64>; 3] {
        &self.parts
    }

    pub fn dims(&self) -> [usize; 3] {
        [0, 1, 2].map(|l| self.parts[l].len())
    }

    pub fn norm_sq(&self) -> f64 {
        self.parts.iter().flatten().map(|x| x * x).sum()
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_deviation(&self, other: &WeylPoint) -> f64 {
        if self.dims() != other.dims() {
            return f64::INFINITY;
        }
        self.parts
            .iter()
            .zip(&other.parts)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }
}

/// `μ(T)`: component `l` is the normalized Gram matrix `F_l F_l* / ‖T‖²` of
/// the factor-`l` flattening, so `μ_1(T)_{i,i'} = Σ_{j,k} T_{ijk} conj(T_{i'jk}) / ‖T‖²`.
pub fn moment_map(t: &Tensor3) -> Result<HermTriple> {
    let norm_sq = t.norm_sq();
    if norm_sq == 0.0 {
        return Err(Error::ZeroTensor);
    }
    let scale = C64::new(1.0 / norm_sq, 0.0);
    let comps = [0, 1, 2].map(|l| {
        let f = flattening(t, l);
        let g = &f * f.adjoint() * scale;
        // exact Hermitian symmetry; the diagonal is a sum of squares
        let n = g.nrows();
        DMatrix::from_fn(n, n, |r, c| {
            if r == c {
                C64::new(g[(r, r)].re, 0.0)
            } else {
                (g[(r, c)] + g[(c, r)].conj()) * 0.5
            }
        })
    });
    Ok(HermTriple { comps })
}

/// Componentwise projection onto the diagonal.
pub fn diagonal_part(m: &HermTriple) -> HermTriple {
    let d = m.diagonals();
    HermTriple::from_diagonals([&d[0], &d[1], &d[2]])
}

/// `(A, B, C) ⋆ T = (A⊗I⊗I)T + (I⊗B⊗I)T + (I⊗I⊗C)T`.
pub fn infinitesimal_action(x: &HermTriple, t: &Tensor3) -> Result<Tensor3> {
    infinitesimal_action_matrices(x.components(), t)
}

/// The infinitesimal action for arbitrary (not necessarily Hermitian) matrices.
pub fn infinitesimal_action_matrices(x: &[DMatrix<C64>; 3], t: &Tensor3) -> Result<Tensor3> {
    let mut out = mode_product(t, 0, &x[0])?;
    out.axpy(C64::new(1.0, 0.0), &mode_product(t, 1, &x[1])?)?;
    out.axpy(C64::new(1.0, 0.0), &mode_product(t, 2, &x[2])?)?;
    Ok(out)
}

/// Non-increasingly ordered spectra of the three components.
///
/// The components must be Hermitian to within `1e-10`; the validated
/// [`HermTriple`] constructor is stricter, this bound covers triples that
/// were assembled by hand.
pub fn spec_point(m: &HermTriple) -> Result<WeylPoint> {
    let mut parts: [Vec<f64>; 3] = Default::default();
    for l in 0..3 {
        let c = m.component(l);
        let dev = hermitian_deviation(c);
        if dev > 1e-10 {
            return Err(Error::NotHermitian(l + 1, dev));
        }
        let herm = (c + c.adjoint()) * C64::new(0.5, 0.0);
        let mut ev: Vec<f64> = SymmetricEigen::new(herm).eigenvalues.iter().cloned().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        parts[l] = ev;
    }
    let [p1, p2, p3] = parts;
    // spectra of arbitrary Hermitian triples need not be normalized
    Ok(WeylPoint {
        parts: [p1, p2, p3],
    })
}
