//! Constructive equivalence of generic tensors supported on `Γn` with `S0`.

use nalgebra::{DMatrix, DVector};

use crate::construction::s0_tensor;
use crate::error::{Error, Result};
use crate::family::gamma_support;
use crate::tensor::{apply, support, GroupTriple, Tensor3, C64};

/// Relative cutoff for a vanishing `a`-entry.
const A_CUTOFF: f64 = 1e-12;
/// Relative `σ_min/σ_max` below which an `(n−1)`-row subset of `W` is singular.
const ROW_SUBSET_CUTOFF: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionResult {
    pub g: GroupTriple,
    /// `‖g · S − S0‖`.
    pub residual: f64,
    pub log: Vec<String>,
}

fn check_cube(s: &Tensor3) -> Result<usize> {
    let [n1, n2, n3] = s.dims();
    if n1 != n2 || n2 != n3 {
        return Err(Error::DimensionMismatch(format!("expected n x n x n, got {:?}", s.dims())));
    }
    if n1 < 2 {
        return Err(Error::InvalidSize { n: n1, min: 2 });
    }
    Ok(n1)
}

/// `W[i, k] = S[n−1−i, i, k]` (`k < n−1`) and `a[i] = S[n−2−i, i, n−1]`.
pub fn extract_wa(s: &Tensor3) -> Result<(DMatrix<C64>, Vec<C64>)> {
    let n = check_cube(s)?;
    let gamma = gamma_support(n)?;
    if let Some(idx) = support(s, 1e-12).iter().find(|idx| !gamma.contains(idx)) {
        return Err(Error::SupportEscapesGamma(*idx));
    }
    let w = DMatrix::from_fn(n, n - 1, |i, k| s[[n - 1 - i, i, k]]);
    let a = (0..n - 1).map(|i| s[[n - 2 - i, i, n - 1]]).collect();
    Ok((w, a))
}

fn diag(v: &[C64]) -> DMatrix<C64> {
    DMatrix::from_diagonal(&DVector::from_column_slice(v))
}

fn without_row(w: &DMatrix<C64>, row: usize) -> DMatrix<C64> {
    w.clone().remove_row(row)
}

/// Returns `g` with `g · S = S0`.
///
/// Steps: rescale the second factor so that `a ≡ 1`; act on the third factor
/// with `Mᵀ ⊕ [1]`, `M` the inverse of the top `(n−1)` rows of `W`, which
/// sends `W` to `WM = [I; λ]`; divide the third-factor columns by `λ`; then
/// fix the remaining entries with a diagonal triple obtained from a
/// log-linear solve over the support of `S0`.
pub fn reduce_to_s0(s: &Tensor3, tol: f64) -> Result<ReductionResult> {
    let n = check_cube(s)?;
    let (w, a) = extract_wa(s)?;
    let scale = s.max_abs();
    let mut log = Vec::new();

    for (i, ai) in a.iter().enumerate() {
        if ai.norm() <= A_CUTOFF * scale {
            return Err(Error::ZeroAEntry(i));
        }
    }
    for row in 0..n {
        let sv = without_row(&w, row).singular_values();
        let (max, min) = (sv.max(), sv.min());
        let ratio = if max > 0.0 { min / max } else { 0.0 };
        if ratio <= ROW_SUBSET_CUTOFF {
            return Err(Error::RankDeficient(row, ratio));
        }
    }

    let one = C64::new(1.0, 0.0);
    let id = DMatrix::<C64>::identity(n, n);

    // (1) second factor: index i < n−1 scaled by 1/a_i
    let mut b1 = vec![one; n];
    for i in 0..n - 1 {
        b1[i] = one / a[i];
    }
    let b1 = diag(&b1);
    log.push("second factor: diag(1/a_1, ..., 1/a_{n-1}, 1)".to_string());
    let w1 = DMatrix::from_fn(n, n - 1, |i, k| w[(i, k)] * b1[(i, i)]);

    // (2) third factor: M^T ⊕ [1]
    let top = w1.rows(0, n - 1).into_owned();
    let m = top.try_inverse().ok_or(Error::RankDeficient(n - 1, 0.0))?;
    let mut c2 = id.clone();
    c2.view_mut((0, 0), (n - 1, n - 1)).copy_from(&m.transpose());
    let wm = &w1 * &m;
    let lambdas: Vec<C64> = (0..n - 1).map(|k| wm[(n - 1, k)]).collect();
    log.push("third factor: M^T + [1], M = (top n-1 rows of W)^-1".to_string());

    // (3) third factor: columns divided by λ_j
    let mut c3 = vec![one; n];
    for (k, l) in lambdas.iter().enumerate() {
        c3[k] = one / l;
    }
    let c3 = diag(&c3);
    log.push("third factor: diag(1/lambda_1, ..., 1/lambda_{n-1}, 1)".to_string());

    let partial = GroupTriple::new(id.clone(), b1.clone(), &c3 * &c2)?;
    let cur = apply(&partial, s)?;

    // (4) x_i + y_j + z_k = −log cur[i,j,k] on supp(S0)
    let target = s0_tensor(n)?;
    let rows: Vec<[usize; 3]> = support(&target, 0.0).iter().copied().collect();
    let mut inc = DMatrix::<f64>::zeros(rows.len(), 3 * n);
    let mut re = DVector::<f64>::zeros(rows.len());
    let mut im = DVector::<f64>::zeros(rows.len());
    for (r, idx) in rows.iter().enumerate() {
        for l in 0..3 {
            inc[(r, l * n + idx[l])] = 1.0;
        }
        let v = cur[*idx];
        if v.norm() == 0.0 {
            return Err(Error::InconsistentScaling(f64::INFINITY));
        }
        let lv = v.ln();
        re[r] = -lv.re;
        im[r] = -lv.im;
    }
    let svd = inc.svd(true, true);
    let xr = svd.solve(&re, 1e-12).map_err(|e| Error::Format(e.to_string()))?;
    let xi = svd.solve(&im, 1e-12).map_err(|e| Error::Format(e.to_string()))?;
    let factor = |l: usize| -> Vec<C64> {
        (0..n).map(|i| C64::new(xr[l * n + i], xi[l * n + i]).exp()).collect()
    };
    let (d1, d2, d3) = (diag(&factor(0)), diag(&factor(1)), diag(&factor(2)));
    log.push("diagonal triple from the log-linear solve on supp(S0)".to_string());

    let g = GroupTriple::new(d1, &d2 * &b1, &d3 * &c3 * &c2)?;
    let residual = apply(&g, s)?.distance(&target)?;
    if residual > tol {
        return Err(Error::InconsistentScaling(residual));
    }
    Ok(ReductionResult { g, residual, log })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::build_family_tensor;

    #[test]
    fn s0_reduces_trivially() {
        for n in 2..6 {
            let s0 = s0_tensor(n).unwrap();
            let r = reduce_to_s0(&s0, 1e-12).unwrap();
            assert!(r.residual < 1e-14);
            for l in 0..3 {
                let d = r.g.matrix(l) - DMatrix::<C64>::identity(n, n);
                assert!(d.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn extract_inverts_constructor() {
        let ft = build_family_tensor(4).unwrap();
        let (w, a) = extract_wa(&ft.tensor).unwrap();
        assert_eq!(w, ft.w.entries);
        assert_eq!(a.iter().map(|x| x.re).collect::<Vec<_>>(), ft.a);
    }

    #[test]
    fn family_tensor_reduces() {
        for n in 3..7 {
            let ft = build_family_tensor(n).unwrap();
            let r = reduce_to_s0(&ft.tensor, 1e-8).unwrap();
            assert!(r.residual <= 1e-8, "n = {n}: {}", r.residual);
        }
    }

    #[test]
    fn escaping_support_is_rejected() {
        let mut t = s0_tensor(3).unwrap();
        t[[0, 0, 0]] = C64::new(1.0, 0.0);
        assert_eq!(extract_wa(&t), Err(Error::SupportEscapesGamma([0, 0, 0])));
    }

    #[test]
    fn vanishing_a_is_rejected() {
        let mut t = s0_tensor(3).unwrap();
        t[[1, 0, 2]] = C64::new(0.0, 0.0);
        assert_eq!(reduce_to_s0(&t, 1e-8).unwrap_err(), Error::ZeroAEntry(0));
    }

    #[test]
    fn dependent_rows_are_rejected() {
        let mut t = s0_tensor(3).unwrap();
        // last row of W becomes (1, 0), parallel to the first row
        t[[0, 2, 1]] = C64::new(0.0, 0.0);
        assert!(matches!(reduce_to_s0(&t, 1e-8), Err(Error::RankDeficient(..))));
    }
}
