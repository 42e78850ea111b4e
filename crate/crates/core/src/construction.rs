//! The matrices `W ∈ 𝒲n`, the family tensor `T^W` and the 0/1 tensor `S0`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::family::{family_data, to_f64, to_f64_vec, FamilyData, Rational};
use crate::moment::{moment_map, HermTriple};
use crate::tensor::{Tensor3, C64};

/// Tolerance for the defining equations of `𝒲n` and for `μ(T^W) = q`.
pub const FAMILY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct WMatrix {
    pub n: usize,
    /// `n × (n−1)`.
    pub entries: DMatrix<C64>,
    pub lambda_w: Rational,
    pub w: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyTensor {
    pub n: usize,
    pub w: WMatrix,
    pub a: Vec<f64>,
    pub tensor: Tensor3,
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `W = √λ [H e1 | … | H e(n−1)]` where the Householder reflection `H` maps
/// `w/‖w‖` to `en`, so the columns are an orthonormal basis of `w⊥`.
pub fn build_w(n: usize) -> Result<WMatrix> {
    if n < 3 {
        return Err(Error::InvalidSize { n, min: 3 });
    }
    let data = family_data(n)?;
    Ok(build_w_from(&data))
}

fn build_w_from(data: &FamilyData) -> WMatrix {
    let n = data.n;
    let w: Vec<f64> = to_f64_vec(&data.w_sq).into_iter().map(f64::sqrt).collect();
    let wv = DVector::from_vec(w.clone());
    let v = &wv / wv.norm();
    let mut u = v.clone();
    u[n - 1] -= 1.0;
    let uu = u.norm_squared();
    let h = if uu < 1e-30 {
        DMatrix::identity(n, n)
    } else {
        DMatrix::identity(n, n) - &u * u.transpose() * (2.0 / uu)
    };
    let scale = to_f64(&data.lambda_w).sqrt();
    let entries = DMatrix::from_fn(n, n - 1, |r, c| real(scale * h[(r, c)]));
    WMatrix {
        n,
        entries,
        lambda_w: data.lambda_w.clone(),
        w,
    }
}

/// `(‖W*W − λI‖, ‖WW* − (λI − ww*)‖)`, Frobenius norms.
pub fn wmatrix_residuals(m: &DMatrix<C64>, lambda: f64, w: &[f64]) -> (f64, f64) {
    let n = m.nrows();
    let gram = m.adjoint() * m;
    let r1 = (gram - DMatrix::<C64>::identity(n - 1, n - 1) * real(lambda)).norm();
    let target = DMatrix::from_fn(n, n, |r, c| {
        let diag = if r == c { lambda } else { 0.0 };
        real(diag - w[r] * w[c])
    });
    let r2 = (m * m.adjoint() - target).norm();
    (r1, r2)
}

/// Whether an `n × (n−1)` matrix satisfies both `𝒲n` equations within `tol`.
pub fn wmatrix_membership(m: &DMatrix<C64>, tol: f64) -> bool {
    let n = m.nrows();
    if n < 3 || m.ncols() != n - 1 {
        return false;
    }
    let Ok(data) = family_data(n) else {
        return false;
    };
    let w: Vec<f64> = to_f64_vec(&data.w_sq).into_iter().map(f64::sqrt).collect();
    let (r1, r2) = wmatrix_residuals(m, to_f64(&data.lambda_w), &w);
    r1 <= tol && r2 <= tol
}

/// `T^{W,a}`: `T[n−1−i, i, k] = W[i, k]` for `k < n−1` and `T[n−2−i, i, n−1] = a[i]`.
pub fn tensor_from_wa(w: &DMatrix<C64>, a: &[C64]) -> Result<Tensor3> {
    let n = w.nrows();
    if n < 2 || w.ncols() != n - 1 || a.len() != n - 1 {
        return Err(Error::DimensionMismatch(format!(
            "W is {}x{} and a has length {}; need n x (n-1) and n-1",
            w.nrows(),
            w.ncols(),
            a.len()
        )));
    }
    let mut t = Tensor3::zeros([n, n, n])?;
    for i in 0..n {
        for k in 0..n - 1 {
            t[[n - 1 - i, i, k]] = w[(i, k)];
        }
    }
    for i in 0..n - 1 {
        t[[n - 2 - i, i, n - 1]] = a[i];
    }
    Ok(t)
}

pub fn build_family_tensor(n: usize) -> Result<FamilyTensor> {
    let w = build_w(n)?;
    let data = family_data(n)?;
    let a: Vec<f64> = data.b[..n - 1].iter().map(|b| to_f64(b).sqrt()).collect();
    let ac: Vec<C64> = a.iter().map(|&x| real(x)).collect();
    let tensor = tensor_from_wa(&w.entries, &ac)?;
    Ok(FamilyTensor { n, w, a, tensor })
}

/// The 0/1 tensor with `W = [I; 1 … 1]` and `a = 1`.
pub fn s0_tensor(n: usize) -> Result<Tensor3> {
    if n < 2 {
        return Err(Error::InvalidSize { n, min: 2 });
    }
    let w = DMatrix::from_fn(n, n - 1, |r, c| if r == n - 1 || r == c { real(1.0) } else { real(0.0) });
    tensor_from_wa(&w, &vec![real(1.0); n - 1])
}

/// Numerical checks on a constructed family tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyVerification {
    pub n: usize,
    pub gram_residual: f64,
    pub outer_residual: f64,
    pub norm_deviation: f64,
    pub mu_residual: f64,
    pub flattening_ranks: [usize; 3],
    pub support_in_gamma: bool,
    pub ok: bool,
}

pub fn verify_family_tensor(ft: &FamilyTensor, data: &FamilyData) -> Result<FamilyVerification> {
    let n = ft.n;
    let (gram_residual, outer_residual) =
        wmatrix_residuals(&ft.w.entries, to_f64(&data.lambda_w), &ft.w.w);
    let mu = moment_map(&ft.tensor)?;
    let q = data.q_f64();
    let mu_residual = mu.distance(&HermTriple::from_diagonals([&q[0], &q[1], &q[2]]))?;
    let gamma = crate::family::gamma_support(n)?;
    let support_in_gamma = crate::tensor::support(&ft.tensor, 0.0).is_subset(&gamma);
    let flattening_ranks = crate::tensor::flattening_ranks(&ft.tensor);
    let norm_deviation = (ft.tensor.norm() - 1.0).abs();
    let ok = gram_residual <= FAMILY_TOL
        && outer_residual <= FAMILY_TOL
        && mu_residual <= FAMILY_TOL
        && norm_deviation <= 1e-12
        && support_in_gamma
        && flattening_ranks == [n, n, n];
    Ok(FamilyVerification {
        n,
        gram_residual,
        outer_residual,
        norm_deviation,
        mu_residual,
        flattening_ranks,
        support_in_gamma,
        ok,
    })
}
