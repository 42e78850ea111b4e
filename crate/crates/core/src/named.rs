//! The two small non-free 3×3×3 tensors `T2`, `T5`, their Ness-minimal orbit
//! points `S2`, `S5`, the group element carrying `T2` to `S2`, and a tensor
//! with free support whose moment map image is `q(3)`.

use nalgebra::DMatrix;

use crate::tensor::{GroupTriple, Tensor3, C64};

/// 1-based triples with real coefficients.
fn from_one_based(entries: &[([usize; 3], f64)]) -> Tensor3 {
    Tensor3::from_real_entries(
        [3, 3, 3],
        entries.iter().map(|&([i, j, k], v)| ([i - 1, j - 1, k - 1], v)),
    )
    .expect("stored tensors are well-formed")
}

pub const T2_SUPPORT: [[usize; 3]; 6] = [[1, 2, 3], [1, 3, 2], [2, 1, 3], [2, 2, 1], [2, 2, 2], [3, 1, 1]];

pub const T5_SUPPORT: [[usize; 3]; 5] = [[1, 1, 3], [1, 3, 1], [1, 3, 2], [2, 2, 1], [3, 1, 2]];

pub fn t2() -> Tensor3 {
    from_one_based(&T2_SUPPORT.map(|t| (t, 1.0)))
}

pub fn t5() -> Tensor3 {
    from_one_based(&T5_SUPPORT.map(|t| (t, 1.0)))
}

/// `S2` coefficients: 1-based position and the value squared, with sign.
pub const S2_SQUARES: [([usize; 3], f64, f64); 7] = [
    ([1, 2, 3], 1.0, 1.0 / 7.0),
    ([1, 3, 2], 1.0, 11.0 / 42.0),
    ([2, 1, 3], 1.0, 1.0 / 7.0),
    ([2, 2, 1], 1.0, 10.0 / 77.0),
    ([2, 2, 2], 1.0, 2.0 / 33.0),
    ([3, 1, 1], 1.0, 5.0 / 22.0),
    ([3, 1, 2], -1.0, 8.0 / 231.0),
];

pub const S5_SQUARES: [([usize; 3], f64, f64); 6] = [
    ([1, 1, 3], 1.0, 1.0 / 5.0),
    ([3, 1, 2], 1.0, 7.0 / 30.0),
    ([2, 2, 1], 1.0, 2.0 / 7.0),
    ([2, 2, 2], -1.0, 1.0 / 21.0),
    ([1, 3, 1], 1.0, 4.0 / 35.0),
    ([1, 3, 2], 1.0, 5.0 / 42.0),
];

fn from_squares(data: &[([usize; 3], f64, f64)]) -> Tensor3 {
    let entries: Vec<([usize; 3], f64)> = data.iter().map(|&(t, s, sq)| (t, s * sq.sqrt())).collect();
    from_one_based(&entries)
}

pub fn s2() -> Tensor3 {
    from_squares(&S2_SQUARES)
}

pub fn s5() -> Tensor3 {
    from_squares(&S5_SQUARES)
}

fn real_matrix(rows: [[f64; 3]; 3]) -> DMatrix<C64> {
    DMatrix::from_fn(3, 3, |r, c| C64::new(rows[r][c], 0.0))
}

/// Rows of the three matrices of `g` with `g · T2 = S2`.
pub fn t2_to_s2_rows() -> [[[f64; 3]; 3]; 3] {
    let s105 = 105f64.sqrt();
    [
        [[(5.0f64 / 22.0).sqrt(), 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, (77.0f64 / 10.0).sqrt()]],
        [[(25.0f64 / 847.0).sqrt(), 0.0, 0.0], [0.0, (10.0f64 / 77.0).sqrt(), 0.0], [0.0, 0.0, 1.0]],
        [[1.0, 0.0, 0.0], [-4.0 / s105, 11.0 / s105, 0.0], [0.0, 0.0, 11.0 / 5.0]],
    ]
}

pub fn group_from_rows(rows: [[[f64; 3]; 3]; 3]) -> crate::Result<GroupTriple> {
    GroupTriple::new(real_matrix(rows[0]), real_matrix(rows[1]), real_matrix(rows[2]))
}

pub fn t2_to_s2() -> GroupTriple {
    group_from_rows(t2_to_s2_rows()).expect("stored g is invertible")
}

/// The stored `g` with the sign of the `(2,1)` entry of its third matrix
/// flipped. Used as a negative control.
pub fn corrupted_t2_to_s2() -> GroupTriple {
    let mut rows = t2_to_s2_rows();
    rows[2][1][0] = -rows[2][1][0];
    group_from_rows(rows).expect("still invertible")
}

/// Free support, moment map image `q(3)`.
pub fn free_q3_tensor() -> Tensor3 {
    from_squares(&[
        ([1, 1, 1], 1.0, 5.0 / 14.0),
        ([1, 2, 2], 1.0, 1.0 / 21.0),
        ([2, 1, 2], 1.0, 1.0 / 21.0),
        ([2, 2, 3], 1.0, 2.0 / 7.0),
        ([3, 3, 2], 1.0, 11.0 / 42.0),
    ])
}

pub const MU_S2: [[f64; 3]; 3] = [
    [17.0 / 42.0, 1.0 / 3.0, 11.0 / 42.0],
    [17.0 / 42.0, 1.0 / 3.0, 11.0 / 42.0],
    [5.0 / 14.0, 5.0 / 14.0, 2.0 / 7.0],
];

pub const MU_S5: [[f64; 3]; 3] = [
    [13.0 / 30.0, 1.0 / 3.0, 7.0 / 30.0],
    [13.0 / 30.0, 1.0 / 3.0, 7.0 / 30.0],
    [2.0 / 5.0, 2.0 / 5.0, 1.0 / 5.0],
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::apply;

    #[test]
    fn unit_norms() {
        // 1/7 + 11/42 + 1/7 + 10/77 + 2/33 + 5/22 + 8/231 = 1
        let s: f64 = S2_SQUARES.iter().map(|x| x.2).sum();
        assert!((s - 1.0).abs() < 1e-15);
        assert!((s2().norm() - 1.0).abs() < 1e-15);
        assert!((s5().norm() - 1.0).abs() < 1e-15);
        assert!((free_q3_tensor().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn g_maps_t2_to_s2() {
        let out = apply(&t2_to_s2(), &t2()).unwrap();
        assert!(out.distance(&s2()).unwrap() < 1e-14);
        let bad = apply(&corrupted_t2_to_s2(), &t2()).unwrap();
        assert!(bad.distance(&s2()).unwrap() > 0.1);
    }
}
