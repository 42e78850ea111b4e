//! Seeded random generators for tensors and group elements.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::tensor::{GroupTriple, SupportSet, Tensor3, UnitaryTriple, C64};

/// The portable generator used everywhere a seed is accepted.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex normal: real and imaginary parts `N(0, 1/2)`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

pub fn random_tensor<R: Rng + ?Sized>(rng: &mut R, dims: [usize; 3]) -> Result<Tensor3> {
    Tensor3::from_fn(dims, |_| complex_normal(rng))
}

/// Random complex coefficients on the given support, zero elsewhere.
pub fn random_on_support<R: Rng + ?Sized>(rng: &mut R, support: &SupportSet) -> Result<Tensor3> {
    Tensor3::from_entries(
        support.dims(),
        support.iter().map(|&idx| (idx, complex_normal(rng))).collect::<Vec<_>>(),
    )
}

/// Haar-distributed unitary via QR of a Ginibre matrix with phase correction.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<C64> {
    let qr = random_matrix(rng, n, n).qr();
    let mut q = qr.q();
    let r = qr.r();
    for col in 0..n {
        let d = r[(col, col)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for row in 0..n {
            q[(row, col)] *= phase;
        }
    }
    q
}

pub fn random_unitary_triple<R: Rng + ?Sized>(rng: &mut R, dims: [usize; 3]) -> Result<UnitaryTriple> {
    let [a, b, c] = dims.map(|n| random_unitary(rng, n));
    UnitaryTriple::new(a, b, c)
}

/// Ginibre triple; invertible with probability one.
pub fn random_group_triple<R: Rng + ?Sized>(rng: &mut R, dims: [usize; 3]) -> Result<GroupTriple> {
    let [a, b, c] = dims.map(|n| random_matrix(rng, n, n));
    GroupTriple::new(a, b, c)
}

/// Invertible diagonal triple with entries of modulus in `[0.5, 2]` and random phase.
pub fn random_diagonal_triple<R: Rng + ?Sized>(rng: &mut R, dims: [usize; 3]) -> Result<GroupTriple> {
    let [a, b, c] = dims.map(|n| {
        (0..n)
            .map(|_| {
                let modulus: f64 = rng.random_range(0.5..2.0);
                let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                C64::from_polar(modulus, phase)
            })
            .collect::<Vec<_>>()
    });
    GroupTriple::diagonal([&a, &b, &c])
}

/// Unit-diagonal upper-triangular matrix with standard complex normal entries above the diagonal.
pub fn random_upper_unitriangular<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<C64> {
    DMatrix::from_fn(n, n, |r, c| match r.cmp(&c) {
        std::cmp::Ordering::Equal => C64::new(1.0, 0.0),
        std::cmp::Ordering::Less => complex_normal(rng),
        std::cmp::Ordering::Greater => C64::new(0.0, 0.0),
    })
}

/// Unit-diagonal lower-triangular matrix; each entry below the diagonal is
/// switched on independently with probability `density`.
pub fn random_lower_unitriangular<R: Rng + ?Sized>(rng: &mut R, n: usize, density: f64) -> DMatrix<C64> {
    let mut m = DMatrix::identity(n, n);
    for r in 0..n {
        for c in 0..r {
            if rng.random_bool(density) {
                m[(r, c)] = complex_normal(rng);
            }
        }
    }
    m
}

/// Random support in `[n1]×[n2]×[n3]` any two elements of which differ in at
/// least two coordinates, built greedily from a shuffled candidate list.
pub fn random_free_support<R: Rng + ?Sized>(rng: &mut R, dims: [usize; 3], max_len: usize) -> SupportSet {
    use rand::seq::SliceRandom;
    let mut candidates = Vec::new();
    for i in 0..dims[0] {
        for j in 0..dims[1] {
            for k in 0..dims[2] {
                candidates.push([i, j, k]);
            }
        }
    }
    candidates.shuffle(rng);
    let mut chosen: Vec<[usize; 3]> = Vec::new();
    for c in candidates {
        if chosen.len() >= max_len {
            break;
        }
        if chosen
            .iter()
            .all(|s| (0..3).filter(|&l| s[l] != c[l]).count() >= 2)
        {
            chosen.push(c);
        }
    }
    SupportSet::new(dims, chosen).expect("candidates are in range")
}

/// Random permutation of `0..n`.
pub fn random_permutation<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}
