//! Exact rational linear feasibility for convex hull membership.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::family::Rational;

/// `x` as a continued-fraction convergent within `tol`, or its exact binary
/// value if no convergent with a moderate denominator is close enough.
pub fn rationalize(x: f64, tol: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let ai = BigInt::from(a as i64);
        let h2 = &ai * &h1 + &h0;
        let k2 = &ai * &k1 + &k0;
        let approx = Rational::new(h2.clone(), k2.clone());
        if (crate::family::to_f64(&approx) - x).abs() <= tol {
            return Some(approx);
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a;
        if frac == 0.0 || a.abs() > 1e15 {
            break;
        }
        r = 1.0 / frac;
    }
    Rational::from_float(x)
}

/// Minimum of `Σ |r_i|` over `λ ≥ 0` with `r = [V; 1ᵀ] λ − [p; 1]`, where
/// the columns of `V` are `vertices`. Zero iff `p ∈ conv(vertices)`.
///
/// Phase-one simplex on a dense exact tableau with Bland's rule; every row
/// gets a positive and a negative artificial variable.
pub fn min_l1_residual(vertices: &[Vec<Rational>], p: &[Rational]) -> Rational {
    let m = p.len();
    let rows = m + 1;
    let k = vertices.len();
    let cols = k + 2 * rows;
    let mut tab: Vec<Vec<Rational>> = vec![vec![Rational::zero(); cols]; rows];
    let mut rhs: Vec<Rational> = Vec::with_capacity(rows);
    let mut basis: Vec<usize> = Vec::with_capacity(rows);
    for r in 0..rows {
        for (j, v) in vertices.iter().enumerate() {
            tab[r][j] = if r < m { v[r].clone() } else { Rational::one() };
        }
        tab[r][k + 2 * r] = Rational::one();
        tab[r][k + 2 * r + 1] = -Rational::one();
        let b = if r < m { p[r].clone() } else { Rational::one() };
        if b.is_negative() {
            for x in tab[r].iter_mut() {
                *x = -x.clone();
            }
            rhs.push(-b);
            basis.push(k + 2 * r + 1);
        } else {
            rhs.push(b);
            basis.push(k + 2 * r);
        }
    }
    let cost = |j: usize| -> Rational {
        if j < k {
            Rational::zero()
        } else {
            Rational::one()
        }
    };
    // reduced costs c_j − Σ_r c_{B_r} tab[r][j]; all basic costs are 1
    let mut reduced: Vec<Rational> = (0..cols)
        .map(|j| {
            let s: Rational = (0..rows).map(|r| &tab[r][j]).sum();
            cost(j) - s
        })
        .collect();

    while let Some(enter) = (0..cols).find(|&j| reduced[j].is_negative()) {
        let mut leave: Option<(usize, Rational)> = None;
        for r in 0..rows {
            if tab[r][enter].is_positive() {
                let ratio = &rhs[r] / &tab[r][enter];
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => ratio < *best || (ratio == *best && basis[r] < basis[*lr]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        let Some((pr, _)) = leave else {
            // the objective is bounded below by zero
            unreachable!("phase-one objective cannot be unbounded");
        };
        let piv = tab[pr][enter].clone();
        for x in tab[pr].iter_mut() {
            *x /= &piv;
        }
        rhs[pr] /= &piv;
        let prow = tab[pr].clone();
        let prhs = rhs[pr].clone();
        for r in 0..rows {
            if r != pr && !tab[r][enter].is_zero() {
                let f = tab[r][enter].clone();
                for (x, y) in tab[r].iter_mut().zip(&prow) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
                rhs[r] -= &f * &prhs;
            }
        }
        let f = reduced[enter].clone();
        for (x, y) in reduced.iter_mut().zip(&prow) {
            if !y.is_zero() {
                *x -= &f * y;
            }
        }
        basis[pr] = enter;
    }
    (0..rows)
        .filter(|&r| basis[r] >= k)
        .map(|r| rhs[r].clone())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{int, rat};

    fn pts(v: &[&[i64]]) -> Vec<Vec<Rational>> {
        v.iter().map(|x| x.iter().map(|&y| int(y)).collect()).collect()
    }

    #[test]
    fn rationalize_small_fractions() {
        assert_eq!(rationalize(1.0 / 3.0, 1e-12), Some(rat(1, 3)));
        assert_eq!(rationalize(17.0 / 42.0, 1e-12), Some(rat(17, 42)));
        assert_eq!(rationalize(-2.5, 1e-12), Some(rat(-5, 2)));
        assert_eq!(rationalize(0.0, 1e-12), Some(int(0)));
        assert!(rationalize(f64::NAN, 1e-12).is_none());
        let pi = rationalize(std::f64::consts::PI, 1e-12).unwrap();
        assert!((crate::family::to_f64(&pi) - std::f64::consts::PI).abs() <= 1e-12);
    }

    #[test]
    fn segment_membership() {
        let v = pts(&[&[1, 0], &[0, 1]]);
        assert!(min_l1_residual(&v, &[rat(1, 3), rat(2, 3)]).is_zero());
        // (1/2, 1/2) + (1/4, 0): distance in L1 after the affine row
        assert!(min_l1_residual(&v, &[rat(3, 4), rat(1, 2)]).is_positive());
        assert!(min_l1_residual(&v, &[rat(-1, 2), rat(3, 2)]).is_positive());
    }

    #[test]
    fn square_vertices_and_centre() {
        let v = pts(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        assert!(min_l1_residual(&v, &[rat(1, 2), rat(1, 2)]).is_zero());
        assert!(min_l1_residual(&v, &[int(1), int(1)]).is_zero());
        assert_eq!(min_l1_residual(&v, &[int(2), int(1)]), int(1));
    }

    #[test]
    fn degenerate_repeated_vertices() {
        let v = pts(&[&[1, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert!(min_l1_residual(&v, &[rat(1, 3), rat(1, 3), rat(1, 3)]).is_zero());
        assert!(min_l1_residual(&v, &[rat(1, 2), rat(1, 2), rat(1, 2)]).is_positive());
    }
}
