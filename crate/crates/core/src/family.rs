//! Exact rational constants of the staircase family: the support `Γn`, the
//! halfspace `(h, c)`, the minimum-norm point `q` and the auxiliary vectors
//! `b`, `d = q2 − b`, `w² = λ − d`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::freeness::downward_closure;
use crate::tensor::{Index3, SupportSet};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn to_f64_vec(v: &[Rational]) -> Vec<f64> {
    v.iter().map(to_f64).collect()
}

fn check_size(n: usize, min: usize) -> Result<()> {
    if n < min {
        Err(Error::InvalidSize { n, min })
    } else {
        Ok(())
    }
}

/// `Γn`, 0-based: `(i, n−1−i, k)` for `k < n−1` and `(i, n−2−i, n−1)` for `i < n−1`.
pub fn gamma_support(n: usize) -> Result<SupportSet> {
    check_size(n, 2)?;
    let mut s = SupportSet::empty([n, n, n]);
    for i in 0..n {
        for k in 0..n - 1 {
            s.insert([i, n - 1 - i, k])?;
        }
    }
    for i in 0..n - 1 {
        s.insert([i, n - 2 - i, n - 1])?;
    }
    Ok(s)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyData {
    pub n: usize,
    pub h: [Vec<Rational>; 3],
    pub c: Rational,
    pub norm_h_sq: Rational,
    pub q: [Vec<Rational>; 3],
    pub b: Vec<Rational>,
    /// `d_j = (q2)_j − b_j`, the diagonal of `WW*`.
    pub d: Vec<Rational>,
    pub w_sq: Vec<Rational>,
    pub lambda_w: Rational,
}

pub fn family_data(n: usize) -> Result<FamilyData> {
    check_size(n, 2)?;
    let ni = n as i64;
    let u = rat(1, ni);
    let h12: Vec<Rational> = (0..ni).map(|i| rat(ni - 1, 2) - int(i)).collect();
    let h3: Vec<Rational> = (0..n)
        .map(|i| if i == n - 1 { &u - int(1) } else { u.clone() })
        .collect();
    let h = [h12.clone(), h12, h3];
    let c = u.clone();
    let norm_h_sq: Rational = h.iter().flatten().map(|x| x * x).sum();
    let t = &c / &norm_h_sq;
    let q = [0, 1, 2].map(|l| h[l].iter().map(|x| &u + &t * x).collect::<Vec<_>>());

    let mut b = Vec::with_capacity(n);
    let mut acc = Rational::zero();
    for l in 0..n {
        acc += &q[1][l] - &q[0][n - 1 - l];
        b.push(acc.clone());
    }
    let lambda_w = (int(1) - &q[2][n - 1]) / int(ni - 1);
    let d: Vec<Rational> = (0..n).map(|j| &q[1][j] - &b[j]).collect();
    let w_sq = d.iter().map(|x| &lambda_w - x).collect();
    Ok(FamilyData {
        n,
        h,
        c,
        norm_h_sq,
        q,
        b,
        d,
        w_sq,
        lambda_w,
    })
}

/// `n(n²−1)/6 + (n−1)/n`.
pub fn norm_h_sq_formula(n: usize) -> Rational {
    let ni = n as i64;
    rat(ni * (ni * ni - 1), 6) + rat(ni - 1, ni)
}

/// `3/n + c²/‖h‖²`, the squared norm of `q` and the Ness constant of `T^W`.
pub fn ness_lambda(n: usize) -> Result<Rational> {
    check_size(n, 2)?;
    let c = rat(1, n as i64);
    Ok(rat(3, n as i64) + &c * &c / norm_h_sq_formula(n))
}

/// `⟨(e_i | e_j | e_k), v⟩ = v1[i] + v2[j] + v3[k]`.
pub fn pairing(v: &[Vec<Rational>; 3], idx: Index3) -> Rational {
    &v[0][idx[0]] + &v[1][idx[1]] + &v[2][idx[2]]
}

fn dot(a: &[Vec<Rational>; 3], b: &[Vec<Rational>; 3]) -> Rational {
    (0..3)
        .flat_map(|l| a[l].iter().zip(&b[l]).map(|(x, y)| x * y))
        .sum()
}

fn non_increasing(v: &[Rational]) -> bool {
    v.windows(2).all(|w| w[0] >= w[1])
}

fn strictly_decreasing(v: &[Rational]) -> bool {
    v.windows(2).all(|w| w[0] > w[1])
}

impl FamilyData {
    pub fn q_f64(&self) -> [Vec<f64>; 3] {
        [0, 1, 2].map(|l| to_f64_vec(&self.q[l]))
    }

    pub fn norm_q_sq(&self) -> Rational {
        dot(&self.q, &self.q)
    }

    /// Every exact identity among the constants, by name. All must hold.
    pub fn identities(&self) -> Vec<(&'static str, bool)> {
        let n = self.n;
        let ni = n as i64;
        let zero = Rational::zero();
        let u = rat(1, ni);
        let q = &self.q;
        let b = &self.b;

        let h12_ok = (0..n).all(|i| self.h[0][i] == rat(ni - 1, 2) - int(i as i64))
            && self.h[0] == self.h[1];
        let h3_ok = (0..n).all(|i| {
            self.h[2][i] == if i == n - 1 { &u - int(1) } else { u.clone() }
        });
        let sum_b: Rational = b[..n - 1].iter().sum();
        let shift = (0..n).all(|j| {
            let prev = if j == 0 { zero.clone() } else { b[j - 1].clone() };
            &q[1][j] - &b[j] == &q[0][n - 1 - j] - prev
        });
        let d_range = self.d.iter().all(|x| *x >= zero && *x < self.lambda_w);
        // q − u is the multiple c/‖h‖² of h
        let t = &self.c / &self.norm_h_sq;
        let projection = (0..3).all(|l| (0..n).all(|i| &q[l][i] - &u == &t * &self.h[l][i]));
        let simplex = q.iter().all(|v| {
            v.iter().all(|x| *x >= zero) && non_increasing(v) && v.iter().sum::<Rational>() == int(1)
        });
        let q3_shape = q[2][..n - 1].iter().all(|x| *x == q[2][0]) && q[2][n - 1] < u;
        let norm_q = self.norm_q_sq();
        let gamma = gamma_support(n).expect("n >= 2");
        let constant_pairing = gamma.iter().all(|&idx| pairing(q, idx) == norm_q);

        vec![
            ("c = 1/n", self.c == u),
            ("h1 = h2 = ((n-1)/2, ..., -(n-1)/2)", h12_ok),
            ("h3 = u - e_n", h3_ok),
            ("|h|^2 = n(n^2-1)/6 + (n-1)/n", self.norm_h_sq == norm_h_sq_formula(n)),
            ("b_n = 0", b[n - 1].is_zero()),
            ("b_j > 0 for j < n", b[..n - 1].iter().all(|x| x.is_positive())),
            ("sum_{j<n} b_j = (q3)_n", sum_b == q[2][n - 1]),
            ("(q2)_j - b_j = (q1)_{n+1-j} - b_{j-1}", shift),
            ("0 <= (q2)_j - b_j < lambda", d_range),
            ("lambda = (1 - (q3)_n)/(n-1)", self.lambda_w == (int(1) - &q[2][n - 1]) / int(ni - 1)),
            (
                "w_sq = lambda - (q2 - b) > 0",
                (0..n).all(|j| self.w_sq[j] == &self.lambda_w - &self.d[j] && self.w_sq[j].is_positive()),
            ),
            ("<q, h> = c", dot(q, &self.h) == self.c),
            ("q - u parallel to h", projection),
            ("|q|^2 = 3/n + c^2/|h|^2", norm_q == rat(3, ni) + &self.c * &self.c / &self.norm_h_sq),
            ("q_i non-negative, non-increasing, sum 1", simplex),
            ("q1 = q2 strictly decreasing", q[0] == q[1] && strictly_decreasing(&q[0])),
            ("q3 = (l, ..., l, (q3)_n) with (q3)_n < 1/n", q3_shape),
            ("<(e_i|e_j|e_k), q> = |q|^2 on Gamma_n", constant_pairing),
        ]
    }

    pub fn all_identities_hold(&self) -> bool {
        self.identities().iter().all(|(_, ok)| *ok)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HalfspaceReport {
    pub n: usize,
    pub c: Rational,
    pub min_value: Rational,
    pub checked: usize,
    /// Triples of `Γn↓` on which `⟨·, h⟩ = c`.
    pub equality_set: SupportSet,
    pub all_at_least_c: bool,
    pub equality_set_is_gamma: bool,
}

/// Exact check of `⟨(e_i|e_j|e_k), h⟩ ≥ c` over the downward closure of `Γn`.
pub fn halfspace_check(n: usize) -> Result<HalfspaceReport> {
    let data = family_data(n)?;
    let gamma = gamma_support(n)?;
    let closure = downward_closure(&gamma);
    let mut equality_set = SupportSet::empty([n, n, n]);
    let mut min_value: Option<Rational> = None;
    for &idx in closure.iter() {
        let v = pairing(&data.h, idx);
        if v == data.c {
            equality_set.insert(idx)?;
        }
        if min_value.as_ref().is_none_or(|m| v < *m) {
            min_value = Some(v);
        }
    }
    let min_value = min_value.expect("closure is non-empty");
    Ok(HalfspaceReport {
        n,
        all_at_least_c: min_value >= data.c,
        equality_set_is_gamma: equality_set == gamma,
        c: data.c,
        min_value,
        checked: closure.len(),
        equality_set,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[(i64, i64)]) -> Vec<Rational> {
        xs.iter().map(|&(a, b)| rat(a, b)).collect()
    }

    #[test]
    fn n3_constants() {
        let f = family_data(3).unwrap();
        assert_eq!(f.norm_h_sq, rat(14, 3));
        assert_eq!(f.c, rat(1, 3));
        assert_eq!(f.q[0], v(&[(17, 42), (1, 3), (11, 42)]));
        assert_eq!(f.q[1], f.q[0]);
        assert_eq!(f.q[2], v(&[(5, 14), (5, 14), (2, 7)]));
        assert_eq!(f.b, v(&[(1, 7), (1, 7), (0, 1)]));
        assert_eq!(f.lambda_w, rat(5, 14));
        assert_eq!(f.d, v(&[(11, 42), (4, 21), (11, 42)]));
        assert_eq!(f.w_sq, v(&[(2, 21), (1, 6), (2, 21)]));
        assert_eq!(f.norm_q_sq(), rat(43, 42));
        assert!(f.all_identities_hold());
    }

    #[test]
    fn b_by_independent_summation() {
        // b_j = Σ_{l ≤ j} (q2)_l − (q1)_{n+1−l}, summed here over 1-based indices
        for n in 3..9usize {
            let f = family_data(n).unwrap();
            for j in 1..=n {
                let mut s = Rational::zero();
                for l in 1..=j {
                    s += &f.q[1][l - 1] - &f.q[0][n + 1 - l - 1];
                }
                assert_eq!(s, f.b[j - 1]);
            }
        }
    }

    #[test]
    fn gamma_sizes() {
        assert_eq!(
            gamma_support(2).unwrap().triples().iter().copied().collect::<Vec<_>>(),
            vec![[0, 0, 1], [0, 1, 0], [1, 0, 0]]
        );
        let g3: Vec<Index3> = gamma_support(3).unwrap().iter().copied().collect();
        let want: Vec<Index3> = [[1, 3, 1], [1, 3, 2], [1, 2, 3], [2, 2, 1], [2, 2, 2], [2, 1, 3], [3, 1, 1], [3, 1, 2]]
            .iter()
            .map(|t| [t[0] - 1, t[1] - 1, t[2] - 1])
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        assert_eq!(g3, want);
        for n in 2..=10 {
            assert_eq!(gamma_support(n).unwrap().len(), n * n - 1);
        }
        assert!(gamma_support(1).is_err());
    }

    #[test]
    fn halfspace_vertices_n3() {
        let f = family_data(3).unwrap();
        assert_eq!(pairing(&f.h, [0, 1, 2]), rat(1, 3));
        assert_eq!(pairing(&f.h, [0, 0, 0]), rat(7, 3));
        let r = halfspace_check(3).unwrap();
        assert!(r.all_at_least_c && r.equality_set_is_gamma);
        assert_eq!(r.min_value, rat(1, 3));
    }

    #[test]
    fn ness_lambda_matches_norm_q() {
        for n in 2..13 {
            assert_eq!(ness_lambda(n).unwrap(), family_data(n).unwrap().norm_q_sq());
        }
    }
}
