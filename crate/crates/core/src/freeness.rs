//! Free supports, downward/upward closures and the inner points coming from
//! the vertices of a free support.

use crate::error::{Error, Result};
use crate::moment::WeylPoint;
use crate::tensor::{Index3, SupportSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeSupportWitness {
    pub free: bool,
    /// Two triples differing in exactly one coordinate, 0-based.
    pub offending_pair: Option<(Index3, Index3)>,
}

fn coordinate_differences(a: &Index3, b: &Index3) -> usize {
    (0..3).filter(|&l| a[l] != b[l]).count()
}

/// Pairwise scan; reports the first offending pair in lexicographic order.
pub fn is_free_support(s: &SupportSet) -> FreeSupportWitness {
    let triples: Vec<&Index3> = s.iter().collect();
    for (x, a) in triples.iter().enumerate() {
        for b in &triples[x + 1..] {
            if coordinate_differences(a, b) == 1 {
                return FreeSupportWitness {
                    free: false,
                    offending_pair: Some((**a, **b)),
                };
            }
        }
    }
    FreeSupportWitness {
        free: true,
        offending_pair: None,
    }
}

/// All triples pointwise dominated by some element of `s`.
pub fn downward_closure(s: &SupportSet) -> SupportSet {
    let mut out = SupportSet::empty(s.dims());
    for &[i, j, k] in s.iter() {
        for a in 0..=i {
            for b in 0..=j {
                for c in 0..=k {
                    out.insert([a, b, c]).expect("dominated triples stay in range");
                }
            }
        }
    }
    out
}

/// All triples pointwise dominating some element of `s`.
pub fn upward_closure(s: &SupportSet) -> SupportSet {
    let d = s.dims();
    let mut out = SupportSet::empty(d);
    for &[i, j, k] in s.iter() {
        for a in i..d[0] {
            for b in j..d[1] {
                for c in k..d[2] {
                    out.insert([a, b, c]).expect("dominating triples stay in range");
                }
            }
        }
    }
    out
}

/// The 0/1 point `(e_i | e_j | e_k)` as three vectors.
pub fn vertex(dims: [usize; 3], idx: Index3) -> [Vec<f64>; 3] {
    [0, 1, 2].map(|l| {
        let mut v = vec![0.0; dims[l]];
        v[idx[l]] = 1.0;
        v
    })
}

/// Sorted vertices of a free support, one per triple, in triple order.
pub fn sjamaar_inner_points(s: &SupportSet) -> Result<Vec<WeylPoint>> {
    let w = is_free_support(s);
    if let Some((a, b)) = w.offending_pair {
        return Err(Error::NonFreeSupport(a, b));
    }
    s.iter()
        .map(|&idx| WeylPoint::sorted(vertex(s.dims(), idx)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(dims: [usize; 3], t: &[Index3]) -> SupportSet {
        SupportSet::new(dims, t.iter().copied()).unwrap()
    }

    #[test]
    fn w_state_is_free() {
        let s = set([2, 2, 2], &[[0, 0, 1], [0, 1, 0], [1, 0, 0]]);
        assert!(is_free_support(&s).free);
    }

    #[test]
    fn offending_pair_differs_in_one_coordinate() {
        let s = set([2, 2, 2], &[[0, 0, 0], [1, 1, 1], [0, 0, 1]]);
        let w = is_free_support(&s);
        assert!(!w.free);
        let (a, b) = w.offending_pair.unwrap();
        assert_eq!(coordinate_differences(&a, &b), 1);
    }

    #[test]
    fn closure_of_origin_is_itself() {
        let s = set([3, 3, 3], &[[0, 0, 0]]);
        assert_eq!(downward_closure(&s), s);
        assert_eq!(upward_closure(&s).len(), 27);
    }

    #[test]
    fn inner_points_sort_vertices() {
        let s = set([2, 2, 2], &[[0, 0, 1], [0, 1, 0], [1, 0, 0]]);
        let pts = sjamaar_inner_points(&s).unwrap();
        assert_eq!(pts.len(), 3);
        for p in pts {
            for part in p.parts() {
                assert_eq!(part, &vec![1.0, 0.0]);
            }
        }
    }

    #[test]
    fn inner_points_reject_non_free() {
        let s = set([2, 2, 2], &[[0, 0, 0], [0, 0, 1]]);
        assert!(matches!(sjamaar_inner_points(&s), Err(Error::NonFreeSupport(..))));
    }
}
