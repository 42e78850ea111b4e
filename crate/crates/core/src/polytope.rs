//! One-sided moment polytope certificates: halfspace bounds from downward
//! closed supports, inner points of free supports, and sampled refutation
//! of membership through supports of triangular basis changes.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::family::{pairing, Rational};
use crate::freeness::{downward_closure, sjamaar_inner_points};
use crate::lp::{min_l1_residual, rationalize};
use crate::moment::WeylPoint;
use crate::sampling::{random_lower_unitriangular, random_upper_unitriangular, rng_from_seed};
use crate::tensor::{apply, support, GroupTriple, Index3, SupportSet, Tensor3, SUPPORT_TOL};

/// Density of the off-diagonal entries of the sampled lower triangular factors.
pub const LOWER_DENSITY: f64 = 0.25;
/// Tolerance used to rationalize the target point.
const RATIONALIZE_TOL: f64 = 1e-12;
/// Per-coordinate slack on the exact L1 residual before declaring a refutation.
const REFUTE_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct HalfspaceCert {
    pub h: [Vec<Rational>; 3],
    pub c: Rational,
    pub min_support_value: Rational,
    /// Vertices of the downward closure attaining the minimum.
    pub minimizers: SupportSet,
    pub checked: usize,
    /// `Δ(T) ⊆ {⟨p, h⟩ ≥ c}` is certified when true.
    pub valid: bool,
}

/// Minimizes `⟨(e_i|e_j|e_k), h⟩` over the downward closure of `supp(T)`.
pub fn outer_halfspace(t: &Tensor3, h: &[Vec<Rational>; 3], c: &Rational) -> Result<HalfspaceCert> {
    if t.is_zero() {
        return Err(Error::ZeroTensor);
    }
    for l in 0..3 {
        if h[l].len() != t.dims()[l] {
            return Err(Error::DimensionMismatch(format!(
                "h component {} has length {}, tensor dimension {}",
                l + 1,
                h[l].len(),
                t.dims()[l]
            )));
        }
    }
    let closure = downward_closure(&support(t, SUPPORT_TOL));
    let values: Vec<(Index3, Rational)> = closure.iter().map(|&idx| (idx, pairing(h, idx))).collect();
    let min = values.iter().map(|(_, v)| v).min().expect("non-zero tensor").clone();
    let minimizers = SupportSet::new(
        t.dims(),
        values.iter().filter(|(_, v)| *v == min).map(|(idx, _)| *idx),
    )?;
    Ok(HalfspaceCert {
        h: h.clone(),
        c: c.clone(),
        valid: min >= *c,
        min_support_value: min,
        minimizers,
        checked: closure.len(),
    })
}

/// Sorted support vertices of a tensor with free support; each lies in `Δ(T)`.
pub fn inner_points(t: &Tensor3) -> Result<Vec<WeylPoint>> {
    if t.is_zero() {
        return Err(Error::ZeroTensor);
    }
    sjamaar_inner_points(&support(t, SUPPORT_TOL))
}

#[derive(Clone, Debug, PartialEq)]
pub struct HullRefutation {
    pub refuted: bool,
    /// First lower triangular sample whose support hull excludes `p`; sample 0 is `L = I`.
    pub refuting_sample: Option<usize>,
    /// Exact L1 residual for the refuting sample, as a float.
    pub residual: Option<f64>,
    pub samples: usize,
    pub distinct_supports: usize,
    /// The upper unitriangular triple used for every sample.
    pub u: GroupTriple,
}

fn vertex_coords(dims: [usize; 3], idx: &Index3) -> Vec<Rational> {
    let mut v = vec![Rational::from_integer(0.into()); dims.iter().sum()];
    let mut off = 0;
    for l in 0..3 {
        v[off + idx[l]] = Rational::from_integer(1.into());
        off += dims[l];
    }
    v
}

/// Tests `p ∈ conv supp(L U · T)` for one random upper unitriangular `U` and
/// `samples` lower unitriangular `L`. A failure for some `L` refutes
/// `p ∈ Δ(T)` provided `U` is generic; `U` is reported for reproducibility.
pub fn hull_refute(t: &Tensor3, p: &WeylPoint, samples: usize, seed: u64) -> Result<HullRefutation> {
    let mut rng = rng_from_seed(seed);
    hull_refute_with(t, p, samples, &mut rng)
}

pub fn hull_refute_with<R: Rng + ?Sized>(
    t: &Tensor3,
    p: &WeylPoint,
    samples: usize,
    rng: &mut R,
) -> Result<HullRefutation> {
    if t.is_zero() {
        return Err(Error::ZeroTensor);
    }
    let dims = t.dims();
    if p.dims() != dims {
        return Err(Error::DimensionMismatch(format!("point {:?} vs tensor {:?}", p.dims(), dims)));
    }
    let target: Vec<Rational> = p
        .parts()
        .iter()
        .flatten()
        .map(|&x| rationalize(x, RATIONALIZE_TOL).ok_or_else(|| Error::Format("non-finite point".into())))
        .collect::<Result<_>>()?;
    let slack = Rational::from_float(REFUTE_SLACK * target.len() as f64).expect("finite");

    let [u1, u2, u3] = dims.map(|n| random_upper_unitriangular(rng, n));
    let u = GroupTriple::new(u1, u2, u3)?;
    let ut = apply(&u, t)?;
    let mut cache: BTreeMap<Vec<Index3>, Rational> = BTreeMap::new();
    let mut result = HullRefutation {
        refuted: false,
        refuting_sample: None,
        residual: None,
        samples,
        distinct_supports: 0,
        u,
    };
    for s in 0..samples {
        let lt = if s == 0 {
            ut.clone()
        } else {
            let [l1, l2, l3] = dims.map(|n| random_lower_unitriangular(rng, n, LOWER_DENSITY));
            apply(&GroupTriple::new(l1, l2, l3)?, &ut)?
        };
        let supp: Vec<Index3> = support(&lt, 0.0).iter().copied().collect();
        let residual = cache
            .entry(supp)
            .or_insert_with_key(|supp| {
                let verts: Vec<Vec<Rational>> = supp.iter().map(|idx| vertex_coords(dims, idx)).collect();
                min_l1_residual(&verts, &target)
            })
            .clone();
        if residual > slack {
            result.refuted = true;
            result.refuting_sample = Some(s);
            result.residual = Some(crate::family::to_f64(&residual));
            break;
        }
    }
    result.distinct_supports = cache.len();
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::build_family_tensor;
    use crate::family::{family_data, int};
    use crate::moment::{moment_map, spec_point};
    use crate::named;

    #[test]
    fn family_halfspace_is_tight_on_gamma() {
        let ft = build_family_tensor(3).unwrap();
        let f = family_data(3).unwrap();
        let cert = outer_halfspace(&ft.tensor, &f.h, &f.c).unwrap();
        assert!(cert.valid);
        assert_eq!(cert.min_support_value, f.c);
        let stronger = outer_halfspace(&ft.tensor, &f.h, &(&f.c + int(1))).unwrap();
        assert!(!stronger.valid);
    }

    #[test]
    fn zero_halfspace_is_valid() {
        let e = Tensor3::basis([2, 2, 2], [0, 0, 0]).unwrap();
        let h = [vec![int(0); 2], vec![int(0); 2], vec![int(0); 2]];
        assert!(outer_halfspace(&e, &h, &int(0)).unwrap().valid);
    }

    #[test]
    fn uniform_point_is_refuted_for_family() {
        let ft = build_family_tensor(3).unwrap();
        let u = vec![1.0 / 3.0; 3];
        let p = WeylPoint::new([u.clone(), u.clone(), u]).unwrap();
        let r = hull_refute(&ft.tensor, &p, 10, 0).unwrap();
        assert!(r.refuted);
    }

    #[test]
    fn own_spectrum_is_not_refuted() {
        let t = named::t2();
        let p = spec_point(&moment_map(&t).unwrap()).unwrap();
        let p = WeylPoint::new(p.parts().clone()).unwrap();
        assert!(!hull_refute(&t, &p, 50, 3).unwrap().refuted);
    }

    #[test]
    fn basis_tensor_vertex_is_not_refuted() {
        let e = Tensor3::basis([2, 3, 2], [0, 0, 0]).unwrap();
        let p = WeylPoint::new([vec![1.0, 0.0], vec![1.0, 0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert!(!hull_refute(&e, &p, 20, 1).unwrap().refuted);
    }

    #[test]
    fn inner_points_of_free_q3_tensor() {
        let pts = inner_points(&named::free_q3_tensor()).unwrap();
        assert_eq!(pts.len(), 5);
        assert!(inner_points(&named::t2()).is_err());
    }
}
