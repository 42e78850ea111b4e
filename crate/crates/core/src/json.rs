//! JSON encodings. Indices are 1-based, rationals are `{"num", "den"}`
//! decimal strings, complex matrices are `{"re": [[..]], "im": [[..]]}`.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::certify::{BlockVector, NonFreenessReport, ObstructionWitness, StabilizerBlocks, TwoColumnOutcome};
use crate::construction::{FamilyTensor, FamilyVerification};
use crate::equivalence::ReductionResult;
use crate::error::{Error, Result};
use crate::family::{FamilyData, HalfspaceReport, Rational};
use crate::flow::{decimate, FlowResult, NessCertificate};
use crate::freeness::FreeSupportWitness;
use crate::moment::{HermTriple, WeylPoint};
use crate::polytope::{HalfspaceCert, HullRefutation};
use crate::tensor::{GroupTriple, Index3, SupportSet, Tensor3, C64};

/// Longest trajectory emitted in a flow report.
pub const MAX_TRAJECTORY_SAMPLES: usize = 1000;

fn format_err(e: impl std::fmt::Display) -> Error {
    Error::Format(e.to_string())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryIn {
    i: usize,
    j: usize,
    k: usize,
    #[serde(default)]
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TensorIn {
    dims: [usize; 3],
    #[serde(default)]
    entries: Vec<EntryIn>,
}

fn one_based(idx: [usize; 3], dims: [usize; 3]) -> Result<Index3> {
    if idx.contains(&0) {
        return Err(Error::Format(format!("indices are 1-based, got {idx:?}")));
    }
    let z = [idx[0] - 1, idx[1] - 1, idx[2] - 1];
    if (0..3).any(|l| z[l] >= dims[l]) {
        return Err(Error::IndexOutOfRange { index: z, dims });
    }
    Ok(z)
}

pub fn tensor_from_value(v: &Value) -> Result<Tensor3> {
    let t: TensorIn = serde_json::from_value(v.clone()).map_err(format_err)?;
    let entries = t
        .entries
        .iter()
        .map(|e| Ok((one_based([e.i, e.j, e.k], t.dims)?, C64::new(e.re, e.im))))
        .collect::<Result<Vec<_>>>()?;
    Tensor3::from_entries(t.dims, entries)
}

pub fn tensor_from_str(s: &str) -> Result<Tensor3> {
    tensor_from_value(&serde_json::from_str(s).map_err(format_err)?)
}

/// Non-zero entries only, in lexicographic order.
pub fn tensor_to_value(t: &Tensor3) -> Value {
    let entries: Vec<Value> = t
        .nonzeros()
        .map(|([i, j, k], v)| json!({"i": i + 1, "j": j + 1, "k": k + 1, "re": v.re, "im": v.im}))
        .collect();
    json!({"dims": t.dims(), "entries": entries})
}

pub fn index_to_value(idx: &Index3) -> Value {
    json!([idx[0] + 1, idx[1] + 1, idx[2] + 1])
}

pub fn support_to_value(s: &SupportSet) -> Value {
    Value::Array(s.iter().map(index_to_value).collect())
}

/// An array of 1-based triples; `dims` bounds the indices.
pub fn support_from_value(v: &Value, dims: [usize; 3]) -> Result<SupportSet> {
    let triples: Vec<[usize; 3]> = serde_json::from_value(v.clone()).map_err(format_err)?;
    let mut seen = BTreeSet::new();
    for t in &triples {
        let z = one_based(*t, dims)?;
        if !seen.insert(z) {
            return Err(Error::DuplicateEntry(z));
        }
    }
    SupportSet::new(dims, seen)
}

/// Smallest box containing the triples.
pub fn support_bounding_dims(v: &Value) -> Result<[usize; 3]> {
    let triples: Vec<[usize; 3]> = serde_json::from_value(v.clone()).map_err(format_err)?;
    let mut dims = [1, 1, 1];
    for t in &triples {
        for l in 0..3 {
            dims[l] = dims[l].max(t[l]);
        }
    }
    Ok(dims)
}

pub fn rational_to_value(r: &Rational) -> Value {
    json!({"num": r.numer().to_string(), "den": r.denom().to_string()})
}

fn rationals_to_value(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rational_to_value).collect())
}

fn rational_triple_to_value(v: &[Vec<Rational>; 3]) -> Value {
    Value::Array(v.iter().map(|x| rationals_to_value(x)).collect())
}

/// Parses `"a/b"`, an integer or a decimal with optional exponent, exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Format(format!("not a rational number: {s:?}"));
    if let Some((a, b)) = s.split_once('/') {
        let num: BigInt = a.trim().parse().map_err(|_| bad())?;
        let den: BigInt = b.trim().parse().map_err(|_| bad())?;
        if den == BigInt::from(0) {
            return Err(bad());
        }
        return Ok(Rational::new(num, den));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(p) => (&s[..p], s[p + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int_part}{frac_part}").parse().map_err(|_| bad())?;
    let scale = exp - frac_part.len() as i32;
    if scale.abs() > 4096 {
        return Err(bad());
    }
    let ten = BigInt::from(10);
    let mut r = Rational::from_integer(digits);
    if scale >= 0 {
        r *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -r } else { r })
}

/// A JSON number (exact decimal), a string `"a/b"`, or `{"num", "den"}`.
pub fn rational_from_value(v: &Value) -> Result<Rational> {
    match v {
        Value::Number(n) => parse_rational(&n.to_string()),
        Value::String(s) => parse_rational(s),
        Value::Object(m) => {
            let get = |k: &str| -> Result<BigInt> {
                let x = m.get(k).ok_or_else(|| Error::Format(format!("rational is missing {k:?}")))?;
                let s = match x {
                    Value::String(s) => s.clone(),
                    Value::Number(n) => n.to_string(),
                    _ => return Err(Error::Format(format!("rational field {k:?} must be an integer"))),
                };
                s.parse().map_err(|_| Error::Format(format!("rational field {k:?} is not an integer")))
            };
            let (num, den) = (get("num")?, get("den")?);
            if den == BigInt::from(0) {
                return Err(Error::Format("zero denominator".into()));
            }
            Ok(Rational::new(num, den))
        }
        _ => Err(Error::Format(format!("expected a rational, got {v}"))),
    }
}

/// `{"h": [[..], [..], [..]], "c": ..}`.
pub fn halfspace_from_value(v: &Value) -> Result<([Vec<Rational>; 3], Rational)> {
    let h = v.get("h").and_then(Value::as_array).ok_or_else(|| Error::Format("missing array \"h\"".into()))?;
    if h.len() != 3 {
        return Err(Error::Format(format!("\"h\" must have three components, got {}", h.len())));
    }
    let comp = |x: &Value| -> Result<Vec<Rational>> {
        x.as_array()
            .ok_or_else(|| Error::Format("h components must be arrays".into()))?
            .iter()
            .map(rational_from_value)
            .collect()
    };
    let c = rational_from_value(v.get("c").ok_or_else(|| Error::Format("missing \"c\"".into()))?)?;
    Ok(([comp(&h[0])?, comp(&h[1])?, comp(&h[2])?], c))
}

/// An array of three non-increasing arrays summing to 1.
pub fn weyl_point_from_value(v: &Value) -> Result<WeylPoint> {
    let parts: Vec<Vec<f64>> = serde_json::from_value(v.clone()).map_err(format_err)?;
    let [a, b, c]: [Vec<f64>; 3] = parts
        .try_into()
        .map_err(|p: Vec<Vec<f64>>| Error::Format(format!("expected three components, got {}", p.len())))?;
    WeylPoint::new([a, b, c])
}

pub fn weyl_point_to_value(p: &WeylPoint) -> Value {
    json!(p.parts())
}

pub fn matrix_to_value(m: &DMatrix<C64>) -> Value {
    let part = |f: fn(&C64) -> f64| -> Vec<Vec<f64>> {
        (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| f(&m[(r, c)])).collect()).collect()
    };
    json!({"re": part(|z| z.re), "im": part(|z| z.im)})
}

pub fn herm_triple_to_value(h: &HermTriple) -> Value {
    Value::Array(h.components().iter().map(matrix_to_value).collect())
}

pub fn group_triple_to_value(g: &GroupTriple) -> Value {
    Value::Array(g.matrices().iter().map(matrix_to_value).collect())
}

fn blocks_to_value(b: &StabilizerBlocks) -> Value {
    json!(b
        .blocks
        .iter()
        .map(|f| f.iter().map(|g| g.iter().map(|i| i + 1).collect::<Vec<_>>()).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn complex_pair(v: &[C64; 2]) -> Value {
    json!([{"re": v[0].re, "im": v[0].im}, {"re": v[1].re, "im": v[1].im}])
}

fn block_vector_to_value(b: &BlockVector) -> Value {
    json!({"position": [b.position[0] + 1, b.position[1] + 1], "vector": complex_pair(&b.v)})
}

pub fn obstruction_to_value(w: &ObstructionWitness) -> Value {
    let mut v = match w {
        ObstructionWitness::PairwiseNonparallelTriple { factor, block, vectors, normalized_dets } => json!({
            "factor": factor + 1,
            "block": [block[0] + 1, block[1] + 1],
            "vectors": vectors.iter().map(block_vector_to_value).collect::<Vec<_>>(),
            "normalized_dets": normalized_dets,
        }),
        ObstructionWitness::NonOrthogonalClasses { factor, block, vectors, normalized_inner } => json!({
            "factor": factor + 1,
            "block": [block[0] + 1, block[1] + 1],
            "vectors": vectors.iter().map(block_vector_to_value).collect::<Vec<_>>(),
            "normalized_inner": normalized_inner,
        }),
        ObstructionWitness::WwStarOffDiagonal { n, min_off_diagonal, min_w_sq } => json!({
            "n": n,
            "min_off_diagonal": min_off_diagonal,
            "min_w_sq": rational_to_value(min_w_sq),
        }),
    };
    v["kind"] = json!(w.kind());
    v["holds"] = json!(w.holds());
    v
}

pub fn two_column_to_value(o: &TwoColumnOutcome) -> Value {
    match o {
        TwoColumnOutcome::Unitary(u) => json!({"outcome": "unitary", "unitary": matrix_to_value(u)}),
        TwoColumnOutcome::Obstruction(w) => json!({"outcome": "obstruction", "obstruction": obstruction_to_value(w)}),
    }
}

pub fn ness_to_value(c: &NessCertificate) -> Value {
    json!({
        "lambda": c.lambda,
        "residual": c.residual,
        "tol": c.tol,
        "valid": c.valid,
        "mu": herm_triple_to_value(&c.mu),
    })
}

pub fn report_to_value(r: &NonFreenessReport) -> Value {
    json!({
        "input": r.input,
        "verdict": r.verdict,
        "failed_stages": r.failed_stages(),
        "stages": r.stages.iter().map(|s| json!({"name": s.name, "passed": s.passed, "detail": s.detail})).collect::<Vec<_>>(),
        "ness": ness_to_value(&r.ness),
        "blocks": blocks_to_value(&r.blocks),
        "expected_blocks": blocks_to_value(&r.expected_blocks),
        "obstruction": r.obstruction.as_ref().map(obstruction_to_value),
        "tensor": tensor_to_value(&r.tensor),
    })
}

pub fn family_data_to_value(f: &FamilyData) -> Value {
    json!({
        "n": f.n,
        "h": rational_triple_to_value(&f.h),
        "c": rational_to_value(&f.c),
        "norm_h_sq": rational_to_value(&f.norm_h_sq),
        "q": rational_triple_to_value(&f.q),
        "norm_q_sq": rational_to_value(&f.norm_q_sq()),
        "b": rationals_to_value(&f.b),
        "d": rationals_to_value(&f.d),
        "w_sq": rationals_to_value(&f.w_sq),
        "lambda_w": rational_to_value(&f.lambda_w),
    })
}

pub fn identities_to_value(f: &FamilyData) -> Value {
    Value::Array(
        f.identities()
            .into_iter()
            .map(|(name, holds)| json!({"identity": name, "holds": holds}))
            .collect(),
    )
}

pub fn family_tensor_to_value(ft: &FamilyTensor) -> Value {
    json!({
        "n": ft.n,
        "w": matrix_to_value(&ft.w.entries),
        "w_vector": ft.w.w,
        "a": ft.a,
        "tensor": tensor_to_value(&ft.tensor),
    })
}

pub fn family_verification_to_value(v: &FamilyVerification) -> Value {
    json!({
        "gram_residual": v.gram_residual,
        "outer_residual": v.outer_residual,
        "norm_deviation": v.norm_deviation,
        "mu_residual": v.mu_residual,
        "flattening_ranks": v.flattening_ranks,
        "support_in_gamma": v.support_in_gamma,
        "ok": v.ok,
    })
}

pub fn halfspace_report_to_value(r: &HalfspaceReport) -> Value {
    json!({
        "n": r.n,
        "c": rational_to_value(&r.c),
        "min_value": rational_to_value(&r.min_value),
        "checked": r.checked,
        "all_at_least_c": r.all_at_least_c,
        "equality_set_is_gamma": r.equality_set_is_gamma,
        "equality_set": support_to_value(&r.equality_set),
    })
}

pub fn flow_to_value(r: &FlowResult) -> Value {
    json!({
        "converged": r.converged,
        "steps": r.steps,
        "lambda": r.lambda,
        "final_residual": r.final_residual,
        "final_step": r.final_step,
        "mu_norm_final": r.mu_norm_trajectory.last(),
        "mu_norm_trajectory": decimate(&r.mu_norm_trajectory, MAX_TRAJECTORY_SAMPLES),
        "trajectory_length": r.mu_norm_trajectory.len(),
        "limit": tensor_to_value(&r.limit),
    })
}

pub fn reduction_to_value(r: &ReductionResult) -> Value {
    json!({
        "residual": r.residual,
        "g": group_triple_to_value(&r.g),
        "log": r.log,
    })
}

pub fn free_support_to_value(w: &FreeSupportWitness) -> Value {
    json!({
        "free": w.free,
        "offending_pair": w.offending_pair.map(|(a, b)| json!([index_to_value(&a), index_to_value(&b)])),
    })
}

pub fn halfspace_cert_to_value(c: &HalfspaceCert) -> Value {
    json!({
        "valid": c.valid,
        "c": rational_to_value(&c.c),
        "min_support_value": rational_to_value(&c.min_support_value),
        "minimizers": support_to_value(&c.minimizers),
        "checked": c.checked,
        "h": rational_triple_to_value(&c.h),
    })
}

pub fn hull_refutation_to_value(r: &HullRefutation) -> Value {
    json!({
        "outcome": if r.refuted { "refuted" } else { "inconclusive" },
        "refuted": r.refuted,
        "refuting_sample": r.refuting_sample,
        "residual": r.residual,
        "samples": r.samples,
        "distinct_supports": r.distinct_supports,
        "u": group_triple_to_value(&r.u),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{int, rat};
    use crate::named;

    #[test]
    fn tensor_round_trip() {
        let t = named::s2();
        let back = tensor_from_value(&tensor_to_value(&t)).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn malformed_tensors() {
        let dup = r#"{"dims":[2,2,2],"entries":[{"i":1,"j":1,"k":1,"re":1},{"i":1,"j":1,"k":1,"re":2}]}"#;
        assert_eq!(tensor_from_str(dup), Err(Error::DuplicateEntry([0, 0, 0])));
        let zero_index = r#"{"dims":[2,2,2],"entries":[{"i":0,"j":1,"k":1,"re":1}]}"#;
        assert!(matches!(tensor_from_str(zero_index), Err(Error::Format(_))));
        let range = r#"{"dims":[2,2,2],"entries":[{"i":3,"j":1,"k":1,"re":1}]}"#;
        assert!(matches!(tensor_from_str(range), Err(Error::IndexOutOfRange { .. })));
        assert!(tensor_from_str(r#"{"dims":[0,2,2]}"#).is_err());
        assert!(tensor_from_str("[1, 2").is_err());
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("17/42").unwrap(), rat(17, 42));
        assert_eq!(parse_rational("-0.25").unwrap(), rat(-1, 4));
        assert_eq!(parse_rational("1.5e-2").unwrap(), rat(3, 200));
        assert_eq!(parse_rational("3").unwrap(), int(3));
        assert_eq!(parse_rational("2E3").unwrap(), int(2000));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational(".").is_err());
        let r = rat(-5, 14);
        assert_eq!(rational_from_value(&rational_to_value(&r)).unwrap(), r);
        assert_eq!(rational_from_value(&json!(0.1)).unwrap(), rat(1, 10));
    }

    #[test]
    fn supports() {
        let v = json!([[1, 1, 2], [1, 2, 1], [2, 1, 1]]);
        let dims = support_bounding_dims(&v).unwrap();
        assert_eq!(dims, [2, 2, 2]);
        let s = support_from_value(&v, dims).unwrap();
        assert_eq!(support_to_value(&s), v);
        assert!(support_from_value(&json!([[1, 1, 1], [1, 1, 1]]), [1, 1, 1]).is_err());
    }

    #[test]
    fn halfspace_input() {
        let v = json!({"h": [[1, 0, -1], ["1"], [{"num": "1", "den": "3"}]], "c": "1/3"});
        let (h, c) = halfspace_from_value(&v).unwrap();
        assert_eq!(h[0], vec![int(1), int(0), int(-1)]);
        assert_eq!(h[2], vec![rat(1, 3)]);
        assert_eq!(c, rat(1, 3));
        assert!(halfspace_from_value(&json!({"h": [[1]], "c": 0})).is_err());
    }
}
