use std::path::Path;

use serde_json::{json, Value};

use nonfree::certify::{certify_family, certify_named, Named};
use nonfree::construction::{build_family_tensor, s0_tensor, verify_family_tensor};
use nonfree::equivalence::reduce_to_s0;
use nonfree::family::{family_data, halfspace_check, to_f64};
use nonfree::flow::{flow, ness_minimality, FlowConfig};
use nonfree::freeness::{is_free_support, sjamaar_inner_points};
use nonfree::json as j;
use nonfree::moment::{moment_map, spec_point};
use nonfree::polytope::{hull_refute, inner_points, outer_halfspace};
use nonfree::tensor::{support, SUPPORT_TOL};
use nonfree::{Error, Tensor3};

use crate::{Command, InputError, Outcome};

type Run = Result<Outcome, InputError>;

fn read_json(path: &Path) -> Result<Value, InputError> {
    let text = std::fs::read_to_string(path).map_err(|e| InputError {
        kind: "io",
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    serde_json::from_str(&text).map_err(|e| InputError {
        kind: "malformed-json",
        message: format!("{}: {e}", path.display()),
    })
}

fn read_tensor(path: &Path) -> Result<Tensor3, InputError> {
    Ok(j::tensor_from_value(&read_json(path)?)?)
}

fn positive(name: &str, v: f64) -> Result<(), InputError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(InputError {
            kind: "invalid-config",
            message: format!("{name} must be positive and finite, got {v}"),
        })
    }
}

fn done(result: Value, verdict: bool) -> Run {
    Ok(Outcome { result, verdict })
}

pub fn run(cmd: &Command, seed: u64) -> (Value, Run) {
    let path = |p: &Path| p.display().to_string();
    match cmd {
        Command::Family { n, verify } => (json!({"n": n, "verify": verify, "seed": seed}), family(*n, *verify)),
        Command::MomentMap { input } => (json!({"input": path(input), "seed": seed}), moment(input)),
        Command::Flow { input, step, residual_tol, max_steps } => (
            json!({"input": path(input), "step": step, "residual_tol": residual_tol, "max_steps": max_steps, "seed": seed}),
            run_flow(input, *step, *residual_tol, *max_steps),
        ),
        Command::FreeSupport { input, dims } => (
            json!({"input": path(input), "dims": dims, "seed": seed}),
            free_support(input, dims.as_deref()),
        ),
        Command::CertifyNonfree { family, named, tol } => (
            json!({"family": family, "named": named, "tol": tol, "seed": seed}),
            certify(*family, named.as_deref(), *tol),
        ),
        Command::ReduceS0 { input, tol } => (json!({"input": path(input), "tol": tol, "seed": seed}), reduce(input, *tol)),
        Command::Polytope { input, halfspace, refute, inner, samples } => (
            json!({
                "input": path(input),
                "halfspace": halfspace.as_deref().map(path),
                "refute": refute.as_deref().map(path),
                "inner": inner,
                "samples": samples,
                "seed": seed,
            }),
            polytope(input, halfspace.as_deref(), refute.as_deref(), *inner, *samples, seed),
        ),
    }
}

fn family(n: usize, verify: bool) -> Run {
    let data = family_data(n)?;
    let mut result = json!({
        "data": j::family_data_to_value(&data),
        "gamma": j::support_to_value(&nonfree::family::gamma_support(n)?),
        "s0": j::tensor_to_value(&s0_tensor(n)?),
        "family_tensor": Value::Null,
    });
    let ft = if n >= 3 { Some(build_family_tensor(n)?) } else { None };
    if let Some(ft) = &ft {
        result["family_tensor"] = j::family_tensor_to_value(ft);
    }
    if !verify {
        return done(result, true);
    }
    let identities_ok = data.all_identities_hold();
    let halfspace = halfspace_check(n)?;
    let halfspace_ok = halfspace.all_at_least_c && halfspace.equality_set_is_gamma;
    let mut ok = identities_ok && halfspace_ok;
    let mut verification = json!({
        "identities": j::identities_to_value(&data),
        "halfspace": j::halfspace_report_to_value(&halfspace),
    });
    if let Some(ft) = &ft {
        let v = verify_family_tensor(ft, &data)?;
        let ness = ness_minimality(&ft.tensor, 1e-9)?;
        let lambda_ok = (ness.lambda - to_f64(&data.norm_q_sq())).abs() <= 1e-9;
        ok &= v.ok && ness.valid && lambda_ok;
        verification["family_tensor"] = j::family_verification_to_value(&v);
        verification["ness"] = j::ness_to_value(&ness);
    }
    verification["ok"] = json!(ok);
    result["verification"] = verification;
    done(result, ok)
}

fn moment(input: &Path) -> Run {
    let t = read_tensor(input)?;
    let mu = moment_map(&t)?;
    let spec = spec_point(&mu)?;
    done(
        json!({
            "mu": j::herm_triple_to_value(&mu),
            "spectra": spec.parts(),
            "mu_norm_sq": mu.norm_sq(),
            "max_off_diagonal": mu.max_off_diagonal(),
            "tensor_norm": t.norm(),
        }),
        true,
    )
}

fn run_flow(input: &Path, step: f64, residual_tol: f64, max_steps: usize) -> Run {
    positive("step", step)?;
    positive("residual-tol", residual_tol)?;
    let t = read_tensor(input)?;
    let config = FlowConfig {
        step,
        residual_tol,
        max_steps,
        snapshot_every: None,
    };
    let r = flow(&t, &config)?;
    let converged = r.converged;
    done(j::flow_to_value(&r), converged)
}

fn free_support(input: &Path, dims: Option<&[usize]>) -> Run {
    let v = read_json(input)?;
    let s = if v.is_array() {
        let dims = match dims {
            Some(d) => [d[0], d[1], d[2]],
            None => j::support_bounding_dims(&v)?,
        };
        j::support_from_value(&v, dims)?
    } else {
        support(&j::tensor_from_value(&v)?, SUPPORT_TOL)
    };
    let w = is_free_support(&s);
    let mut result = j::free_support_to_value(&w);
    result["support"] = j::support_to_value(&s);
    result["size"] = json!(s.len());
    if w.free {
        let pts = sjamaar_inner_points(&s)?;
        result["inner_points"] = Value::Array(pts.iter().map(j::weyl_point_to_value).collect());
    }
    done(result, w.free)
}

fn certify(family: Option<usize>, named: Option<&str>, tol: f64) -> Run {
    positive("tol", tol)?;
    let report = match (family, named) {
        (Some(n), _) => certify_family(n, tol)?,
        (None, Some(name)) => certify_named(name.parse::<Named>()?, tol)?,
        (None, None) => {
            return Err(InputError {
                kind: "usage",
                message: "one of --family or --named is required".into(),
            })
        }
    };
    let verdict = report.verdict;
    done(j::report_to_value(&report), verdict)
}

fn reduce(input: &Path, tol: f64) -> Run {
    positive("tol", tol)?;
    let t = read_tensor(input)?;
    match reduce_to_s0(&t, tol) {
        Ok(r) => {
            let mut v = j::reduction_to_value(&r);
            v["reduced"] = json!(true);
            done(v, true)
        }
        Err(
            e @ (Error::SupportEscapesGamma(_)
            | Error::ZeroAEntry(_)
            | Error::RankDeficient(..)
            | Error::InconsistentScaling(_)),
        ) => done(json!({"reduced": false, "reason": e.to_string()}), false),
        Err(e) => Err(e.into()),
    }
}

fn polytope(
    input: &Path,
    halfspace: Option<&Path>,
    refute: Option<&Path>,
    inner: bool,
    samples: usize,
    seed: u64,
) -> Run {
    let t = read_tensor(input)?;
    if let Some(h) = halfspace {
        let (h, c) = j::halfspace_from_value(&read_json(h)?)?;
        let cert = outer_halfspace(&t, &h, &c)?;
        let valid = cert.valid;
        return done(j::halfspace_cert_to_value(&cert), valid);
    }
    if let Some(p) = refute {
        let p = j::weyl_point_from_value(&read_json(p)?)?;
        let r = hull_refute(&t, &p, samples, seed)?;
        let refuted = r.refuted;
        return done(j::hull_refutation_to_value(&r), refuted);
    }
    if inner {
        return match inner_points(&t) {
            Ok(pts) => done(
                json!({"inner_points": pts.iter().map(j::weyl_point_to_value).collect::<Vec<_>>()}),
                true,
            ),
            Err(e @ Error::NonFreeSupport(..)) => done(json!({"inner_points": null, "reason": e.to_string()}), false),
            Err(e) => Err(e.into()),
        };
    }
    Err(InputError {
        kind: "usage",
        message: "one of --halfspace, --refute or --inner is required".into(),
    })
}
