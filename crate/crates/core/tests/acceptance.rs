//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on failure.

use std::time::Instant;

use rand::Rng;

use nonfree::certify::{certify_family, certify_named, certify_t2_with, Named};
use nonfree::construction::{build_family_tensor, s0_tensor, verify_family_tensor, wmatrix_residuals};
use nonfree::equivalence::reduce_to_s0;
use nonfree::family::{family_data, gamma_support, halfspace_check, ness_lambda, rat, to_f64, Rational};
use nonfree::flow::{flow, max_increase, ness_minimality, FlowConfig};
use nonfree::freeness::is_free_support;
use nonfree::moment::{moment_map, HermTriple};
use nonfree::named;
use nonfree::polytope::{hull_refute, inner_points};
use nonfree::sampling::{
    random_free_support, random_on_support, random_permutation, random_tensor, random_unitary_triple, rng_from_seed,
};
use nonfree::tensor::{apply, flattening_ranks, C64};

const SEEDS: u64 = 10;
const CASES_PER_SEED: usize = 20;

struct Outcome {
    passed: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Largest entry deviation of `mu` from the given diagonal triple, off-diagonals included.
fn diag_deviation(mu: &HermTriple, d: &[[f64; 3]; 3]) -> f64 {
    let want = HermTriple::from_diagonals([&d[0], &d[1], &d[2]]);
    (0..3)
        .flat_map(|l| {
            let diff = mu.component(l) - want.component(l);
            diff.iter().map(|z| z.norm()).collect::<Vec<_>>()
        })
        .fold(0.0, f64::max)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    // S2 as printed: (1-based position, sign, square)
    let s2: [([usize; 3], f64, f64); 7] = [
        ([1, 2, 3], 1.0, 1.0 / 7.0),
        ([1, 3, 2], 1.0, 11.0 / 42.0),
        ([2, 1, 3], 1.0, 1.0 / 7.0),
        ([2, 2, 1], 1.0, 10.0 / 77.0),
        ([2, 2, 2], 1.0, 2.0 / 33.0),
        ([3, 1, 1], 1.0, 5.0 / 22.0),
        ([3, 1, 2], -1.0, 8.0 / 231.0),
    ];
    let s = apply(&named::t2_to_s2(), &named::t2()).unwrap();
    let mut coeff_dev: f64 = 0.0;
    for (idx, v) in s.iter() {
        let want = s2
            .iter()
            .find(|(p, _, _)| [p[0] - 1, p[1] - 1, p[2] - 1] == idx)
            .map_or(0.0, |(_, sign, sq)| sign * sq.sqrt());
        coeff_dev = coeff_dev.max((v - real(want)).norm());
    }
    let mu = moment_map(&s).unwrap();
    let want_mu = [
        [17.0 / 42.0, 1.0 / 3.0, 11.0 / 42.0],
        [17.0 / 42.0, 1.0 / 3.0, 11.0 / 42.0],
        [5.0 / 14.0, 5.0 / 14.0, 2.0 / 7.0],
    ];
    let mu_dev = diag_deviation(&mu, &want_mu);
    let ness = ness_minimality(&s, 1e-10).unwrap();
    let lambda_dev = (ness.lambda - 43.0 / 42.0).abs();
    let secs = start.elapsed().as_secs_f64();
    outcome(
        coeff_dev <= 1e-12 && mu_dev <= 1e-12 && lambda_dev <= 1e-10 && ness.residual <= 1e-10 && secs < 1.0,
        format!(
            "coefficient dev {coeff_dev:.1e}, mu dev {mu_dev:.1e}, |lambda - 43/42| {lambda_dev:.1e}, residual {:.1e}, {secs:.3}s",
            ness.residual
        ),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let s5 = named::s5();
    let mu = moment_map(&s5).unwrap();
    let want_mu = [
        [13.0 / 30.0, 1.0 / 3.0, 7.0 / 30.0],
        [13.0 / 30.0, 1.0 / 3.0, 7.0 / 30.0],
        [2.0 / 5.0, 2.0 / 5.0, 1.0 / 5.0],
    ];
    let mu_dev = diag_deviation(&mu, &want_mu);
    // derived oracle: <(e_i|e_j|e_k), mu(S5)> is the same rational on every support triple
    let exact_mu: [Vec<Rational>; 3] = [
        vec![rat(13, 30), rat(1, 3), rat(7, 30)],
        vec![rat(13, 30), rat(1, 3), rat(7, 30)],
        vec![rat(2, 5), rat(2, 5), rat(1, 5)],
    ];
    let support_s5 = [[1, 1, 3], [3, 1, 2], [2, 2, 1], [2, 2, 2], [1, 3, 1], [1, 3, 2]];
    let pairings: Vec<Rational> = support_s5
        .iter()
        .map(|t: &[usize; 3]| &exact_mu[0][t[0] - 1] + &exact_mu[1][t[1] - 1] + &exact_mu[2][t[2] - 1])
        .collect();
    let oracle_ok = pairings.iter().all(|p| *p == rat(16, 15));
    let ness = ness_minimality(&s5, 1e-10).unwrap();
    let lambda_dev = (ness.lambda - 16.0 / 15.0).abs();
    let r = flow(&named::t5(), &FlowConfig::default()).unwrap();
    let gap = (r.mu_norm_trajectory.last().unwrap() - mu.norm()).abs();
    let secs = start.elapsed().as_secs_f64();
    outcome(
        mu_dev <= 1e-12 && oracle_ok && lambda_dev <= 1e-10 && ness.residual <= 1e-10 && gap <= 1e-6 && secs < 30.0,
        format!(
            "mu dev {mu_dev:.1e}, pairing oracle 16/15 {oracle_ok}, |lambda - 16/15| {lambda_dev:.1e}, residual {:.1e}, flow gap {gap:.1e} after {} steps, {secs:.2}s",
            ness.residual, r.steps
        ),
    )
}

fn criterion_3() -> Outcome {
    let mut failures = Vec::new();
    for n in 3..=12 {
        let f = family_data(n).unwrap();
        for (name, ok) in f.identities() {
            if !ok {
                failures.push(format!("n={n}: {name}"));
            }
        }
    }
    let f3 = family_data(3).unwrap();
    let mu_s2 = [
        vec![rat(17, 42), rat(1, 3), rat(11, 42)],
        vec![rat(17, 42), rat(1, 3), rat(11, 42)],
        vec![rat(5, 14), rat(5, 14), rat(2, 7)],
    ];
    let q3_ok = f3.q == mu_s2;
    outcome(
        failures.is_empty() && q3_ok,
        format!("identity failures for n in 3..=12: {:?}; q(3) = mu(S2) rationals: {q3_ok}", failures),
    )
}

fn criterion_4() -> Outcome {
    let mut worst = [0.0f64; 3];
    let mut ranks_ok = true;
    for n in 3..=12 {
        let ft = build_family_tensor(n).unwrap();
        let f = family_data(n).unwrap();
        let (r1, r2) = wmatrix_residuals(&ft.w.entries, to_f64(&f.lambda_w), &ft.w.w);
        let v = verify_family_tensor(&ft, &f).unwrap();
        worst[0] = worst[0].max(r1);
        worst[1] = worst[1].max(r2);
        worst[2] = worst[2].max(v.mu_residual);
        ranks_ok &= flattening_ranks(&ft.tensor) == [n, n, n];
    }
    outcome(
        worst.iter().all(|&x| x <= 1e-10) && ranks_ok,
        format!(
            "max |W*W - lambda I| {:.1e}, max |WW* - (lambda I - ww*)| {:.1e}, max |mu(T^W) - q| {:.1e}, ranks all n: {ranks_ok}",
            worst[0], worst[1], worst[2]
        ),
    )
}

fn criterion_5() -> Outcome {
    let failed: Vec<usize> = (3..=12).filter(|&n| !certify_family(n, 1e-9).unwrap().verdict).collect();
    let t2 = certify_named(Named::T2, 1e-10).unwrap();
    let t5 = certify_named(Named::T5, 1e-10).unwrap();
    let control = certify_t2_with(&named::corrupted_t2_to_s2(), 1e-10).unwrap();
    let control_ok = !control.verdict && control.failed_stages().contains(&"moment-map");
    outcome(
        failed.is_empty() && t2.verdict && t5.verdict && control_ok,
        format!(
            "family failures {:?}, T2 {}, T5 {}, corrupted g rejected at {:?}",
            failed,
            t2.verdict,
            t5.verdict,
            control.failed_stages()
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut family_ok = true;
    for n in 3..=8 {
        match reduce_to_s0(&build_family_tensor(n).unwrap().tensor, 1e-8) {
            Ok(r) => worst = worst.max(r.residual),
            Err(_) => family_ok = false,
        }
    }
    let gamma = gamma_support(4).unwrap();
    let mut rng = rng_from_seed(6);
    let successes = (0..100)
        .filter(|_| {
            let t = random_on_support(&mut rng, &gamma).unwrap();
            reduce_to_s0(&t, 1e-8).is_ok_and(|r| r.residual <= 1e-8)
        })
        .count();
    outcome(
        family_ok && worst <= 1e-8 && successes >= 99,
        format!("T^W n in 3..=8: max residual {worst:.1e} (all reduced: {family_ok}); random on Gamma_4: {successes}/100"),
    )
}

fn criterion_7() -> Outcome {
    let config = FlowConfig::default();
    let mut details = Vec::new();
    let mut ok = true;
    let mut worst_increase: f64 = 0.0;
    let r = flow(&named::t2(), &config).unwrap();
    let last = r.mu_norm_trajectory.last().unwrap();
    let dev = (last * last - 43.0 / 42.0).abs();
    ok &= dev <= 1e-6;
    worst_increase = worst_increase.max(max_increase(&r.mu_norm_trajectory));
    details.push(format!("T2 |mu|^2 dev {dev:.1e}"));
    for n in 3..=6 {
        let r = flow(&s0_tensor(n).unwrap(), &config).unwrap();
        let last = r.mu_norm_trajectory.last().unwrap();
        let dev = (last * last - to_f64(&ness_lambda(n).unwrap())).abs();
        ok &= dev <= 1e-6;
        worst_increase = worst_increase.max(max_increase(&r.mu_norm_trajectory));
        details.push(format!("S0({n}) dev {dev:.1e}"));
    }
    ok &= worst_increase <= 1e-8;
    outcome(ok, format!("{}; max |mu| increase {worst_increase:.1e}", details.join(", ")))
}

fn random_dims<R: Rng>(rng: &mut R, max: usize) -> [usize; 3] {
    [0, 1, 2].map(|_| rng.random_range(1..=max))
}

fn criterion_8() -> Outcome {
    let mut eq_worst: f64 = 0.0;
    let mut off_worst: f64 = 0.0;
    let mut perm_ok = true;
    let mut hull_ok = true;
    let mut cases = [0usize; 4];
    for seed in 0..SEEDS {
        let mut rng = rng_from_seed(seed);
        for _ in 0..CASES_PER_SEED {
            // equivariance
            let dims = random_dims(&mut rng, 4);
            let t = random_tensor(&mut rng, dims).unwrap();
            let k = random_unitary_triple(&mut rng, dims).unwrap();
            let lhs = moment_map(&apply(k.as_group(), &t).unwrap()).unwrap();
            let rhs = moment_map(&t).unwrap().conjugated(&k).unwrap();
            eq_worst = eq_worst.max(lhs.distance(&rhs).unwrap());
            cases[0] += 1;

            // free support gives a diagonal moment map
            let dims = random_dims(&mut rng, 4);
            let s = random_free_support(&mut rng, dims, dims[0] * dims[1] * dims[2]);
            let t = random_on_support(&mut rng, &s).unwrap();
            off_worst = off_worst.max(moment_map(&t).unwrap().max_off_diagonal());
            cases[1] += 1;

            // freeness is invariant under coordinate permutations
            let dims = random_dims(&mut rng, 4);
            let target = rng.random_range(1..=dims[0] * dims[1]);
            let s = random_free_support(&mut rng, dims, target);
            let t = random_on_support(&mut rng, &s).unwrap();
            let mixed = nonfree::tensor::support(&t, 0.0);
            let mut raw = mixed.clone();
            // add a random triple, which may or may not destroy freeness
            let extra = [0, 1, 2].map(|l| rng.random_range(0..dims[l]));
            raw.insert(extra).unwrap();
            let perms = [0, 1, 2].map(|l| random_permutation(&mut rng, dims[l]));
            for set in [&mixed, &raw] {
                perm_ok &= is_free_support(set).free == is_free_support(&set.permuted(&perms).unwrap()).free;
            }
            cases[2] += 1;

            // inner points are never refuted
            let dims = random_dims(&mut rng, 3);
            let s = random_free_support(&mut rng, dims, 9);
            let t = random_on_support(&mut rng, &s).unwrap();
            let case_seed = rng.random::<u64>();
            for p in inner_points(&t).unwrap() {
                hull_ok &= !hull_refute(&t, &p, 100, case_seed).unwrap().refuted;
            }
            cases[3] += 1;
        }
    }
    let mut halfspace_ok = true;
    for n in 2..=10 {
        let r = halfspace_check(n).unwrap();
        halfspace_ok &= r.all_at_least_c && r.equality_set_is_gamma && r.min_value == nonfree::family::rat(1, n as i64);
    }
    let ok = eq_worst <= 1e-10 && off_worst <= 1e-12 && perm_ok && hull_ok && halfspace_ok && cases.iter().all(|&c| c >= 200);
    outcome(
        ok,
        format!(
            "cases {:?}; equivariance {eq_worst:.1e}, free-support off-diagonal {off_worst:.1e}, permutation invariance {perm_ok}, halfspace equality set = Gamma_n (n in 2..=10) {halfspace_ok}, inner points never refuted {hull_ok}",
            cases
        ),
    )
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("T2 pipeline", criterion_1),
        ("T5 pipeline", criterion_2),
        ("family exactness", criterion_3),
        ("W_n construction", criterion_4),
        ("non-freeness certificates", criterion_5),
        ("reduction to S0", criterion_6),
        ("gradient flow limits", criterion_7),
        ("property suites", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {} ({name}): {} [{:.2}s]", i + 1, o.detail, start.elapsed().as_secs_f64());
        if !o.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {} failed", criteria.len() - failed, failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
