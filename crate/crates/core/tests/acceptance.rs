//! One line per acceptance criterion. Runs as a plain binary (no libtest
//! harness) so the lines come out in order.

use std::collections::HashSet;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hororatio::actions::{registry_get, FiniteAction, NonSingularAction, XPoint};
use hororatio::boundary::{act, horoball, horosphere_contains, BoundaryPrefix, Cylinder};
use hororatio::free_group::{ball, enumerate_nonbacktracking, Letter, ReducedWord};
use hororatio::harness::{
    boundary_integral, run_audit_suite, run_counterexample_j, run_ratio_convergence, ExperimentConfig,
    PointFunction,
};
use hororatio::relation_engine::{
    check_properties, integrate, random_skew_model, skew_extend, u_phi, weighted_sum, Cocycle, HoroballSequence,
    InnerAutomorphism, PrefixAutomorphism, Scalar, SubsetFunctionSeq, TailCocycle, ANCHORED, BESICOVICH,
    INVARIANCE,
};

type Outcome = (bool, String);

/// The stated constant `p/(p−1)` is false in general (see the geometric chain
/// unit test in the maximal module); this line is printed but not fatal.
const KNOWN_FAILING: &[usize] = &[5];

fn cfg(text: &str) -> ExperimentConfig {
    ExperimentConfig::parse(text).expect("valid config")
}

fn secs(d: Duration) -> String {
    format!("{:.1}s", d.as_secs_f64())
}

fn sample_xi(rank: usize, rng: &mut ChaCha8Rng, depth: usize) -> BoundaryPrefix {
    BoundaryPrefix::sample(rank, rng.random(), depth)
}

fn boundary_ratio_limit() -> Outcome {
    let start = Instant::now();
    let c = cfg("rank = 2\nn_max = 8\nsamples = 100\nseed = 1\nu_cylinders = a1=1");
    let run = run_ratio_convergence(&c).expect("run");
    let elapsed = start.elapsed();
    let ratios = run.final_ratios();
    let worst = ratios.iter().map(|r| (r - 0.25).abs()).fold(0.0, f64::max);
    let pass = ratios.len() == 100 && worst <= 0.01 && elapsed < Duration::from_secs(60);
    (pass, format!("100 samples, max |RATIO_8 - 1/4| = {worst:.3e}, {}", secs(elapsed)))
}

fn horoball_combinatorics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut failures = Vec::new();
    let mut sizes = 0;
    for (rank, points) in [(2usize, 6usize), (3, 2)] {
        for _ in 0..points {
            let xi = sample_xi(rank, &mut rng, 12);
            for n in 0..=8usize {
                let b = horoball(&xi, n as i64).expect("ball");
                sizes += 1;
                if b.len() != (2 * rank - 1).pow(n as u32) {
                    failures.push(format!("|B_{n}| = {} at r = {rank}", b.len()));
                }
                if !b.points().any(|p| *p == xi) {
                    failures.push(format!("center missing from B_{n} at r = {rank}"));
                }
                // brute force: {g⁻¹ξ : g ∈ H_ξ, |g| ≤ 2n}
                if n <= 3 {
                    let direct: HashSet<BoundaryPrefix> = ball(rank, 2 * n)
                        .into_iter()
                        .filter(|g| horosphere_contains(g, &xi))
                        .map(|g| act(&g.inverse(), &xi).expect("act").point)
                        .collect();
                    let listed: HashSet<BoundaryPrefix> = b.points().cloned().collect();
                    if direct != listed {
                        failures.push(format!("B_{n} differs from the horosphere image at r = {rank}"));
                    }
                }
            }
        }
    }
    // equal-or-disjoint on 1000 pairs per n
    let mut pairs = 0;
    for n in 0..=8usize {
        let anchors: Vec<BoundaryPrefix> = (0..10).map(|_| sample_xi(2, &mut rng, 12)).collect();
        for xi in &anchors {
            let own = horoball(xi, n as i64).expect("ball");
            let own_set: HashSet<&BoundaryPrefix> = own.points().collect();
            let wider = horoball(xi, (n + 1) as i64).expect("ball");
            for k in 0..100 {
                let eta = match k % 3 {
                    0 => own.members[rng.random_range(0..own.len())].0.clone(),
                    1 => wider.members[rng.random_range(0..wider.len())].0.clone(),
                    _ => sample_xi(2, &mut rng, 12),
                };
                let other = horoball(&eta, n as i64).expect("ball");
                let other_set: HashSet<&BoundaryPrefix> = other.points().collect();
                let related = own_set.contains(&eta);
                let ok = if related { own_set == other_set } else { own_set.is_disjoint(&other_set) };
                if !ok {
                    failures.push(format!("pair at n = {n} is neither equal nor disjoint"));
                }
                pairs += 1;
            }
        }
    }
    (
        failures.is_empty(),
        format!("{sizes} balls sized, {pairs} pairs; {} failures {:?}", failures.len(), failures.first()),
    )
}

fn rn_formula() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let words = ball(2, 6);
    let mut failures = 0usize;
    let mut checks = 0usize;
    for _ in 0..1000 {
        let xi = sample_xi(2, &mut rng, 8);
        for g in &words {
            let d = g.len() + 1;
            let r = act(g, &xi).expect("act");
            let c = Cylinder::new(2, xi.prefix(d)).expect("cylinder");
            let image_depth = (d as i64 - r.rn_exponent) as usize;
            let gc = Cylinder::new(2, r.point.prefix(image_depth)).expect("cylinder");
            if gc.measure() / c.measure() != r.rn_value() {
                failures += 1;
            }
            checks += 1;
        }
    }
    (failures == 0, format!("{checks} (g, xi) pairs with |g| <= 6, {failures} mismatches"))
}

fn maximal_audits() -> (Outcome, Outcome) {
    let start = Instant::now();
    let c = cfg("rank = 2\nn_max = 4\nmodels = 1000\nseed = 2024\np_values = 1.5, 2, 4");
    let run = run_audit_suite(&c).expect("audit");
    let elapsed = start.elapsed();
    let errors = run.model_errors().count();
    let weak = run.weak_violations();
    let models = run.models.len() - errors;
    let max_points = run.models.iter().map(|m| m.points).max().unwrap_or(0);
    let weak_line = (
        weak == 0 && errors == 0 && max_points <= 64 && elapsed < Duration::from_secs(30),
        format!(
            "{models} models (<= {max_points} points) x 20 eps, {weak} violations, {errors} errors, {}",
            secs(elapsed)
        ),
    );
    let (stated, doob) = run.lp_violations(&c.p_values);
    let lp_line = (
        stated.iter().all(|&k| k == 0) && errors == 0,
        format!(
            "stated constant p/(p-1) violated {stated:?} times for p = {:?}; (p/(p-1))^p violated {doob:?} times",
            c.p_values
        ),
    );
    (weak_line, lp_line)
}

fn random_cylinder_spec(rng: &mut ChaCha8Rng) -> ExperimentConfig {
    let depth = rng.random_range(1..=3);
    let entries: Vec<String> = (0..rng.random_range(1..=4))
        .map(|_| {
            let len = rng.random_range(1..=depth);
            let mut letters = vec![Letter::from_code(rng.random_range(0..4))];
            while letters.len() < len {
                let prev = *letters.last().unwrap();
                let next: Vec<Letter> = Letter::successors(2, prev).collect();
                letters.push(next[rng.random_range(0..next.len())]);
            }
            let w = ReducedWord::from_letters(2, letters).unwrap();
            format!("{w}={}", rng.random_range(-8..=8) as f64 / 4.0)
        })
        .collect();
    let default = rng.random_range(0..=4) as f64 / 2.0;
    cfg(&format!("u_cylinders = {}\nu_default = {default}", entries.join("; ")))
}

fn u_phi_vanishing() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let seq = HoroballSequence::new(2);
    let mut checks = 0;
    let mut failures = Vec::new();
    for _ in 0..100 {
        let m = rng.random_range(1..=4);
        let phi = PrefixAutomorphism::random(2, m, &mut rng);
        let f = PointFunction::new(&random_cylinder_spec(&mut rng).u).unwrap();
        let u = |b: &BoundaryPrefix| f.eval(&(b.clone(), XPoint::Unit));
        let xi = sample_xi(2, &mut rng, 12);
        let uf = u_phi(&seq, &u, &phi);
        for n in m + 1..=8 {
            let s = weighted_sum(&seq, &uf, &xi, n).expect("sum");
            checks += 1;
            if !(s.is_exact() && s.is_zero()) {
                failures.push(format!("order {m}, n = {n}: {s}"));
            }
        }
    }
    (
        failures.is_empty(),
        format!("100 automorphisms of order <= 4, {checks} sums, {} nonzero {:?}", failures.len(), failures.first()),
    )
}

fn sum_at(seq: &HoroballSequence, f: &PointFunction, letters: Vec<Letter>, n: usize) -> BigRational {
    let xi = BoundaryPrefix::from_letters(2, letters, 99, 0).unwrap();
    let s = weighted_sum(seq, &|b: &BoundaryPrefix| f.eval(&(b.clone(), XPoint::Unit)), &xi, n).unwrap();
    s.as_exact().expect("exact sum").clone()
}

/// `∫ SUMₙ[u] dν` over all cylinders of depth `n + depth(u)`, which determine
/// `SUMₙ[u]`.
fn integral_of_sum_full(seq: &HoroballSequence, f: &PointFunction, n: usize, depth: usize) -> BigRational {
    let mut total = BigRational::zero();
    for w in enumerate_nonbacktracking(2, n + depth.max(1), None) {
        let c = Cylinder::new(2, w.letters().to_vec()).unwrap();
        total += sum_at(seq, f, w.letters().to_vec(), n) * c.measure();
    }
    total
}

/// Same integral through the letters that matter: `SUMₙ[u](ξ)` depends only on
/// `ξ_{n+1}, …, ξ_{n+k}` with `k = max(1, depth − n)`, and `ν` is shift
/// invariant, so those letters have the law of a depth-`k` cylinder.
fn integral_of_sum(seq: &HoroballSequence, f: &PointFunction, n: usize, depth: usize) -> BigRational {
    let k = depth.saturating_sub(n).max(1);
    let mut total = BigRational::zero();
    for v in enumerate_nonbacktracking(2, k, None) {
        let c = Cylinder::new(2, v.letters().to_vec()).unwrap();
        let head = enumerate_nonbacktracking(2, n, Some(v.letters()[0].inverse())).swap_remove(0);
        let letters = head.letters().iter().chain(v.letters()).copied().collect();
        total += sum_at(seq, f, letters, n) * c.measure();
    }
    total
}

fn mass_transport() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let seq = HoroballSequence::new(2);
    let mut failures = Vec::new();
    let mut checks = 0;
    for _ in 0..20 {
        let spec = random_cylinder_spec(&mut rng);
        let f = PointFunction::new(&spec.u).unwrap();
        let integral = boundary_integral(&spec.u, 2).unwrap();
        for n in 0..=6usize {
            let lhs = integral_of_sum(&seq, &f, n, spec.u.depth());
            if n <= 3 && integral_of_sum_full(&seq, &f, n, spec.u.depth()) != lhs {
                failures.push(format!("n = {n}: cylinder sum disagrees with the marginal sum"));
            }
            let rhs = &integral * BigRational::from_integer(3u32.pow(n as u32).into());
            checks += 1;
            if lhs != rhs {
                failures.push(format!("n = {n}: {lhs} vs {rhs}"));
            }
        }
    }
    for _ in 0..100 {
        let model = random_skew_model(&mut rng).unwrap();
        let u: Vec<Scalar> = (0..model.len())
            .map(|_| Scalar::ratio(rng.random_range(-6..=6), rng.random_range(1..=3)))
            .collect();
        let table = |b: &usize| Ok(u[*b].clone());
        for n in 0..=model.max_level() {
            let sums: Vec<Scalar> = (0..model.len()).map(|b| weighted_sum(&model, &table, &b, n).unwrap()).collect();
            let coverage = model.coverage_counts(n);
            let weighted: Vec<Scalar> = (0..model.len()).map(|b| &u[b] * &Scalar::int(coverage[b] as i64)).collect();
            checks += 1;
            if integrate(&model, &sums) != integrate(&model, &weighted) {
                failures.push(format!("finite model at n = {n}"));
            }
        }
    }
    (
        failures.is_empty(),
        format!("{checks} exact identities (boundary n <= 6, 100 finite models), {} failures {:?}", failures.len(), failures.first()),
    )
}

fn skew_transfer() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut detail = Vec::new();
    let mut pass = true;
    for trial in 0..3 {
        let fiber = FiniteAction::random(2, rng.random_range(2..=4), &mut rng);
        let points_x = fiber.len();
        let xis: Vec<BoundaryPrefix> = (0..2).map(|_| sample_xi(2, &mut rng, 10)).collect();
        let skew = skew_extend(HoroballSequence::new(2), TailCocycle, std::sync::Arc::new(fiber), &xis, 4).unwrap();
        let points: Vec<(BoundaryPrefix, XPoint)> =
            xis.iter().flat_map(|xi| (0..points_x).map(move |x| (xi.clone(), XPoint::Index(x)))).collect();
        let mut pairs = Vec::new();
        for p in &points {
            let members = skew.members(p, 3).unwrap();
            pairs.extend(members.iter().step_by(5).map(|m| (p.clone(), m.point.clone())));
        }
        pairs.push((points[0].clone(), points[points.len() - 1].clone()));
        let phis: Vec<PrefixAutomorphism> = (1..=3).map(|m| PrefixAutomorphism::random(2, m, &mut rng)).collect();
        let lifts: Vec<_> = phis.iter().map(|p| skew.lift(p)).collect();
        let dyn_lifts: Vec<&dyn InnerAutomorphism<(BoundaryPrefix, XPoint)>> =
            lifts.iter().map(|l| l as &dyn InnerAutomorphism<_>).collect();
        let r = check_properties(&skew, &points, &pairs, &dyn_lifts, 6).unwrap();
        for prop in [ANCHORED, BESICOVICH, INVARIANCE] {
            let row = r.get(prop).unwrap();
            if !row.outcome.passed() {
                pass = false;
                detail.push(format!("trial {trial} {prop}: {}", row.outcome));
            }
        }
        detail.push(format!("trial {trial}: {} checks", r.rows.iter().map(|x| x.checks).sum::<usize>()));
    }
    (pass, detail.join("; "))
}

fn so3_probability_case() -> Outcome {
    let start = Instant::now();
    let c = cfg("rank = 2\nn_max = 7\nsamples = 50\nseed = 9\naction = so3_sphere\nu_x = cap 0,0,1 0.6");
    let run = run_ratio_convergence(&c).expect("run");
    let elapsed = start.elapsed();
    let mut devs: Vec<f64> = run.final_ratios().iter().map(|r| (r - 0.2).abs()).collect();
    devs.sort_by(f64::total_cmp);
    let median = if devs.is_empty() {
        f64::NAN
    } else {
        (devs[(devs.len() - 1) / 2] + devs[devs.len() / 2]) / 2.0
    };
    let pass = devs.len() == 50 && median <= 0.1 && elapsed < Duration::from_secs(600);
    (pass, format!("50 samples, median |RATIO_7 - 0.2| = {median:.3e}, {}", secs(elapsed)))
}

fn counterexample_invariant() -> Outcome {
    let c = cfg("rank = 2\nsamples = 100\nmoves = 20\nwindow = 6\nmove_bound = 6\nseed = 10");
    let run = run_counterexample_j(&c).expect("run");
    let equal = run.rows.iter().filter(|r| r.equal).count();
    let pass = run.rows.len() == 2000 && run.all_equal() && run.distinct_windows >= 2;
    (
        pass,
        format!(
            "{equal}/{} moves keep the window, {} distinct windows, {} resampled",
            run.rows.len(),
            run.distinct_windows,
            run.resampled
        ),
    )
}

fn cocycle_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let seq = HoroballSequence::new(2);
    let mut failures = Vec::new();
    for t in 0..10_000 {
        let xi = sample_xi(2, &mut rng, 10);
        let n = rng.random_range(0..=5);
        let ball = horoball(&xi, n).unwrap();
        let eta = &ball.members[rng.random_range(0..ball.len())].0;
        let zeta = &ball.members[rng.random_range(0..ball.len())].0;
        let a = |to: &BoundaryPrefix, from: &BoundaryPrefix| TailCocycle.alpha(to, from).unwrap();
        if a(zeta, eta).multiply(&a(eta, &xi)).unwrap() != a(zeta, &xi) {
            failures.push(format!("alpha, triple {t}"));
        }
        if act(&a(eta, &xi), &xi).unwrap().point != *eta {
            failures.push(format!("alpha does not carry, triple {t}"));
        }
        let d = |to: &BoundaryPrefix, from: &BoundaryPrefix| seq.cocycle_d(to, from).unwrap();
        if &d(zeta, eta) * &d(eta, &xi) != d(zeta, &xi) {
            failures.push(format!("D, triple {t}"));
        }
    }
    // D on finite models is a genuine mass ratio
    let mut model_triples = 0;
    for _ in 0..200 {
        let model = random_skew_model(&mut rng).unwrap();
        for class in model.classes() {
            for _ in 0..10 {
                let pick = |rng: &mut ChaCha8Rng| class[rng.random_range(0..class.len())];
                let (a, b, c) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
                let d = |x: usize, y: usize| model.cocycle_d(&x, &y).unwrap();
                model_triples += 1;
                if &d(c, b) * &d(b, a) != d(c, a) {
                    failures.push("D on a finite model".into());
                }
            }
        }
    }
    // rn cocycle per action
    let mut rn_checks = 0;
    let actions: Vec<std::sync::Arc<dyn NonSingularAction>> = vec![
        registry_get("trivial", 2).unwrap(),
        std::sync::Arc::new(FiniteAction::random(2, 5, &mut rng)),
        registry_get("so3_sphere", 2).unwrap(),
        registry_get("sanov_plane", 2).unwrap(),
        registry_get("boundary_pair", 2).unwrap(),
    ];
    let words = ball(2, 6);
    for action in &actions {
        let tol = action.tolerance();
        for _ in 0..500 {
            let (x, _) = action.sample_point(rng.random()).unwrap();
            let g = &words[rng.random_range(0..words.len())];
            let h = &words[rng.random_range(0..words.len())];
            let joint = action.rn(&g.multiply(h).unwrap(), &x).unwrap();
            let hx = action.apply_word(h, &x).unwrap();
            let split = &action.rn(g, &hx).unwrap() * &action.rn(h, &x).unwrap();
            rn_checks += 1;
            let ok = if action.is_exact() {
                joint == split
            } else {
                (joint.to_f64() - split.to_f64()).abs() <= tol * joint.to_f64().abs().max(1.0)
            };
            if !ok {
                failures.push(format!("rn cocycle for {}", action.id()));
            }
        }
    }
    (
        failures.is_empty(),
        format!(
            "10000 boundary triples, {model_triples} finite-model triples, {rn_checks} rn checks over 5 actions; {} failures {:?}",
            failures.len(),
            failures.first()
        ),
    )
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_hororatio");
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    };
    let fiber = write("fiber.txt", "points = 3\nweights = 1, 2, 1/2\na1 = 1 2 0\na2 = 0 2 1\n");
    let jobs = [
        ("ratio-converge", write("r.cfg", "n_max = 6\nsamples = 24\nseed = 5\nu_cylinders = a1=1; a2.a1=0.5")),
        (
            "ratio-converge",
            write("s.cfg", "n_max = 4\nsamples = 12\nseed = 5\naction = so3_sphere\nu_x = cap 1,1,0 0.3"),
        ),
        (
            "audit",
            write("a.cfg", &format!("n_max = 4\nmodels = 150\nseed = 5\naction = finite_model:{}", fiber.display())),
        ),
        ("counterexample-j", write("j.cfg", "samples = 30\nmoves = 10\nseed = 5")),
    ];
    let mut compared = 0;
    let mut mismatches = Vec::new();
    for (i, (cmd, config)) in jobs.iter().enumerate() {
        let mut outputs = Vec::new();
        for threads in ["1", "3"] {
            let out = dir.path().join(format!("{i}-{threads}.csv"));
            let status = Command::new(bin)
                .args([*cmd, "--config"])
                .arg(config)
                .arg("--out")
                .arg(&out)
                .args(["--threads", threads])
                .output()
                .unwrap();
            if !status.status.success() {
                mismatches.push(format!("{cmd} failed: {}", String::from_utf8_lossy(&status.stderr)));
            }
            let mut files = vec![out.clone()];
            if *cmd == "audit" {
                files.push(out.with_extension("lp.csv"));
                files.push(out.with_extension("properties.csv"));
            }
            outputs.push(files.iter().map(|f| std::fs::read(f).unwrap_or_default()).collect::<Vec<_>>());
        }
        for (a, b) in outputs[0].iter().zip(&outputs[1]) {
            compared += 1;
            if a != b || a.is_empty() {
                mismatches.push(format!("{cmd} output differs across thread counts"));
            }
        }
    }
    (
        mismatches.is_empty(),
        format!("{compared} CSV files compared across --threads 1 and 3; {mismatches:?}"),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let (weak, lp) = maximal_audits();
    let results: Vec<(usize, &str, Outcome)> = vec![
        (1, "boundary ratio limit", boundary_ratio_limit()),
        (2, "horoball combinatorics", horoball_combinatorics()),
        (3, "RN formula audit", rn_formula()),
        (4, "weak-type (1,1) maximal inequality", weak),
        (5, "Lp maximal inequality, stated constant", lp),
        (6, "u_phi vanishing", u_phi_vanishing()),
        (7, "mass transport", mass_transport()),
        (8, "skew-product transfer", skew_transfer()),
        (9, "so3 measure-preserving limit", so3_probability_case()),
        (10, "J-window invariance", counterexample_invariant()),
        (11, "cocycle identities", cocycle_identities()),
        (12, "determinism across thread counts", determinism()),
    ];
    let mut fatal = false;
    for (id, name, (pass, detail)) in &results {
        let tag = if *pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {tag}  {name}: {detail}");
        if !pass && !KNOWN_FAILING.contains(id) {
            fatal = true;
        }
    }
    println!("acceptance finished in {}", secs(start.elapsed()));
    if fatal {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
