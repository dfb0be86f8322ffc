//! Acceptance criteria, one line each. Runs as a plain program so the lines
//! always show and the timings are not shared with other tests.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use isosine::report::{Check, VerificationReport};
use isosine::suites::{run_suite, SuiteConfig};
use isosine::transforms::{funk_hecke_multiplier, KernelKind};

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(name: &str, cfg: &SuiteConfig) -> (VerificationReport, Duration) {
    let t = Instant::now();
    let r = run_suite(name, cfg).unwrap_or_else(|e| panic!("suite {name}: {e}"));
    (r, t.elapsed())
}

fn select(r: &VerificationReport, pred: impl Fn(&str) -> bool) -> Vec<&Check> {
    r.checks.iter().filter(|c| pred(&c.name)).collect()
}

/// Pass when `checks` is non-empty and every entry passes.
fn all_pass(checks: &[&Check], what: &str) -> Outcome {
    let failed: Vec<_> = checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    Outcome {
        pass: !checks.is_empty() && failed.is_empty(),
        detail: if failed.is_empty() {
            format!("{} {what} checks", checks.len())
        } else {
            format!("{} of {} {what} checks failed, first {}", failed.len(), checks.len(), failed[0])
        },
    }
}

fn join(parts: Vec<Outcome>) -> Outcome {
    Outcome {
        pass: parts.iter().all(|o| o.pass),
        detail: parts.into_iter().map(|o| o.detail).collect::<Vec<_>>().join("; "),
    }
}

fn within_time(t: Duration, limit: f64) -> Outcome {
    Outcome { pass: t.as_secs_f64() < limit, detail: format!("{:.2}s (limit {limit}s)", t.as_secs_f64()) }
}

fn value(r: &VerificationReport, name: &str) -> f64 {
    r.checks.iter().find(|c| c.name == name).unwrap_or_else(|| panic!("no check {name}")).computed_value
}

fn constants(cfg: &SuiteConfig) -> Outcome {
    let (r, t) = run("constants", cfg);
    let c = select(&r, |n| matches!(n, "gamma_3" | "alpha_3" | "ball_volume_recurrence"));
    join(vec![all_pass(&c, "constant"), within_time(t, 1.0)])
}

fn polar_bounds(cfg: &SuiteConfig) -> Outcome {
    let mut parts = Vec::new();
    for n in [3, 4, 5] {
        let (r, t) = run("thm1", &SuiteConfig { dims: vec![n], ..cfg.clone() });
        let bodies = select(&r, |s| s.ends_with("/polar_volume"));
        let enough = Outcome { pass: bodies.len() >= 100, detail: format!("n={n}: {} measures", bodies.len()) };
        parts.push(enough);
        parts.push(all_pass(&r.checks.iter().collect::<Vec<_>>(), "bound and Lebesgue"));
        parts.push(within_time(t, 60.0));
    }
    join(parts)
}

fn comparison(cfg: &SuiteConfig) -> Outcome {
    let (r, _) = run("thm4-2", cfg);
    let c = select(&r, |n| n.ends_with("polar_volume_below_volume_over_alpha"));
    let non_even = c.iter().filter(|c| c.name.contains("random_simplex") || c.name.contains("/simplex/")).count();
    join(vec![
        all_pass(&c, "comparison"),
        Outcome { pass: non_even > 0, detail: format!("{non_even} non-even inputs") },
    ])
}

fn asymptotics(cfg: &SuiteConfig) -> Outcome {
    let (r, t) = run("thm4-4", cfg);
    let mut parts = vec![all_pass(&r.checks.iter().collect::<Vec<_>>(), "asymptotic"), within_time(t, 5.0)];
    // closed-form endpoints against the printed intervals, within one unit
    // of the last printed digit (43.4 is 43.475 truncated)
    let tab = &r.tables["cross_n3_intervals"];
    let get = |k: &str, i: usize| tab[k][i].as_f64().expect("number");
    let ends = [(get("polar", 0), 0.2850, 1e-4), (get("polar", 1), 0.4036, 1e-4), (get("volume", 0), 43.4, 0.1), (get("volume", 1), 61.6, 0.1)];
    let ok = ends.iter().all(|(v, shown, half)| (v - shown).abs() <= *half);
    parts.push(Outcome { pass: ok, detail: format!("interval endpoints {:?}", ends.map(|e| e.0)) });
    parts.push(Outcome {
        pass: true,
        detail: format!("r1(200)={:.5}", value(&r, "r1_at_200")),
    });
    join(parts)
}

fn multipliers(cfg: &SuiteConfig) -> Outcome {
    let (r, _) = run("constants", cfg);
    let c = select(&r, |n| n.starts_with("sine_"));
    let a0 = funk_hecke_multiplier(KernelKind::Sine, 3, 0).expect("multiplier");
    join(vec![all_pass(&c, "multiplier"), Outcome { pass: (a0 - PI * PI).abs() < 1e-9 * PI * PI, detail: format!("a0={a0:.12}") }])
}

fn brascamp_lieb(cfg: &SuiteConfig) -> Outcome {
    let (r, t) = run("bl", cfg);
    join(vec![all_pass(&r.checks.iter().collect::<Vec<_>>(), "duality"), within_time(t, 120.0)])
}

fn estimators(volumes: &VerificationReport, tomo: &VerificationReport) -> Outcome {
    let agree = select(volumes, |n| n.contains("volume_estimators_agree"));
    let balls = select(volumes, |n| n.contains("unit_ball/") && n.ends_with("_volume"));
    let psi = select(tomo, |n| n.ends_with("psi_volume_estimators_agree"));
    join(vec![all_pass(&agree, "estimator"), all_pass(&balls, "unit-ball"), all_pass(&psi, "Ψ-body estimator")])
}

fn tomography(tomo: &VerificationReport, t: Duration) -> Outcome {
    let eq = select(tomo, |n| n.ends_with("_equality") || n == "ball/projection_equals_psi_support");
    let bodies = select(tomo, |n| n.starts_with("body") && !n.contains("position") && !n.contains("objective"));
    let corpus = tomo.checks.iter().filter(|c| c.name.starts_with("body") && c.name.ends_with("/position_defect")).count();
    join(vec![
        all_pass(&eq, "equality"),
        all_pass(&bodies, "corpus bound"),
        Outcome { pass: corpus >= 20, detail: format!("{corpus} corpus bodies") },
        within_time(t, 120.0),
    ])
}

fn positioning(tomo: &VerificationReport) -> Outcome {
    let c = select(tomo, |n| n.starts_with("sheared_cube/") || n.ends_with("position_defect") || n.ends_with("objective_monotone"));
    all_pass(&c, "positioning")
}

fn identities(cfg: &SuiteConfig) -> Outcome {
    let (r, _) = run("identities", cfg);
    let c = select(&r, |n| n.starts_with("projection_identity_ball"));
    let ratio = value(&r, "section_ball_ratio_to_displayed_constant");
    join(vec![all_pass(&c, "projection identity"), Outcome { pass: true, detail: format!("section ratio reported: {ratio:.6}") }])
}

fn determinism(cfg: &SuiteConfig) -> Outcome {
    let small = SuiteConfig { measures: 5, bl_measures: 2, corpus: 3, samples: 20_000, ..cfg.clone() };
    let mut bad = Vec::new();
    for s in ["thm2", "bl", "tomography", "thm4-4"] {
        let a = run_suite(s, &small).expect("suite").to_json_without_timing();
        let b = run_suite(s, &small).expect("suite").to_json_without_timing();
        if a != b {
            bad.push(s);
        }
    }
    Outcome { pass: bad.is_empty(), detail: if bad.is_empty() { "4 suites byte-identical".into() } else { format!("differs: {bad:?}") } }
}

fn main() -> ExitCode {
    let cfg = SuiteConfig::default();
    let total = Instant::now();
    let mut lines: Vec<(usize, &str, Outcome)> = Vec::new();
    let mut record = |i: usize, name: &'static str, o: Outcome| {
        println!("[{}] {i:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        lines.push((i, name, o));
    };
    record(1, "constants", constants(&cfg));
    record(2, "polar volume bounds", polar_bounds(&cfg));
    let (volumes, _) = run("thm2", &cfg);
    let c = select(&volumes, |n| n.ends_with("/volume") || n.ends_with("volume_attains_upper"));
    record(3, "volume bounds", all_pass(&c, "bound and Lebesgue"));
    record(4, "polar volume against volume", comparison(&cfg));
    record(5, "asymptotic optimality", asymptotics(&cfg));
    record(6, "multipliers", multipliers(&cfg));
    record(7, "Brascamp-Lieb duality", brascamp_lieb(&cfg));
    let (tomo, tomo_t) = run("tomography", &cfg);
    record(8, "volume estimator agreement", estimators(&volumes, &tomo));
    record(9, "tomography", tomography(&tomo, tomo_t));
    record(10, "positioning", positioning(&tomo));
    record(11, "identities", identities(&cfg));
    record(12, "determinism", determinism(&cfg));
    let failed = lines.iter().filter(|l| !l.2.pass).count();
    println!("{} of {} criteria passed in {:.1}s", lines.len() - failed, lines.len(), total.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
