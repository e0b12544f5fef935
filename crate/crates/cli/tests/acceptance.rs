//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use ultracon_core::sweep::{self, SweepConfig, SweepReport};
use ultracon_core::ultrafilter::{all_families, check_4star, check_axioms};
use ultracon_core::{con_lattice, con_lattice_bruteforce, corpus, enumerate_ultrafilters, Algebra};

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn con_lattice_oracle() -> Outcome {
    let algebras: Vec<Algebra> = corpus::all()
        .into_iter()
        .filter(|a| a.size() <= 6)
        .collect();
    let mut mismatched = Vec::new();
    for a in &algebras {
        let fast = con_lattice(a).unwrap();
        let brute = con_lattice_bruteforce(a).unwrap();
        if fast.congruences() != brute.congruences() {
            mismatched.push(a.name().to_string());
        }
    }
    let size = |a: Algebra| con_lattice(&a).unwrap().len();
    let named = (size(corpus::c3()), size(corpus::s2()), size(corpus::z3()));
    let required = ["S2", "C3", "C4", "Z2", "Z3", "Z4", "G3", "U3"];
    let covered = required
        .iter()
        .all(|n| algebras.iter().any(|a| a.name() == *n));
    outcome(
        algebras.len() >= 10 && covered && mismatched.is_empty() && named == (4, 2, 2),
        format!(
            "{} algebras, mismatches {mismatched:?}, |Con(C3)|,|Con(S2)|,|Con(Z3)| = {named:?}",
            algebras.len()
        ),
    )
}

fn ultrafilter_characterization() -> Outcome {
    let mut problems = Vec::new();
    let mut filters = 0;
    for n in 1..=4 {
        let found = enumerate_ultrafilters(n).unwrap();
        let principal = found.iter().all(|d| d.principal_index().is_some());
        if found.len() != n || !principal {
            problems.push(format!("n={n}: {} ultrafilters", found.len()));
        }
        for fam in all_families(n).unwrap() {
            let report = check_axioms(n, &fam).unwrap();
            if report.is_filter() {
                filters += 1;
                if report.is_ultrafilter() != check_4star(n, &fam).unwrap() {
                    problems.push(format!("n={n}: (4) and (4*) disagree on {fam:?}"));
                }
            }
        }
    }
    outcome(
        problems.is_empty(),
        format!("n = 1..4, {filters} filters compared, problems {problems:?}"),
    )
}

fn sweep_outcome(report: &SweepReport, elapsed: Duration, limit: Duration) -> Outcome {
    let sampled = report
        .reports
        .iter()
        .filter(|r| !r.instance.exhaustive && r.instance.family_space <= 4096)
        .count();
    let first = report
        .failed()
        .next()
        .map(|r| {
            let names: Vec<&str> = r.failed_checks().map(|c| c.name.as_str()).collect();
            format!(
                ", first failure {:?} {} {names:?}",
                r.instance.factors, r.instance.ultrafilter
            )
        })
        .unwrap_or_default();
    outcome(
        report.passed && report.instances > 0 && sampled == 0 && elapsed < limit,
        format!(
            "{} instances, {} failures, {:.2}s{first}",
            report.instances,
            report.failures,
            elapsed.as_secs_f64()
        ),
    )
}

fn timed_sweep(f: fn(&[Algebra], &SweepConfig) -> ultracon_core::Result<SweepReport>) -> Outcome {
    let start = Instant::now();
    match f(&corpus::all(), &SweepConfig::default()) {
        Ok(r) => sweep_outcome(&r, start.elapsed(), Duration::from_secs(60)),
        Err(e) => outcome(false, format!("error: {e}")),
    }
}

fn determinism() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_ultracon");
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data");
    let dir = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 3] = [
        &[
            "thm1",
            "--factors",
            "c3.json",
            "c3.json",
            "--ultrafilter",
            "principal:0",
        ],
        // forces seeded sampling
        &[
            "thm1",
            "--factors",
            "c4.json",
            "c4.json",
            "--ultrafilter",
            "principal:1",
            "--max-exhaustive",
            "20",
            "--samples",
            "12",
            "--seed",
            "7",
        ],
        &[
            "thm3",
            "--algebra",
            "c3.json",
            "--index-size",
            "3",
            "--ultrafilter",
            "principal:2",
        ],
    ];
    let mut details = Vec::new();
    let mut ok = true;
    for (k, args) in runs.iter().enumerate() {
        let mut reports = Vec::new();
        for copy in 0..2 {
            let path = dir.path().join(format!("r{k}-{copy}.json"));
            let status = Command::new(exe)
                .current_dir(data)
                .arg("verify")
                .args(*args)
                .arg("--report")
                .arg(&path)
                .output()
                .unwrap()
                .status;
            ok &= status.success();
            reports.push(std::fs::read(&path).unwrap_or_default());
        }
        let same = !reports[0].is_empty() && reports[0] == reports[1];
        ok &= same;
        details.push(format!(
            "{} {}",
            args[0],
            if same { "identical" } else { "DIFFER" }
        ));
    }
    outcome(ok, details.join(", "))
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 7] = [
        ("congruence-lattice oracle equivalence", con_lattice_oracle),
        ("ultrafilter characterization", ultrafilter_characterization),
        ("theorem 1 sweep", || timed_sweep(sweep::sweep_thm1)),
        ("theorem 2 sweep", || timed_sweep(sweep::sweep_thm2)),
        ("theorem 3 sweep", || timed_sweep(sweep::sweep_thm3)),
        ("principal collapse", || timed_sweep(sweep::sweep_collapse)),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let r = check();
        let verdict = if r.ok { "PASS" } else { "FAIL" };
        println!(
            "acceptance {verdict} {name}: {} [{:.2}s]",
            r.detail,
            start.elapsed().as_secs_f64()
        );
        failures += usize::from(!r.ok);
    }
    println!("acceptance: {} of 7 criteria passed", 7 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
