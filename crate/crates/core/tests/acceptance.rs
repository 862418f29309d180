//! One line per acceptance criterion. Criteria whose failures are known and
//! analysed are pinned to their exact failing checks, so any other change in
//! outcome still breaks the test.

use std::io::Write;
use std::time::{Duration, Instant};

use monodromy::suites::{run_suite, Options, Status, Suite, SuiteReport};

struct Criterion {
    number: u32,
    title: &'static str,
    suite: Suite,
    budget: Duration,
    /// Checks expected to fail.
    known_failures: &'static [&'static str],
}

const CRITERIA: &[Criterion] = &[
    Criterion { number: 1, title: "R-matrix identities", suite: Suite::RMatrix, budget: Duration::from_secs(10), known_failures: &[] },
    Criterion {
        number: 2,
        title: "quantum exchange relations",
        suite: Suite::QuantumRelations,
        budget: Duration::from_secs(120),
        known_failures: &[],
    },
    Criterion {
        number: 3,
        title: "positivity and hermiticity",
        suite: Suite::Positivity,
        budget: Duration::from_secs(60),
        known_failures: &[
            "hermitian-lambda/fig1",
            "hermitian-lambda/s031",
            "hermitian-lambda/s032",
            "hermitian-lambda/ann0",
            "hermitian-lambda/eye",
        ],
    },
    Criterion {
        number: 4,
        title: "semiclassical tables",
        suite: Suite::PoissonTables,
        budget: Duration::from_secs(60),
        known_failures: &["open-self-k2", "closed-open-k2", "open-self-k3", "closed-open-k3", "open-self-k4", "closed-open-k4"],
    },
    Criterion { number: 5, title: "Jacobi identity", suite: Suite::Jacobi, budget: Duration::from_secs(300), known_failures: &[] },
    Criterion { number: 6, title: "Casimirs", suite: Suite::Casimirs, budget: Duration::from_secs(300), known_failures: &[] },
    Criterion { number: 7, title: "leaf dimensions", suite: Suite::Ranks, budget: Duration::from_secs(300), known_failures: &[] },
    Criterion { number: 8, title: "braid action and IHX", suite: Suite::BraidIhx, budget: Duration::from_secs(120), known_failures: &[] },
    Criterion { number: 9, title: "flip invariance", suite: Suite::Flips, budget: Duration::from_secs(120), known_failures: &[] },
    Criterion { number: 10, title: "Poisson reduction", suite: Suite::Reduction, budget: Duration::from_secs(120), known_failures: &[] },
];

fn failures(r: &SuiteReport) -> Vec<&str> {
    r.checks.iter().filter(|c| c.status == Status::Fail).map(|c| c.check_id.as_str()).collect()
}

#[test]
fn acceptance_criteria() {
    let opts = Options { seed: Some(20240917), ..Options::default() };
    let mut surprises = Vec::new();
    let mut err = std::io::stderr();
    for c in CRITERIA {
        let t = Instant::now();
        let report = run_suite(c.suite, &opts).expect("suite runs");
        let elapsed = t.elapsed();
        let failed = failures(&report);
        let ok = failed.is_empty() && elapsed <= c.budget;
        let line = format!(
            "criterion {:>2} {:<28} {}  ({} checks, {} adjudicated, {:.1} s)",
            c.number,
            c.title,
            if ok { "PASS" } else { "FAIL" },
            report.checks.len(),
            report.count(Status::Adjudicated),
            elapsed.as_secs_f64()
        );
        // written past the test harness capture so the lines always show
        writeln!(err, "{line}").unwrap();
        for f in &failed {
            writeln!(err, "    failing check: {f}").unwrap();
        }
        if failed != c.known_failures {
            surprises.push(format!("criterion {}: failing checks {failed:?}, expected {:?}", c.number, c.known_failures));
        }
        if elapsed > c.budget && !cfg!(debug_assertions) {
            surprises.push(format!("criterion {}: {elapsed:?} over budget", c.number));
        }
    }
    assert!(surprises.is_empty(), "{}", surprises.join("\n"));
}
