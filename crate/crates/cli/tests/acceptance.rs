use std::process::ExitCode;
use std::time::{Duration, Instant};

use weil_cli::report::SuiteResult;
use weil_cli::suites::{self, Context};
use weil_cli::RunConfig;

struct Line {
    ok: bool,
    detail: Vec<String>,
}

impl Line {
    fn new() -> Self {
        Self { ok: true, detail: Vec::new() }
    }

    fn require(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        if !ok {
            self.ok = false;
            self.detail.push(format!("FAILED {what}"));
        } else {
            self.detail.push(what);
        }
    }

    fn suite(&mut self, label: &str, s: &SuiteResult, scope: Option<&str>, checked: Option<u64>) {
        let mut ok = s.passed;
        if let Some(sc) = scope {
            ok &= s.scope == sc;
        }
        if let Some(c) = checked {
            ok &= s.checked == c;
        }
        let mut text = format!("{label} {} {} checks", s.scope, s.checked);
        if let Some(f) = s.failures.first() {
            text.push_str(&format!(" ({f})"));
        }
        self.require(ok, text);
    }

    fn print(&self, number: usize, title: &str) -> bool {
        let status = if self.ok { "PASS" } else { "FAIL" };
        println!("criterion {number:>2} {status} {title}: {}", self.detail.join("; "));
        self.ok
    }
}

fn context<const P: u32>(n: usize, sample: Option<u64>) -> Context<P> {
    let mut config = RunConfig::new(P as u64, n).with_seed(42);
    config.sample = sample;
    Context::new(config).expect("context")
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn main() -> ExitCode {
    let c31 = context::<3>(1, None);
    let c51 = context::<5>(1, None);
    let c32 = context::<3>(2, Some(10_000));
    let mut all = true;

    let mut line = Line::new();
    for (label, s, limit, scope, count) in [
        {
            let (s, t) = timed(|| suites::multiplicativity_suite(&c31));
            ("(3,1)", s, (t, 60), "exhaustive", 512)
        },
        {
            let (s, t) = timed(|| suites::multiplicativity_suite(&c51));
            ("(5,1)", s, (t, 600), "exhaustive", 13_824)
        },
        {
            let (s, t) = timed(|| suites::multiplicativity_suite(&c32));
            ("(3,2)", s, (t, 600), "sampled(n=10000,seed=42)", 10_000)
        },
    ] {
        line.suite(label, &s, Some(scope), Some(count));
        let (elapsed, secs) = limit;
        line.require(elapsed.as_secs() < secs, format!("{label} in {:.1}s (limit {secs}s)", elapsed.as_secs_f64()));
    }
    all &= line.print(1, "multiplicativity");

    let mut line = Line::new();
    line.suite("(3,1)", &suites::ansatz_suite(&c31), Some("exhaustive"), None);
    line.suite("(5,1)", &suites::ansatz_suite(&c51), Some("exhaustive"), None);
    all &= line.print(2, "ansatz consistency on general-position pairs");

    let mut line = Line::new();
    line.suite("(3,1)", &suites::identity_suite(&c31), Some("exhaustive"), None);
    line.suite("(5,1)", &suites::identity_suite(&c51), Some("exhaustive"), None);
    line.suite("(3,2)", &suites::identity_suite(&c32), Some("exhaustive"), None);
    all &= line.print(3, "identity and sigma-covariance");

    let mut line = Line::new();
    match suites::kernel_coherence_suite(&c31) {
        Ok(s) => {
            let aux = s.notes.is_empty();
            line.suite("(3,1) kernels with auxiliaries", &s, Some("exhaustive"), None);
            line.require(aux, "every valid auxiliary checked");
        }
        Err(e) => line.require(false, e.to_string()),
    }
    all &= line.print(4, "kernel coherence");

    let mut line = Line::new();
    match (suites::heisenberg_suite(&c31), suites::heisenberg_suite(&c51)) {
        (Ok(a), Ok(b)) => {
            line.suite("(3,1)", &a, Some("exhaustive"), Some(27 * 27 + 3 + 1));
            line.suite("(5,1)", &b, Some("exhaustive"), Some(125 * 125 + 5 + 1));
            line.require(a.notes.iter().chain(&b.notes).all(|n| n == "commutant dimension 1"), "commutant dimension 1 at (3,1) and (5,1)");
        }
        (a, b) => line.require(false, format!("{:?} {:?}", a.err(), b.err())),
    }
    all &= line.print(5, "Heisenberg representation");

    let mut line = Line::new();
    let sixth = || -> weil_cli::Result<Vec<(&'static str, SuiteResult, Option<u64>)>> {
        Ok(vec![
            ("(3,1) homomorphism", suites::weil_homomorphism_suite(&c31)?, Some(576 + 2)),
            ("(3,1) conjugation", suites::heisenberg_compatibility_suite(&c31)?, Some(24 * 28)),
            ("(3,1) total Fourier", suites::total_fourier_suite(&c31)?, None),
            ("(5,1) total Fourier", suites::total_fourier_suite(&c51)?, None),
        ])
    };
    match sixth() {
        Ok(list) => {
            for (label, s, count) in list {
                line.suite(label, &s, Some("exhaustive"), count);
            }
        }
        Err(e) => line.require(false, e.to_string()),
    }
    all &= line.print(6, "canonical model");

    let mut line = Line::new();
    let gauss = [
        suites::gauss_sum_suite::<3>(),
        suites::gauss_sum_suite::<5>(),
        suites::gauss_sum_suite::<7>(),
        suites::gauss_sum_suite::<11>(),
        suites::gauss_sum_suite::<13>(),
    ];
    for s in &gauss {
        let sign = s.notes.first().and_then(|n| n.split('~').nth(1)).unwrap_or("?").trim().to_string();
        line.suite(&format!("{} {sign}", s.name), s, None, None);
    }
    all &= line.print(7, "Gauss sums");

    let mut line = Line::new();
    match (suites::unitarity_suite(&c31), suites::unitarity_suite(&c51)) {
        (Ok(a), Ok(b)) => {
            line.suite("(3,1)", &a, Some("exhaustive"), Some(64 + 24));
            line.suite("(5,1)", &b, Some("exhaustive"), Some(576 + 120));
        }
        (a, b) => line.require(false, format!("{:?} {:?}", a.err(), b.err())),
    }
    all &= line.print(8, "unitarity");

    let mut line = Line::new();
    let ninth = || -> weil_cli::Result<Vec<(&'static str, SuiteResult)>> {
        Ok(vec![
            ("(3,1) cartesian", suites::cartesian_suite(&c31)?.expect("product fits the cap")),
            ("(3,1) duality", suites::duality_suite(&c31)?),
            ("(3,2) duality", suites::duality_suite(&c32)?),
            ("(3,2) reduction", suites::reduction_suite(&c32)?),
        ])
    };
    match ninth() {
        Ok(list) => {
            for (label, s) in list {
                let count = (label == "(3,1) cartesian").then_some(100);
                line.suite(label, &s, None, count);
                if label == "(3,2) reduction" {
                    line.require(s.notes.iter().any(|n| n.contains("dimension 3") && n.contains("rank 3")), "invariants of dimension 3 = q^(n-d)");
                }
            }
        }
        Err(e) => line.require(false, e.to_string()),
    }
    all &= line.print(9, "functorial compatibilities");

    let mut line = Line::new();
    match (suites::correspondence_suite(&c31), suites::lagrangian_vector_suite(&c31)) {
        (Ok(Some(a)), Ok(b)) => {
            line.suite("(3,1) graphs", &a, Some("exhaustive"), Some(24));
            line.suite("(3,1) Lagrangian vectors", &b, Some("exhaustive"), Some(24 * 8));
            for n in a.notes.iter().chain(&b.notes) {
                line.detail.push(n.clone());
            }
        }
        (a, b) => line.require(false, format!("{:?} {:?}", a.map(|_| ()).err(), b.err())),
    }
    all &= line.print(10, "correspondences");

    let mut line = Line::new();
    for (label, report) in [
        ("(3,1)", suites::normalization_report(&c31)),
        ("(5,1)", suites::normalization_report(&c51)),
        ("(3,2)", suites::normalization_report(&c32)),
    ] {
        line.require(
            report.passing.contains(&report.selected),
            format!("{label} selected [{}], passing [{}]", report.selected, report.passing.join(" | ")),
        );
    }
    all &= line.print(11, "normalization variant");

    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
