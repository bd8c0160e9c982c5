//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use ffbundle::degeneration::degeneration_trace;
use ffbundle::degree::{c_value, dim_hom, stratum_dim};
use ffbundle::verify::{self, UniverseSpec, VerificationReport};
use ffbundle::HNBundle;
use num_bigint::BigInt;

fn b(s: &str) -> HNBundle {
    s.parse().expect("fixed bundle literal")
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn from_reports(
    reports: &[VerificationReport],
    budget: Option<Duration>,
    elapsed: Duration,
) -> Outcome {
    let mut detail: Vec<String> = reports.iter().map(VerificationReport::summary).collect();
    let mut passed = reports
        .iter()
        .all(|r| r.passed() && r.instances_checked > 0);
    for r in reports {
        detail.extend(
            r.counterexamples
                .iter()
                .take(5)
                .map(|c| format!("counterexample {c}")),
        );
    }
    if let Some(limit) = budget {
        if elapsed > limit {
            passed = false;
            detail.push(format!("took {elapsed:?}, budget {limit:?}"));
        }
    }
    Outcome {
        passed,
        detail: detail.join("; "),
    }
}

fn check(cond: bool, what: &str, failures: &mut Vec<String>) {
    if !cond {
        failures.push(what.to_string());
    }
}

fn criterion_1() -> Outcome {
    let c = c_value(&b("0:1"), &b("1,-1"), &b("1"));
    Outcome {
        passed: c == BigInt::from(0),
        detail: format!("c(O, O(1)+O(-1), O(1)) = {c}"),
    }
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let exhaustive = verify::verify_equivalence(&UniverseSpec::desk_pairs());
    let random = verify::verify_equivalence(&UniverseSpec::new(4, -2, 2, 4).sampled(10_000, 2024));
    let ok_count = random.instances_checked == 10_000;
    let mut out = from_reports(
        &[exhaustive, random],
        Some(Duration::from_secs(30)),
        start.elapsed(),
    );
    out.passed &= ok_count;
    out
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let report = verify::verify_key_inequality(&UniverseSpec::desk_triples());
    from_reports(&[report], Some(Duration::from_secs(60)), start.elapsed())
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let report = verify::verify_degeneration(&UniverseSpec::desk_triples());
    let mut out = from_reports(&[report], Some(Duration::from_secs(60)), start.elapsed());
    match degeneration_trace(&b("0:1,-2"), &b("1,-1"), &b("-1")) {
        Ok(t) => {
            let want: Vec<BigInt> = [2, 1, 0].into_iter().map(BigInt::from).collect();
            if t.chain.len() != 3 || t.c_values != want {
                out.passed = false;
                out.detail.push_str(&format!(
                    "; worked triple gave chain {:?} c {:?}",
                    t.chain, t.c_values
                ));
            } else {
                out.detail.push_str("; worked triple c = [2, 1, 0]");
            }
        }
        Err(e) => {
            out.passed = false;
            out.detail.push_str(&format!("; worked triple failed: {e}"));
        }
    }
    out
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let report = verify::verify_oracles(&UniverseSpec::desk_pairs());
    from_reports(&[report], None, start.elapsed())
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let report = verify::verify_stratification_dimension(&UniverseSpec::desk_pairs());
    let mut out = from_reports(&[report], None, start.elapsed());
    let (e, f) = (b("0:1,-2"), b("1,-1"));
    let hom = dim_hom(&e, &f);
    let at_line = stratum_dim(&e, &f, &b("-1"));
    if hom != BigInt::from(5) || at_line != Ok(BigInt::from(3)) {
        out.passed = false;
        out.detail.push_str(&format!(
            "; example gave dim Hom {hom}, stratum {at_line:?}"
        ));
    }
    out
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut spec = UniverseSpec::desk_pairs();
    spec.seed = 7;
    let report = verify::verify_invariance_laws(&spec, 1000);
    let ok_count = report.instances_checked == 1000;
    let mut out = from_reports(&[report], None, start.elapsed());
    out.passed &= ok_count;
    out
}

struct Invocation {
    args: &'static [&'static str],
    status: i32,
    stdout: Option<&'static str>,
    stderr: Option<&'static str>,
}

const MATRIX: [Invocation; 12] = [
    Invocation {
        args: &["check-sub", "0", "1,-1"],
        status: 0,
        stdout: Some("true"),
        stderr: None,
    },
    Invocation {
        args: &["check-sub", "1", "0:1"],
        status: 1,
        stdout: Some("false"),
        stderr: None,
    },
    Invocation {
        args: &["check-dominate", "0:1,-2", "1,-1"],
        status: 0,
        stdout: Some("true"),
        stderr: None,
    },
    Invocation {
        args: &["check-quotient", "1:2", "1"],
        status: 1,
        stdout: Some("false"),
        stderr: None,
    },
    Invocation {
        args: &["c", "0,-2", "1,-1", "-1"],
        status: 0,
        stdout: Some("2"),
        stderr: None,
    },
    Invocation {
        args: &["dims", "0,-2", "1,-1", "-1"],
        status: 0,
        stdout: Some("stratum dimension = 3"),
        stderr: None,
    },
    Invocation {
        args: &["trace", "0,-2", "1,-1", "-1", "--format", "json"],
        status: 0,
        stdout: Some("\"r\": 2"),
        stderr: None,
    },
    Invocation {
        args: &["trace", "0:1,-1", "1,-1", "-1"],
        status: 3,
        stdout: None,
        stderr: Some("condition (iv)"),
    },
    Invocation {
        args: &["trace", "1,-2", "2,0:1", "-2"],
        status: 3,
        stdout: None,
        stderr: Some("condition (vii)"),
    },
    Invocation {
        args: &["check-sub", "1/0", "1"],
        status: 2,
        stdout: None,
        stderr: Some("1/0"),
    },
    Invocation {
        args: &["frobnicate"],
        status: 2,
        stdout: None,
        stderr: None,
    },
    Invocation {
        args: &["verify", "equivalence", "--max-rank", "2"],
        status: 0,
        stdout: Some("PASS"),
        stderr: None,
    },
];

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let report = verify::verify_round_trip(&UniverseSpec::desk_pairs());
    let mut out = from_reports(&[report], None, start.elapsed());
    let mut failures = Vec::new();
    let mut as_expected = 0;
    for inv in &MATRIX {
        let before = failures.len();
        let result = Command::new(env!("CARGO_BIN_EXE_ffbundle"))
            .args(inv.args)
            .output();
        let Ok(result) = result else {
            failures.push(format!("{:?}: could not run", inv.args));
            continue;
        };
        let stdout = String::from_utf8_lossy(&result.stdout);
        let stderr = String::from_utf8_lossy(&result.stderr);
        let what = format!("{:?} exited {:?}", inv.args, result.status.code());
        check(
            result.status.code() == Some(inv.status),
            &what,
            &mut failures,
        );
        if let Some(s) = inv.stdout {
            check(
                stdout.contains(s),
                &format!("{:?}: stdout lacks {s:?}", inv.args),
                &mut failures,
            );
        }
        if let Some(s) = inv.stderr {
            check(
                stderr.contains(s),
                &format!("{:?}: stderr lacks {s:?}", inv.args),
                &mut failures,
            );
        }
        if inv.status != 0 && inv.stdout.is_none() {
            check(
                stdout.is_empty(),
                &format!("{:?}: diagnostics leaked to stdout", inv.args),
                &mut failures,
            );
        }
        if failures.len() == before {
            as_expected += 1;
        }
    }
    out.detail.push_str(&format!(
        "; {as_expected} of {} CLI invocations as expected",
        MATRIX.len()
    ));
    if !failures.is_empty() {
        out.passed = false;
        out.detail.push_str(&format!("; {}", failures.join("; ")));
    }
    out
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 worked example c = 0", criterion_1),
        ("2 rank condition iff dominance", criterion_2),
        ("3 key inequality", criterion_3),
        ("4 degenerating sequence", criterion_4),
        ("5 degree oracle", criterion_5),
        ("6 stratification dimension", criterion_6),
        ("7 stretch and twist laws", criterion_7),
        ("8 round trip and CLI contract", criterion_8),
    ];
    let mut all = true;
    for (name, run) in criteria {
        let out = run();
        all &= out.passed;
        println!(
            "criterion {name}: {} ({})",
            if out.passed { "PASS" } else { "FAIL" },
            out.detail
        );
    }
    if !all {
        std::process::exit(1);
    }
}
