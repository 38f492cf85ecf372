//! Acceptance criteria, one PASS/FAIL line each (runs without the libtest
//! harness so the lines are never captured). Tolerances and time limits
//! are pinned below; sampling suites use seed 0.

use std::time::{Duration, Instant};

use subfactor_core::suites::{
    behrstock_suite, bgit_suite, diameter_suite, equivariance_suite, farey_oracle_suite, joint_embedding_suite,
    near_embedded_suite, progress_suite, whitehead_suite, xset_suite, PingPongConstants, SuiteReport,
};

const SEED: u64 = 0;

struct Line {
    id: usize,
    name: &'static str,
    passed: bool,
    detail: String,
}

fn check(id: usize, name: &'static str, limit: Duration, f: impl FnOnce() -> SuiteReport) -> (Line, SuiteReport) {
    let t = Instant::now();
    let rep = f();
    let took = t.elapsed();
    let in_time = took <= limit;
    let mut detail = format!("{:.1}s/{}s", took.as_secs_f64(), limit.as_secs());
    for (k, v) in &rep.metrics {
        detail.push_str(&format!(" {k}={}", serde_json::to_string(v).unwrap()));
    }
    if !rep.failures.is_empty() {
        detail.push_str(&format!(" failures={:?}", rep.failures));
    }
    let line = Line {
        id,
        name,
        passed: rep.passed && in_time,
        detail,
    };
    (line, rep)
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn main() {
    let mut lines = Vec::new();

    let (l, _) = check(1, "farey oracle |p|,|q| <= 30, exact", secs(10), || farey_oracle_suite(30).unwrap());
    lines.push(l);

    let (l, _) = check(2, "whitehead soundness, cyclic words <= 6 in F_2", secs(30), || {
        whitehead_suite(6).unwrap()
    });
    lines.push(l);

    let (l, _) = check(3, "near-embedded => free factor, 200/200", secs(120), || {
        near_embedded_suite(200, SEED).unwrap()
    });
    lines.push(l);

    let (l, _) = check(4, "joint-embedding certificates, 100/100", secs(120), || {
        joint_embedding_suite(100, SEED).unwrap()
    });
    lines.push(l);

    let (l, diam) = check(5, "projection diameter, 50 pairs, k = 10 vs 20, D_emp <= 10", secs(300), || {
        diameter_suite(50, SEED, 10).unwrap()
    });
    lines.push(l);
    let d_emp = diam.int("d_emp").unwrap() as u64;

    let (l, behr) = check(6, "behrstock, 200 triples, M_emp <= 10", secs(300), || {
        behrstock_suite(200, SEED, Some(d_emp)).unwrap()
    });
    lines.push(l);
    let m_emp = behr.int("m_emp").unwrap() as u64;

    let (l, _) = check(7, "BGIT surrogate, 50 geodesics meeting A, diam <= M_emp", secs(300), || {
        bgit_suite(50, SEED, 4, Some(m_emp)).unwrap()
    });
    lines.push(l);

    let (l, _) = check(8, "equivariance, 100 triples + 50 verdicts, exact", secs(120), || {
        equivariance_suite(100, 50, SEED).unwrap()
    });
    lines.push(l);

    let (l, _) = check(9, "X_A diameter for <a,b> at bound 8, <= 2", secs(120), || xset_suite(8).unwrap());
    lines.push(l);

    let (l, _) = check(10, "ping-pong evidence, shipped pair", secs(600), || {
        progress_suite(PingPongConstants {
            m_emp,
            ..Default::default()
        })
        .unwrap()
    });
    lines.push(l);

    for l in &lines {
        println!(
            "{} criterion {:>2}: {} [{}]",
            if l.passed { "PASS" } else { "FAIL" },
            l.id,
            l.name,
            l.detail
        );
    }
    let failed: Vec<usize> = lines.iter().filter(|l| !l.passed).map(|l| l.id).collect();
    println!("acceptance: {}/{} criteria passed", lines.len() - failed.len(), lines.len());
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
