//! Acceptance gate: one line per criterion.

use std::time::{Duration, Instant};

use jetg_core::flows::FlowConfig;
use jetg_core::verify::{self, CheckRow};

const SEED: u64 = 0;

struct Outcome {
    label: &'static str,
    pass: bool,
    detail: String,
}

fn judge(label: &'static str, rows: &[CheckRow], elapsed: Duration, limit: Option<Duration>) -> Outcome {
    let failed: Vec<&str> = rows.iter().filter(|r| !r.pass).map(|r| r.name.as_str()).collect();
    let in_time = limit.is_none_or(|l| elapsed < l);
    let mut detail = format!(
        "{} checks, {} failed, {:.2}s",
        rows.len(),
        failed.len(),
        elapsed.as_secs_f64()
    );
    if let Some(l) = limit {
        detail.push_str(&format!(" (limit {}s)", l.as_secs()));
    }
    if !failed.is_empty() {
        detail.push_str(&format!("; failing: {}", failed.join(" | ")));
    }
    Outcome {
        label,
        pass: failed.is_empty() && !rows.is_empty() && in_time,
        detail,
    }
}

fn timed(f: impl FnOnce() -> Vec<CheckRow>) -> (Vec<CheckRow>, Duration) {
    let start = Instant::now();
    let rows = f();
    (rows, start.elapsed())
}

fn keep(rows: Vec<CheckRow>, names: &[&str]) -> Vec<CheckRow> {
    rows.into_iter().filter(|r| names.iter().any(|n| r.name.starts_with(n))).collect()
}

fn main() {
    let cfg = FlowConfig {
        step: 1e-3,
        tol: 1e-6,
        ..FlowConfig::default()
    };
    let mut out = Vec::new();

    let (rows, t) = timed(|| verify::jet_axioms(SEED, 1000));
    let rows = keep(rows, &["associativity", "unit laws", "inverse laws"]);
    out.push(judge("1 exact jet groupoid axioms (1000 triples)", &rows, t, Some(Duration::from_secs(30))));

    let (rows, t) = timed(|| verify::quotients(SEED, 50));
    out.push(judge("2 quotients of M×H×M by normal N (50 groupoids)", &rows, t, Some(Duration::from_secs(10))));

    let (rows, t) = timed(|| verify::brackets(SEED, 200));
    out.push(judge("3 exact bracket laws and anchor (200 cases)", &rows, t, Some(Duration::from_secs(60))));

    let (rows, t) = timed(|| verify::group_law(SEED, 50, &cfg));
    let rows = keep(rows, &["Exp(t+u)", "Exp 0", "d/dt"]);
    out.push(judge("4 one-parameter group law (defect ≤ 1e-6)", &rows, t, None));

    let (rows, t) = timed(|| verify::bch(SEED, 3, &cfg));
    out.push(judge("5 Campbell-Hausdorff order study (3 ± 0.2, 2 ± 0.2)", &rows, t, None));

    let (rows, t) = timed(|| verify::projection(SEED, 20, &cfg));
    out.push(judge("6 projection commutes with Exp (≤ 1e-6)", &rows, t, None));

    let (rows, t) = timed(|| verify::linear(SEED, 100, &cfg));
    out.push(judge("7 linear groupoid calculus (100 operators)", &rows, t, None));

    let (rows, t) = timed(|| verify::closed_form(&cfg));
    out.push(judge("8 closed-form flows and blow-up", &rows, t, None));

    let (rows, t) = timed(|| verify::group_jet(SEED, 100));
    let rows = keep(rows, &["Exp t j_kζ", "[f a, g b]"]);
    out.push(judge("9 group-jet exponential and bilinearity", &rows, t, None));

    for o in &out {
        println!("{} {}: {}", if o.pass { "PASS" } else { "FAIL" }, o.label, o.detail);
    }
    let failed = out.iter().filter(|o| !o.pass).count();
    println!("acceptance: {} of {} criteria passed", out.len() - failed, out.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
