//! Runs the twelve acceptance criteria and prints one PASS/FAIL line per
//! criterion. Limits live in `hmftrace::verify`.

use hmftrace::verify::{run_suite, CriterionOutcome};

fn main() {
    let ids: Vec<u8> = match std::env::var("ACCEPTANCE_ONLY") {
        Ok(list) => list.split(',').filter_map(|x| x.trim().parse().ok()).collect(),
        Err(_) => (1..=12).collect(),
    };
    let report = run_suite(&ids, |k: &CriterionOutcome, seconds| {
        println!("criterion {:>2}: {} {} ({seconds:.1} s)", k.id, if k.passed { "PASS" } else { "FAIL" }, k.title);
        for check in &k.checks {
            let mark = if check.passed { "ok " } else { "BAD" };
            print!("    [{mark}] {}: {:.3e} (limit {:.1e})", check.name, check.observed, check.limit);
            match &check.note {
                Some(note) => println!("  {note}"),
                None => println!(),
            }
        }
    });
    let failed = report.criteria.iter().filter(|k| !k.passed).count();
    println!("acceptance: {} of {} criteria passed", report.criteria.len() - failed, report.criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
