//! Acceptance suite: runs `cvbell verify --seed 7` twice and prints one line
//! per criterion.
//!
//! Items listed in `UNATTAINABLE` are expected to fail on a correct build and
//! are reported without failing the target. Any other failing item does.

use std::process::{Command, ExitCode, Output};
use std::thread;

use cvbell::verify::Report;

/// `(criterion, item label)` pairs whose targets contradict exact values.
const UNATTAINABLE: &[(u8, &str)] = &[
    // the interval's upper end sits below 8/3^(9/8) = 2.3244947810
    (1, "|B_gbw| at r=5"),
    // 2 sqrt(1 + K(6)^2) = 2.8185170607 < 2.82
    (4, "|B_ps| at gamma=6"),
];

fn verify_run() -> Output {
    Command::new(env!("CARGO_BIN_EXE_cvbell"))
        .args(["verify", "--seed", "7", "--json"])
        .output()
        .expect("cvbell runs")
}

fn main() -> ExitCode {
    let first = thread::spawn(verify_run);
    let second = verify_run();
    let first = first.join().expect("first run");
    for o in [&first, &second] {
        if !o.stderr.is_empty() {
            eprintln!("{}", String::from_utf8_lossy(&o.stderr));
        }
    }
    let report: Report = match serde_json::from_slice(&first.stdout) {
        Ok(r) => r,
        Err(e) => {
            println!("acceptance: could not parse verify output: {e}");
            return ExitCode::FAILURE;
        }
    };

    let mut unexpected = 0;
    for c in &report.checks {
        let mut passed = c.passed();
        let mut notes = Vec::new();
        if c.id == 12 {
            let identical = first.stdout == second.stdout;
            passed &= identical;
            notes.push(format!("two runs byte-identical: {identical}"));
        }
        for i in c.failures() {
            let known = UNATTAINABLE.contains(&(c.id, i.label.as_str()));
            if !known {
                unexpected += 1;
            }
            notes.push(format!(
                "{}{}: measured {} expected {}",
                if known { "known unattainable, " } else { "" },
                i.label,
                i.measured,
                i.expected
            ));
        }
        let status = if passed { "PASS" } else { "FAIL" };
        let notes = if notes.is_empty() {
            String::new()
        } else {
            format!(" [{}]", notes.join("; "))
        };
        println!("criterion {:>2} {status}  {}{notes}", c.id, c.title);
    }

    let ids: Vec<u8> = report.checks.iter().map(|c| c.id).collect();
    if ids != (1..=12).collect::<Vec<u8>>() {
        println!("acceptance: expected criteria 1..=12, got {ids:?}");
        return ExitCode::FAILURE;
    }
    if first.stdout != second.stdout {
        unexpected += 1;
    }
    if unexpected > 0 {
        println!("acceptance: {unexpected} unexpected failure(s)");
        ExitCode::FAILURE
    } else {
        println!("acceptance: all failures are known-unattainable items");
        ExitCode::SUCCESS
    }
}
