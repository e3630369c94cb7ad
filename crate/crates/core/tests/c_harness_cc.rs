//! Compiles emitted C harnesses against trace-replaying stubs and compares
//! the reported violation steps with the evaluator. Skipped when no C
//! compiler is on the path.

use std::process::Command;

use reqc_core::exporters::{export_c_harness, WidthConfig};
use reqc_core::fuzz;
use reqc_core::semantics::{evaluate, Form};
use reqc_core::Value;

fn compiler() -> Option<&'static str> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()))
}

/// Variables assigned from nondeterministic calls inside `func`, in order.
fn nondet_reads(c: &str, func: &str) -> Vec<String> {
    let body = c.split(&format!("static void {func}(void)\n{{\n")).nth(1).unwrap();
    body.lines()
        .take_while(|l| *l != "}")
        .filter(|l| l.contains("= __VERIFIER_nondet_"))
        .map(|l| l.trim().split(" = ").next().unwrap().to_string())
        .collect()
}

fn number(v: Value) -> String {
    match v {
        Value::Bool(b) => (b as u8).to_string(),
        Value::Int(i) => i.to_string(),
        Value::Float(x) => format!("{x:?}"),
    }
}

const STUBS: &str = r#"
#include <stdio.h>
#include <stdlib.h>
static long reqc_pos;
static double reqc_next(void)
{
    if (reqc_pos >= (long)(sizeof feed / sizeof feed[0])) exit(0);
    return feed[reqc_pos++];
}
void __VERIFIER_error(void) { printf("%ld\n", (reqc_pos - N_CAL) / N_SIG - 1); }
void __VERIFIER_assume(int c) { if (!c) exit(3); }
_Bool __VERIFIER_nondet_bool(void) { return reqc_next() != 0; }
int __VERIFIER_nondet_int(void) { return (int)reqc_next(); }
double __VERIFIER_nondet_double(void) { return reqc_next(); }
"#;

#[test]
fn compiled_harness_reports_the_same_steps() {
    let Some(cc) = compiler() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let mut compiled = 0;
    for i in 0..200 {
        let case = fuzz::case(31, i);
        let c = export_c_harness(&case.requirement, &case.dict, case.cfg, &WidthConfig::default()).unwrap().payload;
        let cals = nondet_reads(&c, "reqc_init");
        let sigs = nondet_reads(&c, "reqc_read_inputs");
        if sigs.is_empty() {
            continue;
        }
        let mut feed = Vec::new();
        for name in &cals {
            let v = case.trace.column(name).map(|col| col[0]);
            feed.push(number(v.or(case.dict.lookup(name).unwrap().value).unwrap()));
        }
        for t in 0..case.trace.len() {
            for name in &sigs {
                feed.push(number(case.trace.column(name).unwrap()[t]));
            }
        }
        let stubs = format!(
            "static const double feed[] = {{{}}};\n#define N_CAL {}\n#define N_SIG {}\n{STUBS}",
            feed.join(", "),
            cals.len(),
            sigs.len()
        );
        let (h, s, exe) = (dir.path().join("h.c"), dir.path().join("s.c"), dir.path().join("prog"));
        std::fs::write(&h, &c).unwrap();
        std::fs::write(&s, stubs).unwrap();
        let out = Command::new(cc).arg("-O0").arg("-w").arg("-o").arg(&exe).arg(&h).arg(&s).output().unwrap();
        assert!(out.status.success(), "case {i}: {}\n{c}", String::from_utf8_lossy(&out.stderr));
        let run = Command::new(&exe).output().unwrap();
        assert_eq!(run.status.code(), Some(0), "case {i}");
        let got: Vec<usize> = String::from_utf8(run.stdout).unwrap().lines().map(|l| l.parse().unwrap()).collect();

        let v = evaluate(&case.requirement, &case.trace, &case.dict, case.cfg, Form::Past).unwrap();
        let mut want: Vec<usize> =
            v.violations.iter().map(|x| x.check_step).filter(|&u| u < case.trace.len()).collect();
        want.sort_unstable();
        want.dedup();
        assert_eq!(got, want, "case {i}\n{c}");
        compiled += 1;
    }
    assert!(compiled > 150);
}
