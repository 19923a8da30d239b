// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::process::{Command, Output};

fn pesim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pesim"))
        .args(args)
        .output()
        .expect("run pesim")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

const INVERTER: &str = "\
NODE VDD vdd
NODE GND gnd
NODE CLK clock
NODE a input
NODE y output
MOS p PMOS a VDD y
MOS n NMOS a y GND
";

const STEP: &str = "\
CLOCK 20 0
AT 5 a 1
RUN 40
";

#[test]
fn simulate_inverter_writes_vcd() {
    let dir = tempfile::tempdir().unwrap();
    let net = dir.path().join("inv.net");
    let stim = dir.path().join("step.stim");
    let vcd = dir.path().join("out.vcd");
    fs::write(&net, INVERTER).unwrap();
    fs::write(&stim, STEP).unwrap();
    let o = pesim(&[
        "simulate",
        "--netlist",
        net.to_str().unwrap(),
        "--stim",
        stim.to_str().unwrap(),
        "--vcd",
        vcd.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["samples"][0]["outputs"], "0");

    let text = fs::read_to_string(&vcd).unwrap();
    let id = text
        .lines()
        .find(|l| l.starts_with("$var") && l.contains(" y "))
        .and_then(|l| l.split_whitespace().nth(3))
        .unwrap()
        .to_string();
    let body = &text[text.find("$enddefinitions").unwrap()..];
    let mut now = 0u64;
    let mut y_changes = Vec::new();
    for l in body.lines() {
        if let Some(t) = l.strip_prefix('#') {
            now = t.parse().unwrap();
        } else if l.len() > 1 && l[1..] == id {
            y_changes.push((now, l[..1].to_string()));
        }
    }
    // Initial record, settling from the all-zero start, then the single
    // response to the input step one device delay later.
    let expect = [(0, "0"), (1, "1"), (6, "0")].map(|(t, v)| (t, v.to_string()));
    assert_eq!(y_changes, expect.to_vec());
}

#[test]
fn verify_robust8_passes() {
    let o = pesim(&["verify", "--design", "robust8", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["counts"]["total"], 512);
    assert_eq!(doc["verdict"], "pass");
}

#[test]
fn race_on_race_prone_design_fails() {
    let o = pesim(&["race", "--design", "raceprone8", "--offsets", "1:24"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stdout).contains("verdict   FAIL"));
}

#[test]
fn sharescan_random_is_byte_identical_with_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let p = dir.path().join(name);
        let o = pesim(&[
            "sharescan",
            "--design",
            "cshare8",
            "--pairs",
            "random:3000",
            "--seed",
            "5",
            "--report",
            p.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 1);
        fs::read(p).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn power_audit_passes_on_robust8() {
    let o = pesim(&["power", "--cycles", "200", "--seed", "9", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["campaign"], "switching_audit");
    assert_eq!(doc["counts"]["total"], 200);
}

#[test]
fn cascade_and_verify_against_dumped_netlist() {
    let o = pesim(&["cascade", "--bits", "32", "--vectors", "50"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let dir = tempfile::tempdir().unwrap();
    let net = dir.path().join("r8.net");
    assert_eq!(code(&pesim(&["dump", "--design", "robust8", "-o", net.to_str().unwrap()])), 0);
    let o = pesim(&["verify", "--design", "robust8", "--netlist", net.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    // The race-prone netlist enables on LA high, so the robust golden rejects it.
    let net2 = dir.path().join("rp.net");
    fs::write(&net2, pesim(&["dump", "--design", "raceprone8"]).stdout).unwrap();
    let o = pesim(&["verify", "--design", "robust8", "--netlist", net2.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
}

#[test]
fn count_reports_breakdown() {
    let o = pesim(&["count", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["by_role"]["rs"]["nmos"], 8);
    let total = doc["total"]["total"].as_u64().unwrap();
    assert!((60..=110).contains(&total));
}

#[test]
fn usage_and_input_errors_exit_2() {
    assert_eq!(code(&pesim(&[])), 2);
    assert_eq!(code(&pesim(&["verify", "--design", "cascade12"])), 2);
    assert_eq!(code(&pesim(&["race", "--offsets", "9:3"])), 2);
    assert_eq!(code(&pesim(&["race", "--offsets", "1:60"])), 2);
    assert_eq!(code(&pesim(&["sharescan", "--pairs", "some"])), 2);
    assert_eq!(code(&pesim(&["verify", "--netlist", "/nonexistent.net"])), 2);
    assert_eq!(code(&pesim(&["verify", "--design", "cascade32"])), 2);

    let dir = tempfile::tempdir().unwrap();
    let net = dir.path().join("ring.net");
    let stim = dir.path().join("s.stim");
    fs::write(
        &net,
        "NODE VDD vdd\nNODE GND gnd\nNODE CLK clock\nNODE a internal\n\
         MOS p PMOS a VDD a\nMOS n NMOS a a GND\n",
    )
    .unwrap();
    fs::write(&stim, "CLOCK 20 0\nRUN 3000\n").unwrap();
    let o = pesim(&["simulate", "--netlist", net.to_str().unwrap(), "--stim", stim.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}
