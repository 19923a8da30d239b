// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::behavior::PeVector;
use crate::designs::DesignId;
use crate::sim::{SimTime, Thresholds};

use super::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FailureKind {
    /// Every sampled output is a valid logic level but some differ from golden.
    Flip,
    /// At least one sampled output is X.
    X,
    /// Output transition counts violate the one-charge/one-discharge rule.
    Switching,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub scenario: Scenario,
    pub cycle: usize,
    pub sample_time: SimTime,
    pub expected: PeVector,
    /// Sampled output logic values, index 0 first, using `0`, `1`, `x`.
    pub observed: String,
    pub kind: FailureKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportConfig {
    pub clock_period: SimTime,
    pub evaluation_window: SimTime,
    pub input_offset: SimTime,
    pub sample_offset: SimTime,
    pub device_delay: SimTime,
    pub thresholds: Thresholds,
    pub seed: u64,
    pub prng: &'static str,
    /// Campaign-specific parameters, e.g. offsets or pair mode.
    pub parameters: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub flips: usize,
    pub x: usize,
    pub switching: usize,
}

/// Failures grouped by one campaign parameter (an offset and direction, say).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BreakdownRow {
    pub label: String,
    pub total: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ActivitySummary {
    /// Capacitance-weighted 0/1 transitions of every node, summed over cases.
    pub weighted: f64,
    pub x_transitions: usize,
    pub output_rising: usize,
    pub output_falling: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub campaign: String,
    pub design: DesignId,
    pub config: ReportConfig,
    pub counts: Counts,
    /// Sample points at which two or more outputs read logic 1.
    pub one_hot_violations: usize,
    pub activity: ActivitySummary,
    pub breakdown: Vec<BreakdownRow>,
    pub failures: Vec<Failure>,
    pub verdict: Verdict,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human-readable summary; at most `max_failures` failures are listed.
    pub fn to_table(&self, max_failures: usize) -> String {
        let mut s = String::new();
        let c = &self.counts;
        let _ = writeln!(s, "campaign  {}", self.campaign);
        let _ = writeln!(s, "design    {}", self.design);
        for (k, v) in &self.config.parameters {
            let _ = writeln!(s, "{k:<9} {v}");
        }
        let _ = writeln!(s, "seed      {} ({})", self.config.seed, self.config.prng);
        let _ = writeln!(
            s,
            "cases     {} total, {} passed, {} failed (flip {}, x {}, switching {})",
            c.total, c.passed, c.failed, c.flips, c.x, c.switching
        );
        let _ = writeln!(s, "one-hot   {} violations", self.one_hot_violations);
        let _ = writeln!(
            s,
            "activity  weighted {:.1}, output rise {}, output fall {}, x {}",
            self.activity.weighted,
            self.activity.output_rising,
            self.activity.output_falling,
            self.activity.x_transitions
        );
        if !self.breakdown.is_empty() {
            let w = self.breakdown.iter().map(|r| r.label.len()).max().unwrap_or(0).max(5);
            let _ = writeln!(s, "\n{:<w$}  {:>7}  {:>7}", "group", "cases", "failed");
            for r in &self.breakdown {
                let _ = writeln!(s, "{:<w$}  {:>7}  {:>7}", r.label, r.total, r.failed);
            }
        }
        if !self.failures.is_empty() {
            let _ = writeln!(s, "\n{:<28}  {:>6}  {:<16}  {:<16}  kind", "scenario", "tick", "expected", "observed");
            for f in self.failures.iter().take(max_failures) {
                let _ = writeln!(
                    s,
                    "{:<28}  {:>6}  {:<16}  {:<16}  {}{}",
                    f.scenario.label,
                    f.sample_time,
                    f.expected.to_string(),
                    f.observed,
                    kind_name(f.kind),
                    f.detail.as_deref().map(|d| format!(" ({d})")).unwrap_or_default()
                );
            }
            if self.failures.len() > max_failures {
                let _ = writeln!(s, "... {} more", self.failures.len() - max_failures);
            }
        }
        let _ = writeln!(
            s,
            "\nverdict   {}",
            match self.verdict {
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
            }
        );
        s
    }
}

fn kind_name(k: FailureKind) -> &'static str {
    match k {
        FailureKind::Flip => "flip",
        FailureKind::X => "x",
        FailureKind::Switching => "switching",
    }
}

/// Matrix of designs against campaigns: `yes` where the campaign found
/// failures, `no` where it passed, `-` where it was not run.
pub fn failure_matrix(reports: &[Report]) -> String {
    let mut designs: Vec<DesignId> = Vec::new();
    let mut campaigns: Vec<&str> = Vec::new();
    for r in reports {
        if !designs.contains(&r.design) {
            designs.push(r.design);
        }
        if !campaigns.contains(&r.campaign.as_str()) {
            campaigns.push(&r.campaign);
        }
    }
    let w = campaigns.iter().map(|c| c.len()).max().unwrap_or(0).max(3);
    let mut s = format!("{:<12}", "design");
    for c in &campaigns {
        let _ = write!(s, "  {c:>w$}");
    }
    s.push('\n');
    for d in &designs {
        let _ = write!(s, "{:<12}", d.to_string());
        for c in &campaigns {
            let cell = reports
                .iter()
                .filter(|r| r.design == *d && r.campaign == *c)
                .map(|r| r.passed())
                .fold(None, |acc, p| Some(acc.unwrap_or(true) && p));
            let mark = match cell {
                None => "-",
                Some(true) => "no",
                Some(false) => "yes",
            };
            let _ = write!(s, "  {mark:>w$}");
        }
        s.push('\n');
    }
    s
}
