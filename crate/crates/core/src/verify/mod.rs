// SPDX-License-Identifier: Apache-2.0

//! Verification campaigns over simulated encoder netlists.
//!
//! Every campaign case is a [`Scenario`]: a sequence of clock cycles, each
//! with an input vector and a look-ahead level applied `input_offset` ticks
//! into the cycle, plus optional look-ahead transitions during evaluation.
//! The clock is low for the first half of each cycle (pre-discharge or
//! precharge) and high for the second (evaluation); outputs are sampled
//! `sample_offset` ticks before the end of the cycle.

mod report;

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::behavior::PeVector;
use crate::designs::{DesignError, DesignId};
use crate::netlist::{Netlist, NodeId};
use crate::sim::{Logic, SimConfig, SimError, SimTime, Simulator, Stimulus, Waveform};

pub use report::{
    failure_matrix, ActivitySummary, BreakdownRow, Counts, Failure, FailureKind, Report,
    ReportConfig, Verdict,
};

pub const PRNG_NAME: &str = "ChaCha8";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CampaignConfig {
    pub clock_period: SimTime,
    /// Ticks after the start of a cycle at which its inputs are applied.
    pub input_offset: SimTime,
    pub sim: SimConfig,
    pub seed: u64,
    /// Worker threads; `None` uses the global pool.
    #[serde(skip)]
    pub jobs: Option<usize>,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            clock_period: 100,
            input_offset: 10,
            sim: SimConfig::default(),
            seed: 1,
            jobs: None,
        }
    }
}

impl CampaignConfig {
    pub fn half_period(&self) -> SimTime {
        self.clock_period / 2
    }

    /// Start of the evaluation phase of `cycle`.
    pub fn evaluation_start(&self, cycle: usize) -> SimTime {
        cycle as SimTime * self.clock_period + self.clock_period - self.half_period()
    }

    pub fn sample_time(&self, cycle: usize) -> SimTime {
        (cycle as SimTime + 1) * self.clock_period - self.sim.sample_offset
    }

    fn validate(&self) -> Result<(), CampaignError> {
        let half = self.half_period();
        if self.clock_period < 4 || !self.clock_period.is_multiple_of(2) {
            return Err(CampaignError::Config(
                "clock period must be even and at least 4".into(),
            ));
        }
        if self.input_offset >= half {
            return Err(CampaignError::Config(
                "input offset must lie inside the first half-period".into(),
            ));
        }
        if self.sim.sample_offset == 0 || self.sim.sample_offset > half {
            return Err(CampaignError::Config(
                "sample offset must lie inside the evaluation phase".into(),
            ));
        }
        if self.jobs == Some(0) {
            return Err(CampaignError::Config("jobs must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LaEvent {
    pub cycle: usize,
    /// Ticks after the evaluation edge of `cycle`.
    pub offset: SimTime,
    pub value: bool,
}

/// One replayable stimulus case.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Scenario {
    pub design: DesignId,
    pub label: String,
    pub ip_sequence: Vec<PeVector>,
    /// Look-ahead level per cycle, applied together with the inputs.
    pub la_levels: Vec<bool>,
    pub la_schedule: Vec<LaEvent>,
    /// Extra ticks simulated after the last cycle.
    pub tail: SimTime,
}

impl Scenario {
    pub fn cycles(&self) -> usize {
        self.ip_sequence.len()
    }

    /// Look-ahead level seen at the sample point of `cycle`.
    pub fn la_at_sample(&self, cycle: usize) -> bool {
        self.la_schedule
            .iter()
            .rev()
            .find(|e| e.cycle == cycle)
            .map_or(self.la_levels[cycle], |e| e.value)
    }

    fn validate(&self, cfg: &CampaignConfig) -> Result<(), String> {
        let width = self.design.width();
        if self.ip_sequence.is_empty() {
            return Err("scenario has no cycles".into());
        }
        if self.la_levels.len() != self.cycles() {
            return Err("one look-ahead level per cycle required".into());
        }
        if let Some(v) = self.ip_sequence.iter().find(|v| v.width() != width) {
            return Err(format!("vector {v} does not match width {width}"));
        }
        let mut prev: Option<(usize, SimTime)> = None;
        for e in &self.la_schedule {
            if e.cycle >= self.cycles() {
                return Err(format!("look-ahead event in cycle {} beyond sequence", e.cycle));
            }
            if e.offset >= cfg.half_period() - cfg.sim.sample_offset {
                return Err(format!(
                    "look-ahead offset {} outside the evaluation window",
                    e.offset
                ));
            }
            if prev.is_some_and(|p| p >= (e.cycle, e.offset)) {
                return Err("look-ahead events must be strictly time-ascending".into());
            }
            prev = Some((e.cycle, e.offset));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum CampaignError {
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error("invalid campaign configuration: {0}")]
    Config(String),
    #[error("netlist does not fit design {design}: {reason}")]
    Netlist { design: DesignId, reason: String },
    #[error("invalid scenario {label}: {reason}")]
    Scenario { label: String, reason: String },
    #[error("simulation failed in scenario {}: {error}", .scenario.label)]
    Simulation {
        scenario: Box<Scenario>,
        error: SimError,
    },
    #[error("{0}")]
    Unsupported(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairMode {
    /// All ordered pairs of 8-bit vectors.
    Exhaustive,
    Random(usize),
}

/// Runs campaigns against one netlist; golden values come from its design.
#[derive(Debug, Clone)]
pub struct Verifier {
    design: DesignId,
    cfg: CampaignConfig,
    sim: Simulator,
    input_names: Vec<String>,
    la_name: String,
    outputs: Vec<NodeId>,
}

struct Outcome {
    observed: Vec<Logic>,
    one_hot_violation: bool,
    failure: Option<Failure>,
    activity: ActivitySummary,
}

impl Verifier {
    pub fn new(design: DesignId, cfg: CampaignConfig) -> Result<Self, CampaignError> {
        Self::with_netlist(design, &design.build()?, cfg)
    }

    /// Verify a user-supplied netlist against the golden model of `design`.
    ///
    /// The netlist needs `design.width()` inputs and outputs (matched in
    /// declaration order) and a look-ahead input.
    pub fn with_netlist(
        design: DesignId,
        netlist: &Netlist,
        cfg: CampaignConfig,
    ) -> Result<Self, CampaignError> {
        cfg.validate()?;
        let misfit = |reason: String| CampaignError::Netlist { design, reason };
        let inputs = netlist.inputs();
        let outputs = netlist.outputs();
        if inputs.len() != design.width() || outputs.len() != design.width() {
            return Err(misfit(format!(
                "expected {w} inputs and {w} outputs, found {} and {}",
                inputs.len(),
                outputs.len(),
                w = design.width()
            )));
        }
        let la = netlist
            .lookahead_in()
            .ok_or_else(|| misfit("no look-ahead input declared".into()))?;
        let sim = Simulator::new(netlist, cfg.sim).map_err(|e| misfit(e.to_string()))?;
        Ok(Verifier {
            design,
            cfg,
            sim,
            input_names: inputs.iter().map(|&i| netlist.node_name(i).to_string()).collect(),
            la_name: netlist.node_name(la).to_string(),
            outputs,
        })
    }

    pub fn design(&self) -> DesignId {
        self.design
    }

    pub fn config(&self) -> &CampaignConfig {
        &self.cfg
    }

    /// Look-ahead level that enables the stage.
    fn enabled_la(&self) -> bool {
        self.design.lookahead_active_high()
    }

    pub fn stimulus(&self, sc: &Scenario) -> Result<Stimulus, CampaignError> {
        sc.validate(&self.cfg).map_err(|reason| CampaignError::Scenario {
            label: sc.label.clone(),
            reason,
        })?;
        let p = self.cfg.clock_period;
        let duration = sc.cycles() as SimTime * p + sc.tail;
        let mut st = Stimulus::new(p, false, duration);
        let mut ip = vec![false; self.input_names.len()];
        let mut la = false;
        let mut events = sc.la_schedule.iter().peekable();
        for (c, v) in sc.ip_sequence.iter().enumerate() {
            let t = c as SimTime * p + self.cfg.input_offset;
            for (i, name) in self.input_names.iter().enumerate() {
                if v.get(i) != ip[i] {
                    ip[i] = v.get(i);
                    st.at(t, name, ip[i]);
                }
            }
            if sc.la_levels[c] != la {
                la = sc.la_levels[c];
                st.at(t, &self.la_name, la);
            }
            while let Some(e) = events.next_if(|e| e.cycle == c) {
                if e.value != la {
                    la = e.value;
                    st.at(self.cfg.evaluation_start(c) + e.offset, &self.la_name, la);
                }
            }
        }
        Ok(st)
    }

    pub fn simulate(&self, sc: &Scenario) -> Result<Waveform, CampaignError> {
        let st = self.stimulus(sc)?;
        self.sim
            .run(&st)
            .map_err(|error| CampaignError::Simulation {
                scenario: Box::new(sc.clone()),
                error,
            })
    }

    /// Sampled output logic values of every cycle of `sc`.
    pub fn replay(&self, sc: &Scenario) -> Result<Vec<Vec<Logic>>, CampaignError> {
        let w = self.simulate(sc)?;
        Ok((0..sc.cycles()).map(|c| self.sample(&w, c)).collect())
    }

    fn sample(&self, w: &Waveform, cycle: usize) -> Vec<Logic> {
        let t = self.cfg.sample_time(cycle);
        self.outputs.iter().map(|&o| w.logic_at(o, t)).collect()
    }

    pub fn golden(&self, sc: &Scenario, cycle: usize) -> PeVector {
        self.design.golden(&sc.ip_sequence[cycle], sc.la_at_sample(cycle))
    }

    /// Compare the sample of `cycle` against golden.
    fn judge(&self, sc: &Scenario, w: &Waveform, cycle: usize) -> (Vec<Logic>, bool, Option<Failure>) {
        let observed = self.sample(w, cycle);
        let expected = self.golden(sc, cycle);
        let ones = observed.iter().filter(|&&l| l == Logic::One).count();
        let matches = observed
            .iter()
            .zip(expected.bits())
            .all(|(&o, &e)| o == Logic::from_bit(e));
        let failure = (!matches).then(|| Failure {
            scenario: sc.clone(),
            cycle,
            sample_time: self.cfg.sample_time(cycle),
            expected,
            observed: render(&observed),
            kind: if observed.iter().all(|l| l.is_known()) {
                FailureKind::Flip
            } else {
                FailureKind::X
            },
            detail: None,
        });
        (observed, ones > 1, failure)
    }

    /// Switching from the first evaluation edge on; power-up settling
    /// during the first pre-discharge phase is not counted.
    fn activity(&self, w: &Waveform) -> ActivitySummary {
        let from = self.cfg.evaluation_start(0);
        let table = w.node_table();
        let mut s = ActivitySummary::default();
        for i in 0..table.names.len() {
            let t = w.transitions(NodeId(i as u32), from, SimTime::MAX);
            s.weighted += (t.rising + t.falling) as f64 * table.capacitance[i];
            s.x_transitions += t.x;
        }
        for &o in &self.outputs {
            let t = w.transitions(o, from, SimTime::MAX);
            s.output_rising += t.rising;
            s.output_falling += t.falling;
        }
        s
    }

    fn check_last_cycle(&self, sc: &Scenario) -> Result<Outcome, CampaignError> {
        let w = self.simulate(sc)?;
        let (observed, one_hot_violation, failure) = self.judge(sc, &w, sc.cycles() - 1);
        Ok(Outcome {
            observed,
            one_hot_violation,
            failure,
            activity: self.activity(&w),
        })
    }

    fn in_pool<T: Send>(&self, f: impl FnOnce() -> T + Send) -> T {
        match self.cfg.jobs {
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .expect("thread pool")
                .install(f),
            None => f(),
        }
    }

    fn run_all(&self, scenarios: &[Scenario]) -> Result<Vec<Outcome>, CampaignError> {
        let results: Vec<Result<Outcome, CampaignError>> = self.in_pool(|| {
            scenarios
                .par_iter()
                .map(|sc| self.check_last_cycle(sc))
                .collect()
        });
        results.into_iter().collect()
    }

    fn report_config(&self, parameters: BTreeMap<String, String>) -> ReportConfig {
        ReportConfig {
            clock_period: self.cfg.clock_period,
            evaluation_window: self.cfg.half_period(),
            input_offset: self.cfg.input_offset,
            sample_offset: self.cfg.sim.sample_offset,
            device_delay: self.cfg.sim.device_delay,
            thresholds: self.cfg.sim.thresholds,
            seed: self.cfg.seed,
            prng: PRNG_NAME,
            parameters,
        }
    }

    /// Run single-check scenarios and fold them into a report. `group`
    /// assigns each scenario to a breakdown row.
    fn campaign(
        &self,
        name: &str,
        parameters: BTreeMap<String, String>,
        scenarios: Vec<Scenario>,
        groups: &[String],
        group: impl Fn(usize) -> usize,
    ) -> Result<(Report, Vec<Vec<Logic>>), CampaignError> {
        let outcomes = self.run_all(&scenarios)?;
        let mut counts = Counts {
            total: outcomes.len(),
            ..Default::default()
        };
        let mut breakdown: Vec<BreakdownRow> = groups
            .iter()
            .map(|g| BreakdownRow {
                label: g.clone(),
                total: 0,
                failed: 0,
            })
            .collect();
        let mut activity = ActivitySummary::default();
        let mut one_hot_violations = 0;
        let mut failures = Vec::new();
        let mut observed = Vec::with_capacity(outcomes.len());
        for (i, o) in outcomes.into_iter().enumerate() {
            activity.weighted += o.activity.weighted;
            activity.x_transitions += o.activity.x_transitions;
            activity.output_rising += o.activity.output_rising;
            activity.output_falling += o.activity.output_falling;
            one_hot_violations += o.one_hot_violation as usize;
            if let Some(row) = breakdown.get_mut(group(i)) {
                row.total += 1;
                row.failed += o.failure.is_some() as usize;
            }
            if let Some(f) = o.failure {
                tally(&mut counts, f.kind);
                failures.push(f);
            }
            observed.push(o.observed);
        }
        counts.failed = failures.len();
        counts.passed = counts.total - counts.failed;
        let report = Report {
            campaign: name.into(),
            design: self.design,
            config: self.report_config(parameters),
            counts,
            one_hot_violations,
            activity,
            breakdown,
            verdict: verdict(&failures),
            failures,
        };
        Ok((report, observed))
    }

    fn two_cycle(&self, label: String, ip: PeVector, la: bool) -> Scenario {
        let w = self.design.width();
        Scenario {
            design: self.design,
            label,
            ip_sequence: vec![PeVector::zeros(w), ip],
            la_levels: vec![false, la],
            la_schedule: Vec::new(),
            tail: 0,
        }
    }

    fn equivalence(
        &self,
        name: &str,
        parameters: BTreeMap<String, String>,
        cases: Vec<(PeVector, bool)>,
    ) -> Result<Report, CampaignError> {
        let scenarios = cases
            .into_iter()
            .map(|(ip, la)| self.two_cycle(format!("ip={ip} la={}", la as u8), ip, la))
            .collect();
        Ok(self.campaign(name, parameters, scenarios, &[], |_| 0)?.0)
    }

    /// Every input vector under both look-ahead levels, held stable for a
    /// cycle after an all-zero idle cycle.
    pub fn exhaustive_equivalence(&self) -> Result<Report, CampaignError> {
        Ok(self.exhaustive_equivalence_with_samples()?.0)
    }

    /// Exhaustive equivalence plus the sampled outputs of every case, in
    /// case order (input value major, look-ahead minor).
    pub fn exhaustive_equivalence_with_samples(
        &self,
    ) -> Result<(Report, Vec<Vec<Logic>>), CampaignError> {
        let w = self.design.width();
        if w > 16 {
            return Err(CampaignError::Unsupported(format!(
                "exhaustive equivalence supports widths up to 16, not {w}"
            )));
        }
        let scenarios = (0..1u64 << w)
            .flat_map(|x| [false, true].map(|la| (PeVector::from_u64(x, w), la)))
            .map(|(ip, la)| self.two_cycle(format!("ip={ip} la={}", la as u8), ip, la))
            .collect();
        self.campaign("exhaustive_equivalence", BTreeMap::new(), scenarios, &[], |_| 0)
    }

    /// `count` seeded random vectors with the stage enabled.
    pub fn random_equivalence(&self, count: usize) -> Result<Report, CampaignError> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        let w = self.design.width();
        let la = self.enabled_la();
        let cases = (0..count).map(|_| (random_vector(&mut rng, w), la)).collect();
        let params = BTreeMap::from([("vectors".to_string(), count.to_string())]);
        self.equivalence("random_equivalence", params, cases)
    }

    /// Look-ahead transitions `offset` ticks after the evaluation edge, in
    /// both directions, over all input vectors. Golden uses the final level.
    pub fn race_sweep(&self, offsets: &[SimTime]) -> Result<Report, CampaignError> {
        Ok(self.race_sweep_with_samples(offsets)?.0)
    }

    /// Race sweep plus sampled outputs, in case order (offset, direction
    /// falling then rising, input value).
    pub fn race_sweep_with_samples(
        &self,
        offsets: &[SimTime],
    ) -> Result<(Report, Vec<Vec<Logic>>), CampaignError> {
        let w = self.design.width();
        if w > 8 {
            return Err(CampaignError::Unsupported(format!(
                "race sweeps enumerate every input vector and support width 8, not {w}"
            )));
        }
        let limit = self.cfg.half_period() - self.cfg.sim.sample_offset;
        if let Some(o) = offsets.iter().find(|&&o| o >= limit) {
            return Err(CampaignError::Config(format!(
                "offset {o} outside the evaluation window [0, {limit})"
            )));
        }
        let mut scenarios = Vec::new();
        let mut groups = Vec::new();
        for &d in offsets {
            for (from, to) in [(true, false), (false, true)] {
                groups.push(format!("offset {d} la {}->{}", from as u8, to as u8));
                for x in 0..1u64 << w {
                    let ip = PeVector::from_u64(x, w);
                    let label = format!("ip={ip} la {}->{} at +{d}", from as u8, to as u8);
                    let mut sc = self.two_cycle(label, ip, from);
                    sc.la_schedule.push(LaEvent {
                        cycle: 1,
                        offset: d,
                        value: to,
                    });
                    scenarios.push(sc);
                }
            }
        }
        let per_group = 1usize << w;
        let params = BTreeMap::from([(
            "offsets".to_string(),
            offsets.iter().map(|o| o.to_string()).collect::<Vec<_>>().join(","),
        )]);
        self.campaign("race_sweep", params, scenarios, &groups, |i| i / per_group)
    }

    /// Consecutive input pairs with the stage enabled; the second cycle is
    /// checked.
    pub fn charge_share_scan(&self, mode: PairMode) -> Result<Report, CampaignError> {
        let w = self.design.width();
        let la = self.enabled_la();
        let pairs: Vec<(PeVector, PeVector)> = match mode {
            PairMode::Exhaustive => {
                if w > 8 {
                    return Err(CampaignError::Unsupported(format!(
                        "exhaustive pair scans support width 8, not {w}; use random pairs"
                    )));
                }
                (0..1u64 << w)
                    .flat_map(|a| (0..1u64 << w).map(move |b| (a, b)))
                    .map(|(a, b)| (PeVector::from_u64(a, w), PeVector::from_u64(b, w)))
                    .collect()
            }
            PairMode::Random(n) => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
                (0..n)
                    .map(|_| (random_vector(&mut rng, w), random_vector(&mut rng, w)))
                    .collect()
            }
        };
        let scenarios = pairs
            .into_iter()
            .map(|(a, b)| Scenario {
                design: self.design,
                label: format!("{a} then {b}"),
                ip_sequence: vec![a, b],
                la_levels: vec![la, la],
                la_schedule: Vec::new(),
                tail: 0,
            })
            .collect();
        let params = BTreeMap::from([(
            "pairs".to_string(),
            match mode {
                PairMode::Exhaustive => "exhaustive".to_string(),
                PairMode::Random(n) => format!("random:{n}"),
            },
        )]);
        Ok(self.campaign("charge_share_scan", params, scenarios, &[], |_| 0)?.0)
    }

    /// One continuous run over `sequence` with the stage enabled.
    ///
    /// A nonzero cycle must charge exactly one output during evaluation and
    /// discharge exactly one during the following pre-discharge half-period;
    /// an all-zero cycle must leave every output still. Every sample is also
    /// checked against golden.
    pub fn switching_audit(&self, sequence: &[PeVector]) -> Result<Report, CampaignError> {
        if sequence.is_empty() {
            return Err(CampaignError::Config("audit sequence is empty".into()));
        }
        let la = self.enabled_la();
        let half = self.cfg.half_period();
        let p = self.cfg.clock_period;
        let full = Scenario {
            design: self.design,
            label: "audit".into(),
            ip_sequence: sequence.to_vec(),
            la_levels: vec![la; sequence.len()],
            la_schedule: Vec::new(),
            tail: half,
        };
        let w = self.simulate(&full)?;
        let mut counts = Counts {
            total: sequence.len(),
            ..Default::default()
        };
        let mut failures = Vec::new();
        let mut failed_cycles = 0;
        let mut one_hot_violations = 0;
        for c in 0..sequence.len() {
            let prefix = || Scenario {
                label: format!("audit cycle {c}"),
                ip_sequence: sequence[..=c].to_vec(),
                la_levels: vec![la; c + 1],
                ..full.clone()
            };
            let (observed, violation, failure) = self.judge(&full, &w, c);
            one_hot_violations += violation as usize;
            let mut cycle_failed = false;
            if let Some(mut f) = failure {
                f.scenario = prefix();
                tally(&mut counts, f.kind);
                failures.push(f);
                cycle_failed = true;
            }
            let eval = self.cfg.evaluation_start(c);
            let end = (c as SimTime + 1) * p;
            let (mut er, mut ef, mut ex, mut pr, mut pf, mut px) = (0, 0, 0, 0, 0, 0);
            for &o in &self.outputs {
                let e = w.transitions(o, eval, end);
                let d = w.transitions(o, end, end + half);
                er += e.rising;
                ef += e.falling;
                ex += e.x;
                pr += d.rising;
                pf += d.falling;
                px += d.x;
            }
            let want = sequence[c].any() as usize;
            let ok = er == want && ef == 0 && ex == 0 && pf == want && pr == 0 && px == 0;
            if !ok {
                tally(&mut counts, FailureKind::Switching);
                failures.push(Failure {
                    scenario: prefix(),
                    cycle: c,
                    sample_time: self.cfg.sample_time(c),
                    expected: self.golden(&full, c),
                    observed: render(&observed),
                    kind: FailureKind::Switching,
                    detail: Some(format!(
                        "evaluation rise {er} fall {ef} x {ex}; pre-discharge rise {pr} fall {pf} x {px}"
                    )),
                });
                cycle_failed = true;
            }
            failed_cycles += cycle_failed as usize;
        }
        counts.failed = failed_cycles;
        counts.passed = counts.total - failed_cycles;
        let params = BTreeMap::from([("cycles".to_string(), sequence.len().to_string())]);
        Ok(Report {
            campaign: "switching_audit".into(),
            design: self.design,
            config: self.report_config(params),
            counts,
            one_hot_violations,
            activity: self.activity(&w),
            breakdown: Vec::new(),
            verdict: verdict(&failures),
            failures,
        })
    }
}

fn tally(c: &mut Counts, kind: FailureKind) {
    match kind {
        FailureKind::Flip => c.flips += 1,
        FailureKind::X => c.x += 1,
        FailureKind::Switching => c.switching += 1,
    }
}

fn verdict(failures: &[Failure]) -> Verdict {
    if failures.is_empty() {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

/// Logic values as a string, index 0 first.
pub fn render(values: &[Logic]) -> String {
    values.iter().map(|l| l.as_char()).collect()
}

/// Random vector with a random density, so that both sparse vectors (deep
/// winners) and dense ones occur.
pub fn random_vector<R: Rng>(rng: &mut R, width: usize) -> PeVector {
    let sparsity = rng.random_range(1..=8u32) * 2;
    PeVector::new((0..width).map(|_| rng.random_ratio(1, sparsity)).collect())
}

/// Seeded sequence for switching audits; about one cycle in five is all-zero.
pub fn random_sequence(width: usize, cycles: usize, seed: u64) -> Vec<PeVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..cycles)
        .map(|_| {
            if rng.random_ratio(1, 5) {
                PeVector::zeros(width)
            } else {
                random_vector(&mut rng, width)
            }
        })
        .collect()
}

pub fn exhaustive_equivalence(design: DesignId, cfg: CampaignConfig) -> Result<Report, CampaignError> {
    Verifier::new(design, cfg)?.exhaustive_equivalence()
}

pub fn race_sweep(
    design: DesignId,
    offsets: &[SimTime],
    cfg: CampaignConfig,
) -> Result<Report, CampaignError> {
    Verifier::new(design, cfg)?.race_sweep(offsets)
}

pub fn charge_share_scan(
    design: DesignId,
    mode: PairMode,
    cfg: CampaignConfig,
) -> Result<Report, CampaignError> {
    Verifier::new(design, cfg)?.charge_share_scan(mode)
}

pub fn switching_audit(
    design: DesignId,
    sequence: &[PeVector],
    cfg: CampaignConfig,
) -> Result<Report, CampaignError> {
    Verifier::new(design, cfg)?.switching_audit(sequence)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn robust() -> Verifier {
        Verifier::new(DesignId::Robust8, CampaignConfig::default()).unwrap()
    }

    #[test]
    fn stimulus_places_inputs_and_la_events() {
        let v = robust();
        let sc = Scenario {
            design: DesignId::Robust8,
            label: "t".into(),
            ip_sequence: vec!["10000000".parse().unwrap(), "01000000".parse().unwrap()],
            la_levels: vec![false, true],
            la_schedule: vec![LaEvent {
                cycle: 1,
                offset: 3,
                value: false,
            }],
            tail: 0,
        };
        let st = v.stimulus(&sc).unwrap();
        assert_eq!(st.duration, 200);
        assert_eq!(st.input_schedule["IP0"], vec![(10, true), (110, false)]);
        assert_eq!(st.input_schedule["IP1"], vec![(110, true)]);
        assert_eq!(st.input_schedule["LA"], vec![(110, true), (153, false)]);
        assert!(!sc.la_at_sample(1));
        assert!(!sc.la_at_sample(0));
    }

    #[test]
    fn scenario_validation() {
        let v = robust();
        let mut sc = v.two_cycle("x".into(), PeVector::zeros(8), false);
        sc.la_schedule.push(LaEvent {
            cycle: 1,
            offset: 49,
            value: true,
        });
        assert!(matches!(v.stimulus(&sc), Err(CampaignError::Scenario { .. })));
        sc.la_schedule[0].offset = 5;
        sc.la_schedule.push(LaEvent {
            cycle: 1,
            offset: 5,
            value: false,
        });
        assert!(v.stimulus(&sc).is_err());
        sc.la_schedule.truncate(1);
        sc.la_levels.pop();
        assert!(v.stimulus(&sc).is_err());
        let mut bad = v.two_cycle("w".into(), PeVector::zeros(8), false);
        bad.ip_sequence[1] = PeVector::zeros(4);
        assert!(v.stimulus(&bad).is_err());
    }

    #[test]
    fn bad_configs_rejected() {
        for cfg in [
            CampaignConfig {
                clock_period: 3,
                ..Default::default()
            },
            CampaignConfig {
                input_offset: 50,
                ..Default::default()
            },
            CampaignConfig {
                jobs: Some(0),
                ..Default::default()
            },
        ] {
            assert!(matches!(
                Verifier::new(DesignId::Robust8, cfg),
                Err(CampaignError::Config(_))
            ));
        }
    }

    #[test]
    fn single_case_replay() {
        let v = robust();
        let sc = v.two_cycle("x".into(), "00110000".parse().unwrap(), false);
        let s = v.replay(&sc).unwrap();
        assert_eq!(render(&s[1]), "00100000");
        assert_eq!(render(&s[0]), "00000000");
    }

    #[test]
    fn identical_zero_pair_passes_everywhere() {
        for d in [DesignId::Robust8, DesignId::RaceProne8, DesignId::ChargeShareProne8] {
            let v = Verifier::new(d, CampaignConfig::default()).unwrap();
            let la = d.lookahead_active_high();
            let sc = Scenario {
                design: d,
                label: "zeros".into(),
                ip_sequence: vec![PeVector::zeros(8); 2],
                la_levels: vec![la; 2],
                la_schedule: Vec::new(),
                tail: 0,
            };
            let o = v.check_last_cycle(&sc).unwrap();
            assert!(o.failure.is_none(), "{d}");
        }
    }

    #[test]
    fn all_zero_audit_is_silent() {
        let v = robust();
        let r = v.switching_audit(&vec![PeVector::zeros(8); 20]).unwrap();
        assert!(r.passed());
        assert_eq!(r.activity.output_rising, 0);
        assert_eq!(r.activity.output_falling, 0);
    }

    #[test]
    fn random_helpers_are_seeded() {
        assert_eq!(random_sequence(8, 50, 3), random_sequence(8, 50, 3));
        assert_ne!(random_sequence(8, 50, 3), random_sequence(8, 50, 4));
        assert!(random_sequence(8, 200, 3).iter().any(|v| !v.any()));
    }

    #[test]
    fn unsupported_widths() {
        let v = Verifier::new(DesignId::Cascaded(32), CampaignConfig::default()).unwrap();
        assert!(matches!(v.exhaustive_equivalence(), Err(CampaignError::Unsupported(_))));
        assert!(matches!(v.race_sweep(&[1]), Err(CampaignError::Unsupported(_))));
        assert!(matches!(
            v.charge_share_scan(PairMode::Exhaustive),
            Err(CampaignError::Unsupported(_))
        ));
        assert!(matches!(robust().race_sweep(&[49]), Err(CampaignError::Config(_))));
    }

    #[test]
    fn netlist_must_fit_design() {
        let n = DesignId::Robust8.build().unwrap();
        assert!(matches!(
            Verifier::with_netlist(DesignId::Cascaded(16), &n, CampaignConfig::default()),
            Err(CampaignError::Netlist { .. })
        ));
    }

    #[test]
    fn report_renders() {
        let v = robust();
        let r = v.random_equivalence(10).unwrap();
        assert_eq!(r.counts.total, 10);
        assert!(r.to_table(5).contains("verdict   PASS"));
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(json["config"]["prng"], "ChaCha8");
        assert_eq!(json["verdict"], "pass");
    }
}
