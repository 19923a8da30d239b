// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use pesim_core::designs::{device_breakdown, DesignId};
use pesim_core::netlist::{parse_netlist, serialize_netlist, Netlist};
use pesim_core::sim::{SimConfig, SimTime, Simulator, Stimulus};
use pesim_core::verify::{random_sequence, render, CampaignConfig, PairMode, Report, Verifier};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "pesim", version, about = "Switch-level simulation and verification of dynamic CMOS priority encoders")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a netlist under a stimulus file.
    Simulate(SimulateArgs),
    /// Exhaustive (or seeded random) functional equivalence.
    Verify(VerifyArgs),
    /// Late look-ahead transitions at a range of offsets.
    Race(RaceArgs),
    /// Consecutive input pairs looking for charge-sharing flips.
    Sharescan(ShareArgs),
    /// Switching audit over a seeded random input sequence.
    Power(PowerArgs),
    /// Build a wide encoder and check it against the golden model.
    Cascade(CascadeArgs),
    /// Print a built-in design as netlist text.
    Dump(DumpArgs),
    /// Transistor count of a design, grouped by role.
    Count(CountArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Args)]
struct Common {
    /// Built-in design: robust8, raceprone8, cshare8 or cascade<N>.
    #[arg(long, default_value = "robust8")]
    design: DesignId,
    /// Netlist file to check instead of the built-in design (golden model
    /// still taken from --design).
    #[arg(long)]
    netlist: Option<PathBuf>,
    /// Write the JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads for campaign cases.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, conflicts_with = "design")]
    netlist: Option<PathBuf>,
    #[arg(long)]
    design: Option<DesignId>,
    #[arg(long)]
    stim: PathBuf,
    #[arg(long)]
    vcd: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    /// Check this many seeded random vectors instead of every input.
    #[arg(long)]
    random: Option<usize>,
}

#[derive(Args)]
struct RaceArgs {
    #[command(flatten)]
    common: Common,
    /// Inclusive tick range after the evaluation edge, `a:b`.
    #[arg(long, default_value = "1:24")]
    offsets: OffsetRange,
}

#[derive(Args)]
struct ShareArgs {
    #[command(flatten)]
    common: Common,
    /// `exhaustive` or `random:N`.
    #[arg(long, default_value = "exhaustive")]
    pairs: Pairs,
}

#[derive(Args)]
struct PowerArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 1000)]
    cycles: usize,
}

#[derive(Args)]
struct CascadeArgs {
    #[arg(long, default_value_t = 16)]
    bits: usize,
    /// Random vectors for widths too large to enumerate.
    #[arg(long, default_value_t = 1000)]
    vectors: usize,
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct DumpArgs {
    #[arg(long, default_value = "robust8")]
    design: DesignId,
    /// Write to this file instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long, default_value = "robust8")]
    design: DesignId,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Clone, Copy)]
struct OffsetRange(SimTime, SimTime);

impl std::str::FromStr for OffsetRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |x: &str| x.trim().parse::<SimTime>().map_err(|e| format!("{x:?}: {e}"));
        let (a, b) = match s.split_once(':') {
            Some((a, b)) => (parse(a)?, parse(b)?),
            None => {
                let a = parse(s)?;
                (a, a)
            }
        };
        if a > b {
            return Err(format!("empty range {a}:{b}"));
        }
        Ok(OffsetRange(a, b))
    }
}

#[derive(Clone, Copy)]
struct Pairs(PairMode);

impl std::str::FromStr for Pairs {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "exhaustive" {
            return Ok(Pairs(PairMode::Exhaustive));
        }
        match s.strip_prefix("random:").map(str::parse::<usize>) {
            Some(Ok(n)) if n > 0 => Ok(Pairs(PairMode::Random(n))),
            _ => Err(format!("expected exhaustive or random:N, got {s:?}")),
        }
    }
}

fn read_netlist(path: &Path) -> Result<Netlist> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_netlist(&text).with_context(|| format!("parsing {}", path.display()))
}

fn verifier(c: &Common) -> Result<Verifier> {
    let cfg = CampaignConfig {
        seed: c.seed,
        jobs: c.jobs,
        ..Default::default()
    };
    Ok(match &c.netlist {
        Some(p) => Verifier::with_netlist(c.design, &read_netlist(p)?, cfg)?,
        None => Verifier::new(c.design, cfg)?,
    })
}

/// Print and optionally save a report; exit status follows its verdict.
fn emit(report: &Report, format: Format, path: Option<&Path>) -> Result<ExitCode> {
    let json = report.to_json();
    if let Some(p) = path {
        fs::write(p, format!("{json}\n")).with_context(|| format!("writing {}", p.display()))?;
    }
    match format {
        Format::Json => println!("{json}"),
        Format::Table => print!("{}", report.to_table(20)),
    }
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

#[derive(Serialize)]
struct SampleRow {
    time: SimTime,
    outputs: String,
}

#[derive(Serialize)]
struct SimulationSummary {
    duration: SimTime,
    outputs: Vec<String>,
    samples: Vec<SampleRow>,
    rail_short_events: usize,
}

fn simulate(a: &SimulateArgs) -> Result<ExitCode> {
    let netlist = match (&a.netlist, a.design) {
        (Some(p), _) => read_netlist(p)?,
        (None, Some(d)) => d.build()?,
        (None, None) => bail!("either --netlist or --design is required"),
    };
    let stim_text =
        fs::read_to_string(&a.stim).with_context(|| format!("reading {}", a.stim.display()))?;
    let stim = Stimulus::parse(&stim_text).with_context(|| format!("parsing {}", a.stim.display()))?;
    let config = SimConfig::default();
    let wave = Simulator::new(&netlist, config)?.run(&stim)?;
    if let Some(p) = &a.vcd {
        let f = fs::File::create(p).with_context(|| format!("creating {}", p.display()))?;
        wave.write_vcd(std::io::BufWriter::new(f))?;
    }
    let outputs = netlist.outputs();
    let samples = stim
        .clock_edges()
        .into_iter()
        .filter(|&(t, level)| !level && t >= config.sample_offset)
        .map(|(t, _)| t - config.sample_offset)
        .map(|t| SampleRow {
            time: t,
            outputs: render(&outputs.iter().map(|&o| wave.logic_at(o, t)).collect::<Vec<_>>()),
        })
        .collect();
    let summary = SimulationSummary {
        duration: wave.duration(),
        outputs: outputs.iter().map(|&o| netlist.node_name(o).to_string()).collect(),
        samples,
        rail_short_events: wave.rail_shorts().len(),
    };
    match a.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&summary)?),
        Format::Table => {
            println!("outputs {}", summary.outputs.join(" "));
            for s in &summary.samples {
                println!("{:>8}  {}", s.time, s.outputs);
            }
            println!("duration {}, rail-short events {}", summary.duration, summary.rail_short_events);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cascade(a: &CascadeArgs) -> Result<ExitCode> {
    let design = DesignId::cascaded(a.bits)?;
    let cfg = CampaignConfig {
        seed: a.seed,
        jobs: a.jobs,
        ..Default::default()
    };
    let v = Verifier::new(design, cfg)?;
    let count = design.build()?.device_count();
    eprintln!("{design}: {} transistors ({} nmos, {} pmos)", count.total, count.nmos, count.pmos);
    let report = if a.bits <= 16 {
        v.exhaustive_equivalence()?
    } else {
        v.random_equivalence(a.vectors)?
    };
    emit(&report, a.format, a.report.as_deref())
}

fn dump(a: &DumpArgs) -> Result<ExitCode> {
    let text = serialize_netlist(&a.design.build()?);
    match &a.output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn count(a: &CountArgs) -> Result<ExitCode> {
    let n = a.design.build()?;
    let total = n.device_count();
    let roles = device_breakdown(&n);
    match a.format {
        Format::Json => {
            let doc = serde_json::json!({ "design": a.design, "total": total, "by_role": roles });
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
        Format::Table => {
            println!("{:<8} {:>5} {:>5} {:>5}", "role", "nmos", "pmos", "total");
            for (role, c) in &roles {
                println!("{role:<8} {:>5} {:>5} {:>5}", c.nmos, c.pmos, c.total);
            }
            println!("{:<8} {:>5} {:>5} {:>5}", "all", total.nmos, total.pmos, total.total);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Simulate(a) => simulate(&a),
        Command::Verify(a) => {
            let v = verifier(&a.common)?;
            let report = match a.random {
                Some(n) => v.random_equivalence(n)?,
                None => v.exhaustive_equivalence()?,
            };
            emit(&report, a.common.format, a.common.report.as_deref())
        }
        Command::Race(a) => {
            let offsets: Vec<SimTime> = (a.offsets.0..=a.offsets.1).collect();
            let report = verifier(&a.common)?.race_sweep(&offsets)?;
            emit(&report, a.common.format, a.common.report.as_deref())
        }
        Command::Sharescan(a) => {
            let report = verifier(&a.common)?.charge_share_scan(a.pairs.0)?;
            emit(&report, a.common.format, a.common.report.as_deref())
        }
        Command::Power(a) => {
            if a.cycles == 0 {
                return Err(anyhow!("--cycles must be positive"));
            }
            let v = verifier(&a.common)?;
            let seq = random_sequence(v.design().width(), a.cycles, a.common.seed);
            let report = v.switching_audit(&seq)?;
            emit(&report, a.common.format, a.common.report.as_deref())
        }
        Command::Cascade(a) => cascade(&a),
        Command::Dump(a) => dump(&a),
        Command::Count(a) => count(&a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offset_ranges() {
        let r: OffsetRange = "1:24".parse().unwrap();
        assert_eq!((r.0, r.1), (1, 24));
        let r: OffsetRange = "7".parse().unwrap();
        assert_eq!((r.0, r.1), (7, 7));
        assert!("5:2".parse::<OffsetRange>().is_err());
        assert!("a:2".parse::<OffsetRange>().is_err());
    }

    #[test]
    fn pair_modes() {
        assert_eq!("exhaustive".parse::<Pairs>().unwrap().0, PairMode::Exhaustive);
        assert_eq!("random:40".parse::<Pairs>().unwrap().0, PairMode::Random(40));
        assert!("random:".parse::<Pairs>().is_err());
        assert!("random:0".parse::<Pairs>().is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
