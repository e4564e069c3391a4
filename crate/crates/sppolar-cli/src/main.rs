//! Command-line front end: construction, weight-spectrum analysis,
//! Monte-Carlo BLER simulation and path-metric-range traces, emitting
//! CSV plus a JSON run manifest next to every output file.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sppolar::analysis::{
    min_weight_estimate_scl, path_metric_range, weight_spectrum_exhaustive_guarded, Exactness,
    WeightSpectrum,
};
use sppolar::builders::{
    build_ca_polar, build_deep_polar, build_pac, build_polar, build_spp, ConstructionChannel,
    MergePolicy, PacProfile, CONV_133,
};
use sppolar::channel::ChannelConfig;
use sppolar::codespec::{CodeSpec, Family};
use sppolar::construct::min_weight_lower_bound;
use sppolar::decode::{DecodeOptions, MetricMode, PreparedCode};
use sppolar::sim::{random_message, simulate_bler, trial_rng, SimRecord, Stopping};
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "sppolar",
    version,
    about = "Sparsely pre-transformed polar codes: construct, analyse, simulate"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a code spec JSON (and a coset-count summary for spp/polar).
    Construct(ConstructArgs),
    /// Weight spectrum of a code spec, exhaustive or list-estimated.
    Weights(WeightsArgs),
    /// Monte-Carlo BLER sweep over Eb/N0 points.
    Simulate(SimulateArgs),
    /// Mean path-metric-range trace over random noise realizations.
    Pmr(PmrArgs),
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    /// polar | spp | ca_polar | pac | deep_polar
    #[arg(long)]
    family: String,
    /// bec:<eps> | ga:<ebn0_db> | 5g:<path>
    #[arg(long)]
    reliability: String,
    /// Type-I layer dims as "N1:K1,N2:K2,..."
    #[arg(long, default_value = "")]
    type1: String,
    /// auto | always | off
    #[arg(long, default_value = "auto")]
    type2: String,
    /// CRC polynomial bits c0..cm, e.g. 1101 for 1+x+x^3
    #[arg(long)]
    crc: Option<String>,
    /// Convolution polynomial bits c0..cm (pac family)
    #[arg(long)]
    conv: Option<String>,
    /// Deep polar layer dims as "N1:K1,...,NL:KL" (innermost first)
    #[arg(long, default_value = "")]
    deep: String,
    /// PAC rate profile: reliability | rm
    #[arg(long, default_value = "reliability")]
    pac_profile: String,
    /// Output spec path
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct WeightsArgs {
    /// Code spec JSON path
    #[arg(long)]
    spec: PathBuf,
    /// exhaustive | scl:<list size>
    #[arg(long, default_value = "exhaustive")]
    mode: String,
    /// Guard on exhaustive message-space size
    #[arg(long, default_value_t = sppolar::analysis::EXHAUSTIVE_GUARD)]
    guard: usize,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Comma-separated Eb/N0 list in dB
    #[arg(long)]
    ebn0: String,
    #[arg(long, default_value_t = 8)]
    list_size: usize,
    #[arg(long, default_value_t = 100)]
    min_errors: u64,
    #[arg(long, default_value_t = 1_000_000)]
    max_trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = false)]
    genie: bool,
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct PmrArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, default_value_t = 3.0)]
    ebn0: f64,
    #[arg(long, default_value_t = 2)]
    list_size: usize,
    /// Number of noise realizations to average over
    #[arg(long, default_value_t = 1000)]
    noises: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Serialize)]
struct RunManifest {
    command: String,
    config: serde_json::Value,
    tool_version: String,
    master_seed: Option<u64>,
    timestamp: String,
}

fn manifest_timestamp() -> String {
    // honour SOURCE_DATE_EPOCH for byte-identical reruns
    if let Ok(epoch) = std::env::var("SOURCE_DATE_EPOCH") {
        return format!("epoch:{epoch}");
    }
    let now = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("epoch:{now}")
}

fn write_manifest(
    out: &Path,
    command: &str,
    config: serde_json::Value,
    seed: Option<u64>,
) -> Result<()> {
    let manifest = RunManifest {
        command: command.to_string(),
        config,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        master_seed: seed,
        timestamp: manifest_timestamp(),
    };
    let path = manifest_path(out);
    std::fs::write(&path, serde_json::to_string_pretty(&manifest)?)
        .with_context(|| format!("writing manifest {}", path.display()))?;
    Ok(())
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

fn parse_dims(text: &str) -> Result<Vec<(usize, usize)>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|part| {
            let (n, k) = part
                .split_once(':')
                .with_context(|| format!("bad layer dim {part:?}, expected N:K"))?;
            Ok((n.trim().parse()?, k.trim().parse()?))
        })
        .collect()
}

fn parse_poly(text: &str) -> Result<Vec<u8>> {
    let bits: Vec<u8> = text
        .chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => bail!("polynomial bit {other:?} is not 0/1"),
        })
        .collect::<Result<_>>()?;
    if bits.is_empty() {
        bail!("empty polynomial");
    }
    Ok(bits)
}

fn parse_channel(text: &str) -> Result<ConstructionChannel> {
    let (kind, arg) = text
        .split_once(':')
        .with_context(|| format!("bad reliability {text:?}, expected kind:arg"))?;
    Ok(match kind {
        "bec" => ConstructionChannel::Bec { eps: arg.parse()? },
        "ga" => ConstructionChannel::Ga {
            design_ebn0_db: arg.parse()?,
            rate: 0.5,
        },
        "5g" => ConstructionChannel::Sequence {
            text: std::fs::read_to_string(arg)
                .with_context(|| format!("reading sequence file {arg}"))?,
        },
        other => bail!("unknown reliability kind {other:?}"),
    })
}

fn cmd_construct(args: &ConstructArgs) -> Result<()> {
    let family: Family = args.family.parse().map_err(|e| anyhow::anyhow!("{e}"))?;
    let mut channel = parse_channel(&args.reliability)?;
    if let ConstructionChannel::Ga { rate, .. } = &mut channel {
        *rate = args.k as f64 / args.n as f64;
    }
    let dims = parse_dims(&args.type1)?;
    let merge = match args.type2.as_str() {
        "auto" => MergePolicy::Auto,
        "always" => MergePolicy::Always,
        "off" => MergePolicy::Off,
        other => bail!("unknown --type2 value {other:?}"),
    };
    let crc = args.crc.as_deref().map(parse_poly).transpose()?;
    let spec = match family {
        Family::Polar => build_polar(&channel, args.n, args.k)?,
        Family::CaPolar => {
            let poly = crc.clone().context("ca_polar requires --crc <poly-bits>")?;
            build_ca_polar(&channel, args.n, args.k, &poly)?
        }
        Family::Spp => build_spp(&channel, args.n, args.k, &dims, merge, crc.as_deref())?,
        Family::Pac => {
            let poly = match &args.conv {
                Some(text) => parse_poly(text)?,
                None => CONV_133.to_vec(),
            };
            let rule = match args.pac_profile.as_str() {
                "reliability" => PacProfile::Reliability,
                "rm" => PacProfile::RmRule,
                other => bail!("unknown --pac-profile {other:?}"),
            };
            build_pac(&channel, args.n, args.k, &poly, rule)?
        }
        Family::DeepPolar => {
            let deep = parse_dims(&args.deep)?;
            build_deep_polar(&channel, args.n, args.k, &deep)?
        }
    };
    std::fs::write(&args.out, spec.to_json()?)
        .with_context(|| format!("writing {}", args.out.display()))?;

    // coset-count summary of the base information set
    if matches!(family, Family::Polar | Family::Spp) {
        let info: BTreeSet<usize> = spec.profile.base_info.iter().copied().collect();
        if !info.is_empty() {
            let report = min_weight_lower_bound(&info, spec.block_len)
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            eprintln!(
                "base-layer min row weight {}: {} cosets, lower bound {} min-weight codewords",
                report.min_weight,
                report.cosets.len(),
                report.total
            );
        }
    }

    write_manifest(
        &args.out,
        "construct",
        serde_json::json!({
            "n": args.n, "k": args.k, "family": args.family,
            "reliability": args.reliability, "type1": args.type1,
            "type2": args.type2, "crc": args.crc, "conv": args.conv,
            "deep": args.deep, "pac_profile": args.pac_profile,
        }),
        None,
    )?;
    Ok(())
}

fn load_spec(path: &Path) -> Result<CodeSpec> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    CodeSpec::from_json(&text).map_err(|e| anyhow::anyhow!("{e}"))
}

fn cmd_weights(args: &WeightsArgs) -> Result<()> {
    let spec = load_spec(&args.spec)?;
    let spectrum: WeightSpectrum = if args.mode == "exhaustive" {
        weight_spectrum_exhaustive_guarded(&spec, args.guard).map_err(|e| anyhow::anyhow!("{e}"))?
    } else if let Some(s) = args.mode.strip_prefix("scl:") {
        let list_size: usize = s.parse().context("bad list size in --mode scl:<S>")?;
        let est = min_weight_estimate_scl(&spec, list_size).map_err(|e| anyhow::anyhow!("{e}"))?;
        let mut counts = std::collections::BTreeMap::new();
        counts.insert(0usize, 1u64);
        if let Some((w, c)) = est {
            counts.insert(w, c);
        }
        WeightSpectrum {
            counts,
            exactness: Exactness::Estimated { list_size },
        }
    } else {
        bail!("unknown --mode {:?}", args.mode);
    };

    let mut out = String::new();
    match spectrum.exactness {
        Exactness::Exact => out.push_str("# spectrum: exact\n"),
        Exactness::Estimated { list_size } => {
            out.push_str(&format!("# spectrum: estimated list_size={list_size}\n"))
        }
    }
    out.push_str("weight,count\n");
    for (w, c) in &spectrum.counts {
        out.push_str(&format!("{w},{c}\n"));
    }
    std::fs::write(&args.out, out).with_context(|| format!("writing {}", args.out.display()))?;
    write_manifest(
        &args.out,
        "weights",
        serde_json::json!({"spec": args.spec, "mode": args.mode, "guard": args.guard}),
        None,
    )?;
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    if args.max_trials == 0 {
        bail!("--max-trials must be at least 1");
    }
    let spec = load_spec(&args.spec)?;
    let rate = spec.k as f64 / spec.block_len as f64;
    let points: Vec<f64> = args
        .ebn0
        .split(',')
        .map(|p| p.trim().parse().context("bad Eb/N0 value"))
        .collect::<Result<_>>()?;
    let workers = if args.workers == 0 {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    } else {
        args.workers
    };
    let mut records: Vec<SimRecord> = Vec::new();
    for &ebn0_db in &points {
        let channel = ChannelConfig::BiAwgn { ebn0_db, rate };
        let record = simulate_bler(
            &spec,
            args.list_size,
            &channel,
            Stopping {
                min_errors: args.min_errors,
                max_trials: args.max_trials,
            },
            args.seed,
            args.genie,
            workers,
        )
        .map_err(|e| anyhow::anyhow!("{e}"))?;
        eprintln!(
            "{} S={} {} trials={} errors={} bler={:.3e}",
            record.spec_id,
            record.list_size,
            record.channel,
            record.trials,
            record.errors,
            record.bler()
        );
        records.push(record);
    }
    let mut out = String::from("spec_id,S,channel,ebn0_db,trials,errors,e1,e2,bler\n");
    for r in &records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.spec_id,
            r.list_size,
            r.channel,
            r.ebn0_db.map_or(String::new(), |v| v.to_string()),
            r.trials,
            r.errors,
            r.e1,
            r.e2,
            r.bler()
        ));
    }
    std::fs::write(&args.out, out).with_context(|| format!("writing {}", args.out.display()))?;
    write_manifest(
        &args.out,
        "simulate",
        serde_json::json!({
            "spec": args.spec, "ebn0": args.ebn0, "list_size": args.list_size,
            "min_errors": args.min_errors, "max_trials": args.max_trials,
            "genie": args.genie, "workers": args.workers,
        }),
        Some(args.seed),
    )?;
    Ok(())
}

fn cmd_pmr(args: &PmrArgs) -> Result<()> {
    let spec = load_spec(&args.spec)?;
    let rate = spec.k as f64 / spec.block_len as f64;
    let code = PreparedCode::new(&spec).map_err(|e| anyhow::anyhow!("{e}"))?;
    let channel = ChannelConfig::BiAwgn {
        ebn0_db: args.ebn0,
        rate,
    };
    let mut traces = Vec::with_capacity(args.noises as usize);
    for trial in 0..args.noises {
        let mut rng = trial_rng(args.seed, trial);
        let message = random_message(spec.k, &mut rng);
        let x = code.encode(&message).map_err(|e| anyhow::anyhow!("{e}"))?;
        let llr = sppolar::channel::channel_llr(&x, &channel, &mut rng)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        let opts = DecodeOptions {
            mode: MetricMode::Approx,
            genie_message: None,
            trace: true,
        };
        let res = code
            .decode(&llr, args.list_size, &opts)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        traces.push(res.trace.expect("trace requested"));
    }
    let means = path_metric_range(&traces).map_err(|e| anyhow::anyhow!("{e}"))?;
    let mut out = String::from("step,mean_pmr\n");
    for (i, m) in means.iter().enumerate() {
        out.push_str(&format!("{i},{m}\n"));
    }
    std::fs::write(&args.out, out).with_context(|| format!("writing {}", args.out.display()))?;
    write_manifest(
        &args.out,
        "pmr",
        serde_json::json!({
            "spec": args.spec, "ebn0": args.ebn0, "list_size": args.list_size,
            "noises": args.noises,
        }),
        Some(args.seed),
    )?;
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Construct(args) => cmd_construct(args),
        Command::Weights(args) => cmd_weights(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Pmr(args) => cmd_pmr(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
