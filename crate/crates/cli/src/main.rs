use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use coopstore_cli::commands;
use coopstore_cli::config::{parse_size, EvePlacement, ExperimentConfig, FieldArg, NodeList, Overrides, ParamArgs, Variant};
use coopstore_cli::{exit, CliError};

/// Cooperative regenerating codes: store, repair, attack and audit.
#[derive(Parser, Debug)]
#[command(name = "coopstore", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// JSON config file; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Code parameters, e.g. n=6,k=3,d=3,t=2.
    #[arg(long, global = true)]
    params: Option<ParamArgs>,
    /// Field, e.g. p=11, m=4 or m=4,poly=0x13.
    #[arg(long, global = true)]
    field: Option<FieldArg>,
    #[arg(long, global = true, value_enum)]
    variant: Option<Variant>,
    /// RNG seed; falls back to the config file, then COOPSTORE_SEED, then 0.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Code-A diagonal generator.
    #[arg(long, global = true)]
    omega: Option<u64>,
    /// Code-A parity index whose transfers the attack uses.
    #[arg(long, global = true)]
    parity: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Also write the JSON report here.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Stripe a file into generations and write one shard file per node.
    Encode {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rebuild the original file from any k shard files.
    Decode {
        dir: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Regenerate a group of failed shards by cooperative repair.
    Repair {
        dir: PathBuf,
        #[arg(long)]
        group: NodeList,
        #[arg(long)]
        helpers: Option<NodeList>,
        /// Where to write regenerated shards (default: DIR).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recover the stored data of an unstable code from one node's downloads.
    Attack,
    /// Measured against predicted secrecy capacity over every eavesdropper placement.
    Sweep {
        /// Restrict to these (l1, l2) sizes, e.g. --size 1,1.
        #[arg(long = "size", value_parser = parse_size)]
        sizes: Vec<(usize, usize)>,
        /// Nodes whose storage the eavesdropper reads (adds a placement report).
        #[arg(long)]
        observe: Option<NodeList>,
        /// Nodes whose repair downloads the eavesdropper reads.
        #[arg(long)]
        downloads: Option<NodeList>,
        /// Write the capacity table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Lemma identities, stability, entropy cross-checks, bandwidth and secrecy.
    Verify,
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let c = cli.common;
    let mut flags = Overrides {
        params: c.params,
        field: c.field,
        variant: c.variant,
        seed: c.seed,
        omega: c.omega,
        parity: c.parity,
        ..Default::default()
    };
    let mut csv = None;
    if let Command::Sweep { sizes, observe, downloads, csv: path } = &cli.cmd {
        if !sizes.is_empty() {
            flags.sweep = Some(sizes.clone());
        }
        if observe.is_some() || downloads.is_some() {
            flags.eve = Some(EvePlacement {
                observed: observe.clone().map(|n| n.0).unwrap_or_default(),
                downloads: downloads.clone().map(|n| n.0).unwrap_or_default(),
            });
        }
        csv = path.clone();
    }
    let cfg = ExperimentConfig::resolve(c.config.as_deref(), flags)?;
    let report = match &cli.cmd {
        Command::Encode { input, out } => commands::encode(&cfg, input, out)?,
        Command::Decode { dir, out } => commands::decode(&cfg, dir, out)?,
        Command::Repair { dir, group, helpers, out } => commands::repair(&cfg, dir, &group.0, helpers.as_ref().map(|h| h.0.as_slice()), out.as_deref())?,
        Command::Attack => commands::attack(&cfg)?,
        Command::Sweep { .. } => commands::sweep(&cfg)?,
        Command::Verify => commands::verify(&cfg)?,
    };
    if let Some(path) = &csv {
        report.write_csv(path)?;
    }
    let json = report.to_json()?;
    if let Some(path) = &c.report {
        std::fs::write(path, &json).map_err(|e| CliError::io(path, e))?;
    }
    match c.format {
        Format::Table => print!("{}", report.to_table()),
        Format::Json => println!("{json}"),
    }
    Ok(if report.passed { exit::PASS } else { exit::FAILED })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit::USAGE)
        }
    }
}
