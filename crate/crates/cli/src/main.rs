use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod error;

use devassist_core::router::{Battery, Complexity, DeviceClass, NetworkState};
use error::Status;

#[derive(Parser)]
#[command(name = "devassist", version, about = "Local-first developer assistant tooling")]
struct Cli {
    /// Central YAML config file; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Embed the source files under a directory into a vector index.
    Index {
        dir: PathBuf,
        /// Files beyond this many (in path order) are skipped.
        #[arg(long)]
        max_files: Option<usize>,
        #[arg(long, default_value = "index.bin")]
        out: PathBuf,
    },
    /// Retrieve and fuse context for a free-text query.
    Query {
        text: String,
        #[arg(long, default_value_t = 10)]
        top_k: usize,
        #[arg(long, default_value_t = 4096, allow_negative_numbers = true)]
        budget: i64,
        #[arg(long, default_value = "index.bin")]
        index: PathBuf,
        /// Extra context items (IDE interactions, runtime logs) as a JSON array.
        #[arg(long)]
        context: Option<PathBuf>,
        /// Session clock in seconds; defaults to the newest context timestamp.
        #[arg(long)]
        now: Option<f64>,
    },
    /// Describe and lint a constraint layout XML file.
    DescribeLayout { file: PathBuf },
    /// Decide where a task of the given shape should run.
    Route {
        #[arg(long, value_enum)]
        complexity: ComplexityArg,
        #[arg(long, value_enum)]
        device: DeviceArg,
        #[arg(long, value_enum)]
        network: NetworkArg,
        #[arg(long, value_enum)]
        battery: BatteryArg,
        /// Use a previously exported policy instead of solving.
        #[arg(long)]
        policy: Option<PathBuf>,
        /// Write the solved policy as JSON.
        #[arg(long)]
        save_policy: Option<PathBuf>,
    },
    /// Run one routing policy over a seeded synthetic workload.
    Simulate {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "report.json")]
        out: PathBuf,
        /// Overrides `simulation.policy` from the config.
        #[arg(long, value_enum)]
        policy: Option<PolicyArg>,
        /// Also write the event log, one JSON object per line.
        #[arg(long)]
        events: Option<PathBuf>,
    },
    /// Run every configured policy on the same workload and report deltas.
    Compare {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "comparison.json")]
        out: PathBuf,
        /// CSV output; defaults to the JSON path with a .csv extension.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ComplexityArg {
    Low,
    Medium,
    High,
}

#[derive(Clone, Copy, ValueEnum)]
enum DeviceArg {
    #[value(alias = "cpu-only")]
    Cpu,
    Gpu,
}

#[derive(Clone, Copy, ValueEnum)]
enum NetworkArg {
    Good,
    Degraded,
    Offline,
}

#[derive(Clone, Copy, ValueEnum)]
enum BatteryArg {
    Ok,
    Low,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    AllCloud,
    AllEdge,
    Threshold,
    Mdp,
}

impl From<ComplexityArg> for Complexity {
    fn from(a: ComplexityArg) -> Self {
        match a {
            ComplexityArg::Low => Complexity::Low,
            ComplexityArg::Medium => Complexity::Medium,
            ComplexityArg::High => Complexity::High,
        }
    }
}

impl From<DeviceArg> for DeviceClass {
    fn from(a: DeviceArg) -> Self {
        match a {
            DeviceArg::Cpu => DeviceClass::CpuOnly,
            DeviceArg::Gpu => DeviceClass::Gpu,
        }
    }
}

impl From<NetworkArg> for NetworkState {
    fn from(a: NetworkArg) -> Self {
        match a {
            NetworkArg::Good => NetworkState::Good,
            NetworkArg::Degraded => NetworkState::Degraded,
            NetworkArg::Offline => NetworkState::Offline,
        }
    }
}

impl From<BatteryArg> for Battery {
    fn from(a: BatteryArg) -> Self {
        match a {
            BatteryArg::Ok => Battery::OkBattery,
            BatteryArg::Low => Battery::LowBattery,
        }
    }
}

impl From<PolicyArg> for devassist_core::sim::PolicyKind {
    fn from(a: PolicyArg) -> Self {
        use devassist_core::sim::PolicyKind;
        match a {
            PolicyArg::AllCloud => PolicyKind::AllCloud,
            PolicyArg::AllEdge => PolicyKind::AllEdge,
            PolicyArg::Threshold => PolicyKind::Threshold,
            PolicyArg::Mdp => PolicyKind::Mdp,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = commands::load_config(cli.config.as_deref()).and_then(|config| match cli.command {
        Command::Index { dir, max_files, out } => {
            let cap = max_files.unwrap_or(config.index.max_files);
            commands::index(&config, &dir, cap, &out)
        }
        Command::Query {
            text,
            top_k,
            budget,
            index,
            context,
            now,
        } => commands::query(&config, &text, top_k, budget, &index, context.as_deref(), now),
        Command::DescribeLayout { file } => commands::describe_layout(&file),
        Command::Route {
            complexity,
            device,
            network,
            battery,
            policy,
            save_policy,
        } => commands::route(
            &config,
            devassist_core::router::RoutingState::new(
                complexity.into(),
                device.into(),
                network.into(),
                battery.into(),
            ),
            policy.as_deref(),
            save_policy.as_deref(),
        ),
        Command::Simulate {
            seed,
            out,
            policy,
            events,
        } => commands::simulate(&config, seed, policy.map(Into::into), &out, events.as_deref()),
        Command::Compare { seed, out, csv } => commands::compare(&config, seed, &out, csv.as_deref()),
    });
    match result {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Degraded) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
