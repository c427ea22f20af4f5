use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ctc_sim::experiments::{self, case_spec, CaseId, ResultTable};
use ctc_sim::model::{self, ForwardingParams, TimeBudget};
use ctc_sim::report::{self, ReportError};
use ctc_sim::sim::{self, Policy};
use ctc_sim::utilization::{self, PacketCounters};

#[derive(Parser)]
#[command(
    name = "ctc-sim",
    version,
    about = "Forwarding model and CTC/DSR simulator"
)]
struct Cli {
    /// Base seed: first seed of experiment sweeps, or override for `sim run`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form model evaluation.
    #[command(subcommand)]
    Model(ModelCmd),
    /// Single simulation run.
    #[command(subcommand)]
    Sim(SimCmd),
    /// Traffic-case sweeps.
    #[command(subcommand)]
    Exp(ExpCmd),
}

#[derive(Subcommand)]
enum ModelCmd {
    /// Probabilities, time components and throughput for (p, k, D_R).
    Eval {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        data_rate: f64,
    },
    /// Node utilization from packet counters and time components.
    Util {
        /// k_pout,k_nout,k_nin
        #[arg(long, value_delimiter = ',', required = true)]
        counters: Vec<u64>,
        /// t_pp,t_np
        #[arg(long, value_delimiter = ',', required = true)]
        times: Vec<f64>,
    },
}

#[derive(Subcommand)]
enum SimCmd {
    /// Runs one JSON config and writes a one-row result CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Ctc,
    Dsr,
    Both,
}

#[derive(Args)]
struct SeedCount {
    /// Number of seeds per sweep point.
    #[arg(long, default_value_t = experiments::calibration::SEEDS)]
    seeds: u64,
}

#[derive(Subcommand)]
enum ExpCmd {
    /// Sweeps one case and writes its result CSV.
    Case {
        #[arg(long)]
        id: String,
        #[arg(long, value_enum, default_value = "both")]
        algo: Algo,
        #[command(flatten)]
        seeds: SeedCount,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sweeps all four cases and writes case and figure CSVs.
    All {
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        seeds: SeedCount,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                ReportError::Io(_) | ReportError::Csv(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), ReportError> {
    let first_seed = cli.seed.unwrap_or(1);
    match cli.command {
        Command::Model(ModelCmd::Eval { p, k, data_rate }) => {
            let params = ForwardingParams::new(p, k, data_rate).map_err(invalid)?;
            let probs = model::prob_batch(&params);
            let times = model::time_components(&params);
            println!("p_self={}", probs.p_self);
            println!("p_neighbor={}", probs.p_neighbor);
            println!("t_pp={}", times.t_pp());
            println!("t_np={}", times.t_np());
            println!("t_i={}", times.total());
            match model::throughput(&params) {
                Ok(x) => println!("throughput={x}"),
                Err(e) => println!("throughput=undefined ({e})"),
            }
        }
        Command::Model(ModelCmd::Util { counters, times }) => {
            if counters.len() != 3 || times.len() != 2 {
                return Err(invalid(
                    "expected --counters k_pout,k_nout,k_nin and --times t_pp,t_np",
                ));
            }
            let counters =
                PacketCounters::new(counters[0], counters[1], counters[2]).map_err(invalid)?;
            let times = TimeBudget::new(times[0], times[1]).map_err(invalid)?;
            let ratio = utilization::utilization_node(&counters, &times).map_err(invalid)?;
            let simplified =
                utilization::utilization_node_simplified(&counters, &times).map_err(invalid)?;
            println!("utilization={ratio}");
            println!("utilization_simplified={simplified}");
        }
        Command::Sim(SimCmd::Run { config, out }) => {
            let mut config = report::load_config(&config)?;
            if let Some(seed) = cli.seed {
                config.seed = seed;
            }
            let trace = sim::run(&config)?;
            let row = experiments::summarize("custom", 0, &config, &trace)?;
            write_table(&ResultTable::new(vec![row]), &out)?;
        }
        Command::Exp(ExpCmd::Case {
            id,
            algo,
            seeds,
            out,
        }) => {
            let case: CaseId = id.parse()?;
            let algorithms = match algo {
                Algo::Ctc => vec![Policy::Ctc],
                Algo::Dsr => vec![Policy::Dsr],
                Algo::Both => vec![Policy::Ctc, Policy::Dsr],
            };
            let spec = case_spec(case)
                .with_algorithms(algorithms)
                .with_seeds(first_seed, seeds.seeds);
            write_table(&experiments::run_case(&spec)?, &out)?;
        }
        Command::Exp(ExpCmd::All { out_dir, seeds }) => {
            std::fs::create_dir_all(&out_dir)?;
            let tables = CaseId::ALL
                .iter()
                .map(|&case| {
                    let spec = case_spec(case).with_seeds(first_seed, seeds.seeds);
                    let table = experiments::run_case(&spec)?;
                    let path = out_dir.join(format!("case_{case}.csv"));
                    write_table(&table, &path)?;
                    Ok(table)
                })
                .collect::<Result<Vec<_>, ReportError>>()?;
            for figure in 1..=6 {
                let fig = report::figure_series(&tables, figure)?;
                let file = File::create(out_dir.join(format!("fig_{figure}.csv")))?;
                report::emit_figure_csv(&fig, BufWriter::new(file))?;
            }
        }
    }
    Ok(())
}

fn write_table(table: &ResultTable, path: &Path) -> Result<(), ReportError> {
    let file = File::create(path)?;
    report::emit_csv(table, BufWriter::new(file))?;
    Ok(())
}

fn invalid(err: impl std::fmt::Display) -> ReportError {
    ReportError::InvalidConfig(sim::SimError::InvalidConfig(err.to_string()))
}
