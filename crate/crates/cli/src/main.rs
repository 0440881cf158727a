//! `dtn-tradesim`: run the routing trade study and write its report bundle.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dtn_tradesim_core::study::TTests;
use dtn_tradesim_core::{
    load_config, run_study, write_report, ConfigOverrides, Error, Metric, OutputFormat,
    ProtocolKind, StudyConfig, StudyReport,
};

const EXIT_CONFIG: u8 = 1;
const EXIT_SIMULATION: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "dtn-tradesim",
    version,
    about = "Monte Carlo trade study of DTN routing protocols"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the study and write the report bundle.
    Run(RunArgs),
    /// Check a configuration file and print the resolved settings.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Flat key=value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    packets: Option<usize>,
    #[arg(long)]
    relays: Option<usize>,
    #[arg(long)]
    sigma_frac: Option<f64>,
    #[arg(long)]
    beta_a: Option<f64>,
    #[arg(long)]
    beta_b: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
    Both,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
            Format::Both => OutputFormat::Both,
        }
    }
}

impl RunArgs {
    fn overrides(&self) -> ConfigOverrides {
        ConfigOverrides {
            seed: self.seed,
            runs: self.runs,
            packets: self.packets,
            relays: self.relays,
            sigma_frac: self.sigma_frac,
            beta_a: self.beta_a,
            beta_b: self.beta_b,
            output_dir: self.out.clone(),
            format: self.format.map(Into::into),
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config { .. } | Error::Usage(_) => EXIT_CONFIG,
        Error::SimulationFault { .. } | Error::DegenerateScale(_) | Error::DegenerateTest => {
            EXIT_SIMULATION
        }
        Error::Io { .. } | Error::Csv { .. } | Error::Json { .. } => EXIT_IO,
    }
}

fn print_report(report: &StudyReport, config: &StudyConfig) {
    println!(
        "{} runs x {} packets, master seed {}",
        config.sim.run_count, config.sim.packet_count, config.sim.seed
    );
    println!();
    println!(
        "{:<20} {:>10} {:>9} {:>12} {:>9}",
        "protocol", "error (%)", "std", "time (hr)", "std"
    );
    for p in ProtocolKind::ALL {
        let pe = report.cell(p, Metric::PercentError).expect("cell");
        let tt = report.cell(p, Metric::TransmissionTime).expect("cell");
        let fmt = |x: Option<f64>, prec: usize| {
            x.map_or_else(|| "-".to_string(), |v| format!("{v:.prec$}"))
        };
        println!(
            "{:<20} {:>10.3} {:>9} {:>12.4} {:>9}",
            p.as_str(),
            pe.mean,
            fmt(pe.std, 3),
            tt.mean,
            fmt(tt.std, 4)
        );
    }

    println!();
    match &report.t_tests {
        TTests::Computed(matrices) => {
            for m in matrices {
                println!("Welch t-tests ({}), one-tailed p:", m.metric);
                for (i, a) in m.protocols.iter().enumerate() {
                    for (j, b) in m.protocols.iter().enumerate().skip(i + 1) {
                        if let Some(t) = &m.cells[i][j] {
                            println!(
                                "  {:<18} vs {:<18} t = {:>8.3}  df = {:>6.2}  p = {:.3e}{}",
                                a.as_str(),
                                b.as_str(),
                                t.t,
                                t.df,
                                t.p,
                                if t.significant { "  *" } else { "" }
                            );
                        }
                    }
                }
            }
        }
        TTests::Skipped { reason } => println!("t-tests skipped: {reason}"),
    }

    println!();
    println!(
        "{:<20} {:>9} {:>9} {:>9} {:>10}",
        "protocol", "V(error)", "V(time)", "MAVF", "corrected"
    );
    for row in &report.decision.rows {
        let corrected = report
            .decision_corrected
            .row(row.protocol)
            .map_or(row.mavf, |c| c.mavf);
        println!(
            "{:<20} {:>9.5} {:>9.5} {:>9.6} {:>10.6}",
            row.protocol.as_str(),
            row.v_percent_error,
            row.v_transmission_time,
            row.mavf,
            corrected
        );
    }
    let ranking: Vec<&str> = report.ranking.iter().map(|p| p.as_str()).collect();
    println!();
    println!("ranking: {}", ranking.join(" > "));
}

fn run(args: RunArgs) -> Result<(), Error> {
    let config = load_config(args.config.as_deref(), &args.overrides())?;
    let report = run_study(&config)?;
    print_report(&report, &config);
    let files = write_report(&report, &config)?;
    println!(
        "wrote {} files to {}",
        files.len(),
        config.output_dir.display()
    );
    Ok(())
}

fn validate(config: PathBuf) -> Result<(), Error> {
    let cfg = load_config(Some(&config), &ConfigOverrides::default())?;
    print!("{}", cfg.canonical());
    println!("out = {}", cfg.output_dir.display());
    println!("ok");
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Validate { config } => validate(config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
