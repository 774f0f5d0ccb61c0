use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use lpconc::experiment::{emit, render, run_experiment, Command, ExperimentConfig, Format};
use lpconc::lp::Exponent;
use lpconc::Error;

/// Concentration-of-measure experiments on finite mm-spaces and l^p spheres.
#[derive(Debug, Parser)]
#[command(name = "lpconc", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Exponent of the ball or sphere (a number >= 1, or "inf").
    #[arg(long)]
    p: Option<Exponent>,
    /// Exponent of the metric.
    #[arg(long)]
    q: Option<Exponent>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    /// Comma-separated dimensions.
    #[arg(long, value_delimiter = ',')]
    n_list: Option<Vec<usize>>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated radii for sphere-concentration.
    #[arg(long, value_delimiter = ',')]
    r_grid: Option<Vec<f64>>,
    /// Comma-separated masses for the lower side of obsdiam-bracket.
    #[arg(long, value_delimiter = ',')]
    kappa_grid: Option<Vec<f64>>,
    /// mm-space JSON file for obsdiam-bracket.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Write the record here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Also write the suite's per-check rows as CSV to this path.
    #[arg(long)]
    checks: Option<PathBuf>,
}

impl Cli {
    fn config(&self) -> ExperimentConfig {
        let mut c = ExperimentConfig::for_command(self.command);
        c.seed = self.seed;
        c.format = self.format;
        c.output.clone_from(&self.output);
        c.input.clone_from(&self.input);
        if let Some(p) = self.p {
            c.p = p;
        }
        if let Some(q) = self.q {
            c.q = q;
        }
        if let Some(e) = self.eps {
            c.eps = e;
        }
        if let Some(k) = self.kappa {
            c.kappa = k;
        }
        if let Some(n) = &self.n_list {
            c.n_list.clone_from(n);
        }
        if let Some(s) = self.samples {
            c.samples = s;
        }
        if let Some(r) = &self.r_grid {
            c.r_grid.clone_from(r);
        }
        if let Some(k) = &self.kappa_grid {
            c.kappa_grid.clone_from(k);
        }
        c
    }
}

fn run(cli: &Cli) -> lpconc::Result<()> {
    let config = cli.config();
    let record = run_experiment(&config)?;
    if let (Some(path), Some(report)) = (&cli.checks, &record.suite) {
        let file = std::fs::File::create(path).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
        report.write_csv(file)?;
    }
    match &config.output {
        Some(path) => emit(&record, config.format, path),
        None => {
            let text = render(&record, config.format)?;
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|source| Error::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let obj =
                serde_json::json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
            eprintln!("{obj}");
            ExitCode::FAILURE
        }
    }
}
