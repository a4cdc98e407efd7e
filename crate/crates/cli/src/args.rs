//! Command-line flags, the flat `key = value` config file, and their
//! resolution into validated [`Settings`].
//!
//! Config file grammar: one `key = value` per line, where `key` is a long
//! flag name without the leading dashes (`k-grid = 21,41,61`). Blank lines
//! and lines starting with `#` are ignored. Flags given on the command line
//! override the file, which overrides the built-in defaults.

use std::collections::HashSet;
use std::fs;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Fit,
    SweepK,
    SweepDelta,
    CompareAlgos,
    Cv,
    ReproduceFigure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum)]
pub enum Algo {
    Alg1,
    Alg3,
    Alg4,
    TwoStage,
    Ols,
    PlainLogistic,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Alg1 => "alg1",
            Algo::Alg3 => "alg3",
            Algo::Alg4 => "alg4",
            Algo::TwoStage => "two-stage",
            Algo::Ols => "ols",
            Algo::PlainLogistic => "plain-logistic",
        }
    }
}

/// Built-in simulated datasets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DatasetName {
    /// Two Gaussian classes plus a far label-one cluster (600 + 30).
    Blobs,
    /// Linear model with response outliers at y ~ 100 (570 + 30).
    LinearA,
    /// Linear model with joint outliers near (24, 24) (570 + 30).
    LinearB,
    /// Linear model without outliers (600).
    LinearClean,
    /// Two moons with 10% of points at (0, 5) (900 + 100).
    Moons,
    /// Linear model with unit-variance t5 noise (600).
    HeavyTail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DeltaModeArg {
    Fixed,
    Mad,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    /// Logistic decision boundaries on the blob data.
    ScatterLogistic,
    /// Regression lines under response outliers.
    ScatterRegA,
    /// Regression lines under joint outliers.
    ScatterRegB,
    /// Test MSE against the number of blocks.
    ChoiceK,
    /// Test MSE against delta for several block counts.
    SelectDelta,
    /// Accuracy of Algorithms 3, 4 and plain logistic regression on two moons.
    MomHom,
    /// Test MSE of Algorithms 1 and 3 under response outliers.
    CompShuffle,
}

#[derive(Debug, Default, Parser)]
#[command(name = "robust-erm", version, about = "Robust empirical risk minimization experiments")]
pub struct Cli {
    #[arg(long, value_enum)]
    pub command: Option<Command>,
    /// Flat `key = value` file supplying defaults for any flag.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub dataset: Option<DatasetName>,
    /// Headed CSV with feature columns, a `y` column and optional `is_outlier`.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub algo: Option<Algo>,
    /// Comma-separated list for compare-algos.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub algos: Option<Vec<Algo>>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    #[arg(long, value_enum)]
    pub delta_mode: Option<DeltaModeArg>,
    /// MAD burn-in iterations.
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub k_grid: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub delta_grid: Option<Vec<f64>>,
    /// Number of cross-validation folds.
    #[arg(long)]
    pub folds: Option<usize>,
    /// Clean sample count for generated data.
    #[arg(long)]
    pub n_clean: Option<usize>,
    /// Outlier count for generated data.
    #[arg(long)]
    pub outliers: Option<usize>,
    /// Excess-risk bound for two-stage; unconstrained when omitted.
    #[arg(long, allow_negative_numbers = true)]
    pub delta_prime: Option<f64>,
    #[arg(long, value_enum)]
    pub figure: Option<Figure>,
}

macro_rules! overlay {
    ($cli:expr, $file:expr, $($field:ident),+) => {
        $( if $cli.$field.is_none() { $cli.$field = $file.$field.take(); } )+
    };
}

impl Cli {
    /// Fills unset flags from the config file, if one is named.
    pub fn with_config_file(mut self) -> Result<Self, CliError> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let text = fs::read_to_string(&path)
            .map_err(|e| CliError::Usage(format!("cannot read config file {}: {e}", path.display())))?;
        let mut argv = vec!["robust-erm".to_string()];
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("{}:{}: expected `key = value`", path.display(), lineno + 1))
            })?;
            let key = key.trim();
            if key == "config" {
                return Err(CliError::Usage(format!("{}: nested config files are not supported", path.display())));
            }
            argv.push(format!("--{key}"));
            let value: Vec<&str> = value.split(',').map(str::trim).collect();
            argv.push(value.join(","));
        }
        let mut file = Cli::try_parse_from(&argv)
            .map_err(|e| CliError::Usage(format!("in config file {}: {}", path.display(), e.render())))?;
        overlay!(
            self, file, command, dataset, csv, algo, algos, k, delta, delta_mode, burn_in, eta, iters, runs, seed,
            out_dir, k_grid, delta_grid, folds, n_clean, outliers, delta_prime, figure
        );
        Ok(self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Generated {
        name: DatasetName,
        n_clean: Option<usize>,
        outliers: Option<usize>,
    },
    Csv(PathBuf),
}

/// Fully resolved and validated run settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub command: Command,
    pub data: DataSource,
    pub algo: Algo,
    pub algos: Vec<Algo>,
    /// `None` selects a per-dataset default.
    pub k: Option<usize>,
    pub delta_mode: DeltaModeArg,
    pub delta: f64,
    pub burn_in: usize,
    /// `None` selects a per-loss default.
    pub eta: Option<f64>,
    pub iters: usize,
    pub runs: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub k_grid: Vec<usize>,
    pub delta_grid: Vec<f64>,
    pub folds: usize,
    pub delta_prime: f64,
    pub figure: Option<Figure>,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl Settings {
    pub fn resolve(cli: Cli) -> Result<Self, CliError> {
        let command = cli
            .command
            .ok_or_else(|| usage("--command is required (fit, sweep-k, sweep-delta, compare-algos, cv, reproduce-figure)"))?;
        let data = match (cli.dataset, cli.csv) {
            (Some(_), Some(_)) => return Err(usage("--dataset and --csv are mutually exclusive")),
            (_, Some(path)) => DataSource::Csv(path),
            (name, None) => DataSource::Generated {
                name: name.unwrap_or(DatasetName::LinearB),
                n_clean: cli.n_clean,
                outliers: cli.outliers,
            },
        };
        if matches!(data, DataSource::Csv(_)) && (cli.n_clean.is_some() || cli.outliers.is_some()) {
            return Err(usage("--n-clean and --outliers apply to generated datasets only"));
        }
        let settings = Settings {
            command,
            data,
            algo: cli.algo.unwrap_or(Algo::Alg3),
            algos: cli.algos.unwrap_or_default(),
            k: cli.k,
            delta_mode: cli.delta_mode.unwrap_or(if cli.delta.is_some() || cli.delta_grid.is_some() {
                DeltaModeArg::Fixed
            } else {
                DeltaModeArg::Mad
            }),
            delta: cli.delta.unwrap_or(1.0),
            burn_in: cli.burn_in.unwrap_or(10),
            eta: cli.eta,
            iters: cli.iters.unwrap_or(500),
            runs: cli.runs.unwrap_or(20),
            seed: cli.seed.unwrap_or(0),
            out_dir: cli.out_dir.unwrap_or_else(|| PathBuf::from("results")),
            k_grid: cli.k_grid.unwrap_or_default(),
            delta_grid: cli.delta_grid.unwrap_or_default(),
            folds: cli.folds.unwrap_or(500),
            delta_prime: cli.delta_prime.unwrap_or(f64::INFINITY),
            figure: cli.figure,
        };
        settings.validate()?;
        Ok(settings)
    }

    fn validate(&self) -> Result<(), CliError> {
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(usage(format!("--delta must be positive, got {}", self.delta)));
        }
        if let Some(eta) = self.eta {
            if !(eta > 0.0 && eta.is_finite()) {
                return Err(usage(format!("--eta must be positive, got {eta}")));
            }
        }
        if self.k == Some(0) {
            return Err(usage("--k must be at least 1"));
        }
        if self.runs == 0 {
            return Err(usage("--runs must be at least 1"));
        }
        if self.burn_in == 0 {
            return Err(usage("--burn-in must be at least 1"));
        }
        if !(self.delta_prime > 0.0) {
            return Err(usage("--delta-prime must be positive"));
        }
        if let DataSource::Generated { n_clean: Some(0), .. } = self.data {
            return Err(usage("--n-clean must be at least 1"));
        }
        if self.k_grid.contains(&0) {
            return Err(usage("--k-grid entries must be at least 1"));
        }
        if let Some(bad) = self.delta_grid.iter().find(|d| !(**d > 0.0 && d.is_finite())) {
            return Err(usage(format!("--delta-grid entries must be positive, got {bad}")));
        }
        if !self.delta_grid.is_empty() && self.delta_mode == DeltaModeArg::Mad {
            return Err(usage("--delta-grid conflicts with --delta-mode mad"));
        }
        match self.command {
            Command::SweepK if self.k_grid.is_empty() => Err(usage("sweep-k requires --k-grid")),
            Command::SweepDelta if self.delta_grid.is_empty() && self.delta_mode == DeltaModeArg::Fixed => {
                Err(usage("sweep-delta requires --delta-grid (or --delta-mode mad)"))
            }
            Command::CompareAlgos => {
                if self.algos.len() < 2 {
                    return Err(usage("compare-algos requires at least two entries in --algos"));
                }
                let mut seen = HashSet::new();
                if let Some(dup) = self.algos.iter().find(|a| !seen.insert(**a)) {
                    return Err(usage(format!("duplicate algorithm in --algos: {}", dup.name())));
                }
                Ok(())
            }
            Command::Cv if self.folds < 2 => Err(usage("--folds must be at least 2")),
            Command::ReproduceFigure if self.figure.is_none() => Err(usage("reproduce-figure requires --figure")),
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<Settings, CliError> {
        let mut argv = vec!["robust-erm"];
        argv.extend_from_slice(args);
        Settings::resolve(Cli::try_parse_from(argv).unwrap().with_config_file()?)
    }

    #[test]
    fn defaults() {
        let s = parse(&["--command", "fit"]).unwrap();
        assert_eq!(s.algo, Algo::Alg3);
        assert_eq!(s.delta_mode, DeltaModeArg::Mad);
        assert_eq!(s.delta_prime, f64::INFINITY);
        // giving a delta implies fixed mode
        assert_eq!(parse(&["--command", "fit", "--delta", "2"]).unwrap().delta_mode, DeltaModeArg::Fixed);
    }

    #[test]
    fn consistency_rules() {
        assert!(parse(&[]).is_err());
        assert!(parse(&["--command", "sweep-k"]).is_err());
        assert!(parse(&["--command", "sweep-delta", "--delta-grid", "1,-2"]).is_err());
        assert!(parse(&["--command", "sweep-delta", "--delta-mode", "mad"]).is_ok());
        assert!(parse(&["--command", "compare-algos", "--algos", "alg3,alg3"]).is_err());
        assert!(parse(&["--command", "compare-algos", "--algos", "alg3"]).is_err());
        assert!(parse(&["--command", "fit", "--dataset", "moons", "--csv", "x.csv"]).is_err());
        assert!(parse(&["--command", "reproduce-figure"]).is_err());
        assert!(parse(&["--command", "fit", "--eta", "-1"]).is_err());
    }

    #[test]
    fn config_file_precedence() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        fs::write(&path, "# experiment\ncommand = sweep-k\nk-grid = 21, 41\nruns = 3\nseed = 5\n").unwrap();
        let p = path.to_str().unwrap();
        let s = parse(&["--config", p, "--runs", "7"]).unwrap();
        assert_eq!(s.command, Command::SweepK);
        assert_eq!(s.k_grid, vec![21, 41]);
        assert_eq!((s.runs, s.seed), (7, 5));

        fs::write(&path, "runs 3\n").unwrap();
        assert!(matches!(parse(&["--config", p]), Err(CliError::Usage(_))));
        fs::write(&path, "bogus = 1\n").unwrap();
        assert!(matches!(parse(&["--config", p]), Err(CliError::Usage(_))));
    }
}
