//! The qtomo binary: flags in, files and summary lines out.
//!
//! All failures exit through one funnel printing a single
//! `ERR <code>: <detail>` line on stderr, with the exit code telling
//! configuration (2), data (3), and numeric (4) problems apart.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qtomo::runner::{run, CommandKind, Directions, Origin, RunConfig};
use qtomo::CliError;
use qtomo_core::geom::Point2;
use qtomo_core::quantile::QuantileVersion;

#[derive(Parser)]
#[command(
    name = "qtomo",
    about = "Quantile contours for planar point clouds: envelopes, depth, biplots, tail and normal models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Empirical quantile envelopes at one or more levels
    Envelope {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        levels: LevelArgs,
    },
    /// Directional quantile curve around an origin, over the scatter
    Biplot {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        levels: LevelArgs,
        /// Curve anchor: "median", "tukey", or a point "X,Y"
        #[arg(long, default_value = "median", value_parser = parse_origin)]
        origin: Origin,
    },
    /// Contours of a bivariate normal fitted to the data
    Normal {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        levels: LevelArgs,
    },
    /// Largest-level envelope covering a prescribed fraction of the sample
    Coverage {
        #[command(flatten)]
        common: CommonArgs,
        /// Fraction of points the envelope must cover, in (0, 1]
        #[arg(long)]
        coverage: f64,
    },
    /// Envelopes using a fitted tail model at very small levels
    Extreme {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        levels: LevelArgs,
        /// Fraction of the sample the tail fit may use, in (0, 1)
        #[arg(long, default_value_t = 0.1)]
        threshold_fraction: f64,
    },
    /// Envelope of the conditional distribution at a covariate value
    Regress {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        levels: LevelArgs,
        /// Covariate value to evaluate the fitted quantile lines at
        #[arg(long)]
        at: f64,
    },
    /// Halfspace depth of a probe point
    Depth {
        /// Input CSV with columns x,y
        #[arg(short, long)]
        input: PathBuf,
        /// Probe point "X,Y"
        #[arg(long, value_parser = parse_point)]
        point: Point2,
    },
    /// Deepest point of the sample
    Median {
        /// Input CSV with columns x,y
        #[arg(short, long)]
        input: PathBuf,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// Input CSV with columns x,y (and t for regress)
    #[arg(short, long)]
    input: PathBuf,
    /// Write the contours as CSV here
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write an SVG rendering here
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Draw the data points under the SVG contours
    #[arg(long)]
    scatter: bool,
    /// Direction count, or "critical" for the exact data-driven set
    #[arg(long, default_value = "100", value_parser = parse_directions)]
    directions: Directions,
    /// Interpolate between order statistics instead of taking the lower one
    #[arg(long)]
    interpolate: bool,
}

#[derive(Args)]
struct LevelArgs {
    /// Comma-separated levels in (0, 0.5]
    #[arg(long, value_delimiter = ',', required = true)]
    p: Vec<f64>,
}

fn parse_directions(s: &str) -> Result<Directions, String> {
    if s == "critical" {
        return Ok(Directions::Critical);
    }
    s.parse::<usize>()
        .map(Directions::Uniform)
        .map_err(|_| format!("'{s}' is neither a count nor 'critical'"))
}

fn parse_point(s: &str) -> Result<Point2, String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("'{s}' is not of the form X,Y"))?;
    let x: f64 = a.trim().parse().map_err(|_| format!("bad x '{a}'"))?;
    let y: f64 = b.trim().parse().map_err(|_| format!("bad y '{b}'"))?;
    Ok(Point2::new(x, y))
}

fn parse_origin(s: &str) -> Result<Origin, String> {
    match s {
        "median" => Ok(Origin::Median),
        "tukey" => Ok(Origin::Tukey),
        other => parse_point(other).map(Origin::At),
    }
}

impl CommonArgs {
    fn apply(self, config: &mut RunConfig) {
        config.csv_out = self.csv;
        config.svg_out = self.svg;
        config.scatter = self.scatter;
        config.directions = self.directions;
        if self.interpolate {
            config.version = QuantileVersion::InterpolatedR7;
        }
    }
}

fn build_config(command: Command) -> RunConfig {
    match command {
        Command::Envelope { common, levels } => {
            let mut c = RunConfig::new(CommandKind::Envelope, common.input.clone());
            common.apply(&mut c);
            c.p_levels = levels.p;
            c
        }
        Command::Biplot {
            common,
            levels,
            origin,
        } => {
            let mut c = RunConfig::new(CommandKind::Biplot, common.input.clone());
            common.apply(&mut c);
            c.p_levels = levels.p;
            c.origin = origin;
            c
        }
        Command::Normal { common, levels } => {
            let mut c = RunConfig::new(CommandKind::Normal, common.input.clone());
            common.apply(&mut c);
            c.p_levels = levels.p;
            c
        }
        Command::Coverage { common, coverage } => {
            let mut c = RunConfig::new(CommandKind::Coverage, common.input.clone());
            common.apply(&mut c);
            c.coverage = Some(coverage);
            c
        }
        Command::Extreme {
            common,
            levels,
            threshold_fraction,
        } => {
            let mut c = RunConfig::new(CommandKind::Extreme, common.input.clone());
            common.apply(&mut c);
            c.p_levels = levels.p;
            c.threshold_fraction = threshold_fraction;
            c
        }
        Command::Regress { common, levels, at } => {
            let mut c = RunConfig::new(CommandKind::Regress, common.input.clone());
            common.apply(&mut c);
            c.p_levels = levels.p;
            c.covariate_value = Some(at);
            c
        }
        Command::Depth { input, point } => {
            let mut c = RunConfig::new(CommandKind::Depth, input);
            c.probe = Some(point);
            c
        }
        Command::Median { input } => RunConfig::new(CommandKind::Median, input),
    }
}

fn write_out(path: &std::path::Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content).map_err(|e| {
        CliError::Data(qtomo::ingest::DataError::Io {
            path: path.display().to_string(),
            detail: e.to_string(),
        })
    })
}

fn execute(config: &RunConfig) -> Result<(), CliError> {
    let out = run(config)?;
    if let (Some(path), Some(doc)) = (config.csv_out.as_deref(), out.contour_csv.as_deref()) {
        write_out(path, doc)?;
    }
    if let (Some(path), Some(doc)) = (config.svg_out.as_deref(), out.svg.as_deref()) {
        write_out(path, doc)?;
    }
    print!("{}", out.stdout);
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            // One-line rendering of clap's multi-line report.
            let text = e.to_string();
            let first = text
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("invalid arguments")
                .trim_start_matches("error: ");
            eprintln!("ERR config: {first}");
            return ExitCode::from(2);
        }
        Err(e) => {
            // Help or version output.
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    let config = build_config(cli.command);
    match execute(&config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
