//! Configuration, validation, and the pipeline from one input table to
//! output documents.
//!
//! [`run`] is deliberately free of terminal concerns: it reads the input
//! file, computes, and hands back strings. The binary decides where they
//! go; tests read them directly.

use std::path::PathBuf;
use std::thread;

use qtomo_core::depth::{deepest_region, halfspace_depth};
use qtomo_core::envelope::{
    biplot_curve, build_envelope, conditional_envelope, coverage_search,
    empirical_quantile_table, DirectionSet, Envelope,
};
use qtomo_core::estimators::{EmpiricalEstimator, ExtremeEstimator};
use qtomo_core::geom::{ConvexRegion, Point2, UnitDirection};
use qtomo_core::normalfit::{fit_normal, normal_contour, IndexingMode};
use qtomo_core::quantile::{directional_quantile, QuantileVersion};

use crate::contours::{render_svg, write_contour_csv, ContourBlock};
use crate::ingest::{ingest_csv, DataError, Table};
use crate::CliError;

/// Which pipeline to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    /// Empirical quantile envelopes at the given levels.
    Envelope,
    /// The directional quantile curve around an origin.
    Biplot,
    /// Contours of a fitted bivariate normal, indexed by tangent mass.
    Normal,
    /// The largest-level envelope still covering a sample fraction.
    Coverage,
    /// Envelopes backed by a tail model below the threshold fraction.
    Extreme,
    /// Envelopes of the conditional distribution at a covariate value.
    Regress,
    /// Halfspace depth of one probe point.
    Depth,
    /// The deepest point of the sample.
    Median,
}

/// How the direction set is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Directions {
    /// Evenly spaced unit vectors.
    Uniform(usize),
    /// Every outward normal of a data point pair; quadratic in the sample
    /// size but exact for depth regions.
    Critical,
}

/// Where a biplot is anchored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Origin {
    /// Coordinatewise sample median.
    Median,
    /// Deepest point of the sample.
    Tukey,
    /// A fixed point.
    At(Point2),
}

/// Everything a run needs. Field meanings follow the flags of the binary
/// one to one; command-specific fields are `None` when unused.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub input: PathBuf,
    pub p_levels: Vec<f64>,
    pub directions: Directions,
    pub version: QuantileVersion,
    pub origin: Origin,
    pub coverage: Option<f64>,
    pub covariate_value: Option<f64>,
    pub probe: Option<Point2>,
    pub threshold_fraction: f64,
    pub csv_out: Option<PathBuf>,
    pub svg_out: Option<PathBuf>,
    pub scatter: bool,
    /// Worker cap for the envelope table; `None` reads QTOMO_THREADS and
    /// falls back to the machine's parallelism.
    pub threads: Option<usize>,
}

impl RunConfig {
    /// A config with the defaults the binary uses, ready for field-level
    /// adjustment.
    pub fn new(command: CommandKind, input: impl Into<PathBuf>) -> Self {
        RunConfig {
            command,
            input: input.into(),
            p_levels: Vec::new(),
            directions: Directions::Uniform(100),
            version: QuantileVersion::InfType1,
            origin: Origin::Median,
            coverage: None,
            covariate_value: None,
            probe: None,
            threshold_fraction: 0.1,
            csv_out: None,
            svg_out: None,
            scatter: false,
            threads: None,
        }
    }

    fn needs_levels(&self) -> bool {
        matches!(
            self.command,
            CommandKind::Envelope
                | CommandKind::Biplot
                | CommandKind::Normal
                | CommandKind::Extreme
                | CommandKind::Regress
        )
    }

    fn writes_contours(&self) -> bool {
        !matches!(self.command, CommandKind::Depth | CommandKind::Median)
    }

    /// Checks the parts of the config that can be judged without data.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |detail: String| Err(CliError::Config(detail));
        if self.needs_levels() {
            if self.p_levels.is_empty() {
                return bad("at least one level is required; pass --p".into());
            }
            for &p in &self.p_levels {
                if !p.is_finite() || p <= 0.0 || p > 0.5 {
                    return bad(format!("level {p} outside (0, 0.5]"));
                }
            }
        }
        match self.directions {
            Directions::Uniform(n) if n < 3 => {
                return bad(format!("{n} directions cannot bound a region, need 3 or more"));
            }
            Directions::Critical if self.command == CommandKind::Normal => {
                return bad("normal contours take a direction count, not 'critical'".into());
            }
            _ => {}
        }
        if self.writes_contours() && self.csv_out.is_none() && self.svg_out.is_none() {
            return bad("no output requested; pass --csv and/or --svg".into());
        }
        if self.command == CommandKind::Coverage {
            match self.coverage {
                Some(c) if c.is_finite() && c > 0.0 && c <= 1.0 => {}
                Some(c) => return bad(format!("coverage {c} outside (0, 1]")),
                None => return bad("coverage needs a target fraction; pass --coverage".into()),
            }
        }
        if self.command == CommandKind::Regress {
            match self.covariate_value {
                Some(t) if t.is_finite() => {}
                Some(t) => return bad(format!("covariate value {t} is not finite")),
                None => return bad("regress needs a covariate value; pass --at".into()),
            }
        }
        if self.command == CommandKind::Depth {
            match self.probe {
                Some(pt) if pt.is_finite() => {}
                Some(_) => return bad("probe point must be finite".into()),
                None => return bad("depth needs a probe; pass --point X,Y".into()),
            }
        }
        if self.command == CommandKind::Extreme {
            let f = self.threshold_fraction;
            if !f.is_finite() || f <= 0.0 || f >= 1.0 {
                return bad(format!("threshold fraction {f} outside (0, 1)"));
            }
        }
        if let Some(t) = self.threads {
            if t == 0 {
                return bad("thread cap must be at least 1".into());
            }
        }
        Ok(())
    }
}

/// What a run produced, before anything touches the filesystem.
#[derive(Debug, Clone)]
pub struct RunOutput {
    /// Summary lines for stdout, `key,value` shaped, newline-terminated.
    pub stdout: String,
    /// The contour document, when the command produces one.
    pub contour_csv: Option<String>,
    /// The rendered picture, when requested.
    pub svg: Option<String>,
}

fn resolve_threads(requested: Option<usize>) -> Result<usize, CliError> {
    if let Some(t) = requested {
        return Ok(t.max(1));
    }
    match std::env::var("QTOMO_THREADS") {
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(t) if t >= 1 => Ok(t),
            _ => Err(CliError::Config(format!(
                "QTOMO_THREADS is '{raw}', expected a positive integer"
            ))),
        },
        Err(_) => Ok(thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// The empirical quantile table, split over worker threads by direction
/// chunks. Values are identical to the sequential table for any thread
/// count, since each direction's column is computed independently.
pub fn quantile_table_parallel(
    points: &[Point2],
    dirs: &[UnitDirection],
    ps: &[f64],
    version: QuantileVersion,
    threads: usize,
) -> qtomo_core::Result<Vec<Vec<f64>>> {
    let workers = threads.max(1).min(dirs.len().max(1));
    if workers <= 1 || dirs.len() < 2 * workers {
        return empirical_quantile_table(points, dirs, ps, version);
    }
    let chunk = dirs.len().div_ceil(workers);
    let parts: Vec<qtomo_core::Result<Vec<Vec<f64>>>> = thread::scope(|scope| {
        let handles: Vec<_> = dirs
            .chunks(chunk)
            .map(|slice| scope.spawn(move || empirical_quantile_table(points, slice, ps, version)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("table worker panicked"))
            .collect()
    });
    let mut table: Vec<Vec<f64>> = ps.iter().map(|_| Vec::with_capacity(dirs.len())).collect();
    for part in parts {
        for (row, mut partial) in table.iter_mut().zip(part?) {
            row.append(&mut partial);
        }
    }
    Ok(table)
}

fn direction_set(choice: Directions, points: &[Point2]) -> Result<DirectionSet, CliError> {
    Ok(match choice {
        Directions::Uniform(n) => DirectionSet::uniform(n)?,
        Directions::Critical => DirectionSet::critical(points)?,
    })
}

fn region_block(p: f64, region: &ConvexRegion) -> ContourBlock {
    ContourBlock {
        p,
        vertices: region.vertices().to_vec(),
    }
}

fn axis_median(points: &[Point2], version: QuantileVersion) -> qtomo_core::Result<Point2> {
    let ex = UnitDirection::from_vector(1.0, 0.0)?;
    let ey = UnitDirection::from_vector(0.0, 1.0)?;
    Ok(Point2::new(
        directional_quantile(points, ex, 0.5, version)?,
        directional_quantile(points, ey, 0.5, version)?,
    ))
}

fn resolve_origin(
    origin: Origin,
    points: &[Point2],
    version: QuantileVersion,
) -> qtomo_core::Result<Point2> {
    match origin {
        Origin::At(pt) => Ok(pt),
        Origin::Median => axis_median(points, version),
        Origin::Tukey => deepest_region(points)?.1.vertex_centroid(),
    }
}

/// Number of points inside or on the region, with the same boundary
/// tolerance the coverage search uses.
fn covered_count(points: &[Point2], region: &ConvexRegion) -> usize {
    points.iter().filter(|&&pt| region.contains(pt, 1e-9)).count()
}

/// Runs one configured command: ingest, compute, and format, leaving all
/// file writing to the caller.
pub fn run(config: &RunConfig) -> Result<RunOutput, CliError> {
    config.validate()?;
    let table = ingest_csv(&config.input)?;
    let blocks = compute_blocks(config, &table)?;
    let mut stdout = String::new();
    match &blocks {
        Computed::Contours { lines, blocks } => {
            stdout.push_str(&format!("rows,{}\n", table.rows()));
            stdout.push_str(lines);
            let contour_csv = config
                .csv_out
                .as_ref()
                .map(|_| write_contour_csv(blocks));
            let svg = config.svg_out.as_ref().map(|_| {
                render_svg(
                    blocks,
                    config.scatter.then_some(table.points.as_slice()),
                )
            });
            Ok(RunOutput {
                stdout,
                contour_csv,
                svg,
            })
        }
        Computed::Lines(lines) => Ok(RunOutput {
            stdout: lines.clone(),
            contour_csv: None,
            svg: None,
        }),
    }
}

enum Computed {
    /// Contour-producing commands: summary lines plus the blocks.
    Contours {
        lines: String,
        blocks: Vec<ContourBlock>,
    },
    /// Pure-stdout commands.
    Lines(String),
}

fn compute_blocks(config: &RunConfig, table: &Table) -> Result<Computed, CliError> {
    let points = &table.points;
    match config.command {
        CommandKind::Envelope => {
            let dirs = direction_set(config.directions, points)?;
            let threads = resolve_threads(config.threads)?;
            let qtable = quantile_table_parallel(
                points,
                dirs.dirs(),
                &config.p_levels,
                config.version,
                threads,
            )?;
            let mut blocks = Vec::with_capacity(config.p_levels.len());
            for (&p, row) in config.p_levels.iter().zip(&qtable) {
                let env = Envelope::from_directional_quantiles(p, &dirs, row)?;
                blocks.push(region_block(p, &env.region));
            }
            Ok(Computed::Contours {
                lines: String::new(),
                blocks,
            })
        }
        CommandKind::Extreme => {
            let dirs = direction_set(config.directions, points)?;
            let est = ExtremeEstimator::new(config.threshold_fraction);
            let mut blocks = Vec::with_capacity(config.p_levels.len());
            for &p in &config.p_levels {
                let env = build_envelope(points, p, &dirs, &est)?;
                blocks.push(region_block(p, &env.region));
            }
            Ok(Computed::Contours {
                lines: String::new(),
                blocks,
            })
        }
        CommandKind::Coverage => {
            let dirs = direction_set(config.directions, points)?;
            let est = EmpiricalEstimator::new(config.version);
            let target = expect(config.coverage, "coverage");
            let (p, env) = coverage_search(points, target, &dirs, &est)?;
            let covered = covered_count(points, &env.region);
            let frac = covered as f64 / points.len() as f64;
            Ok(Computed::Contours {
                lines: format!("coverage,{frac},p,{p}\n"),
                blocks: vec![region_block(p, &env.region)],
            })
        }
        CommandKind::Biplot => {
            let dirs = direction_set(config.directions, points)?;
            let est = EmpiricalEstimator::new(config.version);
            let origin = resolve_origin(config.origin, points, config.version)?;
            let mut blocks = Vec::with_capacity(config.p_levels.len());
            for &p in &config.p_levels {
                let curve = biplot_curve(points, p, origin, &dirs, &est)?;
                blocks.push(ContourBlock { p, vertices: curve });
            }
            Ok(Computed::Contours {
                lines: format!("origin,{},{}\n", origin.x, origin.y),
                blocks,
            })
        }
        CommandKind::Normal => {
            let n_vertices = match config.directions {
                Directions::Uniform(n) => n,
                Directions::Critical => unreachable!("rejected by validate"),
            };
            let fit = fit_normal(points)?;
            let mut lines = format!("mean,{},{}\n", fit.mean.x, fit.mean.y);
            lines.push_str(&format!(
                "cov,{},{},{}\n",
                fit.cov[0][0], fit.cov[0][1], fit.cov[1][1]
            ));
            let mut blocks = Vec::with_capacity(config.p_levels.len());
            for &p in &config.p_levels {
                let region = normal_contour(&fit, IndexingMode::TangentMass(p), n_vertices)?;
                blocks.push(region_block(p, &region));
            }
            Ok(Computed::Contours { lines, blocks })
        }
        CommandKind::Regress => {
            let dirs = direction_set(config.directions, points)?;
            let t0 = expect(config.covariate_value, "covariate value");
            let covariate = table
                .covariate
                .as_deref()
                .ok_or(CliError::Data(DataError::MissingColumn { name: "t" }))?;
            let mut blocks = Vec::with_capacity(config.p_levels.len());
            for &p in &config.p_levels {
                let env = conditional_envelope(points, covariate, t0, p, &dirs)?;
                blocks.push(region_block(p, &env.region));
            }
            Ok(Computed::Contours {
                lines: String::new(),
                blocks,
            })
        }
        CommandKind::Depth => {
            let probe = expect(config.probe, "probe");
            let d = halfspace_depth(points, probe)?;
            Ok(Computed::Lines(format!(
                "depth,{},count,{},n,{}\n",
                d.value(),
                d.count,
                d.n
            )))
        }
        CommandKind::Median => {
            let (p, region) = deepest_region(points)?;
            let c = region.vertex_centroid()?;
            Ok(Computed::Lines(format!(
                "median,{},{},p,{},n,{}\n",
                c.x,
                c.y,
                p,
                points.len()
            )))
        }
    }
}

/// Unwraps a field `validate` has already checked.
fn expect<T: Copy>(field: Option<T>, what: &str) -> T {
    field.unwrap_or_else(|| panic!("{what} missing after validation"))
}
