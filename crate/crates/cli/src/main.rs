//! Command-line surface: propagator tables and profiles, metric tables,
//! triple enumeration, continuous-multinomial values, convergence
//! diagnostics, and the Coulomb profile, exported as CSV, JSON, or SVG.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use latticeprop::contmult;
use latticeprop::interactions::{self, PotentialSpec};
use latticeprop::lattice::{LatticePoint, SpaceSpec};
use latticeprop::metrics::{
    axes_of_symmetry, minkowski_interval, polygonal_interval, primitive_triples, taxicab_interval,
};
use latticeprop::paths::path_count_profile;
use latticeprop::propagators::{
    cauchy_diagnostic, k1_desitter, k1_free_histogram, k1_klein_histogram, k1_torus_histogram,
    kn_feynman_histogram, kn_free_histogram, PhaseHistogram,
};
use output::{fmt_f64, write_atomic, Cell, Report};

#[derive(Parser)]
#[command(name = "latticeprop", version, about = "Lattice propagator tables and profiles")]
struct RunConfig {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output path; stdout when omitted. Files are written atomically.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for grid evaluation (default: LATTICEPROP_THREADS or 1).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum SpaceKind {
    Free,
    Torus,
    Klein,
    Desitter,
}

impl SpaceKind {
    fn name(&self) -> &'static str {
        match self {
            SpaceKind::Free => "free",
            SpaceKind::Torus => "torus",
            SpaceKind::Klein => "klein",
            SpaceKind::Desitter => "desitter",
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum VariantKind {
    Standard,
    Feynman,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ConvergeKind {
    Cauchy,
    Multinomial,
}

#[derive(Subcommand)]
enum Command {
    /// Primitive Pythagorean triples with hypotenuse below a bound.
    Triples(TriplesArgs),
    /// Interval table: taxicab, Minkowski, and polygonal metrics on a grid.
    Metric(MetricArgs),
    /// Path counts to every endpoint of a time slice.
    Paths(PathsArgs),
    /// Discrete propagator profiles and values.
    Propagate(PropagateArgs),
    /// Continuous multinomial values by several routes.
    Contmult(ContmultArgs),
    /// Convergence diagnostics: Cauchy sup differences, discrete-to-continuous.
    Converge(ConvergeArgs),
    /// Coulomb-interacting propagator profile on a refined lattice.
    Coulomb(CoulombArgs),
}

#[derive(Args)]
struct TriplesArgs {
    #[arg(long, default_value_t = 100)]
    max_hyp: i64,
}

#[derive(Args)]
struct MetricArgs {
    /// Polygonal metric order.
    #[arg(long, default_value_t = 5)]
    n: u32,
    #[arg(long, default_value_t = 10)]
    max_dt: i64,
}

#[derive(Args)]
struct PathsArgs {
    #[arg(long, value_enum, default_value_t = SpaceKind::Free)]
    space: SpaceKind,
    #[arg(long, default_value_t = 1)]
    d: usize,
    /// Axes-of-symmetry order.
    #[arg(long, default_value_t = 1)]
    n: u32,
    #[arg(long)]
    t: i64,
    /// Tropical constant for the de-Sitter space.
    #[arg(long, default_value_t = 0)]
    c: i64,
    /// Torus/Klein extents (repeatable).
    #[arg(long)]
    extent: Vec<i64>,
    /// Source point, comma-separated spatial coordinates.
    #[arg(long)]
    from: Option<String>,
}

#[derive(Args)]
struct PropagateArgs {
    #[arg(long, value_enum, default_value_t = SpaceKind::Free)]
    space: SpaceKind,
    #[arg(long, default_value_t = 1)]
    d: usize,
    /// Polygonal order (1 = taxicab).
    #[arg(long, default_value_t = 1)]
    n: u32,
    #[arg(long, default_value_t = 1.0)]
    mass: f64,
    #[arg(long)]
    t: i64,
    #[arg(long, value_enum, default_value_t = VariantKind::Standard)]
    variant: VariantKind,
    /// Profile over every endpoint of the time slice (d = 1).
    #[arg(long)]
    profile: bool,
    /// Single endpoint, comma-separated spatial coordinates.
    #[arg(long)]
    x: Option<String>,
    #[arg(long)]
    extent: Vec<i64>,
    #[arg(long, default_value_t = 0)]
    c: i64,
    /// Evaluate the continuum profile instead of the lattice one.
    #[arg(long)]
    continuum: bool,
    #[arg(long, default_value_t = 64)]
    quad_points: usize,
    /// Continuum profile sample count.
    #[arg(long, default_value_t = 49)]
    points: usize,
}

#[derive(Args)]
struct ContmultArgs {
    /// Comma-separated nonnegative arguments.
    #[arg(long)]
    args: String,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Args)]
struct ConvergeArgs {
    #[arg(long, value_enum, default_value_t = ConvergeKind::Cauchy)]
    kind: ConvergeKind,
    #[arg(long, default_value_t = 2)]
    p: u32,
    #[arg(long, default_value_t = 5)]
    q: u32,
    #[arg(long, default_value_t = 6)]
    t: i64,
    #[arg(long, default_value_t = 1.0)]
    mass: f64,
    #[arg(long, default_value_t = 6)]
    grid_max: i64,
    /// Multinomial arguments for the discrete-to-continuous check.
    #[arg(long, default_value = "1,1,2")]
    args: String,
    /// Refinement scales for the discrete-to-continuous check.
    #[arg(long, default_value = "100,200,400")]
    scales: String,
}

#[derive(Args)]
struct CoulombArgs {
    /// Charge position in physical units.
    #[arg(long, default_value_t = 1.0)]
    xq: f64,
    #[arg(long, default_value_t = 1.0)]
    coupling: f64,
    #[arg(long, default_value_t = 1.0)]
    mass: f64,
    /// Physical time span.
    #[arg(long, default_value_t = 2.0)]
    t: f64,
    /// Lattice sites per unit length.
    #[arg(long, default_value_t = 24)]
    refine: i64,
}

fn main() -> ExitCode {
    let config = RunConfig::parse();
    let threads = config
        .threads
        .or_else(|| {
            std::env::var("LATTICEPROP_THREADS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(1)
        .max(1);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(4);
        }
    };
    let report = pool.install(|| run(&config.command));
    let report = match report {
        Ok(report) => report,
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err {
                latticeprop::Error::Capacity { .. } | latticeprop::Error::Resolution { .. } => 3,
                _ => 2,
            };
            return ExitCode::from(code);
        }
    };
    let (x_label, y_label) = axis_labels(&config.command);
    let text = match config.format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
        Format::Svg => report.to_svg(x_label, y_label),
    };
    match &config.out {
        Some(path) => {
            if let Err(err) = write_atomic(path, &text) {
                eprintln!("error: {err}");
                return ExitCode::from(4);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::SUCCESS
}

fn axis_labels(command: &Command) -> (&'static str, &'static str) {
    match command {
        Command::Coulomb(_) => ("x (light-seconds)", "amplitude"),
        Command::Propagate(args) if args.continuum => ("x (physical units)", "amplitude"),
        Command::Propagate(_) => ("x (lattice units)", "amplitude"),
        Command::Converge(_) => ("x", "difference"),
        _ => ("x", "value"),
    }
}

fn parse_coords(text: &str, d: usize) -> Result<Vec<i64>, latticeprop::Error> {
    let coords: Result<Vec<i64>, _> = text.split(',').map(|s| s.trim().parse::<i64>()).collect();
    match coords {
        Ok(v) if v.len() == d => Ok(v),
        Ok(v) => Err(latticeprop::Error::DimensionMismatch {
            expected: d,
            got: v.len(),
        }),
        Err(_) => Err(latticeprop::Error::UnsupportedSpace("unparsable coordinates")),
    }
}

fn parse_f64_list(text: &str) -> Result<Vec<f64>, latticeprop::Error> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| latticeprop::Error::UnsupportedSpace("unparsable number list"))
        })
        .collect()
}

fn build_space(kind: SpaceKind, d: usize, extents: &[i64], c: i64) -> Result<SpaceSpec, latticeprop::Error> {
    Ok(match kind {
        SpaceKind::Free => SpaceSpec::Free { d, extents: None },
        SpaceKind::Torus => {
            let extents = if extents.is_empty() { vec![2; d] } else { extents.to_vec() };
            SpaceSpec::Torus { extents }
        }
        SpaceKind::Klein => {
            let (l1, l2) = match extents {
                [] => (2, 2),
                [l] => (*l, *l),
                [l1, l2, ..] => (*l1, *l2),
            };
            SpaceSpec::Klein { l1: l1.max(1), l2: l2.max(1) }
        }
        SpaceKind::Desitter => SpaceSpec::TropicalDeSitter { d, c },
    })
}

fn run(command: &Command) -> Result<Report, latticeprop::Error> {
    match command {
        Command::Triples(args) => run_triples(args),
        Command::Metric(args) => run_metric(args),
        Command::Paths(args) => run_paths(args),
        Command::Propagate(args) => run_propagate(args),
        Command::Contmult(args) => run_contmult(args),
        Command::Converge(args) => run_converge(args),
        Command::Coulomb(args) => run_coulomb(args),
    }
}

fn run_triples(args: &TriplesArgs) -> Result<Report, latticeprop::Error> {
    let rows = primitive_triples(args.max_hyp)
        .into_iter()
        .map(|t| vec![Cell::Int(t.leg_x), Cell::Int(t.leg_i), Cell::Int(t.hyp)])
        .collect();
    Ok(Report {
        command: "triples",
        params: vec![("max_hyp", args.max_hyp.to_string())],
        columns: vec!["leg_x", "leg_i", "hyp"],
        rows,
        extra: vec![],
    })
}

fn run_metric(args: &MetricArgs) -> Result<Report, latticeprop::Error> {
    let axes = axes_of_symmetry(args.n, 1)?;
    let origin = LatticePoint::origin(1);
    let mut rows = Vec::new();
    for dt in 0..=args.max_dt {
        for dx in -dt..=dt {
            let p = LatticePoint::new(vec![dx], dt);
            let taxi = taxicab_interval(&origin, &p).value();
            let mink = minkowski_interval(&origin, &p).value();
            let poly = polygonal_interval(&axes, &origin, &p).value();
            rows.push(vec![
                Cell::Int(dx),
                Cell::Int(dt),
                Cell::Float(taxi.unwrap_or(f64::NAN)),
                Cell::Float(mink.unwrap_or(f64::NAN)),
                Cell::Float(poly.unwrap_or(f64::NAN)),
            ]);
        }
    }
    Ok(Report {
        command: "metric",
        params: vec![
            ("n", args.n.to_string()),
            ("max_dt", args.max_dt.to_string()),
        ],
        columns: vec!["dx", "dt", "taxicab", "minkowski", "polygonal"],
        rows,
        extra: vec![],
    })
}

fn run_paths(args: &PathsArgs) -> Result<Report, latticeprop::Error> {
    let space = build_space(args.space, args.d, &args.extent, args.c)?;
    let axes = axes_of_symmetry(args.n, args.d)?;
    let from = match &args.from {
        Some(text) => LatticePoint::new(parse_coords(text, args.d)?, 0),
        None => LatticePoint::origin(args.d),
    };
    let profile = path_count_profile(&space, &from, args.t, &axes)?;
    let rows = profile
        .into_iter()
        .map(|(pos, count)| {
            let mut row: Vec<Cell> = pos.into_iter().map(Cell::Int).collect();
            row.push(Cell::Text(count.to_string()));
            row
        })
        .collect();
    let mut columns = vec!["x1", "x2", "x3"];
    columns.truncate(args.d);
    columns.push("count");
    Ok(Report {
        command: "paths",
        params: vec![
            ("d", args.d.to_string()),
            ("n", args.n.to_string()),
            ("t", args.t.to_string()),
        ],
        columns,
        rows,
        extra: vec![],
    })
}

fn amplitude_row(x: i64, hist: &PhaseHistogram, mass: f64, scale: f64) -> Vec<Cell> {
    let amp = hist.amplitude(mass);
    vec![
        Cell::Float(x as f64 / scale),
        Cell::Float(amp.re),
        Cell::Float(amp.im),
        Cell::Float(amp.norm()),
    ]
}

fn run_propagate(args: &PropagateArgs) -> Result<Report, latticeprop::Error> {
    use rayon::prelude::*;

    let params = vec![
        ("space", args.space.name().to_string()),
        ("d", args.d.to_string()),
        ("n", args.n.to_string()),
        ("mass", fmt_f64(args.mass)),
        ("t", args.t.to_string()),
    ];
    if args.continuum {
        let t = args.t as f64;
        let points = args.points.max(3);
        let xs: Vec<f64> = (0..points)
            .map(|i| -t + (i as f64 + 1.0) * 2.0 * t / (points as f64 + 1.0))
            .collect();
        let profile = contmult::k1_cont_profile(t, &xs, args.mass, args.quad_points)?;
        let rows = xs
            .iter()
            .zip(&profile)
            .map(|(x, amp)| {
                vec![
                    Cell::Float(*x),
                    Cell::Float(amp.re),
                    Cell::Float(amp.im),
                    Cell::Float(amp.norm()),
                ]
            })
            .collect();
        return Ok(Report {
            command: "propagate",
            params,
            columns: vec!["x", "re", "im", "mag"],
            rows,
            extra: vec![],
        });
    }

    let space = build_space(args.space, args.d, &args.extent, args.c)?;
    match (&args.x, args.profile) {
        (_, true) => {
            if args.d != 1 {
                return Err(latticeprop::Error::UnsupportedSpace(
                    "profiles sweep one spatial dimension",
                ));
            }
            let sweep: Vec<i64> = match &space {
                SpaceSpec::Torus { extents } => (-extents[0] + 1..=extents[0]).collect(),
                _ => (-args.t..=args.t).collect(),
            };
            let rows: Result<Vec<_>, _> = sweep
                .par_iter()
                .map(|&x| -> Result<Vec<Cell>, latticeprop::Error> {
                    let target = LatticePoint::new(vec![x], args.t);
                    let origin = LatticePoint::origin(1);
                    let hist = match (&space, args.variant) {
                        (SpaceSpec::Torus { .. }, VariantKind::Standard) => {
                            k1_torus_histogram(&space, &origin, &target)?
                        }
                        (SpaceSpec::TropicalDeSitter { .. }, VariantKind::Standard) => {
                            if space.contains(&target)? {
                                PhaseHistogram::from_count(k1_desitter(&space, &origin, &target)?)
                            } else {
                                PhaseHistogram::new()
                            }
                        }
                        (SpaceSpec::Torus { .. } | SpaceSpec::TropicalDeSitter { .. }, VariantKind::Feynman) => {
                            return Err(latticeprop::Error::UnsupportedSpace(
                                "the Feynman variant is computed on free space",
                            ))
                        }
                        (_, VariantKind::Standard) => kn_free_histogram(args.n, x, args.t)?,
                        (_, VariantKind::Feynman) => kn_feynman_histogram(args.n, x, args.t)?,
                    };
                    Ok(amplitude_row(x, &hist, args.mass, 1.0))
                })
                .collect();
            Ok(Report {
                command: "propagate",
                params,
                columns: vec!["x", "re", "im", "mag"],
                rows: rows?,
                extra: vec![],
            })
        }
        (Some(text), false) => {
            let coords = parse_coords(text, args.d)?;
            let target = LatticePoint::new(coords.clone(), args.t);
            let origin = LatticePoint::origin(args.d);
            let hist = match &space {
                SpaceSpec::Torus { .. } => k1_torus_histogram(&space, &origin, &target)?,
                SpaceSpec::Klein { .. } => k1_klein_histogram(&space, &origin, &target)?,
                SpaceSpec::TropicalDeSitter { .. } => {
                    PhaseHistogram::from_count(k1_desitter(&space, &origin, &target)?)
                }
                SpaceSpec::Free { .. } => {
                    if args.d == 1 {
                        match args.variant {
                            VariantKind::Standard => kn_free_histogram(args.n, coords[0], args.t)?,
                            VariantKind::Feynman => {
                                kn_feynman_histogram(args.n, coords[0], args.t)?
                            }
                        }
                    } else {
                        k1_free_histogram(&coords, args.t)
                    }
                }
            };
            let amp = hist.amplitude(args.mass);
            let rows = vec![vec![
                Cell::Text(text.clone()),
                Cell::Float(amp.re),
                Cell::Float(amp.im),
                Cell::Float(amp.norm()),
            ]];
            Ok(Report {
                command: "propagate",
                params,
                columns: vec!["x", "re", "im", "mag"],
                rows,
                extra: vec![],
            })
        }
        (None, false) => Err(latticeprop::Error::UnsupportedSpace(
            "pass --profile or --x to choose endpoints",
        )),
    }
}

fn run_contmult(args: &ContmultArgs) -> Result<Report, latticeprop::Error> {
    let values = parse_f64_list(&args.args)?;
    if values.len() < 2 || values.iter().any(|v| *v < 0.0) {
        return Err(latticeprop::Error::UnsupportedSpace(
            "contmult needs at least two nonnegative arguments",
        ));
    }
    let value = contmult::cont_multinomial(&values, args.tol)?;
    let mut columns = vec!["value"];
    let mut row = vec![Cell::Float(value)];
    if values.len() == 2 {
        columns.push("binomial_route");
        row.push(Cell::Float(contmult::cont_binomial(
            values[0] + values[1],
            values[0],
        )));
    }
    if values.iter().all(|v| *v > 0.0) {
        let gauss = contmult::gaussian_asymptotic(&values);
        columns.push("gaussian");
        row.push(Cell::Float(gauss.value));
        columns.push("entropy_form");
        row.push(Cell::Float(gauss.entropy_form));
    }
    Ok(Report {
        command: "contmult",
        params: vec![("args", args.args.clone()), ("tol", fmt_f64(args.tol))],
        columns,
        rows: vec![row],
        extra: vec![],
    })
}

fn run_converge(args: &ConvergeArgs) -> Result<Report, latticeprop::Error> {
    match args.kind {
        ConvergeKind::Cauchy => {
            let grid: Vec<i64> = (-args.grid_max..=args.grid_max).collect();
            let sup = cauchy_diagnostic(args.p, args.q, args.t, &grid, args.mass)?;
            let gp = latticeprop::propagators::normalization_gp(args.p.min(args.t as u32), args.t)?;
            let gq = latticeprop::propagators::normalization_gp(args.q.min(args.t as u32), args.t)?;
            let mut rows = Vec::new();
            for &x in &grid {
                let kp = latticeprop::propagators::kn_free(args.p, x, args.t, args.mass)? / gp;
                let kq = latticeprop::propagators::kn_free(args.q, x, args.t, args.mass)? / gq;
                rows.push(vec![
                    Cell::Int(x),
                    Cell::Float(kp.re),
                    Cell::Float(kp.im),
                    Cell::Float(kq.re),
                    Cell::Float(kq.im),
                    Cell::Float((kp - kq).norm()),
                ]);
            }
            Ok(Report {
                command: "converge",
                params: vec![
                    ("kind", "cauchy".into()),
                    ("p", args.p.to_string()),
                    ("q", args.q.to_string()),
                    ("t", args.t.to_string()),
                    ("mass", fmt_f64(args.mass)),
                ],
                columns: vec!["x", "kp_re", "kp_im", "kq_re", "kq_im", "abs_diff"],
                rows,
                extra: vec![("sup", sup), ("min_order", args.p.min(args.q) as f64)],
            })
        }
        ConvergeKind::Multinomial => {
            let values = parse_f64_list(&args.args)?;
            let scales: Vec<u64> = args
                .scales
                .split(',')
                .map(|s| s.trim().parse::<u64>())
                .collect::<Result<_, _>>()
                .map_err(|_| latticeprop::Error::UnsupportedSpace("unparsable scale list"))?;
            let mut rows = Vec::new();
            for scale in scales {
                let dev = contmult::disc_to_cont_check(&values, scale)?;
                rows.push(vec![Cell::Int(scale as i64), Cell::Float(dev)]);
            }
            Ok(Report {
                command: "converge",
                params: vec![("kind", "multinomial".into()), ("args", args.args.clone())],
                columns: vec!["scale", "deviation"],
                rows,
                extra: vec![],
            })
        }
    }
}

fn run_coulomb(args: &CoulombArgs) -> Result<Report, latticeprop::Error> {
    let dt = (args.t * args.refine as f64).round() as i64;
    let spec = PotentialSpec {
        charge_position: args.xq,
        coupling: args.coupling,
    };
    let profile = interactions::k_interacting_profile(args.refine, dt, &spec)?;
    let rows = profile
        .iter()
        .map(|(x, hist)| amplitude_row(*x, hist, args.mass, args.refine as f64))
        .collect();
    Ok(Report {
        command: "coulomb",
        params: vec![
            ("xq", fmt_f64(args.xq)),
            ("coupling", fmt_f64(args.coupling)),
            ("mass", fmt_f64(args.mass)),
            ("t", fmt_f64(args.t)),
            ("refine", args.refine.to_string()),
        ],
        columns: vec!["x", "re", "im", "mag"],
        rows,
        extra: vec![],
    })
}
