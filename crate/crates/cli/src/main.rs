//! `dynn`: braid actions, Dynnikov matrices, dilatations and train-track reports.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dynnikov::braid::{parse_braid_file, parse_braid_line};
use dynnikov::json::*;
use dynnikov::matrix::{analyze, MatrixAnalysis};
use dynnikov::traintrack::*;
use dynnikov::*;
use num_bigint::BigInt;
use rayon::prelude::*;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "dynn", version, about = "Dynnikov coordinates, Dynnikov matrices and train-track spectra")]
struct Cli {
    #[command(flatten)]
    cfg: RunConfig,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Clone)]
struct RunConfig {
    /// Precision ladder in mantissa bits, strictly increasing.
    #[arg(long, global = true, value_delimiter = ',', default_value = "53,128,256,512")]
    precision: Vec<u32>,
    /// Convergence target for the unstable direction.
    #[arg(long, global = true, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 5000)]
    max_iters: usize,
    /// Probe radius relative to the fixed direction.
    #[arg(long, global = true, default_value_t = 1e-6)]
    radius: f64,
    /// Random probe directions per coordinate.
    #[arg(long, global = true, default_value_t = 8)]
    samples: usize,
    #[arg(long, global = true, default_value_t = 0x5eed)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads for batch runs; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Copy, Clone, ValueEnum)]
enum Mode {
    Exact,
    RootsOfUnityAndZeros,
    EigenvaluesOne,
}

impl From<Mode> for SpectrumMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Exact => SpectrumMode::Exact,
            Mode::RootsOfUnityAndZeros => SpectrumMode::RootsOfUnityAndZeros,
            Mode::EigenvaluesOne => SpectrumMode::EigenvaluesOne,
        }
    }
}

#[derive(Args, Clone)]
struct BraidArgs {
    /// Number of strands.
    #[arg(short = 'n', long)]
    strands: Option<usize>,
    /// Signed generator indices, e.g. "1 -2"; letters act left to right.
    #[arg(short = 'w', long, allow_hyphen_values = true)]
    word: Option<String>,
    /// A braid-file line `n=<strands> <letters>` instead of -n/-w.
    #[arg(long, conflicts_with_all = ["strands", "word"])]
    line: Option<String>,
}

impl BraidArgs {
    fn braid(&self) -> Result<BraidWord> {
        if let Some(l) = &self.line {
            return parse_braid_line(l);
        }
        let n = self.strands.ok_or_else(|| Error::Parse("give -n <strands> or --line".into()))?;
        BraidWord::parse(self.word.as_deref().unwrap_or(""), n)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Apply a braid to a coordinate vector.
    Act {
        #[command(flatten)]
        braid: BraidArgs,
        /// JSON array `[a..., b...]` or object `{"a": [...], "b": [...]}`.
        #[arg(short = 'v', long, allow_hyphen_values = true)]
        vector: String,
    },
    /// Dynnikov matrices at the unstable direction, with their regions.
    Matrix {
        #[command(flatten)]
        braid: BraidArgs,
    },
    /// Dilatation as the spectral radius of the Dynnikov matrix.
    Dilatation {
        #[command(flatten)]
        braid: BraidArgs,
        /// Significant digits.
        #[arg(long, default_value_t = 12)]
        digits: usize,
    },
    /// Compare the spectrum of a Dynnikov matrix with a transition matrix.
    Compare {
        #[command(flatten)]
        braid: BraidArgs,
        /// Dynnikov matrix file used instead of a braid.
        #[arg(long)]
        dynnikov: Option<PathBuf>,
        /// Transition matrix file.
        transition: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::EigenvaluesOne)]
        mode: Mode,
        /// Compare the first matrix of w^m with T^m.
        #[arg(long)]
        power: Option<usize>,
    },
    /// Decompose the circle of directions for a 3-strand braid.
    Regions3 {
        #[command(flatten)]
        braid: BraidArgs,
        /// Write a picture of the decomposition.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Train-track operations.
    #[command(subcommand)]
    Track(TrackCmd),
    /// Matrices and dilatations for every braid in a file, one JSON record per line.
    Batch { file: PathBuf },
}

#[derive(Subcommand)]
enum TrackCmd {
    /// Dilatation and Perron-Frobenius eigenvector of a transition matrix.
    Pf { transition: PathBuf },
    /// Pinch the polygon containing an edge across that edge.
    Pinch {
        track: PathBuf,
        #[arg(long)]
        edge: String,
    },
    /// Complete diagonal extensions.
    Extend {
        track: PathBuf,
        /// Only count them.
        #[arg(long)]
        count: bool,
        #[arg(long, default_value_t = 10_000)]
        limit: usize,
    },
    /// Dynnikov coordinates of a measure on an annotated track.
    Coords {
        track: PathBuf,
        /// Branch weights `{"branch": weight}`; missing branches are completed
        /// from the track's coordinate branches.
        #[arg(long)]
        measure: PathBuf,
        /// Also print the linear piece of the change of coordinates.
        #[arg(long)]
        linearize: bool,
    },
    /// Check D·L = L·T, or solve the unknown entries of T.
    Conjugacy {
        dynnikov: PathBuf,
        l: PathBuf,
        transition: PathBuf,
        /// Treat null entries of the transition file as unknowns.
        #[arg(long)]
        solve: bool,
    },
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NonConvergence(_) | Error::NoDominantRealRoot(_) | Error::NotIrreducible(_) => 3,
            Error::VerificationFailed(_) | Error::TieAtBasepoint(_) | Error::Singular => 4,
            _ => 2,
        };
        Failure { code, msg: e.to_string() }
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: 2, msg: msg.into() }
}

fn read_json(p: &Path) -> Res<Value> {
    let text = std::fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", p.display())))
}

fn options(cfg: &RunConfig) -> Res<SearchOptions> {
    let o = SearchOptions {
        ladder: cfg.precision.clone(),
        target_tol: cfg.tol,
        max_iters: cfg.max_iters,
        seed: cfg.seed,
        radius: cfg.radius,
        random_probes: cfg.samples,
    };
    o.validate()?;
    Ok(o)
}

fn matrix_text(m: &IntMatrix) -> String {
    (0..m.rows()).map(|i| m.row(i).iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")).collect::<Vec<_>>().join("\n")
}

fn analysis_json(w: &BraidWord, an: &MatrixAnalysis) -> Value {
    json!({
        "n": w.strands(),
        "word": w.render(),
        "matrices": an.matrices.iter().map(dynnikov_matrix_json).collect::<Vec<_>>(),
        "dilatation": an.dilatation.display(),
        "log_dilatation": an.dilatation.ln(),
        "direction": direction_json(&an.direction),
        "probe_radius": an.probe_radius,
    })
}

struct Output {
    json: Value,
    text: String,
    /// Exit 4 after printing when a check came out false.
    check_failed: bool,
}

impl Output {
    fn new(json: Value, text: String) -> Self {
        Output { json, text, check_failed: false }
    }
}

fn run(cli: &Cli) -> Res<Output> {
    let cfg = &cli.cfg;
    match &cli.cmd {
        Command::Act { braid, vector } => {
            let w = braid.braid()?;
            let v = parse_vector_text(vector)?;
            let out = apply_braid(&v, &w)?;
            let text = format!("({})", out.to_flat().iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "));
            Ok(Output::new(vector_json(&out), text))
        }
        Command::Matrix { braid } => {
            let w = braid.braid()?;
            let an = analyze(&w, &options(cfg)?)?;
            let mut text = String::new();
            for (k, m) in an.matrices.iter().enumerate() {
                let _ = writeln!(text, "matrix {}:\n{}", k + 1, matrix_text(&m.matrix));
            }
            let _ = write!(text, "dilatation {}", an.dilatation.display());
            Ok(Output::new(analysis_json(&w, &an), text))
        }
        Command::Dilatation { braid, digits } => {
            let w = braid.braid()?;
            let an = analyze(&w, &options(cfg)?)?;
            let d = an.dilatation.digits(*digits);
            Ok(Output::new(json!({"dilatation": d, "log_dilatation": an.dilatation.ln()}), d))
        }
        Command::Compare { braid, dynnikov, transition, mode, power } => {
            let t = parse_int_matrix(&read_json(transition)?)?;
            let report = match (dynnikov, power) {
                (Some(_), Some(_)) => return Err(usage("--power needs a braid, not --dynnikov")),
                (Some(p), None) => isospectral_up_to(&parse_int_matrix(&read_json(p)?)?, &t, (*mode).into())?,
                (None, Some(m)) => {
                    if !matches!(mode, Mode::EigenvaluesOne) {
                        return Err(usage("--power compares up to eigenvalues one"));
                    }
                    compare_power(&braid.braid()?, *m, &t, &options(cfg)?)?
                }
                (None, None) => {
                    let ms = dynnikov_matrices(&braid.braid()?, &options(cfg)?)?;
                    isospectral_up_to(&ms[0].matrix, &t, (*mode).into())?
                }
            };
            let text = format!(
                "isospectral: {}\nleft:  {:?}\nright: {:?}",
                report.isospectral,
                report.left_stripped.to_strings(),
                report.right_stripped.to_strings()
            );
            let failed = !report.isospectral;
            let json = serde_json::to_value(&report).map_err(|e| usage(e.to_string()))?;
            Ok(Output { json, text, check_failed: failed })
        }
        Command::Regions3 { braid, svg } => {
            let w = braid.braid()?;
            let arcs = enumerate_regions_n3(&w)?;
            if let Some(path) = svg {
                std::fs::write(path, regions_svg(&arcs)).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            }
            let json = json!(arcs
                .iter()
                .map(|a| json!({"start": a.start, "end": a.end, "matrix": int_matrix_json(&a.matrix)}))
                .collect::<Vec<_>>());
            let text = arcs
                .iter()
                .map(|a| format!("[{:.6}, {:.6}) {:?}", a.start, a.end, a.matrix.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>()))
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Output::new(json, text))
        }
        Command::Track(t) => run_track(t),
        Command::Batch { file } => run_batch(cfg, file),
    }
}

fn run_track(cmd: &TrackCmd) -> Res<Output> {
    match cmd {
        TrackCmd::Pf { transition } => {
            let t = TransitionMatrix::from_json(&read_json(transition)?)?;
            let pf = transition_pf(&t, 1e-14)?;
            let text = format!(
                "dilatation {}\nvector {}",
                pf.dilatation.display(),
                pf.vector.iter().map(|x| format!("{x:.8}")).collect::<Vec<_>>().join(" ")
            );
            Ok(Output::new(json!({"dilatation": pf.dilatation.display(), "vector": pf.vector}), text))
        }
        TrackCmd::Pinch { track, edge } => {
            let t = load_track(&read_json(track)?)?;
            let punctured = t.polygons().iter().any(|p| p.punctured && p.edges.iter().any(|e| e == edge));
            let moved = if punctured { pinch_punctured(&t, edge)? } else { pinch_unpunctured(&t, edge)? };
            let json = json!({"track": moved.track.to_json(), "psi": moved.psi.to_json()});
            let text = format!("rank {} -> {}\n{}", t.rank(), moved.track.rank(), json);
            Ok(Output::new(json, text))
        }
        TrackCmd::Extend { track, count, limit } => {
            let t = load_track(&read_json(track)?)?;
            let n = diagonal_extensions_count(&t);
            if *count {
                return Ok(Output::new(json!({"count": n.to_string()}), n.to_string()));
            }
            let exts = enumerate_diagonal_extensions(&t, *limit)?;
            let json = json!({
                "count": n.to_string(),
                "extensions": exts
                    .iter()
                    .map(|e| json!({"track": e.track.to_json(), "added": e.added, "psi": e.psi.to_json()}))
                    .collect::<Vec<_>>(),
            });
            let text = format!("{} extensions\n{}", exts.len(), exts.iter().map(|e| e.added.join(" ")).collect::<Vec<_>>().join("\n"));
            Ok(Output::new(json, text))
        }
        TrackCmd::Coords { track, measure, linearize } => {
            let (t, ann) = load_annotated(&read_json(track)?)?;
            let ann = ann.ok_or_else(|| usage("the track has no arc annotations"))?;
            let chart = MeasureChart::default_for(&t)?;
            let mu = chart.complete(&Measure::from_json(&read_json(measure)?)?)?;
            mu.check_nonnegative(&t)?;
            if !check_switch_conditions(&t, &mu)? {
                return Err(Failure { code: 4, msg: "the measure violates a switch condition".into() });
            }
            let v = change_of_coords(&t, &ann, &mu)?;
            let mut json = json!({"coordinates": vector_json(&v), "measure": mu.to_json()});
            let mut text = format!("({})", v.to_flat().iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "));
            if *linearize {
                let at: Vec<_> = chart.coords().iter().map(|b| mu.get(b).cloned()).collect::<Result<_>>()?;
                let l = linearize_change_of_coords(&t, &ann, &chart, &at)?;
                json["chart"] = json!(chart.coords());
                json["linearization"] = rat_matrix_json(&l);
                let _ = write!(text, "\nchart {:?}\n{}", chart.coords(), (0..l.rows()).map(|i| l.row(i).iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")).collect::<Vec<_>>().join("\n"));
            }
            Ok(Output::new(json, text))
        }
        TrackCmd::Conjugacy { dynnikov, l, transition, solve } => {
            let d = parse_int_matrix(&read_json(dynnikov)?)?;
            let l = parse_rat_matrix(&read_json(l)?)?;
            let tv = read_json(transition)?;
            if *solve {
                let rows = tv.get("matrix").unwrap_or(&tv).as_array().ok_or_else(|| usage("transition matrix must be an array of rows"))?;
                let partial = rows
                    .iter()
                    .map(|r| {
                        r.as_array()
                            .ok_or_else(|| usage("rows must be arrays"))?
                            .iter()
                            .map(|x| if x.is_null() { Ok(None) } else { parse_integer(x).map(Some).map_err(Failure::from) })
                            .collect::<Res<Vec<Option<BigInt>>>>()
                    })
                    .collect::<Res<Vec<_>>>()?;
                let t = solve_completion(&d, &l, &partial)?;
                return Ok(Output::new(json!({"transition": int_matrix_json(&t)}), matrix_text(&t)));
            }
            let t = parse_int_matrix(&tv)?;
            let holds = verify_conjugacy(&d, &l, &t)?;
            Ok(Output { json: json!({"conjugate": holds}), text: holds.to_string(), check_failed: !holds })
        }
    }
}

fn run_batch(cfg: &RunConfig, file: &Path) -> Res<Output> {
    let text = std::fs::read_to_string(file).map_err(|e| usage(format!("{}: {e}", file.display())))?;
    let opts = options(cfg)?;
    let entries = parse_braid_file(&text);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build().map_err(|e| usage(e.to_string()))?;
    let records: Vec<Value> = pool.install(|| {
        entries
            .par_iter()
            .map(|(line, w)| {
                let r = w.as_ref().map_err(|e| e.to_string()).and_then(|w| analyze(w, &opts).map(|an| analysis_json(w, &an)).map_err(|e| e.to_string()));
                match r {
                    Ok(mut v) => {
                        v["line"] = json!(line);
                        v
                    }
                    Err(e) => json!({"line": line, "error": e}),
                }
            })
            .collect()
    });
    let text = records
        .iter()
        .map(|r| match r.get("error") {
            Some(e) => format!("line {}: error {}", r["line"], e),
            None => format!("line {}: {} matrices, dilatation {}", r["line"], r["matrices"].as_array().map_or(0, Vec::len), r["dilatation"].as_str().unwrap_or("")),
        })
        .collect::<Vec<_>>()
        .join("\n");
    let lines = records.iter().map(Value::to_string).collect::<Vec<_>>().join("\n");
    Ok(Output::new(Value::String(lines), text))
}

fn regions_svg(arcs: &[RegionArc]) -> String {
    const COLORS: [&str; 8] = ["#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7"];
    let (cx, cy, r) = (200.0, 200.0, 150.0);
    let mut keys: Vec<&IntMatrix> = Vec::new();
    for a in arcs {
        if !keys.contains(&&a.matrix) {
            keys.push(&a.matrix);
        }
    }
    // the square parameter t in [0, 8) is drawn at angle t·π/4 from the corner (1, -1)
    let point = |t: f64| {
        let th = -std::f64::consts::FRAC_PI_4 + t * std::f64::consts::FRAC_PI_4;
        (cx + r * th.cos(), cy - r * th.sin())
    };
    let mut s = String::from(r#"<svg xmlns="http://www.w3.org/2000/svg" width="400" height="400" viewBox="0 0 400 400">"#);
    s.push('\n');
    for a in arcs {
        let k = keys.iter().position(|m| **m == a.matrix).unwrap_or(0);
        let (x0, y0) = point(a.start);
        let (x1, y1) = point(a.end);
        let large = u8::from(a.end - a.start > 4.0);
        let color = COLORS[k % COLORS.len()];
        if a.end - a.start >= 8.0 - 1e-12 {
            let _ = writeln!(s, r#"<circle cx="{cx}" cy="{cy}" r="{r}" fill="none" stroke="{color}" stroke-width="10"/>"#);
        } else {
            let _ = writeln!(s, r#"<path d="M {x0:.3} {y0:.3} A {r} {r} 0 {large} 0 {x1:.3} {y1:.3}" fill="none" stroke="{color}" stroke-width="10"/>"#);
        }
        let (lx, ly) = point((a.start + a.end) / 2.0);
        let (lx, ly) = (cx + (lx - cx) * 1.22, cy + (ly - cy) * 1.22);
        let label = a.matrix.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")).collect::<Vec<_>>().join(" | ");
        let _ = writeln!(s, r#"<text x="{lx:.1}" y="{ly:.1}" font-size="10" text-anchor="middle">{label}</text>"#);
    }
    s.push_str("</svg>\n");
    s
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let body = match (cli.cfg.format, &out.json) {
                (Format::Text, _) => out.text,
                (Format::Json, Value::String(lines)) => lines.clone(),
                (Format::Json, v) => serde_json::to_string_pretty(v).expect("serializable"),
            };
            // a closed pipe is not an error
            let _ = writeln!(std::io::stdout().lock(), "{body}");
            if out.check_failed {
                ExitCode::from(4)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
