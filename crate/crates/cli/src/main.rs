use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use rankwidth::expansion::{
    best_certificate, certified_rw_lower_bound, cheeger_alternative, cheeger_exact, degree_tail_threshold,
};
use rankwidth::experiments::{gap_summary, run_experiment, write_records, write_records_to, Regime, RegimeConfig};
use rankwidth::graph::{read_graph, sample_gnp, sample_gnp_sparse, write_graph, GnpConfig};
use rankwidth::matrix_stats::{
    check_membership_bound, defect_tail_experiment, dense_defect_sweep, random_subspace, write_defect_records,
    write_defect_records_to, BiasedVectorModel, DefectRecord, DefectTailConfig,
};
use rankwidth::width::{
    balanced_separation, rank_width_capped, tree_width_capped, width_report_capped, DEFAULT_CAP,
};
use rankwidth::{Adjacency, Error};

const SEED_ENV: &str = "RANKWIDTH_SEED";

#[derive(Debug, Parser)]
#[command(name = "rankwidth", version, about = "Exact graph widths, expansion certificates and G(n,p) experiments")]
struct Cli {
    /// Output format on stdout.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    JsonLines,
}

#[derive(Debug, Args)]
struct SeedArg {
    /// Master seed; defaults to the RANKWIDTH_SEED environment variable, then 0.
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample G(n, p) and write it as an edge list.
    Gnp {
        #[arg(long)]
        n: usize,
        /// Edge probability.
        #[arg(long, conflicts_with = "c", required_unless_present = "c")]
        p: Option<f64>,
        /// Average degree; sets p = c / n.
        #[arg(long)]
        c: Option<f64>,
        /// Use the geometric-skip sampler (cost proportional to n + |E|).
        #[arg(long)]
        sparse: bool,
        #[arg(long, short)]
        output: PathBuf,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Exact rank-width.
    Rw {
        graph: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        /// Write an optimal rank-decomposition to this file.
        #[arg(long)]
        decomposition: Option<PathBuf>,
        /// Also report tree-width and clique-width bounds.
        #[arg(long)]
        report: bool,
    },
    /// Exact tree-width.
    Tw {
        graph: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Cutrank between two disjoint vertex sets.
    Cutrank {
        graph: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        v1: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        v2: Vec<usize>,
    },
    /// Exact Cheeger constant with a minimizing set.
    Cheeger {
        graph: PathBuf,
        /// Also evaluate the stationary-distribution form.
        #[arg(long)]
        alternative: bool,
    },
    /// Balanced pair V1, V2 from an optimal rank-decomposition.
    Separate {
        graph: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Expansion-based rank-width lower bound for an induced core.
    Certify {
        graph: PathBuf,
        /// Core vertices; defaults to all vertices.
        #[arg(long, value_delimiter = ',')]
        core: Option<Vec<usize>>,
        /// Degree cap M; defaults to the smallest cap that applies.
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Random-matrix statistics.
    MatrixStats(MatrixStatsArgs),
    /// Seeded regime experiment producing CSV records.
    Experiment(ExperimentArgs),
    /// Smallest M with sum_{k >= M} k c^k / (k-1)! < eps / 2.
    TailThreshold {
        #[arg(long)]
        c: f64,
        #[arg(long)]
        eps: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StatsMode {
    /// Membership probability of random subspaces against eta^(n-k).
    Prop1,
    /// Rank-defect frequency of ceil(n/3) x ceil(n/2) random matrices.
    Tail,
    /// Frequency of low rank-width in dense G(n, p).
    Dense,
}

#[derive(Debug, Args)]
struct MatrixStatsArgs {
    #[arg(long, value_enum)]
    mode: StatsMode,
    /// Sizes; one for prop1 and tail, any number for dense.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    /// Constant C of the defect threshold.
    #[arg(long = "C", default_value_t = 12.6)]
    c: f64,
    /// Subspace dimension for prop1; random dimensions when absent.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 100)]
    samples: u64,
    #[command(flatten)]
    seed: SeedArg,
    /// CSV file for tail and dense records.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    #[arg(long, value_parser = parse_regime)]
    regime: Regime,
    #[arg(long)]
    n: usize,
    /// Edge probability (dense, neardense).
    #[arg(long, conflicts_with = "c")]
    p: Option<f64>,
    /// Average degree (supercritical, critical, subcritical).
    #[arg(long)]
    c: Option<f64>,
    #[arg(long, default_value_t = 20)]
    samples: u64,
    #[command(flatten)]
    seed: SeedArg,
    /// Largest graph or component solved exactly.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
    /// Worker threads (default: all cores); output does not depend on it.
    #[arg(long)]
    workers: Option<usize>,
    /// Record per-sample wall-clock time (makes output nondeterministic).
    #[arg(long)]
    timing: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn parse_regime(s: &str) -> Result<Regime, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Ordered key/value rows with a human-readable rendering. When `rows` is
/// `None` the text is already in the requested format.
struct Report {
    text: String,
    rows: Option<Vec<Vec<(&'static str, Value)>>>,
}

impl Report {
    fn single(text: String, row: Vec<(&'static str, Value)>) -> Self {
        Report {
            text,
            rows: Some(vec![row]),
        }
    }

    fn rendered(text: String) -> Self {
        Report { text, rows: None }
    }

    fn print(&self, format: Format) -> std::io::Result<()> {
        let mut out = std::io::stdout().lock();
        let Some(rows) = &self.rows else {
            return write!(out, "{}", self.text);
        };
        match format {
            Format::Text => write!(out, "{}", self.text)?,
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                if let Some(first) = rows.first() {
                    w.write_record(first.iter().map(|(k, _)| *k))?;
                }
                for row in rows {
                    w.write_record(row.iter().map(|(_, v)| plain(v)))?;
                }
                w.flush()?;
            }
            Format::JsonLines => {
                for row in rows {
                    let fields: Vec<String> =
                        row.iter().map(|(k, v)| format!("{}:{}", Value::from(*k), v)).collect();
                    writeln!(out, "{{{}}}", fields.join(","))?;
                }
            }
        }
        Ok(())
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(plain).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    }
}

fn list(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Capacity { .. } => 2,
        Error::Io { .. } | Error::Parse { .. } | Error::Csv { .. } => 3,
        _ => 1,
    }
}

enum Failure {
    Lib(Error),
    Usage(String),
    Output(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let report = match &cli.command {
        Command::Gnp {
            n,
            p,
            c,
            sparse,
            output,
            seed,
        } => {
            let p = p.unwrap_or_else(|| c.expect("clap requires p or c") / *n as f64);
            let cfg = GnpConfig::new(*n, p, seed.seed)?;
            let m = if *sparse {
                let g = sample_gnp_sparse(&cfg);
                write_graph(&g, output)?;
                g.edge_count()
            } else {
                let g = sample_gnp(&cfg);
                write_graph(&g, output)?;
                g.edge_count()
            };
            Report::single(
                format!("wrote G({n}, {p}) with {m} edges to {}\n", output.display()),
                vec![
                    ("n", json!(n)),
                    ("p", json!(p)),
                    ("seed", json!(seed.seed)),
                    ("edges", json!(m)),
                    ("path", json!(output.display().to_string())),
                ],
            )
        }
        Command::Rw {
            graph,
            cap,
            decomposition,
            report,
        } => {
            let g = read_graph(graph)?;
            let want_tree = decomposition.is_some();
            if *report {
                let r = width_report_capped(&g, *cap)?;
                if let (Some(path), Some(d)) = (decomposition, &r.decomposition) {
                    std::fs::write(path, d.to_text()).map_err(|e| Error::Io {
                        path: path.clone(),
                        source: e,
                    })?;
                }
                Report::single(
                    format!(
                        "rank-width: {}\ntree-width: {}\nclique-width: between {} and {}\n",
                        r.rank_width, r.tree_width, r.cw_lower, r.cw_upper
                    ),
                    vec![
                        ("n", json!(r.n)),
                        ("rank_width", json!(r.rank_width)),
                        ("tree_width", json!(r.tree_width)),
                        ("cw_lower", json!(r.cw_lower)),
                        ("cw_upper", json!(r.cw_upper)),
                    ],
                )
            } else {
                let r = rank_width_capped(&g, want_tree, *cap)?;
                if let (Some(path), Some(d)) = (decomposition, &r.decomposition) {
                    std::fs::write(path, d.to_text()).map_err(|e| Error::Io {
                        path: path.clone(),
                        source: e,
                    })?;
                }
                Report::single(
                    format!("rank-width: {}\n", r.width),
                    vec![("n", json!(g.n())), ("rank_width", json!(r.width))],
                )
            }
        }
        Command::Tw { graph, cap } => {
            let g = read_graph(graph)?;
            let tw = tree_width_capped(&g, *cap)?;
            Report::single(
                format!("tree-width: {tw}\n"),
                vec![("n", json!(g.n())), ("tree_width", json!(tw))],
            )
        }
        Command::Cutrank { graph, v1, v2 } => {
            let g = read_graph(graph)?;
            let r = g.cutrank(v1, v2)?;
            Report::single(
                format!("cutrank: {r}\n"),
                vec![("v1", json!(v1)), ("v2", json!(v2)), ("cutrank", json!(r))],
            )
        }
        Command::Cheeger { graph, alternative } => {
            let g = read_graph(graph)?;
            let rep = cheeger_exact(&g)?;
            let mut text = format!(
                "phi: {}\nwitness: {}\ncut_edges: {}\nd_S: {}\nd_complement: {}\n",
                rep.phi,
                list(&rep.witness),
                rep.cut_edges,
                rep.d_s,
                rep.d_comp
            );
            let mut row = vec![
                ("phi", json!(rep.phi.to_string())),
                ("witness", json!(rep.witness)),
                ("cut_edges", json!(rep.cut_edges)),
                ("d_s", json!(rep.d_s)),
                ("d_comp", json!(rep.d_comp)),
            ];
            if *alternative {
                let alt = cheeger_alternative(&g)?;
                text.push_str(&format!("phi_alternative: {alt}\n"));
                row.push(("phi_alternative", json!(alt.to_string())));
            }
            Report::single(text, row)
        }
        Command::Separate { graph, cap } => {
            let g = read_graph(graph)?;
            let rw = rank_width_capped(&g, true, *cap)?;
            let d = rw
                .decomposition
                .ok_or_else(|| Failure::Usage("separation needs at least two vertices".into()))?;
            let s = balanced_separation(&g, &d)?;
            Report::single(
                format!(
                    "rank-width: {}\nedge: {} {}\nV1: {}\nV2: {}\ncutrank: {}\n",
                    rw.width,
                    s.edge.0,
                    s.edge.1,
                    list(&s.v1),
                    list(&s.v2),
                    s.rho
                ),
                vec![
                    ("rank_width", json!(rw.width)),
                    ("v1", json!(s.v1)),
                    ("v2", json!(s.v2)),
                    ("cutrank", json!(s.rho)),
                ],
            )
        }
        Command::Certify { graph, core, cap } => {
            let g = read_graph(graph)?;
            let core = core.clone().unwrap_or_else(|| (0..g.n()).collect());
            let cert = match cap {
                Some(m) => certified_rw_lower_bound(&g, &core, *m)?,
                None => best_certificate(&g, &core)?,
            };
            Report::single(
                cert.to_text(),
                vec![
                    ("n", json!(cert.n)),
                    ("core", json!(cert.core)),
                    ("alpha", json!(cert.alpha.to_string())),
                    ("delta", json!(cert.delta.to_string())),
                    ("degree_cap", json!(cert.degree_cap)),
                    ("filtered_edges", json!(cert.filtered_edge_count)),
                    ("edge_budget", json!(cert.edge_budget().to_string())),
                    ("applicable", json!(cert.applicable())),
                    ("bound", json!(cert.bound)),
                ],
            )
        }
        Command::MatrixStats(args) => matrix_stats(args, cli.format)?,
        Command::Experiment(args) => experiment(args, cli.format)?,
        Command::TailThreshold { c, eps } => {
            let t = degree_tail_threshold(*c, *eps)?;
            Report::single(
                format!(
                    "M = {}\ntail at M: {:e}\ntarget eps/2: {:e}\nmargin: {:.3}\n",
                    t.m, t.tail_at_m, t.target, t.margin
                ),
                vec![
                    ("c", json!(c)),
                    ("eps", json!(eps)),
                    ("m", json!(t.m)),
                    ("tail_at_m", json!(t.tail_at_m)),
                    ("target", json!(t.target)),
                    ("margin", json!(t.margin)),
                ],
            )
        }
    };
    report.print(cli.format).map_err(Failure::Output)
}

fn one_n(args: &MatrixStatsArgs) -> Result<usize, Failure> {
    match args.n[..] {
        [n] => Ok(n),
        _ => Err(Failure::Usage(format!("--mode {:?} takes a single --n", args.mode).to_lowercase())),
    }
}

fn defect_report(records: &[DefectRecord], format: Format, output: &Option<PathBuf>) -> Result<Report, Failure> {
    if let Some(path) = output {
        write_defect_records(records, path)?;
    }
    let mut text = String::new();
    for r in records {
        text.push_str(&format!(
            "n = {}: frequency {} (99% upper limit {:.3e}), bound {:.3e}, alpha {}\n",
            r.n, r.empirical_freq, r.clopper_pearson_ucl, r.paper_bound, r.alpha
        ));
    }
    if format == Format::Csv {
        let mut buf = Vec::new();
        write_defect_records_to(records, &mut buf).map_err(|e| Failure::Usage(e.to_string()))?;
        return Ok(Report::rendered(String::from_utf8(buf).expect("csv output is UTF-8")));
    }
    let rows = records
        .iter()
        .map(|r| {
            vec![
                ("n", json!(r.n)),
                ("p", json!(r.p)),
                ("C", json!(r.c)),
                ("alpha", json!(r.alpha)),
                ("samples", json!(r.samples)),
                ("empirical_freq", json!(r.empirical_freq)),
                ("clopper_pearson_ucl", json!(r.clopper_pearson_ucl)),
                ("paper_bound", json!(r.paper_bound)),
            ]
        })
        .collect();
    Ok(Report { text, rows: Some(rows) })
}

fn matrix_stats(args: &MatrixStatsArgs, format: Format) -> Result<Report, Failure> {
    let seed = args.seed.seed;
    match args.mode {
        StatsMode::Prop1 => {
            let n = one_n(args)?;
            let model = BiasedVectorModel::new(n, args.p)?;
            let mut rows = Vec::new();
            let mut violations = 0;
            let mut worst: f64 = 0.0;
            for i in 0..args.samples {
                let s = rankwidth::rng::derive_seed(seed, i);
                let k = args.k.unwrap_or((s % (n as u64 + 1)) as usize);
                let basis = random_subspace(n, k, s)?;
                let c = check_membership_bound(&model, &basis)?;
                violations += usize::from(!c.holds);
                worst = worst.max(c.probability / c.bound);
                rows.push(vec![
                    ("sample_index", json!(i)),
                    ("n", json!(n)),
                    ("k", json!(k)),
                    ("p", json!(args.p)),
                    ("probability", json!(c.probability)),
                    ("bound", json!(c.bound)),
                    ("holds", json!(c.holds)),
                ]);
            }
            let text = format!(
                "{} subspaces of F_2^{n}, p = {}: {violations} violations, largest probability/bound {worst:.6}\n",
                args.samples, args.p
            );
            Ok(Report { text, rows: Some(rows) })
        }
        StatsMode::Tail => {
            let n = one_n(args)?;
            let cfg = DefectTailConfig::new(n, args.p, args.c, args.samples, seed)?;
            let res = defect_tail_experiment(&cfg)?;
            defect_report(&[res.record()], format, &args.output)
        }
        StatsMode::Dense => {
            let records = dense_defect_sweep(&args.n, args.p, args.c, args.samples, seed)?;
            defect_report(&records, format, &args.output)
        }
    }
}

fn experiment(args: &ExperimentArgs, format: Format) -> Result<Report, Failure> {
    let mut cfg = match (args.p, args.c) {
        (Some(p), None) => RegimeConfig::new(args.regime, args.n, p, args.samples, args.seed.seed)?,
        (None, Some(c)) => RegimeConfig::with_c(args.regime, args.n, c, args.samples, args.seed.seed)?,
        _ => return Err(Failure::Usage("experiment needs exactly one of --p and --c".into())),
    };
    cfg.exact_width_cap = args.cap;
    cfg.workers = args.workers;
    cfg.timing = args.timing;
    cfg.validate()?;
    let records = run_experiment(&cfg)?;
    if let Some(path) = &args.output {
        write_records(&records, path)?;
    }
    let text = match format {
        Format::Text => {
            let simple = records.iter().filter(|r| r.all_simple).count();
            let largest = records.iter().map(|r| r.largest_component).max().unwrap_or(0);
            let mut t = format!(
                "{} samples of {} G({}, {}): {simple} with only tree/unicyclic components, largest component {largest}\n",
                records.len(),
                cfg.regime,
                cfg.n,
                cfg.p
            );
            if let Some(s) = gap_summary(&records) {
                t.push_str(&format!("gap ceil(n/3) - rw: median {}, max {} over {} samples\n", s.median, s.max, s.count));
            }
            let certified: Vec<i64> = records.iter().map(|r| r.certified_lb).filter(|&b| b >= 0).collect();
            if !certified.is_empty() {
                let positive = certified.iter().filter(|&&b| b > 0).count();
                t.push_str(&format!("certified lower bound > 0 in {positive} of {} samples\n", certified.len()));
            }
            t
        }
        Format::Csv => {
            let mut buf = Vec::new();
            write_records_to(&records, &mut buf).map_err(|e| Failure::Usage(e.to_string()))?;
            String::from_utf8(buf).expect("csv output is UTF-8")
        }
        Format::JsonLines => records
            .iter()
            .map(|r| serde_json::to_string(r).expect("records serialize") + "\n")
            .collect(),
    };
    Ok(Report::rendered(text))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    eprintln!("config: {cli:?}");
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Output(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Output(e)) => {
            eprintln!("error: writing output: {e}");
            ExitCode::from(3)
        }
    }
}
