use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use netrobust::challenge::{run_challenge, ChallengeScenario};
use netrobust::clustering::{detect_communities_edge_betweenness, detect_communities_spectral};
use netrobust::graph::{generate, CoordKind, Model};
use netrobust::report::{self, ingest, AnalyzeOptions, Format, Loaded};
use netrobust::spectral::spectral_clusters;
use netrobust::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_UNDEFINED: u8 = 3;

#[derive(Parser)]
#[command(
    name = "netrobust",
    version,
    about = "Topological robustness analysis for Internet-like graphs"
)]
struct Cli {
    /// Worker threads (overrides NETROBUST_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Print every metric table row with its keys and status, then exit.
    #[arg(long)]
    list_metrics: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic topology as an edge list.
    Generate(GenerateArgs),
    /// Compute metrics and emit a report.
    Analyze(AnalyzeArgs),
    /// Run a challenge scenario and emit degradation curves.
    Attack(AttackArgs),
    /// Detect communities.
    Communities(CommunityArgs),
    /// Full report: metrics plus challenge traces.
    Report(ReportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelKind {
    Er,
    Ba,
    Ws,
    Star,
    Path,
    Cycle,
    Complete,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    model: ModelKind,
    #[arg(long)]
    nodes: usize,
    /// Edges per new node (ba).
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// Edge probability (er).
    #[arg(long, default_value_t = 0.1)]
    p: f64,
    /// Ring degree (ws).
    #[arg(long, default_value_t = 4)]
    k: usize,
    /// Rewiring probability (ws).
    #[arg(long, default_value_t = 0.1)]
    beta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InputArgs {
    /// Edge file.
    input: PathBuf,
    /// edgelist, weighted_edgelist or as_rel.
    #[arg(long, default_value = "edgelist")]
    input_format: String,
    /// Read edge lists as directed.
    #[arg(long)]
    directed: bool,
    /// `node,lat,lon` file.
    #[arg(long)]
    coords: Option<PathBuf>,
    /// Read coordinates as planar x,y instead of lat/lon.
    #[arg(long)]
    planar: bool,
    /// `node,label` file.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// `node,weight` file.
    #[arg(long)]
    node_weights: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

#[derive(Args)]
struct MetricArgs {
    /// Comma-separated metric keys, or `all`.
    #[arg(long)]
    metrics: Option<String>,
    /// Key-value option file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Use edge weights where supported.
    #[arg(long)]
    weighted: bool,
    /// Exit with status 3 if any metric is undefined.
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    metric: MetricArgs,
    #[arg(long, value_enum)]
    format: Option<OutFormat>,
}

#[derive(Args)]
struct AttackArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for the CSV curves.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: OutFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Spectral,
    EdgeBetweenness,
    SpectralClusters,
}

#[derive(Args)]
struct CommunityArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value = "spectral")]
    method: Method,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Source fraction for sampled edge betweenness.
    #[arg(long)]
    sample: Option<f64>,
    /// Hierarchy depth for spectral clusters.
    #[arg(long, default_value_t = 2)]
    depth: usize,
    #[arg(long, value_enum, default_value = "json")]
    format: OutFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    metric: MetricArgs,
    /// Scenario JSON files; repeatable.
    #[arg(long)]
    scenario: Vec<PathBuf>,
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(match e {
        Error::Parse { .. } | Error::Io(_) => EXIT_PARSE,
        _ => EXIT_USAGE,
    })
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(a: &InputArgs) -> Result<Loaded, Error> {
    let format = Format::parse(&a.input_format)?;
    if !format.is_edge_format() {
        return Err(Error::InvalidParameter(format!(
            "{} is not an edge format",
            format.key()
        )));
    }
    let mut l = Loaded::open(&a.input, format, a.directed)?;
    let kind = if a.planar {
        CoordKind::Planar
    } else {
        CoordKind::LatLon
    };
    if let Some(p) = &a.coords {
        l = l.attach(p, Format::Coords, kind)?;
    }
    if let Some(p) = &a.labels {
        l = l.attach(p, Format::Labels, kind)?;
    }
    if let Some(p) = &a.node_weights {
        l = l.attach(p, Format::NodeWeights, kind)?;
    }
    Ok(l)
}

/// Settings after merging the config file under the flags.
struct Settings {
    keys: Vec<String>,
    options: AnalyzeOptions,
    format: OutFormat,
    strict: bool,
}

fn settings(m: &MetricArgs, format: Option<OutFormat>) -> Result<Settings, Error> {
    let mut entries: BTreeMap<String, String> = match &m.config {
        Some(p) => report::parse_config(&read(p)?)?,
        None => BTreeMap::new(),
    };
    let cfg_metrics = entries.remove("metrics");
    let cfg_format = entries.remove("format");
    let cfg_strict = entries.remove("strict");
    let mut options = report::apply_config(&AnalyzeOptions::default(), &entries)?;
    if let Some(s) = m.seed {
        options.seed = s;
    }
    if m.weighted {
        options.weighted = true;
    }
    let keys = match m.metrics.as_deref().or(cfg_metrics.as_deref()) {
        Some(list) => report::parse_keys(list)?,
        None => report::default_keys(),
    };
    let format = match (format, cfg_format.as_deref()) {
        (Some(f), _) => f,
        (None, None) | (None, Some("json")) => OutFormat::Json,
        (None, Some("csv")) => OutFormat::Csv,
        (None, Some(other)) => {
            return Err(Error::InvalidParameter(format!("unknown format '{other}'")))
        }
    };
    let strict = m.strict
        || match cfg_strict.as_deref() {
            None | Some("false") => false,
            Some("true") => true,
            Some(other) => {
                return Err(Error::InvalidParameter(format!(
                    "strict must be true or false, got '{other}'"
                )))
            }
        };
    Ok(Settings {
        keys,
        options,
        format,
        strict,
    })
}

fn finish_report(
    doc: &report::ReportDocument,
    s: &Settings,
    names: &[String],
    out: Option<&Path>,
) -> Result<ExitCode, Error> {
    let text = match s.format {
        OutFormat::Json => doc.to_json(),
        OutFormat::Csv => report::metrics_csv(&doc.metrics, names),
    };
    emit(out, &text)?;
    let undefined = doc.undefined_keys();
    if s.strict && !undefined.is_empty() {
        eprintln!("undefined metrics: {}", undefined.join(", "));
        return Ok(ExitCode::from(EXIT_UNDEFINED));
    }
    Ok(ExitCode::SUCCESS)
}

fn scenario(path: &Path, seed: Option<u64>) -> Result<ChallengeScenario, Error> {
    let mut sc = report::parse_scenario(&read(path)?)?;
    if let Some(s) = seed {
        sc.seed = s;
    }
    Ok(sc)
}

#[derive(Serialize)]
struct Communities<'a> {
    method: &'a str,
    names: &'a [String],
    community: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    modularity: Option<f64>,
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    if cli.list_metrics {
        print!("{}", report::listing_text());
        return Ok(ExitCode::SUCCESS);
    }
    let Some(command) = cli.command else {
        eprintln!("error: a subcommand or --list-metrics is required (see --help)");
        return Ok(ExitCode::from(EXIT_USAGE));
    };
    match command {
        Command::Generate(g) => {
            let model = match g.model {
                ModelKind::Er => Model::Er { v: g.nodes, p: g.p },
                ModelKind::Ba => Model::Ba { v: g.nodes, m: g.m },
                ModelKind::Ws => Model::Ws {
                    v: g.nodes,
                    k: g.k,
                    beta: g.beta,
                },
                ModelKind::Star => Model::Star { v: g.nodes },
                ModelKind::Path => Model::Path { v: g.nodes },
                ModelKind::Cycle => Model::Cycle { v: g.nodes },
                ModelKind::Complete => Model::Complete { v: g.nodes },
            };
            let t = generate(model, g.seed)?;
            let l = Loaded::from_topology(t);
            emit(
                g.out.as_deref(),
                &ingest::write_edgelist(&l.topology, &l.names),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Analyze(a) => {
            let s = settings(&a.metric, a.format)?;
            let l = load(&a.input)?;
            let doc = report::analyze(&l, &s.keys, &s.options)?;
            finish_report(&doc, &s, &l.names, a.metric.out.as_deref())
        }
        Command::Report(r) => {
            let s = settings(&r.metric, Some(OutFormat::Json))?;
            let l = load(&r.input)?;
            let scenarios = r
                .scenario
                .iter()
                .map(|p| scenario(p, r.metric.seed))
                .collect::<Result<Vec<_>, _>>()?;
            let mut doc = report::analyze(&l, &s.keys, &s.options)?;
            for sc in scenarios {
                report::add_trace(&mut doc, &l.topology, sc)?;
            }
            finish_report(&doc, &s, &l.names, r.metric.out.as_deref())
        }
        Command::Attack(a) => {
            let sc = scenario(&a.scenario, a.seed)?;
            let l = load(&a.input)?;
            let trace = run_challenge(&l.topology, &sc)?;
            match a.format {
                OutFormat::Json => {
                    let entry = report::TraceEntry {
                        scenario: sc,
                        trace,
                    };
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&entry).expect("trace serialises")
                    );
                }
                OutFormat::Csv => {
                    std::fs::create_dir_all(&a.out_dir)
                        .map_err(|e| Error::Io(format!("{}: {e}", a.out_dir.display())))?;
                    let mut files: Vec<(String, String)> = sc
                        .tracked
                        .iter()
                        .map(|k| (format!("{k}.csv"), report::trace_csv(&trace, k)))
                        .collect();
                    files.push((
                        "removals.csv".into(),
                        report::removals_csv(&trace, &l.names),
                    ));
                    for (name, text) in files {
                        let p = a.out_dir.join(&name);
                        emit(Some(&p), &text)?;
                        println!("{}", p.display());
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Communities(c) => {
            let l = load(&c.input)?;
            let t = &l.topology;
            let (method, community, modularity) = match c.method {
                Method::Spectral => {
                    let a = detect_communities_spectral(t)?;
                    ("spectral", a.community, Some(a.modularity))
                }
                Method::EdgeBetweenness => {
                    let a = detect_communities_edge_betweenness(t, c.sample, c.seed)?;
                    ("edge_betweenness", a.community, Some(a.modularity))
                }
                Method::SpectralClusters => (
                    "spectral_clusters",
                    spectral_clusters(t, c.depth)?.leaf_of,
                    None,
                ),
            };
            let text = match c.format {
                OutFormat::Json => {
                    let doc = Communities {
                        method,
                        names: &l.names,
                        community,
                        modularity,
                    };
                    serde_json::to_string_pretty(&doc).expect("communities serialise") + "\n"
                }
                OutFormat::Csv => {
                    let mut s = String::from("node,community\n");
                    for (name, k) in l.names.iter().zip(&community) {
                        s.push_str(&format!("{name},{k}\n"));
                    }
                    s
                }
            };
            emit(c.out.as_deref(), &text)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let threads = cli.threads.or_else(|| {
        std::env::var("NETROBUST_THREADS")
            .ok()
            .and_then(|s| s.parse().ok())
    });
    if let Some(n) = threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("warning: thread pool: {e}");
        }
    }
    run(cli).unwrap_or_else(|e| fail(&e))
}
