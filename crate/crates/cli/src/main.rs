use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};
use coronavis_client::{Client, Params};
use coronavis_core::analysis::AnalyticsSnapshot;
use coronavis_core::corpus::{ingest_raw, read_corpus, write_daily_file, write_records_csv, DailyFile, ParseMode};
use coronavis_core::mobility::{
    build_trajectories, detect_movements, ingest_case_counts, lagged_join, mobility_correlation, weekly_mobility,
    WeekBins,
};
use coronavis_core::topicmodel::{export_topicvis, fit_records, relevant_terms, RelevanceRanking};
use coronavis_core::DateRange;
use coronavis_service::{ReplayConfig, ServiceConfig};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "coronavis", version, about = "Pandemic tweet analytics: ingest, analyze, serve and replay")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Filter raw tweet JSON lines into daily CSV files.
    Ingest(IngestArgs),
    /// Batch analysis of a data directory; writes one JSON report per analytic.
    Analyze(AnalyzeArgs),
    /// Fit an LDA topic model and write the visualization payload.
    Lda(LdaArgs),
    /// Detect cross-state movements and join them with weekly case counts.
    Mobility(MobilityArgs),
    /// Serve the HTTP API over a data directory.
    Serve(ServeArgs),
    /// Serve the HTTP API while replaying daily files on an accelerated clock.
    Replay(ReplayArgs),
    /// Query a running service and print the JSON response.
    Query(QueryArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML config file; environment variables override it.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Daily CSV directory (overrides the config).
    #[arg(long)]
    data_dir: Option<PathBuf>,
}

impl ConfigArgs {
    fn load(&self) -> Result<ServiceConfig> {
        let mut config = ServiceConfig::load(self.config.as_deref(), |k| std::env::var(k).ok())?;
        if let Some(dir) = &self.data_dir {
            config.data_dir = dir.clone();
        }
        Ok(config)
    }
}

#[derive(Args)]
struct IngestArgs {
    /// Raw JSON-lines file, `-` for stdin.
    #[arg(long, short, default_value = "-")]
    input: String,
    /// Directory receiving one `YYYY-MM-DD.csv` per day.
    #[arg(long, conflicts_with = "out", required_unless_present = "out")]
    out_dir: Option<PathBuf>,
    /// Single CSV file receiving every kept record.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Secret salt for user pseudonyms.
    #[arg(long, env = "CORONAVIS_SALT", hide_env_values = true)]
    salt: String,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Output directory for the report files.
    #[arg(long)]
    out_dir: PathBuf,
    /// Skip topic modeling.
    #[arg(long)]
    no_lda: bool,
}

#[derive(Args)]
struct LdaArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Output file for the visualization payload.
    #[arg(long, default_value = "lda.json")]
    out: PathBuf,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    min_df: Option<u32>,
    #[arg(long)]
    max_df: Option<f64>,
    /// Terms per topic in the payload.
    #[arg(long)]
    top_terms: Option<usize>,
}

#[derive(Args)]
struct MobilityArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Output directory for `events.csv`, `weekly.csv` and `lagged_join.csv`.
    #[arg(long)]
    out_dir: PathBuf,
    /// Weekly case counts CSV (`state,week_start,cases`).
    #[arg(long)]
    cases: Option<PathBuf>,
    /// Weeks between mobility and the case counts it is paired with.
    #[arg(long, default_value_t = 1)]
    lag: u32,
}

#[derive(Args)]
struct ServeArgs {
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long)]
    port: Option<u16>,
}

#[derive(Args)]
struct ReplayArgs {
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long)]
    port: Option<u16>,
    /// Corpus days per wall-clock day.
    #[arg(long, default_value_t = 86_400.0)]
    speedup: f64,
    #[arg(long)]
    start: Option<NaiveDate>,
    #[arg(long)]
    end: Option<NaiveDate>,
    /// Stop serving once the last day is published.
    #[arg(long)]
    exit_when_done: bool,
}

#[derive(Args)]
struct QueryArgs {
    /// Endpoint path, for example `/api/sentiment/series`.
    path: String,
    /// Query parameters as `key=value`.
    params: Vec<String>,
    #[arg(long, default_value = "http://127.0.0.1:8080", env = "CORONAVIS_URL")]
    url: String,
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = io::BufWriter::new(f);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn ingest(args: IngestArgs) -> Result<()> {
    let reader: Box<dyn BufRead> = if args.input == "-" {
        Box::new(BufReader::new(io::stdin()))
    } else {
        let f = fs::File::open(&args.input).with_context(|| format!("opening {}", args.input))?;
        Box::new(BufReader::new(f))
    };
    let (records, report) = ingest_raw(reader, args.salt.as_bytes());
    if let Some(out) = &args.out {
        let f = fs::File::create(out).with_context(|| format!("creating {}", out.display()))?;
        write_records_csv(&records, io::BufWriter::new(f))?;
    }
    if let Some(dir) = &args.out_dir {
        fs::create_dir_all(dir)?;
        for file in DailyFile::split_by_day(records) {
            write_daily_file(dir, &file)?;
        }
    }
    eprintln!("{}", serde_json::to_string(&report)?);
    Ok(())
}

fn analyze(args: AnalyzeArgs) -> Result<()> {
    let mut config = args.config.load()?;
    if args.no_lda {
        config.lda.enabled = false;
    }
    let analytics = Arc::new(config.analytics_config()?);
    let (records, files, parse) = read_corpus(&config.data_dir, ParseMode::Lenient, None)?;
    if files.is_empty() {
        bail!("no daily files in {}", config.data_dir.display());
    }
    if !parse.skipped.is_empty() {
        eprintln!("skipped {} malformed rows", parse.skipped.len());
    }
    let snapshot = AnalyticsSnapshot::build(analytics, records, files);
    let r = snapshot.report();
    let out = &args.out_dir;
    fs::create_dir_all(out)?;
    write_json(&out.join("report.json"), r)?;
    write_json(&out.join("frequency.json"), &r.frequency)?;
    write_json(&out.join("top_words.json"), &r.top_words)?;
    write_json(&out.join("top_bigrams.json"), &r.top_bigrams)?;
    write_json(&out.join("frequent_topics.json"), &r.frequent_topics)?;
    write_json(&out.join("featured_topics.json"), &r.featured_topics)?;
    write_json(&out.join("sentiment_series.json"), &r.sentiment_series)?;
    write_json(&out.join("subjectivity_series.json"), &r.subjectivity_series)?;
    write_json(&out.join("sentiment_distribution.json"), &r.distribution)?;
    write_json(&out.join("sentiment_labels.json"), &r.labels)?;
    write_json(&out.join("cohorts.json"), &r.cohorts)?;
    write_json(&out.join("wordclouds.json"), &r.wordclouds)?;
    write_json(&out.join("mobility.json"), &r.mobility)?;
    if let Some(topics) = &r.topics {
        write_json(&out.join("lda.json"), topics)?;
    } else if let Err(e) = snapshot.lda_topics() {
        eprintln!("{e}");
    }
    eprintln!("analyzed {} tweets from {} files into {}", r.tweet_count, r.files.len(), out.display());
    Ok(())
}

fn lda(args: LdaArgs) -> Result<()> {
    let mut config = args.config.load()?;
    let l = &mut config.lda;
    l.enabled = true;
    if let Some(k) = args.k {
        l.k = k;
        l.alpha = None;
    }
    l.iterations = args.iterations.unwrap_or(l.iterations);
    l.seed = args.seed.unwrap_or(l.seed);
    l.lambda = args.lambda.unwrap_or(l.lambda);
    l.min_df = args.min_df.unwrap_or(l.min_df);
    l.max_df = args.max_df.unwrap_or(l.max_df);
    l.top_terms = args.top_terms.unwrap_or(l.top_terms);
    let settings = l.settings().expect("enabled");
    let analytics = config.analytics_config()?;
    let (records, files, _) = read_corpus(&config.data_dir, ParseMode::Lenient, None)?;
    if files.is_empty() {
        bail!("no daily files in {}", config.data_dir.display());
    }
    let fitted = fit_records(&records, &analytics.policy, &settings.vocab, &settings.params)?;
    let rankings = (0..fitted.model.k)
        .map(|t| relevant_terms(&fitted.model, t, settings.lambda, settings.top_terms))
        .collect::<Result<Vec<RelevanceRanking>, _>>()?;
    write_json(&args.out, &export_topicvis(&fitted.model, &rankings))?;
    if let Some(last) = fitted.model.checkpoints.last() {
        eprintln!(
            "fitted {} topics over {} terms; final log-likelihood {:.3}",
            fitted.model.k,
            fitted.vocabulary.len(),
            last.log_likelihood
        );
    }
    Ok(())
}

fn mobility(args: MobilityArgs) -> Result<()> {
    let config = args.config.load()?;
    let (records, files, _) = read_corpus(&config.data_dir, ParseMode::Lenient, None)?;
    if files.is_empty() {
        bail!("no daily files in {}", config.data_dir.display());
    }
    let epoch = config.mobility.epoch;
    let events = detect_movements(
        &build_trajectories(&records),
        chrono::Duration::days(config.mobility.window_days),
    );
    let last = DateRange::covering(&records).map_or(epoch, |r| r.to);
    let weekly = weekly_mobility(&events, WeekBins::through(epoch, last));
    fs::create_dir_all(&args.out_dir)?;

    let mut w = csv::Writer::from_path(args.out_dir.join("events.csv"))?;
    w.write_record(["user_id", "from_state", "to_state", "t_from", "t_to"])?;
    for e in &events {
        w.write_record([
            e.user_id.as_str(),
            e.from_state.as_str(),
            e.to_state.as_str(),
            &coronavis_core::corpus::format_timestamp(&e.t_from),
            &coronavis_core::corpus::format_timestamp(&e.t_to),
        ])?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(args.out_dir.join("weekly.csv"))?;
    w.write_record(["week_start", "week_end", "state", "movers"])?;
    for week in &weekly.weeks {
        for (state, n) in &week.counts {
            w.write_record([
                week.week_start.to_string(),
                week.week_end.to_string(),
                state.as_str().to_string(),
                n.to_string(),
            ])?;
        }
    }
    w.flush()?;

    let cases = args.cases.or(config.mobility.case_counts);
    if let Some(path) = cases {
        let f = fs::File::open(&path).with_context(|| format!("opening {}", path.display()))?;
        let infections = ingest_case_counts(f, WeekBins::new(epoch, 0))?;
        let rows = lagged_join(&weekly.weeks, &infections, args.lag);
        let mut w = csv::Writer::from_path(args.out_dir.join("lagged_join.csv"))?;
        w.write_record(["state", "week_start", "mobility_week_start", "mobility", "cases"])?;
        for r in &rows {
            let source = r.week_start - chrono::Days::new(7 * args.lag as u64);
            w.write_record([
                r.state.as_str().to_string(),
                r.week_start.to_string(),
                source.to_string(),
                r.mobility.to_string(),
                r.cases.to_string(),
            ])?;
        }
        w.flush()?;
        match mobility_correlation(&rows) {
            Ok(c) => eprintln!("pooled pearson r = {:.6} over {} rows", c.pooled, rows.len()),
            Err(e) => eprintln!("correlation unavailable: {e}"),
        }
    }
    eprintln!("{} movements, {} outside the week bins", events.len(), weekly.overflow);
    Ok(())
}

async fn shutdown_signal() {
    let _ = tokio::signal::ctrl_c().await;
}

fn announce(addr: std::net::SocketAddr) {
    eprintln!("listening on http://{addr}");
}

async fn serve(args: ServeArgs) -> Result<()> {
    let mut config = args.config.load()?;
    if let Some(p) = args.port {
        config.port = p;
    }
    coronavis_service::serve(config, announce, shutdown_signal()).await?;
    Ok(())
}

async fn replay(args: ReplayArgs) -> Result<()> {
    let mut config = args.config.load()?;
    if let Some(p) = args.port {
        config.port = p;
    }
    let replay_config = ReplayConfig {
        data_dir: config.data_dir.clone(),
        speedup: args.speedup,
        start: args.start,
        end: args.end,
    };
    let summary =
        coronavis_service::serve_replay(config, replay_config, args.exit_when_done, announce, shutdown_signal())
            .await?;
    eprintln!("{}", serde_json::to_string(&summary)?);
    Ok(())
}

async fn query(args: QueryArgs) -> Result<()> {
    let mut params = Params::new();
    for kv in &args.params {
        let Some((k, v)) = kv.split_once('=') else {
            bail!("parameter `{kv}` is not key=value");
        };
        params = params.set(leak(k), v);
    }
    let client = Client::new(args.url);
    let value = client.get_json(&args.path, &params).await?;
    println!("{}", serde_json::to_string_pretty(&value)?);
    Ok(())
}

/// Query keys live for the whole (short) process.
fn leak(s: &str) -> &'static str {
    Box::leak(s.to_string().into_boxed_str())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest(a) => ingest(a),
        Command::Analyze(a) => analyze(a),
        Command::Lda(a) => lda(a),
        Command::Mobility(a) => mobility(a),
        Command::Serve(a) => runtime()?.block_on(serve(a)),
        Command::Replay(a) => runtime()?.block_on(replay(a)),
        Command::Query(a) => runtime()?.block_on(query(a)),
    }
}

fn runtime() -> Result<tokio::runtime::Runtime> {
    Ok(tokio::runtime::Builder::new_multi_thread().enable_all().build()?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_writer(io::stderr)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
