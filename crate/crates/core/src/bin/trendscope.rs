//! Command-line front end. Exit codes: 0 success, 2 config error, 3 data
//! error, 4 numerical or domain error.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Parser, Subcommand, ValueEnum};

use trendscope::ingest::fred::{self, FredClient};
use trendscope::ingest::snapshot::FredFetch;
use trendscope::ingest::{snapshot_create, snapshot_load, write_csv, CreateOptions, SeriesSpec, Source};
use trendscope::report::{cmd_build, cmd_diagnose, cmd_sweep, cmd_table1, Config, ReportBundle, SweepRequest};
use trendscope::sensitivity::SweepMode;
use trendscope::series::{year_end, year_start, Annualization};
use trendscope::{Error, Frequency, Result, Unit, Window};

#[derive(Parser)]
#[command(name = "trendscope", version, about = "Sample-window sensitivity of macro trend estimates")]
struct Cli {
    /// Pinned snapshot directory.
    #[arg(long, global = true, default_value = "data/snapshot")]
    snapshot: PathBuf,
    /// Refuse all network access.
    #[arg(long, global = true)]
    offline: bool,
    /// JSON config; defaults apply to anything it leaves out.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for report files.
    #[arg(long, global = true, default_value = "report")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Start,
    End,
}

#[derive(Clone, Copy, ValueEnum)]
enum How {
    Mean,
    Last,
}

#[derive(Subcommand)]
enum Command {
    /// Download one FRED series as `date,value` CSV into --out.
    Fetch {
        #[arg(long)]
        series: String,
        #[arg(long)]
        start: Option<NaiveDate>,
        #[arg(long)]
        end: Option<NaiveDate>,
        /// a, q, m or d; FRED averages within each period.
        #[arg(long, value_parser = parse_freq, default_value = "m")]
        freq: Frequency,
    },
    /// Create a snapshot at --snapshot from a JSON list of series specs.
    Snapshot {
        #[arg(long)]
        specs: PathBuf,
        #[arg(long, default_value = "unlabelled")]
        vintage: String,
        /// Directory that CSV and BEA paths in the specs are relative to; defaults to the specs file's.
        #[arg(long)]
        base_dir: Option<PathBuf>,
        #[arg(long)]
        start: Option<NaiveDate>,
        #[arg(long)]
        end: Option<NaiveDate>,
    },
    /// Figures, sweeps, long-difference table and headline numbers.
    Build {
        /// First year of the figure trend window.
        #[arg(long)]
        start: Option<i32>,
        /// Last year of the figure trend window.
        #[arg(long)]
        end: Option<i32>,
    },
    /// Trend sensitivity to the sample start or end year.
    Sweep {
        #[arg(long)]
        series: String,
        #[arg(long, value_enum, default_value = "start")]
        mode: Mode,
        /// `1980..1989` (inclusive) or a comma list.
        #[arg(long, value_parser = parse_years)]
        years: Option<Years>,
        #[arg(long)]
        base: Option<i32>,
        /// Shared end date of a start sweep.
        #[arg(long)]
        end: Option<NaiveDate>,
        /// Shared start date of an end sweep.
        #[arg(long)]
        start: Option<NaiveDate>,
    },
    /// Rolling volatility next to influence and Cook's distance.
    Diagnose {
        #[arg(long)]
        series: Option<String>,
        #[arg(long)]
        start: Option<NaiveDate>,
        #[arg(long)]
        end: Option<NaiveDate>,
        #[arg(long)]
        vol_years: Option<u32>,
    },
    /// Long differences by sample end date.
    Table1 {
        #[arg(long)]
        span: Option<u32>,
        #[arg(long, value_enum)]
        annualization: Option<How>,
    },
}

fn parse_freq(s: &str) -> std::result::Result<Frequency, String> {
    match s {
        "a" => Ok(Frequency::Annual),
        "q" => Ok(Frequency::Quarterly),
        "m" => Ok(Frequency::Monthly),
        "d" => Ok(Frequency::Daily),
        _ => Err(format!("unknown frequency '{s}' (use a, q, m or d)")),
    }
}

#[derive(Clone)]
struct Years(Vec<i32>);

fn parse_years(s: &str) -> std::result::Result<Years, String> {
    year_list(s).map(Years)
}

fn year_list(s: &str) -> std::result::Result<Vec<i32>, String> {
    let num = |t: &str| t.trim().parse::<i32>().map_err(|_| format!("bad year '{t}'"));
    if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
        if a > b {
            return Err(format!("empty year range {s}"));
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(num).collect()
}

fn window(start: Option<NaiveDate>, end: Option<NaiveDate>, default: Window) -> Result<Window> {
    Window::new(start.unwrap_or(default.start()), end.unwrap_or(default.end()))
}

fn emit(bundle: &ReportBundle, out: &Path) -> Result<()> {
    bundle.write_to(out)?;
    let mut stdout = std::io::stdout().lock();
    for name in bundle.names() {
        // a closed pipe (`| head`) only ends the listing
        if writeln!(stdout, "{}", out.join(name).display()).is_err() {
            break;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    if cli.offline {
        fred::set_offline(true);
    }
    let mut cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    match cli.command {
        Command::Fetch { series, start, end, freq } => {
            let client = FredClient::from_env()?;
            let w = match (start, end) {
                (None, None) => None,
                (s, e) => Some(window(s, e, Window::new(year_start(1776), year_end(9999))?)?),
            };
            let payload = client.fetch(&series, w.as_ref(), Some(freq))?;
            let spec = SeriesSpec::new(&series, Source::Fred, &series, Unit::PercentPoints, freq);
            let load = fred::payload_to_series(&payload.body, &spec)?;
            std::fs::create_dir_all(&cli.out).map_err(|e| Error::io(&cli.out, e))?;
            let path = cli.out.join(format!("{series}.csv"));
            std::fs::write(&path, write_csv(&load.series)).map_err(|e| Error::io(&path, e))?;
            println!("{} ({} observations, {} missing dropped)", path.display(), load.series.len(), load.dropped);
        }
        Command::Snapshot { specs, vintage, base_dir, start, end } => {
            let text = std::fs::read_to_string(&specs).map_err(|e| Error::io(&specs, e))?;
            let list: Vec<SeriesSpec> =
                serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", specs.display())))?;
            let base_dir = base_dir.unwrap_or_else(|| specs.parent().map(Path::to_path_buf).unwrap_or_default());
            let window = match (start, end) {
                (None, None) => None,
                (s, e) => Some(window(s, e, Window::new(year_start(1776), year_end(9999))?)?),
            };
            let opts = CreateOptions { vintage, timestamp: None, base_dir, window };
            let client = if list.iter().any(|s| s.source == Source::Fred) {
                Some(FredClient::from_env()?)
            } else {
                None
            };
            let manifest = snapshot_create(&list, &cli.snapshot, &opts, client.as_ref().map(|c| c as &dyn FredFetch))?;
            println!("{} series pinned in {}", manifest.entries.len(), cli.snapshot.display());
        }
        Command::Build { start, end } => {
            let w = cfg.figure_window;
            cfg.figure_window = Window::new(
                start.map(year_start).unwrap_or(w.start()),
                end.map(year_end).unwrap_or(w.end()),
            )?;
            let snap = snapshot_load(&cli.snapshot)?;
            emit(&cmd_build(&cfg, &snap)?, &cli.out)?;
        }
        Command::Sweep { series, mode, years, base, end, start } => {
            let snap = snapshot_load(&cli.snapshot)?;
            let mut req = SweepRequest::from_config(&cfg, &series);
            if let Some(Years(y)) = years {
                req.years = y;
            }
            if let Some(b) = base {
                req.base_year = b;
            }
            match mode {
                Mode::Start => {
                    req.fixed = end.unwrap_or(cfg.sweep.end);
                }
                Mode::End => {
                    req.mode = SweepMode::EndSweep;
                    req.fixed = start.ok_or_else(|| Error::Config("--mode end needs --start".into()))?;
                }
            }
            emit(&cmd_sweep(&cfg, &snap, &req)?, &cli.out)?;
        }
        Command::Diagnose { series, start, end, vol_years } => {
            let snap = snapshot_load(&cli.snapshot)?;
            let d = &cfg.diagnose;
            let w = window(start, end, d.window)?;
            let series = series.unwrap_or_else(|| d.series.clone());
            emit(&cmd_diagnose(&cfg, &snap, &series, &w, vol_years.unwrap_or(d.vol_years))?, &cli.out)?;
        }
        Command::Table1 { span, annualization } => {
            if let Some(s) = span {
                cfg.table1.span = s;
            }
            if let Some(h) = annualization {
                cfg.annualization = match h {
                    How::Mean => Annualization::Mean,
                    How::Last => Annualization::Last,
                };
            }
            cfg.validate()?;
            let snap = snapshot_load(&cli.snapshot)?;
            emit(&cmd_table1(&cfg, &snap)?, &cli.out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.category().exit_code() as u8)
        }
    }
}
