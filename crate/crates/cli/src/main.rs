use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use latin_parity::latin::{self, Filter, Limits};
use latin_parity::report::{Provenance, VerificationReport, VERSION};
use latin_parity::sums::{self, SumConfig, SumResult};
use latin_parity::verify::{self, Mode, Options};
use latin_parity::{pool, Error, ErrorClass};

#[derive(Parser, Debug)]
#[command(
    name = "latin-parity",
    version,
    about = "Exact checks of Latin-square parity identities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Worker threads for the parallel drivers (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON-lines result cache.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Recompute cache hits and fail unless they match byte for byte.
    #[arg(long, global = true, requires = "cache")]
    verify_cache: bool,
    /// Seed for randomized trials.
    #[arg(long, global = true, default_value_t = 2013)]
    seed: u64,
    /// Enable the heavy runs (2^25-term sums, order-5 pipeline).
    #[arg(long, global = true)]
    extended: bool,
    /// Raise the enumeration order cap (the hard cap is 6).
    #[arg(long, global = true)]
    max_order: Option<usize>,
    /// Omit elapsed times so repeated runs are byte-identical.
    #[arg(long, global = true)]
    no_timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate Latin squares of one order and report every count.
    Enumerate {
        #[arg(short = 'n', long = "order")]
        n: usize,
        #[arg(long, value_enum, default_value_t = FilterArg::All)]
        filter: FilterArg,
        /// Include every square (with its parities) in the report details.
        #[arg(long)]
        list: bool,
    },
    /// Exhaustive alternating sum over (0,1)-matrices.
    Sum {
        #[arg(long, value_enum)]
        mode: SumMode,
        #[arg(short = 'n', long = "order")]
        n: Option<usize>,
        #[arg(short = 'p', long = "prime")]
        p: Option<usize>,
    },
    /// Cross-route verification of one identity (or all that apply).
    Verify {
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(short = 'n', long = "order")]
        n: Option<usize>,
        #[arg(short = 'p', long = "prime")]
        p: Option<usize>,
        /// Random trials for the tuple-sum identity.
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Time enumeration and the alternating sums for one order.
    Bench {
        #[arg(short = 'n', long = "order")]
        n: usize,
    },
    /// Run the whole verification suite.
    Report,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum FilterArg {
    All,
    Reduced,
    NormalizedUnipotent,
}

impl From<FilterArg> for Filter {
    fn from(f: FilterArg) -> Filter {
        match f {
            FilterArg::All => Filter::All,
            FilterArg::Reduced => Filter::Reduced,
            FilterArg::NormalizedUnipotent => Filter::NormalizedUnipotent,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy)]
#[value(rename_all = "snake_case")]
enum SumMode {
    DetN,
    PerDet,
    Drisko,
    Classes,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
#[value(rename_all = "snake_case")]
enum ModeArg {
    PerN,
    DetN,
    PerDet,
    Drisko,
    Classes,
    Lemma32,
    Orbits,
    Zappa,
    Thm41,
    Prop42,
    All,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::PerN => Mode::PerN,
            ModeArg::DetN => Mode::DetN,
            ModeArg::PerDet => Mode::PerDet,
            ModeArg::Drisko => Mode::Drisko,
            ModeArg::Classes => Mode::Classes,
            ModeArg::Lemma32 => Mode::Lemma32,
            ModeArg::Orbits => Mode::Orbits,
            ModeArg::Zappa => Mode::Zappa,
            ModeArg::Thm41 => Mode::Thm41,
            ModeArg::Prop42 => Mode::Prop42,
            ModeArg::All => Mode::All,
        }
    }
}

/// Failure of a run, mapped onto the exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Compute(Error),
    Cache(String),
    Io(io::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Compute(e) => match e.class() {
                ErrorClass::InvalidArgument => 2,
                ErrorClass::ResourceCap => 3,
                ErrorClass::Internal => 4,
            },
            Failure::Cache(_) | Failure::Io(_) => 4,
        }
    }

    fn kind(&self) -> &'static str {
        match self.code() {
            2 => "invalid_argument",
            3 => "resource_cap",
            _ => "internal",
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) | Failure::Cache(m) => m.clone(),
            Failure::Compute(e) => e.to_string(),
            Failure::Io(e) => e.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn emit_error(f: &Failure) -> ExitCode {
    let err = json!({"error": {"kind": f.kind(), "exit_code": f.code(), "message": f.message()}});
    eprintln!("{err}");
    ExitCode::from(f.code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            return emit_error(&Failure::Usage(
                e.kind().to_string() + ": " + &first_line(&e.to_string()),
            ));
        }
    };
    match run(&cli) {
        Ok(reports) => {
            if let Err(e) = write_output(&cli.global, &reports) {
                return emit_error(&Failure::Io(e));
            }
            if reports.iter().any(|r| r.status.is_failure()) {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(f) => emit_error(&f),
    }
}

fn first_line(s: &str) -> String {
    s.lines()
        .next()
        .unwrap_or_default()
        .trim_start_matches("error: ")
        .to_string()
}

fn options(g: &Global) -> Result<Options, Failure> {
    let limits = match g.max_order {
        Some(0) => return Err(Failure::Usage("--max-order must be positive".into())),
        Some(m) => Limits::with_max_order(m),
        None => Limits::default(),
    };
    Ok(Options {
        threads: g.threads,
        limits,
        extended: g.extended,
        seed: g.seed,
        ..Options::default()
    })
}

fn run(cli: &Cli) -> Result<Vec<VerificationReport>, Failure> {
    let g = &cli.global;
    let mut opts = options(g)?;
    match &cli.command {
        Command::Enumerate { n, filter, list } => {
            let key = json!({"command": "enumerate", "n": n, "filter": format!("{filter:?}"), "list": list, "max_order": opts.limits.max_order});
            cached(g, key, || {
                enumerate_report(*n, (*filter).into(), *list, &opts)
            })
        }
        Command::Sum { mode, n, p } => {
            let key = json!({"command": "sum", "mode": format!("{mode:?}"), "n": n, "p": p, "extended": g.extended});
            cached(g, key, || sum_report(*mode, *n, *p, &opts))
        }
        Command::Verify { mode, n, p, trials } => {
            opts.prop42_trials = *trials;
            let mode: Mode = (*mode).into();
            let key = json!({"command": "verify", "mode": mode.name(), "n": n, "p": p, "seed": g.seed, "trials": trials, "extended": g.extended});
            cached(g, key, || Ok(verify::run(mode, *n, *p, &opts)?))
        }
        Command::Bench { n } => Ok(vec![bench_report(*n, &opts)?]),
        Command::Report => {
            let key = json!({"command": "report", "seed": g.seed, "extended": g.extended});
            cached(g, key, || suite(&opts))
        }
    }
}

fn enumerate_report(
    n: usize,
    filter: Filter,
    list: bool,
    opts: &Options,
) -> Result<Vec<VerificationReport>, Failure> {
    let started = Instant::now();
    let (counts, threads) = pool::with_threads(opts.threads, || {
        (
            latin::count_summary(n, opts.limits),
            pool::current_threads(),
        )
    });
    let c = counts.map_err(Error::from)?;
    let mut r = VerificationReport::new("enumerate")
        .param("n", n)
        .param(
            "filter",
            serde_json::to_value(filter).expect("filter serializes"),
        )
        .computed("total", c.total)
        .computed("even", c.even)
        .computed("odd", c.odd)
        .computed("even_minus_odd", c.even_minus_odd)
        .computed("reduced", c.reduced_even + c.reduced_odd)
        .computed("reduced_even_minus_odd", c.reduced_even_minus_odd)
        .computed("normalized_unipotent", c.unipotent_even + c.unipotent_odd)
        .computed("at", c.at)
        .computed("reduced_pp", c.reduced_pp)
        .computed("reduced_pm", c.reduced_pm)
        .computed("reduced_mp", c.reduced_mp)
        .computed("reduced_mm", c.reduced_mm)
        .expect(
            "even_minus_odd",
            c.even as i64 - c.odd as i64,
            Provenance::Trivial,
        );
    if list {
        let mut listed = 0u64;
        for sq in latin::enumerate(n, filter, opts.limits).map_err(Error::from)? {
            let prof = sq.parity_profile();
            r = r.detail(json!({
                "rows": sq.to_rows(),
                "row_sign": prof.row_sign,
                "col_sign": prof.col_sign,
                "symbol_sign": prof.symbol_sign,
                "total_sign": prof.total_sign,
            }));
            listed += 1;
        }
        r = r.computed("listed", listed);
    }
    Ok(vec![r.finish().with_timing(started.elapsed(), threads)])
}

fn sum_report(
    mode: SumMode,
    n: Option<usize>,
    p: Option<usize>,
    opts: &Options,
) -> Result<Vec<VerificationReport>, Failure> {
    let started = Instant::now();
    let cfg = SumConfig::threads(opts.threads);
    let param = |v: Option<usize>, flag: &str| {
        v.ok_or_else(|| Failure::Usage(format!("sum --mode {mode:?} needs {flag}")))
    };
    let order = match mode {
        SumMode::DetN | SumMode::PerDet => param(n.or(p), "-n")?,
        SumMode::Drisko | SumMode::Classes => param(p.or(n), "-p")?,
    };
    if order >= 5 && !opts.extended && !matches!(mode, SumMode::Classes) {
        return Err(Error::from(sums::SumError::ResourceCap {
            what: "the 2^25-term sum without --extended",
            param: "n",
            value: order,
        })
        .into());
    }
    let result: SumResult = match mode {
        SumMode::DetN => sums::det_power_sum(order, &cfg),
        SumMode::PerDet => sums::per_det_sum(order, &cfg),
        SumMode::Drisko => sums::drisko_residue(order, &cfg),
        SumMode::Classes => sums::class_permanent_sum(order, &cfg),
    }
    .map_err(Error::from)?;
    let key = if matches!(mode, SumMode::DetN | SumMode::PerDet) {
        "n"
    } else {
        "p"
    };
    let mut r = VerificationReport::new(result.task.name())
        .param(key, order)
        .computed("raw_sum", result.raw_sum)
        .computed("term_count", result.term_count);
    if let Some(s) = result.scaled {
        r = r.computed("scaled_value", s.value());
    }
    if let Some(res) = result.residue_mod_p {
        r = r.computed("residue", res);
    }
    let enumerated = || -> Result<latin::CountSummary, Failure> {
        pool::with_threads(opts.threads, || latin::count_summary(order, opts.limits))
            .map_err(|e| Error::from(e).into())
    };
    r = match mode {
        SumMode::DetN => {
            let c = enumerated()?;
            r.expect("scaled_value", c.even_minus_odd, Provenance::Derived)
        }
        SumMode::PerDet => {
            let c = enumerated()?;
            r.expect("scaled_value", c.at, Provenance::Derived)
        }
        SumMode::Drisko => r
            .expect("residue", sums::DRISKO_DERIVED_RESIDUE, Provenance::Derived)
            .expect_as_printed("residue_as_printed", "residue", order - 1),
        SumMode::Classes => r.expect("residue", order - 1, Provenance::Paper),
    };
    Ok(vec![r
        .finish()
        .with_timing(started.elapsed(), result.threads)])
}

fn bench_report(n: usize, opts: &Options) -> Result<VerificationReport, Failure> {
    let started = Instant::now();
    let cfg = SumConfig::threads(opts.threads);
    let t = Instant::now();
    let (c, threads) = pool::with_threads(opts.threads, || {
        (
            latin::count_summary(n, opts.limits),
            pool::current_threads(),
        )
    });
    let c = c.map_err(Error::from)?;
    let mut r = VerificationReport::new("bench")
        .param("n", n)
        .computed("enumerate_ms", t.elapsed().as_millis())
        .computed("latin_squares", c.total);
    if n <= sums::MAX_SUM_ORDER && (n < 5 || opts.extended) {
        let d = sums::det_power_sum(n, &cfg).map_err(Error::from)?;
        r = r
            .computed("det_power_sum_ms", d.elapsed.as_millis())
            .computed(
                "det_power_scaled",
                d.scaled.map(|s| s.value()).unwrap_or_default(),
            )
            .expect("det_power_scaled", c.even_minus_odd, Provenance::Derived);
        if n % 2 == 1 {
            let s = sums::per_det_sum(n, &cfg).map_err(Error::from)?;
            r = r
                .computed("per_det_sum_ms", s.elapsed.as_millis())
                .computed(
                    "per_det_scaled",
                    s.scaled.map(|s| s.value()).unwrap_or_default(),
                )
                .expect("per_det_scaled", c.at, Provenance::Derived);
        }
    }
    Ok(r.finish().with_timing(started.elapsed(), threads))
}

/// Every check that fits the default budget, plus the heavy ones under `--extended`.
fn suite(opts: &Options) -> Result<Vec<VerificationReport>, Failure> {
    let mut out = Vec::new();
    for n in 1..=4 {
        out.extend(verify::run(Mode::All, Some(n), None, opts)?);
    }
    out.push(verify::zappa_report(5, opts)?);
    out.push(verify::drisko_check(5, opts)?);
    for p in [5, 7] {
        out.push(verify::lemma32_check(p)?);
    }
    out.push(verify::orbits_check(5, opts)?);
    if opts.extended {
        out.push(verify::macmahon_check(5, opts)?);
        out.push(verify::det_power_check(5, opts)?);
        out.push(verify::per_det_check(5, opts)?);
        out.push(verify::classes_check(5, opts)?);
    }
    Ok(out)
}

/// Cache record: `{"key": {..., "version"}, "payload": [...]}` per line.
fn cached(
    g: &Global,
    mut key: Value,
    compute: impl FnOnce() -> Result<Vec<VerificationReport>, Failure>,
) -> Result<Vec<VerificationReport>, Failure> {
    let Some(path) = &g.cache else {
        return compute();
    };
    key["version"] = json!(VERSION);
    let hit = lookup(path, &key)?;
    if let (Some(payload), false) = (&hit, g.verify_cache) {
        return reports_from_payload(payload);
    }
    let reports = compute()?;
    let payload = payload(&reports);
    match hit {
        Some(old) => {
            if serde_json::to_string(&old).unwrap() != serde_json::to_string(&payload).unwrap() {
                return Err(Failure::Cache(format!(
                    "cache entry for {key} differs from recomputation"
                )));
            }
        }
        None => {
            let mut f = OpenOptions::new().create(true).append(true).open(path)?;
            writeln!(f, "{}", json!({"key": key, "payload": payload}))?;
        }
    }
    Ok(reports)
}

fn payload(reports: &[VerificationReport]) -> Value {
    Value::Array(reports.iter().map(|r| r.to_json(false)).collect())
}

fn lookup(path: &Path, key: &Value) -> Result<Option<Value>, Failure> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    for line in BufReader::new(file).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: Value = serde_json::from_str(&line).map_err(|e| {
            Failure::Cache(format!("malformed cache line in {}: {e}", path.display()))
        })?;
        if rec.get("key") == Some(key) {
            return Ok(rec.get("payload").cloned());
        }
    }
    Ok(None)
}

/// Rebuilds reports from cached JSON; only the fields that reach the output
/// are restored.
fn reports_from_payload(payload: &Value) -> Result<Vec<VerificationReport>, Failure> {
    let bad = || Failure::Cache("cache payload is not a report list".into());
    let mut out = Vec::new();
    for v in payload.as_array().ok_or_else(bad)? {
        let r: VerificationReport = VerificationReport::from_json(v).ok_or_else(bad)?;
        out.push(r);
    }
    Ok(out)
}

fn write_output(g: &Global, reports: &[VerificationReport]) -> io::Result<()> {
    let timing = !g.no_timing;
    let text = match g.format {
        Format::Json => {
            let v = if reports.len() == 1 {
                reports[0].to_json(timing)
            } else {
                Value::Array(reports.iter().map(|r| r.to_json(timing)).collect())
            };
            serde_json::to_string_pretty(&v).expect("json") + "\n"
        }
        Format::Csv => {
            let mut s = String::from("task,quantity,computed,expected,provenance,status\n");
            for r in reports {
                for row in r.csv_rows() {
                    s.push_str(&row.map(|f| csv_field(&f)).join(","));
                    s.push('\n');
                }
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for r in reports {
                s.push_str(&r.summary_line());
                s.push('\n');
                for (k, got, want) in r.mismatches() {
                    s.push_str(&format!(
                        "  mismatch {k}: computed {} expected {want}\n",
                        got.unwrap_or_else(|| "-".into())
                    ));
                }
                for n in &r.notes {
                    s.push_str(&format!("  note: {n}\n"));
                }
            }
            s
        }
    };
    match &g.out {
        Some(path) => std::fs::write(path, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
