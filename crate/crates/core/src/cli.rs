//! Command-line front end.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::algkit::AlgebraSpec;
use crate::cache::Cache;
use crate::chaincore::homology_map;
use crate::error::{Error, Result};
use crate::exactlin::{rank, Field, ScalarField, SparseMatrix};
use crate::theories::{AnyPipeline, HomologyTable, Pipeline, Theory, DEFAULT_CAP};
use crate::verify::{render_report, run_suite, Corpus, ReportFormat, RunConfig, Suite};
use crate::with_pipeline;

#[derive(Parser, Debug)]
#[command(name = "funho", version, about = "Exact HH, HC, HΓ and HΓC of small commutative algebras")]
pub struct Cli {
    /// json, csv or markdown
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// write output here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// worker threads (default: all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// refuse any chain space larger than this
    #[arg(long, global = true, default_value_t = DEFAULT_CAP as u64)]
    pub max_ambient_dim: u64,
    /// treat skipped checks as a resource failure (exit 3)
    #[arg(long, global = true)]
    pub strict: bool,
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// overrides FUNHO_CACHE_DIR
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Homology tables for algebras × fields × theories.
    Compute(ComputeArgs),
    /// Run a verification suite over a corpus.
    Verify(VerifyArgs),
    /// Dump a structure map as a matrix.
    Maps(MapsArgs),
    /// Inspect or clear the matrix cache.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Args, Debug)]
pub struct ComputeArgs {
    #[arg(long = "algebra", visible_alias = "algebras", value_delimiter = ',', required = true)]
    pub algebras: Vec<String>,
    #[arg(long = "coeff", visible_alias = "coeffs", value_delimiter = ',', default_value = "q")]
    pub coeffs: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "hh,hc,hgamma,hgammac")]
    pub theories: Vec<String>,
    #[arg(long, default_value_t = 3)]
    pub max_degree: usize,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// default: trunc:2, trunc:3, group:2, group:3, prod:2
    #[arg(long = "algebras", visible_alias = "algebra", value_delimiter = ',')]
    pub algebras: Option<Vec<String>>,
    /// default: q, f2, f3
    #[arg(long = "coeffs", visible_alias = "coeff", value_delimiter = ',')]
    pub coeffs: Option<Vec<String>>,
    #[arg(long, default_value_t = 3)]
    pub max_degree: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// random chains per degree and input
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Level {
    /// chain level for b, delta, stab, cone-c; homology level for I, S, B
    Auto,
    Chain,
    Homology,
}

#[derive(Args, Debug)]
pub struct MapsArgs {
    #[arg(long, default_value = "trunc:2")]
    pub algebra: String,
    #[arg(long, default_value = "q")]
    pub coeff: String,
    /// b, B, delta, stab, cone-c, I, S
    #[arg(long)]
    pub map: String,
    #[arg(long, default_value_t = 0)]
    pub degree: usize,
    #[arg(long, value_enum, default_value_t = Level::Auto)]
    pub level: Level,
}

#[derive(Subcommand, Debug)]
pub enum CacheAction {
    Stat,
    List,
    Clear,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapKind {
    HochschildB,
    ConnesB,
    Delta,
    Stab,
    ConeC,
    Inclusion,
    Periodicity,
}

impl FromStr for MapKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "b" => MapKind::HochschildB,
            "B" => MapKind::ConnesB,
            "delta" => MapKind::Delta,
            "stab" => MapKind::Stab,
            "cone-c" | "c" => MapKind::ConeC,
            "I" => MapKind::Inclusion,
            "S" => MapKind::Periodicity,
            other => return Err(Error::Parse(format!("unknown map {other:?} (b, B, delta, stab, cone-c, I, S)"))),
        })
    }
}

impl MapKind {
    fn name(&self) -> &'static str {
        match self {
            MapKind::HochschildB => "b",
            MapKind::ConnesB => "B",
            MapKind::Delta => "delta",
            MapKind::Stab => "stab",
            MapKind::ConeC => "cone-c",
            MapKind::Inclusion => "I",
            MapKind::Periodicity => "S",
        }
    }

    fn resolve(&self, level: Level) -> Level {
        match (level, self) {
            (Level::Auto, MapKind::Inclusion | MapKind::Periodicity | MapKind::ConnesB) => Level::Homology,
            (Level::Auto, _) => Level::Chain,
            (l, _) => l,
        }
    }
}

#[derive(Serialize)]
struct MapDump {
    algebra: String,
    field: String,
    map: String,
    degree: usize,
    level: String,
    source: String,
    target: String,
    rows: usize,
    cols: usize,
    rank: usize,
    entries: Vec<(usize, usize, String)>,
}

fn out_format(cli: &Cli, default: ReportFormat) -> Result<ReportFormat> {
    cli.format.as_deref().map_or(Ok(default), ReportFormat::from_str)
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(p, text)?;
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn cache_for(cli: &Cli) -> Option<Cache> {
    if cli.no_cache {
        return None;
    }
    Some(Cache::new(cli.cache_dir.clone().unwrap_or_else(Cache::default_dir)))
}

fn parse_list<T: FromStr<Err = Error>>(items: &[String]) -> Result<Vec<T>> {
    items.iter().filter(|s| !s.trim().is_empty()).map(|s| s.parse()).collect()
}

fn cached_table(cache: Option<&Cache>, any: &AnyPipeline, theory: Theory, max: usize, cap: u128) -> Result<HomologyTable> {
    let (module, field) = with_pipeline!(any, p => (p.fmod().descriptor(), p.field().kind().to_string()));
    let map = format!("table:{}:{max}:{cap}", theory.key());
    if let Some(t) = cache
        .and_then(|c| c.get_text(&module, &map, &field))
        .and_then(|t| serde_json::from_str::<HomologyTable>(&t).ok())
    {
        return Ok(t);
    }
    let t = any.table(theory, max)?;
    if let Some(c) = cache {
        let _ = c.put_text(&module, &map, &field, &serde_json::to_string(&t)?);
    }
    Ok(t)
}

fn render_tables(tables: &[HomologyTable], format: ReportFormat) -> Result<String> {
    Ok(match format {
        ReportFormat::Json => serde_json::to_string_pretty(tables)? + "\n",
        ReportFormat::Csv => {
            let mut s = String::from("theory,input,field,n,dim\n");
            for t in tables {
                for r in &t.rows {
                    let _ = writeln!(s, "{},{},{},{},{}", t.theory, t.input, t.field, r.n, r.dim);
                }
            }
            s
        }
        ReportFormat::Markdown => {
            let mut s = String::new();
            for t in tables {
                let _ = writeln!(s, "## {} of {} over {}\n", t.theory, t.input, t.field);
                s.push_str("| n | dim |\n|---|---|\n");
                for r in &t.rows {
                    let _ = writeln!(s, "| {} | {} |", r.n, r.dim);
                }
                let _ = writeln!(
                    s,
                    "\nchain complexes built through degree {}, largest space {}\n",
                    t.truncation.chain_top, t.truncation.largest_space
                );
            }
            s
        }
    })
}

fn cmd_compute(cli: &Cli, a: &ComputeArgs) -> Result<i32> {
    let cap = cli.max_ambient_dim as u128;
    let algebras: Vec<AlgebraSpec> = parse_list(&a.algebras)?;
    let fields: Vec<ScalarField> = parse_list(&a.coeffs)?;
    let theories: Vec<Theory> = parse_list(&a.theories)?;
    if algebras.is_empty() || fields.is_empty() || theories.is_empty() {
        return Err(Error::Invalid("need at least one algebra, field and theory".into()));
    }
    let format = out_format(cli, ReportFormat::Json)?;
    let cache = cache_for(cli);
    let mut tables = Vec::new();
    for spec in &algebras {
        for &field in &fields {
            let any = AnyPipeline::for_algebra(spec, field, cap)?;
            for &t in &theories {
                tables.push(cached_table(cache.as_ref(), &any, t, a.max_degree, cap)?);
            }
        }
    }
    emit(cli, &render_tables(&tables, format)?)?;
    Ok(0)
}

fn cmd_verify(cli: &Cli, a: &VerifyArgs) -> Result<i32> {
    let suite: Suite = a.suite.parse()?;
    let mut corpus = Corpus { max_degree: a.max_degree, ..Corpus::default() };
    if let Some(list) = &a.algebras {
        corpus.algebras = parse_list(list)?;
    }
    if let Some(list) = &a.coeffs {
        corpus.fields = parse_list(list)?;
    }
    let format = out_format(cli, ReportFormat::Json)?;
    let cfg = RunConfig { corpus, seed: a.seed, cap: cli.max_ambient_dim as u128, samples: a.samples };
    let report = run_suite(suite, &cfg)?;
    emit(cli, &render_report(&report, format)?)?;
    Ok(if report.failed() {
        1
    } else if cli.strict && report.skipped() {
        3
    } else {
        0
    })
}

struct Dumped<F: Field> {
    matrix: SparseMatrix<F>,
    source: String,
    target: String,
}

fn map_matrix<F: Field>(p: &Pipeline<F>, kind: MapKind, n: usize, level: Level) -> Result<Dumped<F>> {
    let need = |ok: bool, what: &str| {
        if ok {
            Ok(())
        } else {
            Err(Error::Invalid(format!("{} is not defined in degree {n}: {what}", kind.name())))
        }
    };
    let chain = level == Level::Chain;
    let (matrix, source, target) = match kind {
        MapKind::HochschildB => {
            need(n >= 1, "needs degree at least 1")?;
            let h = p.hochschild(n + 1)?;
            let d = h.d(n)?;
            if chain {
                (d, format!("C_{n}"), format!("C_{}", n - 1))
            } else {
                (homology_map(&d, &h.homology(n)?, &h.homology(n - 1)?)?, format!("HH_{n}"), format!("HH_{}", n - 1))
            }
        }
        MapKind::ConnesB => {
            if chain {
                (p.connes_b(n)?, format!("C_{n}"), format!("C_{}", n + 1))
            } else {
                let c = p.cyclic(n + 1)?;
                let h = p.hochschild(n + 2)?;
                let phi = p.connes_b(n)?.mul(&c.column_zero(n)?)?;
                (homology_map(&phi, &c.homology(n)?, &h.homology(n + 1)?)?, format!("HC_{n}"), format!("HH_{}", n + 1))
            }
        }
        MapKind::Delta => {
            need(n >= 1, "needs degree at least 1")?;
            let c = p.cube(n + 1)?;
            let d = c.complex().d(n)?;
            if chain {
                (d, format!("Q_{n}"), format!("Q_{}", n - 1))
            } else {
                (homology_map(&d, &c.homology(n)?, &c.homology(n - 1)?)?, format!("HΓ_{n}"), format!("HΓ_{}", n - 1))
            }
        }
        MapKind::Stab => {
            if chain {
                (p.cube(n + 1)?.stab_ambient(n)?, format!("G[{}]", n + 1), format!("G[{}]", 1usize << n))
            } else {
                let c = p.cube(n + 1)?;
                let h = p.hochschild(n + 2)?;
                (homology_map(&c.stab(n)?, &h.homology(n + 1)?, &c.homology(n)?)?, format!("HH_{}", n + 1), format!("HΓ_{n}"))
            }
        }
        MapKind::ConeC => {
            need(n == 0, "c is the degree 0 attaching map")?;
            let cone = p.cone(2)?;
            if chain {
                (cone.c.clone(), "F(0)".into(), "Q_0".into())
            } else {
                (crate::theories::five_term(&cone)?.bbar, "F(0)".into(), "HΓ_0".into())
            }
        }
        MapKind::Inclusion => {
            let c = p.cyclic(n + 1)?;
            let i = c.inclusion(n)?;
            if chain {
                (i, format!("C_{n}"), format!("Tot_{n}"))
            } else {
                let h = p.hochschild(n + 1)?;
                (homology_map(&i, &h.homology(n)?, &c.homology(n)?)?, format!("HH_{n}"), format!("HC_{n}"))
            }
        }
        MapKind::Periodicity => {
            need(n >= 2, "needs degree at least 2")?;
            let c = p.cyclic(n + 1)?;
            let s = c.periodicity(n)?;
            if chain {
                (s, format!("Tot_{n}"), format!("Tot_{}", n - 2))
            } else {
                (homology_map(&s, &c.homology(n)?, &c.homology(n - 2)?)?, format!("HC_{n}"), format!("HC_{}", n - 2))
            }
        }
    };
    Ok(Dumped { matrix, source, target })
}

fn render_map<F: Field>(d: &Dumped<F>, info: (&str, usize, Level), alg: &str, format: Option<ReportFormat>) -> Result<String> {
    let (map, degree, level) = info;
    let m = &d.matrix;
    let f = m.field();
    let level = if level == Level::Chain { "chain" } else { "homology" };
    let r = rank(m);
    Ok(match format {
        None => format!(
            "# {map} in degree {degree} ({level} level) over {}: {} -> {}, rank {r}\n{}",
            f.kind(),
            d.source,
            d.target,
            m.to_triplet_string()
        ),
        Some(ReportFormat::Json) => {
            let dump = MapDump {
                algebra: alg.into(),
                field: f.kind().to_string(),
                map: map.into(),
                degree,
                level: level.into(),
                source: d.source.clone(),
                target: d.target.clone(),
                rows: m.rows(),
                cols: m.cols(),
                rank: r,
                entries: m.triplets().into_iter().map(|(i, j, x)| (i, j, f.render_plain(&x))).collect(),
            };
            serde_json::to_string_pretty(&dump)? + "\n"
        }
        Some(ReportFormat::Csv) => {
            let mut s = String::from("row,col,value\n");
            for (i, j, x) in m.triplets() {
                let _ = writeln!(s, "{i},{j},{}", f.render_plain(&x));
            }
            s
        }
        Some(ReportFormat::Markdown) => {
            let mut s = format!(
                "{map} in degree {degree} ({level} level): {} -> {}, {}x{}, rank {r}\n\n| row | col | value |\n|---|---|---|\n",
                d.source,
                d.target,
                m.rows(),
                m.cols()
            );
            for (i, j, x) in m.triplets() {
                let _ = writeln!(s, "| {i} | {j} | {} |", f.render_plain(&x));
            }
            s
        }
    })
}

fn cmd_maps(cli: &Cli, a: &MapsArgs) -> Result<i32> {
    let kind: MapKind = a.map.parse()?;
    let spec: AlgebraSpec = a.algebra.parse()?;
    let field: ScalarField = a.coeff.parse()?;
    let format = cli.format.as_deref().map(ReportFormat::from_str).transpose()?;
    let level = kind.resolve(a.level);
    let any = AnyPipeline::for_algebra(&spec, field, cli.max_ambient_dim as u128)?;
    let cache = cache_for(cli);
    let text = with_pipeline!(&any, p => {
        let key = format!("map:{}@{}:{:?}", kind.name(), a.degree, level);
        let module = p.fmod().descriptor();
        let mut dumped = None;
        if let Some(c) = &cache {
            if let Some(text) = c.get_text(&module, &key, &field.to_string()) {
                if let Some((head, body)) = text.split_once('\n') {
                    if let (Some((s, t)), Ok(m)) = (head.split_once(" -> "), SparseMatrix::parse_triplets(p.field(), body)) {
                        dumped = Some(Dumped { matrix: m, source: s.to_string(), target: t.to_string() });
                    }
                }
            }
        }
        let d = match dumped {
            Some(d) => d,
            None => {
                let d = map_matrix(p, kind, a.degree, level)?;
                if let Some(c) = &cache {
                    let payload = format!("{} -> {}\n{}", d.source, d.target, d.matrix.to_triplet_string());
                    let _ = c.put_text(&module, &key, &field.to_string(), &payload);
                }
                d
            }
        };
        render_map(&d, (kind.name(), a.degree, level), &spec.to_string(), format)?
    });
    emit(cli, &text)?;
    Ok(0)
}

fn cmd_cache(cli: &Cli, action: &CacheAction) -> Result<i32> {
    let cache = Cache::new(cli.cache_dir.clone().unwrap_or_else(Cache::default_dir));
    let format = out_format(cli, ReportFormat::Json)?;
    let text = match action {
        CacheAction::Stat => {
            let s = cache.stat()?;
            match format {
                ReportFormat::Json => serde_json::to_string_pretty(&s)? + "\n",
                ReportFormat::Csv => format!("dir,entries,bytes\n{},{},{}\n", s.dir, s.entries, s.bytes),
                ReportFormat::Markdown => format!("cache {}: {} entries, {} bytes\n", s.dir, s.entries, s.bytes),
            }
        }
        CacheAction::List => {
            let l = cache.list()?;
            match format {
                ReportFormat::Json => serde_json::to_string_pretty(&l)? + "\n",
                _ => {
                    let mut s = String::from("key,bytes,valid,map,field\n");
                    for e in &l {
                        let _ = writeln!(
                            s,
                            "{},{},{},{},{}",
                            e.key,
                            e.bytes,
                            e.valid,
                            e.map.as_deref().unwrap_or(""),
                            e.field.as_deref().unwrap_or("")
                        );
                    }
                    s
                }
            }
        }
        CacheAction::Clear => {
            let n = cache.clear()?;
            format!("{{\"removed\": {n}}}\n")
        }
    };
    emit(cli, &text)?;
    Ok(0)
}

pub fn run(cli: &Cli) -> Result<i32> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build_global()
            .map_err(|e| Error::Invalid(format!("thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Compute(a) => cmd_compute(cli, a),
        Command::Verify(a) => cmd_verify(cli, a),
        Command::Maps(a) => cmd_maps(cli, a),
        Command::Cache { action } => cmd_cache(cli, action),
    }
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
