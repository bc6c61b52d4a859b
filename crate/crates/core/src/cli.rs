//! Command-line front end. `run` turns a [`RunConfig`] into an exit code
//! and a report; the binary only parses arguments and writes the result.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::dsl::{parse_expr, SymbolSpec};
use crate::error::{Error, Result};
use crate::func::TreeFunction;
use crate::multop::{Analyzer, Verdict};
use crate::tail::TailPolicy;
use crate::tree::{Tree, TreeSpec};
use crate::verify::{verify_space, verify_weights, CheckReport};
use crate::weights::WeightTable;

pub const SCHEMA: u32 = 1;
/// Tree used when none is given and the input depends on depth only.
pub const DEFAULT_RADIAL_TREE: &str = "regular:q=1,depth=256";
/// Tree used when none is given and the input has vertex patches.
pub const DEFAULT_BRANCHING_TREE: &str = "regular:q=2,depth=12";

#[derive(Debug, Parser)]
#[command(name = "treelip", version, about = "Iterated-log Lipschitz norms and multiplication operators on rooted trees")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a generated tree in the line format.
    GenTree {
        /// `regular:q=<int>,depth=<int>` or `random:seed=<int>,max=<int>,depth=<int>`
        spec: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// ‖f‖_k of a function given as a file or as `dsl: <symbol>`.
    Norm {
        #[arg(long)]
        func: String,
        #[command(flatten)]
        common: Common,
    },
    /// Boundedness, compactness and bounded-belowness of M_ψ.
    Classify(SymbolArgs),
    /// Point spectrum and spectrum of M_ψ.
    Spectrum(SymbolArgs),
    /// Essential-norm sandwich with its window history.
    Essnorm {
        #[command(flatten)]
        symbol: SymbolArgs,
        /// Plateau exponent for the lower-bound witness.
        #[arg(long, default_value_t = 0.5)]
        p: f64,
    },
    /// Weight-chain invariants over 1 ≤ n ≤ max-n.
    VerifyWeights {
        #[arg(long, default_value_t = 6)]
        k: usize,
        #[arg(long, default_value_t = 100_000)]
        max_n: u64,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        pretty: bool,
    },
    /// Function-space invariants on seeded random trees.
    VerifySpace {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 12)]
        max_depth: usize,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// Generator spec or path to a tree file.
    #[arg(long)]
    pub tree: Option<String>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 8)]
    pub window: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Render a plain-text table instead of JSON.
    #[arg(long)]
    pub pretty: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SymbolArgs {
    #[arg(long, conflicts_with = "symbol", required_unless_present = "symbol")]
    pub symbol_file: Option<PathBuf>,
    /// Inline symbol text; commas separate lines.
    #[arg(long)]
    pub symbol: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    GenTree,
    Norm,
    Classify,
    Spectrum,
    Essnorm,
    VerifyWeights,
    VerifySpace,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Source {
    #[serde(rename = "file")]
    File(PathBuf),
    #[serde(rename = "inline")]
    Inline(String),
}

/// Everything a run depends on; embedded verbatim in each JSON report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub tree: Option<String>,
    pub source: Option<Source>,
    pub k: Option<usize>,
    pub window: usize,
    pub tol: f64,
    pub seed: u64,
    pub max_n: Option<u64>,
    pub count: Option<usize>,
    pub max_depth: Option<usize>,
    pub p: Option<f64>,
    #[serde(skip)]
    pub output: Option<PathBuf>,
    #[serde(skip)]
    pub pretty: bool,
}

impl RunConfig {
    fn base(command: CommandKind, c: Common) -> Self {
        RunConfig {
            command,
            tree: c.tree,
            source: None,
            k: c.k,
            window: c.window,
            tol: c.tol,
            seed: c.seed,
            max_n: None,
            count: None,
            max_depth: None,
            p: None,
            output: c.output,
            pretty: c.pretty,
        }
    }

    fn symbol(command: CommandKind, s: SymbolArgs) -> Self {
        let source = match (s.symbol_file, s.symbol) {
            (Some(path), _) => Some(Source::File(path)),
            (None, Some(text)) => Some(Source::Inline(text)),
            (None, None) => None,
        };
        RunConfig {
            source,
            ..Self::base(command, s.common)
        }
    }

    fn validate(&self) -> Result<()> {
        if self.k == Some(0) {
            return Err(Error::InvalidParameter("k must be >= 1".into()));
        }
        if self.window < 2 {
            return Err(Error::InvalidParameter(format!("window must be >= 2, got {}", self.window)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tolerance must be > 0, got {}", self.tol)));
        }
        Ok(())
    }

    fn policy(&self) -> TailPolicy {
        TailPolicy::new(self.window, self.tol)
    }
}

impl From<Cli> for RunConfig {
    fn from(cli: Cli) -> Self {
        match cli.command {
            Command::GenTree { spec, output } => RunConfig {
                tree: Some(spec),
                output,
                ..Self::base(CommandKind::GenTree, Common::empty())
            },
            Command::Norm { func, common } => {
                let source = match func.strip_prefix("dsl:") {
                    Some(text) => Source::Inline(text.trim().to_string()),
                    None => Source::File(func.into()),
                };
                RunConfig {
                    source: Some(source),
                    ..Self::base(CommandKind::Norm, common)
                }
            }
            Command::Classify(s) => Self::symbol(CommandKind::Classify, s),
            Command::Spectrum(s) => Self::symbol(CommandKind::Spectrum, s),
            Command::Essnorm { symbol, p } => RunConfig {
                p: Some(p),
                ..Self::symbol(CommandKind::Essnorm, symbol)
            },
            Command::VerifyWeights { k, max_n, output, pretty } => RunConfig {
                k: Some(k),
                max_n: Some(max_n),
                output,
                pretty,
                ..Self::base(CommandKind::VerifyWeights, Common::empty())
            },
            Command::VerifySpace { common, count, max_depth } => RunConfig {
                count: Some(count),
                max_depth: Some(max_depth),
                ..Self::base(CommandKind::VerifySpace, common)
            },
        }
    }
}

impl Common {
    fn empty() -> Self {
        Common {
            tree: None,
            k: None,
            window: 8,
            tol: 1e-3,
            output: None,
            pretty: false,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// 0 definite, 2 some verdict inconclusive, 1 failed verification.
    pub code: i32,
    pub body: String,
}

/// Accepts a generator spec, otherwise reads a tree file.
pub fn load_tree(src: &str) -> Result<Tree> {
    match src.parse::<TreeSpec>() {
        Ok(spec) => spec.build(),
        Err(_) if std::path::Path::new(src).exists() => Tree::from_text(&std::fs::read_to_string(src)?),
        Err(e) => Err(e),
    }
}

fn tree_for(config: &RunConfig, radial: bool) -> Result<(Tree, String)> {
    let desc = config.tree.clone().unwrap_or_else(|| {
        if radial { DEFAULT_RADIAL_TREE } else { DEFAULT_BRANCHING_TREE }.to_string()
    });
    Ok((load_tree(&desc)?, desc))
}

fn read_source(source: &Option<Source>) -> Result<String> {
    match source {
        Some(Source::File(path)) => Ok(std::fs::read_to_string(path)?),
        Some(Source::Inline(text)) => Ok(text.clone()),
        None => Err(Error::InvalidParameter("no symbol or function given".into())),
    }
}

/// A symbol spec, or failing that a bare expression such as `1/n`.
fn parse_symbol(text: &str) -> Result<SymbolSpec> {
    match text.parse::<SymbolSpec>() {
        Ok(s) => Ok(s),
        Err(e) => parse_expr(text).map(SymbolSpec::radial).map_err(|_| e.into()),
    }
}

/// Contents of a function file.
#[derive(Debug, Clone, PartialEq)]
pub enum FuncBody {
    Dsl(SymbolSpec),
    Values(Vec<(usize, Complex64)>),
}

/// Parses `func k=<int>` followed by `dsl <symbol>` or `<id> <re> [<im>]`
/// lines. The header is optional for inline input.
pub fn parse_function_file(text: &str) -> Result<(Option<usize>, FuncBody)> {
    let bad = |line: usize, msg: String| Error::Format {
        what: "function file",
        line,
        msg,
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .peekable();
    let mut k = None;
    if let Some(&(no, first)) = lines.peek() {
        if let Some(rest) = first.strip_prefix("func") {
            let value = rest
                .trim()
                .strip_prefix("k=")
                .and_then(|v| v.trim().parse::<usize>().ok())
                .ok_or_else(|| bad(no, format!("expected 'func k=<int>', found '{first}'")))?;
            k = Some(value);
            lines.next();
        }
    }
    let rest: Vec<(usize, &str)> = lines.collect();
    if let Some(&(no, first)) = rest.first() {
        if let Some(body) = first.strip_prefix("dsl") {
            let mut src = body.trim().to_string();
            for (_, l) in &rest[1..] {
                src.push('\n');
                src.push_str(l);
            }
            return parse_symbol(&src).map(|s| (k, FuncBody::Dsl(s))).map_err(|e| match e {
                Error::Parse(p) => bad(no + p.line - 1, p.to_string()),
                e => e,
            });
        }
    }
    if k.is_none() && !rest.is_empty() && !rest[0].1.chars().next().is_some_and(|c| c.is_ascii_digit()) {
        // inline text without the `dsl` keyword
        return Ok((None, FuncBody::Dsl(parse_symbol(text.trim())?)));
    }
    let mut values = Vec::with_capacity(rest.len());
    for (no, l) in rest {
        let parts: Vec<&str> = l.split_whitespace().collect();
        let num = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| bad(no, format!("'{s}' is not a finite number")))
        };
        let id = parts[0]
            .parse::<usize>()
            .map_err(|_| bad(no, format!("'{}' is not a vertex id", parts[0])))?;
        let z = match parts.len() {
            2 => Complex64::new(num(parts[1])?, 0.0),
            3 => Complex64::new(num(parts[1])?, num(parts[2])?),
            _ => return Err(bad(no, format!("expected '<id> <re> [<im>]', found '{l}'"))),
        };
        values.push((id, z));
    }
    Ok((k, FuncBody::Values(values)))
}

fn build_function<'t>(tree: &'t Tree, body: &FuncBody) -> Result<TreeFunction<'t>> {
    match body {
        FuncBody::Dsl(spec) => spec.evaluate(tree),
        FuncBody::Values(vals) => {
            let mut v = vec![Complex64::new(0.0, 0.0); tree.len()];
            for &(id, z) in vals {
                if !tree.contains(id) {
                    return Err(Error::UnknownVertex(id));
                }
                v[id] = z;
            }
            TreeFunction::new(tree, v)
        }
    }
}

fn envelope(config: &RunConfig, report: Value) -> Value {
    json!({
        "schema": SCHEMA,
        "command": config.command,
        "config": config,
        "report": report,
    })
}

fn render(config: &RunConfig, value: &Value) -> String {
    if config.pretty {
        let mut out = String::new();
        table(&mut out, "", value);
        out
    } else {
        let mut s = serde_json::to_string(value).expect("reports serialize");
        s.push('\n');
        s
    }
}

/// One `path  value` row per leaf; arrays of scalars stay on one row.
fn table(out: &mut String, path: &str, v: &Value) {
    let scalar = |v: &Value| !v.is_object() && !v.is_array();
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                table(out, &p, x);
            }
        }
        Value::Array(xs) if !xs.iter().all(scalar) => {
            for (i, x) in xs.iter().enumerate() {
                table(out, &format!("{path}[{i}]"), x);
            }
        }
        _ => {
            let _ = writeln!(out, "{path:<40} {v}");
        }
    }
}

fn checks_outcome(config: &RunConfig, report: CheckReport) -> Result<Outcome> {
    let code = if report.all_pass() { 0 } else { 1 };
    let body = if config.pretty {
        let mut s = String::new();
        for c in &report.checks {
            let _ = writeln!(
                s,
                "{:<4} {:<28} worst {:>12.4e}  threshold {:>9.1e}  {}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.worst_violation,
                c.threshold,
                c.range
            );
        }
        s
    } else {
        render(config, &envelope(config, serde_json::to_value(&report)?))
    };
    Ok(Outcome { code, body })
}

fn resolve_k(config: &RunConfig, from_file: Option<usize>) -> Result<usize> {
    match (config.k, from_file) {
        (Some(a), Some(b)) if a != b => Err(Error::InvalidParameter(format!(
            "--k {a} disagrees with the function file header k={b}"
        ))),
        (Some(k), _) | (None, Some(k)) => Ok(k),
        (None, None) => Ok(1),
    }
}

pub fn run(config: &RunConfig) -> Result<Outcome> {
    config.validate()?;
    let definite = |inconclusive: bool| if inconclusive { 2 } else { 0 };
    match config.command {
        CommandKind::GenTree => {
            let tree = load_tree(config.tree.as_deref().unwrap_or(DEFAULT_BRANCHING_TREE))?;
            Ok(Outcome {
                code: 0,
                body: tree.to_text(),
            })
        }
        CommandKind::VerifyWeights => {
            let report = verify_weights(config.k.unwrap_or(6), config.max_n.unwrap_or(100_000))?;
            checks_outcome(config, report)
        }
        CommandKind::VerifySpace => {
            let report = verify_space(
                config.k.unwrap_or(1),
                config.seed,
                config.count.unwrap_or(200),
                config.max_depth.unwrap_or(12),
            )?;
            checks_outcome(config, report)
        }
        CommandKind::Norm => {
            let (file_k, body) = parse_function_file(&read_source(&config.source)?)?;
            let k = resolve_k(config, file_k)?;
            let radial = matches!(&body, FuncBody::Dsl(s) if s.is_radial());
            let (tree, _) = tree_for(config, radial)?;
            let table = WeightTable::new(k, tree.depth_bound())?;
            let f = build_function(&tree, &body)?;
            let report = f.norm_k(&table)?;
            let body = render(config, &envelope(config, serde_json::to_value(&report)?));
            Ok(Outcome { code: 0, body })
        }
        CommandKind::Classify | CommandKind::Spectrum | CommandKind::Essnorm => {
            let spec = parse_symbol(&read_source(&config.source)?)?;
            let k = config.k.unwrap_or(1);
            let (tree, tree_desc) = tree_for(config, spec.is_radial())?;
            let table = WeightTable::new(k, tree.depth_bound())?;
            let psi = spec.evaluate(&tree)?;
            let analyzer = Analyzer::new(&psi, spec.tail_meta, &table, config.policy())?;
            let bounded = analyzer.classify_bounded().classification;
            let head = json!({
                "tree": tree_desc,
                "vertices": tree.len(),
                "symbol": spec.to_text(),
            });
            let (code, report) = match config.command {
                CommandKind::Classify => {
                    let r = analyzer.analyze()?;
                    (definite(r.any_inconclusive()), serde_json::to_value(&r)?)
                }
                _ if bounded.verdict == Verdict::No => {
                    return Err(Error::Precondition(format!(
                        "M_ψ is unbounded ({}); no spectrum or essential norm",
                        bounded.note
                    )))
                }
                CommandKind::Spectrum => match analyzer.spectrum() {
                    Ok(s) => {
                        let below = analyzer.bounded_below()?.classification;
                        let code = definite(below.verdict == Verdict::Inconclusive);
                        (code, json!({ "spectrum": s, "bounded_below": below }))
                    }
                    Err(Error::Precondition(msg)) => (2, json!({ "inconclusive": msg })),
                    Err(e) => return Err(e),
                },
                _ => {
                    let e = analyzer.essential_norm_bounds()?;
                    let w = analyzer.essnorm_lower_witness(config.p.unwrap_or(0.5))?;
                    let code = definite(bounded.verdict == Verdict::Inconclusive);
                    (code, json!({ "bounds": e, "witness": w }))
                }
            };
            let mut full = head;
            full["analysis"] = report;
            Ok(Outcome {
                code,
                body: render(config, &envelope(config, full)),
            })
        }
    }
}

/// Honours `TREELIP_THREADS` for the global thread pool.
pub fn init_threads() {
    if let Some(n) = std::env::var("TREELIP_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

/// Parses arguments, runs, writes the artifact and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    init_threads();
    let config = RunConfig::from(cli);
    match run(&config) {
        Ok(out) => {
            let written = match &config.output {
                Some(path) => std::fs::write(path, &out.body),
                None => {
                    print!("{}", out.body);
                    Ok(())
                }
            };
            match written {
                Ok(()) => out.code,
                Err(e) => {
                    eprintln!("error: {e}");
                    1
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
