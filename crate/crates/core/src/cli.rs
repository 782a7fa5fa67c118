//! Command-line front end. Exit codes: 0 success or verified, 1 functional
//! mismatch or no valid encoding, 2 usage, parse or internal error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::warn;

use crate::extract::{
    default_threads, extract_all, verify, verify_extracted, ExtractOptions, IoMap, MappingError,
    DEFAULT_TERM_CEILING,
};
use crate::netlist::{parse_equations, parse_structural_verilog, Netlist};
use crate::report::{reveng_text, ExtractReport};
use crate::reveng::reverse_engineer;
use crate::scramble::scramble;
use crate::specgen::{
    generate_mastrovito, lookup, warn_if_uncataloged, xor_cost, GroundTruth, IrreduciblePoly,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

/// Header of the `bench` CSV.
pub const BENCH_HEADER: &str = "m,p,gates,T,wall_time_ms,peak_terms";

#[derive(Parser, Debug)]
#[command(
    name = "gfre",
    version,
    about = "Extract, verify and reverse engineer GF(2^m) multiplier netlists"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a Mastrovito multiplier, its ground truth and its spec.
    Generate(GenerateArgs),
    /// Extract the polynomial of every output.
    Extract(ExtractArgs),
    /// Check a multiplier against the spec for P(x).
    Verify(VerifyArgs),
    /// Recover bit order and P(x) from a netlist alone.
    Reveng(RevengArgs),
    /// Time extraction of generated multipliers across thread counts.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    /// By extension: `.v` is Verilog, anything else equations.
    Auto,
    Equations,
    Verilog,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Equations,
    Verilog,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Args, Debug)]
pub struct EngineArgs {
    /// Worker threads [default: hardware threads, at most 16].
    #[arg(short = 'T', long = "threads", value_parser = clap::value_parser!(u32).range(1..))]
    pub threads: Option<u32>,
    /// Abort an output whose expression exceeds this many terms.
    #[arg(long, default_value_t = DEFAULT_TERM_CEILING)]
    pub term_ceiling: usize,
}

impl EngineArgs {
    fn options(&self) -> ExtractOptions {
        ExtractOptions {
            threads: self.threads.map_or_else(default_threads, |t| t as usize),
            term_ceiling: self.term_ceiling,
        }
    }
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(short = 'm')]
    pub m: usize,
    /// Exponents of P(x), e.g. `4,1,0`. Defaults to the catalog entry.
    #[arg(short = 'p')]
    pub p: Option<String>,
    /// Catalog entry name, used when `-p` is absent.
    #[arg(long)]
    pub poly_name: Option<String>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Both)]
    pub format: OutputFormat,
    #[arg(short = 'o', long = "out-dir", default_value = ".")]
    pub out_dir: PathBuf,
    /// File stem [default: gf<m>].
    #[arg(long)]
    pub stem: Option<String>,
    /// Rename wires and shuffle lines before writing.
    #[arg(long)]
    pub scramble_seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct ExtractArgs {
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
    pub format: InputFormat,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    pub report: ReportFormat,
    /// Write the report here instead of stdout.
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
    pub format: InputFormat,
    /// Expected degree; checked against P(x) and the mapping.
    #[arg(short = 'm')]
    pub m: Option<usize>,
    /// Exponents of P(x). Taken from `--map` when absent.
    #[arg(short = 'p')]
    pub p: Option<String>,
    /// Ground-truth sidecar written by `generate`.
    #[arg(long)]
    pub map: Option<PathBuf>,
    /// Wire-name prefixes of A, B and Z, e.g. `a,b,z`.
    #[arg(long)]
    pub io_prefixes: Option<String>,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    pub report: ReportFormat,
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RevengArgs {
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
    pub format: InputFormat,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    pub report: ReportFormat,
    /// Ground-truth sidecar to compare the recovered encoding with.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Scramble the netlist (and the sidecar) before analysis.
    #[arg(long)]
    pub scramble_seed: Option<u64>,
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Degrees to generate.
    #[arg(short = 'm', value_delimiter = ',', default_value = "8,16,32")]
    pub m: Vec<usize>,
    /// Thread counts to time.
    #[arg(short = 'T', long = "threads", value_delimiter = ',', default_value = "1,2,4,8",
          value_parser = clap::value_parser!(u32).range(1..))]
    pub threads: Vec<u32>,
    /// Exponents of P(x); only with a single degree.
    #[arg(short = 'p')]
    pub p: Option<String>,
    #[arg(long, default_value_t = DEFAULT_TERM_CEILING)]
    pub term_ceiling: usize,
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn error(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_ERROR,
            message: message.into(),
        }
    }
}

type CliResult = Result<i32, Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run(args: impl IntoIterator<Item = impl Into<OsString> + Clone>) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with(
    args: impl IntoIterator<Item = impl Into<OsString> + Clone>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let result = match &cli.command {
        Command::Generate(a) => cmd_generate(a, out),
        Command::Extract(a) => cmd_extract(a, out),
        Command::Verify(a) => cmd_verify(a, out, err),
        Command::Reveng(a) => cmd_reveng(a, out, err),
        Command::Bench(a) => cmd_bench(a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn parse_poly(text: &str) -> Result<IrreduciblePoly, Failure> {
    let p: IrreduciblePoly = text
        .parse()
        .map_err(|e| Failure::error(format!("-p {text}: {e}")))?;
    warn_if_uncataloged(&p);
    Ok(p)
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::error(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::error(format!("{}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, target: Option<&Path>, text: &str) -> Result<(), Failure> {
    match target {
        Some(p) => write_file(p, text),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Failure::error(format!("stdout: {e}"))),
    }
}

/// Reads a netlist, choosing the parser by `format`.
pub fn load_netlist(path: &Path, format: InputFormat) -> Result<Netlist, Failure> {
    let text = read(path)?;
    let verilog = match format {
        InputFormat::Verilog => true,
        InputFormat::Equations => false,
        InputFormat::Auto => path.extension().is_some_and(|e| e == "v" || e == "sv"),
    };
    let parsed = if verilog {
        parse_structural_verilog(&text)
    } else {
        parse_equations(&text)
    };
    parsed.map_err(|e| Failure::error(format!("{}: {e}", path.display())))
}

fn load_truth(path: &Path) -> Result<GroundTruth, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| Failure::error(format!("{}: {e}", path.display())))
}

fn bus_name(name: &str) -> String {
    let split = name.find(|c: char| c.is_ascii_digit());
    match split {
        Some(i) if i > 0 && ["a", "b", "z"].contains(&&name[..i]) => {
            format!("{}[{}]", &name[..i], &name[i..])
        }
        _ => name.to_owned(),
    }
}

fn cmd_generate(a: &GenerateArgs, out: &mut dyn Write) -> CliResult {
    let p = match &a.p {
        Some(text) => parse_poly(text)?,
        None => lookup(a.m, a.poly_name.as_deref())
            .ok_or_else(|| Failure::error(format!("no catalog polynomial for m = {}; pass -p", a.m)))?,
    };
    if p.degree() != a.m {
        return Err(Failure::error(format!(
            "-m {} does not match deg P(x) = {}",
            a.m,
            p.degree()
        )));
    }
    let g = generate_mastrovito(&p);
    let (netlist, truth, scrambled) = match a.scramble_seed {
        Some(seed) => {
            let s = scramble(&g.netlist, &g.truth, seed).map_err(|e| Failure::error(e.to_string()))?;
            (s.netlist, s.truth, true)
        }
        None => (g.netlist.clone(), g.truth.clone(), false),
    };
    std::fs::create_dir_all(&a.out_dir)
        .map_err(|e| Failure::error(format!("{}: {e}", a.out_dir.display())))?;
    let stem = a.stem.clone().unwrap_or_else(|| format!("gf{}", a.m));
    let path = |ext: &str| a.out_dir.join(format!("{stem}.{ext}"));
    let json = |t: &GroundTruth| serde_json::to_string_pretty(t).expect("truth serializes");
    let mut written = Vec::new();

    if matches!(a.format, OutputFormat::Equations | OutputFormat::Both) {
        write_file(&path("eqn"), &netlist.to_equations())?;
        write_file(&path("truth.json"), &json(&truth))?;
        written.extend([path("eqn"), path("truth.json")]);
    }
    if matches!(a.format, OutputFormat::Verilog | OutputFormat::Both) {
        // Unscrambled ports become LSB-first buses a[0..], b[0..], z[0..].
        let (v, vt) = if scrambled {
            (netlist.clone(), truth.clone())
        } else {
            let order = |k: usize| (0..k).collect::<Vec<_>>();
            let v = netlist
                .relabeled(
                    bus_name,
                    &order(netlist.gates().len()),
                    &order(netlist.primary_inputs().len()),
                    &order(netlist.primary_outputs().len()),
                )
                .map_err(|e| Failure::error(e.to_string()))?;
            (v, truth.renamed(bus_name))
        };
        let module: String = stem
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
            .collect();
        write_file(&path("v"), &v.to_verilog(&module))?;
        write_file(&path("v.truth.json"), &json(&vt))?;
        written.extend([path("v"), path("v.truth.json")]);
    }

    let mut spec = String::new();
    let _ = writeln!(spec, "# P(x) = {}", p);
    for (i, z) in g.spec.outputs.iter().enumerate() {
        let _ = writeln!(spec, "z{i} = {}", z.to_text(g.netlist.vars()));
    }
    write_file(&path("spec.txt"), &spec)?;
    written.push(path("spec.txt"));

    let mut msg = format!(
        "P(x) = {p}\ngates: {} ({} AND, {} XOR; reduction XORs {})\n",
        netlist.gates().len(),
        netlist.count_gates(crate::netlist::GateType::And),
        netlist.count_gates(crate::netlist::GateType::Xor),
        xor_cost(&p)
    );
    for w in written {
        let _ = writeln!(msg, "wrote {}", w.display());
    }
    emit(out, None, &msg)?;
    Ok(EXIT_OK)
}

fn cmd_extract(a: &ExtractArgs, out: &mut dyn Write) -> CliResult {
    let n = load_netlist(&a.input, a.format)?;
    let r = extract_all(&n, &a.engine.options()).map_err(|e| Failure::error(e.to_string()))?;
    let rep = ExtractReport::new(&n, &r, None);
    let text = match a.report {
        ReportFormat::Text => rep.to_text(),
        ReportFormat::Json => rep.to_json() + "\n",
    };
    emit(out, a.output.as_deref(), &text)?;
    Ok(EXIT_OK)
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let n = load_netlist(&a.input, a.format)?;
    let truth = a.map.as_deref().map(load_truth).transpose()?;
    let io = match (&truth, &a.io_prefixes) {
        (Some(t), _) => IoMap::from_truth(&n, t),
        (None, Some(prefixes)) => match prefixes.split(',').map(str::trim).collect::<Vec<_>>()[..] {
            [pa, pb, pz] => IoMap::by_prefix(&n, pa, pb, pz),
            _ => {
                return Err(Failure::error(
                    "--io-prefixes takes three comma-separated prefixes",
                ))
            }
        },
        (None, None) => Err(MappingError::Missing),
    }
    .map_err(|e| Failure::error(format!("mapping: {e}")))?;
    let p = match (&a.p, &truth) {
        (Some(text), _) => parse_poly(text)?,
        (None, Some(t)) => IrreduciblePoly::from_exponents(&t.irreducible)
            .map_err(|e| Failure::error(format!("sidecar: {e}")))?,
        (None, None) => return Err(Failure::error("P(x) unknown: pass -p or --map")),
    };
    if let Some(m) = a.m {
        if m != p.degree() || m != io.m() {
            return Err(Failure::error(format!(
                "-m {m} disagrees with deg P(x) = {} or mapping width {}",
                p.degree(),
                io.m()
            )));
        }
    }
    let v = verify(&n, &p, &io, &a.engine.options()).map_err(|e| Failure::error(e.to_string()))?;
    let rep = ExtractReport::new(&n, &v.extraction, Some(&v.verdict));
    let text = match a.report {
        ReportFormat::Text => rep.to_text(),
        ReportFormat::Json => rep.to_json() + "\n",
    };
    emit(out, a.output.as_deref(), &text)?;
    if v.verdict.equal {
        Ok(EXIT_OK)
    } else {
        for r in v.verdict.mismatches() {
            let _ = writeln!(err, "mismatch at {} (position {})", r.name, r.position);
        }
        Ok(EXIT_MISMATCH)
    }
}

fn cmd_reveng(a: &RevengArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let mut n = load_netlist(&a.input, a.format)?;
    let mut truth = a.truth.as_deref().map(load_truth).transpose()?;
    if let Some(seed) = a.scramble_seed {
        let t = truth.clone().unwrap_or_else(|| GroundTruth {
            m: 0,
            irreducible: Vec::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        });
        let s = scramble(&n, &t, seed).map_err(|e| Failure::error(e.to_string()))?;
        n = s.netlist;
        truth = truth.map(|_| s.truth);
    }
    let rep = match reverse_engineer(&n, &a.engine.options()) {
        Ok(r) => r,
        Err(e) if e.is_structural() => {
            let _ = writeln!(err, "NoValidEncoding: {e}");
            return Ok(EXIT_MISMATCH);
        }
        Err(e) => return Err(Failure::error(e.to_string())),
    };
    let json = rep.to_json(&n);
    let text = match a.report {
        ReportFormat::Json => serde_json::to_string_pretty(&json).expect("report serializes") + "\n",
        ReportFormat::Text => reveng_text(&n, &rep),
    };
    emit(out, a.output.as_deref(), &text)?;
    let mut ok = rep.spec_check.equal;
    if let Some(t) = &truth {
        let c = json.compare(t);
        let _ = writeln!(err, "ground truth: {c:?}");
        ok &= c.all();
    }
    Ok(if ok { EXIT_OK } else { EXIT_MISMATCH })
}

fn cmd_bench(a: &BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    if a.p.is_some() && a.m.len() != 1 {
        return Err(Failure::error("-p needs exactly one degree"));
    }
    let mut csv = String::from(BENCH_HEADER);
    csv.push('\n');
    let mut code = EXIT_OK;
    for &m in &a.m {
        let p = match &a.p {
            Some(text) => parse_poly(text)?,
            None => {
                lookup(m, None).ok_or_else(|| Failure::error(format!("no catalog polynomial for m = {m}")))?
            }
        };
        if p.degree() != m {
            return Err(Failure::error(format!(
                "-m {m} does not match deg P(x) = {}",
                p.degree()
            )));
        }
        let g = generate_mastrovito(&p);
        let io = IoMap::from_truth(&g.netlist, &g.truth).map_err(|e| Failure::error(e.to_string()))?;
        let mut baseline = None;
        let mut t1_ms = None;
        for &t in &a.threads {
            let opts = ExtractOptions {
                threads: t as usize,
                term_ceiling: a.term_ceiling,
            };
            let start = Instant::now();
            let r = match extract_all(&g.netlist, &opts) {
                Ok(r) => r,
                Err(e) => {
                    let _ = writeln!(err, "m={m} T={t}: row aborted: {e}");
                    code = EXIT_ERROR;
                    continue;
                }
            };
            let ms = start.elapsed().as_secs_f64() * 1e3;
            let equal = verify_extracted(&g.netlist, &r, &p, &io)
                .map_err(|e| Failure::error(e.to_string()))?
                .equal;
            match &baseline {
                None => baseline = Some((r.clone(), equal)),
                Some((b, e)) => {
                    if !b.same_polynomials(&r) || *e != equal {
                        let _ = writeln!(err, "m={m} T={t}: result differs from the first thread count");
                        code = code.max(EXIT_MISMATCH);
                    }
                }
            }
            if !equal {
                let _ = writeln!(err, "m={m} T={t}: generated multiplier failed verification");
                code = code.max(EXIT_MISMATCH);
            }
            if t == 1 {
                t1_ms = Some(ms);
            }
            if t == 4 && m >= 32 {
                if let Some(base) = t1_ms {
                    if base / ms <= 1.0 {
                        warn!("m={m}: no speedup at T=4 ({base:.1} ms at T=1, {ms:.1} ms at T=4)");
                    }
                }
            }
            let _ = writeln!(
                csv,
                "{m},{p},{},{t},{ms:.3},{}",
                g.netlist.gates().len(),
                r.peak_terms()
            );
        }
    }
    emit(out, a.output.as_deref(), &csv)?;
    Ok(code)
}
