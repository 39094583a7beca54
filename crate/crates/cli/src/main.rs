mod report;

use std::panic;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use hybridrange::formats::{
    read_json, to_json_string, ChannelFile, CodeFile, MatrixFile, TupleFile, WitnessFile,
};
use hybridrange::hybrid::{
    bitflip_printed_sectors, bitflip_sectors, builtin_channel, choi_rank, error_tuple, find_code, guarantee,
    verify_code, xyz2_unitary, xyz3_isometry, BUILTIN_CHANNELS,
};
use hybridrange::linalg::pauli;
use hybridrange::range::{
    find, guarantee_dim_with_source, separation_instance, separation_window, single_range, single_witness,
    verify_witness, DEFAULT_VERIFY_TOL,
};
use hybridrange::{
    CertificateType, CodeOutcome, Error, HermitianMatrix, HermitianTuple, Outcome, PartialIsometry, QuantumChannel,
    Result, SearchOptions,
};
use serde_json::{json, Value};

use report::Report;

const THREADS_VAR: &str = "HYBRIDRANGE_THREADS";

#[derive(Parser)]
#[command(name = "hybridrange", version, about = "Joint rank-(k:p) matricial ranges and hybrid codes")]
struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Acceptance tolerance for residuals and code violations.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    restarts: Option<usize>,
    /// Iteration cap per restart.
    #[arg(long, global = true)]
    iters: Option<usize>,
    /// Write the JSON report (or generated artifact) here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Shape {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    p: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Interlacing box of a single Hermitian matrix.
    Range {
        #[arg(long)]
        matrix: PathBuf,
        #[command(flatten)]
        shape: Shape,
    },
    /// Is diag(t) in the range of a single Hermitian matrix?
    Member {
        #[arg(long)]
        matrix: PathBuf,
        #[command(flatten)]
        shape: Shape,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        t: Vec<f64>,
    },
    /// Frame realizing diag(t) for a single Hermitian matrix.
    Witness {
        #[arg(long)]
        matrix: PathBuf,
        #[command(flatten)]
        shape: Shape,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        t: Vec<f64>,
        /// Also write the witness file here.
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// Search the range of a tuple.
    Find {
        #[arg(long)]
        tuple: PathBuf,
        #[command(flatten)]
        shape: Shape,
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// Re-check a witness against a tuple, or a code against a channel.
    Verify {
        #[arg(long, requires = "witness", conflicts_with_all = ["channel", "code"])]
        tuple: Option<PathBuf>,
        #[arg(long, requires = "tuple")]
        witness: Option<PathBuf>,
        #[arg(long, requires = "code")]
        channel: Option<PathBuf>,
        #[arg(long, requires = "channel")]
        code: Option<PathBuf>,
    },
    /// Search for a hybrid code of a channel.
    ChannelFind {
        #[command(flatten)]
        source: ChannelSource,
        #[command(flatten)]
        shape: Shape,
        /// Also write the code file here.
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// Write instance, channel or fixture files.
    Gen {
        #[command(subcommand)]
        what: Gen,
    },
    /// Dimension that forces a nonempty range or a code.
    Guarantee {
        /// Choi rank of the channel.
        #[arg(long, conflicts_with = "m", required_unless_present = "m")]
        c: Option<usize>,
        /// Number of matrices in the tuple.
        #[arg(long)]
        m: Option<usize>,
        #[command(flatten)]
        shape: Shape,
    },
}

#[derive(Args)]
struct ChannelSource {
    #[arg(long, conflicts_with = "builtin", required_unless_present = "builtin")]
    channel: Option<PathBuf>,
    #[arg(long)]
    builtin: Option<String>,
    #[arg(long)]
    qubits: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    probs: Vec<f64>,
}

#[derive(Subcommand)]
enum Gen {
    /// Diagonal tuple separating the two ranges.
    Separation {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        n: usize,
    },
    /// Built-in channel as a channel file.
    Channel {
        name: String,
        #[arg(long)]
        qubits: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        probs: Vec<f64>,
    },
    /// Fixed frames and tuples: xyz2-unitary, xyz3-isometry, xyz4-tuple,
    /// xyz3-tuple, bitflip-code, bitflip-printed-code.
    Fixture { name: String },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let started = Instant::now();
    match panic::catch_unwind(|| run(&cli, started)) {
        Ok(Ok(code)) => ExitCode::from(code),
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(_) => {
            eprintln!("error: internal failure");
            ExitCode::from(2)
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Error::InvalidParameter(format!("{THREADS_VAR} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::InvalidParameter(e.to_string()))
}

fn options(cli: &Cli) -> Result<SearchOptions> {
    let mut opts = SearchOptions { seed: cli.seed, ..SearchOptions::default() };
    if let Some(tol) = cli.tol {
        opts.tol = tol;
    }
    if let Some(r) = cli.restarts {
        opts.restarts = r;
    }
    if let Some(i) = cli.iters {
        opts.max_iters = i;
    }
    opts.validate()?;
    Ok(opts)
}

fn run(cli: &Cli, started: Instant) -> Result<u8> {
    let opts = options(cli)?;
    let report = match &cli.command {
        Command::Range { matrix, shape } => range_cmd(matrix, shape)?,
        Command::Member { matrix, shape, t } => member_cmd(matrix, shape, t)?,
        Command::Witness { matrix, shape, t, save } => witness_cmd(matrix, shape, t, save.as_deref())?,
        Command::Find { tuple, shape, save } => find_cmd(tuple, shape, &opts, save.as_deref())?,
        Command::Verify { tuple: Some(tuple), witness: Some(witness), .. } => {
            verify_witness_cmd(tuple, witness, cli.tol)?
        }
        Command::Verify { channel: Some(channel), code: Some(code), .. } => verify_code_cmd(channel, code, &opts)?,
        Command::Verify { .. } => {
            return Err(Error::InvalidParameter(
                "verify needs --tuple with --witness, or --channel with --code".into(),
            ))
        }
        Command::ChannelFind { source, shape, save } => channel_find_cmd(source, shape, &opts, save.as_deref())?,
        Command::Gen { what } => return gen_cmd(what, cli.out.as_deref()),
        Command::Guarantee { c, m, shape } => guarantee_cmd(*c, *m, shape)?,
    };
    report.emit(cli.out.as_deref(), started)?;
    Ok(report.exit)
}

fn load_matrix(path: &Path) -> Result<HermitianMatrix> {
    read_json::<MatrixFile>(path)?.to_hermitian()
}

fn fmt_list(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| format!("{x:.6}")).collect();
    format!("({})", parts.join(", "))
}

fn witness_value(w: &hybridrange::Witness) -> Result<Value> {
    Ok(serde_json::to_value(WitnessFile::from_witness(w))?)
}

fn range_cmd(path: &Path, shape: &Shape) -> Result<Report> {
    let a = load_matrix(path)?;
    let rbox = single_range(&a, shape.k, shape.p)?;
    let empty = rbox.is_empty();
    let (verdict, exit) = if empty { ("empty", 1) } else { ("nonempty", 0) };
    let intervals: Vec<String> = rbox
        .lower
        .iter()
        .zip(&rbox.upper)
        .map(|(lo, hi)| format!("[{lo:.6}, {hi:.6}]"))
        .collect();
    Ok(Report::new("range", verdict, CertificateType::ExactInterlacing, exit)
        .payload(json!({
            "n": a.dim(),
            "k": shape.k,
            "p": shape.p,
            "lower": rbox.lower,
            "upper": rbox.upper,
            "empty": empty,
        }))
        .summary(format!("{verdict}, sorted entries within {}", intervals.join(" x "))))
}

fn member_cmd(path: &Path, shape: &Shape, t: &[f64]) -> Result<Report> {
    let a = load_matrix(path)?;
    if t.len() != shape.p {
        return Err(Error::InvalidParameter(format!("--t has {} entries, expected p = {}", t.len(), shape.p)));
    }
    let rbox = single_range(&a, shape.k, shape.p)?;
    let member = hybridrange::range::single_membership(&a, shape.k, shape.p, t);
    let (verdict, exit) = if member { ("member", 0) } else { ("not-member", 1) };
    Ok(Report::new("member", verdict, CertificateType::ExactInterlacing, exit)
        .payload(json!({ "t": t, "lower": rbox.lower, "upper": rbox.upper }))
        .summary(format!("{} is {}", fmt_list(t), if member { "a member" } else { "not a member" })))
}

fn witness_cmd(path: &Path, shape: &Shape, t: &[f64], save: Option<&Path>) -> Result<Report> {
    let a = load_matrix(path)?;
    match single_witness(&a, shape.k, shape.p, t) {
        Ok(w) => {
            if let Some(save) = save {
                std::fs::write(save, to_json_string(&WitnessFile::from_witness(&w))?)?;
            }
            Ok(Report::new("witness", "found", CertificateType::ExactInterlacing, 0)
                .payload(json!({ "witness": witness_value(&w)? }))
                .residual("witness", w.residual)
                .summary(format!("frame for {} with residual {:.3e}", fmt_list(t), w.residual)))
        }
        Err(Error::NotMember { .. }) => Ok(Report::new("witness", "not-member", CertificateType::ExactInterlacing, 1)
            .payload(json!({ "t": t }))
            .summary(format!("{} is outside the interlacing box", fmt_list(t)))),
        Err(e) => Err(e),
    }
}

fn find_cmd(path: &Path, shape: &Shape, opts: &SearchOptions, save: Option<&Path>) -> Result<Report> {
    let a = read_json::<TupleFile>(path)?.to_tuple()?;
    let outcome = match find(&a, shape.k, shape.p, opts) {
        Err(Error::BudgetExceeded { budget }) => {
            return Ok(Report::new("find", "not-found", CertificateType::SearchOnly, 1)
                .notes([format!("partition search stopped after {budget} LP solves")])
                .summary("search budget exhausted"))
        }
        other => other?,
    };
    match outcome {
        Outcome::Found { witness, certificate } => {
            if let Some(save) = save {
                std::fs::write(save, to_json_string(&WitnessFile::from_witness(&witness))?)?;
            }
            let rows: Vec<String> = (0..witness.p).map(|r| fmt_list(&witness.row(r))).collect();
            Ok(Report::new("find", "found", certificate, 0)
                .payload(json!({ "witness": witness_value(&witness)? }))
                .residual("witness", witness.residual)
                .summary(format!("rows {} with residual {:.3e}", rows.join(" "), witness.residual)))
        }
        Outcome::NotFound(nf) => {
            let verdict = if nf.is_certified_empty() { "empty" } else { "not-found" };
            Ok(Report::new("find", verdict, nf.certificate, 1)
                .payload(json!({ "depth": nf.depth }))
                .summary(if nf.is_certified_empty() { "range is empty" } else { "no witness found" })
                .notes(nf.notes))
        }
    }
}

fn verify_witness_cmd(tuple: &Path, witness: &Path, tol: Option<f64>) -> Result<Report> {
    let a = read_json::<TupleFile>(tuple)?.to_tuple()?;
    let file = read_json::<WitnessFile>(witness)?;
    if file.m != a.m() {
        return Err(Error::Schema(format!("witness `m` is {}, tuple has {} matrices", file.m, a.m())));
    }
    let w = file.reverify(&a, tol.unwrap_or(DEFAULT_VERIFY_TOL))?;
    let (verdict, exit) = if w.accepted { ("verified", 0) } else { ("rejected", 1) };
    Ok(Report::new("verify", verdict, CertificateType::SearchOnly, exit)
        .payload(json!({ "witness": witness_value(&w)? }))
        .residual("witness", w.residual)
        .summary(format!("residual {:.3e} against tolerance {:.1e}", w.residual, w.tol)))
}

fn code_value(cert: &hybridrange::CodeCertificate) -> Value {
    let lambdas: Vec<Vec<Vec<[f64; 2]>>> = cert
        .lambdas
        .iter()
        .map(|l| l.iter().map(|row| row.iter().map(|z| [z.re, z.im]).collect()).collect())
        .collect();
    json!({
        "lambdas": lambdas,
        "max_violation": cert.max_violation,
        "block_sum_violation": cert.block_sum_violation,
        "psd_defect": cert.psd_defect,
        "trace_defect": cert.trace_defect,
        "tol": cert.tol,
        "accepted": cert.accepted,
    })
}

fn verify_code_cmd(channel: &Path, code: &Path, opts: &SearchOptions) -> Result<Report> {
    let ch = read_json::<ChannelFile>(channel)?.to_channel()?;
    let code = read_json::<CodeFile>(code)?.to_code()?;
    let cert = verify_code(&ch, &code, opts.tol)?;
    let (verdict, exit) = if cert.accepted { ("verified", 0) } else { ("rejected", 1) };
    Ok(Report::new("verify", verdict, CertificateType::SearchOnly, exit)
        .payload(json!({ "certificate": code_value(&cert) }))
        .residual("max_violation", cert.max_violation)
        .residual("block_sum_violation", cert.block_sum_violation)
        .summary(format!("largest violation {:.3e} against tolerance {:.1e}", cert.max_violation, cert.tol)))
}

fn load_channel(source: &ChannelSource) -> Result<QuantumChannel> {
    match (&source.channel, &source.builtin) {
        (Some(path), _) => read_json::<ChannelFile>(path)?.to_channel(),
        (None, Some(name)) => builtin_channel(name, source.qubits, &source.probs),
        (None, None) => Err(Error::InvalidParameter("need --channel or --builtin".into())),
    }
}

fn channel_find_cmd(
    source: &ChannelSource,
    shape: &Shape,
    opts: &SearchOptions,
    save: Option<&Path>,
) -> Result<Report> {
    let ch = load_channel(source)?;
    let tuple = error_tuple(&ch)?;
    match find_code(&ch, shape.k, shape.p, opts)? {
        CodeOutcome::Found { code, certificate, witness, route } => {
            if let Some(save) = save {
                std::fs::write(save, to_json_string(&CodeFile::from_code(&code))?)?;
            }
            let rows: Vec<String> = (0..witness.p).map(|r| fmt_list(&witness.row(r))).collect();
            Ok(Report::new("channel-find", "found", route, 0)
                .payload(json!({
                    "m": tuple.m(),
                    "choi_rank": choi_rank(&ch),
                    "d": witness.d,
                    "code": serde_json::to_value(CodeFile::from_code(&code))?,
                    "certificate": code_value(&certificate),
                }))
                .residual("witness", witness.residual)
                .residual("max_violation", certificate.max_violation)
                .summary(format!(
                    "({}:{}) code, error tuple rows {}, violation {:.3e}",
                    shape.k,
                    shape.p,
                    rows.join(" "),
                    certificate.max_violation
                )))
        }
        CodeOutcome::NotFound(nf) => {
            let verdict = if nf.is_certified_empty() { "empty" } else { "not-found" };
            Ok(Report::new("channel-find", verdict, nf.certificate, 1)
                .payload(json!({ "m": tuple.m(), "choi_rank": choi_rank(&ch), "depth": nf.depth }))
                .summary(if nf.is_certified_empty() { "no such code exists" } else { "no code found" })
                .notes(nf.notes))
        }
    }
}

fn guarantee_cmd(c: Option<usize>, m: Option<usize>, shape: &Shape) -> Result<Report> {
    let (k, p) = (shape.k, shape.p);
    if k == 0 || p == 0 {
        return Err(Error::InvalidParameter("k and p must be at least 1".into()));
    }
    let (payload, n) = match (c, m) {
        (Some(c), _) => {
            let n = guarantee(c, k, p);
            (json!({ "c": c, "k": k, "p": p, "n": n }), n)
        }
        (None, Some(m)) => {
            let (n, source) = guarantee_dim_with_source(m, k, p);
            (json!({ "m": m, "k": k, "p": p, "n": n, "source": source }), n)
        }
        (None, None) => return Err(Error::InvalidParameter("need --c or --m".into())),
    };
    Ok(Report::new("guarantee", "computed", CertificateType::SearchOnly, 0)
        .payload(payload)
        .summary(format!("n = {n} suffices")))
}

fn xyz_tuple(qubits: usize) -> Result<HermitianTuple> {
    let ms = [pauli::x(), pauli::y(), pauli::z()]
        .iter()
        .map(|p| HermitianMatrix::new(pauli::tensor_power(p, qubits)))
        .collect::<Result<Vec<_>>>()?;
    HermitianTuple::new(ms)
}

fn gen_cmd(what: &Gen, out: Option<&Path>) -> Result<u8> {
    let (text, summary) = match what {
        Gen::Separation { m, k, p, n } => {
            let (lo, hi) = separation_window(*m, *k, *p);
            if *n < lo || *n >= hi {
                return Err(Error::OutsideWindow { n: *n, lo, hi });
            }
            let points = separation_instance(*m, *k, *p, *n)?;
            let tuple = HermitianTuple::from_diagonals(&points);
            (to_json_string(&TupleFile::from_tuple(&tuple))?, format!("separation tuple m={m} k={k} p={p} n={n}"))
        }
        Gen::Channel { name, qubits, probs } => {
            let ch = builtin_channel(name, *qubits, probs)?;
            (to_json_string(&ChannelFile::from_channel(&ch))?, format!("channel {name} on n = {}", ch.n()))
        }
        Gen::Fixture { name } => fixture(name)?,
    };
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    eprintln!("gen: {summary}");
    Ok(0)
}

fn fixture(name: &str) -> Result<(String, String)> {
    let witness_text = |a: &HermitianTuple, v: PartialIsometry, k: usize, p: usize| -> Result<String> {
        let w = verify_witness(a, &v, k, p, DEFAULT_VERIFY_TOL)?;
        to_json_string(&WitnessFile::from_witness(&w))
    };
    let text = match name {
        "xyz2-unitary" => witness_text(&xyz_tuple(4)?, PartialIsometry::new(xyz2_unitary())?, 4, 4)?,
        "xyz3-isometry" => witness_text(&xyz_tuple(3)?, xyz3_isometry(), 4, 1)?,
        "xyz4-tuple" => to_json_string(&TupleFile::from_tuple(&xyz_tuple(4)?))?,
        "xyz3-tuple" => to_json_string(&TupleFile::from_tuple(&xyz_tuple(3)?))?,
        "bitflip-code" => to_json_string(&CodeFile::from_code(&bitflip_sectors()))?,
        "bitflip-printed-code" => to_json_string(&CodeFile::from_code(&bitflip_printed_sectors()))?,
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown fixture {other:?}; channels ({}) go through `gen channel`",
                BUILTIN_CHANNELS.join(", ")
            )))
        }
    };
    Ok((text, format!("fixture {name}")))
}
