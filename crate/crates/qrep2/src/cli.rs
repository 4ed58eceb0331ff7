//! `qrep2 {build|verify|diagram|compare}`.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 usage or input error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qrep2_core::oracle::{invariant_compare, pbw_construct};
use qrep2_core::primitive::{arbitrate, Primitives};
use qrep2_core::verify::{default_tolerance, verify_all, verify_generators};
use qrep2_core::{assembly, build_diagram, Error, QParam, Region, RepLabel, Variant};

use crate::artifact::{self, ArtifactError};
use crate::report;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "qrep2", version, about = "Generator matrices of irreducible quantum sl(3) representations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Assemble the generators and write them out.
    Build(RunConfig),
    /// Check every relation and identity; exit 1 on any failure.
    Verify(RunConfig),
    /// Print the weight diagram.
    Diagram(RunConfig),
    /// Compare against the Gram-matrix oracle and arbitrate the closed forms.
    Compare(RunConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Matrixmarket,
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    #[arg(long)]
    pub p: Option<u32>,
    #[arg(long)]
    pub q: Option<u32>,
    /// Deformation parameter, t >= 0.
    #[arg(long, allow_negative_numbers = true, conflicts_with = "qdef")]
    pub t: Option<f64>,
    /// Multiplicative parameter; t = ln(qdef).
    #[arg(long)]
    pub qdef: Option<f64>,
    #[arg(long, default_value = "numeric_solver", value_parser = parse_variant)]
    pub variant: Variant,
    /// Base tolerance; 1e-9 by default, 1e-12 at t = 0.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Verify a previously built artifact (JSON file, or Matrix Market stem).
    #[arg(long, conflicts_with_all = ["p", "q", "t", "qdef"])]
    pub artifact: Option<PathBuf>,
    /// Machine-readable output.
    #[arg(long)]
    pub json: bool,
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    Variant::from_name(s).ok_or_else(|| {
        let names: Vec<_> = Variant::ALL.iter().map(|v| v.name()).collect();
        format!("unknown variant {s:?}; expected one of {}", names.join(", "))
    })
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Failed(_) => EXIT_FAIL,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidDeformation(_) | Error::Domain(_) | Error::TooLarge { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Failed(e.to_string()),
        }
    }
}

impl From<ArtifactError> for CliError {
    fn from(e: ArtifactError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl RunConfig {
    pub fn label(&self) -> Result<RepLabel, CliError> {
        match (self.p, self.q) {
            (Some(p), Some(q)) => Ok(RepLabel::new(p, q)),
            _ => Err(CliError::Usage("--p and --q are required".into())),
        }
    }

    pub fn deformation(&self) -> Result<QParam, CliError> {
        Ok(match (self.t, self.qdef) {
            (_, Some(qd)) => QParam::from_qdef(qd)?,
            (Some(t), None) => QParam::new(t)?,
            (None, None) => QParam::CLASSICAL,
        })
    }

    pub fn tolerance(&self, t: QParam) -> Result<f64, CliError> {
        match self.tol {
            Some(x) if !(x.is_finite() && x > 0.0) => Err(CliError::Usage(format!("--tol must be positive, got {x}"))),
            Some(x) => Ok(x),
            None => Ok(default_tolerance(t)),
        }
    }
}

/// Runs one command, writing to `out`; returns the exit code.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    match &cli.command {
        Command::Build(cfg) => build(cfg, out),
        Command::Verify(cfg) => verify(cfg, out),
        Command::Diagram(cfg) => diagram(cfg, out),
        Command::Compare(cfg) => compare(cfg, out),
    }
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes()).map_err(|e| CliError::Failed(format!("cannot write output: {e}")))
}

fn build(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, CliError> {
    let label = cfg.label()?;
    let t = cfg.deformation()?;
    let gen = assembly::assemble_with(label, t, cfg.variant)?;
    match cfg.format {
        Format::Json => {
            let text = artifact::to_json_string(&gen, Some(cfg.variant.name()));
            match &cfg.out {
                Some(path) => {
                    std::fs::write(path, text)
                        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
                    eprintln!("wrote {} (dim {})", path.display(), gen.dim());
                }
                None => write_out(out, &(text + "\n"))?,
            }
        }
        Format::Matrixmarket => {
            let stem = cfg
                .out
                .clone()
                .map(|p| artifact::mtx_stem(&p))
                .unwrap_or_else(|| PathBuf::from(format!("qrep2_p{}_q{}", label.p, label.q)));
            for path in artifact::write_mtx(&gen, &stem)? {
                eprintln!("wrote {}", path.display());
            }
        }
    }
    Ok(EXIT_PASS)
}

fn verify(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, CliError> {
    let rep = match &cfg.artifact {
        Some(path) => {
            let gen = artifact::read_artifact(path)?;
            verify_generators(&gen, cfg.tolerance(gen.t)?)
        }
        None => {
            let label = cfg.label()?;
            let t = cfg.deformation()?;
            let tol = cfg.tolerance(t)?;
            let prims = Primitives::new(build_diagram(label), cfg.variant, t)?;
            verify_all(&assembly::assemble_primitives(&prims), &prims, tol)
        }
    };
    if cfg.json {
        write_out(out, &(serde_json::to_string_pretty(&report::verification(&rep)).expect("json") + "\n"))?;
    } else {
        write_out(out, &rep.to_string())?;
        for c in rep.failures() {
            write_out(out, &format!("failed: {} (residual {:e} > {:e} at {})\n", c.name, c.residual, c.tolerance, c.location))?;
        }
    }
    Ok(if rep.passed() { EXIT_PASS } else { EXIT_FAIL })
}

fn diagram(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, CliError> {
    let d = build_diagram(cfg.label()?);
    if cfg.json {
        write_out(out, &(serde_json::to_string_pretty(&report::diagram(&d)).expect("json") + "\n"))?;
        return Ok(EXIT_PASS);
    }
    let mut text = format!("{:>3} {:>3} {:>4} {:>4} {:>4}  region\n", "k", "s", "h1", "h2", "mult");
    for pt in &d.points {
        let u = d.user_point(pt);
        text += &format!("{:>3} {:>3} {:>4} {:>4} {:>4}  {}\n", u.k, u.s, u.h1, u.h2, u.mult, d.region(pt.s).name());
    }
    text += &format!("{} points, dimension {}", d.points.len(), d.dimension());
    if d.swapped {
        text += &format!(" (built as ({},{}); regions refer to that frame)", d.label.p, d.label.q);
    }
    text.push('\n');
    write_out(out, &text)?;
    Ok(EXIT_PASS)
}

fn compare(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, CliError> {
    let label = cfg.label()?;
    let t = cfg.deformation()?;
    let tol = cfg.tolerance(t)?;
    let oracle = pbw_construct(label, t)?;
    let gen = assembly::assemble_with(label, t, cfg.variant)?;
    let inv = invariant_compare(&gen, &oracle, tol)?;
    let arb = arbitrate(&[label], &[t], 1e-10)?;
    if cfg.json {
        let v = serde_json::json!({
            "label": {"p": label.p, "q": label.q},
            "t": t.t(),
            "variant": cfg.variant.name(),
            "invariants": report::invariants(&inv),
            "arbitration": report::arbitration(&arb),
        });
        write_out(out, &(serde_json::to_string_pretty(&v).expect("json") + "\n"))?;
    } else {
        write_out(out, &format!("assembly ({}) against the Gram-matrix oracle, dim {}\n", cfg.variant, gen.dim()))?;
        write_out(out, &inv.to_string())?;
        for region in [Region::Left, Region::Right] {
            let survivors = arb.survivors(region);
            let verdict = match survivors.as_slice() {
                [] if arb.scores.iter().all(|s| s.region != region || s.transitions == 0) => {
                    String::from("no transitions (undecided)")
                }
                [] => String::from("no closed form matches the numeric solver"),
                vs => vs.iter().map(|v| v.name()).collect::<Vec<_>>().join(", "),
            };
            write_out(out, &format!("{} region closed form matching the numeric solver: {verdict}\n", region.name()))?;
        }
        write_out(out, if inv.passed() { "invariants: pass\n" } else { "invariants: FAIL\n" })?;
    }
    Ok(if inv.passed() { EXIT_PASS } else { EXIT_FAIL })
}

/// Parses `args`, runs, and reports errors on stderr.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(&cli, &mut lock) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("qrep2: {e}");
            e.exit_code()
        }
    }
}
