//! Command-line front end: load JSON fields, tilings, complexes, and minor
//! tuples; dispatch verifications and recurrences; emit machine-readable
//! reports.
//!
//! Exit codes: 0 on PASS/success, 1 on a verified FAIL (findings on stdout
//! as JSON), 2 on usage or input errors.

use clap::{Args, Parser, Subcommand, ValueEnum};
use kashaev::complex::{
    build_complex, check_complex_coherence, check_complex_kashaev, check_complex_khex,
    extend_on_complex, is_comfortable, Complex02Field, ComplexField, ComplexParts,
    DirectedComplex,
};
use kashaev::genrec::{check_gen, check_gen_coherence, make_instance, GridField, Instance};
use kashaev::kashaev::{
    check_coherence, check_kashaev, check_khex, extend_to_khex, run_positive_kashaev, KHexField3,
    VertexField3,
};
use kashaev::minors::{
    realizability_test, reconstruct_symmetric, signed_minor_tuple, MinorTuple, Realizability,
    SymMatrix,
};
use kashaev::report::{Finding, NumericMode, Report};
use kashaev::scalar::{Scalar, ToleranceContext};
use kashaev::tiling::{pile_from_admissible, DiamondTiling, Pile};
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "kashaev", version, about = "Kashaev equation and hexahedron recurrence toolkit")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalOpts {
    /// Force the numeric mode of loaded scalars
    #[arg(long, value_enum, global = true)]
    mode: Option<Mode>,
    /// Relative tolerance for float comparisons
    #[arg(long, global = true, default_value_t = 1e-9)]
    rel_tol: f64,
    /// Absolute tolerance for float comparisons
    #[arg(long, global = true, default_value_t = 1e-12)]
    abs_tol: f64,
    /// Thread count for per-cube checks (0 = rayon default)
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Write the primary JSON output to a file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Float,
}

#[derive(Subcommand)]
enum Command {
    /// Lattice fields: Kashaev equation, positive recurrence, extension
    #[command(subcommand)]
    Kashaev(KashaevCmd),
    /// Rhombic tilings of the 2n-gon and their piles
    #[command(subcommand)]
    Tiling(TilingCmd),
    /// Directed cubical complexes from piles
    #[command(subcommand)]
    Complex(ComplexCmd),
    /// Principal-minor tuples of symmetric matrices
    #[command(subcommand)]
    Minors(MinorsCmd),
    /// Generalized box-shaped recurrences
    #[command(subcommand)]
    Genrec(GenrecCmd),
}

#[derive(Subcommand)]
enum KashaevCmd {
    /// Check the Kashaev equation per cube (plus face conditions and the
    /// K-hexahedron equations when the field carries faces)
    Check { field: PathBuf },
    /// Run the positive Kashaev recurrence from an initial field
    Run {
        field: PathBuf,
        #[arg(long, default_value_t = 1)]
        steps: usize,
    },
    /// Extend a coherent solution to a K-hexahedron field
    Extend { field: PathBuf },
    /// Check coherence at every vertex with a complete neighborhood
    Coherence { field: PathBuf },
}

#[derive(Subcommand)]
enum TilingCmd {
    /// The minimal tiling (consecutive-interval labels)
    Min {
        #[arg(long)]
        n: u8,
    },
    /// The maximal tiling (co-interval labels)
    Max {
        #[arg(long)]
        n: u8,
    },
    /// Apply one flip to a tiling
    Flip {
        tiling: PathBuf,
        /// Triple as dash-separated elements, e.g. 1-2-3
        #[arg(long)]
        triple: String,
    },
    /// Build the pile of an admissible permutation from the minimal tiling
    Pile {
        #[arg(long)]
        n: u8,
        /// Comma-separated triples, e.g. "1-2-3,1-2-4,1-3-4,2-3-4"
        #[arg(long)]
        sigma: String,
    },
}

#[derive(Subcommand)]
enum ComplexCmd {
    /// Build the directed complex of a pile
    Build { pile: PathBuf },
    /// Kashaev equation and interior-vertex coherence on a complex (plus the
    /// K-hexahedron equations when the field carries faces)
    Check { complex: PathBuf, field: PathBuf },
    /// Decide comfortableness and report the GF(2) dimensions
    Comfortable { complex: PathBuf },
    /// Extend a coherent vertex field to a K-hexahedron field
    Extend { complex: PathBuf, field: PathBuf },
}

#[derive(Subcommand)]
enum MinorsCmd {
    /// Signed principal-minor tuple of a matrix (row-major JSON array)
    FromMatrix { matrix: PathBuf },
    /// Realizability test for a 2^n tuple
    Test { tuple: PathBuf },
    /// Reconstruct a symmetric matrix from a realizable tuple
    Reconstruct { tuple: PathBuf },
}

#[derive(Subcommand)]
enum GenrecCmd {
    /// Sweep the recurrence over a window from seeded boundary data
    Run {
        #[arg(long)]
        instance: String,
        /// Comma-separated parameters (rationals like -3, 1/2)
        #[arg(long, default_value = "")]
        params: String,
        /// Window as lo..hi per axis, e.g. "0:8" or "0,0:4,6"
        #[arg(long)]
        window: String,
        /// Grid JSON carrying the seed vertices (and optionally wall faces)
        init: PathBuf,
    },
    /// Verify the defining polynomial, face conditions, recurrence residuals,
    /// and coherence on a grid
    Verify {
        #[arg(long)]
        instance: String,
        #[arg(long, default_value = "")]
        params: String,
        grid: PathBuf,
    },
    /// Confirm the propagation-sign table on random sweeps
    Signs {
        #[arg(long)]
        instance: String,
        #[arg(long, default_value = "")]
        params: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let code = match run(&cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    };
    eprintln!("# elapsed_ms: {}", started.elapsed().as_millis());
    code
}

fn ctx_of(cli: &Cli) -> ToleranceContext {
    ToleranceContext::new(cli.global.rel_tol, cli.global.abs_tol)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn emit(cli: &Cli, value: &impl serde::Serialize) -> Result<(), String> {
    let text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    match &cli.global.out {
        Some(path) => fs::write(path, text + "\n").map_err(|e| e.to_string())?,
        None => println!("{text}"),
    }
    Ok(())
}

fn report_exit(cli: &Cli, report: &Report) -> Result<ExitCode, String> {
    emit(cli, report)?;
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn coerce_scalar(s: &Scalar, mode: Option<Mode>) -> Result<Scalar, String> {
    match mode {
        None | Some(Mode::Exact) if matches!(mode, Some(Mode::Exact)) && !s.is_exact() => {
            Err("--mode exact requires rational inputs".into())
        }
        Some(Mode::Float) => Ok(s.to_float()),
        _ => Ok(s.clone()),
    }
}

fn coerce_vertex_field(field: VertexField3, mode: Option<Mode>) -> Result<VertexField3, String> {
    let window = field.window;
    let values = field
        .iter()
        .map(|(p, v)| Ok((*p, coerce_scalar(v, mode)?)))
        .collect::<Result<_, String>>()?;
    VertexField3::new(window, values).map_err(|e| e.to_string())
}

fn run(cli: &Cli) -> Result<ExitCode, String> {
    #[cfg(feature = "parallel")]
    if cli.global.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.global.jobs)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    let ctx = ctx_of(cli);
    match &cli.command {
        Command::Kashaev(cmd) => run_kashaev(cli, cmd, &ctx),
        Command::Tiling(cmd) => run_tiling(cli, cmd),
        Command::Complex(cmd) => run_complex(cli, cmd, &ctx),
        Command::Minors(cmd) => run_minors(cli, cmd),
        Command::Genrec(cmd) => run_genrec(cli, cmd, &ctx),
    }
}

fn run_kashaev(cli: &Cli, cmd: &KashaevCmd, ctx: &ToleranceContext) -> Result<ExitCode, String> {
    match cmd {
        KashaevCmd::Check { field } => {
            let khex: KHexField3 = read_json(field)?;
            if khex.faces.is_empty() {
                let vf = coerce_vertex_field(khex.vertices, cli.global.mode)?;
                report_exit(cli, &check_kashaev(&vf, ctx))
            } else {
                let report = check_khex(&khex, ctx).map_err(|e| e.to_string())?;
                report_exit(cli, &report)
            }
        }
        KashaevCmd::Run { field, steps } => {
            let init: VertexField3 = read_json(field)?;
            let out = run_positive_kashaev(&init, *steps).map_err(|e| e.to_string())?;
            emit(cli, &out)?;
            Ok(ExitCode::SUCCESS)
        }
        KashaevCmd::Extend { field } => {
            let vf: VertexField3 = read_json(field)?;
            let vf = coerce_vertex_field(vf, cli.global.mode)?;
            let khex = extend_to_khex(&vf, ctx).map_err(|e| e.to_string())?;
            emit(cli, &khex)?;
            Ok(ExitCode::SUCCESS)
        }
        KashaevCmd::Coherence { field } => {
            let vf: VertexField3 = read_json(field)?;
            let vf = coerce_vertex_field(vf, cli.global.mode)?;
            let mut findings = Vec::new();
            let mut tested = 0usize;
            for (p, _) in vf.iter() {
                if let Ok(check) = check_coherence(&vf, *p, ctx) {
                    tested += 1;
                    if !check.ok {
                        findings.push(Finding::mismatch(
                            "coherence",
                            format!("vertex({},{},{})", p[0], p[1], p[2]),
                            check.lhs,
                            check.rhs,
                        ));
                    }
                }
            }
            if tested == 0 {
                return Err("no vertex has a complete 3x3x3 neighborhood".into());
            }
            report_exit(cli, &Report::new(vf.mode(), findings))
        }
    }
}

fn parse_triple(text: &str) -> Result<(u8, u8, u8), String> {
    let parts: Vec<u8> = text
        .split('-')
        .map(|p| p.trim().parse().map_err(|e| format!("bad triple {text:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if parts.len() != 3 {
        return Err(format!("triple {text:?} must have three elements"));
    }
    Ok((parts[0], parts[1], parts[2]))
}

fn run_tiling(cli: &Cli, cmd: &TilingCmd) -> Result<ExitCode, String> {
    match cmd {
        TilingCmd::Min { n } => {
            emit(cli, &DiamondTiling::minimal(*n).map_err(|e| e.to_string())?)?;
            Ok(ExitCode::SUCCESS)
        }
        TilingCmd::Max { n } => {
            emit(cli, &DiamondTiling::maximal(*n).map_err(|e| e.to_string())?)?;
            Ok(ExitCode::SUCCESS)
        }
        TilingCmd::Flip { tiling, triple } => {
            let t: DiamondTiling = read_json(tiling)?;
            let (next, record) = t
                .flip(parse_triple(triple)?)
                .map_err(|e| e.to_string())?;
            eprintln!(
                "# flip {:?} {:?}: removed {}, added {}",
                record.triple,
                record.direction,
                kashaev::tiling::label_string(record.removed),
                kashaev::tiling::label_string(record.added)
            );
            emit(cli, &next)?;
            Ok(ExitCode::SUCCESS)
        }
        TilingCmd::Pile { n, sigma } => {
            let triples: Vec<(u8, u8, u8)> = sigma
                .split(',')
                .map(parse_triple)
                .collect::<Result<_, _>>()?;
            let pile = pile_from_admissible(*n, &triples).map_err(|e| e.to_string())?;
            emit(cli, &pile)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn load_complex_field(path: &PathBuf) -> Result<Complex02Field, String> {
    #[derive(serde::Deserialize)]
    struct FieldJson {
        values: ComplexField,
        #[serde(default)]
        faces: std::collections::BTreeMap<usize, Scalar>,
    }
    let raw: FieldJson = read_json(path)?;
    Ok(Complex02Field {
        vertices: raw.values,
        faces: raw.faces,
    })
}

fn run_complex(cli: &Cli, cmd: &ComplexCmd, ctx: &ToleranceContext) -> Result<ExitCode, String> {
    match cmd {
        ComplexCmd::Build { pile } => {
            let pile: Pile = read_json(pile)?;
            let complex = build_complex(&pile).map_err(|e| e.to_string())?;
            emit(cli, &complex.to_parts())?;
            Ok(ExitCode::SUCCESS)
        }
        ComplexCmd::Check { complex, field } => {
            let parts: ComplexParts = read_json(complex)?;
            let complex = DirectedComplex::from_parts(&parts).map_err(|e| e.to_string())?;
            let field = load_complex_field(field)?;
            let mut report =
                check_complex_kashaev(&complex, &field.vertices, ctx).map_err(|e| e.to_string())?;
            let coherence = check_complex_coherence(&complex, &field.vertices, ctx)
                .map_err(|e| e.to_string())?;
            let mut findings = report.findings.clone();
            findings.extend(coherence.findings);
            if !field.faces.is_empty() {
                let khex =
                    check_complex_khex(&complex, &field, ctx).map_err(|e| e.to_string())?;
                findings.extend(khex.findings);
            }
            report = Report::new(report.mode, findings);
            report_exit(cli, &report)
        }
        ComplexCmd::Comfortable { complex } => {
            let parts: ComplexParts = read_json(complex)?;
            let complex = DirectedComplex::from_parts(&parts).map_err(|e| e.to_string())?;
            let verdict = is_comfortable(&complex);
            emit(cli, &verdict)?;
            Ok(if verdict.comfortable {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        ComplexCmd::Extend { complex, field } => {
            let parts: ComplexParts = read_json(complex)?;
            let complex = DirectedComplex::from_parts(&parts).map_err(|e| e.to_string())?;
            let field = load_complex_field(field)?;
            let extended =
                extend_on_complex(&complex, &field.vertices, ctx).map_err(|e| e.to_string())?;
            emit(cli, &extended)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_minors(cli: &Cli, cmd: &MinorsCmd) -> Result<ExitCode, String> {
    match cmd {
        MinorsCmd::FromMatrix { matrix } => {
            let rows: Vec<Vec<Scalar>> = read_json(matrix)?;
            let m = SymMatrix::new(rows).map_err(|e| e.to_string())?;
            emit(cli, &signed_minor_tuple(&m))?;
            Ok(ExitCode::SUCCESS)
        }
        MinorsCmd::Test { tuple } => {
            let t: MinorTuple = read_json(tuple)?;
            let verdict = realizability_test(&t).map_err(|e| e.to_string())?;
            let mode = if t.is_exact() {
                NumericMode::Exact
            } else {
                NumericMode::Float
            };
            let findings = match &verdict {
                Realizability::Pass => Vec::new(),
                Realizability::Fail { certificate } => vec![Finding {
                    kind: "realizability".into(),
                    location: certificate.clone(),
                    lhs: None,
                    rhs: None,
                    residual: None,
                }],
            };
            report_exit(cli, &Report::new(mode, findings))
        }
        MinorsCmd::Reconstruct { tuple } => {
            let t: MinorTuple = read_json(tuple)?;
            let m = reconstruct_symmetric(&t).map_err(|e| e.to_string())?;
            emit(cli, &m.rows().to_vec())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn parse_params(text: &str) -> Result<Vec<Scalar>, String> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|p| Scalar::parse_literal(p.trim()).map_err(|e| e.to_string()))
        .collect()
}

fn parse_window(text: &str) -> Result<(Vec<i64>, Vec<i64>), String> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| format!("window {text:?} must look like lo:hi"))?;
    let parse = |s: &str| -> Result<Vec<i64>, String> {
        s.split(',')
            .map(|c| c.trim().parse().map_err(|e| format!("bad window: {e}")))
            .collect()
    };
    let (lo, hi) = (parse(lo)?, parse(hi)?);
    if lo.len() != hi.len() {
        return Err("window endpoints must have the same dimension".into());
    }
    Ok((lo, hi))
}

fn instance_of(id: &str, params: &str) -> Result<Instance, String> {
    make_instance(id, &parse_params(params)?).map_err(|e| e.to_string())
}

fn run_genrec(cli: &Cli, cmd: &GenrecCmd, ctx: &ToleranceContext) -> Result<ExitCode, String> {
    match cmd {
        GenrecCmd::Run {
            instance,
            params,
            window,
            init,
        } => {
            let inst = instance_of(instance, params)?;
            let (lo, hi) = parse_window(window)?;
            if lo.len() != inst.d() {
                return Err(format!("window dimension must be {}", inst.d()));
            }
            let raw: serde_json::Value = read_json(init)?;
            let seed = GridField::from_json(&inst, &raw)?;
            let field = kashaev::genrec::sweep(
                &inst,
                &lo,
                &hi,
                |p| {
                    seed.verts
                        .get(&p.to_vec())
                        .cloned()
                        .unwrap_or_else(|| Scalar::from_f64(1.0))
                },
                |axis, base, poly| match seed.faces.get(&(axis, base.to_vec())) {
                    Some(v) => Ok(v.clone()),
                    None => Ok(poly.sqrt_principal()?),
                },
            )
            .map_err(|e| e.to_string())?;
            emit(cli, &field.to_json(&inst))?;
            Ok(ExitCode::SUCCESS)
        }
        GenrecCmd::Verify {
            instance,
            params,
            grid,
        } => {
            let inst = instance_of(instance, params)?;
            let raw: serde_json::Value = read_json(grid)?;
            let field = GridField::from_json(&inst, &raw)?;
            let mut report = check_gen(&inst, &field, ctx);
            let mut findings = report.findings.clone();
            for p in field.verts.keys() {
                if let Ok(coh) = check_gen_coherence(&inst, &field, p, ctx) {
                    if !coh.ok {
                        findings.push(Finding::mismatch(
                            "coherence",
                            format!("vertex{p:?}"),
                            coh.lhs,
                            coh.rhs,
                        ));
                    }
                }
            }
            report = Report::new(report.mode, findings);
            report_exit(cli, &report)
        }
        GenrecCmd::Signs {
            instance,
            params,
            trials,
        } => {
            let inst = instance_of(instance, params)?;
            let d = inst.d();
            let lo = vec![0i64; d];
            let hi: Vec<i64> = inst.a().iter().map(|a| a * 2).collect();
            let center: Vec<i64> = inst.a().to_vec();
            let mut findings = Vec::new();
            let mut state = 0x1234_5678_9abc_def0u64;
            for trial in 0..*trials {
                let field = kashaev::genrec::sweep_plus_roots(&inst, &lo, &hi, |_| {
                    state = state
                        .wrapping_mul(6364136223846793005)
                        .wrapping_add(1442695040888963407);
                    Scalar::from_f64(0.5 + (state >> 40) as f64 / (1u64 << 24) as f64)
                })
                .map_err(|e| e.to_string())?;
                let bad = kashaev::genrec::verify_propagation_signs(&inst, &field, &center, ctx)
                    .map_err(|e| e.to_string())?;
                for orient in bad {
                    findings.push(Finding {
                        kind: "propagation-sign".into(),
                        location: format!("trial{trial}:{orient:?}"),
                        lhs: None,
                        rhs: None,
                        residual: None,
                    });
                }
            }
            report_exit(cli, &Report::new(NumericMode::Float, findings))
        }
    }
}
