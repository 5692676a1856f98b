use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use coherent_resolution::check::run_all;
use coherent_resolution::gamma::gamma_table;
use coherent_resolution::quadrature::{quadrature_compare, GridShape};
use coherent_resolution::resolution::{apply, norm_witness, select_radius, strong_error, TruncatedResolution};
use coherent_resolution::study::{
    fmt_f64, int, num, quadrature_cells, quadrature_table_header, run_study, OutputFormat, RadiiSpec, StudyConfig,
    Table, VectorSpec,
};
use coherent_resolution::{Error, Result, VERSION};

#[derive(Parser)]
#[command(
    name = "cohres",
    version,
    about = "Truncated coherent-state resolution of the identity: tables, sweeps and checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// Write to this file instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate I_n(R) and Q_n(R) with recurrence residuals.
    GammaTable {
        #[arg(long)]
        radius_sq: f64,
        #[arg(long)]
        max_n: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Apply A_r to a test vector and report the strong error.
    Resolve {
        #[arg(long)]
        radius: f64,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        vector: String,
        #[command(flatten)]
        out: Output,
    },
    /// Radius sweep producing a convergence report.
    Converge {
        /// TOML study configuration; other flags are ignored when given.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, required_unless_present = "config")]
        vector: Option<String>,
        #[arg(long, default_value_t = 64)]
        dim: usize,
        /// Comma-separated radii or `geom:<start>,<factor>,<count>`.
        #[arg(long, default_value = "1,2,4,8")]
        radii: String,
        /// Enable quadrature comparison on a KxL grid.
        #[arg(long)]
        grid: Option<String>,
        /// Basis modes scanned for the norm witness (default grows with r).
        #[arg(long)]
        witness_modes: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Smallest radius with strong error below eps.
    SelectRadius {
        #[arg(long)]
        vector: String,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Largest basis-vector defect of A_r over modes 0..=max_m.
    NormWitness {
        #[arg(long)]
        radius: f64,
        #[arg(long)]
        max_m: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Disk quadrature against the closed diagonal form.
    QuadratureCompare {
        #[arg(long)]
        radius: f64,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value = "256x256")]
        grid: String,
        #[arg(long)]
        vector: String,
        /// Number of dyadic refinement levels starting at --grid.
        #[arg(long, default_value_t = 1)]
        levels: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Run every invariant suite; exit status 0 iff all pass.
    Check {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn emit(out: &Output, table: &Table) -> Result<()> {
    let text = match out.format {
        OutputFormat::Csv => table.to_csv(),
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&serde_json::json!({
                "version": VERSION,
                "header": table.header,
                "rows": table.to_json_value(),
            }))
            .expect("table serializes");
            s.push('\n');
            s
        }
    };
    write_text(out.output.as_ref(), &text)
}

fn write_text(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| Error::Io { path: p.clone(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::GammaTable { radius_sq, max_n, out } => {
            let t = gamma_table(radius_sq, max_n)?;
            let mut table = Table::new(&["n", "I", "Q", "recurrence_residual"]);
            table.comment(format!("radius_sq = {}", fmt_f64(radius_sq)));
            for n in 0..=max_n {
                table.push(vec![int(n), num(t.lower(n)), num(t.upper(n)), num(t.recurrence_residual(n))]);
            }
            emit(&out, &table)?;
        }
        Command::Resolve { radius, dim, vector, out } => {
            let spec: VectorSpec = vector.parse()?;
            let v = spec.build(dim)?;
            let res = TruncatedResolution::new(radius, dim)?;
            let av = apply(&res, &v)?;
            let mut table = Table::new(&["n", "input_re", "input_im", "output_re", "output_im", "eigenvalue"]);
            table.comment(format!("vector = {}", spec.label()));
            table.comment(format!("radius = {}", fmt_f64(radius)));
            table.comment(format!("strong_error = {}", fmt_f64(strong_error(&res, &v)?)));
            for n in 0..dim {
                let (a, b) = (v.get(n), av.get(n));
                table.push(vec![int(n), num(a.re), num(a.im), num(b.re), num(b.im), num(res.eigenvalue(n))]);
            }
            emit(&out, &table)?;
        }
        Command::Converge { config, vector, dim, radii, grid, witness_modes, seed, out } => {
            let cfg = match config {
                Some(path) => StudyConfig::from_toml_file(&path)?,
                None => StudyConfig {
                    vector: vector.expect("clap enforces --vector"),
                    dim,
                    radii: radii.parse::<RadiiSpec>()?,
                    grid,
                    witness_modes,
                    format: out.format,
                    output: out.output.clone(),
                    seed,
                },
            };
            let report = run_study(&cfg)?;
            write_text(cfg.output.as_ref(), &report.render(cfg.format))?;
        }
        Command::SelectRadius { vector, dim, eps, out } => {
            let v = vector.parse::<VectorSpec>()?.build(dim)?;
            let sel = select_radius(&v, eps)?;
            let mut table = Table::new(&["eps", "head_modes", "radius", "strong_error"]);
            table.comment(format!("vector = {vector}"));
            table.push(vec![num(eps), int(sel.head_modes), num(sel.radius), num(sel.strong_error)]);
            emit(&out, &table)?;
        }
        Command::NormWitness { radius, max_m, out } => {
            let res = TruncatedResolution::new(radius, 1)?;
            let w = norm_witness(&res, max_m)?;
            let mut table = Table::new(&["radius", "max_m", "mode", "witness", "paper_bound"]);
            table.comment("witness = max_m Q_m(r^2), a lower bound on the operator norm of A_r - I");
            table.comment("paper_bound = max_m (1 - 2 I_m(r^2)), a lower bound on its square");
            table.push(vec![num(radius), int(max_m), int(w.mode), num(w.witness), num(w.paper_bound)]);
            emit(&out, &table)?;
        }
        Command::QuadratureCompare { radius, dim, grid, vector, levels, out } => {
            let spec: VectorSpec = vector.parse()?;
            let v = spec.build(dim)?;
            let shape: GridShape = grid.parse()?;
            let mut table = quadrature_table_header(false);
            table.comment(format!("vector = {}", spec.label()));
            table.comment(format!("radius = {}", fmt_f64(radius)));
            table.comment(format!("dim = {dim}"));
            for row in quadrature_compare(&v, radius, shape, levels)? {
                table.push(quadrature_cells(&row));
            }
            emit(&out, &table)?;
        }
        Command::Check { seed } => {
            println!("# cohres {VERSION} check, seed = {seed}");
            let outcomes = run_all(seed)?;
            for o in &outcomes {
                println!("{}", o.line());
            }
            return Ok(outcomes.iter().all(|o| o.passed));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
