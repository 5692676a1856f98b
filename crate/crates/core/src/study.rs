//! Test-vector construction, study configuration and report rendering for
//! the `cohres` command line.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::fock::{coherent_coefficients, ComplexAmplitude, FockVector};
use crate::quadrature::{quadrature_compare, GridShape, QuadratureRow};
use crate::resolution::{converge, ConvergenceReport};
use crate::VERSION;

/// Test vector grammar: `fock <m>`, `coherent <re>,<im>`, `geometric <q>`
/// or `file <path>`.
#[derive(Clone, Debug, PartialEq)]
pub enum VectorSpec {
    Fock(usize),
    Coherent(f64, f64),
    /// `c_n = √(1 - q²) qⁿ`; not normalized after truncation.
    Geometric(f64),
    /// One `re im` pair per line.
    File(PathBuf),
}

impl VectorSpec {
    pub fn label(&self) -> String {
        match self {
            VectorSpec::Fock(m) => format!("fock {m}"),
            VectorSpec::Coherent(re, im) => format!("coherent {re},{im}"),
            VectorSpec::Geometric(q) => format!("geometric {q} (synthetic slow-tail vector)"),
            VectorSpec::File(p) => format!("file {}", p.display()),
        }
    }

    pub fn build(&self, dim: usize) -> Result<FockVector> {
        let spec_err = |reason: String| Error::VectorSpec { spec: self.label(), reason };
        if dim == 0 {
            return Err(spec_err("dim must be >= 1".into()));
        }
        let v = match self {
            VectorSpec::Fock(m) => FockVector::basis(*m, dim).map_err(|e| spec_err(e.to_string()))?,
            VectorSpec::Coherent(re, im) => coherent_coefficients(ComplexAmplitude::new(*re, *im)?, dim)?,
            VectorSpec::Geometric(q) => {
                let head = (1.0 - q * q).sqrt();
                let coeffs: Vec<f64> = (0..dim).map(|n| head * q.powi(n as i32)).collect();
                FockVector::from_real(&coeffs)?
            }
            VectorSpec::File(path) => {
                let coeffs = read_coefficients(path)?;
                if coeffs.len() > dim {
                    return Err(spec_err(format!("file has {} coefficients but dim is {dim}", coeffs.len())));
                }
                FockVector::new(coeffs)?.resized(dim)?
            }
        };
        if v.norm() == 0.0 {
            return Err(spec_err("vector has zero norm and cannot be normalized".into()));
        }
        Ok(v)
    }
}

impl FromStr for VectorSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let err = |reason: &str| Error::VectorSpec { spec: text.to_string(), reason: reason.to_string() };
        let text_trim = text.trim();
        let (kind, arg) = text_trim
            .split_once(char::is_whitespace)
            .map(|(k, a)| (k, a.trim()))
            .ok_or_else(|| err("expected `<kind> <argument>`"))?;
        match kind {
            "fock" => arg.parse().map(VectorSpec::Fock).map_err(|_| err("mode must be a non-negative integer")),
            "coherent" => {
                let (re, im) = arg.split_once(',').ok_or_else(|| err("expected `coherent <re>,<im>`"))?;
                let re: f64 = re.trim().parse().map_err(|_| err("bad real part"))?;
                let im: f64 = im.trim().parse().map_err(|_| err("bad imaginary part"))?;
                if !re.is_finite() || !im.is_finite() {
                    return Err(err("amplitude must be finite"));
                }
                Ok(VectorSpec::Coherent(re, im))
            }
            "geometric" => {
                let q: f64 = arg.parse().map_err(|_| err("bad ratio"))?;
                if !(q > 0.0 && q < 1.0) {
                    return Err(err("ratio must satisfy 0 < q < 1"));
                }
                Ok(VectorSpec::Geometric(q))
            }
            "file" => Ok(VectorSpec::File(PathBuf::from(arg))),
            _ => Err(err("kind must be one of fock, coherent, geometric, file")),
        }
    }
}

/// Parses `text` and builds the vector on `dim` modes.
pub fn parse_vector_spec(text: &str, dim: usize) -> Result<FockVector> {
    text.parse::<VectorSpec>()?.build(dim)
}

fn read_coefficients(path: &Path) -> Result<Vec<Complex64>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    let mut coeffs = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = || Error::VectorSpec {
            spec: format!("file {}", path.display()),
            reason: format!("line {}: expected `re im`", lineno + 1),
        };
        let mut parts = line.split_whitespace();
        let re: f64 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let im: f64 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        if parts.next().is_some() {
            return Err(bad());
        }
        coeffs.push(Complex64::new(re, im));
    }
    if coeffs.is_empty() {
        return Err(Error::VectorSpec { spec: format!("file {}", path.display()), reason: "no coefficients".into() });
    }
    Ok(coeffs)
}

/// Radii for a sweep: an explicit increasing list or `start·factor^k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RadiiSpec {
    List(Vec<f64>),
    Geometric { start: f64, factor: f64, count: usize },
}

impl RadiiSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        let radii = match self {
            RadiiSpec::List(v) => v.clone(),
            RadiiSpec::Geometric { start, factor, count } => {
                if !(*factor > 1.0) || *count == 0 {
                    return Err(Error::Config("sweep needs factor > 1 and count >= 1".into()));
                }
                (0..*count).map(|k| start * factor.powi(k as i32)).collect()
            }
        };
        if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
            return Err(Error::Config("radii must be positive and finite".into()));
        }
        if radii.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Config("radii must be strictly increasing".into()));
        }
        Ok(radii)
    }
}

impl FromStr for RadiiSpec {
    type Err = Error;

    /// `1,2,4,8` or `geom:<start>,<factor>,<count>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("bad radii `{s}`"));
        if let Some(rest) = s.trim().strip_prefix("geom:") {
            let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(bad());
            }
            return Ok(RadiiSpec::Geometric {
                start: parts[0].parse().map_err(|_| bad())?,
                factor: parts[1].parse().map_err(|_| bad())?,
                count: parts[2].parse().map_err(|_| bad())?,
            });
        }
        s.split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()
            .map(RadiiSpec::List)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Full configuration of a `converge` run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub vector: String,
    pub dim: usize,
    pub radii: RadiiSpec,
    /// Enables quadrature comparison at every radius.
    #[serde(default)]
    pub grid: Option<String>,
    #[serde(default)]
    pub witness_modes: Option<usize>,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

impl StudyConfig {
    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))
    }

    fn grid_shape(&self) -> Result<Option<GridShape>> {
        self.grid.as_deref().map(str::parse).transpose()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadratureAtRadius {
    pub radius: f64,
    #[serde(flatten)]
    pub row: QuadratureRow,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StudyReport {
    pub version: String,
    pub config: StudyConfig,
    pub convergence: ConvergenceReport,
    pub quadrature: Option<Vec<QuadratureAtRadius>>,
}

/// Builds the vector, sweeps the radii and, when a grid is configured,
/// cross-checks each radius by disk quadrature.
pub fn run_study(cfg: &StudyConfig) -> Result<StudyReport> {
    let spec: VectorSpec = cfg.vector.parse()?;
    let v = spec.build(cfg.dim)?;
    let radii = cfg.radii.values()?;
    let convergence = converge(&v, &radii, cfg.witness_modes, spec.label())?;
    let quadrature = match cfg.grid_shape()? {
        None => None,
        Some(shape) => Some(
            radii
                .iter()
                .map(|&r| {
                    let row = quadrature_compare(&v, r, shape, 1)?.remove(0);
                    Ok(QuadratureAtRadius { radius: r, row })
                })
                .collect::<Result<Vec<_>>>()?,
        ),
    };
    Ok(StudyReport { version: VERSION.to_string(), config: cfg.clone(), convergence, quadrature })
}

/// Shortest decimal that round-trips to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 || (1e-5..1e16).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Tabular output shared by every subcommand.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self { header: Vec::new(), columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn comment(&mut self, line: impl Into<String>) {
        self.header.push(line.into());
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for h in &self.header {
            let _ = writeln!(out, "# {h}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(csv_cell).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn to_json_value(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> =
                    self.columns.iter().zip(row).map(|(c, v)| (c.to_string(), v.clone())).collect();
                Value::Object(obj)
            })
            .collect();
        Value::Array(rows)
    }
}

/// A float cell; rendered as shortest round-trip text.
pub fn num(x: f64) -> Value {
    Value::String(fmt_f64(x))
}

pub fn int(x: usize) -> Value {
    Value::from(x as u64)
}

pub fn text(s: impl Into<String>) -> Value {
    Value::String(s.into())
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Replaces every non-integer JSON number by its shortest round-trip string.
pub fn stringify_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => num(n.as_f64().expect("f64 number")),
        Value::Array(a) => Value::Array(a.into_iter().map(stringify_floats).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, stringify_floats(v))).collect()),
        other => other,
    }
}

impl StudyReport {
    pub fn convergence_table(&self) -> Table {
        let mut t = Table::new(&["radius", "strong_error", "weak_defect_self", "norm_witness", "paper_bound"]);
        t.comment(format!("cohres {}", self.version));
        t.comment(format!("vector = {}", self.config.vector));
        t.comment(format!("label = {}", self.convergence.test_vector_label));
        t.comment(format!("dim = {}", self.config.dim));
        let radii = match &self.config.radii {
            RadiiSpec::List(v) => v.iter().map(|r| fmt_f64(*r)).collect::<Vec<_>>().join(","),
            RadiiSpec::Geometric { start, factor, count } => {
                format!("geom:{},{},{}", fmt_f64(*start), fmt_f64(*factor), count)
            }
        };
        t.comment(format!("radii = {radii}"));
        t.comment(format!("grid = {}", self.config.grid.as_deref().unwrap_or("none")));
        let wm = self.config.witness_modes.map_or_else(|| "auto".to_string(), |m| m.to_string());
        t.comment(format!("witness_modes = {wm}"));
        t.comment(format!("seed = {}", self.config.seed));
        for row in &self.convergence.rows {
            t.push(vec![
                num(row.radius),
                num(row.strong_error),
                num(row.weak_defect_self),
                num(row.norm_witness),
                num(row.paper_bound),
            ]);
        }
        t
    }

    pub fn quadrature_table(&self) -> Option<Table> {
        let rows = self.quadrature.as_ref()?;
        let mut t = quadrature_table_header(true);
        for q in rows {
            let mut cells = vec![num(q.radius)];
            cells.extend(quadrature_cells(&q.row));
            t.push(cells);
        }
        Some(t)
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => {
                let mut out = self.convergence_table().to_csv();
                if let Some(q) = self.quadrature_table() {
                    out.push('\n');
                    out.push_str("# quadrature-compare\n");
                    out.push_str(&q.to_csv());
                }
                out
            }
            OutputFormat::Json => {
                let value = stringify_floats(serde_json::to_value(self).expect("report serializes"));
                let mut s = serde_json::to_string_pretty(&value).expect("value serializes");
                s.push('\n');
                s
            }
        }
    }
}

pub fn quadrature_table_header(with_radius: bool) -> Table {
    let mut cols = Vec::new();
    if with_radius {
        cols.push("radius");
    }
    cols.extend([
        "grid",
        "error_vs_analytic",
        "triangle_lhs",
        "triangle_rhs",
        "bra_exchange_residual",
        "termwise_exchange_residual",
    ]);
    Table::new(&cols)
}

pub fn quadrature_cells(row: &QuadratureRow) -> Vec<Value> {
    vec![
        text(row.grid.clone()),
        num(row.error_vs_analytic),
        num(row.triangle_lhs),
        num(row.triangle_rhs),
        num(row.bra_exchange_residual),
        num(row.termwise_exchange_residual),
    ]
}
