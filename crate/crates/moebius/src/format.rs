//! JSON file formats.
//!
//! Exact numbers are fraction strings (`"-1/3"`), float numbers are decimal
//! strings with 17 significant digits. A file declares its mode and every
//! entry must be written in that mode.

use moebius_core::complex::{build_complex, CellKind, Complex, Options};
use moebius_core::hull::{tight_span, validate_metric, FiniteMetric, TightSpan};
use moebius_core::scalar::parse_rational;
use moebius_core::{AntipodalSpace, LogSpace, MoebiusVector, PairRelation, Rational, Scalar, SeparatingMatrix, SymMatrix, Tolerance};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub const SPACE_SCHEMA: &str = "antipodal-space/v1";
pub const METRIC_SCHEMA: &str = "finite-metric/v1";
pub const BALLS_SCHEMA: &str = "ball-family/v1";
pub const COMPLEX_SCHEMA: &str = "moebius-complex/v1";

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("schema mismatch: expected {expected}, found {found}")]
    SchemaMismatch { expected: String, found: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Core(#[from] moebius_core::Error),
}

pub type Result<T> = std::result::Result<T, FormatError>;

fn parse_err(msg: impl Into<String>) -> FormatError {
    FormatError::Parse(msg.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Rho,
    Log,
}

/// Scalars with a textual form in the file formats.
pub trait Num: Scalar {
    const MODE: Mode;
    fn parse_text(text: &str) -> Result<Self>;
    fn emit(&self) -> String;
}

impl Num for Rational {
    const MODE: Mode = Mode::Exact;

    fn parse_text(text: &str) -> Result<Self> {
        parse_rational(text).ok_or_else(|| parse_err(format!("not an exact number: {text:?}")))
    }

    fn emit(&self) -> String {
        self.to_string()
    }
}

impl Num for f64 {
    const MODE: Mode = Mode::Float;

    fn parse_text(text: &str) -> Result<Self> {
        let t = text.trim();
        if t.contains('/') {
            return Err(parse_err(format!("fraction {text:?} in a float-mode file")));
        }
        match t.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(parse_err(format!("not a finite float: {text:?}"))),
        }
    }

    fn emit(&self) -> String {
        format!("{self:.16e}")
    }
}

fn check_mode<S: Num>(mode: Mode) -> Result<()> {
    if mode != S::MODE {
        return Err(parse_err(format!("expected a {:?}-mode file, found {mode:?}", S::MODE).to_lowercase()));
    }
    Ok(())
}

/// Parse JSON after checking its `schema` field.
fn parse_schema<T: DeserializeOwned>(text: &str, expected: &str) -> Result<T> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
    let found = value.get("schema").and_then(|s| s.as_str()).unwrap_or("<missing>");
    if found != expected {
        return Err(FormatError::SchemaMismatch { expected: expected.into(), found: found.into() });
    }
    serde_json::from_value(value).map_err(|e| parse_err(e.to_string()))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("file types serialize")
}

fn parse_vec<S: Num>(v: &[String]) -> Result<Vec<S>> {
    v.iter().map(|x| S::parse_text(x)).collect()
}

fn emit_vec<S: Num>(v: &[S]) -> Vec<String> {
    v.iter().map(Num::emit).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceFile {
    pub schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub domain: Domain,
    pub mode: Mode,
    pub matrix: Vec<Vec<Option<String>>>,
}

/// A validated space in the domain and mode it was written in.
#[derive(Clone, Debug, PartialEq)]
pub enum ParsedSpace {
    RhoExact(AntipodalSpace<Rational>),
    RhoFloat(AntipodalSpace<f64>),
    LogExact(LogSpace<Rational>),
    LogFloat(LogSpace<f64>),
}

impl ParsedSpace {
    pub fn n(&self) -> usize {
        match self {
            ParsedSpace::RhoExact(s) => s.n(),
            ParsedSpace::RhoFloat(s) => s.n(),
            ParsedSpace::LogExact(s) => s.n(),
            ParsedSpace::LogFloat(s) => s.n(),
        }
    }

    /// Exact log-weights, available only for exact log-domain input.
    pub fn log_exact(&self) -> Option<&LogSpace<Rational>> {
        match self {
            ParsedSpace::LogExact(s) => Some(s),
            _ => None,
        }
    }

    pub fn log_f64(&self) -> LogSpace<f64> {
        match self {
            ParsedSpace::RhoExact(s) => s.to_log_weights(),
            ParsedSpace::RhoFloat(s) => s.to_log_weights(),
            ParsedSpace::LogExact(s) => s.to_f64(),
            ParsedSpace::LogFloat(s) => s.clone(),
        }
    }

    /// Exact rho-matrix, available only for exact rho-domain input.
    pub fn rho_exact(&self) -> Option<&SeparatingMatrix<Rational>> {
        match self {
            ParsedSpace::RhoExact(s) => Some(s.rho()),
            _ => None,
        }
    }

    pub fn rho_f64(&self) -> SeparatingMatrix<f64> {
        let from_log = |s: LogSpace<f64>| {
            let n = s.n();
            let m = SymMatrix::from_fn(n, |i, j| if i == j { 0.0 } else { (s.weight(i, j) / 2.0).exp() });
            SeparatingMatrix::new(m).expect("exponentials are positive")
        };
        match self {
            ParsedSpace::RhoExact(s) => s.rho().to_f64(),
            ParsedSpace::RhoFloat(s) => s.rho().clone(),
            ParsedSpace::LogExact(s) => from_log(s.to_f64()),
            ParsedSpace::LogFloat(s) => from_log(s.clone()),
        }
    }
}

fn parse_matrix<S: Num>(rows: &[Vec<Option<String>>], domain: Domain) -> Result<Vec<Vec<Option<S>>>> {
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, e)| match (e, domain) {
                    (None, Domain::Log) if i == j => Ok(None),
                    (None, _) => Err(parse_err(format!("missing entry ({i}, {j})"))),
                    (Some(t), _) => S::parse_text(t).map(Some),
                })
                .collect()
        })
        .collect()
}

fn build_rho<S: Num>(file: &SpaceFile, tol: Tolerance) -> Result<AntipodalSpace<S>> {
    let rows = parse_matrix::<S>(&file.matrix, file.domain)?;
    let rows: Vec<Vec<S>> = rows.into_iter().map(|r| r.into_iter().map(|e| e.unwrap_or_else(S::zero)).collect()).collect();
    let mut s = AntipodalSpace::from_rows(rows, tol)?;
    if let Some(l) = &file.labels {
        s = s.with_labels(l.clone())?;
    }
    Ok(s)
}

fn build_log<S: Num>(file: &SpaceFile, tol: Tolerance) -> Result<LogSpace<S>> {
    let rows = parse_matrix::<S>(&file.matrix, file.domain)?;
    let mut s = LogSpace::from_rows(rows, tol)?;
    if let Some(l) = &file.labels {
        s = s.with_labels(l.clone())?;
    }
    Ok(s)
}

pub fn parse_space(text: &str, tol: Tolerance) -> Result<ParsedSpace> {
    let file: SpaceFile = parse_schema(text, SPACE_SCHEMA)?;
    space_from_file(&file, tol)
}

pub fn space_from_file(file: &SpaceFile, tol: Tolerance) -> Result<ParsedSpace> {
    Ok(match (file.domain, file.mode) {
        (Domain::Rho, Mode::Exact) => ParsedSpace::RhoExact(build_rho(file, tol)?),
        (Domain::Rho, Mode::Float) => ParsedSpace::RhoFloat(build_rho(file, tol)?),
        (Domain::Log, Mode::Exact) => ParsedSpace::LogExact(build_log(file, tol)?),
        (Domain::Log, Mode::Float) => ParsedSpace::LogFloat(build_log(file, tol)?),
    })
}

impl SpaceFile {
    pub fn from_log<S: Num>(space: &LogSpace<S>) -> Self {
        let n = space.n();
        SpaceFile {
            schema: SPACE_SCHEMA.into(),
            labels: Some(space.labels().to_vec()),
            domain: Domain::Log,
            mode: S::MODE,
            matrix: (0..n)
                .map(|i| (0..n).map(|j| (i != j).then(|| space.weight(i, j).emit())).collect())
                .collect(),
        }
    }

    pub fn from_rho<S: Num>(space: &AntipodalSpace<S>) -> Self {
        let n = space.n();
        SpaceFile {
            schema: SPACE_SCHEMA.into(),
            labels: Some(space.labels().to_vec()),
            domain: Domain::Rho,
            mode: S::MODE,
            matrix: (0..n).map(|i| (0..n).map(|j| Some(space.rho().get(i, j).emit())).collect()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricFile {
    pub schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub mode: Mode,
    pub matrix: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ParsedMetric {
    Exact(FiniteMetric<Rational>),
    Float(FiniteMetric<f64>),
}

fn build_metric<S: Num>(file: &MetricFile, tol: Tolerance) -> Result<FiniteMetric<S>> {
    let rows = file.matrix.iter().map(|r| parse_vec::<S>(r)).collect::<Result<Vec<_>>>()?;
    let mut m = validate_metric(rows, tol)?;
    if let Some(l) = &file.labels {
        m = m.with_labels(l.clone())?;
    }
    Ok(m)
}

pub fn parse_metric(text: &str, tol: Tolerance) -> Result<ParsedMetric> {
    let file: MetricFile = parse_schema(text, METRIC_SCHEMA)?;
    metric_from_file(&file, tol)
}

pub fn metric_from_file(file: &MetricFile, tol: Tolerance) -> Result<ParsedMetric> {
    Ok(match file.mode {
        Mode::Exact => ParsedMetric::Exact(build_metric(file, tol)?),
        Mode::Float => ParsedMetric::Float(build_metric(file, tol)?),
    })
}

impl MetricFile {
    pub fn from_metric<S: Num>(metric: &FiniteMetric<S>) -> Self {
        let m = metric.m();
        MetricFile {
            schema: METRIC_SCHEMA.into(),
            labels: Some(metric.labels().to_vec()),
            mode: S::MODE,
            matrix: (0..m).map(|i| (0..m).map(|j| metric.d(i, j).emit()).collect()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallEntry {
    pub center: Vec<String>,
    pub radius: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallsFile {
    pub schema: String,
    pub mode: Mode,
    pub balls: Vec<BallEntry>,
}

/// Centers and radii, in the scalar type of the space they refer to.
pub fn parse_balls<S: Num>(text: &str) -> Result<(Vec<MoebiusVector<S>>, Vec<S>)> {
    let file: BallsFile = parse_schema(text, BALLS_SCHEMA)?;
    check_mode::<S>(file.mode)?;
    let mut centers = Vec::new();
    let mut radii = Vec::new();
    for b in &file.balls {
        centers.push(MoebiusVector(parse_vec(&b.center)?));
        radii.push(S::parse_text(&b.radius)?);
    }
    Ok((centers, radii))
}

impl BallsFile {
    pub fn new<S: Num>(centers: &[MoebiusVector<S>], radii: &[S]) -> Self {
        BallsFile {
            schema: BALLS_SCHEMA.into(),
            mode: S::MODE,
            balls: centers
                .iter()
                .zip(radii)
                .map(|(c, r)| BallEntry { center: emit_vec(&c.0), radius: r.emit() })
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coordinates {
    /// Moebius-space coordinates `tau`.
    Tau,
    /// Tight-span coordinates `f = -tau`.
    F,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RayEntry {
    pub center: usize,
    pub t_min: String,
    pub endpoint: usize,
    pub direction: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellEntry {
    pub id: usize,
    pub relation: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub zero_set: Vec<usize>,
    pub dim: usize,
    pub bounded: bool,
    pub kind: String,
    pub witness: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ray: Option<RayEntry>,
    pub faces: Vec<usize>,
    pub vertices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FVectorEntry {
    pub bounded: Vec<usize>,
    pub unbounded: Vec<usize>,
}

/// A complex together with the input it was built from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexFile {
    pub schema: String,
    pub n: usize,
    pub mode: Mode,
    pub labels: Vec<String>,
    pub coordinates: Coordinates,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<MetricFile>,
    pub cells: Vec<CellEntry>,
    pub f_vector: FVectorEntry,
    pub hasse: Vec<[usize; 2]>,
}

fn cells_of<S: Num>(complex: &Complex<S>, coords: Coordinates) -> Vec<CellEntry> {
    let flip = |v: &[S]| -> Vec<String> {
        match coords {
            Coordinates::Tau => emit_vec(v),
            Coordinates::F => v.iter().map(|x| (-x.clone()).emit()).collect(),
        }
    };
    complex
        .cells()
        .iter()
        .map(|c| CellEntry {
            id: c.id,
            relation: c.relation.pairs().map(|(i, j)| [i, j]).collect(),
            zero_set: (0..complex.n()).filter(|&i| c.zero_set & (1 << i) != 0).collect(),
            dim: c.dim,
            bounded: c.bounded,
            kind: match c.kind {
                CellKind::Ray => "ray".into(),
                CellKind::Polytope => "polytope".into(),
            },
            witness: flip(&c.witness.0),
            ray: c.ray.as_ref().map(|r| RayEntry {
                center: r.center,
                t_min: r.t_min.emit(),
                endpoint: r.endpoint,
                direction: flip(&r.direction),
            }),
            faces: c.faces.clone(),
            vertices: c.vertices.clone(),
        })
        .collect()
}

impl ComplexFile {
    fn frame<S: Num>(complex: &Complex<S>, coordinates: Coordinates) -> Self {
        ComplexFile {
            schema: COMPLEX_SCHEMA.into(),
            n: complex.n(),
            mode: S::MODE,
            labels: complex.labels().to_vec(),
            coordinates,
            space: None,
            metric: None,
            cells: cells_of(complex, coordinates),
            f_vector: FVectorEntry {
                bounded: complex.f_vector().bounded.clone(),
                unbounded: complex.f_vector().unbounded.clone(),
            },
            hasse: complex.hasse().iter().map(|&(a, b)| [a, b]).collect(),
        }
    }

    pub fn from_complex<S: Num>(complex: &Complex<S>) -> Self {
        let mut f = Self::frame(complex, Coordinates::Tau);
        f.space = complex.space().map(SpaceFile::from_log);
        f
    }

    pub fn from_tight_span<S: Num>(ts: &TightSpan<S>) -> Self {
        let mut f = Self::frame(ts.complex(), Coordinates::F);
        f.metric = Some(MetricFile::from_metric(ts.metric()));
        f
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ParsedComplex {
    Exact(Complex<Rational>),
    Float(Complex<f64>),
    TightExact(TightSpan<Rational>),
    TightFloat(TightSpan<f64>),
}

/// Rebuild the complex from its embedded input and check that the file
/// describes exactly that complex.
pub fn parse_complex(text: &str, tol: Tolerance) -> Result<ParsedComplex> {
    let file: ComplexFile = parse_schema(text, COMPLEX_SCHEMA)?;
    let options = Options { max_n: file.n, ..Options::default() };
    let (parsed, again) = match (&file.space, &file.metric) {
        (Some(s), None) => {
            if s.domain != Domain::Log {
                return Err(parse_err("embedded space must be log-domain"));
            }
            match space_from_file(s, tol)? {
                ParsedSpace::LogExact(s) => {
                    let c = build_complex(&s, options)?;
                    let again = ComplexFile::from_complex(&c);
                    (ParsedComplex::Exact(c), again)
                }
                ParsedSpace::LogFloat(s) => {
                    let c = build_complex(&s, options)?;
                    let again = ComplexFile::from_complex(&c);
                    (ParsedComplex::Float(c), again)
                }
                _ => unreachable!("domain checked above"),
            }
        }
        (None, Some(m)) => match metric_from_file(m, tol)? {
            ParsedMetric::Exact(m) => {
                let t = tight_span(&m, options)?;
                let again = ComplexFile::from_tight_span(&t);
                (ParsedComplex::TightExact(t), again)
            }
            ParsedMetric::Float(m) => {
                let t = tight_span(&m, options)?;
                let again = ComplexFile::from_tight_span(&t);
                (ParsedComplex::TightFloat(t), again)
            }
        },
        _ => return Err(parse_err("a complex file embeds exactly one of `space` and `metric`")),
    };
    if again != file {
        return Err(parse_err("cells do not match the embedded input"));
    }
    Ok(parsed)
}

/// Comma-separated numbers, for command-line arguments.
pub fn parse_list<S: Num>(text: &str) -> Result<Vec<S>> {
    text.split(',').map(|t| S::parse_text(t.trim())).collect()
}

pub fn relation_pairs(r: &PairRelation) -> Vec<[usize; 2]> {
    r.pairs().map(|(i, j)| [i, j]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const STAR: &str = r#"{"schema":"antipodal-space/v1","domain":"log","mode":"exact",
        "matrix":[[null,"0","0","0"],["0",null,"-2","-2"],["0","-2",null,"-2"],["0","-2","-2",null]]}"#;

    #[test]
    fn star_space_parses() {
        let s = parse_space(STAR, Tolerance::default()).unwrap();
        assert_eq!(s.n(), 4);
        assert_eq!(s.log_exact().unwrap().weight(1, 2), &Rational::from_i64(-2));
    }

    #[test]
    fn zero_denominator_is_a_parse_error() {
        let bad = STAR.replace("\"-2\",null,\"-2\"]", "\"1/0\",null,\"-2\"]");
        assert!(matches!(parse_space(&bad, Tolerance::default()), Err(FormatError::Parse(_))));
    }

    #[test]
    fn modes_do_not_mix() {
        let bad = STAR.replace("\"exact\"", "\"float\"").replace("\"0\",\"0\",\"0\"", "\"0\",\"0\",\"-1/2\"");
        assert!(matches!(parse_space(&bad, Tolerance::default()), Err(FormatError::Parse(_))));
        let dec = STAR.replace("\"-2\",\"-2\"]", "\"-2.5\",\"-2\"]");
        assert!(matches!(parse_space(&dec, Tolerance::default()), Err(FormatError::Parse(_))));
    }

    #[test]
    fn schema_is_checked() {
        let other = STAR.replace("antipodal-space/v1", "finite-metric/v1");
        assert!(matches!(parse_space(&other, Tolerance::default()), Err(FormatError::SchemaMismatch { .. })));
    }

    #[test]
    fn float_text_round_trips() {
        for x in [std::f64::consts::LN_2, -1.0 / 3.0, 1e-300, 12345.678] {
            assert_eq!(f64::parse_text(&x.emit()).unwrap(), x);
        }
    }

    #[test]
    fn complex_round_trip() {
        let s = parse_space(STAR, Tolerance::default()).unwrap();
        let c = build_complex(s.log_exact().unwrap(), Options::default()).unwrap();
        let text = to_json(&ComplexFile::from_complex(&c));
        assert_eq!(parse_complex(&text, Tolerance::default()).unwrap(), ParsedComplex::Exact(c));
        let tampered = text.replacen("\"-1\"", "\"-2\"", 1);
        assert!(parse_complex(&tampered, Tolerance::default()).is_err());
    }
}
