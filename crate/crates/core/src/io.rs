//! JSON model files: parsing with location-precise errors, canonical
//! serialization, and certificates that can be re-verified on their own.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::coalgebra::{tensor_add, CdgCoalgebra, Tensor};
use crate::convolution::ConvolutionAlgebra;
use crate::error::{Error, Result};
use crate::freelie::QuillenModel;
use crate::graded::GradedSpace;
use crate::linalg::{Matrix, Vector};
use crate::linfty::{LInfinity, TableLInfinity};
use crate::mc_gauge::{verify_chain, verify_witness, GaugeOutcome, GaugePath, ObstructionWitness};
use crate::scalar::{format_q, parse_q, Q};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Cdgc,
    Linfty,
    Quillen,
    McElement,
    GaugePath,
    Map,
    Certificate,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Cdgc => "cdgc",
            Kind::Linfty => "linfty",
            Kind::Quillen => "quillen",
            Kind::McElement => "mc_element",
            Kind::GaugePath => "gauge_path",
            Kind::Map => "map",
            Kind::Certificate => "certificate",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisEntry {
    pub name: String,
    pub degree: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub names: Vec<String>,
    pub coeff: String,
}

/// One structure-map entry: `op(inputs) = Σ coeff · names`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Operation {
    pub op: String,
    pub arity: usize,
    pub inputs: Vec<String>,
    pub outputs: Vec<Term>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    pub deg_min: i64,
    pub deg_max: i64,
    pub arity_max: usize,
    pub poly_bound: usize,
}

impl Default for Window {
    fn default() -> Self {
        Window {
            deg_min: 0,
            deg_max: 8,
            arity_max: 4,
            poly_bound: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub format_version: u32,
    pub kind: Kind,
    pub basis: Vec<BasisEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_basis: Option<Vec<BasisEntry>>,
    /// Matrices with rows indexed by outputs and columns by inputs.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub maps: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub operations: Vec<Operation>,
    pub window: Window,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub attachments: BTreeMap<String, ModelFile>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub data: BTreeMap<String, Value>,
}

/// Rebuilds every object with lexicographically ordered keys.
pub fn canonicalize(v: Value) -> Value {
    match v {
        Value::Object(m) => {
            let mut entries: Vec<(String, Value)> = m.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            Value::Object(entries.into_iter().map(|(k, v)| (k, canonicalize(v))).collect())
        }
        Value::Array(a) => Value::Array(a.into_iter().map(canonicalize).collect()),
        other => other,
    }
}

/// Pretty-printed canonical JSON with a trailing newline.
pub fn canonical_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("serializable value");
    let mut s = serde_json::to_string_pretty(&canonicalize(v)).expect("valid JSON");
    s.push('\n');
    s
}

impl ModelFile {
    pub fn new(kind: Kind, basis: &GradedSpace, window: Window) -> Self {
        ModelFile {
            format_version: FORMAT_VERSION,
            kind,
            basis: basis_entries(basis),
            target_basis: None,
            maps: BTreeMap::new(),
            operations: Vec::new(),
            window,
            attachments: BTreeMap::new(),
            data: BTreeMap::new(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let m: ModelFile = serde_json::from_str(text)
            .map_err(|e| Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
        m.check_header("")?;
        Ok(m)
    }

    fn check_header(&self, prefix: &str) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::parse(
                format!("{prefix}format_version"),
                format!("unsupported version {}", self.format_version),
            ));
        }
        for (k, a) in &self.attachments {
            a.check_header(&format!("{prefix}attachments.{k}."))?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        canonical_json(self)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::parse(path.display().to_string(), e.to_string()))?;
        Self::parse(&text)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::parse(path.display().to_string(), e.to_string()))
    }

    pub fn expect_kind(&self, kind: Kind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::parse(
                "kind",
                format!("expected `{}`, found `{}`", kind.as_str(), self.kind.as_str()),
            ));
        }
        Ok(())
    }

    pub fn space(&self) -> Result<GradedSpace> {
        space_from_entries(&self.basis, "basis")
    }

    pub fn target_space(&self) -> Result<GradedSpace> {
        let entries = self
            .target_basis
            .as_ref()
            .ok_or_else(|| Error::parse("target_basis", "missing"))?;
        space_from_entries(entries, "target_basis")
    }

    /// The named matrix, checked to be `rows × cols`.
    pub fn matrix(&self, name: &str, rows: usize, cols: usize) -> Result<Matrix> {
        let loc = format!("maps.{name}");
        let raw = self.maps.get(name).ok_or_else(|| Error::parse(&loc, "missing"))?;
        parse_matrix(raw, &loc, rows, cols)
    }

    pub fn attachment(&self, name: &str) -> Result<&ModelFile> {
        self.attachments
            .get(name)
            .ok_or_else(|| Error::parse(format!("attachments.{name}"), "missing"))
    }

    pub fn set_matrix(&mut self, name: &str, m: &Matrix) {
        self.maps.insert(name.to_string(), format_matrix(m));
    }
}

fn basis_entries(space: &GradedSpace) -> Vec<BasisEntry> {
    (0..space.dim())
        .map(|i| BasisEntry {
            name: space.name(i).to_string(),
            degree: space.degree(i),
        })
        .collect()
}

fn space_from_entries(entries: &[BasisEntry], loc: &str) -> Result<GradedSpace> {
    let mut seen = BTreeMap::new();
    for (i, e) in entries.iter().enumerate() {
        if e.name.is_empty() {
            return Err(Error::parse(format!("{loc}[{i}].name"), "empty name"));
        }
        if let Some(j) = seen.insert(e.name.as_str(), i) {
            return Err(Error::parse(
                format!("{loc}[{i}].name"),
                format!("`{}` already used by {loc}[{j}]", e.name),
            ));
        }
    }
    GradedSpace::new(entries.iter().map(|e| (e.name.clone(), e.degree)).collect())
}

pub fn parse_rational(s: &str, loc: &str) -> Result<Q> {
    parse_q(s).ok_or_else(|| Error::parse(loc, format!("`{s}` is not a rational of the form p or p/q")))
}

pub fn parse_matrix(raw: &[Vec<String>], loc: &str, rows: usize, cols: usize) -> Result<Matrix> {
    if raw.len() != rows {
        return Err(Error::parse(loc, format!("expected {rows} rows, found {}", raw.len())));
    }
    let mut m = Matrix::zeros(rows, cols);
    for (r, row) in raw.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::parse(
                format!("{loc}[{r}]"),
                format!("expected {cols} entries, found {}", row.len()),
            ));
        }
        for (c, s) in row.iter().enumerate() {
            m.set(r, c, parse_rational(s, &format!("{loc}[{r}][{c}]"))?);
        }
    }
    Ok(m)
}

pub fn format_matrix(m: &Matrix) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|r| (0..m.cols()).map(|c| format_q(m.get(r, c))).collect())
        .collect()
}

fn lookup(space: &GradedSpace, name: &str, loc: &str) -> Result<usize> {
    space
        .index_of(name)
        .ok_or_else(|| Error::parse(loc, format!("unknown basis element `{name}`")))
}

fn check_same_space(found: &GradedSpace, expected: &GradedSpace, loc: &str) -> Result<()> {
    if found != expected {
        return Err(Error::parse(loc, "basis does not match the model it refers to"));
    }
    Ok(())
}

fn operations_of<'a>(m: &'a ModelFile, op: &'a str) -> impl Iterator<Item = (usize, &'a Operation)> + 'a {
    m.operations.iter().enumerate().filter(move |(_, o)| o.op == op)
}

fn check_ops(m: &ModelFile, allowed: &[&str]) -> Result<()> {
    for (k, o) in m.operations.iter().enumerate() {
        if !allowed.contains(&o.op.as_str()) {
            return Err(Error::parse(
                format!("operations[{k}].op"),
                format!("`{}` is not allowed in a {} file", o.op, m.kind.as_str()),
            ));
        }
        if o.arity != o.inputs.len() && o.op != "delta" {
            return Err(Error::parse(
                format!("operations[{k}].arity"),
                format!("arity {} but {} inputs", o.arity, o.inputs.len()),
            ));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- coalgebras

pub fn coalgebra_to_file(c: &CdgCoalgebra, window: Window) -> ModelFile {
    let mut m = ModelFile::new(Kind::Cdgc, &c.space, window);
    m.set_matrix("d", &c.d);
    for (x, t) in c.delta.iter().enumerate() {
        if t.is_empty() {
            continue;
        }
        m.operations.push(Operation {
            op: "coproduct".into(),
            arity: 1,
            inputs: vec![c.space.name(x).to_string()],
            outputs: t
                .iter()
                .map(|(k, v)| Term {
                    names: k.iter().map(|&i| c.space.name(i).to_string()).collect(),
                    coeff: format_q(v),
                })
                .collect(),
        });
    }
    m
}

/// Parses a `cdgc` file. Structural problems are parse errors; the
/// coalgebra identities are checked separately by `validate_cdgc`.
pub fn coalgebra_from_file(m: &ModelFile) -> Result<CdgCoalgebra> {
    m.expect_kind(Kind::Cdgc)?;
    let space = m.space()?;
    let n = space.dim();
    let d = if m.maps.contains_key("d") {
        m.matrix("d", n, n)?
    } else {
        Matrix::zeros(n, n)
    };
    check_ops(m, &["coproduct"])?;
    let mut delta: Vec<Tensor> = vec![Tensor::new(); n];
    for (k, o) in operations_of(m, "coproduct") {
        let loc = format!("operations[{k}]");
        if o.inputs.len() != 1 {
            return Err(Error::parse(format!("{loc}.inputs"), "a coproduct has one input"));
        }
        let x = lookup(&space, &o.inputs[0], &format!("{loc}.inputs[0]"))?;
        for (t, term) in o.outputs.iter().enumerate() {
            let tl = format!("{loc}.outputs[{t}]");
            if term.names.len() != 2 {
                return Err(Error::parse(format!("{tl}.names"), "coproduct terms have two factors"));
            }
            let a = lookup(&space, &term.names[0], &format!("{tl}.names[0]"))?;
            let b = lookup(&space, &term.names[1], &format!("{tl}.names[1]"))?;
            tensor_add(&mut delta[x], vec![a, b], parse_rational(&term.coeff, &format!("{tl}.coeff"))?);
        }
    }
    for (x, t) in delta.iter().enumerate() {
        for k in t.keys() {
            let deg = space.degree(k[0]) + space.degree(k[1]);
            if deg != space.degree(x) {
                return Err(Error::Degree(format!(
                    "coproduct of `{}` has a term `{}⊗{}` of degree {deg}",
                    space.name(x),
                    space.name(k[0]),
                    space.name(k[1])
                )));
            }
        }
    }
    CdgCoalgebra::new(space, d, delta)
}

// ---------------------------------------------------------------- L∞ algebras

pub fn linfty_to_file(l: &TableLInfinity, window: Window) -> ModelFile {
    let mut m = ModelFile::new(Kind::Linfty, &l.space, window);
    m.set_matrix("l1", &l.l1);
    for (inputs, out) in &l.brackets {
        m.operations.push(Operation {
            op: "bracket".into(),
            arity: inputs.len(),
            inputs: inputs.iter().map(|&i| l.space.name(i).to_string()).collect(),
            outputs: crate::linalg::support(out)
                .map(|(i, v)| Term {
                    names: vec![l.space.name(i).to_string()],
                    coeff: format_q(v),
                })
                .collect(),
        });
    }
    m
}

pub fn linfty_from_file(m: &ModelFile) -> Result<TableLInfinity> {
    m.expect_kind(Kind::Linfty)?;
    let space = m.space()?;
    let n = space.dim();
    let l1 = if m.maps.contains_key("l1") {
        m.matrix("l1", n, n)?
    } else {
        Matrix::zeros(n, n)
    };
    check_ops(m, &["bracket"])?;
    let mut entries = Vec::new();
    for (k, o) in operations_of(m, "bracket") {
        let loc = format!("operations[{k}]");
        let inputs = o
            .inputs
            .iter()
            .enumerate()
            .map(|(j, s)| lookup(&space, s, &format!("{loc}.inputs[{j}]")))
            .collect::<Result<Vec<_>>>()?;
        let mut out = crate::linalg::zero_vec(n);
        for (t, term) in o.outputs.iter().enumerate() {
            let tl = format!("{loc}.outputs[{t}]");
            if term.names.len() != 1 {
                return Err(Error::parse(format!("{tl}.names"), "bracket outputs are single basis elements"));
            }
            let i = lookup(&space, &term.names[0], &format!("{tl}.names[0]"))?;
            out[i] += parse_rational(&term.coeff, &format!("{tl}.coeff"))?;
        }
        entries.push((inputs, out));
    }
    TableLInfinity::new(space, l1, entries)
}

// ---------------------------------------------------------------- Quillen models

pub fn quillen_to_file(q: &QuillenModel, window: Window) -> ModelFile {
    let mut m = ModelFile::new(Kind::Quillen, &q.generators, window);
    for (x, terms) in q.delta.iter().enumerate() {
        if terms.is_empty() {
            continue;
        }
        m.operations.push(Operation {
            op: "delta".into(),
            arity: 1,
            inputs: vec![q.generators.name(x).to_string()],
            outputs: terms
                .iter()
                .map(|(w, c)| Term {
                    names: w.iter().map(|&i| q.generators.name(i).to_string()).collect(),
                    coeff: format_q(c),
                })
                .collect(),
        });
    }
    m
}

pub fn quillen_from_file(m: &ModelFile) -> Result<QuillenModel> {
    m.expect_kind(Kind::Quillen)?;
    let generators = m.space()?;
    check_ops(m, &["delta"])?;
    let mut delta = vec![Vec::new(); generators.dim()];
    for (k, o) in operations_of(m, "delta") {
        let loc = format!("operations[{k}]");
        if o.inputs.len() != 1 {
            return Err(Error::parse(format!("{loc}.inputs"), "a differential has one input"));
        }
        let x = lookup(&generators, &o.inputs[0], &format!("{loc}.inputs[0]"))?;
        for (t, term) in o.outputs.iter().enumerate() {
            let tl = format!("{loc}.outputs[{t}]");
            if term.names.is_empty() {
                return Err(Error::parse(format!("{tl}.names"), "empty Lie word"));
            }
            let word = term
                .names
                .iter()
                .enumerate()
                .map(|(j, s)| lookup(&generators, s, &format!("{tl}.names[{j}]")))
                .collect::<Result<Vec<_>>>()?;
            let deg: i64 = word.iter().map(|&i| generators.degree(i)).sum::<i64>() - (word.len() as i64 - 1);
            if deg != generators.degree(x) - 1 {
                return Err(Error::Degree(format!(
                    "{tl}: δ({}) has a term of degree {deg}, expected {}",
                    generators.name(x),
                    generators.degree(x) - 1
                )));
            }
            delta[x].push((word, parse_rational(&term.coeff, &format!("{tl}.coeff"))?));
        }
    }
    Ok(QuillenModel { generators, delta })
}

// ---------------------------------------------------------------- maps and MC elements

/// A coalgebra map `C → D` (`kind = map`) or an element of `Hom(C, L)`
/// (`kind = mc_element`), stored as a `target × source` matrix.
pub fn matrix_to_file(kind: Kind, name: &str, source: &GradedSpace, target: &GradedSpace, f: &Matrix, window: Window) -> ModelFile {
    let mut m = ModelFile::new(kind, source, window);
    m.target_basis = Some(basis_entries(target));
    m.set_matrix(name, f);
    m
}

/// Reads the matrix `name` and checks that both bases agree with the models
/// the file refers to.
pub fn matrix_from_file(m: &ModelFile, kind: Kind, name: &str, source: &GradedSpace, target: &GradedSpace) -> Result<Matrix> {
    m.expect_kind(kind)?;
    check_same_space(&m.space()?, source, "basis")?;
    check_same_space(&m.target_space()?, target, "target_basis")?;
    m.matrix(name, target.dim(), source.dim())
}

pub fn mc_element_file<L: LInfinity>(conv: &ConvolutionAlgebra<L>, tau: &[Q], window: Window) -> ModelFile {
    matrix_to_file(
        Kind::McElement,
        "tau",
        &conv.source.space,
        conv.target.space(),
        &conv.to_map(tau),
        window,
    )
}

pub fn mc_element_from_file<L: LInfinity>(m: &ModelFile, conv: &ConvolutionAlgebra<L>) -> Result<Vector> {
    let f = matrix_from_file(m, Kind::McElement, "tau", &conv.source.space, conv.target.space())?;
    conv.from_map(&f)
}

// ---------------------------------------------------------------- gauge paths and certificates

fn path_into(m: &mut ModelFile, prefix: &str, conv: &ConvolutionAlgebra<TableLInfinity>, path: &GaugePath) {
    for (k, v) in path.x.iter().enumerate() {
        m.set_matrix(&format!("{prefix}x.{k:03}"), &conv.to_map(v));
    }
    for (k, v) in path.lambda.iter().enumerate() {
        m.set_matrix(&format!("{prefix}lambda.{k:03}"), &conv.to_map(v));
    }
}

fn path_from(m: &ModelFile, prefix: &str, conv: &ConvolutionAlgebra<TableLInfinity>) -> Result<GaugePath> {
    let read = |part: &str| -> Result<Vec<Vector>> {
        let mut out = Vec::new();
        loop {
            let key = format!("{prefix}{part}.{:03}", out.len());
            if !m.maps.contains_key(&key) {
                break;
            }
            out.push(conv.from_map(&m.matrix(&key, conv.target.dim(), conv.source.dim())?)?);
        }
        Ok(out)
    };
    let path = GaugePath {
        x: read("x")?,
        lambda: read("lambda")?,
    };
    if path.x.is_empty() {
        return Err(Error::parse(format!("maps.{prefix}x.000"), "a gauge path needs X(t)"));
    }
    Ok(path)
}

fn models_of(m: &ModelFile) -> Result<ConvolutionAlgebra<TableLInfinity>> {
    let source = coalgebra_from_file(m.attachment("source")?)?;
    crate::coalgebra::validate_cdgc(&source)?;
    let target = linfty_from_file(m.attachment("target")?)?;
    check_same_space(&m.space()?, &source.space, "basis")?;
    check_same_space(&m.target_space()?, &target.space, "target_basis")?;
    Ok(ConvolutionAlgebra::new(source, target))
}

fn with_models(kind: Kind, conv: &ConvolutionAlgebra<TableLInfinity>, window: Window) -> ModelFile {
    let mut m = ModelFile::new(kind, &conv.source.space, window);
    m.target_basis = Some(basis_entries(&conv.target.space));
    m.attachments.insert("source".into(), coalgebra_to_file(&conv.source, window));
    m.attachments.insert("target".into(), linfty_to_file(&conv.target, window));
    m
}

/// A self-contained gauge path file: the path in `Hom(C, L) ⊗ Ω₁` together
/// with `C` and `L`.
pub fn gauge_path_file(conv: &ConvolutionAlgebra<TableLInfinity>, path: &GaugePath, window: Window) -> ModelFile {
    let mut m = with_models(Kind::GaugePath, conv, window);
    path_into(&mut m, "", conv, path);
    m
}

pub fn gauge_path_from_file(m: &ModelFile) -> Result<(ConvolutionAlgebra<TableLInfinity>, GaugePath)> {
    m.expect_kind(Kind::GaugePath)?;
    let conv = models_of(m)?;
    let path = path_from(m, "", &conv)?;
    Ok((conv, path))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Equal,
    Distinct,
    Unknown,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Equal => "EQUAL",
            Verdict::Distinct => "DISTINCT",
            Verdict::Unknown => "UNKNOWN",
        }
    }
}

/// A certificate for the outcome of a gauge-equivalence decision between
/// `x` and `y` in `Hom(C, L)`.
pub fn certificate_file(
    conv: &ConvolutionAlgebra<TableLInfinity>,
    x: &[Q],
    y: &[Q],
    outcome: &GaugeOutcome,
    window: Window,
) -> ModelFile {
    let mut m = with_models(Kind::Certificate, conv, window);
    m.set_matrix("x", &conv.to_map(x));
    m.set_matrix("y", &conv.to_map(y));
    match outcome {
        GaugeOutcome::Equal(paths) => {
            m.data.insert("verdict".into(), Value::from(Verdict::Equal.as_str()));
            for (k, p) in paths.iter().enumerate() {
                path_into(&mut m, &format!("path.{k:03}."), conv, p);
            }
        }
        GaugeOutcome::Distinct(w) => {
            m.data.insert("verdict".into(), Value::from(Verdict::Distinct.as_str()));
            m.data.insert("stage".into(), Value::from(w.stage));
            for (k, p) in w.approach.iter().enumerate() {
                path_into(&mut m, &format!("approach.{k:03}."), conv, p);
            }
            m.set_matrix("witness.base", &conv.to_map(&w.base));
            m.set_matrix("witness.discrepancy", &conv.to_map(&w.discrepancy));
            m.set_matrix("witness.functional", &conv.to_map(&w.functional));
            if let Some(c) = &w.homology_class {
                m.set_matrix("witness.homology_class", &conv.to_map(c));
            }
        }
        GaugeOutcome::Unknown(reason) => {
            m.data.insert("verdict".into(), Value::from(Verdict::Unknown.as_str()));
            m.data.insert("reason".into(), Value::from(reason.as_str()));
        }
    }
    m
}

fn paths_from(m: &ModelFile, prefix: &str, conv: &ConvolutionAlgebra<TableLInfinity>) -> Result<Vec<GaugePath>> {
    let mut out = Vec::new();
    loop {
        let p = format!("{prefix}.{:03}.", out.len());
        if !m.maps.contains_key(&format!("{p}x.000")) {
            break;
        }
        out.push(path_from(m, &p, conv)?);
    }
    Ok(out)
}

/// Re-verifies a certificate from its own contents. `Unknown` certificates
/// carry nothing to check.
pub fn verify_certificate(m: &ModelFile) -> Result<Verdict> {
    m.expect_kind(Kind::Certificate)?;
    let conv = models_of(m)?;
    let (t, s) = (conv.target.dim(), conv.source.dim());
    let vec_of = |name: &str| -> Result<Vector> { conv.from_map(&m.matrix(name, t, s)?) };
    let x = vec_of("x")?;
    let y = vec_of("y")?;
    let verdict = match m.data.get("verdict").and_then(Value::as_str) {
        Some("EQUAL") => Verdict::Equal,
        Some("DISTINCT") => Verdict::Distinct,
        Some("UNKNOWN") => Verdict::Unknown,
        _ => return Err(Error::parse("data.verdict", "expected EQUAL, DISTINCT or UNKNOWN")),
    };
    match verdict {
        Verdict::Equal => {
            let paths = paths_from(m, "path", &conv)?;
            if paths.is_empty() {
                return Err(Error::parse("maps.path.000.x.000", "an EQUAL certificate needs a path"));
            }
            verify_chain(&conv, &x, &y, &paths)?;
        }
        Verdict::Distinct => {
            let stage = m
                .data
                .get("stage")
                .and_then(Value::as_i64)
                .ok_or_else(|| Error::parse("data.stage", "missing stage"))?;
            let w = ObstructionWitness {
                stage,
                approach: paths_from(m, "approach", &conv)?,
                base: vec_of("witness.base")?,
                discrepancy: vec_of("witness.discrepancy")?,
                functional: vec_of("witness.functional")?,
                homology_class: if m.maps.contains_key("witness.homology_class") {
                    Some(vec_of("witness.homology_class")?)
                } else {
                    None
                },
            };
            verify_witness(&conv, &x, &y, &w)?;
        }
        Verdict::Unknown => {}
    }
    Ok(verdict)
}
