//! Run configuration, command dispatch and report rendering.
//!
//! A config is a list of `key = value` lines with `#` comments. Unknown keys
//! are rejected. Lists are comma separated; complex numbers are written
//! `re`, `re+imi` or `re-imi`.

use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::field::{make_quadratic_field, parse_field_label, FieldEmbedding};
use crate::lattice::EmbeddedLattice;
use crate::quad::Tolerance;
use crate::serial::ComplexPair;
use crate::trace::{assemble_geometric_trace, AutomorphicFormData, ClassInventory, TermKind, TraceReport};
use crate::transforms::{TestFunction, TransformTriple};
use crate::verify::{run_suite, CriterionOutcome, VerifyReport};
use crate::zeta::{functional_equation_residual, residue_at_one, zeta_continued, ZetaContext};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormKind {
    DemoEisenstein,
    CuspFormZero,
    /// Constant-term model with the `eta` and `phi` coefficients from the config.
    ConstantTerm,
}

impl FormKind {
    pub fn name(self) -> &'static str {
        match self {
            FormKind::DemoEisenstein => "demo-eisenstein",
            FormKind::CuspFormZero => "cusp-form-zero",
            FormKind::ConstantTerm => "constant-term",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub field: i64,
    pub psi_centers: Vec<f64>,
    pub psi_widths: Vec<f64>,
    pub psi_amplitude: f64,
    pub form: FormKind,
    pub s: Complex64,
    pub m_u: Vec<i64>,
    pub eta: Complex64,
    pub phi: Complex64,
    pub quad_rel_tol: f64,
    pub quad_abs_tol: f64,
    pub a_cut: f64,
    /// Imaginary offsets added to `s` by the `zeta` command.
    pub zeta_t_grid: Vec<f64>,
    /// Number of sample points in the `transforms` table.
    pub samples: usize,
    /// `-` writes to standard output.
    pub output: String,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            field: 2,
            psi_centers: vec![4.5, 4.5],
            psi_widths: vec![4.5, 4.5],
            psi_amplitude: 1.0,
            form: FormKind::DemoEisenstein,
            s: Complex64::new(0.8, 0.0),
            m_u: vec![0],
            eta: Complex64::new(1.0, 0.0),
            phi: Complex64::new(0.0, 0.0),
            quad_rel_tol: 1e-10,
            quad_abs_tol: 1e-13,
            a_cut: 100.0,
            zeta_t_grid: Vec::new(),
            samples: 11,
            output: "-".into(),
            format: OutputFormat::Json,
        }
    }
}

pub const KEYS: [&str; 16] = [
    "field",
    "psi_centers",
    "psi_widths",
    "psi_amplitude",
    "form",
    "s",
    "m_u",
    "eta",
    "phi",
    "quad_rel_tol",
    "quad_abs_tol",
    "A",
    "zeta_t_grid",
    "samples",
    "output",
    "format",
];

fn fmt_f64(x: f64) -> String {
    if x != 0.0 && (x.abs() < 1e-4 || x.abs() >= 1e15) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

pub fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        fmt_f64(z.re)
    } else {
        let sign = if z.im.is_sign_negative() { '-' } else { '+' };
        format!("{}{sign}{}i", fmt_f64(z.re), fmt_f64(z.im.abs()))
    }
}

/// Parses `2`, `0.5+3i`, `-1e-3-2.5i`, `3i` or `-i`.
pub fn parse_complex(text: &str) -> std::result::Result<Complex64, String> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("not a complex number: {text:?}");
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse::<f64>().map_err(|_| bad())?,
    };
    let re = re.parse::<f64>().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

fn parse_list<T: FromStr>(v: &str) -> std::result::Result<Vec<T>, String> {
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|x| x.trim().parse::<T>().map_err(|_| format!("bad list entry {:?}", x.trim()))).collect()
}

fn join<T>(xs: &[T], f: impl Fn(&T) -> String) -> String {
    xs.iter().map(f).collect::<Vec<_>>().join(", ")
}

fn positive(key: &str, x: f64) -> std::result::Result<f64, String> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(format!("{key} must be positive, got {x}"))
    }
}

fn parse_f64(v: &str) -> std::result::Result<f64, String> {
    v.parse::<f64>().map_err(|_| format!("not a number: {v:?}"))
}

impl RunConfig {
    fn set(&mut self, key: &str, v: &str) -> std::result::Result<(), String> {
        match key {
            "field" => {
                let d = match v.parse::<i64>() {
                    Ok(d) => d,
                    Err(_) => parse_field_label(v).map_err(|e| e.to_string())?,
                };
                make_quadratic_field(d).map_err(|e| e.to_string())?;
                self.field = d;
            }
            "psi_centers" => self.psi_centers = parse_list(v)?,
            "psi_widths" => self.psi_widths = parse_list(v)?,
            "psi_amplitude" => self.psi_amplitude = parse_f64(v)?,
            "form" => {
                self.form = match v {
                    "demo-eisenstein" => FormKind::DemoEisenstein,
                    "cusp-form-zero" => FormKind::CuspFormZero,
                    "constant-term" => FormKind::ConstantTerm,
                    _ => return Err(format!("form must be demo-eisenstein, cusp-form-zero or constant-term, got {v:?}")),
                }
            }
            "s" => self.s = parse_complex(v)?,
            "m_u" => self.m_u = parse_list(v)?,
            "eta" => self.eta = parse_complex(v)?,
            "phi" => self.phi = parse_complex(v)?,
            "quad_rel_tol" => self.quad_rel_tol = positive(key, parse_f64(v)?)?,
            "quad_abs_tol" => self.quad_abs_tol = positive(key, parse_f64(v)?)?,
            "A" => self.a_cut = positive(key, parse_f64(v)?)?,
            "zeta_t_grid" => self.zeta_t_grid = parse_list(v)?,
            "samples" => {
                self.samples = v.parse::<usize>().map_err(|_| format!("samples must be a count, got {v:?}"))?;
                if self.samples < 2 {
                    return Err("samples must be at least 2".into());
                }
            }
            "output" => self.output = v.to_string(),
            "format" => {
                self.format = match v {
                    "json" => OutputFormat::Json,
                    "csv" => OutputFormat::Csv,
                    _ => return Err(format!("format must be json or csv, got {v:?}")),
                }
            }
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    /// Applies one `key = value` assignment outside a config file.
    pub fn assign(&mut self, key: &str, value: &str) -> Result<()> {
        self.set(key, value).map_err(|message| Error::Config { line: 0, message: format!("{key}: {message}") })?;
        self.validate(0)
    }

    fn validate(&self, line: usize) -> Result<()> {
        let fail = |message: String| Err(Error::Config { line, message });
        if self.psi_centers.len() != 2 || self.psi_widths.len() != 2 {
            return fail("psi_centers and psi_widths need one entry per embedding (2)".into());
        }
        if self.m_u.len() != 1 {
            return fail("m_u needs one entry per unit generator (1)".into());
        }
        if let Err(e) = TestFunction::new(self.psi_centers.clone(), self.psi_widths.clone(), self.psi_amplitude) {
            return fail(format!("psi: {e}"));
        }
        Ok(())
    }

    pub fn tolerance(&self) -> Tolerance {
        Tolerance::new(self.quad_abs_tol, self.quad_rel_tol)
    }

    pub fn field(&self) -> Result<FieldEmbedding> {
        make_quadratic_field(self.field)
    }

    pub fn psi(&self) -> Result<TestFunction> {
        TestFunction::new(self.psi_centers.clone(), self.psi_widths.clone(), self.psi_amplitude)
    }

    pub fn form(&self, field: &FieldEmbedding) -> Result<AutomorphicFormData> {
        match self.form {
            FormKind::DemoEisenstein => AutomorphicFormData::demo_eisenstein(field, self.s, self.m_u.clone()),
            FormKind::CuspFormZero => AutomorphicFormData::cusp_form_zero(field, self.s),
            FormKind::ConstantTerm => AutomorphicFormData::constant_term_model(field, self.s, self.m_u.clone(), self.eta, self.phi),
        }
    }

    /// Canonical text: every key in `KEYS` order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            let sep = if v.is_empty() { "" } else { " " };
            writeln!(out, "{k} ={sep}{v}").expect("write to string")
        };
        line("field", self.field.to_string());
        line("psi_centers", join(&self.psi_centers, |x| fmt_f64(*x)));
        line("psi_widths", join(&self.psi_widths, |x| fmt_f64(*x)));
        line("psi_amplitude", fmt_f64(self.psi_amplitude));
        line("form", self.form.name().into());
        line("s", format_complex(self.s));
        line("m_u", join(&self.m_u, |x| x.to_string()));
        line("eta", format_complex(self.eta));
        line("phi", format_complex(self.phi));
        line("quad_rel_tol", fmt_f64(self.quad_rel_tol));
        line("quad_abs_tol", fmt_f64(self.quad_abs_tol));
        line("A", fmt_f64(self.a_cut));
        line("zeta_t_grid", join(&self.zeta_t_grid, |x| fmt_f64(*x)));
        line("samples", self.samples.to_string());
        line("output", self.output.clone());
        line("format", match self.format {
            OutputFormat::Json => "json".into(),
            OutputFormat::Csv => "csv".into(),
        });
        out
    }
}

/// Parses config text; absent keys keep their defaults.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut seen = Vec::new();
    let mut last = 0;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fail = |message: String| Error::Config { line, message };
        let (key, value) = body.split_once('=').ok_or_else(|| fail(format!("expected `key = value`, got {body:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        if seen.contains(&key) {
            return Err(fail(format!("duplicate key {key:?}")));
        }
        cfg.set(key, value).map_err(|m| fail(if m.starts_with("unknown key") { m } else { format!("{key}: {m}") }))?;
        seen.push(key);
        last = line;
    }
    cfg.validate(last)?;
    Ok(cfg)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    FieldInfo,
    Zeta,
    Transforms,
    Trace(Vec<TermKind>),
    Verify(Vec<u8>),
}

impl Command {
    pub const NAMES: [&'static str; 5] = ["field-info", "zeta", "transforms", "trace", "verify"];
}

/// Term names, `all`, or a comma-separated list of them.
pub fn parse_terms(text: &str) -> Result<Vec<TermKind>> {
    if text == "all" {
        return Ok(TermKind::ALL.to_vec());
    }
    text.split(',')
        .map(|x| TermKind::parse(x.trim()).ok_or_else(|| Error::Domain(format!("unknown term {x:?}; expected elliptic, mixed, parabolic, hyp-par or all"))))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct FieldInfo {
    pub field: String,
    pub radicand: i64,
    pub discriminant: i64,
    pub fundamental_unit: String,
    pub fundamental_unit_embeddings: Vec<f64>,
    pub multiplier_generator: String,
    pub ring_covolume: f64,
    pub dual_covolume: f64,
    pub zeta_residue: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ZetaRow {
    pub s: ComplexPair,
    pub value: ComplexPair,
    pub method: String,
    pub functional_equation_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ZetaReport {
    pub field: String,
    pub m: Vec<i64>,
    pub rows: Vec<ZetaRow>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TransformRow {
    pub x: f64,
    pub q: f64,
    pub g: f64,
    pub h: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TransformsReport {
    pub psi_centers: Vec<f64>,
    pub psi_widths: Vec<f64>,
    pub psi_amplitude: f64,
    pub g_radius: Vec<f64>,
    /// Values on the diagonal `(x, x)`.
    pub rows: Vec<TransformRow>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum Report {
    FieldInfo(FieldInfo),
    Zeta(ZetaReport),
    Transforms(TransformsReport),
    Trace(TraceReport),
    Verify(VerifyReport),
}

impl Report {
    /// False only for a `verify` report with a failed criterion.
    pub fn passed(&self) -> bool {
        match self {
            Report::Verify(v) => v.passed,
            _ => true,
        }
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Json => serde_json::to_string_pretty(self).map(|s| s + "\n").map_err(|e| Error::Domain(e.to_string())),
            OutputFormat::Csv => self.to_csv(),
        }
    }

    fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Domain(e.to_string());
        match self {
            Report::FieldInfo(f) => {
                w.write_record(["key", "value"]).map_err(io)?;
                let units = join(&f.fundamental_unit_embeddings, |x| fmt_f64(*x));
                let rows: [(&str, String); 9] = [
                    ("field", f.field.clone()),
                    ("radicand", f.radicand.to_string()),
                    ("discriminant", f.discriminant.to_string()),
                    ("fundamental_unit", f.fundamental_unit.clone()),
                    ("fundamental_unit_embeddings", units),
                    ("multiplier_generator", f.multiplier_generator.clone()),
                    ("ring_covolume", fmt_f64(f.ring_covolume)),
                    ("dual_covolume", fmt_f64(f.dual_covolume)),
                    ("zeta_residue", fmt_f64(f.zeta_residue)),
                ];
                for (k, v) in rows {
                    w.write_record([k, v.as_str()]).map_err(io)?;
                }
            }
            Report::Zeta(z) => {
                w.write_record(["s_re", "s_im", "value_re", "value_im", "method", "functional_equation_residual"]).map_err(io)?;
                for r in &z.rows {
                    let cells = [r.s.re, r.s.im, r.value.re, r.value.im].map(fmt_f64);
                    w.write_record(cells.iter().map(String::as_str).chain([r.method.as_str(), &fmt_f64(r.functional_equation_residual)]))
                        .map_err(io)?;
                }
            }
            Report::Transforms(t) => {
                for r in &t.rows {
                    w.serialize(r).map_err(io)?;
                }
            }
            Report::Trace(t) => {
                w.write_record(["term", "value_re", "value_im", "A_s_re", "A_s_im", "A_1ms_re", "A_1ms_im", "error_estimate"]).map_err(io)?;
                for k in t.terms.iter().chain([&t.total]) {
                    let cells = [k.value_re, k.value_im, k.a_s_coeff.re, k.a_s_coeff.im, k.a_1ms_coeff.re, k.a_1ms_coeff.im, k.error_estimate]
                        .map(fmt_f64);
                    w.write_record([k.term.as_str()].into_iter().chain(cells.iter().map(String::as_str))).map_err(io)?;
                }
            }
            Report::Verify(v) => {
                w.write_record(["criterion", "check", "observed", "limit", "passed"]).map_err(io)?;
                for k in &v.criteria {
                    for c in &k.checks {
                        w.write_record([k.id.to_string(), c.name.clone(), fmt_f64(c.observed), fmt_f64(c.limit), c.passed.to_string()])
                            .map_err(io)?;
                    }
                }
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Domain(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Domain(e.to_string()))
    }
}

fn field_info(cfg: &RunConfig) -> Result<FieldInfo> {
    let field = cfg.field()?;
    let unit = field.fundamental_unit()?;
    let ring = EmbeddedLattice::ring_of_integers(&field);
    Ok(FieldInfo {
        field: field.label(),
        radicand: field.radicand,
        discriminant: field.discriminant,
        fundamental_unit: field.format_int(unit),
        fundamental_unit_embeddings: field.embed_int(unit),
        multiplier_generator: field.format_int(field.multiplier_generator()?),
        ring_covolume: ring.covolume,
        dual_covolume: ring.dual().covolume,
        zeta_residue: residue_at_one(&ZetaContext::for_field(&field, vec![0])?)?,
    })
}

fn zeta(cfg: &RunConfig) -> Result<ZetaReport> {
    let field = cfg.field()?;
    let ctx = ZetaContext::for_field(&field, cfg.m_u.clone())?;
    let offsets = if cfg.zeta_t_grid.is_empty() { vec![0.0] } else { cfg.zeta_t_grid.clone() };
    let rows = offsets
        .iter()
        .map(|t| {
            let s = cfg.s + Complex64::new(0.0, *t);
            let v = zeta_continued(&ctx, s)?;
            Ok(ZetaRow {
                s: s.into(),
                value: v.value.into(),
                method: v.method,
                functional_equation_residual: functional_equation_residual(&ctx, s)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ZetaReport { field: field.label(), m: cfg.m_u.clone(), rows })
}

fn transforms(cfg: &RunConfig) -> Result<TransformsReport> {
    let t = TransformTriple::with_tolerance(cfg.psi()?, cfg.tolerance())?;
    let g_radius = vec![t.g_radius(0), t.g_radius(1)];
    let top = g_radius[0].min(g_radius[1]);
    let rows = (0..cfg.samples)
        .map(|j| {
            let x = top * j as f64 / (cfg.samples - 1) as f64;
            Ok(TransformRow { x, q: t.q(&[x, x])?, g: t.g(&[x, x])?, h: t.h(&[x, x]) })
        })
        .collect::<Result<_>>()?;
    Ok(TransformsReport {
        psi_centers: cfg.psi_centers.clone(),
        psi_widths: cfg.psi_widths.clone(),
        psi_amplitude: cfg.psi_amplitude,
        g_radius,
        rows,
    })
}

fn trace(cfg: &RunConfig, terms: &[TermKind]) -> Result<TraceReport> {
    let field = cfg.field()?;
    let t = TransformTriple::with_tolerance(cfg.psi()?, cfg.tolerance())?;
    let form = cfg.form(&field)?;
    let inventory = ClassInventory::demo(&field)?;
    assemble_geometric_trace(cfg.a_cut, &field, &t, &form, &inventory, terms, cfg.tolerance())
}

/// Runs a command. `progress` sees each finished acceptance criterion.
pub fn run(command: &Command, cfg: &RunConfig, progress: impl FnMut(&CriterionOutcome, f64)) -> Result<Report> {
    Ok(match command {
        Command::FieldInfo => Report::FieldInfo(field_info(cfg)?),
        Command::Zeta => Report::Zeta(zeta(cfg)?),
        Command::Transforms => Report::Transforms(transforms(cfg)?),
        Command::Trace(terms) => Report::Trace(trace(cfg, terms)?),
        Command::Verify(ids) => {
            let ids = if ids.is_empty() { (1..=12).collect() } else { ids.clone() };
            Report::Verify(run_suite(&ids, progress))
        }
    })
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: String,
}

/// `{"error": {"kind": …, "message": …}}`
pub fn error_json(e: &Error) -> String {
    let body = serde_json::json!({ "error": ErrorBody { kind: e.kind(), message: e.to_string() } });
    body.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        assert_eq!(parse_config("").unwrap(), RunConfig::default());
        assert_eq!(parse_config("# nothing here\n\n").unwrap(), RunConfig::default());
    }

    #[test]
    fn out_of_range_names_key_and_line() {
        let e = parse_config("field = 2\nA = -1\n").unwrap_err();
        assert!(matches!(&e, Error::Config { line: 2, message } if message.contains("A")), "{e}");
        let e = parse_config("quad_rel_tol = 0").unwrap_err();
        assert!(e.to_string().contains("quad_rel_tol"));
    }

    #[test]
    fn strict_keys_and_lines() {
        let e = parse_config("feild = 2").unwrap_err();
        assert!(matches!(&e, Error::Config { line: 1, message } if message.contains("feild")));
        assert!(matches!(parse_config("s 0.5").unwrap_err(), Error::Config { line: 1, .. }));
        assert!(matches!(parse_config("A = 1\nA = 2").unwrap_err(), Error::Config { line: 2, .. }));
        assert!(parse_config("field = 4").is_err());
        assert!(parse_config("psi_centers = 4.5").is_err());
        assert!(parse_config("form = maass").is_err());
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let text = RunConfig::default().to_text();
        assert_eq!(parse_config(&text).unwrap().to_text(), text);
        let custom = "field = Q(sqrt 5)\ns = 0.7-2.5i\nm_u = -2\nA = 3.5e16\nquad_abs_tol = 1e-12\nzeta_t_grid = 0, 1.5, 3\nform = constant-term\neta = 2i\nformat = csv\n";
        let cfg = parse_config(custom).unwrap();
        assert_eq!(cfg.field, 5);
        assert_eq!(cfg.s, Complex64::new(0.7, -2.5));
        assert_eq!(cfg.eta, Complex64::new(0.0, 2.0));
        let text = cfg.to_text();
        assert_eq!(parse_config(&text).unwrap(), cfg);
        assert_eq!(parse_config(&text).unwrap().to_text(), text);
        for key in KEYS {
            assert!(text.contains(&format!("\n{key} =")) || text.starts_with(&format!("{key} =")), "{key}");
        }
    }

    #[test]
    fn complex_literals() {
        let cases = [("2", (2.0, 0.0)), ("0.5+3i", (0.5, 3.0)), ("-1e-3-2.5i", (-1e-3, -2.5)), ("3i", (0.0, 3.0)), ("-i", (0.0, -1.0)), ("1e+2+1E-1i", (100.0, 0.1))];
        for (text, (re, im)) in cases {
            assert_eq!(parse_complex(text).unwrap(), Complex64::new(re, im), "{text}");
        }
        assert!(parse_complex("1+").is_err());
        assert!(parse_complex("abc").is_err());
        for z in [Complex64::new(0.25, -1e-7), Complex64::new(-3.0, 0.0), Complex64::new(0.0, 2.0)] {
            assert_eq!(parse_complex(&format_complex(z)).unwrap(), z);
        }
    }

    #[test]
    fn zeta_at_two() {
        let mut cfg = RunConfig::default();
        cfg.assign("s", "2").unwrap();
        let report = run(&Command::Zeta, &cfg, |_, _| {}).unwrap();
        let json = report.render(OutputFormat::Json).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        let z = v["rows"][0]["value"]["re"].as_f64().unwrap();
        assert!((z - 5.7398).abs() < 1e-4, "{json}");
        assert!(report.render(OutputFormat::Csv).unwrap().starts_with("s_re,s_im,value_re"));
    }

    #[test]
    fn reports_are_deterministic() {
        let cfg = RunConfig { samples: 4, ..RunConfig::default() };
        for cmd in [Command::FieldInfo, Command::Transforms] {
            let a = run(&cmd, &cfg, |_, _| {}).unwrap();
            let b = run(&cmd, &cfg, |_, _| {}).unwrap();
            for f in [OutputFormat::Json, OutputFormat::Csv] {
                assert_eq!(a.render(f).unwrap(), b.render(f).unwrap());
            }
            assert!(a.passed());
        }
    }

    #[test]
    fn term_selection() {
        assert_eq!(parse_terms("all").unwrap(), TermKind::ALL.to_vec());
        assert_eq!(parse_terms("elliptic, hyp-par").unwrap(), vec![TermKind::Elliptic, TermKind::HypPar]);
        assert!(parse_terms("identity").is_err());
    }

    #[test]
    fn error_body_is_structured() {
        let v: serde_json::Value = serde_json::from_str(&error_json(&Error::Pole("s = 1".into()))).unwrap();
        assert_eq!(v["error"]["kind"], "pole");
    }
}
