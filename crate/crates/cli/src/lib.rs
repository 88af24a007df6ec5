//! Job files and report rendering for the `cyclotome` binary.

pub mod builtins;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use cyclotome::algebra::{check_algebra, twisted_diagonal_bimodule, Algebra, Bimodule, GroupTable};
use cyclotome::cartier::{self, CartierCertificate};
use cyclotome::cyclic::{self, CyclicObjectData};
use cyclotome::lambda::{self, LambdaPMorphism};
use cyclotome::{bar, cache, derham, Error, PrimeField};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Json,
}

/// Everything that determines a report. Identical specs give identical bytes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct JobSpec {
    pub command: String,
    /// Positional arguments: morphism literals, `verify`/`search` actions, file paths.
    pub args: Vec<String>,
    /// `builtin:NAME`, `builtin:NAME/F_q`, or a path to an algebra JSON file.
    pub algebra: Option<String>,
    pub p: Option<usize>,
    pub n_max: Option<usize>,
    pub bound: Option<usize>,
    pub weight_cap: Option<usize>,
    pub window: Option<usize>,
    pub nvars: Option<usize>,
    pub dim_v: Option<usize>,
    pub max_candidates: Option<u64>,
    pub output: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub format: Format,
    /// When false the report also carries the wall-clock time.
    pub deterministic: bool,
}

impl Default for JobSpec {
    fn default() -> Self {
        JobSpec {
            command: String::new(),
            args: Vec::new(),
            algebra: None,
            p: None,
            n_max: None,
            bound: None,
            weight_cap: None,
            window: None,
            nvars: None,
            dim_v: None,
            max_candidates: None,
            output: None,
            cache_dir: None,
            format: Format::Text,
            deterministic: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    /// 0 ok, 1 usage error, 2 validation failure.
    pub code: i32,
    pub report: Option<String>,
    pub message: Option<String>,
}

enum Failure {
    Usage(String),
    Math(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Math(e)
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> Res<T> {
    Err(Failure::Usage(msg.into()))
}

struct Report {
    algebra: Option<(String, String)>,
    window: BTreeMap<&'static str, Value>,
    body: Value,
    text: String,
    valid: bool,
}

impl Report {
    fn new(body: Value, text: String) -> Self {
        Report { algebra: None, window: BTreeMap::new(), body, text, valid: true }
    }

    fn on(mut self, loaded: &Loaded) -> Self {
        self.algebra = Some((loaded.source.clone(), loaded.algebra.hash()));
        self
    }

    fn param(mut self, key: &'static str, v: impl Serialize) -> Self {
        self.window.insert(key, serde_json::to_value(v).expect("serializable"));
        self
    }
}

struct Loaded {
    source: String,
    algebra: Algebra,
    group: Option<GroupTable>,
}

fn load(spec: &JobSpec) -> Res<Loaded> {
    let Some(src) = &spec.algebra else {
        return usage(format!("{} needs --algebra", spec.command));
    };
    let (algebra, group) = match src.strip_prefix("builtin:") {
        Some(name) => builtins::resolve(name).map_err(|e| Failure::Usage(e.to_string()))?,
        None => {
            let text = std::fs::read_to_string(src).map_err(|e| Failure::Usage(format!("cannot read {src}: {e}")))?;
            let a = Algebra::from_json(&text)?;
            let g = builtins::group_structure(&a);
            (a, g)
        }
    };
    Ok(Loaded { source: src.clone(), algebra, group })
}

fn to_value(x: &impl Serialize) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn field_of(p: usize) -> Res<PrimeField> {
    PrimeField::new(p as u64).map_err(|e| Failure::Usage(e.to_string()))
}

fn degree_lines(label: &str, dims: &[usize]) -> String {
    let mut s = String::new();
    for (k, d) in dims.iter().enumerate() {
        let _ = writeln!(s, "{label} {k}: {d}");
    }
    s
}

fn check_algebra_cmd(spec: &JobSpec) -> Res<Report> {
    if spec.algebra.is_none() {
        let mut rows = Vec::new();
        let mut text = String::from("kind: builtin catalog\n");
        let mut valid = true;
        for b in builtins::builtin_catalog() {
            let (a, _) = builtins::resolve(b.name)?;
            let violations = check_algebra(&a).len();
            valid &= violations == 0;
            let _ = writeln!(text, "{} (F_{}, dim {}): {} [{}] {}", b.name, b.field, b.dim, b.description, if violations == 0 { "ok" } else { "FAILED" }, b.notes);
            rows.push(json!({ "entry": to_value(&b), "hash": a.hash(), "violations": violations }));
        }
        let mut r = Report::new(Value::Array(rows), text);
        r.valid = valid;
        return Ok(r);
    }
    let l = load(spec)?;
    let a = &l.algebra;
    let violations: Vec<String> = check_algebra(a).iter().map(|v| format!("{v:?}")).collect();
    let mut text = String::from("kind: algebra check\n");
    let _ = writeln!(text, "field: F_{}", a.field().p());
    let _ = writeln!(text, "dim: {}", a.dim());
    let _ = writeln!(text, "basis: {}", a.labels().join(" "));
    let _ = writeln!(text, "commutative: {}", a.is_commutative());
    let _ = writeln!(text, "group algebra: {}", l.group.is_some());
    let _ = writeln!(text, "violations: {}", violations.len());
    for v in &violations {
        let _ = writeln!(text, "  {v}");
    }
    let body = json!({
        "field": a.field().p(),
        "dim": a.dim(),
        "labels": a.labels(),
        "commutative": a.is_commutative(),
        "group_algebra": l.group.is_some(),
        "violations": violations,
    });
    let mut r = Report::new(body, text).on(&l);
    r.valid = violations.is_empty();
    Ok(r)
}

fn hh_cmd(spec: &JobSpec) -> Res<Report> {
    let l = load(spec)?;
    let (p, n) = (spec.p.unwrap_or(1), spec.n_max.unwrap_or(4));
    if p == 0 {
        return usage("--p must be positive");
    }
    let (ap, m) = if p == 1 {
        (l.algebra.clone(), Bimodule::diagonal(&l.algebra))
    } else {
        twisted_diagonal_bimodule(&l.algebra, p)?
    };
    let dims = bar::hh_dims(&ap, &m, n)?;
    let mut text = String::from("kind: HH\n");
    let _ = writeln!(text, "coefficients: {}", if p == 1 { "A".to_string() } else { format!("A^(x{p}) twisted by the cyclic permutation") });
    let _ = writeln!(text, "field: F_{}", l.algebra.field().p());
    text.push_str(&degree_lines("degree", &dims));
    Ok(Report::new(json!({ "kind": "HH", "p": p, "dims": dims }), text).on(&l).param("p", p).param("nmax", n))
}

fn hc_cmd(spec: &JobSpec) -> Res<Report> {
    let l = load(spec)?;
    let (p, n) = (spec.p.unwrap_or(1), spec.n_max.unwrap_or(4));
    if n == 0 {
        return usage("--nmax must be at least 1");
    }
    let e = CyclicObjectData::from_algebra(&l.algebra, p, n + 1)?;
    let rep = cyclic::hc_dims(&e, n - 1)?;
    Ok(Report::new(to_value(&rep), rep.to_text()).on(&l).param("p", p).param("nmax", n).param("levels", rep.levels_used))
}

fn hp_cmd(spec: &JobSpec) -> Res<Report> {
    let l = load(spec)?;
    let (p, bound, width) = (spec.p.unwrap_or(1), spec.bound.unwrap_or(0), spec.window.unwrap_or(2));
    let e = CyclicObjectData::from_algebra(&l.algebra, p, bound + width + 4)?;
    let rep = cyclic::hp_stabilized_window(&e, bound, width)?;
    Ok(Report::new(to_value(&rep), rep.to_text())
        .on(&l)
        .param("p", p)
        .param("bound", bound)
        .param("width", width)
        .param("levels", rep.levels_used))
}

fn tate_cmd(spec: &JobSpec) -> Res<Report> {
    let l = load(spec)?;
    let (p, n) = (spec.p.unwrap_or(2), spec.n_max.unwrap_or(1));
    if n == 0 {
        return usage("--nmax must be at least 1");
    }
    let e = CyclicObjectData::from_algebra(&l.algebra, p, n)?;
    let mut rows = Vec::new();
    let mut text = String::from("kind: Tate\n");
    let _ = writeln!(text, "group: Z/{p} acting by the cyclic permutation");
    for level in 1..=n {
        let (even, odd) = cyclic::tate_dims(p, e.sigma(level))?;
        let free = (even, odd) == (0, 0);
        let _ = writeln!(text, "level [{level}] (dim {}): Tate dims ({even}, {odd}), free: {free}", e.level(level).dim);
        rows.push(json!({ "level": level, "dim": e.level(level).dim, "tate": [even, odd], "free": free }));
    }
    Ok(Report::new(Value::Array(rows), text).on(&l).param("p", p).param("nmax", n))
}

fn identities_cmd(spec: &JobSpec) -> Res<Report> {
    let l = load(spec)?;
    let (p, n) = (spec.p.unwrap_or(1), spec.n_max.unwrap_or(4));
    let e = CyclicObjectData::from_algebra(&l.algebra, p, n)?;
    let mut all = Vec::new();
    for level in 1..=n {
        all.extend(cyclic::check_identities(&e, level)?);
    }
    let mut text = String::from("kind: identities\n");
    for c in &all {
        let _ = writeln!(text, "[{}] {}: {}", c.level, c.name, if c.holds { "ok" } else { "FAILED" });
    }
    let mut r = Report::new(to_value(&all), text).on(&l).param("p", p).param("nmax", n);
    r.valid = all.iter().all(|c| c.holds);
    Ok(r)
}

fn parse_morphism(s: &str) -> Res<LambdaPMorphism> {
    s.parse().map_err(|e: Error| Failure::Usage(e.to_string()))
}

fn describe(f: &LambdaPMorphism, text: &mut String) -> Value {
    let (j, f0) = lambda::normal_form(f);
    let _ = writeln!(text, "morphism: {f}");
    let _ = writeln!(text, "normal form: tau^{j} . ({f0})");
    let image = lambda::functor_i(f).ok();
    if let Some(g) = &image {
        let _ = writeln!(text, "i(f): {g}");
    }
    json!({
        "morphism": f.to_string(),
        "tau_power": j,
        "f0": f0.to_string(),
        "i": image.map(|g| g.to_string()),
    })
}

fn lambda_cmd(spec: &JobSpec) -> Res<Report> {
    let mut text = String::from("kind: Lambda_p\n");
    match spec.args.as_slice() {
        [hom, n, m] if hom == "hom" => {
            let parse = |s: &str| s.parse::<usize>().map_err(|_| Failure::Usage(format!("bad object {s:?}")));
            let (n, m) = (parse(n)?, parse(m)?);
            let Some(p) = spec.p else { return usage("lambda hom needs --p") };
            let all = lambda::hom_enumerate(p, n, m)?;
            let _ = writeln!(text, "Hom([{n}], [{m}]) in Lambda_{p}: {}", all.len());
            for f in &all {
                let _ = writeln!(text, "  {f}");
            }
            let list: Vec<String> = all.iter().map(|f| f.to_string()).collect();
            Ok(Report::new(json!({ "count": all.len(), "morphisms": list }), text).param("p", p).param("n", n).param("m", m))
        }
        [one] => {
            let f = parse_morphism(one)?;
            let mut body = describe(&f, &mut text);
            let mut r = Report::new(Value::Null, String::new());
            if spec.algebra.is_some() {
                let l = load(spec)?;
                let m = lambda::linearize_a_sharp(&l.algebra, &f)?;
                let rank = cyclotome::linalg::rank(&m);
                let _ = writeln!(text, "A_#(f): {} x {}, rank {rank}", m.rows(), m.cols());
                body["linearization"] = json!({ "rows": m.rows(), "cols": m.cols(), "rank": rank });
                r = r.on(&l);
            }
            r.body = body;
            r.text = text;
            Ok(r)
        }
        [g, f] => {
            let (g, f) = (parse_morphism(g)?, parse_morphism(f)?);
            let h = lambda::compose(&g, &f).map_err(|e| Failure::Usage(e.to_string()))?;
            let _ = writeln!(text, "composite of {g} after {f}");
            let body = describe(&h, &mut text);
            Ok(Report::new(body, text))
        }
        _ => usage("lambda takes a morphism literal such as \"p=2 [2]->[1] : 0,0\", two literals to compose, or `hom N M`"),
    }
}

fn not_group(l: &Loaded) -> Failure {
    Failure::Math(Error::UnsupportedAlgebra(format!(
        "{} is not a group algebra on its basis, and no quasi-Frobenius constructor applies (free tensor algebras: `qf free`)",
        l.source
    )))
}

fn qf_cmd(spec: &JobSpec) -> Res<Report> {
    match spec.args.first().map(String::as_str) {
        None => {
            let l = load(spec)?;
            let field = l.algebra.field();
            let p = spec.p.unwrap_or(field.p() as usize);
            let g = l.group.clone().ok_or_else(|| not_group(&l))?;
            let qf = cartier::qf_group(&g, p, field)?;
            let body = json!({ "construction": to_value(&qf.construction), "checks": to_value(&qf.checks) });
            Ok(Report::new(body, qf.to_text()).on(&l).param("p", p))
        }
        Some("free") => {
            let p = spec.p.unwrap_or(2);
            let (dim_v, cap) = (spec.dim_v.unwrap_or(1), spec.weight_cap.unwrap_or(3));
            let qf = cartier::qf_free(dim_v, p, field_of(p)?, cap)?;
            let body = json!({ "construction": to_value(&qf.construction), "checks": to_value(&qf.checks) });
            Ok(Report::new(body, qf.to_text()).param("p", p).param("dim_v", dim_v).param("weight_cap", cap))
        }
        Some("search") => {
            let l = load(spec)?;
            let p = spec.p.unwrap_or(l.algebra.field().p() as usize);
            let max = spec.max_candidates.unwrap_or(1 << 20);
            let rep = cartier::qf_search(&l.algebra, p, max)?;
            Ok(Report::new(to_value(&rep), rep.to_text()).on(&l).param("p", p).param("max_candidates", max))
        }
        Some(other) => usage(format!("unknown qf action {other:?}; expected `free` or `search`")),
    }
}

fn cartier_cmd(spec: &JobSpec) -> Res<Report> {
    let verify = match spec.args.first().map(String::as_str) {
        None => false,
        Some("verify") => true,
        Some(other) => return usage(format!("unknown cartier action {other:?}; expected `verify`")),
    };
    let (cert, loaded) = if spec.algebra.is_none() {
        let Some(nvars) = spec.nvars else { return usage("cartier needs --algebra or --nvars") };
        let (p, cap) = (spec.p.unwrap_or(2), spec.weight_cap.unwrap_or(8));
        field_of(p)?;
        (cartier::inverse_cartier_commutative(nvars, p, cap)?, None)
    } else {
        let l = load(spec)?;
        let field = l.algebra.field();
        let p = spec.p.unwrap_or(field.p() as usize);
        let g = l.group.clone().ok_or_else(|| not_group(&l))?;
        let qf = cartier::qf_group(&g, p, field)?;
        let bound = spec.bound.unwrap_or(0);
        let levels = spec.n_max.unwrap_or(bound + 6);
        (cartier::cartier_phi(&qf, bound, levels)?, Some(l))
    };
    let cert = if verify { cartier::verify_certificate(&cert)? } else { cert };
    let mut text = cert.to_text();
    if verify {
        text.push_str("verified: recomputed from scratch and identical\n");
    }
    let mut r = Report::new(to_value(&cert), text).param("p", cert.p).param("bound", cert.bound).param("levels", cert.levels);
    if let Some(l) = &loaded {
        r = r.on(l);
    }
    r.valid = cert.all_iso();
    Ok(r)
}

fn verify_cmd(spec: &JobSpec) -> Res<Report> {
    let [path] = spec.args.as_slice() else {
        return usage("verify takes one certificate file");
    };
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {path}: {e}")))?;
    let mut v: Value = serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{path} is not JSON: {e}")))?;
    if let Some(inner) = v.get_mut("report") {
        v = inner.take();
    }
    let cert: CartierCertificate =
        serde_json::from_value(v).map_err(|e| Failure::Usage(format!("{path} is not a Cartier certificate: {e}")))?;
    let fresh = cartier::verify_certificate(&cert)?;
    let mut out = fresh.to_text();
    out.push_str("verified: recomputed from scratch and identical\n");
    Ok(Report::new(to_value(&fresh), out).param("p", fresh.p).param("bound", fresh.bound).param("levels", fresh.levels))
}

fn derham_cmd(spec: &JobSpec) -> Res<Report> {
    let (nvars, p, cap) = (spec.nvars.unwrap_or(1), spec.p.unwrap_or(0), spec.weight_cap.unwrap_or(6));
    let rep = derham::derham_cohomology(nvars, p as u64, cap)?;
    Ok(Report::new(to_value(&rep), rep.to_text()).param("nvars", nvars).param("p", p).param("weight_cap", cap))
}

fn degeneration_cmd(spec: &JobSpec) -> Res<Report> {
    if spec.algebra.is_some() {
        let l = load(spec)?;
        let n = spec.n_max.unwrap_or(3);
        let rep = derham::hodge_degeneration_cyclic(&l.algebra, n)?;
        return Ok(Report::new(to_value(&rep), rep.to_text()).on(&l).param("max_degree", n));
    }
    let Some(nvars) = spec.nvars else { return usage("degeneration needs --algebra or --nvars") };
    let (p, cap) = (spec.p.unwrap_or(0), spec.weight_cap.unwrap_or(6));
    let rep = derham::hodge_degeneration_polynomial(nvars, p as u64, cap)?;
    Ok(Report::new(to_value(&rep), rep.to_text()).param("nvars", nvars).param("p", p).param("weight_cap", cap))
}

fn execute(spec: &JobSpec) -> Res<Report> {
    match spec.command.as_str() {
        "check-algebra" => check_algebra_cmd(spec),
        "hh" => hh_cmd(spec),
        "hc" => hc_cmd(spec),
        "hp" => hp_cmd(spec),
        "tate" => tate_cmd(spec),
        "identities" => identities_cmd(spec),
        "lambda" => lambda_cmd(spec),
        "qf" => qf_cmd(spec),
        "cartier" => cartier_cmd(spec),
        "verify" => verify_cmd(spec),
        "derham" => derham_cmd(spec),
        "degeneration" => degeneration_cmd(spec),
        other => usage(format!("unknown command {other:?}")),
    }
}

fn render(spec: &JobSpec, r: &Report, elapsed: Option<f64>) -> String {
    match spec.format {
        Format::Json => {
            let mut env = json!({
                "version": VERSION,
                "command": spec.command,
                "args": spec.args,
                "algebra": r.algebra.as_ref().map(|(s, h)| json!({ "source": s, "hash": h })),
                "window": to_value(&r.window),
                "valid": r.valid,
                "report": r.body,
            });
            if let Some(t) = elapsed {
                env["elapsed_seconds"] = json!(t);
            }
            let mut s = serde_json::to_string_pretty(&env).expect("serializable");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = format!("cyclotome {VERSION}\ncommand: {}", spec.command);
            for a in &spec.args {
                let _ = write!(s, " {a}");
            }
            s.push('\n');
            if let Some((src, hash)) = &r.algebra {
                let _ = writeln!(s, "algebra: {src} {hash}");
            }
            let window: Vec<String> = r.window.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = writeln!(s, "window: {}", window.join(" "));
            if let Some(t) = elapsed {
                let _ = writeln!(s, "elapsed: {t:.3}s");
            }
            s.push_str("--\n");
            s.push_str(&r.text);
            if !r.valid {
                s.push_str("result: validation failed\n");
            }
            s
        }
    }
}

fn message(e: &Error) -> String {
    match e {
        Error::NotStabilized { detail, .. } => format!("{e}: {detail}"),
        Error::NonzeroUPrime { witness, .. } => format!("{e}: witness {witness:?}"),
        _ => e.to_string(),
    }
}

/// Runs a job, writing the report to `spec.output` when set.
pub fn run(spec: &JobSpec) -> Outcome {
    cache::set_dir(spec.cache_dir.clone());
    let start = Instant::now();
    let result = execute(spec);
    let elapsed = (!spec.deterministic).then(|| start.elapsed().as_secs_f64());
    match result {
        Ok(r) => {
            let report = render(spec, &r, elapsed);
            if let Some(path) = &spec.output {
                if let Err(e) = std::fs::write(path, &report) {
                    return Outcome { code: 1, report: Some(report), message: Some(format!("cannot write {}: {e}", path.display())) };
                }
            }
            let code = if r.valid { 0 } else { 2 };
            Outcome { code, report: Some(report), message: None }
        }
        Err(Failure::Usage(m)) => Outcome { code: 1, report: None, message: Some(m) },
        Err(Failure::Math(e)) => {
            let code = if e.is_validation() { 2 } else { 1 };
            Outcome { code, report: None, message: Some(message(&e)) }
        }
    }
}
