use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use shapoform_core::abrr::{abrr_identity_check, fk_series};
use shapoform_core::linalg::{self, Mat};
use shapoform_core::rmatrix::key_id_check;
use shapoform_core::rootsys::{kostant_partitions, RootSystem};
use shapoform_core::routesum::{fhat_entry_by_routes, hasse};
use shapoform_core::scalars::{AffineExponent, Field, NumericField, SymbolicField};
use shapoform_core::shapovalov::{pairing_block, pairing_blocks};
use shapoform_core::singular::{
    avoids_poles, denominator_audit, linearly_independent, singular_vector, verify_inverse, FhatMethod, Pipeline,
    VerifyMethod,
};
use shapoform_core::uqmodules::{dual_verma_truncated, finite_dim_module, verma_truncated, ModuleSpec, WeightModule};

use crate::config::*;
use crate::emit::{svec_text, svec_value, Scalar};

pub struct Report {
    pub json: Value,
    pub text: String,
    /// False when a mathematical check failed.
    pub ok: bool,
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    /// The computation hit a pole or a singular system: the point or weight
    /// is not generic.
    Math(String),
    Internal(String),
}

impl From<UsageError> for Failure {
    fn from(e: UsageError) -> Failure {
        Failure::Usage(e.0)
    }
}

impl From<shapoform_core::Error> for Failure {
    fn from(e: shapoform_core::Error) -> Failure {
        use shapoform_core::Error::*;
        match e {
            DivisionByZero | PhiPole(_) | Pole(_) | Singular(_) | Inconsistent(_) => Failure::Math(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

type Out = Result<Report, Failure>;

fn header(command: &str, rs: &RootSystem) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    m.insert("command".into(), json!(command));
    m.insert("type".into(), json!(rs.name));
    m
}

fn variables(rank: usize) -> Value {
    let mut v = vec!["q".to_string()];
    v.extend((1..=rank).map(|i| format!("z{i}")));
    json!(v)
}

fn field_value(f: &dyn std::any::Any, rank: usize) -> Value {
    match f.downcast_ref::<NumericField>() {
        Some(n) => json!({
            "q": n.q0.to_string(),
            "z": n.z0.iter().map(|z| z.to_string()).collect::<Vec<_>>(),
        }),
        None => json!({ "symbolic": variables(rank) }),
    }
}

fn finish(mut m: serde_json::Map<String, Value>, text: String, ok: bool) -> Report {
    m.insert("passed".into(), json!(ok));
    Report { json: Value::Object(m), text, ok }
}

fn plain(m: serde_json::Map<String, Value>, text: String) -> Report {
    Report { json: Value::Object(m), text, ok: true }
}

/// Runs `$body` with `$f` bound to the symbolic field or to the point given
/// by `--at`.
macro_rules! with_field {
    ($at:expr, $rank:expr, |$f:ident| $body:expr) => {
        match $at {
            None => {
                let $f = SymbolicField::new($rank);
                $body
            }
            Some(s) => {
                let $f = parse_point(s, $rank)?;
                $body
            }
        }
    };
}

pub fn run(cmd: &Command) -> Out {
    match cmd {
        Command::Roots(a) => roots(a),
        Command::Verma(a) => {
            let (rs, c) = a.c.resolve()?;
            with_field!(&a.at.at, rs.rank, |f| verma(&f, rs, c, a))
        }
        Command::Gram(a) => {
            let (rs, c) = a.c.resolve()?;
            let nu = parse_nu(&a.nu, rs.rank)?;
            if RootSystem::height(&nu) as usize > c {
                return Err(Failure::Usage(format!("ν = {nu:?} lies below the cutoff {c}")));
            }
            with_field!(&a.at.at, rs.rank, |f| gram(&f, rs, c, &nu, a.emit))
        }
        Command::Rmatrix(a) => {
            let (rs, spec, c) = a.resolve()?;
            with_field!(&a.at.at, rs.rank, |f| rmatrix(&f, rs, &spec, c))
        }
        Command::Fhat(a) => {
            let (rs, spec, c) = a.m.resolve()?;
            let method = fhat_method(&a.method)?;
            with_field!(&a.m.at.at, rs.rank, |f| fhat(&f, rs, &spec, c, method, a))
        }
        Command::Singular(a) => {
            let (rs, spec, c) = a.m.resolve()?;
            if spec == ModuleSpec::DualVerma {
                return Err(Failure::Usage("singular vectors need a finite-dimensional module".into()));
            }
            let method = fhat_method(&a.method)?;
            with_field!(&a.m.at.at, rs.rank, |f| singular(&f, rs, &spec, c, method, a.j.as_deref()))
        }
        Command::Verify(Verify::Inverse(a)) => inverse(a),
        Command::Verify(Verify::Abrr(a)) => {
            let (rs, spec, c) = a.resolve()?;
            with_field!(&a.at.at, rs.rank, |f| verify_abrr(&f, rs, &spec, c))
        }
        Command::Verify(Verify::Keyid(a)) => {
            let (rs, spec, c) = a.resolve()?;
            with_field!(&a.at.at, rs.rank, |f| verify_keyid(&f, rs, &spec, c))
        }
        Command::Verify(Verify::Audit(a)) => audit(a),
        Command::Bench(a) => {
            let (rs, spec, c) = a.m.resolve()?;
            with_field!(&a.m.at.at, rs.rank, |f| bench(&f, rs, &spec, c))
        }
    }
}

fn roots(a: &TypeArg) -> Out {
    let rs = a.root_system()?;
    let n = rs.rank;
    let gram: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| rs.form(&rs.simple(i), &rs.simple(j))).collect()).collect();
    let rows: Vec<Value> = rs
        .positive_roots
        .iter()
        .map(|r| {
            json!({
                "root": r,
                "height": RootSystem::height(r),
                "rho_pairing": rs.rho_pairing(r),
                "norm2": rs.norm2(r),
            })
        })
        .collect();
    let mut text = format!("{}: {} positive roots\n", rs.name, rs.positive_roots.len());
    text.push_str(&format!("{:<16} {:>6} {:>8} {:>6}\n", "root", "height", "(ρ,α)", "(α,α)"));
    for r in &rs.positive_roots {
        text.push_str(&format!(
            "{:<16} {:>6} {:>8} {:>6}\n",
            format!("{r:?}"),
            RootSystem::height(r),
            rs.rho_pairing(r),
            rs.norm2(r)
        ));
    }
    text.push_str("Gram matrix of simple roots:\n");
    for row in &gram {
        text.push_str(&row.iter().map(|x| format!("{x:>4}")).collect::<String>());
        text.push('\n');
    }
    let mut m = header("roots", &rs);
    m.insert("rank".into(), json!(n));
    m.insert("cartan_matrix".into(), json!(rs.cartan));
    m.insert("gram".into(), json!(gram));
    m.insert("positive_roots".into(), Value::Array(rows));
    Ok(plain(m, text))
}

fn verma<F: Field + 'static>(f: &F, rs: RootSystem, cutoff: usize, a: &VermaArgs) -> Out
where
    F::Elem: Scalar,
{
    let rs = Arc::new(rs);
    let v = if a.dual { dual_verma_truncated(f, &rs, cutoff)? } else { verma_truncated(f, &rs, cutoff)? };
    let nvars = rs.rank + 1;
    let mut m = header("verma", &rs);
    m.insert("cutoff".into(), json!(cutoff));
    m.insert("dual".into(), json!(a.dual));
    m.insert("field".into(), field_value(f, rs.rank));
    let mut text = String::new();
    match a.emit {
        VermaEmit::Dims => {
            let dims: Vec<Value> = v
                .dims()
                .into_iter()
                .map(|(off, d)| {
                    let depth: Vec<i64> = off.iter().map(|x| x.abs()).collect();
                    text.push_str(&format!("{depth:?}: {d}\n"));
                    json!({ "nu": depth, "dim": d, "kostant": kostant_partitions(&rs, &depth) })
                })
                .collect();
            m.insert("dim".into(), json!(v.dim()));
            m.insert("blocks".into(), Value::Array(dims));
        }
        VermaEmit::Actions => {
            let mut gens = Vec::new();
            for (name, table) in [("e", &v.e), ("f", &v.f)] {
                for (a, cols) in table.iter().enumerate() {
                    let mut entries = Vec::new();
                    text.push_str(&format!("{name}{}:\n", a + 1));
                    for (j, col) in cols.iter().enumerate() {
                        for (i, c) in col {
                            entries.push(json!([i, j, c.to_value(nvars)]));
                            text.push_str(&format!("  {} -> {}: {}\n", v.labels[j], v.labels[*i], c.to_text()));
                        }
                    }
                    gens.push(json!({ "generator": format!("{name}{}", a + 1), "entries": entries }));
                }
            }
            m.insert("variables".into(), variables(rs.rank));
            m.insert("basis".into(), json!(v.labels));
            m.insert("generators".into(), Value::Array(gens));
        }
    }
    Ok(plain(m, text))
}

fn mat_value<E: Scalar>(a: &Mat<E>, nvars: usize) -> Value {
    Value::Array(a.iter().map(|r| Value::Array(r.iter().map(|x| x.to_value(nvars)).collect())).collect())
}

fn mat_text<E: Scalar>(a: &Mat<E>, rows: &[String], cols: &[String]) -> String {
    let mut s = String::new();
    for (r, row) in rows.iter().zip(a) {
        for (c, x) in cols.iter().zip(row) {
            s.push_str(&format!("[{r}, {c}] = {}\n", x.to_text()));
        }
    }
    s
}

fn gram<F: Field + 'static>(f: &F, rs: RootSystem, cutoff: usize, nu: &[i64], emit: GramEmit) -> Out
where
    F::Elem: Scalar,
{
    let rs = Arc::new(rs);
    let nvars = rs.rank + 1;
    let verma = verma_truncated(f, &rs, cutoff)?;
    let dual = dual_verma_truncated(f, &rs, cutoff)?;
    let b = pairing_block(&verma, &dual, nu)?;
    let mut m = header("gram", &rs);
    m.insert("cutoff".into(), json!(cutoff));
    m.insert("nu".into(), json!(nu));
    m.insert("field".into(), field_value(f, rs.rank));
    m.insert("variables".into(), variables(rs.rank));
    m.insert("rows".into(), json!(b.rows));
    m.insert("cols".into(), json!(b.cols));
    let text = match emit {
        GramEmit::Matrix => {
            m.insert("matrix".into(), mat_value(&b.entries, nvars));
            mat_text(&b.entries, &b.rows, &b.cols)
        }
        GramEmit::Det => {
            let d = linalg::det(f, &b.entries)?;
            m.insert("det".into(), d.to_value(nvars));
            format!("det = {}\n", d.to_text())
        }
        GramEmit::Inverse => {
            let inv = linalg::inverse(f, &b.entries)?;
            m.insert("inverse".into(), mat_value(&inv, nvars));
            mat_text(&inv, &b.cols, &b.rows)
        }
    };
    Ok(plain(m, text))
}

fn build_v<F: Field>(
    f: &F,
    rs: &Arc<RootSystem>,
    spec: &ModuleSpec,
    cutoff: Option<usize>,
) -> Result<WeightModule<F>, Failure> {
    Ok(match spec {
        ModuleSpec::DualVerma => dual_verma_truncated(f, rs, cutoff.expect("checked by resolve"))?,
        _ => finite_dim_module(f, rs, &spec.labels(rs)?)?,
    })
}

fn pipeline<F: Field>(f: &F, rs: RootSystem, spec: &ModuleSpec, cutoff: Option<usize>) -> Result<Pipeline<F>, Failure> {
    let rs = Arc::new(rs);
    let v = build_v(f, &rs, spec, cutoff)?;
    Ok(Pipeline::new(v, cutoff)?)
}

fn module_header(
    command: &str,
    p: &Pipeline<impl Field + 'static>,
    spec: &ModuleSpec,
) -> serde_json::Map<String, Value> {
    let rs = &p.v.rs;
    let mut m = header(command, rs);
    m.insert("module".into(), json!(spec.to_string()));
    m.insert("cutoff".into(), json!(p.m.cutoff));
    m.insert("field".into(), field_value(&p.v.field, rs.rank));
    m.insert("variables".into(), variables(rs.rank));
    m.insert("v_basis".into(), json!(p.v.labels));
    m
}

fn rmatrix<F: Field + 'static>(f: &F, rs: RootSystem, spec: &ModuleSpec, cutoff: Option<usize>) -> Out
where
    F::Elem: Scalar,
{
    let p = pipeline(f, rs, spec, cutoff)?;
    let nvars = p.v.rank() + 1;
    let mut text = String::new();
    let mut comps = Vec::new();
    for ((height, mu), keys) in p.rhat.components() {
        text.push_str(&format!("μ = {mu:?} (height {height})\n"));
        let entries: Vec<Value> = keys
            .iter()
            .map(|&(i, j)| {
                let y = p.rhat.get(i, j).expect("listed entry");
                text.push_str(&format!("  R̂[{}, {}] = {}\n", p.v.labels[i], p.v.labels[j], svec_text(y, &p.m.labels)));
                json!({ "i": p.v.labels[i], "j": p.v.labels[j], "element": svec_value(y, &p.m.labels, nvars) })
            })
            .collect();
        comps.push(json!({ "mu": mu, "height": height, "entries": entries }));
    }
    let mut m = module_header("rmatrix", &p, spec);
    m.insert("components".into(), Value::Array(comps));
    Ok(plain(m, text))
}

fn label_index<F: Field>(v: &WeightModule<F>, label: &str) -> Result<usize, Failure> {
    v.labels
        .iter()
        .position(|l| l == label)
        .ok_or_else(|| Failure::Usage(format!("no basis vector `{label}`; available: {}", v.labels.join(", "))))
}

/// All columns of a finite-dimensional module, the lowest vector of a dual
/// Verma module.
fn default_columns<F: Field>(v: &WeightModule<F>, spec: &ModuleSpec, j: Option<&str>) -> Result<Vec<usize>, Failure> {
    Ok(match (j, spec) {
        (Some(l), _) => vec![label_index(v, l)?],
        (None, ModuleSpec::DualVerma) => vec![0],
        (None, _) => (0..v.dim()).collect(),
    })
}

fn fhat<F: Field + 'static>(
    f: &F,
    rs: RootSystem,
    spec: &ModuleSpec,
    cutoff: Option<usize>,
    method: FhatMethod,
    a: &FhatArgs,
) -> Out
where
    F::Elem: Scalar,
{
    let p = pipeline(f, rs, spec, cutoff)?;
    let nvars = p.v.rank() + 1;
    let mut m = module_header("fhat", &p, spec);
    let mut text = String::new();
    match a.emit {
        FhatEmit::Entries => {
            let cols = default_columns(&p.v, spec, a.j.as_deref())?;
            let fh = p.fhat(&cols, method)?;
            let mut entries = Vec::new();
            for (j, col) in &fh.columns {
                for (i, x) in col {
                    text.push_str(&format!(
                        "f̂[{}, {}] 1 = {}\n",
                        p.v.labels[*i],
                        p.v.labels[*j],
                        svec_text(x, &p.m.labels)
                    ));
                    entries.push(json!({ "i": p.v.labels[*i], "j": p.v.labels[*j], "vector": svec_value(x, &p.m.labels, nvars) }));
                }
            }
            m.insert("method".into(), json!(method));
            m.insert("entries".into(), Value::Array(entries));
        }
        FhatEmit::Routes => {
            let (Some(il), Some(jl)) = (a.i.as_deref(), a.j.as_deref()) else {
                return Err(Failure::Usage("--emit routes needs --i and --j".into()));
            };
            let (i, j) = (label_index(&p.v, il)?, label_index(&p.v, jl)?);
            let d = hasse(&p.v);
            let (total, terms) = fhat_entry_by_routes(&p.v, &p.m, &p.ft, &d, i, j)?;
            let routes: Vec<Value> = terms
                .iter()
                .map(|t| {
                    text.push_str(&format!(
                        "{}: {}\n  route weight {}\n",
                        t.route.join(" → "),
                        svec_text(&t.vector, &p.m.labels),
                        t.weight.to_text()
                    ));
                    json!({ "route": t.route, "weight": t.weight.to_value(nvars), "vector": svec_value(&t.vector, &p.m.labels, nvars) })
                })
                .collect();
            text.push_str(&format!("total: {}\n", svec_text(&total, &p.m.labels)));
            m.insert("i".into(), json!(il));
            m.insert("j".into(), json!(jl));
            m.insert("routes".into(), Value::Array(routes));
            m.insert("total".into(), svec_value(&total, &p.m.labels, nvars));
        }
    }
    Ok(plain(m, text))
}

fn singular<F: Field + 'static>(
    f: &F,
    rs: RootSystem,
    spec: &ModuleSpec,
    cutoff: Option<usize>,
    method: FhatMethod,
    j: Option<&str>,
) -> Out
where
    F::Elem: Scalar,
{
    let p = pipeline(f, rs, spec, cutoff)?;
    let nvars = p.v.rank() + 1;
    let cols = default_columns(&p.v, spec, j)?;
    let fh = p.fhat(&cols, method)?;
    let tensor_labels: Vec<String> =
        p.v.labels.iter().flat_map(|a| p.m.labels.iter().map(move |b| format!("{a}⊗{b}"))).collect();
    let mut ok = true;
    let mut text = String::new();
    let mut reports = Vec::new();
    let mut vectors = Vec::new();
    for &c in &cols {
        let r = singular_vector(&p.v, &p.m, &fh, c)?;
        ok &= r.annihilated();
        text.push_str(&format!(
            "u[{}] = {}\n  annihilated: {}\n",
            r.label,
            svec_text(&r.vector, &tensor_labels),
            r.annihilated()
        ));
        reports.push(json!({
            "j": r.label,
            "weight_offset": r.weight,
            "annihilated": r.annihilated(),
            "vector": svec_value(&r.vector, &tensor_labels, nvars),
        }));
        vectors.push(r.vector);
    }
    let mut m = module_header("singular", &p, spec);
    if cols.len() > 1 {
        let refs: Vec<_> = vectors.iter().collect();
        let independent = linearly_independent(f, &refs)?;
        ok &= independent;
        text.push_str(&format!("linearly independent: {independent}\n"));
        m.insert("independent".into(), json!(independent));
    }
    m.insert("method".into(), json!(method));
    m.insert("vectors".into(), Value::Array(reports));
    Ok(finish(m, text, ok))
}

fn random_rational(rng: &mut ChaCha8Rng) -> BigRational {
    loop {
        let x = BigRational::new(BigInt::from(rng.gen_range(-9i64..=9)), BigInt::from(rng.gen_range(1i64..=7)));
        if x.numer() != &BigInt::from(0) && x.numer().magnitude() != x.denom().magnitude() {
            return x;
        }
    }
}

/// Seeded rational points at which no genericity factor up to `max_m`
/// vanishes.
pub fn sample_points(rs: &RootSystem, count: usize, seed: u64, max_m: i64) -> Vec<NumericField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let q0 = random_rational(&mut rng);
        let z0 = (0..rs.rank).map(|_| random_rational(&mut rng)).collect();
        if let Ok(f) = NumericField::new(q0, z0) {
            if avoids_poles(&f, rs, max_m) {
                out.push(f);
            }
        }
    }
    out
}

fn inverse_one<F: Field + 'static>(
    f: &F,
    rs: &Arc<RootSystem>,
    cutoff: usize,
    method: VerifyMethod,
    timings: bool,
) -> Result<(Value, String, bool), Failure> {
    let r = verify_inverse(f, rs, cutoff, method)?;
    let mut text = String::new();
    for b in &r.blocks {
        text.push_str(&format!("ν = {:?} (dim {}): identity {}, agree {}\n", b.nu, b.dim, b.identity, b.agree));
    }
    if let Some(m) = &r.mismatch {
        text.push_str(&format!("mismatch: {m}\n"));
    }
    let mut v = json!({
        "field": field_value(f, rs.rank),
        "blocks": r.blocks,
        "mismatch": r.mismatch,
        "passed": r.passed(),
    });
    if timings {
        v["timings"] = json!(r.timings);
    }
    Ok((v, text, r.passed()))
}

fn inverse(a: &InverseArgs) -> Out {
    let (rs, cutoff) = a.c.resolve()?;
    let method = verify_method(&a.method)?;
    let rs = Arc::new(rs);
    let mut m = header("verify inverse", &rs);
    m.insert("cutoff".into(), json!(cutoff));
    m.insert("method".into(), json!(method));
    let mut text = format!("{} cutoff {cutoff}, method {:?}\n", rs.name, method);
    let ok = match a.points {
        None => {
            let (v, t, ok) = inverse_one(&SymbolicField::new(rs.rank), &rs, cutoff, method, a.timings)?;
            text.push_str(&t);
            m.insert("runs".into(), json!([v]));
            ok
        }
        Some(n) => {
            let mut runs = Vec::new();
            let mut ok = true;
            for (k, f) in sample_points(&rs, n, a.seed, cutoff as i64).iter().enumerate() {
                let (v, _, pass) = inverse_one(f, &rs, cutoff, method, a.timings)?;
                text.push_str(&format!(
                    "point {k} (q = {}, z = {:?}): {}\n",
                    f.q0,
                    f.z0.iter().map(|z| z.to_string()).collect::<Vec<_>>(),
                    if pass { "pass" } else { "FAIL" }
                ));
                ok &= pass;
                runs.push(v);
            }
            m.insert("seed".into(), json!(a.seed));
            m.insert("runs".into(), Value::Array(runs));
            ok
        }
    };
    text.push_str(if ok { "PASS\n" } else { "FAIL\n" });
    Ok(finish(m, text, ok))
}

fn verify_abrr<F: Field + 'static>(f: &F, rs: RootSystem, spec: &ModuleSpec, cutoff: Option<usize>) -> Out {
    let p = pipeline(f, rs, spec, cutoff)?;
    let cols: Vec<usize> = (0..p.v.dim()).collect();
    let longest = hasse(&p.v).longest_path();
    let series = fk_series(&p.v, &p.m, &p.ft, &cols, longest + 1)?;
    let report = abrr_identity_check(&p.v, &p.m, &p.rhat, &series.fhat)?;
    let ok = report.passed() && series.nonzero_terms() == 1 + longest;
    let text = format!(
        "identity: {} entries checked, {} failures\nnonzero terms: {} (longest path {longest})\n{}\n",
        report.checked,
        report.failures.len(),
        series.nonzero_terms(),
        if ok { "PASS" } else { "FAIL" }
    );
    let mut m = module_header("verify abrr", &p, spec);
    m.insert("checked".into(), json!(report.checked));
    m.insert("failures".into(), json!(report.failures));
    m.insert("nonzero_terms".into(), json!(series.nonzero_terms()));
    m.insert("longest_path".into(), json!(longest));
    Ok(finish(m, text, ok))
}

fn verify_keyid<F: Field + 'static>(f: &F, rs: RootSystem, spec: &ModuleSpec, cutoff: Option<usize>) -> Out {
    let p = pipeline(f, rs, spec, cutoff)?;
    let report = key_id_check(&p.v, &p.m, &p.ft)?;
    let text = format!(
        "{} checks, {} failures\n{}\n",
        report.checked,
        report.failures.len(),
        if report.passed() { "PASS" } else { "FAIL" }
    );
    let mut m = module_header("verify keyid", &p, spec);
    m.insert("checked".into(), json!(report.checked));
    m.insert("failures".into(), json!(report.failures));
    Ok(finish(m, text, report.passed()))
}

fn audit(a: &CutoffArgs) -> Out {
    let (rs, cutoff) = a.resolve()?;
    let rs = Arc::new(rs);
    let f = SymbolicField::new(rs.rank);
    let r = verify_inverse(&f, &rs, cutoff, VerifyMethod::Routes)?;
    let entries = r.inverses.values().flatten().flatten();
    let audit = denominator_audit(&rs, entries, cutoff as i64);
    let ok = audit.passed() && r.passed();
    let mut text = format!("{} entries audited\n", audit.audited);
    for (k, n) in &audit.inventory {
        text.push_str(&format!("  {k}: {n}\n"));
    }
    text.push_str(&format!("q-only leftovers: {}\nunexplained: {}\n", audit.q_only, audit.unexplained.len()));
    text.push_str(if ok { "PASS\n" } else { "FAIL\n" });
    let mut m = header("verify audit", &rs);
    m.insert("cutoff".into(), json!(cutoff));
    m.insert("audit".into(), json!(audit));
    Ok(finish(m, text, ok))
}

/// Wraps a field and counts multiplications, divisions and additions.
#[derive(Clone, Debug)]
struct Counting<F> {
    inner: F,
    ops: Arc<AtomicU64>,
}

impl<F: Field> Counting<F> {
    fn new(inner: F) -> Counting<F> {
        Counting { inner, ops: Arc::new(AtomicU64::new(0)) }
    }
    fn tick(&self) {
        self.ops.fetch_add(1, Ordering::Relaxed);
    }
    fn take(&self) -> u64 {
        self.ops.swap(0, Ordering::Relaxed)
    }
}

impl<F: Field> Field for Counting<F> {
    type Elem = F::Elem;
    fn zero(&self) -> F::Elem {
        self.inner.zero()
    }
    fn one(&self) -> F::Elem {
        self.inner.one()
    }
    fn int(&self, v: i64) -> F::Elem {
        self.inner.int(v)
    }
    fn rational(&self, r: &BigRational) -> F::Elem {
        self.inner.rational(r)
    }
    fn is_zero(&self, a: &F::Elem) -> bool {
        self.inner.is_zero(a)
    }
    fn add(&self, a: &F::Elem, b: &F::Elem) -> F::Elem {
        self.tick();
        self.inner.add(a, b)
    }
    fn sub(&self, a: &F::Elem, b: &F::Elem) -> F::Elem {
        self.tick();
        self.inner.sub(a, b)
    }
    fn mul(&self, a: &F::Elem, b: &F::Elem) -> F::Elem {
        self.tick();
        self.inner.mul(a, b)
    }
    fn neg(&self, a: &F::Elem) -> F::Elem {
        self.inner.neg(a)
    }
    fn inv(&self, a: &F::Elem) -> shapoform_core::Result<F::Elem> {
        self.tick();
        self.inner.inv(a)
    }
    fn div(&self, a: &F::Elem, b: &F::Elem) -> shapoform_core::Result<F::Elem> {
        self.tick();
        self.inner.div(a, b)
    }
    fn monomial(&self, x: &AffineExponent) -> F::Elem {
        self.inner.monomial(x)
    }
    fn clearing_factor(&self, row: &[F::Elem]) -> F::Elem {
        self.inner.clearing_factor(row)
    }
}

fn bench<F: Field + 'static>(f: &F, rs: RootSystem, spec: &ModuleSpec, cutoff: Option<usize>) -> Out {
    let rs = Arc::new(rs);
    let cf = Counting::new(f.clone());
    let v = build_v(&cf, &rs, spec, cutoff)?;
    let cols = default_columns(&v, spec, None)?;
    cf.take();
    let clock = Instant::now();
    let p = Pipeline::new(v, cutoff)?;
    let setup = (clock.elapsed().as_secs_f64(), cf.take());
    let mut methods = BTreeMap::new();
    methods.insert("quasi_r", json!({ "seconds": setup.0, "field_ops": setup.1 }));
    for (name, method) in [("routes", FhatMethod::Routes), ("abrr", FhatMethod::Abrr)] {
        let clock = Instant::now();
        let fh = p.fhat(&cols, method)?;
        let entries: usize = fh.columns.values().map(|c| c.len()).sum();
        methods.insert(
            name,
            json!({ "seconds": clock.elapsed().as_secs_f64(), "field_ops": cf.take(), "entries": entries }),
        );
    }
    let mut blocks = Vec::new();
    if spec == &ModuleSpec::DualVerma {
        let c = p.m.cutoff;
        let verma = verma_truncated(&cf, &rs, c)?;
        let dual = dual_verma_truncated(&cf, &rs, c)?;
        let pb = pairing_blocks(&verma, &dual, c)?;
        cf.take();
        let mut total = (0.0, 0);
        for (nu, b) in &pb {
            let clock = Instant::now();
            linalg::inverse(&cf, &b.entries)?;
            let row = (clock.elapsed().as_secs_f64(), cf.take());
            total = (total.0 + row.0, total.1 + row.1);
            blocks.push(
                json!({ "nu": nu, "dim": b.col_indices.len(), "oracle_seconds": row.0, "oracle_field_ops": row.1 }),
            );
        }
        methods.insert("oracle", json!({ "seconds": total.0, "field_ops": total.1, "entries": pb.values().map(|b| b.col_indices.len().pow(2)).sum::<usize>() }));
    }
    let mut text = format!("{:<10} {:>12} {:>14}\n", "method", "seconds", "field ops");
    for (k, v) in &methods {
        text.push_str(&format!(
            "{k:<10} {:>12.4} {:>14}\n",
            v["seconds"].as_f64().unwrap_or(0.0),
            v["field_ops"].as_u64().unwrap_or(0)
        ));
    }
    if !blocks.is_empty() {
        text.push_str(&format!("\n{:<16} {:>5} {:>12} {:>14}\n", "ν", "dim", "oracle s", "oracle ops"));
        for b in &blocks {
            text.push_str(&format!(
                "{:<16} {:>5} {:>12.4} {:>14}\n",
                b["nu"].to_string(),
                b["dim"].as_u64().unwrap_or(0),
                b["oracle_seconds"].as_f64().unwrap_or(0.0),
                b["oracle_field_ops"].as_u64().unwrap_or(0)
            ));
        }
    }
    let mut m = header("bench", &rs);
    m.insert("module".into(), json!(spec.to_string()));
    m.insert("cutoff".into(), json!(p.m.cutoff));
    m.insert("field".into(), field_value(f, rs.rank));
    m.insert("methods".into(), json!(methods));
    m.insert("blocks".into(), Value::Array(blocks));
    Ok(plain(m, text))
}
