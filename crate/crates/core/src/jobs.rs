//! Self-contained JSON jobs and the manifest runner.
//!
//! Every job reads its parameters from a [`Job`] record and returns a JSON
//! object with a boolean `pass` field. Objects serialize with sorted keys.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::base_arith::{APoly, FqField, PolyRing, ResidueRing};
use crate::carlitz::{carlitz_cyclotomic, carlitz_phi, check_eisenstein, cyclotomic_degree};
use crate::drinfeld::DrinfeldRank2;
use crate::error::{Error, Result};
use crate::forms::{Depth, FormExpansion, FormsContext, Verdict, WeightChar};
use crate::linalg::Matrix;
use crate::ring::{Ring, ThetaRing};
use crate::series::{Series, SeriesRing};
use crate::tate_drinfeld::TateDrinfeld;
use crate::tau_poly::TauPoly;
use crate::v_sheaf::{dual_points, htt_evaluate, kernel_sheaf, VSheaf};

pub const COMMANDS: &[&str] = &[
    "carlitz.phi",
    "carlitz.eisenstein",
    "carlitz.cyclotomic",
    "carlitz.criterion",
    "drinfeld.dual",
    "drinfeld.duality_suite",
    "vsheaf.kernel",
    "vsheaf.suite",
    "tate.expand",
    "tate.isogeny",
    "forms.hasse",
    "forms.audit",
    "forms.harness",
    "forms.limit",
];

fn default_q() -> u64 {
    2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Job {
    pub command: String,
    #[serde(default = "default_q")]
    pub q: u64,
    /// Coefficients (low degree first) of the modulus defining F_q over F_p.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_modulus: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wp: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prec: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wp_prec: Option<u32>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, Value>,
}

impl Job {
    pub fn new(command: &str, q: u64) -> Job {
        Job {
            command: command.to_string(),
            q,
            p_modulus: None,
            wp: None,
            f: None,
            prec: None,
            wp_prec: None,
            params: BTreeMap::new(),
        }
    }
    pub fn wp(mut self, wp: &str) -> Job {
        self.wp = Some(wp.to_string());
        self
    }
    pub fn f(mut self, f: &str) -> Job {
        self.f = Some(f.to_string());
        self
    }
    pub fn prec(mut self, n: i64) -> Job {
        self.prec = Some(n);
        self
    }
    pub fn wp_prec(mut self, n: u32) -> Job {
        self.wp_prec = Some(n);
        self
    }
    pub fn param(mut self, key: &str, v: Value) -> Job {
        self.params.insert(key.to_string(), v);
        self
    }

    fn a_ring(&self) -> Result<PolyRing> {
        match &self.p_modulus {
            None => PolyRing::with_q(self.q),
            Some(m) => {
                let (p, _) = crate::base_arith::prime_power(self.q)
                    .ok_or_else(|| Error::InvalidInput(format!("q = {} is not a prime power", self.q)))?;
                let fq = FqField::with_modulus(p, m.clone())?;
                if fq.q() as u64 != self.q {
                    return Err(Error::InvalidInput("p_modulus does not define a field of order q".into()));
                }
                Ok(PolyRing::new(fq))
            }
        }
    }

    fn poly(&self, a: &PolyRing, field: &Option<String>, name: &str, default: Option<&str>) -> Result<APoly> {
        match (field.as_deref(), default) {
            (Some(s), _) | (None, Some(s)) => a.parse(s),
            (None, None) => Err(Error::InvalidInput(format!("missing {name}"))),
        }
    }

    fn prime(&self, a: &PolyRing) -> Result<APoly> {
        let wp = self.poly(a, &self.wp, "wp", None)?;
        if !wp.is_monic() {
            return Err(Error::InvalidInput(format!("{} is not monic", a.format(&wp))));
        }
        if !a.is_irreducible(&wp) {
            return Err(Error::Reducible(a.format(&wp)));
        }
        Ok(wp)
    }

    fn u64_param(&self, key: &str, default: u64) -> Result<u64> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => v.as_u64().ok_or_else(|| Error::InvalidInput(format!("{key} must be a nonnegative integer"))),
        }
    }

    fn str_param(&self, key: &str) -> Option<String> {
        self.params.get(key).and_then(|v| v.as_str().map(str::to_string))
    }

    fn triple_param(&self, key: &str, default: [u64; 3]) -> Result<[u64; 3]> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => {
                let xs: Option<Vec<u64>> = v.as_array().map(|a| a.iter().filter_map(Value::as_u64).collect());
                match xs {
                    Some(x) if x.len() == 3 => Ok([x[0], x[1], x[2]]),
                    _ => Err(Error::InvalidInput(format!("{key} must be [alpha, beta, gamma]"))),
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JobManifest {
    pub jobs: Vec<Job>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

impl JobManifest {
    pub fn from_json(s: &str) -> Result<JobManifest> {
        serde_json::from_str(s).map_err(|e| Error::Parse(format!("manifest: {e}")))
    }
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }
}

/// Pretty JSON text with sorted keys and a trailing newline.
pub fn to_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

pub fn error_json(e: &Error) -> Value {
    let kind = if e.is_consistency() { "consistency" } else { "domain" };
    json!({"kind": kind, "message": e.to_string()})
}

pub fn run_job(job: &Job) -> Result<Value> {
    match job.command.as_str() {
        "carlitz.phi" => carlitz_phi_job(job),
        "carlitz.eisenstein" => carlitz_eisenstein_job(job),
        "carlitz.cyclotomic" => carlitz_cyclotomic_job(job),
        "carlitz.criterion" => carlitz_criterion_job(job),
        "drinfeld.dual" => drinfeld_dual_job(job),
        "drinfeld.duality_suite" => duality_suite_job(job),
        "vsheaf.kernel" => vsheaf_kernel_job(job),
        "vsheaf.suite" => vsheaf_suite_job(job),
        "tate.expand" => tate_expand_job(job),
        "tate.isogeny" => tate_isogeny_job(job),
        "forms.hasse" => forms_hasse_job(job),
        "forms.audit" => forms_audit_job(job),
        "forms.harness" => forms_harness_job(job),
        "forms.limit" => forms_limit_job(job),
        other => Err(Error::InvalidInput(format!("unknown command {other}"))),
    }
}

fn job_entry(index: usize, job: &Job) -> Value {
    match run_job(job) {
        Ok(result) => {
            let pass = result.get("pass").and_then(Value::as_bool).unwrap_or(false);
            json!({"index": index, "command": job.command, "pass": pass, "result": result})
        }
        Err(e) => json!({"index": index, "command": job.command, "pass": false, "error": error_json(&e)}),
    }
}

/// Runs every job, in parallel when `threads` allows, and assembles the
/// report in job order.
pub fn run_manifest(m: &JobManifest, threads: Option<usize>) -> Result<Value> {
    let entries = run_entries(m, threads)?;
    let passed = entries.iter().filter(|e| e["pass"] == json!(true)).count();
    Ok(json!({"jobs": entries, "passed": passed, "total": m.jobs.len(), "pass": passed == m.jobs.len()}))
}

#[cfg(feature = "parallel")]
fn run_entries(m: &JobManifest, threads: Option<usize>) -> Result<Vec<Value>> {
    use rayon::prelude::*;
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        b = b.num_threads(n.max(1));
    }
    let pool = b.build().map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?;
    Ok(pool.install(|| m.jobs.par_iter().enumerate().map(|(i, j)| job_entry(i, j)).collect()))
}

#[cfg(not(feature = "parallel"))]
fn run_entries(m: &JobManifest, _threads: Option<usize>) -> Result<Vec<Value>> {
    Ok(m.jobs.iter().enumerate().map(|(i, j)| job_entry(i, j)).collect())
}

fn series_json<R: Ring>(s: &SeriesRing<R>, a: &Series<R::Elem>) -> Value {
    json!({
        "val": a.val(),
        "prec": a.prec(),
        "coeffs": a.stored().iter().map(|c| s.base().fmt_elem(c)).collect::<Vec<_>>(),
        "text": s.format(a),
    })
}

fn matrix_json<R: Ring>(r: &R, m: &Matrix<R::Elem>) -> Value {
    json!(m.iter().map(|row| row.iter().map(|c| r.fmt_elem(c)).collect::<Vec<_>>()).collect::<Vec<_>>())
}

pub fn vsheaf_json(s: &VSheaf<ResidueRing>) -> Value {
    let k = s.ring();
    json!({
        "rank": s.rank(),
        "P": matrix_json(k, s.p()),
        "Psi": matrix_json(k, s.psi()),
        "V": matrix_json(k, s.v()),
        "base": k.poly_ring().format_in(k.modulus(), &k.var().to_string()),
    })
}

fn checks_json(checks: &[(&str, bool)]) -> Value {
    Value::Object(checks.iter().map(|(k, v)| (k.to_string(), json!(v))).collect())
}

fn all_pass(checks: &[(&str, bool)]) -> bool {
    checks.iter().all(|(_, v)| *v)
}

/// Monic factorization by trial division.
pub fn factor(a: &PolyRing, n: &APoly) -> Result<Vec<(APoly, u32)>> {
    if n.is_zero() {
        return Err(Error::InvalidInput("cannot factor 0".into()));
    }
    let mut rest = a.make_monic(n);
    let mut out = Vec::new();
    let mut deg = 1;
    while 2 * deg <= rest.deg0() {
        for g in a.irreducibles_of_degree(deg) {
            let mut e = 0;
            while a.divides(&g, &rest) {
                rest = a.divrem(&rest, &g)?.0;
                e += 1;
            }
            if e > 0 {
                out.push((g, e));
            }
        }
        deg += 1;
    }
    if rest.deg0() > 0 {
        match out.iter_mut().find(|(g, _)| *g == rest) {
            Some(entry) => entry.1 += 1,
            None => out.push((rest, 1)),
        }
    }
    out.sort();
    Ok(out)
}

fn carlitz_phi_job(job: &Job) -> Result<Value> {
    let a = job.a_ring()?;
    let x = a.parse(&job.str_param("a").unwrap_or_else(|| "t".into()))?;
    let phi = carlitz_phi(&a, &x);
    Ok(json!({
        "a": a.format(&x),
        "coeffs": phi.format(),
        "additive": phi.format_additive("Z"),
        "pass": true,
    }))
}

fn carlitz_eisenstein_job(job: &Job) -> Result<Value> {
    let a = job.a_ring()?;
    let wp = job.prime(&a)?;
    let r = check_eisenstein(&a, &wp)?;
    Ok(json!({
        "wp": a.format(&wp),
        "monic": r.monic,
        "coefficients_divisible": r.coefficients_divisible,
        "linear_exact": r.linear_exact,
        "eisenstein": r.eisenstein(),
        "reduction": r.reduction.format_additive("Z"),
        "reduction_is_frobenius": r.reduction_is_frobenius(),
        "pass": r.eisenstein() && r.reduction_is_frobenius(),
    }))
}

fn carlitz_cyclotomic_job(job: &Job) -> Result<Value> {
    let a = job.a_ring()?;
    let n = a.parse(&job.str_param("n").ok_or_else(|| Error::InvalidInput("missing n".into()))?)?;
    let fac = factor(&a, &n)?;
    let w = carlitz_cyclotomic(&a, &n, &fac)?;
    let deg = cyclotomic_degree(&a, &n, &fac);
    let ok = w.degree().finite().map(|d| d as i64) == Some(deg);
    Ok(json!({
        "n": a.format(&a.make_monic(&n)),
        "factors": fac.iter().map(|(g, e)| json!([a.format(g), e])).collect::<Vec<_>>(),
        "degree": deg,
        "poly": w.format("Z"),
        "pass": ok,
    }))
}

fn carlitz_criterion_job(job: &Job) -> Result<Value> {
    let a = job.a_ring()?;
    let max_deg = job.u64_param("max_deg", 3)? as usize;
    let mut checked = 0;
    let mut failures = Vec::new();
    for d in 1..=max_deg {
        for wp in a.irreducibles_of_degree(d) {
            let r = check_eisenstein(&a, &wp)?;
            checked += 1;
            if !(r.eisenstein() && r.reduction_is_frobenius()) {
                failures.push(a.format(&wp));
            }
        }
    }
    Ok(json!({"max_deg": max_deg, "checked": checked, "failures": failures, "pass": failures.is_empty()}))
}

fn module_json(k: &ResidueRing, e: &DrinfeldRank2<ResidueRing>) -> Value {
    json!({"a1": k.format(e.a1()), "a2": k.format(e.a2())})
}

/// (j, factorization identities for E and E^D, classification) checks.
fn duality_checks(e: &DrinfeldRank2<ResidueRing>, wp: &APoly) -> Result<(Vec<(&'static str, bool)>, &'static str)> {
    let d = e.taguchi_dual();
    let fe = e.wp_factorize(wp)?;
    let fd = d.wp_factorize(wp)?;
    let ce = e.classify_reduction(wp)?;
    let cd = d.classify_reduction(wp)?;
    let dd = d.taguchi_dual();
    let c = TauPoly::constant(e.ring(), e.double_dual_isomorphism());
    let mut checks = vec![
        ("j(E^D) = j(E)", e.j_invariant() == d.j_invariant()),
        ("E^DD isomorphic to E", e.is_isogeny(&c, &dd).isogeny),
        ("classify(E) = classify(E^D)", ce == cd),
    ];
    checks.extend(e.check_factorization(wp, &fe));
    for (name, ok) in d.check_factorization(wp, &fd) {
        checks.push((dual_name(name), ok));
    }
    Ok((checks, ce.name()))
}

fn dual_name(name: &str) -> &'static str {
    match name {
        "V F = Φ_℘" => "dual: V F = Φ_℘",
        "F V = Φ_℘ of E^(q^d)" => "dual: F V = Φ_℘ of E^(q^d)",
        "V² F² = Φ_℘²" => "dual: V² F² = Φ_℘²",
        _ => "dual: F² V² = Φ_℘² of E^(q^2d)",
    }
}

fn drinfeld_dual_job(job: &Job) -> Result<Value> {
    let a = job.a_ring()?;
    let wp = job.prime(&a)?;
    let ext = job.u64_param("ext", 1)? as usize;
    let k = ResidueRing::field_with_theta(&a, &wp, ext)?;
    let a1 = k.parse(&job.str_param("a1").unwrap_or_else(|| "1".into()))?;
    let a2 = k.parse(&job.str_param("a2").unwrap_or_else(|| "1".into()))?;
    let e = DrinfeldRank2::new(&k, a1, a2)?;
    let d = e.taguchi_dual();
    let fac = e.wp_factorize(&wp)?;
    let (checks, class) = duality_checks(&e, &wp)?;
    Ok(json!({
        "field": {"modulus": k.poly_ring().format_in(k.modulus(), &k.var().to_string()), "theta": k.format(&k.theta())},
        "module": module_json(&k, &e),
        "dual": module_json(&k, &d),
        "double_dual": module_json(&k, &d.taguchi_dual()),
        "double_dual_isomorphism": k.format(&e.double_dual_isomorphism()),
        "j": k.format(&e.j_invariant()),
        "j_dual": k.format(&d.j_invariant()),
        "F_d": fac.f_d.format_additive("Z"),
        "V_d": fac.v_d.format_additive("Z"),
        "reduction": class,
        "checks": checks_json(&checks),
        "pass": all_pass(&checks),
    }))
}

fn duality_suite_job(job: &Job) -> Result<Value> {
    let a = job.a_ring()?;
    let wp = match &job.wp {
        Some(_) => job.prime(&a)?,
        None => a.first_irreducible(job.u64_param("d", 1)? as usize),
    };
    let count = job.u64_param("count", 100)?;
    let seed = job.u64_param("seed", 0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut modules = 0u64;
    let mut failures = Vec::new();
    let mut census: BTreeMap<&str, u64> = BTreeMap::new();
    for ext in [1usize, 2] {
        let k = ResidueRing::field_with_theta(&a, &wp, ext)?;
        let n = k.degree();
        for _ in 0..count {
            let a1 = a.from_index(rng.gen_range(0..k.size()), n);
            let a2 = a.from_index(rng.gen_range(1..k.size()), n);
            let e = DrinfeldRank2::new(&k, a1, a2)?;
            let (checks, class) = duality_checks(&e, &wp)?;
            *census.entry(class).or_default() += 1;
            modules += 1;
            for (name, ok) in checks {
                if !ok && failures.len() < 16 {
                    failures.push(json!({"ext": ext, "module": module_json(&k, &e), "check": name}));
                }
            }
        }
    }
    Ok(json!({
        "wp": a.format(&wp),
        "modules": modules,
        "reductions": census,
        "failures": failures,
        "pass": failures.is_empty(),
    }))
}

struct SheafReport {
    checks: Vec<(&'static str, bool)>,
    data: Value,
}

fn sheaf_checks(s: &VSheaf<ResidueRing>, expected_rank: usize) -> Vec<(&'static str, bool)> {
    let d = s.dual();
    vec![
        ("valid", s.is_valid()),
        ("dual valid", d.is_valid()),
        ("double dual is the identity", d.dual() == *s),
        ("rank preserved by duality", d.rank() == s.rank()),
        ("rank equals τ-degree", s.rank() == expected_rank),
    ]
}

fn carlitz_sheaf_report(a: &PolyRing, wp: &APoly, ext: usize) -> Result<SheafReport> {
    let k = ResidueRing::field_with_theta(a, wp, 1)?;
    let u = carlitz_phi(&k, wp);
    let (s, _) = kernel_sheaf(&u, &carlitz_phi(&k, &APoly::t()))?;
    let mut checks = sheaf_checks(&s, wp.deg0());
    let pts = dual_points(&s, ext)?;
    let q = a.fq().q() as u64;
    checks.push(("dual has q^d points", pts.points.len() as u64 == q.pow(wp.deg0() as u32)));
    checks.push(("dual points free of rank one over A/(℘)", pts.is_free_rank_one(wp)));
    let mut e0 = vec![APoly::zero(); s.rank()];
    e0[0] = APoly::one();
    let e0 = e0.iter().map(|c| pts.embedding.apply(c)).collect::<Vec<_>>();
    let canonical = pts.points.contains(&e0);
    checks.push(("canonical point is a dual point", canonical));
    let class = if canonical { Some(htt_evaluate(&s, &pts, &e0)?) } else { None };
    checks.push(("HTT of the canonical point is nonzero", class.as_ref().is_some_and(|c| !c.is_zero())));
    let f = &pts.field;
    let data = json!({
        "sheaf": vsheaf_json(&s),
        "dual": vsheaf_json(&s.dual()),
        "dual_points": pts.points.iter().map(|x| x.iter().map(|c| f.format(c)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "htt": class.map(|c| json!({"normal_form": c.normal_form.iter().map(|x| f.format(x)).collect::<Vec<_>>(), "coker_dim": c.coker_dim})),
    });
    Ok(SheafReport { checks, data })
}

fn vsheaf_kernel_job(job: &Job) -> Result<Value> {
    let a = job.a_ring()?;
    let wp = job.prime(&a)?;
    let ext = job.u64_param("ext", 1)? as usize;
    let r = carlitz_sheaf_report(&a, &wp, ext)?;
    let mut out = r.data;
    out["checks"] = checks_json(&r.checks);
    out["pass"] = json!(all_pass(&r.checks));
    Ok(out)
}

fn vsheaf_suite_job(job: &Job) -> Result<Value> {
    let a = job.a_ring()?;
    let wp = job.prime(&a)?;
    let d = wp.deg0();
    let k = ResidueRing::field_with_theta(&a, &wp, 1)?;
    let mut sections = BTreeMap::new();
    let carlitz = carlitz_sheaf_report(&a, &wp, 1)?;
    let mut ok = all_pass(&carlitz.checks);
    sections.insert("carlitz_torsion".to_string(), checks_json(&carlitz.checks));
    let e = DrinfeldRank2::new(&k, APoly::one(), APoly::one())?;
    let other = a.monic_of_degree(1).find(|g| *g != wp).expect("q ≥ 2 gives two monic linears");
    let kernels: Vec<(&str, TauPoly<ResidueRing>, usize)> = vec![
        ("frobenius_kernel", TauPoly::tau_pow(&k, d), d),
        ("wp_torsion", e.phi(&wp), 2 * d),
        ("etale_torsion", e.phi(&other), 2),
    ];
    for (name, u, rank) in kernels {
        let (s, _) = kernel_sheaf(&u, &e.phi_t())?;
        let checks = sheaf_checks(&s, rank);
        ok &= all_pass(&checks);
        sections.insert(name.to_string(), checks_json(&checks));
    }
    Ok(json!({"wp": a.format(&wp), "sections": sections, "pass": ok}))
}

fn tate_instance(job: &Job, base_prec: i64) -> Result<(PolyRing, APoly, TateDrinfeld<PolyRing>)> {
    let a = job.a_ring()?;
    let wp = job.prime(&a)?;
    let f = job.poly(&a, &job.f, "f", Some("1"))?;
    let n = job.prec.unwrap_or(base_prec);
    let i_max = job.u64_param("i_max", 3.max(wp.deg0() as u64 + 1))? as usize;
    let td = TateDrinfeld::new(&a, &a, &f, n, i_max)?;
    Ok((a, wp, td))
}

fn unit_at<R: Ring<Elem = APoly>>(s: &SeriesRing<R>, a: &Series<APoly>, v: i64) -> bool {
    a.valuation() == Some(v) && s.coeff(a, v).is_some_and(|c| c.deg0() == 0 && !c.is_zero())
}

/// The lattice statements hold for Λ; for fΛ they are checked through
/// TD(fΛ) = ν_f^*(TD(Λ)), which scales x-valuations by q^deg f.
fn tate_expand_job(job: &Job) -> Result<Value> {
    let (a, wp, td) = tate_instance(job, 8)?;
    let s = td.series();
    let q = s.q() as i64;
    let r = td.f().deg0() as u32;
    let scale = q.pow(r);
    let (a1, a2) = (td.a1(), td.a2());
    let a1_tail = s.sub(a1, &s.one());
    let descent = s.is_in_subring_q_minus_1(a1)
        && s.is_in_subring_q_minus_1(a2)
        && td.exponential().iter().all(|e| s.is_in_subring_q_minus_1(e));
    let yj = s.shift(&td.j_invariant(), (q - 1) * scale);
    let ks = td.kodaira_spencer()?;
    let ks_oracle = s.agrees_to(&ks.l, &ks.oracle, ks.l.prec().min(ks.oracle.prec()));
    let residuals = td.residuals();
    let residual_zero = residuals.iter().all(|r| r.is_zero_to_prec());
    let i3 = residuals.get(3).is_some_and(|r| r.is_zero_to_prec());
    let ord = td.ordinarity(&wp)?;
    let mut checks = vec![
        ("a1 in 1 + xA[[x]]", a1_tail.valuation().is_none_or(|v| v >= 1)),
        ("a2 in x^((q-1)q^deg f) A[[x]]^×", unit_at(s, a2, (q - 1) * scale)),
        ("coefficients in A[[x^(q-1)]]", descent),
        ("y j_t is a unit, y = x^((q-1)q^deg f)", unit_at(s, &yj, 0)),
        ("l(x) matches the quotient-rule oracle", ks_oracle),
        ("functional equation residual vanishes", residual_zero),
        ("i = 3 relation vanishes", i3),
        ("exponential is additive", td.exponential_is_additive()),
        ("ordinary", ord.ordinary),
    ];
    let ks_base = if r == 0 {
        ks.l.clone()
    } else {
        let base = TateDrinfeld::new(&a, &a, &APoly::one(), td.prec(), td.i_max())?;
        let lb = base.kodaira_spencer()?.l;
        let ff = crate::tate_drinfeld::lattice_inverse(&crate::carlitz::CarlitzAction::new(&a), s, td.f())?;
        let pulled_a1 = s.substitute(base.a1(), &ff)?;
        let pulled_a2 = s.substitute(base.a2(), &ff)?;
        let moved = s.mul(&s.substitute(&lb, &ff)?, &s.derivative(&ff));
        checks.push(("TD(fΛ) = ν_f^*(TD(Λ))", s.agrees_to(a1, &pulled_a1, td.prec()) && s.agrees_to(a2, &pulled_a2, td.prec())));
        checks.push(("l_fΛ = ν_f(l_Λ) F_f'", s.agrees_to(&ks.l, &moved, ks.l.prec().min(moved.prec()))));
        lb
    };
    checks.push(("x l_Λ(x) ≡ 1 mod x", ks_base.valuation() == Some(-1) && s.coeff(&ks_base, -1) == Some(APoly::one())));
    Ok(json!({
        "q": q,
        "wp": a.format(&wp),
        "f": a.format(td.f()),
        "prec": td.prec(),
        "a1": series_json(s, a1),
        "a2": series_json(s, a2),
        "e": td.exponential().iter().map(|e| series_json(s, e)).collect::<Vec<_>>(),
        "j_t": series_json(s, &td.j_invariant()),
        "l": series_json(s, &ks.l),
        "newton": ord.newton,
        "checks": checks_json(&checks),
        "pass": all_pass(&checks),
    }))
}

fn tate_isogeny_job(job: &Job) -> Result<Value> {
    let (a, wp, td) = tate_instance(job, 8)?;
    let s = td.series();
    let d = wp.deg0();
    let iso = td.canonical_isogeny(&wp)?;
    let c = iso.psi.coeffs();
    let k = ResidueRing::new(&a, &wp)?;
    let sk = SeriesRing::new(k.clone(), td.prec());
    let red = |x: &Series<APoly>| s.map_to(&sk, x, |c| k.reduce(c));
    let lower_vanish = (0..d).all(|i| red(&c[i]).is_zero_to_prec());
    let cd = red(&c[d]);
    let cd_unit = cd.valuation() == Some(0);
    let quot = td.verify_tdquot(&iso, &APoly::t())?;
    let checks = [
        ("c0 = ℘", c[0] == s.constant(wp.clone())),
        ("Ψ e = e' Φ^C_℘ residual vanishes", iso.residuals_vanish()),
        ("Ψ Φ_t = ν_℘(Φ_t) Ψ", quot.ok),
        ("Φ_℘ right-divisible by Ψ", iso.divides_phi()),
        ("c_i ≡ 0 mod ℘ for i < d", lower_vanish),
        ("c_d a unit mod (℘, x)", cd_unit),
    ];
    Ok(json!({
        "wp": a.format(&wp),
        "f": a.format(td.f()),
        "prec": td.prec(),
        "psi": c.iter().map(|x| series_json(s, x)).collect::<Vec<_>>(),
        "rho": iso.rho.coeffs().iter().map(|x| series_json(s, x)).collect::<Vec<_>>(),
        "certified_prec": quot.certified_prec,
        "checks": checks_json(&checks),
        "pass": all_pass(&checks),
    }))
}

fn forms_context(job: &Job, x_prec: i64, wp_prec: u32) -> Result<FormsContext> {
    let a = job.a_ring()?;
    let wp = job.prime(&a)?;
    FormsContext::new(&a, &wp, job.prec.unwrap_or(x_prec), job.wp_prec.unwrap_or(wp_prec))
}

fn form_json(c: &FormsContext, f: &FormExpansion) -> Value {
    json!({"weight": f.weight, "type": f.type_m, "wp_prec": f.wp_prec, "series": series_json(c.series(), &f.series)})
}

fn depth_json(d: Depth) -> Value {
    match d {
        Depth::NotCongruent => json!({"kind": "not_congruent"}),
        Depth::CongruentToZero(n) => json!({"kind": "congruent_to_zero", "n": n}),
        Depth::Depth(n) => json!({"kind": "depth", "n": n}),
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "PASS",
        Verdict::Fail => "FAIL",
        Verdict::Vacuous => "VACUOUS",
    }
}

fn forms_hasse_job(job: &Job) -> Result<Value> {
    let c = forms_context(job, 16, 1)?;
    let h = c.hasse_lift();
    let s = c.series();
    let d = c.d();
    let one_mod_wp = c.series_valuation(&s.sub(&h.series, &s.one())) >= 1;
    let lower = (1..d).all(|i| c.series_valuation(&c.alphas()[i]) >= 1);
    let checks = [
        ("α_d ≡ 1 mod ℘", one_mod_wp),
        ("α_i ≡ 0 mod ℘ for 0 < i < d", lower),
        ("weight q^d - 1", h.weight == c.hasse_weight()),
        ("type 0", h.type_m == 0),
    ];
    Ok(json!({
        "wp": c.a_ring().format(c.wp()),
        "x_prec": c.x_prec(),
        "hasse": form_json(&c, &h),
        "checks": checks_json(&checks),
        "pass": all_pass(&checks),
    }))
}

fn forms_audit_job(job: &Job) -> Result<Value> {
    let c = forms_context(job, 32, 4)?;
    let [a1, b1, g1] = job.triple_param("f1", [1, 0, 0])?;
    let [a2, b2, g2] = job.triple_param("f2", [1, 0, 0])?;
    let mut f1 = c.monomial(a1, b1, g1);
    let mut f2 = c.monomial(a2, b2, g2);
    if let Some(k) = job.params.get("k1").and_then(Value::as_i64) {
        f1.weight = k;
    }
    if let Some(k) = job.params.get("k2").and_then(Value::as_i64) {
        f2.weight = k;
    }
    let max_n = job.u64_param("max_n", c.wp_prec() as u64)? as u32;
    let au = c.weight_congruence_audit(&f1, &f2, max_n)?;
    Ok(json!({
        "k1": f1.weight,
        "k2": f2.weight,
        "depth": depth_json(au.depth),
        "modulus": au.modulus,
        "delta_k": au.delta_k,
        "verdict": verdict_name(au.verdict),
        "pass": au.pass(),
    }))
}

fn forms_harness_job(job: &Job) -> Result<Value> {
    let l_max = job.u64_param("l_max", 3)? as u32;
    let a = job.a_ring()?;
    let p = a.fq().p() as u64;
    let c = forms_context(job, 48, p.pow(l_max) as u32 + 1)?;
    let max_weight = job.u64_param("max_weight", 40)? as i64;
    let r = c.constructed_congruence_harness(max_weight, l_max)?;
    let passed = r.cases.iter().filter(|x| x.audit.pass() && x.audit.depth == Depth::Depth(p.pow(x.l) as u32)).count();
    let failed_neg = r.negatives.iter().filter(|x| x.audit.verdict == Verdict::Fail).count();
    let first_bad: Vec<Value> = r
        .cases
        .iter()
        .filter(|x| !(x.audit.pass() && x.audit.depth == Depth::Depth(p.pow(x.l) as u32)))
        .take(8)
        .map(|x| json!({"alpha": x.alpha, "beta": x.beta, "l": x.l, "depth": depth_json(x.audit.depth), "verdict": verdict_name(x.audit.verdict)}))
        .collect();
    Ok(json!({
        "wp": a.format(c.wp()),
        "x_prec": c.x_prec(),
        "wp_prec": c.wp_prec(),
        "max_weight": max_weight,
        "l_max": l_max,
        "cases": r.cases.len(),
        "cases_passed": passed,
        "negatives": r.negatives.len(),
        "negatives_failed": failed_neg,
        "unexpected": first_bad,
        "pass": passed == r.cases.len() && failed_neg == r.negatives.len() && !r.negatives.is_empty(),
    }))
}

fn forms_limit_job(job: &Job) -> Result<Value> {
    let steps = job.u64_param("steps", 4)? as u32;
    let c = forms_context(job, 24, steps + 1)?;
    let [al, be, ga] = job.triple_param("f", [1, 1, 0])?;
    let f = c.monomial(al, be, ga);
    let p = c.p();
    let precision = job.u64_param("precision", 4)? as u32;
    let chi = match job.params.get("chi").and_then(Value::as_array) {
        Some(v) if v.len() == 2 => {
            let s0 = v[0].as_u64().ok_or_else(|| Error::InvalidInput("chi must be [s0, s1]".into()))?;
            let s1 = v[1].as_u64().ok_or_else(|| Error::InvalidInput("chi must be [s0, s1]".into()))?;
            WeightChar { s0, s1: s1 % p.pow(precision), precision }
        }
        Some(_) => return Err(Error::InvalidInput("chi must be [s0, s1]".into())),
        None => {
            // k + 1 + p + ... + p^(L-1)
            let bump: u64 = (0..precision).map(|i| p.pow(i)).sum();
            let base = c.weight_embed(f.weight, precision);
            WeightChar { s1: (base.s1 + bump) % p.pow(precision), ..base }
        }
    };
    let hs = c.padic_limit_sequence(&f, &chi, steps)?;
    let mut depths = Vec::new();
    let mut ok = true;
    for n in 1..hs.len() {
        let d = c.congruence_depth(&hs[n], &hs[n - 1], c.wp_prec())?;
        ok &= matches!(d, Depth::Depth(m) if m as usize >= n);
        depths.push(depth_json(d));
    }
    let tags = hs.iter().enumerate().all(|(n, h)| c.weight_congruent(&chi, h.weight, n as u32 + 1).unwrap_or(false));
    Ok(json!({
        "chi": [chi.s0, chi.s1],
        "weights": hs.iter().map(|h| h.weight).collect::<Vec<_>>(),
        "depths": depths,
        "weights_match_chi": tags,
        "pass": ok && tags,
    }))
}

/// The acceptance manifest: one or more jobs per criterion.
pub fn acceptance_manifest() -> JobManifest {
    let mut jobs = vec![
        Job::new("carlitz.criterion", 2).param("max_deg", json!(4)),
        Job::new("carlitz.criterion", 3).param("max_deg", json!(3)),
    ];
    for (q, d, seed) in [(2u64, 1u64, 1u64), (2, 2, 2), (3, 1, 3)] {
        jobs.push(Job::new("drinfeld.duality_suite", q).param("d", json!(d)).param("count", json!(100)).param("seed", json!(seed)));
    }
    for (q, wp) in [(2u64, "t"), (2, "t^2+t+1"), (3, "t")] {
        jobs.push(Job::new("vsheaf.suite", q).wp(wp));
    }
    let td = [(2u64, "t", "1"), (2, "t", "t"), (3, "t", "1"), (2, "t^2+t+1", "1")];
    for (q, wp, f) in td {
        jobs.push(Job::new("tate.expand", q).wp(wp).f(f).prec(8));
    }
    for (q, wp, f) in td {
        jobs.push(Job::new("tate.isogeny", q).wp(wp).f(f).prec(8));
    }
    for (q, wp) in [(2u64, "t"), (2, "t^2+t+1"), (3, "t")] {
        jobs.push(Job::new("forms.hasse", q).wp(wp).prec(16).wp_prec(2));
    }
    for (q, wp, n) in [(2u64, "t", 40), (2, "t^2+t+1", 48), (3, "t", 72)] {
        jobs.push(
            Job::new("forms.harness", q)
                .wp(wp)
                .prec(n)
                .param("max_weight", json!(40))
                .param("l_max", json!(3)),
        );
    }
    for q in [2u64, 3] {
        jobs.push(Job::new("forms.limit", q).wp("t").prec(24).wp_prec(5).param("steps", json!(4)));
    }
    JobManifest { jobs, output: None }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_command_is_an_error() {
        assert!(run_job(&Job::new("nope", 2)).is_err());
    }

    #[test]
    fn eisenstein_example() {
        let v = run_job(&Job::new("carlitz.eisenstein", 2).wp("t^2+t+1")).unwrap();
        assert_eq!(v["eisenstein"], json!(true));
        assert_eq!(v["reduction"], json!("Z^4"));
    }

    #[test]
    fn manifest_round_trip() {
        let m = acceptance_manifest();
        assert_eq!(JobManifest::from_json(&m.to_json()).unwrap(), m);
        assert!(m.jobs.iter().all(|j| COMMANDS.contains(&j.command.as_str())));
    }

    #[test]
    fn factor_examples() {
        let a = PolyRing::with_q(2).unwrap();
        let n = a.parse("t^3+t").unwrap();
        let f = factor(&a, &n).unwrap();
        assert_eq!(f, vec![(APoly::t(), 1), (a.parse("t+1").unwrap(), 2)]);
        let v = run_job(&Job::new("carlitz.cyclotomic", 2).param("n", json!("t^2+t"))).unwrap();
        assert_eq!(v["pass"], json!(true));
    }

    #[test]
    fn audit_job_negative_control() {
        let base = Job::new("forms.audit", 2).wp("t").prec(24).wp_prec(5);
        let ok = run_job(&base.clone().param("f1", json!([2, 1, 0])).param("f2", json!([2, 1, 4]))).unwrap();
        assert_eq!(ok["verdict"], json!("PASS"));
        assert_eq!(ok["depth"]["n"], json!(4));
        let bad = run_job(&base.param("f1", json!([2, 1, 0])).param("f2", json!([2, 1, 4])).param("k2", json!(11))).unwrap();
        assert_eq!(bad["verdict"], json!("FAIL"));
    }

    #[test]
    fn custom_fq_modulus() {
        let mut j = Job::new("carlitz.eisenstein", 4).wp("t+u");
        j.p_modulus = Some(vec![1, 1, 1]);
        assert_eq!(run_job(&j).unwrap()["pass"], json!(true));
        j.p_modulus = Some(vec![1, 0, 1]);
        assert!(run_job(&j).is_err());
    }
}
