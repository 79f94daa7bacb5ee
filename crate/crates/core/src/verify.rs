//! Named verification suites producing pass/fail reports with witnesses.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algkit::{build_algebra, AlgebraSpec};
use crate::chaincore::homology_map;
use crate::error::{Error, Result};
use crate::exactlin::{rank, Field, PrimeField, Rationals, ScalarField, SparseMatrix, SparseVec};
use crate::fincat::{degenerate_family, DiagonalRule, SetMap, Site};
use crate::funmod::{lemma31_iso, reduced_part, representable, FunctorModule};
use crate::theories::cube::{degenerate_subspace, stab_ambient};
use crate::theories::kahler::{kahler_dim, kahler_mod_exact_dim};
use crate::theories::stab::{ladder, stab_b_chain, stab_b_homology};
use crate::theories::{
    connes_b, five_term, hochschild_boundary, normalized_hochschild_complex, periodicity_maps, q0_complex,
    AnyPipeline, BConvention, CubeComplex, HochschildSign, Pipeline, DEFAULT_CAP,
};
use crate::with_pipeline;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Identities,
    Representables,
    LowDegree,
    StableSequence,
    Periodicity,
    StabB,
    Ladder,
    Q0,
    PullbackIso,
    Degeneracy,
    All,
}

impl Suite {
    pub const EACH: [Suite; 10] = [
        Suite::Identities,
        Suite::Representables,
        Suite::LowDegree,
        Suite::StableSequence,
        Suite::Periodicity,
        Suite::StabB,
        Suite::Ladder,
        Suite::Q0,
        Suite::PullbackIso,
        Suite::Degeneracy,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Representables => "representables",
            Suite::LowDegree => "prop53",
            Suite::StableSequence => "stable-sequence",
            Suite::Periodicity => "periodicity",
            Suite::StabB => "stab-b",
            Suite::Ladder => "ladder",
            Suite::Q0 => "q0",
            Suite::PullbackIso => "lemma31",
            Suite::Degeneracy => "degeneracy",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .iter()
            .chain(std::iter::once(&Suite::All))
            .find(|x| x.name() == s.trim())
            .copied()
            .ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    SkippedResource,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::SkippedResource => "skipped-resource",
        })
    }
}

/// Serialized counterexample; scalars are exact strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Witness {
    Vector { dim: usize, entries: Vec<(usize, String)> },
    Matrix { rows: usize, cols: usize, triplets: Vec<(usize, usize, String)> },
    Chain { degree: usize, space: String, entries: Vec<(usize, String)> },
}

impl Witness {
    pub fn vector<F: Field>(f: &F, dim: usize, v: &SparseVec<F::Elem>) -> Self {
        Witness::Vector { dim, entries: v.iter().map(|(i, x)| (*i, f.render_plain(x))).collect() }
    }

    pub fn matrix<F: Field>(m: &SparseMatrix<F>) -> Self {
        let f = m.field();
        Witness::Matrix {
            rows: m.rows(),
            cols: m.cols(),
            triplets: m.triplets().into_iter().map(|(r, c, x)| (r, c, f.render_plain(&x))).collect(),
        }
    }

    pub fn chain<F: Field>(f: &F, degree: usize, space: &str, v: &SparseVec<F::Elem>) -> Self {
        Witness::Chain {
            degree,
            space: space.to_string(),
            entries: v.iter().map(|(i, x)| (*i, f.render_plain(x))).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub input: String,
    pub field: String,
    pub status: Status,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inputs {
    pub algebras: Vec<String>,
    pub fields: Vec<String>,
    pub max_degree: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub checks: usize,
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub inputs: Inputs,
    pub seed: u64,
    /// "pass", "fail", or "pass-with-skips"
    pub status: String,
    pub summary: Summary,
    pub checks: Vec<Check>,
    /// milliseconds per check
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub timings: BTreeMap<String, u64>,
}

impl SuiteReport {
    pub fn new(suite: &str, inputs: Inputs, seed: u64, checks: Vec<Check>, timings: BTreeMap<String, u64>) -> Self {
        let mut summary = Summary { checks: checks.len(), ..Summary::default() };
        for c in &checks {
            match c.status {
                Status::Pass => summary.pass += 1,
                Status::Fail => summary.fail += 1,
                Status::SkippedResource => summary.skipped += 1,
            }
        }
        let status = if summary.fail > 0 {
            "fail"
        } else if summary.skipped > 0 {
            "pass-with-skips"
        } else {
            "pass"
        };
        SuiteReport { suite: suite.to_string(), inputs, seed, status: status.into(), summary, checks, timings }
    }

    pub fn failed(&self) -> bool {
        self.summary.fail > 0
    }

    pub fn skipped(&self) -> bool {
        self.summary.skipped > 0
    }

    pub fn without_timings(&self) -> Self {
        SuiteReport { timings: BTreeMap::new(), ..self.clone() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Markdown,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::Parse(format!("unknown format {other:?} (json, markdown, csv)"))),
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn md_cell(s: &str) -> String {
    s.replace('|', "\\|").replace('\n', " ")
}

pub fn render_report(r: &SuiteReport, format: ReportFormat) -> Result<String> {
    Ok(match format {
        ReportFormat::Json => serde_json::to_string_pretty(r)? + "\n",
        ReportFormat::Markdown => {
            let mut s = String::new();
            let _ = writeln!(s, "# Suite `{}`: {}\n", r.suite, r.status);
            let _ = writeln!(
                s,
                "seed {}, {} checks: {} pass, {} fail, {} skipped\n",
                r.seed, r.summary.checks, r.summary.pass, r.summary.fail, r.summary.skipped
            );
            s.push_str("| check | input | field | status | detail |\n|---|---|---|---|---|\n");
            for c in &r.checks {
                let _ = writeln!(
                    s,
                    "| {} | {} | {} | {} | {} |",
                    md_cell(&c.name),
                    md_cell(&c.input),
                    md_cell(&c.field),
                    c.status,
                    md_cell(&c.detail)
                );
            }
            s
        }
        ReportFormat::Csv => {
            let mut s = String::from("suite,check,input,field,status,detail,witness\n");
            for c in &r.checks {
                let w = match &c.witness {
                    Some(w) => serde_json::to_string(w)?,
                    None => String::new(),
                };
                let row = [r.suite.as_str(), &c.name, &c.input, &c.field, &c.status.to_string(), &c.detail, &w];
                s.push_str(&row.iter().map(|x| csv_field(x)).collect::<Vec<_>>().join(","));
                s.push('\n');
            }
            s
        }
    })
}

/// Algebras × fields with a degree bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Corpus {
    pub algebras: Vec<AlgebraSpec>,
    pub fields: Vec<ScalarField>,
    pub max_degree: usize,
}

impl Default for Corpus {
    fn default() -> Self {
        Corpus {
            algebras: ["trunc:2", "trunc:3", "group:2", "group:3", "prod:2"]
                .iter()
                .map(|s| s.parse().expect("corpus spec"))
                .collect(),
            fields: vec![ScalarField::Rationals, ScalarField::Prime(2), ScalarField::Prime(3)],
            max_degree: 3,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub corpus: Corpus,
    pub seed: u64,
    pub cap: u128,
    /// random chains per (degree, input)
    pub samples: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { corpus: Corpus::default(), seed: 42, cap: DEFAULT_CAP, samples: 100 }
    }
}

/// Per-check RNG derived from the run seed and the check's full name.
pub fn check_rng(seed: u64, label: &str) -> ChaCha8Rng {
    let digest = Sha256::digest(label.as_bytes());
    let mut b = [0u8; 8];
    b.copy_from_slice(&digest[..8]);
    ChaCha8Rng::seed_from_u64(seed ^ u64::from_le_bytes(b))
}

struct Outcome {
    ok: bool,
    detail: String,
    witness: Option<Witness>,
}

impl Outcome {
    fn check(ok: bool, detail: impl Into<String>) -> Self {
        Outcome { ok, detail: detail.into(), witness: None }
    }
    fn with(mut self, w: Option<Witness>) -> Self {
        if !self.ok {
            self.witness = w;
        }
        self
    }
}

fn dims_eq(got: &[usize], want: &[usize]) -> Outcome {
    Outcome::check(got == want, format!("dims {got:?}, expected {want:?}"))
}

struct Recorder {
    seed: u64,
    checks: Vec<Check>,
    timings: BTreeMap<String, u64>,
}

impl Recorder {
    fn run(&mut self, suite: Suite, name: &str, input: &str, field: &str, body: impl FnOnce(&mut ChaCha8Rng) -> Result<Outcome>) {
        let full = format!("{suite}/{name}");
        let key = format!("{full} [{input} / {field}]");
        let mut rng = check_rng(self.seed, &key);
        let t = Instant::now();
        let (status, detail, witness) = match body(&mut rng) {
            Ok(o) => (if o.ok { Status::Pass } else { Status::Fail }, o.detail, o.witness),
            Err(Error::Resource(m)) => (Status::SkippedResource, m, None),
            Err(e) => (Status::Fail, format!("error: {e}"), None),
        };
        self.timings.insert(key, t.elapsed().as_millis() as u64);
        self.checks.push(Check { name: full, input: input.into(), field: field.into(), status, detail, witness });
    }
}

struct Ctx<'a> {
    rec: &'a mut Recorder,
    cfg: &'a RunConfig,
    input: String,
    field: String,
}

impl Ctx<'_> {
    fn run(&mut self, suite: Suite, name: &str, body: impl FnOnce(&mut ChaCha8Rng) -> Result<Outcome>) {
        self.rec.run(suite, name, &self.input, &self.field, body)
    }
}

fn first_failure<F: Field>(m: &SparseMatrix<F>, what: &str) -> Outcome {
    match m.first_nonzero_column() {
        None => Outcome::check(true, format!("{what} vanishes")),
        Some(c) => Outcome::check(false, format!("{what} is nonzero on column {c}")).with(Some(Witness::matrix(m))),
    }
}

fn identities<F: Field>(p: &Pipeline<F>, cx: &mut Ctx) {
    let max = cx.cfg.corpus.max_degree;
    let s = Suite::Identities;
    cx.run(s, "hochschild d^2 = 0", |_| {
        let c = p.hochschild(max + 2)?;
        Ok(Outcome::check(true, format!("checked through C_{}", c.top())))
    });
    for m in 0..=max {
        cx.run(s, &format!("B^2 = 0 on C_{m}"), |_| {
            let b0 = p.connes_b(m)?;
            let b1 = p.connes_b(m + 1)?;
            Ok(first_failure(&b1.mul(&b0)?, "B B"))
        });
        cx.run(s, &format!("bB + Bb = 0 on C_{m}"), |_| {
            let g = p.fmod().as_ref();
            let mut lhs = hochschild_boundary(g, m + 1, HochschildSign::Alternating)?.mul(&p.connes_b(m)?)?;
            if m >= 1 {
                let rhs = p.connes_b(m - 1)?.mul(&hochschild_boundary(g, m, HochschildSign::Alternating)?)?;
                lhs = lhs.add(&rhs)?;
            }
            Ok(first_failure(&lhs, "bB + Bb"))
        });
    }
    cx.run(s, "total d^2 = 0", |_| {
        let c = p.cyclic(max + 2)?;
        Ok(Outcome::check(true, format!("checked through Tot_{}", c.top)))
    });
    for top in [max, max + 1] {
        cx.run(s, &format!("delta^2 = 0 and delta(D) in D through cube degree {top}"), |_| {
            let c = p.cube(top)?;
            Ok(Outcome::check(true, format!("Q ranks {:?}", c.complex().ranks())))
        });
        cx.run(s, &format!("stab is a chain map through cube degree {top}"), |_| {
            let c = p.cube(top)?;
            let h = p.hochschild(top)?;
            match c.stab_chain_map(top)?.check(&h, c.complex()) {
                Ok(()) => Ok(Outcome::check(true, "delta stab = stab b")),
                Err(Error::NotChainMap { degree, column }) => Ok(Outcome::check(
                    false,
                    format!("delta stab != stab b on C_{degree}, column {column}"),
                )),
                Err(e) => Err(e),
            }
        });
    }
}

fn representables<F: Field>(field: &F, rec: &mut Recorder, cfg: &RunConfig) {
    for n in 1..=3usize {
        let fname = field.kind().to_string();
        rec.run(Suite::Representables, &format!("HGammaC(F^{n}) = (k^{n}, 0, 0)"), &format!("F^{n}"), &fname, |_| {
            let m: Arc<dyn FunctorModule<F>> = Arc::new(representable(field, Site::Fin, n));
            let p = Pipeline::from_module(format!("F^{n}"), m, cfg.cap)?;
            let cone = p.cone(3)?;
            let dims = (0..=2).map(|k| cone.homology(k).map(|h| h.dim)).collect::<Result<Vec<_>>>()?;
            Ok(dims_eq(&dims, &[n, 0, 0]))
        });
    }
}

fn prop53<F: Field>(p: &Pipeline<F>, cx: &mut Ctx) {
    let s = Suite::LowDegree;
    let alg = p.algebra().cloned();
    cx.run(s, "dim HGammaC_0 = dim HC_1", |_| {
        let a = p.cone(2)?.homology(0)?.dim;
        let b = p.cyclic(2)?.homology(1)?.dim;
        Ok(Outcome::check(a == b, format!("HGammaC_0 = {a}, HC_1 = {b}")))
    });
    if let Some(alg) = alg {
        let alg2 = alg.clone();
        cx.run(s, "dim HC_1 = dim Omega^1/dA", |_| {
            let a = p.cyclic(2)?.homology(1)?.dim;
            let b = kahler_mod_exact_dim(&alg2);
            Ok(Outcome::check(a == b, format!("HC_1 = {a}, Omega^1/dA = {b}")))
        });
        cx.run(s, "dim HGamma_0 = dim Omega^1 = dim HH_1", |_| {
            let g = p.cube(2)?.homology(0)?.dim;
            let o = kahler_dim(&alg);
            let h = p.hochschild(2)?.homology(1)?.dim;
            Ok(Outcome::check(g == o && o == h, format!("HGamma_0 = {g}, Omega^1 = {o}, HH_1 = {h}")))
        });
    }
    cx.run(s, "stab: HH_1 -> HGamma_0 is an isomorphism", |_| {
        let cube = p.cube(2)?;
        let hh1 = p.hochschild(2)?.homology(1)?;
        let hg0 = cube.homology(0)?;
        let m = homology_map(&cube.stab(0)?, &hh1, &hg0)?;
        let r = rank(&m);
        let ok = r == hh1.dim && r == hg0.dim;
        Ok(Outcome::check(ok, format!("rank {r}, HH_1 = {}, HGamma_0 = {}", hh1.dim, hg0.dim))
            .with(Some(Witness::matrix(&m))))
    });
}

fn characteristic_sensitivity(rec: &mut Recorder) {
    rec.run(Suite::LowDegree, "Omega^1 depends on the characteristic", "trunc:2", "Q, F2", |_| {
        let q = kahler_dim(&build_algebra(&AlgebraSpec::Trunc(2), &Rationals)?);
        let f2 = kahler_dim(&build_algebra(&AlgebraSpec::Trunc(2), &PrimeField::new(2)?)?);
        Ok(Outcome::check(q == 1 && f2 == 2, format!("Omega^1(trunc:2) = {q} over Q, {f2} over F2")))
    });
}

fn stable_sequence<F: Field>(p: &Pipeline<F>, cx: &mut Ctx) {
    let s = Suite::StableSequence;
    cx.run(s, "five-term sequence is exact", |_| {
        let ft = five_term(&*p.cone(2)?)?;
        let nodes = ft.exactness()?;
        let bad: Vec<&str> = nodes.iter().filter(|(_, z, r)| !(*z && *r)).map(|(n, _, _)| n.as_str()).collect();
        Ok(Outcome::check(
            bad.is_empty(),
            format!("dims {:?} (HGamma_1, HGammaC_1, F(0), HGamma_0, HGammaC_0); failing nodes {bad:?}", ft.dims),
        ))
    });
    let Some(alg) = p.algebra().cloned() else { return };
    if kahler_dim(&alg) != 0 {
        return;
    }
    let d = alg.dim();
    cx.run(s, "etale: HGamma_0..2 = 0", |_| {
        let c = p.cube(3)?;
        let dims = (0..=2).map(|n| c.homology(n).map(|h| h.dim)).collect::<Result<Vec<_>>>()?;
        Ok(dims_eq(&dims, &[0, 0, 0]))
    });
    cx.run(s, "etale: HGammaC = (0, dim A, 0)", |_| {
        let c = p.cone(3)?;
        let dims = (0..=2).map(|n| c.homology(n).map(|h| h.dim)).collect::<Result<Vec<_>>>()?;
        Ok(dims_eq(&dims, &[0, d, 0]))
    });
}

fn periodicity<F: Field>(p: &Pipeline<F>, cx: &mut Ctx) {
    let max = cx.cfg.corpus.max_degree + 1;
    cx.run(Suite::Periodicity, &format!("periodicity sequence exact through degree {max}"), |_| {
        let h = p.hochschild(max + 2)?;
        let c = p.cyclic(max + 1)?;
        let hb = |n: usize| p.connes_b(n);
        let maps = periodicity_maps(&h, &c, &hb, max)?;
        let nodes = maps.exactness()?;
        let bad: Vec<String> = nodes.iter().filter(|e| !e.holds()).map(|e| format!("{e:?}")).collect();
        Ok(Outcome::check(
            bad.is_empty(),
            format!("HH {:?}, HC {:?}, {} nodes; failing {bad:?}", maps.hh, maps.hc, nodes.len()),
        ))
    });
}

fn random_chain<F: Field>(f: &F, dim: usize, rng: &mut ChaCha8Rng) -> SparseVec<F::Elem> {
    let dense: Vec<F::Elem> = (0..dim).map(|_| f.random_elem(rng)).collect();
    SparseVec::from_dense(f, &dense)
}

fn stab_b<F: Field>(p: &Pipeline<F>, cx: &mut Ctx) {
    let s = Suite::StabB;
    let max = cx.cfg.corpus.max_degree;
    let samples = cx.cfg.samples;
    let f = p.field().clone();
    for n in 1..=max {
        cx.run(s, &format!("stab B = 0 on HC_{n}"), |_| {
            let m = stab_b_homology(p, n)?;
            Ok(first_failure(&m, "stab B on homology"))
        });
        cx.run(s, &format!("stab(B x) in D_{n} for random chains"), |rng| {
            let g = p.gmod().as_ref();
            let b = p.connes_b(n)?;
            let st = stab_ambient(g, n)?.mul(&b)?;
            let d = degenerate_subspace(g, n, p.cube_rule(), p.cap())?;
            let mut outside = 0;
            for _ in 0..samples {
                let x = random_chain(&f, b.cols(), rng);
                if !d.contains(&st.mul_vec(&x)?) {
                    outside += 1;
                }
            }
            if outside == 0 {
                return Ok(Outcome::check(true, format!("{samples} random chains land in D_{n}")));
            }
            let diag = stab_b_chain(p, n)?;
            let j = diag.outside[0];
            let modb = match diag.outside_mod_boundaries {
                Some(k) => format!("{k} outside D_{n} + im delta"),
                None => "D + im delta out of reach".into(),
            };
            Ok(Outcome::check(
                false,
                format!(
                    "{outside}/{samples} random chains leave D_{n}; basis chains outside: {} of {}; \
                     s-terms alone: {}, rotated terms alone: {}; {modb}",
                    diag.outside.len(),
                    diag.chains,
                    diag.s_terms_outside,
                    diag.tau_terms_outside
                ),
            )
            .with(Some(Witness::chain(&f, n, &format!("C_{n}"), &SparseVec::unit(&f, j)))))
        });
    }
    if cx.input == "trunc:2" && f.kind() == ScalarField::Rationals {
        cx.run(s, "stab B on HC_0 has rank 1", |_| {
            let r = rank(&stab_b_homology(p, 0)?);
            Ok(Outcome::check(r == 1, format!("rank {r}")))
        });
    }
}

fn ladder_suite<F: Field>(p: &Pipeline<F>, cx: &mut Ctx) {
    cx.run(Suite::Ladder, "ladder squares commute", |_| {
        let l = ladder(p)?;
        Ok(Outcome::check(
            l.square_a && l.square_b && l.square_c,
            format!("square (a) {}, (b) {}, (c) {}", l.square_a, l.square_b, l.square_c),
        ))
    });
}

fn q0<F: Field>(p: &Pipeline<F>, cx: &mut Ctx) {
    let max = cx.cfg.corpus.max_degree;
    cx.run(Suite::Q0, "H_n(Q0(G')) = HH_{n+1}(G)", |_| {
        let red: Arc<dyn FunctorModule<F>> = Arc::new(reduced_part(p.gmod().clone())?);
        let cube = CubeComplex::build(red, max, DiagonalRule::Adjacent, p.cap())?;
        let q = q0_complex(&cube)?;
        let got = q.complex.homology_dims(max - 1)?;
        let hh = p.hochschild(max + 1)?.homology_dims(max)?;
        Ok(Outcome::check(got[..] == hh[1..], format!("H(Q0) {got:?}, HH_1.. {:?}", &hh[1..])))
    });
}

fn random_pointed(rng: &mut ChaCha8Rng, s: usize, t: usize) -> Result<SetMap> {
    let images = (0..=s).map(|j| if j == 0 { 0 } else { rng.gen_range(0..=t) }).collect();
    SetMap::pointed(s, t, images)
}

fn lemma31<F: Field>(field: &F, rec: &mut Recorder) {
    let fname = field.kind().to_string();
    rec.run(Suite::PullbackIso, "mu*F^n = Gamma^{n+1} objectwise, n <= 3, m <= 4", "F^n", &fname, |_| {
        for n in 0..=3 {
            for m in 0..=4 {
                let iso = lemma31_iso(field, n, m)?;
                if iso.rows() != iso.cols() || rank(&iso) != iso.cols() {
                    return Ok(Outcome::check(false, format!("not invertible at n = {n}, m = {m}"))
                        .with(Some(Witness::matrix(&iso))));
                }
            }
        }
        Ok(Outcome::check(true, "20 objects, all bijections"))
    });
    rec.run(Suite::PullbackIso, "naturality on 20 random maps", "F^n", &fname, |rng| {
        for _ in 0..20 {
            let n = rng.gen_range(0..=3);
            let (s, t) = (rng.gen_range(0..=4), rng.gen_range(0..=4));
            let g = random_pointed(rng, s, t)?;
            let src = representable(field, Site::Fin, n);
            let tgt = representable(field, Site::Gamma, n + 1);
            let lhs = lemma31_iso(field, n, t)?.mul(&*src.matrix(&g.with_site(Site::Fin)?)?)?;
            let rhs = tgt.matrix(&g)?.as_ref().mul(&lemma31_iso(field, n, s)?)?;
            if lhs != rhs {
                return Ok(Outcome::check(false, format!("square fails for n = {n}, map {g}"))
                    .with(Some(Witness::matrix(&lhs.sub(&rhs)?))));
            }
        }
        Ok(Outcome::check(true, "20 squares commute"))
    });
}

fn degeneracy<F: Field>(p: &Pipeline<F>, cx: &mut Ctx) {
    let s = Suite::Degeneracy;
    let max = cx.cfg.corpus.max_degree;
    cx.run(s, "degenerate family sizes", |_| {
        let got: Vec<usize> = (0..=4).map(|n| degenerate_family(n, DiagonalRule::Adjacent).len()).collect();
        Ok(dims_eq(&got, &[1, 3, 6, 9, 12]))
    });
    cx.run(s, &format!("adjacent diagonals are closed through degree {max}"), |_| {
        p.cube(max)?;
        Ok(Outcome::check(true, "delta(D_n) in D_{n-1}"))
    });
    cx.run(s, "all diagonals break closure at degree 3", |_| {
        match CubeComplex::build(p.gmod().clone(), 3, DiagonalRule::AllPairs, p.cap()) {
            Err(Error::NotSubcomplex { degree, witness }) => {
                Ok(Outcome::check(degree == 3, format!("degree {degree}: {witness}")))
            }
            Err(e) => Err(e),
            Ok(_) => Ok(Outcome::check(true, "closed for this input")),
        }
    });
    cx.run(s, "normalized Hochschild complex has the same homology", |_| {
        let a = p.hochschild(max + 1)?.homology_dims(max)?;
        let b = normalized_hochschild_complex(p.fmod().as_ref(), max + 1)?.homology_dims(max)?;
        Ok(Outcome::check(a == b, format!("{a:?} vs {b:?}")))
    });
    cx.run(s, "literal B convention against B^2 = 0", |_| {
        let g = p.fmod().as_ref();
        let bad = (0..max).find(|&n| {
            let b0 = connes_b(g, n, BConvention::Literal);
            let b1 = connes_b(g, n + 1, BConvention::Literal);
            matches!((b0, b1), (Ok(b0), Ok(b1)) if b1.mul(&b0).is_ok_and(|m| !m.is_zero()))
        });
        Ok(Outcome::check(
            true,
            match bad {
                Some(n) => format!("B B != 0 on C_{n}; standard signs are used"),
                None => "literal B squares to zero here".into(),
            },
        ))
    });
}

fn field_suite(suite: Suite, field: ScalarField, rec: &mut Recorder, cfg: &RunConfig) -> Result<()> {
    match field {
        ScalarField::Rationals => run_field(suite, &Rationals, rec, cfg),
        ScalarField::Prime(p) => run_field(suite, &PrimeField::new(p)?, rec, cfg),
    }
    Ok(())
}

fn run_field<F: Field>(suite: Suite, f: &F, rec: &mut Recorder, cfg: &RunConfig) {
    match suite {
        Suite::Representables => representables(f, rec, cfg),
        Suite::PullbackIso => lemma31(f, rec),
        _ => {}
    }
}

fn run_pipeline<F: Field>(suite: Suite, p: &Pipeline<F>, cx: &mut Ctx) {
    match suite {
        Suite::Identities => identities(p, cx),
        Suite::LowDegree => prop53(p, cx),
        Suite::StableSequence => stable_sequence(p, cx),
        Suite::Periodicity => periodicity(p, cx),
        Suite::StabB => stab_b(p, cx),
        Suite::Ladder => ladder_suite(p, cx),
        Suite::Q0 => q0(p, cx),
        Suite::Degeneracy => degeneracy(p, cx),
        _ => {}
    }
}

fn field_only(s: Suite) -> bool {
    matches!(s, Suite::Representables | Suite::PullbackIso)
}

/// Runs a suite over the corpus; deterministic for a fixed seed.
pub fn run_suite(suite: Suite, cfg: &RunConfig) -> Result<SuiteReport> {
    let suites: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
    let mut pipelines = Vec::new();
    for a in &cfg.corpus.algebras {
        for &f in &cfg.corpus.fields {
            pipelines.push((a.to_string(), f.to_string(), AnyPipeline::for_algebra(a, f, cfg.cap)?));
        }
    }
    let fields: Vec<ScalarField> = {
        let mut seen = BTreeSet::new();
        cfg.corpus.fields.iter().filter(|f| seen.insert(f.to_string())).copied().collect()
    };
    let mut rec = Recorder { seed: cfg.seed, checks: Vec::new(), timings: BTreeMap::new() };
    for s in suites {
        if field_only(s) {
            for &f in &fields {
                field_suite(s, f, &mut rec, cfg)?;
            }
            continue;
        }
        if s == Suite::LowDegree {
            characteristic_sensitivity(&mut rec);
        }
        for (input, field, any) in &pipelines {
            let mut cx = Ctx { rec: &mut rec, cfg, input: input.clone(), field: field.clone() };
            with_pipeline!(any, p => run_pipeline(s, p, &mut cx));
        }
    }
    let inputs = Inputs {
        algebras: cfg.corpus.algebras.iter().map(|a| a.to_string()).collect(),
        fields: cfg.corpus.fields.iter().map(|f| f.to_string()).collect(),
        max_degree: cfg.corpus.max_degree,
    };
    Ok(SuiteReport::new(suite.name(), inputs, cfg.seed, rec.checks, rec.timings))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> RunConfig {
        RunConfig {
            corpus: Corpus {
                algebras: vec![AlgebraSpec::Trunc(2)],
                fields: vec![ScalarField::Prime(2)],
                max_degree: 2,
            },
            samples: 10,
            ..RunConfig::default()
        }
    }

    #[test]
    fn suite_names_roundtrip() {
        for s in Suite::EACH {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn empty_corpus_gives_an_empty_report() {
        let cfg = RunConfig {
            corpus: Corpus { algebras: vec![], fields: vec![], max_degree: 3 },
            ..RunConfig::default()
        };
        let r = run_suite(Suite::Ladder, &cfg).unwrap();
        assert_eq!(r.summary.checks, 0);
        assert_eq!(r.status, "pass");
        let back: SuiteReport = serde_json::from_str(&render_report(&r, ReportFormat::Json).unwrap()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn witnesses_roundtrip() {
        let m = SparseMatrix::from_i64_rows(&Rationals, &[&[1, 0], &[0, -3]]).unwrap();
        let checks = vec![Check {
            name: "synthetic".into(),
            input: "none".into(),
            field: "Q".into(),
            status: Status::Fail,
            detail: "nonzero".into(),
            witness: Some(Witness::matrix(&m.scale(&Rationals.inv(&Rationals.from_i64(2)).unwrap()))),
        }];
        let inputs = Inputs { algebras: vec![], fields: vec![], max_degree: 0 };
        let r = SuiteReport::new("synthetic", inputs, 1, checks, BTreeMap::new());
        assert!(r.failed());
        let json = render_report(&r, ReportFormat::Json).unwrap();
        assert!(json.contains("\"-3/2\""));
        let back: SuiteReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        let md = render_report(&r, ReportFormat::Markdown).unwrap();
        assert_eq!(md.lines().filter(|l| l.starts_with("| synthetic")).count(), 1);
        let csv = render_report(&r, ReportFormat::Csv).unwrap();
        assert_eq!(csv.lines().count(), 2);
    }

    #[test]
    fn ladder_and_sequence_pass_on_a_small_corpus() {
        for s in [Suite::Ladder, Suite::StableSequence, Suite::LowDegree] {
            let r = run_suite(s, &small()).unwrap();
            assert!(!r.failed(), "{}", render_report(&r, ReportFormat::Markdown).unwrap());
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let a = run_suite(Suite::StabB, &small()).unwrap().without_timings();
        let b = run_suite(Suite::StabB, &small()).unwrap().without_timings();
        assert_eq!(
            render_report(&a, ReportFormat::Json).unwrap(),
            render_report(&b, ReportFormat::Json).unwrap()
        );
    }
}
