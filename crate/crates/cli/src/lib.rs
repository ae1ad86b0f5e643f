//! JSON instance format, command dispatch and report rendering for `qform`.

use std::fmt::Write as _;
use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use qform_core::blockdiag::block_diagonalize;
use qform_core::counting::{composite_modulus, count_composite, count_form, local_density};
use qform_core::oracle::{chi_square_uniform, enumerate_mod, DEFAULT_BUDGET};
use qform_core::sampling::{CompositeSampler, FormSampler};
use qform_core::{
    Block, Error as CoreError, Matrix, PrimePower, QuadraticForm, RandomSource, RepCounts,
    RepKind, SampleOutcome,
};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_NO_SOLUTION: u8 = 1;
pub const EXIT_FAIL: u8 = 2;
pub const EXIT_INPUT: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Core(#[from] CoreError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(CoreError::NoSolution) => EXIT_NO_SOLUTION,
            CliError::Core(CoreError::Fail) => EXIT_FAIL,
            _ => EXIT_INPUT,
        }
    }
}

fn parse_err(msg: impl Into<String>) -> CliError {
    CliError::Parse(msg.into())
}

/// Arbitrary-precision integer written as a decimal string; reads strings or JSON integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decimal(pub BigInt);

impl Serialize for Decimal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Decimal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Signed(i64),
            Unsigned(u64),
        }
        match Raw::deserialize(d)? {
            Raw::Text(s) => s
                .trim()
                .parse()
                .map(Decimal)
                .map_err(|_| D::Error::custom(format!("invalid decimal integer {s:?}"))),
            Raw::Signed(v) => Ok(Decimal(v.into())),
            Raw::Unsigned(v) => Ok(Decimal(v.into())),
        }
    }
}

impl From<BigInt> for Decimal {
    fn from(v: BigInt) -> Self {
        Decimal(v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSpec {
    pub p: Decimal,
    pub k: u32,
}

/// The on-disk instance: either `p` and `k`, or `factors`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub q: Vec<Vec<Decimal>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Decimal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factors: Option<Vec<FactorSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<Decimal>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Modulus {
    PrimePower(PrimePower),
    Composite(Vec<PrimePower>),
}

impl Modulus {
    pub fn value(&self) -> BigUint {
        match self {
            Modulus::PrimePower(pp) => pp.modulus().clone(),
            Modulus::Composite(fs) => composite_modulus(fs),
        }
    }

    fn primes(&self) -> Vec<&BigUint> {
        match self {
            Modulus::PrimePower(pp) => vec![pp.p()],
            Modulus::Composite(fs) => fs.iter().map(|f| f.p()).collect(),
        }
    }
}

/// A validated instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub form: QuadraticForm,
    pub modulus: Modulus,
    pub t: Option<BigInt>,
}

fn prime_power(p: &Decimal, k: u32, field: &str) -> Result<PrimePower, CliError> {
    let p = p
        .0
        .to_biguint()
        .ok_or_else(|| parse_err(format!("field `{field}`: p must be positive")))?;
    Ok(PrimePower::new(p, k)?)
}

impl Instance {
    pub fn from_file(file: &InstanceFile) -> Result<Self, CliError> {
        let n = file.q.len();
        if n == 0 {
            return Err(parse_err("field `q`: matrix is empty"));
        }
        for (i, row) in file.q.iter().enumerate() {
            if row.len() != n {
                return Err(parse_err(format!(
                    "field `q`: row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
        }
        let rows = file.q.iter().map(|r| r.iter().map(|v| v.0.clone()).collect()).collect();
        let form = QuadraticForm::from_rows(rows)?;
        let modulus = match (&file.p, file.k, &file.factors) {
            (Some(p), Some(k), None) => Modulus::PrimePower(prime_power(p, k, "p")?),
            (None, None, Some(fs)) => Modulus::Composite(
                fs.iter()
                    .enumerate()
                    .map(|(i, f)| prime_power(&f.p, f.k, &format!("factors[{i}].p")))
                    .collect::<Result<_, _>>()?,
            ),
            (_, _, Some(_)) => return Err(parse_err("`factors` excludes `p` and `k`")),
            (None, _, None) => return Err(parse_err("missing field `p` (or `factors`)")),
            (Some(_), None, None) => return Err(parse_err("missing field `k`")),
        };
        if let Modulus::Composite(fs) = &modulus {
            // validates the factor list (non-empty, distinct primes)
            CompositeSampler::new(&form, fs)?;
        }
        Ok(Instance {
            form,
            modulus,
            t: file.t.as_ref().map(|t| t.0.clone()),
        })
    }

    pub fn to_file(&self) -> InstanceFile {
        let q = self
            .form
            .matrix()
            .rows()
            .into_iter()
            .map(|r| r.into_iter().map(Decimal).collect())
            .collect();
        let spec = |pp: &PrimePower| (Decimal(pp.p().clone().into()), pp.k());
        let (p, k, factors) = match &self.modulus {
            Modulus::PrimePower(pp) => {
                let (p, k) = spec(pp);
                (Some(p), Some(k), None)
            }
            Modulus::Composite(fs) => {
                let fs = fs.iter().map(spec).map(|(p, k)| FactorSpec { p, k }).collect();
                (None, None, Some(fs))
            }
        };
        InstanceFile {
            q,
            p,
            k,
            factors,
            t: self.t.clone().map(Decimal),
        }
    }

    fn target(&self) -> Result<&BigInt, CliError> {
        self.t.as_ref().ok_or_else(|| parse_err("missing field `t`"))
    }
}

pub fn parse_instance(text: &str) -> Result<Instance, CliError> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
    Instance::from_file(&file)
}

/// Reads an instance from `path`, or from stdin when `path` is `None` or `-`.
pub fn read_instance(path: Option<&Path>) -> Result<Instance, CliError> {
    let text = match path {
        Some(p) if p != Path::new("-") => std::fs::read_to_string(p)?,
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            s
        }
    };
    parse_instance(&text)
}

#[derive(Debug, Parser)]
#[command(name = "qform", version, about = "Count and sample solutions of x'Qx = t modulo prime powers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Total, primitive and non-primitive solution counts
    Count(Options),
    /// One uniformly random solution of the requested kind
    Sample(Options),
    /// Local density at p with its stabilization level
    Density(Options),
    /// Block-diagonal form and transformation U
    Diagonalize(Options),
    /// Compare against brute-force enumeration; optionally test uniformity
    Check(Options),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Any,
    Primitive,
    Nonprimitive,
}

impl From<KindArg> for RepKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Any => RepKind::Any,
            KindArg::Primitive => RepKind::Primitive,
            KindArg::Nonprimitive => RepKind::NonPrimitive,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Instance file (JSON); reads stdin when omitted or `-`
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, value_enum, default_value_t = KindArg::Any)]
    pub kind: KindArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of draws for the uniformity test in `check` (0 disables it)
    #[arg(long, default_value_t = 0)]
    pub trials: u64,
    /// Cap on vectors visited by brute-force enumeration
    #[arg(long, default_value_t = DEFAULT_BUDGET as u64)]
    pub budget: u64,
}

impl Command {
    pub fn options(&self) -> &Options {
        match self {
            Command::Count(o)
            | Command::Sample(o)
            | Command::Density(o)
            | Command::Diagonalize(o)
            | Command::Check(o) => o,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountReport {
    pub total: String,
    pub primitive: String,
    pub nonprimitive: String,
}

impl From<&RepCounts> for CountReport {
    fn from(c: &RepCounts) -> Self {
        CountReport {
            total: c.total.to_string(),
            primitive: c.primitive.to_string(),
            nonprimitive: c.nonprimitive.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleStatus {
    Solution,
    NoSolution,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleReport {
    pub kind: String,
    pub seed: u64,
    pub modulus: String,
    pub outcome: SampleStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityReport {
    pub numerator: String,
    pub denominator: String,
    pub level: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum BlockReport {
    #[serde(rename = "I")]
    TypeI { d: String },
    #[serde(rename = "II")]
    TypeII { ell: u64, a: String, b: String, c: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalizeReport {
    pub modulus: String,
    pub blocks: Vec<BlockReport>,
    pub u: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformityReport {
    pub kind: String,
    pub trials: u64,
    pub support: usize,
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub count: CountReport,
    pub oracle: CountReport,
    pub count_matches: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uniformity: Option<UniformityReport>,
    pub summary: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Report {
    Count(CountReport),
    Sample(SampleReport),
    Density(DensityReport),
    Diagonalize(DiagonalizeReport),
    Check(CheckReport),
}

/// A finished command: its report and the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: Report,
    pub code: u8,
}

fn strings(x: &[impl ToString]) -> Vec<String> {
    x.iter().map(|v| v.to_string()).collect()
}

fn matrix_strings(m: &Matrix) -> Vec<Vec<String>> {
    m.rows().iter().map(|r| strings(r)).collect()
}

fn counts(inst: &Instance, t: &BigInt) -> Result<RepCounts, CliError> {
    Ok(match &inst.modulus {
        Modulus::PrimePower(pp) => count_form(&inst.form, pp, t),
        Modulus::Composite(fs) => count_composite(&inst.form, fs, t)?,
    })
}

enum Sampler {
    Prime(FormSampler),
    Composite(CompositeSampler),
}

impl Sampler {
    fn new(inst: &Instance) -> Result<Self, CliError> {
        Ok(match &inst.modulus {
            Modulus::PrimePower(pp) => Sampler::Prime(FormSampler::new(&inst.form, pp)),
            Modulus::Composite(fs) => Sampler::Composite(CompositeSampler::new(&inst.form, fs)?),
        })
    }

    fn draw(&self, t: &BigInt, kind: RepKind, rng: &mut RandomSource) -> SampleOutcome {
        match self {
            Sampler::Prime(s) => s.sample(t, kind, rng),
            Sampler::Composite(s) => s.sample(t, kind, rng),
        }
    }
}

fn prime_power_only<'a>(inst: &'a Instance, what: &str) -> Result<&'a PrimePower, CliError> {
    match &inst.modulus {
        Modulus::PrimePower(pp) => Ok(pp),
        Modulus::Composite(_) => Err(parse_err(format!("{what} needs `p` and `k`, not `factors`"))),
    }
}

/// Runs one command on a parsed instance.
pub fn run(command: &Command, inst: &Instance) -> Result<Outcome, CliError> {
    let opts = command.options();
    let kind = RepKind::from(opts.kind);
    let ok = |report| Ok(Outcome { report, code: EXIT_OK });
    match command {
        Command::Count(_) => ok(Report::Count((&counts(inst, inst.target()?)?).into())),
        Command::Sample(_) => {
            let t = inst.target()?;
            let mut rng = RandomSource::from_seed(opts.seed);
            let outcome = Sampler::new(inst)?.draw(t, kind, &mut rng);
            let (status, x, code) = match outcome {
                SampleOutcome::Solution(x) => {
                    let x = x.iter().map(|e| e.value.to_string()).collect();
                    (SampleStatus::Solution, Some(x), EXIT_OK)
                }
                SampleOutcome::NoSolution => (SampleStatus::NoSolution, None, EXIT_NO_SOLUTION),
                SampleOutcome::Fail => (SampleStatus::Fail, None, EXIT_FAIL),
            };
            let report = SampleReport {
                kind: kind.to_string(),
                seed: opts.seed,
                modulus: inst.modulus.value().to_string(),
                outcome: status,
                x,
            };
            Ok(Outcome { report: Report::Sample(report), code })
        }
        Command::Density(_) => {
            let pp = prime_power_only(inst, "density")?;
            let d = local_density(&inst.form, pp.p(), inst.target()?)?;
            ok(Report::Density(DensityReport {
                numerator: d.numerator.to_string(),
                denominator: d.denominator.to_string(),
                level: d.level,
            }))
        }
        Command::Diagonalize(_) => {
            let pp = prime_power_only(inst, "diagonalize")?;
            let bd = block_diagonalize(&inst.form, pp);
            let blocks = bd
                .blocks
                .iter()
                .map(|b| match b {
                    Block::TypeI(d) => BlockReport::TypeI { d: d.to_string() },
                    Block::TypeII { ell, a, b, c } => BlockReport::TypeII {
                        ell: *ell,
                        a: a.to_string(),
                        b: b.to_string(),
                        c: c.to_string(),
                    },
                })
                .collect();
            ok(Report::Diagonalize(DiagonalizeReport {
                modulus: pp.modulus().to_string(),
                blocks,
                u: matrix_strings(&bd.u),
            }))
        }
        Command::Check(_) => check(inst, kind, opts),
    }
}

fn check(inst: &Instance, kind: RepKind, opts: &Options) -> Result<Outcome, CliError> {
    let t = inst.target()?;
    let q = inst
        .modulus
        .value()
        .to_u64()
        .ok_or(CoreError::BudgetExceeded { needed: u128::MAX, budget: u128::from(opts.budget) })?;
    let primes: Vec<u64> = inst.modulus.primes().iter().filter_map(|p| p.to_u64()).collect();
    let (sols, oracle) = enumerate_mod(&inst.form, q, &primes, t, u128::from(opts.budget))?;
    let count = counts(inst, t)?;
    let count_matches = count == oracle;
    let mut summary = vec![format!(
        "count==oracle: {}",
        if count_matches { "OK" } else { "MISMATCH" }
    )];
    let mut uniformity = None;
    if opts.trials > 0 {
        let support: Vec<Vec<BigUint>> = sols
            .into_iter()
            .filter(|x| {
                kind.matches(primes.iter().all(|&p| x.iter().any(|c| !(c % p).is_zero())))
            })
            .collect();
        if support.is_empty() {
            summary.push(format!("uniformity: no {kind} solutions"));
        } else {
            let mut index = std::collections::HashMap::new();
            for (i, x) in support.iter().enumerate() {
                index.insert(x.clone(), i);
            }
            let mut hist = vec![0u64; support.len()];
            let sampler = Sampler::new(inst)?;
            let mut rng = RandomSource::from_seed(opts.seed);
            for _ in 0..opts.trials {
                match sampler.draw(t, kind, &mut rng) {
                    SampleOutcome::Solution(x) => {
                        let x: Vec<BigUint> = x.into_iter().map(|e| e.value).collect();
                        match index.get(&x) {
                            Some(&i) => hist[i] += 1,
                            None => {
                                summary.push(format!("uniformity: draw {x:?} is not a solution"));
                                return finish_check(count, oracle, false, None, summary);
                            }
                        }
                    }
                    SampleOutcome::NoSolution => return Err(CoreError::NoSolution.into()),
                    SampleOutcome::Fail => return Err(CoreError::Fail.into()),
                }
            }
            let chi = chi_square_uniform(&hist, support.len())?;
            summary.push(format!(
                "uniformity: {} (chi2 = {:.3}, df = {})",
                if chi.pass { "OK" } else { "REJECTED" },
                chi.statistic(),
                chi.degrees_of_freedom
            ));
            uniformity = Some(UniformityReport {
                kind: kind.to_string(),
                trials: opts.trials,
                support: support.len(),
                statistic: chi.statistic(),
                degrees_of_freedom: chi.degrees_of_freedom,
                pass: chi.pass,
            });
        }
    }
    let passed = count_matches && uniformity.as_ref().is_none_or(|u| u.pass);
    finish_check(count, oracle, passed, uniformity, summary)
}

fn finish_check(
    count: RepCounts,
    oracle: RepCounts,
    passed: bool,
    uniformity: Option<UniformityReport>,
    summary: Vec<String>,
) -> Result<Outcome, CliError> {
    let report = CheckReport {
        count: (&count).into(),
        oracle: (&oracle).into(),
        count_matches: count == oracle,
        uniformity,
        summary,
    };
    Ok(Outcome {
        report: Report::Check(report),
        code: if passed { EXIT_OK } else { EXIT_FAIL },
    })
}

/// Renders a report as pretty JSON or plain text.
pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(report).expect("reports serialize"),
        Format::Text => render_text(report),
    }
}

fn render_text(report: &Report) -> String {
    let mut out = String::new();
    match report {
        Report::Count(c) => {
            let _ = write!(
                out,
                "total: {}\nprimitive: {}\nnonprimitive: {}",
                c.total, c.primitive, c.nonprimitive
            );
        }
        Report::Sample(s) => match &s.x {
            Some(x) => {
                let _ = write!(out, "x = ({}) mod {}", x.join(", "), s.modulus);
            }
            None if s.outcome == SampleStatus::Fail => out.push_str("fail: retry budget exhausted"),
            None => {
                let _ = write!(out, "no {} solution", s.kind);
            }
        },
        Report::Density(d) => {
            let _ = write!(out, "density: {}/{} (level {})", d.numerator, d.denominator, d.level);
        }
        Report::Diagonalize(d) => {
            let _ = writeln!(out, "blocks mod {}:", d.modulus);
            for b in &d.blocks {
                let _ = match b {
                    BlockReport::TypeI { d } => writeln!(out, "  [{d}]"),
                    BlockReport::TypeII { ell, a, b, c } => {
                        writeln!(out, "  2^{ell} [[2*{a}, {b}], [{b}, 2*{c}]]")
                    }
                };
            }
            out.push_str("U:");
            for row in &d.u {
                let _ = write!(out, "\n  [{}]", row.join(", "));
            }
        }
        Report::Check(c) => out.push_str(&c.summary.join("\n")),
    }
    out
}

/// Parses, runs and renders; the `Err` branch carries an exit code and message.
pub fn execute(cli: &Cli) -> Result<(String, u8), CliError> {
    let opts = cli.command.options();
    let inst = read_instance(opts.input.as_deref())?;
    let outcome = run(&cli.command, &inst)?;
    Ok((render(&outcome.report, opts.format), outcome.code))
}
