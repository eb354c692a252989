mod presets;
mod report;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hk_core::exactalg::DirectSum;
use hk_core::gcomplex::{bs_cohomology, verify_contraction, GSimplicialComplex, GscSpec, Operator};
use hk_core::groups::{Group, BAR_BUDGET};
use hk_core::gsets::{FiniteGSet, Odometer, OdometerSpec};
use hk_core::hkpipeline::{
    bcr_gh_crosscheck, e2_page, groupoid_homology, hatted_homology, hatted_of_gset, hk_compare, two_row_solve,
    KTheoryInput, Options, SolveStatus,
};
use hk_core::{CoeffRing, Exec};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use presets::Preset;
use report::{
    BsBody, ClassRow, HkCheckBody, HomologyBody, LevelRow, Render, Report, SpecseqBody, VerifyBody,
};

#[derive(Parser, Debug)]
#[command(name = "hk", version, about = "Groupoid homology, blow-ups and equivariant cohomology of group actions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Run every loop on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Groupoid homology of an odometer action, level by level and in the colimit.
    Homology(PipelineArgs),
    /// Homology of the torsion blow-up, per class and summed.
    Hatted(PipelineArgs),
    /// Cohomology of the coinvariant double complex.
    BsCohomology(EquivArgs),
    /// Hatted homology in degree n against the double complex in degree -n.
    Crosscheck(EquivArgs),
    /// E2 page and the two-row d2 solver.
    Specseq(SpecArgs),
    /// Rational comparison of hatted homology with K-theory data.
    HkCheck(HkArgs),
    /// Built-in verification suites.
    Verify(VerifyArgs),
    /// List preset names.
    Presets,
}

#[derive(Args, Debug)]
struct Source {
    /// Named example (see `hk presets`).
    #[arg(long, conflicts_with = "input")]
    preset: Option<String>,
    /// JSON input file.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PipelineArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value = "Z")]
    coeffs: String,
    #[arg(long, default_value_t = 4)]
    max_degree: usize,
    /// Truncation level (overrides the input's).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    levels: Option<u64>,
    /// Trailing connecting maps used to identify colimits.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
    window: u64,
}

#[derive(Args, Debug)]
struct EquivArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value = "Q")]
    coeffs: String,
    #[arg(long, default_value_t = 3)]
    max_degree: usize,
    /// Use the odometer level set instead of a point.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    levels: Option<u64>,
}

#[derive(Args, Debug)]
struct SpecArgs {
    #[command(flatten)]
    source: Source,
    /// Even and odd target dimensions, e.g. `5,5`; defaults to the K-theory ranks.
    #[arg(long)]
    targets: Option<String>,
}

#[derive(Args, Debug)]
struct HkArgs {
    #[command(flatten)]
    source: Source,
    /// K-theory JSON; required with `--input`.
    #[arg(long)]
    ktheory: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    max_degree: usize,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    levels: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Contraction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum GSetKind {
    Point,
    Regular,
    RegularPlusPoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OperatorArg {
    Conical,
    Printed,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    /// `trivial`, `Z<m>` or `S<n>`.
    #[arg(long, default_value = "Z2")]
    group: String,
    #[arg(long, value_enum, default_value_t = GSetKind::Point)]
    gset: GSetKind,
    #[arg(long, default_value_t = 3)]
    dim_cap: usize,
    #[arg(long, value_enum, default_value_t = OperatorArg::Conical)]
    operator: OperatorArg,
}

/// `{"complex": ..., "odometer": ...}`; without an odometer the G-set is a point.
#[derive(Deserialize, Serialize, Debug)]
#[serde(deny_unknown_fields)]
struct EquivInput {
    complex: GscSpec,
    #[serde(default)]
    odometer: Option<OdometerSpec>,
}

/// E2 input: homology dimension rows by `q`, coefficient dimensions by `q`,
/// and targets or K-theory data.
#[derive(Deserialize, Serialize, Debug)]
#[serde(deny_unknown_fields)]
struct SpecInput {
    rows: BTreeMap<i64, Vec<usize>>,
    cohomology: BTreeMap<i64, usize>,
    #[serde(default)]
    targets: Option<(usize, usize)>,
    #[serde(default)]
    ktheory: Option<KTheoryInput>,
}

struct Outcome {
    table: String,
    json: String,
    pass: bool,
}

fn outcome<T: Render + Serialize>(report: Report<T>, pass: bool) -> Result<Outcome> {
    Ok(Outcome { table: report.table(), json: serde_json::to_string_pretty(&report)?, pass })
}

/// `/a/0/b` for the path where deserialization failed.
fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut s = String::new();
    for seg in path.iter() {
        s.push('/');
        match seg {
            Segment::Seq { index } => s.push_str(&index.to_string()),
            Segment::Map { key } => s.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => s.push_str(variant),
            Segment::Unknown => s.push('?'),
        }
    }
    s
}

fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de)
        .map_err(|e| anyhow!("{}: at {}: {}", path.display(), pointer(e.path()), e.inner()))
}

fn coeffs(s: &str) -> Result<CoeffRing> {
    s.parse().map_err(|e| anyhow!("--coeffs: {e}"))
}

fn budget() -> Result<usize> {
    match std::env::var("HK_BUDGET") {
        Ok(v) => v.trim().parse().map_err(|_| anyhow!("HK_BUDGET must be a positive integer, got `{v}`")),
        Err(_) => Ok(BAR_BUDGET),
    }
}

fn exec(sequential: bool) -> Exec {
    if sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    }
}

enum Resolved {
    Preset(Preset),
    File(PathBuf),
}

impl Source {
    fn resolve(&self) -> Result<(Resolved, String)> {
        match (&self.preset, &self.input) {
            (Some(p), None) => {
                let p = Preset::parse(p)?;
                let label = format!("preset {}", p.name());
                Ok((Resolved::Preset(p), label))
            }
            (None, Some(f)) => Ok((Resolved::File(f.clone()), format!("input {}", f.display()))),
            _ => bail!("give exactly one of --preset and --input"),
        }
    }
}

fn odometer_spec(src: &Resolved, levels: Option<u64>) -> Result<OdometerSpec> {
    let levels = levels.map(|l| l as usize);
    match src {
        Resolved::Preset(p) => p.odometer(levels),
        Resolved::File(f) => {
            let mut spec: OdometerSpec = load(f)?;
            if let Some(l) = levels {
                spec.truncation_level = l;
            }
            Ok(spec)
        }
    }
}

fn run_pipeline(args: &PipelineArgs, hatted: bool, ex: Exec) -> Result<Outcome> {
    let (src, label) = args.source.resolve()?;
    let spec = odometer_spec(&src, args.levels)?;
    let ring = coeffs(&args.coeffs)?;
    let opts = Options { depth: args.max_degree, window: args.window as usize, budget: budget()?, exec: ex };
    let rows = |levels: &[hk_core::hkpipeline::HomologyTable]| -> Vec<LevelRow> {
        levels.iter().enumerate().map(|(k, t)| LevelRow { level: k, degrees: t.degrees.clone() }).collect()
    };
    let body = if hatted {
        let h = hatted_homology(&spec, &ring, &opts)?;
        HomologyBody {
            route: "hatted".into(),
            coeffs: ring,
            max_degree: args.max_degree,
            odometer_indices: spec.odometer_indices[..spec.truncation_level.min(spec.odometer_indices.len())].to_vec(),
            levels: rows(&h.levels),
            colimits: h.colimits.clone(),
            classes: h
                .classes
                .iter()
                .map(|c| ClassRow {
                    representative: c.representative.to_string(),
                    centralizer: c.centralizer.clone(),
                    colimits: c.system.colimits.clone(),
                })
                .collect(),
            m: Some(h.m),
        }
    } else {
        let s = groupoid_homology(&spec, &ring, &opts)?;
        HomologyBody {
            route: "groupoid".into(),
            coeffs: ring,
            max_degree: args.max_degree,
            odometer_indices: spec.odometer_indices[..spec.truncation_level.min(spec.odometer_indices.len())].to_vec(),
            levels: rows(&s.levels),
            colimits: s.colimits.clone(),
            classes: Vec::new(),
            m: None,
        }
    };
    outcome(Report::new(if hatted { "hatted" } else { "homology" }, &label, body), true)
}

fn equivariant(src: &Resolved, levels: Option<u64>) -> Result<(GSimplicialComplex, FiniteGSet)> {
    match src {
        Resolved::Preset(p) => p.equivariant(levels.map(|l| l as usize)),
        Resolved::File(f) => {
            let input: EquivInput = load(f)?;
            let y = GSimplicialComplex::from_spec(&input.complex)?;
            let x = match input.odometer {
                None => FiniteGSet::point(y.group()),
                Some(mut spec) => {
                    if let Some(l) = levels {
                        spec.truncation_level = l as usize;
                    }
                    if spec.group != input.complex.group {
                        bail!("{}: the odometer and the complex use different groups", f.display());
                    }
                    let odo = Odometer::new(&spec)?;
                    odo.level(spec.truncation_level)?.set.clone()
                }
            };
            Ok((y, x))
        }
    }
}

fn run_bs(args: &EquivArgs) -> Result<Outcome> {
    let (src, label) = args.source.resolve()?;
    let (y, x) = equivariant(&src, args.levels)?;
    let ring = coeffs(&args.coeffs)?;
    let d = args.max_degree as i64;
    let degrees = bs_cohomology(&y, &x, &ring, -d..=d)?;
    let body = BsBody { coeffs: ring, complex_orbits: y.orbit_counts(), gset_size: x.len(), degrees };
    outcome(Report::new("bs-cohomology", &label, body), true)
}

fn run_crosscheck(args: &EquivArgs, ex: Exec) -> Result<Outcome> {
    let (src, label) = args.source.resolve()?;
    let (y, x) = equivariant(&src, args.levels)?;
    let ring = coeffs(&args.coeffs)?;
    let d = args.max_degree as i64;
    let opts = Options { budget: budget()?, exec: ex, ..Options::default() };
    let r = bcr_gh_crosscheck(&y, &x, &ring, -d..=d, &opts)?;
    let pass = r.equal;
    outcome(Report::new("crosscheck", &label, r), pass)
}

fn parse_targets(s: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [a, b] => Ok((a.parse()?, b.parse()?)),
        _ => bail!("--targets expects `even,odd`, got `{s}`"),
    }
}

fn ranks(k: &KTheoryInput) -> Result<(usize, usize)> {
    Ok((k.k0()?.rational_rank(), k.k1()?.rational_rank()))
}

fn run_specseq(args: &SpecArgs) -> Result<Outcome> {
    let (src, label) = args.source.resolve()?;
    let (rows, cohomology, default_targets) = match &src {
        Resolved::Preset(p) => {
            let (rows, coh) =
                p.surface_rows().ok_or_else(|| anyhow!("preset `{}` carries no E2 data", p.name()))?;
            (rows, coh, Some(ranks(&p.ktheory())?))
        }
        Resolved::File(f) => {
            let input: SpecInput = load(f)?;
            let t = match (&input.targets, &input.ktheory) {
                (Some(t), _) => Some(*t),
                (None, Some(k)) => Some(ranks(k)?),
                (None, None) => None,
            };
            (input.rows, input.cohomology, t)
        }
    };
    let targets = match &args.targets {
        Some(s) => parse_targets(s)?,
        None => default_targets.ok_or_else(|| anyhow!("no targets: pass --targets or include them in the input"))?,
    };
    let page = e2_page(&rows, &cohomology);
    let solve = two_row_solve(&page, targets)?;
    let pass = solve.status != SolveStatus::Inconsistent;
    let body = SpecseqBody { e2_totals: page.totals(), page, targets, solve };
    outcome(Report::new("specseq", &label, body), pass)
}

fn run_hk_check(args: &HkArgs, ex: Exec) -> Result<Outcome> {
    let (src, label) = args.source.resolve()?;
    let opts = Options { depth: args.max_degree, budget: budget()?, exec: ex, ..Options::default() };
    let q = CoeffRing::Rationals;
    let given = match &args.ktheory {
        Some(f) => Some(load::<KTheoryInput>(f)?),
        None => None,
    };
    let (homology, m, k) = match &src {
        Resolved::Preset(p @ (Preset::CyclicPoint(_) | Preset::DihedralTreePoint)) => {
            let (_, x) = p.equivariant(None)?;
            let t = hatted_of_gset(&x, &q, &opts)?;
            let h: BTreeMap<i64, DirectSum> = t.degrees.iter().map(|(n, g)| (*n, DirectSum::from(g))).collect();
            (h, None, given.unwrap_or_else(|| p.ktheory()))
        }
        Resolved::Preset(Preset::SurfaceGenus(_)) => {
            bail!("surface presets carry E2 data only; use `hk specseq`")
        }
        Resolved::Preset(p) => {
            let h = hatted_homology(&p.odometer(args.levels.map(|l| l as usize))?, &q, &opts)?;
            (h.colimit_table()?, Some(h.m), given.unwrap_or_else(|| p.ktheory()))
        }
        Resolved::File(_) => {
            let k = given.ok_or_else(|| anyhow!("--ktheory is required with --input"))?;
            let h = hatted_homology(&odometer_spec(&src, args.levels)?, &q, &opts)?;
            (h.colimit_table()?, Some(h.m), k)
        }
    };
    let k = match m {
        Some(m) => k.with_m(m as u64),
        None => k,
    };
    let compare = hk_compare(&homology, &k)?;
    let pass = compare.pass;
    outcome(Report::new("hk-check", &label, HkCheckBody { homology, ktheory: k, m, compare }), pass)
}

fn parse_group(s: &str) -> Result<Group> {
    let n = |r: &str| -> Result<usize> { r.parse().map_err(|_| anyhow!("--group: bad order in `{s}`")) };
    match s {
        "trivial" => Ok(Group::trivial()),
        _ if s.starts_with('Z') || s.starts_with('C') => {
            let m = n(&s[1..])?;
            if m == 0 {
                bail!("--group: order must be positive");
            }
            Ok(Group::cyclic(m as u64))
        }
        _ if s.starts_with('S') => {
            let d = n(&s[1..])?;
            if d == 0 || d > 4 {
                bail!("--group: symmetric groups S1 to S4 only");
            }
            Ok(Group::symmetric(d))
        }
        _ => bail!("--group: expected `trivial`, `Z<m>` or `S<n>`, got `{s}`"),
    }
}

fn run_verify(args: &VerifyArgs) -> Result<Outcome> {
    let g = parse_group(&args.group)?;
    let x = match args.gset {
        GSetKind::Point => FiniteGSet::point(&g),
        GSetKind::Regular => FiniteGSet::regular(&g)?,
        GSetKind::RegularPlusPoint => FiniteGSet::regular(&g)?.disjoint_union(&FiniteGSet::point(&g))?,
    };
    let op = match args.operator {
        OperatorArg::Conical => Operator::Conical,
        OperatorArg::Printed => Operator::Printed,
    };
    let report = verify_contraction(&x, args.dim_cap, op)?;
    let pass = report.passed();
    let gset = args.gset.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    let body = VerifyBody { suite: "contraction".into(), group: g.name(), gset, dim_cap: args.dim_cap, report };
    outcome(Report::new("verify", &format!("group {}", args.group), body), pass)
}

fn run(cli: &Cli) -> Result<Outcome> {
    let ex = exec(cli.sequential);
    match &cli.command {
        Command::Homology(a) => run_pipeline(a, false, ex),
        Command::Hatted(a) => run_pipeline(a, true, ex),
        Command::BsCohomology(a) => run_bs(a),
        Command::Crosscheck(a) => run_crosscheck(a, ex),
        Command::Specseq(a) => run_specseq(a),
        Command::HkCheck(a) => run_hk_check(a, ex),
        Command::Verify(a) => run_verify(a),
        Command::Presets => {
            let json = serde_json::to_string_pretty(&serde_json::json!({
                "schema_version": report::SCHEMA_VERSION,
                "presets": presets::NAMES,
            }))?;
            Ok(Outcome { table: presets::NAMES.join("\n") + "\n", json, pass: true })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(o) => {
            match cli.format {
                Format::Table => print!("{}", o.table),
                Format::Json => println!("{}", o.json),
            }
            if o.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
