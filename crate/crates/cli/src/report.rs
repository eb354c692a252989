//! Report types written as JSON, and their text rendering. The text form
//! is computed from the same values, never from separate state.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use hk_core::exactalg::{ColimitVerdict, CompareReport, DirectSum};
use hk_core::gcomplex::ContractionReport;
use hk_core::hkpipeline::{CrosscheckReport, E2Page, KTheoryInput, SolveResult, SolveStatus};
use hk_core::{CoeffRing, FgAbGroup};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report<T> {
    pub schema_version: u32,
    pub command: String,
    pub source: String,
    pub result: T,
}

impl<T: Render> Report<T> {
    pub fn new(command: &str, source: &str, result: T) -> Self {
        Report { schema_version: SCHEMA_VERSION, command: command.into(), source: source.into(), result }
    }

    pub fn table(&self) -> String {
        let mut out = format!("hk {} ({})\n", self.command, self.source);
        self.result.render(&mut out);
        out
    }
}

pub trait Render {
    fn render(&self, out: &mut String);
}

/// Left-aligned columns separated by two spaces.
fn columns(out: &mut String, header: &[String], rows: &[Vec<String>]) {
    let mut width: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (i, c) in r.iter().enumerate() {
            width[i] = width[i].max(c.chars().count());
        }
    }
    let line = |out: &mut String, cells: &[String]| {
        let s: Vec<String> = cells.iter().zip(&width).map(|(c, w)| format!("{c:<w$}")).collect();
        let _ = writeln!(out, "  {}", s.join("  ").trim_end());
    };
    line(out, header);
    for r in rows {
        line(out, r);
    }
}

fn degree_table<G: ToString>(out: &mut String, label: &str, t: &BTreeMap<i64, G>) {
    let header = vec!["n".to_string(), label.to_string()];
    let rows: Vec<Vec<String>> = t.iter().map(|(n, g)| vec![n.to_string(), g.to_string()]).collect();
    columns(out, &header, &rows);
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelRow {
    pub level: usize,
    pub degrees: BTreeMap<i64, FgAbGroup>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRow {
    pub representative: String,
    pub centralizer: String,
    pub colimits: BTreeMap<i64, ColimitVerdict>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyBody {
    pub route: String,
    pub coeffs: CoeffRing,
    pub max_degree: usize,
    pub odometer_indices: Vec<u64>,
    pub levels: Vec<LevelRow>,
    pub colimits: BTreeMap<i64, ColimitVerdict>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub classes: Vec<ClassRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
}

impl Render for HomologyBody {
    fn render(&self, out: &mut String) {
        let _ = writeln!(out, "route {}, coefficients {}, indices {:?}", self.route, self.coeffs, self.odometer_indices);
        let degrees: Vec<i64> = (0..=self.max_degree as i64).collect();
        let mut header = vec!["level".to_string()];
        header.extend(degrees.iter().map(|n| format!("H_{n}")));
        let mut rows: Vec<Vec<String>> = self
            .levels
            .iter()
            .map(|l| {
                let mut r = vec![l.level.to_string()];
                r.extend(degrees.iter().map(|n| l.degrees.get(n).map_or("-".into(), |g| g.to_string())));
                r
            })
            .collect();
        let mut colim = vec!["colim".to_string()];
        colim.extend(degrees.iter().map(|n| self.colimits.get(n).map_or("-".into(), |v| v.to_string())));
        rows.push(colim);
        columns(out, &header, &rows);
        if !self.classes.is_empty() {
            let _ = writeln!(out, "per class colimits");
            let mut header = vec!["class".to_string(), "centralizer".to_string()];
            header.extend(degrees.iter().map(|n| format!("H_{n}")));
            let rows: Vec<Vec<String>> = self
                .classes
                .iter()
                .map(|c| {
                    let mut r = vec![c.representative.clone(), c.centralizer.clone()];
                    r.extend(degrees.iter().map(|n| c.colimits.get(n).map_or("-".into(), |v| v.to_string())));
                    r
                })
                .collect();
            columns(out, &header, &rows);
        }
        if let Some(m) = self.m {
            let _ = writeln!(out, "m = {m}");
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BsBody {
    pub coeffs: CoeffRing,
    pub complex_orbits: Vec<usize>,
    pub gset_size: usize,
    pub degrees: BTreeMap<i64, FgAbGroup>,
}

impl Render for BsBody {
    fn render(&self, out: &mut String) {
        let _ = writeln!(
            out,
            "coefficients {}, simplex orbits per dimension {:?}, |X| = {}",
            self.coeffs, self.complex_orbits, self.gset_size
        );
        degree_table(out, "H^n", &self.degrees);
    }
}

impl Render for CrosscheckReport {
    fn render(&self, out: &mut String) {
        let _ = writeln!(out, "coefficients {}, stabilizer orders invertible: {}", self.coeffs, self.invertible);
        let header: Vec<String> = ["n", "hatted H_n", "bs H^-n", "equal"].iter().map(|s| s.to_string()).collect();
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| vec![r.degree.to_string(), r.hatted.to_string(), r.bs.to_string(), r.equal.to_string()])
            .collect();
        columns(out, &header, &rows);
        let _ = writeln!(out, "verdict: {}", if self.equal { "equal" } else { "unequal" });
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecseqBody {
    pub page: E2Page,
    pub e2_totals: (usize, usize),
    pub targets: (usize, usize),
    pub solve: SolveResult,
}

impl Render for SpecseqBody {
    fn render(&self, out: &mut String) {
        let rows = self.page.rows();
        let width = rows.iter().map(|&q| self.page.row(q).len()).max().unwrap_or(0);
        let mut header = vec!["q \\ p".to_string()];
        header.extend((0..width).map(|p| p.to_string()));
        let body: Vec<Vec<String>> = rows
            .iter()
            .rev()
            .map(|&q| {
                let mut r = vec![q.to_string()];
                r.extend((0..width as i64).map(|p| self.page.get(p, q).to_string()));
                r
            })
            .collect();
        columns(out, &header, &body);
        let _ = writeln!(out, "E2 totals (even, odd) = {:?}, targets = {:?}", self.e2_totals, self.targets);
        let status = match self.solve.status {
            SolveStatus::Unique => "unique",
            SolveStatus::Multiple => "multiple",
            SolveStatus::Inconsistent => "inconsistent",
        };
        let _ = writeln!(out, "d2 solutions: {status} ({})", self.solve.solutions.len());
        for (i, s) in self.solve.solutions.iter().enumerate() {
            let ds: Vec<String> = s
                .iter()
                .filter(|d| d.rank > 0)
                .map(|d| format!("{:?} -> {:?} rank {}", d.source, d.target, d.rank))
                .collect();
            let shown = if ds.is_empty() { "all zero".to_string() } else { ds.join("; ") };
            let _ = writeln!(out, "  {}: {shown}", i + 1);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HkCheckBody {
    pub homology: BTreeMap<i64, DirectSum>,
    pub ktheory: KTheoryInput,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    pub compare: CompareReport,
}

impl Render for HkCheckBody {
    fn render(&self, out: &mut String) {
        degree_table(out, "H_n (rational ranks compared)", &self.homology);
        let k = |v: Result<DirectSum, _>| v.map_or_else(|e: hk_core::hkpipeline::PipelineError| e.to_string(), |g| g.to_string());
        let _ = writeln!(out, "K0 = {}, K1 = {}", k(self.ktheory.k0()), k(self.ktheory.k1()));
        if let Some(m) = self.m {
            let _ = writeln!(out, "m = {m}");
        }
        for mm in &self.compare.mismatches {
            let _ = writeln!(out, "mismatch at {}: homology {} vs K {}", mm.at, mm.left, mm.right);
        }
        let _ = writeln!(out, "verdict: {}", if self.compare.pass { "pass" } else { "fail" });
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyBody {
    pub suite: String,
    pub group: String,
    pub gset: String,
    pub dim_cap: usize,
    pub report: ContractionReport,
}

impl Render for VerifyBody {
    fn render(&self, out: &mut String) {
        let r = &self.report;
        let _ = writeln!(
            out,
            "suite {}, group {}, X = {}, dim cap {}, operator {:?}",
            self.suite, self.group, self.gset, self.dim_cap, r.operator
        );
        let _ = writeln!(out, "|V_0| = {}, chains per dimension from -1: {:?}", r.vertices, r.chains);
        let _ = writeln!(out, "checked {}, skipped {}, failures {}", r.checked, r.skipped, r.failures);
        let _ = writeln!(out, "verdict: {}", if r.passed() { "pass" } else { "fail" });
    }
}
