//! Report documents emitted by every command. All fields are plain data in
//! a fixed order, so JSON output is byte-stable and re-rendering a parsed
//! report reproduces it exactly.

use std::fmt::Write as _;

use raag_core::alphabet::GraphDocument;
use raag_core::fixpoint::{Answer, ChainReport, InvariantReport, PerPowerReport, Scope};
use raag_core::morphism::{AutoVerdict, MorphismDocument};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Report {
    Classify(ClassifyReport),
    Demo(DemoReport),
    Nf(NfReport),
    Apply(ApplyReport),
    Fix(FixReport),
    Per(PerReport),
    Chain(ChainReport),
    AutoCheck(AutoCheckReport),
    AbelianFix(AbelianFixReport),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Forbidden {
    pub kind: String,
    pub vertices: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub graph: GraphDocument,
    pub scope: Scope,
    pub answer: Answer,
    pub clique_union: bool,
    pub witness_triple: Option<Vec<String>>,
    pub transitive_forest: bool,
    pub forbidden_subgraph: Option<Forbidden>,
    pub components: Vec<Vec<String>>,
    pub witness: Option<MorphismDocument>,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NfReport {
    pub input: String,
    pub normal_form: String,
    pub length: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApplyReport {
    pub input: String,
    pub image: String,
    pub fixed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixReport {
    pub radius: usize,
    pub fixed: Vec<String>,
    /// Every listed exponent vector lies in the fixed lattice of the
    /// abelianization.
    pub abelian_consistent: bool,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicPoint {
    pub element: String,
    pub period: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerReport {
    pub radius: usize,
    pub kmax: usize,
    pub periodic: Vec<PeriodicPoint>,
    pub abelian_consistent: bool,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutoCheckReport {
    pub search_depth: usize,
    pub verdict: AutoVerdict,
    pub determinant: String,
    /// Word in the images whose value is each generator, in generator order.
    pub preimages: Option<Vec<String>>,
    /// Length of the longest preimage word.
    pub preimage_depth: Option<usize>,
    pub certificate_checked: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianFixReport {
    pub matrix: Vec<Vec<i64>>,
    pub fixed_basis: Vec<Vec<i64>>,
    pub kmax: usize,
    pub periodic_basis: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyCheck {
    pub element: String,
    pub fixed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductReport {
    pub kind: String,
    pub detail: Option<String>,
    pub fix_generators: Vec<String>,
    pub generators_fixed: bool,
    pub per_power: PerPowerReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemoReport {
    pub demo: String,
    pub description: String,
    pub graph: GraphDocument,
    pub morphism: MorphismDocument,
    pub classification: ClassifyReport,
    pub well_defined: bool,
    pub automorphism: Option<AutoCheckReport>,
    pub invariant: Option<InvariantReport>,
    pub fixed_family: Vec<FamilyCheck>,
    pub chain: Option<ChainReport>,
    pub product: Option<ProductReport>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Report> {
        serde_json::from_str(text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match self {
            Report::Classify(r) => classify_text(&mut out, r),
            Report::Demo(r) => demo_text(&mut out, r),
            Report::Nf(r) => {
                let _ = writeln!(out, "{}", show(&r.normal_form));
            }
            Report::Apply(r) => {
                let _ = writeln!(out, "{}", show(&r.image));
            }
            Report::Fix(r) => {
                let _ = writeln!(out, "fixed points of length <= {}: {}", r.radius, r.fixed.len());
                for u in &r.fixed {
                    let _ = writeln!(out, "  {}", show(u));
                }
                let _ = writeln!(out, "abelian consistent: {}", r.abelian_consistent);
                let _ = writeln!(out, "{}", r.note);
            }
            Report::Per(r) => {
                let _ = writeln!(
                    out,
                    "periodic points of length <= {} with period <= {}: {}",
                    r.radius,
                    r.kmax,
                    r.periodic.len()
                );
                for p in &r.periodic {
                    let _ = writeln!(out, "  {}  (period {})", show(&p.element), p.period);
                }
                let _ = writeln!(out, "abelian consistent: {}", r.abelian_consistent);
                let _ = writeln!(out, "{}", r.note);
            }
            Report::Chain(r) => chain_text(&mut out, r),
            Report::AutoCheck(r) => auto_text(&mut out, r),
            Report::AbelianFix(r) => {
                let _ = writeln!(out, "abelianization matrix:");
                rows_text(&mut out, &r.matrix);
                let _ = writeln!(out, "fixed lattice basis:");
                rows_text(&mut out, &r.fixed_basis);
                let _ = writeln!(out, "periodic lattice basis (periods <= {}):", r.kmax);
                rows_text(&mut out, &r.periodic_basis);
            }
        }
        out
    }
}

fn show(word: &str) -> &str {
    if word.is_empty() {
        "1"
    } else {
        word
    }
}

fn rows_text(out: &mut String, rows: &[Vec<i64>]) {
    if rows.is_empty() {
        let _ = writeln!(out, "  (none)");
    }
    for row in rows {
        let cells: Vec<String> = row.iter().map(i64::to_string).collect();
        let _ = writeln!(out, "  ({})", cells.join(","));
    }
}

fn images_text(out: &mut String, doc: &MorphismDocument) {
    for (x, w) in &doc.images {
        let _ = writeln!(out, "  {x} -> {}", show(w));
    }
}

fn classify_text(out: &mut String, r: &ClassifyReport) {
    let _ = writeln!(out, "scope: {:?}", r.scope);
    let _ = writeln!(out, "answer: {:?}", r.answer);
    let _ = writeln!(out, "union of cliques: {}", r.clique_union);
    if let Some(t) = &r.witness_triple {
        let _ = writeln!(out, "  path {} - {} - {} with {} and {} not adjacent", t[0], t[1], t[2], t[0], t[2]);
    }
    let _ = writeln!(out, "transitive forest: {}", r.transitive_forest);
    if let Some(f) = &r.forbidden_subgraph {
        let _ = writeln!(out, "  induced {} on {}", f.kind, f.vertices.join(", "));
    }
    let parts: Vec<String> = r.components.iter().map(|f| format!("{{{}}}", f.join(","))).collect();
    let _ = writeln!(out, "connected components: {}", parts.join(" "));
    if let Some(w) = &r.witness {
        let _ = writeln!(out, "witness:");
        images_text(out, w);
    }
    let _ = writeln!(out, "{}", r.note);
}

fn chain_text(out: &mut String, r: &ChainReport) {
    let _ = writeln!(out, "chain over ({})", r.tuple.join(", "));
    let _ = writeln!(out, "{:>5} {:>10} {:>7}  probe", "level", "generators", "states");
    for l in &r.levels {
        let _ = writeln!(
            out,
            "{:>5} {:>10} {:>7}  {} {}",
            l.level,
            l.generators,
            l.states,
            l.probe,
            if l.probe_member { "member" } else { "not a member" }
        );
    }
    let _ = writeln!(out, "monotone: {}", r.monotone);
    match r.stabilized_at {
        Some(n) => {
            let _ = writeln!(out, "stabilized from level {n}");
        }
        None => {
            let _ = writeln!(out, "strictly ascending: {}", r.levels.iter().all(|l| !l.probe_member));
        }
    }
}

fn auto_text(out: &mut String, r: &AutoCheckReport) {
    let _ = writeln!(out, "automorphism: {:?} (search depth {})", r.verdict, r.search_depth);
    let _ = writeln!(out, "determinant: {}", r.determinant);
    if let Some(pre) = &r.preimages {
        for (i, w) in pre.iter().enumerate() {
            let _ = writeln!(out, "  preimage {}: {}", i, show(w));
        }
        if let Some(d) = r.preimage_depth {
            let _ = writeln!(out, "longest preimage: {d}");
        }
        let _ = writeln!(out, "certificate re-checked: {}", r.certificate_checked);
    }
}

fn demo_text(out: &mut String, r: &DemoReport) {
    let _ = writeln!(out, "== {} ==", r.demo);
    let _ = writeln!(out, "{}", r.description);
    let edges: Vec<String> = r.graph.edges.iter().map(|[x, y]| format!("{x}-{y}")).collect();
    let _ = writeln!(out, "generators: {}", r.graph.generators.join(" "));
    let _ = writeln!(out, "edges: {}", edges.join(" "));
    let _ = writeln!(out, "morphism:");
    images_text(out, &r.morphism);
    let _ = writeln!(out, "well defined: {}", r.well_defined);
    let _ = writeln!(out, "-- classification");
    classify_text(out, &r.classification);
    if let Some(a) = &r.automorphism {
        let _ = writeln!(out, "-- automorphism check");
        auto_text(out, a);
    }
    if let Some(inv) = &r.invariant {
        let _ = writeln!(out, "-- exponent sums on fixed points");
        let _ = writeln!(
            out,
            "{} fixed points of length <= {}; equal exponent sums on {}: {}",
            inv.fixed_points,
            inv.radius,
            inv.generators.join(","),
            if inv.passed() { "yes".to_string() } else { format!("{} violations", inv.violations.len()) }
        );
    }
    if !r.fixed_family.is_empty() {
        let _ = writeln!(out, "-- fixed family");
        for f in &r.fixed_family {
            let _ = writeln!(out, "  {}: {}", show(&f.element), if f.fixed { "fixed" } else { "NOT fixed" });
        }
    }
    if let Some(c) = &r.chain {
        let _ = writeln!(out, "-- chain of folded subgroups");
        chain_text(out, c);
    }
    if let Some(p) = &r.product {
        let _ = writeln!(out, "-- product decomposition");
        let _ = writeln!(out, "type: {}", p.kind);
        if let Some(d) = &p.detail {
            let _ = writeln!(out, "{d}");
        }
        let _ = writeln!(out, "fixed subgroup generated by: {}", p.fix_generators.iter().map(|g| show(g)).collect::<Vec<_>>().join(", "));
        let _ = writeln!(out, "generators verified fixed: {}", p.generators_fixed);
        let pp = &p.per_power;
        let _ = writeln!(
            out,
            "periodic points (period <= {}) vs points of period <= {} under the square, length <= {}: {} vs {}, equal: {}",
            pp.kmax,
            pp.kmax_square,
            pp.radius,
            pp.periodic,
            pp.periodic_of_square,
            pp.equal()
        );
    }
}
