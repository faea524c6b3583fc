//! Command implementations for the `raag` binary. Each command builds a
//! [`Report`]; rendering and output live in `main`.

pub mod report;

use std::sync::Arc;

use anyhow::{bail, Context, Result};
use raag_core::abelian::{fixed_lattice, periodic_lattice, IntMatrix};
use raag_core::fixpoint::{
    chain_experiment, classify_group, fix_in_ball, per_equals_fix_of_power_check, per_in_ball,
    projection_invariant_check, Answer, ProductType, Scope, SquareProduct,
};
use raag_core::alphabet::ForbiddenKind;
use raag_core::morphism::{example_fgno_auto, AutoCertificate};
use raag_core::{Gen, GraphGroup, GroupElement, Letter, Morphism};

use report::*;

pub const DEMOS: [&str; 4] = ["thm-endo", "thm-auto", "ex-fgyes", "ex-fgno"];

pub fn load_graph(text: &str) -> Result<Arc<GraphGroup>> {
    Ok(GraphGroup::from_json(text)?)
}

pub fn load_morphism(group: &Arc<GraphGroup>, text: &str) -> Result<Morphism> {
    Ok(Morphism::from_json(group, text)?)
}

fn names(group: &GraphGroup, gens: &[Gen]) -> Vec<String> {
    gens.iter().map(|&g| group.name(g).to_string()).collect()
}

fn matrix_rows(m: &IntMatrix) -> Result<Vec<Vec<i64>>> {
    m.to_i64().context("abelianization matrix entry exceeds 64 bits")
}

pub fn classify(group: &Arc<GraphGroup>, scope: Scope) -> ClassifyReport {
    let verdict = classify_group(group, scope);
    let c = &verdict.classification;
    let note = match (verdict.answer, c.witness_triple) {
        (Answer::AllFinitelyGenerated, _) => format!(
            "The group is a free product of free abelian groups; every {} has a finitely generated fixed subgroup.",
            match scope {
                Scope::Endomorphisms => "endomorphism",
                Scope::Automorphisms => "automorphism",
            }
        ),
        (Answer::NotAllFinitelyGenerated, Some([x, _, z])) => {
            let (x, z) = (group.name(x), group.name(z));
            format!(
                "The witness fixes {x}^i {z}^i for every i. Projecting its fixed subgroup onto the free group on {{{x}, {z}}} and intersecting with {x}* {z}* gives the non-rational set {{{x}^i {z}^i}}, so the fixed subgroup is not finitely generated. Run `chain` on the witness for finite evidence."
            )
        }
        _ => "Not a transitive forest: here the answer depends on the graph. Compare `demo ex-fgyes` (induced 4-cycle, every automorphism has a finitely generated fixed subgroup) with `demo ex-fgno` (induced 4-path, an automorphism whose fixed subgroup is not finitely generated).".to_string(),
    };
    ClassifyReport {
        graph: group.to_document(),
        scope,
        answer: verdict.answer,
        clique_union: c.is_clique_union,
        witness_triple: c.witness_triple.map(|t| names(group, &t)),
        transitive_forest: c.is_transitive_forest,
        forbidden_subgraph: c.forbidden_witness.map(|f| Forbidden {
            kind: match f.kind {
                ForbiddenKind::Path4 => "path4",
                ForbiddenKind::Cycle4 => "cycle4",
            }
            .to_string(),
            vertices: names(group, &f.vertices),
        }),
        components: c.factors.iter().map(|f| names(group, f)).collect(),
        witness: verdict.witness.map(|w| w.to_document()),
        note,
    }
}

pub fn nf(group: &Arc<GraphGroup>, word: &str) -> Result<NfReport> {
    let u = GroupElement::parse(group, word)?;
    Ok(NfReport {
        input: word.to_string(),
        normal_form: u.to_string(),
        length: u.len(),
    })
}

pub fn apply(phi: &Morphism, word: &str) -> Result<ApplyReport> {
    let u = GroupElement::parse(phi.group(), word)?;
    let image = phi.apply(&u)?;
    Ok(ApplyReport {
        input: word.to_string(),
        fixed: image == u,
        image: image.to_string(),
    })
}

pub fn fix(phi: &Morphism, radius: usize) -> Result<FixReport> {
    let lattice = fixed_lattice(phi.abelianization_matrix())?;
    let fixed = fix_in_ball(phi, radius);
    let mut consistent = true;
    for u in &fixed {
        consistent &= lattice.contains_i64(&u.exponent_vector())?;
    }
    Ok(FixReport {
        radius,
        fixed: fixed.iter().map(|u| u.to_string()).collect(),
        abelian_consistent: consistent,
        note: "Membership facts only: the listed elements need not generate the fixed subgroup.".into(),
    })
}

pub fn per(phi: &Morphism, radius: usize, kmax: usize) -> Result<PerReport> {
    let lattice = periodic_lattice(phi.abelianization_matrix(), kmax as u32)?;
    let periodic = per_in_ball(phi, radius, kmax);
    let mut consistent = true;
    for (u, _) in &periodic {
        consistent &= lattice.contains_i64(&u.exponent_vector())?;
    }
    Ok(PerReport {
        radius,
        kmax,
        periodic: periodic
            .iter()
            .map(|(u, k)| PeriodicPoint {
                element: u.to_string(),
                period: *k,
            })
            .collect(),
        abelian_consistent: consistent,
        note: format!("Truncated: only periods up to {kmax} are searched; the periodic subgroup is the union over all periods."),
    })
}

pub fn parse_tuple(group: &GraphGroup, text: &str) -> Result<Vec<Gen>> {
    text.split(',')
        .map(|s| Ok(group.alphabet.lookup(s.trim())?))
        .collect()
}

pub fn auto_check(phi: &Morphism, depth: usize) -> AutoCheckReport {
    let cert = phi.certify_automorphism(depth);
    auto_report(phi, &cert)
}

fn auto_report(phi: &Morphism, cert: &AutoCertificate) -> AutoCheckReport {
    AutoCheckReport {
        search_depth: cert.depth,
        verdict: cert.verdict,
        determinant: cert.determinant.to_string(),
        preimages: cert
            .preimages
            .as_ref()
            .map(|ws| ws.iter().map(|w| w.display(&phi.group().alphabet).to_string()).collect()),
        preimage_depth: cert.preimages.as_ref().and_then(|ws| ws.iter().map(|w| w.len()).max()),
        certificate_checked: cert.check(phi),
    }
}

pub fn abelian_fix(phi: &Morphism, kmax: usize) -> Result<AbelianFixReport> {
    let m = phi.abelianization_matrix();
    Ok(AbelianFixReport {
        matrix: matrix_rows(m)?,
        fixed_basis: fixed_lattice(m)?.basis_i64(),
        kmax,
        periodic_basis: periodic_lattice(m, kmax as u32)?.basis_i64(),
    })
}

/// Bounds for the demo scenarios; `None` picks the scenario's default.
#[derive(Clone, Copy, Debug, Default)]
pub struct DemoParams {
    pub radius: Option<usize>,
    pub depth: Option<usize>,
    pub kmax: Option<usize>,
    pub search_depth: Option<usize>,
}

fn fixed_family(phi: &Morphism, tuple: &[Gen], up_to: usize) -> Vec<FamilyCheck> {
    (1..=up_to)
        .map(|i| {
            let u = GroupElement::from_letters(
                phi.group(),
                tuple.iter().flat_map(|&g| std::iter::repeat_n(Letter::pos(g), i)),
            );
            FamilyCheck {
                element: u.to_string(),
                fixed: phi.apply(&u).map(|v| v == u).unwrap_or(false),
            }
        })
        .collect()
}

struct Scenario {
    description: &'static str,
    group: Arc<GraphGroup>,
    phi: Morphism,
    scope: Scope,
    tuple: Vec<Gen>,
    radius: usize,
    depth: usize,
    search_depth: usize,
}

fn path3() -> Arc<GraphGroup> {
    GraphGroup::from_names(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).expect("static graph")
}

pub fn demo(name: &str, params: DemoParams) -> Result<DemoReport> {
    if name == "ex-fgyes" {
        return demo_square(params);
    }
    let s = match name {
        "thm-endo" => {
            let group = path3();
            let phi = classify_group(&group, Scope::Endomorphisms).witness.expect("path has a witness");
            Scenario {
                description: "Path a - b - c with the endomorphism a -> a b, b -> b, c -> b^-1 c. Its fixed subgroup contains every a^i c^i and is not finitely generated.",
                group,
                phi,
                scope: Scope::Endomorphisms,
                tuple: vec![0, 2],
                radius: 6,
                depth: 6,
                search_depth: 4,
            }
        }
        "thm-auto" => {
            let group = path3();
            let phi = classify_group(&group, Scope::Automorphisms).witness.expect("path has a witness");
            Scenario {
                description: "Path a - b - c, a transitive forest, with the automorphism a -> a b, c -> b^-1 c fixing b. Its fixed subgroup contains every a^i c^i and is not finitely generated.",
                group,
                phi,
                scope: Scope::Automorphisms,
                tuple: vec![0, 2],
                radius: 6,
                depth: 6,
                search_depth: 4,
            }
        }
        "ex-fgno" => {
            let (group, phi) = example_fgno_auto();
            Scenario {
                description: "Five generators with edges a-b, b-c, c-d, c-e, b-e (an induced 4-path a-b-c-d) and the automorphism a -> a b^-1, d -> d c^-1, e -> e b c. It fixes every a^i e^i d^i, and its fixed subgroup is not finitely generated.",
                group,
                phi,
                scope: Scope::Automorphisms,
                tuple: vec![0, 4, 3],
                radius: 4,
                depth: 4,
                search_depth: 4,
            }
        }
        other => bail!("unknown demo {other:?}; expected one of {}", DEMOS.join(", ")),
    };
    let radius = params.radius.unwrap_or(s.radius);
    let depth = params.depth.unwrap_or(s.depth);
    let search_depth = params.search_depth.unwrap_or(s.search_depth);
    let well_defined = Morphism::new(&s.group, s.phi.images().to_vec()).is_ok();
    let automorphism = match s.scope {
        Scope::Automorphisms => Some(auto_check(&s.phi, search_depth)),
        Scope::Endomorphisms => None,
    };
    Ok(DemoReport {
        demo: name.to_string(),
        description: s.description.to_string(),
        graph: s.group.to_document(),
        morphism: s.phi.to_document(),
        classification: classify(&s.group, s.scope),
        well_defined,
        automorphism,
        invariant: Some(projection_invariant_check(&s.phi, &s.tuple, radius)?),
        fixed_family: fixed_family(&s.phi, &s.tuple, depth + 1),
        chain: Some(chain_experiment(&s.phi, &s.tuple, depth)?),
        product: None,
    })
}

fn demo_square(params: DemoParams) -> Result<DemoReport> {
    let sq = SquareProduct::standard();
    let group = sq.group().clone();
    let swap = sq.morphism_from_pairs([("", "c"), ("", "d"), ("a", ""), ("b", "")])?;
    let kind = sq.classify(&swap);
    let detail = match &kind {
        ProductType::NotRecognized(why) => Some(why.clone()),
        _ => None,
    };
    let generators = sq.fix_generators(&swap, &kind, None, None)?;
    let mut generators_fixed = true;
    for u in &generators {
        generators_fixed &= swap.apply(u)? == *u;
    }
    let radius = params.radius.unwrap_or(3);
    let kmax = params.kmax.unwrap_or(4);
    Ok(DemoReport {
        demo: "ex-fgyes".into(),
        description: "F(a,b) x F(c,d) as the graph group of the 4-cycle a-c-b-d, with the automorphism swapping the factors (a <-> c, b <-> d). Every automorphism of this group has a finitely generated fixed subgroup.".into(),
        graph: group.to_document(),
        morphism: swap.to_document(),
        classification: classify(&group, Scope::Automorphisms),
        well_defined: Morphism::new(&group, swap.images().to_vec()).is_ok(),
        automorphism: Some(auto_check(&swap, params.search_depth.unwrap_or(4))),
        invariant: None,
        fixed_family: Vec::new(),
        chain: None,
        product: Some(ProductReport {
            kind: kind.label().to_string(),
            detail,
            fix_generators: generators.iter().map(|u| u.to_string()).collect(),
            generators_fixed,
            per_power: per_equals_fix_of_power_check(&swap, radius, kmax),
        }),
    })
}

pub fn chain(phi: &Morphism, tuple: &[Gen], depth: usize) -> Result<raag_core::fixpoint::ChainReport> {
    Ok(chain_experiment(phi, tuple, depth)?)
}
