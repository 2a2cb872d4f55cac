//! Random valid cases built only through the public construction API.

use chrono::NaiveDate;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use eac_core::appraisal::{
    record_appraisal, Admissibility, AppraisalRecord, Assessed, Materiality, Relevance, UnitValue,
};
use eac_core::lifecycle::LifecycleStage;
use eac_core::model::{
    AudienceTier, Case, Challenge, ChallengeState, Element, ElementKind, GoalSlots, Link, LinkKind, Locator, Outcome,
    Phase, Qualifier, QualifierLabel, Scope, Timestamp,
};
use eac_core::Id;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const WORDS: &[&str] = &[
    "model",
    "dataset",
    "clinicians",
    "fairness",
    "audit",
    "bias",
    "consent",
    "panel",
    "review",
    "a \"quoted\" phrase",
    "back\\slash",
    "hash # sign",
    "équité",
    "risk",
    "monitoring",
    "explanations",
];

const SYSTEMS: &[&str] = &["decision support tool", "triage chatbot", "risk score", "screening model"];
const USERS: &[&str] = &["nurses on a ward", "healthcare professionals", "call handlers", "a review board"];
const VALUES: &[&str] = &["health equity", "explainability", "autonomy", "safety"];

const LOCATORS: &[&str] = &[
    "docs/equality-impact-assessment.pdf#section-3",
    "reports/audit.md",
    "https://example.org/model-card",
    "data/summary.csv#row-12",
];

fn text<R: Rng + ?Sized>(rng: &mut R) -> String {
    let n = rng.random_range(1..=5);
    (0..n).map(|_| *WORDS.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
}

fn pick<T: Copy>(rng: &mut impl Rng, items: &[T]) -> T {
    *items.choose(rng).unwrap()
}

fn id(prefix: &str, n: usize) -> Id {
    Id::new(format!("{prefix}{n}")).unwrap()
}

/// Knobs for [`random_case`].
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub max_elements: usize,
    /// Upper bound on elements plus links; `None` for unbounded.
    pub max_targets: Option<usize>,
    pub challenges: bool,
    pub appraisals: bool,
}

impl Shape {
    pub fn up_to(max_elements: usize) -> Self {
        Shape { max_elements, max_targets: None, challenges: true, appraisals: true }
    }
}

fn random_kind(rng: &mut impl Rng) -> ElementKind {
    // weighted towards the kinds that carry structure
    let table = [
        (ElementKind::Goal, 2),
        (ElementKind::Context, 1),
        (ElementKind::PropertyClaim, 3),
        (ElementKind::EvidentialClaim, 3),
        (ElementKind::Evidence, 3),
        (ElementKind::Warrant, 2),
        (ElementKind::Assumption, 1),
    ];
    let total: u32 = table.iter().map(|(_, w)| w).sum();
    let mut roll = rng.random_range(0..total);
    for (k, w) in table {
        if roll < w {
            return k;
        }
        roll -= w;
    }
    unreachable!()
}

fn prefix(kind: ElementKind) -> &'static str {
    match kind {
        ElementKind::Goal => "G",
        ElementKind::Context => "X",
        ElementKind::PropertyClaim => "P",
        ElementKind::EvidentialClaim => "E",
        ElementKind::Evidence => "V",
        ElementKind::Warrant => "W",
        ElementKind::Assumption => "A",
    }
}

pub fn random_element(rng: &mut impl Rng, kind: ElementKind, n: usize) -> Element {
    let id = id(prefix(kind), n);
    let mut e = match kind {
        ElementKind::Goal => {
            let slots = GoalSlots::new(pick(rng, SYSTEMS), pick(rng, USERS), pick(rng, VALUES)).unwrap();
            let mut g = Element::goal(id, slots);
            if rng.random_bool(0.1) {
                g.text = text(rng);
            }
            g
        }
        ElementKind::PropertyClaim => {
            Element::property_claim(id, pick(rng, &[Scope::System, Scope::Project]), text(rng))
        }
        ElementKind::Evidence => Element::evidence(id, Locator::parse(pick(rng, LOCATORS)).unwrap(), text(rng)),
        other => Element::of_kind(id, other, text(rng)),
    };
    if rng.random_bool(0.5) {
        e = e.with_stage(pick(rng, LifecycleStage::ALL));
    }
    if rng.random_bool(0.4) {
        e = e.with_tier(pick(rng, &[AudienceTier::Stakeholder, AudienceTier::Auditor]));
    }
    e
}

pub fn random_appraisal(rng: &mut impl Rng, evidence: Id) -> AppraisalRecord {
    let note = |rng: &mut dyn rand::RngCore| if rng.random_bool(0.3) { Some(text(rng)) } else { None };
    let relevance = if rng.random_bool(0.85) { Relevance::Relevant } else { Relevance::Irrelevant };
    let materiality = if rng.random_bool(0.85) { Materiality::Material } else { Materiality::Immaterial };
    let admissibility = if rng.random_bool(0.85) { Admissibility::Admissible } else { Admissibility::Inadmissible };
    AppraisalRecord {
        evidence,
        relevance: Assessed { verdict: relevance, note: note(rng) },
        materiality: Assessed { verdict: materiality, note: note(rng) },
        admissibility: Assessed { verdict: admissibility, note: note(rng) },
        probative_value: UnitValue::new(rng.random_range(0.0..=1.0)).unwrap(),
        assessor: pick(rng, &["ethics board", "external auditor", "QA lead"]).to_string(),
        date: NaiveDate::from_ymd_opt(2023, rng.random_range(1..=12), rng.random_range(1..=28)).unwrap(),
    }
}

/// A random case that satisfies every construction invariant: acyclic
/// supports, compatible kinds, warrants only on evidential supports.
pub fn random_case(rng: &mut impl Rng, shape: Shape) -> Case {
    let phase = pick(rng, &[Phase::Preliminary, Phase::Interim, Phase::Operational]);
    let mut case = Case::new(Id::new("generated").unwrap(), text(rng), phase).unwrap();
    if rng.random_bool(0.5) {
        let created = Timestamp::from_unix(rng.random_range(1_500_000_000..1_700_000_000)).unwrap();
        let modified = Timestamp::from_unix(created.unix() + rng.random_range(0..10_000_000)).unwrap();
        case = case.with_timestamps(Some(created), rng.random_bool(0.7).then_some(modified));
    }

    let n = rng.random_range(1..=shape.max_elements.max(1));
    for i in 0..n {
        let kind = if i == 0 { ElementKind::Goal } else { random_kind(rng) };
        case = case.add_element(random_element(rng, kind, i + 1)).unwrap();
    }
    let budget = |case: &Case| shape.max_targets.is_none_or(|m| case.elements().len() + case.links().len() < m);

    let ids: Vec<Id> = case.elements().keys().cloned().collect();
    let mut pairs: Vec<(Id, Id)> =
        ids.iter().flat_map(|a| ids.iter().filter(move |b| *b != a).map(move |b| (a.clone(), b.clone()))).collect();
    pairs.shuffle(rng);
    let mut next_link = 1;
    for (from, to) in pairs.into_iter().take(4 * n) {
        if !budget(&case) {
            break;
        }
        let kind = pick(rng, &[LinkKind::Supports, LinkKind::ContextOf, LinkKind::Evidences]);
        let mut link = Link::new(id("L", next_link), kind, from, to);
        if kind == LinkKind::Supports && rng.random_bool(0.4) {
            let mut q = Qualifier::new(pick(rng, QualifierLabel::ALL));
            if rng.random_bool(0.5) {
                q = q.with_note(text(rng));
            }
            link = link.with_qualifier(q);
        }
        if let Ok(next) = case.add_link(link) {
            case = next;
            next_link += 1;
        }
    }

    let warrants: Vec<Id> =
        case.elements().values().filter(|e| e.kind == ElementKind::Warrant).map(|e| e.id.clone()).collect();
    let warrantable: Vec<Id> = case
        .links()
        .values()
        .filter(|l| l.kind == LinkKind::Supports && case.elements()[&l.from].kind == ElementKind::EvidentialClaim)
        .map(|l| l.id.clone())
        .collect();
    if !warrants.is_empty() {
        for target in warrantable {
            if budget(&case) && rng.random_bool(0.75) {
                let w = warrants.choose(rng).unwrap().clone();
                if let Ok(next) = case.add_link(Link::warrants(id("L", next_link), w, target)) {
                    case = next;
                    next_link += 1;
                }
            }
        }
    }

    if shape.challenges {
        let targets: Vec<Id> = case.elements().keys().chain(case.links().keys()).cloned().collect();
        for k in 1..=rng.random_range(0..=3) {
            let target = targets.choose(rng).unwrap().clone();
            let state = pick(rng, ChallengeState::ALL);
            case = with_challenge(&case, id("K", k), target, state, text(rng));
        }
    }

    if shape.appraisals {
        let evidence: Vec<Id> =
            case.elements().values().filter(|e| e.kind == ElementKind::Evidence).map(|e| e.id.clone()).collect();
        for ev in evidence {
            if rng.random_bool(0.8) {
                case = record_appraisal(&case, random_appraisal(rng, ev)).unwrap();
            }
        }
    }
    case
}

/// Adds a challenge in any state by attaching it open and then closing it.
pub fn with_challenge(case: &Case, id: Id, target: Id, state: ChallengeState, note: String) -> Case {
    let c = Challenge::open(id.clone(), target, "reviewer", "this does not follow");
    let case = case.attach_challenge(c).unwrap();
    let outcome = match state {
        ChallengeState::Open => return case,
        ChallengeState::Withdrawn => Outcome::Withdrawn,
        ChallengeState::Sustained => Outcome::Sustained,
        ChallengeState::Resolved => Outcome::Resolved,
    };
    case.resolve_challenge(id.as_str(), outcome, &note).unwrap()
}

/// Every way to place at most one challenge on each element and link, in
/// each of the four states. `None` leaves the target unchallenged.
pub fn challenge_assignments(case: &Case) -> impl Iterator<Item = Case> + '_ {
    let targets: Vec<Id> = case.elements().keys().chain(case.links().keys()).cloned().collect();
    let options: Vec<Option<ChallengeState>> =
        std::iter::once(None).chain(ChallengeState::ALL.iter().copied().map(Some)).collect();
    let total = options.len().pow(targets.len() as u32);
    (0..total).map(move |mut code| {
        let mut c = case.clone();
        for (i, t) in targets.iter().enumerate() {
            if let Some(state) = options[code % options.len()] {
                c = with_challenge(&c, id("K", i + 1), t.clone(), state, "reviewed".to_string());
            }
            code /= options.len();
        }
        c
    })
}

/// A copy of `case` with one randomly chosen appraisal nudged: a new
/// probative value, or one triad verdict flipped.
pub fn perturb_appraisal(rng: &mut impl Rng, case: &Case) -> Case {
    let Some(ev) = case.appraisals().keys().cloned().collect::<Vec<_>>().choose(rng).cloned() else {
        return case.clone();
    };
    let mut rec = case.appraisals()[&ev].clone();
    match rng.random_range(0..4) {
        0 => rec.probative_value = UnitValue::new(rng.random_range(0.0..=1.0)).unwrap(),
        1 => rec.relevance.verdict = flip_relevance(rec.relevance.verdict),
        2 => rec.materiality.verdict = flip_materiality(rec.materiality.verdict),
        _ => rec.admissibility.verdict = flip_admissibility(rec.admissibility.verdict),
    }
    record_appraisal(case, rec).unwrap()
}

fn flip_relevance(v: Relevance) -> Relevance {
    match v {
        Relevance::Relevant => Relevance::Irrelevant,
        Relevance::Irrelevant => Relevance::Relevant,
    }
}

fn flip_materiality(v: Materiality) -> Materiality {
    match v {
        Materiality::Material => Materiality::Immaterial,
        Materiality::Immaterial => Materiality::Material,
    }
}

fn flip_admissibility(v: Admissibility) -> Admissibility {
    match v {
        Admissibility::Admissible => Admissibility::Inadmissible,
        Admissibility::Inadmissible => Admissibility::Admissible,
    }
}

/// Sets one triad verdict of an appraised evidence element to its negative.
pub fn exclude(case: &Case, evidence: &Id, which: usize) -> Case {
    let mut rec = case.appraisals()[evidence].clone();
    match which % 3 {
        0 => rec.relevance.verdict = Relevance::Irrelevant,
        1 => rec.materiality.verdict = Materiality::Immaterial,
        _ => rec.admissibility.verdict = Admissibility::Inadmissible,
    }
    record_appraisal(case, rec).unwrap()
}
