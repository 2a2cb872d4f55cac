use chrono::NaiveDate;
use eac_core::appraisal::{
    record_appraisal, sufficiency, Admissibility, AppraisalError, AppraisalRecord, Assessed, Materiality, Relevance,
    SufficiencyReport, UnitValue, Verdict, DEFAULT_THRESHOLD,
};
use eac_core::corpus::load_fixture;
use eac_core::model::{Case, Element, ElementKind, GoalSlots, Link, Locator, Phase, Scope};
use eac_core::validation::{compute_status, Status};
use eac_core::{id, Id};
use eac_testkit::gen::{exclude, perturb_appraisal};
use eac_testkit::{oracle, random_case, rng, Shape};
use rand::Rng;

fn record(ev: &str, v: f64) -> AppraisalRecord {
    AppraisalRecord {
        evidence: Id::new(ev).unwrap(),
        relevance: Assessed::new(Relevance::Relevant),
        materiality: Assessed::new(Materiality::Material),
        admissibility: Assessed::new(Admissibility::Admissible),
        probative_value: UnitValue::new(v).unwrap(),
        assessor: "panel".into(),
        date: NaiveDate::from_ymd_opt(2023, 3, 1).unwrap(),
    }
}

fn report(case: &Case, t: f64) -> SufficiencyReport {
    sufficiency(case, t).unwrap()
}

#[test]
fn matches_path_oracle() {
    let mut r = rng(21);
    for i in 0..1000 {
        let case = random_case(&mut r, Shape::up_to(12));
        let rep = report(&case, DEFAULT_THRESHOLD);
        for (id, a) in &rep.per_claim {
            assert_eq!(a.value, oracle::claim_value(&case, id), "case {i} claim {id}\n{}", eac_core::dsl::serialize(&case));
        }
        let claims = case
            .elements()
            .values()
            .filter(|e| matches!(e.kind, ElementKind::EvidentialClaim | ElementKind::PropertyClaim | ElementKind::Goal))
            .count();
        assert_eq!(rep.per_claim.len(), claims);
        assert_eq!(rep.case_value.value, oracle::case_value(&case), "case {i}");
    }
}

#[test]
fn exclusion_dominance() {
    let mut r = rng(22);
    let mut checked = 0;
    while checked < 1000 {
        let case = random_case(&mut r, Shape::up_to(12));
        let appraised: Vec<Id> = case.appraisals().keys().cloned().collect();
        if appraised.is_empty() {
            continue;
        }
        let ev = &appraised[r.random_range(0..appraised.len())];
        let worse = exclude(&case, ev, r.random_range(0..3));
        let (a, b) = (report(&case, 0.5), report(&worse, 0.5));
        for (id, before) in &a.per_claim {
            if let (Some(x), Some(y)) = (before.value, b.per_claim[id].value) {
                assert!(y <= x, "{id}");
            }
            assert_eq!(before.value.is_some(), b.per_claim[id].value.is_some());
        }
        if let (Some(x), Some(y)) = (a.case_value.value, b.case_value.value) {
            assert!(y <= x);
        }
        checked += 1;
    }
}

#[test]
fn threshold_monotonicity() {
    let mut r = rng(23);
    let mut case = random_case(&mut r, Shape::up_to(12));
    for i in 0..1000 {
        if i % 10 == 0 {
            case = random_case(&mut r, Shape::up_to(12));
        }
        case = perturb_appraisal(&mut r, &case);
        let lo: f64 = r.random_range(0.0..=1.0);
        let hi: f64 = r.random_range(lo..=1.0);
        let (a, b) = (report(&case, lo), report(&case, hi));
        for (id, at_lo) in &a.per_claim {
            if at_lo.verdict == Verdict::Insufficient {
                assert_ne!(b.per_claim[id].verdict, Verdict::Sufficient, "{id}");
            }
        }
        if a.case_value.verdict == Verdict::Insufficient {
            assert_ne!(b.case_value.verdict, Verdict::Sufficient);
        }
    }
}

#[test]
fn defeated_claims_are_worth_zero() {
    let mut r = rng(24);
    for _ in 0..500 {
        let case = random_case(&mut r, Shape::up_to(12));
        let statuses = compute_status(&case).unwrap();
        let rep = report(&case, 0.5);
        for (id, a) in &rep.per_claim {
            if statuses[id] == Status::Defeated {
                assert_eq!(a.value, Some(0.0), "{id}");
            }
        }
    }
}

fn goal_case() -> Case {
    Case::new(id!("c"), "t", Phase::Preliminary)
        .unwrap()
        .add_element(Element::goal(id!("G"), GoalSlots::new("a", "b", "c").unwrap()))
        .unwrap()
}

fn evidence(id: &str) -> Element {
    Element::evidence(Id::new(id).unwrap(), Locator::parse("docs/x.pdf").unwrap(), "artefact")
}

#[test]
fn record_examples() {
    let case = goal_case().add_element(evidence("V")).unwrap();
    let stored = record_appraisal(&case, record("V", 0.8)).unwrap();
    assert_eq!(stored.appraisals()[&id!("V")].effective_value(), 0.8);
    let mut bad = record("V", 0.9);
    bad.admissibility = Assessed::noted(Admissibility::Inadmissible, "obtained without consent");
    assert_eq!(record_appraisal(&case, bad).unwrap().appraisals()[&id!("V")].effective_value(), 0.0);
    assert!(UnitValue::new(1.3).is_err());
    assert_eq!(record_appraisal(&case, record("G", 0.5)), Err(AppraisalError::NotEvidence(id!("G"))));
    let replaced = record_appraisal(&stored, record("V", 0.3)).unwrap();
    assert_eq!(replaced.appraisals()[&id!("V")].probative_value.get(), 0.3);
    assert_eq!(case, goal_case().add_element(evidence("V")).unwrap());
}

#[test]
fn alternatives_take_the_maximum() {
    let case = goal_case()
        .add_element(Element::evidential_claim(id!("E"), "shows"))
        .unwrap()
        .add_element(evidence("V1"))
        .unwrap()
        .add_element(evidence("V2"))
        .unwrap()
        .add_link(Link::evidences(id!("L1"), id!("V1"), id!("E")))
        .unwrap()
        .add_link(Link::evidences(id!("L2"), id!("V2"), id!("E")))
        .unwrap();
    let unassessed = report(&case, 0.5);
    assert_eq!(unassessed.per_claim[&id!("E")].verdict, Verdict::Unassessed);
    let case = record_appraisal(&record_appraisal(&case, record("V1", 0.4)).unwrap(), record("V2", 0.8)).unwrap();
    assert_eq!(report(&case, 0.5).per_claim[&id!("E")].value, Some(0.8));
}

#[test]
fn conjuncts_take_the_minimum() {
    let mut case = goal_case();
    for (n, v) in [("1", 0.8), ("2", 0.5)] {
        let (p, e, ev) = (format!("P{n}"), format!("E{n}"), format!("V{n}"));
        let i = |s: &str| Id::new(s).unwrap();
        case = case
            .add_element(Element::property_claim(i(&p), Scope::System, "p"))
            .unwrap()
            .add_element(Element::evidential_claim(i(&e), "e"))
            .unwrap()
            .add_element(evidence(&ev))
            .unwrap()
            .add_link(Link::evidences(i(&format!("A{n}")), i(&ev), i(&e)))
            .unwrap()
            .add_link(Link::supports(i(&format!("B{n}")), i(&e), i(&p)))
            .unwrap()
            .add_link(Link::supports(i(&format!("C{n}")), i(&p), id!("G")))
            .unwrap();
        case = record_appraisal(&case, record(&ev, v)).unwrap();
    }
    let rep = report(&case, 0.6);
    assert_eq!(rep.per_claim[&id!("P1")].value, Some(0.8));
    assert_eq!(rep.case_value.value, Some(0.5));
    assert_eq!(rep.case_value.verdict, Verdict::Insufficient);
}

#[test]
fn no_goal_and_bad_threshold() {
    let case = Case::new(id!("c"), "t", Phase::Preliminary).unwrap();
    assert_eq!(sufficiency(&case, 0.5), Err(AppraisalError::NoGoal));
    assert!(sufficiency(&goal_case(), 1.5).is_err());
}

#[test]
fn healthcare_sufficiency() {
    let (case, _) = load_fixture("healthcare").unwrap();
    let rep = report(&case, DEFAULT_THRESHOLD);
    assert_eq!(rep.per_evidence[&id!("EV1")], Some(0.8));
    assert_eq!(rep.case_value.value, Some(0.8));
    assert_eq!(rep.case_value.verdict, Verdict::Sufficient);
}
