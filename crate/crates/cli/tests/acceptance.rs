//! One PASS/FAIL line per primary acceptance criterion. Runs without the
//! libtest harness so the lines always reach stdout.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use eac_core::appraisal::{sufficiency, Verdict, DEFAULT_THRESHOLD};
use eac_core::corpus::{fixtures, load_fixture};
use eac_core::dsl::{parse_case, serialize};
use eac_core::export::{from_interchange, to_dot, to_interchange, to_report, TierFilter};
use eac_core::lifecycle::{coverage, LifecycleStage};
use eac_core::model::{AudienceTier, Case, Challenge, LinkKind, Outcome};
use eac_core::patterns::{derive_with_bindings, instantiate, isomorphic, SlotType};
use eac_core::validation::{compute_status, Status};
use eac_core::{id, Id};
use eac_testkit::gen::{challenge_assignments, exclude, perturb_appraisal};
use eac_testkit::{oracle, random_case, rng, Shape};
use rand::seq::IndexedRandom;
use rand::Rng;
use serde_json::{json, Value};

type Check = Result<String, String>;
type Criterion = (&'static str, Box<dyn FnOnce() -> Check>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn workspace() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn corpus_cases() -> Vec<(String, Case)> {
    fixtures().iter().filter_map(|f| parse_case(f.source()).ok().map(|c| (f.name.clone(), c))).collect()
}

fn eac(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_eac")).args(args).current_dir(workspace()).output().expect("eac runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn corpus_soundness() -> Check {
    let start = Instant::now();
    let (code, out) = eac(&["validate", "corpus/healthcare.eac", "--phase", "operational"]);
    ensure(code == 0 && out.trim_end().ends_with("0 errors, 0 warnings"), || format!("healthcare: exit {code}, {out}"))?;
    let wanted = ["E-UNDERSPECIFIED-GOAL", "E-MISSING-WARRANT", "E-UNEVIDENCED", "E-CYCLE", "W-ORPHAN", "E-DUPLICATE-ID"];
    let broken: Vec<_> = fixtures().iter().filter(|f| f.broken).collect();
    ensure(broken.len() == 6, || format!("{} seeded defects", broken.len()))?;
    let mut seen = BTreeSet::new();
    for f in broken {
        let (code, out) = eac(&["--json", "validate", &f.path()]);
        let doc: Value = serde_json::from_str(&out).map_err(|e| format!("{}: {e}", f.name))?;
        let codes: BTreeSet<String> =
            doc["findings"].as_array().unwrap().iter().map(|x| x["code"].as_str().unwrap().to_string()).collect();
        ensure(codes.len() == 1 && codes == f.expected.codes, || format!("{}: got {codes:?}", f.name))?;
        let expect_exit = if codes.iter().all(|c| c.starts_with("W-")) { 0 } else { 1 };
        ensure(code == expect_exit, || format!("{}: exit {code}", f.name))?;
        seen.extend(codes);
    }
    ensure(seen == wanted.iter().map(|s| s.to_string()).collect(), || format!("codes {seen:?}"))?;
    let took = start.elapsed();
    ensure(took < Duration::from_secs(1), || format!("took {took:?}"))?;
    Ok(format!("7 files through the binary in {took:.0?}"))
}

fn status_oracle() -> Check {
    let start = Instant::now();
    let mut r = rng(1001);
    for i in 0..1000 {
        let case = random_case(&mut r, Shape::up_to(12));
        let got = compute_status(&case).map_err(|e| e.to_string())?;
        ensure(got == oracle::statuses(&case), || format!("random case {i}:\n{}", serialize(&case)))?;
    }
    let mut swept = 0;
    let shape = Shape { max_elements: 5, max_targets: Some(6), challenges: false, appraisals: false };
    for _ in 0..12 {
        let base = random_case(&mut r, shape);
        for case in challenge_assignments(&base) {
            ensure(compute_status(&case).unwrap() == oracle::statuses(&case), || format!("assignment:\n{}", serialize(&case)))?;
            swept += 1;
        }
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(30), || format!("took {took:?}"))?;
    Ok(format!("1000 random cases + {swept} exhaustive assignments, 0 mismatches, {took:.1?}"))
}

fn toulmin() -> Check {
    let case = load_fixture("fig7-toulmin").map_err(|e| e.to_string())?.0;
    let c1 = |c: &Case| compute_status(c).unwrap()[&id!("C1")];
    let warrant_link = case.links().values().find(|l| l.kind == LinkKind::Warrants).unwrap().id.clone();
    let open = case.attach_challenge(Challenge::open(id!("K1"), warrant_link, "friend", "they are often late")).unwrap();
    let got = [
        c1(&case),
        c1(&case.remove_element("W1").unwrap()),
        c1(&open),
        c1(&open.resolve_challenge("K1", Outcome::Sustained, "they did not come").unwrap()),
    ];
    let want = [Status::Supported, Status::Undeveloped, Status::Contested, Status::Defeated];
    ensure(got == want, || format!("got {got:?}"))?;
    Ok("Supported, Undeveloped, Contested, Defeated".into())
}

fn round_trips() -> Check {
    let mut r = rng(1004);
    let mut cases = corpus_cases();
    let from_corpus = cases.len();
    cases.extend((0..1000).map(|i| (format!("generated {i}"), random_case(&mut r, Shape::up_to(12)))));
    for (name, c) in &cases {
        let text = serialize(c);
        ensure(parse_case(&text).as_ref() == Ok(c), || format!("{name}: dsl"))?;
        ensure(serialize(c) == text, || format!("{name}: serialize not deterministic"))?;
        let doc = to_interchange(c);
        ensure(from_interchange(doc.as_bytes()).ok().as_ref() == Some(c), || format!("{name}: interchange"))?;
        ensure(to_interchange(c) == doc, || format!("{name}: interchange not deterministic"))?;
    }
    Ok(format!("{from_corpus} corpus + 1000 generated cases"))
}

fn sufficiency_calculus() -> Check {
    let mut r = rng(1005);
    for i in 0..1000 {
        let case = random_case(&mut r, Shape::up_to(12));
        let rep = sufficiency(&case, DEFAULT_THRESHOLD).map_err(|e| e.to_string())?;
        for (id, a) in &rep.per_claim {
            ensure(a.value == oracle::claim_value(&case, id), || format!("case {i} claim {id}"))?;
        }
        ensure(rep.case_value.value == oracle::case_value(&case), || format!("case {i} whole case"))?;
    }
    let mut dominance = 0;
    while dominance < 1000 {
        let case = random_case(&mut r, Shape::up_to(12));
        let appraised: Vec<Id> = case.appraisals().keys().cloned().collect();
        let Some(ev) = appraised.choose(&mut r) else { continue };
        let worse = exclude(&case, ev, r.random_range(0..3));
        let (a, b) = (sufficiency(&case, 0.5).unwrap(), sufficiency(&worse, 0.5).unwrap());
        for (id, before) in &a.per_claim {
            let after = b.per_claim[id].value;
            ensure(before.value.is_some() == after.is_some(), || format!("exclusion changed assessability of {id}"))?;
            if let (Some(x), Some(y)) = (before.value, after) {
                ensure(y <= x, || format!("excluding {ev} raised {id} from {x} to {y}"))?;
            }
        }
        dominance += 1;
    }
    let mut case = random_case(&mut r, Shape::up_to(12));
    for i in 0..1000 {
        if i % 10 == 0 {
            case = random_case(&mut r, Shape::up_to(12));
        }
        case = perturb_appraisal(&mut r, &case);
        let lo: f64 = r.random_range(0.0..=1.0);
        let hi: f64 = r.random_range(lo..=1.0);
        let (a, b) = (sufficiency(&case, lo).unwrap(), sufficiency(&case, hi).unwrap());
        for (id, at_lo) in a.per_claim.iter().chain([(&id!("case"), &a.case_value)]) {
            let at_hi = if id.as_str() == "case" { b.case_value } else { b.per_claim[id] };
            ensure(!(at_lo.verdict == Verdict::Insufficient && at_hi.verdict == Verdict::Sufficient), || {
                format!("{id} insufficient at {lo} but sufficient at {hi}")
            })?;
        }
    }
    Ok("path oracle on 1000 cases; dominance and monotonicity over 1000 perturbations each".into())
}

fn pattern_subsumption() -> Check {
    let corpus = corpus_cases();
    for (name, c) in &corpus {
        let (p, bindings) = derive_with_bindings(&[c.clone(), c.clone()]).map_err(|e| format!("{name}: {e}"))?;
        let back = instantiate(&p, &bindings[0], "").map_err(|e| format!("{name}: {e}"))?;
        ensure(isomorphic(&back, c.graph()), || format!("{name}: not isomorphic"))?;
    }
    let a = load_fixture("derive-a").unwrap().0;
    let b = load_fixture("derive-b").unwrap().0;
    let (p, _) = derive_with_bindings(&[a, b]).map_err(|e| e.to_string())?;
    let slots: Vec<_> = p.slot_types.values().collect();
    ensure(slots == [&SlotType::System], || format!("slots {:?}", p.slot_types))?;
    Ok(format!("{} corpus cases; derive-a/derive-b gives one system slot", corpus.len()))
}

fn lifecycle_coverage() -> Check {
    let h = coverage(&load_fixture("healthcare").unwrap().0);
    let covered: BTreeSet<LifecycleStage> =
        LifecycleStage::ALL.iter().copied().filter(|s| !h.uncovered.contains(s)).collect();
    let want = BTreeSet::from([LifecycleStage::DataAnalysis, LifecycleStage::ModelReporting, LifecycleStage::SystemUseMonitoring]);
    ensure(h.covered() == 3 && covered == want, || format!("healthcare covers {covered:?}"))?;
    let all = coverage(&load_fixture("all-stages").unwrap().0);
    ensure(all.covered() == 13, || format!("all-stages covers {}", all.covered()))?;
    Ok("healthcare 3/13, all-stages 13/13".into())
}

/// Texts of elements above public tier that no public element also carries.
fn hidden_texts(case: &Case) -> Vec<String> {
    let public = TierFilter::new(AudienceTier::Public).apply(case).case;
    let visible: Vec<String> = public.elements().values().map(|e| e.text.clone()).chain([case.title().to_string()]).collect();
    case.elements()
        .values()
        .filter(|e| e.tier != AudienceTier::Public)
        .flat_map(|e| [Some(e.text.clone()), e.locator.as_ref().map(ToString::to_string)])
        .flatten()
        .filter(|s| !visible.iter().any(|v| v.contains(s.as_str())))
        .collect()
}

fn redaction() -> Check {
    let filter = TierFilter::new(AudienceTier::Public);
    let mut scanned = 0;
    for (name, case) in corpus_cases() {
        let outputs = [to_dot(&case, &filter), to_report(&case, &filter), to_interchange(&filter.apply(&case).case)];
        for secret in hidden_texts(&case) {
            scanned += 1;
            for out in &outputs {
                ensure(!out.contains(&secret), || format!("{name}: {secret:?} leaked"))?;
            }
        }
    }
    let (code, md) = eac(&["render", "corpus/healthcare.eac", "--format", "md", "--tier", "public"]);
    ensure(code == 0 && md.contains("redacted"), || "cli render lacks a redaction notice".into())?;
    for secret in hidden_texts(&load_fixture("healthcare").unwrap().0) {
        ensure(!md.contains(&secret), || format!("cli render leaked {secret:?}"))?;
    }
    ensure(scanned > 0, || "no hidden texts in the corpus".into())?;
    Ok(format!("{scanned} hidden texts absent from public DOT, markdown and JSON"))
}

const SERVED: [&str; 3] = ["healthcare", "fig7-toulmin", "two-goals"];

fn next_k(case: &Case) -> Id {
    (1..).map(|n| Id::new(format!("K{n}")).unwrap()).find(|k| !case.contains_id(k.as_str())).unwrap()
}

async fn post(http: &reqwest::Client, url: String, body: Value) -> (u16, Value) {
    let res = http
        .post(url)
        .header(eac_serve::TIER_HEADER, "auditor")
        .header("content-type", "application/json")
        .body(body.to_string())
        .send()
        .await
        .unwrap();
    let status = res.status().as_u16();
    (status, serde_json::from_str(&res.text().await.unwrap()).unwrap_or(Value::Null))
}

async fn conformance() -> Check {
    let dir = tempfile::tempdir().unwrap();
    for name in SERVED {
        let f = eac_core::corpus::fixture(name).unwrap();
        std::fs::write(dir.path().join(&f.file), f.source()).unwrap();
    }
    let svc = eac_serve::Service::start(dir.path(), "127.0.0.1:0").await.map_err(|e| e.to_string())?;
    let base = svc.base_url();
    let http = reqwest::Client::new();
    let mut model: BTreeMap<Id, Case> = SERVED.iter().map(|n| load_fixture(n).unwrap().0).map(|c| (c.id().clone(), c)).collect();
    let mut r = rng(1009);
    let (mut seq, mut accepted) = (0u64, 0);
    for n in 0..100 {
        for _ in 0..10 {
            let case = model.values().collect::<Vec<_>>().choose(&mut r).map(|c| (*c).clone()).unwrap();
            let cid = case.id().clone();
            let (status, body, expected) = if r.random_bool(0.55) {
                let mut targets: Vec<Id> = case.elements().keys().chain(case.links().keys()).cloned().collect();
                targets.push(id!("Z404"));
                let target = targets.choose(&mut r).unwrap().clone();
                let k = next_k(&case);
                let expected = case.attach_challenge(Challenge::open(k, target.clone(), "reviewer", "objection")).ok();
                let (s, b) = post(&http, format!("{base}/cases/{cid}/challenges"), json!({ "target": target, "author": "reviewer", "text": "objection" })).await;
                (s, b, expected)
            } else {
                let mut ids: Vec<Id> = case.challenges().keys().cloned().collect();
                ids.push(id!("K999"));
                let k = ids.choose(&mut r).unwrap().clone();
                let outcome = *Outcome::ALL.choose(&mut r).unwrap();
                let note = if r.random_bool(0.7) { "closed" } else { "" };
                let expected = case.resolve_challenge(k.as_str(), outcome, note).ok();
                let mut body = json!({ "outcome": outcome.as_str() });
                if !note.is_empty() {
                    body["note"] = note.into();
                }
                let (s, b) = post(&http, format!("{base}/cases/{cid}/challenges/{k}/resolve"), body).await;
                (s, b, expected)
            };
            ensure((200..300).contains(&status) == expected.is_some(), || format!("sequence {n}: service {status}, model {}", expected.is_some()))?;
            if let Some(next) = expected {
                seq += 1;
                accepted += 1;
                ensure(body["seq"] == seq, || format!("sequence {n}: seq {}", body["seq"]))?;
                model.insert(cid, next);
            }
        }
        for (cid, case) in &model {
            let got: Value = serde_json::from_str(
                &http.get(format!("{base}/cases/{cid}")).header(eac_serve::TIER_HEADER, "auditor").send().await.unwrap().text().await.unwrap(),
            )
            .unwrap();
            let want: Value = serde_json::from_str(&to_interchange(case)).unwrap();
            ensure(got["case"] == want, || format!("sequence {n}: state of {cid} diverged"))?;
        }
    }
    svc.stop().await.map_err(|e| e.to_string())?;
    Ok(format!("100 sequences x 10 steps, {accepted} accepted, state equal after each"))
}

fn main() -> ExitCode {
    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build().unwrap();
    let checks: Vec<Criterion> = vec![
        ("corpus soundness", Box::new(corpus_soundness)),
        ("status oracle equivalence", Box::new(status_oracle)),
        ("toulmin fixture", Box::new(toulmin)),
        ("round-trips", Box::new(round_trips)),
        ("sufficiency calculus", Box::new(sufficiency_calculus)),
        ("pattern subsumption", Box::new(pattern_subsumption)),
        ("lifecycle coverage", Box::new(lifecycle_coverage)),
        ("redaction soundness", Box::new(redaction)),
        ("service conformance", Box::new(move || runtime.block_on(conformance()))),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        let start = Instant::now();
        let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(check))
            .unwrap_or_else(|p| Err(p.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into())));
        match result {
            Ok(detail) => println!("PASS {name}: {detail} [{:.2?}]", start.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why} [{:.2?}]", start.elapsed());
            }
        }
    }
    println!("{} of 9 primary criteria pass", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

