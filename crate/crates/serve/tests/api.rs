mod common;

use std::collections::BTreeSet;
use std::fs;

use common::{start, store_with, Client};
use eac_core::corpus::load_fixture;
use eac_core::export::{to_dot, to_report, TierFilter};
use eac_core::lifecycle::{snapshot, SnapshotLabel};
use eac_core::model::{AudienceTier, Challenge, Element};
use eac_core::{id, Id};
use eac_serve::{Service, ServeError};
use eac_testkit::oracle;
use reqwest::StatusCode;
use serde_json::{json, Value};

const AUDITOR: Option<&str> = Some("auditor");

fn challenge(target: &str) -> Value {
    json!({ "target": target, "author": "clinician", "text": "The assessment did not sample rural clinics" })
}

#[tokio::test]
async fn lists_cases_with_ids_and_titles() {
    let dir = store_with(&["healthcare", "two-goals"]);
    let svc = start(dir.path()).await;
    let r = Client::new(&svc).get("/cases", None).await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.seq, Some(0));
    let v = r.json();
    let ids: Vec<&str> = v["cases"].as_array().unwrap().iter().map(|c| c["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["healthcare", "two_goals"]);
    assert_eq!(v["cases"][0]["title"], "Decision support tool: health equity");
    svc.stop().await.unwrap();
}

#[tokio::test]
async fn challenge_makes_ancestors_contested() {
    let dir = store_with(&["healthcare"]);
    let svc = start(dir.path()).await;
    let client = Client::new(&svc);
    let r = client.post("/cases/healthcare/challenges", AUDITOR, &challenge("EC1")).await;
    assert_eq!(r.status, StatusCode::CREATED, "{}", r.body);
    let v = r.json();
    assert_eq!((v["seq"].as_u64(), v["challenge"]["id"].as_str()), (Some(1), Some("K1")));
    assert_eq!(v["challenge"]["state"], "open");

    let (case, _) = load_fixture("healthcare").unwrap();
    let expected = oracle::statuses(
        &case.attach_challenge(Challenge::open(id!("K1"), id!("EC1"), "clinician", "x")).unwrap(),
    );
    let status = client.get("/cases/healthcare/status", AUDITOR).await.json();
    for (id, s) in &expected {
        assert_eq!(status["statuses"][id.as_str()], s.to_string(), "{id}");
    }
    assert_eq!(status["statuses"]["C1"], "Contested");
    assert_eq!(status["statuses"]["G1"], "Contested");
    assert_eq!(status["seq"], 1);

    let resolved = client
        .post("/cases/healthcare/challenges/K1/resolve", AUDITOR, &json!({ "outcome": "resolved", "note": "rural clinics were sampled" }))
        .await;
    assert_eq!(resolved.status, StatusCode::OK, "{}", resolved.body);
    let status = client.get("/cases/healthcare/status", AUDITOR).await.json();
    for (id, s) in oracle::statuses(&case) {
        assert_eq!(status["statuses"][id.as_str()], s.to_string(), "{id}");
    }
    svc.stop().await.unwrap();
}

#[tokio::test]
async fn report_and_graph_match_the_exporters() {
    let dir = store_with(&["healthcare"]);
    let svc = start(dir.path()).await;
    let client = Client::new(&svc);
    let (case, _) = load_fixture("healthcare").unwrap();
    let public = TierFilter::new(AudienceTier::Public);

    let r = client.get("/cases/healthcare/report?tier=public", None).await;
    assert_eq!(r.status, StatusCode::OK);
    assert!(r.content_type.starts_with("text/markdown"));
    assert_eq!(r.body, to_report(&case, &public));
    assert!(r.body.contains("withheld"));

    let dot = client.get("/cases/healthcare/graph.dot", None).await;
    assert_eq!(dot.body, to_dot(&case, &public));
    assert!(dot.body.contains("2 elements redacted"));

    let filtered = client.get("/cases/healthcare/graph.dot?goals=G2&stages=system_use_monitoring", AUDITOR).await;
    let expected = TierFilter::everything().with_goals([id!("G2")]).with_stages(["system_use_monitoring".parse().unwrap()]);
    assert_eq!(filtered.body, to_dot(&case, &expected));
    svc.stop().await.unwrap();
}

#[tokio::test]
async fn query_tier_only_lowers() {
    let dir = store_with(&["healthcare"]);
    let svc = start(dir.path()).await;
    let client = Client::new(&svc);
    let (case, _) = load_fixture("healthcare").unwrap();
    let at = |t: AudienceTier| to_report(&case, &TierFilter::new(t));

    assert_eq!(client.get("/cases/healthcare/report?tier=auditor", None).await.body, at(AudienceTier::Public));
    assert_eq!(client.get("/cases/healthcare/report?tier=auditor", Some("stakeholder")).await.body, at(AudienceTier::Stakeholder));
    assert_eq!(client.get("/cases/healthcare/report?tier=public", AUDITOR).await.body, at(AudienceTier::Public));
    assert_eq!(client.get("/cases/healthcare/report", AUDITOR).await.body, at(AudienceTier::Auditor));

    let bad = client.get("/cases/healthcare/report", Some("root")).await;
    assert_eq!(bad.status, StatusCode::BAD_REQUEST);
    assert_eq!(bad.json()["pointer"], "/headers/x-eac-tier");
    let bad = client.get("/cases/healthcare/report?tier=root", None).await;
    assert_eq!(bad.json()["pointer"], "/query/tier");
    svc.stop().await.unwrap();
}

#[tokio::test]
async fn public_case_document_holds_no_auditor_text() {
    let dir = store_with(&["healthcare"]);
    let svc = start(dir.path()).await;
    let client = Client::new(&svc);
    let (case, _) = load_fixture("healthcare").unwrap();
    let hidden: Vec<&Element> = case.elements().values().filter(|e| e.tier != AudienceTier::Public).collect();
    assert_eq!(hidden.len(), 2);
    for path in ["", "/status", "/validate", "/report", "/graph.dot", "/status?explain=C1"] {
        let r = client.get(&format!("/cases/healthcare{path}"), None).await;
        assert_eq!(r.status, StatusCode::OK, "{path}: {}", r.body);
        for e in &hidden {
            assert!(!r.body.contains(&e.text), "{path} leaks {}", e.id);
            if let Some(l) = &e.locator {
                assert!(!r.body.contains(&l.to_string()), "{path} leaks a locator");
            }
        }
    }
    let doc = client.get("/cases/healthcare", None).await.json();
    assert_eq!(doc["redacted"], 2);
    let ids: BTreeSet<&str> = doc["case"]["elements"].as_array().unwrap().iter().map(|e| e["id"].as_str().unwrap()).collect();
    assert!(!ids.contains("EV1") && !ids.contains("W1") && ids.contains("G1"));
    assert_eq!(ids.len(), 9);
    let full = client.get("/cases/healthcare", AUDITOR).await.json();
    assert_eq!(full["case"]["elements"].as_array().unwrap().len(), 11);
    assert_eq!(full["digest"], doc["digest"]);

    let status = client.get("/cases/healthcare/status", None).await.json();
    assert!(status["statuses"].get("EV1").is_none());
    assert_eq!(status["statuses"]["C1"], "Supported");
    let explained = client.get("/cases/healthcare/status?explain=EC1", None).await.json();
    assert_eq!(explained["explanation"]["children"], json!([]));
    let explained = client.get("/cases/healthcare/status?explain=EC1", AUDITOR).await.json();
    assert_eq!(explained["explanation"]["children"][0]["element"], "EV1");
    svc.stop().await.unwrap();
}

#[tokio::test]
async fn validate_endpoint() {
    let dir = store_with(&["healthcare", "unevidenced"]);
    let svc = start(dir.path()).await;
    let client = Client::new(&svc);
    let v = client.get("/cases/healthcare/validate", AUDITOR).await.json();
    assert_eq!((v["errors"].as_u64(), v["warnings"].as_u64(), v["phase"].as_str()), (Some(0), Some(0), Some("operational")));

    let (un, _) = load_fixture("unevidenced").unwrap();
    let path = format!("/cases/{}/validate", un.id());
    let codes = |v: &Value| v["findings"].as_array().unwrap().iter().map(|f| f["code"].as_str().unwrap().to_string()).collect::<Vec<_>>();
    let pre = client.get(&format!("{path}?phase=preliminary"), AUDITOR).await.json();
    assert!(codes(&pre).contains(&"W-UNEVIDENCED".to_string()));
    let interim = client.get(&format!("{path}?phase=interim"), AUDITOR).await.json();
    assert!(codes(&interim).contains(&"E-UNEVIDENCED".to_string()));
    let bad = client.get(&format!("{path}?phase=final"), AUDITOR).await;
    assert_eq!((bad.status, bad.json()["pointer"].as_str()), (StatusCode::BAD_REQUEST, Some("/query/phase")));
    svc.stop().await.unwrap();
}

#[tokio::test]
async fn problems_are_located() {
    let dir = store_with(&["healthcare"]);
    let svc = start(dir.path()).await;
    let client = Client::new(&svc);
    let problem = |r: &common::Reply| {
        assert_eq!(r.content_type, "application/problem+json");
        let v = r.json();
        (r.status.as_u16(), v["code"].as_str().unwrap().to_string(), v["pointer"].as_str().unwrap().to_string())
    };

    let r = client.get("/cases/nope", None).await;
    assert_eq!(problem(&r), (404, "E-NOT-FOUND".into(), "/path/id".into()));
    let r = client.get("/nothing/here", None).await;
    assert_eq!(problem(&r).0, 404);

    let path = "/cases/healthcare/challenges";
    let r = client.post(path, AUDITOR, &json!({ "target": 5, "author": "a", "text": "t" })).await;
    assert_eq!(problem(&r), (422, "E-BAD-REQUEST".into(), "/target".into()));
    let r = client.post(path, AUDITOR, &json!({ "target": "C1", "author": "a", "text": "t", "extra": 1 })).await;
    assert_eq!(problem(&r).0, 422);
    let r = client.post(path, AUDITOR, &json!({ "target": "C1", "author": "a", "text": "  " })).await;
    assert_eq!(problem(&r), (422, "E-EMPTY-TEXT".into(), "/text".into()));
    let r = client.post(path, AUDITOR, &challenge("Z9")).await;
    assert_eq!(problem(&r), (422, "E-DANGLING-REF".into(), "/target".into()));
    // hidden at the caller's tier is indistinguishable from absent
    let r = client.post(path, None, &challenge("EV1")).await;
    assert_eq!(problem(&r), (422, "E-DANGLING-REF".into(), "/target".into()));
    let r = client.post(path, AUDITOR, &challenge("EV1")).await;
    assert_eq!(r.status, StatusCode::CREATED);

    let resolve = "/cases/healthcare/challenges/K1/resolve";
    let r = client.post(resolve, None, &json!({ "outcome": "resolved", "note": "n" })).await;
    assert_eq!(problem(&r), (404, "E-NOT-FOUND".into(), "/path/cid".into()));
    let r = client.post(resolve, AUDITOR, &json!({ "outcome": "upheld", "note": "n" })).await;
    assert_eq!(problem(&r), (422, "E-BAD-REQUEST".into(), "/outcome".into()));
    let r = client.post(resolve, AUDITOR, &json!({ "outcome": "sustained" })).await;
    assert_eq!(problem(&r), (422, "E-NOTE-REQUIRED".into(), "/note".into()));
    let r = client.post(resolve, AUDITOR, &json!({ "outcome": "withdrawn" })).await;
    assert_eq!(r.status, StatusCode::OK, "{}", r.body);
    let r = client.post(resolve, AUDITOR, &json!({ "outcome": "withdrawn" })).await;
    assert_eq!(problem(&r), (409, "E-ALREADY-CLOSED".into(), String::new()));
    // rejected requests leave no trace in the sequence
    assert_eq!(client.get("/cases", None).await.seq, Some(2));
    svc.stop().await.unwrap();
}

#[tokio::test]
async fn diff_between_stored_snapshots() {
    let dir = store_with(&["healthcare"]);
    let (case, _) = load_fixture("healthcare").unwrap();
    let label = |s: &str| SnapshotLabel::new(s).unwrap();
    let challenged = case.attach_challenge(Challenge::open(id!("K1"), id!("EC2"), "a", "b")).unwrap();
    let mut reworded = challenged.remove_element("EV1").unwrap();
    let mut ev = case.element("EV1").unwrap().clone();
    ev.text = "Secret audit workpapers".into();
    reworded = reworded.add_element(ev).unwrap();
    for (name, c) in [("before", &case), ("after", &challenged), ("reworded", &reworded)] {
        fs::write(dir.path().join(format!("{name}.snap")), snapshot(c, label(name)).to_file()).unwrap();
    }
    let svc = start(dir.path()).await;
    let client = Client::new(&svc);

    let same = client.get("/cases/healthcare/diff?from=before&to=before", AUDITOR).await.json();
    assert_eq!(same["changes"]["challenges"]["added"], json!([]));
    assert_eq!(same["changes"]["status_deltas"], json!({}));

    let d = client.get("/cases/healthcare/diff?from=before&to=after", AUDITOR).await.json();
    assert_eq!(d["changes"]["challenges"]["added"], json!(["K1"]));
    let deltas = &d["changes"]["status_deltas"];
    assert_eq!(deltas["C2"], json!(["Supported", "Contested"]));

    let auditor = client.get("/cases/healthcare/diff?from=after&to=reworded", AUDITOR).await;
    assert!(auditor.body.contains("Secret audit workpapers"));
    let public = client.get("/cases/healthcare/diff?from=after&to=reworded", None).await;
    assert!(!public.body.contains("Secret audit workpapers"), "{}", public.body);
    assert!(public.json()["withheld"].as_u64().unwrap() >= 1);

    let missing = client.get("/cases/healthcare/diff?from=before&to=later", None).await;
    assert_eq!((missing.status, missing.json()["pointer"].as_str()), (StatusCode::NOT_FOUND, Some("/query/to")));
    svc.stop().await.unwrap();
}

#[tokio::test]
async fn address_in_use_is_a_startup_error() {
    let dir = store_with(&["healthcare"]);
    let svc = start(dir.path()).await;
    let taken = svc.addr().to_string();
    match Service::start(dir.path(), &taken).await {
        Err(ServeError::Bind { addr, .. }) => assert_eq!(addr, taken),
        Err(other) => panic!("{other}"),
        Ok(_) => panic!("second bind succeeded"),
    }
    svc.stop().await.unwrap();
}

#[tokio::test]
async fn challenge_ids_skip_used_identifiers() {
    let dir = store_with(&["fig7-toulmin"]);
    let svc = start(dir.path()).await;
    let client = Client::new(&svc);
    let (case, _) = load_fixture("fig7-toulmin").unwrap();
    let path = format!("/cases/{}/challenges", case.id());
    let mut seen: Vec<Id> = Vec::new();
    for target in ["C1", "EC1", "W1"] {
        let r = client.post(&path, AUDITOR, &challenge(target)).await.json();
        seen.push(Id::new(r["challenge"]["id"].as_str().unwrap()).unwrap());
    }
    assert_eq!(seen, [id!("K1"), id!("K2"), id!("K3")]);
    svc.stop().await.unwrap();
}
