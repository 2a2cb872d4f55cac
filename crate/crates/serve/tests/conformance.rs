//! Mutation sequences against one running service, replayed through the
//! core model operations. Even-numbered sequences run one request at a
//! time; odd-numbered ones send all ten requests at once.

mod common;

use std::collections::BTreeMap;

use common::{start, store_with, Client, Reply};
use eac_core::corpus::load_fixture;
use eac_core::export::to_interchange;
use eac_core::model::{Case, Challenge, Outcome};
use eac_core::Id;
use eac_testkit::rng;
use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use reqwest::StatusCode;
use serde_json::{json, Value};

const FIXTURES: [&str; 4] = ["healthcare", "fig7-toulmin", "two-goals", "derive-a"];
const SEQUENCES: usize = 100;
const STEPS: usize = 10;

#[derive(Debug, Clone)]
enum Step {
    Challenge { case: Id, target: String, author: String, text: String },
    Resolve { case: Id, id: String, outcome: Outcome, note: Option<String> },
}

fn random_step(r: &mut ChaCha8Rng, model: &BTreeMap<Id, Case>) -> Step {
    let case = model.values().collect::<Vec<_>>().choose(r).map(|c| (*c).clone()).unwrap();
    if r.random_bool(0.55) {
        let mut targets: Vec<String> = case.elements().keys().chain(case.links().keys()).map(ToString::to_string).collect();
        targets.push("Z404".into());
        let target = targets.choose(r).unwrap().clone();
        let text = if r.random_bool(0.05) { "   ".to_string() } else { format!("objection {}", r.random_range(0..1000)) };
        Step::Challenge { case: case.id().clone(), target, author: "reviewer".into(), text }
    } else {
        let mut ids: Vec<String> = case.challenges().keys().map(ToString::to_string).collect();
        ids.push("K999".into());
        ids.push(format!("K{}", case.challenges().len() + 1));
        let outcome = *Outcome::ALL.choose(r).unwrap();
        let note = r.random_bool(0.7).then(|| format!("closed {}", r.random_range(0..1000)));
        Step::Resolve { case: case.id().clone(), id: ids.choose(r).unwrap().clone(), outcome, note }
    }
}

async fn send(client: &Client, step: &Step) -> Reply {
    let auditor = Some("auditor");
    match step {
        Step::Challenge { case, target, author, text } => {
            client.post(&format!("/cases/{case}/challenges"), auditor, &json!({ "target": target, "author": author, "text": text })).await
        }
        Step::Resolve { case, id, outcome, note } => {
            let mut body = json!({ "outcome": outcome.as_str() });
            if let Some(n) = note {
                body["note"] = n.as_str().into();
            }
            client.post(&format!("/cases/{case}/challenges/{id}/resolve"), auditor, &body).await
        }
    }
}

/// The first `K<n>` not used in `case`, computed here rather than by the service.
fn expected_id(case: &Case) -> Id {
    (1..).map(|n| Id::new(format!("K{n}")).unwrap()).find(|k| !case.contains_id(k.as_str())).unwrap()
}

/// Applies an accepted step to the model, using the id the service
/// reported for new challenges.
fn replay(model: &mut BTreeMap<Id, Case>, step: &Step, assigned: &str) -> Result<(), String> {
    match step {
        Step::Challenge { case, target, author, text } => {
            let c = &model[case];
            let id = expected_id(c);
            if id.as_str() != assigned {
                return Err(format!("service assigned {assigned}, expected {id}"));
            }
            let target = Id::new(target.as_str()).map_err(|e| e.to_string())?;
            let next = c.attach_challenge(Challenge::open(id, target, author.as_str(), text.as_str())).map_err(|e| e.to_string())?;
            model.insert(case.clone(), next);
        }
        Step::Resolve { case, id, outcome, note } => {
            let next = model[case].resolve_challenge(id, *outcome, note.as_deref().unwrap_or("")).map_err(|e| e.to_string())?;
            model.insert(case.clone(), next);
        }
    }
    Ok(())
}

/// Whether the model accepts `step` as the next operation.
fn model_accepts(model: &BTreeMap<Id, Case>, step: &Step) -> bool {
    let mut copy = model.clone();
    let assigned = match step {
        Step::Challenge { case, .. } => expected_id(&model[case]).to_string(),
        Step::Resolve { .. } => String::new(),
    };
    replay(&mut copy, step, &assigned).is_ok()
}

async fn assert_same_state(client: &Client, model: &BTreeMap<Id, Case>, seq: u64, context: &str) {
    for (id, case) in model {
        let r = client.get(&format!("/cases/{id}"), Some("auditor")).await.json();
        let expected: Value = serde_json::from_str(&to_interchange(case)).unwrap();
        assert_eq!(r["case"], expected, "{context}: case {id}");
        assert_eq!(r["seq"], seq, "{context}");
    }
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn replaying_accepted_mutations_reproduces_the_service_state() {
    let dir = store_with(&FIXTURES);
    let svc = start(dir.path()).await;
    let client = Client::new(&svc);
    let mut model: BTreeMap<Id, Case> =
        FIXTURES.iter().map(|f| load_fixture(f).unwrap().0).map(|c| (c.id().clone(), c)).collect();
    let mut r = rng(61);
    let mut seq = 0u64;
    let (mut accepted, mut rejected) = (0, 0);

    for n in 0..SEQUENCES {
        let steps: Vec<Step> = (0..STEPS).map(|_| random_step(&mut r, &model)).collect();
        if n % 2 == 0 {
            for step in &steps {
                let expect = model_accepts(&model, step);
                let reply = send(&client, step).await;
                let ok = reply.status.is_success();
                assert_eq!(ok, expect, "sequence {n}: {step:?} -> {} {}", reply.status, reply.body);
                if ok {
                    let v = reply.json();
                    seq += 1;
                    assert_eq!(v["seq"], seq);
                    replay(&mut model, step, v["challenge"]["id"].as_str().unwrap()).unwrap();
                    accepted += 1;
                } else {
                    assert!(reply.status.is_client_error(), "{}", reply.body);
                    rejected += 1;
                }
            }
        } else {
            let handles: Vec<_> = steps
                .iter()
                .cloned()
                .map(|step| {
                    let client = client.clone();
                    tokio::spawn(async move {
                        let reply = send(&client, &step).await;
                        (step, reply)
                    })
                })
                .collect();
            let mut done: Vec<(u64, Step, String)> = Vec::new();
            for h in handles {
                let (step, reply) = h.await.unwrap();
                if reply.status.is_success() {
                    let v = reply.json();
                    done.push((v["seq"].as_u64().unwrap(), step, v["challenge"]["id"].as_str().unwrap().to_string()));
                } else {
                    assert!(reply.status.is_client_error(), "{}", reply.body);
                    assert_ne!(reply.status, StatusCode::INTERNAL_SERVER_ERROR);
                    rejected += 1;
                }
            }
            done.sort_by_key(|d| d.0);
            for (s, step, assigned) in &done {
                seq += 1;
                assert_eq!(*s, seq, "sequence {n}: accepted mutations take consecutive numbers");
                replay(&mut model, step, assigned).unwrap_or_else(|e| panic!("sequence {n}, seq {s}: {e}"));
                accepted += 1;
            }
        }
        assert_same_state(&client, &model, seq, &format!("after sequence {n}")).await;
    }
    assert!(accepted > 300 && rejected > 100, "accepted {accepted}, rejected {rejected}");
    svc.stop().await.unwrap();

    let svc = start(dir.path()).await;
    assert_same_state(&Client::new(&svc), &model, seq, "after restart").await;
    svc.stop().await.unwrap();
}
