use std::collections::BTreeMap;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::QueryRejection;
use axum::extract::{Path, Query, State as AxumState};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use eac_core::appraisal::DEFAULT_THRESHOLD;
use eac_core::export::{to_dot, to_interchange, to_report_with, Filtered, TierFilter};
use eac_core::lifecycle::{diff_cases, Changes, LifecycleStage};
use eac_core::model::{AudienceTier, Case, Challenge, Outcome, Phase};
use eac_core::validation::{compute_status, explain_status, validate_at, Explanation};
use eac_core::Id;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use tokio::sync::{mpsc, oneshot};

use crate::journal::{Entry, Op};
use crate::problem::Problem;
use crate::store::State;
use crate::writer::{current, Command, Published, Request};

pub const TIER_HEADER: &str = "x-eac-tier";
pub const SEQ_HEADER: &str = "x-eac-seq";

#[derive(Clone)]
pub(crate) struct App {
    pub state: Published,
    pub writer: mpsc::Sender<Command>,
}

type Params = Result<Query<BTreeMap<String, String>>, QueryRejection>;

pub(crate) fn router(app: App) -> Router {
    let case = Router::new()
        .route("/", get(get_case))
        .route("/status", get(get_status))
        .route("/validate", get(get_validate))
        .route("/report", get(get_report))
        .route("/graph.dot", get(get_graph))
        .route("/diff", get(get_diff))
        .route("/challenges", post(post_challenge))
        .route("/challenges/{cid}/resolve", post(post_resolve));
    Router::new()
        .route("/api/v1/cases", get(list_cases))
        .nest("/api/v1/cases/{id}", case)
        .fallback(|| async { Problem::not_found("no such route", "") })
        .with_state(app)
}

fn with_seq(seq: u64, status: StatusCode, content_type: &'static str, body: String) -> Response {
    let mut res = (status, [(header::CONTENT_TYPE, content_type)], body).into_response();
    res.headers_mut().insert(SEQ_HEADER, HeaderValue::from(seq));
    res
}

fn json_response(seq: u64, status: StatusCode, mut body: Value) -> Response {
    body["seq"] = seq.into();
    with_seq(seq, status, "application/json", serde_json::to_string(&body).expect("values serialize"))
}

fn params(p: Params) -> Result<BTreeMap<String, String>, Problem> {
    p.map(|Query(q)| q).map_err(|e| Problem::bad_request(e.body_text(), "/query"))
}

fn parse_param<T: std::str::FromStr>(q: &BTreeMap<String, String>, name: &str) -> Result<Option<T>, Problem>
where
    T::Err: std::fmt::Display,
{
    match q.get(name) {
        None => Ok(None),
        Some(v) => v.parse::<T>().map(Some).map_err(|e| Problem::bad_request(e.to_string(), format!("/query/{name}"))),
    }
}

fn parse_list<T: std::str::FromStr>(q: &BTreeMap<String, String>, name: &str) -> Result<Option<Vec<T>>, Problem>
where
    T::Err: std::fmt::Display,
{
    match q.get(name) {
        None => Ok(None),
        Some(v) => v
            .split(',')
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().map_err(|e: T::Err| Problem::bad_request(e.to_string(), format!("/query/{name}"))))
            .collect::<Result<Vec<T>, _>>()
            .map(Some),
    }
}

/// The viewer's tier: the header's, lowered (never raised) by `?tier=`.
fn viewer(headers: &HeaderMap, q: &BTreeMap<String, String>) -> Result<AudienceTier, Problem> {
    let granted = match headers.get(TIER_HEADER) {
        None => AudienceTier::Public,
        Some(v) => v
            .to_str()
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Problem::bad_request(format!("{TIER_HEADER} must be one of {}", AudienceTier::names()), format!("/headers/{TIER_HEADER}")))?,
    };
    let asked: Option<AudienceTier> = parse_param(q, "tier")?;
    Ok(asked.map_or(granted, |t| t.min(granted)))
}

fn filter(headers: &HeaderMap, q: &BTreeMap<String, String>) -> Result<TierFilter, Problem> {
    let mut f = TierFilter::new(viewer(headers, q)?);
    if let Some(goals) = parse_list::<Id>(q, "goals")? {
        f = f.with_goals(goals);
    }
    if let Some(stages) = parse_list::<LifecycleStage>(q, "stages")? {
        f = f.with_stages(stages);
    }
    Ok(f)
}

fn find_case(state: &State, id: &str) -> Result<Case, Problem> {
    state.cases.get(id).cloned().ok_or_else(|| Problem::not_found(format!("no case `{id}`"), "/path/id"))
}

fn digest(case: &Case) -> String {
    hex::encode(Sha256::digest(to_interchange(case).as_bytes()))
}

async fn list_cases(AxumState(app): AxumState<App>) -> Response {
    let state = current(&app.state);
    let cases: Vec<Value> = state
        .cases
        .values()
        .map(|c| json!({ "id": c.id(), "title": c.title(), "phase": c.phase() }))
        .collect();
    json_response(state.seq, StatusCode::OK, json!({ "cases": cases }))
}

async fn get_case(
    AxumState(app): AxumState<App>,
    Path(id): Path<String>,
    headers: HeaderMap,
    q: Params,
) -> Result<Response, Problem> {
    let q = params(q)?;
    let state = current(&app.state);
    let case = find_case(&state, &id)?;
    let Filtered { case: visible, redacted } = filter(&headers, &q)?.apply(&case);
    let doc: Value = serde_json::from_str(&to_interchange(&visible)).expect("interchange is JSON");
    let body = json!({ "case": doc, "redacted": redacted.len(), "digest": digest(&case) });
    Ok(json_response(state.seq, StatusCode::OK, body))
}

fn prune(e: Explanation, visible: &Case) -> Explanation {
    let children = e
        .children
        .into_iter()
        .filter(|c| visible.element(c.element.as_str()).is_some())
        .map(|c| prune(c, visible))
        .collect();
    Explanation { children, ..e }
}

async fn get_status(
    AxumState(app): AxumState<App>,
    Path(id): Path<String>,
    headers: HeaderMap,
    q: Params,
) -> Result<Response, Problem> {
    let q = params(q)?;
    let state = current(&app.state);
    let case = find_case(&state, &id)?;
    let visible = filter(&headers, &q)?.apply(&case).case;
    let statuses = compute_status(&case).map_err(|e| Problem::internal(e.to_string()))?;
    let statuses: BTreeMap<&Id, _> = statuses.iter().filter(|(k, _)| visible.element(k.as_str()).is_some()).collect();
    let mut body = json!({ "statuses": statuses });
    if let Some(target) = q.get("explain") {
        if visible.element(target).is_none() {
            return Err(Problem::not_found(format!("no element `{target}`"), "/query/explain"));
        }
        let e = explain_status(&case, target).map_err(|e| Problem::internal(e.to_string()))?;
        body["explanation"] = serde_json::to_value(prune(e, &visible)).expect("explanations serialize");
    }
    Ok(json_response(state.seq, StatusCode::OK, body))
}

async fn get_validate(
    AxumState(app): AxumState<App>,
    Path(id): Path<String>,
    headers: HeaderMap,
    q: Params,
) -> Result<Response, Problem> {
    let q = params(q)?;
    let state = current(&app.state);
    let case = find_case(&state, &id)?;
    let visible = filter(&headers, &q)?.apply(&case).case;
    let phase: Phase = parse_param(&q, "phase")?.unwrap_or(case.phase());
    let report = validate_at(&case, phase);
    let (shown, hidden): (Vec<_>, Vec<_>) = report
        .findings
        .into_iter()
        .partition(|f| f.target == *case.id() || visible.contains_id(f.target.as_str()));
    let errors = shown.iter().filter(|f| f.severity == eac_core::validation::Severity::Error).count();
    let body = json!({
        "phase": phase,
        "errors": errors,
        "warnings": shown.len() - errors,
        "findings": shown,
        "withheld": hidden.len(),
    });
    Ok(json_response(state.seq, StatusCode::OK, body))
}

async fn get_report(
    AxumState(app): AxumState<App>,
    Path(id): Path<String>,
    headers: HeaderMap,
    q: Params,
) -> Result<Response, Problem> {
    let q = params(q)?;
    let state = current(&app.state);
    let case = find_case(&state, &id)?;
    let threshold: f64 = parse_param(&q, "threshold")?.unwrap_or(DEFAULT_THRESHOLD);
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Problem::bad_request("threshold must lie in [0, 1]", "/query/threshold"));
    }
    let md = to_report_with(&case, &filter(&headers, &q)?, threshold);
    Ok(with_seq(state.seq, StatusCode::OK, "text/markdown; charset=utf-8", md))
}

async fn get_graph(
    AxumState(app): AxumState<App>,
    Path(id): Path<String>,
    headers: HeaderMap,
    q: Params,
) -> Result<Response, Problem> {
    let q = params(q)?;
    let state = current(&app.state);
    let case = find_case(&state, &id)?;
    let dot = to_dot(&case, &filter(&headers, &q)?);
    Ok(with_seq(state.seq, StatusCode::OK, "text/vnd.graphviz; charset=utf-8", dot))
}

/// Keeps additions visible after, removals visible before, and
/// modifications visible on both sides.
fn redact(c: Changes, before: impl Fn(&str) -> bool, after: impl Fn(&str) -> bool) -> (Changes, usize) {
    let total = c.added.len() + c.removed.len() + c.modified.len();
    let kept = Changes {
        added: c.added.into_iter().filter(|id| after(id.as_str())).collect(),
        removed: c.removed.into_iter().filter(|id| before(id.as_str())).collect(),
        modified: c.modified.into_iter().filter(|m| before(m.id.as_str()) && after(m.id.as_str())).collect(),
    };
    let shown = kept.added.len() + kept.removed.len() + kept.modified.len();
    (kept, total - shown)
}

async fn get_diff(
    AxumState(app): AxumState<App>,
    Path(id): Path<String>,
    headers: HeaderMap,
    q: Params,
) -> Result<Response, Problem> {
    let q = params(q)?;
    let state = current(&app.state);
    find_case(&state, &id)?;
    let f = filter(&headers, &q)?;
    let snaps = state.snapshots.get(id.as_str());
    let load = |name: &str| -> Result<Case, Problem> {
        let label = q.get(name).ok_or_else(|| Problem::bad_request(format!("`{name}` is required"), format!("/query/{name}")))?;
        let snap = snaps
            .and_then(|s| s.get(label))
            .ok_or_else(|| Problem::not_found(format!("no snapshot `{label}` of case `{id}`"), format!("/query/{name}")))?;
        snap.case().map_err(|_| Problem::internal(format!("snapshot `{label}` does not parse")))
    };
    let (a, b) = (load("from")?, load("to")?);
    let (va, vb) = (f.apply(&a).case, f.apply(&b).case);
    let mut changes = diff_cases(&a, &b);
    let mut withheld = 0;
    let mut take = |c: Changes, before: &dyn Fn(&str) -> bool, after: &dyn Fn(&str) -> bool| {
        let (kept, n) = redact(c, before, after);
        withheld += n;
        kept
    };
    changes.elements = take(std::mem::take(&mut changes.elements), &|i| va.element(i).is_some(), &|i| vb.element(i).is_some());
    changes.links = take(std::mem::take(&mut changes.links), &|i| va.link(i).is_some(), &|i| vb.link(i).is_some());
    changes.challenges =
        take(std::mem::take(&mut changes.challenges), &|i| va.challenge(i).is_some(), &|i| vb.challenge(i).is_some());
    changes.appraisals = take(
        std::mem::take(&mut changes.appraisals),
        &|i| va.appraisals().contains_key(i),
        &|i| vb.appraisals().contains_key(i),
    );
    let before_deltas = changes.status_deltas.len();
    changes.status_deltas.retain(|k, _| va.element(k.as_str()).is_some() && vb.element(k.as_str()).is_some());
    withheld += before_deltas - changes.status_deltas.len();
    let body = json!({ "from": q["from"], "to": q["to"], "changes": changes, "withheld": withheld });
    Ok(json_response(state.seq, StatusCode::OK, body))
}

fn body<T: DeserializeOwned>(bytes: &[u8]) -> Result<T, Problem> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let pointer: String = e.path().iter().map(|s| format!("/{s}")).collect();
        Problem::new(StatusCode::UNPROCESSABLE_ENTITY, crate::problem::BAD_REQUEST, e.inner().to_string(), pointer)
    })
}

fn challenge_json(c: &Challenge) -> Value {
    json!({
        "id": c.id,
        "target": c.target,
        "author": c.author,
        "text": c.text,
        "state": c.state,
        "resolutionNote": c.resolution_note,
    })
}

/// Queues a mutation and waits for the state it produced.
async fn submit(app: &App, case: Id, request: Request) -> Result<(Entry, Arc<State>), Problem> {
    let (reply, rx) = oneshot::channel();
    app.writer.send(Command { case, request, reply }).await.map_err(|_| Problem::internal("writer stopped"))?;
    rx.await.map_err(|_| Problem::internal("writer stopped"))?
}

fn written(entry: &Entry, state: &State) -> Value {
    let id = match &entry.op {
        Op::Challenge { id, .. } | Op::Resolve { id, .. } => id,
    };
    json!({ "challenge": challenge_json(&state.cases[&entry.case].challenges()[id]) })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NewChallenge {
    target: String,
    author: String,
    text: String,
}

async fn post_challenge(
    AxumState(app): AxumState<App>,
    Path(id): Path<String>,
    headers: HeaderMap,
    q: Params,
    bytes: Bytes,
) -> Result<Response, Problem> {
    let q = params(q)?;
    let case = find_case(&current(&app.state), &id)?;
    let req: NewChallenge = body(&bytes)?;
    let visible = TierFilter::new(viewer(&headers, &q)?).apply(&case).case;
    let target = Id::new(req.target.clone())
        .ok()
        .filter(|t| visible.element(t.as_str()).is_some() || visible.link(t.as_str()).is_some())
        .ok_or_else(|| {
            Problem::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                eac_core::dsl::codes::DANGLING_REF,
                format!("no element or link `{}`", req.target),
                "/target",
            )
        })?;
    let request = Request::Challenge { target, author: req.author, text: req.text };
    let (entry, state) = submit(&app, case.id().clone(), request).await?;
    Ok(json_response(entry.seq, StatusCode::CREATED, written(&entry, &state)))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Resolution {
    outcome: Outcome,
    #[serde(default)]
    note: String,
}

async fn post_resolve(
    AxumState(app): AxumState<App>,
    Path((id, cid)): Path<(String, String)>,
    headers: HeaderMap,
    q: Params,
    bytes: Bytes,
) -> Result<Response, Problem> {
    let q = params(q)?;
    let case = find_case(&current(&app.state), &id)?;
    let visible = TierFilter::new(viewer(&headers, &q)?).apply(&case).case;
    let challenge = visible
        .challenge(&cid)
        .ok_or_else(|| Problem::not_found(format!("no challenge `{cid}`"), "/path/cid"))?
        .id
        .clone();
    let req: Resolution = body(&bytes)?;
    let request = Request::Resolve { id: challenge, outcome: req.outcome, note: req.note };
    let (entry, state) = submit(&app, case.id().clone(), request).await?;
    Ok(json_response(entry.seq, StatusCode::OK, written(&entry, &state)))
}
