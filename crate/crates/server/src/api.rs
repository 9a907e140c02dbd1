//! HTTP routes over the case store.
//!
//! Requests authenticate with `Authorization: Bearer <token>`; a request
//! without one acts as an anonymous visitor. Visitors and AI users may only
//! list certified cases and read their summary report.
//!
//! Every case response carries `ETag: "<version>"`. Mutations must send the
//! version they were based on in `If-Match`.

use std::collections::BTreeMap;
use std::sync::Arc;

use axum::extract::{FromRequestParts, Multipart, Path, Query, State};
use axum::http::request::Parts;
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::Utc;
use elens_core::checklist::AnswerContent;
use elens_core::dsl::{self, ParseDiagnostic};
use elens_core::model::{Actor, AssuranceCase, Direction, QuestionId};
use elens_core::report::ReportKind;
use elens_core::workflow::{CaseStatus, RegulatorDecision, ReviewVerdict};
use serde::{Deserialize, Serialize};

use crate::auth::{anonymous, can_author, is_public_role, TokenTable};
use crate::error::ApiError;
use crate::store::{FileStore, Snapshot};

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<FileStore>,
    pub tokens: Arc<TokenTable>,
}

/// The authenticated caller.
pub struct Caller(pub Actor);

impl FromRequestParts<AppState> for Caller {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &AppState) -> Result<Self, ApiError> {
        let Some(value) = parts.headers.get(header::AUTHORIZATION) else {
            return Ok(Caller(anonymous()));
        };
        let token = value
            .to_str()
            .ok()
            .and_then(|v| v.strip_prefix("Bearer "))
            .ok_or_else(ApiError::unauthorized)?;
        state
            .tokens
            .lookup(token.trim())
            .cloned()
            .map(Caller)
            .ok_or_else(ApiError::unauthorized)
    }
}

impl Caller {
    fn is_public(&self) -> bool {
        is_public_role(self.0.role)
    }

    fn require_member(&self) -> Result<(), ApiError> {
        if self.is_public() {
            return Err(ApiError::forbidden(format!(
                "role {} may only read certified summaries",
                self.0.role
            )));
        }
        Ok(())
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/cases", get(list_cases).post(create_case))
        .route("/cases/{id}", get(get_case))
        .route("/cases/{id}/dsl", get(get_dsl))
        .route("/cases/{id}/lint", get(get_lint))
        .route("/cases/{id}/completeness", get(get_completeness))
        .route("/cases/{id}/coverage", get(get_coverage))
        .route("/cases/{id}/questions", get(get_questions))
        .route("/cases/{id}/answers/{qid}", post(post_answer))
        .route("/cases/{id}/answers/{qid}/submit", post(post_submit))
        .route("/cases/{id}/answers/{qid}/review", post(post_review))
        .route("/cases/{id}/answers/{qid}/metric", post(post_metric))
        .route("/cases/{id}/regulator-review", post(post_regulator_review))
        .route("/cases/{id}/trace/{element}", get(get_trace))
        .route("/cases/{id}/uaia/{action}", get(get_uaia))
        .route("/cases/{id}/matrix", get(get_matrix))
        .route("/cases/{id}/verdict", get(get_verdict))
        .route("/cases/{id}/report", get(get_report))
        .route("/cases/{id}/audit", get(get_audit))
        .route("/cases/{id}/dot", get(get_dot))
        .with_state(state)
}

fn etag(version: u64) -> HeaderValue {
    HeaderValue::from_str(&format!("\"{version}\"")).expect("etag is ascii")
}

fn with_etag(version: u64, body: impl IntoResponse) -> Response {
    ([(header::ETAG, etag(version))], body).into_response()
}

fn text(version: u64, content_type: &'static str, body: String) -> Response {
    with_etag(version, ([(header::CONTENT_TYPE, content_type)], body))
}

/// Reads the version a mutation is based on from `If-Match`.
fn expected_version(headers: &HeaderMap) -> Result<u64, ApiError> {
    let Some(value) = headers.get(header::IF_MATCH) else {
        return Err(ApiError::new(
            StatusCode::PRECONDITION_REQUIRED,
            "if_match_required",
            "send the case version in If-Match",
        ));
    };
    let raw = value.to_str().unwrap_or("").trim();
    let raw = raw.strip_prefix("W/").unwrap_or(raw);
    raw.trim_matches('"')
        .parse()
        .map_err(|_| ApiError::bad_request(format!("If-Match `{raw}` is not a case version")).field("If-Match"))
}

fn accepts(headers: &HeaderMap, media: &str) -> bool {
    headers
        .get(header::ACCEPT)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.split(',').any(|m| m.split(';').next().unwrap_or("").trim() == media))
}

async fn health() -> &'static str {
    "ok"
}

#[derive(Serialize)]
struct CaseEntry {
    id: String,
    title: String,
    status: CaseStatus,
    version: u64,
}

fn entry(s: &Snapshot) -> CaseEntry {
    CaseEntry {
        id: s.case.id().to_string(),
        title: s.case.title().to_string(),
        status: s.case.status(),
        version: s.version,
    }
}

async fn list_cases(State(state): State<AppState>, caller: Caller) -> Json<Vec<CaseEntry>> {
    let public = caller.is_public();
    Json(
        state
            .store
            .list()
            .iter()
            .filter(|s| !public || s.case.status() == CaseStatus::Certified)
            .map(|s| entry(s))
            .collect(),
    )
}

#[derive(Serialize)]
struct Created {
    #[serde(flatten)]
    case: CaseEntry,
    warnings: Vec<ParseDiagnostic>,
}

async fn create_case(State(state): State<AppState>, Caller(actor): Caller, body: String) -> Result<Response, ApiError> {
    if !can_author(actor.role) {
        return Err(ApiError::forbidden(format!("role {} may not upload cases", actor.role)));
    }
    let (mut case, map) = dsl::parse_with_map(&body)
        .map_err(|d| ApiError::invalid("parse_error", "case source has errors").details(d))?;
    let warnings = dsl::lint(&case, Some(&map));
    case.record_creation(&actor, Utc::now());
    let snapshot = state.store.create(case)?;
    let location = format!("/cases/{}", snapshot.case.id());
    tracing::info!(case = %snapshot.case.id(), user = %actor.user, "case created");
    let body = Json(Created {
        case: entry(&snapshot),
        warnings,
    });
    Ok((
        StatusCode::CREATED,
        [
            (
                header::LOCATION,
                HeaderValue::from_str(&location).expect("case id is ascii"),
            ),
            (header::ETAG, etag(snapshot.version)),
        ],
        body,
    )
        .into_response())
}

/// Loads a case for a member role.
fn member_read(state: &AppState, caller: &Caller, id: &str) -> Result<Arc<Snapshot>, ApiError> {
    caller.require_member()?;
    Ok(state.store.get(id)?)
}

#[derive(Serialize)]
struct CaseView<'a> {
    version: u64,
    status: CaseStatus,
    case: &'a AssuranceCase,
}

async fn get_case(State(state): State<AppState>, caller: Caller, Path(id): Path<String>) -> Result<Response, ApiError> {
    let s = member_read(&state, &caller, &id)?;
    Ok(with_etag(
        s.version,
        Json(CaseView {
            version: s.version,
            status: s.case.status(),
            case: &s.case,
        }),
    ))
}

async fn get_dsl(State(state): State<AppState>, caller: Caller, Path(id): Path<String>) -> Result<Response, ApiError> {
    let s = member_read(&state, &caller, &id)?;
    Ok(text(s.version, "text/plain; charset=utf-8", dsl::serialize(&s.case)))
}

async fn get_lint(State(state): State<AppState>, caller: Caller, Path(id): Path<String>) -> Result<Response, ApiError> {
    let s = member_read(&state, &caller, &id)?;
    Ok(with_etag(s.version, Json(dsl::lint(&s.case, None))))
}

async fn get_completeness(
    State(state): State<AppState>,
    caller: Caller,
    Path(id): Path<String>,
) -> Result<Response, ApiError> {
    let s = member_read(&state, &caller, &id)?;
    Ok(with_etag(s.version, Json(s.case.completeness_check())))
}

async fn get_coverage(
    State(state): State<AppState>,
    caller: Caller,
    Path(id): Path<String>,
) -> Result<Response, ApiError> {
    let s = member_read(&state, &caller, &id)?;
    Ok(with_etag(s.version, Json(s.case.coverage_report())))
}

async fn get_questions(
    State(state): State<AppState>,
    caller: Caller,
    Path(id): Path<String>,
) -> Result<Response, ApiError> {
    let s = member_read(&state, &caller, &id)?;
    let report = s.case.generate_report(ReportKind::Full);
    let questions = report.full.map(|f| f.questions).unwrap_or_default();
    Ok(with_etag(s.version, Json(questions)))
}

/// Applies a mutation and answers with its result and the new version.
async fn mutate<T: Serialize>(
    state: &AppState,
    caller: &Caller,
    id: &str,
    headers: &HeaderMap,
    change: impl FnOnce(&mut AssuranceCase, &Actor) -> Result<T, ApiError>,
) -> Result<Response, ApiError> {
    caller.require_member()?;
    let expected = expected_version(headers)?;
    let actor = &caller.0;
    let (value, s) = state.store.update(id, expected, |case| change(case, actor)).await?;
    tracing::info!(case = id, user = %actor.user, version = s.version, "case updated");
    Ok(with_etag(s.version, Json(value)))
}

#[derive(Serialize)]
struct AnswerState {
    question_id: String,
    status: Option<String>,
    answer_version: u32,
    case_status: CaseStatus,
}

fn answer_state(case: &AssuranceCase, qid: &str) -> AnswerState {
    let answer = case.answer(qid);
    AnswerState {
        question_id: qid.to_string(),
        status: answer.map(|a| a.status.to_string()),
        answer_version: answer.map_or(0, |a| a.version),
        case_status: case.status(),
    }
}

async fn post_answer(
    State(state): State<AppState>,
    caller: Caller,
    Path((id, qid)): Path<(String, String)>,
    headers: HeaderMap,
    Json(content): Json<AnswerContent>,
) -> Result<Response, ApiError> {
    mutate(&state, &caller, &id, &headers, |case, actor| {
        case.answer_question(&qid, content, actor, Utc::now())?;
        Ok(answer_state(case, &qid))
    })
    .await
}

async fn post_submit(
    State(state): State<AppState>,
    caller: Caller,
    Path((id, qid)): Path<(String, String)>,
    headers: HeaderMap,
) -> Result<Response, ApiError> {
    mutate(&state, &caller, &id, &headers, |case, actor| {
        case.submit_answer(&qid, actor, Utc::now())?;
        Ok(answer_state(case, &qid))
    })
    .await
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ReviewBody {
    verdict: ReviewVerdict,
    #[serde(default)]
    text: String,
}

async fn post_review(
    State(state): State<AppState>,
    caller: Caller,
    Path((id, qid)): Path<(String, String)>,
    headers: HeaderMap,
    Json(body): Json<ReviewBody>,
) -> Result<Response, ApiError> {
    mutate(&state, &caller, &id, &headers, |case, actor| {
        case.review_answer(&qid, body.verdict, body.text, actor, Utc::now())?;
        Ok(answer_state(case, &qid))
    })
    .await
}

async fn post_metric(
    State(state): State<AppState>,
    caller: Caller,
    Path((id, qid)): Path<(String, String)>,
    headers: HeaderMap,
    mut form: Multipart,
) -> Result<Response, ApiError> {
    let mut file = None;
    let mut params = BTreeMap::new();
    while let Some(field) = form
        .next_field()
        .await
        .map_err(|e| ApiError::bad_request(e.to_string()))?
    {
        let name = field.name().unwrap_or("").to_string();
        let bytes = field.bytes().await.map_err(|e| ApiError::bad_request(e.to_string()))?;
        if name == "file" {
            file = Some(bytes);
        } else {
            let value = String::from_utf8(bytes.to_vec())
                .map_err(|_| ApiError::bad_request(format!("field `{name}` is not UTF-8")).field(&name))?;
            params.insert(name, value);
        }
    }
    let file =
        file.ok_or_else(|| ApiError::invalid("missing_file", "multipart field `file` is required").field("file"))?;
    mutate(&state, &caller, &id, &headers, |case, actor| {
        Ok(case.run_metric(&qid, &file, &params, actor, Utc::now())?)
    })
    .await
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RegulatorBody {
    decision: RegulatorDecision,
    #[serde(default)]
    flagged_questions: Vec<QuestionId>,
    #[serde(default)]
    comment: String,
}

#[derive(Serialize)]
struct CaseState {
    status: CaseStatus,
}

async fn post_regulator_review(
    State(state): State<AppState>,
    caller: Caller,
    Path(id): Path<String>,
    headers: HeaderMap,
    Json(body): Json<RegulatorBody>,
) -> Result<Response, ApiError> {
    mutate(&state, &caller, &id, &headers, |case, actor| {
        case.regulator_review(body.decision, &body.flagged_questions, body.comment, actor, Utc::now())?;
        Ok(CaseState { status: case.status() })
    })
    .await
}

#[derive(Deserialize)]
struct TraceQuery {
    direction: Option<String>,
}

async fn get_trace(
    State(state): State<AppState>,
    caller: Caller,
    Path((id, element)): Path<(String, String)>,
    Query(q): Query<TraceQuery>,
) -> Result<Response, ApiError> {
    let direction = match q.direction.as_deref() {
        None | Some("back") | Some("backward") => Direction::Backward,
        Some("forward") => Direction::Forward,
        Some(other) => {
            return Err(ApiError::bad_request(format!("direction `{other}` is not back or forward")).field("direction"))
        }
    };
    let s = member_read(&state, &caller, &id)?;
    Ok(with_etag(s.version, Json(s.case.trace(&element, direction)?)))
}

async fn get_uaia(
    State(state): State<AppState>,
    caller: Caller,
    Path((id, action)): Path<(String, String)>,
) -> Result<Response, ApiError> {
    let s = member_read(&state, &caller, &id)?;
    Ok(with_etag(s.version, Json(s.case.enumerate_uaia_slots(&action)?)))
}

#[derive(Deserialize)]
struct FormatQuery {
    format: Option<String>,
}

async fn get_matrix(
    State(state): State<AppState>,
    caller: Caller,
    Path(id): Path<String>,
    Query(q): Query<FormatQuery>,
    headers: HeaderMap,
) -> Result<Response, ApiError> {
    let s = member_read(&state, &caller, &id)?;
    let matrix = s.case.build_trace_matrix()?;
    let format = q.format.as_deref();
    Ok(
        if format == Some("csv") || (format.is_none() && accepts(&headers, "text/csv")) {
            text(s.version, "text/csv; charset=utf-8", matrix.to_csv())
        } else if format == Some("markdown") || (format.is_none() && accepts(&headers, "text/markdown")) {
            text(s.version, "text/markdown; charset=utf-8", matrix.to_markdown())
        } else {
            text(s.version, "application/json", matrix.to_json())
        },
    )
}

async fn get_verdict(
    State(state): State<AppState>,
    caller: Caller,
    Path(id): Path<String>,
) -> Result<Response, ApiError> {
    let s = member_read(&state, &caller, &id)?;
    Ok(with_etag(s.version, Json(s.case.verdict(None)?)))
}

#[derive(Deserialize)]
struct ReportQuery {
    kind: Option<ReportKind>,
    format: Option<String>,
}

async fn get_report(
    State(state): State<AppState>,
    caller: Caller,
    Path(id): Path<String>,
    Query(q): Query<ReportQuery>,
    headers: HeaderMap,
) -> Result<Response, ApiError> {
    let kind = q.kind.unwrap_or(ReportKind::Full);
    let s = state.store.get(&id)?;
    if caller.is_public() && (kind != ReportKind::Summary || s.case.status() != CaseStatus::Certified) {
        return Err(ApiError::forbidden("only the summary of a certified case is public"));
    }
    let report = s.case.generate_report(kind);
    let markdown = match q.format.as_deref() {
        Some("markdown") => true,
        Some("json") => false,
        Some(other) => return Err(ApiError::bad_request(format!("unknown format `{other}`")).field("format")),
        None => accepts(&headers, "text/markdown"),
    };
    Ok(if markdown {
        text(s.version, "text/markdown; charset=utf-8", report.to_markdown())
    } else {
        text(s.version, "application/json", report.to_json())
    })
}

#[derive(Deserialize)]
struct AuditQuery {
    target: Option<String>,
}

async fn get_audit(
    State(state): State<AppState>,
    caller: Caller,
    Path(id): Path<String>,
    Query(q): Query<AuditQuery>,
) -> Result<Response, ApiError> {
    let s = member_read(&state, &caller, &id)?;
    Ok(with_etag(s.version, Json(s.case.audit_trail(q.target.as_deref()))))
}

async fn get_dot(State(state): State<AppState>, caller: Caller, Path(id): Path<String>) -> Result<Response, ApiError> {
    let s = member_read(&state, &caller, &id)?;
    let graph = s.case.bound_goal_graph();
    let values = graph.propagate().ok();
    Ok(text(s.version, "text/vnd.graphviz", graph.to_dot(values.as_ref())))
}
