//! A live server on an ephemeral port and a small client for driving it.

#![allow(dead_code)]

use std::net::SocketAddr;
use std::path::Path;
use std::sync::Arc;

use elens_core::model::{Actor, StakeholderRole};
use elens_server::auth::TokenTable;
use elens_server::store::FileStore;
use elens_server::{router, AppState};
use reqwest::header::{ACCEPT, AUTHORIZATION, ETAG, IF_MATCH};
use reqwest::{Method, RequestBuilder, Response, StatusCode};
use serde_json::Value;

pub const SUPPLIER: &str = "t-sam";
pub const VALIDATOR: &str = "t-vera";
pub const REGULATOR: &str = "t-rex";
pub const ADMIN: &str = "t-ada";
pub const USER: &str = "t-uma";

pub const PREDICTIONS_CSV: &str = include_str!("../../../core/examples/inputs/predictions.csv");
pub const ATTRIBUTIONS_CSV: &str = include_str!("../../../core/examples/inputs/attributions.csv");
pub const EVIDENCE_CSV: &str = include_str!("../../../core/examples/inputs/evidence.csv");

pub fn tokens() -> TokenTable {
    let mut t = TokenTable::default();
    t.insert(SUPPLIER, Actor::new("sam", StakeholderRole::AiSupplier));
    t.insert(VALIDATOR, Actor::new("vera", StakeholderRole::EthicsValidator));
    t.insert(REGULATOR, Actor::new("rex", StakeholderRole::Regulator));
    t.insert(ADMIN, Actor::new("ada", StakeholderRole::SystemAdmin));
    t.insert(USER, Actor::new("uma", StakeholderRole::AiUser));
    t
}

/// Serves the store in `dir` on a fresh port and returns its base URL.
pub async fn spawn(dir: &Path) -> String {
    let state = AppState {
        store: Arc::new(FileStore::open(dir).unwrap()),
        tokens: Arc::new(tokens()),
    };
    let listener = tokio::net::TcpListener::bind(SocketAddr::from(([127, 0, 0, 1], 0)))
        .await
        .unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(async move { axum::serve(listener, router(state)).await.unwrap() });
    format!("http://{addr}")
}

/// A client following one case, remembering the last version it saw.
pub struct Session {
    pub http: reqwest::Client,
    pub base: String,
    pub case: String,
    pub version: u64,
}

pub fn etag_version(r: &Response) -> Option<u64> {
    r.headers().get(ETAG)?.to_str().ok()?.trim_matches('"').parse().ok()
}

impl Session {
    pub fn new(base: &str, case: &str) -> Self {
        Self {
            http: reqwest::Client::new(),
            base: base.to_string(),
            case: case.to_string(),
            version: 0,
        }
    }

    pub fn request(&self, method: Method, token: Option<&str>, path: &str) -> RequestBuilder {
        let url = format!("{}/cases/{}{}", self.base, self.case, path);
        let req = self.http.request(method, url);
        match token {
            Some(t) => req.header(AUTHORIZATION, format!("Bearer {t}")),
            None => req,
        }
    }

    pub async fn get(&self, token: Option<&str>, path: &str) -> Response {
        self.request(Method::GET, token, path).send().await.unwrap()
    }

    pub async fn get_json(&self, token: Option<&str>, path: &str) -> Value {
        let r = self.get(token, path).await;
        assert_eq!(r.status(), StatusCode::OK, "GET {path}");
        r.json().await.unwrap()
    }

    pub async fn get_text(&self, token: Option<&str>, path: &str, accept: &str) -> String {
        let r = self
            .request(Method::GET, token, path)
            .header(ACCEPT, accept)
            .send()
            .await
            .unwrap();
        assert_eq!(r.status(), StatusCode::OK, "GET {path}");
        r.text().await.unwrap()
    }

    /// Sends a mutation based on the last seen version and tracks the new one.
    pub async fn send(&mut self, req: RequestBuilder) -> Response {
        let r = req
            .header(IF_MATCH, format!("\"{}\"", self.version))
            .send()
            .await
            .unwrap();
        if r.status().is_success() {
            self.version = etag_version(&r).expect("mutation returns an ETag");
        }
        r
    }

    pub async fn post(&mut self, token: &str, path: &str, body: Value) -> Response {
        let req = self.request(Method::POST, Some(token), path).json(&body);
        self.send(req).await
    }

    pub async fn post_ok(&mut self, token: &str, path: &str, body: Value) -> Value {
        let r = self.post(token, path, body).await;
        let status = r.status();
        let body = r.text().await.unwrap();
        assert!(status.is_success(), "POST {path}: {status} {body}");
        serde_json::from_str(&body).unwrap()
    }

    pub async fn status(&self) -> String {
        self.get_json(Some(ADMIN), "").await["status"]
            .as_str()
            .unwrap()
            .to_string()
    }
}

/// Uploads `source` as the supplier and returns a session on the new case.
pub async fn upload(base: &str, source: &str) -> Session {
    let r = reqwest::Client::new()
        .post(format!("{base}/cases"))
        .header(AUTHORIZATION, format!("Bearer {SUPPLIER}"))
        .body(source.to_string())
        .send()
        .await
        .unwrap();
    assert_eq!(r.status(), StatusCode::CREATED);
    let version = etag_version(&r).unwrap();
    let body: Value = r.json().await.unwrap();
    let mut s = Session::new(base, body["id"].as_str().unwrap());
    s.version = version;
    s
}

/// Answers every question through the API and submits it.
pub async fn answer_all(s: &mut Session) {
    let questions = s.get_json(Some(SUPPLIER), "/questions").await;
    for q in questions.as_array().unwrap() {
        let id = q["id"].as_str().unwrap();
        let qtype = &q["qtype"];
        match qtype["type"].as_str().unwrap() {
            "multiple_choice" => {
                s.post_ok(
                    SUPPLIER,
                    &format!("/answers/{id}"),
                    serde_json::json!({"type": "choice", "index": 0}),
                )
                .await;
            }
            "extended_response" => {
                let body = format!("Measures for {id}:\n- documented\n- reviewed \"quarterly\"");
                s.post_ok(
                    SUPPLIER,
                    &format!("/answers/{id}"),
                    serde_json::json!({"type": "text", "body": body}),
                )
                .await;
            }
            "algorithmic" => {
                let csv = match qtype["metric"].as_str().unwrap() {
                    "demographic_parity" | "disparate_impact" => PREDICTIONS_CSV,
                    "faithfulness" => ATTRIBUTIONS_CSV,
                    _ => EVIDENCE_CSV,
                };
                let form = reqwest::multipart::Form::new()
                    .part("file", reqwest::multipart::Part::text(csv).file_name("input.csv"));
                let req = s
                    .request(Method::POST, Some(SUPPLIER), &format!("/answers/{id}/metric"))
                    .multipart(form);
                let r = s.send(req).await;
                assert_eq!(r.status(), StatusCode::OK, "metric {id}: {}", r.text().await.unwrap());
            }
            other => panic!("unknown question type {other}"),
        }
        s.post_ok(SUPPLIER, &format!("/answers/{id}/submit"), Value::Null).await;
    }
}

pub async fn question_ids(s: &Session) -> Vec<String> {
    let questions = s.get_json(Some(SUPPLIER), "/questions").await;
    questions
        .as_array()
        .unwrap()
        .iter()
        .map(|q| q["id"].as_str().unwrap().to_string())
        .collect()
}
