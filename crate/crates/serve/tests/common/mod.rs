#![allow(dead_code)]

use std::fs;
use std::path::Path;

use eac_core::corpus::fixture;
use eac_serve::{Service, TIER_HEADER};
use reqwest::StatusCode;
use serde_json::Value;
use tempfile::TempDir;

/// A store directory holding the named corpus fixtures.
pub fn store_with(names: &[&str]) -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    for name in names {
        let f = fixture(name).unwrap();
        fs::write(dir.path().join(&f.file), f.source()).unwrap();
    }
    dir
}

pub async fn start(dir: &Path) -> Service {
    Service::start(dir, "127.0.0.1:0").await.unwrap()
}

pub struct Reply {
    pub status: StatusCode,
    pub content_type: String,
    pub seq: Option<u64>,
    pub body: String,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.body).unwrap_or_else(|e| panic!("{e}: {}", self.body))
    }
}

#[derive(Clone)]
pub struct Client {
    pub base: String,
    http: reqwest::Client,
}

impl Client {
    pub fn new(service: &Service) -> Self {
        Client { base: service.base_url(), http: reqwest::Client::new() }
    }

    async fn send(&self, req: reqwest::RequestBuilder, tier: Option<&str>) -> Reply {
        let req = match tier {
            Some(t) => req.header(TIER_HEADER, t),
            None => req,
        };
        let res = req.send().await.unwrap();
        let status = res.status();
        let header = |name: &str| res.headers().get(name).map(|v| v.to_str().unwrap().to_string());
        let content_type = header("content-type").unwrap_or_default();
        let seq = header(eac_serve::SEQ_HEADER).map(|s| s.parse().unwrap());
        Reply { status, content_type, seq, body: res.text().await.unwrap() }
    }

    pub async fn get(&self, path: &str, tier: Option<&str>) -> Reply {
        self.send(self.http.get(format!("{}{path}", self.base)), tier).await
    }

    pub async fn post(&self, path: &str, tier: Option<&str>, body: &Value) -> Reply {
        let req = self
            .http
            .post(format!("{}{path}", self.base))
            .header("content-type", "application/json")
            .body(body.to_string());
        self.send(req, tier).await
    }
}
