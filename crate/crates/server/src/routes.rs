use crate::error::{ApiError, ErrorCode};
use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use shelftalk_core::catalog::Product;
use shelftalk_core::orchestrator::{Assistant, AssistantReply, ScanReply, ScoredProduct};
use shelftalk_core::purchase::Receipt;
use shelftalk_core::recommend::{similar_products, RecommendError, DEFAULT_RECOMMENDATIONS};
use std::sync::Arc;

pub type AppState = Arc<Assistant>;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewSession {
    #[serde(default)]
    pub tags: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SessionCreated {
    pub session_id: String,
}

#[derive(Debug, Deserialize)]
pub struct ScanRequest {
    pub session_id: String,
    pub barcode: String,
}

#[derive(Debug, Deserialize)]
pub struct ChatRequest {
    pub session_id: String,
    pub text: String,
}

#[derive(Debug, Deserialize)]
pub struct SessionRequest {
    pub session_id: String,
}

#[derive(Debug, Deserialize)]
pub struct SimilarQuery {
    pub n: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct SimilarItems {
    pub product_id: String,
    pub items: Vec<ScoredProduct>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Health {
    pub status: String,
    pub products: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Cancelled {
    pub state: String,
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/api/session", post(create_session))
        .route("/api/scan", post(scan))
        .route("/api/chat", post(chat))
        .route("/api/products/{id}", get(product))
        .route("/api/products/{id}/similar", get(similar))
        .route("/api/purchase/confirm", post(confirm))
        .route("/api/purchase/cancel", post(cancel))
        .fallback(not_found)
        .method_not_allowed_fallback(wrong_method)
        .with_state(state)
}

async fn health(State(app): State<AppState>) -> Json<Health> {
    Json(Health {
        status: "ok".into(),
        products: app.catalog().len(),
    })
}

async fn create_session(State(app): State<AppState>, body: Bytes) -> Result<Json<SessionCreated>, ApiError> {
    let req: NewSession = if body.iter().all(u8::is_ascii_whitespace) {
        NewSession::default()
    } else {
        parse(&body)?
    };
    Ok(Json(SessionCreated {
        session_id: app.create_session(req.tags),
    }))
}

async fn scan(State(app): State<AppState>, body: Bytes) -> Result<Json<ScanReply>, ApiError> {
    let req: ScanRequest = parse(&body)?;
    Ok(Json(app.scan_barcode(&req.session_id, req.barcode.trim())?))
}

async fn chat(State(app): State<AppState>, body: Bytes) -> Result<Json<AssistantReply>, ApiError> {
    let req: ChatRequest = parse(&body)?;
    Ok(Json(app.handle_message(&req.session_id, &req.text)?))
}

async fn product(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<Product>, ApiError> {
    app.catalog()
        .get(&id)
        .cloned()
        .map(Json)
        .ok_or_else(|| ApiError::new(ErrorCode::ProductNotFound, format!("product {id:?} not found")))
}

async fn similar(
    State(app): State<AppState>,
    Path(id): Path<String>,
    query: Result<Query<SimilarQuery>, axum::extract::rejection::QueryRejection>,
) -> Result<Json<SimilarItems>, ApiError> {
    let Query(q) = query?;
    let n = q.n.unwrap_or(DEFAULT_RECOMMENDATIONS);
    let items = similar_products(app.catalog(), &id, n).map_err(|e| match e {
        RecommendError::UnknownProduct(_) => ApiError::new(ErrorCode::ProductNotFound, e.to_string()),
        RecommendError::ZeroCount => ApiError::new(ErrorCode::InvalidParameter, e.to_string()),
    })?;
    Ok(Json(SimilarItems {
        product_id: id,
        items: items
            .into_iter()
            .map(|r| ScoredProduct {
                product: r.product.into(),
                score: r.score,
            })
            .collect(),
    }))
}

async fn confirm(State(app): State<AppState>, body: Bytes) -> Result<Json<Receipt>, ApiError> {
    let req: SessionRequest = parse(&body)?;
    Ok(Json(app.confirm_purchase(&req.session_id)?))
}

async fn cancel(State(app): State<AppState>, body: Bytes) -> Result<Json<Cancelled>, ApiError> {
    let req: SessionRequest = parse(&body)?;
    app.cancel_purchase(&req.session_id)?;
    Ok(Json(Cancelled { state: "idle".into() }))
}

fn parse<T: DeserializeOwned>(body: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::new(ErrorCode::BadRequest, format!("invalid JSON body: {e}")))
}

async fn not_found() -> ApiError {
    ApiError::new(ErrorCode::NotFound, "no such endpoint")
}

async fn wrong_method() -> ApiError {
    ApiError::new(ErrorCode::NotFound, "no such endpoint for this method")
}
