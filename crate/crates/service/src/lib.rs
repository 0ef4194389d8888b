//! HTTP JSON API for the web UI and other clients.
//!
//! Routes:
//!
//! * `POST /api/predict` : constants from the surrogate or the FFT solver
//! * `POST /api/inverse` : brute-force search of the surrogate
//! * `GET /api/geometry?shape&d_rel&D_rel` : SVG of the unit cell
//! * `GET /api/shapes` : shapes and whether their models are loaded
//! * `GET /healthz`
//!
//! Models are read once at startup. FFT requests run on blocking threads
//! behind a semaphore so they cannot starve the surrogate path.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use auxetikit::forest::Surrogate;
use auxetikit::inverse::{brute_force, InverseOptions, InverseTarget, DEFAULT_EVALUATIONS};
use auxetikit::{geometry, homogenize, BaseMaterial, Error, HomogenizeOptions, Regime, UnitCellSpec, VoidShape};
use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tokio::sync::Semaphore;
use tower_http::cors::CorsLayer;
use tower_http::services::ServeDir;

pub const MAX_EVALUATIONS: usize = 1_000_000;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub model_dir: PathBuf,
    pub static_dir: Option<PathBuf>,
    /// Grid size of FFT-backed predictions.
    pub fft_grid_n: usize,
    pub fft_tol: f64,
    /// Concurrent FFT solves.
    pub fft_workers: usize,
    pub regime: Regime,
}

impl ServiceConfig {
    pub fn new(model_dir: impl Into<PathBuf>) -> Self {
        ServiceConfig {
            model_dir: model_dir.into(),
            static_dir: None,
            fft_grid_n: 128,
            fft_tol: auxetikit::fft::DEFAULT_TOLERANCE,
            fft_workers: 2,
            regime: Regime::PlaneStrain,
        }
    }
}

pub struct AppState {
    config: ServiceConfig,
    models: BTreeMap<VoidShape, Surrogate>,
    fft_slots: Semaphore,
}

impl AppState {
    /// Load every shape whose three models are present; the others are
    /// reported as unavailable.
    pub fn load(config: ServiceConfig) -> Self {
        let mut models = BTreeMap::new();
        for shape in VoidShape::ALL {
            match Surrogate::load(&config.model_dir, shape) {
                Ok(s) => {
                    models.insert(shape, s);
                }
                Err(e) => log::warn!("no surrogate for {shape}: {e}"),
            }
        }
        Self::with_models(config, models.into_values().collect())
    }

    pub fn with_models(config: ServiceConfig, surrogates: Vec<Surrogate>) -> Self {
        let fft_slots = Semaphore::new(config.fft_workers.max(1));
        AppState {
            models: surrogates.into_iter().map(|s| (s.shape, s)).collect(),
            config,
            fft_slots,
        }
    }

    pub fn loaded_shapes(&self) -> Vec<VoidShape> {
        self.models.keys().copied().collect()
    }

    fn surrogate(&self, shape: VoidShape) -> Result<&Surrogate, ApiError> {
        self.models.get(&shape).ok_or_else(|| ApiError {
            status: StatusCode::SERVICE_UNAVAILABLE,
            code: "models_unavailable",
            message: format!("no trained models loaded for {shape}"),
        })
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn bad_request(message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            code: "invalid_request",
            message: message.into(),
        }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let (status, code) = match e {
            Error::Invalid(_) => (StatusCode::BAD_REQUEST, "invalid_request"),
            Error::NotConverged { .. } | Error::NonFinite { .. } | Error::SingularAcoustic(..) => {
                (StatusCode::UNPROCESSABLE_ENTITY, "solver_failed")
            }
            _ => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
        };
        ApiError {
            status,
            code,
            message: e.to_string(),
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError::bad_request(r.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(r: QueryRejection) -> Self {
        ApiError::bad_request(r.body_text())
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: ErrorDetail<'a>,
}

#[derive(Serialize)]
struct ErrorDetail<'a> {
    code: &'a str,
    message: &'a str,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            error: ErrorDetail {
                code: self.code,
                message: &self.message,
            },
        };
        (self.status, Json(body)).into_response()
    }
}

fn parse_shape(s: &str) -> Result<VoidShape, ApiError> {
    s.parse().map_err(|e: Error| ApiError::bad_request(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvaluatorKind {
    #[default]
    Surrogate,
    Fft,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PredictRequest {
    pub shape: String,
    pub d_rel: f64,
    #[serde(rename = "D_rel")]
    pub big_d_rel: f64,
    #[serde(rename = "E")]
    pub youngs_modulus: f64,
    pub nu: f64,
    #[serde(default)]
    pub evaluator: EvaluatorKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictResponse {
    pub c11: f64,
    pub c12: f64,
    pub c33: f64,
    pub nu_eff: Option<f64>,
    pub evaluator: EvaluatorKind,
    pub elapsed_ms: f64,
}

async fn predict(
    State(state): State<Arc<AppState>>,
    body: Result<Json<PredictRequest>, JsonRejection>,
) -> Result<Json<PredictResponse>, ApiError> {
    let Json(req) = body?;
    let start = Instant::now();
    let shape = parse_shape(&req.shape)?;
    let material = BaseMaterial::new(req.youngs_modulus, req.nu)?;
    let spec = UnitCellSpec::new(shape, req.d_rel, req.big_d_rel, material)?;

    let [c11, c12, c33] = match req.evaluator {
        EvaluatorKind::Surrogate => {
            let e = material.youngs_modulus;
            state
                .surrogate(shape)?
                .predict(spec.d_rel, spec.big_d_rel, material.nu)
                .map(|c| c * e)
        }
        EvaluatorKind::Fft => {
            let _slot = state.fft_slots.acquire().await.map_err(|_| ApiError {
                status: StatusCode::SERVICE_UNAVAILABLE,
                code: "shutting_down",
                message: "service is shutting down".into(),
            })?;
            let opts = HomogenizeOptions {
                n: state.config.fft_grid_n,
                tol: state.config.fft_tol,
                regime: state.config.regime,
                ..HomogenizeOptions::default()
            };
            let (c, _) = tokio::task::spawn_blocking(move || homogenize(&spec, &opts))
                .await
                .map_err(|e| ApiError {
                    status: StatusCode::INTERNAL_SERVER_ERROR,
                    code: "internal",
                    message: e.to_string(),
                })??;
            [c.c11, c.c12, c.c33]
        }
    };
    Ok(Json(PredictResponse {
        c11,
        c12,
        c33,
        nu_eff: (c11 != 0.0).then(|| c12 / c11),
        evaluator: req.evaluator,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    }))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StressTargets {
    pub c11: Option<f64>,
    pub c12: Option<f64>,
    pub c33: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InverseRequest {
    pub shape: String,
    #[serde(default)]
    pub targets: StressTargets,
    #[serde(rename = "E")]
    pub youngs_modulus: f64,
    pub nu: f64,
    pub eval_count: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub shape: VoidShape,
    pub d_rel: f64,
    #[serde(rename = "D_rel")]
    pub big_d_rel: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InverseResponse {
    pub d_rel: f64,
    #[serde(rename = "D_rel")]
    pub big_d_rel: f64,
    pub loss: f64,
    pub evaluations: usize,
    pub elapsed_s: f64,
    pub feasible: bool,
    /// Surrogate constants at the returned point, in stress units.
    pub predicted: StressTargets,
    pub geometry: Geometry,
}

async fn inverse(
    State(state): State<Arc<AppState>>,
    body: Result<Json<InverseRequest>, JsonRejection>,
) -> Result<Json<InverseResponse>, ApiError> {
    let Json(req) = body?;
    let shape = parse_shape(&req.shape)?;
    let material = BaseMaterial::new(req.youngs_modulus, req.nu)?;
    let t = &req.targets;
    let target = InverseTarget::from_stress(t.c11, t.c12, t.c33, &material)?;
    let eval_count = req.eval_count.unwrap_or(DEFAULT_EVALUATIONS);
    if !(1..=MAX_EVALUATIONS).contains(&eval_count) {
        return Err(ApiError::bad_request(format!(
            "eval_count must lie in [1, {MAX_EVALUATIONS}]"
        )));
    }
    state.surrogate(shape)?;

    let opts = InverseOptions {
        eval_count,
        ..InverseOptions::default()
    };
    let worker = Arc::clone(&state);
    let (result, predicted) = tokio::task::spawn_blocking(move || {
        let s = worker.surrogate(shape).expect("checked above");
        let r = brute_force(s, &target, material.nu, &opts)?;
        let p = s.predict(r.d_rel, r.big_d_rel, material.nu);
        Ok::<_, Error>((r, p))
    })
    .await
    .map_err(|e| ApiError {
        status: StatusCode::INTERNAL_SERVER_ERROR,
        code: "internal",
        message: e.to_string(),
    })??;

    let e = material.youngs_modulus;
    Ok(Json(InverseResponse {
        d_rel: result.d_rel,
        big_d_rel: result.big_d_rel,
        loss: result.loss,
        evaluations: result.evaluations,
        elapsed_s: result.elapsed_s,
        feasible: result.feasible,
        predicted: StressTargets {
            c11: Some(predicted[0] * e),
            c12: Some(predicted[1] * e),
            c33: Some(predicted[2] * e),
        },
        geometry: Geometry {
            shape,
            d_rel: result.d_rel,
            big_d_rel: result.big_d_rel,
        },
    }))
}

#[derive(Debug, Deserialize)]
struct GeometryQuery {
    shape: String,
    d_rel: f64,
    #[serde(rename = "D_rel")]
    big_d_rel: f64,
}

async fn geometry_svg(query: Result<Query<GeometryQuery>, QueryRejection>) -> Result<Response, ApiError> {
    let Query(q) = query?;
    let shape = parse_shape(&q.shape)?;
    let svg = geometry::cell_svg(shape, q.d_rel, q.big_d_rel)?;
    Ok(([(header::CONTENT_TYPE, "image/svg+xml")], svg).into_response())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeInfo {
    pub name: VoidShape,
    pub models_available: bool,
}

async fn shapes(State(state): State<Arc<AppState>>) -> Json<Vec<ShapeInfo>> {
    Json(
        VoidShape::ALL
            .iter()
            .map(|&name| ShapeInfo {
                name,
                models_available: state.models.contains_key(&name),
            })
            .collect(),
    )
}

async fn healthz() -> Json<serde_json::Value> {
    Json(serde_json::json!({ "status": "ok" }))
}

pub fn router(state: Arc<AppState>) -> Router {
    let static_dir = state.config.static_dir.clone();
    let api = Router::new()
        .route("/api/predict", post(predict))
        .route("/api/inverse", post(inverse))
        .route("/api/geometry", get(geometry_svg))
        .route("/api/shapes", get(shapes))
        .route("/healthz", get(healthz))
        .with_state(state);
    let app = match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    };
    app.layer(CorsLayer::permissive())
}

/// Bind and serve until Ctrl-C.
pub async fn serve(config: ServiceConfig, addr: SocketAddr) -> std::io::Result<()> {
    let state = Arc::new(AppState::load(config));
    log::info!("models loaded for {:?}", state.loaded_shapes());
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
