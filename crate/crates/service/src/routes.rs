use std::collections::HashMap;
use std::sync::Arc;

use axum::body::{Body, Bytes};
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use seabedkit_core::particles::SpillConfig;
use seabedkit_core::products::{self, canonical_float, ProductError, SpillSimulation};
use seabedkit_core::volume::Axis;
use seabedkit_core::Dataset64;
use tower_http::cors::CorsLayer;
use tower_http::services::ServeDir;

use crate::config::ServiceConfig;
use crate::state::{AppState, Cached};

pub(crate) const GLB: &str = "model/gltf-binary";
pub(crate) const PNG: &str = "image/png";
const JSON: &str = "application/json";
const OCTETS: &str = "application/octet-stream";
pub const GEO_EXTENT_HEADER: &str = "x-geo-extent";

type Params = Query<HashMap<String, String>>;

fn error(status: StatusCode, message: impl Into<String>) -> Response {
    let body = serde_json::to_vec(&serde_json::json!({ "error": message.into() })).expect("error body");
    (status, [(header::CONTENT_TYPE, JSON)], body).into_response()
}

fn product_error(e: ProductError) -> Response {
    let status = match &e {
        ProductError::NotFound(_) => StatusCode::NOT_FOUND,
        ProductError::BadRequest(_) => StatusCode::BAD_REQUEST,
        ProductError::OutOfRange(_) => StatusCode::RANGE_NOT_SATISFIABLE,
        ProductError::Empty(_) => StatusCode::UNPROCESSABLE_ENTITY,
    };
    error(status, e.to_string())
}

/// JSON with every non-ASCII character escaped, so it fits in a header value.
fn ascii_json(s: &str) -> String {
    s.chars()
        .flat_map(|c| {
            if c.is_ascii() {
                vec![c.to_string()]
            } else {
                let mut buf = [0u16; 2];
                c.encode_utf16(&mut buf).iter().map(|u| format!("\\u{u:04x}")).collect()
            }
        })
        .collect()
}

fn respond(c: Cached) -> Response {
    let mut res = Response::new(Body::from(Bytes::from(c.body.as_ref().clone())));
    res.headers_mut()
        .insert(header::CONTENT_TYPE, HeaderValue::from_static(c.content_type));
    if let Some(extent) = c.geo_extent {
        if let Ok(v) = HeaderValue::from_str(&ascii_json(&extent)) {
            res.headers_mut().insert(GEO_EXTENT_HEADER, v);
        }
    }
    res
}

fn dataset(state: &AppState) -> Result<Arc<Dataset64>, Response> {
    state
        .loaded()
        .map(|(ds, _)| ds)
        .map_err(|m| error(StatusCode::SERVICE_UNAVAILABLE, m))
}

/// Serves `key` from the cache, computing it on a blocking thread on a miss.
async fn memoized<F>(state: AppState, key: String, compute: F) -> Response
where
    F: FnOnce(&Dataset64) -> Result<Cached, ProductError> + Send + 'static,
{
    let ds = match dataset(&state) {
        Ok(ds) => ds,
        Err(r) => return r,
    };
    if let Some(hit) = state.cache_get(&key) {
        return respond(hit);
    }
    let result = tokio::task::spawn_blocking(move || compute(&ds)).await.expect("product task");
    match result {
        Ok(c) => {
            state.cache_put(key, c.clone());
            respond(c)
        }
        Err(e) => product_error(e),
    }
}

fn glb(body: Vec<u8>) -> Cached {
    Cached { content_type: GLB, body: Arc::new(body), geo_extent: None }
}

fn param<'a>(q: &'a HashMap<String, String>, name: &str) -> Result<&'a str, Response> {
    q.get(name)
        .map(String::as_str)
        .ok_or_else(|| error(StatusCode::BAD_REQUEST, format!("missing query parameter {name:?}")))
}

async fn get_dataset(State(state): State<AppState>) -> Response {
    match state.loaded() {
        Ok((_, summary)) => respond(Cached { content_type: JSON, body: summary, geo_extent: None }),
        Err(m) => error(StatusCode::SERVICE_UNAVAILABLE, m),
    }
}

async fn get_isosurface(State(state): State<AppState>, Query(q): Params) -> Response {
    let field = match param(&q, "field") {
        Ok(f) => f.to_string(),
        Err(r) => return r,
    };
    let raw = match param(&q, "iso") {
        Ok(v) => v,
        Err(r) => return r,
    };
    let (iso, canon) = match canonical_float(raw) {
        Ok(v) => v,
        Err(e) => return product_error(e),
    };
    let key = format!("isosurface|{field}|{canon}");
    memoized(state, key, move |ds| products::isosurface_glb(ds, &field, iso).map(glb)).await
}

async fn get_slice(State(state): State<AppState>, Query(q): Params) -> Response {
    let (field, axis, coord) = match (param(&q, "field"), param(&q, "axis"), param(&q, "coord")) {
        (Ok(f), Ok(a), Ok(c)) => (f.to_string(), a, c),
        (Err(r), _, _) | (_, Err(r), _) | (_, _, Err(r)) => return r,
    };
    let axis: Axis = match axis.parse() {
        Ok(a) => a,
        Err(e) => return error(StatusCode::BAD_REQUEST, format!("{e}")),
    };
    let (coord, canon) = match canonical_float(coord) {
        Ok(v) => v,
        Err(e) => return product_error(e),
    };
    let key = format!("slice|{field}|{axis}|{canon}");
    memoized(state, key, move |ds| {
        products::slice_png(ds, &field, axis, coord).map(|s| Cached {
            content_type: PNG,
            body: Arc::new(s.png),
            geo_extent: Some(s.extent_json),
        })
    })
    .await
}

async fn get_fence(State(state): State<AppState>, Path(line): Path<String>) -> Response {
    let key = format!("fence|{line}");
    memoized(state, key, move |ds| products::fence_glb(ds, &line).map(glb)).await
}

async fn get_horizon(State(state): State<AppState>, Path(stratum): Path<String>) -> Response {
    let key = format!("horizon|{stratum}");
    memoized(state, key, move |ds| products::horizon_glb(ds, &stratum).map(glb)).await
}

async fn get_horizons(State(state): State<AppState>) -> Response {
    memoized(state, "horizons".into(), |ds| products::horizons_glb(ds).map(glb)).await
}

async fn get_terrain(State(state): State<AppState>) -> Response {
    memoized(state, "terrain".into(), |ds| products::terrain_glb(ds).map(glb)).await
}

fn parse_index(q: &HashMap<String, String>, name: &str, default: i64) -> Result<i64, Response> {
    match q.get(name) {
        None => Ok(default),
        Some(raw) => raw
            .trim()
            .parse::<i64>()
            .map_err(|_| error(StatusCode::BAD_REQUEST, format!("{name} must be an integer"))),
    }
}

async fn get_spill_frames(State(state): State<AppState>, Query(q): Params) -> Response {
    let ds = match dataset(&state) {
        Ok(ds) => ds,
        Err(r) => return r,
    };
    let (from, count) = match (parse_index(&q, "from", 0), parse_index(&q, "count", 1)) {
        (Ok(f), Ok(c)) => (f, c),
        (Err(r), _) | (_, Err(r)) => return r,
    };
    if from < 0 {
        return error(StatusCode::RANGE_NOT_SATISFIABLE, "from must be non-negative");
    }
    if count < 0 {
        return error(StatusCode::BAD_REQUEST, "count must be non-negative");
    }
    let result = tokio::task::spawn_blocking(move || {
        let mut guard = state.spill().lock().unwrap();
        match guard.as_mut() {
            Some(sim) => sim.frames(&ds, from as u64, count as u64),
            None => Err(ProductError::NotFound("no spill configuration".into())),
        }
    })
    .await
    .expect("spill task");
    match result {
        Ok(body) => respond(Cached { content_type: OCTETS, body: Arc::new(body), geo_extent: None }),
        Err(e) => product_error(e),
    }
}

async fn get_spill_config(State(state): State<AppState>) -> Response {
    if let Err(r) = dataset(&state) {
        return r;
    }
    match state.spill_config() {
        Some(c) => (
            [(header::CONTENT_TYPE, JSON)],
            serde_json::to_vec(&c).expect("config serializes"),
        )
            .into_response(),
        None => error(StatusCode::NOT_FOUND, "no spill configuration"),
    }
}

async fn post_spill_config(State(state): State<AppState>, body: Bytes) -> Response {
    if let Err(r) = dataset(&state) {
        return r;
    }
    let config: SpillConfig<f64> = match serde_json::from_slice(&body) {
        Ok(c) => c,
        Err(e) => return error(StatusCode::BAD_REQUEST, format!("invalid spill config: {e}")),
    };
    match SpillSimulation::new(config) {
        Ok(sim) => {
            *state.spill().lock().unwrap() = Some(sim);
            StatusCode::NO_CONTENT.into_response()
        }
        Err(e) => product_error(e),
    }
}

/// All `/api/v1` routes, plus the viewer bundle when configured.
pub fn router(state: AppState, config: &ServiceConfig) -> Router {
    let api = Router::new()
        .route("/dataset", get(get_dataset))
        .route("/isosurface", get(get_isosurface))
        .route("/slice", get(get_slice))
        .route("/fence/{line}", get(get_fence))
        .route("/horizons", get(get_horizons))
        .route("/horizons/{stratum}", get(get_horizon))
        .route("/terrain", get(get_terrain))
        .route("/spill/frames", get(get_spill_frames))
        .route("/spill/config", get(get_spill_config).post(post_spill_config));
    let mut app = Router::new().nest("/api/v1", api).with_state(state);
    if let Some(dir) = &config.static_dir {
        app = app.fallback_service(ServeDir::new(dir));
    }
    if config.cors {
        app = app.layer(CorsLayer::permissive());
    }
    app
}
