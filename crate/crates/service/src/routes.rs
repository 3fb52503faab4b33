use std::sync::Arc;
use std::time::UNIX_EPOCH;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{FromRequest, FromRequestParts, Path, Request, State};
use axum::http::request::Parts;
use axum::http::{header, HeaderValue};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use base64::Engine;
use serde::de::DeserializeOwned;
use serde_json::Value;

use atelier_core::corpus::MultimodalIndex;
use atelier_core::editors::{EditOutcome, EditSession};
use atelier_core::measure::measure_render;
use atelier_core::parsers::{parse_text, ParseMode};
use atelier_core::render::{render, BodyPose, CameraView, RenderOutput, ShapeParams};
use atelier_core::samplers::search_text;
use atelier_core::{BodyPartId, Error, Result};

use crate::bodies::*;
use crate::error::{ApiError, ApiResult};
use crate::script::{apply_step, resolve_pose, ScriptStep};
use crate::state::AppState;

pub const THUMBNAIL_SIZE: (usize, usize) = (128, 128);
pub const DEFAULT_SEARCH_LIMIT: usize = 8;
pub const MAX_SEARCH_LIMIT: usize = 64;
pub const DEFAULT_EXPORT_FRAMES: usize = 36;

/// JSON body whose rejections use the service error shape.
pub struct Body<T>(pub T);

impl<S: Send + Sync, T: DeserializeOwned> FromRequest<S> for Body<T> {
    type Rejection = ApiError;

    async fn from_request(req: Request, state: &S) -> std::result::Result<Self, ApiError> {
        Json::<T>::from_request(req, state)
            .await
            .map(|j| Body(j.0))
            .map_err(|e: JsonRejection| ApiError::bad_request(e.body_text()))
    }
}

/// Query string whose rejections use the service error shape.
pub struct Q<T>(pub T);

impl<S: Send + Sync, T: DeserializeOwned> FromRequestParts<S> for Q<T> {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &S) -> std::result::Result<Self, ApiError> {
        axum::extract::Query::<T>::from_request_parts(parts, state)
            .await
            .map(|q| Q(q.0))
            .map_err(|e: QueryRejection| ApiError::bad_request(e.body_text()))
    }
}

type St = State<Arc<AppState>>;

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/session", post(create_session))
        .route("/session/{id}", get(session_info).delete(delete_session))
        .route("/session/{id}/generate/random", post(generate_random))
        .route("/session/{id}/generate/text", post(generate_text))
        .route("/session/{id}/generate/sketch", post(generate_sketch))
        .route("/session/{id}/edit/text", post(edit_text))
        .route("/session/{id}/edit/sketch", post(edit_sketch))
        .route("/session/{id}/edit/style", post(edit_style))
        .route("/session/{id}/params", post(params))
        .route("/session/{id}/undo", post(undo))
        .route("/session/{id}/render", get(render_view))
        .route("/session/{id}/measure", get(measure))
        .route("/session/{id}/export", get(export))
        .route("/corpus/search", get(search))
        .route("/poses", get(poses))
        .with_state(state)
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T> + Send + 'static) -> ApiResult<T> {
    Ok(tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal(format!("worker failed: {e}")))??)
}

fn reply(id: String, o: &EditOutcome) -> RenderReply {
    RenderReply::new(id, o.render_id, &o.render.color_png(), &o.diagnostics)
}

async fn mutate(
    st: &AppState,
    id: String,
    f: impl FnOnce(&mut EditSession) -> Result<EditOutcome> + Send + 'static,
) -> ApiResult<Json<RenderReply>> {
    let slot = st.get(&id)?;
    Ok(Json(slot.run(move |s| f(s).map(|o| reply(id, &o))).await?))
}

fn pose_by_id(id: &str) -> Result<BodyPose> {
    Ok(resolve_pose(None, Some(id.to_string()))?.expect("pose id given"))
}

async fn create_session(State(st): St, Body(b): Body<CreateSession>) -> ApiResult<Json<RenderReply>> {
    if b.entry_id.is_some() && b.seed.is_some() {
        return Err(ApiError::bad_request("give entry_id or seed, not both"));
    }
    let token = st.new_token();
    let index = st.index().clone();
    let session = blocking(move || match b.entry_id {
        Some(e) => EditSession::from_entry(token, index, e),
        None => EditSession::random(token, index, b.seed.unwrap_or(0)),
    })
    .await?;
    let id = session.id().to_string();
    let (rid, out) = session.last_render();
    let slot = st.insert(session);
    let png = blocking(move || Ok(out.color_png())).await?;
    drop(slot);
    Ok(Json(RenderReply::new(id, rid, &png, &atelier_core::editors::Diagnostics {
        operation: "session",
        ..Default::default()
    })))
}

async fn session_info(State(st): St, Path(id): Path<String>) -> ApiResult<Json<SessionInfo>> {
    let slot = st.get(&id)?;
    let created_unix_ms = slot.created.duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis() as u64);
    let info = slot
        .run(move |s| {
            Ok(SessionInfo {
                session_id: id,
                render_id: s.last_render().0,
                created_unix_ms,
                history: s.history_len(),
                pose: s.pose().clone(),
                view: *s.view(),
                shape: *s.shape(),
            })
        })
        .await?;
    Ok(Json(info))
}

async fn delete_session(State(st): St, Path(id): Path<String>) -> ApiResult<Json<serde_json::Value>> {
    st.get(&id)?;
    st.remove(&id);
    Ok(Json(serde_json::json!({ "deleted": id })))
}

async fn generate_random(State(st): St, Path(id): Path<String>, Body(b): Body<SeedBody>) -> ApiResult<Json<RenderReply>> {
    mutate(&st, id, move |s| s.generate_random(b.seed)).await
}

async fn generate_text(State(st): St, Path(id): Path<String>, Body(b): Body<TextBody>) -> ApiResult<Json<RenderReply>> {
    mutate(&st, id, move |s| s.generate_text(&b.text)).await
}

async fn generate_sketch(State(st): St, Path(id): Path<String>, Body(b): Body<SketchBody>) -> ApiResult<Json<RenderReply>> {
    mutate(&st, id, move |s| s.generate_sketch(&b.strokes, b.options.edit())).await
}

async fn edit_text(State(st): St, Path(id): Path<String>, Body(b): Body<TextBody>) -> ApiResult<Json<RenderReply>> {
    mutate(&st, id, move |s| s.edit_text(&b.text)).await
}

async fn edit_sketch(State(st): St, Path(id): Path<String>, Body(b): Body<SketchBody>) -> ApiResult<Json<RenderReply>> {
    mutate(&st, id, move |s| s.edit_sketch(&b.strokes, b.options.edit())).await
}

async fn edit_style(State(st): St, Path(id): Path<String>, Body(b): Body<Value>) -> ApiResult<Json<RenderReply>> {
    step(&st, id, "edit/style", b).await
}

async fn params(State(st): St, Path(id): Path<String>, Body(b): Body<ParamsBody>) -> ApiResult<Json<RenderReply>> {
    resolve_pose(b.pose.clone(), b.pose_id.clone())?;
    step(&st, id, "params", serde_json::to_value(b).expect("params serialize")).await
}

/// Runs a script step; handlers with plain bodies share the script dispatch.
async fn step(st: &AppState, id: String, op: &'static str, body: Value) -> ApiResult<Json<RenderReply>> {
    let s = ScriptStep { op: op.into(), body };
    mutate(st, id, move |sess| apply_step(sess, &s)).await
}

async fn undo(State(st): St, Path(id): Path<String>) -> ApiResult<Json<RenderReply>> {
    mutate(&st, id, |s| s.undo()).await
}

/// Render at the session state with `q`'s overrides. With no override this is
/// the session's last render, and its id is returned too.
fn view_render(s: &EditSession, q: &ViewQuery) -> Result<(Option<u64>, Arc<RenderOutput>)> {
    if q.yaw.is_none() && q.pitch.is_none() && q.scale.is_none() && q.pose_id.is_none() {
        let (id, out) = s.last_render();
        return Ok((Some(id), out));
    }
    let view = CameraView {
        yaw: q.yaw.unwrap_or(s.view().yaw),
        pitch: q.pitch.unwrap_or(s.view().pitch),
        scale: q.scale.unwrap_or(s.view().scale),
    };
    let pose = q.pose_id.as_deref().map(pose_by_id).transpose()?;
    Ok((None, Arc::new(s.render_with(pose.as_ref(), Some(&view))?)))
}

async fn render_view(State(st): St, Path(id): Path<String>, Q(q): Q<ViewQuery>) -> ApiResult<Response> {
    let json = match q.format.as_deref() {
        None | Some("png") => false,
        Some("json") => true,
        Some(f) => return Err(ApiError::bad_request(format!("unknown format {f:?}"))),
    };
    let seg = match q.layer.as_deref() {
        None | Some("color") => false,
        Some("seg") => true,
        Some(l) => return Err(ApiError::bad_request(format!("unknown layer {l:?}"))),
    };
    let slot = st.get(&id)?;
    let (rid, png) = slot
        .run(move |s| {
            let (rid, out) = view_render(s, &q)?;
            Ok((rid, if seg { out.seg_png() } else { out.color_png() }))
        })
        .await?;
    if json {
        let body = serde_json::json!({
            "session_id": id,
            "render_id": rid,
            "png_base64": base64::engine::general_purpose::STANDARD.encode(&png),
        });
        return Ok(Json(body).into_response());
    }
    let mut resp = ([(header::CONTENT_TYPE, "image/png")], png).into_response();
    if let Some(r) = rid {
        resp.headers_mut().insert("x-render-id", HeaderValue::from(r));
    }
    Ok(resp)
}

async fn measure(State(st): St, Path(id): Path<String>, Q(q): Q<ViewQuery>) -> ApiResult<Json<serde_json::Value>> {
    let slot = st.get(&id)?;
    let m = slot
        .run(move |s| {
            let (_, out) = view_render(s, &q)?;
            let layout = s.index().layout();
            Ok(serde_json::to_value(measure_render(&out, layout)).expect("measurement serializes"))
        })
        .await?;
    Ok(Json(m))
}

/// Tar archive of `frame_NNNN.png` files.
pub fn frames_tar(frames: &[Vec<u8>]) -> std::io::Result<Vec<u8>> {
    let mut tar = tar::Builder::new(Vec::new());
    for (i, png) in frames.iter().enumerate() {
        let mut h = tar::Header::new_gnu();
        h.set_size(png.len() as u64);
        h.set_mode(0o644);
        h.set_mtime(0);
        h.set_cksum();
        tar.append_data(&mut h, format!("frame_{i:04}.png"), png.as_slice())?;
    }
    tar.into_inner()
}

async fn export(State(st): St, Path(id): Path<String>, Q(q): Q<ExportQuery>) -> ApiResult<Response> {
    let slot = st.get(&id)?;
    let frames = q.frames.unwrap_or(DEFAULT_EXPORT_FRAMES);
    let sweep = q.yaw_sweep.unwrap_or(360.0);
    let tar = slot
        .run(move |s| Ok(frames_tar(&s.export_frames(frames, sweep)?)?))
        .await?;
    Ok(([(header::CONTENT_TYPE, "application/x-tar")], tar).into_response())
}

fn search_hits(index: &MultimodalIndex, q: &SearchQuery) -> Result<Vec<SearchHit>> {
    let limit = q.limit.unwrap_or(DEFAULT_SEARCH_LIMIT);
    if !(1..=MAX_SEARCH_LIMIT).contains(&limit) {
        return Err(Error::InvalidArgument(format!("limit {limit} outside 1..={MAX_SEARCH_LIMIT}")));
    }
    let part = q.part.as_deref().map(str::parse::<BodyPartId>).transpose()?;
    let query = parse_text(&q.text, ParseMode::Generation, index.layout())?;
    if query.is_empty() {
        return Err(Error::UnparseableCommand(q.text.clone()));
    }
    search_text(index, &query, part, limit)?
        .into_iter()
        .map(|(id, score)| {
            let e = index.entry(id)?;
            let thumb = render(&e.latent, &BodyPose::canonical(), &CameraView::default(), &ShapeParams::default(), THUMBNAIL_SIZE)?;
            Ok(SearchHit {
                entry_id: id,
                score,
                annotation: e.annotation.iter().map(|(a, v)| (a.name().to_string(), v.to_string())).collect(),
                thumbnail_png_base64: base64::engine::general_purpose::STANDARD.encode(thumb.color_png()),
            })
        })
        .collect()
}

async fn search(State(st): St, Q(q): Q<SearchQuery>) -> ApiResult<Json<Vec<SearchHit>>> {
    let index = st.index().clone();
    Ok(Json(blocking(move || search_hits(&index, &q)).await?))
}

async fn poses() -> Json<Vec<PoseInfo>> {
    Json(BodyPose::corpus().into_iter().map(|p| PoseInfo { id: p.label.clone(), pose: p }).collect())
}
