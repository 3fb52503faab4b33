use std::sync::{Arc, OnceLock};

use super::*;
use crate::corpus::generate_synthetic_corpus;
use crate::measure::measure_view;
use crate::parsers::stroke_to_uv;
use crate::render::project_strip_point;
use crate::schema::Attribute;
use crate::uv::{texel_of, StripId};

fn corpus() -> Arc<MultimodalIndex> {
    static C: OnceLock<Arc<MultimodalIndex>> = OnceLock::new();
    C.get_or_init(|| Arc::new(generate_synthetic_corpus(1, 64).unwrap())).clone()
}

fn session_with(attr: Attribute, value: &str) -> EditSession {
    let c = corpus();
    let e = c.entries().iter().find(|e| e.annotation.get(attr) == value).unwrap().id;
    EditSession::from_entry("t", c, e).unwrap()
}

fn measure_at(s: &EditSession, yaw: f64) -> GarmentMeasurement {
    measure_view(s.latent(), s.pose(), &CameraView::at_yaw(yaw), s.shape()).unwrap()
}

/// Image-space stroke through strip surface samples `(t, angle)`, as drawn on
/// the session's current view.
fn physical_stroke(s: &EditSession, strip: StripId, samples: &[(f64, f64)]) -> SketchStroke {
    let pts = samples
        .iter()
        .map(|(t, a)| project_strip_point(s.pose(), s.shape(), s.view(), s.render_size(), strip, *t, *a).unwrap())
        .collect();
    SketchStroke::image(pts)
}

#[test]
fn long_sleeves_edit_is_local_and_measurable() {
    let mut s = session_with(Attribute::SleeveLength, "short");
    let before = s.latent().clone();
    let (_, r0) = s.last_render();
    let out = s.edit_text("long sleeves").unwrap();
    assert_eq!(s.measure().unwrap().sleeve_class, "long");
    let arm = s.index().masks().part(BodyPartId::Arm).clone();
    for (r, c) in arm.complement().iter() {
        assert_eq!(s.latent().texel(r, c), before.texel(r, c));
    }
    let (h, w) = (arm.height(), arm.width());
    for i in 0..r0.width * r0.height {
        let (a, b) = (r0.coords.valid[i], out.render.coords.valid[i]);
        assert_eq!(a, b);
        if a {
            let (tr, tc) = texel_of(r0.coords.uv[i], h, w);
            if !arm.get(tr, tc) {
                assert_eq!(r0.color.pixels[i], out.render.color.pixels[i]);
            }
        }
    }
    assert_eq!(out.diagnostics.operation, "edit-text");
}

#[test]
fn failed_edits_leave_the_session_untouched() {
    let mut s = session_with(Attribute::SleeveLength, "short");
    let (id0, r0) = s.last_render();
    let z0 = s.latent().clone();
    assert_eq!(s.edit_text("xyzzy").unwrap_err().code(), "unparseable-command");
    let off = SketchStroke::image(vec![[0.01, 0.01], [0.05, 0.02]]);
    assert_eq!(s.edit_sketch(&[off], SketchEditOptions::default()).unwrap_err().code(), "off-body");
    assert!(s.set_pose_view_shape(None, Some(CameraView::at_yaw(400.0)), None).is_err());
    assert_eq!(s.latent(), &z0);
    assert_eq!(s.history_len(), 0);
    assert_eq!(s.last_render().0, id0);
    assert_eq!(s.last_render().1.color_hash(), r0.color_hash());
}

#[test]
fn undo_restores_bit_exactly() {
    let mut s = session_with(Attribute::SleeveLength, "short");
    assert_eq!(s.undo().unwrap_err().code(), "nothing-to-undo");
    let z0 = s.latent().clone();
    s.edit_text("long sleeves").unwrap();
    let z1 = s.latent().clone();
    s.edit_text("boots").unwrap();
    s.undo().unwrap();
    assert_eq!(s.latent(), &z1);
    s.undo().unwrap();
    assert_eq!(s.latent(), &z0);
    assert_eq!(s.undo().unwrap_err().code(), "nothing-to-undo");
}

#[test]
fn history_is_bounded() {
    let mut s = session_with(Attribute::SleeveLength, "short");
    for i in 0..(HISTORY_DEPTH + 5) {
        s.generate_random(i as u64).unwrap();
    }
    assert_eq!(s.history_len(), HISTORY_DEPTH);
}

#[test]
fn v_stroke_gives_a_view_consistent_v_neck() {
    let mut s = session_with(Attribute::NecklineShape, "round");
    s.set_pose_view_shape(None, Some(CameraView::at_yaw(20.0)), None).unwrap();
    let rows = s.index().layout().strip(StripId::Neck).rows as f64;
    let samples: Vec<(f64, f64)> = (0..=24)
        .map(|i| {
            let a = -0.7 + 1.4 * i as f64 / 24.0;
            let depth = crate::templates::neckline_depth("v-neck", a).unwrap();
            (depth / rows * (rows / 24.0), a)
        })
        .collect();
    let stroke = physical_stroke(&s, StripId::Neck, &samples);
    let out = s.edit_sketch(&[stroke], SketchEditOptions::default()).unwrap();
    assert_eq!(out.diagnostics.neckline_class, Some("v-neck"));
    for yaw in [0.0, 180.0] {
        assert_eq!(measure_at(&s, yaw).neckline, Some("v-neck"), "yaw {yaw}");
    }
}

#[test]
fn length_cut_extends_sleeves_to_the_cut() {
    let mut s = session_with(Attribute::SleeveLength, "short");
    let layout = s.index().layout().clone();
    let samples: Vec<(f64, f64)> = (0..=16).map(|i| (40.0 / 72.0, -0.9 + 1.8 * i as f64 / 16.0)).collect();
    let stroke = physical_stroke(&s, StripId::ArmLeft, &samples);
    let uv = stroke_to_uv(&stroke, &layout, Some(&s.last_render().1)).unwrap();
    let mut rows: Vec<f64> = uv.iter().map(|p| p[0]).collect();
    rows.sort_by(f64::total_cmp);
    let cut = rows[rows.len() / 2] - layout.strip(StripId::ArmLeft).row0 as f64;
    let out = s.edit_sketch(&[stroke], SketchEditOptions::default()).unwrap();
    assert_eq!(out.diagnostics.sketch_type, Some(SketchType::LengthCut));
    for yaw in [0.0, 90.0, 180.0] {
        let m = measure_at(&s, yaw);
        assert!((m.sleeve_rows as f64 - cut).abs() <= 2.0, "yaw {yaw}: {} vs {cut}", m.sleeve_rows);
    }
}

#[test]
fn style_transfer_copies_the_reference_inside_the_mask() {
    let c = corpus();
    let mut s = session_with(Attribute::NecklineShape, "round");
    let src = s.latent().clone();
    let r = c.entries().iter().find(|e| e.annotation.get(Attribute::NecklineShape) == "square").unwrap();
    let empty = s.edit_style_transfer(&Reference::Entry(r.id), &[], ParseOptions::default()).unwrap();
    assert_eq!(empty.diagnostics.edit_mask_texels, 0);
    assert_eq!(s.latent(), &src);

    let rows = c.layout().strip(StripId::Neck).rows as f64;
    let samples: Vec<(f64, f64)> = (0..=20)
        .map(|i| {
            let a = -0.45 + 0.9 * i as f64 / 20.0;
            let d = crate::templates::neckline_depth("square", a).unwrap() - 0.5;
            (d / rows * (rows / 24.0), a)
        })
        .collect();
    let pts = samples
        .iter()
        .map(|(t, a)| {
            project_strip_point(&BodyPose::canonical(), &ShapeParams::default(), &CameraView::default(), (512, 512), StripId::Neck, *t, *a)
                .unwrap()
        })
        .collect();
    s.edit_style_transfer(&Reference::Entry(r.id), &[SketchStroke::image(pts)], ParseOptions::default()).unwrap();
    let neck = c.masks().part(BodyPartId::Neck);
    for (row, col) in c.masks().foreground().iter() {
        let want = if neck.get(row, col) { r.latent.texel(row, col) } else { src.texel(row, col) };
        assert_eq!(s.latent().texel(row, col), want);
    }
    assert_eq!(measure_at(&s, 180.0).neckline, Some("square"));
    assert_eq!(
        s.edit_style_transfer(&Reference::Entry(9999), &[], ParseOptions::default()).unwrap_err().code(),
        "not-found"
    );
}

#[test]
fn params_update_render_only() {
    let mut s = session_with(Attribute::SleeveLength, "medium");
    let z = s.latent().clone();
    let (_, r0) = s.last_render();
    let same = s.set_pose_view_shape(None, None, None).unwrap();
    assert_eq!(same.render.color_hash(), r0.color_hash());
    let left = s.set_pose_view_shape(None, Some(CameraView::at_yaw(90.0)), None).unwrap();
    let right = s.set_pose_view_shape(None, Some(CameraView::at_yaw(-90.0)), None).unwrap();
    let (ml, mr) = (measure_render(&left.render, s.index().layout()), measure_render(&right.render, s.index().layout()));
    assert!((ml.sleeve_rows as i64 - mr.sleeve_rows as i64).abs() <= 2);
    assert!((ml.lower_rows as i64 - mr.lower_rows as i64).abs() <= 2);
    assert_eq!(s.latent(), &z);
    assert_eq!(s.history_len(), 0);
}

#[test]
fn strokes_bind_to_the_render_they_were_drawn_on() {
    let mut s = session_with(Attribute::SleeveLength, "short");
    let (front_id, _) = s.last_render();
    let t = 40.0 / s.index().layout().strip(StripId::ArmLeft).rows as f64;
    let samples: Vec<(f64, f64)> = (0..=16).map(|i| (t, -0.9 + 1.8 * i as f64 / 16.0)).collect();
    let stroke = physical_stroke(&s, StripId::ArmLeft, &samples);
    s.set_pose_view_shape(None, Some(CameraView::at_yaw(120.0)), None).unwrap();
    let opts = SketchEditOptions {
        render_id: Some(front_id),
        ..SketchEditOptions::default()
    };
    let out = s.edit_sketch(&[stroke.clone()], opts).unwrap();
    assert_eq!(out.diagnostics.sketch_type, Some(SketchType::LengthCut));
    let missing = SketchEditOptions {
        render_id: Some(10_000),
        ..SketchEditOptions::default()
    };
    assert_eq!(s.edit_sketch(&[stroke], missing).unwrap_err().code(), "not-found");
}

#[test]
fn export_sweeps_frames() {
    let mut s = session_with(Attribute::SleeveLength, "short");
    s.set_render_size((64, 64));
    let frames = s.export_frames(4, 360.0).unwrap();
    assert_eq!(frames.len(), 4);
    assert_ne!(frames[0], frames[1]);
    assert!(s.export_frames(0, 10.0).is_err());
}
