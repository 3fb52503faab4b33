use super::*;
use crate::error::Result;
use crate::render::{project_strip_point, render, BodyPose, CameraView, ShapeParams};
use crate::templates;
use crate::uv::{BodyPartId, ExpandOptions, Mask, StripId, UvLayout, UvLatent};

fn layout() -> UvLayout {
    UvLayout::standard()
}

fn uv(points: &[[f64; 2]]) -> SketchStroke {
    SketchStroke::uv_texels(&layout(), points)
}

fn parse1(points: &[[f64; 2]]) -> Result<ParsedSketch> {
    parse_sketch(&[uv(points)], &layout(), None, ParseOptions::default())
}

/// Polyline along the lower edge of a neckline template on the front half.
fn neckline_stroke(class: &str) -> Vec<[f64; 2]> {
    let l = layout();
    let s = l.strip(StripId::Neck);
    let k = s.rows as f64 / 24.0;
    let w = s.cols as f64;
    let mut pts = Vec::new();
    let mut d = -w / 4.0 + 0.25;
    while d < w / 4.0 {
        let theta = std::f64::consts::TAU * d / w;
        let depth = templates::neckline_depth(class, theta).unwrap();
        pts.push([s.row0 as f64 + depth * k, s.col0 as f64 + w / 2.0 + d]);
        d += 0.5;
    }
    pts
}

#[test]
fn transversal_forearm_stroke_is_a_length_cut() {
    let (t, p) = classify_stroke(&[[74.0, 7.0], [74.3, 17.0]], &layout()).unwrap();
    assert_eq!((t, p), (SketchType::LengthCut, BodyPartId::Arm));
}

#[test]
fn v_polyline_through_neck_is_a_neckline() {
    let (t, p) = classify_stroke(&[[23.0, 58.0], [38.0, 64.0], [23.0, 70.0]], &layout()).unwrap();
    assert_eq!((t, p), (SketchType::Neckline, BodyPartId::Neck));
}

#[test]
fn closed_loop_on_torso_is_a_closed_area() {
    let loop_pts = [[55.0, 50.0], [55.0, 70.0], [70.0, 70.0], [70.0, 50.0], [55.5, 50.0]];
    let (t, p) = classify_stroke(&loop_pts, &layout()).unwrap();
    assert_eq!((t, p), (SketchType::ClosedArea, BodyPartId::Body));
    let parsed = parse1(&loop_pts).unwrap();
    assert!(parsed.components[0].partial.get(60, 60));
    assert!(!parsed.components[0].partial.get(50, 60));
}

#[test]
fn axial_limb_stroke_is_a_contour() {
    let (t, p) = classify_stroke(&[[22.0, 6.2], [60.0, 6.5]], &layout()).unwrap();
    assert_eq!((t, p), (SketchType::Contour, BodyPartId::Arm));
}

#[test]
fn stroke_far_from_the_body_is_off_body() {
    assert_eq!(parse1(&[[110.0, 5.0], [112.0, 12.0]]).unwrap_err().code(), "off-body");
}

#[test]
fn length_cut_at_forty_percent_covers_both_arms_above_the_line() {
    let l = layout();
    let s = l.strip(StripId::ArmLeft);
    let row = s.row0 as f64 + 0.4 * s.rows as f64;
    let parsed = parse1(&[[row, 7.0], [row, 17.0]]).unwrap();
    assert_eq!(parsed.sketch_type, SketchType::LengthCut);
    let cut = (0.4 * s.rows as f64).floor() as usize + 1;
    let want = Mask::from_fn(l.height(), l.width(), |r, c| {
        [StripId::ArmLeft, StripId::ArmRight].iter().any(|id| {
            let st = l.strip(*id);
            st.contains(r, c) && r - st.row0 < cut
        })
    });
    assert_eq!(parsed.mask_uv, want);
    assert_eq!(parsed.edit_mask, want);
}

#[test]
fn neckline_templates_classify_to_themselves() {
    for class in templates::NECKLINES {
        let parsed = parse1(&neckline_stroke(class)).unwrap();
        assert_eq!(parsed.sketch_type, SketchType::Neckline, "{class}");
        assert_eq!(parsed.neckline_class, Some(class));
        let l = layout();
        assert_eq!(parsed.mask_uv, templates::neckline_coverage(&l, class).unwrap());
        assert_eq!(parsed.edit_mask, l.part_mask(BodyPartId::Neck));
    }
}

#[test]
fn masks_stay_in_the_target_part() {
    let strokes: [&[[f64; 2]]; 3] = [
        &[[74.0, 7.0], [74.3, 17.0]],
        &[[22.0, 6.2], [60.0, 6.5]],
        &[[55.0, 50.0], [55.0, 70.0], [70.0, 70.0], [70.0, 50.0], [55.5, 50.0]],
    ];
    let l = layout();
    for s in strokes {
        let p = parse1(s).unwrap();
        assert!(p.mask_uv.is_subset_of(&l.part_mask(p.target_part)));
        assert!(p.mask_uv.is_subset_of(l.part_masks().foreground()));
    }
}

#[test]
fn disabling_expansion_keeps_the_single_view_mask() {
    let opts = ParseOptions { expand: false, mirror: true };
    let p = parse_sketch(&[uv(&[[74.0, 7.0], [74.3, 17.0]])], &layout(), None, opts).unwrap();
    assert_eq!(p.mask_uv, p.components[0].partial);
    let arm_back = templates::strip_half(&layout(), StripId::ArmLeft, false);
    assert!(p.mask_uv.is_disjoint(&arm_back));
}

#[test]
fn expansion_of_front_left_sleeve_covers_both_arms() {
    let l = layout();
    let partial = templates::strip_half(&l, StripId::ArmLeft, true);
    let full = expand_partial_to_full(&l, &partial, BodyPartId::Arm);
    assert_eq!(full, l.part_mask(BodyPartId::Arm));
    let empty = Mask::new(l.height(), l.width());
    assert_eq!(expand_partial_to_full(&l, &empty, BodyPartId::Arm), empty);
    let arm = l.part_mask(BodyPartId::Arm);
    assert_eq!(expand_partial_to_full(&l, &arm, BodyPartId::Arm), arm);
}

proptest::proptest! {
    #[test]
    fn expansion_is_idempotent_and_monotone(bits in proptest::collection::vec(proptest::bool::weighted(0.05), 128 * 128)) {
        let l = layout();
        let a = Mask::from_bits(128, 128, bits).unwrap().intersection(&l.part_mask(BodyPartId::Leg));
        let b = a.union(&templates::strip_half(&l, StripId::LegRight, true));
        let ea = expand_partial_to_full(&l, &a, BodyPartId::Leg);
        let eb = expand_partial_to_full(&l, &b, BodyPartId::Leg);
        proptest::prop_assert_eq!(&expand_partial_to_full(&l, &ea, BodyPartId::Leg), &ea);
        proptest::prop_assert!(ea.is_subset_of(&eb));
        proptest::prop_assert!(a.is_subset_of(&ea));
        proptest::prop_assert_eq!(l.expand(&ea, ExpandOptions::default()), ea);
    }
}

mod image_space {
    use super::*;

    fn stroke_at(view: &CameraView, strip: StripId, samples: &[(f64, f64)]) -> SketchStroke {
        let pts = samples
            .iter()
            .map(|(t, a)| {
                project_strip_point(&BodyPose::canonical(), &ShapeParams::default(), view, (512, 512), strip, *t, *a)
                    .unwrap()
            })
            .collect();
        SketchStroke::image(pts)
    }

    fn parsed_at(yaw: f64, strip: StripId, samples: &[(f64, f64)]) -> ParsedSketch {
        let view = CameraView::at_yaw(yaw);
        let out = render(&UvLatent::standard_zeros(), &BodyPose::canonical(), &view, &ShapeParams::default(), (512, 512))
            .unwrap();
        parse_sketch(&[stroke_at(&view, strip, samples)], &layout(), Some(&out), ParseOptions::default()).unwrap()
    }

    #[test]
    fn same_physical_stroke_from_two_views_gives_the_same_mask() {
        let cut: Vec<(f64, f64)> = (0..=20).map(|i| (0.6, -0.8 + 1.6 * i as f64 / 20.0)).collect();
        let a = parsed_at(0.0, StripId::ArmLeft, &cut);
        let b = parsed_at(30.0, StripId::ArmLeft, &cut);
        assert_eq!(a.sketch_type, SketchType::LengthCut);
        assert_eq!(b.sketch_type, SketchType::LengthCut);
        assert!(a.mask_uv.symmetric_difference_count(&b.mask_uv) <= 2);
    }

    #[test]
    fn stroke_in_the_background_is_off_body() {
        let out = render(&UvLatent::standard_zeros(), &BodyPose::canonical(), &CameraView::default(), &ShapeParams::default(), (256, 256))
            .unwrap();
        let s = SketchStroke::image(vec![[0.02, 0.02], [0.1, 0.05]]);
        let err = parse_sketch(&[s], &layout(), Some(&out), ParseOptions::default()).unwrap_err();
        assert_eq!(err.code(), "off-body");
    }

    #[test]
    fn image_strokes_need_a_context() {
        let s = SketchStroke::image(vec![[0.5, 0.5], [0.6, 0.5]]);
        assert_eq!(parse_sketch(&[s], &layout(), None, ParseOptions::default()).unwrap_err().code(), "invalid-argument");
    }
}
