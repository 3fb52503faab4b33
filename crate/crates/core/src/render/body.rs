use nalgebra::{Rotation3, Unit, Vector3};

use super::params::{BodyPose, ShapeParams};
use crate::uv::StripId;

pub type Vec3 = Vector3<f64>;

/// One rigid body segment: a capsule carrying a span of one UV strip.
///
/// `front` and `side` are unit vectors orthogonal to the axis; the surface
/// angle is measured from `front` towards `side`.
#[derive(Clone, Debug, PartialEq)]
pub struct Capsule {
    /// Upper (strip row 0) end.
    pub a: Vec3,
    pub b: Vec3,
    pub radius: f64,
    pub front: Vec3,
    pub side: Vec3,
    pub strip: StripId,
    /// Fraction of the strip's rows covered, along `a -> b`.
    pub span: (f64, f64),
}

impl Capsule {
    pub fn axis(&self) -> Vec3 {
        (self.b - self.a).normalize()
    }

    pub fn length(&self) -> f64 {
        (self.b - self.a).norm()
    }

    /// Surface point for a strip-local axial fraction `t` and angle. Caps
    /// carry the end rows only, so every row lies on the cylinder. Used by
    /// tests to place physical strokes on the body.
    pub fn surface_point(&self, t_strip: f64, angle: f64) -> Vec3 {
        let (s0, s1) = self.span;
        let t = ((t_strip - s0) / (s1 - s0)).clamp(0.0, 1.0);
        let radial = self.front * angle.cos() + self.side * angle.sin();
        self.a + self.axis() * (t * self.length()) + radial * self.radius
    }

    fn transformed(&self, rot: &Rotation3<f64>, pivot: &Vec3) -> Capsule {
        Capsule {
            a: pivot + rot * (self.a - pivot),
            b: pivot + rot * (self.b - pivot),
            front: rot * self.front,
            side: rot * self.side,
            ..self.clone()
        }
    }
}

fn frame(axis: Vec3, front_hint: Vec3, side_hint: Vec3) -> (Vec3, Vec3) {
    let front = (front_hint - axis * axis.dot(&front_hint)).normalize();
    let side = side_hint - axis * axis.dot(&side_hint);
    let side = (side - front * front.dot(&side)).normalize();
    (front, side)
}

fn segment(a: Vec3, b: Vec3, radius: f64, strip: StripId, span: (f64, f64)) -> Capsule {
    let axis = (b - a).normalize();
    let (front_hint, side_hint) = if axis.z.abs() > 0.9 {
        (Vec3::y(), Vec3::x())
    } else {
        (Vec3::z(), Vec3::x())
    };
    let (front, side) = frame(axis, front_hint, side_hint);
    Capsule {
        a,
        b,
        radius,
        front,
        side,
        strip,
        span,
    }
}

fn rot(axis: Vec3, deg: f64) -> Rotation3<f64> {
    Rotation3::from_axis_angle(&Unit::new_normalize(axis), deg.to_radians())
}

const ARM_DROP_DEG: f64 = 35.0;

/// Posed capsule body in world units, pelvis at the origin, facing +z.
/// The character's left side is +x.
pub fn build_body(pose: &BodyPose, shape: &ShapeParams) -> Vec<Capsule> {
    let tw = shape.torso_width;
    let lw = shape.limb_width;
    let mut parts = Vec::with_capacity(14);

    parts.push(segment(Vec3::new(0.0, 0.98, 0.0), Vec3::new(0.0, 0.92, 0.0), 0.11, StripId::Head, (0.0, 1.0)));
    parts.push(segment(Vec3::new(0.0, 0.78, 0.0), Vec3::new(0.0, 0.58, 0.0), 0.09, StripId::Neck, (0.0, 1.0)));
    parts.push(segment(Vec3::new(0.0, 0.42, 0.0), Vec3::new(0.0, 0.10, 0.0), 0.16 * tw, StripId::Torso, (0.0, 1.0)));

    for (sign, strip, shoulder_deg, elbow_deg) in [
        (1.0, StripId::ArmLeft, pose.shoulder_l, pose.elbow_l),
        (-1.0, StripId::ArmRight, pose.shoulder_r, pose.elbow_r),
    ] {
        let shoulder = Vec3::new(sign * 0.21 * tw, 0.50, 0.0);
        let drop = ARM_DROP_DEG.to_radians();
        let rest = Vec3::new(sign * drop.sin(), -drop.cos(), 0.0);
        let raise = rot(Vec3::z(), sign * shoulder_deg);
        let upper_dir = raise * rest;
        let elbow = shoulder + upper_dir * 0.30;
        let flex_axis = upper_dir.cross(&Vec3::z());
        let fore_dir = rot(flex_axis, elbow_deg) * upper_dir;
        let wrist = elbow + fore_dir * 0.28;

        // Frames come from the rest pose and follow the joint rotations.
        let upper_rest = segment(shoulder, shoulder + rest * 0.30, 0.05 * lw, strip, (0.0, 0.5));
        let upper = upper_rest.transformed(&raise, &shoulder);
        let fore_rest = segment(shoulder + rest * 0.30, shoulder + rest * 0.58, 0.045 * lw, strip, (0.5, 1.0));
        let flex = rot(flex_axis, elbow_deg) * raise;
        let mut fore = fore_rest.transformed(&flex, &shoulder);
        fore.a = elbow;
        fore.b = wrist;
        parts.push(upper);
        parts.push(fore);
    }

    // Spine twist turns everything above the pelvis.
    let twist = rot(Vec3::y(), pose.spine);
    let origin = Vec3::zeros();
    for c in parts.iter_mut() {
        *c = c.transformed(&twist, &origin);
    }

    for (sign, leg, foot, hip_deg, knee_deg) in [
        (1.0, StripId::LegLeft, StripId::FootLeft, pose.hip_l, pose.knee_l),
        (-1.0, StripId::LegRight, StripId::FootRight, pose.hip_r, pose.knee_r),
    ] {
        let hip = Vec3::new(sign * 0.09 * tw, 0.0, 0.0);
        let knee_rest = hip + Vec3::new(sign * 0.01, -0.42, 0.0);
        let ankle_rest = knee_rest + Vec3::new(sign * 0.01, -0.38, 0.0);
        let heel_rest = ankle_rest + Vec3::new(0.0, -0.09, -0.02);
        let toe_rest = heel_rest + Vec3::new(0.0, 0.0, 0.14);

        let swing = rot(Vec3::x(), -hip_deg);
        let knee = hip + swing * (knee_rest - hip);
        let bend = rot(Vec3::x(), knee_deg);
        let lower = swing * bend;

        let thigh = segment(hip, knee_rest, 0.075 * lw, leg, (0.0, 0.5)).transformed(&swing, &hip);
        let mut shin = segment(knee_rest, ankle_rest, 0.06 * lw, leg, (0.5, 1.0)).transformed(&lower, &knee_rest);
        let shift = knee - knee_rest;
        shin.a += shift;
        shin.b += shift;
        let mut foot_c = segment(heel_rest, toe_rest, 0.04 * lw, foot, (0.0, 1.0)).transformed(&lower, &knee_rest);
        foot_c.a += shift;
        foot_c.b += shift;
        parts.push(thigh);
        parts.push(shin);
        parts.push(foot_c);
    }

    let s = shape.height;
    for c in parts.iter_mut() {
        c.a *= s;
        c.b *= s;
        c.radius *= s;
    }
    parts
}

/// Ray `origin + t * (0, 0, -1)` against a capsule; nearest positive `t`.
pub fn intersect_down_z(origin: &Vec3, cap: &Capsule) -> Option<f64> {
    let rd = Vec3::new(0.0, 0.0, -1.0);
    let ba = cap.b - cap.a;
    let oa = origin - cap.a;
    let baba = ba.dot(&ba);
    let bard = ba.dot(&rd);
    let baoa = ba.dot(&oa);
    let rdoa = rd.dot(&oa);
    let oaoa = oa.dot(&oa);
    let r2 = cap.radius * cap.radius;
    let sphere = |center: &Vec3| -> Option<f64> {
        let oc = origin - center;
        let b = rd.dot(&oc);
        let c = oc.dot(&oc) - r2;
        let h = b * b - c;
        (h >= 0.0).then(|| -b - h.sqrt())
    };
    let a = baba - bard * bard;
    if a < 1e-12 * baba {
        // Viewed end-on: only the caps can be hit first.
        return match (sphere(&cap.a), sphere(&cap.b)) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        };
    }
    let b = baba * rdoa - baoa * bard;
    let c = baba * oaoa - baoa * baoa - r2 * baba;
    let h = b * b - a * c;
    if h < 0.0 {
        return None;
    }
    let t = (-b - h.sqrt()) / a;
    let y = baoa + t * bard;
    if y > 0.0 && y < baba {
        return Some(t);
    }
    sphere(if y <= 0.0 { &cap.a } else { &cap.b })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_body_has_thirteen_segments() {
        let body = build_body(&BodyPose::canonical(), &ShapeParams::default());
        assert_eq!(body.len(), 13);
        for c in &body {
            assert!((c.front.norm() - 1.0).abs() < 1e-12);
            assert!(c.front.dot(&c.axis()).abs() < 1e-9);
            assert!(c.side.dot(&c.axis()).abs() < 1e-9);
            assert!(c.front.dot(&c.side).abs() < 1e-9);
        }
    }

    #[test]
    fn arms_are_mirror_images_in_the_canonical_pose() {
        let body = build_body(&BodyPose::canonical(), &ShapeParams::default());
        let find = |s: StripId, span0: f64| body.iter().find(|c| c.strip == s && c.span.0 == span0).unwrap();
        let flip = |v: Vec3| Vec3::new(-v.x, v.y, v.z);
        for span0 in [0.0, 0.5] {
            let l = find(StripId::ArmLeft, span0);
            let r = find(StripId::ArmRight, span0);
            assert!((flip(l.a) - r.a).norm() < 1e-12);
            assert!((flip(l.front) - r.front).norm() < 1e-12);
            // Mirroring flips the side vector: angle -> -angle.
            assert!((flip(l.side) + r.side).norm() < 1e-12);
        }
    }

    #[test]
    fn ray_hits_front_of_torso() {
        let body = build_body(&BodyPose::canonical(), &ShapeParams::default());
        let torso = body.iter().find(|c| c.strip == StripId::Torso).unwrap();
        let t = intersect_down_z(&Vec3::new(0.0, 0.3, 10.0), torso).unwrap();
        assert!((10.0 - t - 0.16).abs() < 1e-9);
        assert!(intersect_down_z(&Vec3::new(0.5, 0.3, 10.0), torso).is_none());
        // Above the cylinder: the cap.
        let t = intersect_down_z(&Vec3::new(0.0, 0.5, 10.0), torso).unwrap();
        assert!((10.0 - t - (0.16f64.powi(2) - 0.08f64.powi(2)).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn surface_points_lie_on_the_capsule() {
        let body = build_body(&BodyPose::from_corpus("walk").unwrap(), &ShapeParams::default());
        for c in &body {
            for i in 0..=10 {
                let t = c.span.0 + (c.span.1 - c.span.0) * i as f64 / 10.0;
                let p = c.surface_point(t, 0.7);
                let ab = c.b - c.a;
                let h = ((p - c.a).dot(&ab) / ab.dot(&ab)).clamp(0.0, 1.0);
                let dist = (p - (c.a + ab * h)).norm();
                assert!((dist - c.radius).abs() < 1e-9, "{:?}", c.strip);
            }
        }
    }
}
