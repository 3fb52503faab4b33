use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_JOINT_DEG: f64 = 150.0;

/// Joint angles in degrees. All zeros is the canonical A-pose.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BodyPose {
    pub label: String,
    pub shoulder_l: f64,
    pub shoulder_r: f64,
    pub elbow_l: f64,
    pub elbow_r: f64,
    pub hip_l: f64,
    pub hip_r: f64,
    pub knee_l: f64,
    pub knee_r: f64,
    pub spine: f64,
}

impl BodyPose {
    pub fn canonical() -> Self {
        Self {
            label: "a-pose".into(),
            ..Default::default()
        }
    }

    fn angles(&self) -> [(&'static str, f64); 9] {
        [
            ("shoulder_l", self.shoulder_l),
            ("shoulder_r", self.shoulder_r),
            ("elbow_l", self.elbow_l),
            ("elbow_r", self.elbow_r),
            ("hip_l", self.hip_l),
            ("hip_r", self.hip_r),
            ("knee_l", self.knee_l),
            ("knee_r", self.knee_r),
            ("spine", self.spine),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in self.angles() {
            if !v.is_finite() || v.abs() > MAX_JOINT_DEG {
                return Err(Error::invalid(format!("{name} = {v} is outside +-{MAX_JOINT_DEG} degrees")));
            }
        }
        Ok(())
    }

    /// Named poses offered by the pose corpus.
    pub fn corpus() -> Vec<BodyPose> {
        let named = |label: &str| BodyPose {
            label: label.into(),
            ..Default::default()
        };
        vec![
            BodyPose::canonical(),
            BodyPose {
                shoulder_l: 50.0,
                shoulder_r: 50.0,
                ..named("t-pose")
            },
            BodyPose {
                shoulder_l: 10.0,
                shoulder_r: -5.0,
                elbow_l: 20.0,
                elbow_r: 15.0,
                hip_l: 20.0,
                hip_r: -15.0,
                knee_l: 10.0,
                knee_r: 25.0,
                ..named("walk")
            },
            BodyPose {
                shoulder_r: 100.0,
                elbow_r: 60.0,
                ..named("wave")
            },
            BodyPose {
                spine: 30.0,
                shoulder_l: 15.0,
                shoulder_r: 15.0,
                ..named("twist")
            },
        ]
    }

    pub fn from_corpus(label: &str) -> Option<BodyPose> {
        Self::corpus().into_iter().find(|p| p.label == label)
    }
}

/// Orthographic camera orbiting the body.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CameraView {
    /// Degrees; 0 looks at the front of the body.
    pub yaw: f64,
    /// Degrees; positive looks down from above.
    pub pitch: f64,
    /// Zoom multiplier on the default framing.
    pub scale: f64,
}

impl Default for CameraView {
    fn default() -> Self {
        Self {
            yaw: 0.0,
            pitch: 0.0,
            scale: 1.0,
        }
    }
}

impl CameraView {
    pub fn at_yaw(yaw: f64) -> Self {
        Self { yaw, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(-180.0..=180.0).contains(&self.yaw) {
            return Err(Error::invalid(format!("yaw {} outside [-180, 180]", self.yaw)));
        }
        if !(-45.0..=45.0).contains(&self.pitch) {
            return Err(Error::invalid(format!("pitch {} outside [-45, 45]", self.pitch)));
        }
        if !(self.scale.is_finite() && self.scale > 0.05 && self.scale <= 20.0) {
            return Err(Error::invalid(format!("camera scale {} outside (0.05, 20]", self.scale)));
        }
        Ok(())
    }
}

/// Body proportions, each a multiplier in `[0.7, 1.3]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ShapeParams {
    pub height: f64,
    pub limb_width: f64,
    pub torso_width: f64,
}

impl Default for ShapeParams {
    fn default() -> Self {
        Self {
            height: 1.0,
            limb_width: 1.0,
            torso_width: 1.0,
        }
    }
}

impl ShapeParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("height", self.height),
            ("limb_width", self.limb_width),
            ("torso_width", self.torso_width),
        ] {
            if !(0.7..=1.3).contains(&v) {
                return Err(Error::invalid(format!("shape {name} = {v} outside [0.7, 1.3]")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_are_enforced() {
        assert!(BodyPose::canonical().validate().is_ok());
        let bad = BodyPose {
            elbow_l: 151.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        assert!(CameraView::at_yaw(180.0).validate().is_ok());
        assert!(CameraView::at_yaw(181.0).validate().is_err());
        assert!(CameraView { pitch: 46.0, ..Default::default() }.validate().is_err());
        assert!(ShapeParams { height: 1.31, ..Default::default() }.validate().is_err());
        for p in BodyPose::corpus() {
            p.validate().unwrap();
        }
    }
}
