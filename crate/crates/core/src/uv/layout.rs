use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::mask::Mask;
use crate::error::{Error, Result};

/// The six semantic body parts, with stable codes 0..=5.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
#[repr(u8)]
pub enum BodyPartId {
    Head = 0,
    Neck = 1,
    Body = 2,
    Arm = 3,
    Leg = 4,
    Foot = 5,
}

impl BodyPartId {
    pub const ALL: [BodyPartId; 6] = [
        BodyPartId::Head,
        BodyPartId::Neck,
        BodyPartId::Body,
        BodyPartId::Arm,
        BodyPartId::Leg,
        BodyPartId::Foot,
    ];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.get(code as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            BodyPartId::Head => "head",
            BodyPartId::Neck => "neck",
            BodyPartId::Body => "body",
            BodyPartId::Arm => "arm",
            BodyPartId::Leg => "leg",
            BodyPartId::Foot => "foot",
        }
    }

    /// Arms and legs: parts whose strips run along a limb axis.
    pub fn is_limb(self) -> bool {
        matches!(self, BodyPartId::Arm | BodyPartId::Leg)
    }
}

impl fmt::Display for BodyPartId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BodyPartId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown body part {s:?}")))
    }
}

/// One rectangular patch of the UV layout, wrapped around a body segment.
///
/// Local columns run around the segment (angle), local rows run along its
/// axis, starting at the end nearest the torso top (head: crown).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StripId {
    Head,
    Neck,
    Torso,
    ArmLeft,
    ArmRight,
    LegLeft,
    LegRight,
    FootLeft,
    FootRight,
}

impl StripId {
    pub const ALL: [StripId; 9] = [
        StripId::Head,
        StripId::Neck,
        StripId::Torso,
        StripId::ArmLeft,
        StripId::ArmRight,
        StripId::LegLeft,
        StripId::LegRight,
        StripId::FootLeft,
        StripId::FootRight,
    ];

    pub fn part(self) -> BodyPartId {
        match self {
            StripId::Head => BodyPartId::Head,
            StripId::Neck => BodyPartId::Neck,
            StripId::Torso => BodyPartId::Body,
            StripId::ArmLeft | StripId::ArmRight => BodyPartId::Arm,
            StripId::LegLeft | StripId::LegRight => BodyPartId::Leg,
            StripId::FootLeft | StripId::FootRight => BodyPartId::Foot,
        }
    }

    /// Left/right counterpart for paired limbs.
    pub fn partner(self) -> Option<StripId> {
        match self {
            StripId::ArmLeft => Some(StripId::ArmRight),
            StripId::ArmRight => Some(StripId::ArmLeft),
            StripId::LegLeft => Some(StripId::LegRight),
            StripId::LegRight => Some(StripId::LegLeft),
            StripId::FootLeft => Some(StripId::FootRight),
            StripId::FootRight => Some(StripId::FootLeft),
            _ => None,
        }
    }

    fn index(self) -> usize {
        Self::ALL.iter().position(|s| *s == self).unwrap()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Strip {
    pub id: StripId,
    pub row0: usize,
    pub rows: usize,
    pub col0: usize,
    pub cols: usize,
}

impl Strip {
    pub fn part(&self) -> BodyPartId {
        self.id.part()
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        row >= self.row0 && row < self.row0 + self.rows && col >= self.col0 && col < self.col0 + self.cols
    }

    /// Angle around the segment for a local column, radians in `(-pi, pi)`.
    /// Zero faces the front of the body in the canonical pose.
    pub fn angle_of_col(&self, local_col: usize) -> f64 {
        std::f64::consts::TAU * (local_col as f64 + 0.5) / self.cols as f64 - std::f64::consts::PI
    }

    /// Local column holding the surface point at `angle` (radians).
    pub fn col_of_angle(&self, angle: f64) -> usize {
        let f = (angle + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU) / std::f64::consts::TAU;
        ((f * self.cols as f64) as usize).min(self.cols - 1)
    }

    /// Column of the surface point mirrored through the frontal plane.
    pub fn front_back_col(&self, local_col: usize) -> usize {
        (3 * self.cols / 2 + self.cols - 1 - local_col) % self.cols
    }

    /// Column of the surface point mirrored through the sagittal plane.
    pub fn left_right_col(&self, local_col: usize) -> usize {
        self.cols - 1 - local_col
    }

    /// True when the local column lies on the front half of the segment.
    pub fn is_front_col(&self, local_col: usize) -> bool {
        let q = self.cols / 4;
        local_col >= q && local_col < self.cols - q
    }
}

/// Which body-topology correspondences the partial-to-full expansion applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpandOptions {
    pub front_back: bool,
    pub mirror: bool,
}

impl Default for ExpandOptions {
    fn default() -> Self {
        Self {
            front_back: true,
            mirror: true,
        }
    }
}

// Strip rectangles for a 128x128 grid: (row0, rows, col0, cols).
const BASE: usize = 128;
const STRIP_RECTS: [(StripId, usize, usize, usize, usize); 9] = [
    (StripId::Head, 0, 20, 32, 64),
    (StripId::Neck, 20, 24, 32, 64),
    (StripId::Torso, 44, 40, 32, 64),
    (StripId::ArmLeft, 20, 72, 0, 24),
    (StripId::ArmRight, 20, 72, 104, 24),
    (StripId::LegLeft, 84, 32, 32, 32),
    (StripId::LegRight, 84, 32, 64, 32),
    (StripId::FootLeft, 116, 12, 32, 32),
    (StripId::FootRight, 116, 12, 64, 32),
];

/// Boundary-free body UV layout: nine strips, six parts.
///
/// Head, neck, torso and legs are stacked in one continuous column so
/// neighbouring segments share borders; arms run alongside.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UvLayout {
    height: usize,
    width: usize,
    strips: [Strip; 9],
    owner: Vec<u8>,
}

impl UvLayout {
    pub fn new(height: usize, width: usize) -> Result<Self> {
        if height < 32 || width < 32 {
            return Err(Error::invalid(format!("UV grid {height}x{width} is below the 32x32 minimum")));
        }
        let strips = STRIP_RECTS.map(|(id, r0, rows, c0, cols)| {
            let row0 = r0 * height / BASE;
            let row1 = (r0 + rows) * height / BASE;
            let col0 = c0 * width / BASE;
            let mut col1 = (c0 + cols) * width / BASE;
            // Mirror arithmetic needs an even circumference.
            if (col1 - col0) % 2 == 1 {
                col1 -= 1;
            }
            Strip {
                id,
                row0,
                rows: row1 - row0,
                col0,
                cols: col1 - col0,
            }
        });
        let mut owner = vec![u8::MAX; height * width];
        for (i, s) in strips.iter().enumerate() {
            for r in s.row0..s.row0 + s.rows {
                for c in s.col0..s.col0 + s.cols {
                    owner[r * width + c] = i as u8;
                }
            }
        }
        Ok(Self {
            height,
            width,
            strips,
            owner,
        })
    }

    pub fn standard() -> Self {
        Self::new(BASE, BASE).expect("standard layout is valid")
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn strips(&self) -> &[Strip; 9] {
        &self.strips
    }

    pub fn strip(&self, id: StripId) -> &Strip {
        &self.strips[id.index()]
    }

    pub fn strips_of(&self, part: BodyPartId) -> impl Iterator<Item = &Strip> + '_ {
        self.strips.iter().filter(move |s| s.part() == part)
    }

    #[inline]
    pub fn strip_at(&self, row: usize, col: usize) -> Option<&Strip> {
        let o = self.owner[row * self.width + col];
        (o != u8::MAX).then(|| &self.strips[o as usize])
    }

    #[inline]
    pub fn part_at(&self, row: usize, col: usize) -> Option<BodyPartId> {
        self.strip_at(row, col).map(|s| s.part())
    }

    /// All texels equivalent to `(row, col)` under the chosen correspondences,
    /// including the texel itself. Empty for background texels.
    pub fn orbit(&self, row: usize, col: usize, opts: ExpandOptions) -> Vec<(usize, usize)> {
        let Some(s) = self.strip_at(row, col) else {
            return Vec::new();
        };
        let (lr, lc) = (row - s.row0, col - s.col0);
        let mut out = vec![(row, col)];
        let mut push = |strip: &Strip, c: usize| {
            let t = (strip.row0 + lr, strip.col0 + c);
            if !out.contains(&t) {
                out.push(t);
            }
        };
        if opts.front_back {
            push(s, s.front_back_col(lc));
        }
        if opts.mirror {
            let target = s.id.partner().map(|p| self.strip(p)).unwrap_or(s);
            let mc = s.left_right_col(lc);
            push(target, mc);
            if opts.front_back {
                push(target, target.front_back_col(mc));
            }
        }
        out
    }

    /// Expands a mask to every texel equivalent under `opts`.
    pub fn expand(&self, mask: &Mask, opts: ExpandOptions) -> Mask {
        let mut out = Mask::new(self.height, self.width);
        for (r, c) in mask.iter() {
            for (rr, cc) in self.orbit(r, c, opts) {
                out.set(rr, cc, true);
            }
        }
        out
    }

    pub fn strip_mask(&self, id: StripId) -> Mask {
        let s = *self.strip(id);
        Mask::from_fn(self.height, self.width, |r, c| s.contains(r, c))
    }

    pub fn part_mask(&self, part: BodyPartId) -> Mask {
        Mask::from_fn(self.height, self.width, |r, c| self.part_at(r, c) == Some(part))
    }

    pub fn part_masks(&self) -> PartMaskSet {
        let parts = BodyPartId::ALL.map(|p| self.part_mask(p));
        let body = parts[BodyPartId::Body as usize]
            .union(&parts[BodyPartId::Arm as usize])
            .union(&parts[BodyPartId::Leg as usize]);
        let foreground = Mask::from_fn(self.height, self.width, |r, c| self.strip_at(r, c).is_some());
        PartMaskSet {
            parts,
            body,
            foreground,
        }
    }
}

/// Per-part UV masks plus the garment region and the foreground.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartMaskSet {
    parts: [Mask; 6],
    body: Mask,
    foreground: Mask,
}

impl PartMaskSet {
    pub fn part(&self, p: BodyPartId) -> &Mask {
        &self.parts[p as usize]
    }

    /// Torso and limbs: the region appearance matching compares.
    pub fn body(&self) -> &Mask {
        &self.body
    }

    pub fn foreground(&self) -> &Mask {
        &self.foreground
    }

    pub fn union_of(&self, parts: impl IntoIterator<Item = BodyPartId>) -> Mask {
        let mut out = Mask::new(self.body.height(), self.body.width());
        for p in parts {
            out.union_in_place(self.part(p));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn part_codes_are_stable() {
        let codes: Vec<u8> = BodyPartId::ALL.iter().map(|p| p.code()).collect();
        assert_eq!(codes, vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(BodyPartId::from_code(3), Some(BodyPartId::Arm));
        assert_eq!("foot".parse::<BodyPartId>().unwrap(), BodyPartId::Foot);
    }

    #[test]
    fn part_masks_partition_the_foreground() {
        for (h, w) in [(128, 128), (64, 64), (96, 160)] {
            let set = UvLayout::new(h, w).unwrap().part_masks();
            let mut union = Mask::new(h, w);
            for (i, a) in BodyPartId::ALL.iter().enumerate() {
                for b in &BodyPartId::ALL[i + 1..] {
                    assert!(set.part(*a).is_disjoint(set.part(*b)), "{a} overlaps {b}");
                }
                union.union_in_place(set.part(*a));
            }
            assert_eq!(&union, set.foreground());
            assert!(set.body().is_subset_of(set.foreground()));
        }
    }

    #[test]
    fn mirror_columns_are_involutions() {
        let layout = UvLayout::standard();
        for s in layout.strips() {
            assert_eq!(s.cols % 2, 0);
            for c in 0..s.cols {
                assert_eq!(s.front_back_col(s.front_back_col(c)), c);
                assert_eq!(s.left_right_col(s.left_right_col(c)), c);
                assert_eq!(s.is_front_col(c), !s.is_front_col(s.front_back_col(c)));
                // Column-angle round trip, and the mirrors act on angles as
                // theta -> pi - theta and theta -> -theta.
                assert_eq!(s.col_of_angle(s.angle_of_col(c)), c);
                let a = s.angle_of_col(c);
                assert_eq!(s.col_of_angle(std::f64::consts::PI - a), s.front_back_col(c));
                assert_eq!(s.col_of_angle(-a), s.left_right_col(c));
            }
        }
    }

    #[test]
    fn orbit_of_a_limb_texel_spans_both_limbs() {
        let layout = UvLayout::standard();
        let s = *layout.strip(StripId::ArmLeft);
        let o = layout.orbit(s.row0 + 5, s.col0 + 10, ExpandOptions::default());
        assert_eq!(o.len(), 4);
        let right = layout.strip(StripId::ArmRight);
        assert_eq!(o.iter().filter(|(r, c)| right.contains(*r, *c)).count(), 2);
        assert!(layout.orbit(0, 0, ExpandOptions::default()).is_empty());
    }
}
