use std::io::Cursor;

use image::{ImageBuffer, ImageFormat, Rgb};
use nalgebra::{Rotation3, Unit};
use sha2::{Digest, Sha256};

use super::body::{build_body, intersect_down_z, Capsule, Vec3};
use super::params::{BodyPose, CameraView, ShapeParams};
use super::texture::{decode_texture, BACKGROUND};
use crate::error::{Error, Result};
use crate::uv::{texel_of, BodyPartId, ColorImage, StripId, UvCoordMap, UvLatent, UvLayout};

pub const CANONICAL_SIZE: (usize, usize) = (512, 512);
const PIXELS_PER_UNIT_AT_512: f64 = 175.0;
/// Camera-space height that lands on the image center.
const FRAME_CENTER_Y: f64 = 0.07;
const RAY_ORIGIN_Z: f64 = 10.0;
const MAX_IMAGE_SIDE: usize = 4096;

/// Per-pixel segmentation: background, or a body part plus garment coverage.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SegLabel(u8);

impl SegLabel {
    pub const BACKGROUND: SegLabel = SegLabel(u8::MAX);

    pub fn new(part: BodyPartId, covered: bool) -> Self {
        SegLabel(part.code() | ((covered as u8) << 3))
    }

    pub fn part(self) -> Option<BodyPartId> {
        if self == Self::BACKGROUND {
            None
        } else {
            BodyPartId::from_code(self.0 & 0x7)
        }
    }

    pub fn covered(self) -> bool {
        self != Self::BACKGROUND && self.0 & 0x8 != 0
    }

    pub fn raw(self) -> u8 {
        self.0
    }

    pub fn from_raw(raw: u8) -> Option<Self> {
        let l = SegLabel(raw);
        (l == Self::BACKGROUND || (raw & !0xF == 0 && l.part().is_some())).then_some(l)
    }

    /// Palette used for segmentation PNGs.
    pub fn display_color(self) -> [u8; 3] {
        const PALETTE: [[u8; 3]; 6] = [
            [230, 80, 80],
            [240, 170, 60],
            [90, 170, 90],
            [80, 130, 220],
            [160, 90, 200],
            [120, 120, 120],
        ];
        match self.part() {
            None => [0, 0, 0],
            Some(p) => {
                let c = PALETTE[p as usize];
                if self.covered() {
                    c
                } else {
                    c.map(|v| v / 2 + 64)
                }
            }
        }
    }
}

/// Everything one render produces.
#[derive(Clone, Debug, PartialEq)]
pub struct RenderOutput {
    pub width: usize,
    pub height: usize,
    pub color: ColorImage,
    pub seg: Vec<SegLabel>,
    pub coords: UvCoordMap,
    /// Distance from the image plane; infinite on background.
    pub depth: Vec<f32>,
}

impl RenderOutput {
    pub fn color_png(&self) -> Vec<u8> {
        encode_png(self.width, self.height, self.color.to_rgb8())
    }

    pub fn seg_png(&self) -> Vec<u8> {
        let raw = self.seg.iter().flat_map(|s| s.display_color()).collect();
        encode_png(self.width, self.height, raw)
    }

    /// SHA-256 over the quantized color image, hex encoded.
    pub fn color_hash(&self) -> String {
        hex::encode(Sha256::digest(self.color.to_rgb8()))
    }

    /// Pixel bounding box of the body: `(x0, y0, x1, y1)`, inclusive.
    pub fn body_bbox(&self) -> Option<(usize, usize, usize, usize)> {
        let mut bb: Option<(usize, usize, usize, usize)> = None;
        for y in 0..self.height {
            for x in 0..self.width {
                if self.seg[y * self.width + x] != SegLabel::BACKGROUND {
                    bb = Some(match bb {
                        None => (x, y, x, y),
                        Some((x0, y0, x1, y1)) => (x0.min(x), y0.min(y), x1.max(x), y1.max(y)),
                    });
                }
            }
        }
        bb
    }
}

pub fn encode_png(width: usize, height: usize, rgb: Vec<u8>) -> Vec<u8> {
    let img: ImageBuffer<Rgb<u8>, Vec<u8>> =
        ImageBuffer::from_raw(width as u32, height as u32, rgb).expect("buffer matches dimensions");
    let mut out = Cursor::new(Vec::new());
    img.write_to(&mut out, ImageFormat::Png).expect("PNG encoding to memory");
    out.into_inner()
}

/// World-to-camera transform for an orbiting orthographic camera.
#[derive(Clone, Debug)]
pub struct Camera {
    rotation: Rotation3<f64>,
    pixels_per_unit: f64,
    width: usize,
    height: usize,
}

impl Camera {
    pub fn new(view: &CameraView, size: (usize, usize)) -> Self {
        let yaw = Rotation3::from_axis_angle(&Unit::new_normalize(Vec3::y()), -view.yaw.to_radians());
        let pitch = Rotation3::from_axis_angle(&Unit::new_normalize(Vec3::x()), view.pitch.to_radians());
        let (width, height) = size;
        Self {
            rotation: pitch * yaw,
            pixels_per_unit: PIXELS_PER_UNIT_AT_512 * width.min(height) as f64 / 512.0 * view.scale,
            width,
            height,
        }
    }

    pub fn to_camera(&self, p: &Vec3) -> Vec3 {
        self.rotation * p - Vec3::new(0.0, FRAME_CENTER_Y, 0.0)
    }

    /// Continuous pixel position `(x, y)` of a world point.
    pub fn project(&self, p: &Vec3) -> (f64, f64) {
        let c = self.to_camera(p);
        (
            c.x * self.pixels_per_unit + self.width as f64 / 2.0,
            self.height as f64 / 2.0 - c.y * self.pixels_per_unit,
        )
    }

    fn capsule(&self, c: &Capsule) -> Capsule {
        Capsule {
            a: self.to_camera(&c.a),
            b: self.to_camera(&c.b),
            front: self.rotation * c.front,
            side: self.rotation * c.side,
            ..c.clone()
        }
    }
}

fn surface_uv(cap: &Capsule, p: &Vec3, layout: &UvLayout) -> [f32; 2] {
    let strip = layout.strip(cap.strip);
    let len = cap.length();
    let axis = cap.axis();
    let along = (p - cap.a).dot(&axis);
    let t = (along / len).clamp(0.0, 1.0);
    let radial = p - (cap.a + axis * along.clamp(0.0, len));
    let angle = radial.dot(&cap.side).atan2(radial.dot(&cap.front));
    let row_frac = cap.span.0 + t * (cap.span.1 - cap.span.0);
    let row = (row_frac * strip.rows as f64).clamp(0.0, strip.rows as f64 - 1e-3);
    let f = (angle + std::f64::consts::PI) / std::f64::consts::TAU;
    let col = (f * strip.cols as f64).clamp(0.0, strip.cols as f64 - 1e-3);
    [
        ((strip.col0 as f64 + col) / layout.width() as f64) as f32,
        ((strip.row0 as f64 + row) / layout.height() as f64) as f32,
    ]
}

/// Rasterizes the posed capsule body textured by `latent`.
pub fn render(
    latent: &UvLatent,
    pose: &BodyPose,
    view: &CameraView,
    shape: &ShapeParams,
    size: (usize, usize),
) -> Result<RenderOutput> {
    pose.validate()?;
    view.validate()?;
    shape.validate()?;
    let (w, h) = size;
    if w == 0 || h == 0 || w > MAX_IMAGE_SIDE || h > MAX_IMAGE_SIDE {
        return Err(Error::invalid(format!("image size {w}x{h} outside 1..={MAX_IMAGE_SIDE}")));
    }
    let texture = decode_texture(latent)?;
    let layout = UvLayout::new(latent.height(), latent.width())?;
    let camera = Camera::new(view, size);
    let caps: Vec<Capsule> = build_body(pose, shape).iter().map(|c| camera.capsule(c)).collect();

    let n = w * h;
    let ppu = camera.pixels_per_unit;
    let px_x = |px: usize| (px as f64 + 0.5 - w as f64 / 2.0) / ppu;
    let px_y = |py: usize| (h as f64 / 2.0 - (py as f64 + 0.5)) / ppu;
    let mut nearest = vec![f64::INFINITY; n];
    let mut owner = vec![u8::MAX; n];
    for (k, cap) in caps.iter().enumerate() {
        let r = cap.radius;
        let to_px = |x: f64| x * ppu + w as f64 / 2.0;
        let to_py = |y: f64| h as f64 / 2.0 - y * ppu;
        let x0 = to_px(cap.a.x.min(cap.b.x) - r).floor().max(0.0) as usize;
        let x1 = (to_px(cap.a.x.max(cap.b.x) + r).ceil().max(0.0) as usize).min(w);
        let y0 = to_py(cap.a.y.max(cap.b.y) + r).floor().max(0.0) as usize;
        let y1 = (to_py(cap.a.y.min(cap.b.y) - r).ceil().max(0.0) as usize).min(h);
        for py in y0..y1 {
            let y = px_y(py);
            for px in x0..x1 {
                let origin = Vec3::new(px_x(px), y, RAY_ORIGIN_Z);
                if let Some(t) = intersect_down_z(&origin, cap) {
                    let i = py * w + px;
                    if t > 0.0 && t < nearest[i] {
                        nearest[i] = t;
                        owner[i] = k as u8;
                    }
                }
            }
        }
    }

    let mut color = ColorImage::filled(w, h, BACKGROUND);
    let mut seg = vec![SegLabel::BACKGROUND; n];
    let mut coords = UvCoordMap::invalid(w, h);
    let mut depth = vec![f32::INFINITY; n];
    for i in 0..n {
        if owner[i] == u8::MAX {
            continue;
        }
        let cap = &caps[owner[i] as usize];
        let p = Vec3::new(px_x(i % w), px_y(i / w), RAY_ORIGIN_Z - nearest[i]);
        let uv = surface_uv(cap, &p, &layout);
        let (tr, tc) = texel_of(uv, layout.height(), layout.width());
        color.pixels[i] = texture.color_at(tr, tc);
        seg[i] = SegLabel::new(cap.strip.part(), texture.coverage.get(tr, tc));
        coords.uv[i] = uv;
        coords.valid[i] = true;
        coords.depth[i] = nearest[i] as f32;
        depth[i] = nearest[i] as f32;
    }
    Ok(RenderOutput {
        width: w,
        height: h,
        color,
        seg,
        coords,
        depth,
    })
}

/// Render under the fixed canonical pose, shape and camera.
pub fn render_canonical(latent: &UvLatent) -> Result<RenderOutput> {
    render(
        latent,
        &BodyPose::canonical(),
        &CameraView::default(),
        &ShapeParams::default(),
        CANONICAL_SIZE,
    )
}

/// Normalized image position `(x / W, y / H)` of the surface point at strip
/// fraction `t` and angle `angle` (radians) of `strip`, as seen through
/// `view`. The point may be occluded.
pub fn project_strip_point(
    pose: &BodyPose,
    shape: &ShapeParams,
    view: &CameraView,
    size: (usize, usize),
    strip: StripId,
    t: f64,
    angle: f64,
) -> Option<[f64; 2]> {
    let caps = build_body(pose, shape);
    let cap = caps
        .iter()
        .filter(|c| c.strip == strip)
        .find(|c| t >= c.span.0 && t <= c.span.1)?;
    let (x, y) = Camera::new(view, size).project(&cap.surface_point(t, angle));
    Some([x / size.0 as f64, y / size.1 as f64])
}
