use super::*;

impl EditSession {
    fn stroke_context(&self, render_id: Option<u64>) -> Result<Arc<RenderOutput>> {
        match render_id {
            None => Ok(self.last_render().1),
            Some(id) => self
                .render_by_id(id)
                .ok_or_else(|| Error::NotFound(format!("render {id} of session {}", self.id))),
        }
    }

    /// Text-driven editing of the parts the command mentions.
    pub fn edit_text(&mut self, text: &str) -> Result<EditOutcome> {
        let q = parse_text(text, ParseMode::Editing, self.index.layout())?;
        let r = sample_text(&self.index, &q, Some(&self.latent), self.top_n)?;
        let z = blend_latent(&self.latent, &r.latent, &q.edit_mask)?;
        let d = Diagnostics::from_sampler("edit-text", &r, q.edit_mask.count());
        self.commit(z, d)
    }

    /// Sketch-driven editing with strokes drawn over a recent render.
    pub fn edit_sketch(&mut self, strokes: &[SketchStroke], opts: SketchEditOptions) -> Result<EditOutcome> {
        let ctx = self.stroke_context(opts.render_id)?;
        let sk = parse_sketch(strokes, self.index.layout(), Some(&ctx), opts.parse)?;
        let r = sample_sketch(&self.index, &sk, Some(&self.latent), self.top_k)?;
        let region = if opts.full_uv { sk.edit_mask.clone() } else { sk.partial_edit_mask() };
        let z = blend_latent(&self.latent, &r.latent, &region)?;
        let mut d = Diagnostics::from_sampler("edit-sketch", &r, region.count());
        d.sketch_type = Some(sk.sketch_type);
        d.neckline_class = sk.neckline_class;
        self.commit(z, d)
    }

    /// Copies the reference latent inside the region sketched on the
    /// reference's canonical render. No strokes means an empty region.
    pub fn edit_style_transfer(&mut self, reference: &Reference, strokes: &[SketchStroke], parse: ParseOptions) -> Result<EditOutcome> {
        let (z_ref, entry) = match reference {
            Reference::Entry(id) => (self.index.entry(*id)?.latent.clone(), Some(*id)),
            Reference::Latent(z) => {
                if z.dims() != self.latent.dims() {
                    return Err(Error::invalid("reference latent has different dimensions"));
                }
                ((**z).clone(), None)
            }
        };
        let (mask, sketch_type) = if strokes.is_empty() {
            (crate::uv::Mask::new(z_ref.height(), z_ref.width()), None)
        } else {
            let ctx = render_canonical(&z_ref)?;
            let sk = parse_sketch(strokes, self.index.layout(), Some(&ctx), parse)?;
            (sk.edit_mask, Some(sk.sketch_type))
        };
        let z = blend_latent(&self.latent, &z_ref, &mask)?;
        let d = Diagnostics {
            operation: "edit-style",
            edit_mask_texels: mask.count(),
            sketch_type,
            entry,
            ..Diagnostics::default()
        };
        self.commit(z, d)
    }

    /// Replaces the avatar with a seeded corpus draw.
    pub fn generate_random(&mut self, seed: u64) -> Result<EditOutcome> {
        let id = sample_unconditional_entry(&self.index, seed)?;
        let z = self.index.entry(id)?.latent.clone();
        let d = Diagnostics {
            operation: "generate-random",
            entry: Some(id),
            ..Diagnostics::default()
        };
        self.commit(z, d)
    }

    pub fn generate_text(&mut self, text: &str) -> Result<EditOutcome> {
        let q = parse_text(text, ParseMode::Generation, self.index.layout())?;
        if q.is_empty() {
            return Err(Error::UnparseableCommand(format!("no attribute keywords in {text:?}")));
        }
        let r = sample_text(&self.index, &q, None, self.top_n)?;
        let d = Diagnostics::from_sampler("generate-text", &r, q.edit_mask.count());
        self.commit(r.latent, d)
    }

    pub fn generate_sketch(&mut self, strokes: &[SketchStroke], opts: SketchEditOptions) -> Result<EditOutcome> {
        let ctx = self.stroke_context(opts.render_id)?;
        let sk = parse_sketch(strokes, self.index.layout(), Some(&ctx), opts.parse)?;
        let r = sample_sketch(&self.index, &sk, None, self.top_k)?;
        let mut d = Diagnostics::from_sampler("generate-sketch", &r, sk.mask_uv.count());
        d.sketch_type = Some(sk.sketch_type);
        d.neckline_class = sk.neckline_class;
        self.commit(r.latent, d)
    }

    /// Updates view state and re-renders; the latent is untouched.
    pub fn set_pose_view_shape(
        &mut self,
        pose: Option<BodyPose>,
        view: Option<CameraView>,
        shape: Option<ShapeParams>,
    ) -> Result<EditOutcome> {
        let pose = pose.unwrap_or_else(|| self.pose.clone());
        let view = view.unwrap_or(self.view);
        let shape = shape.unwrap_or(self.shape);
        pose.validate()?;
        view.validate()?;
        shape.validate()?;
        let out = Arc::new(render(&self.latent, &pose, &view, &shape, self.render_size)?);
        self.pose = pose;
        self.view = view;
        self.shape = shape;
        let id = self.push_render(out.clone());
        Ok(EditOutcome {
            render_id: id,
            render: out,
            diagnostics: Diagnostics {
                operation: "params",
                ..Diagnostics::default()
            },
        })
    }

    pub fn undo(&mut self) -> Result<EditOutcome> {
        let prev = self.history.back().ok_or(Error::NothingToUndo)?.clone();
        let out = Arc::new(render(&prev, &self.pose, &self.view, &self.shape, self.render_size)?);
        self.history.pop_back();
        self.latent = prev;
        let id = self.push_render(out.clone());
        Ok(EditOutcome {
            render_id: id,
            render: out,
            diagnostics: Diagnostics {
                operation: "undo",
                ..Diagnostics::default()
            },
        })
    }

    /// PNG frames orbiting the avatar: `frames` renders, yaw swept over
    /// `yaw_sweep` degrees starting at the current view.
    pub fn export_frames(&self, frames: usize, yaw_sweep: f64) -> Result<Vec<Vec<u8>>> {
        if frames == 0 || frames > 360 {
            return Err(Error::invalid(format!("frame count {frames} outside 1..=360")));
        }
        if !yaw_sweep.is_finite() || yaw_sweep.abs() > 360.0 {
            return Err(Error::invalid("yaw sweep must be within ±360 degrees"));
        }
        (0..frames)
            .map(|i| {
                let mut view = self.view;
                let yaw = self.view.yaw + yaw_sweep * i as f64 / frames as f64;
                view.yaw = (yaw + 180.0).rem_euclid(360.0) - 180.0;
                Ok(self.render_with(None, Some(&view))?.color_png())
            })
            .collect()
    }
}
