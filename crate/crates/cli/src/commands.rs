use std::fs;
use std::net::SocketAddr;
use std::path::Path;
use std::sync::Arc;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use atelier_core::corpus::{generate_synthetic_corpus, load_corpus, save_corpus, verify_corpus, LoadOptions, MultimodalIndex};
use atelier_core::editors::{EditOutcome, EditSession};
use atelier_core::matchers::{app_match, sem_match, shape_match};
use atelier_core::measure::measure_render;
use atelier_core::parsers::{parse_text, ParseMode};
use atelier_core::BodyPartId;
use atelier_service::bodies::SketchBody;
use atelier_service::script::{apply_step, SessionScript};
use atelier_service::ServiceConfig;

use crate::{Command, CorpusCommand, EditArgs, EvalArgs, GenArgs, MatchCommand, ServeArgs};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// A verification or evaluation ran and did not pass.
    Failed,
}

pub fn run(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Corpus(CorpusCommand::Gen { seed, n, out }) => {
            let index = generate_synthetic_corpus(seed, n)?;
            save_corpus(&index, &out, false).with_context(|| format!("writing {}", out.display()))?;
            println!("{}", json!({ "entries": index.len(), "dir": out.display().to_string() }));
            Ok(Outcome::Success)
        }
        Command::Corpus(CorpusCommand::Verify { dir }) => match verify_corpus(&dir) {
            Ok(n) => {
                println!("{}", json!({ "verified": n }));
                Ok(Outcome::Success)
            }
            Err(e) => {
                eprintln!("verification failed: {e}");
                Ok(Outcome::Failed)
            }
        },
        Command::Match(m) => matcher(m),
        Command::Gen(a) => gen(a),
        Command::Edit(a) => edit(a),
        Command::Eval(a) => eval(a),
        Command::Serve(a) => serve(a),
    }
}

fn load(dir: &Path) -> Result<Arc<MultimodalIndex>> {
    Ok(Arc::new(
        load_corpus(dir, LoadOptions::default()).with_context(|| format!("loading corpus {}", dir.display()))?,
    ))
}

fn part(name: &str) -> Result<BodyPartId> {
    Ok(name.parse::<BodyPartId>()?)
}

fn matcher(m: MatchCommand) -> Result<Outcome> {
    let out = match m {
        MatchCommand::Sem { corpus, entry, text } => {
            let index = load(&corpus.corpus)?;
            let e = index.entry(entry)?;
            let q = parse_text(&text, ParseMode::Generation, index.layout())?;
            if q.is_empty() {
                bail!("no attribute recognized in {text:?}");
            }
            let mut scores = serde_json::Map::new();
            for (p, slice) in &q.parts {
                scores.insert(p.name().into(), json!(sem_match(&e.annotation.slice(*p), slice)?.value));
            }
            json!({ "entry": entry, "sem": scores })
        }
        MatchCommand::App { corpus, a, b, part: p } => {
            let index = load(&corpus.corpus)?;
            let mask = match &p {
                Some(p) => index.masks().part(part(p)?).clone(),
                None => index.masks().body().clone(),
            };
            let s = app_match(&index.entry(a)?.appearance_uv, &index.entry(b)?.appearance_uv, &mask)?;
            json!({ "a": a, "b": b, "part": p, "app": s.value })
        }
        MatchCommand::Shape { corpus, a, b, part: p } => {
            let index = load(&corpus.corpus)?;
            let id = part(&p)?;
            let s = shape_match(index.entry(a)?.shape_mask(id), index.entry(b)?.shape_mask(id))?;
            json!({ "a": a, "b": b, "part": p, "shape": s.value })
        }
    };
    println!("{out}");
    Ok(Outcome::Success)
}

fn summary(o: &EditOutcome, session: &EditSession) -> Value {
    json!({
        "render_id": o.render_id,
        "diagnostics": o.diagnostics,
        "measurement": measure_render(&o.render, session.index().layout()),
    })
}

fn gen(a: GenArgs) -> Result<Outcome> {
    let index = load(&a.corpus.corpus)?;
    let mut s = EditSession::random("cli", index, a.seed)?;
    let o = match (&a.text, &a.sketch) {
        (Some(t), _) => s.generate_text(t)?,
        (None, Some(f)) => {
            let body: SketchBody = serde_json::from_slice(&fs::read(f).with_context(|| format!("reading {}", f.display()))?)
                .with_context(|| format!("parsing {}", f.display()))?;
            s.generate_sketch(&body.strokes, body.options.edit())?
        }
        (None, None) => bail!("give --text or --sketch"),
    };
    fs::write(&a.out, o.render.color_png()).with_context(|| format!("writing {}", a.out.display()))?;
    println!("{}", summary(&o, &s));
    Ok(Outcome::Success)
}

fn edit(a: EditArgs) -> Result<Outcome> {
    let index = load(&a.corpus.corpus)?;
    let text = fs::read(&a.session_script).with_context(|| format!("reading {}", a.session_script.display()))?;
    let script: SessionScript = serde_json::from_slice(&text).with_context(|| format!("parsing {}", a.session_script.display()))?;
    let mut s = match (script.session.entry_id, script.session.seed) {
        (Some(_), Some(_)) => bail!("session: give entry_id or seed, not both"),
        (Some(e), None) => EditSession::from_entry("cli", index, e)?,
        (None, seed) => EditSession::random("cli", index, seed.unwrap_or(0))?,
    };
    fs::create_dir_all(&a.out_dir)?;
    let (_, first) = s.last_render();
    fs::write(a.out_dir.join("step_000.png"), first.color_png())?;
    for (i, step) in script.steps.iter().enumerate() {
        let o = apply_step(&mut s, step).with_context(|| format!("step {} ({})", i + 1, step.op))?;
        let name = format!("step_{:03}.png", i + 1);
        fs::write(a.out_dir.join(&name), o.render.color_png())?;
        let mut line = summary(&o, &s);
        line["step"] = json!(i + 1);
        line["op"] = json!(step.op);
        line["png"] = json!(name);
        println!("{line}");
    }
    Ok(Outcome::Success)
}

fn eval(a: EvalArgs) -> Result<Outcome> {
    let index = match &a.corpus {
        Some(dir) => load(dir)?,
        None => Arc::new(generate_synthetic_corpus(1, 64)?),
    };
    let results = if a.only.is_empty() {
        atelier_eval::run_all(&index)
    } else {
        atelier_eval::run_named(&index, &a.only)
    };
    if a.json {
        println!("{}", serde_json::to_string_pretty(&results)?);
    } else {
        for r in &results {
            println!("{r}");
        }
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    if !a.json {
        println!("{} passed, {failed} failed", results.len() - failed);
    }
    Ok(if failed == 0 { Outcome::Success } else { Outcome::Failed })
}

fn serve(a: ServeArgs) -> Result<Outcome> {
    let index = load(&a.corpus.corpus)?;
    let addr: SocketAddr = format!("{}:{}", a.host, a.port).parse().context("bad --host/--port")?;
    let config = ServiceConfig {
        idle_timeout: Duration::from_secs(a.session_timeout),
    };
    tokio::runtime::Runtime::new()?.block_on(atelier_service::serve(index, config, addr))?;
    Ok(Outcome::Success)
}
