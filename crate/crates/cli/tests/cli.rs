use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::sync::OnceLock;

use serde_json::Value;

use atelier_core::corpus::generate_synthetic_corpus;
use atelier_core::editors::EditSession;
use atelier_core::matchers::sem_match;
use atelier_core::parsers::{parse_text, ParseMode};
use atelier_core::BodyPartId;

fn atelier(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_atelier"))
        .args(args)
        .env("RUST_LOG", "off")
        .env_remove("ATELIER_CORPUS")
        .output()
        .expect("binary runs")
}

fn stdout_json(o: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&o.stdout).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

/// A seed-1 corpus written once by the CLI itself.
fn corpus_dir() -> &'static Path {
    static D: OnceLock<tempfile::TempDir> = OnceLock::new();
    D.get_or_init(|| {
        let d = tempfile::tempdir().unwrap();
        let o = atelier(&["corpus", "gen", "--seed", "1", "--n", "64", "--out", d.path().to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        d
    })
    .path()
}

fn tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(dir).unwrap().display().to_string(), fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn corpus_gen_is_byte_identical_across_runs() {
    let other = tempfile::tempdir().unwrap();
    let o = atelier(&["corpus", "gen", "--seed", "1", "--n", "64", "--out", other.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let (a, b) = (tree(corpus_dir()), tree(other.path()));
    assert!(a.len() > 64);
    assert!(a == b, "corpus directories differ");
}

#[test]
fn verify_passes_then_fails_on_tampering() {
    assert_eq!(atelier(&["corpus", "verify", corpus_dir().to_str().unwrap()]).status.code(), Some(0));
    let copy = tempfile::tempdir().unwrap();
    for (name, bytes) in tree(corpus_dir()) {
        let p = copy.path().join(&name);
        fs::create_dir_all(p.parent().unwrap()).unwrap();
        fs::write(p, bytes).unwrap();
    }
    let victim = copy.path().join("latents/000003.uvlt");
    let mut bytes = fs::read(&victim).unwrap();
    let last = bytes.len() - 1;
    bytes[last] ^= 0x55;
    fs::write(&victim, bytes).unwrap();
    assert_eq!(atelier(&["corpus", "verify", copy.path().to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(atelier(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(atelier(&["gen", "--corpus", "x", "--out", "y.png"]).status.code(), Some(2));
    assert_eq!(atelier(&["gen", "--corpus", "/nonexistent", "--text", "red", "--out", "y.png"]).status.code(), Some(2));
    assert_eq!(atelier(&["--help"]).status.code(), Some(0));
}

#[test]
fn gen_text_writes_the_measured_garment() {
    let out = tempfile::tempdir().unwrap();
    let png = out.path().join("a.png");
    let o = atelier(&["gen", "--corpus", corpus_dir().to_str().unwrap(), "--text", "v-neck long sleeves", "--out", png.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = &stdout_json(&o)[0];
    assert_eq!(report["measurement"]["neckline"], "v-neck");
    assert_eq!(report["measurement"]["sleeve_class"], "long");

    let index = std::sync::Arc::new(generate_synthetic_corpus(1, 64).unwrap());
    let mut s = EditSession::random("x", index, 0).unwrap();
    let want = s.generate_text("v-neck long sleeves").unwrap().render.color_png();
    assert_eq!(fs::read(&png).unwrap(), want);
    assert_eq!(image::load_from_memory(&want).unwrap().width(), 512);

    let bad = atelier(&["gen", "--corpus", corpus_dir().to_str().unwrap(), "--text", "xyzzy", "--out", png.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("unparseable"));
}

#[test]
fn matchers_print_library_scores() {
    let dir = corpus_dir().to_str().unwrap();
    let index = generate_synthetic_corpus(1, 64).unwrap();
    let o = atelier(&["match", "sem", "--corpus", dir, "--entry", "4", "--text", "red hair"]);
    assert_eq!(o.status.code(), Some(0));
    let q = parse_text("red hair", ParseMode::Generation, index.layout()).unwrap();
    let want = sem_match(&index.entry(4).unwrap().annotation.slice(BodyPartId::Head), &q.parts[&BodyPartId::Head]).unwrap();
    assert_eq!(stdout_json(&o)[0]["sem"]["head"].as_f64(), Some(want.value));

    let o = atelier(&["match", "app", "--corpus", dir, "--a", "2", "--b", "2"]);
    assert_eq!(stdout_json(&o)[0]["app"].as_f64(), Some(1.0));
    let o = atelier(&["match", "shape", "--corpus", dir, "--a", "5", "--b", "5", "--part", "body"]);
    assert_eq!(stdout_json(&o)[0]["shape"].as_f64(), Some(0.0));
    assert_eq!(atelier(&["match", "shape", "--corpus", dir, "--a", "5", "--b", "6", "--part", "tail"]).status.code(), Some(2));
}

#[test]
fn edit_script_emits_a_render_per_step() {
    let tmp = tempfile::tempdir().unwrap();
    let script = tmp.path().join("s.json");
    fs::write(
        &script,
        r#"{"session": {"seed": 4}, "steps": [
            {"op": "edit/text", "body": {"text": "long sleeves"}},
            {"op": "params", "body": {"view": {"yaw": 180}}},
            {"op": "undo"}
        ]}"#,
    )
    .unwrap();
    let out = tmp.path().join("out");
    let o = atelier(&["edit", "--corpus", corpus_dir().to_str().unwrap(), "--session-script", script.to_str().unwrap(), "--out-dir", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let lines = stdout_json(&o);
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[1]["measurement"]["sleeve_class"], "long");
    assert_eq!(lines[2]["diagnostics"]["operation"], "undo");
    for i in 0..=3 {
        assert!(out.join(format!("step_{i:03}.png")).is_file());
    }

    fs::write(&script, r#"{"steps": [{"op": "edit/text", "body": {"text": "xyzzy"}}]}"#).unwrap();
    let o = atelier(&["edit", "--corpus", corpus_dir().to_str().unwrap(), "--session-script", script.to_str().unwrap(), "--out-dir", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("step 1"));
}

#[test]
fn eval_reports_selected_criteria() {
    let o = atelier(&["eval", "--corpus", corpus_dir().to_str().unwrap(), "--only", "corpus_roundtrip"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("PASS corpus_roundtrip"));
    let o = atelier(&["eval", "--only", "no_such_criterion", "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["passed"], false);
}
