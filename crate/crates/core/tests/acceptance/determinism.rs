use protoinfer::pipeline::run_pipeline;
use protoinfer::synth::generate_corpus;

use super::end_to_end::{bundled, prepare, SEED};

const ARTIFACTS: &[&str] = &[
    "config.json",
    "mfi.json",
    "pfc.json",
    "sequences.json",
    "sessions.json",
    "report.json",
];

pub fn run() -> Result<String, String> {
    let a = generate_corpus(&bundled(), 60, 0.02, SEED).map_err(|e| e.to_string())?;
    let b = generate_corpus(&bundled(), 60, 0.02, SEED).map_err(|e| e.to_string())?;
    if a.trace_jsonl() != b.trace_jsonl() || a.truth.to_json() != b.truth.to_json() {
        return Err("corpus regeneration differs".into());
    }

    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let first = prepare(tmp.path(), "first");
    let mut second = first.clone();
    second.out_dir = Some(tmp.path().join("second"));
    let out = run_pipeline(&first).map_err(|e| e.to_string())?;
    run_pipeline(&second).map_err(|e| e.to_string())?;

    let mut names: Vec<String> = ARTIFACTS.iter().map(|s| s.to_string()).collect();
    names.extend((0..out.sessions.k).map(|c| format!("psm_{c}.json")));
    for name in &names {
        let x = std::fs::read(tmp.path().join("first").join(name))
            .map_err(|e| format!("{name}: {e}"))?;
        let y = std::fs::read(tmp.path().join("second").join(name))
            .map_err(|e| format!("{name}: {e}"))?;
        if x != y {
            return Err(format!("{name} differs between runs"));
        }
    }
    Ok(format!(
        "{} JSON artifacts byte-identical across two runs",
        names.len()
    ))
}
