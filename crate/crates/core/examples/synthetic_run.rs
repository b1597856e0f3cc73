//! Generates the bundled two-protocol corpus, runs inference on it and
//! prints the evaluation report.
//!
//!     cargo run --release -p protoinfer-core --example synthetic_run -- [seed]

use protoinfer::pipeline::{run_pipeline, PipelineConfig};
use protoinfer::synth::{generate_corpus, ProtocolSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed: u64 = std::env::args().nth(1).map_or(Ok(1), |s| s.parse())?;
    let dir = std::env::temp_dir().join(format!("protoinfer-synthetic-{seed}"));
    let specs: Vec<ProtocolSpec> = ProtocolSpec::builtin_names()
        .filter_map(ProtocolSpec::builtin)
        .collect();
    generate_corpus(&specs, 60, 0.02, seed)?.write_to(&dir)?;

    let cfg = PipelineConfig {
        trace: Some(dir.join("trace.jsonl")),
        truth: Some(dir.join("truth.json")),
        out_dir: Some(dir.join("out")),
        ..PipelineConfig::default()
    };
    let t = std::time::Instant::now();
    let out = run_pipeline(&cfg)?;
    eprintln!(
        "pipeline took {:.2?}, artifacts in {}",
        t.elapsed(),
        dir.join("out").display()
    );
    for item in &out.mfi {
        eprintln!(
            "  mfi {} support {:.2}",
            hex::encode(&item.bytes),
            item.support
        );
    }
    println!("{}", serde_json::to_string_pretty(&out.report)?);
    Ok(())
}
