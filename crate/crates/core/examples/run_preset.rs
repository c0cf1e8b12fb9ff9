//! Run a named preset with fewer replicas and write its output bundle.
//!
//! `cargo run --release --example run_preset -- fig2 /tmp/fig2`

use std::path::PathBuf;

use idlegrad::experiment::{resolve_config, run_experiment, write_bundle, ConfigFile, PresetRef};

fn main() -> idlegrad::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "remark2".into());
    let out: PathBuf = args.next().map_or_else(|| std::env::temp_dir().join(format!("idlegrad-{name}")), PathBuf::from);
    let cfg = resolve_config(ConfigFile::Preset(PresetRef { preset: name, seed: None, replicas: Some(5), data_path: None }))?;
    let result = run_experiment(&cfg)?;
    write_bundle(&result, &out)?;
    println!("{}", out.join("report.json").display());
    Ok(())
}
