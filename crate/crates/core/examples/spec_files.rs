//! Write an example spec, load it back and run a suite on it.

use wflow::cli::{generate_example, load_spec, run_suite, save_spec, ExampleParams, Suite};

fn main() -> wflow::error::Result<()> {
    let dir = std::env::temp_dir().join("wflow-spec-example");
    std::fs::create_dir_all(&dir).map_err(|e| wflow::error::Error::Io(e.to_string()))?;
    let path = dir.join("nest.json");

    let params = ExampleParams {
        blocks: vec![1, 2],
        weights: vec![2, -1],
        ..ExampleParams::default()
    };
    save_spec(&generate_example("nest", &params)?, &path)?;
    let spec = load_spec(&path)?;
    let report = run_suite(&spec, Suite::Reflexivity, &path.display().to_string(), None)?;
    print!("{}", report.to_text());
    println!("exit code {}", report.exit_code());
    Ok(())
}
