//! Running a convergence experiment from a JSON config and reading back the
//! written profile.

use nilcone::convergence::{run_experiment, ExperimentConfig};

const CONFIG: &str = r#"{
    "lattice": "h3z",
    "generators": "standard",
    "schedule": [4, 6, 8, 10, 12],
    "methods": ["pointwise", "hausdorff"],
    "estimator": {"segments": 64, "restarts": 8},
    "seed": 7,
    "cloud_points": 200
}"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = ExperimentConfig::from_json(CONFIG)?;
    let dir = tempfile::tempdir()?;
    let profile = run_experiment(&config, Some(dir.path()))?;
    for row in &profile.rows {
        println!(
            "{:?} n = {:>2}: D = {:.4} over {} points ({} skipped)",
            row.method, row.n, row.discrepancy, row.samples, row.skipped
        );
    }
    if let Some(fit) = profile.fit {
        println!("D(n) ~ n^-α with α = {:.3} ± {:.3}", fit.alpha, fit.stderr);
    }
    let mut files: Vec<String> = std::fs::read_dir(dir.path())?
        .map(|e| e.map(|e| e.file_name().to_string_lossy().into_owned()))
        .collect::<Result<_, _>>()?;
    files.sort();
    println!("written: {}", files.join(", "));
    print!("{}", std::fs::read_to_string(dir.path().join("profile.csv"))?);
    Ok(())
}
