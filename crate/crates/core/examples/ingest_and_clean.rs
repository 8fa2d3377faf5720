// Writes synthetic environmental and economic source files, merges them
// back with `ingest`, and applies the cleaning rules.

use agrorec::dataset::{clean_dataset, format_cleaning_log, ingest, write_source_csvs, AliasTable, CleaningConfig};
use agrorec::synth::{generate_synthetic, SyntheticSpec};

pub fn run_example() -> agrorec::Result<()> {
    let dir = tempfile::tempdir()?;
    let env_path = dir.path().join("env.csv");
    let econ_path = dir.path().join("econ.csv");

    let data = generate_synthetic(&SyntheticSpec {
        n_rows: 500,
        ..Default::default()
    })?;
    write_source_csvs(&data, std::fs::File::create(&env_path)?, std::fs::File::create(&econ_path)?)?;

    let merged = ingest(&env_path, &econ_path, &AliasTable::default())?;
    println!("merged {} rows", merged.len());

    let (cleaned, _) = clean_dataset(&merged, &CleaningConfig::default())?;
    println!("cleaned {} rows", cleaned.len());
    print!("{}", format_cleaning_log(&cleaned.cleaning_log));
    Ok(())
}

#[allow(dead_code)]
fn main() -> agrorec::Result<()> {
    run_example()
}
