// Grouped lag columns on temporally sorted data.

use agrorec::dataset::{CategoricalField, Dataset, Season};
use agrorec::features::{make_lags, temporal_sort, ImputePolicy, LagOrder, LagSpec};

fn row(year: i32, crop: &str, msp: f64) -> agrorec::dataset::CropRecord {
    let mut r = agrorec::dataset::CropRecord::placeholder("Punjab", year, Season::Rabi, crop);
    r.msp = msp;
    r
}

pub fn run_example() -> agrorec::Result<()> {
    // two crops interleaved and out of order
    let data = Dataset::new(vec![
        row(2013, "Wheat", 120.0),
        row(2011, "Gram", 300.0),
        row(2011, "Wheat", 100.0),
        row(2012, "Gram", 310.0),
        row(2012, "Wheat", 110.0),
        row(2014, "Wheat", 130.0),
    ]);
    let sorted = temporal_sort(&data);
    let spec = LagSpec {
        columns: vec!["msp".into()],
        group_keys: vec![CategoricalField::State, CategoricalField::Crop],
        order_key: LagOrder::Year,
        max_order: 2,
        impute_policy: ImputePolicy::GroupMedian,
    };
    let (lagged, report) = make_lags(&sorted, &spec)?;
    let lag1 = lagged.numeric_column("lag1_msp")?;
    let lag2 = lagged.numeric_column("lag2_msp")?;
    println!("year crop     msp  lag1  lag2");
    for (i, r) in lagged.records.iter().enumerate() {
        println!("{} {:<6} {:>5} {:>5} {:>5}", r.year, r.crop, r.msp, lag1[i], lag2[i]);
    }
    for c in &report.columns {
        println!("{}: {} missing, {} imputed", c.name, c.missing, c.imputed);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> agrorec::Result<()> {
    run_example()
}
