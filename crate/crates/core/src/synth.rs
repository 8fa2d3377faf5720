//! Seeded synthetic crop data with learnable crop signatures, yearly drift on
//! the economic columns and seasonal offsets on the weather columns.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{CropRecord, Dataset, Season, CROPS, STATES};
use crate::error::{Error, Result};
use crate::seed::{stream, StreamRng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SyntheticSpec {
    pub n_rows: usize,
    pub n_states: usize,
    pub n_crops: usize,
    /// Inclusive (first, last) year.
    pub years: (i32, i32),
    pub seed: u64,
    /// Relative per-year growth of every economic column.
    pub drift_strength: f64,
    /// Relative standard deviation of the noise on the economic columns.
    pub noise_std: f64,
    /// Relative standard deviation of the noise on weather, nutrient, area
    /// and yield columns. Large values make crops overlap on these columns.
    pub env_noise_std: f64,
    /// Probability that a row carries its crop's soil type rather than a
    /// uniformly drawn one.
    pub soil_fidelity: f64,
    /// Relative amplitude of the per-season offsets on weather columns.
    pub season_effect: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            n_rows: 2000,
            n_states: STATES.len(),
            n_crops: CROPS.len(),
            years: (2011, 2014),
            seed: 42,
            drift_strength: 0.2,
            noise_std: 0.08,
            env_noise_std: 0.5,
            soil_fidelity: 0.5,
            season_effect: 0.25,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::BadSpec(m));
        if self.n_rows == 0 {
            return bad("n_rows must be positive".into());
        }
        if self.n_states == 0 || self.n_states > STATES.len() {
            return bad(format!("n_states must lie in 1..={}", STATES.len()));
        }
        if self.n_crops < 2 || self.n_crops > CROPS.len() {
            return bad(format!("n_crops must lie in 2..={}", CROPS.len()));
        }
        if self.years.1 < self.years.0 {
            return bad("years must be (first, last) with first <= last".into());
        }
        if !(self.drift_strength >= 0.0) {
            return bad("drift_strength must be non-negative".into());
        }
        if !(self.noise_std >= 0.0 && self.noise_std < 1.0) {
            return bad("noise_std must lie in [0, 1)".into());
        }
        if !(self.env_noise_std >= 0.0 && self.env_noise_std < 1.0) {
            return bad("env_noise_std must lie in [0, 1)".into());
        }
        if !(0.0..=1.0).contains(&self.soil_fidelity) {
            return bad("soil_fidelity must lie in [0, 1]".into());
        }
        if !(self.season_effect >= 0.0 && self.season_effect < 1.0) {
            return bad("season_effect must lie in [0, 1)".into());
        }
        Ok(())
    }
}

const SEASON_CYCLE: [Season; 6] = [
    Season::Kharif,
    Season::Rabi,
    Season::WholeYear,
    Season::Summer,
    Season::Autumn,
    Season::Winter,
];

/// Fixed offsets in [-1, 1] per season: temperature, precipitation, humidity, wind.
fn season_offsets(season: Season) -> [f64; 4] {
    match season {
        Season::Winter => [-1.0, -0.6, -0.2, 0.3],
        Season::Summer => [0.9, -0.8, -0.6, 0.5],
        Season::Kharif => [0.5, 1.0, 0.8, 0.2],
        Season::Autumn => [0.1, 0.3, 0.4, -0.3],
        Season::Rabi => [-0.6, -0.4, 0.0, -0.2],
        Season::WholeYear => [0.0, 0.0, 0.0, 0.0],
    }
}

struct CropProfile {
    primary: Season,
    secondary: Season,
    /// temperature, wind, precipitation, humidity, n, p, k, area, yield
    env: [f64; 9],
    soil: usize,
    /// operational cost, fixed cost, msp
    econ: [f64; 3],
}

fn profile(rng: &mut StreamRng, c: usize) -> CropProfile {
    let mut u = |lo: f64, hi: f64| rng.random_range(lo..hi);
    CropProfile {
        primary: SEASON_CYCLE[c % 3],
        secondary: SEASON_CYCLE[3 + c % 3],
        env: [
            u(15.0, 35.0),
            u(1.0, 4.0),
            u(300.0, 2500.0),
            u(40.0, 85.0),
            u(20.0, 140.0),
            u(10.0, 70.0),
            u(10.0, 70.0),
            u(500.0, 20000.0),
            u(0.5, 4.0),
        ],
        soil: c % 5 + 1,
        econ: [u(8000.0, 40000.0), u(6000.0, 30000.0), u(1000.0, 6000.0)],
    }
}

fn noisy(rng: &mut StreamRng, base: f64, noise: f64) -> f64 {
    if noise == 0.0 {
        return base;
    }
    // sum of uniforms: cheap, bounded, roughly normal with unit variance
    let z: f64 = (0..12).map(|_| rng.random::<f64>()).sum::<f64>() - 6.0;
    base * (1.0 + noise * z).max(0.05)
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut profile_rng = stream(spec.seed, "synth-profile", 0);
    let profiles: Vec<CropProfile> = (0..spec.n_crops).map(|c| profile(&mut profile_rng, c)).collect();
    let years: Vec<i32> = (spec.years.0..=spec.years.1).collect();

    // economic values are shared by every row with the same (state, year, crop)
    let mut econ_rng = stream(spec.seed, "synth-econ", 0);
    let mut econ: HashMap<(usize, i32, usize), [f64; 3]> = HashMap::new();
    for s in 0..spec.n_states {
        for &y in &years {
            for (c, p) in profiles.iter().enumerate() {
                let growth = 1.0 + spec.drift_strength * (y - spec.years.0) as f64;
                let op = round2(noisy(&mut econ_rng, p.econ[0] * growth, spec.noise_std));
                let fixed = round2(noisy(&mut econ_rng, p.econ[1] * growth, spec.noise_std));
                // MSP is a national price: no per-state noise
                let msp = round2(p.econ[2] * growth);
                econ.insert((s, y, c), [op, fixed, msp]);
            }
        }
    }

    let mut rng = stream(spec.seed, "synth-rows", 0);
    let mut records = Vec::with_capacity(spec.n_rows);
    for i in 0..spec.n_rows {
        let year = years[i * years.len() / spec.n_rows];
        let s = rng.random_range(0..spec.n_states);
        let c = rng.random_range(0..spec.n_crops);
        let p = &profiles[c];
        let season = if rng.random::<f64>() < 0.75 { p.primary } else { p.secondary };
        let off = season_offsets(season);
        let e = spec.season_effect;
        let n = spec.env_noise_std;
        let temperature = round2(noisy(&mut rng, p.env[0] * (1.0 + e * off[0]), n));
        let wind_speed = round2(noisy(&mut rng, p.env[1] * (1.0 + e * off[3]), n));
        let precipitation = round2(noisy(&mut rng, p.env[2] * (1.0 + e * off[1]), n));
        let humidity = round2(noisy(&mut rng, p.env[3] * (1.0 + e * off[2]), n));
        let nutrient_n = round2(noisy(&mut rng, p.env[4], n));
        let nutrient_p = round2(noisy(&mut rng, p.env[5], n));
        let nutrient_k = round2(noisy(&mut rng, p.env[6], n));
        let area = round2(noisy(&mut rng, p.env[7], n).max(1.0));
        let yield_ = noisy(&mut rng, p.env[8], n);
        let production = round2(area * yield_);
        let soil = if rng.random::<f64>() < spec.soil_fidelity {
            p.soil
        } else {
            rng.random_range(1..=5)
        };
        let [operational_cost, fixed_cost, msp] = econ[&(s, year, c)];
        records.push(CropRecord {
            state: STATES[s].to_string(),
            district: format!("{}-D{}", STATES[s], rng.random_range(1..=4)),
            year,
            season,
            crop: CROPS[c].to_string(),
            area,
            temperature,
            wind_speed,
            precipitation,
            humidity,
            soil_type: soil.to_string(),
            n: nutrient_n,
            p: nutrient_p,
            k: nutrient_k,
            production: Some(production),
            yield_: Some(production / area),
            operational_cost,
            fixed_cost,
            total_cost: round2(operational_cost + fixed_cost),
            msp,
            extras: Vec::new(),
        });
    }
    let mut data = Dataset::new(records);
    data.provenance
        .push(format!("synthetic seed={} rows={}", spec.seed, spec.n_rows));
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::write_dataset_csv;
    use crate::eda::{grouped_aggregate, GroupBy, GroupStat};

    #[test]
    fn same_spec_same_bytes() {
        let spec = SyntheticSpec {
            n_rows: 200,
            ..Default::default()
        };
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_dataset_csv(&generate_synthetic(&spec).unwrap(), &mut a).unwrap();
        write_dataset_csv(&generate_synthetic(&spec).unwrap(), &mut b).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn no_drift_no_noise_constant_per_crop_season() {
        let spec = SyntheticSpec {
            n_rows: 400,
            drift_strength: 0.0,
            noise_std: 0.0,
            env_noise_std: 0.0,
            ..Default::default()
        };
        let data = generate_synthetic(&spec).unwrap();
        let mut seen: HashMap<(String, Season), Vec<f64>> = HashMap::new();
        for r in &data.records {
            let v = vec![
                r.temperature,
                r.precipitation,
                r.humidity,
                r.wind_speed,
                r.msp,
                r.operational_cost,
                r.fixed_cost,
            ];
            let prev = seen.entry((r.crop.clone(), r.season)).or_insert_with(|| v.clone());
            assert_eq!(*prev, v);
        }
    }

    #[test]
    fn yearly_msp_increases_under_drift() {
        let data = generate_synthetic(&SyntheticSpec::default()).unwrap();
        let means = grouped_aggregate(&data, "msp", GroupBy::Year, GroupStat::Mean).unwrap();
        assert_eq!(means.len(), 4);
        assert!(means.windows(2).all(|w| w[1].value > w[0].value));
    }

    #[test]
    fn invalid_specs() {
        for spec in [
            SyntheticSpec {
                n_rows: 0,
                ..Default::default()
            },
            SyntheticSpec {
                drift_strength: -1.0,
                ..Default::default()
            },
            SyntheticSpec {
                n_crops: 40,
                ..Default::default()
            },
        ] {
            assert!(matches!(generate_synthetic(&spec), Err(Error::BadSpec(_))));
        }
    }
}
