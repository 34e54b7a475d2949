#![allow(dead_code)]

use std::path::PathBuf;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use hyperslice::carve::carve_after_split;
use hyperslice::feature::{Column, FeatureKind, FeatureSchema};
use hyperslice::io::{read_csv, read_schema};
use hyperslice::tree::{PartitionModel, SplitEvent};
use hyperslice::{Dataset, PartitionConfig, ProxyMethod};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn wine() -> Dataset {
    let schema = read_schema(fixture("wine_schema.json")).unwrap();
    read_csv(fixture("wine.csv"), &schema).unwrap()
}

pub fn wine_config(m: usize) -> PartitionConfig {
    PartitionConfig {
        p_star: 2,
        min_l: 0.1,
        min_slice_size_frac: 0.2,
        epsilon: 0.001,
        trim_fraction: 0.0,
        proxy: ProxyMethod::GowerKnn { m: Some(m) },
        ..Default::default()
    }
}

const ORDERED_LEVELS: [&str; 6] = ["none", "low", "mid", "high", "very high", "max"];

/// Random mixed-type dataset. Column 0 is always a non-constant real.
pub fn random_dataset(rng: &mut ChaCha8Rng) -> Dataset {
    let n = rng.gen_range(20..=300);
    let p = rng.gen_range(1..=5);
    let mut columns = Vec::with_capacity(p);
    for j in 0..p {
        let kind = if j == 0 {
            FeatureKind::Real
        } else {
            match rng.gen_range(0..4) {
                0 => FeatureKind::Real,
                1 => FeatureKind::Integer,
                2 => FeatureKind::Nominal,
                _ => FeatureKind::Ordered,
            }
        };
        let name = format!("f{j}");
        let clustered = rng.gen_bool(0.5);
        let column = match kind {
            FeatureKind::Real => {
                let mut values: Vec<f64> = (0..n)
                    .map(|_| {
                        if clustered && rng.gen_bool(0.7) {
                            rng.gen_range(0.0..2.0)
                        } else {
                            rng.gen_range(0.0..10.0)
                        }
                    })
                    .map(|v: f64| (v * 100.0).round() / 100.0)
                    .collect();
                values[0] = 0.0;
                values[n - 1] = 10.0;
                Column {
                    schema: FeatureSchema::new(name, kind),
                    values,
                    labels: Vec::new(),
                    code_offset: 0,
                }
            }
            FeatureKind::Integer => {
                let hi = rng.gen_range(1..40);
                Column {
                    schema: FeatureSchema::new(name, kind),
                    values: (0..n).map(|_| rng.gen_range(0..=hi) as f64).collect(),
                    labels: Vec::new(),
                    code_offset: 0,
                }
            }
            FeatureKind::Nominal => {
                let k = rng.gen_range(2..=5);
                let weights: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
                let total: f64 = weights.iter().sum();
                Column {
                    schema: FeatureSchema::new(name, kind),
                    values: (0..n)
                        .map(|_| {
                            let mut u = rng.gen_range(0.0..total);
                            for (c, w) in weights.iter().enumerate() {
                                if u < *w {
                                    return c as f64;
                                }
                                u -= w;
                            }
                            (k - 1) as f64
                        })
                        .collect(),
                    labels: (0..k).map(|c| format!("L{c}")).collect(),
                    code_offset: 0,
                }
            }
            FeatureKind::Ordered => {
                let lo = rng.gen_range(0..2);
                let hi = rng.gen_range(lo + 1..ORDERED_LEVELS.len());
                let raw: Vec<usize> = (0..n).map(|_| rng.gen_range(lo..=hi)).collect();
                let min = *raw.iter().min().unwrap();
                Column {
                    schema: FeatureSchema::ordered(name, ORDERED_LEVELS),
                    values: raw.iter().map(|&r| (r - min) as f64).collect(),
                    labels: Vec::new(),
                    code_offset: min,
                }
            }
        };
        columns.push(column);
    }
    Dataset::from_columns(columns).unwrap()
}

pub fn random_config(rng: &mut ChaCha8Rng) -> PartitionConfig {
    PartitionConfig {
        p_star: rng.gen_range(1..=3),
        min_l: [0.05, 0.1, 0.3][rng.gen_range(0..3)],
        min_slice_size_frac: [0.02, 0.05, 0.1, 0.2][rng.gen_range(0..4)],
        epsilon: 0.001,
        min_mse_decrease_frac: [0.0, 0.01][rng.gen_range(0..2)],
        trim_fraction: [0.0, 0.01, 0.05][rng.gen_range(0..3)],
        proxy: if rng.gen_bool(0.8) {
            ProxyMethod::GowerKnn { m: None }
        } else {
            ProxyMethod::IsolationForest {
                trees: 20,
                subsample: 64,
            }
        },
        seed: rng.gen(),
    }
}

/// Checks the structural invariants of a model grown on `data`; returns a
/// description of the first violation.
pub fn check_model(model: &PartitionModel, data: &Dataset) -> Result<(), String> {
    let config = &model.config;
    let total = model.total_volume();
    if (total - 1.0).abs() > 1e-6 {
        return Err(format!("volume sum {total}"));
    }
    let aligned = model.space.align(data).map_err(|e| e.to_string())?;
    let trimmed: std::collections::HashSet<usize> = model.trimmed_rows.iter().copied().collect();
    let kept = data.n_rows() - trimmed.len();
    let min_leaf = config.min_leaf(kept);
    let mut counts = vec![0usize; model.k()];
    for i in (0..data.n_rows()).filter(|i| !trimmed.contains(i)) {
        let inside: Vec<usize> = (0..model.k()).filter(|&k| model.slices[k].contains_row(&aligned, i)).collect();
        if inside.len() != 1 {
            return Err(format!("row {i} lies in {} slices", inside.len()));
        }
        counts[inside[0]] += 1;
    }
    for (k, s) in model.slices.iter().enumerate() {
        if counts[k] != s.support {
            return Err(format!("slice {} support {} but {} members", s.id, s.support, counts[k]));
        }
        if s.dimension() > config.p_star {
            return Err(format!("slice {} has dimension {}", s.id, s.dimension()));
        }
        if s.is_empty {
            if s.support != 0 {
                return Err(format!("empty slice {} has support {}", s.id, s.support));
            }
            for sub in s.subsets.iter().filter(|x| !x.complete) {
                let len = model.space.length(sub, config.epsilon).map_err(|e| e.to_string())?;
                if !(len > config.min_l) {
                    return Err(format!("empty slice {} has a side of length {len}", s.id));
                }
            }
        } else if model.k() > 1 && s.support < min_leaf {
            return Err(format!("slice {} support {} below {min_leaf}", s.id, s.support));
        }
    }
    Ok(())
}

/// Largest |V(parent) − V(children) − V(empties)| over the events, and
/// whether re-carving every child emits nothing.
pub fn check_events(model: &PartitionModel, data: &Dataset, events: &[SplitEvent]) -> (f64, bool) {
    let aligned = model.space.align(data).unwrap();
    let trimmed: std::collections::HashSet<usize> = model.trimmed_rows.iter().copied().collect();
    let eps = model.config.epsilon;
    let mut worst = 0.0f64;
    let mut idempotent = true;
    for e in events {
        let parent = model.space.volume(&e.parent, eps).unwrap();
        let parts: f64 = e
            .children
            .iter()
            .chain(&e.empties)
            .map(|s| model.space.volume(s, eps).unwrap())
            .sum();
        worst = worst.max((parent - parts).abs());
        for child in &e.children {
            let members: Vec<usize> = (0..aligned.n_rows())
                .filter(|i| !trimmed.contains(i) && child.contains_row(&aligned, *i))
                .collect();
            let (again, emitted) =
                carve_after_split(child, &aligned, &members, &model.space, &model.config.carve_params()).unwrap();
            if !emitted.is_empty() || &again != child {
                idempotent = false;
            }
        }
    }
    (worst, idempotent)
}
