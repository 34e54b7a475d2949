//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Runs as a plain binary (`harness = false`) so that the report is printed
//! by `cargo test` without `--nocapture`.

mod common;

use std::collections::BTreeSet;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hyperslice::feature::{FeatureKind, FeatureSchema};
use hyperslice::geometry::{subset_length, Constraint, FeatureSpace, Interval, Slice, Subset};
use hyperslice::positivity::{remove_slices, screen_positivity, PositivityConfig};
use hyperslice::proxy::core_distances;
use hyperslice::tree::{build_partition, build_partition_traced, PartitionModel};
use hyperslice::uniformity::{chisq_upper_tail, uniformity_statistic};
use hyperslice::{Dataset, Domain, PartitionConfig};

use common::{check_events, check_model, fixture, random_config, random_dataset, wine, wine_config};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn real_domain(lo: f64, hi: f64, n_unique: usize) -> Domain {
    Domain {
        name: "x".into(),
        kind: FeatureKind::Real,
        lo,
        hi,
        levels: Vec::new(),
        ordered_levels: Vec::new(),
        code_offset: 0,
        size: hi - lo,
        n_unique,
        unique_values: Vec::new(),
    }
}

fn c1_length_calculus() -> Outcome {
    let start = Instant::now();
    let d = real_domain(10.95, 110.95, 500);
    let point = Subset::new(0, Constraint::Interval(Interval::closed(12.5, 12.5)), &d);
    let span = Subset::new(0, Constraint::Interval(Interval::closed(12.5, 62.5)), &d);
    // n_s counts the distinct observed values inside each subset: 1 and 3.
    let a = subset_length(&point, &d, &[12.5], 0.001).unwrap();
    let b = subset_length(&span, &d, &[12.5, 40.0, 62.5], 0.001).unwrap();
    let elapsed = start.elapsed();
    let err = (a - 0.000002).abs().max((b - 0.499506).abs());
    Outcome::new(
        err <= 1e-9 && elapsed < Duration::from_millis(1),
        format!("L([12.5,12.5])={a:.9}, L([12.5,62.5])={b:.9}, max err {err:.1e}, {elapsed:?}"),
    )
}

fn c2_gap_length() -> Outcome {
    let d = real_domain(187.0, 711.0, 40);
    let gap = Subset::new(0, Constraint::Interval(Interval::open(469.0, 666.0)), &d);
    let l = subset_length(&gap, &d, &[], 0.001).unwrap();
    Outcome::new(close(l, 0.3755782, 1e-7), format!("L((469,666))={l:.9}"))
}

/// Reference wine slices as (FLAVANOIDS, PROLINE) intervals.
fn wine_table_slices(space: &FeatureSpace) -> Vec<Slice> {
    let t = 3.3049999475479126;
    let defs = [
        (Interval::closed(2.41, t), (679.5, 882.5)),
        (Interval::closed(2.19, t), (882.5, 1072.5)),
        (Interval::closed(2.19, t), (1072.5, 1515.5)),
        (Interval::closed(t, 3.93), (984.5, 1680.5)),
        (Interval::open(2.19, 2.41), (679.5, 882.5)),
        (Interval::open(2.19, t), (1515.5, 1680.5)),
        (Interval::open(t, 3.93), (679.5, 984.5)),
    ];
    defs.iter()
        .map(|(f, (plo, phi))| {
            space
                .full_slice()
                .with_constraint(0, Constraint::Interval(*f), space.domain(0))
                .with_constraint(1, Constraint::Interval(Interval::open(*plo, *phi)), space.domain(1))
        })
        .collect()
}

fn c3_wine_geometry() -> Outcome {
    let data = wine();
    let start = Instant::now();
    let space = FeatureSpace::from_dataset(&data).unwrap();
    let slices = wine_table_slices(&space);
    let df = space.domain(0);
    let mut problems = Vec::new();

    let supports: Vec<usize> = slices
        .iter()
        .map(|s| (0..data.n_rows()).filter(|&i| s.contains_row(&data, i)).count())
        .collect();
    if supports != [10, 15, 15, 10, 0, 0, 0] {
        problems.push(format!("supports {supports:?}"));
    }

    let raw_f = [
        0.5143677859470761,
        0.6408045675562717,
        0.6408045675562717,
        0.3591954324437285,
        0.12643678160919553,
        0.6408045675562717,
        0.3591954324437285,
    ];
    let raw_p = [
        0.20279720279720279,
        0.18981018981018982,
        0.44255744255744256,
        0.6953046953046953,
        0.20279720279720279,
        0.16483516483516483,
        0.3046953046953047,
    ];
    for (k, s) in slices.iter().enumerate() {
        let rf = s.subset(0).interval().unwrap().width() / df.size;
        let rp = space.length(s.subset(1), 0.001).unwrap();
        if !close(rf, raw_f[k], 1e-12) || !close(rp, raw_p[k], 1e-12) {
            problems.push(format!("raw lengths of slice {}: {rf} {rp}", k + 1));
        }
    }

    // Adjusted lengths count distinct values among each slice's member rows.
    let n_members = [9usize, 14, 14, 9, 0, 0, 0];
    let reference_adj = [
        0.5140677038754148,
        0.6404970963220488,
        0.6404970963220488,
        0.2442229365186738,
        0.20259440559440559,
        0.6401637629887155,
        0.35883623701128475,
    ];
    let reference_vol = [0.10425149, 0.12157288, 0.28345676, 0.24975027, 0.02564103, 0.10562713, 0.10933572];
    let mut member_sum = 0.0;
    for (k, s) in slices.iter().enumerate() {
        let mut member_values: Vec<f64> = (0..data.n_rows())
            .filter(|&i| s.contains_row(&data, i))
            .map(|i| data.value(i, 0))
            .collect();
        member_values.sort_by(f64::total_cmp);
        member_values.dedup();
        if member_values.len() != n_members[k] {
            problems.push(format!("slice {} has {} distinct member values", k + 1, member_values.len()));
        }
        let adj = subset_length(s.subset(0), df, &member_values, 0.001).unwrap();
        let vol = adj * raw_p[k];
        member_sum += vol;
        let formula = 0.999 * raw_f[k] + 0.001 * n_members[k] as f64 / 42.0;
        if !close(adj, formula, 1e-12) {
            problems.push(format!("adjusted length of slice {} deviates from the formula", k + 1));
        }
        match k {
            // Reference adjusted lengths of rows 4 and 5 disagree with their raw lengths.
            3 | 4 => {
                if close(adj, reference_adj[k], 1e-6) {
                    problems.push(format!("row {} unexpectedly matches the reference value", k + 1));
                }
            }
            _ => {
                if !close(adj, reference_adj[k], 1e-6) {
                    problems.push(format!("adjusted length of slice {}: {adj} vs {}", k + 1, reference_adj[k]));
                }
            }
        }
        match k {
            // Reference volumes of rows 4-6 are products of raw lengths.
            3..=5 => {
                if !close(raw_f[k] * raw_p[k], reference_vol[k], 1e-6) {
                    problems.push(format!("reference volume of row {} is not the raw product", k + 1));
                }
            }
            _ => {
                if !close(vol, reference_vol[k], 1e-6) {
                    problems.push(format!("volume of slice {}: {vol} vs {}", k + 1, reference_vol[k]));
                }
            }
        }
    }
    let library_sum: f64 = slices.iter().map(|s| space.volume(s, 0.001).unwrap()).sum();
    let elapsed = start.elapsed();
    if !close(library_sum, 1.0, 4e-4) {
        problems.push(format!("volume sum {library_sum}"));
    }
    if elapsed >= Duration::from_millis(10) {
        problems.push(format!("took {elapsed:?}"));
    }
    Outcome::new(
        problems.is_empty(),
        format!(
            "supports {supports:?}, volume sum {library_sum:.7} (member-count basis {member_sum:.7}), {elapsed:?}{}",
            if problems.is_empty() { String::new() } else { format!("; {}", problems.join("; ")) }
        ),
    )
}

fn boundaries(model: &PartitionModel) -> BTreeSet<u64> {
    model
        .slices
        .iter()
        .flat_map(|s| s.subsets.iter().filter_map(|x| x.interval().map(|iv| [iv.lo, iv.hi])))
        .flatten()
        .map(f64::to_bits)
        .collect()
}

fn c4_wine_end_to_end() -> Outcome {
    let data = wine();
    let expected: BTreeSet<u64> = [3.3049999475479126, 882.5, 1072.5, 984.5, 1515.5, 2.41, 2.19, 3.93, 679.5, 1680.5]
        .iter()
        .map(|v: &f64| v.to_bits())
        .collect();
    let mut exact = Vec::new();
    let mut notes = Vec::new();
    let mut structural = true;
    for m in [3, 5, 10] {
        let model = build_partition(&data, &wine_config(m)).unwrap();
        if let Err(e) = check_model(&model, &data) {
            structural = false;
            notes.push(format!("m={m}: {e}"));
        }
        let found = boundaries(&model);
        let extra: Vec<f64> = found.difference(&expected).map(|&b| f64::from_bits(b)).collect();
        if model.k() == 7 && extra.is_empty() {
            exact.push(m);
        } else {
            notes.push(format!("m={m}: K={} extra bounds {extra:?}", model.k()));
        }
    }
    // Supplementary: the nearest-neighbour proxy induces the reference
    // split order.
    let m1 = build_partition(&data, &wine_config(1)).unwrap();
    let m1_exact = m1.k() == 7 && boundaries(&m1).is_subset(&expected);
    notes.push(format!("m=1 reproduces the reference slices: {m1_exact}"));
    Outcome::new(
        structural && !exact.is_empty(),
        format!("exact for m in {exact:?}; structural invariants {}; {}", if structural { "hold" } else { "VIOLATED" }, notes.join("; ")),
    )
}

fn c5_c8_property_suite() -> (Outcome, Outcome) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    let mut idempotent = true;
    let mut kinds = BTreeSet::new();
    let mut empties = 0usize;
    for case in 0..1000 {
        let data = random_dataset(&mut rng);
        let config = random_config(&mut rng);
        for c in data.columns() {
            kinds.insert(format!("{:?}", c.kind()));
        }
        let target = match hyperslice::proxy::compute_proxy(
            &data.drop_constant_features().0,
            &config.proxy,
            config.seed,
        ) {
            Ok(t) => t,
            Err(e) => {
                failures.push(format!("case {case}: proxy {e}"));
                continue;
            }
        };
        let (reduced, _) = data.drop_constant_features();
        match build_partition_traced(&reduced, &target, &config) {
            Ok((model, events)) => {
                if let Err(e) = check_model(&model, &data) {
                    failures.push(format!("case {case}: {e}"));
                }
                empties += model.slices.iter().filter(|s| s.is_empty).count();
                let (w, idem) = check_events(&model, &reduced, &events);
                worst = worst.max(w);
                idempotent &= idem;
            }
            Err(e) => failures.push(format!("case {case}: {e}")),
        }
    }
    let elapsed = start.elapsed();
    let c5 = Outcome::new(
        failures.is_empty() && elapsed < Duration::from_secs(60) && kinds.len() == 4,
        format!(
            "1000 datasets, kinds {kinds:?}, {empties} empty slices, {elapsed:.2?}{}",
            failures.first().map(|f| format!("; first failure: {f}")).unwrap_or_default()
        ),
    );
    let c8 = Outcome::new(
        worst <= 1e-9 && idempotent,
        format!("max |V(parent) - V(parts)| = {worst:.1e}, idempotent: {idempotent}"),
    );
    (c5, c8)
}

/// Naive oracle: Gower distances by definition, full sort, m-th entry.
fn brute_core_distances(rows: &[Vec<f64>], nominal: &[bool], m: usize) -> Vec<f64> {
    let p = nominal.len();
    let ranges: Vec<f64> = (0..p)
        .map(|j| {
            let col = rows.iter().map(|r| r[j]);
            col.clone().fold(f64::NEG_INFINITY, f64::max) - col.fold(f64::INFINITY, f64::min)
        })
        .collect();
    (0..rows.len())
        .map(|i| {
            let mut d: Vec<f64> = (0..rows.len())
                .filter(|&k| k != i)
                .map(|k| {
                    let mut s = 0.0;
                    for j in 0..p {
                        s += if nominal[j] {
                            if rows[i][j] == rows[k][j] {
                                0.0
                            } else {
                                1.0
                            }
                        } else {
                            (rows[i][j] - rows[k][j]).abs() / ranges[j]
                        };
                    }
                    s / p as f64
                })
                .collect();
            d.sort_by(|a, b| a.partial_cmp(b).unwrap());
            d[m - 1]
        })
        .collect()
}

/// Upper tail of the chi-squared law by Simpson quadrature after t = u².
fn quadrature_upper_tail(x: f64, df: usize) -> f64 {
    let k = df as f64;
    let mut ln_gamma = if df % 2 == 0 { 0.0 } else { 0.5 * std::f64::consts::PI.ln() };
    let mut s = if df % 2 == 0 { 1.0 } else { 0.5 };
    while s < k / 2.0 {
        ln_gamma += s.ln();
        s += 1.0;
    }
    let ln_norm = (k / 2.0) * 2f64.ln() + ln_gamma;
    // Density of t = u² in u; x > 0 keeps u away from the origin.
    let g = |u: f64| (2f64.ln() + (k - 1.0) * u.ln() - u * u / 2.0 - ln_norm).exp();
    let a = x.sqrt();
    let b = a.max((k - 1.0).max(0.0).sqrt()) + 40.0;
    let steps = 200_000;
    let h = (b - a) / steps as f64;
    let mut sum = g(a) + g(b);
    for i in 1..steps {
        sum += g(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * h / 3.0
}

fn c6_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    let mut mismatches = 0;
    for _ in 0..100 {
        let n = rng.gen_range(3..=200);
        let p = rng.gen_range(1..=4);
        let nominal: Vec<bool> = (0..p).map(|j| j > 0 && rng.gen_bool(0.3)).collect();
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..p)
                    .map(|j| {
                        if nominal[j] {
                            (i % 2 + rng.gen_range(0..3)) as f64
                        } else if i == 0 {
                            0.0
                        } else if i == 1 {
                            7.0
                        } else {
                            (rng.gen_range(0.0..7.0f64) * 10.0).round() / 10.0
                        }
                    })
                    .collect()
            })
            .collect();
        let schema = (0..p)
            .map(|j| {
                FeatureSchema::new(format!("x{j}"), if nominal[j] { FeatureKind::Nominal } else { FeatureKind::Real })
            })
            .collect();
        let data = Dataset::from_numeric_rows(schema, &rows).unwrap();
        let m = rng.gen_range(1..n);
        let got = core_distances(&data, m).unwrap().values;
        if got != brute_core_distances(&rows, &nominal, m) {
            mismatches += 1;
        }
    }
    let mut worst = 0.0f64;
    for df in [1usize, 2, 3, 4, 5, 7, 10, 15, 25, 50] {
        for f in [0.05, 0.5, 1.0, 2.0, 3.5] {
            let x = f * df as f64;
            let err = (chisq_upper_tail(x, df as f64).unwrap() - quadrature_upper_tail(x, df)).abs();
            worst = worst.max(err);
        }
    }
    Outcome::new(
        mismatches == 0 && worst <= 1e-8,
        format!("core distances: {mismatches}/100 mismatches; chi-squared tail max err {worst:.1e} on 50 points"),
    )
}

fn uniform_rows(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| vec![rng.gen_range(0.0..10.0), rng.gen_range(0.0..5.0)]).collect()
}

fn clustered_rows(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
    let centers = [(1.5, 1.0), (8.0, 4.0), (5.0, 2.5)];
    (0..n)
        .map(|i| {
            if i < 4 {
                vec![[0.0, 10.0][i % 2], [0.0, 5.0][i / 2]]
            } else {
                let (cx, cy) = centers[i % 3];
                vec![cx + rng.gen_range(-0.4..0.4), cy + rng.gen_range(-0.25..0.25)]
            }
        })
        .collect()
}

fn xy(rows: &[Vec<f64>]) -> Dataset {
    let schema = vec![
        FeatureSchema::new("x", FeatureKind::Real),
        FeatureSchema::new("y", FeatureKind::Real),
    ];
    Dataset::from_numeric_rows(schema, rows).unwrap()
}

fn c7_uniformity() -> Outcome {
    let grid: Vec<Vec<f64>> = (0..100).map(|i| vec![(i % 10) as f64, (i / 10) as f64]).collect();
    let grid_data = xy(&grid);
    // Leaves of half the rows with a full-variance decrease admit no split.
    let grid_model = build_partition(
        &grid_data,
        &PartitionConfig {
            trim_fraction: 0.0,
            min_slice_size_frac: 0.5,
            min_mse_decrease_frac: 1.0,
            ..Default::default()
        },
    )
    .unwrap();
    let single = uniformity_statistic(&grid_model, &grid_data).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let config = PartitionConfig::default();
    let (mut rejections, mut wins) = (0, 0);
    for _ in 0..200 {
        let u = xy(&uniform_rows(&mut rng, 200));
        let c = xy(&clustered_rows(&mut rng, 200));
        let ru = uniformity_statistic(&build_partition(&u, &config).unwrap(), &u).unwrap();
        let rc = uniformity_statistic(&build_partition(&c, &config).unwrap(), &c).unwrap();
        if ru.p_value < 0.05 {
            rejections += 1;
        }
        if rc.normalized > ru.normalized {
            wins += 1;
        }
    }
    Outcome::new(
        single.k == 1 && single.chi == 0.0 && rejections <= 20 && wins >= 190,
        format!(
            "grid: K={} chi={}; uniform rejections {rejections}/200; clustered > uniform in {wins}/200",
            single.k, single.chi
        ),
    )
}

fn c9_positivity() -> Outcome {
    // Arm 1 repeats arm 0 minus the planted group G, which exists only in arm 0.
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut base = Vec::new();
    for _ in 0..400 {
        base.push((rng.gen_range(0.0..10.0f64), ["A", "B", "C"][rng.gen_range(0..3)].to_string()));
    }
    let mut cells: Vec<[String; 3]> = Vec::new();
    for (x, g) in &base {
        cells.push([format!("{x:.3}"), g.clone(), "0".into()]);
    }
    for _ in 0..500 {
        cells.push([format!("{:.3}", rng.gen_range(20.0..30.0f64)), "G".into(), "0".into()]);
    }
    for (x, g) in &base {
        cells.push([format!("{x:.3}"), g.clone(), "1".into()]);
    }
    let schema = vec![
        FeatureSchema::new("X", FeatureKind::Real),
        FeatureSchema::new("GROUP", FeatureKind::Nominal),
        FeatureSchema::new("T", FeatureKind::Nominal),
    ];
    let rows: Vec<Vec<&str>> = cells.iter().map(|r| r.iter().map(String::as_str).collect()).collect();
    let data = hyperslice::feature::validate_dataset(&["X", "GROUP", "T"], &rows, &schema).unwrap();
    let g_rows: BTreeSet<usize> = (400..900).collect();

    let screening = screen_positivity(&data, "T", &PartitionConfig::default(), &PositivityConfig::default()).unwrap();
    let space = screening.space();
    let aligned = space.align(&data).unwrap();
    let group_flagged = screening.candidates.iter().any(|c| {
        let members: BTreeSet<usize> = (0..data.n_rows()).filter(|&i| c.base.contains_row(&aligned, i)).collect();
        c.flagged && g_rows.is_subset(&members)
    });
    let (filtered, report) = remove_slices(&data, space, "T", &screening.candidates).unwrap();
    // Brute-force union of the flagged base slices.
    let expected: Vec<usize> = (0..data.n_rows())
        .filter(|&i| screening.candidates.iter().any(|c| c.flagged && c.base.contains_row(&aligned, i)))
        .collect();
    let removed: BTreeSet<usize> = report.removed_rows.iter().copied().collect();
    let arm1_removed = report.removed_rows.iter().filter(|&&i| i >= 900).count();
    let g_removed = report.removed_rows.iter().filter(|i| g_rows.contains(i)).count();
    Outcome::new(
        group_flagged
            && report.removed_rows == expected
            && removed == g_rows
            && arm1_removed == 0
            && filtered.n_rows() == data.n_rows() - 500,
        format!(
            "{} candidates, {} flagged; G base flagged: {group_flagged}; removed {} rows ({g_removed} from G, {arm1_removed} from arm 1)",
            screening.candidates.len(),
            screening.candidates.iter().filter(|c| c.flagged).count(),
            report.removed_total
        ),
    )
}

fn c10_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_hyperslice");
    let dir = tempfile::tempdir().unwrap();
    let wine_csv = fixture("wine.csv");
    let wine_schema = fixture("wine_schema.json");
    let treat_csv = fixture("treatment.csv");
    let treat_schema = fixture("treatment_schema.json");
    let run = |tag: &str| -> Vec<Vec<u8>> {
        let p = |name: &str| dir.path().join(format!("{tag}-{name}"));
        let steps: Vec<(Vec<String>, Vec<std::path::PathBuf>)> = vec![
            (
                vec!["partition".into(), "--data".into(), wine_csv.display().to_string(), "--schema".into(), wine_schema.display().to_string(), "--out".into(), p("knn.json").display().to_string()],
                vec![p("knn.json")],
            ),
            (
                vec!["partition".into(), "--data".into(), wine_csv.display().to_string(), "--schema".into(), wine_schema.display().to_string(), "--proxy".into(), "iforest".into(), "--trees".into(), "50".into(), "--subsample".into(), "32".into(), "--seed".into(), "11".into(), "--out".into(), p("if.json").display().to_string()],
                vec![p("if.json")],
            ),
            (
                vec!["metrics".into(), "--model".into(), p("if.json").display().to_string(), "--data".into(), wine_csv.display().to_string(), "--out".into(), p("metrics.json").display().to_string()],
                vec![p("metrics.json")],
            ),
            (
                vec!["render".into(), "--model".into(), p("knn.json").display().to_string(), "--data".into(), wine_csv.display().to_string(), "--x".into(), "FLAVANOIDS".into(), "--y".into(), "PROLINE".into(), "--out".into(), p("plot.svg").display().to_string()],
                vec![p("plot.svg")],
            ),
            (
                vec!["screen-positivity".into(), "--data".into(), treat_csv.display().to_string(), "--schema".into(), treat_schema.display().to_string(), "--treatment".into(), "TRAINING".into(), "--out".into(), p("cand.json").display().to_string(), "--table".into(), p("cand.txt").display().to_string()],
                vec![p("cand.json"), p("cand.txt")],
            ),
        ];
        let mut outputs = Vec::new();
        for (args, files) in steps {
            let status = Command::new(bin).args(&args).output().unwrap();
            assert!(status.status.success(), "{args:?}: {}", String::from_utf8_lossy(&status.stderr));
            for f in files {
                outputs.push(std::fs::read(f).unwrap());
            }
        }
        outputs
    };
    let a = run("a");
    let b = run("b");
    let same = a == b;
    Outcome::new(same, format!("{} output files compared byte-for-byte across two runs", a.len()))
}

fn main() -> ExitCode {
    let (c5, c8) = c5_c8_property_suite();
    let results = [
        ("C1", "length calculus golden values", c1_length_calculus()),
        ("C2", "split-gap length", c2_gap_length()),
        ("C3", "wine slice geometry", c3_wine_geometry()),
        ("C4", "wine end-to-end boundaries", c4_wine_end_to_end()),
        ("C5", "tiling property suite", c5),
        ("C6", "oracle equivalence", c6_oracles()),
        ("C7", "uniformity metric", c7_uniformity()),
        ("C8", "carving conservation and idempotence", c8),
        ("C9", "positivity screening", c9_positivity()),
        ("C10", "determinism", c10_determinism()),
    ];
    let mut failed = 0;
    for (id, name, outcome) in &results {
        println!("{} {id:<3} {name}: {}", if outcome.pass { "PASS" } else { "FAIL" }, outcome.detail);
        failed += usize::from(!outcome.pass);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
