use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use fedl_core::datagen::{load_csv, CsvSchema};
use fedl_core::fedl::{run_fedavg, run_fedl, TrainConfig, TrainingTrace};
use fedl_core::math::estimate_curvature;
use fedl_core::{CurvatureConstants, LossModel, UEDataset};

use crate::failure::{read_config, Failure};
use crate::output::Run;
use crate::Algo;

/// Training config file. `train.h` may be the string `"auto"` for `1/L`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrainFile {
    /// Dataset directory, relative to the config file.
    data: Option<PathBuf>,
    #[serde(default)]
    model: LossModel,
    #[serde(default)]
    schema: CsvSchema,
    train: Value,
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    algo: &'a str,
    status: &'a str,
    error: Option<String>,
    rounds: usize,
    initial_loss: f64,
    final_loss: f64,
    final_accuracy: Option<f64>,
    config: &'a TrainConfig,
    model: &'a LossModel,
    curvature: Option<CurvatureConstants>,
}

fn csv_files(dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Failure::input(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Failure::input(format!("{}: no CSV files", dir.display())));
    }
    Ok(paths)
}

/// `dir/train` and optional `dir/test` when present, otherwise `dir` itself.
fn load_data(
    dir: &Path,
    schema: &CsvSchema,
    run: &mut Run,
) -> Result<(Vec<UEDataset>, Option<Vec<UEDataset>>), Failure> {
    let mut load = |d: &Path| -> Result<Vec<UEDataset>, Failure> {
        let paths = csv_files(d)?;
        for p in &paths {
            run.input(p)?;
        }
        Ok(load_csv(&paths, schema)?)
    };
    let train_dir = dir.join("train");
    if !train_dir.is_dir() {
        return Ok((load(dir)?, None));
    }
    let train = load(&train_dir)?;
    let test_dir = dir.join("test");
    let test = if test_dir.is_dir() {
        Some(load(&test_dir)?)
    } else {
        None
    };
    Ok((train, test))
}

pub fn run(
    config: &Path,
    out: &Path,
    data: Option<&Path>,
    algo: Algo,
    seed: Option<u64>,
) -> Result<(), Failure> {
    let file: TrainFile = read_config(config)?;
    file.model.validate()?;
    let dir = match (data, &file.data) {
        (Some(d), _) => d.to_path_buf(),
        (None, Some(d)) => config.parent().unwrap_or(Path::new(".")).join(d),
        (None, None) => {
            return Err(Failure::input(
                "no dataset: pass --data or set `data` in the config",
            ))
        }
    };
    let mut run = Run::start("train", config, out)?;
    let (train, test) = load_data(&dir, &file.schema, &mut run)?;

    let mut section = file.train;
    let auto_h = section
        .get("h")
        .is_some_and(|h| h.as_str().is_some_and(|s| s.eq_ignore_ascii_case("auto")));
    let curvature = if auto_h {
        let c = estimate_curvature(&file.model, &train)?;
        section["h"] = Value::from(1.0 / c.l);
        Some(c)
    } else {
        None
    };
    let mut cfg: TrainConfig = serde_json::from_value(section)
        .map_err(|e| Failure::input(format!("{}: [train]: {e}", config.display())))?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.validate(train.len())?;
    run.seed(cfg.seed);

    let result = match algo {
        Algo::Fedl => run_fedl(&cfg, &train, test.as_deref(), &file.model),
        Algo::Fedavg => run_fedavg(&cfg, &train, test.as_deref(), &file.model),
    };
    let (trace, failure): (TrainingTrace, Option<Failure>) = match result {
        Ok(t) => (t, None),
        Err(e) if e.source.is_numerical() => {
            let msg = format!("round {}: {}", e.round, e.source);
            (e.partial, Some(Failure::Numerical(anyhow::anyhow!(msg))))
        }
        Err(e) => return Err(e.source.into()),
    };

    let error = failure.as_ref().map(|f| f.to_string());
    let summary = Summary {
        algo: algo.name(),
        status: if failure.is_none() {
            "ok"
        } else {
            "numerical-failure"
        },
        error,
        rounds: trace.records.len(),
        initial_loss: trace.initial_loss,
        final_loss: trace.final_loss(),
        final_accuracy: trace.final_accuracy(),
        config: &cfg,
        model: &file.model,
        curvature,
    };
    run.write("trace.csv", trace.to_csv().as_bytes())?;
    run.write_json("summary.json", &summary)?;
    run.finish(failure.is_none())?;
    match failure {
        Some(f) => Err(f),
        None => {
            println!(
                "{}: {} rounds, final loss {:.6e}",
                algo.name(),
                trace.records.len(),
                trace.final_loss()
            );
            Ok(())
        }
    }
}
