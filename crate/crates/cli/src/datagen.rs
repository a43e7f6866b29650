use std::path::Path;

use fedl_core::datagen::{
    dataset_to_csv, generate_synthetic, ue_file_name, DatasetManifest, SyntheticSpec,
};

use crate::failure::{read_config, Failure};
use crate::output::Run;

/// Layout: `train/ue_NNNN.csv`, `test/ue_NNNN.csv`, `dataset.json`, `manifest.json`.
pub fn run(config: &Path, out: &Path, seed: Option<u64>) -> Result<(), Failure> {
    let mut spec: SyntheticSpec = read_config(config)?;
    if let Some(s) = seed {
        spec.seed = s;
    }
    spec.validate()?;
    let mut run = Run::start("datagen", config, out)?;
    run.seed(spec.seed);
    let data = generate_synthetic(&spec)?;
    for (split, sets) in [("train", &data.train), ("test", &data.test)] {
        for (i, ds) in sets.iter().enumerate() {
            run.write(
                &format!("{split}/{}", ue_file_name(i)),
                dataset_to_csv(ds).as_bytes(),
            )?;
        }
    }
    run.write_json("dataset.json", &DatasetManifest::new(&spec, &data))?;
    run.finish(true)?;
    println!("wrote {} UEs to {}", spec.n_users, out.display());
    Ok(())
}
