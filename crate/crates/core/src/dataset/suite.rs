//! Synthetic base sets and perturbation suites on disk.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::manifest::{Manifest, ManifestEntry, ManifestError};
use super::render::{render_synthetic_meter, RenderError, RenderStyle};
use crate::exec::Executor;
use crate::imaging::{load_image, save_image, DatasetTag, ImageError, PerturbationGrids};
use crate::postprocess::ConfigTable;
use crate::rng::{derive_seed, SplitMix64};

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("base image {file:?}: {source}")]
    BaseImage {
        file: String,
        #[source]
        source: ImageError,
    },
    #[error("writing {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: ImageError,
    },
    #[error("base entry {0:?} is not tagged ORIGINAL")]
    NotOriginal(String),
    #[error("meter config table is empty")]
    NoConfigs,
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error(transparent)]
    Manifest(#[from] ManifestError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> SuiteError + '_ {
    move |source| SuiteError::Io { path: path.to_path_buf(), source }
}

/// Output file name for a base stem and tag.
pub fn perturbed_file_name(stem: &str, tag: DatasetTag) -> String {
    format!("{stem}_{tag}.ppm")
}

/// Seed for the noise applied to one output image.
pub fn perturbation_seed(seed: u64, stem: &str, tag: DatasetTag) -> u64 {
    derive_seed(seed, &format!("{stem}_{tag}"))
}

/// Removes what a failed generation run left behind: the whole directory
/// when the run created it, otherwise only the listed files.
struct Cleanup {
    dir: PathBuf,
    created_dir: bool,
    files: Vec<PathBuf>,
    armed: bool,
}

impl Cleanup {
    fn prepare(dir: &Path) -> Result<Self, SuiteError> {
        let created_dir = !dir.exists();
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        Ok(Cleanup { dir: dir.to_path_buf(), created_dir, files: Vec::new(), armed: true })
    }

    fn disarm(mut self) {
        self.armed = false;
    }
}

impl Drop for Cleanup {
    fn drop(&mut self) {
        if !self.armed {
            return;
        }
        if self.created_dir {
            let _ = fs::remove_dir_all(&self.dir);
        } else {
            for f in &self.files {
                let _ = fs::remove_file(f);
            }
        }
    }
}

/// Applies every grid point to every base image.
///
/// For each base entry (in order) the output manifest lists the ORIGINAL
/// copy followed by one entry per grid point, named `<stem>_<TAG>.ppm`.
/// Expected readings and configs carry over. On any failure the partial
/// output is removed and the first failing base entry is reported.
pub fn generate_perturbation_suite(
    base: &Manifest,
    images_dir: &Path,
    out_dir: &Path,
    grids: &PerturbationGrids,
    seed: u64,
    exec: &Executor,
) -> Result<Manifest, SuiteError> {
    if let Some(e) = base.entries().iter().find(|e| e.tag != DatasetTag::Original) {
        return Err(SuiteError::NotOriginal(e.file_name.clone()));
    }
    let tags: Vec<DatasetTag> = std::iter::once(DatasetTag::Original).chain(grids.points().iter().copied()).collect();

    let mut cleanup = Cleanup::prepare(out_dir)?;
    for e in base.entries() {
        for &tag in &tags {
            cleanup.files.push(out_dir.join(perturbed_file_name(e.stem(), tag)));
        }
    }

    let per_base = exec.try_map(base.entries(), |entry| -> Result<Vec<ManifestEntry>, SuiteError> {
        let img = load_image(&images_dir.join(&entry.file_name))
            .map_err(|source| SuiteError::BaseImage { file: entry.file_name.clone(), source })?;
        let stem = entry.stem();
        tags.iter()
            .map(|&tag| {
                let name = perturbed_file_name(stem, tag);
                let path = out_dir.join(&name);
                let out = tag
                    .apply(&img, perturbation_seed(seed, stem, tag))
                    .map_err(|source| SuiteError::Write { path: path.clone(), source })?;
                save_image(&out, &path).map_err(|source| SuiteError::Write { path, source })?;
                Ok(ManifestEntry {
                    file_name: name,
                    tag,
                    expected_reading: entry.expected_reading.clone(),
                    meter_config_id: entry.meter_config_id.clone(),
                    reconstructed: entry.reconstructed || tag.is_reconstructed(),
                })
            })
            .collect()
    })?;

    let mut manifest = Manifest::from_entries(per_base.into_iter().flatten())?;
    manifest.notes = base.notes.clone();
    manifest.notes.push(format!("perturbation suite: {} grid points, seed {seed}", grids.len()));
    cleanup.disarm();
    Ok(manifest)
}

/// Readings for a synthetic base set: configs cycle through the table in id
/// order and each digit is one bounded draw from a single seeded stream.
pub fn synthetic_readings(count: usize, configs: &ConfigTable, seed: u64) -> Result<Vec<(String, String)>, SuiteError> {
    let table: Vec<_> = configs.iter().collect();
    if table.is_empty() && count > 0 {
        return Err(SuiteError::NoConfigs);
    }
    let mut rng = SplitMix64::new(seed);
    Ok((0..count)
        .map(|i| {
            let config = table[i % table.len()];
            let digits: String =
                (0..config.digit_positions()).map(|_| char::from(b'0' + rng.next_below(10) as u8)).collect();
            let split = (config.digit_positions() - config.decimal_places()) as usize;
            let reading =
                if config.decimal_places() > 0 { format!("{}.{}", &digits[..split], &digits[split..]) } else { digits };
            (reading, config.id().to_string())
        })
        .collect())
}

/// Renders `count` synthetic meters into `out_dir` as `meter_NNN.ppm` with
/// `meter_NNN.gt` ground-truth sidecars. The returned manifest is not saved.
pub fn synthesize_base_set(
    count: usize,
    configs: &ConfigTable,
    out_dir: &Path,
    seed: u64,
    style: &RenderStyle,
    exec: &Executor,
) -> Result<Manifest, SuiteError> {
    let readings = synthetic_readings(count, configs, seed)?;
    let width = count.saturating_sub(1).to_string().len().max(3);
    let items: Vec<(String, String, String)> = readings
        .into_iter()
        .enumerate()
        .map(|(i, (reading, config))| (format!("meter_{i:0width$}"), reading, config))
        .collect();

    let mut cleanup = Cleanup::prepare(out_dir)?;
    for (stem, _, _) in &items {
        cleanup.files.push(out_dir.join(format!("{stem}.ppm")));
        cleanup.files.push(out_dir.join(format!("{stem}.gt")));
    }

    let entries = exec.try_map(&items, |(stem, reading, config_id)| -> Result<ManifestEntry, SuiteError> {
        let config = configs.get(config_id).expect("config drawn from table");
        let (img, truth) = render_synthetic_meter(reading, config, style)?;
        let file_name = format!("{stem}.ppm");
        let path = out_dir.join(&file_name);
        save_image(&img, &path).map_err(|source| SuiteError::Write { path, source })?;
        let gt = out_dir.join(format!("{stem}.gt"));
        truth.save(&gt).map_err(io_err(&gt))?;
        Ok(ManifestEntry {
            file_name,
            tag: DatasetTag::Original,
            expected_reading: reading.clone(),
            meter_config_id: config_id.clone(),
            reconstructed: false,
        })
    })?;

    let mut manifest = Manifest::from_entries(entries)?;
    manifest.notes.push(format!("synthetic base set: {count} rendered meters, seed {seed}"));
    cleanup.disarm();
    Ok(manifest)
}

/// Every entry's file exists under `dir` and decodes.
pub fn verify_manifest_files(manifest: &Manifest, dir: &Path, exec: &Executor) -> Result<(), SuiteError> {
    exec.try_map(manifest.entries(), |e| {
        load_image(&dir.join(&e.file_name))
            .map(|_| ())
            .map_err(|source| SuiteError::BaseImage { file: e.file_name.clone(), source })
    })
    .map(|_| ())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::Family;

    fn base_set(dir: &Path, count: usize) -> Manifest {
        synthesize_base_set(count, &ConfigTable::builtin(), dir, 7, &RenderStyle::default(), &Executor::sequential())
            .unwrap()
    }

    #[test]
    fn readings_fit_their_configs() {
        let configs = ConfigTable::builtin();
        let readings = synthetic_readings(30, &configs, 7).unwrap();
        assert_eq!(readings.len(), 30);
        for (reading, id) in &readings {
            assert!(configs.get(id).unwrap().accepts(reading), "{reading} {id}");
        }
        assert_eq!(readings, synthetic_readings(30, &configs, 7).unwrap());
        assert_ne!(readings, synthetic_readings(30, &configs, 8).unwrap());
    }

    #[test]
    fn blur_suite_names() {
        let tmp = tempfile::tempdir().unwrap();
        let base_dir = tmp.path().join("base");
        let base = base_set(&base_dir, 2);
        let out = tmp.path().join("out");
        let grids = PerturbationGrids::for_families(&[Family::Blur]);
        let suite = generate_perturbation_suite(&base, &base_dir, &out, &grids, 1, &Executor::sequential()).unwrap();
        assert_eq!(suite.len(), 2 * 10);
        let blurred: Vec<_> = fs::read_dir(&out)
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .filter(|n| n.contains("BLUR"))
            .collect();
        assert_eq!(blurred.len(), 18);
        for k in (10..=90).step_by(10) {
            assert!(out.join(format!("meter_000_{k}BLUR.ppm")).exists());
        }
        verify_manifest_files(&suite, &out, &Executor::sequential()).unwrap();
    }

    #[test]
    fn empty_grid_copies_originals() {
        let tmp = tempfile::tempdir().unwrap();
        let base = base_set(tmp.path(), 3);
        let out = tmp.path().join("out");
        let suite = generate_perturbation_suite(
            &base,
            tmp.path(),
            &out,
            &PerturbationGrids::empty(),
            1,
            &Executor::sequential(),
        )
        .unwrap();
        assert_eq!(suite.len(), 3);
        assert!(suite.entries().iter().all(|e| e.tag == DatasetTag::Original));
    }

    #[test]
    fn missing_base_aborts_and_cleans_up() {
        let tmp = tempfile::tempdir().unwrap();
        let mut base = base_set(tmp.path(), 3);
        fs::remove_file(tmp.path().join("meter_001.ppm")).unwrap();
        base.notes.clear();
        let out = tmp.path().join("out");
        let err = generate_perturbation_suite(
            &base,
            tmp.path(),
            &out,
            &PerturbationGrids::default(),
            1,
            &Executor::new(2).unwrap(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("meter_001.ppm"), "{err}");
        assert!(!out.exists());
    }
}
