//! Evaluation datasets: synthetic registers, perturbation suites, manifests.

pub mod glyphs;
mod manifest;
mod render;
mod suite;

pub use manifest::{Manifest, ManifestEntry, ManifestError};
pub use render::{render_synthetic_meter, GroundTruth, RenderError, RenderStyle};
pub use suite::{
    generate_perturbation_suite, perturbation_seed, perturbed_file_name, synthesize_base_set, synthetic_readings,
    verify_manifest_files, SuiteError,
};
