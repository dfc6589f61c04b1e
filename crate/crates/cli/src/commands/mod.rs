pub mod coverage;
pub mod dim;
pub mod geo;
pub mod linespace;
pub mod maximal;
pub mod phase;
pub mod projective;
pub mod set;

use anyhow::{bail, Context, Result};
use kakeya_core::expr::{PhaseFunction, PhaseSpec};
use kakeya_core::space_forms::SpaceForm;
use std::path::Path;

pub fn space_form(model: &str, d: usize) -> Result<SpaceForm> {
    let form = match model {
        "euclidean" => SpaceForm::euclidean(d),
        "sphere" => SpaceForm::sphere(d),
        "hyperbolic" => SpaceForm::hyperbolic(d),
        other => bail!("unknown model `{other}` (expected euclidean, sphere, hyperbolic)"),
    };
    Ok(form?)
}

pub fn load_phase(path: &Path) -> Result<(PhaseFunction, PhaseSpec)> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading phase spec {}", path.display()))?;
    let spec: PhaseSpec = serde_json::from_str(&text)
        .with_context(|| format!("parsing phase spec {}", path.display()))?;
    let phi = PhaseFunction::from_spec(&spec)?;
    Ok((phi, spec))
}
