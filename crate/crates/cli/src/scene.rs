//! Scene files: JSON documents `{ "dim": 2|3, "plus": <region>, "minus":
//! <region> }` where a region tree is either the string `"Empty"` or a
//! one-key object naming the node:
//!
//! - primitives: `{"HalfSpace": {"anchor": [..], "normal": [..]}}`,
//!   `{"Ball": {"center": [..], "radius": ..}}`, `{"Box": {"min": [..],
//!   "max": [..]}}`, `{"Polygon": {"vertices": [[..], ..]}}`,
//!   `{"Polyhedron": {"faces": [[[..],[..]], ..]}}`, `{"PlGraph":
//!   {"f": {"breakpoints": [[x, y], ..]}, "side": "above"|"below"}}`
//! - operators: `{"Union": [..children..]}`, `{"Intersection": [..]}`,
//!   `{"Complement": <region>}`
//!
//! Points are `[x, y, z]` triples (use `z = 0` in 2-D). Parse errors
//! report the path into the tree.

use eps2_core::region::{Region, RegionPair};
use serde::Deserialize;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneFile {
    dim: usize,
    plus: Region,
    minus: Region,
}

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("cannot read scene file {0}: {1}")]
    Io(String, std::io::Error),
    #[error("scene parse error at `{path}`: {message}")]
    Parse { path: String, message: String },
    #[error("invalid scene: {0}")]
    Invalid(#[from] eps2_core::region::RegionError),
}

pub fn load_scene(path: &Path) -> Result<RegionPair, SceneError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SceneError::Io(path.display().to_string(), e))?;
    parse_scene(&text)
}

pub fn parse_scene(text: &str) -> Result<RegionPair, SceneError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let scene: SceneFile = serde_path_to_error::deserialize(de).map_err(|e| {
        SceneError::Parse {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        }
    })?;
    Ok(RegionPair::new(scene.dim, scene.plus, scene.minus)?)
}
