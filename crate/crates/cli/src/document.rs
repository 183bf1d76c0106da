//! Polygon documents: the JSON interchange format read and written by every
//! subcommand.
//!
//! ```json
//! {"format_version": "1", "mode": "xyz", "vertices": [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
//!  "metadata": {"generator": "regular_odd_gon"}}
//! ```
//!
//! `mode` is `"xyz"` (unit vectors, renormalized on load) or `"lonlat"`
//! (degrees). It defaults to `"xyz"` when absent.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sphred::polygon::{validate, PolygonError};
use sphred::{SpherePoint, SphericalPolygon};

use crate::error::CliError;

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CoordinateMode {
    #[default]
    Xyz,
    Lonlat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolygonDocument {
    pub format_version: String,
    #[serde(default)]
    pub mode: CoordinateMode,
    pub vertices: Vec<Vec<f64>>,
    #[serde(default)]
    pub metadata: BTreeMap<String, Value>,
}

impl PolygonDocument {
    pub fn from_polygon(poly: &SphericalPolygon, mode: CoordinateMode) -> Self {
        let vertices = poly
            .vertices()
            .iter()
            .map(|v| match mode {
                CoordinateMode::Xyz => vec![v.x(), v.y(), v.z()],
                CoordinateMode::Lonlat => {
                    let (lon, lat) = v.to_lon_lat_deg();
                    vec![lon, lat]
                }
            })
            .collect();
        PolygonDocument {
            format_version: FORMAT_VERSION.to_string(),
            mode,
            vertices,
            metadata: BTreeMap::new(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let value: Value = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        let doc: PolygonDocument =
            serde_json::from_value(value).map_err(|e| CliError::Schema(e.to_string()))?;
        if doc.format_version != FORMAT_VERSION {
            return Err(CliError::Schema(format!(
                "unsupported format_version {:?}, expected {FORMAT_VERSION:?}",
                doc.format_version
            )));
        }
        Ok(doc)
    }

    /// Converts the coordinates and validates the polygon.
    pub fn to_polygon(&self) -> Result<SphericalPolygon, CliError> {
        let points = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, c)| self.point(i, c))
            .collect::<Result<Vec<_>, _>>()?;
        validate(points).map_err(|e| match e {
            PolygonError::Invalid(violations) => CliError::Validation(violations),
            other => CliError::Geometry(other.to_string()),
        })
    }

    fn point(&self, i: usize, c: &[f64]) -> Result<SpherePoint, CliError> {
        let bad = |msg: String| CliError::Schema(format!("vertex {i}: {msg}"));
        if c.iter().any(|x| !x.is_finite()) {
            return Err(bad("coordinates must be finite".into()));
        }
        match (self.mode, c) {
            (CoordinateMode::Xyz, [x, y, z]) => {
                SpherePoint::new(*x, *y, *z).map_err(|e| CliError::Geometry(format!("vertex {i}: {e}")))
            }
            (CoordinateMode::Lonlat, [lon, lat]) => {
                if !(-180.0..=180.0).contains(lon) || !(-90.0..=90.0).contains(lat) {
                    return Err(bad(format!("[{lon}, {lat}] is outside lon [-180, 180], lat [-90, 90]")));
                }
                SpherePoint::from_lon_lat_deg(*lon, *lat)
                    .map_err(|e| CliError::Geometry(format!("vertex {i}: {e}")))
            }
            (CoordinateMode::Xyz, _) => Err(bad(format!("expected [x, y, z], got {} numbers", c.len()))),
            (CoordinateMode::Lonlat, _) => {
                Err(bad(format!("expected [lon_deg, lat_deg], got {} numbers", c.len())))
            }
        }
    }

    /// Pretty JSON with one vertex per line. Floats use the shortest
    /// representation that reads back to the same double.
    pub fn to_json(&self) -> String {
        fn compact<T: Serialize + ?Sized>(v: &T) -> String {
            serde_json::to_string(v).expect("document fields serialize")
        }
        let rows: Vec<String> = self.vertices.iter().map(|v| format!("    {}", compact(v).replace(',', ", "))).collect();
        let metadata = serde_json::to_string_pretty(&self.metadata)
            .expect("metadata serializes")
            .replace('\n', "\n  ");
        format!(
            "{{\n  \"format_version\": {},\n  \"mode\": {},\n  \"vertices\": [\n{}\n  ],\n  \"metadata\": {}\n}}\n",
            compact(self.format_version.as_str()),
            compact(&self.mode),
            rows.join(",\n"),
            metadata
        )
    }
}

/// Reads a document from `path`, or from `stdin` when `path` is `-`.
pub fn read_source(path: &Path, stdin: &mut dyn Read) -> Result<String, CliError> {
    let mut text = String::new();
    if path == Path::new("-") {
        stdin.read_to_string(&mut text).map_err(|e| CliError::Io(format!("stdin: {e}")))?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(text)
}

pub fn load(path: &Path, stdin: &mut dyn Read) -> Result<(PolygonDocument, SphericalPolygon), CliError> {
    let doc = PolygonDocument::parse(&read_source(path, stdin)?)?;
    let poly = doc.to_polygon()?;
    Ok((doc, poly))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xyz_triangle() {
        let doc = PolygonDocument::parse(
            r#"{"format_version":"1","mode":"xyz","vertices":[[1,0,0],[0,1,0],[0,0,1]]}"#,
        )
        .unwrap();
        assert_eq!(doc.to_polygon().unwrap().len(), 3);
    }

    #[test]
    fn lonlat_triangle_matches_xyz() {
        let doc = PolygonDocument::parse(
            r#"{"format_version":"1","mode":"lonlat","vertices":[[0,0],[90,0],[0,90]]}"#,
        )
        .unwrap();
        let poly = doc.to_polygon().unwrap();
        let expected = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        for (v, e) in poly.vertices().iter().zip(expected) {
            assert!((v.x() - e[0]).abs() < 1e-15 && (v.y() - e[1]).abs() < 1e-15 && (v.z() - e[2]).abs() < 1e-15);
        }
    }

    #[test]
    fn antipodal_pair_is_a_validation_error() {
        let doc = PolygonDocument::parse(
            r#"{"format_version":"1","vertices":[[1,0,0],[0,1,0],[-1,0,0]]}"#,
        )
        .unwrap();
        match doc.to_polygon() {
            Err(CliError::Validation(v)) => assert!(v.iter().any(|x| x.kind() == "AntipodalVertices")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn error_classes() {
        assert!(matches!(PolygonDocument::parse("{"), Err(CliError::Parse(_))));
        assert!(matches!(PolygonDocument::parse(r#"{"vertices":[]}"#), Err(CliError::Schema(_))));
        assert!(matches!(
            PolygonDocument::parse(r#"{"format_version":"2","vertices":[]}"#),
            Err(CliError::Schema(_))
        ));
        assert!(matches!(
            PolygonDocument::parse(r#"{"format_version":"1","vertices":[],"extra":1}"#),
            Err(CliError::Schema(_))
        ));
        let wrong_arity =
            PolygonDocument::parse(r#"{"format_version":"1","mode":"lonlat","vertices":[[1,2,3]]}"#).unwrap();
        assert!(matches!(wrong_arity.to_polygon(), Err(CliError::Schema(_))));
        let out_of_range =
            PolygonDocument::parse(r#"{"format_version":"1","mode":"lonlat","vertices":[[200,0]]}"#).unwrap();
        assert!(matches!(out_of_range.to_polygon(), Err(CliError::Schema(_))));
    }
}
