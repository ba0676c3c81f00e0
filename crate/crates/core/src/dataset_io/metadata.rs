//! Per-fragment metadata JSON.
//!
//! Keys are matched case-insensitively ignoring punctuation, so `"RGB
//! File(s)"`, `"rgb_files"` and `"RGBFiles"` all map to the same field.
//! Anything unrecognized is kept verbatim in [`FragmentMetadata::extra`].

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GeometricSummary {
    pub center_of_mass: Option<Vec<f64>>,
    pub bounding_box: Option<Value>,
    /// The full geometric record as found in the file.
    pub raw: Value,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FragmentMetadata {
    pub id: Option<String>,
    pub acquisition_date: Option<String>,
    pub artistic_style: Option<String>,
    pub fresco_family: Option<String>,
    pub weight_g: Option<f64>,
    pub version: Option<String>,
    pub link: Option<String>,
    pub filenames: Vec<String>,
    pub rgb_files: Vec<String>,
    pub raw_3d_files: Vec<String>,
    pub texture: Vec<String>,
    pub geometric: Option<GeometricSummary>,
    pub extra: BTreeMap<String, Value>,
}

fn normalize_key(k: &str) -> String {
    k.chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .map(|c| c.to_ascii_lowercase())
        .collect::<String>()
}

fn as_text(v: &Value) -> Option<String> {
    match v {
        Value::Null => None,
        Value::String(s) => Some(s.clone()),
        other => Some(other.to_string()),
    }
}

fn as_list(v: &Value) -> Vec<String> {
    match v {
        Value::Array(items) => items.iter().filter_map(as_text).collect(),
        Value::Object(map) => map.values().filter_map(as_text).collect(),
        other => as_text(other).into_iter().collect(),
    }
}

fn find_key<'a>(obj: &'a serde_json::Map<String, Value>, names: &[&str]) -> Option<&'a Value> {
    obj.iter()
        .find(|(k, _)| names.contains(&normalize_key(k).as_str()))
        .map(|(_, v)| v)
}

fn geometric(v: &Value) -> GeometricSummary {
    let mut out = GeometricSummary {
        raw: v.clone(),
        ..Default::default()
    };
    if let Value::Object(obj) = v {
        out.center_of_mass = find_key(obj, &["centerofmass", "centreofmass", "com"])
            .and_then(|c| c.as_array())
            .map(|a| a.iter().filter_map(Value::as_f64).collect());
        out.bounding_box = find_key(obj, &["boundingbox", "boundingboxlimits", "bbox"]).cloned();
    }
    out
}

fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let mut offset = 0;
    for (i, l) in text.split_inclusive('\n').enumerate() {
        if i + 1 == line {
            return offset + column.saturating_sub(1).min(l.len());
        }
        offset += l.len();
    }
    text.len()
}

pub fn parse_metadata_str(text: &str, path: &Path) -> Result<FragmentMetadata> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Json {
        path: path.to_path_buf(),
        offset: byte_offset(text, e.line(), e.column()),
        message: e.to_string(),
    })?;
    let Value::Object(obj) = value else {
        return Err(Error::Json {
            path: path.to_path_buf(),
            offset: 0,
            message: "top-level value is not an object".into(),
        });
    };
    let mut md = FragmentMetadata::default();
    for (key, v) in obj {
        match normalize_key(&key).as_str() {
            "id" => md.id = as_text(&v),
            "acquisitiondate" => md.acquisition_date = as_text(&v),
            "artisticstyle" => md.artistic_style = as_text(&v),
            "frescofamily" => md.fresco_family = as_text(&v),
            "version" => md.version = as_text(&v),
            "link" => md.link = as_text(&v),
            "filename" | "filenames" => md.filenames = as_list(&v),
            "rgbfile" | "rgbfiles" => md.rgb_files = as_list(&v),
            "raw3dfile" | "raw3dfiles" => md.raw_3d_files = as_list(&v),
            "texture" | "textures" => md.texture = as_list(&v),
            "geometricdata" => md.geometric = Some(geometric(&v)),
            "weight" | "weightg" => {
                let w = match &v {
                    Value::Null => None,
                    Value::Number(n) => n.as_f64(),
                    Value::String(s) => s.trim().trim_end_matches('g').trim().parse().ok(),
                    _ => None,
                };
                match w {
                    Some(w) if w >= 0.0 && w.is_finite() => md.weight_g = Some(w),
                    None if v.is_null() => {}
                    _ => {
                        return Err(Error::InvalidInput(format!(
                            "{}: weight must be a non-negative number, got {v}",
                            path.display()
                        )))
                    }
                }
            }
            _ => {
                md.extra.insert(key, v);
            }
        }
    }
    Ok(md)
}

pub fn parse_metadata(path: &Path) -> Result<FragmentMetadata> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let md = parse_metadata_str(&text, path)?;
    if let (Some(id), Some(stem)) = (&md.id, path.file_stem()) {
        if id != &stem.to_string_lossy() {
            return Err(Error::InvalidInput(format!(
                "{}: metadata id {id} does not match the file name",
                path.display()
            )));
        }
    }
    Ok(md)
}
