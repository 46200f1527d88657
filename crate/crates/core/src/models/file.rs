use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ModelDescriptor, ModelError};
use crate::expr::{Chart, ScalarExpr};
use crate::forms::{Bivector, Endomorphism, Form};
use crate::pqn::PqNStructure;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    name: String,
    coordinates: Vec<String>,
    poisson: Vec<Vec<String>>,
    endomorphism: Vec<Vec<String>>,
    #[serde(default)]
    phi: BTreeMap<String, String>,
    #[serde(default)]
    scalars: BTreeMap<String, String>,
    #[serde(default)]
    two_forms: BTreeMap<String, BTreeMap<String, String>>,
}

fn parse_at(chart: &Chart, location: String, text: &str) -> Result<ScalarExpr, ModelError> {
    chart.parse(text).map_err(|source| ModelError::Parse { location, source })
}

fn parse_matrix(chart: &Chart, field: &str, rows: &[Vec<String>]) -> Result<Vec<Vec<ScalarExpr>>, ModelError> {
    let m = chart.dim();
    if rows.len() != m || rows.iter().any(|r| r.len() != m) {
        return Err(ModelError::Schema(format!("`{field}` must be a {m}x{m} matrix")));
    }
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            r.iter()
                .enumerate()
                .map(|(j, s)| parse_at(chart, format!("{field}[{}][{}]", i + 1, j + 1), s))
                .collect()
        })
        .collect()
}

fn parse_index_key(key: &str, degree: usize, m: usize, field: &str) -> Result<Vec<usize>, ModelError> {
    let bad = || ModelError::Schema(format!("`{field}` key \"{key}\": expected {degree} increasing 1-based indices"));
    let idx: Vec<usize> = key
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    if idx.len() != degree || idx.iter().any(|&i| i == 0 || i > m) || idx.windows(2).any(|w| w[0] >= w[1]) {
        return Err(bad());
    }
    Ok(idx.into_iter().map(|i| i - 1).collect())
}

fn parse_form(
    chart: &Chart,
    field: &str,
    degree: usize,
    comps: &BTreeMap<String, String>,
) -> Result<Form, ModelError> {
    let m = chart.dim();
    let mut parsed = Vec::with_capacity(comps.len());
    for (key, text) in comps {
        let idx = parse_index_key(key, degree, m, field)?;
        parsed.push((idx, parse_at(chart, format!("{field}[\"{key}\"]"), text)?));
    }
    Ok(Form::from_components(m, degree, parsed)?)
}

fn form_to_raw(chart: &Chart, f: &Form) -> BTreeMap<String, String> {
    f.components()
        .map(|(idx, e)| {
            let key = idx.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",");
            (key, e.to_string_in(chart))
        })
        .collect()
}

pub fn model_from_json(text: &str) -> Result<ModelDescriptor, ModelError> {
    let raw: RawModel = serde_json::from_str(text).map_err(|e| ModelError::Schema(e.to_string()))?;
    let chart = Chart::new(raw.coordinates.iter().map(String::as_str))
        .map_err(|e| ModelError::Schema(format!("coordinates: {e}")))?;
    let pi = Bivector::from_matrix(parse_matrix(&chart, "poisson", &raw.poisson)?)
        .map_err(|e| ModelError::Schema(format!("poisson: {e}")))?;
    let n = Endomorphism::from_rows(parse_matrix(&chart, "endomorphism", &raw.endomorphism)?)?;
    let phi = parse_form(&chart, "phi", 3, &raw.phi)?;
    let scalars = raw
        .scalars
        .iter()
        .map(|(k, v)| Ok((k.clone(), parse_at(&chart, format!("scalars[\"{k}\"]"), v)?)))
        .collect::<Result<BTreeMap<_, _>, ModelError>>()?;
    let two_forms = raw
        .two_forms
        .iter()
        .map(|(k, v)| Ok((k.clone(), parse_form(&chart, &format!("two_forms[\"{k}\"]"), 2, v)?)))
        .collect::<Result<BTreeMap<_, _>, ModelError>>()?;
    let structure = PqNStructure::new(chart, pi, n, phi)?;
    Ok(ModelDescriptor::new(raw.name, structure, scalars, two_forms))
}

pub fn model_to_json(model: &ModelDescriptor) -> String {
    let s = &model.structure;
    let chart = &s.chart;
    let raw = RawModel {
        name: model.name.clone(),
        coordinates: chart.names().to_vec(),
        poisson: s.pi.matrix().iter().map(|r| r.iter().map(|e| e.to_string_in(chart)).collect()).collect(),
        endomorphism: s.n.display(chart),
        phi: form_to_raw(chart, &s.phi),
        scalars: model.scalars.iter().map(|(k, v)| (k.clone(), v.to_string_in(chart))).collect(),
        two_forms: model.two_forms.iter().map(|(k, v)| (k.clone(), form_to_raw(chart, v))).collect(),
    };
    let mut out = serde_json::to_string_pretty(&raw).expect("plain data serializes");
    out.push('\n');
    out
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ModelDescriptor, ModelError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|e| ModelError::Io { path: path.display().to_string(), message: e.to_string() })?;
    model_from_json(&text)
}

/// Writes through a temporary sibling file and renames it into place.
pub fn save_model(model: &ModelDescriptor, path: impl AsRef<Path>) -> Result<(), ModelError> {
    write_atomic(path.as_ref(), model_to_json(model).as_bytes())
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), ModelError> {
    let io = |e: std::io::Error| ModelError::Io { path: path.display().to_string(), message: e.to_string() };
    let file_name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{file_name}.tmp{}", std::process::id()));
    let mut f = fs::File::create(&tmp).map_err(io)?;
    f.write_all(bytes).map_err(io)?;
    f.sync_all().map_err(io)?;
    drop(f);
    fs::rename(&tmp, path).map_err(io)
}
