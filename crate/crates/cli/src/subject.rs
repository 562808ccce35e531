use std::path::Path;

use oddconn::catalog::{self, Parallelisation};

use crate::model::{parse_model, Model, ModelError};

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("{path}: {source}")]
    Model { path: String, source: ModelError },
    #[error("{0}")]
    Catalog(#[from] oddconn::Error),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

/// A model together with the frame it was built from, if any.
#[derive(Debug, Clone)]
pub struct Subject {
    pub name: String,
    pub description: String,
    pub model: Model,
    pub frame: Option<Parallelisation>,
}

impl Subject {
    /// Labels for the frame fields.
    pub fn frame_labels(&self) -> Vec<String> {
        let Some(par) = &self.frame else { return Vec::new() };
        let n = par.frame().len();
        let base = self.name.strip_prefix("weitzenbock:").unwrap_or(&self.name);
        match base {
            "susy-r11" => vec!["P".into(), "D".into()],
            "smink44" => (0..4).map(|m| format!("P{m}")).chain((1..=4).map(|a| format!("D{a}"))).collect(),
            _ if par.frame_matrix() == Parallelisation::coordinate(par.chart()).frame_matrix() => coordinate_labels(self),
            _ => (1..=n).map(|i| format!("E{i}")).collect(),
        }
    }
}

pub fn coordinate_labels(s: &Subject) -> Vec<String> {
    s.model.chart().names().map(|n| format!("d_{n}")).collect()
}

/// A catalog name or a model file path.
pub fn resolve(target: &str) -> Result<Subject, InputError> {
    let path = Path::new(target);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|source| InputError::Io { path: target.into(), source })?;
        let model = parse_model(&text).map_err(|source| InputError::Model { path: target.into(), source })?;
        return Ok(Subject { name: target.to_string(), description: format!("model file {target}"), model, frame: None });
    }
    let entry = catalog::lookup(target)?;
    let mut model = Model::new(entry.connection);
    model.metric = entry.metric;
    Ok(Subject { name: entry.name, description: entry.description, model, frame: entry.frame })
}
