use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::geometry::{Point, Rational};

use super::rational::{format_rational, parse_rational};
use super::ModelError;

/// Points in R^d with a diameter threshold. Point indices are the vertex
/// identities used everywhere else.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub dim: usize,
    pub diameter: Rational,
    pub points: Vec<Point>,
    pub labels: Option<Vec<String>>,
}

/// On-disk form of an instance. `labels` and `target_k` are optional
/// trailers written only when present.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub dim: usize,
    pub diameter: String,
    pub points: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_k: Option<usize>,
}

impl Instance {
    pub fn new(dim: usize, diameter: Rational, points: Vec<Point>) -> Result<Self, ModelError> {
        let inst = Self { dim, diameter, points, labels: None };
        inst.validate()?;
        Ok(inst)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, ModelError> {
        if labels.len() != self.points.len() {
            return Err(ModelError::Malformed(format!("{} labels for {} points", labels.len(), self.points.len())));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.dim == 0 {
            return Err(ModelError::InvalidDimension);
        }
        if !self.diameter.is_positive() {
            return Err(ModelError::InvalidDiameter);
        }
        for (index, p) in self.points.iter().enumerate() {
            if p.dim() != self.dim {
                return Err(ModelError::DimensionMismatch { index, expected: self.dim, found: p.dim() });
            }
        }
        Ok(())
    }

    pub fn to_file(&self, target_k: Option<usize>) -> InstanceFile {
        InstanceFile {
            dim: self.dim,
            diameter: format_rational(&self.diameter),
            points: self.points.iter().map(|p| p.coords().iter().map(format_rational).collect()).collect(),
            labels: self.labels.clone(),
            target_k,
        }
    }

    pub fn from_file(file: &InstanceFile) -> Result<Self, ModelError> {
        let diameter = parse_rational(&file.diameter)?;
        let mut points = Vec::with_capacity(file.points.len());
        for (index, coords) in file.points.iter().enumerate() {
            if coords.len() != file.dim {
                return Err(ModelError::DimensionMismatch { index, expected: file.dim, found: coords.len() });
            }
            let c = coords.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>()?;
            points.push(Point::new(c));
        }
        let inst = Instance::new(file.dim, diameter, points)?;
        match &file.labels {
            Some(l) => inst.with_labels(l.clone()),
            None => Ok(inst),
        }
    }

    /// Serialized JSON document, one point per line.
    pub fn to_json(&self, target_k: Option<usize>) -> String {
        write_instance_file(&self.to_file(target_k))
    }

    pub fn from_json(text: &str) -> Result<(Self, Option<usize>), ModelError> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| ModelError::Malformed(e.to_string()))?;
        Ok((Self::from_file(&file)?, file.target_k))
    }
}

fn quoted(s: &str) -> String {
    serde_json::to_string(s).expect("string serialization cannot fail")
}

fn write_instance_file(file: &InstanceFile) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    out.push_str(&format!("  \"dim\": {},\n", file.dim));
    out.push_str(&format!("  \"diameter\": {},\n", quoted(&file.diameter)));
    out.push_str("  \"points\": [");
    for (i, p) in file.points.iter().enumerate() {
        out.push_str(if i == 0 { "\n" } else { ",\n" });
        let coords: Vec<String> = p.iter().map(|c| quoted(c)).collect();
        out.push_str(&format!("    [{}]", coords.join(", ")));
    }
    out.push_str(if file.points.is_empty() { "]" } else { "\n  ]" });
    if let Some(labels) = &file.labels {
        let l: Vec<String> = labels.iter().map(|s| quoted(s)).collect();
        out.push_str(&format!(",\n  \"labels\": [{}]", l.join(", ")));
    }
    if let Some(k) = file.target_k {
        out.push_str(&format!(",\n  \"target_k\": {k}"));
    }
    out.push_str("\n}\n");
    out
}
