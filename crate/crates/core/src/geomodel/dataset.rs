use std::collections::{BTreeMap, HashSet};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::borehole::Borehole;
use super::field::{ScalarField3D, VectorField3D};
use crate::particles::SpillConfig;
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DatasetError {
    #[error("stratigraphic order is empty")]
    EmptyOrder,
    #[error("stratum {0} listed twice in the stratigraphic order")]
    DuplicateStratum(String),
    #[error("stratum {stratum}: color components must lie in [0, 1]")]
    BadColor { stratum: String },
    #[error("borehole id must be non-empty")]
    EmptyBoreholeId,
    #[error("borehole {0} defined twice")]
    DuplicateBorehole(String),
    #[error("borehole {borehole}: stratum {stratum} is not in the stratigraphic order")]
    UnknownStratum { borehole: String, stratum: String },
    #[error("borehole {borehole}: stratum {stratum} is out of stratigraphic order")]
    StratumOutOfOrder { borehole: String, stratum: String },
    #[error("survey line {0} defined twice")]
    DuplicateLine(String),
    #[error("survey line {line} references unknown borehole {borehole}")]
    UnknownBorehole { line: String, borehole: String },
    #[error("survey line {0} needs at least two boreholes")]
    LineTooShort(String),
    #[error("survey line {line} repeats borehole {borehole} consecutively")]
    RepeatedBorehole { line: String, borehole: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stratum {
    pub id: String,
    pub color: [f32; 4],
}

/// Strata youngest (shallowest) first, with display colors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratigraphicOrder {
    pub strata: Vec<Stratum>,
}

impl StratigraphicOrder {
    pub fn new(strata: Vec<Stratum>) -> Result<Self, DatasetError> {
        if strata.is_empty() {
            return Err(DatasetError::EmptyOrder);
        }
        let mut seen = HashSet::new();
        for s in &strata {
            if !seen.insert(s.id.as_str()) {
                return Err(DatasetError::DuplicateStratum(s.id.clone()));
            }
            if s.color.iter().any(|c| !(0.0..=1.0).contains(c)) {
                return Err(DatasetError::BadColor { stratum: s.id.clone() });
            }
        }
        Ok(StratigraphicOrder { strata })
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, String> {
        let raw: StratigraphicOrder = serde_json::from_slice(bytes).map_err(|e| e.to_string())?;
        Self::new(raw.strata).map_err(|e| e.to_string())
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.strata.iter().position(|s| s.id == id)
    }

    pub fn color(&self, id: &str) -> Option<[f32; 4]> {
        self.strata.iter().find(|s| s.id == id).map(|s| s.color)
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.strata.iter().map(|s| s.id.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyLine {
    pub id: String,
    #[serde(rename = "boreholes")]
    pub borehole_ids: Vec<String>,
}

/// Imagery to drape over the terrain TIN.
#[derive(Debug, Clone, PartialEq)]
pub struct DrapeSource<T> {
    pub name: String,
    pub png: Vec<u8>,
    /// (x_min, y_min, x_max, y_max)
    pub extent: [T; 4],
}

/// The section-drilling model: boreholes and survey lines plus gridded fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    pub boreholes: IndexMap<String, Borehole<T>>,
    pub order: StratigraphicOrder,
    pub survey_lines: IndexMap<String, SurveyLine>,
    pub scalar_fields: BTreeMap<String, ScalarField3D<T>>,
    pub vector_fields: BTreeMap<String, VectorField3D<T>>,
    /// Bathymetry soundings for the terrain TIN; borehole collars when absent.
    pub terrain_samples: Option<Vec<[T; 3]>>,
    pub drape: Option<DrapeSource<T>>,
    pub spill: Option<SpillConfig<T>>,
}

impl<T: Real> Dataset<T> {
    pub fn new(
        boreholes: Vec<Borehole<T>>,
        order: StratigraphicOrder,
        lines: Vec<SurveyLine>,
    ) -> Result<Self, DatasetError> {
        let mut holes = IndexMap::new();
        for b in boreholes {
            if b.id.is_empty() {
                return Err(DatasetError::EmptyBoreholeId);
            }
            let mut last = None;
            for iv in &b.intervals {
                let pos = order.position(&iv.stratum_id).ok_or_else(|| DatasetError::UnknownStratum {
                    borehole: b.id.clone(),
                    stratum: iv.stratum_id.clone(),
                })?;
                if last.is_some_and(|l| pos <= l) {
                    return Err(DatasetError::StratumOutOfOrder {
                        borehole: b.id.clone(),
                        stratum: iv.stratum_id.clone(),
                    });
                }
                last = Some(pos);
            }
            if holes.contains_key(&b.id) {
                return Err(DatasetError::DuplicateBorehole(b.id));
            }
            holes.insert(b.id.clone(), b);
        }
        let mut survey_lines = IndexMap::new();
        for line in lines {
            if line.borehole_ids.len() < 2 {
                return Err(DatasetError::LineTooShort(line.id));
            }
            for id in &line.borehole_ids {
                if !holes.contains_key(id) {
                    return Err(DatasetError::UnknownBorehole {
                        line: line.id.clone(),
                        borehole: id.clone(),
                    });
                }
            }
            if let Some(w) = line.borehole_ids.windows(2).find(|w| w[0] == w[1]) {
                return Err(DatasetError::RepeatedBorehole {
                    line: line.id.clone(),
                    borehole: w[0].clone(),
                });
            }
            if survey_lines.contains_key(&line.id) {
                return Err(DatasetError::DuplicateLine(line.id));
            }
            survey_lines.insert(line.id.clone(), line);
        }
        Ok(Dataset {
            boreholes: holes,
            order,
            survey_lines,
            scalar_fields: BTreeMap::new(),
            vector_fields: BTreeMap::new(),
            terrain_samples: None,
            drape: None,
            spill: None,
        })
    }

    pub fn with_scalar_field(mut self, field: ScalarField3D<T>) -> Self {
        self.scalar_fields.insert(field.meta.name.clone(), field);
        self
    }

    pub fn with_vector_field(mut self, field: VectorField3D<T>) -> Self {
        self.vector_fields.insert(field.meta.name.clone(), field);
        self
    }

    /// Boreholes that drilled `stratum_id`, in dataset order.
    pub fn boreholes_with(&self, stratum_id: &str) -> impl Iterator<Item = &Borehole<T>> {
        let id = stratum_id.to_string();
        self.boreholes.values().filter(move |b| b.interval(&id).is_some())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geomodel::borehole::parse_boreholes;

    fn order(ids: &[&str]) -> StratigraphicOrder {
        StratigraphicOrder::new(
            ids.iter()
                .map(|id| Stratum { id: id.to_string(), color: [0.5, 0.5, 0.5, 1.0] })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn referential_integrity() {
        let holes: Vec<Borehole<f64>> =
            parse_boreholes(b"B1,0,0,-30\nB1,mud,0,5\nB2,10,0,-30\nB2,clay,0,5\n").unwrap();
        let err = Dataset::new(holes.clone(), order(&["mud", "sand"]), vec![]).unwrap_err();
        assert!(matches!(err, DatasetError::UnknownStratum { .. }));

        let ok = Dataset::new(holes.clone(), order(&["mud", "clay"]), vec![]).unwrap();
        assert_eq!(ok.boreholes_with("clay").count(), 1);

        let line = SurveyLine { id: "A".into(), borehole_ids: vec!["B1".into(), "B9".into()] };
        assert!(matches!(
            Dataset::new(holes.clone(), order(&["mud", "clay"]), vec![line]).unwrap_err(),
            DatasetError::UnknownBorehole { .. }
        ));
        let line = SurveyLine { id: "A".into(), borehole_ids: vec!["B1".into(), "B1".into()] };
        assert!(matches!(
            Dataset::new(holes, order(&["mud", "clay"]), vec![line]).unwrap_err(),
            DatasetError::RepeatedBorehole { .. }
        ));
    }

    #[test]
    fn strata_must_follow_order() {
        let holes: Vec<Borehole<f64>> =
            parse_boreholes(b"B1,0,0,-30\nB1,sand,0,5\nB1,mud,5,8\n").unwrap();
        assert!(matches!(
            Dataset::new(holes, order(&["mud", "sand"]), vec![]).unwrap_err(),
            DatasetError::StratumOutOfOrder { .. }
        ));
    }

    #[test]
    fn order_validation() {
        assert_eq!(StratigraphicOrder::new(vec![]).unwrap_err(), DatasetError::EmptyOrder);
        let dup = vec![
            Stratum { id: "a".into(), color: [0.0; 4] },
            Stratum { id: "a".into(), color: [0.0; 4] },
        ];
        assert!(matches!(StratigraphicOrder::new(dup).unwrap_err(), DatasetError::DuplicateStratum(_)));
        let bad = vec![Stratum { id: "a".into(), color: [1.5, 0.0, 0.0, 1.0] }];
        assert!(matches!(StratigraphicOrder::new(bad).unwrap_err(), DatasetError::BadColor { .. }));
    }
}
