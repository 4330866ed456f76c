use std::collections::HashSet;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoreholeError {
    #[error("line {line}: malformed row: {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error("line {line}: borehole {borehole}: interval does not continue the column (expected top {expected}, found {found})")]
    NonContiguousColumn {
        line: u64,
        borehole: String,
        expected: String,
        found: String,
    },
    #[error("line {line}: borehole {borehole}: stratum {stratum} listed twice")]
    DuplicateBoreholeInterval {
        line: u64,
        borehole: String,
        stratum: String,
    },
    #[error("line {line}: borehole {borehole}: bottom depth must exceed top depth")]
    InvertedInterval { line: u64, borehole: String },
}

/// One stratum occurrence in a drilled column; depths in meters below the collar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratumInterval<T> {
    pub stratum_id: String,
    pub top_depth: T,
    pub bottom_depth: T,
}

impl<T: Real> StratumInterval<T> {
    pub fn thickness(&self) -> T {
        self.bottom_depth - self.top_depth
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Borehole<T> {
    pub id: String,
    /// (east, north) in meters.
    pub location: [T; 2],
    /// Negative below sea level.
    pub collar_elevation: T,
    pub intervals: Vec<StratumInterval<T>>,
}

impl<T: Real> Borehole<T> {
    pub fn interval(&self, stratum_id: &str) -> Option<&StratumInterval<T>> {
        self.intervals.iter().find(|iv| iv.stratum_id == stratum_id)
    }

    /// World elevation of a depth measured down from the collar.
    pub fn world_z(&self, depth: T) -> T {
        self.collar_elevation - depth
    }

    /// World elevation of the top of `stratum_id`, if drilled.
    pub fn stratum_top_z(&self, stratum_id: &str) -> Option<T> {
        self.interval(stratum_id).map(|iv| self.world_z(iv.top_depth))
    }

    /// Deepest drilled depth (top of the column when no intervals).
    pub fn total_depth(&self) -> T {
        self.intervals
            .last()
            .map(|iv| iv.bottom_depth)
            .unwrap_or_else(T::zero)
    }

    /// Checks contiguity and ordering of the column.
    pub fn check_column(&self) -> Result<(), BoreholeError> {
        let mut seen = HashSet::new();
        let mut prev: Option<T> = None;
        for iv in &self.intervals {
            if !seen.insert(iv.stratum_id.as_str()) {
                return Err(BoreholeError::DuplicateBoreholeInterval {
                    line: 0,
                    borehole: self.id.clone(),
                    stratum: iv.stratum_id.clone(),
                });
            }
            if !(iv.bottom_depth > iv.top_depth) {
                return Err(BoreholeError::InvertedInterval {
                    line: 0,
                    borehole: self.id.clone(),
                });
            }
            if let Some(p) = prev {
                if iv.top_depth != p {
                    return Err(BoreholeError::NonContiguousColumn {
                        line: 0,
                        borehole: self.id.clone(),
                        expected: p.to_string(),
                        found: iv.top_depth.to_string(),
                    });
                }
            }
            prev = Some(iv.bottom_depth);
        }
        Ok(())
    }
}

fn parse_num<T: Real>(s: &str, line: u64, what: &str) -> Result<T, BoreholeError> {
    match s.trim().parse::<T>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(BoreholeError::MalformedRow {
            line,
            reason: format!("{what} {s:?} is not a finite number"),
        }),
    }
}

/// Parses the two-row-kind borehole CSV.
///
/// A row whose id has not been seen and whose second field is numeric opens a
/// new borehole (`id,x,y,collar_elevation`); any other row is an interval
/// (`id,stratum_id,top_depth,bottom_depth`) appended to an existing borehole.
pub fn parse_boreholes<T: Real>(text: &[u8]) -> Result<Vec<Borehole<T>>, BoreholeError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text);
    let mut holes: IndexMap<String, Borehole<T>> = IndexMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| BoreholeError::MalformedRow {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            reason: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != 4 {
            return Err(BoreholeError::MalformedRow {
                line,
                reason: format!("expected 4 fields, found {}", record.len()),
            });
        }
        let id = &record[0];
        if id.is_empty() {
            return Err(BoreholeError::MalformedRow {
                line,
                reason: "empty borehole id".into(),
            });
        }
        let second_numeric = record[1].trim().parse::<f64>().is_ok();
        match holes.get_mut(id) {
            None if second_numeric => {
                let x = parse_num(&record[1], line, "x")?;
                let y = parse_num(&record[2], line, "y")?;
                let collar = parse_num(&record[3], line, "collar elevation")?;
                holes.insert(
                    id.to_string(),
                    Borehole {
                        id: id.to_string(),
                        location: [x, y],
                        collar_elevation: collar,
                        intervals: Vec::new(),
                    },
                );
            }
            None => {
                return Err(BoreholeError::MalformedRow {
                    line,
                    reason: format!("interval row for unknown borehole {id:?}"),
                })
            }
            Some(hole) => {
                let stratum_id = record[1].to_string();
                if stratum_id.is_empty() {
                    return Err(BoreholeError::MalformedRow {
                        line,
                        reason: "empty stratum id".into(),
                    });
                }
                let top: T = parse_num(&record[2], line, "top depth")?;
                let bottom: T = parse_num(&record[3], line, "bottom depth")?;
                if top < T::zero() {
                    return Err(BoreholeError::MalformedRow {
                        line,
                        reason: "negative top depth".into(),
                    });
                }
                if !(bottom > top) {
                    return Err(BoreholeError::InvertedInterval {
                        line,
                        borehole: hole.id.clone(),
                    });
                }
                if hole.interval(&stratum_id).is_some() {
                    return Err(BoreholeError::DuplicateBoreholeInterval {
                        line,
                        borehole: hole.id.clone(),
                        stratum: stratum_id,
                    });
                }
                if let Some(last) = hole.intervals.last() {
                    if last.bottom_depth != top {
                        return Err(BoreholeError::NonContiguousColumn {
                            line,
                            borehole: hole.id.clone(),
                            expected: last.bottom_depth.to_string(),
                            found: top.to_string(),
                        });
                    }
                }
                hole.intervals.push(StratumInterval {
                    stratum_id,
                    top_depth: top,
                    bottom_depth: bottom,
                });
            }
        }
    }
    Ok(holes.into_values().collect())
}

/// Writes boreholes back in the CSV form accepted by [`parse_boreholes`].
pub fn serialize_boreholes<T: Real>(holes: &[Borehole<T>]) -> Vec<u8> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for hole in holes {
        writer
            .write_record([
                hole.id.clone(),
                hole.location[0].to_string(),
                hole.location[1].to_string(),
                hole.collar_elevation.to_string(),
            ])
            .expect("in-memory write");
        for iv in &hole.intervals {
            writer
                .write_record([
                    hole.id.clone(),
                    iv.stratum_id.clone(),
                    iv.top_depth.to_string(),
                    iv.bottom_depth.to_string(),
                ])
                .expect("in-memory write");
        }
    }
    writer.into_inner().expect("in-memory flush")
}
