//! On-disk dataset directory.
//!
//! ```text
//! <dir>/boreholes.csv        borehole CSV (required)
//! <dir>/strata.json          {strata:[{id, color}]} (required)
//! <dir>/survey_lines.json    {lines:[{id, boreholes:[..]}]}
//! <dir>/fields/<name>.json   field header, payload in <name>.bin
//! <dir>/bathymetry.csv       x,y,z soundings for the terrain TIN
//! <dir>/drape.json           {name, image, extent:[x_min,y_min,x_max,y_max]}
//! <dir>/spill.json           default spill configuration
//! ```

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::borehole::{parse_boreholes, serialize_boreholes, BoreholeError};
use super::dataset::{Dataset, DatasetError, DrapeSource, StratigraphicOrder, SurveyLine};
use super::field::{parse_scalar_field, parse_vector_field, FieldError, FieldHeader};
use crate::particles::SpillConfig;
use crate::scalar::Real;

pub const BOREHOLES_FILE: &str = "boreholes.csv";
pub const STRATA_FILE: &str = "strata.json";
pub const LINES_FILE: &str = "survey_lines.json";
pub const FIELDS_DIR: &str = "fields";
pub const BATHYMETRY_FILE: &str = "bathymetry.csv";
pub const DRAPE_FILE: &str = "drape.json";
pub const SPILL_FILE: &str = "spill.json";

/// Ingestion failure pinned to a file and, when known, a line.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadError {
    pub path: PathBuf,
    pub line: Option<u64>,
    pub message: String,
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "{}:{}: {}", self.path.display(), line, self.message),
            None => write!(f, "{}: {}", self.path.display(), self.message),
        }
    }
}

impl std::error::Error for LoadError {}

fn err(path: &Path, line: Option<u64>, message: impl Into<String>) -> LoadError {
    LoadError {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn read(path: &Path) -> Result<Vec<u8>, LoadError> {
    fs::read(path).map_err(|e| err(path, None, e.to_string()))
}

#[derive(Serialize, Deserialize)]
struct LinesFile {
    lines: Vec<SurveyLine>,
}

#[derive(Serialize, Deserialize)]
struct DrapeFile {
    name: String,
    image: String,
    extent: [f64; 4],
}

fn borehole_line(e: &BoreholeError) -> Option<u64> {
    match e {
        BoreholeError::MalformedRow { line, .. }
        | BoreholeError::NonContiguousColumn { line, .. }
        | BoreholeError::DuplicateBoreholeInterval { line, .. }
        | BoreholeError::InvertedInterval { line, .. } => Some(*line),
    }
}

/// First 1-based line of `text` starting with `prefix`.
fn find_line(text: &[u8], prefix: &str) -> Option<u64> {
    String::from_utf8_lossy(text)
        .lines()
        .position(|l| l.starts_with(prefix))
        .map(|i| i as u64 + 1)
}

fn parse_points<T: Real>(path: &Path, text: &[u8]) -> Result<Vec<[T; 3]>, LoadError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).from_reader(text);
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| err(path, e.position().map(|p| p.line()), e.to_string()))?;
        let line = rec.position().map(|p| p.line());
        if rec.len() != 3 {
            return Err(err(path, line, format!("expected 3 fields, found {}", rec.len())));
        }
        let mut p = [T::zero(); 3];
        for (d, slot) in p.iter_mut().enumerate() {
            *slot = match rec[d].trim().parse::<T>() {
                Ok(v) if v.is_finite() => v,
                _ => return Err(err(path, line, format!("{:?} is not a finite number", &rec[d]))),
            };
        }
        out.push(p);
    }
    Ok(out)
}

/// Loads and validates a dataset directory.
pub fn load_dataset_dir<T: Real>(dir: &Path) -> Result<Dataset<T>, LoadError> {
    if !dir.is_dir() {
        return Err(err(dir, None, "dataset directory does not exist"));
    }
    let holes_path = dir.join(BOREHOLES_FILE);
    let holes_text = read(&holes_path)?;
    let holes = parse_boreholes::<T>(&holes_text)
        .map_err(|e| err(&holes_path, borehole_line(&e), e.to_string()))?;

    let strata_path = dir.join(STRATA_FILE);
    let order = StratigraphicOrder::from_json(&read(&strata_path)?).map_err(|m| err(&strata_path, None, m))?;

    let lines_path = dir.join(LINES_FILE);
    let lines = if lines_path.exists() {
        let f: LinesFile = serde_json::from_slice(&read(&lines_path)?)
            .map_err(|e| err(&lines_path, Some(e.line() as u64), e.to_string()))?;
        f.lines
    } else {
        Vec::new()
    };

    let mut ds = Dataset::new(holes, order, lines).map_err(|e| match &e {
        DatasetError::UnknownStratum { borehole, stratum } | DatasetError::StratumOutOfOrder { borehole, stratum } => {
            let line = find_line(&holes_text, &format!("{borehole},{stratum},"));
            err(&holes_path, line, e.to_string())
        }
        DatasetError::DuplicateBorehole(_) | DatasetError::EmptyBoreholeId => err(&holes_path, None, e.to_string()),
        _ => err(&lines_path, None, e.to_string()),
    })?;

    let fields_dir = dir.join(FIELDS_DIR);
    if fields_dir.is_dir() {
        let mut headers: Vec<PathBuf> = fs::read_dir(&fields_dir)
            .map_err(|e| err(&fields_dir, None, e.to_string()))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        headers.sort();
        for header_path in headers {
            let header = read(&header_path)?;
            let payload_path = header_path.with_extension("bin");
            let payload = read(&payload_path)?;
            let parsed = FieldHeader::from_json(&header).map_err(|e| err(&header_path, None, e.to_string()))?;
            // a size mismatch may be either file's fault, so name both
            let blame = |e: FieldError| match e {
                FieldError::SizeMismatch { .. } => {
                    let name = header_path.file_name().unwrap_or_default().to_string_lossy();
                    err(&payload_path, None, format!("{e} from the dims in {name}"))
                }
                _ => err(&header_path, None, e.to_string()),
            };
            if parsed.components == 3 {
                let f = parse_vector_field::<T>(&header, &payload).map_err(blame)?;
                ds = ds.with_vector_field(f);
            } else {
                let f = parse_scalar_field::<T>(&header, &payload).map_err(blame)?;
                ds = ds.with_scalar_field(f);
            }
        }
    }

    let bathy_path = dir.join(BATHYMETRY_FILE);
    if bathy_path.exists() {
        ds.terrain_samples = Some(parse_points(&bathy_path, &read(&bathy_path)?)?);
    }

    let drape_path = dir.join(DRAPE_FILE);
    if drape_path.exists() {
        let d: DrapeFile = serde_json::from_slice(&read(&drape_path)?)
            .map_err(|e| err(&drape_path, Some(e.line() as u64), e.to_string()))?;
        let png = read(&dir.join(&d.image))?;
        ds.drape = Some(DrapeSource {
            name: d.name,
            png,
            extent: d.extent.map(T::lit),
        });
    }

    let spill_path = dir.join(SPILL_FILE);
    if spill_path.exists() {
        let cfg: SpillConfig<T> = serde_json::from_slice(&read(&spill_path)?)
            .map_err(|e| err(&spill_path, Some(e.line() as u64), e.to_string()))?;
        cfg.validate().map_err(|e| err(&spill_path, None, e.to_string()))?;
        ds.spill = Some(cfg);
    }
    Ok(ds)
}

/// Writes a dataset in the layout read by [`load_dataset_dir`].
pub fn write_dataset_dir<T: Real>(ds: &Dataset<T>, dir: &Path) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let holes: Vec<_> = ds.boreholes.values().cloned().collect();
    fs::write(dir.join(BOREHOLES_FILE), serialize_boreholes(&holes))?;
    fs::write(dir.join(STRATA_FILE), to_json(&ds.order))?;
    let lines = LinesFile {
        lines: ds.survey_lines.values().cloned().collect(),
    };
    fs::write(dir.join(LINES_FILE), to_json(&lines))?;
    if !ds.scalar_fields.is_empty() || !ds.vector_fields.is_empty() {
        let fields = dir.join(FIELDS_DIR);
        fs::create_dir_all(&fields)?;
        for (name, f) in &ds.scalar_fields {
            let (h, p) = f.to_files();
            fs::write(fields.join(format!("{name}.json")), h)?;
            fs::write(fields.join(format!("{name}.bin")), p)?;
        }
        for (name, f) in &ds.vector_fields {
            let (h, p) = f.to_files();
            fs::write(fields.join(format!("{name}.json")), h)?;
            fs::write(fields.join(format!("{name}.bin")), p)?;
        }
    }
    if let Some(samples) = &ds.terrain_samples {
        let text: String = samples
            .iter()
            .map(|p| format!("{},{},{}\n", p[0], p[1], p[2]))
            .collect();
        fs::write(dir.join(BATHYMETRY_FILE), text)?;
    }
    if let Some(d) = &ds.drape {
        let image = format!("{}.png", d.name);
        fs::write(dir.join(&image), &d.png)?;
        let file = DrapeFile {
            name: d.name.clone(),
            image,
            extent: d.extent.map(T::as_f64),
        };
        fs::write(dir.join(DRAPE_FILE), to_json(&file))?;
    }
    if let Some(cfg) = &ds.spill {
        fs::write(dir.join(SPILL_FILE), to_json(cfg))?;
    }
    Ok(())
}

fn to_json<S: Serialize>(v: &S) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(v).expect("serializable");
    out.push(b'\n');
    out
}
