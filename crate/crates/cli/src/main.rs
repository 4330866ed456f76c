//! `seabedkit`: batch products and the HTTP service.

use std::net::SocketAddr;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use seabedkit_core::geomodel::load_dataset_dir;
use seabedkit_core::products::{self, canonical_float, SpillSimulation};
use seabedkit_core::volume::Axis;
use seabedkit_core::Dataset64;
use seabedkit_service::{serve, ServiceConfig};

#[derive(Parser)]
#[command(name = "seabedkit", version, about = "Seabed geo-data products and viewer service")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Data {
    /// Dataset directory.
    #[arg(long)]
    data: PathBuf,
}

#[derive(Args)]
struct Out {
    /// Output file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Load a dataset and report the first problem found.
    IngestCheck {
        #[command(flatten)]
        data: Data,
        /// Also write the dataset summary JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Terrain TIN as GLB.
    Terrain {
        #[command(flatten)]
        data: Data,
        #[command(flatten)]
        out: Out,
    },
    /// Horizon surface of one stratum, or every horizon when --stratum is omitted.
    Horizon {
        #[command(flatten)]
        data: Data,
        #[arg(long)]
        stratum: Option<String>,
        #[command(flatten)]
        out: Out,
    },
    /// Fence diagram along a survey line as GLB.
    Fence {
        #[command(flatten)]
        data: Data,
        #[arg(long)]
        line: String,
        #[command(flatten)]
        out: Out,
    },
    /// Isosurface of a scalar field as GLB.
    Isosurface {
        #[command(flatten)]
        data: Data,
        #[arg(long)]
        field: String,
        #[arg(long, allow_hyphen_values = true, value_parser = finite)]
        iso: f64,
        #[command(flatten)]
        out: Out,
    },
    /// Axis-aligned section of a scalar field as PNG.
    Slice {
        #[command(flatten)]
        data: Data,
        #[arg(long)]
        field: String,
        /// x, y or z.
        #[arg(long)]
        axis: Axis,
        #[arg(long, allow_hyphen_values = true, value_parser = finite)]
        coord: f64,
        #[command(flatten)]
        out: Out,
        /// Also write the slice extent JSON here.
        #[arg(long)]
        extent_out: Option<PathBuf>,
    },
    /// Binary spill frame stream.
    Spill {
        #[command(flatten)]
        data: Data,
        /// Number of frames.
        #[arg(long)]
        frames: u64,
        /// First frame index.
        #[arg(long, default_value_t = 0)]
        from: u64,
        /// Override the configured seed.
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        out: Out,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        listen: SocketAddr,
        #[arg(long, env = "SEABEDKIT_DATA")]
        data: PathBuf,
        #[arg(long)]
        cors: bool,
        #[arg(long, default_value = "64")]
        cache_size: NonZeroUsize,
        /// Directory with the viewer bundle.
        #[arg(long = "static")]
        static_dir: Option<PathBuf>,
    },
}

fn finite(raw: &str) -> Result<f64, String> {
    canonical_float(raw).map(|(v, _)| v).map_err(|e| e.to_string())
}

fn load(data: &Data) -> Result<Dataset64, String> {
    load_dataset_dir(&data.data).map_err(|e| e.to_string())
}

fn write(out: &Out, bytes: &[u8]) -> Result<(), String> {
    write_to(&out.out, bytes)
}

fn write_to(path: &Path, bytes: &[u8]) -> Result<(), String> {
    std::fs::write(path, bytes).map_err(|e| format!("{}: {e}", path.display()))
}

fn run(cmd: Command) -> Result<(), String> {
    let err = |e: products::ProductError| e.to_string();
    match cmd {
        Command::IngestCheck { data, out } => {
            let ds = load(&data)?;
            if let Some(p) = out {
                write_to(&p, &products::dataset_summary(&ds))?;
            }
            println!(
                "{}: ok ({} boreholes, {} strata, {} survey lines, {} fields)",
                data.data.display(),
                ds.boreholes.len(),
                ds.order.strata.len(),
                ds.survey_lines.len(),
                ds.scalar_fields.len() + ds.vector_fields.len()
            );
            Ok(())
        }
        Command::Terrain { data, out } => write(&out, &products::terrain_glb(&load(&data)?).map_err(err)?),
        Command::Horizon { data, stratum, out } => {
            let ds = load(&data)?;
            let bytes = match stratum {
                Some(s) => products::horizon_glb(&ds, &s),
                None => products::horizons_glb(&ds),
            };
            write(&out, &bytes.map_err(err)?)
        }
        Command::Fence { data, line, out } => write(&out, &products::fence_glb(&load(&data)?, &line).map_err(err)?),
        Command::Isosurface { data, field, iso, out } => {
            write(&out, &products::isosurface_glb(&load(&data)?, &field, iso).map_err(err)?)
        }
        Command::Slice { data, field, axis, coord, out, extent_out } => {
            let slice = products::slice_png(&load(&data)?, &field, axis, coord).map_err(err)?;
            write(&out, &slice.png)?;
            match extent_out {
                Some(p) => write_to(&p, slice.extent_json.as_bytes()),
                None => Ok(()),
            }
        }
        Command::Spill { data, frames, from, seed, out } => {
            let ds = load(&data)?;
            let mut config = products::dataset_spill(&ds).map_err(err)?;
            if let Some(seed) = seed {
                config.seed = seed;
            }
            let mut sim = SpillSimulation::new(config).map_err(err)?;
            write(&out, &sim.frames(&ds, from, frames).map_err(err)?)
        }
        Command::Serve { listen, data, cors, cache_size, static_dir } => {
            let config = ServiceConfig { listen, data_dir: data, cors, cache_size, static_dir };
            let rt = tokio::runtime::Builder::new_multi_thread()
                .enable_all()
                .build()
                .map_err(|e| e.to_string())?;
            rt.block_on(serve(config)).map_err(|e| e.to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::from_default_env())
        .with_writer(std::io::stderr)
        .init();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("seabedkit: {message}");
            ExitCode::from(1)
        }
    }
}
