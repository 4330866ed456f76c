//! Runs the CLI binary and the service router side by side.
#![allow(dead_code)]

use std::net::SocketAddr;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use seabedkit_core::geomodel::load_dataset_dir;
use seabedkit_service::{router, AppState, ServiceConfig};
use tower::ServiceExt;

pub fn fixture_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn ocean() -> PathBuf {
    fixture_root().join("ocean")
}

pub fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seabedkit"))
        .args(args)
        .env_remove("SEABEDKIT_DATA")
        .output()
        .expect("run seabedkit")
}

/// Runs a product subcommand against the fixture and returns the written file.
pub fn cli_product(args: &[&str], out: &Path) -> Vec<u8> {
    let data = ocean();
    let mut full: Vec<&str> = args.to_vec();
    full.extend(["--data", data.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    let o = cli(&full);
    assert!(o.status.success(), "{full:?}: {}", String::from_utf8_lossy(&o.stderr));
    std::fs::read(out).unwrap()
}

pub struct Service {
    pub app: Router,
    rt: tokio::runtime::Runtime,
}

pub struct Reply {
    pub status: StatusCode,
    pub extent: Option<String>,
    pub body: Vec<u8>,
}

impl Service {
    pub fn fixture() -> Self {
        let ds = load_dataset_dir(&ocean()).unwrap();
        let state = AppState::with_dataset(ds, NonZeroUsize::new(32).unwrap());
        let config = ServiceConfig::new("127.0.0.1:8080".parse::<SocketAddr>().unwrap(), ocean());
        let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build().unwrap();
        Service { app: router(state, &config), rt }
    }

    pub fn request(&self, req: Request<Body>) -> Reply {
        self.rt.block_on(async {
            let res = self.app.clone().oneshot(req).await.unwrap();
            let status = res.status();
            let extent = res.headers().get("x-geo-extent").map(|v| v.to_str().unwrap().to_string());
            let body = res.into_body().collect().await.unwrap().to_bytes().to_vec();
            Reply { status, extent, body }
        })
    }

    pub fn get(&self, uri: &str) -> Reply {
        self.request(Request::get(uri).body(Body::empty()).unwrap())
    }

    pub fn post_json(&self, uri: &str, body: String) -> Reply {
        self.request(Request::post(uri).header("content-type", "application/json").body(Body::from(body)).unwrap())
    }
}

/// (CLI arguments, service URI) for every product, with the fixture's ids.
pub fn product_pairs() -> Vec<(Vec<&'static str>, &'static str)> {
    vec![
        (vec!["terrain"], "/api/v1/terrain"),
        (vec!["horizon"], "/api/v1/horizons"),
        (vec!["horizon", "--stratum", "mud"], "/api/v1/horizons/mud"),
        (vec!["fence", "--line", "A"], "/api/v1/fence/A"),
        (vec!["isosurface", "--field", "temp", "--iso", "20"], "/api/v1/isosurface?field=temp&iso=20"),
        (vec!["isosurface", "--field", "temp", "--iso", "12.5"], "/api/v1/isosurface?field=temp&iso=12.5"),
        (vec!["slice", "--field", "temp", "--axis", "y", "--coord", "0.5"], "/api/v1/slice?field=temp&axis=y&coord=0.5"),
        (vec!["slice", "--field", "temp", "--axis", "z", "--coord", "55"], "/api/v1/slice?field=temp&axis=z&coord=55"),
        (vec!["slice", "--field", "temp", "--axis", "x", "--coord", "109.25"], "/api/v1/slice?field=temp&axis=x&coord=109.25"),
        (vec!["spill", "--frames", "30"], "/api/v1/spill/frames?from=0&count=30"),
        (vec!["spill", "--frames", "5", "--from", "12"], "/api/v1/spill/frames?from=12&count=5"),
        (vec!["ingest-check"], "/api/v1/dataset"),
    ]
}

/// Copies the fixture dataset so a test can corrupt it.
pub fn copy_fixture(to: &Path) {
    fn walk(from: &Path, to: &Path) {
        std::fs::create_dir_all(to).unwrap();
        for e in std::fs::read_dir(from).unwrap() {
            let p = e.unwrap().path();
            let dest = to.join(p.file_name().unwrap());
            if p.is_dir() {
                walk(&p, &dest);
            } else {
                std::fs::copy(&p, &dest).unwrap();
            }
        }
    }
    walk(&ocean(), to);
}
