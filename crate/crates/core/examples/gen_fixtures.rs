//! Regenerates the bundled fixture dataset and the frozen spill golden state.
//!
//! Usage: `cargo run -p seabedkit-core --example gen_fixtures -- <fixtures dir>`

use std::f64::consts::PI;
use std::path::PathBuf;

use seabedkit_core::geomodel::{
    parse_boreholes, write_dataset_dir, Dataset, DrapeSource, FieldMetadata, Grid, ScalarField3D,
    StratigraphicOrder, Stratum, SurveyLine, VectorField3D,
};
use seabedkit_core::particles::{step, ParticleSystemState, SpillConfig};

const BOREHOLES: &str = "\
B1,100,100,-30
B1,mud,0,6
B1,sand,6,15
B2,500,300,-32
B2,mud,0,4
B2,sand,4,12.5
B3,900,150,-34
B3,mud,0,8
";

/// Depth (m) of the thermocline midpoint at a lon/lat node.
fn thermocline_depth(lon: f64, lat: f64) -> f64 {
    90.0 + 15.0 * (0.3 * (lon - 100.0)).sin() + 10.0 * (0.5 * lat).cos()
}

fn temperature(p: [f64; 3]) -> f64 {
    let [lon, lat, depth] = p;
    if (108.0..=110.0).contains(&lon) && (0.0..=1.0).contains(&lat) {
        return f64::NAN;
    }
    let t = 5.0 + 23.0 / (1.0 + ((depth - thermocline_depth(lon, lat)) / 15.0).exp());
    t as f32 as f64
}

fn sonar_png() -> Vec<u8> {
    let n = 64usize;
    let mut rgba = Vec::with_capacity(n * n * 4);
    for row in 0..n {
        for col in 0..n {
            let x = col as f64 / (n - 1) as f64;
            let y = row as f64 / (n - 1) as f64;
            let v = 0.5 + 0.35 * (6.0 * PI * x).sin() * (4.0 * PI * y).cos();
            let g = (v * 255.0).round() as u8;
            rgba.extend_from_slice(&[g / 2, g, g, 255]);
        }
    }
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, n as u32, n as u32);
        enc.set_color(png::ColorType::Rgba);
        enc.set_depth(png::BitDepth::Eight);
        enc.write_header().unwrap().write_image_data(&rgba).unwrap();
    }
    out
}

fn main() {
    let root: PathBuf = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| "fixtures".into());
    let holes = parse_boreholes::<f64>(BOREHOLES.as_bytes()).expect("fixture boreholes");
    let order = StratigraphicOrder::new(vec![
        Stratum { id: "mud".into(), color: [0.55, 0.45, 0.35, 1.0] },
        Stratum { id: "sand".into(), color: [0.9, 0.8, 0.5, 1.0] },
    ])
    .unwrap();
    let line = SurveyLine {
        id: "A".into(),
        borehole_ids: vec!["B1".into(), "B2".into(), "B3".into()],
    };
    let mut ds = Dataset::new(holes, order, vec![line]).unwrap();

    let grid = Grid::new([41, 21, 21], [100.0, -5.0, 0.0], [0.5, 0.5, 10.0]).unwrap();
    let mut meta = FieldMetadata::named("temp", "degC");
    meta.axes = ["lon".into(), "lat".into(), "depth".into()];
    meta.file_sentinel = Some(-9999.0);
    ds = ds.with_scalar_field(ScalarField3D::from_fn(grid, meta, temperature));

    let cgrid = Grid::new([11, 11, 7], [0.0, 0.0, -60.0], [100.0, 100.0, 10.0]).unwrap();
    let current = VectorField3D::from_fn(cgrid, FieldMetadata::named("current", "m/s"), |p: [f64; 3]| {
        let u = 0.2 + 0.05 * (p[1] / 200.0).sin();
        let v = 0.05 * (p[0] / 300.0).cos();
        [u as f32 as f64, v as f32 as f64, 0.0]
    });
    ds = ds.with_vector_field(current);

    let mut bathy = Vec::new();
    for j in 0..21 {
        for i in 0..21 {
            let (x, y) = (50.0 * i as f64, 50.0 * j as f64);
            let axis = 500.0 + 100.0 * (y / 200.0).sin();
            let z = -30.0 - 12.0 * (-((x - axis) / 120.0).powi(2)).exp() - 0.002 * y;
            bathy.push([x, y, (z * 1000.0).round() / 1000.0]);
        }
    }
    ds.terrain_samples = Some(bathy);
    ds.drape = Some(DrapeSource {
        name: "sonar".into(),
        png: sonar_png(),
        extent: [0.0, 0.0, 1000.0, 1000.0],
    });
    let spill = SpillConfig {
        source: [200.0, 500.0, -50.0],
        emission_rate: 20.0,
        max_particles: 2000,
        lifetime: 60.0,
        buoyancy: 0.05,
        diffusion: 0.5,
        seed: 42,
        dt: 0.5,
        current: "current".into(),
        steps_per_frame: 5,
    };
    ds.spill = Some(spill.clone());

    let ocean = root.join("ocean");
    write_dataset_dir(&ds, &ocean).expect("write dataset");
    std::fs::write(root.join("line_a.csv"), BOREHOLES).expect("write line_a.csv");

    // golden state from the dataset as it is read back from disk
    let loaded = seabedkit_core::geomodel::load_dataset_dir::<f64>(&ocean).expect("reload");
    let field = &loaded.vector_fields["current"];
    let mut state = ParticleSystemState::new(&spill);
    for _ in 0..100 {
        step(&mut state, &spill, field);
    }
    let mut golden = serde_json::to_vec_pretty(&state).unwrap();
    golden.push(b'\n');
    std::fs::write(root.join("spill_seed42_100steps.json"), golden).expect("write golden");
    println!("fixtures written to {}", root.display());
}
