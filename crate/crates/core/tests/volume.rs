mod common;

use common::{fixtures, piecewise, Lcg};
use proptest::prelude::*;
use seabedkit_core::geomodel::{load_dataset_dir, FieldMetadata, Grid, ScalarField3D};
use seabedkit_core::volume::{
    composite_back_to_front, composite_front_to_back, render_volume_raycast, slice_section, Axis, Camera, ColorStop,
    Rgba, TransferFunction,
};
use seabedkit_core::Dataset64;

fn field(dims: [usize; 3], axes: [&str; 3], f: impl FnMut([f64; 3]) -> f64) -> ScalarField3D<f64> {
    let g = Grid::new(dims, [0.0; 3], [1.0; 3]).unwrap();
    let mut meta = FieldMetadata::named("f", "");
    meta.axes = axes.map(String::from);
    ScalarField3D::from_fn(g, meta, f)
}

fn two_stop(a: Rgba, b: Rgba) -> TransferFunction {
    TransferFunction::new(vec![ColorStop { t: 0.0, rgba: a }, ColorStop { t: 1.0, rgba: b }]).unwrap()
}

#[test]
fn transfer_function_matches_piecewise_oracle() {
    let stops = [
        (-2.0, [0.0, 0.0, 1.0, 0.0]),
        (1.0, [0.2, 0.9, 0.3, 0.5]),
        (1.0, [0.7, 0.1, 0.1, 0.6]),
        (4.5, [1.0, 1.0, 1.0, 1.0]),
    ];
    let tf = TransferFunction::new(stops.iter().map(|&(t, rgba)| ColorStop { t, rgba }).collect()).unwrap();
    let mut rng = Lcg(17);
    for _ in 0..1000 {
        let t = rng.range(-4.0, 6.0);
        if t == 1.0 {
            continue;
        }
        let (got, want) = (tf.apply(t), piecewise(&stops, t));
        for k in 0..4 {
            assert!((got[k] - want[k]).abs() < 1e-12, "t={t}");
        }
    }
    assert_eq!(tf.apply(-100.0), stops[0].1);
    assert_eq!(tf.apply(100.0), stops[3].1);
}

fn closed_form_two_layer(c1: Rgba, n1: i32, c2: Rgba, n2: i32, bg: [f64; 3]) -> [f64; 3] {
    let t1 = (1.0 - c1[3]).powi(n1);
    let t2 = (1.0 - c2[3]).powi(n2);
    [0, 1, 2].map(|k| c1[k] * (1.0 - t1) + t1 * c2[k] * (1.0 - t2) + t1 * t2 * bg[k])
}

#[test]
fn two_layer_ray_matches_closed_form() {
    let (c1, c2) = ([1.0, 0.2, 0.0, 0.3], [0.0, 0.4, 1.0, 0.5]);
    let bg = [0.1, 0.1, 0.1];
    // z = 0..=2 holds layer one, z = 3..=5 layer two; unit steps land on nodes
    let f = field([3, 3, 6], ["x", "y", "z"], |p| if p[2] < 2.5 { 0.0 } else { 1.0 });
    let cam = Camera { eye: [1.0, 1.0, -10.0], target: [1.0, 1.0, 0.0], up: [0.0, 1.0, 0.0], vfov_deg: 5.0, width: 3, height: 3 };
    let img = render_volume_raycast(&f, &cam, &two_stop(c1, c2), 1.0, bg).unwrap();
    let want = closed_form_two_layer(c1, 3, c2, 3, bg);
    let got = img.pixel(1, 1);
    for k in 0..3 {
        assert!((got[k] - want[k]).abs() <= 1.0 / 255.0, "{got:?} vs {want:?}");
    }
}

#[test]
fn halving_the_step_converges() {
    let f = field([6, 6, 12], ["x", "y", "z"], |p| 0.5 + 0.5 * (p[2] / 3.0).sin() * (p[0] / 4.0).cos());
    let tf = two_stop([0.0, 0.3, 1.0, 0.05], [1.0, 0.3, 0.0, 0.25]);
    let cam = Camera { eye: [2.5, 2.5, -20.0], target: [2.5, 2.5, 5.0], up: [0.0, 1.0, 0.0], vfov_deg: 6.0, width: 5, height: 5 };
    let render = |s: f64| render_volume_raycast(&f, &cam, &tf, s, [0.0; 3]).unwrap();
    let imgs: Vec<_> = [0.5, 0.25, 0.125, 0.0625].iter().map(|&s| render(s)).collect();
    let diff = |a: &seabedkit_core::volume::SectionImage, b: &seabedkit_core::volume::SectionImage| {
        a.pixels.iter().zip(&b.pixels).flat_map(|(p, q)| (0..3).map(move |k| (p[k] - q[k]).abs())).fold(0.0, f64::max)
    };
    let d: Vec<f64> = imgs.windows(2).map(|w| diff(&w[0], &w[1])).collect();
    assert!(d[1] < d[0] && d[2] < d[1], "{d:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn compositing_orders_agree(samples in prop::collection::vec(prop::array::uniform4(0.0f64..=1.0), 0..40), bg in prop::array::uniform3(0.0f64..=1.0)) {
        let a = composite_front_to_back(&samples, bg, false);
        let b = composite_back_to_front(&samples, bg);
        for k in 0..3 {
            prop_assert!((a[k] - b[k]).abs() < 1e-6);
        }
    }
}

#[test]
fn compositing_orders_agree_on_random_fields() {
    let tf = TransferFunction::thermal(0.0, 1.0);
    for seed in 0..20u64 {
        let mut rng = Lcg(seed);
        let f = field([8, 8, 8], ["x", "y", "z"], |_| rng.next_f64());
        let mut rays = Lcg(seed + 1000);
        for _ in 0..20 {
            let (x, y) = (rays.range(0.0, 7.0), rays.range(0.0, 7.0));
            let samples: Vec<Rgba> = (0..=70).filter_map(|k| f.sample([x, y, k as f64 * 0.1])).map(|v| tf.apply(v)).collect();
            let a = composite_front_to_back(&samples, [0.3; 3], false);
            let b = composite_back_to_front(&samples, [0.3; 3]);
            for k in 0..3 {
                assert!((a[k] - b[k]).abs() < 1e-6);
            }
        }
    }
}

#[test]
fn grid_plane_slice_equals_node_lookup() {
    let mut rng = Lcg(4);
    let f = field([5, 4, 6], ["x", "y", "z"], |_| rng.range(0.0, 10.0));
    let tf = TransferFunction::thermal(0.0, 10.0);
    let img = slice_section(&f, Axis::Y, 2.0, &tf).unwrap();
    assert_eq!((img.width, img.height), (5, 6));
    for row in 0..6 {
        for col in 0..5 {
            // highest z at the top for a non-depth axis
            let k = 5 - row;
            assert_eq!(img.pixel(col, row), tf.apply(f.at(col, 2, k)));
        }
    }
}

#[test]
fn invalid_column_is_fully_transparent() {
    let f = field([6, 5, 4], ["lon", "lat", "depth"], |p| if p[0] == 2.0 && p[1] == 3.0 { f64::NAN } else { p[2] });
    let tf = TransferFunction::thermal(0.0, 3.0);
    let img = slice_section(&f, Axis::Y, 3.0, &tf).unwrap();
    for row in 0..img.height {
        for col in 0..img.width {
            let a = img.pixel(col, row)[3];
            if col == 2 {
                assert_eq!(a, 0.0);
            } else {
                assert!(a > 0.0);
            }
        }
    }
    let rgba = img.rgba8();
    for row in 0..img.height {
        assert_eq!(&rgba[(row * img.width + 2) * 4..][..4], &[0, 0, 0, 0]);
    }
    // between planes the neighbouring column is masked too
    let img = slice_section(&f, Axis::Y, 2.5, &tf).unwrap();
    assert!((0..img.height).all(|r| img.pixel(2, r)[3] == 0.0));
}

#[test]
fn fixture_latitude_slice_spans_lon_by_depth() {
    let ds: Dataset64 = load_dataset_dir(&fixtures().join("ocean")).unwrap();
    let t = &ds.scalar_fields["temp"];
    let img = slice_section(t, Axis::Y, 0.5, &TransferFunction::thermal_for(t)).unwrap();
    let ext = img.geo_extent.clone().unwrap();
    assert_eq!((ext.u_axis.as_str(), ext.v_axis.as_str()), ("lon", "depth"));
    assert_eq!(ext.u_range, [100.0, 120.0]);
    assert_eq!(ext.v_range, [0.0, 200.0]);
    // the masked patch covers lon 108..110 at lat 0.5
    for row in 0..img.height {
        for col in 16..=20 {
            assert_eq!(img.pixel(col, row)[3], 0.0);
        }
        assert!(img.pixel(0, row)[3] > 0.0);
    }
    let png = img.to_png().unwrap();
    let decoder = png::Decoder::new(std::io::Cursor::new(png));
    let mut reader = decoder.read_info().unwrap();
    let mut buf = vec![0; reader.output_buffer_size().unwrap()];
    let info = reader.next_frame(&mut buf).unwrap();
    assert_eq!((info.width as usize, info.height as usize), (img.width, img.height));
    assert_eq!(&buf[..info.buffer_size()], &img.rgba8()[..]);
}
