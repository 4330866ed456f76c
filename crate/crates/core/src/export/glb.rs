use serde_json::{json, Value};

use super::{ExportError, Scene};
use crate::scalar::Real;

const GLB_MAGIC: u32 = 0x4654_6C67;
const CHUNK_JSON: u32 = 0x4E4F_534A;
const CHUNK_BIN: u32 = 0x004E_4942;
const FLOAT: u32 = 5126;
const UNSIGNED_INT: u32 = 5125;
const ARRAY_BUFFER: u32 = 34962;
const ELEMENT_ARRAY_BUFFER: u32 = 34963;

#[derive(Default)]
struct Builder {
    bin: Vec<u8>,
    views: Vec<Value>,
    accessors: Vec<Value>,
}

impl Builder {
    fn align(&mut self) {
        while self.bin.len() % 4 != 0 {
            self.bin.push(0);
        }
    }

    fn view(&mut self, bytes: &[u8], target: Option<u32>) -> usize {
        self.align();
        let mut v = json!({ "buffer": 0, "byteOffset": self.bin.len(), "byteLength": bytes.len() });
        if let Some(t) = target {
            v["target"] = json!(t);
        }
        self.bin.extend_from_slice(bytes);
        self.views.push(v);
        self.views.len() - 1
    }

    fn floats(&mut self, data: &[f32], width: usize, with_bounds: bool) -> usize {
        let bytes: Vec<u8> = data.iter().flat_map(|v| v.to_le_bytes()).collect();
        let view = self.view(&bytes, Some(ARRAY_BUFFER));
        let kind = match width {
            2 => "VEC2",
            3 => "VEC3",
            _ => unreachable!("attribute width"),
        };
        let mut acc = json!({
            "bufferView": view,
            "componentType": FLOAT,
            "count": data.len() / width,
            "type": kind,
        });
        if with_bounds {
            let mut lo = vec![f32::INFINITY; width];
            let mut hi = vec![f32::NEG_INFINITY; width];
            for c in data.chunks_exact(width) {
                for k in 0..width {
                    lo[k] = lo[k].min(c[k]);
                    hi[k] = hi[k].max(c[k]);
                }
            }
            acc["min"] = json!(lo);
            acc["max"] = json!(hi);
        }
        self.accessors.push(acc);
        self.accessors.len() - 1
    }

    fn indices(&mut self, data: &[u32]) -> usize {
        let bytes: Vec<u8> = data.iter().flat_map(|v| v.to_le_bytes()).collect();
        let view = self.view(&bytes, Some(ELEMENT_ARRAY_BUFFER));
        self.accessors.push(json!({
            "bufferView": view,
            "componentType": UNSIGNED_INT,
            "count": data.len(),
            "type": "SCALAR",
        }));
        self.accessors.len() - 1
    }
}

/// Single-file binary glTF 2.0 with one node per scene node.
///
/// Texture coordinates are written with the glTF top-left image origin, i.e.
/// `v` is flipped relative to the mesh UVs.
pub fn export_gltf<T: Real>(scene: &Scene<T>) -> Result<Vec<u8>, ExportError> {
    scene.validate()?;
    let mut b = Builder::default();

    let mut images = Vec::new();
    for tex in &scene.textures {
        let view = b.view(&tex.png, None);
        images.push(json!({ "bufferView": view, "mimeType": "image/png", "name": tex.name }));
    }
    let textures: Vec<Value> = (0..scene.textures.len())
        .map(|i| json!({ "source": i, "sampler": 0 }))
        .collect();

    let mut nodes = Vec::new();
    let mut meshes = Vec::new();
    let mut materials = Vec::new();
    for (i, node) in scene.nodes.iter().enumerate() {
        let m = &node.mesh;
        let pos: Vec<f32> = m.positions.iter().flat_map(|p| p.map(T::as_f32)).collect();
        let mut attributes = json!({ "POSITION": b.floats(&pos, 3, true) });
        if !m.normals.is_empty() {
            let nrm: Vec<f32> = m.normals.iter().flat_map(|n| n.map(T::as_f32)).collect();
            attributes["NORMAL"] = json!(b.floats(&nrm, 3, false));
        }
        if let Some(uvs) = &m.uvs {
            let tc: Vec<f32> = uvs
                .iter()
                .flat_map(|uv| [uv[0].as_f32(), (T::one() - uv[1]).as_f32()])
                .collect();
            attributes["TEXCOORD_0"] = json!(b.floats(&tc, 2, false));
        }
        let indices = b.indices(&m.indices);

        let color = m.material.color;
        let mut pbr = json!({
            "baseColorFactor": color,
            "metallicFactor": 0.0,
            "roughnessFactor": 1.0,
        });
        if let Some(tex) = &m.material.texture {
            let t = scene.textures.iter().position(|t| &t.name == tex).expect("validated");
            pbr["baseColorTexture"] = json!({ "index": t });
        }
        let mut material = json!({
            "name": m.material.name,
            "pbrMetallicRoughness": pbr,
            "doubleSided": true,
        });
        if color[3] < 1.0 {
            material["alphaMode"] = json!("BLEND");
        }
        materials.push(material);
        meshes.push(json!({
            "name": node.label,
            "primitives": [{ "attributes": attributes, "indices": indices, "material": i, "mode": 4 }],
        }));
        nodes.push(json!({ "name": node.label, "mesh": i, "extras": { "group": node.group } }));
    }
    b.align();

    let mut doc = json!({
        "asset": { "version": "2.0", "generator": "seabedkit" },
        "scene": 0,
        "scenes": [{ "name": scene.name, "nodes": (0..nodes.len()).collect::<Vec<_>>() }],
        "nodes": nodes,
        "meshes": meshes,
        "materials": materials,
        "accessors": b.accessors,
        "bufferViews": b.views,
        "buffers": [{ "byteLength": b.bin.len() }],
    });
    if !images.is_empty() {
        doc["images"] = json!(images);
        doc["textures"] = json!(textures);
        doc["samplers"] = json!([{ "magFilter": 9729, "minFilter": 9729 }]);
    }

    let mut json_bytes = serde_json::to_vec(&doc).expect("document serializes");
    while json_bytes.len() % 4 != 0 {
        json_bytes.push(b' ');
    }
    let total = 12 + 8 + json_bytes.len() + 8 + b.bin.len();
    let mut out = Vec::with_capacity(total);
    out.extend_from_slice(&GLB_MAGIC.to_le_bytes());
    out.extend_from_slice(&2u32.to_le_bytes());
    out.extend_from_slice(&(total as u32).to_le_bytes());
    out.extend_from_slice(&(json_bytes.len() as u32).to_le_bytes());
    out.extend_from_slice(&CHUNK_JSON.to_le_bytes());
    out.extend_from_slice(&json_bytes);
    out.extend_from_slice(&(b.bin.len() as u32).to_le_bytes());
    out.extend_from_slice(&CHUNK_BIN.to_le_bytes());
    out.extend_from_slice(&b.bin);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::Texture;
    use super::*;
    use crate::mesh::{Material, TriangleMesh};

    fn triangle() -> TriangleMesh<f64> {
        let mut m = TriangleMesh::new(
            vec![[0.1, 0.2, -30.0], [10.0, 0.0, -31.5], [0.0, 7.25, -29.0]],
            vec![0, 1, 2],
            Material::new("mud", [0.4, 0.3, 0.2, 1.0]),
        );
        m.compute_area_weighted_normals(None);
        m
    }

    /// Splits a GLB container into its JSON document and BIN chunk.
    fn split(glb: &[u8]) -> (serde_json::Value, Vec<u8>) {
        let word = |o: usize| u32::from_le_bytes(glb[o..o + 4].try_into().unwrap()) as usize;
        assert_eq!(&glb[..4], b"glTF");
        assert_eq!(word(4), 2);
        assert_eq!(word(8), glb.len());
        let json_len = word(12);
        assert_eq!(&glb[16..20], b"JSON");
        let doc = serde_json::from_slice(&glb[20..20 + json_len]).unwrap();
        let b = 20 + json_len;
        assert_eq!(&glb[b + 4..b + 8], b"BIN\0");
        let bin = glb[b + 8..b + 8 + word(b)].to_vec();
        (doc, bin)
    }

    #[test]
    fn one_triangle_counts() {
        let mut scene = Scene::new("t");
        scene.push(triangle(), "mud", "mud");
        let glb = export_gltf(&scene).unwrap();
        assert_eq!(glb.len() % 4, 0);
        let (doc, bin) = split(&glb);
        let prim = &doc["meshes"][0]["primitives"][0];
        let pos = &doc["accessors"][prim["attributes"]["POSITION"].as_u64().unwrap() as usize];
        assert_eq!(pos["count"], 3);
        assert_eq!(pos["componentType"], 5126);
        let idx = &doc["accessors"][prim["indices"].as_u64().unwrap() as usize];
        assert_eq!(idx["count"], 3);
        assert_eq!(idx["componentType"], 5125);
        assert_eq!(doc["nodes"][0]["name"], "mud");
        assert_eq!(doc["buffers"][0]["byteLength"].as_u64().unwrap() as usize, bin.len());
    }

    #[test]
    fn textured_scene_parses() {
        let mut img = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut img, 1, 1);
            enc.set_color(png::ColorType::Rgba);
            enc.write_header().unwrap().write_image_data(&[9, 8, 7, 255]).unwrap();
        }
        let mut m = triangle();
        m.uvs = Some(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        m.material.texture = Some("sonar".into());
        let mut scene = Scene::new("t");
        scene.push(m, "terrain", "terrain");
        assert_eq!(export_gltf(&scene).unwrap_err(), ExportError::MissingTexture("sonar".into()));
        scene.textures.push(Texture { name: "sonar".into(), png: img.clone() });
        let glb = export_gltf(&scene).unwrap();
        let (doc, bin) = split(&glb);
        assert_eq!(doc["images"].as_array().unwrap().len(), 1);
        assert_eq!(doc["textures"].as_array().unwrap().len(), 1);
        let view = &doc["bufferViews"][doc["images"][0]["bufferView"].as_u64().unwrap() as usize];
        let off = view["byteOffset"].as_u64().unwrap_or(0) as usize;
        let len = view["byteLength"].as_u64().unwrap() as usize;
        assert_eq!(&bin[off..off + len], &img[..]);
    }

    #[test]
    fn empty_inputs() {
        assert_eq!(export_gltf(&Scene::<f64>::new("e")).unwrap_err(), ExportError::EmptyScene);
        let mut scene = Scene::new("e");
        scene.push(TriangleMesh::<f64>::default(), "x", "x");
        assert_eq!(export_gltf(&scene).unwrap_err(), ExportError::EmptyMesh("x".into()));
        let mut dup = Scene::new("d");
        dup.push(triangle(), "a", "g");
        dup.push(triangle(), "a", "g");
        assert_eq!(export_gltf(&dup).unwrap_err(), ExportError::DuplicateLabel("a".into()));
    }
}
