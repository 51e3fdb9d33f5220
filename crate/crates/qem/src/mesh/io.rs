//! Mesh file import/export.
//!
//! Native format `qem-ascii`:
//!
//! ```text
//! qemmesh 1
//! <node_count> <tet_count>
//! x y z              (one node per line, meters, full double precision)
//! ...
//! i0 i1 i2 i3 region (one tet per line, 0-based node indices)
//! ```
//!
//! `#` starts a comment line. Materials are not stored in the file; imported
//! meshes get vacuum placeholders per region, which callers rebind via
//! [`TetMesh::with_materials`].
//!
//! MSH 2.2 ASCII import reads nodes and 4-node tets only; the first element
//! tag (physical group) maps to the region id.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::Vec3;

use super::{Material, MeshError, TetMesh};

/// Supported mesh file formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    QemAscii,
    Msh22,
}

fn io_err(path: &Path, source: std::io::Error) -> MeshError {
    MeshError::Io { path: path.display().to_string(), source }
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> MeshError {
    MeshError::Parse { path: path.display().to_string(), line, message: message.into() }
}

/// Load and validate a mesh. All regions referenced by the file receive a
/// vacuum placeholder material.
pub fn load_mesh(path: impl AsRef<Path>, format: MeshFormat) -> Result<TetMesh, MeshError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    match format {
        MeshFormat::QemAscii => parse_qem_ascii(path, &text),
        MeshFormat::Msh22 => parse_msh22(path, &text),
    }
}

/// Write a mesh in qem-ascii. Node coordinates round-trip bit-exactly.
pub fn save_mesh(path: impl AsRef<Path>, mesh: &TetMesh) -> Result<(), MeshError> {
    let path = path.as_ref();
    let mut out = String::new();
    out.push_str("qemmesh 1\n");
    let _ = writeln!(out, "{} {}", mesh.node_count(), mesh.tet_count());
    for p in mesh.nodes() {
        let _ = writeln!(out, "{:e} {:e} {:e}", p.x, p.y, p.z);
    }
    for (tet, region) in mesh.tets().iter().zip(mesh.regions()) {
        let _ = writeln!(out, "{} {} {} {} {}", tet[0], tet[1], tet[2], tet[3], region);
    }
    std::fs::write(path, out).map_err(|e| io_err(path, e))
}

fn parse_qem_ascii(path: &Path, text: &str) -> Result<TetMesh, MeshError> {
    // (line_number, content) with comments and blank lines dropped
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (ln, header) = lines.next().ok_or_else(|| parse_err(path, 1, "empty file"))?;
    if header != "qemmesh 1" {
        return Err(parse_err(path, ln, format!("expected `qemmesh 1` header, got `{header}`")));
    }
    let (ln, counts) = lines.next().ok_or_else(|| parse_err(path, ln, "missing counts line"))?;
    let mut it = counts.split_whitespace();
    let node_count: usize = it
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| parse_err(path, ln, "bad node count"))?;
    let tet_count: usize = it
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| parse_err(path, ln, "bad tet count"))?;

    let mut nodes = Vec::with_capacity(node_count);
    for _ in 0..node_count {
        let (ln, line) =
            lines.next().ok_or_else(|| parse_err(path, 0, "unexpected end of node list"))?;
        let mut it = line.split_whitespace();
        let mut coord = [0.0f64; 3];
        for c in &mut coord {
            *c = it
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| parse_err(path, ln, "bad node coordinate"))?;
        }
        if it.next().is_some() {
            return Err(parse_err(path, ln, "trailing fields on node line"));
        }
        nodes.push(Vec3::new(coord[0], coord[1], coord[2]));
    }

    let mut tets = Vec::with_capacity(tet_count);
    let mut regions = Vec::with_capacity(tet_count);
    for _ in 0..tet_count {
        let (ln, line) =
            lines.next().ok_or_else(|| parse_err(path, 0, "unexpected end of tet list"))?;
        let mut it = line.split_whitespace();
        let mut idx = [0usize; 4];
        for v in &mut idx {
            *v = it
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| parse_err(path, ln, "bad tet node index"))?;
        }
        let region: u32 = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_err(path, ln, "bad region id"))?;
        if it.next().is_some() {
            return Err(parse_err(path, ln, "trailing fields on tet line"));
        }
        tets.push(idx);
        regions.push(region);
    }
    if let Some((ln, _)) = lines.next() {
        return Err(parse_err(path, ln, "trailing content after tet list"));
    }
    finish_with_placeholders(nodes, tets, regions)
}

fn parse_msh22(path: &Path, text: &str) -> Result<TetMesh, MeshError> {
    let lines: Vec<(usize, &str)> =
        text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).collect();
    let mut pos = 0usize;
    let find_section = |pos: &mut usize, name: &str| -> Option<usize> {
        while *pos < lines.len() {
            let (_, l) = lines[*pos];
            *pos += 1;
            if l == name {
                return Some(*pos);
            }
        }
        None
    };

    if find_section(&mut pos, "$MeshFormat").is_none() {
        return Err(parse_err(path, 1, "missing $MeshFormat section"));
    }
    let (ln, fmt) = lines[pos];
    if !fmt.starts_with("2.2") {
        return Err(parse_err(path, ln, format!("unsupported MSH version `{fmt}` (want 2.2 ASCII)")));
    }

    pos = 0;
    let start = find_section(&mut pos, "$Nodes")
        .ok_or_else(|| parse_err(path, 1, "missing $Nodes section"))?;
    let (ln, count_line) = lines[start];
    let n_nodes: usize =
        count_line.parse().map_err(|_| parse_err(path, ln, "bad node count"))?;
    let mut nodes = Vec::with_capacity(n_nodes);
    let mut id_map: BTreeMap<u64, usize> = BTreeMap::new();
    for row in 0..n_nodes {
        let (ln, l) = lines[start + 1 + row];
        let mut it = l.split_whitespace();
        let id: u64 = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_err(path, ln, "bad node id"))?;
        let mut coord = [0.0f64; 3];
        for c in &mut coord {
            *c = it
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| parse_err(path, ln, "bad node coordinate"))?;
        }
        id_map.insert(id, nodes.len());
        nodes.push(Vec3::new(coord[0], coord[1], coord[2]));
    }

    pos = 0;
    let start = find_section(&mut pos, "$Elements")
        .ok_or_else(|| parse_err(path, 1, "missing $Elements section"))?;
    let (ln, count_line) = lines[start];
    let n_elems: usize =
        count_line.parse().map_err(|_| parse_err(path, ln, "bad element count"))?;
    let mut tets = Vec::new();
    let mut regions = Vec::new();
    for row in 0..n_elems {
        let (ln, l) = lines[start + 1 + row];
        let fields: Vec<&str> = l.split_whitespace().collect();
        if fields.len() < 3 {
            return Err(parse_err(path, ln, "short element line"));
        }
        let etype: u32 =
            fields[1].parse().map_err(|_| parse_err(path, ln, "bad element type"))?;
        if etype != 4 {
            continue; // only 4-node tets
        }
        let ntags: usize =
            fields[2].parse().map_err(|_| parse_err(path, ln, "bad tag count"))?;
        let region: u32 = if ntags > 0 {
            fields
                .get(3)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| parse_err(path, ln, "bad physical tag"))?
        } else {
            0
        };
        let node_fields = &fields[3 + ntags..];
        if node_fields.len() != 4 {
            return Err(parse_err(path, ln, "tet element must have 4 nodes"));
        }
        let mut tet = [0usize; 4];
        for (slot, s) in tet.iter_mut().zip(node_fields) {
            let id: u64 = s.parse().map_err(|_| parse_err(path, ln, "bad element node id"))?;
            *slot = *id_map
                .get(&id)
                .ok_or_else(|| parse_err(path, ln, format!("element references unknown node {id}")))?;
        }
        tets.push(tet);
        regions.push(region);
    }
    finish_with_placeholders(nodes, tets, regions)
}

fn finish_with_placeholders(
    nodes: Vec<Vec3>,
    tets: Vec<[usize; 4]>,
    regions: Vec<u32>,
) -> Result<TetMesh, MeshError> {
    let mut materials = BTreeMap::new();
    for &r in &regions {
        materials.entry(r).or_insert_with(Material::vacuum);
    }
    TetMesh::new(nodes, tets, regions, materials)
}
