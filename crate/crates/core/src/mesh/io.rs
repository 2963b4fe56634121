//! OBJ, PLY and STL readers and writers.
//!
//! Polygons with more than three corners are fan-triangulated. STL carries no
//! connectivity, so STL vertices are welded at [`STL_WELD_TOLERANCE`].

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{distance_squared, MeshError, TriangleMesh, STL_WELD_TOLERANCE};
use crate::Point3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeshFormat {
    Obj,
    Ply,
    Stl,
    Auto,
}

impl FromStr for MeshFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "obj" => Ok(Self::Obj),
            "ply" => Ok(Self::Ply),
            "stl" => Ok(Self::Stl),
            "auto" => Ok(Self::Auto),
            other => Err(format!("unknown mesh format '{other}'")),
        }
    }
}

impl fmt::Display for MeshFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Obj => "obj",
            Self::Ply => "ply",
            Self::Stl => "stl",
            Self::Auto => "auto",
        })
    }
}

impl MeshFormat {
    fn from_extension(path: &Path) -> Option<Self> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "obj" => Some(Self::Obj),
            "ply" => Some(Self::Ply),
            "stl" => Some(Self::Stl),
            _ => None,
        }
    }

    fn sniff(bytes: &[u8]) -> Self {
        if bytes.starts_with(b"ply") {
            Self::Ply
        } else if binary_stl_count(bytes).is_some() || trim_start(bytes).starts_with(b"solid") {
            Self::Stl
        } else {
            Self::Obj
        }
    }
}

fn trim_start(bytes: &[u8]) -> &[u8] {
    let n = bytes.iter().take_while(|b| b.is_ascii_whitespace()).count();
    &bytes[n..]
}

/// Loads a mesh. Coordinates are taken as meters.
pub fn load_mesh(path: impl AsRef<Path>, format: MeshFormat) -> Result<TriangleMesh, MeshError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| MeshError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_mesh(&bytes, format, path)
}

/// Loads a mesh and multiplies every coordinate by `scale` (file units to meters).
pub fn load_mesh_scaled(
    path: impl AsRef<Path>,
    format: MeshFormat,
    scale: f64,
) -> Result<TriangleMesh, MeshError> {
    let mesh = load_mesh(path, format)?;
    Ok(if scale == 1.0 { mesh } else { mesh.scaled(scale) })
}

/// Parses mesh bytes; `path` is used for format detection and error messages only.
pub fn parse_mesh(bytes: &[u8], format: MeshFormat, path: &Path) -> Result<TriangleMesh, MeshError> {
    let format = match format {
        MeshFormat::Auto => MeshFormat::from_extension(path).unwrap_or_else(|| MeshFormat::sniff(bytes)),
        f => f,
    };
    let (vertices, faces) = match format {
        MeshFormat::Obj => parse_obj(bytes, path)?,
        MeshFormat::Ply => parse_ply(bytes, path)?,
        MeshFormat::Stl => parse_stl(bytes, path)?,
        MeshFormat::Auto => unreachable!(),
    };
    TriangleMesh::new(vertices, faces)
}

/// Writes a mesh. OBJ and PLY (binary, double precision) preserve coordinates
/// exactly; STL stores single precision.
pub fn save_mesh(mesh: &TriangleMesh, path: impl AsRef<Path>, format: MeshFormat) -> Result<(), MeshError> {
    let path = path.as_ref();
    let format = match format {
        MeshFormat::Auto => MeshFormat::from_extension(path).unwrap_or(MeshFormat::Obj),
        f => f,
    };
    let bytes = match format {
        MeshFormat::Obj => write_obj(mesh),
        MeshFormat::Ply => write_ply(mesh),
        MeshFormat::Stl => write_stl(mesh),
        MeshFormat::Auto => unreachable!(),
    };
    fs::write(path, bytes).map_err(|source| MeshError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_err(path: &Path, line: Option<usize>, message: impl Into<String>) -> MeshError {
    MeshError::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

type Parsed = (Vec<Point3>, Vec<[usize; 3]>);

fn fan(polygon: &[usize], faces: &mut Vec<[usize; 3]>) {
    for k in 1..polygon.len() - 1 {
        faces.push([polygon[0], polygon[k], polygon[k + 1]]);
    }
}

fn check_polygon(
    polygon: &[usize],
    vertex_count: usize,
    first_index: usize,
    path: &Path,
    line: Option<usize>,
) -> Result<(), MeshError> {
    if polygon.len() < 3 {
        return Err(parse_err(path, line, format!("face has {} vertices", polygon.len())));
    }
    for (k, &v) in polygon.iter().enumerate() {
        if v >= vertex_count {
            return Err(parse_err(
                path,
                line,
                format!("face index {} out of range ({vertex_count} vertices)", v + first_index),
            ));
        }
        if polygon[..k].contains(&v) {
            return Err(parse_err(path, line, format!("face repeats vertex {}", v + first_index)));
        }
    }
    Ok(())
}

// ---- OBJ ----

fn parse_obj(bytes: &[u8], path: &Path) -> Result<Parsed, MeshError> {
    let text = String::from_utf8_lossy(bytes);
    let mut vertices = Vec::new();
    let mut polygons: Vec<(usize, Vec<usize>)> = Vec::new();

    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.split('#').next().unwrap_or("");
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let coords: Vec<&str> = tokens.collect();
                if coords.len() < 3 {
                    return Err(parse_err(path, Some(line_no), "vertex needs three coordinates"));
                }
                let mut p = [0.0; 3];
                for (slot, tok) in p.iter_mut().zip(&coords) {
                    *slot = tok.parse::<f64>().map_err(|_| {
                        parse_err(path, Some(line_no), format!("invalid coordinate '{tok}'"))
                    })?;
                }
                vertices.push(Point3::new(p[0], p[1], p[2]));
            }
            Some("f") => {
                let mut polygon = Vec::new();
                for tok in tokens {
                    let index_str = tok.split('/').next().unwrap_or("");
                    let index: i64 = index_str.parse().map_err(|_| {
                        parse_err(path, Some(line_no), format!("invalid face index '{tok}'"))
                    })?;
                    let resolved = match index {
                        0 => return Err(parse_err(path, Some(line_no), "face index 0")),
                        i if i > 0 => (i - 1) as usize,
                        i => {
                            let back = i.unsigned_abs() as usize;
                            if back > vertices.len() {
                                return Err(parse_err(
                                    path,
                                    Some(line_no),
                                    format!("relative face index {i} before start of file"),
                                ));
                            }
                            vertices.len() - back
                        }
                    };
                    polygon.push(resolved);
                }
                polygons.push((line_no, polygon));
            }
            _ => {}
        }
    }

    let mut faces = Vec::new();
    for (line_no, polygon) in &polygons {
        check_polygon(polygon, vertices.len(), 1, path, Some(*line_no))?;
        fan(polygon, &mut faces);
    }
    Ok((vertices, faces))
}

fn write_obj(mesh: &TriangleMesh) -> Vec<u8> {
    let mut out = String::new();
    for v in mesh.vertices() {
        out.push_str(&format!("v {} {} {}\n", v.x, v.y, v.z));
    }
    for f in mesh.faces() {
        out.push_str(&format!("f {} {} {}\n", f[0] + 1, f[1] + 1, f[2] + 1));
    }
    out.into_bytes()
}

// ---- PLY ----

#[derive(Debug, Clone, Copy, PartialEq)]
enum Scalar {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl Scalar {
    fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "char" | "int8" => Self::I8,
            "uchar" | "uint8" => Self::U8,
            "short" | "int16" => Self::I16,
            "ushort" | "uint16" => Self::U16,
            "int" | "int32" => Self::I32,
            "uint" | "uint32" => Self::U32,
            "float" | "float32" => Self::F32,
            "double" | "float64" => Self::F64,
            _ => return None,
        })
    }

    fn size(self) -> usize {
        match self {
            Self::I8 | Self::U8 => 1,
            Self::I16 | Self::U16 => 2,
            Self::I32 | Self::U32 | Self::F32 => 4,
            Self::F64 => 8,
        }
    }
}

#[derive(Debug)]
enum Property {
    Scalar { name: String, ty: Scalar },
    List { name: String, count: Scalar, item: Scalar },
}

impl Property {
    fn name(&self) -> &str {
        match self {
            Property::Scalar { name, .. } | Property::List { name, .. } => name,
        }
    }
}

#[derive(Debug)]
struct Element {
    name: String,
    count: usize,
    properties: Vec<Property>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum PlyEncoding {
    Ascii,
    BinaryLe,
    BinaryBe,
}

/// One decoded property value: scalars as a single-entry list.
type Row = Vec<Vec<f64>>;

struct BinaryReader<'a> {
    bytes: &'a [u8],
    pos: usize,
    big_endian: bool,
}

impl BinaryReader<'_> {
    fn read(&mut self, ty: Scalar) -> Option<f64> {
        let n = ty.size();
        let chunk = self.bytes.get(self.pos..self.pos + n)?;
        self.pos += n;
        let mut buf = [0u8; 8];
        buf[..n].copy_from_slice(chunk);
        if self.big_endian {
            buf[..n].reverse();
        }
        Some(match ty {
            Scalar::I8 => buf[0] as i8 as f64,
            Scalar::U8 => buf[0] as f64,
            Scalar::I16 => i16::from_le_bytes([buf[0], buf[1]]) as f64,
            Scalar::U16 => u16::from_le_bytes([buf[0], buf[1]]) as f64,
            Scalar::I32 => i32::from_le_bytes([buf[0], buf[1], buf[2], buf[3]]) as f64,
            Scalar::U32 => u32::from_le_bytes([buf[0], buf[1], buf[2], buf[3]]) as f64,
            Scalar::F32 => f32::from_le_bytes([buf[0], buf[1], buf[2], buf[3]]) as f64,
            Scalar::F64 => f64::from_le_bytes(buf),
        })
    }
}

fn parse_ply(bytes: &[u8], path: &Path) -> Result<Parsed, MeshError> {
    let mut pos = 0;
    let mut line_no = 0;
    let mut encoding = None;
    let mut elements: Vec<Element> = Vec::new();

    loop {
        let rest = &bytes[pos..];
        let Some(nl) = rest.iter().position(|&b| b == b'\n') else {
            return Err(parse_err(path, Some(line_no + 1), "header has no end_header line"));
        };
        line_no += 1;
        let line = String::from_utf8_lossy(&rest[..nl]);
        let line = line.trim();
        pos += nl + 1;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let here = Some(line_no);
        match tokens.first().copied() {
            _ if line_no == 1 => {
                if line != "ply" {
                    return Err(parse_err(path, here, "missing 'ply' magic"));
                }
            }
            Some("format") => {
                encoding = Some(match tokens.get(1).copied() {
                    Some("ascii") => PlyEncoding::Ascii,
                    Some("binary_little_endian") => PlyEncoding::BinaryLe,
                    Some("binary_big_endian") => PlyEncoding::BinaryBe,
                    other => {
                        return Err(parse_err(path, here, format!("unknown format {other:?}")))
                    }
                });
            }
            Some("element") => {
                let (Some(name), Some(count)) = (tokens.get(1), tokens.get(2)) else {
                    return Err(parse_err(path, here, "malformed element line"));
                };
                let count = count
                    .parse()
                    .map_err(|_| parse_err(path, here, format!("invalid element count '{count}'")))?;
                elements.push(Element {
                    name: name.to_string(),
                    count,
                    properties: Vec::new(),
                });
            }
            Some("property") => {
                let Some(element) = elements.last_mut() else {
                    return Err(parse_err(path, here, "property before any element"));
                };
                let prop = if tokens.get(1) == Some(&"list") {
                    match (
                        tokens.get(2).and_then(|t| Scalar::parse(t)),
                        tokens.get(3).and_then(|t| Scalar::parse(t)),
                        tokens.get(4),
                    ) {
                        (Some(count), Some(item), Some(name)) => Property::List {
                            name: name.to_string(),
                            count,
                            item,
                        },
                        _ => return Err(parse_err(path, here, "malformed list property")),
                    }
                } else {
                    match (tokens.get(1).and_then(|t| Scalar::parse(t)), tokens.get(2)) {
                        (Some(ty), Some(name)) => Property::Scalar {
                            name: name.to_string(),
                            ty,
                        },
                        _ => return Err(parse_err(path, here, "malformed property")),
                    }
                };
                element.properties.push(prop);
            }
            Some("end_header") => break,
            Some("comment") | Some("obj_info") | None => {}
            Some(other) => {
                return Err(parse_err(path, here, format!("unexpected header keyword '{other}'")))
            }
        }
    }

    let encoding = encoding.ok_or_else(|| parse_err(path, None, "header has no format line"))?;
    let body = &bytes[pos..];

    let mut vertices = Vec::new();
    let mut polygons: Vec<(Option<usize>, Vec<usize>)> = Vec::new();

    let mut ascii_lines = match encoding {
        PlyEncoding::Ascii => Some(
            String::from_utf8_lossy(body)
                .lines()
                .map(str::to_owned)
                .enumerate()
                .filter(|(_, l)| !l.trim().is_empty())
                .collect::<Vec<_>>()
                .into_iter(),
        ),
        _ => None,
    };
    let mut reader = BinaryReader {
        bytes: body,
        pos: 0,
        big_endian: encoding == PlyEncoding::BinaryBe,
    };

    for element in &elements {
        let xyz: Option<[usize; 3]> = if element.name == "vertex" {
            let find = |n: &str| element.properties.iter().position(|p| p.name() == n);
            match (find("x"), find("y"), find("z")) {
                (Some(x), Some(y), Some(z)) => Some([x, y, z]),
                _ => return Err(parse_err(path, None, "vertex element lacks x/y/z")),
            }
        } else {
            None
        };
        let face_prop = (element.name == "face")
            .then(|| {
                element.properties.iter().position(|p| {
                    matches!(p, Property::List { name, .. } if name == "vertex_indices" || name == "vertex_index")
                })
            })
            .flatten();

        for _ in 0..element.count {
            let (row, line): (Row, Option<usize>) = match &mut ascii_lines {
                Some(lines) => {
                    let Some((idx, text)) = lines.next() else {
                        return Err(parse_err(path, None, format!("unexpected end of {} data", element.name)));
                    };
                    let line = Some(line_no + idx + 1);
                    (read_ascii_row(&text, element, path, line)?, line)
                }
                None => (read_binary_row(&mut reader, element, path)?, None),
            };
            if let Some([x, y, z]) = xyz {
                vertices.push(Point3::new(row[x][0], row[y][0], row[z][0]));
            }
            if let Some(fp) = face_prop {
                let mut polygon = Vec::with_capacity(row[fp].len());
                for &v in &row[fp] {
                    if v < 0.0 {
                        return Err(parse_err(path, line, format!("negative face index {v}")));
                    }
                    polygon.push(v as usize);
                }
                polygons.push((line, polygon));
            }
        }
    }

    let mut faces = Vec::new();
    for (line, polygon) in &polygons {
        check_polygon(polygon, vertices.len(), 0, path, *line)?;
        fan(polygon, &mut faces);
    }
    Ok((vertices, faces))
}

fn read_ascii_row(text: &str, element: &Element, path: &Path, line: Option<usize>) -> Result<Row, MeshError> {
    let mut tokens = text.split_whitespace();
    let mut next = || -> Result<f64, MeshError> {
        let tok = tokens
            .next()
            .ok_or_else(|| parse_err(path, line, format!("too few values for {}", element.name)))?;
        tok.parse::<f64>()
            .map_err(|_| parse_err(path, line, format!("invalid number '{tok}'")))
    };
    let mut row = Vec::with_capacity(element.properties.len());
    for prop in &element.properties {
        match prop {
            Property::Scalar { .. } => row.push(vec![next()?]),
            Property::List { .. } => {
                let n = next()?;
                if n < 0.0 || n.fract() != 0.0 {
                    return Err(parse_err(path, line, format!("invalid list length {n}")));
                }
                let items = (0..n as usize).map(|_| next()).collect::<Result<Vec<_>, _>>()?;
                row.push(items);
            }
        }
    }
    Ok(row)
}

fn read_binary_row(reader: &mut BinaryReader<'_>, element: &Element, path: &Path) -> Result<Row, MeshError> {
    let eof = || parse_err(path, None, format!("truncated binary {} data", element.name));
    let mut row = Vec::with_capacity(element.properties.len());
    for prop in &element.properties {
        match prop {
            Property::Scalar { ty, .. } => row.push(vec![reader.read(*ty).ok_or_else(eof)?]),
            Property::List { count, item, .. } => {
                let n = reader.read(*count).ok_or_else(eof)?;
                if n < 0.0 {
                    return Err(parse_err(path, None, format!("invalid list length {n}")));
                }
                let items = (0..n as usize)
                    .map(|_| reader.read(*item).ok_or_else(eof))
                    .collect::<Result<Vec<_>, _>>()?;
                row.push(items);
            }
        }
    }
    Ok(row)
}

fn write_ply(mesh: &TriangleMesh) -> Vec<u8> {
    let mut out = Vec::new();
    let header = format!(
        "ply\nformat binary_little_endian 1.0\nelement vertex {}\nproperty double x\nproperty double y\nproperty double z\nelement face {}\nproperty list uchar int vertex_indices\nend_header\n",
        mesh.vertex_count(),
        mesh.face_count()
    );
    out.extend_from_slice(header.as_bytes());
    for v in mesh.vertices() {
        for c in [v.x, v.y, v.z] {
            out.extend_from_slice(&c.to_le_bytes());
        }
    }
    for f in mesh.faces() {
        out.push(3);
        for &i in f {
            out.extend_from_slice(&(i as i32).to_le_bytes());
        }
    }
    out
}

// ---- STL ----

fn binary_stl_count(bytes: &[u8]) -> Option<usize> {
    let count = u32::from_le_bytes(bytes.get(80..84)?.try_into().ok()?) as usize;
    (bytes.len() == 84 + 50 * count).then_some(count)
}

fn parse_stl(bytes: &[u8], path: &Path) -> Result<Parsed, MeshError> {
    let soup = if let Some(count) = binary_stl_count(bytes) {
        let mut soup = Vec::with_capacity(count);
        for t in 0..count {
            let base = 84 + 50 * t + 12;
            let mut tri = [Point3::origin(); 3];
            for (k, corner) in tri.iter_mut().enumerate() {
                let off = base + 12 * k;
                let c = |i: usize| {
                    let s = off + 4 * i;
                    f32::from_le_bytes([bytes[s], bytes[s + 1], bytes[s + 2], bytes[s + 3]]) as f64
                };
                *corner = Point3::new(c(0), c(1), c(2));
            }
            soup.push(tri);
        }
        soup
    } else if trim_start(bytes).starts_with(b"solid") {
        parse_ascii_stl(bytes, path)?
    } else {
        return Err(parse_err(path, None, "neither binary nor ASCII STL"));
    };
    Ok(weld(&soup, STL_WELD_TOLERANCE))
}

fn parse_ascii_stl(bytes: &[u8], path: &Path) -> Result<Vec<[Point3; 3]>, MeshError> {
    let text = String::from_utf8_lossy(bytes);
    let mut soup = Vec::new();
    let mut corners: Vec<Point3> = Vec::new();
    let mut in_facet = false;
    for (n, raw) in text.lines().enumerate() {
        let here = Some(n + 1);
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        match tokens.first().copied() {
            Some("facet") => {
                if in_facet {
                    return Err(parse_err(path, here, "nested facet"));
                }
                in_facet = true;
                corners.clear();
            }
            Some("vertex") => {
                if !in_facet {
                    return Err(parse_err(path, here, "vertex outside facet"));
                }
                if tokens.len() < 4 {
                    return Err(parse_err(path, here, "vertex needs three coordinates"));
                }
                let mut p = [0.0; 3];
                for (slot, tok) in p.iter_mut().zip(&tokens[1..4]) {
                    *slot = tok
                        .parse::<f64>()
                        .map_err(|_| parse_err(path, here, format!("invalid coordinate '{tok}'")))?;
                }
                corners.push(Point3::new(p[0], p[1], p[2]));
            }
            Some("endfacet") => {
                if corners.len() < 3 {
                    return Err(parse_err(path, here, format!("facet has {} vertices", corners.len())));
                }
                for k in 1..corners.len() - 1 {
                    soup.push([corners[0], corners[k], corners[k + 1]]);
                }
                in_facet = false;
            }
            _ => {}
        }
    }
    if in_facet {
        return Err(parse_err(path, None, "unterminated facet"));
    }
    Ok(soup)
}

/// Merges corners closer than `tolerance`; faces that collapse are dropped.
fn weld(soup: &[[Point3; 3]], tolerance: f64) -> Parsed {
    let tol2 = tolerance * tolerance;
    let cell = |p: &Point3| -> [i64; 3] {
        [
            (p.x / tolerance).floor() as i64,
            (p.y / tolerance).floor() as i64,
            (p.z / tolerance).floor() as i64,
        ]
    };
    let mut grid: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
    let mut vertices: Vec<Point3> = Vec::new();
    let mut faces = Vec::with_capacity(soup.len());

    for tri in soup {
        let mut face = [0usize; 3];
        for (slot, p) in face.iter_mut().zip(tri) {
            let c = cell(p);
            let mut found: Option<usize> = None;
            for dx in -1..=1 {
                for dy in -1..=1 {
                    for dz in -1..=1 {
                        if let Some(list) = grid.get(&[c[0] + dx, c[1] + dy, c[2] + dz]) {
                            for &i in list {
                                if distance_squared(&vertices[i], p) < tol2
                                    && found.is_none_or(|f| i < f)
                                {
                                    found = Some(i);
                                }
                            }
                        }
                    }
                }
            }
            *slot = found.unwrap_or_else(|| {
                vertices.push(*p);
                let i = vertices.len() - 1;
                grid.entry(c).or_default().push(i);
                i
            });
        }
        if face[0] != face[1] && face[1] != face[2] && face[0] != face[2] {
            faces.push(face);
        }
    }
    (vertices, faces)
}

fn write_stl(mesh: &TriangleMesh) -> Vec<u8> {
    let mut out = vec![0u8; 80];
    out[..17].copy_from_slice(b"ihmbench mesh    ");
    out.extend_from_slice(&(mesh.face_count() as u32).to_le_bytes());
    for f in 0..mesh.face_count() {
        let [a, b, c] = mesh.triangle(f);
        let n = (b - a).cross(&(c - a));
        let n = if n.norm() > 0.0 { n.normalize() } else { n };
        for x in [n.x, n.y, n.z] {
            out.extend_from_slice(&(x as f32).to_le_bytes());
        }
        for p in [a, b, c] {
            for x in [p.x, p.y, p.z] {
                out.extend_from_slice(&(x as f32).to_le_bytes());
            }
        }
        out.extend_from_slice(&0u16.to_le_bytes());
    }
    out
}

/// Path of `reference` resolved against the directory containing `base_file`.
pub(crate) fn resolve_relative(base_file: &Path, reference: &Path) -> PathBuf {
    if reference.is_absolute() {
        reference.to_path_buf()
    } else {
        base_file
            .parent()
            .map(|d| d.join(reference))
            .unwrap_or_else(|| reference.to_path_buf())
    }
}
