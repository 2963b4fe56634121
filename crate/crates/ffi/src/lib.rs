//! C ABI for the ihmbench toolkit.
//!
//! Every fallible function returns an [`IhmStatus`] and writes its result
//! through an out pointer. On failure, [`ihm_last_error_message`] describes
//! the most recent error on the calling thread.
//!
//! Meshes and geodesic solvers are opaque handles. Free them with
//! [`ihm_mesh_free`] and [`ihm_geodesic_solver_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ihmbench::mesh::load_mesh_scaled;
use ihmbench::pose::{orientation_error_pct_wxyz, position_error, position_error_pct};
use ihmbench::report::box_stats;
use ihmbench::{
    contact_region_error, ContactMetric, GeodesicMethod, GeodesicSolver, MeshFormat, Point3, Pose, TriangleMesh, Vec3,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IhmStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    /// The mesh file could not be read or parsed.
    MeshLoad = 3,
    /// A geometric query failed, e.g. no contact or disconnected vertices.
    Geometry = 4,
    Internal = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IhmContactMetric {
    Euclidean = 0,
    Geodesic = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IhmGeodesicMethod {
    EdgeDijkstra = 0,
    SteinerRefined = 1,
}

/// Box-plot summary. Outliers are returned separately.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IhmBoxStats {
    pub n: usize,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub outlier_count: usize,
}

/// Triangle mesh, lengths in meters.
pub struct IhmMesh(TriangleMesh);

pub struct IhmGeodesicSolver(GeodesicSolver);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Fail(IhmStatus, String);

impl Fail {
    fn null(name: &str) -> Self {
        Fail(IhmStatus::NullArgument, format!("{name} is null"))
    }

    fn invalid(msg: impl Into<String>) -> Self {
        Fail(IhmStatus::InvalidArgument, msg.into())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> IhmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            IhmStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            IhmStatus::Internal
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Fail> {
    unsafe { p.as_ref() }.ok_or_else(|| Fail::null(name))
}

unsafe fn write<T>(out: *mut T, value: T, name: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::null(name));
    }
    unsafe { out.write(value) };
    Ok(())
}

unsafe fn array<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::null(name));
    }
    Ok(unsafe { std::slice::from_raw_parts(p, len) })
}

unsafe fn vec3(p: *const f64, name: &str) -> Result<Vec3, Fail> {
    let a = unsafe { array(p, 3, name) }?;
    Ok(Vec3::new(a[0], a[1], a[2]))
}

unsafe fn quat(p: *const f64, name: &str) -> Result<[f64; 4], Fail> {
    let a = unsafe { array(p, 4, name) }?;
    Ok([a[0], a[1], a[2], a[3]])
}

fn geometry(e: impl std::fmt::Display) -> Fail {
    Fail(IhmStatus::Geometry, e.to_string())
}

/// Message for the last failed call on this thread, or null after a
/// successful call. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ihm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ihm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Loads an OBJ, PLY or STL file (format from the extension) and scales it
/// by `units` meters per file unit.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ihm_mesh_load(path: *const c_char, units: f64, out: *mut *mut IhmMesh) -> IhmStatus {
    guard(|| {
        if path.is_null() {
            return Err(Fail::null("path"));
        }
        if out.is_null() {
            return Err(Fail::null("out"));
        }
        if !(units > 0.0 && units.is_finite()) {
            return Err(Fail::invalid(format!("units must be positive, got {units}")));
        }
        let path = unsafe { CStr::from_ptr(path) }
            .to_str()
            .map_err(|_| Fail::invalid("path is not UTF-8"))?;
        let mesh = load_mesh_scaled(path, MeshFormat::Auto, units).map_err(|e| Fail(IhmStatus::MeshLoad, e.to_string()))?;
        unsafe { write(out, Box::into_raw(Box::new(IhmMesh(mesh))), "out") }
    })
}

/// Builds a mesh from `vertex_count` xyz triples and `face_count` index
/// triples (zero-based).
///
/// # Safety
/// `xyz` must hold `3 * vertex_count` doubles and `faces` `3 * face_count`
/// indices.
#[no_mangle]
pub unsafe extern "C" fn ihm_mesh_from_arrays(
    xyz: *const f64,
    vertex_count: usize,
    faces: *const u32,
    face_count: usize,
    out: *mut *mut IhmMesh,
) -> IhmStatus {
    guard(|| {
        let xyz = unsafe { array(xyz, 3 * vertex_count, "xyz") }?;
        let idx = unsafe { array(faces, 3 * face_count, "faces") }?;
        let vertices = xyz.chunks_exact(3).map(|c| Point3::new(c[0], c[1], c[2])).collect();
        let faces = idx
            .chunks_exact(3)
            .map(|c| [c[0] as usize, c[1] as usize, c[2] as usize])
            .collect();
        let mesh = TriangleMesh::new(vertices, faces).map_err(|e| Fail::invalid(e.to_string()))?;
        unsafe { write(out, Box::into_raw(Box::new(IhmMesh(mesh))), "out") }
    })
}

/// Copy of `mesh` placed by `pose` = [x, y, z, qw, qx, qy, qz].
///
/// # Safety
/// `pose` must point to 7 doubles.
#[no_mangle]
pub unsafe extern "C" fn ihm_mesh_transformed(
    mesh: *const IhmMesh,
    pose: *const f64,
    out: *mut *mut IhmMesh,
) -> IhmStatus {
    guard(|| {
        let mesh = unsafe { deref(mesh, "mesh") }?;
        let pose = Pose::from_slice(unsafe { array(pose, 7, "pose") }?).map_err(|e| Fail::invalid(e.to_string()))?;
        let placed = mesh.0.map_vertices(|p| pose.transform_point(p));
        unsafe { write(out, Box::into_raw(Box::new(IhmMesh(placed))), "out") }
    })
}

/// # Safety
/// `mesh` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn ihm_mesh_free(mesh: *mut IhmMesh) {
    if !mesh.is_null() {
        drop(unsafe { Box::from_raw(mesh) });
    }
}

/// Zero for a null handle.
///
/// # Safety
/// `mesh` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ihm_mesh_vertex_count(mesh: *const IhmMesh) -> usize {
    unsafe { mesh.as_ref() }.map_or(0, |m| m.0.vertex_count())
}

/// Zero for a null handle.
///
/// # Safety
/// `mesh` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ihm_mesh_face_count(mesh: *const IhmMesh) -> usize {
    unsafe { mesh.as_ref() }.map_or(0, |m| m.0.face_count())
}

/// Smallest distance between two distinct vertices, meters.
///
/// # Safety
/// `mesh` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ihm_mesh_g_min(mesh: *const IhmMesh, out: *mut f64) -> IhmStatus {
    guard(|| {
        let mesh = unsafe { deref(mesh, "mesh") }?;
        let g = mesh.0.g_min().map_err(geometry)?;
        unsafe { write(out, g, "out") }
    })
}

/// # Safety
/// `mesh` must be a live handle and `out` writable. The solver copies what it
/// needs; the mesh may be freed afterwards.
#[no_mangle]
pub unsafe extern "C" fn ihm_geodesic_solver_new(
    mesh: *const IhmMesh,
    method: IhmGeodesicMethod,
    out: *mut *mut IhmGeodesicSolver,
) -> IhmStatus {
    guard(|| {
        let mesh = unsafe { deref(mesh, "mesh") }?;
        let method = match method {
            IhmGeodesicMethod::EdgeDijkstra => GeodesicMethod::EdgeDijkstra,
            IhmGeodesicMethod::SteinerRefined => GeodesicMethod::SteinerRefined,
        };
        let solver = GeodesicSolver::new(&mesh.0, method);
        unsafe { write(out, Box::into_raw(Box::new(IhmGeodesicSolver(solver))), "out") }
    })
}

/// Surface distance between vertices `a` and `b`, meters.
///
/// # Safety
/// `solver` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ihm_geodesic_distance(
    solver: *const IhmGeodesicSolver,
    a: usize,
    b: usize,
    out: *mut f64,
) -> IhmStatus {
    guard(|| {
        let solver = unsafe { deref(solver, "solver") }?;
        let d = solver.0.distance(a, b).map_err(geometry)?;
        unsafe { write(out, d, "out") }
    })
}

/// # Safety
/// `solver` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn ihm_geodesic_solver_free(solver: *mut IhmGeodesicSolver) {
    if !solver.is_null() {
        drop(unsafe { Box::from_raw(solver) });
    }
}

/// Largest distance from a vertex touched by `links` to the closest vertex
/// under `region`, both projected onto `object`. Meters.
///
/// # Safety
/// `links` must hold `link_count` live mesh handles.
#[no_mangle]
pub unsafe extern "C" fn ihm_contact_region_error(
    object: *const IhmMesh,
    links: *const *const IhmMesh,
    link_count: usize,
    region: *const IhmMesh,
    metric: IhmContactMetric,
    tolerance: f64,
    out: *mut f64,
) -> IhmStatus {
    guard(|| {
        let object = unsafe { deref(object, "object") }?;
        let region = unsafe { deref(region, "region") }?;
        let handles = unsafe { array(links, link_count, "links") }?;
        let mut meshes = Vec::with_capacity(handles.len());
        for (i, &h) in handles.iter().enumerate() {
            meshes.push(unsafe { deref(h, &format!("links[{i}]")) }?.0.clone());
        }
        let metric = match metric {
            IhmContactMetric::Euclidean => ContactMetric::Euclidean,
            IhmContactMetric::Geodesic => ContactMetric::Geodesic,
        };
        let d = contact_region_error(&object.0, &meshes, &region.0, metric, tolerance).map_err(geometry)?;
        unsafe { write(out, d, "out") }
    })
}

/// Euclidean distance between desired and reached positions.
///
/// # Safety
/// `s_d` and `s_r` must point to 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn ihm_position_error(s_d: *const f64, s_r: *const f64, out: *mut f64) -> IhmStatus {
    guard(|| {
        let e = position_error(&unsafe { vec3(s_d, "s_d") }?, &unsafe { vec3(s_r, "s_r") }?);
        unsafe { write(out, e, "out") }
    })
}

/// Position error as a percentage of the initial-to-desired distance.
///
/// # Safety
/// `s_i`, `s_d` and `s_r` must point to 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn ihm_position_error_pct(
    s_i: *const f64,
    s_d: *const f64,
    s_r: *const f64,
    out: *mut f64,
) -> IhmStatus {
    guard(|| {
        let e = position_error_pct(
            &unsafe { vec3(s_i, "s_i") }?,
            &unsafe { vec3(s_d, "s_d") }?,
            &unsafe { vec3(s_r, "s_r") }?,
        )
        .map_err(|e| Fail::invalid(e.to_string()))?;
        unsafe { write(out, e, "out") }
    })
}

/// Orientation error percentage between two quaternions given as
/// [w, x, y, z]. Inputs are normalized.
///
/// # Safety
/// `q_d` and `q_r` must point to 4 doubles.
#[no_mangle]
pub unsafe extern "C" fn ihm_orientation_error_pct(q_d: *const f64, q_r: *const f64, out: *mut f64) -> IhmStatus {
    guard(|| {
        let e = orientation_error_pct_wxyz(unsafe { quat(q_d, "q_d") }?, unsafe { quat(q_r, "q_r") }?)
            .map_err(|e| Fail::invalid(e.to_string()))?;
        unsafe { write(out, e, "out") }
    })
}

/// Box-plot statistics of `n` samples. Up to `outlier_capacity` outliers are
/// copied to `outliers` in ascending order; `out->outlier_count` holds the
/// full count.
///
/// # Safety
/// `samples` must hold `n` doubles and `outliers` room for
/// `outlier_capacity` (may be null when that is 0).
#[no_mangle]
pub unsafe extern "C" fn ihm_box_stats(
    samples: *const f64,
    n: usize,
    out: *mut IhmBoxStats,
    outliers: *mut f64,
    outlier_capacity: usize,
) -> IhmStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail::null("out"));
        }
        let xs = unsafe { array(samples, n, "samples") }?;
        let b = box_stats(xs).map_err(|e| Fail::invalid(e.to_string()))?;
        if outlier_capacity > 0 {
            if outliers.is_null() {
                return Err(Fail::null("outliers"));
            }
            let k = outlier_capacity.min(b.outliers.len());
            unsafe { ptr::copy_nonoverlapping(b.outliers.as_ptr(), outliers, k) };
        }
        let stats = IhmBoxStats {
            n: b.n,
            median: b.median,
            q1: b.q1,
            q3: b.q3,
            whisker_low: b.whisker_low,
            whisker_high: b.whisker_high,
            outlier_count: b.outliers.len(),
        };
        unsafe { write(out, stats, "out") }
    })
}
