//! Level III fixtures whose metrics evaluate to the DMG results for four
//! YCB objects.
//!
//! Each object is a strip of triangles extruded along y. The desired region
//! covers the first three columns. A single fin-shaped link touches the
//! strip at one vertex on the middle row, `G_euc` beyond the region edge.
//! A raised column halfway between them makes the surface path `G_geo` long.
//! The last column sits `G_min` from its neighbour.

use std::io;
use std::path::Path;

use ihmbench::mesh::save_mesh;
use ihmbench::pose::Pose;
use ihmbench::protocol::{Level, LinkPlacement, MeshRef, Outcome, TaskDefinition, TrialRecord};
use ihmbench::{MeshFormat, Point3, TriangleMesh, Vec3};
use nalgebra::{Unit, UnitQuaternion};

#[derive(Debug, Clone, Copy)]
pub struct Column {
    pub dir: &'static str,
    pub object: &'static str,
    pub err_pos_cm: f64,
    pub err_pos_pct: f64,
    pub err_or_pct: f64,
    pub g_euc_cm: f64,
    pub g_geo_cm: f64,
    pub g_min_cm: f64,
    pub dmg_time_s: f64,
    pub plan_time_s: f64,
    /// File units of the object and region meshes, in meters.
    pub units: f64,
}

pub const COLUMNS: [Column; 4] = [
    Column {
        dir: "gelatin_box",
        object: "gelatin box",
        err_pos_cm: 0.505,
        err_pos_pct: 9.9,
        err_or_pct: 0.016,
        g_euc_cm: 1.125,
        g_geo_cm: 1.127,
        g_min_cm: 0.013,
        dmg_time_s: 10.312,
        plan_time_s: 0.023,
        units: 1.0,
    },
    Column {
        dir: "cracker_box",
        object: "cracker box",
        err_pos_cm: 0.267,
        err_pos_pct: 2.7,
        err_or_pct: 0.044,
        g_euc_cm: 0.862,
        g_geo_cm: 0.862,
        g_min_cm: 0.057,
        dmg_time_s: 15.467,
        plan_time_s: 0.004,
        units: 1.0,
    },
    Column {
        dir: "spatula",
        object: "spatula",
        err_pos_cm: 0.513,
        err_pos_pct: 8.8,
        err_or_pct: 0.023,
        g_euc_cm: 0.746,
        g_geo_cm: 1.505,
        g_min_cm: 0.034,
        dmg_time_s: 13.406,
        plan_time_s: 6.7e-05,
        units: 1.0,
    },
    Column {
        dir: "potted_meat_can",
        object: "potted meat can",
        err_pos_cm: 0.610,
        err_pos_pct: 11.0,
        err_or_pct: 0.049,
        g_euc_cm: 0.663,
        g_geo_cm: 0.663,
        g_min_cm: 0.004,
        dmg_time_s: 18.295,
        plan_time_s: 0.002,
        units: 0.001,
    },
];

pub const TRIALS: u32 = 5;
const ROWS: usize = 7;
const ROW_STEP: f64 = 0.005;
const CONTACT_ROW: usize = 3;
const REGION_COLUMNS: usize = 3;

/// Profile `(x, z)` of the strip, meters.
fn profile(c: &Column) -> Vec<(f64, f64)> {
    let g = c.g_euc_cm / 100.0;
    let path = c.g_geo_cm / 100.0;
    let mut p = vec![(0.0, 0.0), (0.005, 0.0), (0.010, 0.0)];
    let edge = 0.010;
    if path > g {
        let h = ((path / 2.0).powi(2) - (g / 2.0).powi(2)).sqrt();
        p.push((edge + g / 2.0, h));
    }
    let contact = edge + g;
    p.push((contact, 0.0));
    p.push((contact + 0.006, 0.0));
    p.push((contact + 0.012, 0.0));
    p.push((contact + 0.012 + c.g_min_cm / 100.0, 0.0));
    p
}

fn strip(profile: &[(f64, f64)], scale: f64) -> TriangleMesh {
    let nx = profile.len();
    let mut v = Vec::new();
    for j in 0..ROWS {
        for &(x, z) in profile {
            v.push(Point3::new(x / scale, j as f64 * ROW_STEP / scale, z / scale));
        }
    }
    let mut f = Vec::new();
    for j in 0..ROWS - 1 {
        for i in 0..nx - 1 {
            let a = j * nx + i;
            f.push([a, a + 1, a + nx + 1]);
            f.push([a, a + nx + 1, a + nx]);
        }
    }
    TriangleMesh::new(v, f).expect("valid strip")
}

fn contact_point(c: &Column) -> Point3 {
    let x = profile(c)[REGION_COLUMNS - 1].0 + c.g_euc_cm / 100.0;
    Point3::new(x, CONTACT_ROW as f64 * ROW_STEP, 0.0)
}

fn fin() -> TriangleMesh {
    TriangleMesh::new(
        vec![
            Point3::origin(),
            Point3::new(-0.002, 0.0, 0.05),
            Point3::new(0.002, 0.0, 0.05),
        ],
        vec![[0, 1, 2]],
    )
    .expect("valid fin")
}

fn unit(x: f64, y: f64, z: f64) -> Vec3 {
    Vec3::new(x, y, z).normalize()
}

/// `(H_i, H_d, H_r)` with the column's pose errors.
pub fn poses(c: &Column) -> (Pose, Pose, Pose) {
    let s_i = Vec3::new(0.02, 0.015, 0.10);
    let travel = c.err_pos_cm / c.err_pos_pct;
    let s_d = s_i + unit(1.0, 0.5, 0.2) * travel;
    let s_r = s_d + unit(0.3, -1.0, 0.4) * (c.err_pos_cm / 100.0);
    let q_i = UnitQuaternion::from_euler_angles(0.1, 0.2, 0.3);
    let q_d = UnitQuaternion::from_euler_angles(0.4, -0.1, 0.9);
    let theta = 4.0 * (c.err_or_pct / (100.0 * std::f64::consts::SQRT_2)).asin();
    let q_r = q_d * UnitQuaternion::from_axis_angle(&Unit::new_normalize(Vec3::new(0.2, 0.7, -0.4)), theta);
    (Pose::new(s_i, q_i), Pose::new(s_d, q_d), Pose::new(s_r, q_r))
}

fn json(path: &Path, value: &impl serde::Serialize) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
    text.push('\n');
    std::fs::write(path, text)
}

fn mesh_err(e: ihmbench::MeshError) -> io::Error {
    io::Error::other(e.to_string())
}

/// Writes `links/fin.obj` and one task directory per column under `root`.
pub fn write_fixtures(root: &Path) -> io::Result<()> {
    std::fs::create_dir_all(root.join("links"))?;
    save_mesh(&fin(), root.join("links/fin.obj"), MeshFormat::Obj).map_err(mesh_err)?;
    for c in &COLUMNS {
        let dir = root.join(c.dir);
        std::fs::create_dir_all(dir.join("trials"))?;
        let p = profile(c);
        save_mesh(&strip(&p, c.units), dir.join("object.obj"), MeshFormat::Obj).map_err(mesh_err)?;
        save_mesh(&strip(&p[..REGION_COLUMNS], c.units), dir.join("region.obj"), MeshFormat::Obj).map_err(mesh_err)?;
        let (h_i, h_d, h_r) = poses(c);
        let task_id = format!("dmg-{}", c.dir.replace('_', "-"));
        json(
            &dir.join("task.json"),
            &TaskDefinition {
                schema_version: ihmbench::SCHEMA_VERSION,
                task_id: task_id.clone(),
                object: Some(c.object.to_string()),
                level: Level::III,
                object_mesh: MeshRef::new("object.obj", c.units),
                initial_region: None,
                desired_region: Some(MeshRef::new("region.obj", c.units)),
                initial_hand_pose: Some(h_i),
                desired_hand_pose: Some(h_d),
            },
        )?;
        let link = LinkPlacement {
            mesh: MeshRef::new("../../links/fin.obj", 1.0),
            pose: Pose::new(
                contact_point(c).coords,
                UnitQuaternion::from_axis_angle(&Vec3::z_axis(), std::f64::consts::FRAC_PI_2),
            ),
        };
        for k in 1..=TRIALS {
            json(
                &dir.join(format!("trials/trial_{k}.json")),
                &TrialRecord {
                    schema_version: ihmbench::SCHEMA_VERSION,
                    task_id: task_id.clone(),
                    trial_index: k,
                    method: Some("DMG".into()),
                    setup_pose: Some(h_i),
                    reached_pose: Some(h_r),
                    link_placements: vec![link.clone()],
                    setup_link_placements: vec![],
                    planning_time_s: c.plan_time_s,
                    offline_time_s: Some(c.dmg_time_s),
                    execution_time_s: 0.0,
                    outcome: Outcome::Success,
                    cause: String::new(),
                    stability_attested: true,
                },
            )?;
        }
    }
    Ok(())
}
