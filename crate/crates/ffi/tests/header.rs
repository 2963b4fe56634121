use std::path::Path;
use std::process::Command;

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/ihmbench.h")).unwrap();
    for name in [
        "ihm_last_error_message",
        "ihm_version",
        "ihm_mesh_load",
        "ihm_mesh_from_arrays",
        "ihm_mesh_transformed",
        "ihm_mesh_free",
        "ihm_mesh_vertex_count",
        "ihm_mesh_face_count",
        "ihm_mesh_g_min",
        "ihm_geodesic_solver_new",
        "ihm_geodesic_distance",
        "ihm_geodesic_solver_free",
        "ihm_contact_region_error",
        "ihm_position_error",
        "ihm_position_error_pct",
        "ihm_orientation_error_pct",
        "ihm_box_stats",
    ] {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
    assert!(header.contains("typedef struct IhmMesh IhmMesh;"));
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include <ihmbench.h>\n\
         int main(void) {\n\
           IhmMesh *m = 0;\n\
           double g;\n\
           IhmStatus s = ihm_mesh_g_min(m, &g);\n\
           ihm_mesh_free(m);\n\
           return s == IHM_STATUS_NULL_ARGUMENT ? 0 : 1;\n\
         }\n",
    )
    .unwrap();
    for (compiler, extra) in [("cc", &["-std=c99"][..]), ("c++", &["-x", "c++"][..])] {
        let out = Command::new(compiler)
            .args(extra)
            .arg("-fsyntax-only")
            .arg("-Wall")
            .arg("-Werror")
            .arg("-I")
            .arg(&include)
            .arg(&src)
            .output()
            .unwrap_or_else(|e| panic!("{compiler}: {e}"));
        assert!(out.status.success(), "{compiler}: {}", String::from_utf8_lossy(&out.stderr));
    }
}
