mod support;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ihmbench::report::read_summary_csv;

fn ihmbench(args: &[&dyn AsRef<std::ffi::OsStr>]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ihmbench"))
        .args(args.iter().map(|a| a.as_ref()))
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn table4(object: &str) -> PathBuf {
    support::fixtures().join("table4").join(object)
}

fn copy_dir(from: &Path, to: &Path) {
    std::fs::create_dir_all(to).unwrap();
    for entry in std::fs::read_dir(from).unwrap() {
        let p = entry.unwrap().path();
        let dest = to.join(p.file_name().unwrap());
        if p.is_dir() {
            copy_dir(&p, &dest);
        } else {
            std::fs::copy(&p, &dest).unwrap();
        }
    }
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn pose_arg(v: &serde_json::Value) -> String {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap().to_string())
        .collect::<Vec<_>>()
        .join(",")
}

#[test]
fn validate_mesh_valid_corrupt_and_mixed() {
    let good = table4("gelatin_box").join("object.obj");
    let o = ihmbench(&[&"validate-mesh", &good]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("VALID"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("broken.obj");
    std::fs::write(&bad, "v 0 0 0\nv 1 0 0\nv 0 1 nope\nf 1 2 3\n").unwrap();
    let o = ihmbench(&[&"validate-mesh", &bad]);
    assert_eq!(o.status.code(), Some(2));
    let msg = stderr(&o);
    assert!(msg.contains("broken.obj") && msg.contains('3'), "{msg}");

    let o = ihmbench(&[&"validate-mesh", &good, &bad]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn check_setup_accepts_exact_pose_and_discards_far_pose() {
    let task = table4("gelatin_box").join("task.json");
    let def = json(&task);
    let h_i = &def["initial_hand_pose"];
    let o = ihmbench(&[&"check-setup", &task, &"--pose", &pose_arg(h_i)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("ACCEPT"));

    // 20% of the initial-to-desired span
    let s_i: Vec<f64> = h_i.as_array().unwrap()[..3].iter().map(|x| x.as_f64().unwrap()).collect();
    let s_d: Vec<f64> = def["desired_hand_pose"].as_array().unwrap()[..3].iter().map(|x| x.as_f64().unwrap()).collect();
    let span = (0..3).map(|k| (s_d[k] - s_i[k]).powi(2)).sum::<f64>().sqrt();
    let mut moved = h_i.clone();
    moved[2] = serde_json::json!(s_i[2] + 0.2 * span);
    let o = ihmbench(&[&"check-setup", &task, &"--pose", &pose_arg(&moved)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).starts_with("DISCARD"), "{}", stdout(&o));
}

#[test]
fn check_setup_level_two_uses_setup_contacts() {
    let tmp = tempfile::tempdir().unwrap();
    copy_dir(&support::fixtures().join("table4"), tmp.path());
    let dir = tmp.path().join("cracker_box");
    let mut task = json(&dir.join("task.json"));
    task["level"] = "II".into();
    task["task_id"] = "level-two".into();
    task["initial_region"] = task["desired_region"].clone();
    task.as_object_mut().unwrap().remove("initial_hand_pose");
    task.as_object_mut().unwrap().remove("desired_hand_pose");
    std::fs::write(dir.join("level2.json"), task.to_string()).unwrap();

    let mut trial = json(&dir.join("trials/trial_1.json"));
    trial["task_id"] = "level-two".into();
    let mut inside = trial["link_placements"].clone();
    inside[0]["pose"][0] = 0.005.into();
    trial["setup_link_placements"] = inside;
    let path = dir.join("trials/setup_ok.json");
    std::fs::write(&path, trial.to_string()).unwrap();
    let o = ihmbench(&[&"check-setup", &dir.join("level2.json"), &"--trial", &path]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).starts_with("ACCEPT"));

    trial["setup_link_placements"] = trial["link_placements"].clone();
    let path = dir.join("trials/setup_off.json");
    std::fs::write(&path, trial.to_string()).unwrap();
    let o = ihmbench(&[&"check-setup", &dir.join("level2.json"), &"--trial", &path]);
    assert_eq!(o.status.code(), Some(3), "{}{}", stdout(&o), stderr(&o));
}

#[test]
fn eval_perfect_bundle_and_a_drop() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = table4("spatula");
    let out = tmp.path().join("report");
    let o = ihmbench(&[&"eval", &dir.join("task.json"), &dir.join("trials"), &"--out", &out]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("spatula"));
    for f in ["summary.csv", "trials.csv", "report.json", "boxplot_g_geo_cm.svg"] {
        assert!(out.join(f).is_file(), "{f} missing");
    }
    let rows = read_summary_csv(&std::fs::read_to_string(out.join("summary.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 1);

    copy_dir(&support::fixtures().join("table4"), &tmp.path().join("copy"));
    let dir = tmp.path().join("copy/spatula");
    let trial_path = dir.join("trials/trial_3.json");
    let mut trial = json(&trial_path);
    trial["outcome"] = "DROPPED".into();
    trial.as_object_mut().unwrap().remove("reached_pose");
    std::fs::write(&trial_path, trial.to_string()).unwrap();
    let out = tmp.path().join("dropped");
    let o = ihmbench(&[&"eval", &dir.join("task.json"), &dir.join("trials"), &"--out", &out, &"--format", &"json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = json(&out.join("report.json"));
    let row = &report["summary"][0];
    assert_eq!(row["drops_pct"], 20.0);
    assert_eq!(row["dropped"], 1);
    assert_eq!(report["box_stats"]["DMG"]["err_pos_cm"]["n"], 4);
    assert!(!out.join("summary.csv").exists());
}

#[test]
fn geodesic_queries() {
    let mesh = table4("cracker_box").join("object.obj");
    let o = ihmbench(&[&"geodesic", &mesh, &"4", &"4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("0 m"), "{}", stdout(&o));

    let o = ihmbench(&[&"geodesic", &mesh, &"0", &"1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("0.005 m"), "{}", stdout(&o));

    let o = ihmbench(&[&"geodesic", &mesh, &"0", &"100000"]);
    assert_eq!(o.status.code(), Some(2));
}
