mod support;

use std::path::Path;

fn files(root: &Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push(p.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    out.sort();
    out
}

#[test]
fn committed_table4_fixtures_match_generator() {
    let tmp = tempfile::tempdir().unwrap();
    support::table4::write_fixtures(tmp.path()).unwrap();
    let committed = support::fixtures().join("table4");
    let generated = files(tmp.path());
    assert_eq!(generated, files(&committed), "run `cargo run --example table4_fixtures`");
    for rel in generated {
        let a = std::fs::read(tmp.path().join(&rel)).unwrap();
        let b = std::fs::read(committed.join(&rel)).unwrap();
        assert!(a == b, "{} is stale; run `cargo run --example table4_fixtures`", rel.display());
    }
}
