//! Regenerates the Level III DMG fixtures under `tests/fixtures/table4`.

#[path = "../tests/support/table4.rs"]
mod table4;

fn main() -> std::io::Result<()> {
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/table4");
    table4::write_fixtures(&root)?;
    println!("wrote {}", root.display());
    Ok(())
}
