// Score all 88 similarity x metric x linkage x algorithm cells on the
// bundled sample corpus.

use std::error::Error;
use std::path::Path;

use cta_cluster::pipeline::{render_markdown, run_grid, CellValue, GridOptions};

fn main() -> Result<(), Box<dyn Error>> {
    let dir = Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/data/sample_corpus"));
    let report = run_grid(
        dir,
        &GridOptions {
            seed: 42,
            ..Default::default()
        },
    )?;

    let na = report
        .rows
        .iter()
        .filter(|r| r.silhouette == CellValue::NotApplicable)
        .count();
    println!("{} cells, {na} not applicable\n", report.rows.len());
    print!(
        "{}",
        render_markdown(&report).lines().take(9).collect::<Vec<_>>().join("\n")
    );
    println!();
    Ok(())
}
