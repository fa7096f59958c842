//! Push a Saito structure forward along a branched covering of orbit
//! spaces and verify the induced structure: polynomial multiplication,
//! logarithmic connection poles, and the expected unit line.
//!
//! ```bash
//! cargo run --example coverings
//! ```

use saito_forge::covering::{covering_rows, verify_covering_row};

fn main() -> saito_forge::Result<()> {
    for target in ["G(4,2,2)", "G7", "G15"] {
        println!("== coverings onto {} ==", target);
        for (i, row) in covering_rows(target)?.iter().enumerate() {
            let v = verify_covering_row(row)?;
            println!(
                "row {}: {} -> {} via {}: {} ({} logarithmic entr(ies))",
                i + 1,
                v.source,
                v.target,
                v.map_desc,
                if v.ok() { "verified" } else { "FAILED" },
                v.log_entry_count,
            );
        }
        println!();
    }
    Ok(())
}
