//! Persist a structure to versioned JSON, reload it, and re-run the
//! axiom checks on the stored data.
//!
//! ```bash
//! cargo run --example json_store
//! ```

use saito_forge::cli::{load, store};
use saito_forge::saito::{check_ss_data, natural_saito, SaitoData};

fn main() -> saito_forge::Result<()> {
    let st = natural_saito("G(3,1,2)")?;
    let dir = std::env::temp_dir().join("saito_forge_example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("g312_saito.json");
    store(&path, "SaitoData", &st.saito)?;
    println!("stored {}", path.display());

    let env = load(&path)?;
    let back: SaitoData =
        serde_json::from_value(env.payload).map_err(|e| saito_forge::Error::ParseError(e.to_string()))?;
    let rep = check_ss_data(&back);
    println!(
        "reloaded {} and re-checked: {}",
        env.kind,
        if rep.all_ok() { "all residuals zero" } else { "FAILED" }
    );
    Ok(())
}
