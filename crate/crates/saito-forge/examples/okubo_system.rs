//! The first-order system satisfied by the flat sections of the dual
//! connection in the frame of basic derivations, in flat coordinates.
//!
//! ```bash
//! cargo run --example okubo_system
//! ```

use saito_forge::saito::{basic_derivations, flat_coordinates, natural_saito, okubo_system};

fn main() -> saito_forge::Result<()> {
    let st = natural_saito("G(3,3,2)")?;
    let flat = flat_coordinates(&st)?;
    let ok = okubo_system(&flat)?;
    println!("== G(3,3,2) ==");
    for (a, m) in ok.mats.iter().enumerate() {
        println!("system matrix in direction t^{}:\n{}", a + 1, m);
    }
    let bd = basic_derivations(&st)?;
    println!("basic derivation lifts (rows u^i, columns X_alpha):\n{}", bd.lifts);
    Ok(())
}
