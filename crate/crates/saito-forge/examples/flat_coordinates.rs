//! Compute flat coordinates for a family of monomial groups and print
//! the data in the layout of the reference tables.
//!
//! ```bash
//! cargo run --example flat_coordinates
//! ```

use saito_forge::saito::{flat_coordinates, natural_saito};

fn main() -> saito_forge::Result<()> {
    for m in 2..=5 {
        let name = format!("G({},1,2)", m);
        let st = natural_saito(&name)?;
        let flat = flat_coordinates(&st)?;
        println!("== {} ==", name);
        for (i, t) in flat.t_in_u.iter().enumerate() {
            println!("t^{} = {}", i + 1, t);
        }
        println!(
            "dt2 * dt2 = ({}) d_t1 + ({}) d_t2",
            flat.c_t[1].at(0, 1),
            flat.c_t[1].at(1, 1)
        );
        println!();
    }
    Ok(())
}
