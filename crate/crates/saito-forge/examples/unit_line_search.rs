//! For groups whose maximal degree has multiplicity two, the space of
//! admissible unit fields is two-dimensional; solve for the finitely
//! many lines on which the axioms close up.
//!
//! ```bash
//! cargo run --example unit_line_search
//! ```

use saito_forge::covering::find_natural_e_lines;

fn main() -> saito_forge::Result<()> {
    for name in ["G(4,2,2)", "G7", "G11"] {
        let lines = find_natural_e_lines(name)?;
        println!("{}: {} admissible line(s)", name, lines.len());
        for l in &lines {
            println!("  e = [{} : {}]", l[0], l[1]);
        }
    }
    // a duality group has a unique line, a nonexistence group has none
    println!("G4: {:?} line(s)", find_natural_e_lines("G4")?.len());
    println!("G12: {:?} line(s)", find_natural_e_lines("G12")?.len());
    Ok(())
}
