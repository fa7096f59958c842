//! The three rank-two groups whose orbit spaces carry no natural almost
//! Saito structure: the candidate multiplication exists (the pair is
//! regular) but one axiom fails with an explicit residual.
//!
//! ```bash
//! cargo run --example nonexistence
//! ```

use saito_forge::connection::natural_connection;
use saito_forge::duality::natural_ass_test;
use saito_forge::exactalg::cyc::CycNum;
use saito_forge::groups::build_group;

fn main() -> saito_forge::Result<()> {
    for name in ["G12", "G13", "G22"] {
        let g = build_group(name)?;
        let fam = natural_connection(&g)?;
        let e = vec![CycNum::one(), CycNum::zero()];
        let (verdict, witness) = natural_ass_test(&g, &fam, &e)?;
        println!("{}: {:?}", name, verdict);
        if let Some(w) = witness {
            println!("  residual witness: {}", w);
        }
    }
    Ok(())
}
