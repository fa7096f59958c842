//! Dualize a Saito structure into an almost Saito structure and back,
//! checking every axiom and the exact round trip.
//!
//! ```bash
//! cargo run --example duality_roundtrip
//! ```

use saito_forge::duality::{dual_almost, dual_saito, GenSaitoData};
use saito_forge::exactalg::cyc::{CycNum, Rat};
use saito_forge::saito::natural_saito;

fn main() -> saito_forge::Result<()> {
    let st = natural_saito("G4")?;
    let s = GenSaitoData::from_polynomial(&st.saito);
    let r = CycNum::from_rat(Rat::new(1.into(), st.group.d1().into()));

    let a = dual_almost(&s, &CycNum::zero(), &r)?;
    println!("dual almost Saito structure of G4 with r = {}", r);
    let rep = a.check();
    for item in &rep.items {
        println!("  {:<14} {}", item.name, if item.ok { "ok" } else { "FAIL" });
    }

    // the dual connection is the natural one
    for alpha in 0..st.group.rank {
        assert!(a.omega[alpha] == st.family.omega(alpha));
    }
    println!("dual connection equals the induced flat connection");

    let s2 = dual_saito(&a)?;
    assert!(s2.c_mats == s.c_mats && s2.gamma == s.gamma);
    println!("round trip recovers the polynomial structure exactly");
    Ok(())
}
