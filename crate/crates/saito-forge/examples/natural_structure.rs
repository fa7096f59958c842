//! Build the natural polynomial Saito structure of a reflection group
//! and print its multiplication and Christoffel matrices.
//!
//! ```bash
//! cargo run --example natural_structure
//! ```

fn main() -> saito_forge::Result<()> {
    for name in ["G(3,3,2)", "G4"] {
        let st = saito_forge::saito::natural_saito(name)?;
        println!("== {} (degrees {:?}) ==", st.group.name, st.group.degrees);
        println!("Delta = {}", st.group.discriminant_x);
        for (a, m) in st.saito.gamma.iter().enumerate() {
            println!("Gamma_{} =\n{}", a + 1, m);
        }
        for (a, m) in st.saito.c_mats.iter().enumerate() {
            println!("C_{} =\n{}", a + 1, m);
        }
        let u = st.saito.u_matrix();
        println!("U =\n{}", u);
        println!("det U = {} (equals Delta)", u.det());
        let rep = saito_forge::saito::check_ss_data(&st.saito);
        println!("axioms: {}", if rep.all_ok() { "all residuals zero" } else { "FAILED" });
        println!();
    }
    Ok(())
}
