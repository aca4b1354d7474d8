//! Which sheets of the fiber collide over each critical value.
use blaschke_monodromy::blaschke::FiniteBlaschke;
use blaschke_monodromy::monodromy::gluing_graph;
use num_complex::Complex64;

fn main() -> blaschke_monodromy::error::Result<()> {
    let b = FiniteBlaschke::from_points(&[
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.4, 0.2),
    ])?;
    let g = gluing_graph(&b)?;
    println!("{} sheets, connected = {}", g.vertices.len(), g.connected);
    for (i, j, v) in &g.edges {
        println!("  {i} -- {j} over {v:.8}");
    }
    Ok(())
}
