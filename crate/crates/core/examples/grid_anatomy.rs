//! Vertices, edges, and the canonical boundary order of a square grid.
//!
//! `cargo run --example grid_anatomy -- 2x3`

use peps_injectivity::grid::{outgoing_order, EdgeId};
use peps_injectivity::GridSpec;

fn main() -> peps_injectivity::Result<()> {
    let spec: GridSpec = std::env::args().nth(1).unwrap_or_else(|| "2x3".into()).parse()?;
    println!("G({spec}): {} vertices, {} inner edges, {} outgoing edges", spec.num_vertices(), spec.num_inner(), spec.num_outgoing());

    for v in spec.vertices() {
        let ports: Vec<String> = spec
            .port_edges(&v)
            .iter()
            .map(|e| match e {
                EdgeId::Outgoing(o) => format!("out{}", o.direction),
                EdgeId::Inner { axis, lower } => format!("inner(e{}, {:?})", axis + 1, lower.coords),
            })
            .collect();
        println!("  vertex {:?}: {}", v.coords, ports.join(" "));
    }

    println!("boundary tensor factors, in order:");
    for (k, o) in outgoing_order(&spec).iter().enumerate() {
        println!("  {k:>2}: {} at {:?}", o.direction, o.vertex.coords);
    }

    let below: Vec<String> = spec.immediate_predecessors().iter().map(|g| g.to_string()).collect();
    println!("immediate predecessors: {}", below.join(", "));
    let boxed: Vec<String> = spec.sub_box().iter().map(|g| g.to_string()).collect();
    println!("exploration order up to {spec}: {}", boxed.join(" "));
    Ok(())
}
