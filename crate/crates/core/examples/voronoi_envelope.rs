//! Minimization diagram of lifted paraboloids, which is the Euclidean Voronoi diagram
//! of the sites, and a lifted prism.

use vdecomp::envelope::{build_min_diagram_vd, envelope_value, lift_prism, random_paraboloids};
use vdecomp::exact::{Point3, Scalar};
use vdecomp::scene::BBox;

fn main() {
    let bbox = BBox::cube(0, 64);
    let sites = random_paraboloids(8, 4, &bbox);
    let md = build_min_diagram_vd(&sites, &bbox).unwrap();
    println!("{} sites, {} cells, {} prisms", sites.len(), md.cells.len(), md.prisms.len());
    let q = Point3::new(Scalar::ratio(100, 7), Scalar::ratio(250, 9), Scalar::ratio(61, 3));
    let v = envelope_value(&sites, &q).unwrap();
    println!("nearest site to q is {} (diagram says {:?}), envelope value {:.3}", v.argmin, md.locate(&q).map(|i| md.prisms[i].label[0]), v.value.to_f64());
    let lifted = lift_prism(&md, 0, md.prisms[0].label[0]).unwrap();
    let inside = md.prisms[0].interior_point();
    let f = sites[md.prisms[0].label[0]].eval(&inside);
    println!(
        "first lifted prism contains the graph point: {}, a point one unit above it: {}",
        lifted.contains(&inside, &f),
        lifted.contains(&inside, &(&f + &Scalar::from(1)))
    );
}
