//! Small growth-curve benchmark written as CSV to stdout, with fitted log-log slopes.

use vdecomp::bench::{run_bench, write_csv, BenchPlan};
use vdecomp::scene::SceneKind;

fn main() {
    let mut plan = BenchPlan::new(SceneKind::Boxes, vec![4, 8, 16], 2, 1);
    plan.cutting_r = Some(2);
    let report = run_bench(&plan).unwrap();
    write_csv(&report.rows, std::io::stdout()).unwrap();
    for s in &report.slopes {
        println!("# slope {}: {:?} band {:?}", s.metric, s.slope, s.band);
    }
}
