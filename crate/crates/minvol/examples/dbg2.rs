use minvol::programs::fit_union;
use minvol::sets::{make_ball, SetUnion};
use minvol::solver::SolverOptions;

fn main() {
    let fig1 = SetUnion::new(vec![
        make_ball(&[0.0, 0.0], 1.0).unwrap(),
        make_ball(&[1.5, 0.0], 1.0).unwrap(),
        make_ball(&[0.0, 1.5], 1.0).unwrap(),
    ])
    .unwrap();
    match fit_union(&fig1, 4, false, &SolverOptions::fitting()) {
        Ok(c) => println!("OK obj={} status {:?}", c.objective, c.status),
        Err(e) => println!("ERR {e}"),
    }
}
