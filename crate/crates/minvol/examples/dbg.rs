use std::time::Instant;
use minvol::ode::van_der_pol;
use minvol::programs::{fit_attractor, fit_union};
use minvol::sets::{make_ball, sample_set, Box as SampleBox, SetUnion};
use minvol::solver::SolverOptions;

fn main() {
    let opts = SolverOptions::fitting();

    let fig1 = SetUnion::new(vec![
        make_ball(&[0.0, 0.0], 1.0).unwrap(),
        make_ball(&[1.5, 0.0], 1.0).unwrap(),
        make_ball(&[0.0, 1.5], 1.0).unwrap(),
    ])
    .unwrap();
    let t0 = Instant::now();
    match fit_union(&fig1, 4, false, &opts) {
        Ok(cert) => {
            println!("fig1 d=4: {:?} obj={} in {:?}", cert.status, cert.objective, t0.elapsed());
            println!("  kkt: {:?}", cert.kkt);
            let samples = sample_set(&fig1, &SampleBox::new(vec![-1.0, -1.0], vec![2.5, 2.5]).unwrap(), 10000, 42).unwrap();
            let mut maxv: f64 = f64::NEG_INFINITY;
            for p in &samples { maxv = maxv.max(cert.eval_v(p).unwrap()); }
            println!("  max V over 10^4 union samples: {maxv}");
            println!("  min gram eig: {}", cert.min_gram_eigenvalue());
        }
        Err(e) => println!("fig1 FAILED: {e}"),
    }

    let vdp = van_der_pol();
    let seed = make_ball(&[0.0, 0.0], 1.75).unwrap();
    let t1 = Instant::now();
    match fit_attractor(&vdp, &seed, 4, &opts) {
        Ok(cert) => {
            println!("vdp d=4: {:?} obj={} in {:?}", cert.status, cert.objective, t1.elapsed());
            println!("  kkt: {:?}", cert.kkt);
            println!("  V(0,0)={:?} V(2,0)={:?}", cert.eval_v(&[0.0,0.0]), cert.eval_v(&[2.0,0.0]));
        }
        Err(e) => println!("vdp FAILED: {e}"),
    }
}
