// scratch: reproduce trial 1 of cross_solver_agreement
use hardflow::constraints::{ConstraintSet, ConstraintSpec, CostFn};
use hardflow::solver::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for trial in 0..4 {
        let d = rng.random_range(2..5);
        let anchor: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
        let use_box: bool = rng.random_bool(0.5);
        let cons = if use_box {
            let lo: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..0.0)).collect();
            let hi: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..1.0)).collect();
            println!("trial {trial}: box {:?} {:?}", lo, hi);
            ConstraintSet::from_specs(d, &[ConstraintSpec::Box { lower: lo, upper: hi }]).unwrap()
        } else {
            let normal: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
            let offset = rng.random_range(-1.0..1.0);
            println!("trial {trial}: halfspace {:?} {}", normal, offset);
            ConstraintSet::from_specs(d, &[ConstraintSpec::Halfspace { normal, offset }]).unwrap()
        };
        let target: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let cost = if rng.random_bool(0.5) {
            CostFn::QuadraticToTarget { target, coords: None, scale: rng.random_range(0.1..2.0) }
        } else {
            CostFn::Zero
        };
        let w = rng.random_range(0.5..4.0);
        println!("  anchor {:?} weight {} cost {:?}", anchor, w, cost);
        let inst = SubproblemInstance { anchor: &anchor, weight: w, cost: &cost, constraints: &cons, warm_start: None };
        let al = solve_aug_lagrangian(&inst, &SolverConfig::default()).unwrap();
        println!("  al: x={:?} obj={} feas={} conv={} stat={:?} mus={:?} iters={}",
            al.x, al.objective, al.feasibility, al.converged, al.kkt_stationarity, al.multipliers, al.iterations);
        let cf = solve_closed_form(&inst).unwrap();
        println!("  cf: x={:?} obj={} mus={:?}", cf.x, cf.objective, cf.multipliers);
    }
}
