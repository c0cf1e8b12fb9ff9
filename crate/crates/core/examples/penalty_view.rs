//! The standard method is projected gradient on the penalty function; the
//! idling method is the same step plus an inexactness vector.

use idlegrad::checks::random_small_instance;
use idlegrad::engine::{error_vector, penalty_step, penalty_value, step_idling, step_standard};
use idlegrad::prelude::*;

fn main() {
    let mut rng = stream(3, 0, Purpose::Misc);
    let (_, c, inst, alpha) = random_small_instance(&mut rng, 6, 3);
    let x = InitMode::PerNodeUniform { half_width: 5.0 }.draw(&inst, &mut rng);

    let mut st = RunState::new(x.clone());
    step_standard(&mut st, &inst, &c, alpha);
    println!("standard vs penalty step: {:.2e}", st.x.max_abs_diff(&penalty_step(&x, &inst, &c, alpha, None)));

    let z = ActivationVector::from_bits(0, &vec![1, 0].repeat(inst.nodes())[..inst.nodes()]);
    let p = 0.5;
    let e = error_vector(&x, &inst, &c, alpha, &z, p);
    let mut st = RunState::new(x.clone());
    step_idling(&mut st, &inst, &c, alpha, &z, p);
    println!("idling vs inexact penalty step: {:.2e}", st.x.max_abs_diff(&penalty_step(&x, &inst, &c, alpha, Some(&e))));
    println!("penalty {:.6} -> {:.6}", penalty_value(&x, &inst, &c, alpha), penalty_value(&st.x, &inst, &c, alpha));
}
