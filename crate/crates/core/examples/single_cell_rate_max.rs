// Sum-rate maximization inside one group with its total power fixed.
//
// Every user except the strongest is held at its demand and the strongest
// takes the rest. The negative sum rate is convex in the powers; its Hessian
// repeats each diagonal entry to the right.

use noma_power::single_cell::{
    negative_sum_rate_hessian, optimal_single_cell_allocation, optimal_single_cell_rate,
    single_cell_feasible,
};

pub fn run_example() -> noma_power::Result<Vec<String>> {
    let mut lines = Vec::new();
    let cases: [(&[f64], f64); 2] = [(&[2.0, 1.0], 10.0), (&[7.0, 3.0, 1.0], 20.0)];
    for (h, q) in cases {
        let demands = vec![1.0; h.len()];
        let feas = single_cell_feasible(1.0, &demands, h, q);
        let alloc = optimal_single_cell_allocation(1.0, &demands, h, q)?;
        let rate = optimal_single_cell_rate(1.0, &demands, h, q)?;
        lines.push(format!(
            "H = {h:?}, q = {q}: needs {} W, p = {:?}, sum rate {rate:.12}",
            feas.required, alloc.powers
        ));
        let hess = negative_sum_rate_hessian(1.0, &alloc.powers, h);
        lines.push(format!("  Hessian rows {hess:.5?}"));
    }

    match optimal_single_cell_rate(1.0, &[1.0, 1.0], &[2.0, 1.0], 3.0) {
        Err(e) => lines.push(format!("q = 3: {e}")),
        Ok(r) => lines.push(format!("q = 3 unexpectedly feasible: {r}")),
    }
    Ok(lines)
}

#[allow(dead_code)]
fn main() -> noma_power::Result<()> {
    for line in run_example()? {
        println!("{line}");
    }
    Ok(())
}
