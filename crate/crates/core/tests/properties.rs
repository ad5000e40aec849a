use noma_power::model::{
    group_interference, group_rates, AuxiliaryVector, CellPowerVector, NetworkTopology,
    RateDemands, UserLink,
};
use noma_power::oracle::{
    barrier_minimize, fd_hessian_psd, grid_rate_max_group, standard_function_probe,
    tight_group_powers, LogBarrierProblem,
};
use noma_power::power_min::{
    dpc_spm, interference_map, min_power_user_allocation, minimum_group_power, SpmOptions, Sweep,
};
use noma_power::rate_max::{
    dpc_srm, power_caps, solve_convex_subproblem, surrogate_objective, SrmOptions, StartPoint,
};
use noma_power::scenario::{pair_users, Pairing};
use noma_power::single_cell::{
    negative_sum_rate, negative_sum_rate_hessian, optimal_single_cell_allocation,
    optimal_single_cell_rate, single_cell_feasible,
};
use noma_power::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Effective interference of a group: positive and non-increasing.
fn interference(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05f64..5.0, 1..=max_len).prop_map(|mut h| {
        for j in (0..h.len() - 1).rev() {
            h[j] = h[j].max(h[j + 1]);
        }
        h
    })
}

fn group_case(max_len: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    interference(max_len).prop_flat_map(|h| {
        let n = h.len();
        (Just(h), prop::collection::vec(0.1f64..2.0, n))
    })
}

/// Cells with two users per subchannel, own gains well above cross gains.
fn network(cells: usize, subs: usize, budget: f64, seed: u64) -> NetworkTopology {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = NetworkTopology::builder(cells, subs)
        .bandwidth(1.0)
        .noise_power(0.1)
        .uniform_budget(budget);
    let mut id = 0;
    for i in 0..cells {
        for m in 0..subs {
            let users = (0..2)
                .map(|_| {
                    let gains = (0..cells)
                        .map(|k| {
                            if k == i {
                                rng.random_range(0.5..2.0)
                            } else {
                                rng.random_range(0.01..0.2)
                            }
                        })
                        .collect();
                    id += 1;
                    UserLink::new(id - 1, gains)
                })
                .collect();
            b = b.group(i, m, users);
        }
    }
    b.build().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn closed_form_meets_every_demand_exactly((h, r) in group_case(4)) {
        let p = min_power_user_allocation(1.0, &r, &h);
        let rates = group_rates(1.0, &p, &h);
        for (got, want) in rates.iter().zip(&r) {
            prop_assert!((got - want).abs() <= 1e-9 * want);
        }
        let tight = tight_group_powers(1.0, &r, &h);
        for (a, b) in p.iter().zip(&tight) {
            prop_assert!((a - b).abs() <= 1e-9 * b);
        }
        let total: f64 = p.iter().sum();
        prop_assert!((minimum_group_power(1.0, &r, &h) - total).abs() <= 1e-9 * total);
    }

    #[test]
    fn minimum_power_grows_with_interference((h, r) in group_case(4), bump in 1.0f64..3.0) {
        let raised: Vec<f64> = h.iter().map(|v| v * bump).collect();
        let base = minimum_group_power(1.0, &r, &h);
        prop_assert!(minimum_group_power(1.0, &r, &raised) >= base);
        prop_assert!((minimum_group_power(1.0, &r, &raised) - bump * base).abs() <= 1e-9 * bump * base);
    }

    #[test]
    fn single_cell_optimum_beats_feasible_splits(
        (h, r) in group_case(3),
        extra in 0.0f64..3.0,
        split in prop::collection::vec(0.0f64..1.0, 3),
    ) {
        let need = minimum_group_power(1.0, &r, &h);
        let q = need * (1.0 + extra);
        let alloc = optimal_single_cell_allocation(1.0, &r, &h, q).unwrap();
        prop_assert!((alloc.powers.iter().sum::<f64>() - q).abs() <= 1e-9 * q);
        let rates = group_rates(1.0, &alloc.powers, &h);
        for (got, want) in rates.iter().zip(&r) {
            prop_assert!(*got >= want * (1.0 - 1e-9));
        }
        let best = optimal_single_cell_rate(1.0, &r, &h, q).unwrap();
        prop_assert!((rates.iter().sum::<f64>() - best).abs() <= 1e-9 * best);

        // surplus spread over the users at random
        let mut p = tight_group_powers(1.0, &r, &h);
        let weights: f64 = split[..h.len()].iter().sum::<f64>() + 1e-12;
        for (pj, w) in p.iter_mut().zip(&split) {
            *pj += (q - need) * w / weights;
        }
        let other = group_rates(1.0, &p, &h);
        if other.iter().zip(&r).all(|(g, w)| *g >= *w) {
            prop_assert!(other.iter().sum::<f64>() <= best + 1e-9);
        }
    }

    #[test]
    fn oracle_and_closed_form_agree_on_feasibility((h, r) in group_case(3), frac in 0.1f64..0.99) {
        let need = minimum_group_power(1.0, &r, &h);
        prop_assert!(!single_cell_feasible(1.0, &r, &h, need * frac).feasible);
        let grid = grid_rate_max_group(1.0, &r, &h, need * frac, need / 200.0);
        let none = matches!(grid, Err(Error::NoneFound(_)));
        prop_assert!(none);
        let closed = optimal_single_cell_rate(1.0, &r, &h, need * frac);
        let infeasible = matches!(closed, Err(Error::Infeasible { .. }));
        prop_assert!(infeasible);
        let grid = grid_rate_max_group(1.0, &r, &h, need * 1.5, need / 200.0);
        prop_assert!(grid.is_ok());
    }

    #[test]
    fn analytic_and_numeric_hessians_agree((h, r) in group_case(4), extra in 0.1f64..3.0) {
        let q = minimum_group_power(1.0, &r, &h) * (1.0 + extra);
        let p = optimal_single_cell_allocation(1.0, &r, &h, q).unwrap().powers;
        let exact = negative_sum_rate_hessian(1.0, &p, &h);
        let fd = fd_hessian_psd(|x| negative_sum_rate(1.0, x, &h), &p, None).unwrap();
        let scale = exact.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        for (a, b) in exact.iter().flatten().zip(fd.hessian.iter().flatten()) {
            prop_assert!((a - b).abs() <= 1e-4 * scale, "{exact:?} vs {:?}", fd.hessian);
        }
        prop_assert!(fd.psd);
    }

    #[test]
    fn interference_map_is_standard(seed in 0u64..1000) {
        let topo = network(2 + (seed % 2) as usize, 1 + (seed % 3 == 0) as usize, 10.0, seed);
        let demands = RateDemands::uniform(&topo, 1.0).unwrap();
        let (ni, nm) = (topo.num_cells(), topo.num_subchannels());
        let report = standard_function_probe(
            |q| {
                let q = CellPowerVector::from_values(ni, nm, q.to_vec()).unwrap();
                interference_map(&topo, &demands, &q).unwrap().values().to_vec()
            },
            ni * nm,
            10.0,
            20,
            seed,
        );
        prop_assert!(report.counterexamples.is_empty(), "{:?}", report.counterexamples[0]);
    }

    #[test]
    fn fixed_point_ignores_start_and_sweep(seed in 0u64..1000) {
        let topo = network(2, 2, 10.0, seed);
        let demands = RateDemands::uniform(&topo, 1.0).unwrap();
        let zero = CellPowerVector::zeros(2, 2);
        let full = CellPowerVector::split_budgets(&topo);
        let a = dpc_spm(&topo, &demands, Some(&zero), &SpmOptions::default()).unwrap();
        let jacobi = SpmOptions { sweep: Sweep::Jacobi, ..SpmOptions::default() };
        let b = dpc_spm(&topo, &demands, Some(&full), &jacobi).unwrap();
        prop_assume!(a.converged && !a.diverged);
        prop_assert!(a.q_star.max_abs_diff(&b.q_star) <= 1e-6);
        let f = interference_map(&topo, &demands, &a.q_star).unwrap();
        prop_assert!(f.max_abs_diff(&a.q_star) <= 1e-7);
        // sum power is monotone along the iteration from zero
        for w in a.trace.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-12);
        }
    }

    #[test]
    fn pairing_partitions_sorted_users(half in 1usize..6, size in 2usize..4, method in 0usize..3) {
        let n = half * size;
        let users: Vec<usize> = (0..n).collect();
        let method = [Pairing::SS, Pairing::SW, Pairing::SM][method];
        let groups = pair_users(&users, size, method).unwrap();
        prop_assert_eq!(groups.len(), half);
        let mut seen: Vec<usize> = groups.iter().flatten().copied().collect();
        seen.sort();
        prop_assert_eq!(seen, users);
        for g in &groups {
            prop_assert!(g.windows(2).all(|w| w[0] < w[1]));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// The exact subproblem solver against a generic interior-point method on
    /// the same convex surrogate.
    #[test]
    fn subproblem_matches_barrier_method(seed in 0u64..1000, cell in 0usize..2) {
        let topo = network(2, 2, 4.0, seed);
        let demands = RateDemands::uniform(&topo, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let start = StartPoint::random(&topo, &demands, &mut rng);
        prop_assume!(start.is_ok());
        let start = start.unwrap();
        let caps = power_caps(&topo, &start.q, &start.x, cell).unwrap();
        let x_lin: Vec<Vec<f64>> = (0..2).map(|m| start.x.group(cell, m).to_vec()).collect();
        let ours = solve_convex_subproblem(&topo, &demands, &start.q, cell, &x_lin, &caps, topo.budget(cell));
        prop_assume!(ours.is_ok());
        let ours = ours.unwrap();

        let bw = topo.bandwidth();
        let ln2 = std::f64::consts::LN_2;
        // z = [q_0, x_0.., q_1, x_1..]
        let mut problem = LogBarrierProblem::default();
        let mut z0 = Vec::new();
        let widths: Vec<usize> = (0..2).map(|m| 1 + x_lin[m].len()).collect();
        let dim: usize = widths.iter().sum();
        problem.linear = vec![0.0; dim];
        let mut budget_row = vec![0.0; dim];
        let mut offset = 0;
        for m in 0..2 {
            let r = demands.group(cell, m);
            let n = r.len();
            let h = group_interference(&topo, &start.q, cell, m).unwrap();
            let mut w = Vec::new();
            let mut cum = 0.0;
            for &rj in r {
                w.push(((rj / bw).exp2() - 1.0) * (cum / bw).exp2());
                cum += rj;
            }
            let scale = (r[..n - 1].iter().sum::<f64>() / bw).exp2();
            let mut c = vec![0.0; dim];
            c[offset] = 1.0 / scale;
            for j in 0..n - 1 {
                c[offset + 1 + j] = -w[j] / scale;
            }
            c[offset + n] = 1.0;
            problem.log_terms.push((bw / ln2, c, 0.0));
            problem.linear[offset + n] = bw / (ln2 * x_lin[m][n - 1]);
            let mut floor = vec![0.0; dim];
            floor[offset] = -1.0;
            for j in 0..n {
                floor[offset + 1 + j] = w[j];
                let mut lb = vec![0.0; dim];
                lb[offset + 1 + j] = -1.0;
                problem.constraints.push((lb, -h[j]));
            }
            problem.constraints.push((floor, 0.0));
            if caps[m].is_finite() {
                let mut cap = vec![0.0; dim];
                cap[offset] = 1.0;
                problem.constraints.push((cap, caps[m]));
            }
            budget_row[offset] = 1.0;

            let x: Vec<f64> = h.iter().map(|v| v * (1.0 + 1e-4)).collect();
            let need: f64 = w.iter().zip(&x).map(|(a, b)| a * b).sum();
            let room = caps[m].min(topo.budget(cell) / 2.0);
            prop_assume!(need < room);
            z0.push(0.5 * (need + room));
            z0.extend(x);
            offset += widths[m];
        }
        problem.constraints.push((budget_row, topo.budget(cell)));

        let z = barrier_minimize(&problem, &z0, 1e-10).unwrap();
        let q_i = vec![z[0], z[widths[0]]];
        let x_i = vec![z[1..widths[0]].to_vec(), z[widths[0] + 1..].to_vec()];
        let theirs = surrogate_objective(&topo, &demands, &q_i, &x_i, &x_lin, cell).unwrap();
        let tol = 1e-6 * (1.0 + ours.surrogate_value.abs());
        prop_assert!(ours.surrogate_value <= theirs + tol, "ours {} barrier {}", ours.surrogate_value, theirs);
        prop_assert!(theirs <= ours.surrogate_value + 1e-5 * (1.0 + theirs.abs()));
    }

    #[test]
    fn rate_max_trace_never_increases(seed in 0u64..1000) {
        let topo = network(2 + (seed % 2) as usize, 2, 4.0, seed);
        let demands = RateDemands::uniform(&topo, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let start = StartPoint::random(&topo, &demands, &mut rng);
        prop_assume!(start.is_ok());
        let opts = SrmOptions { tol: 1e-6, ..SrmOptions::default() };
        let report = dpc_srm(&topo, &demands, &start.unwrap(), &opts).unwrap();
        for w in report.trace.windows(2) {
            prop_assert!(w[1] <= w[0], "{:?}", report.trace);
        }
        let h = AuxiliaryVector::from_interference(&topo, &report.q).unwrap();
        for ((i, m), g) in topo.groups() {
            for j in 0..g.len() {
                let (got, want) = (report.x.group(i, m)[j], h.group(i, m)[j]);
                prop_assert!((got - want).abs() <= 1e-6 * want);
            }
        }
        prop_assert!(report.q.within_budgets(&topo, 1e-9).iter().all(|&b| b));
    }
}
