// SPDX-License-Identifier: MIT
//! Scratch calibration scans for the acceptance suite seeds.

mod support;

use bassnet_core::closedform::{bass_formula, f_complete_m2, f_complete_m3, f_1d};
use bassnet_core::dominance::{
    bruteforce_interadoption_cdfs, check_cdf_dominance, compare_adoption_curves,
    DominanceRelation,
};
use bassnet_core::gillespie::{estimate_adoption_curve, simulate_realization_indexed};
use bassnet_core::grid::TimeGrid;
use bassnet_core::initial::{cartesian_d3_limit, derivatives_cartesian, derivatives_general, derivatives_mild_het};
use bassnet_core::master::{
    solve_general_master, solve_general_master_numeric, MasterBackend, NumericTolerance,
    solve_block_and_alternating_circles, solve_general_master_auto, solve_onesided_circle,
    solve_twosided_circle,
};
use bassnet_core::network::{
    build_cartesian_torus, build_complete, build_custom, build_one_sided_circle,
    build_two_sided_circle,
};
use bassnet_core::{MildHetSpec, Network};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use support::{
    derivative_grid, extract_initial_derivatives, max_abs_diff, random_network,
};

fn c2_net_seeds() -> Vec<(usize, u64)> {
    vec![
        (2, 102),
        (2, 202),
        (2, 302),
        (3, 103),
        (3, 203),
        (3, 303),
        (4, 104),
        (4, 204),
        (4, 304),
        (5, 105),
        (5, 205),
        (5, 305),
        (6, 106),
        (6, 206),
        (6, 306),
        (7, 107),
        (7, 207),
        (8, 1108),
        (8, 1608),
        (8, 2908),
    ]
}

#[test]
fn c1_scan() {
    let spec = MildHetSpec::uniform(1000, 0.01, 0.4).unwrap();
    let net = build_complete(&spec);
    let grid = TimeGrid::uniform(25.0, 101).unwrap();
    let reference: Vec<f64> = grid
        .points()
        .iter()
        .map(|&t| bass_formula(t, 0.01, 0.4).unwrap())
        .collect();
    for seed in 1u64..=16 {
        let start = std::time::Instant::now();
        let curve = estimate_adoption_curve(&net, &grid, 10_000, seed);
        let ci = curve.ci_half_width().unwrap();
        let mut worst = f64::NEG_INFINITY;
        let mut sup = 0.0f64;
        for i in 0..grid.len() {
            let diff = (curve.values()[i] - reference[i]).abs();
            let tol = 0.005f64.max(3.0 * ci[i]);
            sup = sup.max(diff);
            worst = worst.max(diff - tol);
        }
        println!(
            "c1 seed {seed:>2}: sup |diff| = {sup:.4e}, worst diff-tol = {worst:+.3e} ({}) [{:.1}s]",
            if worst <= 0.0 { "PASS" } else { "fail" },
            start.elapsed().as_secs_f64()
        );
    }
}

#[test]
fn c2_scan() {
    let grid = TimeGrid::uniform(12.0, 25).unwrap();
    for base in 1u64..=5 {
        let mut worst = 0.0f64;
        let mut worst_at = (0usize, 0u64);
        for (m, net_seed) in c2_net_seeds() {
            let net = random_network(m, net_seed);
            let (exact, _) = solve_general_master_auto(&net, &grid).unwrap();
            let mc_seed = base.wrapping_mul(0x9E37_79B9).wrapping_add(net_seed);
            let mc = estimate_adoption_curve(&net, &grid, 100_000, mc_seed);
            let ci = mc.ci_half_width().unwrap();
            for i in 1..grid.len() {
                let se = ci[i] / 1.959_963_984_540_054;
                if se == 0.0 {
                    continue;
                }
                let z = (mc.values()[i] - exact.values()[i]).abs() / se;
                if z > worst {
                    worst = z;
                    worst_at = (m, net_seed);
                }
            }
        }
        println!(
            "c2 base {base}: worst z = {worst:.2} at m = {}, net seed {}",
            worst_at.0, worst_at.1
        );
    }
}

#[test]
fn c2_closed_forms() {
    let grid = TimeGrid::uniform(12.0, 25).unwrap();
    for (m, net_seed) in c2_net_seeds() {
        if m > 3 {
            continue;
        }
        let net = random_network(m, net_seed);
        let (exact, _) = solve_general_master_auto(&net, &grid).unwrap();
        let closed: Result<Vec<f64>, _> = grid
            .points()
            .iter()
            .map(|&t| {
                if m == 2 {
                    f_complete_m2(
                        t,
                        net.p()[0],
                        net.p()[1],
                        net.rate_between(0, 1),
                        net.rate_between(1, 0),
                    )
                } else {
                    let p = [net.p()[0], net.p()[1], net.p()[2]];
                    let mut q = [[0.0; 3]; 3];
                    for (i, row) in q.iter_mut().enumerate() {
                        for (j, cell) in row.iter_mut().enumerate() {
                            if i != j {
                                *cell = net.rate_between(i, j);
                            }
                        }
                    }
                    f_complete_m3(t, &p, &q)
                }
            })
            .collect();
        match closed {
            Ok(values) => {
                let gap = max_abs_diff(exact.values(), &values);
                println!("c2c m = {m}, seed {net_seed}: closed-form gap {gap:.2e}");
            }
            Err(e) => println!("c2c m = {m}, seed {net_seed}: ERROR {e:?}"),
        }
    }
}

#[test]
fn c3_check() {
    let grid = TimeGrid::uniform(15.0, 31).unwrap();
    for m in 3..=10 {
        let net = build_two_sided_circle(vec![0.1; 10][..m].to_vec(), vec![0.25; 10][..m].to_vec(), vec![0.15; 10][..m].to_vec()).unwrap();
        let (two, _) = solve_twosided_circle(&net, &grid).unwrap();
        let one_net = build_one_sided_circle(vec![0.1; 10][..m].to_vec(), vec![0.4; 10][..m].to_vec()).unwrap();
        let (one, _) = solve_onesided_circle(&one_net, &grid).unwrap();
        let gap = two.sup_distance(&one).unwrap();
        println!("c3 hom m = {m}: sup gap {gap:.2e}");
    }

    let p = vec![0.3, 0.0, 0.0];
    let inst1_two = build_two_sided_circle(p.clone(), vec![0.2, 0.0, 0.0], vec![0.0, 0.0, 0.2]).unwrap();
    let inst1_one = build_custom(p.clone(), vec![(2, 0, 0.2), (1, 2, 0.2)]).unwrap();
    let inst2_two = build_two_sided_circle(p.clone(), vec![0.0, 0.0, 0.2], vec![0.0, 0.2, 0.0]).unwrap();
    let inst2_one = build_custom(p.clone(), vec![(0, 1, 0.2), (1, 2, 0.2)]).unwrap();
    for (name, two_net, one_net) in [
        ("inst1", inst1_two, inst1_one),
        ("inst2", inst2_two, inst2_one),
    ] {
        let (two, _) = solve_general_master_auto(&two_net, &grid).unwrap();
        let (one, _) = solve_general_master_auto(&one_net, &grid).unwrap();
        let diffs: Vec<f64> = two
            .values()
            .iter()
            .zip(one.values())
            .map(|(a, b)| a - b)
            .collect();
        let min = diffs[1..].iter().cloned().fold(f64::INFINITY, f64::min);
        let max = diffs[1..].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        println!("c3 {name}: two-sided minus one-sided range [{min:+.3e}, {max:+.3e}]");
    }
}

#[test]
fn c4_check() {
    let m = 500;
    let net = build_one_sided_circle(vec![0.1; 500], vec![0.4; 500]).unwrap();
    assert_eq!(net.m(), m);
    let grid = TimeGrid::uniform(30.0, 61).unwrap();
    let (curve, _) = solve_onesided_circle(&net, &grid).unwrap();
    let mut sup = 0.0f64;
    for (i, &t) in grid.points().iter().enumerate() {
        let reference = f_1d(t, 0.1, 0.4).unwrap();
        sup = sup.max((curve.values()[i] - reference).abs());
    }
    println!("c4: sup gap vs infinite-circle form {sup:.2e}");
}

fn c5_families(m: usize) -> Vec<(&'static str, MildHetSpec)> {
    let mut rng = ChaCha12Rng::seed_from_u64(4000 + m as u64);
    let mut draws = |lo: f64, hi: f64| -> Vec<f64> {
        (0..m).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect()
    };
    let p_het = draws(0.05, 0.45);
    let q_uniform = vec![0.4; m];
    let p_uniform = vec![0.15; m];
    let q_het = draws(0.2, 0.8);
    let p_corr = draws(0.05, 0.45);
    let q_corr: Vec<f64> = p_corr.iter().map(|&p| 1.2 * p + 0.05).collect();
    vec![
        ("p-het", MildHetSpec::new(p_het, q_uniform).unwrap()),
        ("q-het", MildHetSpec::new(p_uniform, q_het).unwrap()),
        ("correlated", MildHetSpec::new(p_corr, q_corr).unwrap()),
    ]
}

#[test]
fn c5_check() {
    let grid = TimeGrid::uniform(15.0, 31).unwrap();
    let tau_grid = TimeGrid::uniform(15.0, 31).unwrap();
    for m in 3..=6 {
        for (name, spec) in c5_families(m) {
            let het = build_complete(&spec);
            let hom = het.homogeneous_counterpart().unwrap();
            let (f_het, _) = solve_general_master_auto(&het, &grid).unwrap();
            let (f_hom, _) = solve_general_master_auto(&hom, &grid).unwrap();
            let min_gap = f_hom.values()[1..]
                .iter()
                .zip(&f_het.values()[1..])
                .map(|(h, e)| h - e)
                .fold(f64::INFINITY, f64::min);
            let cdf_het = bruteforce_interadoption_cdfs(&het, &tau_grid).unwrap();
            let cdf_hom = bruteforce_interadoption_cdfs(&hom, &tau_grid).unwrap();
            let verdict = check_cdf_dominance(&cdf_het, &cdf_hom, 1.0e-12).unwrap();
            let f1_gap = max_abs_diff(cdf_het[0].values(), cdf_hom[0].values());
            let later_strict = (1..m)
                .map(|k| {
                    cdf_hom[k]
                        .values()
                        .iter()
                        .zip(cdf_het[k].values())
                        .map(|(h, e)| h - e)
                        .fold(f64::NEG_INFINITY, f64::max)
                })
                .fold(f64::INFINITY, f64::min);
            println!(
                "c5 m = {m} {name}: min master gap {min_gap:+.3e}, cdf verdict {:?}, F1 gap {f1_gap:.1e}, min over k>=2 of max strictness {later_strict:+.3e}",
                verdict.relation
            );
        }
    }
}

#[test]
fn c7_check() {
    let mut previous = 0.0f64;
    let mut flips = Vec::new();
    for i in 1..=600 {
        let t = i as f64 * 0.1;
        let a = f_complete_m2(t, 0.2, 0.2, 0.15, 0.15).unwrap();
        let b = f_complete_m2(t, 0.25, 0.15, 0.3, 0.0).unwrap();
        let d = a - b;
        if i > 1 && d.signum() != previous.signum() {
            flips.push(t);
        }
        previous = d;
    }
    let first = f_complete_m2(0.1, 0.2, 0.2, 0.15, 0.15).unwrap()
        - f_complete_m2(0.1, 0.25, 0.15, 0.3, 0.0).unwrap();
    let last = f_complete_m2(60.0, 0.2, 0.2, 0.15, 0.15).unwrap()
        - f_complete_m2(60.0, 0.25, 0.15, 0.3, 0.0).unwrap();
    println!("c7: d(0.1) = {first:+.3e}, d(60) = {last:+.3e}, sign flips at {flips:?}");
}

#[test]
fn c8_scan() {
    let grid = derivative_grid();
    let mut worst_d1 = 0.0f64;
    let mut worst_d2 = 0.0f64;
    let mut worst_d3 = 0.0f64;

    for idx in 0..20u64 {
        let m = 2 + (idx % 7) as usize;
        let net = random_network(m, 8000 + idx);
        let formulas = derivatives_general(&net);
        let (values, _) = solve_for_extraction(&net, &grid);
        let (d1, d2, _) = extract_initial_derivatives(&values);
        worst_d1 = worst_d1.max(((d1 - formulas.d1) / formulas.d1).abs());
        worst_d2 = worst_d2.max(((d2 - formulas.d2) / formulas.d2).abs());
    }
    println!("c8 general: worst rel d1 {worst_d1:.2e}, d2 {worst_d2:.2e}");

    worst_d1 = 0.0;
    worst_d2 = 0.0;
    for idx in 0..20u64 {
        let m = 3 + (idx % 6) as usize;
        let mut rng = ChaCha12Rng::seed_from_u64(8100 + idx);
        let p = 0.05 + 0.3 * rng.random::<f64>();
        let q_node: Vec<f64> = (0..m).map(|_| 0.2 + 0.6 * rng.random::<f64>()).collect();
        let spec = MildHetSpec::new(vec![p; m], q_node.clone()).unwrap();
        let formulas = derivatives_mild_het(&spec);
        let net = build_complete(&spec);
        let (values, _) = solve_for_extraction(&net, &grid);
        let (d1, d2, d3) = extract_initial_derivatives(&values);
        worst_d1 = worst_d1.max(((d1 - formulas.d1) / formulas.d1).abs());
        worst_d2 = worst_d2.max(((d2 - formulas.d2) / formulas.d2).abs());
        let f3 = formulas.d3.unwrap();
        worst_d3 = worst_d3.max(((d3 - f3) / f3).abs());

        let hom = MildHetSpec::uniform(m, p, q_node.iter().sum::<f64>() / m as f64).unwrap();
        let hom_formulas = derivatives_mild_het(&hom);
        let qbar = q_node.iter().sum::<f64>() / m as f64;
        let var_q = q_node.iter().map(|&q| (q - qbar) * (q - qbar)).sum::<f64>() / m as f64;
        let identity = p * (2.0 * m as f64 - 3.0) / ((m as f64 - 1.0) * (m as f64 - 1.0)) * var_q;
        let gap = hom_formulas.d3.unwrap() - f3;
        assert!(
            (gap - identity).abs() < 1.0e-10,
            "d3 identity off by {:.2e}",
            (gap - identity).abs()
        );
    }
    println!("c8 mild-het: worst rel d1 {worst_d1:.2e}, d2 {worst_d2:.2e}, d3 {worst_d3:.2e}");

    worst_d1 = 0.0;
    worst_d2 = 0.0;
    worst_d3 = 0.0;
    let combos: Vec<(usize, usize)> = (3..=16)
        .map(|side| (1usize, side))
        .chain([(2, 3), (2, 4)])
        .collect();
    for (idx, &(dim, side)) in combos.iter().cycle().take(20).enumerate() {
        let mut rng = ChaCha12Rng::seed_from_u64(8200 + idx as u64);
        let p = 0.05 + 0.3 * rng.random::<f64>();
        let q = 0.2 + 0.6 * rng.random::<f64>();
        let formulas = derivatives_cartesian(dim, p, q).unwrap();
        let net = build_cartesian_torus(dim, side, p, q).unwrap();
        let (values, _) = solve_for_extraction(&net, &grid);
        let (d1, d2, d3) = extract_initial_derivatives(&values);
        worst_d1 = worst_d1.max(((d1 - formulas.d1) / formulas.d1).abs());
        worst_d2 = worst_d2.max(((d2 - formulas.d2) / formulas.d2).abs());
        let f3 = formulas.d3.unwrap();
        worst_d3 = worst_d3.max(((d3 - f3) / f3).abs());
    }
    println!("c8 cartesian: worst rel d1 {worst_d1:.2e}, d2 {worst_d2:.2e}, d3 {worst_d3:.2e}");

    for idx in 0..20u64 {
        let m = 3 + (idx % 6) as usize;
        let mut rng = ChaCha12Rng::seed_from_u64(8300 + idx);
        let p_vec: Vec<f64> = (0..m).map(|_| 0.05 + 0.4 * rng.random::<f64>()).collect();
        let q = 0.2 + 0.5 * rng.random::<f64>();
        let spec = MildHetSpec::new(p_vec.clone(), vec![q; m]).unwrap();
        let het = build_complete(&spec);
        let hom = het.homogeneous_counterpart().unwrap();
        let pbar = p_vec.iter().sum::<f64>() / m as f64;
        let var_p = p_vec.iter().map(|&p| (p - pbar) * (p - pbar)).sum::<f64>() / m as f64;
        let gap = derivatives_general(&hom).d2 - derivatives_general(&het).d2;
        assert!(
            (gap - var_p).abs() < 1.0e-10,
            "d2 identity off by {:.2e}",
            (gap - var_p).abs()
        );
    }
    println!("c8 identities: all within 1e-10");
}

#[test]
fn c9_check() {
    let p = 0.11;
    let q = 0.47;
    let limit = cartesian_d3_limit(p, q);
    let mut previous = f64::NEG_INFINITY;
    for dim in 1..=6 {
        let d3 = derivatives_cartesian(dim, p, q).unwrap().d3.unwrap();
        let gap = limit - d3;
        let formula = p * q * q / dim as f64;
        println!(
            "c9 D = {dim}: d3 = {d3:.12}, increasing = {}, |gap - pq^2/D| = {:.2e}",
            d3 > previous,
            (gap - formula).abs()
        );
        previous = d3;
    }
}

fn placement_circle(m: usize, arrangement: &str, p1: f64, p2: f64, q: f64) -> Network {
    let p: Vec<f64> = match arrangement {
        "blocks" => (0..m).map(|i| if i < m / 2 { p1 } else { p2 }).collect(),
        _ => (0..m).map(|i| if i % 2 == 0 { p1 } else { p2 }).collect(),
    };
    build_one_sided_circle(p, vec![q; m]).unwrap()
}

fn third_circle(m: usize, arrangement: &str, rates: [f64; 3], q: f64) -> Network {
    let p: Vec<f64> = match arrangement {
        "thirds" => (0..m).map(|i| rates[i / (m / 3)]).collect(),
        "weak-by-middle" => (0..m).map(|i| rates[i % 3]).collect(),
        _ => (0..m)
            .map(|i| rates[match i % 3 {
                0 => 0,
                1 => 2,
                _ => 1,
            }])
            .collect(),
    };
    build_one_sided_circle(p, vec![q; m]).unwrap()
}

#[test]
fn c10_scan() {
    let grid = TimeGrid::uniform(25.0, 26).unwrap();
    let (blocks_limit, alternating_limit) =
        solve_block_and_alternating_circles(&grid, 0.4, 0.1, 0.2).unwrap();
    for base in 1u64..=5 {
        let mut worst = 0.0f64;
        for (arrangement, limit) in [
            ("blocks", &blocks_limit),
            ("alternating", &alternating_limit),
        ] {
            let net = placement_circle(1000, arrangement, 0.4, 0.1, 0.2);
            let mc = estimate_adoption_curve(&net, &grid, 1000, base.wrapping_mul(7919));
            let ci = mc.ci_half_width().unwrap();
            for i in 1..grid.len() {
                let se = ci[i] / 1.959_963_984_540_054;
                if se == 0.0 {
                    continue;
                }
                let z = (mc.values()[i] - limit.values()[i]).abs() / se;
                worst = worst.max(z);
            }
        }
        println!("c10 pair base {base}: worst z = {worst:.2}");
    }

    let times = TimeGrid::from_points(vec![0.0, 3.0, 6.0, 10.0, 15.0]).unwrap();
    for base in 1u64..=3 {
        let n = 4000;
        let curves: Vec<_> = ["thirds", "weak-by-middle", "weak-by-strong"]
            .iter()
            .enumerate()
            .map(|(k, arrangement)| {
                let net = third_circle(900, arrangement, [0.5, 0.2, 0.01], 0.2);
                estimate_adoption_curve(
                    &net,
                    &times,
                    n,
                    base.wrapping_mul(104_729).wrapping_add(k as u64),
                )
            })
            .collect();
        let mut min_ratio = f64::INFINITY;
        for i in 1..times.len() {
            for pair in curves.windows(2) {
                let gap = pair[1].values()[i] - pair[0].values()[i];
                let se = |c: &bassnet_core::AdoptionCurve| {
                    c.ci_half_width().unwrap()[i] / 1.959_963_984_540_054
                };
                min_ratio = min_ratio.min(gap / se(&pair[0]).hypot(se(&pair[1])));
            }
        }
        println!("c10 three-circle base {base}: min gap/hypot(se) = {min_ratio:.1}");
    }
}

#[test]
fn c11_scan() {
    let m = 1000usize;
    let h = {
        let mut rng = ChaCha12Rng::seed_from_u64(2026);
        let mut draws = Vec::with_capacity(m);
        while draws.len() < m {
            let z: f64 = (0..12).map(|_| rng.random::<f64>()).sum::<f64>() - 6.0;
            if z.abs() <= 1.9 {
                draws.push(z);
            }
        }
        let mean = draws.iter().sum::<f64>() / m as f64;
        draws.iter().map(|z| z - mean).collect::<Vec<f64>>()
    };
    let grid = TimeGrid::from_points(vec![0.0, 15.0]).unwrap();
    let epsilons: Vec<f64> = (1..=10).map(|i| 0.05 * i as f64).collect();
    for base in 1u64..=4 {
        let seed = base.wrapping_mul(60013);
        let hom = build_complete(&MildHetSpec::uniform(m, 0.01, 0.4).unwrap());
        let f0 = estimate_adoption_curve(&hom, &grid, 4000, seed).values()[1];
        let mut ds = Vec::new();
        for &eps in &epsilons {
            let q_node: Vec<f64> = h.iter().map(|&hj| 0.4 * (1.0 + eps * hj)).collect();
            let spec = MildHetSpec::new(vec![0.01; m], q_node).unwrap();
            let net = build_complete(&spec);
            let f_eps = estimate_adoption_curve(&net, &grid, 4000, seed).values()[1];
            ds.push(f_eps - f0);
        }
        let all_negative = ds.iter().all(|&d| d < 0.0);
        let slope = if all_negative {
            let xs: Vec<f64> = epsilons.iter().map(|e| e.ln()).collect();
            let ys: Vec<f64> = ds.iter().map(|d| (-d).ln()).collect();
            let xbar = xs.iter().sum::<f64>() / xs.len() as f64;
            let ybar = ys.iter().sum::<f64>() / ys.len() as f64;
            let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xbar) * (y - ybar)).sum();
            let den: f64 = xs.iter().map(|x| (x - xbar) * (x - xbar)).sum();
            num / den
        } else {
            f64::NAN
        };
        let b = epsilons
            .iter()
            .zip(&ds)
            .map(|(e, d)| e * e * d)
            .sum::<f64>()
            / epsilons.iter().map(|e| e.powi(4)).sum::<f64>();
        println!(
            "c11 base {base}: all negative = {all_negative}, slope = {slope:.3}, b = {b:+.4}, d(0.05) = {:+.2e}, d(0.5) = {:+.2e}",
            ds[0], ds[9]
        );
    }
}

#[test]
fn c6_check() {
    let mut min_above = f64::INFINITY;
    let mut max_equal = 0.0f64;
    let mut min_below = f64::INFINITY;
    for i in 1..=200 {
        let t = 0.1 * i as f64;
        let (het, hom) = bassnet_core::closedform::f_m2_pq_special(t, 0.1, 0.2).unwrap();
        min_above = min_above.min(het - hom);
        let (het, hom) = bassnet_core::closedform::f_m2_pq_special(t, 0.1, 0.1).unwrap();
        max_equal = max_equal.max((het - hom).abs());
        let (het, hom) = bassnet_core::closedform::f_m2_pq_special(t, 0.1, 0.05).unwrap();
        min_below = min_below.min(hom - het);
    }
    println!("c6: min(above) = {min_above:.3e}, max |equal| = {max_equal:.1e}, min(below) = {min_below:.3e}");
}

fn solve_for_extraction(net: &Network, grid: &TimeGrid) -> (Vec<f64>, &'static str) {
    let (curve, _) = solve_general_master_numeric(net, grid, NumericTolerance::strict()).unwrap();
    (curve.values().to_vec(), "numeric")
}
