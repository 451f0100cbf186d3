mod common;

use farmcover::aco::{construct_tour, solve, solve_observed, AcoParams, InvalidReason, PheromoneMatrix};
use farmcover::energy::{is_valid_tour, tour_cost, EnergyModel};
use farmcover::world::{generate_waypoints, load_map, reference_farm, FarmMap};
use farmcover::{RouteGraph, Variant};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn graph(map: &FarmMap) -> RouteGraph {
    RouteGraph::build(map, &generate_waypoints(map), 0).unwrap()
}

/// Home can reach exactly one waypoint, so no closed tour visits each
/// waypoint once.
fn single_exit_map() -> FarmMap {
    load_map(
        r#"{"perimeter": {"min": [0, 0], "max": [150, 76]},
            "obstacles": [
                {"type": "rect", "min": [120, 0], "max": [125, 30]},
                {"type": "rect", "min": [120, 46], "max": [125, 76]},
                {"type": "rect", "min": [100, 20], "max": [105, 56]}],
            "stations": [[140, 38]], "clearance_m": 2, "grid_spacing_m": 38}"#,
    )
    .unwrap()
}

/// Best tour over every visiting order; legs missing from the graph
/// disqualify an order.
fn brute_force_optimum(g: &RouteGraph, m: &EnergyModel) -> f64 {
    let ids: Vec<usize> = (0..g.waypoint_count()).collect();
    common::permutations(&ids)
        .into_iter()
        .filter_map(|perm| {
            let mut nodes = vec![g.home()];
            nodes.extend(perm.iter().map(|&i| g.id(i)));
            nodes.push(g.home());
            tour_cost(g, m, &nodes).ok().map(|t| t.cost_kj)
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn first_step_is_uniform_without_heuristic() {
    let map = load_map(
        r#"{"perimeter": {"min": [0, 0], "max": [76, 10]}, "obstacles": [],
            "stations": [[38, 8]], "clearance_m": 5, "grid_spacing_m": 38}"#,
    )
    .unwrap();
    let g = graph(&map);
    assert_eq!((g.len(), g.edge_count()), (4, 6));
    let mut params = AcoParams::ant_system(0);
    params.beta = 0.0;
    let tau = PheromoneMatrix::uniform(&g, 1.0);
    let m = EnergyModel::default();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut counts = [0usize; 3];
    let n = 10_000;
    for _ in 0..n {
        let c = construct_tour(&g, &m, &tau, &params, &mut rng);
        counts[c.tour.nodes[1].index] += 1;
    }
    for c in counts {
        let f = c as f64 / n as f64;
        assert!((f - 1.0 / 3.0).abs() < 0.02, "{counts:?}");
    }
}

#[test]
fn unreturnable_home_never_yields_valid_tour() {
    let map = single_exit_map();
    let g = graph(&map);
    let home = g.home().index;
    assert_eq!(g.neighbors(home).len(), 1);
    assert!(g.waypoint_count() > 1);

    let m = EnergyModel::default();
    for variant in [Variant::AntSystem, Variant::MaxMin] {
        let mut p = AcoParams::new(variant, 5);
        p.n_iterations = 30;
        let run = solve_observed(&g, &m, &p, |ev| {
            assert!(ev.ants.iter().all(|a| !a.valid));
            if variant == Variant::AntSystem {
                // nothing valid, so trails only evaporate
                assert_eq!(ev.deposited, 0.0);
                for (i, j, _) in g.edges() {
                    let want = (1.0 - ev.rho) * ev.previous.get(i, j);
                    assert!((ev.pheromone.get(i, j) - want).abs() <= 1e-12 * want.max(1.0));
                }
            }
        })
        .unwrap();
        assert!(!run.valid);
        assert!(!run.best_tour.is_valid);
        assert!(run.best_cost_history.iter().all(Option::is_none));
        assert!(matches!(
            run.failure,
            Some(InvalidReason::MissingReturn) | Some(InvalidReason::DeadEnd)
        ));
    }
}

#[test]
fn small_instances_reach_brute_force_optimum() {
    let m = EnergyModel::default();
    let mut maps = vec![load_map(
        r#"{"perimeter": {"min": [0, 0], "max": [76, 40]},
            "obstacles": [{"type": "rect", "min": [34, -6], "max": [42, 16]}],
            "stations": [[60, 30]], "clearance_m": 5, "grid_spacing_m": 38}"#,
    )
    .unwrap()];
    let mut r = common::rng(8);
    while maps.len() < 6 {
        let map = common::random_open_map(&mut r, 6);
        if generate_waypoints(&map).valid_count() >= 4 {
            maps.push(map);
        }
    }
    for (k, map) in maps.iter().enumerate() {
        let g = graph(map);
        let best = brute_force_optimum(&g, &m);
        for variant in [Variant::AntSystem, Variant::MaxMin] {
            let mut p = AcoParams::new(variant, 40 + k as u64);
            p.n_ants = Some(20);
            p.n_iterations = 200;
            let run = solve(&g, &m, &p).unwrap();
            assert!(run.valid);
            assert!(
                (run.best_tour.cost_kj - best).abs() < 1e-9,
                "map {k} {variant:?}: {} vs {best}",
                run.best_tour.cost_kj
            );
        }
    }
}

#[test]
fn mmas_trails_stay_clamped() {
    let map = reference_farm();
    let g = graph(&map);
    let mut p = AcoParams::max_min(3);
    p.n_iterations = 40;
    p.n_ants = Some(15);
    let mut seen = 0;
    let mut last_hi = f64::INFINITY;
    solve_observed(&g, &EnergyModel::default(), &p, |ev| {
        let (lo, hi) = ev.bounds.unwrap();
        assert!(lo > 0.0 && lo < hi);
        assert!((hi / lo - 2.0 * g.len() as f64).abs() < 1e-9);
        // the best cost only falls, so the ceiling only rises
        assert!(hi >= last_hi || last_hi.is_infinite());
        last_hi = hi;
        for v in ev.pheromone.edge_values(&g) {
            assert!(v >= lo && v <= hi, "{v} outside [{lo}, {hi}]");
        }
        seen += 1;
    })
    .unwrap();
    assert_eq!(seen, 40);
}

#[test]
fn ant_system_deposit_is_conserved() {
    let map = reference_farm();
    let g = graph(&map);
    let mut p = AcoParams::ant_system(11);
    p.n_iterations = 25;
    p.n_ants = Some(12);
    p.q_deposit = Some(50.0);
    let q = 50.0;
    let mut valid_ants = 0;
    solve_observed(&g, &EnergyModel::default(), &p, |ev| {
        let added: f64 = g
            .edges()
            .map(|(i, j, _)| ev.pheromone.get(i, j) - (1.0 - ev.rho) * ev.previous.get(i, j))
            .sum();
        let expected: f64 = ev
            .ants
            .iter()
            .filter(|a| a.valid)
            .map(|a| q / a.cost_kj * a.legs as f64)
            .sum();
        valid_ants += ev.ants.iter().filter(|a| a.valid).count();
        assert!((added - ev.deposited).abs() < 1e-9 * ev.deposited.max(1.0));
        assert!((ev.deposited - expected).abs() < 1e-9 * expected.max(1.0));
    })
    .unwrap();
    assert!(valid_ants > 0);
}

#[test]
fn history_is_monotone_and_tour_well_formed() {
    let map = reference_farm();
    let g = graph(&map);
    let m = EnergyModel::default();
    for variant in [Variant::AntSystem, Variant::MaxMin] {
        let mut p = AcoParams::new(variant, 17);
        p.n_iterations = 30;
        let run = solve(&g, &m, &p).unwrap();
        assert_eq!(run.best_cost_history.len(), 30);
        assert_eq!(run.iterations_executed, 30);
        let costs: Vec<f64> = run.best_cost_history.iter().flatten().copied().collect();
        assert!(costs.windows(2).all(|w| w[1] <= w[0]));
        assert!(run.valid);
        assert_eq!(*costs.last().unwrap(), run.best_tour.cost_kj);
        assert!(is_valid_tour(&g, &run.best_tour.nodes));
        assert_eq!(run.best_tour.nodes.len(), g.waypoint_count() + 2);
        let again = tour_cost(&g, &m, &run.best_tour.nodes).unwrap();
        assert_eq!(again, run.best_tour);
    }
}

#[test]
fn seeds_drive_the_search() {
    let map = reference_farm();
    let g = graph(&map);
    let m = EnergyModel::default();
    let mut p = AcoParams::ant_system(0);
    p.n_iterations = 10;
    p.n_ants = Some(10);
    let tours: Vec<_> = (0..5)
        .map(|s| {
            p.seed = s;
            solve(&g, &m, &p).unwrap().best_tour.nodes
        })
        .collect();
    for a in 0..tours.len() {
        for b in a + 1..tours.len() {
            assert_ne!(tours[a], tours[b], "seeds {a} and {b}");
        }
    }
    p.seed = 3;
    assert_eq!(solve(&g, &m, &p).unwrap(), solve(&g, &m, &p).unwrap());
}

#[test]
fn bad_parameters_rejected() {
    let map = reference_farm();
    let g = graph(&map);
    let m = EnergyModel::default();
    let base = AcoParams::ant_system(0);
    let cases: [fn(&mut AcoParams); 7] = [
        |p| p.rho = 0.0,
        |p| p.rho = 1.5,
        |p| p.alpha = -1.0,
        |p| p.beta = f64::NAN,
        |p| p.n_ants = Some(0),
        |p| p.n_iterations = 0,
        |p| p.q_deposit = Some(0.0),
    ];
    for f in cases {
        let mut p = base;
        f(&mut p);
        assert!(solve(&g, &m, &p).is_err(), "{p:?}");
    }
}
