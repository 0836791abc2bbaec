use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use slaas_core::ga::{
    crossover_pair, elite_indices, evolve_generation, mutate, reproduction_counts, select_actual,
    EvolutionRng,
};
use slaas_core::search::MonteCarloBench;
use slaas_core::traffic::build_request_trace;
use slaas_core::{
    decide, run_horizon, Baseline, DecisionSpace, GaConfig, RequestEvent, RequestTrace,
    ResourceModel, RngStream, ScenarioParams, SimState, SliceSet, StrategyCode,
};

fn unit_pool() -> (ResourceModel, DecisionSpace) {
    let m = ResourceModel::single_resource(1.0, vec![0.3, 0.3], vec![2.0, 1.0]).unwrap();
    let d = DecisionSpace::from_model(&m).1;
    (m, d)
}

prop_compose! {
    fn model()(types in 1usize..=3, resources in 1usize..=2)
              (r in prop::collection::vec(0.0f64..2.0, resources),
               costs in prop::collection::vec(prop::collection::vec(0.1f64..1.0, types), resources),
               u in prop::collection::vec(0.0f64..3.0, types)) -> ResourceModel {
        ResourceModel::new(r, costs, u).unwrap()
    }
}

fn scenario_for(types: usize, rng: &mut ChaCha8Rng) -> ScenarioParams {
    let lambda = (0..types).map(|_| rng.random_range(0.0..3.0)).collect();
    let mu = (0..types).map(|_| rng.random_range(0.5..8.0)).collect();
    ScenarioParams::new(lambda, mu).unwrap()
}

/// Straightforward re-implementation of the period loop: expire, admit in
/// order, then score. Also records every decision entry it consulted.
fn reference_run(
    code: &StrategyCode,
    trace: &RequestTrace,
    dspace: &DecisionSpace,
    model: &ResourceModel,
    consulted: &mut BTreeSet<usize>,
) -> Vec<f64> {
    let types = model.slice_types();
    let mut active: Vec<Vec<u32>> = vec![Vec::new(); types];
    let mut out = Vec::new();
    for period in trace.periods() {
        for lifetimes in active.iter_mut() {
            lifetimes.iter_mut().for_each(|l| *l -= 1);
            lifetimes.retain(|&l| l > 0);
        }
        for ev in period {
            let s = SliceSet::new(active.iter().map(|a| a.len() as u32).collect());
            if let Some(k) = dspace.bit_index(&s, ev.slice_type) {
                consulted.insert(k);
                if code.get(k) {
                    active[ev.slice_type].push(ev.lifetime);
                }
            }
        }
        out.push(
            active
                .iter()
                .zip(model.utilities())
                .map(|(a, u)| a.len() as f64 * u)
                .sum(),
        );
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn simulation_never_leaves_feasible_space(m in model(), seed in any::<u64>()) {
        let (space, dspace) = DecisionSpace::from_model(&m);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let code = StrategyCode::random(&dspace, &mut rng);
        let scenario = scenario_for(m.slice_types(), &mut rng);
        let trace = build_request_trace(&RngStream::new(seed), &scenario, 25).unwrap();
        let mut state = SimState::empty(m.slice_types());
        for period in trace.periods() {
            let u = state.step(period, &code, &dspace, &m).unwrap();
            prop_assert!(space.contains(&state.counts()));
            prop_assert!(m.is_feasible(&state.counts()).unwrap());
            prop_assert!(u >= 0.0);
        }
    }

    #[test]
    fn accepting_a_free_decision_stays_feasible(m in model()) {
        let (space, dspace) = DecisionSpace::from_model(&m);
        for (s, ty) in dspace.entries() {
            prop_assert!(space.contains(&s.incremented(*ty)));
        }
        prop_assert_eq!(space.index_of(&SliceSet::empty(m.slice_types())), Some(0));
        let (again, dagain) = DecisionSpace::from_model(&m);
        prop_assert_eq!(space.states(), again.states());
        prop_assert_eq!(dspace.entries(), dagain.entries());
    }

    #[test]
    fn simulator_matches_reference(m in model(), seed in any::<u64>()) {
        let (_, dspace) = DecisionSpace::from_model(&m);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let code = StrategyCode::random(&dspace, &mut rng);
        let scenario = scenario_for(m.slice_types(), &mut rng);
        let trace = build_request_trace(&RngStream::new(seed), &scenario, 30).unwrap();
        let (utilities, _) = run_horizon(&code, &trace, &SimState::empty(m.slice_types()), &dspace, &m).unwrap();
        let expected = reference_run(&code, &trace, &dspace, &m, &mut BTreeSet::new());
        prop_assert_eq!(utilities.len(), expected.len());
        for (a, b) in utilities.iter().zip(&expected) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn codec_round_trips(seed in any::<u64>(), value in 0u64..4096) {
        let (_, d) = unit_pool();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let code = StrategyCode::random(&d, &mut rng);
        prop_assert_eq!(StrategyCode::parse(&d, &code.to_string()).unwrap(), code.clone());
        let decoded: Vec<bool> = d.entries().iter().map(|(s, ty)| decide(&code, &d, s, *ty).unwrap()).collect();
        prop_assert_eq!(StrategyCode::from_bits(&d, decoded).unwrap(), code);
        let indexed = StrategyCode::from_index(&d, value);
        let back = indexed.bits().iter().fold(0u64, |acc, &b| acc * 2 + b as u64);
        prop_assert_eq!(back, value);
    }

    #[test]
    fn reproduction_counts_fill_budget(
        fitness in prop::collection::vec(0.0f64..10.0, 1..40),
        budget_frac in 0.0f64..=1.0,
    ) {
        let budget = ((fitness.len() as f64 * budget_frac).round() as usize).max(1);
        let counts = reproduction_counts(&fitness, 1e-9, budget);
        prop_assert_eq!(counts.len(), fitness.len());
        prop_assert_eq!(counts.iter().sum::<usize>(), budget);
        let total: f64 = fitness.iter().map(|f| f + 1e-9).sum();
        for (c, f) in counts.iter().zip(&fitness) {
            let share = budget as f64 * (f + 1e-9) / total;
            prop_assert!(*c as f64 >= share.floor() && (*c as f64) <= share.floor() + 1.0);
        }
    }

    #[test]
    fn evolution_preserves_size_elites_and_codebook(
        fitness in prop::collection::vec(0.0f64..6.0, 2..30),
        elite_frac in 0.0f64..1.0,
        seed in any::<u64>(),
    ) {
        let (_, d) = unit_pool();
        let p = fitness.len();
        let elite = ((p as f64 * elite_frac) as usize).min(p - 1);
        let cfg = GaConfig { population_size: p, elite_count: elite, ..GaConfig::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let members: Vec<_> = (0..p).map(|_| StrategyCode::random(&d, &mut rng)).collect();
        let mut evo = EvolutionRng::new(&RngStream::new(seed));
        let next = evolve_generation(&members, &fitness, &cfg, &mut evo).unwrap();
        prop_assert_eq!(next.len(), p);
        for c in &next {
            prop_assert!(c.check_against(&d).is_ok());
        }
        if elite > 0 {
            let best = &members[select_actual(&fitness).unwrap()];
            prop_assert!(next.contains(best));
        }
        for (slot, &i) in elite_indices(&fitness, elite).iter().enumerate() {
            prop_assert_eq!(&next[slot], &members[i]);
        }
    }

    #[test]
    fn crossover_and_mutation_bounds(seed in any::<u64>(), rate in 0.0f64..=1.0, rounds in 0usize..6) {
        let (_, d) = unit_pool();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = StrategyCode::random(&d, &mut rng);
        let b = StrategyCode::random(&d, &mut rng);
        let (x, y) = crossover_pair(&a, &b, rate, &mut rng).unwrap();
        for k in 0..a.len() {
            prop_assert_eq!(a.get(k) as u8 + b.get(k) as u8, x.get(k) as u8 + y.get(k) as u8);
        }
        let m = mutate(&a, rounds, rate, &mut rng);
        prop_assert!(m.hamming(&a) <= rounds);
        prop_assert!(m.count_ones().abs_diff(a.count_ones()) <= rounds);
    }

    #[test]
    fn argmax_ignores_positive_affine_rescaling(
        fitness in prop::collection::vec(0.0f64..10.0, 1..50),
        scale in 0.01f64..100.0,
        shift in -50.0f64..50.0,
    ) {
        let rescaled: Vec<f64> = fitness.iter().map(|f| scale * f + shift).collect();
        prop_assert_eq!(select_actual(&fitness).unwrap(), select_actual(&rescaled).unwrap());
    }

    #[test]
    fn single_type_baselines_ignore_other_traffic(seed in any::<u64>()) {
        let (m, d) = unit_pool();
        let trace = build_request_trace(&RngStream::new(seed), &ScenarioParams::scenario1(), 40).unwrap();
        let start = SimState::empty(2);
        for (baseline, other) in [(Baseline::Conservative, 0), (Baseline::Opportunistic, 1)] {
            let code = baseline.code(&d).unwrap();
            let full = run_horizon(&code, &trace, &start, &d, &m).unwrap();
            let filtered = run_horizon(&code, &trace.without_type(other), &start, &d, &m).unwrap();
            prop_assert_eq!(full, filtered);
        }
    }

    #[test]
    fn slices_earn_for_their_lifetime(ty in 0usize..2, lifetime in 1u32..20, horizon in 1usize..25, at_frac in 0.0f64..1.0) {
        let at = (horizon as f64 * at_frac) as usize;
        let (m, d) = unit_pool();
        let mut periods = vec![Vec::new(); horizon];
        periods[at].push(RequestEvent { slice_type: ty, lifetime, order: 0 });
        let trace = RequestTrace::from_periods(periods);
        let greedy = Baseline::Greedy.code(&d).unwrap();
        let (u, _) = run_horizon(&greedy, &trace, &SimState::empty(2), &d, &m).unwrap();
        let earning = u.iter().filter(|&&x| x > 0.0).count();
        prop_assert_eq!(earning, (lifetime as usize).min(horizon - at));
        prop_assert!(u.iter().all(|&x| x == 0.0 || x == m.utilities()[ty]));
    }

    #[test]
    fn unconsulted_bits_do_not_matter(seed in any::<u64>()) {
        let (m, d) = unit_pool();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scenario = ScenarioParams::new(vec![rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)], vec![2.0, 10.0]).unwrap();
        let bench = MonteCarloBench::new(&scenario, 30, 4, &RngStream::new(seed)).unwrap();
        let code = StrategyCode::random(&d, &mut rng);
        let mut consulted = BTreeSet::new();
        for t in bench.traces() {
            reference_run(&code, t, &d, &m, &mut consulted);
        }
        let mut twin = code.clone();
        for k in (0..d.len()).filter(|k| !consulted.contains(k)) {
            twin.set(k, rng.random_bool(0.5));
        }
        prop_assert_eq!(
            bench.replicate_utilities(&code, &d, &m).unwrap(),
            bench.replicate_utilities(&twin, &d, &m).unwrap()
        );
    }
}
