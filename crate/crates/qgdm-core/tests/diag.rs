//! Temporary diagnostic: episode postmortems and payoff-matrix dumps for
//! calibration work. Not part of the shipped test suite.

use qgdm_core::game::{
    epd_distribution, expected_utilities, find_pure_nash, find_strictly_dominant,
};
use qgdm_core::payoff::{build_game, PayoffWeights, Scene};
use qgdm_core::policy::{DecisionConfig, Policy, PolicyKind};
use qgdm_core::sim::{
    init_scenario, player_setup, run_episode, ActionMagnitudes, DecisionPolicy,
    EpisodeOptions, Outcome, ScenarioKind, ScenarioSpec,
};

fn cal_weights() -> PayoffWeights {
    PayoffWeights {
        w_safety: 0.8,
        w_comfort: 0.05,
        w_efficiency: 0.15,
        horizon: 4.0,
        ttc_floor: 4.0,
        accel_comfort_limit: 3.0,
    }
}

fn cal_mags() -> ActionMagnitudes {
    ActionMagnitudes { accelerate: 2.0, decelerate: -2.5, ..Default::default() }
}

fn cal_spec() -> ScenarioSpec {
    let mut spec = ScenarioSpec::default_for(ScenarioKind::RoundaboutThreeP);
    spec.timeout = 60.0;
    spec.ego_s = [5.0, 25.0];
    spec.ego_speed = [3.0, 6.0];
    spec.ego_v_desired = 7.0;
    spec.iv_s = vec![[6.0, 40.0], [95.0, 122.0]];
    spec.iv_speed = [3.0, 7.0];
    spec.iv_v_desired = 7.0;
    spec.min_spacing = 10.0;
    spec
}

fn cal_config() -> DecisionConfig {
    DecisionConfig { weights: cal_weights(), magnitudes: cal_mags(), ..Default::default() }
}

#[test]
#[ignore]
fn episode_postmortem() {
    let spec = cal_spec();
    let opts = EpisodeOptions {
        trace: true,
        record_latency: false,
        magnitudes: cal_mags(),
        ..Default::default()
    };
    for kind in [PolicyKind::CgEpd, PolicyKind::QgdmU, PolicyKind::Utility] {
        let policy = Policy::new(kind, cal_config());
        let mut tally: std::collections::BTreeMap<String, usize> = Default::default();
        let mut examples: Vec<String> = vec![];
        for episode in 0..300 {
            let r = run_episode(&policy, &spec, 11, episode, &opts).unwrap();
            let last = r.trace.last().unwrap();
            let key = match r.outcome {
                Outcome::Success => "success".to_string(),
                Outcome::Timeout => "timeout".to_string(),
                Outcome::Stuck => format!("stuck @s{:.0}", (last.ego.s / 20.0).floor() * 20.0),
                Outcome::Collision => {
                    let zone = if last.ego.s < 43.0 {
                        "approach"
                    } else if last.ego.s < 60.0 {
                        "entry"
                    } else if last.ego.s < 108.0 {
                        "ring"
                    } else {
                        "exit"
                    };
                    let partner = r
                        .collision
                        .map(|(a, b)| if a.0 == 0 { b.0 } else { a.0 })
                        .unwrap_or(99);
                    if examples.len() < 12 {
                        examples.push(format!(
                            "ep{} {} iv{partner} s{:.0} v{:.1} t{:.0} {}",
                            episode, zone, last.ego.s, last.ego.speed, r.duration, last.action
                        ));
                    }
                    format!(
                        "collision:{zone} iv{partner} {}",
                        if last.ego.speed < 1.0 { "stopped" } else { "moving" }
                    )
                }
            };
            *tally.entry(key).or_default() += 1;
        }
        println!("--- {kind:?} ---");
        for (k, v) in &tally {
            println!("  {k}: {v}");
        }
        for e in &examples {
            println!("    {e}");
        }
    }
}

fn dump(world: &qgdm_core::sim::WorldState, kind: ScenarioKind, label: &str) {
    let setup = player_setup(kind, world);
    let scene = Scene::capture(world, &setup.players);
    let weights = cal_weights();
    let mags = cal_mags();
    let game = build_game(&scene, &setup.action_sets, &weights, &mags);
    println!("=== {label} ===");
    for (i, v) in world.vehicles.iter().enumerate() {
        println!(
            "  vehicle {i}: path {} s {:.1} v {:.1} accel {:.1}",
            v.path, v.s, v.speed, v.accel
        );
    }
    println!("  action sets: {:?}", setup.action_sets);
    let counts: Vec<usize> = setup.action_sets.iter().map(|s| s.len()).collect();
    let n: usize = counts.iter().product();
    for flat in 0..n {
        let mut profile = vec![];
        let mut rem = flat;
        for p in (0..counts.len()).rev() {
            profile.push(rem % counts[p]);
            rem /= counts[p];
        }
        profile.reverse();
        let us: Vec<String> =
            (0..counts.len()).map(|p| format!("{:.3}", game.utility_at(p, flat))).collect();
        println!("  profile {profile:?}: {}", us.join(" / "));
    }
    println!("  ego dominant: {:?}", find_strictly_dominant(&game, 0));
    let nash = find_pure_nash(&game);
    println!("  pure NE: {:?}", nash.iter().map(|p| p.actions().to_vec()).collect::<Vec<_>>());
    let eu = expected_utilities(&game, 0, &epd_distribution(&game));
    println!("  ego EPD EU: {eu:?}");
    for kind_p in
        [PolicyKind::CgEpd, PolicyKind::CgNe, PolicyKind::QgdmU, PolicyKind::QgdmG, PolicyKind::Utility]
    {
        let policy = Policy::new(kind_p, cal_config());
        let d = policy.decide(world, &setup);
        println!("  {kind_p:?} -> {:?}", d.action);
    }
}

#[test]
#[ignore]
fn mouth_conflict_matrix() {
    let spec = cal_spec();
    let mut world = init_scenario(&spec, 5, 0).unwrap();
    // Ego 12 m short of the joint at 6 m/s; IV2 13.7 m of ring short of
    // the joint at 7; IV1 well downstream.
    let ids: Vec<_> = world.vehicles.iter().map(|v| v.id).collect();
    let ego = world.ego;
    world.vehicle_mut(ego).s = 38.0;
    world.vehicle_mut(ego).speed = 6.0;
    let iv1 = ids.iter().copied().find(|&i| i != ego).unwrap();
    let iv2 = ids.iter().copied().rfind(|&i| i != ego && i != iv1).unwrap();
    world.vehicle_mut(iv1).s = 30.0;
    world.vehicle_mut(iv1).speed = 6.0;
    world.vehicle_mut(iv2).s = 112.0;
    world.vehicle_mut(iv2).speed = 7.0;
    dump(&world, ScenarioKind::RoundaboutThreeP, "mouth race, IV1 downstream");

    // Same but IV1 close downstream: insertion lands right behind it.
    world.vehicle_mut(iv1).s = 10.0;
    world.vehicle_mut(iv1).speed = 4.0;
    dump(&world, ScenarioKind::RoundaboutThreeP, "mouth race, IV1 close & slow");

    // Ring following after insertion: walker 14 m ahead, slower.
    world.vehicle_mut(ego).s = 60.0;
    world.vehicle_mut(ego).speed = 8.0;
    world.vehicle_mut(iv1).s = 24.0;
    world.vehicle_mut(iv1).speed = 4.0;
    world.vehicle_mut(iv2).s = 60.0;
    world.vehicle_mut(iv2).speed = 6.0;
    dump(&world, ScenarioKind::RoundaboutThreeP, "ring following, 14 m gap");
}

#[test]
#[ignore]
fn fatal_rounds() {
    let spec = cal_spec();
    let opts = EpisodeOptions {
        trace: true,
        record_latency: false,
        magnitudes: cal_mags(),
        ..Default::default()
    };
    for kind in [PolicyKind::QgdmU, PolicyKind::CgEpd] {
        println!("=== {kind:?} ===");
        let policy = Policy::new(kind, cal_config());
        let mut shown = 0;
        for episode in 0..300u64 {
            if shown >= 6 {
                break;
            }
            let r = run_episode(&policy, &spec, 11, episode, &opts).unwrap();
            if r.outcome != Outcome::Collision {
                continue;
            }
            shown += 1;
            let partner = r
                .collision
                .map(|(a, b)| if a.0 == 0 { b.0 } else { a.0 })
                .unwrap_or(99);
            println!("-- ep{episode} dies t={:.1} with iv{partner}", r.duration);
            for rec in r.trace.iter().rev().take(4).rev() {
                let step = if rec.distribution.is_some() { "step3" } else { "step1/2" };
                print!(
                    "  t={:>4.1} s={:>5.1} v={:>4.1} {:<10} {:7}",
                    rec.t, rec.ego.s, rec.ego.speed, rec.action, step
                );
                if let Some(p) = &rec.payoffs {
                    print!(" u0=[");
                    for (i, v) in p[0].iter().enumerate() {
                        if i == p[0].len() / 2 {
                            print!("| ");
                        }
                        print!("{v:.2} ");
                    }
                    print!("]");
                }
                println!();
            }
        }
    }
}
