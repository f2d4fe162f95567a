use ralp::room::{build_room_domain, Variant};
use ralp::sampling::{draw_samples, SamplingPlan};
use ralp::{Distribution, TabularMdp};

fn ring(n: usize) -> TabularMdp {
    let transitions = (0..2 * n)
        .map(|k| {
            let (s, a) = (k / 2, k % 2);
            vec![(if a == 0 { (s + 1) % n } else { (s + n - 1) % n }, 1.0)]
        })
        .collect();
    TabularMdp::new(n, 2, transitions, vec![0.0; n], 0.9, vec![true; 2 * n]).unwrap()
}

#[test]
fn uniform_state_frequencies_within_three_sigma() {
    let n = 25;
    let draws = 100_000;
    let m = ring(n);
    let s = draw_samples(&m, &SamplingPlan::new(Distribution::uniform(n), draws, 7)).unwrap();
    let mut counts = vec![0usize; n];
    let mut actions = [0usize; 2];
    for x in s.samples() {
        counts[x.state] += 1;
        actions[x.action] += 1;
    }
    let p = 1.0 / n as f64;
    let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
    for (st, &c) in counts.iter().enumerate() {
        assert!((c as f64 - draws as f64 * p).abs() <= 3.0 * sigma, "state {st}: {c}");
    }
    let half_sigma = (draws as f64 * 0.25).sqrt();
    assert!((actions[0] as f64 - draws as f64 / 2.0).abs() <= 3.0 * half_sigma);
}

#[test]
fn samples_respect_allowed_actions_and_dynamics() {
    let d = build_room_domain(Variant::Stable);
    let s = draw_samples(&d.mdp, &SamplingPlan::new(Distribution::uniform(d.n_states()), 5_000, 11)).unwrap();
    s.check_against(&d.mdp).unwrap();
    for x in s.samples() {
        assert!(d.mdp.is_allowed(x.state, x.action));
        assert_eq!(x.next_state, d.next_state(x.state, x.action));
        assert_eq!(x.reward, d.mdp.reward(x.state));
    }
}

#[test]
fn point_distribution_only_draws_its_state() {
    let m = ring(5);
    let s = draw_samples(&m, &SamplingPlan::new(Distribution::point(5, 3), 200, 1)).unwrap();
    assert!(s.samples().iter().all(|x| x.state == 3));
}
