use revmeas_core::discord::{minimize_conditional_entropy, Family, Theorem1Report};
use revmeas_core::state::random_state;
use revmeas_core::BipartiteState;

const TOL: f64 = 2e-3;

#[test]
fn sandwich_gap_and_scaled_correlation_hold() {
    let a_grid: Vec<f64> = (1..=9).map(|k| 0.05 * k as f64).collect();
    for seed in 0..12u64 {
        let rank = 1 + (seed % 4) as usize;
        let st = BipartiteState::new(random_state(4, rank, 77 + seed).unwrap(), 2, 2).unwrap();
        let vn = minimize_conditional_entropy(&st, Family::VonNeumann, 4, seed).unwrap();
        for &a in &a_grid {
            let rev = minimize_conditional_entropy(&st, Family::Reversible { a }, 4, seed).unwrap();
            let r = Theorem1Report::from_optima(&st, &vn, &rev, TOL).unwrap();
            assert!(r.lower_ok && r.upper_ok && r.gap_ok, "seed {seed}, a {a}: {r:?}");
            assert!(r.d_u >= r.d_vn - TOL);
            let na = 2.0 * a;
            assert!(r.j_u / (1.0 - na) <= r.j_vn + TOL);
            assert!(r.d_vn >= -TOL);
        }
    }
}

#[test]
fn reversible_discord_approaches_von_neumann_as_mixing_vanishes() {
    for seed in 0..5u64 {
        let st = BipartiteState::new(random_state(4, 4, 300 + seed).unwrap(), 2, 2).unwrap();
        let vn = minimize_conditional_entropy(&st, Family::VonNeumann, 2, seed).unwrap();
        let rev = minimize_conditional_entropy(&st, Family::Reversible { a: 1e-6 }, 2, seed).unwrap();
        let r = Theorem1Report::from_optima(&st, &vn, &rev, TOL).unwrap();
        assert!((r.d_u - r.d_vn).abs() <= 5e-3);
    }
}

#[test]
fn qutrit_sandwich_holds() {
    for seed in 0..3u64 {
        let st = BipartiteState::new(random_state(6, 6, 900 + seed).unwrap(), 3, 2).unwrap();
        let vn = minimize_conditional_entropy(&st, Family::VonNeumann, 6, seed).unwrap();
        for a in [0.05, 0.15, 0.3] {
            let rev = minimize_conditional_entropy(&st, Family::Reversible { a }, 6, seed).unwrap();
            let r = Theorem1Report::from_optima(&st, &vn, &rev, TOL).unwrap();
            assert!(r.all_ok(), "seed {seed}, a {a}: {r:?}");
        }
    }
}
