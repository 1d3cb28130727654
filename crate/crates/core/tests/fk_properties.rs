//! Falicov–Kimball identities on small lattices.

use proptest::prelude::*;
use xxzfk::fk::{
    checkerboard_check, effective_coupling_estimate, electron_free_energy, electron_ground_energy,
    metropolis_ions, pin_111, single_particle_levels, IonConfiguration, McOptions,
};
use xxzfk::lattice::LatticeSpec;

fn neutral(lattice: &LatticeSpec, picks: &[usize]) -> IonConfiguration {
    let n = lattice.site_count();
    let mut order: Vec<usize> = (0..n).collect();
    // Fisher-Yates driven by the strategy's draws
    for (i, &p) in picks.iter().enumerate().take(n - 1) {
        order.swap(i, i + p % (n - i));
    }
    let mut occ = vec![0u8; n];
    for &x in &order[..n / 2] {
        occ[x] = 1;
    }
    IonConfiguration::new(lattice, occ).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn particle_hole_square(picks in prop::collection::vec(0usize..1000, 16), u in 0.5f64..20.0) {
        let l = LatticeSpec::hypercubic(&[4, 4], &[true, true]).unwrap();
        let w = neutral(&l, &picks);
        let a = electron_ground_energy(&l, &w, u, 8).unwrap();
        let b = electron_ground_energy(&l, &w.complement(), u, 8).unwrap();
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn particle_hole_cube(picks in prop::collection::vec(0usize..1000, 8), u in 0.5f64..20.0) {
        let l = LatticeSpec::hypercubic(&[2, 2, 2], &[false, false, false]).unwrap();
        let w = neutral(&l, &picks);
        let a = electron_ground_energy(&l, &w, u, 4).unwrap();
        let b = electron_ground_energy(&l, &w.complement(), u, 4).unwrap();
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn free_energy_envelope(picks in prop::collection::vec(0usize..1000, 16), b1 in 0.1f64..5.0, f in 1.0f64..10.0) {
        let l = LatticeSpec::hypercubic(&[4, 4], &[true, true]).unwrap();
        let w = neutral(&l, &picks);
        let b2 = b1 * f;
        let f1 = electron_free_energy(&l, &w, 8.0, b1, 8.0).unwrap();
        let f2 = electron_free_energy(&l, &w, 8.0, b2, 8.0).unwrap();
        prop_assert!(f1 >= f2 - 16.0 * std::f64::consts::LN_2 / b1);
        prop_assert!(f1 <= f2 + 1e-12);
    }
}

#[test]
fn full_filling_is_the_trace() {
    let l = LatticeSpec::hypercubic(&[3, 4], &[false, true]).unwrap();
    let w = IonConfiguration::parse(&l, "101100111000").unwrap();
    let e = electron_ground_energy(&l, &w, 3.5, 12).unwrap();
    assert!((e - 2.0 * 3.5 * 6.0).abs() < 1e-10);
    assert_eq!(electron_ground_energy(&l, &w, 3.5, 0).unwrap(), 0.0);
    let levels = single_particle_levels(&l, &w, 3.5).unwrap();
    assert!(levels.windows(2).all(|p| p[0] <= p[1]));
}

#[test]
fn periodic_square_selects_the_checkerboards() {
    let l = LatticeSpec::hypercubic(&[4, 4], &[true, true]).unwrap();
    let r = checkerboard_check(&l, 8.0).unwrap();
    assert_eq!(r.configurations, 12870);
    assert!(r.selected);
    assert_eq!(r.argmin.len(), 2);
    assert!((r.checkerboard_energies[0] - r.checkerboard_energies[1]).abs() < 1e-12);
    assert!(r.runner_up.unwrap() > r.min_energy + 1e-6);
}

#[test]
fn coupling_ladder() {
    let l = LatticeSpec::hypercubic(&[8, 8], &[true, true]).unwrap();
    let e8 = effective_coupling_estimate(&l, 8.0).unwrap();
    let e32 = effective_coupling_estimate(&l, 32.0).unwrap();
    assert!((0.8..=1.2).contains(&e32.scaled));
    assert!((e32.scaled - 1.0).abs() < (e8.scaled - 1.0).abs());
    for u in [2.0, 3.0, 5.0, 8.0, 16.0, 32.0] {
        assert!(effective_coupling_estimate(&l, u).unwrap().j_est > 0.0);
    }
}

#[test]
fn pinned_cube_orders_on_both_sides_of_the_plane() {
    let l = LatticeSpec::hypercubic(&[4, 4, 4], &[false, false, false]).unwrap();
    let mut opts = McOptions::new(8.0, 200.0, 300, 17);
    opts.pinning = Some(pin_111(&l, 4));
    let st = metropolis_ions(&l, &opts).unwrap();
    let mut scored = 0;
    let mut agree = 0;
    for x in 0..64 {
        let side: i32 = l.coord(x).iter().sum::<i32>() - 4;
        if st.pinned[x] || side == 0 {
            continue;
        }
        scored += 1;
        if st.mean_s[x].signum() == side.signum() as f64 {
            agree += 1;
        }
    }
    assert_eq!(scored, 5);
    assert!(agree as f64 >= 0.9 * scored as f64, "{agree}/{scored}");
}
