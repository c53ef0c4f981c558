use jjphotond::metrics::{
    bandwidth, bandwidth_with, efficiency_at, efficiency_curve, half_width_crossings,
    optimal_detection, plateau_estimate, BandwidthScan,
};
use jjphotond::{presets, Error, SimParams, TimeGrid};

fn coarse_baseline() -> SimParams {
    let mut p = presets::baseline();
    p.grid = TimeGrid::new(120.0, 0.05).unwrap();
    p
}

#[test]
fn optimum_is_stable_under_grid_refinement() {
    let p = coarse_baseline();
    let coarse = optimal_detection(&efficiency_curve(&p, 1).unwrap()).unwrap();
    let mut fine_p = p.clone();
    fine_p.grid = TimeGrid::new(120.0, 0.025).unwrap();
    let fine = optimal_detection(&efficiency_curve(&fine_p, 1).unwrap()).unwrap();
    assert!((coarse.t_d - fine.t_d).abs() < p.grid.stride);
    assert!((coarse.eta_max - fine.eta_max).abs() < 1e-4);
}

#[test]
fn optimum_lies_below_plateau_and_matches_pointwise_value() {
    let p = coarse_baseline();
    let curve = efficiency_curve(&p, 1).unwrap();
    let opt = optimal_detection(&curve).unwrap();
    assert!(opt.eta_max < plateau_estimate(&p).unwrap());
    let t = curve.times[opt.index];
    let direct = efficiency_at(&p, 1, t).unwrap();
    assert!((direct - curve.eta[opt.index]).abs() < 1e-9);
}

#[test]
fn no_photon_means_no_efficiency() {
    let p = coarse_baseline();
    let curve = efficiency_curve(&p, 0).unwrap();
    assert!(curve.eta.iter().all(|e| e.abs() < 1e-12));
    let opt = optimal_detection(&curve).unwrap();
    assert!(opt.degenerate);
}

#[test]
fn efficiency_rises_with_photon_number_and_relaxation_time() {
    let p = coarse_baseline();
    let eta = |q: &SimParams, n| {
        optimal_detection(&efficiency_curve(q, n).unwrap())
            .unwrap()
            .eta_max
    };
    let one = eta(&p, 1);
    let two = eta(&p.with_n_init(2), 2);
    assert!(two >= one);
    let slow = p.with_t1(50.0).unwrap();
    assert!(eta(&slow, 1) > one);
}

#[test]
fn bandwidth_is_symmetric_and_stable_under_scan_refinement() {
    let p = presets::baseline();
    let t_d = optimal_detection(&efficiency_curve(&p, 1).unwrap())
        .unwrap()
        .t_d;
    let bw = bandwidth(&p, t_d).unwrap();
    assert!((bw.delta_plus + bw.delta_minus).abs() < 1e-3 * p.omega_rabi);
    let half = bw.eta_zero / 2.0;
    assert!((bw.eta_at_crossings.0 - half).abs() < 1e-4);
    assert!((bw.eta_at_crossings.1 - half).abs() < 1e-4);
    let fine = bandwidth_with(
        &p,
        t_d,
        &BandwidthScan {
            step: 0.05,
            ..BandwidthScan::default()
        },
    )
    .unwrap();
    assert!((fine.width_over_omega - bw.width_over_omega).abs() < 1e-3);
}

#[test]
fn crossings_of_a_lorentzian() {
    // η(d) = 1/(1 + d²) has its half points at d = ±1.
    let (minus, plus, _, _, zero, scan) =
        half_width_crossings(|d| Ok(1.0 / (1.0 + d * d)), &BandwidthScan::default()).unwrap();
    assert_eq!(zero, 1.0);
    assert!((minus + 1.0).abs() < 1e-4);
    assert!((plus - 1.0).abs() < 1e-4);
    assert_eq!(scan.len(), 81);
}

#[test]
fn response_wider_than_window_is_reported() {
    let err = half_width_crossings(
        |d| Ok(1.0 / (1.0 + 0.01 * d * d)),
        &BandwidthScan::default(),
    )
    .unwrap_err();
    match err {
        Error::BandwidthRange { window, scan } => {
            assert_eq!(window, 4.0);
            assert_eq!(scan.len(), 81);
        }
        other => panic!("unexpected {other}"),
    }
}
