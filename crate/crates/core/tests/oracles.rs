//! Propagation checked against closed-form and independent solutions.

use approx::assert_abs_diff_eq;
use jjphotond::liouvillian::TunnelingMode;
use jjphotond::propagation::{evolve, evolve_at, exact_state, step_control};
use jjphotond::units::{seconds_rate_to_internal, RateOrigin};
use jjphotond::{
    metrics, presets, DensityMatrix, Frame, HilbertSpace, Level, Liouvillian, SimParams, TimeGrid,
    Tolerances,
};

fn lossless(detuning_over_omega: f64) -> SimParams {
    let mut p = presets::baseline()
        .with_detuning_over_omega(detuning_over_omega)
        .unwrap();
    p.kappa = 0.0;
    p.gamma = 0.0;
    p.gamma_g = 0.0;
    p.gamma_e = 0.0;
    p.rate_origin = RateOrigin::Explicit;
    p.grid = TimeGrid::new(30.0, 0.1).unwrap();
    p
}

fn max_abs_diff(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    (a.matrix() - b.matrix())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

#[test]
fn resonant_vacuum_rabi_oscillation() {
    let p = lossless(0.0);
    let space = HilbertSpace::new(1);
    let l = Liouvillian::new(&p, space);
    let traj = evolve(
        &l,
        &DensityMatrix::pure(&space, Level::Ground, 1),
        &p.grid,
        &p.tol,
    )
    .unwrap();
    let e0 = space.index(Level::Excited, 0);
    for (t, rho) in traj.times.iter().zip(&traj.states) {
        let expected = (p.omega_rabi * t / 2.0).sin().powi(2);
        assert_abs_diff_eq!(rho.population(e0), expected, epsilon = 1e-8);
        assert_abs_diff_eq!(rho.trace(), 1.0, epsilon = 1e-12);
    }
}

#[test]
fn detuned_rabi_oscillation_in_higher_photon_block() {
    // |n,g⟩ ↔ |n−1,e⟩ with coupling √n Ω and detuning Δ.
    let n = 3;
    let p = lossless(0.7);
    let space = HilbertSpace::new(n);
    let l = Liouvillian::new(&p, space);
    let traj = evolve(
        &l,
        &DensityMatrix::pure(&space, Level::Ground, n),
        &p.grid,
        &p.tol,
    )
    .unwrap();
    let coupling = (n as f64).sqrt() * p.omega_rabi;
    let generalized = (coupling * coupling + p.detuning * p.detuning).sqrt();
    let excited = space.index(Level::Excited, n - 1);
    for (t, rho) in traj.times.iter().zip(&traj.states) {
        let expected = (coupling / generalized).powi(2) * (generalized * t / 2.0).sin().powi(2);
        assert_abs_diff_eq!(rho.population(excited), expected, epsilon = 1e-8);
    }
}

#[test]
fn dark_trace_decays_at_ground_rate() {
    let mut p = presets::baseline();
    p.gamma_g = seconds_rate_to_internal(1.46e5);
    p.rate_origin = RateOrigin::Explicit;
    let space = HilbertSpace::new(1);
    let l = Liouvillian::new(&p, space);
    let traj = evolve(
        &l,
        &DensityMatrix::pure(&space, Level::Ground, 0),
        &p.grid,
        &p.tol,
    )
    .unwrap();
    for (t, tr) in traj.times.iter().zip(traj.traces()) {
        assert_abs_diff_eq!(tr, (-p.gamma_g * t).exp(), epsilon = 1e-10);
    }
    let k = traj
        .times
        .iter()
        .position(|t| (*t - 45.0).abs() < 1e-9)
        .unwrap();
    assert_abs_diff_eq!(1.0 - traj.states[k].trace(), 6.55e-3, epsilon = 1e-4);
}

#[test]
fn excited_junction_without_photons_relaxes_and_escapes() {
    // |0,e⟩ only decays: population e^{−(γ+Γ_e)t}, ground gains γ and leaks Γ_g.
    let p = presets::baseline();
    let space = HilbertSpace::new(0);
    let l = Liouvillian::new(&p, space);
    let traj = evolve(
        &l,
        &DensityMatrix::pure(&space, Level::Excited, 0),
        &p.grid,
        &p.tol,
    )
    .unwrap();
    let a = p.gamma + p.gamma_e;
    for (t, rho) in traj.times.iter().zip(&traj.states) {
        let pe = (-a * t).exp();
        let pg = p.gamma / (a - p.gamma_g) * ((-p.gamma_g * t).exp() - (-a * t).exp());
        assert_abs_diff_eq!(
            rho.population(space.index(Level::Excited, 0)),
            pe,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(
            rho.population(space.index(Level::Ground, 0)),
            pg,
            epsilon = 1e-9
        );
    }
}

#[test]
fn adaptive_matches_matrix_exponential_at_baseline() {
    for n in 1..=3 {
        let p = presets::baseline().with_n_init(n);
        let space = HilbertSpace::new(n);
        let l = Liouvillian::new(&p, space);
        let rho0 = DensityMatrix::pure(&space, Level::Ground, n);
        let times = [0.0, 0.37, 5.0, 44.9, 73.85, 120.0, 200.0];
        let traj = evolve_at(&l, &rho0, &times, step_control(&l, &p.tol)).unwrap();
        for (t, rho) in times.iter().zip(&traj.states) {
            let exact = exact_state(&l, &rho0, *t).unwrap();
            assert!(max_abs_diff(rho, &exact) < 1e-8, "n={n} t={t}");
        }
    }
}

#[test]
fn full_tunneling_matches_exponential_with_cross_terms() {
    let p = presets::baseline();
    let space = HilbertSpace::new(2);
    let l = Liouvillian::with_frame(&p, space, Frame::RotatingSecular, TunnelingMode::Full);
    let rho0 = DensityMatrix::pure(&space, Level::Ground, 1);
    let traj = evolve_at(&l, &rho0, &[0.0, 30.0, 90.0], step_control(&l, &p.tol)).unwrap();
    for (t, rho) in [30.0, 90.0].iter().zip(&traj.states[1..]) {
        assert!(max_abs_diff(rho, &exact_state(&l, &rho0, *t).unwrap()) < 1e-8);
    }
}

#[test]
fn lab_frame_agrees_with_rotating_frame_on_short_horizon() {
    let mut p = presets::baseline();
    p.grid = TimeGrid::new(20.0, 0.5).unwrap();
    let rotating = metrics::efficiency_curve(&p, 1).unwrap();
    p.frame = Frame::LabFull;
    let lab = metrics::efficiency_curve(&p, 1).unwrap();
    for (a, b) in rotating.p_n.iter().zip(&lab.p_n) {
        assert!((a - b).abs() <= 5e-3, "{a} vs {b}");
    }
}

#[test]
fn truncation_above_initial_photon_number_is_inert() {
    let p = presets::baseline();
    let small = metrics::efficiency_curve(&p, 1).unwrap();
    let wide = metrics::efficiency_curve(&SimParams { n_max: 4, ..p }, 1).unwrap();
    for (a, b) in small.p_n.iter().zip(&wide.p_n) {
        assert!((a - b).abs() <= 1e-10);
    }
}

#[test]
fn tolerance_halving_barely_moves_optimum_probability() {
    let p = presets::baseline();
    let curve = metrics::efficiency_curve(&p, 1).unwrap();
    let opt = metrics::optimal_detection(&curve).unwrap();
    let t_d = curve.times[opt.index];
    let tight = SimParams {
        tol: Tolerances {
            rel: p.tol.rel / 2.0,
            abs: p.tol.abs / 2.0,
        },
        ..p.clone()
    };
    let space = HilbertSpace::new(1);
    let rho0 = DensityMatrix::pure(&space, Level::Ground, 1);
    let loose = jjphotond::propagation::evolve_to(&Liouvillian::new(&p, space), &rho0, t_d, &p.tol)
        .unwrap();
    let fine =
        jjphotond::propagation::evolve_to(&Liouvillian::new(&tight, space), &rho0, t_d, &tight.tol)
            .unwrap();
    assert!((loose.trace() - fine.trace()).abs() < 1e-7);
}

#[test]
fn trace_loss_rate_equals_tunneling_expectation() {
    // Richardson-extrapolated centred differences of Tr ρ against −Tr(Θρ).
    let p = presets::baseline().with_n_init(2);
    let space = HilbertSpace::new(2);
    let l = Liouvillian::new(&p, space);
    let rho0 = DensityMatrix::pure(&space, Level::Ground, 2);
    for t in [1.3, 12.0, 80.0] {
        let h = 2e-3;
        let times = [0.0, t - h, t - h / 2.0, t, t + h / 2.0, t + h];
        let tr = evolve_at(&l, &rho0, &times, step_control(&l, &p.tol)).unwrap();
        let traces = tr.traces();
        let coarse = (traces[5] - traces[1]) / (2.0 * h);
        let fine = (traces[4] - traces[2]) / h;
        let derivative = (4.0 * fine - coarse) / 3.0;
        assert!((derivative + l.leak_rate(tr.states[3].matrix())).abs() < 1e-6);
    }
}

#[test]
fn invariants_hold_along_every_figure_trajectory() {
    let base = presets::baseline();
    let cases = [
        base.clone(),
        base.with_t1(500.0).unwrap(),
        base.with_bias_x(1.7).unwrap(),
        base.with_n_init(3),
        base.with_detuning_over_omega(1.5).unwrap(),
    ];
    for p in cases {
        let curve = metrics::efficiency_curve(&p, p.n_init).unwrap();
        for s in curve.stats {
            assert!(s.max_hermiticity_error <= 1e-10);
            assert!(s.min_eigenvalue >= -1e-8);
            assert!(s.max_trace_uptick <= 1e-10);
        }
        for w in curve.p_n.windows(2) {
            assert!(w[1] >= w[0] - 1e-10);
        }
        for k in 0..curve.times.len() {
            assert_eq!(curve.eta[k], curve.p_n[k] - curve.p_0[k]);
        }
    }
}
