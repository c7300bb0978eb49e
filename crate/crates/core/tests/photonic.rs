use std::f64::consts::PI;

use num_complex::Complex64;

use tfqsim::photonic::{
    build_cinc_circuit, build_fringe_circuit, build_sum_circuit, build_x_gate_circuit, fringe_input,
    output_distribution, run_circuit, Circuit, CircuitParams, Component, CouplerConvention, FieldState, ModeKey,
    PhysicalGrid,
};

fn fringe_probability(phi: f64) -> f64 {
    let c = build_fringe_circuit(&PhysicalGrid::microring(), 3, phi, &CircuitParams::ideal()).unwrap();
    output_distribution(&c, &fringe_input(3)).unwrap()[2]
}

#[test]
fn fringe_follows_three_slit_pattern() {
    let peak = fringe_probability(0.0);
    assert!(peak > 0.0);
    for k in 0..60 {
        let phi = 2.0 * PI * k as f64 / 60.0;
        let sum: Complex64 = (0..3).map(|n| Complex64::from_polar(1.0, n as f64 * phi)).sum();
        let expected = sum.norm_sqr() / 9.0;
        assert!((fringe_probability(phi) / peak - expected).abs() < 1e-12, "phi = {phi}");
        assert!(fringe_probability(phi) <= peak + 1e-15);
    }
    assert!(fringe_probability(2.0 * PI / 3.0) < 1e-15);
    assert!(fringe_probability(-2.0 * PI / 3.0) < 1e-15);
}

#[test]
fn lossless_switch_and_coupler_preserve_norm() {
    let grid = PhysicalGrid::microring();
    let mut input = FieldState::new();
    input.add_amplitude(ModeKey::new(0, 0, 0), Complex64::new(0.6, 0.0));
    input.add_amplitude(ModeKey::new(0, 1, 2), Complex64::new(0.0, 0.8));
    let mut c = Circuit::empty(3, 3, grid).with_components(vec![
        Component::MzmSwitch { input: 0, outputs: [0, 1], port: vec![1, 0, 1], extinction_db: f64::INFINITY },
        Component::Coupler2x2 { inputs: [0, 1], outputs: [0, 1], convention: CouplerConvention::Symmetric },
    ]);
    c.paths = 2;
    let out = run_circuit(&c, &input).unwrap();
    assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
}

#[test]
fn built_circuits_survive_a_toml_round_trip() {
    let grid = PhysicalGrid::microring();
    let params = CircuitParams { mzm_extinction_db: 20.0, dwdm_extinction_db: 30.0 };
    for c in [
        build_x_gate_circuit(&grid, 3, &params).unwrap(),
        build_cinc_circuit(&grid, 3, &params).unwrap(),
        build_sum_circuit(&grid, 3, &params).unwrap(),
        build_fringe_circuit(&grid, 3, 0.4, &params).unwrap(),
    ] {
        let text = c.to_toml_string().unwrap();
        let back = Circuit::from_toml_str(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_toml_string().unwrap(), text);
    }
}

#[test]
fn leaky_circuits_lose_light_but_stay_close_to_ideal() {
    let grid = PhysicalGrid::microring();
    let ideal = build_cinc_circuit(&grid, 3, &CircuitParams::ideal()).unwrap();
    let leaky = build_cinc_circuit(&grid, 3, &CircuitParams { mzm_extinction_db: 25.0, dwdm_extinction_db: 30.0 }).unwrap();
    for j in 0..9 {
        let input = ideal.basis_input(j / 3, j % 3).unwrap();
        let p_ideal = output_distribution(&ideal, &input).unwrap();
        let p_leaky = output_distribution(&leaky, &input).unwrap();
        let total: f64 = p_leaky.iter().sum();
        assert!(total <= 1.0 + 1e-12);
        let best = p_ideal.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        assert!(p_leaky[best] / total > 0.95, "input {j}");
    }
}
