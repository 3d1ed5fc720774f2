use aedg::fluxes::*;
use aedg::mesh::BoundaryTag;
use approx::assert_abs_diff_eq;
use proptest::prelude::*;

fn unit(theta: f64) -> [f64; 2] {
    [theta.cos(), theta.sin()]
}

fn params(tau: f64, alpha: f64, beta: f64) -> FluxParams<f64> {
    FluxParams { tau, alpha, beta, ..FluxParams::upwind() }
}

#[test]
fn hand_evaluated_example() {
    let n = [0.0, 1.0];
    let m = [-1.0, 0.0];
    let s = StressTrace { traction: [0.0; 2], normal: 5.0, tangential: 1.0 }.recompose(n);
    let fluid = FluidTrace { p: 2.0, g: 0.3 };
    let solid = SolidTrace { v: [0.7, 0.4], s };
    let st = interface_flux(fluid, solid, n, &params(1.0, 0.0, 0.0)).unwrap();
    assert_abs_diff_eq!(st.solid.v[0] * n[0] + st.solid.v[1] * n[1], 0.4, epsilon = 1e-15);
    assert_abs_diff_eq!(st.solid.v[0], 0.7, epsilon = 1e-15);
    assert_abs_diff_eq!(st.solid.v[1], 0.4, epsilon = 1e-15);
    // tangential velocity passes through unchanged
    let vm = st.solid.v[0] * m[0] + st.solid.v[1] * m[1];
    assert_abs_diff_eq!(vm, 0.7 * m[0] + 0.4 * m[1], epsilon = 1e-15);
    assert_abs_diff_eq!(st.fluid.p, 2.0, epsilon = 1e-15);
    assert_abs_diff_eq!(st.solid.s[0], 0.0, epsilon = 1e-15);
    assert_abs_diff_eq!(st.solid.s[1], 2.0, epsilon = 1e-15);
    let sts = StressTrace::new(st.solid.s, n);
    assert_abs_diff_eq!(sts.normal, 2.0, epsilon = 1e-15);
    assert_abs_diff_eq!(sts.tangential, 0.0, epsilon = 1e-15);
}

#[test]
fn non_unit_normal_rejected() {
    let r = interface_flux(FluidTrace::default(), SolidTrace::default(), [1.0, 1.0], &FluxParams::upwind());
    assert!(matches!(r, Err(aedg::Error::Contract(_))));
    let bad = params(0.5, 0.5, -1.0);
    let r = interface_flux(FluidTrace::default(), SolidTrace::default(), [1.0, 0.0], &bad);
    assert!(r.is_err());
    assert!(bad.validate().is_err());
}

#[test]
fn mode_parameters() {
    let c = FluxParams::<f64>::conserving();
    assert_eq!((c.tau, c.alpha, c.beta, c.gamma_fluid), (0.5, 0.0, 0.0, 0.0));
    let u = FluxParams::<f64>::upwind();
    assert_eq!((u.tau, u.alpha, u.beta, u.gamma_solid), (0.5, -1.0, -1.0, 0.5));
    assert_eq!(FluxParams::<f64>::new(FluxMode::Alternating0).tau, 0.0);
    assert_eq!(FluxParams::<f64>::new(FluxMode::Alternating1).tau, 1.0);
    assert_eq!(FluxMode::parse("alt1").unwrap(), FluxMode::Alternating1);
    assert!(FluxMode::parse("lax").is_err());
}

#[test]
fn stress_trace_recomposes() {
    let n = unit(0.3);
    let t = [1.5, -2.25];
    let s = StressTrace::new(t, n);
    let r = s.recompose(n);
    assert!((r[0] - t[0]).abs() < 1e-13 && (r[1] - t[1]).abs() < 1e-13);
}

#[test]
fn interior_dissipation_for_pure_jumps() {
    let c = 2.0;
    let gamma = 0.5;
    let a = FluidTrace { p: 1.5, g: 0.0 };
    let b_own = FluidTrace { p: 0.5, g: 0.0 };
    let b = FluidTrace { p: b_own.p, g: -b_own.g };
    let s = interior_flux_fluid(a, b, c, gamma);
    let rate = fluid_face_energy_rate(a, s) + fluid_face_energy_rate(b_own, FluidTrace { p: s.p, g: -s.g });
    assert_abs_diff_eq!(rate, -gamma / c * 1.0, epsilon = 1e-15);

    let z = 3.0;
    let a = SolidTrace { v: [1.0, -0.5], s: [0.0; 2] };
    let b = SolidTrace { v: [0.25, 0.5], s: [0.0; 2] };
    let s = interior_flux_solid(a, b, z, gamma);
    let neg = SolidTrace { v: s.v, s: [-s.s[0], -s.s[1]] };
    let rate = solid_face_energy_rate(a, s) + solid_face_energy_rate(b, neg);
    let jump2 = 0.75f64.powi(2) + 1.0;
    assert_abs_diff_eq!(rate, -gamma * z * jump2, epsilon = 1e-14);
}

#[test]
fn boundary_fluxes() {
    let zero = FluidTrace::default();
    let s = boundary_flux_fluid(zero, BoundaryTag::Dirichlet, zero, 1.0, 0.5).unwrap();
    assert_eq!(s, zero);
    let tr = FluidTrace { p: 0.7, g: -1.2 };
    let s = boundary_flux_fluid(tr, BoundaryTag::Neumann, zero, 1.0, 0.0).unwrap();
    assert_eq!(fluid_face_energy_rate(tr, s), 0.0);
    let data = FluidTrace { p: 0.7, g: -1.2 };
    assert_eq!(boundary_flux_fluid(tr, BoundaryTag::Dirichlet, data, 2.0, 0.5).unwrap(), tr);
    assert_eq!(boundary_flux_fluid(tr, BoundaryTag::Neumann, data, 2.0, 0.5).unwrap(), tr);
    assert!(boundary_flux_fluid(tr, BoundaryTag::FreeTraction, data, 1.0, 0.5).is_err());

    let st = SolidTrace { v: [0.1, 0.2], s: [0.3, -0.4] };
    assert_eq!(boundary_flux_solid(st, BoundaryTag::Dirichlet, st, 2.0, 0.5).unwrap(), st);
    assert_eq!(boundary_flux_solid(st, BoundaryTag::FreeTraction, st, 2.0, 0.5).unwrap(), st);
    assert!(boundary_flux_solid(st, BoundaryTag::Neumann, st, 2.0, 0.5).is_err());
    let free = boundary_flux_solid(st, BoundaryTag::FreeTraction, SolidTrace::default(), 2.0, 0.0).unwrap();
    assert_eq!(solid_face_energy_rate(st, free), 0.0);
    let wall = boundary_flux_solid(st, BoundaryTag::Dirichlet, SolidTrace::default(), 2.0, 0.5).unwrap();
    assert!(solid_face_energy_rate(st, wall) < 0.0);
}

fn arb_traces() -> impl Strategy<Value = (FluidTrace<f64>, SolidTrace<f64>, [f64; 2])> {
    (
        proptest::array::uniform2(-10.0f64..10.0),
        proptest::array::uniform4(-10.0f64..10.0),
        0.0f64..std::f64::consts::TAU,
    )
        .prop_map(|(f, s, th)| {
            (
                FluidTrace { p: f[0], g: f[1] },
                SolidTrace { v: [s[0], s[1]], s: [s[2], s[3]] },
                unit(th),
            )
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn energy_rate_identity((f, s, n) in arb_traces()) {
        for tau in [0.0, 0.5, 1.0] {
            for alpha in [0.0, -1.0] {
                for beta in [0.0, -1.0] {
                    let p = params(tau, alpha, beta);
                    let st = interface_flux(f, s, n, &p).unwrap();
                    let rate = interface_energy_rate(f, s, &st);
                    let want = interface_dissipation(f, s, n, &p);
                    let scale = 1.0 + f.p.abs().max(f.g.abs()).powi(2) + s.v[0].hypot(s.v[1]).powi(2) + s.s[0].hypot(s.s[1]).powi(2);
                    prop_assert!((rate - want).abs() <= 1e-12 * scale, "{} vs {}", rate, want);
                    // tangential pass-through and zero shear
                    let m = [-n[1], n[0]];
                    prop_assert!(((st.solid.v[0] - s.v[0]) * m[0] + (st.solid.v[1] - s.v[1]) * m[1]).abs() < 1e-12);
                    prop_assert!((st.solid.s[0] * m[0] + st.solid.s[1] * m[1]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn consistent_traces_are_fixed_points(p in -5.0f64..5.0, vn in -5.0f64..5.0, vm in -5.0f64..5.0, th in 0.0f64..6.28) {
        let n = unit(th);
        let m = [-n[1], n[0]];
        let f = FluidTrace { p, g: vn };
        let s = SolidTrace { v: [vn * n[0] + vm * m[0], vn * n[1] + vm * m[1]], s: [p * n[0], p * n[1]] };
        for tau in [0.0, 0.5, 1.0] {
            let st = interface_flux(f, s, n, &params(tau, -1.0, -1.0)).unwrap();
            prop_assert!((st.fluid.p - p).abs() < 1e-12 && (st.fluid.g - vn).abs() < 1e-12);
            for a in 0..2 {
                prop_assert!((st.solid.v[a] - s.v[a]).abs() < 1e-12);
                prop_assert!((st.solid.s[a] - s.s[a]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn interior_fluxes_are_consistent(p in -5.0f64..5.0, g in -5.0f64..5.0, gamma in 0.0f64..1.0) {
        let t = FluidTrace { p, g };
        let s = interior_flux_fluid(t, t, 1.7, gamma);
        prop_assert!((s.p - p).abs() < 1e-14 && (s.g - g).abs() < 1e-14);
        let st = SolidTrace { v: [p, g], s: [g, p] };
        let s = interior_flux_solid(st, st, 2.3, gamma);
        prop_assert!((s.v[0] - p).abs() < 1e-14 && (s.s[1] - p).abs() < 1e-14);
    }
}
