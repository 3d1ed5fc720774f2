use aedg::basis::gauss_rule;
use aedg::mesh::{
    build_annulus_coupled, build_cartesian_coupled, build_radial_interface,
    build_sinusoidal_interface, CoupledSetup, FaceKind, Mesh, RadialProfile, Rect,
};
use approx::assert_abs_diff_eq;
use proptest::prelude::*;

fn boxes() -> (Rect<f64>, Rect<f64>) {
    (Rect::new(0.0, 2.0, 0.0, 2.0), Rect::new(0.0, 2.0, -2.0, 0.0))
}

fn cartesian(n: usize) -> Mesh<f64> {
    let (f, s) = boxes();
    build_cartesian_coupled(n, f, s, &CoupledSetup::default()).unwrap()
}

fn interface_length(mesh: &Mesh<f64>) -> f64 {
    let rule = gauss_rule::<f64>(6).unwrap();
    mesh.faces
        .iter()
        .filter(|f| f.kind == FaceKind::FluidSolidInterface)
        .map(|f| {
            let g = mesh.geometry(f.owner.element, &rule.nodes, &rule.weights).unwrap();
            g.face_length(f.owner.face)
        })
        .sum()
}

fn check_watertight(mesh: &Mesh<f64>) {
    let rule = gauss_rule::<f64>(5).unwrap();
    let nq = rule.len();
    for f in &mesh.faces {
        let Some(nb) = f.neighbor else { continue };
        let go = mesh.geometry(f.owner.element, &rule.nodes, &rule.weights).unwrap();
        let gn = mesh.geometry(nb.element, &rule.nodes, &rule.weights).unwrap();
        for k in 0..nq {
            let kn = if f.reversed { nq - 1 - k } else { k };
            let xo = go.face_x[f.owner.face * nq + k];
            let xn = gn.face_x[nb.face * nq + kn];
            assert!((xo[0] - xn[0]).abs() < 1e-12 && (xo[1] - xn[1]).abs() < 1e-12);
            let no = go.normals[f.owner.face * nq + k];
            let nn = gn.normals[nb.face * nq + kn];
            assert!((no[0] + nn[0]).abs() < 1e-12 && (no[1] + nn[1]).abs() < 1e-12);
        }
    }
}

fn check_closed_elements(mesh: &Mesh<f64>) {
    let rule = gauss_rule::<f64>(6).unwrap();
    for e in 0..mesh.num_elements() {
        let g = mesh.geometry(e, &rule.nodes, &rule.weights).unwrap();
        let mut s = [0.0; 2];
        for (n, w) in g.normals.iter().zip(&g.face_w) {
            s[0] += n[0] * w;
            s[1] += n[1] * w;
            assert_abs_diff_eq!(n[0] * n[0] + n[1] * n[1], 1.0, epsilon = 1e-13);
        }
        for (n, m) in g.normals.iter().zip(&g.tangents) {
            assert_abs_diff_eq!(n[0] * m[0] + n[1] * m[1], 0.0, epsilon = 1e-13);
        }
        let scale = g.face_w.iter().sum::<f64>();
        assert!(s[0].abs() < 1e-12 * scale.max(1.0) && s[1].abs() < 1e-12 * scale.max(1.0), "{s:?}");
    }
}

#[test]
fn cartesian_counts() {
    let m = cartesian(2);
    assert_eq!(m.num_elements(), 8);
    assert_eq!(m.count_faces(FaceKind::FluidSolidInterface), 2);
    assert_abs_diff_eq!(m.h, 1.0);
    let m = cartesian(4);
    assert_eq!(m.num_elements(), 32);
    assert_eq!(m.count_faces(FaceKind::FluidSolidInterface), 4);
    assert_eq!(m.count_faces(FaceKind::FluidInterior), 24);
    assert_eq!(m.count_faces(FaceKind::SolidInterior), 24);
    assert_eq!(m.count_faces(FaceKind::Boundary), 24);
}

#[test]
fn cartesian_interface_normals_leave_fluid() {
    let m = cartesian(3);
    let rule = gauss_rule::<f64>(3).unwrap();
    for f in m.faces.iter().filter(|f| f.kind == FaceKind::FluidSolidInterface) {
        assert_eq!(m.elements[f.owner.element].region, aedg::mesh::RegionKind::Fluid);
        let g = m.geometry(f.owner.element, &rule.nodes, &rule.weights).unwrap();
        for k in 0..3 {
            let n = g.normals[f.owner.face * 3 + k];
            assert_abs_diff_eq!(n[1], -1.0, epsilon = 1e-14);
        }
    }
}

#[test]
fn fluid_below_solid_is_supported() {
    let (f, s) = boxes();
    let m = build_cartesian_coupled(3, s, f, &CoupledSetup::default());
    // swapped roles: fluid box is now [0,2]x[-2,0]
    let m = m.unwrap();
    assert_abs_diff_eq!(interface_length(&m), 2.0, epsilon = 1e-13);
    check_watertight(&m);
}

#[test]
fn non_abutting_boxes_rejected() {
    let f = Rect::new(0.0, 2.0, 0.5, 2.0);
    let s = Rect::new(0.0, 2.0, -2.0, 0.0);
    assert!(build_cartesian_coupled(2, f, s, &CoupledSetup::default()).is_err());
}

#[test]
fn summary_format() {
    let text = cartesian(2).summary().to_string();
    assert!(text.starts_with("[mesh]\nelements = 8\n"));
    assert!(text.contains("interface_faces = 2"));
}

#[test]
fn perturbation_zero_is_identity() {
    let m = cartesian(4);
    let p = m.perturb_interior_nodes(0.0, 7).unwrap();
    assert_eq!(m.nodes, p.nodes);
}

#[test]
fn perturbation_is_bounded_and_deterministic() {
    let m = cartesian(8);
    let a = m.perturb_interior_nodes(0.05, 11).unwrap();
    let b = m.perturb_interior_nodes(0.05, 11).unwrap();
    assert_eq!(a.nodes, b.nodes);
    let mut moved = 0;
    for ((x, y), &fixed) in m.nodes.iter().zip(&a.nodes).zip(&m.node_fixed) {
        let d = [(x[0] - y[0]).abs(), (x[1] - y[1]).abs()];
        assert!(d[0] <= 0.05 * m.h + 1e-15 && d[1] <= 0.05 * m.h + 1e-15);
        if fixed {
            assert_eq!(d, [0.0, 0.0]);
        } else if d[0] > 0.0 {
            moved += 1;
        }
    }
    assert!(moved > 0);
    check_watertight(&a);
    check_closed_elements(&a);
    assert_abs_diff_eq!(interface_length(&a), 2.0, epsilon = 1e-13);
}

#[test]
fn annulus_paper_radii() {
    let (r0, r1, r2) = (3.83170597020751, 7.01558666981561, 8.65372791291101);
    let m = build_annulus_coupled(r0, r1, r2, 2, 16, &CoupledSetup::default()).unwrap();
    assert_eq!(m.num_elements(), 64);
    assert_eq!(m.count_faces(FaceKind::FluidSolidInterface), 16);
    assert_abs_diff_eq!(interface_length(&m), 2.0 * std::f64::consts::PI * r1, epsilon = 1e-10);
    check_watertight(&m);
    check_closed_elements(&m);
    let rule = gauss_rule::<f64>(4).unwrap();
    for f in m.faces.iter().filter(|f| f.kind == FaceKind::FluidSolidInterface) {
        let g = m.geometry(f.owner.element, &rule.nodes, &rule.weights).unwrap();
        for k in 0..4 {
            let x = g.face_x[f.owner.face * 4 + k];
            let n = g.normals[f.owner.face * 4 + k];
            let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
            assert_abs_diff_eq!(r, r1, epsilon = 1e-12);
            assert_abs_diff_eq!(n[0] * x[0] / r + n[1] * x[1] / r, -1.0, epsilon = 1e-12);
        }
    }
}

#[test]
fn annulus_radii_out_of_order() {
    assert!(build_annulus_coupled(2.0, 1.0, 3.0, 2, 8, &CoupledSetup::default()).is_err());
}

#[test]
fn metric_terms_invert_the_jacobian() {
    let m = build_annulus_coupled(1.0, 2.0, 3.0, 2, 8, &CoupledSetup::default()).unwrap();
    let rule = gauss_rule::<f64>(4).unwrap();
    for e in 0..m.num_elements() {
        let g = m.geometry(e, &rule.nodes, &rule.weights).unwrap();
        for b in 0..4 {
            for a in 0..4 {
                let (_, j) = m.map_point(e, rule.nodes[a], rule.nodes[b]);
                let mt = g.metrics[a + 4 * b];
                // [xi_x1 xi_x2; eta_x1 eta_x2] * J = I
                let prod = [
                    mt[0] * j[0][0] + mt[1] * j[1][0],
                    mt[0] * j[0][1] + mt[1] * j[1][1],
                    mt[2] * j[0][0] + mt[3] * j[1][0],
                    mt[2] * j[0][1] + mt[3] * j[1][1],
                ];
                for (p, e) in prod.iter().zip([1.0, 0.0, 0.0, 1.0]) {
                    assert_abs_diff_eq!(*p, e, epsilon = 1e-12);
                }
            }
        }
    }
}

#[test]
fn flat_sinusoid_matches_cartesian() {
    let (f, s) = boxes();
    let a = build_sinusoidal_interface(10, 0.0, f, s, 4, &CoupledSetup::default()).unwrap();
    let b = cartesian(4);
    let rule = gauss_rule::<f64>(3).unwrap();
    for e in 0..a.num_elements() {
        let ga = a.geometry(e, &rule.nodes, &rule.weights).unwrap();
        let gb = b.geometry(e, &rule.nodes, &rule.weights).unwrap();
        for (x, y) in ga.vol_x.iter().zip(&gb.vol_x) {
            assert_abs_diff_eq!(x[0], y[0], epsilon = 1e-14);
            assert_abs_diff_eq!(x[1], y[1], epsilon = 1e-14);
        }
    }
    assert_eq!(a.faces.len(), b.faces.len());
}

#[test]
fn sinusoid_on_fine_grid() {
    let f = Rect::new(-1.0, 1.0, 0.0, 2.0);
    let s = Rect::new(-1.0, 1.0, -2.0, 0.0);
    let m = build_sinusoidal_interface(10, 0.025, f, s, 70, &CoupledSetup::default()).unwrap();
    let rule = gauss_rule::<f64>(2).unwrap();
    for e in 0..m.num_elements() {
        let g = m.geometry(e, &rule.nodes, &rule.weights).unwrap();
        assert!(g.vol_det.iter().all(|&d| d > 0.0));
    }
    let len = interface_length(&m);
    assert!(len > 2.0, "{len}");
    check_watertight(&m);
}

#[test]
fn sinusoid_too_large_rejected() {
    let (f, s) = boxes();
    assert!(build_sinusoidal_interface(2, 2.5, f, s, 4, &CoupledSetup::default()).is_err());
}

#[test]
fn radial_interface_paper_coefficients() {
    let coeffs = [0.002, 0.050, -0.001, 0.008, -0.003, -0.006, -0.010, 0.010];
    let m = build_radial_interface(&coeffs, 0.5, 3.0, 2, 3, 24, &CoupledSetup::default()).unwrap();
    check_watertight(&m);
    check_closed_elements(&m);
    let zero = build_radial_interface(&[0.0; 8], 0.5, 3.0, 2, 3, 24, &CoupledSetup::default()).unwrap();
    assert_abs_diff_eq!(
        interface_length(&zero),
        2.0 * std::f64::consts::PI,
        epsilon = 1e-3
    );
    let profile = RadialProfile::SineSeries { base: 0.0, coeffs: coeffs.to_vec() };
    let n = 4096;
    let mean: f64 = (0..n)
        .map(|k| profile.radius(2.0 * std::f64::consts::PI * k as f64 / n as f64).0)
        .sum::<f64>()
        / n as f64;
    assert_abs_diff_eq!(mean, 0.0, epsilon = 1e-12);
}

#[test]
fn radial_interface_crossing_rejected() {
    assert!(build_radial_interface(&[0.6], 0.5, 3.0, 2, 2, 16, &CoupledSetup::default()).is_err());
}

#[test]
fn locate_finds_points() {
    let m = cartesian(4);
    let (e, r) = m.locate([0.3, 1.7]).unwrap();
    let (x, _) = m.map_point(e, r[0], r[1]);
    assert_abs_diff_eq!(x[0], 0.3, epsilon = 1e-13);
    assert_abs_diff_eq!(x[1], 1.7, epsilon = 1e-13);
    assert!(m.locate([5.0, 5.0]).is_none());
}

proptest! {
    #[test]
    fn perturbed_meshes_stay_valid(seed in 0u64..1000, n in 2usize..7) {
        let m = cartesian(n).perturb_interior_nodes(0.05, seed).unwrap();
        let rule = gauss_rule::<f64>(3).unwrap();
        for e in 0..m.num_elements() {
            let g = m.geometry(e, &rule.nodes, &rule.weights).unwrap();
            prop_assert!(g.vol_det.iter().all(|&d| d > 0.0));
        }
    }
}
