use approx::assert_abs_diff_eq;
use nalgebra::{DMatrix, DVector, Matrix2};
use proptest::prelude::*;

use super::*;
use crate::mesh::Vertex2;
use crate::VemError;
use crate::polybasis::{dim_poly, monomial_gram, MonomialIndex};

fn v(x: f64, y: f64) -> Vertex2 {
    Vertex2::new(x, y)
}

fn unit_square() -> Vec<Vertex2> {
    vec![v(0., 0.), v(1., 0.), v(1., 1.), v(0., 1.)]
}

fn triangle() -> Vec<Vertex2> {
    vec![v(0.1, 0.2), v(1.3, 0.4), v(0.5, 1.1)]
}

/// Irregular convex polygon with `n` vertices on an ellipse.
fn polygon(n: usize, seed: u64) -> Vec<Vertex2> {
    let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    (0..n)
        .map(|i| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let jitter = ((s >> 33) as f64 / (1u64 << 31) as f64 - 0.5) * 0.6;
            let t = (i as f64 + jitter) * std::f64::consts::TAU / n as f64;
            v(0.3 + 0.7 * t.cos(), -0.2 + 0.45 * t.sin())
        })
        .collect()
}

fn test_cells() -> Vec<Vec<Vertex2>> {
    vec![unit_square(), triangle(), polygon(5, 1), polygon(6, 2), polygon(9, 3)]
}

fn monomial_dofs(elem: &VemElement, a: usize) -> DVector<f64> {
    let mut c = vec![0.0; dim_poly(elem.k() as i32)];
    c[a] = 1.0;
    elem.interpolate_polynomial(&c).unwrap()
}

fn ones(elem: &VemElement) -> DVector<f64> {
    let mut c = vec![0.0; dim_poly(elem.k() as i32)];
    c[0] = 1.0;
    elem.interpolate_polynomial(&c).unwrap()
}

fn rel_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax() / b.amax().max(1e-300)
}

#[test]
fn projector_fixes_polynomials() {
    for k in 1..=3 {
        for cell in test_cells() {
            let elem = VemElement::new(cell, k).unwrap();
            let gram = monomial_gram(&elem.vertices, &elem.geometry, k).unwrap();
            let pi = build_pi_nabla(&elem, &gram).unwrap();
            for a in 0..dim_poly(k as i32) {
                let c = &pi.pi_star * monomial_dofs(&elem, a);
                for b in 0..c.len() {
                    let expect = if a == b { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(c[b], expect, epsilon = 1e-11);
                }
            }
        }
    }
}

#[test]
fn g_matches_quadrature_gram() {
    for k in 1..=3 {
        for cell in test_cells() {
            let elem = VemElement::new(cell, k).unwrap();
            let gram = monomial_gram(&elem.vertices, &elem.geometry, k).unwrap();
            let pi = build_pi_nabla(&elem, &gram).unwrap();
            let direct = consistency_gram_direct(&elem).unwrap();
            assert!(rel_diff(&pi.g, &direct) < 1e-11, "k={k}: {}", rel_diff(&pi.g, &direct));
            assert!(rel_diff(&pi.g, &(&pi.b * &pi.d)) < 1e-11);
        }
    }
}

#[test]
fn projector_is_idempotent_on_pentagon() {
    let elem = VemElement::new(polygon(5, 7), 2).unwrap();
    let gram = monomial_gram(&elem.vertices, &elem.geometry, 2).unwrap();
    let pi = build_pi_nabla(&elem, &gram).unwrap();
    let p2 = &pi.pi_dof * &pi.pi_dof;
    assert!((p2 - &pi.pi_dof).amax() < 1e-10);
}

#[test]
fn recovered_moments_of_polynomials() {
    for k in 1..=3 {
        for cell in test_cells() {
            for method in MethodKind::ALL {
                let elem = VemElement::new(cell.clone(), k).unwrap();
                let pack = ProjectionPack::build(&elem, method).unwrap();
                let top = k + pack.ell;
                let basis = elem.basis(top);
                let rule = elem.quadrature(k + top).unwrap();
                for a in 0..dim_poly(k as i32) {
                    let moments = &pack.moments * monomial_dofs(&elem, a);
                    let pa = MonomialIndex::from_position(a);
                    for b in 0..dim_poly(top as i32) {
                        let exact = rule.integrate(|p| {
                            let m = basis.eval(p);
                            m[pa.position()] * m[b]
                        });
                        assert_abs_diff_eq!(moments[b], exact, epsilon = 1e-11);
                    }
                }
            }
        }
    }
}

#[test]
fn first_recovered_moment_is_the_mean_dof() {
    let elem = VemElement::new(polygon(6, 4), 2).unwrap();
    let pack = ProjectionPack::build(&elem, MethodKind::E2vem).unwrap();
    let row = pack.moments.row(0);
    for i in 0..elem.layout.total() {
        let expect = if i == elem.layout.moment(0) { elem.area() } else { 0.0 };
        assert_eq!(row[i], expect);
    }
}

/// Gradients of the barycentric coordinates of a triangle (rows), and its area.
fn barycentric_gradients(t: &[Vertex2]) -> (DMatrix<f64>, f64) {
    let area = 0.5 * (t[1] - t[0]).cross(t[2] - t[0]);
    let mut g = DMatrix::zeros(3, 2);
    for i in 0..3 {
        let (b, c) = (t[(i + 1) % 3], t[(i + 2) % 3]);
        g[(i, 0)] = (b.y - c.y) / (2.0 * area);
        g[(i, 1)] = (c.x - b.x) / (2.0 * area);
    }
    (g, area)
}

#[test]
fn triangle_linear_moments_match_fem() {
    let t = triangle();
    let elem = VemElement::new(t.clone(), 1).unwrap();
    let pack = ProjectionPack::build(&elem, MethodKind::E2vem).unwrap();
    assert_eq!(pack.ell, 0);
    let (grad, area) = barycentric_gradients(&t);
    let basis = elem.basis(1);
    let rule = elem.quadrature(2).unwrap();
    let vals = DVector::from_vec(vec![0.3, -1.2, 2.0]);
    let lin = |p: Vertex2| {
        (0..3)
            .map(|i| vals[i] * (1.0 / 3.0 + grad[(i, 0)] * (p.x - elem.geometry.centroid.x) + grad[(i, 1)] * (p.y - elem.geometry.centroid.y)))
            .sum::<f64>()
    };
    let moments = &pack.moments * &vals;
    for b in 0..3 {
        assert_abs_diff_eq!(moments[b], rule.integrate(|p| lin(p) * basis.eval(p)[b]), epsilon = 1e-12);
    }
    let g = &pack.pi0_grad * &vals;
    let fem = grad.transpose() * &vals;
    assert_abs_diff_eq!(g[0], fem[0], epsilon = 1e-12);
    assert_abs_diff_eq!(g[1], fem[1], epsilon = 1e-12);
    assert!(area > 0.0);
}

#[test]
fn gradient_projection_of_polynomials() {
    for k in 1..=3 {
        for cell in test_cells() {
            for method in MethodKind::ALL {
                let elem = VemElement::new(cell.clone(), k).unwrap();
                let pack = ProjectionPack::build(&elem, method).unwrap();
                let nd = dim_poly(pack.grad_degree as i32);
                let h = elem.geometry.diameter;
                for a in 0..dim_poly(k as i32) {
                    let g = &pack.pi0_grad * monomial_dofs(&elem, a);
                    let alpha = MonomialIndex::from_position(a);
                    let mut expect = DVector::zeros(2 * nd);
                    if alpha.ax > 0 {
                        expect[MonomialIndex::new(alpha.ax - 1, alpha.ay).position()] = alpha.ax as f64 / h;
                    }
                    if alpha.ay > 0 {
                        expect[nd + MonomialIndex::new(alpha.ax, alpha.ay - 1).position()] = alpha.ay as f64 / h;
                    }
                    let e = g - expect;
                    let m = pack.gram.view((0, 0), (nd, nd));
                    let (ex, ey) = (e.rows(0, nd), e.rows(nd, nd));
                    let l2 = ((ex.transpose() * m * ex)[0] + (ey.transpose() * m * ey)[0]).sqrt();
                    assert!(l2 < 1e-11 * elem.area().sqrt(), "k={k} a={a} {method}: {l2:e}");
                }
            }
        }
    }
}

#[test]
fn unit_square_linear_stiffness() {
    let elem = VemElement::new(unit_square(), 1).unwrap();
    let st = local_stiffness(&elem, MethodKind::StandardVem, &DiffusionTensor::identity()).unwrap();
    let expect = DMatrix::from_row_slice(
        4,
        4,
        &[1., 0., -1., 0., 0., 1., 0., -1., -1., 0., 1., 0., 0., -1., 0., 1.],
    ) * 0.5;
    assert!((&st.a_pi - expect).amax() < 1e-12);
    assert_eq!(st.k_inf, 1.0);
}

#[test]
fn triangle_e2vem_is_linear_fem() {
    let t = triangle();
    let k = Matrix2::new(2.0, 0.3, 0.3, 0.7);
    let elem = VemElement::new(t.clone(), 1).unwrap();
    let st = local_stiffness(&elem, MethodKind::E2vem, &DiffusionTensor::constant(2.0, 0.3, 0.7).unwrap()).unwrap();
    let (g, area) = barycentric_gradients(&t);
    let kk = DMatrix::from_row_slice(2, 2, k.as_slice());
    let fem = &g * kk * g.transpose() * area;
    assert!((&st.a - fem).amax() < 1e-12);
    assert_eq!(st.a_s.amax(), 0.0);
}

#[test]
fn constants_in_kernel_and_symmetry() {
    let tensors = [
        DiffusionTensor::identity(),
        DiffusionTensor::diagonal(8e-3, 1.0).unwrap(),
        DiffusionTensor::variable(|p| Matrix2::new(1.0 + p.x * p.x, 0.1 * p.y, 0.1 * p.y, 2.0 + p.y)),
    ];
    for k in 1..=3 {
        for cell in test_cells() {
            for method in MethodKind::ALL {
                for tensor in &tensors {
                    let elem = VemElement::new(cell.clone(), k).unwrap();
                    let st = local_stiffness(&elem, method, tensor).unwrap();
                    let scale = st.a.amax();
                    assert!((&st.a * ones(&elem)).amax() < 1e-10 * scale.max(1.0));
                    assert!((&st.a - st.a.transpose()).amax() < 1e-12);
                    let min_eig = st.a.clone().symmetric_eigenvalues().min();
                    assert!(min_eig > -1e-10 * scale, "k={k} {method} {min_eig}");
                }
            }
        }
    }
}

#[test]
fn e2vem_has_full_rank_on_all_cells() {
    let id = DiffusionTensor::identity();
    for k in 1..=3 {
        for cell in test_cells() {
            let elem = VemElement::new(cell, k).unwrap();
            let st = local_stiffness(&elem, MethodKind::E2vem, &id).unwrap();
            assert_eq!(numerical_rank(&st.a), elem.layout.total() - 1);
        }
    }
}

#[test]
fn standard_without_stabilization_is_rank_deficient() {
    let elem = VemElement::new(polygon(6, 5), 1).unwrap();
    let st = local_stiffness(&elem, MethodKind::StandardVem, &DiffusionTensor::identity()).unwrap();
    assert!(numerical_rank(&st.a_pi) < 5);
    assert_eq!(numerical_rank(&st.a), 5);
}

#[test]
fn polynomial_consistency() {
    let tensor = DiffusionTensor::constant(1.5, -0.2, 0.6).unwrap();
    let kk = tensor.eval(Vertex2::default());
    for k in 1..=3 {
        for cell in test_cells() {
            for method in MethodKind::ALL {
                let elem = VemElement::new(cell.clone(), k).unwrap();
                let st = local_stiffness(&elem, method, &tensor).unwrap();
                let basis = elem.basis(k);
                let rule = elem.quadrature(2 * k).unwrap();
                let n = dim_poly(k as i32);
                let (mut gx, mut gy) = (vec![0.0; n], vec![0.0; n]);
                for a in 0..n {
                    let pa = monomial_dofs(&elem, a);
                    for b in 0..n {
                        let qb = monomial_dofs(&elem, b);
                        let discrete = (pa.transpose() * &st.a * qb)[0];
                        let mut exact = 0.0;
                        for (&p, &w) in rule.points.iter().zip(&rule.weights) {
                            basis.grad_into(p, &mut gx, &mut gy);
                            exact += w
                                * (kk[(0, 0)] * gx[a] * gx[b]
                                    + kk[(0, 1)] * (gx[a] * gy[b] + gy[a] * gx[b])
                                    + kk[(1, 1)] * gy[a] * gy[b]);
                        }
                        assert_abs_diff_eq!(discrete, exact, epsilon = 1e-10);
                    }
                }
            }
        }
    }
}

#[test]
fn load_examples() {
    let elem = VemElement::new(unit_square(), 1).unwrap();
    let pack = ProjectionPack::build(&elem, MethodKind::StandardVem).unwrap();
    let rule = elem.quadrature(8).unwrap();
    let zero = local_load(&elem, &pack, |_| 0.0, &rule);
    assert_eq!(zero.amax(), 0.0);
    let basis = elem.basis(1);
    let lx = local_load(&elem, &pack, |p| basis.eval(p)[1], &rule);
    assert_abs_diff_eq!(lx.dot(&ones(&elem)), 0.0, epsilon = 1e-12);
    for k in 1..=3 {
        for cell in test_cells() {
            let elem = VemElement::new(cell, k).unwrap();
            let pack = ProjectionPack::build(&elem, MethodKind::E2vem).unwrap();
            let rule = elem.quadrature(2 * k + 6).unwrap();
            let l1 = local_load(&elem, &pack, |_| 1.0, &rule);
            assert_abs_diff_eq!(l1.dot(&ones(&elem)), elem.area(), epsilon = 1e-10);
        }
    }
}

#[test]
fn method_names() {
    assert_eq!("vem".parse::<MethodKind>().unwrap(), MethodKind::StandardVem);
    assert_eq!("E2VEM".parse::<MethodKind>().unwrap(), MethodKind::E2vem);
    assert!("fem".parse::<MethodKind>().is_err());
    assert_eq!(serde_json::to_string(&MethodKind::E2vem).unwrap(), "\"e2vem\"");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn stiffness_scales_with_tensor(seed in 0u64..1000, n in 3usize..9, k in 1usize..4, t in 0.1f64..10.0) {
        let elem = VemElement::new(polygon(n, seed), k).unwrap();
        let base = DiffusionTensor::constant(1.2, 0.1, 0.5).unwrap();
        for method in MethodKind::ALL {
            let a = local_stiffness(&elem, method, &base).unwrap().a;
            let at = local_stiffness(&elem, method, &base.scaled(t)).unwrap().a;
            prop_assert!((at - a.clone() * t).amax() <= 1e-11 * t * a.amax());
        }
    }

    #[test]
    fn projector_consistency_random_cells(seed in 0u64..1000, n in 3usize..10, k in 1usize..4) {
        let elem = VemElement::new(polygon(n, seed), k).unwrap();
        let gram = monomial_gram(&elem.vertices, &elem.geometry, k).unwrap();
        let pi = build_pi_nabla(&elem, &gram).unwrap();
        prop_assert!(rel_diff(&pi.g, &(&pi.b * &pi.d)) < 1e-11);
        let id = &pi.pi_star * &pi.d;
        prop_assert!((id - DMatrix::identity(pi.d.ncols(), pi.d.ncols())).amax() < 1e-11);
    }
}

#[test]
fn minimal_enlargement_is_rank_deficient_on_rectangles() {
    let rect = vec![v(0., 0.), v(2., 0.), v(2., 1.), v(0., 1.)];
    let elem = VemElement::new(rect, 2).unwrap();
    let id = DiffusionTensor::identity();
    let err = local_stiffness_with(&elem, MethodKind::E2vem, &id, EnlargementPolicy::Minimal).unwrap_err();
    assert!(matches!(err, VemError::StabilizationFree { rank: 7, expected: 8, .. }), "{err}");
    let st = local_stiffness(&elem, MethodKind::E2vem, &id).unwrap();
    assert_eq!(st.projections.ell, min_ell(2, 4) + 1);
    assert_eq!(numerical_rank(&st.a), 8);
}

#[test]
fn minimal_enlargement_suffices_off_symmetry() {
    let quad = vec![v(0., 0.), v(1., 0.), v(1.1, 0.9), v(0., 1.)];
    let elem = VemElement::new(quad, 2).unwrap();
    let id = DiffusionTensor::identity();
    let st = local_stiffness_with(&elem, MethodKind::E2vem, &id, EnlargementPolicy::Minimal).unwrap();
    assert_eq!(st.projections.ell, 1);
}
