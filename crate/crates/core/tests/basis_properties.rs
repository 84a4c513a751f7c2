use bezier_bbar::extraction::build_extraction;
use bezier_bbar::geometry::Geometry2D;
use bezier_bbar::splines::{eval_bernstein, DerivOrder, KnotVector, SplineSpace};
use nalgebra::DVector;

#[test]
fn cox_de_boor_equals_extracted_bernstein() {
    let spaces = [
        SplineSpace::uniform(2, 5).unwrap(),
        SplineSpace::uniform(4, 3).unwrap(),
        SplineSpace::new(KnotVector::from_interior(3, &[0.2, 0.2, 0.45, 0.7]).unwrap()),
    ];
    for space in &spaces {
        let ext = build_extraction(space);
        let p = space.degree();
        for (e, span) in space.elements().iter().enumerate() {
            for k in 0..=10 {
                let t = k as f64 / 10.0;
                let cdb = space.eval_in_element(e, span.global(t), DerivOrder::First);
                let b = DVector::from_vec(eval_bernstein(p, t, DerivOrder::Value).unwrap());
                let db = DVector::from_vec(eval_bernstein(p, t, DerivOrder::First).unwrap());
                let n = &ext[e].c * b;
                let dn = &ext[e].c * db / span.length();
                for a in 0..=p {
                    assert!((n[a] - cdb.values[a]).abs() < 1e-13);
                    assert!((dn[a] - cdb.derivs[a]).abs() < 1e-10 * (1.0 + dn[a].abs()));
                }
            }
        }
    }
}

#[test]
fn mapped_gradients_match_finite_differences() {
    let geometries = [
        Geometry2D::quarter_annulus(3, 2).unwrap(),
        Geometry2D::cook_membrane(2, 3).unwrap(),
    ];
    let d = 1e-6;
    for g in &geometries {
        for el in g.elements() {
            for &(s, t) in &[(0.3, 0.6), (0.8, 0.1), (0.5, 0.5)] {
                let ep = el.eval(s, t).unwrap();
                let (ps, ms) = (el.eval(s + d, t).unwrap(), el.eval(s - d, t).unwrap());
                let (pt, mt) = (el.eval(s, t + d).unwrap(), el.eval(s, t - d).unwrap());
                // local Jacobian ∂x/∂(s, t)
                let jx = [(ps.x[0] - ms.x[0]) / (2.0 * d), (pt.x[0] - mt.x[0]) / (2.0 * d)];
                let jy = [(ps.x[1] - ms.x[1]) / (2.0 * d), (pt.x[1] - mt.x[1]) / (2.0 * d)];
                let det = jx[0] * jy[1] - jx[1] * jy[0];
                for a in 0..ep.values.len() {
                    let ns = (ps.values[a] - ms.values[a]) / (2.0 * d);
                    let nt = (pt.values[a] - mt.values[a]) / (2.0 * d);
                    // solve Jᵀ ∇N = (N_s, N_t)
                    let gx = (jy[1] * ns - jy[0] * nt) / det;
                    let gy = (-jx[1] * ns + jx[0] * nt) / det;
                    let scale = 1.0 + ep.grads[a][0].abs() + ep.grads[a][1].abs();
                    assert!((gx - ep.grads[a][0]).abs() < 1e-6 * scale);
                    assert!((gy - ep.grads[a][1]).abs() < 1e-6 * scale);
                }
            }
        }
    }
}

#[test]
fn partition_of_unity_on_mapped_elements() {
    let g = Geometry2D::quarter_annulus(4, 3).unwrap();
    for el in g.elements() {
        let ep = el.eval(0.37, 0.81).unwrap();
        let sum: f64 = ep.values.iter().sum();
        let gsum = ep.grads.iter().fold([0.0, 0.0], |acc, v| [acc[0] + v[0], acc[1] + v[1]]);
        assert!((sum - 1.0).abs() < 1e-13);
        assert!(gsum[0].abs() < 1e-11 && gsum[1].abs() < 1e-11);
    }
}
