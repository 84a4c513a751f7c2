use bezier_bbar::extraction::{build_dual_extraction, dual_primal_gram, dual_primal_gram_2d};
use bezier_bbar::geometry::{Geometry2D, Interval};
use bezier_bbar::splines::{SplineSpace, TensorSpace2D};
use nalgebra::DMatrix;

fn identity_defect(m: &DMatrix<f64>) -> f64 {
    (m - DMatrix::identity(m.nrows(), m.ncols())).amax()
}

#[test]
fn univariate_duals_up_to_64_elements() {
    let geo = Interval::new(-1.0, 2.5).unwrap();
    for p in 1..=3 {
        for n in [1usize, 2, 3, 8, 17, 64] {
            let space = SplineSpace::uniform(p, n).unwrap();
            let dual = build_dual_extraction(&space, &geo).unwrap();
            let m = dual_primal_gram(&space, &geo, &dual, None).unwrap();
            assert!(identity_defect(&m) < 1e-10, "p={p} n={n}");
        }
    }
}

#[test]
fn nonuniform_knots() {
    let space = SplineSpace::new(bezier_bbar::splines::KnotVector::from_interior(3, &[0.1, 0.15, 0.5, 0.5, 0.9]).unwrap());
    let geo = Interval::unit();
    let dual = build_dual_extraction(&space, &geo).unwrap();
    assert!(identity_defect(&dual_primal_gram(&space, &geo, &dual, None).unwrap()) < 1e-10);
}

#[test]
fn rational_duals_on_annulus() {
    for degree in [2usize, 3] {
        for n in [1usize, 2, 4] {
            let g = Geometry2D::quarter_annulus(degree, n).unwrap();
            let m = dual_primal_gram_2d(g.space(), &g, degree + 3).unwrap();
            assert!(identity_defect(&m) < 1e-9, "p={degree} n={n}: {}", identity_defect(&m));
        }
    }
}

#[test]
fn reduced_spline_duals_on_annulus() {
    let g = Geometry2D::quarter_annulus(4, 4).unwrap();
    let gs = g.space();
    let lower = |s: &SplineSpace| SplineSpace::new(s.knot_vector().with_degree(3).unwrap());
    let space = TensorSpace2D::new(lower(gs.xi()), lower(gs.eta()));
    let m = dual_primal_gram_2d(&space, &g, 6).unwrap();
    assert!(identity_defect(&m) < 1e-9);
}
