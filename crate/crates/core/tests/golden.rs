//! Values frozen from independent scipy oracles (BVP integration of the
//! beam equations; dense least-squares projections).

use bezier_bbar::beam::{analytical_solution, beam_errors, solve_beam, BeamDiscretization, BeamProblem};
use bezier_bbar::projection::project_demo_curve;
use bezier_bbar::Formulation;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn beam_closed_form_matches_bvp_oracle() {
    // (l/t, x, [w, φ, M, Q])
    let cases = [
        (10.0, 2.5, [1.044923059584278e-06, 7.222083824506983e-07, -1.670875186064985e+01, -5.433889652230672e+00]),
        (10.0, 10.0, [8.961523999857032e-06, 1.135822490705956e-06, 0.0, 0.0]),
        (1e3, 2.5, [9.977463990380306e-01, 7.222083824506981e-01, -1.670875186064985e+01, -5.433889652230672e+00]),
        (1e3, 10.0, [8.862221246636135e+00, 1.135822490705956e+00, 0.0, 0.0]),
    ];
    for (ratio, x, want) in cases {
        let f = analytical_solution(&BeamProblem::with_slenderness(ratio), x).unwrap();
        let got = [f.w, f.phi, f.moment, f.shear];
        for (g, w) in got.iter().zip(want) {
            if w == 0.0 {
                assert!(g.abs() < 1e-10, "l/t={ratio} x={x}: {g}");
            } else {
                assert!(rel(*g, w) < 1e-9, "l/t={ratio} x={x}: {g} vs {w}");
            }
        }
    }
}

#[test]
fn discrete_tip_deflection_converges_to_oracle() {
    let problem = BeamProblem::with_slenderness(1e3);
    let disc = BeamDiscretization::uniform(3, 32, problem.length).unwrap();
    for f in [Formulation::GlobalBbar, Formulation::NonSymmetricBezier] {
        let sol = solve_beam(&problem, &disc, f).unwrap();
        let tip = *sol.w.last().unwrap();
        assert!(rel(tip, 8.862221246636135) < 1e-6, "{f}: {tip}");
        assert!(beam_errors(&problem, &disc, &sol).unwrap().w < 1e-6);
    }
}

#[test]
fn demo_curve_projections() {
    let bezier_x = [-0.00379824643298405, 0.041729783319967, 0.3403163369228647, 0.7496069402282324, 1.0001471399774318];
    let bezier_y = [-0.00496349827379863, 0.2033931713234226, -0.2042204210357223, 0.20339317132342258, -0.00496349827379843];
    let global_x = [-0.00509497217600942, 0.04389248488469803, 0.3396887906784384, 0.7489667790399003, 1.0002814237009385];
    let global_y = [-0.00295214603212862, 0.19513689478301915, -0.19455295380963097, 0.19513689478301904, -0.00295214603212837];
    let c = project_demo_curve(2, 3).unwrap();
    for k in 0..5 {
        assert!((c.bezier[k][0] - bezier_x[k]).abs() < 1e-12);
        assert!((c.bezier[k][1] - bezier_y[k]).abs() < 1e-12);
        assert!((c.global[k][0] - global_x[k]).abs() < 1e-12);
        assert!((c.global[k][1] - global_y[k]).abs() < 1e-12);
    }
}
