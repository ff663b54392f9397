//! Quadrature results checked against independent fine-grid computations.

use riskfield::distances::kl_divergence;
use riskfield::grid::Grid;
use riskfield::simulator::analytic_correlation;
use riskfield::{build_grid, mixture_profile, profile_l2, MixtureComponent};

// Trapezoid integral on `points` equally spaced nodes over [0, 1].
fn trapezoid(points: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = 1.0 / (points - 1) as f64;
    let mut s = 0.5 * (f(0.0) + f(1.0));
    for k in 1..points - 1 {
        s += f(k as f64 * h);
    }
    s * h
}

fn gaussian(mean: f64, std: f64) -> impl Fn(f64) -> f64 {
    move |x| (-0.5 * ((x - mean) / std).powi(2)).exp() / (std * (2.0 * std::f64::consts::PI).sqrt())
}

// Mixture density truncated to [0, 1] and renormalized on a `points` grid.
fn fine_mixture(points: usize, comps: &[(f64, f64, f64)]) -> impl Fn(f64) -> f64 {
    let comps = comps.to_vec();
    let raw = move |x: f64| comps.iter().map(|&(w, m, s)| w * gaussian(m, s)(x)).sum::<f64>();
    let mass = trapezoid(points, &raw);
    move |x| raw(x) / mass
}

#[test]
fn correlation_matches_fine_grid() {
    let grid = build_grid(0.0, 1.0, 2001).unwrap();
    let a = mixture_profile(grid, &[MixtureComponent::new(1.0, 0.4, 0.1)]).unwrap();
    let b = mixture_profile(grid, &[MixtureComponent::new(1.0, 0.6, 0.1)]).unwrap();
    let fine = 20_001;
    let fa = fine_mixture(fine, &[(1.0, 0.4, 0.1)]);
    let fb = fine_mixture(fine, &[(1.0, 0.6, 0.1)]);
    let c = trapezoid(fine, |x| fa(x) * fb(x));
    let aa = trapezoid(fine, |x| fa(x) * fa(x));
    let bb = trapezoid(fine, |x| fb(x) * fb(x));
    let oracle = c / (aa * bb).sqrt();
    let rho = analytic_correlation(&a, &b).unwrap();
    assert!((rho - oracle).abs() < 1e-6, "{rho} vs {oracle}");
    // closed form on the real line for comparison: exp(−Δ²/4σ²)
    assert!((oracle - (-0.04f64 / 0.04).exp()).abs() < 5e-3);
}

#[test]
fn kl_matches_fine_grid() {
    let pc = [(1.0, 0.35, 0.08), (0.5, 0.6, 0.1)];
    let qc = [(1.0, 0.5, 0.15)];
    let grid = build_grid(0.0, 1.0, 1001).unwrap();
    let comps = |c: &[(f64, f64, f64)]| c.iter().map(|&(w, m, s)| MixtureComponent::new(w, m, s)).collect::<Vec<_>>();
    let p = mixture_profile(grid, &comps(&pc)).unwrap();
    let q = mixture_profile(grid, &comps(&qc)).unwrap();
    let fine = 10_001;
    let fp = fine_mixture(fine, &pc);
    let fq = fine_mixture(fine, &qc);
    let oracle = trapezoid(fine, |x| fp(x) * (fp(x) / fq(x)).ln());
    let kl = kl_divergence(&p, &q).unwrap();
    assert!(kl.is_finite() && kl > 0.0);
    assert!((kl - oracle).abs() < 1e-4, "{kl} vs {oracle}");
}

#[test]
fn l2_converges_monotonically_under_refinement() {
    let comps = [MixtureComponent::new(1.0, 0.3, 0.07), MixtureComponent::new(0.6, 0.7, 0.12)];
    let mut grid: Grid = build_grid(0.0, 1.0, 65).unwrap();
    let fine = fine_mixture(200_001, &[(1.0, 0.3, 0.07), (0.6, 0.7, 0.12)]);
    let limit = trapezoid(200_001, |x| fine(x).powi(2));
    let mut errors = Vec::new();
    for _ in 0..3 {
        let p = mixture_profile(grid, &comps).unwrap();
        errors.push((profile_l2(&p) - limit).abs());
        grid = grid.refine();
    }
    assert!(errors.windows(2).all(|e| e[1] < e[0]), "{errors:?}");
    // second-order: halving the spacing cuts the error roughly fourfold
    assert!(errors[0] / errors[1] > 3.0 && errors[1] / errors[2] > 3.0, "{errors:?}");
}
