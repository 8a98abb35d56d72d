//! The Fourier symbols against the spectrum of the assembled periodic grid operator.

use korteweg_core::vn_stability::*;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

/// Linear semi-discrete operator on `n` periodic cells, unknowns `(ρ_j, m_j)` interleaved.
///
/// The interface flux is `A(v_L + v_R)/2 − (q/2)(v_R − v_L)` plus the capillary
/// flux `−B(ρ_{j+2} − ρ_{j+1} − ρ_j + ρ_{j−1})/(2δx²)`, whose difference is the
/// five-point third derivative. With `muscl` the states are the unlimited
/// reconstructions `v_L = v_j + (v_{j+1} − v_{j−1})/4`, `v_R = v_{j+1} − (v_{j+2} − v_j)/4`.
fn grid_operator(setup: &LinearizedSetup, q: f64, n: usize, dx: f64, muscl: bool) -> DMatrix<f64> {
    let a = setup.matrix_a();
    let s = setup.sigma_bar;
    // interface j+1/2 flux as weights on cells j−1, j, j+1, j+2
    let (wl, wr): ([f64; 4], [f64; 4]) = if muscl {
        ([-0.25, 1.0, 0.25, 0.0], [0.0, 0.25, 1.0, -0.25])
    } else {
        ([0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0])
    };
    let cap = [1.0, -1.0, -1.0, 1.0];
    let mut flux = vec![[[0.0; 2]; 2]; 4];
    for k in 0..4 {
        for r in 0..2 {
            for c in 0..2 {
                let avg = 0.5 * a[r][c] * (wl[k] + wr[k]);
                let visc = if r == c { -0.5 * q * (wr[k] - wl[k]) } else { 0.0 };
                flux[k][r][c] = avg + visc;
            }
        }
        // momentum row, density column
        flux[k][1][0] -= s * cap[k] / (2.0 * dx * dx);
    }
    let mut l = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for j in 0..n {
        // −(F_{j+1/2} − F_{j−1/2})/δx
        for (sign, base) in [(-1.0, j as isize), (1.0, j as isize - 1)] {
            for k in 0..4 {
                let cell = (base - 1 + k as isize).rem_euclid(n as isize) as usize;
                for r in 0..2 {
                    for c in 0..2 {
                        l[(2 * j + r, 2 * cell + c)] += sign * flux[k][r][c] / dx;
                    }
                }
            }
        }
    }
    l
}

fn predicted(setup: &LinearizedSetup, scheme: &SpatialScheme, n: usize, dx: f64, dt: f64) -> Vec<Complex64> {
    let mut out = Vec::new();
    for m in 0..n {
        let k = std::f64::consts::TAU * m as f64 / (n as f64 * dx);
        let xi = 2.0 / dx * (0.5 * k * dx).sin();
        for lam in symbol_eigenvalues(setup, scheme, xi, dx, dt).unwrap() {
            let g = Complex64::new(0.0, xi) * lam;
            out.push(g);
            out.push(g.conj());
        }
    }
    out
}

fn assert_spectra_match(setup: &LinearizedSetup, scheme: &SpatialScheme, q: f64, muscl: bool) {
    let (n, dx, dt) = (48, 0.05, 1e-3);
    let l = grid_operator(setup, q, n, dx, muscl);
    let pred = predicted(setup, scheme, n, dx, dt);
    let scale = pred.iter().fold(1.0_f64, |a, z| a.max(z.norm()));
    for ev in l.complex_eigenvalues().iter() {
        let d = pred.iter().map(|p| (p - ev).norm()).fold(f64::INFINITY, f64::min);
        assert!(d < 1e-8 * scale, "{scheme:?}: grid eigenvalue {ev} unmatched (distance {d:e})");
    }
}

#[test]
fn first_order_symbol_matches_the_grid_operator() {
    let setup = LinearizedSetup::from_parameters(1.3, 0.4, 0.02).unwrap();
    let (dx, dt) = (0.05, 1e-3);
    let lambda1 = dt / dx;
    for scheme in [SpatialScheme::LAX_FRIEDRICHS, SpatialScheme::MODIFIED_LF, SpatialScheme::RUSANOV, SpatialScheme::CENTERED] {
        let q = scheme.scalar_q(&setup, lambda1).unwrap();
        assert_spectra_match(&setup, &scheme, q, false);
    }
}

#[test]
fn muscl_symbol_matches_the_grid_operator() {
    let setup = LinearizedSetup::from_parameters(0.9, -0.3, 0.05).unwrap();
    let (dx, dt) = (0.05, 1e-3);
    let lambda1 = dt / dx;
    for scheme in [SpatialScheme::MUSCL_LF, SpatialScheme::MUSCL_RUSANOV, SpatialScheme::MUSCL_CENTERED] {
        // the MUSCL symbol carries Q = 2λ₁p for an interface viscosity p
        let q = 0.5 * scheme.scalar_q(&setup, lambda1).unwrap();
        assert_spectra_match(&setup, &scheme, q, true);
    }
}

#[test]
fn godunov_symbol_matches_the_grid_operator() {
    let setup = LinearizedSetup::from_parameters(1.0, 0.35, 0.01).unwrap();
    let (n, dx, dt) = (40, 0.05, 1e-3);
    let abs_a = setup.godunov_abs_a().unwrap();
    // replace the scalar viscosity by |A| entrywise
    let a = setup.matrix_a();
    let s = setup.sigma_bar;
    let mut l = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for j in 0..n {
        for (sign, base) in [(-1.0, j as isize), (1.0, j as isize - 1)] {
            let cells: Vec<usize> = (-1..3).map(|k| (base + k).rem_euclid(n as isize) as usize).collect();
            for r in 0..2 {
                for c in 0..2 {
                    let w_l = 0.5 * a[r][c] + 0.5 * abs_a[r][c];
                    let w_r = 0.5 * a[r][c] - 0.5 * abs_a[r][c];
                    l[(2 * j + r, 2 * cells[1] + c)] += sign * w_l / dx;
                    l[(2 * j + r, 2 * cells[2] + c)] += sign * w_r / dx;
                }
            }
            for (k, w) in [1.0, -1.0, -1.0, 1.0].iter().enumerate() {
                l[(2 * j + 1, 2 * cells[k])] -= sign * s * w / (2.0 * dx * dx * dx);
            }
        }
    }
    let pred = predicted(&setup, &SpatialScheme::GODUNOV_ROE, n, dx, dt);
    let scale = pred.iter().fold(1.0_f64, |a, z| a.max(z.norm()));
    for ev in l.complex_eigenvalues().iter() {
        let d = pred.iter().map(|p| (p - ev).norm()).fold(f64::INFINITY, f64::min);
        assert!(d < 1e-8 * scale, "grid eigenvalue {ev} unmatched (distance {d:e})");
    }
}

#[test]
fn closed_forms_match_the_assembled_symbols() {
    let setup = LinearizedSetup::from_parameters(1.1, 0.2, 0.03).unwrap();
    let (dx, dt) = (0.02, 4e-4);
    for k in 0..=40 {
        let xi = -2.0 / dx + 4.0 / dx * k as f64 / 40.0;
        for (scheme, muscl) in [(SpatialScheme::LAX_FRIEDRICHS, false), (SpatialScheme::RUSANOV, false), (SpatialScheme::MUSCL_LF, true)] {
            let q = scheme.scalar_q(&setup, dt / dx).unwrap();
            let closed = if muscl {
                muscl_lf_family_eigenvalues(&setup, q, xi, dx).unwrap()
            } else {
                lf_family_eigenvalues(&setup, q, xi, dx).unwrap()
            };
            let mut num = symbol_eigenvalues(&setup, &scheme, xi, dx, dt).unwrap();
            num.sort_by(|a, b| a.re.total_cmp(&b.re));
            for i in 0..2 {
                assert!((closed[i] - num[i]).norm() < 1e-9 * closed[i].norm().max(1.0), "xi {xi}: {} vs {}", closed[i], num[i]);
            }
        }
    }
}

#[test]
fn theta_amplification_matches_the_rational_factor() {
    let lam = Complex64::new(0.7, 0.3);
    let (xi, dt) = (3.0, 0.1);
    let x = Complex64::new(0.0, xi * dt) * lam;
    for theta in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let g = amplification(&TemporalScheme::Theta(theta), lam, xi, dt).unwrap();
        let expected = ((1.0 + (1.0 - theta) * x) / (1.0 - theta * x)).norm();
        assert!((g - expected).abs() < 1e-14);
    }
    let rk2 = amplification(&TemporalScheme::RungeKutta2, lam, xi, dt).unwrap();
    assert!((rk2 - (1.0 + x + 0.5 * x * x).norm()).abs() < 1e-14);
}

#[test]
fn godunov_diagnostic_sign_matches_the_symbol_at_large_xi() {
    // the leading-order form predicts which branch has a negative ξ·Im Λ
    let setup = LinearizedSetup::from_parameters(1.0, 0.3, 0.05).unwrap();
    let (dx, dt) = (0.01, 1e-5);
    let xi = 1.5 / dx;
    let asym = godunov_asymptotic_xi_imag(&setup, xi, dx).unwrap();
    let mut ev = symbol_eigenvalues(&setup, &SpatialScheme::GODUNOV_ROE, xi, dx, dt).unwrap();
    ev.sort_by(|a, b| (xi * a.im).total_cmp(&(xi * b.im)));
    assert!(asym[0] < 0.0 && xi * ev[0].im < 0.0);
    assert!(asym[1] > 0.0 && xi * ev[1].im > 0.0);
}

/// Largest δt with `(1 − 2Θ)(s q² + (1 − s)(ū ± X(s))²) λ₁/q ≤ 1` for all `s ∈ [0, 1]`,
/// `X(s) = √(c̄² + 4σ̄s/δx²)`: the Θ-scheme factor of `Λ±` has modulus at most one
/// exactly when this holds.
fn exact_scalar_bound(setup: &LinearizedSetup, scheme: &SpatialScheme, theta: f64, dx: f64) -> f64 {
    let ok = |dt: f64| {
        let l1 = dt / dx;
        let q = scheme.scalar_q(setup, l1).unwrap();
        (0..=4096).all(|k| {
            let s = k as f64 / 4096.0;
            let x = (setup.c_bar.powi(2) + 4.0 * setup.sigma_bar * s / (dx * dx)).sqrt();
            [setup.u_bar - x, setup.u_bar + x]
                .iter()
                .all(|y| (1.0 - 2.0 * theta) * (s * q * q + (1.0 - s) * y * y) * l1 / q <= 1.0)
        })
    };
    let (mut lo, mut hi) = (1e-12, 10.0 * dx);
    while hi - lo > 1e-9 * lo {
        let mid = (lo * hi).sqrt();
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn setup_strategy() -> impl Strategy<Value = LinearizedSetup> {
    (0.3f64..3.0, -1.5f64..1.5, 0.0f64..0.1)
        .prop_map(|(c, u, s)| LinearizedSetup::from_parameters(c, u, s).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn implicit_half_theta_is_unconditionally_stable(
        setup in setup_strategy(),
        theta in 0.5f64..=1.0,
        log_dt in -6.0f64..1.0,
        which in 0usize..3,
    ) {
        let scheme = [SpatialScheme::LAX_FRIEDRICHS, SpatialScheme::RUSANOV, SpatialScheme::MUSCL_LF][which];
        let v = stability_scan(&setup, &scheme, &TemporalScheme::Theta(theta), 0.02, 10f64.powf(log_dt), 257).unwrap();
        prop_assert!(v.stable, "max amplification {}", v.max_amplification);
        prop_assert!(v.necessary_condition);
    }

    #[test]
    fn critical_dt_matches_the_exact_scalar_condition(setup in setup_strategy(), theta in 0.0f64..0.45, which in 0usize..3) {
        let scheme = [SpatialScheme::LAX_FRIEDRICHS, SpatialScheme::MODIFIED_LF, SpatialScheme::RUSANOV][which];
        let dx = 0.02;
        let temporal = TemporalScheme::Theta(theta);
        let found = critical_dt_bisection(&setup, &scheme, &temporal, dx, 1e-4, 1025).unwrap();
        prop_assert_eq!(found.status, CriticalStatus::Bracketed);
        let exact = exact_scalar_bound(&setup, &scheme, theta, dx);
        prop_assert!((found.dt - exact).abs() < 2e-3 * exact, "bisection {} vs exact {}", found.dt, exact);
    }

    #[test]
    fn amplification_is_even_in_the_symbol_branch_conjugation(
        re in -3.0f64..3.0, im in 0.0f64..3.0, xi in -50.0f64..50.0, dt in 1e-4f64..0.1,
    ) {
        // a dissipative eigenvalue (ξ Im Λ ≥ 0) never grows under CN
        let lam = Complex64::new(re, im * xi.signum());
        let g = amplification(&TemporalScheme::CrankNicolson, lam, xi, dt).unwrap();
        prop_assert!(g <= 1.0 + 1e-12);
    }
}
