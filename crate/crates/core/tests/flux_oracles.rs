//! Flux identities: consistency, the entropy-conservation condition and the
//! dissipation identity `⟨Δz, f⟩ − Δψ = −ΔzᵀDΔz/2`.

use korteweg_core::flux::*;
use korteweg_core::linalg::{asymmetry, mat_axpy, mat_vec, sub, sym_eigenvalues, symmetrize};
use korteweg_core::{Conserved, FluidModel};
use proptest::prelude::*;

fn models() -> [FluidModel; 2] {
    [FluidModel::shallow_water(9.81, 0.01), FluidModel::liu_gollub(0.72, 0.05)]
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[test]
fn all_fluxes_are_consistent() {
    let v = [1.2, 0.5, -0.3];
    for m in models() {
        let f = m.convective_flux(&v).unwrap();
        for kind in [FluxKind::LaxFriedrichs, FluxKind::ModifiedLf, FluxKind::Rusanov, FluxKind::Hll, FluxKind::EntropyConservative] {
            let spec = FluxSpec::new(kind).with_extra_viscosity(0.3);
            let out = interface_flux(&m, &spec, &v, &v, 0.1, true).unwrap();
            for k in 0..3 {
                assert!((out.value[k] - f[k]).abs() < 1e-12 * f[k].abs().max(1.0), "{kind:?}");
            }
            // 𝓖₀(v, v) = G₀(v)
            let g = m.entropy_flux(&v).unwrap();
            assert!((out.entropy_flux - g).abs() < 1e-11 * g.abs().max(1.0), "{kind:?}");
        }
    }
}

#[test]
fn hll_upwinds_supersonic_states() {
    let m = FluidModel::shallow_water(1.0, 0.0);
    let (vl, vr) = ([1.0, 3.0, 0.0], [1.1, 3.5, 0.0]);
    let out = hll_flux(&m, &vl, &vr).unwrap();
    assert_eq!(out.value, m.convective_flux(&vl).unwrap());
    let (vl, vr) = ([1.0, -3.0, 0.0], [1.1, -3.5, 0.0]);
    assert_eq!(hll_flux(&m, &vl, &vr).unwrap().value, m.convective_flux(&vr).unwrap());
}

#[test]
fn viscosity_laws() {
    let m = FluidModel::shallow_water(1.0, 0.0);
    let (vl, vr) = ([1.0, 0.5, 0.0], [4.0, 0.0, 0.0]);
    // max(|u| + c) = max(0.5 + 1, 0 + 2) = 2
    let l1 = 0.25;
    let p = |kind| FluxSpec::new(kind).viscosity(&m, &vl, &vr, l1).unwrap();
    assert_eq!(p(FluxKind::LaxFriedrichs), Some(2.0 + 2.0));
    assert_eq!(p(FluxKind::ModifiedLf), Some(1.0 + 2.0));
    assert_eq!(p(FluxKind::Rusanov), Some(2.0));
    assert_eq!(p(FluxKind::Hll), None);
    assert!(FluxSpec::new(FluxKind::Rusanov).with_extra_viscosity(-1.0).validate().is_err());
}

#[test]
fn quadrature_orders_agree_on_moderate_jumps() {
    let m = FluidModel::liu_gollub(0.72, 0.05);
    let (vl, vr) = ([1.0, 1.0, 0.1], [1.4, 1.2, -0.2]);
    let (zl, zr) = (m.entropy_variables(&vl).unwrap(), m.entropy_variables(&vr).unwrap());
    let a = entropy_conservative_matrix(&m, &zl, &zr, 8).unwrap();
    let b = entropy_conservative_matrix(&m, &zl, &zr, 16).unwrap();
    let d = mat_axpy(&a, -1.0, &b);
    assert!(d.iter().flatten().all(|x| x.abs() < 1e-12));
}

/// Pairs whose entropy-variable segment stays inside `ρ > 0`.
fn admissible(m: &FluidModel, vl: &Conserved, vr: &Conserved) -> bool {
    let (zl, zr) = (m.entropy_variables(vl).unwrap(), m.entropy_variables(vr).unwrap());
    entropy_conservative_matrix(m, &zl, &zr, 16).is_ok()
}

fn pair() -> impl Strategy<Value = (Conserved, Conserved)> {
    let state = (0.4f64..2.5, -1.5f64..1.5, -1.0f64..1.0).prop_map(|(r, u, w)| [r, r * u, r * w]);
    (state.clone(), state)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn entropy_conservative_flux_satisfies_the_shuffle_condition((vl, vr) in pair(), which in 0usize..2) {
        // ⟨z_r − z_l, f*⟩ = ψ(z_r) − ψ(z_l)
        let m = models()[which];
        prop_assume!(admissible(&m, &vl, &vr));
        let (zl, zr) = (m.entropy_variables(&vl).unwrap(), m.entropy_variables(&vr).unwrap());
        let f = entropy_conservative_flux(&m, &zl, &zr, 16).unwrap().value;
        let lhs = dot(&sub(&zr.0, &zl.0), &f);
        let rhs = m.entropy_potential(&zr).unwrap() - m.entropy_potential(&zl).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-9 * rhs.abs().max(1.0), "{lhs} vs {rhs}");
    }

    #[test]
    fn viscosity_matrix_reproduces_the_scalar_dissipation((vl, vr) in pair(), p in 0.0f64..5.0) {
        // Q Δz = p Δv and Q is symmetric
        let m = models()[0];
        prop_assume!(admissible(&m, &vl, &vr));
        let out = scalar_viscosity_flux(&m, &vl, &vr, p, true).unwrap();
        let q = out.viscosity_matrix.unwrap();
        let dz = sub(&m.entropy_variables(&vr).unwrap().0, &m.entropy_variables(&vl).unwrap().0);
        let qdz = mat_vec(&q, &dz);
        for k in 0..3 {
            prop_assert!((qdz[k] - p * (vr[k] - vl[k])).abs() < 1e-9 * (1.0 + p));
        }
        prop_assert!(asymmetry(&q) < 1e-12);
    }

    #[test]
    fn q_star_is_symmetric((vl, vr) in pair(), which in 0usize..2) {
        let m = models()[which];
        prop_assume!(admissible(&m, &vl, &vr));
        let (zl, zr) = (m.entropy_variables(&vl).unwrap(), m.entropy_variables(&vr).unwrap());
        let q = entropy_conservative_matrix(&m, &zl, &zr, 8).unwrap();
        prop_assert!(asymmetry(&q) < 1e-12);
    }

    #[test]
    fn scalar_fluxes_dissipate_exactly_half_the_quadratic_form((vl, vr) in pair(), which in 0usize..2, kind in 0usize..3) {
        let m = models()[which];
        prop_assume!(admissible(&m, &vl, &vr));
        let kind = [FluxKind::LaxFriedrichs, FluxKind::ModifiedLf, FluxKind::Rusanov][kind];
        let spec = FluxSpec::new(kind);
        let out = interface_flux(&m, &spec, &vl, &vr, 0.2, false).unwrap();
        let (zl, zr) = (m.entropy_variables(&vl).unwrap(), m.entropy_variables(&vr).unwrap());
        let dz = sub(&zr.0, &zl.0);
        // ΔzᵀQΔz = p⟨Δz, Δv⟩ exactly, so only Q* carries quadrature error
        let p = spec.viscosity(&m, &vl, &vr, 0.2).unwrap().unwrap();
        let q_star = entropy_conservative_matrix(&m, &zl, &zr, 16).unwrap();
        let production = dot(&dz, &out.value) - (m.entropy_potential(&zr).unwrap() - m.entropy_potential(&zl).unwrap());
        let expected = -0.5 * (p * dot(&dz, &sub(&vr, &vl)) - dot(&dz, &mat_vec(&q_star, &dz)));
        prop_assert!((production - expected).abs() < 1e-9 * expected.abs().max(1.0), "{production} vs {expected}");
    }

    #[test]
    fn lax_friedrichs_dissipation_is_positive_for_moderate_jumps(
        r in 0.5f64..2.0, u in -1.0f64..1.0, w in -0.5f64..0.5,
        dr in -0.1f64..0.1, du in -0.1f64..0.1, dw in -0.1f64..0.1,
    ) {
        let m = models()[0];
        let vl = [r, r * u, r * w];
        let vr = [r + dr, (r + dr) * (u + du), (r + dr) * (w + dw)];
        let out = interface_flux(&m, &FluxSpec::new(FluxKind::Rusanov), &vl, &vr, 0.2, true).unwrap();
        let (zl, zr) = (m.entropy_variables(&vl).unwrap(), m.entropy_variables(&vr).unwrap());
        let d = mat_axpy(&out.viscosity_matrix.unwrap(), -1.0, &entropy_conservative_matrix(&m, &zl, &zr, 8).unwrap());
        prop_assert!(sym_eigenvalues(&symmetrize(&d))[0] >= -1e-12);
    }

    #[test]
    fn reconstruction_stays_between_neighbours_with_minmod(
        a in 0.5f64..2.0, b in 0.5f64..2.0, c in 0.5f64..2.0, d in 0.5f64..2.0,
    ) {
        let w = [[a, 0.0, 0.0], [b, 0.0, 0.0], [c, 0.0, 0.0], [d, 0.0, 0.0]];
        let r = muscl_reconstruct(&w, Limiter::Minmod);
        prop_assert!(!r.fell_back);
        prop_assert!(r.left[0] >= b.min(c) - 1e-15 && r.left[0] <= b.max(c) + 1e-15);
        prop_assert!(r.right[0] >= b.min(c) - 1e-15 && r.right[0] <= b.max(c) + 1e-15);
    }
}
