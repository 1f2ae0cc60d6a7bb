use limitcycle::integrator::{integrate, limit_cycle, limit_cycle_from, IntegratorConfig};
use limitcycle::oscillators::{rayleigh_vdp_link, OscillatorSpec, PhasePoint};
use proptest::prelude::*;

fn cfg() -> IntegratorConfig {
    IntegratorConfig::default()
}

#[test]
fn anchor_amplitudes() {
    let r1 = limit_cycle(&OscillatorSpec::rayleigh(1.0).unwrap(), &cfg()).unwrap();
    assert!((r1.amplitude - 2.17271).abs() < 1e-4, "{}", r1.amplitude);
    assert!(r1.converged);
    let r7 = limit_cycle(&OscillatorSpec::rayleigh(7.0).unwrap(), &cfg()).unwrap();
    assert!((r7.amplitude - 5.63108).abs() < 1e-4, "{}", r7.amplitude);
    let v1 = limit_cycle(&OscillatorSpec::van_der_pol(1.0).unwrap(), &cfg()).unwrap();
    assert!((v1.amplitude - 2.0086).abs() < 1e-4, "{}", v1.amplitude);
}

#[test]
fn cycles_are_odd_symmetric() {
    for spec in [
        OscillatorSpec::rayleigh(2.5).unwrap(),
        OscillatorSpec::van_der_pol(4.0).unwrap(),
    ] {
        assert!(spec.is_odd_symmetric());
        let c = limit_cycle(&spec, &cfg()).unwrap();
        assert!((c.y_max() + c.y_min()).abs() < 1e-5, "{} {}", c.y_max(), c.y_min());
        let zmax = c.samples.iter().map(|p| p.z).fold(f64::MIN, f64::max);
        let zmin = c.samples.iter().map(|p| p.z).fold(f64::MAX, f64::min);
        assert!((zmax + zmin).abs() < 1e-3 * zmax, "{zmax} {zmin}");
        assert!(c.closure_gap < 1e-4);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn amplitude_does_not_depend_on_seed(
        eps in 0.3f64..6.0,
        r in 0.2f64..4.0,
        angle in 0.0f64..std::f64::consts::TAU,
        vdp in any::<bool>(),
    ) {
        let spec = if vdp {
            OscillatorSpec::van_der_pol(eps).unwrap()
        } else {
            OscillatorSpec::rayleigh(eps).unwrap()
        };
        let base = limit_cycle(&spec, &cfg()).unwrap().amplitude;
        let other = limit_cycle_from(&spec, (r * angle.cos(), r * angle.sin()), &cfg())
            .unwrap()
            .amplitude;
        prop_assert!((base - other).abs() < 1e-5 * base, "{} vs {}", base, other);
    }
}

#[test]
fn rayleigh_velocity_obeys_van_der_pol() {
    let eps = 1.7;
    let spec = OscillatorSpec::rayleigh(eps).unwrap();
    let tight = IntegratorConfig {
        rel_tol: 1e-12,
        abs_tol: 1e-13,
        ..cfg()
    };
    let h = 1e-3;
    // dense uniformly spaced window around several times on one trajectory
    let traj = integrate(&spec, PhasePoint::new(0.0, 0.5, 0.1), 30.0, &tight).unwrap();
    let mut checked = 0;
    for t in [3.0, 7.5, 12.25, 20.0, 29.0] {
        let p = traj
            .iter()
            .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
            .copied()
            .unwrap();
        let end = p.t + 2.5 * h;
        let seg = integrate(&spec, p, end, &IntegratorConfig { max_step: h, ..tight.clone() })
            .unwrap();
        let at = |s: f64| {
            seg.iter()
                .min_by(|a, b| (a.t - s).abs().total_cmp(&(b.t - s).abs()))
                .copied()
                .unwrap()
        };
        let window = [at(p.t), at(p.t + h), at(p.t + 2.0 * h)];
        if (window[1].t - window[0].t - h).abs() > 1e-12 || (window[2].t - window[1].t - h).abs() > 1e-12 {
            continue;
        }
        let r = rayleigh_vdp_link(&spec, window).unwrap();
        assert!(r.abs() < 1e-5, "t={t}: {r}");
        checked += 1;
    }
    assert!(checked >= 3, "only {checked} evenly spaced windows");
}
