use afcoam::afc::{analytic_efficiency, build_comb, propagate_echo, OpticalPulse, ToothShape};

const FINESSES: [f64; 4] = [2.0, 3.0, 5.0, 10.0];
const DEPTHS: [f64; 5] = [0.5, 1.0, 2.0, 3.0, 4.0];

#[test]
fn simulated_echo_matches_closed_form() {
    for shape in [ToothShape::Square, ToothShape::Gaussian] {
        for f in FINESSES {
            for d in DEPTHS {
                let comb = build_comb(25e6, f, d, 0.0, 1e9, shape).unwrap();
                let pulse = OpticalPulse::gaussian_for(&comb, 6e-9, 0.0).unwrap();
                let r = propagate_echo(&pulse, &comb).unwrap();
                let eta = analytic_efficiency(f, d, 0.0, shape).unwrap();
                assert!(
                    (r.efficiency - eta).abs() <= 0.02,
                    "{shape:?} F={f} d={d}: simulated {} analytic {eta}",
                    r.efficiency
                );
                assert!(r.output_energy <= 1.0 + 1e-9, "{shape:?} F={f} d={d}: {}", r.output_energy);
                if r.efficiency > 1e-4 {
                    assert!(
                        (r.echo_time - 40e-9).abs() <= r.dt,
                        "{shape:?} F={f} d={d}: t_echo {} dt {}",
                        r.echo_time,
                        r.dt
                    );
                }
            }
        }
    }
}

#[test]
fn background_absorption_scales_echo() {
    let clean = build_comb(25e6, 2.0, 3.0, 0.0, 1e9, ToothShape::Square).unwrap();
    let lossy = build_comb(25e6, 2.0, 3.0, 0.5, 1e9, ToothShape::Square).unwrap();
    let eta = |c| {
        let p = OpticalPulse::gaussian_for(c, 6e-9, 0.0).unwrap();
        propagate_echo(&p, c).unwrap().efficiency
    };
    let ratio = eta(&lossy) / eta(&clean);
    assert!((ratio - (-0.5f64).exp()).abs() < 0.02, "{ratio}");
}
