use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 48;

/// Adaptive Simpson quadrature of `f` on `[a, b]` to relative tolerance `rel_tol`.
///
/// The interval is pre-split into `panels` equal pieces so that narrow
/// features (ring-shaped mode intensities) are not stepped over.
pub fn adaptive_simpson(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    rel_tol: f64,
    panels: usize,
) -> Result<f64> {
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    // Coarse estimate fixes the absolute tolerance scale.
    let coarse: f64 = (0..panels)
        .map(|k| {
            let (x0, x1) = (a + k as f64 * h, a + (k + 1) as f64 * h);
            simpson(&f, x0, x1).2.abs()
        })
        .sum();
    let abs_tol = (rel_tol * coarse).max(f64::MIN_POSITIVE);
    let mut total = 0.0;
    for k in 0..panels {
        let (x0, x1) = (a + k as f64 * h, a + (k + 1) as f64 * h);
        let (fm, m, whole) = simpson(&f, x0, x1);
        let (f0, f1) = (f(x0), f(x1));
        total += recurse(&f, x0, x1, f0, fm, f1, m, whole, abs_tol / panels as f64, MAX_DEPTH)
            .ok_or(Error::Quadrature { a: x0, b: x1 })?;
    }
    Ok(total)
}

fn simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64, f64) {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    (fm, m, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    m: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Option<f64> {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Some(left + right + delta / 15.0);
    }
    if depth == 0 {
        return None;
    }
    let l = recurse(f, a, m, fa, flm, fm, lm, left, tol / 2.0, depth - 1)?;
    let r = recurse(f, m, b, fm, frm, fb, rm, right, tol / 2.0, depth - 1)?;
    Some(l + r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_and_gaussian() {
        let v = adaptive_simpson(|x| x * x, 0.0, 3.0, 1e-12, 1).unwrap();
        assert!((v - 9.0).abs() < 1e-12);
        let v = adaptive_simpson(|x| (-x * x).exp(), -10.0, 10.0, 1e-10, 8).unwrap();
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn non_convergence_reported() {
        let r = adaptive_simpson(|x| if x > 0.3 { f64::NAN } else { 0.0 }, 0.0, 1.0, 1e-8, 1);
        assert!(r.is_err());
    }
}
