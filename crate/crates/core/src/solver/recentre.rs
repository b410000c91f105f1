use num_complex::Complex64;

use crate::spectral::{shift, Field};

#[derive(Debug, Clone)]
pub struct Recentred {
    pub field: Field,
    /// Position of the peak before translation.
    pub peak: f64,
    /// No isolated peak (e.g. a constant field); `field` is the input.
    pub degenerate: bool,
}

/// Translate `u` so that its largest-magnitude point sits at `x = 0`.
///
/// The grid maximum is refined by a parabola through its neighbours and then
/// by Newton steps on the derivative of the trigonometric interpolant.
pub fn recentre(u: &Field, evenize: bool) -> Recentred {
    let grid = u.grid();
    let n = grid.points();
    let h = grid.spacing();
    let v = u.values();
    let (j, peak) = v.iter().enumerate().fold((0, 0.0f64), |acc, (j, x)| {
        if x.abs() > acc.1 {
            (j, x.abs())
        } else {
            acc
        }
    });
    let floor = v.iter().fold(f64::INFINITY, |m, x| m.min(x.abs()));
    if peak == 0.0 || peak - floor <= 1e-12 * peak {
        return Recentred {
            field: u.clone(),
            peak: 0.0,
            degenerate: true,
        };
    }
    let (a, b, c) = (v[(j + n - 1) % n], v[j], v[(j + 1) % n]);
    let curv = a - 2.0 * b + c;
    let offset = if curv != 0.0 {
        (0.5 * (a - c) / curv).clamp(-0.5, 0.5)
    } else {
        0.0
    };
    let mut x = grid.node(j) + offset * h;

    let coeffs = u.spectrum();
    let xi = grid.wavenumbers();
    let nyq = grid.nyquist();
    for _ in 0..8 {
        let (mut d1, mut d2) = (0.0, 0.0);
        for (k, (ck, &q)) in coeffs.iter().zip(&xi).enumerate() {
            if k == nyq {
                continue;
            }
            let e = ck * Complex64::from_polar(1.0, q * x);
            d1 += (e * Complex64::new(0.0, q)).re;
            d2 -= q * q * e.re;
        }
        if d2 == 0.0 {
            break;
        }
        let step = d1 / d2;
        if !step.is_finite() || step.abs() > h {
            break;
        }
        x -= step;
        if step.abs() < 1e-14 * h {
            break;
        }
    }

    let mut field = shift(u, -x);
    if evenize {
        let w = field.values();
        let sym: Vec<f64> = (0..n).map(|i| 0.5 * (w[i] + w[(n - i) % n])).collect();
        field = Field::from_vec(grid.clone(), sym);
    }
    Recentred {
        field,
        peak: x,
        degenerate: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;

    fn sech(x: f64) -> f64 {
        1.0 / x.cosh()
    }

    #[test]
    fn centred_profile_unchanged() {
        let g = make_grid(80.0, 512).unwrap();
        let u = Field::from_fn(&g, |x| 0.3 * sech(0.5 * x));
        let out = recentre(&u, false);
        assert!(!out.degenerate);
        assert!(out.field.sub(&u).sup_norm() < 1e-12);
    }

    #[test]
    fn shifted_by_nodes() {
        let g = make_grid(120.0, 1024).unwrap();
        let h = g.spacing();
        let u = Field::from_fn(&g, |x| 0.3 * sech(0.5 * x));
        let moved = Field::from_fn(&g, |x| 0.3 * sech(0.5 * (x - 17.0 * h)));
        let out = recentre(&moved, false);
        assert!((out.peak - 17.0 * h).abs() < 1e-10);
        assert!(out.field.sub(&u).sup_norm() < 1e-3);
        let off = Field::from_fn(&g, |x| 0.3 * sech(0.5 * (x + 3.3 * h)));
        let out = recentre(&off, true);
        assert!(out.field.sub(&u).sup_norm() < 1e-10);
    }

    #[test]
    fn negative_peak_found() {
        let g = make_grid(80.0, 512).unwrap();
        let u = Field::from_fn(&g, |x| -sech(x - 4.1));
        let out = recentre(&u, false);
        assert!((out.peak - 4.1).abs() < 1e-9);
    }

    #[test]
    fn constant_is_degenerate() {
        let g = make_grid(10.0, 64).unwrap();
        let u = Field::from_fn(&g, |_| 2.0);
        let out = recentre(&u, true);
        assert!(out.degenerate);
        assert_eq!(out.field.values(), u.values());
    }
}
