use crate::spectral::Field;

/// Fraction of the box, split between both ends, counted as tail.
const TAIL_FRACTION: f64 = 0.1;

/// `1/2 int u^2` over `|x| >= 0.45 L`; boundary cells count in proportion
/// to their overlap.
pub fn tail_mass(u: &Field) -> f64 {
    let grid = u.grid();
    let h = grid.spacing();
    let edge = 0.5 * grid.length() * (1.0 - TAIL_FRACTION);
    let mut acc = 0.0;
    for (j, v) in u.values().iter().enumerate() {
        let x = grid.node(j);
        // node j owns the cell [x - h/2, x + h/2] (node 0 owns both box ends)
        let (lo, hi) = (x.abs() - 0.5 * h, x.abs() + 0.5 * h);
        let w = ((hi - edge.max(lo)) / h).clamp(0.0, 1.0);
        acc += w * v * v;
    }
    0.5 * acc * h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::mass;
    use crate::spectral::make_grid;

    #[test]
    fn constant_field_tenth() {
        for (l, n) in [(10.0, 64), (7.3, 100), (200.0, 1024)] {
            let g = make_grid(l, n).unwrap();
            let u = Field::from_fn(&g, |_| 1.7);
            assert!((tail_mass(&u) - 0.1 * mass(&u)).abs() < 1e-12 * mass(&u));
        }
    }

    #[test]
    fn central_bump_zero() {
        let g = make_grid(100.0, 512).unwrap();
        let u = Field::from_fn(&g, |x| {
            if x.abs() < 10.0 {
                (1.0 - (x / 10.0).powi(2)).powi(2)
            } else {
                0.0
            }
        });
        assert_eq!(tail_mass(&u), 0.0);
    }
}
