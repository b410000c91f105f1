//! Anderson mixing for fixed-point maps on real vectors.

use std::collections::VecDeque;

use crate::spectral::dot;

pub(crate) struct Anderson {
    depth: usize,
    prev: Option<(Vec<f64>, Vec<f64>)>,
    /// differences of map outputs and of residuals
    dg: VecDeque<Vec<f64>>,
    df: VecDeque<Vec<f64>>,
}

impl Anderson {
    pub fn new(depth: usize) -> Self {
        Anderson {
            depth,
            prev: None,
            dg: VecDeque::new(),
            df: VecDeque::new(),
        }
    }

    pub fn reset(&mut self) {
        self.prev = None;
        self.dg.clear();
        self.df.clear();
    }

    /// Next iterate from the current point `x` and its image `g = G(x)`.
    pub fn mix(&mut self, x: &[f64], g: &[f64]) -> Vec<f64> {
        let f: Vec<f64> = g.iter().zip(x).map(|(a, b)| a - b).collect();
        if let Some((g_old, f_old)) = self.prev.take() {
            if self.dg.len() == self.depth {
                self.dg.pop_front();
                self.df.pop_front();
            }
            self.dg
                .push_back(g.iter().zip(&g_old).map(|(a, b)| a - b).collect());
            self.df
                .push_back(f.iter().zip(&f_old).map(|(a, b)| a - b).collect());
        }
        self.prev = Some((g.to_vec(), f.clone()));
        let m = self.df.len();
        if m == 0 {
            return g.to_vec();
        }
        let Some(gamma) = least_squares(&self.df, &f) else {
            self.reset();
            self.prev = Some((g.to_vec(), f));
            return g.to_vec();
        };
        let mut out = g.to_vec();
        for (gk, dg) in gamma.iter().zip(&self.dg) {
            for (o, d) in out.iter_mut().zip(dg) {
                *o -= gk * d;
            }
        }
        out
    }
}

/// Minimise `|f - sum_k gamma_k a_k|` through regularised normal equations.
fn least_squares(cols: &VecDeque<Vec<f64>>, f: &[f64]) -> Option<Vec<f64>> {
    let m = cols.len();
    let mut a = vec![vec![0.0; m]; m];
    let mut b = vec![0.0; m];
    for i in 0..m {
        for j in 0..=i {
            let v = dot(&cols[i], &cols[j]);
            a[i][j] = v;
            a[j][i] = v;
        }
        b[i] = dot(&cols[i], f);
    }
    let scale = (0..m).map(|i| a[i][i]).fold(0.0, f64::max);
    if !(scale > 0.0) {
        return None;
    }
    for (i, row) in a.iter_mut().enumerate() {
        row[i] += 1e-12 * scale;
    }
    cholesky_solve(a, b)
}

fn cholesky_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let m = b.len();
    for j in 0..m {
        let d = a[j][j] - a[j][..j].iter().map(|v| v * v).sum::<f64>();
        if !(d > 0.0) {
            return None;
        }
        let d = d.sqrt();
        a[j][j] = d;
        for i in j + 1..m {
            let v = a[i][j]
                - a[i][..j]
                    .iter()
                    .zip(&a[j][..j])
                    .map(|(p, q)| p * q)
                    .sum::<f64>();
            a[i][j] = v / d;
        }
    }
    for i in 0..m {
        for k in 0..i {
            b[i] -= a[i][k] * b[k];
        }
        b[i] /= a[i][i];
    }
    for i in (0..m).rev() {
        for k in i + 1..m {
            b[i] -= a[k][i] * b[k];
        }
        b[i] /= a[i][i];
    }
    Some(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accelerates_linear_map() {
        // x -> A x + c with spectral radius 0.99: plain iteration needs thousands of steps
        let diag = [0.99, 0.5, -0.3, 0.9];
        let c = [1.0, 2.0, 3.0, 4.0];
        let fixed: Vec<f64> = diag.iter().zip(&c).map(|(d, c)| c / (1.0 - d)).collect();
        let mut acc = Anderson::new(5);
        let mut x = vec![0.0; 4];
        for _ in 0..20 {
            let g: Vec<f64> = x
                .iter()
                .zip(diag.iter().zip(&c))
                .map(|(x, (d, c))| d * x + c)
                .collect();
            x = acc.mix(&x, &g);
        }
        for (a, b) in x.iter().zip(&fixed) {
            assert!((a - b).abs() < 1e-8 * b.abs(), "{a} vs {b}");
        }
    }

    #[test]
    fn solves_small_system() {
        let a = vec![vec![4.0, 2.0], vec![2.0, 3.0]];
        let x = cholesky_solve(a, vec![2.0, 1.0]).unwrap();
        assert!((x[0] - 0.5).abs() < 1e-15 && x[1].abs() < 1e-15);
    }
}
