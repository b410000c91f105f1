use std::fmt;

use serde::Serialize;

use super::expr::Expr;
use super::grid::Grid;
use crate::error::{Error, Result};

/// Even, real Fourier-multiplier symbol.
#[derive(Debug, Clone, PartialEq)]
pub enum Symbol {
    /// `(1 + xi^2)^(order/2)`
    Bessel(f64),
    General(GeneralSymbol),
}

/// A symbol given as a closed-form expression together with its declared
/// growth orders: `order` at high frequency and, for dispersive symbols,
/// `low_order` near the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralSymbol {
    source: String,
    expr: Expr,
    order: f64,
    low_order: Option<f64>,
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Bessel(a) => write!(f, "jb(xi)^{a}"),
            Symbol::General(g) => f.write_str(&g.source),
        }
    }
}

impl Symbol {
    pub fn bessel(order: f64) -> Self {
        Symbol::Bessel(order)
    }

    /// Parse a general symbol. Evenness is enforced on a sample set.
    pub fn general(source: &str, order: f64, low_order: Option<f64>) -> Result<Self> {
        let expr = Expr::parse(source)?;
        let sym = Symbol::General(GeneralSymbol {
            source: source.trim().to_string(),
            expr,
            order,
            low_order,
        });
        for xi in sample_frequencies() {
            let (a, b) = (sym.eval(xi), sym.eval(-xi));
            if !(a.is_finite() && b.is_finite()) {
                return Err(Error::Symbol(format!(
                    "`{source}` is not finite at xi = {xi}"
                )));
            }
            if (a - b).abs() > 1e-12 * a.abs().max(1.0) {
                return Err(Error::Symbol(format!("`{source}` is not even (xi = {xi})")));
            }
        }
        Ok(sym)
    }

    pub fn eval(&self, xi: f64) -> f64 {
        match self {
            Symbol::Bessel(a) => {
                if *a == 0.0 {
                    1.0
                } else {
                    (1.0 + xi * xi).powf(0.5 * a)
                }
            }
            Symbol::General(g) => g.expr.eval(xi),
        }
    }

    /// High-frequency order (`s` for dispersion, `r` for the nonlinear symbol).
    pub fn order(&self) -> f64 {
        match self {
            Symbol::Bessel(a) => *a,
            Symbol::General(g) => g.order,
        }
    }

    pub fn low_order(&self) -> Option<f64> {
        match self {
            Symbol::Bessel(_) => Some(2.0),
            Symbol::General(g) => g.low_order,
        }
    }

    pub fn is_bessel(&self) -> bool {
        matches!(self, Symbol::Bessel(_))
    }

    /// True when the symbol is identically one, so the multiplier is the identity.
    pub fn is_identity(&self) -> bool {
        matches!(self, Symbol::Bessel(a) if *a == 0.0)
    }

    /// Symbol values on the grid wavenumbers (FFT order).
    pub fn weights(&self, grid: &Grid) -> Vec<f64> {
        grid.wavenumbers()
            .into_iter()
            .map(|xi| self.eval(xi))
            .collect()
    }

    pub fn padded_weights(&self, grid: &Grid) -> Vec<f64> {
        grid.padded_wavenumbers()
            .into_iter()
            .map(|xi| self.eval(xi))
            .collect()
    }

    /// Smallest value on the grid; the critical speed for dispersion symbols.
    pub fn grid_minimum(&self, grid: &Grid) -> f64 {
        self.weights(grid).into_iter().fold(f64::INFINITY, f64::min)
    }
}

/// Frequencies used by the structural checks: log-spaced in `[1e-3, 1e6]`.
fn sample_frequencies() -> Vec<f64> {
    let n = 181;
    (0..n)
        .map(|i| 10f64.powf(-3.0 + 9.0 * i as f64 / (n - 1) as f64))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioRange {
    pub min: f64,
    pub max: f64,
}

impl RatioRange {
    fn within(&self, c: f64) -> bool {
        self.min >= 1.0 / c && self.max <= c
    }
}

/// Outcome of the dispersive-symbol checks (evenness, positivity, growth).
#[derive(Debug, Clone, Serialize)]
pub struct SymbolReport {
    pub even: bool,
    pub positive: bool,
    /// `(m(xi) - m(0)) / |xi|^s` over sampled `|xi| >= 1`.
    pub high_ratio: RatioRange,
    /// `(m(xi) - m(0)) / |xi|^s'` over sampled `|xi| < 1`.
    pub low_ratio: RatioRange,
    pub bound: f64,
    pub ratios_bounded: bool,
    pub failures: Vec<String>,
}

impl SymbolReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub const DEFAULT_RATIO_BOUND: f64 = 100.0;

/// Check a dispersion symbol against the structural assumptions: real,
/// positive, even, with `m(xi) - m(0)` comparable to `|xi|^s` for `|xi| >= 1`
/// and to `|xi|^s'` for `|xi| < 1` (ratios confined to `[1/C, C]`).
pub fn check_symbol_assumptions(sym: &Symbol, s: f64, s_low: f64) -> SymbolReport {
    check_symbol_assumptions_with(sym, s, s_low, DEFAULT_RATIO_BOUND)
}

pub fn check_symbol_assumptions_with(sym: &Symbol, s: f64, s_low: f64, bound: f64) -> SymbolReport {
    let freqs = sample_frequencies();
    let m0 = sym.eval(0.0);
    let mut failures = Vec::new();

    let even = freqs.iter().all(|&xi| {
        let (a, b) = (sym.eval(xi), sym.eval(-xi));
        (a - b).abs() <= 1e-12 * a.abs().max(1.0)
    });
    if !even {
        failures.push("symbol is not even".to_string());
    }
    let positive = m0 > 0.0 && freqs.iter().all(|&xi| sym.eval(xi) > 0.0);
    if !positive {
        failures.push("symbol is not positive".to_string());
    }

    let mut high = RatioRange {
        min: f64::INFINITY,
        max: f64::NEG_INFINITY,
    };
    let mut low = high.clone();
    for &xi in &freqs {
        let d = sym.eval(xi) - m0;
        if xi >= 1.0 {
            let q = d / xi.powf(s);
            high.min = high.min.min(q);
            high.max = high.max.max(q);
        } else {
            let q = d / xi.powf(s_low);
            low.min = low.min.min(q);
            low.max = low.max.max(q);
        }
    }
    let finite = [high.min, high.max, low.min, low.max]
        .iter()
        .all(|v| v.is_finite());
    let ratios_bounded = finite && high.within(bound) && low.within(bound);
    if !finite || !high.within(bound) {
        failures.push(format!(
            "high-frequency growth ratio leaves [1/{bound}, {bound}]: [{:.3e}, {:.3e}]",
            high.min, high.max
        ));
    }
    if !finite || !low.within(bound) {
        failures.push(format!(
            "low-frequency growth ratio leaves [1/{bound}, {bound}]: [{:.3e}, {:.3e}]",
            low.min, low.max
        ));
    }
    SymbolReport {
        even,
        positive,
        high_ratio: high,
        low_ratio: low,
        bound,
        ratios_bounded,
        failures,
    }
}

/// Checks on the nonlinear symbol: even, `n(xi) ~ <xi>^r`, and
/// `|n'(xi)| <~ <xi>^(r-1)` (derivative estimated by central differences).
pub fn check_nonlinear_symbol(sym: &Symbol, r: f64) -> SymbolReport {
    let bound = DEFAULT_RATIO_BOUND;
    let freqs = sample_frequencies();
    let mut failures = Vec::new();
    let even = freqs.iter().all(|&xi| {
        let (a, b) = (sym.eval(xi), sym.eval(-xi));
        (a - b).abs() <= 1e-12 * a.abs().max(1.0)
    });
    if !even {
        failures.push("symbol is not even".to_string());
    }
    let positive = sym.eval(0.0) > 0.0 && freqs.iter().all(|&xi| sym.eval(xi) > 0.0);
    let mut size = RatioRange {
        min: f64::INFINITY,
        max: f64::NEG_INFINITY,
    };
    let mut slope = RatioRange { min: 0.0, max: 0.0 };
    for &xi in &freqs {
        let jb = (1.0 + xi * xi).sqrt();
        let q = sym.eval(xi) / jb.powf(r);
        size.min = size.min.min(q);
        size.max = size.max.max(q);
        let h = 1e-5 * xi.max(1.0);
        let dn = (sym.eval(xi + h) - sym.eval(xi - h)) / (2.0 * h);
        slope.max = slope.max.max(dn.abs() / jb.powf(r - 1.0));
    }
    let size_ok = size.min.is_finite() && size.within(bound);
    let slope_ok = slope.max.is_finite() && slope.max <= bound;
    if !size_ok {
        failures.push(format!(
            "n(xi)/<xi>^r leaves [1/{bound}, {bound}]: [{:.3e}, {:.3e}]",
            size.min, size.max
        ));
    }
    if !slope_ok {
        failures.push(format!("|n'(xi)|/<xi>^(r-1) reaches {:.3e}", slope.max));
    }
    SymbolReport {
        even,
        positive,
        high_ratio: size,
        low_ratio: slope,
        bound,
        ratios_bounded: size_ok && slope_ok,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_values() {
        assert_eq!(Symbol::bessel(3.7).eval(0.0), 1.0);
        assert!((Symbol::bessel(2.0).eval(1.0) - 2.0).abs() < 1e-15);
        for xi in [0.1, 1.0, 10.0, 1e3] {
            assert!(Symbol::bessel(0.5).eval(xi) >= 1.0);
            let v = Symbol::bessel(-1.2).eval(xi);
            assert!(v > 0.0 && v <= 1.0);
        }
    }

    #[test]
    fn bessel_two_passes() {
        let rep = check_symbol_assumptions(&Symbol::bessel(2.0), 2.0, 2.0);
        assert!(rep.passed(), "{:?}", rep.failures);
        assert!((rep.high_ratio.min - 1.0).abs() < 1e-9);
        assert!((rep.high_ratio.max - 1.0).abs() < 1e-9);
        assert!((rep.low_ratio.min - 1.0).abs() < 1e-9);
        assert!((rep.low_ratio.max - 1.0).abs() < 1e-9);
    }

    #[test]
    fn negative_symbol_fails_positivity() {
        let sym = Symbol::general("-1", 0.0, Some(2.0)).unwrap();
        let rep = check_symbol_assumptions(&sym, 2.0, 2.0);
        assert!(!rep.positive);
        assert!(!rep.passed());
    }

    #[test]
    fn under_declared_growth_fails() {
        let rep = check_symbol_assumptions(&Symbol::bessel(1.0), 2.0, 2.0);
        assert!(!rep.ratios_bounded);
        assert!(rep.high_ratio.min < 1.0 / DEFAULT_RATIO_BOUND);
    }

    #[test]
    fn general_matches_bessel() {
        let g = Symbol::general("jb(xi)^1.5", 1.5, Some(2.0)).unwrap();
        for xi in [0.0, 0.3, 2.0, 17.0] {
            assert!((g.eval(xi) - Symbol::bessel(1.5).eval(xi)).abs() < 1e-12);
        }
        assert!(check_symbol_assumptions(&g, 1.5, 2.0).passed());
    }

    #[test]
    fn odd_symbol_rejected() {
        assert!(matches!(
            Symbol::general("1 + xi", 1.0, None),
            Err(Error::Symbol(_))
        ));
    }

    #[test]
    fn nonlinear_checks() {
        assert!(check_nonlinear_symbol(&Symbol::bessel(-0.5), -0.5).passed());
        assert!(!check_nonlinear_symbol(&Symbol::bessel(1.0), -1.0).passed());
    }
}
