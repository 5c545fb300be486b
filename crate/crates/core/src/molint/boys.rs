//! Boys function `F_n(x) = int_0^1 t^{2n} exp(-x t^2) dt`.

/// Largest order supported.
pub const MAX_ORDER: usize = 16;

// Below this the power series is used, above it the asymptotic form. The
// neglected tail of the asymptotic form is about exp(-x) / (2x - 2n), which is
// under 1e-16 here for every supported order.
const ASYMPTOTIC_THRESHOLD: f64 = 35.0;

/// Evaluates `F_n(x)` for `n <= 16`, `x >= 0`.
pub fn boys(n: usize, x: f64) -> f64 {
    boys_array(n, x)[n]
}

/// Returns `[F_0(x), ..., F_nmax(x)]`, with the top order computed directly and
/// lower orders by downward recursion `F_n = (2x F_{n+1} + e^-x) / (2n + 1)`.
pub fn boys_array(nmax: usize, x: f64) -> Vec<f64> {
    debug_assert!(nmax <= MAX_ORDER, "Boys order {nmax} above supported maximum");
    debug_assert!(x >= 0.0, "Boys argument must be non-negative");
    let mut out = vec![0.0; nmax + 1];
    if x >= ASYMPTOTIC_THRESHOLD {
        // F_n(x) ~ (2n-1)!! / 2^{n+1} * sqrt(pi / x^{2n+1}); upward is stable here
        out[0] = 0.5 * (std::f64::consts::PI / x).sqrt();
        for n in 1..=nmax {
            out[n] = out[n - 1] * (2 * n - 1) as f64 / (2.0 * x);
        }
        return out;
    }
    out[nmax] = series(nmax, x);
    let ex = (-x).exp();
    for n in (0..nmax).rev() {
        out[n] = (2.0 * x * out[n + 1] + ex) / (2 * n + 1) as f64;
    }
    out
}

// F_n(x) = exp(-x) * sum_k (2x)^k / ((2n+1)(2n+3)...(2n+2k+1))
fn series(n: usize, x: f64) -> f64 {
    let mut term = 1.0 / (2 * n + 1) as f64;
    let mut sum = term;
    let mut k = 1usize;
    loop {
        term *= 2.0 * x / (2 * n + 2 * k + 1) as f64;
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
        k += 1;
        if k > 10_000 {
            break;
        }
    }
    sum * (-x).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    // adaptive Simpson quadrature of the defining integral
    fn quad(n: usize, x: f64) -> f64 {
        fn f(n: usize, x: f64, t: f64) -> f64 {
            t.powi(2 * n as i32) * (-x * t * t).exp()
        }
        fn simpson(n: usize, x: f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, eps: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let lm = 0.5 * (a + m);
            let rm = 0.5 * (m + b);
            let flm = f(n, x, lm);
            let frm = f(n, x, rm);
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * eps {
                return left + right + (left + right - whole) / 15.0;
            }
            simpson(n, x, a, m, fa, flm, fm, left, eps / 2.0, depth - 1)
                + simpson(n, x, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
        }
        let (fa, fm, fb) = (f(n, x, 0.0), f(n, x, 0.5), f(n, x, 1.0));
        let whole = (fa + 4.0 * fm + fb) / 6.0;
        simpson(n, x, 0.0, 1.0, fa, fm, fb, whole, 1e-15, 50)
    }

    #[test]
    fn zero_argument() {
        assert_eq!(boys(0, 0.0), 1.0);
        for n in 0..=MAX_ORDER {
            assert!((boys(n, 0.0) - 1.0 / (2 * n + 1) as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn matches_quadrature() {
        assert!((boys(0, 1.0) - 0.746_824_132_812_427).abs() < 1e-12);
        for &x in &[1e-3, 0.1, 0.5, 1.0, 3.7, 10.0, 19.9, 20.1, 34.9, 35.0, 50.0, 120.0] {
            for n in [0, 1, 2, 5, 8, 16] {
                let want = quad(n, x);
                let got = boys(n, x);
                assert!((got - want).abs() < 1e-12, "n={n} x={x}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn downward_recursion_holds() {
        for &x in &[0.1, 1.0, 10.0] {
            let f = boys_array(9, x);
            for n in 0..=8 {
                let rhs = (2.0 * x * f[n + 1] + (-x).exp()) / (2 * n + 1) as f64;
                assert!((f[n] - rhs).abs() < 1e-10);
                // independent evaluation of each order
                assert!((boys(n, x) - f[n]).abs() < 1e-13);
            }
        }
    }
}
