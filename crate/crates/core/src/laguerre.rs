//! Associated Laguerre polynomials.

/// `L_n^{(a)}(x)` by the three-term recurrence
/// `(k+1) L_{k+1} = (2k+1+a-x) L_k - (k+a) L_{k-1}`.
///
/// The recurrence is a polynomial identity, so it holds for any real order
/// `a`, including the negative integer orders that appear in Fock-basis
/// matrix elements of the displacement operator.
pub fn associated(n: usize, a: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + a - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + a - x) * cur - (kf + a) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Ordinary Laguerre polynomial `L_n(x)`.
pub fn laguerre(n: usize, x: f64) -> f64 {
    associated(n, 0.0, x)
}

/// `|<m|D(alpha)|n>|^2` for `|alpha|^2 = x`, written with a non-negative
/// Laguerre order so that it stays well conditioned:
/// `(n_<! / n_>!) x^{|m-n|} e^{-x} [L_{n_<}^{(|m-n|)}(x)]^2`.
pub fn displaced_number_probability(m: usize, n: usize, x: f64) -> f64 {
    let (lo, hi) = if m <= n { (m, n) } else { (n, m) };
    let k = hi - lo;
    let l = associated(lo, k as f64, x);
    // n_<!/n_>! * x^k accumulated as a product to avoid overflow
    let mut w = (-x).exp();
    for j in lo + 1..=hi {
        w *= x / j as f64;
    }
    w * l * l
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_orders_explicit() {
        let x = 0.37;
        assert_eq!(associated(0, 2.5, x), 1.0);
        assert!((associated(1, 2.5, x) - (3.5 - x)).abs() < 1e-15);
        // L_2^{(a)} = ((a+1)(a+2) - 2(a+2)x + x^2)/2
        let a = -1.5;
        let l2 = ((a + 1.0) * (a + 2.0) - 2.0 * (a + 2.0) * x + x * x) / 2.0;
        assert!((associated(2, a, x) - l2).abs() < 1e-14);
    }

    #[test]
    fn negative_integer_order_reflection() {
        // L_m^{(-k)}(x) = (-x)^k (m-k)!/m! L_{m-k}^{(k)}(x)
        let x = 1.3;
        for (m, k) in [(3usize, 2usize), (5, 1), (6, 4)] {
            let lhs = associated(m, -(k as f64), x);
            let mut f = 1.0;
            for j in m - k + 1..=m {
                f /= j as f64;
            }
            let rhs = (-x).powi(k as i32) * f * associated(m - k, k as f64, x);
            assert!((lhs - rhs).abs() < 1e-12, "m={m} k={k}");
        }
    }

    #[test]
    fn displaced_probabilities_sum_to_one() {
        for n in [0usize, 1, 3] {
            let total: f64 = (0..200)
                .map(|m| displaced_number_probability(m, n, 2.0))
                .sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }
}
