use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::Rational;

fn table() -> &'static RwLock<Vec<BigInt>> {
    static TABLE: OnceLock<RwLock<Vec<BigInt>>> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(vec![BigInt::one()]))
}

/// `n!`, memoized process-wide.
pub fn factorial(n: usize) -> BigInt {
    {
        let t = table().read().expect("factorial table poisoned");
        if let Some(v) = t.get(n) {
            return v.clone();
        }
    }
    let mut t = table().write().expect("factorial table poisoned");
    while t.len() <= n {
        let next = t.last().expect("table is never empty") * BigInt::from(t.len());
        t.push(next);
    }
    t[n].clone()
}

/// `C(n, k)`; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// `a! / b!` as an exact rational.
pub fn factorial_ratio(a: usize, b: usize) -> Rational {
    Rational::new(factorial(a), factorial(b))
}
