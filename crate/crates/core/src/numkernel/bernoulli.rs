use std::sync::Mutex;

use rug::{Integer, Rational};

// B_0, B_1, B_2, ... as exact rationals. Exact values make the cache
// invisible to callers.
static TABLE: Mutex<Vec<Rational>> = Mutex::new(Vec::new());

fn extend_to(table: &mut Vec<Rational>, n: usize) {
    if table.is_empty() {
        table.push(Rational::from(1));
    }
    while table.len() <= n {
        let m = table.len();
        // sum_{j<m} C(m+1, j) B_j + (m+1) B_m = 0
        let mut acc = Rational::new();
        let mut binom = Integer::from(1);
        for (j, b) in table.iter().enumerate() {
            acc += Rational::from(&binom * b.numer()) / b.denom().clone();
            binom *= (m + 1 - j) as u64;
            binom /= (j + 1) as u64;
        }
        acc /= (m + 1) as u64;
        table.push(-acc);
    }
}

/// The Bernoulli number B_{2k}.
pub fn bernoulli_b2k(k: usize) -> Rational {
    let mut t = TABLE.lock().unwrap_or_else(|e| e.into_inner());
    extend_to(&mut t, 2 * k);
    t[2 * k].clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert_eq!(bernoulli_b2k(0), Rational::from(1));
        assert_eq!(bernoulli_b2k(1), Rational::from((1, 6)));
        assert_eq!(bernoulli_b2k(2), Rational::from((-1, 30)));
        assert_eq!(bernoulli_b2k(3), Rational::from((1, 42)));
        assert_eq!(bernoulli_b2k(6), Rational::from((691, -2730)));
        assert_eq!(bernoulli_b2k(10), Rational::from((-174611, 330)));
    }
}
