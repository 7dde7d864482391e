//! Small integer helpers shared across modules.

pub(crate) fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

/// Prime factorization as (prime, exponent) pairs, ascending primes.
pub(crate) fn factorize(mut n: usize) -> Vec<(usize, u32)> {
    let mut out = Vec::new();
    let mut k = 2;
    while k * k <= n {
        if n % k == 0 {
            let mut e = 0;
            while n % k == 0 {
                n /= k;
                e += 1;
            }
            out.push((k, e));
        }
        k += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// If `d = p^r` for a prime `p`, returns `(p, r)`.
pub(crate) fn prime_power(d: usize) -> Option<(usize, u32)> {
    let f = factorize(d);
    if f.len() == 1 {
        Some(f[0])
    } else {
        None
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    if a == 0 {
        1
    } else {
        a
    }
}

/// Binomial coefficient with overflow checking.
pub(crate) fn binomial_checked(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)?;
        acc /= (i + 1) as u128;
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        let primes: Vec<usize> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn factorization() {
        assert_eq!(factorize(12), vec![(2, 2), (3, 1)]);
        assert_eq!(factorize(35), vec![(5, 1), (7, 1)]);
        assert_eq!(factorize(49), vec![(7, 2)]);
        assert_eq!(prime_power(8), Some((2, 3)));
        assert_eq!(prime_power(6), None);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial_checked(4, 2), Some(6));
        assert_eq!(binomial_checked(9, 3), Some(84));
        assert_eq!(binomial_checked(16, 4), Some(1820));
        assert_eq!(binomial_checked(25, 5), Some(53130));
        assert_eq!(binomial_checked(49, 7), Some(85_900_584));
    }
}
