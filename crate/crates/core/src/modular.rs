//! Integer helpers for arithmetic in Z/m.

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorization as `(p, e)` pairs in increasing order of `p`.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

pub fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    add_mod(a % m, m - b % m, m)
}

pub fn neg_mod(a: u64, m: u64) -> u64 {
    (m - a % m) % m
}

/// Reduces a signed integer into `0..m`.
pub fn reduce(a: i64, m: u64) -> u64 {
    a.rem_euclid(m as i64) as u64
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// p-adic valuation of `a` inside Z/p^e; returns `e` for zero.
pub fn valuation(a: u64, p: u64, e: u32) -> u32 {
    if a == 0 {
        return e;
    }
    let mut v = 0;
    let mut x = a;
    while x % p == 0 && v < e {
        x /= p;
        v += 1;
    }
    v
}

pub fn pow_u64(base: u64, exp: u32) -> u64 {
    base.checked_pow(exp).expect("integer overflow in power")
}

/// Chinese remaindering of residues modulo pairwise coprime moduli.
pub fn crt(parts: &[(u64, u64)]) -> (u64, u64) {
    let mut acc = (0u64, 1u64);
    for &(r, m) in parts {
        let (a, n) = acc;
        let nm = n * m;
        // a + n * t ≡ r (mod m)
        let t = mul_mod(
            sub_mod(r % m, a % m, m),
            inv_mod(n % m, m).expect("moduli must be coprime"),
            m,
        );
        acc = (add_mod(a, mul_mod(n, t, nm), nm), nm);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_and_primes() {
        assert_eq!(factor(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factor(1), vec![]);
        assert!(is_prime(5) && !is_prime(9) && !is_prime(1));
    }

    #[test]
    fn inverses() {
        assert_eq!(inv_mod(3, 7), Some(5));
        assert_eq!(inv_mod(2, 4), None);
        assert_eq!(inv_mod(5, 9).map(|x| x * 5 % 9), Some(1));
    }

    #[test]
    fn valuation_in_prime_power_ring() {
        assert_eq!(valuation(0, 3, 2), 2);
        assert_eq!(valuation(3, 3, 2), 1);
        assert_eq!(valuation(4, 3, 2), 0);
    }

    #[test]
    fn crt_recombines() {
        let (r, m) = crt(&[(1, 2), (2, 3)]);
        assert_eq!((r, m), (5, 6));
    }
}
