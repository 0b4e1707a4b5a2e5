//! Machine-word modular arithmetic: inverses, CRT, primality, factorization.

use std::collections::BTreeMap;

use num_integer::Integer;

use crate::error::{Error, Result};

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m` in `[0, m)`.
pub fn mod_inverse(a: i128, m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::Domain("modulus must be positive".into()));
    }
    let m_i = m as i128;
    let a_red = a.rem_euclid(m_i);
    let ext = a_red.extended_gcd(&m_i);
    if ext.gcd != 1 {
        if m == 1 {
            return Ok(0);
        }
        return Err(Error::NotInvertible { a: a.to_string(), m });
    }
    Ok(ext.x.rem_euclid(m_i) as u64)
}

/// Combines `x = r_i mod m_i` into `(x mod M, M)` with `M = prod m_i`.
pub fn crt_combine(parts: &[(u64, u64)]) -> Result<(u64, u64)> {
    let mut acc: (u128, u128) = (0, 1);
    for &(r, m) in parts {
        if m == 0 {
            return Err(Error::Domain("modulus must be positive".into()));
        }
        let (x, big_m) = acc;
        if (big_m as u64).gcd(&m) != 1 {
            return Err(Error::NonCoprimeModuli);
        }
        let new_m = big_m * m as u128;
        if new_m > u64::MAX as u128 {
            return Err(Error::Range("combined modulus exceeds 64 bits".into()));
        }
        // x + big_m * t = r (mod m)
        let inv = mod_inverse(big_m as i128, m)?;
        let diff = ((r % m) as i128 - (x % m as u128) as i128).rem_euclid(m as i128) as u64;
        let t = mul_mod(diff, inv, m);
        acc = ((x + big_m * t as u128) % new_m, new_m);
    }
    Ok((acc.0 as u64, acc.1 as u64))
}

pub fn is_prime(n: u64) -> bool {
    primal_check::miller_rabin(n)
}

/// Primes in `[lo, hi]`, ascending.
pub fn primes_between(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(2)..=hi).filter(|&n| is_prime(n)).collect()
}

/// Prime factorization as `prime -> exponent`, via trial division then
/// Brent's variant of Pollard rho for the cofactor.
pub fn factorize(n: u64) -> BTreeMap<u64, u32> {
    let mut out = BTreeMap::new();
    if n <= 1 {
        return out;
    }
    let mut rest = n;
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        while rest.is_multiple_of(p) {
            *out.entry(p).or_insert(0) += 1;
            rest /= p;
        }
    }
    let mut p = 41u64;
    while p <= 1000 && p * p <= rest {
        while rest.is_multiple_of(p) {
            *out.entry(p).or_insert(0) += 1;
            rest /= p;
        }
        p += 2;
    }
    let mut stack = vec![rest];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime(m) {
            *out.entry(m).or_insert(0) += 1;
            continue;
        }
        let d = pollard_rho(m);
        stack.push(d);
        stack.push(m / d);
    }
    out
}

fn pollard_rho(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let f = |x: u64, c: u64| add_mod(mul_mod(x, x, n), c, n);
    for c in 1u64.. {
        let (mut y, m) = (2u64, 128u64);
        let (mut g, mut r, mut q) = (1u64, 1u64, 1u64);
        let (mut x, mut ys) = (0u64, 0u64);
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y, c);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = f(y, c);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += m;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys, c);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_examples() {
        assert_eq!(mod_inverse(2, 5).unwrap(), 3);
        assert_eq!(mod_inverse(-2, 5).unwrap(), 2);
        assert!(matches!(mod_inverse(3, 9), Err(Error::NotInvertible { .. })));
        assert_eq!(mod_inverse(7, 1).unwrap(), 0);
    }

    #[test]
    fn crt_examples() {
        assert_eq!(crt_combine(&[(1, 3), (2, 5)]).unwrap(), (7, 15));
        assert_eq!(crt_combine(&[(0, 4), (3, 9), (1, 5)]).unwrap(), (156, 180));
        assert!(matches!(crt_combine(&[(1, 4), (1, 6)]), Err(Error::NonCoprimeModuli)));
        assert_eq!(crt_combine(&[]).unwrap(), (0, 1));
    }

    #[test]
    fn factorization_examples() {
        let f = factorize(12);
        assert_eq!(f.into_iter().collect::<Vec<_>>(), vec![(2, 2), (3, 1)]);
        let big = 1_000_000_007u64 * 998_244_353;
        let f = factorize(big);
        assert_eq!(f.into_iter().collect::<Vec<_>>(), vec![(998_244_353, 1), (1_000_000_007, 1)]);
        let f = factorize(2u64.pow(10) * 3u64.pow(4) * 1009);
        assert_eq!(f.into_iter().collect::<Vec<_>>(), vec![(2, 10), (3, 4), (1009, 1)]);
        assert!(factorize(1).is_empty());
    }

    #[test]
    fn factorization_reconstructs() {
        for n in 2..5000u64 {
            let prod: u64 = factorize(n).iter().map(|(p, e)| p.pow(*e)).product();
            assert_eq!(prod, n);
        }
    }

    #[test]
    fn primes_small() {
        assert_eq!(primes_between(1, 30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(primes_between(2, 499).len(), 95);
    }
}
