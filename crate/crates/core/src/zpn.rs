//! Residues modulo `p^n`, stored as `u64` in `[0, p^n)`.

use crate::error::{Error, Result};

/// The ring `Z/p^n`. The modulus must stay below `2^62`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Zpn {
    pub p: u64,
    pub n: u32,
    pub q: u64,
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Zpn {
    pub fn new(p: u64, n: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::BadRing(format!("{p} is not prime")));
        }
        if n == 0 {
            return Err(Error::BadRing("precision must be at least 1".into()));
        }
        let mut q: u64 = 1;
        for _ in 0..n {
            q = q
                .checked_mul(p)
                .filter(|&v| v < (1u64 << 62))
                .ok_or_else(|| Error::BadRing(format!("{p}^{n} too large")))?;
        }
        Ok(Zpn { p, n, q })
    }

    #[inline]
    pub fn reduce(&self, x: u64) -> u64 {
        x % self.q
    }

    #[inline]
    pub fn from_i64(&self, x: i64) -> u64 {
        x.rem_euclid(self.q as i64) as u64
    }

    #[inline]
    pub fn from_i128(&self, x: i128) -> u64 {
        x.rem_euclid(self.q as i128) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.q as u128) as u64
    }

    /// `a + b*c`.
    #[inline]
    pub fn mul_add(&self, a: u64, b: u64, c: u64) -> u64 {
        ((a as u128 + b as u128 * c as u128) % self.q as u128) as u64
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1 % self.q;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    /// `p^k` as an integer (not reduced; `k <= n`).
    pub fn p_pow(&self, k: u32) -> u64 {
        self.p.pow(k)
    }

    /// p-adic valuation of the residue; `n` for zero.
    #[inline]
    pub fn val(&self, mut a: u64) -> u32 {
        if a == 0 {
            return self.n;
        }
        let mut v = 0;
        while a % self.p == 0 {
            a /= self.p;
            v += 1;
        }
        v
    }

    /// Splits `a = p^v * w` with `w` a unit, for `a != 0`.
    pub fn split(&self, a: u64) -> (u32, u64) {
        let v = self.val(a);
        (v, a / self.p.pow(v))
    }

    pub fn is_unit(&self, a: u64) -> bool {
        a % self.p != 0
    }

    pub fn inv(&self, a: u64) -> Result<u64> {
        if !self.is_unit(a) {
            return Err(Error::NotAUnit);
        }
        let (mut r0, mut r1) = (self.q as i128, a as i128);
        let (mut s0, mut s1) = (0i128, 1i128);
        while r1 != 0 {
            let t = r0 / r1;
            (r0, r1) = (r1, r0 - t * r1);
            (s0, s1) = (s1, s0 - t * s1);
        }
        Ok(self.from_i128(s0))
    }

    /// Exact quotient `a / p^k` in `Z/p^(n-k)`, lifted to `[0, p^(n-k))`.
    pub fn div_p_pow(&self, a: u64, k: u32) -> Result<u64> {
        let pk = self.p.pow(k);
        if a % pk != 0 {
            return Err(Error::NotDivisible);
        }
        Ok(a / pk)
    }

    pub fn with_precision(&self, n: u32) -> Result<Zpn> {
        Zpn::new(self.p, n)
    }
}

/// p-adic valuation of `k!`.
pub fn val_factorial(p: u64, k: u64) -> u64 {
    let mut v = 0;
    let mut t = k / p;
    while t > 0 {
        v += t;
        t /= p;
    }
    v
}

/// Unit part of `k!` modulo `p^n`, i.e. `k! / p^v(k!)`.
pub fn factorial_unit(z: &Zpn, k: u64) -> u64 {
    let mut r = 1 % z.q;
    for j in 1..=k {
        let mut t = j;
        while t % z.p == 0 {
            t /= z.p;
        }
        r = z.mul(r, t % z.q);
    }
    r
}

/// `a! / (b! c!)` reduced modulo `p^n`, for `a >= b + c`. Always an integer.
pub fn factorial_ratio(z: &Zpn, a: u64, b: u64, c: u64) -> u64 {
    debug_assert!(a >= b + c);
    let v = val_factorial(z.p, a) - val_factorial(z.p, b) - val_factorial(z.p, c);
    if v >= z.n as u64 {
        return 0;
    }
    let num = factorial_unit(z, a);
    let den = z.mul(factorial_unit(z, b), factorial_unit(z, c));
    z.mul(z.mul(num, z.inv(den).expect("unit")), z.p.pow(v as u32) % z.q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_in_z9() {
        let z = Zpn::new(3, 2).unwrap();
        assert_eq!(z.inv(4).unwrap(), 7);
        assert_eq!(z.inv(3), Err(Error::NotAUnit));
    }

    #[test]
    fn valuation_and_split() {
        let z = Zpn::new(2, 4).unwrap();
        assert_eq!(z.val(0), 4);
        assert_eq!(z.val(12), 2);
        assert_eq!(z.split(12), (2, 3));
    }

    #[test]
    fn factorial_ratio_matches_integers() {
        let z = Zpn::new(3, 5).unwrap();
        let fact = |k: u64| (1..=k).product::<u64>();
        for a in 0..12u64 {
            for b in 0..=a {
                for c in 0..=(a - b) {
                    let exact = fact(a) / (fact(b) * fact(c));
                    assert_eq!(factorial_ratio(&z, a, b, c), exact % z.q);
                }
            }
        }
    }
}
