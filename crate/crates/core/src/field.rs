use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The prime field F_p. Elements are canonical representatives in `0..p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct PrimeField {
    p: u32,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimeField {
    pub const MAX_P: u64 = (1 << 31) - 1;

    pub fn new(p: u64) -> Result<Self> {
        if p > Self::MAX_P || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeField { p: p as u32 })
    }

    #[inline]
    pub fn p(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        let p = self.p as u64;
        (if s >= p { s - p } else { s }) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            (a as u64 + self.p as u64 - b as u64) as u32
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    /// `a - c * b`, the elimination kernel.
    #[inline]
    pub fn sub_mul(self, a: u32, c: u32, b: u32) -> u32 {
        self.sub(a, self.mul(c, b))
    }

    pub fn pow(self, mut a: u32, mut e: u64) -> u32 {
        let mut r = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(self, a: u32) -> u32 {
        assert!(a % self.p != 0, "inverse of zero in F_{}", self.p);
        if self.p == 2 {
            return 1;
        }
        self.pow(a, self.p as u64 - 2)
    }

    pub fn from_i64(self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    /// `(-1)^e` as a field element.
    #[inline]
    pub fn sign(self, e: usize) -> u32 {
        if e % 2 == 0 {
            1 % self.p
        } else {
            self.neg(1)
        }
    }

    /// Balanced representative, used only for display.
    pub fn to_signed(self, a: u32) -> i64 {
        if (a as u64) * 2 > self.p as u64 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }
}

impl TryFrom<u64> for PrimeField {
    type Error = Error;
    fn try_from(p: u64) -> Result<Self> {
        PrimeField::new(p)
    }
}

impl From<PrimeField> for u64 {
    fn from(f: PrimeField) -> u64 {
        f.p as u64
    }
}

impl std::fmt::Display for PrimeField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "F_{}", self.p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composites() {
        assert!(PrimeField::new(1).is_err());
        assert!(PrimeField::new(9).is_err());
        assert!(PrimeField::new(1 << 31).is_err());
        assert!(PrimeField::new(2_147_483_647).is_ok());
    }

    #[test]
    fn inverses() {
        for p in [2u64, 3, 5, 7, 2_147_483_647] {
            let f = PrimeField::new(p).unwrap();
            for a in 1..50u32.min(f.p()) {
                assert_eq!(f.mul(a, f.inv(a)), 1);
            }
        }
    }
}
