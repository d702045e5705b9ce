//! Arithmetic in the prime field ℤ/pℤ.
//!
//! Elements are plain `u32` residues kept in canonical form `0 ≤ v < p`.
//! The modulus is bounded by `u32::MAX`, so every product fits in a `u64`
//! before reduction.

use thiserror::Error;

/// A coefficient in some [`PrimeField`]. Always a canonical residue.
pub type Coeff = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("modulus {0} is not prime")]
    CompositeModulus(u64),
    #[error("modulus {0} does not fit in 32 bits")]
    ModulusTooLarge(u64),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
}

/// Arithmetic context for GF(p).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

impl Default for PrimeField {
    fn default() -> Self {
        PrimeField { p: 2 }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimeField {
    /// Builds GF(p), rejecting composite or oversized moduli.
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p > u32::MAX as u64 {
            return Err(FieldError::ModulusTooLarge(p));
        }
        if !is_prime(p) {
            return Err(FieldError::CompositeModulus(p));
        }
        Ok(PrimeField { p: p as u32 })
    }

    pub fn gf2() -> Self {
        PrimeField { p: 2 }
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    /// Canonical residue of an arbitrary signed integer.
    pub fn from_i64(&self, v: i64) -> Coeff {
        v.rem_euclid(self.p as i64) as Coeff
    }

    /// Signed representative in `(-p/2, p/2]`, handy for printing.
    pub fn to_signed(&self, a: Coeff) -> i64 {
        let a = a as i64;
        let p = self.p as i64;
        if a > p / 2 {
            a - p
        } else {
            a
        }
    }

    #[inline]
    pub fn add(&self, a: Coeff, b: Coeff) -> Coeff {
        ((a as u64 + b as u64) % self.p as u64) as Coeff
    }

    #[inline]
    pub fn sub(&self, a: Coeff, b: Coeff) -> Coeff {
        ((a as u64 + self.p as u64 - b as u64) % self.p as u64) as Coeff
    }

    #[inline]
    pub fn neg(&self, a: Coeff) -> Coeff {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: Coeff, b: Coeff) -> Coeff {
        ((a as u64 * b as u64) % self.p as u64) as Coeff
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    pub fn inv(&self, a: Coeff) -> Result<Coeff, FieldError> {
        let a = a % self.p;
        if a == 0 {
            return Err(FieldError::ZeroInverse);
        }
        let (mut old_r, mut r) = (a as i64, self.p as i64);
        let (mut old_s, mut s) = (1i64, 0i64);
        while r != 0 {
            let q = old_r / r;
            (old_r, r) = (r, old_r - q * r);
            (old_s, s) = (s, old_s - q * s);
        }
        Ok(self.from_i64(old_s))
    }

    /// `a / b`. Panics if `b` is zero; callers only divide by pivots.
    #[inline]
    pub fn div(&self, a: Coeff, b: Coeff) -> Coeff {
        self.mul(a, self.inv(b).expect("division by zero pivot"))
    }

    /// Sign `(-1)^k` as a field element.
    pub fn sign(&self, k: usize) -> Coeff {
        if k.is_multiple_of(2) {
            1
        } else {
            self.neg(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn construction() {
        assert_eq!(PrimeField::new(2).unwrap().modulus(), 2);
        assert_eq!(PrimeField::new(4), Err(FieldError::CompositeModulus(4)));
        assert_eq!(PrimeField::new(101).unwrap().modulus(), 101);
        assert!(PrimeField::new(1).is_err());
        assert!(PrimeField::new(0).is_err());
        assert!(PrimeField::new(1 << 33).is_err());
    }

    #[test]
    fn inverses() {
        assert_eq!(PrimeField::gf2().inv(1), Ok(1));
        assert_eq!(PrimeField::new(5).unwrap().inv(2), Ok(3));
        assert_eq!(
            PrimeField::new(7).unwrap().inv(0),
            Err(FieldError::ZeroInverse)
        );
    }

    #[test]
    fn inverse_involution() {
        for p in [2u64, 3, 5, 101, 65521] {
            let f = PrimeField::new(p).unwrap();
            for a in 1..(p.min(500) as u32) {
                let b = f.inv(a).unwrap();
                assert_eq!(f.mul(a, b), 1);
                assert_eq!(f.inv(b).unwrap(), a);
            }
        }
    }

    #[test]
    fn field_axioms_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in [2u64, 3, 101] {
            let f = PrimeField::new(p).unwrap();
            for _ in 0..1000 {
                let a = rng.gen_range(0..p as u32);
                let b = rng.gen_range(0..p as u32);
                let c = rng.gen_range(0..p as u32);
                assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                assert_eq!(f.add(a, f.neg(a)), 0);
                assert_eq!(f.sub(a, b), f.add(a, f.neg(b)));
            }
        }
    }

    #[test]
    fn large_modulus_products_do_not_overflow() {
        let f = PrimeField::new(4_294_967_291).unwrap();
        let a = 4_294_967_290;
        assert_eq!(f.mul(a, a), 1);
        assert_eq!(f.to_signed(a), -1);
    }
}
