//! Scalars for matrix assembly: `f64` and the prime field `Z/pZ` with
//! `p = 2^61 - 1`, plus elimination-based determinant and rank.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;

/// The Mersenne prime `2^61 - 1`.
pub const MODULUS: u64 = (1 << 61) - 1;

pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    /// Multiplicative inverse; only called on usable pivots.
    fn inv(self) -> Self;
    /// Preference for choosing this value as a pivot; `0.0` means unusable.
    fn pivot_weight(self) -> f64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn inv(self) -> Self {
        1.0 / self
    }
    fn pivot_weight(self) -> f64 {
        self.abs()
    }
}

/// Element of `Z/pZ`, always reduced.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Fp(u64);

impl Fp {
    pub fn new(x: u64) -> Self {
        Fp(x % MODULUS)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Fp(rng.random_range(0..MODULUS))
    }

    pub fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Fp(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, rhs: Fp) -> Fp {
        let s = self.0 + rhs.0;
        Fp(if s >= MODULUS { s - MODULUS } else { s })
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, rhs: Fp) -> Fp {
        Fp(if self.0 >= rhs.0 {
            self.0 - rhs.0
        } else {
            self.0 + MODULUS - rhs.0
        })
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp(if self.0 == 0 { 0 } else { MODULUS - self.0 })
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, rhs: Fp) -> Fp {
        let prod = self.0 as u128 * rhs.0 as u128;
        // 2^61 = 1 (mod p)
        let lo = (prod as u64) & MODULUS;
        let hi = (prod >> 61) as u64;
        let s = lo + hi;
        Fp(if s >= MODULUS { s - MODULUS } else { s })
    }
}

impl Scalar for Fp {
    fn zero() -> Self {
        Fp(0)
    }
    fn one() -> Self {
        Fp(1)
    }
    fn inv(self) -> Self {
        debug_assert!(self.0 != 0);
        self.pow(MODULUS - 2)
    }
    fn pivot_weight(self) -> f64 {
        if self.0 == 0 {
            0.0
        } else {
            1.0
        }
    }
}

/// Determinant of a square matrix given as rows.
#[allow(clippy::needless_range_loop)]
pub fn determinant<S: Scalar>(mut a: Vec<Vec<S>>) -> S {
    let n = a.len();
    let mut det = S::one();
    for col in 0..n {
        let (piv, weight) =
            (col..n)
                .map(|r| (r, a[r][col].pivot_weight()))
                .fold(
                    (col, 0.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
        if weight == 0.0 {
            return S::zero();
        }
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        let p = a[col][col];
        det = det * p;
        let inv = p.inv();
        for r in col + 1..n {
            let f = a[r][col] * inv;
            if f == S::zero() {
                continue;
            }
            for c in col..n {
                let delta = f * a[col][c];
                a[r][c] = a[r][c] - delta;
            }
        }
    }
    det
}

/// Exact rank over `Z/pZ` by Gaussian elimination.
#[allow(clippy::needless_range_loop)]
pub fn rank_mod_p(mut a: Vec<Vec<Fp>>) -> usize {
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| a[r][col] != Fp(0)) else {
            continue;
        };
        a.swap(piv, rank);
        let inv = a[rank][col].inv();
        for c in col..cols {
            a[rank][c] = a[rank][c] * inv;
        }
        for r in 0..rows {
            if r != rank && a[r][col] != Fp(0) {
                let f = a[r][col];
                for c in col..cols {
                    let delta = f * a[rank][c];
                    a[r][c] = a[r][c] - delta;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn inverse_and_wraparound() {
        let a = Fp::new(MODULUS - 1);
        assert_eq!(a + Fp(2), Fp(1));
        assert_eq!(Fp(3) - Fp(5), Fp::new(MODULUS - 2));
        assert_eq!(Fp(12345).inv() * Fp(12345), Fp(1));
        assert_eq!(a * a, Fp(1));
    }

    #[test]
    fn small_determinants() {
        assert_eq!(determinant(vec![vec![2.0, 1.0], vec![1.0, 3.0]]), 5.0);
        assert_eq!(determinant(vec![vec![0.0, 1.0], vec![1.0, 0.0]]), -1.0);
        assert_eq!(determinant(vec![vec![1.0, 2.0], vec![2.0, 4.0]]), 0.0);
        let f = |x: i64| {
            if x < 0 {
                -Fp(x.unsigned_abs())
            } else {
                Fp(x as u64)
            }
        };
        assert_eq!(determinant(vec![vec![f(2), f(1)], vec![f(1), f(3)]]), f(5));
        assert_eq!(determinant(Vec::<Vec<f64>>::new()), 1.0);
    }

    #[test]
    fn rank_counts_dependent_rows() {
        let r = |v: &[u64]| v.iter().map(|&x| Fp(x)).collect::<Vec<_>>();
        assert_eq!(
            rank_mod_p(vec![r(&[1, 2, 3]), r(&[2, 4, 6]), r(&[0, 1, 1])]),
            2
        );
        assert_eq!(rank_mod_p(vec![r(&[0, 0]), r(&[0, 0])]), 0);
    }

    proptest! {
        #[test]
        fn mul_matches_u128_reference(a in 0..MODULUS, b in 0..MODULUS) {
            let expect = ((a as u128 * b as u128) % MODULUS as u128) as u64;
            prop_assert_eq!((Fp(a) * Fp(b)).value(), expect);
        }

        #[test]
        fn det_is_multiplicative(a in proptest::collection::vec(0..1000u64, 9), b in proptest::collection::vec(0..1000u64, 9)) {
            let m = |v: &[u64]| (0..3).map(|i| (0..3).map(|j| Fp(v[3 * i + j])).collect()).collect::<Vec<Vec<Fp>>>();
            let (ma, mb) = (m(&a), m(&b));
            let prod: Vec<Vec<Fp>> = (0..3)
                .map(|i| (0..3).map(|j| (0..3).fold(Fp(0), |s, k| s + ma[i][k] * mb[k][j])).collect())
                .collect();
            prop_assert_eq!(determinant(prod), determinant(ma) * determinant(mb));
        }
    }
}
