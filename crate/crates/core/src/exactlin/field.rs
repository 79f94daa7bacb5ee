use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Which coefficient field a computation runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScalarField {
    Rationals,
    Prime(u32),
}

impl ScalarField {
    pub fn prime(p: u32) -> Result<Self> {
        if p >= 1 << 31 {
            return Err(Error::InvalidField(format!("{p} is not below 2^31")));
        }
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        Ok(ScalarField::Prime(p))
    }

    pub fn characteristic(&self) -> u32 {
        match self {
            ScalarField::Rationals => 0,
            ScalarField::Prime(p) => *p,
        }
    }
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarField::Rationals => write!(f, "Q"),
            ScalarField::Prime(p) => write!(f, "F{p}"),
        }
    }
}

impl FromStr for ScalarField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if matches!(t.as_str(), "q" | "qq" | "rationals" | "rational") {
            return Ok(ScalarField::Rationals);
        }
        let digits = ["fp:", "fp", "gf", "f_", "f"]
            .iter()
            .find_map(|pre| t.strip_prefix(pre))
            .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()));
        match digits {
            Some(d) => {
                let p: u64 = d
                    .parse()
                    .map_err(|_| Error::InvalidField(format!("bad modulus in {s:?}")))?;
                let p = u32::try_from(p)
                    .map_err(|_| Error::InvalidField(format!("{p} is not below 2^31")))?;
                ScalarField::prime(p)
            }
            None => Err(Error::InvalidField(format!(
                "unknown field {s:?} (expected q, f2, f3 or fp:N)"
            ))),
        }
    }
}

impl Serialize for ScalarField {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ScalarField {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let p = p as u64;
    let mut q = 2u64;
    while q * q <= p {
        if p % q == 0 {
            return false;
        }
        q += 1;
    }
    true
}

/// Exact field arithmetic. Implementations are cheap to clone.
pub trait Field: Clone + fmt::Debug + Send + Sync + 'static {
    type Elem: Clone + fmt::Debug + PartialEq + Send + Sync + 'static;

    fn kind(&self) -> ScalarField;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    #[allow(clippy::wrong_self_convention)]
    fn from_i64(&self, n: i64) -> Self::Elem;
    #[allow(clippy::wrong_self_convention)]
    fn from_bigint(&self, n: &BigInt) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn is_one(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    /// Exact textual form used in JSON (`3/2`, `4 mod 7`).
    fn render(&self, a: &Self::Elem) -> String;
    /// Bare form used in triplet dumps (`3/2`, `4`).
    fn render_plain(&self, a: &Self::Elem) -> String;
    /// Accepts integers, `n/d`, and `v mod p` for prime fields.
    fn parse_elem(&self, s: &str) -> Result<Self::Elem>;

    /// Rescale a nonzero vector to its canonical representative.
    fn normalize(&self, v: &mut [(usize, Self::Elem)]);
    /// Divide out common content, tracking the factor in `scale`.
    fn shrink(&self, _v: &mut [(usize, Self::Elem)], _scale: &mut Self::Elem) {}
    fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    fn sign(&self, negative: bool) -> Self::Elem {
        if negative {
            self.neg(&self.one())
        } else {
            self.one()
        }
    }
}

/// The rationals, backed by arbitrary-precision fractions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn kind(&self) -> ScalarField {
        ScalarField::Rationals
    }
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }
    fn from_bigint(&self, n: &BigInt) -> BigRational {
        BigRational::from_integer(n.clone())
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn is_one(&self, a: &BigRational) -> bool {
        a.is_one()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }

    fn render(&self, a: &BigRational) -> String {
        if a.is_integer() {
            a.numer().to_string()
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }
    fn render_plain(&self, a: &BigRational) -> String {
        self.render(a)
    }

    fn parse_elem(&self, s: &str) -> Result<BigRational> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad rational {s:?}"));
        match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(Error::Parse(format!("zero denominator in {s:?}")));
                }
                Ok(BigRational::new(n, d))
            }
            None => {
                let n: BigInt = s.parse().map_err(|_| bad())?;
                Ok(BigRational::from_integer(n))
            }
        }
    }

    fn normalize(&self, v: &mut [(usize, BigRational)]) {
        if v.is_empty() {
            return;
        }
        let mut den = BigInt::one();
        for (_, x) in v.iter() {
            den = den.lcm(x.denom());
        }
        let mut num = BigInt::zero();
        for (_, x) in v.iter() {
            let scaled = x.numer() * (&den / x.denom());
            num = num.gcd(&scaled);
        }
        if v[0].1.is_negative() {
            num = -num;
        }
        let factor = BigRational::new(den, num);
        for (_, x) in v.iter_mut() {
            *x = &*x * &factor;
        }
    }

    fn shrink(&self, v: &mut [(usize, BigRational)], scale: &mut BigRational) {
        if v.is_empty() || v.iter().any(|(_, x)| !x.is_integer()) {
            return;
        }
        let mut g = BigInt::zero();
        for (_, x) in v.iter() {
            g = g.gcd(x.numer());
            if g.is_one() {
                return;
            }
        }
        let g = BigRational::from_integer(g);
        for (_, x) in v.iter_mut() {
            *x = &*x / &g;
        }
        *scale = &*scale / &g;
    }

    fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> BigRational {
        self.from_i64(rng.gen_range(-3..=3))
    }
}

/// The prime field F_p with p < 2^31.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self> {
        ScalarField::prime(p)?;
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn reduce_u64(&self, x: u64) -> u32 {
        (x % self.p as u64) as u32
    }

    fn pow(&self, mut b: u32, mut e: u32) -> u32 {
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.reduce_u64(acc as u64 * b as u64);
            }
            b = self.reduce_u64(b as u64 * b as u64);
            e >>= 1;
        }
        acc
    }
}

impl Field for PrimeField {
    type Elem = u32;

    fn kind(&self) -> ScalarField {
        ScalarField::Prime(self.p)
    }
    fn zero(&self) -> u32 {
        0
    }
    fn one(&self) -> u32 {
        1
    }
    fn from_i64(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }
    fn from_bigint(&self, n: &BigInt) -> u32 {
        let r = n.mod_floor(&BigInt::from(self.p));
        r.to_u32().unwrap_or(0)
    }
    #[inline]
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }
    #[inline]
    fn is_one(&self, a: &u32) -> bool {
        *a == 1
    }
    #[inline]
    fn add(&self, a: &u32, b: &u32) -> u32 {
        let s = *a + *b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    #[inline]
    fn sub(&self, a: &u32, b: &u32) -> u32 {
        if *a >= *b {
            *a - *b
        } else {
            *a + self.p - *b
        }
    }
    #[inline]
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        self.reduce_u64(*a as u64 * *b as u64)
    }
    #[inline]
    fn neg(&self, a: &u32) -> u32 {
        if *a == 0 {
            0
        } else {
            self.p - *a
        }
    }
    fn inv(&self, a: &u32) -> Option<u32> {
        if *a == 0 {
            None
        } else {
            Some(self.pow(*a, self.p - 2))
        }
    }

    fn render(&self, a: &u32) -> String {
        format!("{a} mod {}", self.p)
    }
    fn render_plain(&self, a: &u32) -> String {
        a.to_string()
    }

    fn parse_elem(&self, s: &str) -> Result<u32> {
        let s = s.trim();
        let body = match s.split_once("mod") {
            Some((v, m)) => {
                let m: u32 = m
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad modulus in {s:?}")))?;
                if m != self.p {
                    return Err(Error::Parse(format!(
                        "value {s:?} is not over F{}",
                        self.p
                    )));
                }
                v.trim()
            }
            None => s,
        };
        match body.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| Error::Parse(format!("bad value {s:?}")))?;
                let d: BigInt = d.trim().parse().map_err(|_| Error::Parse(format!("bad value {s:?}")))?;
                let d = self.from_bigint(&d);
                let di = self
                    .inv(&d)
                    .ok_or_else(|| Error::Parse(format!("denominator of {s:?} vanishes mod {}", self.p)))?;
                Ok(self.mul(&self.from_bigint(&n), &di))
            }
            None => {
                let n: BigInt = body.parse().map_err(|_| Error::Parse(format!("bad value {s:?}")))?;
                Ok(self.from_bigint(&n))
            }
        }
    }

    fn normalize(&self, v: &mut [(usize, u32)]) {
        if let Some(inv) = v.first().and_then(|(_, x)| self.inv(x)) {
            for (_, x) in v.iter_mut() {
                *x = self.mul(x, &inv);
            }
        }
    }

    fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        rng.gen_range(0..self.p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_field_names() {
        assert_eq!("q".parse::<ScalarField>().unwrap(), ScalarField::Rationals);
        assert_eq!("F2".parse::<ScalarField>().unwrap(), ScalarField::Prime(2));
        assert_eq!("fp:7".parse::<ScalarField>().unwrap(), ScalarField::Prime(7));
        assert!("fp:8".parse::<ScalarField>().is_err());
        assert!("f4294967291".parse::<ScalarField>().is_err());
        assert!("reals".parse::<ScalarField>().is_err());
    }

    #[test]
    fn prime_arithmetic() {
        let f = PrimeField::new(7).unwrap();
        assert_eq!(f.mul(&3, &5), 1);
        assert_eq!(f.inv(&3), Some(5));
        assert_eq!(f.from_i64(-1), 6);
        assert_eq!(f.parse_elem("4 mod 7").unwrap(), 4);
        assert_eq!(f.parse_elem("1/2").unwrap(), 4);
        assert!(f.parse_elem("1 mod 5").is_err());
        assert_eq!(f.render(&4), "4 mod 7");
    }

    #[test]
    fn large_prime_does_not_overflow() {
        let p = 2_147_483_647;
        let f = PrimeField::new(p).unwrap();
        let a = p - 1;
        assert_eq!(f.mul(&a, &a), 1);
        assert_eq!(f.add(&a, &a), p - 2);
        assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), 1);
    }

    #[test]
    fn rational_normalize_makes_primitive() {
        let q = Rationals;
        let mut v = vec![
            (0, q.parse_elem("-2/3").unwrap()),
            (4, q.parse_elem("4/9").unwrap()),
        ];
        q.normalize(&mut v);
        assert_eq!(q.render(&v[0].1), "3");
        assert_eq!(q.render(&v[1].1), "-2");
        assert_eq!(q.parse_elem("6/4").unwrap(), q.parse_elem("3/2").unwrap());
        assert!(q.parse_elem("1/0").is_err());
    }
}
