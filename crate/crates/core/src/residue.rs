//! The residue field k_E = F_p[s]/(h(s)) with small-table arithmetic.
//!
//! Elements are encoded as integers sum c_j p^j with digits c_j in [0, p).

use crate::error::{Error, Result};

pub type Fq = u32;

#[derive(Clone, Debug)]
pub struct ResidueField {
    p: u32,
    f: usize,
    q: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl ResidueField {
    pub(crate) fn new(p: u64, h: &[u64]) -> Result<Self> {
        let f = h.len() - 1;
        let q64 = p.pow(f as u32);
        if q64 > (1 << 22) {
            return Err(Error::InvalidField("residue field too large".into()));
        }
        let p = p as u32;
        let q = q64 as u32;
        let mul_slow = |a: u32, b: u32| -> u32 {
            let da = digits(a, p, f);
            let db = digits(b, p, f);
            let mut prod = vec![0u64; 2 * f];
            for i in 0..f {
                for j in 0..f {
                    prod[i + j] += da[i] as u64 * db[j] as u64;
                }
            }
            for i in (f..2 * f).rev() {
                let c = prod[i] % p as u64;
                prod[i] = 0;
                for j in 0..f {
                    let sub = c * h[j] % p as u64;
                    prod[i - f + j] = (prod[i - f + j] + p as u64 * (p as u64) - sub) % p as u64;
                }
            }
            let mut r = 0u32;
            for j in (0..f).rev() {
                r = r * p + (prod[j] % p as u64) as u32;
            }
            r
        };
        // find a generator of the multiplicative group; none exists unless h is irreducible
        let order = q - 1;
        let mut factors = Vec::new();
        let mut n = order;
        let mut d = 2;
        while d * d <= n {
            if n.is_multiple_of(d) {
                factors.push(d);
                while n.is_multiple_of(d) {
                    n /= d;
                }
            }
            d += 1;
        }
        if n > 1 {
            factors.push(n);
        }
        let pow_slow = |mut b: u32, mut e: u32| {
            let mut r = 1u32;
            while e > 0 {
                if e & 1 == 1 {
                    r = mul_slow(r, b);
                }
                b = mul_slow(b, b);
                e >>= 1;
            }
            r
        };
        let gen = (1..q).find(|&g| {
            pow_slow(g, order) == 1 && factors.iter().all(|&r| pow_slow(g, order / r) != 1)
        });
        let gen = match gen {
            Some(g) if q > 2 || f == 1 => g,
            _ => {
                return Err(Error::InvalidField(
                    "unramified polynomial is not irreducible mod p".into(),
                ))
            }
        };
        let mut exp = vec![0u32; order as usize];
        let mut log = vec![0u32; q as usize];
        let mut x = 1u32;
        for i in 0..order {
            exp[i as usize] = x;
            log[x as usize] = i;
            x = mul_slow(x, gen);
        }
        if x != 1 || exp.iter().skip(1).any(|&v| v == 1) {
            return Err(Error::InvalidField(
                "unramified polynomial is not irreducible mod p".into(),
            ));
        }
        Ok(ResidueField { p, f, q, exp, log })
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn f(&self) -> usize {
        self.f
    }
    pub fn size(&self) -> u32 {
        self.q
    }
    pub fn zero(&self) -> Fq {
        0
    }
    pub fn one(&self) -> Fq {
        1
    }
    pub fn from_int(&self, a: i64) -> Fq {
        a.rem_euclid(self.p as i64) as u32
    }
    pub fn from_digits(&self, d: &[u32]) -> Fq {
        let mut r = 0u32;
        for j in (0..self.f).rev() {
            r = r * self.p + d.get(j).copied().unwrap_or(0) % self.p;
        }
        r
    }
    pub fn digits(&self, a: Fq) -> Vec<u32> {
        digits(a, self.p, self.f)
    }
    pub fn add(&self, a: Fq, b: Fq) -> Fq {
        if self.f == 1 {
            let s = a + b;
            return if s >= self.p { s - self.p } else { s };
        }
        let (mut a, mut b) = (a, b);
        let mut r = 0u32;
        let mut scale = 1u32;
        for _ in 0..self.f {
            let s = (a % self.p + b % self.p) % self.p;
            r += s * scale;
            scale *= self.p;
            a /= self.p;
            b /= self.p;
        }
        r
    }
    pub fn neg(&self, a: Fq) -> Fq {
        if self.f == 1 {
            return if a == 0 { 0 } else { self.p - a };
        }
        let mut a = a;
        let mut r = 0u32;
        let mut scale = 1u32;
        for _ in 0..self.f {
            let d = a % self.p;
            r += ((self.p - d) % self.p) * scale;
            scale *= self.p;
            a /= self.p;
        }
        r
    }
    pub fn sub(&self, a: Fq, b: Fq) -> Fq {
        self.add(a, self.neg(b))
    }
    pub fn mul(&self, a: Fq, b: Fq) -> Fq {
        if a == 0 || b == 0 {
            return 0;
        }
        if self.f == 1 {
            return ((a as u64 * b as u64) % self.p as u64) as u32;
        }
        let s = self.log[a as usize] + self.log[b as usize];
        let o = self.q - 1;
        self.exp[(if s >= o { s - o } else { s }) as usize]
    }
    pub fn inv(&self, a: Fq) -> Option<Fq> {
        if a == 0 {
            return None;
        }
        let o = self.q - 1;
        let l = self.log[a as usize];
        Some(self.exp[((o - l) % o) as usize])
    }
    pub fn pow(&self, a: Fq, e: i64) -> Fq {
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        let o = (self.q - 1) as i64;
        let l = self.log[a as usize] as i64;
        self.exp[((l * e.rem_euclid(o)) % o) as usize]
    }
    pub fn is_square(&self, a: Fq) -> bool {
        a == 0 || self.log[a as usize].is_multiple_of(2)
    }
    pub fn sqrt(&self, a: Fq) -> Option<Fq> {
        if a == 0 {
            return Some(0);
        }
        let l = self.log[a as usize];
        if l % 2 == 1 {
            return None;
        }
        Some(self.exp[(l / 2) as usize])
    }
    /// Discrete log with respect to the internal generator.
    pub fn log(&self, a: Fq) -> Option<u32> {
        if a == 0 {
            None
        } else {
            Some(self.log[a as usize])
        }
    }
    pub fn elements(&self) -> impl Iterator<Item = Fq> {
        0..self.q
    }
    pub fn units(&self) -> impl Iterator<Item = Fq> {
        1..self.q
    }
    pub fn format(&self, a: Fq) -> String {
        if self.f == 1 {
            a.to_string()
        } else {
            let d = self.digits(a);
            format!(
                "[{}]",
                d.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            )
        }
    }
    pub fn parse(&self, s: &str) -> Result<Fq> {
        let t = s.trim();
        if let Some(inner) = t.strip_prefix('[').and_then(|x| x.strip_suffix(']')) {
            let mut d = Vec::new();
            for part in inner.split(',') {
                let v: i64 = part
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad residue digit '{part}'")))?;
                d.push(v.rem_euclid(self.p as i64) as u32);
            }
            if d.len() > self.f {
                return Err(Error::Parse(format!("too many residue digits in '{s}'")));
            }
            Ok(self.from_digits(&d))
        } else {
            let v: i64 = t
                .parse()
                .map_err(|_| Error::Parse(format!("bad residue element '{s}'")))?;
            Ok(self.from_int(v))
        }
    }
}

fn digits(mut a: u32, p: u32, f: usize) -> Vec<u32> {
    let mut d = Vec::with_capacity(f);
    for _ in 0..f {
        d.push(a % p);
        a /= p;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_basics() {
        let k = ResidueField::new(5, &[0, 1]).unwrap();
        assert_eq!(k.mul(2, 3), 1);
        assert_eq!(k.inv(2), Some(3));
        assert!(k.is_square(4));
        assert!(!k.is_square(2));
    }

    #[test]
    fn f9_is_a_field() {
        // s^2 + 1 is irreducible mod 3
        let k = ResidueField::new(3, &[1, 0, 1]).unwrap();
        assert_eq!(k.size(), 9);
        for a in k.units() {
            assert_eq!(k.mul(a, k.inv(a).unwrap()), 1);
        }
        let s = k.from_digits(&[0, 1]);
        assert_eq!(k.mul(s, s), k.from_int(-1));
    }

    #[test]
    fn reducible_polynomial_rejected() {
        // s^2 - 1 = (s-1)(s+1)
        assert!(ResidueField::new(3, &[2, 0, 1]).is_err());
    }
}
