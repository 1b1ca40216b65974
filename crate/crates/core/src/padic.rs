//! Capped absolute precision arithmetic in O_E / pi^M.
//!
//! A stored value is a polynomial sum_{i<e, j<f} a_{ij} t^i s^j with integer
//! coefficients mod p^cap, where t = pi is a root of the Eisenstein polynomial
//! and s generates the unramified part. Since the terms a_i pi^i have pairwise
//! distinct valuations mod e, the ideal pi^M is exactly
//! { v_p(a_i) >= ceil((M - i)/e) }, which gives canonical forms cheaply.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{Field, MAX_DEGREE};
use crate::residue::Fq;

/// Raw stored coefficients; the meaning depends on the owning [`Field`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Raw(pub(crate) [u64; MAX_DEGREE]);

#[inline]
fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn vp_u64(mut x: u64, p: u64, cap: u32) -> u32 {
    if x == 0 {
        return cap;
    }
    let mut v = 0;
    while x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    v
}

/// Inverse of a unit w modulo m = p^c.
pub(crate) fn inv_mod_prime_power(w: u64, p: u64, m: u64) -> u64 {
    let w = w % m;
    let w0 = w % p;
    let mut x = crate::field::pow_mod(w0, p - 2, p);
    // Newton: x <- x (2 - w x)
    for _ in 0..7 {
        let wx = mulmod(w, x, m);
        let two_minus = (2 + m - wx) % m;
        x = mulmod(x, two_minus, m);
    }
    debug_assert_eq!(mulmod(w, x, m), 1 % m);
    x
}

impl Field {
    #[inline]
    pub(crate) fn modulus(&self) -> u64 {
        self.0.modulus
    }

    pub(crate) fn is_simple(&self) -> bool {
        self.0.deg == 1
    }

    pub(crate) fn r_zero(&self) -> Raw {
        Raw::default()
    }

    pub(crate) fn r_from_i64(&self, a: i64) -> Raw {
        let mut r = Raw::default();
        r.0[0] = (a as i128).rem_euclid(self.0.modulus as i128) as u64;
        r
    }

    pub(crate) fn r_one(&self) -> Raw {
        self.r_from_i64(1)
    }

    #[inline]
    pub(crate) fn r_add(&self, a: &Raw, b: &Raw) -> Raw {
        let m = self.0.modulus;
        let mut r = Raw::default();
        for i in 0..self.0.deg {
            let s = a.0[i] + b.0[i];
            r.0[i] = if s >= m { s - m } else { s };
        }
        r
    }

    #[inline]
    pub(crate) fn r_neg(&self, a: &Raw) -> Raw {
        let m = self.0.modulus;
        let mut r = Raw::default();
        for i in 0..self.0.deg {
            r.0[i] = if a.0[i] == 0 { 0 } else { m - a.0[i] };
        }
        r
    }

    #[inline]
    pub(crate) fn r_sub(&self, a: &Raw, b: &Raw) -> Raw {
        let m = self.0.modulus;
        let mut r = Raw::default();
        for i in 0..self.0.deg {
            r.0[i] = if a.0[i] >= b.0[i] {
                a.0[i] - b.0[i]
            } else {
                a.0[i] + m - b.0[i]
            };
        }
        r
    }

    pub(crate) fn r_is_zero(&self, a: &Raw) -> bool {
        a.0[..self.0.deg].iter().all(|&c| c == 0)
    }

    #[inline]
    pub(crate) fn r_mul(&self, a: &Raw, b: &Raw) -> Raw {
        let inner = &*self.0;
        let m = inner.modulus;
        if inner.deg == 1 {
            let mut r = Raw::default();
            r.0[0] = mulmod(a.0[0], b.0[0], m);
            return r;
        }
        let (e, f) = (inner.e, inner.f);
        // t-degree up to 2e-2, s-degree up to 2f-2
        let mut prod = [[0u128; 2 * MAX_DEGREE]; 2 * MAX_DEGREE];
        for i1 in 0..e {
            for j1 in 0..f {
                let x = a.0[i1 * f + j1];
                if x == 0 {
                    continue;
                }
                for i2 in 0..e {
                    for j2 in 0..f {
                        let y = b.0[i2 * f + j2];
                        if y != 0 {
                            let c = &mut prod[i1 + i2][j1 + j2];
                            *c = (*c + x as u128 * y as u128) % m as u128;
                        }
                    }
                }
            }
        }
        // reduce s-degree with h monic
        for row in prod.iter_mut().take(2 * e - 1) {
            for d in (f..2 * f - 1).rev() {
                let c = row[d] % m as u128;
                if c == 0 {
                    continue;
                }
                row[d] = 0;
                for j in 0..f {
                    let hj = inner.h[j] as u128;
                    row[d - f + j] =
                        (row[d - f + j] + (m as u128 - c * hj % m as u128)) % m as u128;
                }
            }
        }
        // reduce t-degree: t^e = -sum_{l<e} g_l t^l
        for d in (e..2 * e - 1).rev() {
            for j in 0..f {
                let c = prod[d][j] % m as u128;
                if c == 0 {
                    continue;
                }
                prod[d][j] = 0;
                for l in 0..e {
                    let gl = inner.g[l] as u128;
                    if gl != 0 {
                        let cell = &mut prod[d - e + l][j];
                        *cell = (*cell + (m as u128 - c * gl % m as u128)) % m as u128;
                    }
                }
            }
        }
        let mut r = Raw::default();
        for i in 0..e {
            for j in 0..f {
                r.0[i * f + j] = (prod[i][j] % m as u128) as u64;
            }
        }
        r
    }

    /// Valuation in powers of pi, or None when >= prec.
    pub(crate) fn r_val(&self, a: &Raw, prec: u32) -> Option<u32> {
        let inner = &*self.0;
        if inner.deg == 1 {
            let v = vp_u64(a.0[0], inner.p, inner.cap);
            return if v >= prec { None } else { Some(v) };
        }
        let (e, f) = (inner.e, inner.f);
        let mut best = u32::MAX;
        for i in 0..e {
            let mut vi = inner.cap;
            for j in 0..f {
                vi = vi.min(vp_u64(a.0[i * f + j], inner.p, inner.cap));
            }
            if vi < inner.cap {
                best = best.min(e as u32 * vi + i as u32);
            }
        }
        if best >= prec {
            None
        } else {
            Some(best)
        }
    }

    /// Canonical representative mod pi^prec.
    pub(crate) fn r_canon(&self, a: &Raw, prec: u32) -> Raw {
        let inner = &*self.0;
        let (e, f) = (inner.e, inner.f);
        let mut r = Raw::default();
        for i in 0..e {
            let c = if prec as usize > i {
                (prec as usize - i).div_ceil(e)
            } else {
                0
            };
            let c = c.min(inner.cap as usize);
            let md = inner.p_pows[c];
            for j in 0..f {
                r.0[i * f + j] = a.0[i * f + j] % md;
            }
        }
        r
    }

    pub(crate) fn r_residue(&self, a: &Raw) -> Fq {
        let inner = &*self.0;
        let p = inner.p;
        let d: Vec<u32> = (0..inner.f).map(|j| (a.0[j] % p) as u32).collect();
        inner.residue.from_digits(&d)
    }

    pub(crate) fn r_lift(&self, x: Fq) -> Raw {
        let inner = &*self.0;
        let d = inner.residue.digits(x);
        let mut r = Raw::default();
        for (j, v) in d.into_iter().enumerate() {
            r.0[j] = v as u64;
        }
        r
    }

    /// Inverse of a unit; the result is correct modulo the storage modulus.
    pub(crate) fn r_inv(&self, a: &Raw) -> Result<Raw> {
        let inner = &*self.0;
        let res = self.r_residue(a);
        let r0 = inner.residue.inv(res).ok_or(Error::NonUnit)?;
        if inner.deg == 1 {
            let mut r = Raw::default();
            r.0[0] = inv_mod_prime_power(a.0[0], inner.p, inner.modulus);
            return Ok(r);
        }
        let mut x = self.r_lift(r0);
        let two = self.r_from_i64(2);
        let mut good = 1u32;
        while good < inner.e as u32 * inner.cap {
            let ax = self.r_mul(a, &x);
            x = self.r_mul(&x, &self.r_sub(&two, &ax));
            good *= 2;
        }
        Ok(x)
    }

    /// Divide by pi an element that is canonical at `prec` and has valuation >= 1.
    pub(crate) fn r_div_pi(&self, a: &Raw, prec: u32) -> Raw {
        let inner = &*self.0;
        let p = inner.p;
        if inner.deg == 1 {
            let mut r = Raw::default();
            r.0[0] = a.0[0] / p;
            return self.r_canon(&r, prec.saturating_sub(1));
        }
        let (e, f) = (inner.e, inner.f);
        let mut shifted = Raw::default();
        for i in 1..e {
            for j in 0..f {
                shifted.0[(i - 1) * f + j] = a.0[i * f + j];
            }
        }
        let mut a0 = Raw::default();
        for j in 0..f {
            a0.0[j] = a.0[j] / p;
        }
        let tail = self.r_mul(&a0, &Raw(inner.p_over_pi));
        let r = self.r_add(&shifted, &tail);
        self.r_canon(&r, prec.saturating_sub(1))
    }

    pub(crate) fn r_pi(&self) -> Raw {
        let inner = &*self.0;
        let mut r = Raw::default();
        if inner.e == 1 {
            r.0[0] = inner.p;
        } else {
            r.0[inner.f] = 1;
        }
        r
    }

    pub(crate) fn r_pi_pow(&self, n: u32) -> Raw {
        let pi = self.r_pi();
        let mut r = self.r_one();
        for _ in 0..n {
            r = self.r_mul(&r, &pi);
        }
        r
    }
}

/// An element of O_E known modulo pi^prec.
#[derive(Clone, Debug)]
pub struct PadicElem {
    field: Field,
    raw: Raw,
    prec: u32,
}

impl PadicElem {
    pub fn new_raw(field: &Field, raw: Raw, prec: u32) -> PadicElem {
        let prec = prec.min(field.max_precision());
        PadicElem {
            field: field.clone(),
            raw: field.r_canon(&raw, prec),
            prec,
        }
    }

    pub fn zero(field: &Field, prec: u32) -> PadicElem {
        PadicElem::new_raw(field, field.r_zero(), prec)
    }

    pub fn one(field: &Field, prec: u32) -> PadicElem {
        PadicElem::new_raw(field, field.r_one(), prec)
    }

    pub fn from_int(field: &Field, a: i64, prec: u32) -> PadicElem {
        PadicElem::new_raw(field, field.r_from_i64(a), prec)
    }

    /// num/den with den allowed to contain powers of p (precision drops accordingly).
    pub fn from_rational(field: &Field, num: i64, den: i64, prec: u32) -> Result<PadicElem> {
        if den == 0 {
            return Err(Error::Domain("zero denominator".into()));
        }
        let p = field.p() as i64;
        let mut d = den;
        let mut v = 0u32;
        while d % p == 0 {
            d /= p;
            v += 1;
        }
        let e = field.e() as u32;
        let x = PadicElem::from_int(field, num, prec + e * v);
        let u = PadicElem::from_int(field, d, prec + e * v);
        let q = x.mul(&u.inv()?)?;
        q.div_by_p_pow(v)
    }

    pub fn pi(field: &Field, prec: u32) -> PadicElem {
        PadicElem::new_raw(field, field.r_pi(), prec)
    }

    pub fn pi_pow(field: &Field, n: u32, prec: u32) -> PadicElem {
        PadicElem::new_raw(field, field.r_pi_pow(n), prec)
    }

    pub fn from_residue(field: &Field, x: Fq, prec: u32) -> PadicElem {
        PadicElem::new_raw(field, field.r_lift(x), prec)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn raw(&self) -> &Raw {
        &self.raw
    }
    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// Same value, precision lowered (never raised).
    pub fn with_precision(&self, prec: u32) -> PadicElem {
        PadicElem::new_raw(&self.field, self.raw, prec.min(self.prec))
    }

    /// Same representative, precision set to `prec` (used to lift exact integers).
    pub fn lift_precision(&self, prec: u32) -> PadicElem {
        PadicElem::new_raw(&self.field, self.raw, prec)
    }

    fn check(&self, other: &PadicElem) -> Result<()> {
        if self.field.same(&other.field) {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn add(&self, other: &PadicElem) -> Result<PadicElem> {
        self.check(other)?;
        Ok(PadicElem::new_raw(
            &self.field,
            self.field.r_add(&self.raw, &other.raw),
            self.prec.min(other.prec),
        ))
    }

    pub fn sub(&self, other: &PadicElem) -> Result<PadicElem> {
        self.check(other)?;
        Ok(PadicElem::new_raw(
            &self.field,
            self.field.r_sub(&self.raw, &other.raw),
            self.prec.min(other.prec),
        ))
    }

    pub fn neg(&self) -> PadicElem {
        PadicElem::new_raw(&self.field, self.field.r_neg(&self.raw), self.prec)
    }

    pub fn mul(&self, other: &PadicElem) -> Result<PadicElem> {
        self.check(other)?;
        let va = self.valuation().unwrap_or(self.prec);
        let vb = other.valuation().unwrap_or(other.prec);
        let prec = (self.prec + vb).min(other.prec + va);
        Ok(PadicElem::new_raw(
            &self.field,
            self.field.r_mul(&self.raw, &other.raw),
            prec,
        ))
    }

    pub fn mul_int(&self, c: i64) -> PadicElem {
        let c = PadicElem::from_int(&self.field, c, self.field.max_precision());
        self.mul(&c).expect("same field")
    }

    /// Valuation in powers of pi; None when indistinguishable from zero.
    pub fn valuation(&self) -> Option<u32> {
        self.field.r_val(&self.raw, self.prec)
    }

    /// Valuation as a rational v_p = v_pi / e, returned as (numerator, e).
    pub fn valuation_p(&self) -> Option<(u32, u32)> {
        self.valuation().map(|v| (v, self.field.e() as u32))
    }

    pub fn is_zero(&self) -> bool {
        self.valuation().is_none()
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == Some(0)
    }

    pub fn residue(&self) -> Fq {
        self.field.r_residue(&self.raw)
    }

    pub fn inv(&self) -> Result<PadicElem> {
        if self.valuation() != Some(0) {
            return Err(Error::NonUnit);
        }
        let r = self.field.r_inv(&self.raw)?;
        Ok(PadicElem::new_raw(&self.field, r, self.prec))
    }

    /// Divide by pi^v; fails if the element is not known to be divisible.
    pub fn divide_exact(&self, v: u32) -> Result<PadicElem> {
        if v == 0 {
            return Ok(self.clone());
        }
        if v > self.prec {
            return Err(Error::InsufficientPrecision(format!(
                "cannot divide by pi^{v} at precision {}",
                self.prec
            )));
        }
        if let Some(w) = self.valuation() {
            if w < v {
                return Err(Error::NotDivisible(format!("valuation {w} < {v}")));
            }
        }
        let mut x = self.raw;
        let mut pr = self.prec;
        for _ in 0..v {
            x = self.field.r_div_pi(&x, pr);
            pr -= 1;
        }
        Ok(PadicElem::new_raw(&self.field, x, pr))
    }

    /// Divide by p^v.
    pub fn div_by_p_pow(&self, v: u32) -> Result<PadicElem> {
        if v == 0 {
            return Ok(self.clone());
        }
        let e = self.field.e() as u32;
        let x = self.divide_exact(e * v)?;
        // p = pi^e * w with w a unit
        let pe = PadicElem::from_int(
            &self.field,
            self.field.p() as i64,
            self.field.max_precision(),
        );
        let w = pe.divide_exact(e)?;
        let mut wv = PadicElem::one(&self.field, self.field.max_precision());
        for _ in 0..v {
            wv = wv.mul(&w)?;
        }
        x.mul(&wv.inv()?)
    }

    /// x / y for y nonzero, with v(x) >= v(y).
    pub fn div(&self, other: &PadicElem) -> Result<PadicElem> {
        self.check(other)?;
        let w = other.valuation().ok_or(Error::NonUnit)?;
        let x = self.divide_exact(w)?;
        let u = other.divide_exact(w)?;
        x.mul(&u.inv()?)
    }

    pub fn pow(&self, n: u32) -> PadicElem {
        let mut r = PadicElem::one(&self.field, self.field.max_precision());
        for _ in 0..n {
            r = r.mul(self).expect("same field");
        }
        r
    }

    /// Equality of the represented classes at the common precision.
    pub fn eq_at(&self, other: &PadicElem) -> bool {
        self.sub(other).map(|d| d.is_zero()).unwrap_or(false)
    }

    /// Square root of 1 + x for x with valuation >= 1, congruent to 1 mod pi.
    pub fn sqrt_one_plus(x: &PadicElem) -> Result<PadicElem> {
        let field = x.field.clone();
        if x.valuation().map(|v| v == 0).unwrap_or(false) {
            return Err(Error::Domain("sqrt_one_plus needs valuation >= 1".into()));
        }
        let prec = x.prec;
        let a = PadicElem::one(&field, prec).add(x)?;
        let half = PadicElem::from_int(&field, 2, prec).inv()?;
        let mut s = PadicElem::one(&field, prec);
        let mut good = 1u32;
        loop {
            let next = s.add(&a.mul(&s.inv()?)?)?.mul(&half)?;
            let done = next.eq_at(&s) && good >= prec;
            s = next;
            good = good.saturating_mul(2);
            if done || good > 4 * prec + 8 {
                break;
            }
        }
        Ok(s.with_precision(prec))
    }

    /// C(a, i) = a (a-1) ... (a-i+1) / i!; precision drops by e * v_p(i!).
    pub fn binom_padic(a: &PadicElem, i: u32) -> Result<PadicElem> {
        let field = a.field.clone();
        let mut num = PadicElem::one(&field, field.max_precision());
        for j in 0..i {
            num = num.mul(&a.sub(&PadicElem::from_int(
                &field,
                j as i64,
                field.max_precision(),
            ))?)?;
        }
        let p = field.p();
        let mut v = 0u32;
        let mut unit = PadicElem::one(&field, field.max_precision());
        for j in 1..=i as u64 {
            let mut t = j;
            while t % p == 0 {
                t /= p;
                v += 1;
            }
            unit = unit.mul(&PadicElem::from_int(
                &field,
                t as i64,
                field.max_precision(),
            ))?;
        }
        let e = field.e() as u32;
        if a.prec <= e * v {
            return Err(Error::InsufficientPrecision(format!(
                "binom({i}) needs more than {} digits of headroom",
                e * v
            )));
        }
        num.div_by_p_pow(v)?.mul(&unit.inv()?)
    }

    /// As [`binom_padic`](Self::binom_padic) but failing unless the result is known mod pi^target.
    pub fn binom_padic_to(a: &PadicElem, i: u32, target: u32) -> Result<PadicElem> {
        let r = PadicElem::binom_padic(a, i)?;
        if r.prec < target {
            return Err(Error::InsufficientPrecision(format!(
                "binom({i}) known mod pi^{} < pi^{target}",
                r.prec
            )));
        }
        Ok(r.with_precision(target))
    }

    /// Digits in pi-adic expansion with digits in the Teichmuller-free set {sum c_j s^j, 0 <= c_j < p}.
    pub fn digits(&self) -> Vec<Fq> {
        let field = &self.field;
        let mut out = Vec::with_capacity(self.prec as usize);
        let mut x = self.raw;
        let mut pr = self.prec;
        while pr > 0 {
            let d = field.r_residue(&x);
            out.push(d);
            let lifted = field.r_lift(d);
            x = field.r_canon(&field.r_sub(&x, &lifted), pr);
            x = field.r_div_pi(&x, pr);
            pr -= 1;
        }
        out
    }

    /// Integer representative in [0, p^prec) when E = Q_p.
    pub fn to_u64(&self) -> Option<u64> {
        if self.field.is_simple() {
            Some(self.raw.0[0])
        } else {
            None
        }
    }

    pub fn parse(field: &Field, s: &str) -> Result<PadicElem> {
        crate::literal::parse_padic(field, s)
    }
}

impl PartialEq for PadicElem {
    /// Structural equality: same field, same precision, same canonical value.
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.prec == other.prec && self.raw == other.raw
    }
}
impl Eq for PadicElem {}

impl fmt::Display for PadicElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::literal::format_padic(self))
    }
}

impl Serialize for PadicElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Deserialization needs a field; this helper pairs a literal with one.
pub fn deserialize_with<'de, D: Deserializer<'de>>(
    d: D,
    field: &Field,
) -> std::result::Result<PadicElem, D::Error> {
    let s = String::deserialize(d)?;
    PadicElem::parse(field, &s).map_err(serde::de::Error::custom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldParams;

    #[test]
    fn add_small() {
        let k = Field::qp(3).unwrap();
        let x = PadicElem::from_int(&k, 2, 4)
            .add(&PadicElem::from_int(&k, 1, 4))
            .unwrap();
        assert_eq!(x.valuation(), Some(1));
        assert_eq!(x.to_u64(), Some(3));
    }

    #[test]
    fn ramified_pi_plus_pi() {
        let k = Field::new(FieldParams::ramified_quadratic(3, 1, 10).unwrap()).unwrap();
        let pi = PadicElem::pi(&k, 10);
        let two_pi = pi.add(&pi).unwrap();
        assert_eq!(two_pi.valuation_p(), Some((1, 2)));
        // pi^2 = 3
        let sq = pi.mul(&pi).unwrap();
        assert!(sq.eq_at(&PadicElem::from_int(&k, 3, 10)));
    }

    #[test]
    fn inverse_examples() {
        let k = Field::qp(5).unwrap();
        assert_eq!(
            PadicElem::from_int(&k, 2, 2).inv().unwrap().to_u64(),
            Some(13)
        );
        assert_eq!(PadicElem::from_int(&k, 5, 2).inv(), Err(Error::NonUnit));
        assert_eq!(PadicElem::one(&k, 3).inv().unwrap().to_u64(), Some(1));
    }

    #[test]
    fn sqrt_example() {
        let k = Field::qp(3).unwrap();
        let s = PadicElem::sqrt_one_plus(&PadicElem::from_int(&k, 3, 3)).unwrap();
        assert_eq!(s.to_u64(), Some(25));
        let one = PadicElem::sqrt_one_plus(&PadicElem::zero(&k, 3)).unwrap();
        assert_eq!(one.to_u64(), Some(1));
    }

    #[test]
    fn binom_examples() {
        let k = Field::qp(3).unwrap();
        let half = PadicElem::from_rational(&k, 1, 2, 6).unwrap();
        let b = PadicElem::binom_padic_to(&half, 2, 3).unwrap();
        assert_eq!(b.to_u64(), Some(10));
        let five = PadicElem::from_int(&k, 5, 8);
        assert_eq!(PadicElem::binom_padic(&five, 2).unwrap().to_u64(), Some(10));
        assert_eq!(PadicElem::binom_padic(&five, 0).unwrap().to_u64(), Some(1));
        let low = PadicElem::from_int(&k, 5, 1);
        assert!(PadicElem::binom_padic(&low, 3).is_err());
    }

    #[test]
    fn divide_exact_loses_precision() {
        let k = Field::qp(5).unwrap();
        let x = PadicElem::from_int(&k, 50, 6);
        let y = x.divide_exact(2).unwrap();
        assert_eq!(y.precision(), 4);
        assert_eq!(y.to_u64(), Some(2));
        assert!(matches!(x.divide_exact(3), Err(Error::NotDivisible(_))));
    }
}
