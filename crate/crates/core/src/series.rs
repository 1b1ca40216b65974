//! Truncated power series over O_E / pi^M.
//!
//! Two quotients of O_E[[X]] are supported: X-adic truncation at X^N, and the
//! quotient by a monic polynomial (in practice phi(X)^k). All coefficients of a
//! series share one absolute pi-precision.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::padic::{PadicElem, Raw};
use crate::resseries::ResidueSeries;

/// A monic polynomial m(X) with exact integer-like coefficients, constant term first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonicPoly {
    coeffs: Vec<Raw>,
    /// For phi(X)^k this records k.
    pub k: u32,
}

impl MonicPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Modulus {
    PowerOfX(usize),
    MonicPoly(Arc<MonicPoly>),
}

impl Modulus {
    /// Number of stored coefficients.
    pub fn len(&self) -> usize {
        match self {
            Modulus::PowerOfX(n) => *n,
            Modulus::MonicPoly(m) => m.degree(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The modulus phi(X)^k, of degree pk.
    pub fn phi_x_pow(field: &Field, k: u32) -> Modulus {
        let phi = phi_x_raw(field);
        let mut acc = vec![field.r_one()];
        for _ in 0..k {
            acc = poly_mul_raw(field, &acc, &phi);
        }
        Modulus::MonicPoly(Arc::new(MonicPoly { coeffs: acc, k }))
    }

    /// The modulus Q = phi(X)/X, of degree p - 1.
    pub fn q_poly(field: &Field) -> Modulus {
        let mut c = phi_x_raw(field);
        c.remove(0);
        Modulus::MonicPoly(Arc::new(MonicPoly { coeffs: c, k: 0 }))
    }

    pub fn monic(&self) -> Option<&MonicPoly> {
        match self {
            Modulus::MonicPoly(m) => Some(m),
            _ => None,
        }
    }

    /// X-adic truncation that loses nothing when mapping a polynomial quotient
    /// mod pi^prec: X^{d * ceil(prec/e)} lies in (p^ceil(prec/e), phi(X)^k).
    pub fn lift_length(&self, field: &Field, prec: u32) -> usize {
        match self {
            Modulus::PowerOfX(n) => *n,
            Modulus::MonicPoly(m) => m.degree() * (prec as usize).div_ceil(field.e()).max(1),
        }
    }
}

fn poly_mul_raw(field: &Field, a: &[Raw], b: &[Raw]) -> Vec<Raw> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Raw::default(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if field.r_is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = field.r_add(&out[i + j], &field.r_mul(x, y));
        }
    }
    out
}

/// Exact coefficients of phi(X) = (1+X)^p - 1.
fn phi_x_raw(field: &Field) -> Vec<Raw> {
    binomial_poly(field, field.p())
}

/// (1+X)^a - 1 for a positive integer a, exact.
fn binomial_poly(field: &Field, a: u64) -> Vec<Raw> {
    let mut c = vec![field.r_one()];
    for _ in 0..a {
        let mut next = vec![Raw::default(); c.len() + 1];
        for (i, x) in c.iter().enumerate() {
            next[i] = field.r_add(&next[i], x);
            next[i + 1] = field.r_add(&next[i + 1], x);
        }
        c = next;
    }
    c[0] = Raw::default();
    c
}

/// Reduce a coefficient vector modulo a monic polynomial, in place.
fn reduce_monic_raw(field: &Field, v: &mut Vec<Raw>, m: &MonicPoly) {
    let d = m.degree();
    if v.len() <= d {
        v.resize(d, Raw::default());
        return;
    }
    for i in (d..v.len()).rev() {
        let c = v[i];
        if field.r_is_zero(&c) {
            continue;
        }
        v[i] = Raw::default();
        for j in 0..d {
            let t = field.r_mul(&c, &m.coeffs[j]);
            v[i - d + j] = field.r_sub(&v[i - d + j], &t);
        }
    }
    v.truncate(d);
}

#[derive(Clone)]
pub struct TruncSeries {
    field: Field,
    coeffs: Vec<Raw>,
    prec: u32,
    modulus: Modulus,
}

impl TruncSeries {
    /// Build from raw coefficients of any length; reduces into the modulus.
    pub fn from_raw(
        field: &Field,
        mut coeffs: Vec<Raw>,
        prec: u32,
        modulus: &Modulus,
    ) -> TruncSeries {
        let prec = prec.min(field.max_precision());
        match modulus {
            Modulus::PowerOfX(n) => coeffs.resize(*n, Raw::default()),
            Modulus::MonicPoly(m) => reduce_monic_raw(field, &mut coeffs, m),
        }
        for c in coeffs.iter_mut() {
            *c = field.r_canon(c, prec);
        }
        TruncSeries {
            field: field.clone(),
            coeffs,
            prec,
            modulus: modulus.clone(),
        }
    }

    pub fn from_padics(field: &Field, coeffs: &[PadicElem], modulus: &Modulus) -> TruncSeries {
        let prec = coeffs
            .iter()
            .map(|c| c.precision())
            .min()
            .unwrap_or(field.max_precision());
        let raw = coeffs.iter().map(|c| *c.raw()).collect();
        TruncSeries::from_raw(field, raw, prec, modulus)
    }

    pub fn zero(field: &Field, prec: u32, modulus: &Modulus) -> TruncSeries {
        TruncSeries::from_raw(field, Vec::new(), prec, modulus)
    }

    pub fn one(field: &Field, prec: u32, modulus: &Modulus) -> TruncSeries {
        TruncSeries::from_raw(field, vec![field.r_one()], prec, modulus)
    }

    pub fn constant(c: &PadicElem, modulus: &Modulus) -> TruncSeries {
        TruncSeries::from_raw(c.field(), vec![*c.raw()], c.precision(), modulus)
    }

    pub fn from_int(field: &Field, c: i64, prec: u32, modulus: &Modulus) -> TruncSeries {
        TruncSeries::from_raw(field, vec![field.r_from_i64(c)], prec, modulus)
    }

    pub fn x(field: &Field, prec: u32, modulus: &Modulus) -> TruncSeries {
        TruncSeries::monomial(field, 1, prec, modulus)
    }

    pub fn monomial(field: &Field, i: usize, prec: u32, modulus: &Modulus) -> TruncSeries {
        let mut c = vec![Raw::default(); i + 1];
        c[i] = field.r_one();
        TruncSeries::from_raw(field, c, prec, modulus)
    }

    /// phi(X) = (1+X)^p - 1.
    pub fn phi_x(field: &Field, prec: u32, modulus: &Modulus) -> TruncSeries {
        TruncSeries::from_raw(field, phi_x_raw(field), prec, modulus)
    }

    /// Q = phi(X)/X.
    pub fn q(field: &Field, prec: u32, modulus: &Modulus) -> TruncSeries {
        let mut c = phi_x_raw(field);
        c.remove(0);
        TruncSeries::from_raw(field, c, prec, modulus)
    }

    /// gamma(X) = (1+X)^chi - 1.
    pub fn gamma_x(field: &Field, prec: u32, modulus: &Modulus) -> TruncSeries {
        TruncSeries::from_raw(
            field,
            binomial_poly(field, field.chi_gamma()),
            prec,
            modulus,
        )
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }
    pub fn precision(&self) -> u32 {
        self.prec
    }
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }
    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
    pub fn raw_coeffs(&self) -> &[Raw] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> PadicElem {
        let r = self.coeffs.get(i).copied().unwrap_or_default();
        PadicElem::new_raw(&self.field, r, self.prec)
    }

    pub fn coeffs(&self) -> Vec<PadicElem> {
        (0..self.len()).map(|i| self.coeff(i)).collect()
    }

    pub fn set_coeff(&mut self, i: usize, c: &PadicElem) {
        assert!(
            i < self.coeffs.len(),
            "coefficient index outside the truncation"
        );
        self.coeffs[i] = self.field.r_canon(c.raw(), self.prec);
    }

    pub fn with_precision(&self, prec: u32) -> TruncSeries {
        TruncSeries::from_raw(
            &self.field,
            self.coeffs.clone(),
            prec.min(self.prec),
            &self.modulus,
        )
    }

    /// Raise the nominal precision (the representative is kept; used for exact inputs).
    pub fn lift_precision(&self, prec: u32) -> TruncSeries {
        TruncSeries::from_raw(&self.field, self.coeffs.clone(), prec, &self.modulus)
    }

    fn compatible(&self, other: &TruncSeries) {
        assert!(self.field == other.field, "series over different fields");
        assert!(
            self.modulus == other.modulus,
            "series with different moduli"
        );
    }

    pub fn add(&self, other: &TruncSeries) -> TruncSeries {
        self.compatible(other);
        let prec = self.prec.min(other.prec);
        let c = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| self.field.r_add(a, b))
            .collect();
        TruncSeries::from_raw(&self.field, c, prec, &self.modulus)
    }

    pub fn sub(&self, other: &TruncSeries) -> TruncSeries {
        self.compatible(other);
        let prec = self.prec.min(other.prec);
        let c = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| self.field.r_sub(a, b))
            .collect();
        TruncSeries::from_raw(&self.field, c, prec, &self.modulus)
    }

    pub fn neg(&self) -> TruncSeries {
        let c = self.coeffs.iter().map(|a| self.field.r_neg(a)).collect();
        TruncSeries::from_raw(&self.field, c, self.prec, &self.modulus)
    }

    /// Minimum pi-adic valuation over coefficients; None if the series is zero at its precision.
    pub fn valuation(&self) -> Option<u32> {
        self.coeffs
            .iter()
            .filter_map(|c| self.field.r_val(c, self.prec))
            .min()
    }

    pub fn is_zero(&self) -> bool {
        self.valuation().is_none()
    }

    /// Index of the first coefficient that is nonzero at the working precision.
    pub fn x_valuation(&self) -> Option<usize> {
        self.coeffs
            .iter()
            .position(|c| self.field.r_val(c, self.prec).is_some())
    }

    pub fn mul(&self, other: &TruncSeries) -> TruncSeries {
        self.compatible(other);
        let va = self.valuation().unwrap_or(self.prec);
        let vb = other.valuation().unwrap_or(other.prec);
        let prec = (self.prec + vb).min(other.prec + va);
        let f = &self.field;
        let c = match &self.modulus {
            Modulus::PowerOfX(n) => {
                let n = *n;
                let mut out = vec![Raw::default(); n];
                for (i, x) in self.coeffs.iter().enumerate() {
                    if f.r_is_zero(x) {
                        continue;
                    }
                    for (j, y) in other.coeffs[..n - i].iter().enumerate() {
                        out[i + j] = f.r_add(&out[i + j], &f.r_mul(x, y));
                    }
                }
                out
            }
            Modulus::MonicPoly(_) => poly_mul_raw(f, &self.coeffs, &other.coeffs),
        };
        TruncSeries::from_raw(f, c, prec, &self.modulus)
    }

    pub fn scale(&self, c: &PadicElem) -> TruncSeries {
        let s = TruncSeries::constant(c, &self.modulus);
        self.mul(&s)
    }

    pub fn mul_int(&self, c: i64) -> TruncSeries {
        let r = self.field.r_from_i64(c);
        let v: Vec<Raw> = self
            .coeffs
            .iter()
            .map(|a| self.field.r_mul(a, &r))
            .collect();
        TruncSeries::from_raw(&self.field, v, self.prec, &self.modulus)
    }

    /// Multiply by X^s.
    pub fn shift_up(&self, s: usize) -> TruncSeries {
        let mut c = vec![Raw::default(); s];
        c.extend_from_slice(&self.coeffs);
        TruncSeries::from_raw(&self.field, c, self.prec, &self.modulus)
    }

    /// Divide by X^s in an X-adic truncation; the result is known mod X^{N-s}.
    pub fn shift_down(&self, s: usize) -> Result<TruncSeries> {
        let n = match self.modulus {
            Modulus::PowerOfX(n) => n,
            Modulus::MonicPoly(_) => {
                return Err(Error::Domain(
                    "division by X in a polynomial quotient".into(),
                ))
            }
        };
        if let Some(v) = self.x_valuation() {
            if v < s {
                return Err(Error::NotDivisible(format!(
                    "series has X-valuation {v} < {s}"
                )));
            }
        }
        let s = s.min(n);
        let c = self.coeffs[s..].to_vec();
        Ok(TruncSeries::from_raw(
            &self.field,
            c,
            self.prec,
            &Modulus::PowerOfX(n - s),
        ))
    }

    /// Divide every coefficient by pi^v.
    pub fn divide_pi(&self, v: u32) -> Result<TruncSeries> {
        if v == 0 {
            return Ok(self.clone());
        }
        let mut out = Vec::with_capacity(self.len());
        for i in 0..self.len() {
            out.push(*self.coeff(i).divide_exact(v)?.raw());
        }
        Ok(TruncSeries::from_raw(
            &self.field,
            out,
            self.prec - v,
            &self.modulus,
        ))
    }

    /// Re-express in another quotient. From a polynomial quotient to X^N the
    /// canonical representative (degree < deg m) is used as a polynomial.
    pub fn to_modulus(&self, modulus: &Modulus) -> TruncSeries {
        TruncSeries::from_raw(&self.field, self.coeffs.clone(), self.prec, modulus)
    }

    pub fn reduce_mod_pi(&self) -> ResidueSeries {
        let c = self
            .coeffs
            .iter()
            .map(|r| self.field.r_residue(r))
            .collect();
        ResidueSeries::new(&self.field, c)
    }

    /// f(g) for g with zero constant term, by Horner's rule.
    pub fn compose(&self, g: &TruncSeries) -> Result<TruncSeries> {
        self.compatible(g);
        if !g.coeff(0).is_zero() {
            return Err(Error::Domain(
                "inner series must have zero constant term".into(),
            ));
        }
        let f = &self.field;
        // a sparse inner polynomial keeps the Horner steps cheap
        let last = g
            .coeffs
            .iter()
            .rposition(|c| !f.r_is_zero(c))
            .map(|i| i + 1)
            .unwrap_or(0);
        let gc = &g.coeffs[..last];
        let n = self.len();
        let prec = self.prec.min(g.prec);
        let mut acc: Vec<Raw> = Vec::new();
        for i in (0..n).rev() {
            let mut next = match &self.modulus {
                Modulus::PowerOfX(m) => {
                    let mut out = vec![Raw::default(); (*m).min(acc.len() + gc.len())];
                    for (a, x) in acc.iter().enumerate() {
                        if f.r_is_zero(x) {
                            continue;
                        }
                        for (b, y) in gc.iter().enumerate() {
                            if a + b >= out.len() {
                                break;
                            }
                            out[a + b] = f.r_add(&out[a + b], &f.r_mul(x, y));
                        }
                    }
                    out
                }
                Modulus::MonicPoly(m) => {
                    let mut out = poly_mul_raw(f, &acc, gc);
                    reduce_monic_raw(f, &mut out, m);
                    out
                }
            };
            if next.is_empty() {
                next.push(Raw::default());
            }
            next[0] = f.r_add(&next[0], &self.coeffs[i]);
            acc = next;
        }
        Ok(TruncSeries::from_raw(f, acc, prec, &self.modulus))
    }

    pub fn frobenius_phi(&self) -> TruncSeries {
        let g = TruncSeries::phi_x(&self.field, self.prec, &self.modulus);
        self.compose(&g).expect("phi(X) has zero constant term")
    }

    /// gamma^j; negative j applies the inverse substitution.
    pub fn gamma_act(&self, j: i64) -> TruncSeries {
        if j == 0 {
            return self.clone();
        }
        let g = if j > 0 {
            TruncSeries::gamma_x(&self.field, self.prec, &self.modulus)
        } else {
            self.gamma_inverse_x()
        };
        let mut out = self.clone();
        for _ in 0..j.unsigned_abs() {
            out = out.compose(&g).expect("gamma(X) has zero constant term");
        }
        out
    }

    /// gamma^{-1}(X) = (1+X)^{1/chi} - 1 in this quotient.
    fn gamma_inverse_x(&self) -> TruncSeries {
        let f = &self.field;
        let n = self.modulus.lift_length(f, self.prec);
        let big = Modulus::PowerOfX(n);
        let chi = f.chi_gamma();
        let one_plus_x = TruncSeries::from_raw(f, vec![f.r_one(), f.r_one()], self.prec, &big);
        // Newton for h^chi = 1 + X, starting from h = 1
        let inv_chi = PadicElem::from_int(f, chi as i64, self.prec)
            .inv()
            .expect("chi is a unit");
        let mut h = TruncSeries::one(f, self.prec, &big);
        loop {
            let hpow = h.pow(chi as u32 - 1);
            let resid = hpow.mul(&h).sub(&one_plus_x);
            if resid.is_zero() {
                break;
            }
            let step = resid
                .mul(&hpow.unit_inverse().expect("unit"))
                .scale(&inv_chi);
            h = h.sub(&step);
        }
        let g = h.sub(&TruncSeries::one(f, self.prec, &big));
        g.to_modulus(&self.modulus)
    }

    /// (1+X)^a - 1 substituted for X, for a in Z_p (a unit for the Gamma action).
    pub fn subst_cyclo(&self, a: &PadicElem) -> Result<TruncSeries> {
        let f = &self.field;
        let n = self.modulus.lift_length(f, self.prec);
        let big = Modulus::PowerOfX(n);
        let mut c = vec![Raw::default(); n];
        for (i, ci) in c.iter_mut().enumerate().skip(1) {
            let b = PadicElem::binom_padic(a, i as u32)?;
            if b.precision() < self.prec {
                return Err(Error::InsufficientPrecision(format!(
                    "binomial coefficient {i} known mod pi^{} < pi^{}",
                    b.precision(),
                    self.prec
                )));
            }
            *ci = *b.raw();
        }
        let g = TruncSeries::from_raw(f, c, self.prec, &big).to_modulus(&self.modulus);
        self.compose(&g)
    }

    pub fn pow(&self, e: u32) -> TruncSeries {
        let mut r = TruncSeries::one(&self.field, self.field.max_precision(), &self.modulus);
        let mut b = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        r
    }

    /// Inverse of a series with unit constant term.
    pub fn unit_inverse(&self) -> Result<TruncSeries> {
        let f = &self.field;
        let c0 = self.coeff(0);
        let i0 = c0.inv()?;
        match &self.modulus {
            Modulus::PowerOfX(n) => {
                let n = *n;
                let mut g = vec![Raw::default(); n];
                let i0r = *i0.raw();
                if n > 0 {
                    g[0] = i0r;
                }
                for r in 1..n {
                    let mut s = Raw::default();
                    for i in 1..=r {
                        let t = f.r_mul(&self.coeffs[i], &g[r - i]);
                        s = f.r_add(&s, &t);
                    }
                    g[r] = f.r_canon(&f.r_neg(&f.r_mul(&s, &i0r)), self.prec);
                }
                Ok(TruncSeries::from_raw(f, g, self.prec, &self.modulus))
            }
            Modulus::MonicPoly(_) => {
                // X is nilpotent in the quotient mod pi^prec, so Newton converges
                let one = TruncSeries::one(f, self.prec, &self.modulus);
                let mut g = TruncSeries::constant(&i0, &self.modulus);
                let limit =
                    2 * (usize::BITS - self.modulus.lift_length(f, self.prec).leading_zeros()) + 4;
                for _ in 0..limit {
                    let e = one.sub(&self.mul(&g));
                    if e.is_zero() {
                        return Ok(g.with_precision(self.prec));
                    }
                    g = g.add(&g.mul(&e));
                }
                Err(Error::PrecisionExhausted(
                    "unit inverse did not converge".into(),
                ))
            }
        }
    }

    /// v with v(0) = 1 and phi(v) = v * u, for u = 1 mod X.
    pub fn solve_phi_ratio(&self) -> Result<TruncSeries> {
        let f = &self.field;
        if !self.coeff(0).sub(&PadicElem::one(f, self.prec))?.is_zero() {
            return Err(Error::Domain("solve_phi_ratio needs u = 1 mod X".into()));
        }
        let n = self.modulus.lift_length(f, self.prec);
        let big = Modulus::PowerOfX(n);
        let u = self.to_modulus(&big);
        // column r of phi(X)^i for i < r
        let phi = phi_x_raw(f);
        let mut phi_pows: Vec<Vec<Raw>> = vec![vec![f.r_one()]];
        for i in 1..n {
            let mut next = poly_mul_raw(f, &phi_pows[i - 1], &phi);
            next.truncate(n);
            phi_pows.push(next);
        }
        let prec = self.prec;
        let mut v = vec![Raw::default(); n];
        v[0] = f.r_one();
        let p = f.p() as i64;
        let mut pr: i64 = 1;
        for r in 1..n {
            pr = (pr as i128 * p as i128 % f.modulus() as i128) as i64;
            let mut s = Raw::default();
            for i in 0..r {
                let t = f.r_sub(
                    &u.coeffs[r - i],
                    phi_pows[i].get(r).unwrap_or(&Raw::default()),
                );
                s = f.r_add(&s, &f.r_mul(&v[i], &t));
            }
            // (p^r - 1) is a unit
            let d = PadicElem::from_int(f, pr - 1, prec).inv()?;
            v[r] = f.r_mul(&s, d.raw());
        }
        Ok(TruncSeries::from_raw(f, v, prec, &big).to_modulus(&self.modulus))
    }

    /// Degree of the stored representative, None for zero.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs
            .iter()
            .rposition(|c| self.field.r_val(c, self.prec).is_some())
    }

    /// Polynomial division of the stored representative by a monic polynomial
    /// `den` (also given by its representative). Both results share `self`'s modulus.
    pub fn poly_divrem(&self, den: &TruncSeries) -> Result<(TruncSeries, TruncSeries)> {
        let f = &self.field;
        let d = den
            .degree()
            .ok_or_else(|| Error::Domain("division by zero polynomial".into()))?;
        if !den.coeff(d).sub(&PadicElem::one(f, den.prec))?.is_zero() {
            return Err(Error::Domain("divisor is not monic".into()));
        }
        let mut r = self.coeffs.clone();
        let mut q = vec![Raw::default(); r.len()];
        for i in (d..r.len()).rev() {
            let c = r[i];
            if f.r_is_zero(&c) {
                continue;
            }
            q[i - d] = c;
            for j in 0..=d {
                r[i - d + j] = f.r_sub(&r[i - d + j], &f.r_mul(&c, &den.coeffs[j]));
            }
        }
        let prec = self.prec.min(den.prec);
        Ok((
            TruncSeries::from_raw(f, q, prec, &self.modulus),
            TruncSeries::from_raw(f, r, prec, &self.modulus),
        ))
    }

    /// Exact polynomial quotient; fails unless the remainder vanishes at precision.
    pub fn poly_div_exact(&self, den: &TruncSeries) -> Result<TruncSeries> {
        let (q, r) = self.poly_divrem(den)?;
        if !r.is_zero() {
            return Err(Error::NotDivisible("nonzero polynomial remainder".into()));
        }
        Ok(q)
    }

    /// Lift a residue series to O_E/pi (precision 1).
    pub fn from_residue(rs: &ResidueSeries, modulus: &Modulus) -> TruncSeries {
        let f = rs.field();
        let c = rs.coeffs().iter().map(|&x| f.r_lift(x)).collect();
        TruncSeries::from_raw(f, c, 1, modulus)
    }

    pub fn eq_at(&self, other: &TruncSeries) -> bool {
        self.sub(other).is_zero()
    }

    /// Canonical text: "c_0 + c_1*X + ... + O(X^N)" with p-adic literal coefficients.
    pub fn to_text(&self) -> String {
        let mut parts = Vec::new();
        for i in 0..self.len() {
            let c = self.coeff(i);
            if c.is_zero() {
                continue;
            }
            let lit = format!("({c})");
            parts.push(match i {
                0 => lit,
                1 => format!("{lit}*X"),
                _ => format!("{lit}*X^{i}"),
            });
        }
        match &self.modulus {
            Modulus::PowerOfX(n) => parts.push(format!("O(X^{n})")),
            Modulus::MonicPoly(m) => parts.push(format!("O(phi(X)^{})", m.k)),
        }
        parts.join(" + ")
    }

    /// JSON-friendly encoding: one literal per coefficient.
    pub fn to_strings(&self) -> Vec<String> {
        (0..self.len()).map(|i| self.coeff(i).to_string()).collect()
    }

    pub fn from_strings(field: &Field, items: &[String], modulus: &Modulus) -> Result<TruncSeries> {
        if items.len() > modulus.len() {
            return Err(Error::Parse(
                "more coefficients than the modulus allows".into(),
            ));
        }
        let mut cs = Vec::with_capacity(items.len());
        for s in items {
            cs.push(PadicElem::parse(field, s)?);
        }
        if cs.is_empty() {
            return Ok(TruncSeries::zero(
                field,
                field.params().pi_precision,
                modulus,
            ));
        }
        Ok(TruncSeries::from_padics(field, &cs, modulus))
    }
}

impl PartialEq for TruncSeries {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.modulus == other.modulus
            && self.prec == other.prec
            && self.coeffs == other.coeffs
    }
}
impl Eq for TruncSeries {}

impl fmt::Debug for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Convenience: reduce an arbitrary coefficient list modulo a monic modulus.
pub fn reduce_mod_monic(field: &Field, coeffs: &[PadicElem], modulus: &Modulus) -> TruncSeries {
    TruncSeries::from_padics(field, coeffs, modulus)
}
