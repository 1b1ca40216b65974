//! Power series over the residue field k_E, truncated at X^N.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::residue::{Fq, ResidueField};

#[derive(Clone, PartialEq, Eq)]
pub struct ResidueSeries {
    field: Field,
    coeffs: Vec<Fq>,
}

impl ResidueSeries {
    pub fn new(field: &Field, coeffs: Vec<Fq>) -> ResidueSeries {
        ResidueSeries {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn zero(field: &Field, n: usize) -> ResidueSeries {
        ResidueSeries::new(field, vec![0; n])
    }

    pub fn one(field: &Field, n: usize) -> ResidueSeries {
        ResidueSeries::constant(field, 1, n)
    }

    pub fn constant(field: &Field, c: Fq, n: usize) -> ResidueSeries {
        let mut v = vec![0; n];
        if n > 0 {
            v[0] = c;
        }
        ResidueSeries::new(field, v)
    }

    pub fn monomial(field: &Field, c: Fq, i: usize, n: usize) -> ResidueSeries {
        let mut v = vec![0; n];
        if i < n {
            v[i] = c;
        }
        ResidueSeries::new(field, v)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    fn k(&self) -> &ResidueField {
        self.field.residue_field()
    }
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }
    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
    pub fn coeffs(&self) -> &[Fq] {
        &self.coeffs
    }
    pub fn coeff(&self, i: usize) -> Fq {
        self.coeffs.get(i).copied().unwrap_or(0)
    }
    pub fn set_coeff(&mut self, i: usize, c: Fq) {
        self.coeffs[i] = c;
    }

    /// Change the truncation; growing pads with zeros.
    pub fn resized(&self, n: usize) -> ResidueSeries {
        let mut c = self.coeffs.clone();
        c.resize(n, 0);
        ResidueSeries::new(&self.field, c)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn x_valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|&c| c != 0)
    }

    pub fn add(&self, o: &ResidueSeries) -> ResidueSeries {
        let n = self.len().min(o.len());
        let k = self.k();
        let c = (0..n).map(|i| k.add(self.coeffs[i], o.coeffs[i])).collect();
        ResidueSeries::new(&self.field, c)
    }

    pub fn sub(&self, o: &ResidueSeries) -> ResidueSeries {
        let n = self.len().min(o.len());
        let k = self.k();
        let c = (0..n).map(|i| k.sub(self.coeffs[i], o.coeffs[i])).collect();
        ResidueSeries::new(&self.field, c)
    }

    pub fn neg(&self) -> ResidueSeries {
        let k = self.k();
        ResidueSeries::new(&self.field, self.coeffs.iter().map(|&c| k.neg(c)).collect())
    }

    pub fn scale(&self, a: Fq) -> ResidueSeries {
        let k = self.k();
        ResidueSeries::new(
            &self.field,
            self.coeffs.iter().map(|&c| k.mul(c, a)).collect(),
        )
    }

    pub fn mul(&self, o: &ResidueSeries) -> ResidueSeries {
        let nz = |s: &ResidueSeries| s.coeffs.iter().filter(|&&c| c != 0).count();
        if nz(self) > nz(o) {
            return o.mul(self);
        }
        let n = self.len().min(o.len());
        let k = self.k();
        if k.f() == 1 {
            let p = k.p() as u64;
            let mut acc = vec![0u64; n];
            for (i, &a) in self.coeffs[..n].iter().enumerate() {
                if a == 0 {
                    continue;
                }
                for (j, &b) in o.coeffs[..n - i].iter().enumerate() {
                    acc[i + j] += a as u64 * b as u64;
                }
                if i % 1024 == 1023 {
                    for x in acc.iter_mut() {
                        *x %= p;
                    }
                }
            }
            return ResidueSeries::new(
                &self.field,
                acc.into_iter().map(|x| (x % p) as Fq).collect(),
            );
        }
        let mut out = vec![0; n];
        for (i, &a) in self.coeffs[..n].iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.coeffs[..n - i].iter().enumerate() {
                out[i + j] = k.add(out[i + j], k.mul(a, b));
            }
        }
        ResidueSeries::new(&self.field, out)
    }

    pub fn shift_up(&self, s: usize) -> ResidueSeries {
        let n = self.len();
        let mut c = vec![0; n];
        c[s..n].copy_from_slice(&self.coeffs[..(n - s)]);
        ResidueSeries::new(&self.field, c)
    }

    /// Divide by X^s; the result is known to X^{N-s}.
    pub fn shift_down(&self, s: usize) -> Result<ResidueSeries> {
        if let Some(v) = self.x_valuation() {
            if v < s {
                return Err(Error::NotDivisible(format!("X-valuation {v} < {s}")));
            }
        }
        let s = s.min(self.len());
        Ok(ResidueSeries::new(&self.field, self.coeffs[s..].to_vec()))
    }

    /// phi acts as X -> X^p.
    pub fn phi(&self) -> ResidueSeries {
        let n = self.len();
        let p = self.field.p() as usize;
        let mut c = vec![0; n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if i * p >= n {
                break;
            }
            c[i * p] = a;
        }
        ResidueSeries::new(&self.field, c)
    }

    /// f(g) for g(0) = 0.
    pub fn compose(&self, g: &ResidueSeries) -> Result<ResidueSeries> {
        if g.coeff(0) != 0 {
            return Err(Error::Domain(
                "inner series must have zero constant term".into(),
            ));
        }
        let n = self.len().min(g.len());
        let k = self.k();
        let terms: Vec<(usize, Fq)> = g.coeffs[..n]
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (i, c))
            .collect();
        let mut acc = vec![0; n];
        for i in (0..n).rev() {
            let mut next = vec![0; n];
            for (a, &x) in acc.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                for &(b, y) in &terms {
                    if a + b >= n {
                        break;
                    }
                    next[a + b] = k.add(next[a + b], k.mul(x, y));
                }
            }
            next[0] = k.add(next[0], self.coeffs[i]);
            acc = next;
        }
        Ok(ResidueSeries::new(&self.field, acc))
    }

    /// gamma(X) mod pi, truncated at X^n.
    pub fn gamma_x(field: &Field, n: usize) -> ResidueSeries {
        let chi = field.chi_gamma();
        let k = field.residue_field();
        let mut c = vec![0; n];
        // binomial coefficients C(chi, i) mod p
        let mut row = vec![1u64];
        for _ in 0..chi {
            let mut next = vec![0u64; row.len() + 1];
            for (i, &x) in row.iter().enumerate() {
                next[i] = (next[i] + x) % field.p();
                next[i + 1] = (next[i + 1] + x) % field.p();
            }
            row = next;
        }
        for (i, &x) in row.iter().enumerate().skip(1) {
            if i < n {
                c[i] = k.from_int(x as i64);
            }
        }
        ResidueSeries::new(field, c)
    }

    /// gamma^{-1}(X) mod pi = (1+X)^{1/chi} - 1, via Lucas' theorem on the
    /// p-adic digits of 1/chi.
    pub fn gamma_inverse_x(field: &Field, n: usize) -> ResidueSeries {
        let p = field.p();
        let mut m = 1u64;
        let mut digits_needed = 0;
        while (m as usize) < n.max(2) {
            m *= p;
            digits_needed += 1;
        }
        let a = crate::padic::inv_mod_prime_power(field.chi_gamma(), p, m);
        let mut ad = Vec::with_capacity(digits_needed);
        let mut t = a;
        for _ in 0..digits_needed {
            ad.push(t % p);
            t /= p;
        }
        let k = field.residue_field();
        let mut c = vec![0; n];
        for (i, ci) in c.iter_mut().enumerate().skip(1) {
            let mut v = 1u64;
            let mut ii = i as u64;
            for &dj in &ad {
                let ij = ii % p;
                ii /= p;
                v = v * small_binom_mod(dj, ij, p) % p;
            }
            *ci = k.from_int(v as i64);
        }
        ResidueSeries::new(field, c)
    }

    pub fn gamma_act(&self, j: i64) -> ResidueSeries {
        if j == 0 {
            return self.clone();
        }
        let g = if j > 0 {
            ResidueSeries::gamma_x(&self.field, self.len())
        } else {
            ResidueSeries::gamma_inverse_x(&self.field, self.len())
        };
        let mut out = self.clone();
        for _ in 0..j.unsigned_abs() {
            out = out.compose(&g).expect("gamma(X) has zero constant term");
        }
        out
    }

    pub fn unit_inverse(&self) -> Result<ResidueSeries> {
        let k = self.k();
        let n = self.len();
        let i0 = k.inv(self.coeff(0)).ok_or(Error::NonUnit)?;
        let mut g = vec![0; n];
        if n > 0 {
            g[0] = i0;
        }
        for r in 1..n {
            let mut s = 0;
            for i in 1..=r {
                s = k.add(s, k.mul(self.coeffs[i], g[r - i]));
            }
            g[r] = k.neg(k.mul(s, i0));
        }
        Ok(ResidueSeries::new(&self.field, g))
    }

    pub fn pow(&self, e: u32) -> ResidueSeries {
        let mut r = ResidueSeries::one(&self.field, self.len());
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    pub fn to_text(&self) -> String {
        let k = self.k();
        let mut parts = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let s = k.format(c);
            parts.push(match i {
                0 => s,
                1 => format!("{s}*X"),
                _ => format!("{s}*X^{i}"),
            });
        }
        parts.push(format!("O(X^{})", self.len()));
        parts.join(" + ")
    }
}

impl fmt::Debug for ResidueSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Display for ResidueSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn small_binom_mod(n: u64, r: u64, p: u64) -> u64 {
    if r > n {
        return 0;
    }
    let mut num = 1u64;
    let mut den = 1u64;
    for j in 0..r {
        num = num * ((n - j) % p) % p;
        den = den * ((j + 1) % p) % p;
    }
    num * crate::field::pow_mod(den, p - 2, p) % p
}
