//! Field parameters for E/Q_p and the residue field k_E.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::residue::ResidueField;

/// Largest e*f handled by the coefficient storage.
pub const MAX_DEGREE: usize = 4;

/// User-facing description of E = Q_p(s)[t]/(g(t)), s a root of the unramified polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldParams {
    pub p: u64,
    pub e: usize,
    pub f: usize,
    /// Monic Eisenstein polynomial g(t), constant term first, length e+1.
    pub eisenstein: Vec<i64>,
    /// Monic degree-f polynomial over F_p, constant term first, length f+1.
    pub unramified_minpoly: Vec<u64>,
    pub chi_gamma: u64,
    pub pi_precision: u32,
}

impl FieldParams {
    /// Q_p itself: e = f = 1, g(t) = t - p.
    pub fn qp(p: u64, pi_precision: u32) -> Result<Self> {
        check_prime(p)?;
        Ok(FieldParams {
            p,
            e: 1,
            f: 1,
            eisenstein: vec![-(p as i64), 1],
            unramified_minpoly: vec![0, 1],
            chi_gamma: smallest_primitive_root_mod_p2(p),
            pi_precision,
        })
    }

    /// Totally ramified quadratic E = Q_p(sqrt(p*u)) for a unit integer u.
    pub fn ramified_quadratic(p: u64, u: i64, pi_precision: u32) -> Result<Self> {
        check_prime(p)?;
        if u.rem_euclid(p as i64) == 0 {
            return Err(Error::InvalidField(format!("{u} is not a unit mod {p}")));
        }
        Ok(FieldParams {
            p,
            e: 2,
            f: 1,
            eisenstein: vec![-(p as i64) * u, 0, 1],
            unramified_minpoly: vec![0, 1],
            chi_gamma: smallest_primitive_root_mod_p2(p),
            pi_precision,
        })
    }

    /// Unramified quadratic E = Q_p(sqrt(n)) for a non-square n mod p.
    pub fn unramified_quadratic(p: u64, pi_precision: u32) -> Result<Self> {
        check_prime(p)?;
        let n = (2..p).find(|&n| !is_square_mod(n, p)).unwrap();
        Ok(FieldParams {
            p,
            e: 1,
            f: 2,
            eisenstein: vec![-(p as i64), 1],
            unramified_minpoly: vec![(p - n) % p, 0, 1],
            chi_gamma: smallest_primitive_root_mod_p2(p),
            pi_precision,
        })
    }

    pub fn degree(&self) -> usize {
        self.e * self.f
    }

    pub fn validate(&self) -> Result<()> {
        check_prime(self.p)?;
        if self.e == 0 || self.f == 0 || self.e * self.f > MAX_DEGREE {
            return Err(Error::InvalidField(format!(
                "unsupported (e, f) = ({}, {})",
                self.e, self.f
            )));
        }
        let p = self.p as i64;
        let g = &self.eisenstein;
        if g.len() != self.e + 1 || g[self.e] != 1 {
            return Err(Error::InvalidField(
                "Eisenstein polynomial must be monic of degree e".into(),
            ));
        }
        if g[..self.e].iter().any(|c| c.rem_euclid(p) != 0)
            || (g[0] / p).rem_euclid(p) == 0
            || g[0] % p != 0
        {
            return Err(Error::InvalidField("polynomial is not Eisenstein".into()));
        }
        let h = &self.unramified_minpoly;
        if h.len() != self.f + 1 || h[self.f] % self.p != 1 {
            return Err(Error::InvalidField(
                "unramified polynomial must be monic of degree f".into(),
            ));
        }
        if self.chi_gamma != smallest_primitive_root_mod_p2(self.p) {
            return Err(Error::InvalidField(
                "chi_gamma must be the smallest primitive root mod p^2".into(),
            ));
        }
        Ok(())
    }
}

fn check_prime(p: u64) -> Result<()> {
    if !(3..=65521).contains(&p)
        || !(2..)
            .take_while(|d| d * d <= p)
            .all(|d| !p.is_multiple_of(d))
    {
        return Err(Error::InvalidField(format!(
            "p = {p} must be an odd prime below 2^16"
        )));
    }
    Ok(())
}

pub(crate) fn is_square_mod(a: u64, p: u64) -> bool {
    let a = a % p;
    a == 0 || pow_mod(a, (p - 1) / 2, p) == 1
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    r
}

/// Smallest positive integer generating (Z/p^2)^x.
pub fn smallest_primitive_root_mod_p2(p: u64) -> u64 {
    let m = p * p;
    let phi = p * (p - 1);
    let mut primes = vec![p];
    let mut n = p - 1;
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            primes.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        primes.push(n);
    }
    (2..m)
        .find(|&g| g % p != 0 && primes.iter().all(|&q| pow_mod(g, phi / q, m) != 1))
        .unwrap()
}

/// Shared, immutable field context. Cloning is cheap.
#[derive(Clone)]
pub struct Field(pub(crate) Arc<FieldInner>);

pub(crate) struct FieldInner {
    pub params: FieldParams,
    pub p: u64,
    pub e: usize,
    pub f: usize,
    pub deg: usize,
    /// Storage modulus exponent: values are kept mod p^cap.
    pub cap: u32,
    pub modulus: u64,
    pub p_pows: Vec<u64>,
    /// g(t) coefficients mod p^cap (monic, length e+1).
    pub g: Vec<u64>,
    /// h(s) integer lift mod p^cap (monic, length f+1).
    pub h: Vec<u64>,
    /// p/pi as a stored element.
    pub p_over_pi: [u64; MAX_DEGREE],
    pub residue: ResidueField,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field(p={}, e={}, f={})", self.0.p, self.0.e, self.0.f)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.params == other.0.params
    }
}
impl Eq for Field {}

impl Field {
    pub fn new(params: FieldParams) -> Result<Field> {
        params.validate()?;
        let p = params.p;
        let mut cap = 0u32;
        let mut m: u64 = 1;
        // keep p^cap below 2^62 so sums of two stored values never overflow
        while (m as u128) * (p as u128) < (1u128 << 62) {
            m *= p;
            cap += 1;
        }
        let mut p_pows = vec![1u64];
        for _ in 0..cap {
            let last = *p_pows.last().unwrap();
            p_pows.push(last * p);
        }
        let red = |c: i64| c.rem_euclid(m as i64) as u64;
        let g: Vec<u64> = params.eisenstein.iter().map(|&c| red(c)).collect();
        let h: Vec<u64> = params.unramified_minpoly.iter().map(|&c| c % p).collect();
        let residue = ResidueField::new(p, &h)?;
        let mut inner = FieldInner {
            p,
            e: params.e,
            f: params.f,
            deg: params.e * params.f,
            cap,
            modulus: m,
            p_pows,
            g,
            h,
            p_over_pi: [0; MAX_DEGREE],
            residue,
            params,
        };
        inner.p_over_pi = compute_p_over_pi(&inner);
        Ok(Field(Arc::new(inner)))
    }

    pub fn qp(p: u64) -> Result<Field> {
        Field::new(FieldParams::qp(p, 20)?)
    }

    pub fn params(&self) -> &FieldParams {
        &self.0.params
    }
    pub fn p(&self) -> u64 {
        self.0.p
    }
    pub fn e(&self) -> usize {
        self.0.e
    }
    pub fn f(&self) -> usize {
        self.0.f
    }
    pub fn chi_gamma(&self) -> u64 {
        self.0.params.chi_gamma
    }
    /// Largest absolute precision (in powers of pi) the storage can carry.
    pub fn max_precision(&self) -> u32 {
        self.0.e as u32 * (self.0.cap - 1)
    }
    pub fn residue_field(&self) -> &ResidueField {
        &self.0.residue
    }
    pub fn same(&self, other: &Field) -> bool {
        self == other
    }
}

/// p/pi = -(sum_{j=1..e} g_j pi^{j-1}) / w where g_0 = p*w.
fn compute_p_over_pi(inner: &FieldInner) -> [u64; MAX_DEGREE] {
    let m = inner.modulus;
    let e = inner.e;
    let f = inner.f;
    let g0 = inner.params.eisenstein[0];
    let w = g0 / inner.p as i64;
    let w_mod = w.rem_euclid(m as i64) as u64;
    let w_inv = crate::padic::inv_mod_prime_power(w_mod, inner.p, m);
    let mut out = [0u64; MAX_DEGREE];
    for j in 1..=e {
        let c = inner.g[j];
        let v = ((m - c % m) as u128 * w_inv as u128 % m as u128) as u64;
        out[(j - 1) * f] = v;
    }
    out
}
