//! Semisimple mod-p representations: labels, the catalog of (phi, Gamma)-data,
//! stable lines and identification of a residue pair.
//!
//! Conventions. A character (lambda, i) is the rank-one module with
//! phi(e) = lambda e and gamma(e) = chi(gamma)^{-i} e. The pair
//! P = [[0,-1],[c X^{(p-1)h0}, 0]], G = chi^{-i} diag(phi(g), g) is labelled
//! Irreducible{h = h0 + (p+1) i, twist = class of c}. Labels refer to the
//! object computed by the pair, i.e. the reduction of V^*.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::field::Field;
use crate::linalg::{kernel, FqMatrix};
use crate::matrix::Mat;
use crate::phigamma::{Provenance, ResiduePair};
use crate::residue::{Fq, ResidueField};
use crate::resseries::ResidueSeries;

/// (lambda, i): unramified parameter and cyclotomic exponent mod p-1.
pub type Char = (Fq, u32);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum SemisimpleLabel {
    Irreducible { h: u32, twist: Fq },
    Split { factors: [Char; 2] },
}

fn twist_class(k: &ResidueField, c: Fq) -> Fq {
    if k.is_square(c) {
        1
    } else {
        k.units()
            .find(|&u| !k.is_square(u))
            .expect("odd p has nonsquares")
    }
}

impl SemisimpleLabel {
    /// Canonical irreducible label; None if the data describe a split object.
    pub fn irreducible(field: &Field, h: i64, c: Fq) -> Option<SemisimpleLabel> {
        let p = field.p() as i64;
        let m = p * p - 1;
        let h = h.rem_euclid(m);
        let h = h.min((p * h) % m) as u32;
        let k = field.residue_field();
        let twist = twist_class(k, c);
        if h as i64 % (p + 1) == 0 && k.is_square(k.neg(twist)) {
            return None;
        }
        Some(SemisimpleLabel::Irreducible { h, twist })
    }

    pub fn split(field: &Field, a: Char, b: Char) -> SemisimpleLabel {
        let pm = field.p() as u32 - 1;
        let mut f = [(a.0, a.1 % pm), (b.0, b.1 % pm)];
        f.sort();
        SemisimpleLabel::Split { factors: f }
    }

    /// Human-readable form, e.g. `ind(w2^4) x mu(1)`.
    pub fn describe(&self, field: &Field) -> String {
        let k = field.residue_field();
        match self {
            SemisimpleLabel::Irreducible { h, twist } => {
                format!("ind(w2^{h}) x mu({})", k.format(*twist))
            }
            SemisimpleLabel::Split { factors } => format!(
                "mu({}) w^{} + mu({}) w^{}",
                k.format(factors[0].0),
                factors[0].1,
                k.format(factors[1].0),
                factors[1].1
            ),
        }
    }
}

/// Label plus the convention note attached to every identification output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedLabel {
    pub label: SemisimpleLabel,
    pub text: String,
    pub object: String,
    pub dual: bool,
    pub note: String,
}

pub fn dual_note(field: &Field, label: &SemisimpleLabel) -> AnnotatedLabel {
    AnnotatedLabel {
        label: label.clone(),
        text: label.describe(field),
        object: "Vbar_star".into(),
        dual: true,
        note: "semisimplified reduction of the dual V*; the label for V itself is not computed"
            .into(),
    }
}

/// All characters (lambda, i) of the residue field.
pub fn characters(field: &Field) -> Vec<Char> {
    let pm = field.p() as u32 - 1;
    let mut out = Vec::new();
    for l in field.residue_field().units() {
        for i in 0..pm {
            out.push((l, i));
        }
    }
    out
}

/// Every label over k_E, in canonical order.
pub fn catalog_labels(field: &Field) -> Vec<SemisimpleLabel> {
    let chars = characters(field);
    let mut out = Vec::new();
    for (a, x) in chars.iter().enumerate() {
        for y in &chars[a..] {
            out.push(SemisimpleLabel::split(field, *x, *y));
        }
    }
    let p = field.p() as i64;
    let k = field.residue_field();
    let mut classes = vec![1];
    classes.push(twist_class(
        k,
        k.units().find(|&u| !k.is_square(u)).unwrap(),
    ));
    for h in 0..p * p - 1 {
        for &c in &classes {
            if let Some(l) = SemisimpleLabel::irreducible(field, h, c) {
                if !out.contains(&l) {
                    out.push(l);
                }
            }
        }
    }
    out.sort();
    out
}

fn chi_pow(field: &Field, e: i64) -> Fq {
    let k = field.residue_field();
    k.pow(k.from_int(field.chi_gamma() as i64), e)
}

/// w = gamma(X)/X mod p, truncated at X^n.
fn w_series(field: &Field, n: usize) -> ResidueSeries {
    ResidueSeries::gamma_x(field, n + 1)
        .shift_down(1)
        .expect("gamma(X) has no constant term")
}

/// The rank-one pair of a character.
pub fn character_pair(field: &Field, c: Char, n: usize) -> ResiduePair {
    ResiduePair {
        p: Mat::scalar1(ResidueSeries::constant(field, c.0, n)),
        g: Mat::scalar1(ResidueSeries::constant(
            field,
            chi_pow(field, -(c.1 as i64)),
            n,
        )),
        k: 1,
        meta: Provenance::Catalog,
    }
}

/// g in 1 + X k_E[[X]] with g(X^{p^2}) = g(X) u(X), u(0) = 1.
fn solve_phi2_ratio(u: &ResidueSeries) -> ResidueSeries {
    let field = u.field().clone();
    let n = u.len();
    let q2 = (field.p() * field.p()) as usize;
    // g = prod_{j >= 0} u(X^{p^{2j}})^{-1}
    let mut g = ResidueSeries::one(&field, n);
    let mut step = 1usize;
    while step < n {
        let mut c = vec![0; n];
        for (i, &a) in u.coeffs().iter().enumerate() {
            if i * step >= n {
                break;
            }
            c[i * step] = a;
        }
        let term = ResidueSeries::new(&field, c);
        g = g.mul(&term.unit_inverse().expect("u(0) = 1"));
        step *= q2;
    }
    g
}

fn irreducible_pair(field: &Field, h: u32, c: Fq, n: usize) -> (ResiduePair, Char) {
    let p = field.p() as u32;
    let (h0, i) = if h.is_multiple_of(p + 1) {
        (0, h / (p + 1))
    } else {
        (h % (p + 1), h / (p + 1))
    };
    induced_pair(field, h0, i % (p - 1), c, n)
}

/// P = [[0,-1],[c X^{(p-1)h0}, 0]] with the matching diagonal G twisted by
/// chi^{-i}; returns the pair and its determinant character.
pub fn induced_pair(field: &Field, h0: u32, i: u32, c: Fq, n: usize) -> (ResiduePair, Char) {
    let p = field.p() as u32;
    let k = field.residue_field();
    let e = ((p - 1) * h0) as usize;
    let z = ResidueSeries::zero(field, n);
    let pm = Mat::new2(
        z.clone(),
        ResidueSeries::constant(field, k.neg(1), n),
        ResidueSeries::monomial(field, c, e, n),
        z.clone(),
    );
    let u = w_series(field, n).pow(e as u32);
    let u0 = k.inv(u.coeff(0)).expect("w(0) = chi is a unit");
    let g2 = solve_phi2_ratio(&u.scale(u0));
    let g1 = g2.phi();
    let s = chi_pow(field, -(i as i64));
    let g = Mat::new2(g1.scale(s), z.clone(), z, g2.scale(s));
    let det = (c, (h0 + 2 * i) % (p - 1));
    (
        ResiduePair {
            p: pm,
            g,
            k: 0,
            meta: Provenance::Catalog,
        },
        det,
    )
}

fn split_pair(field: &Field, a: Char, b: Char, n: usize) -> ResiduePair {
    let z = ResidueSeries::zero(field, n);
    ResiduePair {
        p: Mat::new2(
            ResidueSeries::constant(field, a.0, n),
            z.clone(),
            z.clone(),
            ResidueSeries::constant(field, b.0, n),
        ),
        g: Mat::new2(
            ResidueSeries::constant(field, chi_pow(field, -(a.1 as i64)), n),
            z.clone(),
            z,
            ResidueSeries::constant(field, chi_pow(field, -(b.1 as i64)), n),
        ),
        k: 0,
        meta: Provenance::Catalog,
    }
}

/// A (phi, Gamma)-pair realizing a label, truncated at X^n.
pub fn label_pair(field: &Field, label: &SemisimpleLabel, n: usize) -> ResiduePair {
    match label {
        SemisimpleLabel::Irreducible { h, twist } => irreducible_pair(field, *h, *twist, n).0,
        SemisimpleLabel::Split { factors } => split_pair(field, factors[0], factors[1], n),
    }
}

fn label_det(field: &Field, label: &SemisimpleLabel) -> Char {
    let k = field.residue_field();
    let pm = field.p() as u32 - 1;
    match label {
        SemisimpleLabel::Irreducible { h, twist } => irreducible_pair(field, *h, *twist, 1).1,
        SemisimpleLabel::Split { factors } => (
            k.mul(factors[0].0, factors[1].0),
            (factors[0].1 + factors[1].1) % pm,
        ),
    }
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub label: SemisimpleLabel,
    pub pair: ResiduePair,
    /// Character of the determinant.
    pub det: Char,
}

#[derive(Clone, Debug)]
pub struct Catalog {
    pub field: Field,
    pub k: u32,
    pub x_precision: usize,
    pub entries: Vec<CatalogEntry>,
}

/// Build and validate the catalog at X-precision `n`.
pub fn build_catalog(field: &Field, k: u32, n: usize, exec: Exec) -> Result<Catalog> {
    let labels = catalog_labels(field);
    let built: Vec<Result<CatalogEntry>> = exec.map(&labels, |label| {
        let pair = ResiduePair {
            k,
            ..label_pair(field, label, n)
        };
        let det = label_det(field, label);
        if !pair.commutation_defect().is_zero() {
            return Err(Error::CatalogBuildFailure(format!(
                "{}: commutation",
                label.describe(field)
            )));
        }
        let line = stable_line(&pair, Exec::Sequential)?;
        match (label, &line) {
            (SemisimpleLabel::Irreducible { .. }, Some(_)) => {
                return Err(Error::CatalogBuildFailure(format!(
                    "{}: has a stable line",
                    label.describe(field)
                )))
            }
            (SemisimpleLabel::Split { .. }, None) => {
                return Err(Error::CatalogBuildFailure(format!(
                    "{}: no stable line",
                    label.describe(field)
                )))
            }
            _ => {}
        }
        let d = determinant_char(&pair)?;
        if d != det {
            return Err(Error::CatalogBuildFailure(format!(
                "{}: determinant",
                label.describe(field)
            )));
        }
        Ok(CatalogEntry {
            label: label.clone(),
            pair,
            det,
        })
    });
    let entries = built.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(Catalog {
        field: field.clone(),
        k,
        x_precision: n,
        entries,
    })
}

/// Smallest index of a nonzero coefficient, None for zero.
fn x_val(s: &ResidueSeries) -> Option<usize> {
    s.x_valuation()
}

fn pair_len(pair: &ResiduePair) -> usize {
    pair.p
        .entries()
        .iter()
        .chain(pair.g.entries())
        .map(|x| x.len())
        .min()
        .unwrap_or(0)
}

/// X-valuation of det(P).
pub fn det_valuation(pair: &ResiduePair) -> Result<usize> {
    x_val(&pair.p.det())
        .ok_or_else(|| Error::NotEtale("det(P) vanishes at working precision".into()))
}

/// Truncation length a hom computation with pole shift `s` needs.
fn hom_lengths(p: usize, s: usize, h_src: usize) -> (usize, usize) {
    let l = s + h_src / (p - 1) + 2;
    (l, l + (p - 1) * s + h_src)
}

/// Pole shifts to try when comparing objects whose phi-determinants have
/// X-valuations h_src and h_tgt.
fn shift_bound(p: usize, h_src: usize, h_tgt: usize) -> usize {
    (h_src + h_tgt) / (p - 1) + 1
}

/// X-precision sufficient for all identification steps on a target with
/// det valuation `h_tgt`.
pub fn identification_precision(field: &Field, h_tgt: usize) -> usize {
    let p = field.p() as usize;
    let h_src = (p - 1) * p;
    let s = shift_bound(p, h_src, h_tgt);
    hom_lengths(p, s, h_src).1 + 1
}

/// Basis of the morphisms X^{-s} N from `src` to `tgt`, i.e. integral N with
/// P_t phi(N) = X^{(p-1)s} N P_s and G_t gamma(N) = w^s N G_s. Each basis
/// element is returned as rows of series mod X^L.
pub fn hom_space(
    tgt: &ResiduePair,
    src: &ResiduePair,
    s: usize,
    exec: Exec,
) -> Result<Vec<Vec<Vec<ResidueSeries>>>> {
    let field = tgt.field().clone();
    let kf = field.residue_field();
    let p = field.p() as usize;
    let dt = tgt.p.dim();
    let ds = src.p.dim();
    let det_s = src.p.det();
    let h_src =
        x_val(&det_s).ok_or_else(|| Error::NotEtale("source determinant vanishes".into()))?;
    let (l, e) = hom_lengths(p, s, h_src);
    if pair_len(tgt) < e || pair_len(src) < e {
        return Err(Error::IndeterminateAtPrecision(format!(
            "hom solve needs X-precision {e}"
        )));
    }
    let cut = |x: &ResidueSeries, n: usize| x.resized(n);
    let adj_s = src.p.adj();
    // products P_t[a][c] * adj_s[b][b2], length e
    let mut pa = vec![vec![vec![vec![ResidueSeries::zero(&field, e); ds]; ds]; dt]; dt];
    for (a, row) in pa.iter_mut().enumerate() {
        for (c, blk) in row.iter_mut().enumerate() {
            for (b, r2) in blk.iter_mut().enumerate() {
                for (b2, slot) in r2.iter_mut().enumerate() {
                    *slot = cut(tgt.p.get(a, c), e).mul(&cut(adj_s.get(b, b2), e));
                }
            }
        }
    }
    let det_e = cut(&det_s, e);
    let w_s = w_series(&field, l).pow(s as u32);
    let ws_gs: Vec<Vec<ResidueSeries>> = (0..ds)
        .map(|b| {
            (0..ds)
                .map(|b2| w_s.mul(&cut(src.g.get(b, b2), l)))
                .collect()
        })
        .collect();
    let gx = ResidueSeries::gamma_x(&field, l);
    let mut gpow = vec![ResidueSeries::one(&field, l)];
    for j in 1..l {
        gpow.push(gpow[j - 1].mul(&gx));
    }
    let gt: Vec<ResidueSeries> = tgt.g.entries().iter().map(|x| cut(x, l)).collect();
    let nunk = dt * ds * l;
    let rows = dt * ds * (e + l);
    // unknown index: ((c * ds) + b) * l + j
    let columns: Vec<Vec<Fq>> = exec.map_range(nunk, |u| {
        let j = u % l;
        let b = (u / l) % ds;
        let c = u / (l * ds);
        let mut col = vec![0; rows];
        // phi part: X^{(p-1)s+j} det_s at (c, b), minus sum_a P_t[a][c] adj_s[b][b2] X^{pj} at (a, b2)
        let off = (p - 1) * s + j;
        for (t, &v) in det_e.coeffs().iter().enumerate() {
            if t + off >= e {
                break;
            }
            let idx = (c * ds + b) * e + t + off;
            col[idx] = kf.add(col[idx], v);
        }
        for (a, row) in pa.iter().enumerate() {
            for (b2, ser) in row[c][b].iter().enumerate() {
                for (t, &v) in ser.coeffs().iter().enumerate() {
                    if t + p * j >= e {
                        break;
                    }
                    let idx = (a * ds + b2) * e + t + p * j;
                    col[idx] = kf.sub(col[idx], v);
                }
            }
        }
        // gamma part: G_t[a][c] gamma(X)^j at (a, b), minus X^j w^s G_s[b][b2] at (c, b2)
        let base = dt * ds * e;
        for a in 0..dt {
            let prod = gt[a * dt + c].mul(&gpow[j]);
            for (t, &v) in prod.coeffs().iter().enumerate() {
                let idx = base + (a * ds + b) * l + t;
                col[idx] = kf.add(col[idx], v);
            }
        }
        for (b2, ser) in ws_gs[b].iter().enumerate() {
            for (t, &v) in ser.coeffs().iter().enumerate() {
                if t + j >= l {
                    break;
                }
                let idx = base + (c * ds + b2) * l + t + j;
                col[idx] = kf.sub(col[idx], v);
            }
        }
        col
    });
    let a = FqMatrix::from_columns(rows, &columns);
    let ker = kernel(kf, &a);
    Ok(ker
        .into_iter()
        .map(|v| {
            (0..dt)
                .map(|c| {
                    (0..ds)
                        .map(|b| {
                            ResidueSeries::new(
                                &field,
                                v[(c * ds + b) * l..(c * ds + b + 1) * l].to_vec(),
                            )
                        })
                        .collect()
                })
                .collect()
        })
        .collect())
}

/// Classify a rank-one structure (phi-multiplier, gamma-multiplier).
pub fn classify_rank1(phi_mult: &ResidueSeries, gamma_mult: &ResidueSeries) -> Result<Char> {
    let field = phi_mult.field().clone();
    let p = field.p() as usize;
    let h = x_val(phi_mult).ok_or_else(|| Error::NotEtale("zero phi-multiplier".into()))?;
    if h % (p - 1) != 0 {
        return Err(Error::NotEtale(format!(
            "phi-multiplier has X-valuation {h}, not a multiple of p-1"
        )));
    }
    let pair = ResiduePair {
        p: Mat::scalar1(phi_mult.clone()),
        g: Mat::scalar1(gamma_mult.clone()),
        k: 0,
        meta: Provenance::External,
    };
    let s = h / (p - 1);
    for c in characters(&field) {
        let src = character_pair(&field, c, phi_mult.len());
        if !hom_space(&pair, &src, s, Exec::Sequential)?.is_empty() {
            return Ok(c);
        }
    }
    Err(Error::NoMatch(
        "rank-one structure matches no character".into(),
    ))
}

pub fn determinant_char(pair: &ResiduePair) -> Result<Char> {
    classify_rank1(&pair.p.det(), &pair.g.det())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StableLine {
    pub sub: Char,
    pub quotient: Char,
    /// The line is spanned by X^{-shift} v.
    pub shift: usize,
    pub vector: Vec<String>,
}

/// Search for a phi- and Gamma-stable line; None if there is none.
pub fn stable_line(pair: &ResiduePair, exec: Exec) -> Result<Option<StableLine>> {
    let field = pair.field().clone();
    let p = field.p() as usize;
    let h = det_valuation(pair)?;
    let chars = characters(&field);
    let n = pair_len(pair);
    for s in 0..=shift_bound(p, 0, h) {
        let found = exec.map(&chars, |&c| {
            let src = character_pair(&field, c, n);
            hom_space(pair, &src, s, Exec::Sequential).map(|b| b.into_iter().next().map(|v| (c, v)))
        });
        for r in found {
            if let Some((c, v)) = r? {
                let d = determinant_char(pair)?;
                let k = field.residue_field();
                let pm = p as u32 - 1;
                let quotient = (k.mul(d.0, k.inv(c.0).expect("unit")), (d.1 + pm - c.1) % pm);
                let vector = v.iter().map(|row| row[0].to_text()).collect();
                return Ok(Some(StableLine {
                    sub: c,
                    quotient,
                    shift: s,
                    vector,
                }));
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Identification {
    pub label: SemisimpleLabel,
    /// "stable_line" or "catalog".
    pub method: String,
    pub shift: usize,
    /// Entries of the witness morphism, row-major.
    pub witness: Vec<String>,
    pub x_precision: usize,
}

/// Identify the semisimplification of an exactly commuting residue pair.
pub fn identify(pair: &ResiduePair, catalog: &Catalog, exec: Exec) -> Result<Identification> {
    let field = pair.field().clone();
    let p = field.p() as usize;
    let n = pair_len(pair);
    if let Some(line) = stable_line(pair, exec)? {
        return Ok(Identification {
            label: SemisimpleLabel::split(&field, line.sub, line.quotient),
            method: "stable_line".into(),
            shift: line.shift,
            witness: line.vector,
            x_precision: n,
        });
    }
    let det = determinant_char(pair)?;
    let h_t = det_valuation(pair)?;
    let cands: Vec<&CatalogEntry> = catalog
        .entries
        .iter()
        .filter(|e| matches!(e.label, SemisimpleLabel::Irreducible { .. }) && e.det == det)
        .collect();
    let results = exec.map(&cands, |entry| -> Result<Option<(usize, Vec<String>)>> {
        let h_s = det_valuation(&entry.pair)?;
        for s in 0..=shift_bound(p, h_s, h_t) {
            let b = hom_space(pair, &entry.pair, s, Exec::Sequential)?;
            if let Some(m) = b.into_iter().next() {
                let w = m
                    .iter()
                    .flat_map(|r| r.iter().map(|x| x.to_text()))
                    .collect();
                return Ok(Some((s, w)));
            }
        }
        Ok(None)
    });
    let mut hits = Vec::new();
    for (entry, r) in cands.iter().zip(results) {
        if let Some((s, w)) = r? {
            hits.push((entry.label.clone(), s, w));
        }
    }
    match hits.len() {
        0 => Err(Error::NoMatch(format!(
            "no catalog entry matches at X-precision {n}"
        ))),
        1 => {
            let (label, shift, witness) = hits.pop().unwrap();
            Ok(Identification {
                label,
                method: "catalog".into(),
                shift,
                witness,
                x_precision: n,
            })
        }
        _ => Err(Error::AmbiguousMatch(
            hits.iter()
                .map(|h| h.0.describe(&field))
                .collect::<Vec<_>>()
                .join(", "),
        )),
    }
}

/// (adj(M) P phi(M) / det M, adj(M) G gamma(M) / det M), failing when the
/// result is not integral.
pub fn conjugate_pair(pair: &ResiduePair, m: &Mat<ResidueSeries>) -> Result<ResiduePair> {
    let n = pair_len(pair).min(m.entries().iter().map(|x| x.len()).min().unwrap_or(0));
    let m = m.map(|x| x.resized(n));
    let det = m.det();
    let v = x_val(&det).ok_or_else(|| Error::Domain("singular base change".into()))?;
    let dinv = det.shift_down(v)?.unit_inverse()?;
    let adj = m.adj();
    let pp = pair.p.map(|x| x.resized(n));
    let gg = pair.g.map(|x| x.resized(n));
    let div = |x: &ResidueSeries| -> Result<ResidueSeries> {
        let y = x.shift_down(v)?;
        Ok(y.mul(&dinv.resized(y.len())))
    };
    let p2 = adj.mul(&pp).mul(&m.map(|x| x.phi())).try_map(div)?;
    let g2 = adj.mul(&gg).mul(&m.map(|x| x.gamma_act(1))).try_map(div)?;
    Ok(ResiduePair {
        p: p2,
        g: g2,
        k: pair.k,
        meta: pair.meta,
    })
}

impl fmt::Display for SemisimpleLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemisimpleLabel::Irreducible { h, twist } => {
                write!(f, "Irreducible{{h={h}, twist={twist}}}")
            }
            SemisimpleLabel::Split { factors } => {
                write!(
                    f,
                    "Split{{({},{}),({},{})}}",
                    factors[0].0, factors[0].1, factors[1].0, factors[1].1
                )
            }
        }
    }
}
