//! Small square matrices over series rings.

use crate::padic::PadicElem;
use crate::resseries::ResidueSeries;
use crate::series::TruncSeries;

/// The ring operations the matrix code needs.
pub trait Algebra: Clone {
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
}

impl Algebra for TruncSeries {
    fn add(&self, o: &Self) -> Self {
        TruncSeries::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        TruncSeries::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        TruncSeries::mul(self, o)
    }
    fn neg(&self) -> Self {
        TruncSeries::neg(self)
    }
    fn zero_like(&self) -> Self {
        TruncSeries::zero(self.field(), self.precision(), self.modulus())
    }
    fn one_like(&self) -> Self {
        TruncSeries::one(self.field(), self.precision(), self.modulus())
    }
    fn is_zero(&self) -> bool {
        TruncSeries::is_zero(self)
    }
}

impl Algebra for ResidueSeries {
    fn add(&self, o: &Self) -> Self {
        ResidueSeries::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        ResidueSeries::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        ResidueSeries::mul(self, o)
    }
    fn neg(&self) -> Self {
        ResidueSeries::neg(self)
    }
    fn zero_like(&self) -> Self {
        ResidueSeries::zero(self.field(), self.len())
    }
    fn one_like(&self) -> Self {
        ResidueSeries::one(self.field(), self.len())
    }
    fn is_zero(&self) -> bool {
        ResidueSeries::is_zero(self)
    }
}

impl Algebra for PadicElem {
    fn add(&self, o: &Self) -> Self {
        PadicElem::add(self, o).expect("same field")
    }
    fn sub(&self, o: &Self) -> Self {
        PadicElem::sub(self, o).expect("same field")
    }
    fn mul(&self, o: &Self) -> Self {
        PadicElem::mul(self, o).expect("same field")
    }
    fn neg(&self) -> Self {
        PadicElem::neg(self)
    }
    fn zero_like(&self) -> Self {
        PadicElem::zero(self.field(), self.precision())
    }
    fn one_like(&self) -> Self {
        PadicElem::one(self.field(), self.precision())
    }
    fn is_zero(&self) -> bool {
        PadicElem::is_zero(self)
    }
}

/// A d x d matrix stored row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Mat<T> {
    d: usize,
    e: Vec<T>,
}

impl<T: Algebra> Mat<T> {
    pub fn from_rows(d: usize, e: Vec<T>) -> Mat<T> {
        assert_eq!(e.len(), d * d, "matrix entry count");
        Mat { d, e }
    }

    pub fn new2(a: T, b: T, c: T, d: T) -> Mat<T> {
        Mat {
            d: 2,
            e: vec![a, b, c, d],
        }
    }

    pub fn scalar1(a: T) -> Mat<T> {
        Mat { d: 1, e: vec![a] }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.e[i * self.d + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.e[i * self.d + j] = v;
    }

    pub fn entries(&self) -> &[T] {
        &self.e
    }

    pub fn map<U: Algebra>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        Mat {
            d: self.d,
            e: self.e.iter().map(f).collect(),
        }
    }

    pub fn try_map<U: Algebra, E>(&self, f: impl Fn(&T) -> Result<U, E>) -> Result<Mat<U>, E> {
        let mut e = Vec::with_capacity(self.e.len());
        for x in &self.e {
            e.push(f(x)?);
        }
        Ok(Mat { d: self.d, e })
    }

    pub fn identity_like(&self) -> Mat<T> {
        let z = self.e[0].zero_like();
        let o = self.e[0].one_like();
        let e = (0..self.d * self.d)
            .map(|i| {
                if i % (self.d + 1) == 0 {
                    o.clone()
                } else {
                    z.clone()
                }
            })
            .collect();
        Mat { d: self.d, e }
    }

    pub fn zero_like(&self) -> Mat<T> {
        self.map(|x| x.zero_like())
    }

    pub fn add(&self, o: &Mat<T>) -> Mat<T> {
        Mat {
            d: self.d,
            e: self.e.iter().zip(&o.e).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, o: &Mat<T>) -> Mat<T> {
        Mat {
            d: self.d,
            e: self.e.iter().zip(&o.e).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn neg(&self) -> Mat<T> {
        self.map(|x| x.neg())
    }

    pub fn mul(&self, o: &Mat<T>) -> Mat<T> {
        let d = self.d;
        let mut e = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let mut acc = self.get(i, 0).mul(o.get(0, j));
                for l in 1..d {
                    acc = acc.add(&self.get(i, l).mul(o.get(l, j)));
                }
                e.push(acc);
            }
        }
        Mat { d, e }
    }

    pub fn scale(&self, s: &T) -> Mat<T> {
        self.map(|x| x.mul(s))
    }

    pub fn trace(&self) -> T {
        let mut t = self.get(0, 0).clone();
        for i in 1..self.d {
            t = t.add(self.get(i, i));
        }
        t
    }

    /// Determinant; only d <= 2 is supported.
    pub fn det(&self) -> T {
        match self.d {
            1 => self.e[0].clone(),
            2 => self.e[0].mul(&self.e[3]).sub(&self.e[1].mul(&self.e[2])),
            _ => unimplemented!("determinant for d > 2"),
        }
    }

    /// Adjugate, so that A * adj(A) = det(A) Id; only d <= 2.
    pub fn adj(&self) -> Mat<T> {
        match self.d {
            1 => Mat {
                d: 1,
                e: vec![self.e[0].one_like()],
            },
            2 => Mat::new2(
                self.e[3].clone(),
                self.e[1].neg(),
                self.e[2].neg(),
                self.e[0].clone(),
            ),
            _ => unimplemented!("adjugate for d > 2"),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.e.iter().all(|x| x.is_zero())
    }
}
