//! Truncated formal power series with exact rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("divisor has zero constant term")]
    DivisionByNonUnit,
    #[error("square root needs constant term 1")]
    NonUnitConstantTerm,
    #[error("fixed-point iteration did not stabilise")]
    NonContraction,
}

/// `c_0 + c_1 x + ... + c_N x^N`, exact modulo `x^(N+1)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PowerSeries {
    c: Vec<BigRational>,
}

fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

impl PowerSeries {
    /// Builds a series of order `order` from leading coefficients (missing
    /// ones are zero, extra ones are dropped).
    pub fn new(mut coeffs: Vec<BigRational>, order: usize) -> PowerSeries {
        coeffs.resize(order + 1, BigRational::zero());
        PowerSeries { c: coeffs }
    }

    pub fn from_ints(coeffs: &[i64], order: usize) -> PowerSeries {
        PowerSeries::new(coeffs.iter().map(|&v| rat(v)).collect(), order)
    }

    pub fn zero(order: usize) -> PowerSeries {
        PowerSeries::new(vec![], order)
    }

    pub fn one(order: usize) -> PowerSeries {
        PowerSeries::from_ints(&[1], order)
    }

    pub fn constant(v: i64, order: usize) -> PowerSeries {
        PowerSeries::from_ints(&[v], order)
    }

    /// The series `x`.
    pub fn x(order: usize) -> PowerSeries {
        PowerSeries::from_ints(&[0, 1], order)
    }

    /// `x^k`.
    pub fn monomial(k: usize, order: usize) -> PowerSeries {
        let mut c = vec![BigRational::zero(); order + 1];
        if k <= order {
            c[k] = BigRational::one();
        }
        PowerSeries { c }
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &BigRational {
        &self.c[n]
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    pub fn with_order(&self, order: usize) -> PowerSeries {
        PowerSeries::new(self.c.clone(), order)
    }

    /// Coefficients as integers when every one is integral.
    pub fn integer_coeffs(&self) -> Option<Vec<BigInt>> {
        self.c
            .iter()
            .map(|q| q.is_integer().then(|| q.to_integer()))
            .collect()
    }

    /// Coefficients as `i128` when every one is a small integer.
    pub fn to_i128(&self) -> Option<Vec<i128>> {
        self.integer_coeffs()?.iter().map(|b| b.to_i128()).collect()
    }

    pub fn scale(&self, k: &BigRational) -> PowerSeries {
        PowerSeries {
            c: self.c.iter().map(|v| v * k).collect(),
        }
    }

    pub fn scale_int(&self, k: i64) -> PowerSeries {
        self.scale(&rat(k))
    }

    /// Multiplies by `x^k`, dropping terms past the order.
    pub fn shift(&self, k: usize) -> PowerSeries {
        let n = self.order();
        let mut c = vec![BigRational::zero(); n + 1];
        for i in 0..=n {
            if i + k <= n {
                c[i + k] = self.c[i].clone();
            }
        }
        PowerSeries { c }
    }

    pub fn pow(&self, k: usize) -> PowerSeries {
        let mut r = PowerSeries::one(self.order());
        for _ in 0..k {
            r = &r * self;
        }
        r
    }

    /// Multiplicative inverse; needs a nonzero constant term.
    pub fn recip(&self) -> Result<PowerSeries, SeriesError> {
        if self.c[0].is_zero() {
            return Err(SeriesError::DivisionByNonUnit);
        }
        let n = self.order();
        let inv0 = self.c[0].recip();
        let mut r: Vec<BigRational> = Vec::with_capacity(n + 1);
        r.push(inv0.clone());
        for k in 1..=n {
            let mut s = BigRational::zero();
            for j in 1..=k {
                if !self.c[j].is_zero() {
                    s += &self.c[j] * &r[k - j];
                }
            }
            r.push(-s * &inv0);
        }
        Ok(PowerSeries { c: r })
    }

    pub fn checked_div(&self, rhs: &PowerSeries) -> Result<PowerSeries, SeriesError> {
        Ok(self * &rhs.recip()?)
    }

    /// The square root with constant term 1.
    pub fn sqrt(&self) -> Result<PowerSeries, SeriesError> {
        if !self.c[0].is_one() {
            return Err(SeriesError::NonUnitConstantTerm);
        }
        // r_k = (c_k - sum_{0<j<k} r_j r_{k-j}) / 2
        let n = self.order();
        let mut r: Vec<BigRational> = vec![BigRational::one()];
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        for k in 1..=n {
            let mut s = self.c[k].clone();
            for j in 1..k {
                s -= &r[j] * &r[k - j];
            }
            r.push(s * &half);
        }
        Ok(PowerSeries { c: r })
    }

    /// The unique fixed point of a map that gains at least one correct
    /// coefficient per application, starting from zero.
    pub fn fixed_point(
        order: usize,
        update: impl Fn(&PowerSeries) -> PowerSeries,
    ) -> Result<PowerSeries, SeriesError> {
        let mut s = PowerSeries::zero(order);
        for _ in 0..order + 2 {
            let t = update(&s).with_order(order);
            if t == s {
                return Ok(s);
            }
            s = t;
        }
        Err(SeriesError::NonContraction)
    }

    /// Evaluates `(sum_i numer_i s^i) / (sum_i denom_i s^i)` where each
    /// `numer_i`, `denom_i` is a polynomial in `x` given by its coefficients.
    pub fn rational_in(
        numer: &[Vec<i64>],
        denom: &[Vec<i64>],
        s: &PowerSeries,
    ) -> Result<PowerSeries, SeriesError> {
        let n = s.order();
        let eval = |polys: &[Vec<i64>]| {
            let mut acc = PowerSeries::zero(n);
            let mut pw = PowerSeries::one(n);
            for p in polys {
                acc = &acc + &(&PowerSeries::from_ints(p, n) * &pw);
                pw = &pw * s;
            }
            acc
        };
        eval(numer).checked_div(&eval(denom))
    }

    /// `s - 1`, the series without its constant term.
    pub fn bar(&self) -> PowerSeries {
        let mut c = self.c.clone();
        c[0] = BigRational::zero();
        PowerSeries { c }
    }

    /// Coefficients as `"num/den"` strings.
    pub fn to_json_strings(&self) -> Vec<String> {
        self.c
            .iter()
            .map(|q| format!("{}/{}", q.numer(), q.denom()))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_strings()).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<PowerSeries, String> {
        let items: Vec<String> = serde_json::from_str(text).map_err(|e| e.to_string())?;
        if items.is_empty() {
            return Err("empty coefficient list".into());
        }
        let c = items
            .iter()
            .map(|t| {
                let (a, b) = t.split_once('/').unwrap_or((t.as_str(), "1"));
                let a: BigInt = a
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad coefficient {t:?}"))?;
                let b: BigInt = b
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad coefficient {t:?}"))?;
                if b.is_zero() {
                    return Err(format!("zero denominator in {t:?}"));
                }
                Ok(BigRational::new(a, b))
            })
            .collect::<Result<Vec<_>, String>>()?;
        let n = c.len() - 1;
        Ok(PowerSeries::new(c, n))
    }
}

impl fmt::Debug for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PowerSeries[{}]", self.to_json_strings().join(", "))
    }
}

impl fmt::Display for PowerSeries {
    /// Plain text such as `1 + x + 2x^2 + O(x^13)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (k, q) in self.c.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            let mag = q.abs();
            let num = if mag.is_one() && k > 0 {
                String::new()
            } else {
                mag.to_string()
            };
            let var = match k {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{k}"),
            };
            let sign = if q.is_negative() { "-" } else { "+" };
            terms.push((sign, format!("{num}{var}")));
        }
        let mut out = String::new();
        for (i, (sign, t)) in terms.iter().enumerate() {
            if i == 0 {
                if *sign == "-" {
                    out.push('-');
                }
            } else {
                out.push_str(&format!(" {sign} "));
            }
            out.push_str(t);
        }
        if out.is_empty() {
            out.push('0');
        }
        write!(f, "{out} + O(x^{})", self.order() + 1)
    }
}

impl Add for &PowerSeries {
    type Output = PowerSeries;
    fn add(self, rhs: &PowerSeries) -> PowerSeries {
        let n = self.order().min(rhs.order());
        PowerSeries {
            c: (0..=n).map(|k| &self.c[k] + &rhs.c[k]).collect(),
        }
    }
}

impl Sub for &PowerSeries {
    type Output = PowerSeries;
    fn sub(self, rhs: &PowerSeries) -> PowerSeries {
        let n = self.order().min(rhs.order());
        PowerSeries {
            c: (0..=n).map(|k| &self.c[k] - &rhs.c[k]).collect(),
        }
    }
}

impl Neg for &PowerSeries {
    type Output = PowerSeries;
    fn neg(self) -> PowerSeries {
        PowerSeries {
            c: self.c.iter().map(|v| -v).collect(),
        }
    }
}

impl Mul for &PowerSeries {
    type Output = PowerSeries;
    fn mul(self, rhs: &PowerSeries) -> PowerSeries {
        let n = self.order().min(rhs.order());
        let mut c = vec![BigRational::zero(); n + 1];
        for i in 0..=n {
            if self.c[i].is_zero() {
                continue;
            }
            for j in 0..=n - i {
                if !rhs.c[j].is_zero() {
                    c[i + j] += &self.c[i] * &rhs.c[j];
                }
            }
        }
        PowerSeries { c }
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for PowerSeries {
            type Output = PowerSeries;
            fn $m(self, rhs: PowerSeries) -> PowerSeries { (&self).$m(&rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

/// Coefficients of `G` from the cubic recurrence
/// `s_n = s_{n-1} + sum_{i+j+k=n-1, k>=1} s_i s_j s_k`, used as a cross-check
/// of the fixed-point solver.
pub fn g_by_recurrence(order: usize) -> Vec<BigInt> {
    let mut s: Vec<BigInt> = vec![BigInt::one()];
    for n in 1..=order {
        let mut v = s[n - 1].clone();
        for k in 1..n {
            for i in 0..n - k {
                let j = n - 1 - k - i;
                v += &s[i] * &s[j] * &s[k];
            }
        }
        s.push(v);
    }
    s
}

/// `C = 1 + x C^2`.
pub fn catalan(order: usize) -> PowerSeries {
    let x = PowerSeries::x(order);
    PowerSeries::fixed_point(order, |c| &PowerSeries::one(order) + &(&x * &(c * c)))
        .expect("contraction")
}

/// `G = 1 + x G / (1 - x G^2)`.
pub fn g_series(order: usize) -> PowerSeries {
    let x = PowerSeries::x(order);
    let one = PowerSeries::one(order);
    PowerSeries::fixed_point(order, |g| {
        let den = &one - &(&x * &(g * g));
        &one + &(&(&x * g) * &den.recip().expect("unit"))
    })
    .expect("contraction")
}

/// `F = 1 + x F + x^2 F`.
pub fn fibonacci(order: usize) -> PowerSeries {
    let x = PowerSeries::x(order);
    let x2 = PowerSeries::monomial(2, order);
    PowerSeries::fixed_point(order, |f| {
        &(&PowerSeries::one(order) + &(&x * f)) + &(&x2 * f)
    })
    .expect("contraction")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(s: &PowerSeries) -> Vec<i128> {
        s.to_i128().unwrap()
    }

    #[test]
    fn division_examples() {
        let n = 6;
        let one = PowerSeries::one(n);
        assert_eq!(
            ints(
                &one.checked_div(&PowerSeries::from_ints(&[1, -1], n))
                    .unwrap()
            ),
            vec![1; 7]
        );
        let f = one
            .checked_div(&PowerSeries::from_ints(&[1, -1, -1], n))
            .unwrap();
        assert_eq!(ints(&f), vec![1, 1, 2, 3, 5, 8, 13]);
        let g = PowerSeries::from_ints(&[0, 1, 1], 4)
            .checked_div(&PowerSeries::from_ints(&[1, -1, -2], 4))
            .unwrap();
        assert_eq!(ints(&g), vec![0, 1, 2, 4, 8]);
        assert_eq!(
            one.checked_div(&PowerSeries::x(n)),
            Err(SeriesError::DivisionByNonUnit)
        );
    }

    #[test]
    fn square_roots() {
        let n = 8;
        assert_eq!(PowerSeries::one(n).sqrt().unwrap(), PowerSeries::one(n));
        let s = PowerSeries::from_ints(&[1, -4], n).sqrt().unwrap();
        assert_eq!(ints(&s)[..5], [1, -2, -2, -4, -10]);
        assert_eq!(&s * &s, PowerSeries::from_ints(&[1, -4], n));
        // sqrt(1-4x) = 1 - 2x C(x)
        let c = catalan(n);
        assert_eq!(
            s,
            &PowerSeries::one(n) - &(&PowerSeries::from_ints(&[0, 2], n) * &c)
        );
        assert_eq!(
            PowerSeries::x(n).sqrt(),
            Err(SeriesError::NonUnitConstantTerm)
        );
    }

    #[test]
    fn fixed_points() {
        assert_eq!(ints(&catalan(5)), vec![1, 1, 2, 5, 14, 42]);
        assert_eq!(ints(&g_series(4)), vec![1, 1, 2, 6, 21]);
        let f = fibonacci(10);
        assert_eq!(
            f,
            PowerSeries::one(10)
                .checked_div(&PowerSeries::from_ints(&[1, -1, -1], 10))
                .unwrap()
        );
        let bad = PowerSeries::fixed_point(4, |s| &PowerSeries::one(4) + s);
        assert_eq!(bad, Err(SeriesError::NonContraction));
    }

    #[test]
    fn recurrence_matches_fixed_point() {
        let g = g_series(12);
        let r = g_by_recurrence(12);
        assert_eq!(g.integer_coeffs().unwrap(), r);
    }

    #[test]
    fn rational_in_examples() {
        let x = PowerSeries::x(6);
        assert_eq!(
            PowerSeries::rational_in(&[vec![0], vec![1]], &[vec![1]], &x).unwrap(),
            x
        );
        let s = PowerSeries::rational_in(
            &[vec![0, 0, 0, 0, 2]],
            &[vec![1, -2, -3]],
            &PowerSeries::zero(8),
        )
        .unwrap();
        assert_eq!(ints(&s)[4..], [2, 4, 14, 40, 122]);
    }

    #[test]
    fn json_roundtrip() {
        let s = PowerSeries::new(
            vec![rat(1), BigRational::new(BigInt::from(-1), BigInt::from(2))],
            2,
        );
        assert_eq!(s.to_json(), r#"["1/1","-1/2","0/1"]"#);
        assert_eq!(PowerSeries::from_json(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn display() {
        assert_eq!(
            PowerSeries::from_ints(&[1, -1, 2], 2).to_string(),
            "1 - x + 2x^2 + O(x^3)"
        );
    }
}
