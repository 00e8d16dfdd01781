//! Exact arithmetic in GF(p^m) for p^m <= 2^15.
//!
//! An element is stored as its index `sum c_i p^i`, where `c_0 + c_1 x + ...`
//! is the reduced representative modulo the field's irreducible polynomial.
//! The prime field is therefore the set of indices `0..p`, and equality and
//! hashing are plain integer comparisons.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{FpMatrix, Subspace};

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 15;

/// Fields up to this order get dense addition and multiplication tables.
const DENSE_TABLE_LIMIT: u32 = 1024;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct FieldElem(pub u16);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// The Frobenius power `x -> x^(p^i)`, with `i` reduced modulo `m`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Frob(pub u8);

impl Frob {
    pub const ID: Frob = Frob(0);

    pub fn new(i: i64, m: usize) -> Frob {
        Frob(i.rem_euclid(m as i64) as u8)
    }

    #[inline]
    pub fn exp(self) -> usize {
        self.0 as usize
    }

    pub fn compose(self, other: Frob, m: usize) -> Frob {
        Frob(((self.0 as usize + other.0 as usize) % m) as u8)
    }

    pub fn inverse(self, m: usize) -> Frob {
        Frob(((m - self.0 as usize) % m) as u8)
    }

    pub fn order(self, m: usize) -> usize {
        m / gcd(m, self.0 as usize)
    }
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Polynomials over F_p as coefficient vectors, constant term first.
/// Only used while setting up a field; everything afterwards is table driven.
mod poly {
    use crate::linalg::{inv_mod, mul_mod, sub_mod};

    pub fn trim(mut a: Vec<u32>) -> Vec<u32> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn rem(a: &[u32], f: &[u32], p: u32) -> Vec<u32> {
        let f = trim(f.to_vec());
        let df = f.len() - 1;
        let lead_inv = inv_mod(f[df], p);
        let mut r = trim(a.to_vec());
        while r.len() > df {
            let k = r.len() - 1 - df;
            let c = mul_mod(*r.last().unwrap(), lead_inv, p);
            for (i, &fi) in f.iter().enumerate() {
                r[k + i] = sub_mod(r[k + i], mul_mod(c, fi, p), p);
            }
            r = trim(r);
        }
        r
    }

    pub fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
            }
        }
        trim(out.into_iter().map(|v| v as u32).collect())
    }

    pub fn mulmod(a: &[u32], b: &[u32], f: &[u32], p: u32) -> Vec<u32> {
        rem(&mul(a, b, p), f, p)
    }

    pub fn powmod(a: &[u32], mut e: u64, f: &[u32], p: u32) -> Vec<u32> {
        let mut base = rem(a, f, p);
        let mut acc = rem(&[1], f, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(&acc, &base, f, p);
            }
            base = mulmod(&base, &base, f, p);
            e >>= 1;
        }
        acc
    }

    pub fn sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let n = a.len().max(b.len());
        let get = |v: &[u32], i: usize| v.get(i).copied().unwrap_or(0);
        trim((0..n).map(|i| sub_mod(get(a, i), get(b, i), p)).collect())
    }

    pub fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut a = trim(a.to_vec());
        let mut b = trim(b.to_vec());
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    /// Rabin's test for a monic `f` of degree `m`.
    pub fn is_irreducible(f: &[u32], p: u32, prime_divisors_of_m: &[u64]) -> bool {
        let m = f.len() - 1;
        if m == 1 {
            return true;
        }
        let x = vec![0, 1];
        // x^(p^k) mod f by k successive p-th powers
        let frob_x = |k: usize| {
            let mut h = rem(&x, f, p);
            for _ in 0..k {
                h = powmod(&h, p as u64, f, p);
            }
            h
        };
        if sub(&frob_x(m), &x, p) != rem(&[], f, p) {
            return false;
        }
        for &r in prime_divisors_of_m {
            let h = sub(&frob_x(m / r as usize), &x, p);
            if gcd(f, &h, p).len() != 1 {
                return false;
            }
        }
        true
    }
}

/// An immutable GF(p^m) context with precomputed tables.
pub struct FieldCtx {
    p: u32,
    m: usize,
    q: u32,
    modulus: Vec<u32>,
    pow_p: Vec<u32>,
    primitive: FieldElem,
    exp: Vec<u16>,
    log: Vec<u32>,
    neg: Vec<u16>,
    frob: Vec<u16>,
    add_table: Option<Vec<u16>>,
    mul_table: Option<Vec<u16>>,
    zech: Vec<u32>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldCtx({})", self.spec_string())
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m && self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

const NO_LOG: u32 = u32::MAX;

impl FieldCtx {
    /// Builds GF(p^m). `modulus` is `c_0..c_m` (constant term first); when it
    /// is omitted the least monic irreducible is used, ordering candidates by
    /// the integer `sum c_i p^i` of their lower coefficients.
    pub fn new(p: u64, m: usize, modulus: Option<&[u32]>) -> Result<FieldCtx> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if m == 0 {
            return Err(Error::DegreeMismatch {
                expected: 1,
                found: 0,
            });
        }
        let q = p.checked_pow(m as u32).unwrap_or(u64::MAX);
        if q > MAX_ORDER {
            return Err(Error::FieldTooLarge(q));
        }
        let p32 = p as u32;
        let m_divs = prime_factors(m as u64);
        let modulus = match modulus {
            Some(f) => {
                let f = poly::trim(f.iter().map(|&c| c % p32).collect());
                if f.len() != m + 1 || f[m] != 1 {
                    return Err(Error::DegreeMismatch {
                        expected: m,
                        found: f.len().saturating_sub(1),
                    });
                }
                if !poly::is_irreducible(&f, p32, &m_divs) {
                    return Err(Error::ReducibleModulus { p: p32 });
                }
                f
            }
            None => (0..q)
                .map(|n| {
                    let mut f = digits(n as u32, p32, m);
                    f.push(1);
                    f
                })
                .find(|f| poly::is_irreducible(f, p32, &m_divs))
                .expect("an irreducible polynomial of every degree exists"),
        };
        Ok(FieldCtx::from_modulus(p32, m, q as u32, modulus))
    }

    fn from_modulus(p: u32, m: usize, q: u32, modulus: Vec<u32>) -> FieldCtx {
        let pow_p: Vec<u32> = (0..m).map(|i| p.pow(i as u32)).collect();
        let n = q - 1;
        let n_divs = prime_factors(n as u64);
        let to_poly = |x: u32| poly::trim(digits(x, p, m));
        let from_poly = |v: &[u32]| v.iter().zip(&pow_p).map(|(&c, &w)| c * w).sum::<u32>();

        // least index of multiplicative order q-1
        let primitive = (1..q)
            .find(|&g| {
                let gp = to_poly(g);
                let one = poly::rem(&[1], &modulus, p);
                n_divs
                    .iter()
                    .all(|&r| poly::powmod(&gp, n as u64 / r, &modulus, p) != one)
            })
            .expect("the multiplicative group is cyclic");

        let mut exp = vec![0u16; 2 * n as usize];
        let mut log = vec![NO_LOG; q as usize];
        let gp = to_poly(primitive);
        let mut cur = vec![1u32];
        for k in 0..n as usize {
            let idx = from_poly(&cur);
            exp[k] = idx as u16;
            log[idx as usize] = k as u32;
            cur = poly::mulmod(&cur, &gp, &modulus, p);
        }
        for k in 0..n as usize {
            exp[n as usize + k] = exp[k];
        }

        let digit_add = |a: u32, b: u32| -> u32 {
            let mut out = 0;
            for &w in &pow_p {
                let s = ((a / w) % p + (b / w) % p) % p;
                out += s * w;
            }
            out
        };
        let neg: Vec<u16> = (0..q)
            .map(|a| {
                let mut out = 0;
                for &w in &pow_p {
                    out += ((p - (a / w) % p) % p) * w;
                }
                out as u16
            })
            .collect();

        let mut frob = vec![0u16; m * q as usize];
        for i in 0..m {
            let e = pow_p[i] as u64;
            for x in 1..q {
                let l = log[x as usize] as u64;
                frob[i * q as usize + x as usize] = exp[((l * e) % n as u64) as usize];
            }
        }

        // zech[d] = log(1 + g^d)
        let zech: Vec<u32> = (0..n)
            .map(|d| log[digit_add(1, exp[d as usize] as u32) as usize])
            .collect();

        let (add_table, mul_table) = if q <= DENSE_TABLE_LIMIT {
            let qs = q as usize;
            let mut add = vec![0u16; qs * qs];
            let mut mul = vec![0u16; qs * qs];
            for a in 0..q {
                for b in 0..q {
                    let i = a as usize * qs + b as usize;
                    add[i] = digit_add(a, b) as u16;
                    if a != 0 && b != 0 {
                        mul[i] = exp[(log[a as usize] + log[b as usize]) as usize];
                    }
                }
            }
            (Some(add), Some(mul))
        } else {
            (None, None)
        };

        FieldCtx {
            p,
            m,
            q,
            modulus,
            pow_p,
            primitive: FieldElem(primitive as u16),
            exp,
            log,
            neg,
            frob,
            add_table,
            mul_table,
            zech,
        }
    }

    /// Parses "p^m" or "p^m/c0,c1,...,cm"; a bare "p" means m = 1.
    pub fn parse(spec: &str) -> Result<FieldCtx> {
        let bad = || Error::Parse(format!("field spec {spec:?}, expected p^m or p^m/c0,..,cm"));
        let (order, modulus) = match spec.split_once('/') {
            Some((o, m)) => (o, Some(m)),
            None => (spec, None),
        };
        let (p, m) = match order.trim().split_once('^') {
            Some((p, m)) => (
                p.trim().parse::<u64>().map_err(|_| bad())?,
                m.trim().parse::<usize>().map_err(|_| bad())?,
            ),
            None => (order.trim().parse::<u64>().map_err(|_| bad())?, 1),
        };
        let coeffs = match modulus {
            Some(s) => Some(
                s.split(',')
                    .map(|c| c.trim().parse::<u32>().map_err(|_| bad()))
                    .collect::<Result<Vec<u32>>>()?,
            ),
            None => None,
        };
        FieldCtx::new(p, m, coeffs.as_deref())
    }

    /// Canonical "p^m/c0,..,cm" form.
    pub fn spec_string(&self) -> String {
        let coeffs: Vec<String> = self.modulus.iter().map(|c| c.to_string()).collect();
        format!("{}^{}/{}", self.p, self.m, coeffs.join(","))
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn primitive(&self) -> FieldElem {
        self.primitive
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + Clone {
        (0..self.q).map(|i| FieldElem(i as u16))
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElem {
        FieldElem(rng.gen_range(0..self.q) as u16)
    }

    /// Embeds an F_p scalar.
    #[inline]
    pub fn scalar(&self, c: u32) -> FieldElem {
        FieldElem((c % self.p) as u16)
    }

    /// `x` as a coefficient vector `c_0..c_{m-1}`.
    pub fn to_vec(&self, x: FieldElem) -> Vec<u32> {
        digits(x.0 as u32, self.p, self.m)
    }

    pub fn from_vec(&self, v: &[u32]) -> FieldElem {
        let idx: u32 = v
            .iter()
            .zip(&self.pow_p)
            .map(|(&c, &w)| (c % self.p) * w)
            .sum();
        FieldElem(idx as u16)
    }

    /// The basis element `x^i`.
    pub fn basis(&self, i: usize) -> FieldElem {
        FieldElem(self.pow_p[i] as u16)
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if let Some(t) = &self.add_table {
            return FieldElem(t[a.index() * self.q as usize + b.index()]);
        }
        if self.p == 2 {
            return FieldElem(a.0 ^ b.0);
        }
        if a.0 == 0 {
            return b;
        }
        if b.0 == 0 {
            return a;
        }
        let n = self.q - 1;
        let la = self.log[a.index()];
        let lb = self.log[b.index()];
        let d = if lb >= la { lb - la } else { lb + n - la };
        let z = self.zech[d as usize];
        if z == NO_LOG {
            FieldElem::ZERO
        } else {
            let s = la + z;
            FieldElem(self.exp[if s >= n { s - n } else { s } as usize])
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        FieldElem(self.neg[a.index()])
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if let Some(t) = &self.mul_table {
            return FieldElem(t[a.index() * self.q as usize + b.index()]);
        }
        if a.0 == 0 || b.0 == 0 {
            return FieldElem::ZERO;
        }
        FieldElem(self.exp[(self.log[a.index()] + self.log[b.index()]) as usize])
    }

    /// Multiplies by an F_p scalar.
    pub fn scale(&self, c: u32, a: FieldElem) -> FieldElem {
        self.mul(self.scalar(c), a)
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: FieldElem) -> Option<FieldElem> {
        if a.is_zero() {
            return None;
        }
        let n = self.q - 1;
        Some(FieldElem(self.exp[((n - self.log[a.index()]) % n) as usize]))
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Option<FieldElem> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    pub fn pow(&self, a: FieldElem, e: u64) -> FieldElem {
        if e == 0 {
            return FieldElem::ONE;
        }
        if a.is_zero() {
            return FieldElem::ZERO;
        }
        let n = (self.q - 1) as u64;
        FieldElem(self.exp[((self.log[a.index()] as u64 * (e % n)) % n) as usize])
    }

    /// Discrete log to the base `primitive()`; `None` for zero.
    pub fn log(&self, a: FieldElem) -> Option<u32> {
        match self.log[a.index()] {
            NO_LOG => None,
            l => Some(l),
        }
    }

    /// `x^(p^i)`.
    #[inline]
    pub fn frob(&self, x: FieldElem, i: usize) -> FieldElem {
        FieldElem(self.frob[(i % self.m) * self.q as usize + x.index()])
    }

    #[inline]
    pub fn frob_apply(&self, f: Frob, x: FieldElem) -> FieldElem {
        self.frob(x, f.exp())
    }

    pub fn frob_new(&self, i: i64) -> Frob {
        Frob::new(i, self.m)
    }

    pub fn sum<I: IntoIterator<Item = FieldElem>>(&self, it: I) -> FieldElem {
        it.into_iter().fold(FieldElem::ZERO, |acc, x| self.add(acc, x))
    }

    fn check_divisor(&self, d: usize) -> Result<()> {
        if d == 0 || !self.m.is_multiple_of(d) {
            return Err(Error::NotADivisor { d, m: self.m });
        }
        Ok(())
    }

    /// `tr_{F_q/F_{p^d}}(x) = sum_j x^(p^(jd))`.
    pub fn trace_rel(&self, x: FieldElem, d: usize) -> Result<FieldElem> {
        self.check_divisor(d)?;
        Ok(self.trace_rel_unchecked(x, d))
    }

    pub(crate) fn trace_rel_unchecked(&self, x: FieldElem, d: usize) -> FieldElem {
        self.sum((0..self.m / d).map(|j| self.frob(x, j * d)))
    }

    /// Absolute trace as an F_p scalar.
    #[inline]
    pub fn trace(&self, x: FieldElem) -> u32 {
        self.trace_rel_unchecked(x, 1).0 as u32
    }

    /// Norm to the subfield F_{p^d}.
    pub fn norm_rel(&self, x: FieldElem, d: usize) -> Result<FieldElem> {
        self.check_divisor(d)?;
        Ok((0..self.m / d).fold(FieldElem::ONE, |acc, j| self.mul(acc, self.frob(x, j * d))))
    }

    pub fn in_subfield(&self, x: FieldElem, d: usize) -> bool {
        self.frob(x, d) == x
    }

    /// The F_p-matrix of an F_p-linear map in the basis `1, x, .., x^{m-1}`.
    pub fn linear_matrix(&self, f: impl Fn(FieldElem) -> FieldElem) -> FpMatrix {
        let cols: Vec<Vec<u32>> = (0..self.m).map(|i| self.to_vec(f(self.basis(i)))).collect();
        FpMatrix::from_columns(self.p, self.m, &cols)
    }

    /// F_p-basis of the subfield F_{p^d}.
    pub fn subfield_basis(&self, d: usize) -> Result<Vec<FieldElem>> {
        self.check_divisor(d)?;
        let mat = self.linear_matrix(|x| self.sub(self.frob(x, d), x));
        let ker = Subspace::span(self.p, self.m, &mat.kernel());
        Ok(ker.basis().iter().map(|v| self.from_vec(v)).collect())
    }

    /// All elements of F_{p^d} in increasing key order.
    pub fn subfield_elements(&self, d: usize) -> Result<Vec<FieldElem>> {
        self.check_divisor(d)?;
        Ok(self.elements().filter(|&x| self.in_subfield(x, d)).collect())
    }

    /// Solves `beta^(p^d) - beta = alpha`, returning the least-key solution.
    pub fn artin_schreier_solve(&self, alpha: FieldElem, d: usize) -> Result<FieldElem> {
        self.check_divisor(d)?;
        let tr = self.trace_rel_unchecked(alpha, d);
        if !tr.is_zero() {
            return Err(Error::NoSolution { trace: tr.0 as u32 });
        }
        let mat = self.linear_matrix(|x| self.sub(self.frob(x, d), x));
        let particular = mat
            .solve(&self.to_vec(alpha))
            .expect("trace zero implies solvable");
        let ker = Subspace::span(self.p, self.m, &mat.kernel());
        Ok(self.from_vec(&ker.reduce(&particular)))
    }

    /// Coefficient list "[c0,c1,..]".
    pub fn fmt_elem(&self, x: FieldElem) -> String {
        let v: Vec<String> = self.to_vec(x).iter().map(|c| c.to_string()).collect();
        format!("[{}]", v.join(","))
    }

    /// Accepts "[c0,c1,..]", a bare F_p scalar "2", or a power "x^k" of the
    /// class of `x` modulo the modulus.
    pub fn parse_elem(&self, s: &str) -> Result<FieldElem> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix('x') {
            let k = match rest.trim().strip_prefix('^') {
                None if rest.trim().is_empty() => 1,
                Some(e) => e
                    .trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Parse(format!("field element {s:?}")))?,
                None => return Err(Error::Parse(format!("field element {s:?}"))),
            };
            return Ok(self.pow(self.from_vec(&[0, 1]), k));
        }
        let inner = s.trim_start_matches('[').trim_end_matches(']');
        if inner.trim().is_empty() {
            return Ok(FieldElem::ZERO);
        }
        let v = inner
            .split(',')
            .map(|c| {
                c.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("field element {s:?}")))
            })
            .collect::<Result<Vec<u32>>>()?;
        if v.len() > self.m || v.iter().any(|&c| c >= self.p) {
            return Err(Error::Parse(format!(
                "field element {s:?} is not a vector over F_{} of length <= {}",
                self.p, self.m
            )));
        }
        Ok(self.from_vec(&v))
    }
}

fn digits(mut n: u32, p: u32, m: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(m);
    for _ in 0..m {
        out.push(n % p);
        n /= p;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // brute force: no monic factor of degree 1..=m/2
    fn irreducible_by_trial(f: &[u32], p: u32) -> bool {
        let m = f.len() - 1;
        for d in 1..=m / 2 {
            for n in 0..p.pow(d as u32) {
                let mut g = digits(n, p, d);
                g.push(1);
                if poly::rem(f, &g, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    fn slow_pow(ctx: &FieldCtx, x: FieldElem, e: u64) -> FieldElem {
        (0..e).fold(FieldElem::ONE, |acc, _| ctx.mul(acc, x))
    }

    #[test]
    fn rabin_matches_trial_division() {
        for (p, m) in [(2u32, 2usize), (2, 3), (2, 4), (2, 6), (3, 2), (3, 3), (3, 4), (5, 2), (5, 3)] {
            let divs = prime_factors(m as u64);
            for n in 0..p.pow(m as u32) {
                let mut f = digits(n, p, m);
                f.push(1);
                assert_eq!(
                    poly::is_irreducible(&f, p, &divs),
                    irreducible_by_trial(&f, p),
                    "p={p} f={f:?}"
                );
            }
        }
    }

    #[test]
    fn default_moduli() {
        assert_eq!(FieldCtx::new(3, 1, None).unwrap().modulus(), &[0, 1]);
        assert_eq!(FieldCtx::new(3, 2, None).unwrap().modulus(), &[1, 0, 1]);
        assert_eq!(FieldCtx::new(3, 3, None).unwrap().modulus(), &[1, 2, 0, 1]);
        assert_eq!(FieldCtx::new(4, 2, None).unwrap_err(), Error::NotPrime(4));
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            FieldCtx::new(3, 2, Some(&[2, 0, 1])).unwrap_err(),
            Error::ReducibleModulus { p: 3 }
        );
        assert!(matches!(
            FieldCtx::new(3, 2, Some(&[1, 1])),
            Err(Error::DegreeMismatch { .. })
        ));
        assert_eq!(FieldCtx::new(2, 16, None).unwrap_err(), Error::FieldTooLarge(65536));
        assert!(FieldCtx::new(2, 15, None).is_ok());
    }

    #[test]
    fn parse_round_trip() {
        let ctx = FieldCtx::parse("3^3").unwrap();
        let again = FieldCtx::parse(&ctx.spec_string()).unwrap();
        assert_eq!(ctx, again);
        assert_eq!(FieldCtx::parse("5").unwrap().q(), 5);
        assert!(FieldCtx::parse("3^x").is_err());
        let x = ctx.from_vec(&[2, 0, 1]);
        assert_eq!(ctx.parse_elem(&ctx.fmt_elem(x)).unwrap(), x);
    }

    #[test]
    fn gf9_frobenius_and_trace() {
        let ctx = FieldCtx::new(3, 2, None).unwrap();
        let u = ctx.basis(1);
        assert_eq!(ctx.frob(u, 1), ctx.neg(u));
        assert_eq!(ctx.frob(u, 1), slow_pow(&ctx, u, 3));
        assert_eq!(ctx.trace_rel(FieldElem::ONE, 1).unwrap(), ctx.scalar(2));
        assert_eq!(ctx.trace_rel(u, 1).unwrap(), FieldElem::ZERO);
        assert_eq!(
            ctx.trace_rel(u, 3).unwrap_err(),
            Error::NotADivisor { d: 3, m: 2 }
        );
    }

    #[test]
    fn gf9_artin_schreier() {
        let ctx = FieldCtx::new(3, 2, None).unwrap();
        let u = ctx.basis(1);
        assert_eq!(ctx.artin_schreier_solve(FieldElem::ZERO, 1).unwrap(), FieldElem::ZERO);
        assert_eq!(
            ctx.artin_schreier_solve(FieldElem::ONE, 1).unwrap_err(),
            Error::NoSolution { trace: 2 }
        );
        let beta = ctx.artin_schreier_solve(u, 1).unwrap();
        let least = ctx
            .elements()
            .find(|&b| ctx.sub(ctx.frob(b, 1), b) == u)
            .unwrap();
        assert_eq!(beta, least);
        assert_eq!(ctx.sub(ctx.frob(u, 1), u), u);
    }

    #[test]
    fn arithmetic_matches_slow_polynomials() {
        for spec in ["2^4", "3^3", "5^2", "3^7", "2^11"] {
            let ctx = FieldCtx::parse(spec).unwrap();
            let mut rng = rand::thread_rng();
            for _ in 0..300 {
                let a = ctx.random(&mut rng);
                let b = ctx.random(&mut rng);
                let (va, vb) = (ctx.to_vec(a), ctx.to_vec(b));
                let prod = poly::mulmod(&poly::trim(va.clone()), &poly::trim(vb.clone()), ctx.modulus(), ctx.p());
                let mut pv = prod.clone();
                pv.resize(ctx.m(), 0);
                assert_eq!(ctx.mul(a, b), ctx.from_vec(&pv), "{spec}");
                let sum: Vec<u32> = va.iter().zip(&vb).map(|(x, y)| (x + y) % ctx.p()).collect();
                assert_eq!(ctx.add(a, b), ctx.from_vec(&sum), "{spec}");
                assert_eq!(ctx.add(a, ctx.neg(a)), FieldElem::ZERO);
            }
        }
    }

    #[test]
    fn trace_image_and_solvability_exhaustive() {
        for spec in ["3^4", "2^6", "3^2", "5^2"] {
            let ctx = FieldCtx::parse(spec).unwrap();
            for d in (1..=ctx.m()).filter(|d| ctx.m().is_multiple_of(*d)) {
                let sub = ctx.subfield_elements(d).unwrap();
                let mut image: Vec<FieldElem> =
                    ctx.elements().map(|x| ctx.trace_rel(x, d).unwrap()).collect();
                image.sort();
                image.dedup();
                assert_eq!(image, sub, "{spec} d={d}");
                let solvable: std::collections::HashSet<FieldElem> =
                    ctx.elements().map(|b| ctx.sub(ctx.frob(b, d), b)).collect();
                for a in ctx.elements() {
                    let res = ctx.artin_schreier_solve(a, d);
                    assert_eq!(res.is_ok(), solvable.contains(&a));
                    if let Ok(b) = res {
                        assert_eq!(ctx.sub(ctx.frob(b, d), b), a);
                    }
                }
                assert_eq!(ctx.subfield_basis(d).unwrap().len(), d);
            }
        }
    }

    #[test]
    fn frob_compose_and_order() {
        let m = 6;
        let f = Frob::new(4, m);
        assert_eq!(f.compose(Frob(3), m), Frob(1));
        assert_eq!(f.inverse(m), Frob(2));
        assert_eq!(f.order(m), 3);
        assert_eq!(Frob::new(-1, m), Frob(5));
    }

    proptest! {
        #[test]
        fn frobenius_is_a_field_automorphism(a in 0u16..729, b in 0u16..729, i in 0usize..6) {
            let ctx = gf729();
            let (a, b) = (FieldElem(a), FieldElem(b));
            prop_assert_eq!(ctx.frob(ctx.mul(a, b), i), ctx.mul(ctx.frob(a, i), ctx.frob(b, i)));
            prop_assert_eq!(ctx.frob(ctx.add(a, b), i), ctx.add(ctx.frob(a, i), ctx.frob(b, i)));
            prop_assert_eq!(ctx.frob(a, 6), a);
        }

        #[test]
        fn trace_transfer(x in 0u16..729, y in 0u16..729, i in 0usize..3) {
            // tr(x^(p^(id)) y) = tr(x y^(p^(m-id))) for d = 2
            let ctx = gf729();
            let (x, y) = (FieldElem(x), FieldElem(y));
            let d = 2;
            let lhs = ctx.trace_rel(ctx.mul(ctx.frob(x, i * d), y), d).unwrap();
            let rhs = ctx.trace_rel(ctx.mul(x, ctx.frob(y, 6 - i * d)), d).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn multiplicative_group_order(x in 1u16..19683) {
            let ctx = gf3_9();
            let x = FieldElem(x);
            prop_assert_eq!(ctx.pow(x, 19682), FieldElem::ONE);
            prop_assert_eq!(ctx.mul(x, ctx.inv(x).unwrap()), FieldElem::ONE);
        }
    }

    fn gf729() -> &'static FieldCtx {
        static CTX: std::sync::OnceLock<FieldCtx> = std::sync::OnceLock::new();
        CTX.get_or_init(|| FieldCtx::new(3, 6, None).unwrap())
    }

    fn gf3_9() -> &'static FieldCtx {
        static CTX: std::sync::OnceLock<FieldCtx> = std::sync::OnceLock::new();
        CTX.get_or_init(|| FieldCtx::new(3, 9, None).unwrap())
    }
}
