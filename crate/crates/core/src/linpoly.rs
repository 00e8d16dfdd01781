//! Reduced linearized polynomials `sum s_i X^(p^i)` over GF(p^m), and the
//! coefficient-tuple conditions used by the constructions.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gf::{FieldCtx, FieldElem};
use crate::linalg::{add_mod, FpMatrix, Subspace};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LinPoly {
    coeffs: Vec<FieldElem>,
}

impl LinPoly {
    pub fn zero(m: usize) -> Self {
        LinPoly {
            coeffs: vec![FieldElem::ZERO; m],
        }
    }

    /// `X`.
    pub fn identity(m: usize) -> Self {
        Self::monomial(m, 0, FieldElem::ONE)
    }

    /// `coeff * X^(p^i)`.
    pub fn monomial(m: usize, i: usize, coeff: FieldElem) -> Self {
        let mut f = Self::zero(m);
        f.coeffs[i % m] = coeff;
        f
    }

    /// Pads with zeros up to length `m`; longer inputs are rejected.
    pub fn new(m: usize, coeffs: &[FieldElem]) -> Result<Self> {
        if coeffs.len() > m {
            return Err(Error::InvalidParams(format!(
                "linearized polynomial has {} coefficients, field degree is {m}",
                coeffs.len()
            )));
        }
        let mut f = Self::zero(m);
        f.coeffs[..coeffs.len()].copy_from_slice(coeffs);
        Ok(f)
    }

    /// Sum of `(i, c)` terms, meaning `c X^(p^i)`; exponents are reduced mod m.
    pub fn from_terms(ctx: &FieldCtx, terms: &[(usize, FieldElem)]) -> Self {
        let mut f = Self::zero(ctx.m());
        for &(i, c) in terms {
            let i = i % ctx.m();
            f.coeffs[i] = ctx.add(f.coeffs[i], c);
        }
        f
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Largest `i` with `s_i != 0`, so the degree is `p^i`.
    pub fn degree_exp(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    #[inline]
    pub fn eval(&self, ctx: &FieldCtx, x: FieldElem) -> FieldElem {
        let mut acc = FieldElem::ZERO;
        for (i, &s) in self.coeffs.iter().enumerate() {
            if !s.is_zero() {
                acc = ctx.add(acc, ctx.mul(s, ctx.frob(x, i)));
            }
        }
        acc
    }

    pub fn add(&self, ctx: &FieldCtx, other: &LinPoly) -> LinPoly {
        LinPoly {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| ctx.add(a, b))
                .collect(),
        }
    }

    pub fn sub(&self, ctx: &FieldCtx, other: &LinPoly) -> LinPoly {
        self.add(ctx, &other.scale(ctx, ctx.scalar(ctx.p() - 1)))
    }

    pub fn scale(&self, ctx: &FieldCtx, c: FieldElem) -> LinPoly {
        LinPoly {
            coeffs: self.coeffs.iter().map(|&a| ctx.mul(a, c)).collect(),
        }
    }

    /// The polynomial of `x -> f(x)^(p^k)`.
    pub fn frob_after(&self, ctx: &FieldCtx, k: usize) -> LinPoly {
        let m = ctx.m();
        let mut out = Self::zero(m);
        for (i, &s) in self.coeffs.iter().enumerate() {
            out.coeffs[(i + k) % m] = ctx.frob(s, k);
        }
        out
    }

    /// `(1 - g)^k` applied to `f`, where `g` is `x -> x^(p^l)`.
    pub fn one_minus_g_pow(&self, ctx: &FieldCtx, l: usize, k: usize) -> LinPoly {
        (0..k).fold(self.clone(), |f, _| f.sub(ctx, &f.frob_after(ctx, l)))
    }

    /// Trace dual: `s~_i = s_{(m-i) mod m}^(p^i)`.
    pub fn trace_dual(&self, ctx: &FieldCtx) -> LinPoly {
        let m = ctx.m();
        LinPoly {
            coeffs: (0..m)
                .map(|i| ctx.frob(self.coeffs[(m - i) % m], i))
                .collect(),
        }
    }

    pub fn matrix(&self, ctx: &FieldCtx) -> FpMatrix {
        ctx.linear_matrix(|x| self.eval(ctx, x))
    }

    /// An F_p-basis of the kernel.
    pub fn kernel(&self, ctx: &FieldCtx) -> Vec<FieldElem> {
        let ker = Subspace::span(ctx.p(), ctx.m(), &self.matrix(ctx).kernel());
        ker.basis().iter().map(|v| ctx.from_vec(v)).collect()
    }

    pub fn rank(&self, ctx: &FieldCtx) -> usize {
        self.matrix(ctx).rank()
    }

    /// True when all coefficients lie in F_{p^d}.
    pub fn coeffs_in_subfield(&self, ctx: &FieldCtx, d: usize) -> bool {
        self.coeffs.iter().all(|&s| ctx.in_subfield(s, d))
    }

    /// Whether `f` vanishes on the subfield F_{p^d}.
    pub fn vanishes_on_subfield(&self, ctx: &FieldCtx, d: usize) -> Result<bool> {
        Ok(ctx
            .subfield_basis(d)?
            .into_iter()
            .all(|x| self.eval(ctx, x).is_zero()))
    }

    /// Parses sums such as `X^3 + 2*X^9 - [0,1]*X` or `0`. The variable is `X`
    /// or `z`; exponents must be powers of `p`; coefficients use the forms of
    /// [`FieldCtx::parse_elem`].
    pub fn parse(ctx: &FieldCtx, s: &str) -> Result<Self> {
        let bad = |why: &str| Error::Parse(format!("linearized polynomial {s:?}: {why}"));
        let mut f = Self::zero(ctx.m());
        let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if text == "0" {
            return Ok(f);
        }
        // split on top-level + and -, keeping the sign with each term
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = false;
        let mut depth = 0;
        for ch in text.chars() {
            match ch {
                '[' => depth += 1,
                ']' => depth -= 1,
                _ => {}
            }
            if depth == 0 && (ch == '+' || ch == '-') && !cur.is_empty() && !cur.ends_with('^') {
                terms.push((neg, std::mem::take(&mut cur)));
                neg = ch == '-';
                continue;
            }
            if depth == 0 && ch == '-' && cur.is_empty() {
                neg = !neg;
                continue;
            }
            if depth == 0 && ch == '+' && cur.is_empty() {
                continue;
            }
            cur.push(ch);
        }
        if cur.is_empty() {
            return Err(bad("dangling operator"));
        }
        terms.push((neg, cur));
        for (neg, term) in terms {
            let (coeff, mono) = match term.rfind('*') {
                Some(i) => (ctx.parse_elem(&term[..i])?, &term[i + 1..]),
                None => (FieldElem::ONE, term.as_str()),
            };
            let exp = match mono.strip_prefix(['X', 'z', 'Z']) {
                Some("") => 1u64,
                Some(e) => e
                    .strip_prefix('^')
                    .and_then(|e| e.parse::<u64>().ok())
                    .ok_or_else(|| bad("bad exponent"))?,
                None => return Err(bad("constant terms are not linearized")),
            };
            let mut i = 0;
            let mut pw = 1u64;
            while pw < exp {
                pw *= ctx.p() as u64;
                i += 1;
            }
            if pw != exp {
                return Err(bad("exponents must be powers of p"));
            }
            let c = if neg { ctx.neg(coeff) } else { coeff };
            let i = i % ctx.m();
            f.coeffs[i] = ctx.add(f.coeffs[i], c);
        }
        Ok(f)
    }

    /// Renders as `s0*X + s1*X^p + ...` with coefficient lists.
    pub fn display(&self, ctx: &FieldCtx) -> String {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, &c)| format!("{}*X^{}", ctx.fmt_elem(c), ctx.p().pow(i as u32)))
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

/// Solution set of an F_p-affine system in `k` unknowns from F_q: a particular
/// solution plus the F_p-span of a kernel basis.
#[derive(Clone, Debug)]
pub struct AffineSolutions {
    k: usize,
    m: usize,
    p: u32,
    particular: Vec<u32>,
    kernel: Subspace,
}

impl AffineSolutions {
    pub fn dim(&self) -> usize {
        self.kernel.dim()
    }

    /// Number of solutions, saturating at `u64::MAX`.
    pub fn count(&self) -> u64 {
        (self.p as u64)
            .checked_pow(self.dim() as u32)
            .unwrap_or(u64::MAX)
    }

    fn unpack(&self, ctx: &FieldCtx, v: &[u32]) -> Vec<FieldElem> {
        (0..self.k)
            .map(|j| ctx.from_vec(&v[j * self.m..(j + 1) * self.m]))
            .collect()
    }

    /// The least tuple in lexicographic key order.
    pub fn least(&self, ctx: &FieldCtx) -> Vec<FieldElem> {
        // reversing the coordinate blocks makes x_0 the most significant
        let rev = |v: &[u32]| -> Vec<u32> {
            (0..self.k)
                .rev()
                .flat_map(|j| v[j * self.m..(j + 1) * self.m].iter().copied())
                .collect()
        };
        let basis: Vec<Vec<u32>> = self.kernel.basis().iter().map(|b| rev(b)).collect();
        let w = Subspace::span(self.p, self.k * self.m, &basis);
        let red = rev(&w.reduce(&rev(&self.particular)));
        self.unpack(ctx, &red)
    }

    /// All solutions sorted lexicographically by element keys.
    pub fn all(&self, ctx: &FieldCtx, cap: usize) -> Result<Vec<Vec<FieldElem>>> {
        let n = self.count();
        if n > cap as u64 {
            return Err(Error::cap(cap, "tuple enumeration"));
        }
        let p = self.p;
        let dim = self.dim();
        let mut out = Vec::with_capacity(n as usize);
        let mut digits = vec![0u32; dim];
        for _ in 0..n {
            let offset = self.kernel.combine(&digits);
            let v: Vec<u32> = self
                .particular
                .iter()
                .zip(&offset)
                .map(|(&a, &b)| add_mod(a, b, p))
                .collect();
            out.push(self.unpack(ctx, &v));
            for d in digits.iter_mut() {
                *d += 1;
                if *d < p {
                    break;
                }
                *d = 0;
            }
        }
        out.sort();
        Ok(out)
    }
}

/// Solves `f(x_0..x_{k-1}) = 0` where `f` is F_p-affine in each coordinate.
/// Returns `None` when the system is inconsistent.
pub fn solve_affine(
    ctx: &FieldCtx,
    k: usize,
    f: impl Fn(&[FieldElem]) -> Vec<FieldElem>,
) -> Option<AffineSolutions> {
    let m = ctx.m();
    let p = ctx.p();
    let zero_in = vec![FieldElem::ZERO; k];
    let f0 = f(&zero_in);
    let flat = |vals: &[FieldElem]| -> Vec<u32> { vals.iter().flat_map(|&x| ctx.to_vec(x)).collect() };
    let f0v = flat(&f0);
    let rows = f0v.len();
    let mut cols = Vec::with_capacity(k * m);
    for j in 0..k {
        for i in 0..m {
            let mut x = zero_in.clone();
            x[j] = ctx.basis(i);
            let v = flat(&f(&x));
            cols.push(
                v.iter()
                    .zip(&f0v)
                    .map(|(&a, &b)| crate::linalg::sub_mod(a, b, p))
                    .collect::<Vec<u32>>(),
            );
        }
    }
    let mat = FpMatrix::from_columns(p, rows, &cols);
    let rhs: Vec<u32> = f0v.iter().map(|&b| crate::linalg::sub_mod(0, b, p)).collect();
    let particular = mat.solve(&rhs)?;
    let kernel = Subspace::span(p, k * m, &mat.kernel());
    Some(AffineSolutions {
        k,
        m,
        p,
        particular,
        kernel,
    })
}

/// The coefficient-tuple conditions of the constructions.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TupleKind {
    /// `mu_B s_i - s_{m-i}^(p^i) mu_B^(p^i) = 0`, `s_i` in F_{p^l}.
    S1Symmetric,
    /// `-mu_B s_i + s_{m-i}^(3^i) mu_B^(3^i) = mu_C u^(3^i) - u mu_C^(3^i)`, `s_i` in F_{3^l}.
    S4Twisted,
    /// `f_0 = 0`, `mu f_i = (mu f_{m-i})^(2^i)` and the closing sum, plus a free `s_0`.
    EvenFTuple,
}

impl TupleKind {
    pub fn tag(self) -> &'static str {
        match self {
            TupleKind::S1Symmetric => "s1-symmetric",
            TupleKind::S4Twisted => "s4-twisted",
            TupleKind::EvenFTuple => "even-f-tuple",
        }
    }
}

impl fmt::Display for TupleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for TupleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "s1-symmetric" => Ok(TupleKind::S1Symmetric),
            "s4-twisted" => Ok(TupleKind::S4Twisted),
            "even-f-tuple" => Ok(TupleKind::EvenFTuple),
            other => Err(Error::Parse(format!("unknown tuple kind {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct TupleParams {
    /// Subfield degree `l` for the odd kinds.
    pub l: usize,
    pub mu_b: FieldElem,
    pub mu_c: FieldElem,
    pub u: FieldElem,
    pub omega: FieldElem,
    pub mu: FieldElem,
}

/// One solution: the `s`-tuple, and for the even kind also the `f`-tuple.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CoeffTuple {
    pub s: Vec<FieldElem>,
    pub f: Option<Vec<FieldElem>>,
}

impl CoeffTuple {
    pub fn s1(&self, ctx: &FieldCtx) -> LinPoly {
        LinPoly::new(ctx.m(), &self.s).expect("tuple has m entries")
    }
}

/// The solution space of a tuple condition.
pub struct TupleSolver<'a> {
    ctx: &'a FieldCtx,
    kind: TupleKind,
    params: TupleParams,
    space: AffineSolutions,
}

impl<'a> TupleSolver<'a> {
    pub fn new(ctx: &'a FieldCtx, kind: TupleKind, params: TupleParams) -> Result<Self> {
        let m = ctx.m();
        let p = ctx.p();
        let l = params.l;
        let space = match kind {
            TupleKind::S1Symmetric | TupleKind::S4Twisted => {
                if l == 0 || !m.is_multiple_of(l) {
                    return Err(Error::NotADivisor { d: l, m });
                }
                if params.mu_b.is_zero() || !ctx.in_subfield(params.mu_b, l) {
                    return Err(Error::InconsistentParams(format!(
                        "mu_B must be a nonzero element of F_{}^{l}",
                        p
                    )));
                }
                let (mu_b, mu_c, u) = (params.mu_b, params.mu_c, params.u);
                let twisted = kind == TupleKind::S4Twisted;
                solve_affine(ctx, m, |s| {
                    let mut eqs = Vec::with_capacity(2 * m);
                    for &si in s {
                        eqs.push(ctx.sub(ctx.frob(si, l), si));
                    }
                    for i in 1..m {
                        let lhs = ctx.sub(
                            ctx.mul(mu_b, s[i]),
                            ctx.mul(ctx.frob(s[m - i], i), ctx.frob(mu_b, i)),
                        );
                        let eq = if twisted {
                            // -lhs - (mu_C u^(p^i) - u mu_C^(p^i))
                            let rhs = ctx.sub(
                                ctx.mul(mu_c, ctx.frob(u, i)),
                                ctx.mul(u, ctx.frob(mu_c, i)),
                            );
                            ctx.sub(ctx.neg(lhs), rhs)
                        } else {
                            lhs
                        };
                        eqs.push(eq);
                    }
                    eqs
                })
            }
            TupleKind::EvenFTuple => {
                if p != 2 || m < 2 {
                    return Err(Error::InconsistentParams(
                        "even-f-tuple needs q = 2^m with m > 1".into(),
                    ));
                }
                if params.omega.is_zero() || params.mu.is_zero() {
                    return Err(Error::InconsistentParams("omega and mu must be nonzero".into()));
                }
                let (omega, mu) = (params.omega, params.mu);
                let omega_inv = ctx.inv(omega).expect("nonzero");
                // unknowns: f_0..f_{m-1}, s_0
                solve_affine(ctx, m + 1, |x| {
                    let f = &x[..m];
                    let mut eqs = vec![f[0]];
                    for i in 1..m {
                        eqs.push(ctx.sub(
                            ctx.mul(mu, f[i]),
                            ctx.frob(ctx.mul(mu, f[m - i]), i),
                        ));
                    }
                    // sum_{j=1}^{m-1} omega^(1-2^j) f_{m-j}^(2^j)
                    let sum = ctx.sum((1..m).map(|j| {
                        let w = ctx.mul(omega, ctx.frob(omega_inv, j));
                        ctx.mul(w, ctx.frob(f[m - j], j))
                    }));
                    eqs.push(sum);
                    eqs
                })
            }
        };
        let space = space.ok_or_else(|| {
            Error::InconsistentParams(format!("the {} system has no solution", kind.tag()))
        })?;
        Ok(TupleSolver {
            ctx,
            kind,
            params,
            space,
        })
    }

    pub fn kind(&self) -> TupleKind {
        self.kind
    }

    pub fn count(&self) -> u64 {
        self.space.count()
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    fn finish(&self, raw: Vec<FieldElem>) -> CoeffTuple {
        match self.kind {
            TupleKind::EvenFTuple => {
                let m = self.ctx.m();
                let f = raw[..m].to_vec();
                let s = even_derive_s(self.ctx, self.params.omega, &f, raw[m]);
                CoeffTuple { s, f: Some(f) }
            }
            _ => CoeffTuple { s: raw, f: None },
        }
    }

    /// The least solution in key order.
    pub fn first(&self) -> CoeffTuple {
        self.finish(self.space.least(self.ctx))
    }

    /// All solutions in key order (for the even kind ordered by `(f, s_0)`).
    pub fn all(&self, cap: usize) -> Result<Vec<CoeffTuple>> {
        Ok(self
            .space
            .all(self.ctx, cap)?
            .into_iter()
            .map(|raw| self.finish(raw))
            .collect())
    }
}

/// `s_{i+1} = omega^{-1} (f_i^2 + s_i^2)` for `0 <= i < m-1`.
pub fn even_derive_s(ctx: &FieldCtx, omega: FieldElem, f: &[FieldElem], s0: FieldElem) -> Vec<FieldElem> {
    let m = ctx.m();
    let oi = ctx.inv(omega).expect("omega nonzero");
    let mut s = vec![s0];
    for i in 0..m - 1 {
        let sq = ctx.add(ctx.mul(f[i], f[i]), ctx.mul(s[i], s[i]));
        s.push(ctx.mul(oi, sq));
    }
    s
}
