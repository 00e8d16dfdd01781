//! Parameter records, validation and [`GroupSpec`] builders for the
//! constructions, plus conjugation by elements `(E(0,0,0,u), phi)`.
//!
//! Variants:
//!
//! | tag      | field          | theta                                   | T                    |
//! |----------|----------------|-----------------------------------------|----------------------|
//! | `C1`     | any `q`        | `1`                                     | `S_1(c)`             |
//! | `C2even` | `q = 2^m`      | `1`                                     | quadratic in `c`     |
//! | `S2`     | `q = p^{pl}`   | `g^{tr(mu_C c)}`                        | `S_1(c)`             |
//! | `S3`     | `q = p^{pl}`   | `g^{Q(c)/2 + tr(mu_B b)}`               | `S_1(c)`             |
//! | `S4`     | `q = 3^{9l}`   | cosets of `G_K` under `g_{0,0,t_C}`     | `S_1(c)`             |
//! | `PreS2`  | `q = p^{pl}`   | cosets of `G_K`                         | `S_1(c)` on `K`      |
//! | `PreS3`  | `q = p^{pl}`   | `g^{Q(c)/2 + tr(alpha c + mu_B b)}`     | `S_2(c) + N_B(theta)`|
//! | `PreS4`  | `q = 3^{9l}`   | cosets of `G_K`                         | as `PreS3` on `K`    |

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::gf::{FieldCtx, FieldElem, Frob};
use crate::group::{act, check_theorem_main, g_inv, g_mul, g_pow, CheckMode, ElementMap, GroupElem, GroupSpec};
use crate::linpoly::{LinPoly, TupleKind, TupleParams, TupleSolver};

/// Pairs sampled by the self-check every builder runs.
pub const SELF_CHECK_PAIRS: u64 = 2048;
const SELF_CHECK_SEED: u64 = 0x5eed;
const TUPLE_CAP: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    C1,
    #[serde(rename = "C2even")]
    C2Even,
    S2,
    S3,
    S4,
    PreS2,
    PreS3,
    PreS4,
}

impl Variant {
    pub const ALL: [Variant; 8] = [
        Variant::C1,
        Variant::C2Even,
        Variant::S2,
        Variant::S3,
        Variant::S4,
        Variant::PreS2,
        Variant::PreS3,
        Variant::PreS4,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Variant::C1 => "C1",
            Variant::C2Even => "C2even",
            Variant::S2 => "S2",
            Variant::S3 => "S3",
            Variant::S4 => "S4",
            Variant::PreS2 => "PreS2",
            Variant::PreS3 => "PreS3",
            Variant::PreS4 => "PreS4",
        }
    }

    /// Whether the group is assembled from `G_K` and one coset generator.
    pub fn uses_cosets(self) -> bool {
        matches!(self, Variant::S4 | Variant::PreS2 | Variant::PreS4)
    }

    /// The normal form a pre-variant is conjugate to.
    pub fn normal_form(self) -> Option<Variant> {
        match self {
            Variant::PreS2 => Some(Variant::S2),
            Variant::PreS3 => Some(Variant::S3),
            Variant::PreS4 => Some(Variant::S4),
            _ => None,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.tag().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown variant {s:?}")))
    }
}

/// A field element in a config file: an F_p scalar, a coefficient list, or
/// text accepted by [`FieldCtx::parse_elem`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElemSpec {
    Scalar(u32),
    Coeffs(Vec<u32>),
    Text(String),
}

impl ElemSpec {
    pub fn resolve(&self, ctx: &FieldCtx) -> Result<FieldElem> {
        match self {
            ElemSpec::Scalar(n) if *n < ctx.p() => Ok(ctx.scalar(*n)),
            ElemSpec::Scalar(n) => Err(Error::Parse(format!("scalar {n} is not in F_{}", ctx.p()))),
            ElemSpec::Coeffs(v) => {
                if v.len() > ctx.m() || v.iter().any(|&c| c >= ctx.p()) {
                    return Err(Error::Parse(format!(
                        "{v:?} is not a coefficient vector over F_{} of length <= {}",
                        ctx.p(),
                        ctx.m()
                    )));
                }
                Ok(ctx.from_vec(v))
            }
            ElemSpec::Text(s) => ctx.parse_elem(s),
        }
    }

    pub fn of(ctx: &FieldCtx, x: FieldElem) -> ElemSpec {
        ElemSpec::Coeffs(ctx.to_vec(x))
    }
}

/// `S_1` in a config: dense coefficients `s_0, s_1, ..` or a text sum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolySpec {
    Dense(Vec<ElemSpec>),
    Text(String),
}

impl PolySpec {
    pub fn resolve(&self, ctx: &FieldCtx) -> Result<LinPoly> {
        match self {
            PolySpec::Dense(v) => {
                let coeffs = v.iter().map(|e| e.resolve(ctx)).collect::<Result<Vec<_>>>()?;
                LinPoly::new(ctx.m(), &coeffs)
            }
            PolySpec::Text(s) => LinPoly::parse(ctx, s),
        }
    }

    pub fn of(ctx: &FieldCtx, f: &LinPoly) -> PolySpec {
        PolySpec::Dense(f.coeffs().iter().map(|&c| ElemSpec::of(ctx, c)).collect())
    }
}

/// The JSON construction config, e.g.
/// `{"variant": "S3", "field": "3^3", "S1": "X^3 + X^9", "muB": 1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructionConfig {
    pub variant: Variant,
    pub field: String,
    #[serde(default, rename = "S1", skip_serializing_if = "Option::is_none")]
    pub s1: Option<PolySpec>,
    #[serde(default, rename = "muB", skip_serializing_if = "Option::is_none")]
    pub mu_b: Option<ElemSpec>,
    #[serde(default, rename = "muC", skip_serializing_if = "Option::is_none")]
    pub mu_c: Option<ElemSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<ElemSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<ElemSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<ElemSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<ElemSpec>,
    #[serde(default, rename = "tC", skip_serializing_if = "Option::is_none")]
    pub t_c: Option<ElemSpec>,
    #[serde(default, rename = "nuC", skip_serializing_if = "Option::is_none")]
    pub nu_c: Option<ElemSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<Vec<ElemSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s0: Option<ElemSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tuple_index: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// `false` skips the coefficient conditions and the self-check, for
    /// building deliberately broken specs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validate: Option<bool>,
}

impl ConstructionConfig {
    pub fn new(variant: Variant, field: impl Into<String>) -> Self {
        ConstructionConfig {
            variant,
            field: field.into(),
            s1: None,
            mu_b: None,
            mu_c: None,
            omega: None,
            mu: None,
            alpha: None,
            u: None,
            t_c: None,
            nu_c: None,
            lambda: None,
            f: None,
            s0: None,
            tuple_index: None,
            label: None,
            validate: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("construction config: {e}")))
    }

    pub fn field_ctx(&self) -> Result<Arc<FieldCtx>> {
        Ok(Arc::new(FieldCtx::parse(&self.field)?))
    }

    /// Typed parameters over `ctx` (which must match `field`).
    pub fn params(&self, ctx: &FieldCtx) -> Result<ConstructionParams> {
        let el = |e: &Option<ElemSpec>| e.as_ref().map(|e| e.resolve(ctx)).transpose();
        Ok(ConstructionParams {
            variant: self.variant,
            s1: self.s1.as_ref().map(|s| s.resolve(ctx)).transpose()?,
            mu_b: el(&self.mu_b)?,
            mu_c: el(&self.mu_c)?,
            omega: el(&self.omega)?,
            mu: el(&self.mu)?,
            alpha: el(&self.alpha)?,
            u: el(&self.u)?,
            t_c: el(&self.t_c)?,
            nu_c: el(&self.nu_c)?,
            lambda: self.lambda,
            f: self
                .f
                .as_ref()
                .map(|v| v.iter().map(|e| e.resolve(ctx)).collect::<Result<Vec<_>>>())
                .transpose()?,
            s0: el(&self.s0)?,
            tuple_index: self.tuple_index,
            label: self.label.clone(),
            validate: self.validate.unwrap_or(true),
        })
    }

    pub fn build(&self) -> Result<Construction> {
        let ctx = self.field_ctx()?;
        let params = self.params(&ctx)?;
        Construction::build(ctx, params)
    }
}

/// Typed construction parameters. Unset optional values are defaulted or
/// derived by the builder; the built [`Construction`] holds the completed record.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstructionParams {
    pub variant: Variant,
    /// `S_1` (named `S_2` in the pre-forms of S3 and S4).
    pub s1: Option<LinPoly>,
    pub mu_b: Option<FieldElem>,
    pub mu_c: Option<FieldElem>,
    pub omega: Option<FieldElem>,
    pub mu: Option<FieldElem>,
    pub alpha: Option<FieldElem>,
    pub u: Option<FieldElem>,
    pub t_c: Option<FieldElem>,
    pub nu_c: Option<FieldElem>,
    pub lambda: Option<u32>,
    pub f: Option<Vec<FieldElem>>,
    pub s0: Option<FieldElem>,
    /// Which solution of the tuple condition to use when `S1`/`f` are unset.
    pub tuple_index: Option<u64>,
    pub label: Option<String>,
    /// Check the coefficient conditions and run the self-check.
    pub validate: bool,
}

macro_rules! setter {
    ($name:ident, $field:ident, $ty:ty) => {
        pub fn $name(mut self, v: $ty) -> Self {
            self.$field = Some(v);
            self
        }
    };
}

impl ConstructionParams {
    pub fn new(variant: Variant) -> Self {
        ConstructionParams {
            variant,
            s1: None,
            mu_b: None,
            mu_c: None,
            omega: None,
            mu: None,
            alpha: None,
            u: None,
            t_c: None,
            nu_c: None,
            lambda: None,
            f: None,
            s0: None,
            tuple_index: None,
            label: None,
            validate: true,
        }
    }

    /// Skips the coefficient conditions and the self-check.
    pub fn unvalidated(mut self) -> Self {
        self.validate = false;
        self
    }

    setter!(with_s1, s1, LinPoly);
    setter!(with_mu_b, mu_b, FieldElem);
    setter!(with_mu_c, mu_c, FieldElem);
    setter!(with_omega, omega, FieldElem);
    setter!(with_mu, mu, FieldElem);
    setter!(with_alpha, alpha, FieldElem);
    setter!(with_u, u, FieldElem);
    setter!(with_t_c, t_c, FieldElem);
    setter!(with_nu_c, nu_c, FieldElem);
    setter!(with_lambda, lambda, u32);
    setter!(with_f, f, Vec<FieldElem>);
    setter!(with_s0, s0, FieldElem);
    setter!(with_tuple_index, tuple_index, u64);
    setter!(with_label, label, String);

    /// The config that reproduces these parameters over `ctx`.
    pub fn to_config(&self, ctx: &FieldCtx) -> ConstructionConfig {
        let el = |x: &Option<FieldElem>| x.map(|x| ElemSpec::of(ctx, x));
        ConstructionConfig {
            variant: self.variant,
            field: ctx.spec_string(),
            s1: self.s1.as_ref().map(|f| PolySpec::of(ctx, f)),
            mu_b: el(&self.mu_b),
            mu_c: el(&self.mu_c),
            omega: el(&self.omega),
            mu: el(&self.mu),
            alpha: el(&self.alpha),
            u: el(&self.u),
            t_c: el(&self.t_c),
            nu_c: el(&self.nu_c),
            lambda: self.lambda,
            f: self.f.as_ref().map(|v| v.iter().map(|&x| ElemSpec::of(ctx, x)).collect()),
            s0: el(&self.s0),
            tuple_index: self.tuple_index,
            label: self.label.clone(),
            validate: (!self.validate).then_some(false),
        }
    }
}

/// `G_K` together with the coset generator `h = g_{0,0,t_C}`.
#[derive(Clone, Debug)]
pub struct CosetInfo {
    /// The `G_K` formulas; meaningful only for `c` in `K`.
    pub kernel: GroupSpec,
    pub h: GroupElem,
    pub mu_c: FieldElem,
    pub lambda_c: u32,
}

impl CosetInfo {
    /// `c` lies in `K = ker tr(mu_C .)`.
    pub fn in_k(&self, ctx: &FieldCtx, c: FieldElem) -> bool {
        ctx.trace(ctx.mul(self.mu_c, c)) == 0
    }

    pub fn in_kernel_group(&self, g: &GroupElem) -> bool {
        self.in_k(self.kernel.ctx(), g.c) && self.kernel.contains(g)
    }
}

/// A validated construction: the completed parameters and the group.
#[derive(Clone, Debug)]
pub struct Construction {
    pub params: ConstructionParams,
    /// Subfield degree `l` (`0` for `C1`, `C2even`).
    pub l: usize,
    /// `tr(mu_C t_C)` where a coset generator is used.
    pub lambda_c: Option<u32>,
    /// `nu_B` of the pre-forms of S3 and S4.
    pub nu_b: Option<FieldElem>,
    pub spec: GroupSpec,
    pub coset: Option<CosetInfo>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParams(msg.into())
}

fn half(p: u32) -> u32 {
    p.div_ceil(2)
}

/// `l` with `m = p l` (`S2`, `S3` and their pre-forms) or `m = 9 l` over F_3.
pub fn subfield_degree(ctx: &FieldCtx, variant: Variant) -> Result<usize> {
    let (p, m) = (ctx.p() as usize, ctx.m());
    match variant {
        Variant::C1 | Variant::C2Even => Ok(0),
        Variant::S2 | Variant::S3 | Variant::PreS2 | Variant::PreS3 => {
            if p == 2 || m % p != 0 {
                return Err(invalid(format!(
                    "{variant} needs q = p^(pl) with p odd, got {}",
                    ctx.spec_string()
                )));
            }
            Ok(m / p)
        }
        Variant::S4 | Variant::PreS4 => {
            if p != 3 || m % 9 != 0 {
                return Err(invalid(format!("{variant} needs q = 3^(9l), got {}", ctx.spec_string())));
            }
            Ok(m / 9)
        }
    }
}

fn require_subfield_unit(ctx: &FieldCtx, x: FieldElem, l: usize, what: &str) -> Result<()> {
    if x.is_zero() || !ctx.in_subfield(x, l) {
        return Err(invalid(format!("{what} must be a nonzero element of F_{}^{l}", ctx.p())));
    }
    Ok(())
}

fn symmetric_tuple_ok(ctx: &FieldCtx, s: &LinPoly, mu_b: FieldElem) -> bool {
    let m = ctx.m();
    let c = s.coeffs();
    (1..m).all(|i| ctx.mul(mu_b, c[i]) == ctx.mul(ctx.frob(c[m - i], i), ctx.frob(mu_b, i)))
}

fn twisted_tuple_ok(ctx: &FieldCtx, s: &LinPoly, mu_b: FieldElem, mu_c: FieldElem, u: FieldElem) -> bool {
    let m = ctx.m();
    let c = s.coeffs();
    (1..m).all(|i| {
        let lhs = ctx.sub(ctx.mul(ctx.frob(c[m - i], i), ctx.frob(mu_b, i)), ctx.mul(mu_b, c[i]));
        let rhs = ctx.sub(ctx.mul(mu_c, ctx.frob(u, i)), ctx.mul(u, ctx.frob(mu_c, i)));
        lhs == rhs
    })
}

/// `f_0 = 0`, `mu f_i = (mu f_{m-i})^(2^i)` and
/// `sum_{j=1}^{m-1} omega^(1-2^j) f_{m-j}^(2^j) = 0`.
pub fn even_tuple_ok(ctx: &FieldCtx, omega: FieldElem, mu: FieldElem, f: &[FieldElem]) -> bool {
    let m = ctx.m();
    if f.len() != m || !f[0].is_zero() {
        return false;
    }
    let sym = (1..m).all(|i| ctx.mul(mu, f[i]) == ctx.frob(ctx.mul(mu, f[m - i]), i));
    let oi = match ctx.inv(omega) {
        Some(x) => x,
        None => return false,
    };
    let sum = ctx.sum((1..m).map(|j| ctx.mul(ctx.mul(omega, ctx.frob(oi, j)), ctx.frob(f[m - j], j))));
    sym && sum.is_zero()
}

fn pick_tuple(solver: &TupleSolver<'_>, index: u64) -> Result<crate::linpoly::CoeffTuple> {
    if index == 0 {
        return Ok(solver.first());
    }
    if index >= solver.count() {
        return Err(invalid(format!(
            "tuple_index {index} out of range: the {} condition has {} solutions",
            solver.kind(),
            solver.count()
        )));
    }
    Ok(solver.all(TUPLE_CAP)?.swap_remove(index as usize))
}

fn nonzero_trace_elem(ctx: &FieldCtx, mu_c: FieldElem) -> Option<FieldElem> {
    (0..ctx.m())
        .map(|i| ctx.basis(i))
        .find(|&x| ctx.trace(ctx.mul(mu_c, x)) != 0)
}

// ---------------------------------------------------------------------------
// element maps

struct C1Map {
    s1: LinPoly,
}

impl ElementMap for C1Map {
    fn resolve(&self, ctx: &FieldCtx, _a: FieldElem, _b: FieldElem, c: FieldElem) -> (FieldElem, Frob) {
        (self.s1.eval(ctx, c), Frob::ID)
    }
}

struct C2EvenMap {
    omega: FieldElem,
    mu2omega: FieldElem,
    mu: FieldElem,
    s1: LinPoly,
    /// `(i, j, mu^(2^i) f_{j-i}^(2^i))` for `i < j`.
    quad: Vec<(usize, usize, FieldElem)>,
}

impl ElementMap for C2EvenMap {
    fn resolve(&self, ctx: &FieldCtx, a: FieldElem, b: FieldElem, c: FieldElem) -> (FieldElem, Frob) {
        let lin = ctx.add(ctx.mul(self.mu2omega, ctx.add(a, ctx.mul(b, c))), ctx.mul(self.mu, b));
        let mut t = if ctx.trace(lin) == 1 { self.omega } else { FieldElem::ZERO };
        t = ctx.add(t, self.s1.eval(ctx, c));
        let mut h = FieldElem::ZERO;
        for &(i, j, k) in &self.quad {
            h = ctx.add(h, ctx.mul(k, ctx.mul(ctx.frob(c, i), ctx.frob(c, j))));
        }
        (ctx.add(t, ctx.mul(self.omega, h)), Frob::ID)
    }
}

struct S2Map {
    s1: LinPoly,
    mu_c: FieldElem,
    l: usize,
}

impl ElementMap for S2Map {
    fn resolve(&self, ctx: &FieldCtx, _a: FieldElem, _b: FieldElem, c: FieldElem) -> (FieldElem, Frob) {
        let e = ctx.trace(ctx.mul(self.mu_c, c)) as usize;
        (self.s1.eval(ctx, c), Frob::new((self.l * e) as i64, ctx.m()))
    }
}

/// `theta = g_1^{Q(c)/2 + tr(alpha c + mu_B b)}`, `T = S(c) + N_B(theta)`.
struct QuadMap {
    s: LinPoly,
    mu_b: FieldElem,
    alpha: FieldElem,
    /// Frobenius exponent of `g_1`.
    g1: usize,
    /// `N_B(g_1^i)` for `0 <= i < p`.
    nb: Vec<FieldElem>,
}

impl QuadMap {
    fn new(ctx: &FieldCtx, s: LinPoly, mu_b: FieldElem, alpha: FieldElem, g1: usize, nu_b: FieldElem) -> Self {
        let p = ctx.p() as usize;
        let mut nb = vec![FieldElem::ZERO];
        for i in 1..p {
            let prev = nb[i - 1];
            nb.push(ctx.add(prev, ctx.frob(nu_b, g1 * (i - 1))));
        }
        QuadMap { s, mu_b, alpha, g1, nb }
    }
}

impl ElementMap for QuadMap {
    fn resolve(&self, ctx: &FieldCtx, _a: FieldElem, b: FieldElem, c: FieldElem) -> (FieldElem, Frob) {
        let p = ctx.p();
        let sc = self.s.eval(ctx, c);
        let q = (p - ctx.trace(ctx.mul(self.mu_b, ctx.mul(c, sc)))) % p;
        let lin = ctx.trace(ctx.add(ctx.mul(self.alpha, c), ctx.mul(self.mu_b, b)));
        let e = ((half(p) * q + lin) % p) as usize;
        (ctx.add(sc, self.nb[e]), Frob::new((self.g1 * e) as i64, ctx.m()))
    }
}

/// `g_{a,b,c} = g_K(P') o h^i` with `i = tr(mu_C c)/lambda_C` and
/// `P' = (a,b,c)^{h^{-i}}`.
struct CosetMap {
    kernel: Arc<dyn ElementMap>,
    mu_c: FieldElem,
    lambda_inv: u32,
    pows: Vec<GroupElem>,
    inv_pows: Vec<GroupElem>,
}

impl ElementMap for CosetMap {
    fn resolve(&self, ctx: &FieldCtx, a: FieldElem, b: FieldElem, c: FieldElem) -> (FieldElem, Frob) {
        let i = (ctx.trace(ctx.mul(self.mu_c, c)) * self.lambda_inv % ctx.p()) as usize;
        if i == 0 {
            return self.kernel.resolve(ctx, a, b, c);
        }
        let [x, y, z] = act(ctx, &self.inv_pows[i], [a, b, c]);
        let (t, f) = self.kernel.resolve(ctx, x, y, z);
        let g = g_mul(ctx, &GroupElem { a: x, b: y, c: z, t, f }, &self.pows[i]);
        (g.t, g.f)
    }
}

struct ConjugateMap {
    inner: GroupSpec,
    h: GroupElem,
    h_inv: GroupElem,
}

impl ElementMap for ConjugateMap {
    fn resolve(&self, ctx: &FieldCtx, a: FieldElem, b: FieldElem, c: FieldElem) -> (FieldElem, Frob) {
        let pt = act(ctx, &self.h_inv, [a, b, c]);
        let g = self.inner.elem_at_point(pt);
        let r = g_mul(ctx, &g_mul(ctx, &self.h_inv, &g), &self.h);
        (r.t, r.f)
    }
}

// ---------------------------------------------------------------------------
// builders

impl Construction {
    /// Validates, completes and builds, then runs a sampled closure check.
    pub fn build(ctx: Arc<FieldCtx>, params: ConstructionParams) -> Result<Construction> {
        let validate = params.validate;
        let c = Self::build_unchecked(ctx, params)?;
        if !validate {
            return Ok(c);
        }
        let report = check_theorem_main(
            &c.spec,
            CheckMode::Sample {
                n: SELF_CHECK_PAIRS,
                seed: SELF_CHECK_SEED,
            },
            u64::MAX,
        )?;
        if let Some(w) = report.witness {
            return Err(Error::SelfCheckFailed(format!(
                "{} fails {} for {} and {}",
                c.spec.label(),
                w.condition,
                w.first,
                w.second
            )));
        }
        Ok(c)
    }

    /// Like [`Construction::build`] without the closure check.
    pub fn build_unchecked(ctx: Arc<FieldCtx>, mut params: ConstructionParams) -> Result<Construction> {
        let variant = params.variant;
        let l = subfield_degree(&ctx, variant)?;
        let m = ctx.m();
        let label = params
            .label
            .clone()
            .unwrap_or_else(|| match &params.s1 {
                Some(s1) => format!("{variant}({}, S1={})", ctx.spec_string(), s1.display(&ctx)),
                None => format!("{variant}({})", ctx.spec_string()),
            });
        let mut lambda_c = None;
        let mut nu_b = None;
        let mut coset = None;
        let map: Arc<dyn ElementMap> = match variant {
            Variant::C1 => {
                let s1 = params.s1.get_or_insert_with(|| LinPoly::zero(m)).clone();
                Arc::new(C1Map { s1 })
            }
            Variant::C2Even => Arc::new(build_c2even(&ctx, &mut params)?),
            Variant::S2 => {
                let mu_c = *params.mu_c.get_or_insert(FieldElem::ONE);
                require_subfield_unit(&ctx, mu_c, l, "mu_C")?;
                let s1 = params.s1.get_or_insert_with(|| LinPoly::zero(m)).clone();
                if params.validate && !s1.coeffs_in_subfield(&ctx, l) {
                    return Err(invalid(format!("S_1 must have coefficients in F_{}^{l}", ctx.p())));
                }
                Arc::new(S2Map { s1, mu_c, l })
            }
            Variant::S3 | Variant::PreS3 => {
                let mu_b = *params.mu_b.get_or_insert(FieldElem::ONE);
                require_subfield_unit(&ctx, mu_b, l, "mu_B")?;
                let s = symmetric_s1(&ctx, &mut params, l, mu_b)?;
                let alpha = if variant == Variant::S3 {
                    if params.alpha.is_some_and(|a| !a.is_zero()) {
                        return Err(invalid("S3 has no alpha; use PreS3"));
                    }
                    FieldElem::ZERO
                } else {
                    *params.alpha.get_or_insert(FieldElem::ZERO)
                };
                // nu_B = mu_B^{-1} (g_1(alpha) - alpha)
                let nb = ctx.mul(
                    ctx.inv(mu_b).expect("nonzero"),
                    ctx.sub(ctx.frob(alpha, l), alpha),
                );
                if variant == Variant::PreS3 {
                    nu_b = Some(nb);
                }
                Arc::new(QuadMap::new(&ctx, s, mu_b, alpha, l, nb))
            }
            Variant::PreS2 => {
                let mu_c = *params.mu_c.get_or_insert(FieldElem::ONE);
                require_subfield_unit(&ctx, mu_c, l, "mu_C")?;
                let s1 = params.s1.get_or_insert_with(|| LinPoly::zero(m)).clone();
                if params.validate && !s1.coeffs_in_subfield(&ctx, l) {
                    return Err(invalid(format!("S_1 must have coefficients in F_{}^{l}", ctx.p())));
                }
                let t_c = match params.t_c {
                    Some(t) => t,
                    None => nonzero_trace_elem(&ctx, mu_c).expect("trace form is nonzero"),
                };
                params.t_c = Some(t_c);
                let lc = ctx.trace(ctx.mul(mu_c, t_c));
                if lc == 0 {
                    return Err(invalid("t_C must lie outside K = ker tr(mu_C .)"));
                }
                let nu_c = *params.nu_c.get_or_insert_with(|| s1.eval(&ctx, t_c));
                if !ctx.trace_rel(ctx.sub(nu_c, s1.eval(&ctx, t_c)), l)?.is_zero() {
                    return Err(invalid("nu_C needs tr_{F_q/F_{p^l}}(nu_C - S_1(t_C)) = 0"));
                }
                lambda_c = Some(lc);
                let kernel: Arc<dyn ElementMap> = Arc::new(C1Map { s1 });
                let h = GroupElem::new([FieldElem::ZERO, FieldElem::ZERO, t_c, nu_c], Frob::new(l as i64, m));
                let (map, info) = coset_map(&ctx, kernel, mu_c, lc, h, &label);
                coset = Some(info);
                map
            }
            Variant::S4 | Variant::PreS4 => {
                complete_s4(&ctx, &mut params, l, variant)?;
                let mu_c = params.mu_c.expect("completed");
                let mu_b = params.mu_b.expect("completed");
                let u = params.u.expect("completed");
                let t_c = params.t_c.expect("completed");
                let alpha = params.alpha.expect("completed");
                let lambda = params.lambda.expect("completed");
                let s = params.s1.clone().expect("completed");
                let lc = ctx.trace(ctx.mul(mu_c, t_c));
                lambda_c = Some(lc);
                let g1 = 3 * l;
                let (kernel, h): (Arc<dyn ElementMap>, GroupElem) = if variant == Variant::S4 {
                    let h = GroupElem::new(
                        [FieldElem::ZERO, FieldElem::ZERO, t_c, s.eval(&ctx, t_c)],
                        Frob::new(l as i64, m),
                    );
                    (Arc::new(QuadMap::new(&ctx, s, mu_b, alpha, g1, FieldElem::ZERO)), h)
                } else {
                    // nu_C = S_2(t_C) + mu_B^{-1}(alpha^g - alpha - lambda_C u - lambda mu_C)
                    let inner = ctx.sub(
                        ctx.sub(ctx.frob(alpha, l), alpha),
                        ctx.add(ctx.mul(ctx.scalar(lc), u), ctx.mul(ctx.scalar(lambda), mu_c)),
                    );
                    let nu = ctx.mul(ctx.inv(mu_b).expect("nonzero"), inner);
                    let nu_c = ctx.add(s.eval(&ctx, t_c), nu);
                    if params.nu_c.is_some_and(|x| x != nu_c) {
                        return Err(invalid("condition (v): nu_C is determined by alpha and lambda"));
                    }
                    params.nu_c = Some(nu_c);
                    let nb = ctx.sum((0..3).map(|i| ctx.frob(nu, l * i)));
                    nu_b = Some(nb);
                    let h = GroupElem::new([FieldElem::ZERO, FieldElem::ZERO, t_c, nu_c], Frob::new(l as i64, m));
                    (Arc::new(QuadMap::new(&ctx, s, mu_b, alpha, g1, nb)), h)
                };
                let (map, info) = coset_map(&ctx, kernel, mu_c, lc, h, &label);
                coset = Some(info);
                map
            }
        };
        let mut construction = Construction {
            params,
            l,
            lambda_c,
            nu_b,
            spec: GroupSpec::new(ctx.clone(), label.clone(), Value::Null, map),
            coset,
        };
        let json = construction.params_json();
        construction.spec = GroupSpec::new(ctx, label, json, construction.spec_map());
        Ok(construction)
    }

    fn spec_map(&self) -> Arc<dyn ElementMap> {
        struct Same(GroupSpec);
        impl ElementMap for Same {
            fn resolve(&self, _ctx: &FieldCtx, a: FieldElem, b: FieldElem, c: FieldElem) -> (FieldElem, Frob) {
                let g = self.0.elem_at(a, b, c);
                (g.t, g.f)
            }
        }
        Arc::new(Same(self.spec.clone()))
    }

    pub fn ctx(&self) -> &FieldCtx {
        self.spec.ctx()
    }

    /// `{"config": .., "derived": ..}` as embedded in reports.
    pub fn params_json(&self) -> Value {
        let ctx = self.ctx();
        let el = |x: FieldElem| json!(ctx.to_vec(x));
        let mut derived = serde_json::Map::new();
        derived.insert("modulus".into(), json!(ctx.modulus()));
        derived.insert("l".into(), json!(self.l));
        if let Some(lc) = self.lambda_c {
            derived.insert("lambdaC".into(), json!(lc));
        }
        if let Some(nb) = self.nu_b {
            derived.insert("nuB".into(), el(nb));
        }
        if let Some(s) = &self.params.s1 {
            derived.insert("S1_text".into(), json!(s.display(ctx)));
        }
        if let Some(info) = &self.coset {
            derived.insert("h".into(), json!(info.h.display(ctx)));
        }
        json!({
            "config": self.params.to_config(ctx),
            "derived": Value::Object(derived),
        })
    }
}

fn coset_map(
    ctx: &Arc<FieldCtx>,
    kernel: Arc<dyn ElementMap>,
    mu_c: FieldElem,
    lambda_c: u32,
    h: GroupElem,
    label: &str,
) -> (Arc<dyn ElementMap>, CosetInfo) {
    let p = ctx.p();
    let pows: Vec<GroupElem> = (0..p).map(|i| g_pow(ctx, &h, i as i64)).collect();
    let inv_pows: Vec<GroupElem> = pows.iter().map(|g| g_inv(ctx, g)).collect();
    let lambda_inv = crate::linalg::inv_mod(lambda_c, p);
    let info = CosetInfo {
        kernel: GroupSpec::new(ctx.clone(), format!("{label}/G_K"), Value::Null, kernel.clone()),
        h,
        mu_c,
        lambda_c,
    };
    let map = Arc::new(CosetMap {
        kernel,
        mu_c,
        lambda_inv,
        pows,
        inv_pows,
    });
    (map, info)
}

fn symmetric_s1(ctx: &FieldCtx, params: &mut ConstructionParams, l: usize, mu_b: FieldElem) -> Result<LinPoly> {
    let s = match &params.s1 {
        Some(s) => {
            if params.validate && !s.coeffs_in_subfield(ctx, l) {
                return Err(invalid(format!(
                    "condition (ii): the s_i must lie in F_{}^{l}",
                    ctx.p()
                )));
            }
            if params.validate && !symmetric_tuple_ok(ctx, s, mu_b) {
                return Err(invalid(
                    "condition (ii): mu_B s_i - s_{pl-i}^(p^i) mu_B^(p^i) = 0 fails",
                ));
            }
            s.clone()
        }
        None => {
            let solver = TupleSolver::new(
                ctx,
                TupleKind::S1Symmetric,
                TupleParams {
                    l,
                    mu_b,
                    ..Default::default()
                },
            )?;
            pick_tuple(&solver, params.tuple_index.unwrap_or(0))?.s1(ctx)
        }
    };
    params.s1 = Some(s.clone());
    Ok(s)
}

fn build_c2even(ctx: &FieldCtx, params: &mut ConstructionParams) -> Result<C2EvenMap> {
    let m = ctx.m();
    if ctx.p() != 2 || m < 2 {
        return Err(invalid("C2even needs q = 2^m with m > 1"));
    }
    let omega = *params.omega.get_or_insert(FieldElem::ONE);
    let mu = *params.mu.get_or_insert(FieldElem::ONE);
    if omega.is_zero() || mu.is_zero() {
        return Err(invalid("omega and mu must be nonzero"));
    }
    let (f, s0) = match (&params.f, params.s0) {
        (Some(f), s0) => {
            let f = LinPoly::new(m, f)?.coeffs().to_vec();
            if params.validate && !even_tuple_ok(ctx, omega, mu, &f) {
                return Err(invalid(
                    "f must satisfy f_0 = 0, mu f_i = (mu f_{m-i})^(2^i) and the closing sum condition",
                ));
            }
            (f, s0.unwrap_or(FieldElem::ZERO))
        }
        (None, Some(_)) => return Err(invalid("s0 given without the f tuple")),
        (None, None) => {
            let solver = TupleSolver::new(
                ctx,
                TupleKind::EvenFTuple,
                TupleParams {
                    omega,
                    mu,
                    ..Default::default()
                },
            )?;
            let t = pick_tuple(&solver, params.tuple_index.unwrap_or(0))?;
            (t.f.expect("even tuple"), t.s[0])
        }
    };
    let s = crate::linpoly::even_derive_s(ctx, omega, &f, s0);
    let s1 = LinPoly::new(m, &s)?;
    if params.s1.as_ref().is_some_and(|given| *given != s1) {
        return Err(invalid("S1 of C2even is derived from (f, s0) and must not be given"));
    }
    let mut quad = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            let k = ctx.frob(ctx.mul(mu, f[j - i]), i);
            if !k.is_zero() {
                quad.push((i, j, k));
            }
        }
    }
    params.f = Some(f);
    params.s0 = Some(s0);
    params.s1 = None;
    Ok(C2EvenMap {
        omega,
        mu2omega: ctx.mul(ctx.mul(mu, mu), omega),
        mu,
        s1,
        quad,
    })
}

/// Fills and validates conditions (i)-(v) of S4 / PreS4.
fn complete_s4(ctx: &FieldCtx, params: &mut ConstructionParams, l: usize, variant: Variant) -> Result<()> {
    let s4 = variant == Variant::S4;
    // (i)
    let u = match params.u {
        Some(u) => u,
        None => {
            let target = params.mu_c.unwrap_or(FieldElem::ONE);
            require_subfield_unit(ctx, target, l, "condition (i): mu_C")?;
            ctx.artin_schreier_solve(ctx.neg(target), l)
                .map_err(|_| Error::NotFound("no u with u - u^g = mu_C".into()))?
        }
    };
    let mu_c = ctx.sub(u, ctx.frob(u, l));
    if s4 && !ctx.in_subfield(u, 3 * l) {
        return Err(invalid("condition (i): u must lie in F_{3^(3l)}"));
    }
    if mu_c.is_zero() || !ctx.in_subfield(mu_c, l) {
        return Err(invalid("condition (i): mu_C = u - u^g must lie in F_{3^l}^*"));
    }
    if params.mu_c.is_some_and(|x| x != mu_c) {
        return Err(invalid("condition (i): given mu_C differs from u - u^g"));
    }
    params.u = Some(u);
    params.mu_c = Some(mu_c);
    // (ii)
    let t_c = match params.t_c {
        Some(t) => t,
        None => nonzero_trace_elem(ctx, mu_c).expect("trace form is nonzero"),
    };
    let lc = ctx.trace(ctx.mul(mu_c, t_c));
    if t_c.is_zero() || lc == 0 {
        return Err(invalid("condition (ii): lambda_C = tr(mu_C t_C) must be nonzero"));
    }
    params.t_c = Some(t_c);
    // (iii)
    let mu_b = *params.mu_b.get_or_insert(FieldElem::ONE);
    require_subfield_unit(ctx, mu_b, l, "condition (iii): mu_B")?;
    // (iv)
    let s = match &params.s1 {
        Some(s) => {
            if params.validate && (!s.coeffs_in_subfield(ctx, l) || !twisted_tuple_ok(ctx, s, mu_b, mu_c, u)) {
                return Err(invalid(
                    "condition (iv): -mu_B s_i + s_{9l-i}^(3^i) mu_B^(3^i) = mu_C u^(3^i) - u mu_C^(3^i) fails",
                ));
            }
            s.clone()
        }
        None => {
            let solver = TupleSolver::new(
                ctx,
                TupleKind::S4Twisted,
                TupleParams {
                    l,
                    mu_b,
                    mu_c,
                    u,
                    ..Default::default()
                },
            )?;
            pick_tuple(&solver, params.tuple_index.unwrap_or(0))?.s1(ctx)
        }
    };
    params.s1 = Some(s);
    // (v)
    if let Some(lam) = params.lambda {
        if lam >= 3 {
            return Err(invalid("condition (v): lambda must lie in F_3"));
        }
    }
    if s4 {
        let rhs = |lam: u32| ctx.add(ctx.mul(ctx.scalar(lc), u), ctx.mul(ctx.scalar(lam), mu_c));
        match params.alpha {
            Some(alpha) => {
                if !ctx.in_subfield(alpha, 3 * l) {
                    return Err(invalid("condition (v): alpha must lie in F_{3^(3l)}"));
                }
                let diff = ctx.sub(ctx.frob(alpha, l), alpha);
                let lams: Vec<u32> = params.lambda.map(|x| vec![x]).unwrap_or(vec![0, 1, 2]);
                let lam = lams
                    .into_iter()
                    .find(|&lam| rhs(lam) == diff)
                    .ok_or_else(|| invalid("condition (v): g(alpha) - alpha = lambda_C u + lambda mu_C fails"))?;
                params.lambda = Some(lam);
            }
            None => {
                let lams: Vec<u32> = params.lambda.map(|x| vec![x]).unwrap_or(vec![0, 1, 2]);
                let found = lams.into_iter().find_map(|lam| {
                    ctx.artin_schreier_solve(rhs(lam), l)
                        .ok()
                        .filter(|&a| ctx.in_subfield(a, 3 * l))
                        .map(|a| (lam, a))
                });
                let (lam, alpha) =
                    found.ok_or_else(|| Error::NotFound("no alpha, lambda satisfying condition (v)".into()))?;
                params.lambda = Some(lam);
                params.alpha = Some(alpha);
            }
        }
    } else {
        params.alpha.get_or_insert(FieldElem::ZERO);
        params.lambda.get_or_insert(0);
    }
    Ok(())
}

/// Builds a construction and returns only its group.
pub fn build_construction(ctx: Arc<FieldCtx>, params: ConstructionParams) -> Result<GroupSpec> {
    Ok(Construction::build(ctx, params)?.spec)
}

/// Searches conditions (i)-(v) of S4 (or PreS4), starting from whatever `base`
/// fixes. `t_C` candidates beyond the basis come from a seeded generator;
/// gives up with `NotFound` after `budget` candidates.
pub fn search_s4_params(
    ctx: &Arc<FieldCtx>,
    base: ConstructionParams,
    seed: u64,
    budget: usize,
) -> Result<Construction> {
    subfield_degree(ctx, base.variant)?;
    if !matches!(base.variant, Variant::S4 | Variant::PreS4) {
        return Err(invalid("parameter search applies to S4 and PreS4"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidates: Vec<Option<FieldElem>> = match base.t_c {
        Some(t) => vec![Some(t)],
        None => {
            let mut v = vec![None];
            v.extend((0..budget.saturating_sub(1)).map(|_| Some(ctx.random(&mut rng))));
            v
        }
    };
    let mut last = None;
    for t in candidates.drain(..) {
        let mut p = base.clone();
        p.t_c = t;
        match Construction::build(ctx.clone(), p) {
            Ok(c) => return Ok(c),
            Err(e @ (Error::InvalidParams(_) | Error::NotFound(_))) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(Error::NotFound(format!(
        "no S4 parameters within budget {budget}{}",
        last.map(|e| format!(": {e}")).unwrap_or_default()
    )))
}

/// `h^{-1} G h` for `h` fixing the origin, evaluated pointwise.
pub fn conjugate_spec(spec: &GroupSpec, h: GroupElem) -> Result<GroupSpec> {
    let ctx = spec.ctx();
    if !(h.a.is_zero() && h.b.is_zero() && h.c.is_zero()) {
        return Err(Error::NotInModelForm(format!(
            "{} does not fix <(0,0,0,1)>",
            h.display(ctx)
        )));
    }
    let h_inv = g_inv(ctx, &h);
    let map = ConjugateMap {
        inner: spec.clone(),
        h,
        h_inv,
    };
    // spot check: conjugates must lie over the requested points
    let mut rng = ChaCha8Rng::seed_from_u64(SELF_CHECK_SEED);
    for _ in 0..64 {
        let pt = [ctx.random(&mut rng), ctx.random(&mut rng), ctx.random(&mut rng)];
        let g = map.inner.elem_at_point(act(ctx, &map.h_inv, pt));
        let r = g_mul(ctx, &g_mul(ctx, &map.h_inv, &g), &map.h);
        if r.point() != pt {
            return Err(Error::NotInModelForm(r.display(ctx)));
        }
    }
    let params = json!({
        "conjugated": spec.params(),
        "by": h.display(ctx),
    });
    Ok(GroupSpec::new(
        spec.ctx_arc().clone(),
        format!("{}^h", spec.label()),
        params,
        Arc::new(map),
    ))
}

/// The conjugating element `(E(0,0,0,u), 1)` and the normal-form parameters
/// of a pre-variant construction.
pub fn normal_form(c: &Construction) -> Result<(GroupElem, ConstructionParams)> {
    let ctx = c.ctx();
    let p = &c.params;
    let l = c.l;
    let z = FieldElem::ZERO;
    let s1 = p.s1.clone().expect("completed");
    let conj = |u: FieldElem| GroupElem::new([z, z, z, u], Frob::ID);
    match p.variant {
        Variant::PreS2 => {
            let t_c = p.t_c.expect("completed");
            let nu = ctx.sub(p.nu_c.expect("completed"), s1.eval(ctx, t_c));
            let u = ctx.artin_schreier_solve(nu, l)?;
            let lc = c.lambda_c.expect("coset variant");
            let mu_c = ctx.mul(p.mu_c.expect("completed"), ctx.scalar(crate::linalg::inv_mod(lc, ctx.p())));
            let target = ConstructionParams::new(Variant::S2).with_mu_c(mu_c).with_s1(s1);
            Ok((conj(u), target))
        }
        Variant::PreS3 => {
            let mu_b = p.mu_b.expect("completed");
            let u = ctx.mul(ctx.inv(mu_b).expect("nonzero"), p.alpha.expect("completed"));
            let target = ConstructionParams::new(Variant::S3).with_mu_b(mu_b).with_s1(s1);
            Ok((conj(u), target))
        }
        Variant::PreS4 => {
            let t_c = p.t_c.expect("completed");
            let mu_b = p.mu_b.expect("completed");
            let mu_c = p.mu_c.expect("completed");
            let alpha = p.alpha.expect("completed");
            let nu = ctx.sub(p.nu_c.expect("completed"), s1.eval(ctx, t_c));
            let u0 = ctx.artin_schreier_solve(nu, l)?;
            let lc = c.lambda_c.expect("coset variant");
            let lam = ctx.trace(ctx.mul(ctx.mul(mu_b, u0), t_c)) * crate::linalg::inv_mod(lc, 3) % 3;
            let mb_inv = ctx.inv(mu_b).expect("nonzero");
            let u1 = ctx.sub(u0, ctx.mul(ctx.scalar(lam), ctx.mul(mb_inv, mu_c)));
            let alpha1 = ctx.sub(alpha, ctx.mul(u1, mu_b));
            let target = ConstructionParams::new(Variant::S4)
                .with_u(p.u.expect("completed"))
                .with_t_c(t_c)
                .with_mu_b(mu_b)
                .with_s1(s1)
                .with_alpha(alpha1)
                .with_lambda(p.lambda.expect("completed"));
            Ok((conj(u1), target))
        }
        v => Err(invalid(format!("{v} is already a normal form"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::closure;
    use crate::group::g_pow;
    use rand::Rng;

    fn ctx(s: &str) -> Arc<FieldCtx> {
        Arc::new(FieldCtx::parse(s).unwrap())
    }

    fn poly(c: &FieldCtx, s: &str) -> LinPoly {
        LinPoly::parse(c, s).unwrap()
    }

    #[test]
    fn c1_f5_zero_is_elementary_abelian() {
        let k = ctx("5");
        let c = Construction::build(k.clone(), ConstructionParams::new(Variant::C1)).unwrap();
        let r = check_theorem_main(&c.spec, CheckMode::Exhaustive, u64::MAX).unwrap();
        assert!(r.passed);
        for g in c.spec.enumerate(1000).unwrap() {
            assert!(g_pow(&k, &g, 5).is_identity());
        }
    }

    #[test]
    fn s2_theta_is_g_to_trace() {
        let k = ctx("3^3");
        let c = Construction::build(k.clone(), ConstructionParams::new(Variant::S2)).unwrap();
        for x in k.elements() {
            let f = c.spec.sigma(x);
            assert_eq!(f.exp(), k.trace(x) as usize);
        }
    }

    #[test]
    fn s4_rejects_bad_u() {
        let k = ctx("3^9");
        // u in F_3: u - u^g = 0
        let err = Construction::build_unchecked(k.clone(), ConstructionParams::new(Variant::S4).with_u(FieldElem::ONE))
            .unwrap_err();
        assert!(matches!(&err, Error::InvalidParams(m) if m.contains("condition (i)")), "{err}");
    }

    #[test]
    fn s3_rejects_asymmetric_tuple() {
        let k = ctx("3^3");
        let err = Construction::build(k.clone(), ConstructionParams::new(Variant::S3).with_s1(poly(&k, "X^3")))
            .unwrap_err();
        assert!(matches!(&err, Error::InvalidParams(m) if m.contains("(ii)")), "{err}");
        Construction::build(k.clone(), ConstructionParams::new(Variant::S3).with_s1(poly(&k, "X^3+X^9"))).unwrap();
    }

    #[test]
    fn variant_field_shape_is_checked() {
        let k = ctx("3^2");
        assert!(Construction::build(k.clone(), ConstructionParams::new(Variant::S2)).is_err());
        let k = ctx("2^3");
        assert!(Construction::build(k.clone(), ConstructionParams::new(Variant::S3)).is_err());
    }

    #[test]
    fn config_round_trip() {
        let cfg = ConstructionConfig::from_json(r#"{"variant":"S3","field":"3^3","S1":"X^3 + X^9","muB":1}"#).unwrap();
        let c = cfg.build().unwrap();
        let again = c.params.to_config(c.ctx());
        let c2 = again.build().unwrap();
        for g in c.spec.enumerate(20000).unwrap() {
            assert_eq!(c2.spec.elem_at_point(g.point()), g);
        }
        assert!(ConstructionConfig::from_json(r#"{"variant":"S3","field":"3^3","bogus":1}"#).is_err());
    }

    /// A PreS2 record at q = 27 with a nontrivial `nu_C - S_1(t_C)`.
    fn pre_s2_27(k: &Arc<FieldCtx>) -> Construction {
        let mu_c = k.scalar(2);
        let t_c = nonzero_trace_elem(k, mu_c).unwrap();
        let s1 = poly(k, "X^3");
        let nu = k.elements().find(|&x| !x.is_zero() && k.trace(x) == 0).unwrap();
        let nu_c = k.add(s1.eval(k, t_c), nu);
        Construction::build(
            k.clone(),
            ConstructionParams::new(Variant::PreS2)
                .with_s1(s1)
                .with_t_c(t_c)
                .with_nu_c(nu_c)
                .with_mu_c(mu_c),
        )
        .unwrap()
    }

    #[test]
    fn coset_specs_are_bijective_and_closed_at_27() {
        let k = ctx("3^3");
        let pre = pre_s2_27(&k);
        let r = check_theorem_main(&pre.spec, CheckMode::Sample { n: 100_000, seed: 3 }, u64::MAX).unwrap();
        assert!(r.passed, "{:?}", r.witness);
        let all = closure(&k, &pre.spec.generators(), 100_000).unwrap();
        assert_eq!(all.order(), 19683);
        for g in pre.spec.enumerate(20000).unwrap() {
            assert!(all.contains(&g));
        }
    }

    #[test]
    fn pre_s2_conjugates_to_s2() {
        let k = ctx("3^3");
        let pre = pre_s2_27(&k);
        let (h, target) = normal_form(&pre).unwrap();
        assert!(!h.t.is_zero());
        let conj = conjugate_spec(&pre.spec, h).unwrap();
        let s2 = Construction::build(k.clone(), target).unwrap();
        for g in s2.spec.enumerate(20000).unwrap() {
            assert_eq!(conj.elem_at_point(g.point()), g);
        }
    }

    #[test]
    fn pre_s3_conjugates_to_s3() {
        let k = ctx("3^3");
        let pre = Construction::build(
            k.clone(),
            ConstructionParams::new(Variant::PreS3)
                .with_s1(poly(&k, "X^3+X^9"))
                .with_alpha(k.parse_elem("[0,1,2]").unwrap()),
        )
        .unwrap();
        assert!(!pre.nu_b.unwrap().is_zero());
        let r = check_theorem_main(&pre.spec, CheckMode::Sample { n: 100_000, seed: 4 }, u64::MAX).unwrap();
        assert!(r.passed, "{:?}", r.witness);
        let (h, target) = normal_form(&pre).unwrap();
        let conj = conjugate_spec(&pre.spec, h).unwrap();
        let s3 = Construction::build(k.clone(), target).unwrap();
        for g in s3.spec.enumerate(20000).unwrap() {
            assert_eq!(conj.elem_at_point(g.point()), g);
        }
    }

    #[test]
    fn s4_cosets_normalize_g_k() {
        let k = ctx("3^9");
        let c = Construction::build(k.clone(), ConstructionParams::new(Variant::S4)).unwrap();
        let info = c.coset.as_ref().unwrap();
        let h3 = g_pow(&k, &info.h, 3);
        assert!(info.in_kernel_group(&h3));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut tested = 0;
        while tested < 300 {
            let g = c.spec.random_elem(&mut rng);
            if !info.in_k(&k, g.c) {
                continue;
            }
            assert!(info.in_kernel_group(&g));
            let conj = crate::group::conjugate(&k, &g, &info.h);
            assert!(info.in_kernel_group(&conj));
            tested += 1;
        }
        // T(x,y,z) = S_1(z) on the whole group
        let s1 = c.params.s1.clone().unwrap();
        for _ in 0..1000 {
            let pt: [FieldElem; 3] = [k.random(&mut rng), k.random(&mut rng), k.random(&mut rng)];
            assert_eq!(c.spec.elem_at_point(pt).t, s1.eval(&k, pt[2]));
        }
        let _ = rng.gen::<u8>();
    }

    #[test]
    fn pre_s4_conjugates_to_s4_on_samples() {
        let k = ctx("3^9");
        let pre = Construction::build(
            k.clone(),
            ConstructionParams::new(Variant::PreS4)
                .with_alpha(k.parse_elem("x^5").unwrap())
                .with_lambda(1),
        )
        .unwrap();
        let (h, target) = normal_form(&pre).unwrap();
        let conj = conjugate_spec(&pre.spec, h).unwrap();
        let s4 = Construction::build(k.clone(), target).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let pt = [k.random(&mut rng), k.random(&mut rng), k.random(&mut rng)];
            assert_eq!(conj.elem_at_point(pt), s4.spec.elem_at_point(pt));
        }
    }

    #[test]
    fn c2even_closes_at_8_and_rejects_bad_f() {
        let k = ctx("2^3");
        let c = Construction::build(k.clone(), ConstructionParams::new(Variant::C2Even).with_tuple_index(5)).unwrap();
        let r = check_theorem_main(&c.spec, CheckMode::Exhaustive, u64::MAX).unwrap();
        assert!(r.passed, "{:?}", r.witness);
        let bad = ConstructionParams::new(Variant::C2Even).with_f(vec![FieldElem::ONE; 3]);
        assert!(Construction::build(k, bad).is_err());
    }

    #[test]
    fn conjugating_by_identity_is_pointwise_equal() {
        let k = ctx("5");
        let c = Construction::build(k.clone(), ConstructionParams::new(Variant::C1).with_s1(LinPoly::identity(1))).unwrap();
        let conj = conjugate_spec(&c.spec, GroupElem::IDENTITY).unwrap();
        for g in c.spec.enumerate(200).unwrap() {
            assert_eq!(conj.elem_at_point(g.point()), g);
        }
        let moving = GroupElem::new([FieldElem::ONE, FieldElem::ZERO, FieldElem::ZERO, FieldElem::ZERO], Frob::ID);
        assert!(matches!(conjugate_spec(&c.spec, moving), Err(Error::NotInModelForm(_))));
    }
}
