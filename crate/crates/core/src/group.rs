//! Elements `(E(a,b,c,t), phi)` of the point-regular groups, the group law,
//! and group specifications `g_{a,b,c} = (E(a,b,c,T(a,b,c)), theta_{a,b,c})`.
//!
//! An element acts on row vectors by `x -> x^phi E`, and the product
//! `g o h = (E_g^{phi_h} E_h, phi_g phi_h)` means "first g, then h".

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{FieldCtx, FieldElem, Frob};

/// Matrix part `E(a,b,c,t)` as its four parameters.
pub type ETuple = [FieldElem; 4];

/// A point `<(a,b,c,1)>` of the derived quadrangle.
pub type Triple = [FieldElem; 3];

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct GroupElem {
    pub a: FieldElem,
    pub b: FieldElem,
    pub c: FieldElem,
    pub t: FieldElem,
    pub f: Frob,
}

const KEY_BITS: u32 = 15;
const KEY_MASK: u64 = (1 << KEY_BITS) - 1;

impl GroupElem {
    pub const IDENTITY: GroupElem = GroupElem {
        a: FieldElem::ZERO,
        b: FieldElem::ZERO,
        c: FieldElem::ZERO,
        t: FieldElem::ZERO,
        f: Frob::ID,
    };

    pub fn new(e: ETuple, f: Frob) -> Self {
        GroupElem {
            a: e[0],
            b: e[1],
            c: e[2],
            t: e[3],
            f,
        }
    }

    #[inline]
    pub fn tuple(&self) -> ETuple {
        [self.a, self.b, self.c, self.t]
    }

    /// The image of the origin `<(0,0,0,1)>`.
    #[inline]
    pub fn point(&self) -> Triple {
        [self.a, self.b, self.c]
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    /// Packed canonical key: 15 bits per coordinate, Frobenius exponent on top.
    #[inline]
    pub fn key(&self) -> u64 {
        self.a.0 as u64
            | (self.b.0 as u64) << KEY_BITS
            | (self.c.0 as u64) << (2 * KEY_BITS)
            | (self.t.0 as u64) << (3 * KEY_BITS)
            | (self.f.0 as u64) << (4 * KEY_BITS)
    }

    #[inline]
    pub fn from_key(k: u64) -> Self {
        let part = |i: u32| FieldElem(((k >> (i * KEY_BITS)) & KEY_MASK) as u16);
        GroupElem {
            a: part(0),
            b: part(1),
            c: part(2),
            t: part(3),
            f: Frob((k >> (4 * KEY_BITS)) as u8),
        }
    }

    /// Text form `a=[..];b=[..];c=[..];t=[..];f=i`.
    pub fn display(&self, ctx: &FieldCtx) -> String {
        format!(
            "a={};b={};c={};t={};f={}",
            ctx.fmt_elem(self.a),
            ctx.fmt_elem(self.b),
            ctx.fmt_elem(self.c),
            ctx.fmt_elem(self.t),
            self.f.0
        )
    }

    pub fn parse(ctx: &FieldCtx, s: &str) -> Result<Self> {
        let mut e = GroupElem::IDENTITY;
        for part in s.split(';').filter(|p| !p.trim().is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("element field {part:?}")))?;
            match k.trim() {
                "a" => e.a = ctx.parse_elem(v)?,
                "b" => e.b = ctx.parse_elem(v)?,
                "c" => e.c = ctx.parse_elem(v)?,
                "t" => e.t = ctx.parse_elem(v)?,
                "f" => {
                    let i: i64 = v
                        .trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("frobenius exponent {v:?}")))?;
                    e.f = ctx.frob_new(i);
                }
                other => return Err(Error::Parse(format!("unknown element field {other:?}"))),
            }
        }
        Ok(e)
    }
}

/// `E(a,b,c,t) E(x,y,z,w) = E(a+x-bz+cy-czw, b+y+cw, c+z, t+w)`.
#[inline]
pub fn e_mul(ctx: &FieldCtx, l: ETuple, r: ETuple) -> ETuple {
    let [a, b, c, t] = l;
    let [x, y, z, w] = r;
    let cw = ctx.mul(c, w);
    let u = ctx.add(
        ctx.add(a, x),
        ctx.sub(ctx.mul(c, y), ctx.add(ctx.mul(b, z), ctx.mul(cw, z))),
    );
    [u, ctx.add(ctx.add(b, y), cw), ctx.add(c, z), ctx.add(t, w)]
}

/// `E(a,b,c,t)^{-1} = E(-a, -b+ct, -c, -t)`.
#[inline]
pub fn e_inv(ctx: &FieldCtx, e: ETuple) -> ETuple {
    let [a, b, c, t] = e;
    [
        ctx.neg(a),
        ctx.sub(ctx.mul(c, t), b),
        ctx.neg(c),
        ctx.neg(t),
    ]
}

#[inline]
fn frob_tuple(ctx: &FieldCtx, e: ETuple, f: Frob) -> ETuple {
    if f == Frob::ID {
        return e;
    }
    e.map(|x| ctx.frob_apply(f, x))
}

/// `(E_1, phi_1) o (E_2, phi_2) = (E_1^{phi_2} E_2, phi_1 phi_2)`.
#[inline]
pub fn g_mul(ctx: &FieldCtx, g: &GroupElem, h: &GroupElem) -> GroupElem {
    let e = e_mul(ctx, frob_tuple(ctx, g.tuple(), h.f), h.tuple());
    GroupElem::new(e, g.f.compose(h.f, ctx.m()))
}

pub fn g_inv(ctx: &FieldCtx, g: &GroupElem) -> GroupElem {
    let fi = g.f.inverse(ctx.m());
    GroupElem::new(e_inv(ctx, frob_tuple(ctx, g.tuple(), fi)), fi)
}

/// `g^n` by square and multiply; negative `n` gives inverse powers.
pub fn g_pow(ctx: &FieldCtx, g: &GroupElem, n: i64) -> GroupElem {
    let mut base = if n < 0 { g_inv(ctx, g) } else { *g };
    let mut e = n.unsigned_abs();
    let mut acc = GroupElem::IDENTITY;
    while e > 0 {
        if e & 1 == 1 {
            acc = g_mul(ctx, &acc, &base);
        }
        base = g_mul(ctx, &base, &base);
        e >>= 1;
    }
    acc
}

/// `[g,h] = g^{-1} h^{-1} g h`.
pub fn commutator(ctx: &FieldCtx, g: &GroupElem, h: &GroupElem) -> GroupElem {
    let gi = g_inv(ctx, g);
    let hi = g_inv(ctx, h);
    let left = g_mul(ctx, &gi, &hi);
    let right = g_mul(ctx, g, h);
    g_mul(ctx, &left, &right)
}

/// `h^{-1} g h`.
pub fn conjugate(ctx: &FieldCtx, g: &GroupElem, h: &GroupElem) -> GroupElem {
    let hi = g_inv(ctx, h);
    g_mul(ctx, &g_mul(ctx, &hi, g), h)
}

/// Smallest `n >= 1` with `g^n = 1`; `None` past `limit`.
pub fn element_order(ctx: &FieldCtx, g: &GroupElem, limit: u64) -> Option<u64> {
    let mut x = *g;
    let mut n = 1;
    while !x.is_identity() {
        if n >= limit {
            return None;
        }
        x = g_mul(ctx, &x, g);
        n += 1;
    }
    Some(n)
}

/// Order of an element of a p-group: the least `p^k` with `g^(p^k) = 1`.
pub fn p_element_order(ctx: &FieldCtx, g: &GroupElem, max_k: u32) -> Option<u64> {
    let p = ctx.p() as i64;
    let mut x = *g;
    let mut order = 1u64;
    for _ in 0..=max_k {
        if x.is_identity() {
            return Some(order);
        }
        x = g_pow(ctx, &x, p);
        order *= p as u64;
    }
    None
}

/// Right action on affine points: `(a,b,c,1)^phi E(x,y,z,t)`.
#[inline]
pub fn act(ctx: &FieldCtx, g: &GroupElem, pt: Triple) -> Triple {
    let [a, b, c] = pt.map(|v| ctx.frob_apply(g.f, v));
    let e = e_mul(ctx, [a, b, c, FieldElem::ZERO], g.tuple());
    [e[0], e[1], e[2]]
}

/// Resolves `(a,b,c)` to `(T(a,b,c), theta_{a,b,c})`.
pub trait ElementMap: Send + Sync {
    fn resolve(&self, ctx: &FieldCtx, a: FieldElem, b: FieldElem, c: FieldElem) -> (FieldElem, Frob);
}

/// An [`ElementMap`] given by a closure; used for ad hoc and broken specs.
pub struct FnMap<F>(pub F);

impl<F> ElementMap for FnMap<F>
where
    F: Fn(&FieldCtx, FieldElem, FieldElem, FieldElem) -> (FieldElem, Frob) + Send + Sync,
{
    fn resolve(&self, ctx: &FieldCtx, a: FieldElem, b: FieldElem, c: FieldElem) -> (FieldElem, Frob) {
        (self.0)(ctx, a, b, c)
    }
}

/// A candidate group `{g_{a,b,c}}` given by its functions `T` and `theta`.
#[derive(Clone)]
pub struct GroupSpec {
    ctx: Arc<FieldCtx>,
    label: String,
    params: serde_json::Value,
    map: Arc<dyn ElementMap>,
}

impl fmt::Debug for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupSpec({} over {})", self.label, self.ctx.spec_string())
    }
}

impl GroupSpec {
    pub fn new(
        ctx: Arc<FieldCtx>,
        label: impl Into<String>,
        params: serde_json::Value,
        map: Arc<dyn ElementMap>,
    ) -> Self {
        GroupSpec {
            ctx,
            label: label.into(),
            params,
            map,
        }
    }

    /// A spec from a closure returning `(T, theta)`.
    pub fn from_fn<F>(ctx: Arc<FieldCtx>, label: impl Into<String>, f: F) -> Self
    where
        F: Fn(&FieldCtx, FieldElem, FieldElem, FieldElem) -> (FieldElem, Frob) + Send + Sync + 'static,
    {
        GroupSpec::new(ctx, label, serde_json::Value::Null, Arc::new(FnMap(f)))
    }

    #[inline]
    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn ctx_arc(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn params(&self) -> &serde_json::Value {
        &self.params
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// `|G| = q^3`.
    pub fn order(&self) -> u64 {
        (self.ctx.q() as u64).pow(3)
    }

    #[inline]
    pub fn elem_at(&self, a: FieldElem, b: FieldElem, c: FieldElem) -> GroupElem {
        let (t, f) = self.map.resolve(&self.ctx, a, b, c);
        GroupElem { a, b, c, t, f }
    }

    pub fn elem_at_point(&self, pt: Triple) -> GroupElem {
        self.elem_at(pt[0], pt[1], pt[2])
    }

    pub fn t(&self, a: FieldElem, b: FieldElem, c: FieldElem) -> FieldElem {
        self.elem_at(a, b, c).t
    }

    pub fn theta(&self, a: FieldElem, b: FieldElem, c: FieldElem) -> Frob {
        self.elem_at(a, b, c).f
    }

    /// `L(x) = T(x,0,0)`.
    pub fn l_fn(&self, x: FieldElem) -> FieldElem {
        self.t(x, FieldElem::ZERO, FieldElem::ZERO)
    }

    /// `M(y) = T(0,y,0)`.
    pub fn m_fn(&self, y: FieldElem) -> FieldElem {
        self.t(FieldElem::ZERO, y, FieldElem::ZERO)
    }

    /// `S(z) = T(0,0,z)`.
    pub fn s_fn(&self, z: FieldElem) -> FieldElem {
        self.t(FieldElem::ZERO, FieldElem::ZERO, z)
    }

    /// `sigma_c = theta_{0,0,c}`.
    pub fn sigma(&self, c: FieldElem) -> Frob {
        self.theta(FieldElem::ZERO, FieldElem::ZERO, c)
    }

    /// Whether `g` is the element of this spec lying over its point.
    pub fn contains(&self, g: &GroupElem) -> bool {
        self.elem_at(g.a, g.b, g.c) == *g
    }

    /// `g_{x^i,0,0}`, `g_{0,x^i,0}`, `g_{0,0,x^i}` for `0 <= i < m`.
    pub fn generators(&self) -> Vec<GroupElem> {
        let z = FieldElem::ZERO;
        let m = self.ctx.m();
        let mut out = Vec::with_capacity(3 * m);
        for i in 0..m {
            out.push(self.elem_at(self.ctx.basis(i), z, z));
        }
        for i in 0..m {
            out.push(self.elem_at(z, self.ctx.basis(i), z));
        }
        for i in 0..m {
            out.push(self.elem_at(z, z, self.ctx.basis(i)));
        }
        out
    }

    /// All `q^3` elements in lexicographic `(a,b,c)` order.
    pub fn enumerate(&self, cap: u64) -> Result<impl Iterator<Item = GroupElem> + '_> {
        let n = self.order();
        if n > cap {
            return Err(Error::cap(cap as usize, format!("enumerating {n} elements")));
        }
        let q = self.ctx.q();
        Ok((0..n).map(move |i| {
            let i = i as u32;
            let c = FieldElem((i % q) as u16);
            let b = FieldElem(((i / q) % q) as u16);
            let a = FieldElem((i / q / q) as u16);
            self.elem_at(a, b, c)
        }))
    }

    pub fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> GroupElem {
        let ctx = &self.ctx;
        self.elem_at(ctx.random(rng), ctx.random(rng), ctx.random(rng))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMode {
    Exhaustive,
    Sample { n: u64, seed: u64 },
}

impl CheckMode {
    pub fn describe(&self) -> String {
        match self {
            CheckMode::Exhaustive => "exhaustive".into(),
            CheckMode::Sample { n, seed } => format!("sample:{n}:seed{seed}"),
        }
    }

    /// Parses "exhaustive" or "sample:N:SEED" (SEED may carry a "seed" prefix).
    pub fn parse(s: &str) -> Result<CheckMode> {
        if s == "exhaustive" {
            return Ok(CheckMode::Exhaustive);
        }
        let bad = || Error::Parse(format!("check mode {s:?}, expected exhaustive or sample:N:SEED"));
        let rest = s.strip_prefix("sample:").ok_or_else(bad)?;
        let (n, seed) = rest.split_once(':').ok_or_else(bad)?;
        let n: u64 = n.parse().map_err(|_| bad())?;
        let seed: u64 = seed.trim_start_matches("seed").parse().map_err(|_| bad())?;
        Ok(CheckMode::Sample { n, seed })
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct PairWitness {
    pub first: String,
    pub second: String,
    pub condition: String,
    pub expected: String,
    pub found: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct TheoremMainReport {
    pub mode: String,
    pub pairs_checked: u64,
    pub passed: bool,
    pub witness: Option<PairWitness>,
}

/// Default ceiling on exhaustive pair checks.
pub const DEFAULT_PAIR_CAP: u64 = 20_000_000;

const SAMPLE_CHUNK: u64 = 1 << 14;

/// Checks the closure conditions on `theta` and `T` for pairs of triples,
/// computing `u, v, w` from their explicit formulas.
pub fn check_theorem_main(spec: &GroupSpec, mode: CheckMode, pair_cap: u64) -> Result<TheoremMainReport> {
    let ctx = spec.ctx();
    let q = ctx.q() as u64;
    let witness = match mode {
        CheckMode::Exhaustive => {
            let pairs = q.pow(6);
            if pairs > pair_cap {
                return Err(Error::cap(pair_cap as usize, format!("{pairs} pairs for exhaustive check")));
            }
            let pts: Vec<Triple> = (0..q * q * q)
                .map(|i| {
                    let i = i as u32;
                    let q = q as u32;
                    [FieldElem((i / q / q) as u16), FieldElem(((i / q) % q) as u16), FieldElem((i % q) as u16)]
                })
                .collect();
            let elems: Vec<GroupElem> = pts.iter().map(|&p| spec.elem_at_point(p)).collect();
            elems
                .par_iter()
                .enumerate()
                .find_map_first(|(_, g)| elems.iter().find_map(|h| check_pair(spec, g, h)))
        }
        CheckMode::Sample { n, seed } => {
            let chunks = n.div_ceil(SAMPLE_CHUNK);
            (0..chunks).into_par_iter().find_map_first(|chunk| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(chunk);
                let len = SAMPLE_CHUNK.min(n - chunk * SAMPLE_CHUNK);
                (0..len).find_map(|_| {
                    let g = spec.random_elem(&mut rng);
                    let h = spec.random_elem(&mut rng);
                    check_pair(spec, &g, &h)
                })
            })
        }
    };
    let pairs_checked = match mode {
        CheckMode::Exhaustive => q.pow(6),
        CheckMode::Sample { n, .. } => n,
    };
    Ok(TheoremMainReport {
        mode: mode.describe(),
        pairs_checked,
        passed: witness.is_none(),
        witness,
    })
}

fn check_pair(spec: &GroupSpec, g: &GroupElem, h: &GroupElem) -> Option<PairWitness> {
    let ctx = spec.ctx();
    let th = h.f;
    let [a, b, c] = g.point().map(|v| ctx.frob_apply(th, v));
    let [x, y, z] = h.point();
    let tz = h.t;
    let w = ctx.add(c, z);
    let v = ctx.add(ctx.add(b, y), ctx.mul(c, tz));
    let u = ctx.sub(
        ctx.add(ctx.add(a, x), ctx.mul(c, y)),
        ctx.add(ctx.mul(b, z), ctx.mul(ctx.mul(c, z), tz)),
    );
    let target = spec.elem_at(u, v, w);
    let theta = g.f.compose(h.f, ctx.m());
    let t_sum = ctx.add(ctx.frob_apply(th, g.t), h.t);
    let product = g_mul(ctx, g, h);
    debug_assert_eq!(product.point(), [u, v, w], "group law disagrees with the closed form");
    let mk = |cond: &str, expected: String, found: String| PairWitness {
        first: g.display(ctx),
        second: h.display(ctx),
        condition: cond.into(),
        expected,
        found,
    };
    if target.f != theta {
        return Some(mk(
            "theta_abc theta_xyz = theta_uvw",
            theta.0.to_string(),
            target.f.0.to_string(),
        ));
    }
    if target.t != t_sum {
        return Some(mk(
            "T(a,b,c)^theta_xyz + T(x,y,z) = T(u,v,w)",
            ctx.fmt_elem(t_sum),
            ctx.fmt_elem(target.t),
        ));
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    type Mat = [[FieldElem; 4]; 4];

    // dense 4x4 oracle for E(a,b,c,t)
    fn dense(ctx: &FieldCtx, e: ETuple) -> Mat {
        let [a, b, c, t] = e;
        let (o, z) = (FieldElem::ONE, FieldElem::ZERO);
        [
            [o, z, z, z],
            [ctx.neg(c), o, z, z],
            [ctx.sub(b, ctx.mul(c, t)), t, o, z],
            [a, b, c, o],
        ]
    }

    fn mat_mul(ctx: &FieldCtx, x: &Mat, y: &Mat) -> Mat {
        let mut out = [[FieldElem::ZERO; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] = ctx.sum((0..4).map(|k| ctx.mul(x[i][k], y[k][j])));
            }
        }
        out
    }

    #[test]
    fn e_mul_f5_example() {
        let ctx = FieldCtx::parse("5").unwrap();
        let s = |v: [u32; 4]| v.map(|x| ctx.scalar(x));
        assert_eq!(e_mul(&ctx, s([1, 2, 3, 4]), s([4, 3, 2, 1])), s([4, 3, 0, 0]));
        assert_eq!(e_inv(&ctx, s([1, 2, 3, 4])), s([4, 0, 2, 1]));
        assert_eq!(e_mul(&ctx, s([0, 0, 0, 0]), s([4, 3, 2, 1])), s([4, 3, 2, 1]));
    }

    #[test]
    fn e_mul_matches_dense_oracle() {
        for spec in ["5", "3^2", "2^3"] {
            let ctx = FieldCtx::parse(spec).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            for _ in 0..2000 {
                let x: ETuple = std::array::from_fn(|_| ctx.random(&mut rng));
                let y: ETuple = std::array::from_fn(|_| ctx.random(&mut rng));
                assert_eq!(dense(&ctx, e_mul(&ctx, x, y)), mat_mul(&ctx, &dense(&ctx, x), &dense(&ctx, y)));
                assert_eq!(e_mul(&ctx, x, e_inv(&ctx, x)), [FieldElem::ZERO; 4]);
            }
        }
    }

    #[test]
    fn key_round_trip() {
        let ctx = FieldCtx::parse("2^15").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let g = GroupElem::new(std::array::from_fn(|_| ctx.random(&mut rng)), Frob(rng.gen_range(0..15)));
            assert_eq!(GroupElem::from_key(g.key()), g);
            assert_eq!(GroupElem::parse(&ctx, &g.display(&ctx)).unwrap(), g);
        }
    }

    #[test]
    fn semilinear_group_laws() {
        let ctx = FieldCtx::parse("3^3").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rand_elem = |rng: &mut ChaCha8Rng| {
            GroupElem::new(std::array::from_fn(|_| ctx.random(rng)), Frob(rng.gen_range(0..3)))
        };
        for _ in 0..2000 {
            let (g, h, k) = (rand_elem(&mut rng), rand_elem(&mut rng), rand_elem(&mut rng));
            let left = g_mul(&ctx, &g_mul(&ctx, &g, &h), &k);
            let right = g_mul(&ctx, &g, &g_mul(&ctx, &h, &k));
            assert_eq!(left, right);
            assert!(g_mul(&ctx, &g, &g_inv(&ctx, &g)).is_identity());
            assert!(g_mul(&ctx, &g_inv(&ctx, &g), &g).is_identity());
            let pt: Triple = std::array::from_fn(|_| ctx.random(&mut rng));
            assert_eq!(act(&ctx, &g_mul(&ctx, &g, &h), pt), act(&ctx, &h, act(&ctx, &g, pt)));
            assert_eq!(act(&ctx, &g, [FieldElem::ZERO; 3]), g.point());
            assert!(commutator(&ctx, &g, &g).is_identity());
            assert_eq!(g_pow(&ctx, &g, -2), g_inv(&ctx, &g_mul(&ctx, &g, &g)));
        }
    }

    #[test]
    fn check_mode_parse() {
        assert_eq!(CheckMode::parse("exhaustive").unwrap(), CheckMode::Exhaustive);
        assert_eq!(
            CheckMode::parse("sample:1000000:seed42").unwrap(),
            CheckMode::Sample { n: 1_000_000, seed: 42 }
        );
        assert!(CheckMode::parse("sample:x").is_err());
    }

    #[test]
    fn broken_spec_has_a_witness() {
        let ctx = Arc::new(FieldCtx::parse("5").unwrap());
        let spec = GroupSpec::from_fn(ctx, "T=c^2", |ctx, _, _, c| (ctx.mul(c, c), Frob::ID));
        let rep = check_theorem_main(&spec, CheckMode::Exhaustive, DEFAULT_PAIR_CAP).unwrap();
        assert!(!rep.passed);
        let w = rep.witness.unwrap();
        assert!(w.condition.starts_with("T("));
    }
}
