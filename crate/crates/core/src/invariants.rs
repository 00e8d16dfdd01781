//! Exponent, center, central series, Thompson subgroup and point regularity
//! of a [`GroupSpec`], plus sampled verification of claimed upper central
//! series given by coordinate subspaces.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustc_hash::FxHashSet;
use serde::Serialize;

use crate::closure::{closure, from_elements, normalize, SubgroupSet};
use crate::error::{Error, Result};
use crate::gf::{FieldCtx, FieldElem, Frob};
use crate::group::{act, commutator, g_inv, g_mul, p_element_order, GroupElem, GroupSpec};
use crate::linalg::Subspace;
use crate::linpoly::LinPoly;
use crate::quadrangle::Quadrangle;

/// Largest group materialized by the exact routines.
pub const SMALL_ORDER_CAP: u64 = 27 * 27 * 27;

/// Number of elements sampled by the sampled exponent.
pub const EXPONENT_SAMPLES: u64 = 10_000;

fn p_order_bound(ctx: &FieldCtx) -> u32 {
    3 * ctx.m() as u32 + 2
}

/// Every element of `spec`, in lexicographic order.
pub fn materialize(spec: &GroupSpec, cap: u64) -> Result<SubgroupSet> {
    let elems: Vec<GroupElem> = spec.enumerate(cap)?.collect();
    from_elements(spec.ctx(), elems, false)
}

// ---------------------------------------------------------------------------
// exponent

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ExponentReport {
    pub exponent: u64,
    /// True for a full scan; otherwise `exponent` is a lower bound.
    pub exact: bool,
    pub elements: u64,
    pub seed: Option<u64>,
}

fn order_of(ctx: &FieldCtx, g: &GroupElem) -> Result<u64> {
    p_element_order(ctx, g, p_order_bound(ctx))
        .ok_or_else(|| Error::SelfCheckFailed(format!("{} has no p-power order", g.display(ctx))))
}

/// Maximum element order over all of `spec` (p-groups: the exponent).
pub fn exponent(spec: &GroupSpec, cap: u64) -> Result<ExponentReport> {
    let ctx = spec.ctx();
    let elems: Vec<GroupElem> = spec.enumerate(cap)?.collect();
    let orders = elems
        .par_iter()
        .map(|g| order_of(ctx, g))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExponentReport {
        exponent: orders.into_iter().max().unwrap_or(1),
        exact: true,
        elements: elems.len() as u64,
        seed: None,
    })
}

/// Largest order among the generators and `n` seeded random elements.
pub fn exponent_sampled(spec: &GroupSpec, n: u64, seed: u64) -> Result<ExponentReport> {
    let ctx = spec.ctx();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut elems = spec.generators();
    elems.extend((0..n).map(|_| spec.random_elem(&mut rng)));
    let orders = elems
        .par_iter()
        .map(|g| order_of(ctx, g))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExponentReport {
        exponent: orders.into_iter().max().unwrap_or(1),
        exact: false,
        elements: elems.len() as u64,
        seed: Some(seed),
    })
}

// ---------------------------------------------------------------------------
// center and coordinate summaries

/// `F_p`-spans of the coordinates of a set of elements.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CoordinateSummary {
    pub order: usize,
    pub dim_a: usize,
    pub dim_b: usize,
    pub dim_c: usize,
    pub dim_t: usize,
    pub frobenius_trivial: bool,
    pub description: String,
}

pub fn summarize(ctx: &FieldCtx, set: &SubgroupSet) -> CoordinateSummary {
    let (p, m) = (ctx.p(), ctx.m());
    let mut cols: [Vec<Vec<u32>>; 4] = Default::default();
    let mut seen: [FxHashSet<FieldElem>; 4] = Default::default();
    let mut frob = true;
    for g in set.iter() {
        for (k, x) in g.tuple().into_iter().enumerate() {
            if seen[k].insert(x) {
                cols[k].push(ctx.to_vec(x));
            }
        }
        frob &= g.f == Frob::ID;
    }
    let dims = cols.map(|c| Subspace::span(p, m, &c).dim());
    let name = |d: usize| match d {
        0 => "0".to_string(),
        d if d == m => format!("F_{}", ctx.q()),
        d => format!("dim {d}"),
    };
    let description = format!(
        "a: {}, b: {}, c: {}, frobenius {}",
        name(dims[0]),
        name(dims[1]),
        name(dims[2]),
        if frob { "trivial" } else { "nontrivial" }
    );
    CoordinateSummary {
        order: set.order(),
        dim_a: dims[0],
        dim_b: dims[1],
        dim_c: dims[2],
        dim_t: dims[3],
        frobenius_trivial: frob,
        description,
    }
}

/// Elements of `universe` commuting with every generator of `spec`.
pub fn center(spec: &GroupSpec, universe: &SubgroupSet) -> Result<SubgroupSet> {
    let ctx = spec.ctx();
    let gens = spec.generators();
    let mut keys: Vec<u64> = universe
        .keys()
        .par_iter()
        .copied()
        .filter(|&k| {
            let g = GroupElem::from_key(k);
            gens.iter().all(|x| g_mul(ctx, &g, x) == g_mul(ctx, x, &g))
        })
        .collect();
    keys.sort_unstable();
    from_elements(ctx, keys.into_iter().map(GroupElem::from_key), false)
}

/// The center computed against every element rather than the generators.
pub fn center_all_pairs(spec: &GroupSpec, universe: &SubgroupSet) -> Result<SubgroupSet> {
    let ctx = spec.ctx();
    let all: Vec<GroupElem> = universe.iter().collect();
    let mut keys: Vec<u64> = all
        .par_iter()
        .filter(|g| all.iter().all(|x| g_mul(ctx, g, x) == g_mul(ctx, x, g)))
        .map(|g| g.key())
        .collect();
    keys.sort_unstable();
    from_elements(ctx, keys.into_iter().map(GroupElem::from_key), false)
}

// ---------------------------------------------------------------------------
// central series

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum SeriesKind {
    Lower,
    Upper,
}

/// A central series. `terms[0]` is `gamma_1 = G` (lower) or `Z_0 = 1`
/// (upper); `G` itself is kept only by its order.
#[derive(Clone, Debug)]
pub struct CentralSeries {
    pub kind: SeriesKind,
    pub orders: Vec<u64>,
    pub terms: Vec<Option<SubgroupSet>>,
    pub class: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SeriesSummary {
    pub kind: SeriesKind,
    pub orders: Vec<u64>,
    pub class: usize,
}

impl CentralSeries {
    pub fn summary(&self) -> SeriesSummary {
        SeriesSummary {
            kind: self.kind,
            orders: self.orders.clone(),
            class: self.class,
        }
    }
}

/// `gamma_{i+1}` as the normal closure of `[x, y]` over generators `x` of
/// `gamma_i` and `y` of `G`. Terms from `gamma_2` on must fit under `cap`.
pub fn lower_central_series(spec: &GroupSpec, cap: usize) -> Result<CentralSeries> {
    let ctx = spec.ctx();
    let gens = spec.generators();
    let mut orders = vec![spec.order()];
    let mut terms = vec![None];
    let mut current: Vec<GroupElem> = gens.clone();
    loop {
        let mut next = SubgroupSet::trivial();
        for x in &current {
            for y in &gens {
                let c = commutator(ctx, x, y);
                next.add_generator(ctx, c, cap).map_err(|e| at_level(e, orders.len() + 1))?;
            }
        }
        normalize(ctx, &mut next, &gens, cap).map_err(|e| at_level(e, orders.len() + 1))?;
        if next.order() == 1 {
            break;
        }
        if next.order() as u64 == *orders.last().unwrap() {
            return Err(Error::SelfCheckFailed("lower central series stalls: group is not nilpotent".into()));
        }
        orders.push(next.order() as u64);
        current = next.generators().to_vec();
        terms.push(Some(next));
    }
    let class = orders.len();
    Ok(CentralSeries {
        kind: SeriesKind::Lower,
        orders,
        terms,
        class,
    })
}

fn at_level(e: Error, level: usize) -> Error {
    match e {
        Error::CapExceeded { cap, .. } => Error::cap(cap, format!("gamma_{level}")),
        e => e,
    }
}

/// Lower central series from commutators of all pairs; small groups only.
pub fn lower_central_series_all_pairs(spec: &GroupSpec, universe: &SubgroupSet, cap: usize) -> Result<CentralSeries> {
    let ctx = spec.ctx();
    let all: Vec<GroupElem> = universe.iter().collect();
    let mut orders = vec![universe.order() as u64];
    let mut terms = vec![Some(universe.clone())];
    let mut current = all.clone();
    loop {
        let comms: FxHashSet<u64> = current
            .par_iter()
            .flat_map_iter(|x| all.iter().map(move |y| commutator(ctx, x, y).key()))
            .collect();
        let mut comms: Vec<u64> = comms.into_iter().collect();
        comms.sort_unstable();
        let gens: Vec<GroupElem> = comms.into_iter().map(GroupElem::from_key).collect();
        let next = closure(ctx, &gens, cap)?;
        if next.order() == 1 || next.order() as u64 == *orders.last().unwrap() {
            if next.order() != 1 {
                return Err(Error::SelfCheckFailed("lower central series stalls".into()));
            }
            break;
        }
        orders.push(next.order() as u64);
        current = next.iter().collect();
        terms.push(Some(next));
    }
    let class = orders.len();
    Ok(CentralSeries {
        kind: SeriesKind::Lower,
        orders,
        terms,
        class,
    })
}

/// `Z_{i+1} = {g : [g, x] in Z_i for all generators x}` over a materialized
/// group.
pub fn upper_central_series_small(spec: &GroupSpec, universe: &SubgroupSet) -> Result<CentralSeries> {
    let ctx = spec.ctx();
    let gens = spec.generators();
    let total = universe.order();
    let mut terms = vec![SubgroupSet::trivial()];
    while terms.last().unwrap().order() < total {
        let z = terms.last().unwrap();
        let mut keys: Vec<u64> = universe
            .keys()
            .par_iter()
            .copied()
            .filter(|&k| {
                let g = GroupElem::from_key(k);
                gens.iter().all(|x| z.contains(&commutator(ctx, &g, x)))
            })
            .collect();
        if keys.len() == z.order() {
            return Err(Error::SelfCheckFailed("upper central series stalls: group is not nilpotent".into()));
        }
        keys.sort_unstable();
        terms.push(from_elements(ctx, keys.into_iter().map(GroupElem::from_key), false)?);
    }
    let orders = terms.iter().map(|t| t.order() as u64).collect();
    let class = terms.len() - 1;
    Ok(CentralSeries {
        kind: SeriesKind::Upper,
        orders,
        terms: terms.into_iter().map(Some).collect(),
        class,
    })
}

// ---------------------------------------------------------------------------
// claimed upper central series

/// A claimed term `{g_{a,b,c} : a in A, b in B, c in C}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelClaim {
    pub a: Subspace,
    pub b: Subspace,
    pub c: Subspace,
}

impl LevelClaim {
    pub fn trivial(ctx: &FieldCtx) -> Self {
        let z = Subspace::zero(ctx.p(), ctx.m());
        LevelClaim {
            a: z.clone(),
            b: z.clone(),
            c: z,
        }
    }

    pub fn contains(&self, ctx: &FieldCtx, g: &GroupElem) -> bool {
        self.a.contains(&ctx.to_vec(g.a)) && self.b.contains(&ctx.to_vec(g.b)) && self.c.contains(&ctx.to_vec(g.c))
    }

    pub fn log_order(&self) -> usize {
        self.a.dim() + self.b.dim() + self.c.dim()
    }

    pub fn is_full(&self, ctx: &FieldCtx) -> bool {
        self.log_order() == 3 * ctx.m()
    }

    fn sample(&self, ctx: &FieldCtx, rng: &mut impl Rng) -> [FieldElem; 3] {
        let p = ctx.p();
        let pick = |s: &Subspace, rng: &mut dyn rand::RngCore| {
            let coeffs: Vec<u32> = (0..s.dim()).map(|_| rng.gen_range(0..p)).collect();
            ctx.from_vec(&s.combine(&coeffs))
        };
        [pick(&self.a, rng), pick(&self.b, rng), pick(&self.c, rng)]
    }

    pub fn describe(&self) -> String {
        format!("dims a={} b={} c={}", self.a.dim(), self.b.dim(), self.c.dim())
    }
}

/// `R_i = (1 - g)^i(F_q)` with `g = Frob(l)`.
pub fn r_space(ctx: &FieldCtx, l: usize, i: usize) -> Subspace {
    let f = LinPoly::identity(ctx.m()).one_minus_g_pow(ctx, l, i);
    let cols: Vec<Vec<u32>> = (0..ctx.m()).map(|j| ctx.to_vec(f.eval(ctx, ctx.basis(j)))).collect();
    Subspace::span(ctx.p(), ctx.m(), &cols)
}

/// The special forms of `S_1` for which the upper series of S2 (with
/// `mu_C = 1`) is known explicitly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "case", rename_all = "kebab-case")]
pub enum NcCase {
    /// `S_1 = 0`.
    Zero,
    /// `S_1 = z^(p^k)` with `l` not dividing `k`.
    Monomial { k: usize },
    /// `S_1 = (1 - g)^k(z)`, `1 <= k <= p - 1`.
    OneMinusG { k: usize },
}

impl NcCase {
    pub fn s1(self, ctx: &FieldCtx, l: usize) -> LinPoly {
        let m = ctx.m();
        match self {
            NcCase::Zero => LinPoly::zero(m),
            NcCase::Monomial { k } => LinPoly::monomial(m, k % m, FieldElem::ONE),
            NcCase::OneMinusG { k } => LinPoly::identity(m).one_minus_g_pow(ctx, l, k),
        }
    }
}

/// Claimed `Z_1, .., Z_n` for S2 over `q = p^{pl}` with `mu_C = 1`.
pub fn s2_upper_series_claim(ctx: &FieldCtx, l: usize, case: NcCase) -> Result<Vec<LevelClaim>> {
    let p = ctx.p() as usize;
    let m = ctx.m();
    if p == 2 || m != p * l {
        return Err(Error::InvalidParams(format!("need q = p^(pl) with p odd, got {}", ctx.spec_string())));
    }
    let r = |i: usize| r_space(ctx, l, i);
    let full = Subspace::full(ctx.p(), m);
    let zero = Subspace::zero(ctx.p(), m);
    let lvl = |a: Subspace, b: Subspace, c: Subspace| LevelClaim { a, b, c };
    let mut out: Vec<LevelClaim> = (1..=p).map(|i| lvl(r(p - i), zero.clone(), zero.clone())).collect();
    match case {
        NcCase::Zero => {
            out.extend((1..=p).map(|i| lvl(full.clone(), r(p - i), r(p - i))));
        }
        NcCase::Monomial { k } => {
            if k % l == 0 {
                return Err(Error::InvalidParams(format!("l = {l} divides k = {k}")));
            }
            out.extend((1..=p).map(|i| lvl(full.clone(), r(p - i), zero.clone())));
            out.extend((1..=p).map(|i| lvl(full.clone(), full.clone(), r(p - i))));
        }
        NcCase::OneMinusG { k } => {
            if k == 0 || k >= p {
                return Err(Error::InvalidParams(format!("k = {k} outside 1..p-1")));
            }
            out.extend((1..=p - k).map(|i| lvl(full.clone(), r(p - i), zero.clone())));
            out.extend((1..=k).map(|j| lvl(full.clone(), r(k - j), r(p - j))));
            out.extend((1..=p - k).map(|j| lvl(full.clone(), full.clone(), r(p - k - j))));
        }
    }
    Ok(out)
}

/// The claim with every level moved up by one: `Z~_i = Z_{i-1}`.
pub fn shifted_claim(ctx: &FieldCtx, claim: &[LevelClaim]) -> Vec<LevelClaim> {
    let mut out = vec![LevelClaim::trivial(ctx)];
    out.extend(claim.iter().cloned());
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelReport {
    pub level: usize,
    pub claim: String,
    /// Sampled products and inverses stay inside the level.
    pub closed: bool,
    /// `[g, x]` lies in the previous level for sampled `g` and all generators.
    pub central: bool,
    /// Sampled elements outside the level have a commutator escaping the
    /// previous one. `None` when nothing lies outside.
    pub maximal: Option<bool>,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClaimReport {
    pub samples: u64,
    pub seed: u64,
    pub levels: Vec<LevelReport>,
    /// The last level is the whole group.
    pub reaches_group: bool,
    pub passed: bool,
    pub first_failure: Option<usize>,
}

/// Checks `claim[i-1]` as `Z_i` on `samples` elements per level: closure,
/// centrality modulo the previous level, and maximality.
pub fn verify_central_series_claim(spec: &GroupSpec, claim: &[LevelClaim], samples: u64, seed: u64) -> ClaimReport {
    let ctx = spec.ctx();
    let gens = spec.generators();
    let trivial = LevelClaim::trivial(ctx);
    let levels: Vec<LevelReport> = (0..claim.len())
        .into_par_iter()
        .map(|i| {
            let prev = if i == 0 { &trivial } else { &claim[i - 1] };
            let cur = &claim[i];
            let next = claim.get(i + 1);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            check_level(spec, &gens, prev, cur, next, samples, &mut rng, i + 1)
        })
        .collect();
    let reaches_group = claim.last().is_some_and(|c| c.is_full(ctx));
    let first_failure = levels
        .iter()
        .find(|r| !(r.closed && r.central && r.maximal != Some(false)))
        .map(|r| r.level);
    ClaimReport {
        samples,
        seed,
        passed: first_failure.is_none() && reaches_group,
        levels,
        reaches_group,
        first_failure,
    }
}

#[allow(clippy::too_many_arguments)]
fn check_level(
    spec: &GroupSpec,
    gens: &[GroupElem],
    prev: &LevelClaim,
    cur: &LevelClaim,
    next: Option<&LevelClaim>,
    samples: u64,
    rng: &mut ChaCha8Rng,
    level: usize,
) -> LevelReport {
    let ctx = spec.ctx();
    let mut witness = None;
    let mut closed = true;
    let mut central = true;
    for _ in 0..samples {
        let g = spec.elem_at_point(cur.sample(ctx, rng));
        let h = spec.elem_at_point(cur.sample(ctx, rng));
        if closed {
            let gh = g_mul(ctx, &g, &h);
            let gi = g_inv(ctx, &g);
            if !cur.contains(ctx, &gh) || !cur.contains(ctx, &gi) {
                closed = false;
                witness.get_or_insert_with(|| format!("not closed at {} * {}", g.display(ctx), h.display(ctx)));
            }
        }
        if central {
            if let Some(x) = gens.iter().find(|x| !prev.contains(ctx, &commutator(ctx, &g, x))) {
                central = false;
                witness.get_or_insert_with(|| {
                    format!("[{}, {}] leaves the previous level", g.display(ctx), x.display(ctx))
                });
            }
        }
        if !closed && !central {
            break;
        }
    }
    // maximality: elements just above, and uniform ones, outside `cur`
    let outside = !cur.is_full(ctx);
    let maximal = outside.then(|| {
        let above = next.filter(|n| n.log_order() > cur.log_order());
        let mut ok = true;
        let mut tried = 0;
        let mut attempts = 0u64;
        while tried < samples && attempts < 20 * samples {
            attempts += 1;
            let pt = match (above, attempts % 2) {
                (Some(n), 0) => n.sample(ctx, rng),
                _ => [ctx.random(rng), ctx.random(rng), ctx.random(rng)],
            };
            let g = spec.elem_at_point(pt);
            if cur.contains(ctx, &g) {
                continue;
            }
            tried += 1;
            if gens.iter().all(|x| prev.contains(ctx, &commutator(ctx, &g, x))) {
                ok = false;
                witness.get_or_insert_with(|| format!("{} is central modulo the previous level", g.display(ctx)));
                break;
            }
        }
        ok
    });
    LevelReport {
        level,
        claim: cur.describe(),
        closed,
        central,
        maximal,
        witness,
    }
}

/// Whether each claimed level equals the exact upper series term.
pub fn compare_claim_exact(ctx: &FieldCtx, claim: &[LevelClaim], upper: &CentralSeries) -> Vec<bool> {
    claim
        .iter()
        .enumerate()
        .map(|(i, c)| match upper.terms.get(i + 1).and_then(|t| t.as_ref()) {
            Some(z) => {
                let size = (ctx.p() as u64).pow(c.log_order() as u32);
                size == z.order() as u64 && z.iter().all(|g| c.contains(ctx, &g))
            }
            None => false,
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Thompson subgroup

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum ThompsonResult {
    /// `J(G) = {g_{a,b,0} : theta = 1}` of the given order.
    Certified { order: u64 },
    Unknown { reason: String, witnesses: Vec<String> },
}

#[derive(Clone, Debug, Serialize)]
pub struct ThompsonReport {
    /// Order of `A = {g_{a,b,0} : theta_{a,b,0} = 1}`.
    pub candidate_order: u64,
    pub candidate_abelian: bool,
    /// Largest `|C_G(x)|` over `x` with nontrivial Frobenius part.
    pub max_centralizer_outside_kernel: u64,
    /// Largest `|C_F(x)|` over `x` in `F \ A`, `F` the trivial-Frobenius part.
    pub max_centralizer_in_kernel: u64,
    pub result: ThompsonResult,
}

impl ThompsonReport {
    pub fn order(&self) -> Option<u64> {
        match self.result {
            ThompsonResult::Certified { order } => Some(order),
            ThompsonResult::Unknown { .. } => None,
        }
    }
}

/// Certifies `J(G) = A` when `A` is an abelian subgroup of order `N` and no
/// abelian subgroup of order `>= N` can contain an element outside `A`:
/// `|C_G(x)| < N` for `x` with nontrivial Frobenius part and `|C_F(x)| < N`
/// for `x` in `F \ A`, where `F` is the kernel of the Frobenius part. An `x`
/// whose centralizer has order exactly `N` is excluded when that centralizer
/// is nonabelian.
pub fn thompson(spec: &GroupSpec, universe: &SubgroupSet) -> Result<ThompsonReport> {
    let ctx = spec.ctx();
    let all: Vec<GroupElem> = universe.iter().collect();
    let in_a = |g: &GroupElem| g.c.is_zero() && g.f == Frob::ID;
    let a: Vec<GroupElem> = all.iter().copied().filter(in_a).collect();
    let n = a.len() as u64;
    let a_set = from_elements(ctx, a.iter().copied(), false)?;
    let closed = a
        .par_iter()
        .all(|g| a.iter().all(|h| a_set.contains(&g_mul(ctx, g, h))));
    let abelian = a
        .par_iter()
        .all(|g| a.iter().all(|h| g_mul(ctx, g, h) == g_mul(ctx, h, g)));
    let kernel: Vec<GroupElem> = all.iter().copied().filter(|g| g.f == Frob::ID).collect();
    let count = |x: &GroupElem, within: &[GroupElem]| -> u64 {
        let mut c = 0;
        for h in within {
            if g_mul(ctx, x, h) == g_mul(ctx, h, x) {
                c += 1;
                if c >= n {
                    break;
                }
            }
        }
        c
    };
    let outer: Vec<(GroupElem, u64)> = all
        .par_iter()
        .filter(|g| g.f != Frob::ID)
        .map(|x| (*x, count(x, &all)))
        .collect();
    let inner: Vec<(GroupElem, u64)> = kernel
        .par_iter()
        .filter(|g| !in_a(g))
        .map(|x| (*x, count(x, &kernel)))
        .collect();
    let max_out = outer.iter().map(|x| x.1).max().unwrap_or(0);
    let max_in = inner.iter().map(|x| x.1).max().unwrap_or(0);
    // An abelian subgroup of order >= N through x lies in C(x); when |C(x)| = N
    // it must be C(x) itself, so a nonabelian C(x) of order N excludes x.
    let kernel_ref = &kernel;
    let blocking = |x: &GroupElem, within: &[GroupElem]| -> Option<String> {
        let cent: Vec<GroupElem> = within
            .iter()
            .copied()
            .filter(|h| g_mul(ctx, x, h) == g_mul(ctx, h, x))
            .collect();
        let order = cent.len() as u64;
        if order > n {
            return Some(format!("{} has centralizer order {order} > {n}", x.display(ctx)));
        }
        let comm = cent
            .iter()
            .all(|g| cent.iter().all(|h| g_mul(ctx, g, h) == g_mul(ctx, h, g)));
        comm.then(|| format!("{} has an abelian centralizer of order {n}", x.display(ctx)))
    };
    let outer_block: Vec<String> = outer
        .par_iter()
        .filter(|x| x.1 >= n)
        .filter_map(|(x, _)| blocking(x, &all))
        .collect();
    let inner_block: Vec<String> = if outer_block.is_empty() {
        inner
            .par_iter()
            .filter(|x| x.1 >= n)
            .filter_map(|(x, _)| blocking(x, kernel_ref))
            .collect()
    } else {
        Vec::new()
    };
    let mut witnesses: Vec<String> = outer_block.into_iter().chain(inner_block).take(5).collect();
    let result = if !closed || !abelian {
        witnesses.clear();
        ThompsonResult::Unknown {
            reason: format!("candidate set is {}", if closed { "not abelian" } else { "not a subgroup" }),
            witnesses,
        }
    } else if a.len() == all.len() || witnesses.is_empty() {
        ThompsonResult::Certified { order: n }
    } else {
        ThompsonResult::Unknown {
            reason: format!("centralizer bound {n} not met"),
            witnesses,
        }
    };
    Ok(ThompsonReport {
        candidate_order: n,
        candidate_abelian: abelian && closed,
        max_centralizer_outside_kernel: max_out,
        max_centralizer_in_kernel: max_in,
        result,
    })
}

// ---------------------------------------------------------------------------
// regularity and generation

#[derive(Clone, Debug, Serialize)]
pub struct RegularityReport {
    pub mode: String,
    /// Order of the group generated by the basis elements (exhaustive mode).
    pub group_order: Option<u64>,
    pub orbit_size: u64,
    pub points: u64,
    pub injective: bool,
    /// Sampled (element, line) pairs whose image is a line of the same kind.
    pub lines_checked: u64,
    pub lines_preserved: Option<bool>,
    pub passed: bool,
    pub witness: Option<String>,
}

/// Exhaustive: closes the basis generators (cap `q^3`), and checks that the
/// result is the spec's element set and that the origin's orbit has `q^3`
/// distinct points.
pub fn verify_point_regular(spec: &GroupSpec, qp: Option<&Quadrangle>, line_samples: u64, seed: u64) -> Result<RegularityReport> {
    let ctx = spec.ctx();
    let q3 = spec.order();
    if q3 > SMALL_ORDER_CAP {
        return Err(Error::cap(SMALL_ORDER_CAP as usize, "exhaustive regularity check"));
    }
    let origin = [FieldElem::ZERO; 3];
    let mut witness = None;
    let (group_order, orbit_size, injective) = match closure(ctx, &spec.generators(), q3 as usize) {
        Ok(set) => {
            let orbit: FxHashSet<[FieldElem; 3]> = set.iter().map(|g| act(ctx, &g, origin)).collect();
            if let Some(g) = set.iter().find(|g| !spec.contains(g)) {
                witness = Some(format!("{} is generated but is not g at its point", g.display(ctx)));
            }
            let inj = orbit.len() == set.order();
            (Some(set.order() as u64), orbit.len() as u64, inj)
        }
        Err(Error::CapExceeded { .. }) => {
            witness = Some(format!("the generated group exceeds {q3} elements"));
            (None, 0, false)
        }
        Err(e) => return Err(e),
    };
    let (lines_checked, lines_preserved) = match qp {
        Some(qp) => {
            let (n, ok, w) = check_lines(spec, qp, line_samples, seed);
            if let Some(w) = w {
                witness.get_or_insert(w);
            }
            (n, Some(ok))
        }
        None => (0, None),
    };
    let passed = witness.is_none() && group_order == Some(q3) && orbit_size == q3 && injective && lines_preserved != Some(false);
    Ok(RegularityReport {
        mode: "exhaustive".into(),
        group_order,
        orbit_size,
        points: q3,
        injective,
        lines_checked,
        lines_preserved,
        passed,
        witness,
    })
}

fn check_lines(spec: &GroupSpec, qp: &Quadrangle, n: u64, seed: u64) -> (u64, bool, Option<String>) {
    let ctx = spec.ctx();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n {
        let g = spec.random_elem(&mut rng);
        let li = rng.gen_range(0..qp.num_lines());
        match qp.image_of_line(ctx, &g, li) {
            Some(img) if qp.line_kind(img) == qp.line_kind(li) => {}
            _ => {
                return (n, false, Some(format!("{} does not map line {li} to a line of its kind", g.display(ctx))));
            }
        }
    }
    (n, true, None)
}

/// Sampled regularity for large `q`: products of sampled elements are the
/// spec's elements over the image point, the action composes, and distinct
/// sampled triples have distinct images.
pub fn verify_point_regular_sampled(spec: &GroupSpec, n: u64, seed: u64) -> RegularityReport {
    let ctx = spec.ctx();
    let origin = [FieldElem::ZERO; 3];
    let chunks = 64u64;
    let per = n.div_ceil(chunks);
    type Chunk = (FxHashSet<[FieldElem; 3]>, FxHashSet<[FieldElem; 3]>, Option<String>);
    let results: Vec<Chunk> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let mut pts = FxHashSet::default();
            let mut imgs = FxHashSet::default();
            let mut witness = None;
            for _ in 0..per.min(n.saturating_sub(chunk * per)) {
                let g = spec.random_elem(&mut rng);
                let h = spec.random_elem(&mut rng);
                let gh = g_mul(ctx, &g, &h);
                let img = act(ctx, &g, origin);
                pts.insert(g.point());
                imgs.insert(img);
                if witness.is_none() && (act(ctx, &h, img) != act(ctx, &gh, origin) || !spec.contains(&gh)) {
                    witness = Some(format!("{} * {} is not in the group", g.display(ctx), h.display(ctx)));
                }
            }
            (pts, imgs, witness)
        })
        .collect();
    let mut pts = FxHashSet::default();
    let mut imgs = FxHashSet::default();
    let mut witness = None;
    for (p, i, w) in results {
        pts.extend(p);
        imgs.extend(i);
        if witness.is_none() {
            witness = w;
        }
    }
    let injective = pts.len() == imgs.len();
    RegularityReport {
        mode: format!("sample:{n}:seed{seed}"),
        group_order: None,
        orbit_size: imgs.len() as u64,
        points: spec.order(),
        injective,
        lines_checked: 0,
        lines_preserved: None,
        passed: injective && witness.is_none(),
        witness,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GenerationReport {
    /// Order of the group generated by the `a`- and `b`-basis elements.
    pub ab_order: u64,
    /// Every element of that group has `c = 0`.
    pub ab_in_plane: bool,
    /// Size of the `c`-projection of the group generated by all basis elements.
    pub c_values: u64,
    pub generates: bool,
}

/// Certifies that the `3m` basis elements generate all `q^3` elements: the
/// `a`/`b` generators close to the `q^2` elements with `c = 0`, and the
/// `c`-projection of the full generated group is `F_q`.
pub fn generation_certificate(spec: &GroupSpec, cap: usize) -> Result<GenerationReport> {
    let ctx = spec.ctx();
    let m = ctx.m();
    let q = ctx.q() as u64;
    let gens = spec.generators();
    let ab = closure(ctx, &gens[..2 * m], cap)?;
    let ab_in_plane = ab.iter().all(|g| g.c.is_zero());
    let mut seen = vec![false; q as usize];
    seen[0] = true;
    let mut stack = vec![FieldElem::ZERO];
    while let Some(c) = stack.pop() {
        for g in &gens {
            let n = ctx.add(ctx.frob_apply(g.f, c), g.c);
            if !seen[n.index()] {
                seen[n.index()] = true;
                stack.push(n);
            }
        }
    }
    let c_values = seen.iter().filter(|&&s| s).count() as u64;
    Ok(GenerationReport {
        ab_order: ab.order() as u64,
        ab_in_plane,
        c_values,
        generates: ab.order() as u64 == q * q && ab_in_plane && c_values == q,
    })
}

// ---------------------------------------------------------------------------
// summary report

#[derive(Clone, Debug, Serialize)]
pub struct InvariantReport {
    pub group: String,
    pub order: u64,
    pub exponent: ExponentReport,
    pub center: Option<CoordinateSummary>,
    pub lower_series: Option<SeriesSummary>,
    pub upper_series: Option<SeriesSummary>,
    pub nilpotency_class: Option<usize>,
    pub thompson: Option<ThompsonReport>,
    /// Entries that were not computed, with the reason.
    pub skipped: Vec<String>,
    pub seed: u64,
    #[serde(skip)]
    pub elapsed_ms: u128,
}

#[derive(Clone, Debug)]
pub struct InvariantOptions {
    pub seed: u64,
    pub exponent_samples: u64,
    pub series_cap: usize,
    pub thompson: bool,
}

impl Default for InvariantOptions {
    fn default() -> Self {
        InvariantOptions {
            seed: 42,
            exponent_samples: EXPONENT_SAMPLES,
            series_cap: crate::closure::DEFAULT_CAP,
            thompson: true,
        }
    }
}

/// Everything computable at the size of `spec`: exact invariants up to
/// `q = 27`, sampled exponent and lower series beyond.
pub fn compute_invariants(spec: &GroupSpec, opts: &InvariantOptions) -> Result<InvariantReport> {
    let start = Instant::now();
    let small = spec.order() <= SMALL_ORDER_CAP;
    let mut skipped = Vec::new();
    let universe = if small { Some(materialize(spec, SMALL_ORDER_CAP)?) } else { None };
    let exponent = match &universe {
        Some(_) => exponent(spec, SMALL_ORDER_CAP)?,
        None => exponent_sampled(spec, opts.exponent_samples, opts.seed)?,
    };
    let center = match &universe {
        Some(u) => Some(summarize(spec.ctx(), &center(spec, u)?)),
        None => {
            skipped.push("center: group too large to materialize".into());
            None
        }
    };
    let lower = match lower_central_series(spec, opts.series_cap) {
        Ok(s) => Some(s.summary()),
        Err(Error::CapExceeded { cap, context }) => {
            skipped.push(format!(
                "lower series: cap {cap} exceeded{}",
                context.map(|c| format!(" at {c}")).unwrap_or_default()
            ));
            None
        }
        Err(e) => return Err(e),
    };
    let upper = match &universe {
        Some(u) => Some(upper_central_series_small(spec, u)?.summary()),
        None => {
            skipped.push("upper series: group too large to materialize".into());
            None
        }
    };
    let thompson = match &universe {
        Some(u) if opts.thompson => Some(thompson(spec, u)?),
        Some(_) => None,
        None => {
            skipped.push("thompson: group too large to materialize".into());
            None
        }
    };
    let nilpotency_class = lower.as_ref().map(|s| s.class).or(upper.as_ref().map(|s| s.class));
    Ok(InvariantReport {
        group: spec.label().to_string(),
        order: spec.order(),
        exponent,
        center,
        lower_series: lower,
        upper_series: upper,
        nilpotency_class,
        thompson,
        skipped,
        seed: opts.seed,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{Construction, ConstructionParams, Variant};
    use crate::gf::FieldCtx;
    use std::sync::Arc;

    fn ctx(s: &str) -> Arc<FieldCtx> {
        Arc::new(FieldCtx::parse(s).unwrap())
    }

    fn build(k: &Arc<FieldCtx>, v: Variant, s1: &str) -> GroupSpec {
        let s1 = LinPoly::parse(k, s1).unwrap();
        Construction::build(k.clone(), ConstructionParams::new(v).with_s1(s1)).unwrap().spec
    }

    #[test]
    fn linear_c1_is_class_two_heisenberg_like() {
        // T = 0 still gives a nonabelian group: [g_{0,b,0}, g_{0,0,z}] moves a.
        let k = ctx("5");
        let g = build(&k, Variant::C1, "0");
        let u = materialize(&g, 1000).unwrap();
        let z = center(&g, &u).unwrap();
        assert_eq!(z.order(), 5);
        assert!(z.iter().all(|e| e.b.is_zero() && e.c.is_zero()));
        assert_eq!(lower_central_series(&g, 1000).unwrap().class, 2);
        assert_eq!(upper_central_series_small(&g, &u).unwrap().class, 2);
        assert_eq!(exponent(&g, 1000).unwrap().exponent, 5);
        // every abelian subgroup of order 25 centralizes an element outside A
        let t = thompson(&g, &u).unwrap();
        assert!(t.candidate_abelian);
        assert_eq!(t.order(), None);
    }

    #[test]
    fn generator_center_matches_all_pairs_at_9() {
        let k = ctx("3^2");
        let g = build(&k, Variant::C1, "X^3");
        let u = materialize(&g, 1000).unwrap();
        assert_eq!(center(&g, &u).unwrap().sorted_keys(), center_all_pairs(&g, &u).unwrap().sorted_keys());
    }

    #[test]
    fn lower_series_matches_all_pairs_at_9() {
        let k = ctx("3^2");
        for s in ["X", "X^3", "[0,1]*X + X^3"] {
            let g = build(&k, Variant::C1, s);
            let u = materialize(&g, 1000).unwrap();
            let a = lower_central_series(&g, 1000).unwrap();
            let b = lower_central_series_all_pairs(&g, &u, 1000).unwrap();
            assert_eq!(a.orders, b.orders, "{s}");
            for (x, y) in a.terms.iter().zip(&b.terms).skip(1) {
                assert_eq!(x.as_ref().unwrap().sorted_keys(), y.as_ref().unwrap().sorted_keys());
            }
        }
    }

    #[test]
    fn broken_spec_is_not_regular() {
        let k = ctx("5");
        let g = GroupSpec::from_fn(k.clone(), "broken", |ctx, _, _, c| (ctx.mul(c, c), Frob::ID));
        let r = verify_point_regular(&g, None, 0, 1).unwrap();
        assert!(!r.passed);
        let good = build(&k, Variant::C1, "X");
        assert!(verify_point_regular(&good, None, 0, 1).unwrap().passed);
    }

    #[test]
    fn generation_certificate_at_27() {
        let k = ctx("3^3");
        let g = build(&k, Variant::S3, "X^3+X^9");
        let r = generation_certificate(&g, 1 << 20).unwrap();
        assert!(r.generates, "{r:?}");
    }

    #[test]
    fn r_spaces_shrink_by_l() {
        let k = ctx("3^6");
        let dims: Vec<usize> = (0..=3).map(|i| r_space(&k, 2, i).dim()).collect();
        assert_eq!(dims, vec![6, 4, 2, 0]);
    }

    #[test]
    fn claim_shapes() {
        let k = ctx("3^6");
        assert_eq!(s2_upper_series_claim(&k, 2, NcCase::Zero).unwrap().len(), 6);
        assert_eq!(s2_upper_series_claim(&k, 2, NcCase::Monomial { k: 1 }).unwrap().len(), 9);
        assert_eq!(s2_upper_series_claim(&k, 2, NcCase::OneMinusG { k: 1 }).unwrap().len(), 8);
        assert_eq!(s2_upper_series_claim(&k, 2, NcCase::OneMinusG { k: 2 }).unwrap().len(), 7);
        for case in [NcCase::Zero, NcCase::Monomial { k: 1 }, NcCase::OneMinusG { k: 2 }] {
            let c = s2_upper_series_claim(&k, 2, case).unwrap();
            assert!(c.last().unwrap().is_full(&k));
            assert!(c.windows(2).all(|w| w[0].log_order() < w[1].log_order()));
        }
        assert!(s2_upper_series_claim(&k, 2, NcCase::Monomial { k: 2 }).is_err());
    }
}
