//! Subgroup closure by breadth-first search over canonical element keys.

use rayon::prelude::*;
use rustc_hash::FxHashSet;

use crate::error::{Error, Result};
use crate::gf::FieldCtx;
use crate::group::{conjugate, g_mul, GroupElem};

/// Default ceiling on subgroup sizes.
pub const DEFAULT_CAP: usize = 4_000_000;

/// A materialized subgroup: every element key plus the generators that were
/// actually needed to reach it.
#[derive(Clone, Debug)]
pub struct SubgroupSet {
    keys: FxHashSet<u64>,
    elements: Vec<u64>,
    generators: Vec<GroupElem>,
}

impl SubgroupSet {
    pub fn trivial() -> Self {
        let id = GroupElem::IDENTITY.key();
        let mut keys = FxHashSet::default();
        keys.insert(id);
        SubgroupSet {
            keys,
            elements: vec![id],
            generators: Vec::new(),
        }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[GroupElem] {
        &self.generators
    }

    #[inline]
    pub fn contains(&self, g: &GroupElem) -> bool {
        self.keys.contains(&g.key())
    }

    #[inline]
    pub fn contains_key(&self, k: u64) -> bool {
        self.keys.contains(&k)
    }

    /// Elements in discovery order (identity first).
    pub fn iter(&self) -> impl Iterator<Item = GroupElem> + '_ {
        self.elements.iter().map(|&k| GroupElem::from_key(k))
    }

    pub fn keys(&self) -> &[u64] {
        &self.elements
    }

    /// Sorted keys, independent of discovery order.
    pub fn sorted_keys(&self) -> Vec<u64> {
        let mut v = self.elements.clone();
        v.sort_unstable();
        v
    }

    pub fn is_subset_of(&self, other: &SubgroupSet) -> bool {
        self.elements.iter().all(|k| other.contains_key(*k))
    }

    fn push(&mut self, g: GroupElem, cap: usize) -> Result<bool> {
        if self.keys.insert(g.key()) {
            if self.elements.len() >= cap {
                return Err(Error::cap(cap, "subgroup closure"));
            }
            self.elements.push(g.key());
            Ok(true)
        } else {
            Ok(false)
        }
    }

    /// Enlarges the subgroup by `g`. Returns false when `g` was already in it.
    pub fn add_generator(&mut self, ctx: &FieldCtx, g: GroupElem, cap: usize) -> Result<bool> {
        if self.contains(&g) {
            return Ok(false);
        }
        self.generators.push(g);
        // old elements times the new generator, then close under all of them
        let old = self.elements.len();
        let mut frontier = old;
        for i in 0..old {
            let e = GroupElem::from_key(self.elements[i]);
            self.push(g_mul(ctx, &e, &g), cap)?;
        }
        while frontier < self.elements.len() {
            let e = GroupElem::from_key(self.elements[frontier]);
            frontier += 1;
            for s in 0..self.generators.len() {
                let n = g_mul(ctx, &e, &self.generators[s]);
                self.push(n, cap)?;
            }
        }
        Ok(true)
    }
}

/// `<generators>`, erroring once more than `cap` elements are found.
pub fn closure(ctx: &FieldCtx, generators: &[GroupElem], cap: usize) -> Result<SubgroupSet> {
    let mut set = SubgroupSet::trivial();
    for g in generators {
        set.add_generator(ctx, *g, cap)?;
    }
    Ok(set)
}

/// Closes `set` under conjugation by `ambient_gens`, giving the normal closure
/// in `<ambient_gens>`.
pub fn normalize(ctx: &FieldCtx, set: &mut SubgroupSet, ambient_gens: &[GroupElem], cap: usize) -> Result<()> {
    let mut i = 0;
    while i < set.generators.len() {
        let s = set.generators[i];
        for x in ambient_gens {
            let c = conjugate(ctx, &s, x);
            set.add_generator(ctx, c, cap)?;
        }
        i += 1;
    }
    Ok(())
}

/// All `h` in `universe` commuting with `g`.
pub fn centralizer(ctx: &FieldCtx, g: &GroupElem, universe: &SubgroupSet) -> SubgroupSet {
    let keys: Vec<u64> = universe
        .elements
        .par_iter()
        .copied()
        .filter(|&k| {
            let h = GroupElem::from_key(k);
            g_mul(ctx, g, &h) == g_mul(ctx, &h, g)
        })
        .collect();
    SubgroupSet {
        keys: keys.iter().copied().collect(),
        elements: keys,
        generators: Vec::new(),
    }
}

/// Builds a set from explicit elements, checking closure under products of
/// the given elements with each other when `verify` is set.
pub fn from_elements(
    ctx: &FieldCtx,
    elements: impl IntoIterator<Item = GroupElem>,
    verify: bool,
) -> Result<SubgroupSet> {
    let mut set = SubgroupSet {
        keys: FxHashSet::default(),
        elements: Vec::new(),
        generators: Vec::new(),
    };
    set.push(GroupElem::IDENTITY, usize::MAX)?;
    for g in elements {
        set.push(g, usize::MAX)?;
    }
    if verify {
        let bad = set.elements.par_iter().find_any(|&&k| {
            let g = GroupElem::from_key(k);
            set.elements
                .iter()
                .any(|&l| !set.contains(&g_mul(ctx, &g, &GroupElem::from_key(l))))
        });
        if let Some(k) = bad {
            return Err(Error::SelfCheckFailed(format!(
                "element set not closed at {}",
                GroupElem::from_key(*k).display(ctx)
            )));
        }
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::{FieldElem, Frob};
    use crate::group::GroupSpec;
    use std::sync::Arc;

    fn c1(spec: &str, s1_coeff: u16) -> GroupSpec {
        let ctx = Arc::new(FieldCtx::parse(spec).unwrap());
        GroupSpec::from_fn(ctx, "C1", move |ctx, _, _, c| (ctx.mul(FieldElem(s1_coeff), c), Frob::ID))
    }

    #[test]
    fn trivial_closure() {
        let spec = c1("5", 1);
        let s = closure(spec.ctx(), &[], 10).unwrap();
        assert_eq!(s.order(), 1);
        assert!(s.contains(&GroupElem::IDENTITY));
    }

    #[test]
    fn ga_and_full_group() {
        let spec = c1("5", 1);
        let ctx = spec.ctx();
        let ga = closure(ctx, &[spec.elem_at(FieldElem::ONE, FieldElem::ZERO, FieldElem::ZERO)], 1000).unwrap();
        assert_eq!(ga.order(), 5);
        let g = closure(ctx, &spec.generators(), 1000).unwrap();
        assert_eq!(g.order(), 125);
        for e in spec.enumerate(1000).unwrap() {
            assert!(g.contains(&e));
        }
    }

    #[test]
    fn cap_is_enforced() {
        let spec = c1("5", 1);
        let err = closure(spec.ctx(), &spec.generators(), 50).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { cap: 50, .. }));
    }

    #[test]
    fn centralizer_of_identity_is_everything() {
        let spec = c1("5", 1);
        let g = closure(spec.ctx(), &spec.generators(), 1000).unwrap();
        let c = centralizer(spec.ctx(), &GroupElem::IDENTITY, &g);
        assert_eq!(c.order(), 125);
    }

    #[test]
    fn normal_closure_contains_conjugates() {
        let spec = c1("3^2", 1);
        let ctx = spec.ctx();
        let gens = spec.generators();
        let mut n = closure(ctx, &[gens[4]], 1000).unwrap();
        normalize(ctx, &mut n, &gens, 1000).unwrap();
        let all = closure(ctx, &gens, 1000).unwrap();
        for x in all.iter() {
            for s in n.iter() {
                assert!(n.contains(&conjugate(ctx, &s, &x)));
            }
        }
    }
}
