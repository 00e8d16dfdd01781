mod common;

use std::sync::{Arc, OnceLock};

use proptest::prelude::*;

use common::{build, field};
use payne_quad::group::{act, g_inv, g_mul, GroupElem};
use payne_quad::linpoly::LinPoly;
use payne_quad::{Construction, ConstructionConfig, ConstructionParams, FieldCtx, FieldElem, GroupSpec, Variant};

const FIELDS: [&str; 6] = ["5^1", "3^2", "2^4", "3^3", "5^2", "3^6"];

fn fields() -> &'static Vec<Arc<FieldCtx>> {
    static F: OnceLock<Vec<Arc<FieldCtx>>> = OnceLock::new();
    F.get_or_init(|| FIELDS.iter().map(|s| field(s)).collect())
}

fn groups() -> &'static Vec<Construction> {
    static G: OnceLock<Vec<Construction>> = OnceLock::new();
    G.get_or_init(|| {
        let k27 = field("3^3");
        vec![
            build(&field("5^2"), Variant::C1, Some("X^5")),
            build(&field("2^4"), Variant::C2Even, None),
            build(&k27, Variant::S2, Some("X^3")),
            build(&k27, Variant::S3, Some("X^3 + X^9")),
            build(&k27, Variant::PreS2, None),
            build(&k27, Variant::PreS3, Some("X")),
            build(&field("3^9"), Variant::S4, None),
        ]
    })
}

fn elem(ctx: &FieldCtx, x: u32) -> FieldElem {
    FieldElem((x % ctx.q()) as u16)
}

fn gelem(spec: &GroupSpec, x: [u32; 3]) -> GroupElem {
    let k = spec.ctx();
    spec.elem_at(elem(k, x[0]), elem(k, x[1]), elem(k, x[2]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn field_is_a_field(f in 0..FIELDS.len(), a: u32, b: u32, c: u32) {
        let k = &fields()[f];
        let (a, b, c) = (elem(k, a), elem(k, b), elem(k, c));
        prop_assert_eq!(k.mul(k.add(a, b), c), k.add(k.mul(a, c), k.mul(b, c)));
        prop_assert_eq!(k.mul(k.mul(a, b), c), k.mul(a, k.mul(b, c)));
        prop_assert_eq!(k.sub(k.add(a, b), b), a);
        if !a.is_zero() {
            prop_assert_eq!(k.mul(a, k.inv(a).unwrap()), FieldElem::ONE);
        }
        prop_assert_eq!(k.frob(k.mul(a, b), 1), k.mul(k.frob(a, 1), k.frob(b, 1)));
        prop_assert_eq!(k.frob(k.add(a, b), 1), k.add(k.frob(a, 1), k.frob(b, 1)));
        prop_assert_eq!(k.frob(a, k.m()), a);
    }

    #[test]
    fn artin_schreier_solutions_check(f in 0..FIELDS.len(), a: u32) {
        let k = &fields()[f];
        let m = k.m();
        for d in (1..=m).filter(|d| m.is_multiple_of(*d) && *d < m) {
            let alpha = elem(k, a);
            let tr = k.trace_rel(alpha, d).unwrap();
            match k.artin_schreier_solve(alpha, d) {
                Ok(beta) => {
                    prop_assert!(tr.is_zero());
                    prop_assert_eq!(k.sub(k.frob(beta, d), beta), alpha);
                }
                Err(_) => prop_assert!(!tr.is_zero()),
            }
        }
    }

    #[test]
    fn trace_dual_is_adjoint(f in 0..FIELDS.len(), coeffs in prop::collection::vec(any::<u32>(), 6), x: u32, y: u32) {
        let k = &fields()[f];
        let c: Vec<FieldElem> = coeffs[..k.m()].iter().map(|&c| elem(k, c)).collect();
        let p = LinPoly::new(k.m(), &c).unwrap();
        let d = p.trace_dual(k);
        let (x, y) = (elem(k, x), elem(k, y));
        prop_assert_eq!(k.trace(k.mul(p.eval(k, x), y)), k.trace(k.mul(x, d.eval(k, y))));
        prop_assert_eq!(d.trace_dual(k), p);
    }

    #[test]
    fn spec_elements_form_a_group(gi in 0..7usize, x: [u32; 3], y: [u32; 3], z: [u32; 3]) {
        let c = &groups()[gi];
        let (s, k) = (&c.spec, c.ctx());
        let (g, h, w) = (gelem(s, x), gelem(s, y), gelem(s, z));
        let gh = g_mul(k, &g, &h);
        prop_assert!(s.contains(&gh), "{} not in {}", gh.display(k), s.label());
        prop_assert!(s.contains(&g_inv(k, &g)));
        prop_assert_eq!(g_mul(k, &gh, &w), g_mul(k, &g, &g_mul(k, &h, &w)));
        prop_assert!(g_mul(k, &g, &g_inv(k, &g)).is_identity());
    }

    #[test]
    fn action_composes_left_to_right(gi in 0..7usize, x: [u32; 3], y: [u32; 3], pt: [u32; 3]) {
        let c = &groups()[gi];
        let (s, k) = (&c.spec, c.ctx());
        let (g, h) = (gelem(s, x), gelem(s, y));
        let pt = pt.map(|v| elem(k, v));
        prop_assert_eq!(act(k, &g_mul(k, &g, &h), pt), act(k, &h, act(k, &g, pt)));
        prop_assert_eq!(act(k, &g, [FieldElem::ZERO; 3]), g.point());
    }

    #[test]
    fn config_round_trips(gi in 0..7usize) {
        let c = &groups()[gi];
        let cfg = c.params.to_config(c.ctx());
        let text = serde_json::to_string(&cfg).unwrap();
        let back = ConstructionConfig::from_json(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        let params: ConstructionParams = back.params(c.ctx()).unwrap();
        prop_assert_eq!(params, c.params.clone());
    }
}
