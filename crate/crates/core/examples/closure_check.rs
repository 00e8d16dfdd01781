//! Builds an S3 group at q = 27 and checks the closure conditions and
//! regularity, then shows a deliberately broken spec failing.

use std::sync::Arc;

use payne_quad::group::{check_theorem_main, CheckMode};
use payne_quad::invariants::verify_point_regular;
use payne_quad::linpoly::LinPoly;
use payne_quad::{Construction, ConstructionParams, FieldCtx, FieldElem, Variant};

fn main() -> payne_quad::Result<()> {
    let k = Arc::new(FieldCtx::parse("3^3")?);
    let params = ConstructionParams::new(Variant::S3).with_s1(LinPoly::parse(&k, "X^3 + X^9")?);
    let c = Construction::build(k.clone(), params)?;
    let r = check_theorem_main(&c.spec, CheckMode::Sample { n: 200_000, seed: 1 }, u64::MAX)?;
    println!("{}: {} pairs, passed {}", c.spec.label(), r.pairs_checked, r.passed);
    let reg = verify_point_regular(&c.spec, None, 0, 1)?;
    println!("orbit of the origin: {} points, injective {}", reg.orbit_size, reg.injective);

    let k8 = Arc::new(FieldCtx::parse("2^3")?);
    let broken = ConstructionParams::new(Variant::C2Even)
        .with_f(vec![FieldElem::ZERO, FieldElem::ONE, FieldElem::ZERO])
        .unvalidated();
    let bad = Construction::build(k8, broken)?;
    let r = check_theorem_main(&bad.spec, CheckMode::Exhaustive, u64::MAX)?;
    if let Some(w) = r.witness {
        println!("broken spec fails `{}`: {} then {}", w.condition, w.first, w.second);
    }
    Ok(())
}
