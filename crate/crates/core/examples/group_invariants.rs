//! Exponent, center, central series and Thompson subgroup of S2 at q = 27,
//! and the lower central series of one table row at q = 3^6.

use std::sync::Arc;

use payne_quad::invariants::{compute_invariants, lower_central_series, InvariantOptions};
use payne_quad::linpoly::LinPoly;
use payne_quad::tables::TABLE_SERIES_CAP;
use payne_quad::{Construction, ConstructionParams, FieldCtx, Variant};

fn main() -> payne_quad::Result<()> {
    let k = Arc::new(FieldCtx::parse("3^3")?);
    let c = Construction::build(k.clone(), ConstructionParams::new(Variant::S2).with_s1(LinPoly::parse(&k, "X^3")?))?;
    let r = compute_invariants(&c.spec, &InvariantOptions::default())?;
    println!("{}", serde_json::to_string_pretty(&r).expect("serializes"));

    let k = Arc::new(FieldCtx::parse("3^6")?);
    let c = Construction::build(k.clone(), ConstructionParams::new(Variant::S2).with_s1(LinPoly::zero(6)))?;
    let s = lower_central_series(&c.spec, TABLE_SERIES_CAP)?;
    println!("S2 at q = 729 with S1 = 0: class {}, |gamma_i| = {:?}", s.class, s.orders);
    Ok(())
}
