//! Conjugates a PreS3 group into S3 form and compares the two point by point.

use std::sync::Arc;

use payne_quad::cli::compare_specs;
use payne_quad::constructions::{conjugate_spec, normal_form};
use payne_quad::linpoly::LinPoly;
use payne_quad::{Construction, ConstructionParams, FieldCtx, Variant};

fn main() -> payne_quad::Result<()> {
    let k = Arc::new(FieldCtx::parse("3^3")?);
    let params = ConstructionParams::new(Variant::PreS3)
        .with_s1(LinPoly::parse(&k, "X^3 + X^9")?)
        .with_alpha(k.scalar(2));
    let pre = Construction::build(k.clone(), params)?;
    let (h, target) = normal_form(&pre)?;
    let conj = conjugate_spec(&pre.spec, h)?;
    let s3 = Construction::build(k.clone(), target)?;
    let (n, mismatch) = compare_specs(&conj, &s3.spec, 0, 0)?;
    println!("conjugator {}", h.display(&k));
    println!("normal form {}", s3.params_json()["config"]);
    println!("{n} points compared, mismatch: {mismatch:?}");
    Ok(())
}
