//! Preset tables of nilpotency classes.

use std::fmt::Write as _;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::constructions::{Construction, ConstructionParams, Variant};
use crate::error::{Error, Result};
use crate::gf::FieldCtx;
use crate::invariants::lower_central_series;
use crate::linpoly::LinPoly;

/// Cap for the table's lower central series. The rows with `S_1` nonzero on
/// `F_q` reach `|gamma_2| = 3^15`.
pub const TABLE_SERIES_CAP: usize = 20_000_000;

#[derive(Clone, Debug, Serialize)]
pub struct TableRow {
    pub variant: Variant,
    /// `S_1` as listed.
    pub s1: String,
    /// The same polynomial with exponents written out.
    pub s1_expanded: String,
    pub expected_class: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct TableResult {
    pub row: TableRow,
    pub class: usize,
    pub gamma_orders: Vec<u64>,
    pub matches: bool,
    /// Within `[2p^e, 3p^e]`.
    pub in_bound: bool,
    #[serde(skip)]
    pub elapsed: Duration,
}

pub struct Preset {
    pub name: &'static str,
    pub field: &'static str,
    /// Subfield degree `l` (`g = Frob(l)`).
    pub l: usize,
    pub rows: Vec<TableRow>,
}

impl Preset {
    pub fn by_name(name: &str) -> Result<Preset> {
        match name {
            "ncodd-p3l2" => Ok(ncodd_p3l2()),
            other => Err(Error::InvalidParams(format!("unknown table preset {other:?} (known: ncodd-p3l2)"))),
        }
    }

    /// The lower bound `2p^e` and upper bound `3p^e` on the class, `p^e = p`.
    pub fn class_bounds(&self, ctx: &FieldCtx) -> (usize, usize) {
        let p = ctx.p() as usize;
        (2 * p, 3 * p)
    }
}

fn row(variant: Variant, s1: &str, s1_expanded: &str, expected_class: usize) -> TableRow {
    TableRow {
        variant,
        s1: s1.into(),
        s1_expanded: s1_expanded.into(),
        expected_class,
    }
}

/// `q = 3^6`, `l = 2`: S2 with `mu_C = 1`, S3 with `alpha = 0`, `mu_B = 1`.
pub fn ncodd_p3l2() -> Preset {
    Preset {
        name: "ncodd-p3l2",
        field: "3^6",
        l: 2,
        rows: vec![
            row(Variant::S2, "0", "0", 6),
            row(Variant::S2, "z^(3^k), l∤k (k=1)", "X^3", 9),
            row(Variant::S2, "z^(3^k), l|k (k=2)", "X^9", 8),
            row(Variant::S2, "(1-g)^k(z) (k=1)", "X + 2*X^9", 8),
            row(Variant::S2, "(1-g)^k(z) (k=2)", "X + X^9 + X^81", 7),
            row(Variant::S3, "0", "0", 6),
            row(Variant::S3, "z", "X", 8),
            row(Variant::S3, "z^(3^k)+z^(3^(6-k)) (k=1)", "X^3 + X^243", 9),
            row(Variant::S3, "(1-g)^(2k)(z^(3^(6-kl))) (k=1)", "X^81 + X + X^9", 7),
        ],
    }
}

/// Builds the row's group over `ctx` and computes its lower central series.
pub fn run_row(ctx: &Arc<FieldCtx>, preset: &Preset, row: &TableRow, cap: usize) -> Result<TableResult> {
    let start = Instant::now();
    let s1 = LinPoly::parse(ctx, &row.s1_expanded)?;
    let params = ConstructionParams::new(row.variant).with_s1(s1);
    let c = Construction::build(ctx.clone(), params)?;
    let series = lower_central_series(&c.spec, cap)?;
    let (lo, hi) = preset.class_bounds(ctx);
    Ok(TableResult {
        row: row.clone(),
        class: series.class,
        gamma_orders: series.orders.clone(),
        matches: series.class == row.expected_class,
        in_bound: (lo..=hi).contains(&series.class),
        elapsed: start.elapsed(),
    })
}

pub fn to_csv(results: &[TableResult]) -> String {
    let mut out = String::from("construction,S1,S1_expanded,expected_class,computed_class,match,in_bound,gamma_orders\n");
    for r in results {
        let orders: Vec<String> = r.gamma_orders.iter().map(|o| o.to_string()).collect();
        let _ = writeln!(
            out,
            "{},\"{}\",\"{}\",{},{},{},{},{}",
            r.row.variant,
            r.row.s1,
            r.row.s1_expanded,
            r.row.expected_class,
            r.class,
            r.matches,
            r.in_bound,
            orders.join(";")
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_rows_parse_and_satisfy_conditions() {
        let p = ncodd_p3l2();
        let ctx = Arc::new(FieldCtx::parse(p.field).unwrap());
        for r in &p.rows {
            let s1 = LinPoly::parse(&ctx, &r.s1_expanded).unwrap();
            Construction::build_unchecked(ctx.clone(), ConstructionParams::new(r.variant).with_s1(s1)).unwrap();
        }
    }

    #[test]
    fn listed_forms_match_their_expansions() {
        let ctx = FieldCtx::parse("3^6").unwrap();
        let z = LinPoly::identity(6);
        let e = |s: &str| LinPoly::parse(&ctx, s).unwrap();
        assert_eq!(z.one_minus_g_pow(&ctx, 2, 1), e("X + 2*X^9"));
        assert_eq!(z.one_minus_g_pow(&ctx, 2, 2), e("X + X^9 + X^81"));
        let z81 = LinPoly::monomial(6, 4, crate::gf::FieldElem::ONE);
        assert_eq!(z81.one_minus_g_pow(&ctx, 2, 2), e("X^81 + X + X^9"));
    }

    #[test]
    fn unknown_preset_is_rejected() {
        assert!(Preset::by_name("nope").is_err());
    }
}
