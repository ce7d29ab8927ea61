//! CSV and JSON rendering.
//!
//! CSV carries the display columns rounded the way the published tables
//! print them (yields to 0.001%, vols and vol errors to 0.01%) followed by
//! full-precision raw columns; `.` decimal separator, LF line endings.
//! Identical inputs render byte-identical output.

use serde::Serialize;

use crate::tables::{BondRow, ComparisonRow, ParityRow, SwaptionRow};

/// Percent with fixed decimals from a raw decimal quantity.
fn pct(x: f64, decimals: usize) -> String {
    format!("{:.*}", decimals, x * 100.0)
}

fn pct_opt(x: Option<f64>, decimals: usize) -> String {
    x.map_or_else(|| "n/a".to_string(), |v| pct(v, decimals))
}

/// Round-trippable raw column.
fn raw(x: f64) -> String {
    format!("{x:.17e}")
}

fn raw_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".to_string(), raw)
}

pub fn bond_table_csv(rows: &[BondRow]) -> String {
    let mut out = String::from(
        "r0,b,sigma,maturity,mc_yield_pct,mc_stderr_pct,a2_yield_pct,error_pct,\
         mc_yield,mc_stderr,a2_yield,error\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.r0,
            r.b,
            r.sigma,
            r.maturity,
            pct_opt(r.mc_yield, 3),
            pct_opt(r.mc_stderr, 4),
            pct(r.a2_yield, 3),
            pct_opt(r.error, 3),
            raw_opt(r.mc_yield),
            raw_opt(r.mc_stderr),
            raw(r.a2_yield),
            raw_opt(r.error),
        ));
    }
    out
}

pub fn swaption_table_csv(rows: &[SwaptionRow]) -> String {
    let mut out = String::from(
        "r0,b,sigma,expiry,tenor,moneyness,side,forward_pct,approx_vol_pct,\
         lattice_vol_pct,error_pct,forward,approx_price,lattice_price,approx_vol,\
         lattice_vol,error\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.r0,
            r.b,
            r.sigma,
            r.expiry,
            r.tenor,
            r.moneyness,
            r.side,
            pct(r.forward, 2),
            pct_opt(r.approx_vol, 2),
            pct_opt(r.lattice_vol, 2),
            pct_opt(r.error, 2),
            raw(r.forward),
            raw(r.approx_price),
            raw(r.lattice_price),
            raw_opt(r.approx_vol),
            raw_opt(r.lattice_vol),
            raw_opt(r.error),
        ));
    }
    out
}

pub fn parity_table_csv(rows: &[ParityRow]) -> String {
    let mut out = String::from(
        "r0,b,sigma,expiry,tenor,forward_pct,payer_vol_pct,receiver_vol_pct,\
         disparity_pct,forward,payer_vol,receiver_vol,disparity\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.r0,
            r.b,
            r.sigma,
            r.expiry,
            r.tenor,
            pct(r.forward, 2),
            pct(r.payer_vol, 2),
            pct(r.receiver_vol, 2),
            pct(r.disparity, 2),
            raw(r.forward),
            raw(r.payer_vol),
            raw(r.receiver_vol),
            raw(r.disparity),
        ));
    }
    out
}

pub fn comparison_table_csv(rows: &[ComparisonRow], warning: &str) -> String {
    let mut out = format!("# warning: {warning}\n");
    out.push_str(
        "maturity,mc_yield_pct,mc_stderr_pct,a2_yield_pct,a2_error_pct,\
         published_a2_error_pct,ref_small_vol_error_pct,ref_ee1_error_pct,\
         ref_ee2_error_pct,ref_ee3_error_pct,mc_yield,a2_yield,a2_error\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.maturity,
            pct(r.mc_yield, 3),
            pct(r.mc_stderr, 4),
            pct(r.a2_yield, 3),
            pct(r.a2_error, 3),
            pct(r.published_a2_error, 2),
            pct(r.ref_small_vol_error, 2),
            pct(r.ref_ee1_error, 2),
            pct(r.ref_ee2_error, 2),
            pct(r.ref_ee3_error, 2),
            raw(r.mc_yield),
            raw(r.a2_yield),
            raw(r.a2_error),
        ));
    }
    out
}

#[derive(Serialize)]
struct JsonDoc<'a, T: Serialize> {
    #[serde(skip_serializing_if = "Option::is_none")]
    warning: Option<&'a str>,
    rows: &'a [T],
}

pub fn rows_to_json<T: Serialize>(rows: &[T], warning: Option<&str>) -> String {
    let mut text =
        serde_json::to_string_pretty(&JsonDoc { warning, rows }).expect("rows serialize to JSON");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_uses_dot_decimal_lf_and_na() {
        let rows = vec![BondRow {
            r0: 0.01,
            b: 0.1,
            sigma: 0.25,
            maturity: 1.0,
            mc_yield: None,
            mc_stderr: None,
            a2_yield: 0.0107081,
            error: None,
        }];
        let text = bond_table_csv(&rows);
        assert!(text.ends_with('\n') && !text.contains('\r'));
        let line = text.lines().nth(1).unwrap();
        assert!(line.starts_with("0.01,0.1,0.25,1,n/a,n/a,1.071,n/a,"));
    }

    #[test]
    fn json_is_deterministic() {
        let rows = vec![ParityRow {
            r0: 0.03,
            b: 0.1,
            sigma: 0.25,
            expiry: 5.0,
            tenor: 5.0,
            forward: 0.0334,
            payer_vol: 0.157,
            receiver_vol: 0.1569,
            disparity: 0.0001,
        }];
        assert_eq!(rows_to_json(&rows, None), rows_to_json(&rows, None));
        assert!(rows_to_json(&rows, Some("w")).contains("\"warning\""));
    }
}
