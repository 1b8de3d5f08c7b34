//! CSV, Markdown and JSON output of convergence tables.

use std::io::Write;

use serde::{Deserialize, Serialize};
use sldg_core::field::DgField1D;

use crate::driver::ConvergenceRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Md,
    Json,
}

/// Three significant digits with a signed two-digit exponent, e.g. `3.92E-05`.
pub fn sci(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    let s = format!("{v:.2E}");
    let (mant, exp) = s.split_once('E').expect("exponent present");
    let e: i32 = exp.parse().expect("integer exponent");
    let sign = if e < 0 { '-' } else { '+' };
    format!("{mant}E{sign}{:02}", e.abs())
}

fn order(o: Option<f64>) -> String {
    o.map(|v| format!("{v:.2}")).unwrap_or_default()
}

fn has_m2(rows: &[ConvergenceRow]) -> bool {
    rows.iter().any(|r| r.m2.is_some())
}

/// Writes one table.
pub fn emit(rows: &[ConvergenceRow], format: Format, w: &mut dyn Write) -> std::io::Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *w, rows)?;
            writeln!(w)
        }
        Format::Csv => {
            let two = has_m2(rows);
            write!(w, "M,")?;
            if two {
                write!(w, "M2,")?;
            }
            writeln!(w, "N,k,L1,L2,Linf,order_L2,seconds,cfl,threads")?;
            for r in rows {
                write!(w, "{},", r.m)?;
                if two {
                    write!(w, "{},", r.m2.unwrap_or(0))?;
                }
                writeln!(
                    w,
                    "{},{},{},{},{},{},{:.3},{},{}",
                    r.n,
                    r.k,
                    sci(r.l1),
                    sci(r.l2),
                    sci(r.linf),
                    order(r.order_l2),
                    r.seconds,
                    r.cfl.map(|c| format!("{c:.2}")).unwrap_or_default(),
                    r.threads
                )?;
            }
            Ok(())
        }
        Format::Md => {
            let two = has_m2(rows);
            let mc = if two { "| M | M2 " } else { "| M " };
            writeln!(w, "{mc}| N | L1 error | L2 error | order | Linf error | CPU (s) |")?;
            writeln!(w, "{}|---|---|---|---|---|---|", if two { "|---|---" } else { "|---" })?;
            for r in rows {
                write!(w, "| {} ", r.m)?;
                if two {
                    write!(w, "| {} ", r.m2.unwrap_or(0))?;
                }
                let o = order(r.order_l2);
                writeln!(
                    w,
                    "| {} | {} | {} | {} | {} | {:.2} |",
                    r.n,
                    sci(r.l1),
                    sci(r.l2),
                    if o.is_empty() { "-".into() } else { o },
                    sci(r.linf),
                    r.seconds
                )?;
            }
            Ok(())
        }
    }
}

/// Writes several tables side by side, one L² error/order column pair per
/// group (typically one group per degree k). Rows are matched by position.
pub fn emit_groups(groups: &[(String, Vec<ConvergenceRow>)], format: Format, w: &mut dyn Write) -> std::io::Result<()> {
    match format {
        Format::Json => {
            let map: serde_json::Map<String, serde_json::Value> = groups
                .iter()
                .map(|(l, rows)| (l.clone(), serde_json::to_value(rows).expect("rows serialize")))
                .collect();
            serde_json::to_writer_pretty(&mut *w, &map)?;
            writeln!(w)
        }
        Format::Csv => {
            writeln!(w, "group,M,N,k,L1,L2,Linf,order_L2,seconds")?;
            for (label, rows) in groups {
                for r in rows {
                    writeln!(
                        w,
                        "{label},{},{},{},{},{},{},{},{:.3}",
                        r.m,
                        r.n,
                        r.k,
                        sci(r.l1),
                        sci(r.l2),
                        sci(r.linf),
                        order(r.order_l2),
                        r.seconds
                    )?;
                }
            }
            Ok(())
        }
        Format::Md => {
            write!(w, "| M | N |")?;
            for (label, _) in groups {
                write!(w, " {label} L2 error | order |")?;
            }
            writeln!(w)?;
            write!(w, "|---|---|")?;
            for _ in groups {
                write!(w, "---|---|")?;
            }
            writeln!(w)?;
            let len = groups.iter().map(|(_, r)| r.len()).max().unwrap_or(0);
            for j in 0..len {
                let first = groups.iter().find_map(|(_, r)| r.get(j));
                let (m, n) = first.map(|r| (r.m, r.n)).unwrap_or((0, 0));
                write!(w, "| {m} | {n} |")?;
                for (_, rows) in groups {
                    match rows.get(j) {
                        Some(r) => {
                            let o = order(r.order_l2);
                            write!(w, " {} | {} |", sci(r.l2), if o.is_empty() { "-".into() } else { o })?
                        }
                        None => write!(w, "  |  |")?,
                    }
                }
                writeln!(w)?;
            }
            Ok(())
        }
    }
}

/// Nodal values of a 1D field as `cell,alpha,x,value` lines.
pub fn write_field_csv(u: &DgField1D, w: &mut dyn Write) -> std::io::Result<()> {
    writeln!(w, "cell,alpha,x,value")?;
    let n = u.basis().len();
    for i in 0..u.mesh().cells() {
        for a in 0..n {
            writeln!(w, "{i},{a},{:e},{:e}", u.node(i, a), u.coeffs()[i * n + a])?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sci_matches_table_style() {
        assert_eq!(sci(3.9216e-5), "3.92E-05");
        assert_eq!(sci(4.03e-7), "4.03E-07");
        assert_eq!(sci(12.5), "1.25E+01");
        assert_eq!(sci(0.0), "0.00E+00");
        assert_eq!(sci(9.999e-3), "1.00E-02");
        assert_eq!(sci(-2.0e-100), "-2.00E-100");
    }
}
