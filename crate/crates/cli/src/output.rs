//! JSON-lines and CSV rendering.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::config::Format;
use crate::records::Record;

/// Main document plus, for CSV in analyze mode, a curve table.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub main: String,
    pub curves: Option<String>,
}

/// Full precision for CSV: 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn render(records: &[Record], format: Format) -> Rendered {
    match format {
        Format::Jsonl => Rendered {
            main: records
                .iter()
                .map(|r| serde_json::to_string(r).expect("records serialize") + "\n")
                .collect(),
            curves: None,
        },
        Format::Csv => render_csv(records),
    }
}

fn render_csv(records: &[Record]) -> Rendered {
    let mut main = String::new();
    let mut curves = None;
    let eigen_header = "p,re_lambda,im_lambda,functional_residual,boundary_residual\n";
    match records.first() {
        Some(Record::Asymptotic(a)) => {
            main.push_str("order,re_mu,im_mu,re_lambda_estimate,im_lambda_estimate\n");
            for e in &a.eigenpairs {
                let _ = writeln!(
                    main,
                    "{},{},{},{},{}",
                    e.order,
                    num(e.mu.re),
                    num(e.mu.im),
                    num(e.lambda_estimate.re),
                    num(e.lambda_estimate.im)
                );
            }
        }
        Some(Record::Full(_)) | Some(Record::Analyze(_)) => {
            main.push_str(eigen_header);
            let full = match &records[0] {
                Record::Full(f) => f,
                Record::Analyze(a) => &a.spectrum,
                _ => unreachable!(),
            };
            for e in &full.eigenpairs {
                let _ = writeln!(
                    main,
                    "{},{},{},{},{}",
                    e.p,
                    num(e.lambda.re),
                    num(e.lambda.im),
                    num(e.functional_residual),
                    num(e.boundary_residual)
                );
            }
            if let Record::Analyze(a) = &records[0] {
                let mut c = String::from("p,t,re_omega,im_omega\n");
                for row in &a.curves {
                    for (t, w) in row.t.iter().zip(&row.omega) {
                        let _ = writeln!(c, "{},{},{},{}", row.p, num(*t), num(w.re), num(w.im));
                    }
                }
                curves = Some(c);
            }
        }
        Some(Record::SweepItem(_)) | Some(Record::SweepSummary(_)) => {
            main.push_str("config,");
            main.push_str(eigen_header);
            for r in records {
                if let Record::SweepItem(item) = r {
                    for (i, (l, res)) in item
                        .eigenvalues
                        .iter()
                        .zip(&item.functional_residuals)
                        .enumerate()
                    {
                        let _ = writeln!(
                            main,
                            "{},{},{},{},{},",
                            item.index,
                            i + 1,
                            num(l.re),
                            num(l.im),
                            num(*res)
                        );
                    }
                }
            }
        }
        None => {}
    }
    Rendered { main, curves }
}

/// Sibling path for the curve table: `out.csv` becomes `out.curves.csv`.
pub fn curves_path(path: &Path) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}.curves.csv"))
}
