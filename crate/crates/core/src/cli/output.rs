//! CSV and SVG emission.

use std::fmt::Write;

use crate::sweep::SweepResult;

pub const CSV_HEADER_1D: &str = "axis1,stable,margin,eta_minus,e_n,a_s_abs";
pub const CSV_HEADER_2D: &str = "axis1,axis2,stable,margin,eta_minus,e_n,a_s_abs";

const UNSTABLE_COLOR: &str = "#2b5cc4";
const ERROR_COLOR: &str = "#9a9a9a";

/// Formats with `digits` significant digits, like C's `%.*g`.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..digits as i32).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.prec$e}", prec = digits - 1)
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One row per cell, row-major, shortest round-trip number formatting.
/// Cells whose pipeline failed are written with `stable=false` and empty
/// numeric fields.
pub fn to_csv(result: &SweepResult) -> String {
    let mut s = String::new();
    s.push_str(if result.axes.len() == 2 {
        CSV_HEADER_2D
    } else {
        CSV_HEADER_1D
    });
    s.push('\n');
    for cell in &result.cells {
        for c in &cell.coords {
            let _ = write!(s, "{c},");
        }
        match &cell.outcome {
            Ok(r) => {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    r.stable,
                    r.margin,
                    opt(r.eta_minus),
                    opt(r.e_n),
                    r.a_s_abs
                );
            }
            Err(_) => s.push_str("false,,,,\n"),
        }
    }
    s
}

fn lerp_color(t: f64) -> String {
    // light yellow to dark red
    let lo = [255.0, 245.0, 200.0];
    let hi = [140.0, 10.0, 30.0];
    let t = t.clamp(0.0, 1.0);
    let c: Vec<u8> = lo
        .iter()
        .zip(hi)
        .map(|(a, b)| (a + (b - a) * t).round() as u8)
        .collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

/// Self-contained SVG heatmap of E_N. The first axis runs bottom to top
/// (a 1-D sweep is drawn as a single strip along x); unstable cells use one
/// reserved color.
pub fn to_svg(result: &SweepResult) -> String {
    let (rows, cols) = match result.axes.get(1) {
        Some(inner) => (result.axes[0].count, inner.count),
        None => (1, result.axes[0].count),
    };

    let e_values: Vec<f64> = result
        .cells
        .iter()
        .filter_map(|c| c.outcome.as_ref().ok().and_then(|r| r.e_n))
        .collect();
    let min = e_values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = e_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if max > min { max - min } else { 1.0 };

    let plot = 480.0;
    let cw = plot / cols as f64;
    let ch = if rows == 1 { 40.0 } else { plot / rows as f64 };
    let height = ch * rows as f64;
    let (left, top) = (70.0, 20.0);
    let total_w = left + plot + 20.0;
    let total_h = top + height + 90.0;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total_w}" height="{total_h}" viewBox="0 0 {total_w} {total_h}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (k, cell) in result.cells.iter().enumerate() {
        let fill = match &cell.outcome {
            Ok(r) => match r.e_n {
                Some(e) => lerp_color((e - min) / span),
                None => UNSTABLE_COLOR.to_string(),
            },
            Err(_) => ERROR_COLOR.to_string(),
        };
        let x = left + (k % cols) as f64 * cw;
        let y = top + (rows - 1 - k / cols) as f64 * ch;
        let _ = writeln!(
            s,
            r#"<rect x="{x:.3}" y="{y:.3}" width="{:.3}" height="{:.3}" fill="{fill}"/>"#,
            cw + 0.05,
            ch + 0.05
        );
    }
    let x_axis = result.axes.get(1).unwrap_or(&result.axes[0]);
    let base = top + height;
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle" font-family="sans-serif">{} [{} .. {}]</text>"#,
        left + plot / 2.0,
        base + 18.0,
        x_axis.param,
        format_significant(x_axis.start, 6),
        format_significant(x_axis.stop, 6)
    );
    if result.axes.len() == 2 {
        let y_axis = &result.axes[0];
        let _ = writeln!(
            s,
            r#"<text x="14" y="{}" font-size="12" text-anchor="middle" font-family="sans-serif" transform="rotate(-90 14 {})">{} [{} .. {}]</text>"#,
            top + height / 2.0,
            top + height / 2.0,
            y_axis.param,
            format_significant(y_axis.start, 6),
            format_significant(y_axis.stop, 6)
        );
    }
    // color bar
    let bar_y = base + 32.0;
    for i in 0..50 {
        let _ = writeln!(
            s,
            r#"<rect x="{:.3}" y="{bar_y}" width="{:.3}" height="12" fill="{}"/>"#,
            left + i as f64 * plot / 100.0,
            plot / 100.0 + 0.05,
            lerp_color(i as f64 / 49.0)
        );
    }
    let (lo_label, hi_label) = if e_values.is_empty() {
        ("n/a".to_string(), "n/a".to_string())
    } else {
        (format_significant(min, 6), format_significant(max, 6))
    };
    let _ = writeln!(
        s,
        r#"<text x="{left}" y="{}" font-size="11" font-family="sans-serif">E_N min {lo_label}</text>"#,
        bar_y + 26.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="11" text-anchor="end" font-family="sans-serif">E_N max {hi_label}</text>"#,
        left + plot / 2.0,
        bar_y + 26.0
    );
    let _ = writeln!(
        s,
        r#"<rect x="{}" y="{bar_y}" width="12" height="12" fill="{UNSTABLE_COLOR}"/><text x="{}" y="{}" font-size="11" font-family="sans-serif">unstable</text>"#,
        left + plot / 2.0 + 20.0,
        left + plot / 2.0 + 36.0,
        bar_y + 10.0
    );
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_significant(0.1234567890123456, 12), "0.123456789012");
        assert_eq!(format_significant(1234.5, 12), "1234.5");
        assert_eq!(format_significant(-9.4e-4, 12), "-0.00094");
        assert_eq!(format_significant(7.8e5, 12), "780000");
        assert_eq!(format_significant(1.5e-9, 3), "1.50e-9");
        assert_eq!(format_significant(0.0, 12), "0");
    }
}
