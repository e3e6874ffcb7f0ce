//! Deterministic SVG emission for the two-dimensional demo.
//!
//! Output must be byte-for-byte reproducible across runs and platforms, so
//! every coordinate goes through one fixed 12-significant-digit formatter.

use std::fmt::Write;

/// Formats with 12 significant digits, trimming trailing zeros so the
/// output stays readable; the trimming rule is fixed, keeping bytes stable.
pub fn fmt12(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let raw = format!("{v:.11e}"); // mantissa with 11 decimals + exponent
    let (mantissa, exponent) = raw.split_once('e').expect("float formatting includes exponent");
    let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
    let exp: i32 = exponent.parse().expect("exponent is an integer");
    if exp == 0 {
        mantissa.to_string()
    } else {
        format!("{mantissa}e{exp}")
    }
}

/// Unit circle, prior points as squares, design points as dots with
/// multiplicity labels next to them.
pub fn render_demo2d(prior: &[(f64, f64)], design: &[(f64, f64, usize)]) -> String {
    let mut out = String::new();
    out.push_str(concat!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"480\" ",
        "viewBox=\"-1.6 -1.6 3.2 3.2\">\n"
    ));
    out.push_str("  <rect x=\"-1.6\" y=\"-1.6\" width=\"3.2\" height=\"3.2\" fill=\"white\"/>\n");
    out.push_str(concat!(
        "  <line x1=\"-1.5\" y1=\"0\" x2=\"1.5\" y2=\"0\" ",
        "stroke=\"#cccccc\" stroke-width=\"0.01\"/>\n",
        "  <line x1=\"0\" y1=\"-1.5\" x2=\"0\" y2=\"1.5\" ",
        "stroke=\"#cccccc\" stroke-width=\"0.01\"/>\n",
        "  <circle cx=\"0\" cy=\"0\" r=\"1\" fill=\"none\" ",
        "stroke=\"#888888\" stroke-width=\"0.015\"/>\n"
    ));

    // Math y-up, SVG y-down: emit with negated y.
    for &(x, y) in prior {
        let _ = writeln!(
            out,
            "  <rect x=\"{}\" y=\"{}\" width=\"0.09\" height=\"0.09\" fill=\"#2060c0\"/>",
            fmt12(x - 0.045),
            fmt12(-y - 0.045)
        );
    }
    for &(x, y, count) in design {
        let _ = writeln!(
            out,
            "  <circle cx=\"{}\" cy=\"{}\" r=\"0.045\" fill=\"#c03020\"/>",
            fmt12(x),
            fmt12(-y)
        );
        let _ = writeln!(
            out,
            "  <text x=\"{}\" y=\"{}\" font-size=\"0.14\" \
             font-family=\"sans-serif\" fill=\"#303030\">{count}</text>",
            fmt12(x + 0.07),
            fmt12(-y - 0.07)
        );
    }
    out.push_str("</svg>\n");
    out
}
