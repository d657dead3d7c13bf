//! CSV export of per-iteration solver records.
//!
//! One row per outer iteration with the iterate, its objective vector, the
//! certified bounds, the accepted step, and the shrinking-distance
//! bookkeeping. Floats are written with 17 significant digits so a reader
//! recovers them bit for bit.

use crate::solver::IterationRecord;
use std::io;
use std::path::Path;

/// Column header for a problem with `n` variables and `m` objectives.
pub fn trace_header(n: usize, m: usize) -> String {
    let mut cols = vec!["k".to_string()];
    cols.extend((0..n).map(|i| format!("x_{i}")));
    cols.extend((0..m).map(|i| format!("F_{i}")));
    for tail in [
        "h",
        "q",
        "achieved_sigma",
        "j",
        "t",
        "step_norm",
        "fejer_delta",
        "fejer_cumsum",
    ] {
        cols.push(tail.to_string());
    }
    cols.join(",")
}

/// Round-trippable float formatting used throughout the CSV.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Renders header plus one line per record, LF separated.
pub fn render_trace(n: usize, m: usize, records: &[IterationRecord]) -> String {
    let mut out = String::new();
    out.push_str(&trace_header(n, m));
    out.push('\n');
    for rec in records {
        let mut fields = vec![rec.k.to_string()];
        debug_assert_eq!(rec.x.len(), n);
        debug_assert_eq!(rec.fx.len(), m);
        fields.extend(rec.x.iter().map(|v| format_float(*v)));
        fields.extend(rec.fx.iter().map(|v| format_float(*v)));
        fields.push(format_float(rec.h));
        fields.push(format_float(rec.q));
        fields.push(format_float(rec.achieved_sigma));
        fields.push(rec.j.to_string());
        fields.push(format_float(rec.t));
        fields.push(format_float(rec.step_norm));
        fields.push(format_float(rec.fejer_increment));
        fields.push(format_float(rec.fejer_cumsum));
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// Writes [`render_trace`] output to a file.
pub fn write_trace_csv(
    path: &Path,
    n: usize,
    m: usize,
    records: &[IterationRecord],
) -> io::Result<()> {
    std::fs::write(path, render_trace(n, m, records))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record() -> IterationRecord {
        IterationRecord {
            k: 3,
            x: vec![0.1, -2.0],
            fx: vec![1.5],
            h: -0.25,
            q: -0.5,
            achieved_sigma: 0.5,
            j: 2,
            t: 0.25,
            step_norm: 0.1,
            fejer_increment: 0.75,
            fejer_cumsum: 1.5,
        }
    }

    #[test]
    fn header_names_every_column() {
        assert_eq!(
            trace_header(2, 1),
            "k,x_0,x_1,F_0,h,q,achieved_sigma,j,t,step_norm,fejer_delta,fejer_cumsum"
        );
    }

    #[test]
    fn floats_round_trip_through_the_format() {
        for v in [
            0.0,
            -0.0,
            1.0,
            -2.0,
            0.1,
            std::f64::consts::PI,
            1.0 / 3.0,
            6.02e23,
            -1.7e-300,
            f64::MIN_POSITIVE,
        ] {
            let text = format_float(v);
            let back: f64 = text.parse().unwrap();
            assert_eq!(v.to_bits(), back.to_bits(), "{v} -> {text} -> {back}");
        }
    }

    #[test]
    fn rows_follow_the_header() {
        let text = render_trace(2, 1, &[record()]);
        let mut lines = text.lines();
        let header = lines.next().unwrap();
        let row = lines.next().unwrap();
        assert!(lines.next().is_none());
        assert_eq!(header.split(',').count(), row.split(',').count());
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[0], "3");
        assert_eq!(fields[1].parse::<f64>().unwrap(), 0.1);
        assert_eq!(fields[3].parse::<f64>().unwrap(), 1.5);
        assert_eq!(fields[6].parse::<f64>().unwrap(), 0.5);
        assert_eq!(fields[7], "2");
        assert!(text.ends_with('\n'));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn written_file_matches_the_rendering() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trace.csv");
        write_trace_csv(&path, 2, 1, &[record()]).unwrap();
        let body = std::fs::read_to_string(&path).unwrap();
        assert_eq!(body, render_trace(2, 1, &[record()]));
    }
}
