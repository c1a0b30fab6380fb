//! Run reports and their text, CSV, and JSON renderings.

use std::fmt::Write as _;

use clap::ValueEnum;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

/// One partition-function run. `additive_error = |z_estimate − z_exact|` when both are present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    /// Lattice size as `nxm`.
    pub instance: String,
    pub domain: String,
    pub method: String,
    pub z_exact: Option<Complex64>,
    pub z_estimate: Option<Complex64>,
    pub delta_o: Option<f64>,
    pub delta: Option<f64>,
    pub delta_prime: Option<f64>,
    pub additive_error: Option<f64>,
    pub relative_error: Option<f64>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    /// Seconds spent in the computation proper.
    pub wall_time: f64,
}

pub const CSV_HEADER: &str = "instance,domain,method,z_exact_re,z_exact_im,z_estimate_re,z_estimate_im,\
delta_o,delta,delta_prime,additive_error,relative_error,samples,seed,wall_time";

impl RunReport {
    pub fn new(instance: String, domain: String, method: String) -> Self {
        Self {
            instance,
            domain,
            method,
            z_exact: None,
            z_estimate: None,
            delta_o: None,
            delta: None,
            delta_prime: None,
            additive_error: None,
            relative_error: None,
            samples: None,
            seed: None,
            wall_time: 0.0,
        }
    }

    /// Fills the error fields from `z_exact` and `z_estimate`.
    pub fn with_errors(mut self) -> Self {
        if let (Some(exact), Some(est)) = (self.z_exact, self.z_estimate) {
            let additive = (est - exact).norm();
            self.additive_error = Some(additive);
            self.relative_error = Some(additive / exact.norm());
        }
        self
    }

    fn csv_row(&self) -> String {
        fn opt<T: ToString>(v: Option<T>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        let (er, ei) = self.z_exact.map_or((None, None), |z| (Some(z.re), Some(z.im)));
        let (sr, si) = self.z_estimate.map_or((None, None), |z| (Some(z.re), Some(z.im)));
        [
            self.instance.clone(),
            self.domain.clone(),
            self.method.clone(),
            opt(er),
            opt(ei),
            opt(sr),
            opt(si),
            opt(self.delta_o),
            opt(self.delta),
            opt(self.delta_prime),
            opt(self.additive_error),
            opt(self.relative_error),
            opt(self.samples),
            opt(self.seed),
            self.wall_time.to_string(),
        ]
        .join(",")
    }

    fn text(&self) -> String {
        let mut out = String::new();
        let z = |z: Complex64| format!("{:.12e} {:+.12e}i", z.re, z.im);
        let _ = writeln!(out, "instance        {} ({})", self.instance, self.domain);
        let _ = writeln!(out, "method          {}", self.method);
        if let Some(v) = self.z_exact {
            let _ = writeln!(out, "z_exact         {}", z(v));
        }
        if let Some(v) = self.z_estimate {
            let _ = writeln!(out, "z_estimate      {}", z(v));
        }
        if let Some(d) = self.delta {
            let _ = writeln!(out, "Delta           {d:.6e}");
        }
        if let Some(d) = self.delta_prime {
            let _ = writeln!(out, "Delta'          {d:.6e}");
        }
        if let Some(d) = self.delta_o {
            let _ = writeln!(out, "Delta_o         {d:.6e}");
            if let Some(delta) = self.delta {
                let _ = writeln!(out, "Delta/Delta_o   {:.6e}", delta / d);
            }
        }
        if let Some(e) = self.additive_error {
            let _ = writeln!(out, "additive_error  {e:.3e}");
        }
        if let Some(e) = self.relative_error {
            let _ = writeln!(out, "relative_error  {e:.3e}");
        }
        if let Some(s) = self.samples {
            let _ = writeln!(out, "samples         {s}");
        }
        if let Some(s) = self.seed {
            let _ = writeln!(out, "seed            {s}");
        }
        let _ = writeln!(out, "wall_time       {:.3}s", self.wall_time);
        out
    }
}

/// Renders a report. CSV is one header line plus one row.
pub fn write_report(report: &RunReport, format: Format) -> String {
    match format {
        Format::Text => report.text(),
        Format::Csv => format!("{CSV_HEADER}\n{}\n", report.csv_row()),
        Format::Json => serde_json::to_string_pretty(report).expect("report is serializable") + "\n",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunReport {
        let mut r = RunReport::new("2x2".into(), "Problem1".into(), "unitary".into());
        r.z_exact = Some(Complex64::new(1.5, -0.25));
        r.z_estimate = Some(Complex64::new(1.5, -0.2));
        r.delta = Some(8.0);
        r.delta_o = Some(16.0);
        r.samples = Some(100);
        r.seed = Some(3);
        r.with_errors()
    }

    #[test]
    fn errors_follow_definition() {
        let r = sample();
        assert!((r.additive_error.unwrap() - 0.05).abs() < 1e-15);
        let exact = Complex64::new(1.5, -0.25).norm();
        assert!((r.relative_error.unwrap() - 0.05 / exact).abs() < 1e-15);
        let only_exact = RunReport::new("1x1".into(), "Physical".into(), "brute".into()).with_errors();
        assert_eq!(only_exact.additive_error, None);
    }

    #[test]
    fn csv_has_header_and_one_row() {
        let text = write_report(&sample(), Format::Csv);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[0].split(',').count(), lines[1].split(',').count());
    }

    #[test]
    fn json_round_trips() {
        let r = sample();
        let back: RunReport = serde_json::from_str(&write_report(&r, Format::Json)).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn text_shows_scales_and_ratio() {
        let text = write_report(&sample(), Format::Text);
        assert!(text.contains("Delta           8.000000e0"));
        assert!(text.contains("Delta_o         1.600000e1"));
        assert!(text.contains("Delta/Delta_o   5.000000e-1"));
    }
}
