// Copyright 2026 The qvpkit Developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Line-delimited result reports.
//!
//! Reports are plain text, one `key = value` pair per line under a version
//! header. Floating-point values are printed with 17 significant digits so
//! they round-trip exactly, which makes reports byte-stable across runs
//! and suitable for golden-file comparison.

use num_rational::Ratio;

use crate::linalg::C64;

/// Accumulates one report; render with [`Report::render`].
#[derive(Debug, Clone)]
pub struct Report {
    lines: Vec<String>,
}

/// Formats an f64 with enough digits to round-trip.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Formats a complex number as `[re, im]`.
pub fn format_complex(z: C64) -> String {
    format!("[{}, {}]", format_f64(z.re), format_f64(z.im))
}

impl Report {
    /// Starts a report of the given kind under a version header.
    pub fn new(kind: &str) -> Report {
        Report {
            lines: vec![format!(
                "qvpkit {} {kind}",
                env!("CARGO_PKG_VERSION")
            )],
        }
    }

    pub fn field(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        self.lines.push(format!("{key} = {value}"));
        self
    }

    pub fn field_f64(&mut self, key: &str, value: f64) -> &mut Self {
        self.field(key, format_f64(value))
    }

    pub fn field_complex(&mut self, key: &str, value: C64) -> &mut Self {
        self.field(key, format_complex(value))
    }

    pub fn field_ratio(&mut self, key: &str, value: Ratio<i64>) -> &mut Self {
        self.field(key, value)
    }

    /// Full text, one line per entry, trailing newline included.
    pub fn render(&self) -> String {
        let mut out = self.lines.join("\n");
        out.push('\n');
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_through_the_report_format() {
        for x in [0.25, 1.0 / 3.0, 2.0f64.sqrt(), 1e-12, 0.0] {
            let text = format_f64(x);
            let back: f64 = text.parse().unwrap();
            assert_eq!(back, x, "{text}");
        }
    }

    #[test]
    fn report_renders_header_then_fields() {
        let mut r = Report::new("spectrum");
        r.field("clusters", 2).field_f64("p.0", 0.25);
        let text = r.render();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("qvpkit "));
        assert_eq!(lines.next().unwrap(), "clusters = 2");
        assert_eq!(lines.next().unwrap(), "p.0 = 2.5000000000000000e-1");
    }
}
