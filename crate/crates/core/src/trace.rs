//! Time series containers and their CSV/SVG renderings.

use std::fmt::Write as _;

/// States sampled at increasing times.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, t: f64, state: Vec<f64>) {
        self.times.push(t);
        self.states.push(state);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, &[f64])> {
        self.times.last().map(|t| (*t, self.states.last().unwrap().as_slice()))
    }

    /// Linear interpolation between the two samples bracketing `t`,
    /// clamped to the first and last sample.
    pub fn sample(&self, t: f64) -> Option<Vec<f64>> {
        if self.is_empty() {
            return None;
        }
        let k = self.times.partition_point(|s| *s <= t);
        if k == 0 {
            return Some(self.states[0].clone());
        }
        if k == self.len() {
            return Some(self.states[k - 1].clone());
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let w = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
        Some(
            self.states[k - 1]
                .iter()
                .zip(&self.states[k])
                .map(|(a, b)| a + w * (b - a))
                .collect(),
        )
    }

    /// Maps each state through `g`.
    pub fn map<T>(&self, mut g: impl FnMut(f64, &[f64]) -> T) -> Vec<T> {
        self.times
            .iter()
            .zip(&self.states)
            .map(|(t, x)| g(*t, x))
            .collect()
    }
}

/// Floats in CSV output: scientific notation with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// A table with named columns rendered as CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|x| fmt_float(*x)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// One polyline of an [`SvgPlot`].
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub color: String,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub dashed: bool,
}

impl Series {
    pub fn new(label: &str, color: &str, xs: Vec<f64>, ys: Vec<f64>) -> Self {
        Self {
            label: label.into(),
            color: color.into(),
            xs,
            ys,
            dashed: false,
        }
    }

    pub fn dashed(mut self) -> Self {
        self.dashed = true;
        self
    }
}

/// Minimal static line plot.
#[derive(Debug, Clone)]
pub struct SvgPlot {
    pub title: String,
    pub x_label: String,
    pub series: Vec<Series>,
}

impl SvgPlot {
    pub fn new(title: &str, x_label: &str) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            series: Vec::new(),
        }
    }

    pub fn with(mut self, s: Series) -> Self {
        self.series.push(s);
        self
    }

    pub fn render(&self) -> String {
        const W: f64 = 720.0;
        const H: f64 = 400.0;
        const PAD: f64 = 50.0;
        let finite = |v: &&f64| v.is_finite();
        let xs = self.series.iter().flat_map(|s| s.xs.iter().filter(finite));
        let ys = self.series.iter().flat_map(|s| s.ys.iter().filter(finite));
        let (x0, x1) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(*x), b.max(*x)));
        let (mut y0, mut y1) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| (a.min(*y), b.max(*y)));
        if !(y1 > y0) {
            y0 -= 1.0;
            y1 += 1.0;
        }
        let x1 = if x1 > x0 { x1 } else { x0 + 1.0 };
        let px = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
        let py = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="20" text-anchor="middle" font-family="sans-serif" font-size="14">{}</text>"#,
            W / 2.0,
            self.title
        );
        let _ = writeln!(
            s,
            r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            W - 2.0 * PAD,
            H - 2.0 * PAD
        );
        for (v, anchor_y) in [(y0, H - PAD), (y1, PAD)] {
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" text-anchor="end" font-family="sans-serif" font-size="10">{:.3}</text>"#,
                PAD - 4.0,
                anchor_y + 3.0,
                v
            );
        }
        for (v, anchor_x) in [(x0, PAD), (x1, W - PAD)] {
            let _ = writeln!(
                s,
                r#"<text x="{anchor_x}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="10">{:.3}</text>"#,
                H - PAD + 14.0,
                v
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">{}</text>"#,
            W / 2.0,
            H - 10.0,
            self.x_label
        );
        for (i, series) in self.series.iter().enumerate() {
            let mut pts = String::new();
            for (x, y) in series.xs.iter().zip(&series.ys) {
                if x.is_finite() && y.is_finite() {
                    let _ = write!(pts, "{:.2},{:.2} ", px(*x), py(*y));
                }
            }
            let dash = if series.dashed { r#" stroke-dasharray="6,4""# } else { "" };
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{}" stroke-width="1.5"{dash} points="{}"/>"#,
                series.color,
                pts.trim_end()
            );
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" fill="{}">{}</text>"#,
                PAD + 8.0,
                PAD + 14.0 * (i as f64 + 1.0),
                series.color,
                series.label
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_interpolates_and_clamps() {
        let mut tr = Trajectory::new();
        tr.push(0.0, vec![0.0, 1.0]);
        tr.push(1.0, vec![2.0, 1.0]);
        assert_eq!(tr.sample(0.25).unwrap(), vec![0.5, 1.0]);
        assert_eq!(tr.sample(-1.0).unwrap(), vec![0.0, 1.0]);
        assert_eq!(tr.sample(5.0).unwrap(), vec![2.0, 1.0]);
        assert!(Trajectory::new().sample(0.0).is_none());
    }

    #[test]
    fn csv_uses_seventeen_digits() {
        let mut t = Table::new(["t", "y"]);
        t.push(vec![0.1, -2.0]);
        assert_eq!(t.to_csv(), "t,y\n1.0000000000000001e-1,-2.0000000000000000e0\n");
        assert_eq!(t.column("y").unwrap(), vec![-2.0]);
        assert!(t.column("z").is_none());
    }

    #[test]
    fn svg_contains_one_polyline_per_series() {
        let svg = SvgPlot::new("demo", "t")
            .with(Series::new("a", "red", vec![0.0, 1.0], vec![0.0, 1.0]))
            .with(Series::new("b", "blue", vec![0.0, 1.0], vec![1.0, f64::NAN]).dashed())
            .render();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    }
}
