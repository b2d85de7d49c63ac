//! Byte-deterministic SVG line plots read back from the CSV outputs.

use std::fmt::Write as _;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 6] = ["#1f4e9c", "#c0392b", "#27864a", "#8e44ad", "#d35400", "#555555"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    CrossingVsP,
    TailLogLog,
    ChiRatio,
    SpeedVsN,
    DecayRate,
}

impl PlotKind {
    pub const ALL: [PlotKind; 5] =
        [PlotKind::CrossingVsP, PlotKind::TailLogLog, PlotKind::ChiRatio, PlotKind::SpeedVsN, PlotKind::DecayRate];

    pub fn name(self) -> &'static str {
        match self {
            PlotKind::CrossingVsP => "crossing-vs-p",
            PlotKind::TailLogLog => "tail-loglog",
            PlotKind::ChiRatio => "chi-ratio",
            PlotKind::SpeedVsN => "speed-vs-n",
            PlotKind::DecayRate => "decay-rate",
        }
    }

    /// CSV file a subcommand writes for this plot.
    pub fn source(self) -> &'static str {
        match self {
            PlotKind::CrossingVsP => "crossing.csv",
            PlotKind::TailLogLog => "tail.csv",
            PlotKind::ChiRatio => "chi.csv",
            PlotKind::SpeedVsN => "speed.csv",
            PlotKind::DecayRate => "decay.csv",
        }
    }
}

impl FromStr for PlotKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        PlotKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown plot kind {s:?}"))
    }
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn parse(text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let header: Vec<String> = r.headers().context("reading csv header")?.iter().map(String::from).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|rec| rec.iter().map(String::from).collect()))
            .collect::<Result<Vec<Vec<String>>, _>>()
            .context("reading csv rows")?;
        if header.is_empty() || rows.is_empty() {
            bail!("csv has no data rows");
        }
        Ok(Self { header, rows })
    }

    fn col(&self, name: &str) -> Result<usize> {
        self.header.iter().position(|h| h == name).ok_or_else(|| anyhow!("csv lacks column {name:?}"))
    }

    /// Numeric column; empty cells become `None`.
    fn values(&self, name: &str) -> Result<Vec<Option<f64>>> {
        let i = self.col(name)?;
        self.rows
            .iter()
            .map(|r| {
                let s = r.get(i).map(String::as_str).unwrap_or("");
                if s.is_empty() {
                    Ok(None)
                } else {
                    s.parse::<f64>().map(Some).map_err(|_| anyhow!("column {name:?}: {s:?} is not a number"))
                }
            })
            .collect()
    }
}

struct Series {
    label: String,
    points: Vec<(f64, f64)>,
    dashed: bool,
}

struct Chart {
    title: String,
    x_label: String,
    y_label: String,
    log_x: bool,
    log_y: bool,
    series: Vec<Series>,
    /// Vertical error bars `(x, lo, hi)`.
    bars: Vec<(f64, f64, f64)>,
}

fn zip(xs: &[Option<f64>], ys: &[Option<f64>], log_x: bool, log_y: bool) -> Vec<(f64, f64)> {
    xs.iter()
        .zip(ys)
        .filter_map(|(x, y)| Some(((*x)?, (*y)?)))
        .filter(|&(x, y)| x.is_finite() && y.is_finite() && (!log_x || x > 0.0) && (!log_y || y > 0.0))
        .collect()
}

fn chart_for(kind: PlotKind, t: &Table) -> Result<Chart> {
    Ok(match kind {
        PlotKind::CrossingVsP => {
            let p = t.values("p")?;
            let r = t.values("R")?;
            let est = t.values("estimate")?;
            let lo = t.values("ci_lo")?;
            let hi = t.values("ci_hi")?;
            let mut radii: Vec<f64> = r.iter().flatten().copied().collect();
            radii.sort_by(f64::total_cmp);
            radii.dedup();
            let series = radii
                .iter()
                .map(|&rad| {
                    let keep: Vec<bool> = r.iter().map(|x| *x == Some(rad)).collect();
                    let pick = |v: &[Option<f64>]| v.iter().zip(&keep).map(|(x, &k)| if k { *x } else { None }).collect::<Vec<_>>();
                    Series { label: format!("R = {rad}"), points: zip(&pick(&p), &pick(&est), false, false), dashed: false }
                })
                .collect();
            let bars = p
                .iter()
                .zip(lo.iter().zip(&hi))
                .filter_map(|(x, (a, b))| Some(((*x)?, (*a)?, (*b)?)))
                .collect();
            Chart {
                title: "Crossing probability".into(),
                x_label: "p".into(),
                y_label: "P(0 <-> S_R)".into(),
                log_x: false,
                log_y: false,
                series,
                bars,
            }
        }
        PlotKind::TailLogLog => {
            let n = t.values("n")?;
            let s = t.values("survival_fraction")?;
            let pts = zip(&n, &s, true, true);
            let mut series = vec![Series { label: "P(|C| >= n)".into(), points: pts.clone(), dashed: false }];
            if let (Some(&(x0, y0)), Some(&(x1, _))) = (pts.first(), pts.last()) {
                let y1 = y0 * (x1 / x0).powf(-0.5);
                series.push(Series { label: "slope -1/2".into(), points: vec![(x0, y0), (x1, y1)], dashed: true });
            }
            Chart {
                title: "Cluster-size tail".into(),
                x_label: "n".into(),
                y_label: "P(|C| >= n)".into(),
                log_x: true,
                log_y: true,
                series,
                bars: Vec::new(),
            }
        }
        PlotKind::ChiRatio => {
            let z = t.values("z")?;
            let lo = t.values("ratio_lo")?;
            let hi = t.values("ratio_hi")?;
            Chart {
                title: "chi(z) (1/mu - z)".into(),
                x_label: "z".into(),
                y_label: "ratio".into(),
                log_x: false,
                log_y: false,
                series: vec![
                    Series { label: "lower".into(), points: zip(&z, &lo, false, false), dashed: false },
                    Series { label: "upper".into(), points: zip(&z, &hi, false, false), dashed: true },
                ],
                bars: Vec::new(),
            }
        }
        PlotKind::SpeedVsN => {
            let n = t.values("n")?;
            let mut series = vec![Series { label: "exact".into(), points: zip(&n, &t.values("exact")?, false, false), dashed: false }];
            series.push(Series { label: "sampled".into(), points: zip(&n, &t.values("sampled")?, false, false), dashed: true });
            if let Ok(a) = t.values("alpha") {
                series.push(Series { label: "alpha".into(), points: zip(&n, &a, false, false), dashed: true });
            }
            Chart {
                title: "SAW speed".into(),
                x_label: "n".into(),
                y_label: "E dist / n".into(),
                log_x: false,
                log_y: false,
                series,
                bars: Vec::new(),
            }
        }
        PlotKind::DecayRate => {
            let n = t.values("n")?;
            Chart {
                title: "Endpoint decay".into(),
                x_label: "n".into(),
                y_label: "sup_x c_n(x) / c_n".into(),
                log_x: false,
                log_y: true,
                series: vec![
                    Series { label: "sup".into(), points: zip(&n, &t.values("sup")?, false, true), dashed: false },
                    Series { label: "bound".into(), points: zip(&n, &t.values("bound")?, false, true), dashed: true },
                ],
                bars: Vec::new(),
            }
        }
    })
}

fn range(vals: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() || !hi.is_finite() {
        return None;
    }
    if hi > lo {
        Some((lo, hi))
    } else {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        Some((lo - pad, hi + pad))
    }
}

fn tick_label(v: f64, log: bool) -> String {
    let x = if log { 10f64.powf(v) } else { v };
    if x != 0.0 && (x.abs() < 1e-3 || x.abs() >= 1e5) {
        format!("{x:.1e}")
    } else {
        format!("{x:.3}").trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn render(c: &Chart) -> Result<String> {
    let tx = |v: f64| if c.log_x { v.log10() } else { v };
    let ty = |v: f64| if c.log_y { v.log10() } else { v };
    let all = c.series.iter().flat_map(|s| s.points.iter().copied());
    let (x0, x1) = range(all.clone().map(|p| tx(p.0))).ok_or_else(|| anyhow!("nothing to plot"))?;
    let ys = all.map(|p| ty(p.1)).chain(
        c.bars.iter().flat_map(|&(_, a, b)| [a, b]).filter(|v| !c.log_y || *v > 0.0).map(ty),
    );
    let (y0, y1) = range(ys).ok_or_else(|| anyhow!("nothing to plot"))?;
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |v: f64| LEFT + (tx(v) - x0) / (x1 - x0) * pw;
    let sy = |v: f64| TOP + ph - (ty(v) - y0) / (y1 - y0) * ph;

    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#)?;
    writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#)?;
    writeln!(s, r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="15">{}</text>"#, WIDTH / 2.0, esc(&c.title))?;
    writeln!(s, r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#)?;
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let (vx, vy) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let px = LEFT + f * pw;
        let py = TOP + ph - f * ph;
        writeln!(s, r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#, TOP + ph, TOP + ph + 5.0)?;
        writeln!(s, r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, TOP + ph + 18.0, tick_label(vx, c.log_x))?;
        writeln!(s, r#"<line x1="{:.2}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="black"/>"#, LEFT - 5.0)?;
        writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, LEFT - 8.0, py + 4.0, tick_label(vy, c.log_y))?;
    }
    writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, LEFT + pw / 2.0, HEIGHT - 10.0, esc(&c.x_label))?;
    writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        esc(&c.y_label)
    )?;
    for &(x, a, b) in &c.bars {
        if c.log_y && (a <= 0.0 || b <= 0.0) {
            continue;
        }
        writeln!(s, r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#999999"/>"##, sx(x), sy(a), sx(x), sy(b))?;
    }
    for (i, ser) in c.series.iter().enumerate() {
        if ser.points.is_empty() {
            continue;
        }
        let color = COLORS[i % COLORS.len()];
        let d: Vec<String> = ser
            .points
            .iter()
            .enumerate()
            .map(|(k, &(x, y))| format!("{}{:.2},{:.2}", if k == 0 { "M" } else { "L" }, sx(x), sy(y)))
            .collect();
        let dash = if ser.dashed { r#" stroke-dasharray="6,4""# } else { "" };
        writeln!(s, r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#, d.join(" "))?;
        if !ser.dashed {
            for &(x, y) in &ser.points {
                writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#, sx(x), sy(y))?;
            }
        }
        let ly = TOP + 14.0 + 16.0 * i as f64;
        writeln!(s, r#"<text x="{:.2}" y="{ly:.2}" text-anchor="end" fill="{color}">{}</text>"#, WIDTH - RIGHT - 8.0, esc(&ser.label))?;
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn esc(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders one plot from CSV text.
pub fn emit_plot(kind: PlotKind, csv_text: &str) -> Result<String> {
    let table = Table::parse(csv_text)?;
    render(&chart_for(kind, &table)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_csv_is_an_error() {
        assert!(emit_plot(PlotKind::TailLogLog, "").is_err());
        assert!(emit_plot(PlotKind::TailLogLog, "n,survival_fraction\n").is_err());
    }

    #[test]
    fn rendering_is_deterministic() {
        let csv = "n,survival_fraction\n1,1\n10,0.3\n100,0.1\n";
        let a = emit_plot(PlotKind::TailLogLog, csv).unwrap();
        assert_eq!(a, emit_plot(PlotKind::TailLogLog, csv).unwrap());
        assert!(a.contains("slope -1/2"));
        assert!(a.starts_with("<svg"));
    }

    #[test]
    fn missing_column_is_reported() {
        let e = emit_plot(PlotKind::ChiRatio, "z,chi\n0.1,1\n").unwrap_err();
        assert!(e.to_string().contains("ratio_lo"));
    }

    #[test]
    fn kinds_round_trip() {
        for k in PlotKind::ALL {
            assert_eq!(k.name().parse::<PlotKind>(), Ok(k));
        }
    }
}
