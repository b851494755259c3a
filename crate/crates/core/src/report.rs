//! CSV serialization of run outputs, the matching metadata reader, and a
//! gnuplot script emitter that lays out the standard survey plots.
//!
//! Every CSV is self-describing: `#`-prefixed comment lines carry the
//! artifact version, seed, sample count, binning, ensemble, family and
//! q list, followed by a header row and plain comma-separated data. Floats
//! are printed in shortest round-trip form, so identical runs serialize to
//! identical bytes.

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::path::Path;

use crate::belldiag::BellCurvePoint;
use crate::entropy::EntropyFamily;
use crate::pipeline::{Channel, RunConfig, SampleRecord};
use crate::stats::ProfileRow;
use crate::{Error, Result};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Which per-bin statistic a profile run is about; all columns are always
/// written, the choice is recorded in the metadata and drives plot layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Mean,
    Dispersion,
    Derivative,
    Ratio,
}

impl std::fmt::Display for Quantity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Quantity::Mean => "mean",
            Quantity::Dispersion => "dispersion",
            Quantity::Derivative => "derivative",
            Quantity::Ratio => "ratio",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mean" => Ok(Quantity::Mean),
            "dispersion" => Ok(Quantity::Dispersion),
            "derivative" => Ok(Quantity::Derivative),
            "ratio" => Ok(Quantity::Ratio),
            other => Err(Error::InvalidConfig(format!("unknown quantity {other:?}"))),
        }
    }
}

fn q_list_string(config: &RunConfig) -> String {
    config
        .q_list
        .iter()
        .map(|q| q.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn write_common_meta<W: Write>(w: &mut W, kind: &str, config: &RunConfig) -> io::Result<()> {
    writeln!(w, "# qent-{kind} v{ARTIFACT_VERSION}")?;
    writeln!(w, "# seed: {}", config.seed)?;
    writeln!(w, "# samples: {}", config.samples)?;
    writeln!(w, "# bins: {}", config.bins)?;
    writeln!(w, "# ensemble: {}", config.ensemble)?;
    writeln!(w, "# family: {}", config.family)?;
    writeln!(w, "# q_list: {}", q_list_string(config))?;
    writeln!(
        w,
        "# log_convention: q-entropies in nats, entanglement of formation in bits"
    )
}

/// One row per sampled state: C^2, entanglement of formation, then one
/// column per tracked channel.
pub fn write_scatter_csv<W: Write>(
    w: &mut W,
    config: &RunConfig,
    records: &[SampleRecord],
) -> io::Result<()> {
    write_common_meta(w, "scatter", config)?;
    let labels: Vec<String> = config.channels().iter().map(Channel::label).collect();
    writeln!(w, "c2,eof_bits,{}", labels.join(","))?;
    for rec in records {
        write!(w, "{},{}", rec.c_squared, rec.eof_bits)?;
        for v in &rec.values {
            write!(w, ",{v}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Binned profile of one channel; undefined derivatives and ratios are
/// empty fields with `ratio_defined` 0.
pub fn write_profile_csv<W: Write>(
    w: &mut W,
    config: &RunConfig,
    quantity: Quantity,
    channel: &Channel,
    rows: &[ProfileRow],
) -> io::Result<()> {
    write_common_meta(w, "profile", config)?;
    writeln!(w, "# q: {}", channel.q)?;
    writeln!(w, "# quantity: {quantity}")?;
    writeln!(
        w,
        "bin_center_c2,count,mean,dispersion,derivative,ratio,ratio_defined,low_confidence"
    )?;
    for row in rows {
        let derivative = row.derivative.map_or(String::new(), |d| d.to_string());
        let ratio = row.ratio.map_or(String::new(), |r| r.to_string());
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            row.bin_center,
            row.count,
            row.mean,
            row.dispersion,
            derivative,
            ratio,
            u8::from(row.ratio.is_some()),
            u8::from(row.low_confidence)
        )?;
    }
    Ok(())
}

/// The analytic Bell-diagonal R_inf(C^2) curve.
pub fn write_bell_curve_csv<W: Write>(w: &mut W, points: &[BellCurvePoint]) -> io::Result<()> {
    writeln!(w, "# qent-bell-curve v{ARTIFACT_VERSION}")?;
    writeln!(w, "# points: {}", points.len())?;
    writeln!(w, "# log_convention: nats")?;
    writeln!(w, "c2,r_infinity")?;
    for p in points {
        writeln!(w, "{},{}", p.c_squared, p.r_infinity)?;
    }
    Ok(())
}

/// File name for one channel of a multi-channel profile run:
/// `base.csv` + `renyi_q0.5` -> `base_renyi_q0.5.csv`.
pub fn channel_file_name(base: &Path, channel: &Channel) -> std::path::PathBuf {
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "profile".to_string());
    let ext = base
        .extension()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "csv".to_string());
    base.with_file_name(format!("{stem}_{}.{ext}", channel.label()))
}

/// Grid specification for the analytic curve: either a comma-separated list
/// of C^2 values (`0.16,0.5,1`) or a uniform range `start:end:count` with
/// inclusive endpoints.
pub fn parse_grid_spec(spec: &str) -> Result<Vec<f64>> {
    let t = spec.trim();
    if t.is_empty() {
        return Err(Error::InvalidConfig("empty grid specification".into()));
    }
    let parse_value = |s: &str| -> Result<f64> {
        let v: f64 = s
            .trim()
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("cannot parse grid value {s:?}")))?;
        if !v.is_finite() {
            return Err(Error::InvalidConfig(format!("non-finite grid value {s:?}")));
        }
        Ok(v)
    };
    if t.contains(':') {
        let parts: Vec<&str> = t.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidConfig(format!(
                "range grid must be start:end:count, got {spec:?}"
            )));
        }
        let start = parse_value(parts[0])?;
        let end = parse_value(parts[1])?;
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("cannot parse grid count {:?}", parts[2])))?;
        if !(2..=1_000_000).contains(&count) {
            return Err(Error::InvalidConfig(format!(
                "grid count {count} outside 2..=1000000"
            )));
        }
        if end <= start {
            return Err(Error::InvalidConfig(format!(
                "grid range end {end} not above start {start}"
            )));
        }
        let step = (end - start) / (count - 1) as f64;
        Ok((0..count).map(|i| start + step * i as f64).collect())
    } else {
        t.split(',').map(parse_value).collect()
    }
}

/// Parsed `#` metadata header of a qent CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvMeta {
    /// `scatter`, `profile` or `bell-curve`.
    pub kind: String,
    pub version: String,
    pub fields: BTreeMap<String, String>,
    pub columns: Vec<String>,
}

impl CsvMeta {
    pub fn field(&self, key: &str) -> Option<&str> {
        self.fields.get(key).map(String::as_str)
    }
}

/// Parse the metadata header and column row from CSV text. `source` only
/// names the input in error messages.
pub fn parse_csv_meta(text: &str, source: &str) -> Result<CsvMeta> {
    let bad = |reason: &str| Error::MalformedInput {
        path: source.to_string(),
        reason: reason.to_string(),
    };
    let mut lines = text.lines();
    let first = lines.next().ok_or_else(|| bad("empty file"))?;
    let first = first
        .strip_prefix("# qent-")
        .ok_or_else(|| bad("first line is not a `# qent-<kind> v<version>` tag"))?;
    let (kind, version) = first
        .split_once(" v")
        .ok_or_else(|| bad("missing version in the tag line"))?;
    if kind.is_empty() || version.is_empty() {
        return Err(bad("empty kind or version in the tag line"));
    }
    let mut fields = BTreeMap::new();
    let mut columns = Vec::new();
    for line in lines {
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once(':') {
                fields.insert(key.trim().to_string(), value.trim().to_string());
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        columns = line.split(',').map(|c| c.trim().to_string()).collect();
        break;
    }
    if columns.is_empty() {
        return Err(bad("no header row after the metadata block"));
    }
    Ok(CsvMeta {
        kind: kind.to_string(),
        version: version.to_string(),
        fields,
        columns,
    })
}

/// Read and parse the metadata header of a CSV on disk.
pub fn read_csv_meta(path: &Path) -> Result<CsvMeta> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_csv_meta(&text, &path.display().to_string())
}

fn family_symbol(family: &str) -> &'static str {
    match family.parse::<EntropyFamily>() {
        Ok(EntropyFamily::Tsallis) => "S_q",
        Ok(EntropyFamily::TsallisNormalized) => "S'_q",
        _ => "R_q",
    }
}

fn profile_axis_and_column(meta: &CsvMeta) -> (String, usize) {
    let symbol = family_symbol(meta.field("family").unwrap_or("renyi"));
    match meta
        .field("quantity")
        .and_then(|q| q.parse::<Quantity>().ok())
    {
        Some(Quantity::Dispersion) => (format!("sigma({symbol})"), 4),
        Some(Quantity::Derivative) => (format!("d<{symbol}>/d(C^2)"), 5),
        Some(Quantity::Ratio) => ("r".to_string(), 6),
        _ => (format!("<{symbol}>"), 3),
    }
}

/// Emit a gnuplot script that plots the given CSVs against C^2: one series
/// per profile or bell-curve file, one series per entropy column of a
/// scatter file. The analytic bell curve is drawn dashed. The script only
/// references the CSVs; it computes nothing.
pub fn write_plot_script<W: Write>(w: &mut W, inputs: &[(String, CsvMeta)]) -> Result<()> {
    if inputs.is_empty() {
        return Err(Error::InvalidConfig("no input CSVs given".into()));
    }
    let io_err = |source: io::Error| Error::Io {
        path: "<plot script>".to_string(),
        source,
    };
    let mut out = Vec::new();
    writeln!(out, "# generated by qent v{ARTIFACT_VERSION}").map_err(io_err)?;
    writeln!(out, "set datafile separator \",\"").map_err(io_err)?;
    writeln!(out, "set datafile missing \"\"").map_err(io_err)?;
    writeln!(out, "set datafile commentschars \"#\"").map_err(io_err)?;
    writeln!(out, "set xlabel \"C^2\"").map_err(io_err)?;

    let ylabel = inputs
        .iter()
        .find(|(_, m)| m.kind == "profile")
        .map(|(_, m)| profile_axis_and_column(m).0)
        .or_else(|| {
            inputs
                .iter()
                .find(|(_, m)| m.kind == "scatter")
                .map(|(_, m)| family_symbol(m.field("family").unwrap_or("renyi")).to_string())
        })
        .unwrap_or_else(|| "R_inf".to_string());
    writeln!(out, "set ylabel \"{ylabel}\"").map_err(io_err)?;
    writeln!(out, "set key top right").map_err(io_err)?;

    let mut series = Vec::new();
    for (path, meta) in inputs {
        match meta.kind.as_str() {
            "profile" => {
                let (_, column) = profile_axis_and_column(meta);
                let mut title = format!("q={}", meta.field("q").unwrap_or("?"));
                if meta.field("ensemble") == Some("bell-diagonal") {
                    title.push_str(" (Bell diagonal)");
                }
                series.push(format!(
                    "\"{path}\" using 1:{column} with lines title \"{title}\""
                ));
            }
            "bell-curve" => {
                series.push(format!(
                    "\"{path}\" using 1:2 with lines dashtype 2 title \"Bell-diagonal R_inf (analytic)\""
                ));
            }
            "scatter" => {
                for (idx, col) in meta.columns.iter().enumerate().skip(2) {
                    series.push(format!(
                        "\"{path}\" using 1:{} with points pointtype 7 pointsize 0.2 title \"{col}\"",
                        idx + 1
                    ));
                }
            }
            other => {
                return Err(Error::MalformedInput {
                    path: path.clone(),
                    reason: format!("unsupported CSV kind {other:?}"),
                });
            }
        }
    }
    writeln!(out, "plot \\").map_err(io_err)?;
    for (i, s) in series.iter().enumerate() {
        let sep = if i + 1 < series.len() { ", \\" } else { "" };
        writeln!(out, "    {s}{sep}").map_err(io_err)?;
    }
    w.write_all(&out).map_err(io_err)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::EntropicOrder;
    use crate::sampler::EnsembleKind;

    fn config() -> RunConfig {
        RunConfig {
            samples: 100,
            seed: 7,
            bins: 10,
            workers: 1,
            q_list: vec![EntropicOrder::Finite(0.5), EntropicOrder::Finite(2.0)],
            family: EntropyFamily::Renyi,
            ensemble: EnsembleKind::Full,
        }
    }

    #[test]
    fn scatter_header_and_shape() {
        let cfg = config();
        let records = vec![SampleRecord {
            c_squared: 0.25,
            eof_bits: 0.5,
            values: vec![1.0, 0.75],
        }];
        let mut buf = Vec::new();
        write_scatter_csv(&mut buf, &cfg, &records).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# qent-scatter v"));
        assert!(text.contains("# seed: 7"));
        assert!(text.contains("c2,eof_bits,renyi_q0.5,renyi_q2"));
        assert!(text.ends_with("0.25,0.5,1,0.75\n"));
    }

    #[test]
    fn meta_roundtrip_through_parser() {
        let cfg = config();
        let mut buf = Vec::new();
        write_scatter_csv(&mut buf, &cfg, &[]).unwrap();
        let meta = parse_csv_meta(std::str::from_utf8(&buf).unwrap(), "test").unwrap();
        assert_eq!(meta.kind, "scatter");
        assert_eq!(meta.version, ARTIFACT_VERSION);
        assert_eq!(meta.field("q_list"), Some("0.5,2"));
        assert_eq!(meta.field("ensemble"), Some("full"));
        assert_eq!(meta.columns[0], "c2");
    }

    #[test]
    fn profile_csv_handles_undefined_fields() {
        let cfg = config();
        let rows = vec![
            ProfileRow {
                bin_center: 0.05,
                count: 3,
                mean: 1.25,
                dispersion: 0.5,
                derivative: Some(-1.0),
                ratio: Some(0.5),
                low_confidence: true,
            },
            ProfileRow {
                bin_center: 0.15,
                count: 20,
                mean: 1.0,
                dispersion: 0.25,
                derivative: None,
                ratio: None,
                low_confidence: false,
            },
        ];
        let channel = &cfg.channels()[0];
        let mut buf = Vec::new();
        write_profile_csv(&mut buf, &cfg, Quantity::Ratio, channel, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("# q: 0.5"));
        assert!(text.contains("# quantity: ratio"));
        assert!(text.contains("0.05,3,1.25,0.5,-1,0.5,1,1"));
        assert!(text.contains("0.15,20,1,0.25,,,0,0"));
    }

    #[test]
    fn grid_spec_forms() {
        assert_eq!(parse_grid_spec("1.0").unwrap(), vec![1.0]);
        assert_eq!(parse_grid_spec("0.16, 1").unwrap(), vec![0.16, 1.0]);
        let g = parse_grid_spec("0.005:1:200").unwrap();
        assert_eq!(g.len(), 200);
        assert!((g[0] - 0.005).abs() < 1e-15);
        assert!((g[199] - 1.0).abs() < 1e-15);
        assert!(parse_grid_spec("").is_err());
        assert!(parse_grid_spec("a,b").is_err());
        assert!(parse_grid_spec("0:1").is_err());
        assert!(parse_grid_spec("0:1:1").is_err());
        assert!(parse_grid_spec("1:0:5").is_err());
        assert!(parse_grid_spec("nan").is_err());
    }

    #[test]
    fn meta_parser_rejects_garbage() {
        assert!(parse_csv_meta("", "t").is_err());
        assert!(parse_csv_meta("hello", "t").is_err());
        assert!(parse_csv_meta("# qent-scatter\n", "t").is_err());
        assert!(parse_csv_meta("# qent-scatter v0.1.0\n# only: comments\n", "t").is_err());
    }

    #[test]
    fn plot_script_layout() {
        let cfg = config();
        let mut profile = Vec::new();
        write_profile_csv(&mut profile, &cfg, Quantity::Mean, &cfg.channels()[0], &[]).unwrap();
        let meta = parse_csv_meta(std::str::from_utf8(&profile).unwrap(), "p").unwrap();

        let mut bell = Vec::new();
        write_bell_curve_csv(&mut bell, &[]).unwrap();
        let bell_meta = parse_csv_meta(std::str::from_utf8(&bell).unwrap(), "b").unwrap();

        let mut script = Vec::new();
        write_plot_script(
            &mut script,
            &[
                ("mean.csv".to_string(), meta),
                ("bell.csv".to_string(), bell_meta),
            ],
        )
        .unwrap();
        let text = String::from_utf8(script).unwrap();
        assert!(text.contains("set xlabel \"C^2\""));
        assert!(text.contains("set ylabel \"<R_q>\""));
        assert!(text.contains("\"mean.csv\" using 1:3 with lines title \"q=0.5\""));
        assert!(text.contains("\"bell.csv\" using 1:2 with lines dashtype 2"));
    }

    #[test]
    fn read_csv_meta_reports_missing_path() {
        let err = read_csv_meta(Path::new("/definitely/not/here.csv")).unwrap_err();
        match err {
            Error::Io { path, .. } => assert!(path.contains("not/here.csv")),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn channel_file_names() {
        let cfg = config();
        let base = Path::new("out/fig.csv");
        let name = channel_file_name(base, &cfg.channels()[1]);
        assert_eq!(name, Path::new("out/fig_renyi_q2.csv"));
    }
}
