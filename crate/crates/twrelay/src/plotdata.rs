//! Turns sweep CSVs into per-curve whitespace-separated data files plus a
//! gnuplot stub.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::sweep::CSV_HEADER;

#[derive(Debug)]
pub struct PlotError(pub String);

impl fmt::Display for PlotError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "plot-data: {}", self.0)
    }
}

impl std::error::Error for PlotError {}

struct Row {
    n: String,
    kappa: String,
    z: String,
    se_mc_mean: String,
    se_lemma1: String,
    sum_se: String,
}

fn parse_rows(text: &str) -> Result<Vec<Row>, PlotError> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| PlotError("empty CSV".into()))?;
    if header != CSV_HEADER {
        return Err(PlotError(format!("unexpected CSV header {header:?}")));
    }
    let n_cols = CSV_HEADER.split(',').count();
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let fields: Vec<&str> = l.split(',').collect();
            if fields.len() != n_cols {
                return Err(PlotError(format!(
                    "row {}: expected {n_cols} fields, got {}",
                    i + 2,
                    fields.len()
                )));
            }
            for (idx, name) in [(0, "N"), (3, "se_mc_mean"), (7, "sum_se")] {
                if fields[idx].parse::<f64>().is_err() {
                    return Err(PlotError(format!(
                        "row {}: malformed {name} value {:?}",
                        i + 2,
                        fields[idx]
                    )));
                }
            }
            Ok(Row {
                n: fields[0].to_string(),
                kappa: fields[1].to_string(),
                z: fields[2].to_string(),
                se_mc_mean: fields[3].to_string(),
                se_lemma1: fields[5].to_string(),
                sum_se: fields[7].to_string(),
            })
        })
        .collect()
}

/// Splits a sweep CSV into one `(N, SE)` file per curve under `out_dir`,
/// named `fig<k>_<param>=<value>_<source>.dat`, and writes a `plot.gp`
/// stub referencing them. κ sweeps become figure 1 (per-device SE),
/// scaling-law sweeps figure 2 (sum SE). Returns the file paths in
/// creation order, which is stable across runs.
pub fn emit_plot_data(csv_path: &Path, out_dir: &Path) -> Result<Vec<PathBuf>, PlotError> {
    let text = fs::read_to_string(csv_path)
        .map_err(|e| PlotError(format!("{}: {e}", csv_path.display())))?;
    let rows = parse_rows(&text)?;
    if rows.is_empty() {
        return Err(PlotError("CSV has no data rows".into()));
    }
    let scaling = rows.iter().any(|r| !r.z.is_empty());
    let (fig, param) = if scaling { (2, "z") } else { (1, "kappa") };

    // group by parameter value, preserving first-appearance order
    let mut values: Vec<&str> = Vec::new();
    for r in &rows {
        let v = if scaling { r.z.as_str() } else { r.kappa.as_str() };
        if !values.contains(&v) {
            values.push(v);
        }
    }

    fs::create_dir_all(out_dir)
        .map_err(|e| PlotError(format!("{}: {e}", out_dir.display())))?;
    let mut written = Vec::new();
    for v in &values {
        let curve: Vec<&Row> = rows
            .iter()
            .filter(|r| (if scaling { r.z.as_str() } else { r.kappa.as_str() }) == *v)
            .collect();
        let mc_path = out_dir.join(format!("fig{fig}_{param}={v}_mc.dat"));
        let mut mc = String::new();
        for r in &curve {
            let se = if scaling { &r.sum_se } else { &r.se_mc_mean };
            mc.push_str(&format!("{} {}\n", r.n, se));
        }
        fs::write(&mc_path, mc).map_err(|e| PlotError(format!("{}: {e}", mc_path.display())))?;
        written.push(mc_path);

        if curve.iter().all(|r| !r.se_lemma1.is_empty()) {
            let an_path = out_dir.join(format!("fig{fig}_{param}={v}_lemma1.dat"));
            let mut an = String::new();
            for r in &curve {
                an.push_str(&format!("{} {}\n", r.n, r.se_lemma1));
            }
            fs::write(&an_path, an)
                .map_err(|e| PlotError(format!("{}: {e}", an_path.display())))?;
            written.push(an_path);
        }
    }

    let gp_path = out_dir.join("plot.gp");
    let mut gp = fs::File::create(&gp_path)
        .map_err(|e| PlotError(format!("{}: {e}", gp_path.display())))?;
    let ylabel = if scaling { "sum SE (bit/s/Hz)" } else { "SE per device (bit/s/Hz)" };
    let mut plot_items = Vec::new();
    for path in &written {
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let style = if name.ends_with("_mc.dat") { "points" } else { "lines" };
        plot_items.push(format!("    '{name}' with {style} title '{}'", name.trim_end_matches(".dat")));
    }
    write!(
        gp,
        "set xlabel 'number of relay antennas N'\nset ylabel '{ylabel}'\nset key bottom right\nplot \\\n{}\n",
        plot_items.join(", \\\n")
    )
    .map_err(|e| PlotError(format!("{}: {e}", gp_path.display())))?;
    written.push(gp_path);
    Ok(written)
}
