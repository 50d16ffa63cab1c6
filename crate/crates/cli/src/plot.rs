//! Matplotlib scripts that redraw the figures from the CSV tables of a results
//! directory. Scripts locate their inputs relative to their own path, so the
//! directory can be moved before plotting.

use std::path::Path;

use anyhow::{bail, Context};

use crate::config::Config;
use crate::output::{timestamp, OutputDir};

struct Figure {
    anchor: &'static str,
    columns: &'static [&'static str],
    /// Columns of `anchor` naming further CSV files that must exist.
    file_columns: &'static [&'static str],
    scripts: &'static [(&'static str, &'static str)],
}

const PRELUDE: &str = r#"import csv
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))


def read(name):
    with open(os.path.join(HERE, name), newline="") as f:
        rows = list(csv.DictReader(f))
    for row in rows:
        for k, v in row.items():
            try:
                row[k] = float(v) if v not in ("true", "false") else v == "true"
            except ValueError:
                pass
    return rows


def column(rows, key):
    return [r[key] for r in rows]


def save(fig, name):
    path = os.path.join(HERE, name)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    print(path)
"#;

const FIG1: &str = r#"
rows = read("phase_scan.csv")
fig, axes = plt.subplots(1, 2, figsize=(10, 4))
for n in sorted({r["N"] for r in rows}):
    sub = sorted((r for r in rows if r["N"] == n), key=lambda r: r["J_over_h"])
    x = column(sub, "J_over_h")
    axes[0].plot(x, column(sub, "S2_avg"), "o-", ms=3, label=f"N = {n:.0f}")
    axes[1].plot(x, column(sub, "concurrence_nn"), "o-", ms=3, label=f"N = {n:.0f}")
axes[0].set_ylabel(r"$\bar S_2$ (bits)")
axes[1].set_ylabel("nearest-neighbour concurrence")
for ax in axes:
    ax.set_xlabel("J / h")
    for x in (-1, 1):
        ax.axvline(x, color="grey", lw=0.5, ls=":")
    ax.legend()
save(fig, "fig1_phase_scan.png")
"#;

const FIG3: &str = r#"
rows = read("cooling_summary.csv")
phases = [p for p in ("fm", "para", "afm") if any(r["phase"] == p for r in rows)]
sets = [s for s in ("set1", "universal") if any(r["gate_set"] == s for r in rows)]
fig, axes = plt.subplots(len(phases), len(sets), figsize=(5 * len(sets), 3 * len(phases)), squeeze=False)
for i, phase in enumerate(phases):
    for j, gate_set in enumerate(sets):
        ax = axes[i][j]
        for r in rows:
            if r["phase"] != phase or r["gate_set"] != gate_set:
                continue
            trace = read(r["file"])
            step = column(trace, "step")
            mean = column(trace, "mean_S2")
            err = column(trace, "stderr_S2")
            line, = ax.plot(step, mean, label=f"N = {r['N']:.0f}, J/h = {r['J_over_h']:g}")
            ax.fill_between(step, [m - e for m, e in zip(mean, err)], [m + e for m, e in zip(mean, err)],
                            color=line.get_color(), alpha=0.25, lw=0)
        ax.set_title(f"{phase}, {gate_set}")
        ax.set_xlabel("Metropolis step")
        ax.set_ylabel(r"$\bar S_2$ (bits)")
        ax.legend(fontsize="small")
save(fig, "fig3_cooling.png")
"#;

const FIG4: &str = r#"
import math

rows = read("scaling.csv")
fits = read("scaling_fit.csv") if os.path.exists(os.path.join(HERE, "scaling_fit.csv")) else []
fig, axes = plt.subplots(1, 2, figsize=(10, 4))
for ax, quantity, label in ((axes[0], "plateau_length", "plateau length (steps)"),
                            (axes[1], "plateau_gap", "plateau gap (bits)")):
    for gate_set in sorted({r["gate_set"] for r in rows}):
        sub = sorted((r for r in rows if r["gate_set"] == gate_set), key=lambda r: r["N"])
        ns = column(sub, "N")
        points, = ax.plot(ns, column(sub, quantity), "o", label=gate_set)
        for f in fits:
            if f["gate_set"] == gate_set and f["quantity"] == quantity and not math.isnan(f["a"]):
                grid = [ns[0] + k * (ns[-1] - ns[0]) / 50 for k in range(51)]
                ax.plot(grid, [f["a"] * math.exp(f["b"] * n) for n in grid], color=points.get_color(),
                        label=f"{f['a']:.2f} exp({f['b']:.2f} N)")
    ax.set_yscale("log")
    ax.set_xlabel("N")
    ax.set_ylabel(label)
    ax.legend()
save(fig, "fig4_scaling.png")
"#;

fn histogram_script(file_column: &str, xlabel: &str, out: &str) -> String {
    format!(
        r#"
rows = read("spectrum_summary.csv")
labels = list(dict.fromkeys((r["phase"], r["J_over_h"]) for r in rows))
sets = list(dict.fromkeys(r["gate_set"] for r in rows))
fig, axes = plt.subplots(len(labels), len(sets), figsize=(5 * len(sets), 3.2 * len(labels)), squeeze=False)
for r in rows:
    ax = axes[labels.index((r["phase"], r["J_over_h"]))][sets.index(r["gate_set"])]
    h = read(r["{file_column}"])
    left = column(h, "bin_left")
    width = [b - a for a, b in zip(left, column(h, "bin_right"))]
    mid = [a + w / 2 for a, w in zip(left, width)]
    ax.bar(left, column(h, "density"), width=width, align="edge", color="lightgrey", edgecolor="grey", label="data")
    ax.plot(mid, column(h, "reference_poisson"), "b-", label=r"$P_{{\rm Poisson}}$")
    ax.plot(mid, column(h, "reference_wd"), "r--", label=r"$P_{{\rm WD}}$")
    coupling = "" if r["J_over_h"] == "" else f", J/h = {{r['J_over_h']:g}}"
    ax.set_title(f"{{r['phase']}}{{coupling}}, {{r['gate_set']}}: mean r = {{r['rbar']:.3f}}")
    ax.set_xlabel(r"{xlabel}")
    ax.set_ylabel("density")
    ax.legend(fontsize="small")
save(fig, "{out}")
"#
    )
}

const FIGURES: &[Figure] = &[
    Figure {
        anchor: "phase_scan.csv",
        columns: &["J_over_h", "N", "S2_avg", "concurrence_nn"],
        file_columns: &[],
        scripts: &[("fig1_phase_scan.py", FIG1)],
    },
    Figure {
        anchor: "cooling_summary.csv",
        columns: &["phase", "J_over_h", "gate_set", "N", "file"],
        file_columns: &["file"],
        scripts: &[("fig3_cooling.py", FIG3)],
    },
    Figure {
        anchor: "scaling.csv",
        columns: &["gate_set", "N", "plateau_length", "plateau_gap"],
        file_columns: &[],
        scripts: &[("fig4_scaling.py", FIG4)],
    },
    Figure {
        anchor: "spectrum_summary.csv",
        columns: &["phase", "J_over_h", "gate_set", "rbar", "raw_file", "tilde_file"],
        file_columns: &["raw_file", "tilde_file"],
        scripts: &[("fig5_spectrum.py", ""), ("fig6_spectrum_raw.py", "")],
    },
];

/// Checks the header of `name` and that every file named in `file_columns` exists.
fn check_table(dir: &Path, name: &str, columns: &[&str], file_columns: &[&str]) -> anyhow::Result<()> {
    let path = dir.join(name);
    let mut reader = csv::Reader::from_path(&path).with_context(|| format!("reading {}", path.display()))?;
    let header = reader.headers()?.clone();
    for c in columns {
        if !header.iter().any(|h| h == *c) {
            bail!("{name} has no column {c:?}");
        }
    }
    let idx: Vec<usize> = file_columns.iter().map(|c| header.iter().position(|h| h == *c).expect("checked")).collect();
    for record in reader.records() {
        let record = record?;
        for &i in &idx {
            let f = &record[i];
            if !dir.join(f).is_file() {
                bail!("{name} references missing file {f}");
            }
        }
    }
    Ok(())
}

/// Writes one script per figure whose input tables are present in
/// `config.out`, plus a manifest. Returns the script names.
pub fn write_scripts(config: &Config) -> anyhow::Result<Vec<String>> {
    let dir = &config.out;
    let started_at = timestamp();
    let present: Vec<&Figure> = FIGURES.iter().filter(|f| dir.join(f.anchor).is_file()).collect();
    if present.is_empty() {
        bail!("no results to plot: {} not found", dir.join(FIGURES[0].anchor).display());
    }
    let mut out = OutputDir::create(dir)?;
    let mut notes = Vec::new();
    for fig in FIGURES {
        if !present.iter().any(|p| p.anchor == fig.anchor) {
            notes.push(format!("skipped figures from {}: file absent", fig.anchor));
            continue;
        }
        check_table(dir, fig.anchor, fig.columns, fig.file_columns)?;
        for &(name, body) in fig.scripts {
            let body = match name {
                "fig5_spectrum.py" => histogram_script("tilde_file", r"$\tilde r$", "fig5_spectrum.png"),
                "fig6_spectrum_raw.py" => histogram_script("raw_file", "$r$", "fig6_spectrum_raw.png"),
                _ => body.to_owned(),
            };
            out.write_bytes(name, format!("{PRELUDE}{body}").as_bytes())?;
        }
    }
    if dir.join("scaling.csv").is_file() && !dir.join("scaling_fit.csv").is_file() {
        notes.push("scaling_fit.csv absent; fig4 shows data without fits".into());
    }
    notes.push("Run each script with python3; it writes a PNG next to itself.".into());
    let scripts = out.entries().iter().map(|e| e.path.clone()).collect();
    out.finish("plot", config, 1, started_at, notes)?;
    Ok(scripts)
}
