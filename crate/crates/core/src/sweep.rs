//! Parameter sweep over `(pop_size, n_max)` for the continuous PPA.

use std::fmt::Write as _;
use std::fs;
use std::ops::RangeInclusive;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::benchmark::BenchmarkFunction;
use crate::error::{invalid, Error, Result};
use crate::ppa::{run_ppa, PpaParams};
use crate::rng::{derive_seed, str_word};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub pop_sizes: Vec<usize>,
    pub n_maxes: Vec<usize>,
    pub runs_per_cell: usize,
    pub evals_per_run: usize,
    pub base_seed: u64,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self {
            pop_sizes: (1..=40).collect(),
            n_maxes: (1..=10).collect(),
            runs_per_cell: 10,
            evals_per_run: 10_000,
            base_seed: 0,
        }
    }
}

impl SweepGrid {
    pub fn cell_count(&self) -> usize {
        self.pop_sizes.len() * self.n_maxes.len()
    }

    pub fn total_evaluations(&self) -> u64 {
        (self.cell_count() * self.runs_per_cell) as u64 * self.evals_per_run as u64
    }

    fn validate(&self) -> Result<()> {
        if self.pop_sizes.is_empty() || self.n_maxes.is_empty() {
            return Err(invalid("sweep grid has no cells"));
        }
        if self.runs_per_cell == 0 || self.evals_per_run == 0 {
            return Err(invalid(
                "runs per cell and evaluations per run must be positive",
            ));
        }
        if self.pop_sizes.contains(&0) || self.n_maxes.contains(&0) {
            return Err(invalid("pop_size and n_max values must be positive"));
        }
        Ok(())
    }
}

/// Seed for one run, derived from its cell coordinates rather than from its
/// position in the execution order.
pub fn cell_seed(
    base: u64,
    function: BenchmarkFunction,
    pop_size: usize,
    n_max: usize,
    run: usize,
) -> u64 {
    derive_seed(&[
        base,
        str_word(function.name()),
        pop_size as u64,
        n_max as u64,
        run as u64,
    ])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub pop_size: usize,
    pub n_max: usize,
    pub median_best: f64,
    pub run_bests: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub function: BenchmarkFunction,
    /// Sorted by `(pop_size, n_max)`.
    pub cells: Vec<CellResult>,
    pub evaluations: u64,
}

/// Median; the mean of the middle pair for even lengths.
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of an empty slice");
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

pub fn run_sweep(function: BenchmarkFunction, grid: &SweepGrid) -> Result<SweepResult> {
    grid.validate()?;
    let mut cells: Vec<(usize, usize)> = grid
        .pop_sizes
        .iter()
        .flat_map(|&p| grid.n_maxes.iter().map(move |&n| (p, n)))
        .collect();
    cells.sort_unstable();
    cells.dedup();

    let jobs: Vec<(usize, usize, usize)> = cells
        .iter()
        .flat_map(|&(p, n)| (0..grid.runs_per_cell).map(move |r| (p, n, r)))
        .collect();
    let outcomes: Vec<(f64, usize)> = jobs
        .par_iter()
        .map(|&(p, n, r)| {
            let params = PpaParams::new(p, n, grid.evals_per_run)?;
            let rec = run_ppa(
                function,
                params,
                cell_seed(grid.base_seed, function, p, n, r),
            )?;
            Ok((
                rec.final_best.objective,
                rec.trajectory.last().map_or(0, |t| t.0),
            ))
        })
        .collect::<Result<_>>()?;

    let evaluations = outcomes.iter().map(|o| o.1 as u64).sum();
    let cells = cells
        .iter()
        .zip(outcomes.chunks(grid.runs_per_cell))
        .map(|(&(pop_size, n_max), runs)| {
            let run_bests: Vec<f64> = runs.iter().map(|r| r.0).collect();
            CellResult {
                pop_size,
                n_max,
                median_best: median(&run_bests),
                run_bests,
            }
        })
        .collect();
    Ok(SweepResult {
        function,
        cells,
        evaluations,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    pub pop_sizes: RangeInclusive<usize>,
    pub n_maxes: RangeInclusive<usize>,
}

impl Window {
    /// The region `1 <= pop_size <= 4`, `1 <= n_max <= 9` where the PPA does
    /// measurably better.
    pub fn reference() -> Self {
        Self {
            pop_sizes: 1..=4,
            n_maxes: 1..=9,
        }
    }

    pub fn contains(&self, pop_size: usize, n_max: usize) -> bool {
        self.pop_sizes.contains(&pop_size) && self.n_maxes.contains(&n_max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanSd {
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator); zero for one value.
    pub sd: f64,
    pub count: usize,
}

impl MeanSd {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let sd = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Self { mean, sd, count: n }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowStats {
    pub inside: MeanSd,
    pub outside: MeanSd,
}

/// Mean and sample SD of the cell medians inside and outside `window`.
pub fn window_stats(result: &SweepResult, window: &Window) -> Result<WindowStats> {
    let (inside, outside): (Vec<&CellResult>, Vec<&CellResult>) = result
        .cells
        .iter()
        .partition(|c| window.contains(c.pop_size, c.n_max));
    if inside.is_empty() || outside.is_empty() {
        return Err(invalid(format!(
            "window splits the grid into {} inside and {} outside cells; both must be non-empty",
            inside.len(),
            outside.len()
        )));
    }
    let medians = |cells: &[&CellResult]| cells.iter().map(|c| c.median_best).collect::<Vec<_>>();
    Ok(WindowStats {
        inside: MeanSd::of(&medians(&inside)),
        outside: MeanSd::of(&medians(&outside)),
    })
}

pub const CSV_HEADER: &str = "function,pop_size,n_max,median_best";

/// CSV text, one row per cell in `(pop_size, n_max)` order; reals in
/// shortest round-trip scientific notation.
pub fn csv_string(result: &SweepResult) -> String {
    let mut out = String::new();
    writeln!(out, "{CSV_HEADER}").unwrap();
    for c in &result.cells {
        writeln!(
            out,
            "{},{},{},{:e}",
            result.function, c.pop_size, c.n_max, c.median_best
        )
        .unwrap();
    }
    out
}

pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<()> {
    fs::write(path, csv_string(result)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CsvRow {
    pub function: BenchmarkFunction,
    pub pop_size: usize,
    pub n_max: usize,
    pub median_best: f64,
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == CSV_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header {CSV_HEADER:?}"),
            })
        }
    }
    lines
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| {
            let bad = |m: String| Error::Parse {
                line: i + 1,
                message: m,
            };
            let fields: Vec<&str> = l.split(',').collect();
            if fields.len() != 4 {
                return Err(bad(format!("expected 4 fields, found {}", fields.len())));
            }
            Ok(CsvRow {
                function: fields[0].parse().map_err(|e: Error| bad(e.to_string()))?,
                pop_size: fields[1]
                    .parse()
                    .map_err(|_| bad(format!("bad pop_size {:?}", fields[1])))?,
                n_max: fields[2]
                    .parse()
                    .map_err(|_| bad(format!("bad n_max {:?}", fields[2])))?,
                median_best: fields[3]
                    .parse()
                    .map_err(|_| bad(format!("bad median {:?}", fields[3])))?,
            })
        })
        .collect()
}

/// Heatmap of log10 cell medians with the window outlined in dashes.
pub fn render_svg(result: &SweepResult, window: &Window) -> String {
    const CELL: f64 = 16.0;
    const MARGIN: f64 = 40.0;
    let mut pops: Vec<usize> = result.cells.iter().map(|c| c.pop_size).collect();
    let mut nmaxes: Vec<usize> = result.cells.iter().map(|c| c.n_max).collect();
    pops.dedup();
    nmaxes.sort_unstable();
    nmaxes.dedup();
    let logs: Vec<f64> = result
        .cells
        .iter()
        .map(|c| c.median_best.max(1e-300).log10())
        .collect();
    let lo = logs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };

    let w = MARGIN + CELL * nmaxes.len() as f64 + 10.0;
    let h = MARGIN + CELL * pops.len() as f64 + 10.0;
    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="9">"#
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text x="{MARGIN}" y="12">{} (log10 median best)</text>"#,
        result.function
    )
    .unwrap();
    for (c, l) in result.cells.iter().zip(&logs) {
        let row = pops.iter().position(|&p| p == c.pop_size).unwrap();
        let col = nmaxes.iter().position(|&n| n == c.n_max).unwrap();
        let t = (l - lo) / span;
        let (r, g, b) = (
            (255.0 * t) as u8,
            (200.0 * (1.0 - t)) as u8,
            (255.0 * (1.0 - t)) as u8,
        );
        writeln!(
            svg,
            r#"<rect x="{}" y="{}" width="{CELL}" height="{CELL}" fill="rgb({r},{g},{b})"><title>pop {} nmax {}: {:e}</title></rect>"#,
            MARGIN + col as f64 * CELL,
            MARGIN + row as f64 * CELL,
            c.pop_size,
            c.n_max,
            c.median_best
        )
        .unwrap();
    }
    let rows: Vec<usize> = (0..pops.len())
        .filter(|&i| window.pop_sizes.contains(&pops[i]))
        .collect();
    let cols: Vec<usize> = (0..nmaxes.len())
        .filter(|&i| window.n_maxes.contains(&nmaxes[i]))
        .collect();
    if let (Some(&r0), Some(&r1), Some(&c0), Some(&c1)) =
        (rows.first(), rows.last(), cols.first(), cols.last())
    {
        writeln!(
            svg,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black" stroke-width="2" stroke-dasharray="4 3"/>"#,
            MARGIN + c0 as f64 * CELL,
            MARGIN + r0 as f64 * CELL,
            (c1 - c0 + 1) as f64 * CELL,
            (r1 - r0 + 1) as f64 * CELL
        )
        .unwrap();
    }
    svg.push_str("</svg>\n");
    svg
}
