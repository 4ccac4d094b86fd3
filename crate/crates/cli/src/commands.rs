//! The four subcommands. Each writes its files into the output directory and returns a
//! short human-readable summary.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use squeeze_core::drift::{
    delay_scan, find_optimal_delay, DelaySearch, DelaySetting, Lineshape, LineshapeKind,
    SqueezeTrace, TraceAxis,
};
use squeeze_core::fit::{fit_model, FitResult, MeasuredScan, ScanMetadata, ScanRow};
use squeeze_core::ledger::{white_light_correction, PathElement};
use squeeze_core::physics::{
    compensation_delay, compensation_length, on_resonance_levels, optimal_phase, spectrum_closed,
    total_phase,
};
use squeeze_core::units::to_db;

use crate::config::LoadedConfig;
use crate::error::{CliError, Result};
use crate::svg::{Plot, Series, Style, PALETTE};

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub demod_hz: Option<f64>,
    pub timestamp: bool,
}

/// Files written and text for the terminal.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

struct Writer<'a> {
    opts: &'a RunOptions,
    files: Vec<PathBuf>,
}

impl<'a> Writer<'a> {
    fn new(opts: &'a RunOptions) -> Result<Self> {
        fs::create_dir_all(&opts.out_dir).map_err(|source| CliError::Write {
            path: opts.out_dir.clone(),
            source,
        })?;
        Ok(Self {
            opts,
            files: Vec::new(),
        })
    }

    fn put(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.opts.out_dir.join(name);
        fs::write(&path, contents).map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        })?;
        self.files.push(path);
        Ok(())
    }

    fn csv(
        &mut self,
        name: &str,
        header: &[&str],
        rows: impl IntoIterator<Item = Vec<f64>>,
    ) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let wrap = |e: csv::Error| CliError::Write {
            path: self.opts.out_dir.join(name),
            source: e.into(),
        };
        w.write_record(header).map_err(wrap)?;
        for row in rows {
            w.write_record(row.iter().map(|v| v.to_string()))
                .map_err(wrap)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Write {
            path: self.opts.out_dir.join(name),
            source: e.into_error(),
        })?;
        self.put(
            name,
            &String::from_utf8(bytes).expect("csv output is UTF-8"),
        )
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value).expect("report types serialize");
        text.push('\n');
        self.put(name, &text)
    }

    fn svg(&mut self, name: &str, plot: &Plot) -> Result<()> {
        self.put(name, &plot.render(self.opts.timestamp))
    }

    fn finish(self, summary: String) -> Outcome {
        Outcome {
            files: self.files,
            summary,
        }
    }
}

/// File-name tag for a frequency: `2000000hz`, or `2500.5hz` → `2500p5hz`.
fn freq_tag(f: f64) -> String {
    if f.fract() == 0.0 && f < 1e15 {
        format!("{}hz", f as u64)
    } else {
        format!("{f}hz").replace('.', "p")
    }
}

fn mhz(f: f64) -> String {
    format!("{} MHz", f / 1e6)
}

fn frequencies(cfg: &LoadedConfig, opts: &RunOptions) -> Result<Vec<f64>> {
    match opts.demod_hz {
        Some(f) if f.is_finite() && f >= 0.0 => Ok(vec![f]),
        Some(f) => Err(CliError::Config(format!(
            "--demod-hz must be finite and non-negative, got {f}"
        ))),
        None => Ok(cfg.config.scan.demod_freqs_hz.clone()),
    }
}

fn reject_demod(opts: &RunOptions, command: &str) -> Result<()> {
    match opts.demod_hz {
        Some(_) => Err(CliError::Config(format!(
            "--demod-hz is not used by `{command}`"
        ))),
        None => Ok(()),
    }
}

fn trace_rows(trace: &SqueezeTrace) -> impl Iterator<Item = Vec<f64>> + '_ {
    trace.points.iter().map(|p| vec![p.x, p.linear, p.db])
}

pub fn spectrum(cfg: &LoadedConfig, opts: &RunOptions) -> Result<Outcome> {
    let p = &cfg.params;
    let scan = &cfg.config.scan;
    let detuning = p.scaled_detuning(scan.detuning_hz);
    let n = scan.phase_points;
    let thetas: Vec<f64> = (0..n).map(|i| 2.0 * PI * i as f64 / n as f64).collect();

    let mut w = Writer::new(opts)?;
    let mut summary = String::new();
    let mut overview = Plot::new(
        "Noise vs local-oscillator phase",
        "LO phase θ (rad)",
        "noise rel. shot noise (dB)",
    );
    for (i, f) in frequencies(cfg, opts)?.into_iter().enumerate() {
        let omega = p.scaled_frequency(f);
        let linear: Vec<f64> = thetas
            .iter()
            .map(|&t| spectrum_closed(p, omega, detuning, total_phase(t, p.pump_phase)))
            .collect();
        let trace = SqueezeTrace::from_linear(TraceAxis::PhaseRad, &thetas, &linear)?;
        let tag = freq_tag(f);
        w.csv(
            &format!("spectrum_phase_{tag}.csv"),
            &["theta_rad", "s_linear", "s_db"],
            trace_rows(&trace),
        )?;

        let series = Series::line(
            mhz(f),
            PALETTE[i % PALETTE.len()],
            Style::Solid,
            trace.points.iter().map(|q| (q.x, q.db)),
        );
        let mut plot = Plot::new(
            format!("Noise vs LO phase at {}", mhz(f)),
            "LO phase θ (rad)",
            "noise rel. shot noise (dB)",
        );
        plot.series.push(series.clone());
        w.svg(&format!("spectrum_phase_{tag}.svg"), &plot)?;
        overview.series.push(series);

        let (lo, hi) = (
            trace.min().expect("non-empty"),
            trace.max().expect("non-empty"),
        );
        let _ = write!(
            summary,
            "{}: min {:.3} dB, max {:.3} dB",
            mhz(f),
            lo.db,
            hi.db
        );
        if detuning == 0.0 {
            let (sq, anti) = on_resonance_levels(p, omega);
            let _ = write!(
                summary,
                " (on resonance {:.3} / {:.3} dB)",
                to_db(sq)?,
                to_db(anti)?
            );
        }
        summary.push('\n');
    }
    if overview.series.len() > 1 {
        w.svg("spectrum_phase.svg", &overview)?;
    }

    if let Some(sweep) = &scan.frequency_sweep_hz {
        let rows: Vec<Vec<f64>> = sweep
            .points()
            .into_iter()
            .map(|f| {
                let omega = p.scaled_frequency(f);
                let x = optimal_phase(p, omega, detuning);
                let sq = spectrum_closed(p, omega, detuning, x);
                let anti = spectrum_closed(p, omega, detuning, x + PI);
                Ok(vec![f, sq, to_db(sq)?, anti, to_db(anti)?])
            })
            .collect::<Result<_>>()?;
        let mut plot = Plot::new(
            "Noise vs demodulation frequency",
            "frequency (MHz)",
            "noise rel. shot noise (dB)",
        );
        plot.series.push(Series::line(
            "squeezed",
            PALETTE[0],
            Style::Solid,
            rows.iter().map(|r| (r[0] / 1e6, r[2])),
        ));
        plot.series.push(Series::line(
            "anti-squeezed",
            PALETTE[1],
            Style::Solid,
            rows.iter().map(|r| (r[0] / 1e6, r[4])),
        ));
        w.csv(
            "spectrum_frequency.csv",
            &[
                "freq_hz",
                "squeezed_linear",
                "squeezed_db",
                "anti_squeezed_linear",
                "anti_squeezed_db",
            ],
            rows,
        )?;
        w.svg("spectrum_frequency.svg", &plot)?;
    }
    Ok(w.finish(summary))
}

#[derive(Debug, Serialize)]
struct Prediction {
    compensation_length_m: f64,
    compensation_delay_s: f64,
}

#[derive(Debug, Serialize)]
struct FoundOptimum {
    excess_fiber_m: f64,
    tau_d_s: f64,
    s_bar_linear: f64,
    s_bar_db: f64,
    error: f64,
    interior: bool,
    flat: bool,
}

#[derive(Debug, Serialize)]
struct DelaySidecar {
    demod_freq_hz: f64,
    scaled_frequency: f64,
    lineshape: Lineshape,
    group_index: f64,
    /// First-order compensation for a narrow detuning distribution.
    predicted: Prediction,
    /// Minimum of the averaged noise within the scanned window.
    found: FoundOptimum,
    degenerate: bool,
    note: Option<String>,
}

pub fn delay_scan_cmd(cfg: &LoadedConfig, opts: &RunOptions) -> Result<Outcome> {
    let p = &cfg.params;
    let c = &cfg.config;
    let n_g = c.scan.group_index;
    let grid = c.scan.delay_grid_m.points();
    let delays: Vec<DelaySetting> = grid
        .iter()
        .map(|&l| DelaySetting::from_fiber(l, n_g))
        .collect();
    let search = DelaySearch {
        min_fiber_m: c.scan.delay_grid_m.start_m,
        max_fiber_m: c.scan.delay_grid_m.stop_m,
        grid_step_m: c.scan.delay_grid_m.step_m,
        group_index: n_g,
        tolerance_m: 1e-3,
    };

    let mut w = Writer::new(opts)?;
    let mut summary = String::new();
    let mut overview = Plot::new(
        "Averaged noise vs delay",
        "excess LO fiber (m)",
        "noise rel. shot noise (dB)",
    );
    for (i, f) in frequencies(cfg, opts)?.into_iter().enumerate() {
        let omega = p.scaled_frequency(f);
        let trace = delay_scan(p, omega, &c.lineshape, &delays, &c.quadrature)?;
        let tag = freq_tag(f);
        w.csv(
            &format!("delay_scan_{tag}.csv"),
            &["excess_fiber_m", "s_bar_linear", "s_bar_db", "quad_err"],
            trace
                .points
                .iter()
                .zip(&grid)
                .map(|(q, &l)| vec![l, q.linear, q.db, q.error]),
        )?;

        let opt = find_optimal_delay(p, omega, &c.lineshape, &search, &c.quadrature)?;
        let predicted = Prediction {
            compensation_length_m: compensation_length(p, omega, n_g)?,
            compensation_delay_s: compensation_delay(p, omega),
        };
        let note = if opt.flat {
            Some("noise does not depend on the delay within the quadrature error".to_string())
        } else if !opt.interior {
            Some("minimum lies on the edge of the scanned window".to_string())
        } else {
            None
        };
        let sidecar = DelaySidecar {
            demod_freq_hz: f,
            scaled_frequency: omega,
            lineshape: c.lineshape,
            group_index: n_g,
            predicted,
            found: FoundOptimum {
                excess_fiber_m: opt.excess_fiber_m,
                tau_d_s: opt.delay.tau_d_s,
                s_bar_linear: opt.value,
                s_bar_db: to_db(opt.value)?,
                error: opt.error,
                interior: opt.interior,
                flat: opt.flat,
            },
            degenerate: opt.flat || !opt.interior,
            note,
        };
        w.json(&format!("delay_scan_{tag}.json"), &sidecar)?;

        let color = PALETTE[i % PALETTE.len()];
        let curve = Series::line(
            mhz(f),
            color,
            Style::Solid,
            grid.iter().zip(&trace.points).map(|(&l, q)| (l, q.db)),
        );
        let mut plot = Plot::new(
            format!("Averaged noise vs delay at {}", mhz(f)),
            "excess LO fiber (m)",
            "noise rel. shot noise (dB)",
        );
        plot.series.push(curve.clone());
        if !opt.flat {
            plot.series.push(Series {
                label: "optimum".into(),
                color: "#000000",
                style: Style::Markers,
                points: vec![(opt.excess_fiber_m, sidecar.found.s_bar_db, 0.0)],
            });
        }
        w.svg(&format!("delay_scan_{tag}.svg"), &plot)?;
        overview.series.push(curve);

        let _ = writeln!(
            summary,
            "{}: optimum {:.3} m ({:.3} dB){}, first-order prediction {:.3} m",
            mhz(f),
            opt.excess_fiber_m,
            sidecar.found.s_bar_db,
            sidecar
                .note
                .as_deref()
                .map(|n| format!(" [{n}]"))
                .unwrap_or_default(),
            sidecar.predicted.compensation_length_m
        );
    }
    if overview.series.len() > 1 {
        w.svg("delay_scan.svg", &overview)?;
    }
    Ok(w.finish(summary))
}

#[derive(Debug, Serialize)]
struct ElementDelay {
    element: PathElement,
    delay_s: f64,
}

#[derive(Debug, Serialize)]
struct DoublerDelay {
    linewidth_fwhm_hz: f64,
    delay_s: f64,
    in_squeeze_path: bool,
}

#[derive(Debug, Serialize)]
struct BudgetReport {
    lo_path: Vec<ElementDelay>,
    squeeze_path: Vec<ElementDelay>,
    doubler: Option<DoublerDelay>,
    lo_total_s: f64,
    squeeze_total_s: f64,
    tau_d_s: f64,
    group_index: f64,
    /// Change of LO fiber length that restores the white-light condition.
    white_light_correction_m: f64,
}

pub fn budget(cfg: &LoadedConfig, opts: &RunOptions, json_stdout: bool) -> Result<Outcome> {
    reject_demod(opts, "budget")?;
    let ledger = cfg.config.ledger.as_ref().ok_or_else(|| {
        CliError::Config(format!(
            "{}: `ledger` section is required by `budget`",
            cfg.path.display()
        ))
    })?;
    let b = ledger.breakdown()?;
    let n_g = cfg.config.scan.group_index;
    let pair = |path: &[PathElement], delays: &[f64]| {
        path.iter()
            .zip(delays)
            .map(|(e, &d)| ElementDelay {
                element: e.clone(),
                delay_s: d,
            })
            .collect::<Vec<_>>()
    };
    let report = BudgetReport {
        lo_path: pair(&ledger.lo_path, &b.lo_delays_s),
        squeeze_path: pair(&ledger.squeeze_path, &b.squeeze_delays_s),
        doubler: ledger
            .doubler_linewidth_hz
            .zip(b.doubler_delay_s)
            .map(|(lw, d)| DoublerDelay {
                linewidth_fwhm_hz: lw,
                delay_s: d,
                in_squeeze_path: ledger.include_doubler_in_squeeze_path,
            }),
        lo_total_s: b.lo_total_s,
        squeeze_total_s: b.squeeze_total_s,
        tau_d_s: b.tau_d_s,
        group_index: n_g,
        white_light_correction_m: white_light_correction(b.tau_d_s, n_g),
    };

    let mut w = Writer::new(opts)?;
    w.json("budget.json", &report)?;
    let summary = if json_stdout {
        let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
        s.push('\n');
        s
    } else {
        let mut s = String::new();
        for (name, arm) in [
            ("local oscillator", &report.lo_path),
            ("squeezing", &report.squeeze_path),
        ] {
            let _ = writeln!(s, "{name} path:");
            for e in arm {
                let _ = writeln!(
                    s,
                    "  {:<11} {:<20} {:>10.3} ns",
                    e.element.label(),
                    describe(&e.element),
                    e.delay_s * 1e9
                );
            }
        }
        if let Some(d) = &report.doubler {
            let _ = writeln!(
                s,
                "doubling cavity {} MHz: {:.3} ns ({})",
                d.linewidth_fwhm_hz / 1e6,
                d.delay_s * 1e9,
                if d.in_squeeze_path {
                    "counted on the squeezing path"
                } else {
                    "excluded"
                }
            );
        }
        let _ = writeln!(s, "LO total        {:>10.3} ns", report.lo_total_s * 1e9);
        let _ = writeln!(
            s,
            "squeezing total {:>10.3} ns",
            report.squeeze_total_s * 1e9
        );
        let _ = writeln!(s, "tau_D           {:>10.3} ns", report.tau_d_s * 1e9);
        let _ = writeln!(
            s,
            "white-light correction: {:+.3} m of LO fiber (n_g = {n_g})",
            report.white_light_correction_m
        );
        s
    };
    Ok(w.finish(summary))
}

fn describe(e: &PathElement) -> String {
    match *e {
        PathElement::Fiber {
            length_m,
            group_index,
        } => format!("{length_m} m, n_g {group_index}"),
        PathElement::FreeSpace { length_m } => format!("{length_m} m"),
        PathElement::Cavity { linewidth_fwhm_hz }
        | PathElement::OpoCavity { linewidth_fwhm_hz } => {
            format!("{} MHz", linewidth_fwhm_hz / 1e6)
        }
        PathElement::Lumped { delay_s } => format!("{} ns", delay_s * 1e9),
    }
}

/// Read one scan CSV with columns `excess_fiber_m,noise_db,std_dev_db` (any order).
pub fn read_scan_csv(path: &Path) -> Result<Vec<ScanRow>> {
    let bytes = fs::read(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let csv_err = |e: csv::Error| CliError::Csv {
        path: path.to_path_buf(),
        line: e.position().map(|p| p.line()).unwrap_or(1),
        message: match e.kind() {
            csv::ErrorKind::Deserialize { err, .. } => err.to_string(),
            _ => e.to_string(),
        },
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(bytes.as_slice());
    let headers = reader.headers().map_err(csv_err)?.clone();
    if headers.iter().all(str::is_empty) {
        return Err(CliError::Csv {
            path: path.to_path_buf(),
            line: 1,
            message: "empty file; expected header excess_fiber_m,noise_db,std_dev_db".into(),
        });
    }
    for col in ["excess_fiber_m", "noise_db", "std_dev_db"] {
        if !headers.iter().any(|h| h == col) {
            return Err(CliError::Csv {
                path: path.to_path_buf(),
                line: 1,
                message: format!("missing column `{col}`"),
            });
        }
    }
    let rows = reader
        .deserialize::<ScanRow>()
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(csv_err)?;
    if rows.len() < 3 {
        return Err(CliError::Csv {
            path: path.to_path_buf(),
            line: rows.len() as u64 + 1,
            message: format!("{} data rows; at least 3 are needed", rows.len()),
        });
    }
    Ok(rows)
}

#[derive(Debug, Serialize)]
struct KindSummary {
    lineshape_kind: LineshapeKind,
    lineshape_fwhm_hz: f64,
    objective: f64,
    residual_rms_db: f64,
    converged: bool,
    degenerate: bool,
}

#[derive(Debug, Serialize)]
struct FitComparison {
    selected: LineshapeKind,
    gaussian: Option<KindSummary>,
    lorentzian: Option<KindSummary>,
    /// Lineshape with the smaller objective.
    lower_objective: Option<LineshapeKind>,
}

#[derive(Debug, Serialize)]
struct FailedFit {
    lineshape_kind: LineshapeKind,
    converged: bool,
    error: String,
}

fn summarize(r: &FitResult) -> KindSummary {
    KindSummary {
        lineshape_kind: r.lineshape_kind,
        lineshape_fwhm_hz: r.lineshape_fwhm_hz,
        objective: r.objective,
        residual_rms_db: r.residual_rms_db,
        converged: r.converged,
        degenerate: r.degenerate,
    }
}

pub fn fit(cfg: &LoadedConfig, opts: &RunOptions) -> Result<Outcome> {
    reject_demod(opts, "fit")?;
    let c = &cfg.config;
    let section = c.fit.as_ref().ok_or_else(|| {
        CliError::Config(format!(
            "{}: `fit` section is required by `fit`",
            cfg.path.display()
        ))
    })?;
    let scans = section
        .scans
        .iter()
        .map(|s| {
            let rows = read_scan_csv(&cfg.resolve(&s.csv_path))?;
            let scan = MeasuredScan {
                demod_freq_hz: s.demod_freq_hz,
                rows,
                metadata: ScanMetadata {
                    rbw_hz: s.rbw_hz,
                    vbw_hz: s.vbw_hz,
                    electronics_floor_db: if s.electronics_subtracted {
                        None
                    } else {
                        c.detection.electronics_floor_db
                    },
                },
            };
            scan.validate()?;
            Ok(scan)
        })
        .collect::<Result<Vec<_>>>()?;

    let p = &cfg.params;
    let kind = section.lineshape_kind;
    let mut w = Writer::new(opts)?;
    let result = match fit_model(&scans, p, kind, &section.settings) {
        Ok(r) => r,
        Err(e) => {
            let err = CliError::from(e);
            if err.exit_code() == 3 {
                w.json(
                    "fit_result.json",
                    &FailedFit {
                        lineshape_kind: kind,
                        converged: false,
                        error: err.to_string(),
                    },
                )?;
            }
            return Err(err);
        }
    };
    let other = fit_model(&scans, p, kind.other(), &section.settings);
    w.json("fit_result.json", &result)?;

    let other_summary = other.as_ref().ok().map(summarize);
    let (gaussian, lorentzian) = match kind {
        LineshapeKind::Gaussian => (Some(summarize(&result)), other_summary),
        LineshapeKind::Lorentzian => (other_summary, Some(summarize(&result))),
    };
    let lower_objective = match (&gaussian, &lorentzian) {
        (Some(g), Some(l)) => Some(if g.objective <= l.objective {
            g.lineshape_kind
        } else {
            l.lineshape_kind
        }),
        _ => None,
    };
    let comparison = FitComparison {
        selected: kind,
        gaussian,
        lorentzian,
        lower_objective,
    };
    w.json("fit_comparison.json", &comparison)?;

    // model curves on a fine grid across each scan's delay range
    let shape = kind.with_fwhm(result.lineshape_fwhm_hz);
    let n_g = section.settings.group_index;
    let mut curve_rows = Vec::new();
    let mut plot = Plot::new(
        format!(
            "Measured and fitted noise ({:?}, {:.0} kHz FWHM)",
            kind,
            result.lineshape_fwhm_hz / 1e3
        )
        .to_lowercase(),
        "excess LO fiber (m)",
        "noise rel. shot noise (dB)",
    );
    for (i, (scan, &offset)) in scans.iter().zip(&result.offsets_linear).enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let rows = scan.corrected_rows()?;
        let lo = rows
            .iter()
            .map(|r| r.excess_fiber_m)
            .fold(f64::INFINITY, f64::min);
        let hi = rows
            .iter()
            .map(|r| r.excess_fiber_m)
            .fold(f64::NEG_INFINITY, f64::max);
        let grid: Vec<f64> = (0..=200)
            .map(|k| lo + (hi - lo) * k as f64 / 200.0)
            .collect();
        let delays: Vec<DelaySetting> = grid
            .iter()
            .map(|&l| DelaySetting::from_fiber(l, n_g))
            .collect();
        let omega = p.scaled_frequency(scan.demod_freq_hz);
        let model = delay_scan(p, omega, &shape, &delays, &section.settings.quadrature)?;

        let mut solid = Vec::with_capacity(grid.len());
        let mut dashed = Vec::with_capacity(grid.len());
        for (&l, q) in grid.iter().zip(&model.points) {
            let with_offset = q.linear + offset;
            let with_offset_db = to_db(with_offset)?;
            curve_rows.push(vec![
                scan.demod_freq_hz,
                l,
                q.linear,
                q.db,
                with_offset,
                with_offset_db,
            ]);
            solid.push((l, q.db));
            dashed.push((l, with_offset_db));
        }
        plot.series.push(Series {
            label: format!("{} data", mhz(scan.demod_freq_hz)),
            color,
            style: Style::Markers,
            points: rows
                .iter()
                .map(|r| (r.excess_fiber_m, r.noise_db, r.std_dev_db))
                .collect(),
        });
        plot.series
            .push(Series::line("model", color, Style::Solid, solid));
        plot.series.push(Series::line(
            format!("+{offset:.3} offset"),
            color,
            Style::Dashed,
            dashed,
        ));
    }
    w.csv(
        "fit_curves.csv",
        &[
            "demod_freq_hz",
            "excess_fiber_m",
            "model_linear",
            "model_db",
            "model_with_offset_linear",
            "model_with_offset_db",
        ],
        curve_rows,
    )?;
    w.svg("fit_overlay.svg", &plot)?;

    let mut summary = String::new();
    let _ = writeln!(
        summary,
        "{:?} fit: FWHM {:.1} kHz{}, residual rms {:.4} dB, converged {}",
        kind,
        result.lineshape_fwhm_hz / 1e3,
        result
            .fwhm_std_hz
            .map(|s| format!(" ± {:.1}", s / 1e3))
            .unwrap_or_default(),
        result.residual_rms_db,
        result.converged
    );
    for (f, o) in result.demod_freqs_hz.iter().zip(&result.offsets_linear) {
        let _ = writeln!(summary, "  offset at {}: {:+.4}", mhz(*f), o);
    }
    for s in [&comparison.gaussian, &comparison.lorentzian]
        .into_iter()
        .flatten()
    {
        let _ = writeln!(
            summary,
            "  {:?}: objective {:.4}, FWHM {:.1} kHz",
            s.lineshape_kind,
            s.objective,
            s.lineshape_fwhm_hz / 1e3
        );
    }
    if result.degenerate {
        summary.push_str("  warning: the width is not constrained by the data\n");
    }
    if !result.converged {
        return Err(CliError::NotConverged(format!(
            "fit did not converge after {} iterations; partial result written",
            result.iterations
        )));
    }
    Ok(w.finish(summary))
}
