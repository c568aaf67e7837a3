use crate::{Cli, CliError, Command, PotentialArgs, Side};
use num_complex::Complex64;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use steptunnel::potential::{build_mbp, discretize, MbpSpec, PiecewiseConstantPotential, PotentialError, PotentialFile};
use steptunnel::resonance::{alias_audit, all_orderings, find_peaks, AliasReport, AliasSettings, PeakSearch, ResonanceCatalog, ResonanceError};
use steptunnel::scan::{self, GridAxis, GridScan, ScanError};
use steptunnel::scattering::{solve, wavefunction, Incidence, ScatteringError};

type Result<T> = std::result::Result<T, CliError>;

impl From<PotentialError> for CliError {
    fn from(e: PotentialError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<ScatteringError> for CliError {
    fn from(e: ScatteringError) -> Self {
        match e {
            ScatteringError::EvanescentLead { .. } | ScatteringError::UnequalLeads { .. } | ScatteringError::NonFiniteEnergy { .. } => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<ScanError> for CliError {
    fn from(e: ScanError) -> Self {
        match e {
            ScanError::Scattering { .. } => CliError::Numeric(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<ResonanceError> for CliError {
    fn from(e: ResonanceError) -> Self {
        match e {
            ResonanceError::Scattering { .. } => CliError::Numeric(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Config(format!("{}: {e}", path.display()))
}

fn scan_io(path: &Path, e: ScanError) -> CliError {
    match e {
        ScanError::Io(io) => io_error(path, io),
        other => other.into(),
    }
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|e| io_error(path, e))
}

fn require_out(cli: &Cli) -> Result<&Path> {
    cli.out.as_deref().ok_or_else(|| CliError::Config("missing output path: pass --out/-o".into()))
}

fn parse_list(flag: &str, text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| match s.trim().parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(CliError::Config(format!("--{flag}: '{s}' is not a finite number"))),
        })
        .collect()
}

enum Source {
    Mbp(MbpSpec),
    Explicit(PiecewiseConstantPotential),
}

impl Source {
    fn potential(&self) -> Result<PiecewiseConstantPotential> {
        match self {
            Source::Mbp(spec) => Ok(build_mbp(spec)?),
            Source::Explicit(p) => Ok(p.clone()),
        }
    }

    fn mbp(self, command: &str) -> Result<MbpSpec> {
        match self {
            Source::Mbp(spec) => Ok(spec),
            Source::Explicit(_) => Err(CliError::Config(format!("{command} needs a multi-barrier train (--mbp or an mbp potential file)"))),
        }
    }
}

/// `(m, V0, delta)` from `--mbp`.
fn parse_mbp_header(text: &str) -> Result<(usize, f64, f64)> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let bad = || CliError::Config(format!("--mbp: expected m,V0,delta, got '{text}'"));
    let [m, v0, delta] = parts.as_slice() else {
        return Err(bad());
    };
    let m: usize = m.parse().map_err(|_| bad())?;
    let v0: f64 = v0.parse().map_err(|_| bad())?;
    let delta: f64 = delta.parse().map_err(|_| bad())?;
    if !(v0.is_finite() && delta.is_finite()) {
        return Err(bad());
    }
    Ok((m, v0, delta))
}

fn resolve(args: &PotentialArgs, wells_optional: bool) -> Result<Source> {
    match (&args.potential, &args.mbp) {
        (Some(_), Some(_)) => Err(CliError::Config("give either --potential or --mbp, not both".into())),
        (None, None) => Err(CliError::Config("no potential: pass --potential FILE or --mbp m,V0,delta --wells LIST".into())),
        (Some(path), None) => match PotentialFile::load(path)? {
            PotentialFile::Mbp { v0, delta, wells, theta } => {
                let spec = MbpSpec::new(v0, delta, wells).with_origin(theta);
                spec.validate()?;
                Ok(Source::Mbp(spec))
            }
            explicit => Ok(Source::Explicit(explicit.into_potential()?)),
        },
        (None, Some(header)) => {
            let (m, v0, delta) = parse_mbp_header(header)?;
            let wells = match &args.wells {
                Some(w) => parse_list("wells", w)?,
                None if wells_optional || m == 1 => vec![1.0; m.saturating_sub(1)],
                None => return Err(CliError::Config(format!("--mbp with {m} barriers needs --wells with {} widths", m.saturating_sub(1)))),
            };
            let spec = MbpSpec { barrier_count: m, ..MbpSpec::new(v0, delta, wells).with_origin(args.theta) };
            spec.validate()?;
            Ok(Source::Mbp(spec))
        }
    }
}

fn barrier_height(potential: &PiecewiseConstantPotential) -> f64 {
    potential.levels().iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

pub fn run(cli: &Cli) -> Result<()> {
    if !(cli.tolerance > 0.0 && cli.tolerance.is_finite()) {
        return Err(CliError::Config(format!("--tolerance must be positive, got {}", cli.tolerance)));
    }
    match &cli.command {
        Command::Spectrum { potential, kappa } => cmd_spectrum(cli, potential, kappa),
        Command::Peaks { potential, kappa } => cmd_peaks(cli, potential, kappa.as_ref()),
        Command::Alias { potential, perms, all, kappa } => cmd_alias(cli, potential, perms, *all, kappa.as_ref()),
        Command::Scan2d { potential, uniform_tau, single_well, tau_prime, kappa, raster } => {
            cmd_scan2d(cli, potential, uniform_tau.as_ref(), single_well.as_deref(), tau_prime.as_ref(), kappa, raster.as_deref())
        }
        Command::Wavefunction { potential, energy, at_kappa, x, incidence, seed, scale_to_barrier } => {
            let energy = match (energy, at_kappa) {
                (Some(e), None) => *e,
                (None, Some(k)) => k * k,
                _ => return Err(CliError::Config("pass exactly one of --energy or --at-kappa".into())),
            };
            cmd_wavefunction(cli, potential, energy, x.as_ref(), *incidence, *seed, *scale_to_barrier)
        }
        Command::Discretize { samples, steps } => cmd_discretize(cli, samples, *steps),
    }
}

fn cmd_spectrum(cli: &Cli, args: &PotentialArgs, kappa: &GridAxis) -> Result<()> {
    let out = require_out(cli)?;
    let potential = resolve(args, false)?.potential()?;
    let rows = scan::spectrum(&potential, kappa)?;
    scan::write_spectrum_csv(&rows, out).map_err(|e| scan_io(out, e))?;
    let min = rows.iter().map(|r| r.ln_t).fold(f64::INFINITY, f64::min);
    let max = rows.iter().map(|r| r.ln_t).fold(f64::NEG_INFINITY, f64::max);
    println!("{} grid points, lnT in [{min:.6e}, {max:.6e}] -> {}", rows.len(), out.display());
    Ok(())
}

fn search_for(cli: &Cli, v0: f64, kappa: Option<&GridAxis>) -> PeakSearch {
    let mut search = PeakSearch::for_barrier(v0).with_tolerance(cli.tolerance);
    if let Some(k) = kappa {
        search = search.with_range(k.lo, k.hi, k.count);
    }
    search
}

fn peaks_report(c: &ResonanceCatalog) -> String {
    let mut s = String::new();
    let beta = c.band_count_beta.map_or_else(|| "n/a".to_string(), |b| b.to_string());
    let _ = writeln!(s, "V0 = {}", c.barrier_height);
    let _ = writeln!(s, "wells = {:?}", c.well_widths);
    let _ = writeln!(s, "{} sharp peaks, β={}, α={}", c.sharp_count(), beta, c.peak_count_alpha);
    let _ = writeln!(s, "{} sharp peaks below sqrt(V0), {} diffuse peaks near the barrier top", c.sharp_count(), c.diffuse_count());
    let _ = writeln!(s, "\nkind,kappa,lnT,prominence,width");
    for p in &c.peaks {
        let _ = writeln!(s, "{:?},{:.10},{:.6e},{:.6},{:.6e}", p.kind, p.kappa, p.ln_t, p.prominence, p.width);
    }
    let _ = writeln!(s, "\nestimates: tau,n,kappa");
    for e in &c.estimates {
        let _ = writeln!(s, "{},{},{:.10}", e.well_width, e.quantum_number, e.kappa_estimate);
    }
    s
}

fn cmd_peaks(cli: &Cli, args: &PotentialArgs, kappa: Option<&GridAxis>) -> Result<()> {
    let source = resolve(args, false)?;
    let potential = source.potential()?;
    let v0 = match &source {
        Source::Mbp(spec) => spec.barrier_height,
        Source::Explicit(p) => barrier_height(p),
    };
    if !(v0 > 0.0) && kappa.is_none() {
        return Err(CliError::Config("no positive barrier level; pass --kappa explicitly".into()));
    }
    let catalog = find_peaks(&potential, &search_for(cli, v0, kappa))?;
    let report = peaks_report(&catalog);
    print!("{report}");
    if let Some(out) = &cli.out {
        write_file(out, &report)?;
    }
    Ok(())
}

fn alias_text(r: &AliasReport, requested: usize) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "V0 = {}, delta = {}", r.barrier_height, r.barrier_width);
    let _ = writeln!(s, "{} orderings audited ({} requested)", r.orderings.len(), requested);
    if r.duplicates_removed > 0 {
        let _ = writeln!(s, "note: {} repeated orderings removed", r.duplicates_removed);
    }
    if r.repeated_widths {
        let _ = writeln!(s, "note: repeated well widths, orderings that swap equal wells coincide");
    }
    let _ = writeln!(s, "\nindex,wells,sharp_peaks,diffuse_peaks");
    for (i, o) in r.orderings.iter().enumerate() {
        let wells: Vec<String> = o.wells.iter().map(f64::to_string).collect();
        let _ = writeln!(s, "{i},{},{},{}", wells.join(" "), o.sharp_count(), o.catalog.diffuse_count());
    }
    let _ = writeln!(s, "\nfirst,second,matched,unmatched_first,unmatched_second,max_matched_distance,max_discrepancy");
    for m in &r.matchings {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{:.6e},{:.6e}",
            m.first, m.second, m.matched, m.unmatched_first, m.unmatched_second, m.max_matched_distance, m.max_discrepancy
        );
    }
    let _ = writeln!(s, "\n{} reversal pairs", r.reversal_pairs.len());
    for p in &r.reversal_pairs {
        let _ = writeln!(s, "{},{},max|dT|={:.3e}", p.first, p.second, p.max_delta_t);
    }
    let _ = writeln!(s, "\nequal peak counts: {}", r.counts_equal());
    let _ = writeln!(s, "all peaks matched: {}", r.all_matched());
    let _ = writeln!(s, "max discrepancy: {:.6e}", r.max_discrepancy());
    s
}

const MAX_ALL_ORDERINGS: usize = 720;

fn cmd_alias(cli: &Cli, args: &PotentialArgs, perms: &[String], all: bool, kappa: Option<&GridAxis>) -> Result<()> {
    let out = require_out(cli)?;
    let spec = resolve(args, false)?.mbp("alias")?;
    if spec.well_widths.len() < 2 {
        return Err(CliError::Config("alias needs at least 2 wells".into()));
    }
    let orderings = if all {
        let n = spec.well_widths.len();
        let count = (1..=n).try_fold(1usize, |acc, k| acc.checked_mul(k)).unwrap_or(usize::MAX);
        if count > MAX_ALL_ORDERINGS {
            return Err(CliError::Config(format!("--all would audit {n}! = {count} orderings, limit is {MAX_ALL_ORDERINGS}")));
        }
        all_orderings(&spec.well_widths)
    } else if perms.is_empty() {
        return Err(CliError::Config("pass --perm LIST (repeatable) or --all".into()));
    } else {
        perms.iter().map(|p| parse_list("perm", p)).collect::<Result<Vec<_>>>()?
    };
    let mut settings = AliasSettings::for_barrier(spec.barrier_height);
    settings.search = search_for(cli, spec.barrier_height, kappa);
    let report = alias_audit(&spec, &orderings, &settings)?;

    fs::create_dir_all(out).map_err(|e| io_error(out, e))?;
    let text = alias_text(&report, orderings.len());
    write_file(&out.join("report.txt"), &text)?;
    let axis = GridAxis::new(settings.search.kappa_lo, settings.search.kappa_hi, settings.search.grid_points)?;
    for (i, o) in report.orderings.iter().enumerate() {
        let potential = build_mbp(&spec.with_wells(o.wells.clone()))?;
        let rows = scan::spectrum(&potential, &axis)?;
        write_file(&out.join(format!("spectrum_{i:03}.csv")), scan::spectrum_csv(&rows)?)?;
    }
    print!("{text}");
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_scan2d(
    cli: &Cli,
    args: &PotentialArgs,
    uniform_tau: Option<&GridAxis>,
    single_well: Option<&str>,
    tau_prime: Option<&GridAxis>,
    kappa: &GridAxis,
    raster: Option<&Path>,
) -> Result<()> {
    let out = require_out(cli)?;
    let spec = resolve(args, true)?.mbp("scan2d")?;
    let (m, v0, delta) = (spec.barrier_count, spec.barrier_height, spec.barrier_width);
    let grid: GridScan = match (uniform_tau, single_well, tau_prime) {
        (Some(tau), None, _) => scan::scan_uniform_tau(m, v0, delta, tau, kappa)?,
        (None, Some(sw), Some(tp)) => {
            let parts: Vec<&str> = sw.split(',').map(str::trim).collect();
            let bad = || CliError::Config(format!("--single-well: expected base_tau,index, got '{sw}'"));
            let [base, index] = parts.as_slice() else {
                return Err(bad());
            };
            let base: f64 = base.parse().map_err(|_| bad())?;
            let index: usize = index.parse().map_err(|_| bad())?;
            scan::scan_single_well(m, v0, delta, base, index, tp, kappa)?
        }
        _ => return Err(CliError::Config("pass --uniform-tau GRID, or --single-well BASE,INDEX with --tau-prime GRID".into())),
    };
    write_file(out, scan::grid_csv(&grid)?)?;
    let pgm: PathBuf = raster.map_or_else(|| out.with_extension("pgm"), Path::to_path_buf);
    scan::write_pgm(&grid, &pgm).map_err(|e| scan_io(&pgm, e))?;
    println!("{} x {} grid ({}) -> {}, {}", grid.rows(), grid.cols(), grid.parameter.tag(), out.display(), pgm.display());
    Ok(())
}

fn cmd_wavefunction(cli: &Cli, args: &PotentialArgs, energy: f64, x: Option<&GridAxis>, side: Side, seed: f64, scale: bool) -> Result<()> {
    let out = require_out(cli)?;
    let potential = resolve(args, false)?.potential()?;
    let incidence = match side {
        Side::Left => Incidence::Left,
        Side::Right => Incidence::Right,
    };
    let solution = solve(&potential, energy, incidence, Complex64::new(seed, 0.0))?;
    let axis = match x {
        Some(a) => *a,
        None => {
            let bp = potential.breakpoints();
            let (first, last) = (bp[0], bp[bp.len() - 1]);
            let pad = 0.25 * (last - first).max(1.0);
            GridAxis::new(first - pad, last + pad, 2001)?
        }
    };
    let xs = axis.values();
    let psi = wavefunction(&solution, &xs);
    let factor = if scale {
        let peak = psi.iter().map(|p| p.norm()).fold(0.0, f64::max);
        if !(peak > 0.0 && peak.is_finite()) {
            return Err(CliError::Numeric("wave function vanishes or overflows on the sample grid".into()));
        }
        barrier_height(&potential) / peak
    } else {
        1.0
    };
    let mut s = String::from("x,reV,rePsi,imPsi,absPsi\n");
    for (x, p) in xs.iter().zip(&psi) {
        let p = p * factor;
        let _ = writeln!(s, "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", x, potential.value_at(*x), p.re, p.im, p.norm());
    }
    write_file(out, s)?;
    println!("T = {:.12e}, R = {:.12e} at E = {energy} -> {}", solution.transmission, solution.reflection, out.display());
    Ok(())
}

fn read_samples(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let mut samples = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed = match fields.as_slice() {
            [x, v] => x.parse::<f64>().ok().zip(v.parse::<f64>().ok()),
            _ => None,
        };
        match parsed {
            Some(pair) => samples.push(pair),
            None if i == 0 && samples.is_empty() => continue,
            None => return Err(CliError::Config(format!("{}:{}: expected x,V", path.display(), i + 1))),
        }
    }
    Ok(samples)
}

fn cmd_discretize(cli: &Cli, samples: &Path, steps: usize) -> Result<()> {
    let out = require_out(cli)?;
    let potential = discretize(&read_samples(samples)?, steps)?;
    let file = PotentialFile::Explicit { x: potential.breakpoints().to_vec(), v: potential.levels().to_vec() };
    write_file(out, file.to_json() + "\n")?;
    println!("{} steps over [{}, {}] -> {}", steps, potential.breakpoints()[0], potential.breakpoints()[steps], out.display());
    Ok(())
}
