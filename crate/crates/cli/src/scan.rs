use std::fs;
use std::io::BufWriter;

use xyinfo::transfer::scan::TIME_UNIT;
use xyinfo::{rest_state, scan_time, ScanOptions};

use crate::config::{Format, RunConfig};
use crate::error::{CliError, CliResult};

pub fn run(cfg: &RunConfig) -> CliResult<()> {
    let spec = cfg.chain()?;
    let kind = cfg.rest_kind(&spec)?;
    let grid = cfg.grid()?;
    let opts = ScanOptions { tolerances: cfg.tolerances()?, parallelism: cfg.parallelism() };
    for w in spec.warnings() {
        eprintln!("warning: {w}");
    }

    let rest = rest_state(&spec, kind).map_err(|e| CliError::from_core("rest", e))?;
    let result = scan_time(&spec, &rest, &grid, &opts).map_err(|e| CliError::from_core("time", e))?;

    let dir = cfg.output_dir();
    fs::create_dir_all(&dir)?;
    let format = cfg.format();
    let path = dir.join(format!("scan.{}", format.extension()));
    match format {
        Format::Csv => {
            let file = BufWriter::new(fs::File::create(&path)?);
            result.write_csv(file).map_err(|e| CliError::Io(e.to_string()))?;
        }
        Format::Json => fs::write(&path, result.to_json() + "\n")?,
    }

    println!(
        "chain N={} D={} sender {} receiver {}, rest {}",
        spec.n(),
        spec.coupling(),
        spec.sender(),
        spec.receiver(),
        crate::repro::describe_rest(kind)
    );
    println!(
        "grid: {} points on [{}, {}] (time unit {TIME_UNIT})",
        grid.len(),
        grid[0],
        grid[grid.len() - 1]
    );
    println!("singular intervals (|det A| < {:e}): {}", opts.tolerances.det, result.singular_intervals.len());
    for [a, b] in &result.singular_intervals {
        println!("  [{a:.6}, {b:.6}]");
    }
    println!("singular instants: {}", result.singular_instants.len());
    for s in &result.singular_instants {
        println!("  t = {:.9}  detA = {:.3e}  ({:?})", s.t, s.det_a, s.kind);
    }
    println!("perfect-transfer instants: {}", result.pst_instants.len());
    for p in &result.pst_instants {
        let how = if p.exact { "exact".to_string() } else { format!("up to diag(e^(i phi), e^(-i phi)), phi = {:.6}", p.phase) };
        println!("  t = {:.9}  residual = {:.3e}  {how}", p.t, p.residual);
    }
    println!("wrote {}", path.display());
    Ok(())
}
