//! CSV and columnar text writers. Numeric formatting is fixed-precision so a
//! rerun with the same seed produces byte-identical files; exact recovery is
//! written as the literal `-inf`.

use crate::SweepRow;
use nfp_core::lift::ConditioningReport;
use nfp_core::measure::{MeasurementGrid, SnrTarget};
use nfp_core::signal::ComplexSignal;
use nfp_core::wflow::WfTrace;
use std::io::{self, Write};

/// Fixed-precision float field; infinities become `inf` / `-inf`.
pub fn format_field(v: f64) -> String {
    if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else if v == f64::INFINITY {
        "inf".to_string()
    } else {
        format!("{v:.6}")
    }
}

fn format_snr(snr: SnrTarget) -> String {
    match snr {
        SnrTarget::Db(db) => format_field(db),
        SnrTarget::Clean => "inf".to_string(),
    }
}

/// Sweep table. With `stable` set, runtime columns are written as zero so
/// reruns are byte-identical even across machines.
pub fn write_sweep_csv<W: Write>(mut w: W, rows: &[SweepRow], stable: bool) -> io::Result<()> {
    writeln!(
        w,
        "experiment,d,delta_or_K,snr_db,T,mean_error_db,mean_runtime_s,trials,seed"
    )?;
    for row in rows {
        let runtime = if stable { 0.0 } else { row.mean_runtime_s };
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            row.experiment,
            row.d,
            row.delta_or_k,
            format_snr(row.snr),
            row.iterations,
            format_field(row.mean_error_db),
            format_field(runtime),
            row.trials,
            row.seed
        )?;
    }
    Ok(())
}

/// Measurement grid in logical coordinates: `k,l,value,noise` (noise column
/// empty for a noiseless grid).
pub fn write_grid_csv<W: Write>(mut w: W, grid: &MeasurementGrid) -> io::Result<()> {
    writeln!(w, "k,l,value,noise")?;
    for k in 0..grid.k_count() {
        for l in 0..grid.l_count() {
            let noise = grid.noise_value(k, l).map(format_field).unwrap_or_default();
            writeln!(
                w,
                "{},{},{},{}",
                k,
                l,
                format_field(grid.value(k, l)),
                noise
            )?;
        }
    }
    Ok(())
}

/// Columnar complex-vector table: `index,re,im`.
pub fn write_signal_table<W: Write>(mut w: W, signal: &ComplexSignal) -> io::Result<()> {
    writeln!(w, "index,re,im")?;
    for (n, z) in signal.iter().enumerate() {
        writeln!(w, "{},{:.17e},{:.17e}", n, z.re, z.im)?;
    }
    Ok(())
}

/// Conditioning table: `delta,d,sigma_min,sigma_max,kappa,bound`.
pub fn write_conditioning_csv<W: Write>(
    mut w: W,
    reports: &[ConditioningReport],
) -> io::Result<()> {
    writeln!(w, "delta,d,sigma_min,sigma_max,kappa,bound")?;
    for r in reports {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.delta,
            r.d,
            format_field(r.sigma_min),
            format_field(r.sigma_max),
            format_field(r.kappa),
            format_field(r.bound)
        )?;
    }
    Ok(())
}

/// Per-iteration descent trace: `iteration,loss,relative_error` (error
/// column empty when the ground truth was not supplied).
pub fn write_trace_csv<W: Write>(mut w: W, trace: &WfTrace) -> io::Result<()> {
    writeln!(w, "iteration,loss,relative_error")?;
    for (i, loss) in trace.loss.iter().enumerate() {
        let err = trace
            .relative_error
            .as_ref()
            .map(|errs| format!("{:.9e}", errs[i]))
            .unwrap_or_default();
        writeln!(w, "{},{:.9e},{}", i, loss, err)?;
    }
    Ok(())
}
