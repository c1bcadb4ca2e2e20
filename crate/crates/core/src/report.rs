//! CSV output. Numbers are written with 17 significant digits in Rust's
//! locale-independent exponent notation, so identical inputs give
//! byte-identical files.

use std::io::{self, Write};

use crate::distribution::{statistics, PhotonDistribution};
use crate::physics::{passage_weights, Outcome};
use crate::sweep::SweepRow;
use crate::trajectory::Sample;

pub const STEADY_HEADER: &str = "n,p";
pub const SWEEP_HEADER: &str = "phi,mean_n,fano,fano_defined,tail_mass";
pub const TRAJECTORY_HEADER: &str = "time_s,true_n,filter_mean,filter_std,last_outcome";
pub const PASSAGE_HEADER: &str = "n,w_f,w_g,w_e";

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Single-letter outcome code of the trajectory CSV: `F`, `G`, `E` or `-`.
pub fn outcome_code(outcome: Option<Outcome>) -> &'static str {
    match outcome {
        Some(Outcome::Auxiliary) => "F",
        Some(Outcome::Ground) => "G",
        Some(Outcome::Excited) => "E",
        None => "-",
    }
}

fn write_comments<W: Write>(w: &mut W, comments: &[String]) -> io::Result<()> {
    for line in comments {
        writeln!(w, "# {line}")?;
    }
    Ok(())
}

/// `n,p` rows followed by `# mean_n=`, `# fano=` and `# tail_mass=` footers.
pub fn write_steady_csv<W: Write>(
    w: &mut W,
    comments: &[String],
    p: &PhotonDistribution,
) -> io::Result<()> {
    write_comments(w, comments)?;
    writeln!(w, "{STEADY_HEADER}")?;
    for (n, &prob) in p.probs().iter().enumerate() {
        writeln!(w, "{n},{}", format_float(prob))?;
    }
    let stats = statistics(p);
    writeln!(w, "# mean_n={}", format_float(stats.mean_n))?;
    match stats.fano {
        Some(fano) => writeln!(w, "# fano={}", format_float(fano))?,
        None => writeln!(w, "# fano=undefined")?,
    }
    writeln!(w, "# tail_mass={}", format_float(p.tail_mass()))
}

/// Undefined Fano factors leave the `fano` field empty with `fano_defined`
/// set to 0.
pub fn write_sweep_csv<W: Write>(w: &mut W, comments: &[String], rows: &[SweepRow]) -> io::Result<()> {
    write_comments(w, comments)?;
    writeln!(w, "{SWEEP_HEADER}")?;
    for row in rows {
        let (fano, defined) = match row.fano {
            Some(f) => (format_float(f), 1),
            None => (String::new(), 0),
        };
        writeln!(
            w,
            "{},{},{fano},{defined},{}",
            format_float(row.phi),
            format_float(row.mean_n),
            format_float(row.tail_mass)
        )?;
    }
    Ok(())
}

pub fn write_trajectory_csv<W: Write>(
    w: &mut W,
    comments: &[String],
    samples: &[Sample],
) -> io::Result<()> {
    write_comments(w, comments)?;
    writeln!(w, "{TRAJECTORY_HEADER}")?;
    for s in samples {
        writeln!(
            w,
            "{},{},{},{},{}",
            format_float(s.time),
            s.true_n,
            format_float(s.filter_mean),
            format_float(s.filter_std),
            outcome_code(s.last_outcome)
        )?;
    }
    Ok(())
}

pub fn write_passage_csv<W: Write>(
    w: &mut W,
    comments: &[String],
    phase: f64,
    n_max: usize,
) -> io::Result<()> {
    write_comments(w, comments)?;
    writeln!(w, "{PASSAGE_HEADER}")?;
    for n in 0..=n_max {
        let weights = passage_weights(n, phase);
        writeln!(
            w,
            "{n},{},{},{}",
            format_float(weights.w_f),
            format_float(weights.w_g),
            format_float(weights.w_e)
        )?;
    }
    Ok(())
}
