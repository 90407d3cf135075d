//! CSV and gnuplot-data emission.
//!
//! Column order is fixed:
//! `t,w1,w2,w3,i1,i2,i3,H0,H1,C0,C1,C2,C3,r1,r2,r3`
//! with a mandatory header row. Absent Clebsch integrals (degenerate
//! geometry) are written as empty fields. Values carry 17 significant
//! digits, which round-trips every finite f64 bit-exactly through decimal
//! text.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::dynamics::DKState;
use crate::error::{Error, Result};
use crate::linalg::Vec3;
use crate::scenario::DkTrajectory;

pub const CSV_HEADER: &str = "t,w1,w2,w3,i1,i2,i3,H0,H1,C0,C1,C2,C3,r1,r2,r3";

/// One parsed CSV row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsvRow {
    pub t: f64,
    pub state: DKState,
    pub h0: f64,
    pub h1: f64,
    pub c0: f64,
    pub c: Option<Vec3>,
    pub r: Vec3,
}

fn fmt(x: f64) -> String {
    // 17 significant digits in scientific notation
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(mut w: W, traj: &DkTrajectory) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for k in 0..traj.len() {
        let s = &traj.states[k];
        let inv = &traj.invariants[k];
        let p = &traj.params[k];
        let mut fields: Vec<String> = Vec::with_capacity(16);
        fields.push(fmt(traj.times[k]));
        for v in s.varpi.iter().chain(s.iota.iter()) {
            fields.push(fmt(*v));
        }
        fields.push(fmt(inv.h0));
        fields.push(fmt(inv.h1));
        fields.push(fmt(inv.c0));
        match inv.c {
            Some(c) => {
                for v in c {
                    fields.push(fmt(v));
                }
            }
            None => {
                for _ in 0..3 {
                    fields.push(String::new());
                }
            }
        }
        for v in p.r {
            fields.push(fmt(v));
        }
        writeln!(w, "{}", fields.join(","))?;
    }
    Ok(())
}

pub fn write_csv_file(path: &Path, traj: &DkTrajectory) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv(std::io::BufWriter::new(file), traj)
}

pub fn read_csv<R: BufRead>(r: R) -> Result<Vec<CsvRow>> {
    let mut rows = Vec::new();
    for (idx, line) in r.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        if idx == 0 {
            if line.trim() != CSV_HEADER {
                return Err(Error::CsvParse {
                    line: lineno,
                    reason: format!("bad header '{line}'"),
                });
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 16 {
            return Err(Error::CsvParse {
                line: lineno,
                reason: format!("expected 16 fields, found {}", fields.len()),
            });
        }
        let num = |i: usize| -> Result<f64> {
            fields[i].parse::<f64>().map_err(|e| Error::CsvParse {
                line: lineno,
                reason: format!("field {}: {e}", i + 1),
            })
        };
        let c = if fields[10].is_empty() || fields[11].is_empty() || fields[12].is_empty() {
            None
        } else {
            Some([num(10)?, num(11)?, num(12)?])
        };
        rows.push(CsvRow {
            t: num(0)?,
            state: DKState::new([num(1)?, num(2)?, num(3)?], [num(4)?, num(5)?, num(6)?]),
            h0: num(7)?,
            h1: num(8)?,
            c0: num(9)?,
            c,
            r: [num(13)?, num(14)?, num(15)?],
        });
    }
    Ok(rows)
}

pub fn read_csv_file(path: &Path) -> Result<Vec<CsvRow>> {
    let file = std::fs::File::open(path)?;
    read_csv(std::io::BufReader::new(file))
}

/// Emit gnuplot-consumable two-column `<t> <value>` data files, one per
/// variable, into `dir` (`w1.dat` .. `i3.dat`, `H0.dat`, `H1.dat`,
/// `C0.dat`, `C1.dat`.. when present, `r1.dat`..`r3.dat`).
pub fn write_plot_files(dir: &Path, traj: &DkTrajectory) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let emit = |name: &str, values: &dyn Fn(usize) -> Option<f64>| -> Result<()> {
        let mut out = String::new();
        for k in 0..traj.len() {
            if let Some(v) = values(k) {
                out.push_str(&format!("{} {}\n", fmt(traj.times[k]), fmt(v)));
            }
        }
        std::fs::write(dir.join(format!("{name}.dat")), out)?;
        Ok(())
    };

    for (i, name) in ["w1", "w2", "w3"].iter().enumerate() {
        emit(name, &|k| Some(traj.states[k].varpi[i]))?;
    }
    for (i, name) in ["i1", "i2", "i3"].iter().enumerate() {
        emit(name, &|k| Some(traj.states[k].iota[i]))?;
    }
    emit("H0", &|k| Some(traj.invariants[k].h0))?;
    emit("H1", &|k| Some(traj.invariants[k].h1))?;
    emit("C0", &|k| Some(traj.invariants[k].c0))?;
    for i in 0..3 {
        emit(&format!("C{}", i + 1), &|k| {
            traj.invariants[k].c.map(|c| c[i])
        })?;
    }
    for i in 0..3 {
        emit(&format!("r{}", i + 1), &|k| Some(traj.params[k].r[i]))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::ParameterSchedule;
    use crate::geometry::EllipsoidGeometry;
    use crate::integrator::IntegrationSettings;
    use crate::scenario::{run_scenario, Scenario};

    fn short_run(fixed: bool) -> DkTrajectory {
        let schedule = if fixed {
            ParameterSchedule::FixedAxes {
                geometry: EllipsoidGeometry::from_ratios(-0.5, 0.25).unwrap(),
            }
        } else {
            // sphere: degenerate ratios, Clebsch absent
            ParameterSchedule::FixedAxes {
                geometry: EllipsoidGeometry::from_axes([1.0, 1.0, 1.0]).unwrap(),
            }
        };
        let sc = Scenario {
            schedule,
            initial: DKState::new([0.01, 0.02, 0.1], [0.03, 0.01, 1.0]),
            eta2: 0.0,
            t_end: 2.0,
            settings: IntegrationSettings {
                sample_dt: 0.25,
                ..Default::default()
            },
        };
        run_scenario(&sc).unwrap().trajectory
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let traj = short_run(true);
        let mut buf = Vec::new();
        write_csv(&mut buf, &traj).unwrap();
        let rows = read_csv(buf.as_slice()).unwrap();
        assert_eq!(rows.len(), traj.len());
        for (k, row) in rows.iter().enumerate() {
            assert_eq!(row.t.to_bits(), traj.times[k].to_bits());
            for i in 0..3 {
                assert_eq!(
                    row.state.varpi[i].to_bits(),
                    traj.states[k].varpi[i].to_bits()
                );
                assert_eq!(
                    row.state.iota[i].to_bits(),
                    traj.states[k].iota[i].to_bits()
                );
                assert_eq!(row.r[i].to_bits(), traj.params[k].r[i].to_bits());
            }
            assert_eq!(row.h0.to_bits(), traj.invariants[k].h0.to_bits());
            assert_eq!(row.h1.to_bits(), traj.invariants[k].h1.to_bits());
            assert_eq!(row.c0.to_bits(), traj.invariants[k].c0.to_bits());
            let c_src = traj.invariants[k].c.unwrap();
            let c_row = row.c.unwrap();
            for i in 0..3 {
                assert_eq!(c_row[i].to_bits(), c_src[i].to_bits());
            }
        }
    }

    #[test]
    fn absent_clebsch_columns_are_empty() {
        let traj = short_run(false);
        let mut buf = Vec::new();
        write_csv(&mut buf, &traj).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let second_line = text.lines().nth(1).unwrap();
        assert!(second_line.contains(",,,"));
        let rows = read_csv(text.as_bytes()).unwrap();
        assert!(rows.iter().all(|r| r.c.is_none()));
    }

    #[test]
    fn malformed_csv_reports_line() {
        let text = format!("{CSV_HEADER}\n1.0,2.0\n");
        match read_csv(text.as_bytes()) {
            Err(Error::CsvParse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn plot_files_written() {
        let traj = short_run(true);
        let dir = tempfile::tempdir().unwrap();
        write_plot_files(dir.path(), &traj).unwrap();
        for name in ["w1", "i3", "H0", "C1", "r2"] {
            let text = std::fs::read_to_string(dir.path().join(format!("{name}.dat"))).unwrap();
            assert_eq!(text.lines().count(), traj.len());
            let first = text.lines().next().unwrap();
            assert_eq!(first.split(' ').count(), 2);
        }
    }
}
