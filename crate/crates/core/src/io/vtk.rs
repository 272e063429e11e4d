//! Legacy ASCII VTK `STRUCTURED_POINTS` dumps with cell data.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{SolidMask, TorusGrid};
use crate::physics::GasModel;
use crate::real::Real;
use crate::solver::State;

/// Cell fields in the order they are written.
pub const FIELD_NAMES: [&str; 5] = ["rho", "theta", "u1", "u2", "mask"];

#[derive(Clone, Debug, PartialEq)]
pub struct FieldDump {
    pub time: f64,
    pub n: usize,
    pub h: f64,
    pub fields: Vec<(String, Vec<f64>)>,
}

impl FieldDump {
    pub fn from_state<T: Real>(
        grid: &TorusGrid<T>,
        time: T,
        state: &State<T>,
        gas: &GasModel<T>,
        mask: &SolidMask,
    ) -> Self {
        let to64 = |v: &[T]| v.iter().map(|x| x.as_f64()).collect::<Vec<_>>();
        let u = state.velocity();
        let theta = state.temperature(gas);
        let mask_values = mask.flags().iter().map(|&s| if s { 1.0 } else { 0.0 }).collect();
        Self {
            time: time.as_f64(),
            n: grid.n(),
            h: grid.h().as_f64(),
            fields: vec![
                ("rho".into(), to64(&state.rho.values)),
                ("theta".into(), to64(&theta.values)),
                ("u1".into(), to64(&u.comp[0].values)),
                ("u2".into(), to64(&u.comp[1].values)),
                ("mask".into(), mask_values),
            ],
        }
    }

    pub fn field(&self, name: &str) -> Option<&[f64]> {
        self.fields
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        let n = self.n;
        writeln!(out, "# vtk DataFile Version 3.0")?;
        writeln!(out, "nsf-pen t={}", self.time)?;
        writeln!(out, "ASCII")?;
        writeln!(out, "DATASET STRUCTURED_POINTS")?;
        writeln!(out, "DIMENSIONS {} {} 1", n + 1, n + 1)?;
        writeln!(out, "ORIGIN -1 -1 0")?;
        writeln!(out, "SPACING {} {} 1", self.h, self.h)?;
        writeln!(out, "CELL_DATA {}", n * n)?;
        for (name, values) in &self.fields {
            if values.len() != n * n {
                return Err(Error::Format(format!("field {name} has {} values, expected {}", values.len(), n * n)));
            }
            writeln!(out, "SCALARS {name} double 1")?;
            writeln!(out, "LOOKUP_TABLE default")?;
            for v in values {
                writeln!(out, "{v:.16e}")?;
            }
        }
        Ok(())
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(file);
        self.write(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn read<R: Read>(input: R) -> Result<Self> {
        let mut lines = BufReader::new(input).lines();
        let mut next = |what: &str| -> Result<String> {
            lines
                .next()
                .transpose()?
                .ok_or_else(|| Error::Format(format!("unexpected end of file, expected {what}")))
        };
        let bad = |what: &str, line: &str| Error::Format(format!("bad {what} line: `{line}`"));

        let version = next("version")?;
        if version != "# vtk DataFile Version 3.0" {
            return Err(bad("version", &version));
        }
        let title = next("title")?;
        let time = title
            .strip_prefix("nsf-pen t=")
            .and_then(|t| t.parse::<f64>().ok())
            .ok_or_else(|| bad("title", &title))?;
        let ascii = next("ASCII")?;
        if ascii != "ASCII" {
            return Err(bad("format", &ascii));
        }
        let dataset = next("dataset")?;
        if dataset != "DATASET STRUCTURED_POINTS" {
            return Err(bad("dataset", &dataset));
        }
        let dims_line = next("DIMENSIONS")?;
        let dims: Vec<usize> = dims_line
            .strip_prefix("DIMENSIONS ")
            .map(|s| s.split_whitespace().filter_map(|x| x.parse().ok()).collect())
            .unwrap_or_default();
        if dims.len() != 3 || dims[0] != dims[1] || dims[2] != 1 || dims[0] < 3 {
            return Err(bad("DIMENSIONS", &dims_line));
        }
        let n = dims[0] - 1;
        let origin = next("ORIGIN")?;
        if origin != "ORIGIN -1 -1 0" {
            return Err(bad("ORIGIN", &origin));
        }
        let spacing_line = next("SPACING")?;
        let spacing: Vec<f64> = spacing_line
            .strip_prefix("SPACING ")
            .map(|s| s.split_whitespace().filter_map(|x| x.parse().ok()).collect())
            .unwrap_or_default();
        if spacing.len() != 3 || spacing[0] != spacing[1] {
            return Err(bad("SPACING", &spacing_line));
        }
        let cell_data = next("CELL_DATA")?;
        if cell_data != format!("CELL_DATA {}", n * n) {
            return Err(bad("CELL_DATA", &cell_data));
        }

        let mut fields = Vec::new();
        loop {
            let header = match lines.next().transpose()? {
                Some(l) if l.trim().is_empty() => continue,
                Some(l) => l,
                None => break,
            };
            let name = header
                .strip_prefix("SCALARS ")
                .and_then(|s| s.strip_suffix(" double 1"))
                .ok_or_else(|| bad("SCALARS", &header))?
                .to_string();
            let lut = lines.next().transpose()?.unwrap_or_default();
            if lut != "LOOKUP_TABLE default" {
                return Err(bad("LOOKUP_TABLE", &lut));
            }
            let mut values = Vec::with_capacity(n * n);
            for _ in 0..n * n {
                let l = lines
                    .next()
                    .transpose()?
                    .ok_or_else(|| Error::Format(format!("field {name} truncated")))?;
                values.push(l.trim().parse::<f64>().map_err(|_| bad("value", &l))?);
            }
            fields.push((name, values));
        }
        Ok(Self {
            time,
            n,
            h: spacing[0],
            fields,
        })
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::read(std::fs::File::open(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> FieldDump {
        FieldDump {
            time: 0.0125,
            n: 2,
            h: 1.0,
            fields: vec![
                ("rho".into(), vec![1.0, 0.1, 1.0 / 3.0, 2.0e-300]),
                ("mask".into(), vec![1.0, 0.0, 0.0, 1.0]),
            ],
        }
    }

    #[test]
    fn header_layout() {
        let mut buf = Vec::new();
        sample().write(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            &lines[..10],
            &[
                "# vtk DataFile Version 3.0",
                "nsf-pen t=0.0125",
                "ASCII",
                "DATASET STRUCTURED_POINTS",
                "DIMENSIONS 3 3 1",
                "ORIGIN -1 -1 0",
                "SPACING 1 1 1",
                "CELL_DATA 4",
                "SCALARS rho double 1",
                "LOOKUP_TABLE default",
            ]
        );
        assert_eq!(lines[12], "3.3333333333333331e-1");
    }

    #[test]
    fn round_trip_is_exact() {
        let d = sample();
        let mut buf = Vec::new();
        d.write(&mut buf).unwrap();
        assert_eq!(FieldDump::read(buf.as_slice()).unwrap(), d);
    }

    #[test]
    fn malformed_input_rejected() {
        assert!(FieldDump::read("# vtk DataFile Version 2.0\n".as_bytes()).is_err());
        let mut buf = Vec::new();
        sample().write(&mut buf).unwrap();
        let truncated = &buf[..buf.len() - 30];
        assert!(FieldDump::read(truncated).is_err());
    }
}
