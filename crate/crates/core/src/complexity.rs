//! Per-symbol multiplication and addition counts of the adaptive detectors.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    FullRankLms,
    FullRankMber,
    MwfLms,
    Eig,
    JioLms,
    MwfMber,
    JioMber,
    JioMberAutoRank,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::FullRankLms,
        Algorithm::FullRankMber,
        Algorithm::MwfLms,
        Algorithm::Eig,
        Algorithm::JioLms,
        Algorithm::MwfMber,
        Algorithm::JioMber,
        Algorithm::JioMberAutoRank,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::FullRankLms => "Full-Rank-LMS",
            Algorithm::FullRankMber => "Full-Rank-MBER",
            Algorithm::MwfLms => "MWF-LMS",
            Algorithm::Eig => "EIG",
            Algorithm::JioLms => "JIO-LMS",
            Algorithm::MwfMber => "MWF-MBER",
            Algorithm::JioMber => "JIO-MBER",
            Algorithm::JioMberAutoRank => "JIO-MBER-AutoRank",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        Algorithm::ALL
            .into_iter()
            .find(|a| {
                a.name().chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase() == key
            })
            .ok_or_else(|| Error::config(format!("unknown algorithm '{s}'")))
    }
}

/// Parameters a row may need. Rows ignore the ones they do not use.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpParams {
    #[serde(rename = "M")]
    pub m: Option<u64>,
    #[serde(rename = "D")]
    pub d: Option<u64>,
    #[serde(rename = "J")]
    pub j: Option<u64>,
    #[serde(rename = "Lp")]
    pub lp: Option<u64>,
    #[serde(rename = "Dmax")]
    pub d_max: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCountReport {
    pub algorithm: Algorithm,
    pub multiplications: u64,
    pub additions: u64,
    /// Set when the count is an order of magnitude (the `O(M³)` row) rather than exact.
    pub asymptotic: bool,
    pub params: OpParams,
}

fn need(value: Option<u64>, name: &str, alg: Algorithm) -> Result<i128> {
    match value {
        Some(v) if v > 0 => Ok(v as i128),
        Some(_) => Err(Error::config(format!("{alg} needs {name} > 0"))),
        None => Err(Error::config(format!("{alg} needs parameter {name}"))),
    }
}

fn to_count(v: i128, alg: Algorithm) -> Result<u64> {
    u64::try_from(v).map_err(|_| Error::config(format!("{alg}: operation count {v} out of range")))
}

pub fn op_count(algorithm: Algorithm, params: OpParams) -> Result<OpCountReport> {
    use Algorithm::*;
    let alg = algorithm;
    let m = || need(params.m, "M", alg);
    let d = || need(params.d, "D", alg);
    let j = || need(params.j, "J", alg);
    let lp = || need(params.lp, "Lp", alg);
    let d_max = || need(params.d_max, "Dmax", alg);

    let (mults, adds) = match algorithm {
        FullRankLms => {
            let m = m()?;
            (2 * m + 1, 2 * m)
        }
        FullRankMber => {
            let m = m()?;
            (4 * m + 1, 4 * m - 1)
        }
        MwfLms => {
            let (m, d) = (m()?, d()?);
            (d * m * m - m * m + 2 * d * m + 4 * d + 1, d * m * m - m * m + 3 * d - 2)
        }
        Eig => {
            let m = m()?;
            (m * m * m, m * m * m)
        }
        JioLms => {
            let (m, d) = (m()?, d()?);
            (3 * d * m + m + 3 * d + 6, 2 * d * m + m + 4 * d - 2)
        }
        MwfMber => {
            let (m, d, lp) = (m()?, d()?, lp()?);
            (
                (d + 1) * m * m + (3 * d + 1) * m + 3 * d + m * lp + 10,
                (d - 1) * m * m + (2 * d - 1) * m + 2 * d + m * lp + 1,
            )
        }
        JioMber => {
            let (m, d, j) = (m()?, d()?, j()?);
            (
                6 * m * d * j + 5 * d * j + m * j + 11 * j,
                5 * m * d * j + d * j - m * j - j,
            )
        }
        JioMberAutoRank => {
            let (m, dm) = (m()?, d_max()?);
            ((6 * m + 5) * dm + m + 11, (5 * m + 1) * dm - m - 1)
        }
    };
    Ok(OpCountReport {
        algorithm,
        multiplications: to_count(mults, alg)?,
        additions: to_count(adds, alg)?,
        asymptotic: algorithm == Eig,
        params,
    })
}

/// Value lists to take the cross product of. Empty lists leave the parameter unset.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParamGrid {
    pub m: Vec<u64>,
    pub d: Vec<u64>,
    pub j: Vec<u64>,
    pub lp: Vec<u64>,
    pub d_max: Vec<u64>,
}

fn axis(values: &[u64]) -> Vec<Option<u64>> {
    if values.is_empty() {
        vec![None]
    } else {
        values.iter().copied().map(Some).collect()
    }
}

/// Evaluates every algorithm at every grid point, skipping rows whose
/// parameters are missing from the grid.
pub fn complexity_sweep(algorithms: &[Algorithm], grid: &ParamGrid) -> Result<Vec<OpCountReport>> {
    let mut out = Vec::new();
    for &alg in algorithms {
        for &m in &axis(&grid.m) {
            for &d in &axis(&grid.d) {
                for &j in &axis(&grid.j) {
                    for &lp in &axis(&grid.lp) {
                        for &d_max in &axis(&grid.d_max) {
                            let params = OpParams { m, d, j, lp, d_max };
                            match op_count(alg, params) {
                                Ok(r) => out.push(r),
                                Err(Error::Config(msg)) if msg.contains("needs parameter") => {}
                                Err(e) => return Err(e),
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

pub const CSV_HEADER: &str = "algorithm,M,D,J,Lp,Dmax,mults,adds";

fn opt(v: Option<u64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_csv<W: Write>(reports: &[OpCountReport], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in reports {
        let p = r.params;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.algorithm,
            opt(p.m),
            opt(p.d),
            opt(p.j),
            opt(p.lp),
            opt(p.d_max),
            r.multiplications,
            r.additions
        )?;
    }
    Ok(())
}

pub fn emit_csv(reports: &[OpCountReport], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(reports, std::io::BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(m: u64, d: u64, j: u64, lp: u64, d_max: u64) -> OpParams {
        OpParams {
            m: Some(m),
            d: Some(d),
            j: Some(j),
            lp: Some(lp),
            d_max: Some(d_max),
        }
    }

    #[test]
    fn worked_instances() {
        let jio = op_count(Algorithm::JioMber, p(33, 6, 1, 3, 20)).unwrap();
        assert_eq!((jio.multiplications, jio.additions), (1262, 962));
        let mwf = op_count(Algorithm::MwfMber, p(33, 6, 1, 3, 20)).unwrap();
        assert_eq!((mwf.multiplications, mwf.additions), (8377, 5920));
        let lms = op_count(Algorithm::FullRankLms, p(33, 6, 1, 3, 20)).unwrap();
        assert_eq!((lms.multiplications, lms.additions), (67, 66));
        let auto = op_count(Algorithm::JioMberAutoRank, p(33, 6, 1, 3, 20)).unwrap();
        assert_eq!((auto.multiplications, auto.additions), (4104, 3286));
    }

    #[test]
    fn eig_is_flagged() {
        let eig = op_count(Algorithm::Eig, p(10, 1, 1, 1, 1)).unwrap();
        assert!(eig.asymptotic);
        assert_eq!(eig.multiplications, 1000);
        assert!(!op_count(Algorithm::JioLms, p(10, 2, 1, 1, 1)).unwrap().asymptotic);
    }

    #[test]
    fn missing_parameter_is_a_config_error() {
        let only_m = OpParams {
            m: Some(33),
            ..Default::default()
        };
        assert!(op_count(Algorithm::FullRankMber, only_m).is_ok());
        assert!(matches!(op_count(Algorithm::MwfMber, only_m), Err(Error::Config(_))));
        assert!(matches!(op_count(Algorithm::JioMberAutoRank, only_m), Err(Error::Config(_))));
        let zero_d = OpParams { d: Some(0), ..only_m };
        assert!(op_count(Algorithm::JioLms, zero_d).is_err());
    }

    #[test]
    fn names_parse_back() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert_eq!("jio_mber".parse::<Algorithm>().unwrap(), Algorithm::JioMber);
        assert!("rls".parse::<Algorithm>().is_err());
    }

    #[test]
    fn sweep_single_cell_and_csv() {
        let grid = ParamGrid {
            m: vec![33],
            d: vec![6],
            j: vec![1],
            ..Default::default()
        };
        let rows = complexity_sweep(&[Algorithm::JioMber], &grid).unwrap();
        assert_eq!(rows.len(), 1);
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "algorithm,M,D,J,Lp,Dmax,mults,adds\nJIO-MBER,33,6,1,,,1262,962\n"
        );
    }

    #[test]
    fn sweep_skips_rows_missing_parameters() {
        let grid = ParamGrid {
            m: vec![33],
            d: vec![4, 8],
            ..Default::default()
        };
        let rows = complexity_sweep(&Algorithm::ALL, &grid).unwrap();
        // FullRankLms, FullRankMber, MwfLms, Eig, JioLms evaluate; the rest need J/Lp/Dmax.
        assert_eq!(rows.len(), 5 * 2);
    }
}
