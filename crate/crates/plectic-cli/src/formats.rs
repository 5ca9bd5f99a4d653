//! On-disk JSON formats. Rationals are strings `"a/b"` (or `"a"`), matrices
//! are row-major nested arrays of such strings, field order is irrelevant,
//! and all files are UTF-8.

use plectic::quadratic::QuadraticStructure;
use plectic::{format_rat, parse_rat, Matrix, PlecticModule, Rank2FPhi, Rat, Subspace, WeightData};
use serde::{Deserialize, Serialize};
use std::fmt;

pub const MODULE_SCHEMA: &str = "plectic-module/1";
pub const FILTRATION_SCHEMA: &str = "plectic-filtration/1";
pub const EIGEN_SCHEMA: &str = "plectic-eigendata/1";

#[derive(Debug)]
pub struct FormatError(pub String);

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for FormatError {}

fn err<T>(msg: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError(msg.into()))
}

pub fn matrix_to_strings(m: &Matrix) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|r| (0..m.cols()).map(|c| format_rat(&m[(r, c)])).collect())
        .collect()
}

pub fn matrix_from_strings(rows: &[Vec<String>]) -> Result<Matrix, FormatError> {
    let mut parsed: Vec<Vec<Rat>> = Vec::with_capacity(rows.len());
    for row in rows {
        let mut out = Vec::with_capacity(row.len());
        for s in row {
            out.push(parse_rat(s).map_err(|e| FormatError(e.to_string()))?);
        }
        parsed.push(out);
    }
    if parsed.is_empty() {
        return err("matrix must have at least one row");
    }
    let cols = parsed[0].len();
    if parsed.iter().any(|r| r.len() != cols) {
        return err("ragged matrix rows");
    }
    Ok(Matrix::from_rows(parsed))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightEntry {
    pub k: i64,
    pub t: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactorEntry {
    pub k: i64,
    pub t: i64,
    pub phi: Vec<Vec<String>>,
    pub fil_line: Vec<Vec<String>>,
    pub alpha: String,
    pub beta: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModuleFile {
    pub schema_version: String,
    pub p: u64,
    pub d: usize,
    pub weights: Vec<WeightEntry>,
    pub dimension: usize,
    pub phis: Vec<Vec<Vec<String>>>,
    pub fil_plus: Vec<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
    /// Factor data for oracle cross-checks on generated tensor inductions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factors: Option<Vec<FactorEntry>>,
}

impl ModuleFile {
    pub fn from_module(
        m: &PlecticModule,
        lambda: Option<&QuadraticStructure>,
        factors: Option<&[Rank2FPhi]>,
        provenance: Option<String>,
    ) -> Self {
        ModuleFile {
            schema_version: MODULE_SCHEMA.to_string(),
            p: m.p(),
            d: m.d(),
            weights: (0..m.d())
                .map(|i| WeightEntry { k: m.weight().k(i), t: m.weight().t(i) })
                .collect(),
            dimension: m.dim(),
            phis: m.phis().iter().map(matrix_to_strings).collect(),
            fil_plus: m.fil_steps().iter().map(|s| matrix_to_strings(s.basis())).collect(),
            lambda: lambda.map(|l| matrix_to_strings(l.matrix())),
            provenance,
            factors: factors.map(|fs| {
                fs.iter()
                    .map(|f| {
                        let pair = f.root_pair().expect("generated factors have rational roots");
                        FactorEntry {
                            k: f.k(),
                            t: f.t(),
                            phi: matrix_to_strings(f.phi()),
                            fil_line: matrix_to_strings(f.fil_line().basis()),
                            alpha: format_rat(&pair.alpha),
                            beta: format_rat(&pair.beta),
                        }
                    })
                    .collect()
            }),
        }
    }

    /// Parses and validates; all module invariants are re-checked.
    pub fn to_module(&self) -> Result<(PlecticModule, Option<QuadraticStructure>), FormatError> {
        if self.schema_version != MODULE_SCHEMA {
            return err(format!("unknown schema_version {:?}", self.schema_version));
        }
        if self.weights.len() != self.d {
            return err("weights list must have d entries");
        }
        if self.dimension != 1usize.checked_shl(self.d as u32).unwrap_or(0) {
            return err("dimension must be 2^d");
        }
        let weight = WeightData::new(
            self.p,
            self.weights.iter().map(|w| w.k).collect(),
            self.weights.iter().map(|w| w.t).collect(),
        )
        .map_err(|e| FormatError(e.to_string()))?;
        if self.phis.len() != self.d || self.fil_plus.len() != self.d {
            return err("phis and fil_plus must have d entries");
        }
        let phis = self
            .phis
            .iter()
            .map(|m| matrix_from_strings(m))
            .collect::<Result<Vec<_>, _>>()?;
        let fil_plus = self
            .fil_plus
            .iter()
            .map(|rows| {
                let m = matrix_from_strings(rows)?;
                if m.cols() != self.dimension {
                    return err("filtration basis rows have wrong length");
                }
                Ok(Subspace::from_matrix(self.dimension, &m))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let module = PlecticModule::new(weight, phis, fil_plus)
            .map_err(|e| FormatError(e.to_string()))?;
        let lambda = match &self.lambda {
            None => None,
            Some(rows) => {
                let m = matrix_from_strings(rows)?;
                if m.rows() != self.dimension || m.cols() != self.dimension {
                    return err("lambda must be a square matrix of the module dimension");
                }
                Some(
                    QuadraticStructure::new(m)
                        .map_err(|e| FormatError(format!("invalid lambda: {e}")))?,
                )
            }
        };
        Ok((module, lambda))
    }

    pub fn parsed_factors(&self) -> Result<Option<Vec<Rank2FPhi>>, FormatError> {
        let Some(entries) = &self.factors else {
            return Ok(None);
        };
        let mut out = Vec::with_capacity(entries.len());
        for f in entries {
            let phi = matrix_from_strings(&f.phi)?;
            let line_rows = matrix_from_strings(&f.fil_line)?;
            let fil_line = Subspace::from_matrix(2, &line_rows);
            out.push(
                Rank2FPhi::new(self.p, f.k, f.t, phi, fil_line)
                    .map_err(|e| FormatError(e.to_string()))?,
            );
        }
        Ok(Some(out))
    }
}

/// A bare family of generator subspaces, for filtration-only checks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiltrationFile {
    pub schema_version: String,
    pub ambient_dim: usize,
    pub generators: Vec<Vec<Vec<String>>>,
}

impl FiltrationFile {
    pub fn to_generators(&self) -> Result<Vec<Subspace>, FormatError> {
        if self.schema_version != FILTRATION_SCHEMA {
            return err(format!("unknown schema_version {:?}", self.schema_version));
        }
        self.generators
            .iter()
            .map(|rows| {
                let m = matrix_from_strings(rows)?;
                if m.cols() != self.ambient_dim {
                    return err("generator rows have wrong length");
                }
                Ok(Subspace::from_matrix(self.ambient_dim, &m))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PrimeEntry {
    pub k: i64,
    pub t: i64,
    pub alpha: String,
    pub beta: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenRecord {
    pub label: String,
    pub p: u64,
    pub primes: Vec<PrimeEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenDataFile {
    pub schema_version: String,
    pub records: Vec<EigenRecord>,
}

impl EigenDataFile {
    pub fn validate(&self) -> Result<(), FormatError> {
        if self.schema_version != EIGEN_SCHEMA {
            return err(format!("unknown schema_version {:?}", self.schema_version));
        }
        for rec in &self.records {
            if rec.primes.is_empty() {
                return err(format!("record {:?} has no prime entries", rec.label));
            }
            if !plectic::is_prime(rec.p) {
                return err(format!("record {:?}: {} is not prime", rec.label, rec.p));
            }
            let w = rec.primes[0].k + 2 * rec.primes[0].t;
            for (i, pe) in rec.primes.iter().enumerate() {
                if pe.k + 2 * pe.t != w {
                    return err(format!(
                        "record {:?}: k_{} + 2 t_{} is inconsistent with the motivic weight",
                        rec.label,
                        i + 1,
                        i + 1
                    ));
                }
                for (name, s) in [("alpha", &pe.alpha), ("beta", &pe.beta)] {
                    let v = parse_rat(s).map_err(|e| FormatError(e.to_string()))?;
                    if v == Rat::from_integer(0.into()) {
                        return err(format!("record {:?}: {name} must be nonzero", rec.label));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Either of the two check-file shapes, detected by schema.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SubjectFile {
    Module(ModuleFile),
    Filtration(FiltrationFile),
}
