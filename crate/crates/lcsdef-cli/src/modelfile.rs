//! TOML model, section and series files.

use std::path::Path;

use lcsdef::bulk::BulkSeries;
use lcsdef::forms::DifferentialForm;
use lcsdef::lcps::{Model, ModelError};
use lcsdef::mc::FormalSeries;
use lcsdef::ring::{CoordinateRoster, FourierScalar, RingError};
use lcsdef::syntax::{parse_form_of_degree, parse_scalar};
use lcsdef::thickening::Splitting;
use thiserror::Error;
use toml::{Table, Value};

#[derive(Debug, Error)]
pub enum FileError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Toml { path: String, source: toml::de::Error },
    #[error("{path}: missing key `{key}`")]
    Missing { path: String, key: String },
    #[error("{path}: `{key}` has the wrong type, expected {expected}")]
    Type { path: String, key: String, expected: &'static str },
    #[error("{path}: in `{key}`: {source}")]
    Expr { path: String, key: String, source: RingError },
    #[error("{path}: {source}")]
    Model { path: String, source: ModelError },
    #[error("{path}: {source}")]
    Bulk { path: String, source: lcsdef::bulk::BulkError },
}

pub struct Doc {
    path: String,
    table: Table,
}

impl Doc {
    pub fn read(path: &Path) -> Result<Self, FileError> {
        let p = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| FileError::Io { path: p.clone(), source })?;
        Self::parse(&p, &text)
    }

    pub fn parse(path: &str, text: &str) -> Result<Self, FileError> {
        let table = text.parse::<Table>().map_err(|source| FileError::Toml { path: path.to_string(), source })?;
        Ok(Doc { path: path.to_string(), table })
    }

    fn missing(&self, key: &str) -> FileError {
        FileError::Missing { path: self.path.clone(), key: key.to_string() }
    }

    fn wrong(&self, key: &str, expected: &'static str) -> FileError {
        FileError::Type { path: self.path.clone(), key: key.to_string(), expected }
    }

    fn get(&self, section: &str, key: &str) -> Option<&Value> {
        self.table.get(section)?.as_table()?.get(key)
    }

    fn strings(&self, v: &Value, key: &str) -> Result<Vec<String>, FileError> {
        v.as_array()
            .ok_or_else(|| self.wrong(key, "array of strings"))?
            .iter()
            .map(|x| x.as_str().map(str::to_string).ok_or_else(|| self.wrong(key, "array of strings")))
            .collect()
    }

    fn string_matrix(&self, v: &Value, key: &str) -> Result<Vec<Vec<String>>, FileError> {
        v.as_array().ok_or_else(|| self.wrong(key, "array of arrays"))?.iter().map(|row| self.strings(row, key)).collect()
    }

    fn form(&self, src: &str, key: &str, roster: &CoordinateRoster, degree: usize) -> Result<DifferentialForm, FileError> {
        parse_form_of_degree(src, roster, degree).map_err(|source| FileError::Expr { path: self.path.clone(), key: key.to_string(), source })
    }

    fn scalar(&self, src: &str, key: &str, roster: &CoordinateRoster) -> Result<FourierScalar, FileError> {
        parse_scalar(src, roster).map_err(|source| FileError::Expr { path: self.path.clone(), key: key.to_string(), source })
    }

    fn model_err(&self, source: ModelError) -> FileError {
        FileError::Model { path: self.path.clone(), source }
    }

    /// Reads `[coordinates]`, `[structure]`, optional `[splitting]` and `[omega_inverse]`.
    pub fn model(&self) -> Result<Model, FileError> {
        let names = |key: &str| -> Result<Vec<String>, FileError> {
            match self.get("coordinates", key) {
                Some(v) => self.strings(v, key),
                None if key == "fiber" => Ok(vec![]),
                None => Err(self.missing(&format!("coordinates.{key}"))),
            }
        };
        let roster = CoordinateRoster::new(names("transverse")?, names("leaf")?, names("fiber")?)
            .map_err(|source| FileError::Expr { path: self.path.clone(), key: "coordinates".into(), source })?;
        let sh = roster.shape();
        let text = |key: &str| -> Result<String, FileError> {
            self.get("structure", key)
                .ok_or_else(|| self.missing(&format!("structure.{key}")))?
                .as_str()
                .map(str::to_string)
                .ok_or_else(|| self.wrong(key, "string"))
        };
        let omega = self.form(&text("omega")?, "structure.omega", &roster, 2)?;
        let b = match self.get("structure", "b") {
            Some(_) => self.form(&text("b")?, "structure.b", &roster, 1)?,
            None => DifferentialForm::zero(sh, 1),
        };
        let k = self
            .get("structure", "k")
            .ok_or_else(|| self.missing("structure.k"))?
            .as_integer()
            .filter(|k| *k >= 0)
            .ok_or_else(|| self.wrong("structure.k", "nonnegative integer"))? as usize;
        let mut model = Model::new(roster.clone(), omega, b, k).map_err(|e| self.model_err(e))?;
        if let Some(v) = self.get("splitting", "R") {
            let rows = self.string_matrix(v, "splitting.R")?;
            let base = roster.base();
            let r = rows
                .iter()
                .map(|row| row.iter().map(|s| self.scalar(s, "splitting.R", &base)).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?;
            let split = Splitting::new(sh, r).map_err(|e| self.model_err(e))?;
            model = model.with_splitting(split).map_err(|e| self.model_err(e))?;
        }
        if let Some(v) = self.get("omega_inverse", "matrix") {
            let rows = self.string_matrix(v, "omega_inverse.matrix")?;
            let inv = rows
                .iter()
                .map(|row| row.iter().map(|s| self.scalar(s, "omega_inverse.matrix", &roster)).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?;
            model = model.with_omega_inv(inv).map_err(|e| self.model_err(e))?;
        } else if sh.transverse > 0 {
            model = model.clone().with_derived_inverse().unwrap_or(model);
        }
        Ok(model)
    }

    fn form_list(&self, key: &str, roster: &CoordinateRoster, degree: usize) -> Result<Vec<DifferentialForm>, FileError> {
        match self.table.get(key) {
            None => Ok(vec![]),
            Some(v) => self.strings(v, key)?.iter().map(|s| self.form(s, key, roster, degree)).collect(),
        }
    }

    /// `gamma = ["Γ₁", "Γ₂", …]` as an ε-series.
    pub fn section(&self, roster: &CoordinateRoster) -> Result<FormalSeries, FileError> {
        if !self.table.contains_key("gamma") {
            return Err(self.missing("gamma"));
        }
        Ok(FormalSeries::new(self.form_list("gamma", roster, 1)?))
    }

    /// `omegas`, `lee_forms` and `sections` arrays; index 0 of the first two is the model structure.
    pub fn series(&self, m: &Model) -> Result<BulkSeries, FileError> {
        let r = m.roster();
        let mut omegas = self.form_list("omegas", r, 2)?;
        let mut lee = self.form_list("lee_forms", r, 1)?;
        if omegas.is_empty() {
            omegas.push(m.omega().clone());
        }
        if lee.is_empty() {
            lee.push(m.b().clone());
        }
        let sections = FormalSeries::new(self.form_list("sections", r, 1)?);
        BulkSeries::new(omegas, lee, sections, m).map_err(|source| FileError::Bulk { path: self.path.clone(), source })
    }
}

fn quote_list<'a>(xs: impl IntoIterator<Item = &'a str>) -> String {
    let v: Vec<String> = xs.into_iter().map(|s| format!("\"{s}\"")).collect();
    format!("[{}]", v.join(", "))
}

/// Prints a model in the file format read by [`Doc::model`].
pub fn print_model(m: &Model) -> String {
    let r = m.roster();
    let mut out = String::new();
    out.push_str("[coordinates]\n");
    out.push_str(&format!("transverse = {}\n", quote_list(r.transverse().iter().map(String::as_str))));
    out.push_str(&format!("leaf = {}\n", quote_list(r.leaf().iter().map(String::as_str))));
    out.push_str(&format!("fiber = {}\n", quote_list(r.fiber().iter().map(String::as_str))));
    out.push_str("\n[structure]\n");
    out.push_str(&format!("omega = \"{}\"\n", m.omega().to_text(r)));
    out.push_str(&format!("b = \"{}\"\n", m.b().to_text(r)));
    out.push_str(&format!("k = {}\n", m.rank_k()));
    if let Some(s) = m.splitting() {
        let base = r.base();
        let rows: Vec<String> = s.entries().iter().map(|row| quote_list(row.iter().map(|f| f.to_text(&base)).collect::<Vec<_>>().iter().map(String::as_str))).collect();
        out.push_str(&format!("\n[splitting]\nR = [{}]\n", rows.join(", ")));
    }
    if let Some(inv) = m.omega_inv() {
        let rows: Vec<String> = inv.iter().map(|row| quote_list(row.iter().map(|f| f.to_text(r)).collect::<Vec<_>>().iter().map(String::as_str))).collect();
        out.push_str(&format!("\n[omega_inverse]\nmatrix = [{}]\n", rows.join(", ")));
    }
    out
}
