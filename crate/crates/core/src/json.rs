//! JSON encoding of modules and morphisms.
//!
//! Rationals are `"num/den"` strings; matrices are row-major arrays of canonical residues.

use crate::error::CoreError;
use crate::field::{FieldConfig, Mat};
use crate::grid::Grid;
use crate::module::{GridModule, ModuleMorphism};
use crate::rational::{fmt_q, parse_q};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleJson {
    pub p: u32,
    pub n: usize,
    pub axes: Vec<Vec<String>>,
    pub dims: Vec<usize>,
    /// `steps[k][v]`: row-major matrix of the step from `v` along axis `k`, `[]` at the last layer.
    pub steps: Vec<Vec<Vec<u32>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismJson {
    pub source: ModuleJson,
    pub target: ModuleJson,
    pub mats: Vec<Vec<u32>>,
}

impl From<&GridModule> for ModuleJson {
    fn from(m: &GridModule) -> Self {
        let g = m.grid();
        ModuleJson {
            p: m.field().p(),
            n: g.n(),
            axes: g.axes().iter().map(|a| a.iter().map(fmt_q).collect()).collect(),
            dims: m.dims().to_vec(),
            steps: (0..g.n())
                .map(|k| g.vertices().map(|v| m.step(k, v).map_or_else(Vec::new, |s| s.data().to_vec())).collect())
                .collect(),
        }
    }
}

impl ModuleJson {
    pub fn to_module(&self) -> Result<GridModule, CoreError> {
        let field = FieldConfig::new(self.p)?;
        if self.axes.len() != self.n {
            return Err(CoreError::Parse(format!("expected {} axes, found {}", self.n, self.axes.len())));
        }
        let axes = self
            .axes
            .iter()
            .map(|a| a.iter().map(|s| parse_q(s)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let grid = Grid::new(axes)?;
        if self.dims.len() != grid.num_vertices() {
            return Err(CoreError::Parse(format!(
                "expected {} dims, found {}",
                grid.num_vertices(),
                self.dims.len()
            )));
        }
        if self.steps.len() != self.n || self.steps.iter().any(|s| s.len() != grid.num_vertices()) {
            return Err(CoreError::Parse("step table has the wrong size".into()));
        }
        let mut steps = Vec::with_capacity(self.n);
        for (k, sk) in self.steps.iter().enumerate() {
            let mut row = Vec::with_capacity(sk.len());
            for (v, data) in sk.iter().enumerate() {
                match grid.successor(v, k) {
                    Some(w) => {
                        let (r, c) = (self.dims[w], self.dims[v]);
                        if data.len() != r * c {
                            return Err(CoreError::Parse(format!(
                                "step along axis {k} at vertex {:?} has {} entries, expected {}",
                                grid.multi(v),
                                data.len(),
                                r * c
                            )));
                        }
                        row.push(Mat::from_data(r, c, data.clone()));
                    }
                    None => {
                        if !data.is_empty() {
                            return Err(CoreError::Parse(format!(
                                "vertex {:?} has no successor along axis {k} but a step was given",
                                grid.multi(v)
                            )));
                        }
                        row.push(Mat::zeros(0, 0));
                    }
                }
            }
            steps.push(row);
        }
        GridModule::from_parts_unchecked(field, grid, self.dims.clone(), steps)
    }
}

impl From<&ModuleMorphism> for MorphismJson {
    fn from(m: &ModuleMorphism) -> Self {
        MorphismJson {
            source: m.source().as_ref().into(),
            target: m.target().as_ref().into(),
            mats: m.mats().iter().map(|x| x.data().to_vec()).collect(),
        }
    }
}

impl MorphismJson {
    /// Decode; modules are shape-checked but neither they nor naturality are validated.
    pub fn to_morphism(&self) -> Result<ModuleMorphism, CoreError> {
        let s = Arc::new(self.source.to_module()?);
        let t = if self.target == self.source { s.clone() } else { Arc::new(self.target.to_module()?) };
        if self.mats.len() != s.grid().num_vertices() {
            return Err(CoreError::Parse("morphism needs one matrix per vertex".into()));
        }
        let mut mats = Vec::with_capacity(self.mats.len());
        for (v, data) in self.mats.iter().enumerate() {
            let (r, c) = (t.dims().get(v).copied().unwrap_or(0), s.dim(v));
            if data.len() != r * c {
                return Err(CoreError::Parse(format!("morphism component at vertex {v} has the wrong size")));
            }
            mats.push(Mat::from_data(r, c, data.clone()));
        }
        ModuleMorphism::new(s, t, mats)
    }
}

pub fn module_to_string(m: &GridModule) -> String {
    serde_json::to_string(&ModuleJson::from(m)).expect("serializable")
}

pub fn module_from_str(s: &str) -> Result<GridModule, CoreError> {
    let j: ModuleJson = serde_json::from_str(s).map_err(|e| CoreError::Parse(e.to_string()))?;
    j.to_module()
}
