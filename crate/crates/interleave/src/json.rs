//! JSON encoding of certificates.

use crate::cert::Certificate;
use crate::InterleaveError;
use pmod_core::json::ModuleJson;
use pmod_core::rational::{fmt_q, parse_q};
use pmod_core::{CoreError, Grid, Mat};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfJson {
    pub axes: Vec<Vec<String>>,
    pub mats: Vec<Vec<u32>>,
}

/// Self-contained certificate: both modules, ε and the two halves on their own grids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub m: ModuleJson,
    pub n: ModuleJson,
    pub eps: String,
    pub f: HalfJson,
    pub g: HalfJson,
}

impl From<&Certificate> for CertificateJson {
    fn from(c: &Certificate) -> Self {
        let half = |h: &pmod_core::ModuleMorphism| HalfJson {
            axes: h.grid().axes().iter().map(|a| a.iter().map(fmt_q).collect()).collect(),
            mats: h.mats().iter().map(|m| m.data().to_vec()).collect(),
        };
        CertificateJson {
            m: c.m().as_ref().into(),
            n: c.n().as_ref().into(),
            eps: fmt_q(c.eps()),
            f: half(c.f()),
            g: half(c.g()),
        }
    }
}

impl CertificateJson {
    /// Decode without verifying; call [`Certificate::verify`] on the result.
    pub fn to_certificate(&self) -> Result<Certificate, InterleaveError> {
        let m = Arc::new(self.m.to_module()?);
        let n = Arc::new(self.n.to_module()?);
        let eps = parse_q(&self.eps)?;
        let f = decode_half(&self.f, &m, &n, &eps)?;
        let g = decode_half(&self.g, &n, &m, &eps)?;
        Ok(Certificate::new_unverified(m, n, eps, f, g))
    }
}

fn decode_half(
    h: &HalfJson,
    src: &pmod_core::GridModule,
    dst: &pmod_core::GridModule,
    eps: &pmod_core::Q,
) -> Result<pmod_core::ModuleMorphism, InterleaveError> {
    let axes = h
        .axes
        .iter()
        .map(|a| a.iter().map(|s| parse_q(s)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    let q = Grid::new(axes)?;
    let s = src.restriction_extension(&q);
    let t = pmod_kan::shifted_resample(dst, &q, eps);
    if h.mats.len() != q.num_vertices() {
        return Err(CoreError::Parse("certificate half needs one matrix per vertex".into()).into());
    }
    let mut mats = Vec::with_capacity(h.mats.len());
    for (v, d) in h.mats.iter().enumerate() {
        let (r, c) = (t.dim(v), s.dim(v));
        if d.len() != r * c {
            return Err(CoreError::Parse(format!("certificate component {v} has the wrong size")).into());
        }
        mats.push(Mat::from_data(r, c, d.clone()));
    }
    Certificate::half(src, dst, eps, &q, mats)
}
