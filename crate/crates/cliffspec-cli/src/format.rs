//! JSON and CSV formats, and the text forms of maps and group elements.

use std::str::FromStr;

use cliffspec::calculus::OperatorTuple;
use cliffspec::clifford::Multivector;
use cliffspec::linalg::RMat;
use cliffspec::moebius::MoebElement;
use cliffspec::spectrum::{fig1_phi, HoloMap, JointSpectrum, JordanStructure, SpectralPoint};
use cliffspec::Complex64;
use serde::{Deserialize, Serialize};

use crate::meta::Meta;

/// `{"n": 2, "d": 3, "A": [A1, A2]}` with each `A_j` given by rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub n: usize,
    pub d: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<Vec<f64>>>,
}

impl MatrixFile {
    pub fn from_tuple(t: &OperatorTuple) -> Self {
        MatrixFile { n: t.dim(), d: t.size(), a: t.mats().iter().map(RMat::to_rows).collect() }
    }

    pub fn to_tuple(&self) -> Result<OperatorTuple, String> {
        if self.a.len() != self.n {
            return Err(format!("expected {} matrices, found {}", self.n, self.a.len()));
        }
        for (j, m) in self.a.iter().enumerate() {
            if m.len() != self.d || m.iter().any(|r| r.len() != self.d) {
                return Err(format!("A{} is not {}x{}", j + 1, self.d, self.d));
            }
            if m.iter().flatten().any(|x| !x.is_finite()) {
                return Err(format!("A{} has a non-finite entry", j + 1));
            }
        }
        OperatorTuple::new(self.a.iter().map(|m| RMat::from_rows(m)).collect()).map_err(|e| e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointJson {
    pub u: [f64; 2],
    pub k: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockJson {
    pub lambda: [f64; 2],
    pub sizes: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<Meta>,
    pub points: Vec<PointJson>,
    #[serde(default)]
    pub blocks: Vec<BlockJson>,
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

impl SpectrumFile {
    pub fn from_structure(s: &JordanStructure, meta: Meta) -> Self {
        let sp = JointSpectrum::from_structure(s);
        let mut blocks: Vec<BlockJson> =
            s.clusters.iter().map(|c| BlockJson { lambda: pair(c.lambda), sizes: c.sizes.clone() }).collect();
        blocks.sort_by(|a, b| a.lambda[0].total_cmp(&b.lambda[0]).then(a.lambda[1].total_cmp(&b.lambda[1])));
        SpectrumFile { meta: Some(meta), points: points_of(&sp), blocks }
    }

    /// Blocks are recovered from the level counts at each site.
    pub fn from_spectrum(sp: &JointSpectrum, site_tol: f64, meta: Meta) -> Self {
        let mut s = sp.clone();
        s.sort();
        let blocks = s
            .classical(site_tol)
            .into_iter()
            .map(|(u, _)| {
                let mut counts: Vec<usize> = Vec::new();
                for p in s.points.iter().filter(|p| (p.u - u).norm() <= site_tol) {
                    if counts.len() <= p.k {
                        counts.resize(p.k + 1, 0);
                    }
                    counts[p.k] += 1;
                }
                // counts[k] blocks have length > k
                let mut sizes = Vec::new();
                for k in 0..counts.len() {
                    let longer = counts.get(k + 1).copied().unwrap_or(0);
                    sizes.extend(std::iter::repeat_n(k + 1, counts[k].saturating_sub(longer)));
                }
                sizes.sort_unstable_by(|a, b| b.cmp(a));
                BlockJson { lambda: pair(u), sizes }
            })
            .collect();
        SpectrumFile { meta: Some(meta), points: points_of(&s), blocks }
    }

    pub fn spectrum(&self) -> JointSpectrum {
        let mut s = JointSpectrum {
            points: self.points.iter().map(|p| SpectralPoint { u: Complex64::new(p.u[0], p.u[1]), k: p.k }).collect(),
        };
        s.sort();
        s
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.points.iter().any(|p| !(p.u[0].is_finite() && p.u[1].is_finite())) {
            return Err("non-finite spectral point".into());
        }
        Ok(())
    }
}

fn points_of(s: &JointSpectrum) -> Vec<PointJson> {
    s.points.iter().map(|p| PointJson { u: pair(p.u), k: p.k }).collect()
}

/// Holomorphic map from text: `identity`, `example`, `poly:c0,c1,..` or
/// `blaschke:re,im,theta`. Coefficients accept complex forms like `0.1-0.2i`.
pub fn parse_phi(s: &str) -> Result<HoloMap, String> {
    let s = s.trim();
    let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
    match kind {
        "identity" => Ok(HoloMap::identity()),
        "example" => Ok(fig1_phi()),
        "poly" => {
            let c = rest.split(',').map(parse_complex).collect::<Result<Vec<_>, _>>()?;
            if c.is_empty() {
                return Err("empty polynomial".into());
            }
            Ok(HoloMap::Polynomial(c))
        }
        "blaschke" => {
            let v = parse_reals(rest)?;
            if v.len() != 3 {
                return Err("blaschke needs re,im,theta".into());
            }
            let p = Complex64::new(v[0], v[1]);
            if p.norm() >= 1.0 {
                return Err("blaschke zero must lie in the open disk".into());
            }
            Ok(HoloMap::blaschke(p, v[2]))
        }
        _ => Err(format!("unknown map '{s}'")),
    }
}

pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t = s.trim();
    Complex64::from_str(t).map_err(|_| format!("bad complex number '{t}'"))
}

pub fn parse_reals(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|x| {
            let t = x.trim();
            t.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| format!("bad number '{t}'"))
        })
        .collect()
}

/// Group element from `u1,..,un` or `u1,..,un;w`.
pub fn parse_moeb(s: &str) -> Result<MoebElement, String> {
    let (u, w) = s.split_once(';').unwrap_or((s, "1"));
    let u = parse_reals(u)?;
    let w = Multivector::parse(u.len(), w.trim()).map_err(|e| e.to_string())?;
    MoebElement::new(u, w).map_err(|e| e.to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoebJson {
    pub u: Vec<f64>,
    pub w: String,
}

impl From<&MoebElement> for MoebJson {
    fn from(g: &MoebElement) -> Self {
        MoebJson { u: g.u.clone(), w: g.w.to_string() }
    }
}

/// Resolvent grid as CSV, preceded by a `#` provenance line.
pub fn resolvent_csv(meta: &Meta, rows: &[(f64, f64, bool)]) -> String {
    let mut out = format!("# {}\nx,y,member\n", meta.line());
    for (x, y, m) in rows {
        out.push_str(&format!("{x},{y},{}\n", u8::from(*m)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meta::Tolerances;
    use cliffspec::spectrum::{complexify, jordan_structure, pauli_pair};

    #[test]
    fn matrix_round_trip() {
        let t = pauli_pair();
        let f = MatrixFile::from_tuple(&t);
        let text = serde_json::to_string(&f).unwrap();
        assert!(text.contains("\"A\""));
        let back: MatrixFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_tuple().unwrap().mats(), t.mats());
    }

    #[test]
    fn asymmetric_or_ragged_input_is_rejected() {
        let bad = MatrixFile { n: 1, d: 2, a: vec![vec![vec![0.0, 1.0], vec![0.0, 0.0]]] };
        assert!(bad.to_tuple().is_err());
        let ragged = MatrixFile { n: 1, d: 2, a: vec![vec![vec![0.0, 1.0], vec![1.0]]] };
        assert!(ragged.to_tuple().is_err());
        let count = MatrixFile { n: 2, d: 1, a: vec![vec![vec![0.0]]] };
        assert!(count.to_tuple().is_err());
    }

    #[test]
    fn blocks_from_points_match_structure() {
        let m = complexify(&cliffspec::spectrum::fig1_tuple()).unwrap();
        let s = jordan_structure(&m, &Default::default()).unwrap();
        let meta = Meta::new(0, Tolerances::default());
        let direct = SpectrumFile::from_structure(&s, meta.clone());
        let rebuilt = SpectrumFile::from_spectrum(&direct.spectrum(), 1e-6, meta);
        assert_eq!(direct.blocks.len(), rebuilt.blocks.len());
        for (a, b) in direct.blocks.iter().zip(&rebuilt.blocks) {
            assert_eq!(a.sizes, b.sizes);
        }
        let m = complexify(&pauli_pair()).unwrap();
        let s = jordan_structure(&m, &Default::default()).unwrap();
        let f = SpectrumFile::from_structure(&s, Meta::new(0, Tolerances::default()));
        assert_eq!(f.blocks[0].sizes, vec![2]);
    }

    #[test]
    fn map_and_element_text() {
        let p = parse_phi("poly:0.1,1-0.5i,2i").unwrap();
        assert!((p.eval(Complex64::new(1.0, 0.0)) - Complex64::new(1.1, 1.5)).norm() < 1e-15);
        assert!(parse_phi("poly:").is_err());
        assert!(parse_phi("blaschke:0.9,0.9,0").is_err());
        assert!(parse_phi("sin").is_err());
        let g = parse_moeb("0.3,0.1;0.6+0.8*e12").unwrap();
        assert_eq!(g.u, vec![0.3, 0.1]);
        assert!(parse_moeb("0.3,0.1;0.6+0.6*e12").is_err());
        assert!(parse_moeb("1.0,0.5").is_err());
        assert_eq!(MoebJson::from(&MoebElement::identity(2)).w, "1");
    }
}
