//! On-disk JSON formats: algebra tables, posets, meet-semilattices,
//! quotient maps, and audit reports with replayable witnesses.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use infsemi_core::algebra::{Algebra, CompletenessClass, FinAlgebra, Sort};
use infsemi_core::audit::{
    AxiomId, CheckReport, GroupedWord, Relation, Verdict, Witness, WordExpr,
};
use infsemi_core::limits::{FiniteMeetSemilattice, LimitReport, LimitWitness, PeriodicSeq};
use infsemi_core::word::{parse_scattered, render};

/// Splits a `"a,b"` table key at the top-level comma; commas inside
/// brackets belong to composite element ids.
pub fn split_pair_key(key: &str) -> Result<(String, String), String> {
    let mut depth = 0i32;
    for (i, c) in key.char_indices() {
        match c {
            '(' | '{' | '[' | '<' => depth += 1,
            ')' | '}' | ']' | '>' => depth -= 1,
            ',' if depth == 0 => {
                let (a, b) = key.split_at(i);
                return Ok((a.to_string(), b[1..].to_string()));
            }
            _ => {}
        }
    }
    Err(format!("table key '{}' is not a pair", key))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SortsFile {
    pub plus: Vec<String>,
    pub omega: Vec<String>,
}

/// The algebra file schema. Unknown keys are rejected.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    pub carrier: Vec<String>,
    #[serde(default)]
    pub bin: BTreeMap<String, String>,
    #[serde(default)]
    pub omega: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_star: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sorts: Option<SortsFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub empty: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
}

impl AlgebraFile {
    pub fn to_algebra(&self) -> Result<FinAlgebra, String> {
        let n = self.carrier.len();
        let idx = |id: &str| -> Result<usize, String> {
            self.carrier
                .iter()
                .position(|x| x == id)
                .ok_or_else(|| format!("element '{}' not in the carrier", id))
        };
        let mut bin = vec![None; n * n];
        for (k, v) in &self.bin {
            let (a, b) = split_pair_key(k)?;
            bin[idx(&a)? * n + idx(&b)?] = Some(idx(v)?);
        }
        let mut omega = vec![None; n];
        for (k, v) in &self.omega {
            omega[idx(k)?] = Some(idx(v)?);
        }
        let omega_star = match &self.omega_star {
            None => None,
            Some(m) => {
                let mut t = vec![None; n];
                for (k, v) in m {
                    t[idx(k)?] = Some(idx(v)?);
                }
                Some(t)
            }
        };
        let sorts = match &self.sorts {
            None => None,
            Some(s) => {
                let mut t = vec![None; n];
                for p in &s.plus {
                    t[idx(p)?] = Some(Sort::Plus);
                }
                for o in &s.omega {
                    t[idx(o)?] = Some(Sort::Omega);
                }
                if t.iter().any(|x| x.is_none()) {
                    return Err("sorts must partition the carrier".to_string());
                }
                Some(t.into_iter().map(|x| x.unwrap()).collect())
            }
        };
        let empty = match &self.empty {
            None => None,
            Some(e) => Some(idx(e)?),
        };
        let class = match &self.class {
            None => CompletenessClass::LtOmega,
            Some(c) => CompletenessClass::parse(c)
                .ok_or_else(|| format!("unknown completeness class '{}'", c))?,
        };
        FinAlgebra::new(self.carrier.clone(), bin, omega, omega_star, sorts, empty, class)
            .map_err(|e| e.to_string())
    }

    pub fn from_algebra(alg: &FinAlgebra) -> AlgebraFile {
        let n = alg.size();
        let mut bin = BTreeMap::new();
        for a in 0..n {
            for b in 0..n {
                if let Some(v) = alg.bin_idx(a, b) {
                    bin.insert(format!("{},{}", alg.id(a), alg.id(b)), alg.id(v).to_string());
                }
            }
        }
        let mut omega = BTreeMap::new();
        for a in 0..n {
            if let Some(v) = alg.omega_idx(a) {
                omega.insert(alg.id(a).to_string(), alg.id(v).to_string());
            }
        }
        let omega_star = if alg.has_omega_star() {
            let mut t = BTreeMap::new();
            for a in 0..n {
                if let Some(v) = alg.omega_star_idx(a).unwrap() {
                    t.insert(alg.id(a).to_string(), alg.id(v).to_string());
                }
            }
            Some(t)
        } else {
            None
        };
        let sorts = alg.sort_partition().map(|(plus, omega)| SortsFile { plus, omega });
        AlgebraFile {
            carrier: alg.ids().to_vec(),
            bin,
            omega,
            omega_star,
            sorts,
            empty: alg.empty_product_idx().map(|e| alg.id(e).to_string()),
            class: Some(alg.class().as_str().to_string()),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosetFile {
    pub elements: Vec<String>,
    #[serde(default)]
    pub leq: Vec<(String, String)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeFile {
    pub elements: Vec<String>,
    pub meet: BTreeMap<String, String>,
}

impl LatticeFile {
    pub fn to_lattice(&self) -> Result<FiniteMeetSemilattice, String> {
        let mut entries = Vec::new();
        for (k, v) in &self.meet {
            let (a, b) = split_pair_key(k)?;
            entries.push(((a, b), v.clone()));
        }
        FiniteMeetSemilattice::new(self.elements.clone(), &entries).map_err(|e| e.to_string())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    pub map: BTreeMap<String, String>,
    #[serde(default)]
    pub extra: Vec<String>,
}

// ---------------------------------------------------------------------------
// Reports

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ExprFile {
    Plain {
        word: String,
    },
    Grouped {
        outer: String,
        inners: Vec<String>,
    },
    Value {
        value: String,
    },
}

impl ExprFile {
    pub fn from_expr(e: &WordExpr) -> ExprFile {
        match e {
            WordExpr::Plain(t) => ExprFile::Plain { word: render(t) },
            WordExpr::Grouped(g) => ExprFile::Grouped {
                outer: render(&g.outer),
                inners: g.inners.iter().map(render).collect(),
            },
            WordExpr::Value(v) => ExprFile::Value { value: v.clone() },
        }
    }

    pub fn to_expr(&self) -> Result<WordExpr, String> {
        Ok(match self {
            ExprFile::Plain { word } => {
                WordExpr::Plain(parse_scattered(word).map_err(|e| e.to_string())?)
            }
            ExprFile::Grouped { outer, inners } => WordExpr::Grouped(GroupedWord {
                outer: parse_scattered(outer).map_err(|e| e.to_string())?,
                inners: inners
                    .iter()
                    .map(|i| parse_scattered(i).map_err(|e| e.to_string()))
                    .collect::<Result<Vec<_>, _>>()?,
            }),
            ExprFile::Value { value } => WordExpr::Value(value.clone()),
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum WitnessFile {
    Word {
        lhs: ExprFile,
        rhs: ExprFile,
        lhs_out: Option<String>,
        rhs_out: Option<String>,
        relation: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        note: Option<String>,
    },
    Limit {
        prefix: Vec<String>,
        period: Vec<String>,
        block: usize,
        direct: String,
        grouped: String,
    },
}

impl WitnessFile {
    pub fn from_witness(w: &Witness) -> WitnessFile {
        WitnessFile::Word {
            lhs: ExprFile::from_expr(&w.lhs),
            rhs: ExprFile::from_expr(&w.rhs),
            lhs_out: w.lhs_out.clone(),
            rhs_out: w.rhs_out.clone(),
            relation: w.relation.as_str().to_string(),
            note: w.note.clone(),
        }
    }

    pub fn from_limit_witness(w: &LimitWitness) -> WitnessFile {
        WitnessFile::Limit {
            prefix: w.seq.prefix.clone(),
            period: w.seq.period.clone(),
            block: w.block,
            direct: w.direct.clone(),
            grouped: w.grouped.clone(),
        }
    }

    pub fn to_witness(&self) -> Result<Witness, String> {
        match self {
            WitnessFile::Word {
                lhs,
                rhs,
                lhs_out,
                rhs_out,
                relation,
                note,
            } => Ok(Witness {
                lhs: lhs.to_expr()?,
                rhs: rhs.to_expr()?,
                lhs_out: lhs_out.clone(),
                rhs_out: rhs_out.clone(),
                relation: Relation::parse(relation)
                    .ok_or_else(|| format!("unknown relation '{}'", relation))?,
                note: note.clone(),
            }),
            WitnessFile::Limit { .. } => Err("not a word witness".to_string()),
        }
    }

    pub fn to_limit_witness(&self) -> Result<LimitWitness, String> {
        match self {
            WitnessFile::Limit {
                prefix,
                period,
                block,
                direct,
                grouped,
            } => Ok(LimitWitness {
                seq: PeriodicSeq {
                    prefix: prefix.clone(),
                    period: period.clone(),
                },
                block: *block,
                direct: direct.clone(),
                grouped: grouped.clone(),
            }),
            WitnessFile::Word { .. } => Err("not a limit witness".to_string()),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportEntry {
    pub axiom: String,
    pub verdict: String,
    pub tested: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ReportEntry {
    pub fn from_report(r: &CheckReport) -> ReportEntry {
        ReportEntry {
            axiom: r.axiom.to_string(),
            verdict: r.verdict.to_string(),
            tested: r.tested,
            witness: r.witness.as_ref().map(WitnessFile::from_witness),
            note: r.note.clone(),
        }
    }

    pub fn from_limit_report(r: &LimitReport) -> ReportEntry {
        ReportEntry {
            axiom: r.axiom.to_string(),
            verdict: r.verdict.to_string(),
            tested: r.tested,
            witness: r.witness.as_ref().map(WitnessFile::from_limit_witness),
            note: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceRef {
    pub path: String,
    pub sha256: String,
}

/// A full audit report: the command and parameters that produced it, the
/// audited structure inline, a fingerprint of the source file, and one
/// entry per axiom.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportFile {
    pub version: u32,
    pub command: String,
    pub seed: u64,
    pub budget: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<AlgebraFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<SourceRef>,
    pub reports: Vec<ReportEntry>,
}

pub fn axiom_from_str(s: &str) -> Result<AxiomId, String> {
    AxiomId::parse(s).ok_or_else(|| format!("unknown axiom '{}'", s))
}

pub fn verdict_from_str(s: &str) -> Result<Verdict, String> {
    match s {
        "Pass" => Ok(Verdict::Pass),
        "Fail" => Ok(Verdict::Fail),
        "Exhausted" => Ok(Verdict::Exhausted),
        _ => Err(format!("unknown verdict '{}'", s)),
    }
}

pub fn sha256_hex(data: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    hasher.update(data);
    hex::encode(hasher.finalize())
}
