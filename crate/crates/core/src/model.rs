//! Shared domain types: alphabets, label sets, feature vectors, source
//! models and training sets.
//!
//! Feature vectors hold alphabet *indices* (`0..|Y|`), not raw symbol codes.
//! Codes only appear at the I/O boundary, through [`Alphabet::encode`] and
//! [`Alphabet::decode`], and in metrics that need the ordered integer value
//! of a symbol (the Euclidean k-NN metric).

use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for row normalization of conditional probability tables.
pub const ROW_SUM_TOLERANCE: f64 = 1e-12;

/// Ordered finite set of distinct integer symbol codes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<i64>,
    index: HashMap<i64, u32>,
}

impl Alphabet {
    pub fn new(symbols: Vec<i64>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::InvalidModel("alphabet must contain at least one symbol".into()));
        }
        if symbols.len() > u32::MAX as usize {
            return Err(Error::InvalidModel("alphabet too large".into()));
        }
        let mut index = HashMap::with_capacity(symbols.len());
        for (k, &s) in symbols.iter().enumerate() {
            if index.insert(s, k as u32).is_some() {
                return Err(Error::InvalidModel(format!("duplicate alphabet symbol {s}")));
            }
        }
        Ok(Self { symbols, index })
    }

    /// Contiguous alphabet `{lo, lo+1, ..., hi}`.
    pub fn range(lo: i64, hi: i64) -> Result<Self> {
        if hi < lo {
            return Err(Error::InvalidModel(format!("empty symbol range {lo}..={hi}")));
        }
        Self::new((lo..=hi).collect())
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[i64] {
        &self.symbols
    }

    pub fn symbol(&self, index: usize) -> i64 {
        self.symbols[index]
    }

    pub fn index_of(&self, symbol: i64) -> Result<usize> {
        self.index
            .get(&symbol)
            .map(|&k| k as usize)
            .ok_or(Error::InvalidSymbol(symbol))
    }

    pub fn encode(&self, codes: &[i64]) -> Result<FeatureVector> {
        let elements = codes
            .iter()
            .map(|&c| self.index_of(c).map(|k| k as u32))
            .collect::<Result<Vec<_>>>()?;
        FeatureVector::new(elements)
    }

    pub fn decode(&self, v: &FeatureVector) -> Vec<i64> {
        v.elements().iter().map(|&k| self.symbols[k as usize]).collect()
    }
}

/// Ordered set of distinct label names. Labels are referred to by index
/// everywhere else; the prior over labels is uniform.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct LabelSet {
    names: Vec<String>,
}

impl LabelSet {
    pub fn new(names: Vec<String>) -> Result<Self> {
        if names.len() < 2 {
            return Err(Error::TooFewLabels(names.len()));
        }
        for (i, a) in names.iter().enumerate() {
            if names[..i].contains(a) {
                return Err(Error::InvalidModel(format!("duplicate label {a:?}")));
            }
        }
        Ok(Self { names })
    }

    /// Labels named `x1, x2, ..., xm`.
    pub fn numbered(count: usize) -> Result<Self> {
        Self::new((1..=count).map(|i| format!("x{i}")).collect())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, label: usize) -> &str {
        &self.names[label]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownLabelName(name.to_string()))
    }

    pub fn check(&self, label: usize) -> Result<()> {
        if label < self.names.len() {
            Ok(())
        } else {
            Err(Error::InvalidLabel {
                label,
                num_labels: self.names.len(),
            })
        }
    }
}

impl TryFrom<Vec<String>> for LabelSet {
    type Error = Error;
    fn try_from(names: Vec<String>) -> Result<Self> {
        Self::new(names)
    }
}

impl From<LabelSet> for Vec<String> {
    fn from(l: LabelSet) -> Self {
        l.names
    }
}

/// Non-empty sequence of alphabet indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FeatureVector(Vec<u32>);

impl FeatureVector {
    pub fn new(elements: Vec<u32>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::EmptyVector);
        }
        Ok(Self(elements))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn elements(&self) -> &[u32] {
        &self.0
    }

    /// Checks that every element indexes into an alphabet of `size` symbols.
    pub fn check_alphabet(&self, size: usize) -> Result<()> {
        match self.0.iter().find(|&&k| k as usize >= size) {
            Some(&k) => Err(Error::SymbolIndexOutOfRange {
                index: k as usize,
                size,
            }),
            None => Ok(()),
        }
    }
}

/// Label-conditional, position-dependent categorical source:
/// `p(y^n | x) = prod_i p_i(y_i | x)`.
#[derive(Debug, Clone)]
pub struct SourceModel {
    alphabet: Arc<Alphabet>,
    labels: Arc<LabelSet>,
    n: usize,
    // probs[(i * L + x) * Y + y]
    probs: Vec<f64>,
    // running sums of each row, same layout as `probs`
    cdf: Vec<f64>,
    // index of the last strictly positive entry of each row
    last_positive: Vec<u32>,
}

impl SourceModel {
    /// Builds a model from a dense table laid out as `probs[(i * |X| + x) * |Y| + y]`.
    pub fn from_flat(alphabet: Arc<Alphabet>, labels: Arc<LabelSet>, n: usize, probs: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidModel("n must be at least 1".into()));
        }
        let ys = alphabet.len();
        let rows = n * labels.len();
        if probs.len() != rows * ys {
            return Err(Error::InvalidModel(format!(
                "probability table has {} entries, expected {}",
                probs.len(),
                rows * ys
            )));
        }
        let mut cdf = Vec::with_capacity(probs.len());
        let mut last_positive = Vec::with_capacity(rows);
        for (row, chunk) in probs.chunks_exact(ys).enumerate() {
            let (i, x) = (row / labels.len(), row % labels.len());
            let mut acc = 0.0;
            let mut last = None;
            for (y, &p) in chunk.iter().enumerate() {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::InvalidModel(format!(
                        "p_{}(y_{}|{}) = {p} is not a probability",
                        i + 1,
                        y + 1,
                        labels.name(x)
                    )));
                }
                if p > 0.0 {
                    last = Some(y as u32);
                }
                acc += p;
                cdf.push(acc);
            }
            if (acc - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(Error::InvalidModel(format!(
                    "row for position {} and label {} sums to {acc}",
                    i + 1,
                    labels.name(x)
                )));
            }
            last_positive.push(last.expect("row sums to one"));
        }
        Ok(Self {
            alphabet,
            labels,
            n,
            probs,
            cdf,
            last_positive,
        })
    }

    /// Builds a model from nested rows `cond[i][x][y]`.
    pub fn from_nested(alphabet: Arc<Alphabet>, labels: Arc<LabelSet>, cond: &[Vec<Vec<f64>>]) -> Result<Self> {
        let mut flat = Vec::with_capacity(cond.len() * labels.len() * alphabet.len());
        for (i, per_label) in cond.iter().enumerate() {
            if per_label.len() != labels.len() {
                return Err(Error::InvalidModel(format!(
                    "position {} has {} label rows, expected {}",
                    i + 1,
                    per_label.len(),
                    labels.len()
                )));
            }
            for row in per_label {
                if row.len() != alphabet.len() {
                    return Err(Error::InvalidModel(format!(
                        "position {} has a row of length {}, expected {}",
                        i + 1,
                        row.len(),
                        alphabet.len()
                    )));
                }
                flat.extend_from_slice(row);
            }
        }
        Self::from_flat(alphabet, labels, cond.len(), flat)
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn labels(&self) -> &Arc<LabelSet> {
        &self.labels
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_labels(&self) -> usize {
        self.labels.len()
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet.len()
    }

    fn row_start(&self, position: usize, label: usize) -> usize {
        (position * self.labels.len() + label) * self.alphabet.len()
    }

    /// `p_position(. | label)`, with `position` zero-based.
    pub fn row(&self, position: usize, label: usize) -> &[f64] {
        let s = self.row_start(position, label);
        &self.probs[s..s + self.alphabet.len()]
    }

    pub(crate) fn cdf_row(&self, position: usize, label: usize) -> (&[f64], usize) {
        let s = self.row_start(position, label);
        let last = self.last_positive[position * self.labels.len() + label] as usize;
        (&self.cdf[s..s + self.alphabet.len()], last)
    }

    /// Probability of a whole vector under `label`.
    pub fn vector_probability(&self, v: &FeatureVector, label: usize) -> f64 {
        v.elements()
            .iter()
            .enumerate()
            .map(|(i, &y)| self.row(i, label)[y as usize])
            .product()
    }

    pub fn to_doc(&self) -> ModelDoc {
        let cond = (0..self.n)
            .map(|i| (0..self.labels.len()).map(|x| self.row(i, x).to_vec()).collect())
            .collect();
        ModelDoc {
            n: self.n,
            labels: self.labels.names().to_vec(),
            alphabet: self.alphabet.symbols().to_vec(),
            cond,
        }
    }

    pub fn from_doc(doc: &ModelDoc) -> Result<Self> {
        let alphabet = Arc::new(Alphabet::new(doc.alphabet.clone())?);
        let labels = Arc::new(LabelSet::new(doc.labels.clone())?);
        if doc.cond.len() != doc.n {
            return Err(Error::InvalidModel(format!(
                "n = {} but cond has {} positions",
                doc.n,
                doc.cond.len()
            )));
        }
        Self::from_nested(alphabet, labels, &doc.cond)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_doc())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_doc(&serde_json::from_str(s)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

/// JSON form of a [`SourceModel`]: `cond[i][x][y] = p_{i+1}(alphabet[y] | labels[x])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDoc {
    pub n: usize,
    pub labels: Vec<String>,
    pub alphabet: Vec<i64>,
    pub cond: Vec<Vec<Vec<f64>>>,
}

/// `t` labelled feature vectors per label, all of a common length `n`.
#[derive(Debug, Clone)]
pub struct TrainingSet {
    alphabet: Arc<Alphabet>,
    labels: Arc<LabelSet>,
    n: usize,
    t: usize,
    vectors: Vec<Vec<FeatureVector>>,
}

impl TrainingSet {
    /// `vectors[x]` holds the training vectors of label `x`.
    pub fn new(alphabet: Arc<Alphabet>, labels: Arc<LabelSet>, vectors: Vec<Vec<FeatureVector>>) -> Result<Self> {
        if vectors.len() != labels.len() {
            return Err(Error::InvalidTrainingSet(format!(
                "{} label groups for {} labels",
                vectors.len(),
                labels.len()
            )));
        }
        let t = vectors[0].len();
        if t == 0 {
            return Err(Error::InvalidTrainingSet("t must be at least 1".into()));
        }
        let n = vectors[0][0].len();
        for (x, group) in vectors.iter().enumerate() {
            if group.len() != t {
                return Err(Error::InvalidTrainingSet(format!(
                    "label {} has {} vectors, expected {t}",
                    labels.name(x),
                    group.len()
                )));
            }
            for v in group {
                if v.len() != n {
                    return Err(Error::LengthMismatch {
                        expected: n,
                        got: v.len(),
                    });
                }
                v.check_alphabet(alphabet.len())?;
            }
        }
        Ok(Self {
            alphabet,
            labels,
            n,
            t,
            vectors,
        })
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn labels(&self) -> &Arc<LabelSet> {
        &self.labels
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn num_labels(&self) -> usize {
        self.labels.len()
    }

    pub fn vectors(&self, label: usize) -> &[FeatureVector] {
        &self.vectors[label]
    }

    /// Checks that `v` can be classified against this training set.
    pub fn check_compatible(&self, v: &FeatureVector) -> Result<()> {
        if v.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: v.len(),
            });
        }
        v.check_alphabet(self.alphabet.len())
    }
}

/// The length-`nt` vector obtained by concatenating the training vectors of
/// `label` in order.
pub fn concat_training(ts: &TrainingSet, label: usize) -> Result<FeatureVector> {
    ts.labels.check(label)?;
    let elements = ts.vectors[label]
        .iter()
        .flat_map(|v| v.elements().iter().copied())
        .collect();
    FeatureVector::new(elements)
}
