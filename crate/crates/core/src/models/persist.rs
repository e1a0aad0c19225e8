//! Binary model files.
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! "NATE1"                magic and format version
//! u8                     kind: 1 logistic, 2 tree, 3 forest, 4 mlp
//! u32 len, bytes         schema version (UTF-8)
//! u32 len, bytes         feature set (UTF-8)
//! parameters             per kind, see below
//! ```
//!
//! A scaler is `width` means then `width` scales. Logistic: u32 width,
//! scaler, f64 l2, weights, bias. Tree: u32 width, u32 node count, then per
//! node either `0 u64 n_true u64 n_total` or `1 u32 feature f64 threshold
//! u32 left u32 right`. Forest: u32 width, u32 tree count, then per tree a
//! u64 seed and a tree body. MLP: u32 width, u32 hidden, scaler, f64 l2,
//! hidden weights row by row, hidden biases, output weights, output bias.

use super::forest::RandomForest;
use super::logistic::LogisticModel;
use super::mlp::MlpModel;
use super::scaler::Scaler;
use super::tree::{DecisionTree, TreeNode};
use super::{Model, ModelError};

pub const MAGIC: &[u8; 5] = b"NATE1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelHeader {
    pub schema: String,
    pub features: String,
}

struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, x: u8) {
        self.0.push(x);
    }
    fn u32(&mut self, x: usize) {
        self.0.extend((x as u32).to_le_bytes());
    }
    fn u64(&mut self, x: u64) {
        self.0.extend(x.to_le_bytes());
    }
    fn f64(&mut self, x: f64) {
        self.0.extend(x.to_le_bytes());
    }
    fn f64s(&mut self, xs: &[f64]) {
        xs.iter().for_each(|&x| self.f64(x));
    }
    fn str(&mut self, s: &str) {
        self.u32(s.len());
        self.0.extend(s.as_bytes());
    }
    fn scaler(&mut self, s: &Scaler) {
        self.f64s(&s.mean);
        self.f64s(&s.scale);
    }
    fn tree(&mut self, t: &DecisionTree) {
        self.u32(t.nodes.len());
        for n in &t.nodes {
            match n {
                TreeNode::Leaf { n_true, n_total } => {
                    self.u8(0);
                    self.u64(*n_true);
                    self.u64(*n_total);
                }
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    self.u8(1);
                    self.u32(*feature);
                    self.f64(*threshold);
                    self.u32(*left);
                    self.u32(*right);
                }
            }
        }
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    at: usize,
}

fn corrupt(msg: impl Into<String>) -> ModelError {
    ModelError::CorruptModel(msg.into())
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8], ModelError> {
        let end = self
            .at
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| corrupt(format!("truncated at byte {}", self.at)))?;
        let out = &self.bytes[self.at..end];
        self.at = end;
        Ok(out)
    }
    fn u8(&mut self) -> Result<u8, ModelError> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<usize, ModelError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()) as usize)
    }
    fn u64(&mut self) -> Result<u64, ModelError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64, ModelError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64s(&mut self, n: usize) -> Result<Vec<f64>, ModelError> {
        // Refuse absurd counts before allocating.
        if n.saturating_mul(8) > self.bytes.len() - self.at {
            return Err(corrupt(format!("truncated at byte {}", self.at)));
        }
        (0..n).map(|_| self.f64()).collect()
    }
    fn str(&mut self) -> Result<String, ModelError> {
        let n = self.u32()?;
        String::from_utf8(self.take(n)?.to_vec()).map_err(|_| corrupt("header is not UTF-8"))
    }
    fn scaler(&mut self, width: usize) -> Result<Scaler, ModelError> {
        Ok(Scaler {
            mean: self.f64s(width)?,
            scale: self.f64s(width)?,
        })
    }
    fn tree(&mut self, width: usize) -> Result<DecisionTree, ModelError> {
        let n = self.u32()?;
        if n == 0 || n > self.bytes.len() {
            return Err(corrupt("bad tree size"));
        }
        let mut nodes = Vec::with_capacity(n);
        for _ in 0..n {
            nodes.push(match self.u8()? {
                0 => {
                    let n_true = self.u64()?;
                    let n_total = self.u64()?;
                    if n_total == 0 || n_true > n_total {
                        return Err(corrupt("bad leaf counts"));
                    }
                    TreeNode::Leaf { n_true, n_total }
                }
                1 => {
                    let feature = self.u32()?;
                    let threshold = self.f64()?;
                    let left = self.u32()?;
                    let right = self.u32()?;
                    if feature >= width || left >= n || right >= n {
                        return Err(corrupt("split refers outside the tree"));
                    }
                    TreeNode::Split {
                        feature,
                        threshold,
                        left,
                        right,
                    }
                }
                t => return Err(corrupt(format!("bad tree node tag {t}"))),
            });
        }
        // Children must come after their parent, which rules out cycles.
        for (i, node) in nodes.iter().enumerate() {
            if let TreeNode::Split { left, right, .. } = node {
                if *left <= i || *right <= i {
                    return Err(corrupt("tree is not topologically ordered"));
                }
            }
        }
        Ok(DecisionTree { width, nodes })
    }
}

pub fn save(model: &Model, header: &ModelHeader) -> Vec<u8> {
    let mut w = Writer(MAGIC.to_vec());
    let kind = match model {
        Model::Logistic(_) => 1,
        Model::Tree(_) => 2,
        Model::Forest(_) => 3,
        Model::Mlp(_) => 4,
    };
    w.u8(kind);
    w.str(&header.schema);
    w.str(&header.features);
    match model {
        Model::Logistic(m) => {
            w.u32(m.weights.len());
            w.scaler(&m.scaler);
            w.f64(m.l2);
            w.f64s(&m.weights);
            w.f64(m.bias);
        }
        Model::Tree(t) => {
            w.u32(t.width);
            w.tree(t);
        }
        Model::Forest(f) => {
            w.u32(f.width);
            w.u32(f.trees.len());
            for (t, s) in f.trees.iter().zip(&f.seeds) {
                w.u64(*s);
                w.tree(t);
            }
        }
        Model::Mlp(m) => {
            w.u32(m.input_width());
            w.u32(m.hidden_units());
            w.scaler(&m.scaler);
            w.f64(m.l2);
            w.f64s(&m.params());
        }
    }
    w.0
}

pub fn load(bytes: &[u8]) -> Result<(Model, ModelHeader), ModelError> {
    if bytes.len() < MAGIC.len() || &bytes[..4] != b"NATE" {
        return Err(corrupt("missing NATE header"));
    }
    if bytes[4] != MAGIC[4] {
        return Err(ModelError::VersionMismatch(
            String::from_utf8_lossy(&bytes[..5]).into_owned(),
        ));
    }
    let mut r = Reader {
        bytes,
        at: MAGIC.len(),
    };
    let kind = r.u8()?;
    let header = ModelHeader {
        schema: r.str()?,
        features: r.str()?,
    };
    let model = match kind {
        1 => {
            let width = r.u32()?;
            let scaler = r.scaler(width)?;
            let l2 = r.f64()?;
            let weights = r.f64s(width)?;
            let bias = r.f64()?;
            Model::Logistic(LogisticModel {
                weights,
                bias,
                scaler,
                l2,
            })
        }
        2 => {
            let width = r.u32()?;
            Model::Tree(r.tree(width)?)
        }
        3 => {
            let width = r.u32()?;
            let n = r.u32()?;
            if n == 0 || n > bytes.len() {
                return Err(corrupt("bad forest size"));
            }
            let mut trees = Vec::with_capacity(n);
            let mut seeds = Vec::with_capacity(n);
            for _ in 0..n {
                seeds.push(r.u64()?);
                trees.push(r.tree(width)?);
            }
            Model::Forest(RandomForest {
                width,
                trees,
                seeds,
            })
        }
        4 => {
            let width = r.u32()?;
            let hidden = r.u32()?;
            if hidden == 0 {
                return Err(corrupt("empty hidden layer"));
            }
            let scaler = r.scaler(width)?;
            let l2 = r.f64()?;
            let mut m = MlpModel::zeros(width, hidden, l2);
            m.scaler = scaler;
            let n = hidden
                .checked_mul(width)
                .and_then(|x| x.checked_add(2 * hidden + 1))
                .ok_or_else(|| corrupt("bad layer sizes"))?;
            m.set_params(&r.f64s(n)?);
            Model::Mlp(m)
        }
        k => return Err(corrupt(format!("unknown model kind {k}"))),
    };
    if r.at != bytes.len() {
        return Err(corrupt("trailing bytes"));
    }
    Ok((model, header))
}
