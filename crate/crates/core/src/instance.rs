//! Problem definition: node identities, coordinates, costs and the instance
//! JSON format.
//!
//! Nodes are numbered `1..=2n`: ids `1..=n` are items and `n+1..=2n` are
//! placeholders. With the fixed pair enabled, item `n` is the goal and
//! placeholder `2n` the start, and the edge between them is mandatory.

use std::fmt;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 1-based node identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Which side of the bipartition a node belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Item,
    Placeholder,
}

/// A planar point in meters. Serialized as `[x, y]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Self { x, y }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

/// An immutable JRA instance with Euclidean costs computed on demand.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    n: usize,
    items: Vec<Point>,
    placeholders: Vec<Point>,
    fixed_pair: bool,
    area: f64,
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    n: usize,
    items: Vec<[f64; 2]>,
    placeholders: Vec<[f64; 2]>,
    fixed_pair: bool,
    area: f64,
}

impl Instance {
    /// Builds an instance from explicit coordinates. This is also the entry
    /// point for converting externally supplied datasets.
    pub fn from_coords(
        items: Vec<Point>,
        placeholders: Vec<Point>,
        fixed_pair: bool,
        area: f64,
    ) -> Result<Self> {
        let n = items.len();
        if n < 2 {
            return Err(Error::InvalidInstance(format!(
                "need at least 2 pairs, got {n}"
            )));
        }
        if placeholders.len() != n {
            return Err(Error::schema(
                "placeholders",
                format!("placeholder count {} ≠ n = {n}", placeholders.len()),
            ));
        }
        check_points("items", &items)?;
        check_points("placeholders", &placeholders)?;
        if !(area.is_finite() && area > 0.0) {
            return Err(Error::schema("area", format!("must be positive, got {area}")));
        }
        Ok(Self {
            n,
            items,
            placeholders,
            fixed_pair,
            area,
        })
    }

    /// Uniform i.i.d. points over a square of the given area, deterministic
    /// in `(n, seed, area)`. The fixed pair is enabled.
    pub fn generate(n: usize, seed: u64, area: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInstance(format!(
                "need at least 2 pairs, got {n}"
            )));
        }
        if !(area.is_finite() && area > 0.0) {
            return Err(Error::InvalidInstance(format!("area must be positive, got {area}")));
        }
        let side = area.sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |count: usize| -> Vec<Point> {
            (0..count)
                .map(|_| Point::new(rng.gen::<f64>() * side, rng.gen::<f64>() * side))
                .collect()
        };
        let items = draw(n);
        let placeholders = draw(n);
        Self::from_coords(items, placeholders, true, area)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn node_count(&self) -> usize {
        2 * self.n
    }

    pub fn fixed_pair(&self) -> bool {
        self.fixed_pair
    }

    pub fn with_fixed_pair(mut self, enabled: bool) -> Self {
        self.fixed_pair = enabled;
        self
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn items(&self) -> &[Point] {
        &self.items
    }

    pub fn placeholders(&self) -> &[Point] {
        &self.placeholders
    }

    /// The goal item `n` and the start placeholder `2n`.
    pub fn fixed_edge(&self) -> Option<(NodeId, NodeId)> {
        self.fixed_pair
            .then(|| (self.item_id(self.n - 1), self.placeholder_id(self.n - 1)))
    }

    pub fn contains(&self, v: NodeId) -> bool {
        v.0 >= 1 && v.index() <= 2 * self.n
    }

    pub fn side(&self, v: NodeId) -> Side {
        if v.index() <= self.n {
            Side::Item
        } else {
            Side::Placeholder
        }
    }

    pub fn is_item(&self, v: NodeId) -> bool {
        v.0 >= 1 && v.index() <= self.n
    }

    pub fn is_placeholder(&self, v: NodeId) -> bool {
        v.index() > self.n && v.index() <= 2 * self.n
    }

    /// Id of the item at zero-based position `k`.
    pub fn item_id(&self, k: usize) -> NodeId {
        NodeId(k as u32 + 1)
    }

    /// Id of the placeholder at zero-based position `k`.
    pub fn placeholder_id(&self, k: usize) -> NodeId {
        NodeId((self.n + k) as u32 + 1)
    }

    /// Zero-based position of a node within its own side.
    pub fn local_index(&self, v: NodeId) -> usize {
        if self.is_item(v) {
            v.index() - 1
        } else {
            v.index() - self.n - 1
        }
    }

    pub fn coord(&self, v: NodeId) -> Point {
        if self.is_item(v) {
            self.items[v.index() - 1]
        } else {
            self.placeholders[v.index() - self.n - 1]
        }
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (1..=2 * self.n as u32).map(NodeId)
    }

    /// Euclidean cost of the item–placeholder edge `(i, p)`.
    pub fn cost(&self, i: NodeId, p: NodeId) -> Result<f64> {
        for v in [i, p] {
            if !self.contains(v) {
                return Err(Error::InvalidInstance(format!("node {v} out of range")));
            }
        }
        match (self.side(i), self.side(p)) {
            (Side::Item, Side::Placeholder) => Ok(self.cost_local(i.index() - 1, p.index() - self.n - 1)),
            (Side::Placeholder, Side::Item) => Ok(self.cost_local(p.index() - 1, i.index() - self.n - 1)),
            _ => Err(Error::NonConnectable(i, p)),
        }
    }

    /// Cost between item position `i` and placeholder position `p`.
    #[inline]
    pub fn cost_local(&self, i: usize, p: usize) -> f64 {
        self.items[i].distance(&self.placeholders[p])
    }

    /// Dense `n × n` item-by-placeholder cost table.
    pub fn cost_matrix(&self) -> CostMatrix {
        let n = self.n;
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for p in 0..n {
                data.push(self.cost_local(i, p));
            }
        }
        CostMatrix { n, data }
    }

    pub fn to_json(&self) -> Result<String> {
        let file = InstanceFile {
            n: self.n,
            items: self.items.iter().map(|&p| p.into()).collect(),
            placeholders: self.placeholders.iter().map(|&p| p.into()).collect(),
            fixed_pair: self.fixed_pair,
            area: self.area,
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: serde_json::Value = serde_json::from_str(text)?;
        let file: InstanceFile = serde_json::from_value(raw).map_err(|e| {
            let msg = e.to_string();
            let field = ["n", "items", "placeholders", "fixed_pair", "area"]
                .into_iter()
                .find(|f| msg.contains(&format!("`{f}`")))
                .unwrap_or("<root>");
            Error::schema(field, msg)
        })?;
        if file.items.len() != file.n {
            return Err(Error::schema(
                "items",
                format!("item count {} ≠ n = {}", file.items.len(), file.n),
            ));
        }
        if file.placeholders.len() != file.n {
            return Err(Error::schema(
                "placeholders",
                format!("placeholder count {} ≠ n = {}", file.placeholders.len(), file.n),
            ));
        }
        Self::from_coords(
            file.items.into_iter().map(Point::from).collect(),
            file.placeholders.into_iter().map(Point::from).collect(),
            file.fixed_pair,
            file.area,
        )
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()? + "\n").map_err(|e| Error::io(path, e))
    }
}

fn check_points(field: &str, points: &[Point]) -> Result<()> {
    for (k, p) in points.iter().enumerate() {
        if !(p.x.is_finite() && p.y.is_finite()) {
            return Err(Error::schema(
                format!("{field}[{k}]"),
                "coordinate is not finite",
            ));
        }
    }
    Ok(())
}

/// Dense item × placeholder cost table. `f64::INFINITY` marks a forbidden cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    n: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for p in 0..n {
                data.push(f(i, p));
            }
        }
        Self { n, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Domain("cost matrix must be square".into()));
        }
        Ok(Self {
            n,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, p: usize) -> f64 {
        self.data[i * self.n + p]
    }

    #[inline]
    pub fn set(&mut self, i: usize, p: usize, value: f64) {
        self.data[i * self.n + p] = value;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, p| self.get(p, i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair_instance(item: Point, ph: Point) -> Instance {
        Instance::from_coords(vec![item, Point::new(9.0, 9.0)], vec![ph, Point::new(8.0, 8.0)], false, 1.0)
            .unwrap()
    }

    #[test]
    fn cost_examples() {
        let inst = pair_instance(Point::new(0.0, 0.0), Point::new(3.0, 4.0));
        assert_eq!(inst.cost(NodeId(1), NodeId(3)).unwrap(), 5.0);
        assert_eq!(inst.cost(NodeId(3), NodeId(1)).unwrap(), 5.0);

        let inst = pair_instance(Point::new(0.25, 0.5), Point::new(0.25, 0.5));
        assert_eq!(inst.cost(NodeId(1), NodeId(3)).unwrap(), 0.0);

        let inst = pair_instance(Point::new(0.0, 0.0), Point::new(1.0, 1.0));
        assert!((inst.cost(NodeId(1), NodeId(3)).unwrap() - std::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn same_side_is_not_connectable() {
        let inst = Instance::generate(3, 0, 1.0).unwrap();
        assert!(matches!(inst.cost(NodeId(1), NodeId(2)), Err(Error::NonConnectable(..))));
        assert!(matches!(inst.cost(NodeId(4), NodeId(6)), Err(Error::NonConnectable(..))));
    }

    #[test]
    fn generate_bounds_and_determinism() {
        let inst = Instance::generate(2, 7, 1.0).unwrap();
        assert_eq!(inst.node_count(), 4);
        assert!(inst.fixed_pair());
        for p in inst.items().iter().chain(inst.placeholders()) {
            assert!((0.0..=1.0).contains(&p.x) && (0.0..=1.0).contains(&p.y));
        }
        let a = Instance::generate(5, 1, 1.0).unwrap();
        let b = Instance::generate(5, 1, 1.0).unwrap();
        assert_eq!(a.cost_matrix(), b.cost_matrix());
        assert_ne!(a, Instance::generate(5, 2, 1.0).unwrap());

        let big = Instance::generate(4, 3, 4.0).unwrap();
        assert!(big.items().iter().all(|p| p.x <= 2.0 && p.y <= 2.0));
    }

    #[test]
    fn generate_rejects_small_n() {
        assert!(matches!(Instance::generate(1, 0, 1.0), Err(Error::InvalidInstance(_))));
    }

    #[test]
    fn json_errors_name_the_field() {
        let text = r#"{"n": 3, "items": [[0,0],[1,1],[2,2]], "placeholders": [[0,1],[1,0]], "fixed_pair": true, "area": 1.0}"#;
        match Instance::from_json(text) {
            Err(Error::Schema { field, message }) => {
                assert_eq!(field, "placeholders");
                assert!(message.contains("placeholder count"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }

        // serde_json does not accept NaN literals, so a non-finite value can only
        // arrive through overflow.
        let text = r#"{"n": 2, "items": [[0,0],[1e999,1]], "placeholders": [[0,1],[1,0]], "fixed_pair": true, "area": 1.0}"#;
        assert!(Instance::from_json(text).is_err());
        let nan = Instance::from_coords(
            vec![Point::new(0.0, 0.0), Point::new(f64::NAN, 1.0)],
            vec![Point::new(0.0, 1.0), Point::new(1.0, 0.0)],
            true,
            1.0,
        );
        assert!(matches!(nan, Err(Error::Schema { ref field, .. }) if field == "items[1]"));

        assert!(matches!(Instance::from_json("{not json"), Err(Error::Json(_))));
        let missing = r#"{"n": 2, "items": [[0,0],[1,1]], "fixed_pair": true, "area": 1.0}"#;
        assert!(matches!(Instance::from_json(missing), Err(Error::Schema { ref field, .. }) if field == "placeholders"));
    }

    #[test]
    fn cost_matches_raw_coordinates() {
        let inst = Instance::generate(20, 11, 1.0).unwrap();
        let m = inst.cost_matrix();
        for i in 0..20 {
            for p in 0..20 {
                let a = inst.items()[i];
                let b = inst.placeholders()[p];
                let raw = ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt();
                assert!((m.get(i, p) - raw).abs() < 1e-12);
                assert_eq!(m.get(i, p), inst.cost(inst.item_id(i), inst.placeholder_id(p)).unwrap());
            }
        }
    }
}
