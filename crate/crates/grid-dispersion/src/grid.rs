//! Oriented grid topology and the canonical port labeling.
//!
//! An oriented grid assigns port numbers so that a single global convention
//! holds at every node: among the compass directions present at a node, taken
//! in the fixed order **W, S, E, N**, the incident edges receive labels
//! `1..=degree`. An internal node therefore always sees `1=W, 2=S, 3=E, 4=N`,
//! which is what gives robots their implicit sense of direction.
//!
//! Coordinates here are simulator-internal: row 0 is the north edge, column 0
//! the west edge. Robot compute functions never see them; they navigate purely
//! by degrees and port labels.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Compass directions in the canonical label order (W, S, E, N).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Compass {
    W,
    S,
    E,
    N,
}

/// All directions in label order.
pub const COMPASS_ORDER: [Compass; 4] = [Compass::W, Compass::S, Compass::E, Compass::N];

impl Compass {
    /// The opposite direction (W↔E, S↔N).
    pub fn opposite(self) -> Compass {
        match self {
            Compass::W => Compass::E,
            Compass::S => Compass::N,
            Compass::E => Compass::W,
            Compass::N => Compass::S,
        }
    }

    fn delta(self) -> (i32, i32) {
        match self {
            Compass::W => (0, -1),
            Compass::S => (1, 0),
            Compass::E => (0, 1),
            Compass::N => (-1, 0),
        }
    }
}

/// The four corners of a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CornerTag {
    NW,
    NE,
    SW,
    SE,
}

impl CornerTag {
    pub const ALL: [CornerTag; 4] = [CornerTag::NW, CornerTag::NE, CornerTag::SW, CornerTag::SE];
}

/// Classification of a node by degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeClass {
    Corner(CornerTag),
    Boundary(Compass),
    Internal,
}

/// A port label in `[1, degree]`. The two endpoints of an edge label it
/// independently.
pub type PortLabel = u8;

/// Node coordinates. Row 0 is north, column 0 is west.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId {
    pub row: u16,
    pub col: u16,
}

impl NodeId {
    pub fn new(row: u16, col: u16) -> Self {
        NodeId { row, col }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GridError {
    #[error("node ({0}, {1}) out of bounds")]
    Bounds(u16, u16),
    #[error("node ({row}, {col}) has no port {port}")]
    NoSuchPort { row: u16, col: u16, port: PortLabel },
    #[error("nodes ({0:?}, {1:?}) are not adjacent")]
    NotAdjacent(NodeId, NodeId),
    #[error("straight-through exit undefined at degree {0}")]
    NotInternal(u8),
    #[error("grid dimensions must both be at least 2 (got {0}x{1})")]
    BadDimensions(u16, u16),
}

/// Dimensions of an oriented rectangular grid. `height` is the north–south
/// extent in rows, `width` the east–west extent in columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub height: u16,
    pub width: u16,
}

impl GridSpec {
    /// Every grid must have four distinct corners.
    pub fn new(height: u16, width: u16) -> Result<Self, GridError> {
        if height < 2 || width < 2 {
            return Err(GridError::BadDimensions(height, width));
        }
        Ok(GridSpec { height, width })
    }

    /// Node count `n = height * width`.
    pub fn node_count(&self) -> u32 {
        u32::from(self.height) * u32::from(self.width)
    }

    /// The longer side, `l` in rectangular notation.
    pub fn long_side(&self) -> u16 {
        self.height.max(self.width)
    }

    pub fn contains(&self, node: NodeId) -> bool {
        node.row < self.height && node.col < self.width
    }

    fn check_bounds(&self, node: NodeId) -> Result<(), GridError> {
        if self.contains(node) {
            Ok(())
        } else {
            Err(GridError::Bounds(node.row, node.col))
        }
    }

    /// Which compass directions have a neighbor at `node`, in label order.
    pub fn present_directions(&self, node: NodeId) -> [bool; 4] {
        [
            node.col > 0,                // W
            node.row + 1 < self.height,  // S
            node.col + 1 < self.width,   // E
            node.row > 0,                // N
        ]
    }

    /// Degree: 2 at corners, 3 on boundaries, 4 inside.
    pub fn degree_of(&self, node: NodeId) -> Result<u8, GridError> {
        self.check_bounds(node)?;
        Ok(self
            .present_directions(node)
            .iter()
            .map(|&p| u8::from(p))
            .sum())
    }

    /// The compass direction behind a port label at `node`, if the label is
    /// valid there.
    pub fn port_direction(&self, node: NodeId, port: PortLabel) -> Result<Compass, GridError> {
        self.check_bounds(node)?;
        let present = self.present_directions(node);
        let mut label = 0u8;
        for (i, dir) in COMPASS_ORDER.iter().enumerate() {
            if present[i] {
                label += 1;
                if label == port {
                    return Ok(*dir);
                }
            }
        }
        Err(GridError::NoSuchPort {
            row: node.row,
            col: node.col,
            port,
        })
    }

    /// The port label assigned to `dir` at `node`, if that direction exists.
    pub fn direction_port(&self, node: NodeId, dir: Compass) -> Result<PortLabel, GridError> {
        self.check_bounds(node)?;
        let present = self.present_directions(node);
        let mut label = 0u8;
        for (i, d) in COMPASS_ORDER.iter().enumerate() {
            if present[i] {
                label += 1;
                if *d == dir {
                    return Ok(label);
                }
            }
        }
        Err(GridError::NoSuchPort {
            row: node.row,
            col: node.col,
            port: 0,
        })
    }

    /// The node reached by leaving `node` through `port`.
    pub fn neighbor(&self, node: NodeId, port: PortLabel) -> Result<NodeId, GridError> {
        let dir = self.port_direction(node, port)?;
        let (dr, dc) = dir.delta();
        Ok(NodeId::new(
            (i32::from(node.row) + dr) as u16,
            (i32::from(node.col) + dc) as u16,
        ))
    }

    /// The label, at `to`, of the edge joining `from` and `to`. This is the
    /// entry port a robot observes after traversing that edge.
    pub fn entry_port(&self, from: NodeId, to: NodeId) -> Result<PortLabel, GridError> {
        self.check_bounds(from)?;
        self.check_bounds(to)?;
        let dr = i32::from(to.row) - i32::from(from.row);
        let dc = i32::from(to.col) - i32::from(from.col);
        let dir_to_from = match (dr, dc) {
            (0, 1) => Compass::W,  // moved east; the edge lies west of `to`
            (0, -1) => Compass::E,
            (1, 0) => Compass::N,
            (-1, 0) => Compass::S,
            _ => return Err(GridError::NotAdjacent(from, to)),
        };
        self.direction_port(to, dir_to_from)
    }

    /// Corner / boundary / internal classification (verifier-side oracle;
    /// robots never call this).
    pub fn classify_node(&self, node: NodeId) -> Result<NodeClass, GridError> {
        self.check_bounds(node)?;
        let north = node.row == 0;
        let south = node.row == self.height - 1;
        let west = node.col == 0;
        let east = node.col == self.width - 1;
        Ok(match (north, south, west, east) {
            (true, _, true, _) => NodeClass::Corner(CornerTag::NW),
            (true, _, _, true) => NodeClass::Corner(CornerTag::NE),
            (_, true, true, _) => NodeClass::Corner(CornerTag::SW),
            (_, true, _, true) => NodeClass::Corner(CornerTag::SE),
            (true, ..) => NodeClass::Boundary(Compass::N),
            (_, true, ..) => NodeClass::Boundary(Compass::S),
            (_, _, true, _) => NodeClass::Boundary(Compass::W),
            (_, _, _, true) => NodeClass::Boundary(Compass::E),
            _ => NodeClass::Internal,
        })
    }

    /// Coordinates of a corner.
    pub fn corner_node(&self, tag: CornerTag) -> NodeId {
        match tag {
            CornerTag::NW => NodeId::new(0, 0),
            CornerTag::NE => NodeId::new(0, self.width - 1),
            CornerTag::SW => NodeId::new(self.height - 1, 0),
            CornerTag::SE => NodeId::new(self.height - 1, self.width - 1),
        }
    }

    /// Iterate all nodes in row-major order.
    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        let (h, w) = (self.height, self.width);
        (0..h).flat_map(move |r| (0..w).map(move |c| NodeId::new(r, c)))
    }
}

/// The straight-through exit rule: entering an internal node via `entry`,
/// leave one port after the incoming port and select the next, i.e.
/// `((entry + 1) mod 4) + 1`. Under the canonical convention this is the
/// compass-opposite port, so iterating it walks a straight line.
///
/// Only defined at degree 4; the protocol never applies it elsewhere.
pub fn straight_exit(degree: u8, entry: PortLabel) -> Result<PortLabel, GridError> {
    if degree != 4 {
        return Err(GridError::NotInternal(degree));
    }
    debug_assert!((1..=4).contains(&entry), "port label out of range");
    Ok(((entry + 1) % 4) + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(h: u16, w: u16) -> GridSpec {
        GridSpec::new(h, w).unwrap()
    }

    #[test]
    fn degree_examples() {
        let s = g(4, 4);
        assert_eq!(s.degree_of(NodeId::new(0, 0)).unwrap(), 2);
        assert_eq!(s.degree_of(NodeId::new(0, 2)).unwrap(), 3);
        assert_eq!(s.degree_of(NodeId::new(1, 1)).unwrap(), 4);
        assert!(matches!(
            s.degree_of(NodeId::new(4, 0)),
            Err(GridError::Bounds(4, 0))
        ));
    }

    #[test]
    fn neighbor_examples() {
        let s = g(4, 4);
        // 3 = E at internal nodes.
        assert_eq!(
            s.neighbor(NodeId::new(1, 1), 3).unwrap(),
            NodeId::new(1, 2)
        );
        // NW corner has only S, E -> labels (1=S, 2=E).
        assert_eq!(
            s.neighbor(NodeId::new(0, 0), 1).unwrap(),
            NodeId::new(1, 0)
        );
        assert!(matches!(
            s.neighbor(NodeId::new(0, 0), 3),
            Err(GridError::NoSuchPort { port: 3, .. })
        ));
    }

    #[test]
    fn entry_port_examples() {
        let s = g(4, 4);
        // Arriving from the west -> W port of the destination.
        assert_eq!(
            s.entry_port(NodeId::new(1, 1), NodeId::new(1, 2)).unwrap(),
            1
        );
        // NW corner's S port has label 1.
        assert_eq!(
            s.entry_port(NodeId::new(1, 0), NodeId::new(0, 0)).unwrap(),
            1
        );
        assert!(matches!(
            s.entry_port(NodeId::new(0, 0), NodeId::new(2, 2)),
            Err(GridError::NotAdjacent(..))
        ));
    }

    #[test]
    fn straight_exit_rule() {
        // Entering from port 1, the straight path leads from port 3.
        assert_eq!(straight_exit(4, 1).unwrap(), 3);
        assert_eq!(straight_exit(4, 2).unwrap(), 4);
        assert_eq!(straight_exit(4, 3).unwrap(), 1);
        assert_eq!(straight_exit(4, 4).unwrap(), 2);
        assert!(matches!(straight_exit(3, 1), Err(GridError::NotInternal(3))));
    }

    #[test]
    fn classify_examples() {
        let s = g(4, 4);
        assert_eq!(
            s.classify_node(NodeId::new(3, 0)).unwrap(),
            NodeClass::Corner(CornerTag::SW)
        );
        assert_eq!(
            s.classify_node(NodeId::new(2, 3)).unwrap(),
            NodeClass::Boundary(Compass::E)
        );
        let s5 = g(5, 5);
        assert_eq!(
            s5.classify_node(NodeId::new(2, 2)).unwrap(),
            NodeClass::Internal
        );
    }

    #[test]
    fn figure_convention_at_internal_node() {
        // An internal node reproduces 1=W, 2=S, 3=E, 4=N.
        let s = g(4, 4);
        let u = NodeId::new(1, 1);
        assert_eq!(s.port_direction(u, 1).unwrap(), Compass::W);
        assert_eq!(s.port_direction(u, 2).unwrap(), Compass::S);
        assert_eq!(s.port_direction(u, 3).unwrap(), Compass::E);
        assert_eq!(s.port_direction(u, 4).unwrap(), Compass::N);
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(GridSpec::new(1, 4).is_err());
        assert!(GridSpec::new(4, 1).is_err());
        assert!(GridSpec::new(2, 2).is_ok());
    }

    #[test]
    fn degree_census_small() {
        for (h, w) in [(2u16, 2u16), (2, 5), (3, 3), (4, 6), (7, 2)] {
            let s = g(h, w);
            let mut by_degree = [0u32; 5];
            for node in s.nodes() {
                by_degree[s.degree_of(node).unwrap() as usize] += 1;
            }
            assert_eq!(by_degree[2], 4, "{h}x{w}");
            assert_eq!(
                by_degree[3],
                2 * (u32::from(h) - 2) + 2 * (u32::from(w) - 2),
                "{h}x{w}"
            );
            assert_eq!(
                by_degree[4],
                s.node_count() - by_degree[2] - by_degree[3],
                "{h}x{w}"
            );
        }
    }

    proptest! {
        #[test]
        fn ports_are_a_bijection(h in 2u16..20, w in 2u16..20, r in 0u16..20, c in 0u16..20) {
            let s = g(h, w);
            let node = NodeId::new(r % h, c % w);
            let deg = s.degree_of(node).unwrap();
            let mut seen = Vec::new();
            for p in 1..=deg {
                let nb = s.neighbor(node, p).unwrap();
                prop_assert!(!seen.contains(&nb));
                seen.push(nb);
            }
            prop_assert!(s.neighbor(node, deg + 1).is_err());
        }

        #[test]
        fn neighbor_entry_symmetry(h in 2u16..20, w in 2u16..20, r in 0u16..20, c in 0u16..20, p in 1u8..5) {
            let s = g(h, w);
            let node = NodeId::new(r % h, c % w);
            let deg = s.degree_of(node).unwrap();
            let port = (p - 1) % deg + 1;
            let nb = s.neighbor(node, port).unwrap();
            let back = s.entry_port(node, nb).unwrap();
            prop_assert_eq!(s.neighbor(nb, back).unwrap(), node);
        }

        #[test]
        fn straight_walk_stays_in_line(h in 3u16..24, w in 3u16..24, r in 1u16..23, c in 1u16..23, d in 0usize..4) {
            let s = g(h, w);
            let start = NodeId::new(r % (h - 2) + 1, c % (w - 2) + 1);
            prop_assert_eq!(s.degree_of(start).unwrap(), 4);
            let dir = COMPASS_ORDER[d];
            let mut cur = s.neighbor(start, s.direction_port(start, dir).unwrap()).unwrap();
            let mut prev = start;
            let mut moves = 1u32;
            while s.degree_of(cur).unwrap() == 4 {
                let entry = s.entry_port(prev, cur).unwrap();
                let exit = straight_exit(4, entry).unwrap();
                let next = s.neighbor(cur, exit).unwrap();
                prev = cur;
                cur = next;
                moves += 1;
                prop_assert!(moves < u32::from(h.max(w)));
            }
            // Every visited node shares the starting row or column.
            prop_assert!(cur.row == start.row || cur.col == start.col);
            prop_assert!(moves <= u32::from(h.max(w)) - 1);
        }
    }
}
