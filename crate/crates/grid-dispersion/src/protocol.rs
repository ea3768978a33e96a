//! Types shared by the robot protocols: the per-round observation/action
//! interface, gate tables, rank arithmetic, the label algebra robots use to
//! navigate without coordinates, and memory-bit accounting.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

use crate::grid::{Compass, CornerTag, PortLabel, COMPASS_ORDER};

/// Unique robot identifier. Width in bits is `ceil(log2(idmax+1))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RobotId(pub u64);

impl fmt::Display for RobotId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Grid shape each robot knows a priori. Dimensions are measured at runtime;
/// the shape class only decides whether one or two sides get measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProtocolShape {
    Square,
    Rectangular,
}

/// Parity of the node count; selects the even (four-quadrant) or odd
/// (center-meeting) dispersal path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(n: u32) -> Parity {
        if n % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// What a robot does at the end of a round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Stay,
    Move(PortLabel),
    SettleHere,
}

/// One co-located robot as seen during the communicate sub-step.
#[derive(Debug, Clone)]
pub struct PeerView<M> {
    pub id: RobotId,
    pub memory: M,
}

/// Everything a robot can sense in one round: the degree of its node, the
/// entry label of the edge it traversed last round (if it moved), and
/// read-only snapshots of co-located memories (its own snapshot included).
///
/// Robots that crashed at or before this round's communicate sub-step are
/// absent from `colocated`.
#[derive(Debug, Clone)]
pub struct Observation<'a, M> {
    pub node_degree: u8,
    pub entry: Option<PortLabel>,
    pub colocated: &'a [PeerView<M>],
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProtocolError {
    #[error("grid sides must be at least 2 (got {0}, {1})")]
    BadDimensions(u16, u16),
    #[error("rank {rank} out of range for quadrant capacity {capacity}")]
    RankOverflow { rank: u32, capacity: u32 },
    #[error("internal protocol error: {0}")]
    Internal(String),
}

/// A robot observed something impossible under the protocol's contract with
/// the grid. The engine records these as simulator bugs and halts the run;
/// they are never silently absorbed.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("protocol violation in {phase}: {message}")]
pub struct ProtocolViolation {
    pub phase: &'static str,
    pub message: String,
}

pub fn violation(phase: &'static str, message: impl Into<String>) -> ProtocolViolation {
    ProtocolViolation {
        phase,
        message: message.into(),
    }
}

// ---------------------------------------------------------------------------
// Gate tables
// ---------------------------------------------------------------------------

/// Absolute round numbers at which protocol phases begin. Square grids use
/// the exact gate multiples of sqrt(n); rectangular grids scale with the
/// longer side and leave room for the two-leg dimension measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GateTable {
    /// Round by which every live robot is at a corner knowing dimensions.
    pub g_meet: u32,
    pub schedule: GateSchedule,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateSchedule {
    Even {
        g_snapshot: u32,
        g_columns_even: u32,
        g_deadline: u32,
    },
    Odd {
        g_middle: u32,
        g_center: u32,
        g_to_corner: u32,
        g_columns_odd: u32,
        g_deadline: u32,
    },
}

impl GateTable {
    pub fn deadline(&self) -> u32 {
        match self.schedule {
            GateSchedule::Even { g_deadline, .. } => g_deadline,
            GateSchedule::Odd { g_deadline, .. } => g_deadline,
        }
    }

    /// The gate at which final column ranks are assigned.
    pub fn columns_gate(&self) -> u32 {
        match self.schedule {
            GateSchedule::Even { g_columns_even, .. } => g_columns_even,
            GateSchedule::Odd { g_columns_odd, .. } => g_columns_odd,
        }
    }

    /// Shift every gate by `skew` rounds (test hook for protocol mutations).
    pub fn skewed(&self, skew: i32) -> GateTable {
        let adj = |g: u32| -> u32 {
            let v = i64::from(g) + i64::from(skew);
            v.max(1) as u32
        };
        let schedule = match self.schedule {
            GateSchedule::Even {
                g_snapshot,
                g_columns_even,
                g_deadline,
            } => GateSchedule::Even {
                g_snapshot: adj(g_snapshot),
                g_columns_even: adj(g_columns_even),
                g_deadline: adj(g_deadline),
            },
            GateSchedule::Odd {
                g_middle,
                g_center,
                g_to_corner,
                g_columns_odd,
                g_deadline,
            } => GateSchedule::Odd {
                g_middle: adj(g_middle),
                g_center: adj(g_center),
                g_to_corner: adj(g_to_corner),
                g_columns_odd: adj(g_columns_odd),
                g_deadline: adj(g_deadline),
            },
        };
        GateTable {
            g_meet: adj(self.g_meet),
            schedule,
        }
    }
}

/// Gate rounds for measured sides. Equal sides get the square schedule with
/// gates at 3, 3.5, 4, 5, 6 and 7 times sqrt(n); unequal sides scale with
/// the longer side (the extra slack covers measuring both dimensions).
/// Fractional gates round up.
pub fn compute_gates(side_a: u16, side_b: u16, parity: Parity) -> Result<GateTable, ProtocolError> {
    if side_a < 2 || side_b < 2 {
        return Err(ProtocolError::BadDimensions(side_a, side_b));
    }
    let n = u32::from(side_a) * u32::from(side_b);
    if Parity::of(n) != parity {
        return Err(ProtocolError::Internal(format!(
            "parity mismatch for {side_a}x{side_b}"
        )));
    }
    if side_a == side_b {
        let s = u32::from(side_a);
        Ok(GateTable {
            g_meet: 3 * s,
            schedule: match parity {
                Parity::Even => GateSchedule::Even {
                    g_snapshot: 3 * s,
                    g_columns_even: 6 * s,
                    g_deadline: 7 * s,
                },
                Parity::Odd => GateSchedule::Odd {
                    g_middle: 3 * s,
                    g_center: (7 * s + 1) / 2,
                    g_to_corner: 4 * s,
                    g_columns_odd: 5 * s,
                    g_deadline: 7 * s,
                },
            },
        })
    } else {
        let l = u32::from(side_a.max(side_b));
        Ok(GateTable {
            g_meet: 4 * l,
            schedule: match parity {
                Parity::Even => GateSchedule::Even {
                    g_snapshot: 4 * l,
                    g_columns_even: 7 * l,
                    g_deadline: 9 * l,
                },
                Parity::Odd => GateSchedule::Odd {
                    g_middle: 4 * l,
                    g_center: 5 * l,
                    g_to_corner: 6 * l,
                    g_columns_odd: 7 * l,
                    g_deadline: 9 * l,
                },
            },
        })
    }
}

// ---------------------------------------------------------------------------
// Rank arithmetic
// ---------------------------------------------------------------------------

/// Outcome of a corner snapshot: keep the lowest `capacity` IDs, send the
/// rest traveling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankOutcome {
    Stay(u32),
    Travel,
}

/// Rank `self_id` within the co-located ID set: the lowest `capacity` IDs
/// stay with their sorted index as rank, everyone else travels.
pub fn snapshot_rank(
    colocated_ids: &[RobotId],
    self_id: RobotId,
    capacity: u32,
) -> Result<RankOutcome, ProtocolError> {
    let mut ids: Vec<RobotId> = colocated_ids.to_vec();
    ids.sort_unstable();
    ids.dedup();
    let idx = ids
        .iter()
        .position(|&x| x == self_id)
        .ok_or_else(|| ProtocolError::Internal(format!("id {self_id} missing from snapshot")))?;
    if (idx as u32) < capacity {
        Ok(RankOutcome::Stay(idx as u32))
    } else {
        Ok(RankOutcome::Travel)
    }
}

/// Map a rank to quadrant offsets: `col_off` along the corner's boundary row,
/// then `row_off` perpendicular into the grid. Column-major so that each
/// column fills before the next opens, matching the per-column dispersal.
pub fn target_of_rank(
    rank: u32,
    quad_height: u16,
    quad_width: u16,
) -> Result<(u16, u16), ProtocolError> {
    let capacity = u32::from(quad_height) * u32::from(quad_width);
    if rank >= capacity {
        return Err(ProtocolError::RankOverflow { rank, capacity });
    }
    let col_off = (rank / u32::from(quad_height)) as u16;
    let row_off = (rank % u32::from(quad_height)) as u16;
    Ok((col_off, row_off))
}

// ---------------------------------------------------------------------------
// Label algebra (the robot-side view of the port convention)
// ---------------------------------------------------------------------------

/// Port-label computations a robot may legitimately perform: they encode only
/// the published labeling convention (canonical W, S, E, N order), never the
/// simulator's coordinates. Positions feeding into these come from the
/// robot's own dead reckoning.
pub mod labels {
    use super::*;

    /// Label of `dir` at a node whose present directions (in W,S,E,N order)
    /// are `present`.
    pub fn port_for(present: [bool; 4], dir: Compass) -> Option<PortLabel> {
        let mut label = 0u8;
        for (i, d) in COMPASS_ORDER.iter().enumerate() {
            if present[i] {
                label += 1;
                if *d == dir {
                    return Some(label);
                }
            }
        }
        None
    }

    /// Directions present at a corner.
    pub fn corner_profile(tag: CornerTag) -> [bool; 4] {
        match tag {
            CornerTag::NW => [false, true, true, false],
            CornerTag::NE => [true, true, false, false],
            CornerTag::SW => [false, false, true, true],
            CornerTag::SE => [true, false, false, true],
        }
    }

    /// Directions present at a non-corner node of boundary `side`.
    pub fn boundary_profile(side: Compass) -> [bool; 4] {
        match side {
            Compass::N => [true, true, true, false],
            Compass::S => [true, false, true, true],
            Compass::W => [false, true, true, true],
            Compass::E => [true, true, false, true],
        }
    }

    pub const INTERNAL_PROFILE: [bool; 4] = [true; 4];

    /// Directions present at dead-reckoned coordinates in a known grid.
    pub fn profile_at(row: u16, col: u16, height: u16, width: u16) -> [bool; 4] {
        [
            col > 0,
            row + 1 < height,
            col + 1 < width,
            row > 0,
        ]
    }

    /// Entry label observed after moving in `heading` onto a node with the
    /// given profile.
    pub fn entry_label(profile: [bool; 4], heading: Compass) -> Option<PortLabel> {
        port_for(profile, heading.opposite())
    }

    /// The two sides meeting at a corner, as (vertical boundary, horizontal
    /// boundary), e.g. NW -> (W, N).
    pub fn corner_sides(tag: CornerTag) -> (Compass, Compass) {
        match tag {
            CornerTag::NW => (Compass::W, Compass::N),
            CornerTag::NE => (Compass::E, Compass::N),
            CornerTag::SW => (Compass::W, Compass::S),
            CornerTag::SE => (Compass::E, Compass::S),
        }
    }

    /// Walking from `corner` in `dir`: the boundary walked and the corner at
    /// its far end. `dir` must point along one of the corner's sides.
    pub fn corner_walk(corner: CornerTag, dir: Compass) -> Option<(Compass, CornerTag)> {
        let (vert, horiz) = corner_sides(corner);
        let boundary = match dir {
            Compass::N | Compass::S => vert,
            Compass::E | Compass::W => horiz,
        };
        // The far corner shares `boundary` and lies in direction `dir`.
        let end = match (boundary, dir) {
            (Compass::W, Compass::S) => CornerTag::SW,
            (Compass::W, Compass::N) => CornerTag::NW,
            (Compass::E, Compass::S) => CornerTag::SE,
            (Compass::E, Compass::N) => CornerTag::NE,
            (Compass::N, Compass::W) => CornerTag::NW,
            (Compass::N, Compass::E) => CornerTag::NE,
            (Compass::S, Compass::W) => CornerTag::SW,
            (Compass::S, Compass::E) => CornerTag::SE,
            _ => return None,
        };
        if end == corner {
            return None;
        }
        Some((boundary, end))
    }

    /// Direction of port 1 at a corner: the first present direction in
    /// canonical order ("the minimum port number").
    pub fn corner_port1_direction(tag: CornerTag) -> Compass {
        let profile = corner_profile(tag);
        for (i, d) in COMPASS_ORDER.iter().enumerate() {
            if profile[i] {
                return *d;
            }
        }
        unreachable!("corners have degree 2")
    }

    /// Direction leading off a boundary into the grid interior.
    pub fn inward_direction(side: Compass) -> Compass {
        side.opposite()
    }
}

// ---------------------------------------------------------------------------
// Memory accounting
// ---------------------------------------------------------------------------

/// Ceiling of log2 for x >= 1 (0 maps to 0 bits).
pub fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// Register widths for canonical memory serialization, fixed per experiment
/// by the node count and the widest robot ID.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BitContext {
    pub n: u32,
    /// ceil(log2(idmax+1)), at least 1.
    pub id_bits: u32,
    /// max(ceil(log2 n), id_bits): the generic register width.
    pub word_bits: u32,
    /// How many hearsay entries fit the Byzantine budget at this size.
    pub hearsay_cap: u32,
}

/// Crash-memory budget: 12 registers of the generic width plus 16 flag bits.
pub fn b_crash(n: u32, idmax: u64) -> u32 {
    let l = ceil_log2(u64::from(n)).max(ceil_log2(idmax + 1)).max(1);
    12 * l + 16
}

/// Byzantine-memory budget: room for one ID-sized record per robot plus
/// eight spare ID widths on top of the crash budget.
pub fn b_byz(n: u32, idmax: u64) -> u32 {
    (n + 8) * ceil_log2(idmax + 1).max(1) + b_crash(n, idmax)
}

/// Canonical serialized width of a crash-protocol memory: every register at
/// its context width. Content-independent, so settled memories keep a
/// constant footprint.
pub fn crash_memory_bits(ctx: &BitContext) -> u32 {
    // id + round + side_a + side_b + step + rank + target_col + target_row
    // + 16 bits of flags (phase, heading, retry, corner, hypotheses, shape,
    // settled).
    ctx.id_bits + (ctx.word_bits + 3) + 2 * ctx.word_bits + (ctx.word_bits + 3)
        + 3 * ctx.word_bits
        + 16
}

impl BitContext {
    pub fn new(n: u32, idmax: u64) -> BitContext {
        let id_bits = ceil_log2(idmax + 1).max(1);
        let word_bits = ceil_log2(u64::from(n)).max(id_bits).max(1);
        let mut ctx = BitContext {
            n,
            id_bits,
            word_bits,
            hearsay_cap: 0,
        };
        // Whatever the Byzantine budget leaves after the fixed registers,
        // the five ID lists at worst case, the declaration and the version
        // counter can hold hearsay entries.
        let len_bits = ceil_log2(u64::from(n) + 1);
        let worst_lists = n.saturating_sub(1) * id_bits + 5 * len_bits;
        let fixed = crash_memory_bits(&ctx) + worst_lists + (id_bits + 1) + 2;
        let budget = b_byz(n, idmax);
        let spare = budget.saturating_sub(fixed);
        ctx.hearsay_cap = if spare > 3 {
            ((spare - 3) / (id_bits + 2)).min(7)
        } else {
            0
        };
        ctx
    }
}
