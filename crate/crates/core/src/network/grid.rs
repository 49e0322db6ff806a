use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::NetworkError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CircuitId(pub u64);

impl fmt::Display for CircuitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Contiguous slot interval `[start, start + width)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SlotInterval {
    pub start: u32,
    pub width: u32,
}

impl SlotInterval {
    pub fn new(start: u32, width: u32) -> Self {
        Self { start, width }
    }

    pub fn end(&self) -> u32 {
        self.start + self.width
    }

    pub fn range(&self) -> Range<usize> {
        self.start as usize..self.end() as usize
    }

    /// Does the interval share a slot with the inclusive range `[first, last]`?
    pub fn intersects_inclusive(&self, first: u32, last: u32) -> bool {
        self.start <= last && first < self.end()
    }
}

/// State of one spectrum slot.
///
/// Guard slots remember which circuits they protect. Two circuits separated
/// by exactly the guard band share their guard slots, so a guard slot can
/// have two owners. Owners are kept ordered (`first < second`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Cell {
    #[default]
    Free,
    Circuit(CircuitId),
    Guard {
        first: CircuitId,
        second: Option<CircuitId>,
    },
}

impl Cell {
    pub fn is_free(&self) -> bool {
        matches!(self, Cell::Free)
    }

    pub fn is_circuit(&self) -> bool {
        matches!(self, Cell::Circuit(_))
    }

    fn add_guard_owner(&mut self, id: CircuitId) -> Result<(), NetworkError> {
        *self = match *self {
            Cell::Free => Cell::Guard {
                first: id,
                second: None,
            },
            Cell::Guard { first, second: None } if first != id => Cell::Guard {
                first: first.min(id),
                second: Some(first.max(id)),
            },
            _ => return Err(NetworkError::Corrupt(format!("cannot add guard owner {id}"))),
        };
        Ok(())
    }

    fn remove_guard_owner(&mut self, id: CircuitId) -> Result<(), NetworkError> {
        *self = match *self {
            Cell::Guard { first, second: None } if first == id => Cell::Free,
            Cell::Guard {
                first,
                second: Some(second),
            } if first == id => Cell::Guard {
                first: second,
                second: None,
            },
            Cell::Guard {
                first,
                second: Some(second),
            } if second == id => Cell::Guard { first, second: None },
            _ => return Err(NetworkError::Corrupt(format!("{id} does not guard this slot"))),
        };
        Ok(())
    }
}

/// Slot occupancy of one directed link.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotGrid {
    cells: Vec<Cell>,
}

impl SlotGrid {
    pub fn new(slots: u32) -> Self {
        Self {
            cells: vec![Cell::Free; slots as usize],
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, slot: usize) -> Cell {
        self.cells[slot]
    }

    pub fn is_all_free(&self) -> bool {
        self.cells.iter().all(Cell::is_free)
    }

    fn guard_ranges(&self, interval: SlotInterval, guard: u32) -> [Range<usize>; 2] {
        let left = interval.start.saturating_sub(guard) as usize..interval.start as usize;
        let right = interval.end() as usize..(interval.end() as usize + guard as usize).min(self.len());
        [left, right]
    }

    /// Can a circuit occupy `interval` with `guard` slots of separation?
    ///
    /// The interval itself must be free; the guard slots may be free or be
    /// another circuit's guard, but may not carry another circuit.
    pub fn fits(&self, interval: SlotInterval, guard: u32) -> bool {
        if interval.end() as usize > self.len() || interval.width == 0 {
            return false;
        }
        if !self.cells[interval.range()].iter().all(Cell::is_free) {
            return false;
        }
        self.guard_ranges(interval, guard)
            .into_iter()
            .all(|r| !self.cells[r].iter().any(Cell::is_circuit))
    }

    /// Marks `interval` as carrying `id` and its guard slots as guarding it.
    ///
    /// Calls `on_occupied` for every slot that turned from free to occupied.
    pub fn allocate(
        &mut self,
        interval: SlotInterval,
        guard: u32,
        id: CircuitId,
        mut on_occupied: impl FnMut(usize),
    ) -> Result<(), NetworkError> {
        if !self.fits(interval, guard) {
            return Err(NetworkError::Corrupt(format!(
                "{id} does not fit at [{}, {})",
                interval.start,
                interval.end()
            )));
        }
        for slot in interval.range() {
            self.cells[slot] = Cell::Circuit(id);
            on_occupied(slot);
        }
        for range in self.guard_ranges(interval, guard) {
            for slot in range {
                let was_free = self.cells[slot].is_free();
                self.cells[slot].add_guard_owner(id)?;
                if was_free {
                    on_occupied(slot);
                }
            }
        }
        Ok(())
    }

    /// Undoes [`SlotGrid::allocate`]. Calls `on_freed` for every slot that
    /// became free.
    pub fn release(
        &mut self,
        interval: SlotInterval,
        guard: u32,
        id: CircuitId,
        mut on_freed: impl FnMut(usize),
    ) -> Result<(), NetworkError> {
        if interval.end() as usize > self.len()
            || !self.cells[interval.range()]
                .iter()
                .all(|c| *c == Cell::Circuit(id))
        {
            return Err(NetworkError::UnknownCircuit(id));
        }
        for slot in interval.range() {
            self.cells[slot] = Cell::Free;
            on_freed(slot);
        }
        for range in self.guard_ranges(interval, guard) {
            for slot in range {
                self.cells[slot].remove_guard_owner(id)?;
                if self.cells[slot].is_free() {
                    on_freed(slot);
                }
            }
        }
        Ok(())
    }

    /// Full-scan consistency check.
    ///
    /// Every circuit's cells form one contiguous interval, and every guard
    /// owner is a circuit lying within `guard` slots of the guard cell.
    pub fn validate(&self, guard: u32) -> Result<(), NetworkError> {
        let mut spans: BTreeMap<CircuitId, (usize, usize, usize)> = BTreeMap::new();
        for (slot, cell) in self.cells.iter().enumerate() {
            if let Cell::Circuit(id) = cell {
                let e = spans.entry(*id).or_insert((slot, slot, 0));
                e.1 = slot;
                e.2 += 1;
            }
        }
        for (id, (lo, hi, count)) in &spans {
            if hi - lo + 1 != *count {
                return Err(NetworkError::Corrupt(format!("{id} is not contiguous")));
            }
        }
        for (slot, cell) in self.cells.iter().enumerate() {
            if let Cell::Guard { first, second } = cell {
                for owner in std::iter::once(*first).chain(*second) {
                    let Some(&(lo, hi, _)) = spans.get(&owner) else {
                        return Err(NetworkError::Corrupt(format!(
                            "slot {slot} guards absent circuit {owner}"
                        )));
                    };
                    let near = (slot < lo && lo - slot <= guard as usize)
                        || (slot > hi && slot - hi <= guard as usize);
                    if !near {
                        return Err(NetworkError::Corrupt(format!(
                            "slot {slot} guards distant circuit {owner}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alloc(g: &mut SlotGrid, start: u32, width: u32, id: u64) {
        g.allocate(SlotInterval::new(start, width), 2, CircuitId(id), |_| {})
            .unwrap();
    }

    #[test]
    fn allocation_marks_circuit_and_guard_cells() {
        let mut g = SlotGrid::new(10);
        alloc(&mut g, 4, 2, 1);
        let c = CircuitId(1);
        let guard = Cell::Guard {
            first: c,
            second: None,
        };
        assert_eq!(g.cell(1), Cell::Free);
        assert_eq!(g.cell(2), guard);
        assert_eq!(g.cell(3), guard);
        assert_eq!(g.cell(4), Cell::Circuit(c));
        assert_eq!(g.cell(5), Cell::Circuit(c));
        assert_eq!(g.cell(6), guard);
        assert_eq!(g.cell(7), guard);
        assert_eq!(g.cell(8), Cell::Free);
        g.validate(2).unwrap();
    }

    #[test]
    fn guards_are_clipped_at_the_edges() {
        let mut g = SlotGrid::new(4);
        alloc(&mut g, 0, 3, 1);
        assert!(g.cell(3) != Cell::Free);
        let mut occupied = Vec::new();
        let mut h = SlotGrid::new(4);
        h.allocate(SlotInterval::new(1, 3), 2, CircuitId(2), |s| occupied.push(s))
            .unwrap();
        occupied.sort();
        assert_eq!(occupied, vec![0, 1, 2, 3]);
    }

    #[test]
    fn neighbours_share_guard_cells() {
        let mut g = SlotGrid::new(12);
        alloc(&mut g, 0, 2, 7);
        assert!(!g.fits(SlotInterval::new(2, 1), 2));
        assert!(!g.fits(SlotInterval::new(3, 1), 2));
        assert!(g.fits(SlotInterval::new(4, 1), 2));
        alloc(&mut g, 4, 1, 3);
        assert_eq!(
            g.cell(2),
            Cell::Guard {
                first: CircuitId(3),
                second: Some(CircuitId(7))
            }
        );
        g.validate(2).unwrap();
        // release order does not matter
        let mut a = g.clone();
        let mut b = g.clone();
        a.release(SlotInterval::new(0, 2), 2, CircuitId(7), |_| {})
            .unwrap();
        a.release(SlotInterval::new(4, 1), 2, CircuitId(3), |_| {})
            .unwrap();
        b.release(SlotInterval::new(4, 1), 2, CircuitId(3), |_| {})
            .unwrap();
        b.release(SlotInterval::new(0, 2), 2, CircuitId(7), |_| {})
            .unwrap();
        assert_eq!(a, b);
        assert!(a.is_all_free());
    }

    #[test]
    fn allocate_then_release_is_identity() {
        let mut g = SlotGrid::new(20);
        alloc(&mut g, 0, 2, 1);
        alloc(&mut g, 9, 4, 2);
        let before = g.clone();
        alloc(&mut g, 4, 3, 3);
        let mut freed = Vec::new();
        g.release(SlotInterval::new(4, 3), 2, CircuitId(3), |s| freed.push(s))
            .unwrap();
        assert_eq!(g, before);
        freed.sort();
        // cells 2, 3 and 7, 8 were already guards for circuits 1 and 2
        assert_eq!(freed, vec![4, 5, 6]);
    }

    #[test]
    fn corrupt_operations_are_reported() {
        let mut g = SlotGrid::new(10);
        alloc(&mut g, 2, 2, 1);
        assert!(matches!(
            g.allocate(SlotInterval::new(3, 1), 2, CircuitId(2), |_| {}),
            Err(NetworkError::Corrupt(_))
        ));
        assert!(matches!(
            g.release(SlotInterval::new(2, 2), 2, CircuitId(9), |_| {}),
            Err(NetworkError::UnknownCircuit(_))
        ));
    }

    #[test]
    fn validator_catches_split_circuits() {
        let mut g = SlotGrid::new(6);
        g.cells[0] = Cell::Circuit(CircuitId(1));
        g.cells[2] = Cell::Circuit(CircuitId(1));
        assert!(g.validate(2).is_err());
        let mut g = SlotGrid::new(6);
        g.cells[5] = Cell::Guard {
            first: CircuitId(4),
            second: None,
        };
        assert!(g.validate(2).is_err());
    }
}
