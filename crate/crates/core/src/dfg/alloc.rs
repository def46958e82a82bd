//! Forward-backward register allocation over a periodic lifetime table.
//!
//! Values are placed in order of birth. A new value enters the lowest free
//! register. Each cycle it moves one register forward; if that register is
//! taken it takes the next free one further along the chain. A value that is
//! still live in the last register moves back to the lowest free register.
//! Because the schedule repeats every period, a register that holds a value
//! in cycle `t` is taken in every cycle `t + k·N_f`.

use crate::error::{Error, Result};

use super::lifetime::LifetimeTable;

/// How a value got to its register in a given cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    Enter,
    Forward,
    /// Forward past taken registers.
    Skip,
    Backward,
}

/// Register occupied by one value in each cycle of its lifetime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValuePath {
    pub label: String,
    pub tin: i64,
    pub tout: i64,
    pub reads: Vec<i64>,
    /// `registers[i]` holds the value during cycle `tin + i`.
    pub registers: Vec<usize>,
    pub moves: Vec<Move>,
}

impl ValuePath {
    /// Register holding the value during absolute cycle `t`, if live.
    pub fn register_at(&self, t: i64) -> Option<usize> {
        if t < self.tin || t >= self.tout {
            return None;
        }
        Some(self.registers[(t - self.tin) as usize])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Allocation {
    pub period: usize,
    pub registers: usize,
    pub paths: Vec<ValuePath>,
}

impl Allocation {
    /// Steady-state register contents: `grid[cycle][register]` for cycles of
    /// one period.
    pub fn grid(&self) -> Vec<Vec<Option<String>>> {
        let p = self.period as i64;
        let mut grid = vec![vec![None; self.registers]; self.period];
        for path in &self.paths {
            for (i, &r) in path.registers.iter().enumerate() {
                let t = (path.tin + i as i64).rem_euclid(p) as usize;
                grid[t][r] = Some(path.label.clone());
            }
        }
        grid
    }

    /// Runs the schedule on a simulated register file for enough iterations
    /// to reach steady state. Checks that no register holds two values at
    /// once and that every read finds its own value instance.
    pub fn replay(&self) -> Result<()> {
        if self.paths.is_empty() {
            return Ok(());
        }
        let p = self.period as i64;
        let span = self.paths.iter().map(|v| v.tout).max().unwrap_or(0)
            - self.paths.iter().map(|v| v.tin).min().unwrap_or(0);
        let iterations = (span / p + 3).max(3);
        let start = self.paths.iter().map(|v| v.tin).min().unwrap_or(0);
        let end = start + iterations * p;
        for t in start..end {
            // Contents of the register file during cycle t.
            let mut file: Vec<Option<(usize, i64)>> = vec![None; self.registers];
            for (vi, path) in self.paths.iter().enumerate() {
                if path.registers.len() as i64 != path.tout - path.tin {
                    return Err(Error::Allocation(format!(
                        "value {} has a path of the wrong length",
                        path.label
                    )));
                }
                for k in 0..iterations {
                    if let Some(r) = path.register_at(t - k * p) {
                        if r >= self.registers {
                            return Err(Error::Allocation(format!(
                                "value {} uses register {r} of {}",
                                path.label, self.registers
                            )));
                        }
                        if let Some((other, ok)) = file[r] {
                            return Err(Error::Allocation(format!(
                                    "register {r} holds {} (iteration {ok}) and {} (iteration {k}) in cycle {t}",
                                    self.paths[other].label, path.label
                                )));
                        }
                        file[r] = Some((vi, k));
                    }
                }
            }
            // Reads at cycle t + 1 see the register file of cycle t.
            for (vi, path) in self.paths.iter().enumerate() {
                for k in 0..iterations {
                    for &read in &path.reads {
                        if read + k * p != t + 1 {
                            continue;
                        }
                        let found = path.register_at(t - k * p).and_then(|r| file[r]);
                        if found != Some((vi, k)) {
                            return Err(Error::Allocation(format!(
                                "value {} is not available for its read in cycle {read}",
                                path.label
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Allocates the table onto exactly its minimum number of registers.
pub fn allocate_registers(table: &LifetimeTable) -> Result<Allocation> {
    allocate_with(table, table.min_registers())
}

/// Allocates onto `registers` registers.
pub fn allocate_with(table: &LifetimeTable, registers: usize) -> Result<Allocation> {
    let p = table.period as i64;
    for v in &table.values {
        if v.tout < v.tin {
            return Err(Error::InfeasibleLifetime(v.label.clone()));
        }
    }
    let mut order: Vec<usize> = (0..table.values.len()).collect();
    order.sort_by_key(|&i| (table.values[i].tin, i));

    let mut taken = vec![vec![false; registers]; table.period];
    let slot = |t: i64| t.rem_euclid(p) as usize;
    let mut paths = vec![None; table.values.len()];
    for i in order {
        let v = &table.values[i];
        let mut regs: Vec<usize> = Vec::new();
        let mut moves = Vec::new();
        for t in v.tin..v.tout {
            let free = &taken[slot(t)];
            let lowest = free.iter().position(|&x| !x);
            let (r, m) = match regs.last() {
                None => (lowest, Move::Enter),
                Some(&cur) if cur + 1 < registers && !free[cur + 1] => {
                    (Some(cur + 1), Move::Forward)
                }
                Some(&cur) => match (cur + 2..registers).find(|&r| !free[r]) {
                    Some(r) => (Some(r), Move::Skip),
                    None => (lowest, Move::Backward),
                },
            };
            let r = r.ok_or_else(|| {
                Error::Allocation(format!(
                    "{}: no free register in cycle {t} with {registers} registers",
                    v.label
                ))
            })?;
            taken[slot(t)][r] = true;
            regs.push(r);
            moves.push(m);
        }
        paths[i] = Some(ValuePath {
            label: v.label.clone(),
            tin: v.tin,
            tout: v.tout,
            reads: v.reads.clone(),
            registers: regs,
            moves,
        });
    }
    Ok(Allocation {
        period: table.period,
        registers,
        paths: paths.into_iter().map(Option::unwrap).collect(),
    })
}
