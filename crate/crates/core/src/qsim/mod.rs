//! Classical-reversible circuit simulation on basis states.
//!
//! NEQR states are uniform superpositions of basis states and every circuit
//! used by the watermarking scheme is a permutation of basis states, so
//! simulating one basis state at a time is exact.
//!
//! Netlist format, one gate per line:
//!
//! ```text
//! # comment
//! wires 7
//! group y 0 1
//! TOFFOLI 6 | 0+ 1-
//! SWAP 2 3 |
//! ```
//!
//! Targets come before the bar, controls after it; `+` marks a control that
//! fires on 1, `-` one that fires on 0.

mod builders;
pub mod verify;

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

pub use builders::{
    build_hdwm_extract_pixel, build_hdwm_pixel, build_majority3, build_qbs, build_qe, build_qib,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    X,
    Cnot,
    Toffoli,
    Mcx,
    Swap,
    Fredkin,
}

impl GateKind {
    pub fn name(self) -> &'static str {
        match self {
            GateKind::X => "X",
            GateKind::Cnot => "CNOT",
            GateKind::Toffoli => "TOFFOLI",
            GateKind::Mcx => "MCX",
            GateKind::Swap => "SWAP",
            GateKind::Fredkin => "FREDKIN",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "X" => GateKind::X,
            "CNOT" => GateKind::Cnot,
            "TOFFOLI" => GateKind::Toffoli,
            "MCX" => GateKind::Mcx,
            "SWAP" => GateKind::Swap,
            "FREDKIN" => GateKind::Fredkin,
            _ => return None,
        })
    }

    fn target_count(self) -> usize {
        match self {
            GateKind::Swap | GateKind::Fredkin => 2,
            _ => 1,
        }
    }

    fn control_count_ok(self, n: usize) -> bool {
        match self {
            GateKind::X | GateKind::Swap => n == 0,
            GateKind::Cnot => n == 1,
            GateKind::Toffoli => n == 2,
            GateKind::Mcx => true,
            GateKind::Fredkin => n >= 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Control {
    pub wire: usize,
    /// `true`: fires when the wire is 1; `false`: fires when it is 0.
    pub on: bool,
}

impl Control {
    pub fn pos(wire: usize) -> Self {
        Self { wire, on: true }
    }

    pub fn neg(wire: usize) -> Self {
        Self { wire, on: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Gate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub controls: Vec<Control>,
}

impl Gate {
    pub fn new(kind: GateKind, targets: Vec<usize>, controls: Vec<Control>) -> Result<Self> {
        let g = Self {
            kind,
            targets,
            controls,
        };
        g.check_shape()?;
        Ok(g)
    }

    pub fn x(target: usize) -> Self {
        Self {
            kind: GateKind::X,
            targets: vec![target],
            controls: vec![],
        }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self {
            kind: GateKind::Cnot,
            targets: vec![target],
            controls: vec![Control::pos(control)],
        }
    }

    pub fn toffoli(c0: usize, c1: usize, target: usize) -> Self {
        Self {
            kind: GateKind::Toffoli,
            targets: vec![target],
            controls: vec![Control::pos(c0), Control::pos(c1)],
        }
    }

    pub fn mcx(controls: Vec<Control>, target: usize) -> Self {
        Self {
            kind: GateKind::Mcx,
            targets: vec![target],
            controls,
        }
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Self {
            kind: GateKind::Swap,
            targets: vec![a, b],
            controls: vec![],
        }
    }

    pub fn fredkin(controls: Vec<Control>, a: usize, b: usize) -> Self {
        Self {
            kind: GateKind::Fredkin,
            targets: vec![a, b],
            controls,
        }
    }

    fn check_shape(&self) -> Result<()> {
        if self.targets.len() != self.kind.target_count()
            || !self.kind.control_count_ok(self.controls.len())
        {
            return Err(Error::Circuit(format!(
                "{} with {} target(s) and {} control(s)",
                self.kind.name(),
                self.targets.len(),
                self.controls.len()
            )));
        }
        let mut wires: Vec<usize> = self
            .targets
            .iter()
            .copied()
            .chain(self.controls.iter().map(|c| c.wire))
            .collect();
        wires.sort_unstable();
        if wires.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Circuit(format!(
                "{} reuses a wire",
                self.kind.name()
            )));
        }
        Ok(())
    }

    fn max_wire(&self) -> usize {
        self.targets
            .iter()
            .copied()
            .chain(self.controls.iter().map(|c| c.wire))
            .max()
            .unwrap_or(0)
    }

    #[inline]
    fn fires(&self, bits: &[bool]) -> bool {
        self.controls.iter().all(|c| bits[c.wire] == c.on)
    }

    fn apply(&self, bits: &mut [bool]) {
        if !self.fires(bits) {
            return;
        }
        match self.kind {
            GateKind::Swap | GateKind::Fredkin => bits.swap(self.targets[0], self.targets[1]),
            _ => bits[self.targets[0]] = !bits[self.targets[0]],
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.name())?;
        for t in &self.targets {
            write!(f, " {t}")?;
        }
        write!(f, " |")?;
        for c in &self.controls {
            write!(f, " {}{}", c.wire, if c.on { '+' } else { '-' })?;
        }
        Ok(())
    }
}

/// One classical bit per wire.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisState {
    bits: Vec<bool>,
}

impl BasisState {
    pub fn zeros(wire_count: usize) -> Self {
        Self {
            bits: vec![false; wire_count],
        }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, wire: usize) -> bool {
        self.bits[wire]
    }

    pub fn set(&mut self, wire: usize, v: bool) {
        self.bits[wire] = v;
    }

    /// Reads `wires` as an unsigned integer, `wires[0]` least significant.
    pub fn read(&self, wires: &[usize]) -> u64 {
        wires
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &w)| acc | (u64::from(self.bits[w]) << i))
    }

    /// Writes `value` onto `wires`, `wires[0]` least significant.
    pub fn write(&mut self, wires: &[usize], value: u64) {
        for (i, &w) in wires.iter().enumerate() {
            self.bits[w] = (value >> i) & 1 == 1;
        }
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Ordered gate list over `wire_count` wires, with named wire groups.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Circuit {
    wire_count: usize,
    gates: Vec<Gate>,
    groups: BTreeMap<String, Vec<usize>>,
}

impl Circuit {
    pub fn new(wire_count: usize) -> Self {
        Self {
            wire_count,
            gates: Vec::new(),
            groups: BTreeMap::new(),
        }
    }

    pub fn wire_count(&self) -> usize {
        self.wire_count
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Allocates `width` fresh wires under `name` and returns them.
    pub fn add_register(&mut self, name: &str, width: usize) -> Vec<usize> {
        let wires: Vec<usize> = (self.wire_count..self.wire_count + width).collect();
        self.wire_count += width;
        self.groups.insert(name.to_string(), wires.clone());
        wires
    }

    pub fn set_group(&mut self, name: &str, wires: Vec<usize>) -> Result<()> {
        if let Some(&w) = wires.iter().find(|&&w| w >= self.wire_count) {
            return Err(Error::Circuit(format!(
                "group {name}: wire {w} out of range"
            )));
        }
        self.groups.insert(name.to_string(), wires);
        Ok(())
    }

    pub fn group(&self, name: &str) -> Result<&[usize]> {
        self.groups
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::Circuit(format!("no wire group named {name}")))
    }

    pub fn groups(&self) -> &BTreeMap<String, Vec<usize>> {
        &self.groups
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.check_shape()?;
        if gate.max_wire() >= self.wire_count {
            return Err(Error::Circuit(format!(
                "gate `{gate}` touches wire {} of {}",
                gate.max_wire(),
                self.wire_count
            )));
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<()> {
        gates.into_iter().try_for_each(|g| self.push(g))
    }

    /// Appends every gate of `other` (which must fit in this circuit's wires).
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        self.extend(other.gates.iter().cloned())
    }

    /// Every supported gate is self-inverse, so the inverse is the mirrored list.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            wire_count: self.wire_count,
            gates: self.gates.iter().rev().cloned().collect(),
            groups: self.groups.clone(),
        }
    }

    /// Rewrites every control-on-0 as a positive control conjugated by X gates.
    pub fn expand_negative_controls(&self) -> Circuit {
        let mut gates = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let negs: Vec<usize> = g
                .controls
                .iter()
                .filter(|c| !c.on)
                .map(|c| c.wire)
                .collect();
            gates.extend(negs.iter().map(|&w| Gate::x(w)));
            gates.push(Gate {
                kind: g.kind,
                targets: g.targets.clone(),
                controls: g.controls.iter().map(|c| Control::pos(c.wire)).collect(),
            });
            gates.extend(negs.iter().map(|&w| Gate::x(w)));
        }
        Circuit {
            wire_count: self.wire_count,
            gates,
            groups: self.groups.clone(),
        }
    }

    pub fn to_netlist(&self) -> String {
        let mut out = format!("wires {}\n", self.wire_count);
        for (name, wires) in &self.groups {
            out.push_str("group ");
            out.push_str(name);
            for w in wires {
                out.push_str(&format!(" {w}"));
            }
            out.push('\n');
        }
        for g in &self.gates {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_netlist(text: &str) -> Result<Circuit> {
        let mut circuit: Option<Circuit> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |what: &str| Error::Circuit(format!("netlist line {}: {what}", lineno + 1));
            let num = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| bad(&format!("bad wire `{s}`")))
            };
            let mut words = line.split_whitespace();
            let head = words.next().unwrap_or_default();
            match head {
                "wires" => {
                    let n = num(words.next().ok_or_else(|| bad("missing wire count"))?)?;
                    circuit = Some(Circuit::new(n));
                }
                "group" => {
                    let c = circuit.as_mut().ok_or_else(|| bad("group before wires"))?;
                    let name = words.next().ok_or_else(|| bad("missing group name"))?;
                    let wires = words.map(num).collect::<Result<Vec<_>>>()?;
                    c.set_group(name, wires)?;
                }
                _ => {
                    let c = circuit.as_mut().ok_or_else(|| bad("gate before wires"))?;
                    let kind = GateKind::parse(head).ok_or_else(|| bad("unknown gate"))?;
                    let (t, ctl) = line[head.len()..]
                        .split_once('|')
                        .ok_or_else(|| bad("missing `|`"))?;
                    let targets = t.split_whitespace().map(num).collect::<Result<Vec<_>>>()?;
                    let controls = ctl
                        .split_whitespace()
                        .map(|s| {
                            let (w, on) = match s.as_bytes().last() {
                                Some(b'+') => (&s[..s.len() - 1], true),
                                Some(b'-') => (&s[..s.len() - 1], false),
                                _ => return Err(bad(&format!("control `{s}` lacks polarity"))),
                            };
                            Ok(Control { wire: num(w)?, on })
                        })
                        .collect::<Result<Vec<_>>>()?;
                    c.push(Gate::new(kind, targets, controls)?)?;
                }
            }
        }
        circuit.ok_or_else(|| Error::Circuit("netlist has no `wires` line".into()))
    }
}

/// Runs `c` on `s`.
pub fn simulate(c: &Circuit, s: &BasisState) -> Result<BasisState> {
    if s.len() != c.wire_count {
        return Err(Error::Circuit(format!(
            "state has {} wires, circuit has {}",
            s.len(),
            c.wire_count
        )));
    }
    let mut bits = s.bits.clone();
    for g in &c.gates {
        g.apply(&mut bits);
    }
    Ok(BasisState { bits })
}
