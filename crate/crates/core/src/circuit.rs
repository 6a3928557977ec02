//! State-vector simulation of a quantum-dot array: ideal single-qubit
//! rotations, noisy CZ gates from the six-level exchange model, and the
//! hardware-efficient ansatz fidelity study.
//!
//! Qubit ordering is little-endian: qubit `q` is bit `q` of the amplitude
//! index, and |0⟩ is spin up.

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::gate::{build_h0, calibrated_cz_duration, computational_block, GateParams};
use crate::linalg::{CMatrix, CVector, C64};
use crate::qtm::{fidelity, frame_correction, framed_block, propagate, sample_rtn_with, trajectory_rng, NoiseModel, NoiseTrajectory, TrajectoryEnsemble};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

/// Largest norm fraction a CZ may push out of the computational subspace.
pub const LEAKAGE_THRESHOLD: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub params: GateParams,
    pub noise: NoiseModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QdArrayTopology {
    pub rows: usize,
    pub cols: usize,
    /// Qubit index hosted by each dot (row-major dot numbering).
    pub qubit_of_dot: Vec<usize>,
    pub edges: Vec<Edge>,
}

impl QdArrayTopology {
    /// All horizontal then vertical nearest-neighbor couplers of a
    /// `rows × cols` grid, with the same gate and noise parameters each.
    pub fn grid(rows: usize, cols: usize, params: GateParams, noise: NoiseModel) -> Result<Self> {
        if rows == 0 || cols == 0 || rows * cols > 20 {
            return Err(Error::invalid("grid must have between 1 and 20 dots"));
        }
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols - 1 {
                edges.push((r * cols + c, r * cols + c + 1));
            }
        }
        for r in 0..rows - 1 {
            for c in 0..cols {
                edges.push((r * cols + c, (r + 1) * cols + c));
            }
        }
        let topo = QdArrayTopology {
            rows,
            cols,
            qubit_of_dot: (0..rows * cols).collect(),
            edges: edges
                .into_iter()
                .map(|(a, b)| Edge { a, b, params, noise })
                .collect(),
        };
        topo.validate()?;
        Ok(topo)
    }

    /// 2×3 array at the given operating point.
    pub fn default_2x3(params: GateParams, noise: NoiseModel) -> Self {
        Self::grid(2, 3, params, noise).expect("2x3 grid is valid")
    }

    pub fn n_qubits(&self) -> usize {
        self.rows * self.cols
    }

    fn dot_of_qubit(&self, q: usize) -> Option<usize> {
        self.qubit_of_dot.iter().position(|&x| x == q)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_qubits();
        let mut seen = vec![false; n];
        if self.qubit_of_dot.len() != n {
            return Err(Error::invalid("qubit_of_dot must list one qubit per dot"));
        }
        for &q in &self.qubit_of_dot {
            if q >= n || seen[q] {
                return Err(Error::invalid("qubit_of_dot must be a permutation"));
            }
            seen[q] = true;
        }
        for e in &self.edges {
            if e.a >= n || e.b >= n {
                return Err(Error::QubitOutOfRange {
                    index: e.a.max(e.b),
                    n_qubits: n,
                });
            }
            let da = self.dot_of_qubit(e.a).unwrap();
            let db = self.dot_of_qubit(e.b).unwrap();
            let (ra, ca) = (da / self.cols, da % self.cols);
            let (rb, cb) = (db / self.cols, db % self.cols);
            if ra.abs_diff(rb) + ca.abs_diff(cb) != 1 {
                return Err(Error::NotNeighbors(e.a, e.b));
            }
            e.params.validate()?;
            e.noise.validate()?;
        }
        Ok(())
    }

    /// Index of the coupler between qubits `q1` and `q2`, either order.
    pub fn edge_index(&self, q1: usize, q2: usize) -> Result<usize> {
        self.edges
            .iter()
            .position(|e| (e.a, e.b) == (q1, q2) || (e.a, e.b) == (q2, q1))
            .ok_or(Error::NotNeighbors(q1, q2))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Instruction {
    Rotation { qubit: usize, axis: Axis, angle: f64 },
    /// First qubit plays dot 1 of the six-level model.
    Cz { control: usize, target: usize, duration_ns: Option<f64> },
    Barrier,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub n_qubits: usize,
    pub instructions: Vec<Instruction>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit {
            n_qubits,
            instructions: Vec::new(),
        }
    }

    pub fn rotation(&mut self, qubit: usize, axis: Axis, angle: f64) -> &mut Self {
        self.instructions.push(Instruction::Rotation { qubit, axis, angle });
        self
    }

    pub fn cz(&mut self, control: usize, target: usize) -> &mut Self {
        self.instructions.push(Instruction::Cz {
            control,
            target,
            duration_ns: None,
        });
        self
    }

    pub fn barrier(&mut self) -> &mut Self {
        self.instructions.push(Instruction::Barrier);
        self
    }

    pub fn cz_count(&self) -> usize {
        self.instructions
            .iter()
            .filter(|i| matches!(i, Instruction::Cz { .. }))
            .count()
    }

    /// Copy with every CZ removed.
    pub fn without_cz(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            instructions: self
                .instructions
                .iter()
                .filter(|i| !matches!(i, Instruction::Cz { .. }))
                .copied()
                .collect(),
        }
    }

    /// Checks qubit ranges and that every CZ sits on a coupler.
    pub fn validate(&self, topo: &QdArrayTopology) -> Result<()> {
        if self.n_qubits != topo.n_qubits() {
            return Err(Error::invalid(format!(
                "circuit has {} qubits, topology {}",
                self.n_qubits,
                topo.n_qubits()
            )));
        }
        for (index, ins) in self.instructions.iter().enumerate() {
            let check = || -> Result<()> {
                match *ins {
                    Instruction::Rotation { qubit, angle, .. } => {
                        self.check_qubit(qubit)?;
                        if !angle.is_finite() {
                            return Err(Error::invalid("non-finite rotation angle"));
                        }
                    }
                    Instruction::Cz {
                        control,
                        target,
                        duration_ns,
                    } => {
                        self.check_qubit(control)?;
                        self.check_qubit(target)?;
                        topo.edge_index(control, target)?;
                        if let Some(d) = duration_ns {
                            if !(d > 0.0 && d.is_finite()) {
                                return Err(Error::invalid("CZ duration must be positive"));
                            }
                        }
                    }
                    Instruction::Barrier => {}
                }
                Ok(())
            };
            check().map_err(|e| Error::AtInstruction {
                index,
                source: Box::new(e),
            })?;
        }
        Ok(())
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                index: q,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    /// Parses the line format (`RX q θ`, `RY q θ`, `RZ q θ`,
    /// `CZ q1 q2 [duration_ns]`, `BARRIER`, `#` comments).
    pub fn parse(text: &str, n_qubits: usize) -> Result<Circuit> {
        let mut c = Circuit::new(n_qubits);
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line, msg };
            let tok: Vec<&str> = body.split_whitespace().collect();
            let num = |s: &str| s.parse::<f64>().map_err(|e| err(format!("bad number {s:?}: {e}")));
            let qubit = |s: &str| -> Result<usize> {
                let q = s.parse::<usize>().map_err(|e| err(format!("bad qubit {s:?}: {e}")))?;
                if q >= n_qubits {
                    return Err(err(format!("qubit {q} out of range for {n_qubits} qubits")));
                }
                Ok(q)
            };
            let op = tok[0].to_ascii_uppercase();
            let ins = match (op.as_str(), tok.len()) {
                ("RX" | "RY" | "RZ", 3) => Instruction::Rotation {
                    qubit: qubit(tok[1])?,
                    axis: match op.as_str() {
                        "RX" => Axis::X,
                        "RY" => Axis::Y,
                        _ => Axis::Z,
                    },
                    angle: num(tok[2])?,
                },
                ("CZ", 3 | 4) => Instruction::Cz {
                    control: qubit(tok[1])?,
                    target: qubit(tok[2])?,
                    duration_ns: tok.get(3).map(|s| num(s)).transpose()?,
                },
                ("BARRIER", 1) => Instruction::Barrier,
                _ => return Err(err(format!("unrecognized instruction {body:?}"))),
            };
            c.instructions.push(ins);
        }
        Ok(c)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ins in &self.instructions {
            match *ins {
                Instruction::Rotation { qubit, axis, angle } => {
                    writeln!(f, "R{axis:?} {qubit} {angle}")?;
                }
                Instruction::Cz {
                    control,
                    target,
                    duration_ns,
                } => match duration_ns {
                    Some(d) => writeln!(f, "CZ {control} {target} {d}")?,
                    None => writeln!(f, "CZ {control} {target}")?,
                },
                Instruction::Barrier => writeln!(f, "BARRIER")?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// |0…0⟩.
    pub fn zero(n_qubits: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = C64::new(1.0, 0.0);
        StateVector { n_qubits, amps }
    }

    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let n = amps.len();
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::invalid("amplitude count must be a power of two"));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::invalid(format!("state norm {norm} is not 1")));
        }
        Ok(StateVector {
            n_qubits: n.trailing_zeros() as usize,
            amps,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn to_cvector(&self) -> CVector {
        CVector::from_vec(self.amps.clone())
    }

    fn check(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                index: q,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    /// exp(−i θ σ/2) on qubit `q`.
    pub fn apply_single_qubit(&mut self, q: usize, axis: Axis, angle: f64) -> Result<()> {
        self.check(q)?;
        let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
        let i = C64::new(0.0, 1.0);
        let m = match axis {
            Axis::X => [[C64::new(c, 0.0), -i * s], [-i * s, C64::new(c, 0.0)]],
            Axis::Y => [[C64::new(c, 0.0), C64::new(-s, 0.0)], [C64::new(s, 0.0), C64::new(c, 0.0)]],
            Axis::Z => [[C64::from_polar(1.0, -angle / 2.0), C64::new(0.0, 0.0)], [C64::new(0.0, 0.0), C64::from_polar(1.0, angle / 2.0)]],
        };
        let bit = 1usize << q;
        for idx in 0..self.amps.len() {
            if idx & bit == 0 {
                let (a0, a1) = (self.amps[idx], self.amps[idx | bit]);
                self.amps[idx] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[idx | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
        Ok(())
    }

    /// Applies a 4×4 operator on (q1, q2) with local index 2·b(q1) + b(q2),
    /// then renormalizes. Returns the norm fraction lost before
    /// renormalization.
    pub fn apply_two_qubit(&mut self, q1: usize, q2: usize, block: &CMatrix) -> Result<f64> {
        self.check(q1)?;
        self.check(q2)?;
        if q1 == q2 {
            return Err(Error::invalid("two-qubit gate needs distinct qubits"));
        }
        let (b1, b2) = (1usize << q1, 1usize << q2);
        let before: f64 = self.amps.iter().map(|a| a.norm_sqr()).sum();
        for base in 0..self.amps.len() {
            if base & (b1 | b2) != 0 {
                continue;
            }
            let idx = [base, base | b2, base | b1, base | b1 | b2];
            let v = idx.map(|k| self.amps[k]);
            for (r, &k) in idx.iter().enumerate() {
                self.amps[k] = (0..4).map(|c| block[(r, c)] * v[c]).sum();
            }
        }
        let after: f64 = self.amps.iter().map(|a| a.norm_sqr()).sum();
        let scale = 1.0 / after.sqrt();
        self.amps.iter_mut().for_each(|a| *a *= scale);
        Ok(1.0 - after / before)
    }

    /// Reduced density matrix of one qubit, row-major 2×2.
    pub fn reduced_qubit(&self, q: usize) -> Result<[[C64; 2]; 2]> {
        self.check(q)?;
        let bit = 1usize << q;
        let mut rho = [[C64::new(0.0, 0.0); 2]; 2];
        for idx in 0..self.amps.len() {
            if idx & bit == 0 {
                let (a0, a1) = (self.amps[idx], self.amps[idx | bit]);
                rho[0][0] += a0 * a0.conj();
                rho[0][1] += a0 * a1.conj();
                rho[1][0] += a1 * a0.conj();
                rho[1][1] += a1 * a1.conj();
            }
        }
        Ok(rho)
    }
}

/// How RTN realizations are shared between CZ gates within a trajectory.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseCorrelation {
    /// Fresh realization for every CZ instruction.
    #[default]
    PerGate,
    /// One realization per coupler, spanning all of that coupler's gates
    /// back to back.
    PerEdge,
}

/// Calibrated noiseless CZ on one coupler.
#[derive(Debug, Clone)]
struct CzModel {
    h0: CMatrix,
    duration_ns: f64,
    frame: [C64; 4],
}

impl CzModel {
    fn new(params: &GateParams, duration_ns: Option<f64>) -> Result<Self> {
        let h0 = build_h0(params)?;
        let duration_ns = match duration_ns {
            Some(d) => d,
            None => calibrated_cz_duration(params)?,
        };
        let u = propagate(&h0, &NoiseTrajectory::constant(0.0, duration_ns), &cols4(), &[duration_ns])?;
        let frame = frame_correction(&computational_block(&u[0]));
        Ok(CzModel { h0, duration_ns, frame })
    }

    /// Frame-corrected computational block under `noise`.
    fn block(&self, noise: &NoiseTrajectory) -> Result<CMatrix> {
        let u = propagate(&self.h0, noise, &cols4(), &[self.duration_ns])?;
        Ok(framed_block(&u[0], &self.frame))
    }
}

fn cols4() -> CMatrix {
    CMatrix::identity(6, 6).columns(0, 4).into_owned()
}

/// Frame-corrected 4×4 block of a noiseless CZ on `params`.
pub fn noiseless_cz_block(params: &GateParams) -> Result<CMatrix> {
    let m = CzModel::new(params, None)?;
    m.block(&NoiseTrajectory::constant(0.0, m.duration_ns))
}

/// |Tr(CZ† B)|²/16.
pub fn cz_process_fidelity(block: &CMatrix) -> f64 {
    let tr = block[(0, 0)] + block[(1, 1)] + block[(2, 2)] - block[(3, 3)];
    tr.norm_sqr() / 16.0
}

/// Restriction of `noise` to [a, b], shifted to start at 0.
fn window(noise: &NoiseTrajectory, a: f64, b: f64) -> NoiseTrajectory {
    let mut switch_times = Vec::new();
    let mut values = vec![noise.value_at(a)];
    for (&s, &v) in noise.switch_times.iter().zip(&noise.values[1..]) {
        if s > a && s < b {
            switch_times.push(s - a);
            values.push(v);
        }
    }
    NoiseTrajectory {
        switch_times,
        values,
        duration: b - a,
    }
}

/// Per-circuit gate data shared by all trajectories.
struct Prepared {
    models: Vec<Option<CzModel>>,
    /// Per-edge noise window (start, end) for each CZ instruction.
    slots: Vec<Option<(usize, f64, f64)>>,
    edge_totals: Vec<f64>,
}

fn prepare(circuit: &Circuit, topo: &QdArrayTopology) -> Result<Prepared> {
    circuit.validate(topo)?;
    let mut edge_models: Vec<Option<CzModel>> = vec![None; topo.edges.len()];
    let mut models = Vec::with_capacity(circuit.instructions.len());
    let mut slots = Vec::with_capacity(circuit.instructions.len());
    let mut edge_totals = vec![0.0; topo.edges.len()];
    for (index, ins) in circuit.instructions.iter().enumerate() {
        let at = |e| Error::AtInstruction {
            index,
            source: Box::new(e),
        };
        match *ins {
            Instruction::Cz {
                control,
                target,
                duration_ns,
            } => {
                let e = topo.edge_index(control, target).map_err(at)?;
                let model = match (duration_ns, &edge_models[e]) {
                    (None, Some(m)) => m.clone(),
                    _ => {
                        let m = CzModel::new(&topo.edges[e].params, duration_ns).map_err(at)?;
                        if duration_ns.is_none() {
                            edge_models[e] = Some(m.clone());
                        }
                        m
                    }
                };
                let start = edge_totals[e];
                edge_totals[e] += model.duration_ns;
                slots.push(Some((e, start, edge_totals[e])));
                models.push(Some(model));
            }
            _ => {
                slots.push(None);
                models.push(None);
            }
        }
    }
    Ok(Prepared {
        models,
        slots,
        edge_totals,
    })
}

fn run_one(
    circuit: &Circuit,
    topo: &QdArrayTopology,
    prep: &Prepared,
    correlation: NoiseCorrelation,
    mut rng: Option<&mut ChaCha8Rng>,
) -> Result<StateVector> {
    let mut state = StateVector::zero(circuit.n_qubits);
    let mut edge_noise: Vec<Option<NoiseTrajectory>> = vec![None; topo.edges.len()];
    for (index, ins) in circuit.instructions.iter().enumerate() {
        let at = |e| Error::AtInstruction {
            index,
            source: Box::new(e),
        };
        match *ins {
            Instruction::Rotation { qubit, axis, angle } => {
                state.apply_single_qubit(qubit, axis, angle).map_err(at)?;
            }
            Instruction::Cz { control, target, .. } => {
                let model = prep.models[index].as_ref().expect("prepared CZ");
                let (e, a, b) = prep.slots[index].expect("prepared slot");
                let noise_model = &topo.edges[e].noise;
                let noise = match rng.as_deref_mut() {
                    None => NoiseTrajectory::constant(0.0, model.duration_ns),
                    Some(rng) => match correlation {
                        NoiseCorrelation::PerGate => sample_rtn_with(noise_model, model.duration_ns, rng).map_err(at)?,
                        NoiseCorrelation::PerEdge => {
                            if edge_noise[e].is_none() {
                                edge_noise[e] = Some(sample_rtn_with(noise_model, prep.edge_totals[e], rng).map_err(at)?);
                            }
                            window(edge_noise[e].as_ref().unwrap(), a, b)
                        }
                    },
                };
                let block = model.block(&noise).map_err(at)?;
                let leak = state.apply_two_qubit(control, target, &block).map_err(at)?;
                if leak > LEAKAGE_THRESHOLD {
                    return Err(at(Error::Leakage(leak)));
                }
            }
            Instruction::Barrier => {}
        }
    }
    Ok(state)
}

/// Noiseless run of the same gate path (calibrated six-level CZs).
pub fn ideal_state(circuit: &Circuit, topo: &QdArrayTopology) -> Result<StateVector> {
    let prep = prepare(circuit, topo)?;
    run_one(circuit, topo, &prep, NoiseCorrelation::PerGate, None)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunOptions {
    pub n_traj: usize,
    pub seed: u64,
    pub correlation: NoiseCorrelation,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            n_traj: 1000,
            seed: 0,
            correlation: NoiseCorrelation::PerGate,
        }
    }
}

/// Final states of `n_traj` noisy runs from |0…0⟩. Trajectory `k` draws all
/// of its noise from stream `k` of `seed`.
pub fn run_noisy(circuit: &Circuit, topo: &QdArrayTopology, opts: &RunOptions, exec: Exec) -> Result<TrajectoryEnsemble> {
    if opts.n_traj == 0 {
        return Err(Error::invalid("n_traj must be at least 1"));
    }
    let prep = prepare(circuit, topo)?;
    let states = exec.try_map(opts.n_traj, |k| {
        let mut rng = trajectory_rng(opts.seed, k as u64);
        run_one(circuit, topo, &prep, opts.correlation, Some(&mut rng)).map(|s| s.to_cvector())
    })?;
    Ok(TrajectoryEnsemble {
        states,
        n_traj: opts.n_traj,
        seed: opts.seed,
    })
}

/// Rotation angles of the ansatz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnglePolicy {
    /// Uniform in [0, 2π) from a fixed seed. Deeper circuits share the
    /// stage angles of shallower ones.
    Seeded(u64),
    /// Explicit list, used for every depth; must cover the deepest circuit.
    Explicit(Vec<f64>),
}

/// Rotation-angle count for `n_stages`: three Euler angles per qubit per
/// layer, over the initial, per-stage and final layers.
pub fn ansatz_angle_count(n_qubits: usize, n_stages: usize) -> usize {
    3 * n_qubits * (n_stages + 2)
}

impl AnglePolicy {
    pub fn angles(&self, n_qubits: usize, n_stages: usize) -> Result<Vec<f64>> {
        let need = ansatz_angle_count(n_qubits, n_stages);
        match self {
            AnglePolicy::Seeded(seed) => {
                let layer = 3 * n_qubits;
                let mut body = ChaCha8Rng::seed_from_u64(*seed);
                let mut tail = ChaCha8Rng::seed_from_u64(*seed);
                tail.set_stream(1);
                let mut v: Vec<f64> = (0..need - layer).map(|_| body.random::<f64>() * TAU).collect();
                v.extend((0..layer).map(|_| tail.random::<f64>() * TAU));
                Ok(v)
            }
            AnglePolicy::Explicit(list) => {
                if list.len() < need {
                    return Err(Error::invalid(format!("{need} angles needed, {} given", list.len())));
                }
                Ok(list[..need].to_vec())
            }
        }
    }
}

fn rotation_layer(c: &mut Circuit, angles: &[f64]) {
    for (q, e) in angles.chunks(3).enumerate() {
        c.rotation(q, Axis::Z, e[0]).rotation(q, Axis::X, e[1]).rotation(q, Axis::Z, e[2]);
    }
}

/// Hardware-efficient ansatz: a rotation layer, then `n_stages` repeats of
/// (rotation layer, CZ on every coupler), then a final rotation layer.
pub fn build_vqe_ansatz(topo: &QdArrayTopology, n_stages: usize, angles: &[f64]) -> Result<Circuit> {
    let pairs: Vec<(usize, usize)> = topo.edges.iter().map(|e| (e.a, e.b)).collect();
    build_vqe_ansatz_with(topo, n_stages, angles, &pairs)
}

/// As [`build_vqe_ansatz`] with an explicit entangler list, which must
/// consist of couplers.
pub fn build_vqe_ansatz_with(topo: &QdArrayTopology, n_stages: usize, angles: &[f64], entanglers: &[(usize, usize)]) -> Result<Circuit> {
    let n = topo.n_qubits();
    if n_stages == 0 {
        return Err(Error::invalid("ansatz needs at least one stage"));
    }
    let need = ansatz_angle_count(n, n_stages);
    if angles.len() != need {
        return Err(Error::invalid(format!("ansatz needs {need} angles, got {}", angles.len())));
    }
    for &(a, b) in entanglers {
        topo.edge_index(a, b)?;
    }
    let layer = 3 * n;
    let mut c = Circuit::new(n);
    rotation_layer(&mut c, &angles[..layer]);
    for s in 0..n_stages {
        c.barrier();
        rotation_layer(&mut c, &angles[layer * (s + 1)..layer * (s + 2)]);
        for &(a, b) in entanglers {
            c.cz(a, b);
        }
    }
    c.barrier();
    rotation_layer(&mut c, &angles[need - layer..]);
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DepthRow {
    pub n_stages: usize,
    pub f: f64,
    pub stderr: f64,
    pub n_cz: usize,
    pub n_traj: usize,
    pub seed: u64,
}

/// Preparation fidelity of the ansatz against its noiseless run, for each
/// depth in `n_list`.
pub fn ansatz_fidelity_vs_depth(
    topo: &QdArrayTopology,
    policy: &AnglePolicy,
    n_list: &[usize],
    opts: &RunOptions,
    exec: Exec,
) -> Result<Vec<DepthRow>> {
    if n_list.is_empty() {
        return Err(Error::invalid("depth list is empty"));
    }
    n_list
        .iter()
        .map(|&n| {
            let angles = policy.angles(topo.n_qubits(), n)?;
            let circuit = build_vqe_ansatz(topo, n, &angles)?;
            let ideal = ideal_state(&circuit, topo)?.to_cvector();
            let ens = run_noisy(&circuit, topo, opts, exec)?;
            let f = fidelity(&ideal, &ens)?;
            Ok(DepthRow {
                n_stages: n,
                f: f.f,
                stderr: f.stderr,
                n_cz: circuit.cz_count(),
                n_traj: opts.n_traj,
                seed: opts.seed,
            })
        })
        .collect()
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "X" => Ok(Axis::X),
            "Y" => Ok(Axis::Y),
            "Z" => Ok(Axis::Z),
            _ => Err(Error::invalid(format!("unknown axis {s:?}"))),
        }
    }
}
