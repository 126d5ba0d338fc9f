//! Ansatz configuration and the prepared runner that evaluates it.

use crate::combinatorics::{
    enumerate_dual_basis, greedy_dual_fill, product_basis, DualBasis, ProductBasis,
};
use crate::engine::full::{standard_state, FullState, PenaltyTable};
use crate::engine::subspace::{
    apply_cost_phase, apply_plaquette_layer, apply_xy_mixer, init_basis_state,
    init_dicke_product, CostTable, DualMixerExact, MixerTopology, PlaquetteSpec,
    SubspaceState, XyMixerSpec,
};
use crate::error::{Error, Result};
use crate::model::{AllocationBits, ProblemInstance, DEFAULT_LAMBDA};
use crate::rng::DEFAULT_SEED;
use crate::sampling::SampleHistogram;
use crate::scalar::Scalar;
use num_complex::Complex;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AnsatzKind {
    /// `|+>^N`, penalty Hamiltonian, transverse-field mixer.
    StandardPenalty,
    /// Dicke product state with node-wise XY mixers.
    DickeXy,
    /// Greedy dual-feasible basis state with plaquette mixers.
    DualPlaquette,
}

impl AnsatzKind {
    pub fn label(self) -> &'static str {
        match self {
            AnsatzKind::StandardPenalty => "standard",
            AnsatzKind::DickeXy => "dicke-xy",
            AnsatzKind::DualPlaquette => "dual",
        }
    }
}

impl fmt::Display for AnsatzKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for AnsatzKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(AnsatzKind::StandardPenalty),
            "dicke-xy" => Ok(AnsatzKind::DickeXy),
            "dual" => Ok(AnsatzKind::DualPlaquette),
            other => Err(Error::Config(format!("unknown ansatz `{other}`"))),
        }
    }
}

/// How the dual mixer exponential is realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DualMixerMode {
    /// Ordered product of plaquette rotations.
    #[default]
    Sequential,
    /// Dense exponential of the summed plaquette Hamiltonian.
    Exact,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzConfig {
    pub kind: AnsatzKind,
    pub depth: usize,
    pub lambda: f64,
    pub topology: MixerTopology,
    pub dual_mixer: DualMixerMode,
    pub shots: usize,
    pub seed: u64,
}

impl AnsatzConfig {
    pub fn new(kind: AnsatzKind) -> Self {
        Self {
            kind,
            depth: 1,
            lambda: DEFAULT_LAMBDA,
            topology: MixerTopology::Complete,
            dual_mixer: DualMixerMode::Sequential,
            shots: 1024,
            seed: DEFAULT_SEED,
        }
    }

    pub fn with_shots(mut self, shots: usize) -> Self {
        self.shots = shots;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_depth(mut self, depth: usize) -> Self {
        self.depth = depth;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.depth == 0 {
            return Err(Error::Config("depth must be at least 1".into()));
        }
        if self.shots == 0 {
            return Err(Error::Config("shots must be at least 1".into()));
        }
        if !(self.lambda >= 0.0) {
            return Err(Error::Config(format!("lambda {} must be >= 0", self.lambda)));
        }
        Ok(())
    }

    /// Whether feasibility also requires the channel capacities.
    pub fn checks_channels(&self) -> bool {
        self.kind == AnsatzKind::DualPlaquette
    }
}

/// One sampled evaluation of the ansatz at fixed angles.
#[derive(Debug, Clone)]
pub struct Evaluation {
    /// Shot mean of the objective: penalty cost for the standard ansatz,
    /// conflict count otherwise.
    pub mean_cost: f64,
    pub histogram: SampleHistogram,
    pub feasibility_ratio: f64,
    pub best_feasible: Option<(usize, AllocationBits)>,
}

enum Prepared<T> {
    Standard {
        table: PenaltyTable,
    },
    Dicke {
        basis: ProductBasis,
        costs: CostTable,
        mixer: XyMixerSpec<T>,
    },
    Dual {
        basis: DualBasis,
        costs: CostTable,
        plaquettes: PlaquetteSpec,
        exact: Option<DualMixerExact<T>>,
        start: AllocationBits,
    },
}

/// Final amplitudes of one circuit execution together with the basis
/// allocation of each index.
pub enum FinalState<'a, T> {
    Full(FullState<T>),
    Product(SubspaceState<'a, T, ProductBasis>),
    Dual(SubspaceState<'a, T, DualBasis>),
}

/// Instance-specific precomputation for repeated ansatz evaluations.
pub struct QaoaRunner<'i, T> {
    inst: &'i ProblemInstance,
    config: AnsatzConfig,
    prepared: Prepared<T>,
}

impl<'i, T: Scalar> QaoaRunner<'i, T> {
    pub fn new(inst: &'i ProblemInstance, config: AnsatzConfig) -> Result<Self> {
        config.validate()?;
        let prepared = match config.kind {
            AnsatzKind::StandardPenalty => {
                Prepared::Standard {
                    table: PenaltyTable::new(inst)?,
                }
            }
            AnsatzKind::DickeXy => {
                let basis = product_basis(inst)?;
                let costs = CostTable::new(inst, &basis)?;
                let mixer = XyMixerSpec::new(&basis, config.topology);
                Prepared::Dicke {
                    basis,
                    costs,
                    mixer,
                }
            }
            AnsatzKind::DualPlaquette => {
                let basis = enumerate_dual_basis(inst)?;
                let costs = CostTable::new(inst, &basis)?;
                let plaquettes = PlaquetteSpec::new(&basis)?;
                let exact = match config.dual_mixer {
                    DualMixerMode::Sequential => None,
                    DualMixerMode::Exact => Some(DualMixerExact::new(&plaquettes)?),
                };
                let start = greedy_dual_fill(inst)?;
                Prepared::Dual {
                    basis,
                    costs,
                    plaquettes,
                    exact,
                    start,
                }
            }
        };
        Ok(Self {
            inst,
            config,
            prepared,
        })
    }

    pub fn instance(&self) -> &ProblemInstance {
        self.inst
    }

    pub fn config(&self) -> &AnsatzConfig {
        &self.config
    }

    /// Changes the run seed without redoing the precomputation.
    pub fn set_seed(&mut self, seed: u64) {
        self.config.seed = seed;
    }

    /// Dual start state `X0`, if this is the dual ansatz.
    pub fn dual_start(&self) -> Option<&AllocationBits> {
        match &self.prepared {
            Prepared::Dual { start, .. } => Some(start),
            _ => None,
        }
    }

    pub fn product_basis(&self) -> Option<&ProductBasis> {
        match &self.prepared {
            Prepared::Dicke { basis, .. } => Some(basis),
            _ => None,
        }
    }

    pub fn dual_basis(&self) -> Option<&DualBasis> {
        match &self.prepared {
            Prepared::Dual { basis, .. } => Some(basis),
            _ => None,
        }
    }

    fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != 2 * self.config.depth {
            return Err(Error::Dimension {
                expected: 2 * self.config.depth,
                actual: params.len(),
            });
        }
        Ok(())
    }

    /// Runs the circuit `prod_l U_M(beta_l) U_P(gamma_l)` on the initial state.
    /// Parameters are `[gamma_1, beta_1, .., gamma_p, beta_p]`.
    pub fn evolve(&self, params: &[f64]) -> Result<FinalState<'_, T>> {
        self.check_params(params)?;
        let layers = params.chunks(2).map(|l| (T::of(l[0]), T::of(l[1])));
        match &self.prepared {
            Prepared::Standard { table } => {
                let layers: Vec<(T, T)> = layers.collect();
                Ok(FinalState::Full(standard_state(table, &layers, T::of(self.config.lambda))?))
            }
            Prepared::Dicke {
                basis,
                costs,
                mixer,
            } => {
                let mut s = init_dicke_product::<T>(self.inst, basis)?;
                for (g, b) in layers {
                    apply_cost_phase(&mut s, costs, g)?;
                    apply_xy_mixer(&mut s, mixer, b)?;
                }
                Ok(FinalState::Product(s))
            }
            Prepared::Dual {
                basis,
                costs,
                plaquettes,
                exact,
                start,
            } => {
                let mut s = init_basis_state::<T, _>(basis, start)?;
                for (g, b) in layers {
                    apply_cost_phase(&mut s, costs, g)?;
                    match exact {
                        Some(e) => e.apply(&mut s, b)?,
                        None => apply_plaquette_layer(&mut s, plaquettes, b)?,
                    }
                }
                Ok(FinalState::Dual(s))
            }
        }
    }

    /// Objective value of every amplitude index of the final state.
    fn objective_of_index(&self) -> Box<dyn Fn(usize) -> f64 + Sync + '_> {
        match &self.prepared {
            Prepared::Standard { table } => {
                let lambda = self.config.lambda;
                Box::new(move |z| table.penalty_cost(z, lambda))
            }
            Prepared::Dicke { costs, .. } | Prepared::Dual { costs, .. } => {
                Box::new(move |r| costs.get(r) as f64)
            }
        }
    }

    /// Exact mean and variance of the objective under the final state.
    pub fn objective_moments(&self, params: &[f64]) -> Result<(f64, f64)> {
        let state = self.evolve(params)?;
        let amps: &[Complex<T>] = match &state {
            FinalState::Full(s) => s.amplitudes(),
            FinalState::Product(s) => s.amplitudes(),
            FinalState::Dual(s) => s.amplitudes(),
        };
        let f = self.objective_of_index();
        let (mut m1, mut m2) = (0.0, 0.0);
        for (z, a) in amps.iter().enumerate() {
            let p = a.norm_sqr().to_f64_lossy();
            if p == 0.0 {
                continue;
            }
            let v = f(z);
            m1 += p * v;
            m2 += p * v * v;
        }
        Ok((m1, m2 - m1 * m1))
    }

    /// Samples `config.shots` shots at `params` with the given seed.
    pub fn sample(&self, params: &[f64], seed: u64) -> Result<SampleHistogram> {
        let shots = self.config.shots;
        match self.evolve(params)? {
            FinalState::Full(s) => s.sample(self.inst.n(), self.inst.m(), shots, seed),
            FinalState::Product(s) => s.sample(shots, seed),
            FinalState::Dual(s) => s.sample(shots, seed),
        }
    }

    /// Sampled objective estimate at `params`.
    pub fn evaluate(&self, params: &[f64], seed: u64) -> Result<Evaluation> {
        let histogram = self.sample(params, seed)?;
        let mean_cost = match self.config.kind {
            AnsatzKind::StandardPenalty => histogram.mean_penalty_cost(self.inst, self.config.lambda),
            _ => histogram.mean_conflicts(self.inst),
        };
        let channels = self.config.checks_channels();
        Ok(Evaluation {
            mean_cost,
            feasibility_ratio: histogram.feasibility_ratio(self.inst, channels),
            best_feasible: histogram.best_feasible(self.inst, channels),
            histogram,
        })
    }
}

/// One-shot helper: prepares the ansatz and evaluates it with `config.seed`.
pub fn estimate_cost(
    inst: &ProblemInstance,
    config: &AnsatzConfig,
    params: &[f64],
) -> Result<Evaluation> {
    QaoaRunner::<f64>::new(inst, config.clone())?.evaluate(params, config.seed)
}
