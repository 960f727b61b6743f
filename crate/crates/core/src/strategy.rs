//! Interchangeable deciders, selectable by name.

use crate::coloring::Color;
use crate::encoder::CnfInstance;
use crate::solver::{
    brute_force_witness, solve, DerivationCertificate, Outcome, Problem, SolveError, Verdict, BRUTE_FORCE_LIMIT,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decision {
    pub verdict: Verdict,
    /// A valid total coloring when satisfiable.
    pub witness: Option<Vec<Color>>,
    /// Present for deciders that record their derivation.
    pub certificate: Option<DerivationCertificate>,
}

pub trait Decider: Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn decide(&self, problem: &Problem<'_>) -> Result<Decision, SolveError>;
}

pub struct Dfs;

impl Decider for Dfs {
    fn name(&self) -> &'static str {
        "dfs"
    }

    fn description(&self) -> &'static str {
        "forced-move propagation with depth-first branching; emits a certificate"
    }

    fn decide(&self, p: &Problem<'_>) -> Result<Decision, SolveError> {
        let cert = solve(p.num_points, p.constraints, p.seed)?;
        let witness = match &cert.outcome {
            Outcome::Sat(c) => Some(c.clone()),
            Outcome::Unsat => None,
        };
        Ok(Decision { verdict: cert.verdict(), witness, certificate: Some(cert) })
    }
}

pub struct BruteForce;

impl Decider for BruteForce {
    fn name(&self) -> &'static str {
        "brute-force"
    }

    fn description(&self) -> &'static str {
        "enumerates every coloring of the unseeded points"
    }

    fn decide(&self, p: &Problem<'_>) -> Result<Decision, SolveError> {
        let witness = brute_force_witness(p.num_points, p.constraints, p.seed)?;
        let verdict = if witness.is_some() { Verdict::Sat } else { Verdict::Unsat };
        Ok(Decision { verdict, witness, certificate: None })
    }
}

pub struct CnfEnumeration;

impl Decider for CnfEnumeration {
    fn name(&self) -> &'static str {
        "cnf"
    }

    fn description(&self) -> &'static str {
        "encodes to CNF and enumerates assignments of the non-unit variables"
    }

    fn decide(&self, p: &Problem<'_>) -> Result<Decision, SolveError> {
        let cnf = CnfInstance::build(p.num_points, p.constraints, p.seed)?;
        let witness =
            cnf.solve_exhaustive(BRUTE_FORCE_LIMIT)?.map(|a| a.into_iter().map(Color::from_bit).collect::<Vec<_>>());
        let verdict = if witness.is_some() { Verdict::Sat } else { Verdict::Unsat };
        Ok(Decision { verdict, witness, certificate: None })
    }
}

static DECIDERS: [&dyn Decider; 3] = [&Dfs, &BruteForce, &CnfEnumeration];

pub fn deciders() -> &'static [&'static dyn Decider] {
    &DECIDERS
}

pub fn decider(name: &str) -> Option<&'static dyn Decider> {
    DECIDERS.iter().copied().find(|d| d.name() == name)
}

pub fn names() -> Vec<&'static str> {
    DECIDERS.iter().map(|d| d.name()).collect()
}
