// SPDX-License-Identifier: Apache-2.0

//! Deterministic multi-party simulator: a dealer, n participants, a
//! reconstructor and an arbiter run the whole scheme under configured
//! adversary strategies and produce a JSON report.

pub mod config;
pub mod engine;
pub mod matrix;
pub mod report;
pub mod strategy;

pub use config::{ParamsSource, ScenarioConfig, ScenarioPhase, SecretSource};
pub use engine::{run_scenario, run_scenarios};
pub use matrix::{
    enumerate_alpha_matrix, enumerate_lambda_matrix, enumerate_membership_matrix, AlphaMatrix, AlphaRow, LambdaMatrix,
    LambdaRow, MembershipMatrix, MembershipRow,
};
pub use report::{
    fixture_hash, op_count_report, secrecy_findings, Cheater, DegenerateEvent, DetectionSummary, DisputeRecord,
    MembershipRecord, Prover, ReconstructionRecord, ScenarioReport, VerificationRecord,
};
pub use strategy::{AdversaryStrategy, LambdaForm, Role, Substitution, EXHAUST_MAX_Q};
